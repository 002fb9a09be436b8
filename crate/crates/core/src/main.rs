use std::fs::OpenOptions;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{CommandFactory, Parser, Subcommand};

use gtp_mesh::bench::{self, BenchReport};
use gtp_mesh::config::{Config, Mode, Transport};
use gtp_mesh::ezafe::{self, EzafeCorpus};
use gtp_mesh::homograph::{self, AnnotatedCorpus};
use gtp_mesh::lexicon::Lexicon;
use gtp_mesh::metrics;
use gtp_mesh::phoneme::PhonemeInventory;
use gtp_mesh::pipeline::{rtf_of, Frontend, Pipeline, Refiner};
use gtp_mesh::service::{serve, ServeOptions};

const CONFIG_ENV: &str = "GTP_MESH_CONFIG";

#[derive(Parser, Debug)]
#[command(name = "gtp-mesh", version, about = "Context-aware G2P pipeline with refinement services")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the refined phoneme sequence of each utterance.
    Phonemize {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        mode: Option<Mode>,
        #[arg(long, conflicts_with = "stdin", required_unless_present = "stdin")]
        text: Option<String>,
        /// Read one utterance per line from standard input.
        #[arg(long)]
        stdin: bool,
        /// Print per-stage timings to standard error.
        #[arg(long)]
        trace: bool,
    },
    /// Host the refinement service on the configured transport.
    Serve {
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Build a homograph database from an annotated corpus.
    BuildDb {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        lexicon: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = homograph::DEFAULT_WINDOW)]
        window: usize,
        #[arg(long, default_value_t = homograph::DEFAULT_ALPHA)]
        alpha: f64,
        /// Phoneme inventory (defaults to the built-in one).
        #[arg(long)]
        inventory: Option<PathBuf>,
    },
    /// Train the Ezafe tagger.
    TrainEzafe {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = ezafe::DEFAULT_EPOCHS)]
        epochs: usize,
    },
    /// Score the pipeline on an evaluation file.
    Eval {
        #[arg(long)]
        cases: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        mode: Option<Mode>,
    },
    /// Benchmark accuracy and real-time factor per mode.
    Bench {
        #[arg(long)]
        cases: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', default_value = "direct_cold,service")]
        modes: Vec<Mode>,
        #[arg(long, default_value_t = 5)]
        runs: usize,
        #[arg(long)]
        csv: PathBuf,
        /// Also write (log10 rtf_mean, g2p_quality) points here.
        #[arg(long)]
        points: Option<PathBuf>,
    },
    /// Run the full pipeline and write the stub audio.
    Synth {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        mode: Option<Mode>,
        #[arg(long)]
        text: String,
        #[arg(long)]
        wav: PathBuf,
    },
}

fn load_config(path: Option<&Path>, mode: Option<Mode>) -> Result<Config> {
    let path = match path {
        Some(p) => p.to_path_buf(),
        None => match std::env::var_os(CONFIG_ENV) {
            Some(p) => PathBuf::from(p),
            None => {
                return Err(anyhow::Error::msg(format!(
                    "no config given: pass --config or set {CONFIG_ENV}"
                ))
                .context(Usage))
            }
        },
    };
    let mut config = Config::load(&path).with_context(|| format!("loading {}", path.display()))?;
    if let Some(m) = mode {
        config.mode = m;
    }
    Ok(config)
}

/// Marks an error as a usage problem (exit code 1).
#[derive(Debug)]
struct Usage;

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("usage error")
    }
}

fn phonemize(pipeline: &mut Pipeline, text: &str, trace: bool) -> Result<String> {
    let out = pipeline.phonemize(text)?;
    if trace {
        eprint!("{}", out.timings().trace());
    }
    Ok(out.refined.to_string())
}

fn cmd_phonemize(config: Config, text: Option<String>, trace: bool) -> Result<()> {
    let mut pipeline = Pipeline::new(config)?;
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let result = (|| -> Result<()> {
        match text {
            Some(t) => writeln!(out, "{}", phonemize(&mut pipeline, &t, trace)?)?,
            None => {
                for line in io::stdin().lock().lines() {
                    writeln!(out, "{}", phonemize(&mut pipeline, &line?, trace)?)?;
                }
            }
        }
        Ok(())
    })();
    pipeline.shutdown()?;
    result
}

fn cmd_serve(config: Config) -> Result<()> {
    let started = Instant::now();
    let frontend = Frontend::load(&config)?;
    let mut refiner = Refiner::load(&config, &frontend)?;
    let opts = ServeOptions {
        hang_on_shutdown: config.hang_on_shutdown,
        load_time_s: started.elapsed().as_secs_f64(),
    };
    let exit = match config.transport {
        Transport::Stdio => serve(&mut refiner, io::stdin().lock(), io::stdout().lock(), &opts)?,
        Transport::Fifo => {
            let (fin, fout) = match (&config.fifo_in, &config.fifo_out) {
                (Some(i), Some(o)) => (i, o),
                _ => bail!("fifo transport needs fifo_in and fifo_out"),
            };
            let input = OpenOptions::new()
                .read(true)
                .open(fin)
                .with_context(|| format!("opening {}", fin.display()))?;
            let output = OpenOptions::new()
                .write(true)
                .open(fout)
                .with_context(|| format!("opening {}", fout.display()))?;
            serve(&mut refiner, input, output, &opts)?
        }
    };
    log::info!("service loop ended: {exit:?}");
    Ok(())
}

fn cmd_build_db(
    corpus: &Path,
    lexicon: &Path,
    out: &Path,
    window: usize,
    alpha: f64,
    inventory: Option<&Path>,
) -> Result<()> {
    let inv = match inventory {
        Some(p) => PhonemeInventory::load(p)?,
        None => PhonemeInventory::default_inventory(),
    };
    let lex = Lexicon::load(lexicon, &inv).with_context(|| format!("loading {}", lexicon.display()))?;
    let corpus =
        AnnotatedCorpus::load(corpus).with_context(|| format!("loading {}", corpus.display()))?;
    let db = homograph::build_db(&corpus, &lex, window, alpha)?;
    db.save(out)?;
    println!(
        "homographs={} vocab={} window={window} alpha={alpha}",
        db.words().count(),
        db.vocab_size()
    );
    Ok(())
}

fn cmd_train(corpus: &Path, out: &Path, epochs: usize) -> Result<()> {
    let corpus = EzafeCorpus::load(corpus).with_context(|| format!("loading {}", corpus.display()))?;
    let model = ezafe::train(&corpus, epochs)?;
    model.save(out)?;
    let prf = ezafe::evaluate(&model, &corpus)?;
    println!(
        "features={} epochs={} train_f1={:.4}",
        model.feature_count(),
        model.epochs_trained(),
        prf.f1
    );
    Ok(())
}

fn cmd_eval(config: Config, cases: &Path) -> Result<()> {
    let mut pipeline = Pipeline::new(config)?;
    let result = (|| -> Result<()> {
        let inv = pipeline.frontend().inventory.clone();
        let cases = metrics::load_cases(cases, &inv)?;
        if cases.is_empty() {
            bail!("no evaluation cases");
        }
        let outputs = cases
            .iter()
            .map(|c| pipeline.phonemize(&c.text))
            .collect::<Result<Vec<_>, _>>()?;
        let (per, f1, acc) = bench::quality(&cases, &outputs, &pipeline)?;
        println!("cases={}", cases.len());
        println!("per={per:.4}");
        println!("ezafe_f1={f1:.4}");
        println!("homograph_acc={acc:.4}");
        match metrics::g2p_quality(f1, acc, per) {
            Ok(q) => println!("g2p_quality={q:.4}"),
            Err(_) => println!("g2p_quality=inf"),
        }
        Ok(())
    })();
    pipeline.shutdown()?;
    result
}

fn cmd_bench(
    config: Config,
    cases: &Path,
    modes: &[Mode],
    runs: usize,
    csv: &Path,
    points: Option<&Path>,
) -> Result<()> {
    let frontend = Frontend::load(&config)?;
    let cases = metrics::load_cases(cases, &frontend.inventory)?;
    let mut reports: Vec<BenchReport> = Vec::new();
    for &mode in modes {
        let mut c = config.clone();
        c.mode = mode;
        let report = bench::bench(&cases, &c, runs).with_context(|| format!("benchmarking {mode}"))?;
        let r = &report.row;
        println!(
            "model={} mode={} per={:.4} ezafe_f1={:.4} homograph_acc={:.4} rtf={:.4}±{:.4}{} g2p_quality={:.4}",
            r.model,
            r.mode,
            r.per,
            r.ezafe_f1,
            r.homograph_acc,
            r.rtf_mean,
            r.rtf_std,
            if report.std_undefined { " (single run)" } else { "" },
            r.g2p_quality
        );
        reports.push(report);
    }
    bench::emit_csv(&reports, csv)?;
    if let Some(p) = points {
        bench::emit_points(&reports, p)?;
    }
    Ok(())
}

fn cmd_synth(config: Config, text: &str, wav: &Path) -> Result<()> {
    let mut pipeline = Pipeline::new(config)?;
    let result = (|| -> Result<()> {
        let out = pipeline.run(text)?;
        out.synth.write_wav(wav)?;
        println!("{}", out.refined);
        println!("audio_duration_s={:.4}", out.synth.audio_duration_s);
        match rtf_of(&out.synth) {
            Ok(rtf) => println!("rtf={rtf:.4}"),
            Err(_) => println!("rtf=undefined"),
        }
        eprint!("{}", out.timings().trace());
        Ok(())
    })();
    pipeline.shutdown()?;
    result
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Phonemize {
            config,
            mode,
            text,
            stdin: _,
            trace,
        } => cmd_phonemize(load_config(config.as_deref(), mode)?, text, trace),
        Command::Serve { config } => cmd_serve(load_config(config.as_deref(), None)?),
        Command::BuildDb {
            corpus,
            lexicon,
            out,
            window,
            alpha,
            inventory,
        } => cmd_build_db(&corpus, &lexicon, &out, window, alpha, inventory.as_deref()),
        Command::TrainEzafe {
            corpus,
            out,
            epochs,
        } => cmd_train(&corpus, &out, epochs),
        Command::Eval {
            cases,
            config,
            mode,
        } => cmd_eval(load_config(config.as_deref(), mode)?, &cases),
        Command::Bench {
            cases,
            config,
            modes,
            runs,
            csv,
            points,
        } => cmd_bench(
            load_config(config.as_deref(), None)?,
            &cases,
            &modes,
            runs,
            &csv,
            points.as_deref(),
        ),
        Command::Synth {
            config,
            mode,
            text,
            wav,
        } => cmd_synth(load_config(config.as_deref(), mode)?, &text, &wav),
    }
}

/// Help for the subcommand named in `args`, or the top-level help.
fn help_for(args: &[String]) -> String {
    let mut cmd = Cli::command();
    let sub = args.get(1).cloned().unwrap_or_default();
    match cmd.find_subcommand_mut(&sub) {
        Some(s) => s.render_help().to_string(),
        None => cmd.render_help().to_string(),
    }
}

/// Joins the error chain with ": ", skipping causes whose text the
/// previous message already ends with.
fn render_chain(e: &anyhow::Error) -> String {
    let mut out = String::new();
    for cause in e.chain() {
        let msg = cause.to_string();
        if out.ends_with(&msg) {
            continue;
        }
        if !out.is_empty() {
            out.push_str(": ");
        }
        out.push_str(&msg);
    }
    out
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            eprintln!("{}", e.render());
            eprintln!("{}", help_for(&args));
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", render_chain(&e));
            if e.downcast_ref::<Usage>().is_some() {
                eprintln!("{}", help_for(&args));
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
