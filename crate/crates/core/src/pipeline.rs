//! Base phonemization → homograph correction → Ezafe insertion → synthesis.
//!
//! The two refinement stages run either in-process (`direct_cold`, which
//! loads the refinement artifacts for every request, and `direct_warm`,
//! which loads them once) or in a persistent service process (`service`).
//! Synthesis is a timed stub that emits silence.

use std::fmt::Write as _;
use std::io::Cursor;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::thread;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::config::{Config, ConfigError, Mode};
use crate::ezafe::{insert_ezafe, EzafeError, EzafeModel, GlideRule};
use crate::homograph::{
    apply_homographs, build_db, disambiguate, AnnotatedCorpus, HomographDb, HomographError,
    DEFAULT_ALPHA, DEFAULT_WINDOW,
};
use crate::lexicon::{phonemize_utterance, G2pError, HomographSite, Lexicon, LtsTable};
use crate::phoneme::{parse_seq, InventoryError, PhonemeInventory, PhonemeSequence, SeqError, Token};
use crate::service::{
    spawn_service, Handler, RefineRequest, RefineResponse, ServiceError, ServiceHandle, ServiceState,
    SpawnOptions, OP_REFINE,
};

pub const SAMPLE_RATE: u32 = 16_000;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    G2p(#[from] G2pError),
    #[error(transparent)]
    Homograph(#[from] HomographError),
    #[error(transparent)]
    Ezafe(#[from] EzafeError),
    #[error(transparent)]
    Seq(#[from] SeqError),
    #[error(transparent)]
    Inventory(#[from] InventoryError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Service(#[from] ServiceError),
    #[error("refinement service is unavailable ({0})")]
    ServiceUnavailable(ServiceState),
    #[error("bad service response: {0}")]
    Protocol(String),
    #[error("{tokens} tokens but {words} words in the phoneme sequence")]
    WordCountMismatch { tokens: usize, words: usize },
    #[error("{}: {source}", path.display())]
    Load {
        path: PathBuf,
        #[source]
        source: Box<dyn std::error::Error + Send + Sync>,
    },
    #[error("audio duration is zero")]
    ZeroDuration,
    #[error("wav encoding failed: {0}")]
    Wav(#[from] hound::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn load_artifact<T, E>(path: &Path, load: impl FnOnce(&Path) -> Result<T, E>) -> Result<T, PipelineError>
where
    E: std::error::Error + Send + Sync + 'static,
{
    load(path).map_err(|e| PipelineError::Load {
        path: path.to_path_buf(),
        source: Box::new(e),
    })
}

/// The always-loaded, cheap artifacts of the base phonemizer.
#[derive(Debug, Clone)]
pub struct Frontend {
    pub inventory: Arc<PhonemeInventory>,
    pub lexicon: Arc<Lexicon>,
    pub lts: Arc<LtsTable>,
}

impl Frontend {
    pub fn load(config: &Config) -> Result<Self, PipelineError> {
        let inventory = match &config.inventory {
            Some(p) => load_artifact(p, |p| PhonemeInventory::load(p))?,
            None => PhonemeInventory::default_inventory(),
        };
        let lexicon = match &config.lexicon {
            Some(p) => load_artifact(p, |p| Lexicon::load(p, &inventory))?,
            None => Lexicon::default(),
        };
        let lts = match &config.lts {
            Some(p) => load_artifact(p, |p| LtsTable::load(p, &inventory))?,
            None => LtsTable::default(),
        };
        Ok(Frontend {
            inventory: Arc::new(inventory),
            lexicon: Arc::new(lexicon),
            lts: Arc::new(lts),
        })
    }
}

/// Refinement stage identifiers, reported to trace hooks in execution order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RefineStage {
    Homograph,
    Ezafe,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Refined {
    pub seq: PhonemeSequence,
    pub choices: Vec<(usize, u32)>,
    pub tags: Vec<bool>,
}

/// Homograph disambiguation followed by Ezafe insertion on an aligned
/// base sequence. `trace` sees each stage as it starts.
#[allow(clippy::too_many_arguments)]
pub fn refine(
    tokens: &[String],
    seq: &PhonemeSequence,
    sites: &[HomographSite],
    db: &HomographDb,
    model: &EzafeModel,
    inventory: &PhonemeInventory,
    lexicon: &Lexicon,
    glide: Option<&GlideRule>,
    trace: &mut dyn FnMut(RefineStage),
) -> Result<Refined, PipelineError> {
    let words = seq.word_count().ok_or(SeqError::MissingAlignment)?;
    if words != tokens.len() {
        return Err(PipelineError::WordCountMismatch {
            tokens: tokens.len(),
            words,
        });
    }
    trace(RefineStage::Homograph);
    let variants: Vec<u32> = sites
        .iter()
        .map(|site| disambiguate(db, site, tokens).variant)
        .collect();
    let seq = apply_homographs(seq, sites, &variants, lexicon)?;

    trace(RefineStage::Ezafe);
    let tags = model.tag(tokens);
    let seq = insert_ezafe(&seq, &tags, inventory, glide)?;

    let choices = sites.iter().map(|s| s.index).zip(variants).collect();
    Ok(Refined { seq, choices, tags })
}

/// The heavy refinement artifacts.
#[derive(Debug, Clone)]
pub struct Refiner {
    pub db: HomographDb,
    pub model: EzafeModel,
    pub frontend: Frontend,
    pub glide: Option<GlideRule>,
}

impl Refiner {
    /// Loads the database and tagger named in `config`, sleeping
    /// `load_delay_s` first to stand in for heavyweight model loading.
    /// Missing paths give an empty database and an all-`none` tagger.
    pub fn load(config: &Config, frontend: &Frontend) -> Result<Self, PipelineError> {
        if config.load_delay_s > 0.0 {
            thread::sleep(Duration::from_secs_f64(config.load_delay_s));
        }
        let db = match &config.homograph_db {
            Some(p) => load_artifact(p, |p| HomographDb::load(p))?,
            None => build_db(
                &AnnotatedCorpus::default(),
                &frontend.lexicon,
                DEFAULT_WINDOW,
                DEFAULT_ALPHA,
            )?,
        };
        let model = match &config.ezafe_model {
            Some(p) => load_artifact(p, |p| EzafeModel::load(p))?,
            None => EzafeModel::default(),
        };
        Ok(Refiner {
            db,
            model,
            frontend: frontend.clone(),
            glide: config.glide.clone(),
        })
    }

    pub fn refine_traced(
        &self,
        tokens: &[String],
        seq: &PhonemeSequence,
        sites: &[HomographSite],
        trace: &mut dyn FnMut(RefineStage),
    ) -> Result<Refined, PipelineError> {
        refine(
            tokens,
            seq,
            sites,
            &self.db,
            &self.model,
            &self.frontend.inventory,
            &self.frontend.lexicon,
            self.glide.as_ref(),
            trace,
        )
    }

    pub fn refine(
        &self,
        tokens: &[String],
        seq: &PhonemeSequence,
        sites: &[HomographSite],
    ) -> Result<Refined, PipelineError> {
        self.refine_traced(tokens, seq, sites, &mut |_| {})
    }

    /// Handles one service request: the sequence travels as text, so its
    /// word alignment is rebuilt from the boundary markers.
    pub fn handle(&self, req: RefineRequest) -> Result<RefineResponse, PipelineError> {
        let seq = parse_seq(&req.phonemes, &self.frontend.inventory)?.align_by_boundaries()?;
        let refined = self.refine(&req.tokens, &seq, &req.sites)?;
        Ok(RefineResponse {
            phonemes: refined.seq.to_string(),
            choices: refined.choices,
            ezafe_tags: refined.tags,
        })
    }
}

impl Handler for Refiner {
    fn refine(&mut self, req: RefineRequest) -> Result<RefineResponse, String> {
        self.handle(req).map_err(|e| e.to_string())
    }
}

/// Per-stage wall-clock seconds of one run.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Timings {
    pub load: f64,
    pub base_g2p: f64,
    pub refine: f64,
    pub synth: f64,
    pub total: f64,
}

impl Timings {
    /// One `stage=<name> seconds=<x>` line per stage.
    pub fn trace(&self) -> String {
        let mut out = String::new();
        for (name, s) in [
            ("load", self.load),
            ("base_g2p", self.base_g2p),
            ("refine", self.refine),
            ("synth", self.synth),
            ("total", self.total),
        ] {
            let _ = writeln!(out, "stage={name} seconds={s:.6}");
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthResult {
    pub audio_duration_s: f64,
    /// 16 kHz mono 16-bit samples (silence).
    pub samples: Vec<i16>,
    pub timings: Timings,
}

impl SynthResult {
    pub fn wav_bytes(&self) -> Result<Vec<u8>, PipelineError> {
        let spec = hound::WavSpec {
            channels: 1,
            sample_rate: SAMPLE_RATE,
            bits_per_sample: 16,
            sample_format: hound::SampleFormat::Int,
        };
        let mut cursor = Cursor::new(Vec::new());
        {
            let mut w = hound::WavWriter::new(&mut cursor, spec)?;
            let mut i16w = w.get_i16_writer(self.samples.len() as u32);
            for &s in &self.samples {
                i16w.write_sample(s);
            }
            i16w.flush()?;
            w.finalize()?;
        }
        Ok(cursor.into_inner())
    }

    pub fn write_wav(&self, path: impl AsRef<Path>) -> Result<(), PipelineError> {
        std::fs::write(path, self.wav_bytes()?)?;
        Ok(())
    }
}

/// Stand-in for the phoneme-to-speech model: audio length is linear in the
/// phoneme count and synthesis takes `synth_rtf` times that long.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StubSynth {
    pub sec_per_phoneme: f64,
    pub synth_rtf: f64,
}

impl StubSynth {
    pub fn from_config(c: &Config) -> Self {
        StubSynth {
            sec_per_phoneme: c.sec_per_phoneme,
            synth_rtf: c.synth_rtf,
        }
    }

    pub fn duration(&self, phonemes: usize) -> f64 {
        phonemes as f64 * self.sec_per_phoneme
    }

    pub fn synthesize(&self, phonemes: usize) -> (f64, Vec<i16>) {
        let duration = self.duration(phonemes);
        let wait = duration * self.synth_rtf;
        if wait > 0.0 {
            thread::sleep(Duration::from_secs_f64(wait));
        }
        let n = (duration * SAMPLE_RATE as f64).round() as usize;
        (duration, vec![0i16; n])
    }
}

/// Real-time factor: processing time over generated audio duration.
pub fn rtf_of(result: &SynthResult) -> Result<f64, PipelineError> {
    if result.audio_duration_s <= 0.0 {
        return Err(PipelineError::ZeroDuration);
    }
    Ok(result.timings.total / result.audio_duration_s)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub tokens: Vec<Token>,
    pub base: PhonemeSequence,
    pub refined: PhonemeSequence,
    pub choices: Vec<(usize, u32)>,
    pub tags: Vec<bool>,
    pub synth: SynthResult,
}

impl RunOutput {
    pub fn timings(&self) -> &Timings {
        &self.synth.timings
    }
}

/// One pipeline instance in a fixed mode.
pub struct Pipeline {
    config: Config,
    frontend: Frontend,
    synth: StubSynth,
    warm: Option<Refiner>,
    service: Option<ServiceHandle>,
}

impl std::fmt::Debug for Pipeline {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Pipeline")
            .field("mode", &self.config.mode)
            .field("warm", &self.warm.is_some())
            .field("service", &self.service)
            .finish()
    }
}

fn service_exe(config: &Config) -> Result<PathBuf, PipelineError> {
    match &config.service_exe {
        Some(p) => Ok(p.clone()),
        None => Ok(std::env::current_exe()?),
    }
}

impl Pipeline {
    /// Loads the base artifacts; in service mode also spawns the service
    /// and waits until it is ready.
    pub fn new(config: Config) -> Result<Self, PipelineError> {
        config.validate()?;
        let frontend = Frontend::load(&config)?;
        let service = if config.mode == Mode::Service && config.refine {
            let opts = SpawnOptions::new(service_exe(&config)?, config.clone());
            Some(spawn_service(&opts)?)
        } else {
            None
        };
        Ok(Pipeline {
            synth: StubSynth::from_config(&config),
            config,
            frontend,
            warm: None,
            service,
        })
    }

    /// Uses an already running service instead of spawning one.
    pub fn with_service(config: Config, handle: ServiceHandle) -> Result<Self, PipelineError> {
        let mut config = config;
        config.mode = Mode::Service;
        let frontend = Frontend::load(&config)?;
        Ok(Pipeline {
            synth: StubSynth::from_config(&config),
            config,
            frontend,
            warm: None,
            service: Some(handle),
        })
    }

    pub fn mode(&self) -> Mode {
        self.config.mode
    }

    pub fn config(&self) -> &Config {
        &self.config
    }

    pub fn frontend(&self) -> &Frontend {
        &self.frontend
    }

    pub fn service(&self) -> Option<&ServiceHandle> {
        self.service.as_ref()
    }

    /// Refines one utterance without synthesizing it.
    pub fn phonemize(&mut self, text: &str) -> Result<RunOutput, PipelineError> {
        self.run_inner(text, false, &mut |_| {})
    }

    pub fn run(&mut self, text: &str) -> Result<RunOutput, PipelineError> {
        self.run_inner(text, true, &mut |_| {})
    }

    /// Like [`Pipeline::run`], reporting in-process refinement stages to
    /// `trace`. Service mode reports nothing (stages run remotely).
    pub fn run_traced(
        &mut self,
        text: &str,
        trace: &mut dyn FnMut(RefineStage),
    ) -> Result<RunOutput, PipelineError> {
        self.run_inner(text, true, trace)
    }

    fn run_inner(
        &mut self,
        text: &str,
        synthesize: bool,
        trace: &mut dyn FnMut(RefineStage),
    ) -> Result<RunOutput, PipelineError> {
        let start = Instant::now();
        let mut timings = Timings::default();

        let t = Instant::now();
        let fe = &self.frontend;
        let base = phonemize_utterance(text, &fe.lexicon, &fe.lts, &fe.inventory)?;
        timings.base_g2p = t.elapsed().as_secs_f64();
        let surfaces: Vec<String> = base.tokens.iter().map(|t| t.surface.clone()).collect();

        let refined = if !self.config.refine {
            Refined {
                seq: base.seq.clone(),
                choices: base.sites.iter().map(|s| (s.index, 0)).collect(),
                tags: vec![false; surfaces.len()],
            }
        } else {
            match self.config.mode {
                Mode::DirectCold => {
                    let t = Instant::now();
                    let refiner = Refiner::load(&self.config, &self.frontend)?;
                    timings.load = t.elapsed().as_secs_f64();
                    let t = Instant::now();
                    let r = refiner.refine_traced(&surfaces, &base.seq, &base.sites, trace)?;
                    timings.refine = t.elapsed().as_secs_f64();
                    drop(refiner);
                    r
                }
                Mode::DirectWarm => {
                    if self.warm.is_none() {
                        let t = Instant::now();
                        self.warm = Some(Refiner::load(&self.config, &self.frontend)?);
                        timings.load = t.elapsed().as_secs_f64();
                    }
                    let refiner = self.warm.as_ref().expect("loaded above");
                    let t = Instant::now();
                    let r = refiner.refine_traced(&surfaces, &base.seq, &base.sites, trace)?;
                    timings.refine = t.elapsed().as_secs_f64();
                    r
                }
                Mode::Service => {
                    let t = Instant::now();
                    let r = self.refine_remote(&surfaces, &base.seq, &base.sites)?;
                    timings.refine = t.elapsed().as_secs_f64();
                    r
                }
            }
        };

        let (audio_duration_s, samples) = if synthesize {
            let t = Instant::now();
            let out = self.synth.synthesize(refined.seq.phoneme_count());
            timings.synth = t.elapsed().as_secs_f64();
            out
        } else {
            (self.synth.duration(refined.seq.phoneme_count()), Vec::new())
        };
        timings.total = start.elapsed().as_secs_f64();

        Ok(RunOutput {
            tokens: base.tokens,
            base: base.seq,
            refined: refined.seq,
            choices: refined.choices,
            tags: refined.tags,
            synth: SynthResult {
                audio_duration_s,
                samples,
                timings,
            },
        })
    }

    fn refine_remote(
        &self,
        tokens: &[String],
        seq: &PhonemeSequence,
        sites: &[HomographSite],
    ) -> Result<Refined, PipelineError> {
        let handle = self
            .service
            .as_ref()
            .ok_or(PipelineError::ServiceUnavailable(ServiceState::Dead))?;
        if handle.state() != ServiceState::Ready {
            return Err(PipelineError::ServiceUnavailable(handle.state()));
        }
        let req = RefineRequest {
            tokens: tokens.to_vec(),
            phonemes: seq.to_string(),
            sites: sites.to_vec(),
        };
        let body = serde_json::to_value(&req).map_err(|e| PipelineError::Protocol(e.to_string()))?;
        let reply = match handle.request(OP_REFINE, body, self.config.request_timeout()) {
            Ok(v) => v,
            Err(ServiceError::BrokenPipe) => {
                return Err(PipelineError::ServiceUnavailable(handle.state()))
            }
            Err(e) => return Err(e.into()),
        };
        let resp: RefineResponse =
            serde_json::from_value(reply).map_err(|e| PipelineError::Protocol(e.to_string()))?;
        let seq = parse_seq(&resp.phonemes, &self.frontend.inventory)?.align_by_boundaries()?;
        Ok(Refined {
            seq,
            choices: resp.choices,
            tags: resp.ezafe_tags,
        })
    }

    /// Stops the service, if any. Idempotent.
    pub fn shutdown(&mut self) -> Result<(), PipelineError> {
        if let Some(h) = &self.service {
            h.shutdown()?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ezafe::{train, EzafeCorpus};

    fn frontend() -> Frontend {
        let inventory = PhonemeInventory::default_inventory();
        let lexicon = Lexicon::parse(
            "read\tr iy d\t10\nread\tr eh d\t7\nwill\tw i l\nbook\tb uh k\nhad\th ae d\nketAb\tk e t A b\nman\tm a n\n",
            &inventory,
        )
        .unwrap();
        Frontend {
            inventory: Arc::new(inventory),
            lexicon: Arc::new(lexicon),
            lts: Arc::new(LtsTable::default()),
        }
    }

    fn refiner() -> Refiner {
        let fe = frontend();
        let corpus = AnnotatedCorpus::parse("will read#0 book\nhad read#1 book\n");
        let db = build_db(&corpus, &fe.lexicon, 2, 1.0).unwrap();
        let ez = EzafeCorpus::parse("ketAb=e man\nman ketAb\nketAb=e man\n").unwrap();
        Refiner {
            db,
            model: train(&ez, 5).unwrap(),
            frontend: fe,
            glide: None,
        }
    }

    fn base(fe: &Frontend, text: &str) -> (Vec<String>, crate::lexicon::BaseOutput) {
        let out = phonemize_utterance(text, &fe.lexicon, &fe.lts, &fe.inventory).unwrap();
        (out.tokens.iter().map(|t| t.surface.clone()).collect(), out)
    }

    #[test]
    fn refine_homograph_then_ezafe() {
        let r = refiner();
        let (tokens, b) = base(&r.frontend, "had read book");
        let mut stages = Vec::new();
        let out = r
            .refine_traced(&tokens, &b.seq, &b.sites, &mut |s| stages.push(s))
            .unwrap();
        assert_eq!(stages, [RefineStage::Homograph, RefineStage::Ezafe]);
        assert_eq!(out.seq.word(1).unwrap(), ["r", "eh", "d"]);
        assert_eq!(out.choices, [(1, 1)]);

        let (tokens, b) = base(&r.frontend, "will read book");
        assert_eq!(r.refine(&tokens, &b.seq, &b.sites).unwrap().choices, [(1, 0)]);

        let (tokens, b) = base(&r.frontend, "ketAb man");
        let out = r.refine(&tokens, &b.seq, &b.sites).unwrap();
        assert_eq!(out.tags, [true, false]);
        assert_eq!(out.seq.to_string(), "k e t A b e | m a n");
    }

    #[test]
    fn empty_artifacts_are_identity() {
        let fe = frontend();
        let r = Refiner::load(&Config::default(), &fe).unwrap();
        let (tokens, b) = base(&fe, "had read book ketAb man");
        let out = r.refine(&tokens, &b.seq, &b.sites).unwrap();
        assert_eq!(out.seq, b.seq);
    }

    #[test]
    fn handle_rebuilds_alignment() {
        let r = refiner();
        let resp = r
            .handle(RefineRequest {
                tokens: vec!["will".into(), "read".into(), "book".into()],
                phonemes: "w i l | r iy d | b uh k".into(),
                sites: vec![HomographSite {
                    index: 1,
                    word: "read".into(),
                }],
            })
            .unwrap();
        assert_eq!(resp.choices, [(1, 0)]);
        let bad = r.handle(RefineRequest {
            tokens: vec!["will".into()],
            phonemes: "w i l | r iy d".into(),
            sites: vec![],
        });
        assert!(matches!(bad, Err(PipelineError::WordCountMismatch { .. })));
    }

    #[test]
    fn stub_synth_arithmetic() {
        let s = StubSynth {
            sec_per_phoneme: 0.08,
            synth_rtf: 0.0,
        };
        let (d, samples) = s.synthesize(10);
        assert!((d - 0.8).abs() < 1e-12);
        assert_eq!(samples.len(), 12800);
    }

    fn result(total: f64, duration: f64) -> SynthResult {
        SynthResult {
            audio_duration_s: duration,
            samples: vec![],
            timings: Timings {
                total,
                ..Default::default()
            },
        }
    }

    #[test]
    fn rtf_examples() {
        assert!((rtf_of(&result(0.5, 2.5)).unwrap() - 0.2).abs() < 1e-12);
        assert_eq!(rtf_of(&result(1.5, 1.5)).unwrap(), 1.0);
        assert!(matches!(rtf_of(&result(1.0, 0.0)), Err(PipelineError::ZeroDuration)));
    }

    #[test]
    fn wav_layout() {
        let r = SynthResult {
            audio_duration_s: 0.01,
            samples: vec![0; 160],
            timings: Timings::default(),
        };
        let bytes = r.wav_bytes().unwrap();
        assert_eq!(&bytes[..4], b"RIFF");
        assert_eq!(&bytes[8..12], b"WAVE");
        assert_eq!(bytes.len(), 44 + 320);
        let reader = hound::WavReader::new(Cursor::new(bytes)).unwrap();
        let spec = reader.spec();
        assert_eq!((spec.channels, spec.sample_rate, spec.bits_per_sample), (1, 16000, 16));
    }

    #[test]
    fn trace_lines() {
        let t = Timings {
            load: 1.0,
            total: 2.5,
            ..Default::default()
        };
        let trace = t.trace();
        assert_eq!(trace.lines().count(), 5);
        assert!(trace.starts_with("stage=load seconds=1.000000\n"));
        assert!(trace.contains("stage=total seconds=2.500000"));
    }

    #[test]
    fn direct_modes_time_loading() {
        let dir = tempfile::tempdir().unwrap();
        let fe = frontend();
        std::fs::write(dir.path().join("lex.tsv"), fe.lexicon.to_tsv()).unwrap();
        let cfg_text = "lexicon=lex.tsv\nload_delay_s=0.2\nsynth_rtf=0\n";
        let mut cfg = Config::parse(cfg_text, dir.path()).unwrap();

        cfg.mode = Mode::DirectCold;
        let mut cold = Pipeline::new(cfg.clone()).unwrap();
        for _ in 0..2 {
            let out = cold.run("will read book").unwrap();
            assert!(out.timings().load >= 0.2);
        }

        cfg.mode = Mode::DirectWarm;
        let mut warm = Pipeline::new(cfg.clone()).unwrap();
        assert!(warm.run("will read book").unwrap().timings().load >= 0.2);
        let second = warm.run("will read book").unwrap();
        assert_eq!(second.timings().load, 0.0);
        assert_eq!(second.synth.samples.len(), 9 * 1280);
        assert!(second.timings().total >= second.timings().base_g2p + second.timings().synth);

        cfg.refine = false;
        let mut plain = Pipeline::new(cfg).unwrap();
        let out = plain.run("will read book").unwrap();
        assert_eq!(out.timings().load, 0.0);
        assert_eq!(out.refined, out.base);
        assert_eq!(out.choices, [(1, 0)]);
    }
}
