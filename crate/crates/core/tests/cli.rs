mod common;

use std::io::Write;
use std::process::{Command, Output, Stdio};

use common::{exe, fixture_copy, fixtures};

fn run(args: &[&str]) -> Output {
    Command::new(exe())
        .args(args)
        .env_remove("GTP_MESH_CONFIG")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn config() -> String {
    fixtures().join("config.txt").display().to_string()
}

#[test]
fn phonemize_text() {
    for mode in ["service", "direct_cold", "direct_warm"] {
        let o = run(&["phonemize", "--config", &config(), "--mode", mode, "--text", "will read book"]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        assert_eq!(stdout(&o), "w ih l | r iy d | b uh k\n");
    }
}

#[test]
fn phonemize_stdin_and_env_config() {
    let mut child = Command::new(exe())
        .args(["phonemize", "--stdin", "--trace"])
        .env("GTP_MESH_CONFIG", config())
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"had read book\nmrd bzrg mn dyd\n")
        .unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(
        stdout(&o),
        "h ae d | r eh d | b uh k\nm a r d e | b o z o r g e | m a n | d i d\n"
    );
    assert_eq!(stderr(&o).matches("stage=refine seconds=").count(), 2);
}

#[test]
fn usage_errors_exit_1_with_help() {
    let o = run(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("Usage"));
    assert!(o.stdout.is_empty());

    let o = run(&["phonemize", "--config", &config()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--text"));

    let o = run(&["phonemize", "--text", "x"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("GTP_MESH_CONFIG"));

    let o = run(&[]);
    assert_eq!(o.status.code(), Some(1));

    let o = run(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn runtime_errors_exit_2() {
    let o = run(&["eval", "--config", &config(), "--cases", "/nonexistent/cases.tsv"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("error:"));
    let o = run(&["phonemize", "--config", "/nonexistent/config.txt", "--text", "x"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn build_and_train_reproduce_bundled_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let f = fixtures();
    let db = dir.path().join("db.tsv");
    let o = run(&[
        "build-db",
        "--corpus",
        f.join("homograph_corpus.txt").to_str().unwrap(),
        "--lexicon",
        f.join("lexicon.tsv").to_str().unwrap(),
        "--out",
        db.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(
        std::fs::read(&db).unwrap(),
        std::fs::read(f.join("homograph_db.tsv")).unwrap()
    );

    let model = dir.path().join("model.tsv");
    let o = run(&[
        "train-ezafe",
        "--corpus",
        f.join("ezafe_corpus.txt").to_str().unwrap(),
        "--out",
        model.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("features="));
    assert_eq!(
        std::fs::read(&model).unwrap(),
        std::fs::read(f.join("ezafe_model.tsv")).unwrap()
    );
}

#[test]
fn eval_prints_metric_lines() {
    let cases = fixtures().join("eval_cases.tsv");
    let o = run(&["eval", "--config", &config(), "--cases", cases.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    for key in ["cases=100", "per=", "ezafe_f1=", "homograph_acc=", "g2p_quality="] {
        assert!(text.contains(key), "{text}");
    }
}

#[test]
fn bench_two_modes_writes_two_rows() {
    let dir = fixture_copy();
    let cases = dir.path().join("few.tsv");
    let all = std::fs::read_to_string(dir.path().join("eval_cases.tsv")).unwrap();
    std::fs::write(&cases, all.lines().take(5).collect::<Vec<_>>().join("\n")).unwrap();
    let cfg = dir.path().join("config.txt");
    std::fs::OpenOptions::new()
        .append(true)
        .open(&cfg)
        .unwrap()
        .write_all(b"synth_rtf=0\nload_delay_s=0.05\n")
        .unwrap();
    let csv = dir.path().join("out.csv");
    let points = dir.path().join("points.csv");
    let o = run(&[
        "bench",
        "--cases",
        cases.to_str().unwrap(),
        "--config",
        cfg.to_str().unwrap(),
        "--modes",
        "direct_cold,service",
        "--runs",
        "2",
        "--csv",
        csv.to_str().unwrap(),
        "--points",
        points.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0], gtp_mesh::bench::CSV_HEADER);
    assert!(lines[1].starts_with("refined,direct_cold,"));
    assert!(lines[2].starts_with("refined,service,"));
    assert_eq!(std::fs::read_to_string(points).unwrap().lines().count(), 3);
}

#[test]
fn synth_writes_wav() {
    let dir = fixture_copy();
    let cfg = dir.path().join("config.txt");
    std::fs::OpenOptions::new()
        .append(true)
        .open(&cfg)
        .unwrap()
        .write_all(b"mode=direct_warm\nsynth_rtf=0\n")
        .unwrap();
    let wav = dir.path().join("out.wav");
    let o = run(&[
        "synth",
        "--config",
        cfg.to_str().unwrap(),
        "--text",
        "will read book",
        "--wav",
        wav.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("audio_duration_s=0.7200"));
    // 9 phonemes at 0.08 s, 16 kHz, 2 bytes per sample, 44-byte header
    assert_eq!(std::fs::metadata(&wav).unwrap().len(), 44 + 2 * 11520);
}
