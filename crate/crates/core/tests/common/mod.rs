#![allow(dead_code)]

use std::path::{Path, PathBuf};

use gtp_mesh::config::Config;

pub fn exe() -> PathBuf {
    PathBuf::from(env!("CARGO_BIN_EXE_gtp-mesh"))
}

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

/// Copies the bundled fixtures into a fresh directory.
pub fn fixture_copy() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    for entry in std::fs::read_dir(fixtures()).unwrap() {
        let entry = entry.unwrap();
        std::fs::copy(entry.path(), dir.path().join(entry.file_name())).unwrap();
    }
    dir
}

/// Fixture config with `extra` lines appended (later keys win).
pub fn fixture_config(dir: &Path, extra: &str) -> Config {
    let mut text = std::fs::read_to_string(fixtures().join("config.txt")).unwrap();
    text.push_str(extra);
    text.push_str("\nsynth_rtf=0\n");
    let mut c = Config::parse(&text, &fixtures()).unwrap();
    c.service_exe = Some(exe());
    if c.fifo_in.is_some() {
        c.fifo_in = Some(dir.join("in.fifo"));
        c.fifo_out = Some(dir.join("out.fifo"));
    }
    c
}
