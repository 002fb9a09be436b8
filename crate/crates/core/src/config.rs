//! `key=value` configuration shared by the pipeline, the service host and
//! the CLI. Relative paths resolve against the config file's directory.

use std::fmt;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ezafe::GlideRule;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Transport {
    #[default]
    Stdio,
    Fifo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    DirectCold,
    DirectWarm,
    Service,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::DirectCold, Mode::DirectWarm, Mode::Service];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::DirectCold => "direct_cold",
            Mode::DirectWarm => "direct_warm",
            Mode::Service => "service",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "direct_cold" => Ok(Mode::DirectCold),
            "direct_warm" => Ok(Mode::DirectWarm),
            "service" => Ok(Mode::Service),
            _ => Err(format!(
                "unknown mode {s:?} (expected direct_cold, direct_warm or service)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub transport: Transport,
    pub fifo_in: Option<PathBuf>,
    pub fifo_out: Option<PathBuf>,
    pub inventory: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    pub lts: Option<PathBuf>,
    pub homograph_db: Option<PathBuf>,
    pub ezafe_model: Option<PathBuf>,
    pub load_delay_s: f64,
    pub ready_timeout_s: f64,
    pub request_timeout_s: f64,
    pub mode: Mode,
    /// When false the pipeline emits base phonemizer output unchanged.
    pub refine: bool,
    pub sec_per_phoneme: f64,
    pub synth_rtf: f64,
    pub glide: Option<GlideRule>,
    /// Executable hosting `serve`; defaults to the running binary.
    pub service_exe: Option<PathBuf>,
    /// Test hook: the service ignores `shutdown` requests.
    pub hang_on_shutdown: bool,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            transport: Transport::Stdio,
            fifo_in: None,
            fifo_out: None,
            inventory: None,
            lexicon: None,
            lts: None,
            homograph_db: None,
            ezafe_model: None,
            load_delay_s: 0.0,
            ready_timeout_s: 30.0,
            request_timeout_s: 30.0,
            mode: Mode::DirectCold,
            refine: true,
            sec_per_phoneme: 0.08,
            synth_rtf: 0.153,
            glide: None,
            service_exe: None,
            hang_on_shutdown: false,
        }
    }
}

fn parse_bool(v: &str) -> Option<bool> {
    match v {
        "1" | "true" | "on" | "yes" => Some(true),
        "0" | "false" | "off" | "no" => Some(false),
        _ => None,
    }
}

impl Config {
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self, ConfigError> {
        let mut c = Config::default();
        let mut glide_on = false;
        let mut glide_label = "y".to_string();
        let mut glide_triggers: Vec<String> = ["A", "u", "o", "i"].map(String::from).to_vec();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |reason: String| ConfigError::Parse {
                line: line_no,
                reason,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err("expected key=value".into()))?;
            let (key, value) = (key.trim(), value.trim());
            let path = || Some(base_dir.join(value));
            let num = || -> Result<f64, ConfigError> {
                let v: f64 = value
                    .parse()
                    .map_err(|_| err(format!("{key}: not a number: {value:?}")))?;
                if !v.is_finite() || v < 0.0 {
                    return Err(err(format!("{key}: must be a finite non-negative number")));
                }
                Ok(v)
            };
            let flag = || parse_bool(value).ok_or_else(|| err(format!("{key}: expected true/false")));
            match key {
                "transport" => {
                    c.transport = match value {
                        "stdio" => Transport::Stdio,
                        "fifo" => Transport::Fifo,
                        _ => return Err(err(format!("unknown transport {value:?}"))),
                    }
                }
                "fifo_in" => c.fifo_in = path(),
                "fifo_out" => c.fifo_out = path(),
                "inventory" => c.inventory = path(),
                "lexicon" => c.lexicon = path(),
                "lts" => c.lts = path(),
                "homograph_db" => c.homograph_db = path(),
                "ezafe_model" => c.ezafe_model = path(),
                "service_exe" => c.service_exe = path(),
                "load_delay_s" => c.load_delay_s = num()?,
                "ready_timeout_s" => c.ready_timeout_s = num()?,
                "request_timeout_s" => c.request_timeout_s = num()?,
                "sec_per_phoneme" => c.sec_per_phoneme = num()?,
                "synth_rtf" => c.synth_rtf = num()?,
                "mode" => c.mode = value.parse().map_err(err)?,
                "refine" => c.refine = flag()?,
                "hang_on_shutdown" => c.hang_on_shutdown = flag()?,
                "glide" => glide_on = flag()?,
                "glide_label" => glide_label = value.to_string(),
                "glide_triggers" => {
                    glide_triggers = value
                        .split(',')
                        .map(str::trim)
                        .filter(|s| !s.is_empty())
                        .map(String::from)
                        .collect()
                }
                _ => return Err(err(format!("unknown key {key:?}"))),
            }
        }
        if glide_on {
            c.glide = Some(GlideRule::new(&glide_label, glide_triggers));
        }
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        let base = if base.as_os_str().is_empty() {
            Path::new(".")
        } else {
            base
        };
        Self::parse(&text, base)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let finite = |x: f64, min: f64, strict: bool| x.is_finite() && (x > min || (!strict && x == min));
        for (name, v) in [
            ("sec_per_phoneme", self.sec_per_phoneme),
            ("ready_timeout_s", self.ready_timeout_s),
            ("request_timeout_s", self.request_timeout_s),
        ] {
            if !finite(v, 0.0, true) {
                return Err(ConfigError::Invalid(format!("{name} must be finite and > 0")));
            }
        }
        for (name, v) in [
            ("synth_rtf", self.synth_rtf),
            ("load_delay_s", self.load_delay_s),
        ] {
            if !finite(v, 0.0, false) {
                return Err(ConfigError::Invalid(format!("{name} must be finite and >= 0")));
            }
        }
        if self.transport == Transport::Fifo && (self.fifo_in.is_none() || self.fifo_out.is_none()) {
            return Err(ConfigError::Invalid(
                "fifo transport needs fifo_in and fifo_out".into(),
            ));
        }
        Ok(())
    }

    /// Makes every configured path absolute relative to the current
    /// directory, so the config can be handed to another process.
    pub fn absolutize(&mut self) -> std::io::Result<()> {
        for p in [
            &mut self.fifo_in,
            &mut self.fifo_out,
            &mut self.inventory,
            &mut self.lexicon,
            &mut self.lts,
            &mut self.homograph_db,
            &mut self.ezafe_model,
            &mut self.service_exe,
        ]
        .into_iter()
        .flatten()
        {
            *p = std::path::absolute(&*p)?;
        }
        Ok(())
    }

    pub fn ready_timeout(&self) -> Duration {
        Duration::from_secs_f64(self.ready_timeout_s)
    }

    pub fn request_timeout(&self) -> Duration {
        Duration::from_secs_f64(self.request_timeout_s)
    }

    /// Serializes back to the file format. Paths are written as stored, so
    /// a config loaded from disk round-trips with absolute-or-joined paths.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let transport = match self.transport {
            Transport::Stdio => "stdio",
            Transport::Fifo => "fifo",
        };
        let _ = writeln!(out, "transport={transport}");
        let paths = [
            ("fifo_in", &self.fifo_in),
            ("fifo_out", &self.fifo_out),
            ("inventory", &self.inventory),
            ("lexicon", &self.lexicon),
            ("lts", &self.lts),
            ("homograph_db", &self.homograph_db),
            ("ezafe_model", &self.ezafe_model),
            ("service_exe", &self.service_exe),
        ];
        for (key, p) in paths {
            if let Some(p) = p {
                let _ = writeln!(out, "{key}={}", p.display());
            }
        }
        let _ = writeln!(out, "load_delay_s={}", self.load_delay_s);
        let _ = writeln!(out, "ready_timeout_s={}", self.ready_timeout_s);
        let _ = writeln!(out, "request_timeout_s={}", self.request_timeout_s);
        let _ = writeln!(out, "mode={}", self.mode);
        let _ = writeln!(out, "refine={}", self.refine);
        let _ = writeln!(out, "sec_per_phoneme={}", self.sec_per_phoneme);
        let _ = writeln!(out, "synth_rtf={}", self.synth_rtf);
        let _ = writeln!(out, "hang_on_shutdown={}", self.hang_on_shutdown);
        if let Some(g) = &self.glide {
            let triggers: Vec<&str> = g.triggers.iter().map(String::as_str).collect();
            let _ = writeln!(out, "glide=on");
            let _ = writeln!(out, "glide_label={}", g.label);
            let _ = writeln!(out, "glide_triggers={}", triggers.join(","));
        }
        out
    }
}
