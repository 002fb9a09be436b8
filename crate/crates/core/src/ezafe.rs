//! Ezafe detection as binary per-token tagging, and insertion of the Ezafe
//! phoneme into a phoneme sequence.
//!
//! The tagger is an averaged perceptron over a fixed sparse feature template.
//! Training is deterministic: utterances are visited in corpus order and all
//! weight arithmetic is integral until the final averaging step.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::phoneme::{PhonemeInventory, PhonemeSequence, SeqError};

/// Version of the feature template emitted by [`extract_features`].
pub const TEMPLATE_VERSION: u32 = 1;
pub const DEFAULT_EPOCHS: usize = 10;

const EZAFE_MARKER: &str = "=e";

#[derive(Debug, Error)]
pub enum EzafeError {
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("epochs must be >= 1")]
    InvalidEpochs,
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("{tags} tags for {words} words")]
    TagLengthMismatch { tags: usize, words: usize },
    #[error("glide label {0:?} is not in the inventory")]
    UnknownGlide(String),
    #[error(transparent)]
    Seq(#[from] SeqError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Class {
    Ezafe = 0,
    None = 1,
}

impl Class {
    pub fn as_str(self) -> &'static str {
        match self {
            Class::Ezafe => "ezafe",
            Class::None => "none",
        }
    }

    fn from_bool(ezafe: bool) -> Self {
        if ezafe {
            Class::Ezafe
        } else {
            Class::None
        }
    }
}

/// The sparse features describing token `i` of `tokens`.
pub fn extract_features<S: AsRef<str>>(tokens: &[S], i: usize) -> Vec<String> {
    let tok = tokens[i].as_ref();
    let prev = if i == 0 { "^" } else { tokens[i - 1].as_ref() };
    let next = tokens.get(i + 1).map_or("$", AsRef::as_ref);
    let mut feats = vec![
        format!("w={tok}"),
        format!("prev={prev}"),
        format!("next={next}"),
    ];
    let chars: Vec<char> = tok.chars().collect();
    for n in 1..=3.min(chars.len()) {
        let suffix: String = chars[chars.len() - n..].iter().collect();
        feats.push(format!("suf{n}={suffix}"));
    }
    let next_suf1 = next.chars().last().map_or_else(String::new, String::from);
    feats.push(format!("next_suf1={next_suf1}"));
    feats.push("bias".to_string());
    feats
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaggedToken {
    pub surface: String,
    pub ezafe: bool,
}

/// Utterances whose Ezafe-bearing tokens end in `=e`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EzafeCorpus {
    pub utterances: Vec<Vec<TaggedToken>>,
}

impl EzafeCorpus {
    pub fn parse(text: &str) -> Result<Self, EzafeError> {
        let mut utterances = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let mut utt = Vec::new();
            for raw in line.split_whitespace() {
                let (surface, ezafe) = match raw.strip_suffix(EZAFE_MARKER) {
                    Some(s) => (s, true),
                    None => (raw, false),
                };
                if surface.is_empty() || surface.ends_with(EZAFE_MARKER) {
                    return Err(EzafeError::Parse {
                        line: i + 1,
                        reason: format!("malformed token {raw:?}"),
                    });
                }
                utt.push(TaggedToken {
                    surface: surface.to_string(),
                    ezafe,
                });
            }
            utterances.push(utt);
        }
        Ok(EzafeCorpus { utterances })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, EzafeError> {
        Self::parse(&fs::read_to_string(path)?)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for utt in &self.utterances {
            let words: Vec<String> = utt
                .iter()
                .map(|t| {
                    if t.ezafe {
                        format!("{}{EZAFE_MARKER}", t.surface)
                    } else {
                        t.surface.clone()
                    }
                })
                .collect();
            out.push_str(&words.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn token_count(&self) -> usize {
        self.utterances.iter().map(Vec::len).sum()
    }
}

/// Averaged feature weights for the two classes.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EzafeModel {
    weights: BTreeMap<String, [f64; 2]>,
    epochs_trained: usize,
    template_version: u32,
}

#[derive(Default)]
struct Accumulator {
    weights: HashMap<String, [i64; 2]>,
    totals: HashMap<String, [i64; 2]>,
    stamps: HashMap<String, [u64; 2]>,
}

impl Accumulator {
    fn scores(&self, feats: &[String]) -> [i64; 2] {
        let mut s = [0i64; 2];
        for f in feats {
            if let Some(w) = self.weights.get(f) {
                s[0] += w[0];
                s[1] += w[1];
            }
        }
        s
    }

    fn bump(&mut self, feat: &str, class: Class, delta: i64, step: u64) {
        let c = class as usize;
        let w = self.weights.entry(feat.to_string()).or_default();
        let total = self.totals.entry(feat.to_string()).or_default();
        let stamp = self.stamps.entry(feat.to_string()).or_default();
        total[c] += (step - stamp[c]) as i64 * w[c];
        stamp[c] = step;
        w[c] += delta;
    }

    fn average(mut self, steps: u64) -> BTreeMap<String, [f64; 2]> {
        let mut out = BTreeMap::new();
        for (feat, w) in self.weights {
            let total = self.totals.remove(&feat).unwrap_or_default();
            let stamp = self.stamps.remove(&feat).unwrap_or_default();
            let mut avg = [0.0; 2];
            for c in 0..2 {
                let t = total[c] + (steps - stamp[c]) as i64 * w[c];
                avg[c] = t as f64 / steps as f64;
            }
            if avg != [0.0, 0.0] {
                out.insert(feat, avg);
            }
        }
        out
    }
}

fn decide(score_ezafe: f64, score_none: f64) -> Class {
    if score_ezafe > score_none {
        Class::Ezafe
    } else {
        Class::None
    }
}

/// Trains an averaged perceptron for `epochs` passes over `corpus`.
pub fn train(corpus: &EzafeCorpus, epochs: usize) -> Result<EzafeModel, EzafeError> {
    if epochs == 0 {
        return Err(EzafeError::InvalidEpochs);
    }
    if corpus.token_count() == 0 {
        return Err(EzafeError::EmptyCorpus);
    }
    let feats: Vec<Vec<Vec<String>>> = corpus
        .utterances
        .iter()
        .map(|utt| {
            let surfaces: Vec<&str> = utt.iter().map(|t| t.surface.as_str()).collect();
            (0..utt.len()).map(|i| extract_features(&surfaces, i)).collect()
        })
        .collect();

    let mut acc = Accumulator::default();
    let mut step: u64 = 0;
    for _ in 0..epochs {
        for (utt, utt_feats) in corpus.utterances.iter().zip(&feats) {
            for (tok, f) in utt.iter().zip(utt_feats) {
                step += 1;
                let s = acc.scores(f);
                let guess = decide(s[0] as f64, s[1] as f64);
                let gold = Class::from_bool(tok.ezafe);
                if guess != gold {
                    for feat in f {
                        acc.bump(feat, gold, 1, step);
                        acc.bump(feat, guess, -1, step);
                    }
                }
            }
        }
    }
    Ok(EzafeModel {
        weights: acc.average(step),
        epochs_trained: epochs,
        template_version: TEMPLATE_VERSION,
    })
}

impl EzafeModel {
    pub fn epochs_trained(&self) -> usize {
        self.epochs_trained
    }

    pub fn template_version(&self) -> u32 {
        self.template_version
    }

    pub fn feature_count(&self) -> usize {
        self.weights.len()
    }

    pub fn weight(&self, feature: &str, class: Class) -> f64 {
        self.weights.get(feature).map_or(0.0, |w| w[class as usize])
    }

    pub fn predict(&self, feats: &[String]) -> Class {
        let mut s = [0.0; 2];
        for f in feats {
            if let Some(w) = self.weights.get(f) {
                s[0] += w[0];
                s[1] += w[1];
            }
        }
        decide(s[0], s[1])
    }

    /// Tags every token; the final token is never marked.
    pub fn tag<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<bool> {
        let n = tokens.len();
        (0..n)
            .map(|i| i + 1 < n && self.predict(&extract_features(tokens, i)) == Class::Ezafe)
            .collect()
    }

    pub fn to_tsv(&self) -> String {
        let mut out = format!(
            "epochs={}\ttemplate={}\n",
            self.epochs_trained, self.template_version
        );
        for (feat, w) in &self.weights {
            for class in [Class::Ezafe, Class::None] {
                let v = w[class as usize];
                if v != 0.0 {
                    let _ = writeln!(out, "{feat}\t{}\t{v}", class.as_str());
                }
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, EzafeError> {
        let err = |line: usize, reason: &str| EzafeError::Parse {
            line,
            reason: reason.to_string(),
        };
        let mut lines = text.lines().enumerate();
        let header = lines.next().ok_or_else(|| err(1, "missing header"))?.1;
        let mut epochs = None;
        let mut template = None;
        for field in header.split('\t') {
            match field.split_once('=') {
                Some(("epochs", v)) => epochs = v.parse().ok(),
                Some(("template", v)) => template = v.parse().ok(),
                _ => return Err(err(1, "malformed header field")),
            }
        }
        let (Some(epochs_trained), Some(template_version)) = (epochs, template) else {
            return Err(err(1, "header needs epochs and template"));
        };
        if template_version != TEMPLATE_VERSION {
            return Err(err(1, "unsupported feature template version"));
        }
        let mut weights: BTreeMap<String, [f64; 2]> = BTreeMap::new();
        for (i, line) in lines {
            if line.is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split('\t').collect();
            let [feat, class, weight] = f[..] else {
                return Err(err(i + 1, "expected feature<TAB>class<TAB>weight"));
            };
            let class = match class {
                "ezafe" => Class::Ezafe,
                "none" => Class::None,
                _ => return Err(err(i + 1, "class must be ezafe or none")),
            };
            let w: f64 = weight.parse().map_err(|_| err(i + 1, "bad weight"))?;
            if !w.is_finite() {
                return Err(err(i + 1, "non-finite weight"));
            }
            weights.entry(feat.to_string()).or_default()[class as usize] = w;
        }
        Ok(EzafeModel {
            weights,
            epochs_trained,
            template_version,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), EzafeError> {
        fs::write(path, self.to_tsv())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, EzafeError> {
        Self::parse(&fs::read_to_string(path)?)
    }
}

pub fn tag<S: AsRef<str>>(model: &EzafeModel, tokens: &[S]) -> Vec<bool> {
    model.tag(tokens)
}

/// Glide inserted between a vowel-final word and the Ezafe phoneme.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlideRule {
    pub label: String,
    pub triggers: BTreeSet<String>,
}

impl GlideRule {
    pub fn new<S: Into<String>>(label: &str, triggers: impl IntoIterator<Item = S>) -> Self {
        GlideRule {
            label: label.to_string(),
            triggers: triggers.into_iter().map(Into::into).collect(),
        }
    }
}

/// Appends the Ezafe phoneme to every tagged word that does not already end
/// with it. Applying it twice is the same as applying it once.
pub fn insert_ezafe(
    seq: &PhonemeSequence,
    tags: &[bool],
    inv: &PhonemeInventory,
    glide: Option<&GlideRule>,
) -> Result<PhonemeSequence, EzafeError> {
    let words = seq.word_count().ok_or(SeqError::MissingAlignment)?;
    if tags.len() != words {
        return Err(EzafeError::TagLengthMismatch {
            tags: tags.len(),
            words,
        });
    }
    if let Some(g) = glide {
        if !inv.contains(&g.label) {
            return Err(EzafeError::UnknownGlide(g.label.clone()));
        }
    }
    let ezafe = inv.ezafe_symbol();
    let mut out = seq.clone();
    for (w, _) in tags.iter().enumerate().filter(|(_, &t)| t) {
        let last = out.word(w)?.last().map(|s| s.to_string());
        match last.as_deref() {
            Some(l) if l == ezafe => continue,
            Some(l) if glide.is_some_and(|g| g.triggers.contains(l)) => {
                let g = glide.expect("checked above");
                out.append_to_word(w, &[g.label.as_str(), ezafe])?;
            }
            _ => out.append_to_word(w, &[ezafe])?,
        }
    }
    Ok(out)
}

/// Token-level confusion counts for the Ezafe class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BinaryCounts {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl BinaryCounts {
    pub fn add(&mut self, gold: bool, predicted: bool) {
        match (gold, predicted) {
            (true, true) => self.tp += 1,
            (false, true) => self.fp += 1,
            (true, false) => self.fn_ += 1,
            (false, false) => {}
        }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (bool, bool)>) -> Self {
        let mut c = BinaryCounts::default();
        for (g, p) in pairs {
            c.add(g, p);
        }
        c
    }

    /// Precision, recall and F1. With no gold and no predicted positives the
    /// tagger agrees perfectly and all three are 1.
    pub fn prf(&self) -> Prf {
        if self.tp + self.fp + self.fn_ == 0 {
            return Prf {
                precision: 1.0,
                recall: 1.0,
                f1: 1.0,
            };
        }
        let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
        let precision = ratio(self.tp, self.tp + self.fp);
        let recall = ratio(self.tp, self.tp + self.fn_);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Prf {
            precision,
            recall,
            f1,
        }
    }
}

pub fn evaluate(model: &EzafeModel, corpus: &EzafeCorpus) -> Result<Prf, EzafeError> {
    if corpus.token_count() == 0 {
        return Err(EzafeError::EmptyCorpus);
    }
    let mut counts = BinaryCounts::default();
    for utt in &corpus.utterances {
        let surfaces: Vec<&str> = utt.iter().map(|t| t.surface.as_str()).collect();
        for (tok, pred) in utt.iter().zip(model.tag(&surfaces)) {
            counts.add(tok.ezafe, pred);
        }
    }
    Ok(counts.prf())
}
