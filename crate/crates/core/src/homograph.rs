//! Co-occurrence homograph disambiguation.
//!
//! For every homograph variant the database keeps how often it was seen and
//! which words appeared within a fixed window around it. At inference the
//! variant with the highest smoothed log-likelihood of the observed context
//! wins:
//!
//! ```text
//! score(v) = ln(prior(v) + α) + Σ_c ln((cooc(v, c) + α) / (prior(v) + α·V))
//! ```
//!
//! where `V` is the number of distinct context words in the database.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::lexicon::{HomographSite, Lexicon};
use crate::phoneme::{PhonemeSequence, SeqError};

pub const DEFAULT_WINDOW: usize = 5;
pub const DEFAULT_ALPHA: f64 = 1.0;

#[derive(Debug, Error)]
pub enum HomographError {
    #[error("unknown variant {word}#{id}")]
    UnknownVariant { word: String, id: u32 },
    #[error("window must be >= 1 and alpha > 0 (got window={window}, alpha={alpha})")]
    InvalidParams { window: usize, alpha: f64 },
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("{sites} sites but {choices} choices")]
    ChoiceMismatch { sites: usize, choices: usize },
    #[error(transparent)]
    Seq(#[from] SeqError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VariantStats {
    pub prior_count: u64,
    pub cooc: BTreeMap<String, u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HomographDb {
    window: usize,
    alpha: f64,
    vocab_size: usize,
    entries: BTreeMap<String, Vec<VariantStats>>,
}

/// One training token: a plain surface or a homograph with its gold variant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusToken {
    pub surface: String,
    pub variant: Option<u32>,
}

impl CorpusToken {
    /// Parses `word` or `word#<id>`.
    pub fn parse(raw: &str) -> Self {
        if let Some((word, id)) = raw.rsplit_once('#') {
            if !word.is_empty() {
                if let Ok(id) = id.parse::<u32>() {
                    return CorpusToken {
                        surface: word.to_string(),
                        variant: Some(id),
                    };
                }
            }
        }
        CorpusToken {
            surface: raw.to_string(),
            variant: None,
        }
    }
}

/// Utterances with homograph tokens annotated as `word#<id>`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AnnotatedCorpus {
    pub utterances: Vec<Vec<CorpusToken>>,
}

impl AnnotatedCorpus {
    pub fn parse(text: &str) -> Self {
        let utterances = text
            .lines()
            .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
            .map(|l| l.split_whitespace().map(CorpusToken::parse).collect())
            .collect();
        AnnotatedCorpus { utterances }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, HomographError> {
        Ok(Self::parse(&fs::read_to_string(path)?))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for utt in &self.utterances {
            let line: Vec<String> = utt
                .iter()
                .map(|t| match t.variant {
                    Some(v) => format!("{}#{v}", t.surface),
                    None => t.surface.clone(),
                })
                .collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

fn context_indices(len: usize, center: usize, window: usize) -> impl Iterator<Item = usize> {
    let lo = center.saturating_sub(window);
    let hi = (center + window).min(len.saturating_sub(1));
    (lo..=hi).filter(move |&i| i != center)
}

/// Single pass over the corpus counting priors and windowed co-occurrences.
/// Every homograph in `lex` gets an entry, even if unseen.
pub fn build_db(
    corpus: &AnnotatedCorpus,
    lex: &Lexicon,
    window: usize,
    alpha: f64,
) -> Result<HomographDb, HomographError> {
    if window < 1 || !(alpha > 0.0 && alpha.is_finite()) {
        return Err(HomographError::InvalidParams { window, alpha });
    }
    let mut entries: BTreeMap<String, Vec<VariantStats>> = lex
        .homographs()
        .map(|(w, v)| (w.to_string(), vec![VariantStats::default(); v.len()]))
        .collect();
    let mut vocab = BTreeSet::new();
    for utt in &corpus.utterances {
        for (i, tok) in utt.iter().enumerate() {
            let Some(id) = tok.variant else { continue };
            let n_variants = lex.variants(&tok.surface).map_or(0, <[_]>::len);
            if id as usize >= n_variants {
                return Err(HomographError::UnknownVariant {
                    word: tok.surface.clone(),
                    id,
                });
            }
            let stats = &mut entries
                .entry(tok.surface.clone())
                .or_insert_with(|| vec![VariantStats::default(); n_variants])[id as usize];
            stats.prior_count += 1;
            for j in context_indices(utt.len(), i, window) {
                let ctx = &utt[j];
                if ctx.variant.is_none() {
                    *stats.cooc.entry(ctx.surface.clone()).or_default() += 1;
                    vocab.insert(ctx.surface.as_str());
                }
            }
        }
    }
    Ok(HomographDb {
        window,
        alpha,
        vocab_size: vocab.len(),
        entries,
    })
}

/// Result of disambiguating one site.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Choice {
    pub variant: u32,
    /// Set when the word was absent from the database and variant 0 was used.
    pub fallback: bool,
}

impl HomographDb {
    pub fn window(&self) -> usize {
        self.window
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    pub fn contains(&self, word: &str) -> bool {
        self.entries.contains_key(word)
    }

    pub fn variants(&self, word: &str) -> Option<&[VariantStats]> {
        self.entries.get(word).map(Vec::as_slice)
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Records one more occurrence of `word#variant` seen next to `context`.
    pub fn observe(&mut self, word: &str, variant: u32, context: &[&str]) -> Option<()> {
        let stats = self.entries.get_mut(word)?.get_mut(variant as usize)?;
        stats.prior_count += 1;
        for c in context {
            *stats.cooc.entry(c.to_string()).or_default() += 1;
        }
        self.vocab_size = self
            .entries
            .values()
            .flatten()
            .flat_map(|s| s.cooc.keys())
            .collect::<BTreeSet<_>>()
            .len();
        Some(())
    }

    /// Smoothed log-likelihood of `context` under `word#variant`. Returns
    /// `None` if the word or variant is not in the database.
    pub fn score<S: AsRef<str>>(&self, word: &str, variant: u32, context: &[S]) -> Option<f64> {
        let stats = self.entries.get(word)?.get(variant as usize)?;
        let prior = stats.prior_count as f64;
        // V = 0 only for a database built from an empty corpus.
        let denom = (prior + self.alpha * self.vocab_size.max(1) as f64).ln();
        let mut score = (prior + self.alpha).ln();
        for c in context {
            let n = stats.cooc.get(c.as_ref()).copied().unwrap_or(0) as f64;
            score += (n + self.alpha).ln() - denom;
        }
        Some(score)
    }

    /// Picks the best variant for `word` given its context words. Ties go to
    /// the higher prior, then the lower id.
    pub fn choose<S: AsRef<str>>(&self, word: &str, context: &[S]) -> Choice {
        let Some(variants) = self.entries.get(word) else {
            return Choice {
                variant: 0,
                fallback: true,
            };
        };
        let mut best: Option<(u32, f64, u64)> = None;
        for (id, stats) in variants.iter().enumerate() {
            let id = id as u32;
            let s = self.score(word, id, context).expect("variant exists");
            let better = match best {
                None => true,
                Some((_, bs, bp)) => s > bs || (s == bs && stats.prior_count > bp),
            };
            if better {
                best = Some((id, s, stats.prior_count));
            }
        }
        Choice {
            variant: best.map_or(0, |b| b.0),
            fallback: false,
        }
    }

    /// Context of the token at `index`: surfaces within the window that are
    /// not themselves homographs in the database.
    pub fn context_of<'a>(&self, tokens: &'a [String], index: usize) -> Vec<&'a str> {
        context_indices(tokens.len(), index, self.window)
            .map(|j| tokens[j].as_str())
            .filter(|s| !self.contains(s))
            .collect()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), HomographError> {
        fs::write(path, self.to_tsv())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, HomographError> {
        Self::parse(&fs::read_to_string(path)?)
    }

    pub fn to_tsv(&self) -> String {
        let mut out = format!(
            "window={}\talpha={}\tvocab={}\n",
            self.window, self.alpha, self.vocab_size
        );
        for (word, variants) in &self.entries {
            for (id, stats) in variants.iter().enumerate() {
                let ctx: Vec<String> = stats
                    .cooc
                    .iter()
                    .map(|(c, n)| format!("{}:{n}", escape(c)))
                    .collect();
                let _ = writeln!(
                    out,
                    "{}\t{id}\t{}\t{}",
                    escape(word),
                    stats.prior_count,
                    ctx.join(",")
                );
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, HomographError> {
        let err = |line: usize, reason: &str| HomographError::Parse {
            line,
            reason: reason.to_string(),
        };
        let mut lines = text.lines().enumerate();
        let header = lines.next().ok_or_else(|| err(1, "missing header"))?.1;
        let mut window = None;
        let mut alpha = None;
        let mut vocab = None;
        for field in header.split('\t') {
            match field.split_once('=') {
                Some(("window", v)) => window = v.parse::<usize>().ok(),
                Some(("alpha", v)) => alpha = v.parse::<f64>().ok(),
                Some(("vocab", v)) => vocab = v.parse::<usize>().ok(),
                _ => return Err(err(1, "malformed header field")),
            }
        }
        let (Some(window), Some(alpha), Some(vocab_size)) = (window, alpha, vocab) else {
            return Err(err(1, "header needs window, alpha and vocab"));
        };
        if window < 1 || !(alpha > 0.0 && alpha.is_finite()) {
            return Err(err(1, "window must be >= 1 and alpha > 0"));
        }
        let mut entries: BTreeMap<String, Vec<VariantStats>> = BTreeMap::new();
        for (i, line) in lines {
            let line_no = i + 1;
            if line.is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split('\t').collect();
            if f.len() != 4 {
                return Err(err(line_no, "expected 4 tab-separated fields"));
            }
            let word = unescape(f[0]).ok_or_else(|| err(line_no, "bad escape in word"))?;
            let id: usize = f[1].parse().map_err(|_| err(line_no, "bad variant id"))?;
            let prior_count: u64 = f[2].parse().map_err(|_| err(line_no, "bad prior"))?;
            let mut cooc = BTreeMap::new();
            for pair in f[3].split(',').filter(|p| !p.is_empty()) {
                let (c, n) = pair
                    .rsplit_once(':')
                    .ok_or_else(|| err(line_no, "context entry must be word:count"))?;
                let c = unescape(c).ok_or_else(|| err(line_no, "bad escape in context"))?;
                let n: u64 = n.parse().map_err(|_| err(line_no, "bad context count"))?;
                cooc.insert(c, n);
            }
            let variants = entries.entry(word).or_default();
            if id != variants.len() {
                return Err(err(line_no, "variant ids must be consecutive from 0"));
            }
            variants.push(VariantStats { prior_count, cooc });
        }
        Ok(HomographDb {
            window,
            alpha,
            vocab_size,
            entries,
        })
    }
}

// Context words never contain whitespace, but may contain the field
// separators used by the db file.
fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '%' => out.push_str("%25"),
            ',' => out.push_str("%2C"),
            ':' => out.push_str("%3A"),
            _ => out.push(c),
        }
    }
    out
}

fn unescape(s: &str) -> Option<String> {
    let mut out = String::with_capacity(s.len());
    let mut rest = s;
    while let Some(pos) = rest.find('%') {
        out.push_str(&rest[..pos]);
        let code = rest.get(pos + 1..pos + 3)?;
        out.push(match code {
            "25" => '%',
            "2C" => ',',
            "3A" => ':',
            _ => return None,
        });
        rest = &rest[pos + 3..];
    }
    out.push_str(rest);
    Some(out)
}

/// Disambiguates one base-phonemizer homograph site within `tokens`.
pub fn disambiguate(db: &HomographDb, site: &HomographSite, tokens: &[String]) -> Choice {
    if !db.contains(&site.word) {
        return Choice {
            variant: 0,
            fallback: true,
        };
    }
    let context = db.context_of(tokens, site.index);
    db.choose(&site.word, &context)
}

/// Overwrites each site's word span with the chosen variant's phonemes.
pub fn apply_homographs(
    seq: &PhonemeSequence,
    sites: &[HomographSite],
    choices: &[u32],
    lex: &Lexicon,
) -> Result<PhonemeSequence, HomographError> {
    if seq.alignment().is_none() {
        return Err(SeqError::MissingAlignment.into());
    }
    if sites.len() != choices.len() {
        return Err(HomographError::ChoiceMismatch {
            sites: sites.len(),
            choices: choices.len(),
        });
    }
    let mut out = seq.clone();
    for (site, &id) in sites.iter().zip(choices) {
        let variant = lex
            .variant(&site.word, id)
            .ok_or_else(|| HomographError::UnknownVariant {
                word: site.word.clone(),
                id,
            })?;
        out.splice_word(site.index, &variant.phonemes)?;
    }
    Ok(out)
}
