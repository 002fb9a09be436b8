//! Context-free base phonemizer: counted lexicon lookup with a
//! single-grapheme letter-to-sound fallback.
//!
//! Homographs always come out as their highest-prior variant here; the
//! refinement stages correct that later.

use std::collections::BTreeMap;
use std::collections::HashMap;
use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::phoneme::{PhonemeInventory, PhonemeSequence, SeqError, Token, tokenize};

#[derive(Debug, Error)]
pub enum G2pError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("line {line}: unknown phoneme {label:?}")]
    UnknownPhoneme { line: usize, label: String },
    #[error("no letter-to-sound rule for {0:?}")]
    NoRule(char),
    #[error("token {index} ({word:?}): {source}")]
    Token {
        index: usize,
        word: String,
        #[source]
        source: Box<G2pError>,
    },
    #[error("{0:?} has an empty pronunciation")]
    EmptyPronunciation(String),
    #[error(transparent)]
    Seq(#[from] SeqError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PronVariant {
    pub id: u32,
    pub phonemes: Vec<String>,
    pub prior_count: u64,
}

/// Surface form → pronunciation variants, most frequent first.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Lexicon {
    entries: BTreeMap<String, Vec<PronVariant>>,
}

impl Lexicon {
    /// Parses `word<TAB>phonemes[<TAB>prior_count]` lines. Repeated
    /// (word, pronunciation) pairs are merged by summing counts; variant ids
    /// are assigned after sorting by descending count, ties in first-seen
    /// order.
    pub fn parse(text: &str, inv: &PhonemeInventory) -> Result<Self, G2pError> {
        let mut raw: BTreeMap<String, Vec<(Vec<String>, u64)>> = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let trimmed = line.trim_end_matches(['\r', '\n']);
            if trimmed.trim().is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = trimmed.split('\t').collect();
            let parse_err = |reason: &str| G2pError::Parse {
                line: line_no,
                reason: reason.to_string(),
            };
            if !(2..=3).contains(&fields.len()) {
                return Err(parse_err("expected word<TAB>phonemes[<TAB>count]"));
            }
            let word = fields[0].trim();
            if word.is_empty() || word.chars().any(char::is_whitespace) {
                return Err(parse_err("word must be non-empty without whitespace"));
            }
            let phonemes: Vec<String> = fields[1].split_whitespace().map(str::to_string).collect();
            if phonemes.is_empty() {
                return Err(parse_err("empty pronunciation"));
            }
            if let Some(bad) = phonemes.iter().find(|p| !inv.contains(p)) {
                return Err(G2pError::UnknownPhoneme {
                    line: line_no,
                    label: bad.clone(),
                });
            }
            let count = match fields.get(2).map(|s| s.trim()) {
                None | Some("") => 1,
                Some(s) => s.parse::<u64>().map_err(|_| parse_err("invalid prior count"))?,
            };
            let variants = raw.entry(word.to_string()).or_default();
            match variants.iter_mut().find(|(p, _)| *p == phonemes) {
                Some((_, c)) => *c += count,
                None => variants.push((phonemes, count)),
            }
        }
        let entries = raw
            .into_iter()
            .map(|(word, variants)| (word, rank_variants(variants)))
            .collect();
        Ok(Lexicon { entries })
    }

    pub fn load(path: impl AsRef<Path>, inv: &PhonemeInventory) -> Result<Self, G2pError> {
        Self::parse(&fs::read_to_string(path)?, inv)
    }

    pub fn variants(&self, word: &str) -> Option<&[PronVariant]> {
        self.entries.get(word).map(Vec::as_slice)
    }

    pub fn variant(&self, word: &str, id: u32) -> Option<&PronVariant> {
        self.variants(word)?.get(id as usize)
    }

    pub fn is_homograph(&self, word: &str) -> bool {
        self.variants(word).is_some_and(|v| v.len() > 1)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[PronVariant])> {
        self.entries.iter().map(|(w, v)| (w.as_str(), v.as_slice()))
    }

    pub fn homographs(&self) -> impl Iterator<Item = (&str, &[PronVariant])> {
        self.iter().filter(|(_, v)| v.len() > 1)
    }

    /// Renders the lexicon in its TSV form, variants in id order.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (word, variants) in self.iter() {
            for v in variants {
                out.push_str(&format!("{word}\t{}\t{}\n", v.phonemes.join(" "), v.prior_count));
            }
        }
        out
    }
}

fn rank_variants(variants: Vec<(Vec<String>, u64)>) -> Vec<PronVariant> {
    let mut indexed: Vec<(usize, Vec<String>, u64)> = variants
        .into_iter()
        .enumerate()
        .map(|(i, (p, c))| (i, p, c))
        .collect();
    indexed.sort_by(|a, b| b.2.cmp(&a.2).then(a.0.cmp(&b.0)));
    indexed
        .into_iter()
        .enumerate()
        .map(|(id, (_, phonemes, prior_count))| PronVariant {
            id: id as u32,
            phonemes,
            prior_count,
        })
        .collect()
}

/// Single-grapheme letter-to-sound rules.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LtsTable {
    rules: HashMap<char, Vec<String>>,
}

impl LtsTable {
    /// Parses `grapheme<TAB>phonemes` lines; the phoneme field may be empty.
    pub fn parse(text: &str, inv: &PhonemeInventory) -> Result<Self, G2pError> {
        let mut rules = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (g, phones) = line.split_once('\t').unwrap_or((line, ""));
            let mut chars = g.chars();
            let grapheme = match (chars.next(), chars.next()) {
                (Some(c), None) => c,
                _ => {
                    return Err(G2pError::Parse {
                        line: line_no,
                        reason: format!("grapheme {g:?} must be a single character"),
                    })
                }
            };
            let phonemes: Vec<String> = phones.split_whitespace().map(str::to_string).collect();
            if let Some(bad) = phonemes.iter().find(|p| !inv.contains(p)) {
                return Err(G2pError::UnknownPhoneme {
                    line: line_no,
                    label: bad.clone(),
                });
            }
            rules.insert(grapheme, phonemes);
        }
        Ok(LtsTable { rules })
    }

    pub fn load(path: impl AsRef<Path>, inv: &PhonemeInventory) -> Result<Self, G2pError> {
        Self::parse(&fs::read_to_string(path)?, inv)
    }

    pub fn from_rules(rules: impl IntoIterator<Item = (char, Vec<String>)>) -> Self {
        LtsTable {
            rules: rules.into_iter().collect(),
        }
    }

    pub fn rule(&self, grapheme: char) -> Option<&[String]> {
        self.rules.get(&grapheme).map(Vec::as_slice)
    }

    pub fn apply(&self, word: &str) -> Result<Vec<String>, G2pError> {
        let mut out = Vec::new();
        for c in word.chars() {
            out.extend_from_slice(self.rule(c).ok_or(G2pError::NoRule(c))?);
        }
        Ok(out)
    }
}

/// Base pronunciation of a single token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasePron {
    pub phonemes: Vec<String>,
    pub is_homograph: bool,
    pub word: String,
}

/// A token whose base pronunciation was picked among several variants.
#[derive(Debug, Clone, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct HomographSite {
    pub index: usize,
    pub word: String,
}

pub fn phonemize_token(token: &Token, lex: &Lexicon, lts: &LtsTable) -> Result<BasePron, G2pError> {
    let word = token.surface.clone();
    if let Some(variants) = lex.variants(&word) {
        return Ok(BasePron {
            phonemes: variants[0].phonemes.clone(),
            is_homograph: variants.len() > 1,
            word,
        });
    }
    let phonemes = lts.apply(&word)?;
    Ok(BasePron {
        phonemes,
        is_homograph: false,
        word,
    })
}

/// Output of the base phonemizer for one utterance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseOutput {
    pub tokens: Vec<Token>,
    pub seq: PhonemeSequence,
    pub sites: Vec<HomographSite>,
}

pub fn phonemize_tokens(
    tokens: Vec<Token>,
    lex: &Lexicon,
    lts: &LtsTable,
    inv: &PhonemeInventory,
) -> Result<BaseOutput, G2pError> {
    let mut words = Vec::with_capacity(tokens.len());
    let mut sites = Vec::new();
    for token in &tokens {
        let wrap = |source: G2pError| G2pError::Token {
            index: token.index,
            word: token.surface.clone(),
            source: Box::new(source),
        };
        let pron = phonemize_token(token, lex, lts).map_err(wrap)?;
        if pron.phonemes.is_empty() {
            return Err(wrap(G2pError::EmptyPronunciation(pron.word)));
        }
        if pron.is_homograph {
            sites.push(HomographSite {
                index: token.index,
                word: pron.word,
            });
        }
        words.push(pron.phonemes);
    }
    let seq = PhonemeSequence::from_words(words, inv)?;
    Ok(BaseOutput { tokens, seq, sites })
}

pub fn phonemize_utterance(
    text: &str,
    lex: &Lexicon,
    lts: &LtsTable,
    inv: &PhonemeInventory,
) -> Result<BaseOutput, G2pError> {
    phonemize_tokens(tokenize(text), lex, lts, inv)
}
