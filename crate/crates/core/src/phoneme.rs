//! Tokens, phoneme inventories and phoneme sequences.
//!
//! Every stage of the pipeline exchanges [`PhonemeSequence`] values. Their
//! textual form is a run of whitespace-separated ASCII labels with `|`
//! marking word boundaries, e.g. `k e t A b | m a n`.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::Path;

use thiserror::Error;

/// Textual word-boundary marker.
pub const BOUNDARY: &str = "|";

/// The inventory shipped with the crate (romanized Persian plus a few
/// English labels used by small fixtures).
pub const DEFAULT_INVENTORY: &str = include_str!("../fixtures/inventory.txt");

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeqError {
    #[error("unknown phoneme {label:?} at position {position}")]
    UnknownPhoneme { label: String, position: usize },
    #[error("adjacent word boundaries at position {0}")]
    AdjacentBoundary(usize),
    #[error("sequence has no word alignment")]
    MissingAlignment,
    #[error("invalid alignment: {0}")]
    InvalidAlignment(String),
    #[error("word index {index} out of range ({words} words)")]
    WordOutOfRange { index: usize, words: usize },
}

#[derive(Debug, Error)]
pub enum InventoryError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A whitespace-free surface word and its position in the utterance.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Token {
    pub surface: String,
    pub index: usize,
}

fn is_punct(c: char) -> bool {
    c.is_ascii_punctuation()
        || matches!(
            c,
            '«' | '»' | '،' | '؛' | '؟' | '…' | '“' | '”' | '‘' | '’' | '–' | '—' | '¿' | '¡' | '。' | '、'
        )
}

/// Splits on Unicode whitespace and strips leading/trailing punctuation.
///
/// Tokens that consist only of punctuation are dropped; indices stay
/// consecutive.
pub fn tokenize(text: &str) -> Vec<Token> {
    text.split_whitespace()
        .map(|raw| raw.trim_matches(is_punct))
        .filter(|s| !s.is_empty())
        .enumerate()
        .map(|(index, s)| Token {
            surface: s.to_string(),
            index,
        })
        .collect()
}

/// Ordered set of phoneme labels with one label reserved for Ezafe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhonemeInventory {
    symbols: Vec<String>,
    lookup: HashMap<String, usize>,
    ezafe: usize,
}

fn valid_label(s: &str) -> bool {
    !s.is_empty() && s.is_ascii() && !s.contains('|') && !s.chars().any(|c| c.is_whitespace())
}

impl PhonemeInventory {
    pub fn new<S: Into<String>>(
        symbols: impl IntoIterator<Item = S>,
        ezafe_symbol: &str,
    ) -> Result<Self, String> {
        let mut out = Vec::new();
        let mut lookup = HashMap::new();
        for s in symbols {
            let s = s.into();
            if !valid_label(&s) {
                return Err(format!("invalid phoneme label {s:?}"));
            }
            if lookup.insert(s.clone(), out.len()).is_some() {
                return Err(format!("duplicate phoneme label {s:?}"));
            }
            out.push(s);
        }
        let ezafe = *lookup
            .get(ezafe_symbol)
            .ok_or_else(|| format!("ezafe symbol {ezafe_symbol:?} not in inventory"))?;
        Ok(PhonemeInventory {
            symbols: out,
            lookup,
            ezafe,
        })
    }

    /// Parses the inventory file format: `ezafe=<label>` on the first
    /// non-comment line, then one label per line.
    pub fn parse(text: &str) -> Result<Self, InventoryError> {
        let mut ezafe: Option<(usize, String)> = None;
        let mut symbols = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if ezafe.is_none() {
                let label = line.strip_prefix("ezafe=").ok_or(InventoryError::Parse {
                    line: line_no,
                    reason: "first line must be ezafe=<label>".into(),
                })?;
                ezafe = Some((line_no, label.trim().to_string()));
                continue;
            }
            symbols.push(line.to_string());
        }
        let (line, ezafe) = ezafe.ok_or(InventoryError::Parse {
            line: 0,
            reason: "empty inventory".into(),
        })?;
        PhonemeInventory::new(symbols, &ezafe).map_err(|reason| InventoryError::Parse { line, reason })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, InventoryError> {
        Self::parse(&fs::read_to_string(path)?)
    }

    pub fn default_inventory() -> Self {
        Self::parse(DEFAULT_INVENTORY).expect("bundled inventory is valid")
    }

    pub fn contains(&self, label: &str) -> bool {
        self.lookup.contains_key(label)
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn ezafe_symbol(&self) -> &str {
        &self.symbols[self.ezafe]
    }

    /// Renders the inventory back into its file format.
    pub fn to_file_string(&self) -> String {
        let mut out = format!("ezafe={}\n", self.ezafe_symbol());
        for s in &self.symbols {
            out.push_str(s);
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Item {
    Phone(String),
    Boundary,
}

impl Item {
    pub fn is_boundary(&self) -> bool {
        matches!(self, Item::Boundary)
    }

    pub fn as_phone(&self) -> Option<&str> {
        match self {
            Item::Phone(p) => Some(p),
            Item::Boundary => None,
        }
    }
}

/// Half-open item range `[start, end)` covering one word's phonemes.
pub type Span = (usize, usize);

/// Ordered phonemes and word boundaries, with an optional word alignment.
///
/// Equality compares items and alignment; use [`PhonemeSequence::items`] to
/// compare items only.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PhonemeSequence {
    items: Vec<Item>,
    alignment: Option<Vec<Span>>,
}

impl PhonemeSequence {
    /// Builds a sequence, checking labels against `inv` and rejecting
    /// adjacent boundaries.
    pub fn new(items: Vec<Item>, inv: &PhonemeInventory) -> Result<Self, SeqError> {
        check_items(&items, inv)?;
        Ok(PhonemeSequence {
            items,
            alignment: None,
        })
    }

    /// Joins per-word phoneme lists with boundary markers and records the
    /// alignment. Words must be non-empty.
    pub fn from_words<W, S>(words: W, inv: &PhonemeInventory) -> Result<Self, SeqError>
    where
        W: IntoIterator,
        W::Item: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut items = Vec::new();
        let mut spans = Vec::new();
        for (w, word) in words.into_iter().enumerate() {
            if w > 0 {
                items.push(Item::Boundary);
            }
            let start = items.len();
            items.extend(word.into_iter().map(|p| Item::Phone(p.as_ref().to_string())));
            if items.len() == start {
                return Err(SeqError::InvalidAlignment(format!("word {w} has no phonemes")));
            }
            spans.push((start, items.len()));
        }
        check_items(&items, inv)?;
        Ok(PhonemeSequence {
            items,
            alignment: Some(spans),
        })
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn alignment(&self) -> Option<&[Span]> {
        self.alignment.as_deref()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Number of phoneme items (boundaries excluded).
    pub fn phoneme_count(&self) -> usize {
        self.items.iter().filter(|i| !i.is_boundary()).count()
    }

    pub fn phonemes(&self) -> impl Iterator<Item = &str> {
        self.items.iter().filter_map(Item::as_phone)
    }

    pub fn without_alignment(mut self) -> Self {
        self.alignment = None;
        self
    }

    /// Attaches an explicit alignment after validating it.
    pub fn with_alignment(mut self, spans: Vec<Span>) -> Result<Self, SeqError> {
        validate_alignment(&self.items, &spans)?;
        self.alignment = Some(spans);
        Ok(self)
    }

    /// Derives the alignment from boundary markers: each maximal run of
    /// phonemes is one word.
    pub fn align_by_boundaries(self) -> Result<Self, SeqError> {
        let mut spans = Vec::new();
        let mut start = 0;
        for (i, item) in self.items.iter().enumerate() {
            if item.is_boundary() {
                if i == start {
                    return Err(SeqError::InvalidAlignment(format!(
                        "boundary at {i} does not follow a word"
                    )));
                }
                spans.push((start, i));
                start = i + 1;
            }
        }
        if start < self.items.len() {
            spans.push((start, self.items.len()));
        } else if !self.items.is_empty() {
            return Err(SeqError::InvalidAlignment("trailing boundary".into()));
        }
        self.with_alignment(spans)
    }

    pub fn word_count(&self) -> Option<usize> {
        self.alignment.as_ref().map(Vec::len)
    }

    /// Phoneme labels of word `index`.
    pub fn word(&self, index: usize) -> Result<Vec<&str>, SeqError> {
        let spans = self.alignment.as_ref().ok_or(SeqError::MissingAlignment)?;
        let &(s, e) = spans.get(index).ok_or(SeqError::WordOutOfRange {
            index,
            words: spans.len(),
        })?;
        Ok(self.items[s..e].iter().filter_map(Item::as_phone).collect())
    }

    /// Replaces the phonemes of word `index`, shifting later spans.
    pub fn splice_word<S: AsRef<str>>(
        &mut self,
        index: usize,
        phonemes: &[S],
    ) -> Result<(), SeqError> {
        let spans = self.alignment.as_mut().ok_or(SeqError::MissingAlignment)?;
        let words = spans.len();
        let &(s, e) = spans
            .get(index)
            .ok_or(SeqError::WordOutOfRange { index, words })?;
        let new_len = phonemes.len();
        self.items.splice(
            s..e,
            phonemes.iter().map(|p| Item::Phone(p.as_ref().to_string())),
        );
        let delta = new_len as isize - (e - s) as isize;
        spans[index] = (s, s + new_len);
        for span in spans.iter_mut().skip(index + 1) {
            span.0 = (span.0 as isize + delta) as usize;
            span.1 = (span.1 as isize + delta) as usize;
        }
        Ok(())
    }

    /// Appends phonemes at the end of word `index`.
    pub fn append_to_word<S: AsRef<str>>(
        &mut self,
        index: usize,
        phonemes: &[S],
    ) -> Result<(), SeqError> {
        let mut word: Vec<String> = self.word(index)?.into_iter().map(str::to_string).collect();
        word.extend(phonemes.iter().map(|p| p.as_ref().to_string()));
        self.splice_word(index, &word)
    }
}

fn check_items(items: &[Item], inv: &PhonemeInventory) -> Result<(), SeqError> {
    let mut prev_boundary = false;
    for (position, item) in items.iter().enumerate() {
        match item {
            Item::Boundary => {
                if prev_boundary {
                    return Err(SeqError::AdjacentBoundary(position));
                }
                prev_boundary = true;
            }
            Item::Phone(label) => {
                if !inv.contains(label) {
                    return Err(SeqError::UnknownPhoneme {
                        label: label.clone(),
                        position,
                    });
                }
                prev_boundary = false;
            }
        }
    }
    Ok(())
}

fn validate_alignment(items: &[Item], spans: &[Span]) -> Result<(), SeqError> {
    let mut covered = vec![false; items.len()];
    let mut last_end = 0;
    for (w, &(s, e)) in spans.iter().enumerate() {
        if s > e || e > items.len() || s < last_end {
            return Err(SeqError::InvalidAlignment(format!(
                "span {w} ({s}, {e}) out of order or out of range"
            )));
        }
        for (i, item) in items.iter().enumerate().take(e).skip(s) {
            if item.is_boundary() {
                return Err(SeqError::InvalidAlignment(format!(
                    "span {w} covers boundary at {i}"
                )));
            }
            covered[i] = true;
        }
        last_end = e;
    }
    if let Some(i) = items
        .iter()
        .zip(&covered)
        .position(|(item, c)| !item.is_boundary() && !c)
    {
        return Err(SeqError::InvalidAlignment(format!("phoneme at {i} not covered")));
    }
    Ok(())
}

/// Renders phonemes separated by single spaces, boundaries as `|`.
pub fn seq_to_text(seq: &PhonemeSequence) -> String {
    seq.to_string()
}

impl fmt::Display for PhonemeSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, item) in self.items.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            match item {
                Item::Phone(p) => f.write_str(p)?,
                Item::Boundary => f.write_str(BOUNDARY)?,
            }
        }
        Ok(())
    }
}

/// Inverse of [`seq_to_text`]. The result carries no alignment.
pub fn parse_seq(text: &str, inv: &PhonemeInventory) -> Result<PhonemeSequence, SeqError> {
    let items = text
        .split_whitespace()
        .map(|t| {
            if t == BOUNDARY {
                Item::Boundary
            } else {
                Item::Phone(t.to_string())
            }
        })
        .collect();
    PhonemeSequence::new(items, inv)
}
