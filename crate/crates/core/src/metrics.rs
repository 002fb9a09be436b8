//! Accuracy measures: phoneme error rate, homograph accuracy, pipeline-level
//! Ezafe F1 and the composite G2P quality score.

use std::path::Path;

use thiserror::Error;

use crate::ezafe::BinaryCounts;
use crate::phoneme::{parse_seq, tokenize, PhonemeInventory, PhonemeSequence, SeqError};

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("reference sequence has no phonemes")]
    EmptyReference,
    #[error("no cases to score")]
    EmptyCases,
    #[error("phoneme error rate is zero")]
    ZeroPer,
    #[error("{cases} cases but {outputs} outputs")]
    LengthMismatch { cases: usize, outputs: usize },
    #[error("case {case}: {tags} gold tags but {words} output words")]
    WordMismatch { case: usize, tags: usize, words: usize },
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error(transparent)]
    Seq(#[from] SeqError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Unit-cost Levenshtein distance over phoneme labels.
pub fn edit_distance<S: AsRef<str>>(a: &[S], b: &[S]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, x) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(x.as_ref() != y.as_ref());
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Edit distance between the phonemes of `hyp` and `reference` (word
/// boundaries ignored) as a percentage of the reference phoneme count.
pub fn per(reference: &PhonemeSequence, hyp: &PhonemeSequence) -> Result<f64, MetricsError> {
    let r: Vec<&str> = reference.phonemes().collect();
    if r.is_empty() {
        return Err(MetricsError::EmptyReference);
    }
    let h: Vec<&str> = hyp.phonemes().collect();
    Ok(edit_distance(&r, &h) as f64 / r.len() as f64 * 100.0)
}

/// Total edits over total reference phonemes across a corpus, as a percentage.
pub fn corpus_per<'a>(
    pairs: impl IntoIterator<Item = (&'a PhonemeSequence, &'a PhonemeSequence)>,
) -> Result<f64, MetricsError> {
    let (mut edits, mut total) = (0usize, 0usize);
    for (reference, hyp) in pairs {
        let r: Vec<&str> = reference.phonemes().collect();
        let h: Vec<&str> = hyp.phonemes().collect();
        edits += edit_distance(&r, &h);
        total += r.len();
    }
    if total == 0 {
        return Err(MetricsError::EmptyReference);
    }
    Ok(edits as f64 / total as f64 * 100.0)
}

/// Share of `(gold, predicted)` pairs that agree, as a percentage.
pub fn homograph_accuracy<T: PartialEq>(pairs: &[(T, T)]) -> Result<f64, MetricsError> {
    if pairs.is_empty() {
        return Err(MetricsError::EmptyCases);
    }
    let hits = pairs.iter().filter(|(g, p)| g == p).count();
    Ok(hits as f64 / pairs.len() as f64 * 100.0)
}

/// Per-word test: does the word's span end in the Ezafe phoneme?
pub fn ezafe_marks(seq: &PhonemeSequence, ezafe: &str) -> Result<Vec<bool>, SeqError> {
    let n = seq.word_count().ok_or(SeqError::MissingAlignment)?;
    (0..n)
        .map(|i| Ok(seq.word(i)?.last() == Some(&ezafe)))
        .collect()
}

/// F1 (percent) of Ezafe presence in pipeline outputs against gold tags.
pub fn pipeline_ezafe_f1(
    cases: &[EvalCase],
    outputs: &[PhonemeSequence],
    inv: &PhonemeInventory,
) -> Result<f64, MetricsError> {
    if cases.is_empty() {
        return Err(MetricsError::EmptyCases);
    }
    if cases.len() != outputs.len() {
        return Err(MetricsError::LengthMismatch {
            cases: cases.len(),
            outputs: outputs.len(),
        });
    }
    let mut counts = BinaryCounts::default();
    for (i, (case, out)) in cases.iter().zip(outputs).enumerate() {
        let marks = ezafe_marks(out, inv.ezafe_symbol())?;
        if marks.len() != case.gold_tags.len() {
            return Err(MetricsError::WordMismatch {
                case: i,
                tags: case.gold_tags.len(),
                words: marks.len(),
            });
        }
        for (&g, p) in case.gold_tags.iter().zip(marks) {
            counts.add(g, p);
        }
    }
    Ok(counts.prf().f1 * 100.0)
}

/// Composite quality: summed Ezafe F1 and homograph accuracy over PER.
pub fn g2p_quality(ezafe_f1: f64, homograph_acc: f64, per: f64) -> Result<f64, MetricsError> {
    if per <= 0.0 {
        return Err(MetricsError::ZeroPer);
    }
    Ok((ezafe_f1 + homograph_acc) / per)
}

/// One evaluation utterance with its gold annotations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalCase {
    pub text: String,
    pub reference: PhonemeSequence,
    /// `(token index, variant id)` for each homograph occurrence.
    pub gold_choices: Vec<(usize, u32)>,
    pub gold_tags: Vec<bool>,
}

impl EvalCase {
    pub fn to_line(&self) -> String {
        let choices: Vec<String> = self
            .gold_choices
            .iter()
            .map(|(i, v)| format!("{i}:{v}"))
            .collect();
        let tags: Vec<&str> = self
            .gold_tags
            .iter()
            .map(|&t| if t { "1" } else { "0" })
            .collect();
        format!(
            "{}\t{}\t{}\t{}",
            self.text,
            self.reference,
            choices.join(","),
            tags.join(",")
        )
    }
}

fn parse_case(line: &str, inv: &PhonemeInventory) -> Result<EvalCase, String> {
    let fields: Vec<&str> = line.split('\t').collect();
    if fields.len() != 4 {
        return Err(format!("expected 4 tab-separated fields, got {}", fields.len()));
    }
    let text = fields[0].to_string();
    let n_tokens = tokenize(&text).len();
    let reference = parse_seq(fields[1], inv)
        .and_then(|s| s.align_by_boundaries())
        .map_err(|e| format!("reference: {e}"))?;
    if reference.word_count() != Some(n_tokens) {
        return Err(format!(
            "reference has {:?} words, text has {n_tokens} tokens",
            reference.word_count()
        ));
    }
    let mut gold_choices = Vec::new();
    for item in fields[2].split(',').filter(|s| !s.is_empty()) {
        let (i, v) = item
            .split_once(':')
            .ok_or_else(|| format!("bad choice {item:?}"))?;
        let i: usize = i.parse().map_err(|_| format!("bad index {i:?}"))?;
        let v: u32 = v.parse().map_err(|_| format!("bad variant {v:?}"))?;
        if i >= n_tokens {
            return Err(format!("choice index {i} out of range"));
        }
        gold_choices.push((i, v));
    }
    let gold_tags = fields[3]
        .split(',')
        .filter(|s| !s.is_empty())
        .map(|t| match t {
            "0" => Ok(false),
            "1" => Ok(true),
            other => Err(format!("bad tag {other:?}")),
        })
        .collect::<Result<Vec<_>, _>>()?;
    if gold_tags.len() != n_tokens {
        return Err(format!("{} tags for {n_tokens} tokens", gold_tags.len()));
    }
    Ok(EvalCase {
        text,
        reference,
        gold_choices,
        gold_tags,
    })
}

/// Parses an evaluation file. Blank lines and `#` comments are skipped.
pub fn parse_cases(text: &str, inv: &PhonemeInventory) -> Result<Vec<EvalCase>, MetricsError> {
    let mut cases = Vec::new();
    for (n, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let case = parse_case(line, inv).map_err(|reason| MetricsError::Parse {
            line: n + 1,
            reason,
        })?;
        cases.push(case);
    }
    Ok(cases)
}

pub fn load_cases(path: impl AsRef<Path>, inv: &PhonemeInventory) -> Result<Vec<EvalCase>, MetricsError> {
    parse_cases(&std::fs::read_to_string(path)?, inv)
}

pub fn cases_to_text(cases: &[EvalCase]) -> String {
    cases.iter().map(|c| c.to_line() + "\n").collect()
}
