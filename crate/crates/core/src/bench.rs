//! Benchmark harness: accuracy and real-time-factor statistics for one
//! pipeline configuration, plus CSV report emission.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{Config, Mode};
use crate::metrics::{
    corpus_per, g2p_quality, homograph_accuracy, pipeline_ezafe_f1, EvalCase, MetricsError,
};
use crate::phoneme::PhonemeSequence;
use crate::pipeline::{Pipeline, PipelineError, RunOutput};

pub const CSV_HEADER: &str = "model,mode,per,ezafe_f1,homograph_acc,rtf_mean,rtf_std,g2p_quality";

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("benchmark corpus is empty")]
    EmptyCorpus,
    #[error("n_runs must be at least 1")]
    InvalidRuns,
    #[error("case {case}: {source}")]
    Run {
        case: usize,
        #[source]
        source: PipelineError,
    },
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One row of the report table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub model: String,
    pub mode: Mode,
    pub per: f64,
    pub ezafe_f1: f64,
    pub homograph_acc: f64,
    pub rtf_mean: f64,
    pub rtf_std: f64,
    pub g2p_quality: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub row: ReportRow,
    pub n_runs: usize,
    /// Set when `n_runs == 1`: `rtf_std` is then reported as 0.
    pub std_undefined: bool,
    /// RTF of each run, in order.
    pub run_rtfs: Vec<f64>,
}

/// Sample mean and (n−1) standard deviation. A single value gives std 0.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

pub fn model_name(config: &Config) -> &'static str {
    if config.refine {
        "refined"
    } else {
        "base"
    }
}

fn predicted_variant(out: &RunOutput, index: usize) -> Option<u32> {
    out.choices.iter().find(|(i, _)| *i == index).map(|&(_, v)| v)
}

/// Accuracy metrics of one pass over the corpus.
pub fn quality(
    cases: &[EvalCase],
    outputs: &[RunOutput],
    pipeline: &Pipeline,
) -> Result<(f64, f64, f64), MetricsError> {
    let per = corpus_per(cases.iter().zip(outputs).map(|(c, o)| (&c.reference, &o.refined)))?;
    let refined: Vec<PhonemeSequence> = outputs.iter().map(|o| o.refined.clone()).collect();
    let f1 = pipeline_ezafe_f1(cases, &refined, &pipeline.frontend().inventory)?;
    let pairs: Vec<(Option<u32>, Option<u32>)> = cases
        .iter()
        .zip(outputs)
        .flat_map(|(c, o)| {
            c.gold_choices
                .iter()
                .map(move |&(i, v)| (Some(v), predicted_variant(o, i)))
        })
        .collect();
    let acc = homograph_accuracy(&pairs)?;
    Ok((per, f1, acc))
}

/// Runs `pipeline` over the corpus `n_runs` times. Each run contributes one
/// RTF (summed processing time over summed audio duration); accuracy comes
/// from the first run since outputs are deterministic.
pub fn bench_pipeline(
    pipeline: &mut Pipeline,
    corpus: &[EvalCase],
    n_runs: usize,
) -> Result<BenchReport, BenchError> {
    if corpus.is_empty() {
        return Err(BenchError::EmptyCorpus);
    }
    if n_runs == 0 {
        return Err(BenchError::InvalidRuns);
    }
    let mut first = None;
    let mut run_rtfs = Vec::with_capacity(n_runs);
    for _ in 0..n_runs {
        let mut outputs = Vec::with_capacity(corpus.len());
        let (mut busy, mut audio) = (0.0, 0.0);
        for (i, case) in corpus.iter().enumerate() {
            let out = pipeline
                .run(&case.text)
                .map_err(|source| BenchError::Run { case: i, source })?;
            busy += out.timings().total;
            audio += out.synth.audio_duration_s;
            outputs.push(out);
        }
        if audio <= 0.0 {
            return Err(PipelineError::ZeroDuration.into());
        }
        run_rtfs.push(busy / audio);
        if first.is_none() {
            first = Some(outputs);
        }
    }
    let outputs = first.expect("n_runs >= 1");
    let (per, ezafe_f1, homograph_acc) = quality(corpus, &outputs, pipeline)?;
    let g2p = match g2p_quality(ezafe_f1, homograph_acc, per) {
        Ok(q) => q,
        Err(MetricsError::ZeroPer) => f64::INFINITY,
        Err(e) => return Err(e.into()),
    };
    let (rtf_mean, rtf_std) = mean_std(&run_rtfs);
    Ok(BenchReport {
        row: ReportRow {
            model: model_name(pipeline.config()).to_string(),
            mode: pipeline.mode(),
            per,
            ezafe_f1,
            homograph_acc,
            rtf_mean,
            rtf_std,
            g2p_quality: g2p,
        },
        n_runs,
        std_undefined: n_runs < 2,
        run_rtfs,
    })
}

/// Builds a pipeline for `config` (spawning its service if needed), runs
/// [`bench_pipeline`] and tears the pipeline down.
pub fn bench(corpus: &[EvalCase], config: &Config, n_runs: usize) -> Result<BenchReport, BenchError> {
    if corpus.is_empty() {
        return Err(BenchError::EmptyCorpus);
    }
    let mut pipeline = Pipeline::new(config.clone())?;
    let report = bench_pipeline(&mut pipeline, corpus, n_runs);
    pipeline.shutdown()?;
    report
}

pub fn write_csv<W: Write>(rows: &[ReportRow], out: W) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record(CSV_HEADER.split(','))?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn csv_string(reports: &[BenchReport]) -> Result<String, BenchError> {
    let rows: Vec<ReportRow> = reports.iter().map(|r| r.row.clone()).collect();
    let mut buf = Vec::new();
    write_csv(&rows, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

pub fn emit_csv(reports: &[BenchReport], path: impl AsRef<Path>) -> Result<(), BenchError> {
    std::fs::write(path, csv_string(reports)?)?;
    Ok(())
}

pub fn parse_csv(text: &str) -> Result<Vec<ReportRow>, BenchError> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for rec in r.deserialize() {
        rows.push(rec?);
    }
    Ok(rows)
}

/// `(log10 rtf_mean, g2p_quality)` per report, for a speed/quality plot.
pub fn points(reports: &[BenchReport]) -> Vec<(String, Mode, f64, f64)> {
    reports
        .iter()
        .map(|r| {
            (
                r.row.model.clone(),
                r.row.mode,
                r.row.rtf_mean.log10(),
                r.row.g2p_quality,
            )
        })
        .collect()
}

pub fn emit_points(reports: &[BenchReport], path: impl AsRef<Path>) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["model", "mode", "log10_rtf_mean", "g2p_quality"])?;
    for (model, mode, x, y) in points(reports) {
        w.write_record([model, mode.to_string(), x.to_string(), y.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
