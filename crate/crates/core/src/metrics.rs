//! Confusion counts, OA / Cohen's kappa / MCC, and throughput figures.
//!
//! Leaf is the positive class: TP counts leaves predicted leaf, FP wood
//! predicted leaf.

use std::fmt::Write as _;

use thiserror::Error;

use crate::model::ClassLabel;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("predicted has {predicted} labels but reference has {reference}")]
    LengthMismatch { predicted: usize, reference: usize },
    #[error("label {index} is unassigned")]
    Unassigned { index: usize },
    #[error("no samples to score")]
    Empty,
    #[error("elapsed time must be > 0, got {0}")]
    NonPositiveElapsed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    pub fn_: u64,
}

impl ConfusionCounts {
    pub fn new(tp: u64, tn: u64, fp: u64, fn_: u64) -> Self {
        Self { tp, tn, fp, fn_ }
    }

    pub fn total(&self) -> u64 {
        self.tp + self.tn + self.fp + self.fn_
    }

    /// The same counts with wood taken as the positive class.
    pub fn swapped(&self) -> Self {
        Self::new(self.tn, self.tp, self.fn_, self.fp)
    }
}

/// Scores a prediction against a reference labeling.
pub fn confusion(predicted: &[ClassLabel], reference: &[ClassLabel]) -> Result<ConfusionCounts, MetricsError> {
    if predicted.len() != reference.len() {
        return Err(MetricsError::LengthMismatch {
            predicted: predicted.len(),
            reference: reference.len(),
        });
    }
    let mut c = ConfusionCounts::default();
    for (i, (p, r)) in predicted.iter().zip(reference).enumerate() {
        match (p, r) {
            (ClassLabel::Leaf, ClassLabel::Leaf) => c.tp += 1,
            (ClassLabel::Wood, ClassLabel::Wood) => c.tn += 1,
            (ClassLabel::Leaf, ClassLabel::Wood) => c.fp += 1,
            (ClassLabel::Wood, ClassLabel::Leaf) => c.fn_ += 1,
            _ => return Err(MetricsError::Unassigned { index: i }),
        }
    }
    Ok(c)
}

/// A coefficient that may be undefined for single-class data; those cases
/// report 0 with `degenerate` set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Score {
    pub value: f64,
    pub degenerate: bool,
}

impl Score {
    fn defined(value: f64) -> Self {
        Self {
            value,
            degenerate: false,
        }
    }

    fn undefined() -> Self {
        Self {
            value: 0.0,
            degenerate: true,
        }
    }
}

pub fn overall_accuracy(c: &ConfusionCounts) -> Result<f64, MetricsError> {
    let n = c.total();
    if n == 0 {
        return Err(MetricsError::Empty);
    }
    Ok((c.tp + c.tn) as f64 / n as f64)
}

pub fn kappa(c: &ConfusionCounts) -> Result<Score, MetricsError> {
    let n = c.total();
    if n == 0 {
        return Err(MetricsError::Empty);
    }
    let (tp, tn, fp, fn_) = (c.tp as f64, c.tn as f64, c.fp as f64, c.fn_ as f64);
    let n = n as f64;
    let po = (tp + tn) / n;
    let pe = ((tp + fp) * (tp + fn_) + (tn + fn_) * (tn + fp)) / (n * n);
    if pe >= 1.0 {
        return Ok(Score::undefined());
    }
    Ok(Score::defined((po - pe) / (1.0 - pe)))
}

pub fn mcc(c: &ConfusionCounts) -> Result<Score, MetricsError> {
    if c.total() == 0 {
        return Err(MetricsError::Empty);
    }
    let (tp, tn, fp, fn_) = (c.tp as f64, c.tn as f64, c.fp as f64, c.fn_ as f64);
    let factors = [tp + fp, tp + fn_, tn + fn_, tn + fp];
    if factors.contains(&0.0) {
        return Ok(Score::undefined());
    }
    let denom = factors.iter().map(|f| f.sqrt()).product::<f64>();
    Ok(Score::defined((tp * tn - fp * fn_) / denom))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Throughput {
    pub elapsed_seconds: f64,
    pub points_per_second: f64,
    pub ms_per_million: f64,
}

pub fn throughput_report(elapsed_seconds: f64, point_count: usize) -> Result<Throughput, MetricsError> {
    if !(elapsed_seconds > 0.0) {
        return Err(MetricsError::NonPositiveElapsed(elapsed_seconds));
    }
    let points = point_count as f64;
    Ok(Throughput {
        elapsed_seconds,
        points_per_second: points / elapsed_seconds,
        ms_per_million: elapsed_seconds * 1e3 / (points / 1e6),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccuracyReport {
    pub counts: ConfusionCounts,
    pub oa: f64,
    pub kappa: Score,
    pub mcc: Score,
    pub timing: Option<Throughput>,
}

impl AccuracyReport {
    pub fn from_counts(counts: ConfusionCounts) -> Result<Self, MetricsError> {
        Ok(Self {
            counts,
            oa: overall_accuracy(&counts)?,
            kappa: kappa(&counts)?,
            mcc: mcc(&counts)?,
            timing: None,
        })
    }

    pub fn with_timing(mut self, timing: Throughput) -> Self {
        self.timing = Some(timing);
        self
    }

    /// One `key=value` per line: tp, tn, fp, fn, oa, kappa, mcc, elapsed_ms,
    /// ms_per_million. Missing timing is written as `NA`.
    pub fn to_key_values(&self) -> String {
        let c = &self.counts;
        let mut s = String::new();
        let _ = writeln!(s, "tp={}", c.tp);
        let _ = writeln!(s, "tn={}", c.tn);
        let _ = writeln!(s, "fp={}", c.fp);
        let _ = writeln!(s, "fn={}", c.fn_);
        let _ = writeln!(s, "oa={:.6}", self.oa);
        let _ = writeln!(s, "kappa={:.6}", self.kappa.value);
        let _ = writeln!(s, "mcc={:.6}", self.mcc.value);
        match self.timing {
            Some(t) => {
                let _ = writeln!(s, "elapsed_ms={:.3}", t.elapsed_seconds * 1e3);
                let _ = writeln!(s, "ms_per_million={:.3}", t.ms_per_million);
            }
            None => {
                s.push_str("elapsed_ms=NA\nms_per_million=NA\n");
            }
        }
        s
    }

    /// Human-readable table.
    pub fn to_table(&self) -> String {
        let c = &self.counts;
        let flag = |s: &Score| if s.degenerate { " (undefined: single class)" } else { "" };
        let mut s = String::new();
        let _ = writeln!(s, "                 reference leaf  reference wood");
        let _ = writeln!(s, "predicted leaf   {:>14}  {:>14}", c.tp, c.fp);
        let _ = writeln!(s, "predicted wood   {:>14}  {:>14}", c.fn_, c.tn);
        let _ = writeln!(s, "N                {:>14}", c.total());
        let _ = writeln!(s, "OA               {:>14.4}", self.oa);
        let _ = writeln!(s, "Kappa            {:>14.4}{}", self.kappa.value, flag(&self.kappa));
        let _ = writeln!(s, "MCC              {:>14.4}{}", self.mcc.value, flag(&self.mcc));
        if let Some(t) = self.timing {
            let _ = writeln!(s, "Time cost / ms   {:>14.1}", t.elapsed_seconds * 1e3);
            let _ = writeln!(s, "ms per million   {:>14.1}", t.ms_per_million);
        }
        s
    }
}
