//! Label-based matcher: every source label is scored against every target
//! label with one string measure, and the resulting matrix is solved as an
//! assignment problem.

mod hungarian;
pub mod metrics;

use std::fmt;
use std::str::FromStr;

pub use hungarian::{max_weight_assignment, min_cost_assignment};

use crate::error::{Error, Result};
use crate::ingest::LabelTable;
use crate::model::{canonicalize_alignment, Alignment, Correspondence};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MetricKind {
    Equal,
    Hamming,
    Jaro,
    JaroWinkler,
    Levenshtein,
    NGram,
    NeedlemanWunsch,
    Smoa,
    SubString,
}

impl MetricKind {
    pub const ALL: [MetricKind; 9] = [
        MetricKind::Equal,
        MetricKind::Hamming,
        MetricKind::Jaro,
        MetricKind::JaroWinkler,
        MetricKind::Levenshtein,
        MetricKind::NGram,
        MetricKind::NeedlemanWunsch,
        MetricKind::Smoa,
        MetricKind::SubString,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MetricKind::Equal => "equal",
            MetricKind::Hamming => "hamming",
            MetricKind::Jaro => "jaro",
            MetricKind::JaroWinkler => "jarowinkler",
            MetricKind::Levenshtein => "levenshtein",
            MetricKind::NGram => "ngram",
            MetricKind::NeedlemanWunsch => "needlemanwunsch",
            MetricKind::Smoa => "smoa",
            MetricKind::SubString => "substring",
        }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MetricKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let key: String = s
            .chars()
            .filter(|c| !matches!(c, '-' | '_' | ' '))
            .flat_map(char::to_lowercase)
            .collect();
        MetricKind::ALL
            .into_iter()
            .find(|m| m.name() == key)
            .ok_or_else(|| {
                let names: Vec<_> = MetricKind::ALL.iter().map(|m| m.name()).collect();
                format!("unknown metric {s:?}; expected one of: {}", names.join(", "))
            })
    }
}

/// Similarity of two already normalized labels.
///
/// Arguments are put in a fixed order before scoring so that every measure
/// is symmetric, including the tie-breaking inside SMOA and Jaro.
pub fn similarity(metric: MetricKind, a: &str, b: &str) -> f64 {
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    let s = match metric {
        MetricKind::Equal => metrics::equal(a, b),
        MetricKind::Hamming => metrics::hamming(a, b),
        MetricKind::Jaro => metrics::jaro(a, b),
        MetricKind::JaroWinkler => metrics::jaro_winkler(a, b),
        MetricKind::Levenshtein => metrics::levenshtein(a, b),
        MetricKind::NGram => metrics::ngram(a, b),
        MetricKind::NeedlemanWunsch => metrics::needleman_wunsch(a, b),
        MetricKind::Smoa => metrics::smoa(a, b),
        MetricKind::SubString => metrics::substring(a, b),
    };
    s.clamp(0.0, 1.0)
}

/// Lower-cases, turns `_` and `-` into spaces, collapses whitespace runs
/// and trims.
pub fn normalize(raw_label: &str) -> String {
    raw_label
        .to_lowercase()
        .replace(['_', '-'], " ")
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    pub s: Vec<Vec<f64>>,
}

impl SimilarityMatrix {
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.s[row][col]
    }
}

pub fn build_similarity_matrix(src: &LabelTable, tgt: &LabelTable, metric: MetricKind) -> Result<SimilarityMatrix> {
    if src.is_empty() || tgt.is_empty() {
        return Err(Error::EmptyTable);
    }
    let tgt_labels: Vec<String> = tgt.labels().map(normalize).collect();
    let s = src
        .labels()
        .map(|label| {
            let a = normalize(label);
            tgt_labels.iter().map(|b| similarity(metric, &a, b)).collect()
        })
        .collect();
    Ok(SimilarityMatrix {
        rows: src.ids().map(str::to_string).collect(),
        cols: tgt.ids().map(str::to_string).collect(),
        s,
    })
}

/// Maximum-total-similarity one-to-one assignment.
pub fn hungarian_assign(s: &SimilarityMatrix) -> Vec<(usize, usize)> {
    max_weight_assignment(&s.s)
}

/// Keeps the assigned pairs whose similarity reaches `threshold`.
pub fn extract_alignment(
    s: &SimilarityMatrix,
    assignment: &[(usize, usize)],
    threshold: f64,
    system_name: &str,
) -> Result<Alignment> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::InvalidThreshold(threshold));
    }
    let raw = assignment
        .iter()
        .filter(|&&(i, j)| s.get(i, j) >= threshold)
        .map(|&(i, j)| Correspondence::new(&s.rows[i], &s.cols[j], s.get(i, j)))
        .collect::<Result<Vec<_>>>()?;
    canonicalize_alignment(raw, system_name)
}

/// Matrix construction, assignment and thresholding in one call.
pub fn match_labels(
    src: &LabelTable,
    tgt: &LabelTable,
    metric: MetricKind,
    threshold: f64,
    system_name: &str,
) -> Result<Alignment> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::InvalidThreshold(threshold));
    }
    let s = build_similarity_matrix(src, tgt, metric)?;
    let assignment = hungarian_assign(&s);
    extract_alignment(&s, &assignment, threshold, system_name)
}
