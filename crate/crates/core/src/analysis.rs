//! Comparing two score reports and merging several evaluators' grids.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gridmodel::{Evaluation, MicroGridKey, Mode};
use crate::scoring::{micro_degree, Degrees, MicroDegree, ScoreError, ScoreReport, SemiGlobalDegree};
use crate::taxonomy::{Taxonomy, TaxonomyRef};

#[derive(Debug, Error, PartialEq)]
pub enum AnalysisError {
    #[error("taxonomy mismatch: {left} vs {right}")]
    TaxonomyMismatch { left: TaxonomyRef, right: TaxonomyRef },
    #[error("mode mismatch: {left} vs {right}")]
    ModeMismatch { left: Mode, right: Mode },
    #[error("system mismatch: {left:?} vs {right:?}")]
    SystemMismatch { left: String, right: String },
    #[error("nothing to merge")]
    Empty,
    #[error("evaluator {0:?} appears more than once")]
    DuplicateEvaluator(String),
    #[error(transparent)]
    Score(#[from] ScoreError),
}

/// Change of one degree, right minus left, in percentage points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Delta {
    pub left: Option<f64>,
    pub right: Option<f64>,
    /// `None` when either side is undefined.
    pub delta: Option<f64>,
}

impl Delta {
    fn new(left: Option<f64>, right: Option<f64>) -> Self {
        Self {
            left,
            right,
            delta: left.zip(right).map(|(l, r)| r - l),
        }
    }

    fn is_zero(&self) -> bool {
        self.left.is_none() == self.right.is_none() && self.delta.unwrap_or(0.0) == 0.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalDelta {
    pub aspect: String,
    pub factor: String,
    #[serde(flatten)]
    pub delta: Delta,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemiGlobalDelta {
    pub id: String,
    #[serde(flatten)]
    pub delta: Delta,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MicroDifference {
    pub sub_aspect: String,
    pub sub_factor: String,
    pub left: u8,
    pub right: u8,
}

/// A micro-grid that is N/A on exactly one side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NaDisagreement {
    pub sub_aspect: String,
    pub sub_factor: String,
    pub left: MicroDegree,
    pub right: MicroDegree,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub left: String,
    pub right: String,
    pub taxonomy: TaxonomyRef,
    pub mode: Mode,
    pub local: Vec<LocalDelta>,
    pub aspects: Vec<SemiGlobalDelta>,
    pub factors: Vec<SemiGlobalDelta>,
    pub global: Delta,
    pub micro_differences: Vec<MicroDifference>,
    pub na_disagreements: Vec<NaDisagreement>,
}

impl ComparisonReport {
    pub fn is_identical(&self) -> bool {
        self.micro_differences.is_empty()
            && self.na_disagreements.is_empty()
            && self.global.is_zero()
            && self.local.iter().all(|l| l.delta.is_zero())
    }
}

/// Label a report as `system (evaluator)`.
pub fn report_label(r: &ScoreReport) -> String {
    format!("{} ({})", r.system, r.evaluator)
}

/// Compares two reports on the same taxonomy and mode. Deltas are right − left.
pub fn compare(left: &ScoreReport, right: &ScoreReport) -> Result<ComparisonReport, AnalysisError> {
    if left.taxonomy != right.taxonomy {
        return Err(AnalysisError::TaxonomyMismatch {
            left: left.taxonomy.clone(),
            right: right.taxonomy.clone(),
        });
    }
    if left.mode != right.mode {
        return Err(AnalysisError::ModeMismatch {
            left: left.mode,
            right: right.mode,
        });
    }
    let (l_deg, r_deg) = (&left.degrees, &right.degrees);

    let local = l_deg
        .local
        .iter()
        .zip(&r_deg.local)
        .map(|(a, b)| LocalDelta {
            aspect: a.aspect.clone(),
            factor: a.factor.clone(),
            delta: Delta::new(a.percent, b.percent),
        })
        .collect();
    let semi = |a: &[SemiGlobalDegree], b: &[SemiGlobalDegree]| {
        a.iter()
            .zip(b)
            .map(|(x, y)| SemiGlobalDelta {
                id: x.id.clone(),
                delta: Delta::new(x.percent, y.percent),
            })
            .collect()
    };

    let mut micro_differences = Vec::new();
    let mut na_disagreements = Vec::new();
    for (a, b) in left.micro.iter().zip(&right.micro) {
        match (a.degree.value(), b.degree.value()) {
            (Some(x), Some(y)) if x != y => micro_differences.push(MicroDifference {
                sub_aspect: a.sub_aspect.clone(),
                sub_factor: a.sub_factor.clone(),
                left: x,
                right: y,
            }),
            (Some(_), None) | (None, Some(_)) => na_disagreements.push(NaDisagreement {
                sub_aspect: a.sub_aspect.clone(),
                sub_factor: a.sub_factor.clone(),
                left: a.degree,
                right: b.degree,
            }),
            _ => {}
        }
    }

    Ok(ComparisonReport {
        left: report_label(left),
        right: report_label(right),
        taxonomy: left.taxonomy.clone(),
        mode: left.mode,
        local,
        aspects: semi(&l_deg.aspects, &r_deg.aspects),
        factors: semi(&l_deg.factors, &r_deg.factors),
        global: Delta::new(Some(l_deg.global.percent), Some(r_deg.global.percent)),
        micro_differences,
        na_disagreements,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MergedMicro {
    pub sub_aspect: String,
    pub sub_factor: String,
    /// Mean degree over evaluators who did not mark the grid N/A;
    /// `None` only if all of them did.
    pub mean: Option<f64>,
    pub contributors: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MergedEvaluation {
    pub taxonomy: TaxonomyRef,
    pub system: String,
    pub mode: Mode,
    pub evaluators: Vec<String>,
    pub micro: Vec<MergedMicro>,
    pub degrees: Degrees,
}

/// Averages micro-grid degrees across evaluators and re-aggregates.
///
/// Table 1 is not re-applied: merged degrees stay real-valued in `[0, 3]`.
pub fn merge(evals: &[Evaluation], taxonomy: &Taxonomy) -> Result<MergedEvaluation, AnalysisError> {
    let first = evals.first().ok_or(AnalysisError::Empty)?;
    let mut seen = BTreeSet::new();
    for e in evals {
        if e.taxonomy != taxonomy.reference() {
            return Err(AnalysisError::TaxonomyMismatch {
                left: taxonomy.reference(),
                right: e.taxonomy.clone(),
            });
        }
        if e.mode != first.mode {
            return Err(AnalysisError::ModeMismatch {
                left: first.mode,
                right: e.mode,
            });
        }
        if e.system != first.system {
            return Err(AnalysisError::SystemMismatch {
                left: first.system.clone(),
                right: e.system.clone(),
            });
        }
        if !seen.insert(e.evaluator.as_str()) {
            return Err(AnalysisError::DuplicateEvaluator(e.evaluator.clone()));
        }
    }

    let micro: Vec<MergedMicro> = taxonomy
        .sub_aspects()
        .flat_map(|(_, sa)| taxonomy.sub_factors().map(move |(_, sf)| (sa, sf)))
        .map(|(sa, sf)| {
            let key = MicroGridKey::new(sa.id.as_str(), sf.id.as_str());
            let scored: Vec<f64> = evals
                .iter()
                .filter_map(|e| micro_degree(&e.micro_grid(&key)).value())
                .map(f64::from)
                .collect();
            MergedMicro {
                mean: (!scored.is_empty()).then(|| scored.iter().sum::<f64>() / scored.len() as f64),
                contributors: scored.len(),
                sub_aspect: key.sub_aspect,
                sub_factor: key.sub_factor,
            }
        })
        .collect();

    let degrees = Degrees::aggregate(taxonomy, |k| {
        micro
            .iter()
            .find(|m| m.sub_aspect == k.sub_aspect && m.sub_factor == k.sub_factor)
            .and_then(|m| m.mean)
    })?;

    let mut evaluators: Vec<String> = evals.iter().map(|e| e.evaluator.clone()).collect();
    evaluators.sort();
    Ok(MergedEvaluation {
        taxonomy: taxonomy.reference(),
        system: first.system.clone(),
        mode: first.mode,
        evaluators,
        micro,
        degrees,
    })
}

impl MergedEvaluation {
    pub fn mean_degree(&self, sub_aspect: &str, sub_factor: &str) -> Option<f64> {
        self.micro
            .iter()
            .find(|m| m.sub_aspect == sub_aspect && m.sub_factor == sub_factor)
            .and_then(|m| m.mean)
    }

    pub fn global(&self) -> f64 {
        self.degrees.global.percent
    }
}
