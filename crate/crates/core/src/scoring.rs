//! Micro-grid degrees and their aggregation into local, semi-global and
//! global adaptation degrees.
//!
//! A micro-grid scores 0 to 3 from how its checked cells are spread over
//! rows (factor elements) and columns (aspect elements). Each (aspect,
//! factor) block then becomes a percentage of the maximum score its
//! applicable micro-grids could reach, and the percentages are averaged
//! along rows, columns, and over the whole matrix.
//!
//! N/A micro-grids are left out of every sum and every divisor. A block
//! whose micro-grids are all N/A has no local degree; it is skipped by the
//! row/column means, and the global degree is the mean of every defined
//! block. Without N/A blocks that equals both the mean of the aspect
//! degrees and the mean of the factor degrees.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gridmodel::{Evaluation, MicroGridKey, MicroGridState, Mode};
use crate::taxonomy::{Taxonomy, TaxonomyRef};

/// Largest micro-grid degree.
pub const MAX_DEGREE: u8 = 3;

/// Tolerance for the mean-of-aspects / mean-of-factors identity.
pub const IDENTITY_TOLERANCE: f64 = 1e-9;

/// Degree of one micro-grid. Serialized as an integer, or `null` for N/A.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "Option<u8>", into = "Option<u8>")]
pub enum MicroDegree {
    Scored(u8),
    NotApplicable,
}

impl MicroDegree {
    pub fn value(self) -> Option<u8> {
        match self {
            MicroDegree::Scored(d) => Some(d),
            MicroDegree::NotApplicable => None,
        }
    }
}

impl From<Option<u8>> for MicroDegree {
    fn from(v: Option<u8>) -> Self {
        v.map_or(MicroDegree::NotApplicable, MicroDegree::Scored)
    }
}

impl From<MicroDegree> for Option<u8> {
    fn from(d: MicroDegree) -> Self {
        d.value()
    }
}

/// Scores a set of checked cells given as `(column, row)` pairs.
///
/// 0 without marks, 1 for a single mark, 2 when all marks share one row or
/// one column, 3 once they span at least two rows and two columns.
pub fn classify<C: Ord, R: Ord>(cells: impl IntoIterator<Item = (C, R)>) -> u8 {
    let mut count = 0usize;
    let mut columns = BTreeSet::new();
    let mut rows = BTreeSet::new();
    for (c, r) in cells {
        count += 1;
        columns.insert(c);
        rows.insert(r);
    }
    match count {
        0 => 0,
        1 => 1,
        _ if rows.len() == 1 || columns.len() == 1 => 2,
        _ => 3,
    }
}

pub fn micro_degree(grid: &MicroGridState) -> MicroDegree {
    if grid.na {
        return MicroDegree::NotApplicable;
    }
    MicroDegree::Scored(classify(
        grid.marks
            .iter()
            .map(|m| (m.aspect_element.as_str(), m.factor_element.as_str())),
    ))
}

/// Local degree of one (aspect, factor) block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalDegree {
    pub aspect: String,
    pub factor: String,
    /// Micro-grids in the block.
    pub n: usize,
    /// N/A micro-grids in the block.
    pub m: usize,
    /// Sum of the applicable micro-grid degrees.
    pub degree_sum: f64,
    /// `None` when every micro-grid in the block is N/A.
    pub percent: Option<f64>,
}

/// Builds a local degree from the block's micro-grid degrees (`None` = N/A).
pub fn local_degree(
    aspect: impl Into<String>,
    factor: impl Into<String>,
    degrees: &[Option<f64>],
) -> LocalDegree {
    let n = degrees.len();
    let m = degrees.iter().filter(|d| d.is_none()).count();
    let degree_sum: f64 = degrees.iter().flatten().sum();
    let percent = (n > m).then(|| degree_sum * 100.0 / ((n - m) as f64 * f64::from(MAX_DEGREE)));
    LocalDegree {
        aspect: aspect.into(),
        factor: factor.into(),
        n,
        m,
        degree_sum,
        percent,
    }
}

/// Aspect (row) or factor (column) degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemiGlobalDegree {
    pub id: String,
    /// Number of defined local degrees averaged.
    pub defined: usize,
    pub percent: Option<f64>,
}

/// Mean of the defined values; `None` if there are none.
pub fn mean_defined(values: impl IntoIterator<Item = Option<f64>>) -> Option<f64> {
    let (sum, count) = values
        .into_iter()
        .flatten()
        .fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    (count > 0).then(|| sum / count as f64)
}

fn semi_global(id: &str, values: impl IntoIterator<Item = Option<f64>>) -> SemiGlobalDegree {
    let values: Vec<_> = values.into_iter().collect();
    SemiGlobalDegree {
        id: id.to_owned(),
        defined: values.iter().flatten().count(),
        percent: mean_defined(values),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlobalDegree {
    /// Mean of every defined local degree.
    pub percent: f64,
    pub mean_of_aspects: f64,
    pub mean_of_factors: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum ScoreError {
    #[error("no score: every micro-grid is N/A")]
    NoScore,
    #[error("evaluation uses taxonomy {evaluation} but scoring was given {given}")]
    WrongTaxonomy {
        evaluation: TaxonomyRef,
        given: TaxonomyRef,
    },
}

/// Global degree and its two cross-checks.
pub fn global_degree(
    local: &[LocalDegree],
    aspects: &[SemiGlobalDegree],
    factors: &[SemiGlobalDegree],
) -> Result<GlobalDegree, ScoreError> {
    let percent = mean_defined(local.iter().map(|l| l.percent)).ok_or(ScoreError::NoScore)?;
    let mean_of_aspects = mean_defined(aspects.iter().map(|a| a.percent)).ok_or(ScoreError::NoScore)?;
    let mean_of_factors = mean_defined(factors.iter().map(|f| f.percent)).ok_or(ScoreError::NoScore)?;
    Ok(GlobalDegree {
        percent,
        mean_of_aspects,
        mean_of_factors,
    })
}

/// Local matrix plus its margins and corner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Degrees {
    /// Aspect-major: all factors of the first aspect, then the next aspect.
    pub local: Vec<LocalDegree>,
    pub aspects: Vec<SemiGlobalDegree>,
    pub factors: Vec<SemiGlobalDegree>,
    pub global: GlobalDegree,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub identity_warning: Option<String>,
}

impl Degrees {
    /// Aggregates per-micro-grid degrees (`None` = N/A) over the taxonomy.
    ///
    /// Degrees are real-valued so merged (averaged) grids reuse the same path.
    pub fn aggregate(
        taxonomy: &Taxonomy,
        cell: impl Fn(&MicroGridKey) -> Option<f64>,
    ) -> Result<Self, ScoreError> {
        let mut local = Vec::with_capacity(taxonomy.aspects.len() * taxonomy.factors.len());
        for aspect in &taxonomy.aspects {
            for factor in &taxonomy.factors {
                let degrees: Vec<_> = aspect
                    .sub_aspects
                    .iter()
                    .flat_map(|sa| {
                        factor
                            .sub_factors
                            .iter()
                            .map(move |sf| MicroGridKey::new(sa.id.as_str(), sf.id.as_str()))
                    })
                    .map(|k| cell(&k))
                    .collect();
                local.push(local_degree(&aspect.id, &factor.id, &degrees));
            }
        }

        let nf = taxonomy.factors.len();
        let aspects: Vec<_> = taxonomy
            .aspects
            .iter()
            .enumerate()
            .map(|(i, a)| semi_global(&a.id, local[i * nf..(i + 1) * nf].iter().map(|l| l.percent)))
            .collect();
        let factors: Vec<_> = taxonomy
            .factors
            .iter()
            .enumerate()
            .map(|(j, f)| semi_global(&f.id, local.iter().skip(j).step_by(nf).map(|l| l.percent)))
            .collect();

        let global = global_degree(&local, &aspects, &factors)?;
        let identity_warning = identity_warning(&global);
        Ok(Self {
            local,
            aspects,
            factors,
            global,
            identity_warning,
        })
    }

    pub fn local(&self, aspect: &str, factor: &str) -> Option<&LocalDegree> {
        self.local
            .iter()
            .find(|l| l.aspect == aspect && l.factor == factor)
    }

    pub fn aspect(&self, id: &str) -> Option<&SemiGlobalDegree> {
        self.aspects.iter().find(|a| a.id == id)
    }

    pub fn factor(&self, id: &str) -> Option<&SemiGlobalDegree> {
        self.factors.iter().find(|f| f.id == id)
    }
}

fn identity_warning(g: &GlobalDegree) -> Option<String> {
    let off_a = (g.percent - g.mean_of_aspects).abs() > IDENTITY_TOLERANCE;
    let off_f = (g.percent - g.mean_of_factors).abs() > IDENTITY_TOLERANCE;
    (off_a || off_f).then(|| {
        format!(
            "N/A blocks make the means disagree: GA over defined local degrees = {:.4}, \
             mean of aspect degrees = {:.4}, mean of factor degrees = {:.4}",
            g.percent, g.mean_of_aspects, g.mean_of_factors
        )
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MicroScore {
    pub sub_aspect: String,
    pub sub_factor: String,
    pub degree: MicroDegree,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub taxonomy: TaxonomyRef,
    pub system: String,
    pub evaluator: String,
    pub mode: Mode,
    /// One entry per micro-grid, sub-aspect-major in taxonomy order.
    pub micro: Vec<MicroScore>,
    pub degrees: Degrees,
}

impl ScoreReport {
    pub fn micro_degree(&self, sub_aspect: &str, sub_factor: &str) -> Option<MicroDegree> {
        self.micro
            .iter()
            .find(|m| m.sub_aspect == sub_aspect && m.sub_factor == sub_factor)
            .map(|m| m.degree)
    }

    pub fn global(&self) -> f64 {
        self.degrees.global.percent
    }
}

/// Scores every micro-grid of `e` and aggregates.
pub fn score(e: &Evaluation, t: &Taxonomy) -> Result<ScoreReport, ScoreError> {
    if e.taxonomy != t.reference() {
        return Err(ScoreError::WrongTaxonomy {
            evaluation: e.taxonomy.clone(),
            given: t.reference(),
        });
    }
    let micro: Vec<MicroScore> = t
        .sub_aspects()
        .flat_map(|(_, sa)| {
            t.sub_factors().map(move |(_, sf)| {
                let key = MicroGridKey::new(sa.id.as_str(), sf.id.as_str());
                MicroScore {
                    degree: micro_degree(&e.micro_grid(&key)),
                    sub_aspect: key.sub_aspect,
                    sub_factor: key.sub_factor,
                }
            })
        })
        .collect();
    let degrees = Degrees::aggregate(t, |k| {
        micro
            .iter()
            .find(|m| m.sub_aspect == k.sub_aspect && m.sub_factor == k.sub_factor)
            .and_then(|m| m.degree.value())
            .map(f64::from)
    })?;
    Ok(ScoreReport {
        taxonomy: e.taxonomy.clone(),
        system: e.system.clone(),
        evaluator: e.evaluator.clone(),
        mode: e.mode,
        micro,
        degrees,
    })
}
