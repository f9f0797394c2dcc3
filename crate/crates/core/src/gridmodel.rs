//! One evaluator's filled characterization grid for one system and one mode.
//!
//! Storage is sparse: a micro-grid without an entry is "no checked boxes,
//! not N/A". Mutators keep that normal form, so two evaluations with the
//! same content always serialize to the same bytes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Duration, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::taxonomy::{Taxonomy, TaxonomyRef, TaxonomyRegistry};

/// Who initiates the adaptation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Requested by the user.
    Adaptability,
    /// Initiated automatically by the system.
    Adaptivity,
}

impl Mode {
    /// Degree names in adaptivity mode carry a prime: `GA′`, `LA′`.
    pub fn prime(self) -> &'static str {
        match self {
            Mode::Adaptability => "",
            Mode::Adaptivity => "′",
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Adaptability => "adaptability",
            Mode::Adaptivity => "adaptivity",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "adaptability" => Ok(Mode::Adaptability),
            "adaptivity" => Ok(Mode::Adaptivity),
            other => Err(format!(
                "unknown mode {other:?} (expected \"adaptability\" or \"adaptivity\")"
            )),
        }
    }
}

/// Identifies a micro-grid: one sub-aspect crossed with one sub-factor.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MicroGridKey {
    pub sub_aspect: String,
    pub sub_factor: String,
}

impl MicroGridKey {
    pub fn new(sub_aspect: impl Into<String>, sub_factor: impl Into<String>) -> Self {
        Self {
            sub_aspect: sub_aspect.into(),
            sub_factor: sub_factor.into(),
        }
    }
}

impl fmt::Display for MicroGridKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.sub_aspect, self.sub_factor)
    }
}

/// A checked cell: this aspect element adapts to this factor element.
///
/// Columns are aspect elements, rows are factor elements.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Mark {
    pub aspect_element: String,
    pub factor_element: String,
}

impl Mark {
    pub fn new(aspect_element: impl Into<String>, factor_element: impl Into<String>) -> Self {
        Self {
            aspect_element: aspect_element.into(),
            factor_element: factor_element.into(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MicroGridState {
    pub na: bool,
    pub marks: BTreeSet<Mark>,
}

impl MicroGridState {
    fn is_blank(&self) -> bool {
        !self.na && self.marks.is_empty()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GridError {
    #[error("unknown sub-aspect {0:?}")]
    UnknownSubAspect(String),
    #[error("unknown sub-factor {0:?}")]
    UnknownSubFactor(String),
    #[error("aspect element {element:?} does not belong to sub-aspect {sub_aspect:?}")]
    UnknownAspectElement { sub_aspect: String, element: String },
    #[error("factor element {element:?} does not belong to sub-factor {sub_factor:?}")]
    UnknownFactorElement { sub_factor: String, element: String },
    #[error("micro-grid {0} is marked N/A; clear N/A before checking cells")]
    MicroGridIsNa(MicroGridKey),
    #[error("evaluation uses taxonomy {found} but {expected} was supplied")]
    WrongTaxonomy {
        expected: TaxonomyRef,
        found: TaxonomyRef,
    },
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("malformed evaluation document: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("unknown taxonomy {0}")]
    UnknownTaxonomy(TaxonomyRef),
    #[error("evaluation does not match taxonomy {taxonomy}; dangling ids: {}", dangling.join(", "))]
    TaxonomyMismatch {
        taxonomy: TaxonomyRef,
        dangling: Vec<String>,
    },
    #[error("invalid evaluation: {}", .0.join("; "))]
    Invalid(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evaluation {
    pub taxonomy: TaxonomyRef,
    pub system: String,
    pub evaluator: String,
    pub mode: Mode,
    pub created: DateTime<Utc>,
    pub updated: DateTime<Utc>,
    micro_grids: BTreeMap<MicroGridKey, MicroGridState>,
}

impl Evaluation {
    /// An empty grid: every micro-grid unchecked and applicable.
    pub fn new(
        taxonomy: &Taxonomy,
        system: impl Into<String>,
        evaluator: impl Into<String>,
        mode: Mode,
    ) -> Self {
        let now = Utc::now();
        Self {
            taxonomy: taxonomy.reference(),
            system: system.into(),
            evaluator: evaluator.into(),
            mode,
            created: now,
            updated: now,
            micro_grids: BTreeMap::new(),
        }
    }

    /// State of one micro-grid; absent entries read as blank.
    pub fn micro_grid(&self, key: &MicroGridKey) -> MicroGridState {
        self.micro_grids.get(key).cloned().unwrap_or_default()
    }

    /// Stored (non-blank) micro-grids, in key order.
    pub fn stored_micro_grids(&self) -> impl Iterator<Item = (&MicroGridKey, &MicroGridState)> {
        self.micro_grids.iter()
    }

    pub fn is_na(&self, key: &MicroGridKey) -> bool {
        self.micro_grids.get(key).is_some_and(|g| g.na)
    }

    pub fn mark_count(&self) -> usize {
        self.micro_grids.values().map(|g| g.marks.len()).sum()
    }

    /// True when both evaluations hold the same marks and N/A flags.
    pub fn same_grid(&self, other: &Evaluation) -> bool {
        self.micro_grids == other.micro_grids
    }

    /// Checks or unchecks one cell. On error the evaluation is unchanged.
    pub fn set_mark(
        &mut self,
        taxonomy: &Taxonomy,
        sub_aspect: &str,
        sub_factor: &str,
        aspect_element: &str,
        factor_element: &str,
        checked: bool,
    ) -> Result<(), GridError> {
        let key = self.resolve(taxonomy, sub_aspect, sub_factor)?;
        let (_, sa) = taxonomy.find_sub_aspect(sub_aspect).expect("resolved");
        let (_, sf) = taxonomy.find_sub_factor(sub_factor).expect("resolved");
        if !sa.has_element(aspect_element) {
            return Err(GridError::UnknownAspectElement {
                sub_aspect: sub_aspect.to_owned(),
                element: aspect_element.to_owned(),
            });
        }
        if !sf.has_element(factor_element) {
            return Err(GridError::UnknownFactorElement {
                sub_factor: sub_factor.to_owned(),
                element: factor_element.to_owned(),
            });
        }
        if self.is_na(&key) {
            return Err(GridError::MicroGridIsNa(key));
        }

        let mark = Mark::new(aspect_element, factor_element);
        let grid = self.micro_grids.entry(key.clone()).or_default();
        if checked {
            grid.marks.insert(mark);
        } else {
            grid.marks.remove(&mark);
        }
        self.normalize(&key);
        self.touch();
        Ok(())
    }

    /// Sets the N/A flag of a micro-grid. Flagging N/A clears the grid's
    /// marks; the cleared marks are returned so a caller can offer undo.
    pub fn set_na(
        &mut self,
        taxonomy: &Taxonomy,
        sub_aspect: &str,
        sub_factor: &str,
        na: bool,
    ) -> Result<Vec<Mark>, GridError> {
        let key = self.resolve(taxonomy, sub_aspect, sub_factor)?;
        let grid = self.micro_grids.entry(key.clone()).or_default();
        let cleared = if na {
            std::mem::take(&mut grid.marks).into_iter().collect()
        } else {
            Vec::new()
        };
        grid.na = na;
        self.normalize(&key);
        self.touch();
        Ok(cleared)
    }

    fn resolve(
        &self,
        taxonomy: &Taxonomy,
        sub_aspect: &str,
        sub_factor: &str,
    ) -> Result<MicroGridKey, GridError> {
        if taxonomy.reference() != self.taxonomy {
            return Err(GridError::WrongTaxonomy {
                expected: self.taxonomy.clone(),
                found: taxonomy.reference(),
            });
        }
        if taxonomy.find_sub_aspect(sub_aspect).is_none() {
            return Err(GridError::UnknownSubAspect(sub_aspect.to_owned()));
        }
        if taxonomy.find_sub_factor(sub_factor).is_none() {
            return Err(GridError::UnknownSubFactor(sub_factor.to_owned()));
        }
        Ok(MicroGridKey::new(sub_aspect, sub_factor))
    }

    fn normalize(&mut self, key: &MicroGridKey) {
        if self.micro_grids.get(key).is_some_and(MicroGridState::is_blank) {
            self.micro_grids.remove(key);
        }
    }

    // strictly increasing even when the clock has not moved
    fn touch(&mut self) {
        let now = Utc::now();
        self.updated = if now > self.updated {
            now
        } else {
            self.updated + Duration::microseconds(1)
        };
    }
}

// ---- document format ----

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EvaluationDoc {
    taxonomy: TaxonomyRef,
    system: String,
    evaluator: String,
    mode: Mode,
    created: DateTime<Utc>,
    updated: DateTime<Utc>,
    micro_grids: Vec<MicroGridDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MicroGridDoc {
    sub_aspect: String,
    sub_factor: String,
    #[serde(default)]
    na: bool,
    #[serde(default)]
    marks: Vec<Mark>,
}

impl From<&Evaluation> for EvaluationDoc {
    fn from(e: &Evaluation) -> Self {
        EvaluationDoc {
            taxonomy: e.taxonomy.clone(),
            system: e.system.clone(),
            evaluator: e.evaluator.clone(),
            mode: e.mode,
            created: e.created,
            updated: e.updated,
            micro_grids: e
                .micro_grids
                .iter()
                .map(|(k, g)| MicroGridDoc {
                    sub_aspect: k.sub_aspect.clone(),
                    sub_factor: k.sub_factor.clone(),
                    na: g.na,
                    marks: g.marks.iter().cloned().collect(),
                })
                .collect(),
        }
    }
}

/// Serializes in the document format. Deserializing needs a taxonomy to
/// check against, so it goes through [`load_evaluation`] instead.
impl Serialize for Evaluation {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        EvaluationDoc::from(self).serialize(serializer)
    }
}

/// Serializes an evaluation. Output is deterministic: micro-grids and marks
/// are emitted in sorted order.
pub fn save_evaluation(e: &Evaluation) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(e).expect("evaluation serializes");
    out.push(b'\n');
    out
}

/// Parses the document format against a taxonomy that is already known.
pub fn evaluation_from_value(
    value: serde_json::Value,
    taxonomy: &Taxonomy,
) -> Result<Evaluation, LoadError> {
    let doc: EvaluationDoc = serde_json::from_value(value)?;
    if doc.taxonomy != taxonomy.reference() {
        return Err(LoadError::UnknownTaxonomy(doc.taxonomy));
    }
    evaluation_from_doc(doc, taxonomy)
}

/// Parses an evaluation and checks it against its taxonomy in `registry`.
pub fn load_evaluation(source: &[u8], registry: &TaxonomyRegistry) -> Result<Evaluation, LoadError> {
    let doc: EvaluationDoc = serde_json::from_slice(source)?;
    let taxonomy = registry
        .resolve(&doc.taxonomy)
        .ok_or_else(|| LoadError::UnknownTaxonomy(doc.taxonomy.clone()))?;
    evaluation_from_doc(doc, taxonomy)
}

/// Parses an evaluation against one specific taxonomy.
pub fn load_evaluation_with(source: &[u8], taxonomy: &Taxonomy) -> Result<Evaluation, LoadError> {
    let doc: EvaluationDoc = serde_json::from_slice(source)?;
    if doc.taxonomy != taxonomy.reference() {
        return Err(LoadError::UnknownTaxonomy(doc.taxonomy));
    }
    evaluation_from_doc(doc, taxonomy)
}

fn evaluation_from_doc(doc: EvaluationDoc, taxonomy: &Taxonomy) -> Result<Evaluation, LoadError> {
    let mut dangling = Vec::new();
    let mut invalid = Vec::new();
    let mut micro_grids = BTreeMap::new();
    let mut seen = BTreeSet::new();

    for (i, g) in doc.micro_grids.into_iter().enumerate() {
        let sa = taxonomy.find_sub_aspect(&g.sub_aspect).map(|(_, s)| s);
        let sf = taxonomy.find_sub_factor(&g.sub_factor).map(|(_, s)| s);
        if sa.is_none() {
            dangling.push(format!("micro_grids[{i}].sub_aspect {:?}", g.sub_aspect));
        }
        if sf.is_none() {
            dangling.push(format!("micro_grids[{i}].sub_factor {:?}", g.sub_factor));
        }
        if g.na && !g.marks.is_empty() {
            invalid.push(format!(
                "micro_grids[{i}] ({}/{}) is N/A but holds {} mark(s)",
                g.sub_aspect,
                g.sub_factor,
                g.marks.len()
            ));
        }
        let mut marks = BTreeSet::new();
        for (j, m) in g.marks.into_iter().enumerate() {
            if let Some(sa) = sa {
                if !sa.has_element(&m.aspect_element) {
                    dangling.push(format!(
                        "micro_grids[{i}].marks[{j}].aspect_element {:?}",
                        m.aspect_element
                    ));
                }
            }
            if let Some(sf) = sf {
                if !sf.has_element(&m.factor_element) {
                    dangling.push(format!(
                        "micro_grids[{i}].marks[{j}].factor_element {:?}",
                        m.factor_element
                    ));
                }
            }
            if !marks.insert(m) {
                invalid.push(format!("micro_grids[{i}].marks[{j}] is a duplicate"));
            }
        }
        let key = MicroGridKey::new(g.sub_aspect, g.sub_factor);
        let state = MicroGridState { na: g.na, marks };
        if !seen.insert(key.clone()) {
            invalid.push(format!("micro_grids[{i}] repeats micro-grid {key}"));
        } else if !state.is_blank() {
            micro_grids.insert(key, state);
        }
    }

    if !dangling.is_empty() {
        return Err(LoadError::TaxonomyMismatch {
            taxonomy: taxonomy.reference(),
            dangling,
        });
    }
    if !invalid.is_empty() {
        return Err(LoadError::Invalid(invalid));
    }
    Ok(Evaluation {
        taxonomy: doc.taxonomy,
        system: doc.system,
        evaluator: doc.evaluator,
        mode: doc.mode,
        created: doc.created,
        updated: doc.updated,
        micro_grids,
    })
}
