//! The two-sided hierarchy that gives every characterization grid its shape.
//!
//! Factors (what the system adapts *to*) are split into sub-factors, and
//! aspects (what *is* adapted) into sub-aspects. Both leaf levels carry the
//! elements that label the rows and columns of each micro-grid. Documents are
//! JSON; ordering is significant and preserved everywhere.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

const DEFAULT_V1_0: &str = include_str!("../data/anameter-v1.0.json");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Taxonomy {
    pub id: String,
    pub version: String,
    pub factors: Vec<Factor>,
    pub aspects: Vec<Aspect>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Factor {
    pub id: String,
    pub label: String,
    pub sub_factors: Vec<SubFactor>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubFactor {
    pub id: String,
    pub label: String,
    pub elements: Vec<Element>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Aspect {
    pub id: String,
    pub label: String,
    pub sub_aspects: Vec<SubAspect>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubAspect {
    pub id: String,
    pub label: String,
    pub elements: Vec<Element>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Element {
    pub id: String,
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    /// Link or citation to a system showing this kind of adaptation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub example_ref: Option<String>,
}

/// `id@version`, the key evaluations use to name their taxonomy.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaxonomyRef {
    pub id: String,
    pub version: String,
}

impl fmt::Display for TaxonomyRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.id, self.version)
    }
}

/// A single broken invariant, located by a JSON-path-like string.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub path: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, Error)]
pub enum TaxonomyError {
    #[error("malformed taxonomy document: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid taxonomy ({} violation(s)): {}", .0.len(), join_violations(.0))]
    Invalid(Vec<Violation>),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

/// Parses and validates a taxonomy document.
pub fn load_taxonomy(source: &[u8]) -> Result<Taxonomy, TaxonomyError> {
    let taxonomy: Taxonomy = serde_json::from_slice(source)?;
    let violations = validate_taxonomy(&taxonomy);
    if violations.is_empty() {
        Ok(taxonomy)
    } else {
        Err(TaxonomyError::Invalid(violations))
    }
}

/// Serializes a taxonomy as pretty-printed JSON with a trailing newline.
pub fn save_taxonomy(taxonomy: &Taxonomy) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(taxonomy).expect("taxonomy serializes");
    out.push(b'\n');
    out
}

/// The bundled v1.0 grid: 4 factors / 16 sub-factors by 3 aspects / 6 sub-aspects.
///
/// Elements are filled in where the v1.0 grid enumerates them (the
/// perceptual/motor factor elements and the presentation aspect elements);
/// every other sub-category carries `placeholder-` elements meant to be
/// replaced by a user-supplied document.
pub fn default_taxonomy() -> Taxonomy {
    load_taxonomy(DEFAULT_V1_0.as_bytes()).expect("bundled taxonomy is valid")
}

/// Returns every invariant violation; empty means the taxonomy is valid.
pub fn validate_taxonomy(t: &Taxonomy) -> Vec<Violation> {
    let mut v = Validator::default();
    v.check_id("id", &t.id);
    if t.version.trim().is_empty() {
        v.push("version", "version must not be empty");
    }
    if t.factors.is_empty() {
        v.push("factors", "at least one factor is required");
    }
    if t.aspects.is_empty() {
        v.push("aspects", "at least one aspect is required");
    }
    // the taxonomy's own id lives in a different namespace from its nodes
    v.seen.clear();

    for (fi, factor) in t.factors.iter().enumerate() {
        let fp = format!("factors[{fi}]");
        v.check_node(&fp, &factor.id);
        if factor.sub_factors.is_empty() {
            v.push(format!("{fp}.sub_factors"), "at least one sub-factor is required");
        }
        for (si, sub) in factor.sub_factors.iter().enumerate() {
            let sp = format!("{fp}.sub_factors[{si}]");
            v.check_node(&sp, &sub.id);
            v.check_elements(&sp, &sub.elements);
        }
    }
    for (ai, aspect) in t.aspects.iter().enumerate() {
        let ap = format!("aspects[{ai}]");
        v.check_node(&ap, &aspect.id);
        if aspect.sub_aspects.is_empty() {
            v.push(format!("{ap}.sub_aspects"), "at least one sub-aspect is required");
        }
        for (si, sub) in aspect.sub_aspects.iter().enumerate() {
            let sp = format!("{ap}.sub_aspects[{si}]");
            v.check_node(&sp, &sub.id);
            v.check_elements(&sp, &sub.elements);
        }
    }
    v.violations
}

#[derive(Default)]
struct Validator {
    violations: Vec<Violation>,
    seen: HashMap<String, String>,
}

impl Validator {
    fn push(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.violations.push(Violation {
            path: path.into(),
            message: message.into(),
        });
    }

    fn check_id(&mut self, path: &str, id: &str) -> bool {
        if id.is_empty() {
            self.push(path, "identifier must not be empty");
            false
        } else if !is_slug(id) {
            self.push(path, format!("identifier {id:?} is not a lowercase-kebab slug"));
            false
        } else {
            true
        }
    }

    fn check_node(&mut self, node_path: &str, id: &str) {
        let path = format!("{node_path}.id");
        if !self.check_id(&path, id) {
            return;
        }
        match self.seen.get(id) {
            Some(first) => {
                let msg = format!("duplicate identifier {id:?} (first defined at {first})");
                self.push(path, msg);
            }
            None => {
                self.seen.insert(id.to_owned(), path);
            }
        }
    }

    fn check_elements(&mut self, parent: &str, elements: &[Element]) {
        if elements.is_empty() {
            self.push(format!("{parent}.elements"), "at least one element is required");
        }
        for (ei, e) in elements.iter().enumerate() {
            self.check_node(&format!("{parent}.elements[{ei}]"), &e.id);
        }
    }
}

/// Lowercase ASCII letters and digits in dash-separated runs.
pub fn is_slug(s: &str) -> bool {
    !s.is_empty()
        && s.split('-').all(|part| {
            !part.is_empty() && part.bytes().all(|b| b.is_ascii_lowercase() || b.is_ascii_digit())
        })
}

/// Turns free text into a slug: `"GPS-Nav"` becomes `"gps-nav"`.
pub fn slugify(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars().flat_map(char::to_lowercase) {
        if c.is_ascii_alphanumeric() {
            out.push(c);
        } else if !out.is_empty() && !out.ends_with('-') {
            out.push('-');
        }
    }
    while out.ends_with('-') {
        out.pop();
    }
    out
}

/// Where a sub-aspect or sub-factor sits in the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Position {
    /// Index of the parent aspect or factor.
    pub parent: usize,
    /// Index of the sub-node within its parent.
    pub child: usize,
}

impl Taxonomy {
    pub fn reference(&self) -> TaxonomyRef {
        TaxonomyRef {
            id: self.id.clone(),
            version: self.version.clone(),
        }
    }

    pub fn sub_factors(&self) -> impl Iterator<Item = (&Factor, &SubFactor)> {
        self.factors
            .iter()
            .flat_map(|f| f.sub_factors.iter().map(move |s| (f, s)))
    }

    pub fn sub_aspects(&self) -> impl Iterator<Item = (&Aspect, &SubAspect)> {
        self.aspects
            .iter()
            .flat_map(|a| a.sub_aspects.iter().map(move |s| (a, s)))
    }

    pub fn find_sub_factor(&self, id: &str) -> Option<(Position, &SubFactor)> {
        self.factors.iter().enumerate().find_map(|(fi, f)| {
            f.sub_factors
                .iter()
                .position(|s| s.id == id)
                .map(|si| (Position { parent: fi, child: si }, &f.sub_factors[si]))
        })
    }

    pub fn find_sub_aspect(&self, id: &str) -> Option<(Position, &SubAspect)> {
        self.aspects.iter().enumerate().find_map(|(ai, a)| {
            a.sub_aspects
                .iter()
                .position(|s| s.id == id)
                .map(|si| (Position { parent: ai, child: si }, &a.sub_aspects[si]))
        })
    }

    /// Number of micro-grids: total sub-aspects times total sub-factors.
    pub fn micro_grid_count(&self) -> usize {
        self.sub_aspects().count() * self.sub_factors().count()
    }

    pub fn element_count(&self) -> (usize, usize) {
        let factor = self.sub_factors().map(|(_, s)| s.elements.len()).sum();
        let aspect = self.sub_aspects().map(|(_, s)| s.elements.len()).sum();
        (factor, aspect)
    }
}

impl SubFactor {
    pub fn has_element(&self, id: &str) -> bool {
        self.elements.iter().any(|e| e.id == id)
    }
}

impl SubAspect {
    pub fn has_element(&self, id: &str) -> bool {
        self.elements.iter().any(|e| e.id == id)
    }
}

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("unknown taxonomy {0}")]
    Unknown(String),
    #[error("taxonomy {0} is already registered")]
    Duplicate(TaxonomyRef),
}

/// The set of taxonomies evaluations can be resolved against.
#[derive(Debug, Clone)]
pub struct TaxonomyRegistry {
    taxonomies: Vec<Taxonomy>,
}

impl Default for TaxonomyRegistry {
    /// A registry holding only the bundled v1.0 taxonomy.
    fn default() -> Self {
        Self {
            taxonomies: vec![default_taxonomy()],
        }
    }
}

impl TaxonomyRegistry {
    pub fn empty() -> Self {
        Self {
            taxonomies: Vec::new(),
        }
    }

    pub fn insert(&mut self, t: Taxonomy) -> Result<(), RegistryError> {
        if self.get(&t.id, &t.version).is_some() {
            return Err(RegistryError::Duplicate(t.reference()));
        }
        self.taxonomies.push(t);
        Ok(())
    }

    pub fn get(&self, id: &str, version: &str) -> Option<&Taxonomy> {
        self.taxonomies
            .iter()
            .find(|t| t.id == id && t.version == version)
    }

    pub fn resolve(&self, r: &TaxonomyRef) -> Option<&Taxonomy> {
        self.get(&r.id, &r.version)
    }

    /// Looks up `id@version`, or a bare `id` (the first registered version wins).
    pub fn lookup(&self, spec: &str) -> Result<&Taxonomy, RegistryError> {
        let found = match spec.split_once('@') {
            Some((id, version)) => self.get(id, version),
            None => self.taxonomies.iter().find(|t| t.id == spec),
        };
        found.ok_or_else(|| RegistryError::Unknown(spec.to_owned()))
    }

    pub fn iter(&self) -> impl Iterator<Item = &Taxonomy> {
        self.taxonomies.iter()
    }
}
