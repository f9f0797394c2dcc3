//! Characterize and quantify how an interactive system adapts.
//!
//! An evaluator fills a grid crossing the *aspects* of a system that can be
//! adapted (presentation, control, abstraction) with the *factors* it can
//! adapt to (user, platform, environment, activity). Each cell of that grid
//! is itself a small grid of elements; checked boxes are scored 0 to 3 and
//! aggregated into local, semi-global and global adaptation degrees, once
//! for adaptability (user-initiated) and once for adaptivity
//! (system-initiated).
//!
//! ```
//! use anameter::{default_taxonomy, score, Evaluation, Mode};
//!
//! let taxonomy = default_taxonomy();
//! let mut eval = Evaluation::new(&taxonomy, "GPS-Nav", "alice", Mode::Adaptability);
//! for aspect_element in ["text-type-size", "background-type-colour"] {
//!     eval.set_mark(&taxonomy, "presentation-aspects", "perceptual-motor-abilities",
//!                   aspect_element, "myopia", true).unwrap();
//! }
//! let report = score(&eval, &taxonomy).unwrap();
//! assert_eq!(report.micro_degree("presentation-aspects", "perceptual-motor-abilities"),
//!            Some(anameter::MicroDegree::Scored(2)));
//! ```

pub mod analysis;
pub mod gridmodel;
pub mod render;
pub mod scoring;
pub mod taxonomy;

pub use analysis::{compare, merge, AnalysisError, ComparisonReport, MergedEvaluation};
pub use gridmodel::{
    load_evaluation, load_evaluation_with, save_evaluation, Evaluation, GridError, LoadError, Mark,
    MicroGridKey, MicroGridState, Mode,
};
pub use render::{render_comparison, render_merged, render_score, Format};
pub use scoring::{micro_degree, score, Degrees, MicroDegree, ScoreError, ScoreReport};
pub use taxonomy::{
    default_taxonomy, load_taxonomy, save_taxonomy, validate_taxonomy, Taxonomy, TaxonomyError,
    TaxonomyRef, TaxonomyRegistry, Violation,
};
