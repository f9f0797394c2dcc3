//! Score a complete grid and render it in every output format.
//!
//!     cargo run -p anameter --example worked_example_report

use anameter::{load_evaluation, render_score, score, Format, TaxonomyRegistry};

const GRID: &str = include_str!("../tests/fixtures/worked_example.json");

fn main() {
    let registry = TaxonomyRegistry::default();
    let eval = load_evaluation(GRID.as_bytes(), &registry).expect("valid grid");
    let taxonomy = registry.resolve(&eval.taxonomy).unwrap();
    let report = score(&eval, taxonomy).expect("scorable");

    print!("{}", render_score(&report, taxonomy, Format::Markdown, 2));
    println!("\n--- csv ---");
    print!("{}", render_score(&report, taxonomy, Format::Csv, 2));

    let g = &report.degrees.global;
    println!("\nGA unrounded:        {}", g.percent);
    println!("mean of AA columns:  {}", g.mean_of_aspects);
    println!("mean of FA rows:     {}", g.mean_of_factors);
}
