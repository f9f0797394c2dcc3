//! Walk the bundled taxonomy and print the grid's shape.
//!
//!     cargo run -p anameter --example default_taxonomy

use anameter::{default_taxonomy, validate_taxonomy};

fn main() {
    let t = default_taxonomy();
    println!("{} ({} micro-grids)", t.reference(), t.micro_grid_count());
    assert!(validate_taxonomy(&t).is_empty());

    println!("\nFactors");
    for f in &t.factors {
        println!("  {}", f.label);
        for s in &f.sub_factors {
            println!("    {:<46} {} elements", s.label, s.elements.len());
        }
    }
    println!("\nAspects");
    for a in &t.aspects {
        println!("  {}", a.label);
        for s in &a.sub_aspects {
            println!("    {:<46} {} elements", s.label, s.elements.len());
        }
    }

    let (_, pm) = t.find_sub_factor("perceptual-motor-abilities").unwrap();
    println!("\n{}:", pm.label);
    for e in &pm.elements {
        println!("  - {} ({})", e.label, e.id);
    }
}
