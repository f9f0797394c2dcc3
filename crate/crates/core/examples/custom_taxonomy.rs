//! Load a user-defined taxonomy, catch mistakes in it, and grade against it.
//!
//!     cargo run -p anameter --example custom_taxonomy

use anameter::{load_taxonomy, render_score, save_evaluation, score, Evaluation, Format, Mode, TaxonomyError};

const SMALL: &str = r#"{
  "id": "kiosk",
  "version": "0.1",
  "factors": [
    { "id": "user", "label": "User", "sub_factors": [
      { "id": "vision", "label": "Vision", "elements": [
        { "id": "low-vision", "label": "Low vision" },
        { "id": "colour-blindness", "label": "Colour blindness" } ] } ] }
  ],
  "aspects": [
    { "id": "presentation", "label": "Presentation", "sub_aspects": [
      { "id": "display", "label": "Display", "elements": [
        { "id": "font-size", "label": "Font size" },
        { "id": "palette", "label": "Palette" } ] } ] }
  ]
}"#;

fn main() {
    let broken = SMALL.replace("\"palette\"", "\"font-size\"");
    match load_taxonomy(broken.as_bytes()) {
        Err(TaxonomyError::Invalid(violations)) => {
            for v in violations {
                println!("rejected: {}: {}", v.path, v.message);
            }
        }
        other => panic!("expected a violation, got {other:?}"),
    }

    let t = load_taxonomy(SMALL.as_bytes()).unwrap();
    println!("\nloaded {} with {} micro-grid", t.reference(), t.micro_grid_count());

    let mut e = Evaluation::new(&t, "Ticket kiosk", "gus", Mode::Adaptability);
    e.set_mark(&t, "display", "vision", "font-size", "low-vision", true).unwrap();
    e.set_mark(&t, "display", "vision", "palette", "colour-blindness", true).unwrap();
    print!("\n{}", render_score(&score(&e, &t).unwrap(), &t, Format::Markdown, 1));
    println!("\n{}", String::from_utf8(save_evaluation(&e)).unwrap());
}
