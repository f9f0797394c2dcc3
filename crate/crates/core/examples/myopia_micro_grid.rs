//! How the marks inside one micro-grid turn into a 0-3 degree.
//!
//!     cargo run -p anameter --example myopia_micro_grid

use anameter::{default_taxonomy, Evaluation, MicroGridKey, Mode};

const SA: &str = "presentation-aspects";
const SF: &str = "perceptual-motor-abilities";

fn show(e: &Evaluation, step: &str) {
    let t = default_taxonomy();
    let g = e.micro_grid(&MicroGridKey::new(SA, SF));
    let degree = anameter::micro_degree(&g);
    let shown = degree.value().map_or("N/A".to_owned(), |d| d.to_string());
    println!("{step:<48} marks = {}, degree = {shown}", g.marks.len());
    assert!(anameter::score(e, &t).is_ok());
}

fn main() {
    let t = default_taxonomy();
    let mut e = Evaluation::new(&t, "Reader app", "alice", Mode::Adaptability);
    show(&e, "nothing checked");

    e.set_mark(&t, SA, SF, "text-type-size", "myopia", true).unwrap();
    show(&e, "text size adapts to myopia");

    e.set_mark(&t, SA, SF, "background-type-colour", "myopia", true).unwrap();
    show(&e, "background adapts to myopia too (one row)");

    e.set_mark(&t, SA, SF, "sound-type-language-volume", "hearing-impairment", true).unwrap();
    show(&e, "sound adapts to hearing impairment (two rows)");

    let cleared = e.set_na(&t, SA, SF, true).unwrap();
    show(&e, &format!("marked N/A ({} marks cleared)", cleared.len()));

    let err = e.set_mark(&t, SA, SF, "text-type-size", "myopia", true).unwrap_err();
    println!("checking a box on an N/A micro-grid: {err}");
}
