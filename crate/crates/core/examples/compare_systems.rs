//! Compare two systems graded on the same grid.
//!
//!     cargo run -p anameter --example compare_systems

use anameter::{compare, default_taxonomy, render_comparison, score, Evaluation, Format, Mode};

fn main() {
    let t = default_taxonomy();
    let mut a = Evaluation::new(&t, "Maps v1", "carol", Mode::Adaptability);
    let mut b = Evaluation::new(&t, "Maps v2", "carol", Mode::Adaptability);

    for e in [&mut a, &mut b] {
        e.set_mark(&t, "presentation-aspects", "perceptual-motor-abilities", "text-type-size", "myopia", true)
            .unwrap();
    }
    // v2 also adapts the background and the sound.
    b.set_mark(&t, "presentation-aspects", "perceptual-motor-abilities", "background-type-colour", "myopia", true)
        .unwrap();
    b.set_mark(&t, "presentation-aspects", "perceptual-motor-abilities", "sound-type-language-volume", "hearing-impairment", true)
        .unwrap();
    b.set_na(&t, "service-behavior", "connectivity", true).unwrap();

    let (ra, rb) = (score(&a, &t).unwrap(), score(&b, &t).unwrap());
    let report = compare(&ra, &rb).unwrap();
    print!("{}", render_comparison(&report, &t, Format::Markdown, 2));

    assert!(compare(&ra, &ra).unwrap().is_identical());
}
