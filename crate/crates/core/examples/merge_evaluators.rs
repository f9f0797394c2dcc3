//! Average independent evaluators' grids of one system.
//!
//!     cargo run -p anameter --example merge_evaluators

use anameter::{default_taxonomy, merge, render_merged, score, Evaluation, Format, Mode};

const SA: &str = "presentation-aspects";
const SF: &str = "perceptual-motor-abilities";

fn main() {
    let t = default_taxonomy();
    let mut dana = Evaluation::new(&t, "Tutor", "dana", Mode::Adaptivity);
    let mut eli = Evaluation::new(&t, "Tutor", "eli", Mode::Adaptivity);
    let mut fay = Evaluation::new(&t, "Tutor", "fay", Mode::Adaptivity);

    dana.set_mark(&t, SA, SF, "text-type-size", "myopia", true).unwrap();
    eli.set_mark(&t, SA, SF, "text-type-size", "myopia", true).unwrap();
    eli.set_mark(&t, SA, SF, "images-type-size", "hearing-impairment", true).unwrap();
    // Fay thinks the micro-grid does not apply; she is left out of its mean.
    fay.set_na(&t, SA, SF, true).unwrap();

    for e in [&dana, &eli, &fay] {
        println!("{:<5} GA′ = {:.2} %", e.evaluator, score(e, &t).unwrap().global());
    }
    let merged = merge(&[dana, eli, fay], &t).unwrap();
    println!(
        "mean degree of {SA} x {SF}: {:?}\n",
        merged.mean_degree(SA, SF)
    );
    print!("{}", render_merged(&merged, &t, Format::Markdown, 2));
}
