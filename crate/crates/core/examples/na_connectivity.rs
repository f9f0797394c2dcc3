//! N/A micro-grids drop out of the averages instead of counting as zero.
//!
//!     cargo run -p anameter --example na_connectivity

use anameter::{default_taxonomy, score, Evaluation, Mode};

fn main() {
    let t = default_taxonomy();
    let mut e = Evaluation::new(&t, "Offline kiosk", "bob", Mode::Adaptivity);
    e.set_mark(&t, "presentation-aspects", "input-output-device", "text-type-size", "placeholder-input-output-device-1", true)
        .unwrap();
    e.set_mark(&t, "technical-choice-of-interaction", "software-environment", "placeholder-technical-choice-of-interaction-2", "placeholder-software-environment-1", true)
        .unwrap();

    let before = score(&e, &t).unwrap();
    let la = before.degrees.local("presentation", "platform").unwrap();
    println!("connectivity answered 'no adaptation':");
    println!("  LA′ presentation/platform = {:.2} % over n = {}, m = {}", la.percent.unwrap(), la.n, la.m);
    println!("  GA′ = {:.2} %", before.global());

    // The kiosk has no network; connectivity cannot matter for any aspect.
    for (_, sa) in t.sub_aspects() {
        e.set_na(&t, &sa.id, "connectivity", true).unwrap();
    }
    let after = score(&e, &t).unwrap();
    let la = after.degrees.local("presentation", "platform").unwrap();
    println!("connectivity marked N/A everywhere:");
    println!("  LA′ presentation/platform = {:.2} % over n = {}, m = {}", la.percent.unwrap(), la.n, la.m);
    println!("  GA′ = {:.2} %", after.global());
}
