//! Shared test support: fixtures, random grids, and the brute-force degree oracle.
//! Also pulled into the cli crate's acceptance suite through `#[path]`.
#![allow(dead_code)]

use anameter::taxonomy::{Aspect, Element, Factor, SubAspect, SubFactor};
use anameter::{load_evaluation, Evaluation, Mark, MicroGridState, Mode, Taxonomy, TaxonomyRegistry};
use proptest::prelude::*;

pub mod props;

pub const WORKED_JSON: &str = include_str!(concat!(
    env!("CARGO_MANIFEST_DIR"),
    "/../core/tests/fixtures/worked_example.json"
));

pub fn worked_example() -> Evaluation {
    load_evaluation(WORKED_JSON.as_bytes(), &TaxonomyRegistry::default()).expect("fixture loads")
}

/// Reference local degrees, rows = factors (user, platform, environment,
/// activity), columns = aspects (presentation, control, abstraction).
pub const WORKED_LA: [[f64; 3]; 4] = [
    [33.33, 37.5, 25.0],
    [33.33, 33.33, 16.67],
    [8.33, 4.17, 0.0],
    [8.33, 33.33, 37.5],
];
pub const WORKED_AA: [f64; 3] = [20.83, 27.08, 19.79];
pub const WORKED_FA: [f64; 4] = [31.94, 27.78, 4.17, 26.39];
/// Corner value quoted alongside the reference degrees; it is the abstraction degree
/// copied, not the mean of the margins.
pub const QUOTED_CORNER: f64 = 19.79;

/// Independent Table 1 oracle over a `rows x cols` bitmask, bit `r * cols + c`.
pub fn oracle_degree(mask: u32, rows: u32, cols: u32) -> u8 {
    let count = mask.count_ones();
    if count == 0 {
        return 0;
    }
    if count == 1 {
        return 1;
    }
    let row_mask = |r: u32| ((1u32 << cols) - 1) << (r * cols);
    let col_mask = |c: u32| (0..rows).fold(0u32, |m, r| m | (1 << (r * cols + c)));
    let one_row = (0..rows).any(|r| mask & !row_mask(r) == 0);
    let one_col = (0..cols).any(|c| mask & !col_mask(c) == 0);
    if one_row || one_col {
        2
    } else {
        3
    }
}

/// The micro-grid whose marks are the set bits of `mask`.
pub fn grid_from_mask(mask: u32, rows: u32, cols: u32) -> MicroGridState {
    let marks = (0..rows * cols)
        .filter(|b| mask & (1 << b) != 0)
        .map(|b| Mark::new(format!("col{}", b % cols), format!("row{}", b / cols)))
        .collect();
    MicroGridState { na: false, marks }
}

fn element(prefix: &str, i: usize) -> Element {
    Element {
        id: format!("{prefix}-e{i}"),
        label: format!("{prefix} element {i}"),
        description: None,
        example_ref: None,
    }
}

/// Random taxonomies: 1-3 factors and aspects, 1-3 sub-nodes each, 1-4 elements.
pub fn arb_taxonomy() -> impl Strategy<Value = Taxonomy> {
    let shape = || prop::collection::vec(prop::collection::vec(1usize..=4, 1..=3), 1..=3);
    (shape(), shape()).prop_map(|(fs, asp)| Taxonomy {
        id: "random".into(),
        version: "1".into(),
        factors: fs
            .iter()
            .enumerate()
            .map(|(fi, subs)| Factor {
                id: format!("f{fi}"),
                label: format!("Factor {fi}"),
                sub_factors: subs
                    .iter()
                    .enumerate()
                    .map(|(si, &n)| {
                        let id = format!("f{fi}-s{si}");
                        SubFactor {
                            elements: (0..n).map(|i| element(&id, i)).collect(),
                            label: id.clone(),
                            id,
                        }
                    })
                    .collect(),
            })
            .collect(),
        aspects: asp
            .iter()
            .enumerate()
            .map(|(ai, subs)| Aspect {
                id: format!("a{ai}"),
                label: format!("Aspect {ai}"),
                sub_aspects: subs
                    .iter()
                    .enumerate()
                    .map(|(si, &n)| {
                        let id = format!("a{ai}-s{si}");
                        SubAspect {
                            elements: (0..n).map(|i| element(&id, i)).collect(),
                            label: id.clone(),
                            id,
                        }
                    })
                    .collect(),
            })
            .collect(),
    })
}

/// Per micro-grid: `kind` picks N/A (0, when allowed), blank (1-3) or
/// marked (4-9), and `bits` chooses which cells are checked.
pub type GridSeed = Vec<(u8, u32)>;

pub fn build_evaluation(t: &Taxonomy, seeds: &[(u8, u32)], allow_na: bool, evaluator: &str) -> Evaluation {
    let mut e = Evaluation::new(t, "Random system", evaluator, Mode::Adaptability);
    let keys: Vec<_> = t
        .sub_aspects()
        .flat_map(|(_, sa)| t.sub_factors().map(move |(_, sf)| (sa, sf)))
        .collect();
    for ((sa, sf), &(kind, bits)) in keys.iter().zip(seeds.iter().cycle()) {
        if kind == 0 && allow_na {
            e.set_na(t, &sa.id, &sf.id, true).unwrap();
            continue;
        }
        if kind < 4 {
            continue;
        }
        let cells = sa.elements.len() * sf.elements.len();
        for i in 0..cells.min(32) {
            if bits & (1 << i) != 0 {
                let ae = &sa.elements[i % sa.elements.len()];
                let fe = &sf.elements[i / sa.elements.len()];
                e.set_mark(t, &sa.id, &sf.id, &ae.id, &fe.id, true).unwrap();
            }
        }
    }
    e
}

pub fn arb_seeds() -> impl Strategy<Value = GridSeed> {
    prop::collection::vec((0u8..10, any::<u32>()), 1..=96)
}

/// A random taxonomy (or the bundled one) with a random grid on it.
pub fn arb_grid(allow_na: bool) -> impl Strategy<Value = (Taxonomy, Evaluation)> {
    let taxonomy = prop_oneof![Just(anameter::default_taxonomy()), arb_taxonomy()];
    (taxonomy, arb_seeds()).prop_map(move |(t, seeds)| {
        let e = build_evaluation(&t, &seeds, allow_na, "alice");
        (t, e)
    })
}

/// Reverses the element order inside every sub-factor and sub-aspect and
/// rotates by `shift`.
pub fn permute_elements(t: &Taxonomy, shift: usize) -> Taxonomy {
    let mut p = t.clone();
    for f in &mut p.factors {
        for s in &mut f.sub_factors {
            s.elements.reverse();
            let n = s.elements.len();
            s.elements.rotate_left(shift % n);
        }
    }
    for a in &mut p.aspects {
        for s in &mut a.sub_aspects {
            s.elements.reverse();
            let n = s.elements.len();
            s.elements.rotate_left(shift % n);
        }
    }
    p
}

pub fn without_connectivity(t: &Taxonomy) -> Taxonomy {
    let mut r = t.clone();
    r.version = "1.0-without-connectivity".into();
    for f in &mut r.factors {
        f.sub_factors.retain(|s| s.id != "connectivity");
    }
    r
}

/// Marks every connectivity micro-grid N/A in `full`, and replays the rest
/// of the grid onto the restricted taxonomy.
pub fn connectivity_na_pair(full_t: &Taxonomy, e: &Evaluation) -> (Evaluation, Taxonomy, Evaluation) {
    let mut full = e.clone();
    for (_, sa) in full_t.sub_aspects() {
        full.set_na(full_t, &sa.id, "connectivity", true).unwrap();
    }
    let small_t = without_connectivity(full_t);
    let mut small = Evaluation::new(&small_t, &e.system, &e.evaluator, e.mode);
    for (key, g) in full.stored_micro_grids() {
        if key.sub_factor == "connectivity" {
            continue;
        }
        if g.na {
            small.set_na(&small_t, &key.sub_aspect, &key.sub_factor, true).unwrap();
        }
        for m in &g.marks {
            small
                .set_mark(&small_t, &key.sub_aspect, &key.sub_factor, &m.aspect_element, &m.factor_element, true)
                .unwrap();
        }
    }
    (full, small_t, small)
}
