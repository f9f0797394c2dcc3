//! Property checks shared by the regular test suite and the acceptance runner,
//! which runs each with a larger case count.

use anameter::{
    compare, load_evaluation_with, merge, micro_degree, save_evaluation, score, Evaluation, Mark,
    MicroGridKey, MicroGridState, Mode, ScoreReport,
};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

use super::*;

pub struct Property {
    pub name: &'static str,
    pub check: fn(&mut TestRunner) -> Result<(), String>,
}

/// Runs one property with `cases` random inputs.
pub fn run(p: &Property, cases: u32) -> Result<(), String> {
    let mut runner = TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    });
    (p.check)(&mut runner)
}

pub const ALL: &[Property] = &[
    Property { name: "monotonic under added marks", check: monotonic },
    Property { name: "transpose symmetry", check: transpose },
    Property { name: "element permutation invariance", check: permutation },
    Property { name: "degrees within [0, 100]", check: bounds },
    Property { name: "global identity without N/A", check: identity },
    Property { name: "save/load round trip", check: round_trip },
    Property { name: "mark order does not change the file", check: mark_order },
    Property { name: "merge of copies equals score", check: merge_copies },
    Property { name: "merge ignores evaluator order", check: merge_order },
    Property { name: "merged global between individuals", check: merge_between },
    Property { name: "compare antisymmetry", check: antisymmetry },
    Property { name: "mutations keep invariants", check: mutations },
];

pub fn arb_micro_grid() -> impl Strategy<Value = MicroGridState> {
    prop::collection::btree_set((0u8..5, 0u8..5), 0..12).prop_map(|cells| MicroGridState {
        na: false,
        marks: cells
            .into_iter()
            .map(|(c, r)| Mark::new(format!("a{c}"), format!("f{r}")))
            .collect(),
    })
}

fn all_percents(r: &ScoreReport) -> Vec<Option<f64>> {
    let d = &r.degrees;
    d.local
        .iter()
        .map(|l| l.percent)
        .chain(d.aspects.iter().map(|a| a.percent))
        .chain(d.factors.iter().map(|f| f.percent))
        .chain([Some(d.global.percent)])
        .collect()
}

fn monotonic(runner: &mut TestRunner) -> Result<(), String> {
    runner
        .run(&(arb_micro_grid(), 0u8..5, 0u8..5), |(g, c, r)| {
            let before = micro_degree(&g).value().unwrap();
            let mut more = g.clone();
            more.marks.insert(Mark::new(format!("a{c}"), format!("f{r}")));
            prop_assert!(micro_degree(&more).value().unwrap() >= before);
            if let Some(m) = g.marks.iter().next().cloned() {
                let mut fewer = g.clone();
                fewer.marks.remove(&m);
                prop_assert!(micro_degree(&fewer).value().unwrap() <= before);
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

fn transpose(runner: &mut TestRunner) -> Result<(), String> {
    runner
        .run(&arb_micro_grid(), |g| {
            let t = MicroGridState {
                na: false,
                marks: g
                    .marks
                    .iter()
                    .map(|m| Mark::new(m.factor_element.clone(), m.aspect_element.clone()))
                    .collect(),
            };
            prop_assert_eq!(micro_degree(&g), micro_degree(&t));
            Ok(())
        })
        .map_err(|e| e.to_string())
}

fn permutation(runner: &mut TestRunner) -> Result<(), String> {
    runner
        .run(&(arb_grid(true), 0usize..5), |((t, e), shift)| {
            let p = permute_elements(&t, shift);
            match (score(&e, &t), score(&e, &p)) {
                (Ok(a), Ok(b)) => prop_assert_eq!(a, b),
                (a, b) => prop_assert_eq!(a.is_err(), b.is_err()),
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

fn bounds(runner: &mut TestRunner) -> Result<(), String> {
    runner
        .run(&arb_grid(true), |(t, e)| {
            if let Ok(r) = score(&e, &t) {
                for p in all_percents(&r).into_iter().flatten() {
                    prop_assert!((0.0..=100.0).contains(&p), "{}", p);
                }
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

fn identity(runner: &mut TestRunner) -> Result<(), String> {
    runner
        .run(&arb_grid(false), |(t, e)| {
            let r = score(&e, &t).unwrap();
            let g = &r.degrees.global;
            prop_assert!((g.percent - g.mean_of_aspects).abs() <= 1e-9);
            prop_assert!((g.percent - g.mean_of_factors).abs() <= 1e-9);
            prop_assert!(r.degrees.identity_warning.is_none());
            prop_assert_eq!(g.percent == 0.0, e.mark_count() == 0);
            let all_three = r.micro.iter().all(|m| m.degree.value() == Some(3));
            prop_assert_eq!((g.percent - 100.0).abs() < 1e-9, all_three);
            Ok(())
        })
        .map_err(|e| e.to_string())
}

fn round_trip(runner: &mut TestRunner) -> Result<(), String> {
    runner
        .run(&arb_grid(true), |(t, e)| {
            let bytes = save_evaluation(&e);
            let back = load_evaluation_with(&bytes, &t).map_err(|e| TestCaseError::fail(e.to_string()))?;
            prop_assert_eq!(&back, &e);
            prop_assert_eq!(save_evaluation(&back), bytes);
            Ok(())
        })
        .map_err(|e| e.to_string())
}

fn mark_order(runner: &mut TestRunner) -> Result<(), String> {
    let picks = prop::collection::vec(any::<(u16, u16, u16, u16)>(), 0..40);
    runner
        .run(&(arb_taxonomy(), picks), |(t, picks)| {
            let subs_a: Vec<_> = t.sub_aspects().map(|(_, s)| s).collect();
            let subs_f: Vec<_> = t.sub_factors().map(|(_, s)| s).collect();
            let marks: Vec<_> = picks
                .iter()
                .map(|&(x, y, i, j)| {
                    let sa = subs_a[x as usize % subs_a.len()];
                    let sf = subs_f[y as usize % subs_f.len()];
                    let ae = &sa.elements[i as usize % sa.elements.len()];
                    let fe = &sf.elements[j as usize % sf.elements.len()];
                    (&sa.id, &sf.id, &ae.id, &fe.id)
                })
                .collect();
            let mut forward = Evaluation::new(&t, "s", "e", Mode::Adaptability);
            for (sa, sf, ae, fe) in &marks {
                forward.set_mark(&t, sa, sf, ae, fe, true).unwrap();
            }
            let mut backward = Evaluation::new(&t, "s", "e", Mode::Adaptability);
            for (sa, sf, ae, fe) in marks.iter().rev() {
                backward.set_mark(&t, sa, sf, ae, fe, true).unwrap();
            }
            backward.created = forward.created;
            backward.updated = forward.updated;
            prop_assert_eq!(save_evaluation(&forward), save_evaluation(&backward));
            Ok(())
        })
        .map_err(|e| e.to_string())
}

fn merge_copies(runner: &mut TestRunner) -> Result<(), String> {
    runner
        .run(&(arb_grid(true), 1usize..4), |((t, e), k)| {
            let copies: Vec<_> = (0..k)
                .map(|i| {
                    let mut c = e.clone();
                    c.evaluator = format!("evaluator-{i}");
                    c
                })
                .collect();
            match (score(&e, &t), merge(&copies, &t)) {
                (Ok(r), Ok(m)) => {
                    prop_assert_eq!(&m.degrees, &r.degrees);
                    for (mm, rm) in m.micro.iter().zip(&r.micro) {
                        prop_assert_eq!(mm.mean, rm.degree.value().map(f64::from));
                    }
                }
                (r, m) => prop_assert!(r.is_err() && m.is_err()),
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

fn merge_order(runner: &mut TestRunner) -> Result<(), String> {
    runner
        .run(&(arb_taxonomy(), arb_seeds(), arb_seeds(), arb_seeds()), |(t, s1, s2, s3)| {
            let evals = [
                build_evaluation(&t, &s1, true, "a"),
                build_evaluation(&t, &s2, true, "b"),
                build_evaluation(&t, &s3, true, "c"),
            ];
            let forward = merge(&evals, &t);
            let backward = merge(&[evals[2].clone(), evals[0].clone(), evals[1].clone()], &t);
            prop_assert_eq!(forward, backward);
            Ok(())
        })
        .map_err(|e| e.to_string())
}

fn merge_between(runner: &mut TestRunner) -> Result<(), String> {
    runner
        .run(&(arb_taxonomy(), arb_seeds(), arb_seeds()), |(t, s1, s2)| {
            let a = build_evaluation(&t, &s1, false, "a");
            let b = build_evaluation(&t, &s2, false, "b");
            let (ga, gb) = (score(&a, &t).unwrap().global(), score(&b, &t).unwrap().global());
            let gm = merge(&[a, b], &t).unwrap().global();
            prop_assert!(gm >= ga.min(gb) - 1e-9 && gm <= ga.max(gb) + 1e-9);
            Ok(())
        })
        .map_err(|e| e.to_string())
}

fn antisymmetry(runner: &mut TestRunner) -> Result<(), String> {
    runner
        .run(&(arb_taxonomy(), arb_seeds(), arb_seeds()), |(t, s1, s2)| {
            let a = build_evaluation(&t, &s1, true, "a");
            let b = build_evaluation(&t, &s2, true, "b");
            if let (Ok(ra), Ok(rb)) = (score(&a, &t), score(&b, &t)) {
                let ab = compare(&ra, &rb).unwrap();
                let ba = compare(&rb, &ra).unwrap();
                prop_assert_eq!(ab.global.delta.map(|d| -d), ba.global.delta);
                for (x, y) in ab.local.iter().zip(&ba.local) {
                    prop_assert_eq!(x.delta.delta.map(|d| -d), y.delta.delta);
                    prop_assert_eq!(x.delta.left, y.delta.right);
                }
                let semi = ab.aspects.iter().zip(&ba.aspects).chain(ab.factors.iter().zip(&ba.factors));
                for (x, y) in semi {
                    prop_assert_eq!(x.delta.delta.map(|d| -d), y.delta.delta);
                }
                prop_assert_eq!(ab.micro_differences.len(), ba.micro_differences.len());
                prop_assert_eq!(ab.na_disagreements.len(), ba.na_disagreements.len());
                prop_assert!(compare(&ra, &ra).unwrap().is_identical());
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

fn mutations(runner: &mut TestRunner) -> Result<(), String> {
    let ops = prop::collection::vec((any::<bool>(), any::<u16>(), any::<u16>(), any::<bool>()), 0..60);
    runner
        .run(&(arb_taxonomy(), ops), |(t, ops)| {
            let mut e = Evaluation::new(&t, "s", "e", Mode::Adaptivity);
            let subs_a: Vec<_> = t.sub_aspects().map(|(_, s)| s).collect();
            let subs_f: Vec<_> = t.sub_factors().map(|(_, s)| s).collect();
            for (is_na, x, y, flag) in ops {
                let sa = subs_a[x as usize % subs_a.len()];
                let sf = subs_f[y as usize % subs_f.len()];
                let key = MicroGridKey::new(sa.id.as_str(), sf.id.as_str());
                if is_na {
                    let before = e.micro_grid(&key).marks.len();
                    let cleared = e.set_na(&t, &sa.id, &sf.id, flag).unwrap();
                    prop_assert_eq!(cleared.len(), if flag { before } else { 0 });
                } else {
                    let ae = &sa.elements[(x as usize / 7) % sa.elements.len()];
                    let fe = &sf.elements[(y as usize / 7) % sf.elements.len()];
                    let was_na = e.is_na(&key);
                    let before = e.clone();
                    let res = e.set_mark(&t, &sa.id, &sf.id, &ae.id, &fe.id, flag);
                    prop_assert_eq!(res.is_err(), was_na);
                    if was_na {
                        prop_assert_eq!(&e, &before);
                    }
                }
                for (_, g) in e.stored_micro_grids() {
                    prop_assert!(!(g.na && !g.marks.is_empty()));
                    prop_assert!(g.na || !g.marks.is_empty());
                }
                prop_assert!(load_evaluation_with(&save_evaluation(&e), &t).is_ok());
                if let Ok(r) = score(&e, &t) {
                    prop_assert_eq!(r.micro.len(), t.micro_grid_count());
                }
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}
