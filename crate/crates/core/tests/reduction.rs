mod support;

use castcalc::reduce::{eval, run_exact, step, Frame};
use castcalc::typecheck::check_core;
use castcalc::{is_value, Ground, Outcome, Term};
use proptest::prelude::*;
use support::*;

const STEPS_PER_TERM: usize = 4;

#[test]
fn step_agrees_with_decomposition_on_the_corpus() {
    let mut checked = 0;
    for (ann, _) in typed_corpus(10_000) {
        assert!(ann.size() <= 12);
        let mut m = ann.erase();
        for _ in 0..STEPS_PER_TERM {
            let s = step(&m);
            assert_eq!(s, step(&m));
            let ds = decompositions(&m);
            if is_value(&m) || m.is_blame() {
                assert!(s.is_none(), "halted term steps: {m:?}");
                assert!(ds.is_empty());
                break;
            }
            let s = s.unwrap_or_else(|| panic!("well-typed term is stuck: {m:?}"));
            assert_eq!(ds.len(), 1, "ambiguous decomposition of {m:?}");
            assert_eq!(ds[0].0, s.next);
            assert_eq!(ds[0].1, s.rule.root());
            checked += 1;
            m = s.next;
        }
    }
    assert!(checked > 10_000);
}

#[test]
fn progress_and_preservation_on_the_corpus() {
    for (ann, ty) in typed_corpus(10_000) {
        let m = ann.erase();
        assert!(check_core(&[], &m, &ty).is_ok());
        match step(&m) {
            None => assert!(is_value(&m) || m.is_blame(), "stuck: {m:?}"),
            Some(s) => assert!(
                check_core(&[], &s.next, &ty).is_ok(),
                "{m:?} -> {:?} at {ty}",
                s.next
            ),
        }
    }
}

fn frames_for(r: &mut rand_chacha::ChaCha8Rng) -> Vec<Frame> {
    use rand::Rng;
    let value = Term::lam(Term::Var(0));
    let arg = Term::num(r.gen_range(0..5));
    vec![
        Frame::AppL(arg),
        Frame::AppR(value),
        Frame::InjF(Ground::NAT),
        Frame::ProjF(Ground::Fun),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn frames_are_congruences(seed in 0u64..100_000) {
        let m = typed_corpus_one(seed).erase();
        if let Some(s) = step(&m) {
            let mut r = rng(seed);
            for f in frames_for(&mut r) {
                let plugged = step(&f.plug(m.clone())).expect("a frame around a reducible term steps");
                prop_assert_eq!(plugged.next, f.plug(s.next.clone()));
            }
        }
    }

    #[test]
    fn fuel_is_monotone(seed in 0u64..100_000, extra in 0usize..50) {
        let m = typed_corpus_one(seed).erase();
        let small = eval(&m, 40).unwrap();
        let big = eval(&m, 40 + extra).unwrap();
        match &small {
            Outcome::Val { .. } | Outcome::Blamed { .. } => prop_assert_eq!(&small, &big),
            Outcome::Timeout { .. } => prop_assert!(big.halted_after().is_none_or(|s| s > 40)),
        }
        prop_assert!(!(small.is_val() && big.is_blamed()));
        prop_assert!(!(small.is_blamed() && big.is_val()));
    }

    #[test]
    fn exact_runs_match_eval(seed in 0u64..100_000, k in 0usize..30) {
        let m = typed_corpus_one(seed).erase();
        let out = eval(&m, k).unwrap();
        let exact = run_exact(&m, k).unwrap();
        match out.halted_after() {
            Some(j) if j < k => prop_assert!(exact.is_none()),
            _ => prop_assert!(exact.is_some()),
        }
    }
}

fn typed_corpus_one(seed: u64) -> castcalc::AnnTerm {
    use castcalc::harness::{GenConfig, Generator};
    let mut g = Generator::new(&GenConfig {
        seed,
        ..GenConfig::default()
    });
    let t = g.random_type();
    g.term(&t).unwrap()
}
