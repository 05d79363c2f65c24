mod support;

use castcalc::harness::{
    abstract_mutate, fuzz_campaign, gen_term, gradual_verdict, sem_approx, Dir, GenConfig,
    MutationMode, ThreeValued, Verdict,
};
use castcalc::precision::validate_term_prec;
use castcalc::typecheck::check_core;
use castcalc::{eval, Type};
use support::*;

#[test]
fn generator_hits_every_small_type() {
    for (i, ty) in Type::enumerate(2).iter().enumerate() {
        for s in 0..200u64 {
            let cfg = GenConfig {
                seed: s * 31 + i as u64,
                ..GenConfig::default()
            };
            let m = gen_term(&cfg, ty).unwrap();
            assert!(m.size() <= cfg.max_size);
            assert!(castcalc::check(&[], &m, ty).is_ok(), "{m:?} at {ty}");
            assert!(check_core(&[], &m.erase(), ty).is_ok());
        }
    }
}

#[test]
fn mutations_are_derivable_and_well_typed() {
    for (i, (ann, ty)) in typed_corpus(1000).into_iter().enumerate() {
        let m = ann.erase();
        let Ok(p) = abstract_mutate(&m, &ty, 3, i as u64, MutationMode::Standard) else {
            continue;
        };
        assert_eq!(p.more, m);
        assert!(validate_term_prec(&[], &p.d, &p.less, &p.more));
        let (a, b) = p.c.conclusion().unwrap();
        assert_eq!(b, ty);
        assert!(check_core(&[], &p.less, &a).is_ok());
    }
}

#[test]
fn index_zero_always_holds() {
    for (ann, _) in typed_corpus(300) {
        let m = ann.erase();
        for dir in Dir::BOTH {
            assert_eq!(sem_approx(dir, &m, &m, 0, 0), Ok(ThreeValued::Holds));
            assert_eq!(
                sem_approx(dir, &castcalc::Term::Blame, &m, 0, 10),
                Ok(ThreeValued::Holds)
            );
        }
    }
}

#[test]
fn consistent_halting_pairs_approximate() {
    let fuel = 1000;
    let mut spot = 0;
    for (i, (ann, ty)) in typed_corpus(1000).into_iter().enumerate() {
        let Ok(p) = abstract_mutate(&ann.erase(), &ty, 3, i as u64, MutationMode::Standard) else {
            continue;
        };
        let (less, more) = (eval(&p.less, fuel).unwrap(), eval(&p.more, fuel).unwrap());
        let v = gradual_verdict(&p.less, &p.more, fuel).unwrap();
        assert_ne!(
            std::mem::discriminant(&v),
            std::mem::discriminant(&Verdict::Violation(
                castcalc::harness::Clause::LessBlamesMoreHalts
            ))
        );
        if let (Verdict::Consistent, Some(n), Some(_)) =
            (v, less.halted_after(), more.halted_after())
        {
            for k in 0..=n {
                assert_eq!(
                    sem_approx(Dir::Le, &p.less, &p.more, k, fuel),
                    Ok(ThreeValued::Holds),
                    "k = {k} for {:?} ⊑ {:?}",
                    p.less,
                    p.more
                );
                assert_ne!(
                    sem_approx(Dir::Ge, &p.less, &p.more, k, fuel),
                    Ok(ThreeValued::Fails)
                );
            }
            spot += 1;
        }
    }
    assert!(spot > 500, "only {spot} halting pairs");
}

#[test]
fn default_campaign_finds_nothing() {
    let r = fuzz_campaign(&GenConfig::default(), 1000);
    assert_eq!(r.pairs, 1000);
    assert_eq!(r.totals.violation, 0);
    assert!(r.violations.is_empty());
    assert!(r.sem_approx_failures.is_empty());
    assert_eq!(
        r.totals.consistent + r.totals.inconclusive + r.skipped,
        r.pairs
    );
}

#[test]
fn serial_and_parallel_reports_match() {
    for adversarial in [false, true] {
        let cfg = GenConfig {
            seed: 7,
            adversarial,
            ..GenConfig::default()
        };
        let parallel = fuzz_campaign(&cfg, 400).to_json();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let serial = pool.install(|| fuzz_campaign(&cfg, 400).to_json());
        assert_eq!(parallel, serial);
    }
}
