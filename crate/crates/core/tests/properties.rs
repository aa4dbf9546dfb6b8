use erasure_ft::arith::{ratio, to_f64, Poly, Rational};
use erasure_ft::chain::build_chain;
use erasure_ft::circuits::{OutcomeDistribution, Procedure, StepChoice};
use erasure_ft::classes::{ClassOptions, PermutationGroup};
use erasure_ft::erasure::{all_patterns, ErasurePattern, ErrorModel, Site};
use erasure_ft::pauli::SteaneCode;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn small_poly() -> impl Strategy<Value = Poly> {
    prop::collection::vec(((0u32..4, 0u32..3), -20i64..20, 1i64..6), 0..6)
        .prop_map(|terms| Poly::from_terms(terms.into_iter().map(|(m, n, d)| (m, ratio(n, d)))))
}

fn pattern(model: ErrorModel) -> impl Strategy<Value = ErasurePattern> {
    let alphabet = model.alphabet().to_vec();
    prop::collection::vec(prop::sample::select(alphabet), 7).prop_map(|s| {
        let mut sites = [Site::Intact; 7];
        sites.copy_from_slice(&s);
        ErasurePattern::new(sites)
    })
}

proptest! {
    #[test]
    fn ring_axioms(a in small_poly(), b in small_poly(), c in small_poly()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a * &Poly::one(), a.clone());
    }

    #[test]
    fn truncation_commutes_with_addition(a in small_poly(), b in small_poly(), k in 0u32..6) {
        prop_assert_eq!((&a + &b).truncate(k), &a.truncate(k) + &b.truncate(k));
        prop_assert_eq!(a.mul_truncated(&b, k), (&a * &b).truncate(k));
    }

    #[test]
    fn evaluation_is_a_ring_map(a in small_poly(), b in small_poly(), e in 0i64..10, d in 0i64..10) {
        let (x, y) = (ratio(e, 9), ratio(d, 7));
        prop_assert_eq!((&a * &b).eval(&x, &y), a.eval(&x, &y) * b.eval(&x, &y));
        prop_assert_eq!((&a + &b).eval(&x, &y), a.eval(&x, &y) + b.eval(&x, &y));
    }

    #[test]
    fn automorphisms_commute_with_attempt(p in pattern(ErrorModel::Lossy), g in 0usize..168) {
        let proc = Procedure::with_defaults(ErrorModel::Lossy);
        let group = PermutationGroup::code_automorphisms(proc.code());
        let perm = group.perms()[g];
        let gp = p.permuted(&perm);
        let image = |q: u8| perm[(q - 1) as usize] + 1;
        // equivariance holds whenever the selection rule picks matching steps
        if let (StepChoice::Correct(s), StepChoice::Correct(t)) = (proc.select_step(&p), proc.select_step(&gp)) {
            let mut mapped: Vec<u8> = s.helpers.iter().map(|h| image(*h)).collect();
            mapped.sort_unstable();
            prop_assume!(image(s.target) == t.target && mapped == t.helpers.to_vec());
            let moved: OutcomeDistribution = {
                let mut d = OutcomeDistribution::default();
                for (q, pr) in proc.attempt(&p).entries {
                    d.add(q.permuted(&perm), &pr);
                }
                d
            };
            prop_assert_eq!(moved, proc.attempt(&gp));
        }
    }
}

#[test]
fn classify_is_automorphism_invariant() {
    let proc = Procedure::with_defaults(ErrorModel::Lossy);
    let group = PermutationGroup::code_automorphisms(&SteaneCode::new());
    for p in all_patterns(ErrorModel::Lossy) {
        let c = proc.classify(&p);
        for g in group.perms().iter().step_by(7) {
            assert_eq!(proc.classify(&p.permuted(g)), c);
        }
    }
}

#[test]
fn transition_probabilities_stay_in_unit_interval() {
    for model in [ErrorModel::Ideal, ErrorModel::Lossy] {
        let proc = Procedure::with_defaults(model);
        let chain = build_chain(&proc, &ClassOptions::reduced(proc.code())).unwrap();
        let grid: Vec<(Rational, Rational)> = (0..10)
            .map(|k| (ratio(k, 36), ratio((7 * k) % 10, 40)))
            .collect();
        for i in 0..chain.len() {
            for p in chain
                .row(i)
                .values()
                .chain(std::iter::once(&chain.initial()[i]))
            {
                for (e, d) in &grid {
                    let d = if model == ErrorModel::Ideal {
                        Rational::zero()
                    } else {
                        d.clone()
                    };
                    let v = p.eval(e, &d);
                    assert!(
                        v >= Rational::zero() && v <= Rational::one(),
                        "{p} at {e}, {d}"
                    );
                }
            }
        }
    }
}

#[test]
fn reduced_chain_matches_unreduced_chain() {
    let proc = Procedure::with_defaults(ErrorModel::Ideal);
    let reduced = build_chain(&proc, &ClassOptions::reduced(proc.code())).unwrap();
    let full = build_chain(&proc, &ClassOptions::unreduced()).unwrap();
    assert_eq!(full.len(), 128);
    for x in [ratio(1, 100), ratio(1, 10)] {
        assert_eq!(reduced.encoded_failure_at(&x), full.encoded_failure_at(&x));
    }
    assert_eq!(reduced.recursion_series(5), full.recursion_series(5));
}

#[test]
fn lossy_merged_chain_matches_orbit_chain() {
    let proc = Procedure::with_defaults(ErrorModel::Lossy);
    let reduced = build_chain(&proc, &ClassOptions::reduced(proc.code())).unwrap();
    let orbits = ClassOptions {
        group: PermutationGroup::code_automorphisms(proc.code()),
        merge: false,
    };
    let full = build_chain(&proc, &orbits).unwrap();
    assert!(full.len() > reduced.len());
    let x = ratio(1, 50);
    let (a, b) = (reduced.encoded_failure_at(&x), full.encoded_failure_at(&x));
    assert_eq!(a, b, "{} vs {}", to_f64(&a), to_f64(&b));
}
