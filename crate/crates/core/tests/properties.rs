use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use xsep::multiset::{enumerate_irreducible, tilde_delta};
use xsep::norms::{delta_cap_detailed, delta_detailed, xnorm_detailed};
use xsep::oracle::{grid_delta, grid_xnorm, nested_delta3, random_product_vector};
use xsep::phase::{phase_difference, satisfies_phase_identities};
use xsep::separability::{check_witness, WitnessCandidate};
use xsep::{DiagVec, HermVec, Index, OptimConfig, PhaseVec, ThetaMap, WitnessStatus, XState};

fn diag(n: usize) -> impl Strategy<Value = DiagVec> {
    prop::collection::vec(0.02f64..1.0, 1 << n).prop_map(move |v| DiagVec::new(n, v).unwrap())
}

fn herm(n: usize) -> impl Strategy<Value = HermVec> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1 << (n - 1)).prop_map(move |v| {
        HermVec::from_half(
            n,
            v.into_iter()
                .map(|(re, im)| Complex64::new(re, im))
                .collect(),
        )
        .unwrap()
    })
}

fn phases(n: usize) -> impl Strategy<Value = PhaseVec> {
    prop::collection::vec(-PI..PI, 1 << (n - 1))
        .prop_map(move |v| PhaseVec::from_half(n, &v).unwrap())
}

/// X-part `(a, c)` of `|v⟩⟨v|`.
fn x_part(n: usize, v: &[Complex64]) -> XState {
    let a = Index::all(n).map(|i| v[i.rank()].norm_sqr()).collect();
    let c: Vec<Complex64> = Index::all(n)
        .map(|i| v[i.rank()] * v[i.complement().rank()].conj())
        .collect();
    XState::new(
        DiagVec::new(n, a).unwrap(),
        HermVec::from_full(n, &c, 1e-12).unwrap(),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn index_complements(n in 1usize..=8, bits in any::<u32>(), k in 1usize..=8) {
        let i = Index::new(n, bits & ((1 << n) - 1)).unwrap();
        prop_assert_eq!(i.complement().complement(), i);
        prop_assert!(i.is_pair_representative() != i.complement().is_pair_representative());
        let k = 1 + (k - 1) % n;
        let j = i.complement_except(k);
        prop_assert_eq!(j.bit(k), i.bit(k));
        prop_assert_eq!(j.complement().flip(&[k]).unwrap(), i);
    }

    #[test]
    fn delta_encloses_grid_minimum(s in diag(2)) {
        let b = delta_detailed(&s, &OptimConfig::default()).unwrap().bound;
        let g = grid_delta(&s, 8.0, 401).unwrap();
        prop_assert!(b.lower <= g + 1e-12);
        prop_assert!(g <= b.upper * (1.0 + 1e-3));
    }

    #[test]
    fn delta3_matches_nested_formula(s in diag(3)) {
        let b = delta_detailed(&s, &OptimConfig::default()).unwrap().bound;
        let nested = nested_delta3(&s, 12.0).unwrap();
        prop_assert!(b.lower <= nested * (1.0 + 1e-9), "{b:?} vs {nested}");
        prop_assert!(b.upper >= nested * (1.0 - 1e-7), "{b:?} vs {nested}");
    }

    #[test]
    fn delta_is_homogeneous(s in diag(3), t in 0.1f64..10.0) {
        let cfg = OptimConfig::default();
        let b = delta_detailed(&s, &cfg).unwrap().bound;
        let bt = delta_detailed(&s.scaled(t), &cfg).unwrap().bound;
        prop_assert!(bt.lower <= t * b.upper * (1.0 + 1e-9));
        prop_assert!(bt.upper >= t * b.lower * (1.0 - 1e-9));
    }

    #[test]
    fn xnorm_dominates_grid(u in herm(3)) {
        let b = xnorm_detailed(&u, &OptimConfig::default()).bound;
        let g = grid_xnorm(&u, 48).unwrap();
        prop_assert!(g <= b.upper + 1e-12 * u.norm_1());
        prop_assert!(2.0 * u.norm_inf() <= b.lower + 1e-12);
        prop_assert!(b.upper <= u.norm_1() + 1e-12);
    }

    #[test]
    fn xnorm_is_twist_invariant(u in herm(3), t in prop::collection::vec(-PI..PI, 3)) {
        let cfg = OptimConfig::default();
        let twisted = u.hadamard(&HermVec::torus(&t).unwrap());
        let b = xnorm_detailed(&u, &cfg).bound;
        let bt = xnorm_detailed(&twisted, &cfg).bound;
        prop_assert!(bt.lower <= b.upper + 1e-9 && b.lower <= bt.upper + 1e-9);
    }

    #[test]
    fn delta_cap_between_min_and_tilde(a in diag(3)) {
        let cfg = OptimConfig::default();
        let r = delta_cap_detailed(&a, &cfg).unwrap();
        prop_assert!(r.bound.lower >= a.min() * (1.0 - 1e-12));
        prop_assert!(r.bound.upper <= tilde_delta(&a).unwrap() * (1.0 + 1e-12));
        prop_assert!(r.bound.upper <= r.pair_min * (1.0 + 1e-12));
    }

    #[test]
    fn witnesses_are_nonnegative_on_product_states(
        s in diag(3),
        u in herm(3),
        seed in any::<u64>(),
    ) {
        use rand::SeedableRng;
        let cfg = OptimConfig::default();
        let d = delta_detailed(&s, &cfg).unwrap().bound;
        let x = xnorm_detailed(&u, &cfg).bound;
        prop_assume!(x.upper > 0.0);
        let w = WitnessCandidate::new(s, u.scaled(d.lower / x.upper * (1.0 - 1e-9))).unwrap();
        prop_assert_eq!(check_witness(&w, &cfg).unwrap().status, WitnessStatus::BlockPositive);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..8 {
            let v = random_product_vector(3, &mut rng);
            prop_assert!(w.pairing(&x_part(3, &v)) >= -1e-12);
        }
    }

    #[test]
    fn image_phases_satisfy_identities(n in 3usize..=6, t in prop::collection::vec(-PI..PI, 6)) {
        let theta = ThetaMap::new(n).unwrap().apply(&t[..n]).unwrap();
        prop_assert!(satisfies_phase_identities(&theta, true, 1e-9).unwrap());
        prop_assert!(satisfies_phase_identities(&theta, false, 1e-9).unwrap());
        let pd = phase_difference(&HermVec::from_phases(&theta)).unwrap();
        prop_assert!(pd.norm() < 1e-9);
    }

    #[test]
    fn phase_difference_is_twist_invariant(theta in phases(4), t in prop::collection::vec(-PI..PI, 4)) {
        let c = HermVec::from_phases(&theta);
        let twisted = c.hadamard(&HermVec::torus(&t).unwrap());
        let p = phase_difference(&c).unwrap();
        let q = phase_difference(&twisted).unwrap();
        for (x, y) in p.coefficients.iter().zip(&q.coefficients) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }
}

#[test]
fn enumerated_multisets_are_balanced_and_irreducible() {
    let cat = enumerate_irreducible(4, 6).unwrap();
    for t in cat.iter() {
        let els = t.elements();
        for k in 1..=4 {
            assert_eq!(els.iter().filter(|i| i.bit(k) == 0).count() * 2, els.len());
        }
        // No balanced proper sub-multiset: check all subsets by bitmask.
        let m = els.len();
        for mask in 1u32..(1 << m) - 1 {
            let sub: Vec<Index> = (0..m)
                .filter(|b| mask >> b & 1 == 1)
                .map(|b| els[b])
                .collect();
            let balanced =
                (1..=4).all(|k| sub.iter().filter(|i| i.bit(k) == 0).count() * 2 == sub.len());
            assert!(!balanced, "{t} splits");
        }
    }
}
