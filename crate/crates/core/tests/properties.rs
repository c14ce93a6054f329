//! Property and invariant tests: algebraic laws of the truncated
//! monoid algebra, order-theoretic laws of the exact phase predicates,
//! and consistency laws of the transform machinery.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dtwall::lattice::{
    decompose, euler_pairing, in_s, in_t, realizable_classes, ClassVector, CurveClass,
    LatticeConfig, MRule, Support, Window,
};
use dtwall::series::MonoidSeries;
use dtwall::stability::{
    chamber_classify, charge_eval, is_general, min_phase_gap, phase_cmp, s_eps_v, Chamber,
    GaussRational, XiCharge,
};
use dtwall::wallcross::{
    dtpt_limit_oracles, transform, wall_product, InvariantTable, Mode, TransformBudget,
};

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn lattice(rank: usize, slope: i64) -> LatticeConfig {
    LatticeConfig::new(rank, 1, MRule::Affine { slope }).unwrap()
}

fn small_rational() -> impl Strategy<Value = BigRational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| q(n, d))
}

/// A random series over the fixed two-variable test window.
fn series(support: Support) -> impl Strategy<Value = MonoidSeries> {
    let cfg = lattice(1, 1);
    let window = Window::new(&cfg, 3, CurveClass(vec![2])).unwrap();
    let indices = window.indices(support);
    proptest::collection::vec(small_rational(), indices.len()).prop_map(move |coeffs| {
        MonoidSeries::from_coeffs(
            window.clone(),
            support,
            indices
                .iter()
                .cloned()
                .zip(coeffs)
                .map(|((n, beta), c)| (n, beta, c)),
        )
        .unwrap()
    })
}

fn unit_series() -> impl Strategy<Value = MonoidSeries> {
    series(Support::T).prop_map(|f| {
        let one = MonoidSeries::one(f.window().clone(), Support::T);
        let zero_beta = CurveClass::zero(f.window().curve_rank());
        let c = f.get(0, &zero_beta);
        let adjusted = f
            .sub(&MonoidSeries::monomial(f.window().clone(), Support::T, 0, zero_beta, c).unwrap())
            .unwrap();
        adjusted.add(&one).unwrap()
    })
}

fn gauss() -> impl Strategy<Value = GaussRational> {
    (small_rational(), small_rational())
        .prop_map(|(re, im)| GaussRational::new(re, im))
        .prop_filter("nonzero upper-half value", |g| g.in_heart())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pairing_is_antisymmetric(
        s1 in -9i64..9, b1 in -9i64..9, r1 in -3i64..3,
        s2 in -9i64..9, b2 in -9i64..9, r2 in -3i64..3,
    ) {
        let v = ClassVector::from_parts(s1, &[b1], r1);
        let w = ClassVector::from_parts(s2, &[b2], r2);
        prop_assert_eq!(euler_pairing(&v, &w), -euler_pairing(&w, &v));
        if r1 == 0 && r2 == 0 {
            prop_assert_eq!(euler_pairing(&v, &w), 0);
        }
    }

    #[test]
    fn supports_are_closed_under_addition(
        n1 in -4i64..8, b1 in 0i64..3,
        n2 in 0i64..8, b2 in 0i64..3,
    ) {
        // T + T ⊂ T and S + T ⊂ S for the affine bound rule.
        let cfg = lattice(1, 2);
        let beta1 = CurveClass(vec![b1]);
        let beta2 = CurveClass(vec![b2]);
        let sum = beta1.add(&beta2);
        if in_t(n1, &beta1) && in_t(n2, &beta2) {
            prop_assert!(in_t(n1 + n2, &sum));
        }
        if in_s(&cfg, n1, &beta1).unwrap() && in_t(n2, &beta2) {
            prop_assert!(in_s(&cfg, n1 + n2, &sum).unwrap());
        }
    }

    #[test]
    fn ring_axioms_on_t_support(f in series(Support::T), g in series(Support::T), h in series(Support::T)) {
        prop_assert_eq!(f.add(&g).unwrap(), g.add(&f).unwrap());
        prop_assert_eq!(f.mul(&g).unwrap(), g.mul(&f).unwrap());
        prop_assert_eq!(
            f.mul(&g).unwrap().mul(&h).unwrap(),
            f.mul(&g.mul(&h).unwrap()).unwrap()
        );
        prop_assert_eq!(
            f.mul(&g.add(&h).unwrap()).unwrap(),
            f.mul(&g).unwrap().add(&f.mul(&h).unwrap()).unwrap()
        );
    }

    #[test]
    fn module_axioms_on_s_support(f in series(Support::S), g in series(Support::T), h in series(Support::T)) {
        // (g h) f = g (h f) and (g + h) f = g f + h f
        prop_assert_eq!(
            f.mul(&g.mul(&h).unwrap()).unwrap(),
            f.mul(&g).unwrap().mul(&h).unwrap()
        );
        prop_assert_eq!(
            f.mul(&g.add(&h).unwrap()).unwrap(),
            f.mul(&g).unwrap().add(&f.mul(&h).unwrap()).unwrap()
        );
    }

    #[test]
    fn exp_turns_sums_into_products(f in series(Support::T), g in series(Support::T)) {
        let zero_beta = CurveClass::zero(1);
        let strip = |s: &MonoidSeries| {
            let c = s.get(0, &zero_beta);
            s.sub(&MonoidSeries::monomial(s.window().clone(), Support::T, 0, zero_beta.clone(), c).unwrap())
                .unwrap()
        };
        let f = strip(&f);
        let g = strip(&g);
        let lhs = f.add(&g).unwrap().exp().unwrap();
        let rhs = f.exp().unwrap().mul(&g.exp().unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(f.exp().unwrap().log().unwrap(), f);
    }

    #[test]
    fn division_by_units_is_exact(f in series(Support::S), g in unit_series()) {
        let back = f.mul(&g).unwrap().divide(&g).unwrap();
        prop_assert_eq!(back, f.clone());
        prop_assert_eq!(f.divide(&MonoidSeries::one(f.window().clone(), Support::T)).unwrap(), f);
    }

    #[test]
    fn projection_commutes_with_arithmetic(f in series(Support::T), g in series(Support::T)) {
        let cfg = lattice(1, 1);
        let small = Window::new(&cfg, 2, CurveClass(vec![1])).unwrap();
        let pf = f.project(&small).unwrap();
        let pg = g.project(&small).unwrap();
        prop_assert_eq!(
            f.mul(&g).unwrap().project(&small).unwrap(),
            pf.mul(&pg).unwrap()
        );
        prop_assert_eq!(
            f.add(&g).unwrap().project(&small).unwrap(),
            pf.add(&pg).unwrap()
        );
        // projection of the exponential is the exponential of the projection
        let zero_beta = CurveClass::zero(1);
        let c = f.get(0, &zero_beta);
        let f0 = f
            .sub(&MonoidSeries::monomial(f.window().clone(), Support::T, 0, zero_beta, c).unwrap())
            .unwrap();
        prop_assert_eq!(
            f0.exp().unwrap().project(&small).unwrap(),
            f0.project(&small).unwrap().exp().unwrap()
        );
        // composition of projections
        let smaller = Window::new(&cfg, 1, CurveClass(vec![0])).unwrap();
        prop_assert_eq!(
            pf.project(&smaller).unwrap(),
            f.project(&smaller).unwrap()
        );
    }

    #[test]
    fn phase_comparison_is_a_total_preorder(a in gauss(), b in gauss(), c in gauss()) {
        let ab = phase_cmp(&a, &b).unwrap();
        let ba = phase_cmp(&b, &a).unwrap();
        prop_assert_eq!(ab, ba.reverse());
        let bc = phase_cmp(&b, &c).unwrap();
        let ac = phase_cmp(&a, &c).unwrap();
        if ab == Ordering::Equal && bc == Ordering::Equal {
            prop_assert_eq!(ac, Ordering::Equal);
        }
        if ab != Ordering::Greater && bc != Ordering::Greater {
            prop_assert_ne!(ac, Ordering::Greater);
        }
    }

    #[test]
    fn decompositions_sum_to_target(parts in 1usize..=3, s in -3i64..=0, b in -2i64..=0, r in 0i64..=1) {
        let cfg = lattice(1, 0);
        let window = Window::new(&cfg, 3, CurveClass(vec![2])).unwrap();
        let v = ClassVector::from_parts(s, &[b], r);
        let tuples = decompose(&window, &v, parts).unwrap();
        let mut seen = std::collections::BTreeSet::new();
        for t in &tuples {
            let sum = t.iter().fold(ClassVector::from_parts(0, &[0], 0), |a, b| a.add(b));
            prop_assert_eq!(&sum, &v);
            prop_assert!(seen.insert(t.clone()), "duplicate tuple");
        }
        // enumeration is stable
        prop_assert_eq!(decompose(&window, &v, parts).unwrap(), tuples);
    }
}

/// Phase order agrees with floating-point angles away from ties; the
/// float evaluation is a sanity reference, never the authority.
#[test]
fn phase_cmp_agrees_with_atan2_sample() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut checked = 0usize;
    while checked < 10_000 {
        let ints = [
            rng.gen_range(-20i64..=20),
            rng.gen_range(-20i64..=20),
            rng.gen_range(-20i64..=20),
            rng.gen_range(-20i64..=20),
        ];
        let a = GaussRational::from_ints(ints[0], 1, ints[1], 1);
        let b = GaussRational::from_ints(ints[2], 1, ints[3], 1);
        if !a.in_heart() || !b.in_heart() {
            continue;
        }
        let exact = phase_cmp(&a, &b).unwrap();
        let fa = (ints[1] as f64).atan2(ints[0] as f64);
        let fb = (ints[3] as f64).atan2(ints[2] as f64);
        let float = if (fa - fb).abs() < 1e-12 {
            Ordering::Equal
        } else if fa < fb {
            Ordering::Less
        } else {
            Ordering::Greater
        };
        assert_eq!(exact, float, "disagreement at {:?}", ints);
        checked += 1;
    }
}

#[test]
fn chamber_wall_iff_not_general() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..500 {
        let z0 = GaussRational::from_ints(-rng.gen_range(1..9), 1, rng.gen_range(1..9), 1);
        let z1 = GaussRational::from_ints(-rng.gen_range(1..9), 1, rng.gen_range(1..9), 1);
        if let Ok(xi) = XiCharge::new(z0, vec![q(1, 1)], z1) {
            assert_eq!(chamber_classify(&xi) == Chamber::Wall, !is_general(&xi));
        }
    }
}

/// Realizable window classes always land in the admissible half plane.
#[test]
fn charges_of_realizable_classes_stay_in_heart() {
    let cfg = lattice(2, 1);
    let window = Window::new(&cfg, 3, CurveClass(vec![1, 1])).unwrap();
    let xi = XiCharge::new(
        GaussRational::from_ints(-2, 3, 1, 1),
        vec![q(1, 2), q(3, 1)],
        GaussRational::from_ints(-1, 1, 4, 1),
    )
    .unwrap();
    for v in realizable_classes(&window) {
        let z = charge_eval(&xi, &v).unwrap();
        assert!(z.in_heart(), "class {:?} left the heart", v);
    }
}

/// Shrinking the tolerance below the minimum phase gap reduces the
/// candidate set to the same-ray classes.
#[test]
fn phase_window_respects_reported_gap() {
    let cfg = lattice(1, 0);
    let window = Window::new(&cfg, 3, CurveClass(vec![1])).unwrap();
    let xi = XiCharge::new(
        GaussRational::from_ints(-2, 1, 3, 1),
        vec![q(1, 1)],
        GaussRational::from_ints(-1, 1, 1, 1),
    )
    .unwrap();
    let gap = min_phase_gap(&xi, &window).expect("distinct rays exist");
    let eps = gap / q(4, 1);
    let v = ClassVector::from_parts(-2, &[0], 1);
    let set = s_eps_v(&xi, &v, &eps, &window).unwrap();
    // below the gap only aligned splits survive; the structure ray and
    // the degree ray are distinct here, so only the trivial split stays
    assert_eq!(set, vec![v]);
}

/// The transform is an involution up to swapping the oracle sides:
/// carrying a table across the wall and back restores it.
#[test]
fn transform_round_trip_restores_table() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let cfg = lattice(0, 0);
    let window = Window::new(&cfg, 6, CurveClass(vec![])).unwrap();
    let (plus, minus) = dtpt_limit_oracles(0);
    let budget = TransformBudget::default();
    let mut table = InvariantTable::new(Mode::Euler);
    for n in 1..6i64 {
        table
            .set(
                ClassVector::from_parts(-n, &[], 0),
                q(rng.gen_range(-9..9), 2),
            )
            .unwrap();
    }
    for n in 0..6i64 {
        table
            .set(
                ClassVector::from_parts(-n, &[], 1),
                q(rng.gen_range(-9..9), 3),
            )
            .unwrap();
    }
    // push the table across the wall
    let mut crossed = InvariantTable::new(Mode::Euler);
    for (class, _) in table.entries().clone() {
        let value =
            transform(&table, Mode::Euler, &class, &plus, &minus, &window, &budget).unwrap();
        crossed.set(class, value).unwrap();
    }
    // and pull it back
    for (class, original) in table.entries() {
        let value = transform(
            &crossed,
            Mode::Euler,
            class,
            &minus,
            &plus,
            &window,
            &budget,
        )
        .unwrap();
        assert_eq!(&value, original, "round trip failed at {:?}", class);
    }
}

/// The two sign modes agree whenever every pairing weight is even.
#[test]
fn modes_agree_on_even_pairings() {
    let cfg = lattice(0, 0);
    let window = Window::new(&cfg, 7, CurveClass(vec![])).unwrap();
    let (plus, minus) = dtpt_limit_oracles(0);
    let budget = TransformBudget::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut euler = InvariantTable::new(Mode::Euler);
    let mut behrend = InvariantTable::new(Mode::Behrend);
    // support only even degrees: every pairing with the rank-one class
    // is even
    for n in [2i64, 4] {
        let value = q(rng.gen_range(-9..9), 2);
        euler
            .set(ClassVector::from_parts(-n, &[], 0), value.clone())
            .unwrap();
        behrend
            .set(ClassVector::from_parts(-n, &[], 0), value)
            .unwrap();
    }
    let unit = q(1, 1);
    euler
        .set(ClassVector::from_parts(0, &[], 1), unit.clone())
        .unwrap();
    behrend
        .set(ClassVector::from_parts(0, &[], 1), unit)
        .unwrap();
    for n in 0..7i64 {
        let v = ClassVector::from_parts(-n, &[], 1);
        let a = transform(&euler, Mode::Euler, &v, &plus, &minus, &window, &budget).unwrap();
        let b = transform(&behrend, Mode::Behrend, &v, &plus, &minus, &window, &budget).unwrap();
        assert_eq!(a, b, "modes disagree at degree {}", n);
    }
}

/// Wall product factors with opposite signs cancel exactly.
#[test]
fn wall_factors_cancel() {
    let cfg = lattice(0, 0);
    let window = Window::new(&cfg, 8, CurveClass(vec![])).unwrap();
    let mut n_table = BTreeMap::new();
    for n in 1..8i64 {
        n_table.insert((n, CurveClass(vec![])), q(3 * n - 2, 5));
    }
    let classes: Vec<ClassVector> = (1..8)
        .map(|n| ClassVector::from_parts(-n, &[], 0))
        .collect();
    for mode in [Mode::Euler, Mode::Behrend] {
        let f = wall_product(&n_table, &classes, mode, &window).unwrap();
        let inv = MonoidSeries::one(window.clone(), Support::T)
            .divide(&f)
            .unwrap();
        assert_eq!(
            f.mul(&inv).unwrap(),
            MonoidSeries::one(window.clone(), Support::T)
        );
    }
}

/// Ring and module laws on a window with roughly two hundred retained
/// indices, where truncation interactions are densest.
#[test]
fn algebra_laws_on_a_large_window() {
    let mut rng = ChaCha8Rng::seed_from_u64(2718);
    let cfg = lattice(1, 2);
    let window = Window::new(&cfg, 20, CurveClass(vec![4])).unwrap();
    assert!(window.indices(Support::T).len() >= 120);
    assert!(window.indices(Support::S).len() >= 100);
    let mut random_series = |support: Support| {
        let entries: Vec<(i64, CurveClass, BigRational)> = window
            .indices(support)
            .into_iter()
            .map(|(n, beta)| (n, beta, q(rng.gen_range(-9..=9), rng.gen_range(1..=5))))
            .collect();
        MonoidSeries::from_coeffs(window.clone(), support, entries).unwrap()
    };
    let f = random_series(Support::S);
    let g = random_series(Support::T);
    let h = random_series(Support::T);
    assert_eq!(g.mul(&h).unwrap(), h.mul(&g).unwrap());
    assert_eq!(
        f.mul(&g.mul(&h).unwrap()).unwrap(),
        f.mul(&g).unwrap().mul(&h).unwrap()
    );
    assert_eq!(
        f.mul(&g.add(&h).unwrap()).unwrap(),
        f.mul(&g).unwrap().add(&f.mul(&h).unwrap()).unwrap()
    );
    // division against a unit built from g
    let zero_beta = CurveClass::zero(1);
    let unit = {
        let c = g.get(0, &zero_beta);
        g.sub(&MonoidSeries::monomial(window.clone(), Support::T, 0, zero_beta, c).unwrap())
            .unwrap()
            .add(&MonoidSeries::one(window.clone(), Support::T))
            .unwrap()
    };
    assert_eq!(f.mul(&unit).unwrap().divide(&unit).unwrap(), f);
}

/// Exactness guard: a long alternating computation returns to the
/// exact rational starting point with no drift.
#[test]
fn arithmetic_has_no_drift() {
    let cfg = lattice(1, 1);
    let window = Window::new(&cfg, 4, CurveClass(vec![2])).unwrap();
    let f = MonoidSeries::from_coeffs(
        window.clone(),
        Support::T,
        window
            .indices(Support::T)
            .into_iter()
            .enumerate()
            .map(|(i, (n, beta))| (n, beta, q(2 * i as i64 + 1, 7))),
    )
    .unwrap();
    let mut g = f.clone();
    for _ in 0..5 {
        let e = g
            .sub(
                &MonoidSeries::monomial(
                    window.clone(),
                    Support::T,
                    0,
                    CurveClass::zero(1),
                    g.constant_term(),
                )
                .unwrap(),
            )
            .unwrap();
        g = e.exp().unwrap().log().unwrap();
        g = g
            .add(&MonoidSeries::one(window.clone(), Support::T))
            .unwrap();
        g = g.mul(&f).unwrap().divide(&f).unwrap();
        g = g
            .sub(&MonoidSeries::one(window.clone(), Support::T))
            .unwrap();
        g = g
            .add(
                &MonoidSeries::monomial(
                    window.clone(),
                    Support::T,
                    0,
                    CurveClass::zero(1),
                    f.constant_term(),
                )
                .unwrap(),
            )
            .unwrap();
    }
    assert_eq!(g, f);
    assert!(!f.constant_term().is_zero());
}
