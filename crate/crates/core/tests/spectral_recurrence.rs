use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use qrw_core::cmv::{Lattice, StateVector};
use qrw_core::coin::{
    constant_walk, halfline_walk, presets, state_from_index, validate_coin, CoinField, WalkModel,
};
use qrw_core::kmcg::{direct_amplitudes, kmcg_table, MeasureModel, QuadratureSpec};
use qrw_core::linalg::{cis, Mat2, C64};
use qrw_core::opuc::laurent_values;
use qrw_core::recurrence::{
    classify_state, return_probability_partial_sum, singularity_set, transient_subspace,
    Classification, QuantumState, SingularityTag,
};
use qrw_core::spectral::{find_mass_points, recover_weight, CaratheodoryEvaluator};

fn coin(t: f64, a: f64, b: f64, p: f64) -> Mat2 {
    let (s, c) = t.sin_cos();
    Mat2::new(cis(a) * c, cis(b) * s, -cis(-b) * s, cis(-a) * c) * cis(p)
}

fn state<'a>(walk: &'a WalkModel, v: &[C64]) -> QuantumState<'a> {
    QuantumState::new(walk, v.iter().enumerate().map(|(i, a)| (i as u64, *a)))
}

#[test]
fn symmetric_coins_have_two_inverse_sqrt_points() {
    // parameter a = −sin t e^{iβ} is imaginary for β = π/2
    for (t, a, p) in [
        (0.3, 0.4, -1.0),
        (1.1, -2.0, 0.7),
        (FRAC_PI_2 / 2.0, 0.0, 0.0),
    ] {
        let walk = constant_walk(Lattice::HalfLine, coin(t, a, FRAC_PI_2, p)).unwrap();
        let set = singularity_set(&walk).unwrap();
        assert_eq!(set.non_removable().count(), 2);
        assert!(set
            .points
            .iter()
            .all(|s| s.tag == SingularityTag::InverseSqrt));
        for k in [2usize, 4, 6] {
            assert_eq!(
                transient_subspace(&walk, k).unwrap().len(),
                k - 2,
                "K = {k}"
            );
        }
    }
}

#[test]
fn non_symmetric_coins_have_one_pole() {
    for (t, a, b, p) in [
        (0.3, 0.4, 0.2, -1.0),
        (1.1, -2.0, 2.5, 0.7),
        (0.7, 1.0, -0.9, 2.0),
    ] {
        let walk = constant_walk(Lattice::HalfLine, coin(t, a, b, p)).unwrap();
        let set = singularity_set(&walk).unwrap();
        assert_eq!(set.non_removable().count(), 1);
        for k in [2usize, 4, 6] {
            assert_eq!(
                transient_subspace(&walk, k).unwrap().len(),
                k - 1,
                "K = {k}"
            );
        }
    }
}

#[test]
fn line_coins_have_four_constraints() {
    for c in [
        presets::hadamard(),
        presets::hmod(),
        coin(0.9, 0.3, 1.2, -0.4),
    ] {
        let walk = constant_walk(Lattice::Line, c).unwrap();
        for k in [6usize, 8, 10] {
            assert_eq!(
                transient_subspace(&walk, k).unwrap().len(),
                k - 4,
                "K = {k}"
            );
        }
    }
}

#[test]
fn subspace_and_classifier_agree() {
    let cases = [
        (Lattice::HalfLine, presets::hadamard(), 6),
        (Lattice::HalfLine, presets::hmod(), 5),
        (Lattice::Line, presets::hadamard(), 8),
        (Lattice::Line, coin(0.9, 0.3, 1.2, -0.4), 8),
    ];
    for (lattice, c, k) in cases {
        let walk = constant_walk(lattice, c).unwrap();
        let basis = transient_subspace(&walk, k).unwrap();
        assert!(!basis.is_empty());
        for v in &basis {
            let verdict = classify_state(&state(&walk, v)).unwrap();
            assert_eq!(verdict.classification, Classification::Transient);
        }
        // a generic state picks up every constraint
        let generic: Vec<C64> = (0..k)
            .map(|i| C64::new(1.0 + i as f64, 0.5 - i as f64))
            .collect();
        let verdict = classify_state(&state(&walk, &generic)).unwrap();
        assert_eq!(verdict.classification, Classification::Recurrent);
        assert!(verdict.certificate.iter().any(|c| c.value.norm() > 1e-6));
    }
}

#[test]
fn diagonal_coin_has_no_singularities() {
    let walk = constant_walk(Lattice::HalfLine, presets::identity()).unwrap();
    assert!(singularity_set(&walk).unwrap().points.is_empty());
}

#[test]
fn return_sums_separate_recurrent_from_transient() {
    let walk = constant_walk(Lattice::HalfLine, presets::hmod()).unwrap();
    let one = C64::new(1.0, 0.0);
    let up = QuantumState::new(&walk, [(0, one)]);
    let transient = QuantumState::new(&walk, [(0, one), (1, C64::new(0.0, 1.0 + 2f64.sqrt()))]);
    assert_eq!(
        classify_state(&transient).unwrap().classification,
        Classification::Transient
    );
    let grow = |s: &QuantumState| {
        let a = return_probability_partial_sum(s, 200).unwrap();
        let b = return_probability_partial_sum(s, 400).unwrap();
        b - a
    };
    // a mass point keeps |return amplitude| bounded below
    assert!(grow(&up) > 10.0);
    assert!(grow(&transient) < 1e-3);
}

#[test]
fn mass_matches_polynomial_sum() {
    for (t, a, b, p) in [
        (0.4, 0.2, 0.6, 0.3),
        (1.0, 0.2, 0.3, 0.3),
        (1.2, -1.0, -2.2, 1.5),
    ] {
        let walk = constant_walk(Lattice::HalfLine, coin(t, a, b, p)).unwrap();
        let m = match walk.measure.as_ref().unwrap() {
            MeasureModel::ClosedScalar(m) => *m,
            _ => unreachable!(),
        };
        let (z0, mass) = m.mass_point().expect("non-symmetric coin has a mass point");
        // the forward recursion follows the decaying solution only until rounding
        // excites the growing one; stop where the pairs stop shrinking
        let xs = laurent_values(&walk.verblunsky, 400, z0).unwrap();
        let mut total = xs[0].norm_sqr();
        for j in 1..xs.len() {
            if j >= 3 && xs[j].norm() > xs[j - 2].norm() {
                break;
            }
            total += xs[j].norm_sqr();
        }
        assert!(
            (total * mass - 1.0).abs() < 1e-8,
            "Σ|X_j(z0)|² = {total}, mass {mass}"
        );
    }
}

#[test]
fn ratio_source_recovers_the_weight() {
    for c in [presets::hadamard(), coin(0.8, 0.5, 0.3, -0.2)] {
        let walk = constant_walk(Lattice::HalfLine, c).unwrap();
        let m = match walk.measure.as_ref().unwrap() {
            MeasureModel::ClosedScalar(m) => *m,
            _ => unreachable!(),
        };
        let f = CaratheodoryEvaluator::ratio(walk.verblunsky.clone());
        for theta in [-2.9, -1.3, 0.1, 0.8, 2.2] {
            let w = recover_weight(&f, theta).unwrap();
            let want = m.weight(theta);
            if want > 0.0 && !w.divergent {
                assert!(
                    (w.value - want).abs() < 1e-5 * want.max(1.0),
                    "θ {theta}: {} vs {want}",
                    w.value
                );
            }
        }
    }
}

#[test]
fn ratio_source_finds_hmod_mass() {
    let walk = constant_walk(Lattice::HalfLine, presets::hmod()).unwrap();
    let pts = find_mass_points(&CaratheodoryEvaluator::ratio(walk.verblunsky.clone()));
    assert_eq!(pts.len(), 1);
    assert!((pts[0].location - C64::new(0.0, 1.0)).norm() < 1e-6);
    assert!((pts[0].mass - FRAC_1_SQRT_2).abs() < 1e-5);
}

#[test]
fn site_dependent_coin_matches_direct() {
    let d = validate_coin(presets::hadamard(), 0).unwrap();
    let field = CoinField::new(
        d,
        [
            validate_coin(coin(0.5, 0.3, 0.9, 0.1), 0).unwrap(),
            validate_coin(presets::hmod(), 1).unwrap(),
        ],
    );
    let walk = halfline_walk(&field).unwrap();
    assert!(matches!(walk.measure, Some(MeasureModel::Numeric(_))));
    let ids: Vec<u64> = (0..6).collect();
    let ns: Vec<i64> = (0..=10).collect();
    let k = kmcg_table(&walk, &ids, &ids, &ns, &QuadratureSpec::default()).unwrap();
    let mut worst: f64 = 0.0;
    for &j in &ids {
        let start = StateVector::basis(
            Lattice::HalfLine,
            state_from_index(Lattice::HalfLine, j).unfolded(),
        );
        let direct = direct_amplitudes(&walk, &start, 10).unwrap();
        for &q in &ids {
            for &n in &ns {
                worst = worst.max((k.get(j, q, n) - direct.get(j, q, n)).norm());
            }
        }
    }
    assert!(worst < 1e-8, "max gap {worst}");
}
