use std::collections::BTreeMap;

use qrw_core::cmv::{Lattice, StateVector};
use qrw_core::coin::{constant_walk, presets, state_from_index, WalkModel};
use qrw_core::kmcg::{
    direct_amplitudes, kmcg_evolve, kmcg_table, to_cmv, to_unfolded, QuadratureSpec,
};
use qrw_core::linalg::{cis, Mat2, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_unitary(rng: &mut ChaCha8Rng) -> Mat2 {
    // U = e^{iφ} [[cos t e^{iα}, sin t e^{iβ}], [−sin t e^{−iβ}, cos t e^{−iα}]]
    let t: f64 = rng.gen_range(0.1..1.4);
    let (a, b, p): (f64, f64, f64) = (
        rng.gen_range(-3.0..3.0),
        rng.gen_range(-3.0..3.0),
        rng.gen_range(-3.0..3.0),
    );
    let (s, c) = t.sin_cos();
    Mat2::new(cis(a) * c, cis(b) * s, -cis(-b) * s, cis(-a) * c) * cis(p)
}

fn max_gap(walk: &WalkModel, idx: u64, steps: usize) -> f64 {
    let ids: Vec<u64> = (0..idx).collect();
    let ns: Vec<i64> = (0..=steps as i64).collect();
    let spec = QuadratureSpec::default();
    let k = kmcg_table(walk, &ids, &ids, &ns, &spec).unwrap();
    let mut worst: f64 = 0.0;
    for &j in &ids {
        let d = state_from_index(walk.lattice, j).unfolded();
        let init = StateVector::basis(walk.lattice, d);
        let direct = direct_amplitudes(walk, &init, steps).unwrap();
        for &kk in &ids {
            for &n in &ns {
                worst = worst.max((k.get(j, kk, n) - direct.get(j, kk, n)).norm());
            }
        }
    }
    worst
}

#[test]
fn hadamard_and_hmod_both_lattices() {
    for lattice in [Lattice::HalfLine, Lattice::Line] {
        for coin in [presets::hadamard(), presets::hmod()] {
            let w = constant_walk(lattice, coin).unwrap();
            let g = max_gap(&w, 10, 30);
            assert!(g < 1e-8, "{lattice:?} gap {g}");
        }
    }
}

#[test]
fn random_constant_coins() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..4 {
        let coin = random_unitary(&mut rng);
        for lattice in [Lattice::HalfLine, Lattice::Line] {
            let w = constant_walk(lattice, coin).unwrap();
            let g = max_gap(&w, 10, 12);
            assert!(g < 1e-8, "{lattice:?} {coin:?} gap {g}");
        }
    }
    let _ = C64::new(0.0, 0.0);
}

#[test]
fn evolved_superpositions_agree() {
    let spec = QuadratureSpec::default();
    let psi: BTreeMap<u64, C64> = [(0, C64::new(0.6, 0.0)), (3, C64::new(0.0, 0.8))].into();
    for lattice in [Lattice::HalfLine, Lattice::Line] {
        for c in [presets::hadamard(), presets::hmod()] {
            let walk = constant_walk(lattice, c).unwrap();
            for n in [0usize, 1, 5, 12] {
                let k = kmcg_evolve(&walk, &psi, n, &spec).unwrap();
                let d = to_cmv(&walk.evolve(&to_unfolded(lattice, &psi), n).unwrap()).unwrap();
                for (idx, v) in &d {
                    assert!(
                        (k.get(idx).copied().unwrap_or_default() - v).norm() < 1e-9,
                        "{lattice:?} n {n} idx {idx}"
                    );
                }
                let norm: f64 = k.values().map(|v| v.norm_sqr()).sum();
                assert!((norm - 1.0).abs() < 1e-9);
            }
        }
    }
}
