//! Double-exponential (tanh-sinh) quadrature on finite intervals.
//!
//! Nodes are handed to the integrand together with their distances to both
//! endpoints, computed without cancellation, so that weights with
//! inverse-square-root endpoint singularities can be evaluated accurately.

use std::f64::consts::FRAC_PI_2;

use crate::linalg::{Coeff, C64};

/// Truncation of the transformed variable `t`.
const T_MAX: f64 = 5.0;

/// Outcome of a failed refinement: the best estimate and its error bound.
#[derive(Clone, Debug)]
pub struct QuadFailure<T> {
    pub estimate: Vec<T>,
    pub error: f64,
}

/// A converged integral with its last refinement difference.
#[derive(Clone, Debug)]
pub struct QuadResult<T> {
    pub values: Vec<T>,
    pub error: f64,
    pub evaluations: usize,
}

/// `∫_lo^hi f(θ) dθ` for a batch of integrands sharing the nodes.
///
/// `f(θ, θ − lo, hi − θ)` returns one value per component. Levels halve the
/// step until successive estimates differ by less than `tol` in every
/// component (checked from level 3 on).
pub fn tanh_sinh<T, F>(
    lo: f64,
    hi: f64,
    mut f: F,
    tol: f64,
    max_level: u32,
) -> Result<QuadResult<T>, QuadFailure<T>>
where
    T: Coeff,
    F: FnMut(f64, f64, f64) -> Vec<T>,
{
    let half = 0.5 * (hi - lo);
    let mut sum: Vec<T> = Vec::new();
    let mut evaluations = 0usize;

    let mut add_node = |t: f64, sum: &mut Vec<T>, evaluations: &mut usize| {
        let u = FRAC_PI_2 * t.sinh();
        let e = (-2.0 * u.abs()).exp();
        // 1 − |x| = 2e/(1 + e)
        let near = half * 2.0 * e / (1.0 + e);
        let far = 2.0 * half - near;
        let (dl, dr) = if u >= 0.0 { (far, near) } else { (near, far) };
        if dl <= 0.0 || dr <= 0.0 {
            return;
        }
        // dx/dt = (π/2) cosh t · sech² u
        let sech2 = 4.0 * e / ((1.0 + e) * (1.0 + e));
        let w = half * FRAC_PI_2 * t.cosh() * sech2;
        if w == 0.0 {
            return;
        }
        let theta = if u >= 0.0 { hi - dr } else { lo + dl };
        let vals = f(theta, dl, dr);
        *evaluations += 1;
        if sum.is_empty() {
            sum.resize(vals.len(), T::zero());
        }
        for (s, v) in sum.iter_mut().zip(vals) {
            *s += v * C64::new(w, 0.0);
        }
    };

    let mut h = 1.0;
    let n0 = (T_MAX / h) as i64;
    for k in -n0..=n0 {
        add_node(k as f64 * h, &mut sum, &mut evaluations);
    }
    let scaled =
        |sum: &Vec<T>, h: f64| -> Vec<T> { sum.iter().map(|s| *s * C64::new(h, 0.0)).collect() };
    let mut prev = scaled(&sum, h);
    let mut error = f64::INFINITY;
    for level in 1..=max_level {
        h *= 0.5;
        let n = (T_MAX / h) as i64;
        let mut k = -n + if n % 2 == 0 { 1 } else { 0 };
        while k <= n {
            add_node(k as f64 * h, &mut sum, &mut evaluations);
            k += 2;
        }
        let cur = scaled(&sum, h);
        error = if prev.len() == cur.len() {
            prev.iter()
                .zip(&cur)
                .map(|(a, b)| (*a - *b).magnitude())
                .fold(0.0, f64::max)
        } else {
            f64::INFINITY
        };
        prev = cur;
        if level >= 3 && error < tol {
            return Ok(QuadResult {
                values: prev,
                error,
                evaluations,
            });
        }
    }
    Err(QuadFailure {
        estimate: prev,
        error,
    })
}
