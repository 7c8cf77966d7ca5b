//! Karlin–McGregor integrals: `(U^n)_{j,k} = ∫ z^n X_j(z) X_k(z)† dμ(z)`
//! over closed-form or numerically recovered measures, plus the exact
//! step-by-step oracle they are checked against.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::closed_forms::{
    constant_laurent, constant_measure, ClosedFormMatrixMeasure, ClosedFormMeasure,
};
use crate::cmv::{Lattice, StateVector};
use crate::coin::{amplitude_index, state_from_index, PureState, Spin, WalkModel};
use crate::error::{QrwError, Result};
use crate::laurent::LaurentPoly;
use crate::linalg::{cis, Cell, Coeff, Mat2, C64, ONE, ZERO};
use crate::opuc::laurent_polynomials;
use crate::quadrature::tanh_sinh;
use crate::spectral::NumericMeasure;

/// Environment variable overriding the default absolute tolerance.
pub const TOL_ENV: &str = "QRW_QUAD_TOL";

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub max_refinement: u32,
    /// Use the tanh-sinh transform; otherwise plain composite Simpson.
    pub double_exponential: bool,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            abs_tol: 1e-10,
            max_refinement: 12,
            double_exponential: true,
        }
    }
}

impl QuadratureSpec {
    pub fn with_tol(abs_tol: f64) -> Result<Self> {
        if !(abs_tol > 0.0 && abs_tol.is_finite()) {
            return Err(QrwError::Usage(format!(
                "abs_tol must be positive, got {abs_tol}"
            )));
        }
        Ok(QuadratureSpec {
            abs_tol,
            ..Default::default()
        })
    }

    /// Default spec, with the tolerance taken from `QRW_QUAD_TOL` when set.
    pub fn from_env() -> Result<Self> {
        match std::env::var(TOL_ENV) {
            Ok(v) => {
                let tol: f64 = v
                    .trim()
                    .parse()
                    .map_err(|_| QrwError::Usage(format!("{TOL_ENV}={v:?} is not a number")))?;
                Self::with_tol(tol)
            }
            Err(_) => Ok(Self::default()),
        }
    }
}

/// Spectral measure handle of a walk.
#[derive(Clone, Debug)]
pub enum MeasureModel {
    ClosedScalar(ClosedFormMeasure),
    ClosedMatrix(ClosedFormMatrixMeasure),
    Numeric(NumericMeasure),
}

/// Value of an integral against a scalar or matrix measure.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Integral {
    Scalar(C64),
    Matrix(Mat2),
}

impl Integral {
    pub fn scalar(self) -> Option<C64> {
        match self {
            Integral::Scalar(v) => Some(v),
            Integral::Matrix(_) => None,
        }
    }

    pub fn matrix(self) -> Option<Mat2> {
        match self {
            Integral::Matrix(m) => Some(m),
            Integral::Scalar(_) => None,
        }
    }
}

/// Integrates over `[lo, hi]` with the rule selected in `spec`.
fn integrate_interval<T, F>(lo: f64, hi: f64, f: F, spec: &QuadratureSpec) -> Result<Vec<T>>
where
    T: Coeff,
    F: FnMut(f64, f64, f64) -> Vec<T>,
{
    let result = if spec.double_exponential {
        tanh_sinh(lo, hi, f, spec.abs_tol, spec.max_refinement)
    } else {
        simpson(lo, hi, f, spec.abs_tol, spec.max_refinement)
    };
    result.map(|r| r.values).map_err(|e| QrwError::Quadrature {
        estimate: e.estimate.iter().flat_map(|v| v.components()).collect(),
        error: e.error,
    })
}

fn simpson<T, F>(
    lo: f64,
    hi: f64,
    mut f: F,
    tol: f64,
    max_level: u32,
) -> std::result::Result<crate::quadrature::QuadResult<T>, crate::quadrature::QuadFailure<T>>
where
    T: Coeff,
    F: FnMut(f64, f64, f64) -> Vec<T>,
{
    let rule = |n: usize, f: &mut F| -> Vec<T> {
        let h = (hi - lo) / n as f64;
        let mut acc: Vec<T> = Vec::new();
        // open ends: endpoints are skipped, which is exact for bounded f as n grows
        for i in 1..n {
            let dl = i as f64 * h;
            let dr = (n - i) as f64 * h;
            let w = if i % 2 == 1 { 4.0 } else { 2.0 } * h / 3.0;
            let v = f(lo + dl, dl, dr);
            if acc.is_empty() {
                acc.resize(v.len(), T::zero());
            }
            for (a, x) in acc.iter_mut().zip(v) {
                *a += x * C64::new(w, 0.0);
            }
        }
        acc
    };
    let mut n = 16;
    let mut prev = rule(n, &mut f);
    let mut error = f64::INFINITY;
    for _ in 0..max_level {
        n *= 2;
        let cur = rule(n, &mut f);
        error = prev
            .iter()
            .zip(&cur)
            .map(|(a, b)| (*a - *b).magnitude())
            .fold(0.0, f64::max);
        prev = cur;
        if error < tol {
            return Ok(crate::quadrature::QuadResult {
                values: prev,
                error,
                evaluations: n,
            });
        }
    }
    Err(crate::quadrature::QuadFailure {
        estimate: prev,
        error,
    })
}

/// `∫ f dμ` for a batch of scalar integrands against a closed-form scalar
/// measure: arc integrals of `f w dθ/2π` plus `M f(z_0)`.
pub fn integrate_scalar_batch<F>(
    m: &ClosedFormMeasure,
    mut f: F,
    spec: &QuadratureSpec,
) -> Result<Vec<C64>>
where
    F: FnMut(C64) -> Vec<C64>,
{
    let mut total: Vec<C64> = Vec::new();
    for (arc, lo, hi) in m.arcs() {
        let part = integrate_interval(
            lo,
            hi,
            |t, dl, dr| {
                let w = m.weight_at(arc, dl, dr) / (2.0 * PI);
                let mut v = f(cis(t + m.rotation));
                for x in v.iter_mut() {
                    *x *= w;
                }
                v
            },
            spec,
        )?;
        accumulate(&mut total, part);
    }
    if let Some((z0, mass)) = m.mass_point() {
        let v: Vec<C64> = f(z0).into_iter().map(|x| x * mass).collect();
        accumulate(&mut total, v);
    }
    Ok(total)
}

/// `∫ f(z, W(θ) dθ/2π)` for a batch of integrands built from the matrix
/// density; the matrix measures in scope have no mass points.
pub fn integrate_matrix_batch<T, F>(
    m: &ClosedFormMatrixMeasure,
    mut f: F,
    spec: &QuadratureSpec,
) -> Result<Vec<T>>
where
    T: Coeff,
    F: FnMut(C64, &Mat2) -> Vec<T>,
{
    let mut total: Vec<T> = Vec::new();
    for (arc, lo, hi) in m.arcs() {
        let part = integrate_interval(
            lo,
            hi,
            |t, dl, dr| {
                let w = m.weight_at(arc, dl, dr) * C64::new(1.0 / (2.0 * PI), 0.0);
                f(cis(t + m.rotation), &w)
            },
            spec,
        )?;
        accumulate(&mut total, part);
    }
    Ok(total)
}

fn accumulate<T: Coeff>(total: &mut Vec<T>, part: Vec<T>) {
    if total.is_empty() {
        *total = part;
    } else {
        for (t, p) in total.iter_mut().zip(part) {
            *t += p;
        }
    }
}

/// `∫ f dμ` (scalar measure) or `∫ f dμ` as a matrix (matrix measure).
pub fn integrate<F>(measure: &MeasureModel, f: F, spec: &QuadratureSpec) -> Result<Integral>
where
    F: Fn(C64) -> C64,
{
    match measure {
        MeasureModel::ClosedScalar(m) => {
            let v = integrate_scalar_batch(m, |z| vec![f(z)], spec)?;
            Ok(Integral::Scalar(v[0]))
        }
        MeasureModel::ClosedMatrix(m) => {
            let v = integrate_matrix_batch(m, |z, w| vec![*w * f(z)], spec)?;
            Ok(Integral::Matrix(v[0]))
        }
        MeasureModel::Numeric(m) => Ok(Integral::Scalar(m.integrate(|z| vec![f(z)])?[0])),
    }
}

/// Moments `μ_0, …, μ_{n_max}` with `μ_n = ∫ z^n dμ`.
#[derive(Clone, Debug, PartialEq)]
pub enum Moments {
    Scalar(Vec<C64>),
    Matrix(Vec<Mat2>),
}

impl Moments {
    pub fn len(&self) -> usize {
        match self {
            Moments::Scalar(v) => v.len(),
            Moments::Matrix(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Moments by quadrature (closed forms) or by Maclaurin extraction from the
/// Carathéodory function (numeric measures).
pub fn moments(measure: &MeasureModel, n_max: usize, spec: &QuadratureSpec) -> Result<Moments> {
    match measure {
        MeasureModel::ClosedScalar(m) => {
            let v = integrate_scalar_batch(m, |z| powers(z, n_max), spec)?;
            Ok(Moments::Scalar(v))
        }
        MeasureModel::ClosedMatrix(m) => {
            let v = integrate_matrix_batch(
                m,
                |z, w| powers(z, n_max).into_iter().map(|p| *w * p).collect(),
                spec,
            )?;
            Ok(Moments::Matrix(v))
        }
        MeasureModel::Numeric(m) => Ok(Moments::Scalar(m.evaluator.maclaurin_moments(n_max)?)),
    }
}

/// Moments from the exact power series of a closed-form `F`.
pub fn moments_series(measure: &MeasureModel, n_max: usize) -> Result<Moments> {
    match measure {
        MeasureModel::ClosedScalar(m) => Ok(Moments::Scalar(m.moments_series(n_max))),
        MeasureModel::ClosedMatrix(m) => Ok(Moments::Matrix(m.moments_series(n_max))),
        MeasureModel::Numeric(_) => Err(QrwError::Unsupported(
            "no closed-form series for a numeric measure".into(),
        )),
    }
}

fn powers(z: C64, n: usize) -> Vec<C64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut p = ONE;
    for _ in 0..=n {
        out.push(p);
        p *= z;
    }
    out
}

/// Gauged half-line polynomials `X_j = λ_j x_j`, `j < count`.
pub fn halfline_polynomials(walk: &WalkModel, count: usize) -> Result<Vec<LaurentPoly<C64>>> {
    if walk.lattice != Lattice::HalfLine {
        return Err(QrwError::Usage(
            "half-line polynomials need a half-line walk".into(),
        ));
    }
    let xs = laurent_polynomials(&walk.verblunsky, count)?;
    Ok(xs
        .into_iter()
        .enumerate()
        .map(|(j, x)| x.scale(walk.gauge.lambda(j as i64)))
        .collect())
}

/// Gauged block polynomials `X_J = Λ_J x_J` of the folded line walk.
pub fn line_polynomials(walk: &WalkModel, count: usize) -> Result<Vec<LaurentPoly<Mat2>>> {
    let block = walk
        .block
        .as_ref()
        .ok_or_else(|| QrwError::Usage("block polynomials need a line walk".into()))?;
    let xs = laurent_polynomials(block, count)?;
    Ok(xs
        .into_iter()
        .enumerate()
        .map(|(j, x)| x.left_mul(&walk.gauge.block(j as i64)))
        .collect())
}

/// Which route produced an amplitude table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Kmcg,
    Direct,
}

/// Amplitudes `(U^n)_{j,k}` keyed by `(j, k, n)` in the CMV ordering of
/// [`amplitude_index`].
#[derive(Clone, Debug, PartialEq)]
pub struct AmplitudeTable {
    pub lattice: Lattice,
    pub method: Method,
    pub entries: BTreeMap<(u64, u64, i64), C64>,
}

impl AmplitudeTable {
    pub fn new(lattice: Lattice, method: Method) -> Self {
        AmplitudeTable {
            lattice,
            method,
            entries: BTreeMap::new(),
        }
    }

    /// Missing entries are zero.
    pub fn get(&self, j: u64, k: u64, n: i64) -> C64 {
        self.entries.get(&(j, k, n)).copied().unwrap_or(ZERO)
    }

    /// `Σ_k |(U^n)_{j,k}|²` over the stored entries.
    pub fn row_norm_sqr(&self, j: u64, n: i64) -> f64 {
        self.entries
            .range((j, 0, i64::MIN)..=(j, u64::MAX, i64::MAX))
            .filter(|((_, _, m), _)| *m == n)
            .map(|(_, v)| v.norm_sqr())
            .sum()
    }

    /// Largest entrywise difference over the keys of `self`.
    pub fn max_diff(&self, other: &AmplitudeTable) -> f64 {
        self.entries
            .iter()
            .map(|(&(j, k, n), v)| (*v - other.get(j, k, n)).norm())
            .fold(0.0, f64::max)
    }

    /// [`max_diff`](Self::max_diff) split by step.
    pub fn max_diff_by_step(&self, other: &AmplitudeTable) -> BTreeMap<i64, f64> {
        let mut out: BTreeMap<i64, f64> = BTreeMap::new();
        for (&(j, k, n), v) in &self.entries {
            let d = (*v - other.get(j, k, n)).norm();
            let e = out.entry(n).or_insert(0.0);
            *e = e.max(d);
        }
        out
    }
}

/// Moment `μ_m` for any integer `m`, from the non-negative ones.
fn moment_at(mu: &[C64], m: i64) -> C64 {
    if m >= 0 {
        mu[m as usize]
    } else {
        mu[(-m) as usize].conj()
    }
}

fn poly_span<T: Coeff>(polys: &[LaurentPoly<T>]) -> i64 {
    polys
        .iter()
        .filter_map(|p| p.support())
        .map(|(lo, hi)| lo.abs().max(hi.abs()))
        .max()
        .unwrap_or(0)
}

/// `Σ_{p,q} A_{jp} conj(A_{kq}) μ_{n+p−q}`.
fn moment_sum(xj: &LaurentPoly<C64>, xk: &LaurentPoly<C64>, mu: &[C64], n: i64) -> C64 {
    let mut s = ZERO;
    for (p, a) in xj.terms() {
        for (q, b) in xk.terms() {
            s += a * b.conj() * moment_at(mu, n + p - q);
        }
    }
    s
}

/// KMcG table on the half-line for every `(j, k, n)` in the given lists.
pub fn kmcg_table_halfline(
    walk: &WalkModel,
    from: &[u64],
    to: &[u64],
    steps: &[i64],
    spec: &QuadratureSpec,
) -> Result<AmplitudeTable> {
    let measure = walk
        .measure
        .as_ref()
        .ok_or_else(|| QrwError::Unsupported("walk has no spectral measure".into()))?;
    let count = from.iter().chain(to).copied().max().unwrap_or(0) as usize + 1;
    let polys = halfline_polynomials(walk, count)?;
    let mut table = AmplitudeTable::new(Lattice::HalfLine, Method::Kmcg);
    match measure {
        MeasureModel::ClosedScalar(m) => {
            let values = integrate_scalar_batch(
                m,
                |z| {
                    let xv: Vec<C64> = polys.iter().map(|p| p.eval(z)).collect();
                    let zn: Vec<C64> = steps.iter().map(|&n| z.powi(n as i32)).collect();
                    let mut out = Vec::with_capacity(from.len() * to.len() * steps.len());
                    for &j in from {
                        for &k in to {
                            let prod = xv[j as usize] * xv[k as usize].conj();
                            out.extend(zn.iter().map(|p| *p * prod));
                        }
                    }
                    out
                },
                spec,
            )?;
            let mut it = values.into_iter();
            for &j in from {
                for &k in to {
                    for &n in steps {
                        table.entries.insert((j, k, n), it.next().unwrap_or(ZERO));
                    }
                }
            }
        }
        MeasureModel::Numeric(m) => {
            let nmax = steps.iter().map(|n| n.abs()).max().unwrap_or(0) + 2 * poly_span(&polys);
            let mu = m.evaluator.maclaurin_moments(nmax as usize)?;
            for &j in from {
                for &k in to {
                    for &n in steps {
                        let v = moment_sum(&polys[j as usize], &polys[k as usize], &mu, n);
                        table.entries.insert((j, k, n), v);
                    }
                }
            }
        }
        MeasureModel::ClosedMatrix(_) => {
            return Err(QrwError::Usage("matrix measure on a half-line walk".into()))
        }
    }
    Ok(table)
}

/// `(U^n)_{j,k} = ∫ z^n X_j conj(X_k) dμ` on the half-line; `n < 0` allowed.
pub fn amplitude_halfline(
    walk: &WalkModel,
    j: u64,
    k: u64,
    n: i64,
    spec: &QuadratureSpec,
) -> Result<C64> {
    Ok(kmcg_table_halfline(walk, &[j], &[k], &[n], spec)?.get(j, k, n))
}

/// Constant-coin form `e^{inϑ} (λ̂_j/λ̂_k) ∫ z^n x̂_j conj(x̂_k) dμ̂` with the
/// unrotated measure and polynomials of `(a, 0, a, 0, …)`.
pub fn amplitude_halfline_split(
    walk: &WalkModel,
    j: u64,
    k: u64,
    n: i64,
    spec: &QuadratureSpec,
) -> Result<C64> {
    let p = walk
        .constant
        .filter(|_| walk.lattice == Lattice::HalfLine)
        .ok_or_else(|| {
            QrwError::Unsupported("split form needs a constant-coin half-line walk".into())
        })?;
    let m = constant_measure(p.a, 0.0)?;
    let xj = constant_laurent(p.a, j as usize)?;
    let xk = constant_laurent(p.a, k as usize)?;
    let v = integrate_scalar_batch(
        &m,
        |z| vec![z.powi(n as i32) * xj.eval(z) * xk.eval(z).conj()],
        spec,
    )?[0];
    let lj = walk.gauge.reduced(j as i64).expect("constant gauge");
    let lk = walk.gauge.reduced(k as i64).expect("constant gauge");
    Ok(cis(n as f64 * p.vartheta) * lj * lk.conj() * v)
}

/// KMcG table on the line through the folded block measure.
pub fn kmcg_table_line(
    walk: &WalkModel,
    from: &[u64],
    to: &[u64],
    steps: &[i64],
    spec: &QuadratureSpec,
) -> Result<AmplitudeTable> {
    let m = match &walk.measure {
        Some(MeasureModel::ClosedMatrix(m)) => m,
        _ => {
            return Err(QrwError::Unsupported(
                "KMcG on the line needs a constant coin; use the direct oracle".into(),
            ))
        }
    };
    let count = from.iter().chain(to).map(|p| p / 2).max().unwrap_or(0) as usize + 1;
    let polys = line_polynomials(walk, count)?;
    let values = integrate_matrix_batch(
        m,
        |z, w| {
            let xv: Vec<Mat2> = polys.iter().map(|p| p.eval(z)).collect();
            let zn: Vec<C64> = steps.iter().map(|&n| z.powi(n as i32)).collect();
            let mut out = Vec::with_capacity(from.len() * to.len() * steps.len());
            for &p in from {
                let xw = xv[(p / 2) as usize] * *w;
                let r = (p % 2) as usize;
                for &q in to {
                    let xk = &xv[(q / 2) as usize];
                    let c = (q % 2) as usize;
                    let e = xw.get(r, 0) * xk.get(c, 0).conj() + xw.get(r, 1) * xk.get(c, 1).conj();
                    out.extend(zn.iter().map(|z| *z * e));
                }
            }
            out
        },
        spec,
    )?;
    let mut table = AmplitudeTable::new(Lattice::Line, Method::Kmcg);
    let mut it = values.into_iter();
    for &p in from {
        for &q in to {
            for &n in steps {
                table.entries.insert((p, q, n), it.next().unwrap_or(ZERO));
            }
        }
    }
    Ok(table)
}

/// Block `(J, K)` of `∫ X_J z^n dμ X_K†` on the line.
pub fn block_amplitude_line(
    walk: &WalkModel,
    jb: usize,
    kb: usize,
    n: i64,
    spec: &QuadratureSpec,
) -> Result<Mat2> {
    let m = match &walk.measure {
        Some(MeasureModel::ClosedMatrix(m)) => m,
        _ => {
            return Err(QrwError::Unsupported(
                "KMcG on the line needs a constant coin".into(),
            ))
        }
    };
    let polys = line_polynomials(walk, jb.max(kb) + 1)?;
    let v = integrate_matrix_batch(
        m,
        |z, w| vec![polys[jb].eval(z) * *w * polys[kb].eval(z).adjoint() * z.powi(n as i32)],
        spec,
    )?;
    Ok(v[0])
}

/// Amplitude from one pure state to another after `n` steps on the line.
pub fn amplitude_line(
    walk: &WalkModel,
    from: PureState,
    to: PureState,
    n: i64,
    spec: &QuadratureSpec,
) -> Result<C64> {
    let p = amplitude_index(Lattice::Line, from.site, from.spin)?;
    let q = amplitude_index(Lattice::Line, to.site, to.spin)?;
    Ok(kmcg_table_line(walk, &[p], &[q], &[n], spec)?.get(p, q, n))
}

/// KMcG table for either lattice.
pub fn kmcg_table(
    walk: &WalkModel,
    from: &[u64],
    to: &[u64],
    steps: &[i64],
    spec: &QuadratureSpec,
) -> Result<AmplitudeTable> {
    match walk.lattice {
        Lattice::HalfLine => kmcg_table_halfline(walk, from, to, steps, spec),
        Lattice::Line => kmcg_table_line(walk, from, to, steps, spec),
    }
}

/// Converts a state over CMV-ordered indices to unfolded indices.
pub fn to_unfolded(lattice: Lattice, state: &BTreeMap<u64, C64>) -> StateVector {
    StateVector::from_pairs(
        lattice,
        state
            .iter()
            .map(|(&i, &a)| (state_from_index(lattice, i).unfolded(), a)),
    )
}

fn cmv_index(lattice: Lattice, unfolded: i64) -> Result<u64> {
    let s = PureState::from_unfolded(unfolded);
    amplitude_index(lattice, s.site, s.spin)
}

/// Inverse of [`to_unfolded`]; zero amplitudes are dropped.
pub fn to_cmv(state: &StateVector) -> Result<BTreeMap<u64, C64>> {
    let mut out = BTreeMap::new();
    for (&k, &a) in &state.amplitudes {
        if a != ZERO {
            out.insert(cmv_index(state.lattice, k)?, a);
        }
    }
    Ok(out)
}

/// Every CMV index a walk started on `support` can occupy after `n` steps.
pub fn reachable_indices(lattice: Lattice, support: &[u64], n: usize) -> Result<Vec<u64>> {
    let reach = n as i64 + 1;
    let mut out = std::collections::BTreeSet::new();
    for &j in support {
        let site = state_from_index(lattice, j).site;
        let lo = match lattice {
            Lattice::HalfLine => (site - reach).max(0),
            Lattice::Line => site - reach,
        };
        for s in lo..=site + reach {
            for spin in [Spin::Up, Spin::Down] {
                out.insert(amplitude_index(lattice, s, spin)?);
            }
        }
    }
    Ok(out.into_iter().collect())
}

/// `ψ U^n` through KMcG integrals for a state over CMV indices.
pub fn kmcg_evolve(
    walk: &WalkModel,
    initial: &BTreeMap<u64, C64>,
    n: usize,
    spec: &QuadratureSpec,
) -> Result<BTreeMap<u64, C64>> {
    let from: Vec<u64> = initial.keys().copied().collect();
    let to = reachable_indices(walk.lattice, &from, n)?;
    let table = kmcg_table(walk, &from, &to, &[n as i64], spec)?;
    let mut out = BTreeMap::new();
    for &k in &to {
        let v: C64 = initial
            .iter()
            .map(|(&j, &a)| a * table.get(j, k, n as i64))
            .sum();
        out.insert(k, v);
    }
    Ok(out)
}

/// Exact rows `e_j U^m`, `m = 0..=n`, for every basis state `j` in the
/// support of `initial` (unfolded indices). Keys use the CMV ordering.
pub fn direct_amplitudes(
    walk: &WalkModel,
    initial: &StateVector,
    n: usize,
) -> Result<AmplitudeTable> {
    let mut table = AmplitudeTable::new(walk.lattice, Method::Direct);
    for &d in initial.amplitudes.keys() {
        let j = cmv_index(walk.lattice, d)?;
        let mut cur = StateVector::basis(walk.lattice, d);
        for m in 0..=n {
            if m > 0 {
                cur = walk.step(&cur)?;
            }
            for (&e, &v) in &cur.amplitudes {
                if v != ZERO {
                    table
                        .entries
                        .insert((j, cmv_index(walk.lattice, e)?, m as i64), v);
                }
            }
        }
    }
    Ok(table)
}

/// `ψ U^n` for a state over unfolded indices.
pub fn evolve(walk: &WalkModel, initial: &StateVector, n: usize) -> Result<StateVector> {
    walk.evolve(initial, n)
}
