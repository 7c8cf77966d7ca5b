//! Carathéodory functions from closed forms or from the ratio limit of the
//! Szegő recurrence; weight recovery, mass-point detection and weak limits.

use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use crate::closed_forms::{constant_caratheodory, matrix_measure};
use crate::cmv::Lattice;
use crate::coin::{GaugeTransform, WalkModel};
use crate::error::{QrwError, Result};
use crate::kmcg::MeasureModel;
use crate::linalg::{cis, Coeff, C64, ONE, ZERO};
use crate::opuc::{laurent_values, VerblunskySequence};

/// Largest modulus accepted by [`caratheodory_ratio`].
pub const RATIO_GUARD: f64 = 0.999;
pub const RATIO_MAX_STEPS: usize = 10_000;
pub const RATIO_TOL: f64 = 1e-13;
/// Masses below this are not reported.
pub const MASS_THRESHOLD: f64 = 1e-6;
pub const SCAN_ANGLES: usize = 4096;
/// Horizon of the moment-decay certificate used by [`weak_limit`].
pub const WEAK_LIMIT_HORIZON: usize = 512;
pub const WEAK_LIMIT_THRESHOLD: f64 = 1e-3;

/// How the ratio iteration ended.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RatioDiagnostics {
    pub iterations: usize,
    /// Last relative difference of successive ratios.
    pub gap: f64,
}

/// Runs `φ*` and `ψ*` (parameters `α` and `−α`) jointly, dividing both by
/// `|φ*|` each step, until two successive ratios agree twice in a row.
fn ratio_core(
    alpha: impl Fn(usize) -> C64,
    z: C64,
    max_steps: usize,
) -> Result<(C64, RatioDiagnostics)> {
    if z == ZERO {
        return Ok((
            ONE,
            RatioDiagnostics {
                iterations: 0,
                gap: 0.0,
            },
        ));
    }
    let (mut p, mut ps) = (ONE, ONE);
    let (mut q, mut qs) = (ONE, ONE);
    let mut prev = ONE;
    let mut hits = 0;
    let mut gap = f64::INFINITY;
    for j in 0..max_steps {
        let a = alpha(j);
        let ac = a.conj();
        let (zp, zq) = (z * p, z * q);
        let (np, nps) = (zp - ac * ps, ps - a * zp);
        let (nq, nqs) = (zq + ac * qs, qs + a * zq);
        let s = 1.0 / nps.norm();
        p = np * s;
        ps = nps * s;
        q = nq * s;
        qs = nqs * s;
        let r = qs / ps;
        gap = (r - prev).norm() / r.norm().max(1.0);
        prev = r;
        if gap < RATIO_TOL {
            hits += 1;
            if hits >= 2 {
                return Ok((
                    r,
                    RatioDiagnostics {
                        iterations: j + 1,
                        gap,
                    },
                ));
            }
        } else {
            hits = 0;
        }
    }
    Err(QrwError::Convergence {
        last: prev,
        gap,
        iterations: max_steps,
    })
}

/// `F(z) = lim φ̃*_j(z)/φ*_j(z)` with `φ̃` the polynomials of `−α`.
pub fn caratheodory_ratio(alphas: &VerblunskySequence, z: C64) -> Result<C64> {
    caratheodory_ratio_diagnostics(alphas, z).map(|r| r.0)
}

pub fn caratheodory_ratio_diagnostics(
    alphas: &VerblunskySequence,
    z: C64,
) -> Result<(C64, RatioDiagnostics)> {
    if z.norm() > RATIO_GUARD {
        return Err(QrwError::Domain {
            what: format!("ratio-limit argument (guard {RATIO_GUARD})"),
            modulus: z.norm(),
        });
    }
    ratio_core(|j| alphas.get(j as i64), z, RATIO_MAX_STEPS)
}

#[derive(Clone, Debug)]
pub enum CaratheodorySource {
    /// Rotated closed form of `(a, 0, a, 0, …)`.
    Closed {
        a: C64,
        rotation: f64,
    },
    /// Half the trace of the line matrix function; its measure has the same
    /// mass points as the matrix measure.
    ClosedMatrixTrace {
        a: C64,
        rotation: f64,
    },
    Ratio(VerblunskySequence),
}

#[derive(Clone, Debug)]
pub struct CaratheodoryEvaluator {
    pub source: CaratheodorySource,
    cached_alphas: Arc<OnceLock<Vec<C64>>>,
}

impl CaratheodoryEvaluator {
    fn with_source(source: CaratheodorySource) -> Self {
        CaratheodoryEvaluator {
            source,
            cached_alphas: Arc::new(OnceLock::new()),
        }
    }

    pub fn closed(a: C64, rotation: f64) -> Self {
        Self::with_source(CaratheodorySource::Closed { a, rotation })
    }

    pub fn closed_matrix_trace(a: C64, rotation: f64) -> Self {
        Self::with_source(CaratheodorySource::ClosedMatrixTrace { a, rotation })
    }

    pub fn ratio(alphas: VerblunskySequence) -> Self {
        Self::with_source(CaratheodorySource::Ratio(alphas))
    }

    /// Evaluator for a walk's measure handle.
    pub fn from_measure(measure: &MeasureModel) -> Self {
        match measure {
            MeasureModel::ClosedScalar(m) => Self::closed(m.a, m.rotation),
            MeasureModel::ClosedMatrix(m) => Self::closed_matrix_trace(m.a, m.rotation),
            MeasureModel::Numeric(m) => m.evaluator.clone(),
        }
    }

    pub fn is_closed(&self) -> bool {
        !matches!(self.source, CaratheodorySource::Ratio(_))
    }

    fn alpha_table(&self, alphas: &VerblunskySequence) -> &Vec<C64> {
        self.cached_alphas
            .get_or_init(|| (0..RATIO_MAX_STEPS as i64).map(|j| alphas.get(j)).collect())
    }

    /// `F(z)` for `|z| < 1`, no guard band.
    fn eval_raw(&self, z: C64) -> Result<(C64, RatioDiagnostics)> {
        let exact = RatioDiagnostics {
            iterations: 0,
            gap: 0.0,
        };
        match &self.source {
            CaratheodorySource::Closed { a, rotation } => {
                Ok((constant_caratheodory(*a, z * cis(-rotation))?, exact))
            }
            CaratheodorySource::ClosedMatrixTrace { a, rotation } => {
                let f = matrix_measure(*a, *rotation)?.caratheodory(z)?;
                Ok((f.trace() * 0.5, exact))
            }
            CaratheodorySource::Ratio(alphas) => {
                if z.norm() >= 1.0 {
                    return Err(QrwError::Domain {
                        what: "Carathéodory argument".into(),
                        modulus: z.norm(),
                    });
                }
                let table = self.alpha_table(alphas);
                ratio_core(|j| table[j], z, RATIO_MAX_STEPS)
            }
        }
    }

    /// `F(z)`; the ratio source enforces the guard band `|z| ≤ 0.999`.
    pub fn evaluate(&self, z: C64) -> Result<C64> {
        self.evaluate_with_diagnostics(z).map(|r| r.0)
    }

    pub fn evaluate_with_diagnostics(&self, z: C64) -> Result<(C64, RatioDiagnostics)> {
        if let CaratheodorySource::Ratio(_) = self.source {
            if z.norm() > RATIO_GUARD {
                return Err(QrwError::Domain {
                    what: format!("ratio-limit argument (guard {RATIO_GUARD})"),
                    modulus: z.norm(),
                });
            }
        }
        self.eval_raw(z)
    }

    /// `μ_0..μ_n` by trapezoid sampling of `F` on `|z| = r`, `μ_k = conj(F_k)/2`.
    ///
    /// `r = max(1/2, 0.01^{1/n})` keeps the amplification `r^{-n}` of
    /// evaluation errors at most 100.
    pub fn maclaurin_moments(&self, n: usize) -> Result<Vec<C64>> {
        let r = if n == 0 {
            0.5
        } else {
            0.5f64.max(0.01f64.powf(1.0 / n as f64))
        };
        let samples = 256.max(8 * n);
        let mut values = Vec::with_capacity(samples);
        for s in 0..samples {
            let t = 2.0 * PI * s as f64 / samples as f64;
            values.push(self.eval_raw(cis(t) * r)?.0);
        }
        let mut out = Vec::with_capacity(n + 1);
        out.push(ONE);
        let mut rk = 1.0;
        for k in 1..=n {
            rk *= r;
            let mut acc = ZERO;
            for (s, v) in values.iter().enumerate() {
                let t = 2.0 * PI * ((s * k) % samples) as f64 / samples as f64;
                acc += *v * cis(-t);
            }
            let fk = acc / (samples as f64 * rk);
            out.push(fk.conj() * 0.5);
        }
        Ok(out)
    }
}

/// Radii `1 − h` used for weight recovery.
fn weight_radii(f: &CaratheodoryEvaluator) -> [f64; 3] {
    if f.is_closed() {
        [1e-4, 1e-5, 1e-6]
    } else {
        // the ratio limit needs ~25/h steps on the support
        [1e-2, 5e-3, 2.5e-3]
    }
}

/// Value at `h = 0` of the quadratic through three samples.
fn richardson(hs: &[f64; 3], vs: &[f64; 3]) -> f64 {
    let mut acc = 0.0;
    for i in 0..3 {
        let mut l = 1.0;
        for j in 0..3 {
            if i != j {
                l *= hs[j] / (hs[j] - hs[i]);
            }
        }
        acc += l * vs[i];
    }
    acc
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RecoveredWeight {
    pub value: f64,
    /// `Re F` grew like `1/(1 − r)`: a candidate mass point, not a density.
    pub divergent: bool,
}

/// `w(θ) = lim_{r↑1} Re F(r e^{iθ})`, extrapolated in `1 − r`, clamped at 0.
pub fn recover_weight(f: &CaratheodoryEvaluator, theta: f64) -> Result<RecoveredWeight> {
    let hs = weight_radii(f);
    let mut vs = [0.0; 3];
    for (v, h) in vs.iter_mut().zip(hs) {
        *v = f.eval_raw(cis(theta) * (1.0 - h))?.0.re;
    }
    let growth = vs[2].abs() / vs[1].abs().max(f64::MIN_POSITIVE);
    let step = hs[1] / hs[2];
    let divergent = vs[2].abs() > 10.0 && growth > 0.75 * step;
    Ok(RecoveredWeight {
        value: richardson(&hs, &vs).max(0.0),
        divergent,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MassPoint {
    pub location: C64,
    pub mass: f64,
}

/// Golden-section maximization of `g` on `[lo, hi]`.
fn golden_max(mut lo: f64, mut hi: f64, g: impl Fn(f64) -> f64, iters: usize) -> f64 {
    let inv = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv * (hi - lo);
    let mut d = lo + inv * (hi - lo);
    let (mut gc, mut gd) = (g(c), g(d));
    for _ in 0..iters {
        if gc > gd {
            hi = d;
            d = c;
            gd = gc;
            c = hi - inv * (hi - lo);
            gc = g(c);
        } else {
            lo = c;
            c = d;
            gc = gd;
            d = lo + inv * (hi - lo);
            gd = g(d);
        }
    }
    0.5 * (lo + hi)
}

/// Mass estimate `(1 − r)/(1 + r)·|F|` at the peak near `theta`, refining the
/// angle at each radius.
fn radial_mass(f: &CaratheodoryEvaluator, theta: f64, window: f64) -> Option<(f64, [f64; 4])> {
    let mut t = theta;
    let mut w = window;
    let mut est = [0.0; 4];
    for (i, k) in (4..=7).enumerate() {
        let h = 10f64.powi(-k);
        let r = 1.0 - h;
        let g = |s: f64| f.eval_raw(cis(s) * r).map(|v| v.0.norm()).unwrap_or(-1.0);
        t = golden_max(t - w, t + w, g, 80);
        let v = f.eval_raw(cis(t) * r).ok()?.0;
        est[i] = h / (2.0 - h) * v.norm();
        w = 20.0 * h;
    }
    Some((t, est))
}

/// Scans the circle just inside `|z| = 1` for poles of `F` and estimates their
/// masses by the radial limit `lim (1 − r)/2 · F(r z_0)`.
pub fn find_mass_points(f: &CaratheodoryEvaluator) -> Vec<MassPoint> {
    let r0 = 1.0 - 1e-4;
    let n = SCAN_ANGLES;
    let step = 2.0 * PI / n as f64;
    let scan: Vec<Option<f64>> = (0..n)
        .map(|i| {
            let t = -PI + step * i as f64;
            f.eval_raw(cis(t) * r0).ok().map(|v| v.0.norm())
        })
        .collect();
    let mut found: Vec<MassPoint> = Vec::new();
    for i in 0..n {
        let Some(v) = scan[i] else { continue };
        let left = scan[(i + n - 1) % n].unwrap_or(0.0);
        let right = scan[(i + 1) % n].unwrap_or(0.0);
        if !(v >= left && v > right) || 0.5 * 1e-4 * v < 1e-7 {
            continue;
        }
        let theta = -PI + step * i as f64;
        let Some((t, est)) = radial_mass(f, theta, step) else {
            continue;
        };
        let (m6, m7) = (est[2], est[3]);
        // linear extrapolation in h from the last two radii
        let mass = m7 + (m7 - m6) / 9.0;
        let stable = (m7 - m6).abs() <= 1e-3 * m7.max(MASS_THRESHOLD);
        if !stable || mass <= MASS_THRESHOLD {
            continue;
        }
        let location = cis(t);
        if found.iter().all(|p| (p.location - location).norm() > 1e-6) {
            found.push(MassPoint { location, mass });
        }
    }
    found
}

/// Numeric measure: a ratio-limit evaluator with lazily recovered weight
/// samples and mass points.
#[derive(Clone, Debug)]
pub struct NumericMeasure {
    pub evaluator: CaratheodoryEvaluator,
    pub grid: usize,
    weights: Arc<OnceLock<Vec<f64>>>,
    masses: Arc<OnceLock<Vec<MassPoint>>>,
}

impl NumericMeasure {
    pub fn new(evaluator: CaratheodoryEvaluator) -> Self {
        Self::with_grid(evaluator, 1024)
    }

    pub fn with_grid(evaluator: CaratheodoryEvaluator, grid: usize) -> Self {
        NumericMeasure {
            evaluator,
            grid: grid.max(8),
            weights: Arc::new(OnceLock::new()),
            masses: Arc::new(OnceLock::new()),
        }
    }

    pub fn angle(&self, i: usize) -> f64 {
        -PI + 2.0 * PI * i as f64 / self.grid as f64
    }

    /// Recovered weight at the grid angles; divergent samples are set to 0.
    pub fn weights(&self) -> &[f64] {
        self.weights.get_or_init(|| {
            (0..self.grid)
                .map(|i| match recover_weight(&self.evaluator, self.angle(i)) {
                    Ok(w) if !w.divergent => w.value,
                    _ => 0.0,
                })
                .collect()
        })
    }

    pub fn mass_points(&self) -> &[MassPoint] {
        self.masses
            .get_or_init(|| find_mass_points(&self.evaluator))
    }

    /// Trapezoid sum over the weight grid plus the detected masses.
    pub fn integrate(&self, f: impl Fn(C64) -> Vec<C64>) -> Result<Vec<C64>> {
        let mut total: Vec<C64> = Vec::new();
        let weights = self.weights();
        for (i, w) in weights.iter().enumerate() {
            if *w == 0.0 {
                continue;
            }
            let v = f(cis(self.angle(i)));
            if total.is_empty() {
                total = vec![ZERO; v.len()];
            }
            for (t, x) in total.iter_mut().zip(v) {
                *t += x * (*w / self.grid as f64);
            }
        }
        for m in self.mass_points() {
            let v = f(m.location);
            if total.is_empty() {
                total = vec![ZERO; v.len()];
            }
            for (t, x) in total.iter_mut().zip(v) {
                *t += x * m.mass;
            }
        }
        Ok(total)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AsymptoticKind {
    ZeroWeakLimit,
    Projector,
}

/// Heuristic moment-decay certificate at a fixed horizon.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentEvidence {
    pub horizon: usize,
    /// `|μ_horizon|` (largest entry for matrix moments).
    pub magnitude: f64,
    pub threshold: f64,
    pub below_threshold: bool,
    /// `max |μ_n|` over `[horizon/2, horizon]` is below the max over `[horizon/4, horizon/2)`.
    pub decreasing: bool,
}

/// `U^∞_{j,k} = μ({z_0}) X_j(z_0) conj(X_k(z_0))` for a half-line walk.
#[derive(Clone, Debug)]
pub struct Projector {
    pub z0: C64,
    pub mass: f64,
    alphas: VerblunskySequence,
    gauge: GaugeTransform,
}

impl Projector {
    /// `X_0(z_0), …, X_{count−1}(z_0)`.
    pub fn values(&self, count: usize) -> Result<Vec<C64>> {
        let xs = laurent_values(&self.alphas, count, self.z0)?;
        Ok(xs
            .into_iter()
            .enumerate()
            .map(|(j, x)| x * self.gauge.lambda(j as i64))
            .collect())
    }

    pub fn entry(&self, j: u64, k: u64) -> Result<C64> {
        let x = self.values(j.max(k) as usize + 1)?;
        Ok(x[j as usize] * x[k as usize].conj() * self.mass)
    }

    /// `z_0^n`, the phase with `z_0^{−n} U^n → U^∞`.
    pub fn phase(&self, n: i64) -> C64 {
        self.z0.powi(n as i32)
    }
}

#[derive(Clone, Debug)]
pub struct AsymptoticResult {
    pub kind: AsymptoticKind,
    pub z0: Option<C64>,
    pub mu_infinity: Option<C64>,
    pub evidence: MomentEvidence,
    pub projector: Option<Projector>,
}

impl AsymptoticResult {
    /// `U^∞_{j,k}`; zero for a vanishing weak limit.
    pub fn projector_entry(&self, j: u64, k: u64) -> Result<C64> {
        match &self.projector {
            Some(p) => p.entry(j, k),
            None => Ok(ZERO),
        }
    }
}

fn moment_evidence(measure: &MeasureModel) -> Result<MomentEvidence> {
    let h = WEAK_LIMIT_HORIZON;
    let mags: Vec<f64> = match measure {
        MeasureModel::ClosedScalar(m) => m.moments_series(h).iter().map(|v| v.norm()).collect(),
        MeasureModel::ClosedMatrix(m) => {
            m.moments_series(h).iter().map(|v| v.magnitude()).collect()
        }
        MeasureModel::Numeric(m) => m
            .evaluator
            .maclaurin_moments(h)?
            .iter()
            .map(|v| v.norm())
            .collect(),
    };
    let max_over = |a: usize, b: usize| mags[a..b].iter().copied().fold(0.0, f64::max);
    let magnitude = mags[h];
    Ok(MomentEvidence {
        horizon: h,
        magnitude,
        threshold: WEAK_LIMIT_THRESHOLD,
        below_threshold: magnitude < WEAK_LIMIT_THRESHOLD,
        decreasing: max_over(h / 2, h + 1) < max_over(h / 4, h / 2),
    })
}

/// Weak limit of `U^n` (up to the phases `z_0^n`).
///
/// The decision rests on the mass points of the measure: none gives the zero
/// weak limit, one gives the rank-one projector. The moment decay at the
/// horizon is reported as supporting evidence only.
pub fn weak_limit(walk: &WalkModel) -> Result<AsymptoticResult> {
    let measure = walk
        .measure
        .as_ref()
        .ok_or_else(|| QrwError::Unsupported("walk has no spectral measure".into()))?;
    let masses: Vec<MassPoint> = match measure {
        MeasureModel::Numeric(m) => m.mass_points().to_vec(),
        other => find_mass_points(&CaratheodoryEvaluator::from_measure(other)),
    };
    let evidence = moment_evidence(measure)?;
    match masses.as_slice() {
        [] => Ok(AsymptoticResult {
            kind: AsymptoticKind::ZeroWeakLimit,
            z0: None,
            mu_infinity: None,
            evidence,
            projector: None,
        }),
        [p] => {
            if walk.lattice != Lattice::HalfLine {
                return Err(QrwError::Unsupported(
                    "projector for a matrix measure with a mass point".into(),
                ));
            }
            let mass = match measure {
                // exact mass when the closed form is available
                MeasureModel::ClosedScalar(m) => m.mass_point().map_or(p.mass, |(_, mm)| mm),
                _ => p.mass,
            };
            let z0 = match measure {
                MeasureModel::ClosedScalar(m) => m.mass_point().map_or(p.location, |(z, _)| z),
                _ => p.location,
            };
            Ok(AsymptoticResult {
                kind: AsymptoticKind::Projector,
                z0: Some(z0),
                mu_infinity: Some(C64::new(mass, 0.0)),
                evidence,
                projector: Some(Projector {
                    z0,
                    mass,
                    alphas: walk.verblunsky.clone(),
                    gauge: walk.gauge.clone(),
                }),
            })
        }
        _ => Err(QrwError::Unsupported(format!(
            "{} mass points; at most one is supported",
            masses.len()
        ))),
    }
}
