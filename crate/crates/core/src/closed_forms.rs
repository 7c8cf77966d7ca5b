//! Closed-form spectral data for constant coins: the scalar measure and
//! Laurent polynomials of the parameters `(a, 0, a, 0, …)`, the 2×2 matrix
//! measure and polynomials on the line, and the coefficient sequences of the
//! Hadamard-type examples.

use std::f64::consts::PI;

use crate::coin::{Coin, ConstantParams, GaugeTransform};
use crate::error::{check_disk, QrwError, Result};
use crate::laurent::LaurentPoly;
use crate::linalg::{cis, Cell, Coeff, Mat2, C64, I, ONE, ZERO};
use crate::opuc::rotation_phase;

/// Below this `|Re a|` the mass point is treated as absent and merged with a
/// support endpoint.
pub const MASS_CUTOFF: f64 = 1e-14;

/// `U_n(x)` by the three-term recurrence, `U_{-1} = 0`, `U_0 = 1`.
pub fn chebyshev_u(n: i64, x: C64) -> C64 {
    if n < 0 {
        return ZERO;
    }
    let (mut prev, mut cur) = (ZERO, ONE);
    for _ in 0..n {
        let next = x * 2.0 * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `U_n(y(z))` as a Laurent polynomial in `z`.
pub fn chebyshev_u_poly(n: i64, y: &LaurentPoly<C64>) -> LaurentPoly<C64> {
    if n < 0 {
        return LaurentPoly::zero();
    }
    let two_y = y.scale(C64::new(2.0, 0.0));
    let (mut prev, mut cur) = (LaurentPoly::zero(), LaurentPoly::one());
    for _ in 0..n {
        let next = &two_y.mul(&cur) - &prev;
        prev = cur;
        cur = next;
    }
    cur
}

fn rho_of(a: C64) -> f64 {
    let r = a.norm();
    ((1.0 - r) * (1.0 + r)).sqrt()
}

/// Which support arc a quadrature node sits on (unrotated angles).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Arc {
    /// `[η, π − η]`
    Upper,
    /// `[η − π, −η]`
    Lower,
}

/// Accurate `(sin θ − sin η, sin θ + sin η)` from the distances `dl`, `dr`
/// to the arc endpoints.
fn sine_gaps(arc: Arc, dl: f64, dr: f64) -> (f64, f64) {
    let (sl, cl) = (0.5 * dl).sin_cos();
    let (sr, cr) = (0.5 * dr).sin_cos();
    match arc {
        Arc::Upper => (2.0 * sl * sr, 2.0 * cl * cr),
        Arc::Lower => (-2.0 * cl * cr, -2.0 * sl * sr),
    }
}

/// Scalar measure of the parameters `(a, 0, a, 0, …)` rotated by `rotation`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClosedFormMeasure {
    pub a: C64,
    /// `sin η = |a|`, `η ∈ [0, π/2)`.
    pub eta: f64,
    /// `sin β = −Im a`, `sign(cos β) = sign(Re a)`.
    pub beta: f64,
    pub mass: f64,
    pub rotation: f64,
}

pub fn constant_measure(a: C64, rotation: f64) -> Result<ClosedFormMeasure> {
    check_disk("a", a.norm())?;
    let eta = a.norm().asin();
    let im = a.im;
    let cos_abs = ((1.0 - im) * (1.0 + im)).sqrt();
    let (beta, mass) = if a.re.abs() < MASS_CUTOFF {
        // the mass point merges with the endpoint where sin θ = −Im a
        (if im >= 0.0 { -eta } else { eta }, 0.0)
    } else {
        ((-im).atan2(a.re.signum() * cos_abs), a.re.abs() / cos_abs)
    };
    Ok(ClosedFormMeasure {
        a,
        eta,
        beta,
        mass,
        rotation,
    })
}

impl ClosedFormMeasure {
    pub fn rho(&self) -> f64 {
        rho_of(self.a)
    }

    /// Support arcs before rotation, as `(arc, lo, hi)`.
    pub fn arcs(&self) -> [(Arc, f64, f64); 2] {
        [
            (Arc::Upper, self.eta, PI - self.eta),
            (Arc::Lower, self.eta - PI, -self.eta),
        ]
    }

    /// Rotated mass point and its mass, if present.
    pub fn mass_point(&self) -> Option<(C64, f64)> {
        (self.mass > 0.0).then(|| (cis(self.beta + self.rotation), self.mass))
    }

    /// `w(θ̂)` at a node given by its distances to the arc endpoints.
    pub fn weight_at(&self, arc: Arc, dl: f64, dr: f64) -> f64 {
        let (sm, sp) = sine_gaps(arc, dl, dr);
        let num = (sm * sp).max(0.0).sqrt();
        let den = if self.mass == 0.0 {
            if self.a.norm() == 0.0 {
                return 1.0;
            }
            // sin β = ∓ sin η exactly
            if self.a.im >= 0.0 {
                sp
            } else {
                sm
            }
        } else {
            let theta = match arc {
                Arc::Upper => self.eta + dl,
                Arc::Lower => self.eta - PI + dl,
            };
            2.0 * (0.5 * (theta + self.beta)).cos() * (0.5 * (theta - self.beta)).sin()
        };
        num / den.abs()
    }

    /// `w(θ)` at a rotated angle; zero in the gaps.
    pub fn weight(&self, theta: f64) -> f64 {
        let t = wrap(theta - self.rotation);
        match locate(self.eta, t) {
            Some((arc, dl, dr)) => self.weight_at(arc, dl, dr),
            None => 0.0,
        }
    }

    /// Rotated Carathéodory function `F(z) = F̂(e^{-iϑ} z)`.
    pub fn caratheodory(&self, z: C64) -> Result<C64> {
        constant_caratheodory(self.a, z * cis(-self.rotation))
    }

    /// Maclaurin coefficients `F_0..F_n` of the rotated `F`.
    pub fn series(&self, n: usize) -> Vec<C64> {
        let a = self.a;
        let g = sqrt_series(&quartic(a), n);
        let num: Vec<C64> = (0..=n)
            .map(|k| {
                let mut v = -g[k];
                if k == 1 {
                    v -= 2.0 * a.re;
                }
                v
            })
            .collect();
        let den = [C64::new(-1.0, 0.0), C64::new(0.0, 2.0 * a.im), ONE];
        let f = divide_series(&num, &den, n);
        rotate_series(f, self.rotation)
    }

    /// `μ_0..μ_n` from the exact power series: `μ_k = conj(F_k)/2`, `μ_0 = 1`.
    pub fn moments_series(&self, n: usize) -> Vec<C64> {
        let f = self.series(n);
        (0..=n)
            .map(|k| if k == 0 { ONE } else { f[k].conj() * 0.5 })
            .collect()
    }
}

/// Unrotated `F̂(w) = −(g(w) + 2 Re a · w)/(w² − 1 + 2i Im a · w)` with
/// `g² = w⁴ + (4|a|² − 2) w² + 1`, `g(0) = 1`.
///
/// Of the two square roots, the one with `Re(g · conj(w² + 1)) > 0` is the
/// analytic continuation from `g(0) = 1`; it is the choice `|λ+| > |λ−|`.
pub fn constant_caratheodory(a: C64, w: C64) -> Result<C64> {
    check_disk("a", a.norm())?;
    if w.norm() >= 1.0 {
        return Err(QrwError::Domain {
            what: "Carathéodory argument".into(),
            modulus: w.norm(),
        });
    }
    if w == ZERO {
        return Ok(ONE);
    }
    let g = branch_root(a, w);
    let num = -(g + w * (2.0 * a.re));
    let den = w * w - 1.0 + I * (2.0 * a.im) * w;
    Ok(num / den)
}

fn branch_root(a: C64, w: C64) -> C64 {
    let w2 = w * w;
    let q = w2 * w2 + w2 * (4.0 * a.norm_sqr() - 2.0) + 1.0;
    let g = q.sqrt();
    if (g * (w2 + 1.0).conj()).re >= 0.0 {
        g
    } else {
        -g
    }
}

fn quartic(a: C64) -> [C64; 5] {
    [
        ONE,
        ZERO,
        C64::new(4.0 * a.norm_sqr() - 2.0, 0.0),
        ZERO,
        ONE,
    ]
}

/// Power series of `sqrt(q)` with constant term 1.
fn sqrt_series(q: &[C64], n: usize) -> Vec<C64> {
    let mut g = vec![ZERO; n + 1];
    g[0] = ONE;
    for k in 1..=n {
        let mut s = q.get(k).copied().unwrap_or(ZERO);
        for i in 1..k {
            s -= g[i] * g[k - i];
        }
        g[k] = s * 0.5;
    }
    g
}

fn divide_series(num: &[C64], den: &[C64], n: usize) -> Vec<C64> {
    let mut out = vec![ZERO; n + 1];
    for k in 0..=n {
        let mut s = num.get(k).copied().unwrap_or(ZERO);
        for (i, d) in den.iter().enumerate().skip(1) {
            if i <= k {
                s -= *d * out[k - i];
            }
        }
        out[k] = s / den[0];
    }
    out
}

fn rotate_series<T: Copy + std::ops::Mul<C64, Output = T>>(f: Vec<T>, rotation: f64) -> Vec<T> {
    if rotation == 0.0 {
        return f;
    }
    f.into_iter()
        .enumerate()
        .map(|(k, c)| c * cis(-(k as f64) * rotation))
        .collect()
}

fn wrap(theta: f64) -> f64 {
    let t = (theta + PI).rem_euclid(2.0 * PI) - PI;
    if t <= -PI {
        t + 2.0 * PI
    } else {
        t
    }
}

/// Arc and endpoint distances of an unrotated angle in `(−π, π]`.
fn locate(eta: f64, t: f64) -> Option<(Arc, f64, f64)> {
    if t >= eta && t <= PI - eta {
        Some((Arc::Upper, t - eta, PI - eta - t))
    } else if t >= eta - PI && t <= -eta {
        Some((Arc::Lower, t - (eta - PI), -eta - t))
    } else if eta == 0.0 && t == -PI {
        Some((Arc::Lower, 0.0, PI))
    } else {
        None
    }
}

/// Orthonormal Laurent polynomials of `(a, 0, a, 0, …)`:
/// `x_{2n−1} = U_n(y) − ρ⁻¹(z + a) U_{n−1}(y)`,
/// `x_{2n} = U_n(y) − ρ⁻¹(z⁻¹ + ā) U_{n−1}(y)`, `y = (z + z⁻¹)/(2ρ)`.
pub fn constant_laurent(a: C64, index: usize) -> Result<LaurentPoly<C64>> {
    check_disk("a", a.norm())?;
    if index == 0 {
        return Ok(LaurentPoly::one());
    }
    let rho = rho_of(a);
    let y = LaurentPoly::from_coeffs(-1, vec![ONE, ZERO, ONE]).scale(C64::new(0.5 / rho, 0.0));
    let n = index.div_ceil(2) as i64;
    let un = chebyshev_u_poly(n, &y);
    let un1 = chebyshev_u_poly(n - 1, &y);
    let lin = if index % 2 == 1 {
        LaurentPoly::from_coeffs(0, vec![a, ONE])
    } else {
        LaurentPoly::from_coeffs(-1, vec![ONE, a.conj()])
    };
    Ok((&un - &lin.mul(&un1).scale(C64::new(1.0 / rho, 0.0))).prune())
}

/// 2×2 matrix measure of a constant coin on the line, rotated by `rotation`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClosedFormMatrixMeasure {
    pub a: C64,
    pub eta: f64,
    pub rotation: f64,
}

pub fn matrix_measure(a: C64, rotation: f64) -> Result<ClosedFormMatrixMeasure> {
    check_disk("a", a.norm())?;
    Ok(ClosedFormMatrixMeasure {
        a,
        eta: a.norm().asin(),
        rotation,
    })
}

/// Matrix measure of the walk on the line with the given constant coin. A
/// diagonal coin gives Lebesgue measure times the identity.
pub fn line_matrix_measure(coin: &Coin) -> Result<ClosedFormMatrixMeasure> {
    let p = ConstantParams::of(coin);
    matrix_measure(p.a, p.vartheta)
}

impl ClosedFormMatrixMeasure {
    pub fn arcs(&self) -> [(Arc, f64, f64); 2] {
        [
            (Arc::Upper, self.eta, PI - self.eta),
            (Arc::Lower, self.eta - PI, -self.eta),
        ]
    }

    /// `W = (sin²θ − sin²η)^{-1/2} [[|sin θ|, ∓iā], [±ia, |sin θ|]]`, upper sign
    /// on the upper arc.
    pub fn weight_at(&self, arc: Arc, dl: f64, dr: f64) -> Mat2 {
        let (sm, sp) = sine_gaps(arc, dl, dr);
        let s = 0.5 * (sm + sp);
        let scale = 1.0 / (sm * sp).max(0.0).sqrt();
        let sign = if arc == Arc::Upper { 1.0 } else { -1.0 };
        let a = self.a;
        let diag = C64::new(s.abs(), 0.0);
        Mat2::new(diag, -I * a.conj() * sign, I * a * sign, diag) * C64::new(scale, 0.0)
    }

    /// `W` at a rotated angle; zero in the gaps.
    pub fn weight(&self, theta: f64) -> Mat2 {
        let t = wrap(theta - self.rotation);
        match locate(self.eta, t) {
            Some((arc, dl, dr)) => self.weight_at(arc, dl, dr),
            None => Mat2::zero(),
        }
    }

    /// Rotated `F(z) = F̂(e^{-iϑ}z)` with
    /// `F̂(w) = −(1/g(w)) [[w² − 1, 2āw], [−2aw, w² − 1]]`.
    pub fn caratheodory(&self, z: C64) -> Result<Mat2> {
        let w = z * cis(-self.rotation);
        if w.norm() >= 1.0 {
            return Err(QrwError::Domain {
                what: "Carathéodory argument".into(),
                modulus: w.norm(),
            });
        }
        let g = branch_root(self.a, w);
        let d = w * w - 1.0;
        let m = Mat2::new(d, w * self.a.conj() * 2.0, -w * self.a * 2.0, d);
        Ok(m * (-ONE / g))
    }

    /// The numerator matrix `[[w − 1/w, 2ā], [−2a, w − 1/w]]` at the unrotated point.
    pub fn numerator(&self, w: C64) -> Mat2 {
        let d = w - ONE / w;
        Mat2::new(d, self.a.conj() * 2.0, -self.a * 2.0, d)
    }

    pub fn series(&self, n: usize) -> Vec<Mat2> {
        let g = sqrt_series(&quartic(self.a), n);
        let h = divide_series(&[ONE], &g, n);
        let a = self.a;
        let f: Vec<Mat2> = (0..=n)
            .map(|k| {
                let hk = h[k];
                let hk1 = if k >= 1 { h[k - 1] } else { ZERO };
                let hk2 = if k >= 2 { h[k - 2] } else { ZERO };
                let d = hk - hk2;
                Mat2::new(d, -(a.conj() * 2.0) * hk1, a * 2.0 * hk1, d)
            })
            .collect();
        rotate_series(f, self.rotation)
    }

    /// `μ_k = F_k† / 2`, `μ_0 = 1`.
    pub fn moments_series(&self, n: usize) -> Vec<Mat2> {
        self.series(n)
            .into_iter()
            .enumerate()
            .map(|(k, f)| {
                if k == 0 {
                    Mat2::identity()
                } else {
                    f.adjoint() * C64::new(0.5, 0.0)
                }
            })
            .collect()
    }

    /// `P = (1/√2)[[1, −iā/|a|], [−ia/|a|, 1]]`, diagonalizing `[[0, −ā], [a, 0]]`.
    pub fn diagonalizer(&self) -> Option<Mat2> {
        diagonalizer(self.a)
    }
}

pub fn diagonalizer(a: C64) -> Option<Mat2> {
    let r = a.norm();
    if r == 0.0 {
        return None;
    }
    let u = a / r;
    Some(
        Mat2::new(ONE, -I * u.conj(), -I * u, ONE) * C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
    )
}

/// Unrotated, ungauged matrix polynomials:
/// `X̂_{2j−1} = U_j(y)·1 − ρ⁻¹[[z, −ā], [a, z]] U_{j−1}(y)`,
/// `X̂_{2j}(z) = X̂_{2j−1}(1/z̄)†`.
pub fn line_matrix_laurent_hat(a: C64, index: usize) -> Result<LaurentPoly<Mat2>> {
    check_disk("a", a.norm())?;
    if index == 0 {
        return Ok(LaurentPoly::constant(Mat2::identity()));
    }
    let rho = rho_of(a);
    let y = LaurentPoly::from_coeffs(-1, vec![ONE, ZERO, ONE]).scale(C64::new(0.5 / rho, 0.0));
    let j = index.div_ceil(2) as i64;
    let uj = chebyshev_u_poly(j, &y).map(Mat2::scalar);
    let uj1 = chebyshev_u_poly(j - 1, &y);
    let lin = LaurentPoly::from_coeffs(
        0,
        vec![Mat2::new(ZERO, -a.conj(), a, ZERO), Mat2::identity()],
    );
    let odd = (&uj - &lin.mul_scalar_poly(&uj1).scale(C64::new(1.0 / rho, 0.0))).prune();
    Ok(if index % 2 == 1 {
        odd
    } else {
        odd.reflect_adjoint()
    })
}

/// Matrix Laurent polynomials `X_j = Λ_j x_j` of the constant-coin walk on
/// the line, with the rotation by ϑ and the gauge blocks applied.
pub fn line_matrix_laurent(coin: &Coin, index: usize) -> Result<LaurentPoly<Mat2>> {
    if coin.is_diagonal() {
        return Err(QrwError::Degenerate(
            "diagonal coin: use the free walk polynomials".into(),
        ));
    }
    let p = ConstantParams::of(coin);
    let hat = line_matrix_laurent_hat(p.a, index)?;
    let rotated = hat
        .substitute_rotation(p.vartheta)
        .scale(cis(rotation_phase(index) * p.vartheta));
    let gauge = GaugeTransform::constant(p.sigma1, p.sigma2);
    Ok(rotated.left_mul(&gauge.block(index as i64)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MomentKind {
    /// `1/sqrt(1 + z) = Σ c_n z^n`
    C,
    /// `sqrt(1 + z) = Σ ĉ_n z^n`
    CHat,
    /// `d_n = ĉ_0 + … + ĉ_n`
    D,
}

/// Cached coefficient sequence, filled once at construction.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentCoeffs {
    pub kind: MomentKind,
    pub values: Vec<f64>,
}

impl MomentCoeffs {
    pub fn new(kind: MomentKind, len: usize) -> Self {
        let mut values = Vec::with_capacity(len);
        match kind {
            MomentKind::C => {
                let mut c = 1.0;
                for n in 0..len {
                    if n > 0 {
                        c *= -(1.0 - 1.0 / (2.0 * n as f64));
                    }
                    values.push(c);
                }
            }
            MomentKind::CHat | MomentKind::D => {
                let mut prod = 1.0;
                let mut sum = 0.0;
                for n in 0..len {
                    let c = match n {
                        0 => 1.0,
                        1 => 0.5,
                        _ => {
                            prod *= 1.0 - 1.5 / n as f64;
                            let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
                            0.5 * sign * prod
                        }
                    };
                    sum += c;
                    values.push(if kind == MomentKind::D { sum } else { c });
                }
            }
        }
        MomentCoeffs { kind, values }
    }

    pub fn get(&self, m: usize) -> f64 {
        self.values[m]
    }
}

pub fn moment_coeff(kind: MomentKind, m: usize) -> f64 {
    MomentCoeffs::new(kind, m + 1).get(m)
}
