//! Small dense complex algebra: 2×2 matrices, 2-component row vectors, and the
//! `Coeff`/`Cell` traits that let the Laurent-polynomial and CMV code run
//! unchanged over scalars and 2×2 blocks.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// `e^{iθ}`.
#[inline]
pub fn cis(theta: f64) -> C64 {
    C64::new(theta.cos(), theta.sin())
}

/// Linear-space element that can serve as a Laurent coefficient.
pub trait Coeff:
    Copy
    + fmt::Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + Mul<C64, Output = Self>
{
    fn zero() -> Self;
    /// Largest entry magnitude; used for pruning and residual norms.
    fn magnitude(&self) -> f64;
    fn is_finite(&self) -> bool;
    /// Entries in row-major order.
    fn components(&self) -> Vec<C64>;
}

/// Coefficient ring of a CMV operator: complex scalars or 2×2 blocks.
pub trait Cell: Coeff + Mul<Output = Self> {
    /// Number of scalar lattice sites carried by one cell.
    const DIM: usize;
    /// Row vector acted on from the right by a cell.
    type Row: Coeff;

    fn identity() -> Self;
    fn adjoint(&self) -> Self;
    fn inverse(&self) -> Option<Self>;
    /// Operator norm.
    fn norm(&self) -> f64;
    /// `((1 − α†α)^{1/2}, (1 − αα†)^{1/2})`.
    fn defect_roots(&self) -> (Self, Self);
    fn row_mul(row: Self::Row, m: &Self) -> Self::Row;
    fn row_get(row: &Self::Row, comp: usize) -> C64;
    fn row_set(row: &mut Self::Row, comp: usize, value: C64);
    fn zero_row() -> Self::Row;
}

impl Coeff for C64 {
    fn zero() -> Self {
        ZERO
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
    fn components(&self) -> Vec<C64> {
        vec![*self]
    }
}

impl Cell for C64 {
    const DIM: usize = 1;
    type Row = C64;

    fn identity() -> Self {
        ONE
    }
    fn adjoint(&self) -> Self {
        self.conj()
    }
    fn inverse(&self) -> Option<Self> {
        if self.norm() == 0.0 {
            None
        } else {
            Some(ONE / *self)
        }
    }
    fn norm(&self) -> f64 {
        Complex64::norm(*self)
    }
    fn defect_roots(&self) -> (Self, Self) {
        let r = self.norm();
        let rho = C64::new(((1.0 - r) * (1.0 + r)).max(0.0).sqrt(), 0.0);
        (rho, rho)
    }
    fn row_mul(row: C64, m: &Self) -> C64 {
        row * m
    }
    fn row_get(row: &C64, _comp: usize) -> C64 {
        *row
    }
    fn row_set(row: &mut C64, _comp: usize, value: C64) {
        *row = value;
    }
    fn zero_row() -> C64 {
        ZERO
    }
}

/// Complex 2×2 matrix, row-major.
#[derive(Clone, Copy, PartialEq)]
pub struct Mat2(pub [[C64; 2]; 2]);

impl fmt::Debug for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = &self.0;
        write!(
            f,
            "[[{}, {}], [{}, {}]]",
            m[0][0], m[0][1], m[1][0], m[1][1]
        )
    }
}

impl Mat2 {
    pub const fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Mat2([[a, b], [c, d]])
    }

    pub fn from_real(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mat2::new(a.into(), b.into(), c.into(), d.into())
    }

    pub const fn diag(a: C64, d: C64) -> Self {
        Mat2([[a, ZERO], [ZERO, d]])
    }

    pub fn scalar(s: C64) -> Self {
        Mat2::diag(s, s)
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.0[r][c]
    }

    pub fn det(&self) -> C64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn transpose(&self) -> Self {
        let m = &self.0;
        Mat2::new(m[0][0], m[1][0], m[0][1], m[1][1])
    }

    pub fn conj(&self) -> Self {
        let m = &self.0;
        Mat2::new(
            m[0][0].conj(),
            m[0][1].conj(),
            m[1][0].conj(),
            m[1][1].conj(),
        )
    }

    pub fn column(&self, c: usize) -> Vec2 {
        Vec2([self.0[0][c], self.0[1][c]])
    }

    pub fn row(&self, r: usize) -> Vec2 {
        Vec2(self.0[r])
    }

    /// Frobenius distance, convenient for tolerance checks.
    pub fn dist(&self, other: &Mat2) -> f64 {
        let d = *self - *other;
        d.0.iter()
            .flatten()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Eigen-decomposition of a Hermitian matrix: eigenvalues ascending and the
    /// unitary whose columns are the matching eigenvectors.
    pub fn hermitian_eigen(&self) -> ([f64; 2], Mat2) {
        let a = self.0[0][0].re;
        let d = self.0[1][1].re;
        let b = self.0[0][1];
        let half_gap = 0.5 * (a - d);
        let r = (half_gap * half_gap + b.norm_sqr()).sqrt();
        let mean = 0.5 * (a + d);
        let (lo, hi) = (mean - r, mean + r);
        if b.norm() <= 1e-300 {
            return if a <= d {
                ([a, d], Mat2::scalar(ONE))
            } else {
                ([d, a], Mat2::from_real(0.0, 1.0, 1.0, 0.0))
            };
        }
        // (A − λ)v = 0 with v = (b, λ − a), normalized; pick the better
        // conditioned of the two equivalent forms for each eigenvalue.
        let vec_for = |lambda: f64| -> Vec2 {
            let v1 = Vec2([b, C64::new(lambda - a, 0.0)]);
            let v2 = Vec2([C64::new(lambda - d, 0.0), b.conj()]);
            let v = if v1.norm() >= v2.norm() { v1 } else { v2 };
            v * C64::new(1.0 / v.norm(), 0.0)
        };
        let v_lo = vec_for(lo);
        let v_hi = vec_for(hi);
        (
            [lo, hi],
            Mat2::new(v_lo.0[0], v_hi.0[0], v_lo.0[1], v_hi.0[1]),
        )
    }

    /// Principal square root of a Hermitian positive semidefinite matrix.
    pub fn hermitian_sqrt(&self) -> Mat2 {
        let ([l0, l1], v) = self.hermitian_eigen();
        let d = Mat2::diag(
            C64::new(l0.max(0.0).sqrt(), 0.0),
            C64::new(l1.max(0.0).sqrt(), 0.0),
        );
        v * d * v.adjoint()
    }

    /// Smallest and largest singular values.
    pub fn singular_values(&self) -> [f64; 2] {
        let ([l0, l1], _) = (self.adjoint() * *self).hermitian_eigen();
        [l0.max(0.0).sqrt(), l1.max(0.0).sqrt()]
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        Mat2::new(
            a[0][0] + b[0][0],
            a[0][1] + b[0][1],
            a[1][0] + b[1][0],
            a[1][1] + b[1][1],
        )
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        self + (-o)
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        let a = &self.0;
        Mat2::new(-a[0][0], -a[0][1], -a[1][0], -a[1][1])
    }
}

impl AddAssign for Mat2 {
    fn add_assign(&mut self, o: Mat2) {
        *self = *self + o;
    }
}

impl SubAssign for Mat2 {
    fn sub_assign(&mut self, o: Mat2) {
        *self = *self - o;
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        Mat2::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

impl Mul<C64> for Mat2 {
    type Output = Mat2;
    fn mul(self, s: C64) -> Mat2 {
        let a = &self.0;
        Mat2::new(a[0][0] * s, a[0][1] * s, a[1][0] * s, a[1][1] * s)
    }
}

impl Coeff for Mat2 {
    fn zero() -> Self {
        Mat2::scalar(ZERO)
    }
    fn magnitude(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
    fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|z| z.is_finite())
    }
    fn components(&self) -> Vec<C64> {
        self.0.iter().flatten().copied().collect()
    }
}

impl Cell for Mat2 {
    const DIM: usize = 2;
    type Row = Vec2;

    fn identity() -> Self {
        Mat2::scalar(ONE)
    }
    fn adjoint(&self) -> Self {
        self.conj().transpose()
    }
    fn inverse(&self) -> Option<Self> {
        let det = self.det();
        if det.norm() < 1e-300 {
            return None;
        }
        let m = &self.0;
        Some(Mat2::new(m[1][1], -m[0][1], -m[1][0], m[0][0]) * (ONE / det))
    }
    fn norm(&self) -> f64 {
        self.singular_values()[1]
    }
    fn defect_roots(&self) -> (Self, Self) {
        let id = Mat2::identity();
        let left = (id - self.adjoint() * *self).hermitian_sqrt();
        let right = (id - *self * self.adjoint()).hermitian_sqrt();
        (left, right)
    }
    fn row_mul(row: Vec2, m: &Self) -> Vec2 {
        row.mul_mat(m)
    }
    fn row_get(row: &Vec2, comp: usize) -> C64 {
        row.0[comp]
    }
    fn row_set(row: &mut Vec2, comp: usize, value: C64) {
        row.0[comp] = value;
    }
    fn zero_row() -> Vec2 {
        Vec2::zero()
    }
}

/// Complex 2-component row vector.
#[derive(Clone, Copy, PartialEq)]
pub struct Vec2(pub [C64; 2]);

impl fmt::Debug for Vec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.0[0], self.0[1])
    }
}

impl Vec2 {
    pub fn new(a: C64, b: C64) -> Self {
        Vec2([a, b])
    }

    pub fn norm(&self) -> f64 {
        (self.0[0].norm_sqr() + self.0[1].norm_sqr()).sqrt()
    }

    /// `v · M` with `v` a row vector.
    pub fn mul_mat(&self, m: &Mat2) -> Vec2 {
        let v = &self.0;
        Vec2([
            v[0] * m.0[0][0] + v[1] * m.0[1][0],
            v[0] * m.0[0][1] + v[1] * m.0[1][1],
        ])
    }

    /// Bilinear product `v · w` (no conjugation).
    pub fn dot(&self, w: &Vec2) -> C64 {
        self.0[0] * w.0[0] + self.0[1] * w.0[1]
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2([self.0[0] + o.0[0], self.0[1] + o.0[1]])
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2([self.0[0] - o.0[0], self.0[1] - o.0[1]])
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2([-self.0[0], -self.0[1]])
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, o: Vec2) {
        *self = *self + o;
    }
}

impl SubAssign for Vec2 {
    fn sub_assign(&mut self, o: Vec2) {
        *self = *self - o;
    }
}

impl Mul<C64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: C64) -> Vec2 {
        Vec2([self.0[0] * s, self.0[1] * s])
    }
}

impl Coeff for Vec2 {
    fn zero() -> Self {
        Vec2([ZERO, ZERO])
    }
    fn magnitude(&self) -> f64 {
        self.0[0].norm().max(self.0[1].norm())
    }
    fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.is_finite())
    }
    fn components(&self) -> Vec<C64> {
        self.0.to_vec()
    }
}
