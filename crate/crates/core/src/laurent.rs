//! Laurent polynomials with dense coefficient storage over a power window.

use std::ops::{Add, Neg, Sub};

use crate::linalg::{cis, Cell, Coeff, C64, ONE};

/// Coefficients with magnitude below this are dropped by [`LaurentPoly::prune`].
pub const PRUNE_THRESHOLD: f64 = 1e-15;

/// `Σ_p c_p z^p` over a finite window of integer powers.
///
/// `coeffs[i]` is the coefficient of `z^(min_power + i)`. The zero polynomial
/// has no coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentPoly<T> {
    min_power: i64,
    coeffs: Vec<T>,
}

impl<T: Coeff> LaurentPoly<T> {
    pub fn zero() -> Self {
        LaurentPoly {
            min_power: 0,
            coeffs: Vec::new(),
        }
    }

    pub fn constant(c: T) -> Self {
        Self::monomial(c, 0)
    }

    pub fn monomial(c: T, power: i64) -> Self {
        let mut p = LaurentPoly {
            min_power: power,
            coeffs: vec![c],
        };
        p.trim();
        p
    }

    pub fn from_coeffs(min_power: i64, coeffs: Vec<T>) -> Self {
        let mut p = LaurentPoly { min_power, coeffs };
        p.trim();
        p
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `(min_power, max_power)` of the stored window, `None` for zero.
    pub fn support(&self) -> Option<(i64, i64)> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some((
                self.min_power,
                self.min_power + self.coeffs.len() as i64 - 1,
            ))
        }
    }

    pub fn coeff(&self, power: i64) -> T {
        let i = power - self.min_power;
        if i < 0 || i >= self.coeffs.len() as i64 {
            T::zero()
        } else {
            self.coeffs[i as usize]
        }
    }

    /// `(power, coefficient)` pairs in increasing power.
    pub fn terms(&self) -> impl Iterator<Item = (i64, T)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, c)| (self.min_power + i as i64, *c))
    }

    pub fn eval(&self, z: C64) -> T {
        let Some((lo, _)) = self.support() else {
            return T::zero();
        };
        let mut acc = T::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * z + *c;
        }
        acc * z.powi(lo as i32)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::from_coeffs(self.min_power, self.coeffs.iter().map(|c| *c * s).collect())
    }

    /// Multiplies by `z^k`.
    pub fn shift(&self, k: i64) -> Self {
        LaurentPoly {
            min_power: self.min_power + k,
            coeffs: self.coeffs.clone(),
        }
    }

    pub fn map<U: Coeff>(&self, f: impl Fn(T) -> U) -> LaurentPoly<U> {
        LaurentPoly::from_coeffs(self.min_power, self.coeffs.iter().map(|c| f(*c)).collect())
    }

    /// Product with a scalar Laurent polynomial.
    pub fn mul_scalar_poly(&self, other: &LaurentPoly<C64>) -> Self {
        let (Some((a, _)), Some((b, _))) = (self.support(), other.support()) else {
            return Self::zero();
        };
        let mut out = vec![T::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            for (j, s) in other.coeffs.iter().enumerate() {
                out[i + j] += *c * *s;
            }
        }
        Self::from_coeffs(a + b, out)
    }

    /// `p(e^{-iθ} z)`, i.e. `c_p → c_p e^{-ipθ}`.
    pub fn substitute_rotation(&self, theta: f64) -> Self {
        Self::from_coeffs(
            self.min_power,
            self.terms()
                .map(|(p, c)| c * cis(-(p as f64) * theta))
                .collect(),
        )
    }

    /// Drops coefficients below [`PRUNE_THRESHOLD`] at the window edges and
    /// zeroes interior ones.
    pub fn prune(&self) -> Self {
        Self::from_coeffs(
            self.min_power,
            self.coeffs
                .iter()
                .map(|c| {
                    if c.magnitude() < PRUNE_THRESHOLD {
                        T::zero()
                    } else {
                        *c
                    }
                })
                .collect(),
        )
    }

    /// Largest coefficient-wise distance to `other`.
    pub fn max_diff(&self, other: &Self) -> f64 {
        let d = self.clone() - other.clone();
        d.coeffs.iter().map(|c| c.magnitude()).fold(0.0, f64::max)
    }

    fn trim(&mut self) {
        let zero = T::zero();
        while self.coeffs.last().is_some_and(|c| *c == zero) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|c| **c == zero).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.min_power += lead as i64;
        }
        if self.coeffs.is_empty() {
            self.min_power = 0;
        }
    }
}

impl<T: Cell> LaurentPoly<T> {
    /// `m · p(z)`.
    pub fn left_mul(&self, m: &T) -> Self {
        Self::from_coeffs(
            self.min_power,
            self.coeffs.iter().map(|c| *m * *c).collect(),
        )
    }

    /// `p(z) · m`.
    pub fn right_mul(&self, m: &T) -> Self {
        Self::from_coeffs(
            self.min_power,
            self.coeffs.iter().map(|c| *c * *m).collect(),
        )
    }

    /// `p(1/z̄)†`: coefficient of `z^{-p}` becomes `c_p†`.
    pub fn reflect_adjoint(&self) -> Self {
        let Some((_, hi)) = self.support() else {
            return Self::zero();
        };
        Self::from_coeffs(-hi, self.coeffs.iter().rev().map(|c| c.adjoint()).collect())
    }

    /// `row · p(z)` for a row vector acting on the cell coefficients.
    pub fn row_times(&self, row: T::Row) -> LaurentPoly<T::Row> {
        LaurentPoly::from_coeffs(
            self.min_power,
            self.coeffs.iter().map(|c| T::row_mul(row, c)).collect(),
        )
    }
}

impl LaurentPoly<C64> {
    pub fn one() -> Self {
        Self::constant(ONE)
    }

    /// Product of two scalar Laurent polynomials.
    pub fn mul(&self, other: &Self) -> Self {
        self.mul_scalar_poly(other)
    }
}

fn combine<T: Coeff>(a: &LaurentPoly<T>, b: &LaurentPoly<T>, sign: f64) -> LaurentPoly<T> {
    let (a_lo, a_hi) = a.support().unwrap_or((i64::MAX, i64::MIN));
    let (b_lo, b_hi) = b.support().unwrap_or((i64::MAX, i64::MIN));
    let lo = a_lo.min(b_lo);
    let hi = a_hi.max(b_hi);
    if lo > hi {
        return LaurentPoly::zero();
    }
    let s = C64::new(sign, 0.0);
    let coeffs = (lo..=hi).map(|p| a.coeff(p) + b.coeff(p) * s).collect();
    LaurentPoly::from_coeffs(lo, coeffs)
}

impl<T: Coeff> Add for LaurentPoly<T> {
    type Output = LaurentPoly<T>;
    fn add(self, o: Self) -> Self {
        combine(&self, &o, 1.0)
    }
}

impl<T: Coeff> Sub for LaurentPoly<T> {
    type Output = LaurentPoly<T>;
    fn sub(self, o: Self) -> Self {
        combine(&self, &o, -1.0)
    }
}

impl<T: Coeff> Neg for LaurentPoly<T> {
    type Output = LaurentPoly<T>;
    fn neg(self) -> Self {
        self.scale(-ONE)
    }
}

impl<T: Coeff> Add for &LaurentPoly<T> {
    type Output = LaurentPoly<T>;
    fn add(self, o: Self) -> LaurentPoly<T> {
        combine(self, o, 1.0)
    }
}

impl<T: Coeff> Sub for &LaurentPoly<T> {
    type Output = LaurentPoly<T>;
    fn sub(self, o: Self) -> LaurentPoly<T> {
        combine(self, o, -1.0)
    }
}
