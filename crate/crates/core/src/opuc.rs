//! Verblunsky sequences, the Szegő recurrence, orthonormal Laurent
//! polynomials, and rotation covariance.

use std::collections::BTreeMap;

use crate::error::{check_disk, QrwError, Result};
use crate::laurent::LaurentPoly;
use crate::linalg::{cis, Cell, Coeff, Mat2, C64, ONE};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SequenceKind {
    OneSided,
    TwoSided,
}

/// Lazy description of the parameters outside the explicit window:
/// `α_j = pattern[j mod period] · e^{-i(j+1)·rotation}`.
///
/// A constant tail is a one-element pattern with zero rotation.
#[derive(Clone, Debug, PartialEq)]
pub struct Tail<T> {
    pub pattern: Vec<T>,
    pub rotation: f64,
}

impl<T: Coeff> Tail<T> {
    pub fn constant(value: T) -> Self {
        Tail {
            pattern: vec![value],
            rotation: 0.0,
        }
    }

    pub fn periodic(pattern: Vec<T>, rotation: f64) -> Self {
        assert!(!pattern.is_empty(), "tail pattern must be non-empty");
        Tail { pattern, rotation }
    }

    pub fn value(&self, j: i64) -> T {
        let p = self.pattern[j.rem_euclid(self.pattern.len() as i64) as usize];
        if self.rotation == 0.0 {
            p
        } else {
            p * cis(-((j + 1) as f64) * self.rotation)
        }
    }
}

/// Verblunsky parameters, scalar or 2×2-block valued.
///
/// Explicit values override the tails. Indices below the first explicit index
/// use the lower tail when the sequence is two-sided; every other index uses
/// the upper tail.
#[derive(Clone, Debug, PartialEq)]
pub struct Verblunsky<T> {
    kind: SequenceKind,
    values: BTreeMap<i64, T>,
    upper: Tail<T>,
    lower: Option<Tail<T>>,
}

pub type VerblunskySequence = Verblunsky<C64>;
pub type BlockVerblunsky = Verblunsky<Mat2>;

impl<T: Cell> Verblunsky<T> {
    /// One-sided sequence from explicit values and a tail.
    pub fn one_sided(values: impl IntoIterator<Item = (i64, T)>, tail: Tail<T>) -> Result<Self> {
        let values: BTreeMap<i64, T> = values.into_iter().collect();
        if let Some((&j, _)) = values.iter().find(|(j, _)| **j < 0) {
            return Err(QrwError::Usage(format!(
                "one-sided sequence has negative index {j}"
            )));
        }
        let seq = Verblunsky {
            kind: SequenceKind::OneSided,
            values,
            upper: tail,
            lower: None,
        };
        seq.validate()?;
        Ok(seq)
    }

    pub fn two_sided(
        values: impl IntoIterator<Item = (i64, T)>,
        upper: Tail<T>,
        lower: Tail<T>,
    ) -> Result<Self> {
        let seq = Verblunsky {
            kind: SequenceKind::TwoSided,
            values: values.into_iter().collect(),
            upper,
            lower: Some(lower),
        };
        seq.validate()?;
        Ok(seq)
    }

    /// One-sided sequence listing the first values and then repeating `default`.
    pub fn from_slice(values: &[T], default: T) -> Result<Self> {
        Self::one_sided(
            values.iter().enumerate().map(|(j, a)| (j as i64, *a)),
            Tail::constant(default),
        )
    }

    /// All parameters zero: Lebesgue measure.
    pub fn zero(kind: SequenceKind) -> Self {
        let tail = Tail::constant(T::zero());
        Verblunsky {
            kind,
            values: BTreeMap::new(),
            lower: (kind == SequenceKind::TwoSided).then(|| tail.clone()),
            upper: tail,
        }
    }

    fn validate(&self) -> Result<()> {
        for (j, a) in &self.values {
            check_disk(format!("alpha_{j}"), a.norm())?;
        }
        for tail in std::iter::once(&self.upper).chain(self.lower.iter()) {
            for a in &tail.pattern {
                check_disk("tail parameter", a.norm())?;
            }
        }
        Ok(())
    }

    pub fn kind(&self) -> SequenceKind {
        self.kind
    }

    pub fn explicit(&self) -> &BTreeMap<i64, T> {
        &self.values
    }

    pub fn upper_tail(&self) -> &Tail<T> {
        &self.upper
    }

    pub fn lower_tail(&self) -> Option<&Tail<T>> {
        self.lower.as_ref()
    }

    pub fn get(&self, j: i64) -> T {
        if let Some(a) = self.values.get(&j) {
            return *a;
        }
        match &self.lower {
            Some(lower) if j < self.split() => lower.value(j),
            _ => self.upper.value(j),
        }
    }

    fn split(&self) -> i64 {
        self.values.keys().next().copied().unwrap_or(0)
    }

    /// `ρ_j = sqrt(1 − |α_j|²)` in the scalar case, `(ρ^L_j, ρ^R_j)` generally.
    pub fn rho(&self, j: i64) -> (T, T) {
        self.get(j).defect_roots()
    }

    /// `α_j → e^{-i(j+1)θ} α_j` for every index, tails included.
    pub fn rotate(&self, theta: f64) -> Self {
        let rot = |t: &Tail<T>| Tail {
            pattern: t.pattern.clone(),
            rotation: t.rotation + theta,
        };
        Verblunsky {
            kind: self.kind,
            values: self
                .values
                .iter()
                .map(|(j, a)| (*j, *a * cis(-((j + 1) as f64) * theta)))
                .collect(),
            upper: rot(&self.upper),
            lower: self.lower.as_ref().map(rot),
        }
    }
}

/// Values of `φ_j` and `φ_j*` at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SzegoPair {
    pub degree: usize,
    pub phi: C64,
    pub phi_star: C64,
    pub point: C64,
}

impl SzegoPair {
    /// `φ_0 = φ_0* = 1`.
    pub fn seed(point: C64) -> Self {
        SzegoPair {
            degree: 0,
            phi: ONE,
            phi_star: ONE,
            point,
        }
    }
}

/// One step of the Szegő recurrence:
/// `ρ φ_{j+1} = z φ_j − ᾱ φ_j*`, `ρ φ_{j+1}* = φ_j* − α z φ_j`.
pub fn szego_next(pair: SzegoPair, alpha: C64) -> Result<SzegoPair> {
    check_disk("alpha", alpha.norm())?;
    let r = alpha.norm();
    let rho = ((1.0 - r) * (1.0 + r)).sqrt();
    let z = pair.point;
    Ok(SzegoPair {
        degree: pair.degree + 1,
        phi: (z * pair.phi - alpha.conj() * pair.phi_star) / rho,
        phi_star: (pair.phi_star - alpha * z * pair.phi) / rho,
        point: z,
    })
}

/// Coefficient-domain unknowns of the eigen-recurrence `C x = z x`.
///
/// Writing `y = M x`, the rows of `L y = z x` and `M x = y` give, with
/// `x_0 = y_0 = 1`,
/// ```text
/// y_{2j+1} = (ρ^L_{2j})^{-1} (z x_{2j} − α_{2j}† y_{2j})
/// x_{2j+1} = z^{-1} (ρ^R_{2j} y_{2j} − α_{2j} y_{2j+1})
/// x_{2j+2} = (ρ^L_{2j+1})^{-1} (y_{2j+1} − α_{2j+1}† x_{2j+1})
/// y_{2j+2} = ρ^R_{2j+1} x_{2j+1} − α_{2j+1} x_{2j+2}
/// ```
trait Ring<T: Cell>: Clone {
    fn one() -> Self;
    fn lmul(&self, m: &T) -> Self;
    fn times_z(&self, k: i64, z: C64) -> Self;
    fn sub(&self, o: &Self) -> Self;
}

impl<T: Cell> Ring<T> for LaurentPoly<T> {
    fn one() -> Self {
        LaurentPoly::constant(T::identity())
    }
    fn lmul(&self, m: &T) -> Self {
        self.left_mul(m)
    }
    fn times_z(&self, k: i64, _z: C64) -> Self {
        self.shift(k)
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
}

#[derive(Clone)]
struct Value<T>(T);

impl<T: Cell> Ring<T> for Value<T> {
    fn one() -> Self {
        Value(T::identity())
    }
    fn lmul(&self, m: &T) -> Self {
        Value(*m * self.0)
    }
    fn times_z(&self, k: i64, z: C64) -> Self {
        Value(self.0 * z.powi(k as i32))
    }
    fn sub(&self, o: &Self) -> Self {
        Value(self.0 - o.0)
    }
}

fn eigen_recurrence<T: Cell, R: Ring<T>>(
    alphas: &Verblunsky<T>,
    count: usize,
    z: C64,
) -> Result<(Vec<R>, Vec<R>)> {
    let mut xs: Vec<R> = Vec::with_capacity(count + 1);
    let mut ys: Vec<R> = Vec::with_capacity(count + 1);
    xs.push(R::one());
    ys.push(R::one());
    let inv = |m: T, j: i64| {
        m.inverse().ok_or_else(|| QrwError::Domain {
            what: format!("alpha_{j}"),
            modulus: 1.0,
        })
    };
    let mut j = 0usize;
    while xs.len() < count {
        let idx = j as i64;
        let a = alphas.get(idx);
        check_disk(format!("alpha_{idx}"), a.norm())?;
        let (rl, rr) = a.defect_roots();
        if j.is_multiple_of(2) {
            let y_next = xs[j]
                .times_z(1, z)
                .sub(&ys[j].lmul(&a.adjoint()))
                .lmul(&inv(rl, idx)?);
            let x_next = ys[j].lmul(&rr).sub(&y_next.lmul(&a)).times_z(-1, z);
            ys.push(y_next);
            xs.push(x_next);
        } else {
            let x_next = ys[j].sub(&xs[j].lmul(&a.adjoint())).lmul(&inv(rl, idx)?);
            let y_next = xs[j].lmul(&rr).sub(&x_next.lmul(&a));
            xs.push(x_next);
            ys.push(y_next);
        }
        j += 1;
    }
    xs.truncate(count);
    ys.truncate(count);
    Ok((xs, ys))
}

/// Orthonormal Laurent polynomials `x_0, …, x_{count−1}` as exact coefficient
/// tables, from the rows of `(C − z) x = 0`.
pub fn laurent_polynomials<T: Cell>(
    alphas: &Verblunsky<T>,
    count: usize,
) -> Result<Vec<LaurentPoly<T>>> {
    if alphas.kind() != SequenceKind::OneSided {
        return Err(QrwError::Usage(
            "Laurent polynomials need a one-sided sequence".into(),
        ));
    }
    if count == 0 {
        return Err(QrwError::Usage("count must be positive".into()));
    }
    let (xs, _) = eigen_recurrence::<T, LaurentPoly<T>>(alphas, count, ONE)?;
    Ok(xs.into_iter().map(|p| p.prune()).collect())
}

/// `x_0(z), …, x_{count−1}(z)` evaluated directly in value space.
pub fn laurent_values<T: Cell>(alphas: &Verblunsky<T>, count: usize, z: C64) -> Result<Vec<T>> {
    if z.norm() == 0.0 {
        return Err(QrwError::Usage(
            "Laurent polynomials are not defined at z = 0".into(),
        ));
    }
    let (xs, _) = eigen_recurrence::<T, Value<T>>(alphas, count.max(1), z)?;
    Ok(xs.into_iter().take(count).map(|v| v.0).collect())
}

/// Rotation of the measure by `θ` acting on Verblunsky parameters.
pub fn rotate_verblunsky<T: Cell>(alphas: &Verblunsky<T>, theta: f64) -> Verblunsky<T> {
    alphas.rotate(theta)
}

/// Rotation acting on an orthonormal Laurent polynomial of the given index:
/// `x_{2j−1}(z) → e^{-ijθ} x_{2j−1}(e^{-iθ}z)`, `x_{2j}(z) → e^{ijθ} x_{2j}(e^{-iθ}z)`.
pub fn rotate_laurent<T: Coeff>(x: &LaurentPoly<T>, index: usize, theta: f64) -> LaurentPoly<T> {
    x.substitute_rotation(theta)
        .scale(cis(rotation_phase(index) * theta))
}

/// The multiple of `θ` in the phase of [`rotate_laurent`].
pub fn rotation_phase(index: usize) -> f64 {
    if index % 2 == 1 {
        -(index.div_ceil(2) as f64)
    } else {
        (index / 2) as f64
    }
}
