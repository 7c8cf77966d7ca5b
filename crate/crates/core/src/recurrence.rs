//! Recurrence of local states: the associated Laurent polynomial of a state
//! must vanish at every non-removable singularity of the Carathéodory
//! function for the return probabilities to be summable.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::closed_forms::{constant_measure, matrix_measure, MASS_CUTOFF};
use crate::cmv::{Lattice, StateVector};
use crate::coin::{state_from_index, WalkModel};
use crate::error::{QrwError, Result};
use crate::kmcg::{halfline_polynomials, line_polynomials};
use crate::laurent::LaurentPoly;
use crate::linalg::{cis, Vec2, C64, ZERO};

/// Certificate values below this count as zero.
pub const VANISH_TOL: f64 = 1e-9;
/// Normalized numerator magnitude below which a candidate is removable.
pub const REMOVABLE_TOL: f64 = 1e-10;
/// Singular values below this span the transient subspace.
pub const NULL_CUTOFF: f64 = 1e-10;

/// A finitely supported state `Σ ψ_k |k⟩` over CMV-ordered indices.
#[derive(Clone, Debug)]
pub struct QuantumState<'a> {
    pub walk: &'a WalkModel,
    pub coefficients: BTreeMap<u64, C64>,
    pub normalized: bool,
}

impl<'a> QuantumState<'a> {
    /// State as given, without normalization.
    pub fn new(walk: &'a WalkModel, coefficients: impl IntoIterator<Item = (u64, C64)>) -> Self {
        QuantumState {
            walk,
            coefficients: coefficients
                .into_iter()
                .filter(|(_, c)| *c != ZERO)
                .collect(),
            normalized: false,
        }
    }

    pub fn norm(&self) -> f64 {
        self.coefficients
            .values()
            .map(|c| c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn normalize(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(QrwError::Usage("the zero vector is not a state".into()));
        }
        Ok(QuantumState {
            walk: self.walk,
            coefficients: self
                .coefficients
                .iter()
                .map(|(k, c)| (*k, *c / n))
                .collect(),
            normalized: true,
        })
    }

    /// Same coefficients over unfolded lattice indices.
    pub fn to_state_vector(&self) -> StateVector {
        let lattice = self.walk.lattice;
        StateVector::from_pairs(
            lattice,
            self.coefficients
                .iter()
                .map(|(&i, &c)| (state_from_index(lattice, i).unfolded(), c)),
        )
    }

    fn max_index(&self) -> u64 {
        self.coefficients.keys().next_back().copied().unwrap_or(0)
    }
}

/// `f = Σ ψ_k X_k` (half-line) or `𝒇 = Σ (ψ_{2k}, ψ_{2k+1}) 𝑿_k` (line).
#[derive(Clone, Debug, PartialEq)]
pub enum AssociatedFunction {
    Scalar(LaurentPoly<C64>),
    Vector(LaurentPoly<Vec2>),
}

impl AssociatedFunction {
    pub fn eval_scalar(&self, z: C64) -> Option<C64> {
        match self {
            AssociatedFunction::Scalar(f) => Some(f.eval(z)),
            AssociatedFunction::Vector(_) => None,
        }
    }

    pub fn eval_vector(&self, z: C64) -> Option<Vec2> {
        match self {
            AssociatedFunction::Vector(f) => Some(f.eval(z)),
            AssociatedFunction::Scalar(_) => None,
        }
    }
}

pub fn associated_function(state: &QuantumState) -> Result<AssociatedFunction> {
    let walk = state.walk;
    let count = state.max_index() as usize + 1;
    match walk.lattice {
        Lattice::HalfLine => {
            let xs = halfline_polynomials(walk, count)?;
            let mut f = LaurentPoly::zero();
            for (&k, &c) in &state.coefficients {
                f = &f + &xs[k as usize].scale(c);
            }
            Ok(AssociatedFunction::Scalar(f))
        }
        Lattice::Line => {
            let xs = line_polynomials(walk, count / 2 + 1)?;
            let mut rows: BTreeMap<usize, Vec2> = BTreeMap::new();
            for (&k, &c) in &state.coefficients {
                let r = rows
                    .entry((k / 2) as usize)
                    .or_insert(Vec2::new(ZERO, ZERO));
                r.0[(k % 2) as usize] += c;
            }
            let mut f = LaurentPoly::zero();
            for (b, row) in rows {
                f = &f + &xs[b].row_times(row);
            }
            Ok(AssociatedFunction::Vector(f))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SingularityTag {
    Removable,
    Pole,
    InverseSqrt,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Singularity {
    pub point: C64,
    pub tag: SingularityTag,
    /// Unit vector spanning the range of the rank-one numerator matrix (line).
    pub direction: Option<Vec2>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SingularitySet {
    pub points: Vec<Singularity>,
    pub provenance: String,
}

impl SingularitySet {
    pub fn non_removable(&self) -> impl Iterator<Item = &Singularity> {
        self.points
            .iter()
            .filter(|s| s.tag != SingularityTag::Removable)
    }
}

/// Singularities of the closed-form Carathéodory function on the circle.
pub fn singularity_set(walk: &WalkModel) -> Result<SingularitySet> {
    let p = walk
        .constant
        .ok_or_else(|| QrwError::Unsupported("recurrence analysis needs a constant coin".into()))?;
    let a = p.a;
    if a.norm() == 0.0 {
        return Ok(SingularitySet {
            points: Vec::new(),
            provenance: "diagonal coin: F is constant".into(),
        });
    }
    match walk.lattice {
        Lattice::HalfLine => {
            let m = constant_measure(a, p.vartheta)?;
            let mut points = Vec::new();
            for theta in [m.beta, PI - m.beta] {
                let tag = if a.re.abs() < MASS_CUTOFF {
                    SingularityTag::InverseSqrt
                } else {
                    let (s, c) = theta.sin_cos();
                    let root = (a.norm_sqr() - s * s).max(0.0).sqrt();
                    let sroot = 2.0 * root * c.signum();
                    let num = sroot + 2.0 * a.re;
                    if num.abs() / (sroot.abs() + 2.0 * a.re.abs()) < REMOVABLE_TOL {
                        SingularityTag::Removable
                    } else {
                        SingularityTag::Pole
                    }
                };
                points.push(Singularity {
                    point: cis(theta + p.vartheta),
                    tag,
                    direction: None,
                });
            }
            Ok(SingularitySet {
                points,
                provenance: "closed-form scalar F: candidates e^{iϑ}e^{iβ}, −e^{iϑ}e^{−iβ}".into(),
            })
        }
        Lattice::Line => {
            let m = matrix_measure(a, p.vartheta)?;
            let points = [m.eta, PI - m.eta, -m.eta, m.eta - PI]
                .into_iter()
                .map(|theta| {
                    let f0 = m.numerator(cis(theta));
                    let (c0, c1) = (f0.column(0), f0.column(1));
                    let c = if c0.norm() >= c1.norm() { c0 } else { c1 };
                    let c = c * C64::new(1.0 / c.norm(), 0.0);
                    Singularity {
                        point: cis(theta + p.vartheta),
                        tag: SingularityTag::InverseSqrt,
                        direction: Some(c),
                    }
                })
                .collect();
            Ok(SingularitySet {
                points,
                provenance: "closed-form matrix F: roots of (w − 1/w)² + 4|a|² on the circle"
                    .into(),
            })
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Classification {
    Recurrent,
    Transient,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CertificateEntry {
    pub singularity: Singularity,
    /// `f(z_s)` or `𝒇(z_s) c_s` for the normalized state.
    pub value: C64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RecurrenceVerdict {
    pub classification: Classification,
    pub certificate: Vec<CertificateEntry>,
}

fn certificate_value(f: &AssociatedFunction, s: &Singularity) -> C64 {
    match f {
        AssociatedFunction::Scalar(p) => p.eval(s.point),
        AssociatedFunction::Vector(p) => {
            let v = p.eval(s.point);
            let c = s.direction.expect("line singularities carry a direction");
            v.0[0] * c.0[0] + v.0[1] * c.0[1]
        }
    }
}

/// Transient iff the associated function of the normalized state vanishes
/// at every non-removable singularity.
pub fn classify_state(state: &QuantumState) -> Result<RecurrenceVerdict> {
    let set = singularity_set(state.walk)?;
    let unit = state.normalize()?;
    let f = associated_function(&unit)?;
    let certificate: Vec<CertificateEntry> = set
        .non_removable()
        .map(|s| CertificateEntry {
            singularity: *s,
            value: certificate_value(&f, s),
        })
        .collect();
    let transient = certificate.iter().all(|c| c.value.norm() < VANISH_TOL);
    Ok(RecurrenceVerdict {
        classification: if transient {
            Classification::Transient
        } else {
            Classification::Recurrent
        },
        certificate,
    })
}

/// One row per non-removable singularity: the linear functional
/// `ψ ↦ f_ψ(z_s)` (or `𝒇_ψ(z_s) c_s`) on the first `k` indices.
pub fn constraint_rows(walk: &WalkModel, k: usize) -> Result<Vec<Vec<C64>>> {
    let set = singularity_set(walk)?;
    let mut rows = Vec::new();
    match walk.lattice {
        Lattice::HalfLine => {
            let xs = halfline_polynomials(walk, k.max(1))?;
            for s in set.non_removable() {
                rows.push(xs.iter().take(k).map(|x| x.eval(s.point)).collect());
            }
        }
        Lattice::Line => {
            let xs = line_polynomials(walk, k.div_ceil(2).max(1))?;
            for s in set.non_removable() {
                let c = s.direction.expect("line singularities carry a direction");
                let row = (0..k)
                    .map(|p| {
                        let x = xs[p / 2].eval(s.point);
                        let r = p % 2;
                        x.get(r, 0) * c.0[0] + x.get(r, 1) * c.0[1]
                    })
                    .collect();
                rows.push(row);
            }
        }
    }
    Ok(rows)
}

/// Orthonormal basis of the transient states supported on indices `0..k`.
pub fn transient_subspace(walk: &WalkModel, k: usize) -> Result<Vec<Vec<C64>>> {
    if k == 0 {
        return Err(QrwError::Usage("index range must be non-empty".into()));
    }
    let rows = constraint_rows(walk, k)?;
    let n = rows.len().max(k);
    let mut m = DMatrix::<C64>::zeros(n, k);
    for (i, row) in rows.iter().enumerate() {
        let scale = row.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if scale == 0.0 {
            continue;
        }
        for (j, v) in row.iter().enumerate() {
            m[(i, j)] = *v / scale;
        }
    }
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let mut basis = Vec::new();
    for (i, s) in svd.singular_values.iter().enumerate() {
        if *s < NULL_CUTOFF {
            basis.push(v_t.row(i).iter().map(|v| v.conj()).collect());
        }
    }
    Ok(basis)
}

/// Reduced row-echelon form of a spanning set: each vector has a leading 1
/// at its pivot index and zeros at the other pivots.
pub fn echelon_basis(basis: &[Vec<C64>]) -> Vec<Vec<C64>> {
    let mut rows: Vec<Vec<C64>> = basis.to_vec();
    let width = rows.iter().map(|r| r.len()).max().unwrap_or(0);
    let scale = rows
        .iter()
        .flat_map(|r| r.iter().map(|v| v.norm()))
        .fold(0.0, f64::max);
    let mut rank = 0;
    for col in 0..width {
        let Some(p) =
            (rank..rows.len()).max_by(|&a, &b| rows[a][col].norm().total_cmp(&rows[b][col].norm()))
        else {
            break;
        };
        if rows[p][col].norm() <= NULL_CUTOFF * scale.max(1.0) {
            continue;
        }
        rows.swap(rank, p);
        let pivot = rows[rank][col];
        for v in rows[rank].iter_mut() {
            *v /= pivot;
        }
        for r in 0..rows.len() {
            if r != rank {
                let f = rows[r][col];
                if f != ZERO {
                    let lead = rows[rank].clone();
                    for (v, l) in rows[r].iter_mut().zip(&lead) {
                        *v -= f * l;
                    }
                }
            }
        }
        rank += 1;
    }
    rows.truncate(rank);
    for r in rows.iter_mut() {
        for v in r.iter_mut() {
            if v.norm() <= NULL_CUTOFF {
                *v = ZERO;
            }
        }
    }
    rows
}

/// `Σ_{n=1}^{N} |⟨ψ U^n, ψ⟩|²` for the normalized state, by exact evolution.
pub fn return_probability_partial_sum(state: &QuantumState, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(QrwError::Usage("N must be at least 1".into()));
    }
    let psi = state.normalize()?.to_state_vector();
    let mut cur = psi.clone();
    let mut total = 0.0;
    for _ in 0..n {
        cur = state.walk.step(&cur)?;
        total += cur.inner(&psi).norm_sqr();
    }
    Ok(total)
}
