//! CMV operators `C = L M` acting exactly on finitely supported vectors.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{check_disk, QrwError, Result};
use crate::linalg::{Cell, Coeff, C64};
use crate::opuc::{laurent_values, SequenceKind, Verblunsky};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Lattice {
    /// Semi-infinite: indices `0, 1, 2, …`.
    HalfLine,
    /// Doubly infinite: all integer indices.
    Line,
}

impl Lattice {
    pub fn sequence_kind(self) -> SequenceKind {
        match self {
            Lattice::HalfLine => SequenceKind::OneSided,
            Lattice::Line => SequenceKind::TwoSided,
        }
    }
}

/// `Θ = [[α†, ρ^L], [ρ^R, −α]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThetaBlock<T> {
    pub alpha: T,
    pub rho_l: T,
    pub rho_r: T,
}

impl<T: Cell> ThetaBlock<T> {
    pub fn new(alpha: T) -> Result<Self> {
        check_disk("Verblunsky parameter", alpha.norm())?;
        let (rho_l, rho_r) = alpha.defect_roots();
        Ok(ThetaBlock {
            alpha,
            rho_l,
            rho_r,
        })
    }

    /// Entries `(Θ11, Θ12, Θ21, Θ22)`.
    pub fn entries(&self) -> [T; 4] {
        [self.alpha.adjoint(), self.rho_l, self.rho_r, -self.alpha]
    }

    /// Largest entry of `Θ†Θ − 1`.
    pub fn unitarity_defect(&self) -> f64 {
        let [a, b, c, d] = self.entries();
        let id = T::identity();
        let e11 = a.adjoint() * a + c.adjoint() * c - id;
        let e12 = a.adjoint() * b + c.adjoint() * d;
        let e22 = b.adjoint() * b + d.adjoint() * d - id;
        e11.magnitude().max(e12.magnitude()).max(e22.magnitude())
    }
}

/// Finitely supported row vector over a lattice. For block operators each
/// cell carries a 2-component row.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<R = C64> {
    pub lattice: Lattice,
    pub amplitudes: BTreeMap<i64, R>,
}

impl<R: Coeff> StateVector<R> {
    pub fn new(lattice: Lattice) -> Self {
        StateVector {
            lattice,
            amplitudes: BTreeMap::new(),
        }
    }

    pub fn from_pairs(lattice: Lattice, pairs: impl IntoIterator<Item = (i64, R)>) -> Self {
        let mut s = Self::new(lattice);
        for (i, a) in pairs {
            s.add(i, a);
        }
        s
    }

    pub fn get(&self, i: i64) -> R {
        self.amplitudes.get(&i).copied().unwrap_or_else(R::zero)
    }

    pub fn add(&mut self, i: i64, a: R) {
        let e = self.amplitudes.entry(i).or_insert_with(R::zero);
        *e += a;
    }

    pub fn support(&self) -> Option<(i64, i64)> {
        let lo = *self.amplitudes.keys().next()?;
        let hi = *self.amplitudes.keys().next_back()?;
        Some((lo, hi))
    }

    /// Drops exact zeros.
    pub fn compact(&mut self) {
        let zero = R::zero();
        self.amplitudes.retain(|_, a| *a != zero);
    }
}

impl StateVector<C64> {
    pub fn basis(lattice: Lattice, i: i64) -> Self {
        Self::from_pairs(lattice, [(i, crate::linalg::ONE)])
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .values()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `Σ ψ_k conj(φ_k)`.
    pub fn inner(&self, other: &Self) -> C64 {
        self.amplitudes
            .iter()
            .map(|(k, a)| a * other.get(*k).conj())
            .sum()
    }

    pub fn scaled(&self, s: C64) -> Self {
        StateVector {
            lattice: self.lattice,
            amplitudes: self.amplitudes.iter().map(|(k, a)| (*k, a * s)).collect(),
        }
    }
}

impl StateVector<crate::linalg::Vec2> {
    pub fn norm(&self) -> f64 {
        self.amplitudes
            .values()
            .map(|a| a.0[0].norm_sqr() + a.0[1].norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// CMV operator built from Verblunsky data. Θ blocks are assembled on demand,
/// so semi-infinite and doubly infinite operators need no truncation.
#[derive(Clone, Debug, PartialEq)]
pub struct CmvOperator<T> {
    pub lattice: Lattice,
    pub alphas: Verblunsky<T>,
}

/// Band half-width in cell units of a single application.
pub const BAND_WIDTH: i64 = 2;

pub fn build_cmv<T: Cell>(alphas: &Verblunsky<T>) -> Result<CmvOperator<T>> {
    for (j, a) in alphas.explicit() {
        check_disk(format!("alpha_{j}"), a.norm())?;
    }
    let lattice = match alphas.kind() {
        SequenceKind::OneSided => Lattice::HalfLine,
        SequenceKind::TwoSided => Lattice::Line,
    };
    Ok(CmvOperator {
        lattice,
        alphas: alphas.clone(),
    })
}

impl<T: Cell> CmvOperator<T> {
    pub fn theta(&self, j: i64) -> ThetaBlock<T> {
        let alpha = self.alphas.get(j);
        let (rho_l, rho_r) = alpha.defect_roots();
        ThetaBlock {
            alpha,
            rho_l,
            rho_r,
        }
    }

    /// First index of the Θ block of the given parity containing `i`, or
    /// `None` when `i` sits in the leading 1×1 identity cell of `M`.
    fn pair_start(&self, i: i64, parity: i64) -> Option<i64> {
        let start = if i.rem_euclid(2) == parity { i } else { i - 1 };
        if self.lattice == Lattice::HalfLine && start < 0 {
            None
        } else {
            Some(start)
        }
    }

    fn row_factor(&self, psi: &BTreeMap<i64, T::Row>, parity: i64) -> BTreeMap<i64, T::Row> {
        let starts: BTreeSet<Option<i64>> =
            psi.keys().map(|&i| self.pair_start(i, parity)).collect();
        let get = |i: i64| psi.get(&i).copied().unwrap_or_else(T::zero_row);
        let mut out = BTreeMap::new();
        for s in starts {
            match s {
                None => {
                    out.insert(0, get(0));
                }
                Some(j) => {
                    let [t11, t12, t21, t22] = self.theta(j).entries();
                    let (u, v) = (get(j), get(j + 1));
                    out.insert(j, T::row_mul(u, &t11) + T::row_mul(v, &t21));
                    out.insert(j + 1, T::row_mul(u, &t12) + T::row_mul(v, &t22));
                }
            }
        }
        out
    }

    fn column_factor(&self, v: &BTreeMap<i64, T>, parity: i64) -> BTreeMap<i64, T> {
        let starts: BTreeSet<Option<i64>> = v.keys().map(|&i| self.pair_start(i, parity)).collect();
        let get = |i: i64| v.get(&i).copied().unwrap_or_else(T::zero);
        let mut out = BTreeMap::new();
        for s in starts {
            match s {
                None => {
                    out.insert(0, get(0));
                }
                Some(j) => {
                    let [t11, t12, t21, t22] = self.theta(j).entries();
                    let (a, b) = (get(j), get(j + 1));
                    out.insert(j, t11 * a + t12 * b);
                    out.insert(j + 1, t21 * a + t22 * b);
                }
            }
        }
        out
    }

    /// One step of the row action `ψ ↦ ψ C = (ψ L) M`.
    pub fn apply(&self, psi: &StateVector<T::Row>) -> Result<StateVector<T::Row>> {
        if psi.lattice != self.lattice {
            return Err(QrwError::Usage(format!(
                "state lives on {:?} but operator on {:?}",
                psi.lattice, self.lattice
            )));
        }
        self.check_support(psi.amplitudes.keys().copied())?;
        let after_l = self.row_factor(&psi.amplitudes, 0);
        let amplitudes = self.row_factor(&after_l, 1);
        Ok(StateVector {
            lattice: self.lattice,
            amplitudes,
        })
    }

    /// Column action `v ↦ C v = L (M v)` on a finitely supported column of cells.
    pub fn apply_column(&self, v: &BTreeMap<i64, T>) -> Result<BTreeMap<i64, T>> {
        self.check_support(v.keys().copied())?;
        let after_m = self.column_factor(v, 1);
        Ok(self.column_factor(&after_m, 0))
    }

    fn check_support(&self, mut keys: impl Iterator<Item = i64>) -> Result<()> {
        if self.lattice == Lattice::HalfLine {
            if let Some(i) = keys.find(|&i| i < 0) {
                return Err(QrwError::Usage(format!(
                    "negative index {i} on a half-line operator"
                )));
            }
        }
        Ok(())
    }

    /// Matrix entry `C_{j,k}`.
    pub fn entry(&self, j: i64, k: i64) -> T {
        let col = BTreeMap::from([(k, T::identity())]);
        self.apply_column(&col)
            .ok()
            .and_then(|c| c.get(&j).copied())
            .unwrap_or_else(T::zero)
    }

    /// `max_{j < count} ‖(C x(z))_j − z x_j(z)‖` using the orthonormal Laurent
    /// polynomials of the operator's own parameters.
    pub fn recurrence_residual(&self, z: C64, count: usize) -> Result<f64> {
        if self.lattice != Lattice::HalfLine {
            return Err(QrwError::Usage(
                "eigen-recurrence residual needs a semi-infinite operator".into(),
            ));
        }
        let xs = laurent_values(&self.alphas, count + BAND_WIDTH as usize + 1, z)?;
        let col: BTreeMap<i64, T> = xs.iter().enumerate().map(|(i, x)| (i as i64, *x)).collect();
        let cx = self.apply_column(&col)?;
        Ok((0..count)
            .map(|j| {
                let lhs = cx.get(&(j as i64)).copied().unwrap_or_else(T::zero);
                (lhs - xs[j] * z).norm()
            })
            .fold(0.0, f64::max))
    }
}
