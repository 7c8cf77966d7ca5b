//! Coins, gauge phases and walk models.
//!
//! Pure states are `|i↑⟩`, `|i↓⟩`. On both lattices a state has an unfolded
//! index `2i` (up) or `2i + 1` (down); on the line the folded ordering
//! `|0↑⟩, |−1↓⟩, |−1↑⟩, |0↓⟩, |1↑⟩, |−2↓⟩, …` groups states in 2×2 blocks.

use std::collections::BTreeMap;
use std::fmt;

use crate::closed_forms::{constant_measure, diagonalizer, matrix_measure};
use crate::cmv::{build_cmv, CmvOperator, Lattice, StateVector};
use crate::error::{QrwError, Result};
use crate::kmcg::MeasureModel;
use crate::linalg::{cis, Cell, Coeff, Mat2, C64, I, ONE, ZERO};
use crate::opuc::{BlockVerblunsky, Tail, Verblunsky, VerblunskySequence};
use crate::spectral::{CaratheodoryEvaluator, NumericMeasure};

/// Unitarity tolerance for coins.
pub const UNITARY_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub fn offset(self) -> i64 {
        match self {
            Spin::Up => 0,
            Spin::Down => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PureState {
    pub site: i64,
    pub spin: Spin,
}

impl PureState {
    pub fn new(site: i64, spin: Spin) -> Self {
        PureState { site, spin }
    }

    pub fn up(site: i64) -> Self {
        Self::new(site, Spin::Up)
    }

    pub fn down(site: i64) -> Self {
        Self::new(site, Spin::Down)
    }

    /// `2i` for `|i↑⟩`, `2i + 1` for `|i↓⟩`.
    pub fn unfolded(self) -> i64 {
        2 * self.site + self.spin.offset()
    }

    pub fn from_unfolded(k: i64) -> Self {
        let spin = if k.rem_euclid(2) == 0 {
            Spin::Up
        } else {
            Spin::Down
        };
        PureState {
            site: k.div_euclid(2),
            spin,
        }
    }
}

impl fmt::Display for PureState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.spin {
            Spin::Up => "up",
            Spin::Down => "down",
        };
        write!(f, "|{} {}>", self.site, s)
    }
}

/// Position of a pure state in the ordering used by the (block) CMV matrix.
///
/// Half-line: `|j↑⟩ → 2j`, `|j↓⟩ → 2j + 1`. Line: `|k↑⟩ → 4k`,
/// `|−k−1↓⟩ → 4k + 1`, `|−k−1↑⟩ → 4k + 2`, `|k↓⟩ → 4k + 3`.
pub fn amplitude_index(lattice: Lattice, site: i64, spin: Spin) -> Result<u64> {
    let d = PureState::new(site, spin).unfolded();
    match lattice {
        Lattice::HalfLine => {
            if site < 0 {
                Err(QrwError::Domain {
                    what: format!("half-line site {site}"),
                    modulus: f64::NAN,
                })
            } else {
                Ok(d as u64)
            }
        }
        Lattice::Line => {
            let block = if d >= 0 { d } else { -d - 1 };
            Ok((2 * block + d.rem_euclid(2)) as u64)
        }
    }
}

/// Inverse of [`amplitude_index`].
pub fn state_from_index(lattice: Lattice, index: u64) -> PureState {
    match lattice {
        Lattice::HalfLine => PureState::from_unfolded(index as i64),
        Lattice::Line => PureState::from_unfolded(folded_to_unfolded(index)),
    }
}

/// Unfolded index held by component `c` of block `m` on the line.
pub fn block_member(m: i64, c: usize) -> i64 {
    let (p, q) = (m, -m - 1);
    let (even, odd) = if p.rem_euclid(2) == 0 { (p, q) } else { (q, p) };
    if c == 0 {
        even
    } else {
        odd
    }
}

fn folded_to_unfolded(index: u64) -> i64 {
    block_member((index / 2) as i64, (index % 2) as usize)
}

/// A validated 2×2 unitary coin at a site.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Coin {
    pub entries: Mat2,
    pub site: i64,
    diagonal: bool,
}

impl Coin {
    pub fn c(&self, r: usize, c: usize) -> C64 {
        self.entries.get(r, c)
    }

    /// `c21 = 0`: the walk decouples into free shifts up to phases.
    pub fn is_diagonal(&self) -> bool {
        self.diagonal
    }

    pub fn at_site(mut self, site: i64) -> Self {
        self.site = site;
        self
    }
}

pub fn validate_coin(matrix: Mat2, site: i64) -> Result<Coin> {
    let defect = (matrix.adjoint() * matrix).dist(&Mat2::identity());
    if !defect.is_finite() || defect > UNITARY_TOL {
        return Err(QrwError::NonUnitary { site, defect });
    }
    let c11 = matrix.get(0, 0).norm();
    if c11 <= UNITARY_TOL {
        return Err(QrwError::TrivialCoin { site, c11 });
    }
    Ok(Coin {
        entries: matrix,
        site,
        diagonal: matrix.get(1, 0).norm() <= UNITARY_TOL,
    })
}

pub mod presets {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    pub fn hadamard() -> Mat2 {
        Mat2::from_real(1.0, 1.0, 1.0, -1.0) * C64::new(FRAC_1_SQRT_2, 0.0)
    }

    /// `(1/√2) [[1, −i], [i, −1]]`
    pub fn hmod() -> Mat2 {
        Mat2::new(ONE, -I, I, -ONE) * C64::new(FRAC_1_SQRT_2, 0.0)
    }

    pub fn identity() -> Mat2 {
        Mat2::identity()
    }

    pub fn by_name(name: &str) -> Option<Mat2> {
        match name {
            "hadamard" => Some(hadamard()),
            "hmod" => Some(hmod()),
            "identity" => Some(identity()),
            _ => None,
        }
    }
}

/// Per-site coins with a default used at every other site.
#[derive(Clone, Debug, PartialEq)]
pub struct CoinField {
    pub default: Coin,
    pub sites: BTreeMap<i64, Coin>,
}

impl CoinField {
    pub fn constant(coin: Coin) -> Self {
        CoinField {
            default: coin,
            sites: BTreeMap::new(),
        }
    }

    pub fn new(default: Coin, sites: impl IntoIterator<Item = Coin>) -> Self {
        let sites = sites
            .into_iter()
            .filter(|c| c.entries != default.entries)
            .map(|c| (c.site, c))
            .collect();
        CoinField { default, sites }
    }

    pub fn at(&self, site: i64) -> Coin {
        self.sites
            .get(&site)
            .copied()
            .unwrap_or_else(|| self.default.at_site(site))
    }

    pub fn is_constant(&self) -> bool {
        self.sites.is_empty()
    }

    /// `(min, max)` of the explicit sites.
    pub fn window(&self) -> Option<(i64, i64)> {
        let lo = *self.sites.keys().next()?;
        let hi = *self.sites.keys().next_back()?;
        Some((lo, hi))
    }
}

/// Principal argument in `(−π, π]`; `atan2` gives `−π` for a negative zero
/// imaginary part.
fn principal_arg(z: C64) -> f64 {
    let t = z.arg();
    if t <= -std::f64::consts::PI {
        t + 2.0 * std::f64::consts::PI
    } else {
        t
    }
}

/// Principal-argument phases `(σ1, σ2)` of `c11`, `c22`.
fn phases(coin: &Coin) -> (f64, f64) {
    (principal_arg(coin.c(0, 0)), principal_arg(coin.c(1, 1)))
}

/// Data of a constant coin: `σ1`, `σ2`, `ϑ = (σ1 + σ2)/2`, `a = c̄21 e^{iϑ}`,
/// `ρ = sqrt(1 − |a|²)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConstantParams {
    pub sigma1: f64,
    pub sigma2: f64,
    pub vartheta: f64,
    pub a: C64,
    pub rho: f64,
}

impl ConstantParams {
    pub fn of(coin: &Coin) -> Self {
        let (sigma1, sigma2) = phases(coin);
        let vartheta = 0.5 * (sigma1 + sigma2);
        let a = coin.c(1, 0).conj() * cis(vartheta);
        let r = a.norm();
        ConstantParams {
            sigma1,
            sigma2,
            vartheta,
            a,
            rho: ((1.0 - r) * (1.0 + r)).sqrt(),
        }
    }

    /// `A = [[0, −ā], [a, 0]]`.
    pub fn block(&self) -> Mat2 {
        Mat2::new(ZERO, -self.a.conj(), self.a, ZERO)
    }
}

/// Diagonal phases `λ_j` with `C = Λ† U Λ`:
/// `λ_{2j+2} = e^{−iσ1^j} λ_{2j}`, `λ_{2j+1} = e^{iσ2^j} λ_{2j−1}`,
/// `λ_{−1} = λ_0 = 1`, extended to negative indices by the same rules.
#[derive(Clone, Debug, PartialEq)]
pub struct GaugeTransform {
    default: (f64, f64),
    sites: BTreeMap<i64, (f64, f64)>,
}

impl GaugeTransform {
    pub fn from_coins(coins: &CoinField) -> Self {
        GaugeTransform {
            default: phases(&coins.default),
            sites: coins.sites.iter().map(|(s, c)| (*s, phases(c))).collect(),
        }
    }

    pub fn constant(sigma1: f64, sigma2: f64) -> Self {
        GaugeTransform {
            default: (sigma1, sigma2),
            sites: BTreeMap::new(),
        }
    }

    /// `Σ_{s ∈ [p, q)} σ_k^s`.
    fn phase_sum(&self, k: usize, p: i64, q: i64) -> f64 {
        let pick = |t: &(f64, f64)| if k == 1 { t.0 } else { t.1 };
        let d = pick(&self.default);
        let mut s = d * (q - p) as f64;
        for (_, t) in self.sites.range(p..q) {
            s += pick(t) - d;
        }
        s
    }

    pub fn lambda(&self, idx: i64) -> C64 {
        if idx.rem_euclid(2) == 0 {
            let j = idx / 2;
            if j >= 0 {
                cis(-self.phase_sum(1, 0, j))
            } else {
                cis(self.phase_sum(1, j, 0))
            }
        } else {
            let j = (idx + 1) / 2;
            if j >= 0 {
                cis(self.phase_sum(2, 0, j))
            } else {
                cis(-self.phase_sum(2, j, 0))
            }
        }
    }

    /// Block `Λ_m = diag(λ_even, λ_odd)` of the folded ordering.
    pub fn block(&self, m: i64) -> Mat2 {
        Mat2::diag(
            self.lambda(block_member(m, 0)),
            self.lambda(block_member(m, 1)),
        )
    }

    /// Reduced phases `λ̂_{2j−1} = λ̂_{2j} = e^{ij(σ2 − σ1)/2}` of a constant coin.
    pub fn reduced(&self, idx: i64) -> Option<C64> {
        if !self.sites.is_empty() {
            return None;
        }
        let j = (idx + 1).div_euclid(2);
        let (s1, s2) = self.default;
        Some(cis(j as f64 * 0.5 * (s2 - s1)))
    }
}

/// A walk on the half-line or the line with its CMV data.
#[derive(Clone, Debug)]
pub struct WalkModel {
    pub lattice: Lattice,
    pub coins: CoinField,
    pub gauge: GaugeTransform,
    /// Scalar parameters: one-sided on the half-line, two-sided on the line.
    pub verblunsky: VerblunskySequence,
    /// Folded 2×2 block parameters (line only).
    pub block: Option<BlockVerblunsky>,
    pub constant: Option<ConstantParams>,
    pub measure: Option<MeasureModel>,
}

fn alpha_even(coins: &CoinField, gauge: &GaugeTransform, j: i64) -> C64 {
    coins.at(j).c(1, 0).conj() * gauge.lambda(2 * j) / gauge.lambda(2 * j - 1)
}

/// Tail pattern value `P` with `α_{2j} = P e^{−i(2j+1)ϑ}` in a default region
/// containing site `j`.
fn tail_for(coins: &CoinField, gauge: &GaugeTransform, j: i64, vartheta: f64) -> Tail<C64> {
    let p0 = alpha_even(coins, gauge, j) * cis((2 * j + 1) as f64 * vartheta);
    Tail::periodic(vec![p0, ZERO], vartheta)
}

pub fn halfline_walk(coins: &CoinField) -> Result<WalkModel> {
    if let Some((lo, _)) = coins.window() {
        if lo < 0 {
            return Err(QrwError::Domain {
                what: format!("half-line coin site {lo}"),
                modulus: f64::NAN,
            });
        }
    }
    let gauge = GaugeTransform::from_coins(coins);
    let d = ConstantParams::of(&coins.default);
    let hi = coins.window().map_or(-1, |(_, hi)| hi);
    let mut values = Vec::new();
    for j in 0..=hi {
        values.push((2 * j, alpha_even(coins, &gauge, j)));
        values.push((2 * j + 1, ZERO));
    }
    let tail = tail_for(coins, &gauge, hi + 1, d.vartheta);
    let verblunsky = Verblunsky::one_sided(values, tail)?;
    let constant = coins.is_constant().then_some(d);
    let measure = match constant {
        Some(p) => Some(MeasureModel::ClosedScalar(constant_measure(
            p.a, p.vartheta,
        )?)),
        None => Some(MeasureModel::Numeric(NumericMeasure::new(
            CaratheodoryEvaluator::ratio(verblunsky.clone()),
        ))),
    };
    Ok(WalkModel {
        lattice: Lattice::HalfLine,
        coins: coins.clone(),
        gauge,
        verblunsky,
        block: None,
        constant,
        measure,
    })
}

pub fn line_walk(coins: &CoinField) -> Result<WalkModel> {
    let gauge = GaugeTransform::from_coins(coins);
    let d = ConstantParams::of(&coins.default);
    let (lo, hi) = coins.window().unwrap_or((0, -1));
    let mut values = Vec::new();
    for j in lo..=hi {
        values.push((2 * j, alpha_even(coins, &gauge, j)));
        values.push((2 * j + 1, ZERO));
    }
    let upper = tail_for(coins, &gauge, hi + 1, d.vartheta);
    let lower = tail_for(coins, &gauge, lo - 1, d.vartheta);
    let verblunsky = Verblunsky::two_sided(values, upper.clone(), lower.clone())?;

    let fold = |j: i64| {
        Mat2::new(
            ZERO,
            -verblunsky.get(-2 * j - 2).conj(),
            verblunsky.get(2 * j),
            ZERO,
        )
    };
    let jmax = hi.max(-lo).max(0) + 1;
    let mut bvalues = Vec::new();
    for j in 0..=jmax {
        bvalues.push((2 * j, fold(j)));
        bvalues.push((2 * j + 1, Mat2::zero()));
    }
    let btail = Tail::periodic(
        vec![
            Mat2::new(ZERO, -lower.pattern[0].conj(), upper.pattern[0], ZERO),
            Mat2::zero(),
        ],
        d.vartheta,
    );
    let block = Verblunsky::one_sided(bvalues, btail)?;
    let constant = coins.is_constant().then_some(d);
    let measure = match constant {
        Some(p) => Some(MeasureModel::ClosedMatrix(matrix_measure(p.a, p.vartheta)?)),
        None => None,
    };
    Ok(WalkModel {
        lattice: Lattice::Line,
        coins: coins.clone(),
        gauge,
        verblunsky,
        block: Some(block),
        constant,
        measure,
    })
}

/// Walk with the same coin at every site.
pub fn constant_walk(lattice: Lattice, coin: Mat2) -> Result<WalkModel> {
    let coins = CoinField::constant(validate_coin(coin, 0)?);
    match lattice {
        Lattice::HalfLine => halfline_walk(&coins),
        Lattice::Line => line_walk(&coins),
    }
}

/// Identity coins: every spin moves deterministically.
pub fn free_walk(lattice: Lattice) -> WalkModel {
    constant_walk(lattice, Mat2::identity()).expect("identity coin is valid")
}

/// The two scalar problems of a constant coin: parameters `±i|a|, 0, ±i|a|, …`
/// with rotation `ϑ`, and the unitary `P` with `P† A P = diag(i|a|, −i|a|)`.
#[derive(Clone, Debug)]
pub struct ConstantSplit {
    pub params: ConstantParams,
    pub plus: VerblunskySequence,
    pub minus: VerblunskySequence,
    pub vartheta: f64,
    pub p: Mat2,
}

pub fn constant_coin_split(coin: &Coin) -> Result<ConstantSplit> {
    if coin.is_diagonal() {
        return Err(QrwError::Degenerate(
            "diagonal coin has a = 0; use the free walk".into(),
        ));
    }
    let params = ConstantParams::of(coin);
    let ia = I * params.a.norm();
    let seq = |v: C64| Verblunsky::one_sided([], Tail::periodic(vec![v, ZERO], 0.0));
    Ok(ConstantSplit {
        params,
        plus: seq(ia)?,
        minus: seq(-ia)?,
        vartheta: params.vartheta,
        p: diagonalizer(params.a).expect("non-diagonal coin"),
    })
}

impl WalkModel {
    pub fn is_constant(&self) -> bool {
        self.constant.is_some()
    }

    /// Scalar CMV operator `Λ† U Λ` (semi-infinite or doubly infinite).
    pub fn cmv(&self) -> CmvOperator<C64> {
        build_cmv(&self.verblunsky).expect("validated parameters")
    }

    /// Folded block CMV operator (line only).
    pub fn block_cmv(&self) -> Option<CmvOperator<Mat2>> {
        self.block
            .as_ref()
            .map(|b| build_cmv(b).expect("validated parameters"))
    }

    /// One step `ψ ↦ ψ U` on unfolded indices, straight from the coin rule:
    /// `|i↑⟩ → c11 |i+1↑⟩ + c21 |i−1↓⟩`, `|i↓⟩ → c12 |i+1↑⟩ + c22 |i−1↓⟩`,
    /// with `|−1↓⟩` reflected into `|0↑⟩` on the half-line.
    pub fn step(&self, psi: &StateVector) -> Result<StateVector> {
        if psi.lattice != self.lattice {
            return Err(QrwError::Usage(format!(
                "state lives on {:?} but walk on {:?}",
                psi.lattice, self.lattice
            )));
        }
        let mut out = StateVector::new(self.lattice);
        for (&k, &amp) in &psi.amplitudes {
            let s = PureState::from_unfolded(k);
            if self.lattice == Lattice::HalfLine && s.site < 0 {
                return Err(QrwError::Usage(format!("state {s} is off the half-line")));
            }
            let c = self.coins.at(s.site);
            let row = s.spin.offset() as usize;
            let (to_up, to_down) = (c.c(0, row), c.c(1, row));
            out.add(PureState::up(s.site + 1).unfolded(), amp * to_up);
            let down = if self.lattice == Lattice::HalfLine && s.site == 0 {
                PureState::up(0)
            } else {
                PureState::down(s.site - 1)
            };
            out.add(down.unfolded(), amp * to_down);
        }
        Ok(out)
    }

    /// `ψ U^n` by repeated exact steps.
    pub fn evolve(&self, psi: &StateVector, n: usize) -> Result<StateVector> {
        let mut cur = psi.clone();
        for _ in 0..n {
            cur = self.step(&cur)?;
        }
        Ok(cur)
    }

    /// Matrix entry `U_{j,k}` between unfolded indices.
    pub fn transition(&self, from: PureState, to: PureState) -> Result<C64> {
        let out = self.step(&StateVector::basis(self.lattice, from.unfolded()))?;
        Ok(out.get(to.unfolded()))
    }
}
