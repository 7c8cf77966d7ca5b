//! Subcommand bodies. Each returns a [`Report`]; numbers come from `qrw_core`.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;
use std::path::Path;

use qrw_core::cmv::Lattice;
use qrw_core::coin::{halfline_walk, line_walk, state_from_index, Spin, WalkModel};
use qrw_core::kmcg::{
    direct_amplitudes, kmcg_evolve, kmcg_table, moments, moments_series, to_cmv, to_unfolded,
    MeasureModel, Moments, QuadratureSpec,
};
use qrw_core::linalg::cis;
use qrw_core::recurrence::{
    classify_state, echelon_basis, singularity_set, transient_subspace, Classification,
    QuantumState, SingularityTag,
};
use qrw_core::spectral::{
    find_mass_points, recover_weight, weak_limit, AsymptoticKind, CaratheodoryEvaluator,
};
use qrw_core::{Mat2, C64};

use crate::coin_spec::CoinSpec;
use crate::error::CliError;
use crate::report::{format_real, ColumnType as T, Report, ReportKind, Value};
use crate::state_file::load_state;
use crate::svg;

pub struct Walk {
    pub model: WalkModel,
    pub coin: CoinSpec,
}

impl Walk {
    pub fn build(lattice: Lattice, coin: CoinSpec) -> Result<Self, CliError> {
        let field = coin.resolve()?;
        let model = match lattice {
            Lattice::HalfLine => halfline_walk(&field)?,
            Lattice::Line => line_walk(&field)?,
        };
        Ok(Walk { model, coin })
    }

    fn lattice(&self) -> Lattice {
        self.model.lattice
    }

    fn measure(&self) -> Result<&MeasureModel, CliError> {
        self.model.measure.as_ref().ok_or_else(|| {
            CliError::Compute(qrw_core::QrwError::Unsupported(
                "this walk has no spectral measure".into(),
            ))
        })
    }

    fn describe(&self, r: &mut Report) {
        r.meta("lattice", lattice_name(self.lattice()));
        r.meta("coin", &self.coin.label);
        r.meta("constant_coin", self.model.is_constant());
    }
}

pub fn lattice_name(l: Lattice) -> &'static str {
    match l {
        Lattice::HalfLine => "half",
        Lattice::Line => "line",
    }
}

fn spin_name(s: Spin) -> &'static str {
    match s {
        Spin::Up => "up",
        Spin::Down => "down",
    }
}

fn c(re: C64) -> String {
    format!("{} {}", format_real(re.re), format_real(re.im))
}

fn write_svg(path: &Path, body: &str) -> Result<(), CliError> {
    std::fs::write(path, body).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn initial_state(lattice: Lattice, file: Option<&Path>) -> Result<BTreeMap<u64, C64>, CliError> {
    match file {
        Some(p) => Ok(load_state(p, lattice)?.amplitudes),
        None => Ok(BTreeMap::from([(0, C64::new(1.0, 0.0))])),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MethodChoice {
    Direct,
    Kmcg,
    Both,
}

pub fn simulate(
    walk: &Walk,
    initial: Option<&Path>,
    steps: usize,
    method: MethodChoice,
    spec: &QuadratureSpec,
    svg_path: Option<&Path>,
) -> Result<Report, CliError> {
    let lattice = walk.lattice();
    let psi0 = initial_state(lattice, initial)?;
    let mut r = Report::new(
        ReportKind::Amplitudes,
        &[
            ("n", T::Int),
            ("site", T::Int),
            ("spin", T::Text),
            ("index", T::Int),
            ("kmcg", T::Complex),
            ("direct", T::Complex),
            ("prob", T::Real),
            ("diff", T::Real),
        ],
    );
    walk.describe(&mut r);
    r.meta("steps", steps);
    r.meta(
        "method",
        match method {
            MethodChoice::Direct => "direct",
            MethodChoice::Kmcg => "kmcg",
            MethodChoice::Both => "both",
        },
    );
    r.meta("quad_tol", format_real(spec.abs_tol));
    r.meta(
        "initial",
        psi0.iter()
            .map(|(i, a)| format!("{i}:{}", c(*a)))
            .collect::<Vec<_>>()
            .join(";"),
    );

    let mut direct = to_unfolded(lattice, &psi0);
    let mut worst: f64 = 0.0;
    let mut last_profile: BTreeMap<i64, f64> = BTreeMap::new();
    for n in 0..=steps {
        if n > 0 && method != MethodChoice::Kmcg {
            direct = walk.model.step(&direct)?;
        }
        let d = if method != MethodChoice::Kmcg {
            Some(to_cmv(&direct)?)
        } else {
            None
        };
        let k = if method != MethodChoice::Direct {
            Some(kmcg_evolve(&walk.model, &psi0, n, spec)?)
        } else {
            None
        };
        let keys: BTreeSet<u64> = d
            .iter()
            .flat_map(|m| m.keys())
            .chain(k.iter().flat_map(|m| m.keys()))
            .copied()
            .collect();
        let mut profile = BTreeMap::new();
        for idx in keys {
            let s = state_from_index(lattice, idx);
            let dv = d.as_ref().map(|m| m.get(&idx).copied().unwrap_or_default());
            let kv = k.as_ref().map(|m| m.get(&idx).copied().unwrap_or_default());
            let prob = dv.or(kv).map(|a| a.norm_sqr()).unwrap_or(0.0);
            let diff = match (kv, dv) {
                (Some(a), Some(b)) => Some((a - b).norm()),
                _ => None,
            };
            worst = worst.max(diff.unwrap_or(0.0));
            *profile.entry(s.site).or_insert(0.0) += prob;
            r.push(vec![
                Value::Int(n as i64),
                Value::Int(s.site),
                spin_name(s.spin).into(),
                Value::Int(idx as i64),
                kv.into(),
                dv.into(),
                Value::Real(prob),
                diff.into(),
            ]);
        }
        last_profile = profile;
    }
    if method == MethodChoice::Both {
        r.meta("max_diff", format_real(worst));
    }
    if let Some(p) = svg_path {
        let bars: Vec<(i64, f64)> = last_profile.into_iter().collect();
        write_svg(
            p,
            &svg::bar_plot(
                &format!("site profile after {steps} steps"),
                "site",
                "probability",
                &bars,
            ),
        )?;
    }
    Ok(r)
}

pub fn moments_report(walk: &Walk, n: usize, spec: &QuadratureSpec) -> Result<Report, CliError> {
    let measure = walk.measure()?;
    let quad = moments(measure, n, spec)?;
    let series = match measure {
        MeasureModel::Numeric(_) => None,
        m => Some(moments_series(m, n)?),
    };
    let mut r = match &quad {
        Moments::Scalar(_) => Report::new(
            ReportKind::Moments,
            &[("n", T::Int), ("mu", T::Complex), ("mu_series", T::Complex)],
        ),
        Moments::Matrix(_) => Report::new(
            ReportKind::Moments,
            &[
                ("n", T::Int),
                ("mu11", T::Complex),
                ("mu12", T::Complex),
                ("mu21", T::Complex),
                ("mu22", T::Complex),
                ("series11", T::Complex),
                ("series12", T::Complex),
                ("series21", T::Complex),
                ("series22", T::Complex),
            ],
        ),
    };
    walk.describe(&mut r);
    r.meta("n_max", n);
    r.meta(
        "source",
        match measure {
            MeasureModel::Numeric(_) => "maclaurin",
            _ => "quadrature",
        },
    );
    r.meta("quad_tol", format_real(spec.abs_tol));
    let entries = |m: Option<Mat2>| -> Vec<Value> {
        (0..4)
            .map(|e| m.map(|m| m.get(e / 2, e % 2)).into())
            .collect()
    };
    match (&quad, &series) {
        (Moments::Scalar(q), s) => {
            let s = match s {
                Some(Moments::Scalar(s)) => Some(s),
                _ => None,
            };
            for (i, v) in q.iter().enumerate() {
                r.push(vec![
                    Value::Int(i as i64),
                    Value::Complex(*v),
                    s.map(|s| s[i]).into(),
                ]);
            }
        }
        (Moments::Matrix(q), s) => {
            let s = match s {
                Some(Moments::Matrix(s)) => Some(s),
                _ => None,
            };
            for (i, v) in q.iter().enumerate() {
                let mut row = vec![Value::Int(i as i64)];
                row.extend(entries(Some(*v)));
                row.extend(entries(s.map(|s| s[i])));
                r.push(row);
            }
        }
    }
    Ok(r)
}

/// Sample angles `−π + 2π(i + ½)/G`, which avoid the branch point at `−1`.
pub fn grid_angle(i: usize, grid: usize) -> f64 {
    -PI + 2.0 * PI * (i as f64 + 0.5) / grid as f64
}

pub fn measure_report(
    walk: &Walk,
    grid: usize,
    svg_path: Option<&Path>,
) -> Result<Report, CliError> {
    if grid == 0 {
        return Err(CliError::Usage("--grid must be positive".into()));
    }
    let measure = walk.measure()?;
    let matrix = matches!(measure, MeasureModel::ClosedMatrix(_));
    let mut cols = vec![
        ("kind", T::Text),
        ("theta", T::Real),
        ("z", T::Complex),
        ("weight", T::Real),
    ];
    if matrix {
        cols.extend([
            ("w11", T::Complex),
            ("w12", T::Complex),
            ("w21", T::Complex),
            ("w22", T::Complex),
        ]);
    }
    cols.push(("status", T::Text));
    let mut r = Report::new(ReportKind::Measure, &cols);
    walk.describe(&mut r);
    r.meta("grid", grid);
    let mut curve = Vec::with_capacity(grid);
    let source = match measure {
        MeasureModel::ClosedScalar(_) => "closed-form scalar weight",
        MeasureModel::ClosedMatrix(_) => "closed-form matrix weight; weight column is the trace",
        MeasureModel::Numeric(_) => "radial limit of the ratio Caratheodory function",
    };
    r.meta("source", source);
    for i in 0..grid {
        let theta = grid_angle(i, grid);
        let z = cis(theta);
        let mut row = vec![
            Value::from("density"),
            Value::Real(theta),
            Value::Complex(z),
        ];
        let status = match measure {
            MeasureModel::ClosedScalar(m) => {
                let w = m.weight(theta);
                curve.push((theta, w));
                row.push(Value::Real(w));
                "exact"
            }
            MeasureModel::ClosedMatrix(m) => {
                let w = m.weight(theta);
                let tr = w.trace().re;
                curve.push((theta, tr));
                row.push(Value::Real(tr));
                for e in 0..4 {
                    row.push(Value::Complex(w.get(e / 2, e % 2)));
                }
                "exact"
            }
            MeasureModel::Numeric(m) => {
                let w = recover_weight(&m.evaluator, theta)?;
                curve.push((theta, if w.divergent { f64::NAN } else { w.value }));
                row.push(Value::Real(w.value));
                if w.divergent {
                    "divergent"
                } else {
                    "recovered"
                }
            }
        };
        row.push(status.into());
        r.push(row);
    }
    let masses: Vec<(C64, f64)> = match measure {
        MeasureModel::ClosedScalar(m) => m.mass_point().into_iter().collect(),
        MeasureModel::Numeric(m) => m
            .mass_points()
            .iter()
            .map(|p| (p.location, p.mass))
            .collect(),
        other => find_mass_points(&CaratheodoryEvaluator::from_measure(other))
            .into_iter()
            .map(|p| (p.location, p.mass))
            .collect(),
    };
    r.meta("mass_points", masses.len());
    for (z0, mass) in masses {
        let mut row = vec![
            Value::from("mass"),
            Value::Real(z0.arg()),
            Value::Complex(z0),
            Value::Real(mass),
        ];
        if matrix {
            row.extend((0..4).map(|_| Value::Empty));
        }
        row.push(Value::from(match measure {
            MeasureModel::ClosedScalar(_) => "exact",
            _ => "radial-limit",
        }));
        r.push(row);
    }
    if let Some(p) = svg_path {
        write_svg(
            p,
            &svg::line_plot("spectral weight", "theta", "w(theta)", &curve),
        )?;
    }
    Ok(r)
}

fn state_label(lattice: Lattice, idx: u64) -> (i64, &'static str) {
    let s = state_from_index(lattice, idx);
    (s.site, spin_name(s.spin))
}

fn tag_name(t: SingularityTag) -> &'static str {
    match t {
        SingularityTag::Removable => "removable",
        SingularityTag::Pole => "pole",
        SingularityTag::InverseSqrt => "inverse-sqrt",
    }
}

pub fn recurrence_report(
    walk: &Walk,
    state: Option<&Path>,
    max_index: usize,
) -> Result<Report, CliError> {
    if max_index == 0 {
        return Err(CliError::Usage("--max-index must be positive".into()));
    }
    let lattice = walk.lattice();
    let mut r = Report::new(
        ReportKind::Recurrence,
        &[
            ("section", T::Text),
            ("item", T::Int),
            ("index", T::Int),
            ("site", T::Int),
            ("spin", T::Text),
            ("value", T::Complex),
            ("tag", T::Text),
        ],
    );
    walk.describe(&mut r);
    r.meta("max_index", max_index);
    let set = singularity_set(&walk.model)?;
    r.meta("singularity_source", &set.provenance);
    for (i, s) in set.points.iter().enumerate() {
        r.push(vec![
            "singularity".into(),
            Value::Int(i as i64),
            Value::Empty,
            Value::Empty,
            Value::Empty,
            Value::Complex(s.point),
            tag_name(s.tag).into(),
        ]);
    }
    let basis = echelon_basis(&transient_subspace(&walk.model, max_index)?);
    r.meta("transient_dimension", basis.len());
    for (i, v) in basis.iter().enumerate() {
        for (idx, a) in v.iter().enumerate() {
            if *a == C64::new(0.0, 0.0) {
                continue;
            }
            let (site, spin) = state_label(lattice, idx as u64);
            r.push(vec![
                "transient".into(),
                Value::Int(i as i64),
                Value::Int(idx as i64),
                Value::Int(site),
                spin.into(),
                Value::Complex(*a),
                Value::Empty,
            ]);
        }
    }
    if let Some(path) = state {
        let psi = load_state(path, lattice)?;
        let qs = QuantumState::new(&walk.model, psi.amplitudes.clone());
        let verdict = classify_state(&qs)?;
        let label = match verdict.classification {
            Classification::Recurrent => "recurrent",
            Classification::Transient => "transient",
        };
        r.meta("verdict", label);
        r.push(vec![
            "verdict".into(),
            Value::Int(0),
            Value::Empty,
            Value::Empty,
            Value::Empty,
            Value::Empty,
            label.into(),
        ]);
        for (i, e) in verdict.certificate.iter().enumerate() {
            r.push(vec![
                "certificate".into(),
                Value::Int(i as i64),
                Value::Empty,
                Value::Empty,
                Value::Empty,
                Value::Complex(e.value),
                format!(
                    "{} at {}",
                    tag_name(e.singularity.tag),
                    c(e.singularity.point)
                )
                .into(),
            ]);
        }
    }
    Ok(r)
}

pub fn asymptotics_report(walk: &Walk, max_index: usize) -> Result<Report, CliError> {
    let res = weak_limit(&walk.model)?;
    let mut r = Report::new(
        ReportKind::Asymptotics,
        &[("j", T::Int), ("k", T::Int), ("u_infinity", T::Complex)],
    );
    walk.describe(&mut r);
    r.meta(
        "weak_limit",
        match res.kind {
            AsymptoticKind::ZeroWeakLimit => "zero",
            AsymptoticKind::Projector => "projector",
        },
    );
    if let Some(z0) = res.z0 {
        r.meta("z0", c(z0));
    }
    if let Some(mu) = res.mu_infinity {
        r.meta("mu_infinity", c(mu));
    }
    let e = res.evidence;
    r.meta("moment_horizon", e.horizon);
    r.meta("moment_magnitude", format_real(e.magnitude));
    r.meta("moment_threshold", format_real(e.threshold));
    r.meta("moment_below_threshold", e.below_threshold);
    r.meta("moment_decreasing", e.decreasing);
    if res.kind == AsymptoticKind::Projector {
        if walk.lattice() == Lattice::Line {
            r.meta(
                "note",
                "projector entries are reported for half-line walks only",
            );
        } else {
            r.meta("max_index", max_index);
            for j in 0..max_index as u64 {
                for k in 0..max_index as u64 {
                    r.push(vec![
                        Value::Int(j as i64),
                        Value::Int(k as i64),
                        Value::Complex(res.projector_entry(j, k)?),
                    ]);
                }
            }
        }
    }
    Ok(r)
}

/// Per-step KMcG versus direct comparison over indices `0..max_index`.
/// Returns the report and whether every gap is within `tol`.
pub fn compare_report(
    walk: &Walk,
    steps: usize,
    tol: f64,
    max_index: usize,
    spec: &QuadratureSpec,
) -> Result<(Report, bool), CliError> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(CliError::Usage(format!(
            "--tol must be positive, got {tol}"
        )));
    }
    if max_index == 0 {
        return Err(CliError::Usage("--max-index must be positive".into()));
    }
    let lattice = walk.lattice();
    let ids: Vec<u64> = (0..max_index as u64).collect();
    let ns: Vec<i64> = (0..=steps as i64).collect();
    let k = kmcg_table(&walk.model, &ids, &ids, &ns, spec)?;
    let mut d = qrw_core::kmcg::AmplitudeTable::new(lattice, qrw_core::kmcg::Method::Direct);
    for &j in &ids {
        let start =
            qrw_core::cmv::StateVector::basis(lattice, state_from_index(lattice, j).unfolded());
        d.entries
            .extend(direct_amplitudes(&walk.model, &start, steps)?.entries);
    }
    let gaps = k.max_diff_by_step(&d);
    let mut r = Report::new(
        ReportKind::Compare,
        &[
            ("n", T::Int),
            ("max_diff", T::Real),
            ("within_tol", T::Bool),
        ],
    );
    walk.describe(&mut r);
    r.meta("steps", steps);
    r.meta("tol", format_real(tol));
    r.meta("max_index", max_index);
    r.meta("quad_tol", format_real(spec.abs_tol));
    let mut ok = true;
    let mut worst: f64 = 0.0;
    for n in ns {
        let g = gaps.get(&n).copied().unwrap_or(0.0);
        let within = g <= tol;
        ok &= within;
        worst = worst.max(g);
        r.push(vec![Value::Int(n), Value::Real(g), Value::Bool(within)]);
    }
    r.meta("max_diff", format_real(worst));
    r.meta("agree", ok);
    Ok((r, ok))
}
