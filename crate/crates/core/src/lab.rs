//! Experiment drivers behind the command-line tool: design, the comparison
//! table, the meridian and surface sweeps, and certification.

use std::f64::consts::PI;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::channel::{apply_channel, apply_unchecked, ChoiMatrix, Fixture};
use crate::ensemble::{build_R, input_state, rotate_circle_state, AncillaSpec, InputEnsemble, RMatrix};
use crate::error::{Error, Result};
use crate::metrics::{fidelity_pure, metrics_row, BlochPureState, CloneSource, DensityMatrix, MetricsRow};
use crate::linalg::Subsystem;
use crate::sdp::{assemble_problem, check_optimality_of, solve, OptimalityReport, SdpSolution};
use crate::ucqc::Ucqc;

/// A designed channel fed with `input ⊗ ancilla`.
#[derive(Debug, Clone)]
pub struct ChannelCloner {
    choi: ChoiMatrix,
    ancilla: AncillaSpec,
}

impl ChannelCloner {
    pub fn new(choi: ChoiMatrix, ancilla: AncillaSpec) -> Result<Self> {
        if choi.dim_in() != 4 || choi.dim_out() != 4 {
            return Err(Error::DimensionMismatch(format!(
                "cloner needs a 4 -> 4 channel, got {} -> {}",
                choi.dim_in(),
                choi.dim_out()
            )));
        }
        // Checks hermiticity and trace preservation once.
        apply_channel(&choi, &DensityMatrix::maximally_mixed(4))?;
        Ok(Self { choi, ancilla })
    }

    pub fn choi(&self) -> &ChoiMatrix {
        &self.choi
    }

    pub fn ancilla(&self) -> &AncillaSpec {
        &self.ancilla
    }

    /// `F_C` only, cheaper than a full metrics row.
    pub fn clone_fidelity(&self, input: &BlochPureState) -> Result<f64> {
        let joint = self.joint_output(input)?;
        fidelity_pure(&input.vector(), &joint.reduce_two_qubit(Subsystem::First)?)
    }
}

impl CloneSource for ChannelCloner {
    fn joint_output(&self, input: &BlochPureState) -> Result<DensityMatrix> {
        let rho = input_state(input, &self.ancilla);
        Ok(DensityMatrix::from_trusted(apply_unchecked(&self.choi, rho.matrix())))
    }
}

/// Builds `R` for the ensemble and solves the design program.
pub fn design(ensemble: &InputEnsemble, tol: f64) -> Result<SdpSolution> {
    let r = build_R(ensemble)?;
    solve(&assemble_problem(&r)?, tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Universal,
    Equator,
}

impl Target {
    pub fn ensemble(&self, ancilla: AncillaSpec) -> InputEnsemble {
        match self {
            Target::Universal => InputEnsemble::full_sphere(ancilla),
            Target::Equator => InputEnsemble::main_circle(0.0, ancilla),
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Target::Universal => "universal",
            Target::Equator => "equator",
        }
    }

    /// Input used to read off the (state-independent) table values.
    pub fn probe(&self) -> BlochPureState {
        match self {
            Target::Universal => BlochPureState::new(1.1, 0.7),
            Target::Equator => BlochPureState::new(PI / 2.0, 0.7),
        }
    }
}

/// Target set, design ancilla and optimum for a reference fixture.
pub fn fixture_design(fixture: Fixture) -> (InputEnsemble, f64) {
    match fixture {
        Fixture::UnivPure => (Target::Universal.ensemble(AncillaSpec::PureZero), 2.0 / 3.0),
        Fixture::UnivCmix => (Target::Universal.ensemble(AncillaSpec::MaximallyMixed), 2.0 / 3.0),
        Fixture::EquatorPure => (Target::Equator.ensemble(AncillaSpec::PureZero), 0.75),
        Fixture::EquatorCmix => (Target::Equator.ensemble(AncillaSpec::MaximallyMixed), 0.75),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub label: String,
    pub metrics: MetricsRow,
}

fn ancilla_label(a: &AncillaSpec) -> &'static str {
    match a {
        AncillaSpec::PureZero => "|0>",
        _ => "1/2 I",
    }
}

/// UCQC followed by every (target, design ancilla, used ancilla) combination.
pub fn table1(tol: f64) -> Result<Vec<TableRow>> {
    let mut rows = vec![TableRow {
        label: "UCQC, symmetric mode".into(),
        metrics: metrics_row(&Ucqc, &Target::Universal.probe())?,
    }];
    let pure = AncillaSpec::PureZero;
    let mixed = AncillaSpec::MaximallyMixed;
    for target in [Target::Universal, Target::Equator] {
        let pure_design = design(&target.ensemble(pure.clone()), tol)?.x_opt;
        let mixed_design = design(&target.ensemble(mixed.clone()), tol)?.x_opt;
        let combos = [
            (&pure_design, &pure, &pure),
            (&mixed_design, &mixed, &mixed),
            (&pure_design, &pure, &mixed),
            (&mixed_design, &mixed, &pure),
        ];
        for (choi, designed, used) in combos {
            let cloner = ChannelCloner::new(choi.clone(), used.clone())?;
            rows.push(TableRow {
                label: format!(
                    "{}, opt. for ancilla: {}, used ancilla: {}",
                    target.name(),
                    ancilla_label(designed),
                    ancilla_label(used)
                ),
                metrics: metrics_row(&cloner, &target.probe())?,
            });
        }
    }
    Ok(rows)
}

/// Five decimals; `-0.00000` is printed as `0.00000`.
pub fn fmt5(v: f64) -> String {
    format!("{:.5}", v + 0.0).replace("-0.00000", "0.00000")
}

pub fn render_table(rows: &[TableRow]) -> String {
    let width = rows.iter().map(|r| r.label.len()).max().unwrap_or(0);
    let mut out = format!("{:width$}", "Cloner");
    for c in MetricsRow::COLUMNS {
        out.push_str(&format!("  {c:>8}"));
    }
    out.push('\n');
    for r in rows {
        out.push_str(&format!("{:width$}", r.label));
        for v in r.metrics.as_array() {
            out.push_str(&format!("  {:>8}", fmt5(v)));
        }
        out.push('\n');
    }
    out
}

pub fn write_table_csv<W: Write>(rows: &[TableRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["cloner", "F_C", "F_P", "C", "H_clone", "H_out"])?;
    for r in rows {
        let mut rec = vec![r.label.clone()];
        rec.extend(r.metrics.as_array().iter().map(|v| fmt5(*v)));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeridianPoint {
    pub theta: f64,
    pub metrics: MetricsRow,
}

/// `points` values of θ spanning `[0, π]` at φ = 0.
pub fn sweep_meridian(cloner: &ChannelCloner, points: usize) -> Result<Vec<MeridianPoint>> {
    if points < 2 {
        return Err(Error::InvalidEnsemble(format!("meridian sweep needs at least 2 points, got {points}")));
    }
    (0..points)
        .into_par_iter()
        .map(|k| {
            let theta = PI * k as f64 / (points - 1) as f64;
            let metrics = metrics_row(cloner, &BlochPureState::new(theta, 0.0))?;
            Ok(MeridianPoint { theta, metrics })
        })
        .collect()
}

/// Columns: θ, the five metrics, then the same five for the UCQC (constant).
pub fn write_meridian_csv<W: Write>(points: &[MeridianPoint], out: W) -> Result<()> {
    let reference = metrics_row(&Ucqc, &Target::Universal.probe())?;
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["theta".to_string()];
    header.extend(MetricsRow::COLUMNS.iter().map(|c| c.to_string()));
    header.extend(MetricsRow::COLUMNS.iter().map(|c| format!("UCQC_{c}")));
    w.write_record(&header)?;
    for p in points {
        let mut rec = vec![p.theta.to_string()];
        rec.extend(p.metrics.as_array().iter().map(|v| v.to_string()));
        rec.extend(reference.as_array().iter().map(|v| v.to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurfacePoint {
    pub theta: f64,
    pub phi: f64,
    pub f_c: f64,
}

/// θ over `[0, π]` with `n` points, φ over `[0, 2π]` with `m` points.
pub fn sweep_surface(cloner: &ChannelCloner, n: usize, m: usize) -> Result<Vec<SurfacePoint>> {
    if n < 2 || m < 2 {
        return Err(Error::InvalidEnsemble(format!("surface grid {n}x{m} is too small")));
    }
    (0..n * m)
        .into_par_iter()
        .map(|k| {
            let theta = PI * (k / m) as f64 / (n - 1) as f64;
            let phi = 2.0 * PI * (k % m) as f64 / (m - 1) as f64;
            let f_c = cloner.clone_fidelity(&BlochPureState::new(theta, phi))?;
            Ok(SurfacePoint { theta, phi, f_c })
        })
        .collect()
}

pub fn write_surface_csv<W: Write>(points: &[SurfacePoint], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["theta", "phi", "F_C"])?;
    for p in points {
        w.write_record([p.theta.to_string(), p.phi.to_string(), p.f_c.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// `F_C` at `points` evenly spaced states of the circle tilted by `alpha`.
pub fn circle_fidelities(cloner: &ChannelCloner, alpha: f64, points: usize) -> Result<Vec<f64>> {
    (0..points)
        .map(|k| {
            let phi = 2.0 * PI * k as f64 / points as f64;
            cloner.clone_fidelity(&BlochPureState::from_vector(&rotate_circle_state(phi, alpha)))
        })
        .collect()
}

/// Validates `choi` and checks it is optimal for `r` at its own achieved value,
/// or at `claimed` when given.
pub fn certify(choi: &ChoiMatrix, r: &RMatrix, claimed: Option<f64>) -> Result<OptimalityReport> {
    let claimed = match claimed {
        Some(v) => v,
        None => r.fidelity_of(choi.matrix())?,
    };
    check_optimality_of(choi, r, claimed)
}

pub fn certify_fixture(fixture: Fixture) -> Result<OptimalityReport> {
    let (ensemble, value) = fixture_design(fixture);
    certify(&fixture.choi(), &build_R(&ensemble)?, Some(value))
}
