//! Target input ensembles and the fidelity matrix `R = ∫ dT ρ_in^T ⊗ |ψψ><ψψ|`.
//!
//! The integrand is a trigonometric polynomial of degree at most 3 in φ and a
//! polynomial of degree at most 3 in `cos θ`, so a 6-node Gauss-Legendre rule in
//! `cos θ` times an 8-node trapezoidal rule in φ integrates it exactly.

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c64, eig_hermitian, kron, kron_vec, transpose_plain, ComplexMatrix};
use crate::metrics::{BlochPureState, DensityMatrix};

pub const SPHERE_NODES: usize = 6;
pub const CIRCLE_NODES: usize = 8;
const WEIGHT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum AncillaSpec {
    PureZero,
    MaximallyMixed,
    Explicit(DensityMatrix),
}

impl AncillaSpec {
    pub fn state(&self) -> DensityMatrix {
        match self {
            AncillaSpec::PureZero => DensityMatrix::pure(&[c64(1.0, 0.0), c64(0.0, 0.0)]).expect("normalized"),
            AncillaSpec::MaximallyMixed => DensityMatrix::maximally_mixed(2),
            AncillaSpec::Explicit(rho) => rho.clone(),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            AncillaSpec::PureZero => "|0>",
            AncillaSpec::MaximallyMixed => "1/2",
            AncillaSpec::Explicit(_) => "explicit",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedPoint {
    pub state: BlochPureState,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TargetSet {
    /// Uniform measure on the Bloch sphere.
    FullSphere,
    /// The equator rotated by `alpha` about the x axis, uniform in φ.
    MainCircle { alpha: f64 },
    Discrete(Vec<WeightedPoint>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct InputEnsemble {
    pub target: TargetSet,
    pub ancilla: AncillaSpec,
}

/// One quadrature node of a target set.
#[derive(Debug, Clone, Copy)]
pub struct TargetNode {
    pub psi: [Complex64; 2],
    pub weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureSpec {
    pub sphere_nodes: usize,
    pub circle_nodes: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { sphere_nodes: SPHERE_NODES, circle_nodes: CIRCLE_NODES }
    }
}

impl QuadratureSpec {
    pub fn doubled(&self) -> Self {
        Self { sphere_nodes: 2 * self.sphere_nodes, circle_nodes: 2 * self.circle_nodes }
    }
}

impl InputEnsemble {
    pub fn new(target: TargetSet, ancilla: AncillaSpec) -> Result<Self> {
        let e = Self { target, ancilla };
        e.validate()?;
        Ok(e)
    }

    pub fn full_sphere(ancilla: AncillaSpec) -> Self {
        Self { target: TargetSet::FullSphere, ancilla }
    }

    pub fn main_circle(alpha: f64, ancilla: AncillaSpec) -> Self {
        Self { target: TargetSet::MainCircle { alpha }, ancilla }
    }

    pub fn validate(&self) -> Result<()> {
        if let AncillaSpec::Explicit(rho) = &self.ancilla {
            if rho.dim() != 2 {
                return Err(Error::InvalidEnsemble(format!("ancilla state of dimension {}", rho.dim())));
            }
        }
        match &self.target {
            TargetSet::FullSphere => Ok(()),
            TargetSet::MainCircle { alpha } if alpha.is_finite() => Ok(()),
            TargetSet::MainCircle { alpha } => Err(Error::InvalidEnsemble(format!("rotation angle {alpha}"))),
            TargetSet::Discrete(points) => {
                if points.is_empty() {
                    return Err(Error::InvalidEnsemble("discrete ensemble without points".into()));
                }
                if let Some(p) = points.iter().find(|p| !(p.weight >= 0.0) || !p.state.theta.is_finite() || !p.state.phi.is_finite()) {
                    return Err(Error::InvalidEnsemble(format!("invalid point {p:?}")));
                }
                let total: f64 = points.iter().map(|p| p.weight).sum();
                if (total - 1.0).abs() > WEIGHT_TOL {
                    return Err(Error::InvalidEnsemble(format!("weights sum to {total}")));
                }
                Ok(())
            }
        }
    }

    /// Quadrature nodes of the target set with normalized weights.
    pub fn nodes(&self, spec: QuadratureSpec) -> Vec<TargetNode> {
        match &self.target {
            TargetSet::FullSphere => {
                let (us, ws) = gauss_legendre(spec.sphere_nodes);
                let m = spec.circle_nodes;
                let mut nodes = Vec::with_capacity(us.len() * m);
                for (u, w) in us.iter().zip(&ws) {
                    let theta = u.clamp(-1.0, 1.0).acos();
                    for k in 0..m {
                        let phi = 2.0 * PI * k as f64 / m as f64;
                        // GL weights sum to 2 on [-1, 1].
                        nodes.push(TargetNode { psi: BlochPureState::new(theta, phi).vector(), weight: w / (2.0 * m as f64) });
                    }
                }
                nodes
            }
            TargetSet::MainCircle { alpha } => {
                let m = spec.circle_nodes;
                (0..m)
                    .map(|k| TargetNode {
                        psi: rotate_circle_state(2.0 * PI * k as f64 / m as f64, *alpha),
                        weight: 1.0 / m as f64,
                    })
                    .collect()
            }
            TargetSet::Discrete(points) => {
                points.iter().map(|p| TargetNode { psi: p.state.vector(), weight: p.weight }).collect()
            }
        }
    }

    pub fn to_json(&self) -> EnsembleJson {
        let ancilla = match &self.ancilla {
            AncillaSpec::PureZero => AncillaJson::PureZero,
            AncillaSpec::MaximallyMixed => AncillaJson::MaximallyMixed,
            AncillaSpec::Explicit(rho) => {
                AncillaJson::Explicit { state: rho.matrix().entries().iter().map(|z| [z.re, z.im]).collect() }
            }
        };
        match &self.target {
            TargetSet::FullSphere => EnsembleJson::FullSphere { ancilla },
            TargetSet::MainCircle { alpha } => EnsembleJson::MainCircle { alpha: *alpha, ancilla },
            TargetSet::Discrete(points) => EnsembleJson::Discrete {
                points: points
                    .iter()
                    .map(|p| PointJson { theta: p.state.theta, phi: p.state.phi, weight: Some(p.weight) })
                    .collect(),
                ancilla,
            },
        }
    }

    pub fn from_json(json: &EnsembleJson) -> Result<Self> {
        let ancilla_json = match json {
            EnsembleJson::FullSphere { ancilla }
            | EnsembleJson::MainCircle { ancilla, .. }
            | EnsembleJson::Discrete { ancilla, .. } => ancilla,
        };
        let ancilla = match ancilla_json {
            AncillaJson::PureZero => AncillaSpec::PureZero,
            AncillaJson::MaximallyMixed => AncillaSpec::MaximallyMixed,
            AncillaJson::Explicit { state } => {
                let entries = state.iter().map(|&[re, im]| c64(re, im)).collect();
                let m = ComplexMatrix::new(2, 2, entries)
                    .map_err(|e| Error::InvalidEnsemble(format!("ancilla state: {e}")))?;
                AncillaSpec::Explicit(DensityMatrix::new(m)?)
            }
        };
        let target = match json {
            EnsembleJson::FullSphere { .. } => TargetSet::FullSphere,
            EnsembleJson::MainCircle { alpha, .. } => TargetSet::MainCircle { alpha: *alpha },
            EnsembleJson::Discrete { points, .. } => {
                let uniform = 1.0 / points.len().max(1) as f64;
                TargetSet::Discrete(
                    points
                        .iter()
                        .map(|p| WeightedPoint {
                            state: BlochPureState::new(p.theta, p.phi),
                            weight: p.weight.unwrap_or(uniform),
                        })
                        .collect(),
                )
            }
        };
        Self::new(target, ancilla)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Self::from_json(&serde_json::from_str(s)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_json())?)
    }
}

/// `{kind, alpha?, points?, ancilla: {kind, state?}}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EnsembleJson {
    FullSphere {
        ancilla: AncillaJson,
    },
    MainCircle {
        #[serde(default)]
        alpha: f64,
        ancilla: AncillaJson,
    },
    Discrete {
        points: Vec<PointJson>,
        ancilla: AncillaJson,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AncillaJson {
    PureZero,
    MaximallyMixed,
    /// Row-major 2x2 density matrix as `[[re, im], ...]`.
    Explicit { state: Vec<[f64; 2]> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointJson {
    pub theta: f64,
    pub phi: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<f64>,
}

/// `|ψ><ψ| ⊗ ρ_anc`
pub fn input_state(point: &BlochPureState, anc: &AncillaSpec) -> DensityMatrix {
    input_state_from_vector(&point.vector(), anc)
}

pub fn input_state_from_vector(psi: &[Complex64; 2], anc: &AncillaSpec) -> DensityMatrix {
    DensityMatrix::from_trusted(kron(&ComplexMatrix::projector(psi), anc.state().matrix()))
}

/// `|ψ> ⊗ |ψ>`
pub fn ideal_output(point: &BlochPureState) -> Vec<Complex64> {
    let psi = point.vector();
    kron_vec(&psi, &psi)
}

/// `R_x(α) |Ψ(π/2, φ)>` with `R_x(α) = exp(-iαX/2)`.
pub fn rotate_circle_state(phi: f64, alpha: f64) -> [Complex64; 2] {
    let [a, b] = BlochPureState::new(PI / 2.0, phi).vector();
    let (s, c) = (alpha / 2.0).sin_cos();
    let mis = c64(0.0, -s);
    [a * c + b * mis, a * mis + b * c]
}

#[derive(Debug, Clone, PartialEq)]
pub struct RMatrix {
    matrix: ComplexMatrix,
    dim: usize,
}

impl RMatrix {
    /// Wraps an operator on `C^dim ⊗ C^dim`; checks Hermitian, unit trace, PSD.
    pub fn new(matrix: ComplexMatrix, dim: usize) -> Result<Self> {
        let n = matrix.ensure_square()?;
        if n != dim * dim {
            return Err(Error::DimensionMismatch(format!("{n}x{n} R matrix for local dimension {dim}")));
        }
        let herm = matrix.hermitian_residual();
        if herm > 1e-12 {
            return Err(Error::NotHermitian { residual: herm });
        }
        let tr = matrix.trace();
        if (tr - 1.0).norm() > 1e-12 {
            return Err(Error::InvalidEnsemble(format!("R has trace {tr}")));
        }
        let min = eig_hermitian(&matrix)?.min_eigenvalue();
        if min < -1e-12 {
            return Err(Error::NegativeEigenvalue { eigenvalue: min });
        }
        Ok(Self { matrix, dim })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Local dimension `d` (input and output space both `d`-dimensional).
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `tr(X R)`
    pub fn fidelity_of(&self, choi: &ComplexMatrix) -> Result<f64> {
        Ok(choi.trace_product(&self.matrix)?.re)
    }
}

#[allow(non_snake_case)]
pub fn build_R(ensemble: &InputEnsemble) -> Result<RMatrix> {
    build_r_with(ensemble, QuadratureSpec::default())
}

pub fn build_r_with(ensemble: &InputEnsemble, spec: QuadratureSpec) -> Result<RMatrix> {
    ensemble.validate()?;
    let anc = ensemble.ancilla.state();
    let mut acc = ComplexMatrix::zeros(16, 16);
    for node in ensemble.nodes(spec) {
        let rho_in = kron(&ComplexMatrix::projector(&node.psi), anc.matrix());
        let target = kron_vec(&node.psi, &node.psi);
        let term = kron(&transpose_plain(&rho_in), &ComplexMatrix::projector(&target));
        acc = &acc + &term.scale(node.weight);
    }
    let acc = crate::linalg::hermitize(&acc)?;
    RMatrix::new(acc, 4)
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, ascending nodes.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// `(P_n(x), P_n'(x))`
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = n as f64;
    (p1, n * (x * p1 - p0) / (x * x - 1.0))
}
