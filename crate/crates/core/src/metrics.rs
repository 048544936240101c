//! State-level figures of merit: fidelities, entropy and concurrence.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    c64, eig_hermitian, kron, kron_vec, partial_trace, sqrt_from_eig, transpose_plain, vec_norm, ComplexMatrix,
    Subsystem,
};

const DENSITY_TOL: f64 = 1e-10;
const NORM_TOL: f64 = 1e-12;
const ENTROPY_CUTOFF: f64 = 1e-12;

/// Pure qubit state `cos(θ/2)|0> + sin(θ/2) e^{iφ}|1>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochPureState {
    pub theta: f64,
    pub phi: f64,
}

impl BlochPureState {
    pub fn new(theta: f64, phi: f64) -> Self {
        Self { theta, phi }
    }

    pub fn vector(&self) -> [Complex64; 2] {
        let (s, c) = (self.theta / 2.0).sin_cos();
        [c64(c, 0.0), Complex64::from_polar(s, self.phi)]
    }

    /// The antipodal state on the Bloch sphere.
    pub fn orthogonal(&self) -> [Complex64; 2] {
        let [a, b] = self.vector();
        [-b.conj(), a.conj()]
    }

    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::projector(&self.vector())
    }

    /// Bloch angles of an arbitrary normalized qubit vector (global phase dropped).
    pub fn from_vector(v: &[Complex64; 2]) -> Self {
        let theta = 2.0 * v[1].norm().atan2(v[0].norm());
        let phi = if v[0].norm() < 1e-300 || v[1].norm() < 1e-300 {
            0.0
        } else {
            (v[1].arg() - v[0].arg()).rem_euclid(2.0 * PI)
        };
        Self { theta, phi }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates hermiticity, unit trace and positivity (all to `1e-10`).
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        matrix.ensure_square()?;
        let herm = matrix.hermitian_residual();
        if herm > DENSITY_TOL {
            return Err(Error::InvalidDensity(format!("hermiticity residual {herm:e}")));
        }
        let tr = matrix.trace();
        if (tr - 1.0).norm() > DENSITY_TOL {
            return Err(Error::InvalidDensity(format!("trace {tr}")));
        }
        let min = eig_hermitian(&matrix)?.min_eigenvalue();
        if min < -DENSITY_TOL {
            return Err(Error::InvalidDensity(format!("eigenvalue {min:e}")));
        }
        Ok(Self { matrix })
    }

    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        check_normalized(psi)?;
        Ok(Self { matrix: ComplexMatrix::projector(psi) })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self { matrix: ComplexMatrix::identity(dim).scale(1.0 / dim as f64) }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix { matrix: kron(&self.matrix, &other.matrix) }
    }

    /// Reduced state of one qubit of a two-qubit state.
    pub fn reduce_two_qubit(&self, keep: Subsystem) -> Result<DensityMatrix> {
        if self.dim() != 4 {
            return Err(Error::DimensionMismatch(format!("expected a two-qubit state, got dimension {}", self.dim())));
        }
        let traced = match keep {
            Subsystem::First => Subsystem::Second,
            Subsystem::Second => Subsystem::First,
        };
        Ok(DensityMatrix { matrix: partial_trace(&self.matrix, 2, 2, traced)? })
    }

    /// Crate-internal constructor for matrices known to be states by construction.
    pub(crate) fn from_trusted(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }
}

fn check_normalized(psi: &[Complex64]) -> Result<()> {
    let norm = vec_norm(psi);
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::Unnormalized { norm });
    }
    Ok(())
}

const ROUNDING_CUT: f64 = 1e-13;

// Eigenvalues at rounding level are zeroed before square roots, which would
// otherwise turn 1e-17 noise into 1e-8 errors.
fn rounded_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = eig_hermitian(m)?;
    sqrt_from_eig(&eig)?;
    let cut = ROUNDING_CUT * eig.max_eigenvalue();
    Ok(eig.apply_fn(|l| if l > cut { l.sqrt() } else { 0.0 }))
}

/// Square roots of the eigenvalues, ascending, with the same cut.
fn rounded_root_spectrum(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let eig = eig_hermitian(m)?;
    let cut = ROUNDING_CUT * eig.max_eigenvalue().max(0.0);
    Ok(eig.eigenvalues.iter().map(|&l| if l > cut { l.sqrt() } else { 0.0 }).collect())
}

/// `(tr √(√ρ σ √ρ))²`
pub fn fidelity_uhlmann(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(format!("states of dimension {} and {}", rho.dim(), sigma.dim())));
    }
    let sqrt_rho = rounded_sqrt(rho.matrix())?;
    let inner = &(&sqrt_rho * sigma.matrix()) * &sqrt_rho;
    let root_trace: f64 = rounded_root_spectrum(&crate::linalg::hermitize(&inner)?)?.iter().sum();
    Ok((root_trace * root_trace).clamp(0.0, 1.0))
}

/// `<ψ|ρ|ψ>`
pub fn fidelity_pure(psi: &[Complex64], rho: &DensityMatrix) -> Result<f64> {
    check_normalized(psi)?;
    if psi.len() != rho.dim() {
        return Err(Error::DimensionMismatch(format!("vector of length {} against state of dimension {}", psi.len(), rho.dim())));
    }
    Ok(rho.matrix().expectation(psi)?.re.clamp(0.0, 1.0))
}

/// Von Neumann entropy in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let eig = eig_hermitian(rho.matrix())?;
    Ok(entropy_of_spectrum(&eig.eigenvalues))
}

fn entropy_of_spectrum(spectrum: &[f64]) -> f64 {
    let h: f64 = spectrum.iter().filter(|&&l| l > ENTROPY_CUTOFF).map(|&l| -l * l.log2()).sum();
    h.max(0.0)
}

fn pauli_y_y() -> ComplexMatrix {
    let y = ComplexMatrix::new(2, 2, vec![c64(0.0, 0.0), c64(0.0, -1.0), c64(0.0, 1.0), c64(0.0, 0.0)])
        .expect("2x2 literal");
    kron(&y, &y)
}

/// Wootters concurrence, via the Hermitian product `√ρ ρ̃ √ρ`.
pub fn concurrence(rho12: &DensityMatrix) -> Result<f64> {
    if rho12.dim() != 4 {
        return Err(Error::DimensionMismatch(format!("concurrence needs a two-qubit state, got dimension {}", rho12.dim())));
    }
    let yy = pauli_y_y();
    let flipped = &(&yy * &transpose_plain(rho12.matrix())) * &yy;
    let sqrt_rho = rounded_sqrt(rho12.matrix())?;
    let product = crate::linalg::hermitize(&(&(&sqrt_rho * &flipped) * &sqrt_rho))?;
    let mut lambdas = rounded_root_spectrum(&product)?;
    lambdas.sort_by(|a, b| b.total_cmp(a));
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).clamp(0.0, 1.0))
}

/// The five cloner figures of merit for one input state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub f_c: f64,
    pub f_p: f64,
    pub c: f64,
    pub h_clone: f64,
    pub h_out: f64,
}

impl MetricsRow {
    pub fn as_array(&self) -> [f64; 5] {
        [self.f_c, self.f_p, self.c, self.h_clone, self.h_out]
    }

    pub fn max_abs_diff(&self, other: &MetricsRow) -> f64 {
        self.as_array().iter().zip(other.as_array()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    pub const COLUMNS: [&'static str; 5] = ["F_C", "F_P", "C", "H_clone", "H_out"];
}

/// Anything that produces a joint two-clone state for a pure qubit input.
pub trait CloneSource {
    fn joint_output(&self, input: &BlochPureState) -> Result<DensityMatrix>;
}

/// Evaluates the cloner figures of merit for `input`.
///
/// `F_C` and `H_clone` are taken on the first clone.
pub fn metrics_row<S: CloneSource + ?Sized>(source: &S, input: &BlochPureState) -> Result<MetricsRow> {
    let joint = source.joint_output(input)?;
    metrics_of_joint(&joint, input)
}

pub fn metrics_of_joint(joint: &DensityMatrix, input: &BlochPureState) -> Result<MetricsRow> {
    let psi = input.vector();
    let clone = joint.reduce_two_qubit(Subsystem::First)?;
    let f_c = fidelity_pure(&psi, &clone)?;
    let f_p = fidelity_pure(&kron_vec(&psi, &psi), joint)?;
    let c = concurrence(joint)?;
    let h_clone = von_neumann_entropy(&clone)?;
    let h_out = von_neumann_entropy(joint)?;
    Ok(MetricsRow { f_c, f_p, c, h_clone, h_out })
}
