//! Channels in Choi form: `S(ρ) = tr_in((ρ^T ⊗ 1) X)` with `X` on `H_in ⊗ H_out`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c64, eig_hermitian, partial_trace, ComplexMatrix, Subsystem, ZERO};
use crate::metrics::DensityMatrix;

pub const HERMITIAN_TOL: f64 = 1e-9;
pub const PSD_TOL: f64 = 1e-9;
pub const TP_TOL: f64 = 1e-8;
pub const RANK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ChoiMatrix {
    dim_in: usize,
    dim_out: usize,
    matrix: ComplexMatrix,
}

impl ChoiMatrix {
    /// Shape check only; see [`validate_choi`] for physicality.
    pub fn new(dim_in: usize, dim_out: usize, matrix: ComplexMatrix) -> Result<Self> {
        let n = matrix.ensure_square()?;
        if dim_in == 0 || dim_out == 0 || n != dim_in * dim_out {
            return Err(Error::DimensionMismatch(format!(
                "{n}x{n} Choi matrix for dim_in={dim_in}, dim_out={dim_out}"
            )));
        }
        Ok(Self { dim_in, dim_out, matrix })
    }

    pub fn identity_channel(dim: usize) -> Self {
        let mut m = ComplexMatrix::zeros(dim * dim, dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i * dim + i, j * dim + j)] = c64(1.0, 0.0);
            }
        }
        Self { dim_in: dim, dim_out: dim, matrix: m }
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Always the computational product basis of `H_in ⊗ H_out`, input factor first.
    pub fn basis_note(&self) -> &'static str {
        "computational, H_in (x) H_out"
    }

    pub fn to_json(&self) -> ChoiJson {
        ChoiJson {
            dim_in: self.dim_in,
            dim_out: self.dim_out,
            entries: self.matrix.entries().iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn from_json(json: &ChoiJson) -> Result<Self> {
        let n = json.dim_in * json.dim_out;
        let entries = json.entries.iter().map(|&[re, im]| c64(re, im)).collect();
        Self::new(json.dim_in, json.dim_out, ComplexMatrix::new(n, n, entries)?)
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_json())?)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Self::from_json(&serde_json::from_str(s)?)
    }

    /// `tr_out X`, which must equal the identity on `H_in`.
    pub fn output_trace(&self) -> ComplexMatrix {
        partial_trace(&self.matrix, self.dim_in, self.dim_out, Subsystem::Second).expect("shape checked at construction")
    }

    fn tp_residual(&self) -> f64 {
        self.output_trace().distance(&ComplexMatrix::identity(self.dim_in))
    }
}

/// On-disk form: `{dim_in, dim_out, entries: [[re, im], ...]}`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChoiJson {
    pub dim_in: usize,
    pub dim_out: usize,
    pub entries: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChoiValidation {
    pub hermiticity_residual: f64,
    pub min_eigenvalue: f64,
    pub tp_residual: f64,
    pub rank: usize,
}

impl ChoiValidation {
    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_residual <= HERMITIAN_TOL
    }

    pub fn is_psd(&self) -> bool {
        self.min_eigenvalue >= -PSD_TOL
    }

    pub fn is_trace_preserving(&self) -> bool {
        self.tp_residual <= TP_TOL
    }

    pub fn passed(&self) -> bool {
        self.is_hermitian() && self.is_psd() && self.is_trace_preserving()
    }
}

impl fmt::Display for ChoiValidation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "hermiticity_residual={:.3e} min_eigenvalue={:.3e} tp_residual={:.3e} rank={}",
            self.hermiticity_residual, self.min_eigenvalue, self.tp_residual, self.rank
        )
    }
}

pub fn validate_choi(x: &ChoiMatrix) -> ChoiValidation {
    let hermiticity_residual = x.matrix.hermitian_residual();
    let tp_residual = x.tp_residual();
    let (min_eigenvalue, rank) = match crate::linalg::hermitize(&x.matrix).and_then(|h| eig_hermitian(&h)) {
        Ok(eig) => (eig.min_eigenvalue(), eig.rank(RANK_TOL)),
        Err(_) => (f64::NEG_INFINITY, 0),
    };
    ChoiValidation { hermiticity_residual, min_eigenvalue, tp_residual, rank }
}

fn ensure_valid(x: &ChoiMatrix) -> Result<ChoiValidation> {
    let report = validate_choi(x);
    if report.passed() {
        Ok(report)
    } else {
        Err(Error::InvalidChoi(report.to_string()))
    }
}

/// Applies the channel. Only hermiticity and trace preservation are checked here;
/// positivity of the output follows when `X` passes [`validate_choi`].
pub fn apply_channel(x: &ChoiMatrix, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if rho.dim() != x.dim_in {
        return Err(Error::DimensionMismatch(format!(
            "input state of dimension {} for a channel on dimension {}",
            rho.dim(),
            x.dim_in
        )));
    }
    let herm = x.matrix.hermitian_residual();
    if herm > HERMITIAN_TOL {
        return Err(Error::InvalidChoi(format!("hermiticity residual {herm:e}")));
    }
    let tp = x.tp_residual();
    if tp > TP_TOL {
        return Err(Error::InvalidChoi(format!("trace-preservation residual {tp:e}")));
    }
    Ok(DensityMatrix::from_trusted(apply_unchecked(x, rho.matrix())))
}

/// `S(ρ)_{ab} = Σ_{ij} ρ_{ij} X_{(i,a),(j,b)}`
pub(crate) fn apply_unchecked(x: &ChoiMatrix, rho: &ComplexMatrix) -> ComplexMatrix {
    let (din, dout) = (x.dim_in, x.dim_out);
    let mut out = ComplexMatrix::zeros(dout, dout);
    for i in 0..din {
        for j in 0..din {
            let r = rho[(i, j)];
            if r == ZERO {
                continue;
            }
            for a in 0..dout {
                for b in 0..dout {
                    out[(a, b)] += r * x.matrix[(i * dout + a, j * dout + b)];
                }
            }
        }
    }
    crate::linalg::hermitize(&out).expect("square")
}

#[derive(Debug, Clone)]
pub struct KrausSet {
    pub operators: Vec<ComplexMatrix>,
}

impl KrausSet {
    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    /// `Σ K ρ K†`
    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let dout = self.operators[0].rows();
        self.operators.iter().fold(ComplexMatrix::zeros(dout, dout), |acc, k| {
            &acc + &(&(k * rho) * &k.adjoint())
        })
    }

    /// `Σ K† K`
    pub fn completeness(&self) -> ComplexMatrix {
        let din = self.operators[0].cols();
        self.operators.iter().fold(ComplexMatrix::zeros(din, din), |acc, k| &acc + &(&k.adjoint() * k))
    }
}

/// Orthogonal Kraus operators from the eigendecomposition of `X`; one per
/// eigenvalue above `1e-9`.
pub fn kraus_from_choi(x: &ChoiMatrix) -> Result<KrausSet> {
    ensure_valid(x)?;
    let eig = eig_hermitian(&crate::linalg::hermitize(&x.matrix)?)?;
    let (din, dout) = (x.dim_in, x.dim_out);
    let mut operators = Vec::new();
    for (k, &lambda) in eig.eigenvalues.iter().enumerate().rev() {
        if lambda <= RANK_TOL {
            continue;
        }
        let scale = lambda.sqrt();
        let mut op = ComplexMatrix::zeros(dout, din);
        for i in 0..din {
            for a in 0..dout {
                op[(a, i)] = eig.eigenvectors[(i * dout + a, k)] * scale;
            }
        }
        operators.push(op);
    }
    Ok(KrausSet { operators })
}

/// The four optimal cloner Choi matrices with exact rational entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fixture {
    UnivPure,
    UnivCmix,
    EquatorPure,
    EquatorCmix,
}

impl Fixture {
    pub const ALL: [Fixture; 4] = [Fixture::UnivPure, Fixture::UnivCmix, Fixture::EquatorPure, Fixture::EquatorCmix];

    pub fn name(&self) -> &'static str {
        match self {
            Fixture::UnivPure => "univ-pure",
            Fixture::UnivCmix => "univ-cmix",
            Fixture::EquatorPure => "equator-pure",
            Fixture::EquatorCmix => "equator-cmix",
        }
    }

    /// `(row, col, numerator, denominator)` for the upper triangle, 0-based.
    fn entries(&self) -> Vec<(usize, usize, i64, i64)> {
        // Two clone blocks share one layout: input |x,a> with ancilla a, output pairs.
        let clone_block = |offset: usize, end: (i64, i64), mid: (i64, i64), couple: (i64, i64)| {
            let o = offset;
            vec![
                (o, o, end.0, end.1),
                (o + 11, o + 11, end.0, end.1),
                (o + 1, o + 1, mid.0, mid.1),
                (o + 2, o + 2, mid.0, mid.1),
                (o + 1, o + 2, mid.0, mid.1),
                (o + 9, o + 9, mid.0, mid.1),
                (o + 10, o + 10, mid.0, mid.1),
                (o + 9, o + 10, mid.0, mid.1),
                (o, o + 9, couple.0, couple.1),
                (o, o + 10, couple.0, couple.1),
                (o + 1, o + 11, couple.0, couple.1),
                (o + 2, o + 11, couple.0, couple.1),
            ]
        };
        let depolarized = || [4, 5, 6, 7, 12, 13, 14, 15].into_iter().map(|i| (i, i, 1, 4));
        match self {
            Fixture::UnivPure => {
                let mut e = clone_block(0, (2, 3), (1, 6), (1, 3));
                e.extend(depolarized());
                e
            }
            Fixture::UnivCmix => {
                let mut e = clone_block(0, (2, 3), (1, 6), (1, 3));
                e.extend(clone_block(4, (2, 3), (1, 6), (1, 3)));
                e
            }
            Fixture::EquatorPure => {
                let mut e = clone_block(0, (1, 3), (1, 3), (1, 3));
                e.extend(depolarized());
                e
            }
            Fixture::EquatorCmix => {
                let mut e = clone_block(0, (1, 3), (1, 3), (1, 3));
                e.extend(clone_block(4, (1, 3), (1, 3), (1, 3)));
                e
            }
        }
    }

    pub fn choi(&self) -> ChoiMatrix {
        let mut m = ComplexMatrix::zeros(16, 16);
        for (r, c, num, den) in self.entries() {
            let v = Complex64::new(num as f64 / den as f64, 0.0);
            m[(r, c)] = v;
            m[(c, r)] = v;
        }
        ChoiMatrix { dim_in: 4, dim_out: 4, matrix: m }
    }
}

impl FromStr for Fixture {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Fixture::ALL.into_iter().find(|f| f.name() == s).ok_or_else(|| Error::UnknownFixture(s.to_string()))
    }
}

impl fmt::Display for Fixture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn load_fixture(name: &str) -> Result<ChoiMatrix> {
    Ok(name.parse::<Fixture>()?.choi())
}
