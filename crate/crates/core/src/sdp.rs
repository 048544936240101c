//! The cloner design problem as a dual-form semidefinite program.
//!
//! A Hermitian `X` on `H_in ⊗ H_out` with `tr_out X = 1` is parametrized as
//! `X = F0 + Σ x_i F_i` with `F0 = 1/d` and `F_i = σ_j ⊗ τ_k` (`k ≥ 1`), so every
//! `x` is trace preserving by construction. The program
//!
//! ```text
//! maximize  -cᵀx   subject to  Z(x) = F0 + Σ x_i F_i ⪰ 0,   c_i = -tr(R F_i)
//! ```
//!
//! is paired with `minimize tr(F0 Y)  s.t.  tr(F_i Y) = c_i, Y ⪰ 0`, and solved by
//! a feasible primal-dual path-following method with Nesterov-Todd scaling that
//! works directly on complex Hermitian matrices.

use std::io::Write;

use log::{debug, trace};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::{validate_choi, ChoiJson, ChoiMatrix, ChoiValidation};
#[cfg(test)]
use crate::channel::Fixture;
use crate::ensemble::RMatrix;
use crate::error::{Error, Result};
use crate::linalg::{
    c64, eig_hermitian, hermitize, kron, partial_trace, ComplexMatrix, EigenDecomposition, Subsystem, ZERO,
};

pub const MIN_TOL: f64 = 1e-12;
pub const MAX_TOL: f64 = 1e-4;
pub const DEFAULT_TOL: f64 = 1e-9;

/// Hilbert-Schmidt orthonormal Hermitian basis with `σ_0 ∝ 1` and traceless rest.
#[derive(Debug, Clone)]
pub struct OperatorBasis {
    dim: usize,
    elements: Vec<ComplexMatrix>,
}

impl OperatorBasis {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }
}

fn paulis() -> [ComplexMatrix; 4] {
    let o = ZERO;
    let l = c64(1.0, 0.0);
    let i = c64(0.0, 1.0);
    [
        ComplexMatrix::identity(2),
        ComplexMatrix::new(2, 2, vec![o, l, l, o]).expect("2x2"),
        ComplexMatrix::new(2, 2, vec![o, -i, i, o]).expect("2x2"),
        ComplexMatrix::new(2, 2, vec![l, o, o, -l]).expect("2x2"),
    ]
}

/// Normalized Pauli basis for one qubit (`d = 2`) or two qubits (`d = 4`,
/// element `4a + b` is `P_a ⊗ P_b / 2`).
pub fn pauli_basis(d: usize) -> Result<OperatorBasis> {
    let p = paulis();
    let elements = match d {
        2 => p.iter().map(|m| m.scale(std::f64::consts::FRAC_1_SQRT_2)).collect(),
        4 => p.iter().flat_map(|a| p.iter().map(move |b| kron(a, b).scale(0.5))).collect(),
        other => return Err(Error::UnsupportedDimension(other)),
    };
    Ok(OperatorBasis { dim: d, elements })
}

#[derive(Debug, Clone)]
pub struct SdpProblem {
    d: usize,
    f0: ComplexMatrix,
    f: Vec<ComplexMatrix>,
    c: Vec<f64>,
    index_map: Vec<(usize, usize)>,
}

impl SdpProblem {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn f0(&self) -> &ComplexMatrix {
        &self.f0
    }

    pub fn constraints(&self) -> &[ComplexMatrix] {
        &self.f
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    /// `ĩ → (j, k)` with `F_ĩ = σ_j ⊗ τ_k`.
    pub fn index_map(&self) -> &[(usize, usize)] {
        &self.index_map
    }

    pub fn num_vars(&self) -> usize {
        self.f.len()
    }

    /// `Z(x) = F0 + Σ x_i F_i`
    pub fn lmi(&self, x: &[f64]) -> ComplexMatrix {
        let mut z = self.f0.clone();
        for (xi, fi) in x.iter().zip(&self.f) {
            if *xi != 0.0 {
                for (dst, src) in z.entries_mut().iter_mut().zip(fi.entries()) {
                    *dst += src * xi;
                }
            }
        }
        z
    }

    /// `p = -cᵀx`
    pub fn objective(&self, x: &[f64]) -> f64 {
        -self.c.iter().zip(x).map(|(c, x)| c * x).sum::<f64>()
    }

    /// Same program with a replaced cost vector.
    pub fn with_cost(&self, c: Vec<f64>) -> Result<Self> {
        if c.len() != self.f.len() {
            return Err(Error::DimensionMismatch(format!("{} costs for {} variables", c.len(), self.f.len())));
        }
        Ok(Self { c, ..self.clone() })
    }
}

/// Builds `(c, F)` from `R`. Index order: `j ∈ [0, d²)` outer, `k ∈ [1, d²)` inner.
pub fn assemble_problem(r: &RMatrix) -> Result<SdpProblem> {
    let d = r.dim();
    let basis = pauli_basis(d)?;
    let d2 = d * d;
    let mut f = Vec::with_capacity(d2 * (d2 - 1));
    let mut c = Vec::with_capacity(d2 * (d2 - 1));
    let mut index_map = Vec::with_capacity(d2 * (d2 - 1));
    for j in 0..d2 {
        for k in 1..d2 {
            let fi = kron(&basis.elements[j], &basis.elements[k]);
            let t = r.matrix().trace_product(&fi)?;
            if t.im.abs() > 1e-12 {
                return Err(Error::NotHermitian { residual: t.im.abs() });
            }
            c.push(-t.re);
            f.push(fi);
            index_map.push((j, k));
        }
    }
    let f0 = ComplexMatrix::identity(d2).scale(1.0 / d as f64);
    Ok(SdpProblem { d, f0, f, c, index_map })
}

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    /// Stop once the absolute duality gap `tr(Z Y)` is at or below this.
    pub tol: f64,
    pub max_iter: usize,
    /// Fraction-to-boundary factor for both step lengths.
    pub step_fraction: f64,
    /// Centering parameter: the target gap is this fraction of the current one.
    pub centering: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { tol: DEFAULT_TOL, max_iter: 200, step_fraction: 0.98, centering: 0.3 }
    }
}

impl SolverOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub primal: f64,
    pub dual: f64,
    pub gap: f64,
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub x: Vec<f64>,
    pub p_star: f64,
    pub f_star: f64,
    pub x_opt: ChoiMatrix,
    /// Absolute gap `tr(Z(x) Y)`.
    pub gap: f64,
    /// The final dual iterate `Y`.
    pub dual_certificate: ComplexMatrix,
    /// `max_i |tr(F_i Y) - c_i|`
    pub dual_residual: f64,
    pub log: Vec<IterationRecord>,
}

impl SdpSolution {
    pub fn iterations(&self) -> usize {
        self.log.len().saturating_sub(1)
    }

    pub fn to_json(&self) -> SolutionJson {
        SolutionJson { f_star: self.f_star, p_star: self.p_star, gap: self.gap, x: self.x.clone(), choi: self.x_opt.to_json() }
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_json())?)
    }

    /// CSV with header `iteration,primal,dual,gap`.
    pub fn write_log<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for rec in &self.log {
            w.serialize(rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `{F_star, p_star, gap, x, choi}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionJson {
    #[serde(rename = "F_star")]
    pub f_star: f64,
    pub p_star: f64,
    pub gap: f64,
    pub x: Vec<f64>,
    pub choi: ChoiJson,
}

/// Nonzero entries `(row, col, value)` of a constraint matrix.
type Sparse = Vec<(usize, usize, Complex64)>;

fn sparsify(m: &ComplexMatrix) -> Sparse {
    let n = m.cols();
    m.entries()
        .iter()
        .enumerate()
        .filter(|(_, z)| z.norm() > 0.0)
        .map(|(k, z)| (k / n, k % n, *z))
        .collect()
}

/// `Re tr(F A)` for sparse `F`.
fn trace_sparse(f: &Sparse, a: &ComplexMatrix) -> f64 {
    f.iter().map(|&(r, c, v)| (v * a[(c, r)]).re).sum()
}

pub fn solve(problem: &SdpProblem, tol: f64) -> Result<SdpSolution> {
    solve_with(problem, &SolverOptions::with_tol(tol))
}

pub fn solve_with(problem: &SdpProblem, opts: &SolverOptions) -> Result<SdpSolution> {
    if !(MIN_TOL..=MAX_TOL).contains(&opts.tol) {
        return Err(Error::InvalidTolerance(opts.tol));
    }
    let n = problem.f0.rows();
    let m = problem.f.len();
    let sparse: Vec<Sparse> = problem.f.iter().map(sparsify).collect();

    let mut x = vec![0.0; m];
    let mut z = problem.f0.clone();
    if eig_hermitian(&z)?.min_eigenvalue() <= 0.0 {
        return Err(Error::NoFeasibleStart("F0 is not positive definite".into()));
    }
    let mut y = initial_dual(problem, &sparse)?;

    let mut log = Vec::new();
    let mut iteration = 0;
    loop {
        let gap = z.trace_product(&y)?.re;
        let primal = problem.objective(&x);
        let dual = problem.f0.trace_product(&y)?.re;
        log.push(IterationRecord { iteration, primal, dual, gap });
        trace!("iter {iteration}: primal {primal:.12} dual {dual:.12} gap {gap:.3e}");

        if gap <= opts.tol {
            break;
        }
        if iteration >= opts.max_iter {
            let best = finish(problem, &sparse, x, y, gap, log)?;
            return Err(Error::NotConverged { iterations: iteration, gap, best: Box::new(best) });
        }
        iteration += 1;

        let w = nt_scaling(&z, &y)?;
        let z_eig = eig_hermitian(&z)?;
        let mu = gap / n as f64;
        let z_inv = z_eig.apply_fn(|l| 1.0 / l);
        let rc = &z_inv.scale(opts.centering * mu) - &y;

        let schur = schur_complement(&sparse, &w, n);
        let rhs: Vec<f64> = sparse.iter().map(|f| trace_sparse(f, &rc)).collect();
        let dx = solve_spd(schur, m, &rhs).ok_or(Error::SingularNewton { iteration })?;

        let mut dz = ComplexMatrix::zeros(n, n);
        for (f, &dxi) in sparse.iter().zip(&dx) {
            for &(r, c, v) in f {
                dz[(r, c)] += v * dxi;
            }
        }
        let dy = hermitize(&(&rc - &(&(&w * &dz) * &w)))?;

        let alpha_p = step_length(&z_eig, &dz, opts.step_fraction)?;
        let alpha_d = step_length(&eig_hermitian(&y)?, &dy, opts.step_fraction)?;

        for (xi, dxi) in x.iter_mut().zip(&dx) {
            *xi += alpha_p * dxi;
        }
        z = problem.lmi(&x);
        y = hermitize(&(&y + &dy.scale(alpha_d)))?;
    }

    let gap = log.last().map(|r| r.gap).unwrap_or(f64::NAN);
    let sol = finish(problem, &sparse, x, y, gap, log)?;
    debug!("solved in {} iterations: F* = {:.12}, gap = {:.3e}", sol.iterations(), sol.f_star, sol.gap);
    Ok(sol)
}

fn finish(
    problem: &SdpProblem,
    sparse: &[Sparse],
    x: Vec<f64>,
    y: ComplexMatrix,
    gap: f64,
    log: Vec<IterationRecord>,
) -> Result<SdpSolution> {
    let p_star = problem.objective(&x);
    let dual_residual = sparse
        .iter()
        .zip(&problem.c)
        .map(|(f, c)| (trace_sparse(f, &y) - c).abs())
        .fold(0.0, f64::max);
    let x_opt = round_to_face(&recover_choi(problem, &x)?)?;
    Ok(SdpSolution {
        f_star: p_star + 1.0 / problem.d as f64,
        p_star,
        x,
        x_opt,
        gap,
        dual_certificate: y,
        dual_residual,
        log,
    })
}

/// `Y0 = Σ y_i F_i + t·1` with `Gram(F) y = c`. Needs traceless `F_i`, so that the
/// identity shift keeps the equality constraints.
fn initial_dual(problem: &SdpProblem, sparse: &[Sparse]) -> Result<ComplexMatrix> {
    let n = problem.f0.rows();
    let m = sparse.len();
    if let Some(i) = problem.f.iter().position(|f| f.trace().norm() > 1e-12) {
        return Err(Error::NoFeasibleStart(format!("constraint {i} is not traceless")));
    }
    let mut gram = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..m {
            gram[i * m + j] = trace_sparse(&sparse[i], &problem.f[j]);
        }
    }
    let coeffs = solve_spd(gram, m, &problem.c).ok_or_else(|| Error::NoFeasibleStart("constraints are linearly dependent".into()))?;
    let mut base = ComplexMatrix::zeros(n, n);
    for (f, &yi) in sparse.iter().zip(&coeffs) {
        for &(r, c, v) in f {
            base[(r, c)] += v * yi;
        }
    }
    let base = hermitize(&base)?;
    let shift = 1.0 + (-eig_hermitian(&base)?.min_eigenvalue()).max(0.0);
    Ok(&base + &ComplexMatrix::identity(n).scale(shift))
}

/// Nesterov-Todd point `W = Y^{1/2} (Y^{1/2} Z Y^{1/2})^{-1/2} Y^{1/2}`, so that `W Z W = Y`.
fn nt_scaling(z: &ComplexMatrix, y: &ComplexMatrix) -> Result<ComplexMatrix> {
    let y_half = eig_hermitian(y)?.apply_fn(|l| l.max(0.0).sqrt());
    let g = hermitize(&(&(&y_half * z) * &y_half))?;
    let g_eig = eig_hermitian(&g)?;
    if g_eig.min_eigenvalue() <= 0.0 {
        return Err(Error::NegativeEigenvalue { eigenvalue: g_eig.min_eigenvalue() });
    }
    let g_inv_half = g_eig.apply_fn(|l| 1.0 / l.sqrt());
    hermitize(&(&(&y_half * &g_inv_half) * &y_half))
}

/// `M_ij = Re tr(F_i W F_j W)`, row-major `m × m`.
fn schur_complement(sparse: &[Sparse], w: &ComplexMatrix, n: usize) -> Vec<f64> {
    let m = sparse.len();
    let mut out = vec![0.0; m * m];
    for (j, fj) in sparse.iter().enumerate() {
        let mut wf = ComplexMatrix::zeros(n, n);
        for &(k, c, v) in fj {
            for r in 0..n {
                wf[(r, c)] += w[(r, k)] * v;
            }
        }
        let b = &wf * w;
        for (i, fi) in sparse.iter().enumerate().skip(j) {
            let v = trace_sparse(fi, &b);
            out[i * m + j] = v;
            out[j * m + i] = v;
        }
    }
    out
}

/// Largest `α ≤ 1` keeping `S + α/frac · D ⪰ 0`, scaled by `frac`.
fn step_length(s_eig: &EigenDecomposition, ds: &ComplexMatrix, frac: f64) -> Result<f64> {
    let inv_half = s_eig.apply_fn(|l| 1.0 / l.max(f64::MIN_POSITIVE).sqrt());
    let scaled = hermitize(&(&(&inv_half * ds) * &inv_half))?;
    let lmin = eig_hermitian(&scaled)?.min_eigenvalue();
    Ok(if lmin >= 0.0 { 1.0 } else { (frac / -lmin).min(1.0) })
}

/// Cholesky solve of a symmetric positive definite system; retries with a
/// small diagonal shift before giving up.
fn solve_spd(a: Vec<f64>, n: usize, b: &[f64]) -> Option<Vec<f64>> {
    let max_diag = (0..n).map(|i| a[i * n + i].abs()).fold(0.0, f64::max);
    for shift in [0.0, 1e-14, 1e-12] {
        let mut l = a.clone();
        for i in 0..n {
            l[i * n + i] += shift * max_diag;
        }
        if cholesky_in_place(&mut l, n) {
            let mut x = b.to_vec();
            for i in 0..n {
                let s: f64 = (0..i).map(|k| l[i * n + k] * x[k]).sum();
                x[i] = (x[i] - s) / l[i * n + i];
            }
            for i in (0..n).rev() {
                let s: f64 = ((i + 1)..n).map(|k| l[k * n + i] * x[k]).sum();
                x[i] = (x[i] - s) / l[i * n + i];
            }
            if x.iter().all(|v| v.is_finite()) {
                return Some(x);
            }
        }
    }
    None
}

/// Lower-triangular factor overwrites the lower half of `a`.
fn cholesky_in_place(a: &mut [f64], n: usize) -> bool {
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= a[j * n + k] * a[j * n + k];
        }
        if !(d > 0.0) {
            return false;
        }
        let d = d.sqrt();
        a[j * n + j] = d;
        for i in (j + 1)..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = s / d;
        }
    }
    true
}

/// `X = Σ x_i F_i + F0`; fails when the result is not a valid channel.
pub fn recover_choi(problem: &SdpProblem, x: &[f64]) -> Result<ChoiMatrix> {
    if x.len() != problem.f.len() {
        return Err(Error::DimensionMismatch(format!("{} coefficients for {} variables", x.len(), problem.f.len())));
    }
    let d = problem.d;
    let choi = ChoiMatrix::new(d, d, hermitize(&problem.lmi(x))?)?;
    let report = validate_choi(&choi);
    if !report.passed() {
        return Err(Error::InvalidChoi(format!("infeasible solution: {report}")));
    }
    Ok(choi)
}

/// Relative eigenvalue cut used by [`round_to_face`].
pub const FACE_CUT: f64 = 1e-6;

/// Drops the eigenvalues of `X` below `FACE_CUT · λ_max`, then restores
/// `tr_out X = 1` by the congruence `(T^{-1/2} ⊗ 1) X (T^{-1/2} ⊗ 1)`.
///
/// Interior iterates keep eigenvalues of order `μ` off the optimal face; they
/// barely move the objective but leak into rank-deficient outputs, where
/// quantities like concurrence react with the square root of the leak.
pub fn round_to_face(x: &ChoiMatrix) -> Result<ChoiMatrix> {
    let eig = eig_hermitian(x.matrix())?;
    let cut = FACE_CUT * eig.max_eigenvalue();
    let truncated = hermitize(&eig.apply_fn(|l| if l > cut { l } else { 0.0 }))?;
    let t = partial_trace(&truncated, x.dim_in(), x.dim_out(), Subsystem::Second)?;
    let t_eig = eig_hermitian(&hermitize(&t)?)?;
    if t_eig.min_eigenvalue() <= 0.0 {
        return Err(Error::InvalidChoi("rounded matrix lost trace preservation".into()));
    }
    let a = kron(&t_eig.apply_fn(|l| 1.0 / l.sqrt()), &ComplexMatrix::identity(x.dim_out()));
    let m = hermitize(&(&(&a * &truncated) * &a))?;
    ChoiMatrix::new(x.dim_in(), x.dim_out(), m)
}

#[derive(Debug, Clone)]
pub struct OptimalityReport {
    pub validation: ChoiValidation,
    pub claimed: f64,
    /// `tr(X R)`
    pub achieved: f64,
    /// Optimum of a fresh solve on the same `R`.
    pub optimum: f64,
    pub gap: f64,
    pub certified: bool,
}

impl std::fmt::Display for OptimalityReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} claimed={:.9} achieved={:.9} optimum={:.9} gap={:.3e} {}",
            if self.certified { "PASS" } else { "FAIL" },
            self.claimed,
            self.achieved,
            self.optimum,
            self.gap,
            self.validation
        )
    }
}

/// Certifies `X` as an optimum for `R`: it must be a valid channel, reach
/// `claimed` to `1e-9`, and no solve on `R` may exceed `claimed + 1e-6`.
pub fn check_optimality_of(x: &ChoiMatrix, r: &RMatrix, claimed: f64) -> Result<OptimalityReport> {
    let validation = validate_choi(x);
    let achieved = r.fidelity_of(x.matrix())?;
    let problem = assemble_problem(r)?;
    let sol = solve(&problem, DEFAULT_TOL)?;
    // The certified upper bound is the dual objective, i.e. primal plus gap.
    let optimum = sol.f_star + sol.gap;
    let certified = validation.passed() && (achieved - claimed).abs() <= 1e-9 && optimum <= claimed + 1e-6;
    Ok(OptimalityReport { validation, claimed, achieved, optimum, gap: sol.gap, certified })
}
