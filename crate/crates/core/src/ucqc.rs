//! Four-CNOT universal covariant cloning circuit in its symmetric mode.
//!
//! Port 1 carries the input, ports 2 and 3 the program state. Amplitudes are
//! indexed big-endian, `|q1 q2 q3>` at `4 q1 + 2 q2 + q3`. Port 3 is discarded.

use std::fmt;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{c64, kron_vec, partial_trace, vec_norm, ComplexMatrix, Subsystem, ZERO};
use crate::metrics::{fidelity_pure, BlochPureState, CloneSource, DensityMatrix};

const NORM_TOL: f64 = 1e-12;
const CERTIFY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct ThreeQubitState {
    vector: [Complex64; 8],
}

impl ThreeQubitState {
    pub fn new(vector: [Complex64; 8]) -> Result<Self> {
        let norm = vec_norm(&vector);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Unnormalized { norm });
        }
        Ok(Self { vector })
    }

    /// Computational basis state `|q1 q2 q3>`.
    pub fn basis(q1: u8, q2: u8, q3: u8) -> Self {
        let mut vector = [ZERO; 8];
        vector[((q1 & 1) << 2 | (q2 & 1) << 1 | (q3 & 1)) as usize] = c64(1.0, 0.0);
        Self { vector }
    }

    /// `|ψ> ⊗ |prog>`
    pub fn with_program(psi: &[Complex64; 2], program: &[Complex64; 4]) -> Result<Self> {
        let v = kron_vec(psi, program);
        let mut vector = [ZERO; 8];
        vector.copy_from_slice(&v);
        Self::new(vector)
    }

    pub fn vector(&self) -> &[Complex64; 8] {
        &self.vector
    }

    /// Joint state of ports 1 and 2.
    pub fn clones(&self) -> DensityMatrix {
        let full = ComplexMatrix::projector(&self.vector);
        let reduced = partial_trace(&full, 4, 2, Subsystem::Second).expect("8 = 4 x 2");
        DensityMatrix::from_trusted(reduced)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CnotGate {
    control: u8,
    target: u8,
}

impl CnotGate {
    /// Ports are numbered 1 to 3.
    pub fn new(control: u8, target: u8) -> Result<Self> {
        let valid = |p: u8| (1..=3).contains(&p);
        if !valid(control) || !valid(target) || control == target {
            return Err(Error::DimensionMismatch(format!("invalid CNOT {control}->{target}")));
        }
        Ok(Self { control, target })
    }

    pub fn control(&self) -> u8 {
        self.control
    }

    pub fn target(&self) -> u8 {
        self.target
    }

    fn mask(port: u8) -> usize {
        1 << (3 - port)
    }
}

impl fmt::Display for CnotGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CNOT({}->{})", self.control, self.target)
    }
}

pub fn apply_cnot(state: &ThreeQubitState, gate: CnotGate) -> ThreeQubitState {
    let (c, t) = (CnotGate::mask(gate.control), CnotGate::mask(gate.target));
    let mut vector = [ZERO; 8];
    for (k, amp) in state.vector.iter().enumerate() {
        let dst = if k & c != 0 { k ^ t } else { k };
        vector[dst] = *amp;
    }
    ThreeQubitState { vector }
}

/// `(2|00> + |01> + |11>)/√6`
pub fn program_state() -> [Complex64; 4] {
    let s = 1.0 / 6f64.sqrt();
    [c64(2.0 * s, 0.0), c64(s, 0.0), ZERO, c64(s, 0.0)]
}

fn gates(pairs: [(u8, u8); 4]) -> [CnotGate; 4] {
    pairs.map(|(c, t)| CnotGate { control: c, target: t })
}

pub fn primary_sequence() -> [CnotGate; 4] {
    gates([(1, 2), (1, 3), (2, 1), (3, 1)])
}

pub fn reversed_sequence() -> [CnotGate; 4] {
    let mut g = primary_sequence();
    g.reverse();
    g
}

pub fn run_sequence(input: &BlochPureState, sequence: &[CnotGate]) -> Result<DensityMatrix> {
    let mut state = ThreeQubitState::with_program(&input.vector(), &program_state())?;
    for gate in sequence {
        state = apply_cnot(&state, *gate);
    }
    Ok(state.clones())
}

/// Whether a sequence gives `F_C = 5/6` and `F_P = 2/3` on a set of probe inputs.
pub fn certifies(sequence: &[CnotGate]) -> bool {
    let probes = [(0.0, 0.0), (std::f64::consts::PI, 0.0), (1.1, 0.4), (2.3, 4.0), (0.7, 2.9)];
    probes.iter().all(|&(theta, phi)| {
        let input = BlochPureState::new(theta, phi);
        let psi = input.vector();
        let Ok(joint) = run_sequence(&input, sequence) else { return false };
        let Ok(clone) = joint.reduce_two_qubit(Subsystem::First) else { return false };
        let f_c = fidelity_pure(&psi, &clone).unwrap_or(f64::NAN);
        let f_p = fidelity_pure(&kron_vec(&psi, &psi), &joint).unwrap_or(f64::NAN);
        (f_c - 5.0 / 6.0).abs() <= CERTIFY_TOL && (f_p - 2.0 / 3.0).abs() <= CERTIFY_TOL
    })
}

/// The gate order that reproduces the benchmark values. Panics if neither
/// candidate does, since every UCQC result would then be meaningless.
pub fn selected_sequence() -> [CnotGate; 4] {
    static SELECTED: OnceLock<[CnotGate; 4]> = OnceLock::new();
    *SELECTED.get_or_init(|| {
        [primary_sequence(), reversed_sequence()]
            .into_iter()
            .find(|s| certifies(s))
            .expect("no CNOT ordering reproduces F_C = 5/6, F_P = 2/3")
    })
}

pub fn ucqc_output(input: &BlochPureState) -> Result<DensityMatrix> {
    run_sequence(input, &selected_sequence())
}

/// `(2/3)|ψψ><ψψ| + (1/6)(|ψψ⊥> + |ψ⊥ψ>)(<ψψ⊥| + <ψ⊥ψ|)`
pub fn oracle_output(input: &BlochPureState) -> DensityMatrix {
    let psi = input.vector();
    let perp = input.orthogonal();
    let same = kron_vec(&psi, &psi);
    let a = kron_vec(&psi, &perp);
    let b = kron_vec(&perp, &psi);
    let sym: Vec<Complex64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
    let m = &ComplexMatrix::projector(&same).scale(2.0 / 3.0) + &ComplexMatrix::projector(&sym).scale(1.0 / 6.0);
    DensityMatrix::from_trusted(m)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Ucqc;

impl CloneSource for Ucqc {
    fn joint_output(&self, input: &BlochPureState) -> Result<DensityMatrix> {
        ucqc_output(input)
    }
}
