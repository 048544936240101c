#![allow(dead_code)]

use cloner_lab::ensemble::RMatrix;
use cloner_lab::linalg::{c64, eig_hermitian, kron, transpose_plain, ComplexMatrix};
use cloner_lab::metrics::MetricsRow;
use num_complex::Complex64;

pub const TABLE1_GOLDEN: [[f64; 5]; 9] = [
    [0.83333, 0.66667, 0.33333, 0.65002, 0.91830],
    [0.83333, 0.66667, 0.33333, 0.65002, 0.91830],
    [0.83333, 0.66667, 0.33333, 0.65002, 0.91830],
    [0.66667, 0.45833, 0.00000, 0.91830, 1.78434],
    [0.83333, 0.66667, 0.33333, 0.65002, 0.91830],
    [0.83333, 0.75000, 0.33333, 0.65002, 0.65002],
    [0.83333, 0.75000, 0.33333, 0.65002, 0.65002],
    [0.66667, 0.50000, 0.00000, 0.91830, 1.70058],
    [0.83333, 0.75000, 0.33333, 0.65002, 0.65002],
];

pub fn golden_diff(row: &MetricsRow, golden: &[f64; 5]) -> f64 {
    row.as_array().iter().zip(golden).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

/// Nonzero entries of the universal, pure-ancilla matrix, scaled by 12.
const UNIV_PURE: &[(usize, usize, i32)] = &[
    (0, 0, 3), (0, 9, 1), (0, 10, 1),
    (1, 1, 1), (1, 2, 1), (1, 11, 1),
    (2, 1, 1), (2, 2, 1), (2, 11, 1),
    (3, 3, 1),
    (8, 8, 1),
    (9, 0, 1), (9, 9, 1), (9, 10, 1),
    (10, 0, 1), (10, 9, 1), (10, 10, 1),
    (11, 1, 1), (11, 2, 1), (11, 11, 3),
];

/// Additional block of the mixed-ancilla matrix (scale 24), shifted by 4.
const SHIFTED_BLOCK: &[(usize, usize, i32)] = &[
    (4, 4, 3), (4, 13, 1), (4, 14, 1),
    (5, 5, 1), (5, 6, 1), (5, 15, 1),
    (6, 5, 1), (6, 6, 1), (6, 15, 1),
    (7, 7, 1),
    (12, 12, 1),
    (13, 4, 1), (13, 13, 1), (13, 14, 1),
    (14, 4, 1), (14, 13, 1), (14, 14, 1),
    (15, 5, 1), (15, 6, 1), (15, 15, 3),
];

fn integer_matrix(entries: &[(usize, usize, i32)], scale: f64) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(16, 16);
    for &(r, c, v) in entries {
        m[(r, c)] = c64(v as f64 / scale, 0.0);
    }
    m
}

pub fn r_univ_pure() -> ComplexMatrix {
    integer_matrix(UNIV_PURE, 12.0)
}

pub fn r_univ_cmix() -> ComplexMatrix {
    let all: Vec<_> = UNIV_PURE.iter().chain(SHIFTED_BLOCK).copied().collect();
    integer_matrix(&all, 24.0)
}

pub fn r_equator() -> ComplexMatrix {
    let flat: Vec<_> = UNIV_PURE.iter().map(|&(r, c, v)| (r, c, if v == 3 { 1 } else { v })).collect();
    integer_matrix(&flat, 8.0)
}

fn paulis() -> [ComplexMatrix; 3] {
    let o = c64(0.0, 0.0);
    let l = c64(1.0, 0.0);
    let i = c64(0.0, 1.0);
    [
        ComplexMatrix::new(2, 2, vec![o, l, l, o]).unwrap(),
        ComplexMatrix::new(2, 2, vec![o, -i, i, o]).unwrap(),
        ComplexMatrix::new(2, 2, vec![l, o, o, -l]).unwrap(),
    ]
}

/// `Σ w (|ψ><ψ|)^T ⊗ |φ><φ|` for qubit input/target pairs.
pub fn toy_r(pairs: &[([Complex64; 2], [Complex64; 2], f64)]) -> RMatrix {
    let mut m = ComplexMatrix::zeros(4, 4);
    for (psi, target, w) in pairs {
        let term = kron(&transpose_plain(&ComplexMatrix::projector(psi)), &ComplexMatrix::projector(target));
        m = &m + &term.scale(*w);
    }
    RMatrix::new(m, 2).unwrap()
}

/// Minimizes a function of three reals by a coarse grid followed by a
/// shrinking compass search.
fn minimize3(f: impl Fn([f64; 3]) -> f64, half_width: f64, steps: usize) -> f64 {
    let mut best = ([0.0; 3], f64::INFINITY);
    let h = 2.0 * half_width / steps as f64;
    for i in 0..=steps {
        for j in 0..=steps {
            for k in 0..=steps {
                let p = [-half_width + i as f64 * h, -half_width + j as f64 * h, -half_width + k as f64 * h];
                let v = f(p);
                if v < best.1 {
                    best = (p, v);
                }
            }
        }
    }
    let mut step = h;
    while step > 1e-10 {
        let mut improved = false;
        for axis in 0..3 {
            for sign in [-1.0, 1.0] {
                let mut p = best.0;
                p[axis] += sign * step;
                let v = f(p);
                if v < best.1 {
                    best = (p, v);
                    improved = true;
                }
            }
        }
        if !improved {
            step /= 2.0;
        }
    }
    best.1
}

/// Channel optimum by brute force on the dual: `min_m 2 λ_max(R − (m·σ) ⊗ 1)`.
pub fn brute_force_dual(r: &RMatrix) -> f64 {
    let p = paulis();
    let id = ComplexMatrix::identity(2);
    minimize3(
        |m| {
            let ms = &(&p[0].scale(m[0]) + &p[1].scale(m[1])) + &p[2].scale(m[2]);
            let shifted = r.matrix() - &kron(&ms, &id);
            2.0 * eig_hermitian(&shifted).unwrap().max_eigenvalue()
        },
        1.0,
        20,
    )
}

fn unitary(a: f64, b: f64, c: f64) -> ComplexMatrix {
    let rz = |t: f64| {
        let (o, h) = (c64(0.0, 0.0), t / 2.0);
        ComplexMatrix::new(2, 2, vec![Complex64::from_polar(1.0, -h), o, o, Complex64::from_polar(1.0, h)]).unwrap()
    };
    let (s, co) = (b / 2.0).sin_cos();
    let ry = ComplexMatrix::new(2, 2, vec![c64(co, 0.0), c64(-s, 0.0), c64(s, 0.0), c64(co, 0.0)]).unwrap();
    &(&rz(a) * &ry) * &rz(c)
}

/// Choi matrix `X_{(i,a),(j,b)} = U_{ai} conj(U_{bj})` of `ρ ↦ UρU†`.
pub fn unitary_choi(u: &ComplexMatrix) -> ComplexMatrix {
    let mut x = ComplexMatrix::zeros(4, 4);
    for i in 0..2 {
        for a in 0..2 {
            for j in 0..2 {
                for b in 0..2 {
                    x[(i * 2 + a, j * 2 + b)] = u[(a, i)] * u[(b, j)].conj();
                }
            }
        }
    }
    x
}

/// Best fidelity over unitary channels, searched over three Euler angles.
pub fn brute_force_unitary(r: &RMatrix) -> f64 {
    -minimize3(
        |e| -r.fidelity_of(&unitary_choi(&unitary(e[0], e[1], e[2]))).unwrap(),
        std::f64::consts::PI,
        24,
    )
}

pub fn qubit(theta: f64, phi: f64) -> [Complex64; 2] {
    cloner_lab::metrics::BlochPureState::new(theta, phi).vector()
}
