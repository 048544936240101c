mod common;

use std::f64::consts::PI;

use approx::assert_abs_diff_eq;
use cloner_lab::channel::{validate_choi, ChoiMatrix, Fixture};
use cloner_lab::ensemble::{build_R, AncillaSpec, InputEnsemble, RMatrix};
use cloner_lab::lab::{design, fixture_design, ChannelCloner};
use cloner_lab::linalg::{c64, ComplexMatrix};
use cloner_lab::metrics::{metrics_row, BlochPureState};
use cloner_lab::sdp::{assemble_problem, check_optimality_of, recover_choi, solve};
use common::*;

fn r_of(m: ComplexMatrix) -> RMatrix {
    RMatrix::new(m, 4).unwrap()
}

#[test]
fn cost_sparsity_follows_r() {
    let p = assemble_problem(&r_of(r_univ_pure())).unwrap();
    let r = r_univ_pure();
    for (fi, c) in p.constraints().iter().zip(p.c()) {
        let direct = -r.trace_product(fi).unwrap().re;
        assert_abs_diff_eq!(*c, direct, epsilon = 1e-15);
    }
    let nonzero = p.c().iter().filter(|c| c.abs() > 1e-14).count();
    assert!(nonzero > 0 && nonzero < 240);
}

#[test]
fn objective_identity_for_random_x() {
    let r = r_of(r_univ_cmix());
    let p = assemble_problem(&r).unwrap();
    let mut seed = 7u64;
    for _ in 0..20 {
        let x: Vec<f64> = (0..240)
            .map(|_| {
                seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((seed >> 11) as f64 / (1u64 << 53) as f64 - 0.5) * 0.1
            })
            .collect();
        let direct = r.fidelity_of(&p.lmi(&x)).unwrap();
        assert_abs_diff_eq!(direct, p.objective(&x) + 0.25, epsilon = 1e-13);
    }
}

#[test]
fn universal_and_equator_optima() {
    for (m, want) in [(r_univ_pure(), 2.0 / 3.0), (r_univ_cmix(), 2.0 / 3.0), (r_equator(), 0.75)] {
        let r = r_of(m);
        let sol = solve(&assemble_problem(&r).unwrap(), 1e-9).unwrap();
        assert_abs_diff_eq!(sol.f_star, want, epsilon = 1e-6);
        assert!(sol.gap <= 1e-8);
        assert_abs_diff_eq!(sol.f_star, sol.p_star + 0.25, epsilon = 1e-12);
        assert!(validate_choi(&sol.x_opt).passed());
        assert_abs_diff_eq!(r.fidelity_of(sol.x_opt.matrix()).unwrap(), sol.f_star, epsilon = 1e-8);
        let raw = recover_choi(&assemble_problem(&r).unwrap(), &sol.x).unwrap();
        assert_abs_diff_eq!(r.fidelity_of(raw.matrix()).unwrap(), want, epsilon = 1e-6);
    }
}

#[test]
fn ancilla_choice_does_not_change_universal_optimum() {
    let pure = design(&InputEnsemble::full_sphere(AncillaSpec::PureZero), 1e-9).unwrap();
    let mixed = design(&InputEnsemble::full_sphere(AncillaSpec::MaximallyMixed), 1e-9).unwrap();
    assert_abs_diff_eq!(pure.f_star, mixed.f_star, epsilon = 1e-6);
    let cloner = ChannelCloner::new(mixed.x_opt, AncillaSpec::PureZero).unwrap();
    let row = metrics_row(&cloner, &BlochPureState::new(0.4, 1.9)).unwrap();
    assert_abs_diff_eq!(row.f_c, 5.0 / 6.0, epsilon = 1e-6);
}

#[test]
fn optimality_reports() {
    let (ens, _) = fixture_design(Fixture::UnivPure);
    let r = build_R(&ens).unwrap();
    let ok = check_optimality_of(&Fixture::UnivPure.choi(), &r, 2.0 / 3.0).unwrap();
    assert!(ok.certified);
    let (ens, _) = fixture_design(Fixture::EquatorCmix);
    let ok = check_optimality_of(&Fixture::EquatorCmix.choi(), &build_R(&ens).unwrap(), 0.75).unwrap();
    assert!(ok.certified);
    let id = ChoiMatrix::identity_channel(4);
    let bad = check_optimality_of(&id, &r, 2.0 / 3.0).unwrap();
    assert!(!bad.certified);
    assert!(bad.achieved < 2.0 / 3.0);
}

#[test]
fn toy_identity_targets_match_unitary_search() {
    let cases = [
        [(0.0, 0.0), (PI / 2.0, 0.0)],
        [(0.3, 1.0), (2.0, 4.0)],
        [(PI / 2.0, PI / 2.0), (PI, 0.0)],
    ];
    for pts in cases {
        let pairs: Vec<_> = pts.iter().map(|&(t, p)| (qubit(t, p), qubit(t, p), 0.5)).collect();
        let r = toy_r(&pairs);
        let sol = solve(&assemble_problem(&r).unwrap(), 1e-9).unwrap();
        assert_abs_diff_eq!(sol.f_star, 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(sol.f_star, brute_force_unitary(&r), epsilon = 1e-4);
        assert_abs_diff_eq!(sol.f_star, brute_force_dual(&r), epsilon = 1e-4);
    }
}

#[test]
fn toy_general_targets_match_dual_search() {
    let cases = [
        [((0.0, 0.0), (PI / 2.0, 0.0), 0.5), ((PI, 0.0), (PI / 2.0, PI), 0.5)],
        [((0.4, 0.2), (1.3, 2.0), 0.3), ((2.1, 5.0), (0.1, 0.0), 0.7)],
        [((PI / 2.0, 0.0), (0.0, 0.0), 0.5), ((PI / 2.0, PI), (0.0, 0.0), 0.5)],
    ];
    for pts in cases {
        let pairs: Vec<_> = pts.iter().map(|&((t, p), (tt, tp), w)| (qubit(t, p), qubit(tt, tp), w)).collect();
        let r = toy_r(&pairs);
        let sol = solve(&assemble_problem(&r).unwrap(), 1e-9).unwrap();
        assert_abs_diff_eq!(sol.f_star, brute_force_dual(&r), epsilon = 1e-4);
        // Unitaries are channels, so they can never beat the optimum.
        assert!(brute_force_unitary(&r) <= sol.f_star + 1e-6);
    }
}

#[test]
fn toy_problem_shape() {
    let r = toy_r(&[([c64(1.0, 0.0), c64(0.0, 0.0)], [c64(1.0, 0.0), c64(0.0, 0.0)], 1.0)]);
    let p = assemble_problem(&r).unwrap();
    assert_eq!(p.num_vars(), 12);
    assert_eq!(p.f0().rows(), 4);
}
