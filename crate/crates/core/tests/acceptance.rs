//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits nonzero
//! if any criterion fails.

mod common;

use std::f64::consts::PI;
use std::process::ExitCode;

use cloner_lab::channel::{apply_channel, kraus_from_choi, validate_choi, Fixture};
use cloner_lab::ensemble::{build_R, build_r_with, AncillaSpec, InputEnsemble, QuadratureSpec};
use cloner_lab::lab::{self, certify_fixture, circle_fidelities, design, fmt5, ChannelCloner, Target};
use cloner_lab::linalg::{eig_hermitian, partial_trace, ComplexMatrix, Subsystem};
use cloner_lab::metrics::{metrics_row, BlochPureState, DensityMatrix};
use cloner_lab::sdp::{assemble_problem, solve};
use cloner_lab::ucqc::{oracle_output, ucqc_output, Ucqc};
use common::*;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn sphere_grid(n: usize) -> Vec<BlochPureState> {
    (0..n)
        .flat_map(|i| (0..n).map(move |j| BlochPureState::new(PI * i as f64 / (n - 1) as f64, 2.0 * PI * j as f64 / n as f64)))
        .collect()
}

fn spreads(rows: &[[f64; 5]]) -> [f64; 5] {
    let mut out = [0.0; 5];
    for (k, s) in out.iter_mut().enumerate() {
        let (lo, hi) = rows.iter().fold((f64::MAX, f64::MIN), |(lo, hi), r| (lo.min(r[k]), hi.max(r[k])));
        *s = hi - lo;
    }
    out
}

fn max_of(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, f64::max)
}

fn table1_reproduction() -> Outcome {
    let rows = lab::table1(1e-9).map_err(|e| e.to_string())?;
    if rows.len() != 9 {
        return Err(format!("{} rows", rows.len()));
    }
    let worst = max_of(rows.iter().zip(TABLE1_GOLDEN.iter()).map(|(r, g)| golden_diff(&r.metrics, g)));
    let printed = rows.iter().zip(TABLE1_GOLDEN.iter()).all(|(r, g)| {
        r.metrics.as_array().iter().zip(g).all(|(v, want)| fmt5(*v) == format!("{want:.5}"))
    });
    check(worst <= 5e-6 && printed, format!("max |diff| = {worst:.2e}, printed digits match: {printed}"))
}

fn sdp_optima() -> Outcome {
    let mut details = Vec::new();
    let mut ok = true;
    for (target, want) in [(Target::Universal, 2.0 / 3.0), (Target::Equator, 0.75)] {
        for anc in [AncillaSpec::PureZero, AncillaSpec::MaximallyMixed] {
            let sol = design(&target.ensemble(anc.clone()), 1e-9).map_err(|e| e.to_string())?;
            ok &= (sol.f_star - want).abs() <= 1e-6 && sol.gap <= 1e-8;
            details.push(format!("{:.9}/{:.1e}", sol.f_star, sol.gap));
        }
    }
    check(ok, format!("F*/gap = {}", details.join(", ")))
}

fn r_exactness() -> Outcome {
    let cases = [
        (InputEnsemble::full_sphere(AncillaSpec::PureZero), r_univ_pure()),
        (InputEnsemble::full_sphere(AncillaSpec::MaximallyMixed), r_univ_cmix()),
        (InputEnsemble::main_circle(0.0, AncillaSpec::PureZero), r_equator()),
    ];
    let mut worst = 0.0f64;
    for (ens, want) in cases {
        worst = worst.max(build_R(&ens).map_err(|e| e.to_string())?.matrix().max_abs_diff(&want));
    }
    check(worst <= 1e-12, format!("max entry error {worst:.2e}"))
}

fn spectrum_matches(x: &ComplexMatrix, want: &[(f64, usize)]) -> bool {
    let eig = eig_hermitian(x).unwrap();
    let mut expected: Vec<f64> = want.iter().flat_map(|&(v, n)| std::iter::repeat_n(v, n)).collect();
    expected.resize(16, 0.0);
    expected.sort_by(f64::total_cmp);
    eig.eigenvalues.iter().zip(&expected).all(|(a, b)| (a - b).abs() <= 1e-10)
}

fn appendix_certification() -> Outcome {
    let mut ok = true;
    let mut details = Vec::new();
    for f in Fixture::ALL {
        let report = certify_fixture(f).map_err(|e| e.to_string())?;
        let (spectrum, rank): (&[(f64, usize)], usize) = match f {
            Fixture::UnivPure | Fixture::EquatorPure => (&[(1.0, 2), (0.25, 8)], 10),
            Fixture::UnivCmix | Fixture::EquatorCmix => (&[(1.0, 4)], 4),
        };
        let v = validate_choi(&f.choi());
        let good = report.certified && v.passed() && v.rank == rank && spectrum_matches(f.choi().matrix(), spectrum);
        ok &= good;
        details.push(format!("{f}:{}", if good { "ok" } else { "bad" }));
    }
    check(ok, details.join(" "))
}

fn ucqc_benchmark() -> Outcome {
    let want = [5.0 / 6.0, 2.0 / 3.0, 1.0 / 3.0, 0.65002, 0.91830];
    let mut rows = Vec::new();
    let mut oracle_err = 0.0f64;
    for p in sphere_grid(20) {
        let joint = ucqc_output(&p).map_err(|e| e.to_string())?;
        oracle_err = oracle_err.max(joint.matrix().distance(oracle_output(&p).matrix()));
        rows.push(metrics_row(&Ucqc, &p).map_err(|e| e.to_string())?.as_array());
    }
    let spread = max_of(spreads(&rows));
    let value_err = max_of(rows[0].iter().zip(want).map(|(a, b)| (a - b).abs()));
    check(
        oracle_err <= 1e-10 && spread <= 1e-10 && value_err <= 5e-6,
        format!("oracle {oracle_err:.1e}, spread {spread:.1e}, value {value_err:.1e}"),
    )
}

fn target_inputs(target: Target) -> Vec<BlochPureState> {
    match target {
        Target::Universal => sphere_grid(20),
        Target::Equator => (0..100).map(|j| BlochPureState::new(PI / 2.0, 2.0 * PI * j as f64 / 100.0)).collect(),
    }
}

fn state_independence() -> Outcome {
    let mut worst = 0.0f64;
    for target in [Target::Universal, Target::Equator] {
        for anc in [AncillaSpec::PureZero, AncillaSpec::MaximallyMixed] {
            let sol = design(&target.ensemble(anc.clone()), 1e-9).map_err(|e| e.to_string())?;
            let cloner = ChannelCloner::new(sol.x_opt, anc).map_err(|e| e.to_string())?;
            let rows: Vec<[f64; 5]> =
                target_inputs(target).iter().map(|p| metrics_row(&cloner, p).unwrap().as_array()).collect();
            worst = worst.max(max_of(spreads(&rows)));
        }
    }
    check(worst <= 1e-6, format!("max spread {worst:.2e}"))
}

fn meridian_sweep() -> Outcome {
    let mut details = Vec::new();
    let mut ok = true;
    for anc in [AncillaSpec::PureZero, AncillaSpec::MaximallyMixed] {
        let sol = design(&Target::Equator.ensemble(anc.clone()), 1e-9).map_err(|e| e.to_string())?;
        let cloner = ChannelCloner::new(sol.x_opt, anc).map_err(|e| e.to_string())?;
        let pts = lab::sweep_meridian(&cloner, 181).map_err(|e| e.to_string())?;
        let mid = pts[90].metrics.f_c;
        let max_fc = pts.iter().map(|p| p.metrics.f_c).fold(f64::MIN, f64::max);
        let h_diff = max_of(pts.iter().map(|p| (p.metrics.h_clone - p.metrics.h_out).abs()));
        let pole = max_of([&pts[0], &pts[180]].iter().map(|p| (p.metrics.h_out - 0.91830).abs()));
        ok &= (mid - 5.0 / 6.0).abs() <= 1e-4 && max_fc <= 5.0 / 6.0 + 1e-6 && h_diff <= 1e-8 && pole <= 1e-4;
        details.push(format!("F_C(π/2)={mid:.6} max={max_fc:.6} |ΔH|={h_diff:.1e} pole={pole:.1e}"));
    }
    check(ok, details.join("; "))
}

fn rotated_equator() -> Outcome {
    let mut ok = true;
    let mut details = Vec::new();
    for alpha in [0.0, PI / 8.0, PI / 4.0, PI / 2.0] {
        let anc = AncillaSpec::PureZero;
        let sol = design(&InputEnsemble::main_circle(alpha, anc.clone()), 1e-9).map_err(|e| e.to_string())?;
        let cloner = ChannelCloner::new(sol.x_opt, anc).map_err(|e| e.to_string())?;
        let fc = circle_fidelities(&cloner, alpha, 64).map_err(|e| e.to_string())?;
        let fc_err = max_of(fc.iter().map(|v| (v - 5.0 / 6.0).abs()));
        ok &= (sol.f_star - 0.75).abs() <= 1e-5 && fc_err <= 1e-4;
        details.push(format!("{alpha:.3}:{:.8}", sol.f_star));
    }
    check(ok, details.join(" "))
}

struct Lcg(u64);

impl Lcg {
    fn next(&mut self) -> f64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (self.0 >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
    }

    fn state(&mut self, n: usize) -> DensityMatrix {
        let mut a = ComplexMatrix::zeros(n, n);
        for e in a.entries_mut() {
            *e = cloner_lab::linalg::c64(self.next(), self.next());
        }
        let m = &a * &a.adjoint();
        let t = m.trace().re;
        DensityMatrix::new(cloner_lab::linalg::hermitize(&m.scale(1.0 / t)).unwrap()).unwrap()
    }
}

fn property_suites() -> Outcome {
    let mut parts = Vec::new();

    let mut quad = 0.0f64;
    for ens in [
        InputEnsemble::full_sphere(AncillaSpec::PureZero),
        InputEnsemble::full_sphere(AncillaSpec::MaximallyMixed),
        InputEnsemble::main_circle(0.0, AncillaSpec::PureZero),
        InputEnsemble::main_circle(PI / 4.0, AncillaSpec::MaximallyMixed),
    ] {
        let a = build_r_with(&ens, QuadratureSpec::default()).unwrap();
        let b = build_r_with(&ens, QuadratureSpec::default().doubled()).unwrap();
        quad = quad.max(a.matrix().max_abs_diff(b.matrix()));
    }
    parts.push((quad <= 1e-13, format!("quadrature {quad:.1e}")));

    let problem = assemble_problem(&build_R(&InputEnsemble::full_sphere(AncillaSpec::PureZero)).unwrap()).unwrap();
    let mut rng = Lcg(2024);
    let mut tp = 0.0f64;
    for _ in 0..100 {
        let x: Vec<f64> = (0..problem.num_vars()).map(|_| rng.next()).collect();
        let t = partial_trace(&problem.lmi(&x), 4, 4, Subsystem::Second).unwrap();
        tp = tp.max(t.distance(&ComplexMatrix::identity(4)));
    }
    parts.push((tp <= 1e-12, format!("structural TP {tp:.1e}")));

    let mut kraus = 0.0f64;
    let designed = design(&InputEnsemble::main_circle(PI / 8.0, AncillaSpec::PureZero), 1e-9).unwrap().x_opt;
    for choi in Fixture::ALL.iter().map(|f| f.choi()).chain([designed]) {
        let ops = kraus_from_choi(&choi).unwrap();
        for _ in 0..20 {
            let rho = rng.state(4);
            let direct = apply_channel(&choi, &rho).unwrap();
            kraus = kraus.max(ops.apply(rho.matrix()).max_abs_diff(direct.matrix()));
        }
    }
    parts.push((kraus <= 1e-8, format!("Kraus {kraus:.1e}")));

    let mut toy = 0.0f64;
    let toy_cases = [
        [((0.0, 0.0), (0.0, 0.0)), ((PI / 2.0, 0.0), (PI / 2.0, 0.0))],
        [((0.3, 1.0), (0.3, 1.0)), ((2.0, 4.0), (2.0, 4.0))],
        [((0.0, 0.0), (PI / 2.0, 0.0)), ((PI, 0.0), (PI / 2.0, PI))],
        [((0.4, 0.2), (1.3, 2.0)), ((2.1, 5.0), (0.1, 0.0))],
    ];
    for pts in toy_cases {
        let pairs: Vec<_> = pts.iter().map(|&((t, p), (tt, tp))| (qubit(t, p), qubit(tt, tp), 0.5)).collect();
        let r = toy_r(&pairs);
        let sol = solve(&assemble_problem(&r).unwrap(), 1e-9).unwrap();
        toy = toy.max((sol.f_star - brute_force_dual(&r)).abs());
    }
    parts.push((toy <= 1e-4, format!("toy d=2 {toy:.1e}")));

    let ok = parts.iter().all(|p| p.0);
    check(ok, parts.into_iter().map(|p| p.1).collect::<Vec<_>>().join(", "))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("table 1 reproduction", table1_reproduction),
        ("SDP optima", sdp_optima),
        ("R-matrix exactness", r_exactness),
        ("fixture certification", appendix_certification),
        ("UCQC benchmark", ucqc_benchmark),
        ("state independence", state_independence),
        ("meridian sweep", meridian_sweep),
        ("rotated equator", rotated_equator),
        ("property suites", property_suites),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail})", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({detail})", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
