//! Acceptance checks. Prints one line per criterion and exits non-zero if any
//! gated criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tfem_core::elements::published::printed;
use tfem_core::elements::validate::{default_validation_grid, CheckKind};
use tfem_core::elements::{derive_matrices_exact, semiconv_basis_matrix, Coefficients, PolyBasis};
use tfem_core::linalg::Mat;
use tfem_core::oracle::{convergence_order, dispersion_exponent, exact_solution, series_error_norms};
use tfem_core::scalar::{rat, Rational};
use tfem_core::spectral::{
    amplification_matrix, check_time_reversibility, closed_form_eigenvalues, eigen_gap, eigenvalues,
    period_elongation, spectral_radius,
};
use tfem_core::{simulate, AlgorithmId, ForcingSpec, InitialConditions, OscillatorParams, Trajectory};

const SAMPLES: usize = 120;

struct Outcome {
    pass: bool,
    gated: bool,
    detail: String,
}

fn check(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass: ok, gated: true, detail: detail.into() }
}

fn report(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass: ok, gated: false, detail: detail.into() }
}

fn random_rational(rng: &mut ChaCha8Rng, zero_ok: bool) -> Rational {
    let lo = if zero_ok { 0 } else { 1 };
    rat(rng.gen_range(lo..=60), rng.gen_range(1..=40))
}

fn random_coefficients(rng: &mut ChaCha8Rng) -> Coefficients<Rational> {
    Coefficients {
        m: random_rational(rng, false),
        c: random_rational(rng, true),
        a: random_rational(rng, false),
        h: random_rational(rng, false),
    }
}

fn forced_case() -> OscillatorParams {
    OscillatorParams::new(1.0, 0.2 * PI, 1.0 / (4.0 * PI * PI)).unwrap()
}

fn forced_case_forcing() -> ForcingSpec {
    ForcingSpec::Sinusoid { f0: 100.0, omega0: 10.0 }
}

fn run_forced(alg: AlgorithmId, h: f64) -> Trajectory {
    let n = (10.0 / h).round() as usize;
    simulate(alg, &forced_case(), &forced_case_forcing(), &InitialConditions::default(), h, n).unwrap()
}

fn forced_rel_error(traj: &Trajectory) -> f64 {
    let params = forced_case();
    let reference: Vec<f64> = traj
        .t
        .iter()
        .map(|&t| {
            exact_solution(&params, &forced_case_forcing(), &InitialConditions::default(), t)
                .unwrap()
                .unwrap()
                .u
        })
        .collect();
    series_error_norms(&traj.u, &reference).max_rel
}

fn c1_matrix_fidelity() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let mut mismatches = 0;
    for _ in 0..SAMPLES {
        let k = random_coefficients(&mut rng);
        for alg in [AlgorithmId::EhpJquad, AlgorithmId::McapJquad] {
            let derived = derive_matrices_exact(alg, &k).unwrap().system;
            if printed(alg, &k).unwrap() != derived {
                mismatches += 1;
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let report = tfem_core::elements::validate_printed_matrices(&default_validation_grid());
    let itemized = |alg: AlgorithmId| {
        report
            .rows
            .iter()
            .filter(|r| r.algorithm == alg.name() && r.kind == CheckKind::Finding && r.status.label() == "MISMATCH")
            .count()
    };
    let counts: Vec<String> = [
        AlgorithmId::EhpUquad,
        AlgorithmId::EhpUJquad,
        AlgorithmId::McapUquad,
        AlgorithmId::McapUJquad,
    ]
    .iter()
    .map(|&a| format!("{}={}", a.name(), itemized(a)))
    .collect();
    check(
        mismatches == 0 && elapsed < 10.0 && report.is_consistent(),
        format!(
            "{SAMPLES} rational samples, {mismatches} mismatches, {elapsed:.2}s; itemized published discrepancies: {}; report consistent: {}",
            counts.join(" "),
            report.is_consistent()
        ),
    )
}

fn c2_semiconvolution() -> Outcome {
    let h = rat(13, 7);
    let b = PolyBasis::new(&h);
    let m = semiconv_basis_matrix(&b.quadratic, &b.linear, &h);
    let expected = Mat::from_rows(vec![
        vec![rat(-1, 6), rat(1, 6)],
        vec![rat(5, 6), rat(1, 6)],
        vec![rat(-2, 3), rat(2, 3)],
    ]);
    check(m == expected && m[(0, 0)] == rat(-1, 6), format!("table at h=13/7: {:?}", flat(&m)))
}

fn flat(m: &Mat<Rational>) -> Vec<String> {
    (0..m.rows()).flat_map(|i| (0..m.cols()).map(move |j| (i, j))).map(|(i, j)| m[(i, j)].to_string()).collect()
}

fn c3_eigen_closed_forms() -> Outcome {
    let params = OscillatorParams::unit_period();
    let mut worst_gap = 0.0f64;
    let mut worst_unit = 0.0f64;
    let mut worst_modulus = 0.0f64;
    for &x in &[0.05, 0.1, 0.25, 0.5] {
        for alg in AlgorithmId::TFEM {
            let h = x * params.natural_period();
            let eigs = eigenvalues(&amplification_matrix(alg, &params, h, false).unwrap());
            let cf = closed_form_eigenvalues(alg, params.m(), params.a(), h).unwrap();
            worst_gap = worst_gap.max(eigen_gap(&eigs, &cf.values));
            if alg.dim() == 3 {
                let one = eigs.iter().map(|z| (z - Complex64::new(1.0, 0.0)).norm()).fold(f64::INFINITY, f64::min);
                worst_unit = worst_unit.max(one);
            }
            worst_modulus = worst_modulus.max(eigs.iter().map(|z| (z.norm() - 1.0).abs()).fold(0.0, f64::max));
        }
    }
    check(
        worst_gap < 1e-10 && worst_unit < 1e-12 && worst_modulus < 1e-12,
        format!("max rel gap {worst_gap:.2e}, |λ1−1| {worst_unit:.2e}, max ||λ|−1| {worst_modulus:.2e}"),
    )
}

fn c4_unit_modulus_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0004);
    let (mut n_q, mut n_uj, mut bad) = (0, 0, 0);
    while n_q < SAMPLES || n_uj < SAMPLES {
        let m = random_rational(&mut rng, false);
        let a = random_rational(&mut rng, false);
        let h = random_rational(&mut rng, false);
        let ma = &m * &a;
        let h2 = &h * &h;
        let h4 = &h2 * &h2;
        let r = |n: i64| rat(n, 1);
        if h2 <= r(12) * &ma && n_q < SAMPLES {
            n_q += 1;
            let lhs = (r(6) * &ma - r(2) * &h2).pow(2) + (r(36) * &h2 * &ma - r(3) * &h4);
            if lhs != (r(6) * &ma + &h2).pow(2) {
                bad += 1;
            }
        }
        if n_uj < SAMPLES {
            n_uj += 1;
            let re = &h4 - r(60) * &ma * &h2 + r(144) * &ma * &ma;
            // im² = 144·h²·(12·am − h²)²·am
            let im2 = r(144) * &h2 * (r(12) * &ma - &h2).pow(2) * &ma;
            let den = &h4 + r(12) * &ma * &h2 + r(144) * &ma * &ma;
            if re.pow(2) + im2 != den.pow(2) {
                bad += 1;
            }
        }
    }
    check(bad == 0, format!("{n_q} J/U-quadratic and {n_uj} UJ-quadratic samples, {bad} failures"))
}

fn c5_stability_contrast() -> Outcome {
    let params = OscillatorParams::unit_period();
    let rho = |alg: AlgorithmId, x: f64| {
        spectral_radius(&eigenvalues(&amplification_matrix(alg, &params, x * params.natural_period(), false).unwrap()))
    };
    let newmark = rho(AlgorithmId::NewmarkLinear, 0.6);
    let mut uj_dev = 0.0f64;
    let grid: Vec<f64> = (0..=40).map(|i| 10f64.powf(-2.0 + 3.0 * i as f64 / 40.0)).collect();
    for &x in &grid {
        for alg in [AlgorithmId::McapUJquad, AlgorithmId::EhpUJquad] {
            uj_dev = uj_dev.max((rho(alg, x) - 1.0).abs());
        }
    }
    let mut measured = Vec::new();
    for alg in [AlgorithmId::EhpJquad, AlgorithmId::EhpUquad, AlgorithmId::McapJquad, AlgorithmId::McapUquad] {
        for x in [0.6, 1.0, 2.0] {
            measured.push(format!("{}@{x}={:.6}", alg.name(), rho(alg, x)));
        }
    }
    check(
        newmark > 1.0 && uj_dev < 1e-12,
        format!(
            "ρ(NewmarkLinear, 0.6)={newmark:.6}; max |ρ−1| UJquad on [0.01,10]={uj_dev:.2e}; ungated: {}",
            measured.join(" ")
        ),
    )
}

fn c6_dispersion() -> Outcome {
    let start = Instant::now();
    let grid: Vec<f64> = (0..=28).map(|i| 0.02 + 0.01 * i as f64).collect();
    let mut spread = 0.0f64;
    let mut uj_smaller = true;
    let mut caa_largest = true;
    for &x in &grid {
        let pe = |alg| period_elongation(alg, x).unwrap().pe;
        let linear = pe(AlgorithmId::NewmarkLinear);
        for alg in [AlgorithmId::EhpJquad, AlgorithmId::EhpUquad, AlgorithmId::McapJquad, AlgorithmId::McapUquad] {
            spread = spread.max((pe(alg) - linear).abs());
        }
        let caa = pe(AlgorithmId::NewmarkCAA);
        for alg in [AlgorithmId::EhpUJquad, AlgorithmId::McapUJquad] {
            uj_smaller &= pe(alg) < linear;
        }
        for alg in AlgorithmId::TFEM {
            caa_largest &= caa > pe(alg);
        }
        caa_largest &= caa > linear;
    }
    let elapsed = start.elapsed().as_secs_f64();
    check(
        spread <= 1e-9 && uj_smaller && caa_largest && elapsed < 5.0,
        format!(
            "max |pe − pe(NewmarkLinear)| for J/U-quadratic {spread:.2e}; UJ smaller: {uj_smaller}; CAA largest: {caa_largest}; {elapsed:.2}s"
        ),
    )
}

fn c7_reversibility() -> Outcome {
    let params = OscillatorParams::unit_period();
    let mut worst_rev = 0.0f64;
    let mut worst_det = 0.0f64;
    for i in 1..=25 {
        let x = 0.02 * i as f64;
        let h = x * params.natural_period();
        for alg in AlgorithmId::TFEM {
            worst_rev = worst_rev.max(check_time_reversibility(alg, &params, h).unwrap());
            let det = amplification_matrix(alg, &params, h, false).unwrap().determinant();
            worst_det = worst_det.max((det - 1.0).abs());
        }
    }
    check(
        worst_rev <= 1e-10 && worst_det <= 1e-12,
        format!("max ‖A(h)A(−h)−I‖∞ {worst_rev:.2e}, max |det A − 1| {worst_det:.2e} over h/Tn ∈ (0, 0.5]"),
    )
}

fn c8_forced_accuracy() -> Outcome {
    let start = Instant::now();
    let mut ok = true;
    let mut lines = Vec::new();
    for alg in AlgorithmId::TFEM {
        let errs: Vec<f64> = [0.1, 0.05, 0.01].iter().map(|&h| forced_rel_error(&run_forced(alg, h))).collect();
        ok &= errs[2] < 0.01 && errs[0] > errs[1] && errs[1] > errs[2];
        lines.push(format!("{}=[{:.2e},{:.2e},{:.2e}]", alg.name(), errs[0], errs[1], errs[2]));
    }
    let elapsed = start.elapsed().as_secs_f64();
    check(ok && elapsed < 5.0, format!("rel max-norm error at h=0.1,0.05,0.01: {}; {elapsed:.2}s", lines.join(" ")))
}

fn c9_convergence() -> Outcome {
    let mut ok = true;
    let mut lines = Vec::new();
    for alg in AlgorithmId::TFEM {
        let study = convergence_order(
            alg,
            &forced_case(),
            &forced_case_forcing(),
            &InitialConditions::default(),
            0.05,
            5,
            10.0,
        )
        .unwrap();
        let order = study.stabilized_order().unwrap_or(f64::NAN);
        ok &= study.closed_form && order >= 1.9;
        lines.push(format!("{}={order:.3}", alg.name()));
    }
    let mut gaps = Vec::new();
    for (uj, jq) in [
        (AlgorithmId::McapUJquad, AlgorithmId::McapJquad),
        (AlgorithmId::EhpUJquad, AlgorithmId::EhpJquad),
    ] {
        let gap = dispersion_exponent(uj, 0.01, 0.02).unwrap() - dispersion_exponent(jq, 0.01, 0.02).unwrap();
        ok &= (gap - 2.0).abs() <= 0.2;
        gaps.push(format!("{}−{}={gap:.3}", uj.name(), jq.name()));
    }
    check(ok, format!("orders {}; pe exponent gaps {}", lines.join(" "), gaps.join(" ")))
}

fn c10_energy() -> Outcome {
    let params = OscillatorParams::unit_period();
    let ics = InitialConditions::new(1.0, 0.0).unwrap();
    let n = 100_000;
    let window = 1_000;
    let mut ok = true;
    let mut lines = Vec::new();
    for alg in AlgorithmId::TFEM {
        let traj = simulate(alg, &params, &ForcingSpec::Zero, &ics, 0.1, n).unwrap();
        let e0 = traj.energy[0];
        let dev = |r: std::ops::Range<usize>| r.map(|i| (traj.energy[i] - e0).abs() / e0).fold(0.0, f64::max);
        let first = dev(0..window + 1);
        let last = dev(n + 1 - window..n + 1);
        let diff = (last - first).abs();
        ok &= diff <= 1e-8;
        lines.push(format!("{}: first {first:.3e} last {last:.3e} |Δ| {diff:.2e}", alg.name()));
    }
    check(ok, lines.join("; "))
}

fn c11_cross_consistency() -> Outcome {
    let runs: Vec<(AlgorithmId, Trajectory)> =
        AlgorithmId::TFEM.iter().map(|&a| (a, run_forced(a, 0.01))).collect();
    let get = |alg| &runs.iter().find(|(a, _)| *a == alg).unwrap().1;
    let mut within = true;
    let mut lines = Vec::new();
    let mut compare = |x: AlgorithmId, y: AlgorithmId| {
        let n = series_error_norms(&get(x).u, &get(y).u);
        within &= n.max_rel <= 1e-6;
        lines.push(format!("{}/{}={:.2e}", x.name(), y.name(), n.max_rel));
    };
    use AlgorithmId::*;
    for (x, y) in [(EhpJquad, McapJquad), (EhpUquad, McapUquad), (EhpUJquad, McapUJquad)] {
        compare(x, y);
    }
    for (x, y) in [(EhpJquad, EhpUquad), (McapJquad, McapUquad)] {
        compare(x, y);
    }
    report(within, format!("max nodal relative difference: {}", lines.join(" ")))
}

fn c12_velocity_identity() -> Outcome {
    let mut worst = 0.0f64;
    let cases = [
        (forced_case(), forced_case_forcing(), InitialConditions::default()),
        (forced_case(), forced_case_forcing(), InitialConditions::new(0.02, -0.3).unwrap()),
        (OscillatorParams::unit_period(), ForcingSpec::Zero, InitialConditions::new(1.0, 0.5).unwrap()),
    ];
    for alg in [AlgorithmId::EhpJquad, AlgorithmId::EhpUquad, AlgorithmId::EhpUJquad] {
        for (params, forcing, ics) in &cases {
            let traj = simulate(alg, params, forcing, ics, 0.01, 1000).unwrap();
            let pm = traj.momentum_velocity(params).unwrap();
            let scale = traj.v.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            for (v, p) in traj.v.iter().zip(&pm) {
                worst = worst.max((v - p).abs() / scale);
            }
        }
    }
    check(worst <= 1e-10, format!("max |v − p/m| / max|v| = {worst:.2e}"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("matrix fidelity", c1_matrix_fidelity),
        ("semi-convolution table", c2_semiconvolution),
        ("eigenvalue closed forms", c3_eigen_closed_forms),
        ("unit-modulus identities", c4_unit_modulus_identities),
        ("stability contrast", c5_stability_contrast),
        ("dispersion equivalences", c6_dispersion),
        ("reversibility and symplecticity", c7_reversibility),
        ("forced-response accuracy", c8_forced_accuracy),
        ("convergence order", c9_convergence),
        ("energy boundedness", c10_energy),
        ("cross-formalism consistency", c11_cross_consistency),
        ("velocity reconstruction", c12_velocity_identity),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let out = f();
        let tag = match (out.pass, out.gated) {
            (true, _) => "PASS",
            (false, true) => {
                failed += 1;
                "FAIL"
            }
            (false, false) => "FINDING",
        };
        println!("[{tag}] {:>2} {name}: {}", i + 1, out.detail);
    }
    println!("{} of {} gated criteria failed", failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
