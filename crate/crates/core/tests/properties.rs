use proptest::prelude::*;

use tfem_core::elements::{build_signed, build_step_matrices, Coefficients, PolyBasis, StepConstants};
use tfem_core::integrators::Trajectory;
use tfem_core::model::{accumulate_impulse, dependent_initial_impulse, sample_forcing};
use tfem_core::oracle::{rk4_reference, series_error_norms};
use tfem_core::scalar::{rat, rational_from_f64, Rational, Scalar};
use tfem_core::spectral::{amplification_matrix, check_time_reversibility, eigenvalues, period_elongation};
use tfem_core::{simulate, AlgorithmId, ForcingSpec, InitialConditions, OscillatorParams};

fn tfem_alg() -> impl Strategy<Value = AlgorithmId> {
    prop::sample::select(AlgorithmId::TFEM.to_vec())
}

fn any_alg() -> impl Strategy<Value = AlgorithmId> {
    prop::sample::select(AlgorithmId::ALL.to_vec())
}

fn params() -> impl Strategy<Value = OscillatorParams> {
    (0.1f64..10.0, 0.0f64..2.0, 0.001f64..1.0).prop_map(|(m, c, a)| OscillatorParams::new(m, c, a).unwrap())
}

/// Spacing of doubles at `x`.
fn ulp(x: f64) -> f64 {
    let x = x.abs();
    f64::from_bits(x.to_bits() + 1) - x
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn period_round_trip(m in 0.01f64..100.0, tn in 0.01f64..100.0, xi in 0.0f64..0.99) {
        let p = OscillatorParams::from_period(m, tn, xi).unwrap();
        let d = p.derived_properties();
        prop_assert!((d.tn - tn).abs() <= 1e-12 * tn);
        prop_assert!((d.xi - xi).abs() <= 1e-12 * xi.max(1e-300));
        prop_assert!((d.xi - p.c() / (2.0 * p.m() * d.omega_n)).abs() <= 1e-12 * d.xi.max(1e-300));
        prop_assert!((d.k * p.a() - 1.0).abs() <= 1e-15);
    }

    #[test]
    fn initial_impulse_is_linear(p in params(), u0 in -5.0f64..5.0, v0 in -5.0f64..5.0, j0 in -5.0f64..5.0) {
        let ics = InitialConditions::new(u0, v0).unwrap();
        let got = dependent_initial_impulse(&p, &ics, j0);
        let expected = -p.c() * u0 - p.m() * v0 + j0;
        prop_assert!((got - expected).abs() <= 1e-14 * (1.0 + expected.abs()));
    }

    #[test]
    fn impulse_exact_for_linear_force(slope in -10.0f64..10.0, offset in -10.0f64..10.0, h in 0.001f64..0.5, j0 in -1.0f64..1.0) {
        let n = 200;
        let f: Vec<f64> = (0..=n).map(|k| offset + slope * k as f64 * h).collect();
        let jhat = accumulate_impulse(&f, h, j0).unwrap();
        prop_assert_eq!(jhat[0], j0);
        for (k, v) in jhat.iter().enumerate() {
            let t = k as f64 * h;
            let exact = j0 + offset * t + 0.5 * slope * t * t;
            prop_assert!((v - exact).abs() <= 1e-12 * (1.0 + exact.abs()));
        }
    }

    #[test]
    fn sampled_force_shape(p in params(), h in 0.001f64..0.1, n in 1usize..300) {
        let s = sample_forcing(&ForcingSpec::Sinusoid { f0: 3.0, omega0: 2.0 }, &p, h, n, 0.25).unwrap();
        prop_assert_eq!(s.f.len(), n + 1);
        prop_assert_eq!(s.jhat.len(), n + 1);
        prop_assert_eq!(s.jhat[0], 0.25);
    }

    #[test]
    fn step_constants_identity(m in 1i64..200, a in 1i64..200, h in 1i64..200, d in 1i64..50) {
        let (m, a, h) = (rat(m, d), rat(a, d + 1), rat(h, d + 2));
        let k = StepConstants::new(&m, &a, &h);
        prop_assert_eq!(k.reversal_identity_residual(&h), Rational::zero());
        prop_assert_eq!(k.x.clone(), rat(12, 1) * &m * &a - &h * &h);
    }

    #[test]
    fn float_build_close_to_exact(alg in any_alg(), m in 0.1f64..10.0, c in 0.0f64..2.0, a in 0.001f64..1.0, log_h in -4.0f64..1.0) {
        let h = 10f64.powf(log_h);
        let p = OscillatorParams::new(m, c, a).unwrap();
        let float = build_step_matrices(alg, &p, h).unwrap();
        let k = Coefficients {
            m: rational_from_f64(m).unwrap(),
            c: rational_from_f64(c).unwrap(),
            a: rational_from_f64(a).unwrap(),
            h: rational_from_f64(h).unwrap(),
        };
        let exact = build_signed(alg, &k).to_f64();
        // Entries that are differences of larger terms cannot be correctly
        // rounded, so ulps are counted at the scale of the largest entry.
        // The worst case seen over many samples is 16 such ulps, for the
        // UJ-quadratic convolved-action A1[0][0] near h² = 12·m·a.
        for (x, y) in [(&float.a1, &exact.a1), (&float.a0, &exact.a0), (&float.b, &exact.b)] {
            let unit = ulp(y.max_abs());
            for i in 0..x.rows() {
                for j in 0..x.cols() {
                    prop_assert!((x[(i, j)] - y[(i, j)]).abs() <= 16.0 * unit,
                        "{} ({}, {}): {} vs {}", alg, i, j, x[(i, j)], y[(i, j)]);
                }
            }
        }
    }

    #[test]
    fn impulse_column_only_for_mcap(alg in any_alg(), p in params(), h in 0.001f64..1.0) {
        let s = build_step_matrices(alg, &p, h).unwrap();
        let col_zero = (0..s.dim()).all(|i| s.b[(i, 2)] == 0.0);
        prop_assert_eq!(col_zero, alg.formalism() != tfem_core::Formalism::Mcap);
    }

    #[test]
    fn partition_of_unity(num in 1i64..100, den in 1i64..100, s in 0i64..=64) {
        let h = rat(num, den);
        let t = &h * rat(s, 64);
        let b = PolyBasis::new(&h);
        let lin = b.linear.iter().fold(Rational::zero(), |acc, l| acc + l.eval(&t));
        let quad = b.quadratic.iter().fold(Rational::zero(), |acc, q| acc + q.eval(&t));
        prop_assert_eq!(lin, Rational::one());
        prop_assert_eq!(quad, Rational::one());
    }

    #[test]
    fn conservative_map_is_reversible(alg in tfem_alg(), m in 0.1f64..10.0, a in 0.001f64..1.0, x in 0.001f64..0.5) {
        let p = OscillatorParams::new(m, 0.0, a).unwrap();
        let h = x * p.natural_period();
        prop_assert!(check_time_reversibility(alg, &p, h).unwrap() <= 1e-10);
        let det = amplification_matrix(alg, &p, h, false).unwrap().determinant();
        prop_assert!((det - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn ujquad_unit_modulus_at_any_step(m in 0.1f64..10.0, a in 0.001f64..1.0, log_x in -2.0f64..1.0) {
        let p = OscillatorParams::new(m, 0.0, a).unwrap();
        let h = 10f64.powf(log_x) * p.natural_period();
        for alg in [AlgorithmId::EhpUJquad, AlgorithmId::McapUJquad] {
            for z in eigenvalues(&amplification_matrix(alg, &p, h, false).unwrap()) {
                prop_assert!((z.norm() - 1.0).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn jquad_and_uquad_share_dispersion(x in 0.005f64..0.55) {
        let reference = period_elongation(AlgorithmId::McapJquad, x).unwrap().pe;
        for alg in [AlgorithmId::McapUquad, AlgorithmId::EhpJquad, AlgorithmId::EhpUquad] {
            prop_assert!((period_elongation(alg, x).unwrap().pe - reference).abs() <= 1e-9 * (1.0 + reference.abs()));
        }
    }

    #[test]
    fn response_is_linear_in_forcing(alg in any_alg(), p in params(), alpha in -5.0f64..5.0) {
        let h = 0.02 * p.natural_period();
        let base = ForcingSpec::Sinusoid { f0: 1.0, omega0: 3.0 };
        let scaled = ForcingSpec::Sinusoid { f0: alpha, omega0: 3.0 };
        let ics = InitialConditions::default();
        let u1 = simulate(alg, &p, &base, &ics, h, 200).unwrap();
        let u2 = simulate(alg, &p, &scaled, &ics, h, 200).unwrap();
        let scale = u1.max_abs_u() * alpha.abs();
        for (a, b) in u1.u.iter().zip(&u2.u) {
            prop_assert!((alpha * a - b).abs() <= 1e-12 * scale.max(1e-300));
        }
    }

    #[test]
    fn free_vibration_is_matrix_power(alg in any_alg(), m in 0.1f64..10.0, a in 0.001f64..1.0, x in 0.01f64..0.5, u0 in -2.0f64..2.0, v0 in -2.0f64..2.0) {
        let p = OscillatorParams::new(m, 0.0, a).unwrap();
        let h = x * p.natural_period();
        let ics = InitialConditions::new(u0, v0).unwrap();
        let traj = simulate(alg, &p, &ForcingSpec::Zero, &ics, h, 100).unwrap();
        let amp = amplification_matrix(alg, &p, h, false).unwrap();
        let mut state = traj.states[0].to_vec();
        let scale = traj.states.iter().flat_map(|s| s.to_vec()).fold(0.0f64, |m, v| m.max(v.abs()));
        for s in &traj.states[1..] {
            state = amp.mul_vec(&state);
            for (x, y) in state.iter().zip(s.to_vec()) {
                prop_assert!((x - y).abs() <= 1e-10 * scale.max(1e-300));
            }
        }
    }

    #[test]
    fn initial_velocity_is_recovered(alg in any_alg(), p in params(), u0 in -2.0f64..2.0, v0 in -2.0f64..2.0) {
        let ics = InitialConditions::new(u0, v0).unwrap();
        let traj = simulate(alg, &p, &ForcingSpec::Sinusoid { f0: 1.0, omega0: 1.0 }, &ics, 0.01, 3).unwrap();
        prop_assert!((traj.v[0] - v0).abs() <= 1e-12 * (1.0 + v0.abs() + u0.abs()));
        prop_assert_eq!(traj.u[0], u0);
    }

    #[test]
    fn trajectory_series_aligned(alg in any_alg(), p in params(), n in 1usize..100, h in 0.001f64..0.2) {
        let traj: Trajectory = simulate(alg, &p, &ForcingSpec::Zero, &InitialConditions::new(1.0, 0.0).unwrap(), h, n).unwrap();
        let len = n + 1;
        prop_assert_eq!(traj.t.len(), len);
        prop_assert_eq!(traj.u.len(), len);
        prop_assert_eq!(traj.v.len(), len);
        prop_assert_eq!(traj.j.len(), len);
        prop_assert_eq!(traj.jhat.len(), len);
        prop_assert_eq!(traj.energy.len(), len);
        for (k, t) in traj.t.iter().enumerate() {
            prop_assert_eq!(*t, k as f64 * h);
        }
    }

    #[test]
    fn algorithm_names_round_trip(alg in any_alg()) {
        prop_assert_eq!(alg.name().parse::<AlgorithmId>().unwrap(), alg);
        prop_assert_eq!(alg.name().to_lowercase().parse::<AlgorithmId>().unwrap(), alg);
    }
}

#[test]
fn rk4_converges_at_fourth_order() {
    let p = OscillatorParams::new(1.0, 0.2 * std::f64::consts::PI, 1.0 / (4.0 * std::f64::consts::PI.powi(2))).unwrap();
    let forcing = ForcingSpec::Sinusoid { f0: 100.0, omega0: 10.0 };
    let ics = InitialConditions::default();
    let run = |h: f64| rk4_reference(&p, &forcing, &ics, h, (10.0 / h).round() as usize, 0.0).unwrap();
    let fine = run(0.0025 / 8.0);
    let mut errs = Vec::new();
    for (h, stride) in [(0.01, 32), (0.005, 16), (0.0025, 8)] {
        let coarse = run(h);
        let reference: Vec<f64> = fine.u.iter().step_by(stride).copied().collect();
        errs.push(series_error_norms(&coarse.u, &reference).max_abs);
    }
    for w in errs.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!((order - 4.0).abs() <= 0.1, "order {order}, errors {errs:?}");
    }
}
