//! The one-step recurrence `A1·x_n = A0·x_{n−1} + B·loads_n` and the
//! physical outputs reconstructed from its states.

use alloc::vec::Vec;

use crate::elements::{build_step_matrices, AlgorithmId, Formalism, StepMatrices};
use crate::error::{Error, Result};
use crate::linalg::{LuFactor, Mat};
use crate::model::{
    check_step, dependent_initial_impulse, sample_forcing, ForcingSpec, InitialConditions, OscillatorParams,
    SampledForce,
};
use crate::oracle::total_energy;

/// Per-node state of a scheme; `p` is the momentum `m·u̇`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrajectoryState {
    Ehp { u: f64, p: f64, j: f64 },
    Mcap { u: f64, j: f64 },
    Newmark { u: f64, v: f64, acc: f64 },
}

impl TrajectoryState {
    pub fn from_vec(formalism: Formalism, x: &[f64]) -> Result<Self> {
        let expected = if formalism == Formalism::Mcap { 2 } else { 3 };
        if x.len() != expected {
            return Err(Error::Dimension {
                expected,
                got: x.len(),
            });
        }
        Ok(match formalism {
            Formalism::Ehp => TrajectoryState::Ehp {
                u: x[0],
                p: x[1],
                j: x[2],
            },
            Formalism::Mcap => TrajectoryState::Mcap { u: x[0], j: x[1] },
            Formalism::Newmark => TrajectoryState::Newmark {
                u: x[0],
                v: x[1],
                acc: x[2],
            },
        })
    }

    pub fn to_vec(&self) -> Vec<f64> {
        match *self {
            TrajectoryState::Ehp { u, p, j } => alloc::vec![u, p, j],
            TrajectoryState::Mcap { u, j } => alloc::vec![u, j],
            TrajectoryState::Newmark { u, v, acc } => alloc::vec![u, v, acc],
        }
    }

    pub fn displacement(&self) -> f64 {
        match *self {
            TrajectoryState::Ehp { u, .. } | TrajectoryState::Mcap { u, .. } | TrajectoryState::Newmark { u, .. } => u,
        }
    }
}

/// Starting state of `alg` for the given initial conditions, prior impulse
/// `jhat0` and applied force at `t = 0`.
pub fn initial_state(
    alg: AlgorithmId,
    params: &OscillatorParams,
    ics: &InitialConditions,
    jhat0: f64,
    f_start: f64,
) -> TrajectoryState {
    let j0 = dependent_initial_impulse(params, ics, jhat0);
    match alg.formalism() {
        Formalism::Ehp => TrajectoryState::Ehp {
            u: ics.u0,
            p: params.m() * ics.v0,
            j: j0,
        },
        Formalism::Mcap => TrajectoryState::Mcap { u: ics.u0, j: j0 },
        Formalism::Newmark => TrajectoryState::Newmark {
            u: ics.u0,
            v: ics.v0,
            acc: (f_start - params.c() * ics.v0 - params.k() * ics.u0) / params.m(),
        },
    }
}

/// Velocity from the integrated momentum balance `m·v + c·u + J − ĵ = 0`.
pub fn reconstruct_velocity(params: &OscillatorParams, u: f64, j: f64, jhat: f64) -> f64 {
    (jhat - j - params.c() * u) / params.m()
}

/// Step matrices with `A1` factorized once.
#[derive(Debug, Clone)]
pub struct Stepper {
    mats: StepMatrices,
    amp: Mat<f64>,
    load: Mat<f64>,
}

impl Stepper {
    pub fn new(alg: AlgorithmId, params: &OscillatorParams, h: f64) -> Result<Self> {
        Self::from_matrices(build_step_matrices(alg, params, h)?, h)
    }

    /// `h` is only used to label a singular-matrix error.
    pub fn from_matrices(mats: StepMatrices, h: f64) -> Result<Self> {
        let lu = LuFactor::new(&mats.a1).ok_or(Error::SingularLeftMatrix { alg: mats.alg, h })?;
        // The presented A1 rows mix scales (terms in m/h next to unit
        // entries), so re-solving every step accumulates cancellation error.
        // Forming A1⁻¹·A0 and A1⁻¹·B once keeps the recurrence a plain
        // well-scaled matrix-vector product.
        let amp = lu.solve_mat(&mats.a0);
        let load = lu.solve_mat(&mats.b);
        Ok(Stepper { mats, amp, load })
    }

    pub fn matrices(&self) -> &StepMatrices {
        &self.mats
    }

    /// Advances one step: `x = A1⁻¹·(A0·x_prev + B·(f_prev, f_next, ĵ_prev))`.
    pub fn step(&self, x_prev: &[f64], f_prev: f64, f_next: f64, jhat_prev: f64) -> Vec<f64> {
        let mut x = self.amp.mul_vec(x_prev);
        for (r, l) in x.iter_mut().zip(self.load.mul_vec(&[f_prev, f_next, jhat_prev])) {
            *r += l;
        }
        x
    }
}

/// Single step with a fresh factorization of `A1`.
pub fn step(
    mats: &StepMatrices,
    h: f64,
    x_prev: &[f64],
    f_prev: f64,
    f_next: f64,
    jhat_prev: f64,
) -> Result<Vec<f64>> {
    if x_prev.len() != mats.dim() {
        return Err(Error::Dimension {
            expected: mats.dim(),
            got: x_prev.len(),
        });
    }
    Ok(Stepper::from_matrices(mats.clone(), h)?.step(x_prev, f_prev, f_next, jhat_prev))
}

/// Nodal record of a run. `alg` is `None` for reference solutions.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub alg: Option<AlgorithmId>,
    pub h: f64,
    pub t: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub j: Vec<f64>,
    pub jhat: Vec<f64>,
    pub energy: Vec<f64>,
    /// Raw scheme states (empty for reference solutions).
    pub states: Vec<TrajectoryState>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// Every `stride`-th node.
    pub fn subsample(&self, stride: usize) -> Trajectory {
        assert!(stride > 0, "stride must be positive");
        let pick = |v: &[f64]| v.iter().step_by(stride).copied().collect::<Vec<_>>();
        Trajectory {
            alg: self.alg,
            h: self.h * stride as f64,
            t: pick(&self.t),
            u: pick(&self.u),
            v: pick(&self.v),
            j: pick(&self.j),
            jhat: pick(&self.jhat),
            energy: pick(&self.energy),
            states: self.states.iter().step_by(stride).copied().collect(),
        }
    }

    /// `p/m` at every node for extended-Hamilton runs.
    pub fn momentum_velocity(&self, params: &OscillatorParams) -> Option<Vec<f64>> {
        self.states
            .iter()
            .map(|s| match s {
                TrajectoryState::Ehp { p, .. } => Some(p / params.m()),
                _ => None,
            })
            .collect()
    }

    pub fn max_abs_u(&self) -> f64 {
        self.u.iter().fold(0.0, |m, x| m.max(libm::fabs(*x)))
    }
}

/// Runs `alg` on a forcing history sampled on `t_n = n·h`, `n = 0..=n_steps`,
/// with no impulse before `t = 0`.
pub fn simulate(
    alg: AlgorithmId,
    params: &OscillatorParams,
    forcing: &ForcingSpec,
    ics: &InitialConditions,
    h: f64,
    n_steps: usize,
) -> Result<Trajectory> {
    check_step(h)?;
    let sampled = sample_forcing(forcing, params, h, n_steps, 0.0)?;
    simulate_sampled(alg, params, &sampled, ics)
}

/// Runs `alg` on pre-sampled nodal forces (honours `sampled.jhat0`).
pub fn simulate_sampled(
    alg: AlgorithmId,
    params: &OscillatorParams,
    sampled: &SampledForce,
    ics: &InitialConditions,
) -> Result<Trajectory> {
    let h = sampled.h;
    let stepper = Stepper::new(alg, params, h)?;
    let formalism = alg.formalism();
    let n = sampled.f.len();

    let mut states = Vec::with_capacity(n);
    let mut x = initial_state(alg, params, ics, sampled.jhat0, sampled.f[0]).to_vec();
    states.push(TrajectoryState::from_vec(formalism, &x)?);
    for k in 1..n {
        x = stepper.step(&x, sampled.f[k - 1], sampled.f[k], sampled.jhat[k - 1]);
        states.push(TrajectoryState::from_vec(formalism, &x)?);
    }

    let mut traj = Trajectory {
        alg: Some(alg),
        h,
        t: (0..n).map(|k| k as f64 * h).collect(),
        u: Vec::with_capacity(n),
        v: Vec::with_capacity(n),
        j: Vec::with_capacity(n),
        jhat: sampled.jhat.clone(),
        energy: Vec::with_capacity(n),
        states: Vec::new(),
    };
    for (state, &jhat) in states.iter().zip(&sampled.jhat) {
        let (u, v, j) = match *state {
            TrajectoryState::Ehp { u, j, .. } | TrajectoryState::Mcap { u, j } => {
                (u, reconstruct_velocity(params, u, j, jhat), j)
            }
            TrajectoryState::Newmark { u, v, .. } => (u, v, jhat - params.m() * v - params.c() * u),
        };
        traj.u.push(u);
        traj.v.push(v);
        traj.j.push(j);
        traj.energy.push(total_energy(params, u, v));
    }
    traj.states = states;
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Mat;
    use alloc::vec;
    use core::f64::consts::PI;

    fn unit() -> OscillatorParams {
        OscillatorParams::new(1.0, 0.0, 1.0).unwrap()
    }

    #[test]
    fn zero_initial_state() {
        for alg in AlgorithmId::ALL {
            let s = initial_state(alg, &unit(), &InitialConditions::default(), 0.0, 0.0);
            assert!(s.to_vec().iter().all(|&x| x == 0.0));
        }
    }

    #[test]
    fn initial_momentum_and_impulse() {
        let p = OscillatorParams::new(2.0, 0.0, 1.0).unwrap();
        let ics = InitialConditions::new(0.0, 3.0).unwrap();
        assert_eq!(
            initial_state(AlgorithmId::EhpUquad, &p, &ics, 0.0, 0.0),
            TrajectoryState::Ehp { u: 0.0, p: 6.0, j: -6.0 }
        );
        let p = OscillatorParams::new(1.0, 0.2 * PI, 1.0).unwrap();
        let ics = InitialConditions::new(1.0, 0.0).unwrap();
        match initial_state(AlgorithmId::McapJquad, &p, &ics, 0.0, 0.0) {
            TrajectoryState::Mcap { j, .. } => assert!((j + 0.2 * PI).abs() < 1e-15),
            s => panic!("{s:?}"),
        }
        match initial_state(AlgorithmId::NewmarkCAA, &unit(), &InitialConditions::new(1.0, 0.0).unwrap(), 0.0, 2.0) {
            TrajectoryState::Newmark { acc, .. } => assert_eq!(acc, 1.0),
            s => panic!("{s:?}"),
        }
    }

    #[test]
    fn zero_step_stays_zero() {
        let mats = build_step_matrices(AlgorithmId::EhpUJquad, &unit(), 0.1).unwrap();
        assert_eq!(step(&mats, 0.1, &[0.0; 3], 0.0, 0.0, 0.0).unwrap(), vec![0.0; 3]);
        assert!(step(&mats, 0.1, &[0.0; 2], 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn mcap_jquad_unit_step() {
        let mats = build_step_matrices(AlgorithmId::McapJquad, &unit(), 1.0).unwrap();
        let x1 = step(&mats, 1.0, &[1.0, 0.0], 0.0, 0.0, 0.0).unwrap();
        // [[11/12, 1/2], [1/2, −1]]·x = (11/12, −1/2)
        let a = Mat::from_rows(vec![vec![11.0 / 12.0, 0.5], vec![0.5, -1.0]]);
        let r = a.mul_vec(&x1);
        assert!((r[0] - 11.0 / 12.0).abs() < 1e-15 && (r[1] + 0.5).abs() < 1e-15);
        // Closed form: det = −11/12 − 1/4 = −7/6.
        assert!((x1[0] - (11.0 / 12.0 - 0.25) / (7.0 / 6.0)).abs() < 1e-15);
    }

    #[test]
    fn zero_forcing_zero_trajectory() {
        for alg in AlgorithmId::ALL {
            let t = simulate(alg, &unit(), &ForcingSpec::Zero, &InitialConditions::default(), 0.1, 20).unwrap();
            assert_eq!(t.len(), 21);
            assert!(t.u.iter().chain(&t.v).chain(&t.j).chain(&t.energy).all(|&x| x == 0.0));
        }
    }

    #[test]
    fn ehp_velocity_matches_momentum() {
        let p = OscillatorParams::new(1.0, 0.2 * PI, 1.0 / (4.0 * PI * PI)).unwrap();
        let forcing = ForcingSpec::Sinusoid { f0: 100.0, omega0: 10.0 };
        for alg in [AlgorithmId::EhpJquad, AlgorithmId::EhpUquad, AlgorithmId::EhpUJquad] {
            let t = simulate(alg, &p, &forcing, &InitialConditions::default(), 0.01, 200).unwrap();
            let pv = t.momentum_velocity(&p).unwrap();
            let scale = t.v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            for (a, b) in t.v.iter().zip(&pv) {
                assert!((a - b).abs() <= 1e-10 * scale, "{alg}");
            }
        }
    }

    #[test]
    fn subsample_keeps_grid() {
        let t = simulate(AlgorithmId::McapUJquad, &unit(), &ForcingSpec::Zero, &InitialConditions::new(1.0, 0.0).unwrap(), 0.1, 10).unwrap();
        let s = t.subsample(5);
        assert_eq!(s.len(), 3);
        assert!((s.h - 0.5).abs() < 1e-15);
        assert_eq!(s.u[2], t.u[10]);
    }
}
