//! Reference solutions and accuracy measurement.

use alloc::format;
use alloc::vec::Vec;

use crate::elements::AlgorithmId;
use crate::error::{Error, Result};
use crate::integrators::{simulate, Trajectory};
use crate::model::{check_step, dependent_initial_impulse, ForcingSpec, InitialConditions, OscillatorParams};
use crate::spectral::period_elongation;

/// Kinetic plus spring energy `½·m·v² + ½·u²/a`.
pub fn total_energy(params: &OscillatorParams, u: f64, v: f64) -> f64 {
    0.5 * params.m() * v * v + 0.5 * u * u / params.a()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactState {
    pub u: f64,
    pub v: f64,
}

fn check_underdamped(params: &OscillatorParams) -> Result<f64> {
    let xi = params.damping_ratio();
    if xi < 1.0 {
        Ok(xi)
    } else {
        Err(Error::NotUnderdamped(xi))
    }
}

/// Free response of an underdamped oscillator.
pub fn exact_free_vibration(params: &OscillatorParams, ics: &InitialConditions, t: f64) -> Result<ExactState> {
    let xi = check_underdamped(params)?;
    let wn = params.omega_n();
    let wd = wn * libm::sqrt(1.0 - xi * xi);
    let sigma = xi * wn;
    let a = ics.u0;
    let b = (ics.v0 + sigma * ics.u0) / wd;
    let (s, c) = (libm::sin(wd * t), libm::cos(wd * t));
    let e = libm::exp(-sigma * t);
    Ok(ExactState {
        u: e * (a * c + b * s),
        v: e * ((-sigma * a + b * wd) * c + (-sigma * b - a * wd) * s),
    })
}

/// Response to `f0·sin(ω0·t)` from rest.
pub fn exact_sinusoidal_response(params: &OscillatorParams, f0: f64, omega0: f64, t: f64) -> Result<ExactState> {
    check_underdamped(params)?;
    let k = params.k();
    let detuning = k - params.m() * omega0 * omega0;
    let cw = params.c() * omega0;
    let det = detuning * detuning + cw * cw;
    if det <= 1e-24 * k * k {
        return Err(Error::Resonance);
    }
    // Particular solution U·sin + V·cos.
    let u_amp = f0 * detuning / det;
    let v_amp = -f0 * cw / det;
    let (s, c) = (libm::sin(omega0 * t), libm::cos(omega0 * t));
    let homogeneous = exact_free_vibration(
        params,
        &InitialConditions {
            u0: -v_amp,
            v0: -u_amp * omega0,
        },
        t,
    )?;
    Ok(ExactState {
        u: u_amp * s + v_amp * c + homogeneous.u,
        v: omega0 * (u_amp * c - v_amp * s) + homogeneous.v,
    })
}

/// Closed-form response when one exists (zero or sinusoidal forcing).
pub fn exact_solution(
    params: &OscillatorParams,
    forcing: &ForcingSpec,
    ics: &InitialConditions,
    t: f64,
) -> Option<Result<ExactState>> {
    let free = || exact_free_vibration(params, ics, t);
    match forcing {
        ForcingSpec::Zero => Some(free()),
        ForcingSpec::Sinusoid { f0, omega0 } => Some((|| {
            let forced = exact_sinusoidal_response(params, *f0, *omega0, t)?;
            let free = free()?;
            Ok(ExactState {
                u: forced.u + free.u,
                v: forced.v + free.v,
            })
        })()),
        ForcingSpec::Tabulated(_) => None,
    }
}

/// Classical RK4 on `(u, v, J, ĵ)` with `u̇ = v`, `v̇ = (f − c·v − u/a)/m`,
/// `J̇ = u/a`, `ĵ̇ = f`.
pub fn rk4_reference(
    params: &OscillatorParams,
    forcing: &ForcingSpec,
    ics: &InitialConditions,
    h: f64,
    n_steps: usize,
    jhat0: f64,
) -> Result<Trajectory> {
    check_step(h)?;
    let (m, c, a) = (params.m(), params.c(), params.a());
    let force = |t: f64| forcing.force_at(t, m);
    let rhs = |t: f64, y: &[f64; 4]| -> Result<[f64; 4]> {
        let f = force(t)?;
        Ok([y[1], (f - c * y[1] - y[0] / a) / m, y[0] / a, f])
    };
    let axpy = |y: &[f64; 4], s: f64, k: &[f64; 4]| -> [f64; 4] { core::array::from_fn(|i| y[i] + s * k[i]) };

    let mut y = [ics.u0, ics.v0, dependent_initial_impulse(params, ics, jhat0), jhat0];
    let mut traj = Trajectory {
        alg: None,
        h,
        t: Vec::with_capacity(n_steps + 1),
        u: Vec::with_capacity(n_steps + 1),
        v: Vec::with_capacity(n_steps + 1),
        j: Vec::with_capacity(n_steps + 1),
        jhat: Vec::with_capacity(n_steps + 1),
        energy: Vec::with_capacity(n_steps + 1),
        states: Vec::new(),
    };
    let record = |t: f64, y: &[f64; 4], traj: &mut Trajectory| {
        traj.t.push(t);
        traj.u.push(y[0]);
        traj.v.push(y[1]);
        traj.j.push(y[2]);
        traj.jhat.push(y[3]);
        traj.energy.push(total_energy(params, y[0], y[1]));
    };
    record(0.0, &y, &mut traj);
    for n in 0..n_steps {
        let t = n as f64 * h;
        let k1 = rhs(t, &y)?;
        let k2 = rhs(t + 0.5 * h, &axpy(&y, 0.5 * h, &k1))?;
        let k3 = rhs(t + 0.5 * h, &axpy(&y, 0.5 * h, &k2))?;
        let k4 = rhs(t + h, &axpy(&y, h, &k3))?;
        y = core::array::from_fn(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]));
        record((n + 1) as f64 * h, &y, &mut traj);
    }
    Ok(traj)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorNorms {
    pub max_abs: f64,
    /// `max_abs` divided by the reference max-norm.
    pub max_rel: f64,
    pub rms: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    U,
    V,
    J,
}

/// Nodal error norms of displacement against a reference on the same grid.
pub fn error_norms(traj: &Trajectory, reference: &Trajectory) -> Result<ErrorNorms> {
    error_norms_channel(traj, reference, Channel::U)
}

pub fn error_norms_channel(traj: &Trajectory, reference: &Trajectory, channel: Channel) -> Result<ErrorNorms> {
    if traj.len() != reference.len() {
        return Err(Error::GridMismatch(format!("{} nodes vs {} nodes", traj.len(), reference.len())));
    }
    if (traj.h - reference.h).abs() > 1e-12 * traj.h.abs().max(reference.h.abs()) {
        return Err(Error::GridMismatch(format!("step {} vs {}", traj.h, reference.h)));
    }
    let pick = |t: &'_ Trajectory| -> Vec<f64> {
        match channel {
            Channel::U => t.u.clone(),
            Channel::V => t.v.clone(),
            Channel::J => t.j.clone(),
        }
    };
    Ok(series_error_norms(&pick(traj), &pick(reference)))
}

/// Error norms of two equally long series.
pub fn series_error_norms(values: &[f64], reference: &[f64]) -> ErrorNorms {
    assert_eq!(values.len(), reference.len(), "series lengths differ");
    let mut max_abs = 0.0f64;
    let mut sum_sq = 0.0;
    let mut scale = 0.0f64;
    for (x, r) in values.iter().zip(reference) {
        let e = (x - r).abs();
        max_abs = max_abs.max(e);
        sum_sq += e * e;
        scale = scale.max(r.abs());
    }
    let max_rel = if max_abs == 0.0 {
        0.0
    } else if scale == 0.0 {
        f64::INFINITY
    } else {
        max_abs / scale
    };
    ErrorNorms {
        max_abs,
        max_rel,
        rms: if values.is_empty() {
            0.0
        } else {
            libm::sqrt(sum_sq / values.len() as f64)
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceLevel {
    pub h: f64,
    /// Max-norm nodal error (authoritative).
    pub max_error: f64,
    /// Error at the final node.
    pub final_error: f64,
    /// Order against the previous retained level.
    pub order: Option<f64>,
    /// Level dropped from order estimates because its error is at round-off.
    pub excluded: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStudy {
    pub alg: AlgorithmId,
    pub levels: Vec<ConvergenceLevel>,
    /// Whether the reference was a closed form (otherwise RK4).
    pub closed_form: bool,
}

impl ConvergenceStudy {
    /// Order between the two finest retained levels.
    pub fn stabilized_order(&self) -> Option<f64> {
        self.levels.iter().rev().find_map(|l| l.order)
    }
}

/// Observed orders `ln(e_{k−1}/e_k)/ln(h_{k−1}/h_k)` for `k ≥ 1`.
pub fn orders_from_errors(hs: &[f64], errors: &[f64]) -> Vec<Option<f64>> {
    assert_eq!(hs.len(), errors.len(), "series lengths differ");
    (0..hs.len())
        .map(|k| {
            if k == 0 || errors[k] <= 0.0 || errors[k - 1] <= 0.0 {
                None
            } else {
                Some(libm::log(errors[k - 1] / errors[k]) / libm::log(hs[k - 1] / hs[k]))
            }
        })
        .collect()
}

/// Errors and observed orders under successive halving of `h0`, over
/// `[0, duration]`. The reference is the closed form when one exists,
/// otherwise RK4 on a grid 1024 times finer than `h0`.
pub fn convergence_order(
    alg: AlgorithmId,
    params: &OscillatorParams,
    forcing: &ForcingSpec,
    ics: &InitialConditions,
    h0: f64,
    levels: usize,
    duration: f64,
) -> Result<ConvergenceStudy> {
    check_step(h0)?;
    if levels < 3 {
        return Err(Error::TooFewLevels { min: 3, got: levels });
    }
    if !(duration.is_finite() && duration > 0.0) {
        return Err(Error::InvalidParameter {
            name: "duration",
            value: duration,
            reason: "must be finite and positive",
        });
    }
    let closed_form = exact_solution(params, forcing, ics, 0.0).is_some();
    let refine_pow = (levels as u32 + 1).max(10);
    let rk4 = if closed_form {
        None
    } else {
        let h_ref = h0 / (1u64 << refine_pow) as f64;
        let n_ref = libm::round(duration / h_ref) as usize;
        Some(rk4_reference(params, forcing, ics, h_ref, n_ref, 0.0)?)
    };

    let mut hs = Vec::with_capacity(levels);
    let mut out: Vec<ConvergenceLevel> = Vec::with_capacity(levels);
    for k in 0..levels {
        let h = h0 / (1u64 << k) as f64;
        let n = libm::round(duration / h) as usize;
        let traj = simulate(alg, params, forcing, ics, h, n)?;
        let reference: Vec<f64> = match &rk4 {
            None => traj
                .t
                .iter()
                .map(|&t| exact_solution(params, forcing, ics, t).expect("closed form").map(|s| s.u))
                .collect::<Result<_>>()?,
            Some(r) => r.u.iter().step_by(1usize << (refine_pow - k as u32)).take(traj.len()).copied().collect(),
        };
        let norms = series_error_norms(&traj.u, &reference);
        let scale = reference.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
        let last = traj.len() - 1;
        hs.push(h);
        out.push(ConvergenceLevel {
            h,
            max_error: norms.max_abs,
            final_error: (traj.u[last] - reference[last]).abs(),
            order: None,
            excluded: norms.max_abs < 100.0 * f64::EPSILON * scale,
        });
    }
    let mut prev: Option<usize> = None;
    for k in 0..out.len() {
        if out[k].excluded {
            continue;
        }
        if let Some(p) = prev {
            out[k].order = orders_from_errors(&[hs[p], hs[k]], &[out[p].max_error, out[k].max_error])[1];
        }
        prev = Some(k);
    }
    Ok(ConvergenceStudy {
        alg,
        levels: out,
        closed_form,
    })
}

/// Exponent `p` of `pe ∝ (h/Tn)^p` fitted between two step ratios.
pub fn dispersion_exponent(alg: AlgorithmId, x_small: f64, x_large: f64) -> Result<f64> {
    let small = period_elongation(alg, x_small)?.pe;
    let large = period_elongation(alg, x_large)?.pe;
    Ok(libm::log(large / small) / libm::log(x_large / x_small))
}
