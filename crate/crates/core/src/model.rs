//! Oscillator definition, forcing, and impulse bookkeeping.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};

/// Kelvin–Voigt oscillator `m·ü + c·u̇ + u/a = f`, parameterized by the
/// flexibility `a = 1/k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorParams {
    m: f64,
    c: f64,
    a: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedProperties {
    pub k: f64,
    pub omega_n: f64,
    pub tn: f64,
    pub xi: f64,
}

impl OscillatorParams {
    /// Requires `m > 0`, `a > 0`, `c ≥ 0`, all finite.
    pub fn new(m: f64, c: f64, a: f64) -> Result<Self> {
        check_positive("m", m)?;
        check_positive("a", a)?;
        if !c.is_finite() || c < 0.0 {
            return Err(Error::InvalidParameter {
                name: "c",
                value: c,
                reason: "damping must be finite and non-negative",
            });
        }
        Ok(OscillatorParams { m, c, a })
    }

    /// Builds the system from mass, natural period and damping ratio.
    pub fn from_period(m: f64, tn: f64, xi: f64) -> Result<Self> {
        check_positive("m", m)?;
        check_positive("Tn", tn)?;
        if !xi.is_finite() || xi < 0.0 {
            return Err(Error::InvalidParameter {
                name: "xi",
                value: xi,
                reason: "damping ratio must be finite and non-negative",
            });
        }
        let omega_n = 2.0 * PI / tn;
        let a = 1.0 / (m * omega_n * omega_n);
        Self::new(m, 2.0 * xi * m * omega_n, a)
    }

    /// Unit-period undamped system (`m = 1`, `a = 1/(4π²)`).
    pub fn unit_period() -> Self {
        OscillatorParams {
            m: 1.0,
            c: 0.0,
            a: 1.0 / (4.0 * PI * PI),
        }
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn k(&self) -> f64 {
        1.0 / self.a
    }

    pub fn omega_n(&self) -> f64 {
        1.0 / libm::sqrt(self.m * self.a)
    }

    pub fn natural_period(&self) -> f64 {
        2.0 * PI * libm::sqrt(self.m * self.a)
    }

    pub fn damping_ratio(&self) -> f64 {
        0.5 * self.c * libm::sqrt(self.a / self.m)
    }

    pub fn derived_properties(&self) -> DerivedProperties {
        DerivedProperties {
            k: self.k(),
            omega_n: self.omega_n(),
            tn: self.natural_period(),
            xi: self.damping_ratio(),
        }
    }

    /// Same mass and flexibility with the dashpot removed.
    pub fn undamped(&self) -> Self {
        OscillatorParams { c: 0.0, ..*self }
    }
}

fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite and positive",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct InitialConditions {
    pub u0: f64,
    pub v0: f64,
}

impl InitialConditions {
    pub fn new(u0: f64, v0: f64) -> Result<Self> {
        for (name, value) in [("u0", u0), ("v0", v0)] {
            if !value.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    reason: "initial conditions must be finite",
                });
            }
        }
        Ok(InitialConditions { u0, v0 })
    }
}

/// Initial spring impulse implied by the momentum balance
/// `m·v0 + c·u0 + J0 − ĵ0 = 0`.
pub fn dependent_initial_impulse(params: &OscillatorParams, ics: &InitialConditions, jhat0: f64) -> f64 {
    jhat0 - params.m * ics.v0 - params.c * ics.u0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecordKind {
    /// Values are an applied force.
    Force,
    /// Values are a ground acceleration `ag`; the effective force is `−m·scale·ag`.
    GroundAcceleration,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ForcingSpec {
    Zero,
    Sinusoid { f0: f64, omega0: f64 },
    Tabulated(ForceTable),
}

/// A sampled forcing history with strictly increasing times.
#[derive(Debug, Clone, PartialEq)]
pub struct ForceTable {
    times: Vec<f64>,
    values: Vec<f64>,
    kind: RecordKind,
    scale: f64,
}

impl ForceTable {
    pub fn new(times: Vec<f64>, values: Vec<f64>, kind: RecordKind, scale: f64) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::InvalidTable(format!(
                "{} times but {} values",
                times.len(),
                values.len()
            )));
        }
        if times.len() < 2 {
            return Err(Error::InvalidTable(format!(
                "need at least 2 samples, got {}",
                times.len()
            )));
        }
        if let Some(i) = times.iter().chain(&values).position(|x| !x.is_finite()) {
            return Err(Error::InvalidTable(format!("non-finite entry at position {i}")));
        }
        if let Some(i) = times.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::InvalidTable(format!(
                "times not strictly increasing at sample {} (t = {})",
                i + 1,
                times[i + 1]
            )));
        }
        if !scale.is_finite() {
            return Err(Error::InvalidTable(format!("non-finite scale {scale}")));
        }
        Ok(ForceTable {
            times,
            values,
            kind,
            scale,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn kind(&self) -> RecordKind {
        self.kind
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn last_time(&self) -> f64 {
        self.times[self.times.len() - 1]
    }

    /// Effective applied force factor for one tabulated value.
    fn force_factor(&self, m: f64) -> f64 {
        match self.kind {
            RecordKind::Force => self.scale,
            RecordKind::GroundAcceleration => -m * self.scale,
        }
    }

    /// Raw tabulated value at `t` by linear interpolation; no extrapolation.
    pub fn interpolate(&self, t: f64) -> Result<f64> {
        let first = self.times[0];
        let last = self.last_time();
        let tol = 1e-9 * libm::fabs(last).max(libm::fabs(first)).max(1.0);
        if t < first - tol || t > last + tol {
            return Err(Error::Coverage {
                requested: t,
                last_time: last,
            });
        }
        let idx = self.times.partition_point(|&s| s < t);
        // Snap onto a sample when the grid node coincides with it up to rounding.
        for j in [idx.saturating_sub(1), idx.min(self.times.len() - 1)] {
            if libm::fabs(self.times[j] - t) <= 1e-12 * libm::fabs(t).max(1.0) {
                return Ok(self.values[j]);
            }
        }
        let hi = idx.clamp(1, self.times.len() - 1);
        let lo = hi - 1;
        let w = (t - self.times[lo]) / (self.times[hi] - self.times[lo]);
        Ok(self.values[lo] + w * (self.values[hi] - self.values[lo]))
    }

    /// Raw values linearly interpolated at `t_n = n·h`, `n = 0..=n_steps`.
    pub fn resample(&self, h: f64, n_steps: usize) -> Result<Vec<f64>> {
        check_step(h)?;
        let end = n_steps as f64 * h;
        let tol = 1e-9 * libm::fabs(self.last_time()).max(1.0);
        if end > self.last_time() + tol {
            return Err(Error::Coverage {
                requested: end,
                last_time: self.last_time(),
            });
        }
        (0..=n_steps).map(|n| self.interpolate(n as f64 * h)).collect()
    }
}

impl ForcingSpec {
    /// Effective applied force at time `t` for a system of mass `m`.
    pub fn force_at(&self, t: f64, m: f64) -> Result<f64> {
        match self {
            ForcingSpec::Zero => Ok(0.0),
            ForcingSpec::Sinusoid { f0, omega0 } => Ok(f0 * libm::sin(omega0 * t)),
            ForcingSpec::Tabulated(table) => Ok(table.force_factor(m) * table.interpolate(t)?),
        }
    }
}

/// Nodal force and cumulative impulse on the uniform grid `t_n = n·h`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledForce {
    pub h: f64,
    pub f: Vec<f64>,
    pub jhat: Vec<f64>,
    pub jhat0: f64,
}

impl SampledForce {
    pub fn n_steps(&self) -> usize {
        self.f.len() - 1
    }

    /// Builds the record from nodal forces, accumulating the impulse.
    pub fn from_nodal(f: Vec<f64>, h: f64, jhat0: f64) -> Result<Self> {
        check_step(h)?;
        if f.len() < 2 {
            return Err(Error::InvalidTable(format!(
                "need at least two nodal forces, got {}",
                f.len()
            )));
        }
        let jhat = accumulate_impulse(&f, h, jhat0)?;
        Ok(SampledForce { h, f, jhat, jhat0 })
    }
}

pub(crate) fn check_step(h: f64) -> Result<()> {
    if h.is_finite() && h > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidStep(h))
    }
}

/// Samples the forcing on the integration grid and fills the impulse record.
pub fn sample_forcing(
    spec: &ForcingSpec,
    params: &OscillatorParams,
    h: f64,
    n_steps: usize,
    jhat0: f64,
) -> Result<SampledForce> {
    check_step(h)?;
    if n_steps == 0 {
        return Err(Error::InvalidTable("n_steps must be at least 1".into()));
    }
    let f = match spec {
        ForcingSpec::Zero => alloc::vec![0.0; n_steps + 1],
        ForcingSpec::Sinusoid { f0, omega0 } => (0..=n_steps)
            .map(|n| f0 * libm::sin(omega0 * (n as f64 * h)))
            .collect(),
        ForcingSpec::Tabulated(table) => {
            let factor = table.force_factor(params.m);
            table
                .resample(h, n_steps)?
                .into_iter()
                .map(|v| factor * v)
                .collect()
        }
    };
    SampledForce::from_nodal(f, h, jhat0)
}

/// Running trapezoid of nodal forces: `ĵ[n] = ĵ[n−1] + h·(f[n−1] + f[n])/2`.
pub fn accumulate_impulse(f: &[f64], h: f64, jhat0: f64) -> Result<Vec<f64>> {
    check_step(h)?;
    let mut out = Vec::with_capacity(f.len());
    if f.is_empty() {
        return Ok(out);
    }
    out.push(jhat0);
    let mut acc = jhat0;
    for w in f.windows(2) {
        acc += 0.5 * h * (w[0] + w[1]);
        out.push(acc);
    }
    Ok(out)
}
