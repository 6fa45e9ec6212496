//! Stability and dispersion of the free-vibration map `A = A1⁻¹·A0`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::elements::{build_signed, AlgorithmId, Coefficients, Formalism, Interpolation};
use crate::error::{Error, Result};
use crate::linalg::{LuFactor, Mat};
use crate::model::{check_step, OscillatorParams};

/// Imaginary parts below this are treated as real roots.
pub const IMAG_TOLERANCE: f64 = 1e-12;

fn amplification_from(alg: AlgorithmId, params: &OscillatorParams, h: f64) -> Result<Mat<f64>> {
    let sys = build_signed(alg, &Coefficients::from_params(params, h));
    let lu = LuFactor::new(&sys.a1).ok_or(Error::SingularLeftMatrix { alg, h })?;
    Ok(lu.solve_mat(&sys.a0))
}

/// `A1⁻¹·A0` for `alg` at step `h`. With `damped = false` the dashpot is
/// removed first (the conservative case).
pub fn amplification_matrix(alg: AlgorithmId, params: &OscillatorParams, h: f64, damped: bool) -> Result<Mat<f64>> {
    check_step(h)?;
    let p = if damped { *params } else { params.undamped() };
    amplification_from(alg, &p, h)
}

/// Eigenvalues of a 2×2 or 3×3 matrix from its characteristic polynomial.
pub fn eigenvalues(a: &Mat<f64>) -> Vec<Complex64> {
    assert_eq!(a.rows(), a.cols(), "eigenvalues need a square matrix");
    match a.rows() {
        1 => vec![Complex64::new(a[(0, 0)], 0.0)],
        2 => {
            let (r0, r1) = quadratic_roots(-a.trace(), a.determinant());
            vec![r0, r1]
        }
        3 => {
            let c2 = a.trace();
            let c1 = a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)] + a[(0, 0)] * a[(2, 2)]
                - a[(0, 2)] * a[(2, 0)]
                + a[(1, 1)] * a[(2, 2)]
                - a[(1, 2)] * a[(2, 1)];
            let c0 = a.determinant();
            cubic_roots(-c2, c1, -c0)
        }
        n => panic!("eigenvalues implemented for dimension ≤ 3, got {n}"),
    }
}

/// Roots of `λ² + b·λ + c`, conjugate pair first-positive when complex.
fn quadratic_roots(b: f64, c: f64) -> (Complex64, Complex64) {
    let disc = b * b - 4.0 * c;
    if disc < 0.0 {
        let re = -0.5 * b;
        let im = 0.5 * libm::sqrt(-disc);
        (Complex64::new(re, im), Complex64::new(re, -im))
    } else {
        let s = libm::sqrt(disc);
        let q = -0.5 * (b + if b >= 0.0 { s } else { -s });
        if q == 0.0 {
            (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))
        } else {
            (Complex64::new(q, 0.0), Complex64::new(c / q, 0.0))
        }
    }
}

/// Roots of `λ³ + b·λ² + c·λ + d`.
fn cubic_roots(b: f64, c: f64, d: f64) -> Vec<Complex64> {
    let p = |x: f64| ((x + b) * x + c) * x + d;
    // A real root lies inside the Cauchy bound; bisect to full precision.
    let bound = 1.0 + b.abs().max(c.abs()).max(d.abs());
    let (mut lo, mut hi) = (-bound, bound);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if p(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let r = if p(lo).abs() <= p(hi).abs() { lo } else { hi };
    // Deflate: (λ − r)(λ² + b1·λ + b0).
    let b1 = b + r;
    let b0 = c + r * b1;
    let (q0, q1) = quadratic_roots(b1, b0);
    let mut roots = vec![Complex64::new(r, 0.0), q0, q1];
    let pc = |z: Complex64| ((z + b) * z + c) * z + d;
    let dpc = |z: Complex64| (3.0 * z + 2.0 * b) * z + c;
    for z in &mut roots {
        for _ in 0..3 {
            let dz = dpc(*z);
            if dz.norm() == 0.0 {
                break;
            }
            let next = *z - pc(*z) / dz;
            if pc(next).norm() < pc(*z).norm() {
                *z = next;
            } else {
                break;
            }
        }
    }
    // Keep conjugate pairs exactly conjugate after polishing.
    if roots[1].im.abs() > 0.0 {
        roots[2] = roots[1].conj();
    }
    roots
}

/// Closed-form eigenvalues of the conservative map.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormEigen {
    pub values: Vec<Complex64>,
    /// False when `12·m·a < h²` for the J/U-quadratic schemes: the pair
    /// formula is continued to its real roots.
    pub complex_regime: bool,
}

pub fn closed_form_eigenvalues(alg: AlgorithmId, m: f64, a: f64, h: f64) -> Result<ClosedFormEigen> {
    let interp = alg.interpolation().ok_or(Error::NotFiniteElement { alg })?;
    let ma = m * a;
    let h2 = h * h;
    let (pair, complex_regime) = match interp {
        Interpolation::Jquad | Interpolation::Uquad => {
            let den = 6.0 * ma + h2;
            let re = 6.0 * ma - 2.0 * h2;
            let disc = 36.0 * h2 * ma - 3.0 * h2 * h2;
            if disc >= 0.0 {
                let im = libm::sqrt(disc);
                ([Complex64::new(re / den, im / den), Complex64::new(re / den, -im / den)], true)
            } else {
                let s = libm::sqrt(-disc);
                (
                    [Complex64::new((re + s) / den, 0.0), Complex64::new((re - s) / den, 0.0)],
                    false,
                )
            }
        }
        Interpolation::UJquad => {
            let den = h2 * h2 + 12.0 * ma * h2 + 144.0 * ma * ma;
            let re = h2 * h2 - 60.0 * ma * h2 + 144.0 * ma * ma;
            let im = 12.0 * h * (12.0 * ma - h2) * libm::sqrt(ma);
            ([Complex64::new(re / den, im / den), Complex64::new(re / den, -im / den)], true)
        }
    };
    let mut values = Vec::with_capacity(3);
    if alg.formalism() == Formalism::Ehp {
        values.push(Complex64::new(1.0, 0.0));
    }
    values.extend(pair);
    Ok(ClosedFormEigen { values, complex_regime })
}

/// Principal oscillatory eigenvalue: the one with the largest positive
/// imaginary part.
pub fn principal_pair(eigs: &[Complex64]) -> Option<Complex64> {
    eigs.iter()
        .filter(|z| z.im > IMAG_TOLERANCE)
        .copied()
        .max_by(|a, b| a.im.total_cmp(&b.im))
}

pub fn spectral_radius(eigs: &[Complex64]) -> f64 {
    eigs.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Period elongation and amplitude decay.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dispersion {
    /// `(T̄ − Tn)/Tn` as a ratio.
    pub pe: f64,
    /// `1 − ρ^{Tn/h}`, amplitude lost per natural period.
    pub ad: f64,
}

/// Dispersion of a map with eigenvalues `eigs` at step ratio `h/Tn`.
pub fn dispersion_from_eigenvalues(eigs: &[Complex64], h_over_tn: f64) -> Result<Dispersion> {
    let z = principal_pair(eigs).ok_or(Error::NoOscillatoryPair)?;
    let omega = libm::atan2(z.im, z.re);
    let period_ratio = 2.0 * PI * h_over_tn / omega;
    Ok(Dispersion {
        pe: period_ratio - 1.0,
        ad: 1.0 - libm::pow(z.norm(), 1.0 / h_over_tn),
    })
}

/// Dispersion of the conservative scheme on a unit-period oscillator.
pub fn period_elongation(alg: AlgorithmId, h_over_tn: f64) -> Result<Dispersion> {
    let params = OscillatorParams::unit_period();
    let a = amplification_matrix(alg, &params, h_over_tn * params.natural_period(), false)?;
    dispersion_from_eigenvalues(&eigenvalues(&a), h_over_tn)
}

/// `‖A(h)·A(−h) − I‖∞` for the conservative map.
pub fn check_time_reversibility(alg: AlgorithmId, params: &OscillatorParams, h: f64) -> Result<f64> {
    check_step(h)?;
    let p = params.undamped();
    let forward = amplification_from(alg, &p, h)?;
    let backward = amplification_from(alg, &p, -h)?;
    Ok(forward.mul(&backward).sub(&Mat::identity(forward.rows())).norm_inf())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymplecticCheck {
    pub det: f64,
    /// `max | |λ| − 1 |` over all eigenvalues.
    pub max_modulus_deviation: f64,
    /// Whether an oscillatory pair exists.
    pub complex_regime: bool,
}

/// Determinant and eigenvalue moduli of the conservative map.
pub fn check_symplectic(alg: AlgorithmId, params: &OscillatorParams, h: f64) -> Result<SymplecticCheck> {
    let a = amplification_matrix(alg, params, h, false)?;
    let eigs = eigenvalues(&a);
    Ok(SymplecticCheck {
        det: a.determinant(),
        max_modulus_deviation: eigs.iter().map(|z| (z.norm() - 1.0).abs()).fold(0.0, f64::max),
        complex_regime: principal_pair(&eigs).is_some(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// An oscillatory conjugate pair exists.
    ComplexPair,
    /// All eigenvalues are real.
    RealRoots,
}

impl Regime {
    pub fn label(self) -> &'static str {
        match self {
            Regime::ComplexPair => "complex-pair",
            Regime::RealRoots => "real-roots",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralReport {
    pub alg: AlgorithmId,
    pub h_over_tn: f64,
    pub damped: bool,
    pub a: Mat<f64>,
    pub eigenvalues: Vec<Complex64>,
    pub rho: f64,
    pub pe: Option<f64>,
    pub ad: Option<f64>,
    /// Computed on the conservative map regardless of `damped`.
    pub reversibility_residual: Option<f64>,
    pub det: f64,
    pub regime: Regime,
    /// Largest relative gap to the closed-form eigenvalues, when defined.
    pub closed_form_gap: Option<f64>,
}

/// Spectral analysis of one (algorithm, `h/Tn`) pair.
pub fn spectral_report(alg: AlgorithmId, params: &OscillatorParams, h_over_tn: f64, damped: bool) -> Result<SpectralReport> {
    let h = h_over_tn * params.natural_period();
    let a = amplification_matrix(alg, params, h, damped)?;
    let eigs = eigenvalues(&a);
    let dispersion = dispersion_from_eigenvalues(&eigs, h_over_tn).ok();
    let closed_form_gap = if !damped || params.c() == 0.0 {
        closed_form_eigenvalues(alg, params.m(), params.a(), h)
            .ok()
            .map(|cf| eigen_gap(&eigs, &cf.values))
    } else {
        None
    };
    Ok(SpectralReport {
        alg,
        h_over_tn,
        damped,
        rho: spectral_radius(&eigs),
        pe: dispersion.map(|d| d.pe),
        ad: dispersion.map(|d| d.ad),
        reversibility_residual: check_time_reversibility(alg, params, h).ok(),
        det: a.determinant(),
        regime: if principal_pair(&eigs).is_some() {
            Regime::ComplexPair
        } else {
            Regime::RealRoots
        },
        closed_form_gap,
        eigenvalues: eigs,
        a,
    })
}

/// Largest relative distance from each expected eigenvalue to its nearest
/// computed one.
pub fn eigen_gap(computed: &[Complex64], expected: &[Complex64]) -> f64 {
    expected
        .iter()
        .map(|e| {
            let nearest = computed.iter().map(|c| (c - e).norm()).fold(f64::INFINITY, f64::min);
            nearest / e.norm().max(f64::MIN_POSITIVE)
        })
        .fold(0.0, f64::max)
}

/// Reports over a grid of `h/Tn` values.
pub fn spectral_radius_sweep(
    alg: AlgorithmId,
    params: &OscillatorParams,
    grid: &[f64],
    damped: bool,
) -> Result<Vec<SpectralReport>> {
    grid.iter()
        .map(|&x| {
            if !(x.is_finite() && x > 0.0) {
                return Err(Error::InvalidStep(x));
            }
            spectral_report(alg, params, x, damped)
        })
        .collect()
}

/// Logarithmic `h/Tn` grid from 0.01 to 10 (60 points) plus the Newmark
/// linear-acceleration stability limit and the J/U-quadratic regime edge
/// `√12/(2π)`, sorted ascending.
pub fn default_sweep_grid() -> Vec<f64> {
    let mut grid: Vec<f64> = (0..60)
        .map(|i| libm::pow(10.0, -2.0 + 3.0 * i as f64 / 59.0))
        .collect();
    grid.push(0.551);
    grid.push(libm::sqrt(12.0) / (2.0 * PI));
    grid.sort_by(f64::total_cmp);
    grid
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> OscillatorParams {
        OscillatorParams::new(1.0, 0.0, 1.0).unwrap()
    }

    #[test]
    fn ehp_jquad_unit_eigenvalues() {
        let a = amplification_matrix(AlgorithmId::EhpJquad, &unit(), 1.0, false).unwrap();
        let eigs = eigenvalues(&a);
        let expected = [
            Complex64::new(1.0, 0.0),
            Complex64::new(4.0 / 7.0, libm::sqrt(33.0) / 7.0),
            Complex64::new(4.0 / 7.0, -libm::sqrt(33.0) / 7.0),
        ];
        assert!(eigen_gap(&eigs, &expected) < 1e-13, "{eigs:?}");
    }

    #[test]
    fn closed_forms_unit_case() {
        let cf = closed_form_eigenvalues(AlgorithmId::McapUJquad, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(cf.values[0], Complex64::new(85.0 / 157.0, 132.0 / 157.0));
        let cf = closed_form_eigenvalues(AlgorithmId::EhpUquad, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(cf.values[0], Complex64::new(1.0, 0.0));
        assert!((cf.values[1] - Complex64::new(4.0 / 7.0, libm::sqrt(33.0) / 7.0)).norm() < 1e-15);
        let cf = closed_form_eigenvalues(AlgorithmId::McapJquad, 1.0, 1.0, 4.0).unwrap();
        assert!(!cf.complex_regime);
        assert!((cf.values[0].re * cf.values[1].re - 1.0).abs() < 1e-14);
        assert!(closed_form_eigenvalues(AlgorithmId::NewmarkCAA, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn damped_flag_consistency() {
        let p = OscillatorParams::new(1.0, 0.3, 0.5).unwrap();
        let a = amplification_matrix(AlgorithmId::McapUquad, &p, 0.2, false).unwrap();
        let b = amplification_matrix(AlgorithmId::McapUquad, &p.undamped(), 0.2, true).unwrap();
        assert!(a.sub(&b).max_abs() < 1e-14);
    }

    #[test]
    fn cubic_with_repeated_structure() {
        let a = Mat::from_rows(vec![vec![2.0, 0.0, 0.0], vec![0.0, 0.0, -1.0], vec![0.0, 1.0, 0.0]]);
        let eigs = eigenvalues(&a);
        let expected = [Complex64::new(2.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(0.0, -1.0)];
        assert!(eigen_gap(&eigs, &expected) < 1e-15);
    }

    #[test]
    fn newmark_linear_unstable_past_limit() {
        let p = OscillatorParams::unit_period();
        let r = spectral_report(AlgorithmId::NewmarkLinear, &p, 0.6, false).unwrap();
        assert!(r.rho > 1.0);
        let r = spectral_report(AlgorithmId::NewmarkLinear, &p, 0.5, false).unwrap();
        assert!((r.rho - 1.0).abs() < 1e-12);
    }

    #[test]
    fn small_step_dispersion_vanishes() {
        for alg in AlgorithmId::ALL {
            let d = period_elongation(alg, 1e-4).unwrap();
            assert!(d.pe.abs() < 1e-6, "{alg}: {}", d.pe);
        }
    }

    #[test]
    fn no_pair_is_an_error() {
        assert_eq!(
            dispersion_from_eigenvalues(&[Complex64::new(0.5, 0.0), Complex64::new(2.0, 0.0)], 1.0),
            Err(Error::NoOscillatoryPair)
        );
    }

    #[test]
    fn grid_shape() {
        let g = default_sweep_grid();
        assert_eq!(g.len(), 62);
        assert!((g[0] - 0.01).abs() < 1e-15 && (g[61] - 10.0).abs() < 1e-12);
        assert!(g.windows(2).all(|w| w[0] <= w[1]));
    }
}
