//! One-step matrices for every algorithm, and the oracles that rebuild the
//! six temporal finite element schemes from their weak forms.
//!
//! Each scheme is written as `A1·x_n = A0·x_{n−1} + B·(f_{n−1}, f_n, ĵ_{n−1})`.
//! The extended Hamilton schemes carry `(u, p, J)`, the convolved-action
//! schemes `(u, J)`, and the Newmark references `(u, v, ü)`.

use alloc::vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::model::{check_step, OscillatorParams};
use crate::scalar::Scalar;

pub mod basis;
pub mod derive;
pub mod published;
pub mod semiconv;
pub mod validate;

pub use basis::{Poly, PolyBasis};
pub use derive::{derive_ehp_matrices, derive_matrices_exact, derive_mcap_matrices, Derivation};
pub use semiconv::{semiconv_basis_matrix, semiconv_monomials};
pub use validate::{validate_printed_matrices, ValidationReport, ValidationRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AlgorithmId {
    EhpJquad,
    EhpUquad,
    EhpUJquad,
    McapJquad,
    McapUquad,
    McapUJquad,
    NewmarkCAA,
    NewmarkLinear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Formalism {
    Ehp,
    Mcap,
    Newmark,
}

/// Which field is interpolated quadratically in time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interpolation {
    /// `J` quadratic, `u` linear.
    Jquad,
    /// `u` quadratic, `J` linear.
    Uquad,
    /// Both quadratic.
    UJquad,
}

impl AlgorithmId {
    pub const ALL: [AlgorithmId; 8] = [
        AlgorithmId::EhpJquad,
        AlgorithmId::EhpUquad,
        AlgorithmId::EhpUJquad,
        AlgorithmId::McapJquad,
        AlgorithmId::McapUquad,
        AlgorithmId::McapUJquad,
        AlgorithmId::NewmarkCAA,
        AlgorithmId::NewmarkLinear,
    ];

    /// The six temporal finite element schemes.
    pub const TFEM: [AlgorithmId; 6] = [
        AlgorithmId::EhpJquad,
        AlgorithmId::EhpUquad,
        AlgorithmId::EhpUJquad,
        AlgorithmId::McapJquad,
        AlgorithmId::McapUquad,
        AlgorithmId::McapUJquad,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AlgorithmId::EhpJquad => "EhpJquad",
            AlgorithmId::EhpUquad => "EhpUquad",
            AlgorithmId::EhpUJquad => "EhpUJquad",
            AlgorithmId::McapJquad => "McapJquad",
            AlgorithmId::McapUquad => "McapUquad",
            AlgorithmId::McapUJquad => "McapUJquad",
            AlgorithmId::NewmarkCAA => "NewmarkCAA",
            AlgorithmId::NewmarkLinear => "NewmarkLinear",
        }
    }

    pub fn formalism(self) -> Formalism {
        match self {
            AlgorithmId::EhpJquad | AlgorithmId::EhpUquad | AlgorithmId::EhpUJquad => Formalism::Ehp,
            AlgorithmId::McapJquad | AlgorithmId::McapUquad | AlgorithmId::McapUJquad => {
                Formalism::Mcap
            }
            AlgorithmId::NewmarkCAA | AlgorithmId::NewmarkLinear => Formalism::Newmark,
        }
    }

    pub fn interpolation(self) -> Option<Interpolation> {
        match self {
            AlgorithmId::EhpJquad | AlgorithmId::McapJquad => Some(Interpolation::Jquad),
            AlgorithmId::EhpUquad | AlgorithmId::McapUquad => Some(Interpolation::Uquad),
            AlgorithmId::EhpUJquad | AlgorithmId::McapUJquad => Some(Interpolation::UJquad),
            _ => None,
        }
    }

    pub fn is_tfem(self) -> bool {
        self.formalism() != Formalism::Newmark
    }

    pub fn dim(self) -> usize {
        match self.formalism() {
            Formalism::Mcap => 2,
            Formalism::Ehp | Formalism::Newmark => 3,
        }
    }

    /// Same-name counterpart in the other formalism.
    pub fn counterpart(self) -> Option<AlgorithmId> {
        Some(match self {
            AlgorithmId::EhpJquad => AlgorithmId::McapJquad,
            AlgorithmId::EhpUquad => AlgorithmId::McapUquad,
            AlgorithmId::EhpUJquad => AlgorithmId::McapUJquad,
            AlgorithmId::McapJquad => AlgorithmId::EhpJquad,
            AlgorithmId::McapUquad => AlgorithmId::EhpUquad,
            AlgorithmId::McapUJquad => AlgorithmId::EhpUJquad,
            _ => return None,
        })
    }
}

impl fmt::Display for AlgorithmId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownAlgorithm;

impl fmt::Display for UnknownAlgorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("unknown algorithm; valid names: ")?;
        for (i, alg) in AlgorithmId::ALL.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str(alg.name())?;
        }
        Ok(())
    }
}

impl FromStr for AlgorithmId {
    type Err = UnknownAlgorithm;

    /// Case-insensitive; `-` and `_` are ignored.
    fn from_str(s: &str) -> core::result::Result<Self, Self::Err> {
        let wanted = s.chars().filter(|c| *c != '-' && *c != '_');
        AlgorithmId::ALL
            .into_iter()
            .find(|alg| {
                alg.name()
                    .chars()
                    .map(|c| c.to_ascii_lowercase())
                    .eq(wanted.clone().map(|c| c.to_ascii_lowercase()))
            })
            .ok_or(UnknownAlgorithm)
    }
}

/// Scalars of `(m, a, h)` that recur throughout the step matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct StepConstants<T> {
    /// `12·m·a − h²`
    pub x: T,
    /// `24·m·a + h²`
    pub y: T,
    /// `6·m·a + h²`
    pub z: T,
}

impl<T: Scalar> StepConstants<T> {
    pub fn new(m: &T, a: &T, h: &T) -> Self {
        let ma = m.clone() * a.clone();
        let h2 = h.clone() * h.clone();
        StepConstants {
            x: T::from_i64(12) * ma.clone() - h2.clone(),
            y: T::from_i64(24) * ma.clone() + h2.clone(),
            z: T::from_i64(6) * ma + h2,
        }
    }

    /// Residual of `−Y + 4X = Y − 6h²` (zero in exact arithmetic).
    pub fn reversal_identity_residual(&self, h: &T) -> T {
        let lhs = -self.y.clone() + T::from_i64(4) * self.x.clone();
        let rhs = self.y.clone() - T::from_i64(6) * h.clone() * h.clone();
        lhs - rhs
    }
}

/// Physical coefficients in a chosen scalar field.
#[derive(Debug, Clone, PartialEq)]
pub struct Coefficients<T> {
    pub m: T,
    pub c: T,
    pub a: T,
    pub h: T,
}

impl Coefficients<f64> {
    pub fn from_params(params: &OscillatorParams, h: f64) -> Self {
        Coefficients {
            m: params.m(),
            c: params.c(),
            a: params.a(),
            h,
        }
    }
}

impl<T: Scalar> Coefficients<T> {
    pub fn constants(&self) -> StepConstants<T> {
        StepConstants::new(&self.m, &self.a, &self.h)
    }

    pub fn to_f64(&self) -> Coefficients<f64> {
        Coefficients {
            m: self.m.to_f64(),
            c: self.c.to_f64(),
            a: self.a.to_f64(),
            h: self.h.to_f64(),
        }
    }
}

/// One-step recurrence `A1·x_n = A0·x_{n−1} + B·(f_{n−1}, f_n, ĵ_{n−1})`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepSystem<T> {
    pub alg: AlgorithmId,
    pub a1: Mat<T>,
    pub a0: Mat<T>,
    pub b: Mat<T>,
}

pub type StepMatrices = StepSystem<f64>;

impl<T: Scalar> StepSystem<T> {
    pub fn dim(&self) -> usize {
        self.a1.rows()
    }

    pub fn to_f64(&self) -> StepMatrices {
        StepSystem {
            alg: self.alg,
            a1: self.a1.to_f64(),
            a0: self.a0.to_f64(),
            b: self.b.to_f64(),
        }
    }

    /// Row-mixing applied to all three matrices; leaves the recurrence intact.
    pub(crate) fn premultiply(&self, t: &Mat<T>) -> Self {
        StepSystem {
            alg: self.alg,
            a1: t.mul(&self.a1),
            a0: t.mul(&self.a0),
            b: t.mul(&self.b),
        }
    }

    /// Free-vibration map `A1⁻¹·A0`, or `None` when `A1` is singular.
    pub fn amplification(&self) -> Option<Mat<T>> {
        self.a1.solve(&self.a0)
    }

    /// Load map `A1⁻¹·B`.
    pub fn load_map(&self) -> Option<Mat<T>> {
        self.a1.solve(&self.b)
    }
}

/// Step matrices for `alg` at step `h > 0`.
///
/// The temporal finite element schemes use the closed-form condensed
/// matrices, with the entries that disagree with the weak-form derivation
/// replaced by their derived values (see [`published::ERRATA`]).
pub fn build_step_matrices(alg: AlgorithmId, params: &OscillatorParams, h: f64) -> Result<StepMatrices> {
    check_step(h)?;
    Ok(build_signed(alg, &Coefficients::from_params(params, h)))
}

/// Same as [`build_step_matrices`] but in any field and for either sign of
/// `h` (negative steps are used by the reversibility check).
pub fn build_signed<T: Scalar>(alg: AlgorithmId, k: &Coefficients<T>) -> StepSystem<T> {
    match alg.formalism() {
        Formalism::Newmark => newmark(alg, k),
        _ => published::corrected(alg, k).expect("finite element algorithm has a transcription"),
    }
}

fn newmark<T: Scalar>(alg: AlgorithmId, k: &Coefficients<T>) -> StepSystem<T> {
    let (beta, gamma) = match alg {
        AlgorithmId::NewmarkCAA => (T::ratio(1, 4), T::ratio(1, 2)),
        _ => (T::ratio(1, 6), T::ratio(1, 2)),
    };
    let h = k.h.clone();
    let h2 = h.clone() * h.clone();
    let half = T::ratio(1, 2);
    let stiffness = T::one() / k.a.clone();
    let a1 = Mat::from_rows(vec![
        vec![T::one(), T::zero(), -(beta.clone() * h2.clone())],
        vec![T::zero(), T::one(), -(gamma.clone() * h.clone())],
        vec![stiffness, k.c.clone(), k.m.clone()],
    ]);
    let a0 = Mat::from_rows(vec![
        vec![T::one(), h.clone(), (half - beta) * h2],
        vec![T::zero(), T::one(), (T::one() - gamma) * h],
        vec![T::zero(), T::zero(), T::zero()],
    ]);
    let b = Mat::from_rows(vec![
        vec![T::zero(), T::zero(), T::zero()],
        vec![T::zero(), T::zero(), T::zero()],
        vec![T::zero(), T::one(), T::zero()],
    ]);
    StepSystem { alg, a1, a0, b }
}

pub(crate) fn require_formalism(alg: AlgorithmId, formalism: Formalism) -> Result<()> {
    if !alg.is_tfem() {
        return Err(Error::NotFiniteElement { alg });
    }
    if alg.formalism() != formalism {
        return Err(Error::WrongFormalism { alg });
    }
    Ok(())
}
