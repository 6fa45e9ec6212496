//! Derivation oracles: rebuild the condensed step matrices from the element
//! weak forms.
//!
//! Every weak-form row is a linear form over the element unknowns and data,
//! stored as a coefficient vector indexed by [`Slot`]. Midpoint unknowns are
//! eliminated with their own test rows (static condensation), the surviving
//! rows are split into `(A1, A0, B)`, and a fixed row recombination brings
//! them to the published layout.

use alloc::vec;
use alloc::vec::Vec;

use crate::elements::basis::{ExactIntegrator, GaussLegendre3, Integrator, Poly, PolyBasis};
use crate::elements::semiconv::{conv_poly, semiconv_basis_matrix};
use crate::elements::{require_formalism, AlgorithmId, Coefficients, Formalism, Interpolation, StepMatrices, StepSystem};
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::model::{check_step, OscillatorParams};
use crate::scalar::{rational_from_f64, Rational, Scalar};

/// Positions of unknowns and data in a weak-form row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(usize)]
pub enum Slot {
    UStart,
    UEnd,
    UMid,
    JStart,
    JEnd,
    JMid,
    PStart,
    PEnd,
    FStart,
    FEnd,
    ImpulseStart,
}

pub const SLOTS: usize = 11;

const U_SLOTS: [Slot; 3] = [Slot::UStart, Slot::UEnd, Slot::UMid];
const J_SLOTS: [Slot; 3] = [Slot::JStart, Slot::JEnd, Slot::JMid];
const LOAD_SLOTS: [Slot; 3] = [Slot::FStart, Slot::FEnd, Slot::ImpulseStart];

type Row<T> = Vec<T>;

fn add<T: Scalar>(row: &mut Row<T>, slot: Slot, v: T) {
    let i = slot as usize;
    row[i] = row[i].clone() + v;
}

/// Condensed step system plus what is needed to recover the midpoint values.
#[derive(Debug, Clone, PartialEq)]
pub struct Derivation<T> {
    pub system: StepSystem<T>,
    /// For each eliminated midpoint unknown, its value as a linear form over
    /// the remaining slots (zero on eliminated slots).
    pub midpoints: Vec<(Slot, Row<T>)>,
    /// Extended-Hamilton schemes only: sum of all `J`-test rows before
    /// condensation. Partition of unity makes it vanish, which is why the
    /// start-node `J` row can be dropped.
    pub j_row_sum: Option<Row<T>>,
}

/// Recovered element-interior values.
#[derive(Debug, Clone, PartialEq)]
pub struct Midpoints<T> {
    pub u_mid: Option<T>,
    pub j_mid: Option<T>,
}

impl<T: Scalar> Derivation<T> {
    /// Midpoint values from the states at both ends and the step loads.
    pub fn recover_midpoints(&self, start: &[T], end: &[T], loads: &[T; 3]) -> Result<Midpoints<T>> {
        let alg = self.system.alg;
        let dim = alg.dim();
        for got in [start.len(), end.len()] {
            if got != dim {
                return Err(Error::Dimension { expected: dim, got });
            }
        }
        let mut values: Vec<T> = vec![T::zero(); SLOTS];
        let (start_slots, end_slots) = state_slots(alg.formalism());
        for (s, v) in start_slots.iter().zip(start) {
            values[*s as usize] = v.clone();
        }
        for (s, v) in end_slots.iter().zip(end) {
            values[*s as usize] = v.clone();
        }
        for (s, v) in LOAD_SLOTS.iter().zip(loads) {
            values[*s as usize] = v.clone();
        }
        let mut out = Midpoints {
            u_mid: None,
            j_mid: None,
        };
        for (slot, form) in &self.midpoints {
            let v = form
                .iter()
                .zip(&values)
                .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone());
            match slot {
                Slot::UMid => out.u_mid = Some(v),
                _ => out.j_mid = Some(v),
            }
        }
        Ok(out)
    }
}

fn state_slots(formalism: Formalism) -> (&'static [Slot], &'static [Slot]) {
    match formalism {
        Formalism::Mcap => (&[Slot::UStart, Slot::JStart], &[Slot::UEnd, Slot::JEnd]),
        _ => (
            &[Slot::UStart, Slot::PStart, Slot::JStart],
            &[Slot::UEnd, Slot::PEnd, Slot::JEnd],
        ),
    }
}

struct Rows<T> {
    u: Vec<Row<T>>,
    j: Vec<Row<T>>,
}

fn ehp_rows<T: Scalar, I: Integrator<T>>(
    k: &Coefficients<T>,
    interp: Interpolation,
    integ: &I,
) -> Rows<T> {
    let basis = PolyBasis::new(&k.h);
    let (u_basis, j_basis) = families(&basis, interp);
    let du: Vec<Poly<T>> = u_basis.iter().map(Poly::derivative).collect();
    let dj: Vec<Poly<T>> = j_basis.iter().map(Poly::derivative).collect();
    let int = |p: Poly<T>| integ.integrate(&p, &k.h);
    let zero = T::zero();

    let u = u_basis
        .iter()
        .zip(&du)
        .map(|(phi, dphi)| {
            let mut row = vec![T::zero(); SLOTS];
            for (q, dphi_q) in du.iter().enumerate() {
                let v = -k.m.clone() * int(dphi_q.mul(dphi)) + k.c.clone() * int(dphi_q.mul(phi));
                add(&mut row, U_SLOTS[q], v);
            }
            for (q, dpsi_q) in dj.iter().enumerate() {
                add(&mut row, J_SLOTS[q], int(dpsi_q.mul(phi)));
            }
            for (j, l) in basis.linear.iter().enumerate() {
                add(&mut row, LOAD_SLOTS[j], -int(l.mul(phi)));
            }
            add(&mut row, Slot::PEnd, phi.eval(&k.h));
            add(&mut row, Slot::PStart, -phi.eval(&zero));
            row
        })
        .collect();

    let j = dj
        .iter()
        .map(|dpsi| {
            let mut row = vec![T::zero(); SLOTS];
            for (q, dpsi_q) in dj.iter().enumerate() {
                add(&mut row, J_SLOTS[q], -k.a.clone() * int(dpsi_q.mul(dpsi)));
            }
            for (q, phi_q) in u_basis.iter().enumerate() {
                add(&mut row, U_SLOTS[q], int(phi_q.mul(dpsi)));
            }
            row
        })
        .collect();
    Rows { u, j }
}

fn mcap_rows<T: Scalar>(k: &Coefficients<T>, interp: Interpolation) -> Rows<T> {
    let h = &k.h;
    let basis = PolyBasis::new(h);
    let (u_basis, j_basis) = families(&basis, interp);
    let du: Vec<Poly<T>> = u_basis.iter().map(Poly::derivative).collect();
    let dj: Vec<Poly<T>> = j_basis.iter().map(Poly::derivative).collect();
    let uu = semiconv_basis_matrix(u_basis, u_basis, h);
    let uj = semiconv_basis_matrix(u_basis, j_basis, h);
    let ju = semiconv_basis_matrix(j_basis, u_basis, h);

    let u = (0..u_basis.len())
        .map(|i| {
            let mut row = vec![T::zero(); SLOTS];
            for q in 0..u_basis.len() {
                let v = k.m.clone() * conv_poly(&du[i], &du[q], h) + k.c.clone() * uu[(i, q)].clone();
                add(&mut row, U_SLOTS[q], v);
            }
            for q in 0..j_basis.len() {
                add(&mut row, J_SLOTS[q], uj[(i, q)].clone());
            }
            for (j, l) in basis.linear.iter().enumerate() {
                add(&mut row, LOAD_SLOTS[j], -conv_poly(&u_basis[i], l, h));
            }
            add(&mut row, Slot::ImpulseStart, -u_basis[i].eval(h));
            row
        })
        .collect();

    let j = (0..j_basis.len())
        .map(|i| {
            let mut row = vec![T::zero(); SLOTS];
            for q in 0..j_basis.len() {
                add(&mut row, J_SLOTS[q], -k.a.clone() * conv_poly(&dj[i], &dj[q], h));
            }
            for q in 0..u_basis.len() {
                add(&mut row, U_SLOTS[q], ju[(i, q)].clone());
            }
            row
        })
        .collect();
    Rows { u, j }
}

fn families<T: Scalar>(basis: &PolyBasis<T>, interp: Interpolation) -> (&[Poly<T>], &[Poly<T>]) {
    match interp {
        Interpolation::Jquad => (basis.family(false), basis.family(true)),
        Interpolation::Uquad => (basis.family(true), basis.family(false)),
        Interpolation::UJquad => (basis.family(true), basis.family(true)),
    }
}

/// Row recombination that maps the condensed rows onto the published layout.
pub fn presentation_transform<T: Scalar>(alg: AlgorithmId, k: &Coefficients<T>) -> Mat<T> {
    let four_m_h = T::from_i64(4) * k.m.clone() / k.h.clone();
    let eight_m_h = T::from_i64(8) * k.m.clone() / k.h.clone();
    match alg {
        AlgorithmId::EhpJquad => {
            let mut t = Mat::identity(3);
            t[(2, 2)] = T::from_i64(2);
            t
        }
        AlgorithmId::EhpUquad | AlgorithmId::EhpUJquad => Mat::from_rows(vec![
            vec![T::one(), T::zero(), -k.c.clone() - four_m_h.clone()],
            vec![T::zero(), T::one(), k.c.clone() - four_m_h],
            vec![T::zero(), T::zero(), eight_m_h],
        ]),
        AlgorithmId::McapUquad => Mat::from_rows(vec![
            vec![T::one(), -k.c.clone() - four_m_h],
            vec![T::zero(), eight_m_h],
        ]),
        _ => Mat::identity(alg.dim()),
    }
}

/// Assembles, condenses and lays out the step system of a finite element algorithm.
pub fn derive_with<T: Scalar, I: Integrator<T>>(
    alg: AlgorithmId,
    k: &Coefficients<T>,
    integ: &I,
) -> Result<Derivation<T>> {
    let interp = alg.interpolation().ok_or(Error::NotFiniteElement { alg })?;
    let formalism = alg.formalism();
    let rows = match formalism {
        Formalism::Ehp => ehp_rows(k, interp, integ),
        _ => mcap_rows(k, interp),
    };

    let mut internal_rows = Vec::new();
    let mut internal_slots = Vec::new();
    if rows.u.len() == 3 {
        internal_rows.push(rows.u[2].clone());
        internal_slots.push(Slot::UMid);
    }
    if rows.j.len() == 3 {
        internal_rows.push(rows.j[2].clone());
        internal_slots.push(Slot::JMid);
    }
    // Extended Hamilton: both u-end rows survive, the start J row is the
    // redundant one. Convolved action: start-node rows vanish with the known
    // initial values.
    let kept: Vec<Row<T>> = match formalism {
        Formalism::Ehp => vec![rows.u[0].clone(), rows.u[1].clone(), rows.j[1].clone()],
        _ => vec![rows.u[1].clone(), rows.j[1].clone()],
    };

    let j_row_sum = (formalism == Formalism::Ehp).then(|| {
        rows.j.iter().fold(vec![T::zero(); SLOTS], |acc, r| {
            acc.iter().zip(r).map(|(a, b)| a.clone() + b.clone()).collect()
        })
    });

    let (kept, midpoints) = condense(kept, &internal_rows, &internal_slots).ok_or_else(|| {
        Error::SingularCondensation {
            m: k.m.to_f64(),
            a: k.a.to_f64(),
            h: k.h.to_f64(),
        }
    })?;

    let (start_slots, end_slots) = state_slots(formalism);
    let pick = |slots: &[Slot], sign: bool| {
        Mat::from_rows(
            kept.iter()
                .map(|r| {
                    slots
                        .iter()
                        .map(|s| if sign { r[*s as usize].clone() } else { -r[*s as usize].clone() })
                        .collect()
                })
                .collect(),
        )
    };
    let raw = StepSystem {
        alg,
        a1: pick(end_slots, true),
        a0: pick(start_slots, false),
        b: pick(&LOAD_SLOTS, false),
    };
    Ok(Derivation {
        system: raw.premultiply(&presentation_transform(alg, k)),
        midpoints,
        j_row_sum,
    })
}

/// Eliminates the internal slots from the kept rows. Returns `None` on a
/// singular internal block.
#[allow(clippy::type_complexity)]
fn condense<T: Scalar>(
    kept: Vec<Row<T>>,
    internal_rows: &[Row<T>],
    internal_slots: &[Slot],
) -> Option<(Vec<Row<T>>, Vec<(Slot, Row<T>)>)> {
    if internal_rows.is_empty() {
        return Some((kept, Vec::new()));
    }
    let n = internal_rows.len();
    let block = Mat::from_rows(
        internal_rows
            .iter()
            .map(|r| internal_slots.iter().map(|s| r[*s as usize].clone()).collect())
            .collect(),
    );
    // block · internal + rest = 0  ⇒  internal = −block⁻¹ · rest
    let solved = block.solve(&Mat::from_rows(internal_rows.to_vec()))?;
    let reduced = kept
        .into_iter()
        .map(|mut row| {
            for (j, s) in internal_slots.iter().enumerate() {
                let coef = row[*s as usize].clone();
                if coef.is_zero() {
                    continue;
                }
                for (c, v) in row.iter_mut().enumerate() {
                    *v = v.clone() - coef.clone() * solved[(j, c)].clone();
                }
            }
            row
        })
        .collect();
    let midpoints = (0..n)
        .map(|j| {
            let mut form: Row<T> = solved.row(j).iter().map(|v| -v.clone()).collect();
            for s in internal_slots {
                form[*s as usize] = T::zero();
            }
            (internal_slots[j], form)
        })
        .collect();
    Some((reduced, midpoints))
}

fn exact_coefficients(params: &OscillatorParams, h: f64) -> Coefficients<Rational> {
    let r = |x: f64| rational_from_f64(x).expect("validated parameters are finite");
    Coefficients {
        m: r(params.m()),
        c: r(params.c()),
        a: r(params.a()),
        h: r(h),
    }
}

fn derive_checked(alg: AlgorithmId, formalism: Formalism, params: &OscillatorParams, h: f64, exact: bool) -> Result<StepMatrices> {
    require_formalism(alg, formalism)?;
    check_step(h)?;
    if exact {
        Ok(derive_matrices_exact(alg, &exact_coefficients(params, h))?.system.to_f64())
    } else {
        Ok(derive_with(alg, &Coefficients::from_params(params, h), &GaussLegendre3)?.system)
    }
}

/// Extended-Hamilton schemes from Gauss–Legendre integration of the weak
/// form, or exact rational integration when `exact` is set.
pub fn derive_ehp_matrices(alg: AlgorithmId, params: &OscillatorParams, h: f64, exact: bool) -> Result<StepMatrices> {
    derive_checked(alg, Formalism::Ehp, params, h, exact)
}

/// Convolved-action schemes from semi-derivative and ordinary convolutions
/// of the shape functions, in floating point or exact rationals.
pub fn derive_mcap_matrices(alg: AlgorithmId, params: &OscillatorParams, h: f64, exact: bool) -> Result<StepMatrices> {
    derive_checked(alg, Formalism::Mcap, params, h, exact)
}

/// Exact-rational derivation for arbitrary rational coefficients.
pub fn derive_matrices_exact(alg: AlgorithmId, k: &Coefficients<Rational>) -> Result<Derivation<Rational>> {
    derive_with(alg, k, &ExactIntegrator)
}
