//! Polynomial shape functions on a single element `[0, h]`.

use alloc::vec;
use alloc::vec::Vec;

use crate::scalar::Scalar;

/// Polynomial in the local time `t`, stored by ascending monomial degree.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly<T> {
    coeffs: Vec<T>,
}

impl<T: Scalar> Poly<T> {
    pub fn new(coeffs: Vec<T>) -> Self {
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, t: &T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, c| acc * t.clone() + c.clone())
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(p, c)| T::from_i64(p as i64) * c.clone())
            .collect::<Vec<_>>();
        if coeffs.is_empty() {
            Poly::new(vec![T::zero()])
        } else {
            Poly::new(coeffs)
        }
    }

    pub fn mul(&self, rhs: &Poly<T>) -> Self {
        let mut out = vec![T::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(out)
    }

    pub fn add(&self, rhs: &Poly<T>) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let get = |v: &[T], i: usize| v.get(i).cloned().unwrap_or_else(T::zero);
        Poly::new((0..n).map(|i| get(&self.coeffs, i) + get(&rhs.coeffs, i)).collect())
    }

    pub fn scale(&self, s: &T) -> Self {
        Poly::new(self.coeffs.iter().map(|c| c.clone() * s.clone()).collect())
    }

    /// `p(h − t)` as a polynomial in `t`.
    pub fn reflect(&self, h: &T) -> Self {
        // Horner in the shifted variable: p(h − t) = c0 + (h − t)(c1 + (h − t)(…)).
        let shift = Poly::new(vec![h.clone(), -T::one()]);
        self.coeffs
            .iter()
            .rev()
            .fold(Poly::new(vec![T::zero()]), |acc, c| {
                acc.mul(&shift).add(&Poly::new(vec![c.clone()]))
            })
    }
}

/// Integration of polynomials over `[0, h]`.
pub trait Integrator<T> {
    fn integrate(&self, p: &Poly<T>, h: &T) -> T;
}

/// Term-by-term antiderivative; exact in any field.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExactIntegrator;

impl<T: Scalar> Integrator<T> for ExactIntegrator {
    fn integrate(&self, p: &Poly<T>, h: &T) -> T {
        p.coeffs()
            .iter()
            .enumerate()
            .fold(T::zero(), |acc, (k, c)| {
                acc + c.clone() * h.powi(k as u32 + 1) / T::from_i64(k as i64 + 1)
            })
    }
}

/// Three-point Gauss–Legendre rule, exact through degree five.
#[derive(Debug, Clone, Copy, Default)]
pub struct GaussLegendre3;

impl GaussLegendre3 {
    pub const MAX_EXACT_DEGREE: usize = 5;
}

impl Integrator<f64> for GaussLegendre3 {
    fn integrate(&self, p: &Poly<f64>, h: &f64) -> f64 {
        debug_assert!(p.degree() <= Self::MAX_EXACT_DEGREE);
        let r = libm::sqrt(0.6);
        let half = 0.5 * h;
        [(-r, 5.0 / 9.0), (0.0, 8.0 / 9.0), (r, 5.0 / 9.0)]
            .iter()
            .map(|&(x, w)| w * p.eval(&(half * (1.0 + x))))
            .sum::<f64>()
            * half
    }
}

/// Linear pair and quadratic triple on `[0, h]`.
///
/// Quadratic functions are ordered start node, end node, midpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyBasis<T> {
    pub h: T,
    pub linear: [Poly<T>; 2],
    pub quadratic: [Poly<T>; 3],
}

impl<T: Scalar> PolyBasis<T> {
    pub fn new(h: &T) -> Self {
        let inv = T::one() / h.clone();
        let inv2 = inv.clone() * inv.clone();
        let n = |k: i64| T::from_i64(k);
        PolyBasis {
            h: h.clone(),
            linear: [
                Poly::new(vec![T::one(), -inv.clone()]),
                Poly::new(vec![T::zero(), inv.clone()]),
            ],
            quadratic: [
                Poly::new(vec![T::one(), n(-3) * inv.clone(), n(2) * inv2.clone()]),
                Poly::new(vec![T::zero(), -inv.clone(), n(2) * inv2.clone()]),
                Poly::new(vec![T::zero(), n(4) * inv, n(-4) * inv2]),
            ],
        }
    }

    pub fn linear_derivatives(&self) -> [Poly<T>; 2] {
        [self.linear[0].derivative(), self.linear[1].derivative()]
    }

    pub fn quadratic_derivatives(&self) -> [Poly<T>; 3] {
        [
            self.quadratic[0].derivative(),
            self.quadratic[1].derivative(),
            self.quadratic[2].derivative(),
        ]
    }

    /// Linear or quadratic family.
    pub fn family(&self, quadratic: bool) -> &[Poly<T>] {
        if quadratic {
            &self.quadratic
        } else {
            &self.linear
        }
    }
}
