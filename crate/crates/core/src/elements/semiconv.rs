//! Convolutions of semi-derivatives, and of ordinary derivatives, of
//! polynomials evaluated at the element end `t = h`.

use crate::elements::basis::Poly;
use crate::linalg::Mat;
use crate::scalar::Scalar;

/// `p!·q!/(p+q)!` as an exact scalar.
fn inverse_binomial<T: Scalar>(p: u32, q: u32) -> T {
    // C(p+q, p) built incrementally stays integral at every step.
    let (small, large) = if p < q { (p, q) } else { (q, p) };
    let mut binom: i64 = 1;
    for i in 1..=small as i64 {
        binom = binom * (large as i64 + i) / i;
    }
    T::one() / T::from_i64(binom)
}

/// Convolution of the semi-derivatives of `t^p` and `t^q`, at time `t`:
/// `Γ(1+p)·Γ(1+q)/Γ(1+p+q) · t^{p+q}`.
pub fn semiconv_monomials<T: Scalar>(p: u32, q: u32, t: &T) -> T {
    inverse_binomial::<T>(p, q) * t.powi(p + q)
}

/// Semi-derivative convolution of two polynomials at `t = h`.
pub fn semiconv_poly<T: Scalar>(f: &Poly<T>, g: &Poly<T>, h: &T) -> T {
    let mut acc = T::zero();
    for (p, a) in f.coeffs().iter().enumerate() {
        for (q, b) in g.coeffs().iter().enumerate() {
            acc = acc + a.clone() * b.clone() * semiconv_monomials(p as u32, q as u32, h);
        }
    }
    acc
}

/// Ordinary convolution `∫₀ʰ f(τ)·g(h−τ) dτ`, using
/// `∫₀ʰ τ^p (h−τ)^q dτ = p!·q!/(p+q+1)! · h^{p+q+1}`.
pub fn conv_poly<T: Scalar>(f: &Poly<T>, g: &Poly<T>, h: &T) -> T {
    let mut acc = T::zero();
    for (p, a) in f.coeffs().iter().enumerate() {
        for (q, b) in g.coeffs().iter().enumerate() {
            let beta = inverse_binomial::<T>(p as u32, q as u32) / T::from_i64((p + q + 1) as i64);
            acc = acc + a.clone() * b.clone() * beta * h.powi((p + q + 1) as u32);
        }
    }
    acc
}

/// Matrix of semi-derivative convolutions, `(i, j) = (f̃_i ⋆ g̃_j)(h)`.
pub fn semiconv_basis_matrix<T: Scalar>(rows: &[Poly<T>], cols: &[Poly<T>], h: &T) -> Mat<T> {
    let mut out = Mat::zeros(rows.len(), cols.len());
    for (i, f) in rows.iter().enumerate() {
        for (j, g) in cols.iter().enumerate() {
            out[(i, j)] = semiconv_poly(f, g, h);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elements::basis::PolyBasis;
    use crate::scalar::{rat, Rational};
    use alloc::vec;

    #[test]
    fn monomial_values() {
        assert_eq!(semiconv_monomials(0, 0, &3.5), 1.0);
        assert_eq!(semiconv_monomials(1, 0, &3.5), 3.5);
        assert_eq!(semiconv_monomials(1, 1, &rat(3, 1)), rat(9, 2));
        assert_eq!(semiconv_monomials(2, 3, &rat(1, 1)), rat(1, 10));
    }

    #[test]
    fn quadratic_against_linear() {
        let h = rat(7, 3);
        let b = PolyBasis::new(&h);
        let m = semiconv_basis_matrix(&b.quadratic, &b.linear, &h);
        let expected = Mat::from_rows(vec![
            vec![rat(-1, 6), rat(1, 6)],
            vec![rat(5, 6), rat(1, 6)],
            vec![rat(-2, 3), rat(2, 3)],
        ]);
        assert_eq!(m, expected);
    }

    #[test]
    fn linear_against_linear() {
        let h: Rational = rat(1, 5);
        let b = PolyBasis::new(&h);
        let m = semiconv_basis_matrix(&b.linear, &b.linear, &h);
        assert_eq!(
            m,
            Mat::from_rows(vec![vec![rat(-1, 2), rat(1, 2)], vec![rat(1, 2), rat(1, 2)]])
        );
    }

    #[test]
    fn ordinary_convolution_matches_reflection() {
        let h = rat(3, 2);
        let b = PolyBasis::new(&h);
        for f in &b.quadratic {
            for g in &b.linear {
                let direct = crate::elements::basis::Integrator::integrate(
                    &crate::elements::basis::ExactIntegrator,
                    &f.mul(&g.reflect(&h)),
                    &h,
                );
                assert_eq!(conv_poly(f, g, &h), direct);
            }
        }
    }
}
