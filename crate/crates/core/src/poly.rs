//! Exact polynomials in one variable `t` and in the two simplex coordinates
//! `(t1, t2)`.
//!
//! Univariate polynomials parameterise one-cells (polynomial paths on the
//! interval); bivariate ones parameterise two-cells on the triangle in the
//! chart that eliminates `t0 = 1 - t1 - t2`.  All coefficient arithmetic is
//! exact; a global degree cap (default 64, override with the
//! `SLINFTY_POLY_DEGREE_CAP` environment variable) turns runaway degree
//! growth into an error instead of an unbounded computation.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::{self, Scalar};

fn degree_cap() -> usize {
    static CAP: OnceLock<usize> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var("SLINFTY_POLY_DEGREE_CAP")
            .ok()
            .and_then(|v| v.parse().ok())
            .unwrap_or(64)
    })
}

fn check_cap(deg: usize, what: &str) -> Result<()> {
    if deg > degree_cap() {
        return Err(Error::input(format!(
            "{what} exceeds the polynomial degree cap {} (degree {deg}); raise SLINFTY_POLY_DEGREE_CAP if intentional",
            degree_cap()
        )));
    }
    Ok(())
}

/// Dense univariate polynomial; `coeffs[k]` multiplies `t^k`.  Trailing zero
/// coefficients are trimmed, so `coeffs` is empty exactly for the zero
/// polynomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    pub coeffs: Vec<Scalar>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: Scalar) -> Self {
        let mut p = Poly { coeffs: vec![c] };
        p.trim();
        p
    }

    /// The monomial `t`.
    pub fn t() -> Self {
        Poly {
            coeffs: vec![scalar::zero(), scalar::one()],
        }
    }

    pub fn from_coeffs(coeffs: Vec<Scalar>) -> Self {
        let mut p = Poly { coeffs };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while matches!(self.coeffs.last(), Some(c) if c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree of the polynomial, or `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = vec![scalar::zero(); n];
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs[k] += c;
        }
        for (k, c) in other.coeffs.iter().enumerate() {
            coeffs[k] += c;
        }
        Poly::from_coeffs(coeffs)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(&-scalar::one()))
    }

    pub fn scale(&self, s: &Scalar) -> Poly {
        if s.is_zero() {
            return Poly::zero();
        }
        Poly::from_coeffs(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, other: &Poly) -> Result<Poly> {
        if self.is_zero() || other.is_zero() {
            return Ok(Poly::zero());
        }
        let deg = self.coeffs.len() + other.coeffs.len() - 2;
        check_cap(deg, "polynomial product")?;
        let mut coeffs = vec![scalar::zero(); deg + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Ok(Poly::from_coeffs(coeffs))
    }

    pub fn eval(&self, t: &Scalar) -> Scalar {
        let mut acc = scalar::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * t + c;
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        Poly::from_coeffs(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(k, c)| c * scalar::from_i64(k as i64 + 1))
                .collect(),
        )
    }

    /// Antiderivative vanishing at 0: `t^k -> t^{k+1}/(k+1)`.
    pub fn integrate(&self) -> Result<Poly> {
        if self.is_zero() {
            return Ok(Poly::zero());
        }
        check_cap(self.coeffs.len(), "polynomial antiderivative")?;
        let mut coeffs = vec![scalar::zero(); self.coeffs.len() + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs[k + 1] = c / scalar::from_i64(k as i64 + 1);
        }
        Ok(Poly::from_coeffs(coeffs))
    }

    /// Definite integral over `[0, 1]`.
    pub fn integral_01(&self) -> Scalar {
        let mut acc = scalar::zero();
        for (k, c) in self.coeffs.iter().enumerate() {
            acc += c / scalar::from_i64(k as i64 + 1);
        }
        acc
    }

    /// Substitute `t := a + b*t`.
    pub fn compose_affine(&self, a: &Scalar, b: &Scalar) -> Result<Poly> {
        let mut acc = Poly::zero();
        let arg = Poly::from_coeffs(vec![a.clone(), b.clone()]);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(&arg)?.add(&Poly::constant(c.clone()));
        }
        Ok(acc)
    }

    /// Substitute `t := c0 + c1*t1 + c2*t2`, producing a bivariate polynomial.
    pub fn subst_affine2(&self, c0: &Scalar, c1: &Scalar, c2: &Scalar) -> Result<Poly2> {
        let arg = {
            let mut m = BTreeMap::new();
            if !c0.is_zero() {
                m.insert((0u32, 0u32), c0.clone());
            }
            if !c1.is_zero() {
                m.insert((1, 0), c1.clone());
            }
            if !c2.is_zero() {
                m.insert((0, 1), c2.clone());
            }
            Poly2 { terms: m }
        };
        let mut acc = Poly2::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(&arg)?.add(&Poly2::constant(c.clone()));
        }
        Ok(acc)
    }
}

/// Sparse bivariate polynomial in `(t1, t2)`; keys are exponent pairs.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Poly2 {
    pub terms: BTreeMap<(u32, u32), Scalar>,
}

impl Poly2 {
    pub fn zero() -> Self {
        Poly2::default()
    }

    pub fn constant(c: Scalar) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((0, 0), c);
        }
        Poly2 { terms }
    }

    pub fn monomial(a: u32, b: u32, c: Scalar) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((a, b), c);
        }
        Poly2 { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|(a, b)| a + b).max()
    }

    fn insert_add(&mut self, key: (u32, u32), c: Scalar) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(key).or_insert_with(scalar::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn add(&self, other: &Poly2) -> Poly2 {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.insert_add(*k, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly2) -> Poly2 {
        self.add(&other.scale(&-scalar::one()))
    }

    pub fn scale(&self, s: &Scalar) -> Poly2 {
        if s.is_zero() {
            return Poly2::zero();
        }
        Poly2 {
            terms: self.terms.iter().map(|(k, c)| (*k, c * s)).collect(),
        }
    }

    pub fn mul(&self, other: &Poly2) -> Result<Poly2> {
        let mut out = Poly2::zero();
        for ((a1, b1), c1) in &self.terms {
            for ((a2, b2), c2) in &other.terms {
                let key = (a1 + a2, b1 + b2);
                check_cap((key.0 + key.1) as usize, "bivariate product")?;
                out.insert_add(key, c1 * c2);
            }
        }
        Ok(out)
    }

    pub fn d_t1(&self) -> Poly2 {
        let mut out = Poly2::zero();
        for ((a, b), c) in &self.terms {
            if *a > 0 {
                out.insert_add((a - 1, *b), c * scalar::from_i64(*a as i64));
            }
        }
        out
    }

    pub fn d_t2(&self) -> Poly2 {
        let mut out = Poly2::zero();
        for ((a, b), c) in &self.terms {
            if *b > 0 {
                out.insert_add((*a, b - 1), c * scalar::from_i64(*b as i64));
            }
        }
        out
    }

    pub fn eval(&self, t1: &Scalar, t2: &Scalar) -> Scalar {
        let mut acc = scalar::zero();
        for ((a, b), c) in &self.terms {
            let mut term = c.clone();
            for _ in 0..*a {
                term *= t1;
            }
            for _ in 0..*b {
                term *= t2;
            }
            acc += term;
        }
        acc
    }

    /// Substitute `t1 := a0 + a1*t` and `t2 := b0 + b1*t`, producing the
    /// univariate restriction used for edge pullbacks.
    pub fn restrict_affine(
        &self,
        a0: &Scalar,
        a1: &Scalar,
        b0: &Scalar,
        b1: &Scalar,
    ) -> Result<Poly> {
        let p1 = Poly::from_coeffs(vec![a0.clone(), a1.clone()]);
        let p2 = Poly::from_coeffs(vec![b0.clone(), b1.clone()]);
        let mut acc = Poly::zero();
        for ((a, b), c) in &self.terms {
            let mut term = Poly::constant(c.clone());
            for _ in 0..*a {
                term = term.mul(&p1)?;
            }
            for _ in 0..*b {
                term = term.mul(&p2)?;
            }
            acc = acc.add(&term);
        }
        Ok(acc)
    }

    /// `int_0^1 g(1 - u + u*t1, u*t2) * u^extra du`, the contraction-to-vertex-1
    /// integral behind the triangle homotopy operator.
    pub fn contract_to_vertex1(&self, extra: u32) -> Result<Poly2> {
        // 1 - u + u*t1 = 1 - u*(1 - t1); expand the power of (1 - t1) exactly
        // and integrate each power of u via 1/(j + b + extra + 1).
        let one_minus_t1 = Poly2 {
            terms: BTreeMap::from([
                ((0, 0), scalar::one()),
                ((1, 0), -scalar::one()),
            ]),
        };
        let mut out = Poly2::zero();
        for ((a, b), c) in &self.terms {
            let mut omt_pow = Poly2::constant(scalar::one());
            for j in 0..=*a {
                // coefficient of u^{j+b+extra}: C(a, j) * (-1)^j * (1-t1)^j * t2^b
                let sign = if j % 2 == 0 {
                    scalar::one()
                } else {
                    -scalar::one()
                };
                let u_power = (j + b + extra) as i64;
                let coeff = scalar::binomial(*a as usize, j as usize) * sign
                    / scalar::from_i64(u_power + 1);
                let piece = omt_pow
                    .scale(&(coeff * c))
                    .mul(&Poly2::monomial(0, *b, scalar::one()))?;
                out = out.add(&piece);
                if j < *a {
                    omt_pow = omt_pow.mul(&one_minus_t1)?;
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{from_i64, ratio};

    fn p(coeffs: &[i64]) -> Poly {
        Poly::from_coeffs(coeffs.iter().map(|&c| from_i64(c)).collect())
    }

    #[test]
    fn univariate_arithmetic() {
        let a = p(&[1, 2]); // 1 + 2t
        let b = p(&[0, 0, 3]); // 3t^2
        assert_eq!(a.mul(&b).unwrap(), p(&[0, 0, 3, 6]));
        assert_eq!(a.derivative(), p(&[2]));
        assert_eq!(b.integrate().unwrap(), Poly::from_coeffs(vec![
            from_i64(0),
            from_i64(0),
            from_i64(0),
            from_i64(1),
        ]));
        assert_eq!(a.integral_01(), from_i64(2));
        assert_eq!(a.eval(&from_i64(3)), from_i64(7));
    }

    #[test]
    fn affine_composition_reverses_time() {
        let a = p(&[0, 0, 1]); // t^2
        let rev = a.compose_affine(&from_i64(1), &from_i64(-1)).unwrap();
        assert_eq!(rev, p(&[1, -2, 1])); // (1-t)^2
    }

    #[test]
    fn bivariate_restriction_matches_eval() {
        // g = t1^2 * t2 + 3 t2^2
        let g = Poly2::monomial(2, 1, from_i64(1)).add(&Poly2::monomial(0, 2, from_i64(3)));
        // restrict along t1 = 1 - t, t2 = t
        let r = g
            .restrict_affine(&from_i64(1), &from_i64(-1), &from_i64(0), &from_i64(1))
            .unwrap();
        for k in 0..5i64 {
            let t = ratio(k, 7);
            let direct = g.eval(&(from_i64(1) - &t), &t);
            assert_eq!(r.eval(&t), direct);
        }
    }

    #[test]
    fn contraction_integral_on_monomials() {
        // g = 1: integral of u^0 du = 1.
        let g = Poly2::constant(from_i64(1));
        assert_eq!(g.contract_to_vertex1(0).unwrap(), Poly2::constant(from_i64(1)));
        // g = t2: int_0^1 (u t2) du = t2/2.
        let g = Poly2::monomial(0, 1, from_i64(1));
        assert_eq!(
            g.contract_to_vertex1(0).unwrap(),
            Poly2::monomial(0, 1, ratio(1, 2))
        );
        // g = t1: int_0^1 (1 - u + u t1) du = 1/2 + t1/2.
        let g = Poly2::monomial(1, 0, from_i64(1));
        let expect = Poly2::constant(ratio(1, 2)).add(&Poly2::monomial(1, 0, ratio(1, 2)));
        assert_eq!(g.contract_to_vertex1(0).unwrap(), expect);
    }
}
