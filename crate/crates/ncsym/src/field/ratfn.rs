//! Rational functions in one variable `t` over the rationals.
//!
//! Values are kept in a unique reduced form so that `==` is semantic
//! equality: numerator and denominator are integer polynomials with no
//! common polynomial factor, jointly primitive integer content, and a
//! positive leading coefficient on the denominator.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Integer, One, Signed, Zero};
use std::fmt;

/// Integer polynomial, coefficients lowest degree first.
///
/// # Invariants
///
/// The coefficient vector never ends in a zero; the zero polynomial is the
/// empty vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: BigInt) -> Self {
        IntPoly::new(vec![c])
    }

    pub fn from_i64(c: i64) -> Self {
        IntPoly::constant(BigInt::from(c))
    }

    /// The variable `t`.
    pub fn var() -> Self {
        IntPoly::new(vec![BigInt::zero(), BigInt::one()])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn neg(&self) -> Self {
        IntPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            let a = self.coeffs.get(k).cloned().unwrap_or_else(BigInt::zero);
            let b = other.coeffs.get(k).cloned().unwrap_or_else(BigInt::zero);
            out.push(a + b);
        }
        IntPoly::new(out)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }

    pub fn mul_scalar(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return IntPoly::zero();
        }
        IntPoly {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Substitute `t -> a*t + b`.
    pub fn compose_affine(&self, a: &BigInt, b: &BigInt) -> Self {
        let lin = IntPoly::new(vec![b.clone(), a.clone()]);
        let mut acc = IntPoly::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(&lin).add(&IntPoly::constant(c.clone()));
        }
        acc
    }

    /// Greatest common divisor of the coefficients, nonnegative; zero only
    /// for the zero polynomial.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in &self.coeffs {
            g = g.gcd(c);
        }
        g
    }

    /// Divide out the content and force a positive leading coefficient.
    fn primitive_positive(&self) -> Self {
        if self.is_zero() {
            return IntPoly::zero();
        }
        let mut g = self.content();
        if self.leading().unwrap().is_negative() {
            g = -g;
        }
        self.exact_div_scalar(&g)
    }

    fn exact_div_scalar(&self, c: &BigInt) -> Self {
        IntPoly {
            coeffs: self
                .coeffs
                .iter()
                .map(|a| {
                    let (q, r) = a.div_rem(c);
                    debug_assert!(r.is_zero(), "scalar division must be exact");
                    q
                })
                .collect(),
        }
    }

    /// Pseudo-remainder of `self` by `other` (the classical `prem`).
    fn pseudo_rem(&self, other: &Self) -> Self {
        let d = other.degree().expect("pseudo_rem by zero polynomial");
        let lc = other.leading().unwrap().clone();
        let mut r = self.clone();
        while let Some(n) = r.degree() {
            if n < d {
                break;
            }
            // r <- lc*r - lead(r) * t^(n-d) * other
            let lead_r = r.leading().unwrap().clone();
            let mut shifted = vec![BigInt::zero(); n - d];
            shifted.extend(other.coeffs.iter().map(|c| c * &lead_r));
            r = r.mul_scalar(&lc).sub(&IntPoly::new(shifted));
            debug_assert!(r.degree().map_or(true, |m| m < n));
        }
        r
    }

    /// Primitive positive gcd via the primitive remainder sequence.
    pub fn gcd(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.primitive_positive();
        }
        if other.is_zero() {
            return self.primitive_positive();
        }
        let mut a = self.primitive_positive();
        let mut b = other.primitive_positive();
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.pseudo_rem(&b).primitive_positive();
            a = b;
            b = r;
        }
        a.primitive_positive()
    }

    /// Exact division; panics if `other` does not divide `self`.
    pub fn exact_div(&self, other: &Self) -> Self {
        assert!(!other.is_zero(), "polynomial division by zero");
        if self.is_zero() {
            return IntPoly::zero();
        }
        let d = other.degree().unwrap();
        let n = self.degree().expect("nonzero checked above");
        assert!(n >= d, "exact division with too-small dividend");
        let lc = other.leading().unwrap();
        let mut rem = self.clone();
        let mut quot = vec![BigInt::zero(); n - d + 1];
        while let Some(m) = rem.degree() {
            if m < d {
                break;
            }
            let (q, r) = rem.leading().unwrap().div_rem(lc);
            assert!(r.is_zero(), "division is not exact");
            let mut term = vec![BigInt::zero(); m - d];
            term.push(q.clone());
            quot[m - d] = q;
            rem = rem.sub(&other.mul(&IntPoly::new(term)));
        }
        assert!(rem.is_zero(), "division is not exact");
        IntPoly::new(quot)
    }

    fn fmt_term(f: &mut fmt::Formatter<'_>, c: &BigInt, k: usize, first: bool) -> fmt::Result {
        let mag = c.abs();
        if first {
            if c.is_negative() {
                write!(f, "-")?;
            }
        } else if c.is_negative() {
            write!(f, " - ")?;
        } else {
            write!(f, " + ")?;
        }
        match k {
            0 => write!(f, "{mag}"),
            _ => {
                if !mag.is_one() {
                    write!(f, "{mag}*")?;
                }
                if k == 1 {
                    write!(f, "t")
                } else {
                    write!(f, "t^{k}")
                }
            }
        }
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            IntPoly::fmt_term(f, c, k, first)?;
            first = false;
        }
        Ok(())
    }
}

/// Reduced fraction of integer polynomials.
///
/// # Invariants
///
/// * denominator is nonzero with positive leading coefficient,
/// * numerator and denominator share no polynomial factor,
/// * the two integer contents are coprime,
/// * zero is `0/1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatFn {
    num: IntPoly,
    den: IntPoly,
}

impl RatFn {
    /// Build and reduce. Panics if `den` is zero.
    pub fn new(num: IntPoly, den: IntPoly) -> Self {
        assert!(!den.is_zero(), "rational function with zero denominator");
        let mut r = RatFn { num, den };
        r.reduce();
        r
    }

    pub fn zero() -> Self {
        RatFn {
            num: IntPoly::zero(),
            den: IntPoly::constant(BigInt::one()),
        }
    }

    pub fn one() -> Self {
        RatFn::from_poly(IntPoly::constant(BigInt::one()))
    }

    pub fn from_poly(num: IntPoly) -> Self {
        RatFn {
            num,
            den: IntPoly::constant(BigInt::one()),
        }
    }

    pub fn var() -> Self {
        RatFn::from_poly(IntPoly::var())
    }

    pub fn from_rational(q: &BigRational) -> Self {
        RatFn::new(
            IntPoly::constant(q.numer().clone()),
            IntPoly::constant(q.denom().clone()),
        )
    }

    pub fn num(&self) -> &IntPoly {
        &self.num
    }

    pub fn den(&self) -> &IntPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// `Some(q)` when the value is a constant.
    pub fn as_constant(&self) -> Option<BigRational> {
        if self.num.degree().map_or(true, |d| d == 0) && self.den.degree() == Some(0) {
            let n = self
                .num
                .coeffs()
                .first()
                .cloned()
                .unwrap_or_else(BigInt::zero);
            let d = self.den.coeffs()[0].clone();
            Some(BigRational::new(n, d))
        } else {
            None
        }
    }

    fn reduce(&mut self) {
        if self.num.is_zero() {
            self.den = IntPoly::constant(BigInt::one());
            return;
        }
        let g = self.num.gcd(&self.den);
        if g.degree() != Some(0) || !g.coeffs()[0].is_one() {
            self.num = self.num.exact_div(&g);
            self.den = self.den.exact_div(&g);
        }
        let mut c = self.num.content().gcd(&self.den.content());
        if self.den.leading().unwrap().is_negative() {
            c = -c;
        }
        if !c.is_one() {
            self.num = self.num.exact_div_scalar(&c);
            self.den = self.den.exact_div_scalar(&c);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        RatFn::new(
            self.num
                .mul(&other.den)
                .add(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        RatFn {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        RatFn::new(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        Some(RatFn::new(self.den.clone(), self.num.clone()))
    }

    /// Substitute `t -> a*t + b` in numerator and denominator.
    pub fn compose_affine(&self, a: &BigInt, b: &BigInt) -> Self {
        RatFn::new(
            self.num.compose_affine(a, b),
            self.den.compose_affine(a, b),
        )
    }
}

impl fmt::Display for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.degree() == Some(0) && self.den.coeffs()[0].is_one() {
            return write!(f, "{}", self.num);
        }
        write!(f, "({})/({})", self.num, self.den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(cs: &[i64]) -> IntPoly {
        IntPoly::new(cs.iter().map(|&c| BigInt::from(c)).collect())
    }

    #[test]
    fn polynomial_gcd_is_primitive_and_positive() {
        // (t^2 - 1) and (t^2 + 2t + 1) share (t + 1)
        let g = p(&[-1, 0, 1]).gcd(&p(&[1, 2, 1]));
        assert_eq!(g, p(&[1, 1]));
        // scaled inputs give the same primitive gcd
        let g2 = p(&[-1, 0, 1]).mul_scalar(&BigInt::from(-6)).gcd(&p(&[1, 2, 1]));
        assert_eq!(g2, p(&[1, 1]));
    }

    #[test]
    fn fractions_reduce_to_canonical_form() {
        // (2t^2 - 2) / (4t + 4) = (t - 1)/2
        let r = RatFn::new(p(&[-2, 0, 2]), p(&[4, 4]));
        assert_eq!(r, RatFn::new(p(&[-1, 1]), p(&[2])));
        // sign normalization: denominator leading coefficient positive
        let s = RatFn::new(p(&[1]), p(&[0, -1]));
        assert_eq!(s, RatFn::new(p(&[-1]), p(&[0, 1])));
        assert_eq!(s.to_string(), "(-1)/(t)");
    }

    #[test]
    fn field_ops_round_trip() {
        let t = RatFn::var();
        let a = t.mul(&t).sub(&RatFn::one()); // t^2 - 1
        let b = t.add(&RatFn::one()); // t + 1
        let q = a.mul(&b.inv().unwrap());
        assert_eq!(q, t.sub(&RatFn::one()));
        assert_eq!(q.mul(&b), a);
        assert!(RatFn::zero().inv().is_none());
    }

    #[test]
    fn affine_substitution_is_a_homomorphism() {
        let a = BigInt::from(-1);
        let b = BigInt::from(2);
        let x = RatFn::new(p(&[1, 3, 1]), p(&[2, 1]));
        let y = RatFn::new(p(&[0, 5]), p(&[1, 0, 1]));
        let lhs = x.mul(&y).compose_affine(&a, &b);
        let rhs = x.compose_affine(&a, &b).mul(&y.compose_affine(&a, &b));
        assert_eq!(lhs, rhs);
        let lhs = x.add(&y).compose_affine(&a, &b);
        let rhs = x.compose_affine(&a, &b).add(&y.compose_affine(&a, &b));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn display_orders_terms_by_falling_degree() {
        assert_eq!(p(&[1, -2, 1]).to_string(), "t^2 - 2*t + 1");
        assert_eq!(p(&[0, 0, -3]).to_string(), "-3*t^2");
        assert_eq!(IntPoly::zero().to_string(), "0");
    }
}
