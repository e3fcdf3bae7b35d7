//! The coefficient field and its two involutions.
//!
//! A [`FieldTower`] bundles a field `F` (exact arithmetic, characteristic
//! zero) with two order-two automorphisms `tau_0`, `tau_1`. Their fixed
//! subfields `K_0`, `K_1` have index two, and for each one the tower pins an
//! anti-invariant `w_i` (so `tau_i(w_i) = -w_i` and `w_i^2` lies in `K_i`),
//! giving the decomposition `F = K_i + K_i * w_i`.
//!
//! Two storage layouts sit behind one element type: coordinate vectors over
//! a number-field basis with a precomputed multiplication table, and reduced
//! rational functions in one variable. All higher layers are generic over
//! the tower handle and never look inside.

mod numberfield;
mod ratfn;

pub use ratfn::{IntPoly, RatFn};

pub(crate) use numberfield::NumberFieldData;

use crate::Error;
use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use serde::Serialize;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::sync::Arc;

/// Reduce an integer index to the subfield parity it selects.
pub(crate) fn par(i: i64) -> usize {
    i.rem_euclid(2) as usize
}

pub(crate) struct RatFnTowerData {
    /// `tau_i(t) = a*t + b`, stored as `(a, b)`.
    pub tau_affine: [(BigInt, BigInt); 2],
    pub w: [RatFn; 2],
    /// When the composite `tau_1 . tau_0` is a nonzero shift `t -> t + c`,
    /// the shift `c`; lets `sigma_order` certify infinite order.
    pub sigma_shift: Option<BigRational>,
}

pub(crate) enum TowerKind {
    Number(NumberFieldData),
    Rational(RatFnTowerData),
}

struct TowerInner {
    key: String,
    kind: TowerKind,
}

/// Shared handle to a field-with-involutions; cheap to clone.
#[derive(Clone)]
pub struct FieldTower {
    inner: Arc<TowerInner>,
}

/// Element of the tower's field. Carries its tower handle so arithmetic
/// needs no extra context.
#[derive(Clone)]
pub struct FieldElement {
    tower: FieldTower,
    repr: Repr,
}

#[derive(Clone, PartialEq, Eq)]
enum Repr {
    Coords(Vec<BigRational>),
    Fn(RatFn),
}

impl FieldTower {
    pub(crate) fn from_number_field(key: &str, data: NumberFieldData) -> Result<Self, Error> {
        let tower = FieldTower {
            inner: Arc::new(TowerInner {
                key: key.to_owned(),
                kind: TowerKind::Number(data),
            }),
        };
        tower.validate()?;
        Ok(tower)
    }

    pub(crate) fn from_rational_functions(key: &str, data: RatFnTowerData) -> Result<Self, Error> {
        let tower = FieldTower {
            inner: Arc::new(TowerInner {
                key: key.to_owned(),
                kind: TowerKind::Rational(data),
            }),
        };
        tower.validate()?;
        Ok(tower)
    }

    /// Structural checks cheap enough to run at construction time:
    /// involutive on the basis, correct behavior on the `w` elements, and
    /// the cross condition `w_l` outside `K_{1-l}` that the quotient
    /// algorithms rely on. Deeper laws (multiplicativity of the involutions,
    /// and so on) are the job of the verification suites.
    fn validate(&self) -> Result<(), Error> {
        let bad = |msg: &str| Err(Error::BadTowerData(msg.to_owned()));
        match &self.inner.kind {
            TowerKind::Number(data) => {
                let d = data.dim();
                if d == 0
                    || data.mult.len() != d * d
                    || data.tau.iter().any(|m| m.len() != d * d)
                    || data.w.iter().any(|w| w.len() != d)
                {
                    return bad("dimension mismatch in presentation tables");
                }
                for i in 0..2 {
                    for k in 0..d {
                        let e = data.basis_coords(k);
                        let te = data.apply_matrix(&data.tau[i], &e);
                        let tte = data.apply_matrix(&data.tau[i], &te);
                        if tte != e {
                            return bad("involution squared is not the identity");
                        }
                    }
                    if data.apply_matrix(&data.tau[i], &data.unit_coords()) != data.unit_coords() {
                        return bad("involution does not fix the unit");
                    }
                    for b in &data.subfield_basis[i] {
                        if data.apply_matrix(&data.tau[i], b) != *b {
                            return bad("declared subfield basis is not fixed");
                        }
                    }
                }
                for b in &data.intersection_basis {
                    if data.apply_matrix(&data.tau[0], b) != *b
                        || data.apply_matrix(&data.tau[1], b) != *b
                    {
                        return bad("declared intersection basis is not fixed by both involutions");
                    }
                }
                if data.tau[0] == data.tau[1] {
                    return bad("the two involutions coincide");
                }
                if data.generators.is_empty() {
                    return bad("empty generator list");
                }
            }
            TowerKind::Rational(data) => {
                for (a, b) in &data.tau_affine {
                    // (a*t + b) must be an involution: a^2 = 1, b*(a+1) = 0.
                    if !(a * a).is_one() || !(b * (a + BigInt::one())).is_zero() {
                        return bad("affine map is not an involution");
                    }
                }
                if data.tau_affine[0] == data.tau_affine[1] {
                    return bad("the two involutions coincide");
                }
            }
        }
        // Shared checks, phrased through the public element API.
        for l in 0..2i64 {
            let w = self.w(l);
            if w.is_zero() {
                return bad("anti-invariant element is zero");
            }
            if self.tau(l, &w) != -&w {
                return bad("w is not anti-invariant for its involution");
            }
            let w2 = &w * &w;
            if !self.in_subfield(l, &w2) {
                return bad("square of w is not in its subfield");
            }
            if self.in_subfield(1 - l, &w) {
                // Needed so that {1, w_l} stays a basis over the *other*
                // subfield; the normal-form solver divides by its anti part.
                return bad("w lies in the opposite subfield");
            }
        }
        Ok(())
    }

    pub fn key(&self) -> &str {
        &self.inner.key
    }

    pub(crate) fn same(&self, other: &FieldTower) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.key == other.inner.key
    }

    /// Dimension over the rationals, `None` for the rational-function field.
    pub fn dim_over_q(&self) -> Option<usize> {
        match &self.inner.kind {
            TowerKind::Number(data) => Some(data.dim()),
            TowerKind::Rational(_) => None,
        }
    }

    pub fn zero(&self) -> FieldElement {
        let repr = match &self.inner.kind {
            TowerKind::Number(data) => Repr::Coords(data.zero_coords()),
            TowerKind::Rational(_) => Repr::Fn(RatFn::zero()),
        };
        self.elem(repr)
    }

    pub fn one(&self) -> FieldElement {
        self.from_i64(1)
    }

    pub fn from_i64(&self, n: i64) -> FieldElement {
        self.from_rational(&BigRational::from(BigInt::from(n)))
    }

    pub fn from_rational(&self, q: &BigRational) -> FieldElement {
        let repr = match &self.inner.kind {
            TowerKind::Number(data) => {
                let mut c = data.zero_coords();
                c[0] = q.clone();
                Repr::Coords(c)
            }
            TowerKind::Rational(_) => Repr::Fn(RatFn::from_rational(q)),
        };
        self.elem(repr)
    }

    /// The pinned anti-invariant for the subfield of parity `i`.
    pub fn w(&self, i: i64) -> FieldElement {
        let repr = match &self.inner.kind {
            TowerKind::Number(data) => Repr::Coords(data.w[par(i)].clone()),
            TowerKind::Rational(data) => Repr::Fn(data.w[par(i)].clone()),
        };
        self.elem(repr)
    }

    /// Field generators over the rationals (for the rational-function field,
    /// the variable itself).
    pub fn generators(&self) -> Vec<FieldElement> {
        match &self.inner.kind {
            TowerKind::Number(data) => data
                .generators
                .iter()
                .map(|c| self.elem(Repr::Coords(c.clone())))
                .collect(),
            TowerKind::Rational(_) => vec![self.elem(Repr::Fn(RatFn::var()))],
        }
    }

    /// Rational basis of `F`, when finite-dimensional.
    pub fn field_basis(&self) -> Option<Vec<FieldElement>> {
        match &self.inner.kind {
            TowerKind::Number(data) => Some(
                (0..data.dim())
                    .map(|k| self.elem(Repr::Coords(data.basis_coords(k))))
                    .collect(),
            ),
            TowerKind::Rational(_) => None,
        }
    }

    /// Rational basis of `K_i`, when finite-dimensional.
    pub fn subfield_basis(&self, i: i64) -> Option<Vec<FieldElement>> {
        match &self.inner.kind {
            TowerKind::Number(data) => Some(
                data.subfield_basis[par(i)]
                    .iter()
                    .map(|c| self.elem(Repr::Coords(c.clone())))
                    .collect(),
            ),
            TowerKind::Rational(_) => None,
        }
    }

    /// Rational basis of `K_0 ∩ K_1`, when finite-dimensional.
    pub fn intersection_basis(&self) -> Option<Vec<FieldElement>> {
        match &self.inner.kind {
            TowerKind::Number(data) => Some(
                data.intersection_basis
                    .iter()
                    .map(|c| self.elem(Repr::Coords(c.clone())))
                    .collect(),
            ),
            TowerKind::Rational(_) => None,
        }
    }

    /// Rational coordinates of `x` in the basis reported by `field_basis`.
    pub fn q_coords(&self, x: &FieldElement) -> Option<Vec<BigRational>> {
        match &x.repr {
            Repr::Coords(c) => Some(c.clone()),
            Repr::Fn(_) => None,
        }
    }

    /// Inverse of [`q_coords`](Self::q_coords); only defined on number
    /// fields, where elements are rational coordinate vectors.
    pub fn from_q_coords(&self, coords: Vec<BigRational>) -> FieldElement {
        match &self.inner.kind {
            TowerKind::Number(data) => {
                assert_eq!(coords.len(), data.dim());
                self.elem(Repr::Coords(coords))
            }
            TowerKind::Rational(_) => panic!("coordinate constructor on a rational-function tower"),
        }
    }

    fn elem(&self, repr: Repr) -> FieldElement {
        FieldElement {
            tower: self.clone(),
            repr,
        }
    }

    /// Apply the involution of parity `i`.
    pub fn tau(&self, i: i64, x: &FieldElement) -> FieldElement {
        debug_assert!(self.same(&x.tower), "element from a different tower");
        let repr = match (&self.inner.kind, &x.repr) {
            (TowerKind::Number(data), Repr::Coords(c)) => {
                Repr::Coords(data.apply_matrix(&data.tau[par(i)], c))
            }
            (TowerKind::Rational(data), Repr::Fn(f)) => {
                let (a, b) = &data.tau_affine[par(i)];
                Repr::Fn(f.compose_affine(a, b))
            }
            _ => panic!("element representation does not match its tower"),
        };
        self.elem(repr)
    }

    /// The composite `tau_1 . tau_0` (apply `tau_0` first).
    pub fn sigma(&self, x: &FieldElement) -> FieldElement {
        self.tau(1, &self.tau(0, x))
    }

    /// Membership in `K_i`, decided by invariance under its involution.
    pub fn in_subfield(&self, i: i64, x: &FieldElement) -> bool {
        self.tau(i, x) == *x
    }

    /// Projection `F -> K_i`, `x -> (x + tau_i(x)) / 2`.
    pub fn trace_to_subfield(&self, i: i64, x: &FieldElement) -> FieldElement {
        let half = self.from_rational(&BigRational::new(BigInt::one(), BigInt::from(2)));
        (x + &self.tau(i, x)) * half
    }

    /// Coordinates of `x` in the decomposition `F = K_i + K_i * w_i`:
    /// returns `(c0, c1)` with `x = c0 + c1 * w_i` and both parts in `K_i`.
    pub fn decompose_over_subfield(&self, i: i64, x: &FieldElement) -> (FieldElement, FieldElement) {
        let c0 = self.trace_to_subfield(i, x);
        let anti = x - &self.tau(i, x);
        let two_w = self.from_i64(2) * self.w(i);
        let c1 = anti * two_w.inv().expect("anti-invariant w is nonzero");
        debug_assert!(self.in_subfield(i, &c0) && self.in_subfield(i, &c1));
        (c0, c1)
    }

    /// Coordinates of `y` in the basis `{1, w}` over `K_i`, for an arbitrary
    /// `w` outside `K_i`: returns `(c, a)` with `y = c + a * w`, both in
    /// `K_i`, or `None` when `w` lies in `K_i` (no such basis).
    pub fn split_in_w_basis(
        &self,
        i: i64,
        y: &FieldElement,
        w: &FieldElement,
    ) -> Option<(FieldElement, FieldElement)> {
        let (y0, y1) = self.decompose_over_subfield(i, y);
        let (w0, w1) = self.decompose_over_subfield(i, w);
        let a = y1 * w1.inv()?;
        let c = y0 - &a * &w0;
        debug_assert_eq!(*y, &c + &(&a * w));
        Some((c, a))
    }

    /// Least power of `tau_1 . tau_0` that fixes every field generator, up
    /// to `bound`; instances carrying a shift certificate short-circuit.
    pub fn sigma_order(&self, bound: u32) -> SigmaOrder {
        if let TowerKind::Rational(data) = &self.inner.kind {
            if let Some(c) = &data.sigma_shift {
                let shifted = if c < &BigRational::from_integer(0.into()) {
                    format!("t - {}", -c)
                } else {
                    format!("t + {c}")
                };
                return SigmaOrder::CertifiedInfinite {
                    certificate: format!("composite twist shifts the variable: t -> {shifted}"),
                };
            }
        }
        let gens = self.generators();
        let mut xs = gens.clone();
        for n in 1..=bound {
            for x in xs.iter_mut() {
                *x = self.sigma(x);
            }
            if xs == gens {
                return SigmaOrder::Finite(n);
            }
        }
        SigmaOrder::ExceedsBound { bound }
    }

    /// Three-way classification of the tower by the order of the composite
    /// twist.
    pub fn classify(&self, bound: u32) -> AlgebraicClass {
        match self.sigma_order(bound) {
            SigmaOrder::Finite(n) => AlgebraicClass::Algebraic { sigma_order: n },
            SigmaOrder::CertifiedInfinite { certificate } => {
                AlgebraicClass::NonAlgebraic { certificate }
            }
            SigmaOrder::ExceedsBound { bound } => AlgebraicClass::Undetermined { bound },
        }
    }
}

impl fmt::Debug for FieldTower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldTower({})", self.key())
    }
}

/// Outcome of iterating the composite twist.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum SigmaOrder {
    Finite(u32),
    ExceedsBound { bound: u32 },
    CertifiedInfinite { certificate: String },
}

/// Whether the composite twist has finite order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum AlgebraicClass {
    Algebraic { sigma_order: u32 },
    NonAlgebraic { certificate: String },
    Undetermined { bound: u32 },
}

/// Formal word in the two involutions.
///
/// Evaluation composes right to left: the last letter acts first, so
/// `u.concat(&v)` evaluates as "apply `v`, then `u`".
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct AutWord {
    letters: Vec<u8>,
}

impl AutWord {
    pub fn identity() -> Self {
        AutWord::default()
    }

    pub fn letter(i: i64) -> Self {
        AutWord {
            letters: vec![par(i) as u8],
        }
    }

    pub fn from_letters(iter: impl IntoIterator<Item = i64>) -> Self {
        AutWord {
            letters: iter.into_iter().map(|i| par(i) as u8).collect(),
        }
    }

    /// The composite twist `tau_1 . tau_0`.
    pub fn sigma() -> Self {
        AutWord::from_letters([1, 0])
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> impl Iterator<Item = i64> + '_ {
        self.letters.iter().map(|&l| l as i64)
    }

    pub fn concat(&self, other: &AutWord) -> AutWord {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        AutWord { letters }
    }

    /// The inverse word: the same letters reversed, since each letter is
    /// an involution.
    pub fn inverse(&self) -> AutWord {
        AutWord {
            letters: self.letters.iter().rev().copied().collect(),
        }
    }

    /// Apply the word to `x`, last letter first.
    pub fn eval(&self, tower: &FieldTower, x: &FieldElement) -> FieldElement {
        self.letters
            .iter()
            .rev()
            .fold(x.clone(), |acc, &l| tower.tau(l as i64, &acc))
    }
}

impl fmt::Display for AutWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "id");
        }
        let parts: Vec<String> = self.letters.iter().map(|l| format!("tau{l}")).collect();
        write!(f, "{}", parts.join("."))
    }
}

impl FieldElement {
    pub fn tower(&self) -> &FieldTower {
        &self.tower
    }

    pub fn is_zero(&self) -> bool {
        match &self.repr {
            Repr::Coords(c) => c.iter().all(|v| v.is_zero()),
            Repr::Fn(f) => f.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        *self == self.tower.one()
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inv(&self) -> Option<FieldElement> {
        let repr = match (&self.tower.inner.kind, &self.repr) {
            (TowerKind::Number(data), Repr::Coords(c)) => Repr::Coords(data.inv_coords(c)?),
            (TowerKind::Rational(_), Repr::Fn(f)) => Repr::Fn(f.inv()?),
            _ => panic!("element representation does not match its tower"),
        };
        Some(self.tower.elem(repr))
    }

    /// The underlying rational number, when the element lies in the prime
    /// field.
    pub fn as_rational(&self) -> Option<BigRational> {
        match &self.repr {
            Repr::Coords(c) => {
                if c[1..].iter().all(|v| v.is_zero()) {
                    Some(c[0].clone())
                } else {
                    None
                }
            }
            Repr::Fn(f) => f.as_constant(),
        }
    }

    fn binop(
        &self,
        other: &FieldElement,
        coords: impl FnOnce(&NumberFieldData, &[BigRational], &[BigRational]) -> Vec<BigRational>,
        fns: impl FnOnce(&RatFn, &RatFn) -> RatFn,
    ) -> FieldElement {
        debug_assert!(
            self.tower.same(&other.tower),
            "arithmetic across different towers"
        );
        let repr = match (&self.tower.inner.kind, &self.repr, &other.repr) {
            (TowerKind::Number(data), Repr::Coords(a), Repr::Coords(b)) => {
                Repr::Coords(coords(data, a, b))
            }
            (TowerKind::Rational(_), Repr::Fn(a), Repr::Fn(b)) => Repr::Fn(fns(a, b)),
            _ => panic!("element representation does not match its tower"),
        };
        self.tower.elem(repr)
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        debug_assert!(
            self.tower.same(&other.tower),
            "comparison across different towers"
        );
        self.repr == other.repr
    }
}

impl Eq for FieldElement {}

impl Add for &FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: &FieldElement) -> FieldElement {
        self.binop(
            rhs,
            |_, a, b| a.iter().zip(b).map(|(x, y)| x + y).collect(),
            RatFn::add,
        )
    }
}

impl Sub for &FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: &FieldElement) -> FieldElement {
        self.binop(
            rhs,
            |_, a, b| a.iter().zip(b).map(|(x, y)| x - y).collect(),
            RatFn::sub,
        )
    }
}

impl Mul for &FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: &FieldElement) -> FieldElement {
        self.binop(rhs, |data, a, b| data.mul_coords(a, b), RatFn::mul)
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        let repr = match &self.repr {
            Repr::Coords(c) => Repr::Coords(c.iter().map(|v| -v).collect()),
            Repr::Fn(f) => Repr::Fn(f.neg()),
        };
        self.tower.elem(repr)
    }
}

/// Field division.
///
/// # Panics
///
/// Panics on division by zero; use [`FieldElement::inv`] when the divisor
/// may vanish.
impl Div for &FieldElement {
    type Output = FieldElement;
    fn div(self, rhs: &FieldElement) -> FieldElement {
        let inv = rhs.inv().expect("field division by zero");
        self * &inv
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: &FieldElement) -> FieldElement {
                (&self).$method(rhs)
            }
        }
        impl $trait<FieldElement> for &FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

impl AddAssign<&FieldElement> for FieldElement {
    fn add_assign(&mut self, rhs: &FieldElement) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&FieldElement> for FieldElement {
    fn sub_assign(&mut self, rhs: &FieldElement) {
        *self = &*self - rhs;
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.tower.inner.kind, &self.repr) {
            (TowerKind::Number(data), Repr::Coords(c)) => {
                if self.is_zero() {
                    return write!(f, "0");
                }
                let mut first = true;
                for (k, v) in c.iter().enumerate() {
                    if v.is_zero() {
                        continue;
                    }
                    if first {
                        if v.is_negative() {
                            write!(f, "-")?;
                        }
                    } else if v.is_negative() {
                        write!(f, " - ")?;
                    } else {
                        write!(f, " + ")?;
                    }
                    first = false;
                    let mag = v.abs();
                    if k == 0 {
                        write!(f, "{mag}")?;
                    } else if mag.is_one() {
                        write!(f, "{}", data.basis_names[k])?;
                    } else {
                        write!(f, "{mag}*{}", data.basis_names[k])?;
                    }
                }
                Ok(())
            }
            (TowerKind::Rational(_), Repr::Fn(r)) => write!(f, "{r}"),
            _ => unreachable!(),
        }
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} in {}", self.tower.key())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;

    #[test]
    fn subfield_membership_follows_the_involutions() {
        let k = instances::biquadratic();
        let basis = k.field_basis().unwrap();
        let (sqrt2, sqrt3, sqrt6) = (&basis[1], &basis[2], &basis[3]);
        assert!(k.in_subfield(0, sqrt2));
        assert!(!k.in_subfield(0, sqrt3));
        assert!(!k.in_subfield(0, sqrt6));
        assert!(k.in_subfield(1, sqrt3));
        assert!(!k.in_subfield(1, sqrt2));
        // indices reduce mod 2
        assert!(k.in_subfield(2, sqrt2));
        assert!(k.in_subfield(-1, sqrt3));
    }

    #[test]
    fn trace_projects_onto_the_subfield() {
        let k = instances::biquadratic();
        let basis = k.field_basis().unwrap();
        assert_eq!(k.trace_to_subfield(0, &basis[2]), k.zero());
        assert_eq!(k.trace_to_subfield(0, &basis[1]), basis[1]);

        let r = instances::rational_function();
        let t = &r.generators()[0];
        assert_eq!(r.trace_to_subfield(0, t), r.zero());
        assert_eq!(r.trace_to_subfield(1, t), r.one());
    }

    #[test]
    fn decomposition_over_each_subfield_round_trips() {
        let r = instances::rational_function();
        let t = &r.generators()[0];
        let (c0, c1) = r.decompose_over_subfield(0, t);
        assert_eq!((c0, c1), (r.zero(), r.one()));
        let (c0, c1) = r.decompose_over_subfield(1, t);
        assert_eq!((c0, c1), (r.one(), r.one()));

        let d4 = instances::d4_quartic();
        let basis = d4.field_basis().unwrap();
        let q = &basis[1];
        let iq = &basis[5];
        let (c0, c1) = d4.decompose_over_subfield(1, q);
        assert_eq!(c0, d4.zero());
        assert_eq!(c1, -iq);
        // reassemble: q = 0 + (-iq) * i
        assert_eq!(&c1 * &d4.w(1), *q);
    }

    #[test]
    fn word_evaluation_composes_right_to_left() {
        let r = instances::rational_function();
        let t = &r.generators()[0];
        let shift_down = AutWord::sigma().eval(&r, t);
        assert_eq!(shift_down, t - &r.from_i64(2));
        let shift_up = AutWord::from_letters([0, 1]).eval(&r, t);
        assert_eq!(shift_up, t + &r.from_i64(2));
        assert_eq!(AutWord::identity().eval(&r, t), *t);
        assert_eq!(AutWord::from_letters([0, 0]).eval(&r, t), *t);
        assert_eq!(
            AutWord::letter(1).concat(&AutWord::letter(0)).eval(&r, t),
            shift_down
        );
    }

    #[test]
    fn twist_orders_match_the_instances() {
        assert_eq!(instances::biquadratic().sigma_order(8), SigmaOrder::Finite(2));
        assert_eq!(instances::d4_quartic().sigma_order(8), SigmaOrder::Finite(2));
        match instances::rational_function().sigma_order(100) {
            SigmaOrder::CertifiedInfinite { certificate } => {
                assert!(certificate.contains("t -> t - 2"), "got: {certificate}");
            }
            other => panic!("expected a certificate, got {other:?}"),
        }
    }

    #[test]
    fn classification_is_three_way() {
        assert_eq!(
            instances::biquadratic().classify(64),
            AlgebraicClass::Algebraic { sigma_order: 2 }
        );
        assert_eq!(
            instances::d4_quartic().classify(64),
            AlgebraicClass::Algebraic { sigma_order: 2 }
        );
        assert!(matches!(
            instances::rational_function().classify(64),
            AlgebraicClass::NonAlgebraic { .. }
        ));
    }

    #[test]
    fn inverses_and_division() {
        let k = instances::biquadratic();
        let basis = k.field_basis().unwrap();
        let x = &k.one() + &basis[1]; // 1 + sqrt2
        let inv = x.inv().unwrap();
        assert_eq!(inv, &basis[1] - &k.one());
        assert_eq!(&x * &inv, k.one());
        assert!(k.zero().inv().is_none());

        let r = instances::rational_function();
        let t = &r.generators()[0];
        let f = t / &(t - &r.one());
        assert_eq!(&f * &(t - &r.one()), *t);
    }

    #[test]
    #[should_panic(expected = "field division by zero")]
    fn division_by_zero_panics() {
        let k = instances::biquadratic();
        let _ = &k.one() / &k.zero();
    }

    #[test]
    fn split_against_an_arbitrary_anti_invariant() {
        let r = instances::rational_function();
        let t = &r.generators()[0];
        // y = 5t - 2 = 3 + 5*(t-1) over K_1 with w = t - 1
        let y = &(&r.from_i64(5) * t) - &r.from_i64(2);
        let w = t - &r.one();
        let (c, a) = r.split_in_w_basis(1, &y, &w).unwrap();
        assert_eq!((c, a), (r.from_i64(3), r.from_i64(5)));

        let d4 = instances::d4_quartic();
        let basis = d4.field_basis().unwrap();
        // y = q + q^2 * i over K_0 with w = i
        let y = &basis[1] + &basis[6];
        let (c, a) = d4.split_in_w_basis(0, &y, &d4.w(0)).unwrap();
        assert_eq!((c, a), (basis[1].clone(), basis[2].clone()));

        // w inside the subfield: no basis, must refuse
        assert!(d4.split_in_w_basis(0, &y, &basis[2]).is_none());
    }

    #[test]
    fn quartic_intersection_contains_sqrt2_as_q_squared() {
        let d4 = instances::d4_quartic();
        let q2 = &d4.field_basis().unwrap()[2];
        assert!(d4.in_subfield(0, q2));
        assert!(d4.in_subfield(1, q2));
        let inter = d4.intersection_basis().unwrap();
        assert_eq!(inter.len(), 2);
        assert_eq!(&inter[1], q2);
        assert_eq!(instances::biquadratic().intersection_basis().unwrap().len(), 1);
    }

    #[test]
    fn sigma_flips_both_square_roots_in_the_biquadratic_tower() {
        let k = instances::biquadratic();
        let basis = k.field_basis().unwrap();
        assert_eq!(k.sigma(&basis[1]), -&basis[1]);
        assert_eq!(k.sigma(&basis[2]), -&basis[2]);
        assert_eq!(k.sigma(&basis[3]), basis[3]);
    }
}
