//! Sign-twisted tensor spaces `T_ij`.
//!
//! For integers `i <= j`, the space `T_ij` is spanned over the field by
//! components indexed by *sign patterns*: one letter per interior position
//! `p` with `i < p < j`, each letter either the identity or the involution
//! `tau_p` (`tau_0` or `tau_1` by the parity of `p`). `T_ii` is a copy of
//! the subfield `K_i`, and `T_{i,i+1}` a copy of the full field.
//!
//! The product `star_mul: T_ij x T_jl -> T_il` concatenates patterns: for
//! every component pair, the junction position `j` contributes one term
//! with the identity letter and one with `tau_j` applied to the right
//! factor, and the left factor's pattern acts on the whole right coefficient
//! through its *bar word* (the set letters read left to right, the last one
//! applied first). Everything in the quotient layer reduces to this one
//! product.

use crate::field::{AutWord, FieldElement, FieldTower};
use crate::Error;
use std::collections::BTreeMap;
use std::fmt;

/// Letters at the interior positions of a span, packed little-endian: bit
/// `l` is the letter at position `start + l + 1`, set meaning "the
/// involution of that position's parity".
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SignPattern {
    bits: u32,
    len: u32,
}

impl SignPattern {
    pub fn new(bits: u32, len: u32) -> Self {
        assert!(len < 32, "pattern too long");
        assert!(
            len == 32 || bits < (1u32 << len),
            "bits 0x{bits:x} out of range for length {len}"
        );
        SignPattern { bits, len }
    }

    /// The unique pattern on a span with no interior positions.
    pub fn empty() -> Self {
        SignPattern { bits: 0, len: 0 }
    }

    pub fn identity(len: u32) -> Self {
        SignPattern::new(0, len)
    }

    /// Every letter an involution; the full twist of the span.
    pub fn all_ones(len: u32) -> Self {
        SignPattern::new(((1u64 << len) - 1) as u32, len)
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn len(&self) -> u32 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bit(&self, l: u32) -> bool {
        debug_assert!(l < self.len);
        self.bits >> l & 1 == 1
    }

    pub fn with_bit(&self, l: u32, set: bool) -> Self {
        debug_assert!(l < self.len);
        let bits = if set {
            self.bits | (1 << l)
        } else {
            self.bits & !(1 << l)
        };
        SignPattern::new(bits, self.len)
    }

    /// Left pattern, junction letter, right pattern, in position order.
    pub fn concat(&self, junction: bool, right: &SignPattern) -> Self {
        let bits = self.bits | (u32::from(junction) << self.len) | (right.bits << (self.len + 1));
        SignPattern::new(bits, self.len + 1 + right.len)
    }

    /// The composite of the set letters for a span starting at `start`,
    /// read left to right (so evaluation applies the rightmost set letter
    /// first).
    pub fn bar_word(&self, start: i64) -> AutWord {
        AutWord::from_letters(
            (0..self.len)
                .filter(|&l| self.bit(l))
                .map(|l| start + i64::from(l) + 1),
        )
    }
}

impl fmt::Display for SignPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len == 0 {
            return write!(f, "e");
        }
        for l in 0..self.len {
            write!(f, "{}", if self.bit(l) { 't' } else { '1' })?;
        }
        Ok(())
    }
}

/// Element of `T_ij`, stored sparsely: absent patterns are zero.
///
/// # Invariants
///
/// * `start <= end`; the pattern length is `end - start - 1` (zero for
///   spans of degree zero or one),
/// * stored coefficients are nonzero,
/// * a degree-zero element's single coefficient lies in `K_start`.
#[derive(Clone)]
pub struct TensorElement {
    tower: FieldTower,
    start: i64,
    end: i64,
    comps: BTreeMap<u32, FieldElement>,
}

impl TensorElement {
    pub fn zero(tower: &FieldTower, start: i64, end: i64) -> Self {
        assert!(start <= end, "reversed span {start}..{end}");
        TensorElement {
            tower: tower.clone(),
            start,
            end,
            comps: BTreeMap::new(),
        }
    }

    /// Degree-zero element: a scalar from `K_start`.
    pub fn scalar(tower: &FieldTower, start: i64, value: FieldElement) -> Self {
        debug_assert!(
            tower.in_subfield(start, &value),
            "degree-zero coefficient must lie in the start subfield"
        );
        let mut out = TensorElement::zero(tower, start, start);
        out.set(SignPattern::empty(), value);
        out
    }

    /// Single-component element.
    pub fn inject(
        tower: &FieldTower,
        start: i64,
        end: i64,
        pattern: SignPattern,
        value: FieldElement,
    ) -> Self {
        let mut out = TensorElement::zero(tower, start, end);
        assert_eq!(
            i64::from(pattern.len()),
            (end - start - 1).max(0),
            "pattern length does not match the span"
        );
        out.set(pattern, value);
        out
    }

    /// Degree-one element over `start..start+1`.
    pub fn embed1(tower: &FieldTower, start: i64, value: FieldElement) -> Self {
        TensorElement::inject(tower, start, start + 1, SignPattern::empty(), value)
    }

    pub fn tower(&self) -> &FieldTower {
        &self.tower
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    pub fn end(&self) -> i64 {
        self.end
    }

    pub fn degree(&self) -> i64 {
        self.end - self.start
    }

    pub fn pattern_len(&self) -> u32 {
        (self.end - self.start - 1).max(0) as u32
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn component(&self, pattern: &SignPattern) -> Option<&FieldElement> {
        debug_assert_eq!(pattern.len(), self.pattern_len());
        self.comps.get(&pattern.bits())
    }

    pub fn components(&self) -> impl Iterator<Item = (SignPattern, &FieldElement)> {
        let len = self.pattern_len();
        self.comps
            .iter()
            .map(move |(&bits, v)| (SignPattern::new(bits, len), v))
    }

    fn set(&mut self, pattern: SignPattern, value: FieldElement) {
        debug_assert_eq!(pattern.len(), self.pattern_len());
        if value.is_zero() {
            self.comps.remove(&pattern.bits());
        } else {
            self.comps.insert(pattern.bits(), value);
        }
    }

    fn add_to(&mut self, bits: u32, value: FieldElement) {
        if value.is_zero() {
            return;
        }
        match self.comps.entry(bits) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(value);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += &value;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn assert_same_span(&self, other: &Self) {
        assert!(
            self.tower.same(&other.tower) && self.start == other.start && self.end == other.end,
            "tensor elements from different spans: {}..{} vs {}..{}",
            self.start,
            self.end,
            other.start,
            other.end
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.assert_same_span(other);
        let mut out = self.clone();
        for (&bits, v) in &other.comps {
            out.add_to(bits, v.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        TensorElement {
            tower: self.tower.clone(),
            start: self.start,
            end: self.end,
            comps: self.comps.iter().map(|(&b, v)| (b, -v)).collect(),
        }
    }

    /// Left module action of the full field: componentwise multiplication.
    pub fn scale_left(&self, f: &FieldElement) -> Self {
        let mut out = TensorElement::zero(&self.tower, self.start, self.end);
        for (&bits, v) in &self.comps {
            out.add_to(bits, f * v);
        }
        out
    }

    /// Right module action: each component is multiplied by its own bar
    /// word's image of `f`.
    pub fn scale_right(&self, f: &FieldElement) -> Self {
        let mut out = TensorElement::zero(&self.tower, self.start, self.end);
        for (pattern, v) in self.components() {
            let tw = pattern.bar_word(self.start).eval(&self.tower, f);
            out.add_to(pattern.bits(), v * tw);
        }
        out
    }

    /// Coordinates over `K_start`: for each pattern in ascending bit order,
    /// the two components of the coefficient in `F = K + K*w`. Degree-zero
    /// elements have a single coordinate.
    pub fn coords_over_start_field(&self) -> Vec<FieldElement> {
        if self.degree() == 0 {
            let v = self
                .comps
                .get(&0)
                .cloned()
                .unwrap_or_else(|| self.tower.zero());
            return vec![v];
        }
        let n = self.pattern_len();
        let mut out = Vec::with_capacity(1 << (n + 1));
        for bits in 0..(1u32 << n) {
            match self.comps.get(&bits) {
                Some(v) => {
                    let (c0, c1) = self.tower.decompose_over_subfield(self.start, v);
                    out.push(c0);
                    out.push(c1);
                }
                None => {
                    out.push(self.tower.zero());
                    out.push(self.tower.zero());
                }
            }
        }
        out
    }

    /// Inverse of [`coords_over_start_field`]; the coordinates must lie in
    /// the start subfield, like any coordinates over `K_start`.
    pub fn from_coords(
        tower: &FieldTower,
        start: i64,
        end: i64,
        coords: &[FieldElement],
    ) -> Self {
        debug_assert!(
            coords.iter().all(|c| tower.in_subfield(start, c)),
            "coordinates over K_start must lie in K_start"
        );
        let mut out = TensorElement::zero(tower, start, end);
        if end == start {
            assert_eq!(coords.len(), 1);
            out.set(SignPattern::empty(), coords[0].clone());
            return out;
        }
        let n = out.pattern_len();
        assert_eq!(coords.len(), 1 << (n + 1), "coordinate length mismatch");
        let w = tower.w(start);
        for bits in 0..(1u32 << n) {
            let k = 2 * bits as usize;
            let v = &coords[k] + &(&coords[k + 1] * &w);
            out.add_to(bits, v);
        }
        out
    }

    pub(crate) fn into_parts(self) -> (FieldTower, i64, i64, BTreeMap<u32, FieldElement>) {
        (self.tower, self.start, self.end, self.comps)
    }

    pub(crate) fn from_parts(
        tower: FieldTower,
        start: i64,
        end: i64,
        comps: BTreeMap<u32, FieldElement>,
    ) -> Self {
        let mut out = TensorElement {
            tower,
            start,
            end,
            comps,
        };
        out.comps.retain(|_, v| !v.is_zero());
        out
    }
}

impl PartialEq for TensorElement {
    fn eq(&self, other: &Self) -> bool {
        self.start == other.start && self.end == other.end && self.comps == other.comps
    }
}

impl Eq for TensorElement {}

impl fmt::Display for TensorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.comps.is_empty() {
            return write!(f, "0 @ {}..{}", self.start, self.end);
        }
        let mut first = true;
        for (pattern, v) in self.components() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "[{pattern}]({v})")?;
        }
        write!(f, " @ {}..{}", self.start, self.end)
    }
}

impl fmt::Debug for TensorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// The multilinear map from `n` field elements into `T_{start, start+n}`:
/// the component at a pattern multiplies each factor by the bar word of the
/// pattern letters to its left.
pub fn mu(tower: &FieldTower, start: i64, factors: &[FieldElement]) -> Result<TensorElement, Error> {
    if factors.is_empty() {
        return Err(Error::EmptyFactors);
    }
    let n = factors.len();
    let end = start + n as i64;
    let mut out = TensorElement::zero(tower, start, end);
    let nbits = (n - 1) as u32;
    for bits in 0..(1u32 << nbits) {
        let pattern = SignPattern::new(bits, nbits);
        let mut value = factors[0].clone();
        for (m, x) in factors.iter().enumerate().skip(1) {
            // the factor at span (start+m, start+m+1) is twisted by every
            // set letter to its left: bits 0..m
            let prefix = SignPattern::new(bits & ((1 << m) - 1), m as u32);
            let y = prefix.bar_word(start).eval(tower, x);
            value = &value * &y;
        }
        out.set(pattern, value);
    }
    Ok(out)
}

/// The twisted product `T_ij x T_jl -> T_il`.
///
/// Fails when the spans do not meet (`a.end != b.start`). Degree-zero
/// factors act as subfield scalars on the matching side.
pub fn star_mul(a: &TensorElement, b: &TensorElement) -> Result<TensorElement, Error> {
    assert!(a.tower.same(&b.tower), "factors from different towers");
    if a.end != b.start {
        return Err(Error::IndexMismatch {
            left_end: a.end,
            right_start: b.start,
        });
    }
    let tower = &a.tower;
    if a.degree() == 0 {
        let v = a.comps.get(&0).cloned().unwrap_or_else(|| tower.zero());
        return Ok(b.scale_left(&v));
    }
    if b.degree() == 0 {
        let v = b.comps.get(&0).cloned().unwrap_or_else(|| tower.zero());
        return Ok(a.scale_right(&v));
    }
    let junction = a.end;
    let mut out = TensorElement::zero(tower, a.start, b.end);
    for (pa, va) in a.components() {
        let bar = pa.bar_word(a.start);
        for (pb, vb) in b.components() {
            let plain = bar.eval(tower, vb);
            let twisted = bar.eval(tower, &tower.tau(junction, vb));
            out.add_to(pa.concat(false, &pb).bits(), va * &plain);
            out.add_to(pa.concat(true, &pb).bits(), va * &twisted);
        }
    }
    Ok(out)
}

/// Product of a chain of tensor factors, left to right.
pub fn star_chain(factors: &[TensorElement]) -> Result<TensorElement, Error> {
    let (first, rest) = factors.split_first().ok_or(Error::EmptyFactors)?;
    let mut acc = first.clone();
    for f in rest {
        acc = star_mul(&acc, f)?;
    }
    Ok(acc)
}

/// The quadratic element `h_l` in `T_{l,l+2}`: coefficient 2 on the
/// identity pattern, nothing on the twisted one.
pub fn h_elem(tower: &FieldTower, l: i64) -> TensorElement {
    TensorElement::inject(
        tower,
        l,
        l + 2,
        SignPattern::identity(1),
        tower.from_i64(2),
    )
}

/// The companion element `g_l`: coefficient `2 * w_{l+1}` on the identity
/// pattern.
pub fn g_elem(tower: &FieldTower, l: i64) -> TensorElement {
    TensorElement::inject(
        tower,
        l,
        l + 2,
        SignPattern::identity(1),
        &tower.from_i64(2) * &tower.w(l + 1),
    )
}

/// `mu` applied to copies of `1`: the unit chain of the span.
pub fn unit_chain(tower: &FieldTower, start: i64, end: i64) -> TensorElement {
    assert!(end > start);
    let ones = vec![tower.one(); (end - start) as usize];
    mu(tower, start, &ones).expect("nonempty by construction")
}

/// Dimension of `T_ij` over `K_i`.
pub fn dim_over_start_field(start: i64, end: i64) -> u64 {
    debug_assert!(end >= start);
    1u64 << (end - start)
}

/// The `K_start`-basis of `T_{start,end}` in coordinate order: for each
/// pattern in ascending bit order, the unit coefficient then `w_start`.
/// Degree zero yields the single scalar `1`.
pub fn standard_basis(tower: &FieldTower, start: i64, end: i64) -> Vec<TensorElement> {
    if end == start {
        return vec![TensorElement::scalar(tower, start, tower.one())];
    }
    let len = (end - start - 1) as u32;
    let w = tower.w(start);
    let mut out = Vec::with_capacity(2 << len);
    for bits in 0..(1u32 << len) {
        let p = SignPattern::new(bits, len);
        out.push(TensorElement::inject(tower, start, end, p, tower.one()));
        out.push(TensorElement::inject(tower, start, end, p, w.clone()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;

    fn pat(bits: u32, len: u32) -> SignPattern {
        SignPattern::new(bits, len)
    }

    #[test]
    fn patterns_concatenate_in_position_order() {
        let left = pat(0b101, 3);
        let right = pat(0b01, 2);
        let joined = left.concat(true, &right);
        assert_eq!(joined.len(), 6);
        // low bits: left pattern, then the junction, then the right pattern
        assert_eq!(joined.bits(), 0b01_1_101);
        assert!(joined.bit(3));
        assert_eq!(format!("{joined}"), "t1ttt1");
    }

    #[test]
    fn bar_words_compose_left_to_right() {
        let r = instances::rational_function();
        let t = &r.generators()[0];
        // positions 1 and 2 set, starting at 0: word tau1.tau0, so the
        // composite twist: t -> t - 2
        let w = pat(0b11, 2).bar_word(0);
        assert_eq!(w.eval(&r, t), t - &r.from_i64(2));
        // only position 2 set
        let w = pat(0b10, 2).bar_word(0);
        assert_eq!(w.eval(&r, t), -t);
        // empty pattern: identity
        assert_eq!(pat(0, 0).bar_word(5).eval(&r, t), *t);
    }

    #[test]
    fn mu_matches_hand_values_and_shifts_by_two() {
        let k = instances::biquadratic();
        let b = k.field_basis().unwrap();
        // position 1 carries tau_1, which negates sqrt2
        let m = mu(&k, 0, &[b[2].clone(), b[1].clone()]).unwrap();
        assert_eq!(m.component(&pat(0, 1)), Some(&b[3]));
        assert_eq!(m.component(&pat(1, 1)), Some(&(-&b[3])));

        let r = instances::rational_function();
        let t = r.generators()[0].clone();
        let m0 = mu(&r, 0, &[t.clone(), t.clone()]).unwrap();
        assert_eq!(m0.component(&pat(0, 1)), Some(&(&t * &t)));
        // position 1 carries tau_1: t * (2 - t)
        let expect = &t * &(&r.from_i64(2) - &t);
        assert_eq!(m0.component(&pat(1, 1)), Some(&expect));
        let m1 = mu(&r, 1, &[t.clone(), t.clone()]).unwrap();
        // position 2 carries tau_0: t * (-t)
        assert_eq!(m1.component(&pat(1, 1)), Some(&(-&(&t * &t))));

        // two-periodicity: same component values two indices later
        let m2 = mu(&r, 2, &[t.clone(), t.clone()]).unwrap();
        assert_eq!(m2.component(&pat(1, 1)), m0.component(&pat(1, 1)));
    }

    #[test]
    fn mu_equals_left_fold_of_star_over_degree_one_factors() {
        let d4 = instances::d4_quartic();
        let basis = d4.field_basis().unwrap();
        let xs = [basis[1].clone(), basis[4].clone(), basis[6].clone()];
        let m = mu(&d4, -1, &xs).unwrap();
        let folded = star_chain(&[
            TensorElement::embed1(&d4, -1, xs[0].clone()),
            TensorElement::embed1(&d4, 0, xs[1].clone()),
            TensorElement::embed1(&d4, 1, xs[2].clone()),
        ])
        .unwrap();
        assert_eq!(m, folded);
    }

    #[test]
    fn star_respects_spans_and_reports_mismatches() {
        let k = instances::biquadratic();
        let a = unit_chain(&k, 0, 2);
        let b = unit_chain(&k, 3, 4);
        match star_mul(&a, &b) {
            Err(Error::IndexMismatch {
                left_end: 2,
                right_start: 3,
            }) => {}
            other => panic!("expected an index mismatch, got {other:?}"),
        }
    }

    #[test]
    fn scalars_multiply_componentwise_with_the_right_twist() {
        let r = instances::rational_function();
        let t = r.generators()[0].clone();
        let x = mu(&r, 0, &[t.clone(), t.clone()]).unwrap();
        // left scalar from K_0 (t^2 is tau_0-fixed)
        let c = TensorElement::scalar(&r, 0, &t * &t);
        let prod = star_mul(&c, &x).unwrap();
        assert_eq!(prod, x.scale_left(&(&t * &t)));
        // right scalar from K_2 = K_0: component at the twisted pattern
        // picks up tau_1 of the scalar
        let prod = star_mul(&x, &TensorElement::scalar(&r, 2, &t * &t)).unwrap();
        let tw = r.tau(1, &(&t * &t));
        assert_eq!(
            prod.component(&pat(1, 1)).unwrap(),
            &(x.component(&pat(1, 1)).unwrap() * &tw)
        );
        assert_eq!(
            prod.component(&pat(0, 1)).unwrap(),
            &(x.component(&pat(0, 1)).unwrap() * &(&t * &t))
        );
    }

    #[test]
    fn star_is_associative_across_degrees() {
        let d4 = instances::d4_quartic();
        let basis = d4.field_basis().unwrap();
        let a = mu(&d4, 0, &[basis[1].clone(), basis[4].clone()]).unwrap();
        let b = mu(&d4, 2, &[basis[2].clone()]).unwrap();
        let c = mu(&d4, 3, &[basis[5].clone(), basis[7].clone()]).unwrap();
        let ab_c = star_mul(&star_mul(&a, &b).unwrap(), &c).unwrap();
        let a_bc = star_mul(&a, &star_mul(&b, &c).unwrap()).unwrap();
        assert_eq!(ab_c, a_bc);

        // with a degree-zero middle factor
        let s = TensorElement::scalar(&d4, 2, basis[2].clone());
        let c2 = mu(&d4, 2, &[basis[3].clone(), basis[6].clone()]).unwrap();
        let ab_c = star_mul(&star_mul(&a, &s).unwrap(), &c2).unwrap();
        let a_bc = star_mul(&a, &star_mul(&s, &c2).unwrap()).unwrap();
        assert_eq!(ab_c, a_bc);
    }

    #[test]
    fn quadratic_elements_sit_on_the_identity_pattern() {
        let r = instances::rational_function();
        let h = h_elem(&r, 0);
        assert_eq!(h.component(&pat(0, 1)), Some(&r.from_i64(2)));
        assert_eq!(h.component(&pat(1, 1)), None);
        let g = g_elem(&r, 0);
        // w at position 1 is t - 1, doubled
        let expect = &r.from_i64(2) * &(&r.generators()[0] - &r.one());
        assert_eq!(g.component(&pat(0, 1)), Some(&expect));
        let g = g_elem(&r, 1);
        // w at position 2 is t, doubled
        let expect = &r.from_i64(2) * &r.generators()[0];
        assert_eq!(g.component(&pat(0, 1)), Some(&expect));
    }

    #[test]
    fn coordinates_over_the_start_subfield_round_trip() {
        let k = instances::biquadratic();
        let b = k.field_basis().unwrap();
        let x = mu(&k, 1, &[b[1].clone(), &b[2] + &k.one(), b[3].clone()]).unwrap();
        let coords = x.coords_over_start_field();
        assert_eq!(coords.len(), 8);
        for c in &coords {
            assert!(k.in_subfield(1, c), "coordinate {c} outside K_1");
        }
        let back = TensorElement::from_coords(&k, 1, 4, &coords);
        assert_eq!(back, x);

        // degree zero: a single coordinate
        let s = TensorElement::scalar(&k, 0, b[1].clone());
        assert_eq!(s.coords_over_start_field(), vec![b[1].clone()]);
    }

    #[test]
    fn empty_factor_lists_are_rejected() {
        let k = instances::biquadratic();
        assert!(matches!(mu(&k, 0, &[]), Err(Error::EmptyFactors)));
        assert!(matches!(star_chain(&[]), Err(Error::EmptyFactors)));
    }
}
