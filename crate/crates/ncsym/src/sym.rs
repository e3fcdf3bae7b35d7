//! The quadratic quotient `A_ij = T_ij / R_ij` and its normal form.
//!
//! The relation space `R_ij` is the left `K_i`-span of all products
//! `u * h_l * v` with `u` in `T_il`, `v` in `T_{l+2,j}`, where `h_l` carries
//! coefficient 2 on the identity pattern of the length-two span `(l, l+2)`.
//! In degree `n` the quotient has dimension `n + 1` over `K_i`, and every
//! class has a unique representative produced by [`section`] from `n/2 + 1`
//! *slots*: slot `m` is the coefficient riding on the fully twisted pattern
//! of degree `n - 2(k - m)`, right-multiplied by a chain of `g` elements up
//! to the top. For even degree, slot 0 lies in `K_i`.
//!
//! [`project`] computes the slots by a staged sparse sweep over the pattern
//! keys. Each stage subtracts explicit relation elements; in certification
//! mode ([`project_with_witness`]) those subtractions are recorded and can
//! be replayed through the tensor product, so the claim "kernel of the
//! projection = relation span" is checked a posteriori rather than assumed.
//! [`certified_dims`] packages that check per degree (cached per tower and
//! parity, since all structure is two-periodic).
//!
//! On top of the quotient sit the distinguished elements `g = project(g_l)`
//! and their chains: `g` is normal (checked by [`check_g_normality`]), and
//! one-sided division by `g` powers [`left_divide_by_g`],
//! [`right_divide_by_g`] underlies the conjugation automorphism
//! [`conjugate_by_g`] and the localized algebra in the next layer.

use crate::field::{par, FieldElement, FieldTower};
use crate::linalg;
use crate::tensor::{
    g_elem, h_elem, standard_basis, star_chain, star_mul, SignPattern, TensorElement,
};
use crate::Error;
use num::bigint::BigInt;
use num::rational::BigRational;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::{Mutex, OnceLock};
use std::sync::Arc;

fn half(tower: &FieldTower) -> FieldElement {
    tower.from_rational(&BigRational::new(BigInt::from(1), BigInt::from(2)))
}

fn quarter(tower: &FieldTower) -> FieldElement {
    tower.from_rational(&BigRational::new(BigInt::from(1), BigInt::from(4)))
}

/// Element of the quotient `A_{start,end}` in normal form.
///
/// # Invariants
///
/// * `slots.len() == (end - start) / 2 + 1`,
/// * for even degree, `slots[0]` lies in `K_start`.
#[derive(Clone)]
pub struct SymElement {
    tower: FieldTower,
    start: i64,
    end: i64,
    slots: Vec<FieldElement>,
}

impl SymElement {
    fn slot_count(n: i64) -> usize {
        (n / 2 + 1) as usize
    }

    pub fn zero(tower: &FieldTower, start: i64, end: i64) -> Self {
        assert!(start <= end, "reversed span {start}..{end}");
        SymElement {
            tower: tower.clone(),
            start,
            end,
            slots: vec![tower.zero(); SymElement::slot_count(end - start)],
        }
    }

    /// Degree-zero element from a `K_start` scalar.
    pub fn scalar(tower: &FieldTower, start: i64, value: FieldElement) -> Self {
        debug_assert!(tower.in_subfield(start, &value));
        SymElement {
            tower: tower.clone(),
            start,
            end: start,
            slots: vec![value],
        }
    }

    pub fn from_slots(tower: &FieldTower, start: i64, end: i64, slots: Vec<FieldElement>) -> Self {
        assert!(start <= end, "reversed span {start}..{end}");
        assert_eq!(slots.len(), SymElement::slot_count(end - start));
        debug_assert!(
            (end - start) % 2 != 0 || tower.in_subfield(start, &slots[0]),
            "slot 0 of an even-degree element must lie in the start subfield"
        );
        SymElement {
            tower: tower.clone(),
            start,
            end,
            slots,
        }
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

    pub fn slots(&self) -> &[FieldElement] {
        &self.slots
    }

    pub fn is_zero(&self) -> bool {
        self.slots.iter().all(FieldElement::is_zero)
    }

    fn assert_same_span(&self, other: &Self) {
        assert!(
            self.tower.same(&other.tower) && self.start == other.start && self.end == other.end,
            "elements from different spans: {}..{} vs {}..{}",
            self.start,
            self.end,
            other.start,
            other.end
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.assert_same_span(other);
        SymElement {
            tower: self.tower.clone(),
            start: self.start,
            end: self.end,
            slots: self
                .slots
                .iter()
                .zip(&other.slots)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.assert_same_span(other);
        SymElement {
            tower: self.tower.clone(),
            start: self.start,
            end: self.end,
            slots: self
                .slots
                .iter()
                .zip(&other.slots)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        SymElement {
            tower: self.tower.clone(),
            start: self.start,
            end: self.end,
            slots: self.slots.iter().map(|a| -a).collect(),
        }
    }

    /// Left action of `K_start`: slotwise multiplication.
    pub fn mul_left_subfield(&self, c: &FieldElement) -> Self {
        assert!(
            self.tower.in_subfield(self.start, c),
            "left scalar must lie in the start subfield"
        );
        SymElement {
            tower: self.tower.clone(),
            start: self.start,
            end: self.end,
            slots: self.slots.iter().map(|a| c * a).collect(),
        }
    }

    /// Right action of `K_end`: slot `m` is multiplied by the image of `c`
    /// under the full interior word of the span `(start, start + 2m)`.
    /// Agrees with `sym_mul` against the degree-zero element `c` (covered
    /// by tests).
    pub fn mul_right_subfield(&self, c: &FieldElement) -> Self {
        assert!(
            self.tower.in_subfield(self.end, c),
            "right scalar must lie in the end subfield"
        );
        let slots = self
            .slots
            .iter()
            .enumerate()
            .map(|(m, a)| {
                let word = crate::field::AutWord::from_letters(
                    (self.start + 1)..(self.start + 2 * m as i64),
                );
                a * &word.eval(&self.tower, c)
            })
            .collect();
        SymElement {
            tower: self.tower.clone(),
            start: self.start,
            end: self.end,
            slots,
        }
    }

    /// Coordinates over `K_start`, length `degree + 1`: slot 0 contributes
    /// one coordinate in even degree and two otherwise, every other slot
    /// two (its components along `1` and `w_start`).
    pub fn coords_over_start(&self) -> Vec<FieldElement> {
        let even = self.degree() % 2 == 0;
        let mut out = Vec::with_capacity((self.degree() + 1) as usize);
        for (m, a) in self.slots.iter().enumerate() {
            if even && m == 0 {
                debug_assert!(self.tower.in_subfield(self.start, a));
                out.push(a.clone());
            } else {
                let (c0, c1) = self.tower.decompose_over_subfield(self.start, a);
                out.push(c0);
                out.push(c1);
            }
        }
        out
    }

    /// Inverse of [`coords_over_start`].
    pub fn from_coords(
        tower: &FieldTower,
        start: i64,
        end: i64,
        coords: &[FieldElement],
    ) -> Self {
        let n = end - start;
        assert_eq!(coords.len() as i64, n + 1, "coordinate length mismatch");
        let even = n % 2 == 0;
        let w = tower.w(start);
        let mut slots = Vec::with_capacity(SymElement::slot_count(n));
        let mut k = 0;
        for m in 0..SymElement::slot_count(n) {
            if even && m == 0 {
                slots.push(coords[0].clone());
                k = 1;
            } else {
                slots.push(&coords[k] + &(&coords[k + 1] * &w));
                k += 2;
            }
        }
        SymElement::from_slots(tower, start, end, slots)
    }
}

impl PartialEq for SymElement {
    fn eq(&self, other: &Self) -> bool {
        self.start == other.start && self.end == other.end && self.slots == other.slots
    }
}

impl Eq for SymElement {}

impl fmt::Display for SymElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (m, a) in self.slots.iter().enumerate() {
            if m > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "] @ {}..{}", self.start, self.end)
    }
}

impl fmt::Debug for SymElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// The `n + 1` coordinate unit elements of `A_{start,end}` over `K_start`.
pub fn coord_units(tower: &FieldTower, start: i64, end: i64) -> Vec<SymElement> {
    let n = end - start;
    (0..=n)
        .map(|k| {
            let mut coords = vec![tower.zero(); (n + 1) as usize];
            coords[k as usize] = tower.one();
            SymElement::from_coords(tower, start, end, &coords)
        })
        .collect()
}

/// One subtracted relation element `left * h_junction * right`, recorded
/// during a certified projection so the reduction can be replayed through
/// the tensor product.
#[derive(Clone)]
pub struct RelationTerm {
    pub junction: i64,
    pub left: TensorElement,
    pub right: TensorElement,
}

impl RelationTerm {
    /// Rebuild the subtracted tensor along the independent product path.
    pub fn realize(&self) -> TensorElement {
        star_chain(&[
            self.left.clone(),
            h_elem(self.left.tower(), self.junction),
            self.right.clone(),
        ])
        .expect("recorded term spans meet by construction")
    }
}

fn add_into(comps: &mut BTreeMap<u32, FieldElement>, key: u32, v: FieldElement) {
    if v.is_zero() {
        return;
    }
    match comps.entry(key) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(v);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            *e.get_mut() += &v;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

/// Sparse staged reduction; returns the slots. When `cert` is given, every
/// subtracted relation element is recorded there.
///
/// The sweep runs over the interior positions left to right. A nonzero
/// value on a pattern whose letters strictly above position `q` are all
/// twists, with the identity at `q`, is removed by a relation through the
/// junction just left of `q`; the pushed-off values land on patterns whose
/// identity region reaches one position further right. After the sweep,
/// only the fully twisted pattern (the top slot) and patterns with the
/// identity at the last position remain; the latter are split against the
/// `g` direction and recursed into the quotient two degrees down.
fn nf_run(
    tower: &FieldTower,
    start: i64,
    end: i64,
    mut comps: BTreeMap<u32, FieldElement>,
    mut cert: Option<&mut Vec<RelationTerm>>,
) -> Vec<FieldElement> {
    let n = end - start;
    debug_assert!(n >= 0);
    if n <= 1 {
        return vec![comps.remove(&0).unwrap_or_else(|| tower.zero())];
    }
    let nm1 = (n - 1) as u32;
    let full: u32 = ((1u64 << nm1) - 1) as u32;
    let a_top = comps.remove(&full).unwrap_or_else(|| tower.zero());
    let one_half = half(tower);

    if n == 2 {
        // single junction; both the relation and the g direction live on
        // the identity pattern: y = 2c * 1 + 2c' * w with c, c' in K_start
        let y = comps.remove(&0).unwrap_or_else(|| tower.zero());
        let w = tower.w(start + 1);
        let (c2, a2) = tower
            .split_in_w_basis(start, &y, &w)
            .expect("the anti-invariant one step right stays outside the start subfield");
        if let Some(sink) = cert.as_deref_mut() {
            let c = &c2 * &one_half;
            if !c.is_zero() {
                sink.push(RelationTerm {
                    junction: start,
                    left: TensorElement::scalar(tower, start, c),
                    right: TensorElement::scalar(tower, end, tower.one()),
                });
            }
        }
        return vec![&a2 * &one_half, a_top];
    }

    for qb in 0..=nm1 - 2 {
        let low_mask = (1u32 << qb) - 1;
        let mask_high = full & !((1u32 << (qb + 1)) - 1);
        let keys: Vec<u32> = comps
            .range(mask_high..=mask_high + low_mask)
            .map(|(&k, _)| k)
            .collect();
        if keys.is_empty() {
            continue;
        }
        if qb == 0 {
            // leftmost stage: single pattern, relation through the edge
            // junction; the pushed value picks up the involution at
            // position start + 2
            let y = comps.remove(&mask_high).expect("key just seen");
            let ty = tower.tau(start + 2, &y);
            if let Some(sink) = cert.as_deref_mut() {
                sink.push(RelationTerm {
                    junction: start,
                    left: TensorElement::scalar(tower, start, tower.one()),
                    right: TensorElement::inject(
                        tower,
                        start + 2,
                        end,
                        SignPattern::all_ones(nm1 - 2),
                        &ty * &one_half,
                    ),
                });
            }
            add_into(&mut comps, mask_high ^ 0b10, -&ty);
            continue;
        }
        let pair_bit = 1u32 << (qb - 1);
        let clear_next = 1u32 << (qb + 1);
        let junction = start + i64::from(qb);
        let bases: BTreeSet<u32> = keys.iter().map(|k| k & !pair_bit).collect();
        for base in bases {
            let y1 = comps.remove(&base).unwrap_or_else(|| tower.zero());
            let y2 = comps.remove(&(base | pair_bit)).unwrap_or_else(|| tower.zero());
            // two relations through `junction` hit the four patterns over
            // the junction letter and the letter two to its right with the
            // tied values (x, y, y, x) and (z, -z, -z, z); on this stage's
            // pair they combine to exactly (y1, y2), and on the two targets
            // one position further right they push (y2, y1), crossed.
            if let Some(sink) = cert.as_deref_mut() {
                let quarter = quarter(tower);
                let p = SignPattern::new(base & (pair_bit - 1), qb - 1);
                let r = SignPattern::all_ones(nm1 - qb - 2);
                let s = (&y1 + &y2) * &quarter;
                let z = (&y2 - &y1) * &quarter;
                if !s.is_zero() {
                    sink.push(RelationTerm {
                        junction,
                        left: TensorElement::inject(tower, start, junction, p, s),
                        right: TensorElement::inject(tower, junction + 2, end, r, tower.one()),
                    });
                }
                if !z.is_zero() {
                    let w = tower.w(junction);
                    let w_inv = w.inv().expect("anti-invariants are nonzero");
                    let alpha = &z * &p.bar_word(start).eval(tower, &w_inv);
                    sink.push(RelationTerm {
                        junction,
                        left: TensorElement::inject(tower, start, junction, p, alpha),
                        right: TensorElement::inject(tower, junction + 2, end, r, w),
                    });
                }
            }
            add_into(&mut comps, base ^ clear_next, -&y2);
            add_into(&mut comps, (base | pair_bit) ^ clear_next, -&y1);
        }
    }

    // final stage: all remaining patterns carry the identity at the last
    // interior position; split each pair over the last junction into a
    // relation part and a coefficient on the g direction, then recurse
    let top_bit = 1u32 << (nm1 - 1);
    let pair_bit = 1u32 << (nm1 - 2);
    let w_right = tower.w(end - 1);
    let delta_inv = (&w_right - &tower.tau(end - 2, &w_right))
        .inv()
        .expect("the last anti-invariant stays outside the preceding subfield");
    let mut lower: BTreeMap<u32, FieldElement> = BTreeMap::new();
    while let Some((&key, _)) = comps.iter().next() {
        debug_assert_eq!(key & top_bit, 0, "sweep left a pattern above the final stage");
        let base = key & !pair_bit;
        let y1 = comps.remove(&base).unwrap_or_else(|| tower.zero());
        let y2 = comps.remove(&(base | pair_bit)).unwrap_or_else(|| tower.zero());
        let p = SignPattern::new(base, nm1 - 2);
        let pbar = p.bar_word(start);
        let cprime = &(&y1 - &y2) * &pbar.eval(tower, &delta_inv) * &one_half;
        if let Some(sink) = cert.as_deref_mut() {
            let a_val = pbar.eval(tower, &w_right);
            let c = &(&y1 * &one_half) - &(&cprime * &a_val);
            debug_assert_eq!(
                y2,
                &(&c + &c) + &(&(&cprime + &cprime) * &pbar.eval(tower, &tower.tau(end - 2, &w_right)))
            );
            if !c.is_zero() {
                sink.push(RelationTerm {
                    junction: end - 2,
                    left: TensorElement::inject(tower, start, end - 2, p, c),
                    right: TensorElement::scalar(tower, end, tower.one()),
                });
            }
        }
        if !cprime.is_zero() {
            lower.insert(base, cprime);
        }
    }
    let mut slots = match cert {
        Some(sink) => {
            let mut child = Vec::new();
            let slots = nf_run(tower, start, end - 2, lower, Some(&mut child));
            let g = g_elem(tower, end - 2);
            for t in child {
                sink.push(RelationTerm {
                    junction: t.junction,
                    left: t.left,
                    right: star_mul(&t.right, &g).expect("chain spans meet"),
                });
            }
            slots
        }
        None => nf_run(tower, start, end - 2, lower, None),
    };
    slots.push(a_top);
    slots
}

/// Normal form of a tensor in the quotient.
pub fn project(x: &TensorElement) -> SymElement {
    let (tower, start, end, comps) = x.clone().into_parts();
    let slots = nf_run(&tower, start, end, comps, None);
    SymElement {
        tower,
        start,
        end,
        slots,
    }
}

/// Normal form plus the list of subtracted relation elements, satisfying
/// `x = section(result) + sum(term.realize())`.
pub fn project_with_witness(x: &TensorElement) -> (SymElement, Vec<RelationTerm>) {
    let (tower, start, end, comps) = x.clone().into_parts();
    let mut terms = Vec::new();
    let slots = nf_run(&tower, start, end, comps, Some(&mut terms));
    (
        SymElement {
            tower,
            start,
            end,
            slots,
        },
        terms,
    )
}

/// The canonical representative tensor of a normal form: slot `m` rides on
/// the fully twisted pattern of its degree, pushed up by a chain of `g`
/// elements.
pub fn section(a: &SymElement) -> TensorElement {
    let n = a.degree();
    if n == 0 {
        return TensorElement::scalar(&a.tower, a.start, a.slots[0].clone());
    }
    if n == 1 {
        return TensorElement::embed1(&a.tower, a.start, a.slots[0].clone());
    }
    let k = a.slots.len() - 1;
    let lower = SymElement {
        tower: a.tower.clone(),
        start: a.start,
        end: a.end - 2,
        slots: a.slots[..k].to_vec(),
    };
    let pushed = star_mul(&section(&lower), &g_elem(&a.tower, a.end - 2))
        .expect("chain spans meet");
    pushed.add(&TensorElement::inject(
        &a.tower,
        a.start,
        a.end,
        SignPattern::all_ones((n - 1) as u32),
        a.slots[k].clone(),
    ))
}

/// Product in the quotient: representatives multiply in the tensor algebra
/// and the result is reduced.
pub fn sym_mul(a: &SymElement, b: &SymElement) -> Result<SymElement, Error> {
    Ok(project(&star_mul(&section(a), &section(b))?))
}

/// Product of a chain of quotient elements, left to right.
pub fn sym_chain(factors: &[SymElement]) -> Result<SymElement, Error> {
    let (first, rest) = factors.split_first().ok_or(Error::EmptyFactors)?;
    let mut acc = first.clone();
    for f in rest {
        acc = sym_mul(&acc, f)?;
    }
    Ok(acc)
}

/// The `k`-fold chain of `g` elements starting at `start`, in normal form:
/// unit in slot 0, zero elsewhere. The identification with the projected
/// explicit product is covered by tests.
pub fn g_chain(tower: &FieldTower, start: i64, k: u32) -> SymElement {
    let mut slots = vec![tower.zero(); k as usize + 1];
    slots[0] = tower.one();
    SymElement {
        tower: tower.clone(),
        start,
        end: start + 2 * i64::from(k),
        slots,
    }
}

/// Strip one `g` factor off the right: exact when the top slot vanishes,
/// because right multiplication by `g` is slot padding.
pub fn right_divide_by_g(a: &SymElement) -> Option<SymElement> {
    if a.degree() < 2 {
        return None;
    }
    let (top, rest) = a.slots.split_last().expect("at least two slots");
    if !top.is_zero() {
        return None;
    }
    Some(SymElement {
        tower: a.tower.clone(),
        start: a.start,
        end: a.end - 2,
        slots: rest.to_vec(),
    })
}

/// Solve `g_start * y = a` for `y`, if `a` lies in the left ideal.
pub fn left_divide_by_g(a: &SymElement) -> Option<SymElement> {
    if a.degree() < 2 {
        return None;
    }
    let tower = &a.tower;
    let g = g_chain(tower, a.start, 1);
    let units = coord_units(tower, a.start + 2, a.end);
    let cols: Vec<Vec<FieldElement>> = units
        .iter()
        .map(|u| {
            sym_mul(&g, u)
                .expect("chain spans meet")
                .coords_over_start()
        })
        .collect();
    let x = linalg::solve_from_columns(tower, &cols, &a.coords_over_start())?;
    let mut y = SymElement::zero(tower, a.start + 2, a.end);
    for (u, c) in units.iter().zip(&x) {
        // coordinates over K_{start} = K_{start+2}: scale each unit
        y = y.add(&u.mul_left_subfield(c));
    }
    // exactness: left multiplication by g must reproduce a
    let check = sym_mul(&g, &y).expect("chain spans meet");
    (check == *a).then_some(y)
}

/// The conjugation `a -> g^{-1} a g` in the localized algebra, expressed
/// without leaving the graded pieces: the unique `y` with
/// `g_start * y = a * g_end`, living two indices up.
pub fn conjugate_by_g(a: &SymElement) -> SymElement {
    let ag = sym_mul(a, &g_chain(&a.tower, a.end, 1)).expect("chain spans meet");
    left_divide_by_g(&ag).expect("g is normal, so the left division is exact")
}

/// Inverse of [`conjugate_by_g`], two indices down.
pub fn conjugate_by_g_inverse(b: &SymElement) -> SymElement {
    let gb = sym_mul(&g_chain(&b.tower, b.start - 2, 1), b).expect("chain spans meet");
    right_divide_by_g(&gb).expect("g is normal, so the right division is exact")
}

/// Verify `g * A_{start+2,end} = A_{start,end-2} * g` inside
/// `A_{start,end}` by comparing the two image spans.
pub fn check_g_normality(tower: &FieldTower, start: i64, end: i64) -> bool {
    let n = end - start;
    assert!(n >= 2, "normality needs degree at least two");
    let g_left = g_chain(tower, start, 1);
    let g_right = g_chain(tower, end - 2, 1);
    let left_rows: Vec<Vec<FieldElement>> = coord_units(tower, start + 2, end)
        .iter()
        .map(|u| sym_mul(&g_left, u).expect("spans meet").coords_over_start())
        .collect();
    let right_rows: Vec<Vec<FieldElement>> = coord_units(tower, start, end - 2)
        .iter()
        .map(|u| sym_mul(u, &g_right).expect("spans meet").coords_over_start())
        .collect();
    let expected = (n - 1) as usize;
    let rank_left = linalg::rank(left_rows.clone());
    let rank_right = linalg::rank(right_rows.clone());
    let mut stacked = left_rows;
    stacked.extend(right_rows);
    rank_left == expected && rank_right == expected && linalg::rank(stacked) == expected
}

/// Dimension of `A_{start,end} / (A_{start,end-2} * g)` over `K_start`,
/// computed from the certified quotient dimension and the honest rank of
/// the right-multiplication map.
pub fn quotient_b_dim(tower: &FieldTower, start: i64, end: i64) -> Result<u64, Error> {
    let n = end - start;
    if n < 2 {
        return Ok(certified_dims(tower, start, end)?.dim_quotient);
    }
    let dim_a = certified_dims(tower, start, end)?.dim_quotient;
    let g = g_chain(tower, end - 2, 1);
    let rows: Vec<Vec<FieldElement>> = coord_units(tower, start, end - 2)
        .iter()
        .map(|u| sym_mul(u, &g).expect("spans meet").coords_over_start())
        .collect();
    Ok(dim_a - linalg::rank(rows) as u64)
}

/// Generators of the relation piece through junction `l`, spanning it over
/// `K_start`: start-field basis tensors on the left, `h_l` in the middle,
/// basis tensors of the right span (unit and anti-invariant coefficients).
pub fn relation_piece_generators(
    tower: &FieldTower,
    start: i64,
    end: i64,
    l: i64,
) -> Vec<TensorElement> {
    assert!(start <= l && l <= end - 2, "junction outside the span");
    let h = h_elem(tower, l);
    let left: Vec<TensorElement> = standard_basis(tower, start, l);
    let right: Vec<TensorElement> = standard_basis(tower, l + 2, end);
    let mut out = Vec::with_capacity(left.len() * right.len());
    for u in &left {
        for v in &right {
            out.push(star_chain(&[u.clone(), h.clone(), v.clone()]).expect("spans meet"));
        }
    }
    out
}

/// All relation generators of the span, junction by junction.
pub fn relation_generators(tower: &FieldTower, start: i64, end: i64) -> Vec<TensorElement> {
    (start..=end - 2)
        .flat_map(|l| relation_piece_generators(tower, start, end, l))
        .collect()
}

/// Outcome of the per-degree dimension certification.
#[derive(Clone, Debug, Serialize)]
pub struct QuotientCert {
    pub degree: i64,
    pub dim_tensor: u64,
    pub dim_relations: u64,
    pub dim_quotient: u64,
    /// relation generators annihilated by the projection
    pub generators_annihilated: usize,
    /// coordinate units reproduced by project(section(unit))
    pub slot_units_fixed: usize,
    /// kernel basis vectors rebuilt exactly from recorded relation terms
    pub kernel_vectors_rebuilt: usize,
}

struct CachedQuotient {
    cert: QuotientCert,
    kernel: Vec<TensorElement>,
}

static QUOTIENT_CACHE: OnceLock<Mutex<HashMap<(String, u8, i64), Arc<CachedQuotient>>>> =
    OnceLock::new();

fn quotient_data(tower: &FieldTower, start: i64, end: i64) -> Result<Arc<CachedQuotient>, Error> {
    assert!(start <= end, "reversed span {start}..{end}");
    let key = (
        tower.key().to_owned(),
        par(start) as u8,
        end - start,
    );
    let cache = QUOTIENT_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(&key) {
        return Ok(hit.clone());
    }
    let computed = Arc::new(compute_quotient(tower, start, end)?);
    Ok(cache
        .lock()
        .unwrap()
        .entry(key)
        .or_insert(computed)
        .clone())
}

/// Kernel coordinates -> sparse tensor: coordinate `2s` is the unit
/// component and `2s + 1` the `w_start` component of pattern `s`.
fn tensor_from_sparse_coords(
    tower: &FieldTower,
    start: i64,
    end: i64,
    entries: &[(usize, FieldElement)],
) -> TensorElement {
    let w = tower.w(start);
    let mut comps: BTreeMap<u32, FieldElement> = BTreeMap::new();
    for (c, v) in entries {
        let value = if c % 2 == 0 { v.clone() } else { v * &w };
        add_into(&mut comps, (c / 2) as u32, value);
    }
    TensorElement::from_parts(tower.clone(), start, end, comps)
}

fn certification_failure(degree: i64, detail: &str) -> Error {
    Error::QuotientCertification {
        degree,
        detail: detail.to_owned(),
    }
}

fn compute_quotient(
    tower: &FieldTower,
    start: i64,
    end: i64,
) -> Result<CachedQuotient, Error> {
    let n = end - start;
    let dim_t = 1u64 << n;
    let basis = standard_basis(tower, start, end);
    debug_assert_eq!(basis.len() as u64, dim_t);

    // matrix of the projection in coordinates, one column per basis tensor
    let out_dim = (n + 1) as usize;
    let mut rows: Vec<Vec<FieldElement>> = vec![Vec::with_capacity(basis.len()); out_dim];
    for b in &basis {
        let col = project(b).coords_over_start();
        for (r, v) in col.into_iter().enumerate() {
            rows[r].push(v);
        }
    }

    // (a) every relation generator projects to zero
    let gens = if n >= 2 {
        relation_generators(tower, start, end)
    } else {
        Vec::new()
    };
    for gen in &gens {
        if !project(gen).is_zero() {
            return Err(certification_failure(
                n,
                "a relation generator has nonzero normal form",
            ));
        }
    }

    // (b) the section is a right inverse on every coordinate unit, so the
    // projection is onto and the quotient dimension is full
    let units = coord_units(tower, start, end);
    for u in &units {
        if project(&section(u)) != *u {
            return Err(certification_failure(
                n,
                "projection does not fix a section image",
            ));
        }
    }

    // (c) kernel = relation span: each kernel basis vector is rebuilt
    // exactly from the relation elements its reduction subtracts
    let (rank, pivots) = linalg::rref(&mut rows);
    if rank != out_dim {
        return Err(certification_failure(n, "projection matrix is not onto"));
    }
    let mut kernel = Vec::new();
    for free in 0..basis.len() {
        if pivots.contains(&free) {
            continue;
        }
        let mut entries = vec![(free, tower.one())];
        for (r, &p) in pivots.iter().enumerate() {
            if !rows[r][free].is_zero() {
                entries.push((p, -&rows[r][free]));
            }
        }
        let v = tensor_from_sparse_coords(tower, start, end, &entries);
        let (slots, terms) = project_with_witness(&v);
        if !slots.is_zero() {
            return Err(certification_failure(n, "kernel vector has nonzero normal form"));
        }
        let mut rebuilt = TensorElement::zero(tower, start, end);
        for t in &terms {
            rebuilt = rebuilt.add(&t.realize());
        }
        if rebuilt != v {
            return Err(certification_failure(
                n,
                "kernel vector is not a sum of its recorded relation elements",
            ));
        }
        kernel.push(v);
    }
    let dim_r = kernel.len() as u64;
    if n >= 2 && dim_r != dim_t - (n as u64) - 1 {
        return Err(certification_failure(n, "kernel dimension is off"));
    }

    Ok(CachedQuotient {
        cert: QuotientCert {
            degree: n,
            dim_tensor: dim_t,
            dim_relations: dim_r,
            dim_quotient: out_dim as u64,
            generators_annihilated: gens.len(),
            slot_units_fixed: units.len(),
            kernel_vectors_rebuilt: kernel.len(),
        },
        kernel,
    })
}

/// Certified dimensions of tensor piece, relation space, and quotient for
/// the span; cached per tower, parity, and degree.
pub fn certified_dims(tower: &FieldTower, start: i64, end: i64) -> Result<QuotientCert, Error> {
    Ok(quotient_data(tower, start, end)?.cert.clone())
}

/// The relation space of a span: certified dimension and a deterministic
/// kernel basis (each vector carries a unit coordinate at its own free
/// column of the projection matrix and vanishes at every other vector's).
pub struct RelationSpace {
    tower: FieldTower,
    start: i64,
    end: i64,
    cert: QuotientCert,
    basis: Vec<TensorElement>,
}

/// Compute the relation space of `(start, end)`.
pub fn relation_space(tower: &FieldTower, start: i64, end: i64) -> Result<RelationSpace, Error> {
    let data = quotient_data(tower, start, end)?;
    Ok(RelationSpace {
        tower: tower.clone(),
        start,
        end,
        cert: data.cert.clone(),
        basis: data.kernel.clone(),
    })
}

impl RelationSpace {
    pub fn tower(&self) -> &FieldTower {
        &self.tower
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    pub fn end(&self) -> i64 {
        self.end
    }

    pub fn dim(&self) -> u64 {
        self.cert.dim_relations
    }

    pub fn basis(&self) -> &[TensorElement] {
        &self.basis
    }

    pub fn cert(&self) -> &QuotientCert {
        &self.cert
    }

    /// Membership: the normal form vanishes exactly on the relation span.
    pub fn contains(&self, x: &TensorElement) -> bool {
        x.start() == self.start && x.end() == self.end && project(x).is_zero()
    }

    /// Dense `K_start`-coordinate rows of the basis (length `2^n` each).
    pub fn coordinate_rows(&self) -> Vec<Vec<FieldElement>> {
        self.basis
            .iter()
            .map(TensorElement::coords_over_start_field)
            .collect()
    }
}

/// Dimension of the intersection of two relation pieces, by rank counting.
pub fn intersection_dim(
    tower: &FieldTower,
    start: i64,
    end: i64,
    l1: i64,
    l2: i64,
) -> Result<u64, Error> {
    if !(start <= l1 && l1 < l2 && l2 <= end - 2) {
        return Err(Error::BadLevel(format!(
            "{start} <= l1 < l2 <= {}, got l1 = {l1}, l2 = {l2}",
            end - 2
        )));
    }
    let rows1: Vec<Vec<FieldElement>> = relation_piece_generators(tower, start, end, l1)
        .iter()
        .map(TensorElement::coords_over_start_field)
        .collect();
    let rows2: Vec<Vec<FieldElement>> = relation_piece_generators(tower, start, end, l2)
        .iter()
        .map(TensorElement::coords_over_start_field)
        .collect();
    let r1 = linalg::rank(rows1.clone());
    let r2 = linalg::rank(rows2.clone());
    let mut stacked = rows1;
    stacked.extend(rows2);
    let r12 = linalg::rank(stacked);
    Ok((r1 + r2 - r12) as u64)
}

fn binom(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let mut acc: u128 = 1;
    for i in 0..k.min(n - k) {
        acc = acc * u128::from(n - i) / u128::from(i + 1);
    }
    acc
}

/// The two sides of the relation-count identity in degree `n`: the closed
/// form `2^n - n - 1` and the alternating binomial sum it must equal.
pub fn eulerian_check(n: u32) -> (u64, u64) {
    assert!((2..=62).contains(&n), "degree out of the supported range");
    let lhs = (1u64 << n) - u64::from(n) - 1;
    let mut rhs: i128 = 0;
    for m in 1..=n / 2 {
        let term = binom(u64::from(n - m), u64::from(m)) as i128
            * (1i128 << (n - 2 * m));
        rhs += if m % 2 == 1 { term } else { -term };
    }
    (lhs, u64::try_from(rhs).expect("sum is nonnegative"))
}
