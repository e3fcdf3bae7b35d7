//! The degree-zero part of the localization at the `g` chain.
//!
//! Inverting the family `g` glues the pieces `A_{0,2r}` into a single ring:
//! an element is a fraction `a * g^{-r}` with numerator `a` in `A_{0,2r}`,
//! and right multiplication by `g` (slot padding) identifies level `r` with
//! a subspace of level `r + 1`. [`LocElement`] stores the minimal-level
//! representative; the level filtration has graded dimensions `1, 2, 2, ...`
//! ([`filtration_dims`]).
//!
//! Moving a denominator past a numerator uses the conjugation by `g`
//! repeatedly (`g^{-r} b = conj^r(b) g^{-r}`), which is where normality of
//! `g` does its work.
//!
//! Three probes connect the ring to the order of the composite twist on
//! the coefficient field:
//!
//! * [`normal_element_test`]: on a non-algebraic instance the only normal
//!   elements are subfield multiples of `g` chains; for anything else the
//!   test produces a separating scalar, verified by linear algebra.
//! * [`ideal_saturation_probe`]: grows the two-sided ideal generated by the
//!   conjugate family of a degree-two element inside a finite window and
//!   reports when a `g` chain appears, certifying that the localized ideal
//!   contains a unit (one-sided: it never asserts failure).
//! * [`center_probe`]: solves the commutation equations over the rationals
//!   on number-field instances and returns the candidate center at a given
//!   level, which must contain the intersection subfield.

use crate::field::{FieldElement, FieldTower};
use crate::linalg;
use crate::sym::{
    certified_dims, conjugate_by_g, conjugate_by_g_inverse, coord_units, g_chain,
    quotient_b_dim, right_divide_by_g, sym_mul, SymElement,
};
use crate::Error;
use serde::Serialize;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

/// Slot vectors of the conjugates of the coordinate units, cached per
/// tower, start parity, degree, and exponent. Conjugation commutes with
/// the left subfield action (scalars commute past `g`), so these images
/// determine the whole map.
static CONJ_CACHE: OnceLock<Mutex<HashMap<(String, u8, i64, i64), Arc<Vec<Vec<FieldElement>>>>>> =
    OnceLock::new();

fn conjugated_unit_slots(
    tower: &FieldTower,
    start: i64,
    end: i64,
    k: i64,
) -> Arc<Vec<Vec<FieldElement>>> {
    let key = (
        tower.key().to_owned(),
        crate::field::par(start) as u8,
        end - start,
        k,
    );
    let cache = CONJ_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(&key) {
        return hit.clone();
    }
    let step = k.signum();
    let prev = if k == step {
        coord_units(tower, start, end)
            .iter()
            .map(|u| u.slots().to_vec())
            .collect::<Vec<_>>()
    } else {
        let inner = conjugated_unit_slots(tower, start, end, k - step);
        inner.as_ref().clone()
    };
    let shift = 2 * (k - step);
    let moved: Vec<Vec<FieldElement>> = prev
        .into_iter()
        .map(|slots| {
            let u = SymElement::from_slots(tower, start + shift, end + shift, slots);
            let image = if step > 0 {
                conjugate_by_g(&u)
            } else {
                conjugate_by_g_inverse(&u)
            };
            image.slots().to_vec()
        })
        .collect();
    let arc = Arc::new(moved);
    cache.lock().unwrap().entry(key).or_insert(arc).clone()
}

/// `conjugate_by_g` iterated `k` times (negative `k` runs the inverse).
/// `K`-linearity over the start subfield reduces the work to cached images
/// of the coordinate units.
pub fn conjugate_power(a: &SymElement, k: i64) -> SymElement {
    if k == 0 || a.is_zero() {
        let shift = 2 * k;
        return SymElement::from_slots(
            a.tower(),
            a.start() + shift,
            a.end() + shift,
            a.slots().to_vec(),
        );
    }
    let tower = a.tower();
    let units = conjugated_unit_slots(tower, a.start(), a.end(), k);
    let shift = 2 * k;
    let mut out = SymElement::zero(tower, a.start() + shift, a.end() + shift);
    for (c, slots) in a.coords_over_start().iter().zip(units.iter()) {
        if c.is_zero() {
            continue;
        }
        let u = SymElement::from_slots(tower, a.start() + shift, a.end() + shift, slots.clone());
        out = out.add(&u.mul_left_subfield(c));
    }
    out
}

/// Append zero slots, realizing `a * g^(target - level)` in normal form.
fn pad_numerator(a: &SymElement, target_level: u32) -> SymElement {
    let level = (a.degree() / 2) as u32;
    assert!(target_level >= level, "cannot pad downward");
    let tower = a.tower().clone();
    let mut slots = a.slots().to_vec();
    slots.resize(
        (target_level + 1) as usize,
        tower.zero(),
    );
    SymElement::from_slots(&tower, a.start(), a.start() + 2 * i64::from(target_level), slots)
}

/// A fraction `numerator * g^{-level}` in the degree-zero localized ring,
/// kept at the minimal level.
///
/// # Invariants
///
/// * the numerator lives in `A_{0,2*level}`,
/// * either `level == 0` or the numerator's top slot is nonzero (it is not
///   a right multiple of `g`).
#[derive(Clone, PartialEq, Eq)]
pub struct LocElement {
    numerator: SymElement,
}

impl LocElement {
    /// Wrap a numerator given at some level; reduces to canonical form.
    pub fn new(numerator: SymElement) -> Result<Self, Error> {
        if numerator.start() != 0 {
            return Err(Error::BadSpan {
                start: numerator.start(),
                end: numerator.end(),
            });
        }
        if numerator.degree() % 2 != 0 {
            return Err(Error::OddDegree(numerator.degree()));
        }
        Ok(LocElement { numerator }.canonicalize())
    }

    pub fn zero(tower: &FieldTower) -> Self {
        LocElement {
            numerator: SymElement::zero(tower, 0, 0),
        }
    }

    pub fn one(tower: &FieldTower) -> Self {
        LocElement {
            numerator: SymElement::scalar(tower, 0, tower.one()),
        }
    }

    /// A level-zero scalar from `K_0`.
    pub fn from_scalar(tower: &FieldTower, c: FieldElement) -> Self {
        LocElement {
            numerator: SymElement::scalar(tower, 0, c),
        }
    }

    pub fn tower(&self) -> &FieldTower {
        self.numerator.tower()
    }

    pub fn level(&self) -> u32 {
        (self.numerator.degree() / 2) as u32
    }

    pub fn numerator(&self) -> &SymElement {
        &self.numerator
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    /// Numerator raised to the given level (for comparisons and spans).
    pub fn numerator_at_level(&self, level: u32) -> SymElement {
        pad_numerator(&self.numerator, level)
    }

    fn canonicalize(mut self) -> Self {
        while self.level() > 0 {
            match right_divide_by_g(&self.numerator) {
                Some(lower) => self.numerator = lower,
                None => break,
            }
        }
        self
    }
}

impl fmt::Display for LocElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.level() == 0 {
            write!(f, "{}", self.numerator)
        } else {
            write!(f, "{} * g^-{}", self.numerator, self.level())
        }
    }
}

impl fmt::Debug for LocElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Reduce to the minimal-level representative (idempotent).
pub fn loc_canonicalize(x: &LocElement) -> LocElement {
    x.clone().canonicalize()
}

/// Addition: raise to the common level, add numerators, reduce.
pub fn loc_add(x: &LocElement, y: &LocElement) -> LocElement {
    let level = x.level().max(y.level());
    let a = x.numerator_at_level(level);
    let b = y.numerator_at_level(level);
    LocElement {
        numerator: a.add(&b),
    }
    .canonicalize()
}

pub fn loc_neg(x: &LocElement) -> LocElement {
    LocElement {
        numerator: x.numerator.neg(),
    }
}

pub fn loc_sub(x: &LocElement, y: &LocElement) -> LocElement {
    loc_add(x, &loc_neg(y))
}

/// Multiplication: `a g^-r * b g^-s = a * conj^r(b) * g^-(r+s)`, then
/// reduce. The conjugate shifts `b` to start at `2r`, so the product
/// numerator is an honest quotient product.
pub fn loc_mul(x: &LocElement, y: &LocElement) -> LocElement {
    let r = x.level();
    let shifted = conjugate_power(&y.numerator, i64::from(r));
    let numerator = sym_mul(&x.numerator, &shifted).expect("spans meet after the shift");
    LocElement { numerator }.canonicalize()
}

/// Dimensions over `K_0` of the graded pieces of the level filtration,
/// `n = 0 ..= l_max`. The embedding of level `n - 1` in level `n` is right
/// multiplication by `g`, so each graded dimension is the certified
/// quotient dimension minus the honest rank of that map.
pub fn filtration_dims(tower: &FieldTower, l_max: u32) -> Result<Vec<u64>, Error> {
    (0..=l_max)
        .map(|n| quotient_b_dim(tower, 0, 2 * i64::from(n)))
        .collect()
}

/// Check `level_i * level_1 = level_{i+1}` and the reversed order, as
/// spans over `K_0` at level `i + 1`.
pub fn check_filtration_span(tower: &FieldTower, i: u32) -> Result<bool, Error> {
    let target_dim = certified_dims(tower, 0, 2 * (i64::from(i) + 1))?.dim_quotient as usize;
    let level_i: Vec<LocElement> = coord_units(tower, 0, 2 * i64::from(i))
        .into_iter()
        .map(|u| LocElement { numerator: u })
        .collect();
    let level_1: Vec<LocElement> = coord_units(tower, 0, 2)
        .into_iter()
        .map(|u| LocElement { numerator: u })
        .collect();
    for (lhs, rhs) in [(&level_i, &level_1), (&level_1, &level_i)] {
        let mut span = linalg::Span::new(2 * (i as usize + 1) + 1);
        for a in lhs {
            for b in rhs {
                let p = loc_mul(a, b);
                span.insert(p.numerator_at_level(i + 1).coords_over_start());
            }
        }
        if span.dim() != target_dim {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Outcome of the normality dichotomy test.
#[derive(Clone, Debug, PartialEq)]
pub enum NormalTestOutcome {
    /// Only slot 0 is populated: the element is a start-subfield multiple
    /// of the `g` chain of its degree, hence normal.
    IsScalarTimesGChain,
    /// A start-subfield scalar `b` witnessing failure of normality:
    /// `b * x - x * c` stays outside the `K`-line of `x` for every legal
    /// candidate `c` (candidates are forced slotwise; illegal ones do not
    /// land in the end subfield).
    Witness(FieldElement),
}

/// Interior word carrying the right scalar action onto slot `m`.
fn slot_word(start: i64, m: usize) -> crate::field::AutWord {
    crate::field::AutWord::from_letters((start + 1)..(start + 2 * m as i64))
}

fn witness_candidates(tower: &FieldTower, start: i64) -> Vec<FieldElement> {
    let w = tower.w(start);
    let w2 = &w * &w;
    let mut out = vec![w2.clone(), &tower.one() + &w2, &w2 * &w2];
    for gen in tower.generators() {
        // fold each generator into the start subfield along the trace
        let tr = &(&gen + &tower.tau(start, &gen)) * &tower.from_rational(
            &num::rational::BigRational::new(1.into(), 2.into()),
        );
        out.push(&tr * &tr);
        out.push(tr);
    }
    // rational constants commute with everything and can never separate
    out.retain(|b| b.as_rational().is_none());
    out
}

/// Check that `b` separates `x` from every legal right scalar. Slotwise
/// the right action multiplies slot `m` by the interior word of
/// `(start, start + 2m)` applied to the scalar, so each nonzero slot forces
/// its own candidate; `b` is a verified witness when every legal candidate
/// leaves a commutation defect `b*x - x*c` independent of `x`, and at least
/// one slot separates.
pub fn verify_normality_witness(x: &SymElement, b: &FieldElement) -> bool {
    let tower = x.tower();
    let start = x.start();
    let end = x.end();
    if !tower.in_subfield(start, b) || b.as_rational().is_some() {
        // rational constants commute with everything and separate nothing
        return false;
    }
    let mut separated = false;
    for (m, v) in x.slots().iter().enumerate() {
        if v.is_zero() {
            continue;
        }
        let word = slot_word(start, m);
        let candidate = word.inverse().eval(tower, b);
        if !tower.in_subfield(end, &candidate) {
            // no end-subfield scalar can match this slot
            separated = true;
            continue;
        }
        let defect = x.mul_left_subfield(b).sub(&x.mul_right_subfield(&candidate));
        if defect.is_zero() {
            // this candidate absorbs b entirely
            return false;
        }
        let rows = vec![x.coords_over_start(), defect.coords_over_start()];
        if linalg::rank(rows) != 2 {
            return false;
        }
        separated = true;
    }
    separated
}

/// Decide whether an even-degree element can be normal, on an instance
/// whose composite twist has infinite order. Either the element is a
/// subfield multiple of a `g` chain, or the test returns a scalar `b`
/// whose commutation defect is machine-verified.
pub fn normal_element_test(x: &SymElement) -> Result<NormalTestOutcome, Error> {
    let tower = x.tower();
    match tower.classify(16) {
        crate::field::AlgebraicClass::NonAlgebraic { .. } => {}
        _ => return Err(Error::RequiresInfiniteTwist(tower.key().to_owned())),
    }
    if x.is_zero() {
        return Err(Error::ZeroElement);
    }
    if x.degree() % 2 != 0 {
        return Err(Error::OddDegree(x.degree()));
    }
    let off_form = x.slots().iter().skip(1).any(|v| !v.is_zero());
    if !off_form {
        return Ok(NormalTestOutcome::IsScalarTimesGChain);
    }
    for b in witness_candidates(tower, x.start()) {
        if verify_normality_witness(x, &b) {
            return Ok(NormalTestOutcome::Witness(b));
        }
    }
    unreachable!("a separating scalar exists for off-form elements under an infinite twist")
}

/// Finitely windowed approximation of a two-sided ideal: row-reduced spans
/// of graded pieces `(a, b)` with `a >= i_min`, `b <= b_max`, and
/// `b - a <= width`.
///
/// # Invariants
///
/// After [`IdealWindow::close`], each recorded span is stable under left
/// and right multiplication by degree-one basis elements and right
/// multiplication by end-subfield scalars, within the window bounds.
pub struct IdealWindow {
    tower: FieldTower,
    i_min: i64,
    b_max: i64,
    width: i64,
    pieces: BTreeMap<(i64, i64), Piece>,
}

struct Piece {
    span: linalg::Span,
    basis: Vec<SymElement>,
    processed: usize,
}

impl IdealWindow {
    pub fn new(tower: &FieldTower, i_min: i64, b_max: i64, width: i64) -> Self {
        assert!(i_min <= 0 && b_max >= 0 && width >= 2);
        IdealWindow {
            tower: tower.clone(),
            i_min,
            b_max,
            width,
            pieces: BTreeMap::new(),
        }
    }

    pub fn piece_dim(&self, start: i64, end: i64) -> usize {
        self.pieces
            .get(&(start, end))
            .map_or(0, |p| p.span.dim())
    }

    pub fn total_dim(&self) -> usize {
        self.pieces.values().map(|p| p.span.dim()).sum()
    }

    /// Insert an element into its graded piece; returns whether the span
    /// grew. Elements outside the window are ignored.
    pub fn insert(&mut self, x: &SymElement) -> bool {
        let key = (x.start(), x.end());
        if x.is_zero()
            || key.0 < self.i_min
            || key.1 > self.b_max
            || key.1 - key.0 > self.width
        {
            return false;
        }
        let ncols = (x.degree() + 1) as usize;
        let piece = self.pieces.entry(key).or_insert_with(|| Piece {
            span: linalg::Span::new(ncols),
            basis: Vec::new(),
            processed: 0,
        });
        if piece.span.insert(x.coords_over_start()) {
            piece.basis.push(x.clone());
            true
        } else {
            false
        }
    }

    pub fn contains(&self, x: &SymElement) -> bool {
        self.pieces
            .get(&(x.start(), x.end()))
            .is_some_and(|p| p.span.contains(&x.coords_over_start()))
    }

    /// One closure round: act on every element not yet processed by
    /// degree-one basis elements on both sides and by end-subfield scalars,
    /// then push `g`-divisible parts down two degrees. Returns whether
    /// anything grew.
    pub fn close_step(&mut self) -> bool {
        let tower = self.tower.clone();
        let mut grew = false;
        let keys: Vec<(i64, i64)> = self.pieces.keys().copied().collect();
        for (a, b) in keys {
            let fresh: Vec<SymElement> = {
                let piece = self.pieces.get_mut(&(a, b)).expect("key just listed");
                let fresh = piece.basis[piece.processed..].to_vec();
                piece.processed = piece.basis.len();
                fresh
            };
            if fresh.is_empty() {
                continue;
            }
            let left_units = coord_units(&tower, a - 1, a);
            let right_units = coord_units(&tower, b, b + 1);
            let scalars = right_scalar_generators(&tower, b);
            for v in &fresh {
                for e in &left_units {
                    let p = sym_mul(e, v).expect("spans meet");
                    grew |= self.insert(&p);
                }
                for e in &right_units {
                    let p = sym_mul(v, e).expect("spans meet");
                    grew |= self.insert(&p);
                }
                for c in &scalars {
                    grew |= self.insert(&v.mul_right_subfield(c));
                }
            }
        }
        grew |= self.saturate();
        grew
    }

    /// Run closure rounds to a fixpoint (bounded by the total dimension of
    /// the window, which each growing round increases).
    pub fn close(&mut self) {
        while self.close_step() {}
    }

    /// Push the wholly `g`-divisible part of each piece down: the sub-span
    /// with vanishing top slot maps isomorphically two degrees lower.
    /// Returns whether any lower span grew.
    pub fn saturate(&mut self) -> bool {
        let tower = self.tower.clone();
        let mut grew = false;
        let keys: Vec<(i64, i64)> = self.pieces.keys().copied().collect();
        for (a, b) in keys {
            if b - a < 2 {
                continue;
            }
            let quotients: Vec<SymElement> = {
                let piece = &self.pieces[&(a, b)];
                divisible_subspace(&tower, a, b, &piece.basis)
            };
            for q in quotients {
                grew |= self.insert(&q);
            }
        }
        grew
    }
}

/// Right scalars to close a piece ending at `b` under `K_b`: the subfield
/// basis beyond the unit on number fields, the squared anti-invariant on
/// the function field (it generates the subfield there).
fn right_scalar_generators(tower: &FieldTower, b: i64) -> Vec<FieldElement> {
    match tower.subfield_basis(b) {
        Some(basis) => basis.into_iter().skip(1).collect(),
        None => {
            let w = tower.w(b);
            vec![&w * &w]
        }
    }
}

/// Basis of `span(rows) ∩ (top slot = 0)`, already divided by `g`.
///
/// Reduction with the two top-slot coordinates ordered first leaves the
/// rows whose pivot falls beyond them with zeros across the entire top
/// block, and a dimension count shows they span the whole intersection.
fn divisible_subspace(
    tower: &FieldTower,
    a: i64,
    b: i64,
    basis: &[SymElement],
) -> Vec<SymElement> {
    let ncols = (b - a + 1) as usize;
    let top = 2; // the top slot always holds two coordinates when b - a >= 2
    let mut rows: Vec<Vec<FieldElement>> = basis
        .iter()
        .map(|x| {
            let coords = x.coords_over_start();
            let mut reordered = coords[ncols - top..].to_vec();
            reordered.extend_from_slice(&coords[..ncols - top]);
            reordered
        })
        .collect();
    let (rank, pivots) = linalg::rref(&mut rows);
    let mut out = Vec::new();
    for (r, &p) in pivots.iter().enumerate().take(rank) {
        if p < top {
            continue;
        }
        let mut coords = rows[r][top..].to_vec();
        coords.extend_from_slice(&rows[r][..top]);
        let x = SymElement::from_coords(tower, a, b, &coords);
        out.push(right_divide_by_g(&x).expect("top slot vanishes by construction"));
    }
    out
}

/// Verdict of the simplicity probe.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum SaturationOutcome {
    /// Some `g` chain of the reported length lies in the windowed ideal,
    /// so the localized ideal contains a unit.
    ReachedGPower(u32),
    /// The window closed without capturing a `g` chain; no conclusion.
    Inconclusive,
}

/// Parameters and verdict of one simplicity probe run.
#[derive(Clone, Debug, Serialize)]
pub struct SaturationProbe {
    pub outcome: SaturationOutcome,
    pub depth: u32,
    pub level_bound: u32,
    pub width: i64,
    pub rounds: u32,
}

/// Grow the two-sided ideal generated by the conjugate family of `x`
/// (a degree-two element based at 0) inside a finite window and look for a
/// `g` chain. One-sided: `Inconclusive` carries no negative information.
pub fn ideal_saturation_probe(
    x: &SymElement,
    depth: u32,
    level_bound: u32,
) -> Result<SaturationProbe, Error> {
    if x.start() != 0 || x.end() != 2 {
        return Err(Error::BadSpan {
            start: x.start(),
            end: x.end(),
        });
    }
    if x.is_zero() {
        return Err(Error::ZeroElement);
    }
    assert!(level_bound >= 1, "the probe needs at least one target level");
    let tower = x.tower();
    let i_min = -2 * i64::from(depth);
    let b_max = 2 * i64::from(level_bound);
    let width = b_max + 2;
    let mut window = IdealWindow::new(tower, i_min, b_max, width);
    for k in -i64::from(depth)..=0 {
        window.insert(&conjugate_power(x, k));
    }
    let captured = |window: &IdealWindow| -> Option<u32> {
        (1..=level_bound).find(|&m| window.contains(&g_chain(tower, 0, m)))
    };
    let mut rounds = 0;
    let outcome = loop {
        if let Some(m) = captured(&window) {
            break SaturationOutcome::ReachedGPower(m);
        }
        if !window.close_step() {
            break SaturationOutcome::Inconclusive;
        }
        rounds += 1;
    };
    Ok(SaturationProbe {
        outcome,
        depth,
        level_bound,
        width,
        rounds,
    })
}

/// Candidate center at one filtration level.
#[derive(Clone, Debug, Serialize)]
pub struct CenterReport {
    pub level: u32,
    /// dimension over the rationals of the commuting space at this level
    pub dim_over_q: usize,
    /// the intersection subfield embeds at level 0; this confirms it
    pub contains_intersection_scalars: bool,
    /// rendered basis elements (numerators at the probed level)
    pub basis: Vec<String>,
}

/// Rational coordinates of a numerator at `(0, 2*level)`: each slot
/// coordinate over `K_0`, flattened through the field basis.
fn numerator_q_coords(tower: &FieldTower, a: &SymElement) -> Vec<BigRationalVec> {
    a.coords_over_start()
        .iter()
        .map(|c| tower.q_coords(c).expect("number-field instance"))
        .collect()
}

type BigRationalVec = Vec<num::rational::BigRational>;

fn flatten(rows: Vec<BigRationalVec>) -> BigRationalVec {
    rows.into_iter().flatten().collect()
}

/// Solve the commutation equations `z * v = v * z` over the rationals for
/// `z` at the given level, with `v` ranging over the start-subfield basis
/// scalars and a basis of level one. Number-field instances only.
pub fn center_probe(tower: &FieldTower, level: u32) -> Result<CenterReport, Error> {
    let Some(field_basis) = tower.field_basis() else {
        return Err(Error::RequiresFiniteDimensional(tower.key().to_owned()));
    };
    let sub_basis = tower.subfield_basis(0).expect("number-field instance");
    let end = 2 * i64::from(level);

    // rational basis of the level-`level` numerator space: slot 0 ranges
    // over the start subfield, higher slots over the whole field
    let mut z_basis: Vec<SymElement> = Vec::new();
    let slot_count = (level + 1) as usize;
    for m in 0..slot_count {
        let pool = if m == 0 { &sub_basis } else { &field_basis };
        for f in pool {
            let mut slots = vec![tower.zero(); slot_count];
            slots[m] = f.clone();
            z_basis.push(SymElement::from_slots(tower, 0, end, slots));
        }
    }

    let mut commutators: Vec<LocElement> = coord_units(tower, 0, 2)
        .into_iter()
        .map(|u| LocElement { numerator: u })
        .collect();
    for s in sub_basis.iter().skip(1) {
        commutators.push(LocElement::from_scalar(tower, s.clone()));
    }

    // columns of the equation matrix, one per rational basis element of z
    let mut cols: Vec<BigRationalVec> = Vec::with_capacity(z_basis.len());
    for zb in &z_basis {
        let z = LocElement::new(zb.clone()).expect("even span at 0");
        let mut col = Vec::new();
        for v in &commutators {
            let d = loc_sub(&loc_mul(&z, v), &loc_mul(v, &z));
            let lifted = d.numerator_at_level(level + 1);
            col.extend(flatten(numerator_q_coords(tower, &lifted)));
        }
        cols.push(col);
    }
    let nrows = cols.first().map_or(0, Vec::len);
    let rows: Vec<BigRationalVec> = (0..nrows)
        .map(|r| cols.iter().map(|c| c[r].clone()).collect())
        .collect();
    let kernel = linalg::rat_kernel(z_basis.len(), rows);

    let elements: Vec<SymElement> = kernel
        .iter()
        .map(|coeffs| {
            let mut acc = SymElement::zero(tower, 0, end);
            for (c, zb) in coeffs.iter().zip(&z_basis) {
                acc = acc.add(&zb.mul_left_subfield(&tower.from_rational(c)));
            }
            acc
        })
        .collect();

    // membership of the intersection scalars, tested in flattened rational
    // coordinates of the numerator space
    let mut span_rows: Vec<BigRationalVec> = elements
        .iter()
        .map(|e| flatten(numerator_q_coords(tower, e)))
        .collect();
    let (rank, _) = linalg::rat_rref(&mut span_rows);
    let contains = tower
        .intersection_basis()
        .expect("number-field instance")
        .iter()
        .all(|c| {
            let embedded = pad_numerator(&SymElement::scalar(tower, 0, c.clone()), level);
            let mut stacked = span_rows[..rank].to_vec();
            stacked.push(flatten(numerator_q_coords(tower, &embedded)));
            let (r2, _) = linalg::rat_rref(&mut stacked);
            r2 == rank
        });

    Ok(CenterReport {
        level,
        dim_over_q: kernel.len(),
        contains_intersection_scalars: contains,
        basis: elements.iter().map(|e| e.to_string()).collect(),
    })
}
