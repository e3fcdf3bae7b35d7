//! The shipped field towers.
//!
//! Three towers exercise the different regimes of the theory:
//!
//! * [`biquadratic`]: `Q(sqrt2, sqrt3)`, the smallest example; the
//!   composite twist has order two.
//! * [`d4_quartic`]: `Q(i, q)` with `q^4 = 2`; the two fixed subfields
//!   already intersect in more than the rationals.
//! * [`rational_function`]: `Q(t)` with the reflections `t -> -t` and
//!   `t -> 2 - t`; the composite twist is the shift `t -> t - 2` and has
//!   certified infinite order.
//!
//! [`corrupted_biquadratic`] deliberately breaks one multiplicativity law
//! and exists only so negative-control tests can watch the verification
//! suites catch it.

use crate::field::{FieldTower, IntPoly, NumberFieldData, RatFn, RatFnTowerData};
use crate::Error;
use num::bigint::BigInt;
use num::rational::BigRational;
use num::Zero;

/// Keys accepted by [`instance`], in the order used by reports.
pub const INSTANCE_KEYS: [&str; 3] = ["biquadratic", "d4-quartic", "rational-function"];

/// Look up a shipped tower by key.
pub fn instance(key: &str) -> Result<FieldTower, Error> {
    match key {
        "biquadratic" => Ok(biquadratic()),
        "d4-quartic" => Ok(d4_quartic()),
        "rational-function" => Ok(rational_function()),
        other => Err(Error::UnknownInstance(other.to_owned())),
    }
}

fn q(n: i64) -> BigRational {
    BigRational::from(BigInt::from(n))
}

fn basis_vec(dim: usize, k: usize) -> Vec<BigRational> {
    let mut v = vec![BigRational::zero(); dim];
    v[k] = q(1);
    v
}

fn diagonal(signs: &[i64]) -> Vec<BigRational> {
    let d = signs.len();
    let mut m = vec![BigRational::zero(); d * d];
    for (k, s) in signs.iter().enumerate() {
        m[k * d + k] = q(*s);
    }
    m
}

/// `Q(sqrt2, sqrt3)` with `tau_0` fixing `Q(sqrt2)` and `tau_1` fixing
/// `Q(sqrt3)`; both anti-invariants are `sqrt6`.
pub fn biquadratic() -> FieldTower {
    FieldTower::from_number_field("biquadratic", biquadratic_data([1, -1, 1, -1]))
        .expect("instance data is valid")
}

/// The biquadratic tower with one sign flipped in the second involution, so
/// that `tau_1(sqrt2 * sqrt3) != tau_1(sqrt2) * tau_1(sqrt3)`. Construction
/// checks still pass; the multiplicativity law in the field verification
/// suite is the first thing that fails. Negative-control fixture only.
pub fn corrupted_biquadratic() -> FieldTower {
    FieldTower::from_number_field("corrupted-biquadratic", biquadratic_data([1, 1, 1, -1]))
        .expect("fixture passes the constructor-level checks by design")
}

/// Basis `1, sqrt2, sqrt3, sqrt6` indexed by exponent bits of sqrt2 and
/// sqrt3: index = e2 + 2*e3.
fn biquadratic_data(tau1_signs: [i64; 4]) -> NumberFieldData {
    let dim = 4;
    let mut mult = Vec::with_capacity(dim * dim);
    for a in 0..dim {
        for b in 0..dim {
            let (e2, e3) = ((a & 1) + (b & 1), (a >> 1) + (b >> 1));
            let coeff = q(2i64.pow(e2 as u32 / 2) * 3i64.pow(e3 as u32 / 2));
            mult.push(vec![((e2 & 1) + 2 * (e3 & 1), coeff)]);
        }
    }
    NumberFieldData {
        basis_names: vec!["1", "sqrt2", "sqrt3", "sqrt6"],
        mult,
        tau: [diagonal(&[1, 1, -1, -1]), diagonal(&tau1_signs)],
        w: [basis_vec(dim, 3), basis_vec(dim, 3)],
        generators: vec![basis_vec(dim, 1), basis_vec(dim, 2)],
        intersection_basis: vec![basis_vec(dim, 0)],
        subfield_basis: [
            vec![basis_vec(dim, 0), basis_vec(dim, 1)],
            vec![basis_vec(dim, 0), basis_vec(dim, 2)],
        ],
    }
}

/// `Q(i, q)` with `q^4 = 2`, basis `q^a * i^b` at index `a + 4b`.
///
/// `tau_0` fixes `K_0 = Q(q)` (it conjugates `i`), `tau_1` fixes
/// `K_1 = Q(i*q)`; both anti-invariants are `i`, and the subfields meet in
/// `Q(sqrt2) = Q(q^2)`.
pub fn d4_quartic() -> FieldTower {
    let dim = 8;
    let idx = |a: usize, b: usize| a + 4 * b;
    let mut mult = Vec::with_capacity(dim * dim);
    for k1 in 0..dim {
        let (a1, b1) = (k1 % 4, k1 / 4);
        for k2 in 0..dim {
            let (a2, b2) = (k2 % 4, k2 / 4);
            let mut coeff = 1i64;
            let mut a = a1 + a2;
            let mut b = b1 + b2;
            if a >= 4 {
                a -= 4;
                coeff *= 2; // q^4 = 2
            }
            if b >= 2 {
                b -= 2;
                coeff *= -1; // i^2 = -1
            }
            mult.push(vec![(idx(a, b), q(coeff))]);
        }
    }
    let sign = |s: i64| if s % 2 == 0 { 1 } else { -1 };
    let tau0: Vec<i64> = (0..dim).map(|k| sign((k / 4) as i64)).collect();
    let tau1: Vec<i64> = (0..dim).map(|k| sign((k % 4 + k / 4) as i64)).collect();
    let data = NumberFieldData {
        basis_names: vec!["1", "q", "q^2", "q^3", "i", "i*q", "i*q^2", "i*q^3"],
        mult,
        tau: [diagonal(&tau0), diagonal(&tau1)],
        w: [basis_vec(dim, idx(0, 1)), basis_vec(dim, idx(0, 1))],
        generators: vec![basis_vec(dim, idx(1, 0)), basis_vec(dim, idx(0, 1))],
        intersection_basis: vec![basis_vec(dim, 0), basis_vec(dim, idx(2, 0))],
        subfield_basis: [
            (0..4).map(|a| basis_vec(dim, idx(a, 0))).collect(),
            vec![
                basis_vec(dim, 0),
                basis_vec(dim, idx(1, 1)),
                basis_vec(dim, idx(2, 0)),
                basis_vec(dim, idx(3, 1)),
            ],
        ],
    };
    FieldTower::from_number_field("d4-quartic", data).expect("instance data is valid")
}

/// `Q(t)` with the reflections `tau_0: t -> -t` (fixing `Q(t^2)`) and
/// `tau_1: t -> 2 - t` (fixing `Q((t-1)^2)`); anti-invariants `t` and
/// `t - 1`. The composite twist is the shift `t -> t - 2`.
pub fn rational_function() -> FieldTower {
    let tau_affine = [
        (BigInt::from(-1), BigInt::from(0)),
        (BigInt::from(-1), BigInt::from(2)),
    ];
    // If tau_1(tau_0(t)) = t + c with c != 0, record the shift as an
    // infinite-order certificate: iterates move t by n*c, never back.
    let (a0, b0) = &tau_affine[0];
    let (a1, b1) = &tau_affine[1];
    let sigma_shift = if (a0 * a1) == BigInt::from(1) {
        let c = a0 * b1 + b0;
        (!c.is_zero()).then(|| BigRational::from(c))
    } else {
        None
    };
    let data = RatFnTowerData {
        tau_affine,
        w: [
            RatFn::var(),
            RatFn::from_poly(IntPoly::new(vec![BigInt::from(-1), BigInt::from(1)])),
        ],
        sigma_shift,
    };
    FieldTower::from_rational_functions("rational-function", data)
        .expect("instance data is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookup_accepts_exactly_the_shipped_keys() {
        for key in INSTANCE_KEYS {
            assert_eq!(instance(key).unwrap().key(), key);
        }
        assert!(matches!(
            instance("corrupted-biquadratic"),
            Err(Error::UnknownInstance(_))
        ));
        assert!(matches!(instance("Biquadratic"), Err(Error::UnknownInstance(_))));
    }

    #[test]
    fn multiplication_tables_match_the_defining_relations() {
        let k = biquadratic();
        let b = k.field_basis().unwrap();
        assert_eq!(&b[1] * &b[1], k.from_i64(2));
        assert_eq!(&b[2] * &b[2], k.from_i64(3));
        assert_eq!(&b[3] * &b[3], k.from_i64(6));
        assert_eq!(&b[1] * &b[2], b[3]);
        assert_eq!(&b[1] * &b[3], &k.from_i64(2) * &b[2]);

        let d = d4_quartic();
        let b = d.field_basis().unwrap();
        let (qq, i) = (&b[1], &b[4]);
        assert_eq!(&(qq * qq) * &(qq * qq), d.from_i64(2));
        assert_eq!(i * i, d.from_i64(-1));
        assert_eq!(qq * i, b[5]);
        assert_eq!(&b[3] * qq, d.from_i64(2));
    }

    #[test]
    fn corrupted_fixture_constructs_but_breaks_multiplicativity() {
        let k = corrupted_biquadratic();
        let b = k.field_basis().unwrap();
        let lhs = k.tau(1, &(&b[1] * &b[2]));
        let rhs = &k.tau(1, &b[1]) * &k.tau(1, &b[2]);
        assert_ne!(lhs, rhs, "fixture must violate multiplicativity of tau_1");
        // and the involutions still pass the constructor-level checks
        assert_eq!(k.tau(1, &k.tau(1, &b[3])), b[3]);
    }

    #[test]
    fn rejects_towers_whose_w_sits_in_the_wrong_subfield() {
        // Same biquadratic data, but claim w_1 = sqrt2: that element is not
        // anti-invariant for tau_1... pick w_1 = sqrt3 instead, which *is*
        // fixed by tau_1, hence fails the anti-invariance check.
        let mut data = biquadratic_data([1, -1, 1, -1]);
        data.w[1] = basis_vec(4, 2);
        let err = FieldTower::from_number_field("w-in-subfield", data).unwrap_err();
        assert!(matches!(err, Error::BadTowerData(_)));

        // w_0 = sqrt2 is anti-invariant for nothing; more interesting is a
        // w_0 that is anti-invariant for tau_0 but lands inside K_1. In the
        // biquadratic tower tau_0-anti-invariants are spanned by sqrt3 and
        // sqrt6, and sqrt3 lies in K_1: exactly the cross condition.
        let mut data = biquadratic_data([1, -1, 1, -1]);
        data.w[0] = basis_vec(4, 2);
        let err = FieldTower::from_number_field("w-crosses", data).unwrap_err();
        match err {
            Error::BadTowerData(msg) => assert!(msg.contains("opposite subfield"), "{msg}"),
            other => panic!("unexpected error {other:?}"),
        }
    }
}
