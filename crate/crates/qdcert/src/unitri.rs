//! Exact arithmetic in the unitriangular group `U_d ≤ GL_d(ℤ)`.
//!
//! Elements carry only their strictly-upper entries (arbitrary precision);
//! the diagonal is implicitly 1. The center is `Z_d = {1 + k·e_{1d}}` and the
//! coset section `C = {x : x_{1d} = 0}` holds one representative per central
//! coset. Box enumeration over `C` drives everything downstream, so its
//! order is fixed: lexicographic in the entries read row-major.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer, MapAccess, Visitor};
use serde::ser::{SerializeMap, SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::quotient::QuotientElt;
use crate::{Error, Result};

/// Number of strictly-upper positions of a `d × d` matrix.
pub fn upper_len(d: usize) -> usize {
    d * (d - 1) / 2
}

/// Row-major index of the strictly-upper position `(i, j)`, 1-based, `i < j`.
fn pos(d: usize, i: usize, j: usize) -> usize {
    debug_assert!(1 <= i && i < j && j <= d);
    (i - 1) * d - i * (i - 1) / 2 + (j - i - 1)
}

/// A unitriangular integer matrix: unit diagonal, zeros below, exact
/// strictly-upper entries stored row-major.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UniTri {
    d: usize,
    entries: Vec<BigInt>,
}

impl UniTri {
    pub fn identity(d: usize) -> Self {
        assert!(d >= 2, "unitriangular dimension must be at least 2");
        UniTri {
            d,
            entries: vec![BigInt::zero(); upper_len(d)],
        }
    }

    /// `1 + v·e_{ij}` with 1-based indices, `i < j`.
    pub fn elementary(d: usize, i: usize, j: usize, v: impl Into<BigInt>) -> Self {
        let mut a = UniTri::identity(d);
        a.entries[pos(d, i, j)] = v.into();
        a
    }

    /// Builds from the row-major strictly-upper entry vector.
    pub fn from_entries(d: usize, entries: Vec<BigInt>) -> Result<Self> {
        if entries.len() != upper_len(d) {
            return Err(Error::DimensionMismatch {
                left: entries.len(),
                right: upper_len(d),
            });
        }
        Ok(UniTri { d, entries })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// Strictly-upper entry at `(i, j)`, 1-based, `i < j`.
    pub fn upper(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[pos(self.d, i, j)]
    }

    pub fn set_upper(&mut self, i: usize, j: usize, v: impl Into<BigInt>) {
        self.entries[pos(self.d, i, j)] = v.into();
    }

    /// Full matrix entry, 1-based: 1 on the diagonal, 0 below.
    pub fn entry(&self, i: usize, j: usize) -> BigInt {
        if i == j {
            BigInt::one()
        } else if i < j {
            self.upper(i, j).clone()
        } else {
            BigInt::zero()
        }
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn is_identity(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    /// Exact matrix product. Both factors must share a dimension.
    pub fn mul(&self, rhs: &UniTri) -> Result<UniTri> {
        if self.d != rhs.d {
            return Err(Error::DimensionMismatch {
                left: self.d,
                right: rhs.d,
            });
        }
        let d = self.d;
        let mut out = UniTri::identity(d);
        for i in 1..d {
            for j in (i + 1)..=d {
                // c_ij = a_ij + b_ij + sum_{i<k<j} a_ik b_kj
                let mut c = self.upper(i, j) + rhs.upper(i, j);
                for k in (i + 1)..j {
                    c += self.upper(i, k) * rhs.upper(k, j);
                }
                out.entries[pos(d, i, j)] = c;
            }
        }
        Ok(out)
    }

    /// Exact inverse, by back-substitution along bands of increasing width.
    pub fn inverse(&self) -> UniTri {
        let d = self.d;
        let mut out = UniTri::identity(d);
        for width in 1..d {
            for i in 1..=(d - width) {
                let j = i + width;
                // 0 = a_ij + b_ij + sum_{i<k<j} a_ik b_kj
                let mut c = -self.upper(i, j).clone();
                for k in (i + 1)..j {
                    c -= self.upper(i, k) * out.upper(k, j);
                }
                out.entries[pos(d, i, j)] = c;
            }
        }
        out
    }

    /// The ring element `self − other + 1`: entrywise differences of the
    /// strictly-upper entries, again unitriangular.
    pub fn ring_diff(&self, other: &UniTri) -> Result<UniTri> {
        if self.d != other.d {
            return Err(Error::DimensionMismatch {
                left: self.d,
                right: other.d,
            });
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a - b)
            .collect();
        Ok(UniTri {
            d: self.d,
            entries,
        })
    }

    /// Splits off the central part: returns `(a', k)` with `a = a'·(1 + k·e_{1d})`,
    /// where `a'` has vanishing `(1, d)` entry and `k = a_{1d}`.
    pub fn split_center(&self) -> (UniTri, BigInt) {
        let mut rep = self.clone();
        let k = std::mem::take(&mut rep.entries[pos(self.d, 1, self.d)]);
        (rep, k)
    }

    pub fn max_abs_entry(&self) -> BigInt {
        self.entries
            .iter()
            .map(|e| e.abs())
            .max()
            .unwrap_or_else(BigInt::zero)
    }

    /// True iff every strictly-upper entry is divisible by `n`, i.e. the
    /// element lies in the congruence subgroup of level `n`.
    pub fn in_ln(&self, n: u64) -> bool {
        assert!(n >= 1);
        let n = BigInt::from(n);
        self.entries.iter().all(|e| (e % &n).is_zero())
    }
}

/// Canonical factorization through the coset section: `a = a'·(1 + k·e_{1d})`
/// with `a' ∈ C`.
pub fn coset_rep(a: &UniTri) -> (QuotientElt, CentralElt) {
    let (rep, k) = a.split_center();
    (QuotientElt::from_canonical(rep), CentralElt { k })
}

impl fmt::Display for UniTri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "1")?;
        for i in 1..self.d {
            for j in (i + 1)..=self.d {
                let v = self.upper(i, j);
                if v.is_zero() {
                    continue;
                }
                if v.is_one() {
                    write!(f, "+e{}{}", i, j)?;
                } else if (-v).is_one() {
                    write!(f, "-e{}{}", i, j)?;
                } else if v.is_positive() {
                    write!(f, "+{}e{}{}", v, i, j)?;
                } else {
                    write!(f, "{}e{}{}", v, i, j)?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for UniTri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A central element `1 + k·e_{1d}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CentralElt {
    pub k: BigInt,
}

/// The box `G[lo, hi]`: elements of the coset section whose strictly-upper
/// entries all lie in `[lo, hi]` (the `(1, d)` entry is pinned to 0).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxSpec {
    pub d: usize,
    pub lo: i64,
    pub hi: i64,
}

impl BoxSpec {
    pub fn new(d: usize, lo: i64, hi: i64) -> Result<Self> {
        if d < 2 {
            return Err(Error::Config(format!("box dimension {d} < 2")));
        }
        if lo > hi {
            return Err(Error::Config(format!("box bounds [{lo}, {hi}] are empty")));
        }
        Ok(BoxSpec { d, lo, hi })
    }

    /// Free positions: all strictly-upper `(i, j)` except the central `(1, d)`.
    pub fn free_positions(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(upper_len(self.d) - 1);
        for i in 1..self.d {
            for j in (i + 1)..=self.d {
                if !(i == 1 && j == self.d) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn width(&self) -> u64 {
        (self.hi - self.lo + 1) as u64
    }

    /// Exact element count `width^(d(d−1)/2 − 1)`.
    pub fn count(&self) -> BigInt {
        BigInt::from(self.width()).pow((upper_len(self.d) - 1) as u32)
    }

    /// True iff every strictly-upper entry of `a` lies in `[lo, hi]`
    /// (membership of a canonical representative in the box).
    pub fn contains(&self, a: &UniTri) -> bool {
        let lo = BigInt::from(self.lo);
        let hi = BigInt::from(self.hi);
        a.entries().iter().all(|e| *e >= lo && *e <= hi)
    }
}

/// Enumerates `G[lo, hi]` exactly once per element, in lexicographic order of
/// the entries read row-major. Fails upfront when the count exceeds `cap`.
pub fn enumerate_box(spec: &BoxSpec, cap: u64) -> Result<BoxIter> {
    let count = spec.count();
    if count > BigInt::from(cap) {
        return Err(Error::CapExceeded {
            what: format!("box G[{}, {}] in dimension {}", spec.lo, spec.hi, spec.d),
            needed: count.to_string(),
            cap,
        });
    }
    Ok(BoxIter {
        spec: *spec,
        positions: spec.free_positions(),
        counters: Vec::new(),
        remaining: count.to_u64().expect("count fits after cap check"),
    })
}

pub struct BoxIter {
    spec: BoxSpec,
    positions: Vec<(usize, usize)>,
    counters: Vec<i64>,
    remaining: u64,
}

impl Iterator for BoxIter {
    type Item = QuotientElt;

    fn next(&mut self) -> Option<QuotientElt> {
        if self.remaining == 0 {
            return None;
        }
        if self.counters.is_empty() {
            self.counters = vec![self.spec.lo; self.positions.len()];
        } else {
            // Odometer step, least-significant position last.
            for idx in (0..self.counters.len()).rev() {
                if self.counters[idx] < self.spec.hi {
                    self.counters[idx] += 1;
                    break;
                }
                self.counters[idx] = self.spec.lo;
            }
        }
        self.remaining -= 1;
        let mut a = UniTri::identity(self.spec.d);
        for (&(i, j), &v) in self.positions.iter().zip(&self.counters) {
            a.set_upper(i, j, v);
        }
        Some(QuotientElt::from_canonical(a))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let r = self.remaining as usize;
        (r, Some(r))
    }
}

// Group elements travel as {"d": 3, "entries": [{"i": 1, "j": 2, "v": 1}, ...]}
// listing only nonzero strictly-upper entries with 1-based indices. Entry
// values that fit i64 are plain JSON numbers; larger ones are decimal strings.

impl Serialize for UniTri {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        struct Entries<'a>(&'a UniTri);
        struct Entry<'a> {
            i: usize,
            j: usize,
            v: &'a BigInt,
        }

        impl Serialize for Entry<'_> {
            fn serialize<S: Serializer>(
                &self,
                serializer: S,
            ) -> std::result::Result<S::Ok, S::Error> {
                let mut m = serializer.serialize_map(Some(3))?;
                m.serialize_entry("i", &self.i)?;
                m.serialize_entry("j", &self.j)?;
                match self.v.to_i64() {
                    Some(small) => m.serialize_entry("v", &small)?,
                    None => m.serialize_entry("v", &self.v.to_string())?,
                }
                m.end()
            }
        }

        impl Serialize for Entries<'_> {
            fn serialize<S: Serializer>(
                &self,
                serializer: S,
            ) -> std::result::Result<S::Ok, S::Error> {
                let d = self.0.dim();
                let mut seq = serializer.serialize_seq(None)?;
                for i in 1..d {
                    for j in (i + 1)..=d {
                        let v = self.0.upper(i, j);
                        if !v.is_zero() {
                            seq.serialize_element(&Entry { i, j, v })?;
                        }
                    }
                }
                seq.end()
            }
        }

        let mut m = serializer.serialize_map(Some(2))?;
        m.serialize_entry("d", &self.d)?;
        m.serialize_entry("entries", &Entries(self))?;
        m.end()
    }
}

impl<'de> Deserialize<'de> for UniTri {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct RawEntry {
            i: usize,
            j: usize,
            v: RawValue,
        }

        struct RawValue(BigInt);

        impl<'de> Deserialize<'de> for RawValue {
            fn deserialize<D: Deserializer<'de>>(
                deserializer: D,
            ) -> std::result::Result<Self, D::Error> {
                struct V;
                impl Visitor<'_> for V {
                    type Value = RawValue;
                    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                        f.write_str("an integer or a decimal string")
                    }
                    fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<RawValue, E> {
                        Ok(RawValue(BigInt::from(v)))
                    }
                    fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<RawValue, E> {
                        Ok(RawValue(BigInt::from(v)))
                    }
                    fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<RawValue, E> {
                        v.parse::<BigInt>()
                            .map(RawValue)
                            .map_err(|_| E::custom(format!("bad integer literal {v:?}")))
                    }
                }
                deserializer.deserialize_any(V)
            }
        }

        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = UniTri;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a map {d, entries}")
            }
            fn visit_map<A: MapAccess<'de>>(
                self,
                mut map: A,
            ) -> std::result::Result<UniTri, A::Error> {
                let mut d: Option<usize> = None;
                let mut raw: Option<Vec<RawEntry>> = None;
                while let Some(key) = map.next_key::<String>()? {
                    match key.as_str() {
                        "d" => d = Some(map.next_value()?),
                        "entries" => raw = Some(map.next_value()?),
                        other => return Err(de::Error::unknown_field(other, &["d", "entries"])),
                    }
                }
                let d = d.ok_or_else(|| de::Error::missing_field("d"))?;
                if d < 2 {
                    return Err(de::Error::custom("dimension must be at least 2"));
                }
                let mut a = UniTri::identity(d);
                for e in raw.unwrap_or_default() {
                    if !(1 <= e.i && e.i < e.j && e.j <= d) {
                        return Err(de::Error::custom(format!(
                            "entry ({}, {}) is not strictly upper in dimension {}",
                            e.i, e.j, d
                        )));
                    }
                    a.set_upper(e.i, e.j, e.v.0);
                }
                Ok(a)
            }
        }
        deserializer.deserialize_map(V)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn e(d: usize, i: usize, j: usize, v: i64) -> UniTri {
        UniTri::elementary(d, i, j, v)
    }

    #[test]
    fn product_of_elementaries() {
        // (1+e12)(1+e23) = 1+e12+e23+e13 in U_3
        let a = e(3, 1, 2, 1).mul(&e(3, 2, 3, 1)).unwrap();
        let mut expect = UniTri::identity(3);
        expect.set_upper(1, 2, 1);
        expect.set_upper(2, 3, 1);
        expect.set_upper(1, 3, 1);
        assert_eq!(a, expect);
    }

    #[test]
    fn identity_and_inverse_pairs() {
        let a = e(3, 1, 2, 1);
        assert_eq!(a.mul(&UniTri::identity(3)).unwrap(), a);
        assert!(a.mul(&e(3, 1, 2, -1)).unwrap().is_identity());
        assert_eq!(e(3, 1, 2, 1).inverse(), e(3, 1, 2, -1));
        assert!(UniTri::identity(4).inverse().is_identity());
    }

    #[test]
    fn inverse_of_full_band() {
        // (1+e12+e23+e13)^{-1} = 1−e12−e23
        let mut a = UniTri::identity(3);
        a.set_upper(1, 2, 1);
        a.set_upper(2, 3, 1);
        a.set_upper(1, 3, 1);
        let mut expect = UniTri::identity(3);
        expect.set_upper(1, 2, -1);
        expect.set_upper(2, 3, -1);
        assert_eq!(a.inverse(), expect);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        assert!(matches!(
            e(3, 1, 2, 1).mul(&e(4, 1, 2, 1)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn coset_rep_examples() {
        // Purely central element
        let (rep, c) = coset_rep(&e(3, 1, 3, 5));
        assert!(rep.lift().is_identity());
        assert_eq!(c.k, BigInt::from(5));

        // Already in C
        let (rep, c) = coset_rep(&e(3, 1, 2, 1));
        assert_eq!(rep.lift(), &e(3, 1, 2, 1));
        assert!(c.k.is_zero());

        // 1+e12+e23+e13 -> (1+e12+e23, k = 1)
        let mut a = UniTri::identity(3);
        a.set_upper(1, 2, 1);
        a.set_upper(2, 3, 1);
        a.set_upper(1, 3, 1);
        let (rep, c) = coset_rep(&a);
        let mut expect = UniTri::identity(3);
        expect.set_upper(1, 2, 1);
        expect.set_upper(2, 3, 1);
        assert_eq!(rep.lift(), &expect);
        assert_eq!(c.k, BigInt::one());
        // reassembly is exact
        let back = rep.lift().mul(&e(3, 1, 3, 1)).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn box_counts_and_order() {
        let spec = BoxSpec::new(3, -2, 2).unwrap();
        let elems: Vec<_> = enumerate_box(&spec, 1 << 20).unwrap().collect();
        assert_eq!(elems.len(), 25);
        // lexicographic row-major: first element has all entries at lo
        assert_eq!(*elems[0].lift().upper(1, 2), BigInt::from(-2));
        assert_eq!(*elems[0].lift().upper(2, 3), BigInt::from(-2));
        // least significant position is (2,3)
        assert_eq!(*elems[1].lift().upper(1, 2), BigInt::from(-2));
        assert_eq!(*elems[1].lift().upper(2, 3), BigInt::from(-1));
        let mut sorted = elems.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 25);

        let single = BoxSpec::new(3, 0, 0).unwrap();
        let elems: Vec<_> = enumerate_box(&single, 16).unwrap().collect();
        assert_eq!(elems.len(), 1);
        assert!(elems[0].lift().is_identity());

        let d4 = BoxSpec::new(4, -2, 2).unwrap();
        assert_eq!(d4.count(), BigInt::from(3125));
        assert_eq!(enumerate_box(&d4, 1 << 20).unwrap().count(), 3125);
        assert_eq!(
            d4.free_positions(),
            vec![(1, 2), (1, 3), (2, 3), (2, 4), (3, 4)]
        );
    }

    #[test]
    fn box_cap_exceeded() {
        let spec = BoxSpec::new(3, -2, 2).unwrap();
        assert!(matches!(
            enumerate_box(&spec, 24),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn congruence_membership() {
        assert!(UniTri::identity(3).in_ln(7));
        assert!(e(3, 1, 2, 5).in_ln(5));
        assert!(!e(3, 1, 2, 1).in_ln(5));
    }

    #[test]
    fn json_round_trip_with_big_entry() {
        let mut a = UniTri::identity(3);
        a.set_upper(1, 2, 1);
        a.set_upper(1, 3, "123456789012345678901234567890".parse::<BigInt>().unwrap());
        let s = serde_json::to_string(&a).unwrap();
        assert!(s.contains("\"123456789012345678901234567890\""));
        let b: UniTri = serde_json::from_str(&s).unwrap();
        assert_eq!(a, b);

        let c: UniTri =
            serde_json::from_str(r#"{"d":3,"entries":[{"i":1,"j":2,"v":1}]}"#).unwrap();
        assert_eq!(c, e(3, 1, 2, 1));
    }

    #[test]
    fn display_labels() {
        assert_eq!(e(3, 1, 2, 1).to_string(), "1+e12");
        assert_eq!(e(3, 1, 2, -1).to_string(), "1-e12");
        assert_eq!(e(3, 2, 3, 3).to_string(), "1+3e23");
        assert_eq!(UniTri::identity(3).to_string(), "1");
    }

    fn arb_unitri(d: usize, bound: i64) -> impl Strategy<Value = UniTri> {
        proptest::collection::vec(-bound..=bound, upper_len(d)).prop_map(move |vals| {
            UniTri::from_entries(d, vals.into_iter().map(BigInt::from).collect()).unwrap()
        })
    }

    proptest! {
        #[test]
        fn mul_is_associative(a in arb_unitri(4, 1000), b in arb_unitri(4, 1000), c in arb_unitri(4, 1000)) {
            let left = a.mul(&b).unwrap().mul(&c).unwrap();
            let right = a.mul(&b.mul(&c).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }

        #[test]
        fn inverse_law(a in arb_unitri(4, 1000)) {
            prop_assert!(a.mul(&a.inverse()).unwrap().is_identity());
            prop_assert!(a.inverse().mul(&a).unwrap().is_identity());
        }

        #[test]
        fn coset_factorization(a in arb_unitri(4, 1000)) {
            let (rep, c) = coset_rep(&a);
            let central = UniTri::elementary(4, 1, 4, c.k.clone());
            prop_assert_eq!(rep.lift().mul(&central).unwrap(), a);
        }

        #[test]
        fn ln_is_closed_under_group_ops(a in arb_unitri(3, 40), b in arb_unitri(3, 40), n in 2u64..8) {
            let n_big = BigInt::from(n);
            let scale = |x: &UniTri| {
                UniTri::from_entries(3, x.entries().iter().map(|e| e * &n_big).collect()).unwrap()
            };
            let (sa, sb) = (scale(&a), scale(&b));
            prop_assert!(sa.in_ln(n) && sb.in_ln(n));
            prop_assert!(sa.mul(&sb).unwrap().in_ln(n));
            prop_assert!(sa.inverse().in_ln(n));
        }
    }
}
