//! The quotient `G/Z` through canonical representatives, the box
//! representative system `K_n`, reduction mod the congruence subgroup `L_n`,
//! and a Følner set whose containment property is verified by enumeration
//! rather than assumed.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::unitri::{enumerate_box, BoxSpec, UniTri};
use crate::{Error, Result};

/// An element of `G/Z`, held as its unique representative with vanishing
/// `(1, d)` entry. Equality is entrywise equality of representatives.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct QuotientElt(UniTri);

impl QuotientElt {
    pub fn identity(d: usize) -> Self {
        QuotientElt(UniTri::identity(d))
    }

    /// Wraps a matrix already lying in the coset section.
    pub(crate) fn from_canonical(rep: UniTri) -> Self {
        debug_assert!(rep.upper(1, rep.dim()).is_zero());
        QuotientElt(rep)
    }

    /// Image of an arbitrary group element: its central part is discarded.
    pub fn from_unitri(a: &UniTri) -> Self {
        let (rep, _) = a.split_center();
        QuotientElt(rep)
    }

    /// The canonical lift into the coset section.
    pub fn lift(&self) -> &UniTri {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_identity()
    }
}

impl std::fmt::Debug for QuotientElt {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}Z", self.0)
    }
}

impl std::fmt::Display for QuotientElt {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        std::fmt::Display::fmt(&self.0, f)
    }
}

/// Group law of `G/Z` in the section: multiply lifts, discard the center.
pub fn quotient_mul(x: &QuotientElt, y: &QuotientElt) -> Result<QuotientElt> {
    Ok(QuotientElt::from_unitri(&x.0.mul(&y.0)?))
}

/// Left translation of a quotient element by an arbitrary group element.
pub fn translate(y: &UniTri, x: &QuotientElt) -> Result<QuotientElt> {
    Ok(QuotientElt::from_unitri(&y.mul(&x.0)?))
}

pub fn quotient_inv(x: &QuotientElt) -> QuotientElt {
    QuotientElt::from_unitri(&x.0.inverse())
}

/// The box of coset representatives for `π(G)/L_n`:
/// `[−(n−1)/2, (n−1)/2]` for odd `n`, `[−n/2+1, n/2]` for even `n`;
/// each free entry ranges over exactly `n` values.
pub fn kn_spec(n: u64, d: usize) -> BoxSpec {
    assert!(n >= 2, "congruence level must be at least 2");
    let n = n as i64;
    let (lo, hi) = if n % 2 == 1 {
        (-(n - 1) / 2, (n - 1) / 2)
    } else {
        (-n / 2 + 1, n / 2)
    };
    BoxSpec::new(d, lo, hi).expect("kn bounds are ordered")
}

/// `|K_n| = n^(d(d−1)/2 − 1)`.
pub fn kn_size(n: u64, d: usize) -> BigInt {
    kn_spec(n, d).count()
}

/// The unique `y ∈ K_n` with `xL_n = yL_n`: each entry of the lift is
/// replaced by its centered residue in the `K_n` range.
pub fn reduce_to_kn(x: &QuotientElt, n: u64) -> QuotientElt {
    let spec = kn_spec(n, x.dim());
    let lo = BigInt::from(spec.lo);
    let n_big = BigInt::from(n);
    let entries = x
        .lift()
        .entries()
        .iter()
        .map(|e| (e - &lo).mod_floor(&n_big) + &lo)
        .collect();
    QuotientElt(UniTri::from_entries(x.dim(), entries).expect("entry count preserved"))
}

/// The chosen Følner set `F_n = π(G[−m, m])` for level `n`, together with the
/// data that its containment property was checked by direct enumeration.
#[derive(Clone, Debug)]
pub struct FolnerData {
    pub n: u64,
    pub d: usize,
    pub kn: BoxSpec,
    /// Følner box radius: `F_n = π(G[−m, m])`.
    pub m: u64,
    pub elements: Vec<QuotientElt>,
    /// Set once the inverse-entry bound below has been verified.
    pub verified: bool,
}

/// Summary form used by reports and the `folner` subcommand.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FolnerSummary {
    pub n: u64,
    pub m: u64,
    #[serde(rename = "size_Kn")]
    pub size_kn: u64,
    #[serde(rename = "size_Fn")]
    pub size_fn: u64,
    pub property4_verified: bool,
}

impl FolnerData {
    pub fn summary(&self) -> FolnerSummary {
        FolnerSummary {
            n: self.n,
            m: self.m,
            size_kn: kn_size(self.n, self.d)
                .to_u64()
                .expect("kn size fits u64 at desk scale"),
            size_fn: self.elements.len() as u64,
            property4_verified: self.verified,
        }
    }
}

/// Checks the containment property for radius `m` at level `n`: the full
/// matrix inverse of every lift of `G[−m, m]` must have all strictly-upper
/// entries `e` with `e⁴ ≤ n`, i.e. `|e| ≤ n^(1/4)`. This is slightly stronger
/// than needed (the canonical representative of the inverse drops the `(1,d)`
/// entry) and keeps the certificate conservative.
fn inverse_entries_bounded(d: usize, m: u64, n: u64, cap: u64) -> Result<bool> {
    let spec = BoxSpec::new(d, -(m as i64), m as i64)?;
    let n_big = BigInt::from(n);
    for f in enumerate_box(&spec, cap)? {
        let inv = f.lift().inverse();
        for e in inv.entries() {
            if e.abs().pow(4) > n_big {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Builds the Følner data for level `n`: the radius starts at
/// `⌈n^(1/(4(d−1)))⌉` (inverse entries of a radius-`m` box grow like
/// `m^(d−1)`), is clamped so that `F_n ⊆ K_n`, and decrements until the
/// inverse-entry bound passes direct enumeration. `m = 0` always passes.
pub fn build_folner(n: u64, d: usize, enum_cap: u64) -> Result<FolnerData> {
    if n < 2 {
        return Err(Error::Config(format!("congruence level {n} < 2")));
    }
    if d < 2 {
        return Err(Error::Config(format!("dimension {d} < 2")));
    }
    let kn = kn_spec(n, d);
    let exponent = 4 * (d as u32 - 1);
    let start = (1u64..)
        .find(|m| {
            BigInt::from(*m).pow(exponent) >= BigInt::from(n)
        })
        .expect("radius search terminates");
    let clamp = (-kn.lo).min(kn.hi).max(0) as u64;
    let mut m = start.min(clamp);
    loop {
        if inverse_entries_bounded(d, m, n, enum_cap)? {
            break;
        }
        if m == 0 {
            // Cannot happen: the identity passes vacuously.
            return Err(Error::Invariant(format!(
                "no admissible Folner radius at n = {n}, d = {d}"
            )));
        }
        m -= 1;
    }
    let spec = BoxSpec::new(d, -(m as i64), m as i64)?;
    let elements: Vec<QuotientElt> = enumerate_box(&spec, enum_cap)?.collect();
    debug_assert!(elements.iter().all(|f| kn.contains(f.lift())));
    Ok(FolnerData {
        n,
        d,
        kn,
        m,
        elements,
        verified: true,
    })
}

/// Re-runs the containment check on existing Følner data.
pub fn verify_property4(fd: &FolnerData, enum_cap: u64) -> Result<bool> {
    Ok(inverse_entries_bounded(fd.d, fd.m, fd.n, enum_cap)?
        && fd.elements.iter().all(|f| fd.kn.contains(f.lift())))
}

/// Boundary ratio `|F Δ Fx| / |F|`, computed exactly on integer counts.
/// `F` must be duplicate-free.
pub fn folner_ratio(f: &[QuotientElt], x: &QuotientElt) -> Result<f64> {
    assert!(!f.is_empty(), "Folner set must be nonempty");
    let set: HashSet<&QuotientElt> = f.iter().collect();
    let mut common = 0u64;
    for elt in f {
        let shifted = quotient_mul(elt, x)?;
        if set.contains(&shifted) {
            common += 1;
        }
    }
    let sym_diff = 2 * (f.len() as u64 - common);
    Ok(sym_diff as f64 / f.len() as f64)
}
