//! Exact representations of the rotation number θ and the continued-fraction
//! machinery that picks the congruence level `n`.
//!
//! θ is held exactly (rational, quadratic irrational, or decimal literal) and
//! every phase downstream is computed as `frac(kθ)` from the exact integer
//! `k` in fixed-point arithmetic with at least 192 fractional bits, so the
//! reduction mod 1 never loses the phase even when `k` is large.

use std::f64::consts::TAU;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Default fractional bits for fixed-point evaluation of θ.
pub const DEFAULT_PRECISION: u32 = 320;
/// Floor on the maintained precision.
pub const MIN_PRECISION: u32 = 192;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Kind {
    /// Reduced fraction `p/q` with `0 ≤ p < q`.
    Rational { p: BigInt, q: BigInt },
    /// `(a + b·√radicand)/c` with `radicand` not a perfect square.
    Quadratic {
        a: BigInt,
        b: BigInt,
        radicand: BigInt,
        c: BigInt,
    },
    /// Decimal literal, kept verbatim for round-trips; exact value `p/q`.
    Decimal {
        literal: String,
        p: BigInt,
        q: BigInt,
    },
}

/// An exact θ ∈ [0, 1) along with its fixed-point evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct ThetaSpec {
    kind: Kind,
    precision: u32,
    /// `⌊θ·2^precision⌋` up to 2 ulps (exact floor for rational kinds).
    fp: BigInt,
}

impl ThetaSpec {
    pub fn rational(p: impl Into<BigInt>, q: impl Into<BigInt>) -> Result<Self> {
        let (p, q) = (p.into(), q.into());
        if q.is_zero() {
            return Err(Error::Config("rational theta has zero denominator".into()));
        }
        let (mut p, mut q) = if q.is_negative() { (-p, -q) } else { (p, q) };
        let g = p.gcd(&q);
        if !g.is_zero() {
            p /= &g;
            q /= &g;
        }
        if p.is_negative() || p >= q {
            return Err(Error::Config(format!("theta {p}/{q} is outside [0, 1)")));
        }
        Self::build(Kind::Rational { p, q }, DEFAULT_PRECISION)
    }

    /// `(a + b·√d)/c` with `d` a positive non-square.
    pub fn quadratic(
        a: impl Into<BigInt>,
        b: impl Into<BigInt>,
        d: impl Into<BigInt>,
        c: impl Into<BigInt>,
    ) -> Result<Self> {
        let (a, b, d, c) = (a.into(), b.into(), d.into(), c.into());
        if c.is_zero() {
            return Err(Error::Config("quadratic theta has zero denominator".into()));
        }
        if b.is_zero() {
            return Err(Error::Config(
                "quadratic theta with b = 0 should be declared rational".into(),
            ));
        }
        if !d.is_positive() || d.sqrt().pow(2) == d {
            return Err(Error::Config(format!(
                "radicand {d} must be a positive non-square"
            )));
        }
        Self::build(
            Kind::Quadratic {
                a,
                b,
                radicand: d,
                c,
            },
            DEFAULT_PRECISION,
        )
    }

    /// Parses a literal like `"0.7390851332"`.
    pub fn decimal(literal: &str) -> Result<Self> {
        let err = || Error::Config(format!("bad decimal theta literal {literal:?}"));
        let (int_part, frac_part) = match literal.split_once('.') {
            Some((i, f)) => (i, f),
            None => (literal, ""),
        };
        if !(int_part == "0" || (int_part.is_empty() && !frac_part.is_empty())) {
            return Err(err());
        }
        if !frac_part.chars().all(|c| c.is_ascii_digit()) {
            return Err(err());
        }
        let p: BigInt = if frac_part.is_empty() {
            BigInt::zero()
        } else {
            frac_part.parse().map_err(|_| err())?
        };
        let q = BigInt::from(10u32).pow(frac_part.len() as u32);
        let g = p.gcd(&q);
        let (p, q) = if g.is_zero() { (p, q) } else { (&p / &g, &q / &g) };
        Self::build(
            Kind::Decimal {
                literal: literal.to_string(),
                p,
                q,
            },
            DEFAULT_PRECISION,
        )
    }

    pub fn zero() -> Self {
        Self::rational(0, 1).expect("zero is a valid theta")
    }

    /// The golden-ratio conjugate `(√5 − 1)/2`.
    pub fn golden() -> Self {
        Self::quadratic(-1, 1, 5, 2).expect("golden ratio is a valid theta")
    }

    pub fn with_precision(self, precision: u32) -> Result<Self> {
        Self::build(self.kind, precision)
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    fn build(kind: Kind, precision: u32) -> Result<Self> {
        if precision < MIN_PRECISION {
            return Err(Error::Config(format!(
                "precision {precision} below the {MIN_PRECISION}-bit floor"
            )));
        }
        let fp = match &kind {
            Kind::Rational { p, q } | Kind::Decimal { p, q, .. } => {
                (p << precision).div_floor(q)
            }
            Kind::Quadratic {
                a,
                b,
                radicand,
                c,
            } => {
                // 64 guard bits absorb the error of b·⌊√radicand⌋ / c.
                let guard = precision + 64;
                let s = (radicand << (2 * guard)).sqrt();
                let num = (a << guard) + b * s;
                num.div_floor(c) >> 64
            }
        };
        if fp.is_negative() || fp >= (BigInt::one() << precision) {
            return Err(Error::Config(format!(
                "theta {} is outside [0, 1)",
                label_of(&kind)
            )));
        }
        Ok(ThetaSpec {
            kind,
            precision,
            fp,
        })
    }

    /// Human label for messages and reports.
    pub fn label(&self) -> String {
        label_of(&self.kind)
    }

    fn exact_rational(&self) -> Option<(&BigInt, &BigInt)> {
        match &self.kind {
            Kind::Rational { p, q } | Kind::Decimal { p, q, .. } => Some((p, q)),
            Kind::Quadratic { .. } => None,
        }
    }

    /// `frac(kθ)` scaled by `2^precision`, in `[0, 2^precision)`. Exactly 0
    /// when `kθ` is an integer (rational kinds); otherwise certified within
    /// `2|k| + 1` ulps.
    fn frac_fp(&self, k: &BigInt) -> BigInt {
        match self.exact_rational() {
            Some((p, q)) => {
                let r = (k * p).mod_floor(q);
                if r.is_zero() {
                    BigInt::zero()
                } else {
                    (r << self.precision).div_floor(q)
                }
            }
            None => (k * &self.fp).mod_floor(&(BigInt::one() << self.precision)),
        }
    }

    fn fp_to_f64(&self, t: &BigInt) -> f64 {
        t.to_f64().unwrap_or(0.0) / 2f64.powi(self.precision as i32)
    }

    /// `frac(kθ)` as a float.
    pub fn frac_mod1(&self, k: &BigInt) -> f64 {
        self.fp_to_f64(&self.frac_fp(k))
    }

    /// `exp(2πi·kθ)`. Exactly 1 when `kθ` is an integer.
    pub fn phase(&self, k: &BigInt) -> Complex64 {
        let t = self.frac_fp(k);
        if t.is_zero() {
            return Complex64::new(1.0, 0.0);
        }
        let angle = TAU * self.fp_to_f64(&t);
        Complex64::new(angle.cos(), angle.sin())
    }

    /// `|exp(2πi·kθ) − 1| = 2·|sin(π·frac(kθ))|`.
    pub fn phase_defect(&self, k: &BigInt) -> f64 {
        let t = self.frac_fp(k);
        if t.is_zero() {
            return 0.0;
        }
        2.0 * (std::f64::consts::PI * self.fp_to_f64(&t)).sin().abs()
    }

    /// `dist(nθ, ℤ)`; exactly 0 for rational θ when the denominator divides n.
    pub fn dist_to_z(&self, n: u64) -> f64 {
        assert!(n >= 1);
        let k = BigInt::from(n);
        match self.exact_rational() {
            Some((p, q)) => {
                let r = (&k * p).mod_floor(q);
                if r.is_zero() {
                    return 0.0;
                }
                let m = std::cmp::min(r.clone(), q - &r);
                let scaled = (m << self.precision).div_floor(q);
                self.fp_to_f64(&scaled)
            }
            None => {
                let t = self.frac_fp(&k);
                let half = std::cmp::min(t.clone(), (BigInt::one() << self.precision) - &t);
                self.fp_to_f64(&half)
            }
        }
    }

    /// Strict test `dist(nθ, ℤ) < 1/n`, decided in exact or fixed-point
    /// arithmetic rather than on floats.
    pub fn dist_condition(&self, n: u64) -> bool {
        let k = BigInt::from(n);
        match self.exact_rational() {
            Some((p, q)) => {
                let r = (&k * p).mod_floor(q);
                let m = std::cmp::min(r.clone(), q - &r);
                m * n < *q
            }
            None => {
                let t = self.frac_fp(&k);
                let one = BigInt::one() << self.precision;
                let m = std::cmp::min(t.clone(), &one - &t);
                m * n < one
            }
        }
    }
}

fn label_of(kind: &Kind) -> String {
    match kind {
        Kind::Rational { p, q } => format!("{p}/{q}"),
        Kind::Quadratic {
            a,
            b,
            radicand,
            c,
        } => format!("({a}+{b}*sqrt({radicand}))/{c}"),
        Kind::Decimal { literal, .. } => literal.clone(),
    }
}

impl fmt::Display for ThetaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

// JSON forms:
//   {"kind":"rational","p":1,"q":3}
//   {"kind":"quadratic","a":-1,"b":1,"D":5,"c":2}
//   {"kind":"decimal","value":"0.7390851332"}
// plus an optional "precision" field (fractional bits, default 320).

fn bigint_json(v: &BigInt) -> serde_json::Value {
    match v.to_i64() {
        Some(small) => serde_json::Value::from(small),
        None => serde_json::Value::from(v.to_string()),
    }
}

impl Serialize for ThetaSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = serializer.serialize_map(None)?;
        match &self.kind {
            Kind::Rational { p, q } => {
                m.serialize_entry("kind", "rational")?;
                m.serialize_entry("p", &bigint_json(p))?;
                m.serialize_entry("q", &bigint_json(q))?;
            }
            Kind::Quadratic {
                a,
                b,
                radicand,
                c,
            } => {
                m.serialize_entry("kind", "quadratic")?;
                m.serialize_entry("a", &bigint_json(a))?;
                m.serialize_entry("b", &bigint_json(b))?;
                m.serialize_entry("D", &bigint_json(radicand))?;
                m.serialize_entry("c", &bigint_json(c))?;
            }
            Kind::Decimal { literal, .. } => {
                m.serialize_entry("kind", "decimal")?;
                m.serialize_entry("value", literal)?;
            }
        }
        m.serialize_entry("precision", &self.precision)?;
        m.end()
    }
}

impl<'de> Deserialize<'de> for ThetaSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = serde_json::Value::deserialize(deserializer)?;
        let obj = raw
            .as_object()
            .ok_or_else(|| de::Error::custom("theta must be a JSON object"))?;
        let get_int = |key: &str| -> std::result::Result<BigInt, D::Error> {
            let v = obj
                .get(key)
                .ok_or_else(|| de::Error::custom(format!("theta is missing field {key:?}")))?;
            match v {
                serde_json::Value::Number(n) if n.is_i64() || n.is_u64() => {
                    Ok(BigInt::from(n.as_i64().unwrap_or_else(|| {
                        n.as_u64().expect("checked") as i64
                    })))
                }
                serde_json::Value::String(s) => s
                    .parse()
                    .map_err(|_| de::Error::custom(format!("bad integer in theta field {key:?}"))),
                _ => Err(de::Error::custom(format!(
                    "theta field {key:?} must be an integer or string"
                ))),
            }
        };
        let kind = obj
            .get("kind")
            .and_then(|v| v.as_str())
            .ok_or_else(|| de::Error::custom("theta is missing the \"kind\" tag"))?;
        let spec = match kind {
            "rational" => ThetaSpec::rational(get_int("p")?, get_int("q")?),
            "quadratic" => ThetaSpec::quadratic(
                get_int("a")?,
                get_int("b")?,
                get_int("D")?,
                get_int("c")?,
            ),
            "decimal" => {
                let lit = obj
                    .get("value")
                    .and_then(|v| v.as_str())
                    .ok_or_else(|| de::Error::custom("decimal theta needs a \"value\" string"))?;
                ThetaSpec::decimal(lit)
            }
            other => Err(Error::Config(format!("unknown theta kind {other:?}"))),
        }
        .map_err(|e| de::Error::custom(e.to_string()))?;
        match obj.get("precision") {
            Some(v) => {
                let bits = v
                    .as_u64()
                    .ok_or_else(|| de::Error::custom("precision must be a positive integer"))?;
                spec.with_precision(bits as u32)
                    .map_err(|e| de::Error::custom(e.to_string()))
            }
            None => Ok(spec),
        }
    }
}

/// A continued-fraction convergent `p/q` of θ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Convergent {
    pub p: BigInt,
    pub q: BigInt,
    pub index: usize,
}

/// Streams the partial quotients of θ. Finite for rational kinds.
enum Digits {
    Rational { num: BigInt, den: BigInt },
    Surd { p: BigInt, q: BigInt, d: BigInt, sqrt_d: BigInt },
}

impl Digits {
    fn new(theta: &ThetaSpec) -> Digits {
        match &theta.kind {
            Kind::Rational { p, q } | Kind::Decimal { p, q, .. } => Digits::Rational {
                num: p.clone(),
                den: q.clone(),
            },
            Kind::Quadratic {
                a,
                b,
                radicand,
                c,
            } => {
                // Fold the coefficient into the radicand: (a + b√D)/c with
                // b < 0 becomes (−a + √(b²D))/(−c).
                let d = b * b * radicand;
                let (mut p, mut q) = if b.is_positive() {
                    (a.clone(), c.clone())
                } else {
                    (-a, -c)
                };
                // The surd recurrence needs q | (d − p²).
                let mut d = d;
                if !(&d - &p * &p).mod_floor(&q).is_zero() {
                    p *= q.abs();
                    d *= &q * &q;
                    q *= q.abs().clone();
                }
                let sqrt_d = d.sqrt();
                Digits::Surd { p, q, d, sqrt_d }
            }
        }
    }
}

impl Iterator for Digits {
    type Item = BigInt;

    fn next(&mut self) -> Option<BigInt> {
        match self {
            Digits::Rational { num, den } => {
                if den.is_zero() {
                    return None;
                }
                let a = num.div_floor(den);
                let r = num.mod_floor(den);
                *num = std::mem::replace(den, r);
                Some(a)
            }
            Digits::Surd { p, q, d, sqrt_d } => {
                // a = ⌊(p + √d)/q⌋ with √d irrational.
                let t = &*p + &*sqrt_d;
                let a = if q.is_positive() {
                    t.div_floor(q)
                } else {
                    -(t.div_floor(&-q.clone()) + 1)
                };
                let p_next = &a * &*q - &*p;
                let q_next = (&*d - &p_next * &p_next) / &*q;
                debug_assert!(((&*d - &p_next * &p_next) % &*q).is_zero());
                *p = p_next;
                *q = q_next;
                Some(a)
            }
        }
    }
}

/// The first `count` convergents of θ. Denominators are strictly increasing
/// (a duplicate denominator 1 keeps only the better approximation); a
/// rational θ exhausts its finite expansion and returns the full list.
pub fn convergents(theta: &ThetaSpec, count: usize) -> Vec<Convergent> {
    assert!(count >= 1);
    let mut out: Vec<Convergent> = Vec::new();
    let (mut p_prev, mut p_prev2) = (BigInt::one(), BigInt::zero());
    let (mut q_prev, mut q_prev2) = (BigInt::zero(), BigInt::one());
    for (index, a) in Digits::new(theta).enumerate() {
        let p = &a * &p_prev + &p_prev2;
        let q = &a * &q_prev + &q_prev2;
        p_prev2 = std::mem::replace(&mut p_prev, p.clone());
        q_prev2 = std::mem::replace(&mut q_prev, q.clone());
        let conv = Convergent { p, q, index };
        debug_assert!(convergent_error_ok(theta, &conv));
        match out.last() {
            Some(last) if last.q == conv.q => *out.last_mut().expect("nonempty") = conv,
            _ => out.push(conv),
        }
        if out.len() == count && out.last().map(|c| c.index) == Some(index) && index > 0 {
            // Only stop once the last slot can no longer be replaced by a
            // duplicate denominator (possible at index 1 alone).
            if out.last().expect("nonempty").q > BigInt::one() || index >= 1 {
                break;
            }
        }
        if out.len() > count {
            out.truncate(count);
            break;
        }
    }
    out.truncate(count);
    out
}

/// Verifies `|qθ − p| < 1/q` in exact or ≥192-bit fixed-point arithmetic.
pub fn convergent_error_ok(theta: &ThetaSpec, conv: &Convergent) -> bool {
    match theta.exact_rational() {
        Some((tp, tq)) => {
            // |q·tp/tq − p|·q < 1  ⇔  |q·tp − p·tq|·q < tq
            ((&conv.q * tp - &conv.p * tq).abs() * &conv.q) < *tq
        }
        None => {
            let scaled_err = (&conv.q * &theta.fp - (&conv.p << theta.precision)).abs();
            scaled_err * &conv.q < (BigInt::one() << theta.precision)
        }
    }
}

/// The analytic discrepancy bound `2πd²·n^(−1/2)`.
pub fn analytic_bound(d: usize, n: u64) -> f64 {
    TAU * (d * d) as f64 / (n as f64).sqrt()
}

/// Ascending stream of admissible levels: `n > p⁴`, `n ≥ 2`, `n ≤ cap`, and
/// `dist(nθ, ℤ) < 1/n`. Convergent denominators for irrational θ, multiples
/// of the reduced denominator for rational θ.
pub fn qualifying_moduli<'a>(
    theta: &'a ThetaSpec,
    p_max: &BigInt,
    cap: u64,
) -> Box<dyn Iterator<Item = u64> + 'a> {
    let p4 = p_max.pow(4);
    let floor = std::cmp::max(p4, BigInt::one()); // need n > p⁴ and n ≥ 2
    match theta.exact_rational() {
        Some((_, q)) => {
            let q = q.to_u64();
            match q {
                Some(q) if q <= cap => {
                    let start = match floor.to_u64() {
                        Some(f) => f / q + 1, // first multiple strictly above floor
                        None => return Box::new(std::iter::empty()),
                    };
                    Box::new(
                        (start..)
                            .map(move |k| k * q)
                            .take_while(move |n| *n <= cap)
                            .filter(move |n| theta.dist_condition(*n)),
                    )
                }
                _ => Box::new(std::iter::empty()),
            }
        }
        None => {
            let mut digits = Digits::new(theta);
            let (mut p_prev, mut p_prev2) = (BigInt::one(), BigInt::zero());
            let (mut q_prev, mut q_prev2) = (BigInt::zero(), BigInt::one());
            let cap_big = BigInt::from(cap);
            let iter = std::iter::from_fn(move || {
                loop {
                    let a = digits.next()?;
                    let p = &a * &p_prev + &p_prev2;
                    let q = &a * &q_prev + &q_prev2;
                    p_prev2 = std::mem::replace(&mut p_prev, p);
                    q_prev2 = std::mem::replace(&mut q_prev, q.clone());
                    if q > cap_big {
                        return None;
                    }
                    if q <= floor {
                        continue;
                    }
                    let n = q.to_u64().expect("below cap");
                    if theta.dist_condition(n) {
                        return Some(n);
                    }
                }
            });
            Box::new(iter)
        }
    }
}

/// Outcome of the level search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SelectedModulus {
    pub n: u64,
    /// Whether `2πd²·n^(−1/2) < ε` also holds at the returned level.
    pub analytic_bound_met: bool,
}

/// Picks the smallest admissible `n` with `2πd²·n^(−1/2) < ε`. When no level
/// below `cap` meets the analytic condition, returns the largest admissible
/// level with the flag cleared; errors when not even the distance condition
/// is attainable below the cap.
pub fn select_n(
    theta: &ThetaSpec,
    p_max: &BigInt,
    eps: f64,
    d: usize,
    cap: u64,
) -> Result<SelectedModulus> {
    if eps <= 0.0 {
        return Err(Error::Config(format!("epsilon {eps} must be positive")));
    }
    if cap < 2 {
        return Err(Error::Config(format!("modulus cap {cap} < 2")));
    }
    let mut last = None;
    for n in qualifying_moduli(theta, p_max, cap) {
        if analytic_bound(d, n) < eps {
            return Ok(SelectedModulus {
                n,
                analytic_bound_met: true,
            });
        }
        last = Some(n);
    }
    match last {
        Some(n) => Ok(SelectedModulus {
            n,
            analytic_bound_met: false,
        }),
        None => Err(Error::NoModulus(format!(
            "no n <= {cap} with n > p^4 = {} and dist({}·n, Z) < 1/n",
            p_max.pow(4),
            theta.label()
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOLDEN_F64: f64 = 0.618_033_988_749_894_9;

    #[test]
    fn golden_denominators_are_fibonacci() {
        let theta = ThetaSpec::golden();
        let qs: Vec<u64> = convergents(&theta, 8)
            .iter()
            .map(|c| c.q.to_u64().unwrap())
            .collect();
        assert_eq!(qs, vec![1, 2, 3, 5, 8, 13, 21, 34]);
    }

    #[test]
    fn golden_convergents_verified_at_high_precision() {
        let theta = ThetaSpec::golden();
        for conv in convergents(&theta, 20) {
            assert!(convergent_error_ok(&theta, &conv));
            // and the same inequality holds in floating point
            let (p, q) = (conv.p.to_f64().unwrap(), conv.q.to_f64().unwrap());
            assert!((q * GOLDEN_F64 - p).abs() < 1.0 / q);
        }
    }

    #[test]
    fn rational_expansion_is_finite() {
        let theta = ThetaSpec::rational(1, 3).unwrap();
        let convs = convergents(&theta, 10);
        assert_eq!(convs.len(), 2);
        assert_eq!(convs[0].q, BigInt::one());
        assert_eq!(convs[1].p, BigInt::from(1));
        assert_eq!(convs[1].q, BigInt::from(3));

        let zero = ThetaSpec::zero();
        let convs = convergents(&zero, 5);
        assert_eq!(convs.len(), 1);
        assert!(convs[0].p.is_zero());
        assert!(convs[0].q.is_one());
    }

    #[test]
    fn dist_examples() {
        assert_eq!(ThetaSpec::rational(1, 3).unwrap().dist_to_z(3), 0.0);

        let golden = ThetaSpec::golden();
        let expect = (5.0 * GOLDEN_F64 - 3.0).abs();
        assert!((golden.dist_to_z(5) - expect).abs() < 1e-12);
        assert!((expect - 0.0902).abs() < 1e-4);

        assert_eq!(ThetaSpec::decimal("0.25").unwrap().dist_to_z(2), 0.5);
    }

    #[test]
    fn dist_condition_matches_classical_property() {
        let golden = ThetaSpec::golden();
        for conv in convergents(&golden, 15) {
            assert!(golden.dist_condition(conv.q.to_u64().unwrap()));
        }
        // 10 is not a Fibonacci denominator: dist(10θ, Z) ≈ 0.18 > 1/10
        assert!(!golden.dist_condition(10));
    }

    #[test]
    fn select_examples() {
        let golden = ThetaSpec::golden();
        let sel = select_n(&golden, &BigInt::one(), 10.0, 3, 1_000_000).unwrap();
        assert_eq!(sel.n, 34);
        assert!(sel.analytic_bound_met);

        // Rational: smallest multiple of 3 above the analytic threshold
        // (2π·9/10)² ≈ 31.98, hence 33.
        let third = ThetaSpec::rational(1, 3).unwrap();
        let sel = select_n(&third, &BigInt::one(), 10.0, 3, 1_000_000).unwrap();
        assert_eq!(sel.n, 33);
        assert!(sel.analytic_bound_met);

        // theta = 0: every n qualifies by distance; smallest above threshold.
        let sel = select_n(&ThetaSpec::zero(), &BigInt::one(), 10.0, 3, 1_000_000).unwrap();
        assert_eq!(sel.n, 32);
        assert!(sel.analytic_bound_met);
    }

    #[test]
    fn select_falls_back_to_largest_admissible() {
        let golden = ThetaSpec::golden();
        let sel = select_n(&golden, &BigInt::one(), 1e-3, 3, 1_000_000).unwrap();
        assert!(!sel.analytic_bound_met);
        assert_eq!(sel.n, 832_040); // largest Fibonacci number below 10^6

        assert!(matches!(
            select_n(&golden, &BigInt::from(40), 10.0, 3, 1_000_000),
            Err(Error::NoModulus(_))
        ));
    }

    #[test]
    fn phases_are_exact_for_trivial_theta() {
        let zero = ThetaSpec::zero();
        for k in [-5i64, 0, 3, 1_000_003] {
            let ph = zero.phase(&BigInt::from(k));
            assert_eq!(ph, Complex64::new(1.0, 0.0));
        }
        let third = ThetaSpec::rational(1, 3).unwrap();
        assert_eq!(third.phase(&BigInt::from(9)), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn phase_matches_f64_for_small_k() {
        let golden = ThetaSpec::golden();
        for k in [-7i64, 1, 2, 34, 233] {
            let ph = golden.phase(&BigInt::from(k));
            let angle = TAU * (k as f64 * GOLDEN_F64).rem_euclid(1.0);
            assert!((ph - Complex64::new(angle.cos(), angle.sin())).norm() < 1e-9);
            assert!((ph.norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn phase_survives_large_exponents() {
        // k ~ d·p·n^(5/4) scale: a 64-bit float reduction of kθ would be
        // meaningless here; the fixed-point path keeps the phase.
        let golden = ThetaSpec::golden();
        let k: BigInt = "123456789123456789123456789".parse().unwrap();
        let ph = golden.phase(&k);
        assert!((ph.norm() - 1.0).abs() < 1e-14);
        // against a higher-precision evaluation of the same quantity
        let hi = golden.clone().with_precision(512).unwrap();
        assert!((ph - hi.phase(&k)).norm() < 1e-12);
    }

    #[test]
    fn theta_json_round_trip() {
        let golden = ThetaSpec::golden();
        let s = serde_json::to_string(&golden).unwrap();
        assert!(s.contains("\"kind\":\"quadratic\""));
        assert!(s.contains("\"D\":5"));
        let back: ThetaSpec = serde_json::from_str(&s).unwrap();
        assert_eq!(golden, back);

        let spec: ThetaSpec =
            serde_json::from_str(r#"{"kind":"rational","p":1,"q":3}"#).unwrap();
        assert_eq!(spec, ThetaSpec::rational(1, 3).unwrap());

        let spec: ThetaSpec =
            serde_json::from_str(r#"{"kind":"decimal","value":"0.7390851332"}"#).unwrap();
        let s2 = serde_json::to_string(&spec).unwrap();
        assert!(s2.contains("0.7390851332"));

        assert!(serde_json::from_str::<ThetaSpec>(r#"{"kind":"rational","p":5,"q":3}"#).is_err());
        assert!(
            serde_json::from_str::<ThetaSpec>(r#"{"kind":"quadratic","a":0,"b":1,"D":4,"c":2}"#)
                .is_err()
        );
    }

    #[test]
    fn precision_floor_enforced() {
        assert!(ThetaSpec::golden().with_precision(128).is_err());
        assert!(ThetaSpec::golden().with_precision(192).is_ok());
    }
}
