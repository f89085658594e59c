//! Closed-form bound evaluators and the family-level bound checker.
//!
//! All arithmetic is exact. The only irrational quantities are powers of two
//! with fractional exponents; those are either squared away or bracketed by
//! dyadic rationals, and verdicts always use the side that cannot produce a
//! false violation.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};

use crate::error::{Error, Result};
use crate::family::SetFamily;
use crate::mis;
use crate::spectral::{concentration_inequality, ConcentrationMode};

/// Bits of precision used when bracketing `2^(p/q)`.
const DYADIC_BITS: u64 = 96;

/// Largest family accepted by the Turán complement check (it needs an exact
/// independence number).
pub const TURAN_CHECK_CAP: usize = 512;

pub(crate) fn int(v: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(v.into())
}

/// `2^e` for an integer exponent, possibly negative.
pub(crate) fn pow2(e: i64) -> BigRational {
    let p = BigInt::one() << e.unsigned_abs();
    if e >= 0 {
        BigRational::from_integer(p)
    } else {
        BigRational::new(BigInt::one(), p)
    }
}

fn binom2(x: &BigInt) -> BigInt {
    x * (x - 1) / 2
}

/// Tight lower bound on the odd pair number of `n + s` odd sets when `1 <= s <= n`.
pub fn oddtown_lower_bound(s: u64) -> u64 {
    s + 2
}

/// Greedy peeling lower bound for `n + s` odd sets:
/// `C(q+1, 2)·n + (q+1)(s − n·q)` with `q = ⌊s/n⌋`.
pub fn oddtown_peeling_bound(n: u64, s: u64) -> BigInt {
    assert!(n >= 1, "ground set must be non-empty");
    let q = BigInt::from(s / n);
    let n_big = BigInt::from(n);
    let r = BigInt::from(s) - &n_big * &q;
    binom2(&(&q + 1)) * &n_big + (&q + 1) * r
}

/// Leading coefficient `C(⌊c⌋+1, 2) + (⌊c⌋+1)(c − ⌊c⌋)` of the minimum odd pair
/// number when `s ≈ c·n`.
pub fn asymptotic_coefficient(c: &BigRational) -> BigRational {
    let fl = c.floor();
    let fl_int = fl.to_integer();
    int(binom2(&(&fl_int + 1))) + int(&fl_int + 1) * (c - &fl)
}

/// Main term of the oddtown asymptotic formula at `n` for `s = c·n`.
pub fn oddtown_asymptotic_mo(n: u64, c: &BigRational) -> Result<BigRational> {
    if !c.is_positive() {
        return Err(Error::InvalidParameters(format!("c must be positive (c={c})")));
    }
    Ok(asymptotic_coefficient(c) * int(n))
}

/// Main terms `½s²/n + ½s` and `½s²/n` for `s` much larger than `n`.
pub fn large_s_main_terms(n: u64, s: u64) -> (BigRational, BigRational) {
    let quad = BigRational::new(BigInt::from(s) * BigInt::from(s), BigInt::from(2 * n));
    let lin = BigRational::new(BigInt::from(s), BigInt::from(2));
    (&quad + lin, quad)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EventownStrength {
    /// `s·2^(⌊n/2⌋−1)`, attained by the block construction.
    ConjecturedFull,
    /// `s·2^(⌊n/2⌋−2)`, strict, valid for every `n` and `s`.
    ProvenHalf,
}

impl FromStr for EventownStrength {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" | "conjectured_full" => Ok(EventownStrength::ConjecturedFull),
            "half" | "proven_half" => Ok(EventownStrength::ProvenHalf),
            _ => Err(Error::InvalidParameters(format!("unknown strength {s:?}"))),
        }
    }
}

impl EventownStrength {
    pub fn as_str(&self) -> &'static str {
        match self {
            EventownStrength::ConjecturedFull => "full",
            EventownStrength::ProvenHalf => "half",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EventownBound {
    pub value: BigRational,
    /// The bound is `op > value` rather than `op >= value`.
    pub strict: bool,
    /// `s·n <= 2^⌊n/8⌋`, the range where the full bound is known for large `n`.
    pub in_window: bool,
}

pub fn eventown_lower_bound(n: u32, s: u64, strength: EventownStrength) -> EventownBound {
    let half = (n / 2) as i64;
    let (shift, strict) = match strength {
        EventownStrength::ConjecturedFull => (half - 1, false),
        EventownStrength::ProvenHalf => (half - 2, true),
    };
    let window = BigUint::one() << (n / 8);
    EventownBound {
        value: int(s) * pow2(shift),
        strict,
        in_window: BigUint::from(s) * BigUint::from(n) <= window,
    }
}

/// Rational bracket `lo <= 2^e <= hi`; `lo == hi` when `e` is an integer.
pub fn pow2_bracket(e: &BigRational) -> (BigRational, BigRational) {
    if e.is_integer() {
        let v = pow2(e.to_integer().to_i64().expect("exponent fits i64"));
        return (v.clone(), v);
    }
    let p = e.numer();
    let q = e.denom().to_u32().expect("denominator fits u32");
    // a = ⌊2^(p/q + K)⌋ = ⌊(2^(p + K·q))^(1/q)⌋
    let shift = p + BigInt::from(DYADIC_BITS) * BigInt::from(q);
    let shift = shift.to_u64().expect("exponent is positive after scaling");
    let radicand = BigUint::one() << shift;
    let a = radicand.nth_root(q);
    let den = BigInt::one() << DYADIC_BITS;
    let lo = BigRational::new(BigInt::from(a.clone()), den.clone());
    let hi = BigRational::new(BigInt::from(a) + 1, den);
    (lo, hi)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityBounds {
    /// Conservative (never larger than the true value) `½(1 − 2^((ε−½)n))`.
    pub lower: BigRational,
    /// The lower bound is exact rather than a dyadic under-approximation.
    pub lower_exact: bool,
    pub upper: BigRational,
}

/// Bounds on the minimum odd-pair density of even families with at least
/// `2^((1−ε)n)` members.
pub fn eventown_density_bounds(n: u32, epsilon: &BigRational) -> Result<DensityBounds> {
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    if !epsilon.is_positive() || epsilon >= &half {
        return Err(Error::InvalidParameters(format!(
            "epsilon must lie in (0, 1/2) (epsilon={epsilon})"
        )));
    }
    if int(n) * epsilon < BigRational::one() {
        return Err(Error::NotApplicable(format!("n={n} < 1/epsilon")));
    }
    let e = (epsilon - &half) * int(n);
    let (_, hi) = pow2_bracket(&e);
    let lower = &half * (BigRational::one() - hi);
    let upper = if n % 2 == 1 {
        half.clone()
    } else {
        let d = (BigInt::one() << (n - 1)) - 1;
        &half * (BigRational::one() - BigRational::new(BigInt::one(), d))
    };
    Ok(DensityBounds {
        lower,
        lower_exact: e.is_integer(),
        upper,
    })
}

/// `((r−1)/r)·n²/2`, the Turán bound on edges of a `K_(r+1)`-free graph.
pub fn turan_bound(n: u64, r: u64) -> BigRational {
    assert!(r >= 1, "r must be positive");
    BigRational::new(
        BigInt::from(r - 1) * BigInt::from(n) * BigInt::from(n),
        BigInt::from(2 * r),
    )
}

/// `⌈2^(n/4)⌉`.
pub fn ceil_pow2_quarter(n: u32) -> u128 {
    let root = (BigUint::one() << n).nth_root(4);
    let r = root.to_u128().expect("fits u128 for n <= 63");
    if r.pow(4) == 1u128 << n {
        r
    } else {
        r + 1
    }
}

/// `i·s·(⌈2^(n/4)⌉ + 1)`, an upper estimate of `i·s·(2^(n/4) + 1)`.
pub fn y_size_bound(n: u32, s: u64, i: u64) -> u128 {
    i as u128 * s as u128 * (ceil_pow2_quarter(n) + 1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundName {
    OddtownLowerBound,
    OddtownPeelingBound,
    /// Larger of the two oddtown bounds where both apply.
    OddtownBest,
    EventownLowerBound,
    EventownDensity,
    TuranComplement,
    Concentration,
}

impl BoundName {
    pub const ALL: [BoundName; 7] = [
        BoundName::OddtownLowerBound,
        BoundName::OddtownPeelingBound,
        BoundName::OddtownBest,
        BoundName::EventownLowerBound,
        BoundName::EventownDensity,
        BoundName::TuranComplement,
        BoundName::Concentration,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            BoundName::OddtownLowerBound => "oddtown_lower_bound",
            BoundName::OddtownPeelingBound => "oddtown_peeling_bound",
            BoundName::OddtownBest => "oddtown_best",
            BoundName::EventownLowerBound => "eventown_lower_bound",
            BoundName::EventownDensity => "eventown_density",
            BoundName::TuranComplement => "turan_complement",
            BoundName::Concentration => "concentration",
        }
    }
}

impl fmt::Display for BoundName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BoundName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BoundName::ALL
            .into_iter()
            .find(|b| b.as_str() == s)
            .ok_or_else(|| Error::UnknownBound(s.to_string()))
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BoundParams {
    /// Excess over the extremal size; derived from the family size when unset.
    pub s: Option<u64>,
    pub epsilon: Option<BigRational>,
    pub strength: Option<EventownStrength>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Violated,
    NotApplicable,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Violated => "violated",
            Verdict::NotApplicable => "not-applicable",
        }
    }
}

impl FromStr for Verdict {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "holds" => Ok(Verdict::Holds),
            "violated" => Ok(Verdict::Violated),
            "not-applicable" => Ok(Verdict::NotApplicable),
            _ => Err(Error::MalformedReport(format!("unknown verdict {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// observed must be at least (or, if strict, above) the bound
    Lower,
    /// observed must be at most the bound
    Upper,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub bound_name: BoundName,
    pub n: usize,
    pub family_size: usize,
    pub s: Option<u64>,
    pub epsilon: Option<BigRational>,
    pub r: Option<u64>,
    pub strength: Option<EventownStrength>,
    pub bound_value: Option<BigRational>,
    pub observed_value: Option<BigRational>,
    pub direction: Direction,
    pub strict: bool,
    pub verdict: Verdict,
    /// `observed − bound` for lower bounds, `bound − observed` for upper bounds.
    pub slack: Option<BigRational>,
    pub note: Option<String>,
}

impl BoundReport {
    fn new(name: BoundName, family: &SetFamily, direction: Direction) -> Self {
        BoundReport {
            bound_name: name,
            n: family.n(),
            family_size: family.len(),
            s: None,
            epsilon: None,
            r: None,
            strength: None,
            bound_value: None,
            observed_value: None,
            direction,
            strict: false,
            verdict: Verdict::NotApplicable,
            slack: None,
            note: None,
        }
    }

    fn not_applicable(mut self, why: impl Into<String>) -> Self {
        self.verdict = Verdict::NotApplicable;
        self.note = Some(why.into());
        self
    }

    fn settle(mut self, bound: BigRational, observed: BigRational) -> Self {
        let slack = match self.direction {
            Direction::Lower => &observed - &bound,
            Direction::Upper => &bound - &observed,
        };
        let ok = if self.strict {
            slack.is_positive()
        } else {
            !slack.is_negative()
        };
        self.verdict = if ok { Verdict::Holds } else { Verdict::Violated };
        self.bound_value = Some(bound);
        self.observed_value = Some(observed);
        self.slack = Some(slack);
        self
    }
}

/// Excess `s` of `family` over `base`, honouring an explicit override.
fn excess(family: &SetFamily, base: u64, params: &BoundParams) -> Option<u64> {
    let len = family.len() as u64;
    match params.s {
        Some(s) => (len >= base + s).then_some(s),
        None => len.checked_sub(base),
    }
}

/// Evaluates a named bound against `family`. A family outside the bound's
/// hypotheses yields `Verdict::NotApplicable`, never an error.
pub fn check_bound(family: &SetFamily, name: BoundName, params: &BoundParams) -> Result<BoundReport> {
    let n = family.n() as u64;
    let op = || int(crate::family::op_count(family));
    Ok(match name {
        BoundName::OddtownLowerBound | BoundName::OddtownPeelingBound | BoundName::OddtownBest => {
            let rep = BoundReport::new(name, family, Direction::Lower);
            if !family.all_odd() || family.is_empty() {
                return Ok(rep.not_applicable("family is not all-odd"));
            }
            let Some(s) = excess(family, n, params) else {
                return Ok(rep.not_applicable("family has fewer than n + s members"));
            };
            let lemma = (1..=n).contains(&s).then(|| int(oddtown_lower_bound(s)));
            let peel = int(oddtown_peeling_bound(n, s));
            let bound = match name {
                BoundName::OddtownLowerBound => lemma,
                BoundName::OddtownPeelingBound => Some(peel),
                _ => Some(lemma.map_or(peel.clone(), |l| l.max(peel))),
            };
            let mut rep = rep;
            rep.s = Some(s);
            match bound {
                Some(b) => rep.settle(b, op()),
                None => rep.not_applicable("requires 1 <= s <= n"),
            }
        }
        BoundName::EventownLowerBound => {
            let strength = params.strength.unwrap_or(EventownStrength::ConjecturedFull);
            let mut rep = BoundReport::new(name, family, Direction::Lower);
            rep.strength = Some(strength);
            if !family.all_even() {
                return Ok(rep.not_applicable("family is not all-even"));
            }
            let base = 1u64 << (n / 2);
            let s = match excess(family, base, params) {
                Some(s) if s >= 1 => s,
                _ => return Ok(rep.not_applicable("requires s >= 1")),
            };
            rep.s = Some(s);
            let b = eventown_lower_bound(n as u32, s, strength);
            rep.strict = b.strict;
            if strength == EventownStrength::ConjecturedFull {
                let cap = base - (1u64 << (n / 4));
                if s > cap {
                    return Ok(rep.not_applicable(format!("s exceeds 2^(n/2) - 2^(n/4) = {cap}")));
                }
                rep.note = Some(
                    if s <= 2 {
                        "proven for s <= 2"
                    } else if b.in_window {
                        "inside the s*n <= 2^(n/8) window (proven for large n)"
                    } else {
                        "conjectured range"
                    }
                    .to_string(),
                );
            }
            rep.settle(b.value, op())
        }
        BoundName::EventownDensity => {
            let mut rep = BoundReport::new(name, family, Direction::Lower);
            let Some(eps) = params.epsilon.clone() else {
                return Err(Error::InvalidParameters("eventown_density needs epsilon".into()));
            };
            rep.epsilon = Some(eps.clone());
            if !family.all_even() || family.len() < 2 {
                return Ok(rep.not_applicable("needs an all-even family with at least 2 members"));
            }
            let bounds = match eventown_density_bounds(n as u32, &eps) {
                Ok(b) => b,
                Err(Error::NotApplicable(why)) => return Ok(rep.not_applicable(why)),
                Err(e) => return Err(e),
            };
            // |A| >= 2^((1−ε)n)  ⇔  |A|^q >= 2^(p) with (1−ε)n = p/q.
            let threshold = (BigRational::one() - &eps) * int(n);
            let q = threshold.denom().to_u32().expect("denominator fits u32");
            let p = threshold.numer().to_u64().expect("numerator fits u64");
            let big_enough = BigUint::from(family.len()).pow(q) >= BigUint::one() << p;
            if !big_enough {
                return Ok(rep.not_applicable("family smaller than 2^((1-eps)n)"));
            }
            let v = BigInt::from(family.len());
            let density = BigRational::new(
                BigInt::from(crate::family::op_count(family)),
                binom2(&v),
            );
            if !bounds.lower_exact {
                rep.note = Some("lower bound is a dyadic under-approximation".into());
            }
            rep.settle(bounds.lower, density)
        }
        BoundName::TuranComplement => {
            let mut rep = BoundReport::new(name, family, Direction::Upper);
            if family.is_empty() {
                return Ok(rep.not_applicable("empty family"));
            }
            if family.len() > TURAN_CHECK_CAP {
                return Err(Error::OverSolverCap {
                    size: family.len(),
                    cap: TURAN_CHECK_CAP,
                });
            }
            // The complement of H(A) has no clique larger than α(H(A)).
            let r = mis::independence_number(family.bits()).len() as u64;
            rep.r = Some(r);
            let v = BigInt::from(family.len());
            let complement_edges = binom2(&v) - BigInt::from(crate::family::op_count(family));
            rep.settle(turan_bound(family.len() as u64, r), int(complement_edges))
        }
        BoundName::Concentration => {
            let mut rep = BoundReport::new(name, family, Direction::Upper);
            let terms = concentration_inequality(family, ConcentrationMode::General)?;
            rep.note = Some("squared form: (v^2 - 4e - 2v_o)^2 <= 2^n v^2".into());
            rep.settle(int(terms.rhs_squared), int(terms.lhs_squared))
        }
    })
}

/// Returns `a / b` reduced; convenience for building ε values in callers.
pub fn ratio(a: i64, b: i64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

/// Floor of a non-negative rational, as a `u128`.
pub fn floor_u128(x: &BigRational) -> Option<u128> {
    let (q, _) = x.numer().div_rem(x.denom());
    q.to_u128()
}
