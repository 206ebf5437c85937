use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::expr::Expr;
use super::tower::{ceil_div, floor_div, isqrt, isqrt_ceil};
use super::NumSign;

/// Closed interval `[lo, hi] / 2^bits` with integer endpoints. All
/// operations round outward, so the true value is always enclosed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedInterval {
    pub lo: BigInt,
    pub hi: BigInt,
    pub bits: u32,
}

impl FixedInterval {
    pub fn zero(bits: u32) -> Self {
        FixedInterval { lo: BigInt::zero(), hi: BigInt::zero(), bits }
    }

    pub fn one(bits: u32) -> Self {
        let u = BigInt::one() << bits;
        FixedInterval { lo: u.clone(), hi: u, bits }
    }

    pub fn from_rationals(lo: &BigRational, hi: &BigRational, bits: u32) -> Self {
        let scale = BigInt::one() << bits;
        FixedInterval {
            lo: floor_div(&(lo.numer() * &scale), lo.denom()),
            hi: ceil_div(&(hi.numer() * &scale), hi.denom()),
            bits,
        }
    }

    fn scale(&self) -> BigInt {
        BigInt::one() << self.bits
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.bits, other.bits);
        FixedInterval { lo: &self.lo + &other.lo, hi: &self.hi + &other.hi, bits: self.bits }
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.bits, other.bits);
        FixedInterval { lo: &self.lo - &other.hi, hi: &self.hi - &other.lo, bits: self.bits }
    }

    pub fn neg(&self) -> Self {
        FixedInterval { lo: -&self.hi, hi: -&self.lo, bits: self.bits }
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.bits, other.bits);
        let cands = [&self.lo * &other.lo, &self.lo * &other.hi, &self.hi * &other.lo, &self.hi * &other.hi];
        let min = cands.iter().min().expect("nonempty").clone();
        let max = cands.iter().max().expect("nonempty").clone();
        let s = self.scale();
        FixedInterval { lo: floor_div(&min, &s), hi: ceil_div(&max, &s), bits: self.bits }
    }

    pub fn mul_rational(&self, q: &BigRational) -> Self {
        let a = &self.lo * q.numer();
        let b = &self.hi * q.numer();
        let (min, max) = if a <= b { (a, b) } else { (b, a) };
        FixedInterval { lo: floor_div(&min, q.denom()), hi: ceil_div(&max, q.denom()), bits: self.bits }
    }

    /// Square root, clamping any negative part of the enclosure to zero.
    pub fn sqrt(&self) -> Self {
        let lo = if self.lo.is_negative() { BigInt::zero() } else { self.lo.clone() };
        let hi = if self.hi.is_negative() { BigInt::zero() } else { self.hi.clone() };
        FixedInterval { lo: isqrt(&(lo << self.bits)), hi: isqrt_ceil(&(hi << self.bits)), bits: self.bits }
    }

    /// Change the scale, rounding outward when precision drops.
    pub fn rescale(&self, bits: u32) -> Self {
        match bits.cmp(&self.bits) {
            Ordering::Equal => self.clone(),
            Ordering::Greater => {
                let sh = bits - self.bits;
                FixedInterval { lo: &self.lo << sh, hi: &self.hi << sh, bits }
            }
            Ordering::Less => {
                let d = BigInt::one() << (self.bits - bits);
                FixedInterval { lo: floor_div(&self.lo, &d), hi: ceil_div(&self.hi, &d), bits }
            }
        }
    }

    /// Sign if the enclosure excludes zero, or is exactly `{0}`.
    pub fn sign(&self) -> Option<NumSign> {
        if self.lo.is_positive() {
            Some(NumSign::Positive)
        } else if self.hi.is_negative() {
            Some(NumSign::Negative)
        } else {
            None
        }
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn lo_rational(&self) -> BigRational {
        BigRational::new(self.lo.clone(), self.scale())
    }

    pub fn hi_rational(&self) -> BigRational {
        BigRational::new(self.hi.clone(), self.scale())
    }

    pub fn midpoint_f64(&self) -> f64 {
        let mid = BigRational::new(&self.lo + &self.hi, self.scale() * 2);
        mid.to_f64().unwrap_or(f64::NAN)
    }

    /// `log2` of the width, `-inf` for a point.
    pub fn width_log2(&self) -> f64 {
        let w = &self.hi - &self.lo;
        if w.is_zero() {
            return f64::NEG_INFINITY;
        }
        let bits = w.bits() as f64;
        bits - self.bits as f64
    }
}

/// An extended real endpoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExtReal {
    NegInf,
    Finite(BigRational),
    PosInf,
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtReal {
    fn cmp(&self, other: &Self) -> Ordering {
        use ExtReal::*;
        match (self, other) {
            (NegInf, NegInf) | (PosInf, PosInf) => Ordering::Equal,
            (NegInf, _) | (_, PosInf) => Ordering::Less,
            (_, NegInf) | (PosInf, _) => Ordering::Greater,
            (Finite(a), Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::NegInf => write!(f, "-inf"),
            ExtReal::PosInf => write!(f, "+inf"),
            ExtReal::Finite(q) => write!(f, "{q}"),
        }
    }
}

/// A closed interval known to contain some real quantity, together with
/// the expression it encloses (when there is one) so it can be refined.
#[derive(Clone, Debug)]
pub struct CertifiedInterval {
    lo: ExtReal,
    hi: ExtReal,
    precision_bits: u32,
    source: Option<Expr>,
}

impl CertifiedInterval {
    /// # Panics
    ///
    /// Panics if `lo > hi` or `precision_bits == 0`.
    pub fn new(lo: ExtReal, hi: ExtReal, precision_bits: u32) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        assert!(precision_bits > 0, "precision must be positive");
        CertifiedInterval { lo, hi, precision_bits, source: None }
    }

    pub fn point(q: BigRational) -> Self {
        CertifiedInterval {
            lo: ExtReal::Finite(q.clone()),
            hi: ExtReal::Finite(q),
            precision_bits: 1,
            source: None,
        }
    }

    pub fn whole() -> Self {
        CertifiedInterval::new(ExtReal::NegInf, ExtReal::PosInf, 1)
    }

    /// Enclose `expr` at the given precision.
    pub fn enclose(expr: &Expr, bits: u32) -> Self {
        let iv = expr.evaluate(bits);
        CertifiedInterval {
            lo: ExtReal::Finite(iv.lo_rational()),
            hi: ExtReal::Finite(iv.hi_rational()),
            precision_bits: bits,
            source: Some(expr.clone()),
        }
    }

    pub fn lo(&self) -> &ExtReal {
        &self.lo
    }

    pub fn hi(&self) -> &ExtReal {
        &self.hi
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, q: &BigRational) -> bool {
        let x = ExtReal::Finite(q.clone());
        self.lo <= x && x <= self.hi
    }

    pub fn is_subset_of(&self, other: &CertifiedInterval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    /// Width, `None` when unbounded.
    pub fn width(&self) -> Option<BigRational> {
        match (&self.lo, &self.hi) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => Some(b - a),
            _ => None,
        }
    }

    pub fn sign(&self) -> Option<NumSign> {
        let zero = ExtReal::Finite(BigRational::zero());
        if self.lo > zero {
            Some(NumSign::Positive)
        } else if self.hi < zero {
            Some(NumSign::Negative)
        } else if self.is_point() {
            Some(NumSign::Zero)
        } else {
            None
        }
    }
}

/// Re-enclose at a higher precision. The result is always contained in
/// `iv`; exact points and source-less intervals keep their bounds.
///
/// # Panics
///
/// Panics if `bits <= iv.precision_bits()`.
pub fn refine(iv: &CertifiedInterval, bits: u32) -> CertifiedInterval {
    assert!(bits > iv.precision_bits, "refine must increase precision");
    let (lo, hi) = match (&iv.source, iv.is_point()) {
        (Some(expr), false) => {
            let fresh = expr.evaluate(bits);
            let lo = ExtReal::Finite(fresh.lo_rational()).max(iv.lo.clone());
            let hi = ExtReal::Finite(fresh.hi_rational()).min(iv.hi.clone());
            (lo, hi)
        }
        _ => (iv.lo.clone(), iv.hi.clone()),
    };
    CertifiedInterval { lo, hi, precision_bits: bits, source: iv.source.clone() }
}
