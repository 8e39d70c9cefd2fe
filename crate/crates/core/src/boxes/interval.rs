//! Finite unions of subintervals of `[0,1]`.

use std::fmt::Debug;
use std::ops::{Add, Mul, Sub};

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Endpoint arithmetic for interval sets: exact rationals or `f64`.
pub trait Scalar:
    Copy + PartialOrd + Debug + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Send + Sync + 'static
{
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    fn to_f64(self) -> f64;
    /// Whether two intervals separated by `gap` should be merged.
    fn negligible(gap: Self) -> bool;
    fn to_text(self) -> String;
    fn parse_text(text: &str) -> Result<Self>;
    fn to_big_rational(self) -> BigRational;
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn negligible(gap: Self) -> bool {
        gap < 1e-12
    }
    fn to_text(self) -> String {
        format!("{self}")
    }
    fn parse_text(text: &str) -> Result<Self> {
        let r = parse_rational(text)?;
        r.to_f64()
            .ok_or_else(|| Error::Malformed(format!("endpoint '{text}' is not representable")))
    }
    fn to_big_rational(self) -> BigRational {
        BigRational::from_float(self).unwrap_or_else(BigRational::zero)
    }
}

impl Scalar for Rational64 {
    const EXACT: bool = true;

    fn zero() -> Self {
        Rational64::from_integer(0)
    }
    fn one() -> Self {
        Rational64::from_integer(1)
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Rational64::new(num, den)
    }
    fn to_f64(self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }
    fn negligible(gap: Self) -> bool {
        gap <= Rational64::from_integer(0)
    }
    fn to_text(self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }
    fn parse_text(text: &str) -> Result<Self> {
        let r = parse_rational(text)?;
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(p), Some(q)) => Ok(Rational64::new(p, q)),
            _ => Err(Error::Malformed(format!("endpoint '{text}' overflows a 64-bit rational"))),
        }
    }
    fn to_big_rational(self) -> BigRational {
        BigRational::new(BigInt::from(*self.numer()), BigInt::from(*self.denom()))
    }
}

/// Parses `"p/q"`, an integer, or a plain decimal (`"0.25"`, `"1e-3"`)
/// into an exact rational.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let bad = || Error::Malformed(format!("cannot parse '{text}' as a number"));
    let t = text.trim();
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    let (mantissa, exponent) = match t.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut numer: BigInt = if all_digits.is_empty() { BigInt::zero() } else { all_digits.parse().map_err(|_| bad())? };
    if neg {
        numer = -numer;
    }
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    Ok(if scale >= 0 {
        BigRational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(numer, num_traits::pow(ten, (-scale) as usize))
    })
}

/// Sorted, pairwise disjoint, nonempty half-open intervals `[a, b)` inside
/// `[0,1]`. An interval ending at 1 is read as closed at 1, so the unit
/// interval is `[0,1]` itself.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalSet<T: Scalar = f64> {
    intervals: Vec<(T, T)>,
}

impl<T: Scalar> IntervalSet<T> {
    pub fn empty() -> Self {
        Self { intervals: Vec::new() }
    }

    pub fn full() -> Self {
        Self {
            intervals: vec![(T::zero(), T::one())],
        }
    }

    pub fn interval(a: T, b: T) -> Result<Self> {
        Self::from_intervals(vec![(a, b)])
    }

    /// Builds the canonical form: drops empty pieces, sorts, and merges
    /// overlapping or negligibly separated intervals.
    pub fn from_intervals(mut raw: Vec<(T, T)>) -> Result<Self> {
        for &(a, b) in &raw {
            if !(a >= T::zero() && b <= T::one() && a <= b) {
                return Err(Error::Parameter(format!(
                    "interval [{}, {}) is not a subinterval of [0,1]",
                    a.to_text(),
                    b.to_text()
                )));
            }
        }
        raw.retain(|&(a, b)| a < b);
        raw.sort_by(|x, y| x.0.partial_cmp(&y.0).expect("endpoints are ordered"));
        let mut out: Vec<(T, T)> = Vec::with_capacity(raw.len());
        for (a, b) in raw {
            match out.last_mut() {
                Some(last) if T::negligible(a - last.1) || a <= last.1 => {
                    if b > last.1 {
                        last.1 = b;
                    }
                }
                _ => out.push((a, b)),
            }
        }
        Ok(Self { intervals: out })
    }

    pub fn intervals(&self) -> &[(T, T)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn measure(&self) -> T {
        self.intervals.iter().fold(T::zero(), |acc, &(a, b)| acc + (b - a))
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|&(a, b)| {
            let (a, b) = (a.to_f64(), b.to_f64());
            (a <= x && x < b) || (x == 1.0 && b == 1.0)
        })
    }

    pub fn intersect(&self, other: &Self) -> Self {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.intervals.len() && j < other.intervals.len() {
            let (a1, b1) = self.intervals[i];
            let (a2, b2) = other.intervals[j];
            let lo = if a1 > a2 { a1 } else { a2 };
            let hi = if b1 < b2 { b1 } else { b2 };
            if lo < hi {
                out.push((lo, hi));
            }
            if b1 < b2 {
                i += 1;
            } else {
                j += 1;
            }
        }
        Self::from_intervals(out).expect("intersection stays in [0,1]")
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut all = self.intervals.clone();
        all.extend_from_slice(&other.intervals);
        Self::from_intervals(all).expect("union stays in [0,1]")
    }

    pub fn complement(&self) -> Self {
        let mut out = Vec::new();
        let mut cursor = T::zero();
        for &(a, b) in &self.intervals {
            if cursor < a {
                out.push((cursor, a));
            }
            cursor = b;
        }
        if cursor < T::one() {
            out.push((cursor, T::one()));
        }
        Self::from_intervals(out).expect("complement stays in [0,1]")
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.intersect(&other.complement())
    }

    /// Measure of the overlap with `[lo, hi)`.
    pub fn overlap_with(&self, lo: T, hi: T) -> T {
        self.intervals.iter().fold(T::zero(), |acc, &(a, b)| {
            let l = if a > lo { a } else { lo };
            let h = if b < hi { b } else { hi };
            if l < h {
                acc + (h - l)
            } else {
                acc
            }
        })
    }

    pub fn map_scalar<U: Scalar>(&self, f: impl Fn(T) -> U) -> Result<IntervalSet<U>> {
        IntervalSet::from_intervals(self.intervals.iter().map(|&(a, b)| (f(a), f(b))).collect())
    }

    /// Endpoints as `[["a","b"], ...]` strings.
    pub fn to_text(&self) -> Vec<[String; 2]> {
        self.intervals.iter().map(|&(a, b)| [a.to_text(), b.to_text()]).collect()
    }

    pub fn from_text(pieces: &[[String; 2]]) -> Result<Self> {
        let raw = pieces
            .iter()
            .map(|[a, b]| Ok((T::parse_text(a)?, T::parse_text(b)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_intervals(raw)
    }
}

impl IntervalSet<Rational64> {
    pub fn to_f64_set(&self) -> IntervalSet<f64> {
        self.map_scalar(|x| x.to_f64()).expect("same endpoints")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> Rational64 {
        Rational64::new(p, q)
    }

    #[test]
    fn canonical_form_merges_and_sorts() {
        let s = IntervalSet::from_intervals(vec![(r(1, 2), r(3, 4)), (r(0, 1), r(1, 4)), (r(1, 4), r(1, 3))]).unwrap();
        assert_eq!(s.intervals(), &[(r(0, 1), r(1, 3)), (r(1, 2), r(3, 4))]);
        assert_eq!(s.measure(), r(7, 12));
        let f = IntervalSet::from_intervals(vec![(0.0, 0.5), (0.5 + 1e-13, 0.75)]).unwrap();
        assert_eq!(f.intervals().len(), 1);
        assert!(IntervalSet::<f64>::interval(0.5, 1.5).is_err());
    }

    #[test]
    fn set_operations() {
        let a = IntervalSet::from_intervals(vec![(r(0, 1), r(1, 2))]).unwrap();
        let b = IntervalSet::from_intervals(vec![(r(1, 4), r(3, 4))]).unwrap();
        assert_eq!(a.intersect(&b).measure(), r(1, 4));
        assert_eq!(a.union(&b).measure(), r(3, 4));
        assert_eq!(a.difference(&b).measure(), r(1, 4));
        assert_eq!(a.complement().measure(), r(1, 2));
        assert_eq!(a.overlap_with(r(1, 4), r(1, 1)), r(1, 4));
    }

    #[test]
    fn closed_at_one() {
        let s = IntervalSet::<f64>::full();
        assert!(s.contains(1.0));
        assert!(s.contains(0.0));
        let h = IntervalSet::interval(0.0, 0.5).unwrap();
        assert!(!h.contains(0.5));
    }

    #[test]
    fn parsing() {
        assert_eq!(Rational64::parse_text("3/6").unwrap(), r(1, 2));
        assert_eq!(Rational64::parse_text("0.25").unwrap(), r(1, 4));
        assert_eq!(f64::parse_text("1e-3").unwrap(), 0.001);
        assert_eq!(f64::parse_text("2/5").unwrap(), 0.4);
        assert!(f64::parse_text("abc").is_err());
        assert!(f64::parse_text("1/0").is_err());
    }
}
