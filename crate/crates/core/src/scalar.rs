//! Arithmetic substrate: exact rationals and outward-rounded intervals.
//!
//! Interval endpoints are dyadic rationals (`m / 2^k`) rounded to a fixed
//! number of significant bits, so they behave like arbitrary-precision
//! binary floats with directed rounding.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Rational = BigRational;

/// Default refinement cap for interval zero tests.
pub const DEFAULT_PRECISION_CAP: u32 = 1024;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("interval divisor contains zero")]
    IndeterminateDivision,
    #[error("square root of a negative value")]
    NegativeRadicand,
    #[error("irrational value in exact mode")]
    IrrationalInExactMode,
    #[error("malformed rational literal `{0}`")]
    BadLiteral(String),
}

/// How irrational intermediate values are handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EvalMode {
    /// Every value must stay rational; irrational square roots are errors.
    Exact,
    /// Irrational values become intervals with this many significant bits.
    Interval { bits: u32 },
}

impl EvalMode {
    pub fn bits(self) -> Option<u32> {
        match self {
            EvalMode::Exact => None,
            EvalMode::Interval { bits } => Some(bits),
        }
    }
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `n`, `-n` or `n/d`.
pub fn parse_rational(text: &str) -> Result<Rational, ScalarError> {
    let text = text.trim();
    let bad = || ScalarError::BadLiteral(text.to_string());
    match text.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(text.parse().map_err(|_| bad())?)),
    }
}

/// Canonical `num/den` rendering (denominator always written).
pub fn format_rational(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

fn bit_len(n: &BigInt) -> i64 {
    n.bits() as i64
}

fn pow2(k: u64) -> BigInt {
    BigInt::one() << k
}

/// `q * 2^e` as a rational, exact.
fn scale_pow2(q: &Rational, e: i64) -> Rational {
    if e >= 0 {
        Rational::new(q.numer() << e as u64, q.denom().clone())
    } else {
        Rational::new(q.numer().clone(), q.denom() << (-e) as u64)
    }
}

fn from_scaled(m: BigInt, e: i64) -> Rational {
    if e >= 0 {
        Rational::new(m, pow2(e as u64))
    } else {
        Rational::from_integer(m << (-e) as u64)
    }
}

/// Exponent `e` such that `|q| * 2^e` has roughly `bits` integer bits.
fn exponent_for(q: &Rational, bits: u32) -> i64 {
    bits as i64 - (bit_len(q.numer()) - bit_len(q.denom()))
}

/// Largest dyadic with about `bits` significant bits that is `<= q`.
pub fn round_down(q: &Rational, bits: u32) -> Rational {
    if q.is_zero() {
        return Rational::zero();
    }
    let e = exponent_for(q, bits);
    let m = scale_pow2(q, e).floor().to_integer();
    from_scaled(m, e)
}

/// Smallest dyadic with about `bits` significant bits that is `>= q`.
pub fn round_up(q: &Rational, bits: u32) -> Rational {
    if q.is_zero() {
        return Rational::zero();
    }
    let e = exponent_for(q, bits);
    let m = scale_pow2(q, e).ceil().to_integer();
    from_scaled(m, e)
}

/// Exact rational square root when `q` is the square of a rational.
pub fn exact_sqrt(q: &Rational) -> Option<Rational> {
    exact_root(q, 2)
}

fn exact_root(q: &Rational, n: u32) -> Option<Rational> {
    if q.is_negative() && n % 2 == 0 {
        return None;
    }
    let root = |x: &BigInt| -> Option<BigInt> {
        let r = x.nth_root(n);
        (r.pow(n) == *x).then_some(r)
    };
    Some(Rational::new(root(q.numer())?, root(q.denom())?))
}

/// Floor and ceiling of `q^(1/n)` on a dyadic grid with about `bits` bits.
fn root_bounds(q: &Rational, n: u32, bits: u32) -> (Rational, Rational) {
    debug_assert!(!q.is_negative());
    if q.is_zero() {
        return (Rational::zero(), Rational::zero());
    }
    let mag = (bit_len(q.numer()) - bit_len(q.denom())) / n as i64;
    let e = bits as i64 - mag;
    // floor(root(q) * 2^e) = root_floor(floor(q * 2^(n e)))
    let scaled = scale_pow2(q, e * n as i64);
    let lo_int = scaled.floor().to_integer().nth_root(n);
    let ceil_arg = scaled.ceil().to_integer();
    let mut hi_int = ceil_arg.nth_root(n);
    if hi_int.pow(n) < ceil_arg {
        hi_int += 1;
    }
    (from_scaled(lo_int, e), from_scaled(hi_int, e))
}

/// A closed interval with dyadic endpoints, rounded outward after every op.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    lo: Rational,
    hi: Rational,
    bits: u32,
}

impl Interval {
    /// Encloses `[lo, hi]` at `bits` precision.
    pub fn new(lo: &Rational, hi: &Rational, bits: u32) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        Interval {
            lo: round_down(lo, bits),
            hi: round_up(hi, bits),
            bits,
        }
    }

    pub fn point(q: &Rational, bits: u32) -> Self {
        Self::new(q, q, bits)
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, q: &Rational) -> bool {
        &self.lo <= q && q <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / int(2)
    }

    fn with_bits(lo: Rational, hi: Rational, bits: u32) -> Self {
        Interval {
            lo: round_down(&lo, bits),
            hi: round_up(&hi, bits),
            bits,
        }
    }

    pub fn add(&self, o: &Interval) -> Interval {
        let bits = self.bits.max(o.bits);
        Self::with_bits(&self.lo + &o.lo, &self.hi + &o.hi, bits)
    }

    pub fn sub(&self, o: &Interval) -> Interval {
        let bits = self.bits.max(o.bits);
        Self::with_bits(&self.lo - &o.hi, &self.hi - &o.lo, bits)
    }

    pub fn neg(&self) -> Interval {
        Interval {
            lo: -&self.hi,
            hi: -&self.lo,
            bits: self.bits,
        }
    }

    pub fn mul(&self, o: &Interval) -> Interval {
        let bits = self.bits.max(o.bits);
        let products = [
            &self.lo * &o.lo,
            &self.lo * &o.hi,
            &self.hi * &o.lo,
            &self.hi * &o.hi,
        ];
        let lo = products.iter().min().unwrap().clone();
        let hi = products.iter().max().unwrap().clone();
        Self::with_bits(lo, hi, bits)
    }

    pub fn div(&self, o: &Interval) -> Result<Interval, ScalarError> {
        if o.contains_zero() {
            return Err(ScalarError::IndeterminateDivision);
        }
        let bits = self.bits.max(o.bits);
        let quotients = [
            &self.lo / &o.lo,
            &self.lo / &o.hi,
            &self.hi / &o.lo,
            &self.hi / &o.hi,
        ];
        let lo = quotients.iter().min().unwrap().clone();
        let hi = quotients.iter().max().unwrap().clone();
        Ok(Self::with_bits(lo, hi, bits))
    }

    pub fn sqrt(&self) -> Result<Interval, ScalarError> {
        self.root(2)
    }

    /// Principal `n`-th root; requires a nonnegative interval.
    pub fn root(&self, n: u32) -> Result<Interval, ScalarError> {
        if self.lo.is_negative() {
            return Err(ScalarError::NegativeRadicand);
        }
        let (lo, _) = root_bounds(&self.lo, n, self.bits);
        let (_, hi) = root_bounds(&self.hi, n, self.bits);
        Ok(Interval {
            lo,
            hi,
            bits: self.bits,
        })
    }

    /// Sign if the interval excludes zero.
    pub fn sign(&self) -> Option<Ordering> {
        if self.lo.is_positive() {
            Some(Ordering::Greater)
        } else if self.hi.is_negative() {
            Some(Ordering::Less)
        } else {
            None
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.midpoint().to_f64().unwrap_or(f64::NAN)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{:.6e}, {:.6e}]",
            self.lo.to_f64().unwrap_or(f64::NAN),
            self.hi.to_f64().unwrap_or(f64::NAN)
        )
    }
}

/// Outcome of a zero test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ZeroTest {
    Zero,
    NonZero,
    Undecided,
}

/// Exact rational or enclosing interval.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Scalar {
    Exact(Rational),
    Approx(Interval),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact(Rational::zero())
    }

    pub fn one() -> Self {
        Scalar::Exact(Rational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::Exact(int(n))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Scalar::Exact(q) => Some(q),
            Scalar::Approx(_) => None,
        }
    }

    pub fn bits(&self) -> Option<u32> {
        match self {
            Scalar::Exact(_) => None,
            Scalar::Approx(i) => Some(i.bits),
        }
    }

    /// Converts to an interval at `bits` (exact values become tight enclosures).
    pub fn to_interval(&self, bits: u32) -> Interval {
        match self {
            Scalar::Exact(q) => Interval::point(q, bits),
            Scalar::Approx(i) => i.clone(),
        }
    }

    pub fn is_zero(&self) -> ZeroTest {
        match self {
            Scalar::Exact(q) if q.is_zero() => ZeroTest::Zero,
            Scalar::Exact(_) => ZeroTest::NonZero,
            // a sound enclosure collapsed to {0} proves zero
            Scalar::Approx(i) if i.lo().is_zero() && i.hi().is_zero() => ZeroTest::Zero,
            Scalar::Approx(i) if i.contains_zero() => ZeroTest::Undecided,
            Scalar::Approx(_) => ZeroTest::NonZero,
        }
    }

    pub fn sign(&self) -> Option<Ordering> {
        match self {
            Scalar::Exact(q) => Some(q.cmp(&Rational::zero())),
            Scalar::Approx(i) => i.sign(),
        }
    }

    /// Width of the enclosure, zero for exact values.
    pub fn width(&self) -> Rational {
        match self {
            Scalar::Exact(_) => Rational::zero(),
            Scalar::Approx(i) => i.width(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(q) => q.to_f64().unwrap_or(f64::NAN),
            Scalar::Approx(i) => i.to_f64(),
        }
    }

    fn binary<FE, FI>(&self, o: &Scalar, exact: FE, approx: FI) -> Scalar
    where
        FE: Fn(&Rational, &Rational) -> Rational,
        FI: Fn(&Interval, &Interval) -> Interval,
    {
        match (self, o) {
            (Scalar::Exact(x), Scalar::Exact(y)) => Scalar::Exact(exact(x, y)),
            (Scalar::Approx(x), Scalar::Approx(y)) => Scalar::Approx(approx(x, y)),
            (Scalar::Exact(x), Scalar::Approx(y)) => {
                Scalar::Approx(approx(&Interval::point(x, y.bits), y))
            }
            (Scalar::Approx(x), Scalar::Exact(y)) => {
                Scalar::Approx(approx(x, &Interval::point(y, x.bits)))
            }
        }
    }

    pub fn checked_div(&self, o: &Scalar) -> Result<Scalar, ScalarError> {
        match (self, o) {
            (_, Scalar::Exact(y)) if y.is_zero() => Err(ScalarError::DivisionByZero),
            (Scalar::Exact(x), Scalar::Exact(y)) => Ok(Scalar::Exact(x / y)),
            (Scalar::Approx(x), Scalar::Approx(y)) => x.div(y).map(Scalar::Approx),
            (Scalar::Exact(x), Scalar::Approx(y)) => {
                Interval::point(x, y.bits).div(y).map(Scalar::Approx)
            }
            (Scalar::Approx(x), Scalar::Exact(y)) => {
                x.div(&Interval::point(y, x.bits)).map(Scalar::Approx)
            }
        }
    }

    pub fn recip(&self) -> Result<Scalar, ScalarError> {
        Scalar::one().checked_div(self)
    }

    /// Square root: exact when `self` is a rational square, otherwise an
    /// enclosure at the mode's precision.
    pub fn sqrt(&self, mode: EvalMode) -> Result<Scalar, ScalarError> {
        self.root(2, mode)
    }

    pub fn root(&self, n: u32, mode: EvalMode) -> Result<Scalar, ScalarError> {
        match self {
            Scalar::Exact(q) => {
                if q.is_negative() && n % 2 == 0 {
                    return Err(ScalarError::NegativeRadicand);
                }
                if let Some(r) = exact_root(q, n) {
                    return Ok(Scalar::Exact(r));
                }
                match mode {
                    EvalMode::Exact => Err(ScalarError::IrrationalInExactMode),
                    EvalMode::Interval { bits } => {
                        if q.is_negative() {
                            // odd root of a negative value
                            let pos = Interval::point(&-q, bits).root(n)?;
                            Ok(Scalar::Approx(pos.neg()))
                        } else {
                            Interval::point(q, bits).root(n).map(Scalar::Approx)
                        }
                    }
                }
            }
            Scalar::Approx(i) => {
                if i.hi.is_negative() && n % 2 == 1 {
                    return Ok(Scalar::Approx(i.neg().root(n)?.neg()));
                }
                i.root(n).map(Scalar::Approx)
            }
        }
    }

    pub fn powi(&self, exp: i64) -> Result<Scalar, ScalarError> {
        if exp < 0 {
            return self.recip()?.powi(-exp);
        }
        Ok(match self {
            Scalar::Exact(q) => Scalar::Exact(num_traits::pow::pow(q.clone(), exp as usize)),
            Scalar::Approx(_) => {
                let mut acc = Scalar::one();
                for _ in 0..exp {
                    acc = &acc * self;
                }
                acc
            }
        })
    }

    /// Decisive ordering of two scalars, `None` when intervals overlap.
    pub fn cmp_decided(&self, o: &Scalar) -> Option<Ordering> {
        (self - o).sign()
    }
}

impl From<Rational> for Scalar {
    fn from(q: Rational) -> Self {
        Scalar::Exact(q)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(q) => write!(f, "{q}"),
            Scalar::Approx(i) => write!(f, "{i}"),
        }
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, o: &Scalar) -> Scalar {
        self.binary(o, |x, y| x + y, Interval::add)
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, o: &Scalar) -> Scalar {
        self.binary(o, |x, y| x - y, Interval::sub)
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, o: &Scalar) -> Scalar {
        self.binary(o, |x, y| x * y, Interval::mul)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(q) => Scalar::Exact(-q),
            Scalar::Approx(i) => Scalar::Approx(i.neg()),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, o: Scalar) -> Scalar {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, o: &Scalar) -> Scalar {
                (&self).$m(o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        match self {
            Scalar::Exact(q) => s.serialize_str(&format_rational(q)),
            Scalar::Approx(i) => {
                let mut st = s.serialize_struct("Interval", 3)?;
                st.serialize_field("lo", &format_rational(&i.lo))?;
                st.serialize_field("hi", &format_rational(&i.hi))?;
                st.serialize_field("bits", &i.bits)?;
                st.end()
            }
        }
    }
}

/// Exact comparison of `sqrt(p) + sqrt(q)` against `sqrt(r) + sqrt(s)`.
pub fn compare_radical_sums(p: &Rational, q: &Rational, r: &Rational, s: &Rational) -> Ordering {
    assert!(
        !p.is_negative() && !q.is_negative() && !r.is_negative() && !s.is_negative(),
        "radicands must be nonnegative"
    );
    // Both sides are nonnegative, so compare their squares:
    // (p+q) + 2 sqrt(pq)  vs  (r+s) + 2 sqrt(rs).
    let d = (p + q) - (r + s);
    let pq = p * q;
    let rs = r * s;
    let s0 = d.cmp(&Rational::zero());
    let s1 = pq.cmp(&rs);
    use Ordering::*;
    match (s0, s1) {
        (Equal, x) | (x, Equal) => x,
        (a, b) if a == b => a,
        _ => {
            // Opposite signs: compare |d| with 2|sqrt(pq) - sqrt(rs)|.
            // 4(sqrt(pq)-sqrt(rs))^2 vs d^2  <=>  w vs 8 sqrt(pq rs)
            let w = int(4) * (&pq + &rs) - &d * &d;
            let dominant_radicals = if w.is_negative() {
                Less
            } else {
                (&w * &w).cmp(&(int(64) * &pq * &rs))
            };
            match dominant_radicals {
                Less => s0,
                Greater => s1,
                Equal => Equal,
            }
        }
    }
}

/// Bit length of a rational's magnitude, used to pick interval precisions.
pub fn magnitude_bits(q: &Rational) -> i64 {
    if q.is_zero() {
        return 0;
    }
    bit_len(q.numer()) - bit_len(q.denom())
}

pub fn gcd_is_one(q: &Rational) -> bool {
    q.numer().gcd(q.denom()).is_one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn i(lo: Rational, hi: Rational) -> Scalar {
        Scalar::Approx(Interval::new(&lo, &hi, 64))
    }

    #[test]
    fn rational_sum() {
        let s = Scalar::Exact(rat(1, 3)) + Scalar::Exact(rat(1, 6));
        assert_eq!(s, Scalar::Exact(rat(1, 2)));
    }

    #[test]
    fn annihilator() {
        assert_eq!(Scalar::from_int(2) * Scalar::zero(), Scalar::zero());
    }

    #[test]
    fn sqrt2_enclosure_squared_contains_two() {
        let x = i(rat(141, 100), rat(142, 100));
        let sq = &x * &x;
        match sq {
            Scalar::Approx(iv) => assert!(iv.contains(&int(2))),
            _ => panic!("expected interval"),
        }
    }

    #[test]
    fn sqrt_perfect_square_is_exact() {
        let r = Scalar::Exact(rat(9, 4)).sqrt(EvalMode::Exact).unwrap();
        assert_eq!(r, Scalar::Exact(rat(3, 2)));
        assert_eq!(
            Scalar::zero().sqrt(EvalMode::Exact).unwrap(),
            Scalar::zero()
        );
    }

    #[test]
    fn sqrt_two_is_tight() {
        let r = Scalar::from_int(2)
            .sqrt(EvalMode::Interval { bits: 128 })
            .unwrap();
        let Scalar::Approx(iv) = r else {
            panic!("sqrt 2 is irrational")
        };
        assert!(iv.width() < rat(1, 1) / Rational::from_integer(pow2(100)));
        // Newton iterate from above must stay inside the enclosure squared.
        assert!(&iv.lo * &iv.lo <= int(2));
        assert!(&iv.hi * &iv.hi >= int(2));
        let approx = rat(141421356, 100000000);
        assert!(iv.lo > approx);
    }

    #[test]
    fn sqrt_irrational_in_exact_mode_errors() {
        assert_eq!(
            Scalar::from_int(2).sqrt(EvalMode::Exact),
            Err(ScalarError::IrrationalInExactMode)
        );
        assert_eq!(
            Scalar::from_int(-4).sqrt(EvalMode::Exact),
            Err(ScalarError::NegativeRadicand)
        );
    }

    #[test]
    fn zero_tests() {
        assert_eq!(Scalar::zero().is_zero(), ZeroTest::Zero);
        let tiny = Rational::new(BigInt::one(), BigInt::from(10).pow(50));
        assert_eq!(Scalar::Exact(tiny.clone()).is_zero(), ZeroTest::NonZero);
        let straddle = Scalar::Approx(Interval::new(&-tiny.clone(), &tiny, 256));
        assert_eq!(straddle.is_zero(), ZeroTest::Undecided);
    }

    #[test]
    fn division_errors() {
        assert_eq!(
            Scalar::one().checked_div(&Scalar::zero()),
            Err(ScalarError::DivisionByZero)
        );
        let straddle = i(int(-1), int(1));
        assert_eq!(
            Scalar::one().checked_div(&straddle),
            Err(ScalarError::IndeterminateDivision)
        );
    }

    #[test]
    fn radical_sums_examples() {
        assert_eq!(
            compare_radical_sums(&int(4), &int(9), &int(1), &int(16)),
            Ordering::Equal
        );
        // sqrt2 + sqrt8 = 3 sqrt2 ~ 4.243 < 6
        assert_eq!(
            compare_radical_sums(&int(2), &int(8), &int(9), &int(9)),
            Ordering::Less
        );
        assert_eq!(
            compare_radical_sums(&rat(7, 3), &int(5), &rat(7, 3), &int(5)),
            Ordering::Equal
        );
    }

    #[test]
    fn rounding_is_directed() {
        let third = rat(1, 3);
        assert!(round_down(&third, 20) < third);
        assert!(round_up(&third, 20) > third);
        assert_eq!(round_down(&rat(3, 4), 20), rat(3, 4));
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("3/6").unwrap(), rat(1, 2));
        assert_eq!(parse_rational(" -7 ").unwrap(), int(-7));
        assert!(parse_rational("1/0").is_err());
        assert_eq!(format_rational(&int(3)), "3/1");
    }

    fn small_rational() -> impl Strategy<Value = Rational> {
        (-1000i64..1000, 1i64..200).prop_map(|(n, d)| rat(n, d))
    }

    proptest! {
        #[test]
        fn field_laws(x in small_rational(), y in small_rational()) {
            let xs = Scalar::Exact(x.clone());
            let ys = Scalar::Exact(y.clone());
            prop_assert_eq!((&xs + &ys) - &ys, xs.clone());
            if !y.is_zero() {
                prop_assert_eq!((&xs * &ys).checked_div(&ys).unwrap(), xs.clone());
            }
            if let Scalar::Exact(q) = &xs * &ys {
                prop_assert!(gcd_is_one(&q));
                prop_assert!(q.denom().is_positive());
            }
        }

        #[test]
        fn interval_soundness(
            x in small_rational(), y in small_rational(), z in small_rational()
        ) {
            // (x*y - z)/(1 + y^2) + x^3
            let exact = {
                let (xs, ys, zs) = (Scalar::Exact(x.clone()), Scalar::Exact(y.clone()), Scalar::Exact(z.clone()));
                let num = &xs * &ys - zs;
                let den = Scalar::one() + &ys * &ys;
                num.checked_div(&den).unwrap() + xs.powi(3).unwrap()
            };
            let iv = |q: &Rational| Scalar::Approx(Interval::point(q, 64));
            let approx = {
                let (xs, ys, zs) = (iv(&x), iv(&y), iv(&z));
                let num = &xs * &ys - zs;
                let den = Scalar::one() + &ys * &ys;
                num.checked_div(&den).unwrap() + xs.powi(3).unwrap()
            };
            let (Scalar::Exact(e), Scalar::Approx(a)) = (exact, approx) else { unreachable!() };
            prop_assert!(a.contains(&e));
        }

        #[test]
        fn sqrt_squared(n in 1i64..5000, d in 1i64..300) {
            let q = rat(n, d);
            let s = Scalar::Exact(q.clone()).sqrt(EvalMode::Interval { bits: 96 }).unwrap();
            let sq = &s * &s;
            match (exact_sqrt(&q), sq) {
                (Some(_), Scalar::Exact(v)) => prop_assert_eq!(v, q),
                (None, Scalar::Approx(iv)) => prop_assert!(iv.contains(&q)),
                other => prop_assert!(false, "inconsistent sqrt: {:?}", other),
            }
        }

        #[test]
        fn radical_sums_agree_with_intervals(
            p in 0i64..400, q in 0i64..400, r in 0i64..400, s in 0i64..400, d in 1i64..9
        ) {
            let (p, q, r, s) = (rat(p, d), rat(q, d), rat(r, d), rat(s, d));
            let mode = EvalMode::Interval { bits: 256 };
            let root = |x: &Rational| Scalar::Exact(x.clone()).sqrt(mode).unwrap();
            let diff = (root(&p) + root(&q)) - (root(&r) + root(&s));
            if let Some(ord) = diff.sign() {
                prop_assert_eq!(compare_radical_sums(&p, &q, &r, &s), ord);
            }
        }
    }
}
