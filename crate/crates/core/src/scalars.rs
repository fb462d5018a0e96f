//! Exact scalars: arbitrary-precision rationals and the Gaussian rationals
//! `Q(i)`, which serve as the coefficient field for every other module.
//!
//! Both types have a canonical textual form used by every file format:
//!
//! * rationals: `"3"`, `"-1/2"`;
//! * Gaussian rationals: `"1/2+3/4 i"`, `"-i"`, `"2-5 i"`, `"7/3 i"`.
//!
//! A coefficient of `±1` on the imaginary unit is omitted (`"i"`, `"1-i"`),
//! and zero parts are omitted (`"0"` is the only way to write zero).

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse scalar {input:?}: {reason}")]
    Parse { input: String, reason: String },
    #[error("scalar {0} is not real")]
    NotReal(String),
}

fn parse_err(input: &str, reason: impl Into<String>) -> ScalarError {
    ScalarError::Parse {
        input: input.to_string(),
        reason: reason.into(),
    }
}

/// An exact rational number, always stored in lowest terms with a positive
/// denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

impl Rational {
    /// Builds `numer / denom`, normalizing sign and common factors.
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Result<Self, ScalarError> {
        let denom = denom.into();
        if denom.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Rational(BigRational::new(numer.into(), denom)))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    /// `n / d` for machine integers; panics if `d == 0`. Intended for literals.
    pub fn frac(n: i64, d: i64) -> Self {
        Self::new(n, d).expect("zero denominator in literal")
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    /// The integer value, if this rational is an integer.
    pub fn to_integer(&self) -> Option<BigInt> {
        self.is_integer().then(|| self.0.to_integer())
    }

    /// The integer value as an `i64`, if it is an integer that fits.
    pub fn to_i64(&self) -> Option<i64> {
        self.to_integer().and_then(|n| n.to_i64())
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn recip(&self) -> Result<Self, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Rational(self.0.recip()))
    }

    pub fn checked_div(&self, other: &Rational) -> Result<Self, ScalarError> {
        if other.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Rational(&self.0 / &other.0))
    }

    pub fn pow(&self, exp: i32) -> Result<Self, ScalarError> {
        if exp < 0 && self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Rational(num_traits::Pow::pow(&self.0, exp)))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Exact square root, if this rational is the square of a rational.
    pub fn sqrt_exact(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let n = exact_nth_root(self.numer(), 2)?;
        let d = exact_nth_root(self.denom(), 2)?;
        Some(Rational(BigRational::new(n, d)))
    }
}

fn exact_nth_root(n: &BigInt, k: u32) -> Option<BigInt> {
    if n.is_negative() {
        if k.is_multiple_of(2) {
            return None;
        }
        return exact_nth_root(&-n, k).map(|r| -r);
    }
    let r = n.nth_root(k);
    (num_traits::Pow::pow(&r, k) == *n).then_some(r)
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl From<BigInt> for Rational {
    fn from(n: BigInt) -> Self {
        Rational::from_integer(n)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_unsigned_int(input: &str, digits: &str) -> Result<BigInt, ScalarError> {
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(parse_err(input, format!("expected digits, found {digits:?}")));
    }
    Ok(digits.parse::<BigInt>().expect("validated digits"))
}

impl FromStr for Rational {
    type Err = ScalarError;

    /// Accepts `[+-]digits` or `[+-]digits/digits`. A zero denominator is a
    /// parse error.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let (negative, body) = match t.as_bytes().first() {
            Some(b'-') => (true, &t[1..]),
            Some(b'+') => (false, &t[1..]),
            _ => (false, t),
        };
        let (num, den) = match body.split_once('/') {
            Some((n, d)) => (n.trim(), Some(d.trim())),
            None => (body.trim(), None),
        };
        let mut numer = parse_unsigned_int(s, num)?;
        if negative {
            numer = -numer;
        }
        let denom = match den {
            Some(d) => parse_unsigned_int(s, d)?,
            None => BigInt::one(),
        };
        if denom.is_zero() {
            return Err(parse_err(s, "zero denominator"));
        }
        Ok(Rational(BigRational::new(numer, denom)))
    }
}

macro_rules! forward_rational_op {
    ($tr:ident, $m:ident, $atr:ident, $am:ident) => {
        impl $tr<&Rational> for &Rational {
            type Output = Rational;
            fn $m(self, rhs: &Rational) -> Rational {
                Rational($tr::$m(&self.0, &rhs.0))
            }
        }
        impl $tr for Rational {
            type Output = Rational;
            fn $m(self, rhs: Rational) -> Rational {
                Rational($tr::$m(self.0, rhs.0))
            }
        }
        impl $atr<&Rational> for Rational {
            fn $am(&mut self, rhs: &Rational) {
                $atr::$am(&mut self.0, &rhs.0);
            }
        }
    };
}

forward_rational_op!(Add, add, AddAssign, add_assign);
forward_rational_op!(Sub, sub, SubAssign, sub_assign);
forward_rational_op!(Mul, mul, MulAssign, mul_assign);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

/// A Gaussian rational `re + im·i`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct GaussRational {
    pub re: Rational,
    pub im: Rational,
}

/// The four field operations, for callers that pick one at runtime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Applies `op` to `a` and `b`; division by zero is the only failure.
pub fn field_op(a: &GaussRational, b: &GaussRational, op: FieldOp) -> Result<GaussRational, ScalarError> {
    match op {
        FieldOp::Add => Ok(a + b),
        FieldOp::Sub => Ok(a - b),
        FieldOp::Mul => Ok(a * b),
        FieldOp::Div => a.checked_div(b),
    }
}

/// `i^n` for any integer `n`.
pub fn i_pow(n: i64) -> GaussRational {
    match n.rem_euclid(4) {
        0 => GaussRational::one(),
        1 => GaussRational::i(),
        2 => -GaussRational::one(),
        _ => -GaussRational::i(),
    }
}

/// Complex conjugation.
pub fn conjugate(z: &GaussRational) -> GaussRational {
    z.conj()
}

impl GaussRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        GaussRational { re, im }
    }

    pub fn real(re: Rational) -> Self {
        GaussRational { re, im: Rational::zero() }
    }

    pub fn from_int(n: i64) -> Self {
        Self::real(Rational::from(n))
    }

    /// `n/d` as a real Gaussian rational; panics if `d == 0`.
    pub fn frac(n: i64, d: i64) -> Self {
        Self::real(Rational::frac(n, d))
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::real(Rational::one())
    }

    pub fn i() -> Self {
        GaussRational {
            re: Rational::zero(),
            im: Rational::one(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// The real part, or an error if the imaginary part is nonzero.
    pub fn as_real(&self) -> Result<&Rational, ScalarError> {
        if self.is_real() {
            Ok(&self.re)
        } else {
            Err(ScalarError::NotReal(self.to_string()))
        }
    }

    pub fn conj(&self) -> Self {
        GaussRational {
            re: self.re.clone(),
            im: -&self.im,
        }
    }

    /// `z · conj(z) = re² + im²`.
    pub fn norm(&self) -> Rational {
        &(&self.re * &self.re) + &(&self.im * &self.im)
    }

    pub fn inv(&self) -> Result<Self, ScalarError> {
        let n = self.norm();
        if n.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        let inv_n = n.recip()?;
        Ok(GaussRational {
            re: &self.re * &inv_n,
            im: &(-&self.im) * &inv_n,
        })
    }

    pub fn checked_div(&self, other: &GaussRational) -> Result<Self, ScalarError> {
        Ok(self * &other.inv()?)
    }

    /// Integer power; negative exponents invert (and fail on zero).
    pub fn pow(&self, exp: i64) -> Result<Self, ScalarError> {
        let base = if exp < 0 { self.inv()? } else { self.clone() };
        let mut e = exp.unsigned_abs();
        let mut acc = GaussRational::one();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &sq;
            }
            e >>= 1;
            if e > 0 {
                sq = &sq * &sq;
            }
        }
        Ok(acc)
    }

    pub fn to_complex64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    /// A `k`-th root lying in `Q(i)`, if one exists.
    ///
    /// Square roots are found in closed form. Odd prime roots are found by
    /// clearing denominators and extracting a Gaussian-integer root with a
    /// floating-point seed refined by exact Newton steps; every candidate is
    /// confirmed by exact exponentiation, so a returned value is always a true
    /// root. Composite `k` is handled prime by prime, trying each of the
    /// `Q(i)`-rational branches at every square-root step.
    pub fn nth_root(&self, k: u32) -> Option<Self> {
        assert!(k >= 1, "root index must be positive");
        if self.is_zero() {
            return Some(Self::zero());
        }
        let mut primes = Vec::new();
        let mut m = k;
        let mut p = 2;
        while m > 1 {
            while m.is_multiple_of(p) {
                primes.push(p);
                m /= p;
            }
            p += 1;
        }
        let root = root_by_primes(self, &primes)?;
        (root.pow(k as i64).ok()? == *self).then_some(root)
    }
}

fn root_by_primes(z: &GaussRational, primes: &[u32]) -> Option<GaussRational> {
    let Some((&p, rest)) = primes.split_first() else {
        return Some(z.clone());
    };
    if p == 2 {
        let s = sqrt_gauss(z)?;
        // ±s and ±i·s are the square-root branches that matter downstream.
        let i_s = &GaussRational::i() * &s;
        root_by_primes(&s, rest).or_else(|| root_by_primes(&i_s, rest))
    } else {
        let r = odd_root_gauss(z, p)?;
        root_by_primes(&r, rest)
    }
}

/// Square root in `Q(i)`: `w² = a + bi` with `w = s + (b / 2s) i` where
/// `s² = (|z| + a) / 2`.
fn sqrt_gauss(z: &GaussRational) -> Option<GaussRational> {
    let modulus = z.norm().sqrt_exact()?;
    let half = Rational::frac(1, 2);
    let s2 = &(&modulus + &z.re) * &half;
    let s = s2.sqrt_exact()?;
    let w = if s.is_zero() {
        // z = -|z| is a non-positive real.
        let t = (&(&modulus - &z.re) * &half).sqrt_exact()?;
        GaussRational::new(Rational::zero(), t)
    } else {
        let two_s = &s * &Rational::from(2);
        GaussRational::new(s, z.im.checked_div(&two_s).ok()?)
    };
    (&w * &w == *z).then_some(w)
}

/// Gaussian integers as pairs of big integers.
type GaussInt = (BigInt, BigInt);

fn gi_mul(a: &GaussInt, b: &GaussInt) -> GaussInt {
    (&a.0 * &b.0 - &a.1 * &b.1, &a.0 * &b.1 + &a.1 * &b.0)
}

fn gi_pow(a: &GaussInt, k: u32) -> GaussInt {
    let mut acc = (BigInt::one(), BigInt::zero());
    for _ in 0..k {
        acc = gi_mul(&acc, a);
    }
    acc
}

fn round_div(n: &BigInt, d: &BigInt) -> BigInt {
    // nearest integer to n/d for d > 0
    let two = BigInt::from(2);
    (n * &two + d).div_floor(&(d * &two))
}

fn odd_root_gauss(z: &GaussRational, p: u32) -> Option<GaussRational> {
    // z = (A + Bi) / D with D > 0; any root in Q(i) has the form (X + Yi) / D.
    let d = z.re.denom().lcm(z.im.denom());
    let a = z.re.numer() * (&d / z.re.denom());
    let b = z.im.numer() * (&d / z.im.denom());
    let dp = num_traits::Pow::pow(&d, p - 1);
    let v: GaussInt = (a * &dp, b * &dp);
    let w = gauss_int_root(&v, p)?;
    let dd = Rational::from_integer(d);
    Some(GaussRational::new(
        Rational::from_integer(w.0).checked_div(&dd).ok()?,
        Rational::from_integer(w.1).checked_div(&dd).ok()?,
    ))
}

fn gauss_int_root(v: &GaussInt, p: u32) -> Option<GaussInt> {
    let norm = &v.0 * &v.0 + &v.1 * &v.1;
    let root_norm = exact_nth_root(&norm, p)?;
    let vf = Complex64::new(v.0.to_f64()?, v.1.to_f64()?);
    if !vf.re.is_finite() || !vf.im.is_finite() {
        return None;
    }
    let modulus = root_norm.to_f64()?.sqrt();
    let base_arg = vf.arg() / p as f64;
    for j in 0..p {
        let theta = base_arg + std::f64::consts::TAU * j as f64 / p as f64;
        let mut w: GaussInt = (
            BigInt::from((modulus * theta.cos()).round() as i128),
            BigInt::from((modulus * theta.sin()).round() as i128),
        );
        // Exact Newton refinement w <- ((p-1) w + v / w^(p-1)) / p, rounded.
        for _ in 0..64 {
            if gi_pow(&w, p) == *v {
                return Some(w);
            }
            let wp1 = gi_pow(&w, p - 1);
            let n2 = &wp1.0 * &wp1.0 + &wp1.1 * &wp1.1;
            if n2.is_zero() {
                break;
            }
            // v / w^(p-1) = v · conj(w^(p-1)) / |w^(p-1)|²
            let conj = (wp1.0.clone(), -wp1.1.clone());
            let num = gi_mul(v, &conj);
            let pm1 = BigInt::from(p - 1);
            let pb = BigInt::from(p);
            let re = &pm1 * &w.0 * &n2 + &num.0;
            let im = &pm1 * &w.1 * &n2 + &num.1;
            let den = &pb * &n2;
            let next = (round_div(&re, &den), round_div(&im, &den));
            if next == w {
                break;
            }
            w = next;
        }
        for dx in -1..=1i32 {
            for dy in -1..=1i32 {
                let c = (&w.0 + dx, &w.1 + dy);
                if gi_pow(&c, p) == *v {
                    return Some(c);
                }
            }
        }
    }
    None
}

impl From<Rational> for GaussRational {
    fn from(r: Rational) -> Self {
        GaussRational::real(r)
    }
}

impl From<i64> for GaussRational {
    fn from(n: i64) -> Self {
        GaussRational::from_int(n)
    }
}

impl fmt::Display for GaussRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", self.re);
        }
        let im_abs = self.im.abs();
        let coeff = if im_abs.is_one() { String::new() } else { format!("{im_abs} ") };
        if self.re.is_zero() {
            let sign = if self.im.is_negative() { "-" } else { "" };
            write!(f, "{sign}{coeff}i")
        } else {
            let sign = if self.im.is_negative() { '-' } else { '+' };
            write!(f, "{}{sign}{coeff}i", self.re)
        }
    }
}

impl fmt::Debug for GaussRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for GaussRational {
    type Err = ScalarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t.is_empty() {
            return Err(parse_err(s, "empty scalar"));
        }
        let Some(body) = t.strip_suffix('i') else {
            return Ok(GaussRational::real(t.parse().map_err(|_| reparse(s, t))?));
        };
        // The imaginary part starts at the last sign that is not leading.
        let split = body
            .char_indices()
            .filter(|&(idx, c)| idx > 0 && (c == '+' || c == '-'))
            .map(|(idx, _)| idx)
            .next_back();
        let (re_str, im_str) = match split {
            Some(idx) => (&body[..idx], &body[idx..]),
            None => ("", body),
        };
        let re = if re_str.trim().is_empty() {
            Rational::zero()
        } else {
            re_str.parse().map_err(|_| reparse(s, re_str))?
        };
        let im_trim = im_str.trim();
        let im = match im_trim {
            "" | "+" => Rational::one(),
            "-" => -Rational::one(),
            other => {
                let (sign, rest) = match other.as_bytes()[0] {
                    b'-' => (true, other[1..].trim()),
                    b'+' => (false, other[1..].trim()),
                    _ => (false, other),
                };
                let v: Rational = rest.parse().map_err(|_| reparse(s, other))?;
                if sign {
                    -v
                } else {
                    v
                }
            }
        };
        Ok(GaussRational { re, im })
    }
}

fn reparse(whole: &str, part: &str) -> ScalarError {
    match part.parse::<Rational>() {
        Err(ScalarError::Parse { reason, .. }) => parse_err(whole, reason),
        _ => parse_err(whole, format!("malformed component {part:?}")),
    }
}

impl Serialize for GaussRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for GaussRational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl Add<&GaussRational> for &GaussRational {
    type Output = GaussRational;
    fn add(self, rhs: &GaussRational) -> GaussRational {
        GaussRational {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
        }
    }
}

impl Sub<&GaussRational> for &GaussRational {
    type Output = GaussRational;
    fn sub(self, rhs: &GaussRational) -> GaussRational {
        GaussRational {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
        }
    }
}

impl Mul<&GaussRational> for &GaussRational {
    type Output = GaussRational;
    fn mul(self, rhs: &GaussRational) -> GaussRational {
        GaussRational {
            re: &(&self.re * &rhs.re) - &(&self.im * &rhs.im),
            im: &(&self.re * &rhs.im) + &(&self.im * &rhs.re),
        }
    }
}

impl Add for GaussRational {
    type Output = GaussRational;
    fn add(self, rhs: GaussRational) -> GaussRational {
        &self + &rhs
    }
}

impl Sub for GaussRational {
    type Output = GaussRational;
    fn sub(self, rhs: GaussRational) -> GaussRational {
        &self - &rhs
    }
}

impl Mul for GaussRational {
    type Output = GaussRational;
    fn mul(self, rhs: GaussRational) -> GaussRational {
        &self * &rhs
    }
}

impl AddAssign<&GaussRational> for GaussRational {
    fn add_assign(&mut self, rhs: &GaussRational) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl SubAssign<&GaussRational> for GaussRational {
    fn sub_assign(&mut self, rhs: &GaussRational) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl MulAssign<&GaussRational> for GaussRational {
    fn mul_assign(&mut self, rhs: &GaussRational) {
        *self = &*self * rhs;
    }
}

impl Neg for GaussRational {
    type Output = GaussRational;
    fn neg(self) -> GaussRational {
        GaussRational {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Neg for &GaussRational {
    type Output = GaussRational;
    fn neg(self) -> GaussRational {
        GaussRational {
            re: -&self.re,
            im: -&self.im,
        }
    }
}

impl std::iter::Sum for GaussRational {
    fn sum<I: Iterator<Item = GaussRational>>(iter: I) -> Self {
        iter.fold(GaussRational::zero(), |acc, x| &acc + &x)
    }
}
