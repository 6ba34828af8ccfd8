//! Exact scalars: rationals, real quadratic surds `(p + q*sqrt(d))/r`, and
//! high-precision binary floats behind one fallible arithmetic contract.
//!
//! Rational and surd arithmetic is exact. Mixing a surd with a float is an
//! error; callers that want a float answer must downgrade explicitly with
//! [`ExactScalar::to_float_scalar`]. Rationals mix freely with both.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use dashu_float::round::mode::HalfEven;
use dashu_float::{Context, FBig};
use dashu_int::IBig;
use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use regex::Regex;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Binary float used by the `Float` variant.
pub type BigFloat = FBig<HalfEven, 2>;

/// Default working precision for float mode, in bits.
pub const DEFAULT_PRECISION: usize = 256;

/// Trial-division limit used when extracting square factors from radicands.
const TRIAL_LIMIT: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("incompatible surd fields: sqrt({0}) and sqrt({1})")]
    IncompatibleSurdField(BigInt, BigInt),
    #[error("cannot mix a quadratic surd with a float without an explicit downgrade")]
    SurdFloatMix,
    #[error("division by zero")]
    DivisionByZero,
    #[error("negative radicand {0}")]
    NegativeRadicand(BigInt),
    #[error("cannot parse scalar {0:?}")]
    Parse(String),
}

/// `(p + q*sqrt(d)) / r` with `d > 1` squarefree, `q != 0`, `r > 0` and
/// `gcd(p, q, r) = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Surd {
    p: BigInt,
    q: BigInt,
    d: BigInt,
    r: BigInt,
}

impl Surd {
    pub fn p(&self) -> &BigInt {
        &self.p
    }
    pub fn q(&self) -> &BigInt {
        &self.q
    }
    pub fn d(&self) -> &BigInt {
        &self.d
    }
    pub fn r(&self) -> &BigInt {
        &self.r
    }

    /// Sign of `p + q*sqrt(d)`, decided by comparing `p^2` with `q^2 d`.
    fn sign(&self) -> i8 {
        let sp = sign_of(&self.p);
        let sq = sign_of(&self.q);
        if sp >= 0 && sq >= 0 {
            return if sp == 0 && sq == 0 { 0 } else { 1 };
        }
        if sp <= 0 && sq <= 0 {
            return -1;
        }
        let p2 = &self.p * &self.p;
        let q2d = &self.q * &self.q * &self.d;
        match p2.cmp(&q2d) {
            Ordering::Greater => sp,
            Ordering::Less => sq,
            Ordering::Equal => 0,
        }
    }
}

/// A rational, a real quadratic surd, or a high-precision float.
#[derive(Debug, Clone)]
pub enum ExactScalar {
    Rational(BigRational),
    Surd(Surd),
    Float(BigFloat),
}

/// The number field (or float mode) a scalar lives in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Field {
    Rational,
    Quadratic(BigInt),
    Float,
}

fn sign_of(x: &BigInt) -> i8 {
    match x.sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

pub(crate) fn to_ibig(x: &BigInt) -> IBig {
    IBig::from_le_bytes(&x.to_signed_bytes_le())
}

fn exact_float(x: &BigInt, bits: usize) -> BigFloat {
    BigFloat::from(to_ibig(x)).with_precision(bits).value()
}

fn float_of_ratio(num: &BigInt, den: &BigInt, bits: usize) -> BigFloat {
    let wide = bits.max(num.bits() as usize).max(den.bits() as usize) + 2;
    let n = exact_float(num, wide);
    let d = exact_float(den, wide);
    Context::<HalfEven>::new(bits)
        .div(n.repr(), d.repr())
        .expect("denominator is nonzero")
        .value()
}

/// Splits `m > 0` into `(f, d)` with `m = f^2 d` and `d` squarefree.
///
/// Exact for all `m < 10^18`; beyond that a cofactor free of primes below
/// the trial limit is assumed squarefree unless it is a perfect square.
pub fn square_part(m: &BigInt) -> (BigInt, BigInt) {
    let mut rest = m.clone();
    let mut f = BigInt::one();
    let mut p = 2u64;
    while p <= TRIAL_LIMIT {
        let pb = BigInt::from(p);
        if &pb * &pb > rest {
            break;
        }
        let p2 = &pb * &pb;
        while (&rest % &p2).is_zero() {
            rest /= &p2;
            f *= &pb;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let root = rest.sqrt();
    if &root * &root == rest {
        f *= &root;
        rest = BigInt::one();
    }
    (f, rest)
}

impl ExactScalar {
    pub fn zero() -> Self {
        ExactScalar::Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        ExactScalar::Rational(BigRational::one())
    }

    pub fn int(n: i64) -> Self {
        ExactScalar::Rational(BigRational::from_integer(n.into()))
    }

    /// `num/den`; panics on a zero denominator (use for literals only).
    pub fn ratio(num: i64, den: i64) -> Self {
        ExactScalar::Rational(BigRational::new(num.into(), den.into()))
    }

    pub fn rational(x: BigRational) -> Self {
        ExactScalar::Rational(x)
    }

    /// Builds `(p + q*sqrt(d))/r`, normalizing square factors of `d` and
    /// collapsing to a rational when the irrational part vanishes.
    pub fn surd(p: BigInt, q: BigInt, d: BigInt, r: BigInt) -> Result<Self, ScalarError> {
        if r.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        if d.is_negative() {
            return Err(ScalarError::NegativeRadicand(d));
        }
        if d.is_zero() || q.is_zero() {
            return Ok(ExactScalar::Rational(BigRational::new(p, r)));
        }
        let (f, d) = square_part(&d);
        let q = q * f;
        if d.is_one() {
            return Ok(ExactScalar::Rational(BigRational::new(p + q, r)));
        }
        Ok(Self::normalized_surd(p, q, d, r))
    }

    fn normalized_surd(mut p: BigInt, mut q: BigInt, d: BigInt, mut r: BigInt) -> Self {
        if q.is_zero() {
            return ExactScalar::Rational(BigRational::new(p, r));
        }
        if r.is_negative() {
            p = -p;
            q = -q;
            r = -r;
        }
        let g = p.gcd(&q).gcd(&r);
        if !g.is_one() {
            p /= &g;
            q /= &g;
            r /= &g;
        }
        ExactScalar::Surd(Surd { p, q, d, r })
    }

    /// Exact square root of a nonnegative rational, as a rational or a surd.
    pub fn sqrt_rational(x: &BigRational) -> Result<Self, ScalarError> {
        if x.is_negative() {
            return Err(ScalarError::NegativeRadicand(x.numer().clone()));
        }
        // sqrt(a/b) = sqrt(a b) / b
        let prod = x.numer() * x.denom();
        Self::surd(BigInt::zero(), BigInt::one(), prod, x.denom().clone())
    }

    /// A float from an `f64`, held at `bits` of precision (the binary value is
    /// exact).
    pub fn from_f64(x: f64, bits: usize) -> Self {
        let f = BigFloat::try_from(x).expect("finite float");
        let f = if f.repr().significand().is_zero() {
            BigFloat::ZERO.with_precision(bits).value()
        } else {
            f.with_precision(bits.max(53)).value()
        };
        ExactScalar::Float(f)
    }

    pub fn field(&self) -> Field {
        match self {
            ExactScalar::Rational(_) => Field::Rational,
            ExactScalar::Surd(s) => Field::Quadratic(s.d.clone()),
            ExactScalar::Float(_) => Field::Float,
        }
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, ExactScalar::Float(_))
    }

    pub fn is_zero(&self) -> bool {
        self.sign() == 0
    }

    pub fn is_one(&self) -> bool {
        matches!(self, ExactScalar::Rational(r) if r.is_one())
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            ExactScalar::Rational(r) => Some(r),
            _ => None,
        }
    }

    /// Exact sign for rationals and surds; the float's own sign otherwise.
    pub fn sign(&self) -> i8 {
        match self {
            ExactScalar::Rational(r) => sign_of(r.numer()),
            ExactScalar::Surd(s) => s.sign(),
            ExactScalar::Float(f) => match f.repr().sign() {
                _ if f.repr().significand().is_zero() => 0,
                dashu_int::Sign::Positive => 1,
                dashu_int::Sign::Negative => -1,
            },
        }
    }

    /// Sign with a zero band of half-width `tol` applied to floats only.
    pub fn sign_tol(&self, tol: f64) -> i8 {
        match self {
            ExactScalar::Float(_) => {
                let v = self.to_f64();
                if v.abs() <= tol {
                    0
                } else if v > 0.0 {
                    1
                } else {
                    -1
                }
            }
            _ => self.sign(),
        }
    }

    /// The value as a binary float of `bits` precision (bits >= 64).
    pub fn to_float(&self, bits: usize) -> BigFloat {
        let bits = bits.max(64);
        match self {
            ExactScalar::Rational(r) => float_of_ratio(r.numer(), r.denom(), bits),
            ExactScalar::Surd(s) => {
                // Evaluate with guard bits, then round once.
                let guard = bits + 64 + s.p.bits() as usize + s.q.bits() as usize;
                let root = exact_float(&s.d, guard).sqrt();
                let num = exact_float(&s.p, guard) + exact_float(&s.q, guard) * root;
                let den = exact_float(&s.r, guard);
                Context::<HalfEven>::new(bits)
                    .div(num.repr(), den.repr())
                    .expect("r > 0")
                    .value()
            }
            ExactScalar::Float(f) => f.clone().with_precision(bits).value(),
        }
    }

    /// Explicit downgrade to the `Float` variant.
    pub fn to_float_scalar(&self, bits: usize) -> Self {
        ExactScalar::Float(self.to_float(bits))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ExactScalar::Rational(r) => r.to_f64().unwrap_or_else(|| self.to_float(64).to_f64().value()),
            _ => self.to_float(128).to_f64().value(),
        }
    }

    pub fn neg(&self) -> Self {
        match self {
            ExactScalar::Rational(r) => ExactScalar::Rational(-r),
            ExactScalar::Surd(s) => ExactScalar::Surd(Surd {
                p: -&s.p,
                q: -&s.q,
                d: s.d.clone(),
                r: s.r.clone(),
            }),
            ExactScalar::Float(f) => ExactScalar::Float(-f.clone()),
        }
    }

    pub fn abs(&self) -> Self {
        if self.sign() < 0 {
            self.neg()
        } else {
            self.clone()
        }
    }

    fn float_pair(a: &BigFloat, b: &Self) -> Result<BigFloat, ScalarError> {
        match b {
            ExactScalar::Float(f) => Ok(f.clone()),
            ExactScalar::Rational(r) => Ok(float_of_ratio(r.numer(), r.denom(), a.precision().max(64))),
            ExactScalar::Surd(_) => Err(ScalarError::SurdFloatMix),
        }
    }

    /// Lifts both operands to a common representation.
    fn unify(&self, other: &Self) -> Result<Pair, ScalarError> {
        use ExactScalar::*;
        Ok(match (self, other) {
            (Rational(a), Rational(b)) => Pair::Q(a.clone(), b.clone()),
            (Float(a), b) => Pair::F(a.clone(), Self::float_pair(a, b)?),
            (a, Float(b)) => Pair::F(Self::float_pair(b, a)?, b.clone()),
            (Surd(a), Surd(b)) => {
                if a.d != b.d {
                    return Err(ScalarError::IncompatibleSurdField(a.d.clone(), b.d.clone()));
                }
                Pair::S(a.clone(), b.clone())
            }
            (Surd(a), Rational(b)) => Pair::S(a.clone(), lift(b, &a.d)),
            (Rational(a), Surd(b)) => Pair::S(lift(a, &b.d), b.clone()),
        })
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, ScalarError> {
        Ok(match self.unify(other)? {
            Pair::Q(a, b) => ExactScalar::Rational(a + b),
            Pair::F(a, b) => ExactScalar::Float(a + b),
            Pair::S(a, b) => Self::normalized_surd(
                &a.p * &b.r + &b.p * &a.r,
                &a.q * &b.r + &b.q * &a.r,
                a.d,
                &a.r * &b.r,
            ),
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, ScalarError> {
        self.try_add(&other.neg())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, ScalarError> {
        Ok(match self.unify(other)? {
            Pair::Q(a, b) => ExactScalar::Rational(a * b),
            Pair::F(a, b) => ExactScalar::Float(a * b),
            Pair::S(a, b) => Self::normalized_surd(
                &a.p * &b.p + &a.q * &b.q * &a.d,
                &a.p * &b.q + &a.q * &b.p,
                a.d,
                &a.r * &b.r,
            ),
        })
    }

    pub fn recip(&self) -> Result<Self, ScalarError> {
        if self.sign() == 0 {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(match self {
            ExactScalar::Rational(r) => ExactScalar::Rational(r.recip()),
            ExactScalar::Float(f) => {
                let one = BigFloat::ONE.with_precision(f.precision().max(64)).value();
                ExactScalar::Float(one / f.clone())
            }
            ExactScalar::Surd(s) => {
                // r / (p + q sqrt d) = r (p - q sqrt d) / (p^2 - q^2 d)
                let norm = &s.p * &s.p - &s.q * &s.q * &s.d;
                Self::normalized_surd(&s.r * &s.p, -(&s.r * &s.q), s.d.clone(), norm)
            }
        })
    }

    pub fn try_div(&self, other: &Self) -> Result<Self, ScalarError> {
        self.try_mul(&other.recip()?)
    }

    /// Integer power; negative exponents invert.
    pub fn pow_int(&self, e: i64) -> Result<Self, ScalarError> {
        if e < 0 {
            return self.recip()?.pow_int(-e);
        }
        let mut base = self.clone();
        let mut acc = match self {
            ExactScalar::Float(f) => {
                ExactScalar::Float(BigFloat::ONE.with_precision(f.precision().max(64)).value())
            }
            _ => ExactScalar::one(),
        };
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.try_mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.try_mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Multiplies by an integer (never fails).
    pub fn scale_int(&self, k: i64) -> Self {
        self.try_mul(&ExactScalar::int(k)).expect("rational factor mixes with anything")
    }

    /// Multiplies by a rational (never fails).
    pub fn scale(&self, k: &BigRational) -> Self {
        self.try_mul(&ExactScalar::Rational(k.clone()))
            .expect("rational factor mixes with anything")
    }

    /// `p + q*sqrt(d)` parts when this is a surd or rational, with `d = 1` for
    /// rationals.
    pub fn surd_parts(&self) -> Option<(BigRational, BigRational, BigInt)> {
        match self {
            ExactScalar::Rational(r) => Some((r.clone(), BigRational::zero(), BigInt::one())),
            ExactScalar::Surd(s) => Some((
                BigRational::new(s.p.clone(), s.r.clone()),
                BigRational::new(s.q.clone(), s.r.clone()),
                s.d.clone(),
            )),
            ExactScalar::Float(_) => None,
        }
    }

    /// Decimal rendering with `digits` significant digits.
    pub fn to_decimal_string(&self, digits: usize) -> String {
        format_sig(self.to_f64(), digits)
    }
}

fn lift(r: &BigRational, d: &BigInt) -> Surd {
    Surd {
        p: r.numer().clone(),
        q: BigInt::zero(),
        d: d.clone(),
        r: r.denom().clone(),
    }
}

enum Pair {
    Q(BigRational, BigRational),
    S(Surd, Surd),
    F(BigFloat, BigFloat),
}

/// `%g`-style rendering with a fixed number of significant digits.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..digits as i32).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{:.*e}", digits.saturating_sub(1), x)
    }
}

impl PartialEq for ExactScalar {
    fn eq(&self, other: &Self) -> bool {
        use ExactScalar::*;
        match (self, other) {
            (Rational(a), Rational(b)) => a == b,
            (Surd(a), Surd(b)) => a == b,
            (Float(a), Float(b)) => a == b,
            _ => false,
        }
    }
}

impl From<i64> for ExactScalar {
    fn from(n: i64) -> Self {
        ExactScalar::int(n)
    }
}

impl From<BigRational> for ExactScalar {
    fn from(r: BigRational) -> Self {
        ExactScalar::Rational(r)
    }
}

impl From<BigInt> for ExactScalar {
    fn from(n: BigInt) -> Self {
        ExactScalar::Rational(BigRational::from_integer(n))
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactScalar::Rational(r) => {
                if r.is_integer() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            ExactScalar::Surd(s) => {
                let sign = if s.q.is_negative() { '-' } else { '+' };
                write!(f, "({}{}{}*sqrt({}))/{}", s.p, sign, s.q.abs(), s.d, s.r)
            }
            ExactScalar::Float(x) => {
                let bits = x.precision();
                let digits = (bits as f64 * std::f64::consts::LOG10_2).ceil() as usize + 1;
                let dec = x.clone().with_base_and_precision::<10>(digits).value();
                write!(f, "f{bits}:{dec}")
            }
        }
    }
}

fn parse_int(s: &str) -> Result<BigInt, ScalarError> {
    BigInt::from_str(s.trim_start_matches('+')).map_err(|_| ScalarError::Parse(s.to_string()))
}

/// Exact rational value of a decimal literal such as `-1.25e-3`.
fn parse_decimal(s: &str) -> Option<BigRational> {
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i64>().ok()?),
        None => (s, 0),
    };
    let neg = mant.starts_with('-');
    let mant = mant.trim_start_matches(['+', '-']);
    let (ip, fp) = match mant.find('.') {
        Some(i) => (&mant[..i], &mant[i + 1..]),
        None => (mant, ""),
    };
    if ip.is_empty() && fp.is_empty() {
        return None;
    }
    if !ip.chars().chain(fp.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = BigInt::from_str(&format!("{ip}{fp}0")).ok()? / BigInt::from(10);
    let e = exp - fp.len() as i64;
    let ten = BigInt::from(10);
    let mut r = BigRational::from_integer(digits);
    if e >= 0 {
        r *= BigRational::from_integer(num_traits::pow(ten, e as usize));
    } else {
        r /= BigRational::from_integer(num_traits::pow(ten, (-e) as usize));
    }
    Some(if neg { -r } else { r })
}

fn surd_regexes() -> &'static (Regex, Regex) {
    static RE: OnceLock<(Regex, Regex)> = OnceLock::new();
    RE.get_or_init(|| {
        (
            // p (+|-) [q*] sqrt(d), optionally parenthesized and over r
            Regex::new(r"^\(?([+-]?\d+)([+-])(?:(\d+)\*)?sqrt\((\d+)\)\)?(?:/(\d+))?$").expect("valid regex"),
            // [-][q*] sqrt(d), optionally parenthesized and over r
            Regex::new(r"^\(?([+-]?)(?:(\d+)\*)?sqrt\((\d+)\)\)?(?:/(\d+))?$").expect("valid regex"),
        )
    })
}

fn surd_from_parts(
    p: BigInt,
    neg: bool,
    q: Option<&str>,
    d: &str,
    r: Option<&str>,
) -> Result<ExactScalar, ScalarError> {
    let opt = |m: Option<&str>| m.map_or(Ok(BigInt::one()), parse_int);
    let q = opt(q)?;
    let q = if neg { -q } else { q };
    ExactScalar::surd(p, q, parse_int(d)?, opt(r)?)
}

fn text(m: Option<regex::Match<'_>>) -> Option<&str> {
    m.map(|m| m.as_str())
}

fn parse_surd(t: &str) -> Option<Result<ExactScalar, ScalarError>> {
    let (full, coef) = surd_regexes();
    if let Some(c) = full.captures(t) {
        return Some(parse_int(&c[1]).and_then(|p| {
            surd_from_parts(p, &c[2] == "-", text(c.get(3)), &c[4], text(c.get(5)))
        }));
    }
    coef.captures(t).map(|c| {
        surd_from_parts(BigInt::zero(), &c[1] == "-", text(c.get(2)), &c[3], text(c.get(4)))
    })
}

impl FromStr for ExactScalar {
    type Err = ScalarError;

    /// Accepts `p`, `p/q`, `(p+q*sqrt(d))/r` (and sign/coefficient variants),
    /// `f<bits>:<decimal>` and bare decimals (parsed as 256-bit floats).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let err = || ScalarError::Parse(s.to_string());
        if t.is_empty() {
            return Err(err());
        }
        if let Some(rest) = t.strip_prefix('f') {
            let (bits, dec) = rest.split_once(':').ok_or_else(err)?;
            let bits: usize = bits.parse().map_err(|_| err())?;
            let r = parse_decimal(dec).ok_or_else(err)?;
            return Ok(ExactScalar::Float(float_of_ratio(r.numer(), r.denom(), bits.max(64))));
        }
        if t.contains("sqrt") {
            return parse_surd(&t).unwrap_or_else(|| Err(err()));
        }
        if let Some((a, b)) = t.split_once('/') {
            let a = parse_int(a)?;
            let b = parse_int(b)?;
            if b.is_zero() {
                return Err(ScalarError::DivisionByZero);
            }
            return Ok(ExactScalar::Rational(BigRational::new(a, b)));
        }
        if let Ok(n) = parse_int(&t) {
            return Ok(ExactScalar::from(n));
        }
        let r = parse_decimal(&t).ok_or_else(err)?;
        Ok(ExactScalar::Float(float_of_ratio(r.numer(), r.denom(), DEFAULT_PRECISION)))
    }
}

impl Serialize for ExactScalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ExactScalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Int(i64),
            Num(f64),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Raw::Int(n) => Ok(ExactScalar::int(n)),
            Raw::Num(x) => Ok(ExactScalar::from_f64(x, DEFAULT_PRECISION)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(text: &str) -> ExactScalar {
        text.parse().unwrap()
    }

    #[test]
    fn rational_addition() {
        let x = ExactScalar::ratio(1, 2).try_add(&ExactScalar::ratio(1, 3)).unwrap();
        assert_eq!(x, ExactScalar::ratio(5, 6));
    }

    #[test]
    fn conjugate_product_is_rational() {
        let x = s("(3-sqrt(7))/2").try_mul(&s("(3+sqrt(7))/2")).unwrap();
        assert_eq!(x, ExactScalar::ratio(1, 2));
    }

    #[test]
    fn perfect_square_radicand_collapses() {
        let x = ExactScalar::surd(6.into(), 1.into(), 36.into(), 3.into()).unwrap();
        assert_eq!(x, ExactScalar::int(4));
        assert_eq!(s("(6+sqrt(36))/3"), ExactScalar::int(4));
    }

    #[test]
    fn signs() {
        assert_eq!(s("4-sqrt(15)").sign(), 1);
        assert_eq!(s("-4+sqrt(15)").sign(), -1);
        assert_eq!(ExactScalar::int(6).try_sub(&ExactScalar::int(6)).unwrap().try_div(&ExactScalar::int(3)).unwrap().sign(), 0);
        assert_eq!(s("-11/8").sign(), -1);
        assert_eq!(s("(-3-sqrt(2))/5").sign(), -1);
    }

    #[test]
    fn float_conversion() {
        assert_eq!(s("21/512").to_f64(), 0.041015625);
        assert!((s("sqrt(15)").to_f64() - 3.872983346207417).abs() < 1e-15);
        assert!((s("(3-sqrt(7))/2").to_f64() - 0.17712434446770464).abs() < 1e-16);
        let hi = s("sqrt(2)").to_float(256);
        assert_eq!(hi.precision(), 256);
        let text = hi.with_base_and_precision::<10>(40).value().to_string();
        assert!(text.starts_with("1.414213562373095048801688724209698078"), "{text}");
    }

    #[test]
    fn mixed_fields_are_errors() {
        let err = s("sqrt(2)").try_add(&s("sqrt(3)")).unwrap_err();
        assert!(matches!(err, ScalarError::IncompatibleSurdField(_, _)));
        let f = ExactScalar::from_f64(0.5, 128);
        assert_eq!(s("sqrt(2)").try_mul(&f).unwrap_err(), ScalarError::SurdFloatMix);
        assert_eq!(ExactScalar::zero().recip().unwrap_err(), ScalarError::DivisionByZero);
        // a rational mixes with a float
        assert_eq!(f.try_add(&ExactScalar::ratio(1, 4)).unwrap().to_f64(), 0.75);
    }

    #[test]
    fn square_root_of_rationals() {
        assert_eq!(ExactScalar::sqrt_rational(&BigRational::new(9.into(), 4.into())).unwrap(), ExactScalar::ratio(3, 2));
        let r = ExactScalar::sqrt_rational(&BigRational::new(2.into(), 3.into())).unwrap();
        assert_eq!(r.to_string(), "(0+1*sqrt(6))/3");
        assert_eq!(r.pow_int(2).unwrap(), ExactScalar::ratio(2, 3));
        assert!(ExactScalar::surd(1.into(), 1.into(), (-2).into(), 1.into()).is_err());
    }

    #[test]
    fn text_round_trip() {
        for t in ["5/6", "-7", "(3-1*sqrt(7))/2", "(0+2*sqrt(15))/1"] {
            assert_eq!(s(t).to_string(), t);
        }
        assert_eq!(s("-sqrt(5)"), s("(0-1*sqrt(5))/1"));
        assert_eq!(s("3*sqrt(5)/2"), s("(0+3*sqrt(5))/2"));
        assert_eq!(s("4-sqrt(15)"), s("(4-1*sqrt(15))/1"));
        let f = s("0.396751");
        assert!(!f.is_exact());
        let back = s(&f.to_string());
        assert_eq!(back, f);
        assert!("1/0".parse::<ExactScalar>().is_err());
        assert!("abc".parse::<ExactScalar>().is_err());
    }

    #[test]
    fn powers() {
        assert_eq!(ExactScalar::ratio(2, 3).pow_int(-3).unwrap(), ExactScalar::ratio(27, 8));
        let x = s("1+sqrt(2)");
        assert_eq!(x.pow_int(2).unwrap(), s("3+2*sqrt(2)"));
        assert_eq!(x.pow_int(0).unwrap(), ExactScalar::one());
    }

    fn small_surd() -> impl Strategy<Value = ExactScalar> {
        (-20i64..20, -20i64..20, 1i64..9).prop_map(|(p, q, r)| {
            ExactScalar::surd(p.into(), q.into(), 7.into(), r.into()).unwrap()
        })
    }

    fn small_rational() -> impl Strategy<Value = ExactScalar> {
        (-50i64..50, 1i64..30).prop_map(|(a, b)| ExactScalar::ratio(a, b))
    }

    proptest! {
        #[test]
        fn field_axioms_on_rationals(a in small_rational(), b in small_rational(), c in small_rational()) {
            let lhs = a.try_mul(&b.try_add(&c).unwrap()).unwrap();
            let rhs = a.try_mul(&b).unwrap().try_add(&a.try_mul(&c).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
            if !b.is_zero() {
                prop_assert_eq!(a.try_div(&b).unwrap().try_mul(&b).unwrap(), a.clone());
            }
        }

        #[test]
        fn ring_identities_on_surds(a in small_surd(), b in small_surd(), c in small_surd()) {
            // (a+b)^2 - a^2 - 2ab - b^2 = 0 and distributivity
            let sq = a.try_add(&b).unwrap().pow_int(2).unwrap();
            let expand = a.pow_int(2).unwrap()
                .try_add(&a.try_mul(&b).unwrap().scale_int(2)).unwrap()
                .try_add(&b.pow_int(2).unwrap()).unwrap();
            prop_assert!(sq.try_sub(&expand).unwrap().is_zero());
            let lhs = a.try_mul(&b.try_sub(&c).unwrap()).unwrap();
            let rhs = a.try_mul(&b).unwrap().try_sub(&a.try_mul(&c).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
            if !a.is_zero() {
                prop_assert_eq!(a.recip().unwrap().try_mul(&a).unwrap(), ExactScalar::one());
            }
        }

        #[test]
        fn exact_sign_matches_high_precision_float(x in small_surd()) {
            let f = x.to_float(256);
            let fsign = ExactScalar::Float(f).sign();
            prop_assert_eq!(x.sign(), fsign);
        }
    }
}
