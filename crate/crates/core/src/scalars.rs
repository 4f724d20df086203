//! Coefficient fields: exact Gaussian rationals and a tolerance-based
//! floating complex backend, both behind the [`Scalar`] trait.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::cell::Cell;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary precision rational, always stored reduced with a positive denominator.
pub type Rational = num_rational::BigRational;

/// Parses `"p/q"`, `"p"`, with an optional sign.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let malformed = || Error::MalformedNumber(text.to_string());
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num = parse_int(num).ok_or_else(malformed)?;
    if den.starts_with(['+', '-']) {
        return Err(malformed());
    }
    let den = parse_int(den).ok_or_else(malformed)?;
    if den.is_zero() {
        return Err(Error::ZeroDenominator);
    }
    Ok(Rational::new(num, den))
}

fn parse_int(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    BigInt::from_str(s.strip_prefix('+').unwrap_or(s)).ok()
}

/// Exact non-negative square root of a rational, when it is rational.
pub fn sqrt_exact(x: &Rational) -> Result<Rational> {
    if x.is_negative() {
        return Err(Error::NegativeInput);
    }
    let root = |n: &BigInt| {
        let r = n.sqrt();
        (&r * &r == *n).then_some(r)
    };
    match (root(x.numer()), root(x.denom())) {
        (Some(n), Some(d)) => Ok(Rational::new(n, d)),
        _ => Err(Error::NotAPerfectSquare),
    }
}

/// Float approximation of a rational.
pub fn rational_to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // ratio of huge integers: scale down both sides
        let n = q.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = q.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

pub(crate) fn fmt_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Common contract of the coefficient fields.
///
/// Every algebraic structure in the crate is generic over this trait so that
/// the same code runs exactly (on [`GaussRational`]) or approximately (on
/// [`FloatComplex`]).
pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    /// `true` for exact arithmetic.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    /// The imaginary unit.
    fn i() -> Self;
    fn from_rational(q: &Rational) -> Self;
    fn from_f64(x: f64) -> Self;
    fn from_i64(n: i64) -> Self {
        Self::from_rational(&Rational::from_integer(n.into()))
    }
    fn conj(&self) -> Self;
    fn inv(&self) -> Option<Self>;
    /// Structural zero test, used to prune stored coefficients.
    fn is_zero(&self) -> bool;
    /// Modulus as a float, used for residual reporting.
    fn magnitude(&self) -> f64;
    fn to_f64_pair(&self) -> (f64, f64);

    fn add_assign_ref(&mut self, other: &Self) {
        *self = self.add_ref(other);
    }
    fn add_ref(&self, other: &Self) -> Self {
        self.clone() + other.clone()
    }
    fn sub_ref(&self, other: &Self) -> Self {
        self.clone() - other.clone()
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self.clone() * other.clone()
    }
    fn is_one(&self) -> bool {
        (self.clone() - Self::one()).is_zero()
    }
    /// Multiplication by the imaginary unit.
    fn times_i(&self) -> Self {
        self.mul_ref(&Self::i())
    }
    fn half() -> Self {
        Self::from_rational(&Rational::new(1.into(), 2.into()))
    }
    /// Parses `"(re,im)"` or a bare real number.
    fn parse_scalar(text: &str) -> Result<Self>;
    /// Non-negative square root of a non-negative real value.
    fn sqrt_real(&self) -> Result<Self>;
}

/// Exact complex number `re + i im` with rational parts.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct GaussRational {
    pub re: Rational,
    pub im: Rational,
}

impl GaussRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        Self { re, im }
    }

    pub fn real(re: Rational) -> Self {
        Self { re, im: Rational::zero() }
    }

    /// Small-integer convenience constructor `(a/b) + i (c/d)`.
    pub fn from_fracs(a: i64, b: i64, c: i64, d: i64) -> Self {
        Self {
            re: Rational::new(a.into(), b.into()),
            im: Rational::new(c.into(), d.into()),
        }
    }

    /// `|z|^2 = re^2 + im^2`.
    pub fn norm_sqr(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Parses `"(p/q, r/s)"`; a bare rational is accepted as a real number.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        match t.strip_prefix('(').and_then(|s| s.strip_suffix(')')) {
            Some(inner) => {
                let (re, im) = inner
                    .split_once(',')
                    .ok_or_else(|| Error::MalformedNumber(text.to_string()))?;
                Ok(Self::new(parse_rational(re)?, parse_rational(im)?))
            }
            None => Ok(Self::real(parse_rational(t)?)),
        }
    }
}

impl fmt::Debug for GaussRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for GaussRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", fmt_rational(&self.re), fmt_rational(&self.im))
    }
}

impl Add for GaussRational {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.re + o.re, self.im + o.im)
    }
}

impl Sub for GaussRational {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.re - o.re, self.im - o.im)
    }
}

impl Mul for GaussRational {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        self.mul_ref(&o)
    }
}

impl Neg for GaussRational {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.re, -self.im)
    }
}

impl Scalar for GaussRational {
    const EXACT: bool = true;

    fn zero() -> Self {
        Self::default()
    }
    fn one() -> Self {
        Self::real(Rational::one())
    }
    fn i() -> Self {
        Self::new(Rational::zero(), Rational::one())
    }
    fn from_rational(q: &Rational) -> Self {
        Self::real(q.clone())
    }
    fn from_f64(x: f64) -> Self {
        Self::real(Rational::from_float(x).expect("finite float"))
    }
    fn conj(&self) -> Self {
        Self::new(self.re.clone(), -&self.im)
    }
    fn inv(&self) -> Option<Self> {
        let n = self.norm_sqr();
        if n.is_zero() {
            return None;
        }
        Some(Self::new(&self.re / &n, -&self.im / &n))
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }
    fn magnitude(&self) -> f64 {
        rational_to_f64(&self.norm_sqr()).sqrt()
    }
    fn to_f64_pair(&self) -> (f64, f64) {
        (rational_to_f64(&self.re), rational_to_f64(&self.im))
    }
    fn add_ref(&self, o: &Self) -> Self {
        Self::new(&self.re + &o.re, &self.im + &o.im)
    }
    fn add_assign_ref(&mut self, o: &Self) {
        if !o.re.is_zero() {
            self.re += &o.re;
        }
        if !o.im.is_zero() {
            self.im += &o.im;
        }
    }
    fn sub_ref(&self, o: &Self) -> Self {
        Self::new(&self.re - &o.re, &self.im - &o.im)
    }
    fn mul_ref(&self, o: &Self) -> Self {
        if self.im.is_zero() && o.im.is_zero() {
            return Self::real(&self.re * &o.re);
        }
        if self.re.is_zero() && o.re.is_zero() {
            return Self::real(-(&self.im * &o.im));
        }
        Self::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }
    fn times_i(&self) -> Self {
        Self::new(-&self.im, self.re.clone())
    }
    fn parse_scalar(text: &str) -> Result<Self> {
        Self::parse(text)
    }
    fn sqrt_real(&self) -> Result<Self> {
        if !self.im.is_zero() {
            return Err(Error::NegativeInput);
        }
        Ok(Self::real(sqrt_exact(&self.re)?))
    }
}

/// Default for `FloatComplex::tolerance`.
pub const DEFAULT_FLOAT_TOL: f64 = 1e-9;

thread_local! {
    static FLOAT_TOL: Cell<f64> = const { Cell::new(DEFAULT_FLOAT_TOL) };
}

/// Coefficients with modulus at or below this are dropped from sparse storage.
pub const FLOAT_PRUNE: f64 = 1e-12;

/// Floating complex number. `==` compares within the configured tolerance.
#[derive(Clone, Copy, Default)]
pub struct FloatComplex {
    pub re: f64,
    pub im: f64,
}

impl FloatComplex {
    pub const fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    /// Tolerance used by `==` on the current thread (default `1e-9`).
    pub fn tolerance() -> f64 {
        FLOAT_TOL.with(Cell::get)
    }

    /// Sets the tolerance for the current thread only.
    pub fn set_tolerance(tol: f64) {
        FLOAT_TOL.with(|t| t.set(tol));
    }

    /// Runs `f` with a temporary tolerance on this thread.
    pub fn with_tolerance<T>(tol: f64, f: impl FnOnce() -> T) -> T {
        struct Restore(f64);
        impl Drop for Restore {
            fn drop(&mut self) {
                FloatComplex::set_tolerance(self.0);
            }
        }
        let _restore = Restore(Self::tolerance());
        Self::set_tolerance(tol);
        f()
    }

    pub fn abs(&self) -> f64 {
        self.re.hypot(self.im)
    }
}

impl fmt::Debug for FloatComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for FloatComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:e},{:e})", self.re, self.im)
    }
}

impl PartialEq for FloatComplex {
    fn eq(&self, o: &Self) -> bool {
        (*self - *o).abs() <= Self::tolerance()
    }
}

impl Add for FloatComplex {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.re + o.re, self.im + o.im)
    }
}

impl Sub for FloatComplex {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.re - o.re, self.im - o.im)
    }
}

impl Mul for FloatComplex {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)
    }
}

impl Neg for FloatComplex {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.re, -self.im)
    }
}

impl Scalar for FloatComplex {
    const EXACT: bool = false;

    fn zero() -> Self {
        Self::new(0.0, 0.0)
    }
    fn one() -> Self {
        Self::new(1.0, 0.0)
    }
    fn i() -> Self {
        Self::new(0.0, 1.0)
    }
    fn from_rational(q: &Rational) -> Self {
        Self::new(rational_to_f64(q), 0.0)
    }
    fn from_f64(x: f64) -> Self {
        Self::new(x, 0.0)
    }
    fn conj(&self) -> Self {
        Self::new(self.re, -self.im)
    }
    fn inv(&self) -> Option<Self> {
        let n = self.re * self.re + self.im * self.im;
        (n > 0.0).then(|| Self::new(self.re / n, -self.im / n))
    }
    fn is_zero(&self) -> bool {
        self.abs() <= FLOAT_PRUNE
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn to_f64_pair(&self) -> (f64, f64) {
        (self.re, self.im)
    }
    fn times_i(&self) -> Self {
        Self::new(-self.im, self.re)
    }
    fn parse_scalar(text: &str) -> Result<Self> {
        let part = |p: &str| -> Result<f64> {
            let p = p.trim();
            p.parse::<f64>().or_else(|_| parse_rational(p).map(|q| rational_to_f64(&q)))
        };
        let t = text.trim();
        match t.strip_prefix('(').and_then(|s| s.strip_suffix(')')) {
            Some(inner) => {
                let (re, im) =
                    inner.split_once(',').ok_or_else(|| Error::MalformedNumber(text.to_string()))?;
                Ok(Self::new(part(re)?, part(im)?))
            }
            None => Ok(Self::new(part(t)?, 0.0)),
        }
    }
    fn sqrt_real(&self) -> Result<Self> {
        if self.re < -FLOAT_PRUNE || self.im.abs() > FLOAT_PRUNE {
            return Err(Error::NegativeInput);
        }
        Ok(Self::new(self.re.max(0.0).sqrt(), 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn parse_examples() {
        assert_eq!(parse_rational("3/5").unwrap(), q(3, 5));
        assert_eq!(parse_rational("-6/4").unwrap(), q(-3, 2));
        assert_eq!(parse_rational("+7").unwrap(), q(7, 1));
        assert!(matches!(parse_rational("1/0"), Err(Error::ZeroDenominator)));
        assert!(matches!(parse_rational("1/-2"), Err(Error::MalformedNumber(_))));
        assert!(matches!(parse_rational("abc"), Err(Error::MalformedNumber(_))));
        assert!(matches!(parse_rational(""), Err(Error::MalformedNumber(_))));
        assert!(matches!(parse_rational("1.5"), Err(Error::MalformedNumber(_))));
    }

    #[test]
    fn sqrt_examples() {
        assert_eq!(sqrt_exact(&q(16, 25)).unwrap(), q(4, 5));
        assert_eq!(sqrt_exact(&q(0, 1)).unwrap(), q(0, 1));
        assert!(matches!(sqrt_exact(&q(1, 2)), Err(Error::NotAPerfectSquare)));
        assert!(matches!(sqrt_exact(&q(-1, 4)), Err(Error::NegativeInput)));
    }

    #[test]
    fn gauss_parse_and_display() {
        let z = GaussRational::parse("(3/5, -4/5)").unwrap();
        assert_eq!(z, GaussRational::from_fracs(3, 5, -4, 5));
        assert_eq!(z.to_string(), "(3/5,-4/5)");
        assert_eq!(GaussRational::parse(z.to_string().as_str()).unwrap(), z);
        assert_eq!(GaussRational::parse("2").unwrap(), GaussRational::from_fracs(2, 1, 0, 1));
    }

    #[test]
    fn float_equality_uses_tolerance() {
        let a = FloatComplex::new(1.0, 0.0);
        assert_eq!(a, FloatComplex::new(1.0 + 1e-11, 0.0));
        assert_ne!(a, FloatComplex::new(1.0 + 1e-6, 0.0));
    }

    #[test]
    fn times_i_matches_multiplication() {
        let z = GaussRational::from_fracs(1, 2, 3, 7);
        assert_eq!(z.times_i(), z.mul_ref(&GaussRational::i()));
    }
}
