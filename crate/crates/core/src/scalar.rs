//! Real scalar abstraction.
//!
//! Every numeric module is generic over [`Real`]. Two families implement it:
//! the native `f64`, used for coarse work, and [`Mp`], an MPFR float whose
//! binary precision is fixed by a const parameter so that `Zero`/`One` and the
//! rest of the `num-traits` vocabulary work without a runtime precision
//! argument.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, RemAssign, Sub, SubAssign};

use num_complex::Complex;
use num_traits::{Num, NumAssign, One, Zero};
use rug::float::{Constant, Round};
use rug::ops::Pow;
use rug::{Float, Integer};

use crate::error::SicError;

/// Real field operations needed by the Weyl-Heisenberg and recognition code.
pub trait Real:
    Num + NumAssign + Neg<Output = Self> + Clone + PartialOrd + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    /// Binary precision (mantissa bits) of the type.
    const PREC_BITS: u32;

    fn from_f64(x: f64) -> Self;
    fn from_i64(n: i64) -> Self;
    fn from_float(x: &Float) -> Self;
    /// Converts to an MPFR float at `prec` bits.
    fn to_float(&self, prec: u32) -> Float;
    fn to_f64(&self) -> f64;
    fn pi() -> Self;
    fn sqrt(&self) -> Self;
    fn sin_cos(&self) -> (Self, Self);
    fn atan2(&self, x: &Self) -> Self;
    fn abs(&self) -> Self;
    /// `log2 |x|`, finite for values far below `f64::MIN_POSITIVE`.
    fn log2_abs(&self) -> f64;
    /// Decimal representation carrying the full precision of the value.
    fn to_decimal(&self) -> String;
    fn parse_decimal(s: &str) -> Option<Self>;

    /// Unit roundoff `2^-BITS`.
    fn epsilon() -> Self {
        Self::from_float(&Float::with_val(64, Float::i_exp(1, -(Self::PREC_BITS as i32))))
    }

    /// `2^k` for a (possibly fractional) exponent `k`.
    fn pow2(k: f64) -> Self {
        let f = Float::with_val(Self::PREC_BITS.max(64), k);
        let two = Float::with_val(Self::PREC_BITS.max(64), 2);
        Self::from_float(&two.pow(&f))
    }

    fn max_of(a: Self, b: Self) -> Self {
        if a >= b {
            a
        } else {
            b
        }
    }

    fn min_of(a: Self, b: Self) -> Self {
        if a <= b {
            a
        } else {
            b
        }
    }
}

impl Real for f64 {
    const PREC_BITS: u32 = 53;

    fn from_f64(x: f64) -> Self {
        x
    }
    fn from_i64(n: i64) -> Self {
        n as f64
    }
    fn from_float(x: &Float) -> Self {
        x.to_f64()
    }
    fn to_float(&self, prec: u32) -> Float {
        Float::with_val(prec, *self)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn pi() -> Self {
        std::f64::consts::PI
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn sin_cos(&self) -> (Self, Self) {
        f64::sin_cos(*self)
    }
    fn atan2(&self, x: &Self) -> Self {
        f64::atan2(*self, *x)
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn log2_abs(&self) -> f64 {
        f64::abs(*self).log2()
    }
    fn to_decimal(&self) -> String {
        format!("{:e}", self)
    }
    fn parse_decimal(s: &str) -> Option<Self> {
        s.trim().parse().ok()
    }
    fn epsilon() -> Self {
        f64::EPSILON / 2.0
    }
    fn pow2(k: f64) -> Self {
        2f64.powf(k)
    }
}

/// MPFR float with `BITS` bits of mantissa.
#[derive(Clone, PartialEq, PartialOrd)]
pub struct Mp<const BITS: u32>(pub Float);

impl<const BITS: u32> Mp<BITS> {
    pub fn new(x: Float) -> Self {
        Mp(Float::with_val(BITS, x))
    }

    pub fn as_float(&self) -> &Float {
        &self.0
    }
}

impl<const BITS: u32> fmt::Debug for Mp<BITS> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mp<{}>({})", BITS, self.to_decimal())
    }
}

impl<const BITS: u32> fmt::Display for Mp<BITS> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(p) => write!(f, "{}", self.0.to_string_radix(10, Some(p.max(1)))),
            None => write!(f, "{}", self.0.to_string_radix(10, Some(20))),
        }
    }
}

macro_rules! mp_binop {
    ($tr:ident, $m:ident, $atr:ident, $am:ident) => {
        impl<const BITS: u32> $tr for Mp<BITS> {
            type Output = Mp<BITS>;
            #[inline]
            fn $m(self, rhs: Self) -> Self {
                Mp(self.0.$m(rhs.0))
            }
        }
        impl<'a, const BITS: u32> $tr<&'a Mp<BITS>> for Mp<BITS> {
            type Output = Mp<BITS>;
            #[inline]
            fn $m(self, rhs: &'a Mp<BITS>) -> Self {
                Mp(self.0.$m(&rhs.0))
            }
        }
        impl<const BITS: u32> $atr for Mp<BITS> {
            #[inline]
            fn $am(&mut self, rhs: Self) {
                self.0.$am(rhs.0);
            }
        }
        impl<'a, const BITS: u32> $atr<&'a Mp<BITS>> for Mp<BITS> {
            #[inline]
            fn $am(&mut self, rhs: &'a Mp<BITS>) {
                self.0.$am(&rhs.0);
            }
        }
    };
}

mp_binop!(Add, add, AddAssign, add_assign);
mp_binop!(Sub, sub, SubAssign, sub_assign);
mp_binop!(Mul, mul, MulAssign, mul_assign);
mp_binop!(Div, div, DivAssign, div_assign);
mp_binop!(Rem, rem, RemAssign, rem_assign);

impl<const BITS: u32> Neg for Mp<BITS> {
    type Output = Mp<BITS>;
    fn neg(self) -> Self {
        Mp(-self.0)
    }
}

impl<const BITS: u32> Zero for Mp<BITS> {
    fn zero() -> Self {
        Mp(Float::new(BITS))
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl<const BITS: u32> One for Mp<BITS> {
    fn one() -> Self {
        Mp(Float::with_val(BITS, 1))
    }
}

impl<const BITS: u32> Num for Mp<BITS> {
    type FromStrRadixErr = SicError;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, SicError> {
        let parsed = Float::parse_radix(s.trim(), radix as i32)
            .map_err(|e| SicError::Format(format!("cannot parse {s:?}: {e}")))?;
        Ok(Mp(Float::with_val(BITS, parsed)))
    }
}

impl<const BITS: u32> Real for Mp<BITS> {
    const PREC_BITS: u32 = BITS;

    fn from_f64(x: f64) -> Self {
        Mp(Float::with_val(BITS, x))
    }
    fn from_i64(n: i64) -> Self {
        Mp(Float::with_val(BITS, n))
    }
    fn from_float(x: &Float) -> Self {
        Mp(Float::with_val(BITS, x))
    }
    fn to_float(&self, prec: u32) -> Float {
        Float::with_val(prec, &self.0)
    }
    fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }
    fn pi() -> Self {
        Mp(Float::with_val(BITS, Constant::Pi))
    }
    fn sqrt(&self) -> Self {
        Mp(self.0.clone().sqrt())
    }
    fn sin_cos(&self) -> (Self, Self) {
        let (s, c) = self.0.clone().sin_cos(Float::new(BITS));
        (Mp(s), Mp(c))
    }
    fn atan2(&self, x: &Self) -> Self {
        Mp(self.0.clone().atan2(&x.0))
    }
    fn abs(&self) -> Self {
        Mp(self.0.clone().abs())
    }
    fn log2_abs(&self) -> f64 {
        if self.0.is_zero() {
            return f64::NEG_INFINITY;
        }
        let (m, e) = self.0.to_f64_exp();
        m.abs().log2() + e as f64
    }
    fn to_decimal(&self) -> String {
        self.0.to_string_radix(10, Some(decimal_digits(BITS)))
    }
    fn parse_decimal(s: &str) -> Option<Self> {
        Float::parse(s.trim()).ok().map(|p| Mp(Float::with_val_round(BITS, p, Round::Nearest).0))
    }
}

/// Significant decimal digits needed to round-trip a `bits`-bit mantissa.
pub fn decimal_digits(bits: u32) -> usize {
    (bits as f64 * std::f64::consts::LOG10_2).ceil() as usize + 2
}

pub type Mp128 = Mp<128>;
pub type Mp256 = Mp<256>;
pub type Mp512 = Mp<512>;
pub type Mp1024 = Mp<1024>;
pub type Mp2048 = Mp<2048>;
pub type Mp4096 = Mp<4096>;

/// Precisions that have a concrete scalar type, in increasing order.
pub const SUPPORTED_PRECISIONS: [u32; 7] = [53, 128, 256, 512, 1024, 2048, 4096];

/// Rounds a requested precision up to the nearest supported one.
pub fn supported_precision(bits: u32) -> Result<u32, SicError> {
    if bits < 53 {
        return Err(SicError::Precision(bits));
    }
    SUPPORTED_PRECISIONS
        .iter()
        .copied()
        .find(|&p| p >= bits)
        .ok_or(SicError::Precision(bits))
}

/// Runs `$body` with `$t` bound to the scalar type for `$bits` of precision.
///
/// ```
/// use sic_core::{with_real, Real};
/// let digits = with_real!(200, T => T::PREC_BITS).unwrap();
/// assert_eq!(digits, 256);
/// ```
#[macro_export]
macro_rules! with_real {
    ($bits:expr, $t:ident => $body:expr) => {{
        match $crate::scalar::supported_precision($bits) {
            Ok(53) => {
                #[allow(dead_code)]
                type $t = f64;
                Ok($body)
            }
            Ok(128) => {
                #[allow(dead_code)]
                type $t = $crate::scalar::Mp128;
                Ok($body)
            }
            Ok(256) => {
                #[allow(dead_code)]
                type $t = $crate::scalar::Mp256;
                Ok($body)
            }
            Ok(512) => {
                #[allow(dead_code)]
                type $t = $crate::scalar::Mp512;
                Ok($body)
            }
            Ok(1024) => {
                #[allow(dead_code)]
                type $t = $crate::scalar::Mp1024;
                Ok($body)
            }
            Ok(2048) => {
                #[allow(dead_code)]
                type $t = $crate::scalar::Mp2048;
                Ok($body)
            }
            Ok(4096) => {
                #[allow(dead_code)]
                type $t = $crate::scalar::Mp4096;
                Ok($body)
            }
            Ok(other) => Err($crate::error::SicError::Precision(other)),
            Err(e) => Err(e),
        }
    }};
}

// ---- complex helpers ----

pub fn cplx<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

pub fn czero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

pub fn cone<T: Real>() -> Complex<T> {
    Complex::new(T::one(), T::zero())
}

/// `e^{i theta}`.
pub fn cis<T: Real>(theta: &T) -> Complex<T> {
    let (s, c) = theta.sin_cos();
    Complex::new(c, s)
}

pub fn cabs<T: Real>(z: &Complex<T>) -> T {
    z.norm_sqr().sqrt()
}

pub fn carg<T: Real>(z: &Complex<T>) -> T {
    z.im.atan2(&z.re)
}

pub fn cconvert<T: Real, U: Real>(z: &Complex<T>) -> Complex<U> {
    Complex::new(U::from_float(&z.re.to_float(T::PREC_BITS)), U::from_float(&z.im.to_float(T::PREC_BITS)))
}

/// Converts a real between scalar types without passing through `f64`.
pub fn rconvert<T: Real, U: Real>(x: &T) -> U {
    U::from_float(&x.to_float(T::PREC_BITS))
}

/// Rounds to the nearest integer.
pub fn round_to_integer<T: Real>(x: &T) -> Integer {
    let f = x.to_float(T::PREC_BITS.max(64));
    f.round().to_integer().unwrap_or_default()
}

pub fn total_cmp<T: Real>(a: &T, b: &T) -> Ordering {
    a.partial_cmp(b).unwrap_or(Ordering::Equal)
}
