//! Arbitrary-precision reals with an error bound attached.
//!
//! Values are astro-float `BigFloat`s. Every published result is computed
//! twice, once with 30 and once with 60 guard digits beyond the request; the
//! runs must agree to the requested accuracy, and the stored error is the
//! larger of the analytic truncation bound and the observed discrepancy.

use std::cmp::Ordering;
use std::fmt;

use astro_float::{BigFloat, Consts, RoundingMode, Sign};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{GoebelError, Result};
use crate::exact::ExactRational;

pub(crate) const RM: RoundingMode = RoundingMode::ToEven;
pub(crate) const GUARD_LOW: u32 = 30;
pub(crate) const GUARD_HIGH: u32 = 60;
pub(crate) const LOG2_10: f64 = std::f64::consts::LOG2_10;

/// How a value is meant to be rendered.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Accuracy {
    /// Absolute: this many digits after the decimal point.
    Places(u32),
    /// Relative: this many significant digits.
    Significant(u32),
}

#[derive(Debug, Clone)]
pub struct HighPrecReal {
    value: BigFloat,
    err: BigFloat,
    accuracy: Accuracy,
}

impl HighPrecReal {
    pub(crate) fn new(value: BigFloat, err: BigFloat, accuracy: Accuracy) -> Self {
        HighPrecReal {
            value,
            err: err.abs(),
            accuracy,
        }
    }

    pub fn value(&self) -> &BigFloat {
        &self.value
    }

    /// Nonnegative bound on |stored - true|.
    pub fn err(&self) -> &BigFloat {
        &self.err
    }

    pub fn accuracy(&self) -> Accuracy {
        self.accuracy
    }

    pub fn precision_bits(&self) -> usize {
        self.value.mantissa_max_bit_len().unwrap_or(0)
    }

    pub fn to_f64(&self) -> f64 {
        float_to_f64(&self.value)
    }

    /// log10 of the error bound (negative infinity for an exact value).
    pub fn err_log10(&self) -> f64 {
        log10_of(&self.err)
    }

    pub fn to_rational(&self) -> ExactRational {
        float_to_rational(&self.value)
    }

    pub fn err_rational(&self) -> ExactRational {
        float_to_rational(&self.err)
    }

    /// value - err
    pub fn lower(&self) -> ExactRational {
        self.to_rational() - self.err_rational()
    }

    /// value + err
    pub fn upper(&self) -> ExactRational {
        self.to_rational() + self.err_rational()
    }

    /// True when the whole error interval lies strictly above `x`.
    pub fn certainly_gt(&self, x: &ExactRational) -> bool {
        self.lower() > *x
    }

    pub fn certainly_lt(&self, x: &ExactRational) -> bool {
        self.upper() < *x
    }

    /// Rounded to `places` digits after the point.
    pub fn to_decimal(&self, places: u32) -> String {
        rational_to_decimal(&self.to_rational(), places)
    }

    /// `d.ddd…e±x` with `sig` significant digits.
    pub fn to_scientific(&self, sig: u32) -> String {
        rational_to_scientific(&self.to_rational(), sig)
    }

    /// Rendering at the accuracy the value was computed for.
    pub fn render(&self) -> String {
        match self.accuracy {
            Accuracy::Places(p) => self.to_decimal(p),
            Accuracy::Significant(s) => self.to_scientific(s),
        }
    }
}

impl fmt::Display for HighPrecReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Bits of working precision for an absolute target of 10^-places when
/// intermediates reach magnitude 2^scale_bits.
pub(crate) fn bits_for(places: i64, scale_bits: i64) -> usize {
    let b = (places as f64 * LOG2_10).ceil() as i64 + scale_bits.max(0) + 64;
    (b.max(128) as usize).div_ceil(64) * 64
}

/// Scratch state for one precision level.
pub(crate) struct Working {
    pub bits: usize,
    /// Absolute error target, as a power of two.
    pub target_log2: i64,
    cc: Consts,
}

impl Working {
    /// Precision for an absolute target of 10^-places with intermediates up
    /// to 2^scale_bits.
    pub fn for_places(places: i64, scale_bits: i64) -> Self {
        Working::new(
            bits_for(places, scale_bits),
            -(places as f64 * LOG2_10).ceil() as i64 - 8,
        )
    }

    pub fn new(bits: usize, target_log2: i64) -> Self {
        Working {
            bits,
            target_log2,
            cc: Consts::new().expect("astro-float constants cache"),
        }
    }

    pub fn int(&self, v: u64) -> BigFloat {
        BigFloat::from_u64(v, self.bits)
    }

    pub fn big(&self, v: &BigUint) -> BigFloat {
        biguint_to_float(v, self.bits)
    }

    pub fn rational(&self, x: &ExactRational) -> BigFloat {
        let num = self.big(&x.numer().abs().to_biguint().expect("abs"));
        let den = self.big(&x.denom().to_biguint().expect("positive"));
        let q = num.div(&den, self.bits, RM);
        if x.is_negative() {
            q.neg()
        } else {
            q
        }
    }

    pub fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, self.bits, RM)
    }

    pub fn sub(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, self.bits, RM)
    }

    pub fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, self.bits, RM)
    }

    pub fn div(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.div(b, self.bits, RM)
    }

    pub fn ln(&mut self, x: &BigFloat) -> BigFloat {
        x.ln(self.bits, RM, &mut self.cc)
    }

    pub fn exp(&mut self, x: &BigFloat) -> BigFloat {
        x.exp(self.bits, RM, &mut self.cc)
    }

    /// ln(1 + x) keeping relative precision for tiny x >= 0.
    pub fn ln_1p(&mut self, x: &BigFloat) -> BigFloat {
        if x.is_zero() {
            return self.zero();
        }
        let mx = magnitude_bits(x);
        if mx >= -8 {
            let y = self.add(&self.int(1), x);
            return self.ln(&y);
        }
        let stop = mx - self.bits as i64 - 8;
        let mut sum = x.clone();
        let mut pow = x.clone();
        let mut i = 2u64;
        loop {
            pow = self.mul(&pow, x);
            let term = self.div(&pow, &self.int(i));
            if magnitude_bits(&term) < stop {
                break;
            }
            sum = if i.is_multiple_of(2) {
                self.sub(&sum, &term)
            } else {
                self.add(&sum, &term)
            };
            i += 1;
        }
        sum
    }

    pub fn ln_u64(&mut self, v: u64) -> BigFloat {
        let x = self.int(v);
        self.ln(&x)
    }

    pub fn ln2(&mut self) -> BigFloat {
        self.cc.ln_2(self.bits, RM)
    }

    /// ln of a positive integer of any size, without building a float with a
    /// huge exponent.
    pub fn ln_biguint(&mut self, x: &BigUint) -> BigFloat {
        assert!(!x.is_zero(), "ln of zero");
        let bits = x.bits();
        let keep = self.bits as u64 + 64;
        let (top, shift) = if bits > keep {
            (x >> (bits - keep), bits - keep)
        } else {
            (x.clone(), 0)
        };
        let top_bits = top.bits();
        // top / 2^top_bits lies in [1/2, 1)
        let mut f = biguint_to_float(&top, self.bits);
        f.set_exponent(0);
        let ln_f = self.ln(&f);
        let ln2 = self.ln2();
        let e = self.int(top_bits + shift);
        self.add(&ln_f, &self.mul(&e, &ln2))
    }

    pub fn ln_rational(&mut self, x: &ExactRational) -> BigFloat {
        assert!(x.is_positive(), "ln of nonpositive rational");
        let num = x.numer().to_biguint().expect("positive");
        let den = x.denom().to_biguint().expect("positive");
        let a = self.ln_biguint(&num);
        let b = self.ln_biguint(&den);
        self.sub(&a, &b)
    }

    /// 2^e as a float (e may be negative).
    pub fn pow2(&self, e: i64) -> BigFloat {
        let mut one = self.int(1);
        one.set_exponent((e + 1) as i32);
        one
    }

    pub fn zero(&self) -> BigFloat {
        BigFloat::from_u8(0, self.bits)
    }
}

pub(crate) fn biguint_to_float(v: &BigUint, bits: usize) -> BigFloat {
    if v.is_zero() {
        return BigFloat::from_u8(0, bits);
    }
    let total = v.bits();
    let keep = bits as u64 + 64;
    let (top, shift) = if total > keep {
        (v >> (total - keep), total - keep)
    } else {
        (v.clone(), 0)
    };
    let words = top.to_u64_digits();
    let f = BigFloat::from_words(&words, Sign::Pos, (words.len() * 64) as i32);
    let mut f = f.mul(&BigFloat::from_u8(1, bits), bits, RM);
    if shift > 0 {
        let e = f.exponent().expect("finite") as i64 + shift as i64;
        f.set_exponent(e as i32);
    }
    f
}

/// Exact value of a finite float.
pub fn float_to_rational(x: &BigFloat) -> ExactRational {
    let Some((words, _, sign, exp, _)) = x.as_raw_parts() else {
        panic!("non-finite float has no rational value");
    };
    let mut bytes = Vec::with_capacity(words.len() * 8);
    for w in words {
        bytes.extend_from_slice(&w.to_le_bytes());
    }
    let m = BigInt::from(BigUint::from_bytes_le(&bytes));
    if m.is_zero() {
        return ExactRational::zero();
    }
    let m = if sign == Sign::Neg { -m } else { m };
    let shift = exp as i64 - 64 * words.len() as i64;
    if shift >= 0 {
        ExactRational::from_integer(m << shift as usize)
    } else {
        ExactRational::new(m, BigInt::one() << (-shift) as usize)
    }
}

pub(crate) fn float_to_f64(x: &BigFloat) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let Some((words, _, sign, exp, _)) = x.as_raw_parts() else {
        return f64::NAN;
    };
    let top = *words.last().unwrap_or(&0) as f64 / 2f64.powi(64);
    let mag = top * 2f64.powi(exp.clamp(-1100, 1100));
    if sign == Sign::Neg {
        -mag
    } else {
        mag
    }
}

/// log10 |x| without overflow for huge or tiny exponents.
pub(crate) fn log10_of(x: &BigFloat) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let (words, _, _, exp, _) = x.as_raw_parts().expect("finite");
    let top = *words.last().unwrap_or(&0) as f64 / 2f64.powi(64);
    top.log10() + exp as f64 * std::f64::consts::LOG10_2
}

/// Largest |x| as a power of two exponent (floor(log2|x|) + 1).
pub(crate) fn magnitude_bits(x: &BigFloat) -> i64 {
    if x.is_zero() {
        return i64::MIN / 4;
    }
    x.exponent().expect("finite") as i64
}

pub(crate) fn abs_diff(a: &BigFloat, b: &BigFloat, bits: usize) -> BigFloat {
    a.sub(b, bits, RM).abs()
}

pub(crate) fn max_float(a: &BigFloat, b: &BigFloat) -> BigFloat {
    match a.cmp(b) {
        Some(c) if c >= 0 => a.clone(),
        _ => b.clone(),
    }
}

pub(crate) fn compare(a: &BigFloat, b: &BigFloat) -> Ordering {
    match a.cmp(b) {
        Some(c) if c < 0 => Ordering::Less,
        Some(0) => Ordering::Equal,
        _ => Ordering::Greater,
    }
}

/// Round half away from zero to `places` digits after the point.
pub fn rational_to_decimal(x: &BigRational, places: u32) -> String {
    let scale = num_traits::pow(BigInt::from(10), places as usize);
    let scaled = x.abs() * BigRational::from_integer(scale.clone());
    let rounded = (scaled + BigRational::new(BigInt::one(), BigInt::from(2)))
        .floor()
        .to_integer();
    let (int_part, frac_part) = rounded.div_rem(&scale);
    let sign = if x.is_negative() && !rounded.is_zero() { "-" } else { "" };
    if places == 0 {
        return format!("{sign}{int_part}");
    }
    format!(
        "{sign}{int_part}.{:0>width$}",
        frac_part.to_string(),
        width = places as usize
    )
}

/// `sig` significant digits in `d.ddde±x` form.
pub fn rational_to_scientific(x: &BigRational, sig: u32) -> String {
    if x.is_zero() {
        return format!("{:.*}e0", sig.saturating_sub(1) as usize, 0.0);
    }
    let sig = sig.max(1);
    let a = x.abs();
    // Initial exponent guess from bit lengths, then fix up exactly.
    let guess = ((a.numer().bits() as f64 - a.denom().bits() as f64) * std::f64::consts::LOG10_2).floor() as i64;
    let ten = BigRational::from_integer(BigInt::from(10));
    let pow10 = |e: i64| -> BigRational {
        if e >= 0 {
            num_traits::pow(ten.clone(), e as usize)
        } else {
            num_traits::pow(ten.clone(), (-e) as usize).recip()
        }
    };
    let mut e = guess;
    while a < pow10(e) {
        e -= 1;
    }
    while a >= pow10(e + 1) {
        e += 1;
    }
    let mut digits = rational_to_decimal(&(&a / pow10(e)), sig - 1);
    if digits.starts_with("10") {
        e += 1;
        digits = rational_to_decimal(&(&a / pow10(e)), sig - 1);
    }
    let sign = if x.is_negative() { "-" } else { "" };
    format!("{sign}{digits}e{e}")
}

/// A value with its analytic error bound from one precision level.
pub(crate) struct Approx {
    pub value: BigFloat,
    pub err: BigFloat,
}

/// Runs `f` at two guard levels and cross-checks the results.
///
/// `f` receives the guard digit count and builds its own working precision.
/// The runs must agree to 10^-tol_places.
pub(crate) fn certify<F>(what: &str, tol_places: i64, accuracy: Accuracy, f: F) -> Result<HighPrecReal>
where
    F: Fn(u32) -> Result<Approx>,
{
    let lo = f(GUARD_LOW)?;
    let hi = f(GUARD_HIGH)?;
    let bits = hi.value.mantissa_max_bit_len().unwrap_or(128).max(128);
    let spread = abs_diff(&lo.value, &hi.value, bits);
    let tol = pow10_float(-tol_places, 128);
    if compare(&spread, &tol) == Ordering::Greater {
        return Err(GoebelError::PrecisionMismatch {
            what: what.to_string(),
            digits: tol_places.max(0) as u32,
        });
    }
    let err = max_float(&hi.err, &spread);
    Ok(HighPrecReal::new(hi.value, err, accuracy))
}

/// 10^e at low precision, rounded up.
pub(crate) fn pow10_float(e: i64, bits: usize) -> BigFloat {
    let ten = BigFloat::from_u8(10, bits);
    if e >= 0 {
        ten.powi(e as usize, bits, RoundingMode::Up)
    } else {
        BigFloat::from_u8(1, bits).div(
            &ten.powi((-e) as usize, bits, RoundingMode::Down),
            bits,
            RoundingMode::Up,
        )
    }
}
