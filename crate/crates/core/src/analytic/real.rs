//! Multiprecision reals on top of astro-float, and complex values carrying an
//! absolute error bound.

use crate::arith::Rat;
use astro_float::{BigFloat, Consts, RoundingMode};
use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};

const RM: RoundingMode = RoundingMode::ToEven;

static PRECISION_BITS: AtomicUsize = AtomicUsize::new(320);

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constant cache"));
}

/// Working precision in decimal digits (at least 30).
pub fn set_precision_digits(digits: usize) {
    let bits = (digits.max(30) as f64 * std::f64::consts::LOG2_10).ceil() as usize + 64;
    PRECISION_BITS.store(bits, AtomicOrdering::Relaxed);
}

pub fn precision_bits() -> usize {
    PRECISION_BITS.load(AtomicOrdering::Relaxed)
}

/// Relative rounding error of one operation at the working precision.
pub fn unit_roundoff() -> f64 {
    2f64.powi(-(precision_bits() as i32 - 8))
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

#[derive(Clone, Debug)]
pub struct Real(pub BigFloat);

impl Real {
    pub fn from_f64(x: f64) -> Real {
        Real(BigFloat::from_f64(x, precision_bits()))
    }

    pub fn from_i64(x: i64) -> Real {
        Real(BigFloat::from_i64(x, precision_bits()))
    }

    pub fn from_rat(x: &Rat) -> Real {
        let p = precision_bits();
        let n = BigFloat::parse(&x.numer().to_string(), astro_float::Radix::Dec, p, RM, &mut Consts::new().expect("cache"));
        let d = BigFloat::parse(&x.denom().to_string(), astro_float::Radix::Dec, p, RM, &mut Consts::new().expect("cache"));
        Real(n.div(&d, p, RM))
    }

    pub fn zero() -> Real {
        Real::from_i64(0)
    }

    pub fn one() -> Real {
        Real::from_i64(1)
    }

    pub fn pi() -> Real {
        with_consts(|cc| Real(cc.pi(precision_bits(), RM)))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Real {
        Real(self.0.abs())
    }

    pub fn floor(&self) -> Real {
        Real(self.0.floor())
    }

    pub fn ln(&self) -> Real {
        with_consts(|cc| Real(self.0.ln(precision_bits(), RM, cc)))
    }

    pub fn exp(&self) -> Real {
        with_consts(|cc| Real(self.0.exp(precision_bits(), RM, cc)))
    }

    pub fn sin(&self) -> Real {
        with_consts(|cc| Real(self.0.sin(precision_bits(), RM, cc)))
    }

    pub fn sqrt(&self) -> Real {
        Real(self.0.sqrt(precision_bits(), RM))
    }

    /// self^e for self > 0. Goes through exp(e·ln x) with guard bits: the
    /// library pow does not terminate on some exact results such as 4^{1/2}.
    pub fn pow(&self, e: &Real) -> Real {
        if let Some(k) = e.exact_integer() {
            return self.powi(k);
        }
        let p = precision_bits();
        with_consts(|cc| {
            let l = self.0.ln(p + 64, RM, cc).mul(&e.0, p + 64, RM);
            Real(l.exp(p, RM, cc))
        })
    }

    fn exact_integer(&self) -> Option<i64> {
        let k = self.near_integer(0.25)?;
        (k.abs() < 1 << 20 && *self == Real::from_i64(k)).then_some(k)
    }

    pub fn powi(&self, e: i64) -> Real {
        let r = Real(self.0.powi(e.unsigned_abs() as usize, precision_bits(), RM));
        if e < 0 {
            &Real::one() / &r
        } else {
            r
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.0.is_zero() {
            return 0.0;
        }
        format!("{}", self.0).parse().unwrap_or(f64::NAN)
    }

    /// Decimal string with `digits` significant digits.
    pub fn to_decimal(&self, digits: usize) -> String {
        let s = format!("{}", self.0);
        let (mant, exp) = s.split_once('e').unwrap_or((&s, "+0"));
        let (sign, mant) = mant.strip_prefix('-').map_or(("", mant), |m| ("-", m));
        let all: Vec<u8> = mant.bytes().filter(u8::is_ascii_digit).map(|b| b - b'0').collect();
        let mut exp: i64 = exp.parse().unwrap_or(0);
        // mantissa is d.ddd…; round half up at `digits`
        let mut kept: Vec<u8> = all.iter().copied().take(digits.max(1)).collect();
        if all.get(kept.len()).is_some_and(|&d| d >= 5) {
            let mut i = kept.len();
            loop {
                if i == 0 {
                    kept.insert(0, 1);
                    kept.pop();
                    exp += 1;
                    break;
                }
                i -= 1;
                if kept[i] == 9 {
                    kept[i] = 0;
                } else {
                    kept[i] += 1;
                    break;
                }
            }
        }
        while kept.len() > 1 && kept.last() == Some(&0) {
            kept.pop();
        }
        let body: String = kept.iter().map(|d| char::from(b'0' + d)).collect();
        let (head, tail) = body.split_at(1);
        if self.0.is_zero() {
            return "0".into();
        }
        if tail.is_empty() {
            format!("{sign}{head}e{exp}")
        } else {
            format!("{sign}{head}.{tail}e{exp}")
        }
    }

    /// Nearest integer, when within `tol` of one.
    pub fn near_integer(&self, tol: f64) -> Option<i64> {
        let x = self.to_f64();
        let r = x.round();
        ((x - r).abs() <= tol).then_some(r as i64)
    }
}

impl PartialEq for Real {
    fn eq(&self, o: &Real) -> bool {
        self.0.cmp(&o.0) == Some(0)
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, o: &Real) -> Option<Ordering> {
        self.0.cmp(&o.0).map(|c| c.cmp(&0))
    }
}

macro_rules! binop {
    ($tr:ident, $f:ident) => {
        impl $tr<&Real> for &Real {
            type Output = Real;
            fn $f(self, o: &Real) -> Real {
                Real(self.0.$f(&o.0, precision_bits(), RM))
            }
        }
        impl $tr<Real> for Real {
            type Output = Real;
            fn $f(self, o: Real) -> Real {
                (&self).$f(&o)
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(self.0.clone().neg())
    }
}

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(self.0.neg())
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal(20))
    }
}

/// re + i·im with |true − computed| ≤ err.
#[derive(Clone, Debug)]
pub struct ComplexValue {
    pub re: Real,
    pub im: Real,
    pub err: f64,
}

impl ComplexValue {
    pub fn real(x: Real, err: f64) -> Self {
        ComplexValue { re: x, im: Real::zero(), err }
    }

    pub fn exact(x: Real) -> Self {
        let e = x.abs().to_f64() * unit_roundoff();
        Self::real(x, e)
    }

    pub fn one() -> Self {
        Self::real(Real::one(), 0.0)
    }

    /// i^k
    pub fn i_pow(k: i64) -> Self {
        let (re, im) = [(1, 0), (0, 1), (-1, 0), (0, -1)][k.rem_euclid(4) as usize];
        ComplexValue { re: Real::from_i64(re), im: Real::from_i64(im), err: 0.0 }
    }

    pub fn abs_f64(&self) -> f64 {
        self.re.to_f64().hypot(self.im.to_f64())
    }

    pub fn mul(&self, o: &ComplexValue) -> ComplexValue {
        let re = &(&self.re * &o.re) - &(&self.im * &o.im);
        let im = &(&self.re * &o.im) + &(&self.im * &o.re);
        let (a, b) = (self.abs_f64(), o.abs_f64());
        let err = a * o.err + b * self.err + self.err * o.err + 4.0 * a * b * unit_roundoff();
        ComplexValue { re, im, err }
    }

    pub fn scale(&self, x: &Real) -> ComplexValue {
        self.mul(&ComplexValue::exact(x.clone()))
    }

    pub fn div(&self, o: &ComplexValue) -> ComplexValue {
        let d = &(&o.re * &o.re) + &(&o.im * &o.im);
        let re = &(&(&self.re * &o.re) + &(&self.im * &o.im)) / &d;
        let im = &(&(&self.im * &o.re) - &(&self.re * &o.im)) / &d;
        let (a, b) = (self.abs_f64(), o.abs_f64());
        let q = a / b;
        let err = (self.err + q * o.err) / (b - o.err).max(b * 0.5) + 4.0 * q * unit_roundoff();
        ComplexValue { re, im, err }
    }

    pub fn add(&self, o: &ComplexValue) -> ComplexValue {
        let re = &self.re + &o.re;
        let im = &self.im + &o.im;
        let err = self.err + o.err + (self.abs_f64() + o.abs_f64()) * unit_roundoff();
        ComplexValue { re, im, err }
    }

    pub fn neg(&self) -> ComplexValue {
        ComplexValue { re: -&self.re, im: -&self.im, err: self.err }
    }

    pub fn sub(&self, o: &ComplexValue) -> ComplexValue {
        self.add(&o.neg())
    }

    /// |self − o| as f64.
    pub fn distance(&self, o: &ComplexValue) -> f64 {
        self.sub(o).abs_f64()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "re": self.re.to_decimal(20),
            "im": self.im.to_decimal(20),
            "err": format!("{:.3e}", self.err),
        })
    }
}

impl fmt::Display for ComplexValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{} (±{:.1e})", self.re, self.err)
        } else {
            write!(f, "{} + {}i (±{:.1e})", self.re, self.im, self.err)
        }
    }
}
