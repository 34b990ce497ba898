//! Thin helpers over MPFR/MPC values.

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Complex, Float};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadfield::{OrderSpec, QuadInt};

/// Extra bits carried internally beyond the requested precision.
pub const GUARD_BITS: u32 = 32;

pub fn pi(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi)
}

pub fn fl(prec: u32, x: f64) -> Float {
    Float::with_val(prec, x)
}

pub fn cx(prec: u32, re: f64, im: f64) -> Complex {
    Complex::with_val(prec, (re, im))
}

pub fn czero(prec: u32) -> Complex {
    Complex::new(prec)
}

pub fn cfrom(prec: u32, re: &Float, im: &Float) -> Complex {
    Complex::with_val(prec, (re, im))
}

pub fn creal(prec: u32, re: &Float) -> Complex {
    Complex::with_val(prec, (re, 0))
}

pub fn abs(z: &Complex) -> Float {
    Float::with_val(z.prec().0, z.abs_ref())
}

pub fn norm2(z: &Complex) -> Float {
    Float::with_val(z.prec().0, z.norm_ref())
}

pub fn conj(z: &Complex) -> Complex {
    Complex::with_val(z.prec().0, z.conj_ref())
}

/// `z − z̄ = 2i·Im z`.
pub fn imag_part_i(z: &Complex) -> Complex {
    let p = z.prec().0;
    let im = Float::with_val(p, z.imag() * 2u32);
    Complex::with_val(p, (0, im))
}

pub fn mag_f64(z: &Complex) -> f64 {
    abs(z).to_f64()
}

pub fn to_c64(z: &Complex) -> num_complex::Complex64 {
    num_complex::Complex64::new(z.real().to_f64(), z.imag().to_f64())
}

/// Absolute residual |a − b| as a double.
pub fn dist(a: &Complex, b: &Complex) -> f64 {
    mag_f64(&Complex::with_val(a.prec().0.max(b.prec().0), a - b))
}

/// `x^s` for positive real `x`.
pub fn powr(x: &Float, s: &Float) -> Float {
    Float::with_val(x.prec(), x.pow(s))
}

/// Complex embedding of ω with `Im ω > 0`.
pub fn omega(order: &OrderSpec, prec: u32) -> Complex {
    let t = order.omega_trace();
    let n = order.omega_norm();
    let re = Float::with_val(prec, t) / 2u32;
    let im = Float::with_val(prec, 4 * n - t * t).sqrt() / 2u32;
    cfrom(prec, &re, &im)
}

/// Complex embedding of a quadratic integer.
pub fn embed(q: &QuadInt, prec: u32) -> Complex {
    let w = omega(q.order(), prec);
    Complex::with_val(prec, &w * q.y) + q.x
}

/// Decimal-string form of a complex value, lossless at the working precision.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecimalComplex {
    pub re: String,
    pub im: String,
}

fn digits_for(prec: u32) -> usize {
    ((prec as f64) * std::f64::consts::LOG10_2).ceil() as usize + 2
}

impl DecimalComplex {
    pub fn from_complex(z: &Complex) -> Self {
        let d = digits_for(z.prec().0);
        DecimalComplex {
            re: z.real().to_string_radix(10, Some(d)),
            im: z.imag().to_string_radix(10, Some(d)),
        }
    }

    pub fn to_complex(&self, prec: u32) -> Result<Complex> {
        let re = Float::parse(&self.re)
            .map_err(|e| Error::Parse(format!("real part '{}': {e}", self.re)))?;
        let im = Float::parse(&self.im)
            .map_err(|e| Error::Parse(format!("imaginary part '{}': {e}", self.im)))?;
        Ok(Complex::with_val(prec, (re, im)))
    }
}

impl From<&Complex> for DecimalComplex {
    fn from(z: &Complex) -> Self {
        DecimalComplex::from_complex(z)
    }
}

/// Parse `re,im` into a complex number.
pub fn parse_complex(s: &str, prec: u32) -> Result<Complex> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let (re, im) = match parts.as_slice() {
        [re] => (*re, "0"),
        [re, im] => (*re, *im),
        _ => return Err(Error::Parse(format!("expected 're,im', got '{s}'"))),
    };
    DecimalComplex {
        re: re.to_string(),
        im: im.to_string(),
    }
    .to_complex(prec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedding_matches_minimal_polynomial() {
        for disc in [-8, -7, -11] {
            let o = OrderSpec::maximal(disc).unwrap();
            let w = omega(&o, 128);
            let lhs = Complex::with_val(128, &w * &w);
            let rhs = Complex::with_val(128, &w * o.omega_trace()) - o.omega_norm();
            assert!(dist(&lhs, &rhs) < 1e-35);
            let a = o.elem(3, -2);
            let n = norm2(&embed(&a, 128)).to_f64();
            assert!((n - a.norm() as f64).abs() < 1e-25);
        }
    }

    #[test]
    fn decimal_round_trip() {
        let z = Complex::with_val(200, (pi(200), pi(200) / 3u32));
        let d = DecimalComplex::from_complex(&z);
        let back = d.to_complex(200).unwrap();
        assert!(dist(&z, &back) < 1e-58);
        assert!(parse_complex("0.25,-1.5", 64).is_ok());
        assert!(parse_complex("a,b", 64).is_err());
    }
}
