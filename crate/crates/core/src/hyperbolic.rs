//! Points of hyperbolic 3-space `u = z + j·v` and the action of `SL₂(ℂ)`.

use rug::{Complex, Float};

use crate::error::{Error, Result};
use crate::mp::{conj, embed, norm2};
use crate::quadfield::{Mat2, QuadInt};

/// `u = z + j·v` with `v > 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Point3 {
    pub z: Complex,
    pub v: Float,
}

impl Point3 {
    pub fn new(z: Complex, v: Float) -> Result<Self> {
        if !(v > 0) {
            return Err(Error::Domain(format!("height v must be positive, got {v}")));
        }
        Ok(Point3 { z, v })
    }

    pub fn from_f64(prec: u32, x: f64, y: f64, v: f64) -> Result<Self> {
        Self::new(Complex::with_val(prec, (x, y)), Float::with_val(prec, v))
    }

    pub fn prec(&self) -> u32 {
        self.v.prec()
    }

    /// `z ↦ −z`, height unchanged.
    pub fn negate_z(&self) -> Point3 {
        Point3 {
            z: Complex::with_val(self.prec(), -&self.z),
            v: self.v.clone(),
        }
    }

    /// The scalar action `N·u = N·z + j·|N|·v`.
    pub fn scale(&self, n: &Complex) -> Point3 {
        let p = self.prec();
        Point3 {
            z: Complex::with_val(p, n * &self.z),
            v: Float::with_val(p, &self.v * Float::with_val(p, n.abs_ref())),
        }
    }

    pub fn dist_to(&self, other: &Point3) -> f64 {
        let p = self.prec();
        let dz = Complex::with_val(p, &self.z - &other.z);
        let dv = Float::with_val(p, &self.v - &other.v);
        (norm2(&dz) + Float::with_val(p, dv.square_ref())).sqrt().to_f64()
    }
}

/// A matrix over ℂ, used for the Möbius action.
#[derive(Clone, Debug)]
pub struct CMat2 {
    pub a: Complex,
    pub b: Complex,
    pub c: Complex,
    pub d: Complex,
}

impl CMat2 {
    pub fn from_mat(m: &Mat2, prec: u32) -> Self {
        let e = |q: &QuadInt| embed(q, prec);
        CMat2 {
            a: e(&m.a),
            b: e(&m.b),
            c: e(&m.c),
            d: e(&m.d),
        }
    }

    /// `u ↦ (a·u + b)(c·u + d)⁻¹` in quaternionic coordinates.
    pub fn act(&self, u: &Point3) -> Point3 {
        let p = u.prec();
        let cz_d = Complex::with_val(p, &self.c * &u.z) + &self.d;
        let az_b = Complex::with_val(p, &self.a * &u.z) + &self.b;
        let v2 = Float::with_val(p, u.v.square_ref());
        let den = norm2(&cz_d) + norm2(&self.c) * &v2;
        let num = Complex::with_val(p, &az_b * conj(&cz_d))
            + Complex::with_val(p, &self.a * conj(&self.c)) * &v2;
        Point3 {
            z: num / &den,
            v: Float::with_val(p, &u.v / &den),
        }
    }
}

/// Möbius action of an integral matrix on ℍ³.
pub fn act(m: &Mat2, u: &Point3) -> Point3 {
    CMat2::from_mat(m, u.prec()).act(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadfield::OrderSpec;

    #[test]
    fn action_is_a_group_action() {
        let o = OrderSpec::maximal(-8).unwrap();
        let s = Mat2::inversion(&o);
        let t = Mat2::translation(o.omega());
        let u = Point3::from_f64(128, 0.2, -0.1, 0.7).unwrap();
        let lhs = act(&(s * t), &u);
        let rhs = act(&s, &act(&t, &u));
        assert!(lhs.dist_to(&rhs) < 1e-30);
        let back = act(&s, &act(&s, &u));
        assert!(back.dist_to(&u) < 1e-30);
    }

    #[test]
    fn inversion_at_j_is_fixed() {
        let o = OrderSpec::maximal(-7).unwrap();
        let u = Point3::from_f64(96, 0.0, 0.0, 1.0).unwrap();
        assert!(act(&Mat2::inversion(&o), &u).dist_to(&u) < 1e-25);
        assert!(Point3::from_f64(64, 0.0, 0.0, 0.0).is_err());
    }
}
