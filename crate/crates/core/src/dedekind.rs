//! Elliptic Dedekind sums `D(a, c; p, q)` and their level-`N` differences.

use rayon::prelude::*;
use rug::Complex;

use crate::eisenstein::LatticeConstants;
use crate::error::{Error, Result};
use crate::mp::{czero, embed};
use crate::quadfield::{Level, QuadInt, Residues};

/// Arguments of a Dedekind sum; `p`, `q` are taken modulo the lattice.
#[derive(Clone, Debug)]
pub struct DedekindInput {
    pub a: QuadInt,
    pub c: QuadInt,
    pub p: Complex,
    pub q: Complex,
    pub level: Option<Level>,
}

impl DedekindInput {
    pub fn new(a: QuadInt, c: QuadInt, lc: &LatticeConstants) -> Result<Self> {
        if c.is_zero() {
            return Err(Error::ZeroModulus);
        }
        let prec = lc.working_prec();
        Ok(DedekindInput {
            a,
            c,
            p: czero(prec),
            q: czero(prec),
            level: None,
        })
    }

    pub fn with_pq(mut self, p: &Complex, q: &Complex, lc: &LatticeConstants) -> Self {
        self.p = lc.lattice().reduce(p).x;
        self.q = lc.lattice().reduce(q).x;
        self
    }

    pub fn with_level(mut self, level: Level) -> Self {
        self.level = Some(level);
        self
    }

    pub fn evaluate(&self, lc: &LatticeConstants) -> Result<Complex> {
        match self.level {
            None => d_sum_pq(&self.a, &self.c, &self.p, &self.q, lc),
            Some(l) => d_smoothed(&self.a, &self.c, &l, &self.p, &self.q, lc),
        }
    }
}

/// `D(a, c) = (1/c) Σ_{r ∈ L/cL} E₁(ar/c) E₁(r/c)`.
pub fn d_sum(a: &QuadInt, c: &QuadInt, lc: &LatticeConstants) -> Result<Complex> {
    let z = czero(lc.working_prec());
    d_sum_pq(a, c, &z, &z, lc)
}

/// `D(a, c; p, q) = (1/c) Σ_{r ∈ L/cL} E₁(a(r+p)/c + q) E₁((r+p)/c)`.
///
/// Arguments falling on the lattice contribute `E₁(0) = 0`.
pub fn d_sum_pq(
    a: &QuadInt,
    c: &QuadInt,
    p: &Complex,
    q: &Complex,
    lc: &LatticeConstants,
) -> Result<Complex> {
    if c.is_zero() {
        return Err(Error::ZeroModulus);
    }
    let wp = lc.working_prec();
    let lat = lc.lattice();
    let res = Residues::new(c)?;
    let cc = embed(c, wp);
    let ac = embed(a, wp);
    let terms: Vec<Complex> = if p.is_zero() && q.is_zero() {
        // E₁(ar/c) depends only on ar mod c, so one table serves both factors
        let table: Vec<Complex> = res
            .reps()
            .par_iter()
            .map(|r| lc.e1_wp(&Complex::with_val(wp, lat.point(r) / &cc)))
            .collect();
        res.reps()
            .iter()
            .zip(&table)
            .map(|(r, e_y)| Complex::with_val(wp, &table[res.index_of(&(*a * *r))] * e_y))
            .collect()
    } else {
        res.reps()
            .par_iter()
            .map(|r| {
                let rp = Complex::with_val(wp, lat.point(r) + p);
                let y = Complex::with_val(wp, &rp / &cc);
                let x = Complex::with_val(wp, &ac * &y) + q;
                Complex::with_val(wp, lc.e1_wp(&x) * lc.e1_wp(&y))
            })
            .collect()
    };
    // fixed reduction order keeps the result bit-reproducible
    let mut sum = czero(wp);
    for t in terms {
        sum += t;
    }
    Ok(Complex::with_val(lc.prec(), sum / cc))
}

/// `D^N(a, c; p, q) = D(Na, c; p, q) − D(a, c; p, q)`.
pub fn d_smoothed(
    a: &QuadInt,
    c: &QuadInt,
    level: &Level,
    p: &Complex,
    q: &Complex,
    lc: &LatticeConstants,
) -> Result<Complex> {
    let na = level.n * *a;
    let x = d_sum_pq(&na, c, p, q, lc)?;
    let y = d_sum_pq(a, c, p, q, lc)?;
    Ok(Complex::with_val(lc.prec(), x - y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eisenstein::{lattice_point_f64, Lattice};
    use crate::mp::dist;
    use crate::quadfield::OrderSpec;

    fn lc() -> LatticeConstants {
        let o = OrderSpec::maximal(-8).unwrap();
        LatticeConstants::new(&Lattice::standard(o, 128)).unwrap()
    }

    #[test]
    fn trivial_modulus_vanishes() {
        let lc = lc();
        let o = *lc.lattice().order();
        let v = d_sum(&o.elem(3, 1), &o.one(), &lc).unwrap();
        assert!(crate::mp::mag_f64(&v) < 1e-35);
        assert_eq!(d_sum(&o.one(), &o.zero(), &lc), Err(Error::ZeroModulus));
    }

    #[test]
    fn odd_in_a_and_periodic() {
        let lc = lc();
        let o = *lc.lattice().order();
        let (a, c) = (o.elem(1, 1), o.elem(2, -1));
        let d = d_sum(&a, &c, &lc).unwrap();
        let dm = d_sum(&-a, &c, &lc).unwrap();
        assert!(dist(&d, &Complex::with_val(128, -&dm)) < 1e-30);
        let shifted = a + c * o.elem(-1, 2);
        assert!(dist(&d, &d_sum(&shifted, &c, &lc).unwrap()) < 1e-30);
    }

    #[test]
    fn shifted_sum_specializes_and_is_periodic() {
        let lc = lc();
        let lat = lc.lattice().clone();
        let o = *lat.order();
        let (a, c) = (o.elem(2, 1), o.elem(1, -2));
        let z = czero(lc.working_prec());
        let d0 = d_sum_pq(&a, &c, &z, &z, &lc).unwrap();
        assert!(dist(&d0, &d_sum(&a, &c, &lc).unwrap()) == 0.0);
        let p = lattice_point_f64(&lat, 0.31, -0.12);
        let q = lattice_point_f64(&lat, 0.07, 0.44);
        let v = d_sum_pq(&a, &c, &p, &q, &lc).unwrap();
        let pw = Complex::with_val(128, &p + lat.w1());
        let qw = Complex::with_val(128, &q - lat.w2());
        assert!(dist(&v, &d_sum_pq(&a, &c, &pw, &q, &lc).unwrap()) < 1e-28);
        assert!(dist(&v, &d_sum_pq(&a, &c, &p, &qw, &lc).unwrap()) < 1e-28);
    }

    #[test]
    fn smoothed_is_the_difference() {
        let lc = lc();
        let o = *lc.lattice().order();
        let lev = Level::new(o.sqrt_neg_d()).unwrap();
        let (a, c) = (o.elem(1, 1), o.elem(3, 1));
        let z = czero(lc.working_prec());
        let s = d_smoothed(&a, &c, &lev, &z, &z, &lc).unwrap();
        let direct = Complex::with_val(
            128,
            d_sum(&(lev.n * a), &c, &lc).unwrap() - d_sum(&a, &c, &lc).unwrap(),
        );
        assert_eq!(s, direct);
        let one = d_smoothed(&a, &o.one(), &lev, &z, &z, &lc).unwrap();
        assert!(crate::mp::mag_f64(&one) < 1e-35);
    }
}
