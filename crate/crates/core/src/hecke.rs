//! Hecke operators `T_p` and the involution `T_x` on the homomorphisms
//! `Φ` and `Φ_N`.

use rug::Complex;
use serde::Serialize;

use crate::cocycle::{phi, phi_n0, CocycleValue};
use crate::eisenstein::LatticeConstants;
use crate::error::{Error, Result};
use crate::mp;
use crate::quadfield::{Level, Mat2, QuadInt, Residues};

fn is_prime_i64(n: i64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2i64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn isqrt(n: i64) -> Option<i64> {
    let r = (n as f64).sqrt().round() as i64;
    (r - 1..=r + 1).find(|k| k * k == n)
}

/// How the rational prime below `p` behaves in the field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PrimeKind {
    Split,
    Inert,
    Ramified,
}

/// Decide whether `pO` is a prime ideal, and its type.
pub fn prime_kind(p: &QuadInt) -> Result<PrimeKind> {
    let n = p.norm();
    let disc = p.order().disc();
    if is_prime_i64(n) {
        return Ok(if disc % n == 0 {
            PrimeKind::Ramified
        } else {
            PrimeKind::Split
        });
    }
    // pO prime with norm ℓ² forces p = unit·ℓ with ℓ inert
    if let Some(l) = isqrt(n) {
        if is_prime_i64(l) && disc % l != 0 {
            let lq = p.order().elem(l, 0);
            if lq.divides(p)? && kronecker(disc, l) == -1 {
                return Ok(PrimeKind::Inert);
            }
        }
    }
    Err(Error::NotPrime(p.to_string()))
}

/// Kronecker symbol `(D/ℓ)` for an odd prime or `ℓ = 2`.
fn kronecker(d: i64, l: i64) -> i32 {
    if l == 2 {
        return match d.rem_euclid(8) {
            1 | 7 => 1,
            3 | 5 => -1,
            _ => 0,
        };
    }
    let mut r = 1i64;
    let base = d.rem_euclid(l);
    let mut e = (l - 1) / 2;
    let mut b = base;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % l;
        }
        b = b * b % l;
        e >>= 1;
    }
    match r {
        0 => 0,
        1 => 1,
        _ => -1,
    }
}

/// Determinant-`p` representatives `{(1, j; 0, p)} ∪ {(p, 0; 0, 1)}`.
#[derive(Clone, Debug, Serialize)]
pub struct CosetReps {
    pub p: QuadInt,
    pub kind: PrimeKind,
    pub level: Option<Level>,
    pub reps: Vec<Mat2>,
    pub count: usize,
}

/// Whether `g·h⁻¹ ∈ Γ` (or `Γ₀(N)`), for matrices of determinant `p`.
fn left_equivalent(g: &Mat2, h: &Mat2, p: &QuadInt, level: Option<&Level>) -> Result<Option<Mat2>> {
    let prod = *g * h.adjugate();
    let Some(m) = prod.exact_div_scalar(p)? else {
        return Ok(None);
    };
    if !m.is_sl2() {
        return Ok(None);
    }
    if let Some(l) = level {
        if !m.in_gamma0(l) {
            return Ok(None);
        }
    }
    Ok(Some(m))
}

pub fn coset_reps(p: &QuadInt, level: Option<&Level>) -> Result<CosetReps> {
    let kind = prime_kind(p)?;
    let o = *p.order();
    if let Some(l) = level {
        let (g, _, _) = crate::quadfield::xgcd(p, &l.n)?;
        if !g.is_unit() {
            return Err(Error::NotPrime(format!("{p} is not coprime to the level {}", l.n)));
        }
    }
    let mut reps: Vec<Mat2> = Residues::new(p)?
        .reps()
        .iter()
        .map(|j| Mat2::new(o.one(), *j, o.zero(), *p))
        .collect();
    reps.push(Mat2::new(*p, o.zero(), o.zero(), o.one()));
    for (i, g) in reps.iter().enumerate() {
        for h in &reps[i + 1..] {
            if left_equivalent(g, h, p, level)?.is_some() {
                return Err(Error::HeckeMatching(format!("representatives {g} and {h} are equivalent")));
            }
        }
    }
    let count = reps.len();
    debug_assert_eq!(count as i64, p.norm() + 1);
    Ok(CosetReps {
        p: *p,
        kind,
        level: level.copied(),
        reps,
        count,
    })
}

/// The homomorphisms the operators act on, evaluated at `(p, q) = (0, 0)`.
#[derive(Clone, Copy, Debug)]
pub enum Homomorphism {
    Phi,
    PhiN(Level),
}

impl Homomorphism {
    pub fn level(&self) -> Option<&Level> {
        match self {
            Homomorphism::Phi => None,
            Homomorphism::PhiN(l) => Some(l),
        }
    }

    pub fn eval(&self, m: &Mat2, lc: &LatticeConstants) -> Result<CocycleValue> {
        match self {
            Homomorphism::Phi => phi(m, lc),
            Homomorphism::PhiN(l) => {
                if !m.in_gamma0(l) {
                    return Err(Error::NotInGamma0);
                }
                phi_n0(m, l, lc)
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct HeckeResult {
    pub applied: Complex,
    /// `p + p̄` for `T_p`, `−1` for `T_x`.
    pub eigenvalue: i64,
    pub expected: Complex,
    pub residual: f64,
    pub budget: f64,
}

/// `(T_p φ)(A) = Σᵢ φ(gᵢ A g_{σ(i)}⁻¹)`, with `σ` found by exhaustive matching.
pub fn hecke_apply(
    hom: &Homomorphism,
    reps: &CosetReps,
    m: &Mat2,
    lc: &LatticeConstants,
) -> Result<HeckeResult> {
    let level = hom.level();
    if level.copied() != reps.level {
        return Err(Error::HeckeMatching("representatives built for another level".into()));
    }
    let n = reps.reps.len();
    let mut used = vec![false; n];
    let prec = lc.prec();
    let mut sum = mp::czero(prec);
    let mut budget = 0.0;
    for g in &reps.reps {
        let ga = *g * *m;
        let mut hit = None;
        for (j, h) in reps.reps.iter().enumerate() {
            if let Some(x) = left_equivalent(&ga, h, &reps.p, level)? {
                if hit.is_some() {
                    return Err(Error::HeckeMatching(format!("two partners for {g}")));
                }
                hit = Some((j, x));
            }
        }
        let (j, x) = hit.ok_or_else(|| Error::HeckeMatching(format!("no partner for {g}")))?;
        if used[j] {
            return Err(Error::HeckeMatching("matching is not a permutation".into()));
        }
        used[j] = true;
        let v = hom.eval(&x, lc)?;
        budget += v.error_budget;
        sum += v.value;
    }
    let base = hom.eval(m, lc)?;
    let eig = reps.p.trace();
    let expected = Complex::with_val(prec, &base.value * eig);
    budget += base.error_budget * (eig.unsigned_abs() as f64).max(1.0);
    Ok(HeckeResult {
        residual: mp::dist(&sum, &expected),
        applied: sum,
        eigenvalue: eig,
        expected,
        budget,
    })
}

/// `φ(xAx⁻¹)` with `x = diag(1, −1)`, compared against `−φ(A)`.
pub fn involution_apply(hom: &Homomorphism, m: &Mat2, lc: &LatticeConstants) -> Result<HeckeResult> {
    let prec = lc.prec();
    let a = hom.eval(&m.conj_by_reflection(), lc)?;
    let b = hom.eval(m, lc)?;
    let expected = Complex::with_val(prec, -&b.value);
    Ok(HeckeResult {
        residual: mp::dist(&a.value, &expected),
        applied: a.value,
        eigenvalue: -1,
        expected,
        budget: a.error_budget + b.error_budget,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eisenstein::Lattice;
    use crate::quadfield::{Gamma0Sampler, OrderSpec};

    fn lc() -> LatticeConstants {
        let o = OrderSpec::maximal(-8).unwrap();
        LatticeConstants::new(&Lattice::standard(o, 128)).unwrap()
    }

    #[test]
    fn representative_counts() {
        let o = OrderSpec::maximal(-8).unwrap();
        let r = coset_reps(&o.sqrt_neg_d(), None).unwrap();
        assert_eq!((r.count, r.kind), (3, PrimeKind::Ramified));
        let r = coset_reps(&o.elem(1, 1), None).unwrap();
        assert_eq!((r.count, r.kind), (4, PrimeKind::Split));
        // 3 splits in ℚ(√−2) but 5 is inert
        let r = coset_reps(&o.elem(5, 0), None).unwrap();
        assert_eq!((r.count, r.kind), (26, PrimeKind::Inert));
        assert!(coset_reps(&o.elem(3, 0), None).is_err());
        assert!(coset_reps(&o.elem(2, 0), None).is_err());
        let lev = Level::new(o.sqrt_neg_d()).unwrap();
        assert!(coset_reps(&o.sqrt_neg_d(), Some(&lev)).is_err());
    }

    #[test]
    fn eigenvalues_on_phi_and_phi_n() {
        let lc = lc();
        let o = *lc.lattice().order();
        let lev = Level::new(o.sqrt_neg_d()).unwrap();
        let p = o.elem(1, 1);
        let reps = coset_reps(&p, None).unwrap();
        let mut s = Gamma0Sampler::new(o, None, 8, 1);
        for _ in 0..4 {
            let m = s.sample().unwrap();
            let r = hecke_apply(&Homomorphism::Phi, &reps, &m, &lc).unwrap();
            assert!(r.residual < 1e-25, "{m}: {}", r.residual);
        }
        let reps_n = coset_reps(&p, Some(&lev)).unwrap();
        let h = Homomorphism::PhiN(lev);
        let mut s = Gamma0Sampler::new(o, Some(lev), 8, 2);
        for _ in 0..4 {
            let m = s.sample().unwrap();
            let r = hecke_apply(&h, &reps_n, &m, &lc).unwrap();
            assert!(r.residual < 1e-25);
            let r = involution_apply(&h, &m, &lc).unwrap();
            assert!(r.residual < 1e-25);
        }
        let id = Mat2::identity(&o);
        let r = hecke_apply(&Homomorphism::Phi, &reps, &id, &lc).unwrap();
        assert!(mp::mag_f64(&r.applied) < 1e-30);
    }

    #[test]
    fn involution_is_an_involution() {
        let o = OrderSpec::maximal(-8).unwrap();
        let mut s = Gamma0Sampler::new(o, None, 20, 8);
        for _ in 0..20 {
            let m = s.sample().unwrap();
            assert_eq!(m.conj_by_reflection().conj_by_reflection(), m);
        }
    }
}
