//! The cocycles `Φ` and `Φ_N`, their verification, and recognition of
//! their values as algebraic integers.

use rug::{Complex, Float, Integer};
use serde::Serialize;

use crate::dedekind::d_sum_pq;
use crate::eisenstein::{Lattice, LatticeConstants, SeriesParams};
use crate::error::{Error, Result};
use crate::hyperbolic::{act, Point3};
use crate::mp::{self, conj, czero, embed, imag_part_i};
use crate::quadfield::{Level, Mat2, OrderSpec, QuadInt};
use crate::relation::{find_relation, Relation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    /// `c ≠ 0`
    Generic,
    /// `c = 0`
    Parabolic,
}

#[derive(Clone, Debug)]
pub struct CocycleValue {
    pub value: Complex,
    pub error_budget: f64,
    pub branch: Branch,
    pub matrix: Mat2,
    pub level: Option<QuadInt>,
    pub pq: Option<(Complex, Complex)>,
}

impl CocycleValue {
    fn new(value: Complex, m: &Mat2, terms: i64, lc: &LatticeConstants) -> Self {
        let scale = 1.0 + mp::mag_f64(&value) + mp::mag_f64(lc.e2zero());
        let eps = 2f64.powi(-(lc.prec() as i32));
        CocycleValue {
            error_budget: 64.0 * (terms as f64 + 8.0) * eps * scale,
            value,
            branch: if m.c.is_zero() {
                Branch::Parabolic
            } else {
                Branch::Generic
            },
            matrix: *m,
            level: None,
            pq: None,
        }
    }
}

/// `I(z) = z − z̄`.
fn im2(z: &Complex) -> Complex {
    imag_part_i(z)
}

/// The row-vector action `(p, q)·A = (ap + cq, bp + dq)`, reduced mod `L²`.
pub fn row_action(p: &Complex, q: &Complex, m: &Mat2, lc: &LatticeConstants) -> (Complex, Complex) {
    let wp = lc.working_prec();
    let e = |x: &QuadInt| embed(x, wp);
    let ps = Complex::with_val(wp, e(&m.a) * p) + Complex::with_val(wp, e(&m.c) * q);
    let qs = Complex::with_val(wp, e(&m.b) * p) + Complex::with_val(wp, e(&m.d) * q);
    let lat = lc.lattice();
    (lat.reduce(&ps).x, lat.reduce(&qs).x)
}

fn require_sl2(m: &Mat2) -> Result<()> {
    if m.is_sl2() {
        Ok(())
    } else {
        Err(Error::BadDeterminant(m.det().to_string()))
    }
}

/// `Φ(A) = E₂(0)·I((a+d)/c) − D(a, c)` for `c ≠ 0` and `E₂(0)·I(b/d)` for `c = 0`.
pub fn phi(m: &Mat2, lc: &LatticeConstants) -> Result<CocycleValue> {
    require_sl2(m)?;
    let wp = lc.working_prec();
    let e = |x: &QuadInt| embed(x, wp);
    if m.c.is_zero() {
        let r = Complex::with_val(wp, e(&m.b) / e(&m.d));
        let v = Complex::with_val(lc.prec(), lc.e2zero() * im2(&r));
        return Ok(CocycleValue::new(v, m, 1, lc));
    }
    let r = Complex::with_val(wp, e(&m.trace()) / e(&m.c));
    let z = czero(wp);
    let d = d_sum_pq(&m.a, &m.c, &z, &z, lc)?;
    let v = Complex::with_val(lc.prec(), lc.e2zero() * im2(&r)) - d;
    Ok(CocycleValue::new(v, m, m.c.norm(), lc))
}

/// `Φ(A)(p, q)`, the two-variable cocycle.
pub fn phi_pq(
    m: &Mat2,
    p: &Complex,
    q: &Complex,
    lc: &LatticeConstants,
    params: &SeriesParams,
) -> Result<CocycleValue> {
    require_sl2(m)?;
    let wp = lc.working_prec();
    let lat = lc.lattice();
    let p = lat.reduce(p).x;
    let q = lat.reduce(q).x;
    let e = |x: &QuadInt| embed(x, wp);
    let e0p = lc.e0(&p);
    let mut v;
    if m.c.is_zero() {
        let r = Complex::with_val(wp, e(&m.b) / e(&m.d));
        v = -Complex::with_val(wp, conj(&r) * lc.e_aux(&p, params));
        v -= Complex::with_val(wp, &r * &e0p) * lc.e2(&q);
    } else {
        let (ps, qs) = row_action(&p, &q, m, lc);
        let cc = e(&m.c);
        let ac = Complex::with_val(wp, e(&m.a) / &cc);
        let dc = Complex::with_val(wp, e(&m.d) / &cc);
        v = -Complex::with_val(wp, conj(&ac) * lc.e_aux(&p, params));
        v -= Complex::with_val(wp, conj(&dc) * lc.e_aux(&ps, params));
        v -= Complex::with_val(wp, &ac * &e0p) * lc.e2(&q);
        v -= Complex::with_val(wp, &dc * lc.e0(&ps)) * lc.e2(&qs);
        v -= d_sum_pq(&m.a, &m.c, &p, &q, lc)?;
    }
    let mut out = CocycleValue::new(Complex::with_val(lc.prec(), v), m, m.c.norm(), lc);
    out.pq = Some((p, q));
    Ok(out)
}

/// Both evaluations of `Φ_N(A)(p, q)` and their gap.
#[derive(Clone, Debug)]
pub struct PhiN {
    /// `Φ(A_N)(p, q) − Φ(A)(p, q)`.
    pub value: CocycleValue,
    /// The expanded form with `D^N`, argument `(p, q)A_N`, and
    /// `conj((N−1)·x)` coefficients.
    pub explicit: Complex,
    pub gap: f64,
    /// Whether `(p, q)A_N ≡ (p, q)A (mod L²)`, the condition under which the
    /// two forms must coincide.
    pub forms_must_agree: bool,
}

/// `Φ_N(A)(p, q) = Φ(A_N)(p, q) − Φ(A)(p, q)` alone, without the expanded form.
pub fn phi_n_literal(
    m: &Mat2,
    level: &Level,
    p: &Complex,
    q: &Complex,
    lc: &LatticeConstants,
    params: &SeriesParams,
) -> Result<CocycleValue> {
    require_sl2(m)?;
    let mn = m.smear(level)?;
    let a = phi_pq(&mn, p, q, lc, params)?;
    let b = phi_pq(m, p, q, lc, params)?;
    let lit = Complex::with_val(lc.prec(), &a.value - &b.value);
    let mut value = CocycleValue::new(lit, m, m.c.norm() * 2 + 2, lc);
    value.error_budget = a.error_budget + b.error_budget;
    value.level = Some(level.n);
    value.pq = a.pq;
    Ok(value)
}

/// `Φ_N(A)(p, q)` for `A ∈ Γ₀(N)`, in both forms.
pub fn phi_n(
    m: &Mat2,
    level: &Level,
    p: &Complex,
    q: &Complex,
    lc: &LatticeConstants,
    params: &SeriesParams,
) -> Result<PhiN> {
    let value = phi_n_literal(m, level, p, q, lc, params)?;
    let mn = m.smear(level)?;
    let wp = lc.working_prec();
    let explicit = phi_n_explicit(m, level, p, q, lc, params)?;
    let gap = mp::dist(&value.value, &explicit);

    let lat = lc.lattice();
    let (pa, qa) = row_action(p, q, m, lc);
    let (pn, qn) = row_action(p, q, &mn, lc);
    let same = lat.contains(&Complex::with_val(wp, &pa - &pn))
        && lat.contains(&Complex::with_val(wp, &qa - &qn));

    if same && gap > 16.0 * value.error_budget {
        return Err(Error::Degenerate(format!(
            "literal and expanded forms of the level cocycle differ by {gap:.3e}"
        )));
    }
    Ok(PhiN {
        value,
        explicit,
        gap,
        forms_must_agree: same,
    })
}

/// `Φ_N(A)(p, q)` in the expanded form: for `c ≠ 0`
/// `−conj((N−1)a/c)E(p) − conj((N−1)d/c)E(p*) − (N−1)(a/c)E₀(p)E₂(q)
///  − (N−1)(d/c)E₀(p*)E₂(q*) − D^N(a, c; p, q)` with `(p*, q*) = (p, q)A_N`,
/// and `−conj((N−1)b/d)E(p) − (N−1)(b/d)E₀(p)E₂(q)` for `c = 0`.
pub fn phi_n_explicit(
    m: &Mat2,
    level: &Level,
    p: &Complex,
    q: &Complex,
    lc: &LatticeConstants,
    params: &SeriesParams,
) -> Result<Complex> {
    let mn = m.smear(level)?;
    let wp = lc.working_prec();
    let lat = lc.lattice();
    let p = lat.reduce(p).x;
    let q = lat.reduce(q).x;
    let e = |x: &QuadInt| embed(x, wp);
    let nm1 = Complex::with_val(wp, e(&level.n) - 1u32);
    let e0p = lc.e0(&p);
    let mut v;
    if m.c.is_zero() {
        let r = Complex::with_val(wp, e(&m.b) / e(&m.d)) * &nm1;
        v = -Complex::with_val(wp, conj(&r) * lc.e_aux(&p, params));
        v -= Complex::with_val(wp, &r * &e0p) * lc.e2(&q);
    } else {
        let (ps, qs) = row_action(&p, &q, &mn, lc);
        let cc = e(&m.c);
        let ac = Complex::with_val(wp, e(&m.a) / &cc) * &nm1;
        let dc = Complex::with_val(wp, e(&m.d) / &cc) * &nm1;
        v = -Complex::with_val(wp, conj(&ac) * lc.e_aux(&p, params));
        v -= Complex::with_val(wp, conj(&dc) * lc.e_aux(&ps, params));
        v -= Complex::with_val(wp, &ac * &e0p) * lc.e2(&q);
        v -= Complex::with_val(wp, &dc * lc.e0(&ps)) * lc.e2(&qs);
        let na = level.n * m.a;
        v -= d_sum_pq(&na, &m.c, &p, &q, lc)?;
        v += d_sum_pq(&m.a, &m.c, &p, &q, lc)?;
    }
    Ok(Complex::with_val(lc.prec(), v))
}

/// `(N−1)⁻¹L/L`: for `p`, `q` here, `(p, q)A_N ≡ (p, q)A (mod L²)` for every
/// `A ∈ Γ₀(N)`, so `Φ_N` satisfies the cocycle relation on these pairs.
pub fn level_torsion_points(level: &Level, lat: &Lattice) -> Result<Vec<Complex>> {
    let m = level.n - level.n.order().one();
    if m.is_zero() {
        return Err(Error::InvalidLevel);
    }
    let prec = lat.prec();
    let mc = embed(&m, prec);
    Ok(crate::quadfield::Residues::new(&m)?
        .reps()
        .iter()
        .map(|r| lat.reduce(&Complex::with_val(prec, lat.point(r) / &mc)).x)
        .collect())
}

/// `Φ_N(A)` at `(p, q) = (0, 0)`.
pub fn phi_n0(m: &Mat2, level: &Level, lc: &LatticeConstants) -> Result<CocycleValue> {
    let mn = m.smear(level)?;
    let a = phi(&mn, lc)?;
    let b = phi(m, lc)?;
    let mut out = CocycleValue::new(Complex::with_val(lc.prec(), &a.value - &b.value), m, 0, lc);
    out.error_budget = a.error_budget + b.error_budget;
    out.level = Some(level.n);
    Ok(out)
}

/// Residual of `Φ(AB)(p,q) = Φ(A)(p,q) + Φ(B)((p,q)A)`, or of its level-`N`
/// analogue when `level` is given; also returns the combined budget.
pub fn check_cocycle(
    a: &Mat2,
    b: &Mat2,
    p: &Complex,
    q: &Complex,
    level: Option<&Level>,
    lc: &LatticeConstants,
    params: &SeriesParams,
) -> Result<(f64, f64)> {
    let ab = *a * *b;
    let (pa, qa) = row_action(p, q, a, lc);
    let eval = |m: &Mat2, p: &Complex, q: &Complex| -> Result<CocycleValue> {
        match level {
            None => phi_pq(m, p, q, lc, params),
            Some(l) => phi_n_literal(m, l, p, q, lc, params),
        }
    };
    let x = eval(&ab, p, q)?;
    let y = eval(a, p, q)?;
    let z = eval(b, &pa, &qa)?;
    let r = Complex::with_val(lc.prec(), &x.value - &y.value) - &z.value;
    Ok((
        mp::mag_f64(&r),
        x.error_budget + y.error_budget + z.error_budget,
    ))
}

/// Residual of `Φ(A) = H(Au) − H(u)`, or `Φ_N(A) = H_N(Au) − H_N(u)`.
pub fn check_transformation(
    m: &Mat2,
    u: &Point3,
    level: Option<&Level>,
    lc: &LatticeConstants,
    params: &SeriesParams,
) -> Result<f64> {
    let au = act(m, u);
    let (lhs, rhs) = match level {
        None => {
            let phi = phi(m, lc)?.value;
            let d = Complex::with_val(lc.prec(), lc.h_value(&au, params)? - lc.h_value(u, params)?);
            (phi, d)
        }
        Some(l) => {
            let phi = phi_n0(m, l, lc)?.value;
            let d = Complex::with_val(
                lc.prec(),
                lc.h_n_value(&au, &l.n, params)? - lc.h_n_value(u, &l.n, params)?,
            );
            (phi, d)
        }
    };
    Ok(mp::dist(&lhs, &rhs))
}

// ---- integrality ---------------------------------------------------------

/// `j`-invariants of the class-number-one orders covered here.
fn class_number_one_j(d: i64) -> Option<i128> {
    Some(match d {
        2 => 8000,
        7 => -3375,
        11 => -32768,
        19 => -884_736,
        43 => -884_736_000,
        67 => -147_197_952_000,
        163 => -262_537_412_640_768_000,
        _ => return None,
    })
}

fn factor(n: &Integer) -> Vec<(Integer, u32)> {
    let mut n = Integer::from(n.abs_ref());
    let mut out = Vec::new();
    let mut p = Integer::from(2);
    while Integer::from(&p * &p) <= n && p < 1_000_000 {
        let mut e = 0;
        while n.is_divisible(&p) {
            n /= &p;
            e += 1;
        }
        if e > 0 {
            out.push((p.clone(), e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Integral Weierstrass invariants `(g₂, g₃)` for the CM curve with
/// invariant `j`, minimal under `(g₂, g₃) ↦ (g₂/s², g₃/s³)`.
pub fn integral_invariants(j: i128) -> Result<(Integer, Integer)> {
    if j == 0 || j == 1728 {
        return Err(Error::ExcludedOrder(j as i64));
    }
    let j = Integer::from(j);
    let k = Integer::from(&j - 1728);
    let g2 = Integer::from(&j * &k) * 12u32;
    let g3 = Integer::from(&j * Integer::from(k.square_ref())) * 8u32;
    let mut s = Integer::from(1);
    let f2 = factor(&g2);
    for (p, e2) in f2 {
        let mut e3 = 0u32;
        let mut t = Integer::from(g3.abs_ref());
        while t.is_divisible(&p) {
            t /= &p;
            e3 += 1;
        }
        let e = (e2 / 2).min(e3 / 3);
        for _ in 0..e {
            s *= &p;
        }
    }
    let s2 = Integer::from(s.square_ref());
    let s3 = Integer::from(&s2 * &s);
    Ok((g2 / s2, g3 / s3))
}

/// Generators of `F = ℚ(g₂, g₃, √D)` for a lattice normalized so that
/// `g₂`, `g₃` are rational integers.
#[derive(Clone, Debug)]
pub struct FieldSpec {
    pub disc: i64,
    pub g2: Complex,
    pub g3: Complex,
    pub g2_int: Integer,
    pub g3_int: Integer,
    pub lattice: Lattice,
}

impl FieldSpec {
    /// Recognition basis of `O_F = O_K`: `(1, ω)`.
    pub fn basis(&self, prec: u32) -> Vec<Complex> {
        vec![Complex::with_val(prec, 1), mp::omega(self.lattice.order(), prec)]
    }
}

/// Scale `O` so its Weierstrass invariants become integral.
pub fn integral_lattice(order: &OrderSpec, prec: u32) -> Result<FieldSpec> {
    let j = class_number_one_j(order.squarefree())
        .filter(|_| order.conductor() == 1)
        .ok_or(Error::UnsupportedOrder(order.field_disc()))?;
    let (g2i, g3i) = integral_invariants(j)?;
    let wp = prec + 64;
    let base = LatticeConstants::new(&Lattice::standard(*order, wp))?;
    let r4 = Complex::with_val(wp, base.g2() / Float::with_val(wp, &g2i));
    let r6 = Complex::with_val(wp, base.g3() / Float::with_val(wp, &g3i));
    // λ⁴ = g₂(O)/g₂, λ⁶ = g₃(O)/g₃
    let lam2 = Complex::with_val(wp, &r6 / &r4);
    let check = Complex::with_val(wp, lam2.square_ref());
    if mp::dist(&check, &r4) > 1e-20 * mp::mag_f64(&r4) {
        return Err(Error::Degenerate(
            "Weierstrass invariants are not proportional to the integral model".into(),
        ));
    }
    let lam = Complex::with_val(prec, lam2.sqrt());
    let lattice = Lattice::scaled(*order, lam);
    let lc = LatticeConstants::new(&lattice)?;
    Ok(FieldSpec {
        disc: order.field_disc(),
        g2: lc.g2().clone(),
        g3: lc.g3().clone(),
        g2_int: g2i,
        g3_int: g3i,
        lattice,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessStatus {
    /// Value recognized as `x + yω` with integer `x`, `y`.
    Integral,
    /// A relation exists but needs a non-unit denominator.
    NonIntegral,
    /// No relation of acceptable height and residual at this precision.
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct AlgebraicWitness {
    pub status: WitnessStatus,
    /// `(x, y)` with value ≈ `x + yω`, when integral.
    pub coords: Option<(i64, i64)>,
    /// Raw relation `c₀·value + c₁ + c₂ω = 0`.
    pub relation: Vec<i64>,
    pub residual: f64,
    pub height: u64,
    pub precision_bits: u32,
}

/// Recognize `value` as an element of `O_K = Z[ω]` by integer-relation search.
pub fn recognize_integrality(value: &Complex, field: &FieldSpec, prec: u32) -> Result<AlgebraicWitness> {
    let mag = mp::mag_f64(value);
    let eps = 2f64.powi(-(prec as i32) + 8);
    if mag < eps {
        return Ok(AlgebraicWitness {
            status: WitnessStatus::Integral,
            coords: Some((0, 0)),
            relation: vec![1, 0, 0],
            residual: mag,
            height: 0,
            precision_bits: prec,
        });
    }
    let v = Complex::with_val(prec, value);
    let basis = field.basis(prec);
    let xs = vec![v.clone(), basis[0].clone(), basis[1].clone()];
    let scale_bits = prec * 3 / 4;
    let rel: Relation = find_relation(&xs, scale_bits)?;
    let c0 = rel.coeffs[0];
    let height = rel.height;
    // a genuine relation has residual far below 2^{-scale_bits/2}
    let plausible = c0 != 0 && rel.residual < 2f64.powi(-(scale_bits as i32) / 2);
    if !plausible {
        return Ok(AlgebraicWitness {
            status: WitnessStatus::Inconclusive,
            coords: None,
            relation: rel.coeffs,
            residual: rel.residual,
            height,
            precision_bits: prec,
        });
    }
    if c0.abs() != 1 {
        return Ok(AlgebraicWitness {
            status: WitnessStatus::NonIntegral,
            coords: None,
            relation: rel.coeffs.clone(),
            residual: rel.residual,
            height,
            precision_bits: prec,
        });
    }
    let x = -rel.coeffs[1] * c0;
    let y = -rel.coeffs[2] * c0;
    let approx = Complex::with_val(prec, &basis[1] * y) + x;
    let residual = mp::dist(&approx, &v);
    Ok(AlgebraicWitness {
        status: WitnessStatus::Integral,
        coords: Some((x, y)),
        relation: rel.coeffs,
        residual,
        height,
        precision_bits: prec,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eisenstein::lattice_point_f64;
    use crate::quadfield::Gamma0Sampler;

    fn setup(prec: u32) -> LatticeConstants {
        let o = OrderSpec::maximal(-8).unwrap();
        LatticeConstants::new(&Lattice::standard(o, prec)).unwrap()
    }

    #[test]
    fn parabolic_values() {
        let lc = setup(128);
        let o = *lc.lattice().order();
        assert!(mp::mag_f64(&phi(&Mat2::identity(&o), &lc).unwrap().value) < 1e-35);
        assert!(mp::mag_f64(&phi(&Mat2::translation(o.one()), &lc).unwrap().value) < 1e-35);
        let v = phi(&Mat2::translation(o.omega()), &lc).unwrap();
        let w = embed(&o.omega(), 128);
        let expect = Complex::with_val(128, lc.e2zero() * imag_part_i(&w));
        assert!(mp::dist(&v.value, &expect) < 1e-35);
        assert!(mp::mag_f64(&v.value) > 1.0);
        assert_eq!(v.branch, Branch::Parabolic);
    }

    #[test]
    fn pq_specializes_to_phi() {
        let lc = setup(128);
        let o = *lc.lattice().order();
        let p = lc.params();
        let z = czero(lc.working_prec());
        let mut s = Gamma0Sampler::new(o, None, 20, 3);
        for _ in 0..10 {
            let m = s.sample().unwrap();
            let a = phi(&m, &lc).unwrap().value;
            let b = phi_pq(&m, &z, &z, &lc, &p).unwrap().value;
            assert!(mp::dist(&a, &b) < 1e-28, "{m}");
        }
    }

    #[test]
    fn homomorphism_at_origin() {
        let lc = setup(128);
        let o = *lc.lattice().order();
        let mut s = Gamma0Sampler::new(o, None, 12, 9);
        for _ in 0..5 {
            let (a, b) = (s.sample().unwrap(), s.sample().unwrap());
            let lhs = phi(&(a * b), &lc).unwrap().value;
            let rhs = Complex::with_val(128, phi(&a, &lc).unwrap().value + phi(&b, &lc).unwrap().value);
            assert!(mp::dist(&lhs, &rhs) < 1e-25);
        }
    }

    #[test]
    fn cocycle_relation_generic_pq() {
        let lc = setup(128);
        let lat = lc.lattice().clone();
        let o = *lat.order();
        let params = lc.params();
        let mut s = Gamma0Sampler::new(o, None, 10, 21);
        let p = lattice_point_f64(&lat, 0.23, -0.31);
        let q = lattice_point_f64(&lat, -0.41, 0.17);
        for _ in 0..3 {
            let (a, b) = (s.sample().unwrap(), s.sample().unwrap());
            let (r, budget) = check_cocycle(&a, &b, &p, &q, None, &lc, &params).unwrap();
            assert!(r < 1e-25 && r < budget.max(1e-25), "residual {r}");
        }
    }

    #[test]
    fn level_forms_agree_at_origin_and_parabolic_branch() {
        let lc = setup(128);
        let o = *lc.lattice().order();
        let lev = Level::new(o.sqrt_neg_d()).unwrap();
        let params = lc.params();
        let z = czero(lc.working_prec());
        let mut s = Gamma0Sampler::new(o, Some(lev), 20, 4);
        for _ in 0..5 {
            let m = s.sample().unwrap();
            let r = phi_n(&m, &lev, &z, &z, &lc, &params).unwrap();
            assert!(r.forms_must_agree);
            assert!(r.gap < 1e-28, "gap {}", r.gap);
        }
        let t = Mat2::new(o.one(), o.elem(2, 1), o.zero(), o.one());
        let v = phi_n0(&t, &lev, &lc).unwrap().value;
        let nm1 = Complex::with_val(128, embed(&lev.n, 128) - 1u32);
        let r = Complex::with_val(128, embed(&t.b, 128) * &nm1);
        let expect = Complex::with_val(128, lc.e2zero() * imag_part_i(&r));
        assert!(mp::dist(&v, &expect) < 1e-30);
    }

    #[test]
    fn level_cocycle_on_torsion_pairs() {
        let lc = setup(128);
        let lat = lc.lattice().clone();
        let o = *lat.order();
        let lev = Level::new(o.sqrt_neg_d()).unwrap();
        let params = lc.params();
        let pts = level_torsion_points(&lev, &lat).unwrap();
        assert_eq!(pts.len(), 3);
        let mut s = Gamma0Sampler::new(o, Some(lev), 8, 12);
        let (a, b) = (s.sample().unwrap(), s.sample().unwrap());
        for p in &pts {
            for q in &pts {
                let (r, _) = check_cocycle(&a, &b, p, q, Some(&lev), &lc, &params).unwrap();
                assert!(r < 1e-25, "{r}");
                let f = phi_n(&a, &lev, p, q, &lc, &params).unwrap();
                assert!(f.forms_must_agree && f.gap < 1e-25);
            }
        }
    }

    #[test]
    fn integral_models() {
        assert_eq!(
            integral_invariants(8000).unwrap(),
            (Integer::from(30), Integer::from(28))
        );
        assert_eq!(
            integral_invariants(-3375).unwrap(),
            (Integer::from(35), Integer::from(-49))
        );
        let o = OrderSpec::maximal(-8).unwrap();
        let f = integral_lattice(&o, 200).unwrap();
        assert!(mp::dist(&f.g2, &Complex::with_val(200, 30)) < 1e-45);
        assert!(mp::dist(&f.g3, &Complex::with_val(200, 28)) < 1e-45);
        assert!(integral_lattice(&OrderSpec::maximal(-20).unwrap(), 64).is_err());
    }

    #[test]
    fn recognizes_parabolic_value() {
        let o = OrderSpec::maximal(-8).unwrap();
        let f = integral_lattice(&o, 220).unwrap();
        let lc = LatticeConstants::new(&f.lattice).unwrap();
        let v = phi(&Mat2::translation(o.omega()), &lc).unwrap().value;
        let w = recognize_integrality(&v, &f, 200).unwrap();
        assert_eq!(w.status, WitnessStatus::Integral, "{w:?}");
        assert!(w.residual < 1e-40);
        let zero = recognize_integrality(&czero(200), &f, 200).unwrap();
        assert_eq!(zero.coords, Some((0, 0)));
    }
}
