//! Fixed-point data of loxodromic matrices, the forms `Q_N`, the series
//! `L_N(A_N, s; p, q)`, their `s = 1` values, and the `s = 2` integral check.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use rug::{Complex, Float};
use serde::Serialize;

use crate::cocycle::phi_n;
use crate::dedekind::d_sum_pq;
use crate::eisenstein::{Lattice, LatticeConstants, SeriesParams};
use crate::error::{Error, Result};
use crate::hyperbolic::{act, Point3};
use crate::mp::{self, conj, embed, to_c64};
use crate::quadfield::{Gamma0Sampler, Level, Mat2, OrderSpec};

/// Fixed points and unit of a loxodromic `A`; `level` selects `A_N`.
#[derive(Clone, Debug)]
pub struct GeodesicData {
    pub matrix: Mat2,
    pub alpha: Complex,
    pub alpha_p: Complex,
    pub eps: Complex,
    pub eps_p: Complex,
    pub theta: i32,
    pub level: Option<Level>,
}

/// Roots of `cX² + (d−a)X − b = 0`, ordered by `Im` (then `Re`) descending.
pub fn fixed_points(m: &Mat2, prec: u32) -> Result<(Complex, Complex)> {
    if m.c.is_zero() {
        return Err(Error::Degenerate("c = 0 has a fixed point at infinity".into()));
    }
    let t = m.trace();
    let t2 = t * t;
    let o = m.order();
    if [0, 1, 4].iter().any(|k| t2 == o.elem(*k, 0)) {
        return Err(Error::Degenerate(format!("(a+d)^2 = {t2} is excluded")));
    }
    let wp = prec + 16;
    let e = |q| embed(&q, wp);
    let disc = Complex::with_val(wp, e(t2) - 4u32);
    let r = disc.sqrt();
    let two_c = Complex::with_val(wp, e(m.c) * 2u32);
    let amd = e(m.a - m.d);
    let x = Complex::with_val(prec, Complex::with_val(wp, &amd + &r) / &two_c);
    let y = Complex::with_val(prec, Complex::with_val(wp, &amd - &r) / &two_c);
    let key = |z: &Complex| (z.imag().to_f64(), z.real().to_f64());
    let (kx, ky) = (key(&x), key(&y));
    if kx.0 > ky.0 || (kx.0 == ky.0 && kx.1 >= ky.1) {
        Ok((x, y))
    } else {
        Ok((y, x))
    }
}

/// `ε = cα + d`, checking `εε′ = 1` and `|ε| ≠ 1`.
pub fn unit_of(m: &Mat2, alpha: &Complex, alpha_p: &Complex, level: Option<Level>) -> Result<GeodesicData> {
    let prec = alpha.prec().0;
    let e = |q| embed(&q, prec);
    let eps = Complex::with_val(prec, e(m.c) * alpha) + e(m.d);
    let eps_p = Complex::with_val(prec, e(m.c) * alpha_p) + e(m.d);
    let prod = Complex::with_val(prec, &eps * &eps_p);
    let tol = 2f64.powi(-(prec as i32) / 2);
    if mp::dist(&prod, &Complex::with_val(prec, 1)) > tol {
        return Err(Error::Degenerate("ε·ε′ ≠ 1".into()));
    }
    let a = mp::mag_f64(&eps);
    if (a - 1.0).abs() < 1e-6 {
        return Err(Error::Degenerate("|ε| = 1: not loxodromic".into()));
    }
    if let Some(l) = &level {
        if !m.in_gamma0(l) {
            return Err(Error::NotInGamma0);
        }
    }
    Ok(GeodesicData {
        matrix: *m,
        alpha: alpha.clone(),
        alpha_p: alpha_p.clone(),
        eps,
        eps_p,
        theta: if a > 1.0 { 1 } else { -1 },
        level,
    })
}

pub fn geodesic_data(m: &Mat2, level: Option<Level>, prec: u32) -> Result<GeodesicData> {
    let (a, b) = fixed_points(m, prec)?;
    unit_of(m, &a, &b, level)
}

impl GeodesicData {
    pub fn prec(&self) -> u32 {
        self.alpha.prec().0
    }

    /// `N`, or 1 without a level.
    pub fn n(&self) -> Complex {
        let p = self.prec();
        match &self.level {
            Some(l) => embed(&l.n, p),
            None => Complex::with_val(p, 1),
        }
    }

    /// `A_N`, or `A` without a level.
    pub fn smeared(&self) -> Result<Mat2> {
        match &self.level {
            Some(l) => self.matrix.smear(l),
            None => Ok(self.matrix),
        }
    }

    /// The same data for `A⁻¹`.
    pub fn inverse(&self) -> Result<GeodesicData> {
        geodesic_data(&self.matrix.inverse()?, self.level, self.prec())
    }

    fn f64_view(&self) -> Geo64 {
        let eps2 = mp::mag_f64(&self.eps).powi(2);
        Geo64 {
            alpha: to_c64(&self.alpha),
            alpha_p: to_c64(&self.alpha_p),
            n: to_c64(&self.n()),
            log_eps2: eps2.ln(),
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Geo64 {
    alpha: C64,
    alpha_p: C64,
    n: C64,
    log_eps2: f64,
}

impl Geo64 {
    fn mus(&self, m: C64, n: C64) -> (C64, C64) {
        let mn = m * self.n;
        (mn * self.alpha + n, mn * self.alpha_p + n)
    }

    /// Position of `μ/μ′` in units of one `ε`-step; the window is `[0, 1)`.
    /// Values within 1e-9 of an integer are snapped so boundary points go
    /// to the lower end deterministically.
    fn rho(&self, mu: C64, mu_p: C64) -> f64 {
        let r = (mu.norm() / mu_p.norm()).ln() / self.log_eps2.abs();
        if (r - r.round()).abs() < 1e-9 {
            r.round()
        } else {
            r
        }
    }
}

/// `Q_N(m, n) = (mNα + n)(mNα′ + n)`.
pub fn q_form(m: &Complex, n: &Complex, data: &GeodesicData) -> Complex {
    let p = data.prec();
    let mn = Complex::with_val(p, m * data.n());
    let x = Complex::with_val(p, &mn * &data.alpha) + n;
    let y = Complex::with_val(p, &mn * &data.alpha_p) + n;
    x * y
}

/// Whether `(p, q)A ≡ (p, q)` and `(p, q)A_N ≡ (p, q)` modulo `L²`.
pub fn check_assumptions(data: &GeodesicData, lat: &Lattice, p: &Complex, q: &Complex) -> Result<()> {
    let prec = lat.prec();
    for m in [data.matrix, data.smeared()?] {
        let e = |x| embed(&x, prec);
        let ps = Complex::with_val(prec, e(m.a) * p) + Complex::with_val(prec, e(m.c) * q);
        let qs = Complex::with_val(prec, e(m.b) * p) + Complex::with_val(prec, e(m.d) * q);
        let ok = lat.contains(&Complex::with_val(prec, ps - p)) && lat.contains(&Complex::with_val(prec, qs - q));
        if !ok {
            return Err(Error::Domain(format!("(p, q) is not fixed modulo L^2 by {m}")));
        }
    }
    Ok(())
}

/// Points of `L + p` with `|x| ≤ r`, sorted by norm.
fn shifted_points(lat: &Lattice, p: C64, r: f64) -> Vec<C64> {
    let w1 = to_c64(lat.w1());
    let w2 = to_c64(lat.w2());
    let area = lat.area().to_f64();
    let b1 = ((r + p.norm()) * w2.norm() / area).ceil() as i64 + 1;
    let b2 = ((r + p.norm()) * w1.norm() / area).ceil() as i64 + 1;
    let mut out = Vec::new();
    for i in -b1..=b1 {
        for j in -b2..=b2 {
            let x = p + w1 * i as f64 + w2 * j as f64;
            if x.norm() <= r {
                out.push(x);
            }
        }
    }
    out.sort_by(|a, b| a.norm_sqr().total_cmp(&b.norm_sqr()));
    out
}

/// Visit every nonzero `(m, n) ∈ (L+p) × (L+q)` with `|m|² + |n|² ≤ r²`,
/// summing a per-pair vector of `k` contributions in a fixed order.
fn pair_sum<F>(lat: &Lattice, p: C64, q: C64, r: f64, k: usize, f: F) -> (Vec<C64>, usize)
where
    F: Fn(C64, C64, &mut [C64]) + Sync,
{
    let ms = shifted_points(lat, p, r);
    let ns = shifted_points(lat, q, r);
    let r2 = r * r;
    let parts: Vec<(Vec<C64>, usize)> = ms
        .par_iter()
        .map(|&m| {
            let mut acc = vec![C64::new(0.0, 0.0); k];
            let mut cnt = 0;
            let left = r2 - m.norm_sqr();
            for &n in &ns {
                if n.norm_sqr() > left {
                    break;
                }
                if m.norm_sqr() + n.norm_sqr() == 0.0 {
                    continue;
                }
                f(m, n, &mut acc);
                cnt += 1;
            }
            (acc, cnt)
        })
        .collect();
    let mut tot = vec![C64::new(0.0, 0.0); k];
    let mut cnt = 0;
    for (v, c) in parts {
        for (t, x) in tot.iter_mut().zip(v) {
            *t += x;
        }
        cnt += c;
    }
    (tot, cnt)
}

fn to_c64_pair(p: &Complex, q: &Complex) -> (C64, C64) {
    (to_c64(p), to_c64(q))
}

/// `ε`-inequivalent representatives: pairs with `μ_N/μ′_N` in the window.
#[derive(Clone, Debug)]
pub struct OrbitSet {
    pub p: C64,
    pub q: C64,
    pub radius: f64,
    pub scanned: usize,
    pub reps: Vec<(C64, C64)>,
}

pub fn orbit_reps(data: &GeodesicData, lat: &Lattice, p: &Complex, q: &Complex, radius: f64) -> Result<OrbitSet> {
    check_assumptions(data, lat, p, q)?;
    let g = data.f64_view();
    let (pc, qc) = to_c64_pair(&lat.reduce(p).x, &lat.reduce(q).x);
    let ms = shifted_points(lat, pc, radius);
    let ns = shifted_points(lat, qc, radius);
    let mut reps = Vec::new();
    let mut scanned = 0;
    for &m in &ms {
        for &n in &ns {
            if m.norm_sqr() + n.norm_sqr() > radius * radius {
                break;
            }
            if m.norm_sqr() + n.norm_sqr() == 0.0 {
                continue;
            }
            scanned += 1;
            let (mu, mu_p) = g.mus(m, n);
            let r = g.rho(mu, mu_p);
            if (0.0..1.0).contains(&r) {
                reps.push((m, n));
            }
        }
    }
    Ok(OrbitSet {
        p: pc,
        q: qc,
        radius,
        scanned,
        reps,
    })
}

/// Right action `(m, n) ↦ (m, n)A_N` on complex pairs.
pub fn act_pair(data: &GeodesicData, m: C64, n: C64) -> Result<(C64, C64)> {
    let a = data.smeared()?;
    let e = |x: crate::quadfield::QuadInt| x.to_c64();
    Ok((m * e(a.a) + n * e(a.c), m * e(a.b) + n * e(a.d)))
}

#[derive(Clone, Debug, Serialize)]
pub struct LDirect {
    pub value: (f64, f64),
    pub half_radius_value: (f64, f64),
    pub tail_estimate: f64,
    pub reps: usize,
    pub radius: f64,
}

/// Truncated `Σ″ conj(Q_N)/|Q_N|^{2s}` over window representatives.
pub fn l_direct(
    data: &GeodesicData,
    lat: &Lattice,
    s: C64,
    p: &Complex,
    q: &Complex,
    radius: f64,
) -> Result<LDirect> {
    if s.re < 1.6 {
        return Err(Error::Domain(format!("Re(s) = {} is outside the convergent region", s.re)));
    }
    let set = orbit_reps(data, lat, p, q, radius)?;
    let g = data.f64_view();
    let term = |m: C64, n: C64| {
        let (mu, mu_p) = g.mus(m, n);
        let qv = mu * mu_p;
        qv.conj() * (-(2.0 * s) * qv.norm().ln()).exp()
    };
    let half2 = radius * radius / 4.0;
    let mut full = C64::new(0.0, 0.0);
    let mut half = C64::new(0.0, 0.0);
    for &(m, n) in &set.reps {
        let t = term(m, n);
        full += t;
        if m.norm_sqr() + n.norm_sqr() <= half2 {
            half += t;
        }
    }
    // terms ~ |x|^{2−4s} over a 4-dimensional cone: tail ~ R^{6−4s}
    let beta = 4.0 * s.re - 6.0;
    let tail = 10.0 * (full - half).norm() / (2f64.powf(beta) - 1.0);
    Ok(LDirect {
        value: (full.re, full.im),
        half_radius_value: (half.re, half.im),
        tail_estimate: tail,
        reps: set.reps.len(),
        radius,
    })
}

/// Values at `s = 1` from the cocycle and the cross-check against module `cocycle`.
#[derive(Clone, Debug)]
pub struct LClosed {
    /// `L_N(A_N, 1; p, q)`.
    pub l_n: Complex,
    /// `L(A, 1; p, q)`.
    pub l: Complex,
    /// `θ(α−α′)(N·L_N − L)`.
    pub phi_n: Complex,
    pub phi_n_cocycle: Complex,
    pub cross_check: f64,
    /// `θ(α−α′)L_N` from the printed form with `E₂(p)`, unconjugated `N`, and `(1/N)D`.
    pub printed_form: Complex,
    pub printed_gap: f64,
}

pub fn l_closed_s1(
    data: &GeodesicData,
    p: &Complex,
    q: &Complex,
    lc: &LatticeConstants,
    params: &SeriesParams,
) -> Result<LClosed> {
    let lat = lc.lattice();
    check_assumptions(data, lat, p, q)?;
    let wp = lc.working_prec();
    let prec = lc.prec();
    let m = data.matrix;
    let p = lat.reduce(p).x;
    let q = lat.reduce(q).x;
    let e = |x| embed(&x, wp);
    let n = match &data.level {
        Some(l) => e(l.n),
        None => Complex::with_val(wp, 1),
    };
    let cn = data.smeared()?.c;
    let w = Complex::with_val(wp, &data.alpha - &data.alpha_p) * data.theta;
    let r = Complex::with_val(wp, e(m.trace()) / e(m.c));
    let rn = Complex::with_val(wp, &r * &n);
    let ep = lc.e_aux(&p, params);
    let e0e2 = Complex::with_val(wp, lc.e0(&p) * lc.e2(&q));
    let side = |r: &Complex, c| -> Result<Complex> {
        let mut v = -Complex::with_val(wp, conj(r) * &ep);
        v -= Complex::with_val(wp, r * &e0e2);
        v -= d_sum_pq(&m.a, &c, &p, &q, lc)?;
        Ok(v)
    };
    let theta_nl = side(&rn, cn)?;
    let theta_l = side(&r, m.c)?;
    let l_n = Complex::with_val(prec, Complex::with_val(wp, &theta_nl / &w) / &n);
    let l = Complex::with_val(prec, &theta_l / &w);
    let phi_val = Complex::with_val(prec, &theta_nl - &theta_l);
    let phi_n_cocycle = match &data.level {
        Some(lev) => phi_n(&m, lev, &p, &q, lc, params)?.value.value,
        None => mp::czero(prec),
    };
    let cross_check = mp::dist(&phi_val, &phi_n_cocycle);

    let mut printed = -Complex::with_val(wp, conj(&r) * lc.e2(&p));
    printed -= Complex::with_val(wp, &r * &e0e2);
    printed -= Complex::with_val(wp, d_sum_pq(&m.a, &cn, &p, &q, lc)? / &n);
    let printed_form = Complex::with_val(prec, printed);
    let lhs = Complex::with_val(prec, &w * &l_n);
    let printed_gap = mp::dist(&printed_form, &lhs);
    Ok(LClosed {
        l_n,
        l,
        phi_n: phi_val,
        phi_n_cocycle,
        cross_check,
        printed_form,
        printed_gap,
    })
}

/// `u_N(t) = N·u(t)` on the axis of `A_N`, `u(t) = (αt² + α′)/(t² + 1) + j|α − α′|t/(t² + 1)`.
#[derive(Clone, Debug)]
pub struct GeodesicPath {
    pub data: GeodesicData,
}

impl GeodesicPath {
    pub fn new(data: GeodesicData) -> Self {
        GeodesicPath { data }
    }

    pub fn base(&self, t: &Float) -> Point3 {
        let p = self.data.prec();
        let t2 = Float::with_val(p, t.square_ref());
        let den = Float::with_val(p, &t2 + 1u32);
        let z = (Complex::with_val(p, &self.data.alpha * &t2) + &self.data.alpha_p) / &den;
        let d = Complex::with_val(p, &self.data.alpha - &self.data.alpha_p);
        let v = Float::with_val(p, d.abs_ref()) * t / &den;
        Point3 { z, v }
    }

    pub fn at(&self, t: &Float) -> Point3 {
        self.base(t).scale(&self.data.n())
    }

    /// `|A_N u_N(1) − u_N(|ε|²)|`.
    pub fn endpoint_residual(&self) -> Result<f64> {
        let p = self.data.prec();
        let one = Float::with_val(p, 1);
        let e2 = Float::with_val(p, self.data.eps.abs_ref()).square();
        let a = act(&self.data.smeared()?, &self.at(&one));
        Ok(a.dist_to(&self.at(&e2)))
    }
}

// ---- the s = 2 integral check ---------------------------------------------

/// C^∞ step from 0 (x ≤ 0) to 1 (x ≥ 1).
fn smooth_step(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / x).exp();
        let b = (-1.0 / (1.0 - x)).exp();
        a / (a + b)
    }
}

/// Radial cutoff: 1 on `|x| ≤ R/2`, 0 beyond `R`.
fn cutoff(r: f64, big: f64) -> f64 {
    1.0 - smooth_step(2.0 * r / big - 1.0)
}

/// Gauss–Legendre nodes and weights on `[−1, 1]`.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

fn gamma_f64(x: f64) -> f64 {
    Float::with_val(64, x).gamma().to_f64()
}

#[derive(Clone, Debug, Serialize)]
pub struct IntegralCheck {
    pub s: f64,
    pub integral: (f64, f64),
    pub closed: (f64, f64),
    pub residual: f64,
    /// Size of the radius extrapolation on each side, relative to the value.
    pub tail_integral: f64,
    pub tail_closed: f64,
    pub quadrature_nodes: usize,
    pub quadrature_error: f64,
    pub pairs: usize,
}

/// Compare the path integral of the expanded integrand over `t ∈ [1, |ε|²]`
/// with `2N^{s+1}θ(α−α′)|α−α′|^s Σ″ conj(Q_N)/|Q_N|^{s+2} · Γ((s+2)/2)²/(2Γ(s+2))`.
///
/// Both lattice sums use a smooth radial cutoff at radii `R` and `R/2`; the
/// summands are homogeneous of degree `−2s−2`, so the truncation error is
/// `C·R^{2−2s}` and is removed by extrapolation. The orbit sum uses a smooth
/// `ε`-partition of unity in place of the sharp window.
pub fn integral_check(
    data: &GeodesicData,
    lat: &Lattice,
    s: f64,
    p: &Complex,
    q: &Complex,
    radius: f64,
) -> Result<IntegralCheck> {
    if s <= 1.0 {
        return Err(Error::Domain(format!("s = {s} is outside the convergent region")));
    }
    check_assumptions(data, lat, p, q)?;
    let g = data.f64_view();
    let (pc, qc) = to_c64_pair(&lat.reduce(p).x, &lat.reduce(q).x);
    let d = g.alpha - g.alpha_p;
    let dabs = d.norm();
    let ns = g.n.powf(s);
    let extrap = |full: C64, half: C64| full + (full - half) / (2f64.powf(2.0 * s - 2.0) - 1.0);

    // quadrature in τ = ln t over [0, ln|ε|²]
    let run = |nodes: usize| -> (C64, f64, usize) {
        let gl = gauss_legendre(nodes);
        let h = g.log_eps2 / 2.0;
        let ts: Vec<(f64, f64)> = gl.iter().map(|&(x, w)| (((x + 1.0) * h).exp(), w * h)).collect();
        let k = ts.len();
        let (sums, cnt) = pair_sum(lat, pc, qc, radius, 2 * k, |m, n, acc| {
            let r = (m.norm_sqr() + n.norm_sqr()).sqrt();
            let (wf, wh) = (cutoff(r, radius), cutoff(r, radius / 2.0));
            if wf == 0.0 {
                return;
            }
            let mm = m * g.n;
            for (i, &(t, w)) in ts.iter().enumerate() {
                let t2 = t * t;
                let z = (g.alpha * t2 + g.alpha_p) / (t2 + 1.0);
                let v = dabs * t / (t2 + 1.0);
                let zz = (mm * z + n).conj();
                let mv = mm.conj() * v;
                let br = zz * zz * d * t + zz * mv * dabs * (1.0 - t2) - mv * mv * d.conj() * t;
                let den = (mm * z + n).norm_sqr() + mm.norm_sqr() * v * v;
                let f = br * den.powf(-s - 2.0) * v.powf(s) / ((1.0 + t2) * (1.0 + t2));
                // dt = t dτ
                let c = f * (w * t);
                acc[i] += c * wf;
                acc[k + i] += c * wh;
            }
        });
        let full: C64 = sums[..k].iter().sum();
        let half: C64 = sums[k..].iter().sum();
        let pref = g.n * ns * 2.0;
        let val = extrap(full, half) * pref;
        (val, ((full - half) * pref).norm(), cnt)
    };
    let mut nodes = 24;
    let (mut integral, mut shift, mut pairs) = run(nodes);
    let mut qerr = f64::INFINITY;
    while nodes <= 192 {
        let (v2, s2, c2) = run(nodes * 2);
        qerr = (v2 - integral).norm() / v2.norm();
        integral = v2;
        shift = s2;
        pairs = c2;
        nodes *= 2;
        if qerr < 1e-9 {
            break;
        }
    }
    if qerr > 1e-6 {
        return Err(Error::Quadrature(format!("relative change {qerr:.2e} at {nodes} nodes")));
    }

    let (sums, _) = pair_sum(lat, pc, qc, radius, 2, |m, n, acc| {
        let r = (m.norm_sqr() + n.norm_sqr()).sqrt();
        let (wf, wh) = (cutoff(r, radius), cutoff(r, radius / 2.0));
        if wf == 0.0 {
            return;
        }
        let (mu, mu_p) = g.mus(m, n);
        let rho = g.rho(mu, mu_p);
        let part = smooth_step(rho + 1.0) - smooth_step(rho);
        if part == 0.0 {
            return;
        }
        let qv = mu * mu_p;
        let t = qv.conj() * qv.norm().powf(-s - 2.0) * part;
        acc[0] += t * wf;
        acc[1] += t * wh;
    });
    let beta = gamma_f64((s + 2.0) / 2.0).powi(2) / (2.0 * gamma_f64(s + 2.0));
    let pref = g.n * ns * 2.0 * d * dabs.powf(s) * data.theta as f64 * beta;
    let closed = extrap(sums[0], sums[1]) * pref;
    let closed_shift = ((sums[0] - sums[1]) * pref).norm();
    let residual = (integral - closed).norm() / closed.norm();
    Ok(IntegralCheck {
        s,
        integral: (integral.re, integral.im),
        closed: (closed.re, closed.im),
        residual,
        tail_integral: shift / integral.norm(),
        tail_closed: closed_shift / closed.norm(),
        quadrature_nodes: nodes,
        quadrature_error: qerr,
        pairs,
    })
}

/// Seeded sampler of loxodromic matrices in `Γ₀(N)` with usable geodesic data.
pub struct AdmissibleSampler {
    inner: Gamma0Sampler,
    level: Option<Level>,
    prec: u32,
}

impl AdmissibleSampler {
    pub fn new(order: OrderSpec, level: Option<Level>, height: i64, seed: u64, prec: u32) -> Self {
        AdmissibleSampler {
            inner: Gamma0Sampler::new(order, level, height, seed),
            level,
            prec,
        }
    }

    pub fn sample(&mut self) -> Result<GeodesicData> {
        for _ in 0..crate::quadfield::MAX_SAMPLING_ATTEMPTS {
            let m = self.inner.sample()?;
            if let Ok(d) = geodesic_data(&m, self.level, self.prec) {
                return Ok(d);
            }
        }
        Err(Error::Sampling(crate::quadfield::MAX_SAMPLING_ATTEMPTS))
    }
}
