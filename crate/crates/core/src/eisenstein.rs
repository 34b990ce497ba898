//! Kronecker–Eisenstein series of a lattice, the auxiliary series `E(x)`,
//! and the harmonic lift `H` on hyperbolic 3-space.
//!
//! Two independent evaluators are provided for `E₁`, `E₂` and `E`:
//!
//! * `Fast`: Jacobi theta quotients on the normalized lattice `Zτ + Z`
//!   plus the non-holomorphic area correction, then rescaled;
//! * `Reference`: the Hecke-regularized lattice sum continued by an Ewald
//!   split into two incomplete-gamma series over the lattice and its dual.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use rug::ops::Pow;
use rug::{Complex, Float};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyperbolic::Point3;
use crate::mp::{self, conj, cx, czero, embed, norm2, DecimalComplex, GUARD_BITS};
use crate::quadfield::{OrderSpec, QuadInt};
use crate::special::{bessel_k1, gamma_upper};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Evaluator {
    Reference,
    Fast,
}

/// Additive character and dual lattice used in the Fourier–Bessel series
/// of `H`. Only the trace-dual normalization is implemented; it is the one
/// pinned by the transformation law.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HConvention {
    /// `e(w) = exp(2πi(w + w̄))` with `L′ = {n : 2 Re(n·L) ⊂ Z}`.
    TraceDual,
}

#[derive(Clone, Debug)]
pub struct SeriesParams {
    /// Working precision in bits.
    pub prec: u32,
    /// Absolute error target for truncated series.
    pub target_error: f64,
    /// Override for the Fourier–Bessel truncation radius in `|γ|`.
    pub truncation_radius: Option<f64>,
    pub evaluator: Evaluator,
    /// Smallest admissible height `v` for `H`.
    pub min_height: f64,
}

/// Safety factor applied to every tail bound.
const TAIL_SAFETY: f64 = 1e5;

/// Largest norm the `H` divisor table is allowed to reach.
const MAX_H_NORM: i64 = 4_000_000;

impl SeriesParams {
    pub fn new(prec: u32) -> Self {
        SeriesParams {
            prec,
            target_error: 2f64.powi(-(prec as i32)),
            truncation_radius: None,
            evaluator: Evaluator::Fast,
            min_height: 0.02,
        }
    }

    pub fn with_target(mut self, target: f64) -> Self {
        self.target_error = target;
        self
    }

    pub fn with_evaluator(mut self, evaluator: Evaluator) -> Self {
        self.evaluator = evaluator;
        self
    }

    pub fn with_min_height(mut self, v: f64) -> Self {
        self.min_height = v;
        self
    }

    /// `−ln` of the target after the safety factor.
    fn target_nats(&self) -> f64 {
        -(self.target_error / TAIL_SAFETY).max(1e-4000f64.max(f64::MIN_POSITIVE)).ln()
    }
}

/// A lattice `L = λ·O` with basis `w₁ = λω`, `w₂ = λ`.
#[derive(Clone, Debug)]
pub struct Lattice {
    order: OrderSpec,
    lambda: Complex,
    w1: Complex,
    w2: Complex,
    area: Float,
    prec: u32,
}

/// A point of `ℂ` reduced modulo `L`.
#[derive(Clone, Debug)]
pub struct Reduced {
    pub x: Complex,
    pub in_lattice: bool,
}

impl Lattice {
    pub fn standard(order: OrderSpec, prec: u32) -> Self {
        Self::scaled(order, Complex::with_val(prec, 1))
    }

    pub fn scaled(order: OrderSpec, lambda: Complex) -> Self {
        let prec = lambda.prec().0;
        let w = mp::omega(&order, prec);
        let w1 = Complex::with_val(prec, &lambda * &w);
        let w2 = lambda.clone();
        let area = Float::with_val(prec, (Complex::with_val(prec, &w1 * conj(&w2))).imag());
        Lattice {
            order,
            lambda,
            w1,
            w2,
            area,
            prec,
        }
    }

    pub fn order(&self) -> &OrderSpec {
        &self.order
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn lambda(&self) -> &Complex {
        &self.lambda
    }

    pub fn w1(&self) -> &Complex {
        &self.w1
    }

    pub fn w2(&self) -> &Complex {
        &self.w2
    }

    /// Covolume `Im(w₁·w̄₂)`.
    pub fn area(&self) -> &Float {
        &self.area
    }

    /// `D(L) = w₁w̄₂ − w̄₁w₂ = 2i·area`.
    pub fn pairing(&self) -> Complex {
        let p = self.prec;
        Complex::with_val(p, &self.w1 * conj(&self.w2)) - Complex::with_val(p, conj(&self.w1) * &self.w2)
    }

    /// The lattice point `λ·q`.
    pub fn point(&self, q: &QuadInt) -> Complex {
        Complex::with_val(self.prec, &self.lambda * embed(q, self.prec))
    }

    /// Real coordinates `(s, t)` with `x = s·w₁ + t·w₂`.
    pub fn coords(&self, x: &Complex) -> (Float, Float) {
        let p = self.prec;
        let s = Float::with_val(p, Complex::with_val(p, x * conj(&self.w2)).imag()) / &self.area;
        let t = -Float::with_val(p, Complex::with_val(p, x * conj(&self.w1)).imag()) / &self.area;
        (s, t)
    }

    pub fn from_coords(&self, s: &Float, t: &Float) -> Complex {
        let p = self.prec;
        Complex::with_val(p, &self.w1 * s) + Complex::with_val(p, &self.w2 * t)
    }

    fn membership_tol(&self) -> f64 {
        2f64.powi(-((self.prec as i32) * 3 / 4))
    }

    /// Reduce into the centered fundamental parallelogram.
    pub fn reduce(&self, x: &Complex) -> Reduced {
        let (s, t) = self.coords(x);
        let rs = Float::with_val(self.prec, s.round_ref());
        let rt = Float::with_val(self.prec, t.round_ref());
        let ds = Float::with_val(self.prec, &s - &rs);
        let dt = Float::with_val(self.prec, &t - &rt);
        let tol = self.membership_tol();
        let in_lattice = ds.to_f64().abs() < tol && dt.to_f64().abs() < tol;
        let x0 = if in_lattice {
            czero(self.prec)
        } else {
            self.from_coords(&ds, &dt)
        };
        Reduced { x: x0, in_lattice }
    }

    pub fn contains(&self, x: &Complex) -> bool {
        self.reduce(x).in_lattice
    }

    /// The trace dual `L′ = conj(iλ/(2·area))·O`.
    pub fn trace_dual(&self) -> Lattice {
        let p = self.prec;
        let mu = Complex::with_val(p, &self.lambda * Complex::with_val(p, (0, 1))) / Float::with_val(p, &self.area * 2u32);
        Lattice::scaled(self.order, conj(&mu))
    }

    /// Points `w ∈ L` with `|w − center| ≤ radius`, in a fixed order.
    fn points_near(&self, center: &Complex, radius: f64) -> Vec<(i64, i64)> {
        let a = self.area.to_f64();
        let c = mp::mag_f64(center);
        let bi = ((radius + c) * mp::mag_f64(&self.w2) / a).ceil() as i64 + 1;
        let bj = ((radius + c) * mp::mag_f64(&self.w1) / a).ceil() as i64 + 1;
        let w1 = mp::to_c64(&self.w1);
        let w2 = mp::to_c64(&self.w2);
        let c = mp::to_c64(center);
        let mut out = Vec::new();
        for i in -bi..=bi {
            for j in -bj..=bj {
                let w = w1 * i as f64 + w2 * j as f64;
                if (w - c).norm() <= radius {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

/// Divisor data for the Fourier–Bessel series of `H`.
#[derive(Debug)]
struct HTable {
    nmax: i64,
    /// `(γ, N(γ)·Σ_{μ|γ} μ̄²/N(μ))`, sorted by norm then coordinates.
    entries: Vec<(QuadInt, QuadInt)>,
}

fn elements_up_to_norm(order: &OrderSpec, nmax: i64) -> Vec<QuadInt> {
    let t = order.omega_trace() as f64;
    let n = order.omega_norm() as f64;
    let ybound = (nmax as f64 / (n - t * t / 4.0)).sqrt().floor() as i64 + 1;
    let mut out = Vec::new();
    for y in -ybound..=ybound {
        let center = -t * y as f64 / 2.0;
        let r = (nmax as f64).sqrt() + 1.0;
        let lo = (center - r).floor() as i64;
        let hi = (center + r).ceil() as i64;
        for x in lo..=hi {
            let e = order.elem(x, y);
            if !e.is_zero() && e.norm() <= nmax {
                out.push(e);
            }
        }
    }
    out.sort_by_key(|e| (e.norm(), e.x, e.y));
    out
}

impl HTable {
    fn build(order: &OrderSpec, nmax: i64) -> HTable {
        let elems = elements_up_to_norm(order, nmax);
        let mut sums: HashMap<(i64, i64), QuadInt> = HashMap::new();
        for mu in &elems {
            let nm = mu.norm();
            let limit = nmax / nm;
            let mubar2 = mu.conj() * mu.conj();
            for nu in elems.iter().take_while(|e| e.norm() <= limit) {
                let g = *mu * *nu;
                let add = mubar2.scale(nu.norm());
                sums.entry((g.x, g.y))
                    .and_modify(|s| *s = *s + add)
                    .or_insert(add);
            }
        }
        let mut entries: Vec<(QuadInt, QuadInt)> = sums
            .into_iter()
            .map(|((x, y), s)| (order.elem(x, y), s))
            .collect();
        entries.sort_by_key(|(g, _)| (g.norm(), g.x, g.y));
        HTable { nmax, entries }
    }
}

/// Cacheable part of [`LatticeConstants`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantsSnapshot {
    pub disc: i64,
    pub conductor: i64,
    pub lambda: DecimalComplex,
    pub prec: u32,
    pub e2zero: DecimalComplex,
    pub g2: DecimalComplex,
    pub g3: DecimalComplex,
    pub convention: HConvention,
}

/// Per-lattice analytic constants shared by every evaluator.
#[derive(Debug)]
pub struct LatticeConstants {
    lattice: Lattice,
    /// `Z + Zτ` at working precision, for reducing normalized arguments.
    unit: Lattice,
    /// Working precision (requested plus guard bits).
    wp: u32,
    prec: u32,
    e2zero: Complex,
    g2: Complex,
    g3: Complex,
    tau: Complex,
    im_tau: Float,
    /// `q^{(n+1/2)²}` with `q = e^{iπτ}`.
    nome: Vec<Complex>,
    lambda_inv: Complex,
    pi: Float,
    /// Truncation radii of the direct and dual Ewald series.
    direct_radius: f64,
    dual_radius: f64,
    convention: HConvention,
    h_table: Mutex<Option<Arc<HTable>>>,
}

impl LatticeConstants {
    pub fn new(lattice: &Lattice) -> Result<Self> {
        let mut lc = Self::skeleton(lattice.order(), lattice.lambda(), lattice.prec());
        lc.e2zero = lc.compute_e2zero();
        let (g2, g3) = lc.compute_g2_g3();
        lc.g2 = g2;
        lc.g3 = g3;
        Ok(lc)
    }

    fn skeleton(order: &OrderSpec, lambda: &Complex, prec: u32) -> Self {
        let wp = prec + GUARD_BITS;
        let lat = Lattice::scaled(*order, Complex::with_val(wp, lambda));
        let pi = mp::pi(wp);
        let tau = mp::omega(order, wp);
        let im_tau = Float::with_val(wp, tau.imag());
        let bits_nats = (wp as f64 + 16.0) * std::f64::consts::LN_2;
        // (n+½)² − (n+½) > bits / (π Im τ)
        let need = 0.25 + bits_nats / (std::f64::consts::PI * im_tau.to_f64());
        let nterms = need.sqrt().ceil() as usize + 3;
        let ipi_tau = Complex::with_val(wp, &tau * &pi).mul_i(false);
        let nome: Vec<Complex> = (0..nterms)
            .map(|n| {
                let e = (n as f64 + 0.5).powi(2);
                Complex::with_val(wp, &ipi_tau * Float::with_val(wp, e)).exp()
            })
            .collect();
        let lambda_inv = Complex::with_val(wp, lat.lambda().recip_ref());
        let area = lat.area().to_f64();
        let direct_radius = (area * (bits_nats + 10.0) / std::f64::consts::PI).sqrt();
        let dual_radius = ((bits_nats + 10.0) / (std::f64::consts::PI * area)).sqrt();
        LatticeConstants {
            lattice: lat,
            unit: Lattice::standard(*order, wp),
            wp,
            prec,
            e2zero: czero(wp),
            g2: czero(wp),
            g3: czero(wp),
            tau,
            im_tau,
            nome,
            lambda_inv,
            pi,
            direct_radius,
            dual_radius,
            convention: HConvention::TraceDual,
            h_table: Mutex::new(None),
        }
    }

    /// Persistable constants (`E₂(0)`, `g₂`, `g₃`, and the `H` convention).
    pub fn snapshot(&self) -> ConstantsSnapshot {
        let o = self.lattice.order();
        ConstantsSnapshot {
            disc: o.field_disc(),
            conductor: o.conductor(),
            lambda: DecimalComplex::from_complex(self.lattice.lambda()),
            prec: self.prec,
            e2zero: DecimalComplex::from_complex(&self.e2zero),
            g2: DecimalComplex::from_complex(&self.g2),
            g3: DecimalComplex::from_complex(&self.g3),
            convention: self.convention,
        }
    }

    /// Rebuild from a snapshot, skipping the constant computations.
    pub fn from_snapshot(snap: &ConstantsSnapshot) -> Result<Self> {
        let order = OrderSpec::with_conductor(snap.disc, snap.conductor, true)?;
        let wp = snap.prec + GUARD_BITS;
        let lambda = snap.lambda.to_complex(wp)?;
        let mut lc = Self::skeleton(&order, &lambda, snap.prec);
        lc.e2zero = snap.e2zero.to_complex(wp)?;
        lc.g2 = snap.g2.to_complex(wp)?;
        lc.g3 = snap.g3.to_complex(wp)?;
        lc.convention = snap.convention;
        Ok(lc)
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn working_prec(&self) -> u32 {
        self.wp
    }

    /// `E₂(0)`, the Hecke-regularized `Σ′ w⁻²`.
    pub fn e2zero(&self) -> &Complex {
        &self.e2zero
    }

    pub fn pairing(&self) -> Complex {
        self.lattice.pairing()
    }

    pub fn area(&self) -> &Float {
        self.lattice.area()
    }

    pub fn dual(&self) -> Lattice {
        self.lattice.trace_dual()
    }

    pub fn g2(&self) -> &Complex {
        &self.g2
    }

    pub fn g3(&self) -> &Complex {
        &self.g3
    }

    pub fn convention(&self) -> HConvention {
        self.convention
    }

    pub fn truncation_radii(&self) -> (f64, f64) {
        (self.direct_radius, self.dual_radius)
    }

    pub fn params(&self) -> SeriesParams {
        SeriesParams::new(self.prec)
    }

    /// Round a working-precision value to the requested precision.
    fn out(&self, z: Complex) -> Complex {
        Complex::with_val(self.prec, z)
    }

    // ---- fast evaluator -------------------------------------------------

    fn compute_e2zero(&self) -> Complex {
        let wp = self.wp;
        // G₂ = −(π²/3)·θ₁'''(0)/θ₁'(0) on Zτ + Z
        let mut d1 = czero(wp);
        let mut d3 = czero(wp);
        for (n, qn) in self.nome.iter().enumerate() {
            let k = (2 * n + 1) as u32;
            let sgn: i64 = if n % 2 == 0 { 1 } else { -1 };
            d1 += Complex::with_val(wp, qn * (sgn * k as i64));
            d3 -= Complex::with_val(wp, qn * (sgn * (k * k * k) as i64));
        }
        let pi2 = Float::with_val(wp, self.pi.square_ref());
        let g2 = -Complex::with_val(wp, &d3 / &d1) * pi2 / 3u32;
        let s2 = g2 - Float::with_val(wp, &self.pi / &self.im_tau);
        let l2 = Complex::with_val(wp, self.lambda_inv.square_ref());
        Complex::with_val(wp, s2 * l2)
    }

    fn compute_g2_g3(&self) -> (Complex, Complex) {
        let wp = self.wp;
        let q = Complex::with_val(wp, &self.tau * Float::with_val(wp, &self.pi * 2u32))
            .mul_i(false)
            .exp();
        let mut s3 = czero(wp);
        let mut s5 = czero(wp);
        let mut qn = q.clone();
        let eps = Float::with_val(wp, Float::i_exp(1, -(wp as i32) - 20));
        let mut n: u64 = 1;
        loop {
            let (mut d3, mut d5) = (0u128, 0u128);
            for k in 1..=n {
                if n % k == 0 {
                    d3 += (k as u128).pow(3);
                    d5 += (k as u128).pow(5);
                }
            }
            s3 += Complex::with_val(wp, &qn * Float::with_val(wp, d3 as f64));
            s5 += Complex::with_val(wp, &qn * Float::with_val(wp, d5 as f64));
            let mag = Float::with_val(wp, qn.abs_ref()) * Float::with_val(wp, d5 as f64);
            if mag < eps {
                break;
            }
            qn *= &q;
            n += 1;
        }
        let pi4 = Float::with_val(wp, (&self.pi).pow(4u32));
        let pi6 = Float::with_val(wp, (&self.pi).pow(6u32));
        let g4 = (Complex::with_val(wp, &s3 * 240u32) + 1u32) * pi4 / 45u32;
        let g6 = (1u32 - Complex::with_val(wp, &s5 * 504u32)) * pi6 * 2u32 / 945u32;
        let l4 = Complex::with_val(wp, (&self.lambda_inv).pow(4u32));
        let l6 = Complex::with_val(wp, (&self.lambda_inv).pow(6u32));
        (
            Complex::with_val(wp, g4 * 60u32 * l4),
            Complex::with_val(wp, g6 * 140u32 * l6),
        )
    }

    /// `(θ₁'/θ₁, θ₁''/θ₁)` at `π·y` for `y` reduced modulo `Zτ + Z`.
    fn theta_ratios(&self, y: &Complex, second: bool) -> (Complex, Complex) {
        let wp = self.wp;
        let v = Complex::with_val(wp, y * &self.pi);
        let e = Complex::with_val(wp, v.mul_i_ref(false)).exp();
        let einv = Complex::with_val(wp, e.recip_ref());
        let e2 = Complex::with_val(wp, e.square_ref());
        let e2inv = Complex::with_val(wp, einv.square_ref());
        let mut p = e;
        let mut pinv = einv;
        // drop the common factor 2 (and 1/(2i) sin, 1/2 cos normalizations
        // are applied at the end)
        let mut th = czero(wp); // Σ ± Q_n (P − P⁻¹)
        let mut th1 = czero(wp); // Σ ± Q_n k (P + P⁻¹)
        let mut th2 = czero(wp); // Σ ± Q_n k² (P − P⁻¹)
        for (n, qn) in self.nome.iter().enumerate() {
            let k = (2 * n + 1) as u32;
            let sdiff = Complex::with_val(wp, &p - &pinv);
            let ssum = Complex::with_val(wp, &p + &pinv);
            let a = Complex::with_val(wp, qn * &sdiff);
            let b = Complex::with_val(wp, qn * &ssum) * k;
            if second {
                let c = Complex::with_val(wp, &a * (k * k));
                if n % 2 == 0 {
                    th2 += c;
                } else {
                    th2 -= c;
                }
            }
            if n % 2 == 0 {
                th += a;
                th1 += b;
            } else {
                th -= a;
                th1 -= b;
            }
            p *= &e2;
            pinv *= &e2inv;
        }
        // sin = (P − P⁻¹)/(2i), cos = (P + P⁻¹)/2:
        // θ'/θ = i·th1/th, θ''/θ = −th2/th
        let r1 = Complex::with_val(wp, &th1 / &th).mul_i(false);
        let r2 = -Complex::with_val(wp, &th2 / &th);
        (r1, r2)
    }

    /// `(E₁(y), E₂(y))` on `Zτ + Z` at a reduced non-lattice point.
    fn e1e2_normalized(&self, y: &Complex) -> (Complex, Complex) {
        let wp = self.wp;
        let (r1, r2) = self.theta_ratios(y, true);
        let corr = Float::with_val(wp, y.imag()) / &self.im_tau * Float::with_val(wp, &self.pi * 2u32);
        let e1 = Complex::with_val(wp, &r1 * &self.pi) + Complex::with_val(wp, (0, corr));
        let pi2 = Float::with_val(wp, self.pi.square_ref());
        let inner = r2 - Complex::with_val(wp, r1.square_ref());
        let e2 = -Complex::with_val(wp, inner * pi2) - Float::with_val(wp, &self.pi / &self.im_tau);
        (e1, e2)
    }

    /// Fast `E₁(x)` alone; skips the second theta derivative.
    fn e1_fast_wp(&self, x: &Complex) -> Complex {
        let wp = self.wp;
        let y = Complex::with_val(wp, x * &self.lambda_inv);
        let r = self.unit.reduce(&y);
        if r.in_lattice {
            return czero(wp);
        }
        let (r1, _) = self.theta_ratios(&r.x, false);
        let corr = Float::with_val(wp, r.x.imag()) / &self.im_tau * Float::with_val(wp, &self.pi * 2u32);
        let e1 = Complex::with_val(wp, &r1 * &self.pi) + Complex::with_val(wp, (0, corr));
        Complex::with_val(wp, e1 * &self.lambda_inv)
    }

    /// Fast `(E₁(x), E₂(x))` at working precision.
    fn e1e2_fast_wp(&self, x: &Complex) -> (Complex, Complex) {
        let wp = self.wp;
        let y = Complex::with_val(wp, x * &self.lambda_inv);
        let r = self.unit.reduce(&y);
        if r.in_lattice {
            return (czero(wp), self.e2zero.clone());
        }
        let (e1, e2) = self.e1e2_normalized(&r.x);
        let l2 = Complex::with_val(wp, self.lambda_inv.square_ref());
        (
            Complex::with_val(wp, e1 * &self.lambda_inv),
            Complex::with_val(wp, e2 * l2),
        )
    }

    // ---- reference evaluator --------------------------------------------

    /// `Z_a(x, σ) = Σ_{u ∈ L+x, u≠0} ū^a |u|^{−2σ}`, continued in `σ`, via
    /// an Ewald split at `η = 1/area`.
    pub fn epstein(&self, a: u32, sigma: &Float, x: &Complex) -> Complex {
        let wp = self.wp;
        let lat = &self.lattice;
        let r = lat.reduce(x);
        let x0 = r.x.clone();
        let area = Float::with_val(wp, lat.area());
        let eta = Float::with_val(wp, area.recip_ref());
        let pi = &self.pi;

        // direct series
        let neg = Complex::with_val(wp, -&x0);
        let pts = lat.points_near(&neg, self.direct_radius + 1.0);
        let direct: Vec<Complex> = pts
            .par_iter()
            .map(|&(i, j)| {
                let w = lat.from_coords(&Float::with_val(wp, i), &Float::with_val(wp, j));
                let u = Complex::with_val(wp, &x0 + &w);
                let n2 = norm2(&u);
                if n2.to_f64() < 1e-60 {
                    return czero(wp);
                }
                let arg = Float::with_val(wp, &n2 * pi) * &eta;
                let g = gamma_upper(sigma, &arg, wp);
                let pw = Float::with_val(wp, Float::with_val(wp, &n2 * pi).pow(sigma));
                let ubar = conj(&u);
                let ua = Complex::with_val(wp, ubar.pow(a));
                ua * g / pw
            })
            .collect();
        let mut s_direct = czero(wp);
        for t in direct {
            s_direct += t;
        }

        // dual series over L* = (i/area)·L
        let dual_scale = Complex::with_val(wp, (0, Float::with_val(wp, area.recip_ref())));
        let dual = Lattice::scaled(*lat.order(), Complex::with_val(wp, lat.lambda() * &dual_scale));
        let dpts = dual.points_near(&czero(wp), self.dual_radius + 1.0);
        let order_arg = Float::with_val(wp, Float::with_val(wp, a + 1) - sigma);
        let dterms: Vec<Complex> = dpts
            .par_iter()
            .filter(|&&(i, j)| (i, j) != (0, 0))
            .map(|&(i, j)| {
                let xi = dual.from_coords(&Float::with_val(wp, i), &Float::with_val(wp, j));
                let n2 = norm2(&xi);
                let arg = Float::with_val(wp, &n2 * pi) / &eta;
                let g = gamma_upper(&order_arg, &arg, wp);
                let pw = Float::with_val(wp, Float::with_val(wp, &n2 * pi).pow(&order_arg));
                let phase = Float::with_val(wp, Complex::with_val(wp, &x0 * conj(&xi)).real())
                    * Float::with_val(wp, pi * 2u32);
                let ch = Complex::with_val(wp, (0, phase)).exp();
                let xa = Complex::with_val(wp, conj(&xi).pow(a));
                xa * ch * g / pw
            })
            .collect();
        let mut s_dual = czero(wp);
        for t in dterms {
            s_dual += t;
        }
        // (−i)^a / area
        let mut rot = Complex::with_val(wp, (Float::with_val(wp, area.recip_ref()), 0));
        for _ in 0..a {
            rot = rot.mul_i(true);
        }
        let mut bracket = s_direct + Complex::with_val(wp, &s_dual * &rot);
        if a == 0 {
            let sm1 = Float::with_val(wp, sigma - 1u32);
            let t1 = Float::with_val(wp, (&eta).pow(&sm1)) / &sm1 / &area;
            bracket += t1;
            if r.in_lattice {
                let t2 = Float::with_val(wp, (&eta).pow(sigma)) / sigma;
                bracket -= t2;
            }
        }
        let pref = Float::with_val(wp, pi.pow(sigma)) / Float::with_val(wp, sigma.gamma_ref());
        Complex::with_val(wp, bracket * pref)
    }

    fn e_k_reference_wp(&self, k: u32, x: &Complex) -> Complex {
        let sigma = Float::with_val(self.wp, k);
        self.epstein(k, &sigma, x)
    }

    fn e_aux_reference_wp(&self, x: &Complex) -> Complex {
        let wp = self.wp;
        let z = self.epstein(2, &Float::with_val(wp, 1), x);
        let f = Float::with_val(wp, &self.pi / self.lattice.area());
        Complex::with_val(wp, z * f)
    }

    /// `E₀(x)` from the continuation of the shifted Epstein zeta function,
    /// averaged over `σ = ±δ`.
    pub fn e0_continuation(&self, x: &Complex) -> Complex {
        let wp = self.wp;
        let d = Float::with_val(wp, Float::i_exp(1, -27));
        let zp = self.epstein(0, &d, x);
        let zm = self.epstein(0, &Float::with_val(wp, -&d), x);
        self.out(Complex::with_val(wp, zp + zm) / 2u32)
    }

    // ---- public evaluators ----------------------------------------------

    /// `E₀`: −1 on the lattice, 0 elsewhere.
    pub fn e0(&self, x: &Complex) -> Complex {
        if self.lattice.contains(x) {
            Complex::with_val(self.prec, -1)
        } else {
            czero(self.prec)
        }
    }

    pub fn e1(&self, x: &Complex) -> Complex {
        self.out(self.e1_fast_wp(x))
    }

    /// `E₁(x)` kept at working precision.
    pub fn e1_wp(&self, x: &Complex) -> Complex {
        self.e1_fast_wp(x)
    }

    pub fn e2(&self, x: &Complex) -> Complex {
        self.out(self.e1e2_fast_wp(x).1)
    }

    /// `(E₁(x), E₂(x))` sharing one theta evaluation.
    pub fn e1e2(&self, x: &Complex) -> (Complex, Complex) {
        let (a, b) = self.e1e2_fast_wp(x);
        (self.out(a), self.out(b))
    }

    /// `E_k(x)` for `k ∈ {0, 1, 2}`.
    pub fn e_k(&self, k: u32, x: &Complex, params: &SeriesParams) -> Result<Complex> {
        match (k, params.evaluator) {
            (0, _) => Ok(self.e0(x)),
            (1 | 2, Evaluator::Fast) => {
                let (a, b) = self.e1e2_fast_wp(x);
                Ok(self.out(if k == 1 { a } else { b }))
            }
            (1 | 2, Evaluator::Reference) => Ok(self.out(self.e_k_reference_wp(k, x))),
            _ => Err(Error::UnsupportedWeight(k)),
        }
    }

    /// `E(x) = (2πi/D(L)) Σ (w̄+x̄)/(w+x) |w+x|^{−2s}` at `s = 0`.
    ///
    /// The fast path uses `E(x) = (E₂(x) − E₁(x)² − E₂(0))/2` off the lattice.
    pub fn e_aux(&self, x: &Complex, params: &SeriesParams) -> Complex {
        match params.evaluator {
            Evaluator::Fast => self.out(self.e_aux_fast_wp(x)),
            Evaluator::Reference => self.out(self.e_aux_reference_wp(x)),
        }
    }

    fn e_aux_fast_wp(&self, x: &Complex) -> Complex {
        let wp = self.wp;
        let (e1, e2) = self.e1e2_fast_wp(x);
        if e1.real().is_zero() && e1.imag().is_zero() && self.lattice.contains(x) {
            return self.e2zero.clone();
        }
        let v = e2 - Complex::with_val(wp, e1.square_ref()) - &self.e2zero;
        v / 2u32
    }

    // ---- harmonic lift on ℍ³ -------------------------------------------

    fn h_table(&self, nmax: i64) -> Arc<HTable> {
        let mut guard = self.h_table.lock().expect("h table lock");
        if let Some(t) = guard.as_ref() {
            if t.nmax >= nmax {
                return Arc::clone(t);
            }
        }
        // grow geometrically to amortize rebuilds
        let target = guard.as_ref().map_or(nmax, |t| nmax.max(2 * t.nmax));
        let t = Arc::new(HTable::build(self.lattice.order(), target));
        *guard = Some(Arc::clone(&t));
        t
    }

    /// Cutoff `X` for `K₁(X)` so the neglected tail is below the target.
    fn bessel_cutoff(params: &SeriesParams) -> f64 {
        let n = params.target_nats();
        n + n.ln().max(1.0) + 4.0
    }

    /// Largest `|γ|` needed at height `v`.
    pub fn h_radius(&self, v: f64, params: &SeriesParams) -> f64 {
        if let Some(r) = params.truncation_radius {
            return r;
        }
        let sd = (-self.lattice.order().field_disc() as f64).sqrt();
        Self::bessel_cutoff(params) * sd / (4.0 * std::f64::consts::PI * v)
    }

    /// `H(z + jv) = E₂(0)(z − z̄) − (4π/D(L))·v·Σ′ (m̄n/|mn|) K₁(4π|mn|v) e(mnz)`
    /// over `m ∈ L`, `n ∈ L′`.
    pub fn h_value(&self, u: &Point3, params: &SeriesParams) -> Result<Complex> {
        let wp = self.wp;
        let vf = u.v.to_f64();
        if vf < params.min_height {
            let r = self.h_radius(vf, params);
            return Err(Error::Precision(format!(
                "height {vf:.3e} below floor {:.3e}; Fourier-Bessel radius would be {r:.1}",
                params.min_height
            )));
        }
        let radius = self.h_radius(vf, params);
        let nmax = (radius * radius).ceil() as i64;
        if nmax > MAX_H_NORM {
            return Err(Error::Precision(format!(
                "Fourier-Bessel radius {radius:.1} exceeds the supported table"
            )));
        }
        let table = self.h_table(nmax.max(1));
        let order = self.lattice.order();
        let absd = -order.field_disc();
        let sd = Float::with_val(wp, absd).sqrt();
        let z = Complex::with_val(wp, &u.z);
        let v = Float::with_val(wp, &u.v);
        let pi = &self.pi;
        let karg_scale = Float::with_val(wp, pi * 4u32) * &v / &sd;
        // e(κγz) with κ = −i/√|D|: phase 4π·Re(−iγz)/√|D| = 4π·Im(γz)/√|D|
        let phase_scale = Float::with_val(wp, pi * 4u32) / &sd;
        let w = mp::omega(order, wp);

        // split into norm groups so K₁ is evaluated once per |γ|
        let entries: Vec<&(QuadInt, QuadInt)> = table
            .entries
            .iter()
            .take_while(|(g, _)| g.norm() <= nmax)
            .collect();
        let mut groups: Vec<(usize, usize)> = Vec::new();
        let mut start = 0;
        for i in 1..=entries.len() {
            if i == entries.len() || entries[i].0.norm() != entries[start].0.norm() {
                groups.push((start, i));
                start = i;
            }
        }
        let embed_w = |q: &QuadInt| Complex::with_val(wp, &w * q.y) + q.x;
        let partial: Vec<Result<Complex>> = groups
            .par_iter()
            .map(|&(s, e)| {
                let nrm = entries[s].0.norm();
                let absg = Float::with_val(wp, nrm).sqrt();
                let k1 = bessel_k1(&Float::with_val(wp, &karg_scale * &absg), wp)?;
                let mut acc = czero(wp);
                for (g, snum) in &entries[s..e] {
                    let gc = embed_w(g);
                    let sc = embed_w(snum);
                    let im = Float::with_val(wp, Complex::with_val(wp, &gc * &z).imag());
                    let ph = Complex::with_val(wp, (0, im * &phase_scale)).exp();
                    acc += Complex::with_val(wp, &gc * &sc) * ph;
                }
                // γ/|γ| · σnum/N(γ)
                Ok(acc * k1 / Float::with_val(wp, &absg * nrm))
            })
            .collect();
        let mut sum = czero(wp);
        for p in partial {
            sum += p?;
        }
        // prefactor −iλ̄²√|D|/(2A)
        let lam = self.lattice.lambda();
        let area = self.lattice.area();
        let c = Complex::with_val(wp, conj(lam).square()) * &sd / Float::with_val(wp, area * 2u32);
        let c = c.mul_i(true);
        let four_pi_over_d = Complex::with_val(wp, Float::with_val(wp, pi * 4u32)) / self.pairing();
        let series = four_pi_over_d * c * sum * &v;
        let lin = Complex::with_val(wp, &self.e2zero * mp::imag_part_i(&z));
        Ok(self.out(lin - series))
    }

    /// `H_N(u) = H(N·u) − H(u)` with the scalar action `N·u = Nz + j|N|v`.
    pub fn h_n_value(&self, u: &Point3, n: &QuadInt, params: &SeriesParams) -> Result<Complex> {
        let nc = embed(n, self.wp);
        let nu = u.scale(&nc);
        let a = self.h_value(&nu, params)?;
        let b = self.h_value(u, params)?;
        Ok(Complex::with_val(self.prec, a - b))
    }

    /// `H` summed directly over pairs `(m, n) ∈ L × L′` without grouping;
    /// slow, used to validate the divisor-grouped series.
    pub fn h_value_pairs(&self, u: &Point3, radius: i64) -> Complex {
        let wp = self.wp;
        let lat = &self.lattice;
        let dual = lat.trace_dual();
        let v = Float::with_val(wp, &u.v);
        let pi = &self.pi;
        let mut sum = czero(wp);
        for i in -radius..=radius {
            for j in -radius..=radius {
                if (i, j) == (0, 0) {
                    continue;
                }
                let m = lat.from_coords(&Float::with_val(wp, i), &Float::with_val(wp, j));
                for k in -radius..=radius {
                    for l in -radius..=radius {
                        if (k, l) == (0, 0) {
                            continue;
                        }
                        let n = dual.from_coords(&Float::with_val(wp, k), &Float::with_val(wp, l));
                        let mn = Complex::with_val(wp, &m * &n);
                        let amn = mp::abs(&mn);
                        let karg = Float::with_val(wp, pi * 4u32) * &amn * &v;
                        if karg.to_f64() > 80.0 {
                            continue;
                        }
                        let k1 = bessel_k1(&karg, wp).expect("positive argument");
                        let phase = Float::with_val(wp, Complex::with_val(wp, &mn * &u.z).real())
                            * Float::with_val(wp, pi * 4u32);
                        let e = Complex::with_val(wp, (0, phase)).exp();
                        sum += Complex::with_val(wp, conj(&m) * &n) / &amn * k1 * e;
                    }
                }
            }
        }
        let four_pi_over_d = Complex::with_val(wp, Float::with_val(wp, pi * 4u32)) / self.pairing();
        let lin = Complex::with_val(wp, &self.e2zero * mp::imag_part_i(&u.z));
        self.out(lin - four_pi_over_d * sum * &v)
    }
}

/// Free-function form of [`LatticeConstants::e_k`].
pub fn e_k(k: u32, x: &Complex, lc: &LatticeConstants, params: &SeriesParams) -> Result<Complex> {
    lc.e_k(k, x, params)
}

pub fn e_aux(x: &Complex, lc: &LatticeConstants, params: &SeriesParams) -> Complex {
    lc.e_aux(x, params)
}

pub fn h_value(u: &Point3, lc: &LatticeConstants, params: &SeriesParams) -> Result<Complex> {
    lc.h_value(u, params)
}

pub fn h_n_value(u: &Point3, n: &QuadInt, lc: &LatticeConstants, params: &SeriesParams) -> Result<Complex> {
    lc.h_n_value(u, n, params)
}

pub use crate::special::bessel_k1 as k1;

/// A point `x = s·w₁ + t·w₂` from real coordinates.
pub fn lattice_point_f64(lat: &Lattice, s: f64, t: f64) -> Complex {
    let p = lat.prec();
    lat.from_coords(&Float::with_val(p, s), &Float::with_val(p, t))
}

/// Complex `x` at `prec` from doubles.
pub fn c64(prec: u32, re: f64, im: f64) -> Complex {
    cx(prec, re, im)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadfield::Residues;

    fn setup(disc: i64, prec: u32) -> (Lattice, LatticeConstants) {
        let o = OrderSpec::maximal(disc).unwrap();
        let lat = Lattice::standard(o, prec);
        let lc = LatticeConstants::new(&lat).unwrap();
        (lat, lc)
    }

    #[test]
    fn snapshot_round_trip_is_exact() {
        let o = OrderSpec::maximal(-7).unwrap();
        let lat = Lattice::scaled(o, cx(96, 0.8, -0.3));
        let lc = LatticeConstants::new(&lat).unwrap();
        let back = LatticeConstants::from_snapshot(&lc.snapshot()).unwrap();
        assert_eq!(back.e2zero(), lc.e2zero());
        assert_eq!(back.g3(), lc.g3());
        assert_eq!(back.lattice().w1(), lc.lattice().w1());
        let x = cx(96, 0.21, 0.4);
        assert_eq!(back.e1(&x), lc.e1(&x));
    }

    #[test]
    fn pairing_is_positive_imaginary() {
        let (lat, _) = setup(-8, 128);
        let d = lat.pairing();
        assert!(d.real().to_f64().abs() < 1e-30);
        assert!(d.imag().to_f64() > 0.0);
    }

    #[test]
    fn fast_and_reference_agree() {
        for disc in [-8, -7] {
            let (lat, lc) = setup(disc, 128);
            let fast = SeriesParams::new(128);
            let refp = SeriesParams::new(128).with_evaluator(Evaluator::Reference);
            for (s, t) in [(0.13, 0.41), (-0.37, 0.22), (0.5, 0.0), (0.71, -1.3)] {
                let x = lattice_point_f64(&lat, s, t);
                for k in [1, 2] {
                    let a = lc.e_k(k, &x, &fast).unwrap();
                    let b = lc.e_k(k, &x, &refp).unwrap();
                    assert!(mp::dist(&a, &b) < 1e-30, "k={k} disc={disc}");
                }
                let a = lc.e_aux(&x, &fast);
                let b = lc.e_aux(&x, &refp);
                assert!(mp::dist(&a, &b) < 1e-30, "E disc={disc}");
            }
            let z = czero(128);
            let a = lc.e_k(2, &z, &fast).unwrap();
            let b = lc.e_k(2, &z, &refp).unwrap();
            assert!(mp::dist(&a, &b) < 1e-30);
            assert!(mp::dist(&lc.e_aux(&z, &refp), lc.e2zero()) < 1e-30);
        }
    }

    #[test]
    fn parity_and_periodicity() {
        let (lat, lc) = setup(-8, 128);
        let x = lattice_point_f64(&lat, 0.271, -0.133);
        let mx = Complex::with_val(128, -&x);
        let (a1, a2) = lc.e1e2(&x);
        let (b1, b2) = lc.e1e2(&mx);
        assert!(mp::dist(&a1, &Complex::with_val(128, -&b1)) < 1e-32);
        assert!(mp::dist(&a2, &b2) < 1e-32);
        let shift = Complex::with_val(128, &x + lat.w1()) + Complex::with_val(128, lat.w2() * 3u32);
        let (c1, c2) = lc.e1e2(&shift);
        assert!(mp::dist(&a1, &c1) < 1e-30);
        assert!(mp::dist(&a2, &c2) < 1e-30);
        let p = lc.params();
        assert!(mp::dist(&lc.e_aux(&x, &p), &lc.e_aux(&shift, &p)) < 1e-30);
        assert!(mp::dist(&lc.e_aux(&x, &p), &lc.e_aux(&mx, &p)) < 1e-30);
        assert_eq!(lc.e1(&czero(128)), czero(128));
    }

    #[test]
    fn e0_continuation_is_an_indicator() {
        let (lat, lc) = setup(-8, 96);
        let x = lattice_point_f64(&lat, 0.3, 0.1);
        assert!(mp::dist(&lc.e0_continuation(&x), &lc.e0(&x)) < 1e-10);
        let z = czero(96);
        let v = lc.e0_continuation(&z);
        assert!(mp::dist(&v, &Complex::with_val(96, -1)) < 1e-10, "{v}");
    }

    #[test]
    fn distribution_relation() {
        let (lat, lc) = setup(-8, 128);
        let o = *lat.order();
        let c = o.elem(1, 1);
        let cc = embed(&c, 128);
        let x = lattice_point_f64(&lat, 0.17, 0.29);
        let res = Residues::new(&c).unwrap();
        let (mut s1, mut s2) = (czero(128), czero(128));
        for r in res.reps() {
            let arg = Complex::with_val(128, &x + lat.point(r)) / &cc;
            let (e1, e2) = lc.e1e2(&arg);
            s1 += e1;
            s2 += e2;
        }
        let (e1, e2) = lc.e1e2(&x);
        assert!(mp::dist(&s1, &Complex::with_val(128, &e1 * &cc)) < 1e-28);
        let c2 = Complex::with_val(128, cc.square_ref());
        assert!(mp::dist(&s2, &Complex::with_val(128, &e2 * &c2)) < 1e-28);
    }

    #[test]
    fn scaling_law() {
        let o = OrderSpec::maximal(-7).unwrap();
        let lam = Complex::with_val(128, (0.8, 0.3));
        let lat = Lattice::scaled(o, lam.clone());
        let lc = LatticeConstants::new(&lat).unwrap();
        let refp = SeriesParams::new(128).with_evaluator(Evaluator::Reference);
        let x = lattice_point_f64(&lat, 0.2, 0.35);
        let a = lc.e_k(2, &x, &lc.params()).unwrap();
        let b = lc.e_k(2, &x, &refp).unwrap();
        assert!(mp::dist(&a, &b) < 1e-30);
    }

    #[test]
    fn g2_g3_are_lattice_invariants() {
        let (_, lc) = setup(-8, 128);
        // j(√−2) = 8000
        let g2c = Complex::with_val(128, lc.g2().pow(3u32));
        let g3s = Complex::with_val(128, lc.g3().square_ref()) * 27u32;
        let j = Complex::with_val(128, &g2c * 1728u32) / (g2c - g3s);
        assert!(mp::dist(&j, &Complex::with_val(128, 8000)) < 1e-25, "{j}");
    }

    #[test]
    fn h_grouped_matches_pair_sum() {
        let (_, lc) = setup(-8, 96);
        let u = Point3::from_f64(96, 0.13, 0.07, 1.1).unwrap();
        let p = SeriesParams::new(96).with_target(1e-22);
        let a = lc.h_value(&u, &p).unwrap();
        let b = lc.h_value_pairs(&u, 9);
        assert!(mp::dist(&a, &b) < 1e-18, "{a} vs {b}");
    }

    #[test]
    fn h_is_odd() {
        let (_, lc) = setup(-8, 128);
        let p = SeriesParams::new(128).with_target(1e-30);
        let u = Point3::from_f64(128, 0.21, -0.08, 0.9).unwrap();
        let a = lc.h_value(&u, &p).unwrap();
        let b = lc.h_value(&u.negate_z(), &p).unwrap();
        assert!(mp::mag_f64(&Complex::with_val(128, &a + &b)) < 1e-25);
    }

    #[test]
    fn h_rejects_low_height() {
        let (_, lc) = setup(-8, 64);
        let p = SeriesParams::new(64).with_min_height(0.1);
        let u = Point3::from_f64(64, 0.0, 0.0, 0.01).unwrap();
        assert!(matches!(lc.h_value(&u, &p), Err(Error::Precision(_))));
    }
}
