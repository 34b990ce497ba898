//! Seeded verification suites shared by the CLI and the acceptance target.

use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rug::{Complex, Float};
use serde::Serialize;

use crate::cocycle::{
    check_cocycle, integral_lattice, level_torsion_points, phi, phi_n, phi_n0,
    recognize_integrality, WitnessStatus,
};
use crate::eisenstein::{lattice_point_f64, Evaluator, Lattice, LatticeConstants, SeriesParams};
use crate::error::{Error, Result};
use crate::hecke::{coset_reps, hecke_apply, involution_apply, Homomorphism};
use crate::hyperbolic::{act, Point3};
use crate::lseries::{integral_check, l_closed_s1, AdmissibleSampler};
use crate::mp::{self, embed};
use crate::quadfield::{Gamma0Sampler, Level, Mat2, OrderSpec, QuadInt, Residues, MAX_SAMPLING_ATTEMPTS};

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub order: OrderSpec,
    pub level: Option<Level>,
    pub prec: u32,
    pub seed: u64,
    pub samples: usize,
    /// Entry-norm bound for sampled matrices.
    pub height: i64,
    pub tolerance: Option<f64>,
    pub hecke_prime: Option<QuadInt>,
    pub radius: f64,
    /// Prebuilt constants for the standard lattice, e.g. from a cache.
    pub constants: Option<Arc<LatticeConstants>>,
}

impl SuiteConfig {
    pub fn new(order: OrderSpec, level: Option<Level>, prec: u32) -> Self {
        SuiteConfig {
            order,
            level,
            prec,
            seed: 7,
            samples: 10,
            height: 10,
            tolerance: None,
            hecke_prime: None,
            radius: 24.0,
            constants: None,
        }
    }

    fn level(&self) -> Result<Level> {
        self.level.ok_or(Error::InvalidLevel)
    }

    fn tol(&self, default: f64) -> f64 {
        self.tolerance.unwrap_or(default)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    CocycleRelation,
    Homomorphism,
    Transformation,
    Consistency,
    Hecke,
    Involution,
    Harmonicity,
    Eisenstein,
    Lseries,
    Integrality,
}

impl Suite {
    pub const ALL: [Suite; 10] = [
        Suite::CocycleRelation,
        Suite::Homomorphism,
        Suite::Transformation,
        Suite::Consistency,
        Suite::Hecke,
        Suite::Involution,
        Suite::Harmonicity,
        Suite::Eisenstein,
        Suite::Lseries,
        Suite::Integrality,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::CocycleRelation => "cocycle-relation",
            Suite::Homomorphism => "homomorphism",
            Suite::Transformation => "transformation",
            Suite::Consistency => "consistency",
            Suite::Hecke => "hecke",
            Suite::Involution => "involution",
            Suite::Harmonicity => "harmonicity",
            Suite::Eisenstein => "eisenstein",
            Suite::Lseries => "lseries",
            Suite::Integrality => "integrality",
        }
    }

    pub fn parse(s: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|x| x.name() == s)
    }

    pub fn default_tolerance(&self) -> f64 {
        match self {
            Suite::CocycleRelation | Suite::Homomorphism | Suite::Consistency | Suite::Involution => 1e-20,
            Suite::Transformation => 1e-9,
            Suite::Hecke => 1e-18,
            Suite::Harmonicity => 0.5,
            Suite::Eisenstein => 1e-15,
            Suite::Lseries => 1e-4,
            Suite::Integrality => 1e-40,
        }
    }

    /// Smallest tolerance meaningful at `prec` bits.
    pub fn minimum_tolerance(&self, prec: u32) -> f64 {
        match self {
            Suite::Harmonicity | Suite::Lseries => 0.0,
            _ => 2f64.powi(-(prec as i32)) * 1e3,
        }
    }

    pub fn run(&self, cfg: &SuiteConfig) -> Result<Report> {
        let tol = cfg.tol(self.default_tolerance());
        if tol < self.minimum_tolerance(cfg.prec) {
            return Err(Error::Precision(format!(
                "tolerance {tol:.1e} is below what {} bits can resolve",
                cfg.prec
            )));
        }
        let t0 = Instant::now();
        let (cases, env) = match self {
            Suite::CocycleRelation => cocycle_relation(cfg)?,
            Suite::Homomorphism => homomorphism(cfg)?,
            Suite::Transformation => transformation(cfg)?,
            Suite::Consistency => consistency(cfg)?,
            Suite::Hecke => hecke(cfg)?,
            Suite::Involution => involution(cfg)?,
            Suite::Harmonicity => harmonicity(cfg)?,
            Suite::Eisenstein => eisenstein(cfg)?,
            Suite::Lseries => lseries(cfg)?,
            Suite::Integrality => integrality(cfg)?,
        };
        Ok(Report::new(self.name(), cases, tol, env, t0.elapsed().as_secs_f64()))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Case {
    pub label: String,
    pub matrices: Vec<Mat2>,
    pub point: Option<String>,
    pub residual: f64,
    pub budget: f64,
    /// Set when a case is judged by something other than `residual ≤ tolerance`.
    pub verdict: Option<bool>,
    pub note: Option<String>,
}

impl Case {
    fn new(label: impl Into<String>, matrices: Vec<Mat2>, residual: f64, budget: f64) -> Case {
        Case {
            label: label.into(),
            matrices,
            point: None,
            residual,
            budget,
            verdict: None,
            note: None,
        }
    }

    fn at(mut self, p: &Complex, q: &Complex) -> Case {
        let (a, b) = (mp::to_c64(p), mp::to_c64(q));
        self.point = Some(format!("p={:.6}{:+.6}i q={:.6}{:+.6}i", a.re, a.im, b.re, b.im));
        self
    }

    fn note(mut self, s: String) -> Case {
        self.note = Some(s);
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Environment {
    pub disc: i64,
    pub level: Option<QuadInt>,
    pub precision: u32,
    pub seed: u64,
    pub truncation_radii: (f64, f64),
    pub convention: crate::eisenstein::HConvention,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub suite: String,
    pub cases: Vec<Case>,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub wall_time_s: f64,
    pub environment: Environment,
}

impl Report {
    fn new(suite: &str, cases: Vec<Case>, tolerance: f64, environment: Environment, wall: f64) -> Report {
        let max_residual = cases.iter().map(|c| c.residual).fold(0.0, f64::max);
        let pass = !cases.is_empty()
            && cases
                .iter()
                .all(|c| c.verdict.unwrap_or(c.residual <= tolerance) && c.residual.is_finite());
        Report {
            suite: suite.to_string(),
            cases,
            max_residual,
            tolerance,
            pass,
            wall_time_s: wall,
            environment,
        }
    }
}

fn env(cfg: &SuiteConfig, lc: &LatticeConstants) -> Environment {
    Environment {
        disc: cfg.order.field_disc(),
        level: cfg.level.map(|l| l.n),
        precision: cfg.prec,
        seed: cfg.seed,
        truncation_radii: lc.truncation_radii(),
        convention: lc.convention(),
    }
}

fn standard(cfg: &SuiteConfig) -> Result<Arc<LatticeConstants>> {
    match &cfg.constants {
        Some(lc) if lc.prec() == cfg.prec && *lc.lattice().order() == cfg.order => Ok(lc.clone()),
        _ => Ok(Arc::new(LatticeConstants::new(&Lattice::standard(cfg.order, cfg.prec))?)),
    }
}

type Run = Result<(Vec<Case>, Environment)>;

/// Pair samples, each with its own derived seed so cases are independent of scheduling.
/// Pairs `(A, B)` for which `norm(c) ≤ height` holds for `A`, `B` and `AB` alike,
/// so no Dedekind sum in the relation runs over more than `height` residues.
fn pairs(cfg: &SuiteConfig, level: Option<Level>, salt: u64) -> Result<Vec<(Mat2, Mat2)>> {
    let mut s = Gamma0Sampler::new(cfg.order, level, cfg.height, cfg.seed ^ salt);
    let mut out = Vec::with_capacity(cfg.samples);
    let mut tries = 0;
    while out.len() < cfg.samples {
        if tries == MAX_SAMPLING_ATTEMPTS * cfg.samples.max(1) {
            return Err(Error::Sampling(tries));
        }
        tries += 1;
        let (a, b) = (s.sample()?, s.sample()?);
        if (a * b).c.norm() <= cfg.height {
            out.push((a, b));
        }
    }
    Ok(out)
}

fn collect<T: Send, F>(items: Vec<T>, f: F) -> Result<Vec<Case>>
where
    F: Fn(T) -> Result<Vec<Case>> + Sync + Send,
{
    let parts: Vec<Result<Vec<Case>>> = items.into_par_iter().map(f).collect();
    let mut out = Vec::new();
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

pub const PQ_PER_PAIR: usize = 5;

fn cocycle_relation(cfg: &SuiteConfig) -> Run {
    let lc = standard(cfg)?;
    let lat = lc.lattice().clone();
    let params = lc.params();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x51);
    let generic: Vec<(Mat2, Mat2, Vec<(Complex, Complex)>)> = pairs(cfg, None, 1)?
        .into_iter()
        .map(|(a, b)| {
            let pq = (0..PQ_PER_PAIR)
                .map(|_| {
                    let p = lattice_point_f64(&lat, rng.gen(), rng.gen());
                    let q = lattice_point_f64(&lat, rng.gen(), rng.gen());
                    (p, q)
                })
                .collect();
            (a, b, pq)
        })
        .collect();
    let mut cases = collect(generic, |(a, b, pq)| {
        pq.iter()
            .map(|(p, q)| {
                let (r, bud) = check_cocycle(&a, &b, p, q, None, &lc, &params)?;
                Ok(Case::new("phi", vec![a, b], r, bud).at(p, q))
            })
            .collect()
    })?;
    if let Some(lev) = cfg.level {
        let tors = level_torsion_points(&lev, &lat)?;
        let all: Vec<(Complex, Complex)> = tors
            .iter()
            .flat_map(|p| tors.iter().map(move |q| (p.clone(), q.clone())))
            .collect();
        let items: Vec<(Mat2, Mat2, Vec<(Complex, Complex)>)> = pairs(cfg, Some(lev), 2)?
            .into_iter()
            .map(|(a, b)| {
                let pq = (0..PQ_PER_PAIR)
                    .map(|_| all[rng.gen_range(0..all.len())].clone())
                    .collect();
                (a, b, pq)
            })
            .collect();
        cases.extend(collect(items, |(a, b, pq)| {
            pq.iter()
                .map(|(p, q)| {
                    let (r, bud) = check_cocycle(&a, &b, p, q, Some(&lev), &lc, &params)?;
                    Ok(Case::new("phi-n", vec![a, b], r, bud).at(p, q))
                })
                .collect()
        })?);
    }
    Ok((cases, env(cfg, &lc)))
}

fn homomorphism(cfg: &SuiteConfig) -> Run {
    let lc = standard(cfg)?;
    let hom = match cfg.level {
        Some(l) => Homomorphism::PhiN(l),
        None => Homomorphism::Phi,
    };
    let cases = collect(pairs(cfg, cfg.level, 3)?, |(a, b)| {
        let x = hom.eval(&(a * b), &lc)?;
        let y = hom.eval(&a, &lc)?;
        let z = hom.eval(&b, &lc)?;
        let r = Complex::with_val(lc.prec(), &x.value - &y.value) - &z.value;
        Ok(vec![Case::new(
            "hom",
            vec![a, b],
            mp::mag_f64(&r),
            x.error_budget + y.error_budget + z.error_budget,
        )])
    })?;
    Ok((cases, env(cfg, &lc)))
}

fn transformation(cfg: &SuiteConfig) -> Run {
    let lc = standard(cfg)?;
    // the Fourier-Bessel radius grows like the log of the target, so aim just below the tolerance
    let params = SeriesParams::new(cfg.prec).with_target((cfg.tol(Suite::Transformation.default_tolerance()) * 1e-3).min(1e-12));
    let prec = cfg.prec;
    let w = mp::omega(&cfg.order, prec);
    let z2 = Complex::with_val(prec, Complex::with_val(prec, &w * Float::with_val(prec, 0.1)) + Float::with_val(prec, 0.3));
    let us = [
        Point3::new(mp::czero(prec), Float::with_val(prec, 1))?,
        Point3::new(z2, Float::with_val(prec, 0.8))?,
    ];
    let h = |u: &Point3, l: Option<&Level>| match l {
        None => lc.h_value(u, &params),
        Some(l) => lc.h_n_value(u, &l.n, &params),
    };
    let base: Vec<(Complex, Option<Complex>)> = us
        .iter()
        .map(|u| Ok((h(u, None)?, cfg.level.as_ref().map(|l| h(u, Some(l))).transpose()?)))
        .collect::<Result<_>>()?;
    let mut s = Gamma0Sampler::new(cfg.order, cfg.level, cfg.height, cfg.seed ^ 4);
    let ms = s.sample_n(cfg.samples)?;
    let cases = collect(ms, |m| {
        let mut out = Vec::new();
        let phi = phi(&m, &lc)?.value;
        let phi_n = cfg.level.as_ref().map(|l| phi_n0(&m, l, &lc)).transpose()?;
        for (i, (u, (hu, hnu))) in us.iter().zip(&base).enumerate() {
            let au = act(&m, u);
            let d = Complex::with_val(prec, h(&au, None)? - hu);
            out.push(Case::new(format!("phi u{i}"), vec![m], mp::dist(&phi, &d), params.target_error));
            if let (Some(l), Some(pn), Some(hnu)) = (cfg.level.as_ref(), &phi_n, hnu) {
                let d = Complex::with_val(prec, h(&au, Some(l))? - hnu);
                out.push(Case::new(format!("phi-n u{i}"), vec![m], mp::dist(&pn.value, &d), params.target_error));
            }
        }
        Ok(out)
    })?;
    Ok((cases, env(cfg, &lc)))
}

fn consistency(cfg: &SuiteConfig) -> Run {
    let lc = standard(cfg)?;
    let lev = cfg.level()?;
    let params = lc.params();
    let mut pts = vec![(mp::czero(lc.working_prec()), mp::czero(lc.working_prec()))];
    let tors = level_torsion_points(&lev, lc.lattice())?;
    pts.push((tors[tors.len() - 1].clone(), tors[1 % tors.len()].clone()));
    let ms = Gamma0Sampler::new(cfg.order, Some(lev), cfg.height, cfg.seed ^ 5).sample_n(cfg.samples)?;
    let cases = collect(ms, |m| {
        pts.iter()
            .map(|(p, q)| {
                let r = phi_n(&m, &lev, p, q, &lc, &params)?;
                Ok(Case::new("literal-vs-expanded", vec![m], r.gap, r.value.error_budget).at(p, q))
            })
            .collect()
    })?;
    Ok((cases, env(cfg, &lc)))
}

fn hecke(cfg: &SuiteConfig) -> Run {
    let lc = standard(cfg)?;
    let p = cfg
        .hecke_prime
        .ok_or_else(|| Error::NotPrime("no Hecke prime given".into()))?;
    let reps = coset_reps(&p, cfg.level.as_ref())?;
    let hom = match cfg.level {
        Some(l) => Homomorphism::PhiN(l),
        None => Homomorphism::Phi,
    };
    let ms = Gamma0Sampler::new(cfg.order, cfg.level, cfg.height, cfg.seed ^ 6).sample_n(cfg.samples)?;
    let cases = collect(ms, |m| {
        let r = hecke_apply(&hom, &reps, &m, &lc)?;
        Ok(vec![Case::new(format!("T_p eigenvalue {}", r.eigenvalue), vec![m], r.residual, r.budget)])
    })?;
    Ok((cases, env(cfg, &lc)))
}

fn involution(cfg: &SuiteConfig) -> Run {
    let lc = standard(cfg)?;
    let hom = match cfg.level {
        Some(l) => Homomorphism::PhiN(l),
        None => Homomorphism::Phi,
    };
    let ms = Gamma0Sampler::new(cfg.order, cfg.level, cfg.height, cfg.seed ^ 7).sample_n(cfg.samples)?;
    let cases = collect(ms, |m| {
        let r = involution_apply(&hom, &m, &lc)?;
        Ok(vec![Case::new("T_x", vec![m], r.residual, r.budget)])
    })?;
    Ok((cases, env(cfg, &lc)))
}

/// `Δ = v²(∂x² + ∂y² + ∂v²) − v∂v`, by central differences of step `h`.
pub fn hyperbolic_laplacian(
    lc: &LatticeConstants,
    u: &Point3,
    h: f64,
    params: &SeriesParams,
) -> Result<Complex> {
    let p = lc.working_prec();
    let hf = Float::with_val(p, h);
    let f0 = lc.h_value(u, params)?;
    let shifted = |dz: Complex, dv: Float| -> Result<Complex> {
        let z = Complex::with_val(p, &u.z + &dz);
        let v = Float::with_val(p, &u.v + &dv);
        lc.h_value(&Point3::new(z, v)?, params)
    };
    let zero_f = Float::with_val(p, 0);
    let zero_c = mp::czero(p);
    let mut second = Complex::with_val(p, &f0 * -6i32);
    for dz in [Complex::with_val(p, (&hf, 0)), Complex::with_val(p, (0, &hf))] {
        second += shifted(dz.clone(), zero_f.clone())?;
        second += shifted(Complex::with_val(p, -&dz), zero_f.clone())?;
    }
    let up = shifted(zero_c.clone(), hf.clone())?;
    let down = shifted(zero_c, Float::with_val(p, -&hf))?;
    second += &up;
    second += &down;
    let h2 = Float::with_val(p, hf.square_ref());
    let v2 = Float::with_val(p, u.v.square_ref());
    let lap = Complex::with_val(p, second / &h2) * &v2;
    let dv = Complex::with_val(p, up - down) / Float::with_val(p, &hf * 2u32);
    Ok(Complex::with_val(lc.prec(), lap - Complex::with_val(p, dv * &u.v)))
}

fn harmonicity(cfg: &SuiteConfig) -> Run {
    let lc = standard(cfg)?;
    let params = SeriesParams::new(cfg.prec).with_target(2f64.powi(-(cfg.prec as i32) + 10));
    let prec = lc.working_prec();
    let pts = [
        (0.11, 0.07, 0.9),
        (-0.23, 0.31, 0.7),
        (0.4, -0.2, 1.1),
        (0.05, 0.45, 0.6),
        (-0.37, -0.12, 1.4),
    ];
    let cases = collect(pts.to_vec(), |(x, y, v)| {
        let u = Point3::from_f64(prec, x, y, v)?;
        let r1 = mp::mag_f64(&hyperbolic_laplacian(&lc, &u, 1e-3, &params)?);
        let r2 = mp::mag_f64(&hyperbolic_laplacian(&lc, &u, 5e-4, &params)?);
        let ratio = r1 / r2;
        let hm = lc.h_value(&u.negate_z(), &params)?;
        let hp = lc.h_value(&u, &params)?;
        let odd = mp::mag_f64(&Complex::with_val(prec, hm + hp));
        let mut c = Case::new(format!("({x}, {y}, {v})"), vec![], (ratio - 4.0).abs(), 0.5)
            .note(format!("laplacian h=1e-3: {r1:.3e}, h=5e-4: {r2:.3e}, ratio {ratio:.4}; |H(-z)+H(z)| = {odd:.2e}"));
        c.verdict = Some((ratio - 4.0).abs() <= cfg.tol(0.5) && odd < 1e-15);
        Ok(vec![c])
    })?;
    Ok((cases, env(cfg, &lc)))
}

fn eisenstein(cfg: &SuiteConfig) -> Run {
    let lc = standard(cfg)?;
    let lat = lc.lattice().clone();
    let o = cfg.order;
    let prec = lc.prec();
    let params = lc.params();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 8);
    // moduli of norm ≤ 25
    let mut cs: Vec<QuadInt> = Vec::new();
    'outer: for y in 0..4i64 {
        for x in 1..6i64 {
            let c = o.elem(x, y);
            if c.norm() <= 25 && c.norm() > 1 && !cs.iter().any(|d| d.norm() == c.norm()) {
                cs.push(c);
                if cs.len() == 5 {
                    break 'outer;
                }
            }
        }
    }
    let xs: Vec<Complex> = (0..10).map(|_| lattice_point_f64(&lat, rng.gen(), rng.gen())).collect();
    let items: Vec<(QuadInt, Complex)> = cs
        .iter()
        .flat_map(|c| xs.iter().map(move |x| (*c, x.clone())))
        .collect();
    let mut cases = collect(items, |(c, x)| {
        let res = Residues::new(&c)?;
        let cc = embed(&c, prec);
        let mut out = Vec::new();
        for k in [1u32, 2] {
            let mut s = mp::czero(prec);
            for r in res.reps() {
                let arg = Complex::with_val(prec, &x + lat.point(r)) / &cc;
                s += lc.e_k(k, &arg, &params)?;
            }
            let rhs = Complex::with_val(prec, lc.e_k(k, &x, &params)? * cc.clone().pow_ref_u(k));
            let rel = mp::dist(&s, &rhs) / mp::mag_f64(&rhs);
            out.push(Case::new(format!("distribution k={k} c={c}"), vec![], rel, 1e-25));
        }
        Ok(out)
    })?;
    let z = mp::czero(lc.working_prec());
    let e0 = lc.e_aux(&z, &params);
    let mut c = Case::new("E(0) = E2(0)", vec![], mp::dist(&e0, lc.e2zero()), 1e-25);
    c.verdict = Some(c.residual < 1e-20);
    cases.push(c);
    for (i, x) in [z.clone(), xs[0].clone(), Complex::with_val(prec, lat.w1() + lat.w2())]
        .iter()
        .enumerate()
    {
        let a = lc.e0_continuation(x);
        let mut c = Case::new(format!("E0 indicator {i}"), vec![], mp::dist(&a, &lc.e0(x)), 1e-10);
        c.verdict = Some(c.residual < 1e-10);
        cases.push(c);
    }
    let reference = SeriesParams::new(cfg.prec).with_evaluator(Evaluator::Reference);
    let x = &xs[1];
    let fa = lc.e_k(1, x, &params)?;
    let fb = lc.e_k(1, x, &reference)?;
    cases.push(Case::new("fast vs reference E1", vec![], mp::dist(&fa, &fb) / mp::mag_f64(&fb), 1e-25));
    Ok((cases, env(cfg, &lc)))
}

trait PowU {
    fn pow_ref_u(self, k: u32) -> Complex;
}

impl PowU for Complex {
    fn pow_ref_u(self, k: u32) -> Complex {
        let mut out = Complex::with_val(self.prec().0, 1);
        for _ in 0..k {
            out *= &self;
        }
        out
    }
}

/// Integral check at `s = 2` for 5 admissible `A` plus the `N = 1` case, and
/// the `s = 1` cross-check for `samples` matrices.
fn lseries(cfg: &SuiteConfig) -> Run {
    let lc = standard(cfg)?;
    let lev = cfg.level()?;
    let params = lc.params();
    let lat = lc.lattice().clone();
    let z = mp::czero(lc.working_prec());
    let mut ints = Vec::new();
    let mut s = AdmissibleSampler::new(cfg.order, Some(lev), 6, cfg.seed ^ 9, cfg.prec);
    for _ in 0..5 {
        ints.push(s.sample()?);
    }
    let mut s1 = AdmissibleSampler::new(cfg.order, None, 6, cfg.seed ^ 10, cfg.prec);
    ints.push(s1.sample()?);
    let mut cases = Vec::new();
    for g in ints {
        let r = integral_check(&g, &lat, 2.0, &z, &z, cfg.radius)?;
        let label = if g.level.is_some() { "integral s=2" } else { "integral s=2 N=1" };
        cases.push(
            Case::new(label, vec![g.matrix], r.residual, r.tail_integral.max(r.tail_closed)).note(format!(
                "tails {:.1e}/{:.1e}, {} pairs, {} nodes",
                r.tail_integral, r.tail_closed, r.pairs, r.quadrature_nodes
            )),
        );
    }
    let mut s = AdmissibleSampler::new(cfg.order, Some(lev), cfg.height, cfg.seed ^ 11, cfg.prec);
    let mut gs = Vec::new();
    for _ in 0..cfg.samples {
        gs.push(s.sample()?);
    }
    cases.extend(collect(gs, |g| {
        let r = l_closed_s1(&g, &z, &z, &lc, &params)?;
        let mut c = Case::new("closed s=1 cross-check", vec![g.matrix], r.cross_check, 1e-25)
            .note(format!("printed-form gap {:.3e}", r.printed_gap));
        c.verdict = Some(r.cross_check < 1e-15);
        Ok(vec![c])
    })?);
    Ok((cases, env(cfg, &lc)))
}

pub const WITNESS_HEIGHT: u64 = 1 << 40;

fn integrality(cfg: &SuiteConfig) -> Run {
    let lev = cfg.level()?;
    let field = integral_lattice(&cfg.order, cfg.prec + 32)?;
    let lc = LatticeConstants::new(&field.lattice)?;
    let params = lc.params();
    let tol = cfg.tol(1e-40);
    let z = mp::czero(lc.working_prec());
    let mut values: Vec<(String, Vec<Mat2>, Complex)> = vec![
        ("g2".into(), vec![], field.g2.clone()),
        ("g3".into(), vec![], field.g3.clone()),
    ];
    let mut s = Gamma0Sampler::new(cfg.order, Some(lev), cfg.height, cfg.seed ^ 12);
    for m in s.sample_n(5)? {
        values.push(("phi-n".into(), vec![m], phi_n0(&m, &lev, &lc)?.value));
    }
    let mut s = AdmissibleSampler::new(cfg.order, Some(lev), cfg.height, cfg.seed ^ 13, cfg.prec + 32);
    for _ in 0..3 {
        let g = s.sample()?;
        let r = l_closed_s1(&g, &z, &z, &lc, &params)?;
        let d = Complex::with_val(lc.prec(), &g.alpha - &g.alpha_p);
        values.push(("(alpha-alpha')L_N(A_N,1)".into(), vec![g.matrix], d * r.l_n));
    }
    let cases = collect(values, |(label, ms, v)| {
        let w = recognize_integrality(&v, &field, cfg.prec)?;
        let ok = w.status == WitnessStatus::Integral && w.height < WITNESS_HEIGHT && w.residual < tol;
        let diag = match w.status {
            WitnessStatus::Integral => format!("witness {:?}, height {}", w.coords, w.height),
            WitnessStatus::NonIntegral => format!("failed: relation {:?} needs a denominator", w.relation),
            WitnessStatus::Inconclusive => format!(
                "inconclusive at {} bits: best relation {:?}, residual {:.2e}",
                w.precision_bits, w.relation, w.residual
            ),
        };
        let mut c = Case::new(label, ms, w.residual, tol).note(diag);
        c.verdict = Some(ok);
        Ok(vec![c])
    })?;
    Ok((cases, env(cfg, &lc)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> SuiteConfig {
        let o = OrderSpec::maximal(-8).unwrap();
        let mut c = SuiteConfig::new(o, Some(Level::new(o.sqrt_neg_d()).unwrap()), 128);
        c.samples = 2;
        c.height = 6;
        c
    }

    #[test]
    fn small_suites_pass() {
        for s in [Suite::CocycleRelation, Suite::Homomorphism, Suite::Consistency, Suite::Involution] {
            let r = s.run(&cfg()).unwrap();
            assert!(r.pass, "{} {}", r.suite, r.max_residual);
        }
        let mut c = cfg();
        c.hecke_prime = Some(c.order.elem(1, 1));
        assert!(Suite::Hecke.run(&c).unwrap().pass);
    }

    #[test]
    fn rejects_unresolvable_tolerance() {
        let mut c = cfg();
        c.tolerance = Some(1e-60);
        assert!(Suite::Homomorphism.run(&c).is_err());
        assert_eq!(Suite::parse("hecke"), Some(Suite::Hecke));
        assert!(Suite::parse("nope").is_none());
    }

    #[test]
    fn reports_are_deterministic() {
        let a = Suite::CocycleRelation.run(&cfg()).unwrap();
        let b = Suite::CocycleRelation.run(&cfg()).unwrap();
        let ra: Vec<f64> = a.cases.iter().map(|c| c.residual).collect();
        let rb: Vec<f64> = b.cases.iter().map(|c| c.residual).collect();
        assert_eq!(ra, rb);
    }
}
