mod args;
mod cache;
mod error;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::Parser;
use drb_core::cocycle::{phi, phi_n, phi_n0, phi_pq, CocycleValue};
use drb_core::dedekind::{d_smoothed, d_sum_pq};
use drb_core::lseries::{geodesic_data, integral_check, l_closed_s1, l_direct, GeodesicData};
use drb_core::mp::{self, parse_complex, DecimalComplex};
use drb_core::suites::{Suite, SuiteConfig};
use drb_core::{LatticeConstants, Level, Mat2, OrderSpec, Point3, QuadInt, SeriesParams};
use num_complex::Complex64;
use rug::{Complex, Float};
use serde::Deserialize;
use serde_json::{json, Value};

use args::{CacheOp, Cli, Command, LvalueOp, PqArgs, SeriesKind, SeriesOp, VerifyArgs};
use error::{usage, CliError};

/// Config-file entries; any present key overrides the matching flag.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    disc: Option<i64>,
    prec: Option<u32>,
    #[serde(rename = "N")]
    level: Option<String>,
    seed: Option<u64>,
    samples: Option<usize>,
    height: Option<i64>,
    radius: Option<f64>,
    #[serde(default)]
    tolerances: BTreeMap<String, f64>,
    cache_dir: Option<PathBuf>,
    no_cache: Option<bool>,
}

struct Ctx {
    order: OrderSpec,
    prec: u32,
    cache_dir: Option<PathBuf>,
    file: FileConfig,
}

impl Ctx {
    fn from_cli(cli: &Cli) -> Result<Ctx, CliError> {
        let file = match &cli.global.config {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| usage(format!("cannot read config {}: {e}", p.display())))?;
                serde_json::from_str(&text).map_err(|e| usage(format!("bad config {}: {e}", p.display())))?
            }
            None => FileConfig::default(),
        };
        let disc = file.disc.unwrap_or(cli.global.disc);
        let prec = file.prec.unwrap_or(cli.global.prec);
        if !(64..=4096).contains(&prec) {
            return Err(usage(format!("precision {prec} must lie in 64..=4096 bits")));
        }
        let order = OrderSpec::maximal(disc)?;
        let no_cache = file.no_cache.unwrap_or(cli.global.no_cache);
        let cache_dir = if no_cache {
            None
        } else {
            Some(
                file.cache_dir
                    .clone()
                    .or_else(|| cli.global.cache_dir.clone())
                    .unwrap_or_else(cache::default_dir),
            )
        };
        Ok(Ctx {
            order,
            prec,
            cache_dir,
            file,
        })
    }

    fn constants(&self) -> Result<(Arc<LatticeConstants>, cache::CacheStatus), CliError> {
        cache::load_or_compute(&self.order, self.prec, self.cache_dir.as_deref())
    }

    fn wp(&self) -> u32 {
        self.prec + 64
    }

    fn elem(&self, s: &str) -> Result<QuadInt, CliError> {
        Ok(self.order.parse(s)?)
    }

    fn level(&self, flag: Option<&String>) -> Result<Option<Level>, CliError> {
        match flag.or(self.file.level.as_ref()) {
            Some(s) => Ok(Some(Level::new(self.elem(s)?)?)),
            None => Ok(None),
        }
    }

    fn matrix(&self, s: &str) -> Result<Mat2, CliError> {
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 4 {
            return Err(usage(format!("matrix needs four entries a,b,c,d, got '{s}'")));
        }
        let e: Vec<QuadInt> = parts.iter().map(|p| self.elem(p)).collect::<Result<_, _>>()?;
        let m = Mat2::new(e[0], e[1], e[2], e[3]);
        if !m.is_sl2() {
            return Err(usage(format!("matrix {m} has determinant {}, expected 1", m.det())));
        }
        Ok(m)
    }

    fn pq(&self, pq: &PqArgs) -> Result<Option<(Complex, Complex)>, CliError> {
        let wp = self.wp();
        match (&pq.p, &pq.q) {
            (None, None) => Ok(None),
            (p, q) => {
                let f = |x: &Option<String>| -> Result<Complex, CliError> {
                    match x {
                        Some(s) => Ok(parse_complex(s, wp)?),
                        None => Ok(mp::czero(wp)),
                    }
                };
                Ok(Some((f(p)?, f(q)?)))
            }
        }
    }
}

fn cjson(z: &Complex) -> Value {
    serde_json::to_value(DecimalComplex::from_complex(z)).unwrap_or(Value::Null)
}

fn with_budget(z: &Complex, budget: f64) -> Value {
    json!({ "value": cjson(z), "error_budget": budget })
}

fn rounding_budget(z: &Complex, prec: u32, terms: f64) -> f64 {
    64.0 * (terms + 8.0) * 2f64.powi(-(prec as i32)) * (1.0 + mp::mag_f64(z))
}

fn cocycle_json(v: &CocycleValue) -> Value {
    json!({
        "matrix": v.matrix,
        "level": v.level,
        "branch": v.branch,
        "value": cjson(&v.value),
        "error_budget": v.error_budget,
    })
}

fn geodesic_json(g: &GeodesicData) -> Value {
    json!({
        "matrix": g.matrix,
        "level": g.level.map(|l| l.n),
        "alpha": cjson(&g.alpha),
        "alpha_prime": cjson(&g.alpha_p),
        "eps": cjson(&g.eps),
        "eps_prime": cjson(&g.eps_p),
        "theta": g.theta,
    })
}

fn parse_floats(s: &str, prec: u32, n: usize) -> Result<Vec<Float>, CliError> {
    let v: Vec<Float> = s
        .split(',')
        .map(|t| {
            Float::parse(t.trim())
                .map(|x| Float::with_val(prec, x))
                .map_err(|e| usage(format!("bad number '{t}': {e}")))
        })
        .collect::<Result<_, _>>()?;
    if v.len() != n {
        return Err(usage(format!("expected {n} comma-separated numbers, got '{s}'")));
    }
    Ok(v)
}

fn point3(s: &str, prec: u32) -> Result<Point3, CliError> {
    let v = parse_floats(s, prec, 3)?;
    Ok(Point3::new(Complex::with_val(prec, (&v[0], &v[1])), v[2].clone())?)
}

fn series(ctx: &Ctx, op: &SeriesOp) -> Result<(Value, bool), CliError> {
    let SeriesOp::Eval { kind, point, n, target } = op;
    let (lc, cache) = ctx.constants()?;
    let wp = lc.working_prec();
    let params = SeriesParams::new(ctx.prec);
    let need = |p: &Option<String>| p.clone().ok_or_else(|| usage("--point is required for this kind"));
    let (value, budget) = match kind {
        SeriesKind::E1 | SeriesKind::E2 | SeriesKind::E => {
            let x = parse_complex(&need(point)?, wp)?;
            let v = match kind {
                SeriesKind::E1 => lc.e1(&x),
                SeriesKind::E2 => lc.e2(&x),
                _ => lc.e_aux(&x, &params),
            };
            let b = rounding_budget(&v, ctx.prec, 16.0);
            (v, b)
        }
        SeriesKind::E2zero => {
            let v = lc.e2zero().clone();
            let b = rounding_budget(&v, ctx.prec, 0.0);
            (v, b)
        }
        SeriesKind::H | SeriesKind::Hn => {
            let u = point3(&need(point)?, wp)?;
            let hp = SeriesParams::new(ctx.prec).with_target(*target);
            let v = if *kind == SeriesKind::H {
                lc.h_value(&u, &hp)?
            } else {
                let lev = ctx.level(n.as_ref())?.ok_or_else(|| usage("kind hn needs --N"))?;
                lc.h_n_value(&u, &lev.n, &hp)?
            };
            let b = *target * if *kind == SeriesKind::Hn { 2.0 } else { 1.0 };
            (v, b)
        }
    };
    Ok((
        json!({
            "kind": format!("{kind:?}").to_lowercase(),
            "disc": ctx.order.disc(),
            "precision": ctx.prec,
            "point": point,
            "result": with_budget(&value, budget),
            "cache": cache,
        }),
        true,
    ))
}

fn dedekind(ctx: &Ctx, a: &str, c: &str, n: Option<&String>, pq: &PqArgs) -> Result<(Value, bool), CliError> {
    let (lc, _) = ctx.constants()?;
    let a = ctx.elem(a)?;
    let c = ctx.elem(c)?;
    let z = mp::czero(lc.working_prec());
    let (p, q) = ctx.pq(pq)?.unwrap_or((z.clone(), z));
    let v = match ctx.level(n)? {
        Some(l) => d_smoothed(&a, &c, &l, &p, &q, &lc)?,
        None => d_sum_pq(&a, &c, &p, &q, &lc)?,
    };
    let b = rounding_budget(&v, ctx.prec, 2.0 * c.norm() as f64);
    Ok((json!({ "a": a, "c": c, "level": n, "value": cjson(&v), "error_budget": b }), true))
}

fn cocycle(ctx: &Ctx, matrix: &str, n: Option<&String>, pq: &PqArgs) -> Result<(Value, bool), CliError> {
    let (lc, _) = ctx.constants()?;
    let m = ctx.matrix(matrix)?;
    let params = lc.params();
    let pq = ctx.pq(pq)?;
    let out = match (ctx.level(n)?, pq) {
        (None, None) => cocycle_json(&phi(&m, &lc)?),
        (None, Some((p, q))) => cocycle_json(&phi_pq(&m, &p, &q, &lc, &params)?),
        (Some(l), None) => {
            if !m.in_gamma0(&l) {
                return Err(drb_core::Error::NotInGamma0.into());
            }
            cocycle_json(&phi_n0(&m, &l, &lc)?)
        }
        (Some(l), Some((p, q))) => {
            let r = phi_n(&m, &l, &p, &q, &lc, &params)?;
            let mut v = cocycle_json(&r.value);
            v["explicit"] = cjson(&r.explicit);
            v["explicit_gap"] = json!(r.gap);
            v["forms_must_agree"] = json!(r.forms_must_agree);
            v
        }
    };
    Ok((out, true))
}

fn verify(ctx: &Ctx, a: &VerifyArgs) -> Result<(Value, bool), CliError> {
    let suite = Suite::parse(&a.suite).ok_or_else(|| {
        let names: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
        usage(format!("unknown suite '{}'; expected one of {}", a.suite, names.join(", ")))
    })?;
    let mut cfg = SuiteConfig::new(ctx.order, ctx.level(a.n.as_ref())?, ctx.prec);
    if let Some(s) = a.seed.or(ctx.file.seed) {
        cfg.seed = s;
    }
    if let Some(s) = a.samples.or(ctx.file.samples) {
        if s == 0 {
            return Err(usage("--samples must be positive"));
        }
        cfg.samples = s;
    }
    if let Some(h) = a.height.or(ctx.file.height) {
        cfg.height = h;
    }
    if let Some(r) = a.radius.or(ctx.file.radius) {
        cfg.radius = r;
    }
    cfg.tolerance = a.tol.or_else(|| ctx.file.tolerances.get(suite.name()).copied());
    if let Some(p) = &a.p {
        cfg.hecke_prime = Some(ctx.elem(p)?);
    }
    if suite == Suite::Hecke && cfg.hecke_prime.is_none() {
        return Err(usage("verify hecke needs --p"));
    }
    if matches!(suite, Suite::Consistency | Suite::Lseries | Suite::Integrality) && cfg.level.is_none() {
        return Err(usage(format!("verify {} needs --N", suite.name())));
    }
    // validated here so that a bad tolerance is a config error, not a failed run
    let tol = cfg.tolerance.unwrap_or(suite.default_tolerance());
    if tol < suite.minimum_tolerance(ctx.prec) {
        return Err(usage(format!(
            "tolerance {tol:.1e} is below the error budget reachable at {} bits",
            ctx.prec
        )));
    }
    let (lc, _) = ctx.constants()?;
    cfg.constants = Some(lc);
    let report = suite.run(&cfg)?;
    let pass = report.pass;
    Ok((serde_json::to_value(report)?, pass))
}

fn parse_s(s: &str) -> Result<Complex64, CliError> {
    let v = parse_floats(s, 64, s.split(',').count())?;
    match v.as_slice() {
        [re] => Ok(Complex64::new(re.to_f64(), 0.0)),
        [re, im] => Ok(Complex64::new(re.to_f64(), im.to_f64())),
        _ => Err(usage(format!("s must be 're' or 're,im', got '{s}'"))),
    }
}

/// Residual bound for `lvalue check-integral` at `s = 2`.
const INTEGRAL_TOLERANCE: f64 = 1e-4;

fn lvalue(ctx: &Ctx, op: &LvalueOp) -> Result<(Value, bool), CliError> {
    let (lc, _) = ctx.constants()?;
    let z = mp::czero(lc.working_prec());
    let get_pq = |pq: &PqArgs| -> Result<(Complex, Complex), CliError> {
        Ok(ctx.pq(pq)?.unwrap_or((z.clone(), z.clone())))
    };
    match op {
        LvalueOp::Direct { matrix, n, s, radius, pq } => {
            let g = geodesic_data(&ctx.matrix(matrix)?, ctx.level(n.as_ref())?, ctx.prec)?;
            let (p, q) = get_pq(pq)?;
            let r = l_direct(&g, lc.lattice(), parse_s(s)?, &p, &q, *radius)?;
            Ok((json!({ "geodesic": geodesic_json(&g), "s": s, "result": r }), true))
        }
        LvalueOp::Closed { matrix, n, pq } => {
            let g = geodesic_data(&ctx.matrix(matrix)?, ctx.level(n.as_ref())?, ctx.prec)?;
            let (p, q) = get_pq(pq)?;
            let r = l_closed_s1(&g, &p, &q, &lc, &lc.params())?;
            let b = rounding_budget(&r.l_n, ctx.prec, 64.0);
            Ok((
                json!({
                    "geodesic": geodesic_json(&g),
                    "l_n": with_budget(&r.l_n, b),
                    "l": with_budget(&r.l, b),
                    "phi_n_from_l": with_budget(&r.phi_n, b),
                    "phi_n_cocycle": with_budget(&r.phi_n_cocycle, b),
                    "cross_check": r.cross_check,
                    "printed_form": cjson(&r.printed_form),
                    "printed_form_gap": r.printed_gap,
                }),
                true,
            ))
        }
        LvalueOp::CheckIntegral { matrix, n, s, radius, pq } => {
            let g = geodesic_data(&ctx.matrix(matrix)?, ctx.level(n.as_ref())?, ctx.prec)?;
            let (p, q) = get_pq(pq)?;
            let r = integral_check(&g, lc.lattice(), *s, &p, &q, *radius)?;
            let pass = r.residual < INTEGRAL_TOLERANCE;
            Ok((
                json!({
                    "geodesic": geodesic_json(&g),
                    "result": r,
                    "tolerance": INTEGRAL_TOLERANCE,
                    "pass": pass,
                }),
                pass,
            ))
        }
    }
}

fn cache_cmd(ctx: &Ctx, op: &CacheOp) -> Result<(Value, bool), CliError> {
    let dir: &Path = ctx
        .cache_dir
        .as_deref()
        .ok_or_else(|| usage("cache commands need a cache directory (drop --no-cache)"))?;
    match op {
        CacheOp::Status => Ok((
            json!({ "dir": dir, "entries": cache::status(dir)? }),
            true,
        )),
        CacheOp::Warm => {
            let (lc, st) = ctx.constants()?;
            Ok((
                json!({
                    "dir": dir,
                    "status": st,
                    "disc": ctx.order.disc(),
                    "precision": lc.prec(),
                    "e2zero": cjson(lc.e2zero()),
                    "g2": cjson(lc.g2()),
                    "g3": cjson(lc.g3()),
                    "convention": lc.convention(),
                }),
                true,
            ))
        }
        CacheOp::Clear => Ok((json!({ "dir": dir, "removed": cache::clear(dir)? }), true)),
    }
}

fn dispatch(cli: &Cli) -> Result<(Value, bool), CliError> {
    let ctx = Ctx::from_cli(cli)?;
    match &cli.command {
        Command::Series { op } => series(&ctx, op),
        Command::Dedekind { a, c, n, pq } => dedekind(&ctx, a, c, n.as_ref(), pq),
        Command::Cocycle { matrix, n, pq } => cocycle(&ctx, matrix, n.as_ref(), pq),
        Command::Verify(a) => verify(&ctx, a),
        Command::Lvalue { op } => lvalue(&ctx, op),
        Command::Cache { op } => cache_cmd(&ctx, op),
    }
}

// a closed pipe (e.g. `| head`) is not an error worth reporting
fn emit(s: &str) {
    use std::io::Write;
    let _ = writeln!(std::io::stdout().lock(), "{s}");
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok((v, pass)) => {
            emit(&serde_json::to_string_pretty(&v).unwrap_or_default());
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            emit(&json!({ "error": e.to_string() }).to_string());
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
