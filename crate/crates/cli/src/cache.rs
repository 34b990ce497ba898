//! On-disk cache of lattice constants, keyed by (disc, basis hash, precision).

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use drb_core::{ConstantsSnapshot, Lattice, LatticeConstants, OrderSpec};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct CacheFile {
    version: u32,
    snapshot: ConstantsSnapshot,
    /// SHA-256 of the serialized snapshot.
    checksum: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct CacheStatus {
    pub path: Option<PathBuf>,
    pub hit: bool,
    pub warning: Option<String>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Hash of the basis `{1, ω}` of the order, so distinct orders of one disc never collide.
pub fn basis_hash(order: &OrderSpec) -> String {
    let (t, n) = order.omega_descriptor();
    let tag = format!("basis:1,w;w={t},{n};f={}", order.conductor());
    sha256_hex(tag.as_bytes())[..12].to_string()
}

pub fn default_dir() -> PathBuf {
    match std::env::var_os("HOME") {
        Some(h) => PathBuf::from(h).join(".cache").join("drb"),
        None => PathBuf::from(".drb-cache"),
    }
}

pub fn file_name(order: &OrderSpec, prec: u32) -> String {
    format!("lc-{}-{}-{prec}.json", order.disc(), basis_hash(order))
}

fn checksum(snap: &ConstantsSnapshot) -> Result<String, CliError> {
    Ok(sha256_hex(&serde_json::to_vec(snap)?))
}

fn read(path: &Path, order: &OrderSpec, prec: u32) -> Result<LatticeConstants, String> {
    let text = fs::read_to_string(path).map_err(|e| e.to_string())?;
    let file: CacheFile = serde_json::from_str(&text).map_err(|e| format!("unreadable cache file: {e}"))?;
    if file.version != FORMAT_VERSION {
        return Err(format!("cache format {} is not {FORMAT_VERSION}", file.version));
    }
    let sum = checksum(&file.snapshot).map_err(|e| e.to_string())?;
    if sum != file.checksum {
        return Err("checksum mismatch".into());
    }
    let s = &file.snapshot;
    if s.disc != order.disc() || s.conductor != order.conductor() || s.prec != prec {
        return Err("cache key does not match its contents".into());
    }
    LatticeConstants::from_snapshot(s).map_err(|e| e.to_string())
}

pub fn store(dir: &Path, lc: &LatticeConstants) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir)?;
    let snapshot = lc.snapshot();
    let file = CacheFile {
        version: FORMAT_VERSION,
        checksum: checksum(&snapshot)?,
        snapshot,
    };
    let path = dir.join(file_name(lc.lattice().order(), lc.prec()));
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, serde_json::to_vec_pretty(&file)?)?;
    fs::rename(&tmp, &path)?;
    Ok(path)
}

/// Load constants from `dir` or compute them; a corrupt entry is recomputed with a warning.
pub fn load_or_compute(
    order: &OrderSpec,
    prec: u32,
    dir: Option<&Path>,
) -> Result<(Arc<LatticeConstants>, CacheStatus), CliError> {
    let Some(dir) = dir else {
        let lc = LatticeConstants::new(&Lattice::standard(*order, prec))?;
        return Ok((
            Arc::new(lc),
            CacheStatus {
                path: None,
                hit: false,
                warning: None,
            },
        ));
    };
    let path = dir.join(file_name(order, prec));
    let mut warning = None;
    if path.exists() {
        match read(&path, order, prec) {
            Ok(lc) => {
                return Ok((
                    Arc::new(lc),
                    CacheStatus {
                        path: Some(path),
                        hit: true,
                        warning: None,
                    },
                ))
            }
            Err(e) => {
                let w = format!("ignoring cache entry {}: {e}; recomputing", path.display());
                eprintln!("warning: {w}");
                warning = Some(w);
            }
        }
    }
    let lc = LatticeConstants::new(&Lattice::standard(*order, prec))?;
    let stored = store(dir, &lc)?;
    Ok((
        Arc::new(lc),
        CacheStatus {
            path: Some(stored),
            hit: false,
            warning,
        },
    ))
}

#[derive(Serialize)]
pub struct Entry {
    pub file: String,
    pub valid: bool,
    pub detail: Option<String>,
}

pub fn status(dir: &Path) -> Result<Vec<Entry>, CliError> {
    let mut out = Vec::new();
    let Ok(rd) = fs::read_dir(dir) else {
        return Ok(out);
    };
    let mut names: Vec<PathBuf> = rd
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    names.sort();
    for p in names {
        let check = fs::read_to_string(&p)
            .map_err(|e| e.to_string())
            .and_then(|t| serde_json::from_str::<CacheFile>(&t).map_err(|e| e.to_string()))
            .and_then(|f| {
                let sum = checksum(&f.snapshot).map_err(|e| e.to_string())?;
                if sum == f.checksum {
                    Ok(())
                } else {
                    Err("checksum mismatch".to_string())
                }
            });
        out.push(Entry {
            file: p.file_name().unwrap_or_default().to_string_lossy().into_owned(),
            valid: check.is_ok(),
            detail: check.err(),
        });
    }
    Ok(out)
}

pub fn clear(dir: &Path) -> Result<usize, CliError> {
    let mut n = 0;
    if let Ok(rd) = fs::read_dir(dir) {
        for e in rd.flatten() {
            let p = e.path();
            let name = p.file_name().unwrap_or_default().to_string_lossy();
            if name.starts_with("lc-") && name.ends_with(".json") {
                fs::remove_file(&p)?;
                n += 1;
            }
        }
    }
    Ok(n)
}
