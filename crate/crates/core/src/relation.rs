//! Integer-relation detection by LLL reduction.

use rug::{Complex, Float, Integer};
use serde::Serialize;

use crate::error::{Error, Result};

/// LLL-reduce the rows of an integer matrix (δ = 0.99).
pub fn lll_reduce(basis: &mut Vec<Vec<Integer>>, prec: u32) {
    let n = basis.len();
    if n < 2 {
        return;
    }
    let delta = Float::with_val(prec, 0.99);
    let to_f = |v: &Vec<Integer>| -> Vec<Float> { v.iter().map(|x| Float::with_val(prec, x)).collect() };
    let dot = |a: &[Float], b: &[Float]| -> Float {
        let mut s = Float::with_val(prec, 0);
        for (x, y) in a.iter().zip(b) {
            s += Float::with_val(prec, x * y);
        }
        s
    };
    // Gram–Schmidt from scratch; dimensions here are tiny
    let gso = |basis: &Vec<Vec<Integer>>| -> (Vec<Vec<Float>>, Vec<Float>) {
        let bf: Vec<Vec<Float>> = basis.iter().map(to_f).collect();
        let mut bstar: Vec<Vec<Float>> = Vec::with_capacity(n);
        let mut mu = vec![vec![Float::with_val(prec, 0); n]; n];
        let mut nrm = Vec::with_capacity(n);
        for i in 0..n {
            let mut v = bf[i].clone();
            for j in 0..i {
                let m = dot(&bf[i], &bstar[j]) / &nrm[j];
                for (vk, bk) in v.iter_mut().zip(&bstar[j]) {
                    *vk -= Float::with_val(prec, &m * bk);
                }
                mu[i][j] = m;
            }
            nrm.push(dot(&v, &v));
            bstar.push(v);
        }
        (mu, nrm)
    };
    let (mut mu, mut nrm) = gso(basis);
    let mut k = 1;
    let mut guard = 0usize;
    while k < n && guard < 100_000 {
        guard += 1;
        for j in (0..k).rev() {
            let r = Float::with_val(prec, mu[k][j].round_ref());
            if r != 0 {
                let ri = r.to_integer().expect("finite");
                for c in 0..basis[k].len() {
                    let t = Integer::from(&ri * &basis[j][c]);
                    basis[k][c] -= t;
                }
                let (m2, n2) = gso(basis);
                mu = m2;
                nrm = n2;
            }
        }
        let lhs = nrm[k].clone();
        let rhs = (delta.clone() - Float::with_val(prec, mu[k][k - 1].square_ref())) * &nrm[k - 1];
        if lhs >= rhs {
            k += 1;
        } else {
            basis.swap(k, k - 1);
            let (m2, n2) = gso(basis);
            mu = m2;
            nrm = n2;
            k = k.max(2) - 1;
        }
    }
}

/// A small integer relation `Σ cᵢ xᵢ ≈ 0` among complex numbers.
#[derive(Clone, Debug, Serialize)]
pub struct Relation {
    pub coeffs: Vec<i64>,
    pub residual: f64,
    pub height: u64,
}

/// Search for an integer relation among `xs` (real and imaginary parts
/// must vanish simultaneously), using `scale_bits` of the input precision.
pub fn find_relation(xs: &[Complex], scale_bits: u32) -> Result<Relation> {
    let n = xs.len();
    if n < 2 {
        return Err(Error::Degenerate("need at least two values".into()));
    }
    let prec = xs.iter().map(|x| x.prec().0).max().unwrap_or(64) + 64;
    let scale = Float::with_val(prec, Float::i_exp(1, scale_bits as i32));
    let mut basis: Vec<Vec<Integer>> = Vec::with_capacity(n);
    for (i, x) in xs.iter().enumerate() {
        let mut row = vec![Integer::new(); n + 2];
        row[i] = Integer::from(1);
        let re = Float::with_val(prec, x.real() * &scale);
        let im = Float::with_val(prec, x.imag() * &scale);
        row[n] = re.round().to_integer().ok_or_else(|| Error::Precision("non-finite value".into()))?;
        row[n + 1] = im.round().to_integer().ok_or_else(|| Error::Precision("non-finite value".into()))?;
        basis.push(row);
    }
    lll_reduce(&mut basis, prec);
    let best = &basis[0];
    let mut coeffs = Vec::with_capacity(n);
    for c in &best[..n] {
        coeffs.push(c.to_i64().ok_or_else(|| Error::Precision("relation coefficient overflow".into()))?);
    }
    let mut acc = Complex::new(prec);
    for (c, x) in coeffs.iter().zip(xs) {
        acc += Complex::with_val(prec, x * *c);
    }
    let residual = Float::with_val(prec, acc.abs_ref()).to_f64();
    let height = coeffs.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0);
    Ok(Relation {
        coeffs,
        residual,
        height,
    })
}
