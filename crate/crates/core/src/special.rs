//! Special functions not provided by MPFR.

use rug::float::Constant;
use rug::Float;

use crate::error::{Error, Result};

/// Crossover into the asymptotic expansion: the smallest term of the
/// expansion is about `e^{-2t}`, so it is accurate once `2t` exceeds the
/// working precision in nats.
fn asymptotic_threshold(prec: u32) -> f64 {
    (prec as f64) * std::f64::consts::LN_2 / 2.0 + 8.0
}

/// Modified Bessel function of the second kind, order one.
///
/// Small and moderate `t` use the ascending series, which cancels from
/// `e^{t}`-sized terms down to `e^{-t}`; the guard bits cover that loss.
/// Large `t` use the Hankel asymptotic expansion.
pub fn bessel_k1(t: &Float, prec: u32) -> Result<Float> {
    if !t.is_finite() || *t <= 0 {
        return Err(Error::Domain(format!("K1 needs t > 0, got {t}")));
    }
    let tf = t.to_f64();
    if tf > asymptotic_threshold(prec) {
        bessel_k1_asymptotic(t, prec)
    } else {
        Ok(bessel_k1_series(t, prec))
    }
}

fn bessel_k1_series(t: &Float, prec: u32) -> Float {
    let tf = t.to_f64();
    let extra = (2.0 * tf * std::f64::consts::LOG2_E).ceil() as u32 + 32;
    let wp = prec + extra;
    let x = Float::with_val(wp, t);
    let y = Float::with_val(wp, x.square_ref()) / 4u32; // x²/4
    let euler = Float::with_val(wp, Constant::Euler);
    let eps = Float::with_val(wp, Float::i_exp(1, -(wp as i32)));

    // term_k = (x²/4)^k / (k!(k+1)!)
    let mut term = Float::with_val(wp, 1);
    let mut i1_sum = Float::with_val(wp, 0);
    let mut psi_sum = Float::with_val(wp, 0);
    // ψ(k+1) + ψ(k+2) = −2γ + 2H_k + 1/(k+1)
    let mut harmonic = Float::with_val(wp, 0);
    let mut k: u32 = 0;
    loop {
        let psi = Float::with_val(wp, &harmonic * 2u32) - Float::with_val(wp, &euler * 2u32)
            + Float::with_val(wp, 1) / (k + 1);
        i1_sum += &term;
        psi_sum += Float::with_val(wp, &term * &psi);
        if k > 2 && term < Float::with_val(wp, &eps * &i1_sum) {
            break;
        }
        k += 1;
        harmonic += Float::with_val(wp, 1) / k;
        term *= &y;
        term /= k;
        term /= k + 1;
    }
    let half_x = Float::with_val(wp, &x / 2u32);
    let i1 = Float::with_val(wp, &half_x * &i1_sum);
    let ln = Float::with_val(wp, half_x.ln_ref());
    let quarter = Float::with_val(wp, &x / 4u32);
    let res = Float::with_val(wp, x.recip_ref()) + ln * i1 - quarter * psi_sum;
    Float::with_val(prec, res)
}

fn bessel_k1_asymptotic(t: &Float, prec: u32) -> Result<Float> {
    let wp = prec + 16;
    let x = Float::with_val(wp, t);
    let eps = Float::with_val(wp, Float::i_exp(1, -(wp as i32)));
    // a_k = Π_{j=1..k} (4 − (2j−1)²) / (k! 8^k)
    let mut term = Float::with_val(wp, 1);
    let mut sum = Float::with_val(wp, 1);
    let mut prev = Float::with_val(wp, f64::INFINITY);
    let mut k: i64 = 1;
    loop {
        let odd = 2 * k - 1;
        term *= 4 - odd * odd;
        term /= 8 * k;
        term /= &x;
        let mag = Float::with_val(wp, term.abs_ref());
        if mag >= prev {
            return Err(Error::Precision(format!(
                "asymptotic K1 series diverged before convergence at t = {t}"
            )));
        }
        sum += &term;
        if mag < eps {
            break;
        }
        prev = mag;
        k += 1;
    }
    let pi = Float::with_val(wp, Constant::Pi);
    let pref = (pi / Float::with_val(wp, &x * 2u32)).sqrt() * Float::with_val(wp, (-x).exp_ref());
    Ok(Float::with_val(prec, pref * sum))
}

/// `Γ(a, x)` for real `a` and `x > 0`.
pub fn gamma_upper(a: &Float, x: &Float, prec: u32) -> Float {
    let wp = prec + 16;
    let a = Float::with_val(wp, a);
    let x = Float::with_val(wp, x);
    if a == 1 {
        return Float::with_val(prec, (-x).exp_ref());
    }
    if a == 2 {
        let e = Float::with_val(wp, (-Float::with_val(wp, &x)).exp_ref());
        return Float::with_val(prec, (x + 1u32) * e);
    }
    Float::with_val(prec, a.gamma_inc(&x))
}

#[cfg(test)]
mod tests {
    use super::*;

    // Trapezoid rule on ∫_0^∞ e^{−t cosh s} cosh s ds, exponentially
    // convergent for this analytic integrand.
    fn k1_quadrature(t: f64) -> f64 {
        let h = 0.01;
        let mut sum = 0.5 * (-t).exp();
        let mut s: f64 = h;
        loop {
            let c = s.cosh();
            let f = (-t * c).exp() * c;
            sum += f;
            if f < 1e-300 || s > 40.0 {
                break;
            }
            s += h;
        }
        sum * h
    }

    #[test]
    fn k1_at_one() {
        let v = bessel_k1(&Float::with_val(128, 1), 128).unwrap();
        assert!((v.to_f64() - 0.601_907_230_197_234_6).abs() < 1e-15);
        assert!((v.to_f64() - k1_quadrature(1.0)).abs() < 1e-14);
    }

    #[test]
    fn k1_small_argument_limit() {
        let t = Float::with_val(128, 1e-6);
        let v = bessel_k1(&t, 128).unwrap();
        assert!((v.to_f64() * 1e-6 - 1.0).abs() < 1e-5);
    }

    #[test]
    fn k1_matches_quadrature_and_decreases() {
        let mut prev = f64::INFINITY;
        for i in 1..60 {
            let t = 0.37 * i as f64;
            let v = bessel_k1(&Float::with_val(128, t), 128).unwrap().to_f64();
            let q = k1_quadrature(t);
            assert!((v - q).abs() <= 1e-13 * q, "t={t}: {v} vs {q}");
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn k1_regimes_agree_at_switchover() {
        let prec = 128;
        let t0 = asymptotic_threshold(prec) + 1.0;
        let t = Float::with_val(prec, t0);
        let a = bessel_k1_series(&t, prec);
        let b = bessel_k1_asymptotic(&t, prec).unwrap();
        let rel = (Float::with_val(prec, &a - &b) / &a).abs().to_f64();
        assert!(rel < 1e-36, "relative gap {rel}");
    }

    #[test]
    fn k1_rejects_non_positive() {
        assert!(bessel_k1(&Float::with_val(64, 0), 64).is_err());
        assert!(bessel_k1(&Float::with_val(64, -1), 64).is_err());
    }

    #[test]
    fn incomplete_gamma_closed_forms() {
        let x = Float::with_val(128, 1.7);
        for a in [1.0, 2.0, 0.5, 3.0] {
            let fast = gamma_upper(&Float::with_val(128, a), &x, 128);
            let slow = Float::with_val(128, a).gamma_inc(&x);
            assert!(Float::with_val(128, &fast - &slow).abs().to_f64() < 1e-35);
        }
    }
}
