//! High-precision reference route for the Welch statistics.
//!
//! The p-value here is computed from the continued-fraction expansion of the
//! regularized incomplete beta function (modified Lentz iteration) with a
//! Spouge log-gamma, a completely different evaluation route than the
//! quadrature in `harness::stats`.

use crate::error::Result;
use crate::harness::stats::{variance_bessel, WelchTest};

/// Welch t, Welch-Satterthwaite df, and two-tailed p from the
/// continued-fraction route.
pub fn welch_reference(group_a: &[f64], group_b: &[f64]) -> Result<WelchTest> {
    let na = group_a.len() as f64;
    let nb = group_b.len() as f64;
    let ma = group_a.iter().sum::<f64>() / na;
    let mb = group_b.iter().sum::<f64>() / nb;
    let sa = variance_bessel(group_a)? / na;
    let sb = variance_bessel(group_b)? / nb;
    let se2 = sa + sb;
    let diff = ma - mb;
    let t = if diff == 0.0 {
        0.0
    } else if se2 == 0.0 {
        f64::INFINITY * diff.signum()
    } else {
        diff / se2.sqrt()
    };
    let df = if se2 == 0.0 {
        na + nb - 2.0
    } else {
        se2 * se2 / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0))
    };
    let p = student_t_two_tailed_p_cf(t, df);
    Ok(WelchTest { t, df, p })
}

/// Two-tailed Student-t p-value via I_x(df/2, 1/2), continued fraction.
pub fn student_t_two_tailed_p_cf(t: f64, df: f64) -> f64 {
    if t == 0.0 {
        return 1.0;
    }
    if t.is_infinite() {
        return 0.0;
    }
    let x = df / (df + t * t);
    regularized_incomplete_beta(df / 2.0, 0.5, x)
}

/// Regularized incomplete beta I_x(a, b) by the textbook continued fraction
/// with the symmetry switch at x = (a+1)/(a+b+2).
pub fn regularized_incomplete_beta(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front =
        ln_gamma_spouge(a + b) - ln_gamma_spouge(a) - ln_gamma_spouge(b) + a * x.ln()
            + b * (1.0 - x).ln();
    let front = ln_front.exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_continued_fraction(a, b, x) / a
    } else {
        1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b
    }
}

fn beta_continued_fraction(a: f64, b: f64, x: f64) -> f64 {
    const MAX_ITER: usize = 500;
    const EPS: f64 = 1e-16;
    const TINY: f64 = 1e-300;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        // even step
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        // odd step
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Spouge's approximation with a = 15 terms, positive arguments.
pub fn ln_gamma_spouge(z: f64) -> f64 {
    const A: usize = 15;
    let w = z - 1.0;
    let mut acc = (2.0 * std::f64::consts::PI).sqrt();
    let mut factorial_sign = 1.0;
    let mut factorial = 1.0;
    for k in 1..A {
        if k > 1 {
            factorial *= (k - 1) as f64;
        }
        let kk = k as f64;
        let c = factorial_sign / factorial
            * (A as f64 - kk).powf(kk - 0.5)
            * (A as f64 - kk).exp();
        acc += c / (w + kk);
        factorial_sign = -factorial_sign;
    }
    (w + 0.5) * (w + A as f64).ln() - (w + A as f64) + acc.ln()
}
