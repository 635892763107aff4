//! Two-sample statistics: Welch's t-test, Bessel-corrected spread, and the
//! variance-reduction ratio.
//!
//! The two-tailed p-value comes from the regularized incomplete beta
//! identity for the Student-t tail, evaluated by adaptive quadrature after a
//! substitution that removes the endpoint singularity. No statistical
//! library is assumed; the continued-fraction evaluation in
//! [`crate::oracle::stats`] is the independent cross-check.

use crate::error::{Error, Result};

/// Welch's t-test outcome: statistic, Welch-Satterthwaite degrees of
/// freedom, and the two-tailed p-value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WelchTest {
    pub t: f64,
    pub df: f64,
    pub p: f64,
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample variance with Bessel's correction (divisor n - 1).
pub fn variance_bessel(xs: &[f64]) -> Result<f64> {
    if xs.len() < 2 {
        return Err(Error::InsufficientSamples { needed: 2, got: xs.len() });
    }
    let m = mean(xs);
    Ok(xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64)
}

pub fn std_bessel(xs: &[f64]) -> Result<f64> {
    Ok(variance_bessel(xs)?.sqrt())
}

/// 1 - s_a / s_b: the fraction by which group a's spread undercuts group b's.
pub fn variance_reduction(std_a: f64, std_b: f64) -> Option<f64> {
    if std_b > 0.0 {
        Some(1.0 - std_a / std_b)
    } else {
        None
    }
}

/// Welch's t-test for unequal variances, two-tailed.
///
/// Both groups need at least two samples. Identical groups give t = 0 and
/// p = 1; a nonzero mean difference over zero pooled variance gives an
/// infinite statistic and p = 0.
pub fn welch_t_test(group_a: &[f64], group_b: &[f64]) -> Result<WelchTest> {
    let na = group_a.len();
    let nb = group_b.len();
    if na < 2 {
        return Err(Error::InsufficientSamples { needed: 2, got: na });
    }
    if nb < 2 {
        return Err(Error::InsufficientSamples { needed: 2, got: nb });
    }
    let (ma, mb) = (mean(group_a), mean(group_b));
    let (va, vb) = (variance_bessel(group_a)?, variance_bessel(group_b)?);
    let sa = va / na as f64;
    let sb = vb / nb as f64;
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
        (na + nb - 2) as f64
    } else {
        se2 * se2 / (sa * sa / (na - 1) as f64 + sb * sb / (nb - 1) as f64)
    };

    let p = student_t_two_tailed_p(t, df);
    Ok(WelchTest { t, df, p })
}

/// P(|T| >= |t|) for Student's t with `df` degrees of freedom, via the
/// identity P = I_x(df/2, 1/2) with x = df / (df + t^2).
pub fn student_t_two_tailed_p(t: f64, df: f64) -> f64 {
    if t == 0.0 {
        return 1.0;
    }
    if t.is_infinite() {
        return 0.0;
    }
    let a = df / 2.0;
    let t2 = t * t;
    if t.abs() <= 2.0 {
        // complementary form: p = 1 - I_y(1/2, a) with y = t^2/(df + t^2).
        // Substituting u = s^2 turns the u^{-1/2} endpoint into a smooth
        // integrand 2 (1 - s^2)^{a-1} on [0, |t|/sqrt(df + t^2)].
        let upper = t.abs() / (df + t2).sqrt();
        let integral = adaptive_simpson(&|s: f64| (1.0 - s * s).powf(a - 1.0), 0.0, upper, 1e-13);
        let ln_b = ln_beta(0.5, a);
        1.0 - 2.0 * integral * (-ln_b).exp()
    } else {
        // direct form: p = I_x(a, 1/2). Substituting u = x v^2 gives
        // p = e^{a ln x - ln B(a, 1/2)} * Int_0^1 2 v^{2a-1} (1 - x v^2)^{-1/2} dv,
        // which keeps relative accuracy when the tail mass is tiny.
        let x = df / (df + t2);
        let integrand = |v: f64| {
            if v == 0.0 {
                0.0
            } else {
                2.0 * v.powf(2.0 * a - 1.0) / (1.0 - x * v * v).sqrt()
            }
        };
        let integral = adaptive_simpson(&integrand, 0.0, 1.0, 1e-13);
        let ln_b = ln_beta(a, 0.5);
        (a * x.ln() - ln_b).exp() * integral
    }
}

fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Lanczos approximation (g = 7, 9 terms), valid for positive arguments.
pub fn ln_gamma(z: f64) -> f64 {
    const COEFFS: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if z < 0.5 {
        // reflection formula
        let pi = std::f64::consts::PI;
        return (pi / (pi * z).sin()).ln() - ln_gamma(1.0 - z);
    }
    let z = z - 1.0;
    let mut acc = COEFFS[0];
    for (k, c) in COEFFS.iter().enumerate().skip(1) {
        acc += c / (z + k as f64);
    }
    let t = z + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (z + 0.5) * t.ln() - t + acc.ln()
}

/// Recursive adaptive Simpson quadrature with a relative tolerance on the
/// whole-interval scale.
fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let scale = whole.abs().max(1e-300);
    simpson_step(f, a, fa, b, fb, m, fm, whole, rel_tol * scale, 60)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
    m: f64,
    fm: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, fa, m, fm, lm, flm, left, tol / 2.0, depth - 1)
        + simpson_step(f, m, fm, b, fb, rm, frm, right, tol / 2.0, depth - 1)
}
