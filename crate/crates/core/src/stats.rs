//! Summary statistics and Welch's two-sample t-test.
//!
//! The Student t distribution is evaluated through the regularized
//! incomplete beta function, computed with Lentz's continued fraction.

use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum StatsError {
    SampleTooSmall(usize),
    NonPositiveOptimum(f64),
    InvalidArgument(String),
}

impl fmt::Display for StatsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::SampleTooSmall(n) => write!(f, "sample of size {n} is too small (need >= 2)"),
            Self::NonPositiveOptimum(v) => write!(f, "optimum must be positive, got {v}"),
            Self::InvalidArgument(msg) => f.write_str(msg),
        }
    }
}

impl std::error::Error for StatsError {}

const CF_TOLERANCE: f64 = 1e-10;
const CF_MAX_ITER: usize = 500;

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation (n - 1 denominator).
pub fn sample_stddev(xs: &[f64]) -> f64 {
    sample_variance(xs).sqrt()
}

fn sample_variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Relative excess of the achieved mean over the optimum.
pub fn difficulty(f_ave: f64, f_o: f64) -> Result<f64, StatsError> {
    if !(f_o > 0.0) {
        return Err(StatsError::NonPositiveOptimum(f_o));
    }
    Ok((f_ave - f_o) / f_o)
}

/// Lanczos approximation (g = 7, n = 9) of ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // Reflection formula.
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = COEF[0];
    for (i, c) in COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Continued fraction for the incomplete beta function (modified Lentz).
fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
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
    for m in 1..=CF_MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
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
        if (del - 1.0).abs() < CF_TOLERANCE {
            break;
        }
    }
    h
}

/// Regularized incomplete beta function I_x(a, b).
pub fn regularized_incomplete_beta(a: f64, b: f64, x: f64) -> Result<f64, StatsError> {
    if !(a > 0.0 && b > 0.0) {
        return Err(StatsError::InvalidArgument(format!(
            "beta parameters must be positive (a = {a}, b = {b})"
        )));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(StatsError::InvalidArgument(format!(
            "x = {x} outside [0, 1]"
        )));
    }
    if x == 0.0 || x == 1.0 {
        return Ok(x);
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln();
    let front = ln_front.exp();
    // Use the symmetry relation where the fraction converges fastest.
    if x < (a + 1.0) / (a + b + 2.0) {
        Ok(front * beta_cf(a, b, x) / a)
    } else {
        Ok(1.0 - front * beta_cf(b, a, 1.0 - x) / b)
    }
}

/// Two-tailed p-value P(|T| >= |t|) for Student's t with `dof` degrees of freedom.
pub fn t_two_tailed_p(t: f64, dof: f64) -> Result<f64, StatsError> {
    if !(dof > 0.0) {
        return Err(StatsError::InvalidArgument(format!(
            "dof must be positive, got {dof}"
        )));
    }
    if t.is_infinite() {
        return Ok(0.0);
    }
    regularized_incomplete_beta(dof / 2.0, 0.5, dof / (dof + t * t))
}

/// Critical |t| for a two-tailed test at significance `alpha`.
pub fn t_critical(alpha: f64, dof: f64) -> Result<f64, StatsError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(StatsError::InvalidArgument(format!(
            "alpha = {alpha} outside (0, 1)"
        )));
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while t_two_tailed_p(hi, dof)? > alpha {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if t_two_tailed_p(mid, dof)? > alpha {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WelchResult {
    pub t_stat: f64,
    pub dof: f64,
    pub p_value: f64,
    pub significant: bool,
    /// Both samples constant and equal: t is undefined.
    pub degenerate: bool,
}

/// Welch's unequal-variance two-sample t-test, two-tailed.
/// `t > 0` means `a` has the larger mean.
pub fn welch_t_test(a: &[f64], b: &[f64], confidence: f64) -> Result<WelchResult, StatsError> {
    for s in [a, b] {
        if s.len() < 2 {
            return Err(StatsError::SampleTooSmall(s.len()));
        }
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(StatsError::InvalidArgument(format!(
            "confidence = {confidence} outside (0, 1)"
        )));
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (ma, mb) = (mean(a), mean(b));
    let (va, vb) = (sample_variance(a) / na, sample_variance(b) / nb);
    let se2 = va + vb;
    if se2 == 0.0 {
        if ma == mb {
            return Ok(WelchResult {
                t_stat: 0.0,
                dof: na + nb - 2.0,
                p_value: 1.0,
                significant: false,
                degenerate: true,
            });
        }
        // Zero spread but different means: infinitely separated.
        return Ok(WelchResult {
            t_stat: if ma > mb {
                f64::INFINITY
            } else {
                f64::NEG_INFINITY
            },
            dof: na + nb - 2.0,
            p_value: 0.0,
            significant: true,
            degenerate: false,
        });
    }
    let t_stat = (ma - mb) / se2.sqrt();
    let dof = se2 * se2 / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
    let p_value = t_two_tailed_p(t_stat, dof)?;
    Ok(WelchResult {
        t_stat,
        dof,
        p_value,
        significant: p_value < 1.0 - confidence,
        degenerate: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_gamma_known_values() {
        assert!((ln_gamma(1.0)).abs() < 1e-13);
        assert!((ln_gamma(5.0) - 24f64.ln()).abs() < 1e-12);
        assert!((ln_gamma(0.5) - std::f64::consts::PI.sqrt().ln()).abs() < 1e-12);
    }

    #[test]
    fn incomplete_beta_closed_forms() {
        // I_x(1, 1) = x; I_x(a, 1) = x^a; I_x(1, b) = 1 - (1-x)^b
        for &x in &[0.1, 0.37, 0.5, 0.92] {
            assert!((regularized_incomplete_beta(1.0, 1.0, x).unwrap() - x).abs() < 1e-10);
            assert!(
                (regularized_incomplete_beta(3.5, 1.0, x).unwrap() - x.powf(3.5)).abs() < 1e-10
            );
            assert!(
                (regularized_incomplete_beta(1.0, 2.5, x).unwrap() - (1.0 - (1.0 - x).powf(2.5)))
                    .abs()
                    < 1e-10
            );
        }
        assert!(regularized_incomplete_beta(0.0, 1.0, 0.5).is_err());
        assert!(regularized_incomplete_beta(1.0, 1.0, 1.5).is_err());
    }

    #[test]
    fn t_distribution_one_dof_is_cauchy() {
        // P(|T| >= t) = 1 - 2 atan(t) / pi for dof = 1
        for &t in &[0.3, 1.0, 2.5, 12.0] {
            let expected = 1.0 - 2.0 * f64::atan(t) / std::f64::consts::PI;
            assert!((t_two_tailed_p(t, 1.0).unwrap() - expected).abs() < 1e-10);
        }
    }

    #[test]
    fn identical_samples_not_significant() {
        let a = [3.0, 4.0, 5.0, 6.0];
        let r = welch_t_test(&a, &a, 0.95).unwrap();
        assert_eq!(r.t_stat, 0.0);
        assert!(!r.significant);
        assert!(!r.degenerate);
    }

    #[test]
    fn constant_equal_samples_are_degenerate() {
        let a = [7.0; 5];
        let r = welch_t_test(&a, &a, 0.95).unwrap();
        assert!(r.degenerate);
        assert!(!r.significant);
    }

    #[test]
    fn separated_samples_significant() {
        let a = [0.0, 0.0, 0.0, 0.0, 0.0];
        let b = [10.0, 10.1, 9.9, 10.05, 9.95];
        let r = welch_t_test(&a, &b, 0.95).unwrap();
        assert!(r.significant);
        assert!(r.t_stat < 0.0);
        assert!(r.p_value < 1e-6);
    }

    #[test]
    fn swap_symmetry() {
        let a = [1.0, 2.0, 4.0, 3.5, 2.2];
        let b = [2.5, 3.0, 5.1, 4.4, 3.9, 4.1];
        let ab = welch_t_test(&a, &b, 0.95).unwrap();
        let ba = welch_t_test(&b, &a, 0.95).unwrap();
        assert_eq!(ab.t_stat, -ba.t_stat);
        assert_eq!(ab.p_value, ba.p_value);
        assert_eq!(ab.dof, ba.dof);
    }

    #[test]
    fn too_small_samples() {
        assert_eq!(
            welch_t_test(&[1.0], &[1.0, 2.0], 0.95),
            Err(StatsError::SampleTooSmall(1))
        );
    }

    #[test]
    fn stddev_matches_two_pass() {
        let xs = [2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0];
        // sum of squared deviations = 32, n - 1 = 7
        assert_eq!(sample_stddev(&xs), (32.0f64 / 7.0).sqrt());
    }

    #[test]
    fn difficulty_examples() {
        assert_eq!(difficulty(50778.0, 50778.0).unwrap(), 0.0);
        assert!((difficulty(50932.8, 50778.0).unwrap() - 0.003048).abs() < 1e-6);
        let p654 = difficulty(34643.1, 34643.0).unwrap();
        assert!((p654 - 2.8866e-6).abs() < 1e-9);
        assert!(difficulty(1.0, 0.0).is_err());
    }
}
