//! Small statistics helpers: Wilson intervals, least squares, two-sample KS.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// Wilson score interval at 95% for `successes` out of `trials`.
pub fn wilson(successes: u64, trials: u64) -> Interval {
    if trials == 0 {
        return Interval { lo: 0.0, hi: 1.0 };
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    Interval {
        lo: if successes == 0 { 0.0 } else { (center - half).max(0.0) },
        hi: if successes >= trials { 1.0 } else { (center + half).min(1.0) },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Ordinary least squares `y = intercept + slope x`.
pub fn ols(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "least squares needs >= 2 paired points, got {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("least squares needs distinct x values".into()));
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(LinearFit {
        slope,
        intercept: my - slope * mx,
        r_squared,
    })
}

/// Least squares on `(ln x, ln y)`; the slope is the scaling exponent.
pub fn loglog_fit(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    if xs.iter().chain(ys).any(|&v| v.is_nan() || v <= 0.0) {
        return Err(Error::InvalidArgument("log-log fit needs positive values".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    ols(&lx, &ly)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub critical: f64,
    pub reject: bool,
}

/// Two-sample Kolmogorov-Smirnov test at level 0.01 (asymptotic critical value).
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsResult> {
    if a.is_empty() || b.is_empty() || a.iter().chain(b).any(|x| x.is_nan()) {
        return Err(Error::InvalidArgument("KS test needs non-empty samples without NaN".into()));
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    let critical = 1.628 * ((n + m) / (n * m)).sqrt();
    Ok(KsResult {
        statistic: d,
        critical,
        reject: d > critical,
    })
}

/// Mean, sample standard deviation, and the 10/50/90% quantiles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mean: f64,
    pub sd: f64,
    pub q10: f64,
    pub q50: f64,
    pub q90: f64,
}

pub fn moments(samples: &[f64]) -> Option<Moments> {
    if samples.is_empty() {
        return None;
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let sd = if samples.len() > 1 {
        (samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let q = |p: f64| s[((p * (s.len() - 1) as f64).round() as usize).min(s.len() - 1)];
    Some(Moments {
        mean,
        sd,
        q10: q(0.1),
        q50: q(0.5),
        q90: q(0.9),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::master_rng;
    use rand::Rng;

    #[test]
    fn wilson_contains_estimate() {
        for (s, n) in [(0, 10), (3, 10), (10, 10), (500, 1000), (1, 10_000)] {
            let iv = wilson(s, n);
            assert!(iv.contains(s as f64 / n as f64));
            assert!(iv.lo >= 0.0 && iv.hi <= 1.0);
        }
        // Reference value: 5 of 10 gives (0.2366, 0.7634).
        let iv = wilson(5, 10);
        assert!((iv.lo - 0.2366).abs() < 1e-4 && (iv.hi - 0.7634).abs() < 1e-4);
        assert_eq!(wilson(0, 0), Interval { lo: 0.0, hi: 1.0 });
    }

    #[test]
    fn ols_recovers_line() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x - 1.0).collect();
        let fit = ols(&xs, &ys).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-12 && (fit.intercept + 1.0).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        let fit = loglog_fit(&[8.0, 16.0, 32.0], &[3.0 * 64.0, 3.0 * 256.0, 3.0 * 1024.0]).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!(ols(&[1.0], &[1.0]).is_err());
        assert!(ols(&[1.0, 1.0], &[1.0, 2.0]).is_err());
        assert!(loglog_fit(&[0.0, 1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn ks_detects_shift_only() {
        let mut rng = master_rng(9);
        let a: Vec<f64> = (0..2000).map(|_| rng.gen()).collect();
        let b: Vec<f64> = (0..2000).map(|_| rng.gen()).collect();
        let c: Vec<f64> = (0..2000).map(|_| rng.gen::<f64>() + 0.1).collect();
        assert!(!ks_two_sample(&a, &b).unwrap().reject);
        assert!(ks_two_sample(&a, &c).unwrap().reject);
        let same = ks_two_sample(&[1.0, 2.0], &[1.0, 2.0]).unwrap();
        assert_eq!(same.statistic, 0.0);
        assert_eq!(ks_two_sample(&[0.0], &[1.0]).unwrap().statistic, 1.0);
        assert!(ks_two_sample(&[], &[1.0]).is_err());
    }

    #[test]
    fn moments_basic() {
        let m = moments(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        assert_eq!(m.mean, 3.0);
        assert!((m.sd - 2.5f64.sqrt()).abs() < 1e-12);
        assert_eq!(m.q50, 3.0);
        assert!(moments(&[]).is_none());
    }
}
