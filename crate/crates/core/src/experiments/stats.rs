use serde::Serialize;

use crate::error::{invalid, Error, Result};

/// Normal quantile used for every interval in reports.
pub const Z_95: f64 = 1.96;

/// Wilson score interval for a binomial proportion, clamped to `[0, 1]`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> Result<(f64, f64)> {
    if trials == 0 {
        return Err(invalid("wilson interval needs at least one trial"));
    }
    if successes > trials {
        return Err(invalid(format!("{successes} successes exceed {trials} trials")));
    }
    if !(z > 0.0) {
        return Err(invalid(format!("z must be positive, got {z}")));
    }
    let t = trials as f64;
    let p = successes as f64 / t;
    let z2 = z * z;
    let denom = 1.0 + z2 / t;
    let center = (p + z2 / (2.0 * t)) / denom;
    let half = z / denom * (p * (1.0 - p) / t + z2 / (4.0 * t * t)).sqrt();
    let lo = if successes == 0 { 0.0 } else { (center - half).max(0.0).min(p) };
    let hi = if successes == trials { 1.0 } else { (center + half).min(1.0).max(p) };
    Ok((lo, hi))
}

/// Least-squares line through `(ln n, ln frequency)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope.
    pub stderr: f64,
}

pub fn fit_loglog(points: &[(f64, f64)]) -> Result<LogLogFit> {
    if points.len() < 3 {
        return Err(invalid(format!("log-log fit needs at least 3 points, got {}", points.len())));
    }
    if let Some(&(n, _)) = points.iter().find(|&&(_, f)| !(f > 0.0)) {
        return Err(Error::ZeroFrequency { n: n as u64 });
    }
    if points.iter().any(|&(n, _)| !(n > 0.0)) {
        return Err(invalid("abscissae must be positive"));
    }
    let xs: Vec<f64> = points.iter().map(|&(n, _)| n.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, f)| f.ln()).collect();
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(invalid("abscissae must not all coincide"));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let stderr = (ssr / (m - 2.0) / sxx).sqrt();
    Ok(LogLogFit { slope, intercept, stderr })
}
