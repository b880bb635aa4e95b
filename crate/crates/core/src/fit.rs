//! Geometric time grids and log-log least squares, shared by the decay-law
//! experiments.

use crate::error::{domain, Result};

/// Geometric grid from `t_min` to `t_max` (inclusive) with the given ratio.
pub fn geometric_grid(t_min: f64, t_max: f64, ratio: f64) -> Result<Vec<f64>> {
    if !(t_min > 0.0 && t_max > t_min && ratio > 1.0) {
        return Err(domain(format!(
            "geometric grid requires 0 < t_min < t_max and ratio > 1, got ({t_min}, {t_max}, {ratio})"
        )));
    }
    let mut out = vec![t_min];
    let mut t = t_min;
    while t * ratio <= t_max * (1.0 + 1e-12) {
        t *= ratio;
        out.push(t);
    }
    Ok(out)
}

/// Geometric grid with a fixed number of points per decade.
pub fn grid_per_decade(t_min: f64, t_max: f64, points_per_decade: usize) -> Result<Vec<f64>> {
    if !(t_min > 0.0 && t_max > t_min && points_per_decade >= 1) {
        return Err(domain("grid requires 0 < t_min < t_max and >= 1 point per decade"));
    }
    let ratio = 10f64.powf(1.0 / points_per_decade as f64);
    geometric_grid(t_min, t_max, ratio)
}

/// Ordinary least-squares slope of `log y` against `log x`.
///
/// Rejects degenerate grids (< 4 points or non-positive data).
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 4 {
        return Err(domain("slope fit needs at least 4 (x, y) pairs"));
    }
    if xs.iter().chain(ys.iter()).any(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(domain("slope fit needs strictly positive finite data"));
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in lx.iter().zip(&ly) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 {
        return Err(domain("slope fit: degenerate abscissa"));
    }
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law_recovered() {
        let xs = geometric_grid(1.0, 1024.0, 2.0).unwrap();
        let ys: Vec<f64> = xs.iter().map(|t| 3.7 * t.powf(-0.25)).collect();
        let s = loglog_slope(&xs, &ys).unwrap();
        assert!((s + 0.25).abs() < 1e-12);
    }

    #[test]
    fn degenerate_grids_rejected() {
        assert!(loglog_slope(&[1.0, 2.0], &[1.0, 2.0]).is_err());
        assert!(geometric_grid(1.0, 0.5, 2.0).is_err());
    }
}
