//! The heat kernel `G_{t,N}(n) = prod_k e^{-2t} I_{n_k}(2t)`, the semigroup
//! `W_t f = G_{t,N} * f`, decay-law measurements, the smoothness envelopes,
//! and the maximal operator over finite time grids.

use crate::bessel::{scaled_bessel_family, scaled_bessel_i};
use crate::error::{domain, Error, Result};
use crate::fit::loglog_slope;
use crate::lattice::{convolve, lp_norm, RealSeq, Window};

/// Hard cap on automatic truncation radii.
pub const MAX_AUTO_RADIUS: i64 = 4096;
/// Default tail-mass tolerance for automatic radii.
pub const DEFAULT_TAIL_TOL: f64 = 1e-10;

/// Truncated heat kernel together with its tail-mass certificate.
#[derive(Debug, Clone)]
pub struct HeatKernel {
    pub t: f64,
    seq: RealSeq,
    /// Upper bound on `1 - sum_window G`, from the one-dimensional family.
    pub tail_mass_bound: f64,
}

impl HeatKernel {
    /// Kernel with automatic radius: the smallest `R` whose tail mass stays
    /// below `tol` (capped at [`MAX_AUTO_RADIUS`]).
    pub fn auto(t: f64, dim: usize, tol: f64) -> Result<Self> {
        let r = auto_radius(t, dim, tol)?;
        Self::with_radius(t, dim, r)
    }

    /// Kernel on the box of the given radius.
    pub fn with_radius(t: f64, dim: usize, radius: i64) -> Result<Self> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(domain(format!("heat kernel requires t > 0, got {t}")));
        }
        let window = Window::new(dim, radius)?;
        let fam = scaled_bessel_family(2.0 * t, radius as usize)?;
        let axis_sum = fam[0] + 2.0 * fam[1..].iter().sum::<f64>();
        let tail = (1.0 - axis_sum.powi(dim as i32)).max(0.0) + 1e-15;
        let mut values = vec![0.0; window.len()];
        window.for_each_point(|idx, p| {
            let mut v = 1.0;
            for &c in p {
                v *= fam[c.unsigned_abs() as usize];
            }
            values[idx] = v;
        });
        let seq = RealSeq::from_values(window, values)?;
        Ok(HeatKernel { t, seq, tail_mass_bound: tail })
    }

    pub fn seq(&self) -> &RealSeq {
        &self.seq
    }

    pub fn dim(&self) -> usize {
        self.seq.dim()
    }

    pub fn radius(&self) -> i64 {
        self.seq.radius()
    }

    pub fn value(&self, p: &[i64]) -> f64 {
        self.seq.get(p)
    }
}

/// Smallest radius with one-axis tail below `tol / dim` (which makes the
/// full-window tail below `tol`).
pub fn auto_radius(t: f64, dim: usize, tol: f64) -> Result<i64> {
    if !(t > 0.0) || !(tol > 0.0) || dim == 0 {
        return Err(domain("auto radius requires t > 0, tol > 0, dim >= 1"));
    }
    let per_axis = tol / dim as f64;
    // Gaussian-type estimate e^{-R^2/(4t)} for the tail of e^{-2t} I_k(2t).
    let mut guess =
        ((4.0 * t * (per_axis.recip().ln() + 4.0)).sqrt().ceil() as i64 + 4).min(MAX_AUTO_RADIUS);
    loop {
        let fam = scaled_bessel_family(2.0 * t, guess as usize)?;
        let mut cum = fam[0];
        for (k, v) in fam.iter().enumerate().skip(1) {
            cum += 2.0 * v;
            if 1.0 - cum <= per_axis {
                return Ok(k as i64);
            }
        }
        if guess >= MAX_AUTO_RADIUS {
            return Err(Error::Tolerance(format!(
                "tail tolerance {tol} unreachable within radius {MAX_AUTO_RADIUS} at t={t}"
            )));
        }
        guess = (guess * 2).min(MAX_AUTO_RADIUS);
    }
}

/// Heat evolution `W_t f` with the automatic kernel radius at the default
/// tail tolerance. The output window is the input window padded by the
/// kernel radius. `t = 0` returns the input.
pub fn evolve(f: &RealSeq, t: f64) -> Result<RealSeq> {
    evolve_with_tol(f, t, DEFAULT_TAIL_TOL)
}

pub fn evolve_with_tol(f: &RealSeq, t: f64, tol: f64) -> Result<RealSeq> {
    if t == 0.0 {
        return Ok(f.clone());
    }
    let kernel = HeatKernel::auto(t, f.dim(), tol)?;
    convolve(f, kernel.seq())
}

/// `||G_{t,N}||_{l^r}` computed from the product structure:
/// the r-th power factorizes into per-axis sums.
pub fn kernel_norm(t: f64, dim: usize, r: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(domain("kernel norm requires t > 0"));
    }
    if r.is_nan() || r < 1.0 {
        return Err(domain(format!("kernel norm requires r >= 1, got {r}")));
    }
    let radius = auto_radius(t, dim, 1e-13)?;
    let fam = scaled_bessel_family(2.0 * t, radius as usize)?;
    if r.is_infinite() {
        // the kernel peaks at the origin
        return Ok(fam[0].powi(dim as i32));
    }
    let axis: f64 = fam[0].powf(r) + 2.0 * fam[1..].iter().map(|g| g.powf(r)).sum::<f64>();
    Ok(axis.powf(dim as f64 / r))
}

/// Least-squares slope of `log ||G_{t,N}||_r` against `log t`.
pub fn decay_slope(dim: usize, r: f64, t_grid: &[f64]) -> Result<f64> {
    let norms: Vec<f64> = t_grid.iter().map(|&t| kernel_norm(t, dim, r)).collect::<Result<_>>()?;
    loglog_slope(t_grid, &norms)
}

/// `|| W_t f - (sum f) G_{t,N} ||_p`, the drift of the solution from the
/// mass-weighted kernel.
pub fn mass_residual(f: &RealSeq, t: f64, p: f64) -> Result<f64> {
    let evolved = evolve(f, t)?;
    let kernel = HeatKernel::auto(t, f.dim(), DEFAULT_TAIL_TOL)?;
    let mass = f.sum();
    let shifted = kernel.seq().scale(mass).with_radius(evolved.radius())?;
    let residual = evolved.sub(&shifted)?;
    lp_norm(&residual, p, None)
}

/// Slope of `log mass_residual` against `log t`.
///
/// `q` is the declared integrability index of `|n| f(n)`; the theorem's
/// hypotheses `1 <= q <= p`, `q < N/(N-1)` are enforced, and data with zero
/// total mass is refused (the residual then decays faster and the fit would
/// not measure the stated law).
pub fn mass_slope(f: &RealSeq, p: f64, q: f64, t_grid: &[f64]) -> Result<f64> {
    let n = f.dim() as f64;
    if !(1.0 <= q && q <= p) {
        return Err(domain(format!("mass law requires 1 <= q <= p, got q={q}, p={p}")));
    }
    if f.dim() > 1 && q >= n / (n - 1.0) {
        return Err(domain(format!("mass law requires q < N/(N-1), got q={q} in dimension {n}")));
    }
    if f.sum().abs() < 1e-14 {
        return Err(domain("mass law slope needs data with nonzero total mass"));
    }
    let residuals: Vec<f64> =
        t_grid.iter().map(|&t| mass_residual(f, t, p)).collect::<Result<_>>()?;
    loglog_slope(t_grid, &residuals)
}

/// The three smoothness envelopes controlling differences of heat kernels:
/// with `G = G_{t,1}(z)`,
/// `Difference` is `(z/t) G^N`, `GradientDifference` is `(1/t + z^2/t^2) G^N`,
/// `LaplacianDifference` is `(z/t^2 + z^3/t^3) G^N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnvelopeKind {
    Difference,
    GradientDifference,
    LaplacianDifference,
}

pub fn smoothness_envelope(kind: EnvelopeKind, t: f64, z: f64, dim: usize) -> Result<f64> {
    if !(t > 0.0 && z > 0.0) {
        return Err(domain("envelopes require t > 0 and z > 0"));
    }
    let g = scaled_bessel_i(z, 2.0 * t)?.powi(dim as i32);
    Ok(match kind {
        EnvelopeKind::Difference => z / t * g,
        EnvelopeKind::GradientDifference => (1.0 / t + z * z / (t * t)) * g,
        EnvelopeKind::LaplacianDifference => (z / (t * t) + z.powi(3) / t.powi(3)) * g,
    })
}

/// Pointwise maximum of `|W_t f|` over a finite time grid: a lower bound for
/// the maximal function `W* f`, suitable for calibrated-ratio experiments.
pub fn maximal_heat(f: &RealSeq, t_grid: &[f64]) -> Result<RealSeq> {
    if t_grid.is_empty() {
        return Err(domain("maximal function needs a nonempty time grid"));
    }
    let evolved: Vec<RealSeq> = t_grid.iter().map(|&t| evolve(f, t)).collect::<Result<_>>()?;
    let radius = evolved.iter().map(|e| e.radius()).max().unwrap();
    let window = Window::new(f.dim(), radius)?;
    let mut vals = vec![0.0; window.len()];
    window.for_each_point(|idx, p| {
        vals[idx] = evolved.iter().map(|e| e.get(p).abs()).fold(0.0, f64::max);
    });
    RealSeq::from_values(window, vals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::l1_norm;

    #[test]
    fn rejects_nonpositive_time() {
        assert!(HeatKernel::auto(0.0, 1, 1e-10).is_err());
        assert!(HeatKernel::auto(-2.0, 1, 1e-10).is_err());
    }

    #[test]
    fn small_time_limit_is_identity() {
        let k = HeatKernel::auto(1e-8, 1, 1e-12).unwrap();
        assert!((k.value(&[0]) - 1.0).abs() < 1e-7);
        assert!(k.value(&[1]) < 1e-7);
    }

    #[test]
    fn kernel_value_spot() {
        // G_{1,1}(0) = e^{-2} I_0(2)
        let k = HeatKernel::auto(1.0, 1, 1e-10).unwrap();
        assert!((k.value(&[0]) - 0.30850832255367103).abs() < 1e-12);
    }

    #[test]
    fn normalization_across_dims_and_times() {
        for dim in 1..=3usize {
            for &t in &[0.1, 1.0, 10.0] {
                let k = HeatKernel::auto(t, dim, 1e-10).unwrap();
                let total = k.seq().sum();
                assert!(
                    (total - 1.0).abs() <= 1e-8,
                    "dim={dim} t={t}: mass {total}, tail bound {}",
                    k.tail_mass_bound
                );
                assert!((1.0 - total) <= k.tail_mass_bound + 1e-12);
                assert!(k.seq().values().iter().all(|&v| v > 0.0));
            }
        }
    }

    #[test]
    fn kernel_symmetry() {
        let k = HeatKernel::with_radius(0.7, 2, 5).unwrap();
        let w = k.seq().window();
        w.for_each_point(|_, p| {
            let flipped: Vec<i64> = p.iter().map(|c| -c).collect();
            let swapped: Vec<i64> = vec![p[1], p[0]];
            assert_eq!(k.value(p), k.value(&flipped));
            assert_eq!(k.value(p), k.value(&swapped));
        });
    }

    #[test]
    fn markov_on_constants() {
        // interior values of W_t 1 equal 1 within the tail tolerance
        let ones = RealSeq::from_fn(Window::new(1, 40).unwrap(), |_| 1.0);
        let out = evolve(&ones, 1.0).unwrap();
        for n in -10..=10i64 {
            assert!((out.get(&[n]) - 1.0).abs() < 1e-9, "n={n}: {}", out.get(&[n]));
        }
    }

    #[test]
    fn semigroup_law_on_delta() {
        for &(t1, t2) in &[(0.5, 0.5), (1.0, 2.0), (5.0, 5.0)] {
            let d = RealSeq::delta(1, 0).unwrap();
            let two_step = evolve(&evolve(&d, t1).unwrap(), t2).unwrap();
            let one_step = evolve(&d, t1 + t2).unwrap();
            assert!(
                two_step.sup_distance(&one_step) < 1e-8,
                "t1={t1} t2={t2}: {}",
                two_step.sup_distance(&one_step)
            );
        }
    }

    #[test]
    fn contraction_in_lp() {
        let f = RealSeq::from_fn(Window::new(2, 3).unwrap(), |p| {
            ((p[0] - 2 * p[1]) as f64 * 0.7).cos()
        });
        let out = evolve(&f, 0.8).unwrap();
        for &p in &[1.0, 2.0, f64::INFINITY] {
            let before = lp_norm(&f, p, None).unwrap();
            let after = lp_norm(&out, p, None).unwrap();
            assert!(after <= before * (1.0 + 1e-10), "p={p}: {after} vs {before}");
        }
    }

    #[test]
    fn short_time_l2_modulus() {
        // |W_t f - f| <= 2t ||f||_2 for small t (the symbol bound 1-e^{-s} <= s)
        let f = RealSeq::from_fn(Window::new(1, 5).unwrap(), |p| ((p[0] * 13 % 7) as f64) - 3.0);
        let l2 = lp_norm(&f, 2.0, None).unwrap();
        for &t in &[1e-4, 1e-3, 1e-2] {
            let out = evolve(&f, t).unwrap();
            let dev = out.sub(&f.with_radius(out.radius()).unwrap()).unwrap().sup_norm();
            assert!(dev <= 4.0 * 2.0 * t * l2, "t={t}: dev {dev} vs bound {}", 4.0 * 2.0 * t * l2);
        }
    }

    #[test]
    fn decay_slopes_match_scaling_laws() {
        let grid: Vec<f64> = (0..9).map(|k| 16.0 * 2f64.powi(k)).collect();
        // r = 1: mass is conserved, slope 0
        let s = decay_slope(1, 1.0, &grid).unwrap();
        assert!(s.abs() < 1e-6, "slope {s}");
        // N=1, r=2 -> -1/4
        let s = decay_slope(1, 2.0, &grid).unwrap();
        assert!((s + 0.25).abs() < 0.02, "slope {s}");
        // N=2, r=inf -> -1
        let s = decay_slope(2, f64::INFINITY, &grid).unwrap();
        assert!((s + 1.0).abs() < 0.03, "slope {s}");
    }

    #[test]
    fn mass_theorem_slopes() {
        // f = delta_0 - delta_1 + 2 delta_2, total mass 2
        let mut f = RealSeq::zeros(Window::new(1, 3).unwrap());
        f.set(&[0], 1.0).unwrap();
        f.set(&[1], -1.0).unwrap();
        f.set(&[2], 2.0).unwrap();
        let grid: Vec<f64> = (0..8).map(|k| 64.0 * 2f64.powi(k)).collect();
        let s_inf = mass_slope(&f, f64::INFINITY, 1.0, &grid).unwrap();
        assert!((s_inf + 1.0).abs() < 0.05, "p=inf slope {s_inf}");
        let s_pp = mass_slope(&f, 1.0, 1.0, &grid).unwrap();
        assert!((s_pp + 0.5).abs() < 0.05, "p=q=1 slope {s_pp}");
    }

    #[test]
    fn mass_slope_refuses_zero_mass() {
        let mut f = RealSeq::zeros(Window::new(1, 2).unwrap());
        f.set(&[0], 1.0).unwrap();
        f.set(&[1], -1.0).unwrap();
        let grid: Vec<f64> = (0..6).map(|k| 32.0 * 2f64.powi(k)).collect();
        assert!(mass_slope(&f, 1.0, 1.0, &grid).is_err());
    }

    #[test]
    fn envelope_values_and_positivity() {
        // H_{1,1}(1) = e^{-2} I_1(2)
        let h = smoothness_envelope(EnvelopeKind::Difference, 1.0, 1.0, 1).unwrap();
        assert!((h - 0.21526928924893765).abs() < 1e-10, "{h}");
        for kind in
            [EnvelopeKind::Difference, EnvelopeKind::GradientDifference, EnvelopeKind::LaplacianDifference]
        {
            for &(t, z) in &[(0.3, 0.5), (2.0, 4.0), (50.0, 10.0)] {
                assert!(smoothness_envelope(kind, t, z, 2).unwrap() > 0.0);
            }
        }
        assert!(smoothness_envelope(EnvelopeKind::Difference, -1.0, 1.0, 1).is_err());
    }

    #[test]
    fn envelope_l1_norm_decay() {
        // || H_{t,N}(|.|/K) ||_1 ~ t^{-1/2}
        let kk = 3.0;
        let grid: Vec<f64> = (0..6).map(|k| 16.0 * 2f64.powi(k)).collect();
        let mut norms = Vec::new();
        for &t in &grid {
            let radius = auto_radius(t, 1, 1e-12).unwrap().max(8) * 3;
            let mut acc = 0.0;
            for n in -radius..=radius {
                if n == 0 {
                    continue;
                }
                acc += smoothness_envelope(
                    EnvelopeKind::Difference,
                    t,
                    l1_norm(&[n]) as f64 / kk,
                    1,
                )
                .unwrap();
            }
            norms.push(acc);
        }
        let slope = loglog_slope(&grid, &norms).unwrap();
        assert!((slope + 0.5).abs() < 0.1, "slope {slope}");
    }

    #[test]
    fn maximal_heat_properties() {
        let f = RealSeq::delta(1, 0).unwrap();
        let grid: Vec<f64> = (0..12).map(|k| 0.125 * 2f64.powi(k)).collect();
        let star = maximal_heat(&f, &grid).unwrap();
        // dominates each single time
        for &t in &grid {
            let wt = evolve(&f, t).unwrap();
            wt.window().for_each_point(|_, p| {
                assert!(star.get(p) >= wt.get(p).abs() - 1e-15);
            });
        }
        // at the origin the maximum is attained at the smallest time
        let smallest = evolve(&f, grid[0]).unwrap();
        assert!((star.get(&[0]) - smallest.get(&[0])).abs() < 1e-12);
        assert!(maximal_heat(&f, &[]).is_err());
    }
}
