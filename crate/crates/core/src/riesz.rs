//! Discrete Riesz transforms `R_i = delta_i^+ (-Delta_N)^{-1/2}` for `N >= 2`,
//! the backward variant `delta_i^- (-Delta_N)^{-1/2}`, their kernels with
//! size/smoothness/cancellation behavior, and the one-dimensional Hilbert
//! transform.

use crate::error::{domain, Result};
use crate::lattice::{convolve, holder_seminorm, RealSeq, Window};
use crate::quadrature::GaussLegendre;
use crate::spectral::{apply_multiplier_to_window, TorusGrid, TorusSymbol};
use crate::timekernel::{
    assemble, axis_tail_coeffs, axis_tail_coeffs_diff, product_coeffs, tail_error_gauge,
    tail_integral, AxisMode, PanelRange, TAIL_TERMS,
};

const TAIL_CUT: f64 = 80.0;

/// Riesz kernel `R_i(n) = (1/sqrt(pi)) int_0^inf delta_i^+ G_{t,N}(n)
/// t^{-1/2} dt` on a window, with a quadrature error gauge.
#[derive(Debug, Clone)]
pub struct RieszKernel {
    pub axis: usize,
    seq: RealSeq,
    pub quad_error: f64,
}

impl RieszKernel {
    pub fn seq(&self) -> &RealSeq {
        &self.seq
    }

    pub fn value(&self, p: &[i64]) -> f64 {
        self.seq.get(p)
    }

    /// `sum_{|k| <= m} R_i(k)` (l1 balls), the partial-sum cancellation
    /// diagnostic.
    pub fn partial_sum(&self, m: i64) -> f64 {
        let mut acc = 0.0;
        self.seq.window().for_each_point(|idx, p| {
            if crate::lattice::l1_norm(p) <= m {
                acc += self.seq.values()[idx];
            }
        });
        acc
    }
}

fn check_dim_axis(dim: usize, axis: usize) -> Result<()> {
    if dim < 2 {
        return Err(domain(
            "Riesz transforms need dimension >= 2 (use the Hilbert transform in dimension 1)",
        ));
    }
    if axis >= dim {
        return Err(domain(format!("axis {axis} out of range for dimension {dim}")));
    }
    Ok(())
}

pub fn riesz_kernel(axis: usize, dim: usize, radius: i64) -> Result<RieszKernel> {
    check_dim_axis(dim, axis)?;
    let v_cut = TAIL_CUT * ((radius.max(1) as f64).powi(2)).max(1.0);
    let scale = 1.0 / std::f64::consts::PI.sqrt();
    let weight = move |t: f64| scale * t.powf(-0.5);
    let ranges: Vec<PanelRange> = vec![(-85.0, -10.0, 1.0), (-10.0, v_cut.ln(), 0.5)];
    let rule = GaussLegendre::new(16);
    let base = assemble(dim, radius, AxisMode::ForwardDiff(axis), weight, &ranges, &rule)?;
    let p = -0.5 - dim as f64 / 2.0;
    let gauss_norm = (4.0 * std::f64::consts::PI).powf(-(dim as f64) / 2.0);
    let window = base.window();
    let mut values = base.values().to_vec();
    window.for_each_point(|idx, pt| {
        let axes: Vec<[f64; TAIL_TERMS]> = pt
            .iter()
            .enumerate()
            .map(|(i, &c)| if i == axis { axis_tail_coeffs_diff(c) } else { axis_tail_coeffs(c) })
            .collect();
        let d = product_coeffs(&axes);
        values[idx] += scale * gauss_norm * tail_integral(&d, p, v_cut);
    });
    let seq = RealSeq::from_values(window, values)?;
    let quad_error = scale * gauss_norm * tail_error_gauge(radius, p, v_cut, dim);
    Ok(RieszKernel { axis, seq, quad_error })
}

/// `R_i f` on the window of radius `out_radius`; the kernel route is exact
/// for compact data, the spectral route needs mean-zero data.
pub fn apply_riesz(
    f: &RealSeq,
    axis: usize,
    out_radius: i64,
    path: crate::fractional::EvalPath,
) -> Result<RealSeq> {
    check_dim_axis(f.dim(), axis)?;
    match path {
        crate::fractional::EvalPath::Kernel => {
            let kernel = riesz_kernel(axis, f.dim(), out_radius + f.radius())?;
            convolve(f, kernel.seq())?.with_radius(out_radius)
        }
        crate::fractional::EvalPath::Spectral { grid_factor } => {
            let out = Window::new(f.dim(), out_radius)?;
            let grid = TorusGrid::for_window(out, grid_factor)?;
            let sym = TorusSymbol::riesz(grid, axis)?;
            apply_multiplier_to_window(f, &sym, out, 1e-8)
        }
    }
}

/// The backward transform `delta_i^- (-Delta_N)^{-1/2} f`, i.e. the forward
/// one shifted: `(R-bar)_i f(n) = R_i f(n - e_i)`.
pub fn apply_riesz_backward(f: &RealSeq, axis: usize, out_radius: i64) -> Result<RealSeq> {
    check_dim_axis(f.dim(), axis)?;
    let forward = apply_riesz(f, axis, out_radius + 1, crate::fractional::EvalPath::Kernel)?;
    let window = Window::new(f.dim(), out_radius)?;
    let mut shifted = vec![0i64; f.dim()];
    let mut values = vec![0.0f64; window.len()];
    window.for_each_point(|idx, p| {
        shifted.copy_from_slice(p);
        shifted[axis] -= 1;
        values[idx] = forward.get(&shifted);
    });
    RealSeq::from_values(window, values)
}

/// One-dimensional discrete Hilbert transform
/// `H f(n) = sum_k f(k) / (n - k + 1/2)`.
pub fn hilbert_apply(f: &RealSeq, out_radius: i64) -> Result<RealSeq> {
    if f.dim() != 1 {
        return Err(domain("the Hilbert transform is the one-dimensional case"));
    }
    let window = Window::new(1, out_radius)?;
    let mut values = vec![0.0f64; window.len()];
    window.for_each_point(|idx, n| {
        let mut acc = 0.0;
        f.window().for_each_point(|jdx, k| {
            let v = f.values()[jdx];
            if v != 0.0 {
                acc += v / ((n[0] - k[0]) as f64 + 0.5);
            }
        });
        values[idx] = acc;
    });
    RealSeq::from_values(window, values)
}

/// Hoelder-seminorm ratio `[R_i f]_{C^{0,alpha}} / [f]_{C^{0,alpha}}` on the
/// interior, for `0 < alpha < 1/2`.
pub fn riesz_holder_ratio(f: &RealSeq, alpha: f64, axis: usize) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(domain(format!("ratio requires 0 < alpha < 1/2, got {alpha}")));
    }
    check_dim_axis(f.dim(), axis)?;
    let out = apply_riesz(f, axis, f.radius(), crate::fractional::EvalPath::Kernel)?;
    let denom = holder_seminorm(f, alpha, 0)?;
    if denom == 0.0 {
        return Ok(0.0);
    }
    Ok(holder_seminorm(&out, alpha, 0)? / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fractional::EvalPath;
    use crate::fit::loglog_slope;
    use crate::lattice::lp_norm;

    // 50-digit quadrature of the defining integral, N = 2, axis 0.
    const RIESZ_ORACLE_N2: &[([i64; 2], f64)] = &[
        ([0, 0], -0.47904569934142506),
        ([1, 0], -0.0813261235712725),
        ([2, 1], -0.019552366047472191),
        ([4, 0], -0.0081607581810505643),
    ];

    #[test]
    fn kernel_matches_oracle() {
        let k = riesz_kernel(0, 2, 6).unwrap();
        for &(n, want) in RIESZ_ORACLE_N2 {
            let got = k.value(&n);
            assert!(
                (got - want).abs() < 1e-9 * want.abs(),
                "n={n:?}: got {got}, oracle {want}"
            );
        }
    }

    #[test]
    fn dimension_one_is_rejected() {
        assert!(riesz_kernel(0, 1, 5).is_err());
        let f = RealSeq::delta(1, 1).unwrap();
        assert!(apply_riesz(&f, 0, 3, EvalPath::Kernel).is_err());
    }

    #[test]
    fn antisymmetry_identity() {
        // R_1(-k) = -R_1(k - e_1)
        let k = riesz_kernel(0, 2, 7).unwrap();
        let w = Window::new(2, 6).unwrap();
        w.for_each_point(|_, p| {
            let neg: Vec<i64> = p.iter().map(|c| -c).collect();
            let shifted = [p[0] - 1, p[1]];
            let a = k.value(&neg);
            let b = -k.value(&shifted);
            assert!((a - b).abs() <= 1e-8 * a.abs().max(1e-10), "p={p:?}: {a} vs {b}");
        });
    }

    #[test]
    fn size_decay_along_axis() {
        let k = riesz_kernel(0, 2, 24).unwrap();
        let xs: Vec<f64> = (6..=24).map(|n| n as f64).collect();
        let ys: Vec<f64> = (6..=24).map(|n| k.value(&[n, 0]).abs()).collect();
        let slope = loglog_slope(&xs, &ys).unwrap();
        assert!((slope + 2.0).abs() < 0.1, "slope {slope}");
    }

    #[test]
    fn partial_sums_cancel_like_one_over_m() {
        let k = riesz_kernel(0, 2, 40).unwrap();
        let ms: Vec<f64> = (6..=36).step_by(5).map(|m| m as f64).collect();
        let sums: Vec<f64> = (6..=36).step_by(5).map(|m| k.partial_sum(m).abs()).collect();
        let slope = loglog_slope(&ms, &sums).unwrap();
        assert!((slope + 1.0).abs() < 0.15, "slope {slope}");
    }

    #[test]
    fn l2_contraction_on_mean_zero_data() {
        let f = RealSeq::from_fn(Window::new(2, 3).unwrap(), |p| {
            ((p[0] * 5 + p[1] * 3) as f64 * 0.41).sin()
        })
        .mean_zeroed();
        let out = apply_riesz(&f, 1, 14, EvalPath::Kernel).unwrap();
        let ratio = lp_norm(&out, 2.0, None).unwrap() / lp_norm(&f, 2.0, None).unwrap();
        assert!(ratio <= 1.0 + 1e-10, "ratio {ratio}");
    }

    #[test]
    fn backward_variant_is_shifted_forward() {
        let f = RealSeq::from_fn(Window::new(2, 2).unwrap(), |p| {
            (p[0] * p[0] - p[1]) as f64 * 0.2
        });
        let fw = apply_riesz(&f, 0, 5, EvalPath::Kernel).unwrap();
        let bw = apply_riesz_backward(&f, 0, 4).unwrap();
        let w = Window::new(2, 4).unwrap();
        w.for_each_point(|_, p| {
            let q = [p[0] - 1, p[1]];
            assert!((bw.get(p) - fw.get(&q)).abs() < 1e-12);
        });
    }

    #[test]
    fn composition_with_gradient_gives_half_power() {
        // sum_i (R-bar)_i delta_i^+ f = -(-Delta)^{1/2} f
        let f = RealSeq::from_fn(Window::new(2, 2).unwrap(), |p| {
            ((p[0] + 2 * p[1]) as f64 * 0.63).cos()
        })
        .mean_zeroed();
        let out_r = 3;
        let mut lhs = RealSeq::zeros(Window::new(2, out_r).unwrap());
        for axis in 0..2 {
            let df = crate::lattice::forward_diff(&f.with_radius(f.radius() + 1).unwrap(), axis).unwrap();
            let term = apply_riesz_backward(&df, axis, out_r).unwrap();
            lhs = lhs.add(&term).unwrap();
        }
        let rhs = crate::fractional::apply_frac_power(&f, 0.5, out_r, EvalPath::Kernel).unwrap();
        let mut worst = 0.0f64;
        lhs.window().for_each_point(|_, p| {
            worst = worst.max((lhs.get(p) + rhs.get(p)).abs());
        });
        assert!(worst < 1e-5, "composition deviates by {worst}");
    }

    #[test]
    fn hilbert_on_delta() {
        let d = RealSeq::delta(1, 0).unwrap();
        let h = hilbert_apply(&d, 5).unwrap();
        for n in -5..=5i64 {
            let want = 1.0 / (n as f64 + 0.5);
            assert!((h.get(&[n]) - want).abs() < 1e-15);
        }
        // kernel antisymmetry around -1/2: value at n and -1-n are opposite
        for n in 0..=4i64 {
            assert!((h.get(&[n]) + h.get(&[-1 - n])).abs() < 1e-15);
        }
    }

    #[test]
    fn hilbert_l2_ratio_below_pi() {
        let mut state = 0xDEADBEEFu64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 52) as f64 - 1.0
        };
        for _ in 0..20 {
            let f = RealSeq::from_fn(Window::new(1, 6).unwrap(), |_| next());
            let h = hilbert_apply(&f, 60).unwrap();
            let ratio = lp_norm(&h, 2.0, None).unwrap() / lp_norm(&f, 2.0, None).unwrap();
            assert!(ratio <= std::f64::consts::PI + 1e-9, "ratio {ratio}");
        }
    }

    #[test]
    fn holder_ratio_of_constant_is_zero() {
        let c = RealSeq::from_fn(Window::new(2, 3).unwrap(), |_| 4.2);
        assert_eq!(riesz_holder_ratio(&c, 0.3, 0).unwrap(), 0.0);
        assert!(riesz_holder_ratio(&c, 0.7, 0).is_err());
    }

    #[test]
    fn kernel_smoothness_bound_sampled() {
        // |R(n) - R(m)| <= C |n-m| / (|n|+|m|)^{N+1} on |n| > 2|n-m|
        let k = riesz_kernel(0, 2, 24).unwrap();
        let mut worst: f64 = 0.0;
        for &(n, m) in &[([6i64, 2i64], [7i64, 2i64]), ([10, 5], [9, 6]), ([16, 0], [15, 2])] {
            let ln = (n[0].abs() + n[1].abs()) as f64;
            let lm = (m[0].abs() + m[1].abs()) as f64;
            let d = ((n[0] - m[0]).abs() + (n[1] - m[1]).abs()) as f64;
            assert!(ln > 2.0 * d);
            let lhs = (k.value(&n) - k.value(&m)).abs();
            let rhs = d / (ln + lm).powi(3);
            worst = worst.max(lhs / rhs);
        }
        assert!(worst < 40.0, "smoothness ratio {worst}");
    }
}
