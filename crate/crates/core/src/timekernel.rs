//! Shared builder for kernels of the form `int_0^inf weight(t) G_{t,N}(n) dt`
//! (or with a forward difference of `G` along one axis): composite
//! Gauss-Legendre panels on a logarithmic time axis for the finite part, and
//! the large-argument expansion of `e^{-z} I_k(z)` for the analytic tail.

use crate::bessel::{large_argument_coeffs, scaled_bessel_family};
use crate::error::Result;
use crate::lattice::{RealSeq, Window};
use crate::quadrature::{log_time_nodes, GaussLegendre};

/// How the one-dimensional family enters each axis of the product kernel.
#[derive(Debug, Clone, Copy)]
pub(crate) enum AxisMode {
    /// `prod_i g(n_i)`
    Product,
    /// `(g(n_axis + 1) - g(n_axis)) prod_{i != axis} g(n_i)`
    ForwardDiff(usize),
}

/// A panel range `(tau_lo, tau_hi, width)` on the logarithmic time axis.
pub(crate) type PanelRange = (f64, f64, f64);

/// Accumulate `sum_j w_j weight(t_j) G-factor(n; t_j)` over the window.
pub(crate) fn assemble(
    dim: usize,
    radius: i64,
    mode: AxisMode,
    weight: impl Fn(f64) -> f64,
    ranges: &[PanelRange],
    rule: &GaussLegendre,
) -> Result<RealSeq> {
    let window = Window::new(dim, radius)?;
    let mut values = vec![0.0f64; window.len()];
    let fam_len = radius as usize + 2;
    for &(lo, hi, width) in ranges {
        if hi <= lo {
            continue;
        }
        for (t, w) in log_time_nodes(lo, hi, width, rule) {
            let fam = scaled_bessel_family(2.0 * t, fam_len - 1)?;
            let coef = w * weight(t);
            if coef == 0.0 {
                continue;
            }
            match mode {
                AxisMode::Product => window.for_each_point(|idx, p| {
                    let mut v = coef;
                    for &c in p {
                        v *= fam[c.unsigned_abs() as usize];
                    }
                    values[idx] += v;
                }),
                AxisMode::ForwardDiff(axis) => window.for_each_point(|idx, p| {
                    let mut v = coef;
                    for (i, &c) in p.iter().enumerate() {
                        if i == axis {
                            v *= fam[(c + 1).unsigned_abs() as usize]
                                - fam[c.unsigned_abs() as usize];
                        } else {
                            v *= fam[c.unsigned_abs() as usize];
                        }
                    }
                    values[idx] += v;
                }),
            }
        }
    }
    RealSeq::from_values(window, values)
}

/// Number of terms kept in the large-argument expansion.
pub(crate) const TAIL_TERMS: usize = crate::bessel::LARGE_ARG_TERMS;

/// Coefficients of `e^{-2v} I_k(2v) ~ (4 pi v)^{-1/2} sum_j a_j v^{-j}`:
/// the canonical expansion in the argument `x = 2v`, rescaled.
pub(crate) fn axis_tail_coeffs(k: i64) -> [f64; TAIL_TERMS] {
    let mut out = large_argument_coeffs(k.abs());
    let mut pow = 1.0;
    for c in out.iter_mut() {
        *c /= pow;
        pow *= 2.0;
    }
    out
}

/// Difference `a_j(|k+1|) - a_j(|k|)`: the expansion of the forward-differenced
/// axis factor (its leading term cancels).
pub(crate) fn axis_tail_coeffs_diff(k: i64) -> [f64; TAIL_TERMS] {
    let a = axis_tail_coeffs((k + 1).abs());
    let b = axis_tail_coeffs(k.abs());
    let mut out = [0.0; TAIL_TERMS];
    for j in 0..TAIL_TERMS {
        out[j] = a[j] - b[j];
    }
    out
}

/// Cauchy product of per-axis coefficient lists, truncated to TAIL_TERMS.
pub(crate) fn product_coeffs(axes: &[[f64; TAIL_TERMS]]) -> [f64; TAIL_TERMS] {
    let mut acc = [0.0; TAIL_TERMS];
    acc[0] = 1.0;
    for a in axes {
        let mut next = [0.0; TAIL_TERMS];
        for (i, &ai) in acc.iter().enumerate() {
            if ai == 0.0 {
                continue;
            }
            for (j, &aj) in a.iter().enumerate() {
                if i + j < TAIL_TERMS {
                    next[i + j] += ai * aj;
                }
            }
        }
        acc = next;
    }
    acc
}

/// `int_V^inf v^{p - r} dv` summed against a coefficient series
/// `sum_r c_r v^{-r}`; requires `p - r < -1` for every contributing term.
pub(crate) fn tail_integral(coeffs: &[f64; TAIL_TERMS], p: f64, v_cut: f64) -> f64 {
    let mut acc = 0.0;
    for (r, &c) in coeffs.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        let expo = p - r as f64;
        debug_assert!(expo < -1.0, "tail integral diverges at exponent {expo}");
        acc += c * v_cut.powf(expo + 1.0) / (-(expo + 1.0));
    }
    acc
}

/// Magnitude of the first neglected tail term, as a crude error gauge.
pub(crate) fn tail_error_gauge(k_max: i64, p: f64, v_cut: f64, dim: usize) -> f64 {
    let k2 = 4.0 * (k_max as f64) * (k_max as f64);
    let mut prod = 1.0f64;
    let mut fact = 1.0f64;
    for j in 1..=TAIL_TERMS {
        prod *= (k2 - (2.0 * j as f64 - 1.0).powi(2)).abs().max(1.0);
        fact *= j as f64;
    }
    let next = dim as f64 * prod / (fact * 16f64.powi(TAIL_TERMS as i32));
    let expo = p - TAIL_TERMS as f64;
    if expo < -1.0 {
        next * v_cut.powf(expo + 1.0) / (-(expo + 1.0))
    } else {
        f64::INFINITY
    }
}
