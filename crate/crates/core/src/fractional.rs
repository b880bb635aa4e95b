//! Negative powers `(-Delta_N)^{-sigma}` (fractional integrals) and positive
//! powers `(-Delta_N)^s` of the discrete Laplacian: kernels by time
//! quadrature of the heat semigroup, the pointwise difference formula, the
//! endpoint limits, maximum/comparison principles, and the Hoelder-regularity
//! ratio experiments.

use crate::error::{domain, Result};
use crate::heat::HeatKernel;
use crate::lattice::{
    convolve, holder_seminorm, l1_norm, laplacian, lp_norm, RealSeq, Weight, Window,
};
use crate::quadrature::{log_time_nodes, GaussLegendre};
use crate::spectral::{apply_multiplier_to_window, TorusGrid, TorusSymbol};
use crate::timekernel::{
    assemble, axis_tail_coeffs, product_coeffs, tail_error_gauge, tail_integral, AxisMode,
    PanelRange, TAIL_TERMS,
};
use statrs::function::gamma::{gamma, gamma_li};

/// Which fractional power a kernel realizes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FracPower {
    /// `(-Delta)^{-sigma}`, `0 < 2 sigma < N`.
    Neg(f64),
    /// `(-Delta)^{s}`, `0 < s < 1`.
    Pos(f64),
}

/// A fractional kernel on a window with a quadrature error gauge.
#[derive(Debug, Clone)]
pub struct FracKernel {
    pub power: FracPower,
    seq: RealSeq,
    /// Magnitude of the first neglected analytic-tail term (absolute).
    pub quad_error: f64,
}

impl FracKernel {
    pub fn seq(&self) -> &RealSeq {
        &self.seq
    }

    pub fn value(&self, p: &[i64]) -> f64 {
        self.seq.get(p)
    }

    pub fn dim(&self) -> usize {
        self.seq.dim()
    }
}

/// Evaluation route for the operator applications.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalPath {
    Kernel,
    /// Torus-symbol route; the grid has `factor` times the output side.
    Spectral { grid_factor: usize },
}

/// The weight `(1 + |n|)^{2 sigma - N}` of the natural data space for the
/// fractional integrals (`sigma = -s` gives the space for positive powers).
pub fn sigma_weight(window: Window, sigma: f64) -> Weight {
    Weight::radial_power(window, 2.0 * sigma - window.dim as f64)
}

const TAIL_CUT: f64 = 80.0;

fn check_sigma(sigma: f64, dim: usize) -> Result<()> {
    if !(sigma > 0.0 && 2.0 * sigma < dim as f64) {
        return Err(domain(format!(
            "negative power requires 0 < 2*sigma < N, got sigma={sigma} in dimension {dim}"
        )));
    }
    Ok(())
}

fn check_s(s: f64) -> Result<()> {
    if !(s > 0.0 && s < 1.0) {
        return Err(domain(format!("positive power requires s in (0,1), got {s}")));
    }
    Ok(())
}

/// `K_sigma(n) = (1/Gamma(sigma)) int_0^inf G_{t,N}(n) t^{sigma-1} dt`.
pub fn frac_integral_kernel(sigma: f64, dim: usize, radius: i64) -> Result<FracKernel> {
    check_sigma(sigma, dim)?;
    let v_cut = TAIL_CUT * ((radius.max(1) as f64).powi(2)).max(1.0);
    let inv_gamma = 1.0 / gamma(sigma);
    let weight = move |t: f64| inv_gamma * t.powf(sigma - 1.0);
    // The left cut is capped so t^{sigma-1} stays representable; the missed
    // head `int_0^{t0} G t^{sigma-1} dt / Gamma(sigma)` is `t0^sigma /
    // Gamma(sigma+1)` up to O(t0) and only reaches the origin entry.
    let tau_left = (-36.9 / sigma - 2.0).max(-650.0).min(-12.0);
    let ranges: Vec<PanelRange> = vec![(tau_left, -10.0, 1.0), (-10.0, v_cut.ln(), 0.5)];
    let rule = GaussLegendre::new(16);
    let base = assemble(dim, radius, AxisMode::Product, weight, &ranges, &rule)?;
    let p = sigma - 1.0 - dim as f64 / 2.0;
    let gauss_norm = (4.0 * std::f64::consts::PI).powf(-(dim as f64) / 2.0);
    let window = base.window();
    let origin_head = (sigma * tau_left).exp() / gamma(sigma + 1.0);
    let mut values = base.values().to_vec();
    window.for_each_point(|idx, pt| {
        let axes: Vec<[f64; TAIL_TERMS]> = pt.iter().map(|&c| axis_tail_coeffs(c)).collect();
        let d = product_coeffs(&axes);
        values[idx] += inv_gamma * gauss_norm * tail_integral(&d, p, v_cut);
        if pt.iter().all(|&c| c == 0) {
            values[idx] += origin_head;
        }
    });
    let seq = RealSeq::from_values(window, values)?;
    let quad_error = inv_gamma * gauss_norm * tail_error_gauge(radius, p, v_cut, dim);
    Ok(FracKernel { power: FracPower::Neg(sigma), seq, quad_error })
}

/// `1/|Gamma(-s)| = s / Gamma(1-s)`, finite and smooth across `s in (0,1)`.
fn inv_abs_gamma_neg(s: f64) -> f64 {
    s / gamma(1.0 - s)
}

/// `K_s(n) = (1/|Gamma(-s)|) int_0^inf G_{t,N}(n) t^{-s-1} dt` for `n != 0`,
/// and `K_s(0) = 0`.
///
/// Entries with `|n| = 1` are integrable only barely as `s -> 1`; there the
/// small-time part is regularized by subtracting the exact model
/// `t e^{-2Nt}`, whose integral is an incomplete gamma function.
pub fn frac_power_kernel(s: f64, dim: usize, radius: i64) -> Result<FracKernel> {
    check_s(s)?;
    let v_cut = TAIL_CUT * ((radius.max(1) as f64).powi(2)).max(1.0);
    let scale = inv_abs_gamma_neg(s);
    let weight = move |t: f64| scale * t.powf(-s - 1.0);
    let ranges: Vec<PanelRange> = vec![(-45.0, -10.0, 1.0), (-10.0, v_cut.ln(), 0.5)];
    let rule = GaussLegendre::new(16);
    let base = assemble(dim, radius, AxisMode::Product, weight, &ranges, &rule)?;
    let p = -s - 1.0 - dim as f64 / 2.0;
    let gauss_norm = (4.0 * std::f64::consts::PI).powf(-(dim as f64) / 2.0);
    let window = base.window();
    let mut values = base.values().to_vec();
    window.for_each_point(|idx, pt| {
        let axes: Vec<[f64; TAIL_TERMS]> = pt.iter().map(|&c| axis_tail_coeffs(c)).collect();
        let d = product_coeffs(&axes);
        values[idx] += scale * gauss_norm * tail_integral(&d, p, v_cut);
    });
    // n = 0 is zero by definition; |n| = 1 entries get the regularized split.
    let neighbor = frac_power_neighbor_entry(s, dim, &rule)?;
    window.for_each_point(|idx, pt| {
        let l1 = l1_norm(pt);
        if l1 == 0 {
            values[idx] = 0.0;
        } else if l1 == 1 {
            values[idx] = neighbor;
        }
    });
    let seq = RealSeq::from_values(window, values)?;
    let quad_error = scale * gauss_norm * tail_error_gauge(radius, p, v_cut, dim);
    Ok(FracKernel { power: FracPower::Pos(s), seq, quad_error })
}

/// The kernel entry at a nearest neighbor of the origin:
/// `(1/|Gamma(-s)|) [ int_0^1 (G_t(e) - t e^{-2Nt}) t^{-s-1} dt
///                    + gamma_lower(1-s, 2N) / (2N)^{1-s}
///                    + int_1^inf G_t(e) t^{-s-1} dt ]`.
fn frac_power_neighbor_entry(s: f64, dim: usize, rule: &GaussLegendre) -> Result<f64> {
    let n = dim as f64;
    let g_at_neighbor = |t: f64| -> Result<f64> {
        let fam = crate::bessel::scaled_bessel_family(2.0 * t, 1)?;
        Ok(fam[1] * fam[0].powi(dim as i32 - 1))
    };
    // small-time part, integrand O(t^{2-s})
    let mut small = 0.0;
    for (t, w) in log_time_nodes(-40.0, 0.0, 0.5, rule) {
        small += w * (g_at_neighbor(t)? - t * (-2.0 * n * t).exp()) * t.powf(-s - 1.0);
    }
    let model = gamma_li(1.0 - s, 2.0 * n) / (2.0 * n).powf(1.0 - s);
    // large-time part with analytic tail
    let v_cut = 200.0f64;
    let mut large = 0.0;
    for (t, w) in log_time_nodes(0.0, v_cut.ln(), 0.5, rule) {
        large += w * g_at_neighbor(t)? * t.powf(-s - 1.0);
    }
    let mut axes: Vec<[f64; TAIL_TERMS]> = vec![axis_tail_coeffs(1)];
    for _ in 1..dim {
        axes.push(axis_tail_coeffs(0));
    }
    let d = product_coeffs(&axes);
    let gauss_norm = (4.0 * std::f64::consts::PI).powf(-n / 2.0);
    large += gauss_norm * tail_integral(&d, -s - 1.0 - n / 2.0, v_cut);
    Ok(inv_abs_gamma_neg(s) * (small + model + large))
}

/// Total kernel mass `sum_{k != 0} K_s(k)` over the whole lattice, through
/// `(1/|Gamma(-s)|) int_0^inf (1 - G_t(0)) t^{-s-1} dt` with both endpoint
/// divergences handled in closed form:
/// `int_0^1 2N t^{-s} dt = 2N/(1-s)` and `int_1^inf t^{-s-1} dt = 1/s`.
pub fn frac_power_total_mass(s: f64, dim: usize) -> Result<f64> {
    check_s(s)?;
    let n = dim as f64;
    let rule = GaussLegendre::new(16);
    let g0 = |t: f64| -> Result<f64> {
        let fam = crate::bessel::scaled_bessel_family(2.0 * t, 0)?;
        Ok(fam[0].powi(dim as i32))
    };
    // 1 - G with absolute error proportional to t (the direct subtraction
    // would be amplified by t^{-s-1} into the answer)
    let one_minus_g = |t: f64| -> f64 {
        let w1 = crate::bessel::one_minus_scaled_i0(2.0 * t);
        let g = 1.0 - w1;
        let mut geom = 1.0;
        let mut acc = 0.0;
        for _ in 0..dim {
            acc += geom;
            geom *= g;
        }
        w1 * acc
    };
    // int_0^1 (1 - G - 2Nt) t^{-s-1} dt, integrand O(t^{1-s})
    let mut r1 = 0.0;
    for (t, w) in log_time_nodes(-40.0, 0.0, 0.5, &rule) {
        r1 += w * (one_minus_g(t) - 2.0 * n * t) * t.powf(-s - 1.0);
    }
    // int_1^inf G t^{-s-1} dt with analytic tail
    let v_cut = 200.0f64;
    let mut j = 0.0;
    for (t, w) in log_time_nodes(0.0, v_cut.ln(), 0.5, &rule) {
        j += w * g0(t)? * t.powf(-s - 1.0);
    }
    let axes: Vec<[f64; TAIL_TERMS]> = vec![axis_tail_coeffs(0); dim];
    let d = product_coeffs(&axes);
    let gauss_norm = (4.0 * std::f64::consts::PI).powf(-n / 2.0);
    j += gauss_norm * tail_integral(&d, -s - 1.0 - n / 2.0, v_cut);
    Ok(inv_abs_gamma_neg(s) * (2.0 * n / (1.0 - s) + r1 + 1.0 / s - j))
}

/// `(-Delta)^{-sigma} f` on the window of radius `out_radius`.
///
/// The kernel route is exact for compactly supported data (the kernel is
/// built out to `out_radius + radius(f)`, so no truncation enters); the
/// spectral route requires mean-zero data (singular symbol at the DC node).
pub fn apply_frac_integral(
    f: &RealSeq,
    sigma: f64,
    out_radius: i64,
    path: EvalPath,
) -> Result<RealSeq> {
    check_sigma(sigma, f.dim())?;
    match path {
        EvalPath::Kernel => {
            let kernel = frac_integral_kernel(sigma, f.dim(), out_radius + f.radius())?;
            convolve(f, kernel.seq())?.with_radius(out_radius)
        }
        EvalPath::Spectral { grid_factor } => {
            let out = Window::new(f.dim(), out_radius)?;
            let grid = TorusGrid::for_window(out, grid_factor)?;
            let sym = TorusSymbol::frac_neg(grid, sigma)?;
            apply_multiplier_to_window(f, &sym, out, 1e-8)
        }
    }
}

/// `(-Delta)^s f(n) = sum_{k != n} K_s(n-k) (f(n) - f(k))`, evaluated as
/// `f(n) S_total - (K_s * f)(n)` with the exact total mass `S_total`.
pub fn apply_frac_power(
    f: &RealSeq,
    s: f64,
    out_radius: i64,
    path: EvalPath,
) -> Result<RealSeq> {
    check_s(s)?;
    match path {
        EvalPath::Kernel => {
            let kernel = frac_power_kernel(s, f.dim(), out_radius + f.radius())?;
            let conv = convolve(f, kernel.seq())?.with_radius(out_radius)?;
            let total = frac_power_total_mass(s, f.dim())?;
            f.with_radius(out_radius)?.scale(total).sub(&conv)
        }
        EvalPath::Spectral { grid_factor } => {
            let out = Window::new(f.dim(), out_radius)?;
            let grid = TorusGrid::for_window(out, grid_factor)?;
            let sym = TorusSymbol::frac_pos(grid, s)?;
            apply_multiplier_to_window(f, &sym, out, 1e-8)
        }
    }
}

/// Row of the endpoint-limit table: deviations of `(-Delta)^s f` from `f`
/// (the `s -> 0` limit) and from `-Delta f` (the `s -> 1` limit).
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct FracLimitRow {
    pub s: f64,
    pub dev_identity: f64,
    pub dev_laplacian: f64,
}

pub fn frac_limits_check(f: &RealSeq, s_values: &[f64]) -> Result<Vec<FracLimitRow>> {
    let out_radius = f.radius() + 2;
    let target_id = f.with_radius(out_radius)?;
    let target_lap = laplacian(&f.with_radius(out_radius)?).scale(-1.0);
    let mut rows = Vec::with_capacity(s_values.len());
    for &s in s_values {
        let g = apply_frac_power(f, s, out_radius, EvalPath::Kernel)?;
        rows.push(FracLimitRow {
            s,
            dev_identity: g.sup_distance(&target_id),
            dev_laplacian: g.sup_distance(&target_lap),
        });
    }
    Ok(rows)
}

/// Maximum-principle evaluation: for `f >= 0` with `f(n0) = 0`, returns
/// `(-Delta)^s f(n0)`, which the principle asserts to be `<= 0` (and `< 0`
/// unless `f` vanishes identically).
pub fn maximum_principle_check(f: &RealSeq, n0: &[i64], s: f64) -> Result<f64> {
    check_s(s)?;
    if f.values().iter().any(|&v| v < 0.0) {
        return Err(domain("maximum principle requires f >= 0"));
    }
    if f.get(n0) != 0.0 {
        return Err(domain("maximum principle requires f(n0) = 0"));
    }
    let reach = n0.iter().map(|c| c.abs()).max().unwrap_or(0) + f.radius();
    let kernel = frac_power_kernel(s, f.dim(), reach)?;
    // (-Delta)^s f(n0) = -sum_k K_s(n0 - k) f(k) since f(n0) = 0
    let mut acc = 0.0;
    let mut shift = vec![0i64; f.dim()];
    f.window().for_each_point(|idx, k| {
        let v = f.values()[idx];
        if v != 0.0 {
            for (s, (a, b)) in shift.iter_mut().zip(n0.iter().zip(k.iter())) {
                *s = a - b;
            }
            acc -= kernel.value(&shift) * v;
        }
    });
    Ok(acc)
}

/// Which regularity estimate a ratio experiment probes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SchauderMode {
    /// `[(-Delta)^{-sigma} f]_{C^{0,2 sigma}} / ||f||_inf`, `sigma < 1/2`.
    SupNorm,
    /// `[(-Delta)^{-sigma} f]_{C^{0,2 sigma + alpha}} / [f]_{C^{0,alpha}}`,
    /// `2 sigma + alpha < 1`.
    Holder(f64),
}

pub fn schauder_ratio(f: &RealSeq, sigma: f64, mode: SchauderMode) -> Result<f64> {
    check_sigma(sigma, f.dim())?;
    if sigma >= 0.5 {
        return Err(domain("regularity ratios require sigma < 1/2"));
    }
    let out_radius = f.radius();
    let transformed = apply_frac_integral(f, sigma, out_radius, EvalPath::Kernel)?;
    match mode {
        SchauderMode::SupNorm => {
            let denom = f.sup_norm();
            if denom == 0.0 {
                return Ok(0.0);
            }
            Ok(holder_seminorm(&transformed, 2.0 * sigma, 0)? / denom)
        }
        SchauderMode::Holder(alpha) => {
            if !(alpha > 0.0 && 2.0 * sigma + alpha < 1.0) {
                return Err(domain(format!(
                    "requires alpha > 0 and 2*sigma + alpha < 1, got alpha={alpha}, sigma={sigma}"
                )));
            }
            let denom = holder_seminorm(f, alpha, 0)?;
            if denom == 0.0 {
                return Ok(0.0);
            }
            Ok(holder_seminorm(&transformed, 2.0 * sigma + alpha, 0)? / denom)
        }
    }
}

/// Hardy-Littlewood-Sobolev exponent predicate for the unweighted estimate
/// `||(-Delta)^{-sigma} f||_p <= C ||f||_q`.
pub fn hls_exponents_admissible(sigma: f64, dim: usize, p: f64, q: f64) -> bool {
    sigma > 0.0
        && 2.0 * sigma < dim as f64
        && q > 1.0
        && p > q
        && 1.0 / p <= 1.0 / q - 2.0 * sigma / dim as f64
}

/// Ratio `||(-Delta)^{-sigma} f||_p / ||f||_q` for sampling experiments.
pub fn hls_ratio(f: &RealSeq, sigma: f64, p: f64, q: f64, out_radius: i64) -> Result<f64> {
    if !hls_exponents_admissible(sigma, f.dim(), p, q) {
        return Err(domain(format!(
            "exponents violate 1/p <= 1/q - 2*sigma/N (sigma={sigma}, p={p}, q={q})"
        )));
    }
    let tf = apply_frac_integral(f, sigma, out_radius, EvalPath::Kernel)?;
    Ok(lp_norm(&tf, p, None)? / lp_norm(f, q, None)?)
}

/// Heat-kernel composition lower bound used as a sanity oracle:
/// `(-Delta)^{-sigma} G_{t,N} >= t^sigma G_{2t,N}` pointwise.
pub fn composition_lower_bound_margin(sigma: f64, dim: usize, t: f64, radius: i64) -> Result<f64> {
    let g_t = HeatKernel::auto(t, dim, 1e-12)?;
    let g_2t = HeatKernel::auto(2.0 * t, dim, 1e-12)?;
    let lhs = apply_frac_integral(g_t.seq(), sigma, radius, EvalPath::Kernel)?;
    let mut margin = f64::INFINITY;
    let window = Window::new(dim, radius)?;
    window.for_each_point(|_, p| {
        let m = lhs.get(p) - t.powf(sigma) * g_2t.value(p);
        if m < margin {
            margin = m;
        }
    });
    Ok(margin)
}
