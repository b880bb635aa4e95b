//! Littlewood-Paley square functions `g_k` (heat) and their Poisson
//! counterparts, the exact L^2 identity `||g_k f||_2^2 = Gamma(2k)/2^{2k}
//! ||f||_2^2`, Laplace-type multipliers `T_M`, and imaginary powers.
//!
//! Time derivatives are never differenced numerically: the heat equation
//! makes `d^k/dt^k W_t = Delta^k W_t` exact, which on the torus side is the
//! multiplier `(-lambda)^k e^{-lambda t}`.

use crate::error::{domain, Error, Result};
use crate::lattice::{ComplexSeq, RealSeq, Window};
use crate::spectral::{
    apply_multiplier, dft, idft_to_window, laplacian_symbol, TorusGrid, TorusSymbol,
};
use num_complex::Complex64;

/// Geometric time grid with trapezoid weights on the logarithmic axis, used
/// for `int_0^inf t^{2k-1} |phi(t)|^2 dt`.
#[derive(Debug, Clone)]
pub struct TimeGridQuadrature {
    pub t_min: f64,
    pub t_max: f64,
    pub points_per_decade: usize,
    ts: Vec<f64>,
    /// Trapezoid weights in `tau = ln t`.
    weights: Vec<f64>,
}

impl TimeGridQuadrature {
    pub fn new(t_min: f64, t_max: f64, points_per_decade: usize) -> Result<Self> {
        if !(t_min > 0.0 && t_max > t_min && points_per_decade >= 2) {
            return Err(domain("time grid requires 0 < t_min < t_max and >= 2 points/decade"));
        }
        let decades = (t_max / t_min).log10();
        let n = (decades * points_per_decade as f64).ceil() as usize + 1;
        let h = (t_max.ln() - t_min.ln()) / (n - 1) as f64;
        let ts: Vec<f64> = (0..n).map(|j| (t_min.ln() + j as f64 * h).exp()).collect();
        let mut weights = vec![h; n];
        weights[0] = 0.5 * h;
        weights[n - 1] = 0.5 * h;
        Ok(TimeGridQuadrature { t_min, t_max, points_per_decade, ts, weights })
    }

    /// The default grid: eight decades, 32 points per decade.
    pub fn default_grid() -> Self {
        Self::new(1e-4, 1e4, 32).expect("valid default grid")
    }

    pub fn times(&self) -> &[f64] {
        &self.ts
    }

    pub fn decades(&self) -> f64 {
        (self.t_max / self.t_min).log10()
    }

    /// `sum_j w_j t_j^{2k} phi2_j ~ int t^{2k-1} phi(t)^2 dt` for sampled
    /// squared values `phi2_j = phi(t_j)^2`.
    pub fn integrate_sq(&self, k: usize, phi_sq: &[f64]) -> f64 {
        self.ts
            .iter()
            .zip(&self.weights)
            .zip(phi_sq)
            .map(|((t, w), p)| w * t.powi(2 * k as i32) * p)
            .sum()
    }

    /// Relative truncation certificate for the mode `lambda`: the mass of
    /// `t^{2k-1} lambda^{2k} e^{-2 lambda t}` outside `[t_min, t_max]`,
    /// relative to the full integral `Gamma(2k)/2^{2k}`.
    pub fn tail_bound(&self, k: usize, lambda: f64) -> f64 {
        let full = statrs::function::gamma::gamma(2.0 * k as f64) / 4f64.powi(k as i32);
        // lower tail: e^{-2 lambda t} <= 1
        let lower = (lambda * self.t_min).powi(2 * k as i32) / (2.0 * k as f64);
        // upper tail: t^{2k-1} <= t_max^{2k-1} e^{(t-t_max)} style crude bound
        let x = 2.0 * lambda * self.t_max;
        let upper = if x > 2.0 * k as f64 {
            (lambda * self.t_max).powi(2 * k as i32 - 1) * (-x).exp() * lambda.recip() * lambda
        } else {
            f64::INFINITY
        };
        (lower + upper) / full
    }
}

/// Which semigroup drives the square function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Drive {
    Heat,
    Poisson,
}

fn time_multiplier(drive: Drive, lam: f64, k: usize, t: f64) -> f64 {
    match drive {
        // d^k/dt^k e^{-lambda t} = (-lambda)^k e^{-lambda t}
        Drive::Heat => lam.powi(k as i32) * (-lam * t).exp(),
        // d^k/dt^k e^{-sqrt(lambda) t} = (-sqrt(lambda))^k e^{-sqrt(lambda) t}
        Drive::Poisson => {
            let r = lam.sqrt();
            r.powi(k as i32) * (-r * t).exp()
        }
    }
}

fn gk_pointwise(
    f: &RealSeq,
    k: usize,
    grid: &TimeGridQuadrature,
    drive: Drive,
    pad: i64,
) -> Result<RealSeq> {
    if k < 1 {
        return Err(domain("square functions need k >= 1"));
    }
    let out = Window::new(f.dim(), f.radius() + pad)?;
    let torus = TorusGrid::for_window(out, 4)?;
    let hat = dft(f, &torus)?;
    let mut lams = vec![0.0f64; torus.len()];
    torus.for_each_node(|idx, x| lams[idx] = laplacian_symbol(x));
    let mut acc = vec![0.0f64; out.len()];
    let mut scaled = vec![Complex64::new(0.0, 0.0); torus.len()];
    for (j, &t) in grid.ts.iter().enumerate() {
        for i in 0..torus.len() {
            scaled[i] = hat[i] * time_multiplier(drive, lams[i], k, t);
        }
        let field = idft_to_window(&scaled, &torus, out)?;
        let w = grid.weights[j] * t.powi(2 * k as i32);
        for (a, v) in acc.iter_mut().zip(field.values()) {
            *a += w * v.re * v.re;
        }
    }
    let values: Vec<f64> = acc.iter().map(|a| a.sqrt()).collect();
    RealSeq::from_values(out, values)
}

fn gk_ratio(f: &RealSeq, k: usize, grid: &TimeGridQuadrature, drive: Drive) -> Result<f64> {
    if k < 1 {
        return Err(domain("square functions need k >= 1"));
    }
    let torus = TorusGrid::for_window(f.window(), 4)?;
    let hat = dft(f, &torus)?;
    let mut lams = vec![0.0f64; torus.len()];
    torus.for_each_node(|idx, x| lams[idx] = laplacian_symbol(x));
    // || g_k f ||_2^2 = int t^{2k-1} || d^k/dt^k W_t f ||_2^2 dt, with the
    // spatial norm evaluated by Parseval on the torus modes
    let phi_sq: Vec<f64> = grid
        .ts
        .iter()
        .map(|&t| {
            hat.iter()
                .zip(&lams)
                .map(|(h, &lam)| h.norm_sqr() * time_multiplier(drive, lam, k, t).powi(2))
                .sum::<f64>()
                / torus.len() as f64
        })
        .collect();
    // reuse integrate_sq with the t^{2k} Jacobian folded in per node
    let norm_sq: f64 = grid
        .ts
        .iter()
        .zip(&grid.weights)
        .zip(&phi_sq)
        .map(|((t, w), p)| w * t.powi(2 * k as i32) * p)
        .sum();
    let f_sq: f64 = f.values().iter().map(|v| v * v).sum();
    if f_sq == 0.0 {
        return Err(domain("ratio needs nonzero data"));
    }
    Ok(norm_sq / f_sq)
}

/// Pointwise heat square function
/// `g_k f(n) = (int_0^inf t^{2k-1} |Delta^k W_t f(n)|^2 dt)^{1/2}`.
pub fn gk(f: &RealSeq, k: usize, grid: &TimeGridQuadrature) -> Result<RealSeq> {
    gk_pointwise(f, k, grid, Drive::Heat, 4)
}

/// Pointwise Poisson square function (time derivatives through the
/// subordinated symbol `(-sqrt(lambda))^k e^{-sqrt(lambda) t}`).
pub fn gk_poisson(f: &RealSeq, k: usize, grid: &TimeGridQuadrature) -> Result<RealSeq> {
    gk_pointwise(f, k, grid, Drive::Poisson, 4)
}

/// `||g_k f||_2^2 / ||f||_2^2`; equals `Gamma(2k)/2^{2k}` on mean-zero data.
pub fn gk_l2_ratio(f: &RealSeq, k: usize, grid: &TimeGridQuadrature) -> Result<f64> {
    gk_ratio(f, k, grid, Drive::Heat)
}

pub fn gk_poisson_l2_ratio(f: &RealSeq, k: usize, grid: &TimeGridQuadrature) -> Result<f64> {
    gk_ratio(f, k, grid, Drive::Poisson)
}

/// The exact L^2 identity constant `Gamma(2k) / 2^{2k}`.
pub fn gk_identity_constant(k: usize) -> f64 {
    statrs::function::gamma::gamma(2.0 * k as f64) / 4f64.powi(k as i32)
}

/// Laplace-type multiplier `T_M` with `M(x) = x int_0^inf e^{-xt} a(t) dt`.
///
/// The declared bound on `|a|` is spot-checked on a sample of times; data
/// that exceeds it is refused.
pub fn laplace_multiplier_apply(
    f: &RealSeq,
    a: impl Fn(f64) -> Complex64,
    declared_bound: f64,
    grid_factor: usize,
) -> Result<ComplexSeq> {
    if !(declared_bound.is_finite() && declared_bound > 0.0) {
        return Err(domain("the density bound must be a positive finite number"));
    }
    let mut t = 1e-6;
    while t < 1e6 {
        if a(t).norm() > declared_bound * (1.0 + 1e-9) {
            return Err(Error::Tolerance(format!(
                "density exceeds its declared bound at t={t}: |a| = {}",
                a(t).norm()
            )));
        }
        t *= 10.0;
    }
    let grid = TorusGrid::for_window(f.window(), grid_factor)?;
    let sym = TorusSymbol::laplace_type(grid, a)?;
    apply_multiplier(f, &sym)
}

/// `(-Delta)^{i gamma} f` through its unit-modulus symbol.
pub fn imaginary_power_apply(f: &RealSeq, gamma: f64, grid_factor: usize) -> Result<ComplexSeq> {
    let grid = TorusGrid::for_window(f.window(), grid_factor)?;
    let sym = TorusSymbol::imaginary_power(grid, gamma)?;
    apply_multiplier(f, &sym)
}

/// Gamma function for complex arguments (Lanczos, g = 7).
pub fn complex_gamma(z: Complex64) -> Complex64 {
    const G: [f64; 9] = [
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ];
    if z.re < 0.5 {
        // reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z)
        let pi = std::f64::consts::PI;
        return pi / ((pi * z).sin() * complex_gamma(Complex64::new(1.0, 0.0) - z));
    }
    let z = z - 1.0;
    let mut x = Complex64::new(G[0], 0.0);
    for (i, &c) in G.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + 7.5;
    let sqrt_two_pi = (2.0 * std::f64::consts::PI).sqrt();
    sqrt_two_pi * t.powc(z + 0.5) * (-t).exp() * x
}
