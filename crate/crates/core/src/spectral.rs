//! Discrete Fourier transform on finite windows and torus symbols: the
//! spectral evaluation path. Every operator in the crate has a symbol on
//! `[-1/2, 1/2)^N`; applying it through the grid transform gives an
//! independent oracle for the kernel path.

use crate::error::{domain, mismatch, Error, Result};
use crate::lattice::{ComplexSeq, RealSeq, Window};
use crate::quadrature::{log_time_nodes, GaussLegendre};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Uniform grid `x_j = j/m - 1/2`, `j = 0..m-1`, per axis of the torus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TorusGrid {
    pub dim: usize,
    pub m: usize,
}

impl TorusGrid {
    pub fn new(dim: usize, m: usize) -> Result<Self> {
        if dim == 0 {
            return Err(domain("torus grid dimension must be >= 1"));
        }
        if m < 2 || m % 2 != 0 {
            return Err(domain(format!("points per axis must be even and >= 2, got {m}")));
        }
        let mut total: usize = 1;
        for _ in 0..dim {
            total = total
                .checked_mul(m)
                .ok_or_else(|| domain("torus grid too large"))?;
        }
        if total > (1usize << 34) {
            return Err(domain("torus grid too large"));
        }
        Ok(TorusGrid { dim, m })
    }

    /// Grid sized `factor` times the window side (rounded up to even), the
    /// default margin that keeps kernel wrap-around small.
    pub fn for_window(window: Window, factor: usize) -> Result<Self> {
        let side = window.side() * factor.max(1);
        TorusGrid::new(window.dim, side + side % 2)
    }

    pub fn len(&self) -> usize {
        self.m.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Visit every node as `(linear index, coordinates in [-1/2, 1/2)^N)`.
    pub fn for_each_node(&self, mut f: impl FnMut(usize, &[f64])) {
        let mut j = vec![0usize; self.dim];
        let mut x = vec![-0.5; self.dim];
        let len = self.len();
        for idx in 0..len {
            f(idx, &x);
            for ax in (0..self.dim).rev() {
                if j[ax] + 1 < self.m {
                    j[ax] += 1;
                    x[ax] = j[ax] as f64 / self.m as f64 - 0.5;
                    break;
                }
                j[ax] = 0;
                x[ax] = -0.5;
            }
        }
    }

    /// Alias-free transform of sequences on `window` requires at least one
    /// grid point per lattice point of the window.
    pub fn admits(&self, window: Window) -> bool {
        self.dim == window.dim && self.m >= window.side()
    }
}

/// The Laplacian symbol `lambda(x) = 4 sum_k sin^2(pi x_k)`.
pub fn laplacian_symbol(x: &[f64]) -> f64 {
    4.0 * x.iter().map(|&xi| (PI * xi).sin().powi(2)).sum::<f64>()
}

#[derive(Debug, Clone, PartialEq)]
pub enum SymbolKind {
    Heat { t: f64 },
    Poisson { t: f64 },
    Riesz { axis: usize },
    FracNeg { sigma: f64 },
    FracPos { s: f64 },
    LaplaceType,
    ImaginaryPower { gamma: f64 },
    Custom,
}

/// A multiplier sampled on a torus grid.
#[derive(Debug, Clone)]
pub struct TorusSymbol {
    pub grid: TorusGrid,
    pub values: Vec<Complex64>,
    pub kind: SymbolKind,
}

impl TorusSymbol {
    fn build(
        grid: TorusGrid,
        kind: SymbolKind,
        mut f: impl FnMut(&[f64]) -> Complex64,
    ) -> Self {
        let mut values = vec![Complex64::new(0.0, 0.0); grid.len()];
        grid.for_each_node(|idx, x| values[idx] = f(x));
        TorusSymbol { grid, values, kind }
    }

    /// Heat symbol `e^{-4 t sum sin^2(pi x_k)}`, real in `(0, 1]`.
    pub fn heat(grid: TorusGrid, t: f64) -> Result<Self> {
        if !(t >= 0.0) {
            return Err(domain("heat symbol requires t >= 0"));
        }
        Ok(Self::build(grid, SymbolKind::Heat { t }, |x| {
            Complex64::new((-t * laplacian_symbol(x)).exp(), 0.0)
        }))
    }

    /// Poisson symbol `e^{-2 t sqrt(sum sin^2(pi x_k))} = e^{-t sqrt(lambda)}`.
    pub fn poisson(grid: TorusGrid, t: f64) -> Result<Self> {
        if !(t >= 0.0) {
            return Err(domain("Poisson symbol requires t >= 0"));
        }
        Ok(Self::build(grid, SymbolKind::Poisson { t }, |x| {
            Complex64::new((-t * laplacian_symbol(x).sqrt()).exp(), 0.0)
        }))
    }

    /// Riesz symbol `(e^{-2 pi i x_i} - 1) / sqrt(lambda)
    /// = -i e^{-pi i x_i} sin(pi x_i) / sqrt(sum_k sin^2(pi x_k))`;
    /// zero at the singular node `x = 0` (the spectral path acts on
    /// mean-zero data).
    pub fn riesz(grid: TorusGrid, axis: usize) -> Result<Self> {
        if axis >= grid.dim {
            return Err(domain(format!("axis {axis} out of range for dimension {}", grid.dim)));
        }
        Ok(Self::build(grid, SymbolKind::Riesz { axis }, |x| {
            let denom = x.iter().map(|&xi| (PI * xi).sin().powi(2)).sum::<f64>().sqrt();
            if denom == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let s = (PI * x[axis]).sin();
            let phase = Complex64::new(0.0, -1.0) * Complex64::from_polar(1.0, -PI * x[axis]);
            phase * s / denom
        }))
    }

    /// Negative-power symbol `lambda^{-sigma}`; zero at the singular DC node.
    pub fn frac_neg(grid: TorusGrid, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && 2.0 * sigma < grid.dim as f64) {
            return Err(domain(format!(
                "negative power requires 0 < 2*sigma < N, got sigma={sigma} in dimension {}",
                grid.dim
            )));
        }
        Ok(Self::build(grid, SymbolKind::FracNeg { sigma }, |x| {
            let lam = laplacian_symbol(x);
            if lam == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(lam.powf(-sigma), 0.0)
            }
        }))
    }

    /// Positive-power symbol `lambda^{s}`.
    pub fn frac_pos(grid: TorusGrid, s: f64) -> Result<Self> {
        if !(s > 0.0 && s < 1.0) {
            return Err(domain(format!("positive power requires s in (0,1), got {s}")));
        }
        Ok(Self::build(grid, SymbolKind::FracPos { s }, |x| {
            Complex64::new(laplacian_symbol(x).powf(s), 0.0)
        }))
    }

    /// Laplace-transform multiplier `M(lambda) = lambda int_0^infty
    /// e^{-lambda t} a(t) dt` for a bounded density `a`; `M(0) = 0`.
    pub fn laplace_type(grid: TorusGrid, a: impl Fn(f64) -> Complex64) -> Result<Self> {
        let rule = GaussLegendre::new(16);
        Ok(Self::build(grid, SymbolKind::LaplaceType, |x| {
            let lam = laplacian_symbol(x);
            laplace_transform_value(lam, &a, &rule)
        }))
    }

    /// Imaginary-power symbol `lambda^{i gamma}`, modulus one away from the
    /// DC node (set to zero there).
    pub fn imaginary_power(grid: TorusGrid, gamma: f64) -> Result<Self> {
        Ok(Self::build(grid, SymbolKind::ImaginaryPower { gamma }, |x| {
            let lam = laplacian_symbol(x);
            if lam == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::from_polar(1.0, gamma * lam.ln())
            }
        }))
    }

    pub fn from_fn(grid: TorusGrid, f: impl FnMut(&[f64]) -> Complex64) -> Self {
        Self::build(grid, SymbolKind::Custom, f)
    }

    pub fn max_modulus(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// `M(lambda) = lambda int e^{-lambda t} a(t) dt` by panel quadrature on a
/// logarithmic time axis.
fn laplace_transform_value(
    lam: f64,
    a: &impl Fn(f64) -> Complex64,
    rule: &GaussLegendre,
) -> Complex64 {
    if lam <= 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let tau_hi = (45.0 / lam).ln();
    let tau_lo = (1e-20f64).ln();
    let mut acc = Complex64::new(0.0, 0.0);
    for (t, w) in log_time_nodes(tau_lo, tau_hi, 0.5, rule) {
        acc += a(t) * ((-lam * t).exp() * w);
    }
    acc * lam
}

/// Forward transform: `F f(x_j) = sum_k f(k) e^{2 pi i <k, x_j>}` at every
/// grid node, as exact trigonometric sums.
pub fn dft(f: &RealSeq, grid: &TorusGrid) -> Result<Vec<Complex64>> {
    if !grid.admits(f.window()) {
        return Err(mismatch(format!(
            "grid with {} points/axis cannot resolve a window of side {}",
            grid.m,
            f.window().side()
        )));
    }
    let mut support: Vec<(Vec<i64>, f64)> = Vec::new();
    f.window().for_each_point(|idx, p| {
        let v = f.values()[idx];
        if v != 0.0 {
            support.push((p.to_vec(), v));
        }
    });
    let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
    grid.for_each_node(|idx, x| {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, v) in &support {
            let phase: f64 = k.iter().zip(x).map(|(&ki, &xi)| ki as f64 * xi).sum();
            acc += Complex64::from_polar(*v, 2.0 * PI * phase);
        }
        out[idx] = acc;
    });
    Ok(out)
}

/// Inverse transform onto a window:
/// `f(n) = m^{-N} sum_j F(x_j) e^{-2 pi i <n, x_j>}`.
pub fn idft_to_window(
    samples: &[Complex64],
    grid: &TorusGrid,
    window: Window,
) -> Result<ComplexSeq> {
    if samples.len() != grid.len() {
        return Err(mismatch("sample count does not match the grid"));
    }
    if !grid.admits(window) {
        return Err(mismatch("grid cannot resolve the target window"));
    }
    let scale = 1.0 / grid.len() as f64;
    // Gather (node, sample) pairs once; then one pass per output point.
    let mut nodes: Vec<(Vec<f64>, Complex64)> = Vec::with_capacity(grid.len());
    grid.for_each_node(|idx, x| nodes.push((x.to_vec(), samples[idx])));
    let mut values = vec![Complex64::new(0.0, 0.0); window.len()];
    window.for_each_point(|idx, n| {
        let mut acc = Complex64::new(0.0, 0.0);
        for (x, s) in &nodes {
            let phase: f64 = n.iter().zip(x).map(|(&ni, &xi)| ni as f64 * xi).sum();
            acc += s * Complex64::from_polar(1.0, -2.0 * PI * phase);
        }
        values[idx] = acc * scale;
    });
    ComplexSeq::from_values(window, values)
}

/// Inverse transform evaluated on the full period cell
/// `n in [-m/2, m/2 - 1]^N`, in row-major order over that cell.
pub fn idft_full_cell(samples: &[Complex64], grid: &TorusGrid) -> Result<Vec<Complex64>> {
    if samples.len() != grid.len() {
        return Err(mismatch("sample count does not match the grid"));
    }
    let mut nodes: Vec<(Vec<f64>, Complex64)> = Vec::with_capacity(grid.len());
    grid.for_each_node(|idx, x| nodes.push((x.to_vec(), samples[idx])));
    let scale = 1.0 / grid.len() as f64;
    let half = grid.m as i64 / 2;
    let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
    let mut coords = vec![-half; grid.dim];
    for slot in out.iter_mut() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (x, s) in &nodes {
            let phase: f64 = coords.iter().zip(x).map(|(&ni, &xi)| ni as f64 * xi).sum();
            acc += s * Complex64::from_polar(1.0, -2.0 * PI * phase);
        }
        *slot = acc * scale;
        for ax in (0..grid.dim).rev() {
            if coords[ax] < half - 1 {
                coords[ax] += 1;
                break;
            }
            coords[ax] = -half;
        }
    }
    Ok(out)
}

/// Apply a multiplier: `idft(symbol . dft(f))`, cropped to the window of `f`.
pub fn apply_multiplier(f: &RealSeq, symbol: &TorusSymbol) -> Result<ComplexSeq> {
    if symbol.grid.dim != f.dim() {
        return Err(mismatch("symbol and sequence dimensions differ"));
    }
    let mut hat = dft(f, &symbol.grid)?;
    for (h, s) in hat.iter_mut().zip(&symbol.values) {
        *h *= s;
    }
    idft_to_window(&hat, &symbol.grid, f.window())
}

/// Apply a real symmetric multiplier with the output evaluated on an
/// arbitrary window (not just the input's), dropping the imaginary residue
/// after asserting it is below `imag_tol` relative to the output scale.
pub fn apply_multiplier_to_window(
    f: &RealSeq,
    symbol: &TorusSymbol,
    out_window: Window,
    imag_tol: f64,
) -> Result<RealSeq> {
    if symbol.grid.dim != f.dim() {
        return Err(mismatch("symbol and sequence dimensions differ"));
    }
    let mut hat = dft(f, &symbol.grid)?;
    for (h, s) in hat.iter_mut().zip(&symbol.values) {
        *h *= s;
    }
    let out = idft_to_window(&hat, &symbol.grid, out_window)?;
    let scale = out.sup_norm().max(f.sup_norm()).max(1e-300);
    let imag = out.values().iter().map(|v| v.im.abs()).fold(0.0, f64::max);
    if imag > imag_tol * scale {
        return Err(Error::Tolerance(format!(
            "imaginary residue {imag:.3e} exceeds {imag_tol:.3e} x scale {scale:.3e}"
        )));
    }
    let values: Vec<f64> = out.values().iter().map(|v| v.re).collect();
    RealSeq::from_values(out.window(), values)
}

/// Apply a real symmetric multiplier and drop the imaginary residue after
/// asserting it is below `imag_tol` (relative to the output scale).
pub fn apply_multiplier_real(
    f: &RealSeq,
    symbol: &TorusSymbol,
    imag_tol: f64,
) -> Result<RealSeq> {
    let out = apply_multiplier(f, symbol)?;
    let scale = out.sup_norm().max(f.sup_norm()).max(1e-300);
    let imag = out.values().iter().map(|v| v.im.abs()).fold(0.0, f64::max);
    if imag > imag_tol * scale {
        return Err(Error::Tolerance(format!(
            "imaginary residue {imag:.3e} exceeds {imag_tol:.3e} x scale {scale:.3e}"
        )));
    }
    let values: Vec<f64> = out.values().iter().map(|v| v.re).collect();
    RealSeq::from_values(out.window(), values)
}
