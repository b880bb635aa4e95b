//! Gaussian quadrature rules used by the kernel builders: Gauss-Legendre on
//! finite panels, generalized Gauss-Laguerre on `[0, inf)`, and a composite
//! panel rule on a logarithmic time axis for the semigroup integrals.

use crate::error::{domain, Result};
use statrs::function::gamma::ln_gamma;

/// Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes and weights by Newton iteration on the Legendre recurrence.
    pub fn new(n: usize) -> Self {
        assert!(n >= 2);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Chebyshev-based initial guess.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, d) = legendre_with_deriv(n, x);
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let (_, dp) = legendre_with_deriv(n, x);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    /// Integrate `f` over `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let c = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + c * x);
        }
        c * acc
    }
}

fn legendre_with_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Generalized Gauss-Laguerre rule for `int_0^inf u^alpha e^{-u} f(u) du`.
///
/// Weights are returned normalized by the zeroth moment Gamma(alpha+1), so
/// they sum to 1 and stay finite for any admissible `alpha`; callers scale
/// back when the raw moment is wanted.
#[derive(Debug, Clone)]
pub struct GaussLaguerre {
    pub alpha: f64,
    pub nodes: Vec<f64>,
    /// Weights divided by Gamma(alpha+1); they sum to 1.
    pub normalized_weights: Vec<f64>,
}

impl GaussLaguerre {
    pub fn new(n: usize, alpha: f64) -> Result<Self> {
        if alpha <= -1.0 {
            return Err(domain(format!("Laguerre exponent must exceed -1, got {alpha}")));
        }
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n {
            // Stroud-Secrest style initial guesses, then march from the
            // previous root.
            let mut x = if i == 0 {
                (1.0 + alpha) * (3.0 + 0.92 * alpha) / (1.0 + 2.4 * nf + 1.8 * alpha)
            } else if i == 1 {
                nodes[0] + (15.0 + 6.25 * alpha) / (1.0 + 0.9 * alpha + 2.5 * nf)
            } else {
                let ai = i as f64 - 1.0;
                let ratio = (1.0 + 2.55 * ai) / (1.9 * ai)
                    + 1.26 * ai * alpha / (1.0 + 3.5 * ai);
                nodes[i - 1] + ratio * (nodes[i - 1] - nodes[i - 2]) / (1.0 + 0.3 * alpha)
            };
            for _ in 0..200 {
                let (p, d, _) = laguerre_orthonormal(n, alpha, x);
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-14 * x.max(1.0) {
                    break;
                }
            }
            let (_, _, christoffel) = laguerre_orthonormal(n, alpha, x);
            nodes[i] = x;
            weights[i] = 1.0 / christoffel;
        }
        Ok(GaussLaguerre { alpha, nodes, normalized_weights: weights })
    }

    /// ln Gamma(alpha+1), the log of the zeroth moment.
    pub fn ln_moment(&self) -> f64 {
        ln_gamma(self.alpha + 1.0)
    }
}

/// Orthonormal Laguerre recurrence scaled so that p_0 = 1; returns
/// (p_n, p_n', sum_{k<n} p_k^2) at `x`. The last value is the reciprocal of
/// the normalized Christoffel weight.
fn laguerre_orthonormal(n: usize, alpha: f64, x: f64) -> (f64, f64, f64) {
    // Three-term recurrence for the monic-orthonormal family:
    //   b_{k+1} p_{k+1} = (x - a_k) p_k - b_k p_{k-1},
    // with a_k = 2k + alpha + 1, b_k = sqrt(k (k + alpha)).
    let mut pkm1 = 0.0f64;
    let mut pk = 1.0f64;
    let mut sum_sq = 0.0f64;
    let mut dkm1 = 0.0f64;
    let mut dk = 0.0f64;
    for k in 0..n {
        sum_sq += pk * pk;
        let kf = k as f64;
        let a = 2.0 * kf + alpha + 1.0;
        let b = (kf * (kf + alpha)).sqrt();
        let bnext = ((kf + 1.0) * (kf + 1.0 + alpha)).sqrt();
        let pnext = ((x - a) * pk - b * pkm1) / bnext;
        let dnext = ((x - a) * dk + pk - b * dkm1) / bnext;
        pkm1 = pk;
        pk = pnext;
        dkm1 = dk;
        dk = dnext;
    }
    (pk, dk, sum_sq)
}

/// Quadrature nodes for `int f(t) dt` after the substitution `t = e^tau`:
/// composite Gauss-Legendre panels on `tau in [tau_lo, tau_hi]`.
///
/// Returns `(t_j, w_j)` with `sum_j w_j f(t_j) ~= int_{e^tau_lo}^{e^tau_hi}
/// f(t) dt` (the Jacobian `t` is folded into the weights).
pub fn log_time_nodes(
    tau_lo: f64,
    tau_hi: f64,
    panel_width: f64,
    rule: &GaussLegendre,
) -> Vec<(f64, f64)> {
    assert!(tau_hi > tau_lo);
    let n_panels = ((tau_hi - tau_lo) / panel_width).ceil().max(1.0) as usize;
    let step = (tau_hi - tau_lo) / n_panels as f64;
    let mut out = Vec::with_capacity(n_panels * rule.nodes.len());
    for p in 0..n_panels {
        let a = tau_lo + p as f64 * step;
        let c = 0.5 * step;
        let mid = a + c;
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            let tau = mid + c * x;
            let t = tau.exp();
            out.push((t, c * w * t));
        }
    }
    out
}
