//! Lattice geometry, finitely supported sequences on centered box windows,
//! difference operators, norms, seminorms, and weights.
//!
//! Sequences are identically zero outside their window; every operator
//! documents which output band is contaminated by that truncation. `|n|`
//! always means the l1 length `|n_1| + ... + |n_N|`.

use crate::error::{domain, mismatch, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// A point of `Z^N`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LatticePoint(pub Vec<i64>);

impl LatticePoint {
    pub fn l1_norm(&self) -> i64 {
        l1_norm(&self.0)
    }
}

/// l1 length of a coordinate slice.
pub fn l1_norm(coords: &[i64]) -> i64 {
    coords.iter().map(|c| c.abs()).sum()
}

/// Centered box `{ n : |n_i| <= radius }` in `Z^dim`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub dim: usize,
    pub radius: i64,
}

impl Window {
    pub fn new(dim: usize, radius: i64) -> Result<Self> {
        if dim == 0 {
            return Err(domain("window dimension must be >= 1"));
        }
        if radius < 0 {
            return Err(domain("window radius must be >= 0"));
        }
        let w = Window { dim, radius };
        if w.checked_len().is_none() {
            return Err(domain(format!("window (dim {dim}, radius {radius}) is too large")));
        }
        Ok(w)
    }

    pub fn side(&self) -> usize {
        (2 * self.radius + 1) as usize
    }

    fn checked_len(&self) -> Option<usize> {
        let mut n: usize = 1;
        for _ in 0..self.dim {
            n = n.checked_mul(self.side())?;
        }
        if n > (1usize << 34) {
            None
        } else {
            Some(n)
        }
    }

    pub fn len(&self) -> usize {
        self.checked_len().expect("validated at construction")
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, p: &[i64]) -> bool {
        p.len() == self.dim && p.iter().all(|c| c.abs() <= self.radius)
    }

    /// Row-major linear index of a contained point.
    pub fn index(&self, p: &[i64]) -> Option<usize> {
        if !self.contains(p) {
            return None;
        }
        let side = self.side();
        let mut idx = 0usize;
        for &c in p {
            idx = idx * side + (c + self.radius) as usize;
        }
        Some(idx)
    }

    /// Visit every point as `(linear index, coordinates)` without allocating
    /// per point.
    pub fn for_each_point(&self, mut f: impl FnMut(usize, &[i64])) {
        let mut coords = vec![-self.radius; self.dim];
        let len = self.len();
        for idx in 0..len {
            f(idx, &coords);
            for ax in (0..self.dim).rev() {
                if coords[ax] < self.radius {
                    coords[ax] += 1;
                    break;
                }
                coords[ax] = -self.radius;
            }
        }
    }

    /// Coordinates of a linear index.
    pub fn point_of(&self, mut idx: usize) -> Vec<i64> {
        let side = self.side();
        let mut p = vec![0i64; self.dim];
        for ax in (0..self.dim).rev() {
            p[ax] = (idx % side) as i64 - self.radius;
            idx /= side;
        }
        p
    }
}

/// Scalar types a lattice sequence can hold.
pub trait Scalar: Copy + std::fmt::Debug + PartialEq + 'static {
    const ZERO: Self;
    fn abs(self) -> f64;
    fn add(self, o: Self) -> Self;
    fn sub(self, o: Self) -> Self;
    fn mul(self, o: Self) -> Self;
    fn scale(self, c: f64) -> Self;
    fn is_finite_value(self) -> bool;
}

impl Scalar for f64 {
    const ZERO: Self = 0.0;
    fn abs(self) -> f64 {
        f64::abs(self)
    }
    fn add(self, o: Self) -> Self {
        self + o
    }
    fn sub(self, o: Self) -> Self {
        self - o
    }
    fn mul(self, o: Self) -> Self {
        self * o
    }
    fn scale(self, c: f64) -> Self {
        self * c
    }
    fn is_finite_value(self) -> bool {
        self.is_finite()
    }
}

impl Scalar for Complex64 {
    const ZERO: Self = Complex64::new(0.0, 0.0);
    fn abs(self) -> f64 {
        self.norm()
    }
    fn add(self, o: Self) -> Self {
        self + o
    }
    fn sub(self, o: Self) -> Self {
        self - o
    }
    fn mul(self, o: Self) -> Self {
        self * o
    }
    fn scale(self, c: f64) -> Self {
        self * c
    }
    fn is_finite_value(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// Finitely supported sequence stored densely on a box window; implicitly
/// zero outside it.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeSeq<T: Scalar> {
    window: Window,
    values: Vec<T>,
}

pub type RealSeq = LatticeSeq<f64>;
pub type ComplexSeq = LatticeSeq<Complex64>;

impl<T: Scalar> LatticeSeq<T> {
    pub fn zeros(window: Window) -> Self {
        LatticeSeq { window, values: vec![T::ZERO; window.len()] }
    }

    /// Kronecker delta at the origin on a window of the given radius.
    pub fn delta(dim: usize, radius: i64) -> Result<Self>
    where
        T: From<f64>,
    {
        let window = Window::new(dim, radius)?;
        let mut s = Self::zeros(window);
        let origin = vec![0i64; dim];
        s.set(&origin, T::from(1.0))?;
        Ok(s)
    }

    pub fn from_fn(window: Window, mut f: impl FnMut(&[i64]) -> T) -> Self {
        let mut values = vec![T::ZERO; window.len()];
        window.for_each_point(|idx, p| values[idx] = f(p));
        LatticeSeq { window, values }
    }

    pub fn from_values(window: Window, values: Vec<T>) -> Result<Self> {
        if values.len() != window.len() {
            return Err(mismatch(format!(
                "window holds {} points but {} values were given",
                window.len(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite_value()) {
            return Err(domain("sequence values must all be finite"));
        }
        Ok(LatticeSeq { window, values })
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn dim(&self) -> usize {
        self.window.dim
    }

    pub fn radius(&self) -> i64 {
        self.window.radius
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Value at a point, zero outside the window.
    pub fn get(&self, p: &[i64]) -> T {
        match self.window.index(p) {
            Some(i) => self.values[i],
            None => T::ZERO,
        }
    }

    pub fn set(&mut self, p: &[i64], v: T) -> Result<()> {
        let i = self
            .window
            .index(p)
            .ok_or_else(|| mismatch(format!("point {p:?} outside window {:?}", self.window)))?;
        self.values[i] = v;
        Ok(())
    }

    pub fn map(&self, mut f: impl FnMut(T) -> T) -> Self {
        LatticeSeq { window: self.window, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn zip_with(&self, other: &Self, mut f: impl FnMut(T, T) -> T) -> Result<Self> {
        if self.window != other.window {
            return Err(mismatch("sequences live on different windows"));
        }
        let values =
            self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Ok(LatticeSeq { window: self.window, values })
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| v.scale(c))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.add(b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.sub(b))
    }

    pub fn sum(&self) -> T {
        self.values.iter().fold(T::ZERO, |acc, &v| acc.add(v))
    }

    /// Copy onto a window of a different radius; values outside the original
    /// window are zero, values outside the new one are dropped.
    pub fn with_radius(&self, radius: i64) -> Result<Self> {
        let window = Window::new(self.dim(), radius)?;
        let mut out = Self::zeros(window);
        let src = self;
        window.for_each_point(|idx, p| {
            out.values[idx] = src.get(p);
        });
        Ok(out)
    }

    /// Largest absolute value.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    /// Maximum absolute difference against another sequence, compared on the
    /// union of supports.
    pub fn sup_distance(&self, other: &Self) -> f64 {
        let r = self.radius().max(other.radius());
        let w = Window { dim: self.dim(), radius: r };
        let mut m = 0.0f64;
        w.for_each_point(|_, p| {
            let d = self.get(p).sub(other.get(p)).abs();
            if d > m {
                m = d;
            }
        });
        m
    }
}

impl RealSeq {
    /// Subtract the window mean (useful for spectral paths that act on
    /// mean-zero data).
    pub fn mean_zeroed(&self) -> Self {
        let mean = self.sum() / self.window.len() as f64;
        self.map(|v| v - mean)
    }
}

/// JSON interchange form of a real sequence: `{dim, radius, values}` with
/// values in row-major order.
#[derive(Debug, Serialize, Deserialize)]
pub struct SequenceJson {
    pub dim: usize,
    pub radius: i64,
    pub values: Vec<f64>,
}

impl From<&RealSeq> for SequenceJson {
    fn from(s: &RealSeq) -> Self {
        SequenceJson { dim: s.dim(), radius: s.radius(), values: s.values.clone() }
    }
}

impl TryFrom<SequenceJson> for RealSeq {
    type Error = crate::error::Error;
    fn try_from(j: SequenceJson) -> Result<Self> {
        let window = Window::new(j.dim, j.radius)?;
        RealSeq::from_values(window, j.values)
    }
}

/// Forward difference `f(n + e_axis) - f(n)` with zero extension; the output
/// window equals the input window, so the top face along `axis` is the
/// truncation band.
pub fn forward_diff<T: Scalar>(f: &LatticeSeq<T>, axis: usize) -> Result<LatticeSeq<T>> {
    shifted_diff(f, axis, true)
}

/// Backward difference `f(n) - f(n - e_axis)`.
pub fn backward_diff<T: Scalar>(f: &LatticeSeq<T>, axis: usize) -> Result<LatticeSeq<T>> {
    shifted_diff(f, axis, false)
}

fn shifted_diff<T: Scalar>(f: &LatticeSeq<T>, axis: usize, forward: bool) -> Result<LatticeSeq<T>> {
    if axis >= f.dim() {
        return Err(domain(format!("axis {axis} out of range for dimension {}", f.dim())));
    }
    let mut out = LatticeSeq::zeros(f.window());
    let mut shifted = vec![0i64; f.dim()];
    f.window().for_each_point(|idx, p| {
        shifted.copy_from_slice(p);
        if forward {
            shifted[axis] += 1;
            out.values[idx] = f.get(&shifted).sub(f.values[idx]);
        } else {
            shifted[axis] -= 1;
            out.values[idx] = f.values[idx].sub(f.get(&shifted));
        }
    });
    Ok(out)
}

/// Discrete Laplacian `sum_i f(n+e_i) - 2 f(n) + f(n-e_i)` with zero
/// extension; the whole boundary shell is the truncation band.
pub fn laplacian<T: Scalar>(f: &LatticeSeq<T>) -> LatticeSeq<T> {
    let mut out = LatticeSeq::zeros(f.window());
    let dim = f.dim();
    let mut q = vec![0i64; dim];
    f.window().for_each_point(|idx, p| {
        let mut acc = f.values[idx].scale(-2.0 * dim as f64);
        for ax in 0..dim {
            q.copy_from_slice(p);
            q[ax] += 1;
            acc = acc.add(f.get(&q));
            q[ax] -= 2;
            acc = acc.add(f.get(&q));
        }
        out.values[idx] = acc;
    });
    out
}

/// Exact finite convolution; output radius is the sum of the input radii.
pub fn convolve<T: Scalar>(f: &LatticeSeq<T>, g: &LatticeSeq<T>) -> Result<LatticeSeq<T>> {
    if f.dim() != g.dim() {
        return Err(mismatch(format!(
            "convolution needs equal dimensions, got {} and {}",
            f.dim(),
            g.dim()
        )));
    }
    // Sum over the sparser factor's support.
    let (big, small) = if f.window().len() >= g.window().len() { (f, g) } else { (g, f) };
    let mut support: Vec<(Vec<i64>, T)> = Vec::new();
    small.window().for_each_point(|idx, p| {
        let v = small.values[idx];
        if v != T::ZERO {
            support.push((p.to_vec(), v));
        }
    });
    let out_window = Window::new(f.dim(), f.radius() + g.radius())?;
    let mut out = LatticeSeq::zeros(out_window);
    let mut shifted = vec![0i64; f.dim()];
    out_window.for_each_point(|idx, n| {
        let mut acc = T::ZERO;
        for (k, v) in &support {
            for (s, (c, o)) in shifted.iter_mut().zip(n.iter().zip(k.iter())) {
                *s = c - o;
            }
            acc = acc.add(big.get(&shifted).mul(*v));
        }
        out.values[idx] = acc;
    });
    Ok(out)
}

/// Positive weight sequence on a window.
#[derive(Debug, Clone)]
pub struct Weight {
    window: Window,
    values: Vec<f64>,
}

impl Weight {
    pub fn from_fn(window: Window, mut f: impl FnMut(&[i64]) -> f64) -> Result<Self> {
        let mut values = vec![0.0; window.len()];
        let mut bad = false;
        window.for_each_point(|idx, p| {
            let v = f(p);
            if !(v > 0.0) || !v.is_finite() {
                bad = true;
            }
            values[idx] = v;
        });
        if bad {
            return Err(domain("weights must be strictly positive and finite"));
        }
        Ok(Weight { window, values })
    }

    pub fn uniform(window: Window) -> Self {
        Weight { window, values: vec![1.0; window.len()] }
    }

    /// Radial weight `(1 + |n|)^exponent` with `|n|` the l1 length.
    pub fn radial_power(window: Window, exponent: f64) -> Self {
        Weight::from_fn(window, |p| (1.0 + l1_norm(p) as f64).powf(exponent))
            .expect("radial powers are positive")
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn get(&self, p: &[i64]) -> Result<f64> {
        self.window
            .index(p)
            .map(|i| self.values[i])
            .ok_or_else(|| mismatch(format!("weight not defined at {p:?}")))
    }
}

/// Weighted l^p norm. `p = infinity` returns `sup |f|` with the weight
/// ignored, following the unweighted supremum convention for that endpoint.
pub fn lp_norm<T: Scalar>(f: &LatticeSeq<T>, p: f64, weight: Option<&Weight>) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(domain(format!("l^p norm requires p >= 1, got {p}")));
    }
    if p.is_infinite() {
        return Ok(f.sup_norm());
    }
    if let Some(w) = weight {
        if w.window().dim != f.dim() || w.window().radius < f.radius() {
            return Err(mismatch("weight window must cover the sequence window"));
        }
    }
    let mut acc = 0.0f64;
    let mut err = None;
    f.window().for_each_point(|idx, pt| {
        let a = f.values()[idx].abs();
        if a == 0.0 {
            return;
        }
        let wv = match weight {
            Some(w) => match w.get(pt) {
                Ok(v) => v,
                Err(e) => {
                    err = Some(e);
                    return;
                }
            },
            None => 1.0,
        };
        acc += a.powf(p) * wv;
    });
    if let Some(e) = err {
        return Err(e);
    }
    Ok(acc.powf(1.0 / p))
}

/// Weighted weak-l1 quasinorm `sup_{lambda>0} lambda sum_{|f|>lambda} w`,
/// evaluated exactly over the finite set of realized levels.
pub fn weak_l1_norm<T: Scalar>(f: &LatticeSeq<T>, w: &Weight) -> Result<f64> {
    if w.window().dim != f.dim() || w.window().radius < f.radius() {
        return Err(mismatch("weight window must cover the sequence window"));
    }
    let mut levels: Vec<(f64, f64)> = Vec::new();
    let mut err = None;
    f.window().for_each_point(|idx, pt| {
        let a = f.values()[idx].abs();
        if a == 0.0 {
            return;
        }
        match w.get(pt) {
            Ok(wv) => levels.push((a, wv)),
            Err(e) => err = Some(e),
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    if levels.is_empty() {
        return Ok(0.0);
    }
    // sup over lambda is attained as lambda -> v^- at a realized value v,
    // where the level set becomes {|f| >= v}.
    levels.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let mut best = 0.0f64;
    let mut cum_w = 0.0f64;
    let mut i = 0;
    while i < levels.len() {
        let v = levels[i].0;
        while i < levels.len() && levels[i].0 == v {
            cum_w += levels[i].1;
            i += 1;
        }
        best = best.max(v * cum_w);
    }
    Ok(best)
}

/// Order-`k` Hoelder seminorm with exponent `alpha`.
///
/// For `k = 0` this is the max over point pairs of `|f(n)-f(m)| / |n-m|^alpha`;
/// for `k >= 1` the forward differences are taken first and the pairs are
/// restricted to the interior untouched by zero extension.
pub fn holder_seminorm(f: &RealSeq, alpha: f64, k: usize) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(domain(format!("Hoelder exponent must lie in (0, 1], got {alpha}")));
    }
    if k == 0 {
        return Ok(pair_seminorm(f, alpha, f.radius()));
    }
    if f.radius() < k as i64 + 1 {
        return Err(domain("window too small for the requested difference order"));
    }
    let mut total = 0.0;
    for multi in multi_indices(f.dim(), k) {
        let mut g = f.clone();
        for (axis, &m) in multi.iter().enumerate() {
            for _ in 0..m {
                g = forward_diff(&g, axis)?;
            }
        }
        total += pair_seminorm(&g, alpha, f.radius() - k as i64 - 1);
    }
    Ok(total)
}

fn pair_seminorm(f: &RealSeq, alpha: f64, interior_radius: i64) -> f64 {
    if interior_radius < 0 {
        return 0.0;
    }
    let w = Window { dim: f.dim(), radius: interior_radius };
    let mut pts = Vec::with_capacity(w.len());
    w.for_each_point(|_, p| pts.push(p.to_vec()));
    let mut best = 0.0f64;
    for i in 0..pts.len() {
        let fi = f.get(&pts[i]);
        for j in (i + 1)..pts.len() {
            let d: i64 = pts[i].iter().zip(&pts[j]).map(|(a, b)| (a - b).abs()).sum();
            let ratio = (fi - f.get(&pts[j])).abs() / (d as f64).powf(alpha);
            if ratio > best {
                best = ratio;
            }
        }
    }
    best
}

/// All multi-indices of length `dim` summing to `k`.
pub(crate) fn multi_indices(dim: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(dim: usize, k: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if dim == 1 {
            prefix.push(k);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for j in 0..=k {
            prefix.push(j);
            rec(dim - 1, k - j, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(dim, k, &mut Vec::new(), &mut out);
    out
}

/// Muckenhoupt-type constant over axis-aligned cubes of side up to
/// `max_side` inside the weight's window:
/// `max_Q (avg_Q w) (avg_Q w^{-1/(p-1)})^{p-1}`.
pub fn ap_constant(w: &Weight, p: f64, max_side: usize) -> Result<f64> {
    if !(p > 1.0) {
        return Err(domain(format!("Muckenhoupt constant requires p > 1, got {p}")));
    }
    if max_side == 0 {
        return Err(domain("cube side must be at least 1"));
    }
    let window = w.window();
    let dim = window.dim;
    let side = window.side();
    let dual = Weight::from_fn(window, |pt| {
        w.get(pt).expect("same window").powf(-1.0 / (p - 1.0))
    })?;
    let pw = prefix_sums(&w.values, dim, side);
    let pd = prefix_sums(&dual.values, dim, side);
    let mut best = 0.0f64;
    for s in 1..=max_side.min(side) {
        let positions = side - s + 1;
        let count = (s as f64).powi(dim as i32);
        let mut corner = vec![0usize; dim];
        loop {
            let sw = box_sum(&pw, dim, side, &corner, s);
            let sd = box_sum(&pd, dim, side, &corner, s);
            let val = (sw / count) * (sd / count).powf(p - 1.0);
            if val > best {
                best = val;
            }
            // advance corner
            let mut ax = dim;
            for a in (0..dim).rev() {
                if corner[a] + 1 < positions {
                    corner[a] += 1;
                    ax = a;
                    break;
                }
                corner[a] = 0;
            }
            if ax == dim {
                break;
            }
        }
    }
    Ok(best)
}

/// Inclusive prefix sums along every axis of a row-major dense array.
fn prefix_sums(values: &[f64], dim: usize, side: usize) -> Vec<f64> {
    let mut p = values.to_vec();
    let total = p.len();
    for ax in 0..dim {
        // stride of this axis in row-major order
        let stride = side.pow((dim - 1 - ax) as u32);
        for idx in 0..total {
            let coord = (idx / stride) % side;
            if coord > 0 {
                p[idx] += p[idx - stride];
            }
        }
    }
    p
}

/// Sum of the cube `[corner, corner+s)` per axis via inclusion-exclusion.
fn box_sum(prefix: &[f64], dim: usize, side: usize, corner: &[usize], s: usize) -> f64 {
    let mut acc = 0.0;
    for mask in 0..(1usize << dim) {
        let mut idx = 0usize;
        let mut sign = 1.0;
        let mut skip = false;
        for ax in 0..dim {
            let hi = corner[ax] + s - 1;
            let coord = if mask & (1 << ax) == 0 {
                hi
            } else {
                sign = -sign;
                if corner[ax] == 0 {
                    skip = true;
                    break;
                }
                corner[ax] - 1
            };
            idx = idx * side + coord;
        }
        if !skip {
            acc += sign * prefix[idx];
        }
    }
    acc
}
