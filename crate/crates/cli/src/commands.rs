//! One function per subcommand. Every command resolves its options against
//! the optional JSON config (flags win), runs the experiment, and writes a
//! deterministic CSV or JSON document to the sink.

use crate::output::Sink;
use clap::Args;
use lattice_harmonics::fractional::{self, EvalPath};
use lattice_harmonics::lattice::SequenceJson;
use lattice_harmonics::spectral::{apply_multiplier_to_window, TorusGrid, TorusSymbol};
use lattice_harmonics::{fit, heat, poisson, riesz as riesz_mod, squarefn, verify, RealSeq};
use num_complex::Complex64;
use serde_json::{json, Map, Value};

pub type Config = Map<String, Value>;

pub struct Context {
    pub format: String,
    pub output: Option<String>,
    pub seed: u64,
    pub config: Config,
}

impl Context {
    fn json(&self) -> bool {
        self.format == "json"
    }

    fn f64(&self, key: &str) -> Option<f64> {
        self.config.get(key).and_then(Value::as_f64)
    }

    fn i64(&self, key: &str) -> Option<i64> {
        self.config.get(key).and_then(Value::as_i64)
    }

    fn str(&self, key: &str) -> Option<String> {
        self.config.get(key).and_then(Value::as_str).map(str::to_string)
    }

    fn emit(&self, sink: Sink) -> Result<i32, String> {
        sink.finish().map_err(|e| format!("cannot write output: {e}"))?;
        Ok(0)
    }
}

pub fn load_config(path: &str) -> Result<Config, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read config: {e}"))?;
    serde_json::from_str(&text).map_err(|e| format!("bad config file: {e}"))
}

fn read_sequence(path: &str) -> Result<RealSeq, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}"))?;
    let parsed: SequenceJson =
        serde_json::from_str(&text).map_err(|e| format!("bad sequence file {path}: {e}"))?;
    RealSeq::try_from(parsed).map_err(|e| e.to_string())
}

fn parse_norm(s: &str) -> Result<f64, String> {
    if s == "inf" || s == "infinity" {
        return Ok(f64::INFINITY);
    }
    s.parse::<f64>().map_err(|e| format!("bad norm index '{s}': {e}"))
}

fn seq_rows(sink: &mut Sink, seq: &RealSeq) {
    let dim = seq.dim();
    let cols: Vec<String> = (1..=dim).map(|i| format!("n{i}")).collect();
    sink.line(&format!("{},value", cols.join(",")));
    seq.window().for_each_point(|idx, p| {
        let coords: Vec<String> = p.iter().map(|c| c.to_string()).collect();
        sink.line(&format!("{},{}", coords.join(","), seq.values()[idx]));
    });
}

fn seq_json(seq: &RealSeq) -> Value {
    serde_json::to_value(SequenceJson::from(seq)).expect("sequence serializes")
}

// ---------------------------------------------------------------- heat-kernel

#[derive(Args)]
pub struct HeatKernelArgs {
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    t: Option<f64>,
    /// Window radius; omitted means the automatic tail-bounded radius.
    #[arg(long)]
    radius: Option<i64>,
    #[arg(long)]
    tol: Option<f64>,
}

pub fn heat_kernel(a: HeatKernelArgs, ctx: &Context) -> Result<i32, String> {
    let dim = a.dim.or(ctx.i64("dim").map(|v| v as usize)).unwrap_or(1);
    let t = a.t.or(ctx.f64("t")).ok_or("missing --t")?;
    let tol = a.tol.or(ctx.f64("tol")).unwrap_or(heat::DEFAULT_TAIL_TOL);
    let kernel = match a.radius.or(ctx.i64("radius")) {
        Some(r) => heat::HeatKernel::with_radius(t, dim, r),
        None => heat::HeatKernel::auto(t, dim, tol),
    }
    .map_err(|e| e.to_string())?;
    let mass = kernel.seq().sum();
    let mut sink = Sink::new(ctx.output.as_deref());
    if ctx.json() {
        sink.line(
            &json!({
                "law": "heat-kernel-product",
                "t": t,
                "dim": dim,
                "radius": kernel.radius(),
                "mass": mass,
                "tail_mass_bound": kernel.tail_mass_bound,
                "sequence": seq_json(kernel.seq()),
            })
            .to_string(),
        );
    } else {
        sink.line(&format!(
            "# quantity=heat-kernel-value,scale=probability-mass,law=heat-kernel-product,t={t},dim={dim},radius={},mass={mass},tail_mass_bound={}",
            kernel.radius(),
            kernel.tail_mass_bound
        ));
        seq_rows(&mut sink, kernel.seq());
    }
    ctx.emit(sink)
}

// --------------------------------------------------------------------- evolve

#[derive(Args)]
pub struct EvolveArgs {
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    input: Option<String>,
    /// kernel | spectral | both
    #[arg(long)]
    path: Option<String>,
    #[arg(long)]
    grid_factor: Option<i64>,
}

pub fn evolve(a: EvolveArgs, ctx: &Context) -> Result<i32, String> {
    let input = a.input.or(ctx.str("input")).ok_or("missing --input")?;
    let t = a.t.or(ctx.f64("t")).ok_or("missing --t")?;
    let path = a.path.or(ctx.str("path")).unwrap_or_else(|| "kernel".into());
    let factor = a.grid_factor.or(ctx.i64("grid_factor")).unwrap_or(6).max(2) as usize;
    let f = read_sequence(&input)?;
    if let Some(dim) = a.dim.or(ctx.i64("dim").map(|v| v as usize)) {
        if dim != f.dim() {
            return Err(format!("--dim {dim} does not match the input dimension {}", f.dim()));
        }
    }
    let kernel_out = || heat::evolve(&f, t).map_err(|e| e.to_string());
    let spectral_out = || -> Result<RealSeq, String> {
        let grid = TorusGrid::for_window(f.window(), factor).map_err(|e| e.to_string())?;
        let sym = TorusSymbol::heat(grid, t).map_err(|e| e.to_string())?;
        apply_multiplier_to_window(&f, &sym, f.window(), 1e-8).map_err(|e| e.to_string())
    };
    let mut sink = Sink::new(ctx.output.as_deref());
    match path.as_str() {
        "kernel" => {
            let out = kernel_out()?;
            if ctx.json() {
                sink.line(&json!({"law": "heat-flow", "t": t, "path": "kernel", "sequence": seq_json(&out)}).to_string());
            } else {
                sink.line(&format!("# quantity=evolved-value,scale=data,law=heat-flow,t={t},path=kernel"));
                seq_rows(&mut sink, &out);
            }
        }
        "spectral" => {
            let out = spectral_out()?;
            if ctx.json() {
                sink.line(&json!({"law": "heat-flow", "t": t, "path": "spectral", "sequence": seq_json(&out)}).to_string());
            } else {
                sink.line(&format!("# quantity=evolved-value,scale=data,law=heat-flow,t={t},path=spectral"));
                seq_rows(&mut sink, &out);
            }
        }
        "both" => {
            let k = kernel_out()?;
            let s = spectral_out()?;
            let mut disc = 0.0f64;
            let mut scale = 0.0f64;
            f.window().for_each_point(|_, p| {
                disc = disc.max((k.get(p) - s.get(p)).abs());
                scale = scale.max(k.get(p).abs());
            });
            let rel = if scale > 0.0 { disc / scale } else { 0.0 };
            if ctx.json() {
                sink.line(
                    &json!({
                        "law": "heat-flow",
                        "t": t,
                        "path": "both",
                        "max_discrepancy": rel,
                        "kernel": seq_json(&k),
                        "spectral": seq_json(&s),
                    })
                    .to_string(),
                );
            } else {
                sink.line(&format!(
                    "# quantity=evolved-value,scale=data,law=heat-flow,t={t},path=both,max_discrepancy={rel}"
                ));
                let cols: Vec<String> = (1..=f.dim()).map(|i| format!("n{i}")).collect();
                sink.line(&format!("{},kernel,spectral", cols.join(",")));
                f.window().for_each_point(|_, p| {
                    let coords: Vec<String> = p.iter().map(|c| c.to_string()).collect();
                    sink.line(&format!("{},{},{}", coords.join(","), k.get(p), s.get(p)));
                });
            }
        }
        other => return Err(format!("unknown path '{other}' (kernel | spectral | both)")),
    }
    ctx.emit(sink)
}

// ------------------------------------------------------------------ decay-fit

/// CSV columns: `t,value,dim,r_or_p,q` (q empty for kernel-norm runs),
/// followed by a `# slope=...` line with the fitted exponent.
#[derive(Args)]
pub struct DecayFitArgs {
    #[arg(long)]
    dim: Option<usize>,
    /// Norm index r in [1, inf]; pass "inf" for the supremum norm.
    #[arg(long)]
    norm: Option<String>,
    #[arg(long)]
    tmin: Option<f64>,
    #[arg(long)]
    tmax: Option<f64>,
    #[arg(long)]
    ratio: Option<f64>,
}

pub fn decay_fit(a: DecayFitArgs, ctx: &Context) -> Result<i32, String> {
    let dim = a.dim.or(ctx.i64("dim").map(|v| v as usize)).unwrap_or(1);
    let r = parse_norm(&a.norm.or(ctx.str("norm")).unwrap_or_else(|| "2".into()))?;
    let tmin = a.tmin.or(ctx.f64("tmin")).unwrap_or(16.0);
    let tmax = a.tmax.or(ctx.f64("tmax")).unwrap_or(4096.0);
    let ratio = a.ratio.or(ctx.f64("ratio")).unwrap_or(2.0);
    let grid = fit::geometric_grid(tmin, tmax, ratio).map_err(|e| e.to_string())?;
    let norms: Vec<f64> = grid
        .iter()
        .map(|&t| heat::kernel_norm(t, dim, r))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let slope = fit::loglog_slope(&grid, &norms).map_err(|e| e.to_string())?;
    let mut sink = Sink::new(ctx.output.as_deref());
    if ctx.json() {
        let rows: Vec<Value> =
            grid.iter().zip(&norms).map(|(t, v)| json!({"t": t, "value": v})).collect();
        sink.line(
            &json!({"law": "kernel-norm-decay", "dim": dim, "r": r, "slope": slope, "rows": rows})
                .to_string(),
        );
    } else {
        sink.line("# quantity=kernel-norm,scale=lp-norm,law=kernel-norm-decay");
        sink.line("t,value,dim,r_or_p,q");
        for (t, v) in grid.iter().zip(&norms) {
            sink.line(&format!("{t},{v},{dim},{r},"));
        }
        sink.line(&format!("# slope={slope}"));
    }
    ctx.emit(sink)
}

// --------------------------------------------------------------- mass-theorem

/// CSV columns: `t,value,dim,r_or_p,q`, followed by a `# slope=...` line.
#[derive(Args)]
pub struct MassTheoremArgs {
    #[arg(long)]
    p: Option<String>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    tmin: Option<f64>,
    #[arg(long)]
    tmax: Option<f64>,
    /// Initial data; defaults to delta_0 - delta_1 + 2 delta_2 in dimension 1.
    #[arg(long)]
    input: Option<String>,
}

pub fn mass_theorem(a: MassTheoremArgs, ctx: &Context) -> Result<i32, String> {
    let p = parse_norm(&a.p.or(ctx.str("p")).unwrap_or_else(|| "inf".into()))?;
    let q = a.q.or(ctx.f64("q")).unwrap_or(1.0);
    let tmin = a.tmin.or(ctx.f64("tmin")).unwrap_or(64.0);
    let tmax = a.tmax.or(ctx.f64("tmax")).unwrap_or(8192.0);
    let f = match a.input.or(ctx.str("input")) {
        Some(path) => read_sequence(&path)?,
        None => {
            let mut f = RealSeq::zeros(lattice_harmonics::Window::new(1, 3).map_err(|e| e.to_string())?);
            f.set(&[0], 1.0).map_err(|e| e.to_string())?;
            f.set(&[1], -1.0).map_err(|e| e.to_string())?;
            f.set(&[2], 2.0).map_err(|e| e.to_string())?;
            f
        }
    };
    let grid = fit::geometric_grid(tmin, tmax, 2.0).map_err(|e| e.to_string())?;
    let residuals: Vec<f64> = grid
        .iter()
        .map(|&t| heat::mass_residual(&f, t, p))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let slope = heat::mass_slope(&f, p, q, &grid).map_err(|e| e.to_string())?;
    let mut sink = Sink::new(ctx.output.as_deref());
    if ctx.json() {
        let rows: Vec<Value> =
            grid.iter().zip(&residuals).map(|(t, v)| json!({"t": t, "value": v})).collect();
        sink.line(
            &json!({"law": "mass-drift", "dim": f.dim(), "p": p, "q": q, "slope": slope, "rows": rows})
                .to_string(),
        );
    } else {
        sink.line("# quantity=mass-drift-residual,scale=lp-norm,law=mass-drift");
        sink.line("t,value,dim,r_or_p,q");
        for (t, v) in grid.iter().zip(&residuals) {
            sink.line(&format!("{t},{v},{},{p},{q}", f.dim()));
        }
        sink.line(&format!("# slope={slope}"));
    }
    ctx.emit(sink)
}

// -------------------------------------------------------------------- poisson

#[derive(Args)]
pub struct PoissonArgs {
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    t: Option<f64>,
    /// Kernel window radius; omitted means the 1e-4 mass-capture radius.
    #[arg(long)]
    radius: Option<i64>,
    /// Also report the Laplace-equation residual at this step size.
    #[arg(long)]
    laplace_h: Option<f64>,
}

pub fn poisson(a: PoissonArgs, ctx: &Context) -> Result<i32, String> {
    let dim = a.dim.or(ctx.i64("dim").map(|v| v as usize)).unwrap_or(1);
    let t = a.t.or(ctx.f64("t")).ok_or("missing --t")?;
    let radius = match a.radius.or(ctx.i64("radius")) {
        Some(r) => r,
        None => {
            // mass-capture radius, capped so the default window stays small
            // enough to print (pass --radius explicitly for big studies)
            let cap = match dim {
                1 => 2_000_000,
                2 => 700,
                _ => 60,
            };
            poisson::poisson_mass_radius(t, dim, 1e-4).map_err(|e| e.to_string())?.min(cap)
        }
    };
    let kernel = poisson::poisson_kernel(t, dim, radius).map_err(|e| e.to_string())?;
    let mass = kernel.sum();
    let residual = match a.laplace_h.or(ctx.f64("laplace_h")) {
        Some(h) => {
            let delta = RealSeq::delta(dim, 0).map_err(|e| e.to_string())?;
            Some(
                poisson::laplace_equation_residual(&delta, t, h, radius.min(120))
                    .map_err(|e| e.to_string())?,
            )
        }
        None => None,
    };
    let mut sink = Sink::new(ctx.output.as_deref());
    if ctx.json() {
        sink.line(
            &json!({
                "law": "poisson-subordination",
                "t": t,
                "dim": dim,
                "radius": radius,
                "mass": mass,
                "laplace_residual": residual,
                "sequence": seq_json(&kernel),
            })
            .to_string(),
        );
    } else {
        let res = residual.map(|r| format!(",laplace_residual={r}")).unwrap_or_default();
        sink.line(&format!(
            "# quantity=poisson-kernel-value,scale=probability-mass,law=poisson-subordination,t={t},dim={dim},radius={radius},mass={mass}{res}"
        ));
        seq_rows(&mut sink, &kernel);
    }
    ctx.emit(sink)
}

// ---------------------------------------------------------------- frac-kernel

#[derive(Args)]
pub struct FracKernelArgs {
    #[arg(long)]
    dim: Option<usize>,
    /// Negative power exponent (fractional integral), 0 < 2 sigma < N.
    #[arg(long)]
    sigma: Option<f64>,
    /// Positive power exponent, 0 < s < 1.
    #[arg(long)]
    power_s: Option<f64>,
    #[arg(long)]
    radius: Option<i64>,
}

pub fn frac_kernel(a: FracKernelArgs, ctx: &Context) -> Result<i32, String> {
    let dim = a.dim.or(ctx.i64("dim").map(|v| v as usize)).unwrap_or(1);
    let radius = a.radius.or(ctx.i64("radius")).unwrap_or(16);
    let sigma = a.sigma.or(ctx.f64("sigma"));
    let power_s = a.power_s.or(ctx.f64("power_s"));
    let (kernel, law, extra) = match (sigma, power_s) {
        (Some(sg), None) => {
            let k = fractional::frac_integral_kernel(sg, dim, radius).map_err(|e| e.to_string())?;
            (k, "frac-integral-kernel", json!({"sigma": sg}))
        }
        (None, Some(s)) => {
            let k = fractional::frac_power_kernel(s, dim, radius).map_err(|e| e.to_string())?;
            let total = fractional::frac_power_total_mass(s, dim).map_err(|e| e.to_string())?;
            (k, "frac-power-kernel", json!({"s": s, "total_mass": total}))
        }
        _ => return Err("exactly one of --sigma or --power-s is required".into()),
    };
    let mut sink = Sink::new(ctx.output.as_deref());
    if ctx.json() {
        sink.line(
            &json!({
                "law": law,
                "dim": dim,
                "radius": radius,
                "quad_error": kernel.quad_error,
                "params": extra,
                "sequence": seq_json(kernel.seq()),
            })
            .to_string(),
        );
    } else {
        sink.line(&format!(
            "# quantity=kernel-value,scale=operator-kernel,law={law},dim={dim},radius={radius},quad_error={},params={extra}",
            kernel.quad_error
        ));
        seq_rows(&mut sink, kernel.seq());
    }
    ctx.emit(sink)
}

// ----------------------------------------------------------------- frac-apply

#[derive(Args)]
pub struct FracApplyArgs {
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    power_s: Option<f64>,
    #[arg(long)]
    input: Option<String>,
    #[arg(long)]
    out_radius: Option<i64>,
    /// kernel | spectral
    #[arg(long)]
    path: Option<String>,
    #[arg(long)]
    grid_factor: Option<i64>,
}

pub fn frac_apply(a: FracApplyArgs, ctx: &Context) -> Result<i32, String> {
    let input = a.input.or(ctx.str("input")).ok_or("missing --input")?;
    let f = read_sequence(&input)?;
    let out_radius = a.out_radius.or(ctx.i64("out_radius")).unwrap_or(f.radius());
    let path = match a.path.or(ctx.str("path")).unwrap_or_else(|| "kernel".into()).as_str() {
        "kernel" => EvalPath::Kernel,
        "spectral" => EvalPath::Spectral {
            grid_factor: a.grid_factor.or(ctx.i64("grid_factor")).unwrap_or(8).max(2) as usize,
        },
        other => return Err(format!("unknown path '{other}' (kernel | spectral)")),
    };
    let sigma = a.sigma.or(ctx.f64("sigma"));
    let power_s = a.power_s.or(ctx.f64("power_s"));
    let (out, law) = match (sigma, power_s) {
        (Some(sg), None) => (
            fractional::apply_frac_integral(&f, sg, out_radius, path).map_err(|e| e.to_string())?,
            "frac-integral-apply",
        ),
        (None, Some(s)) => (
            fractional::apply_frac_power(&f, s, out_radius, path).map_err(|e| e.to_string())?,
            "frac-power-apply",
        ),
        _ => return Err("exactly one of --sigma or --power-s is required".into()),
    };
    let mut sink = Sink::new(ctx.output.as_deref());
    if ctx.json() {
        sink.line(&json!({"law": law, "sequence": seq_json(&out)}).to_string());
    } else {
        sink.line(&format!("# quantity=transformed-value,scale=data,law={law}"));
        seq_rows(&mut sink, &out);
    }
    ctx.emit(sink)
}

// ---------------------------------------------------------------------- riesz

#[derive(Args)]
pub struct RieszArgs {
    #[arg(long)]
    dim: Option<usize>,
    /// Coordinate axis, 1-based.
    #[arg(long)]
    axis: Option<usize>,
    #[arg(long)]
    radius: Option<i64>,
    /// When given, apply the transform to this sequence instead of printing
    /// kernel values.
    #[arg(long)]
    input: Option<String>,
    #[arg(long)]
    out_radius: Option<i64>,
}

pub fn riesz(a: RieszArgs, ctx: &Context) -> Result<i32, String> {
    let axis1 = a.axis.or(ctx.i64("axis").map(|v| v as usize)).unwrap_or(1);
    if axis1 == 0 {
        return Err("--axis is 1-based".into());
    }
    let axis = axis1 - 1;
    let mut sink = Sink::new(ctx.output.as_deref());
    match a.input.or(ctx.str("input")) {
        Some(path) => {
            let f = read_sequence(&path)?;
            let out_radius = a.out_radius.or(ctx.i64("out_radius")).unwrap_or(f.radius());
            let out = riesz_mod::apply_riesz(&f, axis, out_radius, EvalPath::Kernel)
                .map_err(|e| e.to_string())?;
            if ctx.json() {
                sink.line(&json!({"law": "riesz-transform", "axis": axis1, "sequence": seq_json(&out)}).to_string());
            } else {
                sink.line(&format!("# quantity=transformed-value,scale=data,law=riesz-transform,axis={axis1}"));
                seq_rows(&mut sink, &out);
            }
        }
        None => {
            let dim = a.dim.or(ctx.i64("dim").map(|v| v as usize)).unwrap_or(2);
            let radius = a.radius.or(ctx.i64("radius")).unwrap_or(12);
            let kernel = riesz_mod::riesz_kernel(axis, dim, radius).map_err(|e| e.to_string())?;
            if ctx.json() {
                sink.line(
                    &json!({
                        "law": "riesz-kernel",
                        "axis": axis1,
                        "dim": dim,
                        "quad_error": kernel.quad_error,
                        "sequence": seq_json(kernel.seq()),
                    })
                    .to_string(),
                );
            } else {
                sink.line(&format!(
                    "# quantity=kernel-value,scale=operator-kernel,law=riesz-kernel,axis={axis1},dim={dim},quad_error={}",
                    kernel.quad_error
                ));
                seq_rows(&mut sink, kernel.seq());
            }
        }
    }
    ctx.emit(sink)
}

// -------------------------------------------------------------------- hilbert

#[derive(Args)]
pub struct HilbertArgs {
    #[arg(long)]
    input: Option<String>,
    #[arg(long)]
    out_radius: Option<i64>,
}

pub fn hilbert(a: HilbertArgs, ctx: &Context) -> Result<i32, String> {
    let input = a.input.or(ctx.str("input")).ok_or("missing --input")?;
    let f = read_sequence(&input)?;
    let out_radius = a.out_radius.or(ctx.i64("out_radius")).unwrap_or(f.radius() + 8);
    let out = riesz_mod::hilbert_apply(&f, out_radius).map_err(|e| e.to_string())?;
    let mut sink = Sink::new(ctx.output.as_deref());
    if ctx.json() {
        sink.line(&json!({"law": "hilbert-transform", "sequence": seq_json(&out)}).to_string());
    } else {
        sink.line("# quantity=transformed-value,scale=data,law=hilbert-transform");
        seq_rows(&mut sink, &out);
    }
    ctx.emit(sink)
}

// ------------------------------------------------------------------------- gk

#[derive(Args)]
pub struct GkArgs {
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    input: Option<String>,
    /// Use the Poisson-semigroup square function.
    #[arg(long)]
    poisson: bool,
    #[arg(long)]
    tmin: Option<f64>,
    #[arg(long)]
    tmax: Option<f64>,
    #[arg(long)]
    ppd: Option<i64>,
}

pub fn gk(a: GkArgs, ctx: &Context) -> Result<i32, String> {
    let k = a.k.or(ctx.i64("k").map(|v| v as usize)).unwrap_or(1);
    let input = a.input.or(ctx.str("input")).ok_or("missing --input")?;
    let f = read_sequence(&input)?.mean_zeroed();
    let grid = squarefn::TimeGridQuadrature::new(
        a.tmin.or(ctx.f64("tmin")).unwrap_or(1e-4),
        a.tmax.or(ctx.f64("tmax")).unwrap_or(1e4),
        a.ppd.or(ctx.i64("ppd")).unwrap_or(32).max(2) as usize,
    )
    .map_err(|e| e.to_string())?;
    let drive = if a.poisson { "poisson" } else { "heat" };
    let ratio = if a.poisson {
        squarefn::gk_poisson_l2_ratio(&f, k, &grid)
    } else {
        squarefn::gk_l2_ratio(&f, k, &grid)
    }
    .map_err(|e| e.to_string())?;
    let expected = squarefn::gk_identity_constant(k);
    let mut sink = Sink::new(ctx.output.as_deref());
    if ctx.json() {
        sink.line(
            &json!({
                "law": "square-function-l2-identity",
                "k": k,
                "drive": drive,
                "ratio": ratio,
                "expected": expected,
                "abs_deviation": (ratio - expected).abs(),
            })
            .to_string(),
        );
    } else {
        sink.line("# quantity=l2-ratio,scale=dimensionless,law=square-function-l2-identity");
        sink.line("k,drive,ratio,expected,abs_deviation");
        sink.line(&format!("{k},{drive},{ratio},{expected},{}", (ratio - expected).abs()));
    }
    ctx.emit(sink)
}

// ----------------------------------------------------------------- multiplier

#[derive(Args)]
pub struct MultiplierArgs {
    /// Imaginary-power exponent gamma; the density is
    /// t^{-i gamma}/Gamma(1 - i gamma).
    #[arg(long)]
    gamma: Option<f64>,
    /// Canned density: "one" gives the identity multiplier.
    #[arg(long)]
    density: Option<String>,
    #[arg(long)]
    input: Option<String>,
    #[arg(long)]
    grid_factor: Option<i64>,
}

pub fn multiplier(a: MultiplierArgs, ctx: &Context) -> Result<i32, String> {
    let input = a.input.or(ctx.str("input")).ok_or("missing --input")?;
    let f = read_sequence(&input)?.mean_zeroed();
    let factor = a.grid_factor.or(ctx.i64("grid_factor")).unwrap_or(4).max(2) as usize;
    let gamma = a.gamma.or(ctx.f64("gamma"));
    let density = a.density.or(ctx.str("density"));
    let (out, law) = match (gamma, density.as_deref()) {
        (Some(g), None) => (
            squarefn::imaginary_power_apply(&f, g, factor).map_err(|e| e.to_string())?,
            "imaginary-power",
        ),
        (None, Some("one")) => (
            squarefn::laplace_multiplier_apply(&f, |_| Complex64::new(1.0, 0.0), 1.0, factor)
                .map_err(|e| e.to_string())?,
            "laplace-multiplier-unit",
        ),
        (None, Some(other)) => return Err(format!("unknown density '{other}' (try \"one\")")),
        _ => return Err("exactly one of --gamma or --density is required".into()),
    };
    let l2_in = lattice_harmonics::lattice::lp_norm(&f, 2.0, None).map_err(|e| e.to_string())?;
    let l2_out = out.values().iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let mut sink = Sink::new(ctx.output.as_deref());
    if ctx.json() {
        let values: Vec<Value> =
            out.values().iter().map(|v| json!({"re": v.re, "im": v.im})).collect();
        sink.line(
            &json!({
                "law": law,
                "dim": out.dim(),
                "radius": out.radius(),
                "l2_in": l2_in,
                "l2_out": l2_out,
                "values": values,
            })
            .to_string(),
        );
    } else {
        sink.line(&format!(
            "# quantity=transformed-value,scale=data,law={law},l2_in={l2_in},l2_out={l2_out}"
        ));
        let cols: Vec<String> = (1..=out.dim()).map(|i| format!("n{i}")).collect();
        sink.line(&format!("{},re,im", cols.join(",")));
        out.window().for_each_point(|idx, p| {
            let coords: Vec<String> = p.iter().map(|c| c.to_string()).collect();
            let v = out.values()[idx];
            sink.line(&format!("{},{},{}", coords.join(","), v.re, v.im));
        });
    }
    ctx.emit(sink)
}

// --------------------------------------------------------------------- verify

#[derive(Args)]
pub struct VerifyArgs {
    /// all | bessel, or a comma-separated id list via --ids.
    #[arg(long)]
    suite: Option<String>,
    #[arg(long)]
    ids: Option<String>,
    #[arg(long)]
    cases: Option<usize>,
    /// Recalibrate the constant-bearing inequalities and write the fixture
    /// file instead of verifying.
    #[arg(long)]
    calibrate: bool,
    /// Fixture file; defaults to the constants built into the library.
    #[arg(long)]
    fixtures: Option<String>,
    #[arg(long)]
    safety: Option<f64>,
}

pub fn verify(a: VerifyArgs, ctx: &Context) -> Result<i32, String> {
    let cases = a.cases.or(ctx.i64("cases").map(|v| v as usize)).unwrap_or(1000);
    let mut sink = Sink::new(ctx.output.as_deref());
    if a.calibrate {
        let safety = a.safety.or(ctx.f64("safety")).unwrap_or(1.2);
        let fixtures =
            verify::calibrate_all(cases, safety, ctx.seed).map_err(|e| e.to_string())?;
        let path = a.fixtures.or(ctx.str("fixtures")).ok_or("--calibrate needs --fixtures PATH")?;
        std::fs::write(&path, fixtures.to_json()).map_err(|e| format!("cannot write {path}: {e}"))?;
        sink.line(&format!("calibrated {} constants -> {path}", fixtures.constants.len()));
        return ctx.emit(sink);
    }
    let fixtures = match a.fixtures.or(ctx.str("fixtures")) {
        Some(path) => {
            let text =
                std::fs::read_to_string(&path).map_err(|e| format!("cannot read {path}: {e}"))?;
            verify::Fixtures::load(&text).map_err(|e| e.to_string())?
        }
        None => verify::builtin_fixtures().map_err(|e| e.to_string())?,
    };
    let ids: Vec<String> = match (a.ids.or(ctx.str("ids")), a.suite.or(ctx.str("suite")).as_deref()) {
        (Some(list), _) => list.split(',').map(|s| s.trim().to_string()).collect(),
        (None, Some("bessel")) => verify::bessel_suite_ids(),
        (None, Some("all")) | (None, None) => Vec::new(),
        (None, Some(other)) => return Err(format!("unknown suite '{other}' (all | bessel)")),
    };
    let report =
        verify::run_suite(&ids, cases, ctx.seed, &fixtures).map_err(|e| e.to_string())?;
    let pass = report.all_pass();
    if ctx.json() {
        sink.line(&serde_json::to_string(&report).expect("report serializes"));
    } else {
        sink.line(&report.table());
        sink.line(if pass { "RESULT: pass" } else { "RESULT: FAIL" });
    }
    sink.finish().map_err(|e| format!("cannot write output: {e}"))?;
    Ok(if pass { 0 } else { 3 })
}
