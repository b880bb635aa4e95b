//! `lharm` - compute and verify the operator family of the discrete
//! Laplacian on `Z^N`: heat/Poisson semigroups, fractional powers, Riesz
//! transforms, square functions, and the inequality verification suite.
//!
//! Exit codes: 0 success, 2 domain/usage error, 3 verification failure.

mod commands;
mod output;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "lharm", version, about, long_about = None)]
struct Cli {
    /// Output format for data commands.
    #[arg(long, global = true, default_value = "csv", value_parser = ["csv", "json"])]
    format: String,
    /// Write output to this file instead of stdout. Relative paths resolve
    /// against $LHARM_OUT when that variable is set.
    #[arg(long, global = true)]
    output: Option<String>,
    /// Seed for every randomized grid; identical config + seed reproduces
    /// byte-identical output.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Upper bound on worker threads (the implementation is sequential and
    /// deterministic; results never depend on this value).
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    /// JSON file of default option values (long option names as keys);
    /// explicit command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Heat kernel values on a window, with the tail-mass certificate.
    HeatKernel(commands::HeatKernelArgs),
    /// Apply the heat semigroup to a sequence (kernel, spectral, or both).
    Evolve(commands::EvolveArgs),
    /// Fit the time-decay slope of a kernel norm.
    DecayFit(commands::DecayFitArgs),
    /// Mass-drift residual of the heat flow and its decay slope.
    MassTheorem(commands::MassTheoremArgs),
    /// Poisson kernel values, normalization, and Laplace-equation residual.
    Poisson(commands::PoissonArgs),
    /// Fractional kernel values (negative or positive power).
    FracKernel(commands::FracKernelArgs),
    /// Apply a fractional power to a sequence.
    FracApply(commands::FracApplyArgs),
    /// Riesz kernel values or transform application.
    Riesz(commands::RieszArgs),
    /// One-dimensional discrete Hilbert transform.
    Hilbert(commands::HilbertArgs),
    /// Square-function L2 identity ratios.
    Gk(commands::GkArgs),
    /// Laplace-type / imaginary-power multiplier application.
    Multiplier(commands::MultiplierArgs),
    /// Calibrate or verify the inequality suite.
    Verify(commands::VerifyArgs),
}

fn main() {
    let cli = Cli::parse();
    let code = run(cli);
    std::process::exit(code);
}

fn run(cli: Cli) -> i32 {
    let config = match cli.config.as_deref().map(commands::load_config).transpose() {
        Ok(c) => c.unwrap_or_default(),
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let ctx = commands::Context {
        format: cli.format,
        output: cli.output,
        seed: cli.seed,
        config,
    };
    let result = match cli.command {
        Command::HeatKernel(a) => commands::heat_kernel(a, &ctx),
        Command::Evolve(a) => commands::evolve(a, &ctx),
        Command::DecayFit(a) => commands::decay_fit(a, &ctx),
        Command::MassTheorem(a) => commands::mass_theorem(a, &ctx),
        Command::Poisson(a) => commands::poisson(a, &ctx),
        Command::FracKernel(a) => commands::frac_kernel(a, &ctx),
        Command::FracApply(a) => commands::frac_apply(a, &ctx),
        Command::Riesz(a) => commands::riesz(a, &ctx),
        Command::Hilbert(a) => commands::hilbert(a, &ctx),
        Command::Gk(a) => commands::gk(a, &ctx),
        Command::Multiplier(a) => commands::multiplier(a, &ctx),
        Command::Verify(a) => commands::verify(a, &ctx),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
