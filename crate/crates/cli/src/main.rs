use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use stripstab::config::{config_hash, ProfileConfig, RunConfig};
use stripstab::output::ArtifactWriter;
use stripstab::{amplitude, greenfn, hopf, neutral, orrsomm, pipeline};
use stripstab::{Branch, Complex64, MeanFlowGauge, NormalForm, ShearProfile, SpectralDiscretization};

/// Orr-Sommerfeld stability and Hopf bifurcation of shear flows in a strip.
#[derive(Parser)]
#[command(name = "stripstab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Filtered eigenvalues of the pencil at one (alpha, nu).
    Spectrum(SpectrumArgs),
    /// Neutral curve alpha_plus(nu) on a log-spaced grid, with its power-law fit.
    Neutral(NeutralArgs),
    /// Sampled audit of the spectral assumption at one viscosity.
    AuditH(AuditArgs),
    /// Resolvent decay along the imaginary axis.
    GreenCheck(GreenArgs),
    /// Normal-form coefficients c1, c3 at the upper neutral point.
    Hopf(HopfArgs),
    /// Integrate the amplitude equation.
    Simulate(SimulateArgs),
    /// Sample the bifurcated travelling roll.
    Roll(RollArgs),
    /// Full run from a TOML config.
    Pipeline(ConfigArgs),
    /// Independent pipelines over `sweep.nu` from a TOML config.
    Sweep(ConfigArgs),
}

#[derive(Args, Serialize, Clone)]
struct Common {
    /// `poiseuille`, `tanh:<beta>`, or a CSV file with columns y, U.
    #[arg(long, default_value = "poiseuille")]
    profile: String,
    /// Polynomial degree of the collocation grid.
    #[arg(long, default_value_t = 128)]
    n: usize,
    /// Output directory.
    #[arg(long, default_value = "stripstab-out")]
    out: PathBuf,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

impl Common {
    fn profile(&self) -> Result<ShearProfile> {
        let cfg = match self.profile.as_str() {
            "poiseuille" => ProfileConfig::Poiseuille,
            s if s.starts_with("tanh:") => ProfileConfig::TanhSymmetric {
                beta: s[5..].parse().with_context(|| format!("bad tanh parameter in `{s}`"))?,
            },
            path => ProfileConfig::Tabulated { path: path.into() },
        };
        Ok(cfg.load()?)
    }

    fn disc(&self) -> Result<SpectralDiscretization> {
        Ok(SpectralDiscretization::new(self.n)?)
    }

    fn writer<T: Serialize>(&self, params: &T) -> Result<ArtifactWriter> {
        Ok(ArtifactWriter::new(&self.out, config_hash(params))?)
    }
}

#[derive(Args, Serialize)]
struct SpectrumArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    nu: f64,
    /// Also write the leading eigenfunction.
    #[arg(long)]
    eigenfunction: bool,
}

#[derive(Args, Serialize)]
struct NeutralArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 2e-5)]
    nu_min: f64,
    #[arg(long, default_value_t = 8e-5)]
    nu_max: f64,
    #[arg(long, default_value_t = 8)]
    points: usize,
    /// `upper` or `lower`.
    #[arg(long, default_value = "upper")]
    branch: String,
}

#[derive(Args, Serialize)]
struct AuditArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 8e-5)]
    nu: f64,
}

#[derive(Args, Serialize)]
struct GreenArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 2.0)]
    alpha: f64,
    #[arg(long, default_value_t = 1e-2)]
    nu: f64,
    #[arg(long, default_value_t = 1e2)]
    lambda_min: f64,
    #[arg(long, default_value_t = 1e4)]
    lambda_max: f64,
    #[arg(long, default_value_t = 13)]
    samples: usize,
}

#[derive(Args, Serialize, Clone)]
struct HopfArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 8e-5)]
    nu: f64,
    /// `pressure` or `flux`.
    #[arg(long, default_value = "pressure")]
    gauge: String,
}

#[derive(Args, Serialize)]
struct SimulateArgs {
    #[command(flatten)]
    hopf: HopfArgs,
    #[arg(long, allow_hyphen_values = true)]
    mu: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    a0_re: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    a0_im: f64,
    #[arg(long)]
    t_final: f64,
    #[arg(long)]
    dt: f64,
    /// Skip the eigenvalue computations and use `omega,c1_re,c1_im,c3_re,c3_im`.
    #[arg(long, allow_hyphen_values = true)]
    coefficients: Option<String>,
}

#[derive(Args, Serialize)]
struct RollArgs {
    #[command(flatten)]
    hopf: HopfArgs,
    #[arg(long, allow_hyphen_values = true)]
    mu: f64,
    #[arg(long, default_value_t = 64)]
    nx: usize,
    #[arg(long, default_value_t = 4)]
    nt: usize,
}

#[derive(Args)]
struct ConfigArgs {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Overrides `output_dir` from the config.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn init_threads() -> Result<()> {
    if let Ok(v) = std::env::var("STRIPSTAB_THREADS") {
        let k: usize = v
            .parse()
            .with_context(|| format!("STRIPSTAB_THREADS must be a positive integer, got `{v}`"))?;
        if k == 0 {
            bail!("STRIPSTAB_THREADS must be positive");
        }
        rayon::ThreadPoolBuilder::new().num_threads(k).build_global()?;
    }
    Ok(())
}

fn spectrum(args: &SpectrumArgs) -> Result<()> {
    let profile = args.common.profile()?;
    let disc = args.common.disc()?;
    let out = args.common.writer(args)?;
    let pairs = orrsomm::spectrum(&profile, args.alpha, args.nu, &disc)?;
    out.write_csv(
        "eigenvalues.csv",
        &["re_lambda", "im_lambda", "re_c", "im_c", "residual", "gap"],
        pairs
            .iter()
            .map(|p| vec![p.lambda.re, p.lambda.im, p.c.re, p.c.im, p.residual, p.gap]),
    )?;
    if let Some(lead) = pairs.first() {
        println!("leading lambda = {:.10e} {:+.10e}i, c = {:.10} {:+.10}i", lead.lambda.re, lead.lambda.im, lead.c.re, lead.c.im);
        if args.eigenfunction {
            let d = disc.diff(1, &lead.psi);
            out.write_csv(
                "eigenfunction.csv",
                &["y", "re_psi", "im_psi", "re_dpsi", "im_dpsi"],
                (0..disc.len()).map(|i| vec![disc.nodes()[i], lead.psi[i].re, lead.psi[i].im, d[i].re, d[i].im]),
            )?;
        }
    }
    println!("{} eigenvalues written to {}", pairs.len(), out.dir().display());
    Ok(())
}

fn neutral_curve(args: &NeutralArgs) -> Result<()> {
    let profile = args.common.profile()?;
    let disc = args.common.disc()?;
    let branch: Branch = args.branch.parse()?;
    let out = args.common.writer(args)?;
    let curve = neutral::trace_neutral_curve(&profile, (args.nu_min, args.nu_max), args.points, branch, &disc)?;
    out.write_csv(
        "neutral_curve.csv",
        &["nu", "alpha_plus", "omega_plus", "d_re_lambda_d_nu"],
        curve
            .points
            .iter()
            .map(|p| vec![p.nu, p.alpha_plus, p.omega_plus, p.d_re_lambda_d_nu]),
    )?;
    for (nu, why) in &curve.failures {
        eprintln!("nu = {nu:e}: {why}");
    }
    match neutral::fit_scaling(&curve.points, branch) {
        Ok(fit) => {
            println!(
                "fitted alpha ~ {:.4} nu^{:.4} (r^2 = {:.6}; reference exponent {:.4})",
                fit.constant, fit.exponent, fit.r_squared, fit.target_exponent
            );
            out.write_json("scaling_fit.json", &fit)?;
        }
        Err(e) => println!("no scaling fit: {e}"),
    }
    Ok(())
}

fn audit(args: &AuditArgs) -> Result<()> {
    let profile = args.common.profile()?;
    let disc = args.common.disc()?;
    let out = args.common.writer(args)?;
    let report = neutral::audit_h(&profile, args.nu, &disc, args.common.seed)?;
    out.write_json("h_audit.json", &report)?;
    for note in &report.notes {
        println!("note: {note}");
    }
    println!("audit at nu = {:e}: {}", args.nu, if report.passed { "passed" } else { "FAILED" });
    if !report.passed {
        bail!("assumption audit failed");
    }
    Ok(())
}

fn green_check(args: &GreenArgs) -> Result<()> {
    let profile = args.common.profile()?;
    let disc = args.common.disc()?;
    let out = args.common.writer(args)?;
    let lambdas = greenfn::imaginary_axis_samples(args.lambda_min, args.lambda_max, args.samples);
    let report = greenfn::verify_resolvent_bound(&profile, args.alpha, args.nu, &lambdas, &disc, args.common.seed)?;
    out.write_csv(
        "bound_report.csv",
        &["abs_lambda", "quotient"],
        report.samples.iter().map(|s| vec![s.lambda_abs, s.quotient]),
    )?;
    println!(
        "slope {:.4} (constant {:.4e}); H2 slope {:.4}; {} samples skipped",
        report.slope,
        report.constant,
        report.h2_slope,
        report.skipped.len()
    );
    Ok(())
}

fn hopf_coefficients(args: &HopfArgs) -> Result<(ShearProfile, stripstab::HopfCoefficients)> {
    let profile = args.common.profile()?;
    let disc = args.common.disc()?;
    let gauge: MeanFlowGauge = args.gauge.parse()?;
    let np = neutral::locate_neutral(&profile, args.nu, Branch::Upper, &disc)?
        .with_context(|| format!("no unstable wavenumber at nu = {:e}", args.nu))?;
    let h = hopf::compute_hopf(&profile, &np, &disc, gauge)?;
    Ok((profile, h))
}

fn hopf_cmd(args: &HopfArgs) -> Result<()> {
    let (_, h) = hopf_coefficients(args)?;
    let out = args.common.writer(args)?;
    pipeline::write_hopf(&out, &h)?;
    println!("alpha_plus = {:.8}, omega_plus = {:.8}", h.alpha_plus(), h.omega_plus());
    println!("c1 = {:.6e} {:+.6e}i (finite differences {:.6e} {:+.6e}i)", h.c1.re, h.c1.im, h.c1_fd.re, h.c1_fd.im);
    println!("c3 = {:.6e} {:+.6e}i +- {:.2e}: {}", h.c3.re, h.c3.im, h.c3_error_bar, h.classification);
    Ok(())
}

fn simulate(args: &SimulateArgs) -> Result<()> {
    let nf = match &args.coefficients {
        Some(text) => {
            let c = text
                .split(',')
                .map(|v| v.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .with_context(|| format!("bad --coefficients `{text}`"))?;
            if c.len() != 5 {
                bail!("--coefficients takes omega,c1_re,c1_im,c3_re,c3_im");
            }
            NormalForm {
                omega: c[0],
            c1: Complex64::new(c[1], c[2]),
                c3: Complex64::new(c[3], c[4]),
            }
        }
        None => NormalForm::from(&hopf_coefficients(&args.hopf)?.1),
    };
    let out = args.hopf.common.writer(args)?;
    let a0 = Complex64::new(args.a0_re, args.a0_im);
    let every = ((args.t_final / args.dt) / 10_000.0).ceil().max(1.0) as usize;
    let traj = amplitude::integrate_sampled(&nf, args.mu, a0, args.t_final, args.dt, every)?;
    pipeline::write_amplitude(&out, &traj)?;
    let last = traj.last().expect("trajectory has the initial state");
    println!("|A({})| = {:.10e}", last.t, last.a.norm());
    if let Ok(Some(lc)) = amplitude::limit_cycle(&nf, args.mu) {
        println!(
            "limit cycle radius {:.10e}, frequency {:.8} ({})",
            lc.radius,
            lc.frequency,
            if lc.stable { "attracting" } else { "repelling" }
        );
    }
    Ok(())
}

fn roll(args: &RollArgs) -> Result<()> {
    let (profile, h) = hopf_coefficients(&args.hopf)?;
    let out = args.hopf.common.writer(args)?;
    let field = amplitude::reconstruct_roll(&h, &profile, args.mu, args.nx, args.nt)?;
    pipeline::write_roll(&out, &field, &h)?;
    let checks = pipeline::roll_checks(&field);
    println!(
        "radius {:.6e}, speed {:.6}, max |u - U| {:.3e}; travel {:.1e}, divergence {:.1e}, wall {:.1e}",
        field.radius, checks.speed, checks.max_deviation, checks.travel_defect, checks.divergence_defect, checks.wall_defect
    );
    Ok(())
}

fn load_config(args: &ConfigArgs) -> Result<RunConfig> {
    let mut cfg = RunConfig::from_file(&args.config)?;
    if let Some(out) = &args.out {
        cfg.output_dir = out.clone();
    }
    Ok(cfg)
}

fn run_pipeline(args: &ConfigArgs) -> Result<()> {
    let cfg = load_config(args)?;
    let report = pipeline::run_pipeline(&cfg)?;
    if let Some(cp) = &report.critical {
        println!("critical point: nu = {:.6e}, alpha = {:.6}", cp.nu, cp.alpha);
    }
    if let (Some(a), Some(w), Some(c1), Some(c3), Some(cl)) =
        (report.alpha_plus, report.omega_plus, report.c1, report.c3, report.classification)
    {
        println!("alpha_plus = {a:.8}, omega_plus = {w:.8}");
        println!("c1 = {:.6e} {:+.6e}i, c3 = {:.6e} {:+.6e}i ({cl})", c1.re, c1.im, c3.re, c3.im);
    }
    for t in &report.timings {
        println!("{:<12} {:>8.2} s", t.stage, t.seconds);
    }
    println!("artifacts in {}", cfg.output_dir.display());
    Ok(())
}

fn sweep(args: &ConfigArgs) -> Result<()> {
    let cfg = load_config(args)?;
    let entries = pipeline::run_sweep(&cfg)?;
    let mut failed = 0;
    for e in &entries {
        match (&e.error, e.alpha_plus, e.classification) {
            (None, Some(a), Some(cl)) => println!("nu = {:e}: alpha_plus = {a:.6}, {cl}", e.nu),
            (Some(err), _, _) => {
                failed += 1;
                println!("nu = {:e}: failed: {err}", e.nu);
            }
            _ => println!("nu = {:e}: incomplete", e.nu),
        }
    }
    if failed > 0 {
        bail!("{failed} of {} sweep runs failed", entries.len());
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    init_threads()?;
    match &cli.command {
        Command::Spectrum(a) => spectrum(a),
        Command::Neutral(a) => neutral_curve(a),
        Command::AuditH(a) => audit(a),
        Command::GreenCheck(a) => green_check(a),
        Command::Hopf(a) => hopf_cmd(a),
        Command::Simulate(a) => simulate(a),
        Command::Roll(a) => roll(a),
        Command::Pipeline(a) => run_pipeline(a),
        Command::Sweep(a) => sweep(a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
