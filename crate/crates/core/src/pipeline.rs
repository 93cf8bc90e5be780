//! End-to-end runs: critical point, assumption audit, Hopf coefficients,
//! limit cycle and roll, with every artifact written as it is produced.

use crate::amplitude::{self, LimitCycle, NormalForm};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::hopf::{self, Classification, HopfCoefficients};
use crate::neutral::{self, CriticalPoint, HAuditReport};
use crate::output::ArtifactWriter;
use crate::profiles::ShearProfile;
use crate::specgrid::SpectralDiscretization;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Time offset used for the travelling-wave check on the roll.
pub const TRAVEL_DELTA: f64 = 0.1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StageTiming {
    pub stage: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RollChecks {
    pub travel_defect: f64,
    pub divergence_defect: f64,
    pub wall_defect: f64,
    pub periodicity_defect: f64,
    pub max_deviation: f64,
    pub speed: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AmplitudeSummary {
    pub mu: f64,
    pub cycle: LimitCycle,
    /// The trajectory was computed for the time-reversed equation (repelling cycle).
    pub time_reversed: bool,
    pub final_abs: f64,
    pub final_error: f64,
}

/// Contents of `manifest.json`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PipelineReport {
    pub version: String,
    pub config_hash: String,
    pub config: RunConfig,
    pub status: String,
    pub failed_stage: Option<String>,
    pub error: Option<String>,
    pub timings: Vec<StageTiming>,
    pub critical: Option<CriticalPoint>,
    pub audit_passed: Option<bool>,
    pub alpha_plus: Option<f64>,
    pub omega_plus: Option<f64>,
    pub c1: Option<Complex64>,
    pub c1_fd: Option<Complex64>,
    pub c3: Option<Complex64>,
    pub c3_error_bar: Option<f64>,
    pub classification: Option<Classification>,
    /// `(omega, c1, c3)` multiplied by `alpha_plus`.
    pub scaled_by_alpha: Option<(f64, Complex64, Complex64)>,
    pub amplitude: Option<AmplitudeSummary>,
    pub roll: Option<RollChecks>,
    pub artifacts: Vec<String>,
}

impl PipelineReport {
    fn new(config: &RunConfig) -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash: config.hash(),
            config: config.clone(),
            status: "running".into(),
            failed_stage: None,
            error: None,
            timings: Vec::new(),
            critical: None,
            audit_passed: None,
            alpha_plus: None,
            omega_plus: None,
            c1: None,
            c1_fd: None,
            c3: None,
            c3_error_bar: None,
            classification: None,
            scaled_by_alpha: None,
            amplitude: None,
            roll: None,
            artifacts: Vec::new(),
        }
    }
}

struct Run<'a> {
    cfg: &'a RunConfig,
    out: ArtifactWriter,
    report: PipelineReport,
}

impl Run<'_> {
    fn stage<T>(&mut self, name: &'static str, f: impl FnOnce(&mut Self) -> Result<T>) -> Result<T> {
        log::info!("stage {name}");
        let t0 = Instant::now();
        let res = f(self);
        self.report.timings.push(StageTiming {
            stage: name.into(),
            seconds: t0.elapsed().as_secs_f64(),
        });
        match res {
            Ok(v) => Ok(v),
            Err(e) => {
                self.report.status = "failed".into();
                self.report.failed_stage = Some(name.into());
                self.report.error = Some(e.to_string());
                // best effort: the manifest of a failed run keeps the partial record
                let _ = self.out.write_json("manifest.json", &self.report);
                Err(e.at_stage(name))
            }
        }
    }

    fn record(&mut self, path: PathBuf) {
        let name = path
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        self.report.artifacts.push(name);
    }
}

/// The sign of `mu` on which the cycle exists: `-Re(c1) mu / Re(c3) > 0`.
pub fn cycle_side_mu(hopf: &HopfCoefficients, magnitude: f64) -> f64 {
    if hopf.c3.re >= 0.0 {
        magnitude
    } else {
        -magnitude
    }
}

/// Integrates towards the cycle (backwards in time if it repels) and
/// returns the summary plus the recorded trajectory.
pub fn approach_cycle(
    nf: &NormalForm,
    mu: f64,
    cycle: &LimitCycle,
    start_fraction: f64,
    relaxation_times: f64,
    samples: usize,
) -> Result<(AmplitudeSummary, Vec<amplitude::AmplitudeState>)> {
    let time_reversed = !cycle.stable;
    let f = if time_reversed { nf.time_reversed() } else { *nf };
    let a0 = Complex64::new(start_fraction * cycle.radius, 0.0);
    let rate = (2.0 * nf.c1.re * mu).abs();
    let t_final = relaxation_times / rate;
    let dt = 0.5 * f.max_dt(mu, Complex64::new(cycle.radius.max(a0.norm()), 0.0));
    let steps = (t_final / dt).ceil() as usize;
    let every = (steps / samples.max(1)).max(1);
    let traj = amplitude::integrate_sampled(&f, mu, a0, t_final, dt, every)?;
    let final_abs = traj.last().map_or(0.0, |s| s.a.norm());
    Ok((
        AmplitudeSummary {
            mu,
            cycle: *cycle,
            time_reversed,
            final_abs,
            final_error: (final_abs - cycle.radius).abs(),
        },
        traj,
    ))
}

/// Runs every stage for `cfg.nu`, writing artifacts under `cfg.output_dir`.
pub fn run_pipeline(cfg: &RunConfig) -> Result<PipelineReport> {
    cfg.validate()?;
    let profile = cfg.profile.load()?;
    let out = ArtifactWriter::new(&cfg.output_dir, cfg.hash())?;
    let mut run = Run {
        cfg,
        out,
        report: PipelineReport::new(cfg),
    };
    run_stages(&mut run, &profile)?;
    run.report.status = "ok".into();
    run.out.write_json("manifest.json", &run.report)?;
    Ok(run.report)
}

fn run_stages(run: &mut Run<'_>, profile: &ShearProfile) -> Result<()> {
    let disc = SpectralDiscretization::new(run.cfg.n)?;
    let nu = run.cfg.nu;

    if run.cfg.critical {
        run.stage("critical", |r| {
            let cp = neutral::find_critical_point(profile, nu, &disc)?;
            let p = r.out.write_json("critical.json", &cp)?;
            r.record(p);
            r.report.critical = Some(cp);
            Ok(())
        })?;
    }

    let audit: HAuditReport = run.stage("audit-h", |r| {
        let audit = neutral::audit_h(profile, nu, &disc, r.cfg.seed)?;
        let p = r.out.write_json("h_audit.json", &audit)?;
        r.record(p);
        r.report.audit_passed = Some(audit.passed);
        if !audit.passed {
            return Err(Error::Precondition(format!("assumption audit failed at nu = {nu}")));
        }
        Ok(audit)
    })?;
    let neutral = audit
        .neutral
        .clone()
        .ok_or_else(|| Error::Precondition("audit produced no neutral point".into()))?;

    let hopf = run.stage("hopf", |r| {
        let h = hopf::compute_hopf(profile, &neutral, &disc, r.cfg.hopf.gauge)?;
        for p in write_hopf(&r.out, &h)? {
            r.record(p);
        }
        r.report.alpha_plus = Some(h.alpha_plus());
        r.report.omega_plus = Some(h.omega_plus());
        r.report.c1 = Some(h.c1);
        r.report.c1_fd = Some(h.c1_fd);
        r.report.c3 = Some(h.c3);
        r.report.c3_error_bar = Some(h.c3_error_bar);
        r.report.classification = Some(h.classification);
        r.report.scaled_by_alpha = Some(h.scaled_by_alpha());
        Ok(h)
    })?;

    let mu = run.cfg.amplitude.mu.unwrap_or_else(|| cycle_side_mu(&hopf, run.cfg.amplitude.mu_magnitude));
    run.stage("limit-cycle", |r| {
        let nf = NormalForm::from(&hopf);
        let cycle = amplitude::limit_cycle(&nf, mu)?
            .ok_or_else(|| Error::Reconstruction(format!("no limit cycle at mu = {mu}")))?;
        let a = &r.cfg.amplitude;
        let (summary, traj) = approach_cycle(&nf, mu, &cycle, a.start_fraction, a.relaxation_times, a.samples)?;
        let p = write_amplitude(&r.out, &traj)?;
        r.record(p);
        let p = r.out.write_json("limit_cycle.json", &summary)?;
        r.record(p);
        r.report.amplitude = Some(summary);
        Ok(())
    })?;

    run.stage("roll", |r| {
        let roll = amplitude::reconstruct_roll(&hopf, profile, mu, r.cfg.roll.nx, r.cfg.roll.nt)?;
        for p in write_roll(&r.out, &roll, &hopf)? {
            r.record(p);
        }
        r.report.roll = Some(roll_checks(&roll));
        Ok(())
    })?;
    Ok(())
}

pub fn roll_checks(roll: &amplitude::RollField) -> RollChecks {
    RollChecks {
        travel_defect: roll.travel_defect(TRAVEL_DELTA),
        divergence_defect: roll.divergence_defect(),
        wall_defect: roll.wall_defect(),
        periodicity_defect: roll.periodicity_defect(),
        max_deviation: roll.max_deviation(),
        speed: roll.speed(),
    }
}

#[derive(Serialize)]
struct HopfSummary<'a> {
    omega_plus: f64,
    alpha_plus: f64,
    nu: f64,
    n: usize,
    gauge: String,
    c1: [f64; 2],
    c1_fd: [f64; 2],
    c3: [f64; 2],
    c3_fine: [f64; 2],
    c3_error_bar: f64,
    classification: Classification,
    adjoint_condition: f64,
    d_lambda_d_alpha: [f64; 2],
    scaled_by_alpha: ScaledSummary,
    normalization: &'a str,
}

#[derive(Serialize)]
struct ScaledSummary {
    omega_plus: f64,
    c1: [f64; 2],
    c3: [f64; 2],
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

/// `hopf.json` plus the eigenfunctions in `hopf_fields.csv`.
pub fn write_hopf(out: &ArtifactWriter, h: &HopfCoefficients) -> Result<Vec<PathBuf>> {
    let (w, c1a, c3a) = h.scaled_by_alpha();
    let summary = HopfSummary {
        omega_plus: h.omega_plus(),
        alpha_plus: h.alpha_plus(),
        nu: h.neutral.nu,
        n: h.n,
        gauge: h.gauge.to_string(),
        c1: pair(h.c1),
        c1_fd: pair(h.c1_fd),
        c3: pair(h.c3),
        c3_fine: pair(h.c3_fine),
        c3_error_bar: h.c3_error_bar,
        classification: h.classification,
        adjoint_condition: h.adjoint_condition,
        d_lambda_d_alpha: pair(h.neutral.d_lambda_d_alpha),
        scaled_by_alpha: ScaledSummary {
            omega_plus: w,
            c1: pair(c1a),
            c3: pair(c3a),
        },
        normalization: "max |psi1| = 1, real positive at the max-modulus node; <psi_adj, M psi1> = 1",
    };
    let a = out.write_json("hopf.json", &summary)?;
    let rows = (0..h.nodes.len()).map(|i| {
        vec![
            h.nodes[i],
            h.psi1[i].re,
            h.psi1[i].im,
            h.psi_adj[i].re,
            h.psi_adj[i].im,
            h.psi2[i].re,
            h.psi2[i].im,
            h.phi0[i],
        ]
    });
    let b = out.write_csv(
        "hopf_fields.csv",
        &["y", "re_psi1", "im_psi1", "re_psi_adj", "im_psi_adj", "re_psi2", "im_psi2", "phi0"],
        rows,
    )?;
    Ok(vec![a, b])
}

pub fn write_amplitude(out: &ArtifactWriter, traj: &[amplitude::AmplitudeState]) -> Result<PathBuf> {
    out.write_csv(
        "amplitude.csv",
        &["t", "re_A", "im_A", "abs_A"],
        traj.iter().map(|s| vec![s.t, s.a.re, s.a.im, s.a.norm()]),
    )
}

#[derive(Serialize)]
struct RollMetadata<'a> {
    alpha_plus: f64,
    omega_plus: f64,
    nu: f64,
    mu: f64,
    radius: f64,
    frequency: f64,
    speed: f64,
    c1: [f64; 2],
    c3: [f64; 2],
    t: &'a [f64],
    nx: usize,
    ny: usize,
    files: Vec<String>,
    omitted: &'a str,
}

/// One `roll_t{k}.csv` per time sample plus `metadata.json`.
pub fn write_roll(out: &ArtifactWriter, roll: &amplitude::RollField, h: &HopfCoefficients) -> Result<Vec<PathBuf>> {
    let mut paths = Vec::new();
    let mut files = Vec::new();
    for k in 0..roll.t.len() {
        let name = format!("roll_t{k}.csv");
        let rows = (0..roll.y.len()).flat_map(|i| {
            (0..roll.x.len()).map(move |j| vec![roll.x[j], roll.y[i], roll.u[k][i][j], roll.v[k][i][j]])
        });
        paths.push(out.write_csv(&name, &["x", "y", "u", "v"], rows)?);
        files.push(name);
    }
    let meta = RollMetadata {
        alpha_plus: roll.alpha,
        omega_plus: h.omega_plus(),
        nu: h.neutral.nu,
        mu: roll.mu,
        radius: roll.radius,
        frequency: roll.frequency,
        speed: roll.speed(),
        c1: pair(h.c1),
        c3: pair(h.c3),
        t: &roll.t,
        nx: roll.x.len(),
        ny: roll.y.len(),
        files,
        omitted: "leading-order roll only; the O(|mu|) corrections of the field and the O(|A|(|mu| + |A|)) terms of the reduction are not reconstructed",
    };
    paths.push(out.write_json("metadata.json", &meta)?);
    Ok(paths)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepEntry {
    pub nu: f64,
    pub output_dir: PathBuf,
    pub ok: bool,
    pub error: Option<String>,
    pub alpha_plus: Option<f64>,
    pub omega_plus: Option<f64>,
    pub c1: Option<Complex64>,
    pub c3: Option<Complex64>,
    pub classification: Option<Classification>,
}

fn sweep_dir(base: &Path, nu: f64) -> PathBuf {
    base.join(format!("nu_{nu:e}"))
}

/// Independent pipelines over `cfg.sweep.nu`, in parallel; `sweep.json`
/// in the base output directory summarizes them.
pub fn run_sweep(cfg: &RunConfig) -> Result<Vec<SweepEntry>> {
    cfg.validate()?;
    if cfg.sweep.nu.is_empty() {
        return Err(Error::Config("sweep.nu is empty".into()));
    }
    cfg.profile.load()?;
    let entries: Vec<SweepEntry> = cfg
        .sweep
        .nu
        .par_iter()
        .map(|&nu| {
            let mut sub = cfg.clone();
            sub.nu = nu;
            sub.critical = false;
            sub.sweep.nu.clear();
            sub.output_dir = sweep_dir(&cfg.output_dir, nu);
            match run_pipeline(&sub) {
                Ok(rep) => SweepEntry {
                    nu,
                    output_dir: sub.output_dir,
                    ok: true,
                    error: None,
                    alpha_plus: rep.alpha_plus,
                    omega_plus: rep.omega_plus,
                    c1: rep.c1,
                    c3: rep.c3,
                    classification: rep.classification,
                },
                Err(e) => SweepEntry {
                    nu,
                    output_dir: sub.output_dir,
                    ok: false,
                    error: Some(e.to_string()),
                    alpha_plus: None,
                    omega_plus: None,
                    c1: None,
                    c3: None,
                    classification: None,
                },
            }
        })
        .collect();
    let out = ArtifactWriter::new(&cfg.output_dir, cfg.hash())?;
    out.write_json("sweep.json", &serde_json::json!({ "runs": entries }))?;
    Ok(entries)
}
