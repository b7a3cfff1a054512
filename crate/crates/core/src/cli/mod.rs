//! Command-line front end. Every command produces a CSV document and a list
//! of threshold violations; `main` decides where the CSV goes and turns the
//! violations into the exit status.

mod specfile;

pub use specfile::{RouteChoice, RunSection, SpecFile};

use crate::constants::{c_gamma0_numeric, default_x_max, gamma0, SharpConstants, DEFAULT_NU_MAX};
use crate::error::{Error, Result};
use crate::fields::{FieldVariant, Level};
use crate::geometry::{divergence_residual, ThetaGrid};
use crate::quotient::{
    bv_inverse, fmt17, hl_quotient_direct, hl_quotient_direct_v, sharpness_experiment, spectral_quotient,
    spectral_transform_with, ExperimentKind, GridPolicy, QuotientReport, SpectralOptions,
};
use crate::spectrum::{eigen_residual, eigenpair, ode_residual};
use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use std::fmt::Write as _;
use std::path::PathBuf;

pub const SCHEMA: &str = "# schema=1";
const DIVERGENCE_TOL: f64 = 1e-8;

#[derive(Debug, Parser)]
#[command(name = "hardy-leray", version, about = "Sharp Hardy-Leray constants and their numerical verification")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the CSV here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Closed-form and brute-force constants over a range of weights.
    Constants {
        #[arg(long, default_value_t = -3.0, allow_negative_numbers = true)]
        gamma_min: f64,
        #[arg(long, default_value_t = 5.0, allow_negative_numbers = true)]
        gamma_max: f64,
        #[arg(long, default_value_t = 0.05)]
        step: f64,
        #[arg(long, default_value_t = DEFAULT_NU_MAX)]
        nu_max: usize,
        /// Largest accepted |closed - numeric|.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Residuals and normalization of the polar eigenfunctions.
    Eigen {
        #[arg(long, default_value_t = 30)]
        nu_max: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Quotients of the fields described by a spec file.
    Verify {
        #[arg(long, value_name = "PATH")]
        spec: PathBuf,
        /// Overrides the weight given in the spec file.
        #[arg(long, allow_negative_numbers = true)]
        gamma: Option<f64>,
        /// Overrides the first seed of random variants.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        samples: Option<usize>,
        /// Largest accepted shortfall below the applicable constant.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Quotients along a minimizing sequence.
    Sharpness {
        #[arg(long, default_value = "swirl_free")]
        kind: ExperimentKind,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        gamma: f64,
        #[arg(long, value_delimiter = ',', default_value = "4,8,16,32")]
        n_list: Vec<usize>,
        /// `u` or `v`; defaults to `v` for swirl and `u` otherwise.
        #[arg(long)]
        level: Option<Level>,
        /// Largest accepted relative disagreement between the two routes.
        #[arg(long, default_value_t = 1e-5)]
        tol: f64,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Constants { .. } => "constants",
            Command::Eigen { .. } => "eigen",
            Command::Verify { .. } => "verify",
            Command::Sharpness { .. } => "sharpness",
        }
    }
}

/// One violated threshold.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub row: String,
    pub check: String,
    pub value: f64,
    pub threshold: f64,
}

impl Failure {
    fn new(row: impl Into<String>, check: &str, value: f64, threshold: f64) -> Self {
        Self { row: row.into(), check: check.into(), value, threshold }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Output {
    pub csv: String,
    pub failures: Vec<Failure>,
}

impl Output {
    fn new(header: &str) -> Self {
        Self { csv: format!("{SCHEMA}\n{header}\n"), failures: Vec::new() }
    }

    fn line(&mut self, row: &str) {
        self.csv.push_str(row);
        self.csv.push('\n');
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Serialize)]
struct Summary<'a> {
    command: &'a str,
    failures: &'a [Failure],
}

/// Machine-readable failure report.
pub fn failure_summary(command: &str, failures: &[Failure]) -> String {
    serde_json::to_string(&Summary { command, failures }).expect("plain data serializes")
}

pub fn run(command: &Command) -> Result<Output> {
    match command {
        Command::Constants { gamma_min, gamma_max, step, nu_max, tol } => {
            cmd_constants(*gamma_min, *gamma_max, *step, *nu_max, *tol)
        }
        Command::Eigen { nu_max, tol } => cmd_eigen(*nu_max, *tol),
        Command::Verify { spec, gamma, seed, samples, tol } => {
            let mut s = SpecFile::read(spec)?;
            if let Some(g) = gamma {
                s.field.gamma = *g;
            }
            if let Some(seed) = seed {
                match &mut s.field.variant {
                    FieldVariant::RandomSwirlFree { seed: s0, .. } | FieldVariant::RandomSwirl { seed: s0, .. } => {
                        *s0 = *seed
                    }
                    _ => log::warn!("--seed ignored for a deterministic variant"),
                }
            }
            if let Some(n) = samples {
                if *n == 0 {
                    return Err(Error::InvalidConfig("samples must be positive".into()));
                }
                s.run.samples = *n;
            }
            cmd_verify(&s, *tol)
        }
        Command::Sharpness { kind, gamma, n_list, level, tol } => {
            let level = level.unwrap_or(match kind {
                ExperimentKind::Swirl => Level::Transformed,
                _ => Level::Original,
            });
            cmd_sharpness(*kind, *gamma, n_list, level, *tol)
        }
    }
}

fn gamma_range(min: f64, max: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidConfig(format!("step must be positive, got {step}")));
    }
    if !(min.is_finite() && max.is_finite()) || min > max {
        return Err(Error::InvalidConfig(format!("empty range [{min}, {max}]")));
    }
    let count = ((max - min) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|k| min + step * k as f64).collect())
}

pub fn cmd_constants(gamma_min: f64, gamma_max: f64, step: f64, nu_max: usize, tol: f64) -> Result<Output> {
    let gammas = gamma_range(gamma_min, gamma_max, step)?;
    let rows: Vec<_> = gammas
        .par_iter()
        .map(|&g| {
            let m = c_gamma0_numeric(g, nu_max, default_x_max(g), 1e-10)?;
            Ok((SharpConstants::new(g), m))
        })
        .collect::<Result<_>>()?;
    let mut out = Output::new(
        "gamma,c_leray,c_costin_mazya,c_gamma0_closed,c_gamma0_numeric,diff,c_swirl,x_plus,lambda_gamma,branch",
    );
    for (c, m) in rows {
        let diff = (c.c_gamma0 - m.value).abs();
        let x_plus = c.x_plus.map(fmt17).unwrap_or_default();
        out.line(&format!(
            "{},{},{},{},{},{},{},{},{},{}",
            fmt17(c.gamma),
            fmt17(c.c_leray),
            fmt17(c.c_costin_mazya),
            fmt17(c.c_gamma0),
            fmt17(m.value),
            fmt17(diff),
            fmt17(c.c_swirl),
            x_plus,
            fmt17(c.lambda_gamma),
            c.regime.label(),
        ));
        let row = format!("gamma={}", c.gamma);
        if !(diff <= tol) {
            out.failures.push(Failure::new(&row, "closed_vs_numeric", diff, tol));
        }
        if m.nu != 1 {
            out.failures.push(Failure::new(&row, "argmin_nu", m.nu as f64, 1.0));
        }
    }
    let _ = writeln!(out.csv, "# gamma0={}", fmt17(gamma0()));
    Ok(out)
}

pub fn cmd_eigen(nu_max: usize, tol: f64) -> Result<Output> {
    if nu_max == 0 {
        return Err(Error::InvalidIndex);
    }
    let xs: Vec<f64> = (1..400).map(|k| -1.0 + k as f64 / 200.0).collect();
    let rows: Vec<_> = (1..=nu_max)
        .into_par_iter()
        .map(|nu| {
            let th = ThetaGrid::gauss_legendre(2 * nu + 8)?;
            let pair = eigenpair(nu)?;
            let psi = pair.tabulate(&th).psi;
            let norm = th.integrate_sphere(&psi.iter().map(|p| p * p).collect::<Vec<_>>());
            Ok((nu, pair.alpha, eigen_residual(nu, &th)?, ode_residual(nu, &xs)?, (norm - 1.0).abs()))
        })
        .collect::<Result<_>>()?;
    let mut out = Output::new("nu,alpha,eigen_residual,ode_residual,norm_error");
    for (nu, alpha, e, o, n) in rows {
        out.line(&format!("{nu},{alpha},{},{},{}", fmt17(e), fmt17(o), fmt17(n)));
        for (check, v) in [("eigen_residual", e), ("ode_residual", o), ("norm_error", n)] {
            if !(v <= tol) {
                out.failures.push(Failure::new(format!("nu={nu}"), check, v, tol));
            }
        }
    }
    Ok(out)
}

fn reports(spec: &SpecFile, v: &crate::geometry::FieldSample, gamma: f64) -> Result<Vec<QuotientReport>> {
    let mut out = Vec::new();
    if matches!(spec.run.route, RouteChoice::Direct | RouteChoice::Both) {
        out.push(match spec.run.level {
            Level::Original => hl_quotient_direct(&bv_inverse(v, gamma), gamma)?,
            Level::Transformed => hl_quotient_direct_v(v, gamma)?,
        });
    }
    if matches!(spec.run.route, RouteChoice::Spectral | RouteChoice::Both) {
        let opts = SpectralOptions { nu_max: spec.run.nu_max, ..Default::default() };
        out.push(spectral_quotient(&spectral_transform_with(v, gamma, &opts)?, gamma)?);
    }
    Ok(out)
}

pub fn cmd_verify(spec: &SpecFile, tol: f64) -> Result<Output> {
    let gamma = spec.field.gamma;
    let jobs = spec.expand();
    let results: Vec<_> = jobs
        .par_iter()
        .map(|(seed, field)| {
            let v = field.build()?;
            let div = divergence_residual(&v, Some(gamma))?;
            Ok((*seed, field.variant.clone(), div, reports(spec, &v, gamma)?))
        })
        .collect::<Result<_>>()?;
    let mut out = Output::new(&format!("field,seed,divergence_residual,applicable_margin,{}", QuotientReport::CSV_HEADER));
    for (seed, variant, div, reps) in results {
        let seed_col = seed.map(|s| s.to_string()).unwrap_or_default();
        let row = format!("{} seed={seed_col}", variant.label());
        if !(div <= DIVERGENCE_TOL) {
            out.failures.push(Failure::new(&row, "divergence_residual", div, DIVERGENCE_TOL));
        }
        for r in reps {
            let (check, margin) = if variant.is_swirl_free() {
                ("margin_c_gamma0", r.margins.c_gamma0)
            } else if variant.is_pure_swirl() {
                ("margin_c_swirl", r.margins.c_swirl)
            } else {
                ("margin_min_c_gamma0_c_swirl", r.margins.c_gamma0.min(r.margins.c_swirl))
            };
            out.line(&format!("{},{seed_col},{},{},{}", variant.label(), fmt17(div), fmt17(margin), r.csv_row()));
            if !(margin >= -tol) {
                out.failures.push(Failure::new(format!("{row} route={}", r.route.label()), check, margin, -tol));
            }
        }
    }
    Ok(out)
}

pub fn cmd_sharpness(kind: ExperimentKind, gamma: f64, n_list: &[usize], level: Level, tol: f64) -> Result<Output> {
    if n_list.is_empty() {
        return Err(Error::InvalidConfig("n-list is empty".into()));
    }
    let table = sharpness_experiment(kind, gamma, n_list, level, &GridPolicy::default())?;
    let mut out = Output::new(crate::quotient::SharpnessTable::CSV_HEADER);
    for row in table.csv_rows() {
        out.line(&row);
    }
    for r in &table.rows {
        if !(r.route_rel_diff <= tol) {
            out.failures.push(Failure::new(format!("n={}", r.n), "route_rel_diff", r.route_rel_diff, tol));
        }
    }
    if !table.monotone {
        let last = table.last().map(|r| r.rel_gap).unwrap_or(f64::NAN);
        out.failures.push(Failure::new("table", "gap_non_increasing", last, 0.0));
    }
    if let Some(p) = table.empirical_order {
        let _ = writeln!(out.csv, "# empirical_order={}", fmt17(p));
    }
    Ok(out)
}
