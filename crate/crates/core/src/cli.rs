//! Command-line front end.
//!
//! Every subcommand produces a [`Report`]: a table of results plus a list of
//! checks. CSV output is the table alone; JSON wraps `{config, results, checks}`.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::matching::{self, DEFAULT_BRACKET};
use crate::ode::{self, RadialSolution};
use crate::par;
use crate::potential::{self, ModelParams, NormalizationConstants};
use crate::specfun::{self, HypParams};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NUMERIC: i32 = 1;
pub const EXIT_NO_SOLUTION: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(
    name = "gcalabi",
    version,
    about = "Homogeneous solutions of the non-archimedean Monge-Ampere equation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Complex dimension.
    #[arg(long = "n", global = true, default_value_t = 3)]
    pub n: u32,
    #[arg(long, global = true, default_value_t = 1)]
    pub d1: u32,
    #[arg(long, global = true, default_value_t = 1)]
    pub d2: u32,
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    /// The matched solution is built on [t_min, 1/t_min].
    #[arg(long = "t-min", global = true, default_value_t = 1e-3)]
    pub t_min: f64,
    #[arg(long = "grid-size", global = true, default_value_t = 200)]
    pub grid_size: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; standard output if omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Matching value w0 by closed form and by shooting.
    Match,
    /// Matched radial solution on a log grid.
    Solve,
    /// Run the invariant checks and report pass/fail.
    Verify,
    /// Boundary expansion of u against the exact potential.
    Expand,
    /// Length scales along the ray t = 1.
    Scales,
    /// Evaluate a special function.
    Specfun {
        #[arg(value_enum)]
        name: SpecfunName,
        #[arg(allow_negative_numbers = true)]
        args: Vec<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SpecfunName {
    /// gamma X
    Gamma,
    /// hyp2f1 A B C Z
    Hyp2f1,
    /// gauss A B C (value at z = 1)
    Gauss,
    /// fprofile X (uses --n)
    Fprofile,
    /// fquad X, profile by quadrature (uses --n)
    Fquad,
    /// w0, closed-form matching value (uses --n)
    W0,
    /// pstar W0 (uses --n)
    Pstar,
    /// g Y W0, rescaled Legendre transform (uses --n)
    G,
}

impl SpecfunName {
    fn arity(self) -> usize {
        match self {
            Self::W0 => 0,
            Self::Gamma | Self::Fprofile | Self::Fquad | Self::Pstar => 1,
            Self::G => 2,
            Self::Gauss => 3,
            Self::Hyp2f1 => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub n: u32,
    pub d1: u32,
    pub d2: u32,
    pub tol: f64,
    pub t_min: f64,
    pub grid_size: usize,
    pub format: Format,
    pub out_path: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub function: Option<SpecfunName>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub args: Vec<f64>,
}

impl RunConfig {
    pub fn from_cli(cli: &Cli) -> Self {
        let (command, function, args) = match &cli.command {
            Command::Match => ("match", None, vec![]),
            Command::Solve => ("solve", None, vec![]),
            Command::Verify => ("verify", None, vec![]),
            Command::Expand => ("expand", None, vec![]),
            Command::Scales => ("scales", None, vec![]),
            Command::Specfun { name, args } => ("specfun", Some(*name), args.clone()),
        };
        Self {
            command: command.to_string(),
            n: cli.n,
            d1: cli.d1,
            d2: cli.d2,
            tol: cli.tol,
            t_min: cli.t_min,
            grid_size: cli.grid_size,
            format: cli.format,
            out_path: cli.out.as_ref().map(|p| p.display().to_string()),
            function,
            args,
        }
    }

    /// Rejects configurations that are malformed rather than numerically hard.
    pub fn validate(&self) -> std::result::Result<(), String> {
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(format!("--tol must lie in (0, 1), got {}", self.tol));
        }
        if !(self.t_min > 0.0 && self.t_min < 1.0) {
            return Err(format!("--t-min must lie in (0, 1), got {}", self.t_min));
        }
        if self.grid_size < 2 {
            return Err(format!(
                "--grid-size must be at least 2, got {}",
                self.grid_size
            ));
        }
        if self.d1 == 0 || self.d2 == 0 {
            return Err("--d1 and --d2 must be positive".into());
        }
        match self.command.as_str() {
            "match" => {
                if self.n < 2 {
                    return Err(format!("--n must be at least 2, got {}", self.n));
                }
            }
            "specfun" => {
                let name = self.function.expect("specfun without name");
                if self.args.len() != name.arity() {
                    return Err(format!(
                        "{name:?} takes {} argument(s), got {}",
                        name.arity(),
                        self.args.len()
                    ));
                }
            }
            _ => {
                if self.n < 3 {
                    return Err(format!(
                        "--n must be at least 3 for this command, got {}",
                        self.n
                    ));
                }
            }
        }
        Ok(())
    }

    fn params(&self) -> Result<ModelParams> {
        ModelParams::new(self.n, self.d1, self.d2)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => format!("{v:.16e}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) => json!(v),
            Cell::Int(v) => json!(v),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl Check {
    pub fn at_most(name: &str, value: f64, threshold: f64) -> Self {
        Self {
            name: name.to_string(),
            value,
            threshold,
            pass: value <= threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub checks: Vec<Check>,
}

impl Report {
    fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
            checks: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(Cell::csv).collect();
            let _ = writeln!(out, "{}", line.join(","));
        }
        out
    }

    pub fn to_json(&self, config: &RunConfig) -> String {
        let results: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = Map::new();
                for (h, c) in self.header.iter().zip(row) {
                    obj.insert(h.clone(), c.json());
                }
                Value::Object(obj)
            })
            .collect();
        let doc = json!({
            "config": config,
            "results": results,
            "checks": self.checks,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn render(&self, config: &RunConfig) -> String {
        match config.format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(config),
        }
    }
}

fn logspace(lo: f64, hi: f64, size: usize) -> Vec<f64> {
    (0..size)
        .map(|k| lo * (hi / lo).powf(k as f64 / (size - 1) as f64))
        .collect()
}

pub fn run_match(cfg: &RunConfig) -> Result<Report> {
    let m = matching::shoot_w0(cfg.n, DEFAULT_BRACKET, cfg.tol)?;
    let mut rep = Report::new(&[
        "n",
        "w0_closed",
        "w0_shot",
        "route_gap",
        "w_at_one",
        "wp_at_one",
        "residual",
    ]);
    rep.rows.push(vec![
        Cell::Int(m.n as i64),
        m.w0_closed.into(),
        m.w0_shot.into(),
        m.route_gap().into(),
        m.w_at_one.into(),
        m.wp_at_one.into(),
        m.residual.into(),
    ]);
    rep.checks
        .push(Check::at_most("route_gap", m.route_gap(), 1e-6));
    rep.checks.push(Check::at_most(
        "matching_residual",
        m.residual.abs(),
        cfg.tol,
    ));
    Ok(rep)
}

fn matched(cfg: &RunConfig) -> Result<RadialSolution> {
    matching::matched_solution(cfg.n, cfg.t_min, cfg.tol)
}

pub fn run_solve(cfg: &RunConfig) -> Result<Report> {
    let sol = matched(cfg)?;
    let ts = logspace(cfg.t_min, 1.0 / cfg.t_min, cfg.grid_size);
    let grid = sol.resample(&ts)?;
    let mut rep = Report::new(&["t", "w", "wp", "wpp", "ode_residual"]);
    let mut worst: f64 = 0.0;
    for s in &grid.samples {
        let r = s.residual(cfg.n);
        worst = worst.max(r.abs());
        rep.rows.push(vec![
            s.t.into(),
            s.w.into(),
            s.wp.into(),
            s.wpp.into(),
            r.into(),
        ]);
    }
    rep.checks
        .push(Check::at_most("max_ode_residual", worst, 1e-6));
    let inv = sol.check_invariants();
    rep.checks.push(Check {
        name: "invariants".into(),
        value: if inv.is_ok() { 0.0 } else { 1.0 },
        threshold: 0.0,
        pass: inv.is_ok(),
    });
    Ok(rep)
}

/// Largest `|w(t) - (1-t) 𝔴(1/(1-t))|` with `𝔴` from the implicit solution.
pub fn implicit_defect(sol: &RadialSolution, ts: &[f64]) -> Result<f64> {
    let defects: Vec<Result<f64>> = par::map(ts, |&t| {
        let f = ode::frak_implicit(1.0 / (1.0 - t), sol.n, sol.w0)?;
        Ok((sol.eval(t)?.w - (1.0 - t) * f.frak_w).abs())
    });
    defects.into_iter().try_fold(0.0f64, |m, d| Ok(m.max(d?)))
}

/// Relative NA MA residuals and Kähler flags on a 10 x 10 log grid,
/// `t` in `[0.05, 20]`, `x1` in `[10, 1e4]`.
pub fn nama_grid_check(params: &ModelParams, sol: &RadialSolution) -> Result<(f64, usize)> {
    let pts = potential::log_grid(params, (10.0, 1e4), (0.05, 20.0), 10);
    let samples = potential::sweep(params, sol, &pts)?;
    let mut worst: f64 = 0.0;
    let mut bad = 0;
    for s in &samples {
        worst = worst.max(potential::nama_relative_residual(s, params).abs());
        if !potential::kahler_flags(s, params).all() {
            bad += 1;
        }
    }
    Ok((worst, bad))
}

/// Largest change of the relative residual under `(x1, d1) <-> (x2, d2)`
/// with the reflected radial solution.
pub fn swap_defect(params: &ModelParams, sol: &RadialSolution) -> Result<f64> {
    let swapped = params.swapped();
    let reflected = ode::symmetry_reflect(sol);
    let pts = potential::log_grid(params, (10.0, 1e4), (0.05, 20.0), 10);
    let diffs: Vec<Result<f64>> = par::map(&pts, |&(x1, x2)| {
        let a = potential::sample_potential(params, sol, x1, x2)?;
        let b = potential::sample_potential(&swapped, &reflected, x2, x1)?;
        let fa = potential::kahler_flags(&a, params);
        let fb = potential::kahler_flags(&b, &swapped);
        if fa != fb {
            return Ok(f64::INFINITY);
        }
        Ok((potential::nama_relative_residual(&a, params)
            - potential::nama_relative_residual(&b, &swapped))
        .abs())
    });
    diffs.into_iter().try_fold(0.0f64, |m, d| Ok(m.max(d?)))
}

/// Largest first-integral residual along an integrated `𝔴` trajectory on `[1, 100]`.
pub fn first_integral_defect(n: u32, w0: f64) -> Result<f64> {
    let traj = ode::integrate_frak(n, w0, 1.0 + 1e-6, 100.0, 1e-12)?;
    Ok(traj
        .iter()
        .map(|s| ode::first_integral_residual(s, n, w0).abs())
        .fold(0.0, f64::max))
}

/// Largest relative mismatch between analytic and central-difference Hessians.
pub fn hessian_fd_defect(params: &ModelParams, sol: &RadialSolution) -> Result<f64> {
    let pts = potential::log_grid(params, (50.0, 500.0), (0.1, 10.0), 5);
    let defects: Vec<Result<f64>> = par::map(&pts, |&(x1, x2)| {
        let h = 1e-4 * x1.min(x2);
        let u = |a: f64, b: f64| potential::sample_potential(params, sol, a, b).map(|s| s.u);
        let s = potential::sample_potential(params, sol, x1, x2)?;
        let c = u(x1, x2)?;
        let d11 = (u(x1 + h, x2)? - 2.0 * c + u(x1 - h, x2)?) / (h * h);
        let d22 = (u(x1, x2 + h)? - 2.0 * c + u(x1, x2 - h)?) / (h * h);
        let d12 = (u(x1 + h, x2 + h)? - u(x1 + h, x2 - h)? - u(x1 - h, x2 + h)?
            + u(x1 - h, x2 - h)?)
            / (4.0 * h * h);
        let scale = s.hess_norm();
        Ok([
            (d11 - s.hess[0][0]).abs(),
            (d22 - s.hess[1][1]).abs(),
            (d12 - s.hess[0][1]).abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
            / scale)
    });
    defects.into_iter().try_fold(0.0f64, |m, d| Ok(m.max(d?)))
}

pub fn run_verify(cfg: &RunConfig) -> Result<Report> {
    let params = cfg.params()?;
    let m = matching::shoot_w0(cfg.n, DEFAULT_BRACKET, cfg.tol)?;
    let sol = matched(cfg)?;
    let (nama, bad_flags) = nama_grid_check(&params, &sol)?;
    let t_lo = cfg.t_min.max(sol.t_range().0);
    let implicit_ts = logspace(t_lo, 0.99, 50);

    let mut rep = Report::new(&["check", "value", "threshold", "pass"]);
    rep.checks = vec![
        Check::at_most("route_gap", m.route_gap(), 1e-6),
        Check::at_most("nama_max_rel_residual", nama, 1e-6),
        Check::at_most("kahler_flag_failures", bad_flags as f64, 0.0),
        Check::at_most(
            "symmetry_defect",
            matching::symmetry_defect(cfg.n, sol.w0, cfg.t_min, 1e-12)?,
            1e-7,
        ),
        Check::at_most("swap_residual_change", swap_defect(&params, &sol)?, 1e-9),
        Check::at_most(
            "first_integral_defect",
            first_integral_defect(cfg.n, sol.w0)?,
            1e-9,
        ),
        Check::at_most(
            "implicit_solution_defect",
            implicit_defect(&sol, &implicit_ts)?,
            1e-7,
        ),
        Check::at_most("hessian_fd_defect", hessian_fd_defect(&params, &sol)?, 1e-5),
    ];
    for c in &rep.checks {
        rep.rows.push(vec![
            Cell::Text(c.name.clone()),
            c.value.into(),
            c.threshold.into(),
            Cell::Bool(c.pass),
        ]);
    }
    Ok(rep)
}

pub const EXPAND_MAX_ORDER: usize = 4;

pub fn run_expand(cfg: &RunConfig) -> Result<Report> {
    let params = cfg.params()?;
    let sol = matched(cfg)?;
    let ser = ode::series_near_one(cfg.n, sol.w0, ode::SEED_ORDER)?;
    let mut header = vec!["t".to_string(), "u_exact".to_string()];
    for k in 1..=EXPAND_MAX_ORDER {
        header.push(format!("u_order{k}"));
        header.push(format!("rel_err_order{k}"));
    }
    let mut rep = Report {
        header,
        rows: Vec::new(),
        checks: Vec::new(),
    };
    let x1 = 1.0;
    let ts = logspace(cfg.t_min.max(sol.t_range().0), 0.5, cfg.grid_size);
    let rel_at = |t: f64, order: usize| -> Result<(f64, f64, f64)> {
        let x2 = t * x1 * params.d2 as f64 / params.d1 as f64;
        let exact = potential::sample_potential(&params, &sol, x1, x2)?.u;
        let approx = potential::boundary_expansion_u(&params, &ser, x1, x2, order)?;
        Ok((exact, approx, ((approx - exact) / exact).abs()))
    };
    let rows: Vec<Result<Vec<Cell>>> = par::map(&ts, |&t| {
        let mut row = vec![Cell::Num(t)];
        for k in 1..=EXPAND_MAX_ORDER {
            let (exact, approx, rel) = rel_at(t, k)?;
            if k == 1 {
                row.push(exact.into());
            }
            row.push(approx.into());
            row.push(rel.into());
        }
        Ok(row)
    });
    rep.rows = rows.into_iter().collect::<Result<_>>()?;
    let (_, _, rel) = rel_at(0.01, 2)?;
    rep.checks
        .push(Check::at_most("rel_err_order2_t0.01", rel, 1e-5));
    Ok(rep)
}

pub fn run_scales(cfg: &RunConfig) -> Result<Report> {
    let params = cfg.params()?;
    let sol = matched(cfg)?;
    let nf = cfg.n as f64;
    let radii = logspace(10.0, 1e6, cfg.grid_size);
    let dir = {
        let (a, b) = (params.d1 as f64, params.d2 as f64);
        let norm = a.hypot(b);
        (a / norm, b / norm)
    };
    let samples: Vec<Result<_>> = par::map(&radii, |&r| {
        let s = potential::sample_potential(&params, &sol, r * dir.0, r * dir.1)?;
        Ok((s, potential::length_scales(&params, &s)))
    });
    let samples: Vec<_> = samples.into_iter().collect::<Result<_>>()?;
    let mut rep = Report::new(&[
        "r",
        "x1",
        "x2",
        "grad_norm",
        "hess_norm",
        "torus_diam",
        "fiber_diam",
        "dist",
        "vol_exponent",
    ]);
    for (r, (s, ls)) in radii.iter().zip(&samples) {
        rep.rows.push(vec![
            (*r).into(),
            s.x1.into(),
            s.x2.into(),
            s.grad_norm().into(),
            s.hess_norm().into(),
            ls.torus_diam.into(),
            ls.fiber_diam.into(),
            ls.dist.into(),
            ls.vol_exponent.into(),
        ]);
    }
    let slope = |f: &dyn Fn(usize) -> f64| {
        let ys: Vec<f64> = (0..samples.len()).map(f).collect();
        potential::loglog_slope(&radii, &ys)
    };
    let expected = [
        ("slope_grad", slope(&|i| samples[i].0.grad_norm()), 2.0 / nf),
        (
            "slope_hess",
            slope(&|i| samples[i].0.hess_norm()),
            (2.0 - nf) / nf,
        ),
        (
            "slope_torus",
            slope(&|i| samples[i].1.torus_diam),
            (2.0 - nf) / (2.0 * nf),
        ),
        ("slope_fiber", slope(&|i| samples[i].1.fiber_diam), 1.0 / nf),
    ];
    for (name, got, want) in expected {
        rep.checks
            .push(Check::at_most(name, ((got - want) / want).abs(), 0.02));
    }
    let nc = NormalizationConstants::new(&params, sol.w0)?;
    rep.checks
        .push(Check::at_most("nama_const_positive", -nc.nama_const, 0.0));
    Ok(rep)
}

pub fn run_specfun(cfg: &RunConfig) -> Result<Report> {
    let name = cfg.function.expect("specfun without name");
    let a = &cfg.args;
    let n = cfg.n;
    let value = match name {
        SpecfunName::Gamma => specfun::gamma_fn(a[0])?,
        SpecfunName::Hyp2f1 => specfun::hyp2f1(HypParams::new(a[0], a[1], a[2], a[3]))?,
        SpecfunName::Gauss => specfun::gauss_at_one(a[0], a[1], a[2])?,
        SpecfunName::Fprofile => specfun::f_profile(a[0], n)?,
        SpecfunName::Fquad => specfun::f_profile_quadrature(a[0], n)?,
        SpecfunName::W0 => matching::closed_form_w0(n)?,
        SpecfunName::Pstar => {
            if !(a[0] > 0.0) {
                return Err(Error::Domain(format!("w0 must be positive, got {}", a[0])));
            }
            matching::p_star(n, a[0])
        }
        SpecfunName::G => matching::legendre_g(a[0], n, a[1])?,
    };
    let mut rep = Report::new(&["function", "value"]);
    let label = serde_json::to_value(name)
        .ok()
        .and_then(|v| v.as_str().map(String::from))
        .unwrap_or_default();
    rep.rows.push(vec![Cell::Text(label), value.into()]);
    Ok(rep)
}

pub fn run(cfg: &RunConfig) -> Result<Report> {
    match cfg.command.as_str() {
        "match" => run_match(cfg),
        "solve" => run_solve(cfg),
        "verify" => run_verify(cfg),
        "expand" => run_expand(cfg),
        "scales" => run_scales(cfg),
        "specfun" => run_specfun(cfg),
        other => Err(Error::Domain(format!("unknown command {other}"))),
    }
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::NoPositiveSolution { .. } => EXIT_NO_SOLUTION,
        _ => EXIT_NUMERIC,
    }
}

/// Parse, run, write output; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let cfg = RunConfig::from_cli(&cli);
    if let Err(msg) = cfg.validate() {
        eprintln!("error: {msg}");
        return EXIT_USAGE;
    }
    let report = match run(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    let text = report.render(&cfg);
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return EXIT_NUMERIC;
            }
        }
        None => print!("{text}"),
    }
    for c in report.checks.iter().filter(|c| !c.pass) {
        eprintln!(
            "check failed: {} = {:e} (threshold {:e})",
            c.name, c.value, c.threshold
        );
    }
    if report.passed() {
        EXIT_OK
    } else {
        EXIT_NUMERIC
    }
}
