//! Configuration, command pipelines and report emission for the
//! `twomatrix` binary.
//!
//! Every command writes into one output directory and is deterministic given
//! its configuration: no clocks, no unseeded randomness, fixed float
//! formatting. Each CSV starts with a `# twomatrix-csv/1 …` schema line.
//!
//! | command        | reads                      | writes |
//! |----------------|----------------------------|--------|
//! | `solve`        | config                     | `solution.json`, `mu{1,2,3}.csv`, `summary.json`, `residuals.csv`, `measures.svg` |
//! | `curve`        | `solution.json`            | `curve_report.json`, `curve_summary.csv` |
//! | `kernel`       | config (+ `solution.json`) | `kernel_n{n}.csv`, `kernel_summary.csv`, `density_overlay.svg` |
//! | `universality` | config (+ `solution.json`) | `universality_{mode}_n{n}.csv`, `universality_{mode}_trend.{csv,json}`, `universality_{mode}_diagonal.svg` |
//!
//! `kernel` and `universality` reuse `solution.json` when it matches the
//! configuration and otherwise solve (and write the bundle) first.

use crate::curve::{curve_report, SpectralCurve};
use crate::equilibrium::{edge_exponents, solve_vector_equilibrium, EquilibriumOptions, EquilibriumSolution, ResidualReport, SolutionBundle};
use crate::error::{Error, Result};
use crate::finite_n::{biortho_system, compare_determinants, density_sample_points, strictly_decreasing, Mode, MAX_PRECISION};
use crate::plot::{line_chart_svg, Series};
use crate::potential::{EvenPoly, CSV_SCHEMA_VERSION};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// File name of the solution bundle inside an output directory.
pub const SOLUTION_FILE: &str = "solution.json";

/// Tolerance of the per-n normalization check |∫ρ_n − 1|.
pub const TRACE_TOLERANCE: f64 = 1e-6;

fn default_n() -> Vec<usize> {
    vec![6, 12, 24]
}
fn default_precision() -> u32 {
    256
}
fn default_mode() -> Mode {
    Mode::Bulk
}
fn default_out() -> PathBuf {
    PathBuf::from("out")
}
fn default_seed() -> u64 {
    20_240_601
}

/// Run configuration, read from TOML.
///
/// ```toml
/// v = [0.0, 0.5]      # coefficients of x⁰, x², x⁴, …  (here V = x²/2)
/// tau = 1.0
/// n = [6, 12, 24]
/// precision = 256
/// mode = "bulk"
/// out = "out"
///
/// [solver]            # optional; any subset of the solver options
/// residual_tol = 1e-4
/// ```
///
/// Instead of `v`, `v_monomials` lists the coefficients of every power
/// x⁰, x¹, x², …; a non-zero odd coefficient is rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_monomials: Option<Vec<f64>>,
    pub tau: f64,
    #[serde(default = "default_n")]
    pub n: Vec<usize>,
    #[serde(default = "default_precision")]
    pub precision: u32,
    #[serde(default = "default_mode")]
    pub mode: Mode,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    /// Seed of the random sample points of the curve report.
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub solver: EquilibriumOptions,
}

impl Config {
    /// V = x²/2, τ = 1, n ∈ {6, 12, 24}, 256 bits, bulk mode.
    pub fn reference() -> Self {
        Config {
            v: Some(vec![0.0, 0.5]),
            v_monomials: None,
            tau: 1.0,
            n: default_n(),
            precision: default_precision(),
            mode: default_mode(),
            out: default_out(),
            seed: default_seed(),
            solver: EquilibriumOptions::default(),
        }
    }

    /// Parses and validates a TOML document.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Config = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads, parses and validates a TOML file.
    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    /// The external field V.
    pub fn potential(&self) -> Result<EvenPoly> {
        match (&self.v, &self.v_monomials) {
            (Some(v), None) => EvenPoly::new(v.clone()),
            (None, Some(m)) => EvenPoly::from_monomials(m),
            _ => Err(Error::Config("give exactly one of `v` and `v_monomials`".into())),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.potential()?;
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::Config(format!("tau must be positive, got {}", self.tau)));
        }
        if self.n.is_empty() {
            return Err(Error::Config("the n list is empty".into()));
        }
        if let Some(&bad) = self.n.iter().find(|&&n| n == 0 || n % 3 != 0) {
            return Err(Error::Config(format!("n = {bad} is not a positive multiple of 3")));
        }
        if !(64..=MAX_PRECISION).contains(&self.precision) {
            return Err(Error::Config(format!("precision must lie in [64, {MAX_PRECISION}] bits, got {}", self.precision)));
        }
        Ok(())
    }

    /// Applies command-line overrides and re-validates.
    pub fn with_overrides(mut self, o: &Overrides) -> Result<Self> {
        if let Some(out) = &o.out {
            self.out = out.clone();
        }
        if let Some(n) = &o.n {
            self.n = n.clone();
        }
        if let Some(mode) = o.mode {
            self.mode = mode;
        }
        if let Some(p) = o.precision {
            self.precision = p;
        }
        self.validate()?;
        Ok(self)
    }
}

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub n: Option<Vec<usize>>,
    pub mode: Option<Mode>,
    pub precision: Option<u32>,
}

/// The four pipelines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Solve,
    Curve,
    Kernel,
    Universality,
}

/// Outcome class of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    /// Outputs written, but an accuracy check failed.
    SolverFailure,
    /// Outputs written, but the solution is not one-cut regular.
    MultiCut,
    /// Outputs written, but a convergence trend is not monotone.
    TrendFailure,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::SolverFailure => 1,
            Status::MultiCut => 2,
            Status::TrendFailure => 3,
        }
    }
}

/// Exit code of a command that stopped with an error.
pub fn error_exit_code(e: &Error) -> u8 {
    match e {
        Error::MultiCut(_) => Status::MultiCut.exit_code(),
        _ => Status::SolverFailure.exit_code(),
    }
}

/// What a command did.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub status: Status,
    /// Written files, in writing order.
    pub files: Vec<PathBuf>,
    /// Human-readable one-paragraph summary.
    pub message: String,
}

/// Runs one command.
pub fn run(command: Command, cfg: &Config) -> Result<Outcome> {
    match command {
        Command::Solve => cmd_solve(cfg),
        Command::Curve => cmd_curve(&cfg.out, cfg.seed),
        Command::Kernel => cmd_kernel(cfg),
        Command::Universality => cmd_universality(cfg),
    }
}

struct Writer {
    dir: PathBuf,
    files: Vec<PathBuf>,
}

impl Writer {
    fn new(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(Writer { dir: dir.to_path_buf(), files: Vec::new() })
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        let path = self.dir.join(name);
        std::fs::write(&path, contents)?;
        self.files.push(path);
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Io(std::io::Error::other(e)))?;
        text.push('\n');
        self.write(name, &text)
    }
}

fn csv_header(kind: &str) -> String {
    format!("# {CSV_SCHEMA_VERSION} {kind}\n")
}

fn fmt(v: f64) -> String {
    format!("{v:.17e}")
}

/// Scalar summary of a solve, written as `summary.json`.
#[derive(Debug, Clone, Serialize)]
pub struct SolveSummary {
    pub v: Vec<f64>,
    pub tau: f64,
    pub a: f64,
    pub c: f64,
    pub ell: f64,
    pub masses: [f64; 3],
    pub residuals: ResidualReport,
    pub max_residual: f64,
    pub residual_tol: f64,
    pub one_cut_regular: bool,
    /// Local exponents of dμ₁/dx at a and of σ − μ₂ at ic (both ½ at a soft edge).
    pub edge_exponents: [f64; 2],
    pub iterations: usize,
    pub energy_trace: Vec<f64>,
    pub c_trace: Vec<f64>,
}

impl SolveSummary {
    pub fn new(sol: &EquilibriumSolution) -> Self {
        let (ea, ec) = edge_exponents(sol);
        SolveSummary {
            v: sol.v.coeffs.clone(),
            tau: sol.tau,
            a: sol.a,
            c: sol.c,
            ell: sol.ell,
            masses: [sol.mu1.total_mass(), sol.mu2.total_mass(), sol.mu3.total_mass()],
            residuals: sol.residual_report,
            max_residual: sol.residual_report.max_residual(),
            residual_tol: sol.options.residual_tol,
            one_cut_regular: sol.one_cut_regular,
            edge_exponents: [ea, ec],
            iterations: sol.iterations,
            energy_trace: sol.energy_trace.clone(),
            c_trace: sol.c_trace.clone(),
        }
    }
}

fn residuals_csv(r: &ResidualReport) -> String {
    let mut s = csv_header("residuals");
    s.push_str("condition,value\n");
    for (name, v) in [
        ("eq1", r.eq1),
        ("ineq1", r.ineq1),
        ("eq2", r.eq2),
        ("ineq2", r.ineq2),
        ("ineq2_margin", r.ineq2_margin),
        ("eq3", r.eq3),
    ] {
        let _ = writeln!(s, "{name},{}", fmt(v));
    }
    s
}

fn measures_chart(sol: &EquilibriumSolution) -> Result<String> {
    let xmax = 2.0 * sol.a;
    let pts = |f: &dyn Fn(f64) -> f64| -> Vec<(f64, f64)> {
        (0..=400).map(|i| -xmax + 2.0 * xmax * i as f64 / 400.0).map(|x| (x, f(x))).collect()
    };
    let series = [
        Series::new("dμ₁/dx", pts(&|x| sol.mu1.density_at(x))),
        Series::new("dμ₂/d|y| (y = i·t)", pts(&|t| sol.mu2.density_at(t))),
        Series::new("dμ₃/dx", pts(&|x| sol.mu3.density_at(x))),
    ];
    line_chart_svg("Equilibrium densities", "coordinate", "density", &series)
}

fn write_solution(w: &mut Writer, sol: &EquilibriumSolution) -> Result<()> {
    w.json(SOLUTION_FILE, &SolutionBundle::from(sol))
}

/// Solves the equilibrium problem and writes the bundle, the measure CSVs,
/// the summary and the residual report.
pub fn cmd_solve(cfg: &Config) -> Result<Outcome> {
    cfg.validate()?;
    let v = cfg.potential()?;
    let sol = solve_vector_equilibrium(&v, cfg.tau, &cfg.solver)?;
    let mut w = Writer::new(&cfg.out)?;
    write_solution(&mut w, &sol)?;
    w.write("mu1.csv", &sol.mu1.to_csv())?;
    w.write("mu2.csv", &sol.mu2.to_csv())?;
    w.write("mu3.csv", &sol.mu3.to_csv())?;
    let summary = SolveSummary::new(&sol);
    w.json("summary.json", &summary)?;
    w.write("residuals.csv", &residuals_csv(&sol.residual_report))?;
    w.write("measures.svg", &measures_chart(&sol)?)?;
    let status = if !sol.one_cut_regular {
        Status::MultiCut
    } else if !(summary.max_residual <= summary.residual_tol) {
        Status::SolverFailure
    } else {
        Status::Ok
    };
    let message = format!(
        "a = {:.12}, c = {:.12}, ℓ = {:.12}; masses {:.10} / {:.10} / {:.10}; max residual {:.3e} (tol {:.1e}); {} iterations",
        sol.a,
        sol.c,
        sol.ell,
        summary.masses[0],
        summary.masses[1],
        summary.masses[2],
        summary.max_residual,
        summary.residual_tol,
        sol.iterations
    );
    Ok(Outcome { status, files: w.files, message })
}

/// Reads the bundle written by `solve` from `dir`.
pub fn load_solution(dir: &Path) -> Result<EquilibriumSolution> {
    let path = dir.join(SOLUTION_FILE);
    let text = std::fs::read_to_string(&path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("cannot read {}: {e}", path.display()))))?;
    let bundle: SolutionBundle =
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("malformed {SOLUTION_FILE}: {e}")))?;
    bundle.to_solution()
}

/// Builds the curve of the stored solution and writes its invariant report.
pub fn cmd_curve(dir: &Path, seed: u64) -> Result<Outcome> {
    let sol = load_solution(dir)?;
    if !sol.one_cut_regular {
        return Err(Error::MultiCut("the stored solution is not one-cut regular".into()));
    }
    let sc = SpectralCurve::new(&sol)?;
    let report = curve_report(&sc, seed)?;
    let mut w = Writer::new(dir)?;
    w.json("curve_report.json", &report)?;
    w.write("curve_summary.csv", &report.to_csv())?;
    let message = format!(
        "s = {:.12}, t = {:.12}, α = {:.10} (F₃ fit {:.10}); det M error {:.2e}, jump error {:.2e}, sheet-sum error {:.2e}",
        report.s,
        report.t,
        report.alpha.alpha,
        report.alpha.alpha_from_f3,
        report.parametrix.det_error,
        report.parametrix.jump_error,
        report.sheet_sum_error
    );
    Ok(Outcome { status: Status::Ok, files: w.files, message })
}

/// The stored solution when it was computed from the same V, τ and solver
/// options; otherwise a fresh solve, whose bundle is written to `w`.
fn solution_for(cfg: &Config, w: &mut Writer) -> Result<EquilibriumSolution> {
    let v = cfg.potential()?;
    if cfg.out.join(SOLUTION_FILE).exists() {
        let sol = load_solution(&cfg.out)?;
        if sol.v == v && sol.tau == cfg.tau && sol.options == cfg.solver {
            return Ok(sol);
        }
    }
    let sol = solve_vector_equilibrium(&v, cfg.tau, &cfg.solver)?;
    write_solution(w, &sol)?;
    Ok(sol)
}

/// One line of `kernel_summary.csv`.
#[derive(Debug, Clone, Serialize)]
pub struct KernelSummaryRow {
    pub n: usize,
    pub precision: u32,
    /// |∫ρ_n − 1| = |tr K₁₁/n − 1|.
    pub trace_error: f64,
    pub biorthogonality_residual: f64,
    /// sup over the sample points of |ρ_n − dμ₁/dx|.
    pub density_sup_error: f64,
}

/// Runs the finite-n pipeline for each n and writes the diagonal-density
/// CSVs, a summary with the normalization check, and the overlay plot.
pub fn cmd_kernel(cfg: &Config) -> Result<Outcome> {
    cfg.validate()?;
    let mut w = Writer::new(&cfg.out)?;
    let sol = solution_for(cfg, &mut w)?;
    let xs = density_sample_points(sol.a);
    let mut series = vec![Series::new("dμ₁/dx", xs.iter().map(|&x| (x, sol.mu1.density_at(x))).collect())];
    let mut rows = Vec::new();
    for &n in &cfg.n {
        let sys = biortho_system(n, &sol.v, sol.tau, cfg.precision)?;
        let mut csv = csv_header(&format!("kernel-diagonal n={n} precision={}", sys.precision()));
        csv.push_str("x,K11_diag,rho_n,mu1_density,abs_error\n");
        let mut sup: f64 = 0.0;
        let mut pts = Vec::with_capacity(xs.len());
        for &x in &xs {
            let k = sys.kernel_k11(x, x);
            let rho = k / n as f64;
            let mu = sol.mu1.density_at(x);
            sup = sup.max((rho - mu).abs());
            pts.push((x, rho));
            let _ = writeln!(csv, "{},{},{},{},{}", fmt(x), fmt(k), fmt(rho), fmt(mu), fmt((rho - mu).abs()));
        }
        w.write(&format!("kernel_n{n}.csv"), &csv)?;
        series.push(Series::new(format!("ρ_n, n = {n}"), pts));
        rows.push(KernelSummaryRow {
            n,
            precision: sys.precision(),
            trace_error: (sys.kernel_trace() / n as f64 - 1.0).abs(),
            biorthogonality_residual: sys.biorthogonality_residual(),
            density_sup_error: sup,
        });
    }
    let mut csv = csv_header("kernel-summary");
    csv.push_str("n,precision,trace_error,biorthogonality_residual,density_sup_error\n");
    for r in &rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{}",
            r.n,
            r.precision,
            fmt(r.trace_error),
            fmt(r.biorthogonality_residual),
            fmt(r.density_sup_error)
        );
    }
    w.write("kernel_summary.csv", &csv)?;
    w.write("density_overlay.svg", &line_chart_svg("Mean density ρ_n against dμ₁/dx", "x", "density", &series)?)?;
    let worst = rows.iter().map(|r| r.trace_error).fold(0.0, f64::max);
    let status = if worst <= TRACE_TOLERANCE { Status::Ok } else { Status::SolverFailure };
    let message = rows
        .iter()
        .map(|r| format!("n = {}: |∫ρ_n − 1| = {:.1e}, sup|ρ_n − dμ₁/dx| = {:.4e}", r.n, r.trace_error, r.density_sup_error))
        .collect::<Vec<_>>()
        .join("; ");
    Ok(Outcome { status, files: w.files, message })
}

/// One line of the universality trend report.
#[derive(Debug, Clone, Serialize)]
pub struct TrendRow {
    pub n: usize,
    pub precision: u32,
    /// sup-errors of the k-point determinants, k = 1, 2, 3.
    pub sup_errors: [f64; 3],
    /// Rescaled kernel on the diagonal at u = 0 and its limit.
    pub diagonal: f64,
    pub diagonal_reference: f64,
}

/// The trend report written as `universality_{mode}_trend.json`.
#[derive(Debug, Clone, Serialize)]
pub struct TrendReport {
    pub mode: Mode,
    pub grid: Vec<f64>,
    pub rows: Vec<TrendRow>,
    /// Strict decrease in n of each k-point sup-error, k = 1, 2, 3.
    pub monotone: [bool; 3],
    /// Strict decrease of |diagonal − reference| (checked in edge mode only).
    pub diagonal_monotone: bool,
    pub passed: bool,
}

fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Bulk => "bulk",
        Mode::Edge => "edge",
    }
}

/// Compares the rescaled kernel with its sine (bulk) or Airy (edge) limit
/// for each n and checks that the errors decrease with n.
pub fn cmd_universality(cfg: &Config) -> Result<Outcome> {
    cfg.validate()?;
    let mode = cfg.mode;
    let name = mode_name(mode);
    let mut w = Writer::new(&cfg.out)?;
    let sol = solution_for(cfg, &mut w)?;
    let mut rows = Vec::new();
    let mut grid = Vec::new();
    let mut diag_series = Vec::new();
    for &n in &cfg.n {
        let sys = biortho_system(n, &sol.v, sol.tau, cfg.precision)?;
        let cmp = compare_determinants(&sys, &sol, mode)?;
        let mut csv = csv_header(&format!("universality-grid mode={name} n={n} precision={}", sys.precision()));
        csv.push_str("u,v,value,reference,abs_error\n");
        for (i, &u) in cmp.grid.iter().enumerate() {
            for (j, &v) in cmp.grid.iter().enumerate() {
                let (k, r) = (cmp.kernel[i][j], cmp.reference[i][j]);
                let _ = writeln!(csv, "{},{},{},{},{}", fmt(u), fmt(v), fmt(k), fmt(r), fmt((k - r).abs()));
            }
        }
        w.write(&format!("universality_{name}_n{n}.csv"), &csv)?;
        let mid = cmp.grid.len() / 2;
        if diag_series.is_empty() {
            diag_series.push(Series::new("limit kernel", cmp.grid.iter().enumerate().map(|(i, &u)| (u, cmp.reference[i][i])).collect()));
        }
        diag_series.push(Series::new(format!("n = {n}"), cmp.grid.iter().enumerate().map(|(i, &u)| (u, cmp.kernel[i][i])).collect()));
        rows.push(TrendRow {
            n,
            precision: sys.precision(),
            sup_errors: cmp.sup_errors,
            diagonal: cmp.kernel[mid][mid],
            diagonal_reference: cmp.reference[mid][mid],
        });
        grid = cmp.grid;
    }
    let monotone = [0, 1, 2].map(|k| strictly_decreasing(&rows.iter().map(|r| r.sup_errors[k]).collect::<Vec<_>>()));
    let diag_err: Vec<f64> = rows.iter().map(|r| (r.diagonal - r.diagonal_reference).abs()).collect();
    let diagonal_monotone = strictly_decreasing(&diag_err);
    let passed = monotone.iter().all(|&m| m) && (mode == Mode::Bulk || diagonal_monotone);
    let mut csv = csv_header(&format!("universality-trend mode={name}"));
    csv.push_str("n,precision,k1_sup_error,k2_sup_error,k3_sup_error,diagonal,diagonal_reference,diagonal_error\n");
    for (r, e) in rows.iter().zip(&diag_err) {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{}",
            r.n,
            r.precision,
            fmt(r.sup_errors[0]),
            fmt(r.sup_errors[1]),
            fmt(r.sup_errors[2]),
            fmt(r.diagonal),
            fmt(r.diagonal_reference),
            fmt(*e)
        );
    }
    w.write(&format!("universality_{name}_trend.csv"), &csv)?;
    let title = format!("Rescaled kernel on the diagonal ({name})");
    w.write(&format!("universality_{name}_diagonal.svg"), &line_chart_svg(&title, "u", "K(u, u)", &diag_series)?)?;
    let report = TrendReport { mode, grid, rows, monotone, diagonal_monotone, passed };
    w.json(&format!("universality_{name}_trend.json"), &report)?;
    let message = report
        .rows
        .iter()
        .map(|r| format!("n = {}: k = 1, 2, 3 errors {:.3e}, {:.3e}, {:.3e}", r.n, r.sup_errors[0], r.sup_errors[1], r.sup_errors[2]))
        .collect::<Vec<_>>()
        .join("; ");
    let status = if passed { Status::Ok } else { Status::TrendFailure };
    Ok(Outcome { status, files: w.files, message })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_parsing_and_validation() {
        let cfg = Config::from_toml_str("v = [0.0, 0.5]\ntau = 1.0\n").unwrap();
        assert_eq!(cfg, Config::reference());
        let cfg = Config::from_toml_str("v_monomials = [0.0, 0.0, 0.5]\ntau = 2.0\nn = [3]\nmode = \"edge\"\n[solver]\nresidual_tol = 1e-3\n").unwrap();
        assert_eq!(cfg.potential().unwrap().coeffs, vec![0.0, 0.5]);
        assert_eq!(cfg.mode, Mode::Edge);
        assert_eq!(cfg.solver.residual_tol, 1e-3);
        assert_eq!(cfg.solver.max_outer, EquilibriumOptions::default().max_outer);
        for bad in [
            "v_monomials = [0.0, 0.1, 0.5]\ntau = 1.0\n",
            "v = [0.0, 0.5]\ntau = -1.0\n",
            "v = [0.0, 0.5]\ntau = 1.0\nn = [5]\n",
            "v = [0.0, 0.5]\ntau = 1.0\nprecision = 8\n",
            "v = [0.0, 0.5]\nv_monomials = [0.0, 0.0, 0.5]\ntau = 1.0\n",
            "v = [0.0, 0.5]\ntau = 1.0\nmode = \"middle\"\n",
            "v = [0.0, 0.5]\ntau = 1.0\nunknown = 3\n",
        ] {
            assert!(matches!(Config::from_toml_str(bad), Err(Error::Config(_))), "{bad}");
        }
    }

    #[test]
    fn overrides_take_precedence() {
        let o = Overrides { out: Some("x".into()), n: Some(vec![3, 9]), mode: Some(Mode::Edge), precision: Some(128) };
        let cfg = Config::reference().with_overrides(&o).unwrap();
        assert_eq!((cfg.out, cfg.n, cfg.mode, cfg.precision), (PathBuf::from("x"), vec![3, 9], Mode::Edge, 128));
        let o = Overrides { n: Some(vec![4]), ..Default::default() };
        assert!(Config::reference().with_overrides(&o).is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(Status::Ok.exit_code(), 0);
        assert_eq!(error_exit_code(&Error::MultiCut("x".into())), 2);
        assert_eq!(error_exit_code(&Error::Config("x".into())), 1);
        assert_eq!(Status::TrendFailure.exit_code(), 3);
    }
}
