//! Command-line front end.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use greenblocks_core::chaincalc::FunctionOptions;
use greenblocks_core::conv::ConvSettings;
use greenblocks_core::generate::{random_instance, rng, InstanceSpec};
use greenblocks_core::greensolve::{evaluate_many, solve_bounded_with, solve_ivp_with, GreenSample};
use greenblocks_core::spectral::{DEFAULT_GAP_TOL, DEFAULT_NODES, MAX_NODES};
use greenblocks_core::{verify_residual, BlockLowerTriangular, ForcingFunction, KernelKind, Route, TimeGrid, C64};

use crate::error::Error;
use crate::matrix_file::{parse_matrix, write_matrix};
use crate::table::{samples_csv, samples_json, solution_csv, solution_json, Format, Solution};
use crate::verify::run_checks;

pub const MIN_TOL: f64 = 1e-14;
pub const MAX_TOL: f64 = 1e-2;
pub const DEFAULT_TOL: f64 = 1e-10;

#[derive(Parser, Debug)]
#[command(name = "greenblocks", version, about = "Fundamental solutions and Green's functions of block lower-triangular matrices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate exp+,t(A) or exp-,t(A).
    Exp {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "+", value_parser = parse_sign)]
        sign: KernelKind,
    },
    /// Evaluate the Green's function g_t(A).
    Green {
        #[command(flatten)]
        common: Common,
    },
    /// Solve x' = Ax + f with x(0) = 0 on a grid on one side of zero.
    SolveIvp {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        forcing: Forcing,
    },
    /// The bounded solution of x' = Ax + f on the grid.
    SolveBounded {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        forcing: Forcing,
    },
    /// Route agreement and residual checks; exit status 0 iff all pass.
    Verify {
        #[command(flatten)]
        common: Common,
    },
    /// Write a random test matrix with a controlled spectrum.
    Generate {
        /// Block sizes.
        #[arg(long, value_delimiter = ',', default_value = "2,2,2")]
        sizes: Vec<usize>,
        /// Minimum |Re λ| of the eigenvalues.
        #[arg(long, default_value_t = 0.3)]
        gap: f64,
        /// Minimum distance between eigenvalues.
        #[arg(long, default_value_t = 0.3)]
        separation: f64,
        #[arg(long)]
        bidiagonal: bool,
        #[arg(long)]
        real: bool,
        #[arg(long, env = "GREENBLOCKS_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Matrix file (JSON).
    #[arg(long)]
    pub input: PathBuf,
    /// Evaluation times, comma separated.
    #[arg(long = "t", value_delimiter = ',', allow_hyphen_values = true)]
    pub times: Vec<f64>,
    /// Uniform grid start:stop:count; t = 0 is dropped.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_grid)]
    pub grid: Option<GridSpec>,
    #[arg(long, value_enum, default_value = "convolution")]
    pub route: RouteArg,
    /// Tail tolerance of the full-line convolutions.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    /// Minimum trapezoidal nodes per contour circle.
    #[arg(long, default_value_t = DEFAULT_NODES)]
    pub nodes: usize,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: FormatArg,
    /// Print the resolved configuration to stderr.
    #[arg(long)]
    pub show_config: bool,
}

#[derive(Args, Debug, Clone)]
pub struct Forcing {
    /// Constant forcing vector of real entries, comma separated; defaults to all ones.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub forcing: Vec<f64>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum RouteArg {
    Convolution,
    Contour,
    Oracle,
    All,
}

impl RouteArg {
    pub fn routes(self) -> Vec<Route> {
        match self {
            RouteArg::Convolution => vec![Route::Convolution],
            RouteArg::Contour => vec![Route::ContourChain],
            RouteArg::Oracle => vec![Route::Oracle],
            RouteArg::All => Route::ALL.to_vec(),
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormatArg {
    Csv,
    Json,
}

fn parse_sign(s: &str) -> Result<KernelKind, String> {
    match s {
        "+" | "plus" => Ok(KernelKind::Plus),
        "-" | "minus" => Ok(KernelKind::Minus),
        _ => Err(format!("expected + or -, got {s:?}")),
    }
}

/// Points of a `start:stop:count` grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec(pub Vec<f64>);

fn parse_grid(s: &str) -> Result<GridSpec, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err("expected start:stop:count".into());
    }
    let start: f64 = parts[0].parse().map_err(|_| format!("bad start {:?}", parts[0]))?;
    let stop: f64 = parts[1].parse().map_err(|_| format!("bad stop {:?}", parts[1]))?;
    let count: usize = parts[2].parse().map_err(|_| format!("bad count {:?}", parts[2]))?;
    if count == 0 || !start.is_finite() || !stop.is_finite() {
        return Err("count must be positive and the ends finite".into());
    }
    if count > 1 && stop <= start {
        return Err("stop must exceed start".into());
    }
    let step = if count > 1 { (stop - start) / (count - 1) as f64 } else { 0.0 };
    Ok(GridSpec(
        (0..count).map(|k| if k + 1 == count { stop } else { start + step * k as f64 }).filter(|&t| t != 0.0).collect(),
    ))
}

/// Everything a run depends on, after defaults are applied.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: &'static str,
    pub input: PathBuf,
    pub times: Vec<f64>,
    pub tol: f64,
    pub nodes: usize,
    pub routes: Vec<Route>,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub sign: Option<KernelKind>,
    pub forcing: Option<Vec<f64>>,
}

impl RunConfig {
    fn new(command: &'static str, c: &Common, needs_times: bool) -> Result<Self, Error> {
        if !(MIN_TOL..=MAX_TOL).contains(&c.tol) {
            return Err(Error::Argument { flag: "--tol", message: format!("{} is outside [{MIN_TOL:e}, {MAX_TOL:e}]", c.tol) });
        }
        if c.nodes < 4 || c.nodes > MAX_NODES {
            return Err(Error::Argument { flag: "--nodes", message: format!("{} is outside [4, {MAX_NODES}]", c.nodes) });
        }
        let mut times = c.times.clone();
        if let Some(g) = &c.grid {
            times.extend_from_slice(&g.0);
        }
        if times.iter().any(|&t| t == 0.0 || !t.is_finite()) {
            return Err(Error::Argument { flag: "--t", message: "times must be finite and nonzero".into() });
        }
        times.sort_by(f64::total_cmp);
        times.dedup();
        if needs_times && times.is_empty() {
            return Err(Error::Argument { flag: "--t", message: "give --t or --grid".into() });
        }
        Ok(Self {
            command,
            input: c.input.clone(),
            times,
            tol: c.tol,
            nodes: c.nodes,
            routes: c.route.routes(),
            output: c.output.clone(),
            format: match c.format {
                FormatArg::Csv => Format::Csv,
                FormatArg::Json => Format::Json,
            },
            sign: None,
            forcing: None,
        })
    }

    pub fn options(&self) -> FunctionOptions {
        FunctionOptions {
            nodes: self.nodes,
            margin: None,
            conv: ConvSettings { tol: self.tol, ..ConvSettings::default() },
            gap_tol: DEFAULT_GAP_TOL,
        }
    }

    pub fn describe(&self) -> String {
        let routes: Vec<&str> = self.routes.iter().map(|r| r.name()).collect();
        let times: Vec<String> = self.times.iter().map(f64::to_string).collect();
        let mut s = format!(
            "command = {}\ninput = {}\ntimes = [{}]\ntol = {:e}\nnodes = {}\nroutes = [{}]\nformat = {}\noutput = {}\ngap_tol = {:e}\nmax_panels = {}\n",
            self.command,
            self.input.display(),
            times.join(", "),
            self.tol,
            self.nodes,
            routes.join(", "),
            match self.format {
                Format::Csv => "csv",
                Format::Json => "json",
            },
            self.output.as_ref().map_or("stdout".into(), |p| p.display().to_string()),
            DEFAULT_GAP_TOL,
            ConvSettings::default().max_panels,
        );
        if let Some(k) = self.sign {
            s.push_str(&format!("sign = {}\n", k.name()));
        }
        if let Some(f) = &self.forcing {
            let v: Vec<String> = f.iter().map(f64::to_string).collect();
            s.push_str(&format!("forcing = [{}]\n", v.join(", ")));
        }
        s
    }
}

fn read_input(path: &PathBuf) -> Result<BlockLowerTriangular, Error> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.clone(), source })?;
    parse_matrix(&text).map_err(|source| Error::Input { path: path.clone(), source })
}

fn emit(output: &Option<PathBuf>, text: &str, stdout: &mut dyn Write) -> Result<(), Error> {
    match output {
        Some(p) => std::fs::write(p, text).map_err(|source| Error::Io { path: p.clone(), source }),
        None => stdout.write_all(text.as_bytes()).map_err(|e| Error::Output(e.to_string())),
    }
}

fn forcing_vector(values: &[f64], n: usize) -> Result<Vec<C64>, Error> {
    if values.is_empty() {
        return Ok(vec![C64::new(1.0, 0.0); n]);
    }
    if values.len() != n {
        return Err(Error::Argument { flag: "--forcing", message: format!("has {} entries, matrix dimension is {n}", values.len()) });
    }
    Ok(values.iter().map(|&v| C64::new(v, 0.0)).collect())
}

/// Runs one command, writing results to `--output` or `stdout` and notes to
/// `stderr`. Returns the process exit status.
pub fn run(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, Error> {
    match cli.command {
        Command::Exp { common, sign } => {
            let mut cfg = RunConfig::new("exp", &common, true)?;
            cfg.sign = Some(sign);
            evaluate_command(&cfg, sign, common.show_config, stdout, stderr)
        }
        Command::Green { common } => {
            let cfg = RunConfig::new("green", &common, true)?;
            evaluate_command(&cfg, KernelKind::Green, common.show_config, stdout, stderr)
        }
        Command::SolveIvp { common, forcing } => solve_command("solve-ivp", false, &common, &forcing, stdout, stderr),
        Command::SolveBounded { common, forcing } => {
            solve_command("solve-bounded", true, &common, &forcing, stdout, stderr)
        }
        Command::Verify { common } => {
            let cfg = RunConfig::new("verify", &common, false)?;
            if common.show_config {
                note(stderr, &cfg.describe());
            }
            let a = read_input(&cfg.input)?;
            let report = run_checks(&a, &cfg.options())?;
            emit(&cfg.output, &report.render(), stdout)?;
            Ok(if report.passed() { 0 } else { 1 })
        }
        Command::Generate { sizes, gap, separation, bidiagonal, real, seed, output } => {
            let mut spec = InstanceSpec::new(sizes).axis_gap(gap).bidiagonal(bidiagonal).real(real);
            spec.separation = separation;
            let a = random_instance(&mut rng(seed), &spec)?;
            emit(&output, &write_matrix(&a), stdout)?;
            Ok(0)
        }
    }
}

fn note(stderr: &mut dyn Write, s: &str) {
    let _ = stderr.write_all(s.as_bytes());
}

fn evaluate_command(
    cfg: &RunConfig,
    kind: KernelKind,
    show_config: bool,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32, Error> {
    if show_config {
        note(stderr, &cfg.describe());
    }
    let a = read_input(&cfg.input)?;
    let opts = cfg.options();
    let mut samples: Vec<GreenSample> = Vec::new();
    for &route in &cfg.routes {
        samples.extend(evaluate_many(&a, kind, &cfg.times, route, &opts)?);
    }
    let text = match cfg.format {
        Format::Csv => samples_csv(&samples),
        Format::Json => samples_json(&samples),
    };
    emit(&cfg.output, &text, stdout)?;
    Ok(0)
}

fn solve_command(
    command: &'static str,
    bounded: bool,
    common: &Common,
    forcing: &Forcing,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32, Error> {
    let mut cfg = RunConfig::new(command, common, true)?;
    if cfg.routes != [Route::Convolution] {
        return Err(Error::Argument { flag: "--route", message: "the solvers march convolution step tables only".into() });
    }
    let a = read_input(&cfg.input)?;
    let n = a.partition().total();
    let fv = forcing_vector(&forcing.forcing, n)?;
    cfg.forcing = Some(fv.iter().map(|z| z.re).collect());
    if common.show_config {
        note(stderr, &cfg.describe());
    }
    let f = ForcingFunction::constant(fv);
    let grid = TimeGrid::new(cfg.times.clone())?;
    let opts = cfg.options();
    let mut extra = serde_json::Map::new();
    let values = if bounded {
        let sol = solve_bounded_with(&a, &f, &grid, &opts)?;
        for w in &sol.warnings {
            note(stderr, &format!("warning: {w}\n"));
        }
        extra.insert("sup_bound".into(), sol.sup_bound.into());
        extra.insert("truncation_bound".into(), sol.truncation_bound.into());
        sol.values
    } else {
        solve_ivp_with(&a, &f, &grid, &opts)?
    };
    if grid.len() >= 3 {
        let r = verify_residual(&a, &values, &f, &grid)?;
        extra.insert("residual".into(), r.into());
        note(stderr, &format!("residual: {r:.3e}\n"));
    }
    let sol = Solution { times: grid.points(), values: &values, sizes: a.partition().sizes(), route: Route::Convolution.name() };
    let text = match cfg.format {
        Format::Csv => solution_csv(&sol),
        Format::Json => solution_json(&sol, serde_json::Value::Object(extra)),
    };
    emit(&cfg.output, &text, stdout)?;
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_drops_zero() {
        assert_eq!(parse_grid("-1:1:5").unwrap().0, vec![-1.0, -0.5, 0.5, 1.0]);
        assert_eq!(parse_grid("2:2:1").unwrap().0, vec![2.0]);
        assert!(parse_grid("1:0:3").is_err());
        assert!(parse_grid("1:2").is_err());
    }

    #[test]
    fn tolerance_range_is_enforced() {
        let cli = Cli::try_parse_from(["greenblocks", "green", "--input", "x.json", "--t", "1", "--tol", "0.5"]).unwrap();
        let Command::Green { common } = cli.command else { panic!() };
        assert!(matches!(RunConfig::new("green", &common, true), Err(Error::Argument { flag: "--tol", .. })));
    }

    #[test]
    fn negative_times_parse() {
        let cli = Cli::try_parse_from(["greenblocks", "exp", "--input", "x", "--t", "-1", "--sign", "-"]).unwrap();
        let Command::Exp { common, sign } = cli.command else { panic!() };
        assert_eq!(common.times, vec![-1.0]);
        assert_eq!(sign, KernelKind::Minus);
    }
}
