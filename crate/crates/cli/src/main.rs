//! `tttoda`: command-line front end.
//!
//! Every subcommand prints one JSON document carrying `"version": "v1"`,
//! or CSV for tabular output when `--csv` is given. Exit status is 0 on
//! success, 1 on domain errors and 2 on usage errors.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use tttoda::fredholm::{self, Branch, NystromGrid};
use tttoda::region::{self, Bounds};
use tttoda::rh;
use tttoda::stokes;
use tttoda::toda::{self, InitModel, OdeConfig, Termination};
use tttoda::{AsymptoticData, Case, StokesParams};

const SCHEMA_VERSION: &str = "v1";
const IDENTITY_TOL: f64 = 1e-12;
const CONNECTION_TOL: f64 = 0.02;

#[derive(Parser, Debug)]
#[command(name = "tttoda", version, about = "Monodromy data and connection checks for the radial tt*-Toda equations")]
struct Cli {
    /// Emit CSV instead of JSON (tabular subcommands only).
    #[arg(long, global = true)]
    csv: bool,
    /// Write output to this file instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Worker threads for parallel sweeps (default: all cores).
    #[arg(long, global = true, env = "THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Constant-matrix identities and random-draw symmetry checks.
    VerifyIdentities {
        #[arg(long, default_value_t = 100)]
        draws: usize,
        #[arg(long, default_value_t = 20_261_015)]
        seed: u64,
    },
    /// Region (a) and region (b) verdicts for one parameter pair.
    Classify {
        #[command(flatten)]
        point: StokesArgs,
    },
    /// Maps asymptotic data to Stokes data, or back with `--inverse`.
    MapGamma {
        #[arg(long, default_value = "4a")]
        case: Case,
        #[arg(long, allow_hyphen_values = true, required_unless_present = "inverse")]
        gamma0: Option<f64>,
        #[arg(long, allow_hyphen_values = true, required_unless_present = "inverse")]
        gamma1: Option<f64>,
        /// Read `--s1 --s2` and return the asymptotic data.
        #[arg(long, requires_all = ["s1", "s2"], conflicts_with_all = ["gamma0", "gamma1"])]
        inverse: bool,
        #[arg(long, allow_hyphen_values = true)]
        s1: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        s2: Option<f64>,
    },
    /// Region membership on a rectangular grid.
    RegionGrid {
        #[arg(long, default_value = "4a")]
        case: Case,
        #[command(flatten)]
        bounds: BoundsArgs,
        #[arg(long, default_value_t = 0.1)]
        step: f64,
    },
    /// Integer points of region (a) with cyclotomic factorisations.
    IntegerPoints {
        #[arg(long, default_value = "4a")]
        case: Case,
        /// Search box `|s1| ≤ W` for points that satisfy the boundary inequalities but lie outside region (a).
        #[arg(long, default_value_t = 5)]
        sliver_width: i64,
    },
    /// Inward integration of the radial equation (case 4a).
    SolveOde {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        ode: OdeArgs,
    },
    /// End-to-end check: γ → s → w(x) → γ.
    ConnectionCheck {
        #[arg(long, allow_hyphen_values = true)]
        gamma0: f64,
        #[arg(long, allow_hyphen_values = true)]
        gamma1: f64,
        #[command(flatten)]
        ode: OdeArgs,
    },
    /// Fredholm-determinant values q1..q4 at one or more radii.
    Fredholm {
        #[command(flatten)]
        data: DataArgs,
        /// Radii, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "1,2")]
        t: Vec<f64>,
        #[arg(long, default_value_t = fredholm::DEFAULT_NODES)]
        nodes: usize,
        #[arg(long, value_parser = parse_branch, default_value = "I")]
        branch: Branch,
        /// Repeat on a doubled grid and report the change.
        #[arg(long)]
        refine: bool,
    },
    /// Leading-order Y(0, x) and the reconstructed w0, w1.
    RhY0 {
        #[command(flatten)]
        data: DataArgs,
        /// Radii, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "3,4,5")]
        x: Vec<f64>,
    },
    /// Radius beyond which the positivity criterion holds.
    SolvableFrom {
        #[arg(long, allow_hyphen_values = true, requires = "s2")]
        s1: Option<f64>,
        #[arg(long, allow_hyphen_values = true, requires = "s1")]
        s2: Option<f64>,
        /// Tabulate over a grid instead of a single point.
        #[arg(long, conflicts_with_all = ["s1", "s2"])]
        grid: bool,
        #[command(flatten)]
        bounds: BoundsArgs,
        #[arg(long, default_value_t = 0.5)]
        step: f64,
    },
}

#[derive(Args, Debug)]
struct StokesArgs {
    #[arg(long, default_value = "4a")]
    case: Case,
    #[arg(long, allow_hyphen_values = true)]
    s1: f64,
    #[arg(long, allow_hyphen_values = true)]
    s2: f64,
}

/// Case-4a data given either as Stokes parameters or as asymptotic data.
#[derive(Args, Debug)]
struct DataArgs {
    #[arg(long, allow_hyphen_values = true, requires = "s2", conflicts_with_all = ["gamma0", "gamma1"])]
    s1: Option<f64>,
    #[arg(long, allow_hyphen_values = true, requires = "s1")]
    s2: Option<f64>,
    #[arg(long, allow_hyphen_values = true, requires = "gamma1")]
    gamma0: Option<f64>,
    #[arg(long, allow_hyphen_values = true, requires = "gamma0")]
    gamma1: Option<f64>,
}

#[derive(Args, Debug)]
struct BoundsArgs {
    #[arg(long, allow_hyphen_values = true, default_value_t = -6.0)]
    s1_min: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 6.0)]
    s1_max: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = -9.0)]
    s2_min: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 4.0)]
    s2_max: f64,
}

#[derive(Args, Debug)]
struct OdeArgs {
    #[arg(long, default_value_t = 6.0)]
    x_start: f64,
    #[arg(long, default_value_t = 1e-3)]
    x_min: f64,
    #[arg(long, default_value_t = 1e-10)]
    rel_tol: f64,
    #[arg(long, value_parser = parse_init, default_value = "bessel")]
    init: InitModel,
}

impl OdeArgs {
    fn config(&self) -> OdeConfig {
        OdeConfig {
            x_start: self.x_start,
            x_min: self.x_min,
            rel_tol: self.rel_tol,
            init: self.init,
            ..OdeConfig::default()
        }
    }
}

impl DataArgs {
    fn stokes(&self) -> Result<StokesParams, Failure> {
        match (self.s1, self.s2, self.gamma0, self.gamma1) {
            (Some(s1), Some(s2), None, None) => Ok(StokesParams::new(s1, s2, Case::A4)),
            (None, None, Some(g0), Some(g1)) => gamma_to_stokes(Case::A4, g0, g1),
            _ => Err(Failure::Usage("give either --s1/--s2 or --gamma0/--gamma1".into())),
        }
    }
}

impl BoundsArgs {
    fn bounds(&self) -> Bounds {
        Bounds { s1_min: self.s1_min, s1_max: self.s1_max, s2_min: self.s2_min, s2_max: self.s2_max }
    }
}

fn parse_branch(s: &str) -> Result<Branch, String> {
    match s {
        "I" | "i" | "1" => Ok(Branch::I),
        "II" | "ii" | "2" => Ok(Branch::II),
        _ => Err(format!("unknown branch `{s}` (expected I or II)")),
    }
}

fn parse_init(s: &str) -> Result<InitModel, String> {
    match s {
        "bessel" => Ok(InitModel::Bessel),
        "leading-order" => Ok(InitModel::LeadingOrder),
        _ => Err(format!("unknown init model `{s}` (expected bessel or leading-order)")),
    }
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Domain(String),
}

impl From<tttoda::Error> for Failure {
    fn from(e: tttoda::Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Domain(format!("i/o error: {e}"))
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Domain(format!("csv error: {e}"))
    }
}

/// What a subcommand produced. A `failure` is reported after the payload
/// has been written, so partial results (a blown-up trajectory) survive.
struct Output {
    json: Value,
    table: Option<Table>,
    failure: Option<String>,
}

struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Output {
    fn json(command: &str, body: impl Serialize) -> Result<Self, Failure> {
        let mut v = serde_json::to_value(body).map_err(|e| Failure::Domain(e.to_string()))?;
        let obj = v.as_object_mut().expect("payloads are objects");
        obj.insert("version".into(), json!(SCHEMA_VERSION));
        obj.insert("command".into(), json!(command));
        Ok(Self { json: v, table: None, failure: None })
    }

    fn with_table(mut self, table: Table) -> Self {
        self.table = Some(table);
        self
    }

    fn failing(mut self, why: Option<String>) -> Self {
        self.failure = why;
        self
    }
}

fn gamma_to_stokes(case: Case, g0: f64, g1: f64) -> Result<StokesParams, Failure> {
    let g = AsymptoticData::new(g0, g1, case);
    if !g.in_domain() {
        return Err(Failure::Domain(format!("γ = ({g0}, {g1}) is outside the fundamental domain of case {case}")));
    }
    Ok(region::gamma_to_stokes(&g))
}

fn verify_identities(draws: usize, seed: u64) -> Result<Output, Failure> {
    let rep = stokes::identity_suite(draws, seed);
    let det_e1 = stokes::connection_matrix(4, &StokesParams::zero(Case::A4))?.determinant();
    let failures: Vec<_> = rep.failures(IDENTITY_TOL).into_iter().cloned().collect();
    let passed = failures.is_empty();
    let out = Output::json(
        "verify-identities",
        json!({
            "draws": draws,
            "seed": seed,
            "tolerance": IDENTITY_TOL,
            "checks": rep.checks.len(),
            "max_residual": rep.max_residual(),
            "det_e1": det_e1.re,
            "passed": passed,
            "failures": failures,
        }),
    )?;
    Ok(out.failing((!passed).then(|| format!("{} identity checks above {IDENTITY_TOL:e}", rep.failures(IDENTITY_TOL).len()))))
}

fn classify(p: &StokesArgs) -> Result<Output, Failure> {
    let v = region::classify(&StokesParams::new(p.s1, p.s2, p.case));
    Output::json("classify", v)
}

fn map_gamma(case: Case, gamma: (Option<f64>, Option<f64>), stokes: (Option<f64>, Option<f64>), inverse: bool) -> Result<Output, Failure> {
    let (g, s) = if inverse {
        let s = StokesParams::new(stokes.0.unwrap_or_default(), stokes.1.unwrap_or_default(), case);
        (region::stokes_to_gammas(&s)?, s)
    } else {
        let (g0, g1) = (gamma.0.unwrap_or_default(), gamma.1.unwrap_or_default());
        (AsymptoticData::new(g0, g1, case), gamma_to_stokes(case, g0, g1)?)
    };
    Output::json(
        "map-gamma",
        json!({ "case": case, "gamma0": g.gamma0, "gamma1": g.gamma1, "s1": s.s1, "s2": s.s2, "margin": g.margin() }),
    )
}

fn region_grid(case: Case, bounds: &BoundsArgs, step: f64) -> Result<Output, Failure> {
    if !(step > 0.0) {
        return Err(Failure::Usage(format!("--step must be positive, got {step}")));
    }
    let rows = region::region_grid(case, bounds.bounds(), step)?;
    let table = Table {
        header: vec!["s1", "s2", "in_a", "in_b"],
        rows: rows.iter().map(|r| vec![r.s1.to_string(), r.s2.to_string(), r.in_a.to_string(), r.in_b.to_string()]).collect(),
    };
    let n_a = rows.iter().filter(|r| r.in_a).count();
    let n_b = rows.iter().filter(|r| r.in_b).count();
    let out = Output::json("region-grid", json!({ "case": case, "step": step, "count": rows.len(), "in_a": n_a, "in_b": n_b, "rows": rows }))?;
    Ok(out.with_table(table))
}

fn integer_points(case: Case, sliver_width: i64) -> Result<Output, Failure> {
    let pts = region::integer_points(case);
    let sliver = region::inequality_only_points(case, sliver_width);
    let points: Vec<Value> = pts
        .iter()
        .map(|p| json!({ "s1": p.s1, "s2": p.s2, "factorization": p.factorization(), "sign": p.sign, "factors": p.factors, "reconstructs": p.reconstructs }))
        .collect();
    let table = Table {
        header: vec!["s1", "s2", "factorization"],
        rows: pts.iter().map(|p| vec![p.s1.to_string(), p.s2.to_string(), p.factorization()]).collect(),
    };
    let sliver: Vec<Value> = sliver.iter().map(|&(s1, s2)| json!({ "s1": s1, "s2": s2 })).collect();
    let out = Output::json("integer-points", json!({ "case": case, "count": pts.len(), "points": points, "inequality_only": sliver }))?;
    Ok(out.with_table(table))
}

fn solve_ode(data: &DataArgs, ode: &OdeArgs) -> Result<Output, Failure> {
    let s = data.stokes()?;
    let cfg = ode.config();
    let sol = toda::integrate_inward(&s, &cfg)?;
    let fit = if sol.completed() { toda::extract_gammas(&sol).ok() } else { None };
    let limits = toda::verify_limits(&sol);
    let failure = match sol.termination {
        Termination::Completed => None,
        Termination::BlowUp { x } => Some(format!("solution blows up near x = {x:.6e}")),
        Termination::StepSizeUnderflow { x } => Some(format!("step size underflow at x = {x:.6e}")),
    };
    let table = Table {
        header: vec!["x", "w0", "w1", "dw0", "dw1"],
        rows: (0..sol.len())
            .map(|i| [sol.xs[i], sol.w0[i], sol.w1[i], sol.dw0[i], sol.dw1[i]].iter().map(|v| v.to_string()).collect())
            .collect(),
    };
    let out = Output::json(
        "solve-ode",
        json!({
            "s1": s.s1,
            "s2": s.s2,
            "config": cfg,
            "termination": sol.termination,
            "stats": sol.stats,
            "fit": fit,
            "limits": limits,
            "x": sol.xs,
            "w0": sol.w0,
            "w1": sol.w1,
        }),
    )?;
    Ok(out.with_table(table).failing(failure))
}

fn connection_check(g0: f64, g1: f64, ode: &OdeArgs) -> Result<Output, Failure> {
    let g = AsymptoticData::new(g0, g1, Case::A4);
    let rep = toda::verify_connection(&g, &ode.config())?;
    let worst = rep.max_gamma_error();
    let mut out = Output::json("connection-check", &rep)?;
    let obj = out.json.as_object_mut().expect("object");
    obj.insert("max_gamma_error".into(), json!(worst));
    obj.insert("margin".into(), json!(g.margin()));
    obj.insert("within_tolerance".into(), json!(worst < CONNECTION_TOL));
    Ok(out)
}

fn fredholm_cmd(data: &DataArgs, ts: &[f64], nodes: usize, branch: Branch, refine: bool) -> Result<Output, Failure> {
    if nodes < 2 {
        return Err(Failure::Usage(format!("--nodes must be at least 2, got {nodes}")));
    }
    let s = data.stokes()?;
    let p = fredholm::c_from_stokes(&s, branch)?;
    let alpha = fredholm::alpha_from_params(&p).ok();
    let results: Vec<Value> = ts
        .iter()
        .map(|&t| {
            let r = if refine {
                fredholm::fredholm_q_refined(t, &p, nodes)?
            } else {
                fredholm::fredholm_q(t, &p, &NystromGrid::for_radius(t, nodes)?)?
            };
            Ok(json!({
                "t": r.t,
                "q1": r.q[0], "q2": r.q[1], "q3": r.q[2], "q4": r.q[3],
                "node_count": r.node_count,
                "residuals": { "max_imag": r.max_imag, "antisymmetry": r.antisymmetry, "refinement": r.refinement },
            }))
        })
        .collect::<Result<_, tttoda::Error>>()?;
    Output::json("fredholm", json!({ "s1": s.s1, "s2": s.s2, "branch": branch, "c": p.c, "alpha": alpha, "results": results }))
}

fn rh_y0(data: &DataArgs, xs: &[f64]) -> Result<Output, Failure> {
    let s = data.stokes()?;
    let rows: Vec<Value> = xs
        .iter()
        .map(|&x| {
            let y = rh::y0_leading(&s, x)?;
            let (w0, w1) = rh::w_from_y0(&y)?;
            let sym = rh::y0_symmetries(&y, &s);
            Ok(json!({
                "x": x, "a": y.a, "b": y.b, "w0": w0, "w1": w1,
                "warn_flags": { "truncation": y.warn_truncation },
                "symmetries": sym,
            }))
        })
        .collect::<Result<_, tttoda::Error>>()?;
    Output::json("rh-y0", json!({ "s1": s.s1, "s2": s.s2, "results": rows }))
}

fn solvable_from(point: Option<(f64, f64)>, bounds: &BoundsArgs, step: f64) -> Result<Output, Failure> {
    if let Some((s1, s2)) = point {
        let s = StokesParams::new(s1, s2, Case::A4);
        let threshold = rh::solvable_from(&s)?;
        let at_zero = rh::positivity_x(&s, 0.0)?;
        return Output::json(
            "solvable-from",
            json!({ "s1": s1, "s2": s2, "in_b": region::classify(&s).in_b, "threshold": threshold, "at_zero": at_zero }),
        );
    }
    if !(step > 0.0) {
        return Err(Failure::Usage(format!("--step must be positive, got {step}")));
    }
    let xs = region::grid_axis(bounds.s1_min, bounds.s1_max, step);
    let ys = region::grid_axis(bounds.s2_min, bounds.s2_max, step);
    let pts: Vec<(f64, f64)> = ys.iter().flat_map(|&b| xs.iter().map(move |&a| (a, b))).collect();
    if pts.is_empty() {
        return Err(tttoda::Error::EmptyGrid.into());
    }
    let rows: Vec<(f64, f64, Option<f64>)> = pts
        .par_iter()
        .map(|&(s1, s2)| (s1, s2, rh::solvable_from(&StokesParams::new(s1, s2, Case::A4)).ok()))
        .collect();
    let table = Table {
        header: vec!["s1", "s2", "threshold"],
        rows: rows
            .iter()
            .map(|(a, b, t)| vec![a.to_string(), b.to_string(), t.map_or_else(String::new, |t| t.to_string())])
            .collect(),
    };
    let json_rows: Vec<Value> = rows.iter().map(|(a, b, t)| json!({ "s1": a, "s2": b, "threshold": t })).collect();
    let out = Output::json("solvable-from", json!({ "step": step, "count": rows.len(), "rows": json_rows }))?;
    Ok(out.with_table(table))
}

fn dispatch(cmd: &Command) -> Result<Output, Failure> {
    match cmd {
        Command::VerifyIdentities { draws, seed } => verify_identities(*draws, *seed),
        Command::Classify { point } => classify(point),
        Command::MapGamma { case, gamma0, gamma1, inverse, s1, s2 } => {
            map_gamma(*case, (*gamma0, *gamma1), (*s1, *s2), *inverse)
        }
        Command::RegionGrid { case, bounds, step } => region_grid(*case, bounds, *step),
        Command::IntegerPoints { case, sliver_width } => integer_points(*case, *sliver_width),
        Command::SolveOde { data, ode } => solve_ode(data, ode),
        Command::ConnectionCheck { gamma0, gamma1, ode } => connection_check(*gamma0, *gamma1, ode),
        Command::Fredholm { data, t, nodes, branch, refine } => fredholm_cmd(data, t, *nodes, *branch, *refine),
        Command::RhY0 { data, x } => rh_y0(data, x),
        Command::SolvableFrom { s1, s2, grid, bounds, step } => {
            let point = s1.zip(*s2);
            if point.is_none() && !grid {
                return Err(Failure::Usage("give --s1/--s2 or --grid".into()));
            }
            solvable_from(point, bounds, *step)
        }
    }
}

fn render(out: &Output, csv: bool) -> Result<Vec<u8>, Failure> {
    if !csv {
        let mut text = serde_json::to_vec_pretty(&out.json).map_err(|e| Failure::Domain(e.to_string()))?;
        text.push(b'\n');
        return Ok(text);
    }
    let table = out.table.as_ref().ok_or_else(|| Failure::Usage("--csv is only available for tabular output".into()))?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&table.header)?;
    for row in &table.rows {
        w.write_record(row)?;
    }
    w.into_inner().map_err(|e| Failure::Domain(e.to_string()))
}

fn run(cli: &Cli) -> Result<(), Failure> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Failure::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Domain(format!("thread pool: {e}")))?;
    }
    let out = dispatch(&cli.command)?;
    let bytes = render(&out, cli.csv)?;
    match &cli.out {
        Some(path) => fs::write(path, bytes)?,
        None => io::stdout().lock().write_all(&bytes)?,
    }
    match out.failure {
        Some(why) => Err(Failure::Domain(why)),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
