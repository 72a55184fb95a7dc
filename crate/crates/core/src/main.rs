use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use nilflow::config::{ATOL, RTOL};
use nilflow::curvature::{closedness_residual, generalized_ricci_plus, h_circ_h, rc_metric};
use nilflow::dorfman::DorfmanBracket;
use nilflow::flows::{integrate_gbf, integrate_grf, tmin_sweep, Controls, PhiSpec, Trajectory};
use nilflow::io::{
    emit_phase_svg, emit_trajectory_csv, format_float, load_problem, trajectory_csv,
};
use nilflow::soliton::soliton_fit;
use nilflow::{Error, KForm, Orientation};

/// Generalized Ricci flow, bracket flows and solitons on nilpotent Lie algebras.
///
/// Inputs are JSON files or built-in fixtures: `heisenberg3`,
/// `heisenberg3+H(a)`, `abelian(n)`, `nonclosed4`.
#[derive(Parser)]
#[command(name = "nilflow", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Report Jacobi, nilpotency and closedness (and Dorfman) residuals.
    Check(CheckArgs),
    /// Ricci tensor, H∘H and generalized Ricci tensor of the input data.
    Ricci(InputArgs),
    /// Least-squares generalized Ricci soliton fit.
    SolitonFit(InputArgs),
    /// Generalized bracket flow of (mu, H).
    BracketFlow(FlowArgs),
    /// Gauge-fixed generalized Ricci flow of (g, H).
    Grf(FlowArgs),
    /// Heisenberg T_min(a) sweep.
    TminSweep(SweepArgs),
}

#[derive(Args)]
struct CheckArgs {
    /// Problem file or fixture name.
    #[arg(long, required_unless_present = "dorfman", conflicts_with = "dorfman")]
    input: Option<String>,
    /// Problem file or fixture name; also reports Dorfman bracket residuals.
    #[arg(long)]
    dorfman: Option<String>,
}

#[derive(Args)]
struct InputArgs {
    #[arg(long)]
    input: String,
    /// Orientation sign relative to e_1 ∧ ... ∧ e_n.
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    orientation: i32,
}

#[derive(Clone, Copy, ValueEnum)]
enum PhiArg {
    Ric,
    #[value(name = "ric-h2")]
    RicH2,
}

#[derive(Args)]
struct FlowArgs {
    #[arg(long)]
    input: String,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    t_start: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    t_end: f64,
    #[arg(long, default_value_t = RTOL)]
    rtol: f64,
    #[arg(long, default_value_t = ATOL)]
    atol: f64,
    /// Choice of φ for bracket flows.
    #[arg(long, value_enum, default_value = "ric-h2")]
    phi: PhiArg,
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    orientation: i32,
    /// Trajectory CSV; printed to standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Phase portrait SVG.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Horizontal SVG column (`t` for time).
    #[arg(long)]
    x_col: Option<String>,
    /// Vertical SVG column.
    #[arg(long)]
    y_col: Option<String>,
}

#[derive(Args)]
struct SweepArgs {
    /// Comma-separated values of a.
    #[arg(
        long,
        value_delimiter = ',',
        allow_negative_numbers = true,
        default_value = "0,0.25,0.5,1,2,4"
    )]
    a_values: Vec<f64>,
    #[arg(long, default_value_t = RTOL)]
    rtol: f64,
    #[arg(long, default_value_t = ATOL)]
    atol: f64,
    /// CSV output; JSON rows are printed to standard output otherwise.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure with its process exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_io() {
            4
        } else if e.is_numerical() {
            3
        } else {
            2
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

fn orientation(sign: i32) -> Result<Orientation, Failure> {
    match sign {
        1 => Ok(Orientation::Positive),
        -1 => Ok(Orientation::Negative),
        _ => Err(invalid("orientation must be 1 or -1")),
    }
}

fn controls(rtol: f64, atol: f64) -> Result<Controls, Failure> {
    let c = Controls {
        rtol,
        atol,
        ..Controls::default()
    };
    c.validate()?;
    Ok(c)
}

fn matrix_json(m: &nalgebra::DMatrix<f64>) -> Value {
    json!((0..m.nrows())
        .map(|i| m.row(i).iter().copied().collect::<Vec<_>>())
        .collect::<Vec<_>>())
}

fn form_json(w: &KForm) -> Value {
    json!(w
        .iter()
        .filter(|(_, c)| *c != 0.0)
        .map(|(idx, c)| {
            let mut entry: Vec<Value> = idx.iter().map(|i| json!(i + 1)).collect();
            entry.push(json!(c));
            Value::Array(entry)
        })
        .collect::<Vec<_>>())
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn check(args: CheckArgs) -> Result<(), Failure> {
    let dorfman = args.dorfman.is_some();
    let spec = args
        .dorfman
        .or(args.input)
        .expect("clap enforces one input");
    let p = load_problem(&spec)?;
    let jacobi = p.mu.jacobi_residual();
    let tol = nilflow::config::ZERO_TOL;
    let is_lie = jacobi <= tol;
    let step = if is_lie {
        p.mu.nilpotency_step()?
    } else {
        None
    };
    let h = p.h_or_zero();
    let closed = closedness_residual(&p.mu, &h)?;
    let mut report = json!({
        "input": p.name,
        "dim": p.dim(),
        "jacobi_residual": jacobi,
        "is_lie": is_lie,
        "nilpotency_step": step,
        "closedness_residual": closed,
        "is_closed": closed <= tol,
    });
    if dorfman {
        let b = DorfmanBracket::new_unchecked(p.mu.clone(), h)?;
        report["dorfman_jacobi_residual"] = json!(b.jacobi_residual());
        report["dorfman_total_skew_residual"] = json!(b.total_skew_residual());
    }
    print_json(&report);
    if is_lie && closed <= tol {
        Ok(())
    } else {
        Err(invalid("input is not a Lie bracket with closed H"))
    }
}

fn ricci(args: InputArgs) -> Result<(), Failure> {
    let p = load_problem(&args.input)?;
    let o = orientation(args.orientation)?;
    let g = p.metric_or_identity();
    let h = p.h_or_zero();
    let theta = p.theta_or_zero();
    let rc = rc_metric(&p.mu, &g)?;
    let hh = h_circ_h(&g, &h)?;
    let plus = generalized_ricci_plus(&p.mu, &g, o, &h, &theta)?;
    print_json(&json!({
        "rc": matrix_json(rc.matrix()),
        "h_circ_h": matrix_json(hh.matrix()),
        "rc_plus": matrix_json(plus.matrix()),
        "rc_plus_symmetric": matrix_json(&plus.symmetric()),
        "rc_plus_skew": matrix_json(&plus.skew()),
    }));
    Ok(())
}

fn soliton(args: InputArgs) -> Result<(), Failure> {
    let p = load_problem(&args.input)?;
    let o = orientation(args.orientation)?;
    let fit = soliton_fit(
        &p.mu,
        &p.metric_or_identity(),
        o,
        &p.h_or_zero(),
        &p.theta_or_zero(),
    )?;
    print_json(&json!({
        "lambda": fit.lambda,
        "D": matrix_json(fit.d.matrix()),
        "omega": form_json(&fit.omega),
        "sym_residual": fit.sym_residual,
        "skew_residual": fit.skew_residual,
        "residual_norm": fit.residual_norm,
        "is_soliton": fit.is_soliton,
    }));
    Ok(())
}

fn write_outputs(traj: &Trajectory, args: &FlowArgs, x: &str, y: &str) -> Result<(), Failure> {
    match &args.out {
        Some(path) => emit_trajectory_csv(traj, path)?,
        None => print!("{}", trajectory_csv(traj)?),
    }
    if let Some(path) = &args.svg {
        let x = args.x_col.as_deref().unwrap_or(x);
        let y = args.y_col.as_deref().unwrap_or(y);
        emit_phase_svg(traj, x, y, path)?;
    }
    if args.out.is_some() {
        let last = traj.states.last().expect("nonempty");
        let summary: serde_json::Map<String, Value> = traj
            .labels
            .iter()
            .zip(last)
            .map(|(l, v)| (l.clone(), json!(v)))
            .collect();
        print_json(&json!({
            "t_end": traj.times.last(),
            "accepted_steps": traj.stats.accepted,
            "rejected_steps": traj.stats.rejected,
            "final_state": summary,
        }));
    }
    Ok(())
}

fn default_columns<'a>(traj: &'a Trajectory, x: &'a str, y: &'a str) -> (&'a str, &'a str) {
    if traj.column_index(x).is_some() && traj.column_index(y).is_some() {
        (x, y)
    } else {
        ("t", traj.labels.first().map(String::as_str).unwrap_or("t"))
    }
}

fn flow_window(args: &FlowArgs) -> Result<(), Failure> {
    if args.t_end.partial_cmp(&args.t_start) != Some(std::cmp::Ordering::Greater) {
        return Err(invalid("--t-end must exceed --t-start"));
    }
    Ok(())
}

fn bracket_flow(args: FlowArgs) -> Result<(), Failure> {
    flow_window(&args)?;
    let p = load_problem(&args.input)?;
    let c = controls(args.rtol, args.atol)?;
    let spec = match args.phi {
        PhiArg::Ric => PhiSpec::Ric,
        PhiArg::RicH2 => PhiSpec::RicMinusQuarterHsq,
    };
    let traj = integrate_gbf(spec, &p.mu, &p.h_or_zero(), args.t_start, args.t_end, &c)?;
    let (x, y) = default_columns(&traj, "mu_12_3", "H_123");
    write_outputs(&traj, &args, x, y)
}

fn grf(args: FlowArgs) -> Result<(), Failure> {
    flow_window(&args)?;
    let p = load_problem(&args.input)?;
    let o = orientation(args.orientation)?;
    let c = controls(args.rtol, args.atol)?;
    let traj = integrate_grf(
        &p.mu,
        &p.metric_or_identity(),
        &p.h_or_zero(),
        o,
        args.t_start,
        args.t_end,
        &c,
    )?;
    let (x, y) = default_columns(&traj, "g_1", "g_3");
    write_outputs(&traj, &args, x, y)
}

fn sweep(args: SweepArgs) -> Result<(), Failure> {
    if args.a_values.iter().any(|a| !a.is_finite()) {
        return Err(invalid("a values must be finite"));
    }
    let c = controls(args.rtol, args.atol)?;
    let rows = tmin_sweep(&args.a_values, &c);
    match &args.out {
        Some(path) => {
            let opt = |v: Option<f64>| v.map(format_float).unwrap_or_default();
            let mut text = String::from("a,t_min,g1_end,g3_limit,error\n");
            for r in &rows {
                text.push_str(&format!(
                    "{},{},{},{},{}\n",
                    format_float(r.a),
                    opt(r.t_min),
                    opt(r.g1_end),
                    opt(r.g3_limit),
                    r.error.as_deref().unwrap_or("").replace(',', ";")
                ));
            }
            std::fs::write(path, text).map_err(|source| Error::Io {
                path: path.clone(),
                source,
            })?;
        }
        None => {
            let out: Vec<Value> = rows
                .iter()
                .map(|r| {
                    json!({
                        "a": r.a,
                        "t_min": r.t_min,
                        "g1_end": r.g1_end,
                        "g3_limit": r.g3_limit,
                        "error": r.error,
                    })
                })
                .collect();
            print_json(&Value::Array(out));
        }
    }
    if rows.iter().any(|r| r.error.is_some()) {
        return Err(Failure {
            code: 3,
            message: "some sweep rows failed".into(),
        });
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Check(a) => check(a),
        Command::Ricci(a) => ricci(a),
        Command::SolitonFit(a) => soliton(a),
        Command::BracketFlow(a) => bracket_flow(a),
        Command::Grf(a) => grf(a),
        Command::TminSweep(a) => sweep(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("nilflow: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
