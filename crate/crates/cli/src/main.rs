//! Command-line surface over the stopgap library: solve the stopping
//! problem, simulate trajectory pairs, evaluate deviation bounds, check the
//! retrenchment obligation, and sweep the hold-period count.
//!
//! Exit codes: 0 when every requested check passes, 1 when a proof
//! obligation or soundness check fails, 2 on usage or configuration errors.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use stopgap::po::{self, Fragment, PoResult, Verdict};
use stopgap::report::fmt_sig12;
use stopgap::simulate::{deviation_series, integrate};
use stopgap::{analytic, bounds, ControlSignal, GridSpec, SystemParams, Trajectory};

#[derive(Parser)]
#[command(
    name = "stopgap",
    version,
    about = "Continuous vs. zero-order-hold stopping control: exact gaps, bounds, and proof obligations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the closed-form solution figures for one parameter set
    Solve {
        #[command(flatten)]
        scenario: Scenario,
        #[arg(long, default_value_t = 10, help = "Number of hold periods")]
        n: u32,
        #[arg(long, value_enum, default_value_t = Format::Report, help = "Output format")]
        format: Format,
        #[arg(long, help = "Write to this file instead of standard output")]
        output: Option<PathBuf>,
    },
    /// Integrate both systems and emit the paired trajectories
    Simulate {
        #[command(flatten)]
        scenario: Scenario,
        #[arg(long, default_value_t = 10, help = "Number of hold periods")]
        n: u32,
        #[arg(long, default_value_t = 100, help = "Integration substeps per period")]
        m: u32,
        #[arg(long, value_enum, default_value_t = Format::Csv, help = "Output format")]
        format: Format,
        #[arg(long, help = "Write to this file instead of standard output")]
        output: Option<PathBuf>,
    },
    /// Evaluate deviation bounds against measured deviations
    Bound {
        #[command(flatten)]
        scenario: Scenario,
        #[arg(long, default_value_t = 10, help = "Number of hold periods")]
        n: u32,
        #[arg(long, default_value_t = 100, help = "Integration substeps per period")]
        m: u32,
        #[arg(long, value_enum, default_value_t = Format::Report, help = "Output format")]
        format: Format,
        #[arg(long, help = "Write to this file instead of standard output")]
        output: Option<PathBuf>,
    },
    /// Check the retrenchment proof obligation and the corroboration
    Check {
        #[command(flatten)]
        scenario: Scenario,
        #[arg(long, default_value_t = 10, help = "Number of hold periods")]
        n: u32,
        #[arg(long, default_value_t = 100, help = "Integration substeps per period")]
        m: u32,
        #[arg(
            long,
            help = "Override the output-relation bound (what-if and harness runs)"
        )]
        o_bound: Option<f64>,
        #[arg(long, value_enum, default_value_t = Format::Report, help = "Output format")]
        format: Format,
        #[arg(long, help = "Write to this file instead of standard output")]
        output: Option<PathBuf>,
    },
    /// Tabulate gap, bounds, and PO verdict over a range of period counts
    Sweep {
        #[command(flatten)]
        scenario: Scenario,
        #[arg(long, default_value_t = 1, help = "Smallest period count")]
        n_min: u32,
        #[arg(long, default_value_t = 64, help = "Largest period count")]
        n_max: u32,
        #[arg(long, default_value_t = 100, help = "Integration substeps per period")]
        m: u32,
        #[arg(long, value_enum, default_value_t = Format::Csv, help = "Output format")]
        format: Format,
        #[arg(long, help = "Write to this file instead of standard output")]
        output: Option<PathBuf>,
    },
}

#[derive(Args, Clone, Copy)]
struct Scenario {
    #[arg(long, default_value_t = 20.0, help = "Initial (cruise) velocity")]
    v: f64,
    #[arg(long, default_value_t = 10.0, help = "Stopping horizon in seconds")]
    t_stop: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Report,
    Csv,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 2 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

/// Dispatches one invocation; the boolean reports whether every requested
/// check passed.
fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Solve {
            scenario,
            n,
            format,
            output,
        } => {
            let params = make_params(scenario, n)?;
            let text = render_solve(&params, format)?;
            emit(&output, &text)?;
            Ok(true)
        }
        Command::Simulate {
            scenario,
            n,
            m,
            format,
            output,
        } => {
            let params = make_params(scenario, n)?;
            let (cont, zoh) = trajectory_pair(&params, m)?;
            let text = render_simulate(&params, &cont, &zoh, m, format)?;
            emit(&output, &text)?;
            Ok(true)
        }
        Command::Bound {
            scenario,
            n,
            m,
            format,
            output,
        } => {
            let params = make_params(scenario, n)?;
            let (cont, zoh) = trajectory_pair(&params, m)?;
            let report = bounds::bound_report(&params, &cont, &zoh, grid(m)?)
                .context("bound evaluation failed")?;
            let text = render_bound(&report, format)?;
            emit(&output, &text)?;
            Ok(report.sound)
        }
        Command::Check {
            scenario,
            n,
            m,
            o_bound,
            format,
            output,
        } => {
            let params = make_params(scenario, n)?;
            let (result, corroboration) = run_check(&params, m, o_bound)?;
            let text = render_check(&result, &corroboration, format)?;
            emit(&output, &text)?;
            Ok(result.verdict == Verdict::Pass && corroboration.holds)
        }
        Command::Sweep {
            scenario,
            n_min,
            n_max,
            m,
            format,
            output,
        } => {
            if n_min == 0 || n_min > n_max {
                bail!("sweep needs 1 <= n-min <= n-max, got {n_min}..{n_max}");
            }
            let (text, all_pass) = render_sweep(scenario, n_min, n_max, m, format)?;
            emit(&output, &text)?;
            Ok(all_pass)
        }
    }
}

fn make_params(scenario: Scenario, n: u32) -> Result<SystemParams> {
    SystemParams::new(scenario.v, scenario.t_stop, n).context("invalid problem parameters")
}

fn grid(m: u32) -> Result<GridSpec> {
    GridSpec::new(m).context("invalid grid resolution")
}

fn trajectory_pair(params: &SystemParams, m: u32) -> Result<(Trajectory, Trajectory)> {
    let grid = grid(m)?;
    let cont = integrate(params, &ControlSignal::LinearRamp, grid)
        .context("continuous integration failed")?;
    let zoh = integrate(params, &ControlSignal::StaircaseZoh, grid)
        .context("hold integration failed")?;
    Ok((cont, zoh))
}

fn run_check(
    params: &SystemParams,
    m: u32,
    o_bound: Option<f64>,
) -> Result<(PoResult, po::Corroboration)> {
    let (cont, zoh) = trajectory_pair(params, m)?;
    let data = match o_bound {
        Some(bound) => po::train_retrenchment_data_with_output_bound(params, bound),
        None => po::train_retrenchment_data(params),
    };
    let result = po::check_retrenchment_po(
        &Fragment::new(cont, ControlSignal::LinearRamp),
        &Fragment::new(zoh, ControlSignal::StaircaseZoh),
        &data,
    )
    .context("proof-obligation check failed")?;
    Ok((result, po::corroboration(params)))
}

fn solve_fields(params: &SystemParams) -> Result<[(&'static str, f64); 6]> {
    Ok([
        ("T", params.period),
        ("a", params.ramp_rate),
        ("a_D", params.hold_rate),
        ("D", analytic::continuous_stop_distance(params)),
        ("D_D", analytic::discrete_stop_distance(params)?),
        ("gap_exact", analytic::exact_final_gap(params)),
    ])
}

fn render_solve(params: &SystemParams, format: Format) -> Result<String> {
    let mut out = String::new();
    match format {
        Format::Report => {
            writeln!(
                out,
                "stopping problem: V={}, T_stop={}, N={}",
                params.initial_velocity, params.stop_time, params.periods
            )?;
            for (key, value) in solve_fields(params)? {
                writeln!(out, "{key:<10} {value:>14.6}")?;
            }
        }
        Format::Csv => {
            writeln!(out, "quantity,value")?;
            for (key, value) in solve_fields(params)? {
                writeln!(out, "{key},{}", fmt_sig12(value))?;
            }
        }
    }
    Ok(out)
}

fn render_simulate(
    params: &SystemParams,
    cont: &Trajectory,
    zoh: &Trajectory,
    m: u32,
    format: Format,
) -> Result<String> {
    let series = deviation_series(cont, zoh).context("trajectories diverged in shape")?;
    let mut out = String::new();
    match format {
        Format::Report => {
            writeln!(
                out,
                "simulated {} samples over [0, {}] (N={}, m={m})",
                cont.len(),
                params.stop_time,
                params.periods
            )?;
            let fc = cont.final_state();
            let fz = zoh.final_state();
            let (_, dx, dv) = series[series.len() - 1];
            writeln!(out, "final continuous state: x={:.6}, v={:.6}", fc.position, fc.velocity)?;
            writeln!(out, "final hold state:       x={:.6}, v={:.6}", fz.position, fz.velocity)?;
            writeln!(out, "final |dx|={dx:.6}, |dv|={dv:.6}")?;
        }
        Format::Csv => {
            writeln!(out, "t,x_cont,v_cont,x_zoh,v_zoh,abs_dx,abs_dv")?;
            for ((t, sc), ((_, sz), (_, dx, dv))) in cont
                .samples()
                .iter()
                .zip(zoh.samples().iter().zip(series.iter()))
            {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    fmt_sig12(*t),
                    fmt_sig12(sc.position),
                    fmt_sig12(sc.velocity),
                    fmt_sig12(sz.position),
                    fmt_sig12(sz.velocity),
                    fmt_sig12(*dx),
                    fmt_sig12(*dv)
                )?;
            }
        }
    }
    Ok(out)
}

fn render_bound(report: &bounds::BoundReport, format: Format) -> Result<String> {
    let mut buffer = Vec::new();
    match format {
        Format::Report => report.write_report(&mut buffer)?,
        Format::Csv => report.write_csv(&mut buffer)?,
    }
    Ok(String::from_utf8(buffer).expect("reports are UTF-8"))
}

fn render_check(
    result: &PoResult,
    corroboration: &po::Corroboration,
    format: Format,
) -> Result<String> {
    let mut out = String::new();
    match format {
        Format::Report => {
            let mut buffer = Vec::new();
            result.write_report(&mut buffer)?;
            out.push_str(&String::from_utf8(buffer).expect("reports are UTF-8"));
            writeln!(
                out,
                "corroboration: {} (lhs={:.6} <= rhs={:.6})",
                if corroboration.holds { "holds" } else { "FAILS" },
                corroboration.lhs,
                corroboration.rhs
            )?;
            writeln!(
                out,
                "overall: {}",
                if result.verdict == Verdict::Pass && corroboration.holds {
                    "pass"
                } else {
                    "fail"
                }
            )?;
        }
        Format::Csv => {
            writeln!(out, "check,value,bound,holds")?;
            for w in &result.witnesses {
                writeln!(
                    out,
                    "{},{},{},{}",
                    w.label,
                    fmt_sig12(w.value),
                    fmt_sig12(w.bound),
                    w.holds
                )?;
            }
            writeln!(
                out,
                "corroboration,{},{},{}",
                fmt_sig12(corroboration.lhs),
                fmt_sig12(corroboration.rhs),
                corroboration.holds
            )?;
            writeln!(out, "verdict,{},,", result.verdict)?;
        }
    }
    Ok(out)
}

fn render_sweep(
    scenario: Scenario,
    n_min: u32,
    n_max: u32,
    m: u32,
    format: Format,
) -> Result<(String, bool)> {
    let mut out = String::new();
    let mut all_pass = true;
    match format {
        Format::Report => writeln!(
            out,
            "{:>4} {:>10} {:>10} {:>14} {:>12} {:>12} {:>16}  po_verdict",
            "N", "T", "a_D", "D_D", "gap_exact", "l2_gap", "gronwall_bound"
        )?,
        Format::Csv => writeln!(out, "N,T,a_D,D_D,gap_exact,l2_gap,gronwall_bound,po_verdict")?,
    }
    for n in n_min..=n_max {
        let params = make_params(scenario, n)?;
        let d_d = analytic::discrete_stop_distance(&params)?;
        let gap = analytic::exact_final_gap(&params);
        let l2 = bounds::l2_control_gap_numeric(
            &ControlSignal::LinearRamp,
            &ControlSignal::StaircaseZoh,
            &params,
            grid(m)?,
        )
        .context("quadrature failed")?;
        let gronwall = bounds::gronwall_bound(&params);
        let (result, corroboration) = run_check(&params, m, None)?;
        all_pass &= result.verdict == Verdict::Pass && corroboration.holds;
        match format {
            Format::Report => writeln!(
                out,
                "{n:>4} {:>10.4} {:>10.6} {d_d:>14.6} {gap:>12.6} {l2:>12.6} {gronwall:>16.4}  {}",
                params.period, params.hold_rate, result.verdict
            )?,
            Format::Csv => writeln!(
                out,
                "{n},{},{},{},{},{},{},{}",
                fmt_sig12(params.period),
                fmt_sig12(params.hold_rate),
                fmt_sig12(d_d),
                fmt_sig12(gap),
                fmt_sig12(l2),
                fmt_sig12(gronwall),
                result.verdict
            )?,
        }
    }
    Ok((out, all_pass))
}

fn emit(target: &Option<PathBuf>, text: &str) -> Result<()> {
    match target {
        Some(path) => std::fs::write(path, text)
            .with_context(|| format!("cannot write {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
