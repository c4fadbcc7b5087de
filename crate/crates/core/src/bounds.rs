//! Deviation bounds between the continuous and hold-controlled systems.
//!
//! The controller gap propagates into the state through a Grönwall-type
//! estimate: with `k_f` bounding the sensitivity of the dynamics to state
//! and `k_u` its sensitivity to input, two solutions driven by controls `u`
//! and `u_D` from equal starts satisfy
//!
//! ```text
//! sup |z(t) - z_D(t)| <= e^{k_f stop_time} k_u sqrt(stop_time) ||u - u_D||_2
//! ```
//!
//! For this system `k_f = k_u = 1`, the control gap is at most one staircase
//! step `a_D T` pointwise, so the right side is at most
//! `e^{stop_time} a_D T stop_time`. The bound is deliberately crude; reports
//! expose both it and the measured deviation so the slack stays visible.

use std::io;

use crate::error::{Error, Result};
use crate::model::{ControlSignal, SystemParams};
use crate::report::fmt_sig12;
use crate::simulate::{require_same_grid, GridSpec, Trajectory};

/// Slack granted to the quadrature when comparing the numeric L2 gap against
/// its analytic overestimate.
pub const QUADRATURE_TOLERANCE: f64 = 1e-6;

/// Sensitivity constants of the dynamics: `|f(z,u) - f(z',u)| <= k_f |z - z'|`
/// and `|f(z,u) - f(z,u')| <= k_u |u - u'|` componentwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LipschitzData {
    pub state_lipschitz: f64,
    pub input_lipschitz: f64,
}

impl LipschitzData {
    /// Builds validated sensitivity constants.
    ///
    /// # Errors
    ///
    /// Returns [`Error::Domain`] unless both constants are finite and
    /// non-negative.
    pub fn new(state_lipschitz: f64, input_lipschitz: f64) -> Result<Self> {
        for (name, value) in [
            ("state", state_lipschitz),
            ("input", input_lipschitz),
        ] {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::domain(format!(
                    "{name} Lipschitz constant must be finite and non-negative, got {value}"
                )));
            }
        }
        Ok(LipschitzData {
            state_lipschitz,
            input_lipschitz,
        })
    }

    /// The stopping system's constants: the dynamics `(x, v)' = (v, u)` shift
    /// state and input changes through with unit gain, so both are 1.
    pub fn train_stopping() -> Self {
        LipschitzData {
            state_lipschitz: 1.0,
            input_lipschitz: 1.0,
        }
    }

    /// Exponent `k_f * horizon` driving the Grönwall growth factor.
    pub fn horizon_exponent(&self, horizon: f64) -> f64 {
        self.state_lipschitz * horizon
    }
}

/// Grönwall amplification of an L2 control gap into a state deviation:
/// `K2 = e^{k_f stop_time} k_u sqrt(stop_time)`.
pub fn k2_constant(lipschitz: &LipschitzData, stop_time: f64) -> f64 {
    lipschitz.horizon_exponent(stop_time).exp() * lipschitz.input_lipschitz * stop_time.sqrt()
}

/// Pointwise control gap bound: the staircase stays within one step height
/// `a_D T` of the ramp, attained one-sidedly at `t = 0` and `t = stop_time`.
pub fn staircase_gap_bound(params: &SystemParams) -> f64 {
    params.hold_rate * params.period
}

/// Analytic overestimate of the L2 control gap, `a_D T sqrt(stop_time)`:
/// the pointwise bound integrated over the horizon.
pub fn l2_control_gap_bound(params: &SystemParams) -> f64 {
    staircase_gap_bound(params) * params.stop_time.sqrt()
}

/// Explicit deviation bound in terms of problem data alone:
/// `e^{stop_time} a_D T stop_time` (Grönwall with the L2 overestimate).
pub fn gronwall_bound(params: &SystemParams) -> f64 {
    params.stop_time.exp() * staircase_gap_bound(params) * params.stop_time
}

/// Numeric `||u_a - u_b||_2` over `[0, stop_time]` by composite trapezoid
/// quadrature, with both signals evaluated under the same parameters.
///
/// # Errors
///
/// Propagates signal evaluation errors.
pub fn l2_control_gap_numeric(
    u_a: &ControlSignal,
    u_b: &ControlSignal,
    params: &SystemParams,
    grid: GridSpec,
) -> Result<f64> {
    l2_gap_between(u_a, params, u_b, params, grid)
}

/// Numeric L2 gap between signals living under possibly different parameter
/// sets that share a horizon. Quadrature segments are split at the switch
/// times of both signals so the integrand is smooth on every segment, with
/// right limits taken at segment starts.
///
/// # Errors
///
/// Returns [`Error::GridMismatch`] if the horizons differ, and propagates
/// signal evaluation errors.
pub(crate) fn l2_gap_between(
    u_a: &ControlSignal,
    params_a: &SystemParams,
    u_b: &ControlSignal,
    params_b: &SystemParams,
    grid: GridSpec,
) -> Result<f64> {
    if params_a.stop_time != params_b.stop_time {
        return Err(Error::grid_mismatch(format!(
            "signals live on different horizons: {} vs {}",
            params_a.stop_time, params_b.stop_time
        )));
    }
    let mut cuts: Vec<f64> = Vec::new();
    cuts.push(0.0);
    cuts.extend(u_a.breakpoints(params_a));
    cuts.extend(u_b.breakpoints(params_b));
    cuts.push(params_a.stop_time);
    cuts.sort_by(|a, b| a.partial_cmp(b).expect("switch times are finite"));
    cuts.dedup();

    let m = grid.substeps_per_period();
    let gap = |t: f64, right: bool| -> Result<f64> {
        let (va, vb) = if right {
            (u_a.eval_right(params_a, t)?, u_b.eval_right(params_b, t)?)
        } else {
            (u_a.eval(params_a, t)?, u_b.eval(params_b, t)?)
        };
        Ok(va - vb)
    };

    let mut total = 0.0f64;
    for w in cuts.windows(2) {
        let (start, end) = (w[0], w[1]);
        let h = (end - start) / f64::from(m);
        let mut segment = gap(start, true)?.powi(2) / 2.0;
        for i in 1..m {
            segment += gap(start + f64::from(i) * h, false)?.powi(2);
        }
        segment += gap(end, false)?.powi(2) / 2.0;
        total += segment * h;
    }
    Ok(total.sqrt())
}

/// Largest per-component deviation between two trajectories on the same
/// grid, returned as `(sup |x_a - x_b|, sup |v_a - v_b|)`.
///
/// # Errors
///
/// Returns [`Error::GridMismatch`] if the sample times differ anywhere.
pub fn linf_deviation(a: &Trajectory, b: &Trajectory) -> Result<(f64, f64)> {
    require_same_grid(a, b)?;
    let mut sup_x = 0.0f64;
    let mut sup_v = 0.0f64;
    for (sa, sb) in a.samples().iter().zip(b.samples()) {
        sup_x = sup_x.max((sa.1.position - sb.1.position).abs());
        sup_v = sup_v.max((sa.1.velocity - sb.1.velocity).abs());
    }
    Ok((sup_x, sup_v))
}

/// All bound and measurement figures for one parameter set, with a combined
/// soundness flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    /// Grönwall amplification constant `K2`.
    pub k2: f64,
    /// Quadrature value of `||u - u_D||_2`.
    pub l2_gap_numeric: f64,
    /// Analytic overestimate `a_D T sqrt(stop_time)`.
    pub l2_gap_bound: f64,
    /// Pointwise control gap bound `a_D T`.
    pub staircase_bound: f64,
    /// Explicit deviation bound `e^{stop_time} a_D T stop_time`.
    pub gronwall_bound: f64,
    /// Measured `sup |x - x_D|` over the shared grid.
    pub measured_linf_x: f64,
    /// Measured `sup |v - v_D|` over the shared grid.
    pub measured_linf_v: f64,
    /// Result of [`BoundReport::check_soundness`] at construction.
    pub sound: bool,
}

impl BoundReport {
    /// True when the measured figures sit inside the certified chain:
    /// numeric L2 within its overestimate (up to quadrature tolerance), each
    /// measured deviation within `K2 * l2_numeric`, and that product within
    /// the explicit bound (up to rounding).
    pub fn check_soundness(&self) -> bool {
        let amplified = self.k2 * self.l2_gap_numeric;
        self.l2_gap_numeric <= self.l2_gap_bound + QUADRATURE_TOLERANCE
            && self.measured_linf_x <= amplified
            && self.measured_linf_v <= amplified
            && amplified <= self.gronwall_bound * (1.0 + 1e-9) + QUADRATURE_TOLERANCE
    }

    /// Writes the flat key-value text block.
    ///
    /// # Errors
    ///
    /// Propagates I/O errors from the writer.
    pub fn write_report<W: io::Write>(&self, out: &mut W) -> io::Result<()> {
        for (key, value) in self.fields() {
            writeln!(out, "{key:<18} {value:>16.6}")?;
        }
        writeln!(out, "{:<18} {:>16}", "sound", self.sound)
    }

    /// Writes one `quantity,value` CSV row per field.
    ///
    /// # Errors
    ///
    /// Propagates I/O errors from the writer.
    pub fn write_csv<W: io::Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "quantity,value")?;
        for (key, value) in self.fields() {
            writeln!(out, "{key},{}", fmt_sig12(value))?;
        }
        writeln!(out, "sound,{}", self.sound)
    }

    fn fields(&self) -> [(&'static str, f64); 7] {
        [
            ("k2", self.k2),
            ("l2_gap_numeric", self.l2_gap_numeric),
            ("l2_gap_bound", self.l2_gap_bound),
            ("staircase_bound", self.staircase_bound),
            ("gronwall_bound", self.gronwall_bound),
            ("measured_linf_x", self.measured_linf_x),
            ("measured_linf_v", self.measured_linf_v),
        ]
    }
}

/// Assembles the full [`BoundReport`] for the canonical signal pair on the
/// trajectories' shared grid.
///
/// # Errors
///
/// Returns [`Error::GridMismatch`] if the trajectories disagree on
/// parameters or sample times.
pub fn bound_report(
    params: &SystemParams,
    continuous: &Trajectory,
    discretized: &Trajectory,
    quadrature: GridSpec,
) -> Result<BoundReport> {
    if continuous.params() != params || discretized.params() != params {
        return Err(Error::grid_mismatch(
            "trajectories were produced under different parameters",
        ));
    }
    let (measured_linf_x, measured_linf_v) = linf_deviation(continuous, discretized)?;
    let mut report = BoundReport {
        k2: k2_constant(&LipschitzData::train_stopping(), params.stop_time),
        l2_gap_numeric: l2_control_gap_numeric(
            &ControlSignal::LinearRamp,
            &ControlSignal::StaircaseZoh,
            params,
            quadrature,
        )?,
        l2_gap_bound: l2_control_gap_bound(params),
        staircase_bound: staircase_gap_bound(params),
        gronwall_bound: gronwall_bound(params),
        measured_linf_x,
        measured_linf_v,
        sound: false,
    };
    report.sound = report.check_soundness();
    Ok(report)
}
