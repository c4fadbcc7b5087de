//! Fixed-step Runge-Kutta integration of the stopping dynamics.
//!
//! The sample grid is built per hold period so that every control switch is a
//! grid node and no stage evaluation straddles a discontinuity. Stages
//! anchored at a period start use the right limit of the control, matching
//! the convention that a hold value applies from its switch time onwards.
//!
//! For this system the control is at most linear in `t` between switches, so
//! classical fourth-order steps reproduce the piecewise-polynomial solution
//! exactly; integration error is rounding only.

use std::io;

use crate::error::{Error, Result};
use crate::model::{ControlSignal, State, SystemParams};

/// Resolution of the integration grid: substeps per hold period.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    substeps_per_period: u32,
}

impl GridSpec {
    /// Builds a grid resolution.
    ///
    /// # Errors
    ///
    /// Returns [`Error::Domain`] if `substeps_per_period` is zero.
    pub fn new(substeps_per_period: u32) -> Result<Self> {
        if substeps_per_period == 0 {
            return Err(Error::domain("grid needs at least one substep per period"));
        }
        Ok(GridSpec {
            substeps_per_period,
        })
    }

    pub fn substeps_per_period(&self) -> u32 {
        self.substeps_per_period
    }
}

/// A sampled trajectory: strictly increasing times from 0 to `stop_time` with
/// the integrated state at each node.
#[derive(Debug, Clone)]
pub struct Trajectory {
    params: SystemParams,
    substeps_per_period: u32,
    samples: Vec<(f64, State)>,
}

impl Trajectory {
    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    pub fn substeps_per_period(&self) -> u32 {
        self.substeps_per_period
    }

    pub fn samples(&self) -> &[(f64, State)] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// State at `t = 0`.
    pub fn initial_state(&self) -> State {
        self.samples[0].1
    }

    /// State at the final node, `t = stop_time`.
    pub fn final_state(&self) -> State {
        self.samples[self.samples.len() - 1].1
    }

    /// Writes `t,x,v` rows (with header) in deterministic decimal form.
    ///
    /// # Errors
    ///
    /// Propagates I/O errors from the writer.
    pub fn write_csv<W: io::Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "t,x,v")?;
        for (t, s) in &self.samples {
            writeln!(
                out,
                "{},{},{}",
                crate::report::fmt_sig12(*t),
                crate::report::fmt_sig12(s.position),
                crate::report::fmt_sig12(s.velocity)
            )?;
        }
        Ok(())
    }
}

/// Grid nodes for `params` at the given resolution: for each period the
/// start plus `m - 1` interior nodes, closing exactly on the period end, and
/// the final node pinned to `stop_time` itself.
fn aligned_times(params: &SystemParams, grid: GridSpec) -> Vec<f64> {
    let m = grid.substeps_per_period();
    let n = params.periods;
    let mut times = Vec::with_capacity(n as usize * m as usize + 1);
    times.push(0.0);
    let h = params.period / f64::from(m);
    for k in 1..=n {
        let start = f64::from(k - 1) * params.period;
        for i in 1..m {
            times.push(start + f64::from(i) * h);
        }
        // Pin period ends to their closed form so switches are hit exactly.
        times.push(if k == n {
            params.stop_time
        } else {
            f64::from(k) * params.period
        });
    }
    debug_assert!(times.windows(2).all(|w| w[0] < w[1]));
    times
}

/// One classical fourth-order step for `x' = v`, `v' = u(t)` with the control
/// pre-sampled at the three stage times `t0`, `t0 + h/2`, `t1`.
fn rk4_step(state: State, h: f64, u_start: f64, u_mid: f64, u_end: f64) -> State {
    let k1x = state.velocity;
    let k2x = state.velocity + 0.5 * h * u_start;
    let k3x = state.velocity + 0.5 * h * u_mid;
    let k4x = state.velocity + h * u_mid;
    State::new(
        state.position + h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x),
        state.velocity + h / 6.0 * (u_start + 4.0 * u_mid + u_end),
    )
}

fn integrate_times(
    params: &SystemParams,
    signal: &ControlSignal,
    times: &[f64],
) -> Result<Vec<(f64, State)>> {
    let mut state = State::new(0.0, params.initial_velocity);
    let mut samples = Vec::with_capacity(times.len());
    samples.push((times[0], state));
    for w in times.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        let h = t1 - t0;
        // Right limit at the step start: a switch at t0 belongs to this step.
        let u_start = signal.eval_right(params, t0)?;
        let u_mid = signal.eval(params, t0 + 0.5 * h)?;
        let u_end = signal.eval(params, t1)?;
        state = rk4_step(state, h, u_start, u_mid, u_end);
        if !state.is_finite() {
            return Err(Error::NumericBlowup {
                time: t1,
                detail: format!(
                    "state ({}, {}) after step from t = {t0}",
                    state.position, state.velocity
                ),
            });
        }
        samples.push((t1, state));
    }
    Ok(samples)
}

/// Integrates the system under `signal` on the switch-aligned grid.
///
/// # Errors
///
/// Returns [`Error::NumericBlowup`] if a state component leaves the finite
/// range, or any evaluation error from the signal.
pub fn integrate(
    params: &SystemParams,
    signal: &ControlSignal,
    grid: GridSpec,
) -> Result<Trajectory> {
    let times = aligned_times(params, grid);
    let samples = integrate_times(params, signal, &times)?;
    Ok(Trajectory {
        params: *params,
        substeps_per_period: grid.substeps_per_period(),
        samples,
    })
}

/// Checks that two trajectories share their sample times exactly.
pub(crate) fn require_same_grid(a: &Trajectory, b: &Trajectory) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::grid_mismatch(format!(
            "sample counts differ: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    for (sa, sb) in a.samples().iter().zip(b.samples()) {
        if sa.0 != sb.0 {
            return Err(Error::grid_mismatch(format!(
                "sample times differ: {} vs {}",
                sa.0, sb.0
            )));
        }
    }
    Ok(())
}

/// Pointwise deviation between two trajectories on the same grid:
/// `(t, |x_a - x_b|, |v_a - v_b|)` per sample.
///
/// # Errors
///
/// Returns [`Error::GridMismatch`] if the sample times differ anywhere.
pub fn deviation_series(a: &Trajectory, b: &Trajectory) -> Result<Vec<(f64, f64, f64)>> {
    require_same_grid(a, b)?;
    Ok(a.samples()
        .iter()
        .zip(b.samples())
        .map(|(sa, sb)| {
            (
                sa.0,
                (sa.1.position - sb.1.position).abs(),
                (sa.1.velocity - sb.1.velocity).abs(),
            )
        })
        .collect())
}

/// Test-only reference: integrate on a uniform grid that ignores hold
/// switches, returning just the final state. Used to demonstrate why the
/// aligned grid matters.
#[cfg(test)]
pub(crate) fn integrate_unaligned_final(
    params: &SystemParams,
    signal: &ControlSignal,
    steps: u32,
) -> Result<State> {
    let h = params.stop_time / f64::from(steps);
    let times: Vec<f64> = (0..=steps)
        .map(|i| {
            if i == steps {
                params.stop_time
            } else {
                f64::from(i) * h
            }
        })
        .collect();
    Ok(integrate_times(params, signal, &times)?
        .last()
        .expect("grid is non-empty")
        .1)
}
