//! Problem data, state, and control signals for the stopping system.
//!
//! A point mass starts at position 0 with cruise velocity `V` and must be at
//! rest after `stop_time` seconds. The dynamics are the double integrator
//! `x' = v`, `v' = u`. Two canonical controllers are modelled:
//!
//! * a continuous deceleration ramp `u(t) = -a t`, and
//! * its zero-order-hold counterpart, which splits `[0, stop_time]` into `N`
//!   equal periods of length `T` and holds the constant value `-k a_D T`
//!   during period `k`.
//!
//! The rates `a` and `a_D` are chosen so that each controller independently
//! reaches `v = 0` exactly at `stop_time`:
//!
//! ```text
//! a   = 2 V / stop_time^2
//! a_D = 2 V / (stop_time^2 (1 + 1/N))
//! ```
//!
//! Staircase signals are left-continuous at period boundaries: at `t = k T`
//! the value of period `k` still applies, and the value of period `k + 1`
//! starts immediately after. Right limits at period starts are provided for
//! integration stages that must not sample across a hold switch.

use crate::error::{Error, Result};

/// Relative slack for recognising a time as an exact period multiple despite
/// rounding accumulated while building sample grids.
const SNAP_REL: f64 = 32.0 * f64::EPSILON;

/// Fixed data of one stopping problem instance.
///
/// Constructed via [`SystemParams::new`]; all derived fields are computed
/// there and kept consistent by making the struct read-only in spirit (fields
/// are public for ergonomic access, construction validates).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Cruise velocity at the start of the stopping episode, `V > 0`.
    pub initial_velocity: f64,
    /// Total stopping horizon, `stop_time > 0`.
    pub stop_time: f64,
    /// Number of hold periods, `N >= 1`.
    pub periods: u32,
    /// Hold period length `T = stop_time / N`.
    pub period: f64,
    /// Slope of the continuous ramp, `u(t) = -ramp_rate * t`.
    pub ramp_rate: f64,
    /// Step coefficient of the staircase, `u_D(t) = -k * hold_rate * period`.
    pub hold_rate: f64,
}

impl SystemParams {
    /// Builds a parameter set from the three free quantities.
    ///
    /// # Errors
    ///
    /// Returns [`Error::Domain`] if `initial_velocity` or `stop_time` is not
    /// finite and positive, or if `periods == 0`.
    pub fn new(initial_velocity: f64, stop_time: f64, periods: u32) -> Result<Self> {
        if !(initial_velocity.is_finite() && initial_velocity > 0.0) {
            return Err(Error::domain(format!(
                "initial velocity must be finite and positive, got {initial_velocity}"
            )));
        }
        if !(stop_time.is_finite() && stop_time > 0.0) {
            return Err(Error::domain(format!(
                "stop time must be finite and positive, got {stop_time}"
            )));
        }
        if periods == 0 {
            return Err(Error::domain("period count must be at least 1"));
        }
        let n = f64::from(periods);
        let ramp_rate = 2.0 * initial_velocity / (stop_time * stop_time);
        Ok(SystemParams {
            initial_velocity,
            stop_time,
            periods,
            period: stop_time / n,
            ramp_rate,
            hold_rate: ramp_rate / (1.0 + 1.0 / n),
        })
    }

    /// Validates `t` against `[0, stop_time]` (with relative slack for
    /// rounding) and returns it clamped onto the closed interval.
    pub(crate) fn check_time_domain(&self, t: f64) -> Result<f64> {
        if !t.is_finite() {
            return Err(Error::domain(format!("time must be finite, got {t}")));
        }
        let slack = SNAP_REL * self.stop_time.max(1.0);
        if t < -slack || t > self.stop_time + slack {
            return Err(Error::domain(format!(
                "time {t} outside [0, {}]",
                self.stop_time
            )));
        }
        Ok(t.clamp(0.0, self.stop_time))
    }

    /// Index `k` of the hold period containing `t`, counted from 1.
    ///
    /// Left-continuous convention: period ends belong to the period they
    /// close, so `t = k * period` maps to `k`. The left endpoint `t = 0` has
    /// no period before it and maps to 1. Times that are an exact period
    /// multiple up to rounding are snapped before classification.
    ///
    /// # Errors
    ///
    /// Returns [`Error::Domain`] if `t` is outside `[0, stop_time]`.
    pub fn period_index(&self, t: f64) -> Result<u32> {
        self.classify(t, false)
    }

    /// Like [`SystemParams::period_index`] but with the right-limit
    /// convention: a period multiple `k * period` maps to `k + 1`, the period
    /// it opens. Used for integration stages anchored at period starts.
    pub(crate) fn period_index_right(&self, t: f64) -> Result<u32> {
        self.classify(t, true)
    }

    fn classify(&self, t: f64, right_limit: bool) -> Result<u32> {
        let t = self.check_time_domain(t)?;
        let q = t / self.period;
        let nearest = q.round();
        let k = if (q - nearest).abs() <= SNAP_REL * nearest.max(1.0) {
            // `t` is a period multiple up to rounding.
            if right_limit {
                nearest as i64 + 1
            } else {
                nearest as i64
            }
        } else {
            q.ceil() as i64
        };
        Ok(k.clamp(1, i64::from(self.periods)) as u32)
    }

    /// Elapsed time inside the period containing `t`: `t - (k - 1) * period`
    /// with `k` from [`SystemParams::period_index`]. Lies in `[0, period]`,
    /// reaching `period` (not 0) at period ends by left continuity.
    ///
    /// # Errors
    ///
    /// Returns [`Error::Domain`] if `t` is outside `[0, stop_time]`.
    pub fn offset_in_period(&self, t: f64) -> Result<f64> {
        let t = self.check_time_domain(t)?;
        let k = self.period_index(t)?;
        // Clamping absorbs rounding at period ends without changing exact cases.
        Ok((t - f64::from(k - 1) * self.period).clamp(0.0, self.period))
    }
}

/// Kinematic state of the mass: position and velocity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct State {
    pub position: f64,
    pub velocity: f64,
}

impl State {
    pub fn new(position: f64, velocity: f64) -> Self {
        State { position, velocity }
    }

    /// True when both components are finite.
    pub fn is_finite(&self) -> bool {
        self.position.is_finite() && self.velocity.is_finite()
    }
}

/// A control signal `u(t)` on `[0, stop_time]`.
#[derive(Debug, Clone, PartialEq)]
pub enum ControlSignal {
    /// Continuous deceleration ramp `u(t) = -ramp_rate * t`.
    LinearRamp,
    /// Zero-order-hold staircase `u(t) = -k * hold_rate * period` on period `k`.
    StaircaseZoh,
    /// Piecewise-constant table: `values[i]` holds on `(times[i], times[i+1]]`
    /// (left-continuous, like the staircase), and the last value holds up to
    /// the end of the horizon.
    Tabulated { times: Vec<f64>, values: Vec<f64> },
}

impl ControlSignal {
    /// Builds a validated [`ControlSignal::Tabulated`] signal.
    ///
    /// # Errors
    ///
    /// Returns [`Error::Domain`] unless `times` and `values` are non-empty,
    /// of equal length, finite, and `times` starts at 0 and strictly
    /// increases.
    pub fn tabulated(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.is_empty() || times.len() != values.len() {
            return Err(Error::domain(format!(
                "tabulated signal needs equally many times and values, got {} and {}",
                times.len(),
                values.len()
            )));
        }
        if times[0] != 0.0 {
            return Err(Error::domain("tabulated signal must start at t = 0"));
        }
        if !times.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::domain("tabulated times must strictly increase"));
        }
        if times.iter().chain(values.iter()).any(|x| !x.is_finite()) {
            return Err(Error::domain("tabulated entries must be finite"));
        }
        Ok(ControlSignal::Tabulated { times, values })
    }

    /// Evaluates the signal at `t`, left-continuously at switch times.
    ///
    /// # Errors
    ///
    /// Returns [`Error::Domain`] if `t` is outside `[0, params.stop_time]`.
    pub fn eval(&self, params: &SystemParams, t: f64) -> Result<f64> {
        match self {
            ControlSignal::LinearRamp => {
                let t = params.check_time_domain(t)?;
                Ok(-params.ramp_rate * t)
            }
            ControlSignal::StaircaseZoh => {
                let k = params.period_index(t)?;
                Ok(-f64::from(k) * params.hold_rate * params.period)
            }
            ControlSignal::Tabulated { times, values } => {
                let t = params.check_time_domain(t)?;
                // Left-continuous: the segment starting at `times[i]` owns
                // `(times[i], times[i+1]]`, so pick the last start strictly
                // below `t`; `t = 0` falls to the first segment.
                let idx = times.partition_point(|&s| s < t).saturating_sub(1);
                Ok(values[idx])
            }
        }
    }

    /// Evaluates the right limit `u(t+)`, differing from [`eval`] only at
    /// switch times, where the next segment's value is returned. At the final
    /// time there is no later segment and the left value is kept.
    ///
    /// [`eval`]: ControlSignal::eval
    pub(crate) fn eval_right(&self, params: &SystemParams, t: f64) -> Result<f64> {
        match self {
            ControlSignal::LinearRamp => self.eval(params, t),
            ControlSignal::StaircaseZoh => {
                let k = params.period_index_right(t)?;
                Ok(-f64::from(k) * params.hold_rate * params.period)
            }
            ControlSignal::Tabulated { times, values } => {
                let t = params.check_time_domain(t)?;
                let idx = times.partition_point(|&s| s <= t).saturating_sub(1);
                Ok(values[idx])
            }
        }
    }

    /// Interior switch times of the signal, strictly inside `(0, stop_time)`
    /// for the built-in signals. The ramp has none.
    pub fn breakpoints(&self, params: &SystemParams) -> Vec<f64> {
        match self {
            ControlSignal::LinearRamp => Vec::new(),
            ControlSignal::StaircaseZoh => (1..params.periods)
                .map(|k| f64::from(k) * params.period)
                .collect(),
            ControlSignal::Tabulated { times, .. } => times[1..].to_vec(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn canonical() -> SystemParams {
        SystemParams::new(20.0, 10.0, 10).unwrap()
    }

    #[test]
    fn params_derive_rates_and_period() {
        let p = canonical();
        assert_eq!(p.period, 1.0);
        assert!((p.ramp_rate - 0.4).abs() < 1e-15);
        assert!((p.hold_rate - 4.0 / 11.0).abs() < 1e-15);
    }

    #[test]
    fn params_reject_bad_inputs() {
        assert!(matches!(
            SystemParams::new(0.0, 10.0, 10),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            SystemParams::new(20.0, -1.0, 10),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            SystemParams::new(20.0, 10.0, 0),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            SystemParams::new(f64::NAN, 10.0, 10),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn period_index_is_left_continuous() {
        let p = canonical();
        assert_eq!(p.period_index(0.0).unwrap(), 1);
        assert_eq!(p.period_index(0.5).unwrap(), 1);
        assert_eq!(p.period_index(1.0).unwrap(), 1);
        assert_eq!(p.period_index(1.0 + 1e-9).unwrap(), 2);
        assert_eq!(p.period_index(3.0).unwrap(), 3);
        assert_eq!(p.period_index(10.0).unwrap(), 10);
        assert!(p.period_index(10.5).is_err());
        assert!(p.period_index(-0.5).is_err());
    }

    #[test]
    fn period_index_snaps_rounded_multiples() {
        // 0.1 is inexact in binary; 3 * 0.1 rounds above 0.3 and a naive
        // ceil(t / T) would land in period 4.
        let p = SystemParams::new(5.0, 1.0, 10).unwrap();
        let t = 3.0 * p.period;
        assert!(t > 0.3);
        assert_eq!(p.period_index(t).unwrap(), 3);
        assert_eq!(p.period_index_right(t).unwrap(), 4);
    }

    #[test]
    fn right_limit_index_opens_next_period() {
        let p = canonical();
        assert_eq!(p.period_index_right(0.0).unwrap(), 1);
        assert_eq!(p.period_index_right(0.5).unwrap(), 1);
        assert_eq!(p.period_index_right(1.0).unwrap(), 2);
        // Degenerate at the horizon end: clamped to the last period.
        assert_eq!(p.period_index_right(10.0).unwrap(), 10);
    }

    #[test]
    fn offset_tracks_position_inside_period() {
        let p = canonical();
        assert_eq!(p.offset_in_period(0.0).unwrap(), 0.0);
        assert!((p.offset_in_period(2.25).unwrap() - 0.25).abs() < 1e-12);
        // Period ends report a full period, not zero.
        assert_eq!(p.offset_in_period(3.0).unwrap(), 1.0);
        assert_eq!(p.offset_in_period(10.0).unwrap(), 1.0);
    }

    #[test]
    fn ramp_values() {
        let p = canonical();
        let u = ControlSignal::LinearRamp;
        assert_eq!(u.eval(&p, 0.0).unwrap(), 0.0);
        assert!((u.eval(&p, 5.0).unwrap() + 2.0).abs() < 1e-15);
        assert!((u.eval(&p, 10.0).unwrap() + 4.0).abs() < 1e-15);
    }

    #[test]
    fn staircase_values_and_one_sided_limits() {
        let p = canonical();
        let u = ControlSignal::StaircaseZoh;
        let step = p.hold_rate * p.period;
        // First step applies from t = 0 onwards (right limit at 0).
        assert!((u.eval(&p, 0.0).unwrap() + step).abs() < 1e-15);
        assert!((u.eval(&p, 0.5).unwrap() + step).abs() < 1e-15);
        // Left-continuous at the switch, next step just after.
        assert!((u.eval(&p, 1.0).unwrap() + step).abs() < 1e-15);
        assert!((u.eval_right(&p, 1.0).unwrap() + 2.0 * step).abs() < 1e-15);
        assert!((u.eval(&p, 10.0).unwrap() + 10.0 * step).abs() < 1e-14);
    }

    #[test]
    fn tabulated_validation_and_lookup() {
        let p = canonical();
        let u = ControlSignal::tabulated(vec![0.0, 2.0, 7.0], vec![1.0, -1.0, 0.5]).unwrap();
        assert_eq!(u.eval(&p, 0.0).unwrap(), 1.0);
        assert_eq!(u.eval(&p, 2.0).unwrap(), 1.0);
        assert_eq!(u.eval_right(&p, 2.0).unwrap(), -1.0);
        assert_eq!(u.eval(&p, 6.9).unwrap(), -1.0);
        assert_eq!(u.eval(&p, 10.0).unwrap(), 0.5);

        assert!(ControlSignal::tabulated(vec![], vec![]).is_err());
        assert!(ControlSignal::tabulated(vec![0.0, 1.0], vec![1.0]).is_err());
        assert!(ControlSignal::tabulated(vec![1.0, 2.0], vec![0.0, 0.0]).is_err());
        assert!(ControlSignal::tabulated(vec![0.0, 0.0], vec![1.0, 2.0]).is_err());
        assert!(ControlSignal::tabulated(vec![0.0, 1.0], vec![f64::NAN, 0.0]).is_err());
    }

    #[test]
    fn breakpoints_are_interior_switches() {
        let p = canonical();
        assert!(ControlSignal::LinearRamp.breakpoints(&p).is_empty());
        let bp = ControlSignal::StaircaseZoh.breakpoints(&p);
        assert_eq!(bp.len(), 9);
        assert_eq!(bp[0], 1.0);
        assert_eq!(bp[8], 9.0);
        let single = SystemParams::new(20.0, 10.0, 1).unwrap();
        assert!(ControlSignal::StaircaseZoh.breakpoints(&single).is_empty());
    }

    proptest! {
        #[test]
        fn period_index_brackets_time(
            v in 1.0f64..=50.0,
            t_stop in 1.0f64..=12.0,
            n in 1u32..=64,
            frac in 0.0f64..=1.0,
        ) {
            let p = SystemParams::new(v, t_stop, n).unwrap();
            let t = frac * t_stop;
            let k = p.period_index(t).unwrap();
            prop_assert!((1..=n).contains(&k));
            // Containment in ((k-1)T, kT] up to snapping slack.
            let slack = 1e-9 * t_stop.max(1.0);
            prop_assert!(t >= f64::from(k - 1) * p.period - slack);
            prop_assert!(t <= f64::from(k) * p.period + slack);
            let dt = p.offset_in_period(t).unwrap();
            prop_assert!((0.0..=p.period).contains(&dt));
        }

        #[test]
        fn staircase_stays_within_one_step_of_ramp(
            v in 1.0f64..=50.0,
            t_stop in 1.0f64..=12.0,
            n in 1u32..=64,
            frac in 0.0f64..=1.0,
        ) {
            let p = SystemParams::new(v, t_stop, n).unwrap();
            let t = frac * t_stop;
            let ramp = ControlSignal::LinearRamp.eval(&p, t).unwrap();
            let hold = ControlSignal::StaircaseZoh.eval(&p, t).unwrap();
            let step = p.hold_rate * p.period;
            prop_assert!((ramp - hold).abs() <= step * (1.0 + 1e-12));
        }
    }
}
