//! Closed-form solutions of the continuous and hold-discretized stopping
//! models.
//!
//! Both controllers admit exact trajectories: the ramp integrates to
//! polynomials in `t`, and the staircase integrates per period to a piecewise
//! quadratic position and piecewise linear velocity. These closed forms serve
//! as oracles for the numeric integrator and as the source of the exact final
//! stopping-distance gap
//!
//! ```text
//! D - D_D = a_D * T * stop_time^2 * (1 + 1/N) / 12 = V * stop_time / (6 N)
//! ```
//!
//! which carries no higher-order remainder in `T`.

use crate::error::{Error, Result};
use crate::model::{State, SystemParams};

/// Relative tolerance for the internal agreement check between the two
/// algebraic forms of the discrete stopping distance.
const FORM_AGREEMENT_REL: f64 = 1e-9;

/// State of the ramp-controlled system at `t`:
/// `x(t) = V t - a t^3 / 6`, `v(t) = V - a t^2 / 2`.
///
/// # Errors
///
/// Returns [`Error::Domain`] if `t` is outside `[0, stop_time]`.
pub fn continuous_state(params: &SystemParams, t: f64) -> Result<State> {
    let t = params.check_time_domain(t)?;
    let v0 = params.initial_velocity;
    let a = params.ramp_rate;
    Ok(State::new(
        v0 * t - a * t.powi(3) / 6.0,
        v0 - a * t * t / 2.0,
    ))
}

/// Stopping distance of the ramp-controlled system, `D = (2/3) V stop_time`.
pub fn continuous_stop_distance(params: &SystemParams) -> f64 {
    2.0 / 3.0 * params.initial_velocity * params.stop_time
}

/// Velocity of the hold-controlled system at `t`. With `k` the period index
/// of `t` and `d` the offset inside that period:
/// `v_D(t) = V - a_D T^2 (k-1) k / 2 - k a_D T d`.
///
/// # Errors
///
/// Returns [`Error::Domain`] if `t` is outside `[0, stop_time]`.
pub fn discrete_velocity(params: &SystemParams, t: f64) -> Result<f64> {
    let k = f64::from(params.period_index(t)?);
    let d = params.offset_in_period(t)?;
    let big_t = params.period;
    Ok(params.initial_velocity
        - params.hold_rate * big_t * big_t * (k - 1.0) * k / 2.0
        - k * params.hold_rate * big_t * d)
}

/// Distance covered by the hold-controlled system over its first `j` full
/// periods. Summing the per-period contributions in closed form gives
/// `j V T - a_D T^3 [ (j-1) j (j+1) / 6 + j (j+1) / 4 ]`.
fn completed_periods_distance(params: &SystemParams, full_periods: u32) -> f64 {
    let j = f64::from(full_periods);
    let t3 = params.period.powi(3);
    j * params.initial_velocity * params.period
        - params.hold_rate * t3 * ((j - 1.0) * j * (j + 1.0) / 6.0 + j * (j + 1.0) / 4.0)
}

/// Position of the hold-controlled system at `t`: the closed-form sum over
/// completed periods plus the quadratic contribution of the current one,
/// `(V - a_D T^2 (k-1) k / 2) d - k a_D T d^2 / 2`.
///
/// # Errors
///
/// Returns [`Error::Domain`] if `t` is outside `[0, stop_time]`.
pub fn discrete_position(params: &SystemParams, t: f64) -> Result<f64> {
    let k = params.period_index(t)?;
    let d = params.offset_in_period(t)?;
    let kf = f64::from(k);
    let big_t = params.period;
    let start_velocity =
        params.initial_velocity - params.hold_rate * big_t * big_t * (kf - 1.0) * kf / 2.0;
    Ok(completed_periods_distance(params, k - 1) + start_velocity * d
        - kf * params.hold_rate * big_t * d * d / 2.0)
}

/// Stopping distance of the hold-controlled system.
///
/// Two algebraically equal forms are evaluated and cross-checked:
///
/// ```text
/// D_D = V stop_time - a_D T^3 (2 N^3 + 3 N^2 + N) / 12
///     = V stop_time [ 1 - (2 N^2 + 3 N + 1) / (6 N^2 + 6 N) ]
/// ```
///
/// # Errors
///
/// Returns [`Error::InvariantViolation`] if the forms disagree beyond
/// rounding, which would indicate a bug in one of them.
pub fn discrete_stop_distance(params: &SystemParams) -> Result<f64> {
    let n = f64::from(params.periods);
    let v0t = params.initial_velocity * params.stop_time;
    let polynomial = v0t
        - params.hold_rate * params.period.powi(3) * (2.0 * n.powi(3) + 3.0 * n * n + n) / 12.0;
    let factored = v0t * (1.0 - (2.0 * n * n + 3.0 * n + 1.0) / (6.0 * n * n + 6.0 * n));
    if (polynomial - factored).abs() > FORM_AGREEMENT_REL * polynomial.abs().max(1.0) {
        return Err(Error::invariant(format!(
            "discrete stopping distance forms disagree: {polynomial} vs {factored}"
        )));
    }
    Ok(polynomial)
}

/// Exact stopping-distance gap between the two controllers,
/// `a_D T stop_time^2 (1 + 1/N) / 12`, which simplifies to
/// `V stop_time / (6 N)`.
pub fn exact_final_gap(params: &SystemParams) -> f64 {
    let n = f64::from(params.periods);
    params.hold_rate * params.period * params.stop_time * params.stop_time * (1.0 + 1.0 / n)
        / 12.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ControlSignal;
    use proptest::prelude::*;

    fn canonical() -> SystemParams {
        SystemParams::new(20.0, 10.0, 10).unwrap()
    }

    /// Oracle: velocity by exact quadrature of the staircase control.
    /// Midpoint sums are exact for piecewise-constant integrands when no
    /// subinterval straddles a hold switch.
    fn velocity_by_quadrature(params: &SystemParams, t: f64, sub: u32) -> f64 {
        let mut v = params.initial_velocity;
        let u = ControlSignal::StaircaseZoh;
        let mut done = 0.0f64;
        let k_end = params.period_index(t).unwrap();
        for k in 1..=k_end {
            let start = f64::from(k - 1) * params.period;
            let end = if k == k_end {
                t
            } else {
                f64::from(k) * params.period
            };
            let h = (end - start) / f64::from(sub);
            for i in 0..sub {
                let mid = start + (f64::from(i) + 0.5) * h;
                v += u.eval(params, mid).unwrap() * h;
            }
            done = end;
        }
        assert_eq!(done, t);
        v
    }

    /// Oracle: position by exact trapezoid quadrature of the piecewise
    /// linear discrete velocity on a switch-aligned grid.
    fn position_by_quadrature(params: &SystemParams, t: f64, sub: u32) -> f64 {
        let mut x = 0.0f64;
        let k_end = params.period_index(t).unwrap();
        for k in 1..=k_end {
            let start = f64::from(k - 1) * params.period;
            let end = if k == k_end {
                t
            } else {
                f64::from(k) * params.period
            };
            let h = (end - start) / f64::from(sub);
            for i in 0..sub {
                let a = start + f64::from(i) * h;
                let b = a + h;
                let va = discrete_velocity(params, a).unwrap();
                let vb = discrete_velocity(params, b.min(end)).unwrap();
                x += 0.5 * (va + vb) * h;
            }
        }
        x
    }

    #[test]
    fn continuous_canonical_values() {
        let p = canonical();
        let s0 = continuous_state(&p, 0.0).unwrap();
        assert_eq!(s0.position, 0.0);
        assert_eq!(s0.velocity, 20.0);
        let s5 = continuous_state(&p, 5.0).unwrap();
        assert!((s5.velocity - 15.0).abs() < 1e-12);
        assert!((s5.position - (100.0 - 0.4 * 125.0 / 6.0)).abs() < 1e-12);
        let s_end = continuous_state(&p, 10.0).unwrap();
        assert!(s_end.velocity.abs() < 1e-12);
        assert!((s_end.position - 400.0 / 3.0).abs() < 1e-10);
        assert!((continuous_stop_distance(&p) - 400.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn discrete_velocity_canonical_values() {
        let p = canonical();
        assert_eq!(discrete_velocity(&p, 0.0).unwrap(), 20.0);
        // k = 3, offset 0.5: 20 - 18/11.
        assert!((discrete_velocity(&p, 2.5).unwrap() - (20.0 - 18.0 / 11.0)).abs() < 1e-12);
        assert!(discrete_velocity(&p, 10.0).unwrap().abs() < 1e-12);
    }

    #[test]
    fn discrete_position_canonical_values() {
        let p = canonical();
        assert_eq!(discrete_position(&p, 0.0).unwrap(), 0.0);
        // End of period 1: V T - a_D T^3 / 2.
        assert!((discrete_position(&p, 1.0).unwrap() - (20.0 - 2.0 / 11.0)).abs() < 1e-12);
        assert!((discrete_position(&p, 10.0).unwrap() - 130.0).abs() < 1e-12);
    }

    #[test]
    fn discrete_stop_distance_canonical_and_forms_agree() {
        let p = canonical();
        assert!((discrete_stop_distance(&p).unwrap() - 130.0).abs() < 1e-12);
        for n in [1u32, 2, 3, 7, 16, 63] {
            let p = SystemParams::new(33.0, 7.5, n).unwrap();
            // Closed form (4N - 1) / (6N) of the bracket, derived by hand.
            let nf = f64::from(n);
            let expect = 33.0 * 7.5 * (4.0 * nf - 1.0) / (6.0 * nf);
            let got = discrete_stop_distance(&p).unwrap();
            assert!(
                (got - expect).abs() <= 1e-9 * expect.abs(),
                "n={n}: {got} vs {expect}"
            );
        }
    }

    #[test]
    fn gap_matches_simple_form_and_difference() {
        let p = canonical();
        let gap = exact_final_gap(&p);
        assert!((gap - 10.0 / 3.0).abs() < 1e-12);
        let diff = continuous_stop_distance(&p) - discrete_stop_distance(&p).unwrap();
        assert!((gap - diff).abs() < 1e-10);
    }

    #[test]
    fn closed_forms_match_quadrature_oracles() {
        for (v0, t_stop, n) in [(20.0, 10.0, 10u32), (7.0, 3.0, 4), (48.0, 11.5, 63)] {
            let p = SystemParams::new(v0, t_stop, n).unwrap();
            for frac in [0.1, 0.37, 0.5, 0.83, 1.0] {
                let t = frac * t_stop;
                let v_oracle = velocity_by_quadrature(&p, t, 16);
                let x_oracle = position_by_quadrature(&p, t, 16);
                let scale = v0.max(v0 * t_stop);
                assert!(
                    (discrete_velocity(&p, t).unwrap() - v_oracle).abs() <= 1e-9 * scale,
                    "velocity mismatch at t={t} for ({v0},{t_stop},{n})"
                );
                assert!(
                    (discrete_position(&p, t).unwrap() - x_oracle).abs() <= 1e-9 * scale,
                    "position mismatch at t={t} for ({v0},{t_stop},{n})"
                );
            }
        }
    }

    #[test]
    fn discrete_position_continuous_at_switches() {
        let p = SystemParams::new(13.0, 9.0, 7).unwrap();
        for k in 1..p.periods {
            let t = f64::from(k) * p.period;
            let eps = 1e-9;
            let left = discrete_position(&p, t).unwrap();
            let right = discrete_position(&p, t + eps).unwrap();
            assert!((left - right).abs() < 1e-6);
            let vl = discrete_velocity(&p, t).unwrap();
            let vr = discrete_velocity(&p, t + eps).unwrap();
            assert!((vl - vr).abs() < 1e-6);
        }
    }

    proptest! {
        #[test]
        fn gap_identity_holds(
            v in 1.0f64..=50.0,
            t_stop in 1.0f64..=12.0,
            n in 1u32..=64,
        ) {
            let p = SystemParams::new(v, t_stop, n).unwrap();
            let gap = exact_final_gap(&p);
            let simple = v * t_stop / (6.0 * f64::from(n));
            prop_assert!((gap - simple).abs() <= 1e-12 * simple.abs());
            let diff = continuous_stop_distance(&p) - discrete_stop_distance(&p).unwrap();
            prop_assert!((gap - diff).abs() <= 1e-9 * gap.abs().max(1e-12));
        }

        #[test]
        fn both_systems_stop_at_horizon(
            v in 1.0f64..=50.0,
            t_stop in 1.0f64..=12.0,
            n in 1u32..=64,
        ) {
            let p = SystemParams::new(v, t_stop, n).unwrap();
            let scale = v.max(1.0);
            prop_assert!(continuous_state(&p, t_stop).unwrap().velocity.abs() <= 1e-10 * scale);
            prop_assert!(discrete_velocity(&p, t_stop).unwrap().abs() <= 1e-10 * scale);
        }

        #[test]
        fn discrete_velocity_decreases(
            v in 1.0f64..=50.0,
            t_stop in 1.0f64..=12.0,
            n in 1u32..=64,
            f1 in 0.0f64..=1.0,
            f2 in 0.0f64..=1.0,
        ) {
            let p = SystemParams::new(v, t_stop, n).unwrap();
            let (lo, hi) = if f1 <= f2 { (f1, f2) } else { (f2, f1) };
            let va = discrete_velocity(&p, lo * t_stop).unwrap();
            let vb = discrete_velocity(&p, hi * t_stop).unwrap();
            prop_assert!(vb <= va + 1e-9 * v);
        }
    }
}
