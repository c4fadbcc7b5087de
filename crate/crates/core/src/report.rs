//! Deterministic number formatting for machine-readable output.
//!
//! CSV cells round to 12 significant digits and then print the shortest
//! decimal form that reproduces the rounded value, so repeated runs emit
//! byte-identical files and exact values stay short (`130` rather than
//! `1.300000000000e2`).

/// Formats `value` to at most 12 significant digits.
pub fn fmt_sig12(value: f64) -> String {
    if value == 0.0 {
        return "0".to_string();
    }
    if !value.is_finite() {
        return value.to_string();
    }
    let rounded: f64 = format!("{value:.11e}")
        .parse()
        .expect("12-digit scientific form always parses");
    // Positional display would pad extreme magnitudes with long zero runs;
    // keep those in scientific form.
    if (1e-4..1e15).contains(&rounded.abs()) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn short_forms_for_exact_values() {
        assert_eq!(fmt_sig12(0.0), "0");
        assert_eq!(fmt_sig12(-0.0), "0");
        assert_eq!(fmt_sig12(130.0), "130");
        assert_eq!(fmt_sig12(1.0), "1");
        assert_eq!(fmt_sig12(-2.5), "-2.5");
    }

    #[test]
    fn long_fractions_are_rounded_to_twelve_digits() {
        assert_eq!(fmt_sig12(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_sig12(400.0 / 3.0), "133.333333333");
        assert_eq!(fmt_sig12(4.0 / 11.0), "0.363636363636");
        assert_eq!(fmt_sig12(1.2345678901234567e-7), "1.23456789012e-7");
        assert_eq!(fmt_sig12(1e300), "1e300");
        assert_eq!(fmt_sig12(-6.125e-9), "-6.125e-9");
    }

    #[test]
    fn non_finite_values_have_stable_spellings() {
        assert_eq!(fmt_sig12(f64::INFINITY), "inf");
        assert_eq!(fmt_sig12(f64::NEG_INFINITY), "-inf");
        assert_eq!(fmt_sig12(f64::NAN), "NaN");
    }

    #[test]
    fn formatting_is_idempotent() {
        for x in [std::f64::consts::PI, 2.0f64.sqrt() * 1e-3, 6.9654e4, 1e300] {
            let once = fmt_sig12(x);
            let twice = fmt_sig12(once.parse().unwrap());
            assert_eq!(once, twice);
        }
    }
}
