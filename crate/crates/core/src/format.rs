//! Fixed-precision numeric output: every number the library emits is rounded
//! to 12 significant digits.

use serde::Serializer;

pub const SIGNIFICANT_DIGITS: usize = 12;

/// Rounds to 12 significant digits (ties to even on the decimal expansion).
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .expect("formatted float parses")
}

/// Shortest decimal text for the 12-digit rounding of `x`.
pub fn format_sig(x: f64) -> String {
    let r = round_sig(x);
    if r == 0.0 {
        return "0".into();
    }
    let abs = r.abs();
    if (1e-6..1e15).contains(&abs) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

pub fn sig12<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(round_sig(*x))
}

pub fn sig12_opt<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => s.serialize_f64(round_sig(*v)),
        None => s.serialize_none(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(format_sig(6f64.powf(-0.5)), "0.408248290464");
        assert_eq!(format_sig(2f64.powf(-1.0 / 3.0)), "0.793700525984");
        assert_eq!(format_sig(0.5), "0.5");
        assert_eq!(format_sig(0.0), "0");
        assert_eq!(format_sig(1.0 / 3.0 * 1e-9), "3.33333333333e-10");
        assert_eq!(format_sig(-2.5), "-2.5");
    }

    #[test]
    fn ties_go_to_even() {
        // 0.5 and 0.25 are exact; rounding 1.25 to two digits is a true tie.
        assert_eq!(format!("{:.1e}", 1.25), "1.2e0");
        assert_eq!(format!("{:.1e}", 1.75), "1.8e0");
    }
}
