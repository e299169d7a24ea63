//! Plain-text number formatting shared by the CSV writers.

/// Formats `x` with `digits` significant digits, trailing zeros removed.
/// Falls back to scientific notation for very small or large magnitudes.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    assert!(digits >= 1, "need at least one significant digit");
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..15).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{:.*e}", digits - 1, x)
    }
}

/// Twelve significant digits, the precision used in every CSV output.
pub fn fmt12(x: f64) -> String {
    fmt_sig(x, 12)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats() {
        assert_eq!(fmt12(0.964994923425123), "0.964994923425");
        assert_eq!(fmt12(1.0), "1");
        assert_eq!(fmt12(-2.5), "-2.5");
        assert_eq!(fmt12(123456.7890123456), "123456.789012");
        assert_eq!(fmt12(0.0), "0");
        assert_eq!(fmt12(1e-9), "1.00000000000e-9");
        assert_eq!(fmt_sig(0.99999999999999, 3), "1");
        assert_eq!(fmt12(f64::NAN), "nan");
    }
}
