//! Numeric rendering. Two widths are used everywhere:
//!
//! * [`sig6`] for human-facing tables: six significant figures, trailing
//!   zeros trimmed, scientific notation only below 1e-5.
//! * [`g17`] for machine-facing files: seventeen significant digits, which
//!   round-trips every binary64 value exactly.

/// Render `v` to six significant figures.
///
/// Values whose rounded magnitude is at least 1e-5 are printed in plain
/// decimal, everything smaller in scientific notation; trailing zeros and a
/// dangling decimal point are trimmed in both forms, so `0.9` stays `0.9`
/// and `5.00000e-7` becomes `5e-7`. Zero prints as `0`.
pub fn sig6(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    // {:.5e} rounds the mantissa to six significant digits and exposes the
    // decimal exponent of the rounded value.
    let sci = format!("{:.5e}", v);
    let (mant, exp) = sci.split_once('e').expect("{:e} always contains 'e'");
    let e: i32 = exp.parse().expect("exponent is an integer");
    if e <= -6 {
        return format!("{}e{}", trim_zeros(mant), e);
    }
    let decimals = 5 - e;
    if decimals >= 0 {
        trim_zeros(&format!("{:.*}", decimals as usize, v))
    } else {
        // Magnitude 1e6 or larger: round to six significant figures by hand,
        // then print without a fractional part.
        let scale = 10f64.powi(e - 5);
        format!("{:.0}", (v / scale).round() * scale)
    }
}

/// Render `v` with seventeen significant digits in scientific notation.
/// Parsing the result back yields the identical binary64 value.
pub fn g17(v: f64) -> String {
    format!("{:.16e}", v)
}

fn trim_zeros(s: &str) -> String {
    if !s.contains('.') {
        return s.to_string();
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_decimals() {
        assert_eq!(sig6(0.9), "0.9");
        assert_eq!(sig6(0.0), "0");
        assert_eq!(sig6(1.0), "1");
        assert_eq!(sig6(0.25), "0.25");
        assert_eq!(sig6(0.123456789), "0.123457");
        assert_eq!(sig6(-0.123456789), "-0.123457");
    }

    #[test]
    fn sixth_digit_zero_is_trimmed() {
        // The sixth significant figure rounds to zero and must disappear.
        assert_eq!(sig6(0.000044222049), "0.000044222");
        assert_eq!(sig6(0.00043793012), "0.00043793");
    }

    #[test]
    fn scientific_below_1e_minus_5() {
        assert_eq!(sig6(2.90796e-11), "2.90796e-11");
        assert_eq!(sig6(7.28282e-6), "7.28282e-6");
        assert_eq!(sig6(5e-7), "5e-7");
        assert_eq!(sig6(9.660178e-6), "9.66018e-6");
    }

    #[test]
    fn boundary_rounds_before_choosing_notation() {
        // 9.9999995e-6 rounds to 1.00000e-5, which belongs to the decimal form.
        assert_eq!(sig6(9.9999995e-6), "0.00001");
        assert_eq!(sig6(0.99999971), "1");
    }

    #[test]
    fn large_magnitudes() {
        assert_eq!(sig6(1234567.89), "1234570");
        assert_eq!(sig6(1e6), "1000000");
    }

    #[test]
    fn g17_round_trips() {
        for &v in &[0.9, 2.90796e-11, 1.0 / 3.0, 5e-324, 1e308, -0.6975] {
            let s = g17(v);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), v.to_bits(), "{s}");
        }
    }
}
