//! Decimal formatting with up to 12 significant digits.
//!
//! Plain decimal notation (no exponent), trailing zeros trimmed. Twelve
//! digits keep CSV/JSON output byte-stable across runs while staying within
//! 5e-12 relative of the binary value; reading the text back is lossy
//! beyond that.

/// Formats `x` with up to 12 significant digits in plain decimal notation.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let formatted = format!("{:.11e}", x);
    let (mantissa, exponent) = formatted
        .split_once('e')
        .expect("{:e} always carries an exponent");
    let exponent: i32 = exponent.parse().expect("exponent is an integer");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    debug_assert_eq!(digits.len(), 12);

    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if exponent >= 11 {
        out.push_str(&digits);
        for _ in 0..(exponent - 11) {
            out.push('0');
        }
        return out;
    }
    if exponent >= 0 {
        let split = (exponent + 1) as usize;
        out.push_str(&digits[..split]);
        let frac = digits[split..].trim_end_matches('0');
        if !frac.is_empty() {
            out.push('.');
            out.push_str(frac);
        }
        return out;
    }
    out.push_str("0.");
    for _ in 0..(-exponent - 1) {
        out.push('0');
    }
    out.push_str(digits.trim_end_matches('0'));
    out
}
