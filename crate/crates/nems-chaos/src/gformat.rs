//! Shortest-faithful decimal formatting for CSV output.
//!
//! All numeric artifact columns are written with C's `%.17g` semantics:
//! 17 significant digits, fixed notation when the decimal exponent lies in
//! `[-4, 17)`, scientific notation otherwise, and trailing zeros trimmed.
//! 17 digits guarantee that a reader parsing the column recovers the exact
//! `f64` bit pattern, so artifact diffs detect any numerical change.

/// Formats `x` exactly as C's `printf("%.17g", x)` would.
pub fn format_g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_owned();
    }
    if x.is_infinite() {
        return if x < 0.0 { "-inf" } else { "inf" }.to_owned();
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0" } else { "0" }.to_owned();
    }
    // Round to 17 significant digits first; the notation choice depends on the
    // decimal exponent of the *rounded* value (e.g. 9.99...e-5 prints fixed).
    let sci = format!("{:.16e}", x);
    let (mantissa, exponent) = sci
        .split_once('e')
        .expect("{:.16e} always contains an exponent");
    let exp: i32 = exponent.parse().expect("exponent is a valid integer");
    if (-4..17).contains(&exp) {
        // Fixed notation with 16 - exp fractional digits keeps exactly 17
        // significant digits; Rust's `{:.*}` rounds the exact binary value,
        // matching printf.
        let decimals = (16 - exp).max(0) as usize;
        trim_trailing(format!("{:.*}", decimals, x))
    } else {
        let mantissa = trim_trailing(mantissa.to_owned());
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    }
}

/// Drops trailing fractional zeros (and a bare trailing point), printf-`%g` style.
fn trim_trailing(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_owned()
    } else {
        s
    }
}
