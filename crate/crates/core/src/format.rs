//! Number formatting for CSV output.

/// Formats `x` with 17 significant digits in the style of C's `%.17g`:
/// fixed notation for decimal exponents in `[-5, 17)`, scientific
/// otherwise, trailing zeros removed. Round-trips every finite `f64`.
pub fn sig17(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("`e` formatting always has an exponent");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!(
            "{}e{}{:02}",
            trim_zeros(mantissa.to_string()),
            if exp < 0 { '-' } else { '+' },
            exp.abs()
        )
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}
