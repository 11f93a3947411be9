//! Number formatting shared by every human-readable output.

/// `%.12g`: twelve significant digits, trailing zeros trimmed, scientific
/// notation outside `[1e-4, 1e12)`.
pub fn g12(x: f64) -> String {
    g(x, 12)
}

/// `%.{digits}g`.
pub fn g(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let digits = digits.max(1);
    // Round first so that e.g. 9.9999999999999 picks the right exponent.
    let sci = format!("{:.*e}", digits - 1, x);
    let (mant, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    if exp < -4 || exp >= digits as i32 {
        let mant = trim(mant);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mant}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Optional numbers print as an empty field.
pub fn opt_g12(x: Option<f64>) -> String {
    x.map(g12).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf() {
        assert_eq!(g12(0.0), "0");
        assert_eq!(g12(1.0), "1");
        assert_eq!(g12(0.5), "0.5");
        assert_eq!(g12(1.0 / 3.0), "0.333333333333");
        assert_eq!(g12(71.95479314287363), "71.9547931429");
        assert_eq!(g12(1e-7), "1e-07");
        assert_eq!(g12(1.5e-5), "1.5e-05");
        assert_eq!(g12(0.0001), "0.0001");
        assert_eq!(g12(1e12), "1e+12");
        assert_eq!(g12(123456789012.0), "123456789012");
        assert_eq!(g12(-2.5), "-2.5");
        assert_eq!(g12(0.99999999999999), "1");
        assert_eq!(g(0.035673993347252, 6), "0.035674");
        assert_eq!(g12(f64::INFINITY), "inf");
    }
}
