//! `%g`-style number formatting.

/// `v` with `digits` significant digits: fixed notation for decimal
/// exponents in `-4..digits`, scientific otherwise, trailing zeros dropped.
pub fn sig(v: f64, digits: usize) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    if v == 0.0 {
        return "0".into();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        format!(
            "{}e{}{:02}",
            trim(mantissa),
            if exp < 0 { '-' } else { '+' },
            exp.abs()
        )
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim(&format!("{v:.decimals$}")).to_string()
    }
}

fn trim(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::sig;

    #[test]
    fn matches_printf_g() {
        assert_eq!(sig(4.0 / 9.0, 15), "0.444444444444444");
        assert_eq!(sig(-2.0 / 9.0, 3), "-0.222");
        assert_eq!(sig(8.0 / 9.0, 1), "0.9");
        assert_eq!(sig(6946.863692, 6), "6946.86");
        assert_eq!(sig(1234567.0, 3), "1.23e+06");
        assert_eq!(sig(0.000012345, 3), "1.23e-05");
        assert_eq!(sig(0.00012345, 3), "0.000123");
        assert_eq!(sig(2.0, 15), "2");
        assert_eq!(sig(-0.0, 15), "0");
        assert_eq!(sig(99.96, 3), "100");
    }

    #[test]
    fn roundtrips_within_requested_digits() {
        for &v in &[1.0 / 3.0, -2.5e-7, 6.02e23, 1e-300, 123.456, -9.999999] {
            for d in 1..=17 {
                let back: f64 = sig(v, d).parse().unwrap();
                assert!(
                    ((back - v) / v).abs() <= 10f64.powi(1 - d as i32),
                    "{v} {d}"
                );
            }
        }
    }
}
