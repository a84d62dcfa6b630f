//! Number formatting for CSV outputs.

/// Formats `x` with `digits` significant digits, `%g` style: fixed notation
/// for moderate exponents, scientific otherwise, trailing zeros removed.
pub fn significant(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        format!("{}e{}", trim_zeros(mantissa), exp)
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::significant;

    #[test]
    fn matches_printf_g() {
        assert_eq!(significant(1.0, 9), "1");
        assert_eq!(significant(5.0, 9), "5");
        assert_eq!(significant(0.1 + 0.2, 9), "0.3");
        assert_eq!(significant(123456.789012, 9), "123456.789");
        assert_eq!(significant(-2.5e-7, 9), "-2.5e-7");
        assert_eq!(significant(1.234e12, 9), "1.234e12");
        assert_eq!(significant(0.0, 9), "0");
    }
}
