//! Human-facing number formatting.

/// Formats `x` to `digits` significant figures: fixed notation for
/// magnitudes in [1e-3, 1e6), scientific otherwise.
pub fn significant(x: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    if (-3..6).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        format!("{:.*}", decimals, x)
    } else {
        format!("{mantissa}e{exp}")
    }
}

#[cfg(test)]
mod tests {
    use super::significant;

    #[test]
    fn three_figures() {
        assert_eq!(significant(0.96212, 3), "0.962");
        assert_eq!(significant(0.000313, 3), "3.13e-4");
        assert_eq!(significant(0.050504, 3), "0.0505");
        assert_eq!(significant(0.015625, 3), "0.0156");
        assert_eq!(significant(1.0, 3), "1.00");
        assert_eq!(significant(0.0, 3), "0");
        assert_eq!(significant(4.3946e-5, 3), "4.39e-5");
        assert_eq!(significant(0.0014, 3), "0.00140");
    }
}
