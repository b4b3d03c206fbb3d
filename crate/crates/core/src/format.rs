//! Locale-free number formatting with 17 significant digits (C `%.17g`).

/// Formats `x` like C's `%.17g`, which round-trips every `f64` exactly.
pub fn g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..17).contains(&exp) {
        let m = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (16 - exp) as usize;
        strip_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::g17;
    use proptest::prelude::*;

    #[test]
    fn matches_printf_g17() {
        assert_eq!(g17(0.5), "0.5");
        assert_eq!(g17(0.1), "0.10000000000000001");
        assert_eq!(g17(1.0), "1");
        assert_eq!(g17(-2.0), "-2");
        assert_eq!(g17(1e-7), "9.9999999999999995e-08");
        assert_eq!(g17(1.5e20), "1.5e+20");
        assert_eq!(g17(123456.0), "123456");
        assert_eq!(g17(0.0), "0");
    }

    proptest! {
        #[test]
        fn round_trips(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL) {
            let s = g17(x);
            prop_assert_eq!(s.parse::<f64>().unwrap(), x);
        }
    }
}
