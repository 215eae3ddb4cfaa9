//! Directed decimal printing of interval endpoints.

/// Formats `x` with `sig` significant digits, rounded toward −∞ (`up=false`)
/// or +∞ (`up=true`), so that the printed decimal bounds the value.
pub fn format_outward(x: f64, sig: usize, up: bool) -> String {
    if !x.is_finite() {
        return if x > 0.0 {
            "inf".into()
        } else if x < 0.0 {
            "-inf".into()
        } else {
            "nan".into()
        };
    }
    if x == 0.0 {
        return "0".into();
    }
    let s = format!("{:.*e}", sig.saturating_sub(1), x);
    let printed: f64 = s.parse().expect("valid float literal");
    let ok = if up { printed >= x } else { printed <= x };
    if ok {
        return trim_exp(&s);
    }
    trim_exp(&step_decimal(&s, up))
}

/// Formats `x` with `decimals` fixed decimals, rounded in the given direction.
pub fn format_fixed(x: f64, decimals: usize, up: bool) -> String {
    if !x.is_finite() {
        return format_outward(x, 1, up);
    }
    let s = format!("{:.*}", decimals, x);
    let printed: f64 = s.parse().expect("valid float literal");
    let ok = if up { printed >= x } else { printed <= x };
    if ok {
        return fix_negative_zero(s);
    }
    let ulp = 10f64.powi(-(decimals as i32));
    let mut v = printed + if up { ulp } else { -ulp };
    // Guard against the step itself rounding the wrong way.
    let mut out = format!("{:.*}", decimals, v);
    while {
        let p: f64 = out.parse().unwrap();
        if up {
            p < x
        } else {
            p > x
        }
    } {
        v += if up { ulp } else { -ulp };
        out = format!("{:.*}", decimals, v);
    }
    fix_negative_zero(out)
}

fn fix_negative_zero(s: String) -> String {
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

/// Moves a scientific-notation decimal one unit in its last place.
fn step_decimal(s: &str, up: bool) -> String {
    let (mant, exp) = s.split_once('e').expect("scientific format");
    let mut exp: i32 = exp.parse().unwrap();
    let negative = mant.starts_with('-');
    let digits: String = mant.chars().filter(|c| c.is_ascii_digit()).collect();
    let ndig = digits.len();
    let mut value: u128 = digits.parse().unwrap();
    // Moving toward +∞ increases magnitude of positives and decreases negatives.
    let grow = up != negative;
    if grow {
        value += 1;
        if value.to_string().len() > ndig {
            value /= 10;
            exp += 1;
        }
    } else {
        value -= 1;
        if value.to_string().len() < ndig {
            if value == 0 {
                return "0e0".into();
            }
            value = value * 10 + 9;
            exp -= 1;
        }
    }
    let d = value.to_string();
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    out.push_str(&d[..1]);
    if d.len() > 1 {
        out.push('.');
        out.push_str(&d[1..]);
    }
    format!("{out}e{exp}")
}

/// Renders moderate exponents positionally ("2.5" instead of "2.5e0").
fn trim_exp(s: &str) -> String {
    let (mant, exp) = s.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().unwrap();
    if (-5..=6).contains(&exp) {
        let v: f64 = format!("{mant}e{exp}").parse().unwrap();
        let sig = mant.chars().filter(|c| c.is_ascii_digit()).count() as i32;
        let decimals = (sig - 1 - exp).max(0) as usize;
        let out = format!("{:.*}", decimals, v);
        // Re-check: positional rendering must be the same decimal.
        debug_assert_eq!(out.parse::<f64>().unwrap(), v);
        out
    } else {
        format!("{mant}e{exp}")
    }
}
