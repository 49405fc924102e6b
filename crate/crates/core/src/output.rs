//! Number formatting shared by every exported artifact.

/// Significant digits used for all floating-point output.
pub const SIG_DIGITS: usize = 12;

/// `x` rounded to [`SIG_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIG_DIGITS - 1, x).parse().unwrap_or(x)
}

/// Shortest decimal text of [`round_sig`]`(x)`.
pub fn fmt_sig(x: f64) -> String {
    round_sig(x).to_string()
}

/// Recursively rounds every float in a JSON value.
pub fn round_json(v: &mut serde_json::Value) {
    use serde_json::Value;
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(r) = n.as_f64().and_then(|f| serde_json::Number::from_f64(round_sig(f))) {
                *n = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_json),
        Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding() {
        assert_eq!(fmt_sig(2.0 / 3.0), "0.666666666667");
        assert_eq!(fmt_sig(1.0), "1");
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(1.0 / 9.0), "0.111111111111");
        assert_eq!(fmt_sig(123456789.0123456), "123456789.012");
        let mut v = serde_json::json!({"a": [0.1234567890123456, 3], "b": {"c": 1e-20 / 3.0}});
        round_json(&mut v);
        assert_eq!(v["a"][0].as_f64().unwrap(), 0.123456789012);
        assert_eq!(v["a"][1].as_u64().unwrap(), 3);
    }
}
