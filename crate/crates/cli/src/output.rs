use std::io::{ErrorKind, Write};

use serde::Serialize;
use serde_json::Value;

use crate::failure::Failure;

pub const SIGNIFICANT_DIGITS: usize = 12;

/// `x` rounded to twelve significant digits, with `-0` folded into `0`.
pub fn round(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    let r: f64 = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().unwrap_or(x);
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

pub fn number(x: f64) -> String {
    let r = round(x);
    if r.is_finite() {
        Value::from(r).to_string()
    } else {
        r.to_string()
    }
}

fn round_tree(v: &mut Value) {
    match v {
        Value::Number(n) if !(n.is_i64() || n.is_u64()) => {
            if let Some(x) = n.as_f64() {
                *v = Value::from(round(x));
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_tree),
        Value::Object(map) => map.values_mut().for_each(round_tree),
        _ => {}
    }
}

/// Pretty JSON with every float rounded and keys in sorted order.
pub fn to_json<T: Serialize>(report: &T) -> Result<String, Failure> {
    let mut value = serde_json::to_value(report).map_err(|e| Failure::Solver(e.to_string()))?;
    round_tree(&mut value);
    serde_json::to_string_pretty(&value).map_err(|e| Failure::Solver(e.to_string()))
}

pub fn print_json<T: Serialize>(report: &T) -> Result<(), Failure> {
    let text = to_json(report)?;
    match writeln!(std::io::stdout().lock(), "{text}") {
        Err(e) if e.kind() != ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_keeps_twelve_digits() {
        assert_eq!(round(1.0 / 3.0), 0.333333333333);
        assert_eq!(round(-0.0), 0.0);
        assert_eq!(number(4.8 / 409.0), "0.0117359413203");
        assert_eq!(number(2.0), "2.0");
    }

    #[test]
    fn integers_pass_through() {
        let json = to_json(&serde_json::json!({ "k": 800, "x": 0.1 + 0.2 })).unwrap();
        assert!(json.contains("\"k\": 800"));
        assert!(json.contains("\"x\": 0.3"));
    }
}
