use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{Number, Value};

use crate::CliError;

/// `x` with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn canon(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap_or(f64::NAN);
            if x.is_finite() {
                Value::Number(fmt_f64(x).parse::<Number>().expect("formatted float parses"))
            } else {
                Value::Null
            }
        }
        Value::Array(a) => Value::Array(a.into_iter().map(canon).collect()),
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, v)| (k, canon(v))).collect()),
        other => other,
    }
}

/// Pretty JSON with sorted keys and every float at 17 significant digits.
pub fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let v = serde_json::to_value(value).map_err(|e| CliError::Io(e.to_string()))?;
    let mut s = serde_json::to_string_pretty(&canon(v)).map_err(|e| CliError::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Writes to `out` through a temporary file in the same directory and a
/// rename, or to stdout.
pub fn emit(out: Option<&Path>, body: &str) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io(e.to_string());
    match out {
        None => std::io::stdout().write_all(body.as_bytes()).map_err(io),
        Some(path) => {
            let dir = match path.parent() {
                Some(p) if !p.as_os_str().is_empty() => p,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
            tmp.write_all(body.as_bytes()).map_err(io)?;
            tmp.as_file().sync_all().map_err(io)?;
            tmp.persist(path).map_err(|e| io(e.error))?;
            Ok(())
        }
    }
}

/// CSV body with a header row and LF line endings.
pub fn csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for r in rows {
        s.push_str(&r.join(","));
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_get_17_digits_and_keys_sort() {
        #[derive(Serialize)]
        struct S {
            z: f64,
            a: u32,
            m: Vec<f64>,
        }
        let j = to_json(&S { z: std::f64::consts::E, a: 3, m: vec![0.1, f64::NAN] }).unwrap();
        assert!(j.find("\"a\"").unwrap() < j.find("\"z\"").unwrap());
        assert!(j.contains("2.7182818284590451e"));
        assert!(j.contains("1.0000000000000001e-1"), "{j}");
        assert!(j.contains("null"));
        assert!(j.contains("\"a\": 3"));
        let back: serde_json::Value = serde_json::from_str(&j).unwrap();
        assert_eq!(back["z"].as_f64().unwrap(), std::f64::consts::E);
    }
}
