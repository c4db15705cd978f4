//! JSON output with every float written as 17 significant digits in scientific notation.

use serde::ser::{Serialize, Serializer};
use serde_json::value::RawValue;
use serde_json::Value;

/// `x` with 17 significant digits, e.g. `-1.2500000000000000e-3`.
pub fn fmt_sci(x: f64) -> String {
    format!("{x:.16e}")
}

struct Sci<'a>(&'a Value);

impl Serialize for Sci<'_> {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        match self.0 {
            Value::Number(n) if n.is_f64() => {
                let raw = RawValue::from_string(fmt_sci(n.as_f64().unwrap_or(f64::NAN)))
                    .map_err(serde::ser::Error::custom)?;
                raw.serialize(ser)
            }
            Value::Array(a) => ser.collect_seq(a.iter().map(Sci)),
            Value::Object(m) => ser.collect_map(m.iter().map(|(k, v)| (k, Sci(v)))),
            other => other.serialize(ser),
        }
    }
}

/// Pretty-printed JSON of `v` with LF line endings and a trailing newline.
pub fn to_sci_string(v: &Value) -> String {
    let mut out = serde_json::to_string_pretty(&Sci(v)).expect("JSON value serializes");
    out.push('\n');
    out
}
