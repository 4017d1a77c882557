//! Fixed-precision number formatting shared by every text output.

use serde::Serializer;
use serde_json::value::RawValue;

/// Formats a real with 17 significant digits in scientific notation.
///
/// Non-finite values are written as `NaN`, `inf` or `-inf`.
pub fn real(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// `serialize_with` helper emitting a JSON number with 17 significant digits
/// (or `null` when the value is not finite).
pub fn json_real<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if !x.is_finite() {
        return s.serialize_none();
    }
    let raw = RawValue::from_string(real(*x)).map_err(serde::ser::Error::custom)?;
    serde::Serialize::serialize(&raw, s)
}

/// Like [`json_real`] for optional values.
pub fn json_opt_real<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => json_real(v, s),
        None => s.serialize_none(),
    }
}
