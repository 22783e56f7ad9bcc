//! 17-significant-digit float formatting shared by the JSON and CSV writers.

use serde::Serializer;
use serde_json::value::RawValue;

/// Formats a double with 17 significant digits, e.g. `-1.5000000000000002e-1`.
///
/// Non-finite values are written as `NaN`, `inf` or `-inf`.
pub fn g17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// Serde adapter writing a double as a 17-digit JSON number (`null` when non-finite).
///
/// Relies on `serde_json`'s raw values; other serializers are not supported.
pub fn serialize_f64<S: Serializer>(x: &f64, serializer: S) -> Result<S::Ok, S::Error> {
    if x.is_finite() {
        let raw = RawValue::from_string(g17(*x)).map_err(serde::ser::Error::custom)?;
        serde::Serialize::serialize(&raw, serializer)
    } else {
        serializer.serialize_none()
    }
}

pub fn serialize_f64_slice<S: Serializer>(xs: &[f64], serializer: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = serializer.serialize_seq(Some(xs.len()))?;
    for x in xs {
        seq.serialize_element(&Digits17(*x))?;
    }
    seq.end()
}

pub fn serialize_opt_f64<S: Serializer>(x: &Option<f64>, serializer: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => serialize_f64(v, serializer),
        None => serializer.serialize_none(),
    }
}

/// Wrapper that serializes its value through [`serialize_f64`].
#[derive(Debug, Clone, Copy)]
pub struct Digits17(pub f64);

impl serde::Serialize for Digits17 {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serialize_f64(&self.0, serializer)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, -0.15000000000000002, 1e-300, 123456789.123, 0.0] {
            let s = g17(x);
            let mantissa = s.split('e').next().unwrap().trim_start_matches('-');
            assert_eq!(mantissa.chars().filter(|c| c.is_ascii_digit()).count(), 17);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }

    #[test]
    fn json_numbers() {
        let v = serde_json::to_string(&vec![Digits17(0.5), Digits17(f64::NAN)]).unwrap();
        assert_eq!(v, "[5.0000000000000000e-1,null]");
    }
}
