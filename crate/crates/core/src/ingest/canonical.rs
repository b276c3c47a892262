use std::io;

use serde::Serialize;
use serde_json::ser::Formatter;

/// Compact JSON with every float written as 17 significant digits in
/// scientific notation, so values survive a round trip bit for bit.
#[derive(Debug, Clone, Copy, Default)]
pub struct CanonicalFormatter;

impl Formatter for CanonicalFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

/// Serializes with sorted object keys and [`CanonicalFormatter`], plus a trailing newline.
pub fn to_canonical_json<T: Serialize>(value: &T) -> serde_json::Result<String> {
    // Value's map is ordered by key.
    let tree = serde_json::to_value(value)?;
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, CanonicalFormatter);
    tree.serialize(&mut ser)?;
    out.push(b'\n');
    Ok(String::from_utf8(out).expect("serde_json writes UTF-8"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    #[test]
    fn keys_sorted_and_floats_fixed() {
        let mut m = HashMap::new();
        m.insert("b", 0.1);
        m.insert("a", 2.0);
        assert_eq!(
            to_canonical_json(&m).unwrap(),
            "{\"a\":2.0000000000000000e0,\"b\":1.0000000000000001e-1}\n"
        );
    }

    #[test]
    fn floats_round_trip_exactly() {
        let xs = vec![0.1, 1.0 / 3.0, -2.5e-300, 123456.789, f64::MAX, f64::MIN_POSITIVE];
        let s = to_canonical_json(&xs).unwrap();
        let back: Vec<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, xs);
        assert_eq!(to_canonical_json(&back).unwrap(), s);
    }

    #[test]
    fn integers_stay_integers() {
        assert_eq!(to_canonical_json(&vec![1u32, 2]).unwrap(), "[1,2]\n");
    }
}
