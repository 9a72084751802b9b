//! Truth-table text format: a header `n=<int>`, then one `bitstring value`
//! line per defined point. Character `i` of the bitstring is `1` when
//! `x_{i+1} = -1`.

use std::fmt::Write as _;

use super::function::PartialBooleanFunction;
use crate::error::{Error, Result};

pub fn write_truth_table(f: &PartialBooleanFunction) -> String {
    let n = f.num_vars();
    let mut out = format!("n={n}\n");
    for x in f.domain() {
        let bits: String = (0..n).map(|i| if x >> i & 1 == 1 { '1' } else { '0' }).collect();
        let _ = writeln!(out, "{bits} {}", f.values()[x]);
    }
    out
}

pub fn parse_truth_table(text: &str) -> Result<PartialBooleanFunction> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| Error::Parse("empty truth table".into()))?;
    let n: usize = header
        .trim()
        .strip_prefix("n=")
        .and_then(|v| v.trim().parse().ok())
        .ok_or_else(|| Error::Parse(format!("bad header `{header}`, expected `n=<int>`")))?;
    if n > super::function::MAX_VARS {
        return Err(Error::TooLarge(format!("{n} variables")));
    }
    let mut values = vec![0i8; 1 << n];
    let mut seen = vec![false; 1 << n];
    for (lineno, line) in lines {
        let err = |msg: &str| Error::Parse(format!("line {}: {msg}", lineno + 1));
        let mut parts = line.split_whitespace();
        let (Some(bits), Some(value), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(err("expected `bitstring value`"));
        };
        if bits.len() != n || !bits.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(err(&format!("bitstring `{bits}` must have {n} binary digits")));
        }
        let x = bits.bytes().enumerate().fold(0usize, |acc, (i, b)| acc | ((b - b'0') as usize) << i);
        let v = match value {
            "1" | "+1" => 1,
            "-1" => -1,
            other => return Err(err(&format!("value `{other}` not in {{-1,1}}"))),
        };
        if std::mem::replace(&mut seen[x], true) {
            return Err(err(&format!("duplicate point `{bits}`")));
        }
        values[x] = v;
    }
    PartialBooleanFunction::from_values(n, values).map_err(|e| Error::Parse(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_byte_exact() {
        let text = "n=3\n000 1\n100 -1\n010 -1\n111 1\n";
        let f = parse_truth_table(text).unwrap();
        assert_eq!(f.domain_size(), 4);
        assert_eq!(f.get(1), Some(-1));
        assert_eq!(write_truth_table(&f), text);
    }

    #[test]
    fn catalog_functions_round_trip() {
        for name in PartialBooleanFunction::catalog_names() {
            let f = PartialBooleanFunction::catalog(name).unwrap();
            let text = write_truth_table(&f);
            let g = parse_truth_table(&text).unwrap();
            assert_eq!(f, g);
            assert_eq!(write_truth_table(&g), text);
        }
    }

    #[test]
    fn malformed_inputs() {
        assert!(parse_truth_table("").is_err());
        assert!(parse_truth_table("m=2\n").is_err());
        assert!(parse_truth_table("n=2\n0 1\n").is_err());
        assert!(parse_truth_table("n=2\n00 2\n").is_err());
        assert!(parse_truth_table("n=2\n00 1\n00 1\n").is_err());
        assert!(parse_truth_table("n=2\n").is_err());
    }
}
