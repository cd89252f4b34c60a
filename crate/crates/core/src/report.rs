//! Serialization of audit reports.
//!
//! Floating-point numbers are written with 17 significant digits, trailing
//! zeros removed, so every `f64` round-trips exactly.

use std::io;

use serde::Serialize;
use serde_json::ser::Formatter;

use crate::inequalities::CheckReport;

/// `v` with 17 significant digits. Positional notation is used for decimal
/// exponents in [-5, 17), scientific notation otherwise.
pub fn format_sig17(v: f64) -> String {
    if !v.is_finite() {
        return if v.is_nan() {
            "NaN".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    if v == 0.0 {
        return if v.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.16e}", v);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    let digits = digits.trim_end_matches('0');
    let digits = if digits.is_empty() { "0" } else { digits };

    if (-5..17).contains(&exp) {
        let n = digits.len() as i32;
        let body = if exp < 0 {
            format!("0.{}{}", "0".repeat((-exp - 1) as usize), digits)
        } else if exp + 1 >= n {
            format!("{}{}", digits, "0".repeat((exp + 1 - n) as usize))
        } else {
            let (int, frac) = digits.split_at((exp + 1) as usize);
            format!("{int}.{frac}")
        };
        format!("{sign}{body}")
    } else {
        let (first, rest) = digits.split_at(1);
        if rest.is_empty() {
            format!("{sign}{first}e{exp}")
        } else {
            format!("{sign}{first}.{rest}e{exp}")
        }
    }
}

/// A compact JSON formatter that writes floats via [`format_sig17`].
/// Non-finite values become `null`.
#[derive(Default)]
pub struct Sig17Formatter;

impl Formatter for Sig17Formatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            writer.write_all(format_sig17(value).as_bytes())
        } else {
            writer.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Serializes `value` as one line of JSON with 17-digit floats.
pub fn to_json<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Sig17Formatter);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(out).expect("serde_json writes UTF-8"))
}

pub const CSV_HEADER: [&str; 13] = [
    "report",
    "subject",
    "inequality",
    "from_proof",
    "pairs_tested",
    "failures",
    "inconclusive",
    "min_margin",
    "worst_x",
    "worst_y",
    "worst_lhs",
    "worst_rhs",
    "preconditions",
];

/// One CSV row per inequality, with a header row.
pub fn write_csv<W: io::Write>(reports: &[CheckReport], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in reports {
        let pre = r
            .preconditions
            .iter()
            .map(|p| format!("{}={:?}", p.name, p.status))
            .collect::<Vec<_>>()
            .join(";");
        for q in &r.inequalities {
            let worst = |get: fn(&crate::inequalities::PairWitness) -> f64| {
                q.worst_witness.as_ref().map(|w| format_sig17(get(w))).unwrap_or_default()
            };
            w.write_record([
                r.name.clone(),
                r.subject.clone(),
                q.description.clone(),
                q.from_proof.to_string(),
                q.pairs_tested.to_string(),
                q.failures.to_string(),
                q.inconclusive.to_string(),
                format_sig17(q.min_margin),
                worst(|w| w.x),
                worst(|w| w.y),
                worst(|w| w.lhs),
                worst(|w| w.rhs),
                pre.clone(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats() {
        assert_eq!(format_sig17(1.0), "1");
        assert_eq!(format_sig17(-2.5), "-2.5");
        assert_eq!(format_sig17(0.1), "0.10000000000000001");
        assert_eq!(format_sig17(1e-5), "0.000010000000000000001");
        assert_eq!(format_sig17(1e-6), "9.9999999999999995e-7");
        assert_eq!(format_sig17(1e16), "10000000000000000");
        assert_eq!(format_sig17(1e17), "1e17");
        assert_eq!(format_sig17(123.0), "123");
        assert_eq!(format_sig17(std::f64::consts::E - 1.0), "1.7182818284590451");
        assert_eq!(format_sig17(0.0), "0");
    }

    #[test]
    fn round_trips() {
        let mut s = 0x1234_5678_9abc_def0u64;
        for _ in 0..20_000 {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            let v = f64::from_bits(s);
            if v.is_finite() {
                assert_eq!(format_sig17(v).parse::<f64>().unwrap().to_bits(), v.to_bits());
            }
        }
    }
}
