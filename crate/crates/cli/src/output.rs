//! Report envelopes and the json / csv / pretty renderers.
//!
//! Every numeric field goes through [`num`] or [`nums`], which print 12
//! significant digits and spell non-finite values as `"inf"`, `"-inf"` and
//! `"nan"`. The csv and pretty views are derived from the JSON text so all
//! three formats agree digit for digit.

use clap::ValueEnum;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use gfdiv::numeric::fmt_sig;

pub const SIG_DIGITS: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Pretty,
}

fn text(x: f64) -> String {
    fmt_sig(x, SIG_DIGITS)
}

fn parse_text(s: &str) -> Option<f64> {
    match s {
        "inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        "nan" => Some(f64::NAN),
        _ => None,
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum NumRepr {
    Num(f64),
    Text(String),
}

impl NumRepr {
    fn value<E: serde::de::Error>(self) -> Result<f64, E> {
        match self {
            NumRepr::Num(x) => Ok(x),
            NumRepr::Text(s) => parse_text(&s).ok_or_else(|| E::custom(format!("not a number: {s}"))),
        }
    }
}

fn raw<E: serde::ser::Error>(x: f64) -> Result<Box<serde_json::value::RawValue>, E> {
    let t = text(x);
    let t = if x.is_finite() { t } else { format!("\"{t}\"") };
    serde_json::value::RawValue::from_string(t).map_err(E::custom)
}

pub mod num {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        raw(*x)?.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        NumRepr::deserialize(d)?.value()
    }
}

pub mod nums {
    use super::*;
    use serde::ser::SerializeSeq;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(xs.len()))?;
        for &x in xs {
            seq.serialize_element(&raw::<S::Error>(x)?)?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        Vec::<NumRepr>::deserialize(d)?.into_iter().map(NumRepr::value).collect()
    }
}

pub mod opt_num {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match x {
            Some(v) => raw(*v)?.serialize(s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        Option::<NumRepr>::deserialize(d)?.map(NumRepr::value).transpose()
    }
}

/// Rounds every float in a JSON tree to 12 significant digits.
pub fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap_or(f64::NAN);
            text(x).parse::<f64>().ok().and_then(serde_json::Number::from_f64).map(Value::Number).unwrap_or(Value::Null)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_value).collect()),
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, v)| (k, round_value(v))).collect()),
        other => other,
    }
}

/// The top-level document every subcommand emits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Envelope<R> {
    pub command: String,
    pub records: Vec<R>,
}

impl<R: Serialize + DeserializeOwned> Envelope<R> {
    pub fn render(&self, format: Format) -> Result<String, serde_json::Error> {
        let json = serde_json::to_string_pretty(self)?;
        match format {
            Format::Json => Ok(json + "\n"),
            Format::Csv | Format::Pretty => {
                let v: Value = serde_json::from_str(&json)?;
                let rows = v["records"].as_array().cloned().unwrap_or_default();
                Ok(if format == Format::Csv { csv_table(&rows) } else { pretty_table(&rows) })
            }
        }
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        Value::Array(a) => a.iter().map(cell).collect::<Vec<_>>().join(";"),
        Value::Object(m) => m.iter().map(|(k, v)| format!("{k}={}", cell(v))).collect::<Vec<_>>().join(";"),
    }
}

fn columns(rows: &[Value]) -> Vec<String> {
    let mut cols: Vec<String> = Vec::new();
    for r in rows {
        if let Some(m) = r.as_object() {
            for k in m.keys() {
                if !cols.contains(k) {
                    cols.push(k.clone());
                }
            }
        }
    }
    cols
}

fn csv_table(rows: &[Value]) -> String {
    let cols = columns(rows);
    let mut w = csv::Writer::from_writer(Vec::new());
    // writing into a Vec cannot fail
    w.write_record(&cols).expect("in-memory csv");
    for r in rows {
        w.write_record(cols.iter().map(|c| cell(&r[c.as_str()]))).expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("csv is utf-8")
}

fn pretty_table(rows: &[Value]) -> String {
    let cols = columns(rows);
    let body: Vec<Vec<String>> = rows.iter().map(|r| cols.iter().map(|c| cell(&r[c.as_str()])).collect()).collect();
    let widths: Vec<usize> = cols
        .iter()
        .enumerate()
        .map(|(i, c)| body.iter().map(|row| row[i].chars().count()).chain([c.chars().count()]).max().unwrap_or(0))
        .collect();
    let line = |cells: &[String]| {
        let parts: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        parts.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(&cols);
    for row in &body {
        out.push_str(&line(row));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
    struct Row {
        name: String,
        #[serde(with = "num")]
        value: f64,
        #[serde(with = "nums")]
        probs: Vec<f64>,
        #[serde(with = "opt_num", default)]
        extra: Option<f64>,
    }

    fn sample() -> Envelope<Row> {
        Envelope {
            command: "demo".into(),
            records: vec![
                Row { name: "a".into(), value: 0.14384103622589045, probs: vec![0.5, 0.5], extra: None },
                Row { name: "b,c".into(), value: f64::INFINITY, probs: vec![1.0 / 3.0], extra: Some(-2.5e-9) },
            ],
        }
    }

    #[test]
    fn json_round_trips() {
        let text = sample().render(Format::Json).unwrap();
        assert!(text.contains("0.143841036226"));
        assert!(text.contains("\"inf\""));
        let back: Envelope<Row> = serde_json::from_str(&text).unwrap();
        assert_eq!(back.records[1].value, f64::INFINITY);
        assert_eq!(back.render(Format::Json).unwrap(), text);
    }

    #[test]
    fn csv_and_pretty_share_digits() {
        let csv = sample().render(Format::Csv).unwrap();
        assert_eq!(csv.lines().next().unwrap(), "name,value,probs,extra");
        assert!(csv.contains("a,0.143841036226,0.5;0.5,"));
        assert!(csv.contains("\"b,c\",inf,0.333333333333,-2.5e-9"));
        let pretty = sample().render(Format::Pretty).unwrap();
        assert!(pretty.lines().nth(1).unwrap().starts_with("a     0.143841036226"));
    }

    #[test]
    fn rounding_json_trees() {
        let v = round_value(serde_json::json!({"x": 0.1234567890123456, "n": 3, "v": [2.0f64.sqrt()]}));
        assert_eq!(v.to_string(), r#"{"x":0.123456789012,"n":3,"v":[1.41421356237]}"#);
    }
}
