//! Report emission: JSON with 17-significant-digit floats, CSV tables and
//! validation against the published schemas.

use std::io::{self, Write};

use jsonschema::JSONSchema;
use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::Value;

use crate::CliError;

/// `{:.16e}`; non-finite values print as `NaN`/`inf`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Pretty printer that writes every float with 17 significant digits.
struct PreciseFormatter(PrettyFormatter<'static>);

impl Formatter for PreciseFormatter {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        w.write_all(fmt_f64(v).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        self.write_f64(w, v as f64)
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json_string(v: &Value) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, PreciseFormatter(PrettyFormatter::new()));
    v.serialize(&mut ser).expect("serializing a JSON value to memory cannot fail");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json writes UTF-8")
}

/// Published schema of a subcommand's configuration or report.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SchemaKind {
    Config,
    Report,
}

pub fn schema_source(command: &str, kind: SchemaKind) -> Option<&'static str> {
    Some(match (command, kind) {
        ("bbm-signal", SchemaKind::Config) => include_str!("../../../docs/schemas/bbm-signal.config.schema.json"),
        ("bbm-signal", SchemaKind::Report) => include_str!("../../../docs/schemas/bbm-signal.report.schema.json"),
        ("dg-werner", SchemaKind::Config) => include_str!("../../../docs/schemas/dg-werner.config.schema.json"),
        ("dg-werner", SchemaKind::Report) => include_str!("../../../docs/schemas/dg-werner.report.schema.json"),
        ("simulate", SchemaKind::Config) => include_str!("../../../docs/schemas/simulate.config.schema.json"),
        ("simulate", SchemaKind::Report) => include_str!("../../../docs/schemas/simulate.report.schema.json"),
        ("gauge-check", SchemaKind::Config) => include_str!("../../../docs/schemas/gauge-check.config.schema.json"),
        ("gauge-check", SchemaKind::Report) => include_str!("../../../docs/schemas/gauge-check.report.schema.json"),
        ("identical", SchemaKind::Config) => include_str!("../../../docs/schemas/identical.config.schema.json"),
        ("identical", SchemaKind::Report) => include_str!("../../../docs/schemas/identical.report.schema.json"),
        _ => return None,
    })
}

/// Validates `instance` and returns every violation, one per line.
pub fn validate(command: &str, kind: SchemaKind, instance: &Value) -> Result<(), String> {
    let src = schema_source(command, kind).ok_or_else(|| format!("no schema for `{command}`"))?;
    let schema: Value = serde_json::from_str(src).map_err(|e| format!("schema for `{command}` is not JSON: {e}"))?;
    let compiled = JSONSchema::compile(&schema).map_err(|e| format!("schema for `{command}` does not compile: {e}"))?;
    let result = compiled.validate(instance);
    if let Err(errors) = result {
        let lines: Vec<String> = errors.map(|e| format!("{}: {}", e.instance_path, e)).collect();
        return Err(lines.join("\n"));
    }
    Ok(())
}

/// Header plus rows, all pre-formatted.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("CSV fields are UTF-8"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn floats_carry_seventeen_digits() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_f64(-32.0), "-3.2000000000000000e1");
        let s = to_json_string(&json!({"a": 0.1, "b": 3, "c": [1.5]}));
        assert!(s.contains("\"a\": 1.0000000000000001e-1"), "{s}");
        assert!(s.contains("\"b\": 3"), "{s}");
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["a"], 0.1);
    }

    #[test]
    fn every_schema_compiles() {
        for cmd in ["bbm-signal", "dg-werner", "simulate", "gauge-check", "identical"] {
            for kind in [SchemaKind::Config, SchemaKind::Report] {
                let schema: Value = serde_json::from_str(schema_source(cmd, kind).unwrap()).unwrap();
                JSONSchema::compile(&schema).unwrap();
            }
        }
    }

    #[test]
    fn config_schema_rejects_unknown_fields_and_bad_types() {
        assert!(validate("bbm-signal", SchemaKind::Config, &json!({})).is_ok());
        assert!(validate("bbm-signal", SchemaKind::Config, &json!({"b": 0.5})).is_ok());
        assert!(validate("bbm-signal", SchemaKind::Config, &json!({"bee": 0.5})).is_err());
        assert!(validate("bbm-signal", SchemaKind::Config, &json!({"b": "half"})).is_err());
        let pair = json!({"initial": {"type": "symmetrized-pair", "f": "exp(-x^2)", "d": 2.0, "sigma": 1.0}});
        assert!(validate("simulate", SchemaKind::Config, &pair).is_ok());
        let bad = json!({"initial": {"type": "symmetrized-pair", "f": "exp(-x^2)", "d": 2.0, "sigma": 0.5}});
        assert!(validate("simulate", SchemaKind::Config, &bad).is_err());
    }

    #[test]
    fn csv_quotes_fields() {
        let mut t = Table::new(&["quantity", "value"]);
        t.push(vec!["raw".into(), "-32/3*pi*sqrt(3)".into()]);
        t.push(vec!["a,b".into(), "1".into()]);
        assert_eq!(t.to_csv().unwrap(), "quantity,value\nraw,-32/3*pi*sqrt(3)\n\"a,b\",1\n");
    }
}
