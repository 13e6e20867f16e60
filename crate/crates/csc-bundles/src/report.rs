//! Machine-readable run reports.
//!
//! Every command emits one JSON envelope with a fixed set of top-level
//! keys: schema, command, params, results, tolerances, pass. Floats are
//! rendered with 17 significant digits so a report round-trips bit-exactly
//! through any conforming JSON parser; map keys serialize in sorted order,
//! which makes equal runs byte-identical.

use std::collections::BTreeMap;
use std::io::{self, Write};

use serde::Serialize;
use serde_json::Value;

pub const SCHEMA_ID: &str = "csc-bundles/1";

#[derive(Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: &'static str,
    pub params: BTreeMap<String, Value>,
    pub results: Value,
    pub tolerances: BTreeMap<String, f64>,
    pub pass: bool,
}

impl Report {
    pub fn new(command: &'static str) -> Self {
        Report {
            schema: SCHEMA_ID,
            command,
            params: BTreeMap::new(),
            results: Value::Null,
            tolerances: BTreeMap::new(),
            pass: false,
        }
    }

    pub fn param(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn tolerance(&mut self, key: &str, value: f64) -> &mut Self {
        self.tolerances.insert(key.to_string(), value);
        self
    }

    /// The serialized envelope, newline-terminated.
    pub fn to_json(&self) -> String {
        let mut buf = Vec::new();
        let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigFigFormatter);
        self.serialize(&mut ser)
            .expect("report serialization cannot fail");
        buf.push(b'\n');
        String::from_utf8(buf).expect("serialized JSON is UTF-8")
    }
}

/// Compact JSON with every f64 printed as 17 significant digits.
struct SigFigFormatter;

impl serde_json::ser::Formatter for SigFigFormatter {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }
}

/// The float rendering used in CSV cells, matching the JSON one.
pub fn fmt_f64(value: f64) -> String {
    format!("{value:.16e}")
}
