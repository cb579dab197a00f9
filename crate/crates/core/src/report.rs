//! Report documents: JSON with 17-significant-digit floats, and the
//! per-orbit CSV table.

use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::Value;

use crate::lyapunov::GapScanReport;
use crate::symbolic::word_to_string;

pub const SCHEMA_VERSION: u32 = 1;

/// Name of the only field allowed to differ between two runs.
pub const WALL_TIME_FIELD: &str = "wall_time_seconds";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportDocument {
    pub schema_version: u32,
    pub tool: String,
    pub version: String,
    pub command: String,
    /// SHA-256 of the spec file bytes, when a spec file was read.
    pub spec_digest: Option<String>,
    pub parameters: Value,
    pub results: Value,
    pub wall_time_seconds: f64,
}

impl ReportDocument {
    pub fn new(tool: &str, version: &str, command: &str) -> Self {
        ReportDocument {
            schema_version: SCHEMA_VERSION,
            tool: tool.to_string(),
            version: version.to_string(),
            command: command.to_string(),
            spec_digest: None,
            parameters: Value::Null,
            results: Value::Null,
            wall_time_seconds: 0.0,
        }
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }
}

/// `printf("%.17g", x)`.
pub fn format_g17(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..17).contains(&exp) {
        let fixed = format!("{:.*}", (16 - exp) as usize, x);
        trim_fraction(&fixed).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_fraction(mantissa), sign, exp.abs())
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Pretty JSON whose floats are printed with 17 significant digits.
struct G17Formatter {
    inner: PrettyFormatter<'static>,
}

impl Formatter for G17Formatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        let s = format_g17(value);
        // JSON numbers need a fraction or exponent to stay floats on re-read
        if s.contains(['.', 'e']) {
            w.write_all(s.as_bytes())
        } else {
            write!(w, "{s}.0")
        }
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object_value(w)
    }
}

/// Serializes any report value. Non-finite floats become `null`.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    // route through Value so non-finite floats are mapped to null first
    let v = serde_json::to_value(value).expect("report values serialize");
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, G17Formatter { inner: PrettyFormatter::new() });
    v.serialize(&mut ser).expect("writing to a Vec cannot fail");
    out.push(b'\n');
    String::from_utf8(out).expect("JSON is UTF-8")
}

/// `period,word,lambda_plus`, one row per orbit in scan order.
pub fn write_orbit_csv<W: io::Write>(scan: &GapScanReport, w: W) -> csv::Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["period", "word", "lambda_plus"])?;
    for o in &scan.orbits {
        wtr.write_record([o.period.to_string(), word_to_string(o.word.word()), format_g17(o.lambda_plus)])?;
    }
    wtr.flush()?;
    Ok(())
}
