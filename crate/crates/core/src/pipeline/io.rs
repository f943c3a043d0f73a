//! Count-file CSV and full-precision JSON.

use super::{check_increasing, CountRecord};
use crate::{Error, Result};
use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use std::io::{self, Read, Write};

pub const COUNT_HEADER: [&str; 5] = ["delay_fs", "coincidences", "singles_1", "singles_2", "tag"];

/// Parses a count CSV. The header must match [`COUNT_HEADER`] and delays must
/// increase strictly.
pub fn read_count_records<R: Read>(reader: R) -> Result<Vec<CountRecord>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header = rdr.headers()?.clone();
    if header.iter().ne(COUNT_HEADER) {
        return Err(Error::Parse(format!("expected header {}, got {}", COUNT_HEADER.join(","), header.iter().collect::<Vec<_>>().join(","))));
    }
    let records = rdr.deserialize().collect::<std::result::Result<Vec<CountRecord>, _>>()?;
    if records.is_empty() {
        return Err(Error::Parse("count file has no rows".into()));
    }
    check_increasing(records.iter().map(|r| r.delay))?;
    Ok(records)
}

pub fn parse_count_records(bytes: &[u8]) -> Result<Vec<CountRecord>> {
    read_count_records(bytes)
}

/// Round-trip float text: 17 significant digits.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_count_records<W: Write>(writer: W, records: &[CountRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(COUNT_HEADER)?;
    for r in records {
        w.write_record([
            format_f64(r.delay),
            r.coincidences.to_string(),
            r.singles_1.to_string(),
            r.singles_2.to_string(),
            r.integration_tag.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Pretty JSON whose floats carry 17 significant digits.
struct FullPrecision<'a>(PrettyFormatter<'a>);

impl Formatter for FullPrecision<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }
    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
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

/// Non-finite floats are written as `null`.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FullPrecision(PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    String::from_utf8(buf).map_err(|e| Error::Parse(e.to_string()))
}
