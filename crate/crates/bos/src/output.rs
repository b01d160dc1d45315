//! CSV and JSON writers.
//!
//! Both formats take the same `Serialize` records. Floats go through `ryu`
//! in both the `csv` and `serde_json` serializers, so every value is the
//! shortest string that round-trips, and lines end in LF.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::config::Format;

/// A serializable row with a fixed header, so empty tables still get one.
pub trait Record: Serialize {
    const HEADER: &'static [&'static str];
}

pub fn write_csv<T: Record, W: Write>(records: &[T], out: W) -> io::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .has_headers(false)
        .from_writer(out);
    w.write_record(T::HEADER)?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()
}

pub fn write_json<T: Record, W: Write>(records: &[T], mut out: W) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut out, records)?;
    out.write_all(b"\n")?;
    out.flush()
}

pub fn write_records<T: Record, W: Write>(records: &[T], format: Format, out: W) -> io::Result<()> {
    match format {
        Format::Csv => write_csv(records, out),
        Format::Json => write_json(records, out),
    }
}

/// Writes to `path`, or to standard output when `path` is `None`.
pub fn emit<T: Record>(records: &[T], format: Format, path: Option<&Path>) -> io::Result<()> {
    match path {
        Some(p) => write_records(records, format, BufWriter::new(File::create(p)?)),
        None => write_records(records, format, io::stdout().lock()),
    }
}
