//! CSV and JSON writers. Floats use the shortest representation that
//! parses back to the same value.

use std::io::Write;

use crate::config::Format;
use crate::error::Result;
use crate::scenario::SweepResult;

pub fn format_float(x: f64) -> String {
    format!("{x:?}")
}

pub fn write_csv<W: Write>(result: &SweepResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&result.columns)?;
    for row in &result.rows {
        w.write_record(row.iter().map(|x| format_float(*x)))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(result: &SweepResult, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, result)?;
    out.write_all(b"\n")?;
    Ok(())
}

pub fn write_result<W: Write>(result: &SweepResult, format: Format, out: W) -> Result<()> {
    match format {
        Format::Csv => write_csv(result, out),
        Format::Json => write_json(result, out),
    }
}

pub fn read_json(text: &str) -> Result<SweepResult> {
    Ok(serde_json::from_str(text)?)
}
