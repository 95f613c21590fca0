//! JSONL records for sampled processes.
//!
//! One record per line: `{"row": n, "atoms": [{"loc": x, "mult": k}, ...]}`.
//! Locations are written in scientific notation with 17 significant digits so
//! that parsing recovers the exact `f64`.

use std::io::{BufRead, Write};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::measures::{Location, MultisetPointProcess};

#[derive(Debug, Deserialize)]
struct AtomRecord {
    loc: f64,
    mult: u64,
}

#[derive(Debug, Deserialize)]
struct ProcessRecord {
    row: u64,
    atoms: Vec<AtomRecord>,
}

/// Render one record without the trailing newline.
pub fn format_record(row: u64, process: &MultisetPointProcess) -> String {
    let mut line = format!("{{\"row\":{row},\"atoms\":[");
    for (i, (loc, mult)) in process.entries().iter().enumerate() {
        if i > 0 {
            line.push(',');
        }
        line.push_str(&format!("{{\"loc\":{:.16e},\"mult\":{mult}}}", loc.value()));
    }
    line.push_str("]}");
    line
}

pub fn write_record<W: Write>(out: &mut W, row: u64, process: &MultisetPointProcess) -> Result<()> {
    writeln!(out, "{}", format_record(row, process))?;
    Ok(())
}

pub fn parse_record(line: &str) -> Result<(u64, MultisetPointProcess)> {
    let rec: ProcessRecord = serde_json::from_str(line)?;
    if rec.atoms.iter().any(|a| a.mult == 0) {
        return Err(Error::Format(format!("row {} has a zero multiplicity", rec.row)));
    }
    let entries = rec
        .atoms
        .into_iter()
        .map(|a| Location::new(a.loc).map(|l| (l, a.mult)))
        .collect::<Result<Vec<_>>>()?;
    Ok((rec.row, MultisetPointProcess::from_entries(entries)?))
}

/// Read every non-blank line of a JSONL stream.
pub fn read_records<R: BufRead>(input: R) -> Result<Vec<(u64, MultisetPointProcess)>> {
    let mut out = Vec::new();
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(parse_record(&line)?);
    }
    Ok(out)
}
