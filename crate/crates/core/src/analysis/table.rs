//! CSV form of a [`Sheet`].
//!
//! Header is fixed, rows are LF-terminated, numbers carry six significant
//! digits, and both frequency columns spell their sentinel `#Div/0!` as the
//! original spreadsheet did. The column decides what the sentinel means:
//! division by zero in `nu_dw_hz`, the divergence limit in `nu_dw_x_hz`.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use super::sheet::{sha256_hex, LinkRecord, Sheet, SheetMeta};
use super::AnalysisError;
use crate::linkmodel::{Resolution, Timestamp};

pub const HEADER: [&str; 8] = [
    "target",
    "progress_pct",
    "f_xy",
    "t",
    "epsilon_lm",
    "delta_t_s",
    "nu_dw_hz",
    "nu_dw_x_hz",
];

pub const SENTINEL: &str = "#Div/0!";

/// Formats `v` with six significant digits, fixed-point where that stays
/// readable and exponent form otherwise.
pub fn sig6(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    // exponent after rounding to six digits, so 999999.6 counts as 1e6
    let sci = format!("{v:.5e}");
    let exp: i32 = sci[sci.find('e').map_or(0, |i| i + 1)..].parse().unwrap_or(0);
    if (-5..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        format!("{v:.decimals$}")
    } else {
        sci
    }
}

fn resolution_cell(r: &Resolution) -> String {
    match r {
        Resolution::Hz(v) => sig6(*v),
        Resolution::DivByZero | Resolution::Divergent => SENTINEL.into(),
    }
}

/// Writes the CSV text of `sheet` to any writer.
pub fn write_csv<W: Write>(sheet: &Sheet, out: W) -> Result<(), csv::Error> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(HEADER)?;
    for r in &sheet.records {
        w.write_record([
            r.target_name.clone(),
            sig6(r.progress_pct),
            r.f_xy_label.clone(),
            r.t_stamp.to_string(),
            sig6(r.epsilon_lm),
            sig6(r.delta_t_s),
            resolution_cell(&r.nu_delta_omega_hz),
            resolution_cell(&r.nu_displaced_hz),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(sheet: &Sheet, path: impl AsRef<Path>) -> Result<(), AnalysisError> {
    let path = path.as_ref();
    let mut buf = Vec::new();
    write_csv(sheet, &mut buf).map_err(|e| AnalysisError::Sheet(e.to_string()))?;
    fs::write(path, buf).map_err(|e| AnalysisError::io(path, e))
}

fn parse_err(line: u64, message: impl Into<String>) -> AnalysisError {
    AnalysisError::Parse {
        line,
        message: message.into(),
    }
}

fn number(line: u64, column: &str, cell: &str) -> Result<f64, AnalysisError> {
    if cell.starts_with('#') {
        return Err(parse_err(line, format!("unknown sentinel '{cell}' in column {column}")));
    }
    let v: f64 = cell
        .parse()
        .map_err(|_| parse_err(line, format!("bad number '{cell}' in column {column}")))?;
    if !v.is_finite() {
        return Err(parse_err(line, format!("non-finite value '{cell}' in column {column}")));
    }
    Ok(v)
}

fn resolution(line: u64, column: &str, cell: &str, sentinel: Resolution) -> Result<Resolution, AnalysisError> {
    if cell == SENTINEL {
        return Ok(sentinel);
    }
    number(line, column, cell).map(Resolution::Hz)
}

/// Parses CSV text produced by [`write_csv`].
pub fn read_csv<R: Read>(input: R) -> Result<Sheet, AnalysisError> {
    let mut raw = Vec::new();
    let mut input = input;
    input
        .read_to_end(&mut raw)
        .map_err(|e| parse_err(0, format!("read failed: {e}")))?;
    let digest = sha256_hex(&raw);

    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(raw.as_slice());
    let mut rows = rdr.records();
    let header = match rows.next() {
        Some(h) => h.map_err(|e| parse_err(1, e.to_string()))?,
        None => return Err(parse_err(1, "missing header")),
    };
    if header.iter().ne(HEADER) {
        return Err(parse_err(1, format!("unexpected header '{}'", header.iter().collect::<Vec<_>>().join(","))));
    }

    let mut records = Vec::new();
    for row in rows {
        let row = row.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(line, e.to_string())
        })?;
        let line = row.position().map_or(0, |p| p.line());
        if row.len() != HEADER.len() {
            return Err(parse_err(line, format!("expected {} fields, got {}", HEADER.len(), row.len())));
        }
        let t_stamp: Timestamp = row[3]
            .parse()
            .map_err(|_| parse_err(line, format!("bad timestamp '{}'", &row[3])))?;
        records.push(LinkRecord {
            target_name: row[0].to_string(),
            progress_pct: number(line, HEADER[1], &row[1])?,
            f_xy_label: row[2].to_string(),
            t_stamp,
            epsilon_lm: number(line, HEADER[4], &row[4])?,
            delta_t_s: number(line, HEADER[5], &row[5])?,
            nu_delta_omega_hz: resolution(line, HEADER[6], &row[6], Resolution::DivByZero)?,
            nu_displaced_hz: resolution(line, HEADER[7], &row[7], Resolution::Divergent)?,
        });
    }
    Ok(Sheet {
        records,
        meta: SheetMeta {
            config_digest: digest,
            generated_at: None,
        },
    })
}

pub fn parse_csv(path: impl AsRef<Path>) -> Result<Sheet, AnalysisError> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|e| AnalysisError::io(path, e))?;
    read_csv(file)
}
