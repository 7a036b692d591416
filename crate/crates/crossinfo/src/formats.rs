//! On-disk formats: CSV tables, JSON-lines records and mode-field dumps.
//!
//! Floats in CSV and text dumps are written with 17 significant digits so
//! that they parse back to the identical `f64`.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::Serialize;

use crate::config::DumpFormat;

/// `x` with 17 significant digits, `.` as decimal separator.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv<I, R>(path: &Path, header: &[String], rows: I) -> io::Result<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()
}

pub fn write_jsonl<T: Serialize>(path: &Path, records: &[T]) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    w.flush()
}

/// A real field on an `nx × ny` rectangle, row-major (y fastest).
#[derive(Debug, Clone, PartialEq)]
pub struct ModeDump {
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
    pub eigenvalue: f64,
    pub values: Vec<f64>,
}

fn invalid(msg: impl Into<String>) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, msg.into())
}

impl ModeDump {
    pub fn write(&self, path: &Path, format: DumpFormat) -> io::Result<()> {
        assert_eq!(self.values.len(), self.nx * self.ny);
        let mut w = BufWriter::new(File::create(path)?);
        match format {
            DumpFormat::Text => {
                writeln!(
                    w,
                    "{} {} {} {} {}",
                    self.nx,
                    self.ny,
                    fmt_f64(self.dx),
                    fmt_f64(self.dy),
                    fmt_f64(self.eigenvalue)
                )?;
                for row in self.values.chunks(self.ny.max(1)) {
                    let line: Vec<String> = row.iter().map(|&v| fmt_f64(v)).collect();
                    writeln!(w, "{}", line.join(" "))?;
                }
            }
            DumpFormat::Binary => {
                w.write_all(&(self.nx as u64).to_le_bytes())?;
                w.write_all(&(self.ny as u64).to_le_bytes())?;
                for x in [self.dx, self.dy, self.eigenvalue].iter().chain(&self.values) {
                    w.write_all(&x.to_le_bytes())?;
                }
            }
        }
        w.flush()
    }

    pub fn read(path: &Path, format: DumpFormat) -> io::Result<Self> {
        match format {
            DumpFormat::Text => Self::read_text(BufReader::new(File::open(path)?)),
            DumpFormat::Binary => {
                let mut bytes = Vec::new();
                File::open(path)?.read_to_end(&mut bytes)?;
                Self::from_binary(&bytes)
            }
        }
    }

    fn read_text(r: impl BufRead) -> io::Result<Self> {
        let mut lines = r.lines();
        let header = lines.next().ok_or_else(|| invalid("empty mode dump"))??;
        let h: Vec<&str> = header.split_whitespace().collect();
        if h.len() != 5 {
            return Err(invalid("mode dump header needs nx ny dx dy eigenvalue"));
        }
        let int = |s: &str| s.parse::<usize>().map_err(|e| invalid(format!("bad header integer `{s}`: {e}")));
        let float = |s: &str| s.parse::<f64>().map_err(|e| invalid(format!("bad number `{s}`: {e}")));
        let (nx, ny) = (int(h[0])?, int(h[1])?);
        let mut values = Vec::with_capacity(nx * ny);
        for line in lines {
            for tok in line?.split_whitespace() {
                values.push(float(tok)?);
            }
        }
        if values.len() != nx * ny {
            return Err(invalid(format!("expected {} values, found {}", nx * ny, values.len())));
        }
        Ok(ModeDump {
            nx,
            ny,
            dx: float(h[2])?,
            dy: float(h[3])?,
            eigenvalue: float(h[4])?,
            values,
        })
    }

    fn from_binary(bytes: &[u8]) -> io::Result<Self> {
        if bytes.len() < 40 || !(bytes.len() - 16).is_multiple_of(8) {
            return Err(invalid("truncated binary mode dump"));
        }
        let u = |i: usize| u64::from_le_bytes(bytes[i..i + 8].try_into().unwrap()) as usize;
        let f = |i: usize| f64::from_le_bytes(bytes[i..i + 8].try_into().unwrap());
        let (nx, ny) = (u(0), u(8));
        let count = (bytes.len() - 40) / 8;
        if count != nx * ny {
            return Err(invalid(format!("expected {} values, found {count}", nx * ny)));
        }
        Ok(ModeDump {
            nx,
            ny,
            dx: f(16),
            dy: f(24),
            eigenvalue: f(32),
            values: (0..count).map(|k| f(40 + 8 * k)).collect(),
        })
    }
}
