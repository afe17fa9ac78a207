//! Versioned CSV tables and 8-bit PNM images.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{LabError, LabResult};

/// Schema version written in the first line of every CSV.
pub const CSV_VERSION: u32 = 1;

/// A table written as `# semipar-csv v1 <name>` followed by a header row.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_bytes(&self) -> LabResult<Vec<u8>> {
        let mut buf = format!("# semipar-csv v{CSV_VERSION} {}\n", self.name).into_bytes();
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(&self.columns).map_err(csv_error)?;
            for row in &self.rows {
                w.write_record(row).map_err(csv_error)?;
            }
            w.flush()?;
        }
        Ok(buf)
    }

    /// Write to `dir/<name>.csv`.
    pub fn write(&self, dir: &Path) -> LabResult<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join(format!("{}.csv", self.name)), self.to_bytes()?)?;
        Ok(())
    }
}

fn csv_error(e: csv::Error) -> LabError {
    LabError::Io(std::io::Error::other(e))
}

/// Read a table written by [`Table::write`].
pub fn read_table(path: &Path) -> LabResult<Table> {
    let text = fs::read_to_string(path)?;
    let (first, rest) = text.split_once('\n').unwrap_or((&text, ""));
    let name = first
        .strip_prefix(&format!("# semipar-csv v{CSV_VERSION} "))
        .ok_or_else(|| LabError::Config(format!("{}: missing or unsupported CSV header", path.display())))?;
    let mut reader = csv::Reader::from_reader(rest.as_bytes());
    let columns = reader.headers().map_err(csv_error)?.iter().map(String::from).collect();
    let rows = reader
        .records()
        .map(|r| r.map(|rec| rec.iter().map(String::from).collect()).map_err(csv_error))
        .collect::<LabResult<_>>()?;
    Ok(Table { name: name.to_string(), columns, rows })
}

/// Write a binary graymap (`P5`).
pub fn write_pgm(path: &Path, width: usize, height: usize, pixels: &[u8]) -> LabResult<()> {
    assert_eq!(pixels.len(), width * height);
    let mut f = fs::File::create(path)?;
    write!(f, "P5\n{width} {height}\n255\n")?;
    f.write_all(pixels)?;
    Ok(())
}

/// Write a binary pixmap (`P6`).
pub fn write_ppm(path: &Path, width: usize, height: usize, pixels: &[[u8; 3]]) -> LabResult<()> {
    assert_eq!(pixels.len(), width * height);
    let mut f = fs::File::create(path)?;
    write!(f, "P6\n{width} {height}\n255\n")?;
    f.write_all(&pixels.concat())?;
    Ok(())
}
