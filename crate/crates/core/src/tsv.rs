//! Minimal reader for the tab-separated data files used throughout the crate.
//!
//! Blank lines and lines whose first non-blank character is `#` are skipped.
//! Line numbers are 1-based and refer to the physical line in the source.

use std::io::BufRead;

use crate::error::DataError;

pub(crate) struct Record {
    pub line: usize,
    pub fields: Vec<String>,
}

pub(crate) fn read_records<R: BufRead>(source: R) -> Result<Vec<Record>, DataError> {
    let mut out = Vec::new();
    for (i, line) in source.lines().enumerate() {
        let line = line?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        let trimmed = line.trim_start();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        out.push(Record {
            line: i + 1,
            fields: line.split('\t').map(str::to_owned).collect(),
        });
    }
    Ok(out)
}

impl Record {
    pub fn expect_columns(&self, n: usize) -> Result<(), DataError> {
        if self.fields.len() != n {
            return Err(DataError::line(
                self.line,
                format!("expected {n} tab-separated columns, found {}", self.fields.len()),
            ));
        }
        Ok(())
    }
}
