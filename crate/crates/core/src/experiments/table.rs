use std::io::Write;

use crate::error::{Error, Result};

/// A result that serializes to CSV with a fixed column order.
pub trait CsvTable {
    fn header(&self) -> Vec<&'static str>;
    fn rows(&self) -> Vec<Vec<String>>;
}

pub fn write_csv<T: CsvTable + ?Sized, W: Write>(table: &T, out: W) -> Result<()> {
    let io = |e: csv::Error| Error::Io(e.to_string());
    let mut w = csv::Writer::from_writer(out);
    w.write_record(table.header()).map_err(io)?;
    for row in table.rows() {
        w.write_record(row).map_err(io)?;
    }
    w.flush().map_err(|e| Error::Io(e.to_string()))
}

/// `Some(x)` as `x`, `None` as an empty field.
pub(crate) fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}
