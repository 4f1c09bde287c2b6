//! Vector I/O: CSV with one value per line (optional header) or a JSON array.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// Parses a vector from text, detecting a JSON array by its leading `[`.
pub fn parse_vector(text: &str) -> Result<Vec<f64>> {
    if text.trim_start().starts_with('[') {
        return serde_json::from_str(text).map_err(|e| Error::Data(format!("JSON vector: {e}")));
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut values = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Data(format!("CSV: {e}")))?;
        if record.len() != 1 {
            return Err(Error::Data(format!(
                "line {}: expected one value per line, found {}",
                line + 1,
                record.len()
            )));
        }
        let field = &record[0];
        match field.parse::<f64>() {
            Ok(v) => values.push(v),
            Err(_) if line == 0 => continue,
            Err(_) => {
                return Err(Error::Data(format!("line {}: cannot parse {field:?}", line + 1)))
            }
        }
    }
    if values.is_empty() {
        return Err(Error::Data("no values found".into()));
    }
    Ok(values)
}

pub fn read_vector(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
    parse_vector(&text)
}

/// One value per line, LF endings, shortest representation that parses back
/// to the same double.
pub fn format_vector_csv(values: &[f64]) -> String {
    let mut out = String::with_capacity(values.len() * 20);
    for v in values {
        out.push_str(&format!("{v:?}\n"));
    }
    out
}

pub fn write_vector_csv(path: &Path, values: &[f64]) -> Result<()> {
    let mut file = fs::File::create(path)?;
    file.write_all(format_vector_csv(values).as_bytes())?;
    Ok(())
}
