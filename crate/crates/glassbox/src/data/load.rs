//! CSV ingestion against a declared schema.

use std::collections::HashSet;
use std::path::Path;

use serde::Deserialize;

use crate::data::{Column, ColumnKind, ColumnValues, Schema, Table};
use crate::error::{Error, Result};

fn default_na_tokens() -> Vec<String> {
    vec!["".into(), "NaN".into(), "NA".into()]
}

/// User-supplied schema description. Columns not named here are numeric.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemaSpec {
    #[serde(default)]
    pub key_column: Option<String>,
    #[serde(default)]
    pub target_column: Option<String>,
    #[serde(default)]
    pub categorical: Vec<String>,
    #[serde(default = "default_na_tokens")]
    pub na_tokens: Vec<String>,
}

impl Default for SchemaSpec {
    fn default() -> Self {
        SchemaSpec {
            key_column: None,
            target_column: None,
            categorical: Vec::new(),
            na_tokens: default_na_tokens(),
        }
    }
}

impl SchemaSpec {
    pub fn from_toml_str(s: &str) -> Result<SchemaSpec> {
        toml::from_str(s).map_err(|e| Error::Config(format!("schema file: {e}")))
    }

    pub fn from_toml_file(path: &Path) -> Result<SchemaSpec> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("schema file {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// Assign a kind to every header column.
    pub fn schema_for(&self, header: &[String]) -> Result<Schema> {
        let columns = header
            .iter()
            .map(|name| {
                let kind = if Some(name) == self.key_column.as_ref() {
                    ColumnKind::Key
                } else if Some(name) == self.target_column.as_ref() {
                    ColumnKind::Target
                } else if self.categorical.iter().any(|c| c == name) {
                    ColumnKind::Categorical
                } else {
                    ColumnKind::Numeric
                };
                (name.clone(), kind)
            })
            .collect();
        Schema::new(columns)
    }
}

/// Read the header row of a CSV file.
pub fn sniff_header(path: &Path) -> Result<Vec<String>> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| Error::Csv(format!("{}: {e}", path.display())))?;
    let header = reader
        .headers()
        .map_err(|e| Error::Csv(format!("{}: {e}", path.display())))?;
    Ok(header.iter().map(|s| s.to_string()).collect())
}

/// Load an RFC 4180 CSV into a [`Table`]. The header must contain exactly
/// the schema's column names (order-insensitive); the resulting table uses
/// schema order. Declared NA tokens and numeric parse failures are marked
/// missing.
pub fn load_csv(path: &Path, schema: &Schema, na_tokens: &[String]) -> Result<Table> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(false)
        .from_path(path)
        .map_err(|e| Error::Csv(format!("{}: {e}", path.display())))?;

    let header: Vec<String> = reader
        .headers()
        .map_err(|e| Error::Csv(format!("{}: {e}", path.display())))?
        .iter()
        .map(|s| s.to_string())
        .collect();

    let header_set: HashSet<&str> = header.iter().map(|s| s.as_str()).collect();
    let schema_set: HashSet<&str> = schema.columns().iter().map(|(n, _)| n.as_str()).collect();
    if header_set != schema_set {
        let missing: Vec<_> = schema_set.difference(&header_set).collect();
        let extra: Vec<_> = header_set.difference(&schema_set).collect();
        return Err(Error::Schema(format!(
            "{}: header does not match schema (missing: {missing:?}, unexpected: {extra:?})",
            path.display()
        )));
    }

    // field index in the file for each schema column
    let field_of: Vec<usize> = schema
        .columns()
        .iter()
        .map(|(n, _)| header.iter().position(|h| h == n).unwrap())
        .collect();

    let is_na = |s: &str| na_tokens.iter().any(|t| t == s);

    let mut builders: Vec<(ColumnKind, Vec<f64>, Vec<String>, Vec<bool>)> = schema
        .columns()
        .iter()
        .map(|(_, k)| (*k, Vec::new(), Vec::new(), Vec::new()))
        .collect();

    for (row_idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| {
            // csv reports 1-based line numbers in its positions; fall back to
            // the data row index when absent.
            let line = e
                .position()
                .map(|p| p.line().to_string())
                .unwrap_or_else(|| format!("{}", row_idx + 2));
            Error::Csv(format!("{} line {line}: {e}", path.display()))
        })?;
        if record.len() != header.len() {
            let line = record
                .position()
                .map(|p| p.line().to_string())
                .unwrap_or_else(|| format!("{}", row_idx + 2));
            return Err(Error::Csv(format!(
                "{} line {line}: expected {} fields, found {}",
                path.display(),
                header.len(),
                record.len()
            )));
        }
        for (col_idx, (kind, nums, cats, mask)) in builders.iter_mut().enumerate() {
            let raw = record.get(field_of[col_idx]).unwrap_or("");
            match kind {
                ColumnKind::Numeric | ColumnKind::Target => {
                    if is_na(raw) {
                        nums.push(f64::NAN);
                        mask.push(true);
                    } else {
                        match raw.trim().parse::<f64>() {
                            Ok(v) => {
                                nums.push(v);
                                mask.push(false);
                            }
                            Err(_) => {
                                nums.push(f64::NAN);
                                mask.push(true);
                            }
                        }
                    }
                }
                ColumnKind::Categorical | ColumnKind::Key => {
                    if is_na(raw) {
                        cats.push(String::new());
                        mask.push(true);
                    } else {
                        cats.push(raw.to_string());
                        mask.push(false);
                    }
                }
            }
        }
    }

    let columns = builders
        .into_iter()
        .map(|(kind, nums, cats, mask)| match kind {
            ColumnKind::Numeric | ColumnKind::Target => Column {
                values: ColumnValues::Numeric(nums),
                missing: mask,
            },
            ColumnKind::Categorical | ColumnKind::Key => Column {
                values: ColumnValues::Categorical(cats),
                missing: mask,
            },
        })
        .collect();

    Table::new(schema.clone(), columns)
}
