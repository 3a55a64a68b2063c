//! Tabular ingestion: schemas, tables with explicit missing-masks, label
//! encoding, and the transforms that turn raw CSV pairs into a numeric
//! training matrix.

mod load;
mod transform;

pub use load::{load_csv, sniff_header, SchemaSpec};
pub use transform::{drop_columns, impute, label_encode, left_join, stratified_split};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Role a column plays in the pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnKind {
    Numeric,
    Categorical,
    /// Join key; dropped before modeling.
    Key,
    /// Binary label column.
    Target,
}

/// Ordered column list with kinds. Column names are unique; at most one
/// key column and at most one target column.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schema {
    columns: Vec<(String, ColumnKind)>,
}

impl Schema {
    pub fn new(columns: Vec<(String, ColumnKind)>) -> Result<Schema> {
        let mut seen = std::collections::HashSet::new();
        let mut keys = 0;
        let mut targets = 0;
        for (name, kind) in &columns {
            if !seen.insert(name.clone()) {
                return Err(Error::Schema(format!("duplicate column name `{name}`")));
            }
            match kind {
                ColumnKind::Key => keys += 1,
                ColumnKind::Target => targets += 1,
                _ => {}
            }
        }
        if keys > 1 {
            return Err(Error::Schema(format!("{keys} key columns; at most one allowed")));
        }
        if targets > 1 {
            return Err(Error::Schema(format!(
                "{targets} target columns; at most one allowed"
            )));
        }
        Ok(Schema { columns })
    }

    pub fn columns(&self) -> &[(String, ColumnKind)] {
        &self.columns
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|(n, _)| n == name)
    }

    pub fn kind_of(&self, name: &str) -> Option<ColumnKind> {
        self.columns
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, k)| *k)
    }

    pub fn names(&self) -> Vec<String> {
        self.columns.iter().map(|(n, _)| n.clone()).collect()
    }

    pub fn key_column(&self) -> Option<&str> {
        self.columns
            .iter()
            .find(|(_, k)| *k == ColumnKind::Key)
            .map(|(n, _)| n.as_str())
    }

    pub fn target_column(&self) -> Option<&str> {
        self.columns
            .iter()
            .find(|(_, k)| *k == ColumnKind::Target)
            .map(|(n, _)| n.as_str())
    }
}

/// Per-column value storage. Numeric, key, and target columns hold floats;
/// categorical and key columns hold raw strings until encoding.
#[derive(Debug, Clone, PartialEq)]
pub enum ColumnValues {
    Numeric(Vec<f64>),
    Categorical(Vec<String>),
}

impl ColumnValues {
    pub fn len(&self) -> usize {
        match self {
            ColumnValues::Numeric(v) => v.len(),
            ColumnValues::Categorical(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// One column: values plus an explicit missing-mask. A set mask bit means
/// the value slot is undefined.
#[derive(Debug, Clone)]
pub struct Column {
    pub values: ColumnValues,
    pub missing: Vec<bool>,
}

/// Equality ignores the payload of masked slots (their value is
/// undefined) and compares unmasked floats by bit pattern.
impl PartialEq for Column {
    fn eq(&self, other: &Self) -> bool {
        if self.missing != other.missing {
            return false;
        }
        match (&self.values, &other.values) {
            (ColumnValues::Numeric(a), ColumnValues::Numeric(b)) => {
                a.len() == b.len()
                    && self
                        .missing
                        .iter()
                        .enumerate()
                        .all(|(i, &m)| m || a[i].to_bits() == b[i].to_bits())
            }
            (ColumnValues::Categorical(a), ColumnValues::Categorical(b)) => {
                a.len() == b.len()
                    && self
                        .missing
                        .iter()
                        .enumerate()
                        .all(|(i, &m)| m || a[i] == b[i])
            }
            _ => false,
        }
    }
}

impl Column {
    pub fn numeric(values: Vec<f64>, missing: Vec<bool>) -> Column {
        assert_eq!(values.len(), missing.len());
        Column {
            values: ColumnValues::Numeric(values),
            missing,
        }
    }

    pub fn categorical(values: Vec<String>, missing: Vec<bool>) -> Column {
        assert_eq!(values.len(), missing.len());
        Column {
            values: ColumnValues::Categorical(values),
            missing,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn has_missing(&self) -> bool {
        self.missing.iter().any(|&m| m)
    }

    fn select(&self, idx: &[usize]) -> Column {
        let missing = idx.iter().map(|&i| self.missing[i]).collect();
        let values = match &self.values {
            ColumnValues::Numeric(v) => ColumnValues::Numeric(idx.iter().map(|&i| v[i]).collect()),
            ColumnValues::Categorical(v) => {
                ColumnValues::Categorical(idx.iter().map(|&i| v[i].clone()).collect())
            }
        };
        Column { values, missing }
    }
}

/// Immutable columnar table. All operations return new tables.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    schema: Schema,
    columns: Vec<Column>,
    n_rows: usize,
}

impl Table {
    pub fn new(schema: Schema, columns: Vec<Column>) -> Result<Table> {
        if schema.len() != columns.len() {
            return Err(Error::Data(format!(
                "schema has {} columns but {} were supplied",
                schema.len(),
                columns.len()
            )));
        }
        let n_rows = columns.first().map_or(0, |c| c.len());
        for ((name, _), col) in schema.columns().iter().zip(&columns) {
            if col.len() != n_rows {
                return Err(Error::Data(format!(
                    "column `{name}` has {} rows, expected {n_rows}",
                    col.len()
                )));
            }
            if col.missing.len() != col.len() {
                return Err(Error::Data(format!("column `{name}` mask length mismatch")));
            }
        }
        Ok(Table {
            schema,
            columns,
            n_rows,
        })
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn column(&self, name: &str) -> Result<&Column> {
        let idx = self
            .schema
            .index_of(name)
            .ok_or_else(|| Error::Data(format!("unknown column `{name}`")))?;
        Ok(&self.columns[idx])
    }

    pub fn column_at(&self, idx: usize) -> &Column {
        &self.columns[idx]
    }

    /// New table containing the given rows, in the given order.
    pub fn select_rows(&self, idx: &[usize]) -> Table {
        Table {
            schema: self.schema.clone(),
            columns: self.columns.iter().map(|c| c.select(idx)).collect(),
            n_rows: idx.len(),
        }
    }

    /// Extract the named feature columns as a numeric matrix. Every named
    /// column must be numeric (run `impute` and `label_encode` first).
    pub fn to_matrix(&self, feature_names: &[String]) -> Result<Matrix> {
        let mut cols = Vec::with_capacity(feature_names.len());
        for name in feature_names {
            let col = self.column(name)?;
            match &col.values {
                ColumnValues::Numeric(v) => {
                    if col.has_missing() {
                        return Err(Error::Data(format!(
                            "column `{name}` still has missing values; impute first"
                        )));
                    }
                    cols.push(v.clone());
                }
                ColumnValues::Categorical(_) => {
                    return Err(Error::Data(format!(
                        "column `{name}` is categorical; label-encode first"
                    )));
                }
            }
        }
        Matrix::from_columns(cols)
    }

    /// Names of feature columns: everything except key and target.
    pub fn feature_names(&self) -> Vec<String> {
        self.schema
            .columns()
            .iter()
            .filter(|(_, k)| !matches!(k, ColumnKind::Key | ColumnKind::Target))
            .map(|(n, _)| n.clone())
            .collect()
    }

    /// Binary labels from the target column. Values must be 0 or 1.
    pub fn labels(&self) -> Result<Vec<u8>> {
        let target = self
            .schema
            .target_column()
            .ok_or_else(|| Error::Data("table has no target column".into()))?
            .to_string();
        let col = self.column(&target)?;
        match &col.values {
            ColumnValues::Numeric(v) => v
                .iter()
                .zip(&col.missing)
                .map(|(x, &m)| {
                    if m {
                        Err(Error::Data(format!("missing value in target `{target}`")))
                    } else if *x == 0.0 {
                        Ok(0)
                    } else if *x == 1.0 {
                        Ok(1)
                    } else {
                        Err(Error::Data(format!(
                            "target `{target}` has non-binary value {x}"
                        )))
                    }
                })
                .collect(),
            ColumnValues::Categorical(_) => Err(Error::Data(format!(
                "target `{target}` is categorical; expected numeric 0/1"
            ))),
        }
    }
}

/// Dense label-encoding map: per categorical column, categories in
/// first-appearance order (code = position). Unseen categories map to the
/// reserved code `categories.len()`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodingMap {
    pub columns: BTreeMap<String, Vec<String>>,
}

impl EncodingMap {
    pub fn code_for(&self, column: &str, category: &str) -> Option<usize> {
        let cats = self.columns.get(column)?;
        Some(
            cats.iter()
                .position(|c| c == category)
                .unwrap_or(cats.len()),
        )
    }

    /// Inverse lookup for seen codes.
    pub fn decode(&self, column: &str, code: usize) -> Option<&str> {
        self.columns
            .get(column)
            .and_then(|cats| cats.get(code))
            .map(|s| s.as_str())
    }

    /// Apply this map to another table (e.g. unseen test data). Categorical
    /// columns must already be imputed.
    pub fn apply(&self, t: &Table) -> Result<Table> {
        let mut columns = Vec::with_capacity(t.columns.len());
        for ((name, kind), col) in t.schema.columns().iter().zip(&t.columns) {
            if *kind == ColumnKind::Categorical {
                let cats = self.columns.get(name).ok_or_else(|| {
                    Error::Data(format!("encoding map has no entry for column `{name}`"))
                })?;
                let values = match &col.values {
                    ColumnValues::Categorical(v) => v,
                    ColumnValues::Numeric(_) => {
                        return Err(Error::Data(format!("column `{name}` already numeric")))
                    }
                };
                if col.has_missing() {
                    return Err(Error::Data(format!(
                        "column `{name}` has missing values; impute before encoding"
                    )));
                }
                let codes = values
                    .iter()
                    .map(|v| cats.iter().position(|c| c == v).unwrap_or(cats.len()) as f64)
                    .collect();
                columns.push(Column::numeric(codes, col.missing.clone()));
            } else {
                columns.push(col.clone());
            }
        }
        Table::new(t.schema.clone(), columns)
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Doc<'a> {
            format_version: u32,
            columns: &'a BTreeMap<String, Vec<String>>,
        }
        serde_json::to_string_pretty(&Doc {
            format_version: 1,
            columns: &self.columns,
        })
        .expect("encoding map serializes")
    }

    pub fn from_json(s: &str) -> Result<EncodingMap> {
        #[derive(Deserialize)]
        struct Doc {
            format_version: u32,
            columns: BTreeMap<String, Vec<String>>,
        }
        let doc: Doc = serde_json::from_str(s)
            .map_err(|e| Error::ModelFormat(format!("encoding map: {e}")))?;
        if doc.format_version != 1 {
            return Err(Error::ModelFormat(format!(
                "encoding map: unknown format_version {}",
                doc.format_version
            )));
        }
        Ok(EncodingMap {
            columns: doc.columns,
        })
    }
}
