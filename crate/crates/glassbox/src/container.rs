//! Columnar binary container for prepared (fully numeric) datasets:
//! 8-byte magic, little-endian u64 header length, JSON header with column
//! descriptors and pipeline metadata, then per-column payloads of
//! little-endian f64 in header order. Reload is bit-exact.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::data::{Column, ColumnKind, ColumnValues, Schema, Table};
use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"GBXCOL01";
const FORMAT_VERSION: u32 = 1;

/// Pipeline facts that travel with the data.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ContainerMeta {
    /// True when the rows were already rebalanced before the split.
    #[serde(default)]
    pub smote_applied: bool,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub test_fraction: f64,
}

#[derive(Serialize, Deserialize)]
struct Header {
    format_version: u32,
    n_rows: u64,
    columns: Vec<(String, ColumnKind)>,
    meta: ContainerMeta,
}

/// Write a fully numeric table (post impute/encode) to `path`.
pub fn write_table(path: &Path, table: &Table, meta: &ContainerMeta) -> Result<()> {
    let mut columns = Vec::with_capacity(table.schema().len());
    for (name, kind) in table.schema().columns() {
        let col = table.column(name)?;
        match &col.values {
            ColumnValues::Numeric(_) if !col.has_missing() => {}
            ColumnValues::Numeric(_) => {
                return Err(Error::Data(format!(
                    "column `{name}` has missing values; containers hold imputed data only"
                )));
            }
            ColumnValues::Categorical(_) => {
                return Err(Error::Data(format!(
                    "column `{name}` is categorical; containers hold encoded data only"
                )));
            }
        }
        columns.push((name.clone(), *kind));
    }

    let header = Header {
        format_version: FORMAT_VERSION,
        n_rows: table.n_rows() as u64,
        columns,
        meta: meta.clone(),
    };
    let header_json = serde_json::to_vec(&header).expect("header serializes");

    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    out.write_all(MAGIC)?;
    out.write_all(&(header_json.len() as u64).to_le_bytes())?;
    out.write_all(&header_json)?;
    for (name, _) in table.schema().columns() {
        let col = table.column(name)?;
        if let ColumnValues::Numeric(values) = &col.values {
            for v in values {
                out.write_all(&v.to_le_bytes())?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

/// Read a container back into a table plus its metadata.
pub fn read_table(path: &Path) -> Result<(Table, ContainerMeta)> {
    let mut file = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut magic = [0u8; 8];
    file.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::ModelFormat(format!(
            "{}: not a prepared-data container (bad magic)",
            path.display()
        )));
    }
    let mut len_bytes = [0u8; 8];
    file.read_exact(&mut len_bytes)?;
    let header_len = u64::from_le_bytes(len_bytes) as usize;
    let mut header_json = vec![0u8; header_len];
    file.read_exact(&mut header_json)?;
    let header: Header = serde_json::from_slice(&header_json)
        .map_err(|e| Error::ModelFormat(format!("{}: container header: {e}", path.display())))?;
    if header.format_version != FORMAT_VERSION {
        return Err(Error::ModelFormat(format!(
            "{}: unknown container format_version {}",
            path.display(),
            header.format_version
        )));
    }

    let n = header.n_rows as usize;
    let mut columns = Vec::with_capacity(header.columns.len());
    let mut buf = vec![0u8; n * 8];
    for _ in &header.columns {
        file.read_exact(&mut buf)?;
        let values: Vec<f64> = buf
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
            .collect();
        columns.push(Column::numeric(values, vec![false; n]));
    }
    let table = Table::new(Schema::new(header.columns)?, columns)?;
    Ok((table, header.meta))
}
