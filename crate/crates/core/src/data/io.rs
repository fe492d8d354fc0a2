//! CSV dataset files with a JSON sidecar.
//!
//! The CSV header is `f0,...,f{d-1},y0,...,y{C-1}`. Features are written as
//! shortest round-trip decimals, so loading a saved file is bit-exact. The
//! sidecar sits next to the CSV with a `.json` extension.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fsio::{read_to_string, write_atomic};
use crate::types::{Dataset, LabelVector};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub schema_version: u32,
    pub seed: u64,
    pub class_count: usize,
    pub dim: usize,
    pub sample_count: usize,
    pub target_prevalences: Vec<f64>,
}

pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

/// Writes the CSV and its sidecar. The sidecar's shape fields are taken from
/// `d`; `meta` supplies the seed and target prevalences.
pub fn save_csv(d: &Dataset, path: &Path, meta: &DatasetMeta) -> Result<()> {
    let mut out = String::new();
    let header: Vec<String> = (0..d.dim())
        .map(|j| format!("f{j}"))
        .chain((0..d.class_count()).map(|c| format!("y{c}")))
        .collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for i in 0..d.sample_count() {
        let mut first = true;
        for &x in d.features(i) {
            if !first {
                out.push(',');
            }
            first = false;
            write!(out, "{x:?}").unwrap();
        }
        for &y in d.labels(i).iter() {
            if !first {
                out.push(',');
            }
            first = false;
            write!(out, "{y}").unwrap();
        }
        out.push('\n');
    }
    write_atomic(path, out.as_bytes())?;

    let meta = DatasetMeta {
        schema_version: SCHEMA_VERSION,
        class_count: d.class_count(),
        dim: d.dim(),
        sample_count: d.sample_count(),
        ..meta.clone()
    };
    let json = serde_json::to_vec_pretty(&meta).map_err(|e| Error::Json {
        path: sidecar_path(path),
        source: e,
    })?;
    write_atomic(&sidecar_path(path), &json)
}

pub fn read_sidecar(csv: &Path) -> Result<Option<DatasetMeta>> {
    let path = sidecar_path(csv);
    if !path.exists() {
        return Ok(None);
    }
    let text = read_to_string(&path)?;
    let meta: DatasetMeta = serde_json::from_str(&text).map_err(|e| Error::Json {
        path: path.clone(),
        source: e,
    })?;
    if meta.schema_version != SCHEMA_VERSION {
        return Err(Error::parse(
            path,
            1,
            format!("unsupported schema_version {}", meta.schema_version),
        ));
    }
    Ok(Some(meta))
}

fn parse_header(path: &Path, line: &str) -> Result<(usize, usize)> {
    let cols: Vec<&str> = line.split(',').map(str::trim).collect();
    let dim = cols.iter().take_while(|c| c.starts_with('f')).count();
    let classes = cols.len() - dim;
    for (j, col) in cols.iter().enumerate() {
        let expected = if j < dim {
            format!("f{j}")
        } else {
            format!("y{}", j - dim)
        };
        if *col != expected {
            return Err(Error::parse(
                path,
                1,
                format!("malformed header: column {j} is `{col}`, expected `{expected}`"),
            ));
        }
    }
    if dim == 0 || classes == 0 {
        return Err(Error::parse(
            path,
            1,
            "malformed header: need at least one feature and one label column",
        ));
    }
    Ok((dim, classes))
}

/// Loads a CSV dataset, checking it against its sidecar when one exists.
pub fn load_csv(path: &Path) -> Result<Dataset> {
    let text = read_to_string(path)?;
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::parse(path, 1, "empty file"))?;
    let (dim, classes) = parse_header(path, header)?;

    let mut features = Vec::new();
    let mut labels = Vec::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != dim + classes {
            return Err(Error::parse(
                path,
                lineno,
                format!("expected {} fields, found {}", dim + classes, cells.len()),
            ));
        }
        for cell in &cells[..dim] {
            let x: f64 = cell
                .parse()
                .map_err(|_| Error::parse(path, lineno, format!("invalid feature `{cell}`")))?;
            if !x.is_finite() {
                return Err(Error::parse(
                    path,
                    lineno,
                    format!("non-finite feature `{cell}`"),
                ));
            }
            features.push(x);
        }
        let bits = cells[dim..]
            .iter()
            .map(|cell| match *cell {
                "0" => Ok(0u8),
                "1" => Ok(1u8),
                other => Err(Error::parse(
                    path,
                    lineno,
                    format!("label entry `{other}` is not 0 or 1"),
                )),
            })
            .collect::<Result<Vec<u8>>>()?;
        labels.push(LabelVector::new(bits)?);
    }
    let d = Dataset::new(features, labels, dim, classes)?;

    if let Some(meta) = read_sidecar(path)? {
        let found = (meta.dim, meta.class_count, meta.sample_count);
        let actual = (d.dim(), d.class_count(), d.sample_count());
        if found != actual {
            return Err(Error::parse(
                sidecar_path(path),
                1,
                format!(
                    "sidecar (dim, classes, samples) = {found:?} does not match csv {actual:?}"
                ),
            ));
        }
    }
    Ok(d)
}
