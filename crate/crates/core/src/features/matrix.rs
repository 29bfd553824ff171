use std::collections::BTreeSet;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::EpochOrigin;
use crate::scalar::Scalar;

/// Class identifier. Workload types use 1, 2 and 3.
pub type Label = u32;

/// Named, labelled, row-major feature table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct FeatureMatrix<T> {
    names: Vec<String>,
    rows: Vec<Vec<T>>,
    labels: Vec<Label>,
    /// Either empty or one entry per row.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    origins: Vec<EpochOrigin>,
}

impl<T: Scalar> FeatureMatrix<T> {
    pub fn new(names: Vec<String>, rows: Vec<Vec<T>>, labels: Vec<Label>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for n in &names {
            if !seen.insert(n.as_str()) {
                return Err(Error::invalid_data(format!("duplicate feature name {n:?}")));
            }
        }
        if rows.len() != labels.len() {
            return Err(Error::invalid_data(format!(
                "{} rows but {} labels",
                rows.len(),
                labels.len()
            )));
        }
        for (i, r) in rows.iter().enumerate() {
            if r.len() != names.len() {
                return Err(Error::invalid_data(format!(
                    "row {i} has {} values, expected {}",
                    r.len(),
                    names.len()
                )));
            }
        }
        Ok(Self {
            names,
            rows,
            labels,
            origins: Vec::new(),
        })
    }

    pub fn with_origins(mut self, origins: Vec<EpochOrigin>) -> Result<Self> {
        if !origins.is_empty() && origins.len() != self.rows.len() {
            return Err(Error::invalid_data("origins must align with rows"));
        }
        self.origins = origins;
        Ok(self)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn rows(&self) -> &[Vec<T>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.rows[i]
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn origins(&self) -> &[EpochOrigin] {
        &self.origins
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_features(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        self.rows.iter().map(|r| r[j]).collect()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Sorted distinct labels.
    pub fn classes(&self) -> Vec<Label> {
        self.labels.iter().copied().collect::<BTreeSet<_>>().into_iter().collect()
    }

    /// Rows at `indices`, in that order.
    pub fn subset_rows(&self, indices: &[usize]) -> Self {
        Self {
            names: self.names.clone(),
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            origins: if self.origins.is_empty() {
                Vec::new()
            } else {
                indices.iter().map(|&i| self.origins[i].clone()).collect()
            },
        }
    }

    /// Columns by name, in the order given.
    pub fn select_columns<S: AsRef<str>>(&self, names: &[S]) -> Result<Self> {
        let idx: Vec<usize> = names
            .iter()
            .map(|n| {
                self.column_index(n.as_ref())
                    .ok_or_else(|| Error::invalid_data(format!("unknown feature {:?}", n.as_ref())))
            })
            .collect::<Result<_>>()?;
        self.select_column_indices(&idx)
    }

    pub fn select_column_indices(&self, idx: &[usize]) -> Result<Self> {
        if let Some(&bad) = idx.iter().find(|&&j| j >= self.n_features()) {
            return Err(Error::invalid_arg(format!("column {bad} out of range")));
        }
        let m = Self::new(
            idx.iter().map(|&j| self.names[j].clone()).collect(),
            self.rows.iter().map(|r| idx.iter().map(|&j| r[j]).collect()).collect(),
            self.labels.clone(),
        )?;
        Ok(Self {
            origins: self.origins.clone(),
            ..m
        })
    }

    /// Applies `f(column_index, value)` to every cell.
    pub fn map_values(&self, f: impl Fn(usize, T) -> T) -> Self {
        Self {
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().enumerate().map(|(j, &v)| f(j, v)).collect())
                .collect(),
            ..self.clone()
        }
    }

    /// CSV with the feature names plus a trailing `label` column.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        let io = |e| Error::io(path, e);
        writeln!(w, "{},label", self.names.join(",")).map_err(io)?;
        let mut line = String::new();
        for (row, label) in self.rows.iter().zip(&self.labels) {
            use std::fmt::Write as _;
            line.clear();
            for v in row {
                let _ = write!(line, "{v},");
            }
            let _ = writeln!(line, "{label}");
            w.write_all(line.as_bytes()).map_err(io)?;
        }
        w.flush().map_err(io)
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let parse_err = |line: usize, column: Option<String>, message: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            column,
            message,
        };
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| match e.into_kind() {
                csv::ErrorKind::Io(io) => Error::io(path, io),
                other => parse_err(1, None, format!("{other:?}")),
            })?;
        let header: Vec<String> = reader
            .headers()
            .map_err(|e| parse_err(1, None, e.to_string()))?
            .iter()
            .map(str::to_string)
            .collect();
        if header.last().map(String::as_str) != Some("label") {
            return Err(parse_err(1, None, "last column must be \"label\"".into()));
        }
        let names = header[..header.len() - 1].to_vec();
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| {
                parse_err(e.position().map_or(0, |p| p.line() as usize), None, e.to_string())
            })?;
            let line = record.position().map_or(0, |p| p.line() as usize);
            let mut row = Vec::with_capacity(names.len());
            for (j, name) in names.iter().enumerate() {
                let v: T = record[j]
                    .parse()
                    .map_err(|_| parse_err(line, Some(name.clone()), format!("non-numeric value {:?}", &record[j])))?;
                if !v.is_finite() {
                    return Err(parse_err(line, Some(name.clone()), "non-finite value".into()));
                }
                row.push(v);
            }
            let label = record[names.len()]
                .parse()
                .map_err(|_| parse_err(line, Some("label".into()), format!("bad label {:?}", &record[names.len()])))?;
            rows.push(row);
            labels.push(label);
        }
        Self::new(names, rows, labels)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        crate::io::write_json(path, self)
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        let m: Self = crate::io::read_json(path)?;
        // re-validate shape
        let origins = m.origins.clone();
        Self::new(m.names, m.rows, m.labels)?.with_origins(origins)
    }
}
