//! Tabular datasets: CSV ingestion, schema and task inference, min-max
//! normalization and seeded train/validation splits.
//!
//! Built-in datasets go through the same CSV pipeline as uploads. The target
//! is the last column unless a target name is given explicitly.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::nn::{Batch, TaskKind};

pub const MIN_ROWS: usize = 10;
pub const MIN_COLUMNS: usize = 2;
/// Integer targets with at most this many distinct values are read as class codes.
pub const MAX_INTEGER_CLASSES: usize = 10;

const IRIS_CSV: &[u8] = include_bytes!("../data/iris.csv");
const DIABETES_CSV: &[u8] = include_bytes!("../data/diabetes.csv");

pub const BUILTIN_NAMES: [&str; 2] = ["iris", "diabetes"];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DataError {
    #[error("file is empty")]
    Empty,
    #[error("file is not valid UTF-8 (line {line}, byte {byte})")]
    NotUtf8 { line: u64, byte: usize },
    #[error("row {row}: expected {expected} fields, found {found}")]
    Ragged { row: u64, expected: usize, found: usize },
    #[error("row {row}: {message}")]
    Csv { row: u64, message: String },
    #[error("need at least {min} columns, found {found}")]
    TooFewColumns { found: usize, min: usize },
    #[error("need at least {min} data rows, found {found}")]
    TooFewRows { found: usize, min: usize },
    #[error("duplicate column name `{column}`")]
    DuplicateColumn { column: String },
    #[error("column {index} has an empty name")]
    UnnamedColumn { index: usize },
    #[error("unknown target column `{column}`")]
    UnknownTarget { column: String },
    #[error("row {row}, column `{column}`: missing value")]
    Missing { row: u64, column: String },
    #[error("row {row}, column `{column}`: `{value}` is not a number")]
    NonNumeric { row: u64, column: String, value: String },
    #[error("target `{column}` has {found} distinct class(es); at least 2 are required")]
    TooFewClasses { column: String, found: usize },
    #[error("validation fraction must be in [0, 1), got {0}")]
    BadFraction(f64),
    #[error("training split is empty")]
    EmptyTraining,
    #[error("inconsistent dataset: {0}")]
    Inconsistent(String),
}

/// Row/column pointer into an uploaded file. Rows are 1-based file lines,
/// the header being row 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Locator {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub row: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub column: Option<String>,
}

impl DataError {
    pub fn locator(&self) -> Option<Locator> {
        let (row, column) = match self {
            DataError::NotUtf8 { line, .. } => (Some(*line), None),
            DataError::Ragged { row, .. } | DataError::Csv { row, .. } => (Some(*row), None),
            DataError::Missing { row, column } | DataError::NonNumeric { row, column, .. } => {
                (Some(*row), Some(column.clone()))
            }
            DataError::DuplicateColumn { column }
            | DataError::UnknownTarget { column }
            | DataError::TooFewClasses { column, .. } => (None, Some(column.clone())),
            _ => return None,
        };
        Some(Locator { row, column })
    }
}

pub type Result<T> = std::result::Result<T, DataError>;

#[derive(Debug, Clone, PartialEq)]
pub struct RawTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// File line on which each data row starts.
    pub row_lines: Vec<u64>,
}

/// Comma-separated, double-quote quoting, first record is the header.
pub fn parse_csv(bytes: &[u8]) -> Result<RawTable> {
    let text = std::str::from_utf8(bytes).map_err(|e| {
        let byte = e.valid_up_to();
        let line = bytes[..byte].iter().filter(|&&b| b == b'\n').count() as u64 + 1;
        DataError::NotUtf8 { line, byte }
    })?;
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    if text.trim().is_empty() {
        return Err(DataError::Empty);
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let mut header: Option<Vec<String>> = None;
    let mut rows = Vec::new();
    let mut row_lines = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| DataError::Csv {
            row: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let fields: Vec<String> = record.iter().map(str::to_owned).collect();
        match &header {
            None => header = Some(fields),
            Some(h) => {
                if fields.len() != h.len() {
                    return Err(DataError::Ragged {
                        row: line,
                        expected: h.len(),
                        found: fields.len(),
                    });
                }
                rows.push(fields);
                row_lines.push(line);
            }
        }
    }
    Ok(RawTable {
        header: header.ok_or(DataError::Empty)?,
        rows,
        row_lines,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSchema {
    pub feature_names: Vec<String>,
    pub target_name: String,
    pub task: TaskKind,
    /// Sorted distinct target values; empty for regression.
    #[serde(default)]
    pub class_labels: Vec<String>,
}

impl DatasetSchema {
    pub fn output_size(&self) -> usize {
        match self.task {
            TaskKind::Classification => self.class_labels.len(),
            TaskKind::Regression => 1,
        }
    }
}

fn parse_number(s: &str) -> Option<f64> {
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

fn target_index(table: &RawTable, target: Option<&str>) -> Result<usize> {
    match target {
        Some(name) => table
            .header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| DataError::UnknownTarget {
                column: name.to_owned(),
            }),
        None => Ok(table.header.len() - 1),
    }
}

fn row_line(table: &RawTable, i: usize) -> u64 {
    table.row_lines.get(i).copied().unwrap_or(i as u64 + 2)
}

/// Decide feature columns, target column and task kind.
///
/// Non-numeric targets, and integer targets with at most
/// [`MAX_INTEGER_CLASSES`] distinct values, are classification targets.
/// Every other column must be numeric.
pub fn infer_schema(table: &RawTable, target: Option<&str>) -> Result<DatasetSchema> {
    let ncols = table.header.len();
    if ncols < MIN_COLUMNS {
        return Err(DataError::TooFewColumns {
            found: ncols,
            min: MIN_COLUMNS,
        });
    }
    if table.rows.len() < MIN_ROWS {
        return Err(DataError::TooFewRows {
            found: table.rows.len(),
            min: MIN_ROWS,
        });
    }
    let mut seen = BTreeSet::new();
    for (i, name) in table.header.iter().enumerate() {
        if name.is_empty() {
            return Err(DataError::UnnamedColumn { index: i });
        }
        if !seen.insert(name.as_str()) {
            return Err(DataError::DuplicateColumn {
                column: name.clone(),
            });
        }
    }
    let tcol = target_index(table, target)?;

    // missing values first, in reading order, so the reported location is the earliest one
    for (i, row) in table.rows.iter().enumerate() {
        if let Some(c) = row.iter().position(String::is_empty) {
            return Err(DataError::Missing {
                row: row_line(table, i),
                column: table.header[c].clone(),
            });
        }
    }
    for c in (0..ncols).filter(|&c| c != tcol) {
        for (i, row) in table.rows.iter().enumerate() {
            if parse_number(&row[c]).is_none() {
                return Err(DataError::NonNumeric {
                    row: row_line(table, i),
                    column: table.header[c].clone(),
                    value: row[c].clone(),
                });
            }
        }
    }

    let target_name = table.header[tcol].clone();
    let numeric: Option<Vec<f64>> = table.rows.iter().map(|r| parse_number(&r[tcol])).collect();
    let (task, class_labels) = match numeric {
        Some(values) => {
            let integral = values.iter().all(|v| v.fract() == 0.0 && v.abs() < 1e15);
            let distinct: BTreeSet<i64> = values.iter().map(|&v| v as i64).collect();
            if integral && distinct.len() <= MAX_INTEGER_CLASSES {
                (
                    TaskKind::Classification,
                    distinct.into_iter().map(|v| v.to_string()).collect(),
                )
            } else {
                (TaskKind::Regression, Vec::new())
            }
        }
        None => {
            let distinct: BTreeSet<&str> = table.rows.iter().map(|r| r[tcol].as_str()).collect();
            (
                TaskKind::Classification,
                distinct.into_iter().map(str::to_owned).collect(),
            )
        }
    };
    if task == TaskKind::Classification && class_labels.len() < 2 {
        return Err(DataError::TooFewClasses {
            column: target_name,
            found: class_labels.len(),
        });
    }
    Ok(DatasetSchema {
        feature_names: table
            .header
            .iter()
            .enumerate()
            .filter(|&(c, _)| c != tcol)
            .map(|(_, h)| h.clone())
            .collect(),
        target_name,
        task,
        class_labels,
    })
}

/// Per-feature min-max statistics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormStat {
    pub min: f64,
    pub max: f64,
}

impl NormStat {
    pub fn fit<I: IntoIterator<Item = f64>>(values: I) -> Self {
        let (min, max) = values
            .into_iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
        Self { min, max }
    }

    /// Constant features map to 0.
    pub fn apply(&self, v: f64) -> f64 {
        if self.max > self.min {
            (v - self.min) / (self.max - self.min)
        } else {
            0.0
        }
    }

    pub fn invert(&self, u: f64) -> f64 {
        self.min + u * (self.max - self.min)
    }
}

/// Min-max scale every column of `raw` (rows are samples) to [0, 1].
pub fn normalize(raw: &[Vec<f64>]) -> (Vec<Vec<f64>>, Vec<NormStat>) {
    let all: Vec<usize> = (0..raw.len()).collect();
    let stats = fit_stats(raw, &all);
    (apply_stats(raw, &stats), stats)
}

fn fit_stats(raw: &[Vec<f64>], rows: &[usize]) -> Vec<NormStat> {
    let d = raw.first().map_or(0, Vec::len);
    (0..d)
        .map(|c| NormStat::fit(rows.iter().map(|&r| raw[r][c])))
        .collect()
}

pub fn apply_stats(raw: &[Vec<f64>], stats: &[NormStat]) -> Vec<Vec<f64>> {
    raw.iter()
        .map(|row| row.iter().zip(stats).map(|(&v, s)| s.apply(v)).collect())
        .collect()
}

/// Targets before encoding.
#[derive(Debug, Clone, PartialEq)]
pub enum RawTargets {
    /// Class index per row into `class_labels`.
    Classes(Vec<usize>),
    Values(Vec<f64>),
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Partition {
    pub indices: Vec<usize>,
    pub inputs: Vec<Vec<f64>>,
    pub targets: Vec<Vec<f64>>,
}

impl Partition {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn batch(&self) -> Batch<'_> {
        Batch {
            inputs: &self.inputs,
            targets: &self.targets,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub schema: DatasetSchema,
    raw_features: Vec<Vec<f64>>,
    raw_targets: RawTargets,
    /// Normalized features, one row per sample.
    pub x: Vec<Vec<f64>>,
    /// One-hot rows for classification, one scaled value per row for regression.
    pub y: Vec<Vec<f64>>,
    pub norm_stats: Vec<NormStat>,
    /// Min-max stats of a regression target; predictions are mapped back through it.
    pub target_stats: Option<NormStat>,
    pub train: Partition,
    pub val: Partition,
}

impl Dataset {
    pub fn from_csv(name: &str, bytes: &[u8], target: Option<&str>) -> Result<Self> {
        let table = parse_csv(bytes)?;
        Self::from_table(name, &table, target)
    }

    pub fn from_table(name: &str, table: &RawTable, target: Option<&str>) -> Result<Self> {
        let schema = infer_schema(table, target)?;
        let tcol = target_index(table, target)?;
        let features: Vec<Vec<f64>> = table
            .rows
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|&(c, _)| c != tcol)
                    .map(|(_, v)| parse_number(v).expect("checked by infer_schema"))
                    .collect()
            })
            .collect();
        let targets = match schema.task {
            TaskKind::Classification => RawTargets::Classes(
                table
                    .rows
                    .iter()
                    .map(|r| class_index(&schema.class_labels, &r[tcol]))
                    .collect(),
            ),
            TaskKind::Regression => RawTargets::Values(
                table
                    .rows
                    .iter()
                    .map(|r| parse_number(&r[tcol]).expect("checked by infer_schema"))
                    .collect(),
            ),
        };
        Self::from_parts(name, schema, features, targets)
    }

    /// Build a dataset from already-typed columns. All rows start in the
    /// training partition.
    pub fn from_parts(
        name: &str,
        schema: DatasetSchema,
        features: Vec<Vec<f64>>,
        targets: RawTargets,
    ) -> Result<Self> {
        let n = features.len();
        if n == 0 {
            return Err(DataError::EmptyTraining);
        }
        let d = schema.feature_names.len();
        if let Some(i) = features.iter().position(|r| r.len() != d) {
            return Err(DataError::Inconsistent(format!(
                "row {i} has {} features, schema names {d}",
                features[i].len()
            )));
        }
        let target_len = match (&targets, schema.task) {
            (RawTargets::Classes(c), TaskKind::Classification) => {
                if let Some(&bad) = c.iter().find(|&&k| k >= schema.class_labels.len()) {
                    return Err(DataError::Inconsistent(format!("class index {bad} out of range")));
                }
                if schema.class_labels.len() < 2 {
                    return Err(DataError::TooFewClasses {
                        column: schema.target_name.clone(),
                        found: schema.class_labels.len(),
                    });
                }
                c.len()
            }
            (RawTargets::Values(v), TaskKind::Regression) => v.len(),
            _ => {
                return Err(DataError::Inconsistent(
                    "target encoding does not match the task".into(),
                ))
            }
        };
        if target_len != n {
            return Err(DataError::Inconsistent(format!(
                "{n} feature rows but {target_len} targets"
            )));
        }
        let mut ds = Self {
            name: name.to_owned(),
            schema,
            raw_features: features,
            raw_targets: targets,
            x: Vec::new(),
            y: Vec::new(),
            norm_stats: Vec::new(),
            target_stats: None,
            train: Partition::default(),
            val: Partition::default(),
        };
        ds.assign((0..n).collect(), Vec::new());
        Ok(ds)
    }

    pub fn len(&self) -> usize {
        self.raw_features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.raw_features.is_empty()
    }

    pub fn feature_count(&self) -> usize {
        self.schema.feature_names.len()
    }

    pub fn task(&self) -> TaskKind {
        self.schema.task
    }

    pub fn raw_features(&self) -> &[Vec<f64>] {
        &self.raw_features
    }

    pub fn raw_targets(&self) -> &RawTargets {
        &self.raw_targets
    }

    /// Seeded shuffle, then the first `floor(n · val_fraction)` rows become the
    /// validation partition. Normalization statistics are refit on the
    /// training rows only; validation rows reuse them and may fall outside [0, 1].
    pub fn split(&self, val_fraction: f64, seed: u64) -> Result<Self> {
        if !(0.0..1.0).contains(&val_fraction) || val_fraction.is_nan() {
            return Err(DataError::BadFraction(val_fraction));
        }
        let n = self.len();
        let n_val = ((n as f64) * val_fraction + 1e-9).floor() as usize;
        let mut order: Vec<usize> = (0..n).collect();
        if n_val > 0 {
            let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
            order.shuffle(&mut rng);
        }
        let mut val = order[..n_val].to_vec();
        let mut train = order[n_val..].to_vec();
        if train.is_empty() {
            return Err(DataError::EmptyTraining);
        }
        val.sort_unstable();
        train.sort_unstable();
        let mut out = self.clone();
        out.assign(train, val);
        Ok(out)
    }

    fn assign(&mut self, train: Vec<usize>, val: Vec<usize>) {
        self.norm_stats = fit_stats(&self.raw_features, &train);
        self.x = apply_stats(&self.raw_features, &self.norm_stats);
        self.y = match &self.raw_targets {
            RawTargets::Classes(classes) => {
                let k = self.schema.class_labels.len();
                self.target_stats = None;
                classes
                    .iter()
                    .map(|&c| {
                        let mut row = vec![0.0; k];
                        row[c] = 1.0;
                        row
                    })
                    .collect()
            }
            RawTargets::Values(values) => {
                let stat = NormStat::fit(train.iter().map(|&r| values[r]));
                self.target_stats = Some(stat);
                values.iter().map(|&v| vec![stat.apply(v)]).collect()
            }
        };
        self.train = self.partition(train);
        self.val = self.partition(val);
    }

    fn partition(&self, indices: Vec<usize>) -> Partition {
        Partition {
            inputs: indices.iter().map(|&i| self.x[i].clone()).collect(),
            targets: indices.iter().map(|&i| self.y[i].clone()).collect(),
            indices,
        }
    }

    /// Normalize a raw feature vector with the stored training statistics.
    pub fn normalize_input(&self, raw: &[f64]) -> Vec<f64> {
        raw.iter()
            .zip(&self.norm_stats)
            .map(|(&v, s)| s.apply(v))
            .collect()
    }

    pub fn summarize(&self) -> DatasetSummary {
        DatasetSummary {
            name: self.name.clone(),
            samples: self.len(),
            feature_names: self.schema.feature_names.clone(),
            target_name: self.schema.target_name.clone(),
            task: self.schema.task,
            class_labels: self.schema.class_labels.clone(),
        }
    }
}

fn class_index(labels: &[String], value: &str) -> usize {
    if let Some(i) = labels.iter().position(|l| l == value) {
        return i;
    }
    // integer codes are labelled by their canonical form, e.g. "1.0" -> "1"
    let canon = parse_number(value).map(|v| (v as i64).to_string());
    labels
        .iter()
        .position(|l| Some(l) == canon.as_ref())
        .expect("label set derived from the same column")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub name: String,
    pub samples: usize,
    pub feature_names: Vec<String>,
    pub target_name: String,
    pub task: TaskKind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub class_labels: Vec<String>,
}

pub fn builtin_iris() -> Dataset {
    Dataset::from_csv("iris", IRIS_CSV, None).expect("embedded iris table is well-formed")
}

pub fn builtin_diabetes() -> Dataset {
    Dataset::from_csv("diabetes", DIABETES_CSV, None).expect("embedded diabetes table is well-formed")
}

pub fn builtin(name: &str) -> Option<Dataset> {
    match name {
        "iris" => Some(builtin_iris()),
        "diabetes" => Some(builtin_diabetes()),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(text: &str) -> RawTable {
        parse_csv(text.as_bytes()).unwrap()
    }

    #[test]
    fn parse_simple_and_quoted() {
        let t = table("a,b\n1,2\n");
        assert_eq!(t.header, vec!["a", "b"]);
        assert_eq!(t.rows, vec![vec!["1", "2"]]);
        let t = table("a,\"b,c\"\n1,2\n");
        assert_eq!(t.header, vec!["a", "b,c"]);
    }

    #[test]
    fn parse_errors_carry_locations() {
        assert_eq!(
            parse_csv(b"a,b\n1\n"),
            Err(DataError::Ragged {
                row: 2,
                expected: 2,
                found: 1
            })
        );
        assert_eq!(parse_csv(b""), Err(DataError::Empty));
        assert_eq!(parse_csv(b"  \n"), Err(DataError::Empty));
        assert!(matches!(
            parse_csv(b"a,b\n1,2\n\xff,3\n"),
            Err(DataError::NotUtf8 { line: 3, .. })
        ));
    }

    fn rows_csv(header: &str, rows: impl Iterator<Item = String>) -> RawTable {
        let mut s = String::from(header);
        s.push('\n');
        for r in rows {
            s.push_str(&r);
            s.push('\n');
        }
        table(&s)
    }

    #[test]
    fn infer_string_target() {
        let t = rows_csv("x,y,label", (0..12).map(|i| format!("{i},{},{}", i * 2, ["cat", "dog"][i % 2])));
        let s = infer_schema(&t, None).unwrap();
        assert_eq!(s.task, TaskKind::Classification);
        assert_eq!(s.class_labels, vec!["cat", "dog"]);
        assert_eq!(s.feature_names, vec!["x", "y"]);
    }

    #[test]
    fn infer_integer_codes_and_reals() {
        let t = rows_csv("x,t", (0..100).map(|i| format!("{i},{}", i % 2)));
        let s = infer_schema(&t, None).unwrap();
        assert_eq!(s.task, TaskKind::Classification);
        assert_eq!(s.class_labels, vec!["0", "1"]);

        let t = rows_csv("x,t", (0..20).map(|i| format!("{i},{}", 1.73 + i as f64 * 0.68)));
        assert_eq!(infer_schema(&t, None).unwrap().task, TaskKind::Regression);

        // eleven distinct integers is past the class-code threshold
        let t = rows_csv("x,t", (0..22).map(|i| format!("{i},{}", i % 11)));
        assert_eq!(infer_schema(&t, None).unwrap().task, TaskKind::Regression);

        // numeric sort, not lexical
        let t = rows_csv("x,t", (0..20).map(|i| format!("{i},{}", [2, 10, 1][i % 3])));
        assert_eq!(infer_schema(&t, None).unwrap().class_labels, vec!["1", "2", "10"]);
    }

    #[test]
    fn infer_errors() {
        let t = rows_csv("x,name,t", (0..12).map(|i| format!("{i},{},{}", if i == 4 { "oops" } else { "3" }, i % 2)));
        assert_eq!(
            infer_schema(&t, None),
            Err(DataError::NonNumeric {
                row: 6,
                column: "name".into(),
                value: "oops".into()
            })
        );
        let t = rows_csv("x,t", (0..12).map(|i| if i == 3 { "1,".to_string() } else { format!("{i},{}", i % 2) }));
        assert_eq!(
            infer_schema(&t, None),
            Err(DataError::Missing {
                row: 5,
                column: "t".into()
            })
        );
        let t = rows_csv("x,t", (0..12).map(|i| format!("{i},same")));
        assert!(matches!(infer_schema(&t, None), Err(DataError::TooFewClasses { .. })));
        let t = rows_csv("x,t", (0..5).map(|i| format!("{i},{}", i % 2)));
        assert!(matches!(infer_schema(&t, None), Err(DataError::TooFewRows { found: 5, .. })));
        let t = rows_csv("x", (0..12).map(|i| format!("{i}")));
        assert!(matches!(infer_schema(&t, None), Err(DataError::TooFewColumns { .. })));
        let t = rows_csv("x,x", (0..12).map(|i| format!("{i},{}", i % 2)));
        assert!(matches!(infer_schema(&t, None), Err(DataError::DuplicateColumn { .. })));
    }

    #[test]
    fn target_override_picks_column() {
        let t = rows_csv("label,x,y", (0..12).map(|i| format!("{},{i},{}", ["a", "b", "c"][i % 3], i * i)));
        let s = infer_schema(&t, Some("label")).unwrap();
        assert_eq!(s.feature_names, vec!["x", "y"]);
        assert_eq!(s.class_labels.len(), 3);
        assert!(matches!(infer_schema(&t, Some("nope")), Err(DataError::UnknownTarget { .. })));
    }

    #[test]
    fn normalize_columns() {
        let (x, stats) = normalize(&[vec![2.0, 5.0], vec![4.0, 5.0], vec![6.0, 5.0]]);
        assert_eq!(x.iter().map(|r| r[0]).collect::<Vec<_>>(), vec![0.0, 0.5, 1.0]);
        assert!(x.iter().all(|r| r[1] == 0.0));
        assert_eq!(stats[0].apply(4.0), 0.5);
        assert_eq!(NormStat { min: 2.0, max: 6.0 }.invert(0.5), 4.0);
    }

    #[test]
    fn iris_shape() {
        let iris = builtin_iris();
        assert_eq!(iris.len(), 150);
        assert_eq!(iris.feature_count(), 4);
        assert_eq!(iris.schema.class_labels, vec!["setosa", "versicolor", "virginica"]);
        assert!(iris.x.iter().flatten().all(|v| (0.0..=1.0).contains(v)));
        assert!(iris.y.iter().all(|r| r.iter().sum::<f64>() == 1.0));
    }

    #[test]
    fn diabetes_shape() {
        let d = builtin_diabetes();
        assert_eq!(d.feature_count(), 6);
        assert_eq!(d.task(), TaskKind::Regression);
        assert_eq!(d.norm_stats.len(), 6);
        assert!(d.y.iter().all(|r| r.len() == 1));
    }

    #[test]
    fn split_sizes_and_determinism() {
        let iris = builtin_iris();
        let s = iris.split(0.2, 7).unwrap();
        assert_eq!((s.train.len(), s.val.len()), (120, 30));
        assert_eq!(s, iris.split(0.2, 7).unwrap());
        let none = iris.split(0.0, 7).unwrap();
        assert!(none.val.is_empty());
        assert_eq!(none.train.len(), 150);
        assert!(iris.split(1.0, 7).is_err());
        assert!(iris.split(-0.1, 7).is_err());
    }

    #[test]
    fn summary_fields() {
        let s = builtin_iris().summarize();
        assert_eq!(s.samples, 150);
        assert_eq!(s.target_name, "species");
        assert_eq!(s.task, TaskKind::Classification);
        assert_eq!(s.feature_names.len(), 4);
    }

    #[test]
    fn locators() {
        let e = DataError::NonNumeric {
            row: 4,
            column: "a".into(),
            value: "x".into(),
        };
        assert_eq!(
            e.locator(),
            Some(Locator {
                row: Some(4),
                column: Some("a".into())
            })
        );
        assert_eq!(DataError::Empty.locator(), None);
    }
}
