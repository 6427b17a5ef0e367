//! Typed CSV ingestion for the encounter extract.
//!
//! A [`Schema`] names every column the analysis needs, its kind and whether
//! missing values are tolerated. [`load_csv`] checks the file header against
//! the schema (extra columns are ignored with a warning) and parses each
//! cell into a [`RawTable`]. Missing entries are `None`; the tokens that
//! denote them in the file are configured on the schema.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats;

pub const DEFAULT_MISSING_TOKENS: [&str; 2] = ["?", ""];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ColumnKind {
    /// Nonnegative integer counts.
    CountInteger,
    Categorical,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnSchema {
    pub name: String,
    pub kind: ColumnKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub allowed_levels: Option<Vec<String>>,
    #[serde(default)]
    pub allow_missing: bool,
}

impl ColumnSchema {
    pub fn count(name: &str) -> Self {
        ColumnSchema {
            name: name.to_string(),
            kind: ColumnKind::CountInteger,
            allowed_levels: None,
            allow_missing: false,
        }
    }

    pub fn categorical(name: &str) -> Self {
        ColumnSchema {
            name: name.to_string(),
            kind: ColumnKind::Categorical,
            allowed_levels: None,
            allow_missing: false,
        }
    }

    pub fn with_levels(mut self, levels: &[&str]) -> Self {
        self.allowed_levels = Some(levels.iter().map(|s| s.to_string()).collect());
        self
    }

    pub fn missing_allowed(mut self) -> Self {
        self.allow_missing = true;
        self
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum SchemaFile {
    Columns(Vec<ColumnSchema>),
    Full {
        missing_tokens: Vec<String>,
        columns: Vec<ColumnSchema>,
    },
}

/// Ordered column schemas plus the tokens read as missing.
#[derive(Debug, Clone, PartialEq)]
pub struct Schema {
    columns: Vec<ColumnSchema>,
    missing_tokens: Vec<String>,
}

const AGE_LEVELS: [&str; 10] = [
    "[0-10)", "[10-20)", "[20-30)", "[30-40)", "[40-50)", "[50-60)", "[60-70)", "[70-80)",
    "[80-90)", "[90-100)",
];
const MED_CHANGE_LEVELS: [&str; 4] = ["No", "Down", "Steady", "Up"];
const READMIT_LEVELS: [&str; 3] = ["NO", "<30", ">30"];

impl Schema {
    pub fn new(columns: Vec<ColumnSchema>) -> Result<Self> {
        let mut seen = HashSet::new();
        for c in &columns {
            if !seen.insert(c.name.as_str()) {
                return Err(Error::Schema(format!(
                    "duplicate column `{}` in schema",
                    c.name
                )));
            }
            if c.kind == ColumnKind::CountInteger && c.allowed_levels.is_some() {
                return Err(Error::Schema(format!(
                    "count column `{}` cannot declare allowed levels",
                    c.name
                )));
            }
        }
        Ok(Schema {
            columns,
            missing_tokens: DEFAULT_MISSING_TOKENS
                .iter()
                .map(|s| s.to_string())
                .collect(),
        })
    }

    pub fn with_missing_tokens(mut self, tokens: Vec<String>) -> Self {
        self.missing_tokens = tokens;
        self
    }

    /// The thirteen columns of the raw study extract, in file order.
    pub fn study() -> Self {
        Schema::new(vec![
            ColumnSchema::count("days"),
            ColumnSchema::categorical("gender").missing_allowed(),
            ColumnSchema::categorical("age").with_levels(&AGE_LEVELS),
            // Levels are validated by the race recode so that an unexpected
            // level is reported instead of silently becoming missing.
            ColumnSchema::categorical("race").missing_allowed(),
            ColumnSchema::categorical("weight").missing_allowed(),
            ColumnSchema::count("admit_type_id"),
            ColumnSchema::categorical("metformin").with_levels(&MED_CHANGE_LEVELS),
            ColumnSchema::categorical("insulin").with_levels(&MED_CHANGE_LEVELS),
            ColumnSchema::categorical("readmitted").with_levels(&READMIT_LEVELS),
            ColumnSchema::count("num_procs"),
            ColumnSchema::count("num_meds"),
            ColumnSchema::count("num_ip"),
            ColumnSchema::count("num_diags"),
        ])
        .expect("study schema is valid")
    }

    /// Schema of the cleaned analysis table written by the cleaning recipe.
    pub fn cleaned() -> Self {
        Schema::new(vec![
            ColumnSchema::count("days"),
            ColumnSchema::categorical("gender").with_levels(&["Female", "Male"]),
            ColumnSchema::categorical("age").with_levels(&AGE_LEVELS),
            ColumnSchema::categorical("race").with_levels(&[
                "Caucasian",
                "AfricanAmerican",
                "Other",
                "Missing",
            ]),
            ColumnSchema::categorical("admit_type_id").with_levels(&["1", "2", "3", "4"]),
            ColumnSchema::categorical("metformin").with_levels(&MED_CHANGE_LEVELS),
            ColumnSchema::categorical("insulin").with_levels(&MED_CHANGE_LEVELS),
            ColumnSchema::categorical("readmitted").with_levels(&READMIT_LEVELS),
            ColumnSchema::count("num_procs"),
            ColumnSchema::count("num_meds"),
            ColumnSchema::count("num_ip"),
            ColumnSchema::count("num_diags"),
        ])
        .expect("cleaned schema is valid")
    }

    /// Parse a schema file: either a bare array of column schemas or an
    /// object `{ "missing_tokens": [...], "columns": [...] }`.
    pub fn from_json_str(text: &str) -> Result<Self> {
        match serde_json::from_str::<SchemaFile>(text)? {
            SchemaFile::Columns(columns) => Schema::new(columns),
            SchemaFile::Full {
                missing_tokens,
                columns,
            } => Ok(Schema::new(columns)?.with_missing_tokens(missing_tokens)),
        }
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Schema::from_json_str(&text)
    }

    pub fn columns(&self) -> &[ColumnSchema] {
        &self.columns
    }

    pub fn missing_tokens(&self) -> &[String] {
        &self.missing_tokens
    }

    pub fn get(&self, name: &str) -> Option<&ColumnSchema> {
        self.columns.iter().find(|c| c.name == name)
    }

    pub fn without(&self, name: &str) -> Self {
        Schema {
            columns: self
                .columns
                .iter()
                .filter(|c| c.name != name)
                .cloned()
                .collect(),
            missing_tokens: self.missing_tokens.clone(),
        }
    }

    /// Keep only the named columns, in schema order.
    pub fn subset(&self, names: &[&str]) -> Result<Self> {
        for n in names {
            if self.get(n).is_none() {
                return Err(Error::UnknownColumn(n.to_string()));
            }
        }
        Ok(Schema {
            columns: self
                .columns
                .iter()
                .filter(|c| names.contains(&c.name.as_str()))
                .cloned()
                .collect(),
            missing_tokens: self.missing_tokens.clone(),
        })
    }

    fn is_missing_token(&self, token: &str) -> bool {
        self.missing_tokens.iter().any(|t| t == token)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ColumnData {
    Count(Vec<Option<i64>>),
    Categorical(Vec<Option<String>>),
}

impl ColumnData {
    pub fn len(&self) -> usize {
        match self {
            ColumnData::Count(v) => v.len(),
            ColumnData::Categorical(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn kind(&self) -> ColumnKind {
        match self {
            ColumnData::Count(_) => ColumnKind::CountInteger,
            ColumnData::Categorical(_) => ColumnKind::Categorical,
        }
    }

    pub fn missing_count(&self) -> usize {
        match self {
            ColumnData::Count(v) => v.iter().filter(|x| x.is_none()).count(),
            ColumnData::Categorical(v) => v.iter().filter(|x| x.is_none()).count(),
        }
    }

    fn select(&self, rows: &[usize]) -> ColumnData {
        match self {
            ColumnData::Count(v) => ColumnData::Count(rows.iter().map(|&i| v[i]).collect()),
            ColumnData::Categorical(v) => {
                ColumnData::Categorical(rows.iter().map(|&i| v[i].clone()).collect())
            }
        }
    }

    fn cell_text(&self, row: usize) -> Option<String> {
        match self {
            ColumnData::Count(v) => v[row].map(|x| x.to_string()),
            ColumnData::Categorical(v) => v[row].clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub schema: ColumnSchema,
    pub data: ColumnData,
}

impl Column {
    pub fn name(&self) -> &str {
        &self.schema.name
    }
}

/// Immutable columnar table. Every column holds exactly `n_rows` entries.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTable {
    columns: Vec<Column>,
    n_rows: usize,
    missing_token: String,
}

impl RawTable {
    pub fn new(columns: Vec<Column>) -> Result<Self> {
        let n_rows = columns.first().map_or(0, |c| c.data.len());
        let mut seen = HashSet::new();
        for c in &columns {
            if !seen.insert(c.name()) {
                return Err(Error::Schema(format!("duplicate column `{}`", c.name())));
            }
            if c.data.len() != n_rows {
                return Err(Error::Validation(format!(
                    "column `{}` has {} entries, expected {}",
                    c.name(),
                    c.data.len(),
                    n_rows
                )));
            }
            if c.data.kind() != c.schema.kind {
                return Err(Error::Schema(format!(
                    "column `{}` data does not match its declared kind",
                    c.name()
                )));
            }
        }
        Ok(RawTable {
            columns,
            n_rows,
            missing_token: DEFAULT_MISSING_TOKENS[0].to_string(),
        })
    }

    /// Token written for missing cells by [`write_csv`].
    pub fn with_missing_token(mut self, token: &str) -> Self {
        self.missing_token = token.to_string();
        self
    }

    pub fn missing_token(&self) -> &str {
        &self.missing_token
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column_names(&self) -> Vec<&str> {
        self.columns.iter().map(|c| c.name()).collect()
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name() == name)
    }

    pub fn column(&self, name: &str) -> Result<&Column> {
        self.columns
            .iter()
            .find(|c| c.name() == name)
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))
    }

    pub fn counts(&self, name: &str) -> Result<&[Option<i64>]> {
        match &self.column(name)?.data {
            ColumnData::Count(v) => Ok(v),
            ColumnData::Categorical(_) => Err(Error::Validation(format!(
                "column `{name}` is categorical, expected counts"
            ))),
        }
    }

    pub fn levels(&self, name: &str) -> Result<&[Option<String>]> {
        match &self.column(name)?.data {
            ColumnData::Categorical(v) => Ok(v),
            ColumnData::Count(_) => Err(Error::Validation(format!(
                "column `{name}` holds counts, expected categorical"
            ))),
        }
    }

    /// Count column as `f64`, failing on any missing entry.
    pub fn counts_f64(&self, name: &str) -> Result<Vec<f64>> {
        self.counts(name)?
            .iter()
            .enumerate()
            .map(|(i, v)| {
                v.map(|x| x as f64).ok_or_else(|| {
                    Error::Validation(format!("column `{name}` is missing at row {}", i + 1))
                })
            })
            .collect()
    }

    /// Rows in the given order (indices may repeat).
    pub fn select_rows(&self, rows: &[usize]) -> RawTable {
        RawTable {
            columns: self
                .columns
                .iter()
                .map(|c| Column {
                    schema: c.schema.clone(),
                    data: c.data.select(rows),
                })
                .collect(),
            n_rows: rows.len(),
            missing_token: self.missing_token.clone(),
        }
    }

    pub fn without_column(&self, name: &str) -> Result<RawTable> {
        let pos = self
            .position(name)
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))?;
        let mut columns = self.columns.clone();
        columns.remove(pos);
        Ok(RawTable {
            columns,
            n_rows: self.n_rows,
            missing_token: self.missing_token.clone(),
        })
    }

    pub fn insert_column(&self, at: usize, column: Column) -> Result<RawTable> {
        let mut columns = self.columns.clone();
        columns.insert(at.min(columns.len()), column);
        Ok(RawTable::new(columns)?.with_missing_token(&self.missing_token))
    }

    /// Replace the column of the same name, keeping its position.
    pub fn replace_column(&self, column: Column) -> Result<RawTable> {
        let pos = self
            .position(column.name())
            .ok_or_else(|| Error::UnknownColumn(column.name().to_string()))?;
        let mut columns = self.columns.clone();
        columns[pos] = column;
        Ok(RawTable::new(columns)?.with_missing_token(&self.missing_token))
    }
}

pub fn load_csv(path: &Path, schema: &Schema) -> Result<RawTable> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file, schema)
}

/// Header names of a CSV file without reading the data rows.
pub fn read_header(path: &Path) -> Result<Vec<String>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(file);
    Ok(rdr.headers()?.iter().map(str::to_string).collect())
}

pub fn read_csv<R: Read>(reader: R, schema: &Schema) -> Result<RawTable> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);
    let header = rdr.headers()?.clone();

    let mut index: HashMap<&str, usize> = HashMap::new();
    for (i, h) in header.iter().enumerate() {
        if index.insert(h, i).is_some() {
            return Err(Error::Schema(format!("duplicate header column `{h}`")));
        }
    }
    let mut positions = Vec::with_capacity(schema.columns().len());
    for col in schema.columns() {
        match index.get(col.name.as_str()) {
            Some(&i) => positions.push(i),
            None => {
                return Err(Error::Schema(format!(
                    "input is missing column `{}` required by the schema",
                    col.name
                )))
            }
        }
    }
    let extra: Vec<&str> = header.iter().filter(|h| schema.get(h).is_none()).collect();
    if !extra.is_empty() {
        log::warn!("ignoring columns not in the schema: {}", extra.join(", "));
    }

    let mut data: Vec<ColumnData> = schema
        .columns()
        .iter()
        .map(|c| match c.kind {
            ColumnKind::CountInteger => ColumnData::Count(Vec::new()),
            ColumnKind::Categorical => ColumnData::Categorical(Vec::new()),
        })
        .collect();

    for (r, record) in rdr.records().enumerate() {
        let record = record?;
        let row = r + 1;
        for ((col, &pos), out) in schema.columns().iter().zip(&positions).zip(data.iter_mut()) {
            let token = record.get(pos).unwrap_or("");
            match out {
                ColumnData::Count(v) => v.push(parse_count(schema, col, token, row)?),
                ColumnData::Categorical(v) => v.push(parse_level(schema, col, token, row)?),
            }
        }
    }

    let columns = schema
        .columns()
        .iter()
        .cloned()
        .zip(data)
        .map(|(schema, data)| Column { schema, data })
        .collect();
    let token = schema
        .missing_tokens()
        .first()
        .map_or(DEFAULT_MISSING_TOKENS[0], String::as_str);
    Ok(RawTable::new(columns)?.with_missing_token(token))
}

fn reject(col: &ColumnSchema, row: usize, message: String) -> Result<()> {
    if col.allow_missing {
        Ok(())
    } else {
        Err(Error::Parse {
            row,
            column: col.name.clone(),
            message,
        })
    }
}

fn parse_count(
    schema: &Schema,
    col: &ColumnSchema,
    token: &str,
    row: usize,
) -> Result<Option<i64>> {
    if schema.is_missing_token(token) {
        reject(col, row, "missing value not allowed".into())?;
        return Ok(None);
    }
    match token.trim().parse::<i64>() {
        Ok(v) if v >= 0 => Ok(Some(v)),
        _ => {
            reject(col, row, format!("`{token}` is not a nonnegative integer"))?;
            Ok(None)
        }
    }
}

fn parse_level(
    schema: &Schema,
    col: &ColumnSchema,
    token: &str,
    row: usize,
) -> Result<Option<String>> {
    if schema.is_missing_token(token) {
        reject(col, row, "missing value not allowed".into())?;
        return Ok(None);
    }
    if let Some(allowed) = &col.allowed_levels {
        if !allowed.iter().any(|l| l == token) {
            reject(col, row, format!("level `{token}` is not an allowed level"))?;
            return Ok(None);
        }
    }
    Ok(Some(token.to_string()))
}

pub fn write_csv<W: Write>(table: &RawTable, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(table.column_names())?;
    for row in 0..table.n_rows() {
        let record: Vec<String> = table
            .columns()
            .iter()
            .map(|c| {
                c.data
                    .cell_text(row)
                    .unwrap_or_else(|| table.missing_token().to_string())
            })
            .collect();
        w.write_record(&record)?;
    }
    w.flush().map_err(|e| Error::io("<csv output>", e))?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelCount {
    pub level: String,
    pub count: usize,
}

/// Frequencies of the non-missing levels, most frequent first; ties are
/// ordered lexicographically.
pub fn level_counts(values: &[Option<String>]) -> Vec<LevelCount> {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for v in values.iter().flatten() {
        *counts.entry(v.as_str()).or_default() += 1;
    }
    let mut out: Vec<LevelCount> = counts
        .into_iter()
        .map(|(level, count)| LevelCount {
            level: level.to_string(),
            count,
        })
        .collect();
    // stable sort keeps lexicographic order within equal counts
    out.sort_by_key(|lc| std::cmp::Reverse(lc.count));
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountSummary {
    pub n: usize,
    pub missing: usize,
    pub min: Option<f64>,
    pub q1: Option<f64>,
    pub median: Option<f64>,
    pub mean: Option<f64>,
    pub q3: Option<f64>,
    pub max: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelSummary {
    pub levels: Vec<LevelCount>,
    pub missing: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ColumnSummary {
    Count(CountSummary),
    Categorical(LevelSummary),
}

/// Descriptive summary over the non-missing entries of one column.
pub fn column_summary(table: &RawTable, name: &str) -> Result<ColumnSummary> {
    let column = table.column(name)?;
    Ok(match &column.data {
        ColumnData::Count(v) => {
            let present: Vec<i64> = v.iter().flatten().copied().collect();
            let total: i128 = present.iter().map(|&x| x as i128).sum();
            let sorted: Vec<f64> = {
                let mut s: Vec<f64> = present.iter().map(|&x| x as f64).collect();
                s.sort_by(f64::total_cmp);
                s
            };
            let n = present.len();
            CountSummary {
                n,
                missing: v.len() - n,
                min: sorted.first().copied(),
                q1: stats::quantile_sorted(&sorted, 0.25),
                median: stats::quantile_sorted(&sorted, 0.5),
                mean: (n > 0).then(|| total as f64 / n as f64),
                q3: stats::quantile_sorted(&sorted, 0.75),
                max: sorted.last().copied(),
            }
            .into()
        }
        ColumnData::Categorical(v) => ColumnSummary::Categorical(LevelSummary {
            levels: level_counts(v),
            missing: column.data.missing_count(),
        }),
    })
}

impl From<CountSummary> for ColumnSummary {
    fn from(s: CountSummary) -> Self {
        ColumnSummary::Count(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str =
        "days,gender,age,race,weight,admit_type_id,metformin,insulin,readmitted,num_procs,num_meds,num_ip,num_diags\n";

    fn load(text: &str) -> Result<RawTable> {
        read_csv(text.as_bytes(), &Schema::study())
    }

    #[test]
    fn single_row_round_trip() {
        let t = load(&format!(
            "{HEADER}4,Female,[70-80),Caucasian,?,1,No,Steady,NO,0,13,0,9\n"
        ))
        .unwrap();
        assert_eq!(t.n_rows(), 1);
        assert_eq!(t.counts("days").unwrap(), &[Some(4)]);
        assert_eq!(t.levels("weight").unwrap(), &[None]);
    }

    #[test]
    fn header_only_gives_empty_table() {
        let t = load(HEADER).unwrap();
        assert_eq!(t.n_rows(), 0);
        assert_eq!(t.columns().len(), 13);
    }

    #[test]
    fn missing_schema_column_is_named() {
        let err = read_csv("days,gender\n3,Male\n".as_bytes(), &Schema::study()).unwrap_err();
        match err {
            Error::Schema(msg) => assert!(msg.contains("`age`"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn extra_columns_are_ignored() {
        let schema = Schema::new(vec![ColumnSchema::count("days")]).unwrap();
        let t = read_csv("encounter_id,days\n17,3\n".as_bytes(), &schema).unwrap();
        assert_eq!(t.column_names(), vec!["days"]);
    }

    #[test]
    fn parse_error_has_coordinates() {
        let err = load(&format!(
            "{HEADER}4,Female,[70-80),Caucasian,?,1,No,Steady,NO,0,13,0,9\n\
             x,Female,[70-80),Caucasian,?,1,No,Steady,NO,0,13,0,9\n"
        ))
        .unwrap_err();
        match err {
            Error::Parse { row, column, .. } => {
                assert_eq!(row, 2);
                assert_eq!(column, "days");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn negative_and_fractional_counts_rejected() {
        let schema = Schema::new(vec![ColumnSchema::count("n")]).unwrap();
        assert!(read_csv("n\n-1\n".as_bytes(), &schema).is_err());
        assert!(read_csv("n\n1.5\n".as_bytes(), &schema).is_err());
        let lenient = Schema::new(vec![ColumnSchema::count("n").missing_allowed()]).unwrap();
        let t = read_csv("n\n1.5\n?\n2\n".as_bytes(), &lenient).unwrap();
        assert_eq!(t.counts("n").unwrap(), &[None, None, Some(2)]);
    }

    #[test]
    fn disallowed_level_rejected() {
        let err = load(&format!(
            "{HEADER}4,Female,[70-80),Caucasian,?,1,Sometimes,Steady,NO,0,13,0,9\n"
        ))
        .unwrap_err();
        assert!(matches!(err, Error::Parse { ref column, .. } if column == "metformin"));
    }

    #[test]
    fn custom_missing_tokens_from_schema_file() {
        let schema = Schema::from_json_str(
            r#"{"missing_tokens": ["NA"], "columns": [
                {"name": "days", "kind": "count-integer"},
                {"name": "race", "kind": "categorical", "allow_missing": true}]}"#,
        )
        .unwrap();
        let t = read_csv("days,race\n2,NA\n3,?\n".as_bytes(), &schema).unwrap();
        assert_eq!(t.levels("race").unwrap(), &[None, Some("?".to_string())]);
        let plain =
            Schema::from_json_str(r#"[{"name": "days", "kind": "count-integer"}]"#).unwrap();
        assert_eq!(plain.missing_tokens(), &["?", ""]);
    }

    #[test]
    fn duplicate_schema_names_rejected() {
        let err = Schema::new(vec![ColumnSchema::count("a"), ColumnSchema::count("a")]);
        assert!(err.is_err());
    }

    #[test]
    fn summary_of_constant_column() {
        let schema = Schema::new(vec![ColumnSchema::count("x")]).unwrap();
        let t = read_csv("x\n5\n5\n5\n".as_bytes(), &schema).unwrap();
        let ColumnSummary::Count(s) = column_summary(&t, "x").unwrap() else {
            panic!()
        };
        assert_eq!(s.min, Some(5.0));
        assert_eq!(s.mean, Some(5.0));
        assert_eq!(s.median, Some(5.0));
        assert_eq!(s.max, Some(5.0));
        assert!(matches!(
            column_summary(&t, "y"),
            Err(Error::UnknownColumn(_))
        ));
    }

    #[test]
    fn level_counts_order() {
        let v: Vec<Option<String>> = ["b", "a", "c", "c", "a", "b", "b"]
            .iter()
            .map(|s| Some(s.to_string()))
            .collect();
        let c = level_counts(&v);
        let order: Vec<&str> = c.iter().map(|l| l.level.as_str()).collect();
        assert_eq!(order, ["b", "a", "c"]);
    }
}
