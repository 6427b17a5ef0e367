//! Dummy encoding of cleaned tables into design matrices, and the seeded
//! train/test split.

use std::io::Write;
use std::ops::Range;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{ColumnData, RawTable};
use crate::preprocess::FactorSpec;

pub const INTERCEPT: &str = "(Intercept)";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TermKind {
    Numeric,
    /// `levels[0]` is the reference level and gets no column.
    Factor {
        levels: Vec<String>,
        reference: String,
    },
}

/// A model term: one variable, contributing one or more design columns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub name: String,
    #[serde(flatten)]
    pub kind: TermKind,
}

impl Term {
    pub fn numeric(name: &str) -> Self {
        Term {
            name: name.to_string(),
            kind: TermKind::Numeric,
        }
    }

    pub fn factor(spec: &FactorSpec) -> Self {
        Term {
            name: spec.variable.clone(),
            kind: TermKind::Factor {
                levels: spec.levels.clone(),
                reference: spec.reference.clone(),
            },
        }
    }

    /// Number of design columns (the degrees of freedom of the term).
    pub fn width(&self) -> usize {
        match &self.kind {
            TermKind::Numeric => 1,
            TermKind::Factor { levels, .. } => levels.len() - 1,
        }
    }

    pub fn column_names(&self) -> Vec<String> {
        match &self.kind {
            TermKind::Numeric => vec![self.name.clone()],
            TermKind::Factor { levels, .. } => levels[1..]
                .iter()
                .map(|l| format!("{}{}", self.name, l))
                .collect(),
        }
    }

    pub fn factor_spec(&self) -> Option<FactorSpec> {
        match &self.kind {
            TermKind::Numeric => None,
            TermKind::Factor { levels, .. } => FactorSpec::new(&self.name, levels.clone()).ok(),
        }
    }
}

/// Dense design matrix with named columns.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    column_names: Vec<String>,
    values: DMatrix<f64>,
    terms: Vec<Term>,
    has_intercept: bool,
}

impl DesignMatrix {
    /// Wrap an arbitrary matrix. Every column other than `(Intercept)`
    /// becomes a numeric term of the same name.
    pub fn new(column_names: Vec<String>, values: DMatrix<f64>) -> Result<Self> {
        if column_names.len() != values.ncols() {
            return Err(Error::Validation(format!(
                "{} column names for {} columns",
                column_names.len(),
                values.ncols()
            )));
        }
        let has_intercept = column_names.iter().any(|c| c == INTERCEPT);
        let terms = column_names
            .iter()
            .filter(|c| *c != INTERCEPT)
            .map(|c| Term::numeric(c))
            .collect();
        Ok(DesignMatrix {
            column_names,
            values,
            terms,
            has_intercept,
        })
    }

    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    pub fn p(&self) -> usize {
        self.values.ncols()
    }

    pub fn column_names(&self) -> &[String] {
        &self.column_names
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn has_intercept(&self) -> bool {
        self.has_intercept
    }

    /// Column range of each term, in matrix order.
    pub fn term_columns(&self) -> Vec<(&Term, Range<usize>)> {
        let mut start = usize::from(self.has_intercept);
        self.terms
            .iter()
            .map(|t| {
                let r = start..start + t.width();
                start = r.end;
                (t, r)
            })
            .collect()
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(&self.column_names)?;
        for row in self.values.row_iter() {
            w.write_record(row.iter().map(|v| v.to_string()))?;
        }
        w.flush().map_err(|e| Error::io("<csv output>", e))?;
        Ok(())
    }
}

/// Pre-encoded column blocks for a set of terms, so that many design
/// matrices over subsets of the terms can be assembled cheaply.
#[derive(Debug, Clone)]
pub struct TermEncoder {
    n: usize,
    blocks: Vec<(Term, Vec<Vec<f64>>)>,
}

impl TermEncoder {
    pub fn new(table: &RawTable, specs: &[FactorSpec], terms: &[String]) -> Result<Self> {
        let n = table.n_rows();
        let mut blocks = Vec::with_capacity(terms.len());
        for (i, name) in terms.iter().enumerate() {
            if terms[..i].contains(name) {
                return Err(Error::Validation(format!("term `{name}` listed twice")));
            }
            let column = table.column(name)?;
            let block = match &column.data {
                ColumnData::Count(values) => {
                    let col = values
                        .iter()
                        .enumerate()
                        .map(|(r, v)| {
                            v.map(|x| x as f64).ok_or_else(|| {
                                Error::Validation(format!("`{name}` is missing at row {}", r + 1))
                            })
                        })
                        .collect::<Result<Vec<f64>>>()?;
                    (Term::numeric(name), vec![col])
                }
                ColumnData::Categorical(values) => {
                    let spec = specs.iter().find(|s| &s.variable == name).ok_or_else(|| {
                        Error::Validation(format!("no factor specification for `{name}`"))
                    })?;
                    let mut cols = vec![vec![0.0; n]; spec.levels.len() - 1];
                    for (r, v) in values.iter().enumerate() {
                        let level = v.as_deref().ok_or_else(|| {
                            Error::Validation(format!("`{name}` is missing at row {}", r + 1))
                        })?;
                        match spec.position(level) {
                            Some(0) => {}
                            Some(k) => cols[k - 1][r] = 1.0,
                            None => {
                                return Err(Error::UnseenLevel {
                                    variable: name.clone(),
                                    level: level.to_string(),
                                })
                            }
                        }
                    }
                    (Term::factor(spec), cols)
                }
            };
            blocks.push(block);
        }
        Ok(TermEncoder { n, blocks })
    }

    pub fn term(&self, name: &str) -> Option<&Term> {
        self.blocks.iter().map(|(t, _)| t).find(|t| t.name == name)
    }

    /// Intercept followed by the named terms in the given order.
    pub fn design(&self, terms: &[String]) -> Result<DesignMatrix> {
        let mut column_names = vec![INTERCEPT.to_string()];
        let mut selected = Vec::with_capacity(terms.len());
        let mut columns: Vec<&[f64]> = Vec::new();
        let ones = vec![1.0; self.n];
        columns.push(&ones);
        for name in terms {
            let (term, cols) = self
                .blocks
                .iter()
                .find(|(t, _)| &t.name == name)
                .ok_or_else(|| Error::UnknownColumn(name.clone()))?;
            if selected.iter().any(|t: &Term| &t.name == name) {
                return Err(Error::Validation(format!("term `{name}` listed twice")));
            }
            column_names.extend(term.column_names());
            columns.extend(cols.iter().map(Vec::as_slice));
            selected.push(term.clone());
        }
        let values = DMatrix::from_iterator(
            self.n,
            columns.len(),
            columns.iter().flat_map(|c| c.iter().copied()),
        );
        Ok(DesignMatrix {
            column_names,
            values,
            terms: selected,
            has_intercept: true,
        })
    }
}

/// Design matrix of the given terms (intercept first), no response.
pub fn encode_predictors(
    table: &RawTable,
    specs: &[FactorSpec],
    terms: &[String],
) -> Result<DesignMatrix> {
    TermEncoder::new(table, specs, terms)?.design(terms)
}

/// Count response as a vector; missing entries are an error.
pub fn response(table: &RawTable, name: &str) -> Result<DVector<f64>> {
    Ok(DVector::from_vec(table.counts_f64(name)?))
}

pub fn encode(
    table: &RawTable,
    specs: &[FactorSpec],
    terms: &[String],
    response_name: &str,
) -> Result<(DesignMatrix, DVector<f64>)> {
    if terms.iter().any(|t| t == response_name) {
        return Err(Error::Validation(format!(
            "response `{response_name}` cannot also be a term"
        )));
    }
    let y = response(table, response_name)?;
    Ok((encode_predictors(table, specs, terms)?, y))
}

/// Splitmix64 generator. Each call advances the state by the golden-ratio
/// increment and returns the mixed state.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// floor(next · bound / 2⁶⁴), a value in `0..bound`.
    pub fn below(&mut self, bound: u64) -> u64 {
        ((self.next_u64() as u128 * bound as u128) >> 64) as u64
    }
}

/// Fisher–Yates permutation of `0..n`: for i = n−1 down to 1, swap i with
/// `below(i + 1)`.
pub fn shuffled_indices(n: usize, seed: u64) -> Vec<usize> {
    let mut rng = SplitMix64::new(seed);
    let mut idx: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.below(i as u64 + 1) as usize;
        idx.swap(i, j);
    }
    idx
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub seed: u64,
    /// Explicit training size; overrides `train_fraction` when set.
    #[serde(default)]
    pub train_size: Option<usize>,
}

impl SplitSpec {
    pub fn new(train_fraction: f64, seed: u64) -> Self {
        SplitSpec {
            train_fraction,
            seed,
            train_size: None,
        }
    }

    pub fn with_train_size(mut self, size: usize) -> Self {
        self.train_size = Some(size);
        self
    }

    /// Training size for `n` rows: the override if set, else
    /// round-half-up of `n · train_fraction`. Must satisfy 0 < size < n.
    pub fn resolve_train_size(&self, n: usize) -> Result<usize> {
        let size = match self.train_size {
            Some(s) => s,
            None => {
                if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
                    return Err(Error::Validation(format!(
                        "train fraction {} is not in (0, 1)",
                        self.train_fraction
                    )));
                }
                (n as f64 * self.train_fraction + 0.5).floor() as usize
            }
        };
        if size == 0 || size >= n {
            return Err(Error::Validation(format!(
                "training size {size} is out of range for {n} rows"
            )));
        }
        Ok(size)
    }
}

/// Train and test row indices, each in ascending order.
pub fn split_indices(n: usize, spec: &SplitSpec) -> Result<(Vec<usize>, Vec<usize>)> {
    let size = spec.resolve_train_size(n)?;
    let idx = shuffled_indices(n, spec.seed);
    let mut train = idx[..size].to_vec();
    let mut test = idx[size..].to_vec();
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

pub fn split(table: &RawTable, spec: &SplitSpec) -> Result<(RawTable, RawTable)> {
    let (train, test) = split_indices(table.n_rows(), spec)?;
    Ok((table.select_rows(&train), table.select_rows(&test)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{Column, ColumnSchema};

    fn toy_table() -> (RawTable, Vec<FactorSpec>) {
        let race = [
            "Caucasian",
            "AfricanAmerican",
            "Caucasian",
            "Other",
            "Missing",
        ];
        let t = RawTable::new(vec![
            Column {
                schema: ColumnSchema::count("days"),
                data: ColumnData::Count(vec![Some(1), Some(4), Some(2), Some(7), Some(3)]),
            },
            Column {
                schema: ColumnSchema::categorical("race"),
                data: ColumnData::Categorical(race.iter().map(|s| Some(s.to_string())).collect()),
            },
            Column {
                schema: ColumnSchema::count("num_meds"),
                data: ColumnData::Count(vec![Some(10), Some(3), Some(8), Some(20), Some(1)]),
            },
        ])
        .unwrap();
        let spec = FactorSpec::new(
            "race",
            ["Caucasian", "Missing", "AfricanAmerican", "Other"]
                .map(String::from)
                .to_vec(),
        )
        .unwrap();
        (t, vec![spec])
    }

    fn terms(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn single_numeric_term() {
        let (t, specs) = toy_table();
        let small = t.select_rows(&[0, 1, 2]);
        let (x, y) = encode(&small, &specs, &terms(&["num_meds"]), "days").unwrap();
        assert_eq!((x.n(), x.p()), (3, 2));
        assert_eq!(x.column_names(), ["(Intercept)", "num_meds"]);
        assert_eq!(x.values().column(0).as_slice(), &[1.0, 1.0, 1.0]);
        assert_eq!(y.as_slice(), &[1.0, 4.0, 2.0]);
    }

    #[test]
    fn factor_dummies_follow_spec_order() {
        let (t, specs) = toy_table();
        let (x, _) = encode(&t, &specs, &terms(&["race", "num_meds"]), "days").unwrap();
        assert_eq!(
            x.column_names(),
            [
                "(Intercept)",
                "raceMissing",
                "raceAfricanAmerican",
                "raceOther",
                "num_meds"
            ]
        );
        // Caucasian rows are all-zero in the race block
        for r in [0, 2] {
            assert_eq!(x.values().fixed_view::<1, 3>(r, 1).sum(), 0.0);
        }
        assert_eq!(x.values()[(1, 2)], 1.0);
        assert_eq!(x.values()[(3, 3)], 1.0);
        assert_eq!(x.values()[(4, 1)], 1.0);
        let ranges: Vec<_> = x
            .term_columns()
            .into_iter()
            .map(|(t, r)| (t.name.clone(), r))
            .collect();
        assert_eq!(
            ranges,
            vec![("race".to_string(), 1..4), ("num_meds".to_string(), 4..5)]
        );
    }

    #[test]
    fn unseen_level_is_an_error() {
        let (t, _) = toy_table();
        let spec = FactorSpec::new("race", terms(&["Caucasian", "AfricanAmerican"])).unwrap();
        let err = encode_predictors(&t, &[spec], &terms(&["race"])).unwrap_err();
        assert!(matches!(err, Error::UnseenLevel { ref level, .. } if level == "Other"));
    }

    #[test]
    fn response_cannot_be_a_term() {
        let (t, specs) = toy_table();
        assert!(encode(&t, &specs, &terms(&["days"]), "days").is_err());
    }

    #[test]
    fn splitmix_reference_stream() {
        // First outputs for seed 0 from the reference splitmix64.c
        let mut g = SplitMix64::new(0);
        assert_eq!(g.next_u64(), 0xE220_A839_7B1D_CDAF);
        assert_eq!(g.next_u64(), 0x6E78_9E6A_A1B9_65F4);
        assert_eq!(g.next_u64(), 0x06C4_5D18_8009_454F);
    }

    #[test]
    fn split_sizes_and_determinism() {
        let spec = SplitSpec::new(0.7, 42).with_train_size(7000);
        let (a, b) = split_indices(9997, &spec).unwrap();
        assert_eq!((a.len(), b.len()), (7000, 2997));
        let (a2, b2) = split_indices(9997, &spec).unwrap();
        assert_eq!((a, b), (a2, b2));
        assert_eq!(
            SplitSpec::new(0.7, 1).resolve_train_size(9997).unwrap(),
            6998
        );
        assert_eq!(SplitSpec::new(0.5, 1).resolve_train_size(5).unwrap(), 3);
    }

    #[test]
    fn split_rejects_degenerate_sizes() {
        assert!(SplitSpec::new(0.7, 1)
            .with_train_size(10)
            .resolve_train_size(10)
            .is_err());
        assert!(SplitSpec::new(0.0, 1).resolve_train_size(10).is_err());
        assert!(SplitSpec::new(0.01, 1).resolve_train_size(10).is_err());
    }
}
