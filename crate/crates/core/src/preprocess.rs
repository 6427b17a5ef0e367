//! The study cleaning recipe.
//!
//! Order: drop rows with an invalid gender, drop `weight`, recode `race`,
//! turn `admit_type_id` into a factor. Factor reference levels are then
//! chosen as the most frequent level of each categorical column.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{level_counts, Column, ColumnData, ColumnKind, ColumnSchema, RawTable};

pub const VALID_GENDERS: [&str; 2] = ["Female", "Male"];
pub const RACE_LEVELS: [&str; 4] = ["Caucasian", "AfricanAmerican", "Other", "Missing"];
pub const ADMIT_TYPE_LEVELS: [&str; 4] = ["1", "2", "3", "4"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleaningReport {
    pub rows_in: usize,
    pub rows_removed_gender: usize,
    pub columns_dropped: Vec<String>,
    pub race_recode_counts: BTreeMap<String, usize>,
    pub rows_out: usize,
}

/// Ordered levels of one factor; `levels[0]` is the reference level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorSpec {
    pub variable: String,
    pub levels: Vec<String>,
    pub reference: String,
}

impl FactorSpec {
    pub fn new(variable: &str, levels: Vec<String>) -> Result<Self> {
        let reference = levels.first().cloned().ok_or_else(|| {
            Error::Validation(format!("factor `{variable}` has no observed levels"))
        })?;
        for (i, l) in levels.iter().enumerate() {
            if levels[..i].contains(l) {
                return Err(Error::Validation(format!(
                    "factor `{variable}` lists level `{l}` twice"
                )));
            }
        }
        Ok(FactorSpec {
            variable: variable.to_string(),
            levels,
            reference,
        })
    }

    /// Levels that receive a dummy column, in encoding order.
    pub fn non_reference(&self) -> &[String] {
        &self.levels[1..]
    }

    pub fn position(&self, level: &str) -> Option<usize> {
        self.levels.iter().position(|l| l == level)
    }
}

/// Remove rows whose gender is not `Female` or `Male` (missing included).
pub fn drop_invalid_gender(table: &RawTable) -> Result<(RawTable, usize)> {
    let genders = table.levels("gender")?;
    let keep: Vec<usize> = genders
        .iter()
        .enumerate()
        .filter(|(_, g)| g.as_deref().is_some_and(|g| VALID_GENDERS.contains(&g)))
        .map(|(i, _)| i)
        .collect();
    let removed = table.n_rows() - keep.len();
    let filtered = table.select_rows(&keep);
    let mut schema = filtered.column("gender")?.schema.clone();
    schema.allowed_levels = Some(VALID_GENDERS.iter().map(|s| s.to_string()).collect());
    schema.allow_missing = false;
    let data = filtered.column("gender")?.data.clone();
    Ok((filtered.replace_column(Column { schema, data })?, removed))
}

pub fn drop_column(table: &RawTable, name: &str) -> Result<RawTable> {
    table.without_column(name)
}

/// Missing race becomes `Missing`; `Asian`, `Hispanic` and `Other` merge
/// into `Other`. Already-recoded values pass through unchanged.
pub fn recode_race(table: &RawTable) -> Result<RawTable> {
    let column = table.column("race")?;
    let values = table.levels("race")?;
    let recoded = values
        .iter()
        .map(|v| {
            let level = match v.as_deref() {
                None => "Missing",
                Some("Caucasian") => "Caucasian",
                Some("AfricanAmerican") => "AfricanAmerican",
                Some("Asian" | "Hispanic" | "Other") => "Other",
                Some("Missing") => "Missing",
                Some(other) => {
                    return Err(Error::Validation(format!(
                        "unexpected race level `{other}`"
                    )))
                }
            };
            Ok(Some(level.to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut schema = column.schema.clone();
    schema.allowed_levels = Some(RACE_LEVELS.iter().map(|s| s.to_string()).collect());
    schema.allow_missing = false;
    table.replace_column(Column {
        schema,
        data: ColumnData::Categorical(recoded),
    })
}

/// Admission type codes 1–4 become the factor levels "1"–"4". Code 4
/// (type unavailable) stays a regular level.
pub fn factorize_admit_type(table: &RawTable) -> Result<RawTable> {
    let column = table.column("admit_type_id")?;
    let levels: Vec<Option<String>> = match &column.data {
        ColumnData::Count(codes) => codes
            .iter()
            .enumerate()
            .map(|(i, c)| match c {
                Some(c @ 1..=4) => Ok(Some(c.to_string())),
                Some(c) => Err(Error::Validation(format!(
                    "admit_type_id code {c} at row {} is outside 1-4",
                    i + 1
                ))),
                None => Err(Error::Validation(format!(
                    "admit_type_id is missing at row {}",
                    i + 1
                ))),
            })
            .collect::<Result<_>>()?,
        ColumnData::Categorical(values) => {
            for v in values {
                if !v.as_deref().is_some_and(|v| ADMIT_TYPE_LEVELS.contains(&v)) {
                    return Err(Error::Validation(format!(
                        "admit_type_id level `{}` is outside 1-4",
                        v.as_deref().unwrap_or("<missing>")
                    )));
                }
            }
            values.clone()
        }
    };
    let schema = ColumnSchema {
        name: "admit_type_id".into(),
        kind: ColumnKind::Categorical,
        allowed_levels: Some(ADMIT_TYPE_LEVELS.iter().map(|s| s.to_string()).collect()),
        allow_missing: false,
    };
    table.replace_column(Column {
        schema,
        data: ColumnData::Categorical(levels),
    })
}

/// One spec per categorical column, most frequent level first.
pub fn build_factor_specs(table: &RawTable) -> Result<Vec<FactorSpec>> {
    table
        .columns()
        .iter()
        .filter_map(|c| match &c.data {
            ColumnData::Categorical(v) => Some((c.name(), v)),
            ColumnData::Count(_) => None,
        })
        .map(|(name, values)| {
            let levels = level_counts(values).into_iter().map(|l| l.level).collect();
            FactorSpec::new(name, levels)
        })
        .collect()
}

/// Run the full recipe and report what it did.
pub fn clean(table: &RawTable) -> Result<(RawTable, CleaningReport)> {
    let rows_in = table.n_rows();
    let (mut out, rows_removed_gender) = drop_invalid_gender(table)?;
    let mut columns_dropped = Vec::new();
    if out.position("weight").is_some() {
        out = drop_column(&out, "weight")?;
        columns_dropped.push("weight".to_string());
    }
    out = recode_race(&out)?;
    out = factorize_admit_type(&out)?;

    for c in out.columns() {
        let missing = c.data.missing_count();
        if missing > 0 {
            return Err(Error::Validation(format!(
                "column `{}` has {missing} unexpected missing values",
                c.name()
            )));
        }
    }

    let race_recode_counts = level_counts(out.levels("race")?)
        .into_iter()
        .map(|l| (l.level, l.count))
        .collect();
    let report = CleaningReport {
        rows_in,
        rows_removed_gender,
        columns_dropped,
        race_recode_counts,
        rows_out: out.n_rows(),
    };
    Ok((out, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{read_csv, Schema};

    fn categorical(name: &str, values: &[Option<&str>]) -> Column {
        Column {
            schema: ColumnSchema::categorical(name).missing_allowed(),
            data: ColumnData::Categorical(values.iter().map(|v| v.map(str::to_string)).collect()),
        }
    }

    fn count(name: &str, values: &[Option<i64>]) -> Column {
        Column {
            schema: ColumnSchema::count(name),
            data: ColumnData::Count(values.to_vec()),
        }
    }

    #[test]
    fn gender_filter_counts_removed_rows() {
        let t = RawTable::new(vec![categorical(
            "gender",
            &[
                Some("Female"),
                Some("Unknown/Invalid"),
                Some("Male"),
                Some("Unknown/Invalid"),
                Some("Female"),
            ],
        )])
        .unwrap();
        let (out, removed) = drop_invalid_gender(&t).unwrap();
        assert_eq!(removed, 2);
        assert_eq!(out.n_rows(), 3);
    }

    #[test]
    fn gender_filter_noop_on_valid_rows() {
        let t = RawTable::new(vec![categorical("gender", &[Some("Female"); 4])]).unwrap();
        let (out, removed) = drop_invalid_gender(&t).unwrap();
        assert_eq!(removed, 0);
        assert_eq!(out.levels("gender").unwrap(), t.levels("gender").unwrap());
    }

    #[test]
    fn drop_column_twice_fails_and_reinsert_restores() {
        let t = RawTable::new(vec![
            count("days", &[Some(1), Some(2)]),
            categorical("weight", &[None, Some("[75-100)")]),
            count("num_meds", &[Some(3), Some(4)]),
        ])
        .unwrap();
        let dropped = drop_column(&t, "weight").unwrap();
        assert_eq!(dropped.n_rows(), 2);
        assert!(matches!(
            drop_column(&dropped, "weight"),
            Err(Error::UnknownColumn(_))
        ));
        let back = dropped
            .insert_column(1, t.column("weight").unwrap().clone())
            .unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn race_recode_rules() {
        let t = RawTable::new(vec![categorical(
            "race",
            &[
                None,
                Some("Hispanic"),
                Some("Asian"),
                Some("Caucasian"),
                Some("AfricanAmerican"),
            ],
        )])
        .unwrap();
        let out = recode_race(&t).unwrap();
        let got: Vec<&str> = out
            .levels("race")
            .unwrap()
            .iter()
            .map(|v| v.as_deref().unwrap())
            .collect();
        assert_eq!(
            got,
            ["Missing", "Other", "Other", "Caucasian", "AfricanAmerican"]
        );

        let bad = RawTable::new(vec![categorical("race", &[Some("Martian")])]).unwrap();
        let err = recode_race(&bad).unwrap_err();
        assert!(err.to_string().contains("Martian"));
    }

    #[test]
    fn admit_type_becomes_factor() {
        let t = RawTable::new(vec![count("admit_type_id", &[Some(4)])]).unwrap();
        let out = factorize_admit_type(&t).unwrap();
        assert_eq!(
            out.levels("admit_type_id").unwrap(),
            &[Some("4".to_string())]
        );

        let bad = RawTable::new(vec![count("admit_type_id", &[Some(7)])]).unwrap();
        assert!(matches!(
            factorize_admit_type(&bad),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn factor_reference_is_most_frequent() {
        let t = RawTable::new(vec![
            categorical(
                "f",
                &[
                    Some("A"),
                    Some("B"),
                    Some("B"),
                    Some("A"),
                    Some("B"),
                    Some("B"),
                    Some("B"),
                ],
            ),
            categorical(
                "g",
                &[
                    Some("B"),
                    Some("A"),
                    Some("B"),
                    Some("A"),
                    Some("A"),
                    Some("B"),
                    Some("C"),
                ],
            ),
        ])
        .unwrap();
        let specs = build_factor_specs(&t).unwrap();
        assert_eq!(specs[0].reference, "B");
        assert_eq!(specs[1].reference, "A");
        assert_eq!(specs[1].levels, ["A", "B", "C"]);
    }

    #[test]
    fn empty_factor_is_rejected() {
        let t = RawTable::new(vec![categorical("f", &[])]).unwrap();
        assert!(matches!(build_factor_specs(&t), Err(Error::Validation(_))));
    }

    #[test]
    fn recipe_on_small_extract() {
        let text = "days,gender,age,race,weight,admit_type_id,metformin,insulin,readmitted,num_procs,num_meds,num_ip,num_diags\n\
            4,Female,[70-80),Caucasian,?,1,No,Steady,NO,0,13,0,9\n\
            2,Unknown/Invalid,[50-60),?,?,2,No,No,>30,1,10,0,5\n\
            3,Male,[60-70),?,[75-100),4,Up,No,<30,2,22,1,7\n\
            6,Male,[80-90),Hispanic,?,3,No,Down,NO,0,18,2,9\n";
        let raw = read_csv(text.as_bytes(), &Schema::study()).unwrap();
        let (clean_table, report) = clean(&raw).unwrap();
        assert_eq!(report.rows_in, 4);
        assert_eq!(report.rows_removed_gender, 1);
        assert_eq!(report.rows_out, 3);
        assert_eq!(report.columns_dropped, ["weight"]);
        assert_eq!(report.race_recode_counts.get("Missing"), Some(&1));
        assert_eq!(report.race_recode_counts.get("Other"), Some(&1));
        assert!(clean_table
            .columns()
            .iter()
            .all(|c| c.data.missing_count() == 0));
        // the cleaned table carries exactly the cleaned schema
        let schemas: Vec<_> = clean_table
            .columns()
            .iter()
            .map(|c| c.schema.clone())
            .collect();
        assert_eq!(schemas, Schema::cleaned().columns());
    }

    #[test]
    fn unexpected_missing_aborts() {
        let schema = Schema::study();
        let mut cols = schema.columns().to_vec();
        cols.iter_mut()
            .find(|c| c.name == "num_ip")
            .unwrap()
            .allow_missing = true;
        let lenient = Schema::new(cols).unwrap();
        let text = "days,gender,age,race,weight,admit_type_id,metformin,insulin,readmitted,num_procs,num_meds,num_ip,num_diags\n\
            4,Female,[70-80),Caucasian,?,1,No,Steady,NO,0,13,?,9\n";
        let raw = read_csv(text.as_bytes(), &lenient).unwrap();
        let err = clean(&raw).unwrap_err();
        assert!(err.to_string().contains("num_ip"));
    }
}
