//! Goodness-of-fit, residual and exploratory statistics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::glm::{unit_deviances, Family};
use crate::ingest::{level_counts, ColumnData, RawTable};
use crate::special::normal_quantile;
use crate::stats::{self, FiveNumber};

fn check_pair(y: &[f64], mu: &[f64]) -> Result<()> {
    if y.len() != mu.len() {
        return Err(Error::Validation(format!(
            "{} observations but {} predictions",
            y.len(),
            mu.len()
        )));
    }
    Ok(())
}

fn pearson_terms(y: &[f64], mu: &[f64], family: Family) -> Result<Vec<f64>> {
    check_pair(y, mu)?;
    y.iter()
        .zip(mu)
        .map(|(&y, &m)| {
            if family == Family::PoissonLog && !(m > 0.0) {
                return Err(Error::Domain(format!(
                    "poisson mean must be positive, got {m}"
                )));
            }
            Ok((y - m) * (y - m) / family.variance(m))
        })
        .collect()
}

/// Mean Pearson contribution (1/n)·Σ (y − μ)² / V(μ).
pub fn pearson_statistic(y: &[f64], mu: &[f64], family: Family) -> Result<f64> {
    if y.is_empty() {
        return Err(Error::Validation("no observations".into()));
    }
    Ok(stats::sum(&pearson_terms(y, mu, family)?) / y.len() as f64)
}

/// The three common normalizations of the Pearson statistic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PearsonSummary {
    /// Σ/n, the headline value.
    pub per_observation: f64,
    pub sum: f64,
    /// Σ/(n − p); absent when n ≤ p.
    pub per_df_residual: Option<f64>,
}

pub fn pearson_summary(y: &[f64], mu: &[f64], family: Family, p: usize) -> Result<PearsonSummary> {
    if y.is_empty() {
        return Err(Error::Validation("no observations".into()));
    }
    let sum = stats::sum(&pearson_terms(y, mu, family)?);
    let n = y.len();
    Ok(PearsonSummary {
        per_observation: sum / n as f64,
        sum,
        per_df_residual: (n > p).then(|| sum / (n - p) as f64),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub n: usize,
    pub mae: f64,
    pub rmse: f64,
    /// Absent when y is constant (zero total sum of squares).
    pub r_squared: Option<f64>,
    pub pearson_stat: f64,
}

pub fn fit_metrics(y: &[f64], mu: &[f64], family: Family) -> Result<MetricsReport> {
    check_pair(y, mu)?;
    let n = y.len();
    if n < 2 {
        return Err(Error::Validation(
            "fit metrics need at least two observations".into(),
        ));
    }
    let abs: Vec<f64> = y.iter().zip(mu).map(|(a, b)| (a - b).abs()).collect();
    let sq: Vec<f64> = abs.iter().map(|e| e * e).collect();
    let ybar = stats::mean(y).expect("n >= 2");
    let tss = stats::sum(
        &y.iter()
            .map(|v| (v - ybar) * (v - ybar))
            .collect::<Vec<_>>(),
    );
    let rss = stats::sum(&sq);
    Ok(MetricsReport {
        n,
        mae: stats::sum(&abs) / n as f64,
        rmse: (rss / n as f64).sqrt(),
        r_squared: (tss > 0.0).then(|| 1.0 - rss / tss),
        pearson_stat: pearson_statistic(y, mu, family)?,
    })
}

/// sign(y − μ)·√dᵢ.
pub fn deviance_residuals(y: &[f64], mu: &[f64], family: Family) -> Result<Vec<f64>> {
    let d = unit_deviances(y, mu, family)?;
    Ok(y.iter()
        .zip(mu)
        .zip(d)
        .map(|((&y, &m), d)| {
            let r = d.sqrt();
            if y < m {
                -r
            } else {
                r
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QqData {
    pub theoretical: Vec<f64>,
    /// Ascending.
    pub sample: Vec<f64>,
}

/// Normal q-q coordinates with plotting positions (i − 0.5)/n.
pub fn qq_data(residuals: &[f64]) -> Result<QqData> {
    let n = residuals.len();
    if n < 2 {
        return Err(Error::Validation(
            "q-q data needs at least two residuals".into(),
        ));
    }
    let theoretical = (1..=n)
        .map(|i| normal_quantile((i as f64 - 0.5) / n as f64))
        .collect();
    Ok(QqData {
        theoretical,
        sample: stats::sorted_copy(residuals),
    })
}

/// Plot data for residual-vs-fitted and q-q plots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualData {
    pub fitted: Vec<f64>,
    pub deviance_residuals: Vec<f64>,
    pub qq_theoretical: Vec<f64>,
    pub qq_sample: Vec<f64>,
}

impl ResidualData {
    pub fn compute(y: &[f64], mu: &[f64], family: Family) -> Result<Self> {
        let deviance_residuals = deviance_residuals(y, mu, family)?;
        let qq = qq_data(&deviance_residuals)?;
        Ok(ResidualData {
            fitted: mu.to_vec(),
            deviance_residuals,
            qq_theoretical: qq.theoretical,
            qq_sample: qq.sample,
        })
    }

    pub fn residual_summary(&self) -> Option<FiveNumber> {
        FiveNumber::of(&self.deviance_residuals)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub level: String,
    pub mean: f64,
    pub median: f64,
    pub n: usize,
}

/// Mean, median and count of a count column within each level of a
/// categorical column. Levels come most frequent first.
pub fn group_means(table: &RawTable, by: &str, target: &str) -> Result<Vec<GroupSummary>> {
    let groups = table.levels(by)?;
    let values = table.counts(target)?;
    let order = level_counts(groups);
    order
        .into_iter()
        .map(|lc| {
            let vals: Vec<f64> = groups
                .iter()
                .zip(values)
                .filter(|(g, _)| g.as_deref() == Some(lc.level.as_str()))
                .filter_map(|(_, v)| v.map(|x| x as f64))
                .collect();
            if vals.is_empty() {
                return Err(Error::Validation(format!(
                    "no `{target}` values for {by} = {}",
                    lc.level
                )));
            }
            Ok(GroupSummary {
                mean: stats::mean(&vals).expect("nonempty"),
                median: stats::median(&vals).expect("nonempty"),
                n: vals.len(),
                level: lc.level,
            })
        })
        .collect()
}

/// Pearson product-moment correlation.
pub fn correlation(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Validation(
            "correlation inputs differ in length".into(),
        ));
    }
    if x.len() < 2 {
        return Err(Error::Validation(
            "correlation needs at least two observations".into(),
        ));
    }
    let mx = stats::mean(x).expect("n >= 2");
    let my = stats::mean(y).expect("n >= 2");
    let dx: Vec<f64> = x.iter().map(|v| v - mx).collect();
    let dy: Vec<f64> = y.iter().map(|v| v - my).collect();
    let sxy = stats::sum(&dx.iter().zip(&dy).map(|(a, b)| a * b).collect::<Vec<_>>());
    let sxx = stats::sum(&dx.iter().map(|a| a * a).collect::<Vec<_>>());
    let syy = stats::sum(&dy.iter().map(|b| b * b).collect::<Vec<_>>());
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::Validation(
            "correlation undefined for a constant input".into(),
        ));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub names: Vec<String>,
    /// Row-major; `None` where a column is constant.
    pub values: Vec<Vec<Option<f64>>>,
}

/// Correlations between all count columns of a table.
pub fn correlation_matrix(table: &RawTable) -> Result<CorrelationMatrix> {
    let mut names = Vec::new();
    let mut cols = Vec::new();
    for c in table.columns() {
        if let ColumnData::Count(_) = c.data {
            names.push(c.name().to_string());
            cols.push(table.counts_f64(c.name())?);
        }
    }
    let values = cols
        .iter()
        .map(|a| cols.iter().map(|b| correlation(a, b).ok()).collect())
        .collect();
    Ok(CorrelationMatrix { names, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{Column, ColumnSchema};

    #[test]
    fn pearson_examples() {
        assert_eq!(
            pearson_statistic(&[1.0, 3.0], &[2.0, 2.0], Family::PoissonLog).unwrap(),
            0.5
        );
        assert_eq!(
            pearson_statistic(&[2.0, 7.0], &[2.0, 7.0], Family::PoissonLog).unwrap(),
            0.0
        );
        assert!(pearson_statistic(&[1.0], &[0.0], Family::PoissonLog).is_err());
        let s = pearson_summary(&[1.0, 3.0, 2.0], &[2.0, 2.0, 2.0], Family::PoissonLog, 1).unwrap();
        assert_eq!(s.sum, 1.0);
        assert_eq!(s.per_df_residual, Some(0.5));
    }

    #[test]
    fn metrics_examples() {
        let m = fit_metrics(&[4.0, 4.0], &[3.0, 5.0], Family::PoissonLog).unwrap();
        assert_eq!(m.mae, 1.0);
        assert_eq!(m.rmse, 1.0);
        assert_eq!(m.r_squared, None);
        let y = [1.0, 2.0, 5.0];
        let m = fit_metrics(&y, &y, Family::PoissonLog).unwrap();
        assert_eq!((m.mae, m.rmse, m.r_squared), (0.0, 0.0, Some(1.0)));
        assert!(fit_metrics(&[1.0], &[1.0], Family::PoissonLog).is_err());
    }

    #[test]
    fn residual_examples() {
        let r = deviance_residuals(&[2.0], &[1.0], Family::PoissonLog).unwrap();
        assert!((r[0] - 0.772_588_722_239_781_f64.sqrt()).abs() < 1e-15);
        assert!((r[0] - 0.878_971).abs() < 1e-6);
        let r = deviance_residuals(&[0.0], &[1.0], Family::PoissonLog).unwrap();
        assert!((r[0] + 2f64.sqrt()).abs() < 1e-15);
        let r = deviance_residuals(&[3.0, 1.0], &[3.0, 1.0], Family::PoissonLog).unwrap();
        assert_eq!(r, [0.0, 0.0]);
    }

    #[test]
    fn qq_symmetric_pair() {
        let q = qq_data(&[1.0, -1.0]).unwrap();
        assert_eq!(q.sample, [-1.0, 1.0]);
        assert!((q.theoretical[0] + 0.674_49).abs() < 1e-5);
        assert!((q.theoretical[1] - 0.674_49).abs() < 1e-5);
        assert_eq!(q.theoretical[0], -q.theoretical[1]);
        assert!(qq_data(&[0.3]).is_err());
    }

    #[test]
    fn correlation_extremes() {
        let x = [1.0, 2.0, 4.0, 7.0];
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        assert!((correlation(&x, &x).unwrap() - 1.0).abs() < 1e-15);
        assert!((correlation(&x, &neg).unwrap() + 1.0).abs() < 1e-15);
        assert!(correlation(&x, &[1.0; 4]).is_err());
    }

    #[test]
    fn single_level_group() {
        let t = RawTable::new(vec![
            Column {
                schema: ColumnSchema::categorical("g"),
                data: ColumnData::Categorical(vec![Some("a".into()); 4]),
            },
            Column {
                schema: ColumnSchema::count("days"),
                data: ColumnData::Count(vec![Some(1), Some(2), Some(3), Some(10)]),
            },
        ])
        .unwrap();
        let g = group_means(&t, "g", "days").unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g[0].mean, 4.0);
        assert_eq!(g[0].median, 2.5);
        assert_eq!(g[0].n, 4);
    }
}
