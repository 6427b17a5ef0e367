//! Pipeline commands. Each reads its inputs, writes its artifacts under the
//! output directory and returns what it wrote plus any text for stdout.

use std::path::{Path, PathBuf};

use los_glm::design::{self, Term, TermKind};
use los_glm::diagnostics::{
    self, CorrelationMatrix, GroupSummary, MetricsReport, PearsonSummary, ResidualData,
};
use los_glm::glm::{self, GlmFit};
use los_glm::ingest::{self, ColumnKind, ColumnSchema, ColumnSummary};
use los_glm::model_io::ModelDocument;
use los_glm::stats::FiveNumber;
use los_glm::stepwise::{self, SelectOptions, SelectionTrace, TraceDocument};
use los_glm::{preprocess, CleaningReport, Criterion, FactorSpec, Family, RawTable, Schema};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::output::Written;
use crate::text;

#[derive(Debug, Default)]
pub struct Outcome {
    pub written: Vec<PathBuf>,
    pub stdout: String,
}

impl Outcome {
    fn new(w: Written, stdout: String) -> Self {
        Outcome {
            written: w.0,
            stdout,
        }
    }
}

fn schema_or(cfg: &RunConfig, default: impl FnOnce() -> Result<Schema>) -> Result<Schema> {
    match &cfg.schema {
        Some(p) => Ok(Schema::from_json_file(p)?),
        None => default(),
    }
}

/// The raw extract. Without a schema file the study schema is used, minus
/// `weight` when the file has no such column.
pub fn load_raw(cfg: &RunConfig) -> Result<RawTable> {
    let path = cfg.require_input()?;
    let schema = schema_or(cfg, || {
        let header = ingest::read_header(path)?;
        let s = Schema::study();
        Ok(if header.iter().any(|h| h == "weight") {
            s
        } else {
            s.without("weight")
        })
    })?;
    Ok(ingest::load_csv(path, &schema)?)
}

/// A cleaned table as written by `prep`.
pub fn load_clean(cfg: &RunConfig) -> Result<RawTable> {
    let path = cfg.require_input()?;
    let schema = schema_or(cfg, || Ok(Schema::cleaned()))?;
    Ok(ingest::load_csv(path, &schema)?)
}

fn candidate_terms(cfg: &RunConfig, table: &RawTable) -> Result<Vec<String>> {
    table.column(&cfg.response)?;
    Ok(match &cfg.terms {
        Some(t) => t.clone(),
        None => table
            .column_names()
            .into_iter()
            .filter(|c| *c != cfg.response)
            .map(str::to_string)
            .collect(),
    })
}

fn table_csv(table: &RawTable) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    ingest::write_csv(table, &mut buf)?;
    Ok(buf)
}

fn num(v: f64) -> String {
    v.to_string()
}

// ---------------------------------------------------------------- prep

fn write_prep(
    w: &mut Written,
    dir: &Path,
    clean: &RawTable,
    report: &CleaningReport,
) -> Result<()> {
    w.write(dir.join("cleaned.csv"), table_csv(clean)?)?;
    w.json(dir.join("cleaning_report.json"), report)
}

pub fn prep(cfg: &RunConfig) -> Result<Outcome> {
    let raw = load_raw(cfg)?;
    let (clean, report) = preprocess::clean(&raw)?;
    let mut w = Written::default();
    write_prep(&mut w, &cfg.out_dir, &clean, &report)?;
    let msg = format!(
        "rows in {}, removed {} (invalid gender), rows out {}\n",
        report.rows_in, report.rows_removed_gender, report.rows_out
    );
    Ok(Outcome::new(w, msg))
}

// ---------------------------------------------------------------- eda

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NamedSummary {
    pub name: String,
    pub summary: ColumnSummary,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupTable {
    pub by: String,
    pub target: String,
    pub groups: Vec<GroupSummary>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdaDocument {
    pub n_rows: usize,
    pub columns: Vec<NamedSummary>,
    pub group_means: Vec<GroupTable>,
    pub correlation: CorrelationMatrix,
}

pub fn eda_document(table: &RawTable, response: &str) -> Result<EdaDocument> {
    let columns = table
        .column_names()
        .into_iter()
        .map(|n| {
            Ok(NamedSummary {
                name: n.to_string(),
                summary: ingest::column_summary(table, n)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let has_response = table
        .column(response)
        .is_ok_and(|c| c.schema.kind == ColumnKind::CountInteger);
    let mut group_means = Vec::new();
    if has_response {
        for c in table.columns() {
            if c.schema.kind == ColumnKind::Categorical {
                group_means.push(GroupTable {
                    by: c.name().to_string(),
                    target: response.to_string(),
                    groups: diagnostics::group_means(table, c.name(), response)?,
                });
            }
        }
    }
    Ok(EdaDocument {
        n_rows: table.n_rows(),
        columns,
        group_means,
        correlation: diagnostics::correlation_matrix(table)?,
    })
}

fn write_eda(w: &mut Written, dir: &Path, doc: &EdaDocument) -> Result<()> {
    let mut txt = format!("Descriptive statistics ({} rows)\n\n", doc.n_rows);
    let pairs: Vec<(String, ColumnSummary)> = doc
        .columns
        .iter()
        .map(|c| (c.name.clone(), c.summary.clone()))
        .collect();
    txt.push_str(&text::describe(&pairs));
    for g in &doc.group_means {
        txt.push_str(&format!("\n{} by {}\n", g.target, g.by));
        txt.push_str(&text::group_table(&g.by, &g.groups));
    }
    txt.push_str("\nCorrelation of count columns\n");
    txt.push_str(&text::correlation_table(&doc.correlation));
    w.write(dir.join("eda.txt"), txt)?;
    w.json(dir.join("eda.json"), doc)?;

    let m = &doc.correlation;
    let mut header = vec![""];
    header.extend(m.names.iter().map(String::as_str));
    let rows = m.names.iter().zip(&m.values).map(|(n, row)| {
        let mut r = vec![n.clone()];
        r.extend(row.iter().map(|v| v.map(num).unwrap_or_default()));
        r
    });
    w.csv(dir.join("correlation.csv"), &header, rows)
}

pub fn eda(cfg: &RunConfig) -> Result<Outcome> {
    let table = load_clean(cfg)?;
    let doc = eda_document(&table, &cfg.response)?;
    let mut w = Written::default();
    write_eda(&mut w, &cfg.out_dir, &doc)?;
    Ok(Outcome::new(w, String::new()))
}

// ---------------------------------------------------------------- split

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SplitDocument {
    pub seed: u64,
    pub train_fraction: f64,
    pub n_rows: usize,
    pub train_size: usize,
    pub test_size: usize,
    /// 1-based row numbers in the cleaned table.
    pub train_rows: Vec<usize>,
    pub test_rows: Vec<usize>,
}

struct Partition {
    train: Vec<usize>,
    test: Vec<usize>,
}

fn partition(cfg: &RunConfig, n: usize) -> Result<Partition> {
    let (train, test) = design::split_indices(n, &cfg.split)?;
    Ok(Partition { train, test })
}

fn write_split(
    w: &mut Written,
    dir: &Path,
    cfg: &RunConfig,
    table: &RawTable,
    p: &Partition,
) -> Result<()> {
    w.write(
        dir.join("train.csv"),
        table_csv(&table.select_rows(&p.train))?,
    )?;
    w.write(
        dir.join("test.csv"),
        table_csv(&table.select_rows(&p.test))?,
    )?;
    w.json(
        dir.join("split.json"),
        &SplitDocument {
            seed: cfg.split.seed,
            train_fraction: cfg.split.train_fraction,
            n_rows: table.n_rows(),
            train_size: p.train.len(),
            test_size: p.test.len(),
            train_rows: p.train.iter().map(|i| i + 1).collect(),
            test_rows: p.test.iter().map(|i| i + 1).collect(),
        },
    )
}

pub fn split(cfg: &RunConfig) -> Result<Outcome> {
    let table = load_clean(cfg)?;
    let p = partition(cfg, table.n_rows())?;
    let mut w = Written::default();
    write_split(&mut w, &cfg.out_dir, cfg, &table, &p)?;
    let msg = format!("train {} rows, test {} rows\n", p.train.len(), p.test.len());
    Ok(Outcome::new(w, msg))
}

// ---------------------------------------------------------------- fit

fn fit_terms(
    cfg: &RunConfig,
    train: &RawTable,
    specs: &[FactorSpec],
    terms: &[String],
) -> Result<GlmFit> {
    let (x, y) = design::encode(train, specs, terms, &cfg.response)?;
    let fit = glm::fit(&x, &y, cfg.family, &cfg.fit)?;
    if let Some(b) = text::nonconvergence_banner(&fit) {
        log::warn!("{b}");
    }
    Ok(fit)
}

fn summary_with_residuals(fit: &GlmFit, y: &[f64], response: &str) -> Result<String> {
    let tests = glm::wald_inference(fit)?;
    let r = diagnostics::deviance_residuals(y, fit.fitted.as_slice(), fit.family)?;
    Ok(text::coefficient_summary(
        fit,
        &tests,
        response,
        FiveNumber::of(&r).as_ref(),
    ))
}

fn write_model(
    w: &mut Written,
    dir: &Path,
    fit: &GlmFit,
    train: &RawTable,
    response: &str,
) -> Result<String> {
    let doc = ModelDocument::from_fit(fit, response);
    w.write(dir.join("model.json"), doc.to_json()?)?;
    let y = design::response(train, response)?;
    let summary = summary_with_residuals(fit, y.as_slice(), response)?;
    w.write(dir.join("summary.txt"), &summary)?;
    Ok(summary)
}

pub fn fit(cfg: &RunConfig) -> Result<Outcome> {
    let table = load_clean(cfg)?;
    let specs = preprocess::build_factor_specs(&table)?;
    let terms = candidate_terms(cfg, &table)?;
    let p = partition(cfg, table.n_rows())?;
    let train = table.select_rows(&p.train);
    let fit = fit_terms(cfg, &train, &specs, &terms)?;
    let mut w = Written::default();
    let summary = write_model(&mut w, &cfg.out_dir, &fit, &train, &cfg.response)?;
    Ok(Outcome::new(w, summary))
}

// ---------------------------------------------------------------- select

fn run_selection(
    cfg: &RunConfig,
    train: &RawTable,
    specs: &[FactorSpec],
    candidates: &[String],
) -> Result<SelectionTrace> {
    let opts = SelectOptions {
        fit: cfg.fit,
        jobs: cfg.jobs,
    };
    let trace = stepwise::forward_select(
        train,
        specs,
        candidates,
        &cfg.response,
        cfg.family,
        cfg.criterion,
        &opts,
    )?;
    for warning in &trace.warnings {
        log::warn!("{warning}");
    }
    Ok(trace)
}

fn write_selection(
    w: &mut Written,
    dir: &Path,
    trace: &SelectionTrace,
    train: &RawTable,
    response: &str,
) -> Result<String> {
    let trace_text = stepwise::format_trace(trace);
    w.write(dir.join("selection_trace.txt"), &trace_text)?;
    w.json(
        dir.join("selection_trace.json"),
        &TraceDocument::from(trace),
    )?;
    let summary = write_model(w, dir, &trace.final_fit, train, response)?;
    Ok(format!("{trace_text}\n{summary}"))
}

pub fn select(cfg: &RunConfig) -> Result<Outcome> {
    let table = load_clean(cfg)?;
    let specs = preprocess::build_factor_specs(&table)?;
    let candidates = candidate_terms(cfg, &table)?;
    let p = partition(cfg, table.n_rows())?;
    let train = table.select_rows(&p.train);
    let trace = run_selection(cfg, &train, &specs, &candidates)?;
    let mut w = Written::default();
    let out = write_selection(&mut w, &cfg.out_dir, &trace, &train, &cfg.response)?;
    Ok(Outcome::new(w, out))
}

// ---------------------------------------------------------------- diagnose

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PartitionReport {
    pub metrics: MetricsReport,
    pub pearson: PearsonSummary,
    pub deviance_residuals: Option<FiveNumber>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub response: String,
    pub family: Family,
    pub terms: Vec<String>,
    pub coefficients: usize,
    pub seed: u64,
    pub train: PartitionReport,
    pub test: PartitionReport,
}

struct Scored {
    rows: Vec<usize>,
    y: Vec<f64>,
    mu: Vec<f64>,
}

fn score(table: &RawTable, rows: &[usize], doc: &ModelDocument, fit: &GlmFit) -> Result<Scored> {
    let part = table.select_rows(rows);
    let (x, y) = design::encode(&part, &doc.factor_specs(), &doc.term_names(), &doc.response)?;
    let mu = glm::predict(fit, &x)?;
    Ok(Scored {
        rows: rows.to_vec(),
        y: y.iter().copied().collect(),
        mu: mu.iter().copied().collect(),
    })
}

fn partition_report(s: &Scored, fit: &GlmFit) -> Result<PartitionReport> {
    let r = diagnostics::deviance_residuals(&s.y, &s.mu, fit.family)?;
    Ok(PartitionReport {
        metrics: diagnostics::fit_metrics(&s.y, &s.mu, fit.family)?,
        pearson: diagnostics::pearson_summary(&s.y, &s.mu, fit.family, fit.p())?,
        deviance_residuals: FiveNumber::of(&r),
    })
}

fn write_diagnostics(
    w: &mut Written,
    dir: &Path,
    table: &RawTable,
    p: &Partition,
    doc: &ModelDocument,
    fit: &GlmFit,
    seed: u64,
) -> Result<DiagnosticsReport> {
    let train = score(table, &p.train, doc, fit)?;
    let test = score(table, &p.test, doc, fit)?;
    let report = DiagnosticsReport {
        response: doc.response.clone(),
        family: fit.family,
        terms: doc.term_names(),
        coefficients: fit.p(),
        seed,
        train: partition_report(&train, fit)?,
        test: partition_report(&test, fit)?,
    };
    w.json(dir.join("report.json"), &report)?;

    let rd = ResidualData::compute(&train.y, &train.mu, fit.family)?;
    w.csv(
        dir.join("residuals_vs_fitted.csv"),
        &["fitted", "residual"],
        rd.fitted
            .iter()
            .zip(&rd.deviance_residuals)
            .map(|(f, r)| vec![num(*f), num(*r)]),
    )?;
    w.csv(
        dir.join("qq.csv"),
        &["theoretical", "sample"],
        rd.qq_theoretical
            .iter()
            .zip(&rd.qq_sample)
            .map(|(t, s)| vec![num(*t), num(*s)]),
    )?;
    let rows = [("train", &train), ("test", &test)]
        .into_iter()
        .flat_map(|(label, s)| {
            s.rows.iter().zip(&s.y).zip(&s.mu).map(move |((r, y), m)| {
                vec![label.to_string(), (r + 1).to_string(), num(*y), num(*m)]
            })
        });
    w.csv(
        dir.join("preds.csv"),
        &["partition", "row_id", "y", "mu"],
        rows,
    )?;
    Ok(report)
}

pub fn diagnose(cfg: &RunConfig) -> Result<Outcome> {
    let doc = ModelDocument::load(cfg.require_model()?)?;
    let fit = doc.to_fit()?;
    let table = load_clean(cfg)?;
    let p = partition(cfg, table.n_rows())?;
    let mut w = Written::default();
    let report = write_diagnostics(&mut w, &cfg.out_dir, &table, &p, &doc, &fit, cfg.split.seed)?;
    let msg = format!(
        "Pearson statistic per observation: train {:.6}, test {:.6}\n",
        report.train.pearson.per_observation, report.test.pearson.per_observation
    );
    Ok(Outcome::new(w, msg))
}

// ---------------------------------------------------------------- predict

fn newdata_schema(doc: &ModelDocument) -> Result<Schema> {
    let cols = doc
        .terms
        .iter()
        .map(|t| match &t.kind {
            TermKind::Numeric => ColumnSchema::count(&t.name),
            TermKind::Factor { .. } => ColumnSchema::categorical(&t.name),
        })
        .collect();
    Ok(Schema::new(cols)?)
}

/// Per-row multiplicative decomposition of μ: the intercept baseline and
/// exp of each term's contribution to the linear predictor.
pub fn explain_rows(fit: &GlmFit, x: &los_glm::DesignMatrix) -> Vec<(f64, Vec<f64>)> {
    let cols = x.term_columns();
    let baseline = if fit.has_intercept {
        fit.beta[0].exp()
    } else {
        1.0
    };
    (0..x.n())
        .map(|i| {
            let factors = cols
                .iter()
                .map(|(_, range)| {
                    range
                        .clone()
                        .map(|j| fit.beta[j] * x.values()[(i, j)])
                        .sum::<f64>()
                        .exp()
                })
                .collect();
            (baseline, factors)
        })
        .collect()
}

pub fn predict(cfg: &RunConfig) -> Result<Outcome> {
    let doc = ModelDocument::load(cfg.require_model()?)?;
    let fit = doc.to_fit()?;
    if cfg.explain && fit.family != Family::PoissonLog {
        return Err(CliError::Usage(
            "--explain needs a log-link model (multiplicative factors)".into(),
        ));
    }
    let path = cfg
        .newdata
        .as_deref()
        .or(cfg.input.as_deref())
        .ok_or_else(|| CliError::Usage("--newdata is required".into()))?;
    let schema = schema_or(cfg, || newdata_schema(&doc))?;
    let table = ingest::load_csv(path, &schema)?;
    let x = design::encode_predictors(&table, &doc.factor_specs(), &doc.term_names())?;
    let mu = glm::predict(&fit, &x)?;

    let mut header = vec!["row_id".to_string(), "mu".to_string()];
    let explained = cfg.explain.then(|| explain_rows(&fit, &x));
    if explained.is_some() {
        header.push("baseline".into());
        header.extend(
            x.terms()
                .iter()
                .map(|t: &Term| format!("factor_{}", t.name)),
        );
    }
    let rows = (0..x.n()).map(|i| {
        let mut r = vec![(i + 1).to_string(), num(mu[i])];
        if let Some(e) = &explained {
            r.push(num(e[i].0));
            r.extend(e[i].1.iter().map(|v| num(*v)));
        }
        r
    });
    let mut w = Written::default();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    w.csv(cfg.out_dir.join("predictions.csv"), &header, rows)?;
    Ok(Outcome::new(w, String::new()))
}

// ---------------------------------------------------------------- report

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelOverview {
    pub terms: Vec<String>,
    pub coefficients: usize,
    pub converged: bool,
    pub deviance: f64,
    pub aic: f64,
    pub bic: f64,
    pub intercept: Option<f64>,
    pub baseline: Option<f64>,
    pub train_pearson: f64,
    pub test_pearson: f64,
    pub test_mae: f64,
    pub test_rmse: f64,
    pub test_r_squared: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunOverview {
    pub cleaning: CleaningReport,
    pub seed: u64,
    pub train_size: usize,
    pub test_size: usize,
    pub criterion: Criterion,
    pub full: ModelOverview,
    pub selected: ModelOverview,
}

fn overview(fit: &GlmFit, d: &DiagnosticsReport) -> ModelOverview {
    let intercept = fit.has_intercept.then(|| fit.beta[0]);
    ModelOverview {
        terms: d.terms.clone(),
        coefficients: fit.p(),
        converged: fit.converged,
        deviance: fit.deviance,
        aic: fit.aic,
        bic: fit.bic,
        intercept,
        baseline: intercept.map(f64::exp),
        train_pearson: d.train.pearson.per_observation,
        test_pearson: d.test.pearson.per_observation,
        test_mae: d.test.metrics.mae,
        test_rmse: d.test.metrics.rmse,
        test_r_squared: d.test.metrics.r_squared,
    }
}

fn overview_text(o: &RunOverview) -> String {
    let mut s = String::new();
    s.push_str(&format!(
        "Rows: {} in, {} removed, {} analysed\n",
        o.cleaning.rows_in, o.cleaning.rows_removed_gender, o.cleaning.rows_out
    ));
    s.push_str(&format!(
        "Split: seed {}, {} train / {} test\n\n",
        o.seed, o.train_size, o.test_size
    ));
    for (label, m) in [("Full model", &o.full), ("Selected model", &o.selected)] {
        s.push_str(&format!("{label}: {} coefficients\n", m.coefficients));
        if !m.terms.is_empty() {
            s.push_str(&format!("  terms: {}\n", m.terms.join(", ")));
        }
        if !m.converged {
            s.push_str("  WARNING: fit did not converge\n");
        }
        s.push_str(&format!(
            "  deviance {:.2}, AIC {:.2}, BIC {:.2}\n",
            m.deviance, m.aic, m.bic
        ));
        if let (Some(i), Some(b)) = (m.intercept, m.baseline) {
            s.push_str(&format!(
                "  intercept {i:.7}, baseline exp(intercept) {b:.4}\n"
            ));
        }
        s.push_str(&format!(
            "  Pearson per observation: train {:.6}, test {:.6}\n",
            m.train_pearson, m.test_pearson
        ));
        let r2 = m
            .test_r_squared
            .map_or_else(|| "NA".to_string(), |v| format!("{v:.4}"));
        s.push_str(&format!(
            "  test MAE {:.4}, RMSE {:.4}, R² {r2}\n\n",
            m.test_mae, m.test_rmse
        ));
    }
    s
}

pub fn report(cfg: &RunConfig) -> Result<Outcome> {
    let dir = &cfg.out_dir;
    let mut w = Written::default();

    let raw = load_raw(cfg)?;
    let (clean, cleaning) = preprocess::clean(&raw)?;
    write_prep(&mut w, dir, &clean, &cleaning)?;
    write_eda(&mut w, dir, &eda_document(&clean, &cfg.response)?)?;

    let p = partition(cfg, clean.n_rows())?;
    write_split(&mut w, dir, cfg, &clean, &p)?;
    let train = clean.select_rows(&p.train);
    let specs = preprocess::build_factor_specs(&clean)?;
    let terms = candidate_terms(cfg, &clean)?;

    let full_dir = dir.join("full");
    let full = fit_terms(cfg, &train, &specs, &terms)?;
    write_model(&mut w, &full_dir, &full, &train, &cfg.response)?;
    let full_doc = ModelDocument::from_fit(&full, &cfg.response);
    let full_diag = write_diagnostics(
        &mut w,
        &full_dir,
        &clean,
        &p,
        &full_doc,
        &full,
        cfg.split.seed,
    )?;

    let sel_dir = dir.join("selected");
    let trace = run_selection(cfg, &train, &specs, &terms)?;
    write_selection(&mut w, &sel_dir, &trace, &train, &cfg.response)?;
    let sel_doc = ModelDocument::from_fit(&trace.final_fit, &cfg.response);
    let sel_diag = write_diagnostics(
        &mut w,
        &sel_dir,
        &clean,
        &p,
        &sel_doc,
        &trace.final_fit,
        cfg.split.seed,
    )?;

    let ov = RunOverview {
        cleaning,
        seed: cfg.split.seed,
        train_size: p.train.len(),
        test_size: p.test.len(),
        criterion: cfg.criterion,
        full: overview(&full, &full_diag),
        selected: overview(&trace.final_fit, &sel_diag),
    };
    let txt = overview_text(&ov);
    w.write(dir.join("overview.txt"), &txt)?;
    w.json(dir.join("overview.json"), &ov)?;
    Ok(Outcome::new(w, txt))
}
