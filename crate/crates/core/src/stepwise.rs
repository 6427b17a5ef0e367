//! Forward stepwise selection over whole terms.
//!
//! Starting from the intercept-only model, every remaining candidate term is
//! added in turn and refit; the candidate with the lowest criterion is kept
//! if it is strictly below the current model's value. A factor enters as a
//! block of dummy columns. Candidate fits within a step may run in parallel;
//! the decision is made afterwards by scanning candidates in list order, so
//! ties go to the earlier candidate regardless of completion order.

use std::fmt::Write as _;

use nalgebra::DVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::design::{response, TermEncoder};
use crate::error::{Error, Result};
use crate::glm::{self, Family, FitOptions, GlmFit};
use crate::ingest::RawTable;
use crate::preprocess::FactorSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    Aic,
    Bic,
}

impl Criterion {
    pub fn label(self) -> &'static str {
        match self {
            Criterion::Aic => "AIC",
            Criterion::Bic => "BIC",
        }
    }
}

impl std::str::FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "aic" => Ok(Criterion::Aic),
            "bic" => Ok(Criterion::Bic),
            other => Err(Error::Validation(format!("unknown criterion `{other}`"))),
        }
    }
}

pub fn criterion_value(fit: &GlmFit, criterion: Criterion) -> f64 {
    match criterion {
        Criterion::Aic => glm::aic(fit),
        Criterion::Bic => glm::bic(fit),
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SelectOptions {
    pub fit: FitOptions,
    /// Worker threads for candidate fits; `None` uses rayon's default and
    /// `Some(1)` evaluates serially.
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateScore {
    pub term: String,
    /// Number of coefficients the term adds.
    pub df: usize,
    pub deviance: Option<f64>,
    /// `None` when the fit failed or did not converge (treated as +∞).
    pub score: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionStep {
    pub current_terms: Vec<String>,
    /// In candidate-list order.
    pub candidates: Vec<CandidateScore>,
    pub none_deviance: f64,
    /// Criterion of the current model (the "no change" option).
    pub none_score: f64,
    /// `None` is the stop marker.
    pub chosen: Option<String>,
    pub criterion_after: f64,
}

#[derive(Debug, Clone)]
pub struct SelectionTrace {
    pub criterion: Criterion,
    pub response: String,
    pub steps: Vec<SelectionStep>,
    pub final_terms: Vec<String>,
    pub final_fit: GlmFit,
    pub warnings: Vec<String>,
}

fn score_lt(a: Option<f64>, b: f64) -> bool {
    a.is_some_and(|a| a < b)
}

#[allow(clippy::too_many_arguments)]
fn evaluate_candidate(
    encoder: &TermEncoder,
    current: &[String],
    term: &str,
    y: &DVector<f64>,
    family: Family,
    criterion: Criterion,
    opts: &FitOptions,
) -> (CandidateScore, Option<String>) {
    let mut terms = current.to_vec();
    terms.push(term.to_string());
    let df = encoder.term(term).map_or(0, |t| t.width());
    let result = encoder
        .design(&terms)
        .and_then(|x| glm::fit(&x, y, family, opts));
    match result {
        Ok(f) if f.converged => (
            CandidateScore {
                term: term.to_string(),
                df,
                deviance: Some(f.deviance),
                score: Some(criterion_value(&f, criterion)),
            },
            None,
        ),
        Ok(f) => (
            CandidateScore {
                term: term.to_string(),
                df,
                deviance: Some(f.deviance),
                score: None,
            },
            Some(format!(
                "adding `{term}` to [{}]: fit did not converge in {} iterations",
                current.join(", "),
                f.iterations
            )),
        ),
        Err(e) => (
            CandidateScore {
                term: term.to_string(),
                df,
                deviance: None,
                score: None,
            },
            Some(format!("adding `{term}` to [{}]: {e}", current.join(", "))),
        ),
    }
}

pub fn forward_select(
    train: &RawTable,
    specs: &[FactorSpec],
    candidates: &[String],
    response_name: &str,
    family: Family,
    criterion: Criterion,
    opts: &SelectOptions,
) -> Result<SelectionTrace> {
    if candidates.is_empty() {
        return Err(Error::Validation("no candidate terms".into()));
    }
    if candidates.iter().any(|c| c == response_name) {
        return Err(Error::Validation(format!(
            "response `{response_name}` cannot be a candidate term"
        )));
    }
    let encoder = TermEncoder::new(train, specs, candidates)?;
    let y = response(train, response_name)?;

    let pool = match opts.jobs {
        Some(n) if n > 1 => Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Validation(format!("thread pool: {e}")))?,
        ),
        _ => None,
    };
    let serial = opts.jobs == Some(1);

    let mut current: Vec<String> = Vec::new();
    let mut current_fit = glm::fit(&encoder.design(&current)?, &y, family, &opts.fit)?;
    let mut current_score = criterion_value(&current_fit, criterion);
    let mut steps = Vec::new();
    let mut warnings = Vec::new();

    loop {
        let remaining: Vec<&String> = candidates.iter().filter(|c| !current.contains(c)).collect();
        if remaining.is_empty() {
            break;
        }
        let eval = |t: &&String| {
            evaluate_candidate(&encoder, &current, t, &y, family, criterion, &opts.fit)
        };
        let results: Vec<(CandidateScore, Option<String>)> = if serial {
            remaining.iter().map(eval).collect()
        } else if let Some(pool) = &pool {
            pool.install(|| remaining.par_iter().map(eval).collect())
        } else {
            remaining.par_iter().map(eval).collect()
        };

        let mut scores = Vec::with_capacity(results.len());
        for (score, warning) in results {
            if let Some(w) = warning {
                log::warn!("{w}");
                warnings.push(w);
            }
            scores.push(score);
        }

        let mut best: Option<usize> = None;
        for (i, s) in scores.iter().enumerate() {
            let threshold = best.and_then(|b| scores[b].score).unwrap_or(current_score);
            if score_lt(s.score, threshold) {
                best = Some(i);
            }
        }

        let step_current = current.clone();
        let none_deviance = current_fit.deviance;
        let none_score = current_score;
        let chosen = best.map(|i| scores[i].term.clone());
        if let Some(term) = &chosen {
            current.push(term.clone());
            current_fit = glm::fit(&encoder.design(&current)?, &y, family, &opts.fit)?;
            current_score = criterion_value(&current_fit, criterion);
        }
        steps.push(SelectionStep {
            current_terms: step_current,
            candidates: scores,
            none_deviance,
            none_score,
            chosen: chosen.clone(),
            criterion_after: current_score,
        });
        if chosen.is_none() {
            break;
        }
    }

    Ok(SelectionTrace {
        criterion,
        response: response_name.to_string(),
        steps,
        final_terms: current,
        final_fit: current_fit,
        warnings,
    })
}

pub fn formula(response: &str, terms: &[String]) -> String {
    if terms.is_empty() {
        format!("{response} ~ 1")
    } else {
        format!("{response} ~ {}", terms.join(" + "))
    }
}

/// Plain-text trace: one table per step, rows sorted by criterion with the
/// no-change row among them. Values are rounded to two decimals.
pub fn format_trace(trace: &SelectionTrace) -> String {
    let label = trace.criterion.label();
    let mut out = String::new();
    for (i, step) in trace.steps.iter().enumerate() {
        let head = if i == 0 { "Start" } else { "Step" };
        let _ = writeln!(out, "{head}:  {label}={:.2}", step.none_score);
        let _ = writeln!(out, "{}", formula(&trace.response, &step.current_terms));
        let _ = writeln!(out);

        struct Row {
            name: String,
            df: String,
            deviance: Option<f64>,
            score: Option<f64>,
            order: usize,
        }
        let mut rows: Vec<Row> = step
            .candidates
            .iter()
            .enumerate()
            .map(|(k, c)| Row {
                name: format!("+ {}", c.term),
                df: c.df.to_string(),
                deviance: c.deviance,
                score: c.score,
                order: k,
            })
            .collect();
        rows.push(Row {
            name: "<none>".into(),
            df: String::new(),
            deviance: Some(step.none_deviance),
            score: Some(step.none_score),
            order: usize::MAX,
        });
        rows.sort_by(|a, b| {
            let sa = a.score.unwrap_or(f64::INFINITY);
            let sb = b.score.unwrap_or(f64::INFINITY);
            sa.total_cmp(&sb).then(a.order.cmp(&b.order))
        });

        let name_w = rows.iter().map(|r| r.name.len()).max().unwrap_or(0);
        let fmt = |v: Option<f64>| v.map_or_else(|| "failed".to_string(), |v| format!("{v:.2}"));
        let _ = writeln!(
            out,
            "{:name_w$} {:>3} {:>12} {:>12}",
            "", "Df", "Deviance", label
        );
        for r in &rows {
            let _ = writeln!(
                out,
                "{:name_w$} {:>3} {:>12} {:>12}",
                r.name,
                r.df,
                fmt(r.deviance),
                fmt(r.score)
            );
        }
        let _ = writeln!(out);
    }
    let _ = writeln!(
        out,
        "Selected: {}",
        formula(&trace.response, &trace.final_terms)
    );
    out
}

/// Full-precision JSON form of a trace (the final fit is summarized).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceDocument {
    pub criterion: Criterion,
    pub response: String,
    pub steps: Vec<SelectionStep>,
    pub final_terms: Vec<String>,
    pub final_criterion: f64,
    pub final_deviance: f64,
    pub warnings: Vec<String>,
}

impl From<&SelectionTrace> for TraceDocument {
    fn from(t: &SelectionTrace) -> Self {
        TraceDocument {
            criterion: t.criterion,
            response: t.response.clone(),
            steps: t.steps.clone(),
            final_terms: t.final_terms.clone(),
            final_criterion: criterion_value(&t.final_fit, t.criterion),
            final_deviance: t.final_fit.deviance,
            warnings: t.warnings.clone(),
        }
    }
}
