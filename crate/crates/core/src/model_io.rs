//! JSON persistence of fitted models.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::design::Term;
use crate::error::{Error, Result};
use crate::glm::{Family, GlmFit};
use crate::preprocess::FactorSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelDocument {
    pub family: Family,
    pub link: String,
    pub response: String,
    pub column_names: Vec<String>,
    pub terms: Vec<Term>,
    pub has_intercept: bool,
    pub beta: Vec<f64>,
    /// Row-major p×p.
    pub covariance: Vec<Vec<f64>>,
    pub n: usize,
    pub deviance: f64,
    pub null_deviance: f64,
    pub df_null: usize,
    pub df_residual: usize,
    pub log_likelihood: f64,
    pub aic: f64,
    pub bic: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl ModelDocument {
    pub fn from_fit(fit: &GlmFit, response: &str) -> Self {
        ModelDocument {
            family: fit.family,
            link: fit.family.link_name().to_string(),
            response: response.to_string(),
            column_names: fit.column_names.clone(),
            terms: fit.terms.clone(),
            has_intercept: fit.has_intercept,
            beta: fit.beta.iter().copied().collect(),
            covariance: fit
                .covariance
                .row_iter()
                .map(|r| r.iter().copied().collect())
                .collect(),
            n: fit.n,
            deviance: fit.deviance,
            null_deviance: fit.null_deviance,
            df_null: fit.df_null,
            df_residual: fit.df_residual,
            log_likelihood: fit.log_likelihood,
            aic: fit.aic,
            bic: fit.bic,
            iterations: fit.iterations,
            converged: fit.converged,
        }
    }

    pub fn to_fit(&self) -> Result<GlmFit> {
        let p = self.beta.len();
        if self.column_names.len() != p {
            return Err(Error::Schema(
                "model column names do not match coefficients".into(),
            ));
        }
        if self.covariance.len() != p || self.covariance.iter().any(|r| r.len() != p) {
            return Err(Error::Schema("model covariance is not p×p".into()));
        }
        if self.link != self.family.link_name() {
            return Err(Error::Schema(format!(
                "link `{}` is not supported for this family",
                self.link
            )));
        }
        Ok(GlmFit {
            family: self.family,
            column_names: self.column_names.clone(),
            terms: self.terms.clone(),
            has_intercept: self.has_intercept,
            beta: DVector::from_vec(self.beta.clone()),
            covariance: DMatrix::from_fn(p, p, |i, j| self.covariance[i][j]),
            deviance: self.deviance,
            null_deviance: self.null_deviance,
            df_null: self.df_null,
            df_residual: self.df_residual,
            log_likelihood: self.log_likelihood,
            aic: self.aic,
            bic: self.bic,
            n: self.n,
            iterations: self.iterations,
            converged: self.converged,
            deviance_trace: Vec::new(),
            fitted: DVector::zeros(0),
        })
    }

    pub fn term_names(&self) -> Vec<String> {
        self.terms.iter().map(|t| t.name.clone()).collect()
    }

    pub fn factor_specs(&self) -> Vec<FactorSpec> {
        self.terms.iter().filter_map(Term::factor_spec).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}
