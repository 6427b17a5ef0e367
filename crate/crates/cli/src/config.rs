//! Run configuration: defaults, then a JSON config file, then flags.

use std::path::{Path, PathBuf};

use los_glm::{Criterion, Family, FitOptions, SplitSpec};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const DEFAULT_SEED: u64 = 20080101;
pub const DEFAULT_TRAIN_FRACTION: f64 = 0.7;
pub const DEFAULT_RESPONSE: &str = "days";

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub schema: Option<PathBuf>,
    pub family: Family,
    pub criterion: Criterion,
    pub split: SplitSpec,
    /// `None` means every column except the response.
    pub terms: Option<Vec<String>>,
    pub response: String,
    pub jobs: Option<usize>,
    pub fit: FitOptions,
    pub model: Option<PathBuf>,
    pub newdata: Option<PathBuf>,
    pub explain: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            input: None,
            out_dir: PathBuf::from("out"),
            schema: None,
            family: Family::PoissonLog,
            criterion: Criterion::Bic,
            split: SplitSpec::new(DEFAULT_TRAIN_FRACTION, DEFAULT_SEED),
            terms: None,
            response: DEFAULT_RESPONSE.to_string(),
            jobs: None,
            fit: FitOptions::default(),
            model: None,
            newdata: None,
            explain: false,
        }
    }
}

/// Partial configuration, as read from a file or collected from flags.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigLayer {
    pub input: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
    pub schema: Option<PathBuf>,
    pub family: Option<Family>,
    pub criterion: Option<Criterion>,
    pub train_fraction: Option<f64>,
    pub seed: Option<u64>,
    pub train_size: Option<usize>,
    pub terms: Option<Vec<String>>,
    pub response: Option<String>,
    pub jobs: Option<usize>,
    pub max_iter: Option<usize>,
    pub tol: Option<f64>,
    pub model: Option<PathBuf>,
    pub newdata: Option<PathBuf>,
    pub explain: Option<bool>,
}

impl ConfigLayer {
    /// Read a layer from JSON. Relative paths inside it are taken relative
    /// to the file's directory.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| los_glm::Error::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        let mut layer: ConfigLayer = serde_json::from_str(&text).map_err(los_glm::Error::from)?;
        if let Some(base) = path.parent() {
            for p in [
                &mut layer.input,
                &mut layer.out_dir,
                &mut layer.schema,
                &mut layer.model,
                &mut layer.newdata,
            ]
            .into_iter()
            .flatten()
            {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            }
        }
        Ok(layer)
    }

    pub fn apply(&self, cfg: &mut RunConfig) {
        macro_rules! set {
            ($src:ident => $($dst:tt)+) => {
                if let Some(v) = &self.$src {
                    cfg.$($dst)+ = v.clone().into();
                }
            };
        }
        set!(input => input);
        set!(out_dir => out_dir);
        set!(schema => schema);
        set!(family => family);
        set!(criterion => criterion);
        set!(train_fraction => split.train_fraction);
        set!(seed => split.seed);
        set!(train_size => split.train_size);
        set!(terms => terms);
        set!(response => response);
        set!(jobs => jobs);
        set!(max_iter => fit.max_iterations);
        set!(tol => fit.tolerance);
        set!(model => model);
        set!(newdata => newdata);
        set!(explain => explain);
    }
}

impl RunConfig {
    /// Defaults, then the file layer, then the flag layer.
    pub fn resolve(file: Option<&ConfigLayer>, flags: &ConfigLayer) -> Result<Self> {
        let mut cfg = RunConfig::default();
        if let Some(f) = file {
            f.apply(&mut cfg);
        }
        flags.apply(&mut cfg);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.fit.validate()?;
        if let Some(terms) = &self.terms {
            if terms.contains(&self.response) {
                return Err(CliError::Usage(format!(
                    "response `{}` cannot also be a term",
                    self.response
                )));
            }
            let mut seen = std::collections::HashSet::new();
            if let Some(dup) = terms.iter().find(|t| !seen.insert(t.as_str())) {
                return Err(CliError::Usage(format!("term `{dup}` is listed twice")));
            }
        }
        if self.jobs == Some(0) {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        if self.split.train_size.is_none()
            && !(self.split.train_fraction > 0.0 && self.split.train_fraction < 1.0)
        {
            return Err(CliError::Usage(format!(
                "train fraction {} is not in (0, 1)",
                self.split.train_fraction
            )));
        }
        Ok(())
    }

    pub fn require_input(&self) -> Result<&Path> {
        self.input
            .as_deref()
            .ok_or_else(|| CliError::Usage("--input is required".into()))
    }

    pub fn require_model(&self) -> Result<&Path> {
        self.model
            .as_deref()
            .ok_or_else(|| CliError::Usage("--model is required".into()))
    }
}
