//! GLM fitting by iteratively reweighted least squares (Fisher scoring).
//!
//! Each iteration solves the weighted least-squares problem
//! `min ‖√W (z − Xβ)‖²` with a Householder QR of `√W·X`, where for the
//! Poisson/log model `W = diag(μ)` and `z = η + (y − μ)/μ`. Iteration stops
//! when `|D_t − D_{t−1}| / (|D_t| + 0.1)` falls below the tolerance. The
//! coefficient covariance `(XᵀWX)⁻¹` is formed as `R⁻¹R⁻ᵀ` from the QR of
//! `√W·X` at the final mean.

use nalgebra::{Cholesky, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::design::{DesignMatrix, Term};
use crate::error::{Error, Result};
use crate::special;
use crate::stats;

/// Relative threshold on |R_jj| / ‖column j‖ below which a column counts as
/// linearly dependent on the ones before it.
const RANK_TOLERANCE: f64 = 1e-7;
const MAX_STEP_HALVINGS: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    PoissonLog,
    GaussianIdentity,
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "poisson-log" | "poisson" => Ok(Family::PoissonLog),
            "gaussian-identity" | "gaussian" => Ok(Family::GaussianIdentity),
            other => Err(Error::Validation(format!("unknown family `{other}`"))),
        }
    }
}

impl Family {
    pub fn link_name(self) -> &'static str {
        match self {
            Family::PoissonLog => "log",
            Family::GaussianIdentity => "identity",
        }
    }

    pub fn distribution_name(self) -> &'static str {
        match self {
            Family::PoissonLog => "poisson",
            Family::GaussianIdentity => "gaussian",
        }
    }

    pub fn link(self, mu: f64) -> f64 {
        match self {
            Family::PoissonLog => mu.ln(),
            Family::GaussianIdentity => mu,
        }
    }

    pub fn inverse_link(self, eta: f64) -> f64 {
        match self {
            Family::PoissonLog => eta.exp(),
            Family::GaussianIdentity => eta,
        }
    }

    /// Variance function V(μ).
    pub fn variance(self, mu: f64) -> f64 {
        match self {
            Family::PoissonLog => mu,
            Family::GaussianIdentity => 1.0,
        }
    }

    /// dμ/dη at μ.
    fn mu_eta(self, mu: f64) -> f64 {
        match self {
            Family::PoissonLog => mu,
            Family::GaussianIdentity => 1.0,
        }
    }

    fn check_response(self, y: &DVector<f64>) -> Result<()> {
        if let Some(v) = y.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("response value {v} is not finite")));
        }
        if self == Family::PoissonLog {
            if let Some(v) = y.iter().find(|&&v| v < 0.0 || v.fract() != 0.0) {
                return Err(Error::Domain(format!(
                    "poisson response must be a nonnegative integer, got {v}"
                )));
            }
            if y.iter().all(|&v| v == 0.0) {
                return Err(Error::Domain("poisson response is identically zero".into()));
            }
        }
        Ok(())
    }

    fn check_mean(self, mu: &[f64]) -> Result<()> {
        if self == Family::PoissonLog {
            if let Some(m) = mu.iter().find(|&&m| !(m > 0.0)) {
                return Err(Error::Domain(format!(
                    "poisson mean must be positive, got {m}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub max_iterations: usize,
    /// Threshold on the relative deviance change between iterations.
    pub tolerance: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            max_iterations: 25,
            tolerance: 1e-8,
        }
    }
}

impl FitOptions {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::Validation(
                "max_iterations must be at least 1".into(),
            ));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::Validation("tolerance must be positive".into()));
        }
        Ok(())
    }
}

/// A fitted model.
#[derive(Debug, Clone)]
pub struct GlmFit {
    pub family: Family,
    pub column_names: Vec<String>,
    pub terms: Vec<Term>,
    pub has_intercept: bool,
    /// On the link scale (log effects for the Poisson model).
    pub beta: DVector<f64>,
    pub covariance: DMatrix<f64>,
    pub deviance: f64,
    pub null_deviance: f64,
    pub df_null: usize,
    pub df_residual: usize,
    pub log_likelihood: f64,
    pub aic: f64,
    pub bic: f64,
    pub n: usize,
    pub iterations: usize,
    pub converged: bool,
    /// Deviance after each IRLS iteration.
    pub deviance_trace: Vec<f64>,
    /// Fitted means on the training rows; empty for a model loaded from disk.
    pub fitted: DVector<f64>,
}

impl GlmFit {
    pub fn p(&self) -> usize {
        self.beta.len()
    }

    /// 1 for the Poisson model; RSS/(n − p) for the Gaussian model.
    pub fn dispersion(&self) -> f64 {
        dispersion(self.family, self.deviance, self.df_residual)
    }

    pub fn std_errors(&self) -> DVector<f64> {
        self.covariance.diagonal().map(f64::sqrt)
    }
}

/// Per-observation deviance contributions.
pub fn unit_deviances(y: &[f64], mu: &[f64], family: Family) -> Result<Vec<f64>> {
    if y.len() != mu.len() {
        return Err(Error::Validation(format!(
            "{} responses but {} means",
            y.len(),
            mu.len()
        )));
    }
    family.check_mean(mu)?;
    Ok(unit_deviances_unchecked(y, mu, family))
}

fn unit_deviances_unchecked(y: &[f64], mu: &[f64], family: Family) -> Vec<f64> {
    y.iter()
        .zip(mu)
        .map(|(&y, &m)| match family {
            Family::PoissonLog => poisson_unit_deviance(y, m),
            Family::GaussianIdentity => (y - m) * (y - m),
        })
        .collect()
}

/// 2[y·ln(y/μ) − (y − μ)] = 2μ[(1+r)ln(1+r) − r] with r = (y − μ)/μ. Near
/// r = 0 the bracket is summed as Σₖ₌₂ (−r)ᵏ/(k(k−1)) to avoid cancellation.
fn poisson_unit_deviance(y: f64, m: f64) -> f64 {
    if y == 0.0 {
        return 2.0 * m;
    }
    let r = (y - m) / m;
    if r.abs() < 0.1 {
        let mut term = r * r;
        let mut sum = 0.0;
        for k in 2..60 {
            let add = term / (k * (k - 1)) as f64;
            sum += add;
            if add.abs() <= 1e-17 * sum.abs() {
                break;
            }
            term *= -r;
        }
        (2.0 * m * sum).max(0.0)
    } else {
        (2.0 * (y * (y / m).ln() - (y - m))).max(0.0)
    }
}

/// D = 2·Σ [y·ln(y/μ) − (y − μ)], with y·ln(y/μ) = 0 at y = 0.
pub fn poisson_deviance(y: &[f64], mu: &[f64]) -> Result<f64> {
    deviance(y, mu, Family::PoissonLog)
}

/// Poisson deviance, or the residual sum of squares for the Gaussian family.
pub fn deviance(y: &[f64], mu: &[f64], family: Family) -> Result<f64> {
    Ok(stats::sum(&unit_deviances(y, mu, family)?))
}

/// Log-likelihood at the given means. For the Gaussian family the variance
/// is profiled out at its MLE RSS/n.
pub fn log_likelihood(y: &[f64], mu: &[f64], family: Family) -> Result<f64> {
    if y.len() != mu.len() {
        return Err(Error::Validation("response and mean lengths differ".into()));
    }
    family.check_mean(mu)?;
    Ok(match family {
        Family::PoissonLog => {
            let terms: Vec<f64> = y
                .iter()
                .zip(mu)
                .map(|(&y, &m)| y * m.ln() - m - special::ln_factorial(y))
                .collect();
            stats::sum(&terms)
        }
        Family::GaussianIdentity => {
            let n = y.len() as f64;
            let rss = deviance(y, mu, family)?;
            -0.5 * n * ((2.0 * std::f64::consts::PI * rss / n).ln() + 1.0)
        }
    })
}

/// −2ℓ + 2p.
pub fn aic_from(log_likelihood: f64, p: usize) -> f64 {
    -2.0 * log_likelihood + 2.0 * p as f64
}

/// −2ℓ + p·ln n.
pub fn bic_from(log_likelihood: f64, p: usize, n: usize) -> f64 {
    -2.0 * log_likelihood + p as f64 * (n as f64).ln()
}

pub fn aic(fit: &GlmFit) -> f64 {
    aic_from(fit.log_likelihood, fit.p())
}

pub fn bic(fit: &GlmFit) -> f64 {
    bic_from(fit.log_likelihood, fit.p(), fit.n)
}

struct QrSolve {
    beta: DVector<f64>,
    r: DMatrix<f64>,
}

/// Scale rows by √w and factor; fails on a (numerically) dependent column.
fn weighted_qr(
    x: &DMatrix<f64>,
    w: &DVector<f64>,
    rhs: Option<&DVector<f64>>,
    names: &[String],
) -> Result<QrSolve> {
    let sw = w.map(f64::sqrt);
    let mut xw = x.clone();
    for mut col in xw.column_iter_mut() {
        col.component_mul_assign(&sw);
    }
    let norms: Vec<f64> = xw.column_iter().map(|c| c.norm()).collect();
    let p = x.ncols();
    let qr = xw.qr();
    let r = qr.r();
    for j in 0..p {
        if !(norms[j] > 0.0) || !(r[(j, j)].abs() > RANK_TOLERANCE * norms[j]) {
            return Err(Error::SingularDesign(names[j].clone()));
        }
    }
    let beta = match rhs {
        Some(z) => {
            let mut qtz = z.component_mul(&sw);
            qr.q_tr_mul(&mut qtz);
            let head = qtz.rows(0, p).into_owned();
            r.solve_upper_triangular(&head)
                .ok_or_else(|| Error::Numerical("triangular solve failed".into()))?
        }
        None => DVector::zeros(p),
    };
    Ok(QrSolve { beta, r })
}

fn covariance_from_r(r: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let p = r.ncols();
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(p, p))
        .ok_or_else(|| Error::Numerical("R factor is singular".into()))?;
    let cov = &r_inv * r_inv.transpose();
    Ok((&cov + cov.transpose()) * 0.5)
}

struct Evaluation {
    eta: DVector<f64>,
    mu: DVector<f64>,
    deviance: f64,
}

fn evaluate(x: &DMatrix<f64>, beta: &DVector<f64>, y: &DVector<f64>, family: Family) -> Evaluation {
    let eta = x * beta;
    let mu = eta.map(|e| family.inverse_link(e));
    let ok = match family {
        Family::PoissonLog => mu.iter().all(|m| m.is_finite() && *m > 0.0),
        Family::GaussianIdentity => mu.iter().all(|m| m.is_finite()),
    };
    let deviance = if ok {
        stats::sum(&unit_deviances_unchecked(
            y.as_slice(),
            mu.as_slice(),
            family,
        ))
    } else {
        f64::NAN
    };
    Evaluation { eta, mu, deviance }
}

fn dispersion(family: Family, deviance: f64, df_residual: usize) -> f64 {
    match family {
        Family::PoissonLog => 1.0,
        Family::GaussianIdentity => deviance / df_residual as f64,
    }
}

/// Fit a GLM with intercept handling taken from the design matrix.
pub fn fit(
    x: &DesignMatrix,
    y: &DVector<f64>,
    family: Family,
    opts: &FitOptions,
) -> Result<GlmFit> {
    opts.validate()?;
    let (n, p) = (x.n(), x.p());
    if y.len() != n {
        return Err(Error::Validation(format!(
            "{n} design rows but {} responses",
            y.len()
        )));
    }
    if n <= p {
        return Err(Error::Validation(format!(
            "{n} observations are not enough for {p} coefficients"
        )));
    }
    family.check_response(y)?;
    let xm = x.values();
    let names = x.column_names();

    let mut mu = match family {
        Family::PoissonLog => y.map(|v| v + 0.1),
        Family::GaussianIdentity => y.clone(),
    };
    let mut eta = mu.map(|m| family.link(m));
    let mut dev = stats::sum(&unit_deviances_unchecked(
        y.as_slice(),
        mu.as_slice(),
        family,
    ));
    let mut beta: Option<DVector<f64>> = None;
    let mut trace = Vec::new();
    let mut converged = false;
    let mut iterations = 0;

    for iter in 1..=opts.max_iterations {
        iterations = iter;
        let w = mu.map(|m| {
            let d = family.mu_eta(m);
            d * d / family.variance(m)
        });
        let z = DVector::from_fn(n, |i, _| eta[i] + (y[i] - mu[i]) / family.mu_eta(mu[i]));
        let mut beta_new = weighted_qr(xm, &w, Some(&z), names)?.beta;
        let mut next = evaluate(xm, &beta_new, y, family);

        match &beta {
            None if !next.deviance.is_finite() => {
                return Err(Error::Numerical(
                    "deviance is not finite after the first IRLS step".into(),
                ));
            }
            None => {}
            Some(prev) => {
                let mut halvings = 0;
                while !next.deviance.is_finite() || next.deviance - dev > 1e-10 * (dev.abs() + 0.1)
                {
                    if halvings == MAX_STEP_HALVINGS {
                        beta_new = prev.clone();
                        next = evaluate(xm, &beta_new, y, family);
                        break;
                    }
                    beta_new = (&beta_new + prev) * 0.5;
                    next = evaluate(xm, &beta_new, y, family);
                    halvings += 1;
                }
                if halvings > 0 {
                    log::debug!("IRLS iteration {iter}: {halvings} step halvings");
                }
            }
        }

        let change = (next.deviance - dev).abs() / (next.deviance.abs() + 0.1);
        trace.push(next.deviance);
        beta = Some(beta_new);
        eta = next.eta;
        mu = next.mu;
        dev = next.deviance;
        if change < opts.tolerance {
            converged = true;
            break;
        }
    }
    if !converged {
        log::debug!("IRLS did not converge in {iterations} iterations");
    }
    let mut beta = beta.expect("at least one iteration ran");

    // The covariance factorization also yields one more scoring step; take
    // it when converged so β is not left at the deviance-tolerance level.
    let w = mu.map(|m| {
        let d = family.mu_eta(m);
        d * d / family.variance(m)
    });
    let z = DVector::from_fn(n, |i, _| eta[i] + (y[i] - mu[i]) / family.mu_eta(mu[i]));
    let last = weighted_qr(xm, &w, Some(&z), names)?;
    let mut covariance = covariance_from_r(&last.r)?;
    if converged {
        let polished = evaluate(xm, &last.beta, y, family);
        if polished.deviance.is_finite() && polished.deviance <= dev + 1e-10 * (dev.abs() + 0.1) {
            beta = last.beta;
            mu = polished.mu;
            dev = polished.deviance;
        }
    }

    covariance *= dispersion(family, dev, n - p);

    let has_intercept = x.has_intercept();
    let null_mu = if has_intercept {
        y.mean()
    } else {
        family.inverse_link(0.0)
    };
    let null_deviance = deviance(y.as_slice(), &vec![null_mu; n], family)?;
    let log_likelihood = log_likelihood(y.as_slice(), mu.as_slice(), family)?;

    Ok(GlmFit {
        family,
        column_names: names.to_vec(),
        terms: x.terms().to_vec(),
        has_intercept,
        beta,
        covariance,
        deviance: dev,
        null_deviance,
        df_null: n - usize::from(has_intercept),
        df_residual: n - p,
        log_likelihood,
        aic: aic_from(log_likelihood, p),
        bic: bic_from(log_likelihood, p, n),
        n,
        iterations,
        converged,
        deviance_trace: trace,
        fitted: mu,
    })
}

fn check_columns(fit: &GlmFit, x: &DesignMatrix) -> Result<()> {
    if x.column_names() != fit.column_names.as_slice() {
        return Err(Error::Schema(format!(
            "design columns [{}] do not match model columns [{}]",
            x.column_names().join(", "),
            fit.column_names.join(", ")
        )));
    }
    Ok(())
}

/// Linear predictor Xβ.
pub fn linear_predictor(fit: &GlmFit, x: &DesignMatrix) -> Result<DVector<f64>> {
    check_columns(fit, x)?;
    Ok(x.values() * &fit.beta)
}

/// Mean response μ = g⁻¹(Xβ) for new rows.
pub fn predict(fit: &GlmFit, x: &DesignMatrix) -> Result<DVector<f64>> {
    Ok(linear_predictor(fit, x)?.map(|e| fit.family.inverse_link(e)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientTest {
    pub name: String,
    pub estimate: f64,
    pub std_error: f64,
    pub z_value: f64,
    pub p_value: f64,
}

/// Wald z-tests from the Fisher-information covariance.
pub fn wald_inference(fit: &GlmFit) -> Result<Vec<CoefficientTest>> {
    let cov = &fit.covariance;
    if cov.nrows() != fit.p() || cov.ncols() != fit.p() {
        return Err(Error::Inference(
            "covariance shape does not match coefficients".into(),
        ));
    }
    if Cholesky::new(cov.clone()).is_none() {
        return Err(Error::Inference(
            "covariance is not positive definite".into(),
        ));
    }
    Ok(fit
        .column_names
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let estimate = fit.beta[j];
            let std_error = cov[(j, j)].sqrt();
            let z_value = estimate / std_error;
            CoefficientTest {
                name: name.clone(),
                estimate,
                std_error,
                z_value,
                p_value: special::two_sided_p(z_value),
            }
        })
        .collect())
}

/// Conventional significance code for a p-value.
pub fn significance_code(p: f64) -> &'static str {
    match p {
        p if p < 0.001 => "***",
        p if p < 0.01 => "**",
        p if p < 0.05 => "*",
        p if p < 0.1 => ".",
        _ => " ",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_deviance_is_accurate_near_the_mean() {
        let m = 5.0 * (1.0 + 1e-12);
        let d = unit_deviances(&[5.0], &[m], Family::PoissonLog).unwrap()[0];
        let r = (5.0 - m) / m;
        assert!((d - m * r * r).abs() < 1e-6 * m * r * r);
        for (y, m) in [(3.0, 2.9), (3.0, 3.31), (7.0, 6.5), (1.0, 0.95)] {
            let direct = 2.0 * (y * f64::ln(y / m) - (y - m));
            let got = unit_deviances(&[y], &[m], Family::PoissonLog).unwrap()[0];
            assert!((got - direct).abs() < 1e-13, "{y} {m}");
        }
    }
    use crate::design::INTERCEPT;

    fn intercept_only(n: usize) -> DesignMatrix {
        DesignMatrix::new(vec![INTERCEPT.into()], DMatrix::from_element(n, 1, 1.0)).unwrap()
    }

    #[test]
    fn intercept_only_poisson_is_log_mean() {
        let y = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        let f = fit(
            &intercept_only(3),
            &y,
            Family::PoissonLog,
            &FitOptions::default(),
        )
        .unwrap();
        assert!(f.converged);
        assert!((f.beta[0] - 2f64.ln()).abs() < 1e-10);
        assert_eq!(f.df_null, 2);
        assert_eq!(f.df_residual, 2);
        assert!((f.deviance - f.null_deviance).abs() < 1e-10);
    }

    #[test]
    fn deviance_examples() {
        assert_eq!(poisson_deviance(&[3.0, 5.0], &[3.0, 5.0]).unwrap(), 0.0);
        assert!((poisson_deviance(&[0.0], &[1.0]).unwrap() - 2.0).abs() < 1e-15);
        let d = poisson_deviance(&[2.0], &[1.0]).unwrap();
        assert!((d - 2.0 * (2.0 * 2f64.ln() - 1.0)).abs() < 1e-15);
        assert!((d - 0.772_589).abs() < 1e-6);
        assert!(matches!(
            poisson_deviance(&[1.0], &[0.0]),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            poisson_deviance(&[1.0], &[-1.0]),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn criteria_penalties() {
        let ll = -123.4;
        assert_eq!(aic_from(ll, 0), -2.0 * ll);
        assert_eq!(bic_from(ll, 0, 50), -2.0 * ll);
        // ln n crosses 2 between n = 7 and n = 8 (n = e² ≈ 7.39)
        assert!(bic_from(ll, 3, 7) < aic_from(ll, 3));
        assert!(bic_from(ll, 3, 8) > aic_from(ll, 3));
        let diff = bic_from(ll, 1, 100) - aic_from(ll, 1);
        assert!((diff - (100f64.ln() - 2.0)).abs() < 1e-12);
    }

    #[test]
    fn poisson_log_likelihood_small() {
        // y=[0,2], mu=[1,2]: (0 - 1 - 0) + (2 ln2 - 2 - ln 2)
        let ll = log_likelihood(&[0.0, 2.0], &[1.0, 2.0], Family::PoissonLog).unwrap();
        assert!((ll - (-3.0 + 2f64.ln())).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_inputs() {
        let x = intercept_only(3);
        let neg = DVector::from_vec(vec![1.0, -1.0, 2.0]);
        assert!(matches!(
            fit(&x, &neg, Family::PoissonLog, &FitOptions::default()),
            Err(Error::Domain(_))
        ));
        let y = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        let bad_opts = FitOptions {
            max_iterations: 0,
            tolerance: 1e-8,
        };
        assert!(fit(&x, &y, Family::PoissonLog, &bad_opts).is_err());
        let tiny = intercept_only(1);
        assert!(fit(
            &tiny,
            &DVector::from_vec(vec![1.0]),
            Family::PoissonLog,
            &FitOptions::default()
        )
        .is_err());
    }

    #[test]
    fn duplicate_column_is_singular() {
        let v = DMatrix::from_row_slice(4, 3, &[1., 1., 1., 1., 2., 2., 1., 3., 3., 1., 5., 5.]);
        let x = DesignMatrix::new(vec![INTERCEPT.into(), "a".into(), "b".into()], v).unwrap();
        let y = DVector::from_vec(vec![1.0, 2.0, 2.0, 4.0]);
        let err = fit(&x, &y, Family::PoissonLog, &FitOptions::default()).unwrap_err();
        assert!(matches!(err, Error::SingularDesign(ref c) if c == "b"));
    }

    #[test]
    fn non_convergence_is_flagged() {
        let v = DMatrix::from_row_slice(5, 2, &[1., 0., 1., 1., 1., 2., 1., 3., 1., 4.]);
        let x = DesignMatrix::new(vec![INTERCEPT.into(), "x".into()], v).unwrap();
        let y = DVector::from_vec(vec![1.0, 1.0, 3.0, 4.0, 9.0]);
        let opts = FitOptions {
            max_iterations: 1,
            tolerance: 1e-8,
        };
        let f = fit(&x, &y, Family::PoissonLog, &opts).unwrap();
        assert!(!f.converged);
        assert_eq!(f.iterations, 1);
    }

    #[test]
    fn predict_checks_columns_and_zero_beta() {
        let v = DMatrix::from_row_slice(4, 2, &[1., 0., 1., 1., 1., 2., 1., 3.]);
        let x = DesignMatrix::new(vec![INTERCEPT.into(), "x".into()], v.clone()).unwrap();
        let y = DVector::from_vec(vec![1.0, 2.0, 2.0, 5.0]);
        let mut f = fit(&x, &y, Family::PoissonLog, &FitOptions::default()).unwrap();
        f.beta.fill(0.0);
        let mu = predict(&f, &x).unwrap();
        assert!(mu.iter().all(|&m| m == 1.0));
        let other = DesignMatrix::new(vec![INTERCEPT.into(), "z".into()], v).unwrap();
        assert!(matches!(predict(&f, &other), Err(Error::Schema(_))));
    }

    #[test]
    fn wald_zero_estimate() {
        let y = DVector::from_vec(vec![1.0, 1.0, 1.0, 1.0]);
        let mut f = fit(
            &intercept_only(4),
            &y,
            Family::PoissonLog,
            &FitOptions::default(),
        )
        .unwrap();
        assert!(f.beta[0].abs() < 1e-6);
        f.beta[0] = 0.0;
        let tests = wald_inference(&f).unwrap();
        assert_eq!(tests[0].z_value, 0.0);
        assert_eq!(tests[0].p_value, 1.0);
        // SE of the log-mean is 1/sqrt(Σy)
        assert!((tests[0].std_error - 0.5).abs() < 1e-6);

        let mut broken = f.clone();
        broken.covariance[(0, 0)] = -1.0;
        assert!(matches!(wald_inference(&broken), Err(Error::Inference(_))));
    }

    #[test]
    fn significance_codes() {
        assert_eq!(significance_code(1e-5), "***");
        assert_eq!(significance_code(0.003), "**");
        assert_eq!(significance_code(0.03), "*");
        assert_eq!(significance_code(0.08), ".");
        assert_eq!(significance_code(0.5), " ");
    }
}
