//! Reference computations, deliberately naive.

/// Solve `a·x = b` by Gauss-Jordan elimination with partial pivoting.
pub fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        let d = a[col][col];
        for k in col..n {
            a[col][k] /= d;
        }
        b[col] /= d;
        for row in 0..n {
            if row != col {
                let f = a[row][col];
                if f != 0.0 {
                    for k in col..n {
                        a[row][k] -= f * a[col][k];
                    }
                    b[row] -= f * b[col];
                }
            }
        }
    }
    Some(b)
}

pub fn invert(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let e: Vec<f64> = (0..n).map(|i| if i == j { 1.0 } else { 0.0 }).collect();
        cols.push(solve(a.to_vec(), e)?);
    }
    Some(
        (0..n)
            .map(|i| (0..n).map(|j| cols[j][i]).collect())
            .collect(),
    )
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Ordinary least squares through the normal equations XᵀX β = Xᵀy.
pub fn ols(x: &[Vec<f64>], y: &[f64]) -> Option<Vec<f64>> {
    let p = x[0].len();
    let mut xtx = vec![vec![0.0; p]; p];
    let mut xty = vec![0.0; p];
    for (row, &yi) in x.iter().zip(y) {
        for i in 0..p {
            xty[i] += row[i] * yi;
            for j in 0..p {
                xtx[i][j] += row[i] * row[j];
            }
        }
    }
    solve(xtx, xty)
}

fn ln_factorial(k: f64) -> f64 {
    (2..=k as u64).map(|i| (i as f64).ln()).sum()
}

/// Poisson log-likelihood Σ [y·η − exp(η) − ln y!] at coefficients β.
pub fn poisson_loglik(x: &[Vec<f64>], y: &[f64], beta: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(row, &yi)| {
            let eta = dot(row, beta);
            yi * eta - eta.exp() - ln_factorial(yi)
        })
        .sum()
}

/// Score vector Xᵀ(y − μ).
pub fn poisson_gradient(x: &[Vec<f64>], y: &[f64], beta: &[f64]) -> Vec<f64> {
    let p = beta.len();
    let mut g = vec![0.0; p];
    for (row, &yi) in x.iter().zip(y) {
        let r = yi - dot(row, beta).exp();
        for j in 0..p {
            g[j] += row[j] * r;
        }
    }
    g
}

/// Maximize the Poisson log-likelihood by Newton's method with step
/// halving, starting from β = (ln ȳ, 0, …) when the first column is an
/// intercept and from zero otherwise.
pub fn poisson_mle_newton(x: &[Vec<f64>], y: &[f64]) -> Option<Vec<f64>> {
    let p = x[0].len();
    let mut beta = vec![0.0; p];
    let ybar = y.iter().sum::<f64>() / y.len() as f64;
    if x.iter().all(|r| r[0] == 1.0) && ybar > 0.0 {
        beta[0] = ybar.ln();
    }
    let mut ll = poisson_loglik(x, y, &beta);
    for _ in 0..500 {
        let g = poisson_gradient(x, y, &beta);
        let mut h = vec![vec![0.0; p]; p];
        for row in x {
            let mu = dot(row, &beta).exp();
            for i in 0..p {
                for j in 0..p {
                    h[i][j] += mu * row[i] * row[j];
                }
            }
        }
        let step = solve(h, g.clone())?;
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let cand: Vec<f64> = beta.iter().zip(&step).map(|(b, s)| b + t * s).collect();
            let cll = poisson_loglik(x, y, &cand);
            if cll.is_finite() && cll >= ll - 1e-12 * ll.abs() {
                beta = cand;
                ll = cll;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        let gmax = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let smax = step.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if !accepted || (gmax < 1e-11 && smax < 1e-13) || smax < 1e-15 {
            break;
        }
    }
    Some(beta)
}

/// Hessian of the log-likelihood by central differences of the score.
pub fn fd_hessian(x: &[Vec<f64>], y: &[f64], beta: &[f64], h: f64) -> Vec<Vec<f64>> {
    let p = beta.len();
    let mut out = vec![vec![0.0; p]; p];
    for j in 0..p {
        let mut up = beta.to_vec();
        let mut down = beta.to_vec();
        up[j] += h;
        down[j] -= h;
        let gu = poisson_gradient(x, y, &up);
        let gd = poisson_gradient(x, y, &down);
        for i in 0..p {
            out[i][j] = (gu[i] - gd[i]) / (2.0 * h);
        }
    }
    // symmetrize
    for i in 0..p {
        for j in 0..i {
            let m = 0.5 * (out[i][j] + out[j][i]);
            out[i][j] = m;
            out[j][i] = m;
        }
    }
    out
}

/// Standard errors from the inverse of the negated finite-difference Hessian.
pub fn fd_standard_errors(x: &[Vec<f64>], y: &[f64], beta: &[f64]) -> Option<Vec<f64>> {
    let h = fd_hessian(x, y, beta, 1e-5);
    let neg: Vec<Vec<f64>> = h.iter().map(|r| r.iter().map(|v| -v).collect()).collect();
    let inv = invert(&neg)?;
    Some((0..beta.len()).map(|i| inv[i][i].sqrt()).collect())
}

/// Exhaustive best-subset search over whole terms. Each term is a list of
/// column indices into `x` (column 0 is the intercept and always kept).
/// Returns the best criterion value and the chosen term indices.
pub fn best_subset(
    x: &[Vec<f64>],
    y: &[f64],
    terms: &[Vec<usize>],
    penalty_per_coef: f64,
) -> (f64, Vec<usize>) {
    let mut best = (f64::INFINITY, Vec::new());
    for mask in 0u32..(1 << terms.len()) {
        let chosen: Vec<usize> = (0..terms.len()).filter(|t| mask & (1 << t) != 0).collect();
        let mut cols = vec![0usize];
        for &t in &chosen {
            cols.extend(&terms[t]);
        }
        let sub: Vec<Vec<f64>> = x
            .iter()
            .map(|r| cols.iter().map(|&c| r[c]).collect())
            .collect();
        let Some(beta) = poisson_mle_newton(&sub, y) else {
            continue;
        };
        let crit = -2.0 * poisson_loglik(&sub, y, &beta) + penalty_per_coef * cols.len() as f64;
        if crit < best.0 {
            best = (crit, chosen);
        }
    }
    best
}
