//! Human-readable report layouts.

use std::fmt::Write;

use los_glm::diagnostics::{CorrelationMatrix, GroupSummary};
use los_glm::glm::{self, CoefficientTest};
use los_glm::ingest::{ColumnSummary, CountSummary, LevelSummary};
use los_glm::stats::FiveNumber;
use los_glm::stepwise::formula;
use los_glm::{Family, GlmFit};

const LINE_WIDTH: usize = 80;
const MAX_LEVEL_ROWS: usize = 7;

/// Decimals needed to show `v` with `sig` significant digits, ignoring
/// trailing zeros.
fn decimals_needed(v: f64, sig: usize) -> usize {
    if v == 0.0 || !v.is_finite() {
        return 0;
    }
    let mag = v.abs().log10().floor() as i64;
    let d = (sig as i64 - 1 - mag).clamp(0, 15) as usize;
    let s = format!("{:.*}", d, v);
    match s.split_once('.') {
        Some((_, frac)) => frac.trim_end_matches('0').len(),
        None => 0,
    }
}

/// Common decimals so every value shows at least `sig` significant digits.
pub fn shared_decimals(values: &[f64], sig: usize) -> usize {
    values
        .iter()
        .map(|&v| decimals_needed(v, sig))
        .max()
        .unwrap_or(0)
}

/// Decimals that give the largest magnitude `sig` significant digits.
pub fn decimals_for_largest(values: &[f64], sig: usize) -> usize {
    let max = values
        .iter()
        .filter(|v| v.is_finite())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    if max == 0.0 {
        return sig.saturating_sub(1);
    }
    (sig as i64 - 1 - max.log10().floor() as i64).clamp(0, 15) as usize
}

fn count_cells(s: &CountSummary) -> Vec<String> {
    let labels = [
        "Min.   :", "1st Qu.:", "Median :", "Mean   :", "3rd Qu.:", "Max.   :",
    ];
    let vals = [s.min, s.q1, s.median, s.mean, s.q3, s.max];
    let present: Vec<f64> = vals.iter().flatten().copied().collect();
    let d = shared_decimals(&present, 4);
    let texts: Vec<String> = vals
        .iter()
        .map(|v| v.map_or_else(|| "NA".to_string(), |v| format!("{v:.d$}")))
        .collect();
    let w = texts.iter().map(String::len).max().unwrap_or(0);
    let mut cells: Vec<String> = labels
        .iter()
        .zip(&texts)
        .map(|(l, t)| format!("{l}{t:>w$}  "))
        .collect();
    if s.missing > 0 {
        cells.push(format!("NA's   :{:>w$}  ", s.missing));
    }
    cells
}

fn level_cells(s: &LevelSummary) -> Vec<String> {
    let mut rows: Vec<(String, usize)> = s
        .levels
        .iter()
        .map(|l| (l.level.clone(), l.count))
        .collect();
    if rows.len() > MAX_LEVEL_ROWS {
        let other: usize = rows[MAX_LEVEL_ROWS - 1..].iter().map(|r| r.1).sum();
        rows.truncate(MAX_LEVEL_ROWS - 1);
        rows.push(("(Other)".into(), other));
    }
    if s.missing > 0 {
        rows.push(("NA's".into(), s.missing));
    }
    let lw = rows.iter().map(|r| r.0.chars().count()).max().unwrap_or(0);
    let cw = rows
        .iter()
        .map(|r| r.1.to_string().len())
        .max()
        .unwrap_or(0);
    rows.iter()
        .map(|(l, c)| format!("{l:<lw$}:{c:>cw$}  "))
        .collect()
}

fn centered(name: &str, width: usize) -> String {
    let len = name.chars().count();
    if len >= width {
        return name.to_string();
    }
    let left = (width - len) / 2;
    format!(
        "{}{name}{}",
        " ".repeat(left),
        " ".repeat(width - len - left)
    )
}

/// Side-by-side column summaries, wrapped to 80 characters.
pub fn describe(summaries: &[(String, ColumnSummary)]) -> String {
    let blocks: Vec<(String, Vec<String>, usize)> = summaries
        .iter()
        .map(|(name, s)| {
            let cells = match s {
                ColumnSummary::Count(c) => count_cells(c),
                ColumnSummary::Categorical(l) => level_cells(l),
            };
            let w = cells
                .iter()
                .map(|c| c.chars().count())
                .chain(std::iter::once(name.chars().count()))
                .max()
                .unwrap_or(0);
            (name.clone(), cells, w)
        })
        .collect();

    let mut out = String::new();
    let mut start = 0;
    while start < blocks.len() {
        let mut end = start;
        let mut width = 1;
        while end < blocks.len() && (end == start || width + blocks[end].2 < LINE_WIDTH) {
            width += blocks[end].2 + 1;
            end += 1;
        }
        let group = &blocks[start..end];
        let rows = group.iter().map(|b| b.1.len()).max().unwrap_or(0);
        let mut line = String::from(" ");
        for (name, _, w) in group {
            line.push_str(&centered(name, *w));
            line.push(' ');
        }
        let _ = writeln!(out, "{}", line.trim_end());
        for r in 0..rows {
            let mut line = String::from(" ");
            for (_, cells, w) in group {
                let cell = cells.get(r).map_or("", String::as_str);
                let pad = w - cell.chars().count();
                line.push_str(cell);
                line.push_str(&" ".repeat(pad + 1));
            }
            let _ = writeln!(out, "{}", line.trim_end());
        }
        start = end;
    }
    out
}

/// Per-level mean/median/count of the response.
pub fn group_table(by: &str, groups: &[GroupSummary]) -> String {
    let lw = groups
        .iter()
        .map(|g| g.level.chars().count())
        .chain(std::iter::once(by.chars().count()))
        .max()
        .unwrap_or(0);
    let mut out = String::new();
    let _ = writeln!(out, "{by:<lw$} {:>6} {:>6} {:>6}", "mean", "median", "n");
    for g in groups {
        let _ = writeln!(
            out,
            "{:<lw$} {:>6.2} {:>6} {:>6}",
            g.level, g.mean, g.median, g.n
        );
    }
    out
}

pub fn correlation_table(m: &CorrelationMatrix) -> String {
    let w = m.names.iter().map(|n| n.len()).max().unwrap_or(0).max(6);
    let mut out = String::new();
    let _ = write!(out, "{:w$}", "");
    for n in &m.names {
        let _ = write!(out, " {n:>w$}");
    }
    out.push('\n');
    for (n, row) in m.names.iter().zip(&m.values) {
        let _ = write!(out, "{n:<w$}");
        for v in row {
            match v {
                Some(v) => {
                    let _ = write!(out, " {v:>w$.3}");
                }
                None => {
                    let _ = write!(out, " {:>w$}", "NA");
                }
            }
        }
        out.push('\n');
    }
    out
}

/// p-value text: fixed with three significant digits down to 1e-4,
/// scientific below that, "< 2e-16" at machine precision.
fn p_values(ps: &[f64]) -> Vec<String> {
    let fixed: Vec<f64> = ps.iter().copied().filter(|&p| p >= 1e-4).collect();
    let d = fixed
        .iter()
        .map(|&p| {
            if p == 0.0 {
                0
            } else {
                (2 - p.log10().floor() as i64).max(0) as usize
            }
        })
        .max()
        .unwrap_or(0);
    ps.iter()
        .map(|&p| {
            if p < 2.2e-16 {
                "< 2e-16".to_string()
            } else if p < 1e-4 {
                scientific(p, 2)
            } else {
                format!("{p:.d$}")
            }
        })
        .collect()
}

/// Scientific notation with a signed two-digit exponent, e.g. `3.80e-06`.
fn scientific(v: f64, decimals: usize) -> String {
    let s = format!("{v:.decimals$e}");
    let (mant, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mant}e{sign}{:02}", exp.abs())
}

fn family_call(f: Family) -> String {
    format!("{}(link = \"{}\")", f.distribution_name(), f.link_name())
}

pub fn nonconvergence_banner(fit: &GlmFit) -> Option<String> {
    (!fit.converged).then(|| {
        format!(
            "WARNING: IRLS did not converge in {} iterations; estimates and standard errors are unreliable.",
            fit.iterations
        )
    })
}

/// Coefficient summary: estimates and standard errors to seven significant
/// digits, z values, p-values and significance codes.
pub fn coefficient_summary(
    fit: &GlmFit,
    tests: &[CoefficientTest],
    response: &str,
    residuals: Option<&FiveNumber>,
) -> String {
    let mut out = String::new();
    if let Some(b) = nonconvergence_banner(fit) {
        let _ = writeln!(out, "{b}\n");
    }
    let terms: Vec<String> = fit.terms.iter().map(|t| t.name.clone()).collect();
    let _ = writeln!(out, "Call:");
    let _ = writeln!(
        out,
        "glm(formula = {}, family = {})\n",
        formula(response, &terms),
        family_call(fit.family)
    );

    if let Some(r) = residuals {
        let vals = [r.min, r.q1, r.median, r.q3, r.max];
        let d = shared_decimals(&vals, 4);
        let texts: Vec<String> = vals.iter().map(|v| format!("{v:.d$}")).collect();
        let w = texts.iter().map(String::len).max().unwrap_or(0).max(6);
        let _ = writeln!(out, "Deviance Residuals:");
        let heads = ["Min", "1Q", "Median", "3Q", "Max"];
        let _ = writeln!(
            out,
            "{}",
            heads
                .iter()
                .map(|h| format!("{h:>w$}"))
                .collect::<Vec<_>>()
                .join("  ")
        );
        let _ = writeln!(
            out,
            "{}\n",
            texts
                .iter()
                .map(|t| format!("{t:>w$}"))
                .collect::<Vec<_>>()
                .join("  ")
        );
    }

    let both: Vec<f64> = tests
        .iter()
        .flat_map(|t| [t.estimate, t.std_error])
        .collect();
    let d = decimals_for_largest(&both, 7);
    let est: Vec<String> = tests
        .iter()
        .map(|t| format!("{:.d$}", t.estimate))
        .collect();
    let se: Vec<String> = tests
        .iter()
        .map(|t| format!("{:.d$}", t.std_error))
        .collect();
    let z: Vec<String> = tests.iter().map(|t| format!("{:.3}", t.z_value)).collect();
    let p = p_values(&tests.iter().map(|t| t.p_value).collect::<Vec<_>>());
    let nw = tests
        .iter()
        .map(|t| t.name.chars().count())
        .max()
        .unwrap_or(0);
    let ew = est
        .iter()
        .map(String::len)
        .max()
        .unwrap_or(0)
        .max("Estimate".len());
    let sw = se
        .iter()
        .map(String::len)
        .max()
        .unwrap_or(0)
        .max("Std. Error".len());
    let zw = z
        .iter()
        .map(String::len)
        .max()
        .unwrap_or(0)
        .max("z value".len());
    let pw = p
        .iter()
        .map(String::len)
        .max()
        .unwrap_or(0)
        .max("Pr(>|z|)".len());
    let (zh, ph) = match fit.family {
        Family::PoissonLog => ("z value", "Pr(>|z|)"),
        Family::GaussianIdentity => ("t value", "Pr(>|t|)"),
    };
    let _ = writeln!(out, "Coefficients:");
    let _ = writeln!(
        out,
        "{:nw$} {:>ew$} {:>sw$} {:>zw$} {:>pw$}",
        "", "Estimate", "Std. Error", zh, ph
    );
    for (i, t) in tests.iter().enumerate() {
        let line = format!(
            "{:<nw$} {:>ew$} {:>sw$} {:>zw$} {:>pw$} {}",
            t.name,
            est[i],
            se[i],
            z[i],
            p[i],
            glm::significance_code(t.p_value)
        );
        let _ = writeln!(out, "{}", line.trim_end());
    }
    let _ = writeln!(out, "---");
    let _ = writeln!(
        out,
        "Signif. codes:  0 '***' 0.001 '**' 0.01 '*' 0.05 '.' 0.1 ' ' 1\n"
    );

    let disp = fit.dispersion();
    let disp_text = match fit.family {
        Family::PoissonLog => "taken to be 1".to_string(),
        Family::GaussianIdentity => format!("taken to be {disp:.6}"),
    };
    let _ = writeln!(
        out,
        "(Dispersion parameter for {} family {disp_text})\n",
        fit.family.distribution_name()
    );
    let devs = [fit.null_deviance, fit.deviance];
    let dd = shared_decimals(&devs, 5);
    let nd = format!("{:.dd$}", fit.null_deviance);
    let rd = format!("{:.dd$}", fit.deviance);
    let dw = nd.len().max(rd.len());
    let _ = writeln!(
        out,
        "    Null deviance: {nd:>dw$}  on {} degrees of freedom",
        fit.df_null
    );
    let _ = writeln!(
        out,
        "Residual deviance: {rd:>dw$}  on {} degrees of freedom",
        fit.df_residual
    );
    let ad = shared_decimals(&[fit.aic], 5);
    let bd = shared_decimals(&[fit.bic], 5);
    let _ = writeln!(out, "AIC: {:.ad$}", fit.aic);
    let _ = writeln!(out, "BIC: {:.bd$}\n", fit.bic);
    let _ = writeln!(
        out,
        "Number of Fisher Scoring iterations: {}",
        fit.iterations
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shared_decimals_follow_four_digit_rule() {
        assert_eq!(shared_decimals(&[1.0, 2.0, 4.0, 4.409223, 6.0, 14.0], 4), 3);
        assert_eq!(
            shared_decimals(&[1.0, 10.0, 15.0, 16.1612, 20.0, 67.0], 4),
            2
        );
        assert_eq!(shared_decimals(&[0.0, 0.0, 0.0, 0.63879, 1.0, 21.0], 4), 4);
    }

    #[test]
    fn coefficient_columns_use_seven_digits() {
        assert_eq!(
            decimals_for_largest(&[0.7180159, 0.0316367, 0.0007081], 7),
            7
        );
        assert_eq!(decimals_for_largest(&[1.3880781, 0.0298541], 7), 6);
    }

    #[test]
    fn fit_statistics_follow_smallest_value() {
        assert_eq!(
            shared_decimals(&[-3.67841, -0.97932, -0.28361, 0.57443, 4.82171], 4),
            4
        );
        assert_eq!(shared_decimals(&[13093.41, 9800.83], 5), 1);
        assert_eq!(shared_decimals(&[31882.24], 5), 0);
    }

    #[test]
    fn p_value_layout() {
        let p = p_values(&[1e-20, 0.002577, 3.8e-6, 0.862201, 0.000195]);
        assert_eq!(
            p,
            ["< 2e-16", "0.002577", "3.80e-06", "0.862201", "0.000195"]
        );
    }

    #[test]
    fn level_cells_fold_tail_into_other() {
        let levels = (0..9)
            .map(|i| los_glm::ingest::LevelCount {
                level: format!("l{i}"),
                count: 10 - i,
            })
            .collect();
        let cells = level_cells(&LevelSummary { levels, missing: 0 });
        assert_eq!(cells.len(), 7);
        // Counts are right-aligned to the widest one.
        assert_eq!(cells[0].trim_end(), "l0     :10");
        assert_eq!(cells[6].trim_end(), "(Other): 9");
    }
}
