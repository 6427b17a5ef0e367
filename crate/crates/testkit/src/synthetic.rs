//! Synthetic data: small regression instances and a study-shaped extract.

use std::fmt::Write;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, Normal, Poisson};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn poisson_draw(rng: &mut StdRng, mean: f64) -> f64 {
    Poisson::new(mean).expect("positive mean").sample(rng)
}

/// A Poisson regression instance: intercept plus `p - 1` standard-normal
/// covariates scaled to keep the mean moderate, y drawn from the model.
pub struct Instance {
    pub x: Vec<Vec<f64>>,
    pub y: Vec<f64>,
    pub beta_true: Vec<f64>,
}

pub fn poisson_instance(rng: &mut StdRng, n: usize, p: usize) -> Instance {
    let normal = Normal::new(0.0, 1.0).unwrap();
    let mut beta_true = vec![rng.random_range(0.3..1.5)];
    beta_true.extend((1..p).map(|_| rng.random_range(-0.4..0.4)));
    loop {
        let x: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                let mut row = vec![1.0];
                row.extend((1..p).map(|_| normal.sample(rng)));
                row
            })
            .collect();
        let y: Vec<f64> = x
            .iter()
            .map(|r| {
                let eta: f64 = r.iter().zip(&beta_true).map(|(a, b)| a * b).sum();
                poisson_draw(rng, eta.exp())
            })
            .collect();
        if y.iter().any(|&v| v > 0.0) {
            return Instance { x, y, beta_true };
        }
    }
}

/// Linear-Gaussian instance with an intercept column.
pub fn gaussian_instance(rng: &mut StdRng, n: usize, p: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    let normal = Normal::new(0.0, 1.0).unwrap();
    let beta: Vec<f64> = (0..p).map(|_| rng.random_range(-3.0..3.0)).collect();
    let x: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            let mut row = vec![1.0];
            row.extend((1..p).map(|_| rng.random_range(-5.0..5.0)));
            row
        })
        .collect();
    let y = x
        .iter()
        .map(|r| r.iter().zip(&beta).map(|(a, b)| a * b).sum::<f64>() + normal.sample(rng))
        .collect();
    (x, y)
}

fn pick<'a>(rng: &mut StdRng, items: &[(&'a str, f64)]) -> &'a str {
    let total: f64 = items.iter().map(|(_, w)| w).sum();
    let mut u = rng.random_range(0.0..total);
    for (v, w) in items {
        if u < *w {
            return v;
        }
        u -= w;
    }
    items.last().unwrap().0
}

pub const STUDY_HEADER: &str = "days,gender,age,race,weight,admit_type_id,metformin,insulin,readmitted,num_procs,num_meds,num_ip,num_diags";

/// A raw encounter extract with the study's thirteen columns and roughly
/// the study's marginal frequencies. Length of stay follows a Poisson/log
/// model in num_meds, num_diags, age, race, admission type and readmission,
/// truncated to 1–14 days.
pub fn study_csv(rows: usize, seed: u64) -> String {
    let mut rng = rng(seed);
    let ages = [
        ("[0-10)", 18.0),
        ("[10-20)", 72.0),
        ("[20-30)", 145.0),
        ("[30-40)", 372.0),
        ("[40-50)", 931.0),
        ("[50-60)", 1726.0),
        ("[60-70)", 2228.0),
        ("[70-80)", 2541.0),
        ("[80-90)", 1676.0),
        ("[90-100)", 288.0),
    ];
    let age_effect = |a: &str| match a {
        "[20-30)" | "[30-40)" | "[40-50)" => -0.1,
        "[50-60)" => -0.13,
        "[60-70)" => -0.08,
        "[80-90)" => 0.065,
        "[90-100)" => 0.11,
        _ => 0.0,
    };
    let races = [
        ("Caucasian", 7531.0),
        ("AfricanAmerican", 1848.0),
        ("?", 226.0),
        ("Asian", 60.0),
        ("Hispanic", 200.0),
        ("Other", 132.0),
    ];
    let admits = [("1", 5289.0), ("2", 1870.0), ("3", 1817.0), ("4", 1021.0)];
    let metformin = [
        ("No", 8024.0),
        ("Down", 60.0),
        ("Steady", 1799.0),
        ("Up", 114.0),
    ];
    let insulin = [
        ("No", 4742.0),
        ("Down", 1198.0),
        ("Steady", 2928.0),
        ("Up", 1129.0),
    ];
    let readmit = [("NO", 5370.0), ("<30", 1102.0), (">30", 3525.0)];
    let weights = [
        ("?", 9691.0),
        ("[75-100)", 150.0),
        ("[50-75)", 100.0),
        ("[100-125)", 59.0),
    ];

    let mut out = String::with_capacity(rows * 64);
    out.push_str(STUDY_HEADER);
    out.push('\n');
    for _ in 0..rows {
        let gender = if rng.random_range(0.0..1.0) < 0.0003 {
            "Unknown/Invalid"
        } else if rng.random_range(0.0..1.0) < 0.534 {
            "Female"
        } else {
            "Male"
        };
        let age = pick(&mut rng, &ages);
        let race = pick(&mut rng, &races);
        let admit = pick(&mut rng, &admits);
        let met = pick(&mut rng, &metformin);
        let ins = pick(&mut rng, &insulin);
        let re = pick(&mut rng, &readmit);
        let weight = pick(&mut rng, &weights);
        let num_procs = (poisson_draw(&mut rng, 1.345) as i64).min(6);
        let num_meds = (1 + poisson_draw(&mut rng, 15.16) as i64).min(67);
        let num_ip = (poisson_draw(&mut rng, 0.64) as i64).min(21);
        let num_diags = (1 + poisson_draw(&mut rng, 6.44) as i64).min(16);

        let mut eta = 0.62 + 0.031 * num_meds as f64 + 0.027 * num_diags as f64 + age_effect(age);
        eta += match race {
            "AfricanAmerican" => 0.115,
            "Caucasian" => 0.0,
            _ => 0.06,
        };
        eta += match admit {
            "2" => 0.125,
            "3" => -0.085,
            "4" => -0.02,
            _ => 0.0,
        };
        eta += match re {
            "<30" => 0.08,
            ">30" => 0.042,
            _ => 0.0,
        };
        let mean = eta.exp().min(12.0);
        let mut days = 0;
        for _ in 0..100 {
            days = poisson_draw(&mut rng, mean) as i64;
            if (1..=14).contains(&days) {
                break;
            }
        }
        let days = days.clamp(1, 14);
        let _ = writeln!(
            out,
            "{days},{gender},{age},{race},{weight},{admit},{met},{ins},{re},{num_procs},{num_meds},{num_ip},{num_diags}"
        );
    }
    out
}

pub const FACTOR_LEVELS: [&str; 3] = ["a", "b", "c"];

pub enum TermColumn {
    Count(Vec<i64>),
    /// Indices into [`FACTOR_LEVELS`]; level 0 is the reference.
    Factor(Vec<usize>),
}

/// A term-selection problem: named candidate columns, a Poisson response
/// and an independent dense encoding of the candidates.
pub struct TermProblem {
    pub columns: Vec<(String, TermColumn)>,
    pub y: Vec<f64>,
    /// Intercept column then each term's columns.
    pub x: Vec<Vec<f64>>,
    /// Column indices of `x` belonging to each term.
    pub groups: Vec<Vec<usize>>,
}

/// `k` candidate terms, about a third of them three-level factors. With
/// `signal` each term gets a random effect; otherwise y is pure noise.
pub fn term_problem(rng: &mut StdRng, n: usize, k: usize, signal: bool) -> TermProblem {
    let mut columns = Vec::new();
    let mut x = vec![vec![1.0]; n];
    let mut groups = Vec::new();
    let mut eta = vec![1.0; n];
    for t in 0..k {
        let name = format!("t{t}");
        let effect = if signal {
            rng.random_range(-0.3..0.3)
        } else {
            0.0
        };
        if rng.random_bool(0.3) {
            let vals: Vec<usize> = (0..n)
                .map(|i| if i < 3 { i } else { rng.random_range(0..3) })
                .collect();
            let start = x[0].len();
            for (row, &v) in x.iter_mut().zip(&vals) {
                row.push(f64::from(v == 1));
                row.push(f64::from(v == 2));
            }
            groups.push(vec![start, start + 1]);
            for (e, &v) in eta.iter_mut().zip(&vals) {
                *e += effect * v as f64;
            }
            columns.push((name, TermColumn::Factor(vals)));
        } else {
            let vals: Vec<i64> = (0..n).map(|_| rng.random_range(0..6)).collect();
            groups.push(vec![x[0].len()]);
            for (row, &v) in x.iter_mut().zip(&vals) {
                row.push(v as f64);
            }
            for (e, &v) in eta.iter_mut().zip(&vals) {
                *e += effect * (v as f64 - 2.5);
            }
            columns.push((name, TermColumn::Count(vals)));
        }
    }
    let y = eta.iter().map(|e| poisson_draw(rng, e.exp())).collect();
    TermProblem {
        columns,
        y,
        x,
        groups,
    }
}
