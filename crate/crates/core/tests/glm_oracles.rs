#![allow(clippy::needless_range_loop)]

use los_glm::glm::{self, Family, FitOptions};
use los_glm::{diagnostics, DesignMatrix, INTERCEPT};
use los_glm_testkit::oracle;
use los_glm_testkit::synthetic::{self, Instance};
use nalgebra::{DMatrix, DVector};
use rand::Rng;

fn design(x: &[Vec<f64>]) -> DesignMatrix {
    let p = x[0].len();
    let mut names = vec![INTERCEPT.to_string()];
    names.extend((1..p).map(|j| format!("x{j}")));
    DesignMatrix::new(names, DMatrix::from_fn(x.len(), p, |i, j| x[i][j])).unwrap()
}

fn instances(seed: u64, count: usize) -> Vec<Instance> {
    let mut rng = synthetic::rng(seed);
    (0..count)
        .map(|_| {
            let n = rng.random_range(20..=60);
            let p = rng.random_range(1..=4);
            synthetic::poisson_instance(&mut rng, n, p)
        })
        .collect()
}

#[test]
fn irls_matches_direct_maximizer() {
    for (k, inst) in instances(11, 200).iter().enumerate() {
        let f = glm::fit(
            &design(&inst.x),
            &DVector::from_vec(inst.y.clone()),
            Family::PoissonLog,
            &FitOptions::default(),
        )
        .unwrap();
        assert!(f.converged, "instance {k}");
        let beta = oracle::poisson_mle_newton(&inst.x, &inst.y).unwrap();
        for j in 0..beta.len() {
            assert!(
                (f.beta[j] - beta[j]).abs() < 1e-6,
                "instance {k} coef {j}: {} vs {}",
                f.beta[j],
                beta[j]
            );
        }
        let se = oracle::fd_standard_errors(&inst.x, &inst.y, &beta).unwrap();
        let fse = f.std_errors();
        for j in 0..se.len() {
            assert!(
                ((fse[j] - se[j]) / se[j]).abs() < 1e-4,
                "instance {k} se {j}: {} vs {}",
                fse[j],
                se[j]
            );
        }
    }
}

#[test]
fn three_coefficient_fit_matches_maximizer() {
    let mut rng = synthetic::rng(40);
    let inst = synthetic::poisson_instance(&mut rng, 40, 3);
    let f = glm::fit(
        &design(&inst.x),
        &DVector::from_vec(inst.y.clone()),
        Family::PoissonLog,
        &FitOptions::default(),
    )
    .unwrap();
    let beta = oracle::poisson_mle_newton(&inst.x, &inst.y).unwrap();
    for j in 0..3 {
        assert!((f.beta[j] - beta[j]).abs() < 1e-6);
    }
}

#[test]
fn two_coefficient_standard_errors() {
    let mut rng = synthetic::rng(2);
    for _ in 0..20 {
        let inst = synthetic::poisson_instance(&mut rng, 50, 2);
        let f = glm::fit(
            &design(&inst.x),
            &DVector::from_vec(inst.y.clone()),
            Family::PoissonLog,
            &FitOptions::default(),
        )
        .unwrap();
        let beta = oracle::poisson_mle_newton(&inst.x, &inst.y).unwrap();
        let se = oracle::fd_standard_errors(&inst.x, &inst.y, &beta).unwrap();
        for j in 0..2 {
            assert!(
                (f.std_errors()[j] - se[j]).abs() < 1e-8,
                "{} vs {}",
                f.std_errors()[j],
                se[j]
            );
        }
    }
}

#[test]
fn fisher_information_matches_fd_hessian() {
    for inst in instances(5, 30) {
        let f = glm::fit(
            &design(&inst.x),
            &DVector::from_vec(inst.y.clone()),
            Family::PoissonLog,
            &FitOptions::default(),
        )
        .unwrap();
        let beta: Vec<f64> = f.beta.iter().copied().collect();
        let h = oracle::fd_hessian(&inst.x, &inst.y, &beta, 1e-5);
        let x = design(&inst.x);
        let mu: Vec<f64> = inst
            .x
            .iter()
            .map(|r| r.iter().zip(&beta).map(|(a, b)| a * b).sum::<f64>().exp())
            .collect();
        let w = DMatrix::from_diagonal(&DVector::from_vec(mu));
        let info = x.values().transpose() * w * x.values();
        for i in 0..beta.len() {
            for j in 0..beta.len() {
                let scale = info[(i, i)].abs().max(info[(j, j)].abs());
                assert!((-h[i][j] - info[(i, j)]).abs() / scale < 1e-4);
            }
        }
    }
}

#[test]
fn gaussian_identity_equals_least_squares() {
    let mut rng = synthetic::rng(3);
    for _ in 0..100 {
        let n = rng.random_range(10..80);
        let p = rng.random_range(1..=5);
        let (x, y) = synthetic::gaussian_instance(&mut rng, n, p);
        let f = glm::fit(
            &design(&x),
            &DVector::from_vec(y.clone()),
            Family::GaussianIdentity,
            &FitOptions::default(),
        )
        .unwrap();
        let beta = oracle::ols(&x, &y).unwrap();
        for j in 0..p {
            assert!(
                (f.beta[j] - beta[j]).abs() < 1e-10,
                "{} vs {}",
                f.beta[j],
                beta[j]
            );
        }
        let rss: f64 = x
            .iter()
            .zip(&y)
            .map(|(r, yi)| {
                let e = yi - r.iter().zip(&beta).map(|(a, b)| a * b).sum::<f64>();
                e * e
            })
            .sum();
        let sigma2 = rss / (n - p) as f64;
        let xtx: Vec<Vec<f64>> = (0..p)
            .map(|i| {
                (0..p)
                    .map(|j| x.iter().map(|r| r[i] * r[j]).sum())
                    .collect()
            })
            .collect();
        let inv = oracle::invert(&xtx).unwrap();
        for j in 0..p {
            let se = (sigma2 * inv[j][j]).sqrt();
            assert!((f.std_errors()[j] - se).abs() < 1e-8 * se);
        }
    }
}

#[test]
fn score_equations_hold_at_convergence() {
    for inst in instances(7, 100) {
        let f = glm::fit(
            &design(&inst.x),
            &DVector::from_vec(inst.y.clone()),
            Family::PoissonLog,
            &FitOptions::default(),
        )
        .unwrap();
        assert!(f.converged);
        let beta: Vec<f64> = f.beta.iter().copied().collect();
        let g = oracle::poisson_gradient(&inst.x, &inst.y, &beta);
        assert!(g.iter().all(|v| v.abs() < 1e-6), "{g:?}");
        let sum_mu: f64 = f.fitted.iter().sum();
        let sum_y: f64 = inst.y.iter().sum();
        assert!((sum_mu - sum_y).abs() < 1e-6);
    }
}

#[test]
fn deviance_identities() {
    for inst in instances(8, 100) {
        let f = glm::fit(
            &design(&inst.x),
            &DVector::from_vec(inst.y.clone()),
            Family::PoissonLog,
            &FitOptions::default(),
        )
        .unwrap();
        let mu: Vec<f64> = f.fitted.iter().copied().collect();
        let r = diagnostics::deviance_residuals(&inst.y, &mu, Family::PoissonLog).unwrap();
        let ss: f64 = r.iter().map(|v| v * v).sum();
        assert!((ss - f.deviance).abs() <= 1e-9 * f.deviance.abs().max(1e-300));
        for w in f.deviance_trace.windows(2).skip(1) {
            assert!(w[1] <= w[0] + 1e-9, "{:?}", f.deviance_trace);
        }
        let positive: Vec<f64> = inst.y.iter().map(|&v| v.max(1.0)).collect();
        assert_eq!(
            glm::deviance(&positive, &positive, Family::PoissonLog).unwrap(),
            0.0
        );
    }
}

#[test]
fn nested_models_do_not_increase_deviance() {
    for inst in instances(9, 50).into_iter().filter(|i| i.x[0].len() >= 2) {
        let y = DVector::from_vec(inst.y.clone());
        let full = glm::fit(
            &design(&inst.x),
            &y,
            Family::PoissonLog,
            &FitOptions::default(),
        )
        .unwrap();
        let sub: Vec<Vec<f64>> = inst.x.iter().map(|r| r[..r.len() - 1].to_vec()).collect();
        let reduced = glm::fit(
            &design(&sub),
            &y,
            Family::PoissonLog,
            &FitOptions::default(),
        )
        .unwrap();
        assert!(full.deviance <= reduced.deviance + 1e-8);
    }
}

#[test]
fn intercept_only_closed_form() {
    let mut rng = synthetic::rng(6);
    for _ in 0..50 {
        let n = rng.random_range(5..100);
        let mean = rng.random_range(0.5..20.0);
        let mut y: Vec<f64> = (0..n)
            .map(|_| synthetic::poisson_draw(&mut rng, mean))
            .collect();
        y[0] += 1.0;
        let x = vec![vec![1.0]; n];
        let f = glm::fit(
            &design(&x),
            &DVector::from_vec(y.clone()),
            Family::PoissonLog,
            &FitOptions::default(),
        )
        .unwrap();
        let ybar = y.iter().sum::<f64>() / n as f64;
        assert!((f.beta[0] - ybar.ln()).abs() < 1e-10);
        let mu0 = f.fitted[0];
        assert!(f.fitted.iter().all(|&m| (m - mu0).abs() <= 1e-12 * mu0));
        assert!((f.deviance - f.null_deviance).abs() <= 1e-9 * f.null_deviance.max(1.0));
    }
}

#[test]
fn information_criteria_follow_log_likelihood() {
    let inst = &instances(10, 1)[0];
    let f = glm::fit(
        &design(&inst.x),
        &DVector::from_vec(inst.y.clone()),
        Family::PoissonLog,
        &FitOptions::default(),
    )
    .unwrap();
    let beta: Vec<f64> = f.beta.iter().copied().collect();
    let ll = oracle::poisson_loglik(&inst.x, &inst.y, &beta);
    let p = beta.len() as f64;
    assert!((f.log_likelihood - ll).abs() < 1e-8 * ll.abs());
    assert!((f.aic - (-2.0 * ll + 2.0 * p)).abs() < 1e-7);
    assert!((f.bic - (-2.0 * ll + p * (inst.y.len() as f64).ln())).abs() < 1e-7);
}

#[test]
fn collinear_design_is_rejected() {
    let x: Vec<Vec<f64>> = (0..20)
        .map(|i| vec![1.0, i as f64, 2.0 * i as f64])
        .collect();
    let y = DVector::from_fn(20, |i, _| (i % 4) as f64 + 1.0);
    let err = glm::fit(&design(&x), &y, Family::PoissonLog, &FitOptions::default()).unwrap_err();
    assert!(matches!(err, los_glm::Error::SingularDesign(_)), "{err}");
}
