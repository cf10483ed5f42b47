//! Kernels, likelihoods and prior calibration.

use symlatent::data::DyadCovariates;
use symlatent::model::*;
use symlatent::stats::{std_normal_cdf, RngStream};

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

#[test]
fn kernel_examples() {
    let c = ClassState::new(vec![0, 0, 1], 2, vec![0.7, 0.1, 0.1, -2.0], 1.0).unwrap();
    assert_eq!(alpha_class(&c, 0, 1).unwrap(), 0.7);
    assert!(alpha_class(&c, 0, 5).is_err());
    let d = DistanceState::new(vec![0.0, 0.0, 3.0, 4.0, 3.0, 4.0], 2, vec![1.0, 1.0]).unwrap();
    assert_eq!(alpha_distance(&d, 0, 1).unwrap(), -5.0);
    assert_eq!(alpha_distance(&d, 1, 2).unwrap(), 0.0);
    let e = EigenState::new(vec![1.0, 0.0, 0.0, 1.0], 2, vec![2.5, -1.0], vec![0.0; 2]).unwrap();
    assert_eq!(alpha_eigen(&e, 0, 1).unwrap(), 0.0);
    let r = 0.4;
    let star = EigenState::new(vec![1.0, r, r, r], 1, vec![1.0], vec![0.0]).unwrap();
    assert_eq!(star.alpha(0, 2), r);
    assert!((star.alpha(1, 3) - r * r).abs() < 1e-15);
}

#[test]
fn eta_examples() {
    let g = GlobalParams::new(vec![], vec![0.0]).unwrap();
    assert_eq!(eta(&g, &DyadCovariates::none(2), 0.3, 0, 1).unwrap(), 0.3);
    let x = DyadCovariates::new(2, 1, vec![0.5]).unwrap();
    let g = GlobalParams::new(vec![2.0], vec![0.0]).unwrap();
    assert_eq!(eta(&g, &x, 0.0, 1, 0).unwrap(), 1.0);
    let g2 = GlobalParams::new(vec![4.0], vec![0.0]).unwrap();
    assert_eq!(eta(&g2, &x, 0.0, 0, 1).unwrap(), 2.0);
}

#[test]
fn probit_examples() {
    // intercept mu = 1 is threshold -1
    let g = GlobalParams::new(vec![], vec![-1.0]).unwrap();
    assert!((binary_probit_prob(&g, 0.96).unwrap() - 0.9750021048517795).abs() < 1e-12);
    assert_eq!(binary_probit_prob(&g, -1.0).unwrap(), 0.5);
    assert!(binary_probit_prob(&g, -60.0).unwrap() < 1e-300);
    let g3 = GlobalParams::new(vec![], vec![0.0, 1.0]).unwrap();
    assert!(binary_probit_prob(&g3, 0.0).is_err());
    let p = ordered_probit_probs(&g3, 0.0).unwrap();
    let phi1 = std_normal_cdf(1.0);
    assert!((p[0] - 0.5).abs() < 1e-15);
    assert!((p[1] - (phi1 - 0.5)).abs() < 1e-15);
    assert!((p[2] - (1.0 - phi1)).abs() < 1e-15);
    let high = ordered_probit_probs(&g3, 50.0).unwrap();
    assert!((high[2] - 1.0).abs() < 1e-15);
    assert!(GlobalParams::new(vec![], vec![1.0, 0.0]).is_err());
}

#[test]
fn class_calibration_is_exact() {
    let prior = PriorConfig::default();
    for target in [0.5, 1.0, 3.0] {
        let p = calibrate_prior_alpha_variance(ModelKind::Class, 4, 30, &prior, target).unwrap();
        assert!((p.m_var_rate / (p.var_shape - 1.0) - target).abs() < 1e-12);
    }
}

#[test]
fn eigen_calibration_matches_closed_form() {
    let (s2, t2) = (1.5f64, 0.8f64);
    let prior = PriorConfig {
        u_var: s2,
        mean_var: 0.0,
        lambda_var: Some(t2),
        ..PriorConfig::default()
    };
    let mut rng = RngStream::new(41);
    let v = prior_alpha_variance(ModelKind::Eigen, 1, 10, &prior, 100_000, &mut rng).unwrap();
    let oracle = s2 * s2 * t2;
    assert!((v / oracle - 1.0).abs() < 0.05, "{v} vs {oracle}");
    let cal = calibrate_prior_alpha_variance(ModelKind::Eigen, 1, 10, &prior, 1.0).unwrap();
    let lambda = cal.lambda_var.unwrap();
    assert!((lambda * s2 * s2 - 1.0).abs() < 0.05, "calibrated lambda_var {lambda}");
}

#[test]
fn distance_variance_matches_quadrature() {
    // pos_var pinned at s2 by a very concentrated inverse-gamma prior
    let s2 = 0.7;
    let shape = 1e9;
    let prior = PriorConfig {
        var_shape: shape,
        pos_var_rate: s2 * (shape + 1.0),
        ..PriorConfig::default()
    };
    // |u_i - u_j| is Rayleigh with scale^2 = 2 s2
    let sc2 = 2.0 * s2;
    let dens = |r: f64| r / sc2 * (-r * r / (2.0 * sc2)).exp();
    let top = 40.0 * sc2.sqrt();
    let m1 = simpson(|r| r * dens(r), 0.0, top, 20_000);
    let m2 = simpson(|r| r * r * dens(r), 0.0, top, 20_000);
    let oracle = m2 - m1 * m1;
    assert!((oracle - (4.0 - std::f64::consts::PI) * s2).abs() < 1e-9);
    let mut rng = RngStream::new(42);
    let v = prior_alpha_variance(ModelKind::Distance, 2, 10, &prior, 100_000, &mut rng).unwrap();
    assert!((v / oracle - 1.0).abs() < 0.05, "{v} vs {oracle}");
}

#[test]
fn calibrated_priors_hit_target() {
    for kind in ModelKind::ALL {
        for k in [1, 3, 10] {
            let p = calibrate_prior_alpha_variance(kind, k, 154, &PriorConfig::default(), 1.0).unwrap();
            let mut rng = RngStream::new(43);
            let v = prior_alpha_variance(kind, k, 154, &p, 100_000, &mut rng).unwrap();
            // Monte Carlo on heavy-tailed hyperpriors: allow sampling error on top of 5%
            assert!((v - 1.0).abs() < 0.15, "{kind} K={k}: {v}");
        }
    }
}

#[test]
fn prior_draws_respect_shapes() {
    let mut rng = RngStream::new(44);
    for kind in ModelKind::ALL {
        let s = sample_latent_prior(kind, 7, 3, &PriorConfig::default(), &mut rng).unwrap();
        assert_eq!(s.kind(), kind);
        assert_eq!(s.k(), 3);
        assert_eq!(s.node_count(), 7);
    }
    assert!(sample_latent_prior(ModelKind::Eigen, 7, 0, &PriorConfig::default(), &mut rng).is_err());
}
