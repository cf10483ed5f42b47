//! Numerical primitives against independent oracles.

use nalgebra::{DMatrix, DVector};
use symlatent::stats::*;
use symlatent::Error;

/// Φ by its Taylor series, Φ(x) = ½ + φ(x) Σ x^(2k+1) / (2k+1)!!.
fn cdf_series(x: f64) -> f64 {
    let mut term = x;
    let mut sum = x;
    for k in 1..400 {
        term *= x * x / (2 * k + 1) as f64;
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    0.5 + (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt() * sum
}

/// Composite Simpson on [a, b].
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

#[test]
fn normal_cdf_matches_series() {
    assert_eq!(std_normal_cdf(0.0), 0.5);
    for &x in &[-5.0, -1.96, -0.3, 0.1, 1.0, 1.96, 3.5] {
        assert!((std_normal_cdf(x) - cdf_series(x)).abs() < 1e-12, "x = {x}");
        assert!((std_normal_cdf(x) + std_normal_cdf(-x) - 1.0).abs() < 1e-12);
    }
    assert!((std_normal_cdf(1.96) - 0.9750021048517795).abs() < 1e-12);
}

#[test]
fn quantile_inverts_cdf() {
    for &p in &[1e-12, 1e-6, 0.01, 0.3, 0.5, 0.77, 0.999, 1.0 - 1e-9] {
        let x = std_normal_quantile(p);
        assert!((std_normal_cdf(x) - p).abs() < 1e-12 * p.max(1e-3), "p = {p}");
    }
}

#[test]
fn truncated_far_tail_mean() {
    let density = |x: f64| (-0.5 * (x * x - 100.0)).exp();
    let oracle = simpson(|x| x * density(x), 10.0, 20.0, 20_000) / simpson(density, 10.0, 20.0, 20_000);
    assert!((oracle - 10.098).abs() < 1e-3);
    let mut rng = RngStream::new(1);
    let n = 10_000;
    let mut sum = 0.0;
    for _ in 0..n {
        let z = truncated_normal_draw(0.0, 10.0, f64::INFINITY, &mut rng).unwrap();
        assert!(z > 10.0);
        sum += z;
    }
    assert!((sum / n as f64 - oracle).abs() < 0.01);
}

#[test]
fn truncated_extreme_and_unbounded() {
    let mut rng = RngStream::new(2);
    for _ in 0..1000 {
        let z = truncated_normal_draw(0.0, 38.0, f64::INFINITY, &mut rng).unwrap();
        assert!(z > 38.0 && z.is_finite());
        let z = truncated_normal_draw(0.0, f64::NEG_INFINITY, -38.0, &mut rng).unwrap();
        assert!(z < -38.0);
        assert!(truncated_normal_draw(0.0, 0.0, f64::INFINITY, &mut rng).unwrap() > 0.0);
    }
    let n = 100_000;
    let mean = (0..n)
        .map(|_| truncated_normal_draw(0.0, f64::NEG_INFINITY, f64::INFINITY, &mut rng).unwrap())
        .sum::<f64>()
        / n as f64;
    assert!(mean.abs() < 4.0 / (n as f64).sqrt());
    assert!(matches!(
        truncated_normal_draw(0.0, 1.0, 1.0, &mut rng),
        Err(Error::EmptyInterval { .. })
    ));
}

#[test]
fn truncated_interval_mean_matches_quadrature() {
    let mut rng = RngStream::new(3);
    for &(mean, lo, hi) in &[(0.3, -0.2, 0.1), (2.0, -1.0, 0.5), (-4.0, 1.0, 1.5)] {
        let density = |x: f64| (-0.5 * (x - mean) * (x - mean)).exp();
        let oracle = simpson(|x| x * density(x), lo, hi, 2000) / simpson(density, lo, hi, 2000);
        let n = 50_000;
        let draws: Vec<f64> = (0..n)
            .map(|_| truncated_normal_draw(mean, lo, hi, &mut rng).unwrap())
            .collect();
        assert!(draws.iter().all(|&z| z > lo && z < hi));
        let m = draws.iter().sum::<f64>() / n as f64;
        let se = (hi - lo) / (12.0 * n as f64).sqrt();
        assert!((m - oracle).abs() < 5.0 * se, "({mean}, {lo}, {hi}): {m} vs {oracle}");
    }
}

#[test]
fn mvn_variance() {
    let mut rng = RngStream::new(4);
    let precision = DMatrix::identity(3, 3) * 4.0;
    let mean = DVector::zeros(3);
    let n = 100_000;
    let mut sq = [0.0; 3];
    for _ in 0..n {
        let x = mvn_draw(&mean, &precision, &mut rng).unwrap();
        for c in 0..3 {
            sq[c] += x[c] * x[c];
        }
    }
    for s in sq {
        assert!((s / n as f64 / 0.25 - 1.0).abs() < 0.03);
    }
    let bad = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
    assert!(mvn_draw(&DVector::zeros(2), &bad, &mut rng).is_err());
}

#[test]
fn mvn_canonical_moments() {
    // precision [[2, 0.5], [0.5, 1]], linear (1, -1): mean P^-1 b, covariance P^-1
    let p = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
    let b = DVector::from_vec(vec![1.0, -1.0]);
    let det = 2.0 - 0.25;
    let cov = [[1.0 / det, -0.5 / det], [-0.5 / det, 2.0 / det]];
    let mean = [(1.0 * 1.0 + 0.5) / det, (-2.0 - 0.5) / det];
    let mut rng = RngStream::new(5);
    let n = 100_000;
    let (mut s, mut ss) = ([0.0; 2], [[0.0; 2]; 2]);
    for _ in 0..n {
        let x = mvn_draw_canonical(&p, &b, &mut rng).unwrap();
        for a in 0..2 {
            s[a] += x[a];
            for c in 0..2 {
                ss[a][c] += x[a] * x[c];
            }
        }
    }
    for a in 0..2 {
        let m = s[a] / n as f64;
        assert!((m - mean[a]).abs() < 0.02, "mean {a}");
        for c in 0..2 {
            let v = ss[a][c] / n as f64 - m * s[c] / n as f64;
            assert!((v - cov[a][c]).abs() < 0.03, "cov {a}{c}");
        }
    }
}

#[test]
fn inverse_gamma_mean() {
    let mut rng = RngStream::new(6);
    let n = 100_000;
    let mut sum = 0.0;
    for _ in 0..n {
        let v = inverse_gamma_draw(3.0, 2.0, &mut rng).unwrap();
        assert!(v > 0.0);
        sum += v;
    }
    assert!((sum / n as f64 - 1.0).abs() < 0.02);
    let a: Vec<f64> = {
        let mut r = RngStream::new(9);
        (0..5).map(|_| inverse_gamma_draw(2.0, 1.0, &mut r).unwrap()).collect()
    };
    let b: Vec<f64> = {
        let mut r = RngStream::new(9);
        (0..5).map(|_| inverse_gamma_draw(2.0, 1.0, &mut r).unwrap()).collect()
    };
    assert_eq!(a, b);
    assert!(inverse_gamma_draw(0.0, 1.0, &mut rng).is_err());
    assert!(inverse_gamma_draw(1.0, -1.0, &mut rng).is_err());
}

#[test]
fn substreams_are_reproducible_and_distinct() {
    let draw = |s: u64, id: u64| {
        let mut r = RngStream::substream(s, id);
        (0..4).map(|_| r.std_normal()).collect::<Vec<_>>()
    };
    assert_eq!(draw(7, 2), draw(7, 2));
    assert_ne!(draw(7, 2), draw(7, 3));
    assert_ne!(draw(7, 2), draw(8, 2));
}
