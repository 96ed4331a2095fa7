use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use statrs::distribution::{ContinuousCDF, Normal};

use super::*;

fn normals(seed: u64, n: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

#[test]
fn var_q_examples() {
    assert_eq!(var_q_1d(&[3.0; 10], 1.5).unwrap(), 0.0);
    let x = [1.0, 2.0, 4.0, 7.0];
    let m = 3.5;
    let biased = x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / 4.0;
    assert!((var_q_1d(&x, 2.0).unwrap() - biased).abs() < 1e-15);
    assert_eq!(var_q_1d(&[-1.0, 1.0], 1.5).unwrap(), 1.0);
    assert!(var_q_1d(&[], 1.0).is_err());
    assert!(var_q::<Vec<f64>>(&[], 1.0).is_err());

    let pts = vec![
        vec![0.0, 0.0],
        vec![2.0, 0.0],
        vec![1.0, 3.0],
        vec![1.0, -3.0],
    ];
    // mean (1, 0); distances 1, 1, 3, 3
    let v = var_q(&pts, 1.0).unwrap();
    assert!((v - 2.0).abs() < 1e-15);
    assert!(var_q(&[vec![1.0], vec![1.0, 2.0]], 1.0).is_err());
}

#[test]
fn wasserstein_examples() {
    let a = normals(1, 1000);
    assert_eq!(wasserstein_q_1d(&a, &a, 2.0, 0).unwrap(), 0.0);
    let shifted: Vec<f64> = a.iter().map(|x| x - 0.75).collect();
    for q in [1.0, 1.5, 2.0, 3.0] {
        assert!((wasserstein_q_1d(&a, &shifted, q, 0).unwrap() - 0.75).abs() < 1e-12);
    }
    // q < 1: no root, so the translation gives |c|^q
    assert!((wasserstein_q_1d(&a, &shifted, 0.5, 0).unwrap() - 0.75f64.sqrt()).abs() < 1e-12);

    let n = 100_000;
    let z = normals(2, n);
    let std = Normal::standard();
    let grid: Vec<f64> = (0..n)
        .map(|i| std.inverse_cdf((i as f64 + 0.5) / n as f64))
        .collect();
    let w = wasserstein_q_1d(&z, &grid, 2.0, 0).unwrap();
    assert!(w <= 0.02, "W2 {w}");

    assert!(wasserstein_q_1d(&[], &a, 1.0, 0).is_err());
    let small = &a[..100];
    let w1 = wasserstein_q_1d(&a, small, 1.0, 5).unwrap();
    assert_eq!(w1, wasserstein_q_1d(small, &a, 1.0, 5).unwrap());
    assert!(w1 < 0.5);
}

#[test]
fn sqrt_psd_examples() {
    assert_eq!(
        sqrt_psd(3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]).unwrap(),
        vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]
    );
    let s = sqrt_psd(2, &[4.0, 0.0, 0.0, 9.0]).unwrap();
    for (u, v) in s.iter().zip([2.0, 0.0, 0.0, 3.0]) {
        assert!((u - v).abs() < 1e-14);
    }
    assert!(sqrt_psd(2, &[1.0, 0.5, 0.4, 1.0]).is_err());
    assert!(sqrt_psd(2, &[1.0, 0.0, 0.0, -1.0]).is_err());
    // tiny negative eigenvalue is clamped
    assert!(sqrt_psd(2, &[1.0, 0.0, 0.0, -1e-12]).is_ok());

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..500 {
        let d = rng.random_range(1..=5);
        let a: Vec<f64> = (0..d * d).map(|_| rng.sample(StandardNormal)).collect();
        let mut m = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                m[i * d + j] = (0..d).map(|k| a[k * d + i] * a[k * d + j]).sum();
            }
        }
        let s = sqrt_psd(d, &m).unwrap();
        let mut s2 = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                s2[i * d + j] = (0..d).map(|k| s[i * d + k] * s[k * d + j]).sum();
            }
        }
        let diff: Vec<f64> = s2.iter().zip(&m).map(|(u, v)| u - v).collect();
        assert!(frobenius(&diff) <= 1e-9 * frobenius(&m));
    }
}

#[test]
fn tail_bound_examples() {
    let zero = tail_bound_rhs(3.0, 2.0, 0.5, |s| if s > 0.0 { 0.0 } else { 1.0 }, 20).unwrap();
    assert_eq!(zero.partial, 0.0);
    assert_eq!(zero.value, zero.remainder);

    let (c, beta, k) = (1.5, 0.7, 40);
    let at_zero = tail_bound_rhs(0.0, c, beta, |_| 1.0, k).unwrap();
    let r = (-beta).exp();
    let truncated = c * r * (1.0 - r.powi(k as i32)) / (1.0 - r);
    assert!((at_zero.partial - truncated).abs() < 1e-14);
    assert!(at_zero.value >= c * r / (1.0 - r));

    let pareto = |s: f64| (s.powi(-2)).min(1.0);
    let got = tail_bound_rhs(10.0, 1.0, 1.0, pareto, 50).unwrap();
    let mut direct = 0.0;
    for k in 1..=50 {
        let s = 10.0 / k as f64;
        let p = if s <= 1.0 { 1.0 } else { 1.0 / (s * s) };
        direct += (-(k as f64)).exp() * p * p;
    }
    assert!((got.partial - direct).abs() < 1e-15);

    assert!(tail_bound_rhs(1.0, 1.0, 0.0, pareto, 5).is_err());
    assert!(tail_bound_rhs(1.0, 1.0, -1.0, pareto, 5).is_err());

    let surv = EmpiricalSurvival::new(&[1.0, 2.0, 2.0, 5.0]).unwrap();
    assert_eq!(surv.eval(0.0), 1.0);
    assert_eq!(surv.eval(2.0), 0.25);
    assert_eq!(surv.eval(5.0), 0.0);
}

#[test]
fn integral_square_examples() {
    let r = integral_square_check(&[1.0], 2.0).unwrap();
    assert!((r.lhs - 1.0).abs() < 1e-15 && r.rhs == 2.0 && r.ok);

    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let e: Vec<f64> = (0..100_000)
        .map(|_| -(1.0 - rng.random::<f64>()).ln())
        .collect();
    let r = integral_square_check(&e, 1.0).unwrap();
    // exact values for Exp(1): 1/2 and 2 (sqrt(pi)/2)^2 = pi/2
    assert!(
        r.ok && (r.lhs - 0.5).abs() < 0.02 && (r.rhs - std::f64::consts::FRAC_PI_2).abs() < 0.02
    );

    let r = integral_square_check(&[0.0; 5], 1.0).unwrap();
    assert_eq!((r.lhs, r.rhs, r.ok), (0.0, 0.0, true));
    assert!(integral_square_check(&[-1.0], 1.0).is_err());
}

#[test]
fn cf_and_ks_examples() {
    let a = normals(5, 1000);
    assert_eq!(
        empirical_cf(&a, &[0.0])[0],
        num_complex::Complex64::new(1.0, 0.0)
    );
    assert_eq!(ks_distance(&a, &a).unwrap(), 0.0);
    let b = normals(6, 100_000);
    let c = normals(7, 100_000);
    assert!(ks_distance(&b, &c).unwrap() <= 0.02);
    let std = Normal::standard();
    assert!(ks_distance_cdf(&b, |x| std.cdf(x)).unwrap() <= 0.01);
    assert_eq!(ks_distance(&[0.0, 1.0], &[2.0, 3.0]).unwrap(), 1.0);
}

#[test]
fn summary_is_an_exact_monoid() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut part = |n: usize| {
        let pts: Vec<Vec<f64>> = (0..n)
            .map(|_| vec![rng.sample(StandardNormal), rng.random::<f64>()])
            .collect();
        SampleSummary::from_points(2, pts).unwrap()
    };
    let (a, b, c) = (part(50), part(70), part(30));
    let ab_c = a.merge(&b).unwrap().merge(&c).unwrap();
    let a_bc = a.merge(&b.merge(&c).unwrap()).unwrap();
    let cba = c.merge(&b).unwrap().merge(&a).unwrap();
    assert_eq!(ab_c, a_bc);
    assert_eq!(ab_c, cba);
    assert_eq!(a.merge(&SampleSummary::empty(2)).unwrap(), a);

    let json = serde_json::to_string(&ab_c.to_json(&[1.0, 2.0], &[0.5]).unwrap()).unwrap();
    let keys = [
        "\"n\"",
        "\"dim\"",
        "\"mean\"",
        "\"covariance\"",
        "\"var_q\"",
        "\"quantiles\"",
    ];
    let pos: Vec<usize> = keys.iter().map(|k| json.find(k).unwrap()).collect();
    assert!(pos.windows(2).all(|w| w[0] < w[1]));

    // var_2 is the trace of the covariance
    let cov = ab_c.covariance().unwrap();
    assert!((ab_c.var_q(2.0).unwrap() - (cov[0] + cov[3])).abs() < 1e-12);
    assert_eq!(cov[1], cov[2]);
    let s = SampleSummary::from_scalars(&[3.0, 1.0, 2.0]).unwrap();
    assert_eq!(s.quantile(0, 0.5).unwrap(), 2.0);
    assert!(a.merge(&SampleSummary::empty(3)).is_err());
}

#[test]
fn covariance_is_psd() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..200 {
        let d = rng.random_range(1..=4);
        let pts: Vec<Vec<f64>> = (0..rng.random_range(1..20))
            .map(|_| (0..d).map(|_| rng.sample(StandardNormal)).collect())
            .collect();
        let c = covariance(&pts).unwrap();
        let eig = crate::matrix::symmetric_eigen(d, &c).unwrap();
        assert!(eig.values.iter().all(|v| *v >= -1e-10));
    }
}

#[test]
fn inequality_suites_that_hold() {
    assert!(qle1_suite(1, 20_000).passed());
    assert!(qge1_corrected_suite(2, 20_000).passed());
    assert!(minkowski_suite(3, 5_000).unwrap().passed());
    assert!(superadditivity_symmetric_suite(4, 5_000).passed());
    assert!(cov_var_independent_suite(5, 5_000).unwrap().passed());
    assert!(integral_square_suite(6, 5_000).unwrap().passed());
}

#[test]
fn pointwise_inequality_counterexample() {
    // x = -10 y, |y| = 1, q = 1.5: 9^1.5 = 27 against 10^1.5 + 1 - 15 = 17.6
    let q: f64 = 1.5;
    let lhs = 9f64.powf(q);
    let rhs = 10f64.powf(q) + 1.0 + q * (-10.0);
    assert!(lhs > rhs + 9.0);
    let r = qge1_suite(7, 20_000);
    assert!(r.violations > 0 && r.max_ratio > 1.0);
}

#[test]
fn skewed_laws_break_superadditivity() {
    // centred two-point laws with weights p, 1-p at 1-p, -p
    let two_point = |p: f64| (vec![1.0 - p, -p], vec![p, 1.0 - p]);
    let (xa, xw) = two_point(0.05);
    let (ya, yw) = two_point(0.05);
    let q: f64 = 1.5;
    let m = |a: &[f64], w: &[f64]| {
        a.iter()
            .zip(w)
            .map(|(x, p)| p * x.abs().powf(q))
            .sum::<f64>()
    };
    let mut lhs = 0.0;
    for (x, wx) in xa.iter().zip(&xw) {
        for (y, wy) in ya.iter().zip(&yw) {
            lhs += wx * wy * (x + y).abs().powf(q);
        }
    }
    let rhs = m(&xa, &xw) + m(&ya, &yw);
    assert!(lhs > rhs * 1.01, "{lhs} vs {rhs}");
    let r = superadditivity_suite(8, 20_000);
    assert!(r.violations > 0);
}

#[test]
fn correlated_pairs_break_the_contraction() {
    let r = cov_var_suite(9, 5_000).unwrap();
    assert!(r.violations > 0 && r.max_ratio < 2f64.sqrt() + 1e-9);
}
