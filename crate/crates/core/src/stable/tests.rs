use std::f64::consts::{LN_2, PI, SQRT_2};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;

fn params(alpha: f64, beta: f64, a: f64, b: f64) -> StableParams {
    StableParams::new(alpha, beta, a, b).unwrap()
}

fn ks_two(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}

fn quantile(xs: &[f64], q: f64) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v[((v.len() - 1) as f64 * q).round() as usize]
}

#[test]
fn params_validation() {
    assert!(StableParams::new(0.0, 0.0, 1.0, 0.0).is_err());
    assert!(StableParams::new(2.1, 0.0, 1.0, 0.0).is_err());
    assert!(StableParams::new(1.0, 1.5, 1.0, 0.0).is_err());
    assert!(StableParams::new(1.0, 0.0, 0.0, 0.0).is_err());
    assert!(StableParams::new(1.0, 0.0, 1.0, f64::NAN).is_err());
    assert_eq!(params(2.0, 0.7, 1.0, 0.0).beta(), 0.0);
}

#[test]
fn cf_examples() {
    let p = params(1.3, 0.4, 2.0, 1.0);
    assert_eq!(char_fn(&p, 0.0), num_complex::Complex64::new(1.0, 0.0));

    let p = params(2.0, 0.0, 0.8, 0.3);
    for &t in &[-2.0, -0.5, 0.7, 3.0] {
        let want = num_complex::Complex64::new(-(0.8f64 * t).powi(2), 0.3 * t).exp();
        assert!((char_fn(&p, t) - want).norm() < 1e-15);
    }

    let p = params(1.0, 0.0, 1.7, 0.0);
    for &t in &[-2.0, 0.1, 4.0] {
        let want = (-PI / 2.0 * (1.7f64 * t).abs()).exp();
        assert!((char_fn(&p, t).re - want).abs() < 1e-15);
        assert!(char_fn(&p, t).im.abs() < 1e-15);
    }
}

#[test]
fn c_alpha_values() {
    assert_eq!(c_alpha(2.0).unwrap(), 1.0);
    assert_eq!(c_alpha(1.0).unwrap(), PI / 2.0);
    // Gamma(-1/2) cos(3 pi / 4) and Gamma(1/2) cos(pi / 4)
    assert!((c_alpha(1.5).unwrap() - (2.0 * PI).sqrt()).abs() < 1e-12);
    assert!((c_alpha(0.5).unwrap() - (PI / 2.0).sqrt()).abs() < 1e-12);
    // continuity through alpha = 1
    assert!((c_alpha(1.0 + 1e-7).unwrap() - PI / 2.0).abs() < 1e-6);
    assert!(c_alpha(0.0).is_err());
}

#[test]
fn cf_modulus_and_symmetry() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..2000 {
        let alpha = if rng.random::<f64>() < 0.2 {
            1.0
        } else {
            rng.random_range(0.05..=2.0)
        };
        let p = params(
            alpha,
            rng.random_range(-1.0..=1.0),
            rng.random_range(0.01..5.0),
            rng.random_range(-3.0..3.0),
        );
        let t: f64 = rng.random_range(-20.0..20.0);
        let z = char_fn(&p, t);
        assert!(z.norm() <= 1.0 + 1e-15);
        assert!((char_fn(&p, -t) - z.conj()).norm() < 1e-14);
    }
}

#[test]
fn convolution_cf_identity() {
    let grid: Vec<f64> = (-40..=40).map(|i| i as f64 * 0.125).collect();
    for &alpha in &[0.5, 0.7, 1.0, 1.5, 1.9, 2.0] {
        for &beta in &[-1.0, 0.0, 0.6, 1.0] {
            let p0 = params(alpha, beta, 0.7, 0.2);
            let p1 = params(alpha, beta, 1.9, -1.1);
            let p2 = stable_convolve(&p0, &p1).unwrap();
            for &t in &grid {
                let lhs = char_fn(&p2, t);
                let rhs = char_fn(&p0, t) * char_fn(&p1, t);
                assert!(
                    (lhs - rhs).norm() < 1e-12,
                    "alpha {alpha} beta {beta} t {t}"
                );
            }
        }
    }
}

#[test]
fn convolution_examples() {
    let p2 = stable_convolve(&params(2.0, 0.0, 3.0, 1.0), &params(2.0, 0.0, 4.0, 2.0)).unwrap();
    assert!((p2.a() - 5.0).abs() < 1e-12);
    assert!((p2.b() - 3.0).abs() < 1e-12);

    let p0 = params(1.3, 0.5, 2.0, 0.4);
    let p2 = stable_convolve(&p0, &params(1.3, 0.5, 1e-12, 0.9)).unwrap();
    assert!((p2.a() - 2.0).abs() < 1e-12);
    assert!((p2.b() - 1.3).abs() < 1e-12);

    // alpha = 1: a_2 = 2, so a0 log a0 + a1 log a1 - a2 log a2 = -2 log 2.
    // Multiplying the characteristic functions forces b' = +(4 / pi) log 2,
    // the opposite sign of (2 / pi)(0 + 0 - 2 log 2).
    let p = params(1.0, 1.0, 1.0, 0.0);
    let p2 = stable_convolve(&p, &p).unwrap();
    assert!((p2.a() - 2.0).abs() < 1e-15);
    let printed = 2.0 / PI * (0.0 + 0.0 - 2.0 * LN_2);
    assert!((p2.b() + printed).abs() < 1e-15);
    assert!((p2.b() - 4.0 * LN_2 / PI).abs() < 1e-15);

    assert!(stable_convolve(&params(1.0, 0.1, 1.0, 0.0), &params(1.0, 0.2, 1.0, 0.0)).is_err());
    assert!(stable_convolve(&params(1.1, 0.1, 1.0, 0.0), &params(1.0, 0.1, 1.0, 0.0)).is_err());
}

#[test]
fn gaussian_and_cauchy_samples() {
    let x = sample(&params(2.0, 0.0, 1.0 / SQRT_2, 0.0), 1, 100_000);
    let m = x.iter().sum::<f64>() / x.len() as f64;
    let v = x.iter().map(|y| (y - m).powi(2)).sum::<f64>() / x.len() as f64;
    assert!((0.97..=1.03).contains(&v), "variance {v}");

    let x = sample(&params(1.0, 0.0, 1.0, 0.4), 2, 100_000);
    assert!((quantile(&x, 0.5) - 0.4).abs() < 0.02);
}

#[test]
fn sampler_is_deterministic() {
    let p = params(1.2, -0.3, 1.0, 0.0);
    assert_eq!(sample(&p, 9, 500), sample(&p, 9, 500));
    assert_ne!(sample(&p, 9, 500), sample(&p, 10, 500));
}

/// `t^alpha P(X > t)` at a large `t`, which should approach `(1 + beta) a^alpha / 2`.
fn upper_tail(p: &StableParams, seed: u64, n: usize, t: f64) -> f64 {
    let x = sample(p, seed, n);
    let freq = x.iter().filter(|v| **v > t).count() as f64 / n as f64;
    t.powf(p.alpha()) * freq
}

#[test]
fn tail_calibration_alpha_15_skewed() {
    let got = upper_tail(&params(1.5, 1.0, 1.0, 0.0), 3, 10_000_000, 50.0);
    assert!((got - 1.0).abs() < 0.3, "t^1.5 tail {got}");
}

#[test]
fn tail_calibration_symmetric() {
    // 1/2 for alpha != 1; the scaled Cauchy keeps 1/2 as well
    for (alpha, t, a) in [(1.5, 30.0, 1.0), (0.7, 200.0, 2.0), (1.0, 100.0, 1.5)] {
        let got = upper_tail(&params(alpha, 0.0, a, 0.0), 4, 2_000_000, t);
        let want = 0.5 * a.powf(alpha);
        assert!(
            (got / want - 1.0).abs() < 0.1,
            "alpha {alpha}: {got} vs {want}"
        );
    }
}

#[test]
fn tail_at_alpha_one_uses_rescaled_skew() {
    // at alpha = 1 the weights are (1 +- 2 beta / pi) / 2
    let got = upper_tail(&params(1.0, 1.0, 1.0, 0.0), 5, 4_000_000, 200.0);
    let want = 0.5 + 1.0 / PI;
    assert!((got / want - 1.0).abs() < 0.1, "{got} vs {want}");
}

#[test]
fn empirical_cf_envelope() {
    let n = 100_000;
    let grid: Vec<f64> = (-50..=50).map(|i| i as f64 * 0.1).collect();
    for (i, &alpha) in [0.7, 1.0, 1.5, 2.0].iter().enumerate() {
        let p = params(alpha, 0.5, 1.0, 0.3);
        let x = sample(&p, 100 + i as u64, n);
        let env = 3.0 * (2.0 / n as f64).sqrt();
        for &t in &grid {
            let (mut re, mut im) = (0.0, 0.0);
            for v in &x {
                let (s, c) = (t * v).sin_cos();
                re += c;
                im += s;
            }
            let emp = num_complex::Complex64::new(re / n as f64, im / n as f64);
            let d = (emp - char_fn(&p, t)).norm();
            assert!(d <= env, "alpha {alpha} theta {t}: {d} > {env}");
        }
    }
}

fn series_1d(p: &StableParams, m: &HarmonicMeasure, seed: u64, n: usize, k: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_series(p, m, &mut rng, n, k, SeriesRemainder::Gaussian)
        .unwrap()
        .into_iter()
        .map(|v| v[0])
        .collect()
}

#[test]
fn series_matches_transform_sampler_example() {
    let p = params(1.5, 0.0, 1.0, 0.0);
    let m = HarmonicMeasure::two_point(0.0).unwrap();
    let xs = series_1d(&p, &m, 21, 100_000, 10_000);
    let ys = sample(&p, 22, 100_000);
    let d = ks_two(&xs, &ys);
    assert!(d <= 0.01, "KS {d}");
}

#[test]
fn series_skewed_and_shifted() {
    // shift, skew and alpha = 1 scale handling
    for (alpha, beta, a, b) in [
        (1.0, 1.0, 2.5, 0.3),
        (1.3, -0.6, 0.5, -1.0),
        (0.7, 0.8, 3.0, 2.0),
    ] {
        let p = params(alpha, beta, a, b);
        let m = HarmonicMeasure::matching(&p).unwrap();
        let xs = series_1d(&p, &m, 31, 40_000, 1000);
        let ys = sample(&p, 32, 40_000);
        let d = ks_two(&xs, &ys);
        assert!(d <= 0.015, "alpha {alpha}: KS {d}");
    }
}

#[test]
fn series_one_sided_and_scaling() {
    let p = params(0.5, 1.0, 1.0, 0.0);
    let m = HarmonicMeasure::atoms(vec![vec![1.0]], vec![1.0]).unwrap();
    let xs = series_1d(&p, &m, 41, 10_000, 200);
    assert!(xs.iter().all(|x| *x > 0.0));

    let p = params(1.5, 0.0, 1.0, 0.0);
    let m = HarmonicMeasure::two_point(0.0).unwrap();
    let x1 = series_1d(&p, &m, 42, 20_000, 500);
    let x2 = series_1d(&p.with_scale(2.0).unwrap(), &m, 42, 20_000, 500);
    for q in [0.1, 0.25, 0.75, 0.9] {
        let r = quantile(&x2, q) / quantile(&x1, q);
        assert!((r - 2.0).abs() < 1e-9, "quantile ratio {r}");
    }
}

#[test]
fn series_errors_and_dimensions() {
    let m = HarmonicMeasure::two_point(0.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let g = params(2.0, 0.0, 1.0, 0.0);
    assert!(sample_series(&g, &m, &mut rng, 10, 10, SeriesRemainder::Drop).is_err());
    let p = params(1.5, 0.0, 1.0, 0.0);
    assert!(sample_series(&p, &m, &mut rng, 10, 0, SeriesRemainder::Drop).is_err());

    let sphere = HarmonicMeasure::UniformSphere { dim: 3 };
    let out = sample_series(&p, &sphere, &mut rng, 50, 100, SeriesRemainder::Drop).unwrap();
    assert!(out
        .iter()
        .all(|v| v.len() == 3 && v.iter().all(|x| x.is_finite())));
    let shifted = params(1.5, 0.0, 1.0, 1.0);
    assert!(sample_series(&shifted, &sphere, &mut rng, 1, 10, SeriesRemainder::Drop).is_err());

    assert!(series_remainder_sd(1.5, 10_000) < series_remainder_sd(1.5, 1000));
}

#[test]
fn harmonic_measure_parsing() {
    let m = HarmonicMeasure::parse("# weights\n1 0 0.25\n0 1 0.25\n-1 0 0.5 # left\n").unwrap();
    assert_eq!(m.dim(), 2);
    let mean = m.mean();
    assert!((mean[0] + 0.25).abs() < 1e-15 && (mean[1] - 0.25).abs() < 1e-15);
    let s = m.second_moment();
    assert!((s[0] - 0.75).abs() < 1e-15 && (s[3] - 0.25).abs() < 1e-15);

    assert!(HarmonicMeasure::parse("1 0.5\n-1 0.4\n").is_err());
    assert!(HarmonicMeasure::parse("1 1 1\n").is_err());
    assert!(HarmonicMeasure::parse("x 1\n").is_err());
    assert!(HarmonicMeasure::parse("1\n").is_err());
}

fn pareto(alpha: f64, seed: u64, n: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| (1.0 - rng.random::<f64>()).powf(-1.0 / alpha))
        .collect()
}

#[test]
fn hill_estimator() {
    let x = pareto(1.5, 51, 100_000);
    let h = hill_tail_index(&x, 1000).unwrap();
    assert!((1.4..=1.6).contains(&h), "hill {h}");

    let mut rng = ChaCha8Rng::seed_from_u64(52);
    let e: Vec<f64> = (0..100_000)
        .map(|_| -(1.0 - rng.random::<f64>()).ln())
        .collect();
    // a light tail: the estimate is about log(n / k) and keeps growing as
    // the threshold moves out
    let h_far = hill_tail_index(&e, 100).unwrap();
    let h_near = hill_tail_index(&e, 10_000).unwrap();
    assert!(h_far > h_near && h_far > 5.0, "{h_near} -> {h_far}");

    assert!(hill_tail_index(&vec![2.0; 100], 10).is_err());
    assert!(hill_tail_index(&[-1.0, -2.0, -3.0], 1).is_err());
    assert!(hill_tail_index(&x, 0).is_err());
    assert!(hill_tail_index(&x, x.len()).is_err());
}

#[test]
fn doa_against_pareto_closed_form() {
    // U(t) = int_1^t u^2 alpha u^(-alpha-1) du = alpha (t^(2-alpha) - 1) / (2 - alpha)
    let alpha = 1.5;
    let x = pareto(alpha, 61, 1_000_000);
    let t = [100.0];
    let r = [1.0, 2.0, 4.0];
    let table = doa_diagnostic(&x, alpha, &r, &t).unwrap();
    let u = |s: f64| alpha * (s.powf(2.0 - alpha) - 1.0) / (2.0 - alpha);
    for (j, &rj) in r.iter().enumerate() {
        let exact = u(rj * t[0]) / u(t[0]);
        assert!((table.ratios[0][j] - exact).abs() < 0.05, "r {rj}");
    }
}

#[test]
fn doa_bounded_and_trivial() {
    let mut rng = ChaCha8Rng::seed_from_u64(62);
    let x: Vec<f64> = (0..10_000).map(|_| rng.random_range(-1.0..1.0)).collect();
    let table = doa_diagnostic(&x, 2.0, &[1.0, 3.0, 10.0], &[5.0, 50.0]).unwrap();
    assert!(table.sup_distance < 1e-12);
    for row in &table.ratios {
        assert_eq!(row[0], 1.0);
    }
    assert!(doa_diagnostic(&[5.0, 6.0], 1.5, &[2.0], &[1.0]).is_err());
}

#[test]
fn normalizing_sequence_examples() {
    let gauss = TailSpec {
        alpha: 2.0,
        scale: 3.0,
        mean: Some(0.5),
        truncated_mean: None,
    };
    let s = normalizing_sequences(&gauss, &[1, 4, 16]).unwrap();
    assert_eq!(s.a, vec![3.0, 6.0, 12.0]);
    assert_eq!(s.b, vec![0.5, 2.0, 8.0]);

    let pareto15 = TailSpec {
        alpha: 1.5,
        scale: 1.0,
        mean: Some(3.0),
        truncated_mean: None,
    };
    let s = normalizing_sequences(&pareto15, &[8, 64]).unwrap();
    assert!((s.a[0] - 4.0).abs() < 1e-12 && (s.a[1] - 16.0).abs() < 1e-12);
    assert_eq!(s.b, vec![24.0, 192.0]);

    let half = TailSpec {
        alpha: 0.5,
        scale: 2.0,
        mean: None,
        truncated_mean: None,
    };
    let s = normalizing_sequences(&half, &[1, 10]).unwrap();
    assert_eq!(s.b, vec![0.0, 0.0]);
    assert!((s.a[1] - 400.0).abs() < 1e-9);

    // Pareto(1) on [1, inf): E(X 1{X <= t}) = log t
    let cauchy_like = TailSpec {
        alpha: 1.0,
        scale: 1.0,
        mean: None,
        truncated_mean: Some(Arc::new(|t: f64| t.ln())),
    };
    let s = normalizing_sequences(&cauchy_like, &[100]).unwrap();
    assert!((s.b[0] - 100.0 * 100f64.ln()).abs() < 1e-9);

    let missing = TailSpec {
        truncated_mean: None,
        ..cauchy_like
    };
    assert!(normalizing_sequences(&missing, &[1]).is_err());
    assert!(normalizing_sequences(
        &TailSpec {
            mean: None,
            ..pareto15
        },
        &[1]
    )
    .is_err());
    assert!(normalizing_sequences(&gauss, &[4, 1]).is_err());
}

#[test]
fn pareto_sums_normalize_to_unit_scale() {
    // symmetric Pareto(1.5): P(|X| > t) = t^-1.5, so c = 1 and the limit has a = 1
    let n = 256;
    let reps = 20_000;
    let mut rng = ChaCha8Rng::seed_from_u64(71);
    let spec = TailSpec {
        alpha: 1.5,
        scale: 1.0,
        mean: Some(0.0),
        truncated_mean: None,
    };
    let ns = normalizing_sequences(&spec, &[n]).unwrap();
    let sums: Vec<f64> = (0..reps)
        .map(|_| {
            (0..n)
                .map(|_| {
                    let m = (1.0 - rng.random::<f64>()).powf(-1.0 / 1.5);
                    if rng.random::<bool>() {
                        m
                    } else {
                        -m
                    }
                })
                .sum::<f64>()
                / ns.a[0]
        })
        .collect();
    let oracle = sample(&params(1.5, 0.0, 1.0, 0.0), 72, reps);
    let d = ks_two(&sums, &oracle);
    assert!(d < 0.03, "KS {d}");
}
