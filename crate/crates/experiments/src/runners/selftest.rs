use mwl_core::stable::{
    char_fn, sample, sample_series, stable_convolve, HarmonicMeasure, SeriesRemainder, StableParams,
};
use mwl_core::stats::{empirical_cf, ks_distance};
use mwl_core::Result;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::report::{Curve, RunReport};
use crate::sampling::par_indexed;

pub const SELFTEST_N: usize = 100_000;
pub const SERIES_TERMS: usize = 10_000;
pub const ALPHAS: [f64; 4] = [0.7, 1.0, 1.5, 2.0];

/// `sup |phi_emp - phi|` on `|theta| <= 5`, step 0.05.
fn cf_gap(p: &StableParams, xs: &[f64]) -> f64 {
    let thetas: Vec<f64> = (-100..=100).map(|i| i as f64 * 0.05).collect();
    empirical_cf(xs, &thetas)
        .iter()
        .zip(&thetas)
        .map(|(e, t)| (e - char_fn(p, *t)).norm())
        .fold(0.0, f64::max)
}

/// Largest `|phi_0 phi_1 - phi_conv|` over a grid and several parameter pairs.
pub fn convolution_gap() -> Result<f64> {
    let pairs = [
        ((0.7, 0.5, 1.0, 0.0), (0.7, 0.5, 2.0, 1.0)),
        ((1.0, 1.0, 1.0, 0.0), (1.0, 1.0, 1.0, 0.0)),
        ((1.0, -0.8, 0.5, 1.0), (1.0, -0.8, 2.5, -2.0)),
        ((1.5, 0.3, 1.0, 0.5), (1.5, 0.3, 0.3, 0.0)),
        ((2.0, 0.0, 1.0, 0.0), (2.0, 0.0, 3.0, 1.0)),
    ];
    let mut worst = 0.0f64;
    for (a, b) in pairs {
        let p0 = StableParams::new(a.0, a.1, a.2, a.3)?;
        let p1 = StableParams::new(b.0, b.1, b.2, b.3)?;
        let pc = stable_convolve(&p0, &p1)?;
        for i in -200..=200 {
            let t = i as f64 * 0.05;
            let d = (char_fn(&p0, t) * char_fn(&p1, t) - char_fn(&pc, t)).norm();
            worst = worst.max(d);
        }
    }
    Ok(worst)
}

/// Stable sampler self-test: characteristic-function envelope, agreement of
/// the transform sampler with the series sampler, and the convolution rule.
pub fn run_selftest(seed: u64) -> Result<RunReport> {
    let envelope = 3.0 * (2.0 / SELFTEST_N as f64).sqrt();
    let rows = par_indexed(ALPHAS.len(), |i| {
        let alpha = ALPHAS[i];
        let beta = if alpha == 2.0 { 0.0 } else { 0.5 };
        let p = StableParams::new(alpha, beta, 1.0, 0.0)?;
        let xs = sample(&p, seed.wrapping_add(2 * i as u64), SELFTEST_N);
        let gap = cf_gap(&p, &xs);
        let ks = if alpha < 2.0 {
            let m = HarmonicMeasure::matching(&p)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(2 * i as u64 + 1));
            let ys: Vec<f64> = sample_series(
                &p,
                &m,
                &mut rng,
                SELFTEST_N,
                SERIES_TERMS,
                SeriesRemainder::Gaussian,
            )?
            .into_iter()
            .map(|v| v[0])
            .collect();
            ks_distance(&xs, &ys)?
        } else {
            f64::NAN
        };
        Ok((alpha, beta, gap, ks))
    })?;
    let mut report = RunReport::new("stable-selftest", "stable-laws", "", seed);
    let mut curve = Curve::new(
        "stable_selftest",
        &["alpha", "beta", "cf_sup_gap", "cf_envelope", "ks_series"],
    );
    let mut cf_ok = true;
    let mut ks_ok = true;
    for &(alpha, beta, gap, ks) in &rows {
        curve.push(SELFTEST_N, vec![alpha, beta, gap, envelope, ks]);
        cf_ok &= gap <= envelope;
        if alpha < 2.0 {
            ks_ok &= ks <= 0.01;
        }
    }
    let conv = convolution_gap()?;
    let gaps: Vec<String> = rows
        .iter()
        .map(|r| format!("{}: {:.2e}", r.0, r.2))
        .collect();
    let kss: Vec<String> = rows
        .iter()
        .filter(|r| r.0 < 2.0)
        .map(|r| format!("{}: {:.4}", r.0, r.3))
        .collect();
    report.check(
        "cf_envelope",
        cf_ok,
        format!("sup gap {} (envelope {envelope:.3e})", gaps.join(", ")),
    );
    report.check(
        "series_ks",
        ks_ok,
        format!("KS {} (max 0.01)", kss.join(", ")),
    );
    report.check(
        "convolution_identity",
        conv <= 1e-12,
        format!("max CF mismatch {conv:.3e}"),
    );
    report.value("convolution_gap", conv);
    report.grid = vec![SELFTEST_N];
    report.curves.push(curve);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn convolution_identity_holds_on_the_grid() {
        assert!(convolution_gap().unwrap() <= 1e-12);
    }
}
