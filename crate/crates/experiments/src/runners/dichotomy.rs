use mwl_core::word::{dichotomy_decompose, Process, ProcessTable};
use mwl_core::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::report::{Curve, RunReport};
use crate::sampling::par_indexed;

pub const TABLE_N: usize = 1024;
const REAL_TABLES: usize = 20;

/// Worst errors of one table, bucketed by `floor(log2 n)`.
struct TableCheck {
    int_err: Vec<i64>,
    real_rel: Vec<f64>,
}

fn buckets() -> usize {
    TABLE_N.trailing_zeros() as usize + 1
}

fn check_int(seed: u64, t: usize) -> Result<Vec<i64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(t as u64);
    let table = ProcessTable::from_fn(TABLE_N, 2, |_, _, out: &mut [i64]| {
        for o in out.iter_mut() {
            *o = rng.random_range(-1_000_000..=1_000_000);
        }
    })?;
    let mut worst = vec![0i64; buckets()];
    for n in 1..=TABLE_N {
        let sum = dichotomy_decompose(&table, n)?.sum();
        let want = table.value(0, n)?;
        let b = n.ilog2() as usize;
        for (x, y) in sum.iter().zip(&want) {
            worst[b] = worst[b].max((x - y).abs());
        }
    }
    Ok(worst)
}

fn check_real(seed: u64, t: usize) -> Result<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7ea1);
    rng.set_stream(t as u64);
    let table = ProcessTable::from_fn(TABLE_N, 1, |m, n, out: &mut [f64]| {
        // additive drift plus noise, so S_{0,n} grows like the real processes
        let z: f64 = rng.sample(StandardNormal);
        out[0] = (n - m) as f64 * 0.7 + z * ((n - m) as f64).sqrt();
    })?;
    let mut worst = vec![0.0f64; buckets()];
    for n in 1..=TABLE_N {
        let d = dichotomy_decompose(&table, n)?;
        let want = table.value(0, n)?[0];
        let scale: f64 = d
            .iter()
            .map(|(_, v)| v[0].abs())
            .sum::<f64>()
            .max(want.abs())
            .max(f64::MIN_POSITIVE);
        let b = n.ilog2() as usize;
        worst[b] = worst[b].max((d.sum()[0] - want).abs() / scale);
    }
    Ok(worst)
}

/// Exact reconstruction of `S_{0,n}` from the dyadic dichotomy, for every
/// `n <= 1024` of `tables` random integer tables and 20 real tables.
pub fn run_dichotomy(seed: u64, tables: usize) -> Result<RunReport> {
    let checks = par_indexed(tables.max(REAL_TABLES), |t| {
        Ok(TableCheck {
            int_err: if t < tables {
                check_int(seed, t)?
            } else {
                vec![0; buckets()]
            },
            real_rel: if t < REAL_TABLES {
                check_real(seed, t)?
            } else {
                vec![0.0; buckets()]
            },
        })
    })?;
    let mut report = RunReport::new("dichotomy-verify", "process-tables", "", seed);
    report.replicas = tables;
    let mut curve = Curve::new(
        "dichotomy",
        &["n_checked", "int_max_abs_err", "real_max_rel_err"],
    );
    let mut int_worst = 0i64;
    let mut real_worst = 0.0f64;
    for b in 0..buckets() {
        // bucket b holds 2^b <= n < 2^(b+1)
        let lo = 1usize << b;
        let hi = ((lo << 1) - 1).min(TABLE_N);
        let ie = checks.iter().map(|c| c.int_err[b]).max().unwrap_or(0);
        let re = checks.iter().map(|c| c.real_rel[b]).fold(0.0, f64::max);
        int_worst = int_worst.max(ie);
        real_worst = real_worst.max(re);
        curve.push(lo, vec![(hi - lo + 1) as f64, ie as f64, re]);
        report.grid.push(lo);
    }
    report.check(
        "integer_exact",
        int_worst == 0,
        format!("{tables} tables, every n <= {TABLE_N}: max |error| = {int_worst}"),
    );
    report.check(
        "real_relative",
        real_worst <= 1e-9,
        format!("{REAL_TABLES} tables: max relative error {real_worst:.3e}"),
    );
    report.value("int_max_abs_err", int_worst as f64);
    report.value("real_max_rel_err", real_worst);
    report.curves.push(curve);
    Ok(report)
}
