use mwl_core::word::{
    delta_kappa_pair, dichotomy_decompose, Process, ProcessTable, StepSampler, WalkBuffer, Word,
};
use mwl_core::{ExteriorTower, FieldSpec, Matrix, Result};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Uniformly random rotation times `diag(e^t, e^-t)`, `t` uniform on `[0, 2]`.
struct RotDiag;

impl StepSampler<Matrix> for RotDiag {
    fn sample(&self, rng: &mut ChaCha8Rng) -> Result<Matrix> {
        let t: f64 = rng.random_range(0.0..2.0);
        let th: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        Matrix::rotation(th).mul(&Matrix::diagonal_real(&[t.exp(), (-t).exp()])?)
    }

    fn identity(&self) -> Matrix {
        Matrix::identity(FieldSpec::Real, 2)
    }
}

/// `e11 + p U` over `Q_p`, `U` with entries in `0..p^3`.
struct PadicBall(u64);

impl StepSampler<Matrix> for PadicBall {
    fn sample(&self, rng: &mut ChaCha8Rng) -> Result<Matrix> {
        let p = self.0 as i64;
        loop {
            let mut data: Vec<(i64, i64)> = (0..4)
                .map(|_| (p * rng.random_range(0..p.pow(3)), 1))
                .collect();
            data[0].0 += 1;
            let g = Matrix::padic_from_fractions(self.0, 2, &data)?;
            if !g.determinant().is_zero() {
                return Ok(g);
            }
        }
    }

    fn identity(&self) -> Matrix {
        Matrix::identity(FieldSpec::padic(self.0).unwrap(), 2)
    }
}

#[test]
fn walk_windows_match_words() {
    let mut w = WalkBuffer::new(RotDiag, 11);
    w.extend_to(40).unwrap();
    let word = Word::new(w.letters().to_vec()).unwrap();
    for (m, n) in [(0, 40), (3, 17), (10, 11), (5, 39)] {
        let a = w.delta_kappa(m, n).unwrap();
        let b = word.delta_kappa_window(m, n).unwrap();
        assert!((a - b).abs() < 1e-9, "{m}..{n}: {a} vs {b}");
        assert!(a <= 1e-9);
    }
}

#[test]
fn cancellation_splits_at_any_point() {
    let mut w = WalkBuffer::new(RotDiag, 5);
    w.extend_to(30).unwrap();
    let whole = w.delta_kappa(0, 30).unwrap();
    for m in 1..30 {
        let left = w.window(0, m).unwrap();
        let right = w.window(m, 30).unwrap();
        let split = w.delta_kappa(0, m).unwrap()
            + w.delta_kappa(m, 30).unwrap()
            + delta_kappa_pair(&left, &right).unwrap();
        assert!((whole - split).abs() < 1e-9, "m = {m}");
    }
}

#[test]
fn padic_ball_walk_is_exactly_additive() {
    let mut w = WalkBuffer::new(PadicBall(5), 3);
    w.extend_to(50).unwrap();
    let word = w.word(0, 50).unwrap();
    for n in [2, 7, 50] {
        assert_eq!(word.delta_kappa_units(0, n).unwrap(), Some(0));
        assert_eq!(w.delta_kappa(0, n).unwrap(), 0.0);
    }
}

#[test]
fn towers_follow_dense_products_then_outlive_them() {
    let mut w = WalkBuffer::new(RotDiag, 2);
    w.extend_to(400).unwrap();
    let mut tower = ExteriorTower::identity(2, 2);
    for (k, g) in w.letters().iter().enumerate() {
        tower = tower
            .mul(&ExteriorTower::from_matrix(g, 2).unwrap())
            .unwrap();
        let n = k + 1;
        let dense = w.prefix_product(n).unwrap().kappa().unwrap();
        if dense < 300.0 {
            assert!(
                (tower.kappa().unwrap() - dense).abs() < 1e-9 * dense.max(1.0),
                "n = {n}"
            );
        }
        assert!(tower.kappa().unwrap().is_finite());
    }
}

#[test]
fn dichotomy_rebuilds_walk_cancellations() {
    let mut w = WalkBuffer::new(RotDiag, 9);
    w.extend_to(64).unwrap();
    let table = ProcessTable::from_fn(64, 1, |m, n, out: &mut [f64]| {
        out[0] = w.delta_kappa(m, n).unwrap();
    })
    .unwrap();
    for n in 1..=64 {
        let d = dichotomy_decompose(&table, n).unwrap();
        let want = table.value(0, n).unwrap()[0];
        assert!(
            (d.sum()[0] - want).abs() <= 1e-9 * want.abs().max(1.0),
            "n = {n}"
        );
    }
}
