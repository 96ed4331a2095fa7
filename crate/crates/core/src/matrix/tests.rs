use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::*;
use crate::field::{valuation, Scalar};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_real(r: &mut ChaCha8Rng, d: usize) -> Matrix {
    Matrix::real(d, (0..d * d).map(|_| r.sample(StandardNormal)).collect()).unwrap()
}

fn random_sl(r: &mut ChaCha8Rng, d: usize) -> Matrix {
    loop {
        let g = random_real(r, d);
        let det = g.determinant().as_real().unwrap().abs();
        if det > 1e-3 {
            let f = det.powf(-1.0 / d as f64);
            let v = g.as_real_slice().unwrap().iter().map(|x| x * f).collect();
            return Matrix::real(d, v).unwrap();
        }
    }
}

fn random_padic(r: &mut ChaCha8Rng, p: u64, d: usize) -> Matrix {
    loop {
        let data: Vec<(i64, i64)> = (0..d * d)
            .map(|_| {
                let e = r.random_range(-2i32..=2);
                let num = r.random_range(-20i64..=20);
                let den = r.random_range(1i64..=6);
                let pe = (p as i64).pow(e.unsigned_abs());
                if e >= 0 {
                    (num * pe, den)
                } else {
                    (num, den * pe)
                }
            })
            .collect();
        let g = Matrix::padic_from_fractions(p, d, &data).unwrap();
        if !g.determinant().is_zero() {
            return g;
        }
    }
}

#[test]
fn kappa_examples() {
    for f in [FieldSpec::Real, FieldSpec::padic(5).unwrap()] {
        assert_eq!(Matrix::identity(f, 3).kappa().unwrap(), 0.0);
    }
    let g = Matrix::diagonal_real(&[2.0, 1.0]).unwrap();
    assert!((g.kappa().unwrap() - 2f64.ln()).abs() < 1e-15);
    let h = Matrix::padic_from_fractions(2, 2, &[(2, 1), (0, 1), (0, 1), (1, 1)]).unwrap();
    assert_eq!(h.kappa().unwrap(), 0.0);
    assert_eq!(
        Matrix::zeros(FieldSpec::Real, 2).kappa().unwrap(),
        f64::NEG_INFINITY
    );
}

#[test]
fn big_n_examples() {
    assert_eq!(Matrix::identity(FieldSpec::Real, 2).big_n().unwrap(), 0.0);
    let g = Matrix::diagonal_real(&[2.0, 0.5]).unwrap();
    assert!((g.big_n().unwrap() - 2.0 * 2f64.ln()).abs() < 1e-14);
    assert!(Matrix::rotation(0.7).big_n().unwrap().abs() < 1e-14);
    let singular = Matrix::real(2, vec![1.0, 2.0, 2.0, 4.0]).unwrap();
    assert!(matches!(singular.big_n(), Err(Error::Domain(_))));
    let q = Matrix::padic_from_fractions(3, 2, &[(9, 1), (0, 1), (0, 1), (1, 3)]).unwrap();
    assert_eq!(q.big_n_units().unwrap(), 3);
}

#[test]
fn singular_value_examples() {
    let g = Matrix::diagonal_real(&[4.0, 2.0, 1.0]).unwrap();
    assert_eq!(g.singular_values().unwrap(), vec![4.0, 2.0, 1.0]);
    let r = Matrix::rotation(0.3);
    let g = r
        .mul(&Matrix::diagonal_real(&[3.0, 1.0]).unwrap())
        .unwrap()
        .mul(&r)
        .unwrap();
    let s = g.singular_values().unwrap();
    assert!((s[0] - 3.0).abs() < 1e-10 && (s[1] - 1.0).abs() < 1e-10);
    assert!(Matrix::identity(FieldSpec::padic(2).unwrap(), 2)
        .singular_values()
        .is_err());
}

#[test]
fn partial_products_of_singular_values_match_exterior_norms() {
    let mut r = rng(11);
    for _ in 0..50 {
        let g = random_real(&mut r, 5);
        let s = g.singular_values().unwrap();
        for k in 1..=5 {
            let direct: f64 = s[..k].iter().map(|x| x.ln()).sum();
            let via = g.exterior_power(k).unwrap().kappa().unwrap();
            assert!((direct - via).abs() < 1e-9, "k={k}: {direct} vs {via}");
        }
    }
}

#[test]
fn exterior_power_examples() {
    let mut r = rng(3);
    let g = random_real(&mut r, 3);
    assert_eq!(g.exterior_power(1).unwrap(), g);
    let w = Matrix::diagonal_real(&[2.0, 5.0])
        .unwrap()
        .exterior_power(2)
        .unwrap();
    assert_eq!(w.as_real_slice().unwrap(), &[10.0]);
    let top = g.exterior_power(3).unwrap();
    let det = g.determinant().as_real().unwrap();
    assert!((top.as_real_slice().unwrap()[0] - det).abs() < 1e-12 * det.abs().max(1.0));
    assert!(matches!(g.exterior_power(0), Err(Error::Usage(_))));
    assert!(matches!(g.exterior_power(4), Err(Error::Usage(_))));
}

#[test]
fn exterior_power_is_multiplicative() {
    let mut r = rng(5);
    for _ in 0..20 {
        let (g, h) = (random_real(&mut r, 4), random_real(&mut r, 4));
        for k in 1..=4 {
            let lhs = g.mul(&h).unwrap().exterior_power(k).unwrap();
            let rhs = g
                .exterior_power(k)
                .unwrap()
                .mul(&h.exterior_power(k).unwrap())
                .unwrap();
            assert!(lhs.max_relative_deviation(&rhs).unwrap() < 1e-9);
            let bound = g.kappa_bar(k).unwrap() + h.kappa_bar(k).unwrap();
            assert!(lhs.kappa().unwrap() <= bound + 1e-9);
        }
    }
    for _ in 0..10 {
        let (g, h) = (random_padic(&mut r, 3, 3), random_padic(&mut r, 3, 3));
        for k in 1..=3 {
            let lhs = g.mul(&h).unwrap().exterior_power(k).unwrap();
            let rhs = g
                .exterior_power(k)
                .unwrap()
                .mul(&h.exterior_power(k).unwrap())
                .unwrap();
            assert_eq!(lhs, rhs);
        }
    }
}

#[test]
fn cartan_examples() {
    let g = Matrix::padic_from_fractions(
        3,
        3,
        &[
            (9, 1),
            (0, 1),
            (0, 1),
            (0, 1),
            (3, 1),
            (0, 1),
            (0, 1),
            (0, 1),
            (1, 1),
        ],
    )
    .unwrap();
    let c = g.cartan().unwrap();
    assert_eq!(c.units().unwrap(), &[0, -1, -2]);
    let l3 = 3f64.ln();
    assert_eq!(c.kappas(), &[0.0, -l3, -2.0 * l3]);

    let c = Matrix::diagonal_real(&[4.0, 2.0, 1.0])
        .unwrap()
        .cartan()
        .unwrap();
    let want = [4f64.ln(), 2f64.ln(), 0.0];
    for (a, b) in c.kappas().iter().zip(want) {
        assert!((a - b).abs() < 1e-15);
    }
}

#[test]
fn cartan_paths_agree() {
    let mut r = rng(7);
    for d in 1..=4 {
        for _ in 0..100 {
            let g = random_real(&mut r, d);
            let a = g.cartan().unwrap();
            let b = g.cartan_via_exterior().unwrap();
            for (x, y) in a.kappas().iter().zip(b.kappas()) {
                assert!((x - y).abs() < 1e-8, "{a:?} vs {b:?}");
            }
            assert!(a.is_non_increasing(1e-9));
        }
    }
}

#[test]
fn padic_cartan_sums_to_log_abs_det() {
    let mut r = rng(8);
    for p in [2, 3, 5] {
        for _ in 0..30 {
            let g = random_padic(&mut r, p, 3);
            let c = g.cartan().unwrap();
            let det = g.determinant();
            let v = valuation(det.as_rational().unwrap(), p)
                .unwrap()
                .finite()
                .unwrap();
            assert_eq!(c.kappa_bar_units(3), Some(-v));
            assert!(c.is_non_increasing(0.0));
        }
    }
}

#[test]
fn cartan_of_inverse_is_reflected() {
    let mut r = rng(9);
    for _ in 0..50 {
        let g = random_real(&mut r, 3);
        let a = g.inverse().unwrap().cartan().unwrap();
        let b = g.cartan().unwrap().of_inverse();
        for (x, y) in a.kappas().iter().zip(b.kappas()) {
            assert!((x - y).abs() < 1e-8);
        }
    }
    for _ in 0..20 {
        let g = random_padic(&mut r, 2, 3);
        assert_eq!(
            g.inverse().unwrap().cartan().unwrap(),
            g.cartan().unwrap().of_inverse()
        );
    }
}

#[test]
fn log_coefficient_examples() {
    let real = |x: f64| Scalar::Real(x);
    let e1 = [real(1.0), real(0.0)];
    let e2 = [real(0.0), real(1.0)];
    let id = Matrix::identity(FieldSpec::Real, 2);
    assert_eq!(id.log_coefficient(&e1, &e1).unwrap(), 0.0);
    let g = Matrix::diagonal_real(&[2.0, 1.0]).unwrap();
    assert_eq!(g.log_coefficient(&e1, &e2).unwrap(), f64::NEG_INFINITY);
    let g = Matrix::real(2, vec![0.0, -1.0, 2.0, 0.0]).unwrap();
    assert!((g.log_coefficient(&e2, &e1).unwrap() - 2f64.ln()).abs() < 1e-15);
    assert!(g.log_coefficient(&e1[..1], &e1).is_err());
}

#[test]
fn padic_operator_norm_is_max_entry() {
    // sup over lattice vectors of |gx| / |x| for the max-norm
    let mut r = rng(12);
    let p = 3u64;
    let vmax = |xs: &[BigRational]| {
        xs.iter()
            .map(|x| crate::field::valuation_unchecked(x, p))
            .min()
            .unwrap()
            .finite()
            .unwrap()
    };
    for _ in 0..20 {
        let g = random_padic(&mut r, p, 3);
        let entries = g.as_rational_slice().unwrap();
        let mut best = i64::MIN;
        for _ in 0..200 {
            let x: Vec<BigRational> = (0..3)
                .map(|_| BigRational::from_integer(r.random_range(-30i64..=30).into()))
                .collect();
            if x.iter().all(|v| v == &BigRational::from_integer(0.into())) {
                continue;
            }
            let gx: Vec<BigRational> = (0..3)
                .map(|i| (0..3).map(|j| &entries[i * 3 + j] * &x[j]).sum())
                .collect();
            if gx.iter().all(|v| *v == BigRational::from_integer(0.into())) {
                continue;
            }
            // log_p |gx| - log_p |x| = v(x) - v(gx)
            let ratio = vmax(&x) - vmax(&gx);
            assert!(ratio <= g.kappa_units().unwrap());
            best = best.max(ratio);
        }
        assert_eq!(best, g.kappa_units().unwrap());
    }
}

#[test]
fn norm_inequalities_on_random_pairs() {
    let mut r = rng(13);
    for _ in 0..500 {
        let d = r.random_range(2..=3);
        let (g, h) = (random_sl(&mut r, d), random_sl(&mut r, d));
        let gh = g.mul(&h).unwrap();
        let delta = gh.kappa().unwrap() - g.kappa().unwrap() - h.kappa().unwrap();
        let bound = g.big_n().unwrap().min(h.big_n().unwrap());
        assert!(delta <= 1e-9 && -delta <= bound + 1e-9);
        let (k, n) = (g.kappa().unwrap(), g.big_n().unwrap());
        assert!(k >= -1e-9 && k <= n + 1e-9 && n <= d as f64 * k + 1e-9);
    }
    for _ in 0..200 {
        let (g, h) = (random_padic(&mut r, 2, 2), random_padic(&mut r, 2, 2));
        let gh = g.mul(&h).unwrap();
        let delta = gh.kappa_units().unwrap() - g.kappa_units().unwrap() - h.kappa_units().unwrap();
        let bound = g.big_n_units().unwrap().min(h.big_n_units().unwrap());
        assert!(delta <= 0 && -delta <= bound);
    }
}

#[test]
fn tower_agrees_with_dense_products() {
    let mut r = rng(14);
    let mut dense = Matrix::identity(FieldSpec::Real, 3);
    let mut tower = ExteriorTower::identity(3, 3);
    for _ in 0..10 {
        let g = random_sl(&mut r, 3);
        dense = dense.mul(&g).unwrap();
        tower = tower
            .mul(&ExteriorTower::from_matrix(&g, 3).unwrap())
            .unwrap();
    }
    let a = dense.cartan().unwrap();
    let b = tower.cartan().unwrap();
    for (x, y) in a.kappas().iter().zip(b.kappas()) {
        assert!((x - y).abs() < 1e-8);
    }
    assert!(
        tower
            .to_matrix()
            .unwrap()
            .max_relative_deviation(&dense)
            .unwrap()
            < 1e-12
    );
}
