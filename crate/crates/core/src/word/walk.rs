use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::Word;
use crate::error::{Error, Result};
use crate::matrix::WalkElement;

/// A step law: draws i.i.d. letters of a random walk.
pub trait StepSampler<T>: Send + Sync {
    fn sample(&self, rng: &mut ChaCha8Rng) -> Result<T>;

    fn identity(&self) -> T;
}

/// Lazily grown sample path `g_0, g_1, ...` with prefix products
/// `gbar_n = g_0 ... g_{n-1}` and prefix sums of `kappa(g_k)`.
///
/// One buffer belongs to one worker; the path is a function of the seed.
pub struct WalkBuffer<T, S> {
    sampler: S,
    rng: ChaCha8Rng,
    seed: u64,
    letters: Vec<T>,
    prefix: Vec<T>,
    kappa_prefix: Vec<f64>,
    units_prefix: Option<Vec<i64>>,
}

impl<T: WalkElement, S: StepSampler<T>> WalkBuffer<T, S> {
    pub fn new(sampler: S, seed: u64) -> Self {
        let id = sampler.identity();
        let units_prefix = id.log_unit().map(|_| vec![0]);
        WalkBuffer {
            rng: ChaCha8Rng::seed_from_u64(seed),
            sampler,
            seed,
            letters: Vec::new(),
            prefix: vec![id],
            kappa_prefix: vec![0.0],
            units_prefix,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn extend_to(&mut self, n: usize) -> Result<()> {
        while self.letters.len() < n {
            let g = self.sampler.sample(&mut self.rng)?;
            let k = g.kappa()?;
            if k == f64::NEG_INFINITY {
                return Err(Error::domain("step law produced a zero matrix"));
            }
            let next = self.prefix.last().unwrap().compose(&g)?;
            self.kappa_prefix
                .push(self.kappa_prefix.last().unwrap() + k);
            if let Some(u) = &mut self.units_prefix {
                let gu = g
                    .kappa_units()
                    .ok_or_else(|| Error::domain("zero letter"))?;
                u.push(u.last().unwrap() + gu);
            }
            self.prefix.push(next);
            self.letters.push(g);
        }
        Ok(())
    }

    fn check(&self, m: usize, n: usize) -> Result<()> {
        if m > n || n > self.letters.len() {
            return Err(Error::range(format!(
                "window [{m}, {n}) beyond generated length {}",
                self.letters.len()
            )));
        }
        Ok(())
    }

    pub fn letter(&self, k: usize) -> Option<&T> {
        self.letters.get(k)
    }

    pub fn letters(&self) -> &[T] {
        &self.letters
    }

    /// `gbar_n`.
    pub fn prefix_product(&self, n: usize) -> Result<&T> {
        self.check(0, n)?;
        Ok(&self.prefix[n])
    }

    /// `gamma_{m,n}`, multiplied out from the letters (cached when `m = 0`).
    pub fn window(&self, m: usize, n: usize) -> Result<T> {
        self.check(m, n)?;
        if m == 0 {
            return Ok(self.prefix[n].clone());
        }
        let mut acc = self.prefix[0].clone();
        for g in &self.letters[m..n] {
            acc = acc.compose(g)?;
        }
        Ok(acc)
    }

    /// `sum_{m <= k < n} kappa(g_k)`.
    pub fn kappa_sum(&self, m: usize, n: usize) -> Result<f64> {
        self.check(m, n)?;
        if let (Some(u), Some(lu)) = (&self.units_prefix, self.prefix[0].log_unit()) {
            return Ok((u[n] - u[m]) as f64 * lu);
        }
        Ok(self.kappa_prefix[n] - self.kappa_prefix[m])
    }

    /// `delta_kappa(g_m, ..., g_{n-1})`; exact for p-adic walks.
    pub fn delta_kappa(&self, m: usize, n: usize) -> Result<f64> {
        self.check(m, n)?;
        if n - m <= 1 {
            return Ok(0.0);
        }
        let w = self.window(m, n)?;
        if let (Some(u), Some(lu), Some(wu)) = (&self.units_prefix, w.log_unit(), w.kappa_units()) {
            return Ok((wu - (u[n] - u[m])) as f64 * lu);
        }
        Ok(w.kappa()? - (self.kappa_prefix[n] - self.kappa_prefix[m]))
    }

    pub fn word(&self, m: usize, n: usize) -> Result<Word<T>> {
        self.check(m, n)?;
        Word::new(self.letters[m..n].to_vec())
    }
}
