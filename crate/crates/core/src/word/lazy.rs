use std::cell::RefCell;
use std::collections::HashMap;

use super::table::Process;
use super::Word;
use crate::error::{Error, Result};
use crate::matrix::WalkElement;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WordStatistic {
    /// `S_{m,n} = delta_kappa(g_m, ..., g_{n-1})`, scalar.
    DeltaKappa,
    /// `S_{m,n} = cartan(gamma_{m,n}) - sum_k cartan(g_k)`, in `R^d`.
    DeltaCartan,
}

/// Matrix-induced process evaluated on demand.
///
/// Window products are split at the largest power of two below the window
/// length and memoized, so the windows visited by the dyadic dichotomy cost
/// `O(n)` compositions in total.
pub struct WordProcess<'a, T> {
    word: &'a Word<T>,
    statistic: WordStatistic,
    prefix: Vec<Vec<f64>>,
    products: RefCell<HashMap<(usize, usize), T>>,
}

impl<'a, T: WalkElement> WordProcess<'a, T> {
    pub fn new(word: &'a Word<T>, statistic: WordStatistic) -> Result<Self> {
        if word.is_empty() {
            return Err(Error::usage("empty word"));
        }
        let dim = match statistic {
            WordStatistic::DeltaKappa => 1,
            WordStatistic::DeltaCartan => word.letters()[0].dim(),
        };
        let mut prefix = Vec::with_capacity(word.len() + 1);
        prefix.push(vec![0.0; dim]);
        for g in word.letters() {
            let v = letter_value(g, statistic)?;
            let last = prefix.last().unwrap();
            let next = last.iter().zip(&v).map(|(a, b)| a + b).collect();
            prefix.push(next);
        }
        Ok(WordProcess {
            word,
            statistic,
            prefix,
            products: RefCell::new(HashMap::new()),
        })
    }

    fn window(&self, m: usize, n: usize) -> Result<T> {
        if n - m == 1 {
            return Ok(self.word.letters()[m].clone());
        }
        if let Some(g) = self.products.borrow().get(&(m, n)) {
            return Ok(g.clone());
        }
        let len = n - m;
        let split = m + (1usize << (usize::BITS - 1 - (len - 1).leading_zeros()));
        let g = self.window(m, split)?.compose(&self.window(split, n)?)?;
        self.products.borrow_mut().insert((m, n), g.clone());
        Ok(g)
    }
}

fn letter_value<T: WalkElement>(g: &T, statistic: WordStatistic) -> Result<Vec<f64>> {
    Ok(match statistic {
        WordStatistic::DeltaKappa => vec![g.kappa()?],
        WordStatistic::DeltaCartan => g.cartan()?.kappas().to_vec(),
    })
}

impl<T: WalkElement> Process for WordProcess<'_, T> {
    type Value = f64;

    fn n_max(&self) -> usize {
        self.word.len()
    }

    fn value_dim(&self) -> usize {
        self.prefix[0].len()
    }

    fn value_into(&self, m: usize, n: usize, out: &mut [f64]) -> Result<()> {
        if m > n || n > self.word.len() {
            return Err(Error::range(format!(
                "({m}, {n}) outside word of length {}",
                self.word.len()
            )));
        }
        if n - m <= 1 {
            out.iter_mut().for_each(|o| *o = 0.0);
            return Ok(());
        }
        if self.statistic == WordStatistic::DeltaKappa
            && self.word.letters()[0].log_unit().is_some()
        {
            // exact path for p-adic words
            out[0] = self.word.delta_kappa_window(m, n)?;
            return Ok(());
        }
        let v = letter_value(&self.window(m, n)?, self.statistic)?;
        for (i, o) in out.iter_mut().enumerate() {
            *o = v[i] - (self.prefix[n][i] - self.prefix[m][i]);
        }
        Ok(())
    }
}
