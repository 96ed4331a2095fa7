//! Words of group elements and the norm-cancellation algebra.
//!
//! For a word `(g_0, ..., g_{L-1})`, `gamma_{m,n} = g_m ... g_{n-1}` and
//!
//! ```text
//! delta_kappa(g_m, ..., g_{n-1}) = kappa(gamma_{m,n}) - sum_{m <= k < n} kappa(g_k)  <= 0.
//! ```
//!
//! p-adic words are handled in exact integer units of `ln p`, so identities
//! such as the concatenation rule hold with equality, not up to rounding.

mod grid;
mod lazy;
mod table;
mod walk;

pub use grid::{grid_gap, GridGap};
pub use lazy::{WordProcess, WordStatistic};
pub use table::{
    delta_process, dichotomy_decompose, Decomposition, Process, ProcessTable, TableValue, Term,
    TermKind,
};
pub use walk::{StepSampler, WalkBuffer};

use crate::error::{Error, Result};
use crate::matrix::{CartanVector, WalkElement};

#[derive(Clone, Debug)]
pub struct Word<T> {
    letters: Vec<T>,
}

/// Result of [`Word::window_cancellation`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WindowCancellation {
    /// `sum N(g_k) - max N(g_k)` over the window.
    pub r: f64,
    /// `min_i sum_{k != i} N(g_k)`, the same quantity computed the other way.
    pub r_min_form: f64,
    pub delta_kappa: f64,
    pub bound_ok: bool,
}

/// Outcome of [`subordinate_check`].
#[derive(Clone, Debug, PartialEq)]
pub enum Subordination {
    Witness {
        /// `i_0 <= ... <= i_L` with `sub_k = gamma_{i_k, i_{k+1}}` of `sup`.
        indices: Vec<usize>,
        delta_sub: f64,
        delta_sup: f64,
        /// `delta_kappa(sup) <= delta_kappa(sub) + 1e-9`.
        inequality_ok: bool,
    },
    Refused,
}

impl<T: WalkElement> Word<T> {
    pub fn new(letters: Vec<T>) -> Result<Self> {
        if let Some(first) = letters.first() {
            if letters.iter().any(|g| g.dim() != first.dim()) {
                return Err(Error::usage("letters of different dimensions"));
            }
        }
        Ok(Word { letters })
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[T] {
        &self.letters
    }

    fn check_range(&self, m: usize, n: usize) -> Result<()> {
        if m > n || n > self.len() {
            return Err(Error::range(format!(
                "window [{m}, {n}) outside word of length {}",
                self.len()
            )));
        }
        if self.is_empty() {
            return Err(Error::usage("empty word"));
        }
        Ok(())
    }

    /// `gamma_{m,n} = g_m ... g_{n-1}`; identity when `m == n`.
    pub fn product(&self, m: usize, n: usize) -> Result<T> {
        self.check_range(m, n)?;
        if m == n {
            return Ok(self.letters[0].identity_like());
        }
        let mut acc = self.letters[m].clone();
        for g in &self.letters[m + 1..n] {
            acc = acc.compose(g)?;
        }
        Ok(acc)
    }

    /// Total norm-cancellation of the whole word.
    pub fn delta_kappa(&self) -> Result<f64> {
        self.delta_kappa_window(0, self.len())
    }

    /// Norm-cancellation of the sub-word `(g_m, ..., g_{n-1})`.
    pub fn delta_kappa_window(&self, m: usize, n: usize) -> Result<f64> {
        self.check_range(m, n)?;
        if n - m <= 1 {
            return Ok(0.0);
        }
        if let (Some(u), Some(lu)) = (self.delta_kappa_units(m, n)?, self.letters[0].log_unit()) {
            return Ok(u as f64 * lu);
        }
        let prod = self.product(m, n)?;
        let mut sum = 0.0;
        for g in &self.letters[m..n] {
            sum += g.kappa()?;
        }
        let k = prod.kappa()?;
        if k == f64::NEG_INFINITY || sum == f64::NEG_INFINITY {
            return Ok(f64::NEG_INFINITY);
        }
        Ok(k - sum)
    }

    /// Exact norm-cancellation in units of `ln p`; `None` for real words.
    pub fn delta_kappa_units(&self, m: usize, n: usize) -> Result<Option<i64>> {
        self.check_range(m, n)?;
        if self.letters[0].log_unit().is_none() {
            return Ok(None);
        }
        let prod = self.product(m, n)?;
        let mut sum = 0i64;
        for g in &self.letters[m..n] {
            sum += g
                .kappa_units()
                .ok_or_else(|| Error::domain("zero letter"))?;
        }
        let pu = prod
            .kappa_units()
            .ok_or_else(|| Error::domain("product is zero"))?;
        Ok(Some(pu - sum))
    }

    /// `R` of the window `[a, b)` and the check `|delta_kappa| <= R`.
    pub fn window_cancellation(&self, a: usize, b: usize) -> Result<WindowCancellation> {
        self.check_range(a, b)?;
        let ns = self.letters[a..b]
            .iter()
            .map(|g| g.big_n())
            .collect::<Result<Vec<_>>>()?;
        let (r, r_min_form) = if ns.is_empty() {
            (0.0, 0.0)
        } else {
            let total: f64 = ns.iter().sum();
            // first index attaining the max
            let imax = ns
                .iter()
                .enumerate()
                .fold(0, |best, (i, x)| if *x > ns[best] { i } else { best });
            let r = total - ns[imax];
            let r_min = (0..ns.len())
                .map(|i| {
                    ns.iter()
                        .enumerate()
                        .filter(|(k, _)| *k != i)
                        .map(|(_, x)| x)
                        .sum::<f64>()
                })
                .fold(f64::INFINITY, f64::min);
            (r, r_min)
        };
        let delta_kappa = if a == b {
            0.0
        } else {
            self.delta_kappa_window(a, b)?
        };
        Ok(WindowCancellation {
            r,
            r_min_form,
            delta_kappa,
            bound_ok: delta_kappa.abs() <= r + 1e-9,
        })
    }
}

/// `kappa(gh) - kappa(g) - kappa(h)`, exact for p-adic elements.
pub fn delta_kappa_pair<T: WalkElement>(g: &T, h: &T) -> Result<f64> {
    if g.dim() != h.dim() {
        return Err(Error::usage("dimension mismatch"));
    }
    if let (Some(u), Some(lu)) = (delta_kappa_pair_units(g, h)?, g.log_unit()) {
        return Ok(u as f64 * lu);
    }
    let gh = g.compose(h)?;
    Ok(gh.kappa()? - g.kappa()? - h.kappa()?)
}

/// Exact `kappa(gh) - kappa(g) - kappa(h)` in units of `ln p`; `None` for real elements.
pub fn delta_kappa_pair_units<T: WalkElement>(g: &T, h: &T) -> Result<Option<i64>> {
    if g.log_unit().is_none() {
        return Ok(None);
    }
    let gh = g.compose(h)?;
    match (gh.kappa_units(), g.kappa_units(), h.kappa_units()) {
        (Some(a), Some(b), Some(c)) => Ok(Some(a - b - c)),
        _ => Err(Error::domain("zero element")),
    }
}

/// Coordinate-wise `cartan(gh) - cartan(g) - cartan(h)`.
pub fn delta_cartan_pair<T: WalkElement>(g: &T, h: &T) -> Result<CartanVector> {
    let gh = g.compose(h)?;
    gh.cartan()?.minus(&g.cartan()?)?.minus(&h.cartan()?)
}

/// Search for a witness that `sub` is subordinated to `sup`.
///
/// Letters are compared exactly for p-adic words and with entrywise
/// relative tolerance `1e-9` for real words. Witnesses starting at 0 and
/// ending at `sup.len()` are preferred.
pub fn subordinate_check<T: WalkElement>(sub: &Word<T>, sup: &Word<T>) -> Result<Subordination> {
    const TOL: f64 = 1e-9;
    if sub.is_empty() || sup.is_empty() {
        return Ok(Subordination::Refused);
    }
    if sub.letters[0].dim() != sup.letters[0].dim() {
        return Err(Error::usage("words of different dimensions"));
    }
    let l = sup.len();
    let starts: [Vec<usize>; 2] = [vec![0], (0..=l).collect()];
    for start in starts {
        // parent[k][i] = previous position when sub_0..sub_{k-1} ends at i
        let mut reach: Vec<Option<usize>> = vec![None; l + 1];
        for &s in &start {
            reach[s] = Some(s);
        }
        let mut parents = Vec::with_capacity(sub.len());
        for target in &sub.letters {
            let mut next: Vec<Option<usize>> = vec![None; l + 1];
            for i in 0..=l {
                if reach[i].is_none() {
                    continue;
                }
                let mut acc = sup.letters[0].identity_like();
                for j in i..=l {
                    if j > i {
                        acc = acc.compose(&sup.letters[j - 1])?;
                    }
                    if next[j].is_none() && acc.same_as(target, TOL) {
                        next[j] = Some(i);
                    }
                }
            }
            parents.push(reach);
            reach = next;
        }
        let end = if reach[l].is_some() {
            Some(l)
        } else {
            (0..=l).find(|&i| reach[i].is_some())
        };
        if let Some(mut pos) = end {
            let mut indices = vec![pos];
            let mut cur = reach;
            for level in parents.into_iter().rev() {
                pos = cur[pos].unwrap();
                indices.push(pos);
                cur = level;
            }
            indices.reverse();
            let delta_sub = sub.delta_kappa()?;
            let delta_sup = sup.delta_kappa()?;
            return Ok(Subordination::Witness {
                indices,
                delta_sub,
                delta_sup,
                inequality_ok: delta_sup <= delta_sub + TOL,
            });
        }
    }
    Ok(Subordination::Refused)
}
