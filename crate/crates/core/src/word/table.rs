//! Triangular process tables `S_{m,n}` and their error processes.
//!
//! The error process of `S` on indices `n_0 <= ... <= n_j` is
//! `dS(n_0, ..., n_j) = S_{n_0,n_j} - sum_i S_{n_i,n_{i+1}}`, with
//! `S_{n,n} = 0`.
//!
//! The dyadic dichotomy writes `S_{0,n}` as
//!
//! ```text
//! S_{0,n} = sum_{k<n} S_{k,k+1}
//!         + sum_{j=1}^{floor(log2 n)} [ dS(0, F_j, F_{j-1})
//!                                     + sum_{k < n / 2^j} dS(2^j k, 2^j k + 2^(j-1), 2^j (k+1)) ]
//! ```
//!
//! where `F_j = 2^j floor(n / 2^j)`. There are `n` additive terms,
//! `floor(log2 n)` boundary terms (some of them identically zero) and
//! `sum_j floor(n / 2^j) = n - popcount(n)` dyadic terms.

use std::fmt::{Debug, Display, Write as _};

use num_traits::{Num, Zero};

use crate::error::{Error, Result};

/// Scalar type of process values: `i64` for exact tables, `f64` otherwise.
pub trait TableValue: Num + Copy + Debug + Display + Send + Sync {}
impl<V: Num + Copy + Debug + Display + Send + Sync> TableValue for V {}

/// Read access to a family `(S_{m,n})_{0 <= m <= n <= n_max}` of vectors.
pub trait Process {
    type Value: TableValue;

    fn n_max(&self) -> usize;

    fn value_dim(&self) -> usize;

    /// Writes `S_{m,n}` into `out` (length `value_dim`).
    fn value_into(&self, m: usize, n: usize, out: &mut [Self::Value]) -> Result<()>;

    fn value(&self, m: usize, n: usize) -> Result<Vec<Self::Value>> {
        let mut out = vec![Self::Value::zero(); self.value_dim()];
        self.value_into(m, n, &mut out)?;
        Ok(out)
    }
}

/// Complete triangular array, `O(n_max^2)` storage.
#[derive(Clone, Debug, PartialEq)]
pub struct ProcessTable<V> {
    n_max: usize,
    dim: usize,
    values: Vec<V>,
}

fn tri_index(n_max: usize, m: usize, n: usize) -> usize {
    // rows 0..m hold n_max, n_max - 1, ... entries
    m * n_max - m * m.saturating_sub(1) / 2 + (n - m - 1)
}

impl<V: TableValue> ProcessTable<V> {
    /// Builds the table from `f(m, n, out)` for every `0 <= m < n <= n_max`.
    pub fn from_fn(
        n_max: usize,
        dim: usize,
        mut f: impl FnMut(usize, usize, &mut [V]),
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::usage("value dimension must be positive"));
        }
        let count = n_max * (n_max + 1) / 2;
        let mut values = vec![V::zero(); count * dim];
        for m in 0..n_max {
            for n in m + 1..=n_max {
                let i = tri_index(n_max, m, n) * dim;
                f(m, n, &mut values[i..i + dim]);
            }
        }
        Ok(ProcessTable { n_max, dim, values })
    }

    /// Additive table `S_{m,n} = sum_{m <= k < n} x_k`.
    pub fn additive(increments: &[Vec<V>]) -> Result<Self> {
        let dim = increments.first().map_or(1, Vec::len);
        if increments.iter().any(|x| x.len() != dim) {
            return Err(Error::usage("increments of different lengths"));
        }
        ProcessTable::from_fn(increments.len(), dim, |m, n, out| {
            for x in &increments[m..n] {
                for (o, v) in out.iter_mut().zip(x) {
                    *o = *o + *v;
                }
            }
        })
    }

    /// Borrowed `S_{m,n}` for `m < n`.
    pub fn get(&self, m: usize, n: usize) -> Option<&[V]> {
        if m >= n || n > self.n_max {
            return None;
        }
        let i = tri_index(self.n_max, m, n) * self.dim;
        Some(&self.values[i..i + self.dim])
    }

    /// CSV with header `m,n,value` (or `value_0,...` for vector values).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("m,n");
        if self.dim == 1 {
            out.push_str(",value");
        } else {
            for i in 0..self.dim {
                let _ = write!(out, ",value_{i}");
            }
        }
        out.push('\n');
        for m in 0..self.n_max {
            for n in m + 1..=self.n_max {
                let _ = write!(out, "{m},{n}");
                for v in self.get(m, n).unwrap() {
                    let _ = write!(out, ",{v}");
                }
                out.push('\n');
            }
        }
        out
    }
}

impl<V: TableValue> Process for ProcessTable<V> {
    type Value = V;

    fn n_max(&self) -> usize {
        self.n_max
    }

    fn value_dim(&self) -> usize {
        self.dim
    }

    fn value_into(&self, m: usize, n: usize, out: &mut [V]) -> Result<()> {
        if m > n || n > self.n_max {
            return Err(Error::range(format!(
                "({m}, {n}) outside table with n_max = {}",
                self.n_max
            )));
        }
        match self.get(m, n) {
            Some(v) => out.copy_from_slice(v),
            None => out.iter_mut().for_each(|o| *o = V::zero()),
        }
        Ok(())
    }
}

fn check_indices(n_max: usize, idx: &[usize]) -> Result<()> {
    if idx.len() < 2 {
        return Err(Error::usage("need at least two indices"));
    }
    if idx.windows(2).any(|w| w[0] > w[1]) || idx[idx.len() - 1] > n_max {
        return Err(Error::range(format!(
            "indices {idx:?} not weakly increasing within 0..={n_max}"
        )));
    }
    Ok(())
}

/// `dS(n_0, ..., n_j) = S_{n_0,n_j} - sum_i S_{n_i,n_{i+1}}`.
pub fn delta_process<P: Process>(s: &P, idx: &[usize]) -> Result<Vec<P::Value>> {
    check_indices(s.n_max(), idx)?;
    let mut out = s.value(idx[0], idx[idx.len() - 1])?;
    let mut buf = vec![P::Value::zero(); s.value_dim()];
    for w in idx.windows(2) {
        s.value_into(w[0], w[1], &mut buf)?;
        for (o, b) in out.iter_mut().zip(&buf) {
            *o = *o - *b;
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TermKind {
    /// `S_{k,k+1}`.
    Additive { k: usize },
    /// `dS(0, F_j, F_{j-1})`.
    Boundary { j: u32 },
    /// `dS(2^j k, 2^j k + 2^(j-1), 2^j (k+1))`.
    Dyadic { j: u32, k: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Term {
    pub kind: TermKind,
    /// Indices `(n_0, n_1, n_2)` of the defect; `(k, k+1, k+1)` for additive terms.
    pub indices: (usize, usize, usize),
}

/// Labeled terms of the dichotomy, values stored contiguously.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition<V> {
    pub n: usize,
    dim: usize,
    terms: Vec<Term>,
    values: Vec<V>,
}

impl<V: TableValue> Decomposition<V> {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn value(&self, i: usize) -> &[V] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Term, &[V])> {
        self.terms.iter().zip(self.values.chunks(self.dim))
    }

    pub fn count(&self, pred: impl Fn(&TermKind) -> bool) -> usize {
        self.terms.iter().filter(|t| pred(&t.kind)).count()
    }

    pub fn sum(&self) -> Vec<V> {
        let mut out = vec![V::zero(); self.dim];
        for chunk in self.values.chunks(self.dim) {
            for (o, v) in out.iter_mut().zip(chunk) {
                *o = *o + *v;
            }
        }
        out
    }
}

/// Dyadic dichotomy of `S_{0,n}` (see module docs).
pub fn dichotomy_decompose<P: Process>(s: &P, n: usize) -> Result<Decomposition<P::Value>> {
    if n == 0 || n > s.n_max() {
        return Err(Error::range(format!("n = {n} outside 1..={}", s.n_max())));
    }
    let dim = s.value_dim();
    let levels = usize::BITS - 1 - n.leading_zeros();
    let capacity = 2 * n + levels as usize;
    let mut terms = Vec::with_capacity(capacity);
    let mut values = Vec::with_capacity(capacity * dim);
    let mut a = vec![P::Value::zero(); dim];
    let mut b = vec![P::Value::zero(); dim];
    let mut c = vec![P::Value::zero(); dim];
    for k in 0..n {
        s.value_into(k, k + 1, &mut a)?;
        values.extend_from_slice(&a);
        terms.push(Term {
            kind: TermKind::Additive { k },
            indices: (k, k + 1, k + 1),
        });
    }
    let mut triple = |terms: &mut Vec<Term>,
                      values: &mut Vec<P::Value>,
                      kind: TermKind,
                      (x, y, z): (usize, usize, usize)|
     -> Result<()> {
        s.value_into(x, z, &mut a)?;
        s.value_into(x, y, &mut b)?;
        s.value_into(y, z, &mut c)?;
        values.extend((0..dim).map(|i| a[i] - b[i] - c[i]));
        terms.push(Term {
            kind,
            indices: (x, y, z),
        });
        Ok(())
    };
    for j in 1..=levels {
        let block = 1usize << j;
        let half = block >> 1;
        let hi = (n / half) * half;
        let lo = (n / block) * block;
        triple(
            &mut terms,
            &mut values,
            TermKind::Boundary { j },
            (0, lo, hi),
        )?;
        for k in 0..n / block {
            triple(
                &mut terms,
                &mut values,
                TermKind::Dyadic { j, k },
                (block * k, block * k + half, block * (k + 1)),
            )?;
        }
    }
    Ok(Decomposition {
        n,
        dim,
        terms,
        values,
    })
}
