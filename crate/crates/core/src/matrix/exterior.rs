//! Exterior powers (compound matrices).
//!
//! The basis of `wedge^k E` is indexed by the k-subsets of `{0, .., d-1}` in
//! colexicographic order: subsets are compared on their largest element
//! first, so for `d = 4, k = 2` the order is
//! `{0,1} {0,2} {1,2} {0,3} {1,3} {2,3}`. The entry at `(S, T)` of
//! `wedge^k g` is the minor of `g` on rows `S` and columns `T`; with a fixed
//! order on both sides `wedge^k` is multiplicative (Cauchy-Binet).

use num_rational::BigRational;

use super::{rational_det, real_det, Entries, Matrix};
use crate::error::{Error, Result};

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// All k-subsets of `0..d` (sorted ascending inside), in colexicographic order.
pub fn colex_subsets(d: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(binomial(d, k));
    if k == 0 {
        out.push(Vec::new());
        return out;
    }
    if k > d {
        return out;
    }
    // colex order = lexicographic order on the reversed tuples
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        // advance: find the smallest i such that cur[i] + 1 is free
        let mut i = 0;
        while i < k {
            let limit = if i + 1 < k { cur[i + 1] } else { d };
            if cur[i] + 1 < limit {
                break;
            }
            i += 1;
        }
        if i == k {
            return out;
        }
        cur[i] += 1;
        for (j, c) in cur.iter_mut().enumerate().take(i) {
            *c = j;
        }
    }
}

impl Matrix {
    /// `wedge^k g`, a `C(d,k) x C(d,k)` matrix of k x k minors.
    pub fn exterior_power(&self, k: usize) -> Result<Matrix> {
        let d = self.dim;
        if k == 0 || k > d {
            return Err(Error::usage(format!(
                "exterior power {k} out of range 1..={d}"
            )));
        }
        let subsets = colex_subsets(d, k);
        let m = subsets.len();
        let entries = match &self.entries {
            Entries::Real(v) => {
                let mut out = Vec::with_capacity(m * m);
                let mut buf = vec![0.0; k * k];
                for rows in &subsets {
                    for cols in &subsets {
                        for (a, &r) in rows.iter().enumerate() {
                            for (b, &c) in cols.iter().enumerate() {
                                buf[a * k + b] = v[r * d + c];
                            }
                        }
                        out.push(real_det(k, &buf));
                    }
                }
                Entries::Real(out)
            }
            Entries::Rational(v) => {
                let mut out = Vec::with_capacity(m * m);
                for rows in &subsets {
                    for cols in &subsets {
                        let buf: Vec<BigRational> = rows
                            .iter()
                            .flat_map(|&r| cols.iter().map(move |&c| v[r * d + c].clone()))
                            .collect();
                        out.push(rational_det(k, buf));
                    }
                }
                Entries::Rational(out)
            }
        };
        Ok(Matrix {
            field: self.field,
            dim: m,
            entries,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn colex_order_d4_k2() {
        let s = colex_subsets(4, 2);
        assert_eq!(
            s,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![1, 2],
                vec![0, 3],
                vec![1, 3],
                vec![2, 3]
            ]
        );
    }

    #[test]
    fn subset_counts() {
        for d in 1..=6 {
            for k in 0..=d {
                assert_eq!(colex_subsets(d, k).len(), binomial(d, k), "d={d} k={k}");
            }
        }
        assert!(colex_subsets(2, 3).is_empty());
    }
}
