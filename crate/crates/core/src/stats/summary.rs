use std::cmp::Ordering;

use serde::Serialize;

use super::{covariance, var_q};
use crate::error::{Error, Result};

/// Summary of a sample of vectors that merges exactly.
///
/// Points are kept in lexicographic order, so merging is a sorted merge and
/// every statistic is a function of the canonical point multiset: the merge
/// is associative and commutative bit for bit, whatever the order in which
/// replicas finish.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleSummary {
    dim: usize,
    points: Vec<Vec<f64>>,
}

fn lex(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// JSON form of a summary; keys appear in this order.
#[derive(Clone, Debug, Serialize)]
pub struct SummaryJson {
    pub n: usize,
    pub dim: usize,
    pub mean: Vec<f64>,
    pub covariance: Vec<Vec<f64>>,
    pub var_q: Vec<(f64, f64)>,
    /// `quantiles[k][c]` is the `probs[k]` quantile of coordinate `c`.
    pub quantiles: Vec<(f64, Vec<f64>)>,
}

impl SampleSummary {
    pub fn empty(dim: usize) -> Self {
        SampleSummary {
            dim,
            points: Vec::new(),
        }
    }

    pub fn from_points(dim: usize, mut points: Vec<Vec<f64>>) -> Result<Self> {
        if points.iter().any(|p| p.len() != dim) {
            return Err(Error::usage(format!("points must have dimension {dim}")));
        }
        if points.iter().flatten().any(|x| x.is_nan()) {
            return Err(Error::usage("NaN in sample"));
        }
        points.sort_by(|a, b| lex(a, b));
        Ok(SampleSummary { dim, points })
    }

    pub fn from_scalars(xs: &[f64]) -> Result<Self> {
        SampleSummary::from_points(1, xs.iter().map(|x| vec![*x]).collect())
    }

    pub fn merge(&self, other: &SampleSummary) -> Result<SampleSummary> {
        if self.dim != other.dim {
            return Err(Error::usage(
                "cannot merge summaries of different dimensions",
            ));
        }
        let mut points = Vec::with_capacity(self.points.len() + other.points.len());
        let (mut i, mut j) = (0, 0);
        while i < self.points.len() && j < other.points.len() {
            if lex(&self.points[i], &other.points[j]).is_le() {
                points.push(self.points[i].clone());
                i += 1;
            } else {
                points.push(other.points[j].clone());
                j += 1;
            }
        }
        points.extend_from_slice(&self.points[i..]);
        points.extend_from_slice(&other.points[j..]);
        Ok(SampleSummary {
            dim: self.dim,
            points,
        })
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn mean(&self) -> Result<Vec<f64>> {
        if self.points.is_empty() {
            return Err(Error::usage("empty sample"));
        }
        let mut m = vec![0.0; self.dim];
        for p in &self.points {
            for (mi, x) in m.iter_mut().zip(p) {
                *mi += x;
            }
        }
        Ok(m.into_iter().map(|v| v / self.n() as f64).collect())
    }

    pub fn covariance(&self) -> Result<Vec<f64>> {
        covariance(&self.points)
    }

    pub fn var_q(&self, q: f64) -> Result<f64> {
        var_q(&self.points, q)
    }

    /// Nearest-rank quantile of one coordinate.
    pub fn quantile(&self, coord: usize, prob: f64) -> Result<f64> {
        if self.points.is_empty() {
            return Err(Error::usage("empty sample"));
        }
        if coord >= self.dim || !(0.0..=1.0).contains(&prob) {
            return Err(Error::usage(
                "quantile coordinate or probability out of range",
            ));
        }
        let mut v: Vec<f64> = self.points.iter().map(|p| p[coord]).collect();
        v.sort_by(f64::total_cmp);
        Ok(v[((v.len() - 1) as f64 * prob).round() as usize])
    }

    pub fn to_json(&self, qs: &[f64], probs: &[f64]) -> Result<SummaryJson> {
        let d = self.dim;
        let c = self.covariance()?;
        Ok(SummaryJson {
            n: self.n(),
            dim: d,
            mean: self.mean()?,
            covariance: c.chunks(d).map(|r| r.to_vec()).collect(),
            var_q: qs
                .iter()
                .map(|&q| Ok((q, self.var_q(q)?)))
                .collect::<Result<_>>()?,
            quantiles: probs
                .iter()
                .map(|&p| {
                    Ok((
                        p,
                        (0..d).map(|k| self.quantile(k, p)).collect::<Result<_>>()?,
                    ))
                })
                .collect::<Result<_>>()?,
        })
    }
}
