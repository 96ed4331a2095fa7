use super::{CartanVector, ExteriorTower, Matrix};
use crate::error::Result;

/// A group element a random walk can multiply and measure.
///
/// Implemented by [`Matrix`] (exact p-adic or plain `f64`) and by
/// [`ExteriorTower`] (real, unbounded dynamic range).
pub trait WalkElement: Clone + Send + Sync {
    fn dim(&self) -> usize;

    fn compose(&self, rhs: &Self) -> Result<Self>;

    /// Neutral element of the same shape (field, dimension, depth).
    fn identity_like(&self) -> Self;

    fn kappa(&self) -> Result<f64>;

    fn big_n(&self) -> Result<f64>;

    fn cartan(&self) -> Result<CartanVector>;

    fn kappa_bar(&self, k: usize) -> Result<f64>;

    /// Exact `kappa` in units of `ln p` when the element is p-adic.
    fn kappa_units(&self) -> Option<i64> {
        None
    }

    /// `ln p` for p-adic elements.
    fn log_unit(&self) -> Option<f64> {
        None
    }

    /// Equality: exact for p-adic, entrywise relative `tol` for real.
    fn same_as(&self, other: &Self, tol: f64) -> bool;
}

impl WalkElement for Matrix {
    fn dim(&self) -> usize {
        self.dim
    }

    fn compose(&self, rhs: &Self) -> Result<Self> {
        self.mul(rhs)
    }

    fn identity_like(&self) -> Self {
        Matrix::identity(self.field, self.dim)
    }

    fn kappa(&self) -> Result<f64> {
        Matrix::kappa(self)
    }

    fn big_n(&self) -> Result<f64> {
        Matrix::big_n(self)
    }

    fn cartan(&self) -> Result<CartanVector> {
        Matrix::cartan(self)
    }

    fn kappa_bar(&self, k: usize) -> Result<f64> {
        Matrix::kappa_bar(self, k)
    }

    fn kappa_units(&self) -> Option<i64> {
        Matrix::kappa_units(self)
    }

    fn log_unit(&self) -> Option<f64> {
        self.field.log_unit()
    }

    fn same_as(&self, other: &Self, tol: f64) -> bool {
        self.max_relative_deviation(other).is_some_and(|d| d <= tol)
    }
}

impl WalkElement for ExteriorTower {
    fn dim(&self) -> usize {
        ExteriorTower::dim(self)
    }

    fn compose(&self, rhs: &Self) -> Result<Self> {
        self.mul(rhs)
    }

    fn identity_like(&self) -> Self {
        ExteriorTower::identity(ExteriorTower::dim(self), self.depth())
    }

    fn kappa(&self) -> Result<f64> {
        ExteriorTower::kappa(self)
    }

    fn big_n(&self) -> Result<f64> {
        ExteriorTower::big_n(self)
    }

    fn cartan(&self) -> Result<CartanVector> {
        ExteriorTower::cartan(self)
    }

    fn kappa_bar(&self, k: usize) -> Result<f64> {
        ExteriorTower::kappa_bar(self, k)
    }

    fn same_as(&self, other: &Self, tol: f64) -> bool {
        self.relative_deviation(other) <= tol
    }
}
