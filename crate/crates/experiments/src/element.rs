use mwl_core::matrix::CartanVector;
use mwl_core::{Error, ExteriorTower, Matrix, Result, WalkElement};

/// Letter type shared by all step laws: exact or dense matrices, or the
/// scaled exterior tower used for real walks whose products leave `f64` range.
#[derive(Clone, Debug)]
pub enum Element {
    Dense(Matrix),
    Tower(ExteriorTower),
}

impl Element {
    pub fn as_dense(&self) -> Option<&Matrix> {
        match self {
            Element::Dense(m) => Some(m),
            Element::Tower(_) => None,
        }
    }
}

fn mismatch() -> Error {
    Error::Usage("cannot mix dense and tower elements".into())
}

impl WalkElement for Element {
    fn dim(&self) -> usize {
        match self {
            Element::Dense(m) => m.dim(),
            Element::Tower(t) => t.dim(),
        }
    }

    fn compose(&self, rhs: &Self) -> Result<Self> {
        match (self, rhs) {
            (Element::Dense(a), Element::Dense(b)) => Ok(Element::Dense(a.mul(b)?)),
            (Element::Tower(a), Element::Tower(b)) => Ok(Element::Tower(a.mul(b)?)),
            _ => Err(mismatch()),
        }
    }

    fn identity_like(&self) -> Self {
        match self {
            Element::Dense(m) => Element::Dense(WalkElement::identity_like(m)),
            Element::Tower(t) => Element::Tower(WalkElement::identity_like(t)),
        }
    }

    fn kappa(&self) -> Result<f64> {
        match self {
            Element::Dense(m) => m.kappa(),
            Element::Tower(t) => t.kappa(),
        }
    }

    fn big_n(&self) -> Result<f64> {
        match self {
            Element::Dense(m) => m.big_n(),
            Element::Tower(t) => t.big_n(),
        }
    }

    fn cartan(&self) -> Result<CartanVector> {
        match self {
            Element::Dense(m) => WalkElement::cartan(m),
            Element::Tower(t) => t.cartan(),
        }
    }

    fn kappa_bar(&self, k: usize) -> Result<f64> {
        match self {
            Element::Dense(m) => WalkElement::kappa_bar(m, k),
            Element::Tower(t) => t.kappa_bar(k),
        }
    }

    fn kappa_units(&self) -> Option<i64> {
        match self {
            Element::Dense(m) => m.kappa_units(),
            Element::Tower(_) => None,
        }
    }

    fn log_unit(&self) -> Option<f64> {
        match self {
            Element::Dense(m) => WalkElement::log_unit(m),
            Element::Tower(_) => None,
        }
    }

    fn same_as(&self, other: &Self, tol: f64) -> bool {
        match (self, other) {
            (Element::Dense(a), Element::Dense(b)) => WalkElement::same_as(a, b, tol),
            (Element::Tower(a), Element::Tower(b)) => WalkElement::same_as(a, b, tol),
            _ => false,
        }
    }
}
