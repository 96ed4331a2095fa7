//! alpha-stable laws `L^{alpha,beta}_{a,b}`.
//!
//! The family is defined by its characteristic function
//!
//! ```text
//! alpha != 1:  exp(i theta b - C_alpha |a theta|^alpha (1 - i beta sign(theta) tan(pi alpha / 2)))
//! alpha == 1:  exp(i theta b - C_1 |a theta| - 2 i beta a theta log|a theta| / pi)
//! ```
//!
//! with `C_alpha = int_0^inf x^(-alpha) sin(x) dx` for `alpha < 2` (this is
//! `Gamma(1 - alpha) cos(pi alpha / 2)`, and `pi / 2` at `alpha = 1`) and
//! `C_2 = 1`. With that constant the upper tail satisfies
//! `t^alpha P(X > t) -> (1 + beta) a^alpha / 2` for `alpha != 1`.
//!
//! Consequences worth keeping in mind:
//!
//! * `alpha = 2` gives `N(b, 2 a^2)`: the variance is `2 a^2`, not `a^2`.
//! * at `alpha = 1` the skew term is `2 beta / pi` times the usual one, so
//!   the law is the textbook `S_1(sigma = pi a / 2, 2 beta / pi, mu)` with
//!   `mu = b - 2 beta a log(a) / pi`.
//! * convolution at `alpha = 1` shifts by
//!   `b' = -(2 beta / pi) (a_0 log a_0 + a_1 log a_1 - a_2 log a_2)`, which is
//!   what multiplying the characteristic functions gives.

mod sample;
mod tail;

pub use sample::{
    sample, sample_series, sample_with, series_remainder_sd, HarmonicMeasure, SeriesRemainder,
};
pub use tail::{
    doa_diagnostic, hill_tail_index, normalizing_sequences, DoaTable, NormSeq, TailSpec,
};

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StableParams {
    alpha: f64,
    beta: f64,
    a: f64,
    b: f64,
}

impl StableParams {
    /// Validates ranges; `beta` is set to 0 when `alpha = 2`.
    pub fn new(alpha: f64, beta: f64, a: f64, b: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(Error::usage(format!("alpha = {alpha} outside (0, 2]")));
        }
        if !(-1.0..=1.0).contains(&beta) {
            return Err(Error::usage(format!("beta = {beta} outside [-1, 1]")));
        }
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::usage(format!("scale a = {a} must be positive")));
        }
        if !b.is_finite() {
            return Err(Error::usage("shift b must be finite"));
        }
        let beta = if alpha == 2.0 { 0.0 } else { beta };
        Ok(StableParams { alpha, beta, a, b })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn with_shift(&self, b: f64) -> Self {
        StableParams { b, ..*self }
    }

    pub fn with_scale(&self, a: f64) -> Result<Self> {
        StableParams::new(self.alpha, self.beta, a, self.b)
    }
}

/// `int_0^inf x^(-alpha) sin(x) dx` for `alpha < 2`, and 1 at `alpha = 2`.
pub fn c_alpha(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(Error::usage(format!("alpha = {alpha} outside (0, 2]")));
    }
    if alpha == 2.0 {
        return Ok(1.0);
    }
    if alpha == 1.0 {
        return Ok(FRAC_PI_2);
    }
    Ok(statrs::function::gamma::gamma(1.0 - alpha) * (PI * alpha / 2.0).cos())
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

pub fn char_fn(p: &StableParams, theta: f64) -> Complex64 {
    if theta == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let c = c_alpha(p.alpha).expect("validated alpha");
    let at = p.a * theta;
    let exponent = if p.alpha == 1.0 {
        Complex64::new(
            -c * at.abs(),
            theta * p.b - 2.0 * p.beta * at * at.abs().ln() / PI,
        )
    } else {
        let m = c * at.abs().powf(p.alpha);
        let skew = p.beta * sign(theta) * (PI * p.alpha / 2.0).tan();
        Complex64::new(-m, theta * p.b + m * skew)
    };
    exponent.exp()
}

/// Parameters of `L(p0) * L(p1)`.
pub fn stable_convolve(p0: &StableParams, p1: &StableParams) -> Result<StableParams> {
    if p0.alpha != p1.alpha || p0.beta != p1.beta {
        return Err(Error::usage(format!(
            "convolution needs equal (alpha, beta): ({}, {}) vs ({}, {})",
            p0.alpha, p0.beta, p1.alpha, p1.beta
        )));
    }
    let alpha = p0.alpha;
    let a2 = (p0.a.powf(alpha) + p1.a.powf(alpha)).powf(alpha.recip());
    let shift = if alpha == 1.0 {
        let xlx = |x: f64| x * x.ln();
        -2.0 * p0.beta / PI * (xlx(p0.a) + xlx(p1.a) - xlx(a2))
    } else {
        0.0
    };
    StableParams::new(alpha, p0.beta, a2, p0.b + p1.b + shift)
}

#[cfg(test)]
mod tests;
