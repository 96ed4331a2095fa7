//! Scalars over the two supported local fields.
//!
//! * `Real`: IEEE double precision, absolute value `|x|`.
//! * `Padic { p }`: exact rationals viewed inside `Q_p`, with
//!   `|x|_p = p^(-v_p(x))` and `|0|_p = 0`.
//!
//! Rationals are never truncated to digit expansions, so products of p-adic
//! matrices stay exact and every log-norm is an integer multiple of `ln p`.

use std::fmt;
use std::ops::Neg;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FieldSpec {
    Real,
    Padic { p: u64 },
}

impl FieldSpec {
    /// The p-adic field `Q_p`; fails unless `p` is prime.
    pub fn padic(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::usage(format!("{p} is not prime")));
        }
        Ok(FieldSpec::Padic { p })
    }

    pub fn is_real(&self) -> bool {
        matches!(self, FieldSpec::Real)
    }

    pub fn prime(&self) -> Option<u64> {
        match self {
            FieldSpec::Real => None,
            FieldSpec::Padic { p } => Some(*p),
        }
    }

    /// `ln p` for p-adic fields; the unit in which all p-adic log-norms are counted.
    pub fn log_unit(&self) -> Option<f64> {
        self.prime().map(|p| (p as f64).ln())
    }

    pub fn zero(&self) -> Scalar {
        match self {
            FieldSpec::Real => Scalar::Real(0.0),
            FieldSpec::Padic { .. } => Scalar::Rational(BigRational::zero()),
        }
    }

    pub fn one(&self) -> Scalar {
        match self {
            FieldSpec::Real => Scalar::Real(1.0),
            FieldSpec::Padic { .. } => Scalar::Rational(BigRational::one()),
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Real => write!(f, "real"),
            FieldSpec::Padic { p } => write!(f, "padic{p}"),
        }
    }
}

/// Deterministic trial division; p-adic primes used here are small.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// p-adic valuation; `Infinite` is the valuation of zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(&self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(*v),
            Valuation::Infinite => None,
        }
    }
}

/// Element of R or of Q (inside some Q_p).
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Real(f64),
    Rational(BigRational),
}

impl Scalar {
    pub fn rational(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::Arithmetic("zero denominator".into()));
        }
        Ok(Scalar::Rational(BigRational::new(num.into(), den.into())))
    }

    pub fn integer(n: i64) -> Self {
        Scalar::Rational(BigRational::from_integer(n.into()))
    }

    pub fn belongs_to(&self, field: FieldSpec) -> bool {
        matches!(
            (self, field),
            (Scalar::Real(_), FieldSpec::Real) | (Scalar::Rational(_), FieldSpec::Padic { .. })
        )
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Real(x) => *x == 0.0,
            Scalar::Rational(q) => q.is_zero(),
        }
    }

    pub fn as_real(&self) -> Option<f64> {
        match self {
            Scalar::Real(x) => Some(*x),
            Scalar::Rational(_) => None,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Real(_) => None,
            Scalar::Rational(q) => Some(q),
        }
    }

    pub fn add(&self, rhs: &Scalar) -> Result<Scalar> {
        match (self, rhs) {
            (Scalar::Real(a), Scalar::Real(b)) => Ok(Scalar::Real(a + b)),
            (Scalar::Rational(a), Scalar::Rational(b)) => Ok(Scalar::Rational(a + b)),
            _ => Err(mixed()),
        }
    }

    pub fn mul(&self, rhs: &Scalar) -> Result<Scalar> {
        match (self, rhs) {
            (Scalar::Real(a), Scalar::Real(b)) => Ok(Scalar::Real(a * b)),
            (Scalar::Rational(a), Scalar::Rational(b)) => Ok(Scalar::Rational(a * b)),
            _ => Err(mixed()),
        }
    }

    pub fn inv(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::Arithmetic("inverse of zero".into()));
        }
        Ok(match self {
            Scalar::Real(a) => Scalar::Real(1.0 / a),
            Scalar::Rational(a) => Scalar::Rational(a.recip()),
        })
    }
}

impl Neg for &Scalar {
    type Output = Scalar;

    fn neg(self) -> Scalar {
        match self {
            Scalar::Real(a) => Scalar::Real(-a),
            Scalar::Rational(a) => Scalar::Rational(-a),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Real(x) => write!(f, "{x:e}"),
            Scalar::Rational(q) => write!(f, "{}/{}", q.numer(), q.denom()),
        }
    }
}

fn mixed() -> Error {
    Error::usage("scalars from different fields")
}

fn int_valuation(n: &BigInt, p: u64) -> i64 {
    debug_assert!(!n.is_zero());
    let p = BigInt::from(p);
    let mut m = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = m.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        m = q;
        v += 1;
    }
}

/// `v_p(num) - v_p(den)`, or `Infinite` for zero.
pub fn valuation(x: &BigRational, p: u64) -> Result<Valuation> {
    if !is_prime(p) {
        return Err(Error::usage(format!("{p} is not prime")));
    }
    Ok(valuation_unchecked(x, p))
}

pub(crate) fn valuation_unchecked(x: &BigRational, p: u64) -> Valuation {
    if x.is_zero() {
        return Valuation::Infinite;
    }
    Valuation::Finite(int_valuation(x.numer(), p) - int_valuation(x.denom(), p))
}

/// Absolute value of `x` in `field`.
pub fn abs_value(x: &Scalar, field: FieldSpec) -> Result<f64> {
    match (x, field) {
        (Scalar::Real(a), FieldSpec::Real) => Ok(a.abs()),
        (Scalar::Rational(q), FieldSpec::Padic { p }) => Ok(match valuation_unchecked(q, p) {
            Valuation::Infinite => 0.0,
            Valuation::Finite(v) => (p as f64).powf(-(v as f64)),
        }),
        _ => Err(Error::usage(format!(
            "scalar {x} does not belong to {field}"
        ))),
    }
}

/// Exact p-adic absolute value `p^(-v_p(x))` as a rational.
pub fn abs_value_exact(x: &BigRational, p: u64) -> Result<BigRational> {
    Ok(match valuation(x, p)? {
        Valuation::Infinite => BigRational::zero(),
        Valuation::Finite(v) => {
            let pp = BigInt::from(p).pow(v.unsigned_abs() as u32);
            if v >= 0 {
                BigRational::new(BigInt::one(), pp)
            } else {
                BigRational::from_integer(pp)
            }
        }
    })
}

/// `ln |x|` in `field`, `-inf` for zero. For p-adic fields this is
/// `-v_p(x) ln p`, which never under- or overflows.
pub fn log_abs(x: &Scalar, field: FieldSpec) -> Result<f64> {
    match (x, field) {
        (Scalar::Real(a), FieldSpec::Real) => Ok(a.abs().ln()),
        (Scalar::Rational(q), FieldSpec::Padic { p }) => Ok(match valuation_unchecked(q, p) {
            Valuation::Infinite => f64::NEG_INFINITY,
            Valuation::Finite(v) => -(v as f64) * (p as f64).ln(),
        }),
        _ => Err(Error::usage(format!(
            "scalar {x} does not belong to {field}"
        ))),
    }
}

/// Parse `num/den` or an integer into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let parse_int = |t: &str| {
        t.trim()
            .parse::<BigInt>()
            .map_err(|e| Error::Parse(format!("bad integer {t:?}: {e}")))
    };
    match s.split_once('/') {
        Some((n, d)) => {
            let d = parse_int(d)?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(BigRational::new(parse_int(n)?, d))
        }
        None => Ok(BigRational::from_integer(parse_int(s)?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn padic_field_requires_prime() {
        assert!(FieldSpec::padic(2).is_ok());
        assert!(FieldSpec::padic(97).is_ok());
        assert!(FieldSpec::padic(1).is_err());
        assert!(FieldSpec::padic(15).is_err());
    }

    #[test]
    fn abs_value_examples() {
        let f2 = FieldSpec::padic(2).unwrap();
        assert_eq!(abs_value(&Scalar::integer(8), f2).unwrap(), 1.0 / 8.0);
        assert_eq!(
            abs_value(&Scalar::rational(3, 4).unwrap(), f2).unwrap(),
            4.0
        );
        assert_eq!(
            abs_value(&Scalar::Real(-2.5), FieldSpec::Real).unwrap(),
            2.5
        );
        assert_eq!(abs_value(&Scalar::integer(0), f2).unwrap(), 0.0);
        assert!(abs_value(&Scalar::Real(1.0), f2).is_err());
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(valuation(&q(18, 1), 3).unwrap(), Valuation::Finite(2));
        for p in [2, 3, 5, 7] {
            assert_eq!(valuation(&q(1, 1), p).unwrap(), Valuation::Finite(0));
        }
        assert_eq!(valuation(&q(0, 1), 5).unwrap(), Valuation::Infinite);
        assert_eq!(valuation(&q(5, 50), 5).unwrap(), Valuation::Finite(-1));
        assert!(valuation(&q(3, 1), 4).is_err());
    }

    #[test]
    fn field_ops_examples() {
        let half = Scalar::rational(1, 2).unwrap();
        let third = Scalar::rational(1, 3).unwrap();
        assert_eq!(half.add(&third).unwrap(), Scalar::rational(5, 6).unwrap());
        assert_eq!(
            Scalar::rational(2, 7).unwrap().inv().unwrap(),
            Scalar::rational(7, 2).unwrap()
        );
        let s = Scalar::Real(0.1).add(&Scalar::Real(0.2)).unwrap();
        assert!((s.as_real().unwrap() - 0.3).abs() < 1e-15);
        assert!(Scalar::integer(0).inv().is_err());
        assert!(Scalar::Real(0.0).inv().is_err());
        assert!(half.add(&Scalar::Real(1.0)).is_err());
        assert_eq!(-&half, Scalar::rational(-1, 2).unwrap());
    }

    #[test]
    fn reduced_form_with_positive_denominator() {
        let x = Scalar::rational(6, -4).unwrap();
        let r = x.as_rational().unwrap();
        assert_eq!(r.numer(), &BigInt::from(-3));
        assert_eq!(r.denom(), &BigInt::from(2));
    }

    #[test]
    fn parse_rational_forms() {
        assert_eq!(parse_rational("-3/6").unwrap(), q(-1, 2));
        assert_eq!(parse_rational(" 12 ").unwrap(), q(12, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    fn nonzero_rational() -> impl Strategy<Value = BigRational> {
        (-5000i64..5000, 1i64..5000)
            .prop_filter("nonzero", |(n, _)| *n != 0)
            .prop_map(|(n, d)| q(n, d))
    }

    fn any_rational() -> impl Strategy<Value = BigRational> {
        (-5000i64..5000, 1i64..5000).prop_map(|(n, d)| q(n, d))
    }

    proptest! {
        #[test]
        fn ultrametric_inequality(x in any_rational(), y in any_rational(), p in prop::sample::select(vec![2u64, 3, 5, 7, 11])) {
            let f = FieldSpec::Padic { p };
            let ax = abs_value(&Scalar::Rational(x.clone()), f).unwrap();
            let ay = abs_value(&Scalar::Rational(y.clone()), f).unwrap();
            let axy = abs_value(&Scalar::Rational(&x + &y), f).unwrap();
            prop_assert!(axy <= ax.max(ay));
            if ax != ay {
                prop_assert_eq!(axy, ax.max(ay));
            }
        }

        #[test]
        fn multiplicativity(x in any_rational(), y in any_rational(), p in prop::sample::select(vec![2u64, 3, 5, 7])) {
            let ax = abs_value_exact(&x, p).unwrap();
            let ay = abs_value_exact(&y, p).unwrap();
            let axy = abs_value_exact(&(&x * &y), p).unwrap();
            prop_assert_eq!(axy, ax * ay);
        }

        #[test]
        fn valuation_is_additive(x in nonzero_rational(), y in nonzero_rational(), p in prop::sample::select(vec![2u64, 3, 5])) {
            let vx = valuation(&x, p).unwrap().finite().unwrap();
            let vy = valuation(&y, p).unwrap().finite().unwrap();
            let vxy = valuation(&(&x * &y), p).unwrap().finite().unwrap();
            prop_assert_eq!(vxy, vx + vy);
        }
    }
}
