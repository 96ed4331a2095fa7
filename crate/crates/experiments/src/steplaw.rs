//! Step laws: finitely supported laws, rotation-times-heavy-diagonal laws,
//! the ultrametric Haar-ball example and fixture files.
//!
//! Every law carries declared hypothesis flags. They are not verified; the
//! justification for each built-in entry is written next to it in [`zoo`].

use mwl_core::field::FieldSpec;
use mwl_core::stable::TailSpec;
use mwl_core::word::StepSampler;
use mwl_core::{Error, ExteriorTower, Matrix, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::weighted::WeightedIndex;
use rand_distr::Distribution;
use serde::{Deserialize, Serialize};

use crate::element::Element;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Flags {
    pub proximal: Option<bool>,
    pub strongly_irreducible: Option<bool>,
    pub totally_irreducible: Option<bool>,
    pub in_sl: Option<bool>,
    /// All support elements commute and are positive diagonal, so `kappa` is additive.
    pub commuting: Option<bool>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Hypothesis {
    Proximal,
    StronglyIrreducible,
    TotallyIrreducible,
    InSl,
}

impl Hypothesis {
    fn name(self) -> &'static str {
        match self {
            Hypothesis::Proximal => "proximal",
            Hypothesis::StronglyIrreducible => "strongly_irreducible",
            Hypothesis::TotallyIrreducible => "totally_irreducible",
            Hypothesis::InSl => "in_sl",
        }
    }
}

impl Flags {
    fn get(&self, h: Hypothesis) -> Option<bool> {
        match h {
            Hypothesis::Proximal => self.proximal,
            Hypothesis::StronglyIrreducible => self.strongly_irreducible,
            Hypothesis::TotallyIrreducible => self.totally_irreducible,
            Hypothesis::InSl => self.in_sl,
        }
    }

    /// Errors on an undeclared flag; returns a note for each flag declared false.
    pub fn require(&self, hs: &[Hypothesis]) -> Result<Vec<String>> {
        let mut notes = Vec::new();
        for &h in hs {
            match self.get(h) {
                None => {
                    return Err(Error::Usage(format!(
                        "step law does not declare the `{}` flag required by this runner",
                        h.name()
                    )))
                }
                Some(false) => notes.push(format!(
                    "`{}` declared false: theorem hypotheses not met, run is a control",
                    h.name()
                )),
                Some(true) => {}
            }
        }
        Ok(notes)
    }
}

#[derive(Clone, Debug)]
pub enum StepLawKind {
    FiniteSupport {
        matrices: Vec<Matrix>,
        weights: Vec<f64>,
    },
    /// `O diag(e^(X v_1), ..., e^(X v_d))` with `X = scale P`, `P(P > t) = t^-alpha`
    /// on `[1, inf)`, `v_i = (d - 1 - 2i) / (d - 1)` and `O` a fixed product of
    /// plane rotations by `angle`.
    RotHeavyDiag {
        dim: usize,
        alpha: f64,
        scale: f64,
        angle: f64,
    },
    /// `e_11 + M` with `M` i.i.d. on `p Z_p`, truncated to `digits` p-adic digits.
    PadicHaarBall { p: u64, dim: usize, digits: u32 },
}

#[derive(Clone, Debug)]
pub struct StepLaw {
    pub name: String,
    pub kind: StepLawKind,
    pub flags: Flags,
    letters: Vec<Element>,
    index: Option<WeightedIndex<f64>>,
    rotation: Option<ExteriorTower>,
    exponents: Vec<f64>,
}

/// `O` as the product of rotations by `angle` in the planes `(i, i + 1)`.
pub fn plane_rotations(dim: usize, angle: f64) -> Result<Matrix> {
    let (s, c) = angle.sin_cos();
    let mut acc = Matrix::identity(FieldSpec::Real, dim);
    for i in 0..dim.saturating_sub(1) {
        let mut r = vec![0.0; dim * dim];
        for k in 0..dim {
            r[k * dim + k] = 1.0;
        }
        r[i * dim + i] = c;
        r[i * dim + i + 1] = -s;
        r[(i + 1) * dim + i] = s;
        r[(i + 1) * dim + i + 1] = c;
        acc = acc.mul(&Matrix::real(dim, r)?)?;
    }
    Ok(acc)
}

impl StepLaw {
    pub fn new(name: &str, kind: StepLawKind, flags: Flags) -> Result<Self> {
        let mut law = StepLaw {
            name: name.to_string(),
            kind,
            flags,
            letters: Vec::new(),
            index: None,
            rotation: None,
            exponents: Vec::new(),
        };
        match &law.kind {
            StepLawKind::FiniteSupport { matrices, weights } => {
                if matrices.is_empty() || matrices.len() != weights.len() {
                    return Err(Error::Usage(
                        "finite support needs one positive weight per matrix".into(),
                    ));
                }
                if weights.iter().any(|w| !(*w > 0.0)) {
                    return Err(Error::Usage("weights must be positive".into()));
                }
                let total: f64 = weights.iter().sum();
                if (total - 1.0).abs() > 1e-12 {
                    return Err(Error::Usage(format!("weights sum to {total}, not 1")));
                }
                let (field, dim) = (matrices[0].field(), matrices[0].dim());
                for g in matrices {
                    if g.field() != field || g.dim() != dim {
                        return Err(Error::Usage(
                            "support matrices must share field and dimension".into(),
                        ));
                    }
                    if g.determinant().is_zero() {
                        return Err(Error::Usage("support matrices must be invertible".into()));
                    }
                }
                law.letters = matrices
                    .iter()
                    .map(|g| match field {
                        FieldSpec::Real => Ok(Element::Tower(ExteriorTower::from_matrix(g, dim)?)),
                        FieldSpec::Padic { .. } => Ok(Element::Dense(g.clone())),
                    })
                    .collect::<Result<_>>()?;
                law.index =
                    Some(WeightedIndex::new(weights).map_err(|e| Error::Usage(e.to_string()))?);
            }
            StepLawKind::RotHeavyDiag {
                dim,
                alpha,
                scale,
                angle,
            } => {
                if *dim < 2 || !(*alpha > 0.0) || !(*scale > 0.0) || !angle.is_finite() {
                    return Err(Error::Usage(
                        "rot-heavy-diag needs dim >= 2, alpha > 0, scale > 0".into(),
                    ));
                }
                let d = *dim;
                law.rotation = Some(ExteriorTower::from_matrix(&plane_rotations(d, *angle)?, d)?);
                law.exponents = (0..d)
                    .map(|i| (d as f64 - 1.0 - 2.0 * i as f64) / (d as f64 - 1.0))
                    .collect();
            }
            StepLawKind::PadicHaarBall { p, dim, digits } => {
                FieldSpec::padic(*p)?;
                if *dim < 1 || *digits < 1 || (*p as f64).powi(*digits as i32) > 1e15 {
                    return Err(Error::Usage(
                        "padic-haar-ball needs dim >= 1 and 1 <= digits with p^digits <= 1e15"
                            .into(),
                    ));
                }
            }
        }
        Ok(law)
    }

    pub fn field(&self) -> FieldSpec {
        match &self.kind {
            StepLawKind::FiniteSupport { matrices, .. } => matrices[0].field(),
            StepLawKind::RotHeavyDiag { .. } => FieldSpec::Real,
            StepLawKind::PadicHaarBall { p, .. } => FieldSpec::Padic { p: *p },
        }
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            StepLawKind::FiniteSupport { matrices, .. } => matrices[0].dim(),
            StepLawKind::RotHeavyDiag { dim, .. } | StepLawKind::PadicHaarBall { dim, .. } => *dim,
        }
    }

    /// A single support point.
    pub fn is_deterministic(&self) -> bool {
        matches!(&self.kind, StepLawKind::FiniteSupport { matrices, .. } if matrices.len() == 1)
    }

    pub fn has_bounded_support(&self) -> bool {
        matches!(self.kind, StepLawKind::FiniteSupport { .. })
    }

    pub fn is_heavy_tailed(&self) -> bool {
        matches!(self.kind, StepLawKind::RotHeavyDiag { .. })
    }

    /// Law of `kappa(g_0)` for laws whose tail is known in closed form.
    ///
    /// For the heavy diagonal law `kappa(g_0) = X` exactly, with
    /// `P(X > t) = scale^alpha t^-alpha` for `t >= scale`.
    pub fn kappa_tail(&self) -> Option<TailSpec> {
        match self.kind {
            StepLawKind::RotHeavyDiag { alpha, scale, .. } => Some(TailSpec {
                alpha: alpha.min(2.0),
                scale: scale.powf(alpha),
                mean: (alpha > 1.0).then(|| scale * alpha / (alpha - 1.0)),
                truncated_mean: (alpha == 1.0).then(|| {
                    std::sync::Arc::new(move |t: f64| {
                        if t <= scale {
                            0.0
                        } else {
                            scale * (t / scale).ln()
                        }
                    }) as std::sync::Arc<dyn Fn(f64) -> f64 + Send + Sync>
                }),
            }),
            _ => None,
        }
    }

    fn padic_draw(&self, rng: &mut ChaCha8Rng, p: u64, dim: usize, digits: u32) -> Result<Matrix> {
        let modulus = p.pow(digits);
        let field = FieldSpec::padic(p)?;
        loop {
            let data: Vec<BigRational> = (0..dim * dim)
                .map(|i| {
                    let u = rng.random_range(0..modulus);
                    let v = BigInt::from(p) * BigInt::from(u) + BigInt::from((i == 0) as u8);
                    BigRational::from_integer(v)
                })
                .collect();
            let g = Matrix::rational(field, dim, data)?;
            if !g.determinant().is_zero() {
                return Ok(g);
            }
        }
    }
}

impl StepSampler<Element> for StepLaw {
    fn sample(&self, rng: &mut ChaCha8Rng) -> Result<Element> {
        match &self.kind {
            StepLawKind::FiniteSupport { .. } => {
                let i = self.index.as_ref().unwrap().sample(rng);
                Ok(self.letters[i].clone())
            }
            StepLawKind::RotHeavyDiag {
                dim, alpha, scale, ..
            } => {
                let u = 1.0 - rng.random::<f64>();
                let x = scale * u.powf(-1.0 / alpha);
                let log_diag: Vec<f64> = self.exponents.iter().map(|v| x * v).collect();
                let diag = ExteriorTower::diagonal(&log_diag, *dim);
                Ok(Element::Tower(self.rotation.as_ref().unwrap().mul(&diag)?))
            }
            StepLawKind::PadicHaarBall { p, dim, digits } => {
                Ok(Element::Dense(self.padic_draw(rng, *p, *dim, *digits)?))
            }
        }
    }

    fn identity(&self) -> Element {
        match &self.kind {
            StepLawKind::FiniteSupport { matrices, .. } => match matrices[0].field() {
                FieldSpec::Real => Element::Tower(ExteriorTower::identity(self.dim(), self.dim())),
                f => Element::Dense(Matrix::identity(f, self.dim())),
            },
            StepLawKind::RotHeavyDiag { dim, .. } => {
                Element::Tower(ExteriorTower::identity(*dim, *dim))
            }
            StepLawKind::PadicHaarBall { .. } => {
                Element::Dense(Matrix::identity(self.field(), self.dim()))
            }
        }
    }
}

fn flags(proximal: bool, si: bool, ti: bool, in_sl: bool, commuting: bool) -> Flags {
    Flags {
        proximal: Some(proximal),
        strongly_irreducible: Some(si),
        totally_irreducible: Some(ti),
        in_sl: Some(in_sl),
        commuting: Some(commuting),
    }
}

fn elementary(dim: usize, i: usize, j: usize) -> Vec<f64> {
    let mut m = vec![0.0; dim * dim];
    for k in 0..dim {
        m[k * dim + k] = 1.0;
    }
    m[i * dim + j] = 1.0;
    m
}

pub const ZOO: &[&str] = &[
    "diag2",
    "sl2-pair",
    "sl3-pair",
    "sl3-diag",
    "rhd15",
    "rhd15-d3",
    "diag-heavy15",
    "padic-haar3",
];

/// Built-in entries.
pub fn zoo(name: &str) -> Result<StepLaw> {
    let finite = |ms: Vec<Matrix>| {
        let w = vec![1.0 / ms.len() as f64; ms.len()];
        StepLawKind::FiniteSupport {
            matrices: ms,
            weights: w,
        }
    };
    match name {
        // delta at diag(2, 1/2): proximal (eigenvalue gap), reducible, commuting
        "diag2" => StepLaw::new(
            name,
            finite(vec![Matrix::diagonal_real(&[2.0, 0.5])?]),
            flags(true, false, false, true, true),
        ),
        // A = [[2,1],[1,1]] hyperbolic, B = rotation by 1 radian (infinite order),
        // so the group is non-elementary. In d = 2 total and strong irreducibility
        // coincide. A rotation by pi/2 would generate SL_2(Z), whose exact
        // relations cancel products below f64 resolution.
        "sl2-pair" => StepLaw::new(
            name,
            finite(vec![
                Matrix::real(2, vec![2.0, 1.0, 1.0, 1.0])?,
                Matrix::real(2, vec![1f64.cos(), -1f64.sin(), 1f64.sin(), 1f64.cos()])?,
            ]),
            flags(true, true, true, true, false),
        ),
        // A = (I + e12)(I + e21)(I + e23)(I + e32), a positive matrix with a
        // simple dominant eigenvalue; B the cyclic permutation.
        "sl3-pair" => {
            let mut a = Matrix::identity(FieldSpec::Real, 3);
            for (i, j) in [(0, 1), (1, 0), (1, 2), (2, 1)] {
                a = a.mul(&Matrix::real(3, elementary(3, i, j))?)?;
            }
            let b = Matrix::real(3, vec![0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0])?;
            StepLaw::new(
                name,
                finite(vec![a, b]),
                flags(true, true, true, true, false),
            )
        }
        "sl3-diag" => StepLaw::new(
            name,
            finite(vec![Matrix::diagonal_real(&[4.0, 1.0, 0.25])?]),
            flags(true, false, false, true, true),
        ),
        // the rotation by 1 radian has infinite order and the diagonal part is
        // proximal, so the generated group is Zariski dense in SL_d
        "rhd15" => StepLaw::new(
            name,
            StepLawKind::RotHeavyDiag {
                dim: 2,
                alpha: 1.5,
                scale: 1.0,
                angle: 1.0,
            },
            flags(true, true, true, true, false),
        ),
        "rhd15-d3" => StepLaw::new(
            name,
            StepLawKind::RotHeavyDiag {
                dim: 3,
                alpha: 1.5,
                scale: 1.0,
                angle: 1.0,
            },
            flags(true, true, true, true, false),
        ),
        // angle 0: positive commuting diagonals, kappa is additive
        "diag-heavy15" => StepLaw::new(
            name,
            StepLawKind::RotHeavyDiag {
                dim: 2,
                alpha: 1.5,
                scale: 1.0,
                angle: 0.0,
            },
            flags(true, false, false, true, true),
        ),
        // strongly irreducible and proximal per the ultrametric example; d = 2
        "padic-haar3" => StepLaw::new(
            name,
            StepLawKind::PadicHaarBall {
                p: 3,
                dim: 2,
                digits: 8,
            },
            flags(true, true, true, false, false),
        ),
        _ => Err(Error::Usage(format!(
            "unknown zoo entry `{name}`; known: {}",
            ZOO.join(", ")
        ))),
    }
}
