//! Reverse triangle inequality bounds.
//!
//! Every operation here checks a theorem's hypotheses on a family
//! `x_1, ..., x_n`, reporting one signed margin (rhs minus lhs) per checked
//! inequality, and evaluates the theorem's bound constant `c` in
//! `c * sum ||x_k|| <= ||sum x_k||`.
//!
//! Hypotheses are accepted when every margin is `>= -tol`; bound constants
//! are computed without tolerance.

use std::f64::consts::SQRT_2;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{inner_product, norm, ComplexScalar, FiniteVector, OrthonormalFrame, FRAME_TOL};

/// Norm below which a vector counts as zero for theorems that divide by `||x_k||`.
pub const ZERO_NORM: f64 = 1e-12;

/// Default additive tolerance on hypothesis margins.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Theorem identifiers. The declaration order is the tie-break order used
/// when ranking certificates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Theorem {
    Dm,
    Thm1,
    Thm2,
    Cor3,
    Thm4,
    Thm5,
    Cor6,
    Thm7,
    Cor8,
    Cor9,
    Thm10,
    Thm11,
}

impl Theorem {
    pub const ALL: [Theorem; 12] = [
        Theorem::Dm,
        Theorem::Thm1,
        Theorem::Thm2,
        Theorem::Cor3,
        Theorem::Thm4,
        Theorem::Thm5,
        Theorem::Cor6,
        Theorem::Thm7,
        Theorem::Cor8,
        Theorem::Cor9,
        Theorem::Thm10,
        Theorem::Thm11,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Theorem::Dm => "dm",
            Theorem::Thm1 => "thm1",
            Theorem::Thm2 => "thm2",
            Theorem::Cor3 => "cor3",
            Theorem::Thm4 => "thm4",
            Theorem::Thm5 => "thm5",
            Theorem::Cor6 => "cor6",
            Theorem::Thm7 => "thm7",
            Theorem::Cor8 => "cor8",
            Theorem::Cor9 => "cor9",
            Theorem::Thm10 => "thm10",
            Theorem::Thm11 => "thm11",
        }
    }

    /// Theorems stated over an orthonormal frame `a_1, ..., a_m`; the rest use a single unit `a`.
    pub fn uses_frame(self) -> bool {
        matches!(self, Theorem::Thm5 | Theorem::Cor6 | Theorem::Thm7 | Theorem::Cor8)
    }

    /// Theorems whose constants divide by `||x_k||` (or whose hypothesis does).
    pub fn requires_nonzero(self) -> bool {
        !matches!(self, Theorem::Thm1 | Theorem::Thm5 | Theorem::Cor6)
    }

    pub fn is_strict(self) -> bool {
        matches!(self, Theorem::Cor9 | Theorem::Thm11)
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Theorem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Theorem::ALL
            .into_iter()
            .find(|t| t.id() == s)
            .ok_or_else(|| Error::invalid(format!("unknown theorem id {s:?}")))
    }
}

/// Hypothesis parameters, one shape per family of theorems.
#[derive(Debug, Clone, PartialEq)]
pub enum TheoremParams {
    /// `dm`: `0 <= r <= Re<x_k, a> / ||x_k||`.
    DiazMetcalf { r: f64 },
    /// `thm1`: `r1, r2 in [-1, 1]`.
    Components { r1: f64, r2: f64 },
    /// `thm2`, `cor9`: radii of the balls around `a` and `i a`.
    Radii { p1: f64, p2: f64 },
    /// `thm4`: radius of the ball around `a`.
    Radius { p: f64 },
    /// `cor3`, `cor8`: unit radii, nothing to choose.
    UnitRadii,
    /// `thm5`: per-frame-member components.
    FrameComponents { r: Vec<f64>, rho: Vec<f64> },
    /// `cor6`: real components only.
    FrameReal { r: Vec<f64> },
    /// `thm7`: per-frame-member radii around `a_t` and `i a_t`.
    FrameRadii { p: Vec<f64>, q: Vec<f64> },
    /// `thm10`, `thm11`: `M >= m > 0`, `L >= l > 0`.
    Sector { m: f64, big_m: f64, ell: f64, big_l: f64 },
}

impl TheoremParams {
    /// Whether this parameter shape is the one `theorem` takes.
    pub fn fits(&self, theorem: Theorem) -> bool {
        use Theorem::*;
        use TheoremParams as P;
        matches!(
            (theorem, self),
            (Dm, P::DiazMetcalf { .. })
                | (Thm1, P::Components { .. })
                | (Thm2 | Cor9, P::Radii { .. })
                | (Thm4, P::Radius { .. })
                | (Cor3 | Cor8, P::UnitRadii)
                | (Thm5, P::FrameComponents { .. })
                | (Cor6, P::FrameReal { .. })
                | (Thm7, P::FrameRadii { .. })
                | (Thm10 | Thm11, P::Sector { .. })
        )
    }

    /// Number of frame members the parameters are sized for, if they carry lists.
    pub fn frame_len(&self) -> Option<usize> {
        match self {
            TheoremParams::FrameComponents { r, .. } | TheoremParams::FrameReal { r } => Some(r.len()),
            TheoremParams::FrameRadii { p, .. } => Some(p.len()),
            _ => None,
        }
    }
}

/// The `x_1, ..., x_n` of a theorem: `n >= 1` vectors of a common dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorFamily {
    vectors: Vec<FiniteVector>,
}

impl VectorFamily {
    pub fn new(vectors: Vec<FiniteVector>) -> Result<Self> {
        let first = vectors.first().ok_or(Error::Empty("vector family needs n >= 1"))?;
        for v in &vectors {
            if v.dim() != first.dim() {
                return Err(Error::DimensionMismatch { expected: first.dim(), found: v.dim() });
            }
        }
        Ok(VectorFamily { vectors })
    }

    pub fn vectors(&self) -> &[FiniteVector] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.vectors[0].dim()
    }

    pub fn norms(&self) -> Vec<f64> {
        self.vectors.iter().map(norm).collect()
    }

    pub fn sum(&self) -> FiniteVector {
        let mut acc = FiniteVector::zeros(self.dim());
        for v in &self.vectors {
            acc = &acc + v;
        }
        acc
    }

    pub fn sum_of_norms(&self) -> f64 {
        self.vectors.iter().map(norm).sum()
    }

    pub fn norm_of_sum(&self) -> f64 {
        norm(&self.sum())
    }

    /// `min_k ||x_k||`.
    pub fn min_norm(&self) -> f64 {
        self.vectors.iter().map(norm).fold(f64::INFINITY, f64::min)
    }

    fn require_nonzero(&self) -> Result<()> {
        for (index, v) in self.vectors.iter().enumerate() {
            let n = norm(v);
            if n < ZERO_NORM {
                return Err(Error::ZeroVector { index, norm: n });
            }
        }
        Ok(())
    }

    fn require_dim(&self, dim: usize) -> Result<()> {
        if self.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: self.dim() });
        }
        Ok(())
    }
}

/// Which inequality a margin belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Condition {
    /// `r^2 ||x|| <= Re<x, r a>`.
    RealPart,
    /// `rho^2 ||x|| <= Im<x, rho a>`.
    ImagPart,
    /// `r <= Re<x, a> / ||x||`.
    Ratio,
    /// Ball around (a multiple of) `a`.
    BallA,
    /// Ball around (a multiple of) `i a`.
    BallIA,
}

impl Condition {
    pub fn id(self) -> &'static str {
        match self {
            Condition::RealPart => "re",
            Condition::ImagPart => "im",
            Condition::Ratio => "ratio",
            Condition::BallA => "ball_a",
            Condition::BallIA => "ball_ia",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Margin {
    pub vector_index: usize,
    /// Frame member `t` for frame theorems, `None` for single-`a` theorems.
    pub frame_index: Option<usize>,
    pub condition: Condition,
    /// rhs - lhs; positive means strictly satisfied.
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisReport {
    pub satisfied: bool,
    pub margins: Vec<Margin>,
    pub tolerance_used: f64,
}

impl HypothesisReport {
    pub fn from_margins(margins: Vec<Margin>, tol: f64) -> Self {
        let satisfied = margins.iter().all(|m| m.margin >= -tol);
        HypothesisReport { satisfied, margins, tolerance_used: tol }
    }

    /// Smallest margin, `+inf` when nothing was checked.
    pub fn worst_margin(&self) -> f64 {
        self.margins.iter().map(|m| m.margin).fold(f64::INFINITY, f64::min)
    }

    pub fn violations(&self) -> impl Iterator<Item = &Margin> {
        self.margins.iter().filter(move |m| m.margin < -self.tolerance_used)
    }
}

/// Constants derived from the family and parameters; each theorem fills only
/// the entries it defines.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DerivedConstants {
    pub alpha: Option<f64>,
    pub alpha1: Option<f64>,
    pub alpha2: Option<f64>,
    pub alpha_t: Option<Vec<f64>>,
    pub beta_t: Option<Vec<f64>>,
    pub alpha_mm: Option<f64>,
    pub alpha_ll: Option<f64>,
}

/// Hypothesis report plus bound constant for one theorem on one family.
#[derive(Debug, Clone, PartialEq)]
pub struct Assessment {
    pub hypothesis: HypothesisReport,
    pub constants: DerivedConstants,
    pub bound: f64,
}

/// Result of a strict-variant check.
#[derive(Debug, Clone, PartialEq)]
pub struct StrictCheck {
    pub hypothesis: HypothesisReport,
    pub constants: DerivedConstants,
    /// Whether the strict inequality is guaranteed (the floor is not attained within `tol`).
    pub strict_applicable: bool,
    pub strict_bound: f64,
}

fn check_tol(tol: f64) -> Result<()> {
    if tol >= 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("tolerance must be finite and nonnegative, got {tol}")))
    }
}

fn check_finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be finite, got {v}")))
    }
}

/// `a` must match the family dimension and be unit within `max(tol, FRAME_TOL)`.
fn check_unit(xs: &VectorFamily, a: &FiniteVector, tol: f64) -> Result<()> {
    check_tol(tol)?;
    xs.require_dim(a.dim())?;
    let dev = (norm(a) - 1.0).abs();
    if dev > tol.max(FRAME_TOL) {
        return Err(Error::invalid(format!("a must be a unit vector: |norm(a) - 1| = {dev:e}")));
    }
    Ok(())
}

fn check_frame(xs: &VectorFamily, frame: &OrthonormalFrame, len: usize, what: &str, tol: f64) -> Result<()> {
    check_tol(tol)?;
    xs.require_dim(frame.dim())?;
    if len != frame.len() {
        return Err(Error::invalid(format!("{what} has length {len}, frame has {} members", frame.len())));
    }
    Ok(())
}

fn i_times(a: &FiniteVector) -> FiniteVector {
    a.scale(ComplexScalar::new(0.0, 1.0))
}

/// Margins of `r_t^2 ||x_k|| <= Re<x_k, r_t a_t>` and, when `rho` is given,
/// `rho_t^2 ||x_k|| <= Im<x_k, rho_t a_t>`; returns the margins and
/// `sqrt(sum_t r_t^2 + rho_t^2)`.
fn component_cones(
    xs: &VectorFamily,
    axes: &[FiniteVector],
    r: &[f64],
    rho: Option<&[f64]>,
    indexed: bool,
) -> Result<(Vec<Margin>, f64)> {
    let mut margins = Vec::new();
    for (k, x) in xs.vectors().iter().enumerate() {
        let nx = norm(x);
        for (t, a) in axes.iter().enumerate() {
            let ip = inner_product(x, a)?;
            let frame_index = indexed.then_some(t);
            margins.push(Margin {
                vector_index: k,
                frame_index,
                condition: Condition::RealPart,
                margin: r[t] * ip.re - r[t] * r[t] * nx,
            });
            if let Some(rho) = rho {
                margins.push(Margin {
                    vector_index: k,
                    frame_index,
                    condition: Condition::ImagPart,
                    margin: rho[t] * ip.im - rho[t] * rho[t] * nx,
                });
            }
        }
    }
    let total = (0..axes.len()).fold(0.0, |acc, t| {
        let s = rho.map_or(0.0, |rho| rho[t] * rho[t]);
        acc + (r[t] * r[t] + s)
    });
    Ok((margins, total.sqrt()))
}

/// Margins of `||x_k - a_t|| <= p_t` and `||x_k - i a_t|| <= q_t`.
fn unit_balls(xs: &VectorFamily, axes: &[FiniteVector], p: &[f64], q: Option<&[f64]>, indexed: bool) -> Vec<Margin> {
    let mut margins = Vec::new();
    let rotated: Vec<_> = axes.iter().map(i_times).collect();
    for (k, x) in xs.vectors().iter().enumerate() {
        for (t, a) in axes.iter().enumerate() {
            let frame_index = indexed.then_some(t);
            margins.push(Margin {
                vector_index: k,
                frame_index,
                condition: Condition::BallA,
                margin: p[t] - norm(&(x - a)),
            });
            if let Some(q) = q {
                margins.push(Margin {
                    vector_index: k,
                    frame_index,
                    condition: Condition::BallIA,
                    margin: q[t] - norm(&(x - &rotated[t])),
                });
            }
        }
    }
    margins
}

/// Diaz-Metcalf: `r <= Re<x_k, a> / ||x_k||` for all `k` gives bound `r`.
pub fn dm_certificate(xs: &VectorFamily, a: &FiniteVector, r: f64, tol: f64) -> Result<Assessment> {
    check_unit(xs, a, tol)?;
    check_finite("r", r)?;
    if r < 0.0 {
        return Err(Error::invalid(format!("r must be nonnegative, got {r}")));
    }
    xs.require_nonzero()?;
    let mut margins = Vec::with_capacity(xs.len());
    for (k, x) in xs.vectors().iter().enumerate() {
        let ip = inner_product(x, a)?;
        margins.push(Margin {
            vector_index: k,
            frame_index: None,
            condition: Condition::Ratio,
            margin: ip.re / norm(x) - r,
        });
    }
    Ok(Assessment {
        hypothesis: HypothesisReport::from_margins(margins, tol),
        constants: DerivedConstants::default(),
        bound: r,
    })
}

/// Two-component bound `sqrt(r1^2 + r2^2)` for `r1, r2 in [-1, 1]`.
pub fn thm1_certificate(xs: &VectorFamily, a: &FiniteVector, r1: f64, r2: f64, tol: f64) -> Result<Assessment> {
    check_unit(xs, a, tol)?;
    for (name, v) in [("r1", r1), ("r2", r2)] {
        check_finite(name, v)?;
        if !(-1.0..=1.0).contains(&v) {
            return Err(Error::invalid(format!("{name} must lie in [-1, 1], got {v}")));
        }
    }
    let (margins, bound) = component_cones(xs, std::slice::from_ref(a), &[r1], Some(&[r2]), false)?;
    Ok(Assessment {
        hypothesis: HypothesisReport::from_margins(margins, tol),
        constants: DerivedConstants::default(),
        bound,
    })
}

/// `min_k (||x_k||^2 - p^2 + 1) / (2 ||x_k||)` for `p in (0, sqrt(min_k ||x_k||^2 + 1))`.
pub fn alpha_from_radius(norms: &[f64], p: f64) -> Result<f64> {
    if norms.is_empty() {
        return Err(Error::Empty("alpha_from_radius needs at least one norm"));
    }
    check_finite("p", p)?;
    let mut min_norm = f64::INFINITY;
    for (index, &n) in norms.iter().enumerate() {
        if n.is_nan() || n < ZERO_NORM || !n.is_finite() {
            return Err(Error::ZeroVector { index, norm: n });
        }
        min_norm = min_norm.min(n);
    }
    if p <= 0.0 {
        return Err(Error::invalid(format!("p must be positive, got {p}")));
    }
    let upper = (min_norm * min_norm + 1.0).sqrt();
    if p >= upper {
        return Err(Error::invalid(format!("p = {p} must be below sqrt(alpha^2 + 1) = {upper} (alpha = {min_norm})")));
    }
    Ok(norms.iter().map(|&n| (n * n - p * p + 1.0) / (2.0 * n)).fold(f64::INFINITY, f64::min))
}

fn radii_assessment(xs: &VectorFamily, a: &FiniteVector, p1: f64, p2: f64, tol: f64) -> Result<Assessment> {
    check_unit(xs, a, tol)?;
    xs.require_nonzero()?;
    let norms = xs.norms();
    let alpha1 = alpha_from_radius(&norms, p1)?;
    let alpha2 = alpha_from_radius(&norms, p2)?;
    let margins = unit_balls(xs, std::slice::from_ref(a), &[p1], Some(&[p2]), false);
    Ok(Assessment {
        hypothesis: HypothesisReport::from_margins(margins, tol),
        constants: DerivedConstants {
            alpha: Some(xs.min_norm()),
            alpha1: Some(alpha1),
            alpha2: Some(alpha2),
            ..Default::default()
        },
        bound: (0.0 + (alpha1 * alpha1 + alpha2 * alpha2)).sqrt(),
    })
}

/// `||x_k - a|| <= p1`, `||x_k - i a|| <= p2` give bound `sqrt(alpha1^2 + alpha2^2)`.
pub fn thm2_certificate(xs: &VectorFamily, a: &FiniteVector, p1: f64, p2: f64, tol: f64) -> Result<Assessment> {
    radii_assessment(xs, a, p1, p2, tol)
}

/// Unit radii: bound `alpha / sqrt(2)` with `alpha = min_k ||x_k||`.
pub fn cor3_certificate(xs: &VectorFamily, a: &FiniteVector, tol: f64) -> Result<Assessment> {
    check_unit(xs, a, tol)?;
    xs.require_nonzero()?;
    let alpha = xs.min_norm();
    let margins = unit_balls(xs, std::slice::from_ref(a), &[1.0], Some(&[1.0]), false);
    Ok(Assessment {
        hypothesis: HypothesisReport::from_margins(margins, tol),
        constants: DerivedConstants {
            alpha: Some(alpha),
            alpha1: Some(alpha / 2.0),
            alpha2: Some(alpha / 2.0),
            ..Default::default()
        },
        bound: alpha / SQRT_2,
    })
}

/// Single ball `||x_k - a|| <= p`: bound `alpha1`. Real inputs embed with zero imaginary parts.
pub fn thm4_certificate(xs: &VectorFamily, a: &FiniteVector, p: f64, tol: f64) -> Result<Assessment> {
    check_unit(xs, a, tol)?;
    xs.require_nonzero()?;
    let alpha1 = alpha_from_radius(&xs.norms(), p)?;
    let margins = unit_balls(xs, std::slice::from_ref(a), &[p], None, false);
    Ok(Assessment {
        hypothesis: HypothesisReport::from_margins(margins, tol),
        constants: DerivedConstants { alpha: Some(xs.min_norm()), alpha1: Some(alpha1), ..Default::default() },
        bound: alpha1,
    })
}

/// Frame version of the two-component bound: `sqrt(sum_t r_t^2 + rho_t^2)`.
pub fn thm5_certificate(
    xs: &VectorFamily,
    frame: &OrthonormalFrame,
    r: &[f64],
    rho: &[f64],
    tol: f64,
) -> Result<Assessment> {
    check_frame(xs, frame, r.len(), "r", tol)?;
    check_frame(xs, frame, rho.len(), "rho", tol)?;
    for &v in r.iter().chain(rho) {
        check_finite("frame component", v)?;
    }
    let (margins, bound) = component_cones(xs, frame.members(), r, Some(rho), true)?;
    Ok(Assessment {
        hypothesis: HypothesisReport::from_margins(margins, tol),
        constants: DerivedConstants::default(),
        bound,
    })
}

/// Real-part-only frame bound `sqrt(sum_t r_t^2)`.
pub fn cor6_certificate(xs: &VectorFamily, frame: &OrthonormalFrame, r: &[f64], tol: f64) -> Result<Assessment> {
    check_frame(xs, frame, r.len(), "r", tol)?;
    for &v in r {
        check_finite("frame component", v)?;
    }
    let (margins, bound) = component_cones(xs, frame.members(), r, None, true)?;
    Ok(Assessment {
        hypothesis: HypothesisReport::from_margins(margins, tol),
        constants: DerivedConstants::default(),
        bound,
    })
}

/// Frame version of the ball bound: `sqrt(sum_t alpha_t^2 + beta_t^2)`.
pub fn thm7_certificate(
    xs: &VectorFamily,
    frame: &OrthonormalFrame,
    p: &[f64],
    q: &[f64],
    tol: f64,
) -> Result<Assessment> {
    check_frame(xs, frame, p.len(), "p", tol)?;
    check_frame(xs, frame, q.len(), "q", tol)?;
    xs.require_nonzero()?;
    let norms = xs.norms();
    let alpha_t = p.iter().map(|&pt| alpha_from_radius(&norms, pt)).collect::<Result<Vec<_>>>()?;
    let beta_t = q.iter().map(|&qt| alpha_from_radius(&norms, qt)).collect::<Result<Vec<_>>>()?;
    let total = alpha_t.iter().zip(&beta_t).fold(0.0, |acc, (a, b)| acc + (a * a + b * b));
    let margins = unit_balls(xs, frame.members(), p, Some(q), true);
    Ok(Assessment {
        hypothesis: HypothesisReport::from_margins(margins, tol),
        constants: DerivedConstants {
            alpha: Some(xs.min_norm()),
            alpha_t: Some(alpha_t),
            beta_t: Some(beta_t),
            ..Default::default()
        },
        bound: total.sqrt(),
    })
}

/// Unit radii around every `a_t` and `i a_t`: bound `(alpha / sqrt(2)) * sqrt(m)`.
pub fn cor8_certificate(xs: &VectorFamily, frame: &OrthonormalFrame, tol: f64) -> Result<Assessment> {
    let m = frame.len();
    check_frame(xs, frame, m, "frame", tol)?;
    xs.require_nonzero()?;
    let alpha = xs.min_norm();
    let ones = vec![1.0; m];
    let margins = unit_balls(xs, frame.members(), &ones, Some(&ones), true);
    Ok(Assessment {
        hypothesis: HypothesisReport::from_margins(margins, tol),
        constants: DerivedConstants {
            alpha: Some(alpha),
            alpha_t: Some(vec![alpha / 2.0; m]),
            beta_t: Some(vec![alpha / 2.0; m]),
            ..Default::default()
        },
        bound: alpha / SQRT_2 * (m as f64).sqrt(),
    })
}

/// Strict bound `sqrt(2 - p1^2 - p2^2)` for `p1, p2 in (0, 1]`, applicable
/// unless both `alpha1` and `alpha2` sit on their floors `sqrt(1 - p^2)`.
pub fn cor9_strict_check(xs: &VectorFamily, a: &FiniteVector, p1: f64, p2: f64, tol: f64) -> Result<StrictCheck> {
    for (name, p) in [("p1", p1), ("p2", p2)] {
        check_finite(name, p)?;
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::invalid(format!("{name} must lie in (0, 1], got {p}")));
        }
    }
    let base = radii_assessment(xs, a, p1, p2, tol)?;
    let alpha1 = base.constants.alpha1.expect("set by radii_assessment");
    let alpha2 = base.constants.alpha2.expect("set by radii_assessment");
    let strict_applicable =
        (alpha1 - (1.0 - p1 * p1).sqrt()).abs() > tol || (alpha2 - (1.0 - p2 * p2).sqrt()).abs() > tol;
    Ok(StrictCheck {
        hypothesis: base.hypothesis,
        constants: base.constants,
        strict_applicable,
        strict_bound: (2.0 - p1 * p1 - p2 * p2).sqrt(),
    })
}

/// `min_k (||x_k||^2 + lo*hi) / ((lo + hi) ||x_k||)`.
pub fn sector_constant(norms: &[f64], lo: f64, hi: f64) -> f64 {
    norms.iter().map(|&n| (n * n + lo * hi) / ((lo + hi) * n)).fold(f64::INFINITY, f64::min)
}

/// Product form `Re<hi*a - x, x - lo*a>` of the sector hypothesis; nonnegative
/// exactly when `x` lies in the ball around `((lo + hi)/2) a` of radius `(hi - lo)/2`.
pub fn sector_product_form(x: &FiniteVector, a: &FiniteVector, lo: f64, hi: f64) -> Result<f64> {
    let left = a.scale_real(hi).try_sub(x)?;
    let right = x.try_sub(&a.scale_real(lo))?;
    Ok(inner_product(&left, &right)?.re)
}

/// Ball form `(hi - lo)/2 - ||x - ((lo + hi)/2) a||` of the sector hypothesis.
pub fn sector_ball_margin(x: &FiniteVector, a: &FiniteVector, lo: f64, hi: f64) -> Result<f64> {
    let center = a.scale_real((lo + hi) / 2.0);
    Ok((hi - lo) / 2.0 - norm(&x.try_sub(&center)?))
}

fn check_sector(m: f64, big_m: f64, ell: f64, big_l: f64) -> Result<()> {
    for (name, v) in [("m", m), ("M", big_m), ("ell", ell), ("L", big_l)] {
        check_finite(name, v)?;
    }
    if !(m > 0.0 && big_m >= m) {
        return Err(Error::invalid(format!("need M >= m > 0, got m = {m}, M = {big_m}")));
    }
    if !(ell > 0.0 && big_l >= ell) {
        return Err(Error::invalid(format!("need L >= ell > 0, got ell = {ell}, L = {big_l}")));
    }
    Ok(())
}

/// Sector hypotheses (balls around `((m+M)/2) a` and `((l+L)/2) i a`) give
/// bound `sqrt(alpha_mM^2 + alpha_lL^2)`.
pub fn thm10_certificate(
    xs: &VectorFamily,
    a: &FiniteVector,
    m: f64,
    big_m: f64,
    ell: f64,
    big_l: f64,
    tol: f64,
) -> Result<Assessment> {
    check_unit(xs, a, tol)?;
    check_sector(m, big_m, ell, big_l)?;
    xs.require_nonzero()?;
    let ia = i_times(a);
    let mut margins = Vec::with_capacity(2 * xs.len());
    for (k, x) in xs.vectors().iter().enumerate() {
        margins.push(Margin {
            vector_index: k,
            frame_index: None,
            condition: Condition::BallA,
            margin: sector_ball_margin(x, a, m, big_m)?,
        });
        margins.push(Margin {
            vector_index: k,
            frame_index: None,
            condition: Condition::BallIA,
            margin: sector_ball_margin(x, &ia, ell, big_l)?,
        });
    }
    let norms = xs.norms();
    let alpha_mm = sector_constant(&norms, m, big_m);
    let alpha_ll = sector_constant(&norms, ell, big_l);
    Ok(Assessment {
        hypothesis: HypothesisReport::from_margins(margins, tol),
        constants: DerivedConstants {
            alpha: Some(xs.min_norm()),
            alpha_mm: Some(alpha_mm),
            alpha_ll: Some(alpha_ll),
            ..Default::default()
        },
        bound: (alpha_mm * alpha_mm + alpha_ll * alpha_ll).sqrt(),
    })
}

/// Strict sector bound `2 sqrt(mM/(m+M)^2 + lL/(l+L)^2)`, applicable unless
/// both constants sit on their AM-GM floors `2 sqrt(mM)/(m+M)`.
pub fn thm11_strict_check(
    xs: &VectorFamily,
    a: &FiniteVector,
    m: f64,
    big_m: f64,
    ell: f64,
    big_l: f64,
    tol: f64,
) -> Result<StrictCheck> {
    let base = thm10_certificate(xs, a, m, big_m, ell, big_l, tol)?;
    let alpha_mm = base.constants.alpha_mm.expect("set by thm10");
    let alpha_ll = base.constants.alpha_ll.expect("set by thm10");
    let floor_mm = 2.0 * (m * big_m).sqrt() / (m + big_m);
    let floor_ll = 2.0 * (ell * big_l).sqrt() / (ell + big_l);
    let strict_applicable = (alpha_mm - floor_mm).abs() > tol || (alpha_ll - floor_ll).abs() > tol;
    let strict_bound =
        2.0 * (m * big_m / ((m + big_m) * (m + big_m)) + ell * big_l / ((ell + big_l) * (ell + big_l))).sqrt();
    Ok(StrictCheck { hypothesis: base.hypothesis, constants: base.constants, strict_applicable, strict_bound })
}
