//! Full certificates: run a theorem on an instance, compare its bound with the
//! true ratio `||sum x_k|| / sum ||x_k||`, and decide the equality case from
//! the theorem's vector condition.

use rayon::prelude::*;

use crate::bounds::{self, Assessment, DerivedConstants, HypothesisReport, Theorem, TheoremParams, VectorFamily};
use crate::error::{Error, Result};
use crate::linalg::{norm, ComplexScalar, FiniteVector, OrthonormalFrame};

/// Sum of norms below which the ratio is reported as undefined.
pub const RATIO_FLOOR: f64 = 1e-15;

/// A theorem with its parameters, the frame (`{a}` for single-vector
/// theorems) and the family it is evaluated on.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub theorem: Theorem,
    pub params: TheoremParams,
    pub frame: OrthonormalFrame,
    pub family: VectorFamily,
}

impl Instance {
    pub fn evaluate(&self, tol: f64) -> Result<BoundCertificate> {
        evaluate(&self.family, &self.frame, &self.params, self.theorem, tol)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Certified,
    HypothesesUnsatisfied,
    /// Hypotheses hold but the inequality fails beyond tolerance.
    SoundnessViolation,
}

impl Status {
    pub fn id(self) -> &'static str {
        match self {
            Status::Certified => "certified",
            Status::HypothesesUnsatisfied => "hypotheses-unsatisfied",
            Status::SoundnessViolation => "soundness-violation",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundCertificate {
    pub theorem: Theorem,
    pub params: TheoremParams,
    pub hypothesis: HypothesisReport,
    pub constants: DerivedConstants,
    /// The bound constant; for strict theorems, the strict bound.
    pub bound: f64,
    pub sum_of_norms: f64,
    pub norm_of_sum: f64,
    /// `None` when `sum_of_norms < RATIO_FLOOR`.
    pub ratio: Option<f64>,
    pub inequality_holds: bool,
    pub equality_case: bool,
    /// Norm of `sum x_k` minus the theorem's equality target; `None` for strict theorems.
    pub equality_residual: Option<f64>,
    /// `Some` only for strict theorems.
    pub strict_applicable: Option<bool>,
    pub tolerance: f64,
}

impl BoundCertificate {
    pub fn status(&self) -> Status {
        match (self.hypothesis.satisfied, self.inequality_holds) {
            (false, _) => Status::HypothesesUnsatisfied,
            (true, true) => Status::Certified,
            (true, false) => Status::SoundnessViolation,
        }
    }
}

/// `||sum x_k|| / sum ||x_k||`, or `None` when the denominator vanishes.
pub fn true_ratio(xs: &VectorFamily) -> Option<f64> {
    let denom = xs.sum_of_norms();
    (denom >= RATIO_FLOOR).then(|| xs.norm_of_sum() / denom)
}

fn params_mismatch(theorem: Theorem, params: &TheoremParams) -> Error {
    Error::invalid(format!("parameters {params:?} do not fit theorem {theorem}"))
}

/// Evaluates `theorem` on `xs` and fills every certificate field.
pub fn evaluate(
    xs: &VectorFamily,
    frame: &OrthonormalFrame,
    params: &TheoremParams,
    theorem: Theorem,
    tol: f64,
) -> Result<BoundCertificate> {
    evaluate_with_bound_scale(xs, frame, params, theorem, tol, 1.0)
}

/// [`evaluate`] with the bound multiplied by `bound_scale` before the
/// inequality check. Only for fault injection; `1.0` is the real evaluator.
#[doc(hidden)]
pub fn evaluate_with_bound_scale(
    xs: &VectorFamily,
    frame: &OrthonormalFrame,
    params: &TheoremParams,
    theorem: Theorem,
    tol: f64,
    bound_scale: f64,
) -> Result<BoundCertificate> {
    if !params.fits(theorem) {
        return Err(params_mismatch(theorem, params));
    }
    let single = || -> Result<&FiniteVector> {
        if frame.len() != 1 {
            return Err(Error::invalid(format!(
                "theorem {theorem} uses a single unit vector a, frame has {} members",
                frame.len()
            )));
        }
        Ok(&frame.members()[0])
    };

    let mut strict_applicable = None;
    let Assessment { hypothesis, constants, bound } = match (theorem, params) {
        (Theorem::Dm, TheoremParams::DiazMetcalf { r }) => bounds::dm_certificate(xs, single()?, *r, tol)?,
        (Theorem::Thm1, TheoremParams::Components { r1, r2 }) => {
            bounds::thm1_certificate(xs, single()?, *r1, *r2, tol)?
        }
        (Theorem::Thm2, TheoremParams::Radii { p1, p2 }) => bounds::thm2_certificate(xs, single()?, *p1, *p2, tol)?,
        (Theorem::Cor3, TheoremParams::UnitRadii) => bounds::cor3_certificate(xs, single()?, tol)?,
        (Theorem::Thm4, TheoremParams::Radius { p }) => bounds::thm4_certificate(xs, single()?, *p, tol)?,
        (Theorem::Thm5, TheoremParams::FrameComponents { r, rho }) => bounds::thm5_certificate(xs, frame, r, rho, tol)?,
        (Theorem::Cor6, TheoremParams::FrameReal { r }) => bounds::cor6_certificate(xs, frame, r, tol)?,
        (Theorem::Thm7, TheoremParams::FrameRadii { p, q }) => bounds::thm7_certificate(xs, frame, p, q, tol)?,
        (Theorem::Cor8, TheoremParams::UnitRadii) => bounds::cor8_certificate(xs, frame, tol)?,
        (Theorem::Cor9, TheoremParams::Radii { p1, p2 }) => {
            let s = bounds::cor9_strict_check(xs, single()?, *p1, *p2, tol)?;
            strict_applicable = Some(s.strict_applicable);
            Assessment { hypothesis: s.hypothesis, constants: s.constants, bound: s.strict_bound }
        }
        (Theorem::Thm10, TheoremParams::Sector { m, big_m, ell, big_l }) => {
            bounds::thm10_certificate(xs, single()?, *m, *big_m, *ell, *big_l, tol)?
        }
        (Theorem::Thm11, TheoremParams::Sector { m, big_m, ell, big_l }) => {
            let s = bounds::thm11_strict_check(xs, single()?, *m, *big_m, *ell, *big_l, tol)?;
            strict_applicable = Some(s.strict_applicable);
            Assessment { hypothesis: s.hypothesis, constants: s.constants, bound: s.strict_bound }
        }
        _ => return Err(params_mismatch(theorem, params)),
    };
    let bound = bound * bound_scale;

    let sum = xs.sum();
    let sum_of_norms = xs.sum_of_norms();
    let norm_of_sum = norm(&sum);
    let ratio = (sum_of_norms >= RATIO_FLOOR).then(|| norm_of_sum / sum_of_norms);
    let inequality_holds = bound * sum_of_norms <= norm_of_sum + tol * sum_of_norms.max(1.0);

    let equality_residual = equality_direction(theorem, params, &constants, frame)
        .map(|direction| norm(&(&sum - &direction.scale_real(sum_of_norms))));
    let equality_case = hypothesis.satisfied && equality_residual.is_some_and(|res| res <= tol * sum_of_norms);

    Ok(BoundCertificate {
        theorem,
        params: params.clone(),
        hypothesis,
        constants,
        bound,
        sum_of_norms,
        norm_of_sum,
        ratio,
        inequality_holds,
        equality_case,
        equality_residual,
        strict_applicable,
        tolerance: tol,
    })
}

/// The vector `u` in the equality condition `sum x_k = (sum ||x_k||) u`;
/// `None` for the strict theorems, which have no equality case.
fn equality_direction(
    theorem: Theorem,
    params: &TheoremParams,
    constants: &DerivedConstants,
    frame: &OrthonormalFrame,
) -> Option<FiniteVector> {
    let members = frame.members();
    let combine = |coeffs: &mut dyn Iterator<Item = ComplexScalar>| {
        let mut acc = FiniteVector::zeros(frame.dim());
        for (c, a) in coeffs.zip(members) {
            acc = &acc + &a.scale(c);
        }
        acc
    };
    let cplx = ComplexScalar::new;
    let half_alpha = |c: &DerivedConstants| c.alpha.unwrap_or(0.0) / 2.0;
    let dir = match (theorem, params) {
        (Theorem::Dm, TheoremParams::DiazMetcalf { r }) => members[0].scale_real(*r),
        (Theorem::Thm1, TheoremParams::Components { r1, r2 }) => members[0].scale(cplx(*r1, *r2)),
        (Theorem::Thm2, _) => members[0].scale(cplx(constants.alpha1?, constants.alpha2?)),
        (Theorem::Cor3, _) => members[0].scale(cplx(half_alpha(constants), half_alpha(constants))),
        (Theorem::Thm4, _) => members[0].scale_real(constants.alpha1?),
        (Theorem::Thm5, TheoremParams::FrameComponents { r, rho }) => {
            combine(&mut r.iter().zip(rho).map(|(&a, &b)| cplx(a, b)))
        }
        (Theorem::Cor6, TheoremParams::FrameReal { r }) => combine(&mut r.iter().map(|&a| cplx(a, 0.0))),
        (Theorem::Thm7, _) => {
            let (al, be) = (constants.alpha_t.as_ref()?, constants.beta_t.as_ref()?);
            combine(&mut al.iter().zip(be).map(|(&a, &b)| cplx(a, b)))
        }
        (Theorem::Cor8, _) => {
            let h = half_alpha(constants);
            combine(&mut std::iter::repeat(cplx(h, h)))
        }
        (Theorem::Thm10, _) => members[0].scale(cplx(constants.alpha_mm?, constants.alpha_ll?)),
        _ => return None,
    };
    Some(dir)
}

/// One entry of a tightness scan grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridEntry {
    pub theorem: Theorem,
    pub params: TheoremParams,
}

/// Evaluates every grid entry, keeps those whose hypotheses hold, and ranks
/// them by descending bound, ties broken by theorem order. Entries that fail
/// to evaluate (wrong arity, parameter out of range) are not applicable.
pub fn tightness_scan(
    xs: &VectorFamily,
    frame: &OrthonormalFrame,
    grid: &[GridEntry],
    tol: f64,
) -> Vec<BoundCertificate> {
    tightness_scan_with_bound_scale(xs, frame, grid, tol, 1.0)
}

/// [`tightness_scan`] over [`evaluate_with_bound_scale`].
#[doc(hidden)]
pub fn tightness_scan_with_bound_scale(
    xs: &VectorFamily,
    frame: &OrthonormalFrame,
    grid: &[GridEntry],
    tol: f64,
    bound_scale: f64,
) -> Vec<BoundCertificate> {
    let mut certs: Vec<BoundCertificate> = grid
        .par_iter()
        .filter_map(|entry| evaluate_with_bound_scale(xs, frame, &entry.params, entry.theorem, tol, bound_scale).ok())
        .filter(|c| c.hypothesis.satisfied)
        .collect();
    certs.sort_by(|a, b| b.bound.total_cmp(&a.bound).then(a.theorem.cmp(&b.theorem)));
    certs
}

/// `alpha (1 + i) / 2` scaled onto `sum_t a_t`; used by the equality constructors.
pub(crate) fn unit_radii_direction(alpha: f64, frame: &OrthonormalFrame) -> FiniteVector {
    let mut acc = FiniteVector::zeros(frame.dim());
    let c = ComplexScalar::new(alpha / 2.0, alpha / 2.0);
    for a in frame.members() {
        acc = &acc + &a.scale(c);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn family(vs: &[&[(f64, f64)]]) -> VectorFamily {
        VectorFamily::new(vs.iter().map(|v| FiniteVector::from_pairs(v).unwrap()).collect()).unwrap()
    }

    fn unit_frame() -> OrthonormalFrame {
        OrthonormalFrame::single(FiniteVector::from_real(&[1.0]).unwrap(), 0.0).unwrap()
    }

    #[test]
    fn true_ratio_examples() {
        let xs = family(&[&[(1.0, 1.0)], &[(2.0, 2.0)]]);
        assert!((true_ratio(&xs).unwrap() - 1.0).abs() < 1e-15);
        let xs = family(&[&[(1.0, -2.0)], &[(-1.0, 2.0)]]);
        assert_eq!(true_ratio(&xs), Some(0.0));
        let xs = family(&[&[(1.0, 0.0), (0.0, 0.0)], &[(0.6, 0.0), (0.8, 0.0)]]);
        assert!((true_ratio(&xs).unwrap() - 3.2f64.sqrt() / 2.0).abs() < 1e-15);
        let zeros = family(&[&[(0.0, 0.0)]]);
        assert_eq!(true_ratio(&zeros), None);
    }

    #[test]
    fn thm1_equality_instance() {
        let xs = family(&[&[(0.6, 0.8)], &[(1.2, 1.6)], &[(1.8, 2.4)]]);
        let cert =
            evaluate(&xs, &unit_frame(), &TheoremParams::Components { r1: 0.6, r2: 0.8 }, Theorem::Thm1, 1e-9).unwrap();
        assert_eq!(cert.status(), Status::Certified);
        assert!(cert.equality_case);
        assert!((cert.ratio.unwrap() - cert.bound).abs() <= 1e-9);
    }

    #[test]
    fn opposite_vectors_zero_bound() {
        let xs = family(&[&[(0.3, 0.4)], &[(-0.3, -0.4)]]);
        let cert =
            evaluate(&xs, &unit_frame(), &TheoremParams::Components { r1: 0.0, r2: 0.0 }, Theorem::Thm1, 1e-9).unwrap();
        assert_eq!(cert.bound, 0.0);
        assert_eq!(cert.ratio, Some(0.0));
        assert!(cert.inequality_holds);
        assert!(cert.equality_case);
    }

    #[test]
    fn all_zero_family_has_undefined_ratio() {
        let xs = family(&[&[(0.0, 0.0)], &[(0.0, 0.0)]]);
        let cert =
            evaluate(&xs, &unit_frame(), &TheoremParams::Components { r1: 0.5, r2: 0.1 }, Theorem::Thm1, 1e-9).unwrap();
        assert_eq!(cert.ratio, None);
        assert_eq!(cert.status(), Status::Certified);
    }

    #[test]
    fn thm2_certificate_values() {
        let xs = family(&[&[(H, H)], &[(1.2 * H, 1.2 * H)]]);
        let cert =
            evaluate(&xs, &unit_frame(), &TheoremParams::Radii { p1: 0.9, p2: 0.9 }, Theorem::Thm2, 1e-9).unwrap();
        assert!((cert.bound - 0.595 * 2f64.sqrt()).abs() < 1e-15);
        assert!((cert.bound - 0.8414).abs() < 1e-4);
        assert!((cert.ratio.unwrap() - 1.0).abs() < 1e-15);
        assert!(!cert.equality_case);
        assert_eq!(cert.status(), Status::Certified);
        assert_eq!(cert.strict_applicable, None);
    }

    #[test]
    fn mismatched_params_and_arity() {
        let xs = family(&[&[(1.0, 0.0)]]);
        assert!(evaluate(&xs, &unit_frame(), &TheoremParams::Radius { p: 0.5 }, Theorem::Thm2, 1e-9).is_err());
        let frame2 = OrthonormalFrame::standard(2, 2).unwrap();
        let xs2 = family(&[&[(1.0, 0.0), (0.0, 0.0)]]);
        assert!(evaluate(&xs2, &frame2, &TheoremParams::Radius { p: 0.5 }, Theorem::Thm4, 1e-9).is_err());
    }

    #[test]
    fn injected_scale_surfaces_violation() {
        let xs = family(&[&[(0.6, 0.8)]]);
        let cert = evaluate_with_bound_scale(
            &xs,
            &unit_frame(),
            &TheoremParams::Components { r1: 0.6, r2: 0.8 },
            Theorem::Thm1,
            1e-9,
            2.0,
        )
        .unwrap();
        assert_eq!(cert.status(), Status::SoundnessViolation);
    }

    #[test]
    fn scan_ranks_thm2_above_cor9() {
        let xs = family(&[&[(H, H)]]);
        let grid = vec![
            GridEntry { theorem: Theorem::Cor9, params: TheoremParams::Radii { p1: 0.8, p2: 0.8 } },
            GridEntry { theorem: Theorem::Thm2, params: TheoremParams::Radii { p1: 0.8, p2: 0.8 } },
        ];
        let ranked = tightness_scan(&xs, &unit_frame(), &grid, 1e-9);
        assert_eq!(ranked.len(), 2);
        assert_eq!(ranked[0].theorem, Theorem::Thm2);
        assert!((ranked[0].bound - 0.68 * 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(ranked[1].theorem, Theorem::Cor9);
        assert!((ranked[1].bound - 0.72f64.sqrt()).abs() < 1e-12);
        assert_eq!(ranked[1].strict_applicable, Some(true));
    }

    #[test]
    fn scan_edge_cases() {
        let xs = family(&[&[(H, H)]]);
        let infeasible = vec![GridEntry { theorem: Theorem::Thm2, params: TheoremParams::Radii { p1: 0.1, p2: 0.1 } }];
        assert!(tightness_scan(&xs, &unit_frame(), &infeasible, 1e-9).is_empty());

        let single = vec![GridEntry { theorem: Theorem::Cor3, params: TheoremParams::UnitRadii }];
        let ranked = tightness_scan(&xs, &unit_frame(), &single, 1e-9);
        let direct = evaluate(&xs, &unit_frame(), &TheoremParams::UnitRadii, Theorem::Cor3, 1e-9).unwrap();
        assert_eq!(ranked, vec![direct]);
    }

    #[test]
    fn ties_break_by_theorem_order() {
        let xs = family(&[&[(H, H)]]);
        let grid = vec![
            GridEntry { theorem: Theorem::Cor3, params: TheoremParams::UnitRadii },
            GridEntry { theorem: Theorem::Cor8, params: TheoremParams::UnitRadii },
        ];
        let ranked = tightness_scan(&xs, &unit_frame(), &grid, 1e-9);
        assert_eq!(ranked[0].bound, ranked[1].bound);
        assert_eq!(ranked[0].theorem, Theorem::Cor3);
    }
}
