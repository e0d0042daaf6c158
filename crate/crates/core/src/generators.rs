//! Test-input generation: families drawn inside a theorem's hypothesis set,
//! families attaining a theorem's equality case, and a seeded falsification
//! fuzzer.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::bounds::{Theorem, TheoremParams, VectorFamily, ZERO_NORM};
use crate::certify::{self, unit_radii_direction, BoundCertificate, Instance, Status};
use crate::error::{Error, Result};
use crate::linalg::{
    gaussian_vector, norm, random_frame, scaled_ball_point, ComplexScalar, FiniteVector, OrthonormalFrame,
};

/// Proposals per vector before rejection sampling gives up.
pub const SAMPLING_CAP: usize = 10_000;

/// Largest frame drawn by the fuzzer.
pub const FUZZ_MAX_FRAME: usize = 4;

/// Violations kept in full detail by [`fuzz_falsify`]; all are counted.
pub const MAX_RECORDED_VIOLATIONS: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport {
    pub feasible: bool,
    pub reason: String,
    /// A point satisfying every constraint, when one was found.
    pub witness: Option<FiniteVector>,
}

impl FeasibilityReport {
    fn infeasible(reason: impl Into<String>) -> Self {
        FeasibilityReport { feasible: false, reason: reason.into(), witness: None }
    }
}

/// Outcome of a generator: a family, or the reason none could be produced.
#[derive(Debug, Clone, PartialEq)]
pub enum Generated {
    Family(VectorFamily),
    Infeasible(FeasibilityReport),
}

impl Generated {
    pub fn family(self) -> Option<VectorFamily> {
        match self {
            Generated::Family(f) => Some(f),
            Generated::Infeasible(_) => None,
        }
    }
}

/// `||x - c u|| <= r` with `u = a_t` or `u = i a_t` and `c > 0`.
///
/// Writing `z_t = <x, a_t>` and `N = ||x||^2`, it is the half-plane
/// `Re z_t >= (N + c^2 - r^2) / (2c)` (`Im z_t` for `i a_t`), which makes
/// every ball hypothesis a set of component lower bounds indexed by `N`.
#[derive(Debug, Clone, Copy)]
struct AxisBall {
    member: usize,
    imag: bool,
    center: f64,
    radius: f64,
}

impl AxisBall {
    fn lower(&self, n_sq: f64) -> f64 {
        (n_sq + self.center * self.center - self.radius * self.radius) / (2.0 * self.center)
    }
}

/// Geometric shape of a hypothesis set for one vector.
#[derive(Debug, Clone)]
enum Region {
    /// `Re<x, u_i> >= cos_i ||x||` with real-orthonormal axes `u_i`.
    Cones { axes: Vec<(FiniteVector, f64)> },
    /// Intersection of balls, with `||x|| > floor`.
    Balls { balls: Vec<AxisBall>, floor: f64 },
}

fn i_times(a: &FiniteVector) -> FiniteVector {
    a.scale(ComplexScalar::new(0.0, 1.0))
}

fn signed_axis(a: &FiniteVector, coeff: f64) -> Option<(FiniteVector, f64)> {
    (coeff != 0.0).then(|| (a.scale_real(coeff.signum()), coeff.abs()))
}

fn frame_of(theorem: Theorem, frame: &OrthonormalFrame) -> Result<&[FiniteVector]> {
    if !theorem.uses_frame() && frame.len() != 1 {
        return Err(Error::invalid(format!("theorem {theorem} needs a single-member frame, got {}", frame.len())));
    }
    Ok(frame.members())
}

fn region_for(theorem: Theorem, params: &TheoremParams, frame: &OrthonormalFrame) -> Result<Region> {
    if !params.fits(theorem) {
        return Err(Error::invalid(format!("parameters {params:?} do not fit theorem {theorem}")));
    }
    if let Some(len) = params.frame_len() {
        if len != frame.len() {
            return Err(Error::invalid(format!("parameter lists have length {len}, frame has {}", frame.len())));
        }
    }
    let members = frame_of(theorem, frame)?;
    let a = &members[0];
    let cones = |pairs: Vec<(FiniteVector, f64)>| Region::Cones {
        axes: pairs.into_iter().filter_map(|(u, c)| signed_axis(&u, c)).collect(),
    };
    let ball = |member, imag, center, radius| AxisBall { member, imag, center, radius };
    let unit_balls = |p: &[f64], q: &[f64]| {
        (0..p.len()).flat_map(|t| [ball(t, false, 1.0, p[t]), ball(t, true, 1.0, q[t])]).collect::<Vec<_>>()
    };
    // alpha_from_radius needs p < sqrt(||x||^2 + 1) for every radius.
    let radius_floor = |ps: &[f64]| {
        let worst = ps.iter().fold(0.0_f64, |m, &p| m.max(p));
        (worst * worst - 1.0).max(0.0).sqrt()
    };
    let region = match params {
        TheoremParams::DiazMetcalf { r } => {
            if !(r.is_finite() && *r >= 0.0) {
                return Err(Error::invalid(format!("r must be nonnegative, got {r}")));
            }
            Region::Cones { axes: vec![(a.clone(), *r)] }
        }
        TheoremParams::Components { r1, r2 } => {
            for v in [r1, r2] {
                if !(-1.0..=1.0).contains(v) {
                    return Err(Error::invalid(format!("components must lie in [-1, 1], got {v}")));
                }
            }
            cones(vec![(a.clone(), *r1), (i_times(a), *r2)])
        }
        TheoremParams::FrameComponents { r, rho } => {
            if rho.len() != r.len() {
                return Err(Error::invalid("r and rho must have equal length"));
            }
            cones(members.iter().enumerate().flat_map(|(t, at)| [(at.clone(), r[t]), (i_times(at), rho[t])]).collect())
        }
        TheoremParams::FrameReal { r } => cones(members.iter().cloned().zip(r.iter().copied()).collect()),
        TheoremParams::Radii { p1, p2 } => {
            Region::Balls { balls: unit_balls(&[*p1], &[*p2]), floor: radius_floor(&[*p1, *p2]) }
        }
        TheoremParams::Radius { p } => {
            Region::Balls { balls: vec![ball(0, false, 1.0, *p)], floor: radius_floor(&[*p]) }
        }
        TheoremParams::UnitRadii => {
            let ones = vec![1.0; members.len()];
            Region::Balls { balls: unit_balls(&ones, &ones), floor: 0.0 }
        }
        TheoremParams::FrameRadii { p, q } => {
            if q.len() != p.len() {
                return Err(Error::invalid("p and q must have equal length"));
            }
            let floor = radius_floor(&[p.as_slice(), q.as_slice()].concat());
            Region::Balls { balls: unit_balls(p, q), floor }
        }
        TheoremParams::Sector { m, big_m, ell, big_l } => {
            if !(*m > 0.0 && big_m >= m && *ell > 0.0 && big_l >= ell && big_m.is_finite() && big_l.is_finite()) {
                return Err(Error::invalid(format!(
                    "need M >= m > 0 and L >= ell > 0, got {m}, {big_m}, {ell}, {big_l}"
                )));
            }
            Region::Balls {
                balls: vec![
                    ball(0, false, (m + big_m) / 2.0, (big_m - m) / 2.0),
                    ball(0, true, (ell + big_l) / 2.0, (big_l - ell) / 2.0),
                ],
                floor: 0.0,
            }
        }
    };
    if let Region::Balls { balls, .. } = &region {
        if let Some(bad) = balls.iter().find(|b| !(b.radius.is_finite() && b.radius >= 0.0)) {
            return Err(Error::invalid(format!("radius must be finite and nonnegative, got {}", bad.radius)));
        }
    }
    Ok(region)
}

/// Per-component lower bounds on `(Re z_0, Im z_0, Re z_1, ...)` at `||x||^2 = n_sq`;
/// `-inf` where a component is unconstrained.
fn component_bounds(balls: &[AxisBall], members: usize, n_sq: f64) -> Vec<f64> {
    let mut lower = vec![f64::NEG_INFINITY; 2 * members];
    for b in balls {
        let j = 2 * b.member + usize::from(b.imag);
        lower[j] = lower[j].max(b.lower(n_sq));
    }
    lower
}

/// `n_sq` minus the least `sum |z_t|^2` the bounds allow; the ball
/// intersection contains a vector of squared norm `n_sq` iff this is `>= 0`.
/// Concave in `n_sq`.
fn norm_slack(balls: &[AxisBall], members: usize, n_sq: f64) -> f64 {
    n_sq - component_bounds(balls, members, n_sq).iter().map(|l| l.max(0.0).powi(2)).sum::<f64>()
}

/// Interval of admissible `||x||^2`, or the largest (negative) slack.
fn admissible_norms(balls: &[AxisBall], members: usize, floor: f64) -> std::result::Result<(f64, f64), f64> {
    let slack = |n: f64| norm_slack(balls, members, n);
    let lo0 = (floor * floor).max(ZERO_NORM * ZERO_NORM);
    // Walk right until the slack is negative and falling, i.e. past its peak.
    let mut hi0 = (2.0 * lo0).max(1.0);
    while hi0 < 1e30 && !(slack(hi0) < 0.0 && slack(hi0) < slack(hi0 / 2.0)) {
        hi0 *= 2.0;
    }
    let (mut a, mut b) = (lo0, hi0);
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..200 {
        let c = b - ratio * (b - a);
        let d = a + ratio * (b - a);
        if slack(c) < slack(d) {
            a = c;
        } else {
            b = d;
        }
    }
    let peak = 0.5 * (a + b);
    let best = slack(peak).max(slack(lo0));
    if best < 0.0 {
        return Err(best);
    }
    let peak = if slack(lo0) >= slack(peak) { lo0 } else { peak };
    let root = |mut inside: f64, mut outside: f64| {
        for _ in 0..200 {
            let mid = 0.5 * (inside + outside);
            if slack(mid) >= 0.0 {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        inside
    };
    let lo = if slack(lo0) >= 0.0 { lo0 } else { root(peak, lo0) };
    Ok((lo, root(peak, hi0)))
}

/// Proposal generator over a region.
enum Proposer {
    Free,
    Cone { center: FiniteVector, radius: f64 },
    Ball { balls: Vec<AxisBall>, frame: OrthonormalFrame, norms_sq: (f64, f64) },
}

impl Proposer {
    fn new(region: &Region, frame: &OrthonormalFrame) -> std::result::Result<Self, String> {
        match region {
            Region::Cones { axes } => {
                let c2: f64 = axes.iter().map(|(_, c)| c * c).sum();
                if c2 > 1.0 + 1e-12 {
                    return Err(format!("cone intersection is empty: squared components sum to {c2} > 1"));
                }
                if axes.is_empty() || c2 == 0.0 {
                    return Ok(Proposer::Free);
                }
                let c = c2.sqrt();
                let mut center = FiniteVector::zeros(frame.dim());
                for (u, cos) in axes {
                    center = &center + &u.scale_real(cos / c);
                }
                let center = center.scale_real(1.0 / norm(&center));
                // Largest ball around the unit center that stays inside every cone.
                let radius = axes
                    .iter()
                    .filter(|(_, cos)| *cos > 0.0)
                    .map(|(_, cos)| cos * (1.0 / c - 1.0) / (1.0 + cos))
                    .fold(f64::INFINITY, f64::min)
                    .max(0.0);
                Ok(Proposer::Cone { center, radius })
            }
            Region::Balls { balls, floor } => match admissible_norms(balls, frame.len(), *floor) {
                Ok(norms_sq) => Ok(Proposer::Ball { balls: balls.clone(), frame: frame.clone(), norms_sq }),
                Err(best) => Err(format!(
                    "ball intersection is empty: no squared norm above {:e} admits the component bounds (best slack {best:e})",
                    floor * floor
                )),
            },
        }
    }

    fn propose<R: Rng>(&self, dim: usize, rng: &mut R) -> FiniteVector {
        match self {
            Proposer::Free => gaussian_vector(dim, rng),
            Proposer::Cone { center, radius } => {
                let frac: f64 = rng.random();
                let y = scaled_ball_point(center, *radius, frac, rng);
                y.scale_real(rng.random_range(-1.5_f64..1.5).exp())
            }
            Proposer::Ball { balls, frame, norms_sq } => {
                let n_sq = uniform_in(rng, norms_sq.0, norms_sq.1);
                ball_point(balls, frame, n_sq, rng)
            }
        }
    }
}

/// A vector of squared norm `n_sq` meeting the component bounds: the
/// smallest admissible components, pushed outward along a random direction,
/// plus a random part orthogonal to the frame carrying the remaining norm.
fn ball_point<R: Rng>(balls: &[AxisBall], frame: &OrthonormalFrame, n_sq: f64, rng: &mut R) -> FiniteVector {
    let lower = component_bounds(balls, frame.len(), n_sq);
    let base: Vec<f64> = lower.iter().map(|l| l.max(0.0)).collect();
    let base_sq: f64 = base.iter().map(|v| v * v).sum();
    let spare = (n_sq - base_sq).max(0.0);
    let has_complement = frame.len() < frame.dim();
    let in_frame = if has_complement { base_sq + spare * rng.random::<f64>() } else { n_sq };
    let dir: Vec<f64> = lower
        .iter()
        .map(|l| {
            let g: f64 = rng.sample(StandardNormal);
            if l.is_finite() {
                g.abs()
            } else {
                g
            }
        })
        .collect();
    let qa: f64 = dir.iter().map(|g| g * g).sum();
    let qb: f64 = dir.iter().zip(&base).map(|(g, v)| g * v).sum();
    let qc = base_sq - in_frame;
    let step = if qa > 0.0 { (-qb + (qb * qb - qa * qc).max(0.0).sqrt()) / qa } else { 0.0 };
    let mut x = FiniteVector::zeros(frame.dim());
    for (t, a) in frame.members().iter().enumerate() {
        let z = ComplexScalar::new(base[2 * t] + step * dir[2 * t], base[2 * t + 1] + step * dir[2 * t + 1]);
        x = &x + &a.scale(z);
    }
    let rest = n_sq - in_frame;
    if has_complement && rest > 0.0 {
        let w = frame.project_out(&gaussian_vector(frame.dim(), rng));
        let wn = norm(&w);
        if wn > 0.0 {
            x = &x + &w.scale_real(rest.sqrt() / wn);
        }
    }
    x
}

/// Whether `y` alone satisfies the theorem's hypotheses at tolerance 0.
fn accepts(theorem: Theorem, params: &TheoremParams, frame: &OrthonormalFrame, y: &FiniteVector) -> bool {
    if theorem.requires_nonzero() && norm(y) < ZERO_NORM {
        return false;
    }
    let Ok(single) = VectorFamily::new(vec![y.clone()]) else { return false };
    certify::evaluate(&single, frame, params, theorem, 0.0).is_ok_and(|c| c.hypothesis.satisfied)
}

/// Analytic feasibility check of the one-vector hypothesis set, then a
/// seeded search for a witness point.
pub fn feasibility(
    theorem: Theorem,
    params: &TheoremParams,
    frame: &OrthonormalFrame,
    seed: u64,
) -> Result<FeasibilityReport> {
    let region = region_for(theorem, params, frame)?;
    let dim = frame.dim();
    let proposer = match Proposer::new(&region, frame) {
        Ok(p) => p,
        Err(reason) => return Ok(FeasibilityReport::infeasible(reason)),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..SAMPLING_CAP {
        let y = proposer.propose(dim, &mut rng);
        if accepts(theorem, params, frame, &y) {
            return Ok(FeasibilityReport {
                feasible: true,
                reason: "witness found by sampling".into(),
                witness: Some(y),
            });
        }
    }
    Ok(FeasibilityReport::infeasible(format!("sampling cap: no witness in {SAMPLING_CAP} proposals")))
}

/// Draws `n` vectors of `C^d` that each satisfy `theorem`'s hypotheses at
/// tolerance 0, by rejection sampling with [`SAMPLING_CAP`] proposals per
/// vector. Provably empty hypothesis sets are reported without sampling.
pub fn sample_family(
    theorem: Theorem,
    params: &TheoremParams,
    frame: &OrthonormalFrame,
    n: usize,
    d: usize,
    seed: u64,
) -> Result<Generated> {
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    if d != frame.dim() {
        return Err(Error::DimensionMismatch { expected: frame.dim(), found: d });
    }
    let region = region_for(theorem, params, frame)?;
    let proposer = match Proposer::new(&region, frame) {
        Ok(p) => p,
        Err(reason) => return Ok(Generated::Infeasible(FeasibilityReport::infeasible(reason))),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vectors = Vec::with_capacity(n);
    for k in 0..n {
        let found =
            (0..SAMPLING_CAP).map(|_| proposer.propose(d, &mut rng)).find(|y| accepts(theorem, params, frame, y));
        match found {
            Some(y) => vectors.push(y),
            None => {
                return Ok(Generated::Infeasible(FeasibilityReport::infeasible(format!(
                    "sampling cap: {SAMPLING_CAP} proposals exhausted for vector {k}"
                ))))
            }
        }
    }
    Ok(Generated::Family(VectorFamily::new(vectors)?))
}

/// Unit complex numbers `z_k` with `sum_k lengths[k] z_k = 0`, or `None`
/// when no closed polygon has these side lengths.
///
/// Splits the sides into a prefix, a pivot and a suffix whose totals satisfy
/// the triangle inequalities, then closes that triangle.
fn closing_phases(lengths: &[f64]) -> Option<Vec<ComplexScalar>> {
    let total: f64 = lengths.iter().sum();
    let longest = lengths.iter().fold(0.0_f64, |m, &l| m.max(l));
    if lengths.len() < 2 || longest > total / 2.0 * (1.0 + 1e-12) {
        return None;
    }
    let mut prefix = 0.0;
    let mut split = 0;
    while split < lengths.len() && prefix + lengths[split] <= total / 2.0 {
        prefix += lengths[split];
        split += 1;
    }
    let split = split.clamp(1, lengths.len() - 1);
    let prefix: f64 = lengths[..split].iter().sum();
    let pivot = lengths[split];
    let suffix: f64 = lengths[split + 1..].iter().sum();
    let cos = ((suffix * suffix - prefix * prefix - pivot * pivot) / (2.0 * prefix * pivot)).clamp(-1.0, 1.0);
    let sin = (1.0 - cos * cos).sqrt();
    let pivot_phase = ComplexScalar::new(cos, sin);
    let suffix_phase = if suffix > 0.0 {
        let v = -(ComplexScalar::new(prefix, 0.0) + pivot_phase * pivot) / suffix;
        v / v.norm()
    } else {
        ComplexScalar::new(1.0, 0.0)
    };
    let mut phases = vec![ComplexScalar::new(1.0, 0.0); split];
    phases.push(pivot_phase);
    phases.extend(std::iter::repeat_n(suffix_phase, lengths.len() - split - 1));
    Some(phases)
}

/// Family with `x_k = l_k (v + sqrt(1 - |v|^2) z_k w)`, `w` a unit vector
/// orthogonal to the frame and `sum l_k z_k = 0`, so that
/// `sum x_k = (sum l_k) v` while each `x_k` has norm `l_k`.
fn component_equality(
    direction: &FiniteVector,
    frame: &OrthonormalFrame,
    norms: &[f64],
    zero_allowed: bool,
) -> Result<Generated> {
    let c = norm(direction);
    let c2 = c * c;
    let dim = frame.dim();
    if c2 > 1.0 + 1e-12 {
        return Ok(Generated::Infeasible(FeasibilityReport::infeasible(format!(
            "restricted region: squared components sum to {c2} > 1; the equality case needs a sum <= 1"
        ))));
    }
    if c == 0.0 && zero_allowed {
        return Ok(Generated::Family(VectorFamily::new(vec![FiniteVector::zeros(dim); norms.len()])?));
    }
    if 1.0 - c2 <= 1e-12 {
        let unit = direction.scale_real(1.0 / c);
        return Ok(Generated::Family(VectorFamily::new(norms.iter().map(|&l| unit.scale_real(l)).collect())?));
    }
    let Some(w) = frame.orthogonal_complement_vector() else {
        return Ok(Generated::Infeasible(FeasibilityReport::infeasible(format!(
            "restricted region: components below unit length need a direction orthogonal to the frame (d > m), got d = {dim}, m = {}",
            frame.len()
        ))));
    };
    let Some(phases) = closing_phases(norms) else {
        return Ok(Generated::Infeasible(FeasibilityReport::infeasible(
            "restricted region: components below unit length need n >= 2 norms whose largest is at most half their sum",
        )));
    };
    let s = (1.0 - c2).sqrt();
    let vectors = norms.iter().zip(phases).map(|(&l, z)| (direction + &w.scale(z * s)).scale_real(l)).collect();
    Ok(Generated::Family(VectorFamily::new(vectors)?))
}

/// Builds a family attaining `theorem`'s equality case with the requested norms.
///
/// Supported: `dm`, `thm1`, `thm5`, `cor6` (squared components summing to at
/// most 1) and `cor3`, `cor8` (which force every norm to `sqrt(2/m)`).
pub fn equality_family(
    theorem: Theorem,
    params: &TheoremParams,
    frame: &OrthonormalFrame,
    norms: &[f64],
) -> Result<Generated> {
    if norms.is_empty() {
        return Err(Error::Empty("equality_family needs at least one norm"));
    }
    if let Some(bad) = norms.iter().find(|l| !(l.is_finite() && **l > 0.0)) {
        return Err(Error::invalid(format!("norms must be positive and finite, got {bad}")));
    }
    if !params.fits(theorem) {
        return Err(Error::invalid(format!("parameters {params:?} do not fit theorem {theorem}")));
    }
    if let Some(len) = params.frame_len() {
        if len != frame.len() {
            return Err(Error::invalid(format!("parameter lists have length {len}, frame has {}", frame.len())));
        }
    }
    let members = frame_of(theorem, frame)?;
    let cplx = ComplexScalar::new;
    let combine = |coeffs: Vec<ComplexScalar>| {
        let mut acc = FiniteVector::zeros(frame.dim());
        for (c, a) in coeffs.into_iter().zip(members) {
            acc = &acc + &a.scale(c);
        }
        acc
    };
    match params {
        TheoremParams::DiazMetcalf { r } => {
            if !(0.0..=1.0).contains(r) {
                return Ok(Generated::Infeasible(FeasibilityReport::infeasible(format!(
                    "restricted region: r = {r} must lie in [0, 1]"
                ))));
            }
            component_equality(&members[0].scale_real(*r), frame, norms, false)
        }
        TheoremParams::Components { r1, r2 } => {
            for v in [r1, r2] {
                if !(-1.0..=1.0).contains(v) {
                    return Err(Error::invalid(format!("components must lie in [-1, 1], got {v}")));
                }
            }
            component_equality(&members[0].scale(cplx(*r1, *r2)), frame, norms, true)
        }
        TheoremParams::FrameComponents { r, rho } => {
            let v = combine(r.iter().zip(rho).map(|(&a, &b)| cplx(a, b)).collect());
            component_equality(&v, frame, norms, true)
        }
        TheoremParams::FrameReal { r } => {
            let v = combine(r.iter().map(|&a| cplx(a, 0.0)).collect());
            component_equality(&v, frame, norms, true)
        }
        TheoremParams::UnitRadii => {
            let m = frame.len();
            let required = (2.0 / m as f64).sqrt();
            if let Some(bad) = norms.iter().find(|&&l| (l - required).abs() > 1e-9 * required) {
                return Ok(Generated::Infeasible(FeasibilityReport::infeasible(format!(
                    "restricted region: equality needs every norm equal to sqrt(2/m) = {required}, got {bad}"
                ))));
            }
            let direction = unit_radii_direction(required, frame);
            let unit = direction.scale_real(1.0 / norm(&direction));
            Ok(Generated::Family(VectorFamily::new(norms.iter().map(|&l| unit.scale_real(l)).collect())?))
        }
        _ => Ok(Generated::Infeasible(FeasibilityReport::infeasible(format!(
            "no equality constructor for theorem {theorem}"
        )))),
    }
}

/// Fuzz campaign settings.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzConfig {
    pub theorem: Theorem,
    pub trials: usize,
    pub d_max: usize,
    pub n_max: usize,
    pub seed: u64,
    pub tol: f64,
    /// Multiplies every bound before the inequality check; `1.0` except for fault injection.
    pub bound_scale: f64,
}

impl FuzzConfig {
    pub fn new(theorem: Theorem, trials: usize, d_max: usize, n_max: usize, seed: u64) -> Self {
        FuzzConfig { theorem, trials, d_max, n_max, seed, tol: crate::bounds::DEFAULT_TOL, bound_scale: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub trial: usize,
    pub instance: Instance,
    pub certificate: BoundCertificate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FuzzSummary {
    pub theorem: Theorem,
    pub trials_run: usize,
    /// Trials whose family satisfied the hypotheses.
    pub hypothesis_hits: usize,
    /// Trials whose family came from [`sample_family`].
    pub sampled_families: usize,
    /// Trials whose sampled draw was infeasible (an unconstrained family was used instead).
    pub infeasible_draws: usize,
    /// Trials whose evaluation returned an input error (parameters outside their interval).
    pub input_errors: usize,
    pub violation_count: usize,
    /// First [`MAX_RECORDED_VIOLATIONS`] violations in trial order.
    pub violations: Vec<Violation>,
}

/// One fuzz trial: the instance drawn and its certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub trial: usize,
    pub instance: Instance,
    pub sampled: bool,
    pub infeasible_draw: bool,
    pub certificate: Option<BoundCertificate>,
}

fn uniform_in<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

/// Random point of `R^len` with Euclidean norm `c`.
fn scaled_direction<R: Rng>(rng: &mut R, len: usize, c: f64) -> Vec<f64> {
    let g: Vec<f64> = (0..len).map(|_| rng.sample(StandardNormal)).collect();
    let n = g.iter().map(|v| v * v).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
    g.into_iter().map(|v| (v / n * c).clamp(-1.0, 1.0)).collect()
}

fn random_params<R: Rng>(theorem: Theorem, m: usize, rng: &mut R) -> TheoremParams {
    match theorem {
        Theorem::Dm => TheoremParams::DiazMetcalf { r: rng.random() },
        Theorem::Thm1 => {
            let c = uniform_in(rng, 0.0, 1.05);
            let v = scaled_direction(rng, 2, c);
            TheoremParams::Components { r1: v[0], r2: v[1] }
        }
        Theorem::Thm2 => TheoremParams::Radii { p1: uniform_in(rng, 0.3, 1.6), p2: uniform_in(rng, 0.3, 1.6) },
        Theorem::Cor9 => TheoremParams::Radii { p1: uniform_in(rng, 0.5, 1.0), p2: uniform_in(rng, 0.5, 1.0) },
        Theorem::Thm4 => TheoremParams::Radius { p: uniform_in(rng, 0.05, 1.5) },
        Theorem::Cor3 | Theorem::Cor8 => TheoremParams::UnitRadii,
        Theorem::Thm5 => {
            let c = uniform_in(rng, 0.0, 1.05);
            let v = scaled_direction(rng, 2 * m, c);
            TheoremParams::FrameComponents { r: v[..m].to_vec(), rho: v[m..].to_vec() }
        }
        Theorem::Cor6 => {
            let c = uniform_in(rng, 0.0, 1.05);
            TheoremParams::FrameReal { r: scaled_direction(rng, m, c) }
        }
        Theorem::Thm7 => TheoremParams::FrameRadii {
            p: (0..m).map(|_| uniform_in(rng, 0.5, 1.6)).collect(),
            q: (0..m).map(|_| uniform_in(rng, 0.5, 1.6)).collect(),
        },
        Theorem::Thm10 | Theorem::Thm11 => {
            // Half the draws use wide sectors near the origin, where the two
            // balls overlap; the rest mostly produce empty intersections.
            let (lo, hi, span_lo, span_hi) =
                if rng.random_bool(0.5) { (0.01, 0.3, 1.0, 4.0) } else { (0.1, 2.0, 0.0, 3.0) };
            let m_lo = uniform_in(rng, lo, hi);
            let ell = uniform_in(rng, lo, hi);
            TheoremParams::Sector {
                m: m_lo,
                big_m: m_lo + uniform_in(rng, span_lo, span_hi),
                ell,
                big_l: ell + uniform_in(rng, span_lo, span_hi),
            }
        }
    }
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

/// Runs trial number `trial` of a campaign; a pure function of `(cfg, trial)`.
pub fn fuzz_trial(cfg: &FuzzConfig, trial: usize) -> Result<TrialOutcome> {
    let mut rng = trial_rng(cfg.seed, trial);
    let d = rng.random_range(1..=cfg.d_max);
    let n = rng.random_range(1..=cfg.n_max);
    let m = if cfg.theorem.uses_frame() { rng.random_range(1..=d.min(FUZZ_MAX_FRAME)) } else { 1 };
    let frame = random_frame(d, m, &mut rng)?;
    let params = random_params(cfg.theorem, m, &mut rng);
    let sample_seed: u64 = rng.random();

    let mut sampled = false;
    let mut infeasible_draw = false;
    let family = if rng.random_bool(0.75) {
        match sample_family(cfg.theorem, &params, &frame, n, d, sample_seed)? {
            Generated::Family(f) => {
                sampled = true;
                Some(f)
            }
            Generated::Infeasible(_) => {
                infeasible_draw = true;
                None
            }
        }
    } else {
        None
    };
    let family = match family {
        Some(f) => f,
        None => VectorFamily::new((0..n).map(|_| gaussian_vector(d, &mut rng)).collect())?,
    };
    let certificate =
        certify::evaluate_with_bound_scale(&family, &frame, &params, cfg.theorem, cfg.tol, cfg.bound_scale).ok();
    Ok(TrialOutcome {
        trial,
        instance: Instance { theorem: cfg.theorem, params, frame, family },
        sampled,
        infeasible_draw,
        certificate,
    })
}

/// Seeded falsification campaign. Trials run in parallel; each trial's
/// generator is derived from `(seed, trial)` so the summary does not depend
/// on scheduling.
pub fn fuzz_falsify(cfg: &FuzzConfig) -> Result<FuzzSummary> {
    if cfg.trials == 0 {
        return Err(Error::invalid("trials must be at least 1"));
    }
    if cfg.d_max == 0 || cfg.n_max == 0 {
        return Err(Error::invalid("d_max and n_max must be at least 1"));
    }
    if !(cfg.tol >= 0.0 && cfg.tol.is_finite()) {
        return Err(Error::invalid(format!("tolerance must be finite and nonnegative, got {}", cfg.tol)));
    }
    let outcomes = (0..cfg.trials).into_par_iter().map(|t| fuzz_trial(cfg, t)).collect::<Result<Vec<_>>>()?;

    let mut summary = FuzzSummary {
        theorem: cfg.theorem,
        trials_run: outcomes.len(),
        hypothesis_hits: 0,
        sampled_families: 0,
        infeasible_draws: 0,
        input_errors: 0,
        violation_count: 0,
        violations: Vec::new(),
    };
    for outcome in outcomes {
        summary.sampled_families += usize::from(outcome.sampled);
        summary.infeasible_draws += usize::from(outcome.infeasible_draw);
        let Some(cert) = outcome.certificate else {
            summary.input_errors += 1;
            continue;
        };
        summary.hypothesis_hits += usize::from(cert.hypothesis.satisfied);
        if cert.status() == Status::SoundnessViolation {
            summary.violation_count += 1;
            if summary.violations.len() < MAX_RECORDED_VIOLATIONS {
                summary.violations.push(Violation {
                    trial: outcome.trial,
                    instance: outcome.instance,
                    certificate: cert,
                });
            }
        }
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_frame(d: usize) -> OrthonormalFrame {
        OrthonormalFrame::standard(d, 1).unwrap()
    }

    #[test]
    fn thm2_small_radii_are_infeasible_without_sampling() {
        let out =
            sample_family(Theorem::Thm2, &TheoremParams::Radii { p1: 0.5, p2: 0.5 }, &unit_frame(1), 3, 1, 0).unwrap();
        match out {
            Generated::Infeasible(r) => {
                assert!(!r.feasible);
                assert!(r.reason.contains("ball intersection is empty"), "{}", r.reason);
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn thm10_far_centers_are_infeasible() {
        let params = TheoremParams::Sector { m: 1.0, big_m: 3.0, ell: 1.0, big_l: 3.0 };
        let report = feasibility(Theorem::Thm10, &params, &unit_frame(2), 0).unwrap();
        assert!(!report.feasible);
        let dist = (2.0f64 * 2.0 + 2.0 * 2.0).sqrt();
        assert!(dist > 2.0);
        assert!(report.reason.contains("ball intersection is empty"), "{}", report.reason);
    }

    #[test]
    fn thm2_unit_radii_family_is_deterministic() {
        let params = TheoremParams::Radii { p1: 1.0, p2: 1.0 };
        let a = sample_family(Theorem::Thm2, &params, &unit_frame(1), 4, 1, 11).unwrap().family().unwrap();
        let b = sample_family(Theorem::Thm2, &params, &unit_frame(1), 4, 1, 11).unwrap().family().unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 4);
        let cert = certify::evaluate(&a, &unit_frame(1), &params, Theorem::Thm2, 0.0).unwrap();
        assert!(cert.hypothesis.satisfied);
    }

    #[test]
    fn sampled_families_pass_at_zero_tolerance() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for theorem in Theorem::ALL {
            for round in 0..5 {
                let d = 3;
                let m = if theorem.uses_frame() { 2 } else { 1 };
                let frame = random_frame(d, m, &mut rng).unwrap();
                let params = random_params(theorem, m, &mut rng);
                if let Generated::Family(f) = sample_family(theorem, &params, &frame, 3, d, round).unwrap() {
                    let cert = certify::evaluate(&f, &frame, &params, theorem, 0.0).unwrap();
                    assert!(cert.hypothesis.satisfied, "{theorem} {params:?}");
                }
            }
        }
    }

    #[test]
    fn cone_intersection_beyond_unit_is_infeasible() {
        let out =
            sample_family(Theorem::Thm1, &TheoremParams::Components { r1: 0.9, r2: 0.9 }, &unit_frame(2), 2, 2, 0)
                .unwrap();
        assert!(matches!(out, Generated::Infeasible(_)));
    }

    #[test]
    fn closing_phases_close() {
        for lengths in [vec![1.0, 1.0], vec![1.0, 2.0, 3.0], vec![1.5, 1.0, 1.2, 2.0], vec![3.0, 1.0, 1.0, 1.0]] {
            let phases = closing_phases(&lengths).unwrap();
            let total: ComplexScalar = lengths.iter().zip(&phases).map(|(l, z)| z * l).sum();
            assert!(total.norm() < 1e-12, "{lengths:?}: {total}");
            for z in phases {
                assert!((z.norm() - 1.0).abs() < 1e-12);
            }
        }
        assert!(closing_phases(&[1.0, 2.0]).is_none());
        assert!(closing_phases(&[1.0]).is_none());
        assert!(closing_phases(&[1.0, 1.0, 3.0]).is_none());
    }

    #[test]
    fn thm1_equality_unit_components() {
        let params = TheoremParams::Components { r1: 0.6, r2: 0.8 };
        let fam = equality_family(Theorem::Thm1, &params, &unit_frame(1), &[1.0, 2.0, 3.0]).unwrap().family().unwrap();
        for (x, l) in fam.vectors().iter().zip([1.0, 2.0, 3.0]) {
            let z = x.coords()[0];
            assert!((z.re - 0.6 * l).abs() < 1e-14 && (z.im - 0.8 * l).abs() < 1e-14);
        }
        let cert = certify::evaluate(&fam, &unit_frame(1), &params, Theorem::Thm1, 1e-9).unwrap();
        assert!(cert.equality_case);
        assert!((cert.ratio.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn thm1_equality_zero_components() {
        let params = TheoremParams::Components { r1: 0.0, r2: 0.0 };
        let fam = equality_family(Theorem::Thm1, &params, &unit_frame(1), &[1.0, 2.0]).unwrap().family().unwrap();
        assert!(fam.vectors().iter().all(FiniteVector::is_zero));
    }

    #[test]
    fn thm1_equality_restricted_region() {
        let params = TheoremParams::Components { r1: 0.9, r2: 0.9 };
        let out = equality_family(Theorem::Thm1, &params, &unit_frame(2), &[1.0, 1.0]).unwrap();
        match out {
            Generated::Infeasible(r) => assert!(r.reason.contains("restricted region")),
            other => panic!("expected restriction, got {other:?}"),
        }
    }

    #[test]
    fn thm1_equality_short_components() {
        let params = TheoremParams::Components { r1: 0.3, r2: -0.5 };
        let frame = unit_frame(2);
        let fam = equality_family(Theorem::Thm1, &params, &frame, &[1.0, 1.5, 2.0]).unwrap().family().unwrap();
        let cert = certify::evaluate(&fam, &frame, &params, Theorem::Thm1, 1e-9).unwrap();
        assert!(cert.hypothesis.satisfied);
        assert!(cert.equality_case);
        assert!((cert.ratio.unwrap() - cert.bound).abs() < 1e-12);
        // d = 1 leaves no room for the orthogonal part.
        assert!(matches!(
            equality_family(Theorem::Thm1, &params, &unit_frame(1), &[1.0, 1.0]).unwrap(),
            Generated::Infeasible(_)
        ));
    }

    #[test]
    fn thm5_equality_matches_hand_example() {
        let frame = OrthonormalFrame::standard(2, 2).unwrap();
        let params = TheoremParams::FrameComponents { r: vec![0.5, 0.5], rho: vec![0.5, 0.5] };
        let fam = equality_family(Theorem::Thm5, &params, &frame, &[1.0]).unwrap().family().unwrap();
        for z in fam.vectors()[0].coords() {
            assert!((z.re - 0.5).abs() < 1e-15 && (z.im - 0.5).abs() < 1e-15);
        }
        let cert = certify::evaluate(&fam, &frame, &params, Theorem::Thm5, 1e-9).unwrap();
        assert!(cert.equality_case);
        assert!((cert.bound - 1.0).abs() < 1e-15);
    }

    #[test]
    fn unit_radii_equality_forces_norm() {
        let frame = unit_frame(1);
        let fam = equality_family(Theorem::Cor3, &TheoremParams::UnitRadii, &frame, &[2f64.sqrt()])
            .unwrap()
            .family()
            .unwrap();
        let z = fam.vectors()[0].coords()[0];
        assert!((z.re - 1.0).abs() < 1e-15 && (z.im - 1.0).abs() < 1e-15);
        let cert = certify::evaluate(&fam, &frame, &TheoremParams::UnitRadii, Theorem::Cor3, 1e-9).unwrap();
        assert!(cert.equality_case);
        assert!(matches!(
            equality_family(Theorem::Cor3, &TheoremParams::UnitRadii, &frame, &[1.0]).unwrap(),
            Generated::Infeasible(_)
        ));
    }

    #[test]
    fn fuzz_rejects_zero_trials() {
        assert!(fuzz_falsify(&FuzzConfig::new(Theorem::Thm1, 0, 3, 3, 0)).is_err());
    }

    #[test]
    fn fuzz_is_deterministic() {
        let cfg = FuzzConfig::new(Theorem::Thm7, 200, 4, 4, 99);
        let a = fuzz_falsify(&cfg).unwrap();
        let b = fuzz_falsify(&cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.violation_count, 0);
        assert!(a.hypothesis_hits > 0);
    }
}
