//! Complex vectors in `C^d` with the standard inner product
//! `<x, y> = sum_j x_j * conj(y_j)` (linear in the first argument).
//!
//! Also hosts the orthonormal frame type, a modified Gram-Schmidt with one
//! re-orthogonalization pass, and the seeded ball sampler used by the
//! generators.

use std::ops::{Add, Sub};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type ComplexScalar = Complex64;

/// Residual norm below which Gram-Schmidt declares a rank deficiency.
pub const RANK_TOL: f64 = 1e-12;

/// Orthonormality tolerance of frames produced by [`gram_schmidt`].
pub const FRAME_TOL: f64 = 1e-9;

/// A vector of `C^d`, `d >= 1`, with finite coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteVector {
    coords: Vec<ComplexScalar>,
}

impl FiniteVector {
    pub fn new(coords: Vec<ComplexScalar>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Empty("vector must have dimension >= 1"));
        }
        if let Some(index) = coords.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(FiniteVector { coords })
    }

    /// Embeds a real vector with zero imaginary parts.
    pub fn from_real(xs: &[f64]) -> Result<Self> {
        Self::new(xs.iter().map(|&re| ComplexScalar::new(re, 0.0)).collect())
    }

    /// Builds a vector from `(re, im)` pairs.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(pairs.iter().map(|&(re, im)| ComplexScalar::new(re, im)).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be at least 1");
        FiniteVector { coords: vec![ComplexScalar::new(0.0, 0.0); dim] }
    }

    /// The `j`-th standard basis vector of `C^dim`.
    pub fn basis(dim: usize, j: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.coords[j] = ComplexScalar::new(1.0, 0.0);
        v
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[ComplexScalar] {
        &self.coords
    }

    pub fn scale(&self, s: ComplexScalar) -> Self {
        FiniteVector { coords: self.coords.iter().map(|z| z * s).collect() }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        FiniteVector { coords: self.coords.iter().map(|z| z * s).collect() }
    }

    pub fn norm(&self) -> f64 {
        norm(self)
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(self + other)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(self - other)
    }

    /// `self += s * other`, dimensions already checked by the caller.
    fn axpy(&mut self, s: ComplexScalar, other: &Self) {
        for (a, b) in self.coords.iter_mut().zip(&other.coords) {
            *a += s * b;
        }
    }
}

impl Add for &FiniteVector {
    type Output = FiniteVector;

    /// Panics on dimension mismatch; use [`FiniteVector::try_add`] for checked addition.
    fn add(self, rhs: &FiniteVector) -> FiniteVector {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch");
        FiniteVector { coords: self.coords.iter().zip(&rhs.coords).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &FiniteVector {
    type Output = FiniteVector;

    fn sub(self, rhs: &FiniteVector) -> FiniteVector {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch");
        FiniteVector { coords: self.coords.iter().zip(&rhs.coords).map(|(a, b)| a - b).collect() }
    }
}

/// `<x, y> = sum_j x_j * conj(y_j)`.
pub fn inner_product(x: &FiniteVector, y: &FiniteVector) -> Result<ComplexScalar> {
    x.check_dim(y)?;
    Ok(x.coords.iter().zip(&y.coords).map(|(a, b)| a * b.conj()).sum())
}

/// Euclidean norm, scaled by the largest component so that tiny and huge
/// coordinates neither underflow nor overflow.
pub fn norm(x: &FiniteVector) -> f64 {
    let scale = x.coords.iter().fold(0.0_f64, |m, z| m.max(z.re.abs()).max(z.im.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    let sum: f64 = x
        .coords
        .iter()
        .map(|z| {
            let (re, im) = (z.re / scale, z.im / scale);
            re * re + im * im
        })
        .sum();
    scale * sum.sqrt()
}

/// Sum of a non-empty list of equal-dimension vectors.
pub fn sum(vs: &[FiniteVector]) -> Result<FiniteVector> {
    let first = vs.first().ok_or(Error::Empty("cannot sum an empty list"))?;
    let mut acc = FiniteVector::zeros(first.dim());
    for v in vs {
        acc.check_dim(v)?;
        acc.axpy(ComplexScalar::new(1.0, 0.0), v);
    }
    Ok(acc)
}

/// Orthonormal vectors `a_1, ..., a_m` of `C^d` with the tolerance they were
/// validated at.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthonormalFrame {
    members: Vec<FiniteVector>,
    tol: f64,
}

impl OrthonormalFrame {
    /// Validates unit norms and pairwise orthogonality at `tol`.
    pub fn new(members: Vec<FiniteVector>, tol: f64) -> Result<Self> {
        if !(tol >= 0.0 && tol.is_finite()) {
            return Err(Error::invalid(format!("frame tolerance must be finite and nonnegative, got {tol}")));
        }
        let first = members.first().ok_or(Error::Empty("frame needs at least one member"))?;
        let dim = first.dim();
        for v in &members {
            first.check_dim(v)?;
        }
        if members.len() > dim {
            return Err(Error::Frame(format!("{} members exceed ambient dimension {dim}", members.len())));
        }
        for (t, v) in members.iter().enumerate() {
            let dev = (norm(v) - 1.0).abs();
            if dev > tol {
                return Err(Error::Frame(format!("member {t} is not unit: |norm - 1| = {dev:e} > {tol:e}")));
            }
        }
        for s in 0..members.len() {
            for t in s + 1..members.len() {
                let ip = inner_product(&members[s], &members[t])?.norm();
                if ip > tol {
                    return Err(Error::Frame(format!(
                        "members {s} and {t} are not orthogonal: |<a_s, a_t>| = {ip:e} > {tol:e}"
                    )));
                }
            }
        }
        Ok(OrthonormalFrame { members, tol })
    }

    /// Single-vector frame `{a}`.
    pub fn single(a: FiniteVector, tol: f64) -> Result<Self> {
        Self::new(vec![a], tol)
    }

    /// `e_1, ..., e_m` in `C^dim`.
    pub fn standard(dim: usize, m: usize) -> Result<Self> {
        if m == 0 || m > dim {
            return Err(Error::invalid(format!("standard frame needs 1 <= m <= d, got m={m}, d={dim}")));
        }
        Self::new((0..m).map(|j| FiniteVector::basis(dim, j)).collect(), 0.0)
    }

    pub fn members(&self) -> &[FiniteVector] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.members[0].dim()
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// A unit vector orthogonal to every member, or `None` when the frame
    /// already spans `C^d`. Deterministic: tries `e_1, e_2, ...` in order.
    pub fn orthogonal_complement_vector(&self) -> Option<FiniteVector> {
        let dim = self.dim();
        if self.len() == dim {
            return None;
        }
        (0..dim).find_map(|j| {
            let mut v = FiniteVector::basis(dim, j);
            orthogonalize_against(&mut v, &self.members);
            let n = norm(&v);
            (n > 1e-6).then(|| v.scale_real(1.0 / n))
        })
    }

    /// Component of `v` orthogonal to every member.
    pub fn project_out(&self, v: &FiniteVector) -> FiniteVector {
        let mut w = v.clone();
        orthogonalize_against(&mut w, &self.members);
        w
    }
}

/// Two passes of modified Gram-Schmidt projection against `basis`.
fn orthogonalize_against(v: &mut FiniteVector, basis: &[FiniteVector]) {
    for _ in 0..2 {
        for q in basis {
            let coeff: ComplexScalar = v.coords.iter().zip(&q.coords).map(|(a, b)| a * b.conj()).sum();
            v.axpy(-coeff, q);
        }
    }
}

/// Modified Gram-Schmidt with re-orthogonalization.
///
/// Fails with [`Error::RankDeficient`] naming the first input whose residual
/// after projection falls below [`RANK_TOL`].
pub fn gram_schmidt(vs: &[FiniteVector]) -> Result<OrthonormalFrame> {
    let first = vs.first().ok_or(Error::Empty("gram_schmidt needs at least one vector"))?;
    let mut basis: Vec<FiniteVector> = Vec::with_capacity(vs.len());
    for (index, v) in vs.iter().enumerate() {
        first.check_dim(v)?;
        let mut w = v.clone();
        orthogonalize_against(&mut w, &basis);
        let residual = norm(&w);
        if residual < RANK_TOL {
            return Err(Error::RankDeficient { index, residual });
        }
        basis.push(w.scale_real(1.0 / residual));
    }
    OrthonormalFrame::new(basis, FRAME_TOL)
}

/// Vector with independent standard Gaussian real and imaginary parts.
pub fn gaussian_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> FiniteVector {
    let coords = (0..dim).map(|_| ComplexScalar::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
    FiniteVector { coords }
}

/// Random orthonormal frame of `m` members in `C^dim`.
pub fn random_frame<R: Rng + ?Sized>(dim: usize, m: usize, rng: &mut R) -> Result<OrthonormalFrame> {
    if m == 0 || m > dim {
        return Err(Error::invalid(format!("frame needs 1 <= m <= d, got m={m}, d={dim}")));
    }
    loop {
        let vs: Vec<_> = (0..m).map(|_| gaussian_vector(dim, rng)).collect();
        match gram_schmidt(&vs) {
            Ok(frame) => return Ok(frame),
            Err(Error::RankDeficient { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
}

/// Point of the ball `{y : ||y - center|| <= radius}` drawn with the given
/// generator: Gaussian direction in `R^{2d}`, radius scaled by `U^{1/(2d)}`.
pub fn sample_in_ball_with<R: Rng + ?Sized>(center: &FiniteVector, radius: f64, rng: &mut R) -> FiniteVector {
    let u: f64 = rng.random();
    scaled_ball_point(center, radius, u.powf(1.0 / (2 * center.dim()) as f64), rng)
}

/// `center + radius * frac * direction` with a Gaussian direction; pulls the
/// point in if rounding puts it outside the closed ball.
pub(crate) fn scaled_ball_point<R: Rng + ?Sized>(
    center: &FiniteVector,
    radius: f64,
    frac: f64,
    rng: &mut R,
) -> FiniteVector {
    if radius == 0.0 {
        return center.clone();
    }
    let dir = loop {
        let g = gaussian_vector(center.dim(), rng);
        let n = norm(&g);
        if n > 0.0 {
            break g.scale_real(1.0 / n);
        }
    };
    let mut step = radius * frac.min(1.0);
    for _ in 0..64 {
        let y = center + &dir.scale_real(step);
        if norm(&(&y - center)) <= radius {
            return y;
        }
        step *= 1.0 - 1e-9;
    }
    center.clone()
}

/// Uniform draw from the real `2d`-dimensional ball, deterministic per seed.
pub fn sample_in_ball(center: &FiniteVector, radius: f64, rng_seed: u64) -> Result<FiniteVector> {
    if !(radius >= 0.0 && radius.is_finite()) {
        return Err(Error::invalid(format!("radius must be finite and nonnegative, got {radius}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    Ok(sample_in_ball_with(center, radius, &mut rng))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> ComplexScalar {
        ComplexScalar::new(re, im)
    }

    #[test]
    fn inner_product_examples() {
        let e1 = FiniteVector::from_real(&[1.0, 0.0]).unwrap();
        let e2 = FiniteVector::from_real(&[0.0, 1.0]).unwrap();
        assert_eq!(inner_product(&e1, &e1).unwrap(), c(1.0, 0.0));
        assert_eq!(inner_product(&e1, &e2).unwrap(), c(0.0, 0.0));
        let x = FiniteVector::from_pairs(&[(1.0, 1.0), (0.0, 0.0)]).unwrap();
        let y = FiniteVector::from_pairs(&[(0.0, 1.0), (0.0, 0.0)]).unwrap();
        assert_eq!(inner_product(&x, &y).unwrap(), c(1.0, -1.0));
    }

    #[test]
    fn inner_product_dimension_mismatch() {
        let x = FiniteVector::zeros(2);
        let y = FiniteVector::zeros(3);
        assert_eq!(inner_product(&x, &y), Err(Error::DimensionMismatch { expected: 2, found: 3 }));
    }

    #[test]
    fn norm_examples() {
        assert_eq!(norm(&FiniteVector::from_real(&[3.0, 4.0]).unwrap()), 5.0);
        assert_eq!(norm(&FiniteVector::zeros(3)), 0.0);
        let z = FiniteVector::from_pairs(&[(1.0, 1.0)]).unwrap();
        assert!((norm(&z) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn norm_is_zero_only_for_zero_vector() {
        let tiny = FiniteVector::from_real(&[1e-300, 0.0]).unwrap();
        assert!(norm(&tiny) > 0.0);
        let huge = FiniteVector::from_real(&[1e300, 1e300]).unwrap();
        assert!(norm(&huge).is_finite());
    }

    #[test]
    fn rejects_non_finite() {
        assert_eq!(FiniteVector::from_real(&[1.0, f64::NAN]), Err(Error::NonFinite { index: 1 }));
        assert!(FiniteVector::new(vec![]).is_err());
    }

    #[test]
    fn gram_schmidt_keeps_standard_basis() {
        let vs = vec![FiniteVector::basis(2, 0), FiniteVector::basis(2, 1)];
        let frame = gram_schmidt(&vs).unwrap();
        assert_eq!(frame.members(), &vs[..]);
    }

    #[test]
    fn gram_schmidt_single_projection() {
        let vs = vec![FiniteVector::from_real(&[1.0, 0.0]).unwrap(), FiniteVector::from_real(&[1.0, 1.0]).unwrap()];
        let frame = gram_schmidt(&vs).unwrap();
        assert_eq!(frame.members()[0], FiniteVector::from_real(&[1.0, 0.0]).unwrap());
        assert_eq!(frame.members()[1], FiniteVector::from_real(&[0.0, 1.0]).unwrap());
    }

    #[test]
    fn gram_schmidt_hand_step() {
        let vs = vec![FiniteVector::from_real(&[1.0, 1.0]).unwrap(), FiniteVector::from_real(&[1.0, 0.0]).unwrap()];
        let frame = gram_schmidt(&vs).unwrap();
        let h = 1.0 / 2f64.sqrt();
        let expected = [[h, h], [h, -h]];
        for (v, want) in frame.members().iter().zip(expected) {
            for (z, w) in v.coords().iter().zip(want) {
                assert!((z.re - w).abs() < 1e-15 && z.im.abs() < 1e-15);
            }
        }
    }

    #[test]
    fn gram_schmidt_names_dependent_index() {
        let a = FiniteVector::from_pairs(&[(1.0, 1.0), (2.0, 0.0)]).unwrap();
        let b = a.scale(c(0.0, 3.0));
        let vs = vec![FiniteVector::basis(2, 1), a, b];
        match gram_schmidt(&vs) {
            Err(Error::RankDeficient { index, .. }) => assert_eq!(index, 2),
            other => panic!("expected rank deficiency, got {other:?}"),
        }
    }

    #[test]
    fn frame_validation() {
        let bad = FiniteVector::from_real(&[1.1, 0.0]).unwrap();
        assert!(matches!(OrthonormalFrame::single(bad, 1e-9), Err(Error::Frame(_))));
        let a = FiniteVector::from_real(&[1.0, 0.0]).unwrap();
        let b = FiniteVector::from_real(&[0.6, 0.8]).unwrap();
        assert!(matches!(OrthonormalFrame::new(vec![a, b], 1e-9), Err(Error::Frame(_))));
        let three = (0..3).map(|j| FiniteVector::basis(3, j)).collect::<Vec<_>>();
        let mut too_many = three.clone();
        too_many.truncate(2);
        assert!(OrthonormalFrame::new(too_many, 0.0).is_ok());
        let in_c2: Vec<_> = (0..2).map(|j| FiniteVector::basis(2, j)).collect();
        let mut over = in_c2.clone();
        over.push(FiniteVector::from_real(&[1.0, 0.0]).unwrap());
        assert!(matches!(OrthonormalFrame::new(over, 1e-9), Err(Error::Frame(_))));
    }

    #[test]
    fn complement_vector_is_orthogonal() {
        let frame = OrthonormalFrame::standard(3, 2).unwrap();
        let w = frame.orthogonal_complement_vector().unwrap();
        assert_eq!(w, FiniteVector::basis(3, 2));
        assert!(OrthonormalFrame::standard(2, 2).unwrap().orthogonal_complement_vector().is_none());
    }

    #[test]
    fn ball_sampling_examples() {
        let center = FiniteVector::from_pairs(&[(0.3, -1.0), (2.0, 0.5)]).unwrap();
        assert_eq!(sample_in_ball(&center, 0.0, 9).unwrap(), center);
        for seed in 0..200 {
            let y = sample_in_ball(&center, 0.7, seed).unwrap();
            assert!(norm(&(&y - &center)) <= 0.7);
        }
        let zero = FiniteVector::zeros(2);
        let a = sample_in_ball(&zero, 1.0, 42).unwrap();
        let b = sample_in_ball(&zero, 1.0, 42).unwrap();
        for (x, y) in a.coords().iter().zip(b.coords()) {
            assert_eq!(x.re.to_bits(), y.re.to_bits());
            assert_eq!(x.im.to_bits(), y.im.to_bits());
        }
        assert!(sample_in_ball(&zero, -1.0, 0).is_err());
    }
}
