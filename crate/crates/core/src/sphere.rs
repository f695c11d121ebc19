//! The unit sphere S^n: points, the canonical distance, great-circle
//! interpolation and deterministic sampling.
//!
//! Everything downstream measures space through `d_0`, the canonical distance
//! on S^n, so this module is the metric bedrock of the crate.

use nalgebra::DVector;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::{real, to_f64, Scalar};

/// Tolerance on the unit-norm invariant.
pub const UNIT_TOL: f64 = 1e-9;

/// Great-circle interpolation is refused within this margin of antipodality.
pub const ANTIPODAL_MARGIN: f64 = 1e-9;

/// A point of S^n, stored as a unit vector in R^{n+1}. Requires n >= 2.
#[derive(Clone, Debug, PartialEq)]
pub struct SpherePoint<S: Scalar> {
    coords: DVector<S>,
}

impl<S: Scalar> SpherePoint<S> {
    pub fn new(coords: DVector<S>) -> Result<Self> {
        if coords.len() < 3 {
            return Err(Error::Validation(format!(
                "sphere dimension n = {} but n >= 2 is required",
                coords.len().saturating_sub(1)
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::Validation("non-finite sphere coordinate".into()));
        }
        let norm = to_f64(coords.norm());
        if (norm - 1.0).abs() > UNIT_TOL {
            return Err(Error::NotUnit { norm });
        }
        Ok(Self { coords })
    }

    /// Normalizes an arbitrary nonzero vector onto the sphere.
    pub fn from_unnormalized(v: DVector<S>) -> Result<Self> {
        let norm = v.norm();
        if to_f64(norm) < 1e-12 {
            return Err(Error::Validation("cannot normalize a (near-)zero vector".into()));
        }
        Self::new(v / norm)
    }

    /// The i-th coordinate axis of R^{n+1} as a sphere point.
    pub fn axis(n: usize, i: usize) -> Self {
        assert!(n >= 2 && i <= n, "axis index out of range");
        let mut v = DVector::zeros(n + 1);
        v[i] = S::one();
        Self { coords: v }
    }

    pub fn coords(&self) -> &DVector<S> {
        &self.coords
    }

    /// Spatial dimension n (the sphere is S^n inside R^{n+1}).
    pub fn n(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn antipode(&self) -> Self {
        Self { coords: -self.coords.clone() }
    }

    pub fn dot(&self, other: &Self) -> S {
        self.coords.dot(&other.coords)
    }

    /// Canonical distance d_0 in [0, pi].
    ///
    /// Evaluated as atan2 of the orthogonal component against the dot product,
    /// which stays accurate near 0 and pi where arccos loses precision.
    pub fn distance(&self, other: &Self) -> S {
        assert_eq!(self.coords.len(), other.coords.len(), "mixed sphere dimensions");
        let c = self.dot(other);
        let perp = &other.coords - &self.coords * c;
        perp.norm().atan2(c)
    }

    /// Unit tangent at `self` pointing toward `other` along the minimizing
    /// geodesic. Refused at coincident or (near-)antipodal configurations.
    pub fn direction_toward(&self, other: &Self) -> Result<DVector<S>> {
        let d = to_f64(self.distance(other));
        if d < 1e-12 {
            return Err(Error::Validation(
                "no direction between coincident sphere points".into(),
            ));
        }
        if d >= std::f64::consts::PI - ANTIPODAL_MARGIN {
            return Err(Error::AntipodalAmbiguity { distance: d });
        }
        let c = self.dot(other);
        let perp = &other.coords - &self.coords * c;
        Ok(perp.clone() / perp.norm())
    }

    /// The point at arc length `s` along the great circle through `self` with
    /// initial unit tangent `dir`.
    pub fn walk(&self, dir: &DVector<S>, s: S) -> Self {
        let v = &self.coords * s.cos() + dir * s.sin();
        let norm = v.norm();
        Self { coords: v / norm }
    }

    /// Great-circle interpolation: the point a fraction `frac` of the way
    /// from `self` to `other`. Refused at antipodes.
    pub fn slerp(&self, other: &Self, frac: S) -> Result<Self> {
        let d = self.distance(other);
        if to_f64(d) < 1e-12 {
            return Ok(self.clone());
        }
        let dir = self.direction_toward(other)?;
        Ok(self.walk(&dir, d * frac))
    }

    /// Validates that `dir` is a unit tangent vector at `self` within `tol`.
    pub fn check_tangent(&self, dir: &DVector<S>, tol: f64) -> Result<()> {
        if dir.len() != self.coords.len() {
            return Err(Error::Validation("tangent dimension mismatch".into()));
        }
        let norm = to_f64(dir.norm());
        if (norm - 1.0).abs() > tol {
            return Err(Error::NotUnit { norm });
        }
        let inner = to_f64(self.coords.dot(dir)).abs();
        if inner > tol {
            return Err(Error::Validation(format!(
                "direction is not orthogonal to the base point: <x, dir> = {inner}"
            )));
        }
        Ok(())
    }

    /// An orthonormal basis of the tangent space at `self`.
    pub fn tangent_basis(&self) -> Vec<DVector<S>> {
        let dim = self.coords.len();
        let mut basis: Vec<DVector<S>> = Vec::with_capacity(dim - 1);
        for i in 0..dim {
            let mut v = DVector::zeros(dim);
            v[i] = S::one();
            v -= &self.coords * self.coords.dot(&v);
            for b in &basis {
                let v_minus = &v - b * b.dot(&v);
                v = v_minus;
            }
            let norm = v.norm();
            if to_f64(norm) > 1e-6 {
                basis.push(v / norm);
                if basis.len() == dim - 1 {
                    break;
                }
            }
        }
        debug_assert_eq!(basis.len(), dim - 1);
        basis
    }
}

/// d_0 on raw vectors, validating the unit-norm invariant of both arguments.
pub fn sphere_distance<S: Scalar>(a: &DVector<S>, b: &DVector<S>) -> Result<S> {
    let pa = SpherePoint::new(a.clone())?;
    let pb = SpherePoint::new(b.clone())?;
    Ok(pa.distance(&pb))
}

/// Uniform random point of S^n.
pub fn random_point<S: Scalar, R: Rng>(rng: &mut R, n: usize) -> SpherePoint<S> {
    loop {
        let v = DVector::from_fn(n + 1, |_, _| real::<S>(standard_normal(rng)));
        if to_f64(v.norm()) > 1e-6 {
            return SpherePoint::from_unnormalized(v).expect("normalized");
        }
    }
}

/// Uniform random unit tangent vector at `at`.
pub fn random_tangent<S: Scalar, R: Rng>(rng: &mut R, at: &SpherePoint<S>) -> DVector<S> {
    loop {
        let mut v = DVector::from_fn(at.coords().len(), |_, _| real::<S>(standard_normal(rng)));
        v -= at.coords() * at.coords().dot(&v);
        let norm = v.norm();
        if to_f64(norm) > 1e-6 {
            return v / norm;
        }
    }
}

/// A standard normal sample via Box-Muller, so only `Rng` is required.
fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// A deterministic quasi-uniform sample of S^n with covering radius about
/// `resolution`. Uses the Fibonacci lattice for n = 2 and a fixed-seed uniform
/// sample (capped in size) for higher dimensions.
pub fn mesh_points<S: Scalar>(n: usize, resolution: f64) -> Vec<SpherePoint<S>> {
    assert!(n >= 2, "sphere dimension must be at least 2");
    assert!(resolution > 0.0, "mesh resolution must be positive");
    if n == 2 {
        let count = ((4.0 * std::f64::consts::PI) / (resolution * resolution)).ceil() as usize;
        fibonacci_sphere(count.max(16))
    } else {
        // Surface-area heuristic, capped so high dimensions stay tractable.
        let count = (20.0 / resolution.powi(n as i32)).ceil() as usize;
        let count = count.clamp(64, 30_000);
        let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_0001);
        (0..count).map(|_| random_point(&mut rng, n)).collect()
    }
}

/// The Fibonacci lattice on S^2.
pub fn fibonacci_sphere<S: Scalar>(count: usize) -> Vec<SpherePoint<S>> {
    let golden = std::f64::consts::PI * (3.0 - 5.0_f64.sqrt());
    (0..count)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / count as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * i as f64;
            let v = DVector::from_vec(vec![
                real::<S>(r * phi.cos()),
                real::<S>(r * phi.sin()),
                real::<S>(z),
            ]);
            SpherePoint::from_unnormalized(v).expect("on sphere")
        })
        .collect()
}

/// Applies the Householder reflection taking the last coordinate axis to
/// `base`. Used to adapt chart axes to an arbitrary spatial center.
pub fn reflect_last_axis_to<S: Scalar>(base: &SpherePoint<S>, v: &DVector<S>) -> DVector<S> {
    let dim = base.coords().len();
    let mut h = -base.coords().clone();
    h[dim - 1] += S::one();
    let h_norm2 = h.dot(&h);
    if to_f64(h_norm2) < 1e-24 {
        return v.clone();
    }
    let scale = (S::one() + S::one()) * h.dot(v) / h_norm2;
    v - h * scale
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn e(i: usize) -> SpherePoint<f64> {
        SpherePoint::axis(2, i)
    }

    #[test]
    fn distance_identity_antipodal_orthogonal() {
        assert_eq!(e(0).distance(&e(0)), 0.0);
        assert_relative_eq!(e(0).distance(&e(0).antipode()), PI);
        assert_relative_eq!(e(0).distance(&e(1)), PI / 2.0);
    }

    #[test]
    fn non_unit_input_is_rejected_with_norm() {
        let v = DVector::from_vec(vec![2.0, 0.0, 0.0]);
        match sphere_distance(&v, e(0).coords()) {
            Err(Error::NotUnit { norm }) => assert_relative_eq!(norm, 2.0),
            other => panic!("expected NotUnit, got {other:?}"),
        }
    }

    #[test]
    fn slerp_refuses_antipodes() {
        let err = e(0).slerp(&e(0).antipode(), 0.5).unwrap_err();
        assert!(matches!(err, Error::AntipodalAmbiguity { .. }));
    }

    #[test]
    fn distance_is_stable_near_zero() {
        let a = e(0);
        let dir = DVector::from_vec(vec![0.0, 1.0, 0.0]);
        let b = a.walk(&dir, 1e-8);
        assert_relative_eq!(a.distance(&b), 1e-8, max_relative = 1e-6);
    }

    #[test]
    fn mesh_covers_the_sphere() {
        let mesh = mesh_points::<f64>(2, 0.3);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let p: SpherePoint<f64> = random_point(&mut rng, 2);
            let nearest = mesh
                .iter()
                .map(|m| m.distance(&p))
                .fold(f64::INFINITY, f64::min);
            assert!(nearest < 0.3, "uncovered point at distance {nearest}");
        }
    }

    #[test]
    fn reflection_maps_last_axis_to_base() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let base: SpherePoint<f64> = random_point(&mut rng, 2);
            let last = SpherePoint::axis(2, 2);
            let image = reflect_last_axis_to(&base, last.coords());
            assert_relative_eq!((image - base.coords()).norm(), 0.0, epsilon = 1e-12);
        }
    }

    proptest! {
        #[test]
        fn distance_symmetry_range_triangle(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a: SpherePoint<f64> = random_point(&mut rng, 2);
            let b: SpherePoint<f64> = random_point(&mut rng, 2);
            let c: SpherePoint<f64> = random_point(&mut rng, 2);
            let dab = a.distance(&b);
            let dba = b.distance(&a);
            prop_assert!((dab - dba).abs() <= 1e-9);
            prop_assert!((0.0..=PI + 1e-9).contains(&dab));
            prop_assert!(a.distance(&c) <= dab + b.distance(&c) + 1e-9);
        }

        #[test]
        fn walk_stays_on_sphere(seed in any::<u64>(), s in -7.0f64..7.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a: SpherePoint<f64> = random_point(&mut rng, 2);
            let dir = random_tangent(&mut rng, &a);
            let p = a.walk(&dir, s);
            prop_assert!((p.coords().norm() - 1.0).abs() < 1e-12);
        }
    }
}
