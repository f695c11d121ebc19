//! The Einstein universe Ein_{1,n}, its universal cover, and their causal
//! structure: the null-cone model, the covering maps, the conjugate-point
//! involution, closed-form causal relations and null geodesics.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::graphs::AchronalGraph;
use crate::scalar::{real, to_f64, Scalar};
use crate::sphere::SpherePoint;

/// Default strictness tolerance (radians) separating I from J numerically.
pub const DEFAULT_EPS: f64 = 1e-9;

/// A point (x, t) of the universal cover S^n x R.
#[derive(Clone, Debug, PartialEq)]
pub struct EinTildePoint<S: Scalar> {
    pub x: SpherePoint<S>,
    pub t: S,
}

impl<S: Scalar> EinTildePoint<S> {
    pub fn new(x: SpherePoint<S>, t: S) -> Result<Self> {
        if !t.is_finite() {
            return Err(Error::Validation("time coordinate must be finite".into()));
        }
        Ok(Self { x, t })
    }
}

/// A point (x, theta) of Ein_{1,n} = S^n x S^1, with theta in [0, 2*pi).
#[derive(Clone, Debug, PartialEq)]
pub struct EinPoint<S: Scalar> {
    x: SpherePoint<S>,
    theta: S,
}

impl<S: Scalar> EinPoint<S> {
    pub fn new(x: SpherePoint<S>, theta: S) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::Validation("angle must be finite".into()));
        }
        Ok(Self { x, theta: wrap_angle(theta) })
    }

    pub fn x(&self) -> &SpherePoint<S> {
        &self.x
    }

    pub fn theta(&self) -> S {
        self.theta
    }
}

/// Normalizes an angle into [0, 2*pi).
fn wrap_angle<S: Scalar>(theta: S) -> S {
    let tau = S::two_pi();
    let mut t = theta % tau;
    if t < S::zero() {
        t += tau;
    }
    // The remainder can land exactly on tau after the correction.
    if t >= tau {
        t -= tau;
    }
    t
}

/// A nonzero vector of the isotropic cone of R^{2,n+1}, split as
/// (u1, u2 | w) with w in R^{n+1}.
#[derive(Clone, Debug, PartialEq)]
pub struct NullVector<S: Scalar> {
    v: DVector<S>,
}

impl<S: Scalar> NullVector<S> {
    pub fn new(v: DVector<S>) -> Result<Self> {
        if v.len() < 5 {
            return Err(Error::Validation(format!(
                "null vector lives in R^(n+3) with n >= 2; got length {}",
                v.len()
            )));
        }
        let norm2 = v.norm_squared();
        if to_f64(norm2) == 0.0 {
            return Err(Error::Validation("null vector must be nonzero".into()));
        }
        let q = signature_q(&v);
        if to_f64(q.abs()) > 1e-9 * to_f64(norm2) {
            return Err(Error::Validation(format!(
                "vector is not isotropic: Q(v) = {} exceeds 1e-9 * |v|^2",
                to_f64(q)
            )));
        }
        Ok(Self { v })
    }

    pub fn as_vector(&self) -> &DVector<S> {
        &self.v
    }
}

/// Q(v) = u1^2 + u2^2 - |w|^2, the signature-(2, n+1) form.
pub fn signature_q<S: Scalar>(v: &DVector<S>) -> S {
    let mut q = v[0] * v[0] + v[1] * v[1];
    for i in 2..v.len() {
        q -= v[i] * v[i];
    }
    q
}

/// The six-way causal classification of an ordered pair of cover points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum CausalClass {
    ChronologicalFuture,
    CausalNullFuture,
    ChronologicalPast,
    CausalNullPast,
    Unrelated,
    Coincident,
}

impl CausalClass {
    /// q is in the causal future of p (strictly; coincidence excluded).
    pub fn is_future(self) -> bool {
        matches!(self, CausalClass::ChronologicalFuture | CausalClass::CausalNullFuture)
    }

    pub fn is_past(self) -> bool {
        matches!(self, CausalClass::ChronologicalPast | CausalClass::CausalNullPast)
    }
}

/// The section of the isotropic cone over Ein: (cos theta, sin theta | x).
pub fn null_cone_rep<S: Scalar>(e: &EinPoint<S>) -> NullVector<S> {
    let dim = e.x().coords().len();
    let mut v = DVector::zeros(dim + 2);
    v[0] = e.theta().cos();
    v[1] = e.theta().sin();
    for i in 0..dim {
        v[i + 2] = e.x().coords()[i];
    }
    NullVector { v }
}

/// Projects a null ray back to Ein: scales so |u| = |w| = 1 and reads (x, theta).
/// Invariant under positive rescaling of the input.
pub fn normalize_null<S: Scalar>(v: &NullVector<S>) -> Result<EinPoint<S>> {
    let u1 = v.v[0];
    let u2 = v.v[1];
    let u_norm = (u1 * u1 + u2 * u2).sqrt();
    let w = v.v.rows(2, v.v.len() - 2).into_owned();
    let w_norm = w.norm();
    if to_f64(u_norm) < 1e-12 || to_f64(w_norm) < 1e-12 {
        return Err(Error::DegenerateRay {
            u_norm: to_f64(u_norm),
            w_norm: to_f64(w_norm),
        });
    }
    let theta = wrap_angle(u2.atan2(u1));
    let x = SpherePoint::new(w / w_norm)?;
    EinPoint::new(x, theta)
}

/// Covering projection: theta = t mod 2*pi.
pub fn project_to_cover_base<S: Scalar>(p: &EinTildePoint<S>) -> EinPoint<S> {
    EinPoint { x: p.x.clone(), theta: wrap_angle(p.t) }
}

/// The lift with t = theta + 2*pi*k.
pub fn lift_from_base<S: Scalar>(e: &EinPoint<S>, k: i64) -> EinTildePoint<S> {
    EinTildePoint {
        x: e.x().clone(),
        t: e.theta() + S::two_pi() * real::<S>(k as f64),
    }
}

/// The conjugate-point involution sigma(x, t) = (-x, t + pi).
pub fn sigma<S: Scalar>(p: &EinTildePoint<S>) -> EinTildePoint<S> {
    EinTildePoint { x: p.x.antipode(), t: p.t + S::pi() }
}

/// sigma^{-1}(x, t) = (-x, t - pi).
pub fn sigma_inverse<S: Scalar>(p: &EinTildePoint<S>) -> EinTildePoint<S> {
    EinTildePoint { x: p.x.antipode(), t: p.t - S::pi() }
}

/// The deck transformation delta(x, t) = (x, t + 2*pi); delta = sigma^2.
pub fn delta<S: Scalar>(p: &EinTildePoint<S>) -> EinTildePoint<S> {
    EinTildePoint { x: p.x.clone(), t: p.t + S::two_pi() }
}

pub fn delta_inverse<S: Scalar>(p: &EinTildePoint<S>) -> EinTildePoint<S> {
    EinTildePoint { x: p.x.clone(), t: p.t - S::two_pi() }
}

/// Closed-form causal classification on the cover:
/// with d = d_0(x_p, x_q) and dt = t_q - t_p,
/// q is chronologically after p iff d < dt, causally (null) iff d = dt,
/// all read through the strictness band `eps`.
pub fn causal_classify<S: Scalar>(
    p: &EinTildePoint<S>,
    q: &EinTildePoint<S>,
    eps: S,
) -> CausalClass {
    interval_classify(p.x.distance(&q.x), q.t - p.t, eps)
}

/// Classification of a separation pair: spatial distance `d` (nonnegative)
/// against time increment `dt`, through the strictness band `eps`.
pub fn interval_classify<S: Scalar>(d: S, dt: S, eps: S) -> CausalClass {
    if d <= eps && dt.abs() <= eps {
        return CausalClass::Coincident;
    }
    if d > dt.abs() + eps {
        return CausalClass::Unrelated;
    }
    if dt > S::zero() {
        if d < dt - eps {
            CausalClass::ChronologicalFuture
        } else {
            CausalClass::CausalNullFuture
        }
    } else if d < -dt - eps {
        CausalClass::ChronologicalPast
    } else {
        CausalClass::CausalNullPast
    }
}

/// Classification at the default tolerance.
pub fn causal_classify_default<S: Scalar>(p: &EinTildePoint<S>, q: &EinTildePoint<S>) -> CausalClass {
    causal_classify(p, q, real(DEFAULT_EPS))
}

/// The inextensible null geodesic through `p` with initial spatial direction
/// `dir`, evaluated at affine parameter `s`:
/// (cos(s) x_p + sin(s) dir, t_p + s).
pub fn null_geodesic<S: Scalar>(
    p: &EinTildePoint<S>,
    dir: &DVector<S>,
    s: S,
) -> Result<EinTildePoint<S>> {
    p.x.check_tangent(dir, 1e-9)?;
    Ok(null_geodesic_unchecked(p, dir, s))
}

/// Same as [`null_geodesic`] without re-validating `dir`; for inner loops.
pub fn null_geodesic_unchecked<S: Scalar>(
    p: &EinTildePoint<S>,
    dir: &DVector<S>,
    s: S,
) -> EinTildePoint<S> {
    EinTildePoint { x: p.x.walk(dir, s), t: p.t + s }
}

/// The boundary of the chronological past of `p`, as the full-sphere graph
/// f(x') = t_p - d_0(x_p, x').
///
/// Sampled as the fan of past null segments from `p`: every sample lies on a
/// lightlike geodesic joining `p` to sigma^{-1}(p). The center and the
/// antipode are always included.
pub fn boundary_of_past<S: Scalar>(p: &EinTildePoint<S>, mesh: f64) -> AchronalGraph<S> {
    assert!(mesh > 0.0, "mesh resolution must be positive");
    let n = p.x.n();
    let mut samples: Vec<(SpherePoint<S>, S)> = Vec::new();
    samples.push((p.x.clone(), p.t));
    samples.push((p.x.antipode(), p.t - S::pi()));

    let directions = fan_directions(&p.x, mesh);
    let arc_steps = (std::f64::consts::PI / mesh).ceil() as usize;
    for dir in &directions {
        for k in 1..arc_steps {
            let s = real::<S>(std::f64::consts::PI * k as f64 / arc_steps as f64);
            let x = p.x.walk(dir, s);
            samples.push((x, p.t - s));
        }
    }
    let _ = n;
    AchronalGraph::from_samples_full_sphere(samples, real(mesh))
}

/// A deterministic fan of unit tangent directions at `at`, spaced about
/// `resolution` apart on the unit tangent sphere.
pub fn fan_directions<S: Scalar>(at: &SpherePoint<S>, resolution: f64) -> Vec<DVector<S>> {
    let basis = at.tangent_basis();
    if basis.len() == 2 {
        // Tangent directions form a circle; sample it uniformly.
        let count = (std::f64::consts::TAU / resolution).ceil() as usize;
        (0..count)
            .map(|j| {
                let phi = std::f64::consts::TAU * j as f64 / count as f64;
                &basis[0] * real::<S>(phi.cos()) + &basis[1] * real::<S>(phi.sin())
            })
            .collect()
    } else {
        // Higher-dimensional tangent sphere: fixed-seed uniform directions.
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5EED_0002);
        let count = ((12.0 / resolution.powi((basis.len() - 1) as i32)).ceil() as usize)
            .clamp(32, 20_000);
        (0..count)
            .map(|_| crate::sphere::random_tangent(&mut rng, at))
            .collect()
    }
}

/// Witness of total viciousness of the compact model: the least k >= 0 such
/// that the k-th deck translate of (a fixed lift of) `e2` is strictly in the
/// causal future of the fixed lift of `e1`.
pub fn totally_vicious_witness<S: Scalar>(e1: &EinPoint<S>, e2: &EinPoint<S>) -> u32 {
    let p = lift_from_base(e1, 0);
    for k in 0.. {
        let q = lift_from_base(e2, k as i64);
        if causal_classify_default(&p, &q).is_future() {
            return k;
        }
    }
    unreachable!("a future deck translate always exists");
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    use crate::sphere::{random_point, random_tangent};

    fn e1() -> SpherePoint<f64> {
        SpherePoint::axis(2, 0)
    }

    fn tilde(x: SpherePoint<f64>, t: f64) -> EinTildePoint<f64> {
        EinTildePoint::new(x, t).unwrap()
    }

    fn random_tilde(rng: &mut ChaCha8Rng) -> EinTildePoint<f64> {
        use rand::Rng;
        tilde(random_point(rng, 2), rng.gen_range(-10.0..10.0))
    }

    #[test]
    fn null_cone_rep_at_reference_angles() {
        let p = EinPoint::new(e1(), 0.0).unwrap();
        assert_eq!(
            null_cone_rep(&p).as_vector().as_slice(),
            &[1.0, 0.0, 1.0, 0.0, 0.0]
        );
        let q = EinPoint::new(e1(), PI / 2.0).unwrap();
        let v = null_cone_rep(&q);
        assert_relative_eq!(v.as_vector()[0], 0.0, epsilon = 1e-15);
        assert_relative_eq!(v.as_vector()[1], 1.0);
    }

    #[test]
    fn normalize_null_rescales_and_reads_angle() {
        let v = NullVector::new(DVector::from_vec(vec![2.0, 0.0, 2.0, 0.0, 0.0])).unwrap();
        let e = normalize_null(&v).unwrap();
        assert_eq!(e.x(), &e1());
        assert_eq!(e.theta(), 0.0);

        let v = NullVector::new(DVector::from_vec(vec![0.0, -3.0, 0.0, 3.0, 0.0])).unwrap();
        let e = normalize_null(&v).unwrap();
        assert_eq!(e.x(), &SpherePoint::axis(2, 1));
        assert_relative_eq!(e.theta(), 3.0 * PI / 2.0);
    }

    #[test]
    fn normalize_null_rejects_degenerate_rays() {
        let v = NullVector {
            v: DVector::from_vec(vec![0.0, 0.0, 1.0, 0.0, 0.0]),
        };
        assert!(matches!(normalize_null(&v), Err(Error::DegenerateRay { .. })));
    }

    #[test]
    fn cover_projection_and_lift() {
        let p = tilde(e1(), 5.0 * PI);
        let base = project_to_cover_base(&p);
        assert_relative_eq!(base.theta(), PI, epsilon = 1e-12);
        let lifted = lift_from_base(&base, 2);
        assert_relative_eq!(lifted.t, 5.0 * PI, epsilon = 1e-12);
    }

    #[test]
    fn sigma_squares_to_delta() {
        let p = tilde(e1(), 0.0);
        let s = sigma(&p);
        assert_eq!(s.x, e1().antipode());
        assert_eq!(s.t, PI);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let p = random_tilde(&mut rng);
            let ss = sigma(&sigma(&p));
            let d = delta(&p);
            assert_eq!(ss.x, d.x);
            assert_relative_eq!(ss.t, d.t, epsilon = 1e-12);
            let back = delta_inverse(&delta(&p));
            assert_eq!(back.x, p.x);
            assert_relative_eq!(back.t, p.t, epsilon = 1e-12);
            // delta is the deck transformation of the covering.
            let pr = project_to_cover_base(&delta(&p));
            let pr0 = project_to_cover_base(&p);
            assert_relative_eq!(pr.theta(), pr0.theta(), epsilon = 1e-9);
        }
    }

    #[test]
    fn classify_examples() {
        let p = tilde(e1(), 0.0);
        assert_eq!(
            causal_classify_default(&p, &tilde(e1(), 0.1)),
            CausalClass::ChronologicalFuture
        );
        assert_eq!(
            causal_classify_default(&p, &tilde(e1().antipode(), PI)),
            CausalClass::CausalNullFuture
        );
        assert_eq!(
            causal_classify_default(&p, &tilde(SpherePoint::axis(2, 1), 1.0)),
            CausalClass::Unrelated
        );
        assert_eq!(causal_classify_default(&p, &p), CausalClass::Coincident);
    }

    #[test]
    fn null_geodesic_hits_sigma_and_delta() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let p = random_tilde(&mut rng);
            let dir = random_tangent(&mut rng, &p.x);
            let at0 = null_geodesic(&p, &dir, 0.0).unwrap();
            assert!(at0.x.distance(&p.x) < 1e-12);
            let at_pi = null_geodesic(&p, &dir, PI).unwrap();
            let s = sigma(&p);
            assert!(at_pi.x.distance(&s.x) < 1e-9);
            assert_relative_eq!(at_pi.t, s.t, epsilon = 1e-12);
            let at_tau = null_geodesic(&p, &dir, 2.0 * PI).unwrap();
            let d = delta(&p);
            assert!(at_tau.x.distance(&d.x) < 1e-9);
            assert_relative_eq!(at_tau.t, d.t, epsilon = 1e-12);
            // Forward points are causally null related.
            let mid = null_geodesic(&p, &dir, 1.3).unwrap();
            assert_eq!(causal_classify_default(&p, &mid), CausalClass::CausalNullFuture);
        }
    }

    #[test]
    fn null_geodesic_rejects_bad_directions() {
        let p = tilde(e1(), 0.0);
        let not_unit = DVector::from_vec(vec![0.0, 2.0, 0.0]);
        assert!(null_geodesic(&p, &not_unit, 1.0).is_err());
        let not_orthogonal = DVector::from_vec(vec![1.0, 0.0, 0.0]);
        assert!(null_geodesic(&p, &not_orthogonal, 1.0).is_err());
    }

    #[test]
    fn boundary_of_past_values_and_lipschitz() {
        let p = tilde(e1(), 0.4);
        let g = boundary_of_past(&p, 0.2);
        // Exact values at center and antipode.
        assert_relative_eq!(g.value_at(&p.x), 0.4, epsilon = 1e-9);
        assert_relative_eq!(g.value_at(&p.x.antipode()), 0.4 - PI, epsilon = 1e-9);
        for (x, f) in g.samples() {
            assert_relative_eq!(*f, p.t - p.x.distance(x), epsilon = 1e-9);
            let class = causal_classify_default(&tilde(x.clone(), *f), &p);
            assert!(
                matches!(class, CausalClass::CausalNullFuture | CausalClass::Coincident),
                "boundary sample misclassified as {class:?}"
            );
        }
        assert!(g.is_achronal(1e-9).is_ok());
    }

    #[test]
    fn vicious_witness_small_k() {
        let a = EinPoint::new(e1(), 0.0).unwrap();
        assert_eq!(totally_vicious_witness(&a, &a), 1);
        let b = EinPoint::new(e1().antipode(), 0.0).unwrap();
        assert_eq!(totally_vicious_witness(&a, &b), 1);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn round_trip_cone_model(seed in any::<u64>()) {
            use rand::Rng;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let e = EinPoint::new(random_point(&mut rng, 2), rng.gen_range(0.0..std::f64::consts::TAU)).unwrap();
            let back = normalize_null(&null_cone_rep(&e)).unwrap();
            prop_assert!(back.x().distance(e.x()) < 1e-9);
            let dth = (back.theta() - e.theta()).abs();
            prop_assert!(dth.min(std::f64::consts::TAU - dth) < 1e-9);
            // Projective invariance under positive rescaling.
            let scaled = NullVector::new(null_cone_rep(&e).as_vector() * 3.7).unwrap();
            let back2 = normalize_null(&scaled).unwrap();
            prop_assert!(back2.x().distance(back.x()) < 1e-12);
        }

        #[test]
        fn relation_mixing_and_antisymmetry(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = random_tilde(&mut rng);
            let q = random_tilde(&mut rng);
            let r = random_tilde(&mut rng);
            let pq = causal_classify_default(&p, &q);
            let qp = causal_classify_default(&q, &p);
            // Antisymmetry: the cover is causal.
            if pq == CausalClass::ChronologicalFuture {
                prop_assert_eq!(qp, CausalClass::ChronologicalPast);
            }
            prop_assert!(!(pq.is_future() && qp.is_future()));
            // Mixing: chronological then causal composes to chronological.
            let qr = causal_classify_default(&q, &r);
            if pq == CausalClass::ChronologicalFuture && qr.is_future() {
                let pr = causal_classify_default(&p, &r);
                prop_assert_eq!(pr, CausalClass::ChronologicalFuture);
            }
            // sigma and delta are causal isomorphisms.
            let spq = causal_classify_default(&sigma(&p), &sigma(&q));
            prop_assert_eq!(pq, spq);
            let dpq = causal_classify_default(&delta(&p), &delta(&q));
            prop_assert_eq!(pq, dpq);
        }

        #[test]
        fn refocusing_pairwise_disjoint_away_from_conjugates(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = random_tilde(&mut rng);
            let d1 = random_tangent(&mut rng, &p.x);
            let d2 = random_tangent(&mut rng, &p.x);
            prop_assume!((&d1 - &d2).norm() > 1e-2 && (&d1 + &d2).norm() > 1e-2);
            for k in 0..=2u32 {
                let s = PI * k as f64;
                let a = null_geodesic(&p, &d1, s).unwrap();
                let b = null_geodesic(&p, &d2, s).unwrap();
                prop_assert!(a.x.distance(&b.x) < 1e-9);
            }
            for j in 1..20 {
                let s = 0.1 * PI + 0.8 * PI * j as f64 / 20.0;
                let a = null_geodesic(&p, &d1, s).unwrap();
                let b = null_geodesic(&p, &d2, s).unwrap();
                prop_assert!(a.x.distance(&b.x) > 1e-6);
            }
        }

        #[test]
        fn vicious_witness_always_succeeds(seed in any::<u64>()) {
            use rand::Rng;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = EinPoint::new(random_point(&mut rng, 2), rng.gen_range(0.0..std::f64::consts::TAU)).unwrap();
            let b = EinPoint::new(random_point(&mut rng, 2), rng.gen_range(0.0..std::f64::consts::TAU)).unwrap();
            let k = totally_vicious_witness(&a, &b);
            prop_assert!(k <= 2);
            // Oracle: the classification on the lifts confirms the witness.
            let p = lift_from_base(&a, 0);
            let q = lift_from_base(&b, k as i64);
            prop_assert!(causal_classify_default(&p, &q).is_future());
        }
    }
}
