//! The conformal embedding of Minkowski space R^{1,n} into the cover, its
//! inverse on the Minkowski diamond, and numerical conformality checks.
//!
//! The embedding sends (t_m, y) to the null ray of
//! ((1-q)/2, t_m | y, (1+q)/2) with q = t_m^2 - |y|^2, with the spatial axes
//! adapted so the origin lands on (base, 0). The lifted time coordinate
//! t = atan2(t_m, (1-q)/2) is continuous on all of R^{1,n} because the
//! branch half-line (u1 < 0, t_m = 0) forces q > 1, which is impossible at
//! t_m = 0.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ein::{CausalClass, EinTildePoint};
use crate::error::{Error, Result};
use crate::scalar::{real, to_f64, Scalar};
use crate::sphere::{reflect_last_axis_to, SpherePoint};

/// A point of flat Minkowski space R^{1,n}, split as time and space.
#[derive(Clone, Debug, PartialEq)]
pub struct MinkowskiPoint<S: Scalar> {
    pub t_m: S,
    pub y: DVector<S>,
}

impl<S: Scalar> MinkowskiPoint<S> {
    pub fn new(t_m: S, y: DVector<S>) -> Result<Self> {
        if !to_f64(t_m).is_finite() || y.iter().any(|&c| !to_f64(c).is_finite()) {
            return Err(Error::Validation("non-finite Minkowski coordinates".into()));
        }
        if y.len() < 2 {
            return Err(Error::Validation(format!(
                "spatial dimension must be at least 2, got {}",
                y.len()
            )));
        }
        Ok(Self { t_m, y })
    }

    pub fn origin(n: usize) -> Self {
        Self { t_m: S::zero(), y: DVector::zeros(n) }
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    /// Euclidean norm of (t_m, y), used for radius bounds.
    pub fn euclidean_norm(&self) -> S {
        (self.t_m * self.t_m + self.y.norm_squared()).sqrt()
    }
}

/// The image of the embedding with the given spatial center: the open region
/// d0(base, x) + |t| < pi, equal to I+((base, -pi)) cap I-((base, pi)).
#[derive(Clone, Debug)]
pub struct MinkowskiDiamond<S: Scalar> {
    base: SpherePoint<S>,
}

impl<S: Scalar> MinkowskiDiamond<S> {
    pub fn new(base: SpherePoint<S>) -> Self {
        Self { base }
    }

    pub fn base(&self) -> &SpherePoint<S> {
        &self.base
    }

    /// Signed gap pi - d0(base, x) - |t|; positive strictly inside.
    pub fn boundary_gap(&self, p: &EinTildePoint<S>) -> S {
        S::pi() - self.base.distance(&p.x) - p.t.abs()
    }

    pub fn contains(&self, p: &EinTildePoint<S>) -> bool {
        to_f64(self.boundary_gap(p)) > 0.0
    }
}

/// The conformal embedding, normalized so the origin maps to (base, 0).
pub fn penrose_embed<S: Scalar>(m: &MinkowskiPoint<S>, base: &SpherePoint<S>) -> EinTildePoint<S> {
    let n = m.n();
    let half = real::<S>(0.5);
    let q = m.t_m * m.t_m - m.y.norm_squared();
    let u1 = (S::one() - q) * half;
    // Spatial part in the adapted frame: (y, (1+q)/2).
    let mut w = DVector::<S>::zeros(n + 1);
    w.rows_mut(0, n).copy_from(&m.y);
    w[n] = (S::one() + q) * half;
    let x_adapted = w.normalize();
    let x = SpherePoint::new(reflect_last_axis_to(base, &x_adapted).normalize())
        .expect("reflection of a unit vector is unit");
    let t = to_f64(m.t_m).atan2(to_f64(u1));
    EinTildePoint { x, t: real(t) }
}

/// Closed-form conformal factor of the embedding at `m`: the pullback of
/// the product metric is lambda * (|dy|^2 - dt_m^2) with
/// lambda = 1 / (((1-q)/2)^2 + t_m^2).
pub fn conformal_factor<S: Scalar>(m: &MinkowskiPoint<S>) -> S {
    let half = real::<S>(0.5);
    let q = m.t_m * m.t_m - m.y.norm_squared();
    let u1 = (S::one() - q) * half;
    S::one() / (u1 * u1 + m.t_m * m.t_m)
}

/// Inverse chart on the open diamond, margin 1e-9 from the boundary.
pub fn penrose_inverse<S: Scalar>(
    p: &EinTildePoint<S>,
    base: &SpherePoint<S>,
) -> Result<MinkowskiPoint<S>> {
    let diamond = MinkowskiDiamond::new(base.clone());
    let gap = to_f64(diamond.boundary_gap(p));
    if gap < 1e-9 {
        return Err(Error::OutsideDomain { distance_to_boundary: gap.abs() });
    }
    let n = p.x.n();
    // mu = cos d0 + cos t = 1/|w| for the section representative.
    let adapted = reflect_last_axis_to(base, p.x.coords());
    let mu = adapted[n] + p.t.cos();
    if to_f64(mu) <= 0.0 {
        return Err(Error::OutsideDomain { distance_to_boundary: gap.abs() });
    }
    let t_m = p.t.sin() / mu;
    let y = adapted.rows(0, n).map(|c| c / mu).into_owned();
    MinkowskiPoint::new(t_m, y)
}

/// Causal classification in the flat metric dt_m^2 - |dy|^2, with the same
/// vocabulary as the curved classifier.
pub fn flat_classify<S: Scalar>(a: &MinkowskiPoint<S>, b: &MinkowskiPoint<S>, eps: S) -> CausalClass {
    let dt = b.t_m - a.t_m;
    let dy = (&b.y - &a.y).norm();
    crate::ein::interval_classify(dy, dt, eps)
}

/// Per-sample entry of a conformality report.
#[derive(Clone, Debug)]
pub struct ConformalitySample<S: Scalar> {
    pub point: MinkowskiPoint<S>,
    /// Best proportionality factor of the finite-difference pullback.
    pub factor_fd: f64,
    /// Closed-form factor from the null-cone scaling.
    pub factor_closed: f64,
    /// ||pullback - lambda * eta|| / lambda.
    pub defect: f64,
}

#[derive(Clone, Debug)]
pub struct ConformalityReport<S: Scalar> {
    pub samples: Vec<ConformalitySample<S>>,
    pub max_defect: f64,
    pub max_factor_error: f64,
}

const FD_STEP: f64 = 1e-5;

/// Measures the off-proportionality of the pullback of dsigma^2 - dt^2
/// through the embedding by central finite differences at `count` random
/// points of Euclidean norm at most `radius`.
pub fn conformality_report<S: Scalar>(
    base: &SpherePoint<S>,
    count: usize,
    radius: f64,
    seed: u64,
) -> Result<ConformalityReport<S>> {
    if count == 0 {
        return Err(Error::Validation("need at least one sample".into()));
    }
    let n = base.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(count + 1);
    let mut points = vec![MinkowskiPoint::<S>::origin(n)];
    for _ in 1..count {
        let t_m = real::<S>(rng.gen_range(-radius..radius));
        let y = DVector::from_fn(n, |_, _| real::<S>(rng.gen_range(-radius..radius)));
        let p = MinkowskiPoint { t_m, y };
        if to_f64(p.euclidean_norm()) <= radius {
            points.push(p);
        }
    }
    for point in points {
        samples.push(conformality_at(base, &point));
    }
    let max_defect = samples.iter().map(|s| s.defect).fold(0.0, f64::max);
    let max_factor_error = samples
        .iter()
        .map(|s| (s.factor_fd - s.factor_closed).abs() / s.factor_closed)
        .fold(0.0, f64::max);
    Ok(ConformalityReport { samples, max_defect, max_factor_error })
}

/// Finite-difference pullback at one point.
pub fn conformality_at<S: Scalar>(
    base: &SpherePoint<S>,
    m: &MinkowskiPoint<S>,
) -> ConformalitySample<S> {
    let n = m.n();
    let dim = n + 1;
    let h = FD_STEP;

    // Tangent images of the coordinate directions (t_m first, then y).
    let mut dx: Vec<DVector<f64>> = Vec::with_capacity(n + 1);
    let mut dt: Vec<f64> = Vec::with_capacity(n + 1);
    let shifted = |dt_m: f64, axis: Option<usize>, sgn: f64| -> EinTildePoint<S> {
        let mut p = m.clone();
        p.t_m += real::<S>(sgn * dt_m);
        if let Some(a) = axis {
            p.y[a] += real::<S>(sgn * h);
        }
        penrose_embed(&p, base)
    };
    for a in 0..=n {
        let (plus, minus) = if a == 0 {
            (shifted(h, None, 1.0), shifted(h, None, -1.0))
        } else {
            (shifted(0.0, Some(a - 1), 1.0), shifted(0.0, Some(a - 1), -1.0))
        };
        let mut v = DVector::<f64>::zeros(dim);
        for i in 0..dim {
            v[i] = (to_f64(plus.x.coords()[i]) - to_f64(minus.x.coords()[i])) / (2.0 * h);
        }
        dx.push(v);
        dt.push((to_f64(plus.t) - to_f64(minus.t)) / (2.0 * h));
    }

    // Pullback G_ab = <dx_a, dx_b> - dt_a dt_b, to be compared against
    // lambda * eta with eta = diag(-1, I_n) in (t_m, y) order.
    let k = n + 1;
    let mut g = nalgebra::DMatrix::<f64>::zeros(k, k);
    for a in 0..k {
        for b in 0..k {
            g[(a, b)] = dx[a].dot(&dx[b]) - dt[a] * dt[b];
        }
    }
    let mut eta = nalgebra::DMatrix::<f64>::identity(k, k);
    eta[(0, 0)] = -1.0;
    let lambda = g.dot(&eta) / eta.dot(&eta);
    let defect = (&g - &eta * lambda).norm() / lambda;

    ConformalitySample {
        point: m.clone(),
        factor_fd: lambda,
        factor_closed: to_f64(conformal_factor(m)),
        defect,
    }
}

/// Exhaustion constant: the smallest c (reported as a max over samples) such
/// that every sampled diamond point with boundary gap at least c/r lies in
/// the image of the Euclidean ball of radius r.
pub fn exhaustion_constant<S: Scalar>(
    base: &SpherePoint<S>,
    r: f64,
    count: usize,
    seed: u64,
) -> Result<f64> {
    if r <= 0.0 || count == 0 {
        return Err(Error::Validation("need positive radius and sample count".into()));
    }
    let diamond = MinkowskiDiamond::new(base.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c: f64 = 0.0;
    let mut accepted = 0usize;
    while accepted < count {
        let x = crate::sphere::random_point::<S, _>(&mut rng, base.n());
        let t = real::<S>(rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI));
        let p = EinTildePoint { x, t };
        let gap = to_f64(diamond.boundary_gap(&p));
        if gap <= 1e-6 {
            continue;
        }
        accepted += 1;
        let inv = penrose_inverse(&p, base)?;
        if to_f64(inv.euclidean_norm()) > r {
            c = c.max(gap * r);
        }
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::{classify_curve, CausalCurve, CurveClass};
    use crate::ein::causal_classify;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn base() -> SpherePoint<f64> {
        SpherePoint::from_unnormalized(DVector::from_vec(vec![0.3, -0.5, 0.81])).unwrap()
    }

    fn random_minkowski(rng: &mut ChaCha8Rng, radius: f64) -> MinkowskiPoint<f64> {
        MinkowskiPoint {
            t_m: rng.gen_range(-radius..radius),
            y: DVector::from_fn(2, |_, _| rng.gen_range(-radius..radius)),
        }
    }

    #[test]
    fn origin_maps_to_base_at_time_zero() {
        let b = base();
        let p = penrose_embed(&MinkowskiPoint::<f64>::origin(2), &b);
        assert!(p.x.distance(&b) < 1e-12);
        assert_eq!(p.t, 0.0);
    }

    #[test]
    fn image_lies_in_the_diamond_and_is_injective() {
        let b = base();
        let diamond = MinkowskiDiamond::new(b.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut images: Vec<EinTildePoint<f64>> = Vec::new();
        for _ in 0..300 {
            let m = random_minkowski(&mut rng, 20.0);
            let p = penrose_embed(&m, &b);
            assert!(diamond.contains(&p), "image escaped the diamond");
            for q in &images {
                assert!(p.x.distance(&q.x) + (p.t - q.t).abs() > 1e-12);
            }
            images.push(p);
        }
    }

    #[test]
    fn null_rays_embed_to_null_geodesics() {
        let b = base();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10 {
            // A random affine null line: direction (1, u) with |u| = 1.
            let a: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let u = DVector::from_vec(vec![a.cos(), a.sin()]);
            let y0 = DVector::from_fn(2, |_, _| rng.gen_range(-2.0..2.0));
            let t0: f64 = rng.gen_range(-2.0..2.0);
            let samples: Vec<EinTildePoint<f64>> = (0..50)
                .map(|i| {
                    let s = -3.0 + 6.0 * i as f64 / 49.0;
                    let m = MinkowskiPoint {
                        t_m: t0 + s,
                        y: &y0 + &u * s,
                    };
                    penrose_embed(&m, &b)
                })
                .collect();
            let curve = CausalCurve::new(samples).unwrap();
            assert_eq!(classify_curve(&curve, 1e-9).unwrap(), CurveClass::NullGeodesic);
        }
        // The radial ray t_m = r through the origin.
        let samples: Vec<EinTildePoint<f64>> = (0..50)
            .map(|i| {
                let s = 0.05 + 8.0 * i as f64 / 49.0;
                let m = MinkowskiPoint { t_m: s, y: DVector::from_vec(vec![s, 0.0]) };
                penrose_embed(&m, &b)
            })
            .collect();
        let curve = CausalCurve::new(samples).unwrap();
        assert_eq!(classify_curve(&curve, 1e-9).unwrap(), CurveClass::NullGeodesic);
    }

    #[test]
    fn far_points_approach_the_boundary() {
        let b = base();
        let diamond = MinkowskiDiamond::new(b.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let dir = crate::sphere::random_point::<f64, _>(&mut rng, 2);
            let m = MinkowskiPoint {
                t_m: 1e3 * dir.coords()[0],
                y: DVector::from_vec(vec![1e3 * dir.coords()[1], 1e3 * dir.coords()[2]]),
            };
            let gap = diamond.boundary_gap(&penrose_embed(&m, &b));
            assert!(gap > 0.0 && gap < 2e-3, "gap = {gap}");
        }
    }

    #[test]
    fn round_trip_is_exact_to_1e8() {
        let b = base();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut worst: f64 = 0.0;
        for _ in 0..1000 {
            let m = random_minkowski(&mut rng, 10.0 / 3f64.sqrt());
            let back = penrose_inverse(&penrose_embed(&m, &b), &b).unwrap();
            let err = ((back.t_m - m.t_m).powi(2) + (&back.y - &m.y).norm_squared()).sqrt()
                / (1.0 + to_f64(m.euclidean_norm()));
            worst = worst.max(err);
        }
        assert!(worst < 1e-8, "worst relative round-trip error {worst}");
    }

    #[test]
    fn inverse_of_base_is_origin_and_boundary_is_rejected() {
        let b = base();
        let m = penrose_inverse(&EinTildePoint { x: b.clone(), t: 0.0 }, &b).unwrap();
        assert!(to_f64(m.euclidean_norm()) < 1e-12);

        // A point with d0 = pi/2 and t = pi/2 sits on the null boundary.
        let dir = b.tangent_basis().remove(0);
        let x = b.walk(&dir, PI / 2.0);
        match penrose_inverse(&EinTildePoint { x, t: PI / 2.0 }, &b) {
            Err(Error::OutsideDomain { distance_to_boundary }) => {
                assert!(distance_to_boundary < 1e-9)
            }
            other => panic!("expected OutsideDomain, got {other:?}"),
        }
    }

    #[test]
    fn conformality_at_origin_and_at_random_points() {
        let b = base();
        let report = conformality_report(&b, 200, 5.0, 7).unwrap();
        let origin = &report.samples[0];
        assert!(origin.defect < 1e-6, "origin defect {}", origin.defect);
        assert_relative_eq!(origin.factor_closed, 4.0, epsilon = 1e-12);
        assert!((origin.factor_fd - 4.0).abs() / 4.0 < 1e-5);
        assert!(report.max_defect < 1e-5, "max defect {}", report.max_defect);
        assert!(
            report.max_factor_error < 1e-5,
            "factor error {}",
            report.max_factor_error
        );
    }

    #[test]
    fn flat_and_curved_classifications_agree() {
        let b = base();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..10_000 {
            let m1 = random_minkowski(&mut rng, 4.0);
            let m2 = random_minkowski(&mut rng, 4.0);
            let flat = flat_classify(&m1, &m2, 1e-7);
            let curved = causal_classify(
                &penrose_embed(&m1, &b),
                &penrose_embed(&m2, &b),
                1e-7,
            );
            if matches!(
                flat,
                CausalClass::CausalNullFuture | CausalClass::CausalNullPast
            ) {
                continue; // measure-zero boundary band
            }
            assert_eq!(flat, curved, "disagreement at {m1:?} vs {m2:?}");
        }
    }

    #[test]
    fn diamond_membership_matches_the_two_cones() {
        let b = base();
        let diamond = MinkowskiDiamond::new(b.clone());
        let tip_past = EinTildePoint { x: b.clone(), t: -PI };
        let tip_future = EinTildePoint { x: b.clone(), t: PI };
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..500 {
            let p = EinTildePoint {
                x: crate::sphere::random_point::<f64, _>(&mut rng, 2),
                t: rng.gen_range(-4.0..4.0),
            };
            let inside = causal_classify(&tip_past, &p, 0.0) == CausalClass::ChronologicalFuture
                && causal_classify(&p, &tip_future, 0.0) == CausalClass::ChronologicalFuture;
            assert_eq!(diamond.contains(&p), inside);
        }
    }

    #[test]
    fn exhaustion_constant_is_bounded_and_monotone() {
        let b = base();
        let c10 = exhaustion_constant(&b, 10.0, 400, 11).unwrap();
        let c100 = exhaustion_constant(&b, 100.0, 400, 11).unwrap();
        assert!(c10 > 0.0 && c10 < 10.0, "c10 = {c10}");
        assert!(c100 <= c10 * 1.5, "c10 = {c10}, c100 = {c100}");
    }
}
