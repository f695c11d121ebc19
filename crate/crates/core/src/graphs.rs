//! Achronal graphs t = f(x): candidate Cauchy hypersurfaces as data.
//!
//! A graph is achronal exactly when f is 1-Lipschitz for d_0; a full-sphere
//! achronal graph is compact, edgeless and therefore Cauchy. Both facts are
//! checked here by direct scans.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::{real, to_f64, Scalar};
use crate::sphere::{mesh_points, random_tangent, SpherePoint};

/// A sampled function slice t = f(x) over a subset of S^n.
#[derive(Clone, Debug)]
pub struct AchronalGraph<S: Scalar> {
    samples: Vec<(SpherePoint<S>, S)>,
    full_sphere: bool,
    mesh: S,
}

/// Certificate produced by a successful achronality scan.
#[derive(Clone, Copy, Debug)]
pub struct AchronalityCert<S: Scalar> {
    /// sup |f(a)-f(b)| / d_0(a,b) over sampled pairs at separation >= mesh/2.
    pub lipschitz_sup: S,
    /// max (|f(a)-f(b)| - d_0(a,b)) over all sampled pairs.
    pub max_excess: S,
}

/// A violating pair: the two graph points are chronologically related.
#[derive(Clone, Debug)]
pub struct AchronalityViolation<S: Scalar> {
    pub i: usize,
    pub j: usize,
    pub a: (SpherePoint<S>, S),
    pub b: (SpherePoint<S>, S),
    pub excess: S,
}

/// Result of probing a full-sphere graph with random inextensible null
/// geodesics.
#[derive(Clone, Debug)]
pub struct CauchyReport<S: Scalar> {
    pub probes: usize,
    /// Affine parameter of the crossing found by each probe.
    pub crossing_params: Vec<S>,
    /// True when every probe's crossing function was nondecreasing on the
    /// checked grid and changed sign exactly once.
    pub monotone_ok: bool,
    pub unique_ok: bool,
    /// Central-difference slope of the crossing function at each crossing.
    pub crossing_slopes: Vec<S>,
    pub verdict: bool,
}

impl<S: Scalar> AchronalGraph<S> {
    /// A graph over an explicit proper sample domain.
    pub fn from_samples(samples: Vec<(SpherePoint<S>, S)>, mesh: S) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Validation("graph needs at least one sample".into()));
        }
        Ok(Self { samples, full_sphere: false, mesh })
    }

    /// A graph whose sample set is declared to cover the whole sphere at
    /// resolution `mesh`.
    pub fn from_samples_full_sphere(samples: Vec<(SpherePoint<S>, S)>, mesh: S) -> Self {
        Self { samples, full_sphere: true, mesh }
    }

    /// Samples f over the standard full-sphere mesh at `resolution`.
    pub fn from_fn_full_sphere(
        n: usize,
        resolution: f64,
        f: impl Fn(&SpherePoint<S>) -> S,
    ) -> Self {
        let samples = mesh_points(n, resolution)
            .into_iter()
            .map(|x| {
                let v = f(&x);
                (x, v)
            })
            .collect();
        Self { samples, full_sphere: true, mesh: real(resolution) }
    }

    pub fn constant(n: usize, resolution: f64, value: S) -> Self {
        Self::from_fn_full_sphere(n, resolution, |_| value)
    }

    pub fn samples(&self) -> &[(SpherePoint<S>, S)] {
        &self.samples
    }

    pub fn is_full_sphere(&self) -> bool {
        self.full_sphere
    }

    pub fn mesh(&self) -> S {
        self.mesh
    }

    pub fn n(&self) -> usize {
        self.samples[0].0.n()
    }

    pub fn min_value(&self) -> S {
        self.samples.iter().map(|(_, f)| *f).fold(self.samples[0].1, |a, b| a.min(b))
    }

    pub fn max_value(&self) -> S {
        self.samples.iter().map(|(_, f)| *f).fold(self.samples[0].1, |a, b| a.max(b))
    }

    /// The tight 1-Lipschitz extension of the samples (McShane upper
    /// envelope): min_i f_i + d_0(x, x_i). Agrees with f at the samples when
    /// the graph is achronal, and is exactly 1-Lipschitz everywhere.
    pub fn value_at(&self, x: &SpherePoint<S>) -> S {
        self.samples
            .iter()
            .map(|(xi, fi)| *fi + x.distance(xi))
            .fold(real::<S>(f64::INFINITY), |a, b| a.min(b))
    }

    /// Distance from `x` to the nearest sample of the domain.
    pub fn domain_distance(&self, x: &SpherePoint<S>) -> S {
        self.samples
            .iter()
            .map(|(xi, _)| x.distance(xi))
            .fold(real::<S>(f64::INFINITY), |a, b| a.min(b))
    }

    /// The time-reflected graph t = -f(x).
    pub fn time_reflected(&self) -> Self {
        Self {
            samples: self.samples.iter().map(|(x, f)| (x.clone(), -*f)).collect(),
            full_sphere: self.full_sphere,
            mesh: self.mesh,
        }
    }

    /// Full pairwise achronality scan: |f(a) - f(b)| <= d_0(a,b) + eps.
    pub fn is_achronal(
        &self,
        eps: S,
    ) -> std::result::Result<AchronalityCert<S>, AchronalityViolation<S>> {
        let mut lipschitz_sup = S::zero();
        let mut max_excess = real::<S>(f64::NEG_INFINITY);
        let sep_floor = self.mesh * real::<S>(0.5);
        for i in 0..self.samples.len() {
            let (xi, fi) = &self.samples[i];
            for j in (i + 1)..self.samples.len() {
                let (xj, fj) = &self.samples[j];
                let d = xi.distance(xj);
                let df = (*fi - *fj).abs();
                let excess = df - d;
                if excess > eps {
                    return Err(AchronalityViolation {
                        i,
                        j,
                        a: (xi.clone(), *fi),
                        b: (xj.clone(), *fj),
                        excess,
                    });
                }
                if excess > max_excess {
                    max_excess = excess;
                }
                if d >= sep_floor {
                    let ratio = df / d;
                    if ratio > lipschitz_sup {
                        lipschitz_sup = ratio;
                    }
                }
            }
        }
        Ok(AchronalityCert { lipschitz_sup, max_excess })
    }

    /// Probes a full-sphere achronal graph with random inextensible null
    /// geodesics: each crossing function s -> t(s) - f(x(s)) must be
    /// nondecreasing and change sign exactly once.
    pub fn is_cauchy(&self, probes: usize, seed: u64, eps: S) -> Result<CauchyReport<S>> {
        if !self.full_sphere {
            return Err(Error::Precondition(
                "Cauchy verification requires a full-sphere graph (compact, edgeless)".into(),
            ));
        }
        if self.is_achronal(eps).is_err() {
            return Err(Error::Precondition(
                "Cauchy verification requires an achronal graph".into(),
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fmin = to_f64(self.min_value());
        let fmax = to_f64(self.max_value());
        let mut crossing_params = Vec::with_capacity(probes);
        let mut crossing_slopes = Vec::with_capacity(probes);
        let mut monotone_ok = true;
        let mut unique_ok = true;

        for _ in 0..probes {
            let x0: SpherePoint<S> = crate::sphere::random_point(&mut rng, self.n());
            let dir = random_tangent(&mut rng, &x0);
            let t0: f64 = rng.gen_range(fmin - 1.0..fmax + 1.0);
            let h = |s: f64| -> f64 {
                let x = x0.walk(&dir, real(s));
                t0 + s - to_f64(self.value_at(&x))
            };
            let mut lo = fmin - t0 - 1.0;
            let mut hi = fmax - t0 + 1.0;
            debug_assert!(h(lo) < 0.0 && h(hi) > 0.0);

            // Monotonicity and sign-change count on a grid.
            let grid = 48;
            let mut prev = h(lo);
            let mut sign_changes = 0;
            let eps_f = to_f64(eps);
            for k in 1..=grid {
                let s = lo + (hi - lo) * k as f64 / grid as f64;
                let v = h(s);
                if v < prev - eps_f.max(1e-12) {
                    monotone_ok = false;
                }
                if prev < -eps_f && v > eps_f {
                    sign_changes += 1;
                } else if prev > eps_f && v < -eps_f {
                    sign_changes += 1;
                    unique_ok = false;
                }
                if v.abs() > eps_f {
                    prev = v;
                }
            }
            if sign_changes != 1 {
                unique_ok = false;
            }

            // Bisect for the crossing parameter.
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if h(mid) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let s_star = 0.5 * (lo + hi);
            crossing_params.push(real(s_star));
            // Step at mesh scale: the McShane extension carries mesh-size
            // ripples whose gradients would dominate a smaller difference.
            let step = (2.0 * to_f64(self.mesh)).max(1e-4);
            crossing_slopes.push(real((h(s_star + step) - h(s_star - step)) / (2.0 * step)));
        }

        let verdict = monotone_ok && unique_ok;
        Ok(CauchyReport {
            probes,
            crossing_params,
            monotone_ok,
            unique_ok,
            crossing_slopes,
            verdict,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ein::{causal_classify_default, CausalClass, EinTildePoint};
    use std::f64::consts::PI;

    fn center() -> SpherePoint<f64> {
        SpherePoint::axis(2, 0)
    }

    #[test]
    fn constant_graph_is_achronal_and_cauchy() {
        let g = AchronalGraph::<f64>::constant(2, 0.25, 0.0);
        let cert = g.is_achronal(1e-9).expect("constant graph is achronal");
        assert!(cert.lipschitz_sup < 1e-9);
        let report = g.is_cauchy(50, 42, 1e-9).unwrap();
        assert!(report.verdict);
        // Every probe crosses where t(s) = 0.
        for (s, slope) in report.crossing_params.iter().zip(&report.crossing_slopes) {
            assert!(s.is_finite());
            assert!(*slope > 0.8, "crossing slope {slope} should be near 1 for f = 0");
        }
    }

    #[test]
    fn super_lipschitz_graph_is_refuted_with_chronological_witness() {
        let x0 = center();
        let g = AchronalGraph::<f64>::from_fn_full_sphere(2, 0.25, |x| 1.5 * x0.distance(x));
        let violation = g.is_achronal(1e-9).expect_err("Lipschitz constant 1.5 must fail");
        let (xa, fa) = violation.a;
        let (xb, fb) = violation.b;
        let pa = EinTildePoint::new(xa, fa).unwrap();
        let pb = EinTildePoint::new(xb, fb).unwrap();
        let class = causal_classify_default(&pa, &pb);
        assert!(
            matches!(class, CausalClass::ChronologicalFuture | CausalClass::ChronologicalPast),
            "violating pair should be chronologically related, got {class:?}"
        );
    }

    #[test]
    fn time_reflection_preserves_achronality() {
        let x0 = center();
        let g = AchronalGraph::<f64>::from_fn_full_sphere(2, 0.3, |x| {
            0.5 * (x0.distance(x) - 1.0).abs()
        });
        assert!(g.is_achronal(1e-9).is_ok());
        assert!(g.time_reflected().is_achronal(1e-9).is_ok());
    }

    #[test]
    fn hemisphere_graph_is_rejected_for_cauchy_check() {
        let x0 = center();
        let samples: Vec<_> = mesh_points::<f64>(2, 0.3)
            .into_iter()
            .filter(|x| x0.distance(x) <= PI / 2.0)
            .map(|x| (x, 0.0))
            .collect();
        let g = AchronalGraph::from_samples(samples, 0.3).unwrap();
        assert!(matches!(g.is_cauchy(10, 1, 1e-9), Err(Error::Precondition(_))));
    }

    #[test]
    fn strict_lipschitz_crossing_slope_is_bounded_below() {
        let x0 = center();
        let c = 0.6;
        let g = AchronalGraph::<f64>::from_fn_full_sphere(2, 0.2, |x| c * x0.distance(x));
        let report = g.is_cauchy(100, 9, 1e-9).unwrap();
        assert!(report.verdict);
        let delta = 1.0 - c;
        for slope in &report.crossing_slopes {
            assert!(
                *slope >= delta - 0.25,
                "slope {slope} below strictness margin {delta}"
            );
        }
    }

    #[test]
    fn mcshane_extension_matches_samples() {
        let x0 = center();
        let g = AchronalGraph::<f64>::from_fn_full_sphere(2, 0.3, |x| -x0.distance(x));
        for (x, f) in g.samples() {
            assert!((g.value_at(x) - *f).abs() < 1e-12);
        }
    }
}
