//! Cauchy-development membership probing: adversarial search for past
//! inextensible causal curves from a point that miss an achronal graph.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::curves::{classify_curve, CausalCurve, CurveClass};
use crate::ein::{causal_classify, null_geodesic_unchecked, CausalClass, EinTildePoint};
use crate::error::{Error, Result};
use crate::graphs::AchronalGraph;
use crate::scalar::{real, to_f64, Scalar};
use crate::sphere::random_tangent;

/// Verdict of `development_membership`. Acceptance is one-sided: no escaping
/// curve was found at the search budget, which is not a proof.
#[derive(Clone, Debug)]
pub enum DevelopmentVerdict<S: Scalar> {
    InsideUpToSampling { probes: usize },
    /// A verified past inextensible causal curve from the query point whose
    /// miss distance to every graph sample exceeds the graph mesh.
    EscapeWitness {
        curve: CausalCurve<S>,
        miss_distance: f64,
    },
}

// Escapes must clear the graph by more than its covering radius plus the
// curve sampling step, so the declared threshold is a multiple of the mesh.
const ESCAPE_MARGIN: f64 = 1.5;

/// Searches past-directed piecewise-null curves from `q` (up to 3 segments,
/// `budget` random direction tuples, plus local refinement around the best
/// candidate) for one that misses the graph over its domain.
pub fn development_membership<S: Scalar>(
    q: &EinTildePoint<S>,
    g: &AchronalGraph<S>,
    budget: usize,
    seed: u64,
) -> Result<DevelopmentVerdict<S>> {
    let mesh = to_f64(g.mesh());
    // A query sitting on the graph meets it outright.
    let on_graph = g
        .samples()
        .iter()
        .any(|(x, f)| to_f64(q.x.distance(x)) + (to_f64(q.t) - to_f64(*f)).abs() <= mesh);
    if on_graph {
        return Ok(DevelopmentVerdict::InsideUpToSampling { probes: 0 });
    }
    let above = g.samples().iter().any(|(x, f)| {
        causal_classify(
            &EinTildePoint { x: x.clone(), t: *f },
            q,
            S::zero(),
        ) == CausalClass::ChronologicalFuture
    });
    if !above {
        return Err(Error::Precondition(
            "query point is not in the chronological future of any graph point".into(),
        ));
    }

    // Curves must be inextensible past the graph: extend beyond min f - pi.
    let t_floor = to_f64(g.min_value()) - std::f64::consts::PI - 0.5;
    let depth = to_f64(q.t) - t_floor;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(f64, Vec<(nalgebra::DVector<S>, f64)>)> = None;

    let draw = |rng: &mut ChaCha8Rng| -> Vec<(nalgebra::DVector<S>, f64)> {
        let breaks: [f64; 2] = [rng.gen_range(0.05..0.6), rng.gen_range(0.05..0.6)];
        let mut plan = Vec::with_capacity(3);
        let mut rest = 1.0;
        for b in breaks {
            plan.push((nalgebra::DVector::<S>::zeros(0), rest * b));
            rest *= 1.0 - b;
        }
        plan.push((nalgebra::DVector::zeros(0), rest));
        plan
    };

    for _ in 0..budget {
        let mut plan = draw(&mut rng);
        let mut at = q.clone();
        for leg in plan.iter_mut() {
            leg.0 = random_tangent(&mut rng, &at.x);
            at = null_geodesic_unchecked(&at, &leg.0, real::<S>(-leg.1 * depth));
        }
        let (miss, _) = evaluate(q, g, depth, &plan);
        if best.as_ref().map_or(true, |(b, _)| miss > *b) {
            best = Some((miss, plan));
        }
    }

    // Local refinement: perturb the best plan's directions with shrinking
    // steps.
    if let Some((mut best_miss, mut best_plan)) = best.take() {
        let mut step = 0.5;
        for _ in 0..6 {
            for _ in 0..budget.max(10) / 2 {
                let mut plan = best_plan.clone();
                let mut at = q.clone();
                for leg in plan.iter_mut() {
                    let jitter = random_tangent(&mut rng, &at.x) * real::<S>(step);
                    let mut dir = &leg.0 + jitter;
                    // Re-project to the tangent sphere at the current point.
                    dir -= at.x.coords() * at.x.coords().dot(&dir);
                    let norm = dir.norm();
                    if to_f64(norm) < 1e-12 {
                        break;
                    }
                    leg.0 = dir / norm;
                    at = null_geodesic_unchecked(&at, &leg.0, real::<S>(-leg.1 * depth));
                }
                let (miss, _) = evaluate(q, g, depth, &plan);
                if miss > best_miss {
                    best_miss = miss;
                    best_plan = plan;
                }
            }
            step *= 0.5;
        }

        if best_miss > ESCAPE_MARGIN * mesh {
            let (_, samples) = evaluate(q, g, depth, &best_plan);
            // Orient future-ward for the curve contract and re-verify.
            let mut ordered = samples;
            ordered.reverse();
            let curve = CausalCurve::new(ordered)?;
            let class = classify_curve(&curve, 1e-9)?;
            if matches!(class, CurveClass::NotCausal { .. }) {
                return Err(Error::Impossible(
                    "escape candidate failed causal re-verification".into(),
                ));
            }
            let (lo, hi) = curve.time_range();
            if to_f64(lo) > to_f64(g.min_value()) - std::f64::consts::PI
                || to_f64(hi) < to_f64(q.t) - 1e-12
            {
                return Err(Error::Impossible(
                    "escape candidate is not inextensible at the required range".into(),
                ));
            }
            return Ok(DevelopmentVerdict::EscapeWitness {
                curve,
                miss_distance: best_miss,
            });
        }
    }
    Ok(DevelopmentVerdict::InsideUpToSampling { probes: budget })
}

/// Builds the sampled past curve for a plan and returns its miss distance to
/// the graph over the graph's domain, in the combined metric d0 + |dt|.
fn evaluate<S: Scalar>(
    q: &EinTildePoint<S>,
    g: &AchronalGraph<S>,
    depth: f64,
    plan: &[(nalgebra::DVector<S>, f64)],
) -> (f64, Vec<EinTildePoint<S>>) {
    let mut samples = vec![q.clone()];
    let mut at = q.clone();
    let mesh = to_f64(g.mesh());
    for (dir, frac) in plan {
        if dir.len() == 0 {
            continue;
        }
        let len = frac * depth;
        // Step fine enough that a true crossing cannot slip between samples.
        let steps = ((4.0 * len / mesh).ceil() as usize).max(8);
        for k in 1..=steps {
            samples.push(null_geodesic_unchecked(
                &at,
                dir,
                real::<S>(-len * k as f64 / steps as f64),
            ));
        }
        at = samples.last().unwrap().clone();
    }
    let mut miss = f64::INFINITY;
    for p in &samples {
        for (x, f) in g.samples() {
            let d = to_f64(p.x.distance(x)) + (to_f64(p.t) - to_f64(*f)).abs();
            miss = miss.min(d);
        }
    }
    (miss, samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::{mesh_points, SpherePoint};

    fn x0() -> SpherePoint<f64> {
        SpherePoint::from_unnormalized(nalgebra::DVector::from_vec(vec![0.6, -0.3, 0.74])).unwrap()
    }

    fn hemisphere_graph(center: &SpherePoint<f64>, mesh: f64) -> AchronalGraph<f64> {
        let samples: Vec<_> = mesh_points::<f64>(2, mesh)
            .into_iter()
            .filter(|x| x.distance(center) < std::f64::consts::FRAC_PI_2)
            .map(|x| (x, 0.0))
            .collect();
        AchronalGraph::from_samples(samples, mesh).unwrap()
    }

    #[test]
    fn full_sphere_graph_keeps_the_point_inside() {
        let g = AchronalGraph::<f64>::constant(2, 0.2, 0.0);
        let q = EinTildePoint { x: x0(), t: 1.0 };
        match development_membership(&q, &g, 60, 5).unwrap() {
            DevelopmentVerdict::InsideUpToSampling { .. } => {}
            DevelopmentVerdict::EscapeWitness { miss_distance, .. } => {
                panic!("escape through a Cauchy graph (miss {miss_distance})")
            }
        }
    }

    #[test]
    fn hemisphere_graph_is_escaped_through_the_hole() {
        let g = hemisphere_graph(&x0(), 0.2);
        let q = EinTildePoint { x: x0(), t: 3.0 };
        match development_membership(&q, &g, 120, 7).unwrap() {
            DevelopmentVerdict::EscapeWitness { curve, miss_distance } => {
                assert!(miss_distance > 0.2);
                assert!(!matches!(
                    classify_curve(&curve, 1e-9).unwrap(),
                    CurveClass::NotCausal { .. }
                ));
                assert!(curve.end().t >= 3.0 - 1e-12);
                assert!(curve.start().t < -std::f64::consts::PI);
            }
            DevelopmentVerdict::InsideUpToSampling { .. } => {
                panic!("expected an escape through the missing hemisphere")
            }
        }
    }

    #[test]
    fn point_on_the_graph_is_inside() {
        let g = AchronalGraph::<f64>::constant(2, 0.2, 0.0);
        let q = EinTildePoint { x: x0(), t: 0.0 };
        assert!(matches!(
            development_membership(&q, &g, 40, 9).unwrap(),
            DevelopmentVerdict::InsideUpToSampling { probes: 0 }
        ));
    }

    #[test]
    fn point_below_every_graph_sample_is_a_precondition_error() {
        let g = AchronalGraph::<f64>::constant(2, 0.2, 0.0);
        let q = EinTildePoint { x: x0(), t: -5.0 };
        assert!(matches!(
            development_membership(&q, &g, 40, 11),
            Err(Error::Precondition(_))
        ));
    }
}
