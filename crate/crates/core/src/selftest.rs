//! The acceptance suite: eleven numbered verification harnesses, each
//! returning a pass/fail line with its measured quantities. All randomness
//! is seeded, so the whole report is a pure function of its scale.

use std::collections::BinaryHeap;
use std::fmt::Write as _;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::causal_set::sprinkle;
use crate::conformal::{apply_ein, fit_liouville, random_orthogonal};
use crate::curves::{classify_curve, sampled_null_geodesic, CausalCurve, CurveClass};
use crate::domains::{boundary_split, is_causally_convex, expansion_check, ConvexityVerdict, Domain};
use crate::ein::{
    boundary_of_past, causal_classify, delta, null_geodesic_unchecked, sigma,
    totally_vicious_witness, CausalClass, EinPoint, EinTildePoint,
};
use crate::embed::{conformality_report, flat_classify, penrose_embed, MinkowskiPoint};
use crate::graphs::AchronalGraph;
use crate::sphere::{fibonacci_sphere, random_point, random_tangent, SpherePoint};

/// Suite scale: `Full` runs the stated budgets; `Quick` shrinks them for the
/// determinism double-run and for smoke testing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scale {
    Full,
    Quick,
}

#[derive(Clone, Debug)]
pub struct CriterionResult {
    pub index: usize,
    pub name: &'static str,
    pub passed: bool,
    pub details: String,
}

impl CriterionResult {
    fn line(&self) -> String {
        format!(
            "criterion {:02} {} {}: {}",
            self.index,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.details
        )
    }
}

#[derive(Clone, Debug)]
pub struct SelfTestReport {
    pub results: Vec<CriterionResult>,
}

impl SelfTestReport {
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for r in &self.results {
            let _ = writeln!(out, "{}", r.line());
        }
        let _ = writeln!(
            out,
            "summary: {}/{} criteria passed",
            self.results.iter().filter(|r| r.passed).count(),
            self.results.len()
        );
        out
    }
}

/// Runs all eleven criteria.
pub fn run_all(scale: Scale) -> SelfTestReport {
    let mut results: Vec<CriterionResult> = (1..=10).map(|i| run_criterion(i, scale)).collect();
    results.push(criterion_11_determinism());
    SelfTestReport { results }
}

/// Runs one of criteria 1..=10 (11 is only meaningful over the whole suite).
pub fn run_criterion(index: usize, scale: Scale) -> CriterionResult {
    match index {
        1 => criterion_1_oracle_equivalence(scale),
        2 => criterion_2_refocusing(scale),
        3 => criterion_3_sigma_squared(scale),
        4 => criterion_4_liouville(scale),
        5 => criterion_5_penrose(scale),
        6 => criterion_6_compact_cauchy(scale),
        7 => criterion_7_limit_curve(scale),
        8 => criterion_8_domains(scale),
        9 => criterion_9_expansion(scale),
        10 => criterion_10_vicious(scale),
        11 => criterion_11_determinism(),
        _ => panic!("criterion index must be 1..=11"),
    }
}

/// Criterion 1: the closed-form classifier against a brute-force lattice
/// search for discrete 1-Lipschitz paths (shortest paths on a sphere-grid
/// hop graph), on pairs whose margin exceeds the lattice resolution.
fn criterion_1_oracle_equivalence(scale: Scale) -> CriterionResult {
    let (pairs, node_count) = match scale {
        Scale::Full => (10_000, 64 * 64),
        Scale::Quick => (400, 1024),
    };
    let resolution = std::f64::consts::TAU / 64.0;
    let nodes = fibonacci_sphere::<f64>(node_count);
    let coords: Vec<&DVector<f64>> = nodes.iter().map(|p| p.coords()).collect();
    let spacing = (4.0 * std::f64::consts::PI / node_count as f64).sqrt();
    let hop = 2.2 * spacing;

    // Static adjacency of the sphere grid.
    let mut adj: Vec<Vec<(u32, f64)>> = vec![Vec::new(); node_count];
    for i in 0..node_count {
        for j in (i + 1)..node_count {
            let d = nodes[i].distance(&nodes[j]);
            if d <= hop {
                adj[i].push((j as u32, d));
                adj[j].push((i as u32, d));
            }
        }
    }

    #[derive(PartialEq)]
    struct Entry(f64, u32);
    impl Eq for Entry {}
    impl PartialOrd for Entry {
        fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(other))
        }
    }
    impl Ord for Entry {
        fn cmp(&self, other: &Self) -> std::cmp::Ordering {
            other.0.partial_cmp(&self.0).unwrap()
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0xE11);
    let mut compared = 0usize;
    let mut mismatches = 0usize;
    let mut dist = vec![f64::INFINITY; node_count];
    for _ in 0..pairs {
        let p = EinTildePoint::<f64> {
            x: random_point(&mut rng, 2),
            t: rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI),
        };
        let q = EinTildePoint::<f64> {
            x: random_point(&mut rng, 2),
            t: rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI),
        };
        let d0 = p.x.distance(&q.x);
        let dt_abs = (q.t - p.t).abs();
        let margin = (d0 - dt_abs).abs();
        if margin <= resolution {
            continue;
        }
        compared += 1;

        // Lattice path length from p to q: Dijkstra over the hop graph with
        // the query endpoints attached to nearby nodes.
        let cap = dt_abs.min(std::f64::consts::PI) + resolution;
        let mut best = if d0 <= hop { d0 } else { f64::INFINITY };
        dist.fill(f64::INFINITY);
        let mut heap: BinaryHeap<Entry> = BinaryHeap::new();
        for (i, c) in coords.iter().enumerate() {
            let d = crate::sphere::sphere_distance(p.x.coords(), c).unwrap();
            if d <= hop {
                dist[i] = d;
                heap.push(Entry(d, i as u32));
            }
        }
        while let Some(Entry(d, i)) = heap.pop() {
            if d > dist[i as usize] || d > cap || d >= best {
                continue;
            }
            let tail = nodes[i as usize].distance(&q.x);
            if tail <= hop {
                best = best.min(d + tail);
            }
            for &(j, w) in &adj[i as usize] {
                let nd = d + w;
                if nd < dist[j as usize] {
                    dist[j as usize] = nd;
                    heap.push(Entry(nd, j as u32));
                }
            }
        }

        let oracle_causal = best <= dt_abs;
        let closed_form = !matches!(causal_classify(&p, &q, 0.0), CausalClass::Unrelated);
        if oracle_causal != closed_form {
            mismatches += 1;
        }
    }
    CriterionResult {
        index: 1,
        name: "causal-formula oracle equivalence",
        passed: mismatches == 0,
        details: format!("{mismatches} mismatches over {compared} comparable pairs (of {pairs})"),
    }
}

/// Criterion 2: refocusing of null geodesics at sigma(p) and delta(p), and
/// separation of distinct geodesics strictly between conjugate points.
fn criterion_2_refocusing(scale: Scale) -> CriterionResult {
    let count = match scale {
        Scale::Full => 100,
        Scale::Quick => 30,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0xE22);
    let mut max_refocus: f64 = 0.0;
    for _ in 0..count {
        let p = EinTildePoint::<f64> {
            x: random_point(&mut rng, 2),
            t: rng.gen_range(-2.0..2.0),
        };
        let dir = random_tangent(&mut rng, &p.x);
        let at_pi = null_geodesic_unchecked(&p, &dir, std::f64::consts::PI);
        let s = sigma(&p);
        max_refocus = max_refocus.max(at_pi.x.distance(&s.x) + (at_pi.t - s.t).abs());
        let at_tau = null_geodesic_unchecked(&p, &dir, std::f64::consts::TAU);
        let d = delta(&p);
        max_refocus = max_refocus.max(at_tau.x.distance(&d.x) + (at_tau.t - d.t).abs());
    }

    let mut min_sep = f64::INFINITY;
    for _ in 0..count {
        let p = EinTildePoint::<f64> {
            x: random_point(&mut rng, 2),
            t: 0.0,
        };
        let d1 = random_tangent(&mut rng, &p.x);
        let d2 = random_tangent(&mut rng, &p.x);
        for k in 0..=64 {
            let s = std::f64::consts::PI * (0.1 + 0.8 * k as f64 / 64.0);
            let a = null_geodesic_unchecked(&p, &d1, s);
            let b = null_geodesic_unchecked(&p, &d2, s);
            min_sep = min_sep.min(a.x.distance(&b.x));
        }
    }
    let passed = max_refocus < 1e-9 && min_sep > 1e-3;
    CriterionResult {
        index: 2,
        name: "refocusing at conjugate points",
        passed,
        details: format!("max refocusing error {max_refocus:.3e}, min interior separation {min_sep:.3e}"),
    }
}

/// Criterion 3: sigma^2 = delta, exactly on the sphere part and to one
/// rounding on the time part.
fn criterion_3_sigma_squared(scale: Scale) -> CriterionResult {
    let count = match scale {
        Scale::Full => 1000,
        Scale::Quick => 200,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0xE33);
    let mut failures = 0usize;
    for _ in 0..count {
        let p = EinTildePoint::<f64> {
            x: random_point(&mut rng, 2),
            t: rng.gen_range(-10.0..10.0),
        };
        let ss = sigma(&sigma(&p));
        let d = delta(&p);
        let sphere_exact = ss.x.coords() == d.x.coords();
        let t_err = (ss.t - d.t).abs();
        let t_ok = t_err <= 4.0 * f64::EPSILON * d.t.abs().max(1.0);
        if !sphere_exact || !t_ok {
            failures += 1;
        }
    }
    CriterionResult {
        index: 3,
        name: "sigma squared equals delta",
        passed: failures == 0,
        details: format!("{failures} failures over {count} points"),
    }
}

/// Criterion 4: Liouville reconstruction round trip and rigidity.
fn criterion_4_liouville(scale: Scale) -> CriterionResult {
    let count = match scale {
        Scale::Full => 50,
        Scale::Quick => 6,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0xE44);
    let mut max_defect: f64 = 0.0;
    let mut max_residual: f64 = 0.0;
    let mut max_rigidity: f64 = 0.0;
    let mut failed = false;
    for k in 0..count {
        let magnitude = rng.gen_range(0.1..2.0);
        let g = random_orthogonal::<f64>(2, 0xE440 + k as u64, magnitude);
        let sample = |rng: &mut ChaCha8Rng| -> Vec<(EinPoint<f64>, EinPoint<f64>)> {
            (0..8)
                .map(|_| {
                    let e = EinPoint::new(
                        random_point(rng, 2),
                        rng.gen_range(0.0..std::f64::consts::TAU),
                    )
                    .unwrap();
                    let img = apply_ein(&g, &e).unwrap();
                    (e, img)
                })
                .collect()
        };
        let c1 = sample(&mut rng);
        let c2 = sample(&mut rng);
        match (fit_liouville(&c1), fit_liouville(&c2)) {
            (Ok(f1), Ok(f2)) => {
                max_defect = max_defect.max((f1.transform.matrix() - g.matrix()).norm());
                max_residual = max_residual.max(f1.residual);
                max_rigidity =
                    max_rigidity.max((f1.transform.matrix() - f2.transform.matrix()).norm());
            }
            _ => failed = true,
        }
    }
    let passed = !failed && max_defect < 1e-6 && max_residual < 1e-8 && max_rigidity < 1e-6;
    CriterionResult {
        index: 4,
        name: "Liouville round trip",
        passed,
        details: format!(
            "max matrix defect {max_defect:.3e}, max residual {max_residual:.3e}, \
             disjoint-set disagreement {max_rigidity:.3e}"
        ),
    }
}

/// Criterion 5: conformality of the Minkowski embedding, causal agreement
/// with the flat form, and null-line correspondence.
fn criterion_5_penrose(scale: Scale) -> CriterionResult {
    let (conf_samples, pair_count, lines) = match scale {
        Scale::Full => (200, 10_000, 20),
        Scale::Quick => (40, 1500, 5),
    };
    let base = SpherePoint::<f64>::from_unnormalized(DVector::from_vec(vec![0.3, -0.5, 0.81]))
        .unwrap();
    let report = conformality_report(&base, conf_samples, 5.0, 0xE55).unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(0xE56);
    let mut disagreements = 0usize;
    for _ in 0..pair_count {
        let m1 = MinkowskiPoint::<f64> {
            t_m: rng.gen_range(-4.0..4.0),
            y: DVector::from_fn(2, |_, _| rng.gen_range(-4.0..4.0)),
        };
        let m2 = MinkowskiPoint::<f64> {
            t_m: rng.gen_range(-4.0..4.0),
            y: DVector::from_fn(2, |_, _| rng.gen_range(-4.0..4.0)),
        };
        let flat = flat_classify(&m1, &m2, 1e-7);
        if matches!(flat, CausalClass::CausalNullFuture | CausalClass::CausalNullPast) {
            continue;
        }
        let curved = causal_classify(&penrose_embed(&m1, &base), &penrose_embed(&m2, &base), 1e-7);
        if flat != curved {
            disagreements += 1;
        }
    }

    let mut bad_lines = 0usize;
    for _ in 0..lines {
        let a: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let u = DVector::from_vec(vec![a.cos(), a.sin()]);
        let y0 = DVector::from_fn(2, |_, _| rng.gen_range(-2.0..2.0));
        let t0: f64 = rng.gen_range(-2.0..2.0);
        let samples: Vec<EinTildePoint<f64>> = (0..50)
            .map(|i| {
                let s = -3.0 + 6.0 * i as f64 / 49.0;
                penrose_embed(&MinkowskiPoint { t_m: t0 + s, y: &y0 + &u * s }, &base)
            })
            .collect();
        let class = CausalCurve::new(samples)
            .and_then(|c| classify_curve(&c, 1e-9));
        if !matches!(class, Ok(CurveClass::NullGeodesic)) {
            bad_lines += 1;
        }
    }

    let passed = report.max_defect < 1e-5 && disagreements == 0 && bad_lines == 0;
    CriterionResult {
        index: 5,
        name: "Penrose embedding conformality",
        passed,
        details: format!(
            "max off-proportionality {:.3e}, {disagreements} causal disagreements, \
             {bad_lines} misclassified null lines",
            report.max_defect
        ),
    }
}

/// Criterion 6: the boundary of a past set is a compact Cauchy hypersurface.
fn criterion_6_compact_cauchy(scale: Scale) -> CriterionResult {
    let (mesh, probes) = match scale {
        Scale::Full => (std::f64::consts::TAU / 128.0, 500),
        Scale::Quick => (std::f64::consts::TAU / 48.0, 60),
    };
    let p = EinTildePoint::<f64> {
        x: SpherePoint::from_unnormalized(DVector::from_vec(vec![0.1, 0.7, 0.707])).unwrap(),
        t: 0.4,
    };
    let s = boundary_of_past(&p, mesh);
    let achronal = s.is_achronal(1e-7);
    let cauchy = s.is_cauchy(probes, 0xE66, 1e-9);
    let (passed, details) = match (&achronal, &cauchy) {
        (Ok(cert), Ok(rep)) => (
            rep.verdict && rep.monotone_ok && rep.unique_ok,
            format!(
                "lipschitz sup {:.6}, {} probes, monotone {}, unique crossings {}",
                cert.lipschitz_sup, rep.probes, rep.monotone_ok, rep.unique_ok
            ),
        ),
        (Err(v), _) => (false, format!("achronality failed with excess {:.3e}", v.excess)),
        (_, Err(e)) => (false, format!("cauchy check errored: {e}")),
    };
    CriterionResult { index: 6, name: "compact Cauchy boundary of past", passed, details }
}

/// Criterion 7: limit-curve extraction from converging null geodesics.
fn criterion_7_limit_curve(scale: Scale) -> CriterionResult {
    let grid = 256usize;
    let family = match scale {
        Scale::Full => 150,
        Scale::Quick => 120,
    };
    let p = EinTildePoint::<f64> { x: SpherePoint::axis(2, 0), t: 0.0 };
    let e1 = DVector::from_vec(vec![0.0, 1.0, 0.0]);
    let e2 = DVector::from_vec(vec![0.0, 0.0, 1.0]);
    let curves: Vec<CausalCurve<f64>> = (1..=family)
        .map(|k| {
            let a = 1.0 / k as f64;
            let dir = (&e1 * a.cos() + &e2 * a.sin()).clone_owned();
            sampled_null_geodesic(&p, &dir, 2.0, 64).unwrap()
        })
        .collect();
    let (passed, details) = match crate::curves::limit_curve(&curves, grid) {
        Ok(lim) => {
            let target = sampled_null_geodesic(&p, &e1, 2.0, grid).unwrap();
            let mut hausdorff: f64 = 0.0;
            for s in lim.samples() {
                let t = target.value_at(s.t);
                hausdorff = hausdorff.max(s.x.distance(&t.x) + (s.t - t.t).abs());
            }
            let class = classify_curve(&lim, 1e-6).unwrap();
            let causal = !matches!(class, CurveClass::NotCausal { .. });
            (
                hausdorff < std::f64::consts::TAU / grid as f64 && causal,
                format!("hausdorff distance {hausdorff:.3e}, classified {class:?}"),
            )
        }
        Err(e) => (false, format!("extraction errored: {e}")),
    };
    CriterionResult { index: 7, name: "limit-curve extraction", passed, details }
}

/// Criterion 8: the domain suite.
fn criterion_8_domains(scale: Scale) -> CriterionResult {
    let (diamonds, trials) = match scale {
        Scale::Full => (10, 1000),
        Scale::Quick => (3, 80),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0xE88);
    let mut convex_failures = 0usize;
    for k in 0..diamonds {
        let a = EinTildePoint::<f64> {
            x: random_point(&mut rng, 2),
            t: rng.gen_range(-1.0..0.0),
        };
        let b = EinTildePoint { x: a.x.clone(), t: a.t + rng.gen_range(0.4..2.5) };
        let d = Domain::diamond(a, b).unwrap();
        match is_causally_convex(&d, trials, 0xE880 + k as u64) {
            Ok(v) if v.is_accepted() => {}
            _ => convex_failures += 1,
        }
    }

    // Stacked disjoint diamonds must be refuted with a certified witness.
    let x0 = SpherePoint::<f64>::axis(2, 1);
    let stack = Domain::union(vec![
        Domain::diamond(
            EinTildePoint { x: x0.clone(), t: 0.0 },
            EinTildePoint { x: x0.clone(), t: 1.0 },
        )
        .unwrap(),
        Domain::diamond(
            EinTildePoint { x: x0.clone(), t: 2.0 },
            EinTildePoint { x: x0.clone(), t: 3.0 },
        )
        .unwrap(),
    ])
    .unwrap();
    let refuted = matches!(
        is_causally_convex(&stack, 400, 0xE89),
        Ok(ConvexityVerdict::Refuted { .. })
    );

    // Boundary split of a tall diamond against the equatorial graph.
    let mesh = 0.25;
    let d = Domain::diamond(
        EinTildePoint { x: x0.clone(), t: -4.0 },
        EinTildePoint { x: x0.clone(), t: 4.0 },
    )
    .unwrap();
    let s = AchronalGraph::constant(2, mesh, 0.0);
    let split_result = boundary_split(&d, &s, mesh);
    let (split_ok, cone_dev) = match &split_result {
        Ok(split) => {
            let mut dev: f64 = 0.0;
            for b in &split.plus {
                dev = dev.max((b.t - (4.0 - x0.distance(&b.x))).abs());
            }
            for b in &split.minus {
                dev = dev.max((b.t - (x0.distance(&b.x) - 4.0)).abs());
            }
            (dev < mesh && !split.plus.is_empty() && !split.minus.is_empty(), dev)
        }
        Err(_) => (false, f64::NAN),
    };

    let passed = convex_failures == 0 && refuted && split_ok;
    CriterionResult {
        index: 8,
        name: "domain suite",
        passed,
        details: format!(
            "{convex_failures} convexity failures over {diamonds} diamonds, stacked refuted: \
             {refuted}, cone deviation {cone_dev:.3e}"
        ),
    }
}

/// Criterion 9: the expansion hypothesis of the covering criterion.
fn criterion_9_expansion(scale: Scale) -> CriterionResult {
    let (graphs, mesh, pairs) = match scale {
        Scale::Full => (20, 0.08, 1500),
        Scale::Quick => (5, 0.15, 300),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0xE99);
    let mut worst_min_gap = f64::INFINITY;
    let mut worst_max: f64 = f64::NEG_INFINITY;
    let mut failures = 0usize;
    for k in 0..graphs {
        let c: f64 = rng.gen_range(0.0..0.8f64.min(1.0 - 1.5 * mesh));
        let center = random_point::<f64, _>(&mut rng, 2);
        let g = AchronalGraph::from_fn_full_sphere(2, mesh, |x| c * center.distance(x));
        match expansion_check(&g, pairs, 0xE990 + k as u64) {
            Ok(r) => {
                worst_min_gap = worst_min_gap.min(r.min_ratio - (1.0 - c * c - 0.01));
                worst_max = worst_max.max(r.max_ratio);
                if r.min_ratio < 1.0 - c * c - 0.01 || r.max_ratio > 1.0 + 1e-9 {
                    failures += 1;
                }
            }
            Err(_) => failures += 1,
        }
    }
    CriterionResult {
        index: 9,
        name: "expansion of the sphere projection",
        passed: failures == 0,
        details: format!(
            "{failures} failures over {graphs} graphs, worst min-ratio slack {worst_min_gap:.3e}, \
             worst max ratio {worst_max:.9}"
        ),
    }
}

/// Criterion 10: total viciousness of the compact model.
fn criterion_10_vicious(scale: Scale) -> CriterionResult {
    let count = match scale {
        Scale::Full => 1000,
        Scale::Quick => 150,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0xEAA);
    let mut max_k = 0u32;
    for _ in 0..count {
        let e1 = EinPoint::<f64>::new(
            random_point(&mut rng, 2),
            rng.gen_range(0.0..std::f64::consts::TAU),
        )
        .unwrap();
        let e2 = EinPoint::<f64>::new(
            random_point(&mut rng, 2),
            rng.gen_range(0.0..std::f64::consts::TAU),
        )
        .unwrap();
        max_k = max_k.max(totally_vicious_witness(&e1, &e2));
    }
    CriterionResult {
        index: 10,
        name: "total viciousness of the compact model",
        passed: max_k <= 2,
        details: format!("max deck winding {max_k} over {count} pairs"),
    }
}

/// Criterion 11: byte-identical determinism of the suite (double run at the
/// reduced scale, plus a sprinkling double run).
fn criterion_11_determinism() -> CriterionResult {
    let first: Vec<String> = (1..=10).map(|i| run_criterion(i, Scale::Quick).line()).collect();
    let second: Vec<String> = (1..=10).map(|i| run_criterion(i, Scale::Quick).line()).collect();

    let x0 = SpherePoint::<f64>::axis(2, 0);
    let d = Domain::diamond(
        EinTildePoint { x: x0.clone(), t: 0.0 },
        EinTildePoint { x: x0, t: 1.0 },
    )
    .unwrap();
    let s1 = sprinkle(&d, 40, 0xEBB, 1e-9).map(|s| s.edges_csv());
    let s2 = sprinkle(&d, 40, 0xEBB, 1e-9).map(|s| s.edges_csv());
    let sprinkle_ok = matches!((&s1, &s2), (Ok(a), Ok(b)) if a == b);

    let passed = first == second && sprinkle_ok;
    CriterionResult {
        index: 11,
        name: "byte-identical determinism",
        passed,
        details: format!(
            "reduced-scale double run identical: {}, sprinkle double run identical: {sprinkle_ok}",
            first == second
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_scale_suite_passes() {
        for i in 1..=10 {
            let r = run_criterion(i, Scale::Quick);
            assert!(r.passed, "criterion {i} failed at quick scale: {}", r.details);
        }
    }

    #[test]
    fn report_renders_one_line_per_criterion() {
        let report = SelfTestReport {
            results: vec![CriterionResult {
                index: 3,
                name: "sigma squared equals delta",
                passed: true,
                details: "0 failures over 10 points".into(),
            }],
        };
        let text = report.render();
        assert!(text.contains("criterion 03 PASS"));
        assert!(text.contains("summary: 1/1"));
    }
}
