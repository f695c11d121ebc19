//! Causally convex domains of the cover: membership, convexity probing,
//! boundary decomposition relative to a Cauchy graph, gluing, and the
//! expansion and conjugate-point verification harnesses.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::curves::{classify_curve, CausalCurve, CurveClass};
use crate::ein::{
    boundary_of_past, causal_classify, null_geodesic_unchecked, sigma_inverse, CausalClass,
    EinTildePoint,
};
use crate::error::{Error, Result};
use crate::graphs::AchronalGraph;
use crate::scalar::{real, to_f64, Scalar};
use crate::sphere::{mesh_points, random_point, random_tangent};

/// A domain of the cover with an exact membership predicate.
#[derive(Clone, Debug)]
pub enum Domain<S: Scalar> {
    All { n: usize },
    FutureCone { apex: EinTildePoint<S> },
    PastCone { apex: EinTildePoint<S> },
    Diamond { a: EinTildePoint<S>, b: EinTildePoint<S> },
    Lens { lower: AchronalGraph<S>, upper: AchronalGraph<S> },
    Union(Vec<Domain<S>>),
}

impl<S: Scalar> Domain<S> {
    pub fn diamond(a: EinTildePoint<S>, b: EinTildePoint<S>) -> Result<Self> {
        if causal_classify(&a, &b, S::zero()) != CausalClass::ChronologicalFuture {
            return Err(Error::Validation(
                "diamond requires b strictly in the chronological future of a".into(),
            ));
        }
        Ok(Self::Diamond { a, b })
    }

    pub fn lens(lower: AchronalGraph<S>, upper: AchronalGraph<S>) -> Result<Self> {
        if !lower.is_full_sphere() || !upper.is_full_sphere() {
            return Err(Error::Validation("lens graphs must cover the full sphere".into()));
        }
        for (x, f) in lower.samples() {
            if to_f64(upper.value_at(x) - *f) <= 0.0 {
                return Err(Error::Validation(
                    "lens requires upper > lower at every sampled point".into(),
                ));
            }
        }
        for (x, f) in upper.samples() {
            if to_f64(*f - lower.value_at(x)) <= 0.0 {
                return Err(Error::Validation(
                    "lens requires upper > lower at every sampled point".into(),
                ));
            }
        }
        Ok(Self::Lens { lower, upper })
    }

    pub fn union(parts: Vec<Domain<S>>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::Validation("union of no domains".into()));
        }
        let n = parts[0].n();
        if parts.iter().any(|d| d.n() != n) {
            return Err(Error::Validation("union members have mixed dimensions".into()));
        }
        Ok(Self::Union(parts))
    }

    pub fn n(&self) -> usize {
        match self {
            Self::All { n } => *n,
            Self::FutureCone { apex } | Self::PastCone { apex } => apex.x.n(),
            Self::Diamond { a, .. } => a.x.n(),
            Self::Lens { lower, .. } => lower.n(),
            Self::Union(parts) => parts[0].n(),
        }
    }

    /// Exact membership.
    pub fn contains(&self, p: &EinTildePoint<S>) -> bool {
        match self {
            Self::All { .. } => true,
            Self::FutureCone { apex } => {
                causal_classify(apex, p, S::zero()) == CausalClass::ChronologicalFuture
            }
            Self::PastCone { apex } => {
                causal_classify(p, apex, S::zero()) == CausalClass::ChronologicalFuture
            }
            Self::Diamond { a, b } => {
                causal_classify(a, p, S::zero()) == CausalClass::ChronologicalFuture
                    && causal_classify(p, b, S::zero()) == CausalClass::ChronologicalFuture
            }
            Self::Lens { lower, upper } => {
                let t = to_f64(p.t);
                t > to_f64(lower.value_at(&p.x)) && t < to_f64(upper.value_at(&p.x))
            }
            Self::Union(parts) => parts.iter().any(|d| d.contains(p)),
        }
    }

    /// A time window used for rejection sampling and bisection brackets;
    /// cones and All are windowed to one period of the unbounded direction.
    pub fn time_window(&self) -> (f64, f64) {
        match self {
            Self::All { .. } => (-std::f64::consts::PI, std::f64::consts::PI),
            Self::FutureCone { apex } => {
                let t = to_f64(apex.t);
                (t, t + std::f64::consts::TAU)
            }
            Self::PastCone { apex } => {
                let t = to_f64(apex.t);
                (t - std::f64::consts::TAU, t)
            }
            Self::Diamond { a, b } => (to_f64(a.t), to_f64(b.t)),
            Self::Lens { lower, upper } => (to_f64(lower.min_value()), to_f64(upper.max_value())),
            Self::Union(parts) => {
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                for d in parts {
                    let (a, b) = d.time_window();
                    lo = lo.min(a);
                    hi = hi.max(b);
                }
                (lo, hi)
            }
        }
    }

    /// Rejection-samples `count` interior points; errors if the acceptance
    /// rate collapses below 1e-4.
    pub fn sample_points<R: Rng>(&self, count: usize, rng: &mut R) -> Result<Vec<EinTildePoint<S>>> {
        let (lo, hi) = self.time_window();
        let mut out = Vec::with_capacity(count);
        let mut attempts = 0usize;
        while out.len() < count {
            attempts += 1;
            if attempts > 20_000 + count * 10_000 {
                return Err(Error::DomainTooThin {
                    rate: out.len() as f64 / attempts as f64,
                });
            }
            let p = EinTildePoint {
                x: random_point(rng, self.n()),
                t: real(rng.gen_range(lo..hi)),
            };
            if self.contains(&p) {
                out.push(p);
            }
        }
        Ok(out)
    }
}

/// Outcome of a causal-convexity probe.
#[derive(Clone, Debug)]
pub enum ConvexityVerdict<S: Scalar> {
    /// No escaping curve found over the sampled trials (sampling-limited).
    NoWitnessFound { trials: usize },
    /// A verified causal curve between interior points leaving the domain.
    Refuted {
        witness: CausalCurve<S>,
        outside_sample: usize,
    },
}

impl<S: Scalar> ConvexityVerdict<S> {
    pub fn is_accepted(&self) -> bool {
        matches!(self, Self::NoWitnessFound { .. })
    }
}

const CURVE_SAMPLES: usize = 33;

/// Probes causal convexity: for sampled chronologically related interior
/// pairs, checks the timelike interpolation and random two-segment
/// piecewise-null paths between them. Refutations carry a re-verified
/// witness; acceptance is explicitly sampling-limited.
pub fn is_causally_convex<S: Scalar>(
    d: &Domain<S>,
    trials: usize,
    seed: u64,
) -> Result<ConvexityVerdict<S>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Degenerate-domain guard.
    d.sample_points(2, &mut rng)?;

    let mut done = 0usize;
    let mut attempts = 0usize;
    while done < trials {
        attempts += 1;
        if attempts > 200 * trials + 1000 {
            break;
        }
        let pts = d.sample_points(2, &mut rng)?;
        let (p, q) = (&pts[0], &pts[1]);
        let (p, q) = match causal_classify(p, q, S::zero()) {
            CausalClass::ChronologicalFuture => (p.clone(), q.clone()),
            CausalClass::ChronologicalPast => (q.clone(), p.clone()),
            _ => continue,
        };
        done += 1;

        let mut curves: Vec<CausalCurve<S>> = Vec::new();
        if let Some(c) = timelike_interpolation(&p, &q) {
            curves.push(c);
        }
        for _ in 0..3 {
            if let Some(c) = two_segment_null_path(&p, &q, &mut rng) {
                curves.push(c);
            }
        }
        for curve in curves {
            for (i, s) in curve.samples().iter().enumerate().skip(1) {
                if i + 1 == curve.samples().len() {
                    break;
                }
                if !d.contains(s) {
                    // Certify before refuting.
                    let class = classify_curve(&curve, 1e-9)?;
                    let causal = !matches!(class, CurveClass::NotCausal { .. });
                    if causal && d.contains(curve.start()) && d.contains(curve.end()) {
                        return Ok(ConvexityVerdict::Refuted { witness: curve, outside_sample: i });
                    }
                    break;
                }
            }
        }
    }
    Ok(ConvexityVerdict::NoWitnessFound { trials: done })
}

/// The chronological interpolation: great circle in x, linear in t.
fn timelike_interpolation<S: Scalar>(
    p: &EinTildePoint<S>,
    q: &EinTildePoint<S>,
) -> Option<CausalCurve<S>> {
    if to_f64(p.x.distance(&q.x)) >= std::f64::consts::PI - 1e-6 {
        return None;
    }
    let mut samples = Vec::with_capacity(CURVE_SAMPLES);
    for k in 0..CURVE_SAMPLES {
        let frac = real::<S>(k as f64 / (CURVE_SAMPLES - 1) as f64);
        let x = p.x.slerp(&q.x, frac).ok()?;
        samples.push(EinTildePoint { x, t: p.t + (q.t - p.t) * frac });
    }
    CausalCurve::new(samples).ok()
}

/// A random future null geodesic from p, broken once so that a second null
/// segment lands exactly on q. The break parameter solves
/// d0(x(s), x_q) = (t_q - t_p) - s by bisection.
fn two_segment_null_path<S: Scalar, R: Rng>(
    p: &EinTildePoint<S>,
    q: &EinTildePoint<S>,
    rng: &mut R,
) -> Option<CausalCurve<S>> {
    let dt = to_f64(q.t - p.t);
    let dir = random_tangent(rng, &p.x);
    let g = |s: f64| -> f64 {
        let m = null_geodesic_unchecked(p, &dir, real::<S>(s));
        to_f64(m.x.distance(&q.x)) - (dt - s)
    };
    // Bracket a sign change on a coarse grid.
    let grid = 64;
    let mut lo = 0.0;
    let mut hi = dt;
    let mut found = false;
    let mut prev = g(0.0);
    if prev >= 0.0 {
        return None; // p, q not strictly chronological at this tolerance
    }
    for k in 1..=grid {
        let s = dt * k as f64 / grid as f64;
        let val = g(s);
        if prev < 0.0 && val >= 0.0 {
            lo = dt * (k - 1) as f64 / grid as f64;
            hi = s;
            found = true;
            break;
        }
        prev = val;
    }
    if !found {
        return None;
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let s_break = 0.5 * (lo + hi);
    if s_break < 1e-6 || dt - s_break < 1e-6 {
        return None;
    }
    let m = null_geodesic_unchecked(p, &dir, real::<S>(s_break));
    let second_dir = m.x.direction_toward(&q.x).ok()?;
    let half = CURVE_SAMPLES / 2;
    let mut samples = Vec::with_capacity(2 * half + 1);
    for k in 0..=half {
        samples.push(null_geodesic_unchecked(p, &dir, real::<S>(s_break * k as f64 / half as f64)));
    }
    let rest = dt - s_break;
    for k in 1..=half {
        samples.push(null_geodesic_unchecked(
            &m,
            &second_dir,
            real::<S>(rest * k as f64 / half as f64),
        ));
    }
    CausalCurve::new(samples).ok()
}

/// Boundary samples of a domain split by a Cauchy graph.
#[derive(Clone, Debug)]
pub struct BoundarySplit<S: Scalar> {
    pub plus: Vec<EinTildePoint<S>>,
    pub minus: Vec<EinTildePoint<S>>,
}

/// Samples the domain boundary along time lines through sphere mesh points
/// and splits it by chronological comparison with the graph. Verifies
/// achronality of each part, disjointness, and the inclusion
/// I^-(plus) cap I^+(minus) inside the domain on sampled triples.
pub fn boundary_split<S: Scalar>(
    d: &Domain<S>,
    s: &AchronalGraph<S>,
    mesh: f64,
) -> Result<BoundarySplit<S>> {
    if !s.is_full_sphere() {
        return Err(Error::Precondition("the reference graph must cover the sphere".into()));
    }
    s.is_achronal(real(1e-7)).map_err(|v| {
        Error::Precondition(format!("reference graph is not achronal: excess {}", to_f64(v.excess)))
    })?;
    for (x, f) in s.samples() {
        if !d.contains(&EinTildePoint { x: x.clone(), t: *f }) {
            return Err(Error::Precondition("graph leaves the domain".into()));
        }
    }

    let (lo, hi) = d.time_window();
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for x in mesh_points::<S>(d.n(), mesh) {
        let f = s.value_at(&x);
        let at = |t: f64| EinTildePoint { x: x.clone(), t: real(t) };
        let f64_f = to_f64(f);
        if !d.contains(&at(f64_f)) {
            // The graph's McShane extension may exit thin domains between
            // sample points; skip such lines.
            continue;
        }
        // March outward to bracket each boundary, then bisect.
        for sign in [1.0f64, -1.0] {
            let limit = if sign > 0.0 { hi + mesh } else { lo - mesh };
            let mut inside = f64_f;
            let mut outside = None;
            let mut t = f64_f;
            while (limit - t) * sign > 0.0 {
                t += sign * mesh.max(1e-3);
                if d.contains(&at(t)) {
                    inside = t;
                } else {
                    outside = Some(t);
                    break;
                }
            }
            let Some(mut out) = outside else { continue }; // unbounded side
            let mut inn = inside;
            for _ in 0..60 {
                let mid = 0.5 * (inn + out);
                if d.contains(&at(mid)) {
                    inn = mid;
                } else {
                    out = mid;
                }
            }
            let b = at(0.5 * (inn + out));
            // Chronological comparison against the graph samples.
            let mut future = false;
            let mut past = false;
            for (gx, gf) in s.samples() {
                match causal_classify(
                    &EinTildePoint { x: gx.clone(), t: *gf },
                    &b,
                    S::zero(),
                ) {
                    CausalClass::ChronologicalFuture => future = true,
                    CausalClass::ChronologicalPast => past = true,
                    _ => {}
                }
                if future || past {
                    break;
                }
            }
            match (future, past) {
                (true, false) => plus.push(b),
                (false, true) => minus.push(b),
                _ => {
                    return Err(Error::Resolution(format!(
                        "boundary sample at t = {} chronologically unrelated to the graph \
                         at mesh scale",
                        to_f64(b.t)
                    )))
                }
            }
        }
    }

    // Each component must be achronal pairwise.
    for (name, part) in [("plus", &plus), ("minus", &minus)] {
        for i in 0..part.len() {
            for j in (i + 1)..part.len() {
                let c = causal_classify(&part[i], &part[j], real(1e-7));
                if matches!(c, CausalClass::ChronologicalFuture | CausalClass::ChronologicalPast) {
                    return Err(Error::Resolution(format!(
                        "boundary component {name} is not achronal at samples {i}, {j}"
                    )));
                }
            }
        }
    }

    // Inclusion I^-(plus) cap I^+(minus) subset of the domain, on triples.
    let mut rng = ChaCha8Rng::seed_from_u64(0x51ab);
    let mut checked = 0usize;
    let mut tries = 0usize;
    while checked < 1000 && !plus.is_empty() && !minus.is_empty() {
        tries += 1;
        if tries > 100_000 {
            break;
        }
        let u = &plus[rng.gen_range(0..plus.len())];
        let v = &minus[rng.gen_range(0..minus.len())];
        let w = EinTildePoint {
            x: random_point(&mut rng, d.n()),
            t: real(rng.gen_range(to_f64(v.t).min(to_f64(u.t))..=to_f64(u.t).max(to_f64(v.t)))),
        };
        if causal_classify(&w, u, S::zero()) != CausalClass::ChronologicalFuture
            || causal_classify(v, &w, S::zero()) != CausalClass::ChronologicalFuture
        {
            continue;
        }
        checked += 1;
        if !d.contains(&w) {
            return Err(Error::Resolution(format!(
                "inclusion violated: a point between the boundary parts left the domain \
                 (t = {})",
                to_f64(w.t)
            )));
        }
    }

    Ok(BoundarySplit { plus, minus })
}

/// Checks that `s` is a Cauchy graph for `d`: globally Cauchy, lying inside
/// the domain, with probe crossings landing inside the domain.
pub fn is_cauchy_for_domain<S: Scalar>(
    d: &Domain<S>,
    s: &AchronalGraph<S>,
    probes: usize,
    seed: u64,
) -> Result<()> {
    let report = s.is_cauchy(probes, seed, real(1e-9))?;
    if !report.verdict {
        return Err(Error::Precondition("graph is not Cauchy for the cover".into()));
    }
    for (x, f) in s.samples() {
        if !d.contains(&EinTildePoint { x: x.clone(), t: *f }) {
            return Err(Error::Precondition("graph leaves the domain".into()));
        }
    }
    Ok(())
}

/// Report accompanying a successful glue.
#[derive(Clone, Debug)]
pub struct GlueReport {
    pub convexity_trials: usize,
    pub cauchy_probes: usize,
    /// Union boundary samples matched against the inputs' boundary samples.
    pub boundary_samples_matched: usize,
    pub max_merge_deviation: f64,
}

/// Glues two domains sharing the Cauchy graph `s`: returns their union after
/// re-validating causal convexity, the Cauchy property, and the merge of the
/// boundary splits.
pub fn glue<S: Scalar>(
    d1: &Domain<S>,
    d2: &Domain<S>,
    s: &AchronalGraph<S>,
    mesh: f64,
    trials: usize,
    seed: u64,
) -> Result<(Domain<S>, GlueReport)> {
    let probes = 64;
    is_cauchy_for_domain(d1, s, probes, seed)?;
    is_cauchy_for_domain(d2, s, probes, seed)?;

    let union = Domain::union(vec![d1.clone(), d2.clone()])?;
    match is_causally_convex(&union, trials, seed)? {
        ConvexityVerdict::NoWitnessFound { .. } => {}
        ConvexityVerdict::Refuted { witness, outside_sample } => {
            let w = &witness.samples()[outside_sample];
            return Err(Error::GluingFailure(format!(
                "union is not causally convex: a causal curve between interior points \
                 leaves it at (t = {})",
                to_f64(w.t)
            )));
        }
    }
    is_cauchy_for_domain(&union, s, probes, seed)
        .map_err(|e| Error::GluingFailure(format!("graph is not Cauchy for the union: {e}")))?;

    let split_u = boundary_split(&union, s, mesh)?;
    let split_1 = boundary_split(d1, s, mesh)?;
    let split_2 = boundary_split(d2, s, mesh)?;
    let inputs: Vec<&EinTildePoint<S>> = split_1
        .plus
        .iter()
        .chain(&split_1.minus)
        .chain(&split_2.plus)
        .chain(&split_2.minus)
        .collect();
    let mut max_dev: f64 = 0.0;
    let mut matched = 0usize;
    for b in split_u.plus.iter().chain(&split_u.minus) {
        let nearest = inputs
            .iter()
            .map(|c| to_f64(b.x.distance(&c.x)) + (to_f64(b.t) - to_f64(c.t)).abs())
            .fold(f64::INFINITY, f64::min);
        if nearest > 3.0 * mesh {
            return Err(Error::GluingFailure(format!(
                "union boundary sample at t = {} is {} away from every input boundary sample",
                to_f64(b.t),
                nearest
            )));
        }
        matched += 1;
        max_dev = max_dev.max(nearest);
    }

    Ok((
        union,
        GlueReport {
            convexity_trials: trials,
            cauchy_probes: probes,
            boundary_samples_matched: matched,
            max_merge_deviation: max_dev,
        },
    ))
}

/// Length-ratio report for the sphere projection of a strict achronal graph.
#[derive(Clone, Debug)]
pub struct ExpansionReport {
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub lipschitz_sup: f64,
    pub pairs: usize,
}

/// Over random nearby sample pairs on the graph, computes the ratio of the
/// induced Lorentz length d0^2 - (df)^2 to the projected length d0^2. A
/// strict Lipschitz certificate (constant < 1) is a precondition; the ratios
/// then certify that the projection to the sphere expands graph lengths.
pub fn expansion_check<S: Scalar>(
    s: &AchronalGraph<S>,
    pairs: usize,
    seed: u64,
) -> Result<ExpansionReport> {
    let cert = s
        .is_achronal(real(1e-9))
        .map_err(|v| Error::Precondition(format!("graph not achronal: excess {}", to_f64(v.excess))))?;
    let lip = to_f64(cert.lipschitz_sup);
    // Sampled slopes of a genuinely null graph land slightly below 1, so the
    // strictness threshold leaves a mesh-sized margin.
    let threshold = 1.0 - to_f64(s.mesh()).max(1e-6);
    if lip >= threshold {
        return Err(Error::Precondition(format!(
            "expansion needs a strict Lipschitz constant below {threshold}, measured {lip}"
        )));
    }

    let samples = s.samples();
    let mesh = to_f64(s.mesh());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_ratio = f64::INFINITY;
    let mut max_ratio = f64::NEG_INFINITY;
    let mut done = 0usize;
    let mut tries = 0usize;
    while done < pairs {
        tries += 1;
        if tries > 1000 * pairs {
            return Err(Error::Resolution("could not find nearby sample pairs".into()));
        }
        let i = rng.gen_range(0..samples.len());
        let j = rng.gen_range(0..samples.len());
        if i == j {
            continue;
        }
        let d = to_f64(samples[i].0.distance(&samples[j].0));
        if d < mesh * 0.2 || d > mesh * 3.0 {
            continue;
        }
        let df = to_f64(samples[i].1 - samples[j].1);
        let ratio = (d * d - df * df) / (d * d);
        min_ratio = min_ratio.min(ratio);
        max_ratio = max_ratio.max(ratio);
        done += 1;
    }
    Ok(ExpansionReport { min_ratio, max_ratio, lipschitz_sup: lip, pairs: done })
}

/// Report of the conjugate-point construction at `p`.
#[derive(Clone, Debug)]
pub struct ConjugateReport<S: Scalar> {
    pub surface: AchronalGraph<S>,
    /// Max distance of probe geodesics from sigma^{-1}(p) at parameter pi.
    pub max_probe_hit_error: f64,
    pub achronal: bool,
    pub cauchy: bool,
    /// Max distance of surface samples from their generating null segment.
    pub max_generator_deviation: f64,
}

/// Builds the past boundary of `p` and verifies the conjugate-point facts:
/// every past null geodesic from p refocuses at sigma^{-1}(p) at parameter
/// pi, the boundary graph is an achronal Cauchy surface, and its samples lie
/// on the generating null segments from p.
pub fn conjugate_construction<S: Scalar>(
    p: &EinTildePoint<S>,
    mesh: f64,
    probes: usize,
    seed: u64,
) -> Result<ConjugateReport<S>> {
    let surface = boundary_of_past(p, mesh);
    let conj = sigma_inverse(p);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_hit: f64 = 0.0;
    for _ in 0..probes {
        let dir = random_tangent(&mut rng, &p.x);
        let hit = null_geodesic_unchecked(p, &dir, real::<S>(-std::f64::consts::PI));
        let err = to_f64(hit.x.distance(&conj.x)) + (to_f64(hit.t) - to_f64(conj.t)).abs();
        max_hit = max_hit.max(err);
    }

    let achronal = surface.is_achronal(real(1e-9)).is_ok();
    let cauchy = surface
        .is_cauchy(probes.min(200), seed.wrapping_add(1), real(1e-9))
        .map(|r| r.verdict)
        .unwrap_or(false);

    // Each sample (x, f) should sit on the null segment from p toward x at
    // parameter -d0(x_p, x).
    let mut max_gen: f64 = 0.0;
    for (x, f) in surface.samples() {
        let d = to_f64(p.x.distance(x));
        let expected_t = to_f64(p.t) - d;
        let mut err = (to_f64(*f) - expected_t).abs();
        if d > 1e-12 && d < std::f64::consts::PI - 1e-12 {
            let dir = -p.x.direction_toward(x)?;
            let on_segment = null_geodesic_unchecked(p, &dir, real::<S>(-d));
            err += to_f64(on_segment.x.distance(x));
        }
        max_gen = max_gen.max(err);
    }

    Ok(ConjugateReport {
        surface,
        max_probe_hit_error: max_hit,
        achronal,
        cauchy,
        max_generator_deviation: max_gen,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ein::sigma;
    use crate::embed::MinkowskiDiamond;
    use crate::sphere::SpherePoint;
    use std::f64::consts::PI;

    fn x0() -> SpherePoint<f64> {
        SpherePoint::from_unnormalized(nalgebra::DVector::from_vec(vec![0.2, 0.9, -0.4])).unwrap()
    }

    fn small_diamond(lo: f64, hi: f64) -> Domain<f64> {
        Domain::diamond(
            EinTildePoint { x: x0(), t: lo },
            EinTildePoint { x: x0(), t: hi },
        )
        .unwrap()
    }

    #[test]
    fn membership_examples() {
        let all: Domain<f64> = Domain::All { n: 2 };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let p = EinTildePoint { x: random_point(&mut rng, 2), t: rng.gen_range(-9.0..9.0) };
            assert!(all.contains(&p));
        }

        let d = small_diamond(0.0, 1.0);
        assert!(d.contains(&EinTildePoint { x: x0(), t: 0.5 }));
        assert!(!d.contains(&EinTildePoint { x: x0(), t: 1.5 }));
        assert!(!d.contains(&EinTildePoint { x: x0().antipode(), t: 0.5 }));
    }

    #[test]
    fn diamond_constructor_rejects_unrelated_tips() {
        let a = EinTildePoint { x: x0(), t: 0.0 };
        let b = EinTildePoint { x: x0().antipode(), t: 0.5 };
        assert!(Domain::diamond(a, b).is_err());
    }

    #[test]
    fn big_diamond_matches_the_minkowski_diamond_inequality() {
        let d = small_diamond(-PI, PI);
        let md = MinkowskiDiamond::new(x0());
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10_000 {
            let p = EinTildePoint { x: random_point(&mut rng, 2), t: rng.gen_range(-4.0..4.0) };
            assert_eq!(d.contains(&p), md.contains(&p));
        }
    }

    #[test]
    fn diamonds_and_all_are_causally_convex() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for k in 0..10u64 {
            let a = EinTildePoint { x: random_point(&mut rng, 2), t: rng.gen_range(-1.0..0.0) };
            let dt: f64 = rng.gen_range(0.3..2.5);
            let b = EinTildePoint { x: a.x.clone(), t: a.t + dt };
            let d = Domain::diamond(a, b).unwrap();
            let v = is_causally_convex(&d, 100, 50 + k).unwrap();
            assert!(v.is_accepted(), "diamond {k} refuted");
        }
        let all: Domain<f64> = Domain::All { n: 2 };
        assert!(is_causally_convex(&all, 50, 7).unwrap().is_accepted());
    }

    #[test]
    fn stacked_disjoint_diamonds_are_refuted_with_witness() {
        let d1 = small_diamond(0.0, 1.0);
        let d2 = small_diamond(2.0, 3.0);
        let u = Domain::union(vec![d1, d2]).unwrap();
        match is_causally_convex(&u, 400, 11).unwrap() {
            ConvexityVerdict::Refuted { witness, outside_sample } => {
                let w = &witness.samples()[outside_sample];
                assert!(!u.contains(w));
                assert!(u.contains(witness.start()) && u.contains(witness.end()));
                assert!(!matches!(
                    classify_curve(&witness, 1e-9).unwrap(),
                    CurveClass::NotCausal { .. }
                ));
            }
            ConvexityVerdict::NoWitnessFound { .. } => {
                panic!("expected a refutation for stacked diamonds")
            }
        }
    }

    #[test]
    fn boundary_split_of_diamond_matches_the_cone_equations() {
        let d = small_diamond(-4.0, 4.0);
        let s = AchronalGraph::constant(2, 0.25, 0.0);
        let split = boundary_split(&d, &s, 0.25).unwrap();
        assert!(!split.plus.is_empty() && !split.minus.is_empty());
        for b in &split.plus {
            // Past null cone of the top tip: d0(x0, x) = 4 - t.
            let expect = 4.0 - x0().distance(&b.x);
            assert!((b.t - expect).abs() < 0.25, "plus deviation {}", (b.t - expect).abs());
        }
        for b in &split.minus {
            let expect = x0().distance(&b.x) - 4.0;
            assert!((b.t - expect).abs() < 0.25, "minus deviation {}", (b.t - expect).abs());
        }
    }

    #[test]
    fn boundary_split_of_lens_is_the_two_graphs() {
        let lower = AchronalGraph::<f64>::constant(2, 0.25, -0.4);
        let upper = AchronalGraph::<f64>::constant(2, 0.25, 0.4);
        let lens = Domain::lens(lower, upper).unwrap();
        let s = AchronalGraph::constant(2, 0.25, 0.0);
        let split = boundary_split(&lens, &s, 0.25).unwrap();
        for b in &split.plus {
            assert!((b.t - 0.4).abs() < 1e-9);
        }
        for b in &split.minus {
            assert!((b.t + 0.4).abs() < 1e-9);
        }
    }

    #[test]
    fn boundary_split_of_all_is_empty() {
        let s = AchronalGraph::<f64>::constant(2, 0.3, 0.0);
        let all: Domain<f64> = Domain::All { n: 2 };
        let split = boundary_split(&all, &s, 0.3).unwrap();
        assert!(split.plus.is_empty() && split.minus.is_empty());
    }

    #[test]
    fn glue_of_overlapping_diamonds_validates() {
        let d1 = small_diamond(-4.0, 4.0);
        let d2 = small_diamond(-4.5, 3.5);
        let s = AchronalGraph::constant(2, 0.25, 0.0);
        let (union, report) = glue(&d1, &d2, &s, 0.25, 60, 21).unwrap();
        assert!(report.max_merge_deviation <= 0.75);
        assert!(union.contains(&EinTildePoint { x: x0(), t: -4.2 }));
        assert!(union.contains(&EinTildePoint { x: x0(), t: 3.9 }));
    }

    #[test]
    fn glue_with_itself_is_idempotent_in_membership() {
        let d = small_diamond(-4.0, 4.0);
        let s = AchronalGraph::constant(2, 0.25, 0.0);
        let (union, _) = glue(&d, &d, &s, 0.25, 40, 23).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let p = EinTildePoint { x: random_point(&mut rng, 2), t: rng.gen_range(-5.0..5.0) };
            assert_eq!(union.contains(&p), d.contains(&p));
        }
    }

    #[test]
    fn glue_lens_with_containing_diamond() {
        let d = small_diamond(-4.0, 4.0);
        let lens = Domain::lens(
            AchronalGraph::constant(2, 0.25, -0.3),
            AchronalGraph::constant(2, 0.25, 0.3),
        )
        .unwrap();
        let s = AchronalGraph::constant(2, 0.25, 0.0);
        let (union, _) = glue(&lens, &d, &s, 0.25, 40, 29).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..1000 {
            let p = EinTildePoint { x: random_point(&mut rng, 2), t: rng.gen_range(-5.0..5.0) };
            assert_eq!(union.contains(&p), d.contains(&p));
        }
    }

    #[test]
    fn expansion_of_constant_graph_is_unity() {
        let s = AchronalGraph::constant(2, 0.15, 0.0);
        let r = expansion_check(&s, 500, 31).unwrap();
        assert!((r.min_ratio - 1.0).abs() < 1e-12);
        assert!((r.max_ratio - 1.0).abs() < 1e-12);
    }

    #[test]
    fn expansion_of_half_lipschitz_cone_graph() {
        let center = x0();
        let s = AchronalGraph::from_fn_full_sphere(2, 0.1, |x| 0.5 * center.distance(x));
        let r = expansion_check(&s, 2000, 37).unwrap();
        assert!(r.max_ratio <= 1.0 + 1e-9, "max {}", r.max_ratio);
        assert!(r.min_ratio >= 0.75 - 0.05, "min {}", r.min_ratio);
    }

    #[test]
    fn expansion_rejects_null_graphs() {
        let center = x0();
        let s = AchronalGraph::from_fn_full_sphere(2, 0.1, |x| center.distance(x));
        assert!(matches!(expansion_check(&s, 100, 41), Err(Error::Precondition(_))));
    }

    #[test]
    fn conjugate_construction_verifies_the_refocusing_facts() {
        let p = EinTildePoint { x: x0(), t: 0.3 };
        let r = conjugate_construction(&p, 0.12, 200, 43).unwrap();
        assert!(r.max_probe_hit_error < 1e-9, "hit error {}", r.max_probe_hit_error);
        assert!(r.achronal);
        assert!(r.cauchy);
        assert!(r.max_generator_deviation < 0.12, "gen dev {}", r.max_generator_deviation);
    }

    #[test]
    fn conjugate_report_is_sigma_translation_invariant() {
        let p = EinTildePoint { x: x0(), t: 0.3 };
        let r1 = conjugate_construction(&p, 0.2, 100, 47).unwrap();
        let r2 = conjugate_construction(&sigma(&p), 0.2, 100, 47).unwrap();
        assert!((r1.max_probe_hit_error - r2.max_probe_hit_error).abs() < 1e-9);
        assert_eq!(r1.achronal, r2.achronal);
        assert_eq!(r1.cauchy, r2.cauchy);
        assert!((r1.max_generator_deviation - r2.max_generator_deviation).abs() < 1e-9);
    }
}
