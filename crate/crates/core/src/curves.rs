//! Sampled causal curves: classification, limit-curve extraction, and
//! timelike perturbation.

use nalgebra::DMatrix;

use crate::ein::{causal_classify, null_geodesic_unchecked, CausalClass, EinTildePoint};
use crate::error::{Error, Result};
use crate::scalar::{real, to_f64, Scalar};
use crate::sphere::SpherePoint;

/// A finite sampled path with strictly increasing time, interpolated by
/// great-circle arcs in x and linearly in t on each segment.
#[derive(Clone, Debug)]
pub struct CausalCurve<S: Scalar> {
    samples: Vec<EinTildePoint<S>>,
}

impl<S: Scalar> CausalCurve<S> {
    pub fn new(samples: Vec<EinTildePoint<S>>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::Validation(format!(
                "a curve needs at least 2 samples, got {}",
                samples.len()
            )));
        }
        for (i, pair) in samples.windows(2).enumerate() {
            if pair[1].t <= pair[0].t {
                return Err(Error::Validation(format!(
                    "time must be strictly increasing; samples {i} and {} have t = {}, {}",
                    i + 1,
                    to_f64(pair[0].t),
                    to_f64(pair[1].t)
                )));
            }
            let d = to_f64(pair[0].x.distance(&pair[1].x));
            if d >= std::f64::consts::PI - 1e-9 {
                return Err(Error::AntipodalAmbiguity { distance: d });
            }
        }
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[EinTildePoint<S>] {
        &self.samples
    }

    pub fn start(&self) -> &EinTildePoint<S> {
        &self.samples[0]
    }

    pub fn end(&self) -> &EinTildePoint<S> {
        self.samples.last().unwrap()
    }

    pub fn time_range(&self) -> (S, S) {
        (self.start().t, self.end().t)
    }

    /// Interpolated position at time `t`, clamped to the sampled range.
    pub fn value_at(&self, t: S) -> EinTildePoint<S> {
        if t <= self.start().t {
            return self.start().clone();
        }
        if t >= self.end().t {
            return self.end().clone();
        }
        let i = match self
            .samples
            .binary_search_by(|s| to_f64(s.t).partial_cmp(&to_f64(t)).unwrap())
        {
            Ok(i) => return self.samples[i].clone(),
            Err(i) => i - 1,
        };
        let (a, b) = (&self.samples[i], &self.samples[i + 1]);
        let frac = (t - a.t) / (b.t - a.t);
        let x = a.x.slerp(&b.x, frac).expect("segments are non-antipodal");
        EinTildePoint { x, t }
    }

    /// The curve re-sampled at `count` uniform times over its range.
    pub fn resample(&self, count: usize) -> Result<Self> {
        let (a, b) = self.time_range();
        let samples = (0..count.max(2))
            .map(|k| {
                let frac = real::<S>(k as f64 / (count.max(2) - 1) as f64);
                self.value_at(a + (b - a) * frac)
            })
            .collect();
        Self::new(samples)
    }

    pub fn reversed_in_time(&self) -> Self {
        let samples = self
            .samples
            .iter()
            .rev()
            .map(|p| EinTildePoint { x: p.x.clone(), t: -p.t })
            .collect();
        Self { samples }
    }
}

/// Verdict of `classify_curve`.
#[derive(Clone, Debug, PartialEq)]
pub enum CurveClass {
    /// Every segment is strictly chronological.
    Timelike,
    /// Every segment is causal, but the curve is neither strictly timelike
    /// nor a single null geodesic.
    Causal,
    /// All samples lie on one great circle traversed at unit speed.
    NullGeodesic,
    /// Some segment violates the Lipschitz bound.
    NotCausal {
        /// Index of the first violating segment.
        segment: usize,
        /// Amount by which d0 exceeds the time increment.
        excess: f64,
    },
}

/// Classifies a sampled curve by its segment-wise causal character, with a
/// plane-fit test singling out null geodesics.
pub fn classify_curve<S: Scalar>(c: &CausalCurve<S>, eps: f64) -> Result<CurveClass> {
    let samples = c.samples();
    let mut all_strict = true;
    for (i, pair) in samples.windows(2).enumerate() {
        let d = to_f64(pair[0].x.distance(&pair[1].x));
        let dt = to_f64(pair[1].t - pair[0].t);
        if d > dt + eps {
            return Ok(CurveClass::NotCausal { segment: i, excess: d - dt });
        }
        if d >= dt - eps {
            all_strict = false;
        }
    }
    if is_null_geodesic(c, eps) {
        return Ok(CurveClass::NullGeodesic);
    }
    if all_strict {
        return Ok(CurveClass::Timelike);
    }
    Ok(CurveClass::Causal)
}

/// Tests whether the samples lie on one great circle traversed at unit speed
/// in one direction. The plane is fitted by SVD; the defect is the residual
/// outside the best 2-plane, at threshold eps * sqrt(sample count).
fn is_null_geodesic<S: Scalar>(c: &CausalCurve<S>, eps: f64) -> bool {
    let samples = c.samples();
    let k = samples.len();
    let dim = samples[0].x.coords().len();

    // Unit speed segment-wise.
    for pair in samples.windows(2) {
        let d = to_f64(pair[0].x.distance(&pair[1].x));
        let dt = to_f64(pair[1].t - pair[0].t);
        if (d - dt).abs() > eps * (1.0 + dt) {
            return false;
        }
    }

    let mut m = DMatrix::<S>::zeros(k, dim);
    for (i, p) in samples.iter().enumerate() {
        m.row_mut(i).copy_from(&p.x.coords().transpose());
    }
    let svd = m.clone().svd(true, true);
    let mut sv: Vec<f64> = svd.singular_values.iter().map(|&s| to_f64(s)).collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let defect: f64 = sv.iter().skip(2).map(|s| s * s).sum::<f64>().sqrt();
    if defect > eps.max(1e-12) * (k as f64).sqrt() {
        return false;
    }
    if k == 2 {
        return true;
    }

    // Monotone angle traversal: unwrap the in-plane angle and compare its
    // advance with the time increments.
    let v_t = svd.v_t.as_ref().unwrap();
    let b1 = v_t.row(0).transpose();
    let b2 = v_t.row(1).transpose();
    let mut prev = 0.0f64;
    let mut total = 0.0f64;
    let mut first = true;
    let mut unwrapped = Vec::with_capacity(k);
    for p in samples {
        let a = to_f64(p.x.coords().dot(&b1));
        let b = to_f64(p.x.coords().dot(&b2));
        let phi = b.atan2(a);
        if first {
            prev = phi;
            first = false;
        } else {
            let mut inc = phi - prev;
            while inc > std::f64::consts::PI {
                inc -= std::f64::consts::TAU;
            }
            while inc <= -std::f64::consts::PI {
                inc += std::f64::consts::TAU;
            }
            total += inc;
            prev = phi;
        }
        unwrapped.push(total);
    }
    let sign = if total >= 0.0 { 1.0 } else { -1.0 };
    let t0 = to_f64(samples[0].t);
    for (i, p) in samples.iter().enumerate() {
        let expected = sign * (to_f64(p.t) - t0);
        if (unwrapped[i] - expected).abs() > eps * (1.0 + expected.abs()) + 1e-9 {
            return false;
        }
    }
    true
}

/// Extracts a convergent subsequence of causal curves on a uniform time grid
/// by radius-halving retention around a tail anchor, and returns the anchor
/// re-sampled on the grid.
pub fn limit_curve<S: Scalar>(curves: &[CausalCurve<S>], grid: usize) -> Result<CausalCurve<S>> {
    if curves.is_empty() {
        return Err(Error::Validation("empty curve sequence".into()));
    }
    if grid < 2 {
        return Err(Error::Validation("grid must have at least 2 points".into()));
    }
    let mut a = f64::NEG_INFINITY;
    let mut b = f64::INFINITY;
    for (i, c) in curves.iter().enumerate() {
        if let CurveClass::NotCausal { segment, excess } = classify_curve(c, 1e-9)? {
            return Err(Error::Precondition(format!(
                "curve {i} is not causal (segment {segment}, excess {excess})"
            )));
        }
        let (lo, hi) = c.time_range();
        a = a.max(to_f64(lo));
        b = b.min(to_f64(hi));
    }
    if b <= a {
        return Err(Error::Precondition(
            "curves have no common time interval".into(),
        ));
    }

    let times: Vec<S> = (0..grid)
        .map(|j| real(a + (b - a) * j as f64 / (grid - 1) as f64))
        .collect();
    let table: Vec<Vec<EinTildePoint<S>>> = curves
        .iter()
        .map(|c| times.iter().map(|&t| c.value_at(t)).collect())
        .collect();

    let sup_dist = |i: usize, j: usize| -> f64 {
        (0..grid)
            .map(|g| to_f64(table[i][g].x.distance(&table[j][g].x)))
            .fold(0.0, f64::max)
    };

    let mut retained: Vec<usize> = (0..curves.len()).collect();
    let mut radius = std::f64::consts::PI;
    let tol = 2.0 * (b - a) / grid as f64 + 1e-9;
    while radius > tol / 4.0 && retained.len() > 1 {
        let anchor = *retained.last().unwrap();
        let kept: Vec<usize> = retained
            .iter()
            .copied()
            .filter(|&i| sup_dist(i, anchor) <= radius)
            .collect();
        retained = kept;
        radius *= 0.5;
    }

    // Cauchy check on the surviving tail.
    let tail: Vec<usize> = retained.iter().rev().take(5).copied().collect();
    if tail.len() >= 2 {
        for w in tail.windows(2) {
            if sup_dist(w[0], w[1]) > tol {
                return Err(Error::NonConvergence(format!(
                    "retained subsequence spread {} exceeds tolerance {tol}",
                    sup_dist(w[0], w[1])
                )));
            }
        }
    } else if curves.len() > 1 {
        return Err(Error::NonConvergence(
            "no convergent subsequence at grid resolution".into(),
        ));
    }

    let anchor = *retained.last().unwrap();
    CausalCurve::new(table[anchor].clone())
}

/// Perturbs a causal, non-null-geodesic curve into a strictly timelike one
/// with the same endpoints, within uniform distance 10*eps.
///
/// Corners are first shaved toward the local chord (strictly shortening the
/// spatial path), then the remaining slack is spread by re-positioning
/// samples along the shaved polyline.
pub fn timelike_perturbation<S: Scalar>(c: &CausalCurve<S>, eps: f64) -> Result<CausalCurve<S>> {
    match classify_curve(c, eps.min(1e-9))? {
        CurveClass::NotCausal { segment, excess } => {
            return Err(Error::Precondition(format!(
                "input is not causal (segment {segment}, excess {excess})"
            )))
        }
        CurveClass::NullGeodesic => {
            return Err(Error::Impossible(
                "a single null geodesic admits no nearby timelike curve with the same endpoints"
                    .into(),
            ))
        }
        CurveClass::Timelike => return Ok(c.clone()),
        CurveClass::Causal => {}
    }

    let samples = c.samples();
    let k = samples.len();

    // Corner shave: pull interior samples toward the time-weighted chord
    // point of their neighbors, by at most 5*eps.
    let mut shaved: Vec<EinTildePoint<S>> = samples.to_vec();
    for i in 1..k - 1 {
        let prev = &samples[i - 1];
        let next = &samples[i + 1];
        let frac = (samples[i].t - prev.t) / (next.t - prev.t);
        let chord = match prev.x.slerp(&next.x, frac) {
            Ok(p) => p,
            Err(_) => continue,
        };
        let gap = to_f64(samples[i].x.distance(&chord));
        if gap < 1e-15 {
            continue;
        }
        let w = (5.0 * eps / gap).min(1.0);
        shaved[i].x = samples[i].x.slerp(&chord, real(w)).expect("within a hemisphere");
    }

    // Spread the slack: cumulative arc lengths along the shaved polyline,
    // blended toward the time-proportional parametrization.
    let mut arcs = vec![0.0f64];
    for w in shaved.windows(2) {
        arcs.push(arcs.last().unwrap() + to_f64(w[0].x.distance(&w[1].x)));
    }
    let total_len = *arcs.last().unwrap();
    let total_time = to_f64(samples[k - 1].t - samples[0].t);
    let t0 = to_f64(samples[0].t);
    if total_len >= total_time {
        return Err(Error::Impossible(
            "no slack after shaving; the curve is a null pregeodesic at this resolution".into(),
        ));
    }
    let max_shift = (0..k)
        .map(|i| (arcs[i] - total_len * (to_f64(samples[i].t) - t0) / total_time).abs())
        .fold(0.0, f64::max);
    let blend = if max_shift > 1e-15 {
        (5.0 * eps / max_shift).min(1.0)
    } else {
        0.0
    };

    let position_at_arc = |s: f64| -> SpherePoint<S> {
        if s <= 0.0 {
            return shaved[0].x.clone();
        }
        if s >= total_len {
            return shaved[k - 1].x.clone();
        }
        let seg = arcs.partition_point(|&a| a <= s) - 1;
        let seg_len = arcs[seg + 1] - arcs[seg];
        if seg_len < 1e-15 {
            return shaved[seg].x.clone();
        }
        let frac = real::<S>((s - arcs[seg]) / seg_len);
        shaved[seg].x.slerp(&shaved[seg + 1].x, frac).expect("non-antipodal")
    };

    let mut out = Vec::with_capacity(k);
    for i in 0..k {
        let proportional = total_len * (to_f64(samples[i].t) - t0) / total_time;
        let s = (1.0 - blend) * arcs[i] + blend * proportional;
        out.push(EinTildePoint { x: position_at_arc(s), t: samples[i].t });
    }
    let curve = CausalCurve::new(out)?;

    // The construction guarantees strictness; confirm and report otherwise.
    for (i, pair) in curve.samples().windows(2).enumerate() {
        let d = to_f64(pair[0].x.distance(&pair[1].x));
        let dt = to_f64(pair[1].t - pair[0].t);
        if d >= dt {
            return Err(Error::NonConvergence(format!(
                "perturbed segment {i} failed to become strict (d = {d}, dt = {dt})"
            )));
        }
    }
    Ok(curve)
}

/// Samples a null geodesic into a curve.
pub fn sampled_null_geodesic<S: Scalar>(
    p: &EinTildePoint<S>,
    dir: &nalgebra::DVector<S>,
    length: f64,
    count: usize,
) -> Result<CausalCurve<S>> {
    let samples = (0..count.max(2))
        .map(|i| {
            let s = real::<S>(length * i as f64 / (count.max(2) - 1) as f64);
            null_geodesic_unchecked(p, dir, s)
        })
        .collect();
    CausalCurve::new(samples)
}

/// Segment-wise causal certificate used by other modules.
pub fn curve_is_causal<S: Scalar>(c: &CausalCurve<S>, eps: S) -> bool {
    c.samples().windows(2).all(|pair| {
        causal_classify(&pair[0], &pair[1], eps) != CausalClass::Unrelated
    })
}
