//! The conformal action of O(2,n+1) on Ein_{1,n}, canonical lifts to the
//! conformal group of the cover, and reconstruction of the unique group
//! element from sampled conformal data.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ein::{
    lift_from_base, normalize_null, null_cone_rep, project_to_cover_base, EinPoint, EinTildePoint,
    NullVector,
};
use crate::error::{Error, Result};
use crate::scalar::{real, to_f64, Scalar};
use crate::sphere::SpherePoint;

/// Default membership tolerance for O(2,n+1).
pub const ORTHOGONALITY_TOL: f64 = 1e-8;

/// Relative singular-value gap certifying fit uniqueness.
pub const FIT_GAP_THRESHOLD: f64 = 1e-6;

/// Tracking step (radians of domain path) used when lifting continuously.
pub const TRACKING_STEP: f64 = std::f64::consts::FRAC_PI_4;

/// The signature form J = diag(+1, +1, -1, ..., -1) of R^{2,n+1}.
pub fn signature_j<S: Scalar>(n: usize) -> DMatrix<S> {
    DMatrix::from_fn(n + 3, n + 3, |i, j| {
        if i != j {
            S::zero()
        } else if i < 2 {
            S::one()
        } else {
            -S::one()
        }
    })
}

/// ||M^T J M - J||_F, the membership defect.
pub fn orthogonality_defect<S: Scalar>(m: &DMatrix<S>) -> S {
    let n = m.nrows() - 3;
    let j = signature_j::<S>(n);
    (m.transpose() * &j * m - &j).norm()
}

/// An element of O(2,n+1) with its component flags.
#[derive(Clone, Debug)]
pub struct OrthogonalTransform<S: Scalar> {
    m: DMatrix<S>,
    /// Sign of the determinant of the leading 2x2 (time-plane) block.
    time_preserving: bool,
    /// Sign of the determinant of the trailing (n+1)x(n+1) block.
    space_preserving: bool,
}

impl<S: Scalar> OrthogonalTransform<S> {
    /// Membership test: accepts iff the J-orthogonality defect is within
    /// `tol`, and records the component flags.
    pub fn validate(m: DMatrix<S>, tol: f64) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() < 5 {
            return Err(Error::Validation(format!(
                "expected a square matrix of size n+3 with n >= 2, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let defect = to_f64(orthogonality_defect(&m));
        if defect > tol {
            return Err(Error::NotOrthogonal { defect, tol });
        }
        // O(2,n+1) has four components, separated by the signs of the
        // determinants of the two diagonal blocks (both are invertible for
        // group elements).
        let time_block = m.view((0, 0), (2, 2)).into_owned();
        let space_block = m.view((2, 2), (m.nrows() - 2, m.ncols() - 2)).into_owned();
        Ok(Self {
            m,
            time_preserving: to_f64(time_block.determinant()) > 0.0,
            space_preserving: to_f64(space_block.determinant()) > 0.0,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            m: DMatrix::identity(n + 3, n + 3),
            time_preserving: true,
            space_preserving: true,
        }
    }

    /// Rotation by `phi` in the (u1, u2) time plane.
    pub fn time_rotation(n: usize, phi: S) -> Self {
        let mut m = DMatrix::identity(n + 3, n + 3);
        m[(0, 0)] = phi.cos();
        m[(0, 1)] = -phi.sin();
        m[(1, 0)] = phi.sin();
        m[(1, 1)] = phi.cos();
        Self { m, time_preserving: true, space_preserving: true }
    }

    /// Embeds a rotation of the spatial factor R^{n+1}.
    pub fn spatial(r: &DMatrix<S>) -> Result<Self> {
        let dim = r.nrows();
        let mut m = DMatrix::identity(dim + 2, dim + 2);
        m.view_mut((2, 2), (dim, dim)).copy_from(r);
        Self::validate(m, ORTHOGONALITY_TOL)
    }

    pub fn matrix(&self) -> &DMatrix<S> {
        &self.m
    }

    pub fn n(&self) -> usize {
        self.m.nrows() - 3
    }

    pub fn det_sign(&self) -> f64 {
        if self.time_preserving == self.space_preserving {
            1.0
        } else {
            -1.0
        }
    }

    pub fn is_identity_component(&self) -> bool {
        self.time_preserving && self.space_preserving
    }

    /// Group inverse, exact through the signature form: M^{-1} = J M^T J.
    pub fn inverse(&self) -> Self {
        let n = self.n();
        let j = signature_j::<S>(n);
        let m_inv = &j * self.m.transpose() * &j;
        Self {
            m: m_inv,
            time_preserving: self.time_preserving,
            space_preserving: self.space_preserving,
        }
    }
}

/// One J-orthogonal polar-type correction sweep: M <- M (3I - J M^T J M)/2,
/// iterated until the defect is below `target` or 50 iterations.
pub fn polar_correct<S: Scalar>(m: &mut DMatrix<S>, target: f64) {
    let n = m.nrows() - 3;
    let j = signature_j::<S>(n);
    let id = DMatrix::<S>::identity(m.nrows(), m.ncols());
    let half = real::<S>(0.5);
    let three = real::<S>(3.0);
    for _ in 0..50 {
        if to_f64(orthogonality_defect(m)) < target {
            break;
        }
        let e = &j * m.transpose() * &j * &*m;
        let corrected = &*m * ((&id * three - e) * half);
        *m = corrected;
    }
}

/// The conformal action on the compact model, through the null-cone model.
pub fn apply_ein<S: Scalar>(t: &OrthogonalTransform<S>, e: &EinPoint<S>) -> Result<EinPoint<S>> {
    let v = null_cone_rep(e);
    let image = t.matrix() * v.as_vector();
    normalize_null(&NullVector::new(image)?)
}

/// An element of the conformal group of the cover: an identity-component
/// matrix plus a deck winding.
#[derive(Clone, Debug)]
pub struct LiftedConformalTransform<S: Scalar> {
    base: OrthogonalTransform<S>,
    winding: i64,
}

impl<S: Scalar> LiftedConformalTransform<S> {
    pub fn base(&self) -> &OrthogonalTransform<S> {
        &self.base
    }

    pub fn winding(&self) -> i64 {
        self.winding
    }

    pub fn with_winding(mut self, winding: i64) -> Self {
        self.winding = winding;
        self
    }
}

/// The reference basepoint (e1, 0) used to normalize canonical lifts.
pub fn basepoint<S: Scalar>(n: usize) -> EinTildePoint<S> {
    EinTildePoint { x: SpherePoint::axis(n, 0), t: S::zero() }
}

/// The canonical lift of an identity-component element: winding 0, with the
/// basepoint's time displacement normalized into (-pi, pi].
pub fn canonical_lift<S: Scalar>(t: OrthogonalTransform<S>) -> Result<LiftedConformalTransform<S>> {
    if !t.is_identity_component() {
        return Err(Error::NotIdentityComponent(format!(
            "time-preserving: {}, space-orientation-preserving: {}",
            t.time_preserving, t.space_preserving
        )));
    }
    Ok(LiftedConformalTransform { base: t, winding: 0 })
}

/// The deck generator delta as a lift: identity base, winding 1.
pub fn delta_lift<S: Scalar>(n: usize) -> LiftedConformalTransform<S> {
    LiftedConformalTransform { base: OrthogonalTransform::identity(n), winding: 1 }
}

fn wrap_to_pi(x: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    let mut r = x % tau;
    if r > std::f64::consts::PI {
        r -= tau;
    } else if r <= -std::f64::consts::PI {
        r += tau;
    }
    r
}

/// The continuous lift of `apply_ein` at winding zero: tracks the image angle
/// along a path from the basepoint to `p` and unwraps it, normalized so the
/// basepoint's time displacement lies in (-pi, pi].
fn lift_zero<S: Scalar>(
    base: &OrthogonalTransform<S>,
    p: &EinTildePoint<S>,
) -> Result<EinTildePoint<S>> {
    let n = base.n();
    let bp = basepoint::<S>(n);

    // Domain path: a spatial leg from the base sphere point to p.x at t = 0,
    // then a time leg up to p.t. An antipodal target is routed through an
    // orthogonal waypoint.
    let mut waypoints: Vec<SpherePoint<S>> = vec![bp.x.clone()];
    let d = to_f64(bp.x.distance(&p.x));
    if d >= std::f64::consts::PI - 1e-9 {
        waypoints.push(SpherePoint::axis(n, 1));
    }
    waypoints.push(p.x.clone());

    let mut step = TRACKING_STEP;
    'attempt: for _ in 0..8 {
        let theta0 = to_f64(apply_ein(base, &project_to_cover_base(&bp))?.theta());
        let mut t_acc = wrap_to_pi(theta0);
        if t_acc <= -std::f64::consts::PI + 1e-15 {
            t_acc += std::f64::consts::TAU;
        }
        let mut theta_prev = t_acc;
        let mut x_img = apply_ein(base, &project_to_cover_base(&bp))?.x().clone();

        let advance = |point: &EinTildePoint<S>,
                           theta_prev: &mut f64,
                           t_acc: &mut f64,
                           x_img: &mut SpherePoint<S>|
         -> Result<bool> {
            let img = apply_ein(base, &project_to_cover_base(point))?;
            let inc = wrap_to_pi(to_f64(img.theta()) - *theta_prev);
            if inc.abs() > std::f64::consts::FRAC_PI_2 {
                return Ok(false);
            }
            *t_acc += inc;
            *theta_prev = to_f64(img.theta());
            *x_img = img.x().clone();
            Ok(true)
        };

        // Spatial legs.
        for leg in waypoints.windows(2) {
            let (from, to) = (&leg[0], &leg[1]);
            let dist = to_f64(from.distance(to));
            if dist < 1e-15 {
                continue;
            }
            let dir = from.direction_toward(to)?;
            let steps = (dist / step).ceil() as usize;
            for k in 1..=steps {
                let s = real::<S>(dist * k as f64 / steps as f64);
                let point = EinTildePoint { x: from.walk(&dir, s), t: S::zero() };
                if !advance(&point, &mut theta_prev, &mut t_acc, &mut x_img)? {
                    step *= 0.5;
                    continue 'attempt;
                }
            }
        }
        // Time leg.
        let t_total = to_f64(p.t);
        let steps = (t_total.abs() / step).ceil().max(1.0) as usize;
        for k in 1..=steps {
            let t = real::<S>(t_total * k as f64 / steps as f64);
            let point = EinTildePoint { x: p.x.clone(), t };
            if !advance(&point, &mut theta_prev, &mut t_acc, &mut x_img)? {
                step *= 0.5;
                continue 'attempt;
            }
        }
        return Ok(EinTildePoint { x: x_img, t: real(t_acc) });
    }
    Err(Error::NonConvergence(
        "angle tracking failed to stabilize after 8 step refinements".into(),
    ))
}

/// Action of a lifted transform on the cover: the continuous lift of the base
/// action composed with delta^winding. Covering-equivariant with `apply_ein`.
pub fn apply_cover<S: Scalar>(
    l: &LiftedConformalTransform<S>,
    p: &EinTildePoint<S>,
) -> Result<EinTildePoint<S>> {
    let lifted = lift_zero(&l.base, p)?;
    Ok(EinTildePoint {
        x: lifted.x,
        t: lifted.t + S::two_pi() * real::<S>(l.winding as f64),
    })
}

/// The group law on the cover. The base parts multiply; the winding adds a
/// cocycle read off numerically at the basepoint.
pub fn compose<S: Scalar>(
    l1: &LiftedConformalTransform<S>,
    l2: &LiftedConformalTransform<S>,
) -> Result<LiftedConformalTransform<S>> {
    let mut product = l1.base.matrix() * l2.base.matrix();
    polar_correct(&mut product, 1e-12);
    let base = OrthogonalTransform::validate(product, ORTHOGONALITY_TOL)?;

    let bp = basepoint::<S>(l1.base.n());
    let through = lift_zero(&l1.base, &lift_zero(&l2.base, &bp)?)?;
    let direct = lift_zero(&base, &bp)?;
    let defect = to_f64(through.t - direct.t);
    let frac = wrap_to_pi(defect);
    if frac.abs() > std::f64::consts::PI - 1e-3 {
        return Err(Error::CocycleAmbiguity { defect, margin: 1e-3 });
    }
    let cocycle = ((defect - frac) / std::f64::consts::TAU).round() as i64;
    debug_assert!(frac.abs() < 1e-6, "cocycle should be a near-integer multiple of 2 pi");

    Ok(LiftedConformalTransform { base, winding: l1.winding + l2.winding + cocycle })
}

/// Inverse in the lifted group.
pub fn inverse_lift<S: Scalar>(
    l: &LiftedConformalTransform<S>,
) -> Result<LiftedConformalTransform<S>> {
    let base_inv = l.base.inverse();
    let candidate = LiftedConformalTransform { base: base_inv, winding: 0 };
    let product = compose(&candidate, &LiftedConformalTransform {
        base: l.base.clone(),
        winding: 0,
    })?;
    // candidate * l has identity base; cancel its total winding.
    Ok(LiftedConformalTransform {
        base: candidate.base,
        winding: -l.winding - product.winding,
    })
}

/// Result of a Liouville reconstruction.
#[derive(Clone, Debug)]
pub struct LiouvilleFit<S: Scalar> {
    pub transform: OrthogonalTransform<S>,
    /// Max relocation error over the correspondences after correction.
    pub residual: S,
    /// Relative gap between the two smallest singular values, certifying
    /// uniqueness of the reconstructed element.
    pub singular_gap: S,
}

/// Reconstructs the unique group element mapping each source point to its
/// target, from the null space of the stacked projective system.
///
/// Each correspondence (e, e') contributes the n+3 linear equations
/// P M v = 0 with v the cone representative of e and P the projector
/// orthogonal to the representative of e'; the per-correspondence scale is
/// eliminated by the projector. Uniqueness is certified by the singular-value
/// gap, the sign is fixed so all scales are positive, and the raw null-space
/// matrix is pushed onto the group by the J-orthogonal polar correction.
pub fn fit_liouville<S: Scalar>(
    correspondences: &[(EinPoint<S>, EinPoint<S>)],
) -> Result<LiouvilleFit<S>> {
    if correspondences.is_empty() {
        return Err(Error::Validation("no correspondences".into()));
    }
    let n = correspondences[0].0.x().n();
    let dim = n + 3;
    if correspondences.len() < n + 4 {
        return Err(Error::Precondition(format!(
            "need at least n+4 = {} correspondences in general position, got {}",
            n + 4,
            correspondences.len()
        )));
    }

    let mut a = DMatrix::<S>::zeros(correspondences.len() * dim, dim * dim);
    for (ci, (src, dst)) in correspondences.iter().enumerate() {
        let v = null_cone_rep(src).as_vector().clone();
        let w = null_cone_rep(dst).as_vector().clone();
        let w_norm2 = w.norm_squared();
        // P = I - w w^T / |w|^2
        let p = DMatrix::<S>::identity(dim, dim) - &w * w.transpose() / w_norm2;
        for r in 0..dim {
            for col in 0..dim {
                for row in 0..dim {
                    // Coefficient of M[row, col] in (P M v)_r.
                    a[(ci * dim + r, col * dim + row)] = p[(r, row)] * v[col];
                }
            }
        }
    }

    let svd = a.svd(false, true);
    let v_t = svd.v_t.as_ref().expect("requested V^T");
    let sv = &svd.singular_values;
    // Locate the two smallest singular values.
    let mut idx: Vec<usize> = (0..sv.len()).collect();
    idx.sort_by(|&i, &j| to_f64(sv[i]).partial_cmp(&to_f64(sv[j])).unwrap());
    let smallest = idx[0];
    let second = sv[idx[1]];
    let largest = sv[*idx.last().unwrap()];
    let gap = second / largest;
    if to_f64(gap) < FIT_GAP_THRESHOLD {
        return Err(Error::DegenerateFit {
            gap: to_f64(gap),
            threshold: FIT_GAP_THRESHOLD,
        });
    }

    // Reshape the null vector (column-major) into the matrix.
    let null_row = v_t.row(smallest);
    let mut m = DMatrix::<S>::zeros(dim, dim);
    for col in 0..dim {
        for row in 0..dim {
            m[(row, col)] = null_row[col * dim + row];
        }
    }

    // Fix the projective sign so every correspondence scale is positive.
    let mut pos = 0usize;
    let mut neg = 0usize;
    for (src, dst) in correspondences {
        let v = null_cone_rep(src).as_vector().clone();
        let w = null_cone_rep(dst).as_vector().clone();
        let s = to_f64(w.dot(&(&m * &v)));
        if s > 0.0 {
            pos += 1;
        } else if s < 0.0 {
            neg += 1;
        }
    }
    if pos > 0 && neg > 0 {
        return Err(Error::MixedScaleSigns);
    }
    if neg > 0 {
        m = -m;
    }

    // Scale onto the group: minimize ||s^2 M^T J M - J||_F over s.
    let j = signature_j::<S>(n);
    let g = m.transpose() * &j * &m;
    let num = to_f64(g.dot(&j));
    let den = to_f64(g.dot(&g));
    if num <= 0.0 || den <= 0.0 {
        return Err(Error::MixedScaleSigns);
    }
    m *= real::<S>((num / den).sqrt());
    polar_correct(&mut m, 1e-10);

    let transform = OrthogonalTransform::validate(m, ORTHOGONALITY_TOL)?;
    let mut residual = S::zero();
    for (src, dst) in correspondences {
        let image = apply_ein(&transform, src)?;
        let dx = image.x().distance(dst.x());
        let dth = to_f64((image.theta() - dst.theta()).abs());
        let circ = real::<S>(dth.min(std::f64::consts::TAU - dth));
        let err = dx + circ;
        if err > residual {
            residual = err;
        }
    }

    Ok(LiouvilleFit { transform, residual, singular_gap: gap })
}

/// Deterministic sampler of identity-component elements: the exponential of a
/// seeded random J-antisymmetric generator with the given Frobenius norm.
pub fn random_orthogonal<S: Scalar>(n: usize, seed: u64, magnitude: f64) -> OrthogonalTransform<S> {
    assert!(magnitude >= 0.0, "magnitude must be nonnegative");
    let dim = n + 3;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut skew = DMatrix::<S>::zeros(dim, dim);
    for i in 0..dim {
        for jj in (i + 1)..dim {
            let x: f64 = {
                let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
                let u2: f64 = rng.gen();
                (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
            };
            skew[(i, jj)] = real(x);
            skew[(jj, i)] = real(-x);
        }
    }
    let generator = signature_j::<S>(n) * skew;
    let norm = to_f64(generator.norm());
    let scaled = if norm > 0.0 && magnitude > 0.0 {
        generator * real::<S>(magnitude / norm)
    } else {
        DMatrix::zeros(dim, dim)
    };
    let mut m = matrix_exp(&scaled);
    polar_correct(&mut m, 1e-13);
    OrthogonalTransform::validate(m, ORTHOGONALITY_TOL).expect("exponential stays in the group")
}

/// Matrix exponential by scaling-and-squaring with a Taylor series.
pub fn matrix_exp<S: Scalar>(x: &DMatrix<S>) -> DMatrix<S> {
    let dim = x.nrows();
    let norm = to_f64(x.norm());
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil().max(0.0) as u32
    } else {
        0
    };
    let scaled = x / real::<S>(2f64.powi(squarings as i32));
    let mut result = DMatrix::<S>::identity(dim, dim);
    let mut term = DMatrix::<S>::identity(dim, dim);
    for k in 1..=24 {
        term = &term * &scaled / real::<S>(k as f64);
        result += &term;
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// Convenience: the canonical lift applied to a base point through the
/// covering, checking equivariance inputs.
pub fn apply_cover_to_base_lift<S: Scalar>(
    l: &LiftedConformalTransform<S>,
    e: &EinPoint<S>,
    k: i64,
) -> Result<EinTildePoint<S>> {
    apply_cover(l, &lift_from_base(e, k))
}
