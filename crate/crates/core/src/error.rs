//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Input failed a structural invariant (dimension, finiteness, ...).
    #[error("validation error: {0}")]
    Validation(String),

    /// A vector that should lie on the unit sphere does not.
    #[error("not a unit vector: norm is {norm}")]
    NotUnit { norm: f64 },

    /// Great-circle interpolation refused at (near-)antipodal endpoints.
    #[error("antipodal ambiguity: sphere distance {distance} leaves the minimizing geodesic non-unique")]
    AntipodalAmbiguity { distance: f64 },

    /// A null-cone representative degenerated under normalization.
    #[error("degenerate ray: |u| = {u_norm}, |w| = {w_norm}; input is not a usable null vector")]
    DegenerateRay { u_norm: f64, w_norm: f64 },

    /// Matrix is not in O(2,n+1) at the requested tolerance.
    #[error("not J-orthogonal: Frobenius defect {defect} exceeds tolerance {tol}")]
    NotOrthogonal { defect: f64, tol: f64 },

    /// Canonical lifts exist only for the identity component.
    #[error("matrix is outside the identity component O_0(2,n+1): {0}")]
    NotIdentityComponent(String),

    /// Winding could not be resolved when composing lifts.
    #[error("cocycle ambiguity: time defect {defect} is within {margin} of pi; retry with a smaller tracking step")]
    CocycleAmbiguity { defect: f64, margin: f64 },

    /// The correspondence set does not pin down a unique group element.
    #[error("degenerate configuration: singular value gap {gap} below threshold {threshold}")]
    DegenerateFit { gap: f64, threshold: f64 },

    /// Fitted scales have inconsistent signs.
    #[error("orientation error: fitted projective scales have mixed signs")]
    MixedScaleSigns,

    /// Point is outside the chart where an inverse is defined.
    #[error("outside domain: distance to boundary is {distance_to_boundary}")]
    OutsideDomain { distance_to_boundary: f64 },

    /// A sequence did not converge at the last refinement.
    #[error("non-convergence: {0}")]
    NonConvergence(String),

    /// The requested object provably does not exist.
    #[error("impossible: {0}")]
    Impossible(String),

    /// An operation's stated precondition does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Rejection sampling efficiency collapsed.
    #[error("domain too thin: acceptance rate {rate} below 1e-4")]
    DomainTooThin { rate: f64 },

    /// Boundary sampling could not relate a sample to the reference graph.
    #[error("resolution error: {0}")]
    Resolution(String),

    /// Gluing failed causal re-validation; carries a description of the witness.
    #[error("gluing failure: {0}")]
    GluingFailure(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
