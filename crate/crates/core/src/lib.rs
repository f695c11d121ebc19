//! Causal geometry of the Einstein universe Ein_{1,n} and its universal
//! cover: closed-form causal relations, null geodesics and their conjugate
//! points, the O(2,n+1) conformal action with reconstruction from sampled
//! data, the conformal embedding of Minkowski space, and desk-scale
//! validators for Cauchy hypersurfaces, causally convex domains and limit
//! curves.

pub mod error;
pub mod scalar;
pub mod sphere;
pub mod ein;
pub mod graphs;
pub mod conformal;
pub mod curves;
pub mod embed;
pub mod domains;
pub mod development;
pub mod causal_set;
pub mod io;
pub mod selftest;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Concrete `f64` aliases for the main domain types.
pub type SpherePoint64 = sphere::SpherePoint<f64>;
pub type EinTildePoint64 = ein::EinTildePoint<f64>;
pub type EinPoint64 = ein::EinPoint<f64>;
pub type NullVector64 = ein::NullVector<f64>;
pub type AchronalGraph64 = graphs::AchronalGraph<f64>;
pub type OrthogonalTransform64 = conformal::OrthogonalTransform<f64>;
pub type LiftedConformalTransform64 = conformal::LiftedConformalTransform<f64>;
pub type CausalCurve64 = curves::CausalCurve<f64>;
pub type MinkowskiPoint64 = embed::MinkowskiPoint<f64>;
pub type MinkowskiDiamond64 = embed::MinkowskiDiamond<f64>;
pub type Domain64 = domains::Domain<f64>;
