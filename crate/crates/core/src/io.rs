//! JSON wire formats (f64) for the domain types, plus CSV emitters.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::causal_set::CausalSet;
use crate::conformal::{LiftedConformalTransform, OrthogonalTransform, ORTHOGONALITY_TOL};
use crate::curves::CausalCurve;
use crate::domains::Domain;
use crate::ein::{EinPoint, EinTildePoint};
use crate::embed::MinkowskiPoint;
use crate::error::{Error, Result};
use crate::graphs::AchronalGraph;
use crate::sphere::SpherePoint;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoverPointDto {
    pub x: Vec<f64>,
    pub t: f64,
}

impl CoverPointDto {
    pub fn from_point(p: &EinTildePoint<f64>) -> Self {
        Self { x: p.x.coords().iter().copied().collect(), t: p.t }
    }

    pub fn into_point(&self) -> Result<EinTildePoint<f64>> {
        EinTildePoint::new(SpherePoint::new(DVector::from_vec(self.x.clone()))?, self.t)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EinPointDto {
    pub x: Vec<f64>,
    pub theta: f64,
}

impl EinPointDto {
    pub fn from_point(p: &EinPoint<f64>) -> Self {
        Self { x: p.x().coords().iter().copied().collect(), theta: p.theta() }
    }

    pub fn into_point(&self) -> Result<EinPoint<f64>> {
        EinPoint::new(SpherePoint::new(DVector::from_vec(self.x.clone()))?, self.theta)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MinkowskiPointDto {
    pub tm: f64,
    pub y: Vec<f64>,
}

impl MinkowskiPointDto {
    pub fn from_point(p: &MinkowskiPoint<f64>) -> Self {
        Self { tm: p.t_m, y: p.y.iter().copied().collect() }
    }

    pub fn into_point(&self) -> Result<MinkowskiPoint<f64>> {
        MinkowskiPoint::new(self.tm, DVector::from_vec(self.y.clone()))
    }
}

/// Row-major matrix plus the deck winding of a lift.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TransformDto {
    pub matrix: Vec<Vec<f64>>,
    #[serde(default)]
    pub winding: i64,
}

impl TransformDto {
    pub fn from_lift(l: &LiftedConformalTransform<f64>) -> Self {
        Self {
            matrix: matrix_rows(l.base().matrix()),
            winding: l.winding(),
        }
    }

    pub fn from_transform(t: &OrthogonalTransform<f64>) -> Self {
        Self { matrix: matrix_rows(t.matrix()), winding: 0 }
    }

    pub fn into_transform(&self) -> Result<OrthogonalTransform<f64>> {
        let rows = self.matrix.len();
        if rows == 0 || self.matrix.iter().any(|r| r.len() != rows) {
            return Err(Error::Validation("matrix must be square".into()));
        }
        let m = DMatrix::from_fn(rows, rows, |i, j| self.matrix[i][j]);
        OrthogonalTransform::validate(m, ORTHOGONALITY_TOL)
    }
}

fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CurveDto {
    pub samples: Vec<CoverPointDto>,
}

impl CurveDto {
    pub fn from_curve(c: &CausalCurve<f64>) -> Self {
        Self { samples: c.samples().iter().map(CoverPointDto::from_point).collect() }
    }

    pub fn into_curve(&self) -> Result<CausalCurve<f64>> {
        CausalCurve::new(
            self.samples
                .iter()
                .map(|s| s.into_point())
                .collect::<Result<Vec<_>>>()?,
        )
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GraphSampleDto {
    pub x: Vec<f64>,
    pub f: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GraphDto {
    pub samples: Vec<GraphSampleDto>,
    pub full_sphere: bool,
    pub mesh: f64,
}

impl GraphDto {
    pub fn from_graph(g: &AchronalGraph<f64>) -> Self {
        Self {
            samples: g
                .samples()
                .iter()
                .map(|(x, f)| GraphSampleDto { x: x.coords().iter().copied().collect(), f: *f })
                .collect(),
            full_sphere: g.is_full_sphere(),
            mesh: g.mesh(),
        }
    }

    pub fn into_graph(&self) -> Result<AchronalGraph<f64>> {
        let samples = self
            .samples
            .iter()
            .map(|s| Ok((SpherePoint::new(DVector::from_vec(s.x.clone()))?, s.f)))
            .collect::<Result<Vec<_>>>()?;
        if self.full_sphere {
            Ok(AchronalGraph::from_samples_full_sphere(samples, self.mesh))
        } else {
            AchronalGraph::from_samples(samples, self.mesh)
        }
    }
}

/// Tagged domain representation.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainDto {
    All { n: usize },
    FutureCone { apex: CoverPointDto },
    PastCone { apex: CoverPointDto },
    Diamond { a: CoverPointDto, b: CoverPointDto },
    Lens { lower: GraphDto, upper: GraphDto },
    Union { parts: Vec<DomainDto> },
}

impl DomainDto {
    pub fn from_domain(d: &Domain<f64>) -> Self {
        match d {
            Domain::All { n } => Self::All { n: *n },
            Domain::FutureCone { apex } => {
                Self::FutureCone { apex: CoverPointDto::from_point(apex) }
            }
            Domain::PastCone { apex } => Self::PastCone { apex: CoverPointDto::from_point(apex) },
            Domain::Diamond { a, b } => Self::Diamond {
                a: CoverPointDto::from_point(a),
                b: CoverPointDto::from_point(b),
            },
            Domain::Lens { lower, upper } => Self::Lens {
                lower: GraphDto::from_graph(lower),
                upper: GraphDto::from_graph(upper),
            },
            Domain::Union(parts) => {
                Self::Union { parts: parts.iter().map(Self::from_domain).collect() }
            }
        }
    }

    pub fn into_domain(&self) -> Result<Domain<f64>> {
        match self {
            Self::All { n } => {
                if *n < 2 {
                    return Err(Error::Validation("dimension must be at least 2".into()));
                }
                Ok(Domain::All { n: *n })
            }
            Self::FutureCone { apex } => Ok(Domain::FutureCone { apex: apex.into_point()? }),
            Self::PastCone { apex } => Ok(Domain::PastCone { apex: apex.into_point()? }),
            Self::Diamond { a, b } => Domain::diamond(a.into_point()?, b.into_point()?),
            Self::Lens { lower, upper } => Domain::lens(lower.into_graph()?, upper.into_graph()?),
            Self::Union { parts } => Domain::union(
                parts.iter().map(|p| p.into_domain()).collect::<Result<Vec<_>>>()?,
            ),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CausalSetDto {
    pub points: Vec<CoverPointDto>,
    /// Flattened row-major boolean relation table.
    pub relation: Vec<bool>,
}

impl CausalSetDto {
    pub fn from_set(s: &CausalSet<f64>) -> Self {
        let k = s.len();
        let mut relation = Vec::with_capacity(k * k);
        for i in 0..k {
            for j in 0..k {
                relation.push(i != j && s.related(i, j));
            }
        }
        Self {
            points: s.points().iter().map(CoverPointDto::from_point).collect(),
            relation,
        }
    }
}

/// Liouville fit summary.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FitReportDto {
    pub residual: f64,
    pub singular_gap: f64,
    pub matrix: Vec<Vec<f64>>,
}

/// CSV for Penrose-diagram data: tm, |y|, t, d0.
pub fn penrose_csv(rows: &[(f64, f64, f64, f64)]) -> String {
    let mut out = String::from("tm,abs_y,t,d0\n");
    for (tm, ay, t, d0) in rows {
        out.push_str(&format!("{tm},{ay},{t},{d0}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::causal_set::sprinkle;
    use crate::conformal::{canonical_lift, random_orthogonal};

    #[test]
    fn point_and_curve_round_trip() {
        let p = EinTildePoint { x: SpherePoint::<f64>::axis(2, 1), t: 0.75 };
        let dto = CoverPointDto::from_point(&p);
        let json = serde_json::to_string(&dto).unwrap();
        let back: CoverPointDto = serde_json::from_str(&json).unwrap();
        let q = back.into_point().unwrap();
        assert_eq!(q.x.coords(), p.x.coords());
        assert_eq!(q.t, p.t);
    }

    #[test]
    fn transform_round_trip_preserves_matrix_and_winding() {
        let g = random_orthogonal::<f64>(2, 5, 1.0);
        let l = canonical_lift(g).unwrap().with_winding(-2);
        let dto = TransformDto::from_lift(&l);
        let json = serde_json::to_string(&dto).unwrap();
        let back: TransformDto = serde_json::from_str(&json).unwrap();
        assert_eq!(back.winding, -2);
        let t = back.into_transform().unwrap();
        assert_eq!(t.matrix(), l.base().matrix());
    }

    #[test]
    fn domain_round_trip_preserves_membership() {
        let x0 = SpherePoint::<f64>::axis(2, 0);
        let d = Domain::diamond(
            EinTildePoint { x: x0.clone(), t: -1.0 },
            EinTildePoint { x: x0, t: 1.0 },
        )
        .unwrap();
        let dto = DomainDto::from_domain(&d);
        let json = serde_json::to_string(&dto).unwrap();
        assert!(json.contains("\"kind\":\"diamond\""));
        let back: DomainDto = serde_json::from_str(&json).unwrap();
        let d2 = back.into_domain().unwrap();
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let p = EinTildePoint {
                x: crate::sphere::random_point(&mut rng, 2),
                t: rng.gen_range(-2.0..2.0),
            };
            assert_eq!(d.contains(&p), d2.contains(&p));
        }
    }

    #[test]
    fn causal_set_dto_encodes_the_relation() {
        let x0 = SpherePoint::<f64>::axis(2, 0);
        let d = Domain::diamond(
            EinTildePoint { x: x0.clone(), t: 0.0 },
            EinTildePoint { x: x0, t: 1.0 },
        )
        .unwrap();
        let s = sprinkle(&d, 15, 3, 1e-9).unwrap();
        let dto = CausalSetDto::from_set(&s);
        assert_eq!(dto.relation.len(), 15 * 15);
        for i in 0..15 {
            for j in 0..15 {
                assert_eq!(dto.relation[i * 15 + j], i != j && s.related(i, j));
            }
        }
    }
}
