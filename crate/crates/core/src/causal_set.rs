//! Sprinkled causal sets: finite point samples of a domain carrying the
//! induced causal order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::ein::{causal_classify, CausalClass, EinTildePoint};
use crate::error::{Error, Result};
use crate::domains::Domain;
use crate::scalar::Scalar;

/// A finite set of cover points with the relation table
/// R[i][j] = (j is strictly in the causal future of i).
#[derive(Clone, Debug)]
pub struct CausalSet<S: Scalar> {
    points: Vec<EinTildePoint<S>>,
    relation: Vec<Vec<bool>>,
}

impl<S: Scalar> CausalSet<S> {
    /// Builds the relation from the closed-form classifier and checks the
    /// strict partial order axioms.
    pub fn from_points(points: Vec<EinTildePoint<S>>, eps: S) -> Result<Self> {
        let k = points.len();
        let mut relation = vec![vec![false; k]; k];
        for i in 0..k {
            for j in 0..k {
                if i == j {
                    continue;
                }
                relation[i][j] = matches!(
                    causal_classify(&points[i], &points[j], eps),
                    CausalClass::ChronologicalFuture | CausalClass::CausalNullFuture
                );
            }
        }
        let set = Self { points, relation };
        set.check_order()?;
        Ok(set)
    }

    fn check_order(&self) -> Result<()> {
        let k = self.points.len();
        for i in 0..k {
            if self.relation[i][i] {
                return Err(Error::Validation(format!("relation is reflexive at {i}")));
            }
            for j in 0..k {
                if self.relation[i][j] && self.relation[j][i] {
                    return Err(Error::Validation(format!(
                        "relation is symmetric at ({i}, {j})"
                    )));
                }
                if !self.relation[i][j] {
                    continue;
                }
                for l in 0..k {
                    if self.relation[j][l] && !self.relation[i][l] {
                        return Err(Error::Validation(format!(
                            "relation is not transitive at ({i}, {j}, {l})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn points(&self) -> &[EinTildePoint<S>] {
        &self.points
    }

    pub fn related(&self, i: usize, j: usize) -> bool {
        self.relation[i][j]
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Edges (i, j) with j in the causal future of i.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.len() {
            for j in 0..self.len() {
                if self.relation[i][j] {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Edge list as CSV (header `source,target`), for DAG tools.
    pub fn edges_csv(&self) -> String {
        let mut out = String::from("source,target\n");
        for (i, j) in self.edges() {
            out.push_str(&format!("{i},{j}\n"));
        }
        out
    }
}

/// Rejection-samples `count` points uniformly w.r.t. the product measure of
/// the canonical representative restricted to the domain, and induces the
/// causal order. Deterministic in the seed.
pub fn sprinkle<S: Scalar>(
    domain: &Domain<S>,
    count: usize,
    seed: u64,
    eps: S,
) -> Result<CausalSet<S>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = domain.sample_points(count, &mut rng)?;
    CausalSet::from_points(points, eps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::real;
    use crate::sphere::SpherePoint;

    fn diamond() -> Domain<f64> {
        let x0 = SpherePoint::axis(2, 0);
        Domain::diamond(
            EinTildePoint { x: x0.clone(), t: 0.0 },
            EinTildePoint { x: x0, t: 1.0 },
        )
        .unwrap()
    }

    #[test]
    fn sprinkled_relations_satisfy_the_order_axioms_and_match_the_oracle() {
        let set = sprinkle(&diamond(), 60, 17, real(1e-9)).unwrap();
        assert_eq!(set.len(), 60);
        for i in 0..set.len() {
            for j in 0..set.len() {
                if i == j {
                    continue;
                }
                let oracle = matches!(
                    causal_classify(&set.points()[i], &set.points()[j], 1e-9),
                    CausalClass::ChronologicalFuture | CausalClass::CausalNullFuture
                );
                assert_eq!(set.related(i, j), oracle);
            }
        }
    }

    #[test]
    fn single_point_has_empty_relation() {
        let set = sprinkle(&diamond(), 1, 3, real(1e-9)).unwrap();
        assert_eq!(set.len(), 1);
        assert!(set.edges().is_empty());
    }

    #[test]
    fn same_seed_reproduces_the_set() {
        let a = sprinkle(&diamond(), 30, 99, real(1e-9)).unwrap();
        let b = sprinkle(&diamond(), 30, 99, real(1e-9)).unwrap();
        for (p, q) in a.points().iter().zip(b.points()) {
            assert_eq!(p.x.coords(), q.x.coords());
            assert_eq!(p.t, q.t);
        }
        assert_eq!(a.edges(), b.edges());
    }

    #[test]
    fn thin_domain_errors() {
        let x0 = SpherePoint::<f64>::axis(2, 0);
        let d = Domain::diamond(
            EinTildePoint { x: x0.clone(), t: 0.0 },
            EinTildePoint { x: x0, t: 1e-4 },
        )
        .unwrap();
        assert!(matches!(
            sprinkle(&d, 20, 5, real(1e-9)),
            Err(Error::DomainTooThin { .. })
        ));
    }

    #[test]
    fn csv_export_lists_every_edge() {
        let set = sprinkle(&diamond(), 20, 7, real(1e-9)).unwrap();
        let csv = set.edges_csv();
        assert!(csv.starts_with("source,target\n"));
        assert_eq!(csv.lines().count(), set.edges().len() + 1);
    }
}
