//! Centres of bounded sets.
//!
//! For a non-empty bounded `A` the function `r(x) = sup_{a∈A} |ax|` has a
//! unique minimiser `Z(A)` in any uniformly convex space; `ρ(A)` is the
//! minimum. This module computes `Z(A)` for finite sets and checks the
//! quantitative facts relating centres of nested sets, annuli and isometric
//! images.

mod chebyshev;
mod mean;
mod shopping;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

pub use chebyshev::CentreSolution;
pub use mean::{MeanCentre, WeightedSet};
pub use shopping::{
    mall_compactness_demo, principal_directions, MallReport, ShoppingCentre, ShoppingConfig, ShoppingStep,
};

use crate::error::{Error, Result};
use crate::linalg::{is_orthogonal, project_onto_hull};
use crate::metric::{Point, SpaceSpec};

/// A finite non-empty subset of a [`SpaceSpec`].
#[derive(Debug, Clone)]
pub struct BoundedSet {
    space: SpaceSpec,
    points: Vec<DVector<f64>>,
}

impl BoundedSet {
    pub fn new(space: SpaceSpec, points: Vec<Point>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::input("a bounded set needs at least one point"));
        }
        for p in &points {
            space.check(p)?;
            if p.iter().any(|c| !c.is_finite()) {
                return Err(Error::input("point coordinates must be finite"));
            }
        }
        Ok(Self {
            space,
            points: points.into_iter().map(Point::into_inner).collect(),
        })
    }

    /// Convenience constructor from raw coordinate rows.
    pub fn from_rows(space: SpaceSpec, rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(space, rows.iter().cloned().map(Point::new).collect())
    }

    pub fn space(&self) -> &SpaceSpec {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        self.points.iter().cloned().map(Point)
    }

    pub(crate) fn raw(&self) -> &[DVector<f64>] {
        &self.points
    }

    /// `r(x) = max_a |ax|`.
    pub fn radius_at(&self, x: &Point) -> Result<f64> {
        self.space.check(x)?;
        Ok(chebyshev::radius(&self.space, &self.points, x))
    }

    /// The centre `Z(A)` and radius `ρ(A)`.
    pub fn chebyshev_centre(&self, tol: f64) -> Result<CentreSolution> {
        if !(tol > 0.0) {
            return Err(Error::input("tolerance must be positive"));
        }
        chebyshev::solve(&self.space, &self.points, tol)
    }

    /// Whether every point of `other` is (to 1e-12) a point of `self`.
    pub fn contains_all(&self, other: &BoundedSet) -> bool {
        other
            .points
            .iter()
            .all(|b| self.points.iter().any(|a| self.space.dist_unchecked(a, b) <= 1e-12))
    }

    fn subset(&self, keep: impl Fn(&DVector<f64>) -> bool) -> Option<BoundedSet> {
        let points: Vec<_> = self.points.iter().filter(|p| keep(p)).cloned().collect();
        (!points.is_empty()).then_some(BoundedSet {
            space: self.space,
            points,
        })
    }

    /// Distance between `Z(A)` and the centre of the annulus
    /// `D = {a ∈ A : |a Z(A)| ≥ ρ(A) - eps}`; the two centres coincide.
    pub fn annulus_centre_shift(&self, eps: f64, tol: f64) -> Result<f64> {
        let whole = self.chebyshev_centre(tol)?;
        if !(eps > 0.0 && eps < whole.rho) {
            return Err(Error::input(format!(
                "annulus width must lie in (0, ρ(A) = {}), got {eps}",
                whole.rho
            )));
        }
        let z = whole.centre.0.clone();
        let annulus = self
            .subset(|a| self.space.dist_unchecked(a, &z) >= whole.rho - eps)
            .ok_or_else(|| Error::invariant("annulus of a finite set came out empty"))?;
        let inner = annulus.chebyshev_centre(tol)?;
        Ok(self.space.dist_unchecked(&inner.centre, &z))
    }

    pub fn annulus_invariance_check(&self, eps: f64, tol: f64) -> Result<bool> {
        Ok(self.annulus_centre_shift(eps, tol)? <= tol)
    }

    /// Evaluates `|Z(A)Z(B)| ≤ ε ρ(A) + κ_ε (ρ(A) - ρ(B))` for `B ⊆ A`.
    pub fn stability_bound_check(&self, sub: &BoundedSet, eps: f64) -> Result<StabilityAudit> {
        self.require_subset(sub)?;
        let kappa = self.space.kappa(eps)?;
        let a = self.chebyshev_centre(1e-12)?;
        let b = sub.chebyshev_centre(1e-12)?;
        let lhs = self.space.dist_unchecked(&a.centre, &b.centre);
        let bound = eps * a.rho + kappa * (a.rho - b.rho);
        let slack = 1e-9 * (1.0 + a.rho);
        Ok(StabilityAudit {
            lhs,
            bound,
            holds: lhs <= bound + slack,
        })
    }

    /// Hilbert-only estimate `|Z(A)Z(B)| ≤ sqrt(ρ(A)² - ρ(B)²)` for `B ⊆ A`.
    pub fn hilbert_nested_bound(&self, sub: &BoundedSet) -> Result<StabilityAudit> {
        if !self.space.is_hilbert() {
            return Err(Error::input("the nested-centre estimate needs a Hilbert space"));
        }
        self.require_subset(sub)?;
        let a = self.chebyshev_centre(1e-12)?;
        let b = sub.chebyshev_centre(1e-12)?;
        let lhs = (&a.centre.0 - &b.centre.0).norm();
        let bound = (a.rho * a.rho - b.rho * b.rho).max(0.0).sqrt();
        // sqrt amplifies rounding near the boundary case ρ(A) = ρ(B).
        let slack = 1e-9 * (1.0 + a.rho) + (1e-12 * (1.0 + a.rho * a.rho)).sqrt();
        Ok(StabilityAudit {
            lhs,
            bound,
            holds: lhs <= bound + slack,
        })
    }

    pub fn hilbert_nested_bound_check(&self, sub: &BoundedSet) -> Result<bool> {
        self.hilbert_nested_bound(sub).map(|a| a.holds)
    }

    fn require_subset(&self, sub: &BoundedSet) -> Result<()> {
        if sub.space != self.space {
            return Err(Error::input("sets live in different spaces"));
        }
        if !self.contains_all(sub) {
            return Err(Error::input("B is not a subset of A"));
        }
        Ok(())
    }

    /// Image `uA` under `x ↦ Qx + t`.
    pub fn apply_isometry(&self, iso: &Isometry) -> Result<BoundedSet> {
        iso.validate(&self.space)?;
        Ok(BoundedSet {
            space: self.space,
            points: self.points.iter().map(|p| iso.apply(p)).collect(),
        })
    }

    /// `|Z(uA) - u Z(A)|`.
    pub fn centre_equivariance_defect(&self, iso: &Isometry, tol: f64) -> Result<f64> {
        let moved = self.apply_isometry(iso)?;
        let z = self.chebyshev_centre(tol)?;
        let zu = moved.chebyshev_centre(tol)?;
        Ok(self.space.dist_unchecked(&zu.centre, &iso.apply(&z.centre)))
    }

    pub fn centre_equivariance_check(&self, iso: &Isometry, tol: f64) -> Result<bool> {
        Ok(self.centre_equivariance_defect(iso, tol)? <= tol)
    }

    /// Euclidean distance from `x` to the convex hull of the set.
    pub fn hull_distance(&self, x: &Point) -> Result<f64> {
        self.space.check(x)?;
        Ok(project_onto_hull(&self.points, x, 1e-15)?.distance)
    }
}

/// Both sides of a centre-displacement estimate.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct StabilityAudit {
    pub lhs: f64,
    pub bound: f64,
    pub holds: bool,
}

/// An affine isometry `x ↦ Qx + t`.
#[derive(Debug, Clone)]
pub struct Isometry {
    pub matrix: DMatrix<f64>,
    pub translation: DVector<f64>,
}

impl Isometry {
    pub fn new(matrix: DMatrix<f64>, translation: DVector<f64>) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() != translation.len() {
            return Err(Error::input("isometry matrix and translation sizes disagree"));
        }
        if !is_orthogonal(&matrix, 1e-9) {
            return Err(Error::input("isometry matrix is not orthogonal"));
        }
        Ok(Self { matrix, translation })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: DMatrix::identity(dim, dim),
            translation: DVector::zeros(dim),
        }
    }

    pub fn translation(t: DVector<f64>) -> Self {
        Self {
            matrix: DMatrix::identity(t.len(), t.len()),
            translation: t,
        }
    }

    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.matrix * x + &self.translation
    }

    fn validate(&self, space: &SpaceSpec) -> Result<()> {
        if self.translation.len() != space.dim {
            return Err(Error::Dimension {
                expected: space.dim,
                got: self.translation.len(),
            });
        }
        if !space.is_hilbert() && !is_signed_permutation(&self.matrix) {
            return Err(Error::input(
                "only signed permutations are linear isometries of an lp norm",
            ));
        }
        Ok(())
    }
}

fn is_signed_permutation(m: &DMatrix<f64>) -> bool {
    m.row_iter().all(|row| {
        let nonzero: Vec<f64> = row.iter().copied().filter(|v| *v != 0.0).collect();
        nonzero.len() == 1 && nonzero[0].abs() == 1.0
    }) && is_orthogonal(m, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn h(dim: usize) -> SpaceSpec {
        SpaceSpec::hilbert(dim).unwrap()
    }

    fn set(space: SpaceSpec, rows: &[&[f64]]) -> BoundedSet {
        BoundedSet::from_rows(space, &rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn radius_examples() {
        let a = set(h(1), &[&[0.0], &[2.0]]);
        assert_eq!(a.radius_at(&Point::new(vec![1.0])).unwrap(), 1.0);
        let single = set(h(2), &[&[0.3, 0.4]]);
        assert_eq!(single.radius_at(&Point::new(vec![0.3, 0.4])).unwrap(), 0.0);
        let tri = set(h(2), &[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]);
        assert_eq!(tri.radius_at(&Point::new(vec![0.0, 0.0])).unwrap(), 1.0);
        assert!(tri.radius_at(&Point::new(vec![0.0])).is_err());
    }

    #[test]
    fn empty_set_rejected() {
        assert!(BoundedSet::new(h(2), vec![]).is_err());
        assert!(BoundedSet::new(h(2), vec![Point::new(vec![1.0])]).is_err());
    }

    #[test]
    fn centre_examples() {
        let pair = set(h(2), &[&[0.0, 0.0], &[2.0, 0.0]]);
        let s = pair.chebyshev_centre(1e-9).unwrap();
        assert_eq!(s.centre.to_vec(), vec![1.0, 0.0]);
        assert_eq!(s.rho, 1.0);

        let hgt = 3f64.sqrt() / 2.0;
        let tri = set(h(2), &[&[0.0, 0.0], &[1.0, 0.0], &[0.5, hgt]]);
        let s = tri.chebyshev_centre(1e-9).unwrap();
        assert_abs_diff_eq!(s.rho, 1.0 / 3f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(s.centre[0], 0.5, epsilon = 1e-12);

        let interval = set(h(1), &[&[-1.0], &[1.0], &[3.0]]);
        let s = interval.chebyshev_centre(1e-9).unwrap();
        assert_eq!(s.centre.to_vec(), vec![1.0]);
        assert_eq!(s.rho, 2.0);
    }

    #[test]
    fn annulus_examples() {
        let square = set(h(2), &[&[1.0, 1.0], &[-1.0, 1.0], &[-1.0, -1.0], &[1.0, -1.0]]);
        assert!(square.annulus_invariance_check(0.5, 1e-9).unwrap());
        let a = set(h(2), &[&[1.0, 0.0], &[-1.0, 0.0], &[0.0, 0.1]]);
        assert!(a.annulus_invariance_check(0.05, 1e-12).unwrap());
        assert!(a.annulus_invariance_check(0.0, 1e-9).is_err());
        assert!(a.annulus_invariance_check(5.0, 1e-9).is_err());
    }

    #[test]
    fn stability_examples() {
        let a = set(h(1), &[&[-1.0], &[1.0]]);
        let same = a.stability_bound_check(&a, 0.5).unwrap();
        assert_eq!(same.lhs, 0.0);
        assert_abs_diff_eq!(same.bound, 0.5);
        assert!(same.holds);

        let b = set(h(1), &[&[1.0]]);
        let audit = a.stability_bound_check(&b, 0.5).unwrap();
        assert_eq!(audit.lhs, 1.0);
        // κ_{1/2} = 24 in Hilbert space, so the bound is 0.5 + 24.
        assert_abs_diff_eq!(audit.bound, 24.5, epsilon = 1e-9);
        assert!(audit.holds);

        let outside = set(h(1), &[&[7.0]]);
        assert!(matches!(a.stability_bound_check(&outside, 0.5), Err(Error::Input(_))));
    }

    #[test]
    fn hilbert_nested_examples() {
        let a = set(h(1), &[&[-1.0], &[1.0]]);
        let b = set(h(1), &[&[1.0]]);
        let audit = a.hilbert_nested_bound(&b).unwrap();
        assert_eq!(audit.lhs, 1.0);
        assert_eq!(audit.bound, 1.0);
        assert!(audit.holds);
        assert!(a.hilbert_nested_bound_check(&a).unwrap());
        let lp = SpaceSpec::lp(3.0, 1).unwrap();
        let a3 = set(lp, &[&[-1.0], &[1.0]]);
        assert!(a3.hilbert_nested_bound_check(&a3).is_err());
    }

    #[test]
    fn equivariance_examples() {
        let a = set(h(2), &[&[0.0, 0.0], &[1.0, 3.0], &[2.0, -1.0]]);
        assert!(a.centre_equivariance_check(&Isometry::identity(2), 1e-12).unwrap());
        let pair = set(h(2), &[&[0.0, 0.0], &[2.0, 0.0]]);
        let shift = Isometry::translation(DVector::from_row_slice(&[3.0, -4.0]));
        assert!(pair.centre_equivariance_check(&shift, 1e-12).unwrap());
        let skew = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]);
        assert!(Isometry::new(skew, DVector::zeros(2)).is_err());
    }

    #[test]
    fn lp_rejects_rotations() {
        let lp = SpaceSpec::lp(3.0, 2).unwrap();
        let a = set(lp, &[&[0.0, 0.0], &[1.0, 0.0]]);
        let c = std::f64::consts::FRAC_1_SQRT_2;
        let rot = Isometry::new(DMatrix::from_row_slice(2, 2, &[c, -c, c, c]), DVector::zeros(2)).unwrap();
        assert!(a.apply_isometry(&rot).is_err());
        let swap = Isometry::new(
            DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]),
            DVector::from_row_slice(&[0.5, 2.0]),
        )
        .unwrap();
        assert!(a.centre_equivariance_defect(&swap, 1e-10).unwrap() < 1e-5);
    }

    #[test]
    fn hull_contains_centre() {
        let a = set(
            h(3),
            &[&[0.0, 0.0, 0.0], &[4.0, 0.0, 0.0], &[0.0, 3.0, 0.0], &[1.0, 1.0, 2.0]],
        );
        let z = a.chebyshev_centre(1e-9).unwrap();
        assert!(a.hull_distance(&z.centre).unwrap() < 1e-9);
        assert!(a.hull_distance(&Point::new(vec![-1.0, 0.0, 0.0])).unwrap() > 0.99);
    }
}
