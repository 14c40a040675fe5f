//! Shopping centres in Hilbert space at truncated scale.
//!
//! `s_V(Λ) = ρ(p_{V⊥}Λ)` measures the spread of `Λ` once the directions of a
//! finite-dimensional `V` are ignored. In finite ambient dimension the true
//! infimum over all `V` is zero, so `V` is capped by a budget and grown
//! greedily along principal directions; `ŝ` denotes the resulting value.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::{chebyshev, BoundedSet};
use crate::eigen;
use crate::error::{Error, Result};
use crate::linalg::{is_orthonormal, project_onto_hull, project_out};
use crate::metric::{Point, SpaceSpec};

const HULL_TOL: f64 = 1e-7;

/// Subspace budget and `ε` schedule for [`shopping_centre`].
#[derive(Debug, Clone, Serialize)]
pub struct ShoppingConfig {
    pub subspace_budget: usize,
    pub eps_schedule: Vec<f64>,
    pub tol: f64,
}

impl ShoppingConfig {
    /// Budget `b` with the halving schedule `eps0, eps0/2, …` of length `b+1`.
    pub fn halving(subspace_budget: usize, eps0: f64, tol: f64) -> Self {
        Self {
            subspace_budget,
            eps_schedule: (0..=subspace_budget).map(|k| eps0 / 2f64.powi(k as i32)).collect(),
            tol,
        }
    }

    fn validate(&self, dim: usize) -> Result<()> {
        if self.subspace_budget >= dim {
            return Err(Error::input(format!(
                "subspace budget {} must be below the ambient dimension {dim}",
                self.subspace_budget
            )));
        }
        if self.eps_schedule.len() < self.subspace_budget + 1 {
            return Err(Error::input(format!(
                "eps schedule needs {} entries, got {}",
                self.subspace_budget + 1,
                self.eps_schedule.len()
            )));
        }
        if self.eps_schedule.iter().any(|e| !(*e > 0.0)) {
            return Err(Error::input("eps schedule entries must be positive"));
        }
        if self.eps_schedule.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::input("eps schedule must be non-increasing"));
        }
        if !(self.tol > 0.0) {
            return Err(Error::input("tolerance must be positive"));
        }
        Ok(())
    }
}

/// One growth step of the subspace search.
#[derive(Debug, Clone, Serialize)]
pub struct ShoppingStep {
    pub dim_v: usize,
    pub eps: f64,
    pub s_v: f64,
}

/// A shopping centre representative with its diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct ShoppingCentre {
    pub centre: Point,
    pub s_estimate: f64,
    pub eps: f64,
    /// Orthonormal basis of the final `V`.
    pub basis: Vec<Vec<f64>>,
    pub steps: Vec<ShoppingStep>,
    /// Distance from the centre to the hull of
    /// `{v ∈ Λ : |p_{V⊥}(v - z)| ≥ ŝ - ε}`.
    pub hull_distance: f64,
}

fn require_hilbert(space: &SpaceSpec) -> Result<()> {
    if space.is_hilbert() {
        Ok(())
    } else {
        Err(Error::input("shopping centres are only defined in Hilbert space"))
    }
}

fn projected(points: &[DVector<f64>], basis: &[DVector<f64>]) -> Vec<DVector<f64>> {
    points.iter().map(|p| project_out(p, basis)).collect()
}

impl BoundedSet {
    /// `s_V(Λ)` for `V` spanned by the orthonormal family `basis`.
    pub fn s_values(&self, basis: &[Point]) -> Result<f64> {
        require_hilbert(self.space())?;
        for b in basis {
            self.space().check(b)?;
        }
        let basis: Vec<DVector<f64>> = basis.iter().map(|b| b.0.clone()).collect();
        if !is_orthonormal(&basis, 1e-9) {
            return Err(Error::input("V must be given by an orthonormal family"));
        }
        Ok(chebyshev::solve(self.space(), &projected(self.raw(), &basis), 1e-12)?.rho)
    }

    /// A shopping centre representative for the final `(V, ε)` of the
    /// schedule, built as in the existence argument: take `x = Z(p_{V⊥}Λ)`,
    /// write `x` as a convex combination of the far projected points, and lift
    /// the same combination back to `Λ`.
    pub fn shopping_centre(&self, cfg: &ShoppingConfig) -> Result<ShoppingCentre> {
        require_hilbert(self.space())?;
        cfg.validate(self.space().dim)?;
        let points = self.raw();

        let mut basis: Vec<DVector<f64>> = Vec::new();
        let mut steps = vec![ShoppingStep {
            dim_v: 0,
            eps: cfg.eps_schedule[0],
            s_v: chebyshev::solve(self.space(), points, 1e-12)?.rho,
        }];
        for k in 1..=cfg.subspace_budget {
            match principal_direction(&projected(points, &basis)) {
                Some(d) => basis.push(d),
                None => break,
            }
            let s_v = chebyshev::solve(self.space(), &projected(points, &basis), 1e-12)?.rho;
            steps.push(ShoppingStep {
                dim_v: basis.len(),
                eps: cfg.eps_schedule[k],
                s_v,
            });
        }

        let last = steps.last().unwrap();
        let (s_hat, eps) = (last.s_v, last.eps);
        if steps.len() >= 2 {
            let before = steps[steps.len() - 2].s_v;
            if before - s_hat > eps && s_hat > cfg.tol {
                return Err(Error::Convergence {
                    iterations: steps.len() - 1,
                    best_value: s_hat,
                    best_point: vec![],
                    reason: format!("s_V still dropping at the budget ({before:.6} -> {s_hat:.6}, eps {eps:.3e})"),
                });
            }
        }

        let proj = projected(points, &basis);
        let x = chebyshev::solve(self.space(), &proj, 1e-12)?.centre.into_inner();
        let far: Vec<usize> = (0..proj.len())
            .filter(|&i| (&proj[i] - &x).norm() >= s_hat - eps / 2.0)
            .collect();
        let far_proj: Vec<DVector<f64>> = far.iter().map(|&i| proj[i].clone()).collect();
        let combo = project_onto_hull(&far_proj, &x, 1e-15)?;
        if combo.distance >= eps / 2.0 {
            return Err(Error::invariant(format!(
                "projected centre is {:.3e} from the far hull",
                combo.distance
            )));
        }
        let centre = far
            .iter()
            .zip(&combo.weights)
            .fold(DVector::zeros(self.space().dim), |acc, (&i, w)| acc + &points[i] * *w);

        let pz = project_out(&centre, &basis);
        let members: Vec<DVector<f64>> = points
            .iter()
            .zip(&proj)
            .filter(|(_, pv)| (*pv - &pz).norm() >= s_hat - eps)
            .map(|(v, _)| v.clone())
            .collect();
        let hull_distance = project_onto_hull(&members, &centre, 1e-15)?.distance;
        if hull_distance > HULL_TOL.max(cfg.tol) {
            return Err(Error::invariant(format!(
                "shopping centre candidate is {hull_distance:.3e} from its defining hull"
            )));
        }
        Ok(ShoppingCentre {
            centre: Point(centre),
            s_estimate: s_hat,
            eps,
            basis: basis.iter().map(|b| b.iter().copied().collect()).collect(),
            steps,
            hull_distance,
        })
    }
}

/// Leading eigenvector of the covariance of `points`, or `None` when the set
/// is a single location.
fn principal_direction(points: &[DVector<f64>]) -> Option<DVector<f64>> {
    let n = points.len() as f64;
    let dim = points[0].len();
    let mean = points.iter().fold(DVector::zeros(dim), |acc, p| acc + p) / n;
    let mut cov = DMatrix::<f64>::zeros(dim, dim);
    for p in points {
        let c = p - &mean;
        cov.ger(1.0 / n, &c, &c, 1.0);
    }
    let eig = eigen::eigen(&cov).ok()?;
    let top = *eig.values.last()?;
    if top <= 1e-14 * (1.0 + cov.amax()) {
        return None;
    }
    let v = eig.vectors?.column(dim - 1).into_owned();
    Some(v.normalize())
}

/// Up to `k` orthonormal directions chosen greedily: each is the principal
/// direction of the set after projecting out the previous ones.
pub fn principal_directions(set: &BoundedSet, k: usize) -> Vec<Point> {
    let mut basis: Vec<DVector<f64>> = Vec::new();
    while basis.len() < k {
        match principal_direction(&projected(set.raw(), &basis)) {
            Some(d) => basis.push(d),
            None => break,
        }
    }
    basis.into_iter().map(Point).collect()
}

/// Comparison of plain centres and shopping centres on the images `g_nΛ` of
/// `Λ = {±v_i} ∪ {±10v_1 + v_2}` under the swaps `g_n : v_2 ↔ v_n`.
#[derive(Debug, Clone, Serialize)]
pub struct MallReport {
    pub dim: usize,
    pub budget: usize,
    /// `|Z(g_nΛ) - v_n|` for `n = 2..=dim`.
    pub centre_offsets: Vec<f64>,
    pub min_pairwise: f64,
    pub max_pairwise: f64,
    /// `|z_n|` for the shopping centre `z_n` of `g_nΛ`.
    pub shopping_norms: Vec<f64>,
    pub s_estimates: Vec<f64>,
    /// Below dimension 10 the complement of `V` is too small for the
    /// comparison to mean much.
    pub degenerate: bool,
}

pub fn example_set(dim: usize) -> Result<BoundedSet> {
    if dim < 3 {
        return Err(Error::input("the example needs ambient dimension at least 3"));
    }
    let mut rows = Vec::with_capacity(2 * dim + 2);
    for i in 0..dim {
        for sign in [1.0, -1.0] {
            let mut r = vec![0.0; dim];
            r[i] = sign;
            rows.push(r);
        }
    }
    for sign in [1.0, -1.0] {
        let mut r = vec![0.0; dim];
        r[0] = 10.0 * sign;
        r[1] = 1.0;
        rows.push(r);
    }
    BoundedSet::from_rows(SpaceSpec::hilbert(dim)?, &rows)
}

pub fn mall_compactness_demo(dim: usize) -> Result<MallReport> {
    let base = example_set(dim)?;
    let budget = 2;
    let cfg = ShoppingConfig::halving(budget, 0.2, 1e-9);
    let mut centres = Vec::new();
    let mut centre_offsets = Vec::new();
    let mut shopping_norms = Vec::new();
    let mut s_estimates = Vec::new();
    for n in 1..dim {
        let swapped: Vec<Vec<f64>> = base
            .raw()
            .iter()
            .map(|p| {
                let mut q: Vec<f64> = p.iter().copied().collect();
                q.swap(1, n);
                q
            })
            .collect();
        let image = BoundedSet::from_rows(*base.space(), &swapped)?;
        let z = image.chebyshev_centre(1e-12)?;
        let mut vn = DVector::zeros(dim);
        vn[n] = 1.0;
        centre_offsets.push((&z.centre.0 - &vn).norm());
        centres.push(z.centre.0);
        let shop = image.shopping_centre(&cfg)?;
        shopping_norms.push(shop.centre.norm());
        s_estimates.push(shop.s_estimate);
    }
    let mut min_pairwise = f64::INFINITY;
    let mut max_pairwise: f64 = 0.0;
    for i in 0..centres.len() {
        for j in 0..i {
            let d = (&centres[i] - &centres[j]).norm();
            min_pairwise = min_pairwise.min(d);
            max_pairwise = max_pairwise.max(d);
        }
    }
    Ok(MallReport {
        dim,
        budget,
        centre_offsets,
        min_pairwise,
        max_pairwise,
        shopping_norms,
        s_estimates,
        degenerate: dim < 10,
    })
}
