//! Mean centre of a finitely supported measure.
//!
//! The measure is refined along a deterministic partition schedule: each cell
//! is split at the median of the coordinate with the largest spread. At level
//! `k` the estimate is `Σ μ(A_i) Z(A_i) / μ(C)` over the cells `A_i` of the
//! level-`k` partition.

use nalgebra::DVector;
use serde::Serialize;

use super::chebyshev;
use crate::config::DEFAULT_TOL;
use crate::error::{Error, Result};
use crate::metric::{Point, SpaceSpec};

/// A finite list of weighted atoms with positive total weight.
#[derive(Debug, Clone)]
pub struct WeightedSet {
    space: SpaceSpec,
    atoms: Vec<DVector<f64>>,
    weights: Vec<f64>,
}

/// Result of [`WeightedSet::mean_centre`].
#[derive(Debug, Clone, Serialize)]
pub struct MeanCentre {
    pub centre: Point,
    /// Number of refinement levels actually applied.
    pub levels: usize,
    /// Number of cells of the final partition carrying the estimate.
    pub cells: usize,
    /// Whether every cell of the final partition is a single location.
    pub fully_refined: bool,
}

impl WeightedSet {
    pub fn new(space: SpaceSpec, atoms: Vec<(Point, f64)>) -> Result<Self> {
        let mut points = Vec::with_capacity(atoms.len());
        let mut weights = Vec::with_capacity(atoms.len());
        for (p, w) in atoms {
            space.check(&p)?;
            if !(w >= 0.0 && w.is_finite()) {
                return Err(Error::input(format!("atom weights must be finite and >= 0, got {w}")));
            }
            points.push(p.into_inner());
            weights.push(w);
        }
        if !(weights.iter().sum::<f64>() > 0.0) {
            return Err(Error::input("total weight must be positive"));
        }
        Ok(Self {
            space,
            atoms: points,
            weights,
        })
    }

    pub fn space(&self) -> &SpaceSpec {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// The restriction `μ_{|A}` to the atoms with the given indices.
    pub fn restrict(&self, indices: &[usize]) -> Result<WeightedSet> {
        let atoms = indices
            .iter()
            .map(|&i| {
                self.atoms
                    .get(i)
                    .map(|a| (Point(a.clone()), self.weights[i]))
                    .ok_or_else(|| Error::input(format!("atom index {i} out of range")))
            })
            .collect::<Result<Vec<_>>>()?;
        WeightedSet::new(self.space, atoms)
    }

    /// Image of the measure under `x ↦ f(x)`.
    pub fn push_forward(&self, f: impl Fn(&DVector<f64>) -> DVector<f64>) -> Result<WeightedSet> {
        let atoms = self
            .atoms
            .iter()
            .zip(&self.weights)
            .map(|(a, &w)| (Point(f(a)), w))
            .collect();
        WeightedSet::new(self.space, atoms)
    }

    /// `Σ w_i x_i / Σ w_i`.
    pub fn barycentre(&self) -> Point {
        let total = self.total_weight();
        let sum = self
            .atoms
            .iter()
            .zip(&self.weights)
            .fold(DVector::zeros(self.space.dim), |acc, (a, w)| acc + a * *w);
        Point(sum / total)
    }

    /// Mean centre after `depth` refinement levels. Depth 0 is the plain
    /// centre `Z(C)` of the support list; enough levels reach the weighted
    /// barycentre.
    pub fn mean_centre(&self, depth: usize) -> Result<MeanCentre> {
        let mut cells: Vec<Vec<usize>> = vec![(0..self.atoms.len()).collect()];
        let mut levels = 0;
        for _ in 0..depth {
            let mut next = Vec::with_capacity(cells.len() * 2);
            let mut split_any = false;
            for cell in cells {
                match self.split(&cell) {
                    Some((left, right)) => {
                        split_any = true;
                        next.push(left);
                        next.push(right);
                    }
                    None => next.push(cell),
                }
            }
            cells = next;
            if !split_any {
                break;
            }
            levels += 1;
        }

        let total = self.total_weight();
        let mut centre = DVector::zeros(self.space.dim);
        let mut fully_refined = true;
        for cell in &cells {
            let mass: f64 = cell.iter().map(|&i| self.weights[i]).sum();
            if self.spread(cell).1 > 0.0 {
                fully_refined = false;
            }
            if mass == 0.0 {
                continue;
            }
            let pts: Vec<DVector<f64>> = cell.iter().map(|&i| self.atoms[i].clone()).collect();
            let z = chebyshev::solve(&self.space, &pts, DEFAULT_TOL)?;
            centre.axpy(mass / total, &z.centre, 1.0);
        }
        Ok(MeanCentre {
            centre: Point(centre),
            levels,
            cells: cells.len(),
            fully_refined,
        })
    }

    /// Coordinate of largest spread within a cell and that spread.
    fn spread(&self, cell: &[usize]) -> (usize, f64) {
        (0..self.space.dim)
            .map(|k| {
                let (lo, hi) = cell.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| {
                    let c = self.atoms[i][k];
                    (lo.min(c), hi.max(c))
                });
                (k, hi - lo)
            })
            .fold((0, 0.0), |best, cur| if cur.1 > best.1 { cur } else { best })
    }

    fn split(&self, cell: &[usize]) -> Option<(Vec<usize>, Vec<usize>)> {
        let (axis, width) = self.spread(cell);
        if width == 0.0 {
            return None;
        }
        let mut sorted = cell.to_vec();
        sorted.sort_by(|&a, &b| self.atoms[a][axis].total_cmp(&self.atoms[b][axis]).then(a.cmp(&b)));
        // Cut between distinct coordinate values closest to the median so that
        // coincident atoms stay together.
        let n = sorted.len();
        let value = |i: usize| self.atoms[sorted[i]][axis];
        let cut = (1..n)
            .filter(|&i| value(i) > value(i - 1))
            .min_by_key(|&i| i.abs_diff(n / 2))?;
        let right = sorted.split_off(cut);
        Some((sorted, right))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn hilbert(dim: usize) -> SpaceSpec {
        SpaceSpec::hilbert(dim).unwrap()
    }

    #[test]
    fn depth_zero_is_plain_centre() {
        let mu = WeightedSet::new(
            hilbert(1),
            vec![
                (Point::new(vec![0.0]), 5.0),
                (Point::new(vec![1.0]), 1.0),
                (Point::new(vec![4.0]), 1.0),
            ],
        )
        .unwrap();
        let m = mu.mean_centre(0).unwrap();
        assert_eq!(m.centre.to_vec(), vec![2.0]);
        assert_eq!(m.levels, 0);
        assert!(!m.fully_refined);
    }

    #[test]
    fn full_refinement_is_barycentre() {
        let mu = WeightedSet::new(
            hilbert(2),
            vec![
                (Point::new(vec![0.0, 0.0]), 1.0),
                (Point::new(vec![2.0, 0.0]), 3.0),
                (Point::new(vec![0.0, 4.0]), 0.0),
                (Point::new(vec![1.0, 1.0]), 2.0),
            ],
        )
        .unwrap();
        let m = mu.mean_centre(10).unwrap();
        assert!(m.fully_refined);
        assert_abs_diff_eq!(m.centre[0], (6.0 + 2.0) / 6.0, epsilon = 1e-14);
        assert_abs_diff_eq!(m.centre[1], 2.0 / 6.0, epsilon = 1e-14);
    }

    #[test]
    fn two_equal_atoms_give_midpoint() {
        let mu = WeightedSet::new(
            hilbert(2),
            vec![(Point::new(vec![1.0, 2.0]), 0.5), (Point::new(vec![3.0, -2.0]), 0.5)],
        )
        .unwrap();
        let m = mu.mean_centre(1).unwrap();
        assert_eq!(m.centre.to_vec(), vec![2.0, 0.0]);
    }

    #[test]
    fn coincident_atoms_stay_together() {
        let mu = WeightedSet::new(
            hilbert(1),
            vec![
                (Point::new(vec![1.0]), 1.0),
                (Point::new(vec![1.0]), 1.0),
                (Point::new(vec![1.0]), 1.0),
                (Point::new(vec![5.0]), 1.0),
            ],
        )
        .unwrap();
        let m = mu.mean_centre(1).unwrap();
        assert!(m.fully_refined);
        assert_eq!(m.cells, 2);
        assert_abs_diff_eq!(m.centre[0], 2.0, epsilon = 1e-15);
    }

    #[test]
    fn zero_weight_rejected() {
        let err = WeightedSet::new(hilbert(1), vec![(Point::new(vec![1.0]), 0.0)]).unwrap_err();
        assert!(matches!(err, Error::Input(_)));
        assert!(WeightedSet::new(hilbert(1), vec![(Point::new(vec![1.0]), -1.0)]).is_err());
    }
}
