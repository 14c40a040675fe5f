//! Small dense linear-algebra helpers shared by several modules.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Result of projecting a point onto the convex hull of a finite set.
#[derive(Debug, Clone)]
pub struct HullProjection {
    /// Nearest point of the hull.
    pub point: DVector<f64>,
    /// Convex coefficients, one per input point (non-negative, sum 1).
    pub weights: Vec<f64>,
    /// Euclidean distance from the query to the hull.
    pub distance: f64,
}

/// Euclidean projection of `target` onto `conv(points)`.
///
/// Wolfe's minimum-norm-point algorithm applied to the translated set
/// `points - target`. Terminates after finitely many major cycles; `tol` is
/// relative to the squared diameter of the translated set.
pub fn project_onto_hull(points: &[DVector<f64>], target: &DVector<f64>, tol: f64) -> Result<HullProjection> {
    if points.is_empty() {
        return Err(Error::input("cannot project onto the hull of an empty set"));
    }
    let q: Vec<DVector<f64>> = points.iter().map(|p| p - target).collect();
    let scale = q.iter().map(|v| v.norm_squared()).fold(0.0f64, f64::max);
    if scale == 0.0 {
        let mut weights = vec![0.0; q.len()];
        weights[0] = 1.0;
        return Ok(HullProjection {
            point: target.clone(),
            weights,
            distance: 0.0,
        });
    }

    let start = (0..q.len())
        .min_by(|&a, &b| q[a].norm_squared().total_cmp(&q[b].norm_squared()))
        .unwrap();
    let mut active: Vec<usize> = vec![start];
    let mut lambda: Vec<f64> = vec![1.0];
    let mut x = q[start].clone();

    let max_major = 50 * q.len() + 100;
    for _ in 0..max_major {
        // Major cycle: most violating vertex.
        let (j, best) = q
            .iter()
            .enumerate()
            .map(|(i, v)| (i, x.dot(v)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        let xx = x.norm_squared();
        if xx - best <= tol * scale || xx <= tol * tol * scale {
            break;
        }
        if active.contains(&j) {
            // Numerically stalled on the current face.
            break;
        }
        active.push(j);
        lambda.push(0.0);

        // Minor cycles.
        loop {
            let alpha = affine_min_norm(&q, &active)?;
            if alpha.iter().all(|&a| a > 1e-14) {
                lambda = alpha;
                x = combine(&q, &active, &lambda);
                break;
            }
            let mut theta = 1.0f64;
            for (l, a) in lambda.iter().zip(alpha.iter()) {
                if *a <= 1e-14 {
                    let denom = l - a;
                    if denom > 0.0 {
                        theta = theta.min(l / denom);
                    }
                }
            }
            for (l, a) in lambda.iter_mut().zip(alpha.iter()) {
                *l += theta * (a - *l);
            }
            let mut keep_active = Vec::with_capacity(active.len());
            let mut keep_lambda = Vec::with_capacity(active.len());
            for (&i, &l) in active.iter().zip(lambda.iter()) {
                if l > 1e-14 {
                    keep_active.push(i);
                    keep_lambda.push(l);
                }
            }
            if keep_active.is_empty() {
                return Err(Error::Numerical("hull projection lost its support".into()));
            }
            let total: f64 = keep_lambda.iter().sum();
            keep_lambda.iter_mut().for_each(|l| *l /= total);
            active = keep_active;
            lambda = keep_lambda;
        }
    }

    let mut weights = vec![0.0; q.len()];
    for (&i, &l) in active.iter().zip(lambda.iter()) {
        weights[i] = l;
    }
    Ok(HullProjection {
        distance: x.norm(),
        point: x + target,
        weights,
    })
}

fn combine(q: &[DVector<f64>], active: &[usize], lambda: &[f64]) -> DVector<f64> {
    let mut x = DVector::zeros(q[0].len());
    for (&i, &l) in active.iter().zip(lambda.iter()) {
        x.axpy(l, &q[i], 1.0);
    }
    x
}

/// Affine minimum-norm point of `{q_i : i ∈ active}`: solves
/// `min ‖Σ α_i q_i‖²` subject to `Σ α_i = 1`.
fn affine_min_norm(q: &[DVector<f64>], active: &[usize]) -> Result<Vec<f64>> {
    let k = active.len();
    let mut system = DMatrix::<f64>::zeros(k + 1, k + 1);
    for a in 0..k {
        for b in 0..=a {
            let g = q[active[a]].dot(&q[active[b]]);
            system[(a, b)] = g;
            system[(b, a)] = g;
        }
        system[(a, k)] = 1.0;
        system[(k, a)] = 1.0;
    }
    let mut rhs = DVector::<f64>::zeros(k + 1);
    rhs[k] = 1.0;
    let solution = match system.clone().lu().solve(&rhs) {
        Some(s) if s.iter().all(|v| v.is_finite()) => s,
        _ => system
            .svd(true, true)
            .solve(&rhs, 1e-13)
            .map_err(|e| Error::Numerical(e.to_string()))?,
    };
    Ok(solution.iter().take(k).copied().collect())
}

/// Whether the columns of `m` are orthonormal to within `tol`.
pub fn is_orthogonal(m: &DMatrix<f64>, tol: f64) -> bool {
    if !m.is_square() {
        return false;
    }
    let defect = m.transpose() * m - DMatrix::<f64>::identity(m.nrows(), m.ncols());
    defect.amax() <= tol
}

/// Whether `vs` is an orthonormal family to within `tol`.
pub fn is_orthonormal(vs: &[DVector<f64>], tol: f64) -> bool {
    for (i, a) in vs.iter().enumerate() {
        for (j, b) in vs.iter().enumerate().take(i + 1) {
            let want = if i == j { 1.0 } else { 0.0 };
            if (a.dot(b) - want).abs() > tol {
                return false;
            }
        }
    }
    true
}

/// Orthogonal projection of `v` onto the complement of `span(basis)`, for an
/// orthonormal `basis`.
pub fn project_out(v: &DVector<f64>, basis: &[DVector<f64>]) -> DVector<f64> {
    let mut out = v.clone();
    for b in basis {
        let c = b.dot(&out);
        out.axpy(-c, b, 1.0);
    }
    out
}

/// Least-squares solve of `a x = b` by SVD. Returns the solution and the
/// Euclidean residual norm.
pub fn least_squares(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<(DVector<f64>, f64)> {
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let x = svd
        .solve(b, 1e-12 * smax.max(1.0))
        .map_err(|e| Error::Numerical(e.to_string()))?;
    let residual = (a * &x - b).norm();
    Ok((x, residual))
}
