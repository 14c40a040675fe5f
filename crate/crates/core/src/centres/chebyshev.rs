//! Chebyshev centre solvers.
//!
//! In Hilbert space the centre is computed combinatorially with Gärtner's
//! move-to-front pivoting algorithm, which returns the centre of the smallest
//! enclosing ball up to rounding. Other `ℓ^p` norms minimise `t` subject to
//! `|x - a|_p^p <= t` by a log-barrier Newton method, which falls back to
//! subgradient descent on `r(x) = max_a |ax|` if the Newton systems break down.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::project_onto_hull;
use crate::metric::{Point, SpaceSpec};

/// Output of a centre computation.
#[derive(Debug, Clone)]
pub struct CentreSolution {
    pub centre: Point,
    /// `r(centre)`, the radius achieved.
    pub rho: f64,
    pub iterations: usize,
    /// Certified optimality gap: `r(z)` minus a dual lower bound on `ρ`. The
    /// subgradient fallback reports its last-window decrease of `r` instead.
    pub residual: f64,
    /// Indices of the points on the boundary sphere (Hilbert only).
    pub support: Vec<usize>,
}

pub(crate) const SUBGRADIENT_ITER_CAP: usize = 100_000;
const STALL_WINDOW: usize = 50;

pub(crate) fn solve(space: &SpaceSpec, points: &[DVector<f64>], tol: f64) -> Result<CentreSolution> {
    if space.is_hilbert() {
        Ok(miniball(points))
    } else {
        match barrier(space, points, tol) {
            Some(sol) => Ok(sol),
            None => subgradient(space, points, tol),
        }
    }
}

pub(crate) fn radius(space: &SpaceSpec, points: &[DVector<f64>], x: &DVector<f64>) -> f64 {
    points.iter().map(|a| space.dist_unchecked(a, x)).fold(0.0, f64::max)
}

const NIL: usize = usize::MAX;

/// Gärtner's pivoting smallest-enclosing-ball algorithm.
struct Miniball<'a> {
    pts: &'a [DVector<f64>],
    dim: usize,
    // Doubly linked list of point indices, mutated by move-to-front.
    next: Vec<usize>,
    prev: Vec<usize>,
    head: usize,
    support_end: usize,
    // Incremental basis of forced boundary points.
    m: usize,
    s: usize,
    q0: DVector<f64>,
    z: Vec<f64>,
    f: Vec<f64>,
    v: Vec<DVector<f64>>,
    c: Vec<DVector<f64>>,
    sqr_r: Vec<f64>,
    current_c: DVector<f64>,
    current_sqr_r: f64,
    pushes: usize,
}

impl<'a> Miniball<'a> {
    fn new(pts: &'a [DVector<f64>]) -> Self {
        let n = pts.len();
        let dim = pts[0].len();
        let next = (0..n).map(|i| if i + 1 < n { i + 1 } else { NIL }).collect();
        let prev = (0..n).map(|i| if i == 0 { NIL } else { i - 1 }).collect();
        Self {
            pts,
            dim,
            next,
            prev,
            head: 0,
            support_end: 0,
            m: 0,
            s: 0,
            q0: DVector::zeros(dim),
            z: vec![0.0; dim + 2],
            f: vec![0.0; dim + 2],
            v: vec![DVector::zeros(dim); dim + 2],
            c: vec![DVector::zeros(dim); dim + 2],
            sqr_r: vec![0.0; dim + 2],
            current_c: DVector::zeros(dim),
            current_sqr_r: -1.0,
            pushes: 0,
        }
    }

    fn excess(&self, i: usize) -> f64 {
        (&self.pts[i] - &self.current_c).norm_squared() - self.current_sqr_r
    }

    fn push(&mut self, i: usize) -> bool {
        self.pushes += 1;
        let p = &self.pts[i];
        let m = self.m;
        if m == 0 {
            self.q0 = p.clone();
            self.c[0] = p.clone();
            self.sqr_r[0] = 0.0;
        } else {
            let mut vm = p - &self.q0;
            let coeffs: Vec<f64> = (1..m).map(|k| 2.0 / self.z[k] * self.v[k].dot(&vm)).collect();
            for (k, a) in (1..m).zip(coeffs) {
                vm.axpy(-a, &self.v[k], 1.0);
            }
            let zm = 2.0 * vm.norm_squared();
            if zm < 1e-26 * self.current_sqr_r.max(f64::MIN_POSITIVE) {
                return false;
            }
            let e = (p - &self.c[m - 1]).norm_squared() - self.sqr_r[m - 1];
            let fm = e / zm;
            self.c[m] = &self.c[m - 1] + &vm * fm;
            self.sqr_r[m] = self.sqr_r[m - 1] + e * fm / 2.0;
            self.z[m] = zm;
            self.f[m] = fm;
            self.v[m] = vm;
        }
        self.current_c = self.c[m].clone();
        self.current_sqr_r = self.sqr_r[m];
        self.m += 1;
        self.s = self.m;
        true
    }

    fn pop(&mut self) {
        self.m -= 1;
    }

    fn move_to_front(&mut self, j: usize) {
        if self.support_end == j {
            self.support_end = self.next[j];
        }
        if self.head == j {
            return;
        }
        let (p, n) = (self.prev[j], self.next[j]);
        if p != NIL {
            self.next[p] = n;
        }
        if n != NIL {
            self.prev[n] = p;
        }
        self.prev[j] = NIL;
        self.next[j] = self.head;
        self.prev[self.head] = j;
        self.head = j;
    }

    fn mtf_mb(&mut self, end: usize) {
        self.support_end = self.head;
        if self.m == self.dim + 1 {
            return;
        }
        let mut k = self.head;
        while k != end {
            let j = k;
            k = self.next[k];
            if self.excess(j) > 0.0 && self.push(j) {
                self.mtf_mb(j);
                self.pop();
                self.move_to_front(j);
            }
        }
    }

    fn max_excess(&self, from: usize) -> (f64, usize) {
        let mut best = (0.0, NIL);
        let mut k = from;
        while k != NIL {
            let e = self.excess(k);
            if e > best.0 {
                best = (e, k);
            }
            k = self.next[k];
        }
        best
    }

    fn pivot_mb(&mut self) {
        let mut t = self.next[self.head];
        self.mtf_mb(t);
        loop {
            let (max_e, pivot) = self.max_excess(t);
            if max_e <= 0.0 {
                break;
            }
            t = self.support_end;
            if t == pivot {
                t = self.next[t];
            }
            let old_sqr_r = self.current_sqr_r;
            if !self.push(pivot) {
                break;
            }
            let se = self.support_end;
            self.mtf_mb(se);
            self.pop();
            self.move_to_front(pivot);
            if self.current_sqr_r <= old_sqr_r {
                break;
            }
        }
    }

    fn support(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.s);
        let mut k = self.head;
        while k != NIL && out.len() < self.s {
            out.push(k);
            k = self.next[k];
        }
        out
    }
}

fn miniball(points: &[DVector<f64>]) -> CentreSolution {
    let mut mb = Miniball::new(points);
    if points.len() == 1 {
        mb.push(0);
    } else {
        mb.pivot_mb();
    }
    let support = mb.support();
    let centre = mb.current_c.clone();
    let rho = points.iter().map(|a| (a - &centre).norm()).fold(0.0, f64::max);

    // Dual certificate: any convex weights λ on the points give the lower bound
    // ρ² ≥ Σ λ_i |a_i - Σ λ_j a_j|². Use the weights expressing the centre in
    // the hull of the support.
    let sup_pts: Vec<DVector<f64>> = support.iter().map(|&i| points[i].clone()).collect();
    let residual = match project_onto_hull(&sup_pts, &centre, 1e-15) {
        Ok(proj) => {
            let bary = sup_pts
                .iter()
                .zip(&proj.weights)
                .fold(DVector::zeros(centre.len()), |acc, (p, w)| acc + p * *w);
            let dual: f64 = sup_pts
                .iter()
                .zip(&proj.weights)
                .map(|(p, w)| w * (p - &bary).norm_squared())
                .sum();
            (rho - dual.max(0.0).sqrt()).max(0.0)
        }
        Err(_) => f64::NAN,
    };
    CentreSolution {
        centre: Point(centre),
        rho,
        iterations: mb.pushes,
        residual,
        support,
    }
}

fn lp_subgradient(space: &SpaceSpec, x: &DVector<f64>, a: &DVector<f64>) -> DVector<f64> {
    let p = space.exponent();
    let diff = x - a;
    let norm = space.norm_of(&diff);
    if norm == 0.0 {
        return DVector::zeros(x.len());
    }
    diff.map(|t| t.signum() * (t.abs() / norm).powf(p - 1.0))
}

const BARRIER_NEWTON_CAP: usize = 200;
const BARRIER_OUTER_CAP: usize = 60;

/// Value, gradient and Hessian of `τ t - Σ log(t - |x - a_i|_p^p)`.
/// Returns `None` outside the domain.
fn barrier_terms(
    p: f64,
    tau: f64,
    points: &[DVector<f64>],
    x: &DVector<f64>,
    t: f64,
) -> Option<(f64, DVector<f64>, DMatrix<f64>)> {
    let d = x.len();
    let mut value = tau * t;
    let mut grad = DVector::zeros(d + 1);
    let mut hess = DMatrix::zeros(d + 1, d + 1);
    grad[d] = tau;
    for a in points {
        let u = x - a;
        let f: f64 = u.iter().map(|v| v.abs().powf(p)).sum();
        let s = t - f;
        if !(s > 0.0) {
            return None;
        }
        value -= s.ln();
        let df = u.map(|v| p * v.signum() * v.abs().powf(p - 1.0));
        for i in 0..d {
            grad[i] += df[i] / s;
            let curv = p * (p - 1.0) * v_abs_clamped(u[i]).powf(p - 2.0);
            hess[(i, i)] += curv / s;
            for j in 0..d {
                hess[(i, j)] += df[i] * df[j] / (s * s);
            }
            hess[(i, d)] -= df[i] / (s * s);
            hess[(d, i)] -= df[i] / (s * s);
        }
        grad[d] -= 1.0 / s;
        hess[(d, d)] += 1.0 / (s * s);
    }
    Some((value, grad, hess))
}

fn v_abs_clamped(v: f64) -> f64 {
    v.abs().max(1e-12)
}

fn barrier(space: &SpaceSpec, points: &[DVector<f64>], tol: f64) -> Option<CentreSolution> {
    let p = space.exponent();
    let d = points[0].len();
    let m = points.len() as f64;
    let mean = points.iter().fold(DVector::zeros(d), |acc, a| acc + a) / m;
    let scale = points.iter().map(|a| (a - &mean).amax()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Some(CentreSolution {
            centre: Point(mean),
            rho: 0.0,
            iterations: 0,
            residual: 0.0,
            support: vec![],
        });
    }
    let pts: Vec<DVector<f64>> = points.iter().map(|a| (a - &mean) / scale).collect();
    let fmax = |x: &DVector<f64>| {
        pts.iter()
            .map(|a| (x - a).iter().map(|v| v.abs().powf(p)).sum::<f64>())
            .fold(0.0, f64::max)
    };
    let mut x = DVector::zeros(d);
    let mut t = 1.1 * fmax(&x) + 1e-3;
    let mut tau = m / t;
    let target = tol.max(1e-13);
    let mut iterations = 0;
    for _ in 0..BARRIER_OUTER_CAP {
        let mut previous = f64::INFINITY;
        for _ in 0..BARRIER_NEWTON_CAP {
            iterations += 1;
            let (value, grad, hess) = barrier_terms(p, tau, &pts, &x, t)?;
            let step = hess.lu().solve(&(-&grad))?;
            let decrement = -grad.dot(&step);
            if !decrement.is_finite() {
                return None;
            }
            // Near optimality the decrement bottoms out at rounding level.
            if decrement < 1e-12 || (decrement < 1e-6 && decrement > 0.25 * previous) {
                break;
            }
            previous = decrement;
            let mut h = 1.0;
            loop {
                let nx = &x + step.rows(0, d) * h;
                let nt = t + step[d] * h;
                if let Some((nv, _, _)) = barrier_terms(p, tau, &pts, &nx, nt) {
                    if decrement < 0.25 || nv <= value - 0.25 * h * decrement {
                        x = nx;
                        t = nt;
                        break;
                    }
                }
                h *= 0.5;
                if h < 1e-20 {
                    break;
                }
            }
            if h < 1e-20 {
                break;
            }
        }
        if m / tau <= target * t {
            break;
        }
        tau *= 10.0;
    }
    let rho_scaled = fmax(&x).powf(1.0 / p);
    let gap_t = m / tau;
    let lower = (fmax(&x) - gap_t).max(0.0).powf(1.0 / p);
    let centre = mean + x * scale;
    let rho = radius(space, points, &centre);
    Some(CentreSolution {
        centre: Point(centre),
        rho,
        iterations,
        residual: (rho_scaled - lower) * scale,
        support: vec![],
    })
}

fn subgradient(space: &SpaceSpec, points: &[DVector<f64>], tol: f64) -> Result<CentreSolution> {
    let n = points.len() as f64;
    let mut x = points.iter().fold(DVector::zeros(points[0].len()), |acc, p| acc + p) / n;
    let eval = |x: &DVector<f64>| -> (f64, usize) {
        points
            .iter()
            .enumerate()
            .map(|(i, a)| (space.dist_unchecked(a, x), i))
            .fold((0.0, 0), |best, cur| if cur.0 > best.0 { cur } else { best })
    };
    let (mut best, _) = eval(&x);
    let mut best_x = x.clone();
    if best == 0.0 {
        return Ok(CentreSolution {
            centre: Point(x),
            rho: 0.0,
            iterations: 0,
            residual: 0.0,
            support: vec![],
        });
    }
    let mut gap = 0.25 * best;
    let mut since_progress = 0usize;
    let mut history: Vec<f64> = Vec::with_capacity(SUBGRADIENT_ITER_CAP);
    for iter in 0..SUBGRADIENT_ITER_CAP {
        let (r, far) = eval(&x);
        if r < best {
            if r < best - 0.5 * gap {
                since_progress = 0;
            }
            best = r;
            best_x = x.clone();
        } else {
            since_progress += 1;
        }
        if since_progress > 20 {
            gap *= 0.5;
            since_progress = 0;
            x = best_x.clone();
        }
        history.push(best);
        if iter >= STALL_WINDOW && gap <= tol * best.max(1.0) {
            let decrease = history[iter - STALL_WINDOW] - best;
            if decrease < tol {
                return Ok(CentreSolution {
                    centre: Point(best_x),
                    rho: best,
                    iterations: iter + 1,
                    residual: decrease,
                    support: vec![],
                });
            }
        }
        let g = lp_subgradient(space, &x, &points[far]);
        let gg = g.norm_squared();
        if gg == 0.0 {
            break;
        }
        let step = (r - (best - gap)) / gg;
        x.axpy(-step, &g, 1.0);
    }
    Err(Error::Convergence {
        iterations: SUBGRADIENT_ITER_CAP,
        best_value: best,
        best_point: best_x.iter().copied().collect(),
        reason: "subgradient descent still improving at the iteration cap".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::Rng;

    fn pts(rows: &[&[f64]]) -> Vec<DVector<f64>> {
        rows.iter().map(|r| DVector::from_row_slice(r)).collect()
    }

    #[test]
    fn pair_and_triangle() {
        let s = miniball(&pts(&[&[0.0, 0.0], &[2.0, 0.0]]));
        assert_abs_diff_eq!(s.centre[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.rho, 1.0, epsilon = 1e-15);
        let h = 3f64.sqrt() / 2.0;
        let s = miniball(&pts(&[&[0.0, 0.0], &[1.0, 0.0], &[0.5, h]]));
        assert_abs_diff_eq!(s.rho, 1.0 / 3f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(s.centre[1], h / 3.0, epsilon = 1e-14);
        assert!(s.residual < 1e-12, "{}", s.residual);
    }

    #[test]
    fn degenerate_inputs() {
        let s = miniball(&pts(&[&[1.0, 1.0], &[1.0, 1.0], &[1.0, 1.0]]));
        assert_eq!(s.rho, 0.0);
        let s = miniball(&pts(&[&[0.0, 0.0], &[1.0, 1.0], &[2.0, 2.0], &[3.0, 3.0]]));
        assert_abs_diff_eq!(s.centre[0], 1.5, epsilon = 1e-14);
        assert_abs_diff_eq!(s.rho, 1.5 * 2f64.sqrt(), epsilon = 1e-14);
        // Cospherical grid in 3D.
        let mut cube = vec![];
        for i in 0..8 {
            cube.push(DVector::from_row_slice(&[
                (i & 1) as f64,
                ((i >> 1) & 1) as f64,
                ((i >> 2) & 1) as f64,
            ]));
        }
        let s = miniball(&cube);
        for k in 0..3 {
            assert_abs_diff_eq!(s.centre[k], 0.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn encloses_everything_high_dim() {
        let mut rng = crate::rng::seeded(1);
        for dim in [5usize, 20, 50] {
            let p: Vec<DVector<f64>> = (0..120)
                .map(|_| DVector::from_fn(dim, |_, _| rng.random_range(-1.0..1.0)))
                .collect();
            let s = miniball(&p);
            assert!(s.residual < 1e-9, "dim {dim} residual {}", s.residual);
            assert!(s.support.len() <= dim + 1);
        }
    }

    #[test]
    fn lp_subgradient_converges_on_interval() {
        let space = SpaceSpec::lp(3.0, 1).unwrap();
        let s = subgradient(&space, &pts(&[&[-1.0], &[1.0], &[3.0]]), 1e-12).unwrap();
        assert_abs_diff_eq!(s.centre[0], 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(s.rho, 2.0, epsilon = 1e-6);
    }

    #[test]
    fn lp_barrier_matches_subgradient_and_certifies_gap() {
        let space = SpaceSpec::lp(3.0, 1).unwrap();
        let s = barrier(&space, &pts(&[&[-1.0], &[1.0], &[3.0]]), 1e-12).unwrap();
        assert_abs_diff_eq!(s.centre[0], 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(s.rho, 2.0, epsilon = 1e-9);
        let mut rng = crate::rng::seeded(4);
        for p in [1.5, 3.0, 6.0] {
            let space = SpaceSpec::lp(p, 4).unwrap();
            let p: Vec<DVector<f64>> = (0..12)
                .map(|_| DVector::from_fn(4, |_, _| rng.random_range(-2.0..2.0)))
                .collect();
            let b = barrier(&space, &p, 1e-12).unwrap();
            let g = subgradient(&space, &p, 1e-12).unwrap();
            assert!(b.residual < 1e-9, "{}", b.residual);
            assert!(b.rho <= g.rho + 1e-9, "{} vs {}", b.rho, g.rho);
        }
    }
}
