//! Truncated bounded products of finite groups.
//!
//! The first `N` members `Γ_1, …, Γ_N` of a family act on `⊕_n L²(Γ_n)` by
//! left translation in each block, `(λ(g)f)(x) = f(g⁻¹x)`. A product
//! generator is a tuple `(s_1, …, s_N)` with `s_n ∈ S_n`; since the squared
//! displacement of a block vector splits as a sum over blocks, the supremum
//! over all tuples is attained blockwise and never needs the `|S|^N`
//! enumeration.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::groups::{FiniteGroup, GroupFamily, GroupKind};
use crate::linalg::least_squares;
use crate::spectral::{averaging_operator, spectral_report};
use crate::{eigen, rng};

/// `Γ_1 × ⋯ × Γ_N` acting blockwise on `⊕ L²(Γ_n)`.
#[derive(Debug, Clone)]
pub struct TruncatedProduct {
    components: Vec<FiniteGroup>,
    offsets: Vec<usize>,
    dim: usize,
}

impl TruncatedProduct {
    pub fn new(family: &GroupFamily, level: usize, cap: usize) -> Result<Self> {
        if level == 0 || level > family.len() {
            return Err(Error::input(format!(
                "truncation level must lie in 1..={}, got {level}",
                family.len()
            )));
        }
        let components: Vec<FiniteGroup> = family.members[..level].to_vec();
        let dim: usize = components.iter().map(|g| g.order()).sum();
        if dim > cap {
            return Err(Error::Resource {
                what: "block representation dimension".into(),
                needed: dim,
                cap,
            });
        }
        let offsets = components
            .iter()
            .scan(0, |acc, g| {
                let start = *acc;
                *acc += g.order();
                Some(start)
            })
            .collect();
        Ok(Self {
            components,
            offsets,
            dim,
        })
    }

    pub fn level(&self) -> usize {
        self.components.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> &[FiniteGroup] {
        &self.components
    }

    fn block<'a>(&self, v: &'a DVector<f64>, n: usize) -> nalgebra::DVectorView<'a, f64> {
        v.rows(self.offsets[n], self.components[n].order())
    }

    fn check_dim(&self, v: &DVector<f64>) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                got: v.len(),
            });
        }
        Ok(())
    }

    fn check_tuple(&self, g: &[usize]) -> Result<()> {
        if g.len() != self.level() {
            return Err(Error::input(format!(
                "group element needs {} coordinates, got {}",
                self.level(),
                g.len()
            )));
        }
        for (n, (&x, grp)) in g.iter().zip(&self.components).enumerate() {
            if x >= grp.order() {
                return Err(Error::input(format!("coordinate {n}: {x} is not an element")));
            }
        }
        Ok(())
    }

    /// `π(g)v` for a tuple of element indices `g = (g_1, …, g_N)`.
    pub fn act(&self, g: &[usize], v: &DVector<f64>) -> Result<DVector<f64>> {
        self.check_tuple(g)?;
        self.check_dim(v)?;
        Ok(self.act_unchecked(g, v))
    }

    fn act_unchecked(&self, g: &[usize], v: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.dim);
        for (n, grp) in self.components.iter().enumerate() {
            let off = self.offsets[n];
            for y in 0..grp.order() {
                out[off + grp.mul(g[n], y)] = v[off + y];
            }
        }
        out
    }

    /// The permutation matrix of `π(g)`.
    pub fn block_matrix(&self, g: &[usize]) -> Result<DMatrix<f64>> {
        self.check_tuple(g)?;
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (n, grp) in self.components.iter().enumerate() {
            let off = self.offsets[n];
            for y in 0..grp.order() {
                m[(off + grp.mul(g[n], y), off + y)] = 1.0;
            }
        }
        Ok(m)
    }

    /// Orthogonal projection onto the invariant vectors (per-block constants).
    pub fn project(&self, v: &DVector<f64>) -> Result<DVector<f64>> {
        self.check_dim(v)?;
        let mut out = DVector::zeros(self.dim);
        for (n, grp) in self.components.iter().enumerate() {
            let mean = self.block(v, n).mean();
            out.rows_mut(self.offsets[n], grp.order()).fill(mean);
        }
        Ok(out)
    }

    /// The projection `p` as a matrix.
    pub fn projection_matrix(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (n, grp) in self.components.iter().enumerate() {
            let k = grp.order();
            m.view_mut((self.offsets[n], self.offsets[n]), (k, k))
                .fill(1.0 / k as f64);
        }
        m
    }

    /// Per-block worst squared displacement `max_{s ∈ S_n} |s v_n - v_n|²`.
    fn block_worst(&self, v: &DVector<f64>) -> Vec<f64> {
        self.components
            .iter()
            .enumerate()
            .map(|(n, grp)| {
                let off = self.offsets[n];
                grp.gens()
                    .iter()
                    .map(|&s| {
                        (0..grp.order())
                            .map(|y| (v[off + grp.mul(s, y)] - v[off + y]).powi(2))
                            .sum::<f64>()
                    })
                    .fold(0.0, f64::max)
            })
            .collect()
    }

    /// `sup_{c ∈ S_1×⋯×S_N} |c v - v|`.
    pub fn sup_displacement(&self, v: &DVector<f64>) -> Result<f64> {
        self.check_dim(v)?;
        Ok(self.block_worst(v).iter().sum::<f64>().sqrt())
    }

    /// A product generator attaining the supremum.
    pub fn worst_generator(&self, v: &DVector<f64>) -> Result<Vec<usize>> {
        self.check_dim(v)?;
        Ok(self
            .components
            .iter()
            .enumerate()
            .map(|(n, grp)| {
                let off = self.offsets[n];
                grp.gens()
                    .iter()
                    .copied()
                    .map(|s| {
                        let d: f64 = (0..grp.order())
                            .map(|y| (v[off + grp.mul(s, y)] - v[off + y]).powi(2))
                            .sum();
                        (s, d)
                    })
                    .fold(
                        (grp.identity(), -1.0),
                        |best, cur| if cur.1 > best.1 { cur } else { best },
                    )
                    .0
            })
            .collect())
    }

    /// `h = min_n h(Γ_n, S_n)`.
    pub fn gap(&self) -> Result<f64> {
        let mut h = f64::INFINITY;
        for g in &self.components {
            h = h.min(spectral_report(g, usize::MAX)?.h_gap);
        }
        Ok(h)
    }

    /// `min_n sqrt(2γ_n/|S_n|)`, a Kazhdan constant for the product
    /// generating set on the orthogonal complement of the invariant vectors.
    pub fn kazhdan_lower(&self) -> Result<f64> {
        let mut eps = f64::INFINITY;
        for g in &self.components {
            eps = eps.min(spectral_report(g, usize::MAX)?.kazhdan_lower);
        }
        Ok(eps)
    }

    /// Both sides of `h |pv - v| ≤ sup_c |cv - v|`.
    pub fn gap_projection_inequality(&self, v: &DVector<f64>) -> Result<GapAudit> {
        let h = self.gap()?;
        if h <= 0.0 {
            return Err(Error::input(
                "the family has no spectral gap, the inequality is vacuous",
            ));
        }
        Ok(self.gap_audit(v, h))
    }

    fn gap_audit(&self, v: &DVector<f64>, h: f64) -> GapAudit {
        let p = self.project(v).expect("dimension checked by caller");
        let lhs = h * (&p - v).norm();
        let rhs = self.block_worst(v).iter().sum::<f64>().sqrt();
        GapAudit {
            lhs,
            rhs,
            holds: lhs <= rhs + 1e-8,
        }
    }

    pub fn gap_projection_inequality_check(&self, v: &DVector<f64>) -> Result<bool> {
        self.check_dim(v)?;
        self.gap_projection_inequality(v).map(|a| a.holds)
    }

    /// A unit vector `u + t r` with displacement exactly `target`, where `u`
    /// is the normalised all-ones vector and `r` a seeded random vector
    /// orthogonal to the invariant vectors.
    pub fn perturbed_start(&self, target: f64, seed: u64) -> Result<DVector<f64>> {
        if !(target > 0.0) {
            return Err(Error::input("target displacement must be positive"));
        }
        let mut rng = rng::seeded(seed);
        let raw = DVector::from_fn(self.dim, |_, _| rng.random_range(-1.0..1.0));
        let r = &raw - self.project(&raw)?;
        let d = self.sup_displacement(&r)?;
        let rr = r.norm();
        // |t r|-displacement over the norm of u + t r, set equal to target.
        let denom = d * d - target * target * rr * rr;
        if !(d > 0.0) || denom <= 0.0 {
            return Err(Error::input(format!(
                "no start vector with displacement {target} from this perturbation"
            )));
        }
        let t = target / denom.sqrt();
        let u = DVector::from_element(self.dim, 1.0 / (self.dim as f64).sqrt());
        let v = u + r * t;
        Ok(&v / v.norm())
    }

    /// Runs `v_{k+1} = ((k-2)/k·v_k + (2/k)·p v_k) / ‖·‖` from `k = k0`.
    ///
    /// `k0` defaults to `⌈2/h⌉` and may not be smaller. The start vector must
    /// be a unit vector with `sup_c |c v_0 - v_0| ≤ 1/k0`. Every step checks
    /// `|v_{k+1} - v_k| ≤ 4/(hk²)` and `sup_c |c v_k - v_k| ≤ 1/k`. The run
    /// stops after `steps` steps, or earlier once the displacement drops below
    /// `target`.
    pub fn almost_invariant_iteration(
        &self,
        v0: &DVector<f64>,
        k0: Option<usize>,
        steps: usize,
        target: Option<f64>,
    ) -> Result<IterationTrace> {
        self.check_dim(v0)?;
        let h = self.gap()?;
        if h <= 0.0 {
            return Err(Error::input(
                "the family has no spectral gap; the iteration needs h > 0",
            ));
        }
        let k_min = (2.0 / h - 1e-12).ceil().max(1.0) as usize;
        let k0 = k0.unwrap_or(k_min);
        if k0 < k_min {
            return Err(Error::input(format!("k0 = {k0} is below ceil(2/h) = {k_min}")));
        }
        if (v0.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::input("start vector must be a unit vector"));
        }
        let d0 = self.sup_displacement(v0)?;
        if d0 > 1.0 / k0 as f64 + 1e-12 {
            return Err(Error::input(format!(
                "start vector displacement {d0:.6} exceeds 1/k0 = {:.6}",
                1.0 / k0 as f64
            )));
        }

        let slack = 1e-10;
        let mut v = v0.clone();
        let mut trace = Vec::new();
        let mut displacement = d0;
        for k in k0..k0 + steps {
            if target.is_some_and(|t| displacement <= t) {
                break;
            }
            let kf = k as f64;
            let pv = self.project(&v)?;
            let u = &v * ((kf - 2.0) / kf) + &pv * (2.0 / kf);
            let norm = u.norm();
            if norm == 0.0 {
                return Err(Error::Numerical("iteration collapsed to the zero vector".into()));
            }
            let next = u / norm;
            let step = (&next - &v).norm();
            let bound = 4.0 / (h * kf * kf);
            if step > bound + slack {
                return Err(Error::invariant(format!(
                    "step {k}: |v_(k+1) - v_k| = {step:.3e} exceeds 4/(hk^2) = {bound:.3e}"
                )));
            }
            displacement = self.sup_displacement(&next)?;
            if displacement > 1.0 / (kf + 1.0) + slack {
                return Err(Error::invariant(format!(
                    "step {k}: displacement {displacement:.3e} exceeds 1/(k+1)"
                )));
            }
            trace.push(IterationStep {
                k,
                step,
                bound,
                sup_displacement: displacement,
            });
            v = next;
        }
        let p = self.project(&v)?;
        let limit = &p / p.norm();
        Ok(IterationTrace {
            h,
            k0,
            distance_to_invariant: (&v - &limit).norm(),
            final_sup_displacement: displacement,
            final_vector: v.iter().copied().collect(),
            steps: trace,
        })
    }

    /// Checks `|α(g)v - v| ≤ 2C/ε` on random words of length up to
    /// `max_len`, where `α = (π, b)` is the affine action with cocycle `b`.
    pub fn kazhdan_displacement_check(
        &self,
        cocycle: &BlockCocycle,
        base: &DVector<f64>,
        c_bound: f64,
        max_len: usize,
        samples: usize,
        seed: u64,
    ) -> Result<KazhdanReport> {
        self.check_dim(base)?;
        cocycle.check_shape(self)?;
        cocycle.require_coboundary(self)?;
        let eps = self.kazhdan_lower()?;
        if !(eps > 0.0) {
            return Err(Error::input(
                "the product has no Kazhdan bound (a component has no gap)",
            ));
        }

        // Displacement of the product generators, maximised blockwise.
        let gen_disp = self.generator_displacement_unchecked(cocycle, base);
        if gen_disp > c_bound + 1e-12 {
            return Err(Error::input(format!(
                "generator displacement {gen_disp:.6} exceeds C = {c_bound}"
            )));
        }

        let bound = 2.0 * c_bound / eps;
        let mut rng = rng::seeded(seed);
        let mut max_displacement: f64 = 0.0;
        for _ in 0..samples {
            let len = rng.random_range(0..=max_len);
            let mut g: Vec<usize> = self.components.iter().map(|c| c.identity()).collect();
            let mut b = DVector::zeros(self.dim);
            for _ in 0..len {
                let choice: Vec<usize> = self
                    .components
                    .iter()
                    .map(|c| rng.random_range(0..c.gens().len().max(1)))
                    .collect();
                // b(g s) = π(g) b(s) + b(g).
                let bs = cocycle.generator_value(self, &choice);
                b += self.act_unchecked(&g, &bs);
                for (n, c) in self.components.iter().enumerate() {
                    if let Some(&s) = c.gens().get(choice[n]) {
                        g[n] = c.mul(g[n], s);
                    }
                }
            }
            let moved = self.act_unchecked(&g, base) + b;
            max_displacement = max_displacement.max((moved - base).norm());
        }
        Ok(KazhdanReport {
            eps,
            c_bound,
            generator_displacement: gen_disp,
            bound,
            max_displacement,
            max_ratio: max_displacement / bound,
            samples,
            holds: max_displacement <= bound + 1e-9,
        })
    }

    /// `sup_c |α(c)v - v|` over the product generators, maximised blockwise.
    pub fn generator_displacement(&self, cocycle: &BlockCocycle, base: &DVector<f64>) -> Result<f64> {
        self.check_dim(base)?;
        cocycle.check_shape(self)?;
        Ok(self.generator_displacement_unchecked(cocycle, base))
    }

    fn generator_displacement_unchecked(&self, cocycle: &BlockCocycle, base: &DVector<f64>) -> f64 {
        self.components
            .iter()
            .enumerate()
            .map(|(n, grp)| {
                let off = self.offsets[n];
                let k = grp.order();
                let x = base.rows(off, k);
                grp.gens()
                    .iter()
                    .zip(&cocycle.values[n])
                    .map(|(&s, b)| {
                        (0..k)
                            .map(|y| (x[y] + b[grp.mul(s, y)] - x[grp.mul(s, y)]).powi(2))
                            .sum::<f64>()
                    })
                    .fold(0.0, f64::max)
            })
            .sum::<f64>()
            .sqrt()
    }
}

/// Both sides of the gap/projection inequality.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GapAudit {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct IterationStep {
    pub k: usize,
    pub step: f64,
    pub bound: f64,
    pub sup_displacement: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct IterationTrace {
    pub h: f64,
    pub k0: usize,
    pub steps: Vec<IterationStep>,
    pub final_vector: Vec<f64>,
    pub final_sup_displacement: f64,
    /// Distance from the final vector to the normalised projection onto the
    /// invariant vectors.
    pub distance_to_invariant: f64,
}

/// A cocycle of the product whose linear part is the block representation,
/// given by its values `b_n(s)` on each component generator. The value on a
/// product generator `(s_1, …, s_N)` is `⊕ b_n(s_n)`.
#[derive(Debug, Clone)]
pub struct BlockCocycle {
    values: Vec<Vec<DVector<f64>>>,
}

impl BlockCocycle {
    /// `values[n][j]` is `b_n(S_n[j]) ∈ L²(Γ_n)`.
    pub fn new(values: Vec<Vec<DVector<f64>>>) -> Self {
        Self { values }
    }

    /// The coboundary `b(g) = w - π(g)w`.
    pub fn coboundary(product: &TruncatedProduct, w: &DVector<f64>) -> Result<Self> {
        product.check_dim(w)?;
        let values = product
            .components
            .iter()
            .enumerate()
            .map(|(n, grp)| {
                let off = product.offsets[n];
                let k = grp.order();
                grp.gens()
                    .iter()
                    .map(|&s| {
                        let mut b = DVector::zeros(k);
                        for y in 0..k {
                            b[grp.mul(s, y)] -= w[off + y];
                            b[y] += w[off + y];
                        }
                        b
                    })
                    .collect()
            })
            .collect();
        Ok(Self { values })
    }

    fn check_shape(&self, product: &TruncatedProduct) -> Result<()> {
        if self.values.len() != product.level() {
            return Err(Error::input("cocycle has the wrong number of blocks"));
        }
        for (vals, grp) in self.values.iter().zip(&product.components) {
            if vals.len() != grp.gens().len() || vals.iter().any(|b| b.len() != grp.order()) {
                return Err(Error::input(format!("cocycle values do not fit {}", grp.label())));
            }
        }
        Ok(())
    }

    /// On a finite group every cocycle is a coboundary; values that are not
    /// one do not define an action and are rejected.
    fn require_coboundary(&self, product: &TruncatedProduct) -> Result<()> {
        for (n, grp) in product.components.iter().enumerate() {
            let k = grp.order();
            let rows = k * grp.gens().len();
            if rows == 0 {
                continue;
            }
            let mut a = DMatrix::zeros(rows, k);
            let mut rhs = DVector::zeros(rows);
            for (j, &s) in grp.gens().iter().enumerate() {
                for y in 0..k {
                    a[(j * k + y, y)] += 1.0;
                    a[(j * k + grp.mul(s, y), y)] -= 1.0;
                }
                rhs.rows_mut(j * k, k).copy_from(&self.values[n][j]);
            }
            let (_, residual) = least_squares(&a, &rhs)?;
            if residual > 1e-7 {
                return Err(Error::input(format!(
                    "translation part on block {n} is not a coboundary (residual {residual:.3e}); \
                     a finite group admits no other affine isometric action"
                )));
            }
        }
        Ok(())
    }

    fn generator_value(&self, product: &TruncatedProduct, choice: &[usize]) -> DVector<f64> {
        let mut out = DVector::zeros(product.dim);
        for (n, vals) in self.values.iter().enumerate() {
            if let Some(b) = vals.get(choice[n]) {
                out.rows_mut(product.offsets[n], b.len()).copy_from(b);
            }
        }
        out
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct KazhdanReport {
    pub eps: f64,
    pub c_bound: f64,
    pub generator_displacement: f64,
    /// `2C/ε`.
    pub bound: f64,
    pub max_displacement: f64,
    pub max_ratio: f64,
    pub samples: usize,
    pub holds: bool,
}

/// The cocycle `b(g) = ⊕_n (π(g)v_n - v_n)` built from unit vectors
/// `v_n ∈ L²₀(Γ_n)` that are `2^{-n}`-almost invariant.
#[derive(Debug, Clone)]
pub struct AlmostInvariantCocycle {
    product: TruncatedProduct,
    vectors: DVector<f64>,
    block_displacements: Vec<f64>,
}

impl AlmostInvariantCocycle {
    /// Chooses `v_n`: the cosine vector `x ↦ cos(2πx/n)` on cyclic members, a
    /// top nontrivial eigenvector of `M_S` otherwise. Refuses when some `v_n`
    /// moves by more than `2^{-n}`.
    pub fn new(product: TruncatedProduct) -> Result<Self> {
        let mut vectors = DVector::zeros(product.dim);
        let mut block_displacements = Vec::new();
        for (idx, grp) in product.components.iter().enumerate() {
            let v = almost_invariant_vector(grp)?;
            let single = TruncatedProduct {
                components: vec![grp.clone()],
                offsets: vec![0],
                dim: grp.order(),
            };
            let d = single.sup_displacement(&v)?;
            let allowed = 0.5f64.powi(idx as i32 + 1);
            if d > allowed + 1e-12 {
                return Err(Error::input(format!(
                    "member {} ({}) has no {allowed}-almost invariant unit vector \
                     (best found moves by {d:.4}); the family looks like an expander",
                    idx + 1,
                    grp.label()
                )));
            }
            vectors.rows_mut(product.offsets[idx], grp.order()).copy_from(&v);
            block_displacements.push(d);
        }
        Ok(Self {
            product,
            vectors,
            block_displacements,
        })
    }

    pub fn product(&self) -> &TruncatedProduct {
        &self.product
    }

    pub fn block_displacements(&self) -> &[f64] {
        &self.block_displacements
    }

    /// `b(g) = π(g)v - v`.
    pub fn b(&self, g: &[usize]) -> Result<DVector<f64>> {
        Ok(self.product.act(g, &self.vectors)? - &self.vectors)
    }

    /// `sup_c |b(c)|` over product generators.
    pub fn generator_norm(&self) -> f64 {
        self.product.block_worst(&self.vectors).iter().sum::<f64>().sqrt()
    }

    /// The element `g_m`: in each block the first generator raised to
    /// `min(m, ⌊ord/2⌋)`, so that its word length never exceeds `m`.
    pub fn power_element(&self, m: usize) -> Vec<usize> {
        self.product
            .components
            .iter()
            .map(|grp| match grp.gens().first() {
                Some(&s) => grp.pow(s, m.min(grp.element_order(s) / 2)),
                None => grp.identity(),
            })
            .collect()
    }

    pub fn growth_table(&self, lengths: &[usize]) -> Result<GrowthReport> {
        let mut rows = Vec::with_capacity(lengths.len());
        for &m in lengths {
            let g = self.power_element(m);
            rows.push(GrowthRow {
                m,
                norm: self.b(&g)?.norm(),
            });
        }
        let monotone = rows.windows(2).all(|w| w[1].norm >= w[0].norm - 1e-12);
        let max_order = self.product.components.iter().map(|g| g.order()).max().unwrap_or(1);
        let strictly_increasing = rows
            .windows(2)
            .filter(|w| w[1].m <= max_order / 4)
            .all(|w| w[1].norm > w[0].norm);
        Ok(GrowthReport {
            level: self.product.level(),
            generator_norm: self.generator_norm(),
            block_displacements: self.block_displacements.clone(),
            rows,
            monotone,
            strictly_increasing,
        })
    }
}

fn almost_invariant_vector(grp: &FiniteGroup) -> Result<DVector<f64>> {
    let n = grp.order();
    if n < 2 {
        return Err(Error::input("L²₀ of the trivial group is zero"));
    }
    let v = match grp.kind() {
        GroupKind::Cyclic(_) => DVector::from_fn(n, |x, _| (2.0 * std::f64::consts::PI * x as f64 / n as f64).cos()),
        _ => {
            let eig = eigen::eigen(&averaging_operator(grp))?;
            let vectors = eig.vectors.expect("vectors requested");
            let mut best = None;
            for idx in (0..n).rev() {
                let col = vectors.column(idx).into_owned();
                let centred = col.add_scalar(-col.mean());
                if centred.norm() > 1e-6 {
                    best = Some(centred);
                    break;
                }
            }
            best.ok_or_else(|| Error::Numerical("no mean-zero eigenvector found".into()))?
        }
    };
    Ok(&v / v.norm())
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthRow {
    pub m: usize,
    pub norm: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthReport {
    pub level: usize,
    /// `sup_c |b(c)|` over the product generators.
    pub generator_norm: f64,
    pub block_displacements: Vec<f64>,
    pub rows: Vec<GrowthRow>,
    pub monotone: bool,
    /// Strict growth while `m ≤ (largest member order)/4`.
    pub strictly_increasing: bool,
}

/// The cyclic family `ℤ/2^{k+3}`, `k = 1..=levels`.
pub fn dyadic_cyclic_family(levels: usize) -> Result<GroupFamily> {
    let members = (1..=levels)
        .map(|k| crate::groups::make_cyclic(1 << (k + 3)))
        .collect::<Result<Vec<_>>>()?;
    Ok(GroupFamily::new(format!("cyclic:2^(k+3), k=1..{levels}"), members))
}

/// Growth of `|b(g_m)|` along the dyadic cyclic family.
pub fn unbounded_cocycle_demo(
    family: &GroupFamily,
    level: usize,
    lengths: &[usize],
    cap: usize,
) -> Result<GrowthReport> {
    let product = TruncatedProduct::new(family, level, cap)?;
    AlmostInvariantCocycle::new(product)?.growth_table(lengths)
}
