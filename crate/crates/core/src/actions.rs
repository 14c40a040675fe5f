//! Affine isometric actions on Euclidean space.
//!
//! A generator `s` acts by `σ(s)v = π(s)v + b(s)` with `π(s)` orthogonal.
//! Words are composed left to right, `σ(s_1 ⋯ s_k) = σ(s_1) ∘ ⋯ ∘ σ(s_k)`, and
//! the inverse of `(π, b)` is `(πᵀ, -πᵀb)`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::eigen;
use crate::error::{Error, Result};
use crate::linalg::{is_orthogonal, least_squares};
use crate::metric::Point;
use crate::rng::{self, SeededRng};

/// A generator or its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Letter {
    pub gen: usize,
    pub inverse: bool,
}

/// A freely reduced word in the generators.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Word(Vec<Letter>);

impl Word {
    /// Builds the free reduction of `letters`.
    pub fn new(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            match out.last() {
                Some(last) if last.gen == l.gen && last.inverse != l.inverse => {
                    out.pop();
                }
                _ => out.push(l),
            }
        }
        Word(out)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Concatenation `uw`, reduced.
    pub fn concat(&self, other: &Word) -> Word {
        Word::new(self.0.iter().chain(other.0.iter()).copied())
    }

    pub fn inverse(&self) -> Word {
        Word(
            self.0
                .iter()
                .rev()
                .map(|l| Letter {
                    gen: l.gen,
                    inverse: !l.inverse,
                })
                .collect(),
        )
    }
}

/// One generator of an action file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub label: String,
    /// Row-major rows of `π(s)`.
    pub matrix: Vec<Vec<f64>>,
    pub vector: Vec<f64>,
}

/// On-disk form `{dim, generators, relations}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ActionFile {
    pub dim: usize,
    pub generators: Vec<GeneratorSpec>,
    #[serde(default)]
    pub relations: Vec<String>,
}

/// An affine isometric action given on generators.
#[derive(Debug, Clone)]
pub struct AffineAction {
    dim: usize,
    labels: Vec<String>,
    linear: Vec<DMatrix<f64>>,
    translation: Vec<DVector<f64>>,
    relations: Vec<Word>,
}

/// An affine map `x ↦ Mx + t`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineMap {
    pub linear: DMatrix<f64>,
    pub translation: DVector<f64>,
}

impl AffineMap {
    pub fn identity(dim: usize) -> Self {
        Self {
            linear: DMatrix::identity(dim, dim),
            translation: DVector::zeros(dim),
        }
    }

    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.linear * x + &self.translation
    }

    /// `self ∘ other`.
    pub fn then_apply(&self, other: &AffineMap) -> AffineMap {
        AffineMap {
            linear: &self.linear * &other.linear,
            translation: &self.linear * &other.translation + &self.translation,
        }
    }
}

impl AffineAction {
    pub fn new(
        dim: usize,
        generators: Vec<(String, DMatrix<f64>, DVector<f64>)>,
        relations: &[String],
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::input("action dimension must be positive"));
        }
        let mut labels = Vec::new();
        let mut linear = Vec::new();
        let mut translation = Vec::new();
        for (label, m, b) in generators {
            if label.is_empty() || label.contains(char::is_whitespace) || label.contains('^') {
                return Err(Error::input(format!("invalid generator label '{label}'")));
            }
            if labels.contains(&label) {
                return Err(Error::input(format!("duplicate generator label '{label}'")));
            }
            if m.nrows() != dim || m.ncols() != dim {
                return Err(Error::Dimension {
                    expected: dim,
                    got: m.nrows(),
                });
            }
            if b.len() != dim {
                return Err(Error::Dimension {
                    expected: dim,
                    got: b.len(),
                });
            }
            if !is_orthogonal(&m, 1e-9) {
                return Err(Error::input(format!("linear part of '{label}' is not orthogonal")));
            }
            labels.push(label);
            linear.push(m);
            translation.push(b);
        }
        let mut action = Self {
            dim,
            labels,
            linear,
            translation,
            relations: vec![],
        };
        let words = relations
            .iter()
            .map(|r| action.parse_word(r))
            .collect::<Result<Vec<_>>>()?;
        for (w, text) in words.iter().zip(relations) {
            let map = action.word_map(w);
            let lin = (&map.linear - DMatrix::<f64>::identity(dim, dim)).amax();
            let tr = map.translation.amax();
            if lin > 1e-8 || tr > 1e-8 {
                return Err(Error::input(format!(
                    "relation '{text}' does not act trivially (linear defect {lin:.2e}, translation {tr:.2e})"
                )));
            }
        }
        action.relations = words;
        Ok(action)
    }

    pub fn from_file(file: ActionFile) -> Result<Self> {
        let dim = file.dim;
        let gens = file
            .generators
            .into_iter()
            .map(|g| {
                if g.matrix.len() != dim || g.matrix.iter().any(|r| r.len() != dim) {
                    return Err(Error::input(format!("matrix of '{}' must be {dim}x{dim}", g.label)));
                }
                let m = DMatrix::from_row_iterator(dim, dim, g.matrix.into_iter().flatten());
                Ok((g.label, m, DVector::from_vec(g.vector)))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(dim, gens, &file.relations)
    }

    pub fn to_file(&self) -> ActionFile {
        ActionFile {
            dim: self.dim,
            generators: self
                .labels
                .iter()
                .zip(&self.linear)
                .zip(&self.translation)
                .map(|((l, m), b)| GeneratorSpec {
                    label: l.clone(),
                    matrix: m.row_iter().map(|r| r.iter().copied().collect()).collect(),
                    vector: b.iter().copied().collect(),
                })
                .collect(),
            relations: self.relations.iter().map(|w| self.format_word(w)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_gens(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Parses whitespace-separated letters `s`, `s^-1` or `s^k`.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let mut letters = Vec::new();
        for token in text.split_whitespace() {
            let (label, exp) = match token.split_once('^') {
                Some((l, e)) => (
                    l,
                    e.parse::<i64>()
                        .map_err(|_| Error::input(format!("bad exponent in '{token}'")))?,
                ),
                None => (token, 1),
            };
            let gen = self
                .labels
                .iter()
                .position(|l| l == label)
                .ok_or_else(|| Error::input(format!("unknown generator '{label}'")))?;
            for _ in 0..exp.unsigned_abs() {
                letters.push(Letter { gen, inverse: exp < 0 });
            }
        }
        Ok(Word::new(letters))
    }

    pub fn format_word(&self, w: &Word) -> String {
        w.letters()
            .iter()
            .map(|l| {
                if l.inverse {
                    format!("{}^-1", self.labels[l.gen])
                } else {
                    self.labels[l.gen].clone()
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn letter_map(&self, l: Letter) -> AffineMap {
        let m = &self.linear[l.gen];
        let b = &self.translation[l.gen];
        if l.inverse {
            let mt = m.transpose();
            let t = -(&mt * b);
            AffineMap {
                linear: mt,
                translation: t,
            }
        } else {
            AffineMap {
                linear: m.clone(),
                translation: b.clone(),
            }
        }
    }

    /// The affine map `σ(w)`.
    pub fn word_map(&self, w: &Word) -> AffineMap {
        w.letters().iter().fold(AffineMap::identity(self.dim), |acc, &l| {
            acc.then_apply(&self.letter_map(l))
        })
    }

    /// `σ(w)v`.
    pub fn evaluate_word(&self, w: &Word, v: &Point) -> Result<Point> {
        self.check_point(v)?;
        Ok(Point(self.word_map(w).apply(v)))
    }

    fn check_point(&self, v: &DVector<f64>) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                got: v.len(),
            });
        }
        Ok(())
    }

    pub fn random_word(&self, rng: &mut SeededRng, max_len: usize) -> Word {
        if self.labels.is_empty() {
            return Word::default();
        }
        let len = rng.random_range(0..=max_len);
        Word::new((0..len).map(|_| Letter {
            gen: rng.random_range(0..self.labels.len()),
            inverse: rng.random_bool(0.5),
        }))
    }

    /// Largest deviation from `b(gh) = π(g)b(h) + b(g)` over random pairs.
    pub fn cocycle_defect(&self, samples: usize, seed: u64) -> f64 {
        let mut rng = rng::seeded(seed);
        let mut worst: f64 = 0.0;
        for _ in 0..samples {
            let g = self.random_word(&mut rng, 8);
            let h = self.random_word(&mut rng, 8);
            let mg = self.word_map(&g);
            let mh = self.word_map(&h);
            let gh = self.word_map(&g.concat(&h));
            let want = &mg.linear * &mh.translation + &mg.translation;
            worst = worst.max((gh.translation - want).amax());
        }
        worst
    }

    pub fn cocycle_check(&self, samples: usize, seed: u64) -> bool {
        self.cocycle_defect(samples, seed) <= 1e-9
    }

    fn displacement_raw(&self, x: &DVector<f64>) -> f64 {
        self.linear
            .iter()
            .zip(&self.translation)
            .map(|(m, b)| (m * x + b - x).norm())
            .fold(0.0, f64::max)
    }

    /// `d(x) = max_s |σ(s)x - x|`.
    pub fn displacement(&self, x: &Point) -> Result<f64> {
        self.check_point(x)?;
        Ok(self.displacement_raw(x))
    }

    /// Largest value of `|d(x) - d(y)| - 2|x - y|` over random pairs in a box
    /// of half-width `scale`.
    pub fn lipschitz_excess(&self, pairs: usize, scale: f64, seed: u64) -> f64 {
        let mut rng = rng::seeded(seed);
        let mut worst = f64::NEG_INFINITY;
        for _ in 0..pairs {
            let x = DVector::from_fn(self.dim, |_, _| rng.random_range(-scale..scale));
            let y = DVector::from_fn(self.dim, |_, _| rng.random_range(-scale..scale));
            let excess = (self.displacement_raw(&x) - self.displacement_raw(&y)).abs() - 2.0 * (&x - &y).norm();
            worst = worst.max(excess);
        }
        worst
    }

    pub fn lipschitz_check(&self, pairs: usize, seed: u64) -> bool {
        self.lipschitz_excess(pairs, 10.0, seed) <= 1e-9
    }

    /// Least-squares solution of `(I - π(s))v = b(s)` for all `s`; `None` when
    /// the residual exceeds `1e-7`.
    pub fn coboundary_solve(&self) -> Result<Option<Point>> {
        let n = self.dim;
        let rows = n * self.labels.len();
        if rows == 0 {
            return Ok(Some(Point::zeros(n)));
        }
        let mut a = DMatrix::zeros(rows, n);
        let mut rhs = DVector::zeros(rows);
        for (j, (m, b)) in self.linear.iter().zip(&self.translation).enumerate() {
            a.view_mut((j * n, 0), (n, n))
                .copy_from(&(DMatrix::<f64>::identity(n, n) - m));
            rhs.rows_mut(j * n, n).copy_from(b);
        }
        let (v, residual) = least_squares(&a, &rhs)?;
        Ok((residual <= 1e-7).then_some(Point(v)))
    }

    /// Gradient of `F(x) = Σ_s |σ(s)x - x|²` and the exact minimiser of `F`
    /// along `-∇F`.
    fn line_search(&self, x: &DVector<f64>) -> Option<DVector<f64>> {
        let mut grad = DVector::zeros(self.dim);
        let residuals: Vec<DVector<f64>> = self
            .linear
            .iter()
            .zip(&self.translation)
            .map(|(m, b)| m * x + b - x)
            .collect();
        for (m, r) in self.linear.iter().zip(&residuals) {
            grad += m.transpose() * r - r;
        }
        if grad.norm() == 0.0 {
            return None;
        }
        let dir = -grad;
        let mut num = 0.0;
        let mut den = 0.0;
        for (m, r) in self.linear.iter().zip(&residuals) {
            let ad = m * &dir - &dir;
            num += r.dot(&ad);
            den += ad.norm_squared();
        }
        if den == 0.0 {
            return None;
        }
        Some(dir * (-num / den))
    }

    /// The recursive descent `x_{n+1} ∈ B(x_n, R·d(x_n))` with
    /// `d(x_{n+1}) ≤ α d(x_n)`.
    pub fn fixed_point_search(&self, x0: &Point, cfg: &DescentConfig) -> Result<DescentOutcome> {
        cfg.validate()?;
        self.check_point(x0)?;
        let mut rng = rng::seeded(cfg.seed);
        let mut x = x0.0.clone();
        let mut d = self.displacement_raw(&x);
        let mut trace = vec![DescentStep {
            n: 0,
            displacement: d,
            step_size: 0.0,
        }];
        for n in 1..=cfg.max_iters {
            if d <= cfg.tol {
                return Ok(DescentOutcome::Converged {
                    point: Point(x),
                    displacement: d,
                    iterations: n - 1,
                    trace,
                });
            }
            let radius = cfg.radius * d;
            let clip = |step: DVector<f64>| {
                let len = step.norm();
                if len > radius {
                    step * (radius / len)
                } else {
                    step
                }
            };
            let mut candidates: Vec<DVector<f64>> = Vec::new();
            if let Some(step) = self.line_search(&x) {
                candidates.push(clip(step));
            }
            for (m, b) in self.linear.iter().zip(&self.translation) {
                let pull = -(m * &x + b - &x);
                let len = pull.norm();
                if len > 0.0 {
                    for j in 1..=10 {
                        candidates.push(&pull * (radius / 2f64.powi(j) / len));
                    }
                }
            }
            for _ in 0..cfg.samples {
                candidates.push(ball_sample(&mut rng, self.dim, radius));
            }
            let best = candidates
                .into_iter()
                .map(|step| {
                    let y = &x + &step;
                    (self.displacement_raw(&y), step)
                })
                .min_by(|a, b| a.0.total_cmp(&b.0));
            let accepted = match best {
                Some((dy, step)) if dy <= cfg.alpha * d => Some((dy, step)),
                _ => {
                    // No heuristic candidate worked: probe the ball for the
                    // positive-displacement condition.
                    let mut min_d = f64::INFINITY;
                    let mut found = None;
                    for _ in 0..cfg.witness_samples {
                        let step = ball_sample(&mut rng, self.dim, radius);
                        let dy = self.displacement_raw(&(&x + &step));
                        min_d = min_d.min(dy);
                        if dy <= cfg.alpha * d {
                            found = Some((dy, step));
                            break;
                        }
                    }
                    if found.is_none() {
                        return Ok(DescentOutcome::Witness {
                            point: Point(x),
                            displacement: d,
                            sampled_min: min_d,
                            samples: cfg.witness_samples,
                            trace,
                        });
                    }
                    found
                }
            };
            let (dy, step) = accepted.expect("handled above");
            trace.push(DescentStep {
                n,
                displacement: dy,
                step_size: step.norm(),
            });
            x += step;
            d = dy;
        }
        if d <= cfg.tol {
            return Ok(DescentOutcome::Converged {
                point: Point(x),
                displacement: d,
                iterations: cfg.max_iters,
                trace,
            });
        }
        Err(Error::Inconclusive(format!(
            "descent reached {} iterations with d = {d:.3e} and no displacement witness",
            cfg.max_iters
        )))
    }
}

fn ball_sample(rng: &mut SeededRng, dim: usize, radius: f64) -> DVector<f64> {
    let dir = DVector::from_fn(dim, |_, _| rng.sample::<f64, _>(StandardNormal));
    let n = dir.norm();
    if n == 0.0 {
        return DVector::zeros(dim);
    }
    let r = radius * rng.random::<f64>().powf(1.0 / dim as f64);
    dir * (r / n)
}

/// Parameters of [`AffineAction::fixed_point_search`].
#[derive(Debug, Clone, Serialize)]
pub struct DescentConfig {
    pub alpha: f64,
    pub radius: f64,
    pub tol: f64,
    pub max_iters: usize,
    /// Random ball samples per step.
    pub samples: usize,
    /// Ball samples used before declaring a displacement witness.
    pub witness_samples: usize,
    pub seed: u64,
}

impl Default for DescentConfig {
    fn default() -> Self {
        Self {
            alpha: 0.5,
            radius: 1.0,
            tol: 1e-9,
            max_iters: 10_000,
            samples: 32,
            witness_samples: 1000,
            seed: 0,
        }
    }
}

impl DescentConfig {
    fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::input(format!("alpha must lie in (0,1), got {}", self.alpha)));
        }
        if !(self.radius > 0.0) || !(self.tol > 0.0) {
            return Err(Error::input("radius and tolerance must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DescentStep {
    pub n: usize,
    pub displacement: f64,
    pub step_size: f64,
}

/// Outcome of the descent: a near-fixed point, or a sample-based witness that
/// `d` cannot be reduced by the factor `α` inside the ball `B(x, R·d(x))`.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum DescentOutcome {
    Converged {
        point: Point,
        displacement: f64,
        iterations: usize,
        trace: Vec<DescentStep>,
    },
    Witness {
        point: Point,
        displacement: f64,
        sampled_min: f64,
        samples: usize,
        trace: Vec<DescentStep>,
    },
}

impl DescentOutcome {
    pub fn trace(&self) -> &[DescentStep] {
        match self {
            DescentOutcome::Converged { trace, .. } | DescentOutcome::Witness { trace, .. } => trace,
        }
    }
}

/// Gram matrix `exp(-t|v_i - v_j|²)` with a factor `F`, `FᵀF = G`.
#[derive(Debug, Clone)]
pub struct GaussianEmbedding {
    pub gram: DMatrix<f64>,
    /// Column `i` is the image `Φ_t(v_i)`.
    pub factor: DMatrix<f64>,
    pub min_eigenvalue: f64,
    /// `max |FᵀF - G|`.
    pub residual: f64,
}

pub fn gaussian_embedding(points: &[Point], t: f64) -> Result<GaussianEmbedding> {
    if !(t > 0.0) {
        return Err(Error::input("t must be positive"));
    }
    if points.is_empty() {
        return Err(Error::input("need at least one point"));
    }
    let dim = points[0].dim();
    if let Some(p) = points.iter().find(|p| p.dim() != dim) {
        return Err(Error::Dimension {
            expected: dim,
            got: p.dim(),
        });
    }
    let n = points.len();
    let gram = DMatrix::from_fn(n, n, |i, j| (-t * (&points[i].0 - &points[j].0).norm_squared()).exp());
    let eig = eigen::eigen(&gram)?;
    let min_eigenvalue = eig.values[0];
    if min_eigenvalue < -1e-9 {
        return Err(Error::Numerical(format!(
            "Gaussian Gram matrix has eigenvalue {min_eigenvalue:.3e}"
        )));
    }
    let vectors = eig.vectors.expect("vectors requested");
    let mut factor = vectors.transpose();
    for (i, lambda) in eig.values.iter().enumerate() {
        factor.row_mut(i).scale_mut(lambda.max(0.0).sqrt());
    }
    let residual = (factor.transpose() * &factor - &gram).amax();
    Ok(GaussianEmbedding {
        gram,
        factor,
        min_eigenvalue,
        residual,
    })
}
