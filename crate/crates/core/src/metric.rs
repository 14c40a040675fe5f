//! Uniformly convex norm spaces.
//!
//! Every space handled here is a finite-dimensional normed space whose norm is
//! either Euclidean (the Hilbert case) or an `ℓ^p` norm with `1 < p < ∞`.
//! Geodesics are straight segments, so the metric midpoint of `x` and `y` is
//! the coordinatewise average.

use std::fmt;
use std::ops::Deref;

use nalgebra::DVector;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SpaceKind {
    Hilbert,
    Lp { p: f64 },
}

/// A uniformly convex space descriptor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceSpec {
    #[serde(flatten)]
    pub kind: SpaceKind,
    pub dim: usize,
}

impl SpaceSpec {
    pub fn hilbert(dim: usize) -> Result<Self> {
        Self::new(SpaceKind::Hilbert, dim)
    }

    pub fn lp(p: f64, dim: usize) -> Result<Self> {
        Self::new(SpaceKind::Lp { p }, dim)
    }

    pub fn new(kind: SpaceKind, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::input("space dimension must be at least 1"));
        }
        if let SpaceKind::Lp { p } = kind {
            if !(p.is_finite() && p > 1.0) {
                return Err(Error::input(format!("lp exponent must satisfy 1 < p < inf, got {p}")));
            }
        }
        Ok(Self { kind, dim })
    }

    pub fn is_hilbert(&self) -> bool {
        matches!(self.kind, SpaceKind::Hilbert) || matches!(self.kind, SpaceKind::Lp { p } if p == 2.0)
    }

    /// Norm exponent (2 for Hilbert).
    pub fn exponent(&self) -> f64 {
        match self.kind {
            SpaceKind::Hilbert => 2.0,
            SpaceKind::Lp { p } => p,
        }
    }

    pub fn check(&self, x: &Point) -> Result<()> {
        if x.dim() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                got: x.dim(),
            });
        }
        Ok(())
    }

    /// Norm of a raw coordinate vector.
    pub fn norm_of(&self, v: &DVector<f64>) -> f64 {
        match self.kind {
            SpaceKind::Hilbert => v.norm(),
            SpaceKind::Lp { p } => lp_norm(v.as_slice(), p),
        }
    }

    /// `|xy|`.
    pub fn distance(&self, x: &Point, y: &Point) -> Result<f64> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.dist_unchecked(x, y))
    }

    pub(crate) fn dist_unchecked(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        match self.kind {
            SpaceKind::Hilbert => x.metric_distance(y),
            SpaceKind::Lp { p } => {
                let mut scale = 0.0f64;
                for (a, b) in x.iter().zip(y.iter()) {
                    scale = scale.max((a - b).abs());
                }
                if scale == 0.0 {
                    return 0.0;
                }
                let s: f64 = x
                    .iter()
                    .zip(y.iter())
                    .map(|(a, b)| ((a - b).abs() / scale).powf(p))
                    .sum();
                scale * s.powf(1.0 / p)
            }
        }
    }

    /// Midpoint `m_{xy}` of the segment from `x` to `y`.
    pub fn midpoint(&self, x: &Point, y: &Point) -> Result<Point> {
        self.check(x)?;
        self.check(y)?;
        Ok(Point((&x.0 + &y.0) * 0.5))
    }

    /// A modulus of uniform convexity `δ_ε`, for `0 < ε ≤ 2`.
    ///
    /// Exact for Hilbert space and for `ℓ^p` with `p ≥ 2` (Clarkson). For
    /// `1 < p < 2` the smaller, still valid, bound `(p-1)ε²/8` is returned.
    pub fn modulus_delta(&self, eps: f64) -> Result<f64> {
        if !(eps > 0.0 && eps <= 2.0) {
            return Err(Error::input(format!("eps must lie in (0, 2], got {eps}")));
        }
        let delta = match self.kind {
            SpaceKind::Hilbert => 1.0 - (1.0 - eps * eps / 4.0).max(0.0).sqrt(),
            SpaceKind::Lp { p } if p >= 2.0 => 1.0 - (1.0 - (eps / 2.0).powf(p)).max(0.0).powf(1.0 / p),
            SpaceKind::Lp { p } => (p - 1.0) * eps * eps / 8.0,
        };
        Ok(delta)
    }

    /// The constant `κ_ε = (2-ε) / (1 - exp(-log(ε/2)·log(1-δ_ε)/log 2))`
    /// controlling how far the centre of a subset can drift, `0 < ε < 2`.
    pub fn kappa(&self, eps: f64) -> Result<f64> {
        if !(eps > 0.0 && eps < 2.0) {
            return Err(Error::input(format!("eps must lie in (0, 2), got {eps}")));
        }
        let delta = self.modulus_delta(eps)?;
        let exponent = -(eps / 2.0).ln() * (1.0 - delta).ln() / std::f64::consts::LN_2;
        // exp(x) - 1 loses everything when x is tiny; exp_m1 does not.
        let denom = -exponent.exp_m1();
        if !(denom > 0.0) || !denom.is_finite() {
            return Err(Error::Numerical(format!("kappa denominator degenerate at eps={eps}")));
        }
        Ok((2.0 - eps) / denom)
    }
}

fn lp_norm(v: &[f64], p: f64) -> f64 {
    let scale = v.iter().fold(0.0f64, |m, a| m.max(a.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    scale * v.iter().map(|a| (a.abs() / scale).powf(p)).sum::<f64>().powf(1.0 / p)
}

/// A point of a [`SpaceSpec`], stored as its coordinate vector.
#[derive(Clone, PartialEq)]
pub struct Point(pub DVector<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point(DVector::from_vec(coords))
    }

    pub fn zeros(dim: usize) -> Self {
        Point(DVector::zeros(dim))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.0.iter().copied().collect()
    }

    pub fn into_inner(self) -> DVector<f64> {
        self.0
    }
}

impl Deref for Point {
    type Target = DVector<f64>;
    fn deref(&self) -> &DVector<f64> {
        &self.0
    }
}

impl From<DVector<f64>> for Point {
    fn from(v: DVector<f64>) -> Self {
        Point(v)
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Point::new(v)
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.as_slice().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Vec::<f64>::deserialize(d).map(Point::new)
    }
}
