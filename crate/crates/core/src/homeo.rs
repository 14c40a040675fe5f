//! Exact piecewise-linear lifts of circle homeomorphisms.
//!
//! A [`PLLift`] is a homeomorphism `f: ℝ → ℝ` with `f(x + 1) = f(x) + 1`,
//! linear between finitely many breakpoints in `[0, 1)`. It is stored by its
//! breakpoints `0 = x₀ < x₁ < ⋯ < x_k < 1` and values `f(x_i)`; the value
//! `f(1) = f(0) + 1` closes the last segment. Arithmetic is over `BigRational`
//! and the stored form is canonical, so equality is structural.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Q = BigRational;

/// Shorthand for the rational `num/den`.
pub fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

fn frac(x: &Q) -> Q {
    x - x.floor()
}

/// An exact piecewise-linear element of `Homeo⁺_ℤ(ℝ)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PLLift {
    breakpoints: Vec<Q>,
    values: Vec<Q>,
}

impl PLLift {
    /// Validates and canonicalises a lift.
    pub fn new(breakpoints: Vec<Q>, values: Vec<Q>) -> Result<Self> {
        if breakpoints.is_empty() || breakpoints.len() != values.len() {
            return Err(Error::input(
                "a lift needs equally many breakpoints and values, at least one",
            ));
        }
        if !breakpoints[0].is_zero() {
            return Err(Error::input("the first breakpoint must be 0"));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) || breakpoints.last().unwrap() >= &Q::one() {
            return Err(Error::input("breakpoints must increase strictly inside [0, 1)"));
        }
        let end = &values[0] + Q::one();
        if values.windows(2).any(|w| w[0] >= w[1]) || values.last().unwrap() >= &end {
            return Err(Error::input("values must increase strictly and stay below f(0) + 1"));
        }
        let mut lift = Self { breakpoints, values };
        lift.canonicalise();
        Ok(lift)
    }

    pub fn identity() -> Self {
        Self::translation(Q::zero())
    }

    /// `x ↦ x + t`.
    pub fn translation(t: Q) -> Self {
        Self {
            breakpoints: vec![Q::zero()],
            values: vec![t],
        }
    }

    pub fn breakpoints(&self) -> &[Q] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[Q] {
        &self.values
    }

    /// Endpoint `(x_{i+1}, f(x_{i+1}))` of segment `i`.
    fn segment_end(&self, i: usize) -> (Q, Q) {
        match self.breakpoints.get(i + 1) {
            Some(x) => (x.clone(), self.values[i + 1].clone()),
            None => (Q::one(), &self.values[0] + Q::one()),
        }
    }

    /// Slopes of the segments, in order.
    pub fn slopes(&self) -> Vec<Q> {
        (0..self.breakpoints.len())
            .map(|i| {
                let (x1, y1) = self.segment_end(i);
                (y1 - &self.values[i]) / (x1 - &self.breakpoints[i])
            })
            .collect()
    }

    /// Drops interior breakpoints where the slope does not change. The
    /// breakpoint 0 is always kept.
    fn canonicalise(&mut self) {
        let slopes = self.slopes();
        let mut keep = vec![true; self.breakpoints.len()];
        for i in 1..self.breakpoints.len() {
            if slopes[i] == slopes[i - 1] {
                keep[i] = false;
            }
        }
        let mut k = keep.iter();
        self.breakpoints.retain(|_| *k.next().unwrap());
        let mut k = keep.iter();
        self.values.retain(|_| *k.next().unwrap());
    }

    /// Index of the segment containing `t ∈ [0, 1)`.
    fn segment_of(&self, t: &Q) -> usize {
        self.breakpoints.partition_point(|x| x <= t) - 1
    }

    /// `f(x)`, exactly.
    pub fn evaluate(&self, x: &Q) -> Q {
        let n = x.floor();
        let t = x - &n;
        let i = self.segment_of(&t);
        let (x1, y1) = self.segment_end(i);
        let (x0, y0) = (&self.breakpoints[i], &self.values[i]);
        y0 + (&t - x0) * (y1 - y0) / (x1 - x0) + n
    }

    /// `f⁻¹(y)`, exactly.
    pub fn evaluate_inverse(&self, y: &Q) -> Q {
        let n = (y - &self.values[0]).floor();
        let u = y - &n;
        let i = self.values.partition_point(|v| v <= &u) - 1;
        let (x1, y1) = self.segment_end(i);
        let (x0, y0) = (&self.breakpoints[i], &self.values[i]);
        x0 + (&u - y0) * (x1 - x0) / (y1 - y0) + n
    }

    /// The lift through the graph points `(t, f(t))`, `t ∈ [0, 1)`, which must
    /// include every breakpoint of the result, 0 among them.
    fn through(mut graph: Vec<(Q, Q)>) -> Self {
        graph.sort_by(|a, b| a.0.cmp(&b.0));
        graph.dedup_by(|a, b| a.0 == b.0);
        let (breakpoints, values) = graph.into_iter().unzip();
        let mut lift = Self { breakpoints, values };
        lift.canonicalise();
        lift
    }

    /// `self ∘ g`.
    pub fn compose(&self, g: &PLLift) -> PLLift {
        let mut graph: Vec<(Q, Q)> = g
            .breakpoints
            .iter()
            .zip(&g.values)
            .map(|(t, u)| (t.clone(), self.evaluate(u)))
            .collect();
        for (x, y) in self.breakpoints.iter().zip(&self.values) {
            let t = g.evaluate_inverse(x);
            let n = t.floor();
            graph.push((t - &n, y - n));
        }
        Self::through(graph)
    }

    pub fn invert(&self) -> PLLift {
        let graph = self
            .breakpoints
            .iter()
            .zip(&self.values)
            .map(|(x, y)| {
                let n = y.floor();
                (y - &n, x - &n)
            })
            .chain(std::iter::once((Q::zero(), self.evaluate_inverse(&Q::zero()))))
            .collect();
        Self::through(graph)
    }

    /// `self^n` for `n ≥ 0` by repeated squaring; negative `n` uses the inverse.
    pub fn pow(&self, n: i64) -> PLLift {
        let mut base = if n < 0 { self.invert() } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = PLLift::identity();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&base);
            }
            base = base.compose(&base);
            e >>= 1;
        }
        acc
    }

    /// `[f, g] = f ∘ g ∘ f⁻¹ ∘ g⁻¹`.
    pub fn commutator(&self, g: &PLLift) -> PLLift {
        self.compose(g).compose(&self.invert()).compose(&g.invert())
    }

    pub fn to_file(&self) -> LiftFile {
        let pair = |x: &Q| [JsonInt::from(x.numer()), JsonInt::from(x.denom())];
        LiftFile {
            breakpoints: self.breakpoints.iter().map(pair).collect(),
            values: self.values.iter().map(pair).collect(),
        }
    }

    pub fn from_file(file: &LiftFile) -> Result<Self> {
        let parse = |pairs: &[[JsonInt; 2]]| -> Result<Vec<Q>> {
            pairs
                .iter()
                .map(|[n, d]| {
                    let d = d.to_bigint()?;
                    if d.is_zero() {
                        return Err(Error::input("zero denominator"));
                    }
                    Ok(Q::new(n.to_bigint()?, d))
                })
                .collect()
        };
        Self::new(parse(&file.breakpoints)?, parse(&file.values)?)
    }
}

impl fmt::Display for PLLift {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pts: Vec<String> = self
            .breakpoints
            .iter()
            .zip(&self.values)
            .map(|(x, y)| format!("({x}, {y})"))
            .collect();
        write!(f, "PL[{}]", pts.join(", "))
    }
}

/// An integer written as a JSON number when it fits in `i64`, otherwise as a
/// decimal string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum JsonInt {
    Small(i64),
    Big(String),
}

impl JsonInt {
    fn to_bigint(&self) -> Result<BigInt> {
        match self {
            JsonInt::Small(v) => Ok(BigInt::from(*v)),
            JsonInt::Big(s) => s.parse().map_err(|_| Error::input(format!("'{s}' is not an integer"))),
        }
    }
}

impl From<&BigInt> for JsonInt {
    fn from(v: &BigInt) -> Self {
        i64::try_from(v).map_or_else(|_| JsonInt::Big(v.to_string()), JsonInt::Small)
    }
}

/// On-disk form `{breakpoints: [[num, den], …], values: [[num, den], …]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiftFile {
    pub breakpoints: Vec<[JsonInt; 2]>,
    pub values: Vec<[JsonInt; 2]>,
}

/// `a(x) = x - 1/4`.
pub fn lift_a() -> PLLift {
    PLLift::translation(q(-1, 4))
}

/// `b(x) = x + 2{x}` for `{x} ≤ 1/4` and `x + 2/3 - (2/3){x}` otherwise.
pub fn lift_b() -> PLLift {
    PLLift::new(vec![q(0, 1), q(1, 4)], vec![q(0, 1), q(3, 4)]).expect("valid lift")
}

/// The two closed formulas defining `b`, evaluated directly.
pub fn b_formula(x: &Q) -> Q {
    let t = frac(x);
    if t <= q(1, 4) {
        x + &t * q(2, 1)
    } else {
        x + q(2, 3) - t * q(2, 3)
    }
}

/// Exact value rendered as a string.
#[derive(Debug, Clone, Serialize)]
pub struct PowerRow {
    pub n: u32,
    pub value_at_zero: String,
    pub displacement_at_zero: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateReport {
    pub a: LiftFile,
    pub b: LiftFile,
    /// Both formulas for `b` at `{x} = 1/4`.
    pub b_left_at_quarter: String,
    pub b_right_at_quarter: String,
    pub commutator_ab_at_zero: String,
    pub commutator_inv_at_half: String,
    pub w: LiftFile,
    pub w_at_zero: String,
    pub powers: Vec<PowerRow>,
    pub holds: bool,
}

/// Reproduces the commutator computation: with `w = [b⁻¹, a⁻¹][a, b]`,
/// `[a, b](0) = 1/2`, `[b⁻¹, a⁻¹](1/2) = 1` and `wⁿ(0) = n` for `n ≤ 100`,
/// the last both by iterated evaluation and on the composed lift `w¹⁰⁰`.
pub fn commutator_certificate() -> Result<CertificateReport> {
    let a = lift_a();
    let b = lift_b();
    let quarter = q(1, 4);
    let left = &quarter + &quarter * q(2, 1);
    let right = &quarter + q(2, 3) - &quarter * q(2, 3);
    let check = |ok: bool, what: &str| {
        if ok {
            Ok(())
        } else {
            Err(Error::invariant(what.to_string()))
        }
    };
    check(left == right, "the two formulas for b disagree at 1/4")?;
    for k in -8..=8 {
        let x = q(k, 8) + q(1, 7);
        check(
            b.evaluate(&x) == b_formula(&x),
            "the PL form of b disagrees with its formulas",
        )?;
    }
    let ab = a.commutator(&b);
    let ba = b.invert().commutator(&a.invert());
    let c_ab = ab.evaluate(&Q::zero());
    let c_ba = ba.evaluate(&q(1, 2));
    check(c_ab == q(1, 2), "[a,b](0) is not 1/2")?;
    check(c_ba == Q::one(), "[b^-1,a^-1](1/2) is not 1")?;
    let w = ba.compose(&ab);
    let w0 = w.evaluate(&Q::zero());
    check(w0 == Q::one(), "w(0) is not 1")?;
    let mut powers = Vec::with_capacity(100);
    let mut x = Q::zero();
    for n in 1..=100u32 {
        x = w.evaluate(&x);
        check(x == Q::from_integer(BigInt::from(n)), "w^n(0) differs from n")?;
        powers.push(PowerRow {
            n,
            value_at_zero: x.to_string(),
            displacement_at_zero: x.abs().to_string(),
        });
    }
    let w100 = w.pow(100);
    check(
        w100.evaluate(&Q::zero()) == q(100, 1),
        "the composed lift w^100 does not send 0 to 100",
    )?;
    Ok(CertificateReport {
        a: a.to_file(),
        b: b.to_file(),
        b_left_at_quarter: left.to_string(),
        b_right_at_quarter: right.to_string(),
        commutator_ab_at_zero: c_ab.to_string(),
        commutator_inv_at_half: c_ba.to_string(),
        w: w.to_file(),
        w_at_zero: w0.to_string(),
        powers,
        holds: true,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ObReport {
    /// `max |f(0)|` over the set, exact.
    pub max_abs_at_zero: String,
    pub bound: String,
    pub bounded: bool,
}

/// Boundedness of a set of lifts: `{f(0)}` within `[-bound, bound]`.
pub fn ob_bounded_check(lifts: &[PLLift], bound: &Q) -> ObReport {
    let max = lifts
        .iter()
        .map(|f| f.evaluate(&Q::zero()).abs())
        .max()
        .unwrap_or_else(Q::zero);
    ObReport {
        max_abs_at_zero: max.to_string(),
        bound: bound.to_string(),
        bounded: &max <= bound,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluation_examples() {
        assert_eq!(PLLift::identity().evaluate(&q(17, 5)), q(17, 5));
        assert_eq!(lift_a().evaluate(&Q::zero()), q(-1, 4));
        assert_eq!(lift_b().evaluate(&q(1, 4)), q(3, 4));
        assert_eq!(lift_b().evaluate(&q(-3, 4)), q(-1, 4));
        assert_eq!(lift_b().slopes(), vec![q(3, 1), q(1, 3)]);
    }

    #[test]
    fn composition_examples() {
        let (a, b) = (lift_a(), lift_b());
        assert_eq!(a.compose(&b).evaluate(&Q::zero()), q(-1, 4));
        let t = PLLift::translation(q(2, 3)).compose(&PLLift::translation(q(-5, 7)));
        assert_eq!(t, PLLift::translation(q(-1, 21)));
        for f in [a.clone(), b.clone(), a.compose(&b)] {
            assert_eq!(f.compose(&f.invert()), PLLift::identity());
            assert_eq!(f.invert().compose(&f), PLLift::identity());
        }
        assert_eq!(PLLift::identity().invert(), PLLift::identity());
        assert_eq!(a.invert(), PLLift::translation(q(1, 4)));
        assert_eq!(b.invert().evaluate(&q(3, 4)), q(1, 4));
        assert_eq!(b.pow(3).invert(), b.pow(-3));
    }

    #[test]
    fn commutator_examples() {
        let (a, b) = (lift_a(), lift_b());
        assert_eq!(b.commutator(&PLLift::identity()), PLLift::identity());
        assert_eq!(a.commutator(&b).evaluate(&Q::zero()), q(1, 2));
        assert_eq!(b.invert().commutator(&a.invert()).evaluate(&q(1, 2)), Q::one());
    }

    #[test]
    fn certificate() {
        let r = commutator_certificate().unwrap();
        assert!(r.holds);
        assert_eq!(r.w_at_zero, "1");
        assert_eq!(r.powers[99].value_at_zero, "100");
        assert_eq!(r.b_left_at_quarter, "3/4");
        assert_eq!(r.b_right_at_quarter, "3/4");
    }

    #[test]
    fn ob_examples() {
        let (a, b) = (lift_a(), lift_b());
        let set = [a.clone(), b.clone(), a.invert(), b.invert()];
        let r = ob_bounded_check(&set, &Q::one());
        assert_eq!(r.max_abs_at_zero, "1/4");
        assert!(r.bounded);
        let w = b.invert().commutator(&a.invert()).compose(&a.commutator(&b));
        let powers: Vec<PLLift> = (0..=20).map(|n| w.pow(n)).collect();
        let r = ob_bounded_check(&powers, &q(10, 1));
        assert_eq!(r.max_abs_at_zero, "20");
        assert!(!r.bounded);
        assert!(ob_bounded_check(&[], &Q::zero()).bounded);
    }

    #[test]
    fn validation_and_canonical_form() {
        assert!(PLLift::new(vec![], vec![]).is_err());
        assert!(PLLift::new(vec![q(1, 2)], vec![q(0, 1)]).is_err());
        assert!(PLLift::new(vec![q(0, 1), q(1, 2)], vec![q(0, 1), q(0, 1)]).is_err());
        assert!(PLLift::new(vec![q(0, 1), q(1, 2)], vec![q(0, 1), q(3, 2)]).is_err());
        let collinear = PLLift::new(vec![q(0, 1), q(1, 3)], vec![q(1, 5), q(1, 5) + q(1, 3)]).unwrap();
        assert_eq!(collinear, PLLift::translation(q(1, 5)));
    }

    #[test]
    fn json_round_trip() {
        let w = lift_b().compose(&lift_a()).pow(3);
        let text = serde_json::to_string(&w.to_file()).unwrap();
        let back: LiftFile = serde_json::from_str(&text).unwrap();
        assert_eq!(PLLift::from_file(&back).unwrap(), w);
        let big: LiftFile =
            serde_json::from_str(r#"{"breakpoints":[[0,1]],"values":[["123456789012345678901234567890","7"]]}"#)
                .unwrap();
        assert!(PLLift::from_file(&big).is_ok());
    }
}
