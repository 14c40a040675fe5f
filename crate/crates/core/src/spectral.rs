//! Averaging operators, spectral gaps and expander verdicts.
//!
//! For a finite group the regular representation contains every irreducible
//! representation, so the spectrum of `M_S = (1/|S|) Σ_s s` on `L²(Γ)` is the
//! whole story. The two-sided gap `h` is the largest number with
//! `σ(M_S) ⊆ [h-1, 1-h] ∪ {1}`; `γ` is the smallest non-zero eigenvalue of
//! `Δ_S = |S|(I - M_S)`.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::eigen;
use crate::error::{Error, Result};
use crate::groups::{FiniteGroup, GroupFamily};

/// Eigenvalues within this distance of 1 count as the trivial eigenvalue.
pub const UNIT_TOL: f64 = 1e-8;

/// Spectral data of a Cayley graph.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralReport {
    pub label: String,
    pub order: usize,
    pub num_gens: usize,
    /// Spectrum of `M_S`, ascending.
    pub eigenvalues: Vec<f64>,
    pub h_gap: f64,
    /// `+∞` when `Δ_S` has no non-zero eigenvalue (serialised as `null`).
    pub gamma: f64,
    /// `sqrt(2γ/|S|)`, a lower bound for the Kazhdan constant of `(Γ, S)`.
    pub kazhdan_lower: f64,
}

/// `cayley_adjacency / |S|`; the identity on the trivial group.
pub fn averaging_operator(g: &FiniteGroup) -> DMatrix<f64> {
    let s = g.gens().len();
    if s == 0 {
        return DMatrix::identity(g.order(), g.order());
    }
    g.cayley_adjacency() / s as f64
}

/// Ascending eigenvalues of a symmetric matrix.
pub fn spectrum(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    eigen::eigenvalues(m)
}

/// `(h, γ/|S|)` from an ascending spectrum of `M_S`. A gap below `UNIT_TOL`
/// is reported as exactly zero.
fn gaps(eigenvalues: &[f64]) -> (f64, f64) {
    let nontrivial: Vec<f64> = eigenvalues
        .iter()
        .copied()
        .filter(|l| (l - 1.0).abs() > UNIT_TOL)
        .collect();
    match (nontrivial.first(), nontrivial.last()) {
        (Some(&lo), Some(&hi)) => {
            // An eigenvalue within UNIT_TOL of -1 counts as -1.
            let h = (1.0 - hi).min(1.0 + lo);
            (if h <= UNIT_TOL { 0.0 } else { h }, 1.0 - hi)
        }
        _ => (1.0, f64::INFINITY),
    }
}

/// Two-sided gap `h` of an ascending spectrum.
pub fn two_sided_gap(eigenvalues: &[f64]) -> f64 {
    gaps(eigenvalues).0
}

pub fn spectral_report(g: &FiniteGroup, cap: usize) -> Result<SpectralReport> {
    if g.order() > cap {
        return Err(Error::Resource {
            what: format!("spectrum of {}", g.label()),
            needed: g.order(),
            cap,
        });
    }
    let eigenvalues = spectrum(&averaging_operator(g))?;
    let (h_gap, normalized) = gaps(&eigenvalues);
    let s = g.gens().len().max(1) as f64;
    let gamma = s * normalized;
    Ok(SpectralReport {
        label: g.label(),
        order: g.order(),
        num_gens: g.gens().len(),
        eigenvalues,
        h_gap,
        gamma,
        kazhdan_lower: (2.0 * gamma / s).sqrt(),
    })
}

/// Per-member gap summary inside an [`ExpanderReport`].
#[derive(Debug, Clone, Serialize)]
pub struct MemberGap {
    pub label: String,
    pub order: usize,
    pub h_gap: f64,
    pub gamma: f64,
    pub kazhdan_lower: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExpanderReport {
    pub family: String,
    pub members: Vec<MemberGap>,
    pub inf_h_gap: f64,
    pub max_gens: usize,
    pub threshold: f64,
    pub expander: bool,
}

/// Expander verdict `inf_n h_n ≥ threshold`, members solved in parallel.
pub fn expander_check(family: &GroupFamily, threshold: f64, cap: usize) -> Result<ExpanderReport> {
    if family.is_empty() {
        return Err(Error::input("expander check needs a non-empty family"));
    }
    let reports: Vec<SpectralReport> = family
        .members
        .par_iter()
        .map(|g| spectral_report(g, cap))
        .collect::<Result<_>>()?;
    let members: Vec<MemberGap> = reports
        .into_iter()
        .map(|r| MemberGap {
            label: r.label,
            order: r.order,
            h_gap: r.h_gap,
            gamma: r.gamma,
            kazhdan_lower: r.kazhdan_lower,
        })
        .collect();
    let inf_h_gap = members.iter().map(|m| m.h_gap).fold(f64::INFINITY, f64::min);
    Ok(ExpanderReport {
        family: family.label.clone(),
        inf_h_gap,
        max_gens: family.max_gens(),
        threshold,
        expander: inf_h_gap >= threshold,
        members,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct TensorGapReport {
    /// `min(h₁, h₂)`.
    pub eps: f64,
    /// Pairwise products of factor eigenvalues, ascending.
    pub spectrum: Vec<f64>,
    /// Whether the product spectrum lies in `[ε-1, 1-ε] ∪ {1}`.
    pub contained: bool,
    /// `ε = 0`, so containment says nothing.
    pub degenerate: bool,
}

/// Spectrum of `M_{S₁×S₂} = M₁ ⊗ M₂` from the factor spectra.
pub fn tensor_gap_check(g1: &FiniteGroup, g2: &FiniteGroup, cap: usize) -> Result<TensorGapReport> {
    let r1 = spectral_report(g1, cap)?;
    let r2 = spectral_report(g2, cap)?;
    let eps = r1.h_gap.min(r2.h_gap);
    let mut spectrum: Vec<f64> = r1
        .eigenvalues
        .iter()
        .flat_map(|a| r2.eigenvalues.iter().map(move |b| a * b))
        .collect();
    spectrum.sort_by(f64::total_cmp);
    let slack = 1e-9;
    let contained = spectrum
        .iter()
        .all(|&l| (l - 1.0).abs() <= UNIT_TOL || (l >= eps - 1.0 - slack && l <= 1.0 - eps + slack));
    Ok(TensorGapReport {
        eps,
        degenerate: eps <= slack,
        spectrum,
        contained,
    })
}

/// Checks that `Δ_S² - γΔ_S` is positive semidefinite on `L²(Γ)`, the
/// spectral consequence of a sum-of-squares gap certificate.
pub fn gap_certificate(g: &FiniteGroup, gamma: f64, cap: usize) -> Result<bool> {
    if !(gamma >= 0.0) {
        return Err(Error::input("gamma must be non-negative"));
    }
    if g.order() > cap {
        return Err(Error::Resource {
            what: format!("gap certificate for {}", g.label()),
            needed: g.order(),
            cap,
        });
    }
    let n = g.order();
    let s = g.gens().len() as f64;
    let laplacian = DMatrix::<f64>::identity(n, n) * s - g.cayley_adjacency();
    let form = &laplacian * &laplacian - &laplacian * gamma;
    let min = spectrum(&form)?.first().copied().unwrap_or(0.0);
    Ok(min >= -1e-8)
}

/// Whether the Cayley graph is bipartite.
pub fn is_bipartite(g: &FiniteGroup) -> bool {
    let mut colour = vec![u8::MAX; g.order()];
    for start in 0..g.order() {
        if colour[start] != u8::MAX {
            continue;
        }
        colour[start] = 0;
        let mut stack = vec![start];
        while let Some(x) = stack.pop() {
            for &s in g.gens() {
                let y = g.mul(s, x);
                if colour[y] == u8::MAX {
                    colour[y] = 1 - colour[x];
                    stack.push(y);
                } else if colour[y] == colour[x] {
                    return false;
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{make_cyclic, make_product, trivial};
    use approx::assert_abs_diff_eq;

    const CAP: usize = 10_000;

    #[test]
    fn averaging_examples() {
        let z2 = make_cyclic(2).unwrap();
        assert_eq!(
            averaging_operator(&z2),
            DMatrix::from_row_slice(2, 2, &[0., 1., 1., 0.])
        );
        let z3 = make_cyclic(3).unwrap();
        let m = averaging_operator(&z3);
        for i in 0..3 {
            assert_eq!(m[(i, i)], 0.0);
            assert_eq!(m.row(i).sum(), 1.0);
        }
        assert_eq!(m[(0, 1)], 0.5);
    }

    #[test]
    fn small_spectra() {
        let z4 = spectrum(&averaging_operator(&make_cyclic(4).unwrap())).unwrap();
        let want = [-1.0, 0.0, 0.0, 1.0];
        for (a, b) in z4.iter().zip(want) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-12);
        }
        let id = spectrum(&DMatrix::identity(3, 3)).unwrap();
        assert_eq!(id, vec![1.0; 3]);
    }

    #[test]
    fn report_examples() {
        let r = spectral_report(&make_cyclic(3).unwrap(), CAP).unwrap();
        assert_abs_diff_eq!(r.eigenvalues[0], -0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(r.gamma, 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.h_gap, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(r.kazhdan_lower, 3f64.sqrt(), epsilon = 1e-12);
        let r = spectral_report(&make_cyclic(2).unwrap(), CAP).unwrap();
        assert_abs_diff_eq!(r.h_gap, 0.0, epsilon = 1e-12);
        let r = spectral_report(&trivial(), CAP).unwrap();
        assert_eq!(r.eigenvalues, vec![1.0]);
        assert!(r.gamma.is_infinite());
        assert!(matches!(
            spectral_report(&make_cyclic(20).unwrap(), 10),
            Err(Error::Resource { .. })
        ));
    }

    #[test]
    fn certificate_examples() {
        let z3 = make_cyclic(3).unwrap();
        assert!(gap_certificate(&z3, 3.0, CAP).unwrap());
        assert!(!gap_certificate(&z3, 3.5, CAP).unwrap());
        assert!(gap_certificate(&z3, 0.0, CAP).unwrap());
        assert!(gap_certificate(&z3, -1.0, CAP).is_err());
    }

    #[test]
    fn tensor_examples() {
        let z3 = make_cyclic(3).unwrap();
        let t = tensor_gap_check(&z3, &z3, CAP).unwrap();
        assert!(t.contained && !t.degenerate);
        assert_abs_diff_eq!(t.eps, 0.5, epsilon = 1e-12);
        let t = tensor_gap_check(&z3, &trivial(), CAP).unwrap();
        assert!(t.contained);
        assert_eq!(t.spectrum.len(), 3);
        let z2 = make_cyclic(2).unwrap();
        let t = tensor_gap_check(&z2, &z2, CAP).unwrap();
        assert!(t.contained && t.degenerate);
        let direct = spectral_report(&make_product(&z2, &z2, CAP).unwrap(), CAP).unwrap();
        for (a, b) in direct.eigenvalues.iter().zip(&t.spectrum) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn bipartite_cycles() {
        assert!(is_bipartite(&make_cyclic(6).unwrap()));
        assert!(!is_bipartite(&make_cyclic(5).unwrap()));
    }
}
