//! Dense symmetric eigensolver.
//!
//! Householder reduction to tridiagonal form followed by the implicit QL
//! iteration with Wilkinson-style shifts (the EISPACK `tred2`/`tql2` pair, in
//! the arrangement popularised by JAMA). Storage is column-major so that the
//! O(n³) inner loops run over contiguous memory.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Eigenvalues in ascending order, with eigenvectors as matching columns when
/// requested.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: Option<DMatrix<f64>>,
}

/// Largest absolute asymmetry `|m_ij - m_ji|`.
pub fn asymmetry(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in 0..j {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn eigenvalues(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    decompose(m, false).map(|e| e.values)
}

/// Full eigendecomposition of a symmetric matrix.
pub fn eigen(m: &DMatrix<f64>) -> Result<SymmetricEigen> {
    decompose(m, true)
}

fn decompose(m: &DMatrix<f64>, want_vectors: bool) -> Result<SymmetricEigen> {
    if !m.is_square() {
        return Err(Error::input("eigensolver needs a square matrix"));
    }
    let n = m.nrows();
    if n == 0 {
        return Ok(SymmetricEigen {
            values: vec![],
            vectors: want_vectors.then(|| DMatrix::zeros(0, 0)),
        });
    }
    let scale = m.amax().max(1.0);
    if asymmetry(m) > 1e-9 * scale {
        return Err(Error::input(format!(
            "matrix is not symmetric (defect {:.3e})",
            asymmetry(m)
        )));
    }

    // Symmetrize exactly so the reduction only ever reads one triangle.
    let mut v: Vec<f64> = m.as_slice().to_vec();
    for j in 0..n {
        for i in 0..j {
            let avg = 0.5 * (v[j * n + i] + v[i * n + j]);
            v[j * n + i] = avg;
            v[i * n + j] = avg;
        }
    }
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tridiagonalize(&mut v, &mut d, &mut e, n, want_vectors);
    let mut vecs = if want_vectors { Some(v) } else { None };
    tql(&mut d, &mut e, vecs.as_deref_mut(), n)?;

    // Sort ascending, carrying vectors along.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let values: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let vectors = vecs.map(|raw| {
        let mut out = DMatrix::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            out.column_mut(dst).copy_from_slice(&raw[src * n..(src + 1) * n]);
        }
        out
    });
    Ok(SymmetricEigen { values, vectors })
}

// `v[c * n + r]` is entry (r, c).
fn tridiagonalize(v: &mut [f64], d: &mut [f64], e: &mut [f64], n: usize, accumulate: bool) {
    let at = |r: usize, c: usize| c * n + r;
    for j in 0..n {
        d[j] = v[at(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for dk in d.iter().take(i) {
            scale += dk.abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = 0.0;
                v[at(j, i)] = 0.0;
            }
        } else {
            for dk in d.iter_mut().take(i) {
                *dk /= scale;
                h += *dk * *dk;
            }
            let f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = 0.0;
            }
            for j in 0..i {
                let f = d[j];
                v[at(j, i)] = f;
                let mut g = e[j] + v[at(j, j)] * f;
                let col = &v[j * n..j * n + i];
                for k in (j + 1)..i {
                    g += col[k] * d[k];
                    e[k] += col[k] * f;
                }
                e[j] = g;
            }
            let mut f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                let f = d[j];
                let g = e[j];
                let col = &mut v[j * n..j * n + i];
                for k in j..i {
                    col[k] -= f * e[k] + g * d[k];
                }
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }

    if !accumulate {
        for (j, dj) in d.iter_mut().enumerate() {
            *dj = v[at(j, j)];
        }
        e[0] = 0.0;
        return;
    }

    for i in 0..n - 1 {
        v[at(n - 1, i)] = v[at(i, i)];
        v[at(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[at(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[at(k, i + 1)] * v[at(k, j)];
                }
                for k in 0..=i {
                    v[at(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[at(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[at(n - 1, j)];
        v[at(n - 1, j)] = 0.0;
    }
    v[at(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

fn tql(d: &mut [f64], e: &mut [f64], mut v: Option<&mut [f64]>, n: usize) -> Result<()> {
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let mut f = 0.0f64;
    let mut tst1 = 0.0f64;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 60 {
                    return Err(Error::Numerical(format!(
                        "QL iteration did not converge for eigenvalue {l}"
                    )));
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(v) = v.as_deref_mut() {
                        let (left, right) = v.split_at_mut((i + 1) * n);
                        let col_i = &mut left[i * n..(i + 1) * n];
                        let col_i1 = &mut right[..n];
                        for k in 0..n {
                            let hk = col_i1[k];
                            col_i1[k] = s * col_i[k] + c * hk;
                            col_i[k] = c * col_i[k] - s * hk;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

/// `‖M v - λ v‖` for the `idx`-th eigenpair.
pub fn residual(m: &DMatrix<f64>, eig: &SymmetricEigen, idx: usize) -> Option<f64> {
    let vecs = eig.vectors.as_ref()?;
    let col: DVector<f64> = vecs.column(idx).into_owned();
    Some((m * &col - &col * eig.values[idx]).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn identity_spectrum() {
        let vals = eigenvalues(&DMatrix::identity(5, 5)).unwrap();
        assert!(vals.iter().all(|&v| (v - 1.0).abs() < 1e-15));
    }

    #[test]
    fn diagonal_and_one_by_one() {
        let m = DMatrix::from_diagonal(&DVector::from_row_slice(&[3.0, -1.0, 2.0]));
        assert_eq!(eigenvalues(&m).unwrap(), vec![-1.0, 2.0, 3.0]);
        let one = DMatrix::from_element(1, 1, 4.5);
        let e = eigen(&one).unwrap();
        assert_eq!(e.values, vec![4.5]);
        assert_eq!(e.vectors.unwrap()[(0, 0)].abs(), 1.0);
    }

    #[test]
    fn two_by_two_closed_form() {
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let vals = eigenvalues(&m).unwrap();
        assert_abs_diff_eq!(vals[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(vals[1], 3.0, epsilon = 1e-14);
    }

    #[test]
    fn rejects_asymmetric() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(eigenvalues(&m), Err(Error::Input(_))));
    }

    #[test]
    fn cycle_graph_matches_cosines() {
        // Independent oracle: circulant eigenvalues cos(2πk/n).
        for n in [3usize, 4, 7, 16, 33] {
            let mut m = DMatrix::zeros(n, n);
            for i in 0..n {
                m[(i, (i + 1) % n)] += 0.5;
                m[(i, (i + n - 1) % n)] += 0.5;
            }
            let vals = eigenvalues(&m).unwrap();
            let mut expect: Vec<f64> = (0..n)
                .map(|k| (2.0 * std::f64::consts::PI * k as f64 / n as f64).cos())
                .collect();
            expect.sort_by(f64::total_cmp);
            for (a, b) in vals.iter().zip(&expect) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn agrees_with_nalgebra() {
        let mut rng = crate::rng::seeded(5);
        use rand::Rng;
        for n in [2usize, 5, 17, 40] {
            let a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
            let s = &a + a.transpose();
            let ours = eigenvalues(&s).unwrap();
            let mut theirs: Vec<f64> = s.clone().symmetric_eigenvalues().iter().copied().collect();
            theirs.sort_by(f64::total_cmp);
            for (x, y) in ours.iter().zip(&theirs) {
                assert_abs_diff_eq!(x, y, epsilon = 1e-10);
            }
        }
    }

    proptest! {
        #[test]
        fn eigenpairs_have_small_residuals(
            n in 1usize..12,
            entries in proptest::collection::vec(-10.0f64..10.0, 144),
        ) {
            let a = DMatrix::from_fn(n, n, |i, j| entries[i * 12 + j]);
            let s = &a + a.transpose();
            let eig = eigen(&s).unwrap();
            let norm = s.amax().max(1.0);
            for idx in 0..n {
                prop_assert!(residual(&s, &eig, idx).unwrap() <= 1e-10 * norm * n as f64);
            }
            let v = eig.vectors.as_ref().unwrap();
            let defect = v.transpose() * v - DMatrix::identity(n, n);
            prop_assert!(defect.amax() < 1e-12);
            prop_assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
            let values_only = eigenvalues(&s).unwrap();
            for (x, y) in values_only.iter().zip(&eig.values) {
                prop_assert!((x - y).abs() <= 1e-10 * norm);
            }
        }
    }
}
