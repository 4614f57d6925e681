//! Dense real symmetric eigensolver: Householder reduction to tridiagonal
//! form followed by the implicit QL algorithm with Wilkinson-style shifts
//! (the classic EISPACK `tred2`/`tql2` pair).

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::error::{Error, Result};

/// Eigenpairs of a symmetric matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub dim: usize,
    pub values: Vec<f64>,
    /// Column-major: eigenvector `k` occupies `vectors[k * dim..(k + 1) * dim]`.
    pub vectors: Vec<f64>,
}

impl SymmetricEigen {
    pub fn vector(&self, k: usize) -> &[f64] {
        &self.vectors[k * self.dim..(k + 1) * self.dim]
    }
}

/// Diagonalize a row-major symmetric `dim × dim` matrix. Only the lower
/// triangle is read.
pub fn symmetric_eigen(matrix: &[f64], dim: usize) -> Result<SymmetricEigen> {
    if matrix.len() != dim * dim {
        return Err(Error::Dimension {
            expected: dim * dim,
            found: matrix.len(),
        });
    }
    if dim == 0 {
        return Ok(SymmetricEigen {
            dim,
            values: Vec::new(),
            vectors: Vec::new(),
        });
    }
    // Working copy, row-major; after tred2 it holds the accumulated
    // orthogonal transformation.
    let mut v = matrix.to_vec();
    let mut d = vec![0.0; dim];
    let mut e = vec![0.0; dim];
    tred2(&mut v, &mut d, &mut e, dim);
    tql2(&mut v, &mut d, &mut e, dim)?;
    // tql2 leaves eigenvectors in columns of the row-major v; transpose.
    let mut vectors = vec![0.0; dim * dim];
    for r in 0..dim {
        for c in 0..dim {
            vectors[c * dim + r] = v[r * dim + c];
        }
    }
    Ok(SymmetricEigen {
        dim,
        values: d,
        vectors,
    })
}

/// Eigen-decomposition of the symmetric tridiagonal matrix with diagonal
/// `diag` and sub-diagonal `off` (`off.len() == diag.len() - 1`).
pub fn tridiagonal_eigen(diag: &[f64], off: &[f64]) -> Result<SymmetricEigen> {
    let dim = diag.len();
    if dim == 0 {
        return Ok(SymmetricEigen {
            dim,
            values: Vec::new(),
            vectors: Vec::new(),
        });
    }
    if off.len() + 1 != dim {
        return Err(Error::Dimension {
            expected: dim - 1,
            found: off.len(),
        });
    }
    let mut v = vec![0.0; dim * dim];
    for i in 0..dim {
        v[i * dim + i] = 1.0;
    }
    let mut d = diag.to_vec();
    // tql2 expects e[i] to be the coupling between i-1 and i.
    let mut e = vec![0.0; dim];
    e[1..].copy_from_slice(off);
    tql2(&mut v, &mut d, &mut e, dim)?;
    let mut vectors = vec![0.0; dim * dim];
    for r in 0..dim {
        for c in 0..dim {
            vectors[c * dim + r] = v[r * dim + c];
        }
    }
    Ok(SymmetricEigen {
        dim,
        values: d,
        vectors,
    })
}

/// `exp(-i·T·t)·e_1` for a symmetric tridiagonal `T`.
pub fn tridiagonal_exp_first_column(eig: &SymmetricEigen, t: f64) -> Vec<Complex64> {
    let m = eig.dim;
    let mut out = vec![Complex64::new(0.0, 0.0); m];
    for k in 0..m {
        let vk = eig.vector(k);
        let phase = Complex64::from_polar(1.0, -eig.values[k] * t) * vk[0];
        for (o, &x) in out.iter_mut().zip(vk) {
            *o += phase * x;
        }
    }
    out
}

fn tred2(v: &mut [f64], d: &mut [f64], e: &mut [f64], n: usize) {
    let at = |i: usize, j: usize| i * n + j;
    for j in 0..n {
        d[j] = v[at(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for k in 0..i {
            scale += d[k].abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = 0.0;
                v[at(j, i)] = 0.0;
            }
        } else {
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for j in 0..i {
                e[j] = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v[at(j, i)] = f;
                g = e[j] + v[at(j, j)] * f;
                for k in j + 1..i {
                    g += v[at(k, j)] * d[k];
                    e[k] += v[at(k, j)] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[at(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = 0.0;
            }
        }
        d[i] = h;
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

fn tql2(v: &mut [f64], d: &mut [f64], e: &mut [f64], n: usize) -> Result<()> {
    const MAX_SWEEPS: usize = 64;
    let at = |i: usize, j: usize| i * n + j;
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
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
        if m == n {
            m = n - 1;
        }
        if m > l {
            let mut sweeps = 0;
            loop {
                sweeps += 1;
                if sweeps > MAX_SWEEPS {
                    return Err(Error::Convergence {
                        residual: e[l].abs(),
                        tolerance: eps * tst1,
                    });
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for i in l + 2..n {
                    d[i] -= h;
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
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        h = v[at(k, i + 1)];
                        v[at(k, i + 1)] = s * v[at(k, i)] + c * h;
                        v[at(k, i)] = c * v[at(k, i)] - s * h;
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

    // selection sort into ascending order, carrying vectors along
    for i in 0..n.saturating_sub(1) {
        let mut k = i;
        let mut p = d[i];
        for j in i + 1..n {
            if d[j] < p {
                k = j;
                p = d[j];
            }
        }
        if k != i {
            d[k] = d[i];
            d[i] = p;
            for j in 0..n {
                v.swap(at(j, i), at(j, k));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::vec::Vec;

    fn check_decomposition(a: &[f64], n: usize, eig: &SymmetricEigen) {
        let scale = a.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        for k in 0..n {
            let v = eig.vector(k);
            for r in 0..n {
                let av: f64 = (0..n).map(|c| a[r * n + c] * v[c]).sum();
                assert!((av - eig.values[k] * v[r]).abs() < 1e-11 * scale * n as f64);
            }
            for j in 0..n {
                let dot: f64 = v.iter().zip(eig.vector(j)).map(|(x, y)| x * y).sum();
                let expect = if j == k { 1.0 } else { 0.0 };
                assert!((dot - expect).abs() < 1e-12);
            }
        }
        for w in eig.values.windows(2) {
            assert!(w[0] <= w[1]);
        }
    }

    #[test]
    fn two_by_two_closed_form() {
        let (a, b, c) = (1.5, -0.7, 0.2);
        let m = [a, b, b, c];
        let eig = symmetric_eigen(&m, 2).unwrap();
        let mid = 0.5 * (a + c);
        let rad = (0.25 * (a - c) * (a - c) + b * b).sqrt();
        assert!((eig.values[0] - (mid - rad)).abs() < 1e-14);
        assert!((eig.values[1] - (mid + rad)).abs() < 1e-14);
        check_decomposition(&m, 2, &eig);
    }

    #[test]
    fn pseudo_random_symmetric() {
        let n = 37;
        let mut m = std::vec![0.0; n * n];
        let mut seed = 12345u64;
        for r in 0..n {
            for c in 0..=r {
                seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let x = ((seed >> 11) as f64 / (1u64 << 53) as f64) - 0.5;
                m[r * n + c] = x;
                m[c * n + r] = x;
            }
        }
        let eig = symmetric_eigen(&m, n).unwrap();
        check_decomposition(&m, n, &eig);
        let trace: f64 = (0..n).map(|i| m[i * n + i]).sum();
        let sum: f64 = eig.values.iter().sum();
        assert!((trace - sum).abs() < 1e-12);
    }

    #[test]
    fn degenerate_and_diagonal() {
        let m = [2.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, -1.0];
        let eig = symmetric_eigen(&m, 3).unwrap();
        assert_eq!(eig.values, std::vec![-1.0, 2.0, 2.0]);
        check_decomposition(&m, 3, &eig);
        let one = symmetric_eigen(&[4.2], 1).unwrap();
        assert_eq!(one.values, std::vec![4.2]);
        assert_eq!(one.vectors, std::vec![1.0]);
    }

    #[test]
    fn tridiagonal_path_matches_dense() {
        let diag = [1.0, -2.0, 0.5, 3.0, 0.0];
        let off = [0.4, 1.2, -0.3, 0.9];
        let n = diag.len();
        let mut m = std::vec![0.0; n * n];
        for i in 0..n {
            m[i * n + i] = diag[i];
        }
        for i in 0..n - 1 {
            m[i * n + i + 1] = off[i];
            m[(i + 1) * n + i] = off[i];
        }
        let a = tridiagonal_eigen(&diag, &off).unwrap();
        let b = symmetric_eigen(&m, n).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).abs() < 1e-13);
        }
        check_decomposition(&m, n, &a);
    }

    #[test]
    fn exp_first_column_is_unitary() {
        let eig = tridiagonal_eigen(&[0.3, -1.0, 2.0], &[0.5, 0.25]).unwrap();
        let col: Vec<Complex64> = tridiagonal_exp_first_column(&eig, 3.7);
        let norm: f64 = col.iter().map(|z| z.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-14);
        let col0 = tridiagonal_exp_first_column(&eig, 0.0);
        assert!((col0[0] - Complex64::new(1.0, 0.0)).norm() < 1e-14);
    }
}
