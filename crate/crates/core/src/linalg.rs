//! Small dense linear-algebra helpers: dot products, cosine, Gaussian
//! elimination, and power-iteration eigensolving. Everything here operates on
//! plain slices or `ndarray` views; nothing needs an external BLAS.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

use crate::error::{Error, Result};

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// y += alpha * x
#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Cosine similarity; 0.0 when either vector has zero norm.
pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let na = norm(a);
    let nb = norm(b);
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    dot(a, b) / (na * nb)
}

pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    let sum: f64 = values.iter().map(|v| (v - max).exp()).sum();
    max + sum.ln()
}

/// Solves `m x = rhs` in place by Gaussian elimination with partial pivoting.
pub fn solve(mut m: Array2<f64>, mut rhs: Array1<f64>) -> Result<Array1<f64>> {
    let n = m.nrows();
    if m.ncols() != n || rhs.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: rhs.len(),
        });
    }
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[[i, col]].abs().total_cmp(&m[[j, col]].abs()))
            .unwrap();
        if m[[pivot, col]].abs() < 1e-300 {
            return Err(Error::InvalidParam("singular linear system".into()));
        }
        if pivot != col {
            for k in 0..n {
                m.swap([pivot, k], [col, k]);
            }
            rhs.swap(pivot, col);
        }
        let diag = m[[col, col]];
        for row in col + 1..n {
            let factor = m[[row, col]] / diag;
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                m[[row, k]] -= factor * m[[col, k]];
            }
            rhs[row] -= factor * rhs[col];
        }
    }
    let mut x = Array1::zeros(n);
    for row in (0..n).rev() {
        let mut acc = rhs[row];
        for k in row + 1..n {
            acc -= m[[row, k]] * x[k];
        }
        x[row] = acc / m[[row, row]];
    }
    Ok(x)
}

/// Least-squares solution of `a x ≈ b` via the normal equations.
pub fn least_squares(a: ArrayView2<f64>, b: ArrayView1<f64>) -> Result<Array1<f64>> {
    if a.nrows() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            got: b.len(),
        });
    }
    let at = a.t();
    let gram = at.dot(&a);
    let rhs = at.dot(&b);
    solve(gram, rhs)
}

/// Top-k principal directions of a set of already-centered row vectors.
///
/// Power iteration with deflation on whichever Gram matrix is smaller
/// (`X Xᵀ` when there are fewer rows than columns, `Xᵀ X` otherwise).
/// Directions are unit vectors in column space, returned with their
/// eigenvalues in descending order; the sign is fixed so the
/// largest-magnitude component is positive. Stops early if the matrix runs
/// out of variance before k directions are found.
pub fn principal_directions(
    x: ArrayView2<f64>,
    k: usize,
    rel_tol: f64,
) -> Vec<(f64, Array1<f64>)> {
    let (n, d) = (x.nrows(), x.ncols());
    if n == 0 || d == 0 || k == 0 {
        return Vec::new();
    }
    let use_gram = n < d;
    let mut m = if use_gram { x.dot(&x.t()) } else { x.t().dot(&x) };
    let scale0 = m.diag().sum();
    let mut out = Vec::with_capacity(k);
    for _ in 0..k {
        let Some((lambda, vec)) = power_iterate(&m, rel_tol) else {
            break;
        };
        if lambda <= 1e-12 * scale0.max(1e-300) {
            break;
        }
        let mut dir = if use_gram {
            // map the n-space eigenvector back into column space
            x.t().dot(&vec)
        } else {
            vec.clone()
        };
        let len = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        if len == 0.0 {
            break;
        }
        dir.mapv_inplace(|v| v / len);
        fix_sign(&mut dir);
        // deflate
        let outer_scale = lambda;
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                m[[i, j]] -= outer_scale * vec[i] * vec[j];
            }
        }
        out.push((lambda, dir));
    }
    out
}

fn power_iterate(m: &Array2<f64>, rel_tol: f64) -> Option<(f64, Array1<f64>)> {
    let n = m.nrows();
    let mut v = Array1::from_iter((0..n).map(|i| (0.7 + i as f64).sin()));
    let len = v.dot(&v).sqrt();
    v.mapv_inplace(|x| x / len);
    let mut lambda = 0.0_f64;
    for _ in 0..100_000 {
        let mut w = m.dot(&v);
        let next = v.dot(&w);
        let wlen = w.dot(&w).sqrt();
        if wlen == 0.0 {
            return None;
        }
        w.mapv_inplace(|x| x / wlen);
        // convergence on the unit eigenvector itself, not the eigenvalue:
        // the eigenvalue settles long before the direction does when the
        // spectral gap is small
        let drift = (&w - &v).iter().map(|x| x * x).sum::<f64>().sqrt();
        lambda = next;
        v = w;
        if drift <= rel_tol {
            return Some((lambda, v));
        }
    }
    Some((lambda, v))
}

fn fix_sign(dir: &mut Array1<f64>) {
    let lead = dir
        .iter()
        .cloned()
        .max_by(|a, b| a.abs().total_cmp(&b.abs()))
        .unwrap_or(0.0);
    if lead < 0.0 {
        dir.mapv_inplace(|v| -v);
    }
}
