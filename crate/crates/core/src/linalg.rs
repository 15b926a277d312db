//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};

/// Singular value decomposition with singular values sorted in decreasing
/// order and a full set of right singular vectors (columns of `v`).
pub struct SortedSvd {
    pub singular_values: Vec<f64>,
    pub v: DMatrix<f64>,
}

pub fn sorted_svd(a: &DMatrix<f64>) -> SortedSvd {
    let (m, n) = a.shape();
    if n == 0 {
        return SortedSvd {
            singular_values: vec![],
            v: DMatrix::zeros(0, 0),
        };
    }
    // Pad with zero rows so that the thin SVD returns all n right vectors.
    let padded = if m < n {
        let mut p = DMatrix::zeros(n, n);
        p.view_mut((0, 0), (m, n)).copy_from(a);
        p
    } else {
        a.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| svd.singular_values[y].total_cmp(&svd.singular_values[x]));
    let singular_values = order.iter().map(|&i| svd.singular_values[i]).collect();
    let mut v = DMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        for r in 0..n {
            v[(r, col)] = v_t[(i, r)];
        }
    }
    SortedSvd { singular_values, v }
}

pub fn max_singular_value(a: &DMatrix<f64>) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.singular_values().iter().cloned().fold(0.0, f64::max)
}

/// Number of singular values strictly above `threshold`.
pub fn numerical_rank(singular_values: &[f64], threshold: f64) -> usize {
    singular_values.iter().filter(|&&s| s > threshold).count()
}

/// The first singular value within a factor of ten of `threshold`, if any.
pub fn ambiguous_singular_value(singular_values: &[f64], threshold: f64) -> Option<f64> {
    singular_values
        .iter()
        .cloned()
        .find(|&s| s > threshold / 10.0 && s < threshold * 10.0)
}

/// Greedy column-pivoted modified Gram–Schmidt.
///
/// Picks `rank` columns of `span` in order of largest remaining residual
/// (ties go to the lowest index) and returns an orthonormal basis of their
/// span. Coordinate-aligned inputs give coordinate-aligned outputs.
pub fn pivoted_orthonormal_basis(span: &DMatrix<f64>, rank: usize) -> DMatrix<f64> {
    let n = span.nrows();
    let mut residual = span.clone();
    let mut basis = DMatrix::zeros(n, rank);
    let mut used = vec![false; span.ncols()];
    for b in 0..rank {
        let mut best = None;
        let mut best_norm = -1.0;
        for c in 0..residual.ncols() {
            if used[c] {
                continue;
            }
            let nrm = residual.column(c).norm();
            if nrm > best_norm * (1.0 + 1e-12) {
                best_norm = nrm;
                best = Some(c);
            }
        }
        let Some(c) = best else { break };
        used[c] = true;
        let mut q = residual.column(c).clone_owned();
        // second pass keeps orthogonality at machine precision
        for _ in 0..2 {
            for prev in 0..b {
                let p = basis.column(prev);
                let d = p.dot(&q);
                q.axpy(-d, &p, 1.0);
            }
        }
        let nrm = q.norm();
        if nrm == 0.0 {
            break;
        }
        q /= nrm;
        basis.set_column(b, &q);
        for other in 0..residual.ncols() {
            if !used[other] {
                let d = q.dot(&residual.column(other));
                let mut col = residual.column_mut(other);
                col.axpy(-d, &q, 1.0);
            }
        }
    }
    basis
}

/// Largest absolute entry.
pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

pub fn max_abs_vec(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// Least-squares solution of `a x = b` by SVD with a relative cutoff.
pub fn least_squares(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    if a.ncols() == 0 {
        return DVector::zeros(0);
    }
    let smax = max_singular_value(a);
    let eps = 1e-12 * smax.max(f64::MIN_POSITIVE);
    let svd = a.clone().svd(true, true);
    svd.solve(b, eps)
        .unwrap_or_else(|_| DVector::zeros(a.ncols()))
}

pub fn factorial(k: u32) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * i as f64)
}
