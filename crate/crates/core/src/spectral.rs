//! Real generalized-eigenspace decomposition of a square matrix.
//!
//! Eigenvalues come from the real Schur form and are grouped by single
//! linkage. Each real cluster `mu` of size `m` gets the real subspace
//! `ker (A - mu)^m`; each conjugate pair `a ± ib` of size `m` gets
//! `ker ((A - a)^2 + b^2)^m`. The spectral projector of a cluster is read off
//! the inverse of the stacked bases.

use nalgebra::{DMatrix, DVector};

use crate::linalg::{max_singular_value, sorted_svd};
use crate::structure::cluster_eigenvalues;

/// Relative clustering radii tried in order.
const CLUSTER_RADII: [f64; 3] = [1e-6, 1e-4, 1e-3];

#[derive(Debug, Clone)]
pub struct SpectralCluster {
    pub re: f64,
    /// Nonnegative imaginary part; zero for real clusters.
    pub im: f64,
    /// Algebraic multiplicity of one member of the (pair of) eigenvalue(s).
    pub multiplicity: usize,
    /// Orthonormal basis of the real generalized eigenspace.
    pub basis: DMatrix<f64>,
}

impl SpectralCluster {
    pub fn is_real(&self) -> bool {
        self.im == 0.0
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }
}

#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub clusters: Vec<SpectralCluster>,
    /// Absolute radius used to group eigenvalues; real parts below it are
    /// treated as zero.
    pub radius: f64,
    /// Rows split per cluster: the coordinates of a vector in the stacked
    /// generalized eigenbases.
    inverse: DMatrix<f64>,
    offsets: Vec<usize>,
}

impl SpectralDecomposition {
    /// Component of `v` in cluster `idx`.
    pub fn component(&self, idx: usize, v: &DVector<f64>) -> DVector<f64> {
        let c = &self.clusters[idx];
        let coords = self.inverse.rows(self.offsets[idx], c.dim()) * v;
        &c.basis * coords
    }

    pub fn projector(&self, idx: usize) -> DMatrix<f64> {
        let c = &self.clusters[idx];
        &c.basis * self.inverse.rows(self.offsets[idx], c.dim())
    }

    /// `q(A)` for the cluster: `A - re` or `(A - re)^2 + im^2`.
    pub fn annihilating_factor(&self, idx: usize, a: &DMatrix<f64>) -> DMatrix<f64> {
        let c = &self.clusters[idx];
        let n = a.nrows();
        let shifted = a - DMatrix::identity(n, n) * c.re;
        if c.is_real() {
            shifted
        } else {
            &shifted * &shifted + DMatrix::identity(n, n) * (c.im * c.im)
        }
    }
}

fn try_decompose(a: &DMatrix<f64>, values: &[(f64, f64)], radius: f64) -> Option<SpectralDecomposition> {
    let n = a.nrows();
    let anorm = max_singular_value(a).max(1e-300);
    let id = DMatrix::<f64>::identity(n, n);
    let mut clusters = Vec::new();
    for group in cluster_eigenvalues(values, radius) {
        let size = group.len();
        let re = group.iter().map(|&i| values[i].0).sum::<f64>() / size as f64;
        let im = group.iter().map(|&i| values[i].1).sum::<f64>() / size as f64;
        if im < -radius {
            continue;
        }
        let real = im.abs() <= radius;
        let shifted = a - &id * re;
        let factor = if real {
            shifted
        } else {
            &shifted * &shifted + &id * (im * im)
        };
        let mut power = id.clone();
        for _ in 0..size {
            power = &power * &factor;
        }
        let dim = if real { size } else { 2 * size };
        let svd = sorted_svd(&power);
        let basis = svd.v.columns(n - dim, dim).clone_owned();
        // invariance under A
        let leak = &basis * (basis.transpose() * (a * &basis)) - a * &basis;
        if leak.amax() > 1e-6 * anorm {
            return None;
        }
        clusters.push(SpectralCluster {
            re,
            im: if real { 0.0 } else { im },
            multiplicity: size,
            basis,
        });
    }
    let total: usize = clusters.iter().map(SpectralCluster::dim).sum();
    if total != n {
        return None;
    }
    let mut stacked = DMatrix::zeros(n, n);
    let mut offsets = Vec::with_capacity(clusters.len());
    let mut col = 0;
    for c in &clusters {
        offsets.push(col);
        stacked.view_mut((0, col), (n, c.dim())).copy_from(&c.basis);
        col += c.dim();
    }
    let sv = stacked.singular_values();
    let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    if smin <= 1e-8 * smax {
        return None;
    }
    let inverse = stacked.try_inverse()?;
    Some(SpectralDecomposition {
        clusters,
        radius,
        inverse,
        offsets,
    })
}

/// Generalized eigenspace decomposition, or `None` when no clustering radius
/// yields a well-conditioned splitting.
pub fn spectral_decomposition(a: &DMatrix<f64>) -> Option<SpectralDecomposition> {
    let n = a.nrows();
    if n == 0 || a.ncols() != n {
        return None;
    }
    let schur = a.clone().try_schur(1e-14, 10_000)?;
    let eig = schur.complex_eigenvalues();
    let values: Vec<(f64, f64)> = eig.iter().map(|z| (z.re, z.im)).collect();
    let rho = values.iter().map(|v| v.0.hypot(v.1)).fold(0.0, f64::max);
    CLUSTER_RADII
        .iter()
        .find_map(|r| try_decompose(a, &values, r * rho.max(1.0)))
}
