use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{numerical_rank, pivoted_orthonormal_basis};
use crate::tolerance::Tolerances;

/// A linear subspace of R^n stored as an n×m matrix with orthonormal columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    basis: DMatrix<f64>,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace {
            basis: DMatrix::zeros(ambient, 0),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace {
            basis: DMatrix::identity(ambient, ambient),
        }
    }

    /// Wraps a matrix whose columns are already orthonormal.
    pub fn from_orthonormal(basis: DMatrix<f64>) -> Self {
        Subspace { basis }
    }

    /// Orthonormal basis of the column span of `span`.
    ///
    /// The rank is decided by singular values against
    /// `tol.rank_threshold(max(sigma_max, scale), n)`; `scale` is the natural
    /// magnitude of the columns and keeps pure round-off from being promoted
    /// to rank when every column is tiny.
    pub fn from_span(span: &DMatrix<f64>, scale: f64, tol: &Tolerances) -> Self {
        let n = span.nrows();
        if span.ncols() == 0 {
            return Subspace::zero(n);
        }
        let singular_values: Vec<f64> = span.singular_values().iter().cloned().collect();
        let sigma_max = singular_values.iter().cloned().fold(0.0, f64::max);
        let threshold = tol.rank_threshold(sigma_max.max(scale), n);
        let rank = numerical_rank(&singular_values, threshold).min(n);
        Subspace {
            basis: pivoted_orthonormal_basis(span, rank),
        }
    }

    /// Subspace spanned by the given coordinate vectors.
    pub fn from_vectors(ambient: usize, vectors: &[DVector<f64>], tol: &Tolerances) -> Self {
        let mut m = DMatrix::zeros(ambient, vectors.len());
        for (c, v) in vectors.iter().enumerate() {
            m.set_column(c, v);
        }
        let scale = vectors.iter().map(|v| v.norm()).fold(0.0, f64::max);
        Subspace::from_span(&m, scale, tol)
    }

    pub fn ambient(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn projector(&self) -> DMatrix<f64> {
        &self.basis * self.basis.transpose()
    }

    pub fn project(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.basis * (self.basis.transpose() * v)
    }

    /// Norm of the component of `v` orthogonal to the subspace.
    pub fn residual(&self, v: &DVector<f64>) -> f64 {
        (v - self.project(v)).norm()
    }

    /// Largest residual of the other subspace's basis columns.
    pub fn containment_residual(&self, other: &Subspace) -> Result<f64> {
        self.check_ambient(other)?;
        Ok((0..other.dim())
            .map(|c| self.residual(&other.basis.column(c).clone_owned()))
            .fold(0.0, f64::max))
    }

    pub fn contains(&self, other: &Subspace, tol: &Tolerances) -> Result<bool> {
        Ok(self.containment_residual(other)? <= tol.num)
    }

    pub fn same_as(&self, other: &Subspace, tol: &Tolerances) -> Result<bool> {
        Ok(self.dim() == other.dim() && self.contains(other, tol)?)
    }

    pub fn sum(&self, other: &Subspace, tol: &Tolerances) -> Result<Subspace> {
        self.check_ambient(other)?;
        let n = self.ambient();
        let mut m = DMatrix::zeros(n, self.dim() + other.dim());
        m.view_mut((0, 0), (n, self.dim())).copy_from(&self.basis);
        m.view_mut((0, self.dim()), (n, other.dim()))
            .copy_from(&other.basis);
        Ok(Subspace::from_span(&m, 1.0, tol))
    }

    /// Euclidean orthogonal complement, with a basis chosen by pivoting over
    /// projected coordinate vectors.
    pub fn orthogonal_complement(&self, tol: &Tolerances) -> Subspace {
        let n = self.ambient();
        let p = DMatrix::identity(n, n) - self.projector();
        let mut c = Subspace::from_span(&p, 1.0, tol);
        if c.dim() + self.dim() != n {
            // rank decision on a projector is exact up to round-off
            c.basis = pivoted_orthonormal_basis(&p, n - self.dim());
        }
        c
    }

    /// Coordinates of the subspace's own basis expressed in another, larger
    /// orthonormal frame: returns `frame^T * basis`.
    pub fn coordinates_in(&self, frame: &DMatrix<f64>) -> DMatrix<f64> {
        frame.transpose() * &self.basis
    }

    /// Image under a linear map, re-orthonormalized.
    pub fn image(&self, map: &DMatrix<f64>, tol: &Tolerances) -> Subspace {
        let m = map * &self.basis;
        Subspace::from_span(&m, 1.0, tol)
    }

    fn check_ambient(&self, other: &Subspace) -> Result<()> {
        if self.ambient() != other.ambient() {
            return Err(Error::AmbientMismatch(self.ambient(), other.ambient()));
        }
        Ok(())
    }

    /// Basis columns as nested coordinate arrays (column lists).
    pub fn columns(&self) -> Vec<Vec<f64>> {
        (0..self.dim())
            .map(|c| self.basis.column(c).iter().cloned().collect())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn span_rank_and_orthonormality() {
        let tol = Tolerances::default();
        let m = DMatrix::from_column_slice(3, 3, &[1.0, 1.0, 0.0, 2.0, 2.0, 0.0, 0.0, 0.0, 3.0]);
        let s = Subspace::from_span(&m, 1.0, &tol);
        assert_eq!(s.dim(), 2);
        let g = s.basis().transpose() * s.basis();
        assert!((g - DMatrix::identity(2, 2)).norm() < 1e-14);
    }

    #[test]
    fn round_off_is_not_rank() {
        let tol = Tolerances::default();
        let m = DMatrix::from_column_slice(2, 1, &[1e-17, 0.0]);
        assert_eq!(Subspace::from_span(&m, 1.0, &tol).dim(), 0);
    }

    #[test]
    fn complement_and_containment() {
        let tol = Tolerances::default();
        let z = Subspace::from_vectors(3, &[DVector::from_vec(vec![0.0, 0.0, 1.0])], &tol);
        let c = z.orthogonal_complement(&tol);
        assert_eq!(c.dim(), 2);
        assert_eq!(c.basis().column(0).as_slice(), &[1.0, 0.0, 0.0]);
        let full = Subspace::full(3);
        assert!(full.contains(&z, &tol).unwrap());
        assert!(!z.contains(&c, &tol).unwrap());
        assert_eq!(z.sum(&c, &tol).unwrap().dim(), 3);
        assert!(z.contains(&Subspace::zero(3), &tol).unwrap());
    }

    #[test]
    fn ambient_mismatch_is_reported() {
        let tol = Tolerances::default();
        assert_eq!(
            Subspace::full(2).sum(&Subspace::full(3), &tol),
            Err(Error::AmbientMismatch(2, 3))
        );
    }
}
