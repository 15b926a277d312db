//! Lie algebras given by structure constants.
//!
//! The bracket of basis elements is `[e_i, e_j] = sum_k c[i][j][k] e_k`.
//! Vectors live in the algebra basis, covectors in the dual basis with
//! `<f, e_i> = f[i]`.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::subspace::Subspace;
use crate::tolerance::Tolerances;

/// Square matrix acting on vector or covector coordinates.
pub type Operator = DMatrix<f64>;

/// Element of the algebra in basis coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector(pub DVector<f64>);

/// Element of the dual space in dual-basis coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Covector(pub DVector<f64>);

impl Vector {
    pub fn new(coords: Vec<f64>) -> Self {
        Vector(DVector::from_vec(coords))
    }

    pub fn basis(n: usize, i: usize) -> Self {
        let mut v = DVector::zeros(n);
        v[i] = 1.0;
        Vector(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.0
    }
}

impl Covector {
    pub fn new(coords: Vec<f64>) -> Self {
        Covector(DVector::from_vec(coords))
    }

    pub fn zero(n: usize) -> Self {
        Covector(DVector::zeros(n))
    }

    pub fn dual_basis(n: usize, i: usize) -> Self {
        let mut v = DVector::zeros(n);
        v[i] = 1.0;
        Covector(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn pair(&self, x: &DVector<f64>) -> f64 {
        self.0.dot(x)
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.0.iter().cloned().collect()
    }
}

/// A structure constant as it appears in JSON: a number or an exact decimal
/// (or `p/q` rational) string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coefficient {
    Number(f64),
    Text(String),
}

impl Coefficient {
    pub fn value(&self) -> Result<f64> {
        match self {
            Coefficient::Number(x) => Ok(*x),
            Coefficient::Text(s) => parse_decimal(s),
        }
    }
}

fn parse_decimal(s: &str) -> Result<f64> {
    let t = s.trim();
    let bad = || Error::Parse(format!("invalid structure constant '{s}'"));
    if let Some((num, den)) = t.split_once('/') {
        let num: f64 = num.trim().parse().map_err(|_| bad())?;
        let den: f64 = den.trim().parse().map_err(|_| bad())?;
        if den == 0.0 {
            return Err(bad());
        }
        return Ok(num / den);
    }
    let v: f64 = t.parse().map_err(|_| bad())?;
    if !v.is_finite() {
        return Err(bad());
    }
    Ok(v)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub k: usize,
    pub c: Coefficient,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BracketEntry {
    pub i: usize,
    pub j: usize,
    pub terms: Vec<Term>,
}

/// The algebra JSON format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgebraTable {
    pub name: String,
    pub dim: usize,
    pub basis: Vec<String>,
    pub brackets: Vec<BracketEntry>,
}

impl AlgebraTable {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// A validated finite-dimensional real Lie algebra.
#[derive(Clone, PartialEq)]
pub struct LieAlgebra {
    name: String,
    basis: Vec<String>,
    dim: usize,
    constants: Vec<f64>,
    nonzero: Vec<(usize, usize, usize, f64)>,
    jacobi_residual: f64,
    scale: f64,
}

impl fmt::Debug for LieAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LieAlgebra")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("basis", &self.basis)
            .field("nonzero_constants", &self.nonzero.len())
            .finish()
    }
}

/// Parses and validates a structure-constant table.
pub fn validate_algebra(table: &AlgebraTable, tol: &Tolerances) -> Result<LieAlgebra> {
    let n = table.dim;
    if n == 0 {
        return Err(Error::InvalidInput("dimension must be positive".into()));
    }
    if table.basis.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: table.basis.len(),
        });
    }
    // Each unordered pair gets one implied row c[min][max][*]; every entry
    // mentioning the pair must agree with it.
    let mut rows: Vec<Option<Vec<f64>>> = vec![None; n * n];
    for entry in &table.brackets {
        for (idx, label) in [(entry.i, "i"), (entry.j, "j")] {
            if idx >= n {
                return Err(Error::IndexOutOfRange {
                    index: idx,
                    dim: n,
                    context: format!("bracket index {label}"),
                });
            }
        }
        let mut row = vec![0.0; n];
        for term in &entry.terms {
            if term.k >= n {
                return Err(Error::IndexOutOfRange {
                    index: term.k,
                    dim: n,
                    context: format!("term of bracket ({}, {})", entry.i, entry.j),
                });
            }
            row[term.k] += term.c.value()?;
        }
        if entry.i == entry.j {
            if row.iter().any(|&v| v != 0.0) {
                return Err(Error::AntisymmetryViolation {
                    i: entry.i,
                    j: entry.j,
                });
            }
            continue;
        }
        let (lo, hi) = if entry.i < entry.j {
            (entry.i, entry.j)
        } else {
            for v in row.iter_mut() {
                *v = -*v;
            }
            (entry.j, entry.i)
        };
        let slot = &mut rows[lo * n + hi];
        match slot {
            Some(existing) if *existing != row => {
                return Err(Error::AntisymmetryViolation {
                    i: entry.i,
                    j: entry.j,
                })
            }
            Some(_) => {}
            None => *slot = Some(row),
        }
    }
    let mut constants = vec![0.0; n * n * n];
    for lo in 0..n {
        for hi in lo + 1..n {
            if let Some(row) = &rows[lo * n + hi] {
                for (k, &v) in row.iter().enumerate() {
                    constants[(lo * n + hi) * n + k] = v;
                    constants[(hi * n + lo) * n + k] = -v;
                }
            }
        }
    }
    LieAlgebra::from_dense(table.name.clone(), table.basis.clone(), constants, tol)
}

impl LieAlgebra {
    /// Builds an algebra from dense constants `c[(i*n + j)*n + k]`, checking
    /// antisymmetry and the Jacobi identity.
    pub fn from_dense(
        name: String,
        basis: Vec<String>,
        constants: Vec<f64>,
        tol: &Tolerances,
    ) -> Result<LieAlgebra> {
        let n = basis.len();
        if n == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        if constants.len() != n * n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n * n,
                found: constants.len(),
            });
        }
        let scale = constants.iter().fold(0.0f64, |a, c| a.max(c.abs()));
        let anti_tol = tol.jacobi_threshold(scale);
        for i in 0..n {
            for j in i..n {
                for k in 0..n {
                    let a = constants[(i * n + j) * n + k];
                    let b = constants[(j * n + i) * n + k];
                    if (a + b).abs() > anti_tol || (i == j && a.abs() > anti_tol) {
                        return Err(Error::AntisymmetryViolation { i, j });
                    }
                }
            }
        }
        let nonzero = constants
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0.0)
            .map(|(idx, &c)| (idx / (n * n), (idx / n) % n, idx % n, c))
            .collect();
        let mut algebra = LieAlgebra {
            name,
            basis,
            dim: n,
            constants,
            nonzero,
            jacobi_residual: 0.0,
            scale,
        };
        let (triple, residual) = algebra.worst_jacobi_triple();
        let norm = residual.iter().fold(0.0f64, |a, r| a.max(r.abs()));
        let threshold = tol.jacobi_threshold(scale);
        if norm > threshold {
            return Err(Error::JacobiViolation {
                triple,
                residual,
                norm,
                tolerance: threshold,
            });
        }
        algebra.jacobi_residual = norm;
        Ok(algebra)
    }

    /// Abelian algebra of dimension `n` with basis `x0..`.
    pub fn abelian(n: usize) -> LieAlgebra {
        let basis = (0..n).map(|i| format!("x{i}")).collect();
        LieAlgebra::from_dense(format!("abelian{n}"), basis, vec![0.0; n * n * n], &Tolerances::default())
            .expect("abelian algebra is valid")
    }

    /// Cyclic sums over all triples i <= j <= k; returns the triple with the
    /// largest residual max-norm and its residual vector.
    fn worst_jacobi_triple(&self) -> ((usize, usize, usize), Vec<f64>) {
        let n = self.dim;
        let mut worst = ((0, 0, 0), vec![0.0; n]);
        let mut worst_norm = -1.0;
        for i in 0..n {
            for j in i..n {
                for k in j..n {
                    let r = self.jacobi_residual_vector(i, j, k);
                    let nrm = r.iter().fold(0.0f64, |a, x| a.max(x.abs()));
                    if nrm > worst_norm {
                        worst_norm = nrm;
                        worst = ((i, j, k), r);
                    }
                }
            }
        }
        worst
    }

    /// `[[e_i,e_j],e_k] + [[e_j,e_k],e_i] + [[e_k,e_i],e_j]` in coordinates.
    pub fn jacobi_residual_vector(&self, i: usize, j: usize, k: usize) -> Vec<f64> {
        let n = self.dim;
        let mut out = vec![0.0; n];
        for (a, b, c) in [(i, j, k), (j, k, i), (k, i, j)] {
            for m in 0..n {
                let cab = self.c(a, b, m);
                if cab == 0.0 {
                    continue;
                }
                for (l, o) in out.iter_mut().enumerate() {
                    *o += cab * self.c(m, c, l);
                }
            }
        }
        out
    }

    #[inline]
    pub fn c(&self, i: usize, j: usize, k: usize) -> f64 {
        self.constants[(i * self.dim + j) * self.dim + k]
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn basis_labels(&self) -> &[String] {
        &self.basis
    }

    pub fn jacobi_residual(&self) -> f64 {
        self.jacobi_residual
    }

    /// Largest absolute structure constant; zero for abelian algebras.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Nonzero structure constants as `(i, j, k, c)`.
    pub fn nonzero_constants(&self) -> &[(usize, usize, usize, f64)] {
        &self.nonzero
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_basis_labels(mut self, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), self.dim);
        self.basis = labels;
        self
    }

    pub fn is_abelian(&self) -> bool {
        self.nonzero.is_empty()
    }

    fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found,
            });
        }
        Ok(())
    }

    pub fn bracket(&self, x: &Vector, y: &Vector) -> Result<Vector> {
        self.check_dim(x.dim())?;
        self.check_dim(y.dim())?;
        Ok(Vector(self.bracket_coords(&x.0, &y.0)))
    }

    pub(crate) fn bracket_coords(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let mut z = DVector::zeros(self.dim);
        for &(i, j, k, c) in &self.nonzero {
            z[k] += c * x[i] * y[j];
        }
        z
    }

    /// Matrix of `y -> [x, y]`.
    pub fn ad(&self, x: &Vector) -> Result<Operator> {
        self.check_dim(x.dim())?;
        Ok(self.ad_coords(&x.0))
    }

    pub(crate) fn ad_coords(&self, x: &DVector<f64>) -> Operator {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for &(i, j, k, c) in &self.nonzero {
            m[(k, j)] += c * x[i];
        }
        m
    }

    /// Infinitesimal coadjoint operator `-ad(x)^T`, so that
    /// `<coad(x) f, y> = -<f, [x, y]>`.
    pub fn coad(&self, x: &Vector) -> Result<Operator> {
        Ok(-self.ad(x)?.transpose())
    }

    pub(crate) fn coad_coords(&self, x: &DVector<f64>) -> Operator {
        -self.ad_coords(x).transpose()
    }

    /// Span of all brackets of basis columns of `a` with basis columns of `b`.
    pub fn bracket_subspaces(&self, a: &Subspace, b: &Subspace, tol: &Tolerances) -> Result<Subspace> {
        self.check_dim(a.ambient())?;
        self.check_dim(b.ambient())?;
        let mut span = DMatrix::zeros(self.dim, a.dim() * b.dim());
        let mut col = 0;
        for p in 0..a.dim() {
            let x = a.basis().column(p).clone_owned();
            for q in 0..b.dim() {
                let y = b.basis().column(q).clone_owned();
                span.set_column(col, &self.bracket_coords(&x, &y));
                col += 1;
            }
        }
        Ok(Subspace::from_span(&span, self.scale, tol))
    }

    pub fn derived_algebra(&self, tol: &Tolerances) -> Subspace {
        let full = Subspace::full(self.dim);
        self.bracket_subspaces(&full, &full, tol)
            .expect("full subspaces share the ambient space")
    }

    /// `g ⊇ [g,g] ⊇ [[g,g],[g,g]] ⊇ ...`, stopping once a term repeats or
    /// reaches zero.
    pub fn derived_series(&self, tol: &Tolerances) -> Vec<Subspace> {
        let mut chain = vec![Subspace::full(self.dim)];
        loop {
            let cur = chain.last().expect("chain is nonempty");
            if cur.is_zero() {
                break;
            }
            let next = self
                .bracket_subspaces(cur, cur, tol)
                .expect("same ambient space");
            if next.dim() >= cur.dim() {
                break;
            }
            chain.push(next);
        }
        chain
    }

    /// Largest residual of `[e_i, v]` outside the subspace, over basis
    /// vectors `e_i` and basis columns `v`.
    pub fn ideal_residual(&self, ideal: &Subspace) -> Result<f64> {
        self.check_dim(ideal.ambient())?;
        let mut worst = 0.0f64;
        for c in 0..ideal.dim() {
            let v = ideal.basis().column(c).clone_owned();
            let adv = self.ad_coords(&v);
            for i in 0..self.dim {
                // [e_i, v] = -[v, e_i]
                let w = -adv.column(i).clone_owned();
                worst = worst.max(ideal.residual(&w));
            }
        }
        Ok(worst)
    }

    pub fn is_ideal(&self, sub: &Subspace, tol: &Tolerances) -> Result<bool> {
        Ok(self.ideal_residual(sub)? <= tol.num * self.scale.max(1.0))
    }

    /// Quotient by an ideal, realised on the orthogonal complement of the
    /// ideal.
    pub fn quotient(&self, ideal: &Subspace, tol: &Tolerances) -> Result<Quotient> {
        let residual = self.ideal_residual(ideal)?;
        if residual > tol.num * self.scale.max(1.0) {
            return Err(Error::NotAnIdeal { residual });
        }
        let complement = ideal.orthogonal_complement(tol);
        let q = complement.basis().clone();
        let m = q.ncols();
        let mut constants = vec![0.0; m * m * m];
        let clean = 1e-14 * self.scale.max(1.0);
        for a in 0..m {
            let x = q.column(a).clone_owned();
            for b in 0..m {
                let y = q.column(b).clone_owned();
                let coords = q.transpose() * self.bracket_coords(&x, &y);
                for (c, &v) in coords.iter().enumerate() {
                    constants[(a * m + b) * m + c] = if v.abs() < clean { 0.0 } else { v };
                }
            }
        }
        // restore exact antisymmetry after cleaning
        for a in 0..m {
            for b in a..m {
                for c in 0..m {
                    let v = 0.5 * (constants[(a * m + b) * m + c] - constants[(b * m + a) * m + c]);
                    constants[(a * m + b) * m + c] = v;
                    constants[(b * m + a) * m + c] = -v;
                }
            }
        }
        let labels = (0..m).map(|a| self.column_label(&q, a)).collect();
        let name = format!("{}/ideal{}", self.name, ideal.dim());
        let algebra = if m == 0 {
            None
        } else {
            Some(LieAlgebra::from_dense(name, labels, constants, tol)?)
        };
        Ok(Quotient {
            algebra,
            projection: q.transpose(),
            section: q,
        })
    }

    fn column_label(&self, q: &DMatrix<f64>, a: usize) -> String {
        let col = q.column(a);
        for (k, label) in self.basis.iter().enumerate() {
            if (col[k].abs() - 1.0).abs() < 1e-12 {
                return if col[k] > 0.0 {
                    label.clone()
                } else {
                    format!("-{label}")
                };
            }
        }
        format!("q{a}")
    }

    /// Serializes back to the JSON table format (entries with i < j only).
    pub fn to_table(&self) -> AlgebraTable {
        let n = self.dim;
        let mut brackets = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let terms: Vec<Term> = (0..n)
                    .filter(|&k| self.c(i, j, k) != 0.0)
                    .map(|k| Term {
                        k,
                        c: Coefficient::Number(self.c(i, j, k)),
                    })
                    .collect();
                if !terms.is_empty() {
                    brackets.push(BracketEntry { i, j, terms });
                }
            }
        }
        AlgebraTable {
            name: self.name.clone(),
            dim: n,
            basis: self.basis.clone(),
            brackets,
        }
    }
}

/// Result of [`LieAlgebra::quotient`].
///
/// `projection` is the m×n map from algebra coordinates to quotient
/// coordinates (kernel = the ideal); `section` is its n×m right inverse whose
/// columns are the complement basis. `algebra` is `None` when the ideal is
/// the whole algebra.
#[derive(Debug, Clone)]
pub struct Quotient {
    pub algebra: Option<LieAlgebra>,
    pub projection: DMatrix<f64>,
    pub section: DMatrix<f64>,
}

impl Quotient {
    pub fn dim(&self) -> usize {
        self.section.ncols()
    }
}

/// True iff the restriction of `f` to `s` has norm at most `tol.num * ||f||`.
pub fn annihilates(f: &Covector, s: &Subspace, tol: &Tolerances) -> Result<bool> {
    if f.dim() != s.ambient() {
        return Err(Error::DimensionMismatch {
            expected: s.ambient(),
            found: f.dim(),
        });
    }
    Ok(pairing_residual(f, s) <= tol.num * f.norm())
}

/// Norm of the restriction of `f` to `s`, measured in an orthonormal basis.
pub fn pairing_residual(f: &Covector, s: &Subspace) -> f64 {
    (s.basis().transpose() * &f.0).norm()
}
