//! Killing form, solvable radical, simple-ideal splitting and the structure
//! report tying them together.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::algebra::{LieAlgebra, Quotient};
use crate::error::{Error, Result};
use crate::levi::{levi_factor, LeviFactor};
use crate::linalg::{ambiguous_singular_value, max_abs, numerical_rank, sorted_svd};
use crate::subspace::Subspace;
use crate::tolerance::Tolerances;

/// Seed for the pseudo-random centroid element.
pub const CENTROID_SEED: u64 = 0xC0AD;

/// Relative tolerance for grouping centroid eigenvalues.
const CENTROID_CLUSTER_TOL: f64 = 1e-6;

/// `B[i][j] = trace(ad(e_i) ad(e_j))`.
#[derive(Debug, Clone, PartialEq)]
pub struct KillingForm(pub DMatrix<f64>);

impl KillingForm {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn eval(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        x.dot(&(&self.0 * y))
    }

    /// Gram matrix of the form restricted to a subspace.
    pub fn restricted(&self, s: &Subspace) -> DMatrix<f64> {
        s.basis().transpose() * &self.0 * s.basis()
    }
}

pub fn killing_form(g: &LieAlgebra) -> KillingForm {
    let n = g.dim();
    let mut b = DMatrix::zeros(n, n);
    // trace(ad_i ad_j) = sum_{k,l} c[i][k][l] c[j][l][k]
    for &(i, k, l, c1) in g.nonzero_constants() {
        for j in 0..n {
            let c2 = g.c(j, l, k);
            if c2 != 0.0 {
                b[(i, j)] += c1 * c2;
            }
        }
    }
    KillingForm(b)
}

/// Absolute floor for rank decisions on Killing-form products.
fn killing_scale(g: &LieAlgebra) -> f64 {
    g.scale() * g.scale() * g.dim() as f64
}

/// Cartan's criterion: `B(g, [g,g]) = 0`, cross-checked against the derived
/// series reaching zero.
pub fn is_solvable(g: &LieAlgebra, tol: &Tolerances) -> Result<bool> {
    let b = killing_form(g);
    let derived = g.derived_algebra(tol);
    let cartan = max_abs(&(b.matrix() * derived.basis())) <= tol.num * killing_scale(g).max(1.0);
    let series = g.derived_series(tol);
    let by_series = series.last().map(Subspace::is_zero).unwrap_or(false);
    if cartan != by_series {
        return Err(Error::CriterionDisagreement {
            cartan,
            derived: by_series,
        });
    }
    Ok(cartan)
}

/// Solvable radical as the Killing-orthogonal complement of `[g,g]`.
pub fn radical(g: &LieAlgebra, tol: &Tolerances) -> Result<Subspace> {
    let n = g.dim();
    let derived = g.derived_algebra(tol);
    if derived.is_zero() {
        return Ok(Subspace::full(n));
    }
    let b = killing_form(g);
    let m = derived.basis().transpose() * b.matrix();
    let svd = sorted_svd(&m);
    let sigma_max = svd.singular_values.first().cloned().unwrap_or(0.0);
    let threshold = tol.rank_threshold(sigma_max.max(killing_scale(g)), n);
    if let Some(value) = ambiguous_singular_value(&svd.singular_values, threshold) {
        return Err(Error::RankAmbiguous {
            context: "radical".into(),
            value,
            threshold,
        });
    }
    let rank = numerical_rank(&svd.singular_values, threshold);
    let null = svd.v.columns(rank, n - rank).clone_owned();
    Ok(Subspace::from_span(&(&null * null.transpose()), 1.0, tol))
}

/// Ideal generated by one vector under repeated bracketing.
pub fn generated_ideal(s: &LieAlgebra, v: &DVector<f64>, tol: &Tolerances) -> Subspace {
    let n = s.dim();
    let mut cur = Subspace::from_vectors(n, &[v.clone()], tol);
    loop {
        let mut cols: Vec<DVector<f64>> = (0..cur.dim())
            .map(|c| cur.basis().column(c).clone_owned())
            .collect();
        for c in 0..cur.dim() {
            let w = cur.basis().column(c).clone_owned();
            let adw = s.ad_coords(&w);
            for i in 0..n {
                cols.push(adw.column(i).clone_owned());
            }
        }
        let mut span = DMatrix::zeros(n, cols.len());
        for (k, c) in cols.iter().enumerate() {
            span.set_column(k, c);
        }
        let next = Subspace::from_span(&span, 1.0, tol);
        if next.dim() <= cur.dim() {
            return cur;
        }
        cur = next;
    }
}

/// `{x in within : B(x, part) = 0}`.
fn killing_complement_within(
    b: &KillingForm,
    within: &Subspace,
    part: &Subspace,
    tol: &Tolerances,
) -> Subspace {
    let m = part.basis().transpose() * b.matrix() * within.basis();
    let svd = sorted_svd(&m);
    let sigma_max = svd.singular_values.first().cloned().unwrap_or(0.0);
    let rank = numerical_rank(&svd.singular_values, tol.rank_threshold(sigma_max, within.dim()));
    let null = svd.v.columns(rank, within.dim() - rank).clone_owned();
    Subspace::from_span(&(within.basis() * null), 1.0, tol)
}

/// Linear basis of the centroid `{T : T[x,y] = [Tx,y]}`.
fn centroid_basis(s: &LieAlgebra, tol: &Tolerances) -> Vec<DMatrix<f64>> {
    let n = s.dim();
    let mut a = DMatrix::zeros(n * n * n, n * n);
    let unknown = |r: usize, c: usize| r + c * n;
    for x in 0..n {
        for y in 0..n {
            for l in 0..n {
                let row = (x * n + y) * n + l;
                for k in 0..n {
                    let c = s.c(x, y, k);
                    if c != 0.0 {
                        a[(row, unknown(l, k))] += c;
                    }
                    let c2 = s.c(k, y, l);
                    if c2 != 0.0 {
                        a[(row, unknown(k, x))] -= c2;
                    }
                }
            }
        }
    }
    let svd = sorted_svd(&a);
    let sigma_max = svd.singular_values.first().cloned().unwrap_or(0.0);
    let rank = numerical_rank(&svd.singular_values, tol.rank_threshold(sigma_max, n * n));
    (rank..n * n)
        .map(|c| DMatrix::from_column_slice(n, n, svd.v.column(c).as_slice()))
        .collect()
}

/// Groups complex numbers by single linkage with the given absolute radius.
pub(crate) fn cluster_eigenvalues(values: &[(f64, f64)], radius: f64) -> Vec<Vec<usize>> {
    let k = values.len();
    let mut label: Vec<usize> = (0..k).collect();
    fn find(label: &mut Vec<usize>, i: usize) -> usize {
        let mut r = i;
        while label[r] != r {
            r = label[r];
        }
        label[i] = r;
        r
    }
    for i in 0..k {
        for j in i + 1..k {
            let d = ((values[i].0 - values[j].0).powi(2) + (values[i].1 - values[j].1).powi(2)).sqrt();
            if d <= radius {
                let (ri, rj) = (find(&mut label, i), find(&mut label, j));
                if ri != rj {
                    label[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_of: Vec<Option<usize>> = vec![None; k];
    for i in 0..k {
        let r = find(&mut label, i);
        match root_of[r] {
            Some(g) => groups[g].push(i),
            None => {
                root_of[r] = Some(groups.len());
                groups.push(vec![i]);
            }
        }
    }
    groups
}

/// Real invariant subspaces of a random centroid element, one per eigenvalue
/// cluster (a conjugate pair counts once).
fn centroid_components(s: &LieAlgebra, tol: &Tolerances) -> Option<Vec<Subspace>> {
    let n = s.dim();
    let basis = centroid_basis(s, tol);
    if basis.is_empty() {
        return None;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(CENTROID_SEED);
    let mut t = DMatrix::zeros(n, n);
    for m in &basis {
        let w: f64 = StandardNormal.sample(&mut rng);
        t += m * w;
    }
    let eig = t.clone().complex_eigenvalues();
    let values: Vec<(f64, f64)> = eig.iter().map(|z| (z.re, z.im)).collect();
    let spread = values.iter().map(|v| v.0.hypot(v.1)).fold(0.0, f64::max).max(1e-300);
    let radius = CENTROID_CLUSTER_TOL * spread;
    let mut components = Vec::new();
    for group in cluster_eigenvalues(&values, radius) {
        let re = group.iter().map(|&i| values[i].0).sum::<f64>() / group.len() as f64;
        let im = group.iter().map(|&i| values[i].1).sum::<f64>() / group.len() as f64;
        if im < -radius {
            continue;
        }
        let id = DMatrix::identity(n, n);
        let (q, dim) = if im.abs() <= radius {
            (&t - &id * re, group.len())
        } else {
            let shifted = &t - &id * re;
            (&shifted * &shifted + &id * (im * im), 2 * group.len())
        };
        let svd = sorted_svd(&q);
        let null = svd.v.columns(n - dim, dim).clone_owned();
        let sub = Subspace::from_span(&(&null * null.transpose()), 1.0, tol);
        if sub.dim() != dim {
            return None;
        }
        components.push(sub);
    }
    Some(components)
}

/// Splits an ideal until every basis column generates the whole component.
fn refine_to_minimal(
    s: &LieAlgebra,
    b: &KillingForm,
    start: Vec<Subspace>,
    tol: &Tolerances,
) -> Result<Vec<Subspace>> {
    let mut work = start;
    let mut done = Vec::new();
    while let Some(c) = work.pop() {
        let mut split = None;
        for col in 0..c.dim() {
            let ideal = generated_ideal(s, &c.basis().column(col).clone_owned(), tol);
            if ideal.dim() < c.dim() {
                split = Some(ideal);
                break;
            }
        }
        match split {
            None => done.push(c),
            Some(part) => {
                let rest = killing_complement_within(b, &c, &part, tol);
                if part.dim() + rest.dim() != c.dim() || part.is_zero() {
                    return Err(Error::DecompositionFailed(format!(
                        "component of dimension {} split into {} + {}",
                        c.dim(),
                        part.dim(),
                        rest.dim()
                    )));
                }
                work.push(part);
                work.push(rest);
            }
        }
    }
    Ok(done)
}

fn leading_index(s: &Subspace) -> usize {
    let p = s.projector();
    (0..s.ambient()).find(|&k| p[(k, k)] > 1e-6).unwrap_or(usize::MAX)
}

fn decomposition_is_consistent(
    s: &LieAlgebra,
    b: &KillingForm,
    parts: &[Subspace],
    tol: &Tolerances,
) -> bool {
    let total: usize = parts.iter().map(Subspace::dim).sum();
    if total != s.dim() || parts.iter().any(Subspace::is_zero) {
        return false;
    }
    if !parts.iter().all(|p| s.is_ideal(p, tol).unwrap_or(false)) {
        return false;
    }
    pairwise_residuals(s, b, parts).0 <= tol.num * s.scale().max(1.0) * 10.0
}

/// Largest commutator and Killing cross term between distinct components.
pub fn pairwise_residuals(s: &LieAlgebra, b: &KillingForm, parts: &[Subspace]) -> (f64, f64) {
    let mut comm = 0.0f64;
    let mut cross = 0.0f64;
    for (i, p) in parts.iter().enumerate() {
        for q in parts.iter().skip(i + 1) {
            cross = cross.max(max_abs(&(p.basis().transpose() * b.matrix() * q.basis())));
            for a in 0..p.dim() {
                let x = p.basis().column(a).clone_owned();
                for c in 0..q.dim() {
                    let y = q.basis().column(c).clone_owned();
                    comm = comm.max(s.bracket_coords(&x, &y).amax());
                }
            }
        }
    }
    (comm, cross)
}

/// Splits a semisimple algebra into its simple ideals.
pub fn simple_ideal_decomposition(s: &LieAlgebra, tol: &Tolerances) -> Result<Vec<Subspace>> {
    let b = killing_form(s);
    let mut parts = match centroid_components(s, tol) {
        Some(start) if decomposition_is_consistent(s, &b, &start, tol) => {
            refine_to_minimal(s, &b, start, tol)?
        }
        _ => refine_to_minimal(s, &b, vec![Subspace::full(s.dim())], tol)?,
    };
    if !decomposition_is_consistent(s, &b, &parts, tol) {
        return Err(Error::DecompositionFailed(
            "components are not commuting Killing-orthogonal ideals".into(),
        ));
    }
    parts.sort_by_key(leading_index);
    Ok(parts
        .into_iter()
        .map(|p| Subspace::from_span(&p.projector(), 1.0, tol))
        .collect())
}

/// Killing form negative definite on the ideal.
pub fn is_compact_type(s: &LieAlgebra, ideal: &Subspace, tol: &Tolerances) -> Result<bool> {
    if ideal.ambient() != s.dim() {
        return Err(Error::DimensionMismatch {
            expected: s.dim(),
            found: ideal.ambient(),
        });
    }
    if ideal.is_zero() {
        return Ok(true);
    }
    let restricted = killing_form(s).restricted(ideal);
    let eig = SymmetricEigen::new(restricted);
    let largest = eig.eigenvalues.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let spread = eig.eigenvalues.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let threshold = tol.rank_threshold(spread.max(killing_scale(s)), ideal.dim());
    if largest.abs() <= threshold {
        return Err(Error::IndefiniteBorderline { eigenvalue: largest });
    }
    Ok(largest < 0.0)
}

#[derive(Debug, Clone)]
pub struct SimpleIdeal {
    /// Subspace of the semisimple quotient.
    pub subspace: Subspace,
    pub compact: bool,
}

#[derive(Debug, Clone, Default)]
pub struct Diagnostics {
    pub jacobi: f64,
    pub killing_symmetry: f64,
    pub radical_ideal: f64,
    pub semisimple_min_singular: Option<f64>,
    pub ideal_commutator: f64,
    pub ideal_killing_cross: f64,
    pub gn_ideal: f64,
    pub levi: Option<f64>,
    pub levi_error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct StructureReport {
    pub derived: Subspace,
    pub radical: Subspace,
    /// `s = g / r`; its `algebra` is `None` when `g` is solvable.
    pub semisimple: Quotient,
    pub simple_ideals: Vec<SimpleIdeal>,
    /// Compact and non-compact parts, as subspaces of `s`.
    pub s_compact: Subspace,
    pub s_noncompact: Subspace,
    /// Ideal of `g` projecting onto the non-compact part.
    pub gn: Subspace,
    pub levi: Option<LeviFactor>,
    pub diagnostics: Diagnostics,
}

impl StructureReport {
    pub fn semisimple_dim(&self) -> usize {
        self.semisimple.dim()
    }

    pub fn compact_count(&self) -> usize {
        self.simple_ideals.iter().filter(|i| i.compact).count()
    }

    pub fn noncompact_count(&self) -> usize {
        self.simple_ideals.len() - self.compact_count()
    }
}

pub fn structure_report(g: &LieAlgebra, tol: &Tolerances) -> Result<StructureReport> {
    let n = g.dim();
    let b = killing_form(g);
    let derived = g.derived_algebra(tol);
    let radical = radical(g, tol)?;
    let semisimple = g.quotient(&radical, tol)?;
    let mut diagnostics = Diagnostics {
        jacobi: g.jacobi_residual(),
        killing_symmetry: max_abs(&(b.matrix() - b.matrix().transpose())),
        radical_ideal: g.ideal_residual(&radical)?,
        ..Diagnostics::default()
    };

    let mut simple_ideals = Vec::new();
    let m = semisimple.dim();
    let (s_compact, s_noncompact) = match &semisimple.algebra {
        None => (Subspace::zero(0), Subspace::zero(0)),
        Some(s) => {
            let bs = killing_form(s);
            let sv = bs.matrix().singular_values();
            let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
            let smax = sv.iter().cloned().fold(0.0, f64::max);
            let threshold = tol.rank_threshold(smax.max(killing_scale(s)), m);
            diagnostics.semisimple_min_singular = Some(smin);
            if smin <= threshold {
                return Err(Error::RankAmbiguous {
                    context: "Killing form of the semisimple quotient".into(),
                    value: smin,
                    threshold,
                });
            }
            let parts = simple_ideal_decomposition(s, tol)?;
            let (comm, cross) = pairwise_residuals(s, &bs, &parts);
            diagnostics.ideal_commutator = comm;
            diagnostics.ideal_killing_cross = cross;
            let mut compact_cols = Vec::new();
            let mut noncompact_cols = Vec::new();
            for p in parts {
                let compact = is_compact_type(s, &p, tol)?;
                let cols = if compact { &mut compact_cols } else { &mut noncompact_cols };
                for c in 0..p.dim() {
                    cols.push(p.basis().column(c).clone_owned());
                }
                simple_ideals.push(SimpleIdeal { subspace: p, compact });
            }
            (
                Subspace::from_vectors(m, &compact_cols, tol),
                Subspace::from_vectors(m, &noncompact_cols, tol),
            )
        }
    };

    let lifted = &semisimple.section * s_noncompact.basis();
    let mut span = DMatrix::zeros(n, radical.dim() + lifted.ncols());
    span.view_mut((0, 0), (n, radical.dim())).copy_from(radical.basis());
    span.view_mut((0, radical.dim()), (n, lifted.ncols())).copy_from(&lifted);
    let gn = Subspace::from_span(&span, 1.0, tol);
    diagnostics.gn_ideal = g.ideal_residual(&gn)?;

    let levi = match levi_factor(g, &radical, &semisimple, &s_compact, &s_noncompact, tol) {
        Ok(l) => {
            diagnostics.levi = Some(l.residual);
            Some(l)
        }
        Err(e) => {
            diagnostics.levi_error = Some(e.to_string());
            None
        }
    };

    Ok(StructureReport {
        derived,
        radical,
        semisimple,
        simple_ideals,
        s_compact,
        s_noncompact,
        gn,
        levi,
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn alg(name: &str) -> LieAlgebra {
        catalog::algebra(name).unwrap()
    }

    /// Oracle: trace of explicit ad products.
    fn killing_by_traces(g: &LieAlgebra) -> DMatrix<f64> {
        let n = g.dim();
        let ads: Vec<DMatrix<f64>> = (0..n)
            .map(|i| g.ad(&crate::algebra::Vector::basis(n, i)).unwrap())
            .collect();
        DMatrix::from_fn(n, n, |i, j| (&ads[i] * &ads[j]).trace())
    }

    #[test]
    fn killing_form_examples() {
        let sl2 = killing_form(&alg("sl2R"));
        assert_eq!(
            sl2.matrix(),
            &DMatrix::from_row_slice(3, 3, &[8.0, 0.0, 0.0, 0.0, 0.0, 4.0, 0.0, 4.0, 0.0])
        );
        assert_eq!(killing_form(&alg("su2")).matrix(), &(DMatrix::identity(3, 3) * -2.0));
        assert_eq!(killing_form(&alg("heisenberg3")).matrix(), &DMatrix::zeros(3, 3));
        for name in catalog::names() {
            let g = alg(name);
            assert_eq!(killing_form(&g).matrix(), &killing_by_traces(&g), "{name}");
        }
    }

    #[test]
    fn solvability_examples() {
        let tol = Tolerances::default();
        assert!(is_solvable(&alg("heisenberg3"), &tol).unwrap());
        assert!(is_solvable(&alg("aff1"), &tol).unwrap());
        assert_eq!(killing_form(&alg("aff1")).matrix(), &DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]));
        assert!(!is_solvable(&alg("su2"), &tol).unwrap());
    }

    #[test]
    fn radical_examples() {
        let tol = Tolerances::default();
        assert_eq!(radical(&alg("sl2R"), &tol).unwrap().dim(), 0);
        let r = radical(&alg("se3"), &tol).unwrap();
        assert_eq!(r.dim(), 3);
        assert_eq!(r.basis(), &DMatrix::identity(6, 6).columns(3, 3).clone_owned());
        for name in ["heisenberg3", "aff1", "se2", "osc4", "abelian2"] {
            let g = alg(name);
            assert_eq!(radical(&g, &tol).unwrap().dim(), g.dim(), "{name}");
        }
    }

    #[test]
    fn simple_ideals_of_direct_sums() {
        let tol = Tolerances::default();
        let s = alg("su2+sl2R");
        let parts = simple_ideal_decomposition(&s, &tol).unwrap();
        assert_eq!(parts.len(), 2);
        let id = DMatrix::<f64>::identity(6, 6);
        assert!((parts[0].basis() - id.columns(0, 3)).amax() < 1e-12);
        assert!((parts[1].basis() - id.columns(3, 3)).amax() < 1e-12);
        assert!(is_compact_type(&s, &parts[0], &tol).unwrap());
        assert!(!is_compact_type(&s, &parts[1], &tol).unwrap());

        let su2 = alg("su2");
        let whole = simple_ideal_decomposition(&su2, &tol).unwrap();
        assert_eq!(whole.len(), 1);
        assert_eq!(whole[0].dim(), 3);
        assert!(is_compact_type(&su2, &whole[0], &tol).unwrap());
        assert!(!is_compact_type(&alg("sl2R"), &Subspace::full(3), &tol).unwrap());

        let two = simple_ideal_decomposition(&alg("su2+su2"), &tol).unwrap();
        assert_eq!(two.iter().map(Subspace::dim).collect::<Vec<_>>(), vec![3, 3]);
    }

    #[test]
    fn fallback_splitting_agrees_with_centroid() {
        let tol = Tolerances::default();
        for name in ["su2+su2", "su2+sl2R", "sl2R+sl2R"] {
            let s = alg(name);
            let b = killing_form(&s);
            let parts = refine_to_minimal(&s, &b, vec![Subspace::full(6)], &tol).unwrap();
            assert_eq!(parts.len(), 2, "{name}");
            assert!(decomposition_is_consistent(&s, &b, &parts, &tol));
        }
    }

    #[test]
    fn borderline_compactness_is_an_error() {
        let tol = Tolerances::default();
        // the Heisenberg Killing form is identically zero
        let h3 = alg("heisenberg3");
        assert!(matches!(
            is_compact_type(&h3, &Subspace::full(3), &tol),
            Err(Error::IndefiniteBorderline { .. })
        ));
    }

    #[test]
    fn report_examples() {
        let tol = Tolerances::default();
        let se3 = structure_report(&alg("se3"), &tol).unwrap();
        assert_eq!(se3.radical.dim(), 3);
        assert_eq!(se3.semisimple_dim(), 3);
        assert_eq!(se3.compact_count(), 1);
        assert_eq!(se3.s_noncompact.dim(), 0);
        assert_eq!(se3.gn.dim(), 3);

        let sl2r = structure_report(&alg("sl2R+R"), &tol).unwrap();
        assert_eq!(sl2r.radical.dim(), 1);
        assert_eq!(sl2r.noncompact_count(), 1);
        assert_eq!(sl2r.gn.dim(), 4);

        let su2 = structure_report(&alg("su2"), &tol).unwrap();
        assert_eq!(su2.radical.dim(), 0);
        assert_eq!(su2.s_compact.dim(), 3);
        assert_eq!(su2.s_noncompact.dim(), 0);
        assert_eq!(su2.gn.dim(), 0);
    }

    #[test]
    fn cluster_grouping() {
        let groups = cluster_eigenvalues(&[(1.0, 0.0), (2.0, 0.0), (1.0 + 1e-9, 0.0), (2.0, 1e-9)], 1e-6);
        assert_eq!(groups, vec![vec![0, 2], vec![1, 3]]);
    }
}
