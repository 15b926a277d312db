//! Constructive Levi–Malcev complement.
//!
//! Starting from any linear section `sigma: s -> g` of the projection onto
//! the semisimple quotient, the defect `sigma[x,y] - [sigma x, sigma y]` lies
//! in the radical. Walking down the derived series `r = r_0 ⊃ r_1 ⊃ ...`, each
//! stage solves the linear system
//!
//! `[sigma x, phi y] - [sigma y, phi x] - phi[x,y] = defect(x,y)  (mod r_{i+1})`
//!
//! for `phi: s -> r_i` and replaces `sigma` by `sigma + phi`. Solvability of
//! every stage is Whitehead's second lemma; least squares detects it.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::algebra::{LieAlgebra, Quotient};
use crate::error::{Error, Result};
use crate::linalg::least_squares;
use crate::subspace::Subspace;
use crate::tolerance::Tolerances;

pub const LEVI_SEED: u64 = 0x1E71;
pub const LEVI_RESTARTS: usize = 5;

#[derive(Debug, Clone)]
pub struct LeviFactor {
    /// n×m matrix of a Lie algebra homomorphism `s -> g` splitting the
    /// projection.
    pub section: DMatrix<f64>,
    pub subspace: Subspace,
    /// Images of the compact and non-compact parts of `s`.
    pub compact: Subspace,
    pub noncompact: Subspace,
    /// Largest `|[sigma x, sigma y] - sigma[x,y]|` over basis pairs.
    pub residual: f64,
    pub restarts: usize,
}

/// Largest homomorphism defect of a section over basis pairs of `s`.
pub fn section_defect(g: &LieAlgebra, s: &LieAlgebra, section: &DMatrix<f64>) -> f64 {
    let m = s.dim();
    let mut worst = 0.0f64;
    for a in 0..m {
        for b in a + 1..m {
            let d = defect(g, s, section, a, b);
            worst = worst.max(d.amax());
        }
    }
    worst
}

fn defect(g: &LieAlgebra, s: &LieAlgebra, section: &DMatrix<f64>, a: usize, b: usize) -> DVector<f64> {
    let m = s.dim();
    let sa = section.column(a).clone_owned();
    let sb = section.column(b).clone_owned();
    let mut image = DVector::zeros(g.dim());
    for k in 0..m {
        let c = s.c(a, b, k);
        if c != 0.0 {
            image.axpy(c, &section.column(k), 1.0);
        }
    }
    image - g.bracket_coords(&sa, &sb)
}

fn derived_chain(g: &LieAlgebra, r: &Subspace, tol: &Tolerances) -> Vec<Subspace> {
    let mut chain = vec![r.clone()];
    while let Some(last) = chain.last() {
        if last.is_zero() || chain.len() > g.dim() + 1 {
            break;
        }
        let next = g
            .bracket_subspaces(last, last, tol)
            .expect("radical lives in g");
        if next.dim() >= last.dim() {
            // a solvable ideal never stabilises above zero
            break;
        }
        chain.push(next);
    }
    chain
}

fn correct_stage(
    g: &LieAlgebra,
    s: &LieAlgebra,
    section: &mut DMatrix<f64>,
    stage: &Subspace,
    next: &Subspace,
) -> f64 {
    let n = g.dim();
    let m = s.dim();
    let d = stage.dim();
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|a| (a + 1..m).map(move |b| (a, b))).collect();
    let keep = DMatrix::identity(n, n) - next.projector();
    let mut system = DMatrix::zeros(pairs.len() * n, d * m);
    let mut rhs = DVector::zeros(pairs.len() * n);
    for (row, &(a, b)) in pairs.iter().enumerate() {
        let sa = section.column(a).clone_owned();
        let sb = section.column(b).clone_owned();
        rhs.rows_mut(row * n, n)
            .copy_from(&(&keep * defect(g, s, section, a, b)));
        for p in 0..d {
            let v = stage.basis().column(p).clone_owned();
            let sa_v = g.bracket_coords(&sa, &v);
            let sb_v = g.bracket_coords(&sb, &v);
            for q in 0..m {
                let mut col = v.clone() * -s.c(a, b, q);
                if q == b {
                    col += &sa_v;
                }
                if q == a {
                    col -= &sb_v;
                }
                let projected = &keep * col;
                system.view_mut((row * n, p + q * d), (n, 1)).copy_from(&projected);
            }
        }
    }
    let phi = least_squares(&system, &rhs);
    let residual = (&system * &phi - &rhs).amax();
    let phi = DMatrix::from_column_slice(d, m, phi.as_slice());
    *section += stage.basis() * phi;
    residual
}

/// Levi factor from a radical and the quotient `g / r`.
pub fn levi_factor(
    g: &LieAlgebra,
    radical: &Subspace,
    semisimple: &Quotient,
    s_compact: &Subspace,
    s_noncompact: &Subspace,
    tol: &Tolerances,
) -> Result<LeviFactor> {
    let n = g.dim();
    let Some(s) = &semisimple.algebra else {
        return Ok(LeviFactor {
            section: DMatrix::zeros(n, 0),
            subspace: Subspace::zero(n),
            compact: Subspace::zero(n),
            noncompact: Subspace::zero(n),
            residual: 0.0,
            restarts: 0,
        });
    };
    let threshold = tol.levi_threshold(g.scale());
    let chain = derived_chain(g, radical, tol);
    let mut rng = ChaCha8Rng::seed_from_u64(LEVI_SEED);
    let mut best = f64::INFINITY;
    for attempt in 0..=LEVI_RESTARTS {
        let mut section = semisimple.section.clone();
        if attempt > 0 && !radical.is_zero() {
            let w = DMatrix::from_fn(radical.dim(), s.dim(), |_, _| {
                let x: f64 = StandardNormal.sample(&mut rng);
                x
            });
            section += radical.basis() * w;
        }
        for i in 0..chain.len() {
            if chain[i].is_zero() {
                break;
            }
            let next = chain.get(i + 1).cloned().unwrap_or_else(|| Subspace::zero(n));
            correct_stage(g, s, &mut section, &chain[i], &next);
        }
        let residual = section_defect(g, s, &section);
        best = best.min(residual);
        if residual <= threshold {
            let subspace = Subspace::from_span(&section, 1.0, tol);
            if subspace.dim() != s.dim() {
                continue;
            }
            return Ok(LeviFactor {
                compact: Subspace::from_span(&(&section * s_compact.basis()), 1.0, tol),
                noncompact: Subspace::from_span(&(&section * s_noncompact.basis()), 1.0, tol),
                section,
                subspace,
                residual,
                restarts: attempt,
            });
        }
    }
    Err(Error::LeviNotFound { residual: best })
}

/// Levi complement of `g` (zero subspace for solvable algebras).
pub fn levi_complement(g: &LieAlgebra, tol: &Tolerances) -> Result<Subspace> {
    let r = crate::structure::radical(g, tol)?;
    let q = g.quotient(&r, tol)?;
    let m = q.dim();
    Ok(levi_factor(g, &r, &q, &Subspace::zero(m), &Subspace::zero(m), tol)?.subspace)
}

/// Largest residual of `[l_a, l_b]` outside `L` over orthonormal basis pairs.
pub fn closure_residual(g: &LieAlgebra, l: &Subspace) -> f64 {
    let mut worst = 0.0f64;
    for a in 0..l.dim() {
        for b in a + 1..l.dim() {
            let x = l.basis().column(a).clone_owned();
            let y = l.basis().column(b).clone_owned();
            worst = worst.max(l.residual(&g.bracket_coords(&x, &y)));
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::structure::radical;

    fn alg(name: &str) -> LieAlgebra {
        catalog::algebra(name).unwrap()
    }

    #[test]
    fn se3_levi_is_rotations() {
        let tol = Tolerances::default();
        let l = levi_complement(&alg("se3"), &tol).unwrap();
        assert_eq!(l.basis(), &DMatrix::identity(6, 6).columns(0, 3).clone_owned());
    }

    #[test]
    fn trivial_cases() {
        let tol = Tolerances::default();
        assert_eq!(levi_complement(&alg("sl2R"), &tol).unwrap().dim(), 3);
        assert_eq!(levi_complement(&alg("heisenberg3"), &tol).unwrap().dim(), 0);
    }

    #[test]
    fn sheared_bases_need_correction() {
        let tol = Tolerances::default();
        for name in ["se3_sheared", "jacobi_sheared"] {
            let g = alg(name);
            let r = radical(&g, &tol).unwrap();
            let naive = r.orthogonal_complement(&tol);
            assert!(closure_residual(&g, &naive) > 0.1, "{name}: naive complement closes");
            let l = levi_complement(&g, &tol).unwrap();
            assert_eq!(l.dim(), 3);
            assert!(closure_residual(&g, &l) < 1e-9, "{name}");
            assert_eq!(l.sum(&r, &tol).unwrap().dim(), 6, "{name}");
        }
    }
}
