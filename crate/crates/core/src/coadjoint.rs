//! Fixed points, orbit dimensions and one-parameter coadjoint flows.

use nalgebra::{DMatrix, DVector};

use crate::algebra::{annihilates, Covector, LieAlgebra, Operator, Vector};
use crate::error::{Error, Result};
use crate::linalg::{ambiguous_singular_value, numerical_rank};
use crate::tolerance::Tolerances;

/// Coordinates above this magnitude count as divergence.
pub const DIVERGENCE_BOUND: f64 = 1e300;

fn check(g: &LieAlgebra, n: usize) -> Result<()> {
    if g.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: g.dim(),
            found: n,
        });
    }
    Ok(())
}

/// `f` vanishes on `[g,g]`.
pub fn is_fixed_point(g: &LieAlgebra, f: &Covector, tol: &Tolerances) -> Result<bool> {
    check(g, f.dim())?;
    annihilates(f, &g.derived_algebra(tol), tol)
}

/// n×n matrix whose i-th column is `coad(e_i) f`.
pub fn infinitesimal_orbit_map(g: &LieAlgebra, f: &Covector) -> DMatrix<f64> {
    let n = g.dim();
    let mut m = DMatrix::zeros(n, n);
    // (coad(e_i) f)_j = -sum_k c[i][j][k] f_k
    for &(i, j, k, c) in g.nonzero_constants() {
        m[(j, i)] -= c * f.0[k];
    }
    m
}

/// Rank of `x -> coad(x) f`.
pub fn orbit_dimension(g: &LieAlgebra, f: &Covector, tol: &Tolerances) -> Result<usize> {
    check(g, f.dim())?;
    let m = infinitesimal_orbit_map(g, f);
    let sv: Vec<f64> = m.singular_values().iter().cloned().collect();
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    let threshold = tol.rank_threshold(smax.max(g.scale() * f.norm()), g.dim());
    if let Some(value) = ambiguous_singular_value(&sv, threshold) {
        return Err(Error::RankAmbiguous {
            context: "orbit dimension".into(),
            value,
            threshold,
        });
    }
    Ok(numerical_rank(&sv, threshold))
}

fn check_finite(v: &DVector<f64>, t: f64) -> Result<()> {
    if v.iter().any(|x| !x.is_finite() || x.abs() > DIVERGENCE_BOUND) {
        return Err(Error::FlowDiverged { time: t });
    }
    Ok(())
}

/// `exp(t coad(x)) f` via the scaling-and-squaring matrix exponential.
pub fn flow(g: &LieAlgebra, f: &Covector, x: &Vector, t: f64) -> Result<Covector> {
    check(g, f.dim())?;
    check(g, x.dim())?;
    if !t.is_finite() {
        return Err(Error::InvalidInput(format!("flow time {t} is not finite")));
    }
    if t == 0.0 {
        return Ok(f.clone());
    }
    let a: Operator = g.coad_coords(&x.0) * t;
    let e = a.exp();
    let out = e * &f.0;
    check_finite(&out, t)?;
    Ok(Covector(out))
}

/// `exp(t A) v` by a truncated Taylor series on the vector, with enough
/// substeps that each has 1-norm at most 1/2.
pub fn expm_action(a: &DMatrix<f64>, t: f64, v: &DVector<f64>) -> DVector<f64> {
    let norm1 = (0..a.ncols())
        .map(|c| a.column(c).iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
        * t.abs();
    let steps = (norm1 / 0.5).ceil().max(1.0) as usize;
    let h = t / steps as f64;
    let mut cur = v.clone();
    for _ in 0..steps {
        let mut term = cur.clone();
        let mut sum = cur.clone();
        for k in 1..60 {
            term = (a * term) * (h / k as f64);
            sum += &term;
            if term.amax() <= 1e-17 * sum.amax() {
                break;
            }
        }
        cur = sum;
    }
    cur
}

/// Same map as [`flow`], computed with [`expm_action`]; used by the sampler.
pub fn flow_action(g: &LieAlgebra, f: &Covector, x: &Vector, t: f64) -> Result<Covector> {
    check(g, f.dim())?;
    check(g, x.dim())?;
    let out = expm_action(&g.coad_coords(&x.0), t, &f.0);
    check_finite(&out, t)?;
    Ok(Covector(out))
}

/// A recorded one-parameter flow.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowSegment {
    pub generator: Vector,
    pub time: f64,
    pub start: Covector,
    pub end: Covector,
}

impl FlowSegment {
    pub fn run(g: &LieAlgebra, start: &Covector, generator: &Vector, time: f64) -> Result<Self> {
        let end = flow(g, start, generator, time)?;
        Ok(FlowSegment {
            generator: generator.clone(),
            time,
            start: start.clone(),
            end,
        })
    }
}
