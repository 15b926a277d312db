//! Fixed-point / compact / unbounded classification of coadjoint orbits.
//!
//! `f` has a bounded orbit iff it vanishes on `[g, g_n]`. In that case
//! `f = f1 + h` where `f1` agrees with `f` on `g_n`, vanishes on the compact
//! part `L_c` of a Levi factor and is a fixed point, while `h` vanishes on
//! `g_n` and lives on the orbit of the compact quotient `g / g_n`.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::algebra::{annihilates, pairing_residual, Covector, LieAlgebra, Quotient, Vector};
use crate::coadjoint::{flow, orbit_dimension};
use crate::error::{Error, Result};
use crate::linalg::{factorial, max_singular_value};
use crate::spectral::{spectral_decomposition, SpectralDecomposition};
use crate::structure::{structure_report, StructureReport};
use crate::subspace::Subspace;
use crate::tolerance::Tolerances;

pub const WITNESS_SEED: u64 = 0x3E17;
pub const WITNESS_RANDOM_CANDIDATES: usize = 64;
pub const REPLAY_TIMES: [f64; 3] = [1.0, 2.0, 4.0];
/// Replayed growth may fall short of the model by at most this factor.
pub const REPLAY_FACTOR: f64 = 2.0;
/// Spectral components smaller than this fraction of `||f||` are ignored.
const COMPONENT_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    FixedPoint,
    Compact,
    Unbounded,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::FixedPoint => "fixed_point",
            Verdict::Compact => "compact",
            Verdict::Unbounded => "unbounded",
        }
    }

    pub fn is_bounded(self) -> bool {
        self != Verdict::Unbounded
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrowthKind {
    Exponential,
    Polynomial,
}

impl GrowthKind {
    pub fn as_str(self) -> &'static str {
        match self {
            GrowthKind::Exponential => "exponential",
            GrowthKind::Polynomial => "polynomial",
        }
    }
}

/// One replayed point of a witness flow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplayCheck {
    pub time: f64,
    /// `||flow(f, generator, time)|| / ||f||`; infinite if the flow diverged.
    pub observed: f64,
    pub model: f64,
}

impl ReplayCheck {
    pub fn passes(&self) -> bool {
        self.observed * REPLAY_FACTOR >= self.model
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub generator: Vector,
    pub kind: GrowthKind,
    pub rate: Option<f64>,
    pub degree: Option<u32>,
    /// Coefficient of the certified lower model for `||flow|| / ||f||`.
    pub amplitude: f64,
    /// Observed growth factor at the last replay time.
    pub verified_growth: f64,
    pub checks: Vec<ReplayCheck>,
}

impl Witness {
    /// Certified growth model `amplitude * e^{rate t}` or `amplitude * t^degree`.
    pub fn model(&self, t: f64) -> f64 {
        match self.kind {
            GrowthKind::Exponential => self.amplitude * (self.rate.unwrap_or(0.0) * t).exp(),
            GrowthKind::Polynomial => self.amplitude * t.powi(self.degree.unwrap_or(0) as i32),
        }
    }

    /// Replays the flow at the standard times.
    pub fn replay(&self, g: &LieAlgebra, f: &Covector) -> Result<Vec<ReplayCheck>> {
        let norm = f.norm();
        REPLAY_TIMES
            .iter()
            .map(|&t| {
                let observed = match flow(g, f, &self.generator, t) {
                    Ok(out) => out.norm() / norm,
                    Err(Error::FlowDiverged { .. }) => f64::INFINITY,
                    Err(e) => return Err(e),
                };
                Ok(ReplayCheck {
                    time: t,
                    observed,
                    model: self.model(t),
                })
            })
            .collect()
    }
}

/// Orbit of the compact quotient `s_c = g / g_n` carrying the bounded part.
#[derive(Debug, Clone)]
pub struct CompactPart {
    /// `None` when `g_n = g`.
    pub algebra: Option<LieAlgebra>,
    pub covector: Covector,
}

#[derive(Debug, Clone)]
pub struct Decomposition {
    /// `None` when no Levi factor was found.
    pub f1: Option<Covector>,
    pub compact: CompactPart,
    /// n×dim(s_c) map sending `s_c` covectors into `g*`, zero on `g_n`.
    pub embedding: Option<DMatrix<f64>>,
}

impl Decomposition {
    /// `f1 + embedding(compact covector)`.
    pub fn reconstruct(&self) -> Option<Covector> {
        let f1 = self.f1.as_ref()?;
        let e = self.embedding.as_ref()?;
        Some(Covector(&f1.0 + e * &self.compact.covector.0))
    }
}

#[derive(Debug, Clone)]
pub struct OrbitClassification {
    pub verdict: Verdict,
    pub orbit_dim: usize,
    pub f1: Option<Covector>,
    pub compact_part: Option<CompactPart>,
    pub witness: Option<Witness>,
    /// Norm of the restriction of `f` to `[g, g_n]`.
    pub criterion_residual: f64,
}

/// Structure data of one algebra, shared by every covector classified on it.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub algebra: LieAlgebra,
    pub tol: Tolerances,
    pub report: StructureReport,
    /// `[g, g_n]`.
    pub criterion: Subspace,
    /// `g / g_n`.
    pub compact_quotient: Quotient,
    /// Transpose of the projection onto `g_n` along `L_c`.
    f1_map: Option<DMatrix<f64>>,
}

fn check_dim(g: &LieAlgebra, n: usize) -> Result<()> {
    if g.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: g.dim(),
            found: n,
        });
    }
    Ok(())
}

impl Analysis {
    pub fn new(g: &LieAlgebra, tol: &Tolerances) -> Result<Self> {
        let report = structure_report(g, tol)?;
        let n = g.dim();
        let criterion = g.bracket_subspaces(&Subspace::full(n), &report.gn, tol)?;
        let compact_quotient = g.quotient(&report.gn, tol)?;
        let f1_map = report.levi.as_ref().and_then(|levi| {
            let gn = report.gn.basis();
            let lc = levi.compact.basis();
            if gn.ncols() + lc.ncols() != n {
                return None;
            }
            let mut frame = DMatrix::zeros(n, n);
            frame.view_mut((0, 0), (n, gn.ncols())).copy_from(gn);
            frame.view_mut((0, gn.ncols()), (n, lc.ncols())).copy_from(lc);
            let inv = frame.try_inverse()?;
            let p = gn * inv.rows(0, gn.ncols());
            Some(p.transpose())
        });
        Ok(Analysis {
            algebra: g.clone(),
            tol: *tol,
            report,
            criterion,
            compact_quotient,
            f1_map,
        })
    }

    pub fn has_levi_embedding(&self) -> bool {
        self.f1_map.is_some()
    }

    pub fn criterion_residual(&self, f: &Covector) -> Result<f64> {
        check_dim(&self.algebra, f.dim())?;
        Ok(pairing_residual(f, &self.criterion))
    }

    pub fn verdict(&self, f: &Covector) -> Result<Verdict> {
        check_dim(&self.algebra, f.dim())?;
        if annihilates(f, &self.report.derived, &self.tol)? {
            Ok(Verdict::FixedPoint)
        } else if annihilates(f, &self.criterion, &self.tol)? {
            Ok(Verdict::Compact)
        } else {
            Ok(Verdict::Unbounded)
        }
    }

    pub fn classify(&self, f: &Covector) -> Result<OrbitClassification> {
        let verdict = self.verdict(f)?;
        let criterion_residual = self.criterion_residual(f)?;
        let orbit_dim = match verdict {
            Verdict::FixedPoint => 0,
            _ => orbit_dimension(&self.algebra, f, &self.tol)?,
        };
        let mut out = OrbitClassification {
            verdict,
            orbit_dim,
            f1: None,
            compact_part: None,
            witness: None,
            criterion_residual,
        };
        if verdict.is_bounded() {
            let d = self.split(f);
            out.f1 = d.f1;
            out.compact_part = Some(d.compact);
        } else {
            out.witness = self.witness_search(f).ok().flatten();
        }
        Ok(out)
    }

    pub fn decompose(&self, f: &Covector) -> Result<Decomposition> {
        if !self.verdict(f)?.is_bounded() {
            return Err(Error::NotBounded);
        }
        Ok(self.split(f))
    }

    fn split(&self, f: &Covector) -> Decomposition {
        let q = &self.compact_quotient;
        match &self.f1_map {
            Some(pt) => {
                let f1 = pt * &f.0;
                let h = q.section.transpose() * (&f.0 - &f1);
                Decomposition {
                    f1: Some(Covector(f1)),
                    compact: CompactPart {
                        algebra: q.algebra.clone(),
                        covector: Covector(h),
                    },
                    embedding: Some(q.section.clone()),
                }
            }
            None => Decomposition {
                f1: None,
                compact: CompactPart {
                    algebra: q.algebra.clone(),
                    covector: Covector(q.section.transpose() * &f.0),
                },
                embedding: None,
            },
        }
    }

    pub fn witness(&self, f: &Covector) -> Result<Option<Witness>> {
        if self.verdict(f)? != Verdict::Unbounded {
            return Err(Error::NotBounded);
        }
        self.witness_search(f)
    }

    /// Candidate generators: basis vectors, Levi non-compact generators, then
    /// seeded random unit vectors.
    pub fn witness_candidates(&self) -> Vec<Vector> {
        let n = self.algebra.dim();
        let mut out: Vec<Vector> = (0..n).map(|i| Vector::basis(n, i)).collect();
        if let Some(levi) = &self.report.levi {
            for c in 0..levi.noncompact.dim() {
                out.push(Vector(levi.noncompact.basis().column(c).clone_owned()));
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(WITNESS_SEED);
        for _ in 0..WITNESS_RANDOM_CANDIDATES {
            let v = DVector::from_fn(n, |_, _| {
                let x: f64 = StandardNormal.sample(&mut rng);
                x
            });
            let norm = v.norm();
            if norm > 0.0 {
                out.push(Vector(v / norm));
            }
        }
        out
    }

    fn witness_search(&self, f: &Covector) -> Result<Option<Witness>> {
        let g = &self.algebra;
        let mut polynomial: Option<Witness> = None;
        let mut first_failure: Option<ReplayCheck> = None;
        for eta in self.witness_candidates() {
            let a = g.coad_coords(&eta.0);
            let Some(spec) = spectral_decomposition(&a) else {
                continue;
            };
            let (exp, poly) = growth_models(&spec, &a, &eta, f);
            for mut w in exp.into_iter().chain(poly) {
                if w.kind == GrowthKind::Polynomial && polynomial.is_some() {
                    continue;
                }
                let checks = w.replay(g, f)?;
                match checks.iter().find(|c| !c.passes()) {
                    Some(c) => {
                        first_failure.get_or_insert(*c);
                    }
                    None => {
                        w.verified_growth = checks.last().map(|c| c.observed).unwrap_or(0.0);
                        w.checks = checks;
                        if w.kind == GrowthKind::Exponential {
                            return Ok(Some(w));
                        }
                        polynomial = Some(w);
                    }
                }
            }
        }
        if polynomial.is_some() {
            return Ok(polynomial);
        }
        match first_failure {
            Some(c) => Err(Error::WitnessReplayFailed {
                time: c.time,
                observed: c.observed,
                model: c.model,
            }),
            None => Ok(None),
        }
    }
}

/// Leading growth models of `f` under `exp(t A)`: at most one exponential
/// (largest `|Re|`) and one polynomial (largest Jordan degree).
fn growth_models(
    spec: &SpectralDecomposition,
    a: &DMatrix<f64>,
    eta: &Vector,
    f: &Covector,
) -> (Option<Witness>, Option<Witness>) {
    let norm = f.norm();
    let mut best_exp: Option<(f64, Witness)> = None;
    let mut best_poly: Option<(u32, Witness)> = None;
    for (idx, cluster) in spec.clusters.iter().enumerate() {
        let fc = spec.component(idx, &f.0);
        let fc_norm = fc.norm();
        if fc_norm <= COMPONENT_FLOOR * norm {
            continue;
        }
        let pc = max_singular_value(&spec.projector(idx)).max(1.0);
        let q = spec.annihilating_factor(idx, a);
        if cluster.re.abs() > spec.radius {
            let lead = leading_size(&fc, a, cluster.re, cluster.im, 0);
            let rate = cluster.re.abs();
            if lead > 0.0 && best_exp.as_ref().is_none_or(|(r, _)| rate > *r) {
                let sign = cluster.re.signum();
                best_exp = Some((
                    rate,
                    Witness {
                        generator: Vector(&eta.0 * sign),
                        kind: GrowthKind::Exponential,
                        rate: Some(rate),
                        degree: None,
                        amplitude: lead / (norm * pc),
                        verified_growth: 0.0,
                        checks: Vec::new(),
                    },
                ));
            }
            continue;
        }
        let qnorm = max_singular_value(&q);
        let mut power = fc.clone();
        let mut degree = 0u32;
        let mut lead_vec = fc.clone();
        for k in 1..=cluster.multiplicity as u32 {
            power = &q * power;
            if power.norm() <= COMPONENT_FLOOR * qnorm.powi(k as i32) * fc_norm {
                break;
            }
            degree = k;
            lead_vec = power.clone();
        }
        if degree == 0 {
            continue;
        }
        let mut lead = if cluster.is_real() {
            lead_vec.norm()
        } else {
            leading_size(&lead_vec, a, cluster.re, cluster.im, degree)
        };
        lead /= factorial(degree);
        if lead > 0.0 && best_poly.as_ref().is_none_or(|(d, _)| degree > *d) {
            best_poly = Some((
                degree,
                Witness {
                    generator: eta.clone(),
                    kind: GrowthKind::Polynomial,
                    rate: None,
                    degree: Some(degree),
                    amplitude: lead / (norm * pc),
                    verified_growth: 0.0,
                    checks: Vec::new(),
                },
            ));
        }
    }
    (best_exp.map(|x| x.1), best_poly.map(|x| x.1))
}

/// Lower bound for the size of `v` rotated by the cluster's oscillation.
///
/// For a real cluster this is `||v||`. For `re ± i im` the flow moves `v`
/// within `span(v, (A - re) v / im)`, and the smallest singular value of that
/// pair bounds every phase from below. `scaled` is the Jordan power already
/// applied to `v` through `((A - re)^2 + im^2)^scaled`.
fn leading_size(v: &DVector<f64>, a: &DMatrix<f64>, re: f64, im: f64, scaled: u32) -> f64 {
    if im == 0.0 {
        return v.norm();
    }
    let v = v / (2.0 * im).powi(scaled as i32);
    let n = v.len();
    let w = (a * &v - &v * re) / im;
    let mut pair = DMatrix::zeros(n, 2);
    pair.set_column(0, &v);
    pair.set_column(1, &w);
    pair.singular_values().iter().cloned().fold(f64::INFINITY, f64::min)
}

pub fn classify(g: &LieAlgebra, f: &Covector, tol: &Tolerances) -> Result<OrbitClassification> {
    check_dim(g, f.dim())?;
    Analysis::new(g, tol)?.classify(f)
}

pub fn decompose(g: &LieAlgebra, f: &Covector, tol: &Tolerances) -> Result<Decomposition> {
    check_dim(g, f.dim())?;
    Analysis::new(g, tol)?.decompose(f)
}

pub fn unboundedness_witness(g: &LieAlgebra, f: &Covector, tol: &Tolerances) -> Result<Option<Witness>> {
    check_dim(g, f.dim())?;
    Analysis::new(g, tol)?.witness(f)
}
