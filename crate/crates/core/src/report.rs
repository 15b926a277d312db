//! JSON views of analysis results and the run report envelope.
//!
//! Floats are written with 17 significant digits so every value parses back
//! to the same `f64`. Non-finite values become `null`.

use std::io;

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::algebra::{Covector, LieAlgebra};
use crate::catalog::CatalogEntry;
use crate::classifier::{CompactPart, OrbitClassification, Witness};
use crate::sampler::{BoundednessEstimate, OrbitSample};
use crate::structure::StructureReport;
use crate::subspace::Subspace;
use crate::tolerance::Tolerances;

/// Pretty JSON with round-trip float formatting.
struct RoundTripFormatter<'a> {
    inner: PrettyFormatter<'a>,
}

impl Formatter for RoundTripFormatter<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object_value(w)
    }
}

/// Serializes with 17 significant digits per float.
pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let fmt = RoundTripFormatter {
        inner: PrettyFormatter::with_indent(b"  "),
    };
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, fmt);
    value.serialize(&mut ser).expect("JSON values always serialize");
    String::from_utf8(buf).expect("serde_json writes UTF-8")
}

fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

fn vector(v: &nalgebra::DVector<f64>) -> Value {
    Value::Array(v.iter().map(|&x| num(x)).collect())
}

fn columns(m: &nalgebra::DMatrix<f64>) -> Value {
    Value::Array((0..m.ncols()).map(|c| vector(&m.column(c).clone_owned())).collect())
}

fn subspace(s: &Subspace) -> Value {
    columns(s.basis())
}

pub fn covector_json(f: &Covector) -> Value {
    json!({ "f": vector(&f.0) })
}

pub fn algebra_json(g: &LieAlgebra) -> Value {
    serde_json::to_value(g.to_table()).expect("algebra tables serialize")
}

pub fn validation_json(g: &LieAlgebra) -> Value {
    json!({
        "name": g.name(),
        "dim": g.dim(),
        "valid": true,
        "jacobi_residual": num(g.jacobi_residual()),
        "max_abs_constant": num(g.scale()),
    })
}

pub fn structure_json(report: &StructureReport) -> Value {
    let d = &report.diagnostics;
    json!({
        "derived_dim": report.derived.dim(),
        "radical_dim": report.radical.dim(),
        "radical": subspace(&report.radical),
        "semisimple_dim": report.semisimple_dim(),
        "simple_ideals": report
            .simple_ideals
            .iter()
            .map(|i| json!({ "dim": i.subspace.dim(), "compact": i.compact }))
            .collect::<Vec<_>>(),
        "gn_dim": report.gn.dim(),
        "gn": subspace(&report.gn),
        "levi": report.levi.as_ref().map(|l| columns(&l.section)),
        "levi_restarts": report.levi.as_ref().map(|l| l.restarts),
        "residuals": {
            "jacobi": num(d.jacobi),
            "killing_symmetry": num(d.killing_symmetry),
            "radical_ideal": num(d.radical_ideal),
            "semisimple_min_singular": d.semisimple_min_singular.map(num),
            "ideal_commutator": num(d.ideal_commutator),
            "ideal_killing_cross": num(d.ideal_killing_cross),
            "gn_ideal": num(d.gn_ideal),
            "levi": d.levi.map(num),
            "levi_error": d.levi_error,
        },
    })
}

pub fn witness_json(w: &Witness) -> Value {
    json!({
        "generator": vector(&w.generator.0),
        "kind": w.kind.as_str(),
        "rate": w.rate.map(num),
        "degree": w.degree,
        "amplitude": num(w.amplitude),
        "verified_growth": num(w.verified_growth),
        "replay": w
            .checks
            .iter()
            .map(|c| json!({ "time": num(c.time), "observed": num(c.observed), "model": num(c.model) }))
            .collect::<Vec<_>>(),
    })
}

pub fn compact_part_json(c: &CompactPart, embedding: Option<&nalgebra::DMatrix<f64>>) -> Value {
    json!({
        "algebra": c.algebra.as_ref().map(algebra_json),
        "covector": vector(&c.covector.0),
        "embedding": embedding.map(columns),
    })
}

pub fn classification_json(c: &OrbitClassification, embedding: Option<&nalgebra::DMatrix<f64>>) -> Value {
    json!({
        "verdict": c.verdict.as_str(),
        "orbit_dim": c.orbit_dim,
        "criterion_residual": num(c.criterion_residual),
        "f1": c.f1.as_ref().map(|f| vector(&f.0)),
        "compact_part": c.compact_part.as_ref().map(|p| compact_part_json(p, embedding)),
        "witness": c.witness.as_ref().map(witness_json),
    })
}

pub fn sample_json(sample: &OrbitSample, estimate: &BoundednessEstimate) -> Value {
    json!({
        "max_norm": num(sample.max_norm),
        "growth_ratio": num(estimate.growth_ratio),
        "status": estimate.status.as_str(),
        "steps": sample.points.len() - 1,
        "seed": sample.config.seed,
        "eps": num(sample.config.eps),
        "escape_threshold": num(estimate.escape_threshold),
        "diverged_at": sample.diverged_at,
        "msd_ratio": estimate.msd_ratio.map(num),
        "block_variance": estimate.block_variance.map(num),
        "speed_ratio": estimate.speed_ratio.map(num),
        "late_max_increase": num(estimate.late_max_increase),
        "notes": estimate.notes,
    })
}

pub fn catalog_entry_json(e: &CatalogEntry) -> Value {
    let mut v = algebra_json(&e.algebra);
    if let Value::Object(map) = &mut v {
        map.insert("description".into(), json!(e.description));
        map.insert("expected".into(), serde_json::to_value(&e.expected).expect("serializable"));
    }
    v
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputDigest {
    pub source: String,
    pub sha256: String,
}

impl InputDigest {
    pub fn of(source: impl Into<String>, bytes: &[u8]) -> Self {
        InputDigest {
            source: source.into(),
            sha256: hex::encode(Sha256::digest(bytes)),
        }
    }
}

/// Envelope for every `--json` command output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: Vec<String>,
    pub inputs: Vec<InputDigest>,
    pub output: Value,
    pub tolerances: Tolerances,
    /// Only present when timing was requested; omitted so plain runs are
    /// byte-identical.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        to_json_string(self)
    }
}
