//! Built-in reference algebras.
//!
//! Each entry is stored in the same JSON format the CLI accepts, plus a
//! one-line description and the expected dimensions of its structure report.

use serde::{Deserialize, Serialize};

use crate::algebra::{validate_algebra, AlgebraTable, LieAlgebra};
use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

const SOURCES: &[(&str, &str)] = &[
    ("abelian2", include_str!("../catalog/abelian2.json")),
    ("heisenberg3", include_str!("../catalog/heisenberg3.json")),
    ("aff1", include_str!("../catalog/aff1.json")),
    ("se2", include_str!("../catalog/se2.json")),
    ("sl2R", include_str!("../catalog/sl2R.json")),
    ("su2", include_str!("../catalog/su2.json")),
    ("su2+su2", include_str!("../catalog/su2_plus_su2.json")),
    ("su2+sl2R", include_str!("../catalog/su2_plus_sl2R.json")),
    ("se3", include_str!("../catalog/se3.json")),
    ("sl2R+R", include_str!("../catalog/sl2R_plus_R.json")),
    ("su2+heisenberg3", include_str!("../catalog/su2_plus_heisenberg3.json")),
    ("osc4", include_str!("../catalog/osc4.json")),
    ("sl2R+sl2R", include_str!("../catalog/sl2R_plus_sl2R.json")),
    ("u2", include_str!("../catalog/u2.json")),
    ("se3_sheared", include_str!("../catalog/se3_sheared.json")),
    ("jacobi_sheared", include_str!("../catalog/jacobi_sheared.json")),
];

/// Dimensions and compactness signature a structure report must reproduce.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpectedReport {
    pub radical_dim: usize,
    pub semisimple_dim: usize,
    pub compact_ideals: usize,
    pub noncompact_ideals: usize,
    pub gn_dim: usize,
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: String,
    pub algebra: LieAlgebra,
    pub expected: ExpectedReport,
    pub description: String,
    /// The embedded JSON document, verbatim.
    pub source: &'static str,
}

#[derive(Deserialize)]
struct EntryFile {
    #[serde(flatten)]
    table: AlgebraTable,
    description: String,
    expected: ExpectedReport,
}

pub fn names() -> impl Iterator<Item = &'static str> {
    SOURCES.iter().map(|(n, _)| *n)
}

pub fn get(name: &str) -> Result<CatalogEntry> {
    let (_, source) = SOURCES
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| Error::UnknownAlgebra {
            name: name.to_string(),
            valid: names().map(String::from).collect(),
        })?;
    let file: EntryFile =
        serde_json::from_str(source).map_err(|e| Error::Internal(format!("catalog entry {name}: {e}")))?;
    let algebra = validate_algebra(&file.table, &Tolerances::default())?;
    Ok(CatalogEntry {
        name: name.to_string(),
        algebra,
        expected: file.expected,
        description: file.description,
        source,
    })
}

pub fn algebra(name: &str) -> Result<LieAlgebra> {
    Ok(get(name)?.algebra)
}
