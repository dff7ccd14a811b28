//! Versioned JSON files for modular data, Z-matrices, contexts, character
//! tables and reports.
//!
//! Every file is `{"schema_version": 1, "kind": ..., "payload": ...}`.
//! Rationals are strings `"p/q"` (or `"p"`), scalars are
//! `{"conductor": N, "coeffs": [...]}` in the power basis. Encoding is
//! deterministic: struct fields keep declaration order and maps are sorted.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::center_fusion::FusionRing;
use crate::characters::{ChiTable, DoubleCharTable};
use crate::exact_algebra::ScalarMatrix;
use crate::invariant_search::ZMatrix;
use crate::modular_data::{catalog, CatalogId, ModularData, ModularDataError};
use crate::morita_context::MoritaContextData;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InterfaceError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("integrity error: {0}")]
    Integrity(String),
    #[error("i/o error: {0}")]
    Io(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    ModularData,
    ZMatrix,
    Context,
    ChiTable,
    Report,
}

impl Kind {
    fn name(self) -> &'static str {
        match self {
            Kind::ModularData => "modular_data",
            Kind::ZMatrix => "z_matrix",
            Kind::Context => "context",
            Kind::ChiTable => "chi_table",
            Kind::Report => "report",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DataFile {
    pub schema_version: u32,
    pub kind: Kind,
    pub payload: Value,
}

impl DataFile {
    fn new<T: Serialize>(kind: Kind, payload: &T) -> Self {
        DataFile {
            schema_version: SCHEMA_VERSION,
            kind,
            payload: serde_json::to_value(payload).expect("payload types serialize"),
        }
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_text(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("values serialize");
        s.push('\n');
        s
    }

    pub fn from_text(text: &str) -> Result<Self, InterfaceError> {
        let raw: Value = serde_json::from_str(text).map_err(|e| InterfaceError::Parse(e.to_string()))?;
        let version = raw
            .get("schema_version")
            .and_then(Value::as_u64)
            .ok_or_else(|| InterfaceError::Schema("missing schema_version".into()))?;
        if version != SCHEMA_VERSION as u64 {
            return Err(InterfaceError::Schema(format!("unsupported schema_version {version}")));
        }
        let kind = raw
            .get("kind")
            .cloned()
            .ok_or_else(|| InterfaceError::Schema("missing kind".into()))?;
        let kind: Kind = serde_json::from_value(kind.clone())
            .map_err(|_| InterfaceError::Schema(format!("unknown kind {kind}")))?;
        let payload = raw
            .get("payload")
            .cloned()
            .ok_or_else(|| InterfaceError::Schema("missing payload".into()))?;
        Ok(DataFile {
            schema_version: SCHEMA_VERSION,
            kind,
            payload,
        })
    }

    pub fn read(path: &Path) -> Result<Self, InterfaceError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| InterfaceError::Io(format!("{}: {e}", path.display())))?;
        Self::from_text(&text)
    }

    pub fn write(&self, path: &Path) -> Result<(), InterfaceError> {
        std::fs::write(path, self.to_text())
            .map_err(|e| InterfaceError::Io(format!("{}: {e}", path.display())))
    }

    fn expect(&self, kind: Kind) -> Result<&Value, InterfaceError> {
        if self.kind != kind {
            return Err(InterfaceError::Schema(format!(
                "expected a {} file, found {}",
                kind.name(),
                self.kind.name()
            )));
        }
        Ok(&self.payload)
    }
}

fn parse<T: for<'de> Deserialize<'de>>(v: &Value) -> Result<T, InterfaceError> {
    T::deserialize(v).map_err(|e| InterfaceError::Parse(e.to_string()))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModularDataWire {
    name: String,
    conductor: u32,
    labels: Vec<String>,
    unit_index: usize,
    s_tilde: ScalarMatrix,
    t_exponents: Vec<i64>,
}

impl ModularDataWire {
    fn from_md(md: &ModularData) -> Self {
        ModularDataWire {
            name: md.name().to_string(),
            conductor: md.conductor(),
            labels: md.labels().to_vec(),
            unit_index: md.unit(),
            s_tilde: md.s_tilde().clone(),
            t_exponents: md.t_exponents().to_vec(),
        }
    }

    fn into_md(self) -> Result<ModularData, InterfaceError> {
        if self.conductor == 0 {
            return Err(InterfaceError::Parse("conductor must be positive".into()));
        }
        ModularData::new(
            self.name,
            self.conductor,
            self.labels,
            self.unit_index,
            self.s_tilde,
            self.t_exponents,
        )
        .map_err(|e| InterfaceError::Integrity(e.to_string()))
    }
}

pub fn encode_modular_data(md: &ModularData) -> DataFile {
    DataFile::new(Kind::ModularData, &ModularDataWire::from_md(md))
}

pub fn decode_modular_data(f: &DataFile) -> Result<ModularData, InterfaceError> {
    parse::<ModularDataWire>(f.expect(Kind::ModularData)?)?.into_md()
}

fn nonneg_matrix(rows: Vec<Vec<i64>>, what: &str) -> Result<Vec<Vec<u64>>, InterfaceError> {
    rows.into_iter()
        .enumerate()
        .map(|(j, row)| {
            row.into_iter()
                .enumerate()
                .map(|(k, x)| {
                    u64::try_from(x).map_err(|_| {
                        InterfaceError::Integrity(format!("{what} entry ({j},{k}) = {x} is negative"))
                    })
                })
                .collect()
        })
        .collect()
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ZMatrixWire {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    modular_data: Option<String>,
    entries: Vec<Vec<i64>>,
}

/// `modular_data` optionally names the data the matrix belongs to.
pub fn encode_z_matrix(z: &ZMatrix, modular_data: Option<&str>) -> DataFile {
    DataFile::new(
        Kind::ZMatrix,
        &ZMatrixWire {
            modular_data: modular_data.map(str::to_string),
            entries: z.to_i64_rows(),
        },
    )
}

pub fn decode_z_matrix(f: &DataFile) -> Result<ZMatrix, InterfaceError> {
    let w: ZMatrixWire = parse(f.expect(Kind::ZMatrix)?)?;
    let rows = nonneg_matrix(w.entries, "Z-matrix")?;
    ZMatrix::from_rows(rows).map_err(|e| InterfaceError::Integrity(e.to_string()))
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ModularDataRef {
    Catalog { catalog: String },
    Inline(ModularDataWire),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FusionRingWire {
    rank: usize,
    unit: usize,
    dual: Vec<usize>,
    /// `n[i][j][k] = N_{ij}^k`
    n: Vec<Vec<Vec<i64>>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ContextWire {
    name: String,
    modular_data: ModularDataRef,
    dual_rank: usize,
    module_rank: usize,
    #[serde(default)]
    dual_unit: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    branch_plus: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    branch_minus: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    z: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    nimreps: Option<Vec<Vec<Vec<i64>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dual_fusion: Option<FusionRingWire>,
}

fn to_i64(m: &[Vec<u64>]) -> Vec<Vec<i64>> {
    m.iter().map(|r| r.iter().map(|x| *x as i64).collect()).collect()
}

/// Catalog data is referenced by id when the context's data is exactly
/// the catalog entry, and embedded otherwise.
pub fn encode_context(ctx: &MoritaContextData) -> DataFile {
    let md_ref = match ctx.md.name().parse::<CatalogId>().ok().and_then(|id| catalog(&id).ok()) {
        Some(c) if c == ctx.md => ModularDataRef::Catalog {
            catalog: ctx.md.name().to_string(),
        },
        _ => ModularDataRef::Inline(ModularDataWire::from_md(&ctx.md)),
    };
    let fusion = ctx.dual_fusion.as_ref().map(|f| {
        let r = f.rank();
        FusionRingWire {
            rank: r,
            unit: f.unit(),
            dual: f.duals().to_vec(),
            n: (0..r)
                .map(|i| (0..r).map(|j| (0..r).map(|k| f.get(i, j, k) as i64).collect()).collect())
                .collect(),
        }
    });
    DataFile::new(
        Kind::Context,
        &ContextWire {
            name: ctx.name.clone(),
            modular_data: md_ref,
            dual_rank: ctx.dual_rank,
            module_rank: ctx.module_rank,
            dual_unit: ctx.dual_unit,
            branch_plus: ctx.branch_plus.as_deref().map(to_i64),
            branch_minus: ctx.branch_minus.as_deref().map(to_i64),
            z: ctx.z.as_ref().map(|z| z.to_i64_rows()),
            nimreps: ctx
                .nimreps
                .as_ref()
                .map(|ns| ns.iter().map(|n| to_i64(n)).collect()),
            dual_fusion: fusion,
        },
    )
}

pub fn decode_context(f: &DataFile) -> Result<MoritaContextData, InterfaceError> {
    let w: ContextWire = parse(f.expect(Kind::Context)?)?;
    let md = match w.modular_data {
        ModularDataRef::Catalog { catalog: id } => {
            let id: CatalogId = id.parse().map_err(|e: ModularDataError| InterfaceError::Parse(e.to_string()))?;
            catalog(&id).map_err(|e| InterfaceError::Integrity(e.to_string()))?
        }
        ModularDataRef::Inline(m) => m.into_md()?,
    };
    let z = match w.z {
        Some(rows) => Some(
            ZMatrix::from_rows(nonneg_matrix(rows, "Z-matrix")?)
                .map_err(|e| InterfaceError::Integrity(e.to_string()))?,
        ),
        None => None,
    };
    let dual_fusion = match w.dual_fusion {
        Some(fw) => {
            let r = fw.rank;
            if fw.n.len() != r || fw.n.iter().any(|a| a.len() != r || a.iter().any(|b| b.len() != r)) {
                return Err(InterfaceError::Integrity(format!("fusion tensor must be {r}x{r}x{r}")));
            }
            let mut flat = Vec::with_capacity(r * r * r);
            for a in fw.n {
                flat.extend(nonneg_matrix(a, "fusion")?.into_iter().flatten());
            }
            Some(
                FusionRing::new(r, fw.unit, fw.dual, flat)
                    .map_err(|e| InterfaceError::Integrity(e.to_string()))?,
            )
        }
        None => None,
    };
    let ctx = MoritaContextData {
        name: w.name,
        md,
        dual_rank: w.dual_rank,
        module_rank: w.module_rank,
        dual_unit: w.dual_unit,
        branch_plus: w.branch_plus.map(|b| nonneg_matrix(b, "branching")).transpose()?,
        branch_minus: w.branch_minus.map(|b| nonneg_matrix(b, "branching")).transpose()?,
        z,
        nimreps: w
            .nimreps
            .map(|ns| ns.into_iter().map(|n| nonneg_matrix(n, "nimrep")).collect::<Result<Vec<_>, _>>())
            .transpose()?,
        dual_fusion,
    };
    ctx.validate_shapes()
        .map_err(|e| InterfaceError::Integrity(e.to_string()))?;
    Ok(ctx)
}

/// Payload of a `chi_table` file: a single table, a double table, or both.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CharacterTables {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub single: Option<ChiTable>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub double: Option<DoubleCharTable>,
}

pub fn encode_chi_tables(t: &CharacterTables) -> DataFile {
    DataFile::new(Kind::ChiTable, t)
}

pub fn decode_chi_tables(f: &DataFile) -> Result<CharacterTables, InterfaceError> {
    parse(f.expect(Kind::ChiTable)?)
}

pub fn encode_report<T: Serialize>(report: &T) -> DataFile {
    DataFile::new(Kind::Report, report)
}
