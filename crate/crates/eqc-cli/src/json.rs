//! Versioned JSON interchange.

use doctrines::doctrine::{Doctrine, DoctrineData};
use doctrines::fincat::{ArrowInfo, ProductEntry, WindowData};
use doctrines::infsl::InfslData;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SCHEMA: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonDocument {
    pub schema: u32,
    pub name: String,
    #[serde(default)]
    pub provenance: String,
    pub objects: Vec<String>,
    pub arrows: Vec<ArrowInfo>,
    pub identities: Vec<usize>,
    /// `[g, f, g . f]` for every composable pair.
    pub comp: Vec<(usize, usize, usize)>,
    pub products: Vec<ProductEntry>,
    pub fibers: Vec<InfslData>,
    pub reindex: Vec<Vec<usize>>,
    pub delta: Vec<Option<usize>>,
}

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("malformed JSON: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("unsupported schema version {0} (expected {SCHEMA})")]
    Schema(u64),
    #[error("invalid doctrine: {0}")]
    Invalid(String),
}

pub fn to_document(p: &Doctrine, provenance: &str) -> JsonDocument {
    let d = p.to_data();
    JsonDocument {
        schema: SCHEMA,
        name: d.name,
        provenance: provenance.to_string(),
        objects: d.window.objects,
        arrows: d.window.arrows,
        identities: d.window.identities,
        comp: d.window.composition,
        products: d.window.products,
        fibers: d.fibers,
        reindex: d.reindex,
        delta: d.delta,
    }
}

pub fn to_json(p: &Doctrine, provenance: &str) -> String {
    serde_json::to_string_pretty(&to_document(p, provenance)).expect("documents serialize")
}

pub fn from_document(d: JsonDocument) -> Result<Doctrine, JsonError> {
    let data = DoctrineData {
        name: d.name,
        window: WindowData {
            objects: d.objects,
            arrows: d.arrows,
            identities: d.identities,
            composition: d.comp,
            products: d.products,
        },
        fibers: d.fibers,
        reindex: d.reindex,
        delta: d.delta,
    };
    Doctrine::from_data(&data).map_err(|e| JsonError::Invalid(e.to_string()))
}

/// Parse a document, rejecting unknown schema versions before anything else.
pub fn from_json(text: &str) -> Result<(Doctrine, String), JsonError> {
    let v: serde_json::Value = serde_json::from_str(text)?;
    match v.get("schema").and_then(serde_json::Value::as_u64) {
        Some(1) => {}
        Some(n) => return Err(JsonError::Schema(n)),
        None => return Err(JsonError::Invalid("missing \"schema\" field".into())),
    }
    let d: JsonDocument = serde_json::from_value(v)?;
    let prov = d.provenance.clone();
    Ok((from_document(d)?, prov))
}

#[cfg(test)]
mod tests {
    use super::*;
    use doctrines::fixtures::{finset_weaksub, two};

    #[test]
    fn round_trip() {
        for p in [two(), finset_weaksub(2)] {
            let (q, prov) = from_json(&to_json(&p, "fixture")).unwrap();
            assert_eq!(q.to_data(), p.to_data());
            assert_eq!(prov, "fixture");
        }
    }

    #[test]
    fn unknown_schema_rejected() {
        let text = to_json(&two(), "").replacen("\"schema\": 1", "\"schema\": 2", 1);
        assert!(matches!(from_json(&text), Err(JsonError::Schema(2))));
    }
}
