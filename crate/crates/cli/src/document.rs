//! JSON form of a tiling.

use aztec_core::geometry::{Domino, GeometryError, Orientation, Tiling};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("malformed tiling document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported format version {0} (expected {FORMAT_VERSION})")]
    Version(u32),
    #[error("document does not describe a tiling: {0}")]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrientationTag {
    Horizontal,
    Vertical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DominoRecord {
    pub x: i32,
    pub y: i32,
    pub orientation: OrientationTag,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TilingDocument {
    pub format_version: u32,
    pub order: u32,
    pub bias: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub dominoes: Vec<DominoRecord>,
}

impl From<Domino> for DominoRecord {
    fn from(d: Domino) -> Self {
        DominoRecord {
            x: d.anchor.x,
            y: d.anchor.y,
            orientation: match d.orientation {
                Orientation::Horizontal => OrientationTag::Horizontal,
                Orientation::Vertical => OrientationTag::Vertical,
            },
        }
    }
}

impl From<DominoRecord> for Domino {
    fn from(r: DominoRecord) -> Self {
        match r.orientation {
            OrientationTag::Horizontal => Domino::horizontal(r.x, r.y),
            OrientationTag::Vertical => Domino::vertical(r.x, r.y),
        }
    }
}

impl TilingDocument {
    /// Dominoes are stored in canonical order, so equal tilings serialize
    /// to identical bytes.
    pub fn new(t: &Tiling, bias: f64, seed: Option<u64>) -> Self {
        TilingDocument {
            format_version: FORMAT_VERSION,
            order: t.order(),
            bias,
            seed,
            dominoes: t.canonical().into_iter().map(DominoRecord::from).collect(),
        }
    }

    pub fn to_tiling(&self) -> Result<Tiling, DocumentError> {
        if self.format_version != FORMAT_VERSION {
            return Err(DocumentError::Version(self.format_version));
        }
        let dominoes = self.dominoes.iter().map(|&r| Domino::from(r)).collect();
        Ok(Tiling::new(self.order, dominoes)?)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<Self, DocumentError> {
        Ok(serde_json::from_str(s)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let t = aztec_core::shuffle::generate(6, 0.5, 3).unwrap();
        let doc = TilingDocument::new(&t, 0.5, Some(3));
        let back = TilingDocument::from_json(&doc.to_json()).unwrap();
        assert_eq!(back, doc);
        assert_eq!(back.to_tiling().unwrap(), t);
    }

    #[test]
    fn rejects_bad_documents() {
        let mut doc = TilingDocument::new(&Tiling::all_horizontal(2), 0.5, None);
        doc.dominoes.pop();
        assert!(matches!(doc.to_tiling(), Err(DocumentError::Geometry(_))));
        doc.format_version = 9;
        assert!(matches!(doc.to_tiling(), Err(DocumentError::Version(9))));
        assert!(TilingDocument::from_json("{\"order\": 1}").is_err());
    }

    #[test]
    fn empty_order() {
        let doc = TilingDocument::new(&Tiling::empty(), 0.5, Some(0));
        assert!(doc.dominoes.is_empty());
        assert!(doc.to_json().contains("\"dominoes\": []"));
    }
}
