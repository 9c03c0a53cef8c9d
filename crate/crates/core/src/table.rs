//! Value tables: `v(S)` for every subset of players, plus their file formats.
//!
//! Two interchange formats are supported:
//!
//! * JSON: `{"format":"vtable","version":1,"n":..,"players":[..],
//!   "ordering":"bitmask-lsb","values":[..],"baseline_note":..}`
//! * binary: magic `VTBL`, `u16` version (= 1), `u16` n, then `2^n`
//!   float64 values, all little-endian, in ascending mask order.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::lattice::{check_n, LatticeVector, Subset};

pub const ORDERING: &str = "bitmask-lsb";
pub const BINARY_MAGIC: &[u8; 4] = b"VTBL";
pub const FORMAT_VERSION: u16 = 1;

/// A scalar game over `n` players.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueTable {
    players: Vec<String>,
    values: LatticeVector,
    baseline_note: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Json,
    Binary,
}

impl TableFormat {
    /// `.bin` and `.vtbl` select binary; anything else is JSON.
    pub fn from_path(path: &Path) -> TableFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some("bin") | Some("vtbl") => TableFormat::Binary,
            _ => TableFormat::Json,
        }
    }
}

pub fn default_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("x{i}")).collect()
}

impl ValueTable {
    pub fn new(players: Vec<String>, values: LatticeVector, baseline_note: Option<String>) -> Result<Self> {
        if players.len() != values.n() {
            return Err(Error::MalformedTable(format!(
                "{} player labels for n = {}",
                players.len(),
                values.n()
            )));
        }
        Ok(Self {
            players,
            values,
            baseline_note,
        })
    }

    /// Table with labels `x0..x{n-1}` and no provenance note.
    pub fn from_values(values: LatticeVector) -> Self {
        Self {
            players: default_labels(values.n()),
            values,
            baseline_note: None,
        }
    }

    pub fn from_vec(values: Vec<f64>) -> Result<Self> {
        Ok(Self::from_values(LatticeVector::from_vec(values)?))
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.baseline_note = Some(note.into());
        self
    }

    pub fn with_players(mut self, players: Vec<String>) -> Result<Self> {
        if players.len() != self.n() {
            return Err(Error::MalformedTable(format!(
                "{} player labels for n = {}",
                players.len(),
                self.n()
            )));
        }
        self.players = players;
        Ok(self)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.values.n()
    }

    pub fn players(&self) -> &[String] {
        &self.players
    }

    pub fn values(&self) -> &LatticeVector {
        &self.values
    }

    pub fn baseline_note(&self) -> Option<&str> {
        self.baseline_note.as_deref()
    }

    #[inline]
    pub fn value(&self, s: Subset) -> f64 {
        self.values.get(s)
    }

    /// `v(∅)`, every player masked.
    pub fn empty_value(&self) -> f64 {
        self.values[0usize]
    }

    /// `v(N)`, the unmasked input.
    pub fn full_value(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// `max(1, ‖v‖∞)`, the scale used by relative tolerances.
    pub fn scale(&self) -> f64 {
        self.values.norm_inf().max(1.0)
    }

    pub fn member_labels(&self, s: Subset) -> Vec<String> {
        s.members().map(|i| self.players[i].clone()).collect()
    }

    /// `sha256:<hex>` of the binary encoding.
    pub fn digest(&self) -> String {
        let bytes = self.to_binary();
        format!("sha256:{}", hex::encode(Sha256::digest(&bytes)))
    }

    pub fn save(&self, format: TableFormat) -> Vec<u8> {
        match format {
            TableFormat::Json => self.to_json(),
            TableFormat::Binary => self.to_binary(),
        }
    }

    pub fn load(bytes: &[u8], format: TableFormat) -> Result<Self> {
        match format {
            TableFormat::Json => Self::from_json(bytes),
            TableFormat::Binary => Self::from_binary(bytes),
        }
    }

    /// Detects the format from the leading magic bytes.
    pub fn load_auto(bytes: &[u8]) -> Result<Self> {
        if bytes.starts_with(BINARY_MAGIC) {
            Self::from_binary(bytes)
        } else {
            Self::from_json(bytes)
        }
    }

    pub fn read_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::load_auto(&std::fs::read(path)?)
    }

    pub fn write_file(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.save(TableFormat::from_path(path)))?;
        Ok(())
    }

    fn to_json(&self) -> Vec<u8> {
        let doc = TableDoc {
            format: "vtable".into(),
            version: FORMAT_VERSION,
            n: self.n(),
            players: Some(self.players.clone()),
            ordering: Some(ORDERING.into()),
            values: self.values.as_slice().to_vec(),
            baseline_note: self.baseline_note.clone(),
        };
        let mut out = serde_json::to_vec_pretty(&doc).expect("table serializes");
        out.push(b'\n');
        out
    }

    fn from_json(bytes: &[u8]) -> Result<Self> {
        let doc: TableDoc = serde_json::from_slice(bytes)
            .map_err(|e| Error::MalformedTable(format!("invalid JSON header: {e}")))?;
        if doc.format != "vtable" {
            return Err(Error::MalformedTable(format!("unexpected format {:?}", doc.format)));
        }
        if doc.version != FORMAT_VERSION {
            return Err(Error::MalformedTable(format!("unsupported version {}", doc.version)));
        }
        if let Some(ordering) = &doc.ordering {
            if ordering != ORDERING {
                return Err(Error::MalformedTable(format!("unsupported ordering {ordering:?}")));
            }
        }
        check_n(doc.n)?;
        let values = LatticeVector::new(doc.n, doc.values)?;
        let players = doc.players.unwrap_or_else(|| default_labels(doc.n));
        Self::new(players, values, doc.baseline_note)
    }

    fn to_binary(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(8 + 8 * self.values.len());
        out.extend_from_slice(BINARY_MAGIC);
        out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        out.extend_from_slice(&(self.n() as u16).to_le_bytes());
        for x in self.values.as_slice() {
            out.extend_from_slice(&x.to_le_bytes());
        }
        out
    }

    fn from_binary(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 8 || &bytes[..4] != BINARY_MAGIC {
            return Err(Error::MalformedTable("missing VTBL magic".into()));
        }
        let version = u16::from_le_bytes([bytes[4], bytes[5]]);
        if version != FORMAT_VERSION {
            return Err(Error::MalformedTable(format!("unsupported version {version}")));
        }
        let n = u16::from_le_bytes([bytes[6], bytes[7]]) as usize;
        check_n(n)?;
        let body = &bytes[8..];
        let expected = 1usize << n;
        if body.len() % 8 != 0 {
            return Err(Error::MalformedTable(format!(
                "payload of {} bytes is not a whole number of float64 values",
                body.len()
            )));
        }
        if body.len() / 8 != expected {
            return Err(Error::LengthMismatch {
                expected,
                actual: body.len() / 8,
            });
        }
        let values = body
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Ok(Self::from_values(LatticeVector::new(n, values)?))
    }
}

#[derive(Serialize, Deserialize)]
struct TableDoc {
    format: String,
    version: u16,
    n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    players: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ordering: Option<String>,
    values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    baseline_note: Option<String>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_roundtrip_and_contract() {
        let vt = ValueTable::from_vec(vec![0.0, 1.0, 2.0, 5.0]).unwrap();
        let bytes = vt.save(TableFormat::Json);
        let text = String::from_utf8(bytes.clone()).unwrap();
        assert!(text.contains("\"ordering\": \"bitmask-lsb\""));
        let back = ValueTable::load(&bytes, TableFormat::Json).unwrap();
        assert_eq!(back, vt);
        assert_eq!(back.n(), 2);
    }

    #[test]
    fn json_length_mismatch() {
        let src = r#"{"format":"vtable","version":1,"n":2,"ordering":"bitmask-lsb","values":[0,1,2]}"#;
        let err = ValueTable::load(src.as_bytes(), TableFormat::Json).unwrap_err();
        assert_eq!(err.to_string(), "length mismatch: expected 4, got 3");
    }

    #[test]
    fn json_rejects_wrong_ordering() {
        let src = r#"{"format":"vtable","version":1,"n":1,"ordering":"gray","values":[0,1]}"#;
        assert!(ValueTable::load(src.as_bytes(), TableFormat::Json).is_err());
    }

    #[test]
    fn binary_roundtrip_n3() {
        let vals: Vec<f64> = (0..8).map(|i| (i as f64).sin() * 1e-3 + 0.1).collect();
        let vt = ValueTable::from_vec(vals).unwrap();
        let bytes = vt.save(TableFormat::Binary);
        assert_eq!(&bytes[..4], b"VTBL");
        assert_eq!(bytes.len(), 8 + 64);
        let back = ValueTable::load_auto(&bytes).unwrap();
        assert_eq!(back.n(), 3);
        for (a, b) in back.values().as_slice().iter().zip(vt.values().as_slice()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn binary_reports_offending_index() {
        let vt = ValueTable::from_vec(vec![1.0, 2.0]).unwrap();
        let mut bytes = vt.save(TableFormat::Binary);
        bytes[16..24].copy_from_slice(&f64::INFINITY.to_le_bytes());
        let err = ValueTable::load_auto(&bytes).unwrap_err();
        assert!(matches!(err, Error::NonFinite { index: 1, .. }));
        bytes.truncate(20);
        assert!(ValueTable::load_auto(&bytes).is_err());
    }

    #[test]
    fn degenerate_zero_players() {
        let vt = ValueTable::from_vec(vec![3.5]).unwrap();
        assert_eq!(vt.n(), 0);
        assert_eq!(vt.empty_value(), vt.full_value());
        for fmt in [TableFormat::Json, TableFormat::Binary] {
            assert_eq!(ValueTable::load(&vt.save(fmt), fmt).unwrap(), vt);
        }
    }
}
