//! Oracle files: the 4-byte magic `DSO\0`, a little-endian `u32` format
//! version, then the bincode encoding (fixed-width little-endian integers) of
//! [`SavedOracle`].

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::compact::CompactOracle;
use crate::error::{DsoError, Result};
use crate::graph::WeightedDigraph;
use crate::sparse::{BaselineOracle, Oracle};

pub const MAGIC: [u8; 4] = *b"DSO\0";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[allow(clippy::large_enum_variant)]
pub enum OracleKind {
    Baseline(BaselineOracle),
    Compact(CompactOracle),
}

/// A built oracle with the graph it was built from.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SavedOracle {
    pub graph: WeightedDigraph,
    pub oracle: OracleKind,
}

impl OracleKind {
    pub fn as_oracle(&self) -> &dyn Oracle {
        match self {
            OracleKind::Baseline(o) => o,
            OracleKind::Compact(o) => o,
        }
    }
}

impl SavedOracle {
    pub fn oracle(&self) -> &dyn Oracle {
        self.oracle.as_oracle()
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut out = MAGIC.to_vec();
        out.extend_from_slice(&VERSION.to_le_bytes());
        bincode::serialize_into(&mut out, self).map_err(|e| DsoError::Format(e.to_string()))?;
        Ok(out)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 8 || bytes[..4] != MAGIC {
            return Err(DsoError::Format("not an oracle file".into()));
        }
        let version = u32::from_le_bytes(bytes[4..8].try_into().expect("four bytes"));
        if version != VERSION {
            return Err(DsoError::Format(format!("format version {version}, expected {VERSION}")));
        }
        bincode::deserialize(&bytes[8..]).map_err(|e| DsoError::Format(e.to_string()))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_bytes()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_bytes(&std::fs::read(path)?)
    }
}
