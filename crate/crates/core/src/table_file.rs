//! JSON table files: `states`, `inputs`, row-major `entries`, and optional
//! symbol → bit-string `patterns`.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::automata::TransitionTable;
use crate::codec::GroundingMap;
use crate::scalar::Scalar;
use crate::Error;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableDocument {
    pub states: Vec<String>,
    pub inputs: Vec<String>,
    pub entries: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub patterns: Option<BTreeMap<String, String>>,
}

impl TableDocument {
    pub fn from_table<T: Scalar>(table: &TransitionTable, map: Option<&GroundingMap<T>>) -> Self {
        Self {
            states: table.states().tokens().map(String::from).collect(),
            inputs: table.inputs().tokens().map(String::from).collect(),
            entries: table.rows(),
            patterns: map.map(GroundingMap::to_bit_strings),
        }
    }

    pub fn table(&self) -> Result<TransitionTable, Error> {
        Ok(TransitionTable::from_tokens(
            self.states.iter().cloned(),
            self.inputs.iter().cloned(),
            self.entries.iter().map(|r| r.iter()),
        )?)
    }

    pub fn grounding<T: Scalar>(&self) -> Result<Option<GroundingMap<T>>, Error> {
        let Some(patterns) = &self.patterns else {
            return Ok(None);
        };
        Ok(Some(GroundingMap::from_bit_strings(
            &self.table()?,
            patterns,
        )?))
    }

    /// Table plus grounding; fails when the document carries no patterns.
    pub fn load_grounded<T: Scalar>(&self) -> Result<(TransitionTable, GroundingMap<T>), Error> {
        let table = self.table()?;
        let map = self.grounding()?.ok_or(Error::MissingPatterns)?;
        Ok((table, map))
    }

    /// Canonical text form: pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("table documents always serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, Error> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self, Error> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<(), Error> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }
}
