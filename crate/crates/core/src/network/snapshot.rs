use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Network, NetworkConfig, NetworkError, Neuron, ProjectionArea};
use crate::plasticity::NeuronMaintenance;
use crate::scalar::Scalar;
use crate::Error;

pub const SNAPSHOT_FORMAT: &str = "dn-snapshot";
pub const SNAPSHOT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct NeuronRecord<T> {
    pub vt: Vec<T>,
    pub vb: Vec<T>,
    pub age: u64,
    pub initialized: bool,
    pub top_mask: Vec<bool>,
    pub bottom_mask: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionRecord<T> {
    pub rows: Vec<Vec<T>>,
    pub ages: Vec<u64>,
}

/// Complete, self-describing state of a [`Network`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Snapshot<T> {
    pub format: String,
    pub version: u32,
    pub scalar: String,
    pub config: NetworkConfig<T>,
    pub time: u64,
    pub neurons: Vec<NeuronRecord<T>>,
    pub to_z: ProjectionRecord<T>,
    pub to_x: ProjectionRecord<T>,
    pub y_response: Vec<T>,
    pub pending: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub maintenance: Option<Vec<NeuronMaintenance<T>>>,
    /// Free-form annotations such as provisioning notes.
    #[serde(default)]
    pub labels: BTreeMap<String, String>,
}

impl<T: Scalar> Snapshot<T> {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("snapshots always serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, Error> {
        let snap: Self = serde_json::from_str(text)?;
        snap.validate()?;
        Ok(snap)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), Error> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, Error> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    fn validate(&self) -> Result<(), NetworkError> {
        let bad = |m: String| Err(NetworkError::InvalidSnapshot(m));
        if self.format != SNAPSHOT_FORMAT {
            return bad(format!("unknown format {:?}", self.format));
        }
        if self.version != SNAPSHOT_VERSION {
            return bad(format!("unsupported version {}", self.version));
        }
        if self.scalar != T::NAME {
            return bad(format!("scalar {} cannot load as {}", self.scalar, T::NAME));
        }
        self.config.validate()?;
        let c = &self.config;
        if self.neurons.len() != c.capacity || self.y_response.len() != c.capacity {
            return bad("neuron count differs from capacity".into());
        }
        for (j, n) in self.neurons.iter().enumerate() {
            if n.vt.len() != c.z_dim
                || n.top_mask.len() != c.z_dim
                || n.vb.len() != c.x_dim
                || n.bottom_mask.len() != c.x_dim
            {
                return bad(format!("neuron {j} has wrong dimensions"));
            }
        }
        for (name, p, dim) in [("toZ", &self.to_z, c.z_dim), ("toX", &self.to_x, c.x_dim)] {
            if p.rows.len() != dim
                || p.ages.len() != dim
                || p.rows.iter().any(|r| r.len() != c.capacity)
            {
                return bad(format!("{name} projection has wrong dimensions"));
            }
        }
        match (&c.maintenance, &self.maintenance) {
            (None, None) => {}
            (Some(_), Some(m))
                if m.len() == c.capacity
                    && m.iter().all(|s| s.synapses.len() == c.z_dim + c.x_dim) => {}
            _ => return bad("maintenance state does not match configuration".into()),
        }
        Ok(())
    }
}

impl<T: Scalar> Network<T> {
    pub fn snapshot(&self) -> Snapshot<T> {
        self.snapshot_with_labels(BTreeMap::new())
    }

    pub fn snapshot_with_labels(&self, labels: BTreeMap<String, String>) -> Snapshot<T> {
        let proj = |p: &ProjectionArea<T>| ProjectionRecord {
            rows: p.rows.clone(),
            ages: p.ages.clone(),
        };
        Snapshot {
            format: SNAPSHOT_FORMAT.to_string(),
            version: SNAPSHOT_VERSION,
            scalar: T::NAME.to_string(),
            config: self.config.clone(),
            time: self.time,
            neurons: self
                .neurons
                .iter()
                .map(|n| NeuronRecord {
                    vt: n.top.clone(),
                    vb: n.bottom.clone(),
                    age: n.age,
                    initialized: n.initialized,
                    top_mask: n.top_mask.clone(),
                    bottom_mask: n.bottom_mask.clone(),
                })
                .collect(),
            to_z: proj(&self.to_z),
            to_x: proj(&self.to_x),
            y_response: self.response.clone(),
            pending: self.pending,
            maintenance: self.maintenance.clone(),
            labels,
        }
    }

    pub fn from_snapshot(snap: Snapshot<T>) -> Result<Self, NetworkError> {
        snap.validate()?;
        let proj = |p: ProjectionRecord<T>| ProjectionArea {
            rows: p.rows,
            ages: p.ages,
        };
        Ok(Self {
            neurons: snap
                .neurons
                .into_iter()
                .map(|n| Neuron {
                    top: n.vt,
                    bottom: n.vb,
                    age: n.age,
                    initialized: n.initialized,
                    top_mask: n.top_mask,
                    bottom_mask: n.bottom_mask,
                })
                .collect(),
            to_z: proj(snap.to_z),
            to_x: proj(snap.to_x),
            time: snap.time,
            response: snap.y_response,
            pending: snap.pending,
            maintenance: snap.maintenance,
            config: snap.config,
        })
    }
}
