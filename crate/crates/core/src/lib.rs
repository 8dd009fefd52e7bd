//! Developmental Network (DN) control: a three-area network that learns the
//! control of a finite automaton, and through it of a Turing machine, from
//! pattern-level teaching.
//!
//! * [`automata`] and [`tm`] hold the symbolic side: transition tables,
//!   grand-table composition and the lowering of a TM control to an agent FA.
//! * [`codec`] grounds symbols as bit patterns.
//! * [`network`] is the DN itself; [`plasticity`] adds optional synaptic
//!   maintenance.
//! * [`harness`], [`oracle`] and [`metrics`] teach, check and report.

pub mod automata;
pub mod codec;
pub mod fixtures;
pub mod harness;
pub mod metrics;
pub mod network;
pub mod oracle;
pub mod plasticity;
pub mod scalar;
pub mod table_file;
pub mod tm;

use std::path::{Path, PathBuf};

pub use automata::{AutomataError, TransitionTable};
pub use codec::{AttentionMask, BitPattern, CodecError, GroundingMap};
pub use network::{Network, NetworkConfig, NetworkError, Snapshot, StepInput, StepOutput};
pub use plasticity::MaintenanceConfig;
pub use scalar::Scalar;
pub use table_file::TableDocument;

pub type Network64 = Network<f64>;
pub type Network32 = Network<f32>;
pub type NetworkConfig64 = NetworkConfig<f64>;
pub type NetworkConfig32 = NetworkConfig<f32>;
pub type BitPattern64 = BitPattern<f64>;
pub type BitPattern32 = BitPattern<f32>;
pub type GroundingMap64 = GroundingMap<f64>;
pub type GroundingMap32 = GroundingMap<f32>;
pub type Snapshot64 = Snapshot<f64>;
pub type Snapshot32 = Snapshot<f32>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Automata(#[from] AutomataError),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("table file has no bit patterns")]
    MissingPatterns,
    #[error("{0}")]
    Invalid(String),
}

impl Error {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Error::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}
