//! Pluggable base community detectors.
//!
//! The pipeline only assumes the [`Detector`] interface: a deterministic
//! map from `(graph, seed)` to a full partition. Two implementations ship:
//! modularity-maximizing Louvain (weight-aware) and a synchronous label
//! propagation detector (weight-blind, mainly to prove the interface).

mod labelprop;
mod louvain;

pub use labelprop::{label_propagation_detect, LabelPropagation};
pub use louvain::{louvain_detect, Louvain};

use crate::error::{Error, Result};
use crate::graph::{Graph, Layer};

/// A base community detection algorithm.
pub trait Detector: Sync {
    fn name(&self) -> &'static str;

    /// Whether the algorithm honors edge weights. Weight-blind detectors
    /// cannot be paired with weight reductions.
    fn supports_weights(&self) -> bool;

    /// Detect one layer. Must return a full partition for any non-empty
    /// graph and be deterministic given `(g, seed)`.
    fn detect(&self, g: &Graph, seed: u64) -> Result<Layer>;
}

/// Shipped detectors, selectable by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetectorKind {
    Louvain,
    LabelPropagation,
}

impl DetectorKind {
    pub fn name(self) -> &'static str {
        self.as_detector().name()
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "louvain" => Ok(DetectorKind::Louvain),
            "labelprop" => Ok(DetectorKind::LabelPropagation),
            other => Err(Error::ConfigError(format!(
                "unknown detector {other:?} (expected louvain or labelprop)"
            ))),
        }
    }

    pub fn as_detector(self) -> &'static dyn Detector {
        match self {
            DetectorKind::Louvain => &Louvain,
            DetectorKind::LabelPropagation => &LabelPropagation,
        }
    }
}
