//! Machine-readable result documents.
//!
//! Protocol runs and oracle runs produce the same schema, with windows sorted
//! by node then `(peer, start)`, so their JSON renderings can be diffed.

use serde::{Deserialize, Serialize};

use crate::oracle::{TwinWindow, WindowMap};
use crate::simulator::{Mode, RoundStats, RunConfig, RunResult};
use crate::tvg::{NodeId, TemporalGraph};

pub const DOCUMENT_VERSION: &str = "tvg-twins/1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDigest {
    pub n: usize,
    pub p: usize,
    pub max_degree: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SketchBlock {
    pub k: usize,
    pub epsilon: f64,
    pub nu: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamsBlock {
    pub delta: usize,
    pub d: usize,
    pub mode: Mode,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sketch: Option<SketchBlock>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeWindows {
    pub node: NodeId,
    pub twins: Vec<TwinWindow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub version: String,
    pub input: InputDigest,
    pub params: ParamsBlock,
    pub windows: Vec<NodeWindows>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stats: Option<RoundStats>,
}

impl ResultDocument {
    fn new(g: &TemporalGraph, config: &RunConfig, windows: &WindowMap) -> Self {
        ResultDocument {
            version: DOCUMENT_VERSION.to_string(),
            input: InputDigest {
                n: g.n(),
                p: g.period(),
                max_degree: g.max_degree(),
            },
            params: ParamsBlock {
                delta: config.params.delta(),
                d: config.params.d(),
                mode: config.mode,
                seed: config.seed,
                sketch: match config.mode {
                    Mode::Sketch => config.sketch_params.map(|sp| SketchBlock {
                        k: sp.k,
                        epsilon: sp.epsilon,
                        nu: sp.nu,
                    }),
                    Mode::Exact => None,
                },
            },
            windows: windows
                .iter()
                .map(|(&node, set)| NodeWindows {
                    node,
                    twins: set.iter().copied().collect(),
                })
                .collect(),
            stats: None,
        }
    }

    /// Document for a protocol run; stats are included when the config asks.
    pub fn from_run(g: &TemporalGraph, config: &RunConfig, result: &RunResult) -> Self {
        let mut doc = Self::new(g, config, &result.windows);
        if config.collect_stats {
            doc.stats = Some(result.stats.clone());
        }
        doc
    }

    /// Document for oracle output, never carrying stats.
    pub fn from_oracle(g: &TemporalGraph, config: &RunConfig, windows: &WindowMap) -> Self {
        Self::new(g, config, windows)
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("document serializes");
        s.push('\n');
        s
    }

    pub fn twins_of(&self, node: NodeId) -> Option<&[TwinWindow]> {
        self.windows
            .iter()
            .find(|w| w.node == node)
            .map(|w| w.twins.as_slice())
    }
}
