//! Per-node state machines of the distributed twin protocol.
//!
//! In exact mode a run lasts `2p` rounds. During the first period every node
//! broadcasts its id and current degree; during the second period it forwards,
//! at round `t + p`, the table it collected at round `t`. A node that receives
//! an entry naming `id` from `c` forwarders has `c` common neighbours with
//! `id` at time `t`, which together with the two degrees decides whether the
//! pair is a d-twin at `t`.
//!
//! Sketch mode replaces exact common-neighbour counts with bottom-k sketch
//! estimates and needs a third period (see [`SketchNodeState`]).

mod exact;
mod sketched;
mod tracker;

use std::collections::BTreeSet;
use std::sync::Arc;

use thiserror::Error;

use crate::oracle::TwinWindow;
use crate::sketch::{NeighbourhoodSketch, SketchError};
use crate::tvg::NodeId;

pub use exact::NodeState;
pub use sketched::SketchNodeState;
pub use tracker::TwinTracker;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProtocolError {
    #[error("round {round} is past the last round {last}")]
    Terminated { round: usize, last: usize },
    #[error("round {round} out of order (expected {expected})")]
    OutOfOrder { round: usize, expected: usize },
    #[error("unexpected {kind} message at round {round}")]
    UnexpectedMessage { kind: &'static str, round: usize },
    #[error("finalize called after {completed} of {total} rounds")]
    NotFinished { completed: usize, total: usize },
    #[error(transparent)]
    Sketch(#[from] SketchError),
}

/// One row of a forwarded table: a neighbour and its degree at that time.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Entry {
    pub id: NodeId,
    pub degree: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SketchEntry {
    pub id: NodeId,
    pub degree: usize,
    pub sketch: Arc<NeighbourhoodSketch>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Message {
    /// First period: own id and current degree.
    Phase1 { sender: NodeId, degree: usize },
    /// Second period: the phase-1 table of the matching round, verbatim.
    Phase2 { entries: Vec<Entry> },
    /// Sketch mode, second period: sketch of the sender's own neighbourhood.
    SketchShare {
        sender: NodeId,
        sketch: Arc<NeighbourhoodSketch>,
    },
    /// Sketch mode, third period: each neighbour with its degree and sketch.
    SketchForward { entries: Vec<SketchEntry> },
}

impl Message {
    pub fn kind(&self) -> &'static str {
        match self {
            Message::Phase1 { .. } => "phase-1",
            Message::Phase2 { .. } => "phase-2",
            Message::SketchShare { .. } => "sketch-share",
            Message::SketchForward { .. } => "sketch-forward",
        }
    }

    /// Size under the accounting model where ids and degrees take
    /// `id_width` bits each.
    pub fn bit_size(&self, id_width: u32) -> u64 {
        let w = u64::from(id_width);
        match self {
            Message::Phase1 { .. } => 2 * w,
            Message::Phase2 { entries } => entries.len() as u64 * 2 * w,
            Message::SketchShare { sketch, .. } => w + sketch.bit_size(id_width),
            Message::SketchForward { entries } => entries
                .iter()
                .map(|e| 2 * w + e.sketch.bit_size(id_width))
                .sum(),
        }
    }

    /// Largest per-entry payload of a forwarding message.
    pub fn max_entry_bits(&self, id_width: u32) -> Option<u64> {
        let w = u64::from(id_width);
        match self {
            Message::Phase2 { entries } if !entries.is_empty() => Some(2 * w),
            Message::SketchForward { entries } => entries
                .iter()
                .map(|e| 2 * w + e.sketch.bit_size(id_width))
                .max(),
            _ => None,
        }
    }

    /// Whether this is a forwarding (second-hop) message.
    pub fn is_forwarding(&self) -> bool {
        matches!(self, Message::Phase2 { .. } | Message::SketchForward { .. })
    }
}

/// One twin evaluation made at the end of a forwarding round.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Evaluation {
    pub time: usize,
    pub peer: NodeId,
    /// Neighbourhood difference as computed by the node.
    pub value: i64,
    /// Common-neighbour count (exact mode) or rounded estimate (sketch mode).
    pub common: usize,
    pub twin: bool,
    /// False when the decision rested on a lossy sketch estimate.
    pub exact: bool,
}

/// A protocol participant driven by the round engine.
///
/// Each round the engine calls `on_send` on every node, delivers each message
/// to the sender's current neighbours through `on_receive`, then calls
/// `end_of_round` on every node.
pub trait Participant: Send + Sync {
    fn id(&self) -> NodeId;

    /// Number of rounds the protocol runs for.
    fn total_rounds(&self) -> usize;

    fn on_send(&self, round: usize, current_degree: usize) -> Result<Message, ProtocolError>;

    fn on_receive(&mut self, msg: &Message, round: usize) -> Result<(), ProtocolError>;

    fn end_of_round(&mut self, round: usize, current_degree: usize) -> Result<(), ProtocolError>;

    fn finalize(&self) -> Result<BTreeSet<TwinWindow>, ProtocolError>;

    fn tracker(&self) -> &TwinTracker;

    fn evaluations(&self) -> &[Evaluation];
}
