//! Barrier-synchronous round engine.
//!
//! Every round has three strict phases: all nodes produce a message from their
//! pre-round state (told only their current degree), each message is delivered
//! to every current neighbour of its sender, then every node runs its
//! end-of-round hook. After the last round each node is finalized.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::Execution;
use crate::oracle::{TwinWindow, WindowMap};
use crate::protocol::{Evaluation, Message, NodeState, Participant, ProtocolError, SketchNodeState};
use crate::sketch::SketchParams;
use crate::tvg::{NodeId, ParamsError, ProblemParams, TemporalGraph};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Exact,
    Sketch,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Exact => "exact",
            Mode::Sketch => "sketch",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error(transparent)]
    Params(#[from] ParamsError),
    #[error("sketch mode requires sketch parameters")]
    MissingSketchParams,
    #[error("node {node}: {source}")]
    Protocol { node: NodeId, source: ProtocolError },
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub params: ProblemParams,
    pub mode: Mode,
    pub sketch_params: Option<SketchParams>,
    pub seed: u64,
    pub collect_stats: bool,
    pub execution: Execution,
    /// Keep every per-pair evaluation in the result.
    pub trace: bool,
}

impl RunConfig {
    pub fn exact(params: ProblemParams) -> Self {
        RunConfig {
            params,
            mode: Mode::Exact,
            sketch_params: None,
            seed: 0,
            collect_stats: true,
            execution: Execution::default(),
            trace: false,
        }
    }

    pub fn sketch(params: ProblemParams, sketch_params: SketchParams) -> Self {
        RunConfig {
            mode: Mode::Sketch,
            sketch_params: Some(sketch_params),
            seed: sketch_params.hash_seed,
            ..RunConfig::exact(params)
        }
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn with_trace(mut self) -> Self {
        self.trace = true;
        self
    }

    pub fn validate(&self, g: &TemporalGraph) -> Result<(), SimError> {
        ProblemParams::new(self.params.delta(), self.params.d(), g.period())?;
        if self.mode == Mode::Sketch && self.sketch_params.is_none() {
            return Err(SimError::MissingSketchParams);
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundStat {
    pub round: usize,
    /// Point-to-point deliveries.
    pub messages: u64,
    pub max_bits: u64,
    pub total_bits: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundStats {
    pub n: usize,
    pub max_degree: usize,
    pub id_width: u32,
    /// `max_degree * 2 * id_width`: largest exact forwarding message.
    pub lemma1_bound: u64,
    pub total_messages: u64,
    pub total_bits: u64,
    pub max_message_bits: u64,
    /// Largest delivered forwarding message (phase 2, or the sketch forward).
    pub max_forward_bits: u64,
    /// Largest per-entry payload of a delivered forwarding message.
    pub max_entry_bits: u64,
    pub rounds: Vec<RoundStat>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunResult {
    pub windows: WindowMap,
    pub stats: RoundStats,
    pub rounds_executed: usize,
    /// Per node, windows detected during the run with their detection round.
    pub realtime: BTreeMap<NodeId, Vec<(TwinWindow, usize)>>,
    /// Per node and time, the peers it judged to be d-twins.
    pub decisions: BTreeMap<NodeId, Vec<BTreeSet<NodeId>>>,
    /// Populated when the config asked for a trace.
    pub evaluations: BTreeMap<NodeId, Vec<Evaluation>>,
}

/// Runs the protocol selected by `config` on `g`.
pub fn run(g: &TemporalGraph, config: &RunConfig) -> Result<RunResult, SimError> {
    config.validate(g)?;
    let p = g.period();
    match config.mode {
        Mode::Exact => {
            let states = g
                .nodes()
                .iter()
                .map(|&v| {
                    let s = NodeState::new(v, p, &config.params);
                    if config.trace {
                        s.with_trace()
                    } else {
                        s
                    }
                })
                .collect();
            drive(g, states, config.execution)
        }
        Mode::Sketch => {
            let sp = config.sketch_params.ok_or(SimError::MissingSketchParams)?;
            let states = g
                .nodes()
                .iter()
                .map(|&v| {
                    let s = SketchNodeState::new(v, p, &config.params, sp);
                    if config.trace {
                        s.with_trace()
                    } else {
                        s
                    }
                })
                .collect();
            drive(g, states, config.execution)
        }
    }
}

fn protocol_err(node: NodeId) -> impl Fn(ProtocolError) -> SimError {
    move |source| SimError::Protocol { node, source }
}

/// Drives `states` (one per node of `g`, in node order) through all rounds.
pub fn drive<P: Participant>(
    g: &TemporalGraph,
    mut states: Vec<P>,
    exec: Execution,
) -> Result<RunResult, SimError> {
    let nodes = g.nodes();
    assert_eq!(states.len(), nodes.len(), "one participant per node");
    let total_rounds = states.first().map_or(2 * g.period(), P::total_rounds);
    let width = g.id_width();
    let max_degree = g.max_degree();
    let mut stats = RoundStats {
        n: g.n(),
        max_degree,
        id_width: width,
        lemma1_bound: max_degree as u64 * 2 * u64::from(width),
        ..RoundStats::default()
    };

    // neighbour indices per round of the period
    let nbr_index: Vec<Vec<Vec<usize>>> = (0..g.period())
        .map(|t| {
            (0..nodes.len())
                .map(|i| {
                    g.neighbours_by_index(i, t)
                        .iter()
                        .map(|&w| g.index_of(w).expect("neighbour is a node"))
                        .collect()
                })
                .collect()
        })
        .collect();

    for round in 0..total_rounds {
        let nbrs = &nbr_index[round % g.period()];

        let outgoing: Vec<Message> = {
            let states = &states;
            exec.map_range(0..nodes.len(), |i| states[i].on_send(round, nbrs[i].len()))
                .into_iter()
                .enumerate()
                .map(|(i, m)| m.map_err(protocol_err(nodes[i])))
                .collect::<Result<_, _>>()?
        };

        let mut rs = RoundStat {
            round,
            ..RoundStat::default()
        };
        for (i, msg) in outgoing.iter().enumerate() {
            let fanout = nbrs[i].len() as u64;
            if fanout == 0 {
                continue;
            }
            let bits = msg.bit_size(width);
            rs.messages += fanout;
            rs.total_bits += fanout * bits;
            rs.max_bits = rs.max_bits.max(bits);
            if msg.is_forwarding() {
                stats.max_forward_bits = stats.max_forward_bits.max(bits);
                if let Some(e) = msg.max_entry_bits(width) {
                    stats.max_entry_bits = stats.max_entry_bits.max(e);
                }
            }
        }
        stats.total_messages += rs.messages;
        stats.total_bits += rs.total_bits;
        stats.max_message_bits = stats.max_message_bits.max(rs.max_bits);
        stats.rounds.push(rs);

        let outgoing = &outgoing;
        exec.map_mut(&mut states, |i, s| -> Result<(), ProtocolError> {
            for &j in &nbrs[i] {
                s.on_receive(&outgoing[j], round)?;
            }
            s.end_of_round(round, nbrs[i].len())
        })
        .into_iter()
        .enumerate()
        .try_for_each(|(i, r)| r.map_err(protocol_err(nodes[i])))?;
    }

    let mut windows = WindowMap::new();
    let mut realtime = BTreeMap::new();
    let mut decisions = BTreeMap::new();
    let mut evaluations = BTreeMap::new();
    for s in &states {
        let id = s.id();
        windows.insert(id, s.finalize().map_err(protocol_err(id))?);
        realtime.insert(id, s.tracker().realtime_log().to_vec());
        decisions.insert(id, s.tracker().d_twins_round().to_vec());
        if !s.evaluations().is_empty() {
            evaluations.insert(id, s.evaluations().to_vec());
        }
    }

    Ok(RunResult {
        windows,
        stats,
        rounds_executed: total_rounds,
        realtime,
        decisions,
        evaluations,
    })
}
