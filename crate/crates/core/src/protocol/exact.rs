use std::collections::{BTreeMap, BTreeSet};

use super::{Entry, Evaluation, Message, Participant, ProtocolError, TwinTracker};
use crate::oracle::TwinWindow;
use crate::tvg::{NodeId, ProblemParams};

/// Exact-mode participant (`2p` rounds).
#[derive(Clone, Debug)]
pub struct NodeState {
    my_id: NodeId,
    p: usize,
    d: usize,
    /// `tab[t]`: phase-1 messages received at round `t`.
    tab: Vec<Vec<Entry>>,
    count: BTreeMap<NodeId, usize>,
    neighbors_info: BTreeMap<NodeId, usize>,
    nb_msg: usize,
    tracker: TwinTracker,
    next_round: usize,
    trace: Option<Vec<Evaluation>>,
}

impl NodeState {
    pub fn new(my_id: NodeId, p: usize, params: &ProblemParams) -> Self {
        NodeState {
            my_id,
            p,
            d: params.d(),
            tab: vec![Vec::new(); p],
            count: BTreeMap::new(),
            neighbors_info: BTreeMap::new(),
            nb_msg: 0,
            tracker: TwinTracker::new(p, params.delta()),
            next_round: 0,
            trace: None,
        }
    }

    /// Records every evaluation made in `end_of_round`.
    pub fn with_trace(mut self) -> Self {
        self.trace = Some(Vec::new());
        self
    }

    pub fn tab(&self) -> &[Vec<Entry>] {
        &self.tab
    }

    pub fn count(&self) -> &BTreeMap<NodeId, usize> {
        &self.count
    }

    pub fn neighbors_info(&self) -> &BTreeMap<NodeId, usize> {
        &self.neighbors_info
    }

    pub fn nb_msg(&self) -> usize {
        self.nb_msg
    }

    fn last_round(&self) -> usize {
        2 * self.p - 1
    }
}

impl Participant for NodeState {
    fn id(&self) -> NodeId {
        self.my_id
    }

    fn total_rounds(&self) -> usize {
        2 * self.p
    }

    fn on_send(&self, round: usize, current_degree: usize) -> Result<Message, ProtocolError> {
        if round < self.p {
            Ok(Message::Phase1 {
                sender: self.my_id,
                degree: current_degree,
            })
        } else if round < 2 * self.p {
            Ok(Message::Phase2 {
                entries: self.tab[round - self.p].clone(),
            })
        } else {
            Err(ProtocolError::Terminated {
                round,
                last: self.last_round(),
            })
        }
    }

    fn on_receive(&mut self, msg: &Message, round: usize) -> Result<(), ProtocolError> {
        match msg {
            Message::Phase1 { sender, degree } if round < self.p => {
                self.tab[round].push(Entry {
                    id: *sender,
                    degree: *degree,
                });
            }
            Message::Phase2 { entries } if (self.p..2 * self.p).contains(&round) => {
                self.nb_msg += 1;
                // Every neighbour lists us in its own table; skip those rows.
                for e in entries.iter().filter(|e| e.id != self.my_id) {
                    *self.count.entry(e.id).or_insert(0) += 1;
                    self.neighbors_info.insert(e.id, e.degree);
                }
            }
            other => {
                return Err(ProtocolError::UnexpectedMessage {
                    kind: other.kind(),
                    round,
                })
            }
        }
        Ok(())
    }

    fn end_of_round(&mut self, round: usize, current_degree: usize) -> Result<(), ProtocolError> {
        if round != self.next_round {
            return Err(ProtocolError::OutOfOrder {
                round,
                expected: self.next_round,
            });
        }
        if round > self.last_round() {
            return Err(ProtocolError::Terminated {
                round,
                last: self.last_round(),
            });
        }
        self.next_round += 1;
        if round < self.p {
            return Ok(());
        }

        let t = round - self.p;
        let adjacent: BTreeSet<NodeId> = self.tab[t].iter().map(|e| e.id).collect();
        let mut verdicts = BTreeMap::new();
        for (&id, &common) in &self.count {
            // Pair members are not each other's outside neighbours.
            let adj = i64::from(adjacent.contains(&id));
            let theirs = self.neighbors_info[&id] as i64;
            let value = (current_degree as i64 - adj) + (theirs - adj) - 2 * common as i64;
            let twin = value <= self.d as i64;
            verdicts.insert(id, twin);
            if let Some(trace) = &mut self.trace {
                trace.push(Evaluation {
                    time: t,
                    peer: id,
                    value,
                    common,
                    twin,
                    exact: true,
                });
            }
        }
        self.tracker.record(t, round, &verdicts);

        self.count.clear();
        self.neighbors_info.clear();
        self.nb_msg = 0;
        Ok(())
    }

    fn finalize(&self) -> Result<BTreeSet<TwinWindow>, ProtocolError> {
        if self.next_round != 2 * self.p {
            return Err(ProtocolError::NotFinished {
                completed: self.next_round,
                total: 2 * self.p,
            });
        }
        Ok(self.tracker.windows())
    }

    fn tracker(&self) -> &TwinTracker {
        &self.tracker
    }

    fn evaluations(&self) -> &[Evaluation] {
        self.trace.as_deref().unwrap_or(&[])
    }
}
