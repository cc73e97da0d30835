use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use super::{Entry, Evaluation, Message, Participant, ProtocolError, SketchEntry, TwinTracker};
use crate::oracle::TwinWindow;
use crate::sketch::{build_sketch, decision_intersection, lemma2_holds, NeighbourhoodSketch, SketchParams};
use crate::tvg::{NodeId, ProblemParams};

/// Sketch-mode participant (`3p` rounds).
///
/// A node learns the ids of its time-`t` neighbours only at the end of round
/// `t`, so its own sketch of `N_t` cannot reach a node two hops away before
/// round `t + 2p`:
///
/// * rounds `[0, p)`: broadcast `(id, degree)`, as in exact mode;
/// * rounds `[p, 2p)`: broadcast the sketch of the own time-`t` neighbourhood;
/// * rounds `[2p, 3p)`: forward `(id, degree, sketch)` for every time-`t`
///   neighbour. Receivers estimate common neighbours from their own sketch
///   and the forwarded one.
#[derive(Clone, Debug)]
pub struct SketchNodeState {
    my_id: NodeId,
    p: usize,
    d: usize,
    params: SketchParams,
    tab: Vec<Vec<Entry>>,
    own: Vec<Option<Arc<NeighbourhoodSketch>>>,
    shared: Vec<BTreeMap<NodeId, Arc<NeighbourhoodSketch>>>,
    candidates: BTreeMap<NodeId, Arc<NeighbourhoodSketch>>,
    nb_msg: usize,
    tracker: TwinTracker,
    next_round: usize,
    trace: Option<Vec<Evaluation>>,
}

impl SketchNodeState {
    pub fn new(my_id: NodeId, p: usize, params: &ProblemParams, sketch: SketchParams) -> Self {
        SketchNodeState {
            my_id,
            p,
            d: params.d(),
            params: sketch,
            tab: vec![Vec::new(); p],
            own: vec![None; p],
            shared: vec![BTreeMap::new(); p],
            candidates: BTreeMap::new(),
            nb_msg: 0,
            tracker: TwinTracker::new(p, params.delta()),
            next_round: 0,
            trace: None,
        }
    }

    pub fn with_trace(mut self) -> Self {
        self.trace = Some(Vec::new());
        self
    }

    pub fn own_sketch(&self, t: usize) -> Option<&NeighbourhoodSketch> {
        self.own[t].as_deref()
    }

    fn last_round(&self) -> usize {
        3 * self.p - 1
    }
}

impl Participant for SketchNodeState {
    fn id(&self) -> NodeId {
        self.my_id
    }

    fn total_rounds(&self) -> usize {
        3 * self.p
    }

    fn on_send(&self, round: usize, current_degree: usize) -> Result<Message, ProtocolError> {
        let p = self.p;
        if round < p {
            Ok(Message::Phase1 {
                sender: self.my_id,
                degree: current_degree,
            })
        } else if round < 2 * p {
            let t = round - p;
            Ok(Message::SketchShare {
                sender: self.my_id,
                sketch: self.own[t].clone().expect("own sketch built after round t"),
            })
        } else if round < 3 * p {
            let t = round - 2 * p;
            let entries = self.tab[t]
                .iter()
                .map(|e| SketchEntry {
                    id: e.id,
                    degree: e.degree,
                    sketch: self.shared[t]
                        .get(&e.id)
                        .cloned()
                        .expect("every time-t neighbour shared its sketch"),
                })
                .collect();
            Ok(Message::SketchForward { entries })
        } else {
            Err(ProtocolError::Terminated {
                round,
                last: self.last_round(),
            })
        }
    }

    fn on_receive(&mut self, msg: &Message, round: usize) -> Result<(), ProtocolError> {
        let p = self.p;
        match msg {
            Message::Phase1 { sender, degree } if round < p => {
                self.tab[round].push(Entry {
                    id: *sender,
                    degree: *degree,
                });
            }
            Message::SketchShare { sender, sketch } if (p..2 * p).contains(&round) => {
                self.shared[round - p].insert(*sender, Arc::clone(sketch));
            }
            Message::SketchForward { entries } if (2 * p..3 * p).contains(&round) => {
                self.nb_msg += 1;
                for e in entries.iter().filter(|e| e.id != self.my_id) {
                    self.candidates.entry(e.id).or_insert_with(|| Arc::clone(&e.sketch));
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

    fn end_of_round(&mut self, round: usize, _current_degree: usize) -> Result<(), ProtocolError> {
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
        let p = self.p;
        if round < p {
            let ids = self.tab[round].iter().map(|e| e.id);
            self.own[round] = Some(Arc::new(build_sketch(ids, &self.params)));
            return Ok(());
        }
        if round < 2 * p {
            return Ok(());
        }

        let t = round - 2 * p;
        let own = self.own[t].clone().expect("built in the first period");
        let adjacent: BTreeSet<NodeId> = self.tab[t].iter().map(|e| e.id).collect();
        let mut verdicts = BTreeMap::new();
        for (&id, sketch) in &self.candidates {
            let is_adj = adjacent.contains(&id);
            let (common, exact) = decision_intersection(&own, sketch)?;
            let twin = lemma2_holds(own.exact_size(), sketch.exact_size(), is_adj, common, self.d);
            verdicts.insert(id, twin);
            if let Some(trace) = &mut self.trace {
                let adj = i64::from(is_adj);
                trace.push(Evaluation {
                    time: t,
                    peer: id,
                    value: (own.exact_size() as i64 - adj) + (sketch.exact_size() as i64 - adj)
                        - 2 * common as i64,
                    common,
                    twin,
                    exact,
                });
            }
        }
        self.tracker.record(t, round, &verdicts);
        self.candidates.clear();
        self.nb_msg = 0;
        Ok(())
    }

    fn finalize(&self) -> Result<BTreeSet<TwinWindow>, ProtocolError> {
        if self.next_round != 3 * self.p {
            return Err(ProtocolError::NotFinished {
                completed: self.next_round,
                total: 3 * self.p,
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
