use std::collections::{BTreeMap, BTreeSet};

use crate::oracle::TwinWindow;
use crate::tvg::NodeId;

/// Run-length bookkeeping of d-twin detections for one node.
///
/// `twins[id]` is the number of consecutive evaluated instants, ending at the
/// latest one, at which `id` was a d-twin. `d_twins_round[t]` keeps every
/// detection so windows wrapping past `p - 1` can be recovered at the end.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwinTracker {
    p: usize,
    delta: usize,
    twins: BTreeMap<NodeId, usize>,
    d_twins_round: Vec<BTreeSet<NodeId>>,
    results: BTreeSet<TwinWindow>,
    realtime_log: Vec<(TwinWindow, usize)>,
}

impl TwinTracker {
    pub fn new(p: usize, delta: usize) -> Self {
        TwinTracker {
            p,
            delta,
            twins: BTreeMap::new(),
            d_twins_round: vec![BTreeSet::new(); p],
            results: BTreeSet::new(),
            realtime_log: Vec::new(),
        }
    }

    /// Applies the verdicts for time `t`, evaluated at engine round `round`.
    /// Ids absent from `verdicts` had no common neighbour and lose their run.
    pub(crate) fn record(&mut self, t: usize, round: usize, verdicts: &BTreeMap<NodeId, bool>) {
        self.twins.retain(|id, _| verdicts.contains_key(id));
        for (&id, &twin) in verdicts {
            if !twin {
                self.twins.remove(&id);
                continue;
            }
            self.d_twins_round[t].insert(id);
            let run = self.twins.entry(id).or_insert(0);
            *run += 1;
            if *run >= self.delta {
                let start = (t + self.p + 1 - self.delta) % self.p;
                let window = TwinWindow::new(id, start);
                if self.results.insert(window) {
                    self.realtime_log.push((window, round));
                }
            }
        }
    }

    pub fn twins(&self) -> &BTreeMap<NodeId, usize> {
        &self.twins
    }

    pub fn d_twins_round(&self) -> &[BTreeSet<NodeId>] {
        &self.d_twins_round
    }

    /// Windows detected while rounds were running (never wrapping).
    pub fn results(&self) -> &BTreeSet<TwinWindow> {
        &self.results
    }

    /// `(window, round at which it was first detected)`.
    pub fn realtime_log(&self) -> &[(TwinWindow, usize)] {
        &self.realtime_log
    }

    /// Every start `t0` such that the peer is recorded at all of
    /// `t0, ..., t0 + Δ - 1` (mod p), merged with the real-time results.
    pub fn windows(&self) -> BTreeSet<TwinWindow> {
        let p = self.p;
        let candidates: BTreeSet<NodeId> = self.d_twins_round.iter().flatten().copied().collect();
        let mut out = self.results.clone();
        let mut run = vec![0usize; p];
        for id in candidates {
            let flags: Vec<bool> = self.d_twins_round.iter().map(|s| s.contains(&id)).collect();
            match flags.iter().position(|&f| !f) {
                None => out.extend((0..p).map(|t0| TwinWindow::new(id, t0))),
                Some(gap) => {
                    // run[t] = length of the true-run starting at t, walking
                    // backwards around the circle from the gap.
                    run[gap] = 0;
                    for step in 1..p {
                        let t = (gap + p - step) % p;
                        run[t] = if flags[t] { run[(t + 1) % p] + 1 } else { 0 };
                    }
                    out.extend(
                        (0..p)
                            .filter(|&t0| run[t0] >= self.delta)
                            .map(|t0| TwinWindow::new(id, t0)),
                    );
                }
            }
        }
        debug_assert!(self.results.iter().all(|w| out.contains(w)));
        out
    }
}
