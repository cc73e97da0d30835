//! Protocol-versus-oracle verification.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::exec::Execution;
use crate::oracle::{self, TwinWindow};
use crate::simulator::{run, Mode, RunConfig, SimError};
use crate::tvg::{generate_random, GenerateError, NodeId, ProblemParams, TemporalGraph};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct NodeDiff {
    /// Reported by the oracle, not by the protocol.
    pub missing: BTreeSet<TwinWindow>,
    /// Reported by the protocol, not by the oracle.
    pub extra: BTreeSet<TwinWindow>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct CompareReport {
    pub mode: Mode,
    pub rounds_executed: usize,
    /// Nodes whose window sets differ.
    pub differences: BTreeMap<NodeId, NodeDiff>,
    /// Pair-time decisions (pairs sharing a neighbour at that time).
    pub decisions: usize,
    /// Decisions where the protocol and the oracle disagree.
    pub decision_mismatches: usize,
    /// Decisions whose true value lies within the sketch error band of `d`.
    pub boundary_decisions: usize,
    /// Mismatched decisions outside the error band.
    pub unexplained_mismatches: usize,
}

impl CompareReport {
    /// Total number of differing windows over all nodes.
    pub fn difference_count(&self) -> usize {
        self.differences
            .values()
            .map(|d| d.missing.len() + d.extra.len())
            .sum()
    }

    pub fn is_clean(&self) -> bool {
        self.differences.is_empty()
    }

    pub fn mismatch_rate(&self) -> f64 {
        if self.decisions == 0 {
            0.0
        } else {
            self.decision_mismatches as f64 / self.decisions as f64
        }
    }
}

/// Runs the protocol and the oracle on `g` and reports every disagreement.
pub fn compare_with_oracle(g: &TemporalGraph, config: &RunConfig) -> Result<CompareReport, SimError> {
    let result = run(g, config)?;
    let truth = oracle::all_windows_with(g, &config.params, config.execution);

    let mut report = CompareReport {
        mode: config.mode,
        rounds_executed: result.rounds_executed,
        ..CompareReport::default()
    };
    for (node, expected) in &truth {
        let got = &result.windows[node];
        let diff = NodeDiff {
            missing: expected.difference(got).copied().collect(),
            extra: got.difference(expected).copied().collect(),
        };
        if !diff.missing.is_empty() || !diff.extra.is_empty() {
            report.differences.insert(*node, diff);
        }
    }

    let d = config.params.d();
    let epsilon = match (config.mode, config.sketch_params) {
        (Mode::Sketch, Some(sp)) => Some(sp.epsilon),
        _ => None,
    };
    let nodes = g.nodes();
    let per_node: Vec<(usize, usize, usize, usize)> = config.execution.map(nodes, |&u| {
        let mut tally = (0, 0, 0, 0);
        for t in 0..g.period() {
            let judged = &result.decisions[&u][t];
            for &v in nodes.iter().filter(|&&v| v != u) {
                let prof = oracle::pair_profile(g, u, v, t).expect("distinct known nodes");
                if prof.n_p == 0 {
                    // never a candidate: no forwarder names v
                    debug_assert!(!judged.contains(&v));
                    continue;
                }
                tally.0 += 1;
                let truth = prof.value <= d;
                let boundary = epsilon.is_some_and(|eps| {
                    let scale = g.degree(u, t).unwrap().max(g.degree(v, t).unwrap()) as f64;
                    let band = 2.0 * eps * scale + 1.0;
                    (prof.value as f64 - d as f64).abs() <= band || prof.n_p as f64 <= eps * scale + 1.0
                });
                if boundary {
                    tally.2 += 1;
                }
                if truth != judged.contains(&v) {
                    tally.1 += 1;
                    if !boundary {
                        tally.3 += 1;
                    }
                }
            }
        }
        tally
    });
    for (dec, mis, bnd, unexp) in per_node {
        report.decisions += dec;
        report.decision_mismatches += mis;
        report.boundary_decisions += bnd;
        report.unexplained_mismatches += unexp;
    }
    Ok(report)
}

/// Random-instance shape for batch comparisons.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BatchSpec {
    pub n: usize,
    pub p: usize,
    pub edge_prob: f64,
    pub trials: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct BatchReport {
    pub trials: usize,
    pub instances_with_differences: usize,
    pub total_differences: usize,
    pub decisions: usize,
    pub decision_mismatches: usize,
    pub boundary_decisions: usize,
    pub unexplained_mismatches: usize,
}

impl BatchReport {
    pub fn mismatch_rate(&self) -> f64 {
        if self.decisions == 0 {
            0.0
        } else {
            self.decision_mismatches as f64 / self.decisions as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BatchError {
    #[error(transparent)]
    Generate(#[from] GenerateError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// Seed of trial `i` in a batch started from `seed`.
pub fn trial_seed(seed: u64, trial: usize) -> u64 {
    let mut z = seed ^ (trial as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 33)).wrapping_mul(0xff51_afd7_ed55_8ccd);
    z = (z ^ (z >> 33)).wrapping_mul(0xc4ce_b9fe_1a85_ec53);
    z ^ (z >> 33)
}

/// Compares protocol and oracle on `spec.trials` random instances. Trials run
/// in parallel under the config's execution mode, each on its own derived
/// seed; the aggregate is folded in trial order.
pub fn batch_compare(spec: &BatchSpec, config: &RunConfig) -> Result<BatchReport, BatchError> {
    ProblemParams::new(config.params.delta(), config.params.d(), spec.p).map_err(SimError::from)?;
    let inner = RunConfig {
        execution: Execution::Sequential,
        ..config.clone()
    };
    let reports = config.execution.map_range(0..spec.trials, |trial| {
        let seed = trial_seed(config.seed, trial);
        let g = generate_random(spec.n, spec.p, spec.edge_prob, None, seed)?;
        let mut cfg = inner.clone();
        cfg.seed = seed;
        if let Some(sp) = cfg.sketch_params.as_mut() {
            sp.hash_seed = seed;
        }
        Ok::<_, BatchError>(compare_with_oracle(&g, &cfg)?)
    });

    let mut out = BatchReport {
        trials: spec.trials,
        ..BatchReport::default()
    };
    for r in reports {
        let r = r?;
        if !r.is_clean() {
            out.instances_with_differences += 1;
        }
        out.total_differences += r.difference_count();
        out.decisions += r.decisions;
        out.decision_mismatches += r.decision_mismatches;
        out.boundary_decisions += r.boundary_decisions;
        out.unexplained_mismatches += r.unexplained_mismatches;
    }
    Ok(out)
}
