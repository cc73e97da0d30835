//! Centralized brute-force ground truth.
//!
//! Everything here is computed directly from neighbourhood sets of the whole
//! graph. Nothing is shared with the distributed protocol, so the two can be
//! checked against each other.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::Execution;
use crate::tvg::{GraphError, NodeId, ProblemParams, TemporalGraph};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("a node is never its own twin ({0})")]
    SameNode(NodeId),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("nodes {u} and {v} share no neighbour at time {t}")]
    NoCommonNeighbour { u: NodeId, v: NodeId, t: usize },
}

/// Neighbourhood comparison of a pair at one instant.
///
/// With `A = N_t(u) \ {u,v}` and `B = N_t(v) \ {u,v}`: `k = |A ∪ B|`,
/// `n_p = |A ∩ B|` and `value = |A| + |B| - 2|A ∩ B|`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PairProfile {
    pub k: usize,
    pub n_p: usize,
    pub value: usize,
}

/// `peer` is a d-twin at every instant `start, start+1, ..., start+Δ-1` (mod p).
#[derive(
    Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub struct TwinWindow {
    pub peer: NodeId,
    pub start: usize,
}

impl TwinWindow {
    pub fn new(peer: NodeId, start: usize) -> Self {
        TwinWindow { peer, start }
    }
}

pub type WindowMap = BTreeMap<NodeId, BTreeSet<TwinWindow>>;

fn outside(g: &TemporalGraph, x: NodeId, u: NodeId, v: NodeId, t: usize) -> Result<BTreeSet<NodeId>, GraphError> {
    let mut s = g.neighbours(x, t)?;
    s.remove(&u);
    s.remove(&v);
    Ok(s)
}

fn check_pair(g: &TemporalGraph, u: NodeId, v: NodeId) -> Result<(), OracleError> {
    g.index_of(u)?;
    g.index_of(v)?;
    if u == v {
        return Err(OracleError::SameNode(u));
    }
    Ok(())
}

pub fn pair_profile(g: &TemporalGraph, u: NodeId, v: NodeId, t: usize) -> Result<PairProfile, OracleError> {
    check_pair(g, u, v)?;
    let a = outside(g, u, u, v, t)?;
    let b = outside(g, v, u, v, t)?;
    let n_p = a.intersection(&b).count();
    Ok(PairProfile {
        k: a.union(&b).count(),
        n_p,
        value: a.len() + b.len() - 2 * n_p,
    })
}

/// At least one common neighbour and `value <= d`.
pub fn is_d_twin(g: &TemporalGraph, u: NodeId, v: NodeId, t: usize, d: usize) -> Result<bool, OracleError> {
    let prof = pair_profile(g, u, v, t)?;
    Ok(prof.n_p >= 1 && prof.value <= d)
}

/// Path-counting characterisation: `d >= k` or at least `k - d` paths of
/// length two. Paths are enumerated over midpoints, independently of the
/// set algebra in [`pair_profile`]. Requires a common neighbour.
pub fn prop1_check(g: &TemporalGraph, u: NodeId, v: NodeId, t: usize, d: usize) -> Result<bool, OracleError> {
    check_pair(g, u, v)?;
    let mut paths = 0usize;
    let mut k = 0usize;
    for &w in g.nodes() {
        if w == u || w == v {
            continue;
        }
        let uw = g.has_edge(u, w, t);
        let wv = g.has_edge(w, v, t);
        if uw && wv {
            paths += 1;
        }
        if uw || wv {
            k += 1;
        }
    }
    if paths == 0 {
        return Err(OracleError::NoCommonNeighbour { u, v, t: t % g.period() });
    }
    Ok(d >= k || paths >= k - d)
}

/// Every node `v` that is a d-twin of `u` at time `t`.
pub fn d_twins_at(g: &TemporalGraph, u: NodeId, t: usize, d: usize) -> Result<BTreeSet<NodeId>, OracleError> {
    let mut out = BTreeSet::new();
    for &v in g.nodes() {
        if v != u && is_d_twin(g, u, v, t, d)? {
            out.insert(v);
        }
    }
    Ok(out)
}

/// All (Δ,d)-twin windows of every node, every valid start in `[0, p)`.
pub fn all_windows(g: &TemporalGraph, params: &ProblemParams) -> WindowMap {
    all_windows_with(g, params, Execution::default())
}

pub fn all_windows_with(g: &TemporalGraph, params: &ProblemParams, exec: Execution) -> WindowMap {
    let p = g.period();
    let delta = params.delta();
    let nodes = g.nodes();

    // Each u handles the pairs (u, v) with v > u; both directions are emitted.
    let found: Vec<Vec<(NodeId, NodeId, usize)>> = exec.map_range(0..nodes.len(), |i| {
        let u = nodes[i];
        let mut out = Vec::new();
        for &v in &nodes[i + 1..] {
            let flags: Vec<bool> = (0..p)
                .map(|t| is_d_twin(g, u, v, t, params.d()).expect("valid pair"))
                .collect();
            for t0 in 0..p {
                if (0..delta).all(|i| flags[(t0 + i) % p]) {
                    out.push((u, v, t0));
                }
            }
        }
        out
    });

    let mut map: WindowMap = nodes.iter().map(|&v| (v, BTreeSet::new())).collect();
    for (u, v, t0) in found.into_iter().flatten() {
        map.get_mut(&u).unwrap().insert(TwinWindow::new(v, t0));
        map.get_mut(&v).unwrap().insert(TwinWindow::new(u, t0));
    }
    map
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{self, cycle, path, U, V};
    use crate::tvg::generate_random;
    use proptest::prelude::*;

    fn n(x: u32) -> NodeId {
        NodeId(x)
    }

    #[test]
    fn path3_profile() {
        let g = path(3);
        let prof = pair_profile(&g, n(1), n(3), 0).unwrap();
        assert_eq!(prof, PairProfile { k: 1, n_p: 1, value: 0 });
        assert!(is_d_twin(&g, n(1), n(3), 0, 0).unwrap());
        assert!(prop1_check(&g, n(1), n(3), 0, 0).unwrap());
    }

    #[test]
    fn path4_profiles() {
        let g = path(4);
        let prof = pair_profile(&g, n(1), n(3), 0).unwrap();
        assert_eq!(prof, PairProfile { k: 2, n_p: 1, value: 1 });
        for d in 0..5 {
            assert!(!is_d_twin(&g, n(1), n(4), 0, d).unwrap());
        }
    }

    #[test]
    fn overlapping_neighbourhoods() {
        // u=0, v=1, N(u)={2,3,4}, N(v)={3,4,5}
        let g = TemporalGraph::builder(6, 1)
            .edge(0, 0, 2)
            .edge(0, 0, 3)
            .edge(0, 0, 4)
            .edge(0, 1, 3)
            .edge(0, 1, 4)
            .edge(0, 1, 5)
            .build()
            .unwrap();
        let prof = pair_profile(&g, n(0), n(1), 0).unwrap();
        assert_eq!(prof, PairProfile { k: 4, n_p: 2, value: 2 });
        assert!(prop1_check(&g, n(0), n(1), 0, 2).unwrap());
        assert!(!prop1_check(&g, n(0), n(1), 0, 1).unwrap());
        assert!(prop1_check(&g, n(0), n(1), 0, 4).unwrap());
        assert!(prop1_check(&g, n(0), n(1), 0, 9).unwrap());
    }

    #[test]
    fn cycle_twins() {
        use cycle::*;
        let g = fixtures::twelve_cycle_with_twins();
        assert!(is_d_twin(&g, C, C_PRIME, 0, 0).unwrap());
        assert!(is_d_twin(&g, J, J_PRIME, 0, 0).unwrap());
        assert!(!is_d_twin(&g, A, C, 0, 0).unwrap());
        assert!(!is_d_twin(&g, B, D, 0, 0).unwrap());
        let _ = (K, L, I);
    }

    #[test]
    fn error_paths() {
        let g = path(4);
        assert_eq!(pair_profile(&g, n(2), n(2), 0), Err(OracleError::SameNode(n(2))));
        assert!(matches!(pair_profile(&g, n(2), n(9), 0), Err(OracleError::Graph(_))));
        assert!(matches!(
            prop1_check(&g, n(1), n(4), 0, 0),
            Err(OracleError::NoCommonNeighbour { .. })
        ));
    }

    #[test]
    fn wrap_fixture_windows() {
        let g = fixtures::wrap();
        let params = ProblemParams::new(3, 0, 4).unwrap();
        let w = all_windows(&g, &params);
        assert_eq!(w[&U], BTreeSet::from([TwinWindow::new(V, 3)]));
        assert_eq!(w[&V], BTreeSet::from([TwinWindow::new(U, 3)]));
        assert_eq!(pair_profile(&g, U, V, 2).unwrap().value, 1);
    }

    #[test]
    fn path3_windows() {
        let g = path(3);
        let w = all_windows(&g, &ProblemParams::new(1, 0, 1).unwrap());
        assert_eq!(w[&n(1)], BTreeSet::from([TwinWindow::new(n(3), 0)]));
        assert_eq!(w[&n(3)], BTreeSet::from([TwinWindow::new(n(1), 0)]));
        assert!(w[&n(2)].is_empty());
    }

    #[test]
    fn full_period_run_reports_every_start() {
        // u=0, v=1 share neighbour 2 at every round
        let mut b = TemporalGraph::builder(3, 5);
        for t in 0..5 {
            b.push_edge(t, n(0), n(2));
            b.push_edge(t, n(1), n(2));
        }
        let g = b.build().unwrap();
        let w = all_windows(&g, &ProblemParams::new(5, 0, 5).unwrap());
        let starts: Vec<usize> = w[&n(0)].iter().filter(|w| w.peer == n(1)).map(|w| w.start).collect();
        assert_eq!(starts, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let g = generate_random(25, 6, 0.3, None, 11).unwrap();
        let params = ProblemParams::new(2, 1, 6).unwrap();
        assert_eq!(
            all_windows_with(&g, &params, Execution::Sequential),
            all_windows_with(&g, &params, Execution::Parallel)
        );
    }

    fn small_graph() -> impl Strategy<Value = TemporalGraph> {
        (3usize..12, 1usize..5, prop::sample::select(vec![0.1, 0.3, 0.6]), any::<u64>())
            .prop_map(|(n, p, prob, seed)| generate_random(n, p, prob, None, seed).unwrap())
    }

    proptest! {
        #[test]
        fn prop1_agrees_with_lemma2(g in small_graph(), d in 0usize..5) {
            for t in 0..g.period() {
                for (u, v) in crate::tvg::unordered_pairs(g.nodes()) {
                    let prof = pair_profile(&g, u, v, t).unwrap();
                    let a = outside(&g, u, u, v, t).unwrap();
                    let b = outside(&g, v, u, v, t).unwrap();
                    let sym = a.difference(&b).count() + b.difference(&a).count();
                    prop_assert_eq!(prof.value, sym);
                    prop_assert_eq!(prof.value, prof.k - prof.n_p);
                    if prof.n_p >= 1 {
                        prop_assert_eq!(prop1_check(&g, u, v, t, d).unwrap(), is_d_twin(&g, u, v, t, d).unwrap());
                    }
                    prop_assert_eq!(is_d_twin(&g, u, v, t, d).unwrap(), is_d_twin(&g, v, u, t, d).unwrap());
                    if is_d_twin(&g, u, v, t, d).unwrap() {
                        prop_assert!(is_d_twin(&g, u, v, t, d + 1).unwrap());
                    }
                }
            }
        }

        #[test]
        fn windows_symmetric_and_shift_with_rotation(g in small_graph(), d in 0usize..3, r in 0usize..5, delta_seed in 0usize..100) {
            let p = g.period();
            let params = ProblemParams::new(1 + delta_seed % p, d, p).unwrap();
            let w = all_windows(&g, &params);
            for (u, set) in &w {
                for tw in set {
                    prop_assert!(w[&tw.peer].contains(&TwinWindow::new(*u, tw.start)));
                }
            }
            let rotated = all_windows(&g.rotate(r), &params);
            for (u, set) in &w {
                let shifted: BTreeSet<TwinWindow> = set
                    .iter()
                    .map(|tw| TwinWindow::new(tw.peer, (tw.start + p - r % p) % p))
                    .collect();
                prop_assert_eq!(&shifted, &rotated[u]);
            }
        }
    }
}
