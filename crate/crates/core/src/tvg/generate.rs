use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::{NodeId, TemporalGraph};

/// Forces `u` and `v` to be d'-twins (at least one common neighbour, outside
/// symmetric difference exactly `d_prime`) at rounds `start .. start+len`, mod p.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Plant {
    pub u: NodeId,
    pub v: NodeId,
    pub start: usize,
    pub len: usize,
    pub d_prime: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenerateError {
    #[error("need at least 2 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("period must be positive")]
    ZeroPeriod,
    #[error("edge probability {0} outside [0, 1]")]
    BadProbability(f64),
    #[error("infeasible plant: {0}")]
    Plant(String),
}

type EdgeSet = BTreeSet<(NodeId, NodeId)>;

fn key(a: NodeId, b: NodeId) -> (NodeId, NodeId) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Random p-periodic graph on nodes `0..n`: each pair is present at each round
/// independently with probability `edge_prob`. Identical arguments give an
/// identical graph.
pub fn generate_random(
    n: usize,
    p: usize,
    edge_prob: f64,
    plant: Option<Plant>,
    seed: u64,
) -> Result<TemporalGraph, GenerateError> {
    if n < 2 {
        return Err(GenerateError::TooFewNodes(n));
    }
    if p == 0 {
        return Err(GenerateError::ZeroPeriod);
    }
    if !(0.0..=1.0).contains(&edge_prob) {
        return Err(GenerateError::BadProbability(edge_prob));
    }
    if let Some(plant) = &plant {
        check_plant(plant, n, p)?;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rounds: Vec<EdgeSet> = Vec::with_capacity(p);
    for _ in 0..p {
        let mut set = EdgeSet::new();
        for a in 0..n as u32 {
            for b in a + 1..n as u32 {
                if rng.random_bool(edge_prob) {
                    set.insert((NodeId(a), NodeId(b)));
                }
            }
        }
        rounds.push(set);
    }

    if let Some(plant) = plant {
        for i in 0..plant.len {
            let t = (plant.start + i) % p;
            plant_round(&mut rounds[t], n, &plant);
        }
    }

    let mut b = TemporalGraph::builder(n, p);
    for v in 0..n as u32 {
        b.push_node(NodeId(v));
    }
    for (t, set) in rounds.iter().enumerate() {
        for &(u, v) in set {
            b.push_edge(t, u, v);
        }
    }
    Ok(b.build().expect("generated graph satisfies invariants"))
}

fn check_plant(plant: &Plant, n: usize, p: usize) -> Result<(), GenerateError> {
    let fail = |m: String| Err(GenerateError::Plant(m));
    if plant.u == plant.v {
        return fail("u and v must differ".into());
    }
    for x in [plant.u, plant.v] {
        if x.0 as usize >= n {
            return fail(format!("node {x} not in 0..{n}"));
        }
    }
    if n < 3 {
        return fail(format!("n = {n} leaves no room for a common neighbour"));
    }
    if plant.start >= p {
        return fail(format!("start {} outside [0, {p})", plant.start));
    }
    if plant.len == 0 || plant.len > p {
        return fail(format!("length {} outside [1, {p}]", plant.len));
    }
    if plant.d_prime > n - 3 {
        return fail(format!(
            "d' = {} exceeds n - 3 = {} (one common neighbour is required)",
            plant.d_prime,
            n - 3
        ));
    }
    Ok(())
}

/// Edits one round in place. Adds a shared neighbour first, then closes or
/// opens distinguishing neighbours until the difference is exactly `d_prime`.
fn plant_round(set: &mut EdgeSet, n: usize, plant: &Plant) {
    let (u, v) = (plant.u, plant.v);
    let others: Vec<NodeId> = (0..n as u32)
        .map(NodeId)
        .filter(|&w| w != u && w != v)
        .collect();
    let nbr = |set: &EdgeSet, x: NodeId| -> BTreeSet<NodeId> {
        others
            .iter()
            .copied()
            .filter(|&w| set.contains(&key(x, w)))
            .collect()
    };

    let a = nbr(set, u);
    let b = nbr(set, v);
    if a.is_disjoint(&b) {
        if let Some(&w) = a.iter().next() {
            set.insert(key(v, w));
        } else if let Some(&w) = b.iter().next() {
            set.insert(key(u, w));
        } else {
            let w = others[0];
            set.insert(key(u, w));
            set.insert(key(v, w));
        }
    }

    loop {
        let a = nbr(set, u);
        let b = nbr(set, v);
        let diff: Vec<NodeId> = a.symmetric_difference(&b).copied().collect();
        if diff.len() == plant.d_prime {
            break;
        }
        if diff.len() > plant.d_prime {
            let w = diff[0];
            if a.contains(&w) {
                set.insert(key(v, w));
            } else {
                set.insert(key(u, w));
            }
        } else if let Some(&w) = others.iter().find(|w| !a.contains(w) && !b.contains(w)) {
            set.insert(key(u, w));
        } else {
            // Every outside node is already a neighbour: turn a shared one
            // into a distinguishing one, keeping at least one shared.
            let shared: Vec<NodeId> = a.intersection(&b).copied().collect();
            debug_assert!(shared.len() >= 2);
            set.remove(&key(v, shared[shared.len() - 1]));
        }
    }
}
