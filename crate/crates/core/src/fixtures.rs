//! Small hand-checked graphs shared by unit tests, the acceptance suite and
//! the command-line tests.

use crate::tvg::{id_width, parse_tel, NodeId, TemporalGraph};

pub const U: NodeId = NodeId(0);
pub const V: NodeId = NodeId(1);
pub const W: NodeId = NodeId(2);
pub const X: NodeId = NodeId(3);

/// Four nodes `u=0, v=1, w=2, x=3`, period 4. Rounds 0, 1 and 3 carry
/// `{u,w},{v,w}`; round 2 adds `{u,x}` and `{w,x}`, which breaks the u/v
/// 0-twin relation at time 2 only. With Δ=3, d=0 the single window for `u`
/// is `(v, 3)`, straddling the period boundary.
pub const WRAP_TEL: &str = "\
# wrap-around fixture: u=0 v=1 w=2 x=3
p=4 n=4
0 0 2
0 1 2
1 0 2
1 1 2
2 0 2
2 1 2
2 0 3
2 2 3
3 0 2
3 1 2
";

pub fn wrap() -> TemporalGraph {
    parse_tel(WRAP_TEL).expect("fixture parses")
}

/// Static path `1 - 2 - ... - len` as a period-1 graph. When `len` itself
/// does not fit in the ID width of `len` nodes, `n` is `len + 1` and node 0
/// is left isolated.
pub fn path(len: u32) -> TemporalGraph {
    let mut n = len as usize;
    if u64::from(len) >> id_width(n) != 0 {
        n += 1;
    }
    let mut b = TemporalGraph::builder(n, 1);
    for i in 1..len {
        b.push_edge(0, NodeId(i), NodeId(i + 1));
    }
    b.build().expect("path is valid")
}

/// Labels of [`twelve_cycle_with_twins`].
pub mod cycle {
    use super::NodeId;
    pub const A: NodeId = NodeId(0);
    pub const B: NodeId = NodeId(1);
    pub const C: NodeId = NodeId(2);
    pub const D: NodeId = NodeId(3);
    pub const I: NodeId = NodeId(8);
    pub const J: NodeId = NodeId(9);
    pub const K: NodeId = NodeId(10);
    pub const L: NodeId = NodeId(11);
    pub const C_PRIME: NodeId = NodeId(12);
    pub const J_PRIME: NodeId = NodeId(13);
}

/// Cycle `a..l` with two extra nodes: `c'` joined to `b` and `d`, and `j'`
/// joined to `i`, `k` and `j`. Static (period 1).
pub fn twelve_cycle_with_twins() -> TemporalGraph {
    use cycle::*;
    let mut b = TemporalGraph::builder(14, 1);
    for i in 0..12u32 {
        b.push_edge(0, NodeId(i), NodeId((i + 1) % 12));
    }
    for (x, y) in [(B, C_PRIME), (C_PRIME, D), (I, J_PRIME), (J_PRIME, K), (J, J_PRIME)] {
        b.push_edge(0, x, y);
    }
    b.build().expect("cycle is valid")
}
