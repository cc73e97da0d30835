//! Bottom-k (k-minimum-values) neighbourhood sketches.
//!
//! A sketch keeps the `k` smallest hashes of a neighbour-ID set plus the exact
//! set size. Two sketches built with the same seed estimate the size of the
//! union, and from it the size of the intersection. When both sketches hold
//! fewer than `k` hashes they contain every hash of their set and all
//! estimates are exact.

use std::collections::BTreeSet;

use statrs::distribution::{ContinuousCDF, Normal};
use thiserror::Error;

use crate::tvg::NodeId;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SketchError {
    #[error("invalid sketch parameters: {0}")]
    Params(String),
    #[error("sketches are not comparable (k {0} vs {1}, seed {2:#x} vs {3:#x})")]
    Mismatch(usize, usize, u64, u64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SketchParams {
    pub k: usize,
    pub epsilon: f64,
    pub nu: f64,
    pub hash_seed: u64,
}

impl SketchParams {
    pub fn new(k: usize, epsilon: f64, nu: f64, hash_seed: u64) -> Result<Self, SketchError> {
        if k == 0 || k > u16::MAX as usize {
            return Err(SketchError::Params(format!("k = {k} outside [1, 65535]")));
        }
        check_unit("epsilon", epsilon)?;
        check_unit("nu", nu)?;
        Ok(SketchParams {
            k,
            epsilon,
            nu,
            hash_seed,
        })
    }

    /// Parameters with `k = calibrated_k(epsilon, nu)`.
    pub fn calibrated(epsilon: f64, nu: f64, hash_seed: u64) -> Result<Self, SketchError> {
        check_unit("epsilon", epsilon)?;
        check_unit("nu", nu)?;
        Self::new(calibrated_k(epsilon, nu), epsilon, nu, hash_seed)
    }
}

fn check_unit(name: &str, x: f64) -> Result<(), SketchError> {
    if x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        Err(SketchError::Params(format!("{name} = {x} outside (0, 1)")))
    }
}

/// Smallest `k` for which the union estimate of two sets, each at most
/// `m` elements, stays within `epsilon * m` with probability about `1 - nu`.
///
/// The KMV union estimate has relative standard error close to
/// `1/sqrt(k - 2)` and the union is at most `2m`, so we need
/// `2 z / sqrt(k - 2) <= epsilon` with `z` the two-sided normal quantile.
pub fn calibrated_k(epsilon: f64, nu: f64) -> usize {
    let z = Normal::standard().inverse_cdf(1.0 - nu / 2.0);
    let k = (2.0 * z / epsilon).powi(2).ceil() as usize + 2;
    k.min(u16::MAX as usize)
}

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seeded hash of a node id. For a fixed seed this is a bijection on u64, so
/// distinct ids never collide.
pub fn hash_id(id: NodeId, seed: u64) -> u64 {
    let key = mix64(seed.wrapping_add(0x9e37_79b9_7f4a_7c15));
    mix64(u64::from(id.0) ^ key)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NeighbourhoodSketch {
    mins: Vec<u64>,
    exact_size: usize,
    k: usize,
    hash_seed: u64,
}

pub fn build_sketch<I>(ids: I, params: &SketchParams) -> NeighbourhoodSketch
where
    I: IntoIterator<Item = NodeId>,
{
    let ids: BTreeSet<NodeId> = ids.into_iter().collect();
    let mut hashes: Vec<u64> = ids.iter().map(|&id| hash_id(id, params.hash_seed)).collect();
    hashes.sort_unstable();
    hashes.truncate(params.k);
    NeighbourhoodSketch {
        mins: hashes,
        exact_size: ids.len(),
        k: params.k,
        hash_seed: params.hash_seed,
    }
}

impl NeighbourhoodSketch {
    pub fn mins(&self) -> &[u64] {
        &self.mins
    }

    pub fn exact_size(&self) -> usize {
        self.exact_size
    }

    pub fn capacity(&self) -> usize {
        self.k
    }

    /// Holds every hash of its set.
    pub fn is_lossless(&self) -> bool {
        self.mins.len() < self.k
    }

    /// Bits under the accounting model: 16-bit count, 64 bits per hash and
    /// an `id_width`-bit set size.
    pub fn bit_size(&self, id_width: u32) -> u64 {
        16 + 64 * self.mins.len() as u64 + u64::from(id_width)
    }

    /// Little-endian wire form: `u16` count, the hashes as `u64`, then the
    /// set size as `u32`. Length depends only on the number of stored hashes.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(2 + 8 * self.mins.len() + 4);
        out.extend_from_slice(&(self.mins.len() as u16).to_le_bytes());
        for h in &self.mins {
            out.extend_from_slice(&h.to_le_bytes());
        }
        out.extend_from_slice(&(self.exact_size as u32).to_le_bytes());
        out
    }

    fn check_compatible(&self, other: &Self) -> Result<(), SketchError> {
        if self.k != other.k || self.hash_seed != other.hash_seed {
            return Err(SketchError::Mismatch(self.k, other.k, self.hash_seed, other.hash_seed));
        }
        Ok(())
    }
}

fn merged_bottom(a: &[u64], b: &[u64], limit: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(limit.min(a.len() + b.len()));
    let (mut i, mut j) = (0, 0);
    while out.len() < limit && (i < a.len() || j < b.len()) {
        let next = match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) if x == y => {
                i += 1;
                j += 1;
                x
            }
            (Some(&x), Some(&y)) if x < y => {
                i += 1;
                x
            }
            (Some(_), Some(&y)) => {
                j += 1;
                y
            }
            (Some(&x), None) => {
                i += 1;
                x
            }
            (None, Some(&y)) => {
                j += 1;
                y
            }
            (None, None) => unreachable!(),
        };
        out.push(next);
    }
    out
}

/// Estimated `|A ∪ B|`; exact when both sketches are lossless or fewer than
/// `k` distinct hashes are present overall.
pub fn estimate_union(a: &NeighbourhoodSketch, b: &NeighbourhoodSketch) -> Result<f64, SketchError> {
    a.check_compatible(b)?;
    let k = a.k;
    if a.is_lossless() && b.is_lossless() {
        return Ok(merged_bottom(&a.mins, &b.mins, usize::MAX).len() as f64);
    }
    let merged = merged_bottom(&a.mins, &b.mins, k);
    if merged.len() < k {
        return Ok(merged.len() as f64);
    }
    let r_k = (merged[k - 1] as f64 + 1.0) / 2f64.powi(64);
    Ok((k as f64 - 1.0) / r_k)
}

/// `|A| + |B| - union`, clamped to `[0, min(|A|, |B|)]`.
pub fn estimate_intersection(a: &NeighbourhoodSketch, b: &NeighbourhoodSketch) -> Result<f64, SketchError> {
    let union = estimate_union(a, b)?;
    let raw = (a.exact_size + b.exact_size) as f64 - union;
    Ok(raw.clamp(0.0, a.exact_size.min(b.exact_size) as f64))
}

/// Integer intersection used for twin decisions, and whether it is exact.
pub fn decision_intersection(a: &NeighbourhoodSketch, b: &NeighbourhoodSketch) -> Result<(usize, bool), SketchError> {
    let est = estimate_intersection(a, b)?;
    let exact = a.is_lossless() && b.is_lossless();
    Ok((est.round() as usize, exact))
}

/// Neighbourhood-difference test from two raw-neighbourhood sketches.
/// `adjacent` removes the pair members from each other's neighbourhood.
pub fn sketch_d_twin_test(
    a: &NeighbourhoodSketch,
    b: &NeighbourhoodSketch,
    adjacent: bool,
    d: usize,
) -> Result<bool, SketchError> {
    let (inter, _) = decision_intersection(a, b)?;
    Ok(lemma2_holds(a.exact_size, b.exact_size, adjacent, inter, d))
}

pub(crate) fn lemma2_holds(deg_a: usize, deg_b: usize, adjacent: bool, inter: usize, d: usize) -> bool {
    let adj = usize::from(adjacent);
    let outside = deg_a.saturating_sub(adj) + deg_b.saturating_sub(adj);
    inter >= 1 && outside.saturating_sub(2 * inter) <= d
}
