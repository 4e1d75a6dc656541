//! Distances between preprocessed series and nearest-neighbour selection.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::types::{DistanceMeasure, ReferenceSet};

/// Sum of absolute deviations.
pub fn distance_l1(a: &[f64], b: &[f64]) -> Result<f64> {
    check_lengths(a, b)?;
    Ok(a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum())
}

/// Euclidean distance.
pub fn distance_l2(a: &[f64], b: &[f64]) -> Result<f64> {
    check_lengths(a, b)?;
    Ok(a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt())
}

/// Unconstrained dynamic time warping with absolute pointwise cost:
///
/// `D(v, w) = |a_v - b_w| + min(D(v, w-1), D(v-1, w-1), D(v-1, w))`,
/// `D(1, 1) = |a_1 - b_1|`, returning `D(len a, len b)`.
///
/// Lengths may differ. Uses two rolling rows of the cost table.
pub fn distance_dtw(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySeries);
    }
    let cols = b.len();
    let mut prev = vec![0.0; cols];
    let mut curr = vec![0.0; cols];

    prev[0] = (a[0] - b[0]).abs();
    for w in 1..cols {
        prev[w] = prev[w - 1] + (a[0] - b[w]).abs();
    }
    for &av in &a[1..] {
        curr[0] = prev[0] + (av - b[0]).abs();
        for w in 1..cols {
            let best = curr[w - 1].min(prev[w - 1]).min(prev[w]);
            curr[w] = (av - b[w]).abs() + best;
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    Ok(prev[cols - 1])
}

pub fn distance(measure: DistanceMeasure, a: &[f64], b: &[f64]) -> Result<f64> {
    match measure {
        DistanceMeasure::L1 => distance_l1(a, b),
        DistanceMeasure::L2 => distance_l2(a, b),
        DistanceMeasure::Dtw => distance_dtw(a, b),
    }
}

fn check_lengths(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(())
}

/// A reference series selected as a neighbour of the target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    pub index: usize,
    pub distance: f64,
}

/// The `k` closest reference series, ascending by distance.
#[derive(Debug, Clone, PartialEq)]
pub struct NearestNeighbors {
    pub neighbors: Vec<Neighbor>,
    /// `k` exceeded the size of the reference set and was capped.
    pub truncated: bool,
}

/// Finds the `k` reference series whose preprocessed histories are closest
/// to `target`. Ties are broken by lower reference index, so the result does
/// not depend on how the distance evaluations are scheduled.
pub fn nearest_k(
    target: &[f64],
    reference_set: &ReferenceSet,
    measure: DistanceMeasure,
    k: usize,
) -> Result<NearestNeighbors> {
    if k == 0 {
        return Err(Error::InvalidParameter {
            name: "k",
            reason: "must be at least 1".into(),
        });
    }
    if reference_set.is_empty() {
        return Err(Error::EmptyReferenceSet);
    }
    if target.len() != reference_set.target_n() {
        return Err(Error::ShapeMismatch {
            what: "target length",
            expected: reference_set.target_n(),
            actual: target.len(),
        });
    }
    let distances: Vec<f64> = reference_set
        .entries()
        .par_iter()
        .map(|entry| distance(measure, target, entry.preprocessed_history()))
        .collect::<Result<_>>()?;
    let (neighbors, truncated) = smallest_k(&distances, k);
    if truncated {
        log::warn!(
            "k = {k} exceeds the {} available reference series; using all of them",
            distances.len()
        );
    }
    Ok(NearestNeighbors {
        neighbors,
        truncated,
    })
}

pub(crate) fn smallest_k(distances: &[f64], k: usize) -> (Vec<Neighbor>, bool) {
    let truncated = k > distances.len();
    let k = k.min(distances.len());
    let mut order: Vec<usize> = (0..distances.len()).collect();
    let cmp = |a: &usize, b: &usize| distances[*a].total_cmp(&distances[*b]).then(a.cmp(b));
    if k < order.len() {
        order.select_nth_unstable_by(k, cmp);
        order.truncate(k);
    }
    order.sort_unstable_by(cmp);
    let neighbors = order
        .into_iter()
        .map(|index| Neighbor {
            index,
            distance: distances[index],
        })
        .collect();
    (neighbors, truncated)
}
