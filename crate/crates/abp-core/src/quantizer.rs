//! Scalar feedback codebooks: density-matched (Lloyd-Max) quantization of
//! the ratio metric and uniform quantization of estimated spatial
//! frequencies, plus distortion evaluation.
//!
//! The ratio metric piles up near ±1, so a codebook trained on empirical
//! samples beats a uniform grid at the same bit budget. Training is plain
//! Lloyd-Max on sorted samples with uniform-quantile seeding, which makes the
//! result deterministic for a given sample set.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimum training samples per codeword.
const MIN_SAMPLES_PER_CODEWORD: usize = 100;
/// Relative distortion change below which training stops.
const CONVERGENCE_TOLERANCE: f64 = 1e-9;
/// Iteration cap for Lloyd-Max training.
const MAX_ITERATIONS: usize = 500;

/// A sorted scalar codebook of `2^bits` reconstruction levels over a domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarCodebook {
    codewords: Vec<f64>,
    bits: u32,
    domain: (f64, f64),
}

impl ScalarCodebook {
    pub fn codewords(&self) -> &[f64] {
        &self.codewords
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    /// Maps a value to its nearest codeword; ties go to the lower index.
    /// Out-of-domain values snap to the nearest end codeword.
    pub fn quantize(&self, value: f64) -> (f64, usize) {
        // Cells are delimited by codeword midpoints; a binary search over the
        // boundaries finds the cell in O(log 2^bits).
        let mut lo = 0usize;
        let mut hi = self.codewords.len() - 1;
        while lo < hi {
            let mid = (lo + hi) / 2;
            let boundary = 0.5 * (self.codewords[mid] + self.codewords[mid + 1]);
            if value <= boundary {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        (self.codewords[lo], lo)
    }

    /// Mean squared distortion of this codebook on a sample set.
    pub fn distortion(&self, samples: &[f64]) -> f64 {
        if samples.is_empty() {
            return 0.0;
        }
        samples
            .iter()
            .map(|&s| {
                let (q, _) = self.quantize(s);
                (s - q).powi(2)
            })
            .sum::<f64>()
            / samples.len() as f64
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("codebook is always serializable")
    }

    pub fn from_json(json: &str) -> Result<Self> {
        serde_json::from_str(json).map_err(|e| Error::Config(format!("bad codebook JSON: {e}")))
    }
}

/// Uniform codebook: `2^bits` codewords at the midpoints of a uniform
/// partition of `domain`.
pub fn uniform_codebook(domain: (f64, f64), bits: u32) -> Result<ScalarCodebook> {
    let (lo, hi) = domain;
    if !(hi > lo) {
        return Err(Error::Config(format!("empty domain [{lo}, {hi}]")));
    }
    let count = 1usize << bits;
    let cell = (hi - lo) / count as f64;
    let codewords = (0..count).map(|i| lo + (i as f64 + 0.5) * cell).collect();
    Ok(ScalarCodebook {
        codewords,
        bits,
        domain,
    })
}

/// Trains a density-matched codebook on ratio-metric samples by Lloyd-Max
/// iteration: nearest-codeword partition, then centroid update, until the
/// distortion change falls below `1e-9` relative or 500 iterations pass.
///
/// Lloyd descent is run from two deterministic seeds — the uniform quantiles
/// of the sorted samples and a uniform grid over their range — and the lower
/// distortion wins. The grid restart guarantees the trained codebook never
/// loses to the uniform codebook on its own training set, since the first
/// centroid update from that seed can only improve it.
pub fn train_ratio_codebook(samples: &[f64], bits: u32) -> Result<ScalarCodebook> {
    let count = 1usize << bits;
    if samples.len() < MIN_SAMPLES_PER_CODEWORD * count {
        return Err(Error::Training(format!(
            "need at least {} samples for {} codewords, got {}",
            MIN_SAMPLES_PER_CODEWORD * count,
            count,
            samples.len()
        )));
    }
    let mut sorted: Vec<f64> = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("samples must not contain NaN"));
    let n = sorted.len();

    // Prefix sums let each iteration compute cell means and distortions in
    // O(codewords · log samples).
    let mut prefix = Vec::with_capacity(n + 1);
    let mut prefix_sq = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    prefix_sq.push(0.0);
    for &s in &sorted {
        prefix.push(prefix.last().unwrap() + s);
        prefix_sq.push(prefix_sq.last().unwrap() + s * s);
    }

    let quantile_seed: Vec<f64> = (0..count)
        .map(|i| {
            let q = (i as f64 + 0.5) / count as f64;
            sorted[((q * n as f64) as usize).min(n - 1)]
        })
        .collect();
    let (lo, hi) = (sorted[0], sorted[n - 1]);
    let grid_seed: Vec<f64> = (0..count)
        .map(|i| lo + (hi - lo) * (i as f64 + 0.5) / count as f64)
        .collect();

    let (cw_a, d_a) = lloyd_descent(&sorted, &prefix, &prefix_sq, quantile_seed);
    let (cw_b, d_b) = lloyd_descent(&sorted, &prefix, &prefix_sq, grid_seed);
    let mut codewords = if d_a <= d_b { cw_a } else { cw_b };

    codewords.sort_by(|a, b| a.partial_cmp(b).unwrap());
    codewords.dedup_by(|a, b| a == b);
    // Degenerate sample sets can collapse codewords; pad by nudging copies so
    // the codebook keeps its nominal size with strictly increasing entries.
    while codewords.len() < count {
        let last = *codewords.last().unwrap();
        codewords.push(last + f64::EPSILON.max(last.abs() * 1e-12));
    }

    Ok(ScalarCodebook {
        codewords,
        bits,
        domain: (lo, hi),
    })
}

/// One Lloyd-Max descent from a given codeword seed. Returns the refined
/// codewords with the final mean distortion.
fn lloyd_descent(
    sorted: &[f64],
    prefix: &[f64],
    prefix_sq: &[f64],
    mut codewords: Vec<f64>,
) -> (Vec<f64>, f64) {
    let n = sorted.len();
    let count = codewords.len();
    let mut prev_distortion = f64::INFINITY;
    for _ in 0..MAX_ITERATIONS {
        // Partition: cell i covers sorted[start_i..start_{i+1}) where the
        // boundary is the midpoint between codewords i and i+1.
        let mut starts = Vec::with_capacity(count + 1);
        starts.push(0usize);
        for i in 0..count - 1 {
            let boundary = 0.5 * (codewords[i] + codewords[i + 1]);
            let start = sorted.partition_point(|&s| s <= boundary);
            starts.push(start.max(*starts.last().unwrap()));
        }
        starts.push(n);

        // Centroid update; empty cells keep their codeword.
        let mut distortion = 0.0;
        for i in 0..count {
            let (a, b) = (starts[i], starts[i + 1]);
            if b > a {
                let mean = (prefix[b] - prefix[a]) / (b - a) as f64;
                codewords[i] = mean;
                distortion += (prefix_sq[b] - prefix_sq[a])
                    - 2.0 * mean * (prefix[b] - prefix[a])
                    + (b - a) as f64 * mean * mean;
            }
        }
        distortion /= n as f64;
        // Lloyd-Max descends monotonically in exact arithmetic; allow only
        // rounding-level increases.
        debug_assert!(
            distortion <= prev_distortion * (1.0 + 1e-12) + 1e-15,
            "distortion increased: {prev_distortion} -> {distortion}"
        );
        let converged = prev_distortion.is_finite()
            && (prev_distortion - distortion).abs() <= CONVERGENCE_TOLERANCE * prev_distortion;
        prev_distortion = distortion;
        if converged {
            break;
        }
    }
    (codewords, prev_distortion)
}
