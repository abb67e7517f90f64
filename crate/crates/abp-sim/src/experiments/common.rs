//! Helpers shared by the experiment runners.

use abp_core::array::{self, SpatialFrequency, UlaConfig};
use abp_core::channel::{derive_seed, ChannelInstance};
use abp_core::codebook::BeamPairGrid;
use abp_core::estimator::{invert_ratio, ratio_from_powers, select_pair, PowerPair};
use abp_core::quantizer::{train_ratio_codebook, ScalarCodebook};
use ndarray::Array2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use crate::SimError;

/// Runs `trials` independent trial closures on the worker pool and returns
/// their outputs in trial order, so downstream reductions are sequential and
/// bit-identical regardless of thread count.
pub fn parallel_trials<T: Send>(trials: u64, f: impl Fn(u64) -> T + Sync + Send) -> Vec<T> {
    (0..trials).into_par_iter().map(f).collect()
}

/// `N_tot × 1` steering column at a spatial frequency.
pub fn steering_column(freq: f64, cfg: &UlaConfig) -> Array2<Complex64> {
    let v = array::steering_vector(
        SpatialFrequency::new(freq).expect("finite frequency"),
        cfg,
    );
    let mut m = Array2::zeros((cfg.num_elements(), 1));
    m.column_mut(0).assign(v.entries());
    m
}

/// Stacks steering columns for several frequencies.
pub fn steering_columns(freqs: &[f64], cfg: &UlaConfig) -> Array2<Complex64> {
    let mut m = Array2::zeros((cfg.num_elements(), freqs.len()));
    for (j, &f) in freqs.iter().enumerate() {
        let v = array::steering_vector(SpatialFrequency::new(f).expect("finite"), cfg);
        m.column_mut(j).assign(v.entries());
    }
    m
}

/// Post-beamforming channel power `|w* H f|²` for steering vectors at the
/// given transmit and receive spatial frequencies.
pub fn effective_gain(channel: &ChannelInstance, tx_freq: f64, rx_freq: f64) -> f64 {
    let f = steering_column(tx_freq, channel.tx_cfg());
    let w = steering_column(rx_freq, channel.rx_cfg());
    let wh = w.t().mapv(|z| z.conj());
    let y = wh.dot(channel.matrix()).dot(&f);
    y[(0, 0)].norm_sqr()
}

/// Noiseless omni-receiver estimation pipeline used to collect feedback
/// training material: per drop, a uniform angle is swept against the grid
/// beams, the covering pair is selected and its ratio metric and inverted
/// spatial frequency are recorded.
pub fn ratio_sample_pipeline(
    grid: &BeamPairGrid,
    count: usize,
    seed: u64,
) -> (Vec<f64>, Vec<f64>) {
    let cfg = grid.cfg();
    let samples: Vec<(f64, f64)> = parallel_trials(count as u64, |i| {
        let mut rng = ChaCha12Rng::seed_from_u64(derive_seed(seed, i, 0));
        let half = std::f64::consts::FRAC_PI_2;
        let theta: f64 = rng.gen_range(-half..half);
        let mu = cfg.max_spatial_freq() * theta.sin();
        let mu_f = SpatialFrequency::new(mu).expect("finite");
        let powers: Vec<f64> = (0..grid.num_beams())
            .map(|id| array::beam_gain(mu_f, grid.beam_freq(id), cfg))
            .collect();
        let (_, pp) = select_pair(&powers, grid).expect("grid powers are well formed");
        let ratio = ratio_from_powers(&pp).expect("nonzero powers");
        let est = invert_ratio(ratio, &pp.pair);
        (ratio.value(), est.radians())
    });
    samples.into_iter().unzip()
}

/// Trains the density-matched ratio codebook from the noiseless pipeline.
pub fn trained_ratio_codebook(
    grid: &BeamPairGrid,
    bits: u32,
    sample_count: usize,
    seed: u64,
) -> Result<ScalarCodebook, SimError> {
    let (ratios, _) = ratio_sample_pipeline(grid, sample_count, seed);
    Ok(train_ratio_codebook(&ratios, bits)?)
}

/// Wrap-aware spatial-frequency distance (the frequency axis is 2π-periodic).
pub fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(std::f64::consts::TAU);
    d.min(std::f64::consts::TAU - d)
}

/// Draws paths whose spatial frequencies keep a pairwise circular distance of
/// at least `min_sep_tx` (departure side) and `min_sep_rx` (arrival side) by
/// rejection. Zero separations reduce to plain sampling.
pub fn sample_separated_paths(
    seed: u64,
    num_paths: usize,
    range: abp_core::channel::AngleRange,
    law: abp_core::channel::GainLaw,
    min_sep_tx: f64,
    min_sep_rx: f64,
    tx_cfg: &UlaConfig,
    rx_cfg: &UlaConfig,
) -> Result<Vec<abp_core::channel::PathParams>, SimError> {
    for attempt in 0..10_000u64 {
        let paths =
            abp_core::channel::sample_paths(derive_seed(seed, attempt, 41), num_paths, range, law)?;
        let mut ok = true;
        'sep: for i in 0..num_paths {
            for j in i + 1..num_paths {
                let mu_i = array::angle_to_spatial_freq(paths[i].aod, tx_cfg).radians();
                let mu_j = array::angle_to_spatial_freq(paths[j].aod, tx_cfg).radians();
                let psi_i = array::angle_to_spatial_freq(paths[i].aoa, rx_cfg).radians();
                let psi_j = array::angle_to_spatial_freq(paths[j].aoa, rx_cfg).radians();
                if circular_distance(mu_i, mu_j) < min_sep_tx
                    || circular_distance(psi_i, psi_j) < min_sep_rx
                {
                    ok = false;
                    break 'sep;
                }
            }
        }
        if ok {
            return Ok(paths);
        }
    }
    Err(SimError::Config(
        "could not draw paths at the requested separation".into(),
    ))
}

/// Squared column-matched Frobenius error `min_P ‖A − Â P‖²_F` over column
/// permutations `P`; estimation slots carry no inherent path identity, so the
/// metric scores the best pairing.
pub fn assignment_error(truth: &Array2<Complex64>, estimate: &Array2<Complex64>) -> f64 {
    let cols = truth.ncols();
    debug_assert_eq!(cols, estimate.ncols());
    // Pairwise squared distances.
    let mut dist = vec![vec![0.0f64; cols]; cols];
    for i in 0..cols {
        for j in 0..cols {
            dist[i][j] = truth
                .column(i)
                .iter()
                .zip(estimate.column(j).iter())
                .map(|(a, b)| (a - b).norm_sqr())
                .sum();
        }
    }
    let mut perm: Vec<usize> = (0..cols).collect();
    let mut best = f64::INFINITY;
    permute(&mut perm, 0, &mut |p| {
        let total: f64 = (0..cols).map(|i| dist[i][p[i]]).sum();
        if total < best {
            best = total;
        }
    });
    best
}

fn permute(items: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, visit);
        items.swap(k, i);
    }
}

/// Mean of a slice; zero on empty input.
pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

/// Median by sorting a copy.
pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mid = v.len() / 2;
    if v.len() % 2 == 0 {
        0.5 * (v[mid - 1] + v[mid])
    } else {
        v[mid]
    }
}

/// Expected `‖a(μ) − a(ν)‖²` for `μ − ν` uniform on `[-δ, δ]`, by midpoint
/// quadrature: the high-SNR floor of boresight-snapping beam selection.
pub fn boresight_quantization_floor(num_elements: usize, delta: f64, points: usize) -> f64 {
    let n = num_elements;
    let mut acc = 0.0;
    for i in 0..points {
        let e = -delta + 2.0 * delta * (i as f64 + 0.5) / points as f64;
        // a*(ν) a(μ) = e^{j(N−1)e/2} sin(Ne/2) / (N sin(e/2)).
        let mag = if e.abs() < 1e-12 {
            1.0
        } else {
            ((n as f64) * e / 2.0).sin() / (n as f64 * (e / 2.0).sin())
        };
        let re = ((n as f64 - 1.0) * e / 2.0).cos() * mag;
        acc += 2.0 - 2.0 * re;
    }
    acc / points as f64
}

/// Re-derives a `PowerPair` for a standalone pair from two measured powers.
pub fn power_pair(
    delta_power: f64,
    sigma_power: f64,
    pair: abp_core::codebook::AuxiliaryBeamPair,
) -> PowerPair {
    PowerPair {
        delta_power,
        sigma_power,
        pair,
    }
}
