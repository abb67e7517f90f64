//! Multi-layer control-channel beamforming: at each layer the pair-based
//! hierarchy forms one auxiliary beam pair over the confidence range left by
//! the previous layer, while the grid-of-beams hierarchy sweeps every beam of
//! the layer. Attempts are counted per formed beam.
//!
//! The search runs in spatial frequency. The sector is the layer-1 probing
//! range `[-π/2, π/2]`; layer `ℓ` halves the active width by its configured
//! split, and each layer's beams come from a sub-aperture of `π/δ_ℓ`
//! elements, so every layer operates at its exact-cancellation offset.

use abp_core::array::{SpatialFrequency, UlaConfig};
use abp_core::channel::{
    build_channel, derive_seed, measure, sample_paths, AngleRange, GainLaw, NoiseModel, PathParams,
};
use abp_core::codebook::AuxiliaryBeamPair;
use abp_core::error::Error as CoreError;
use abp_core::estimator::{invert_ratio, ratio_from_powers};
use ndarray::Array2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use std::f64::consts::FRAC_PI_2;

use crate::config::ControlChannelConfig;
use crate::experiments::common::{mean, parallel_trials, power_pair};
use crate::report::MetricReport;
use crate::SimError;

/// Half-widths of the active range entering each layer.
fn layer_offsets(splits: &[usize]) -> Result<Vec<f64>, SimError> {
    if splits.is_empty() {
        return Err(CoreError::Config("need at least one layer".into()).into());
    }
    let mut offsets = Vec::with_capacity(splits.len());
    let mut half = FRAC_PI_2;
    for (i, &s) in splits.iter().enumerate() {
        if s < 2 {
            return Err(CoreError::Config(format!(
                "layer {i} must split the range into at least 2 cells, got {s}"
            ))
            .into());
        }
        offsets.push(half);
        half /= s as f64;
    }
    Ok(offsets)
}

/// Sub-aperture steering column: `count` active elements at the head of an
/// `n_tot` array, steered to `freq`.
fn sub_aperture_column(freq: f64, count: usize, n_tot: usize) -> Array2<Complex64> {
    let scale = 1.0 / (count as f64).sqrt();
    let mut m = Array2::zeros((n_tot, 1));
    for k in 0..count {
        m[(k, 0)] = Complex64::from_polar(scale, k as f64 * freq);
    }
    m
}

/// Sub-aperture size whose exact-cancellation offset equals `delta`.
fn aperture_for_offset(delta: f64, n_tot: usize) -> Result<usize, SimError> {
    let count = (std::f64::consts::PI / delta).round() as usize;
    if count > n_tot {
        return Err(CoreError::Config(format!(
            "layer needs a {count}-element aperture, array has {n_tot}"
        ))
        .into());
    }
    Ok(count.max(2))
}

struct TrialErrors {
    abp: f64,
    gob: f64,
}

fn run_trial(
    cfg: &ControlChannelConfig,
    offsets: &[f64],
    noise: &NoiseModel,
    trial: u64,
    stream: u64,
) -> Result<TrialErrors, SimError> {
    let tx_cfg = UlaConfig::half_wavelength(cfg.tx_antennas)?;
    let rx_cfg = UlaConfig::half_wavelength(cfg.rx_antennas)?;
    let mut rng = ChaCha12Rng::seed_from_u64(derive_seed(cfg.seed, trial, stream));
    // Truth uniform over the sector; receive side is a single quasi-omni
    // element, drawn angles for the arrival side only feed the channel model.
    let mu_true: f64 = rng.gen_range(-FRAC_PI_2..FRAC_PI_2);
    let theta = (mu_true / tx_cfg.max_spatial_freq()).asin();
    let aoa = sample_paths(derive_seed(cfg.seed, trial, stream + 1), 1, AngleRange::full(),
        GainLaw::Unit)?[0]
        .aoa;
    let channel = build_channel(
        vec![PathParams {
            gain: Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU)),
            aod: abp_core::array::PhysicalAngle::new(theta)?,
            aoa,
        }],
        &tx_cfg,
        &rx_cfg,
    )?;
    let mut omni = Array2::<Complex64>::zeros((cfg.rx_antennas, 1));
    omni[(0, 0)] = Complex64::new(1.0, 0.0);

    // Pair-based hierarchy: one pair per layer around the running estimate.
    let mut center = 0.0f64;
    for (l, &delta) in offsets.iter().enumerate() {
        let aperture = aperture_for_offset(delta, cfg.tx_antennas)?;
        let pair = AuxiliaryBeamPair::standalone(SpatialFrequency::new(center)?, delta)?;
        let mut probe = Array2::zeros((cfg.tx_antennas, 2));
        probe
            .column_mut(0)
            .assign(&sub_aperture_column(pair.low_freq(), aperture, cfg.tx_antennas).column(0));
        probe
            .column_mut(1)
            .assign(&sub_aperture_column(pair.high_freq(), aperture, cfg.tx_antennas).column(0));
        let y = measure(
            &channel,
            &probe,
            &omni,
            noise,
            derive_seed(cfg.seed, trial, stream + 10 + l as u64),
        )?;
        let pp = power_pair(y[(0, 0)].norm_sqr(), y[(0, 1)].norm_sqr(), pair);
        let ratio = ratio_from_powers(&pp)?;
        center = invert_ratio(ratio, &pair).radians();
    }
    let abp_err = (center - mu_true).abs();

    // Grid-of-beams hierarchy: sweep each layer's beams over the active
    // range, keep the strongest cell.
    let mut lo = -FRAC_PI_2;
    let mut hi = FRAC_PI_2;
    for (l, &split) in cfg.layer_splits.iter().enumerate() {
        let cell = (hi - lo) / split as f64;
        let aperture = aperture_for_offset(cell / 2.0, cfg.tx_antennas)?;
        let mut probe = Array2::zeros((cfg.tx_antennas, split));
        for i in 0..split {
            let c = lo + (i as f64 + 0.5) * cell;
            probe
                .column_mut(i)
                .assign(&sub_aperture_column(c, aperture, cfg.tx_antennas).column(0));
        }
        let y = measure(
            &channel,
            &probe,
            &omni,
            noise,
            derive_seed(cfg.seed, trial, stream + 20 + l as u64),
        )?;
        let best = (0..split)
            .max_by(|&a, &b| {
                y[(0, a)]
                    .norm_sqr()
                    .partial_cmp(&y[(0, b)].norm_sqr())
                    .unwrap()
            })
            .unwrap_or(0);
        let new_lo = lo + best as f64 * cell;
        lo = new_lo;
        hi = new_lo + cell;
    }
    let gob_err = (0.5 * (lo + hi) - mu_true).abs();

    Ok(TrialErrors {
        abp: abp_err,
        gob: gob_err,
    })
}

pub fn run_control_channel(cfg: &ControlChannelConfig) -> Result<MetricReport, SimError> {
    let mut report = MetricReport::new("control-channel");
    let offsets = layer_offsets(&cfg.layer_splits)?;

    let attempts_abp = 2 * cfg.layer_splits.len() as u64;
    let attempts_gob: u64 = cfg.layer_splits.iter().map(|&s| s as u64).sum();
    let reduction = 100.0 * (attempts_gob - attempts_abp) as f64 / attempts_gob as f64;
    let layout = format!(
        "layers={}",
        cfg.layer_splits
            .iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>()
            .join("x")
    );
    report.push(&layout, "attempts_abp", attempts_abp as f64, 1, cfg.seed);
    report.push(&layout, "attempts_gob", attempts_gob as f64, 1, cfg.seed);
    report.push(&layout, "overhead_reduction_pct", reduction, 1, cfg.seed);
    report.push(
        &layout,
        "final_layer_resolution_rad",
        2.0 * offsets[offsets.len() - 1],
        1,
        cfg.seed,
    );

    let mut conditions: Vec<(String, NoiseModel, u64)> = Vec::new();
    if cfg.noiseless {
        conditions.push(("snr_db=inf".into(), NoiseModel::noiseless(), 100));
    }
    for (i, &db) in cfg.snr_db.iter().enumerate() {
        conditions.push((
            format!("snr_db={db}"),
            NoiseModel::from_snr_db(db)?,
            200 + 100 * i as u64,
        ));
    }

    for (label, noise, stream) in conditions {
        let outs: Vec<Result<TrialErrors, SimError>> =
            parallel_trials(cfg.trials, |t| run_trial(cfg, &offsets, &noise, t, stream));
        let outs = outs.into_iter().collect::<Result<Vec<_>, _>>()?;
        let params = format!("{layout};{label}");
        report.push(
            &params,
            "abp_pointing_error_rad",
            mean(&outs.iter().map(|o| o.abp).collect::<Vec<_>>()),
            cfg.trials,
            cfg.seed,
        );
        report.push(
            &params,
            "gob_pointing_error_rad",
            mean(&outs.iter().map(|o| o.gob).collect::<Vec<_>>()),
            cfg.trials,
            cfg.seed,
        );
    }
    Ok(report)
}
