//! Monte Carlo validation of the closed-form variance predictors at the
//! boresight operating point: a single path aligned with the transmit beam,
//! one receive pair at zero boresight, and optionally equal-gain interferers
//! with angles fixed across drops.

use abp_core::analysis::{
    variance_multipath, variance_single_path, InterferenceModel, VarianceInputs, VarianceVariant,
};
use abp_core::array::{PhysicalAngle, SpatialFrequency, UlaConfig};
use abp_core::channel::{
    build_channel, derive_seed, sample_paths, AngleRange, GainLaw, NoiseModel, PathParams,
};
use abp_core::codebook::AuxiliaryBeamPair;
use abp_core::estimator::{invert_ratio, ratio_from_powers};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::config::VarianceConfig;
use crate::experiments::common::{mean, parallel_trials, power_pair, steering_columns};
use crate::report::MetricReport;
use crate::SimError;

pub fn run_variance_validation(cfg: &VarianceConfig) -> Result<MetricReport, SimError> {
    let mut report = MetricReport::new("variance");
    let tx_cfg = UlaConfig::half_wavelength(cfg.tx_antennas)?;
    let rx_cfg = UlaConfig::half_wavelength(cfg.rx_antennas)?;
    let delta = cfg.delta_r;
    let pair = AuxiliaryBeamPair::standalone(SpatialFrequency::new(0.0)?, delta)?;
    let alpha_sq = (cfg.tx_antennas * cfg.rx_antennas) as f64;

    // Dominant path: ψ = 0 and the transmit beam steered exactly at the AoD.
    let dominant_aod = PhysicalAngle::new(0.0)?;
    let dominant_aoa = PhysicalAngle::new(0.0)?;
    let precoder = steering_columns(&[0.0], &tx_cfg);
    let combiner = steering_columns(&[pair.low_freq(), pair.high_freq()], &rx_cfg);

    for &np in &cfg.num_paths {
        // Interferer angles are drawn once per path count and stay fixed for
        // all drops and SNR points; only gains (phases) refresh per trial.
        let interferer_template = if np > 1 {
            sample_paths(
                derive_seed(cfg.seed, np as u64, 1000),
                np - 1,
                AngleRange::from_degrees(cfg.interferer_range_deg.0, cfg.interferer_range_deg.1)?,
                GainLaw::Unit,
            )?
        } else {
            Vec::new()
        };

        for &snr_db in &cfg.snr_db {
            let noise = NoiseModel::from_snr_db(snr_db)?;
            let sq_errs: Vec<Result<f64, SimError>> = parallel_trials(cfg.trials, |t| {
                let mut rng =
                    ChaCha12Rng::seed_from_u64(derive_seed(cfg.seed, t, np as u64));
                let mut paths = vec![PathParams {
                    gain: Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU)),
                    aod: dominant_aod,
                    aoa: dominant_aoa,
                }];
                for p in &interferer_template {
                    paths.push(PathParams {
                        gain: Complex64::from_polar(
                            1.0,
                            rng.gen_range(0.0..std::f64::consts::TAU),
                        ),
                        ..*p
                    });
                }
                let channel = build_channel(paths, &tx_cfg, &rx_cfg)?;
                // One slot, two receive chains: both pair members combine the
                // same received symbol.
                let y = abp_core::channel::measure(
                    &channel,
                    &precoder,
                    &combiner,
                    &noise,
                    derive_seed(cfg.seed, t, 2000 + np as u64),
                )?;
                let pp = power_pair(y[(0, 0)].norm_sqr(), y[(1, 0)].norm_sqr(), pair);
                let ratio = ratio_from_powers(&pp)?;
                let psi_hat = invert_ratio(ratio, &pair);
                Ok(psi_hat.radians().powi(2))
            });
            let sq_errs = sq_errs.into_iter().collect::<Result<Vec<_>, _>>()?;
            let mc_variance = mean(&sq_errs);

            let zero = SpatialFrequency::new(0.0)?;
            let inputs = VarianceInputs {
                rx_pair: pair,
                rx_cfg,
                true_rx_freq: zero,
                alpha_sq,
                snr_linear: noise.snr_linear(),
                interference: (np > 1).then(|| InterferenceModel {
                    tx_cfg,
                    aligned_tx_freq: zero,
                    paths: interferer_template.clone(),
                }),
            };
            let as_written = variance_single_path(&inputs, VarianceVariant::AsWritten)?;
            let sum_matrix = if np > 1 {
                variance_multipath(&inputs)?
            } else {
                variance_single_path(&inputs, VarianceVariant::SumMatrix)?
            };

            let params = format!("n_p={np};snr_db={snr_db}");
            report.push(&params, "mc_variance", mc_variance, cfg.trials, cfg.seed);
            report.push(
                &params,
                "pred_as_written",
                as_written.value_or_inf(),
                cfg.trials,
                cfg.seed,
            );
            report.push(
                &params,
                "pred_sum_matrix",
                sum_matrix.value_or_inf(),
                cfg.trials,
                cfg.seed,
            );
            if let Some(pred) = sum_matrix.value() {
                report.push(
                    &params,
                    "ratio_mc_over_pred",
                    mc_variance / pred,
                    cfg.trials,
                    cfg.seed,
                );
            }
        }
    }
    Ok(report)
}
