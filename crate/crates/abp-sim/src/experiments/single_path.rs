//! Single-path AoD/AoA estimation MSE and analog-only spectral efficiency
//! across SNR and array size.

use abp_core::array::{self, UlaConfig};
use abp_core::channel::{build_channel, derive_seed, sample_paths, AngleRange, GainLaw, NoiseModel};
use abp_core::codebook::full_range_grid;
use abp_core::estimator::{estimate_single_path_with_feedback, FeedbackScheme};
use abp_core::quantizer::uniform_codebook;

use crate::config::{FeedbackConfig, SinglePathMseConfig};
use crate::experiments::common::{effective_gain, mean, parallel_trials, trained_ratio_codebook};
use crate::report::MetricReport;
use crate::SimError;

pub fn run_single_path_mse(cfg: &SinglePathMseConfig) -> Result<MetricReport, SimError> {
    let mut report = MetricReport::new("single-path-mse");
    let rx_cfg = UlaConfig::half_wavelength(cfg.rx_antennas)?;
    let delta_r = cfg.delta_rule.delta_for(cfg.rx_antennas);
    let grid_rx = full_range_grid(delta_r, &rx_cfg)?;

    for &n in &cfg.tx_antennas {
        let tx_cfg = UlaConfig::half_wavelength(n)?;
        let delta_t = cfg.delta_rule.delta_for(n);
        let grid_tx = full_range_grid(delta_t, &tx_cfg)?;

        // Feedback codebooks are trained once per transmit setup on the
        // noiseless pipeline, then shared across SNR points.
        let ratio_cb = match cfg.feedback {
            FeedbackConfig::Ratio { bits } => Some(trained_ratio_codebook(
                &grid_tx,
                bits,
                cfg.feedback_training_samples,
                derive_seed(cfg.seed, n as u64, 90),
            )?),
            _ => None,
        };
        let freq_cb = match cfg.feedback {
            FeedbackConfig::Frequency { bits } => {
                let max = tx_cfg.max_spatial_freq();
                Some(uniform_codebook((-max, max), bits)?)
            }
            _ => None,
        };
        let feedback = match (&ratio_cb, &freq_cb) {
            (Some(cb), _) => FeedbackScheme::Ratio(cb),
            (_, Some(cb)) => FeedbackScheme::Frequency(cb),
            _ => FeedbackScheme::None,
        };

        let noise_points: Vec<(String, NoiseModel)> = if cfg.noiseless {
            vec![("snr_db=inf".into(), NoiseModel::noiseless())]
        } else {
            cfg.snr_db
                .iter()
                .map(|&db| {
                    Ok::<_, SimError>((format!("snr_db={db}"), NoiseModel::from_snr_db(db)?))
                })
                .collect::<Result<_, _>>()?
        };

        for (snr_label, noise) in &noise_points {
            struct TrialOut {
                aod_sq: f64,
                aoa_sq: f64,
                gain_est: f64,
                gain_true: f64,
            }
            let outs: Vec<Result<TrialOut, SimError>> = parallel_trials(cfg.trials, |t| {
                let paths = sample_paths(
                    derive_seed(cfg.seed, t, 0),
                    1,
                    AngleRange::full(),
                    GainLaw::Unit,
                )?;
                let truth = paths[0];
                let channel = build_channel(paths, &tx_cfg, &rx_cfg)?;
                let (aod, aoa) = estimate_single_path_with_feedback(
                    &channel,
                    &grid_tx,
                    &grid_rx,
                    noise,
                    &feedback,
                    derive_seed(cfg.seed, t, 1),
                )?;
                let mu_true = array::angle_to_spatial_freq(truth.aod, &tx_cfg).radians();
                let psi_true = array::angle_to_spatial_freq(truth.aoa, &rx_cfg).radians();
                Ok(TrialOut {
                    aod_sq: (aod.angle.radians() - truth.aod.radians()).powi(2),
                    aoa_sq: (aoa.angle.radians() - truth.aoa.radians()).powi(2),
                    gain_est: effective_gain(
                        &channel,
                        aod.spatial_freq.radians(),
                        aoa.spatial_freq.radians(),
                    ),
                    gain_true: effective_gain(&channel, mu_true, psi_true),
                })
            });
            let outs = outs.into_iter().collect::<Result<Vec<_>, _>>()?;

            let params = format!("n_tot={n};m_tot={};{snr_label}", cfg.rx_antennas);
            let aod_mse = mean(&outs.iter().map(|o| o.aod_sq).collect::<Vec<_>>());
            let aoa_mse = mean(&outs.iter().map(|o| o.aoa_sq).collect::<Vec<_>>());
            report.push(&params, "aod_mse_rad2", aod_mse, cfg.trials, cfg.seed);
            report.push(&params, "aoa_mse_rad2", aoa_mse, cfg.trials, cfg.seed);

            if !noise.is_noiseless() {
                let gamma = noise.snr_linear();
                let se = |gains: Vec<f64>| {
                    mean(&gains.iter().map(|g| (1.0 + gamma * g).log2()).collect::<Vec<_>>())
                };
                let se_est = se(outs.iter().map(|o| o.gain_est).collect());
                let se_true = se(outs.iter().map(|o| o.gain_true).collect());
                report.push(&params, "se_estimated_bps", se_est, cfg.trials, cfg.seed);
                report.push(&params, "se_perfect_bps", se_true, cfg.trials, cfg.seed);
                report.push(
                    &params,
                    "se_fraction_of_perfect",
                    se_est / se_true,
                    cfg.trials,
                    cfg.seed,
                );
            }
        }
    }
    Ok(report)
}
