//! Feedback quantization study: codeword-domain MSE of the two quantization
//! strategies on the noiseless estimation pipeline, and end-to-end angle MSE
//! at a fixed low SNR per bit budget.

use abp_core::array::UlaConfig;
use abp_core::channel::{build_channel, derive_seed, sample_paths, AngleRange, GainLaw, NoiseModel};
use abp_core::codebook::full_range_grid;
use abp_core::estimator::{estimate_single_path_with_feedback, FeedbackScheme};
use abp_core::quantizer::{train_ratio_codebook, uniform_codebook};

use crate::config::QuantizationConfig;
use crate::experiments::common::{mean, parallel_trials, ratio_sample_pipeline};
use crate::report::MetricReport;
use crate::SimError;

pub fn run_quantization_study(cfg: &QuantizationConfig) -> Result<MetricReport, SimError> {
    let mut report = MetricReport::new("quantization");
    let tx_cfg = UlaConfig::half_wavelength(cfg.tx_antennas)?;
    let rx_cfg = UlaConfig::half_wavelength(cfg.rx_antennas)?;
    // Seamless-coverage offsets: δ_t = (π/2)/N_tot, δ_r = (π/2)/M_tot.
    let grid_tx = full_range_grid(std::f64::consts::FRAC_PI_2 / cfg.tx_antennas as f64, &tx_cfg)?;
    let grid_rx = full_range_grid(std::f64::consts::FRAC_PI_2 / cfg.rx_antennas as f64, &rx_cfg)?;

    // Codeword-domain comparison on the omni-receiver noiseless pipeline.
    let (ratio_samples, freq_samples) =
        ratio_sample_pipeline(&grid_tx, cfg.sample_count, derive_seed(cfg.seed, 0, 0));
    let max_freq = tx_cfg.max_spatial_freq();

    for &bits in &cfg.bits {
        let trained = train_ratio_codebook(&ratio_samples, bits)?;
        let uniform = uniform_codebook((-max_freq, max_freq), bits)?;
        let params = format!("bits={bits}");
        report.push(
            &params,
            "quant_mse_ratio",
            trained.distortion(&ratio_samples),
            cfg.sample_count as u64,
            cfg.seed,
        );
        report.push(
            &params,
            "quant_mse_freq",
            uniform.distortion(&freq_samples),
            cfg.sample_count as u64,
            cfg.seed,
        );
    }

    // End-to-end AoD MSE at the configured SNR, with common random numbers
    // across the feedback variants so only quantization differs.
    let noise = NoiseModel::from_snr_db(cfg.snr_db)?;
    let angle_mse = |feedback: &FeedbackScheme<'_>| -> Result<f64, SimError> {
        let sq: Vec<Result<f64, SimError>> = parallel_trials(cfg.trials, |t| {
            let paths = sample_paths(
                derive_seed(cfg.seed, t, 10),
                1,
                AngleRange::full(),
                GainLaw::Unit,
            )?;
            let truth = paths[0].aod.radians();
            let channel = build_channel(paths, &tx_cfg, &rx_cfg)?;
            let (aod, _) = estimate_single_path_with_feedback(
                &channel,
                &grid_tx,
                &grid_rx,
                &noise,
                feedback,
                derive_seed(cfg.seed, t, 11),
            )?;
            Ok((aod.angle.radians() - truth).powi(2))
        });
        Ok(mean(&sq.into_iter().collect::<Result<Vec<_>, _>>()?))
    };

    let unquantized = angle_mse(&FeedbackScheme::None)?;
    report.push(
        format!("snr_db={}", cfg.snr_db),
        "angle_mse_unquantized",
        unquantized,
        cfg.trials,
        cfg.seed,
    );
    for &bits in &cfg.bits {
        let trained = train_ratio_codebook(&ratio_samples, bits)?;
        let uniform = uniform_codebook((-max_freq, max_freq), bits)?;
        let params = format!("bits={bits};snr_db={}", cfg.snr_db);
        report.push(
            &params,
            "angle_mse_ratio_fb",
            angle_mse(&FeedbackScheme::Ratio(&trained))?,
            cfg.trials,
            cfg.seed,
        );
        report.push(
            &params,
            "angle_mse_freq_fb",
            angle_mse(&FeedbackScheme::Frequency(&uniform))?,
            cfg.trials,
            cfg.seed,
        );
    }
    Ok(report)
}
