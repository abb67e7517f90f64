//! Transmit array-response matrix estimation error under multi-path
//! probing, for the pair-based estimator and the grid-of-beams baseline that
//! shares the exact same measurements but snaps each path to the strongest
//! beam's pointing direction.

use abp_core::array::{self, UlaConfig};
use abp_core::channel::{build_channel, derive_seed, AngleRange, GainLaw, NoiseModel};
use abp_core::codebook::{full_range_grid, random_probing_schedule, ScheduleMode};
use abp_core::estimator::{estimate_multipath_traced, FeedbackScheme};
use ndarray::Array2;
use num_complex::Complex64;

use crate::config::MultipathMseConfig;
use crate::experiments::common::{
    assignment_error, mean, parallel_trials, sample_separated_paths,
};
use crate::report::MetricReport;
use crate::SimError;

pub fn run_multipath_matrix_mse(cfg: &MultipathMseConfig) -> Result<MetricReport, SimError> {
    let mut report = MetricReport::new("multipath-mse");
    let tx_cfg = UlaConfig::half_wavelength(cfg.tx_antennas)?;
    let rx_cfg = UlaConfig::half_wavelength(cfg.rx_antennas)?;
    let delta_t = cfg.delta_rule.delta_for(cfg.tx_antennas);
    let delta_r = cfg.delta_rule.delta_for(cfg.rx_antennas);
    let grid_tx = full_range_grid(delta_t, &tx_cfg)?;
    let grid_rx = full_range_grid(delta_r, &rx_cfg)?;

    for &(n_t, m_t) in &cfg.budgets {
        for &snr_db in &cfg.snr_db {
            let noise = NoiseModel::from_snr_db(snr_db)?;
            let outs: Vec<Result<(f64, f64), SimError>> = parallel_trials(cfg.trials, |t| {
                let paths = sample_separated_paths(
                    derive_seed(cfg.seed, t, 0),
                    cfg.num_paths,
                    AngleRange::full(),
                    GainLaw::Unit,
                    cfg.min_separation_factor * delta_t,
                    cfg.min_separation_factor * delta_r,
                    &tx_cfg,
                    &rx_cfg,
                )?;
                let channel = build_channel(paths.clone(), &tx_cfg, &rx_cfg)?;
                // Random probing directions refresh every trial.
                let schedule = random_probing_schedule(
                    &grid_tx,
                    &grid_rx,
                    cfg.n_rf,
                    cfg.m_rf,
                    n_t,
                    m_t,
                    ScheduleMode::Exhaustive,
                    derive_seed(cfg.seed, t, 1),
                )?;
                let (est, trace) = estimate_multipath_traced(
                    &channel,
                    &schedule,
                    &grid_tx,
                    &grid_rx,
                    &noise,
                    cfg.num_paths,
                    cfg.row_mode,
                    &FeedbackScheme::None,
                    derive_seed(cfg.seed, t, 2),
                )?;

                let mut truth = Array2::<Complex64>::zeros((cfg.tx_antennas, cfg.num_paths));
                for (l, p) in paths.iter().enumerate() {
                    let mu = array::angle_to_spatial_freq(p.aod, &tx_cfg);
                    truth
                        .column_mut(l)
                        .assign(array::steering_vector(mu, &tx_cfg).entries());
                }
                let abp_err = assignment_error(&truth, est.a_t_hat());

                // Baseline: per path slot, the strongest beam's own pointing
                // frequency is the estimate.
                let mut gob = Array2::<Complex64>::zeros((cfg.tx_antennas, cfg.num_paths));
                for (l, path_trace) in trace.aod.iter().enumerate() {
                    let best = path_trace
                        .beam_powers
                        .iter()
                        .enumerate()
                        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                        .map(|(i, _)| i)
                        .unwrap_or(0);
                    let freq = grid_tx.beam_freq(best);
                    gob.column_mut(l)
                        .assign(array::steering_vector(freq, &tx_cfg).entries());
                }
                let gob_err = assignment_error(&truth, &gob);
                Ok((abp_err, gob_err))
            });
            let outs = outs.into_iter().collect::<Result<Vec<_>, _>>()?;

            let params = format!(
                "n_t={n_t};m_t={m_t};omega_tr={};snr_db={snr_db}",
                n_t * m_t
            );
            report.push(
                &params,
                "abp_matrix_mse",
                mean(&outs.iter().map(|o| o.0).collect::<Vec<_>>()),
                cfg.trials,
                cfg.seed,
            );
            report.push(
                &params,
                "gob_matrix_mse",
                mean(&outs.iter().map(|o| o.1).collect::<Vec<_>>()),
                cfg.trials,
                cfg.seed,
            );
        }
    }
    Ok(report)
}
