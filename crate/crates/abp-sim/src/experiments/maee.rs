//! Mean absolute angle estimation error in degrees per array size, plus the
//! trade-off table relating the pair offset to the sweep overhead.

use abp_core::array::UlaConfig;
use abp_core::channel::{build_channel, derive_seed, sample_paths, AngleRange, GainLaw, NoiseModel};
use abp_core::codebook::full_range_grid;
use abp_core::estimator::estimate_single_path;

use crate::config::MaeeConfig;
use crate::experiments::common::{mean, parallel_trials};
use crate::report::MetricReport;
use crate::SimError;

/// Angle distance through the endfire wrap: `θ = +90°` and `θ = -90°` are
/// the same array response on a half-wavelength ULA, so an estimate on the
/// "wrong" side of endfire is physically adjacent, not 180° off.
fn folded_error_deg(est_deg: f64, true_deg: f64) -> f64 {
    let direct = (est_deg - true_deg).abs();
    let through_endfire = 180.0 - est_deg.abs() - true_deg.abs();
    direct.min(through_endfire.abs())
}

struct MaeePoint {
    raw_deg: f64,
    folded_deg: f64,
}

/// Mean |θ − θ̂| in degrees on the AoD side, raw and endfire-folded.
fn maee_deg(
    n_tot: usize,
    m_tot: usize,
    snr_db: f64,
    trials: u64,
    seed: u64,
) -> Result<MaeePoint, SimError> {
    let tx_cfg = UlaConfig::half_wavelength(n_tot)?;
    let rx_cfg = UlaConfig::half_wavelength(m_tot)?;
    let grid_tx = full_range_grid(std::f64::consts::FRAC_PI_2 / n_tot as f64, &tx_cfg)?;
    let grid_rx = full_range_grid(std::f64::consts::FRAC_PI_2 / m_tot as f64, &rx_cfg)?;
    let noise = NoiseModel::from_snr_db(snr_db)?;
    let errs: Vec<Result<(f64, f64), SimError>> = parallel_trials(trials, |t| {
        let paths = sample_paths(derive_seed(seed, t, 0), 1, AngleRange::full(), GainLaw::Unit)?;
        let truth = paths[0].aod.degrees();
        let channel = build_channel(paths, &tx_cfg, &rx_cfg)?;
        let (aod, _) = estimate_single_path(
            &channel,
            &grid_tx,
            &grid_rx,
            &noise,
            derive_seed(seed, t, 1),
        )?;
        let est = aod.angle.degrees();
        Ok(((est - truth).abs(), folded_error_deg(est, truth)))
    });
    let errs = errs.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(MaeePoint {
        raw_deg: mean(&errs.iter().map(|e| e.0).collect::<Vec<_>>()),
        folded_deg: mean(&errs.iter().map(|e| e.1).collect::<Vec<_>>()),
    })
}

pub fn run_maee_tradeoff(cfg: &MaeeConfig) -> Result<MetricReport, SimError> {
    let mut report = MetricReport::new("maee");

    for &n in &cfg.tx_antennas {
        let trials = if n >= 64 {
            cfg.large_array_trials
        } else {
            cfg.trials
        };
        for &snr_db in &cfg.snr_db {
            let point = maee_deg(n, cfg.rx_antennas, snr_db, trials, cfg.seed)?;
            let params = format!("n_tot={n};m_tot={};snr_db={snr_db}", cfg.rx_antennas);
            report.push(&params, "maee_deg", point.raw_deg, trials, cfg.seed);
            report.push(&params, "maee_deg_folded", point.folded_deg, trials, cfg.seed);
        }
    }

    // Trade-off table: δ in degrees maps to N_ant = 90°/δ and a two-sided
    // sweep of (180°/2δ)² attempts under the degree-arithmetic beam count.
    for &delta_deg in &cfg.tradeoff_delta_deg {
        let n_ant = (90.0 / delta_deg).round() as usize;
        let beams_per_side = 180.0 / (2.0 * delta_deg);
        let iterations = (beams_per_side * beams_per_side).round();
        let trials = if n_ant >= 64 {
            cfg.large_array_trials
        } else {
            cfg.trials
        };
        let point = maee_deg(n_ant, n_ant, cfg.tradeoff_snr_db, trials, cfg.seed)?;
        let params = format!(
            "delta_deg={delta_deg};n_ant={n_ant};snr_db={}",
            cfg.tradeoff_snr_db
        );
        report.push(&params, "iterations", iterations, trials, cfg.seed);
        report.push(&params, "maee_deg", point.raw_deg, trials, cfg.seed);
        report.push(&params, "maee_deg_folded", point.folded_deg, trials, cfg.seed);
    }
    Ok(report)
}
