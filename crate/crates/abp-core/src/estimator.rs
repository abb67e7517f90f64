//! Ratio-metric angle estimation: single-path joint AoD/AoA sweeps and the
//! multi-RF-chain multi-path procedure with randomized probing matrices.
//!
//! The measured quantity is the amplitude-comparison ratio of a beam pair,
//! `ζ = (χ_Δ − χ_Σ)/(χ_Δ + χ_Σ)`, where `χ_Δ` and `χ_Σ` are the received
//! powers on the lower- and higher-frequency member beams. For a pair with
//! boresight `ν` and offset `δ`, in the high-power regime
//! `ζ = −sin(μ−ν)sin δ / (1 − cos(μ−ν)cos δ)`, a strictly decreasing and
//! hence invertible function of `μ − ν` на the probing range, so the in-range
//! spatial frequency is recovered in closed form from a single scalar.
//!
//! Estimation proceeds in three steps:
//! 1. sound the channel with a TDM probing schedule,
//! 2. select the strongest receive (transmit) probing by total power,
//! 3. per path slot, pick the max-power beam plus its stronger neighbor
//!    (the pair containing the path almost surely, noiselessly always), read
//!    the ratio and invert it.

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::array::{self, PhysicalAngle, SpatialFrequency};
use crate::channel::{derive_seed, measure, ChannelInstance, NoiseModel};
use crate::codebook::{in_order_schedule, AuxiliaryBeamPair, BeamPairGrid, ProbingSchedule};
use crate::error::{Error, Result};
use crate::quantizer::ScalarCodebook;

/// Amplitude-comparison measure, clamped to `[-1, 1]`.
///
/// Noisy power differencing can push the raw ratio slightly outside the
/// closed-form range; clamping keeps the arcsin inversion in domain at a
/// negligible bias for the SNRs of interest.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct RatioMetric(f64);

impl RatioMetric {
    pub fn new(value: f64) -> Self {
        Self(value.clamp(-1.0, 1.0))
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

/// The two member-beam powers of a selected pair; `delta_power` belongs to
/// the lower-frequency beam.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerPair {
    pub delta_power: f64,
    pub sigma_power: f64,
    pub pair: AuxiliaryBeamPair,
}

/// A recovered spatial frequency with its physical angle and provenance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleEstimate {
    pub spatial_freq: SpatialFrequency,
    pub angle: PhysicalAngle,
    pub pair_id: usize,
    pub ratio: RatioMetric,
    /// Set when the strongest beam sits on the grid edge, i.e. the true
    /// frequency may lie at or beyond the coverage boundary.
    pub out_of_coverage: bool,
}

/// Joint per-path AoD/AoA estimates plus the assembled response matrices.
#[derive(Debug, Clone)]
pub struct MultipathEstimate {
    per_path: Vec<(AngleEstimate, AngleEstimate)>,
    a_t_hat: Array2<Complex64>,
    a_r_hat: Array2<Complex64>,
}

impl MultipathEstimate {
    /// `(AoD, AoA)` estimate of each path slot.
    pub fn per_path(&self) -> &[(AngleEstimate, AngleEstimate)] {
        &self.per_path
    }

    /// `N_tot × N_p` matrix of estimated transmit array response vectors.
    pub fn a_t_hat(&self) -> &Array2<Complex64> {
        &self.a_t_hat
    }

    /// `M_tot × N_p` matrix of estimated receive array response vectors.
    pub fn a_r_hat(&self) -> &Array2<Complex64> {
        &self.a_r_hat
    }
}

/// How estimation path slots map onto measurement rows (or columns).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RowAssignment {
    /// Path `ℓ` reads row `ℓ` of the single probing selected by total
    /// power, the literal reading of the procedure.
    Literal,
    /// Path slots take distinct lanes ranked by peak power across *all*
    /// probings, skipping lanes whose strongest beam pair is already taken.
    /// One probing rarely carries beams aligned with every path, so lane
    /// reuse across the sweep is what keeps the slots on distinct paths.
    Greedy,
}

/// Feedback quantization applied to the AoD side before the transmitter
/// reconstructs the angle.
#[derive(Debug, Clone, Copy)]
pub enum FeedbackScheme<'a> {
    /// Full-precision feedback.
    None,
    /// The ratio metric is quantized, then inverted at the transmitter.
    Ratio(&'a ScalarCodebook),
    /// The ratio is inverted at the receiver and the resulting spatial
    /// frequency is quantized.
    Frequency(&'a ScalarCodebook),
}

/// Per-path trace of the decisions taken while estimating one side.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PathTrace {
    pub slot: usize,
    pub lane: usize,
    pub beam_powers: Vec<f64>,
    pub pair_id: usize,
    pub ratio: f64,
    pub spatial_freq: f64,
}

/// Full estimation trace, exportable as JSON for debugging and baselines.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EstimationTrace {
    pub selected_rx_probing: usize,
    pub selected_tx_probing: usize,
    pub aod: Vec<PathTrace>,
    pub aoa: Vec<PathTrace>,
}

impl EstimationTrace {
    pub fn export_json(&self) -> String {
        serde_json::to_string(self).expect("trace is always serializable")
    }
}

/// Closed-form ratio `ζ(μ) = −sin(μ−ν)sin δ / (1 − cos(μ−ν)cos δ)`.
pub fn ratio_metric_closed_form(freq: SpatialFrequency, pair: &AuxiliaryBeamPair) -> RatioMetric {
    let z = freq.radians() - pair.boresight();
    let delta = pair.offset();
    RatioMetric::new(-(z.sin() * delta.sin()) / (1.0 - z.cos() * delta.cos()))
}

/// Ratio from measured powers, `(χ_Δ − χ_Σ)/(χ_Δ + χ_Σ)`.
pub fn ratio_from_powers(p: &PowerPair) -> Result<RatioMetric> {
    let total = p.delta_power + p.sigma_power;
    if total <= 0.0 {
        return Err(Error::DegenerateMeasurement);
    }
    Ok(RatioMetric::new((p.delta_power - p.sigma_power) / total))
}

/// Inverts the ratio back to a spatial frequency inside the pair's range:
///
/// `μ̂ = ν − arcsin((ζ sinδ − ζ√(1−ζ²) sinδ cosδ) / (sin²δ + ζ² cos²δ))`.
pub fn invert_ratio(ratio: RatioMetric, pair: &AuxiliaryBeamPair) -> SpatialFrequency {
    let zeta = ratio.value();
    let delta = pair.offset();
    let (sd, cd) = (delta.sin(), delta.cos());
    let num = zeta * sd - zeta * (1.0 - zeta * zeta).max(0.0).sqrt() * sd * cd;
    let den = sd * sd + zeta * zeta * cd * cd;
    let arg = (num / den).clamp(-1.0, 1.0);
    let mu = pair.boresight() - arg.asin();
    SpatialFrequency::new(mu.clamp(pair.low_freq(), pair.high_freq()))
        .expect("inverted frequency is finite")
}

/// Picks the auxiliary beam pair covering the strongest signal.
///
/// `beam_powers[id]` is the received power of grid beam `id`. The globally
/// strongest beam is paired with whichever of its adjacent beams is stronger;
/// ties break to the lower index throughout.
pub fn select_pair(beam_powers: &[f64], grid: &BeamPairGrid) -> Result<(usize, PowerPair)> {
    if beam_powers.len() != grid.num_beams() {
        return Err(Error::Contract(format!(
            "got {} beam powers for a grid of {} beams",
            beam_powers.len(),
            grid.num_beams()
        )));
    }
    let mut best = 0;
    for (i, &p) in beam_powers.iter().enumerate() {
        if p > beam_powers[best] {
            best = i;
        }
    }
    // Candidate (neighbor beam, resulting pair), in tie-break order: the
    // lower adjacent pair first, then the upper, then the wrap-around pair
    // when the grid spans a full period and the winning beam sits on an
    // edge (its alias lives on the opposite edge).
    let last = grid.num_beams() - 1;
    let mut candidates: Vec<(usize, usize)> = Vec::with_capacity(3);
    if best > 0 {
        candidates.push((best - 1, best - 1));
    }
    if best < last {
        candidates.push((best + 1, best));
    }
    if grid.wraps() {
        if best == 0 {
            candidates.push((last - 1, last - 1));
        } else if best == last {
            candidates.push((1, 0));
        }
    }
    let mut chosen = candidates[0];
    for &c in &candidates[1..] {
        if beam_powers[c.0] > beam_powers[chosen.0] {
            chosen = c;
        }
    }
    let pair_index = chosen.1;
    let pair = grid.pair(pair_index);
    Ok((
        pair_index,
        PowerPair {
            delta_power: beam_powers[pair.low_beam_id()],
            sigma_power: beam_powers[pair.high_beam_id()],
            pair,
        },
    ))
}

/// Maps path slots onto the rows of a measurement block.
pub fn row_assignment(
    y_block: &Array2<Complex64>,
    num_paths: usize,
    mode: RowAssignment,
) -> Result<Vec<usize>> {
    let rows = y_block.nrows();
    if num_paths > rows {
        return Err(Error::Contract(format!(
            "{num_paths} paths cannot map onto {rows} rows"
        )));
    }
    match mode {
        RowAssignment::Literal => Ok((0..num_paths).collect()),
        RowAssignment::Greedy => {
            let mut peaks: Vec<(usize, f64)> = (0..rows)
                .map(|r| {
                    let peak = y_block
                        .row(r)
                        .iter()
                        .map(|z| z.norm_sqr())
                        .fold(0.0f64, f64::max);
                    (r, peak)
                })
                .collect();
            peaks.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
            Ok(peaks.into_iter().take(num_paths).map(|(r, _)| r).collect())
        }
    }
}

/// Collapses a per-lane power readout to per-beam powers via the first lane
/// carrying each beam ID (lowest index on repeats). Fails listing the beams
/// the schedule never formed.
fn collapse_to_beam_powers(
    lane_powers: &[f64],
    schedule_ids: &[usize],
    grid: &BeamPairGrid,
) -> Result<Vec<f64>> {
    let mut beam_powers = vec![f64::NAN; grid.num_beams()];
    for (col, &id) in schedule_ids.iter().enumerate() {
        if beam_powers[id].is_nan() {
            beam_powers[id] = lane_powers[col];
        }
    }
    let missing: Vec<usize> = (0..grid.num_beams())
        .filter(|&id| beam_powers[id].is_nan())
        .collect();
    if !missing.is_empty() {
        return Err(Error::EstimationIncomplete { missing });
    }
    Ok(beam_powers)
}

struct SideEstimate {
    estimate: AngleEstimate,
    trace: PathTrace,
}

/// Estimates one side (AoD or AoA) for one path from its collapsed per-beam
/// power readout.
fn estimate_side(
    slot: usize,
    lane: usize,
    beam_powers: Vec<f64>,
    grid: &BeamPairGrid,
    feedback: &FeedbackScheme<'_>,
) -> Result<SideEstimate> {
    let (pair_id, powers) = select_pair(&beam_powers, grid)?;
    let ratio = ratio_from_powers(&powers)?;
    let (ratio, freq) = match feedback {
        FeedbackScheme::None => (ratio, invert_ratio(ratio, &powers.pair)),
        FeedbackScheme::Ratio(codebook) => {
            let quantized = RatioMetric::new(codebook.quantize(ratio.value()).0);
            (quantized, invert_ratio(quantized, &powers.pair))
        }
        FeedbackScheme::Frequency(codebook) => {
            let raw = invert_ratio(ratio, &powers.pair);
            let quantized = codebook.quantize(raw.radians()).0;
            (ratio, SpatialFrequency::new(quantized)?)
        }
    };
    // A full-period grid has no outside; otherwise an edge-beam winner means
    // the truth may lie at or beyond the coverage boundary.
    let out_of_coverage = !grid.wraps() && {
        let strongest = if powers.delta_power >= powers.sigma_power {
            powers.pair.low_beam_id()
        } else {
            powers.pair.high_beam_id()
        };
        strongest == 0 || strongest == grid.num_beams() - 1
    };
    // Grids may overshoot the reachable frequency range on their last pair;
    // clamp the arcsin argument rather than failing the conversion.
    let max_freq = grid.cfg().max_spatial_freq();
    let clamped = freq.radians().clamp(-max_freq, max_freq);
    let angle = array::spatial_freq_to_angle(SpatialFrequency::new(clamped)?, grid.cfg())?;
    Ok(SideEstimate {
        estimate: AngleEstimate {
            spatial_freq: freq,
            angle,
            pair_id,
            ratio,
            out_of_coverage,
        },
        trace: PathTrace {
            slot,
            lane,
            beam_powers,
            pair_id,
            ratio: ratio.value(),
            spatial_freq: freq.radians(),
        },
    })
}

/// Multi-path AoD/AoA estimation over a probing schedule, with trace.
///
/// Sounds every `(receive probing, transmit probing)` slot pair once, picks
/// the receive and transmit probings maximizing `tr(Y*Y)`, then runs the
/// pair-selection/ratio/inversion chain per path slot on the selected blocks.
pub fn estimate_multipath_traced(
    channel: &ChannelInstance,
    schedule: &ProbingSchedule,
    grid_tx: &BeamPairGrid,
    grid_rx: &BeamPairGrid,
    noise: &NoiseModel,
    num_paths: usize,
    mode: RowAssignment,
    feedback: &FeedbackScheme<'_>,
    rng_seed: u64,
) -> Result<(MultipathEstimate, EstimationTrace)> {
    let m_t = schedule.rx_probings().len();
    let n_t = schedule.tx_probings().len();
    if num_paths == 0 {
        return Err(Error::Contract("need at least one path slot".into()));
    }
    let m_rf = schedule.rx_probings()[0].width();
    let n_rf = schedule.tx_probings()[0].width();
    if num_paths > m_rf.min(n_rf) {
        return Err(Error::Contract(format!(
            "{num_paths} paths need at least as many RF chains, got {n_rf}x{m_rf}"
        )));
    }

    // One sounding pass builds the full measurement matrix Z (receive lanes
    // × transmit lanes): lane (m_t, r) against lane (n_t, i), with noise
    // fresh per transmit lane within each receive probing.
    let f_concat = schedule.tx_concat();
    let total_rx = m_t * m_rf;
    let total_tx = n_t * n_rf;
    let mut z = Array2::<Complex64>::zeros((total_rx, total_tx));
    for (mt, w) in schedule.rx_probings().iter().enumerate() {
        let block = measure(
            channel,
            &f_concat,
            w.matrix(),
            noise,
            derive_seed(rng_seed, mt as u64, 0),
        )?;
        for r in 0..m_rf {
            for c in 0..total_tx {
                z[(mt * m_rf + r, c)] = block[(r, c)];
            }
        }
    }

    // Probing-level energies: tr(Y*Y) sums a row (column) band of Z.
    let selected_rx = argmax_by(0..m_t, |mt| {
        (mt * m_rf..(mt + 1) * m_rf)
            .map(|r| z.row(r).iter().map(|x| x.norm_sqr()).sum::<f64>())
            .sum()
    });
    let selected_tx = argmax_by(0..n_t, |nt| {
        (nt * n_rf..(nt + 1) * n_rf)
            .map(|c| z.column(c).iter().map(|x| x.norm_sqr()).sum::<f64>())
            .sum()
    });

    let tx_ids = schedule.tx_beam_ids();
    let rx_ids = schedule.rx_beam_ids();

    // AoD readouts are rows of Z; AoA readouts are columns.
    let rx_lane_beam_powers = |lane: usize| -> Result<Vec<f64>> {
        let powers: Vec<f64> = z.row(lane).iter().map(|x| x.norm_sqr()).collect();
        collapse_to_beam_powers(&powers, &tx_ids, grid_tx)
    };
    let tx_lane_beam_powers = |lane: usize| -> Result<Vec<f64>> {
        let powers: Vec<f64> = z.column(lane).iter().map(|x| x.norm_sqr()).collect();
        collapse_to_beam_powers(&powers, &rx_ids, grid_rx)
    };

    let (aod_lanes, aoa_lanes) = match mode {
        RowAssignment::Literal => (
            (0..num_paths).map(|l| selected_rx * m_rf + l).collect::<Vec<_>>(),
            (0..num_paths).map(|l| selected_tx * n_rf + l).collect::<Vec<_>>(),
        ),
        RowAssignment::Greedy => (
            greedy_lane_association(total_rx, num_paths, grid_tx, &rx_lane_beam_powers)?,
            greedy_lane_association(total_tx, num_paths, grid_rx, &tx_lane_beam_powers)?,
        ),
    };

    let mut per_path = Vec::with_capacity(num_paths);
    let mut aod_traces = Vec::with_capacity(num_paths);
    let mut aoa_traces = Vec::with_capacity(num_paths);
    for slot in 0..num_paths {
        let row = aod_lanes[slot];
        let aod = estimate_side(slot, row, rx_lane_beam_powers(row)?, grid_tx, feedback)?;

        let col = aoa_lanes[slot];
        // AoA stays receiver-local; feedback quantization never applies.
        let aoa = estimate_side(
            slot,
            col,
            tx_lane_beam_powers(col)?,
            grid_rx,
            &FeedbackScheme::None,
        )?;

        per_path.push((aod.estimate, aoa.estimate));
        aod_traces.push(aod.trace);
        aoa_traces.push(aoa.trace);
    }

    let n = grid_tx.cfg().num_elements();
    let m = grid_rx.cfg().num_elements();
    let mut a_t_hat = Array2::zeros((n, num_paths));
    let mut a_r_hat = Array2::zeros((m, num_paths));
    for (l, (aod, aoa)) in per_path.iter().enumerate() {
        a_t_hat
            .column_mut(l)
            .assign(array::steering_vector(aod.spatial_freq, grid_tx.cfg()).entries());
        a_r_hat
            .column_mut(l)
            .assign(array::steering_vector(aoa.spatial_freq, grid_rx.cfg()).entries());
    }

    Ok((
        MultipathEstimate {
            per_path,
            a_t_hat,
            a_r_hat,
        },
        EstimationTrace {
            selected_rx_probing: selected_rx,
            selected_tx_probing: selected_tx,
            aod: aod_traces,
            aoa: aoa_traces,
        },
    ))
}

/// Multi-path estimation without the trace.
pub fn estimate_multipath(
    channel: &ChannelInstance,
    schedule: &ProbingSchedule,
    grid_tx: &BeamPairGrid,
    grid_rx: &BeamPairGrid,
    noise: &NoiseModel,
    num_paths: usize,
    mode: RowAssignment,
    rng_seed: u64,
) -> Result<MultipathEstimate> {
    estimate_multipath_traced(
        channel,
        schedule,
        grid_tx,
        grid_rx,
        noise,
        num_paths,
        mode,
        &FeedbackScheme::None,
        rng_seed,
    )
    .map(|(est, _)| est)
}

/// Joint single-path AoD/AoA estimation by an exhaustive TDM beam sweep.
///
/// Runs the multi-path machinery with one RF chain per side and the in-order
/// exhaustive schedule: all `(N_K+1)(M_K+1)` beam combinations are measured,
/// the best receive beam (by total sweep power) anchors the AoD readout and
/// the best transmit beam anchors the AoA readout.
pub fn estimate_single_path(
    channel: &ChannelInstance,
    grid_tx: &BeamPairGrid,
    grid_rx: &BeamPairGrid,
    noise: &NoiseModel,
    rng_seed: u64,
) -> Result<(AngleEstimate, AngleEstimate)> {
    estimate_single_path_with_feedback(
        channel,
        grid_tx,
        grid_rx,
        noise,
        &FeedbackScheme::None,
        rng_seed,
    )
}

/// Single-path estimation with an explicit AoD feedback scheme.
pub fn estimate_single_path_with_feedback(
    channel: &ChannelInstance,
    grid_tx: &BeamPairGrid,
    grid_rx: &BeamPairGrid,
    noise: &NoiseModel,
    feedback: &FeedbackScheme<'_>,
    rng_seed: u64,
) -> Result<(AngleEstimate, AngleEstimate)> {
    let schedule = in_order_schedule(grid_tx, grid_rx, 1, 1)?;
    let (est, _) = estimate_multipath_traced(
        channel,
        &schedule,
        grid_tx,
        grid_rx,
        noise,
        1,
        RowAssignment::Literal,
        feedback,
        rng_seed,
    )?;
    Ok(est.per_path()[0])
}

/// Greedy slot association across all lanes of one side: lanes are ranked
/// by their strongest beam power; slots take lanes in rank order, skipping
/// lanes whose induced beam pair is already claimed, then fall back to the
/// strongest unused lanes when fewer distinct pairs exist than slots.
fn greedy_lane_association(
    num_lanes: usize,
    num_slots: usize,
    grid: &BeamPairGrid,
    lane_beam_powers: &impl Fn(usize) -> Result<Vec<f64>>,
) -> Result<Vec<usize>> {
    let mut ranked: Vec<(usize, usize, f64)> = Vec::with_capacity(num_lanes);
    for lane in 0..num_lanes {
        let beam_powers = lane_beam_powers(lane)?;
        let (pair_id, pp) = select_pair(&beam_powers, grid)?;
        ranked.push((lane, pair_id, pp.delta_power.max(pp.sigma_power)));
    }
    ranked.sort_by(|a, b| b.2.partial_cmp(&a.2).unwrap().then(a.0.cmp(&b.0)));

    let mut lanes = Vec::with_capacity(num_slots);
    let mut taken_pairs = Vec::with_capacity(num_slots);
    for &(lane, pair_id, _) in &ranked {
        if lanes.len() == num_slots {
            break;
        }
        if !taken_pairs.contains(&pair_id) {
            lanes.push(lane);
            taken_pairs.push(pair_id);
        }
    }
    for &(lane, _, _) in &ranked {
        if lanes.len() == num_slots {
            break;
        }
        if !lanes.contains(&lane) {
            lanes.push(lane);
        }
    }
    Ok(lanes)
}

fn argmax_by(range: std::ops::Range<usize>, score: impl Fn(usize) -> f64) -> usize {
    let mut best = range.start;
    let mut best_score = score(best);
    for i in range.skip(1) {
        let s = score(i);
        if s > best_score {
            best = i;
            best_score = s;
        }
    }
    best
}
