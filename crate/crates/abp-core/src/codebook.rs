//! Auxiliary-beam-pair grids, randomized multi-RF-chain probing schedules and
//! monopulse sum/difference beams.
//!
//! A grid tiles a spatial-frequency interval with beams spaced `2δ` apart.
//! Pair `n` consists of the two beams at `ν_n ∓ δ`, where `ν_n` is the pair
//! boresight; consecutive pairs share one beam, so a grid of `N_K` pairs has
//! `N_K + 1` beams. The open probing ranges `(ν_n − δ, ν_n + δ)` are disjoint
//! and together cover the grid interval.
//!
//! Probing schedules pick beams (by ID) into per-slot matrices, one column
//! per RF chain. In exhaustive mode the concatenation contains every grid
//! beam at least once so that any pair can later be located by beam ID.

use ndarray::Array2;
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::array::{self, SpatialFrequency, SteeringVector, UlaConfig};
use crate::error::{Error, Result};

/// Two consecutive grid beams probing the range `(boresight − δ, boresight + δ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuxiliaryBeamPair {
    boresight: f64,
    offset: f64,
    low_beam_id: usize,
    high_beam_id: usize,
}

impl AuxiliaryBeamPair {
    /// A free-standing pair, not attached to any grid. Beam IDs are 0 and 1.
    pub fn standalone(boresight: SpatialFrequency, offset: f64) -> Result<Self> {
        if !(offset > 0.0 && offset < std::f64::consts::PI) {
            return Err(Error::Config(format!(
                "pair offset must lie in (0, pi), got {offset}"
            )));
        }
        Ok(Self {
            boresight: boresight.radians(),
            offset,
            low_beam_id: 0,
            high_beam_id: 1,
        })
    }

    pub fn boresight(&self) -> f64 {
        self.boresight
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn low_freq(&self) -> f64 {
        self.boresight - self.offset
    }

    pub fn high_freq(&self) -> f64 {
        self.boresight + self.offset
    }

    pub fn low_beam_id(&self) -> usize {
        self.low_beam_id
    }

    pub fn high_beam_id(&self) -> usize {
        self.high_beam_id
    }

    /// Whether `freq` lies strictly inside the pair's probing range.
    pub fn contains(&self, freq: SpatialFrequency) -> bool {
        (freq.radians() - self.boresight).abs() < self.offset
    }
}

/// A tiling of `[freq_min, freq_max]` by auxiliary beam pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BeamPairGrid {
    freq_min: f64,
    offset: f64,
    num_pairs: usize,
    coverage: (f64, f64),
    cfg: UlaConfig,
}

impl BeamPairGrid {
    pub fn cfg(&self) -> &UlaConfig {
        &self.cfg
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn num_pairs(&self) -> usize {
        self.num_pairs
    }

    /// `N_K + 1` analog beams for `N_K` pairs.
    pub fn num_beams(&self) -> usize {
        self.num_pairs + 1
    }

    pub fn coverage(&self) -> (f64, f64) {
        self.coverage
    }

    /// Beam `id` points at `freq_min + 2·id·δ`.
    pub fn beam_freq(&self, id: usize) -> SpatialFrequency {
        debug_assert!(id < self.num_beams());
        SpatialFrequency::new(self.freq_min + 2.0 * id as f64 * self.offset)
            .expect("grid frequencies are finite")
    }

    pub fn beam_freqs(&self) -> Vec<SpatialFrequency> {
        (0..self.num_beams()).map(|id| self.beam_freq(id)).collect()
    }

    /// ID of the grid beam closest to `freq`.
    pub fn nearest_beam(&self, freq: SpatialFrequency) -> usize {
        let raw = (freq.radians() - self.freq_min) / (2.0 * self.offset);
        (raw.round().max(0.0) as usize).min(self.num_pairs)
    }

    /// Pair `n` spans beams `n` and `n+1`.
    pub fn pair(&self, n: usize) -> AuxiliaryBeamPair {
        debug_assert!(n < self.num_pairs);
        AuxiliaryBeamPair {
            boresight: self.freq_min + (2.0 * n as f64 + 1.0) * self.offset,
            offset: self.offset,
            low_beam_id: n,
            high_beam_id: n + 1,
        }
    }

    pub fn pairs(&self) -> Vec<AuxiliaryBeamPair> {
        (0..self.num_pairs).map(|n| self.pair(n)).collect()
    }

    /// Index of the pair whose closed probing range contains `freq`, if any.
    /// A frequency exactly on a shared beam belongs to the lower pair.
    pub fn pair_containing(&self, freq: SpatialFrequency) -> Option<usize> {
        let rel = (freq.radians() - self.freq_min) / (2.0 * self.offset);
        if rel < -1e-12 || rel > self.num_pairs as f64 + 1e-12 {
            return None;
        }
        let idx = if (rel - rel.round()).abs() < 1e-9 {
            (rel.round() as i64 - 1).max(0) as usize
        } else {
            rel.floor() as usize
        };
        Some(idx.min(self.num_pairs - 1))
    }

    /// Whether the grid spans a full 2π period, in which case the first and
    /// last beams are the same physical steering vector.
    pub fn wraps(&self) -> bool {
        (2.0 * self.num_pairs as f64 * self.offset - std::f64::consts::TAU).abs() < 1e-9
    }

    /// Steering vector of beam `id` on this grid's array.
    pub fn steering(&self, id: usize) -> SteeringVector {
        array::steering_vector(self.beam_freq(id), &self.cfg)
    }
}

/// Builds a grid of `ceil(width / 2δ)` pairs over `coverage`.
pub fn build_pair_grid(
    coverage: (f64, f64),
    offset: f64,
    cfg: &UlaConfig,
) -> Result<BeamPairGrid> {
    let (lo, hi) = coverage;
    if !(offset > 0.0 && offset < std::f64::consts::PI) {
        return Err(Error::Config(format!(
            "pair offset must lie in (0, pi), got {offset}"
        )));
    }
    let width = hi - lo;
    if !(width >= 2.0 * offset) || !width.is_finite() {
        return Err(Error::Config(format!(
            "coverage width {width} must be at least one pair width {}",
            2.0 * offset
        )));
    }
    let num_pairs = (width / (2.0 * offset)).ceil() as usize;
    Ok(BeamPairGrid {
        freq_min: lo,
        offset,
        num_pairs,
        coverage,
        cfg: *cfg,
    })
}

/// Grid over the array's full reachable spatial-frequency range
/// `[-2π d/λ, 2π d/λ]`, which for half-wavelength spacing wraps a complete
/// period.
pub fn full_range_grid(offset: f64, cfg: &UlaConfig) -> Result<BeamPairGrid> {
    let max = cfg.max_spatial_freq();
    build_pair_grid((-max, max), offset, cfg)
}

/// One probing slot: the beams formed simultaneously, one per RF chain.
#[derive(Debug, Clone)]
pub struct ProbingMatrix {
    beam_ids: Vec<usize>,
    matrix: Array2<Complex64>,
}

impl ProbingMatrix {
    fn from_ids(beam_ids: Vec<usize>, grid: &BeamPairGrid) -> Self {
        let n = grid.cfg().num_elements();
        let mut matrix = Array2::zeros((n, beam_ids.len()));
        for (j, &id) in beam_ids.iter().enumerate() {
            matrix.column_mut(j).assign(grid.steering(id).entries());
        }
        Self { beam_ids, matrix }
    }

    pub fn beam_ids(&self) -> &[usize] {
        &self.beam_ids
    }

    pub fn matrix(&self) -> &Array2<Complex64> {
        &self.matrix
    }

    pub fn width(&self) -> usize {
        self.beam_ids.len()
    }
}

/// TDM probing plan: `N_T` transmit slots against `M_T` receive slots.
#[derive(Debug, Clone)]
pub struct ProbingSchedule {
    tx_probings: Vec<ProbingMatrix>,
    rx_probings: Vec<ProbingMatrix>,
}

impl ProbingSchedule {
    pub fn tx_probings(&self) -> &[ProbingMatrix] {
        &self.tx_probings
    }

    pub fn rx_probings(&self) -> &[ProbingMatrix] {
        &self.rx_probings
    }

    /// Beam IDs of the concatenated transmit probing matrix `F_T`, in slot order.
    pub fn tx_beam_ids(&self) -> Vec<usize> {
        self.tx_probings
            .iter()
            .flat_map(|p| p.beam_ids().iter().copied())
            .collect()
    }

    pub fn rx_beam_ids(&self) -> Vec<usize> {
        self.rx_probings
            .iter()
            .flat_map(|p| p.beam_ids().iter().copied())
            .collect()
    }

    /// Concatenated `N_tot × N_T·N_RF` transmit probing matrix.
    pub fn tx_concat(&self) -> Array2<Complex64> {
        concat_probings(&self.tx_probings)
    }

    pub fn rx_concat(&self) -> Array2<Complex64> {
        concat_probings(&self.rx_probings)
    }

    /// Serializes slot structure and beam IDs to JSON for experiment replay.
    pub fn export_json(&self) -> String {
        #[derive(Serialize)]
        struct Export {
            tx_slots: Vec<Vec<usize>>,
            rx_slots: Vec<Vec<usize>>,
        }
        serde_json::to_string(&Export {
            tx_slots: self.tx_probings.iter().map(|p| p.beam_ids().to_vec()).collect(),
            rx_slots: self.rx_probings.iter().map(|p| p.beam_ids().to_vec()).collect(),
        })
        .expect("schedule export is always serializable")
    }
}

fn concat_probings(probings: &[ProbingMatrix]) -> Array2<Complex64> {
    let rows = probings[0].matrix.nrows();
    let total: usize = probings.iter().map(|p| p.width()).sum();
    let mut out = Array2::zeros((rows, total));
    let mut col = 0;
    for p in probings {
        for j in 0..p.width() {
            out.column_mut(col).assign(&p.matrix.column(j));
            col += 1;
        }
    }
    out
}

/// Whether a schedule must visit every grid beam at least once.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleMode {
    /// Every beam appears; pair lookup by beam ID always succeeds.
    Exhaustive,
    /// Unconstrained random picks; pairs may be missing.
    PureRandom,
}

/// Draws a randomized probing schedule. Deterministic per seed; columns
/// within one slot are always distinct.
pub fn random_probing_schedule(
    grid_tx: &BeamPairGrid,
    grid_rx: &BeamPairGrid,
    n_rf: usize,
    m_rf: usize,
    n_t: usize,
    m_t: usize,
    mode: ScheduleMode,
    rng_seed: u64,
) -> Result<ProbingSchedule> {
    let mut rng = ChaCha12Rng::seed_from_u64(rng_seed);
    let tx_slots = draw_slots(grid_tx.num_beams(), n_rf, n_t, mode, &mut rng)?;
    let rx_slots = draw_slots(grid_rx.num_beams(), m_rf, m_t, mode, &mut rng)?;
    Ok(ProbingSchedule {
        tx_probings: tx_slots
            .into_iter()
            .map(|ids| ProbingMatrix::from_ids(ids, grid_tx))
            .collect(),
        rx_probings: rx_slots
            .into_iter()
            .map(|ids| ProbingMatrix::from_ids(ids, grid_rx))
            .collect(),
    })
}

/// Deterministic exhaustive schedule that visits grid beams in index order.
/// Slot `t` carries beams `t·rf, …, t·rf + rf − 1`; a ragged final slot wraps
/// around to the first beams, keeping its columns distinct.
pub fn in_order_schedule(
    grid_tx: &BeamPairGrid,
    grid_rx: &BeamPairGrid,
    n_rf: usize,
    m_rf: usize,
) -> Result<ProbingSchedule> {
    let tx_slots = in_order_slots(grid_tx.num_beams(), n_rf)?;
    let rx_slots = in_order_slots(grid_rx.num_beams(), m_rf)?;
    Ok(ProbingSchedule {
        tx_probings: tx_slots
            .into_iter()
            .map(|ids| ProbingMatrix::from_ids(ids, grid_tx))
            .collect(),
        rx_probings: rx_slots
            .into_iter()
            .map(|ids| ProbingMatrix::from_ids(ids, grid_rx))
            .collect(),
    })
}

fn in_order_slots(num_beams: usize, rf: usize) -> Result<Vec<Vec<usize>>> {
    if rf == 0 || rf > num_beams {
        return Err(Error::Config(format!(
            "RF chain count {rf} must be in 1..={num_beams}"
        )));
    }
    let slots = num_beams.div_ceil(rf);
    Ok((0..slots)
        .map(|t| (0..rf).map(|j| (t * rf + j) % num_beams).collect())
        .collect())
}

fn draw_slots(
    num_beams: usize,
    rf: usize,
    slots: usize,
    mode: ScheduleMode,
    rng: &mut ChaCha12Rng,
) -> Result<Vec<Vec<usize>>> {
    if rf == 0 || rf > num_beams {
        return Err(Error::Config(format!(
            "RF chain count {rf} must be in 1..={num_beams}"
        )));
    }
    if slots == 0 {
        return Err(Error::Config("schedule needs at least one slot".into()));
    }
    let capacity = rf * slots;
    match mode {
        ScheduleMode::PureRandom => Ok((0..slots)
            .map(|_| {
                let mut ids: Vec<usize> = (0..num_beams).collect();
                ids.shuffle(rng);
                ids.truncate(rf);
                ids
            })
            .collect()),
        ScheduleMode::Exhaustive => {
            if capacity < num_beams {
                return Err(Error::Config(format!(
                    "exhaustive coverage needs {num_beams} slots x chains, only {capacity} available"
                )));
            }
            // Multiset of beam picks: every beam once, the surplus drawn
            // uniformly but capped at `slots` occurrences per beam so each
            // slot can keep its columns distinct.
            let mut counts = vec![1usize; num_beams];
            for _ in num_beams..capacity {
                loop {
                    let id = rng.gen_range(0..num_beams);
                    if counts[id] < slots {
                        counts[id] += 1;
                        break;
                    }
                }
            }
            // Deal slot by slot. A beam whose remaining copy count equals the
            // number of remaining slots must appear in every one of them, so
            // it is forced into the current slot; the rest fill up randomly.
            // The cap above guarantees at most `rf` forced beams per slot and
            // at least `rf` beams with copies left.
            let mut slot_ids: Vec<Vec<usize>> = Vec::with_capacity(slots);
            for slot in 0..slots {
                let remaining = slots - slot;
                let mut chosen: Vec<usize> =
                    (0..num_beams).filter(|&b| counts[b] == remaining).collect();
                debug_assert!(chosen.len() <= rf);
                let mut pool: Vec<usize> = (0..num_beams)
                    .filter(|&b| counts[b] > 0 && counts[b] < remaining)
                    .collect();
                pool.shuffle(rng);
                while chosen.len() < rf {
                    let b = pool.pop().ok_or_else(|| {
                        Error::Config("cannot fill slot with distinct beams".into())
                    })?;
                    chosen.push(b);
                }
                for &b in &chosen {
                    counts[b] -= 1;
                }
                chosen.shuffle(rng);
                slot_ids.push(chosen);
            }
            Ok(slot_ids)
        }
    }
}

/// Monopulse sum beam and its null-steering difference beam.
///
/// The sum beam is the plain array response at `boresight`; the difference
/// beam negates the second half of the aperture, which places an exact null
/// on the sum beam's boresight. Requires an even element count.
pub fn monopulse_beams(
    boresight: SpatialFrequency,
    cfg: &UlaConfig,
) -> Result<(SteeringVector, SteeringVector)> {
    let m = cfg.num_elements();
    if m % 2 != 0 {
        return Err(Error::Config(format!(
            "monopulse difference beam needs an even element count, got {m}"
        )));
    }
    let sum = array::steering_vector(boresight, cfg);
    let mut entries = sum.entries().clone();
    for k in m / 2..m {
        entries[k] = -entries[k];
    }
    Ok((sum, SteeringVector::from_entries(entries)))
}

/// Power pattern `|v* a(μ)|²` of a beamforming vector over a frequency grid.
pub fn beam_pattern(vector: &SteeringVector, freq_grid: &[SpatialFrequency]) -> Vec<f64> {
    let n = vector.len();
    freq_grid
        .iter()
        .map(|f| {
            let a = SteeringVector::from_freq_raw(f.radians(), n);
            vector.inner(&a).norm_sqr()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array::PhysicalAngle;
    use std::f64::consts::PI;

    fn freq(v: f64) -> SpatialFrequency {
        SpatialFrequency::new(v).unwrap()
    }

    #[test]
    fn grid_eight_pairs_nine_beams() {
        let cfg = UlaConfig::half_wavelength(8).unwrap();
        let g = build_pair_grid((-PI, PI), PI / 8.0, &cfg).unwrap();
        assert_eq!(g.num_pairs(), 8);
        assert_eq!(g.num_beams(), 9);
        for (k, bf) in g.beam_freqs().iter().enumerate() {
            let expected = -PI + k as f64 * PI / 4.0;
            assert!((bf.radians() - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn grid_four_pairs_five_beams() {
        let cfg = UlaConfig::half_wavelength(4).unwrap();
        let g = build_pair_grid((-PI, PI), PI / 4.0, &cfg).unwrap();
        assert_eq!(g.num_pairs(), 4);
        assert_eq!(g.num_beams(), 5);
    }

    #[test]
    fn beam_count_is_pairs_plus_one_for_any_grid() {
        let cfg = UlaConfig::half_wavelength(16).unwrap();
        for k in 1..=24 {
            let delta = PI / (2.0 * k as f64);
            let g = build_pair_grid((-PI, PI), delta, &cfg).unwrap();
            assert_eq!(g.num_beams(), g.num_pairs() + 1);
        }
    }

    #[test]
    fn degenerate_coverage_is_config_error() {
        let cfg = UlaConfig::half_wavelength(8).unwrap();
        assert!(build_pair_grid((0.0, 0.1), PI / 8.0, &cfg).is_err());
        assert!(build_pair_grid((-PI, PI), 0.0, &cfg).is_err());
    }

    #[test]
    fn pair_ranges_tile_the_coverage_exactly() {
        // Index arithmetic: pair n spans (2n, 2n+2) offsets from freq_min, so
        // disjointness and coverage reduce to integer statements.
        let cfg = UlaConfig::half_wavelength(8).unwrap();
        let g = build_pair_grid((-PI, PI), PI / 8.0, &cfg).unwrap();
        for n in 0..g.num_pairs() {
            let p = g.pair(n);
            assert_eq!(p.low_beam_id(), n);
            assert_eq!(p.high_beam_id(), n + 1);
            assert!((p.low_freq() - g.beam_freq(n).radians()).abs() < 1e-12);
            assert!((p.high_freq() - g.beam_freq(n + 1).radians()).abs() < 1e-12);
            if n > 0 {
                // Consecutive pairs share exactly the boundary beam.
                assert_eq!(g.pair(n - 1).high_beam_id(), p.low_beam_id());
            }
        }
        let first = g.pair(0);
        let last = g.pair(g.num_pairs() - 1);
        assert!((first.low_freq() - g.coverage().0).abs() < 1e-12);
        assert!(last.high_freq() >= g.coverage().1 - 1e-12);
    }

    #[test]
    fn beam_ids_round_trip_through_frequencies() {
        let cfg = UlaConfig::half_wavelength(8).unwrap();
        let g = build_pair_grid((-PI, PI), PI / 16.0, &cfg).unwrap();
        for id in 0..g.num_beams() {
            assert_eq!(g.nearest_beam(g.beam_freq(id)), id);
        }
    }

    #[test]
    fn pair_containing_handles_boundaries() {
        let cfg = UlaConfig::half_wavelength(8).unwrap();
        let g = build_pair_grid((-PI, PI), PI / 8.0, &cfg).unwrap();
        // Interior point of pair 3.
        let p3 = g.pair(3);
        assert_eq!(g.pair_containing(freq(p3.boresight() + 0.01)), Some(3));
        // A shared beam frequency belongs to the lower pair.
        assert_eq!(g.pair_containing(g.beam_freq(4)), Some(3));
        // Outside coverage.
        assert_eq!(g.pair_containing(freq(-PI - 0.5)), None);
    }

    #[test]
    fn exhaustive_exact_fit_is_a_permutation() {
        let cfg = UlaConfig::half_wavelength(8).unwrap();
        let g = build_pair_grid((-PI, PI), PI / 8.0, &cfg).unwrap(); // 9 beams
        let s = random_probing_schedule(&g, &g, 3, 3, 3, 3, ScheduleMode::Exhaustive, 5).unwrap();
        let mut ids = s.tx_beam_ids();
        ids.sort_unstable();
        assert_eq!(ids, (0..9).collect::<Vec<_>>());
        for p in s.tx_probings() {
            let mut cols = p.beam_ids().to_vec();
            cols.sort_unstable();
            cols.dedup();
            assert_eq!(cols.len(), 3, "duplicate beam within one probing");
        }
    }

    #[test]
    fn exhaustive_with_surplus_covers_all_beams() {
        let cfg = UlaConfig::half_wavelength(8).unwrap();
        let g = build_pair_grid((-PI, PI), PI / 16.0, &cfg).unwrap(); // 17 beams
        let s =
            random_probing_schedule(&g, &g, 3, 3, 20, 20, ScheduleMode::Exhaustive, 11).unwrap();
        assert_eq!(s.tx_probings().len(), 20);
        assert_eq!(s.rx_probings().len(), 20);
        for ids in [s.tx_beam_ids(), s.rx_beam_ids()] {
            let mut seen = vec![false; 17];
            for id in ids {
                seen[id] = true;
            }
            assert!(seen.iter().all(|&b| b), "some beam never probed");
        }
        for p in s.tx_probings().iter().chain(s.rx_probings()) {
            let mut cols = p.beam_ids().to_vec();
            cols.sort_unstable();
            let before = cols.len();
            cols.dedup();
            assert_eq!(cols.len(), before, "duplicate beam within one probing");
        }
    }

    #[test]
    fn schedules_are_deterministic_per_seed() {
        let cfg = UlaConfig::half_wavelength(8).unwrap();
        let g = build_pair_grid((-PI, PI), PI / 16.0, &cfg).unwrap();
        let a = random_probing_schedule(&g, &g, 3, 3, 30, 20, ScheduleMode::Exhaustive, 77)
            .unwrap();
        let b = random_probing_schedule(&g, &g, 3, 3, 30, 20, ScheduleMode::Exhaustive, 77)
            .unwrap();
        assert_eq!(a.tx_beam_ids(), b.tx_beam_ids());
        assert_eq!(a.rx_beam_ids(), b.rx_beam_ids());
        assert_eq!(a.tx_probings().len(), 30);
        assert_eq!(a.rx_probings().len(), 20);
    }

    #[test]
    fn insufficient_slots_for_exhaustive_is_config_error() {
        let cfg = UlaConfig::half_wavelength(8).unwrap();
        let g = build_pair_grid((-PI, PI), PI / 16.0, &cfg).unwrap(); // 17 beams
        let res = random_probing_schedule(&g, &g, 2, 2, 4, 4, ScheduleMode::Exhaustive, 0);
        assert!(matches!(res, Err(Error::Config(_))));
    }

    #[test]
    fn monopulse_difference_beam_at_zero() {
        let cfg = UlaConfig::half_wavelength(8).unwrap();
        let (sum, diff) = monopulse_beams(freq(0.0), &cfg).unwrap();
        let scale = 1.0 / 8f64.sqrt();
        for (k, z) in diff.entries().iter().enumerate() {
            let expected = if k < 4 { scale } else { -scale };
            assert!((z.re - expected).abs() < 1e-14 && z.im.abs() < 1e-14);
        }
        assert!(diff.inner(&sum).norm() < 1e-12);
        assert!((diff.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn monopulse_null_and_orthogonality_any_boresight() {
        let cfg = UlaConfig::half_wavelength(16).unwrap();
        for i in 0..32 {
            let eta = -PI + i as f64 * PI / 16.0;
            let (sum, diff) = monopulse_beams(freq(eta), &cfg).unwrap();
            let a = array::steering_vector(freq(eta), &cfg);
            assert!(diff.inner(&a).norm() < 1e-12, "no null at boresight {eta}");
            assert!(diff.inner(&sum).norm() < 1e-10);
        }
    }

    #[test]
    fn monopulse_rejects_odd_aperture() {
        let cfg = UlaConfig::half_wavelength(5).unwrap();
        assert!(matches!(
            monopulse_beams(freq(0.0), &cfg),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn monopulse_difference_pattern_matches_inner_product_oracle() {
        let cfg = UlaConfig::half_wavelength(8).unwrap();
        let (_, diff) = monopulse_beams(freq(0.0), &cfg).unwrap();
        let probe = freq(PI / 8.0);
        let pattern = beam_pattern(&diff, &[probe]);
        let a = array::steering_vector(probe, &cfg);
        let brute = diff.inner(&a).norm_sqr();
        assert!((pattern[0] - brute).abs() < 1e-14);
    }

    #[test]
    fn beam_pattern_peaks_at_own_boresight_and_stays_bounded() {
        let cfg = UlaConfig::half_wavelength(16).unwrap();
        let v = array::steering_vector(freq(0.7), &cfg);
        let grid: Vec<SpatialFrequency> =
            (0..512).map(|i| freq(-PI + i as f64 * 2.0 * PI / 511.0)).collect();
        let pattern = beam_pattern(&v, &grid);
        for &p in &pattern {
            assert!((0.0..=1.0 + 1e-12).contains(&p));
        }
        let at_boresight = beam_pattern(&v, &[freq(0.7)]);
        assert!((at_boresight[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn half_power_beamwidth_near_antenna_rule_of_thumb() {
        // For a half-wavelength ULA the 3 dB beamwidth in physical angle is
        // roughly 102°/N. Numeric width search on the N=16 broadside beam.
        let cfg = UlaConfig::half_wavelength(16).unwrap();
        let v = array::steering_vector(freq(0.0), &cfg);
        let mut left = None;
        let mut right = None;
        let steps = 200_000;
        for i in 0..=steps {
            let theta = -PI / 2.0 + PI * i as f64 / steps as f64;
            let mu = array::angle_to_spatial_freq(PhysicalAngle::new(theta).unwrap(), &cfg);
            let p = beam_pattern(&v, &[mu])[0];
            if p >= 0.5 {
                if left.is_none() {
                    left = Some(theta);
                }
                right = Some(theta);
            }
        }
        let width_deg = (right.unwrap() - left.unwrap()).to_degrees();
        let expected = 102.0 / 16.0;
        assert!(
            (width_deg - expected).abs() / expected < 0.15,
            "half-power width {width_deg}°, rule of thumb {expected}°"
        );
    }

    #[test]
    fn in_order_schedule_lists_beams_sequentially() {
        let cfg = UlaConfig::half_wavelength(8).unwrap();
        let g = build_pair_grid((-PI, PI), PI / 8.0, &cfg).unwrap(); // 9 beams
        let s = in_order_schedule(&g, &g, 1, 1).unwrap();
        assert_eq!(s.tx_beam_ids(), (0..9).collect::<Vec<_>>());
        assert_eq!(s.rx_beam_ids(), (0..9).collect::<Vec<_>>());
        // Ragged final slot wraps but keeps columns distinct.
        let s2 = in_order_schedule(&g, &g, 2, 2).unwrap();
        assert_eq!(s2.tx_probings().len(), 5);
        let last = s2.tx_probings().last().unwrap().beam_ids().to_vec();
        assert_eq!(last, vec![8, 0]);
    }

    #[test]
    fn schedule_exports_json() {
        let cfg = UlaConfig::half_wavelength(8).unwrap();
        let g = build_pair_grid((-PI, PI), PI / 8.0, &cfg).unwrap();
        let s = in_order_schedule(&g, &g, 1, 1).unwrap();
        let json = s.export_json();
        let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed["tx_slots"].as_array().unwrap().len(), 9);
        let grid_json = serde_json::to_string(&g).unwrap();
        let back: BeamPairGrid = serde_json::from_str(&grid_json).unwrap();
        assert_eq!(back.num_beams(), g.num_beams());
    }
}
