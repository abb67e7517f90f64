//! Declarative experiment descriptors. Every experiment has a default
//! configuration mirroring the reference evaluation setup; descriptors load
//! from JSON or TOML files with partial overrides.

use abp_core::estimator::RowAssignment;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::Path;

use crate::SimError;

/// Rule producing the pair offset δ for an array of `n` elements.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeltaRule {
    /// Seamless-coverage default, `δ = (π/2)/N`.
    SpecRule,
    /// `δ = π/N`, which makes the measured power ratio equal the closed form
    /// exactly (the Dirichlet numerators of the two member beams coincide).
    ExactCancellation,
    /// A fixed offset in radians, independent of the array size.
    Fixed { radians: f64 },
}

impl DeltaRule {
    pub fn delta_for(&self, num_elements: usize) -> f64 {
        match self {
            DeltaRule::SpecRule => (PI / 2.0) / num_elements as f64,
            DeltaRule::ExactCancellation => PI / num_elements as f64,
            DeltaRule::Fixed { radians } => *radians,
        }
    }
}

/// AoD feedback quantization applied between the receiver and transmitter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "scheme")]
pub enum FeedbackConfig {
    /// Full-precision feedback.
    None,
    /// Quantize the ratio metric with a trained codebook.
    Ratio { bits: u32 },
    /// Quantize the estimated transmit spatial frequency uniformly.
    Frequency { bits: u32 },
}

impl Default for FeedbackConfig {
    fn default() -> Self {
        FeedbackConfig::None
    }
}

fn d_true() -> bool {
    true
}

/// Single-path AoD/AoA MSE and analog-beamforming spectral efficiency.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SinglePathMseConfig {
    pub tx_antennas: Vec<usize>,
    pub rx_antennas: usize,
    pub snr_db: Vec<f64>,
    pub noiseless: bool,
    pub trials: u64,
    pub delta_rule: DeltaRule,
    pub feedback: FeedbackConfig,
    pub feedback_training_samples: usize,
    pub seed: u64,
}

impl Default for SinglePathMseConfig {
    fn default() -> Self {
        Self {
            tx_antennas: vec![8, 16, 32],
            rx_antennas: 8,
            snr_db: vec![-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0],
            noiseless: false,
            trials: 10_000,
            delta_rule: DeltaRule::SpecRule,
            feedback: FeedbackConfig::None,
            feedback_training_samples: 300_000,
            seed: 1,
        }
    }
}

/// Analytical-vs-numerical variance validation at the boresight operating
/// point, single path and with equal-gain interferers.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct VarianceConfig {
    pub snr_db: Vec<f64>,
    pub num_paths: Vec<usize>,
    pub trials: u64,
    pub tx_antennas: usize,
    pub rx_antennas: usize,
    pub delta_r: f64,
    pub interferer_range_deg: (f64, f64),
    pub seed: u64,
}

impl Default for VarianceConfig {
    fn default() -> Self {
        Self {
            snr_db: vec![0.0, 5.0, 10.0, 15.0, 20.0],
            num_paths: vec![1, 8],
            trials: 10_000,
            tx_antennas: 8,
            rx_antennas: 4,
            delta_r: PI / 8.0,
            interferer_range_deg: (-45.0, 45.0),
            seed: 2,
        }
    }
}

/// Feedback quantization study: codeword-domain MSE of the two quantization
/// strategies plus end-to-end angle MSE per bit budget.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct QuantizationConfig {
    pub bits: Vec<u32>,
    pub sample_count: usize,
    pub trials: u64,
    pub snr_db: f64,
    pub tx_antennas: usize,
    pub rx_antennas: usize,
    pub seed: u64,
}

impl Default for QuantizationConfig {
    fn default() -> Self {
        Self {
            bits: vec![1, 2, 3, 4, 5, 6],
            sample_count: 300_000,
            trials: 10_000,
            snr_db: -10.0,
            tx_antennas: 16,
            rx_antennas: 8,
            seed: 3,
        }
    }
}

/// Transmit array-response matrix MSE under multi-path estimation, against
/// the grid-of-beams baseline, per probing budget.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct MultipathMseConfig {
    pub snr_db: Vec<f64>,
    /// `(N_T, M_T)` probing budgets.
    pub budgets: Vec<(usize, usize)>,
    pub trials: u64,
    pub tx_antennas: usize,
    pub rx_antennas: usize,
    pub n_rf: usize,
    pub m_rf: usize,
    pub num_paths: usize,
    pub row_mode: RowAssignment,
    pub delta_rule: DeltaRule,
    /// Minimum pairwise path separation in pair offsets (δ units) on both
    /// sides, enforced by rejection sampling; 0 disables. Keeps the drawn
    /// channels within the sparse, resolvable regime the estimator assumes.
    pub min_separation_factor: f64,
    pub seed: u64,
}

impl Default for MultipathMseConfig {
    fn default() -> Self {
        Self {
            snr_db: vec![0.0, 5.0, 10.0, 15.0, 20.0],
            budgets: vec![(12, 8), (14, 14), (20, 20)],
            trials: 500,
            tx_antennas: 8,
            rx_antennas: 8,
            n_rf: 3,
            m_rf: 3,
            num_paths: 3,
            row_mode: RowAssignment::Greedy,
            delta_rule: DeltaRule::SpecRule,
            min_separation_factor: 4.0,
            seed: 4,
        }
    }
}

/// Mean absolute angle estimation error across array sizes, plus the
/// overhead/accuracy trade-off table.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct MaeeConfig {
    pub tx_antennas: Vec<usize>,
    pub rx_antennas: usize,
    pub snr_db: Vec<f64>,
    pub trials: u64,
    /// Trial count for arrays of 64+ elements, where sweeps get expensive.
    pub large_array_trials: u64,
    pub tradeoff_delta_deg: Vec<f64>,
    pub tradeoff_snr_db: f64,
    pub seed: u64,
}

impl Default for MaeeConfig {
    fn default() -> Self {
        Self {
            tx_antennas: vec![4, 8, 16, 32, 64, 128],
            rx_antennas: 8,
            snr_db: vec![-30.0, -10.0],
            trials: 10_000,
            large_array_trials: 1_000,
            tradeoff_delta_deg: vec![45.0, 22.5, 11.25, 5.625],
            tradeoff_snr_db: -10.0,
            seed: 5,
        }
    }
}

/// Hierarchical control-channel beamforming: layered pair refinement versus
/// exhaustive per-layer beam search.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ControlChannelConfig {
    /// Beams per layer in the grid-of-beams hierarchy; the pair-based
    /// hierarchy uses one pair (two beams) per layer over the same widths.
    pub layer_splits: Vec<usize>,
    pub tx_antennas: usize,
    pub rx_antennas: usize,
    #[serde(default = "d_true")]
    pub noiseless: bool,
    pub snr_db: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
}

impl Default for ControlChannelConfig {
    fn default() -> Self {
        Self {
            layer_splits: vec![2, 4, 4],
            tx_antennas: 128,
            rx_antennas: 2,
            noiseless: true,
            snr_db: vec![0.0],
            trials: 10_000,
            seed: 6,
        }
    }
}

/// Dominant-path estimation quality under Rician channels of varying
/// K-factor, plus effective-gain comparison against perfect steering.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct RicianStudyConfig {
    pub k_factors_db: Vec<f64>,
    pub num_nlos: usize,
    pub snr_db: f64,
    pub tx_antennas: usize,
    pub rx_antennas: usize,
    pub trials: u64,
    pub seed: u64,
}

impl Default for RicianStudyConfig {
    fn default() -> Self {
        Self {
            k_factors_db: vec![2.0, 8.0, 13.2],
            num_nlos: 5,
            snr_db: 10.0,
            tx_antennas: 16,
            rx_antennas: 8,
            trials: 10_000,
            seed: 7,
        }
    }
}

/// Loads a config struct from a JSON (`.json`) or TOML (anything else) file.
pub fn load_config<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, SimError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| SimError::Config(format!("cannot read {}: {e}", path.display())))?;
    let is_json = path
        .extension()
        .is_some_and(|ext| ext.eq_ignore_ascii_case("json"));
    if is_json {
        serde_json::from_str(&text)
            .map_err(|e| SimError::Config(format!("bad JSON in {}: {e}", path.display())))
    } else {
        toml::from_str(&text)
            .map_err(|e| SimError::Config(format!("bad TOML in {}: {e}", path.display())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_rules() {
        assert!((DeltaRule::SpecRule.delta_for(8) - PI / 16.0).abs() < 1e-15);
        assert!((DeltaRule::ExactCancellation.delta_for(8) - PI / 8.0).abs() < 1e-15);
        assert_eq!(DeltaRule::Fixed { radians: 0.2 }.delta_for(8), 0.2);
    }

    #[test]
    fn partial_toml_overrides_defaults() {
        let cfg: SinglePathMseConfig = toml::from_str("trials = 5\nnoiseless = true").unwrap();
        assert_eq!(cfg.trials, 5);
        assert!(cfg.noiseless);
        assert_eq!(cfg.tx_antennas, vec![8, 16, 32]);
    }

    #[test]
    fn partial_json_overrides_defaults() {
        let cfg: VarianceConfig =
            serde_json::from_str(r#"{"snr_db": [0.0], "trials": 9}"#).unwrap();
        assert_eq!(cfg.trials, 9);
        assert_eq!(cfg.snr_db, vec![0.0]);
        assert_eq!(cfg.rx_antennas, 4);
    }

    #[test]
    fn feedback_config_tagged_form() {
        let fb: FeedbackConfig =
            serde_json::from_str(r#"{"scheme": "ratio", "bits": 4}"#).unwrap();
        assert_eq!(fb, FeedbackConfig::Ratio { bits: 4 });
    }
}
