//! Closed-form variance predictors for the receive spatial-frequency
//! estimate, used as analytical overlays and as Monte Carlo oracles.
//!
//! The prediction has the generic monopulse shape
//! `σ² ≈ N · (1 + ζ²) / (2 k² S)` with boresight slope
//! `k = −sin δ / (1 − cos δ)`, sum-channel noise power `N = σ² |Υ_Σ|` and a
//! signal term `S = |α|² |a*(ψ) Λ a(ψ)|`.
//!
//! As written, the signal term uses the *difference* matrix
//! `Λ_Δ = a(η−δ)a*(η−δ) − a(η+δ)a*(η+δ)`, whose quadratic form vanishes at
//! `ψ = η` by beam-gain symmetry — exactly the operating point at which the
//! prediction is typically evaluated. The sum-matrix variant substitutes
//! `Λ_Σ` (the `+` version) and stays finite there; both variants are exposed
//! and divergence is reported as a flagged value rather than an error so SNR
//! sweeps can render partial curves.

use serde::{Deserialize, Serialize};

use crate::array::{self, SpatialFrequency, UlaConfig};
use crate::channel::PathParams;
use crate::codebook::AuxiliaryBeamPair;
use crate::error::{Error, Result};

/// Relative threshold below which the difference quadratic form counts as
/// singular.
const SINGULARITY_THRESHOLD: f64 = 1e-12;

/// Which quadratic form feeds the denominator of the prediction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VarianceVariant {
    /// Literal difference matrix `Λ_Δ`; singular at `ψ = η`.
    AsWritten,
    /// Sum matrix `Λ_Σ`; finite everywhere on the probing range.
    SumMatrix,
}

/// A variance prediction that may diverge at its operating point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Prediction {
    Finite(f64),
    Divergent,
}

impl Prediction {
    pub fn value(&self) -> Option<f64> {
        match self {
            Prediction::Finite(v) => Some(*v),
            Prediction::Divergent => None,
        }
    }

    /// Finite value or `+inf`, convenient for CSV output.
    pub fn value_or_inf(&self) -> f64 {
        self.value().unwrap_or(f64::INFINITY)
    }
}

/// Interfering paths entering the multi-path predictor, together with the
/// transmit beam the dominant path is aligned to.
#[derive(Debug, Clone)]
pub struct InterferenceModel {
    pub tx_cfg: UlaConfig,
    pub aligned_tx_freq: SpatialFrequency,
    pub paths: Vec<PathParams>,
}

/// Operating point of the variance prediction.
#[derive(Debug, Clone)]
pub struct VarianceInputs {
    pub rx_pair: AuxiliaryBeamPair,
    pub rx_cfg: UlaConfig,
    /// True receive spatial frequency `ψ`; must lie inside the pair's range.
    pub true_rx_freq: SpatialFrequency,
    /// Dominant-path power `|α|²`, `N_tot·M_tot` for a unit gain.
    pub alpha_sq: f64,
    pub snr_linear: f64,
    pub interference: Option<InterferenceModel>,
}

impl VarianceInputs {
    fn validate(&self) -> Result<()> {
        if !self.rx_pair.contains(self.true_rx_freq) {
            return Err(Error::Domain(format!(
                "true receive frequency {} outside the pair range ({}, {})",
                self.true_rx_freq.radians(),
                self.rx_pair.low_freq(),
                self.rx_pair.high_freq()
            )));
        }
        if !(self.alpha_sq > 0.0 && self.snr_linear > 0.0) {
            return Err(Error::Domain(
                "alpha_sq and snr_linear must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Boresight slope of the ratio metric, `k = −sin δ / (1 − cos δ)`.
///
/// Diverges as `δ → 0`; that case is flagged as an error.
pub fn slope_k(pair: &AuxiliaryBeamPair) -> Result<f64> {
    let delta = pair.offset();
    let denom = 1.0 - delta.cos();
    if denom <= 0.0 {
        return Err(Error::Divergence(format!(
            "ratio slope diverges as the pair offset {delta} approaches zero"
        )));
    }
    Ok(-delta.sin() / denom)
}

/// Generic monopulse variance shape `σ² = n_noise (1 + ratio²) / (2 k² s_signal)`.
pub fn variance_from_parts(slope: f64, s_signal: f64, n_noise: f64, ratio: f64) -> f64 {
    n_noise * (1.0 + ratio * ratio) / (2.0 * slope * slope * s_signal)
}

/// Beam-projection powers of `ψ` onto the two member beams of the pair.
fn member_gains(inp: &VarianceInputs, freq: SpatialFrequency) -> (f64, f64) {
    let low = SpatialFrequency::new(inp.rx_pair.low_freq()).expect("finite");
    let high = SpatialFrequency::new(inp.rx_pair.high_freq()).expect("finite");
    (
        array::beam_gain(freq, low, &inp.rx_cfg),
        array::beam_gain(freq, high, &inp.rx_cfg),
    )
}

/// `|Υ_Σ|`: the member beams are unit norm, so this is exactly 2.
fn upsilon_sum() -> f64 {
    2.0
}

fn quadratic_form(inp: &VarianceInputs, variant: VarianceVariant) -> f64 {
    let (g_low, g_high) = member_gains(inp, inp.true_rx_freq);
    match variant {
        VarianceVariant::AsWritten => (g_low - g_high).abs(),
        VarianceVariant::SumMatrix => g_low + g_high,
    }
}

/// Single-path variance prediction of the receive spatial-frequency estimate.
///
/// Evaluates
/// `(1 − cos δ)² |Υ_Σ| (1 + ζ²) / (2 |α|² γ sin²δ |a*(ψ) Λ a(ψ)|)`
/// with `Λ` chosen by `variant`; equivalently the composition of
/// [`slope_k`] and [`variance_from_parts`]. Returns `Divergent` when the
/// quadratic form vanishes (as-written variant at `ψ = η`).
pub fn variance_single_path(inp: &VarianceInputs, variant: VarianceVariant) -> Result<Prediction> {
    inp.validate()?;
    let quad = quadratic_form(inp, variant);
    let quad_scale = quadratic_form(inp, VarianceVariant::SumMatrix);
    if quad <= SINGULARITY_THRESHOLD * quad_scale {
        return Ok(Prediction::Divergent);
    }
    let slope = slope_k(&inp.rx_pair)?;
    let s_signal = inp.alpha_sq * quad;
    let n_noise = upsilon_sum() / inp.snr_linear;
    let zeta = crate::estimator::ratio_metric_closed_form(inp.true_rx_freq, &inp.rx_pair);
    Ok(Prediction::Finite(variance_from_parts(
        slope,
        s_signal,
        n_noise,
        zeta.value(),
    )))
}

/// Per-interferer term of the multi-path noise power:
/// `|a_t*(ν+δ) G* Λ_Σ G a_t(ν+δ)|` with `G = α' a_r(ψ') a_t*(μ')`.
///
/// `G a_t(ν+δ) = α' t a_r(ψ')` with the scalar `t = a_t*(μ') a_t(ν+δ)`, so the
/// quadratic form collapses to `|α' t|² (|a_r*(η−δ) a_r(ψ')|² + |a_r*(η+δ) a_r(ψ')|²)`.
fn interference_term(inp: &VarianceInputs, model: &InterferenceModel, path: &PathParams) -> f64 {
    let n = model.tx_cfg.num_elements() as f64;
    let m = inp.rx_cfg.num_elements() as f64;
    let alpha_sq = path.gain.norm_sqr() * n * m;
    let mu = array::angle_to_spatial_freq(path.aod, &model.tx_cfg);
    let psi = array::angle_to_spatial_freq(path.aoa, &inp.rx_cfg);
    let tx_gain = array::beam_gain(mu, model.aligned_tx_freq, &model.tx_cfg);
    let (g_low, g_high) = member_gains(inp, psi);
    alpha_sq * tx_gain * (g_low + g_high)
}

/// Multi-path variance prediction for the dominant path: the sum-channel
/// noise power grows by one quadratic-form term per interferer, and the
/// signal term uses the sum matrix so the prediction stays finite at
/// boresight. With no interferers this equals the single-path sum-matrix
/// prediction exactly.
pub fn variance_multipath(inp: &VarianceInputs) -> Result<Prediction> {
    inp.validate()?;
    let quad = quadratic_form(inp, VarianceVariant::SumMatrix);
    if quad <= SINGULARITY_THRESHOLD {
        return Ok(Prediction::Divergent);
    }
    let slope = slope_k(&inp.rx_pair)?;
    let s_signal = inp.alpha_sq * quad;
    let mut n_noise = upsilon_sum() / inp.snr_linear;
    if let Some(model) = &inp.interference {
        for path in &model.paths {
            n_noise += interference_term(inp, model, path);
        }
    }
    let zeta = crate::estimator::ratio_metric_closed_form(inp.true_rx_freq, &inp.rx_pair);
    Ok(Prediction::Finite(variance_from_parts(
        slope,
        s_signal,
        n_noise,
        zeta.value(),
    )))
}
