//! Uniform linear array geometry: steering vectors, spatial-frequency /
//! physical-angle conversions and beam-gain evaluation.
//!
//! A plane wave hitting an `N`-element ULA with spacing `d/λ` at physical
//! angle `θ` produces a per-element phase progression of
//! `μ = 2π (d/λ) sin θ`, the *spatial frequency*. All beam arithmetic in this
//! crate happens in the spatial-frequency domain; conversion back to physical
//! angles is a single `arcsin`.
//!
//! # Example
//!
//! ```
//! use abp_core::array::{self, PhysicalAngle, UlaConfig};
//!
//! let cfg = UlaConfig::half_wavelength(8).unwrap();
//! let theta = PhysicalAngle::new(std::f64::consts::FRAC_PI_6).unwrap();
//! let mu = array::angle_to_spatial_freq(theta, &cfg);
//! assert!((mu.radians() - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
//!
//! let a = array::steering_vector(mu, &cfg);
//! assert!((a.norm() - 1.0).abs() < 1e-12);
//! ```

use ndarray::Array1;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Threshold below which the Dirichlet closed form switches to its limit value.
const GAIN_LIMIT_THRESHOLD: f64 = 1e-9;

/// Uniform linear array: element count and inter-element spacing in wavelengths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UlaConfig {
    num_elements: usize,
    spacing_wavelengths: f64,
}

impl UlaConfig {
    /// Builds a ULA description. Requires `num_elements >= 2` and
    /// `0 < spacing_wavelengths <= 1`.
    pub fn new(num_elements: usize, spacing_wavelengths: f64) -> Result<Self> {
        if num_elements < 2 {
            return Err(Error::Config(format!(
                "ULA needs at least 2 elements, got {num_elements}"
            )));
        }
        if !(spacing_wavelengths > 0.0 && spacing_wavelengths <= 1.0) {
            return Err(Error::Config(format!(
                "element spacing must be in (0, 1] wavelengths, got {spacing_wavelengths}"
            )));
        }
        Ok(Self {
            num_elements,
            spacing_wavelengths,
        })
    }

    /// Half-wavelength spaced array, the usual deployment.
    pub fn half_wavelength(num_elements: usize) -> Result<Self> {
        Self::new(num_elements, 0.5)
    }

    pub fn num_elements(&self) -> usize {
        self.num_elements
    }

    pub fn spacing_wavelengths(&self) -> f64 {
        self.spacing_wavelengths
    }

    /// Largest reachable spatial frequency, `2π d/λ` (i.e. `sin θ = 1`).
    pub fn max_spatial_freq(&self) -> f64 {
        2.0 * PI * self.spacing_wavelengths
    }
}

/// Per-element phase progression in radians.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct SpatialFrequency(f64);

impl SpatialFrequency {
    /// Wraps a finite value in radians.
    pub fn new(radians: f64) -> Result<Self> {
        if !radians.is_finite() {
            return Err(Error::Domain(format!(
                "spatial frequency must be finite, got {radians}"
            )));
        }
        Ok(Self(radians))
    }

    pub fn radians(&self) -> f64 {
        self.0
    }
}

/// Physical departure/arrival angle in radians, restricted to `[-π/2, π/2]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct PhysicalAngle(f64);

impl PhysicalAngle {
    pub fn new(radians: f64) -> Result<Self> {
        if !radians.is_finite() || radians.abs() > PI / 2.0 {
            return Err(Error::Domain(format!(
                "physical angle must lie in [-pi/2, pi/2], got {radians}"
            )));
        }
        Ok(Self(radians))
    }

    pub fn radians(&self) -> f64 {
        self.0
    }

    pub fn degrees(&self) -> f64 {
        self.0.to_degrees()
    }
}

/// Unit-norm array response vector `a(μ) = (1/√N)[1, e^{jμ}, …, e^{j(N−1)μ}]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SteeringVector {
    entries: Array1<Complex64>,
}

impl SteeringVector {
    pub(crate) fn from_freq_raw(freq_rad: f64, num_elements: usize) -> Self {
        let scale = 1.0 / (num_elements as f64).sqrt();
        let entries = Array1::from_iter(
            (0..num_elements).map(|k| Complex64::from_polar(scale, k as f64 * freq_rad)),
        );
        Self { entries }
    }

    pub(crate) fn from_entries(entries: Array1<Complex64>) -> Self {
        Self { entries }
    }

    pub fn entries(&self) -> &Array1<Complex64> {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Conjugated inner product `self* · other`.
    pub fn inner(&self, other: &SteeringVector) -> Complex64 {
        self.entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

/// `μ = 2π (d/λ) sin θ`.
pub fn angle_to_spatial_freq(angle: PhysicalAngle, cfg: &UlaConfig) -> SpatialFrequency {
    SpatialFrequency(cfg.max_spatial_freq() * angle.radians().sin())
}

/// `θ = arcsin(μ / (2π d/λ))`, principal branch.
///
/// Fails if the normalized frequency falls outside `[-1, 1]`.
pub fn spatial_freq_to_angle(freq: SpatialFrequency, cfg: &UlaConfig) -> Result<PhysicalAngle> {
    let normalized = freq.radians() / cfg.max_spatial_freq();
    if normalized.abs() > 1.0 {
        return Err(Error::Domain(format!(
            "spatial frequency {} exceeds the reachable range ±{}",
            freq.radians(),
            cfg.max_spatial_freq()
        )));
    }
    PhysicalAngle::new(normalized.asin())
}

/// Builds the unit-norm array response vector for the given spatial frequency.
pub fn steering_vector(freq: SpatialFrequency, cfg: &UlaConfig) -> SteeringVector {
    SteeringVector::from_freq_raw(freq.radians(), cfg.num_elements())
}

/// Squared coherence `|a*(μ_a) a(μ_b)|²` between two beams of the same array.
///
/// Evaluates the Dirichlet-kernel closed form
/// `sin²(NΔ/2) / (N² sin²(Δ/2))` with `Δ = μ_a − μ_b`, returning the limit
/// value 1 when `Δ ≡ 0 (mod 2π)`.
pub fn beam_gain(freq_a: SpatialFrequency, freq_b: SpatialFrequency, cfg: &UlaConfig) -> f64 {
    dirichlet_gain(freq_a.radians() - freq_b.radians(), cfg.num_elements())
}

/// Dirichlet kernel power evaluated on a raw frequency difference.
pub(crate) fn dirichlet_gain(delta: f64, num_elements: usize) -> f64 {
    let n = num_elements as f64;
    // Reduce mod 2π so the limit branch also catches Δ near ±2π, ±4π, …
    let d = delta - (delta / (2.0 * PI)).round() * 2.0 * PI;
    if d.abs() < GAIN_LIMIT_THRESHOLD {
        return 1.0;
    }
    let num = (n * d / 2.0).sin();
    let den = n * (d / 2.0).sin();
    (num / den).powi(2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn cfg(n: usize) -> UlaConfig {
        UlaConfig::half_wavelength(n).unwrap()
    }

    /// Brute-force oracle: explicit inner product between the two steering
    /// vectors, independent of the closed form.
    fn gain_by_inner_product(mu: f64, nu: f64, c: &UlaConfig) -> f64 {
        let a = steering_vector(SpatialFrequency::new(mu).unwrap(), c);
        let b = steering_vector(SpatialFrequency::new(nu).unwrap(), c);
        a.inner(&b).norm_sqr()
    }

    #[test]
    fn angle_to_freq_known_values() {
        let c = cfg(8);
        let f = |deg: f64| {
            angle_to_spatial_freq(PhysicalAngle::new(deg.to_radians()).unwrap(), &c).radians()
        };
        assert_eq!(f(0.0), 0.0);
        assert!((f(90.0) - PI).abs() < 1e-12);
        assert!((f(30.0) - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn freq_to_angle_known_values() {
        let c = cfg(8);
        let g = |mu: f64| {
            spatial_freq_to_angle(SpatialFrequency::new(mu).unwrap(), &c)
                .unwrap()
                .radians()
        };
        assert_eq!(g(0.0), 0.0);
        assert!((g(PI) - PI / 2.0).abs() < 1e-12);
        assert!((g(PI / 2.0) - PI / 6.0).abs() < 1e-12);
    }

    #[test]
    fn freq_to_angle_rejects_unreachable() {
        let c = cfg(8);
        let res = spatial_freq_to_angle(SpatialFrequency::new(PI + 0.1).unwrap(), &c);
        assert!(matches!(res, Err(Error::Domain(_))));
    }

    #[test]
    fn angle_constructor_rejects_out_of_range() {
        assert!(PhysicalAngle::new(PI / 2.0 + 1e-6).is_err());
        assert!(PhysicalAngle::new(f64::NAN).is_err());
    }

    #[test]
    fn round_trip_dense_grid() {
        let c = cfg(16);
        for i in 0..=1000 {
            let theta = -PI / 2.0 + PI * i as f64 / 1000.0;
            let angle = PhysicalAngle::new(theta).unwrap();
            let back = spatial_freq_to_angle(angle_to_spatial_freq(angle, &c), &c).unwrap();
            assert!(
                (back.radians() - theta).abs() < 1e-12,
                "round trip failed at {theta}"
            );
        }
    }

    #[test]
    fn steering_vector_zero_phase() {
        let v = steering_vector(SpatialFrequency::new(0.0).unwrap(), &cfg(4));
        for z in v.entries() {
            assert!((z - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn steering_vector_unit_norm_and_self_coherence() {
        let c = cfg(8);
        let v = steering_vector(SpatialFrequency::new(PI / 8.0).unwrap(), &c);
        assert!((v.norm() - 1.0).abs() < 1e-12);
        assert!((v.inner(&v).norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn beam_gain_coherent_alignment() {
        let c = cfg(8);
        let mu = SpatialFrequency::new(0.37).unwrap();
        assert_eq!(beam_gain(mu, mu, &c), 1.0);
    }

    #[test]
    fn beam_gain_orthogonal_dft_beams() {
        let c = cfg(8);
        let a = SpatialFrequency::new(0.0).unwrap();
        let b = SpatialFrequency::new(2.0 * PI / 8.0).unwrap();
        assert!(beam_gain(a, b, &c) < 1e-28);
    }

    #[test]
    fn beam_gain_matches_inner_product_oracle() {
        let c = cfg(8);
        let a = SpatialFrequency::new(PI / 16.0).unwrap();
        let b = SpatialFrequency::new(0.0).unwrap();
        let closed = beam_gain(a, b, &c);
        let brute = gain_by_inner_product(PI / 16.0, 0.0, &c);
        assert!((closed - brute).abs() < 1e-12);
    }

    #[test]
    fn beam_gain_limit_branch_near_full_period() {
        let c = cfg(8);
        let a = SpatialFrequency::new(2.0 * PI - 1e-12).unwrap();
        let b = SpatialFrequency::new(0.0).unwrap();
        assert_eq!(beam_gain(a, b, &c), 1.0);
    }

    #[test]
    fn beam_gain_property_random_tuples() {
        let mut rng = ChaCha12Rng::seed_from_u64(0x0a1b2c3d);
        for _ in 0..10_000 {
            let n = rng.gen_range(2..=64);
            let c = cfg(n);
            let mu = rng.gen_range(-PI..PI);
            let nu = rng.gen_range(-PI..PI);
            let fa = SpatialFrequency::new(mu).unwrap();
            let fb = SpatialFrequency::new(nu).unwrap();
            let g = beam_gain(fa, fb, &c);
            assert!((0.0..=1.0 + 1e-12).contains(&g));
            assert!((g - beam_gain(fb, fa, &c)).abs() < 1e-14, "not symmetric");
            let brute = gain_by_inner_product(mu, nu, &c);
            assert!(
                (g - brute).abs() < 1e-10,
                "closed form {g} vs brute force {brute} at N={n}, mu={mu}, nu={nu}"
            );
        }
    }
}
