//! Sparse ray-cluster narrowband MIMO channel: construction from path
//! parameters, Rician composition and noisy probing measurements.
//!
//! The channel of an `M×N` link with `L` paths is
//! `H = √(N·M) Σ_ℓ g_ℓ a_r(φ_ℓ) a_t*(θ_ℓ)`, and a probe through analog
//! precoder `F` and combiner `W` observes `W* H F + W* n` with complex
//! Gaussian array noise of per-entry variance `σ² = 1/γ`.
//!
//! Randomness is counter-based: every consumer derives its stream from
//! `(master seed, trial index, slot index)` via [`derive_seed`], so trials
//! are reproducible and order-independent.

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::array::{self, PhysicalAngle, UlaConfig};
use crate::error::{Error, Result};

/// One propagation path: complex gain, departure angle and arrival angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathParams {
    pub gain: Complex64,
    pub aod: PhysicalAngle,
    pub aoa: PhysicalAngle,
}

/// A realized channel matrix together with the paths that produced it.
#[derive(Debug, Clone)]
pub struct ChannelInstance {
    matrix: Array2<Complex64>,
    paths: Vec<PathParams>,
    tx_cfg: UlaConfig,
    rx_cfg: UlaConfig,
}

impl ChannelInstance {
    pub fn matrix(&self) -> &Array2<Complex64> {
        &self.matrix
    }

    pub fn paths(&self) -> &[PathParams] {
        &self.paths
    }

    pub fn tx_cfg(&self) -> &UlaConfig {
        &self.tx_cfg
    }

    pub fn rx_cfg(&self) -> &UlaConfig {
        &self.rx_cfg
    }

    /// Channel-level gain `α_ℓ = √(N_tot M_tot) g_ℓ` of path `ℓ`.
    pub fn alpha(&self, path_index: usize) -> Complex64 {
        let scale =
            ((self.tx_cfg.num_elements() * self.rx_cfg.num_elements()) as f64).sqrt();
        self.paths[path_index].gain * scale
    }

    /// Strongest path by gain magnitude (ties to the lowest index).
    pub fn dominant_path(&self) -> usize {
        let mut best = 0;
        for (i, p) in self.paths.iter().enumerate().skip(1) {
            if p.gain.norm_sqr() > self.paths[best].gain.norm_sqr() {
                best = i;
            }
        }
        best
    }

    /// Serializes the generating paths and array setup to JSON for replay.
    pub fn export_json(&self) -> String {
        #[derive(Serialize)]
        struct Export<'a> {
            tx_cfg: &'a UlaConfig,
            rx_cfg: &'a UlaConfig,
            paths: &'a [PathParams],
        }
        serde_json::to_string(&Export {
            tx_cfg: &self.tx_cfg,
            rx_cfg: &self.rx_cfg,
            paths: &self.paths,
        })
        .expect("channel export is always serializable")
    }
}

/// Rician composition parameters: K-factor in dB and the NLOS path count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RicianConfig {
    pub k_factor_db: f64,
    pub num_nlos: usize,
}

impl RicianConfig {
    pub fn new(k_factor_db: f64, num_nlos: usize) -> Result<Self> {
        if num_nlos < 1 {
            return Err(Error::Config("Rician model needs at least 1 NLOS path".into()));
        }
        Ok(Self {
            k_factor_db,
            num_nlos,
        })
    }

    pub fn k_linear(&self) -> f64 {
        10f64.powf(self.k_factor_db / 10.0)
    }
}

/// Additive-noise description: target SNR `γ` and per-entry variance `σ² = 1/γ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    snr_linear: f64,
    variance: f64,
}

impl NoiseModel {
    pub fn from_snr_linear(snr_linear: f64) -> Result<Self> {
        if !(snr_linear > 0.0) || !snr_linear.is_finite() {
            return Err(Error::Config(format!(
                "SNR must be positive and finite, got {snr_linear}"
            )));
        }
        Ok(Self {
            snr_linear,
            variance: 1.0 / snr_linear,
        })
    }

    pub fn from_snr_db(snr_db: f64) -> Result<Self> {
        Self::from_snr_linear(10f64.powf(snr_db / 10.0))
    }

    /// Zero noise power. `snr_linear` reports infinity in this case.
    pub fn noiseless() -> Self {
        Self {
            snr_linear: f64::INFINITY,
            variance: 0.0,
        }
    }

    pub fn snr_linear(&self) -> f64 {
        self.snr_linear
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn is_noiseless(&self) -> bool {
        self.variance == 0.0
    }
}

/// How path gain magnitudes are drawn; phases are always uniform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GainLaw {
    /// Unit magnitude. Default for MSE experiments.
    Unit,
    /// Circularly symmetric complex normal, unit average power per path.
    ComplexNormal,
    /// Magnitude `1/√L` so the paths sum to unit total power.
    EqualPower,
}

/// Closed interval of physical angles used when drawing paths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleRange {
    lo: f64,
    hi: f64,
}

impl AngleRange {
    pub fn new(lo: PhysicalAngle, hi: PhysicalAngle) -> Result<Self> {
        if !(hi.radians() > lo.radians()) {
            return Err(Error::Config(format!(
                "angle range is empty: [{}, {}]",
                lo.radians(),
                hi.radians()
            )));
        }
        Ok(Self {
            lo: lo.radians(),
            hi: hi.radians(),
        })
    }

    pub fn full() -> Self {
        Self {
            lo: -std::f64::consts::FRAC_PI_2,
            hi: std::f64::consts::FRAC_PI_2,
        }
    }

    pub fn from_degrees(lo_deg: f64, hi_deg: f64) -> Result<Self> {
        Self::new(
            PhysicalAngle::new(lo_deg.to_radians())?,
            PhysicalAngle::new(hi_deg.to_radians())?,
        )
    }

    pub fn sample(&self, rng: &mut impl Rng) -> PhysicalAngle {
        PhysicalAngle::new(rng.gen_range(self.lo..self.hi)).expect("range stays in domain")
    }
}

/// Splits a master seed into an independent stream for `(stream, slot)`.
///
/// SplitMix64-style mixing; the same triple always yields the same stream and
/// distinct triples decorrelate, which keeps parallel trials reproducible
/// regardless of execution order.
pub fn derive_seed(master: u64, stream: u64, slot: u64) -> u64 {
    let mut z = master
        .wrapping_add(0x9e37_79b9_7f4a_7c15u64.wrapping_mul(stream.wrapping_add(1)))
        .wrapping_add(0x6a09_e667_f3bc_c909u64.wrapping_mul(slot.wrapping_add(1)));
    for _ in 0..2 {
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^= z >> 31;
    }
    z
}

fn complex_normal(rng: &mut impl Rng, std_per_component: f64) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * std_per_component, im * std_per_component)
}

/// Assembles `H = √(N M) Σ_ℓ g_ℓ a_r(φ_ℓ) a_t*(θ_ℓ)` from an explicit path list.
pub fn build_channel(
    paths: Vec<PathParams>,
    tx_cfg: &UlaConfig,
    rx_cfg: &UlaConfig,
) -> Result<ChannelInstance> {
    if paths.is_empty() {
        return Err(Error::Config("channel needs at least one path".into()));
    }
    let n = tx_cfg.num_elements();
    let m = rx_cfg.num_elements();
    let scale = ((n * m) as f64).sqrt();
    let mut matrix = Array2::<Complex64>::zeros((m, n));
    for p in &paths {
        let at = array::steering_vector(array::angle_to_spatial_freq(p.aod, tx_cfg), tx_cfg);
        let ar = array::steering_vector(array::angle_to_spatial_freq(p.aoa, rx_cfg), rx_cfg);
        let weight = p.gain * scale;
        for (i, ri) in ar.entries().iter().enumerate() {
            for (j, tj) in at.entries().iter().enumerate() {
                matrix[(i, j)] += weight * ri * tj.conj();
            }
        }
    }
    Ok(ChannelInstance {
        matrix,
        paths,
        tx_cfg: *tx_cfg,
        rx_cfg: *rx_cfg,
    })
}

/// Draws `num_paths` paths with independent uniform AoD/AoA inside
/// `angle_range` and gains per `gain_law`. Deterministic for a fixed seed.
pub fn sample_paths(
    rng_seed: u64,
    num_paths: usize,
    angle_range: AngleRange,
    gain_law: GainLaw,
) -> Result<Vec<PathParams>> {
    if num_paths < 1 {
        return Err(Error::Config("need at least one path".into()));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(rng_seed);
    let mut paths = Vec::with_capacity(num_paths);
    for _ in 0..num_paths {
        let aod = angle_range.sample(&mut rng);
        let aoa = angle_range.sample(&mut rng);
        let gain = match gain_law {
            GainLaw::Unit => Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU)),
            GainLaw::ComplexNormal => complex_normal(&mut rng, (0.5f64).sqrt()),
            GainLaw::EqualPower => Complex64::from_polar(
                1.0 / (num_paths as f64).sqrt(),
                rng.gen_range(0.0..std::f64::consts::TAU),
            ),
        };
        paths.push(PathParams { gain, aod, aoa });
    }
    Ok(paths)
}

/// Weighted LOS/NLOS composition
/// `H = √(K/(1+K)) H_LOS + √(1/(1+K)) H_NLOS`.
///
/// The stored path list carries the weights folded into the gains, so the
/// dominant-path ground truth and the matrix stay consistent.
pub fn build_rician(
    los: PathParams,
    nlos: &[PathParams],
    cfg: &RicianConfig,
    tx_cfg: &UlaConfig,
    rx_cfg: &UlaConfig,
) -> Result<ChannelInstance> {
    if nlos.len() != cfg.num_nlos {
        return Err(Error::Contract(format!(
            "expected {} NLOS paths, got {}",
            cfg.num_nlos,
            nlos.len()
        )));
    }
    let k = cfg.k_linear();
    let w_los = (k / (1.0 + k)).sqrt();
    let w_nlos = (1.0 / (1.0 + k)).sqrt();
    let mut paths = Vec::with_capacity(1 + nlos.len());
    paths.push(PathParams {
        gain: los.gain * w_los,
        ..los
    });
    for p in nlos {
        paths.push(PathParams {
            gain: p.gain * w_nlos,
            ..*p
        });
    }
    build_channel(paths, tx_cfg, rx_cfg)
}

/// Observes `W* H F + W* n` with training symbols fixed to the identity.
///
/// A fresh `M_tot`-dimensional noise vector of per-entry variance `σ²` is
/// drawn for every precoder column (one TDM transmit slot each); all combiner
/// columns of that slot see the same array noise. Output is `L×K` for a
/// combiner with `L` columns and precoder with `K` columns.
pub fn measure(
    channel: &ChannelInstance,
    precoder: &Array2<Complex64>,
    combiner: &Array2<Complex64>,
    noise: &NoiseModel,
    rng_seed: u64,
) -> Result<Array2<Complex64>> {
    let n = channel.tx_cfg.num_elements();
    let m = channel.rx_cfg.num_elements();
    if precoder.nrows() != n {
        return Err(Error::Contract(format!(
            "precoder has {} rows, channel expects {}",
            precoder.nrows(),
            n
        )));
    }
    if combiner.nrows() != m {
        return Err(Error::Contract(format!(
            "combiner has {} rows, channel expects {}",
            combiner.nrows(),
            m
        )));
    }
    let k = precoder.ncols();
    let l = combiner.ncols();
    // W^H precomputed once; W^H H collapses each slot to an L-vector product.
    let w_h = combiner.t().mapv(|z| z.conj());
    let wh_h = w_h.dot(&channel.matrix);
    let mut out = Array2::<Complex64>::zeros((l, k));
    let mut rng = ChaCha12Rng::seed_from_u64(rng_seed);
    let std = (noise.variance() / 2.0).sqrt();
    for col in 0..k {
        let f_col = precoder.column(col);
        let signal = wh_h.dot(&f_col);
        if noise.is_noiseless() {
            out.column_mut(col).assign(&signal);
        } else {
            let noise_vec =
                Array1::from_iter((0..m).map(|_| complex_normal(&mut rng, std)));
            let projected = w_h.dot(&noise_vec);
            out.column_mut(col).assign(&(&signal + &projected));
        }
    }
    Ok(out)
}
