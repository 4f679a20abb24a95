//! Block Rayleigh fading and complex AWGN.
//!
//! Every user sees a single complex coefficient `h_k` that stays fixed over
//! the `T` slots of a coherence block. The per-user channel matrix is then
//! `sqrt(gamma_k) h_k I_T`, a scalar matrix.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::topology::Topology;
use crate::{Complex, Error, Result};

/// Draws one circularly-symmetric `CN(0, 1)` sample.
pub fn standard_complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Fading coefficients of all users for one coherence block.
#[derive(Debug, Clone, PartialEq)]
pub struct FadingRealization {
    coefficients: Vec<Complex>,
}

impl FadingRealization {
    pub fn new(coefficients: Vec<Complex>) -> Self {
        FadingRealization { coefficients }
    }

    /// `h_k = 1` for every user; isolates path loss.
    pub fn unit(users: usize) -> Self {
        FadingRealization::new(vec![Complex::new(1.0, 0.0); users])
    }

    pub fn coefficients(&self) -> &[Complex] {
        &self.coefficients
    }

    pub fn coefficient(&self, k: usize) -> Complex {
        self.coefficients[k]
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }
}

/// Draws `users` independent `CN(0, 1)` coefficients.
pub fn draw_fading<R: Rng + ?Sized>(rng: &mut R, users: usize) -> FadingRealization {
    FadingRealization::new((0..users).map(|_| standard_complex_normal(rng)).collect())
}

/// Receiver noise. `variance` is the total power of one complex sample, split
/// evenly between the real and imaginary parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    variance: f64,
}

impl NoiseModel {
    pub fn new(variance: f64) -> Result<Self> {
        if variance.is_finite() && variance > 0.0 {
            Ok(NoiseModel { variance })
        } else {
            Err(Error::InvalidNoiseVariance(variance))
        }
    }

    /// Noise level giving a transmit SNR of `snr_db`, i.e.
    /// `sigma^2 = P_T / 10^(snr_db / 10)`.
    pub fn from_transmit_snr_db(total_power: f64, snr_db: f64) -> Result<Self> {
        NoiseModel::new(total_power / 10f64.powf(snr_db / 10.0))
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    /// Standard deviation of the complex sample, `sqrt(sigma^2)`.
    pub fn std_dev(&self) -> f64 {
        self.variance.sqrt()
    }
}

/// The `T x T` matrix `sqrt(gamma_k) (I_T kron h_k)`.
///
/// Only the scalar is stored; [`ChannelMatrix::to_dense`] expands it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelMatrix {
    scale: Complex,
    dim: usize,
}

impl ChannelMatrix {
    pub fn new(scale: Complex, dim: usize) -> Self {
        ChannelMatrix { scale, dim }
    }

    /// The effective scalar channel `sqrt(gamma_k) h_k`.
    pub fn scale(&self) -> Complex {
        self.scale
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Matrix-vector product.
    pub fn apply(&self, x: &[Complex]) -> Result<Vec<Complex>> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: x.len(),
            });
        }
        Ok(x.iter().map(|&v| self.scale * v).collect())
    }

    /// Same as [`apply`](Self::apply) for a real vector.
    pub fn apply_real(&self, v: &[f64]) -> Result<Vec<Complex>> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: v.len(),
            });
        }
        Ok(v.iter().map(|&x| self.scale * x).collect())
    }

    /// Row-major dense form.
    pub fn to_dense(&self) -> Vec<Vec<Complex>> {
        (0..self.dim)
            .map(|i| {
                (0..self.dim)
                    .map(|j| {
                        if i == j {
                            self.scale
                        } else {
                            Complex::new(0.0, 0.0)
                        }
                    })
                    .collect()
            })
            .collect()
    }
}

/// Channel matrix of user `k` for the given fading block.
pub fn channel_matrix(
    topology: &Topology,
    fading: &FadingRealization,
    k: usize,
) -> Result<ChannelMatrix> {
    let loss = topology.path_loss(k)?;
    let h = fading.coefficients().get(k).ok_or(Error::UserOutOfRange {
        index: k,
        users: fading.len(),
    })?;
    Ok(ChannelMatrix::new(h * loss.sqrt(), topology.group_count()))
}

/// Returns `signal + z` with `z` i.i.d. `CN(0, sigma^2)`.
pub fn add_noise<R: Rng + ?Sized>(
    rng: &mut R,
    signal: &[Complex],
    noise: &NoiseModel,
) -> Vec<Complex> {
    let sd = noise.std_dev();
    signal
        .iter()
        .map(|&s| s + standard_complex_normal(rng) * sd)
        .collect()
}

/// Noise-normalised channel gain `gamma_k |h_k|^2 / sigma^2`.
pub fn effective_gain(
    topology: &Topology,
    fading: &FadingRealization,
    k: usize,
    noise: &NoiseModel,
) -> Result<f64> {
    let h = channel_matrix(topology, fading, k)?.scale();
    Ok(h.norm_sqr() / noise.variance())
}
