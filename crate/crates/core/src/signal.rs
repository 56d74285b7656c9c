//! Sparse channel draws, excitation/noise sequences and the FIR system model.
//!
//! The desired signal is `d(k) = Σ_{i<M} w[i]·x(k−i) + v(k)` with samples before
//! `k = 0` taken as zero. [`build_convolution_matrix`] gives the same model in
//! batch form, `d = A·w + v`, and is what the tests use to check
//! [`synthesize_desired`].

use nalgebra::DMatrix;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Generator for trial `trial` of an experiment seeded with `master_seed`.
///
/// The master seed keys a ChaCha8 generator and the trial index selects its
/// stream, so every trial owns an independent substream and results do not
/// depend on the order trials are executed in.
pub fn trial_rng(master_seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial);
    rng
}

/// True FIR channel `w` with its nonzero support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelModel {
    taps: Vec<f64>,
    support: Vec<usize>,
}

impl ChannelModel {
    /// Builds a channel from explicit taps; the support is every nonzero index.
    pub fn from_taps(taps: Vec<f64>) -> Result<Self> {
        if taps.is_empty() {
            return Err(Error::Shape("channel must have at least one tap".into()));
        }
        if let Some(bad) = taps.iter().find(|t| !t.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "taps",
                value: *bad,
                reason: "channel taps must be finite",
            });
        }
        let support = taps
            .iter()
            .enumerate()
            .filter(|(_, t)| **t != 0.0)
            .map(|(i, _)| i)
            .collect();
        Ok(Self { taps, support })
    }

    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    /// Sorted indices of the nonzero taps.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn sparsity_m(&self) -> usize {
        self.support.len()
    }

    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taps.is_empty()
    }

    /// `Σ taps²`.
    pub fn energy(&self) -> f64 {
        self.taps.iter().map(|t| t * t).sum()
    }

    /// `wᵀx` for a regressor ordered newest-first.
    pub fn output(&self, regressor: &[f64]) -> f64 {
        self.taps.iter().zip(regressor).map(|(w, x)| w * x).sum()
    }
}

/// Draws a unit-energy channel with exactly `m` nonzero taps.
pub fn generate_sparse_channel<R: Rng + ?Sized>(
    length: usize,
    m: usize,
    rng: &mut R,
) -> Result<ChannelModel> {
    generate_sparse_channel_with(length, m, true, rng)
}

/// Draws a channel with `m` support positions chosen uniformly without
/// replacement and standard Gaussian values on the support, optionally scaled
/// to unit energy.
pub fn generate_sparse_channel_with<R: Rng + ?Sized>(
    length: usize,
    m: usize,
    unit_energy: bool,
    rng: &mut R,
) -> Result<ChannelModel> {
    if m < 1 || m > length {
        return Err(Error::InvalidSparsity { m, length });
    }
    let mut support = index::sample(rng, length, m).into_vec();
    support.sort_unstable();

    let mut taps = vec![0.0; length];
    for &i in &support {
        // an exact 0.0 draw would silently shrink the support
        let mut value: f64 = rng.sample(StandardNormal);
        while value == 0.0 {
            value = rng.sample(StandardNormal);
        }
        taps[i] = value;
    }
    if unit_energy {
        let norm = taps.iter().map(|t| t * t).sum::<f64>().sqrt();
        for t in &mut taps {
            *t /= norm;
        }
    }
    Ok(ChannelModel { taps, support })
}

/// `n` i.i.d. zero-mean unit-variance Gaussian samples.
pub fn generate_input_sequence<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Vec<f64>> {
    generate_noise(n, 1.0, rng)
}

/// `n` i.i.d. zero-mean Gaussian samples of the given variance.
pub fn generate_noise<R: Rng + ?Sized>(n: usize, variance: f64, rng: &mut R) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::EmptyStream);
    }
    if !(variance >= 0.0 && variance.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "noise_variance",
            value: variance,
            reason: "must be finite and non-negative",
        });
    }
    let sigma = variance.sqrt();
    Ok((0..n)
        .map(|_| sigma * rng.sample::<f64, _>(StandardNormal))
        .collect())
}

/// Noise variance that puts the channel output `snr_db` above the noise floor:
/// `σ_v² = Σtaps² · input_variance / 10^(snr_db/10)`.
pub fn noise_variance_for_snr(
    channel: &ChannelModel,
    snr_db: f64,
    input_variance: f64,
) -> Result<f64> {
    if input_variance.is_nan() || input_variance <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "input_variance",
            value: input_variance,
            reason: "must be positive",
        });
    }
    Ok(channel.energy() * input_variance / 10f64.powf(snr_db / 10.0))
}

/// One realization of excitation, noise and desired signal.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleStream {
    pub input: Vec<f64>,
    pub noise: Vec<f64>,
    pub desired: Vec<f64>,
    /// Realized noise power, `Σv²/N`.
    pub noise_variance: f64,
}

impl SampleStream {
    pub fn len(&self) -> usize {
        self.input.len()
    }

    pub fn is_empty(&self) -> bool {
        self.input.is_empty()
    }
}

/// Direct-form convolution of `input` through `taps`, zero-padded before k=0.
fn convolve_into(taps: &[f64], input: &[f64], k: usize) -> f64 {
    taps.iter()
        .enumerate()
        .take(k + 1)
        .map(|(i, w)| w * input[k - i])
        .sum()
}

fn check_lengths(input: &[f64], noise: &[f64]) -> Result<()> {
    if input.len() != noise.len() {
        return Err(Error::Shape(format!(
            "input has {} samples but noise has {}",
            input.len(),
            noise.len()
        )));
    }
    Ok(())
}

fn stream_from(input: &[f64], noise: &[f64], desired: Vec<f64>) -> SampleStream {
    let noise_variance = if noise.is_empty() {
        0.0
    } else {
        noise.iter().map(|v| v * v).sum::<f64>() / noise.len() as f64
    };
    SampleStream {
        input: input.to_vec(),
        noise: noise.to_vec(),
        desired,
        noise_variance,
    }
}

/// `d(k) = wᵀx(k) + v(k)` over the whole stream.
pub fn synthesize_desired(
    channel: &ChannelModel,
    input: &[f64],
    noise: &[f64],
) -> Result<SampleStream> {
    check_lengths(input, noise)?;
    let desired = (0..input.len())
        .map(|k| convolve_into(&channel.taps, input, k) + noise[k])
        .collect();
    Ok(stream_from(input, noise, desired))
}

/// Batch form of the system model: row `k` is `[x(k), x(k−1), …, x(k−M+1)]`.
pub fn build_convolution_matrix(input: &[f64], channel_length: usize) -> DMatrix<f64> {
    DMatrix::from_fn(input.len(), channel_length, |k, i| {
        if i <= k {
            input[k - i]
        } else {
            0.0
        }
    })
}

/// Piecewise-constant true channel: segment `j` is active from its start
/// iteration until the next segment starts.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSchedule {
    segments: Vec<(usize, ChannelModel)>,
}

impl ChannelSchedule {
    pub fn new(segments: Vec<(usize, ChannelModel)>) -> Result<Self> {
        let Some((first, head)) = segments.first() else {
            return Err(Error::Shape("schedule needs at least one segment".into()));
        };
        if *first != 0 {
            return Err(Error::Shape("first schedule segment must start at 0".into()));
        }
        for pair in segments.windows(2) {
            if pair[1].0 <= pair[0].0 {
                return Err(Error::Shape(
                    "schedule start iterations must be strictly increasing".into(),
                ));
            }
            if pair[1].1.len() != head.len() {
                return Err(Error::Shape("all scheduled channels must share a length".into()));
            }
        }
        Ok(Self { segments })
    }

    pub fn stationary(channel: ChannelModel) -> Self {
        Self {
            segments: vec![(0, channel)],
        }
    }

    pub fn segments(&self) -> &[(usize, ChannelModel)] {
        &self.segments
    }

    pub fn channel_length(&self) -> usize {
        self.segments[0].1.len()
    }

    /// Channel in force at iteration `k`.
    pub fn active_at(&self, k: usize) -> &ChannelModel {
        let idx = self.segments.partition_point(|(start, _)| *start <= k);
        &self.segments[idx - 1].1
    }

    /// Like [`synthesize_desired`], switching channels at segment boundaries.
    /// The regressor keeps its history across a switch.
    pub fn synthesize(&self, input: &[f64], noise: &[f64]) -> Result<SampleStream> {
        check_lengths(input, noise)?;
        let desired = (0..input.len())
            .map(|k| convolve_into(self.active_at(k).taps(), input, k) + noise[k])
            .collect();
        Ok(stream_from(input, noise, desired))
    }
}

/// Two independently drawn channels, switching at `change_at`.
pub fn make_tracking_schedule<R: Rng + ?Sized>(
    length: usize,
    m: usize,
    total_iterations: usize,
    change_at: usize,
    rng: &mut R,
) -> Result<ChannelSchedule> {
    if change_at == 0 || change_at >= total_iterations {
        return Err(Error::InvalidSchedule {
            change_at,
            total: total_iterations,
        });
    }
    let before = generate_sparse_channel(length, m, rng)?;
    let after = generate_sparse_channel(length, m, rng)?;
    ChannelSchedule::new(vec![(0, before), (change_at, after)])
}
