//! Noisy shuffling and noisy shuffling-sampling channel models.
//!
//! Both channels corrupt segments bit-wise (binary symmetric channel with
//! crossover probability delta) and destroy ordering with a uniform random
//! permutation. The sampling variant first draws N segments with
//! replacement from the M stored ones, modeling reads at coverage depth
//! alpha = N/M; each drawn copy is corrupted independently by default
//! (every read is its own noisy observation), with a switch to corrupt the
//! stored segments once before sampling instead.
//!
//! RNG draw order is part of the determinism contract: per-bit noise
//! uniforms are consumed for every bit even when delta = 0, and sampling
//! indices are drawn before any noise. Two transmissions from identical
//! streams therefore stay coupled bit-for-bit when only delta changes,
//! which is what makes common-random-number comparisons across delta (and
//! across indexing schemes) meaningful.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::Error;

/// Segments after the channel, in shuffled order, with the hidden
/// origin map available to instrumentation only.
#[derive(Debug, Clone)]
pub struct ChannelOutput {
    /// Delivered segments. Length M in shuffling mode, N in sampling mode.
    pub segments: Vec<Vec<u8>>,
    pub(crate) origins: Vec<usize>,
}

impl ChannelOutput {
    /// True origin (stored-segment index) of each delivered segment.
    ///
    /// Instrumentation only: mis-detection counters and tests may read
    /// this, decoders must not — the channel's whole point is that
    /// ordering information does not survive it.
    pub fn origins(&self) -> &[usize] {
        &self.origins
    }
}

fn check_delta(delta: f64) -> Result<(), Error> {
    if !(0.0..0.5).contains(&delta) {
        return Err(Error::config(format!("crossover probability {delta} outside [0, 0.5)")));
    }
    Ok(())
}

/// Flips each bit independently with probability delta. One uniform draw
/// is consumed per bit regardless of delta, keeping streams aligned across
/// delta sweeps.
pub fn bsc_corrupt(bits: &[u8], delta: f64, rng: &mut impl Rng) -> Result<Vec<u8>, Error> {
    check_delta(delta)?;
    Ok(bits.iter().map(|&b| b ^ u8::from(rng.gen::<f64>() < delta)).collect())
}

/// Noisy shuffling channel: BSC-corrupt every segment, then deliver all M
/// in uniformly random order.
pub fn transmit_shuffling(
    segments: &[Vec<u8>],
    delta: f64,
    rng: &mut impl Rng,
) -> Result<ChannelOutput, Error> {
    check_delta(delta)?;
    let mut tagged: Vec<(usize, Vec<u8>)> = Vec::with_capacity(segments.len());
    for (i, s) in segments.iter().enumerate() {
        tagged.push((i, bsc_corrupt(s, delta, rng)?));
    }
    tagged.shuffle(rng);
    let (origins, segments) = tagged.into_iter().unzip();
    Ok(ChannelOutput { segments, origins })
}

/// Noisy shuffling-sampling channel: draw `n_samples` segments uniformly
/// with replacement, corrupt each drawn copy independently, shuffle.
pub fn transmit_sampling(
    segments: &[Vec<u8>],
    n_samples: usize,
    delta: f64,
    rng: &mut impl Rng,
) -> Result<ChannelOutput, Error> {
    transmit_sampling_with(segments, n_samples, delta, false, rng)
}

/// [`transmit_sampling`] with the noise order switch: when
/// `noise_before_sampling` is set, the M stored segments are corrupted
/// once and samples are exact copies of the corrupted strands.
pub fn transmit_sampling_with(
    segments: &[Vec<u8>],
    n_samples: usize,
    delta: f64,
    noise_before_sampling: bool,
    rng: &mut impl Rng,
) -> Result<ChannelOutput, Error> {
    check_delta(delta)?;
    if n_samples == 0 {
        return Err(Error::config("sample count must be at least 1"));
    }
    if segments.is_empty() {
        return Err(Error::config("cannot sample from zero segments"));
    }
    let m = segments.len();
    let mut tagged: Vec<(usize, Vec<u8>)> = Vec::with_capacity(n_samples);
    if noise_before_sampling {
        let corrupted: Vec<Vec<u8>> = segments
            .iter()
            .map(|s| bsc_corrupt(s, delta, rng))
            .collect::<Result<_, _>>()?;
        for _ in 0..n_samples {
            let idx = rng.gen_range(0..m);
            tagged.push((idx, corrupted[idx].clone()));
        }
    } else {
        let indices: Vec<usize> = (0..n_samples).map(|_| rng.gen_range(0..m)).collect();
        for idx in indices {
            tagged.push((idx, bsc_corrupt(&segments[idx], delta, rng)?));
        }
    }
    tagged.shuffle(rng);
    let (origins, segments) = tagged.into_iter().unzip();
    Ok(ChannelOutput { segments, origins })
}
