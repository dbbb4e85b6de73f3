//! Closed-form performance estimates and their brute-force validators.
//!
//! The centerpiece is `f_value`, a lower bound on the probability that an
//! exact minimum-distance decoder attributes a noisy codeword to the
//! correct member of an ensemble of M random codes. From it follow a
//! union bound on the per-frame mis-detection probability (`pd_bound`)
//! and a frame-error-rate approximation for the full concatenated system
//! (`fer_approx`): a mis-detected segment is charged as a guaranteed
//! frame loss, and the all-detected case is charged the probability that
//! independent residual bit errors exceed the outer code's correction
//! radius.
//!
//! Every probability accumulates in log domain; length-255 outer-code
//! binomials and length-128 weight sums overflow doubles in linear form.
//!
//! The derivation behind `f_value` is itself checked at desk scale:
//! `oracle_misdetect` runs the random-coding experiment literally (draw
//! the codes, corrupt a codeword, decode by exhaustive minimum distance
//! with uniform tie-breaking) so the bound can be compared against truth,
//! and the unit tests verify the supporting combinatorial identities by
//! enumeration and the log-domain arithmetic against exact rationals.

use std::f64::consts::LN_2;
use std::sync::OnceLock;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::pipeline::{trial_rng, wilson_ci};
use crate::polar::{bsc_llr_magnitude, sc_decode_raw, CombiningRule, PolarCode, ScScratch};
use crate::Error;

const PURPOSE_ORACLE: u64 = 5;
const PURPOSE_POLAR_BER: u64 = 6;

/// Largest length any log-domain routine accepts; sized for the embedded
/// polar block lengths and the longest byte-symbol outer code.
pub const MAX_ANALYSIS_LEN: usize = 1024;

/// Parameters of one analytical operating point.
///
/// `n` and `rate` describe the inner code (rate = payload bits / n), `m`
/// the segment count, `delta` the channel, and the outer fields feed the
/// frame-error-rate approximation. `p_b` is the inner decoder's residual
/// bit error rate, supplied by measurement or by an external table; the
/// closed forms do not predict it.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BoundParams {
    pub n: usize,
    pub rate: f64,
    pub delta: f64,
    pub m: usize,
    pub n_o: usize,
    pub k_o: usize,
    pub q: u32,
    pub p_b: f64,
}

impl BoundParams {
    fn validate(&self) -> Result<(), Error> {
        check_code_shape(self.n, self.rate, self.m, self.delta)?;
        if self.n_o == 0 || self.n_o > MAX_ANALYSIS_LEN || self.k_o == 0 || self.k_o >= self.n_o {
            return Err(Error::config(format!(
                "outer code ({}, {}) out of range",
                self.n_o, self.k_o
            )));
        }
        if (self.n_o - self.k_o) % 2 != 0 {
            return Err(Error::config("outer redundancy must be even"));
        }
        if !(0.0..=1.0).contains(&self.p_b) {
            return Err(Error::config(format!("bit error rate {} outside [0, 1]", self.p_b)));
        }
        if self.q == 0 {
            return Err(Error::config("symbol width q must be at least 1"));
        }
        Ok(())
    }
}

fn check_code_shape(n: usize, rate: f64, m: usize, delta: f64) -> Result<(), Error> {
    if n == 0 || n > MAX_ANALYSIS_LEN {
        return Err(Error::config(format!("length {n} outside 1..={MAX_ANALYSIS_LEN}")));
    }
    if !(rate > 0.0 && rate < 1.0) {
        return Err(Error::config(format!("rate {rate} outside (0, 1)")));
    }
    if m == 0 {
        return Err(Error::config("code count M must be at least 1"));
    }
    if !(0.0..0.5).contains(&delta) {
        return Err(Error::config(format!("crossover probability {delta} outside [0, 0.5)")));
    }
    Ok(())
}

/// ln(k!) for k <= MAX_ANALYSIS_LEN, from a lazily built running-sum table.
fn ln_factorial(k: usize) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(MAX_ANALYSIS_LEN + 1);
        t.push(0.0);
        for i in 1..=MAX_ANALYSIS_LEN {
            t.push(t[i - 1] + (i as f64).ln());
        }
        t
    });
    table[k]
}

/// ln C(n, k).
pub fn log_binom(n: usize, k: usize) -> f64 {
    assert!(k <= n && n <= MAX_ANALYSIS_LEN, "binomial ({n}, {k}) out of range");
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// ln of the sum of exp(terms), stable under any term scale.
fn log_sum_exp(terms: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = terms.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    max + terms.map(|t| (t - max).exp()).sum::<f64>().ln()
}

/// ln of the partial binomial sum N(n, w) = sum_{h <= w} C(n, h), the
/// count of n-bit words of weight at most w. Exact to double precision
/// via log-sum-exp over log-factorials.
pub fn log_binom_cdf(n: usize, w: usize) -> f64 {
    assert!(w <= n, "weight {w} exceeds length {n}");
    log_sum_exp((0..=w).map(|h| log_binom(n, h)))
}

/// N(n, w) as an exact integer, for cross-checking the log-domain path
/// and for enumeration arguments. Limited to n <= 63 so every partial
/// sum (at most 2^63) and every intermediate product fits in u128.
pub fn exact_partial_binomial_sum(n: usize, w: usize) -> u128 {
    assert!(w <= n && n <= 63, "exact sum needs w <= n <= 63, got ({n}, {w})");
    let mut coeff: u128 = 1;
    let mut total: u128 = 1;
    for h in 1..=w {
        coeff = coeff * (n - h + 1) as u128 / h as u128;
        total += coeff;
    }
    total
}

/// Lower bound f(n, R, delta) on correct attribution by a minimum-distance
/// decoder over an ensemble of M length-n rate-R random codes on a BSC.
///
/// f = sum_w C(n,w) delta^w (1-delta)^(n-w) * g_w^(M-1), where
/// g_w = 1 - 2^(-n(1-R)) N(n, w) while positive; the weight-w term is
/// dropped entirely once g_w <= 0 (the zero-argument step resolves to
/// drop, the conservative direction for a lower bound).
pub fn f_value(n: usize, rate: f64, delta: f64, m: usize) -> Result<f64, Error> {
    check_code_shape(n, rate, m, delta)?;
    let redundancy_nats = n as f64 * (1.0 - rate) * LN_2;
    let ln_delta = delta.ln();
    let ln_comp = (-delta).ln_1p();
    let mut f = 0.0f64;
    for w in 0..=n {
        let exponent = log_binom_cdf(n, w) - redundancy_nats;
        if exponent >= 0.0 {
            break; // N(n, w) only grows with w: every later term drops too
        }
        let ln_g = (-exponent.exp()).ln_1p();
        let ln_weight = if delta == 0.0 {
            if w > 0 {
                break; // degenerate channel: all mass at weight zero
            }
            0.0
        } else {
            log_binom(n, w) + w as f64 * ln_delta + (n - w) as f64 * ln_comp
        };
        f += (ln_weight + (m - 1) as f64 * ln_g).exp();
    }
    Ok(f.min(1.0))
}

/// [`f_value`] at the operating point described by `params`.
pub fn f_bound(params: &BoundParams) -> Result<f64, Error> {
    params.validate()?;
    f_value(params.n, params.rate, params.delta, params.m)
}

/// Union bound M * (1 - f) on the probability that at least one of M
/// delivered segments is attributed to the wrong position. Returned as
/// (raw, clamped): the raw union bound exceeds 1 where it is vacuous,
/// and reports include both so that region is visible.
pub fn pd_bound(params: &BoundParams) -> Result<(f64, f64), Error> {
    let f = f_bound(params)?;
    let raw = params.m as f64 * (1.0 - f);
    Ok((raw, raw.min(1.0)))
}

/// Symbol error rate of q-bit symbols under independent bit errors:
/// 1 - (1 - p_b)^q.
pub fn symbol_error_rate(p_b: f64, q: u32) -> f64 {
    assert!((0.0..=1.0).contains(&p_b), "bit error rate {p_b} outside [0, 1]");
    -(q as f64 * (-p_b).ln_1p()).exp_m1()
}

/// Probability that more than (n_o - k_o) / 2 of n_o symbols are in
/// error when each errs independently with probability p_s; that is,
/// the chance the outer bounded-distance decoder is overwhelmed.
pub fn outer_failure_prob(n_o: usize, k_o: usize, p_s: f64) -> Result<f64, Error> {
    if n_o == 0 || n_o > MAX_ANALYSIS_LEN || k_o == 0 || k_o >= n_o || (n_o - k_o) % 2 != 0 {
        return Err(Error::config(format!("outer code ({n_o}, {k_o}) out of range")));
    }
    if !(0.0..=1.0).contains(&p_s) {
        return Err(Error::config(format!("symbol error rate {p_s} outside [0, 1]")));
    }
    if p_s == 0.0 {
        return Ok(0.0);
    }
    let t = (n_o - k_o) / 2;
    let ln_ps = p_s.ln();
    let ln_comp = (-p_s).ln_1p();
    let ln_cdf = log_sum_exp(
        (0..=t).map(|j| log_binom(n_o, j) + j as f64 * ln_ps + (n_o - j) as f64 * ln_comp),
    );
    // cdf may round a hair above 1 when p_s is tiny; pin the tail at 0.
    Ok(-ln_cdf.min(0.0).exp_m1())
}

/// Frame error rate approximation for the concatenated system:
///
/// FER ~= p_d + (1 - p_d) * P(outer decoder overwhelmed),
///
/// with p_d the clamped union bound from [`pd_bound`] and the outer term
/// driven by `params.p_b` through [`symbol_error_rate`]. An approximation,
/// not a bound in either direction: the detection term substitutes a
/// random-coding bound for the real inner code, and a mis-detected frame
/// is charged as always lost.
pub fn fer_approx(params: &BoundParams) -> Result<f64, Error> {
    let (_, pd) = pd_bound(params)?;
    let p_s = symbol_error_rate(params.p_b, params.q);
    let tail = outer_failure_prob(params.n_o, params.k_o, p_s)?;
    Ok(pd + (1.0 - pd) * tail)
}

/// Residual bit error rate of an (n, k) inner code alone on a BSC: no
/// segmentation, no shuffling, just encode, corrupt, decode. This is the
/// measured `p_b` input to [`fer_approx`].
///
/// `combining` selects the SC check-node arithmetic; pass the rule the
/// simulation under comparison uses, since min-sum leaves a measurably
/// higher residual than exact combining. `workers` as in
/// [`crate::pipeline::run_campaign`]; results are bit-identical for every
/// worker count.
pub fn measure_polar_ber(
    n: usize,
    k: usize,
    delta: f64,
    combining: CombiningRule,
    frames: u64,
    seed: u64,
    workers: usize,
) -> Result<f64, Error> {
    if frames == 0 {
        return Err(Error::config("frame count must be at least 1"));
    }
    let code = PolarCode::new(n, k)?.with_combining(combining);
    let mag = bsc_llr_magnitude(delta)?;
    let trial = |state: &mut (ScScratch, Vec<f64>, Vec<f64>, Vec<u8>, Vec<u8>), t: u64| {
        let (scratch, chan, llrs, hard, msg) = state;
        let mut rng = trial_rng(seed, PURPOSE_POLAR_BER, t);
        msg.clear();
        msg.extend((0..k).map(|_| rng.gen_range(0..2u8)));
        let mut x = code.encode(msg).expect("message length matches k");
        for bit in x.iter_mut() {
            *bit ^= u8::from(rng.gen::<f64>() < delta);
        }
        for (c, &bit) in chan.iter_mut().zip(&x) {
            *c = if bit == 0 { mag } else { -mag };
        }
        sc_decode_raw(chan, &code, scratch, llrs, hard).expect("buffers sized for n");
        code.info_set()
            .iter()
            .zip(msg.iter())
            .filter(|(&pos, &m)| hard[pos] != m)
            .count() as u64
    };
    let new_state =
        || (ScScratch::new(n), vec![0.0; n], vec![0.0; n], vec![0u8; n], Vec::with_capacity(k));
    #[cfg(feature = "parallel")]
    let errors: u64 = {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::config(format!("worker pool: {e}")))?;
        pool.install(|| {
            use rayon::prelude::*;
            (0..frames).into_par_iter().map_init(new_state, |state, t| trial(state, t)).sum()
        })
    };
    #[cfg(not(feature = "parallel"))]
    let errors: u64 = {
        let _ = workers;
        let mut state = new_state();
        (0..frames).map(|t| trial(&mut state, t)).sum()
    };
    Ok(errors as f64 / (frames as f64 * k as f64))
}

/// Outcome of the literal random-coding experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MisdetectEstimate {
    pub trials: u64,
    /// Codewords transmitted: one per code per trial.
    pub codewords_sent: u64,
    /// Transmissions attributed to the wrong code.
    pub codeword_misdetections: u64,
    /// Trials in which at least one transmission was misattributed.
    pub frame_misdetections: u64,
}

impl MisdetectEstimate {
    /// Empirical probability that one codeword is misattributed.
    pub fn codeword_rate(&self) -> f64 {
        self.codeword_misdetections as f64 / self.codewords_sent as f64
    }

    /// Empirical probability that any of the M codewords of a trial is
    /// misattributed.
    pub fn frame_rate(&self) -> f64 {
        self.frame_misdetections as f64 / self.trials as f64
    }

    /// 95% Wilson interval for [`Self::codeword_rate`].
    pub fn codeword_ci(&self) -> (f64, f64) {
        wilson_ci(self.codeword_misdetections, self.codewords_sent)
    }

    /// 95% Wilson interval for [`Self::frame_rate`].
    pub fn frame_ci(&self) -> (f64, f64) {
        wilson_ci(self.frame_misdetections, self.trials)
    }
}

/// Runs the random-coding experiment that [`f_value`] bounds, literally.
///
/// Each trial draws a fresh ensemble of M codes, each of 2^(nR) words
/// drawn uniformly with replacement from all n-bit words; transmits one
/// uniformly chosen codeword per code across the BSC; decodes each by
/// exhaustive minimum distance with uniform tie-breaking; and records
/// which transmissions were attributed to the wrong code.
///
/// Requires n <= 14, integer n*R, and M * 2^(nR) <= 65536 total words
/// (beyond that, exhaustive decoding stops being an oracle and starts
/// being a simulation; the cap returns a budget error).
pub fn oracle_misdetect(
    n: usize,
    rate: f64,
    m: usize,
    delta: f64,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<MisdetectEstimate, Error> {
    check_code_shape(n, rate, m, delta)?;
    if n > 14 {
        return Err(Error::config(format!("oracle length {n} exceeds 14")));
    }
    if trials == 0 {
        return Err(Error::config("trial count must be at least 1"));
    }
    let payload_bits = n as f64 * rate;
    let rounded = payload_bits.round();
    if (payload_bits - rounded).abs() > 1e-9 {
        return Err(Error::config(format!(
            "n * rate = {payload_bits} must be an integer codeword-count exponent"
        )));
    }
    let words_per_code = 1usize << rounded as u32;
    let total_words = m * words_per_code;
    if total_words > 1 << 16 {
        return Err(Error::budget(format!(
            "{m} codes x {words_per_code} words = {total_words} exceeds the 65536-word \
             exhaustive-decoding cap"
        )));
    }
    let trial = |codes: &mut Vec<u16>, t: u64| {
        let mut rng = trial_rng(seed, PURPOSE_ORACLE, t);
        let mask = ((1u32 << n) - 1) as u16;
        codes.clear();
        codes.extend((0..total_words).map(|_| rng.gen::<u16>() & mask));
        let (mis, any) = oracle_trial(codes, n, words_per_code, delta, &mut rng);
        (mis as u64, u64::from(any))
    };
    #[cfg(feature = "parallel")]
    let (codeword_mis, frame_mis) = {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::config(format!("worker pool: {e}")))?;
        pool.install(|| {
            use rayon::prelude::*;
            (0..trials)
                .into_par_iter()
                .map_init(|| Vec::with_capacity(total_words), |codes, t| trial(codes, t))
                .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1))
        })
    };
    #[cfg(not(feature = "parallel"))]
    let (codeword_mis, frame_mis) = {
        let _ = workers;
        let mut codes = Vec::with_capacity(total_words);
        (0..trials).map(|t| trial(&mut codes, t)).fold((0, 0), |a, b| (a.0 + b.0, a.1 + b.1))
    };
    Ok(MisdetectEstimate {
        trials,
        codewords_sent: trials * m as u64,
        codeword_misdetections: codeword_mis,
        frame_misdetections: frame_mis,
    })
}

/// One ensemble pass: transmit one uniformly chosen word per code and
/// decode by exhaustive minimum distance with uniform tie-breaking.
/// Returns (misattributed transmissions, any misattributed).
fn oracle_trial(
    codes: &[u16],
    n: usize,
    words_per_code: usize,
    delta: f64,
    rng: &mut impl Rng,
) -> (u32, bool) {
    let m = codes.len() / words_per_code;
    let mut misses = 0u32;
    for true_code in 0..m {
        let x = codes[true_code * words_per_code + rng.gen_range(0..words_per_code)];
        let mut noise = 0u16;
        for b in 0..n {
            noise |= u16::from(rng.gen::<f64>() < delta) << b;
        }
        let r = x ^ noise;
        let mut best = u32::MAX;
        let mut chosen = 0usize;
        let mut ties = 0u32;
        for (idx, &word) in codes.iter().enumerate() {
            let d = u32::from(word ^ r).count_ones();
            if d < best {
                best = d;
                chosen = idx;
                ties = 1;
            } else if d == best {
                ties += 1;
                if rng.gen_range(0..ties) == 0 {
                    chosen = idx;
                }
            }
        }
        misses += u32::from(chosen / words_per_code != true_code);
    }
    (misses, misses > 0)
}
