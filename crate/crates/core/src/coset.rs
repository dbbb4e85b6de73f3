//! Coset books and the matched decoder that recovers segment positions.
//!
//! Segment m is encoded by XOR-ing coset leader e^m onto a polar codeword,
//! so the transmitted vector lives in the m-th coset of the base code. A
//! receiver that strips the right leader sees a clean polar codeword whose
//! frozen positions all decode with confidently positive LLRs; stripping a
//! wrong leader leaves an offset that is not a codeword, and frozen-bit
//! LLRs lose their positive bias. The matched decoder runs one SC decode
//! per candidate leader and picks the coset whose frozen-LLR statistic is
//! largest.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use serde::{Deserialize, Serialize};

use crate::polar::{bsc_llr_magnitude, polar_transform, sc_decode_raw, PolarCode, ScScratch};
use crate::Error;

/// Statistic computed over the frozen-position decision LLRs of one
/// candidate decode. `SignedLlrSum` is the production metric; the other
/// two exist to probe how much the signs and magnitudes each contribute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    /// Sum of signed frozen-position LLRs.
    #[default]
    SignedLlrSum,
    /// Sum of |LLR| over frozen positions (sign-blind control).
    MagnitudeSum,
    /// Count of non-negative frozen-position LLRs (magnitude-blind control).
    SignAgreements,
}

/// M coset leaders plus the seed they were drawn from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetBook {
    seed: u64,
    leaders: Vec<Vec<u8>>,
}

/// Result of matched-decoding one received vector.
#[derive(Debug, Clone)]
pub struct MatchResult {
    /// The metric of every candidate coset, indexed by coset.
    pub metrics: Vec<f64>,
    /// Argmax of `metrics`; ties resolve to the lowest coset index.
    pub detected: usize,
    /// Information bits produced by the detected coset's decoder.
    pub decoded_segment: Vec<u8>,
}

/// Draws `m` coset leaders uniformly at random, rejecting any candidate
/// that lands in the same coset as an already-accepted leader (i.e. whose
/// XOR with one of them is a codeword of `code`). Deterministic in `seed`.
pub fn gen_coset_book(seed: u64, m: usize, code: &PolarCode) -> Result<CosetBook, Error> {
    if m == 0 {
        return Err(Error::config("coset count must be at least 1"));
    }
    let redundancy = code.n() - code.k();
    if redundancy < usize::BITS as usize && m as u128 > 1u128 << redundancy {
        return Err(Error::config(format!(
            "only 2^{redundancy} distinct cosets exist, cannot draw {m}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut leaders: Vec<Vec<u8>> = Vec::with_capacity(m);
    let budget = 1000 * m;
    let mut attempts = 0usize;
    while leaders.len() < m {
        attempts += 1;
        if attempts > budget {
            return Err(Error::config(format!(
                "coset sampling exceeded {budget} attempts; parameters leave too few cosets"
            )));
        }
        let cand: Vec<u8> = (0..code.n()).map(|_| rng.gen_range(0..2u8)).collect();
        if leaders.iter().all(|l| !same_coset(l, &cand, code)) {
            leaders.push(cand);
        }
    }
    Ok(CosetBook { seed, leaders })
}

/// Whether a and b lie in the same coset of `code`.
fn same_coset(a: &[u8], b: &[u8], code: &PolarCode) -> bool {
    let mut diff: Vec<u8> = a.iter().zip(b).map(|(x, y)| x ^ y).collect();
    // The transform is an involution, so u = transform(diff); diff is a
    // codeword iff u vanishes on the frozen set.
    polar_transform(&mut diff).expect("leader length is a power of 2");
    code.frozen_set().iter().all(|&j| diff[j] == 0)
}

impl CosetBook {
    /// Wraps explicit leaders, enforcing pairwise-distinct cosets.
    pub fn from_leaders(leaders: Vec<Vec<u8>>, code: &PolarCode) -> Result<Self, Error> {
        if leaders.is_empty() {
            return Err(Error::config("coset book cannot be empty"));
        }
        for l in &leaders {
            if l.len() != code.n() || l.iter().any(|&b| b > 1) {
                return Err(Error::config("leaders must be bit vectors of length n"));
            }
        }
        for i in 0..leaders.len() {
            for j in i + 1..leaders.len() {
                if same_coset(&leaders[i], &leaders[j], code) {
                    return Err(Error::config(format!("leaders {i} and {j} share a coset")));
                }
            }
        }
        Ok(CosetBook { seed: 0, leaders })
    }

    pub fn m(&self) -> usize {
        self.leaders.len()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn leader(&self, m: usize) -> &[u8] {
        &self.leaders[m]
    }

    /// Plain text record: seed line, then one hex leader per line.
    pub fn to_text(&self) -> String {
        let mut s = format!("seed {}\n", self.seed);
        for l in &self.leaders {
            let mut hex = String::with_capacity(l.len() / 4 + 1);
            for chunk in l.chunks(4) {
                let mut nib = 0u8;
                for (i, &b) in chunk.iter().enumerate() {
                    nib |= b << (3 - i);
                }
                hex.push(char::from_digit(nib as u32, 16).unwrap());
            }
            s.push_str(&hex);
            s.push('\n');
        }
        s
    }

    /// Parses [`CosetBook::to_text`] output; `code` revalidates coset
    /// distinctness and leader length.
    pub fn from_text(text: &str, code: &PolarCode) -> Result<Self, Error> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let seed_line = lines.next().ok_or_else(|| Error::config("empty coset book text"))?;
        let seed: u64 = seed_line
            .strip_prefix("seed ")
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| Error::config("first line must be `seed <u64>`"))?;
        let mut leaders = Vec::new();
        for line in lines {
            let mut bits = Vec::with_capacity(line.len() * 4);
            for c in line.trim().chars() {
                let nib = c
                    .to_digit(16)
                    .ok_or_else(|| Error::config(format!("bad hex digit {c:?}")))?
                    as u8;
                for i in (0..4).rev() {
                    bits.push((nib >> i) & 1);
                }
            }
            bits.truncate(code.n());
            leaders.push(bits);
        }
        let mut book = Self::from_leaders(leaders, code)?;
        book.seed = seed;
        Ok(book)
    }
}

/// Encodes an L-bit segment into coset `m`: polar-encode, then XOR e^m.
pub fn coset_encode(
    segment: &[u8],
    m: usize,
    book: &CosetBook,
    code: &PolarCode,
) -> Result<Vec<u8>, Error> {
    if m >= book.m() {
        return Err(Error::config(format!("coset index {m} out of range 0..{}", book.m())));
    }
    let mut x = code.encode(segment)?;
    for (xi, &ei) in x.iter_mut().zip(book.leader(m)) {
        *xi ^= ei;
    }
    Ok(x)
}

/// Reusable buffers for [`matched_decode_with`].
#[derive(Debug, Clone)]
pub struct MatchScratch {
    sc: ScScratch,
    chan: Vec<f64>,
    llrs: Vec<f64>,
    hard: Vec<u8>,
    best_info: Vec<u8>,
}

impl MatchScratch {
    pub fn new(n: usize) -> Self {
        MatchScratch {
            sc: ScScratch::new(n),
            chan: vec![0.0; n],
            llrs: vec![0.0; n],
            hard: vec![0u8; n],
            best_info: Vec::new(),
        }
    }
}

/// Matched decode with the default signed-LLR-sum metric.
pub fn matched_decode(
    r: &[u8],
    delta: f64,
    book: &CosetBook,
    code: &PolarCode,
) -> Result<MatchResult, Error> {
    let mut scratch = MatchScratch::new(code.n());
    matched_decode_with(r, delta, book, code, MetricKind::SignedLlrSum, &mut scratch)
}

/// Runs one SC decode of r XOR e^m per candidate coset m, scores each
/// decode's frozen-position LLRs with `metric`, and returns the argmax
/// (lowest index on exact ties) along with that decoder's segment output.
pub fn matched_decode_with(
    r: &[u8],
    delta: f64,
    book: &CosetBook,
    code: &PolarCode,
    metric: MetricKind,
    scratch: &mut MatchScratch,
) -> Result<MatchResult, Error> {
    let n = code.n();
    if r.len() != n {
        return Err(Error::config(format!("received length {} != n = {n}", r.len())));
    }
    let mag = bsc_llr_magnitude(delta)?;
    if scratch.chan.len() != n {
        *scratch = MatchScratch::new(n);
    }
    let mut metrics = Vec::with_capacity(book.m());
    let mut best = f64::NEG_INFINITY;
    let mut detected = 0usize;
    for m in 0..book.m() {
        let leader = book.leader(m);
        for i in 0..n {
            scratch.chan[i] = if r[i] ^ leader[i] == 0 { mag } else { -mag };
        }
        sc_decode_raw(&scratch.chan, code, &mut scratch.sc, &mut scratch.llrs, &mut scratch.hard)?;
        let xi = score(&scratch.llrs, code.frozen_set(), metric);
        if xi > best {
            best = xi;
            detected = m;
            scratch.best_info.clear();
            scratch.best_info.extend(code.info_set().iter().map(|&p| scratch.hard[p]));
        }
        metrics.push(xi);
    }
    Ok(MatchResult { metrics, detected, decoded_segment: scratch.best_info.clone() })
}

fn score(llrs: &[f64], frozen: &[usize], metric: MetricKind) -> f64 {
    match metric {
        MetricKind::SignedLlrSum => frozen.iter().map(|&j| llrs[j]).sum(),
        MetricKind::MagnitudeSum => frozen.iter().map(|&j| llrs[j].abs()).sum(),
        MetricKind::SignAgreements => {
            frozen.iter().filter(|&&j| llrs[j] >= 0.0).count() as f64
        }
    }
}
