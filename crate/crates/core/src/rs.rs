//! Reed-Solomon outer codec over GF(2^m).
//!
//! Narrow-sense, systematic RS(n, k) with n = 2^m - 1: the generator
//! polynomial has roots alpha^1 .. alpha^(n-k), codewords carry the message
//! in the first k symbols. Decoding runs Berlekamp-Massey, a Chien search,
//! and Forney's formula, then re-checks the syndromes of the corrected
//! word; any inconsistency is reported as a decode failure rather than a
//! silent miscorrection, so a `Corrected` status always denotes a true
//! codeword within distance t = (n - k) / 2 of the input.
//!
//! Array position i holds the coefficient of x^(n-1-i), so the message
//! occupies the high-order coefficients and parity the low-order tail.

use crate::gf::GfField;
use crate::Error;

/// Outcome of a decode attempt.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RsStatus {
    /// A codeword within distance t was found; `errors` symbols were fixed.
    Corrected { errors: usize },
    /// No codeword within distance t is consistent with the input.
    Failure,
}

impl RsStatus {
    pub fn is_corrected(&self) -> bool {
        matches!(self, RsStatus::Corrected { .. })
    }
}

/// A systematic RS(n, k) code over GF(2^m), n = 2^m - 1.
#[derive(Debug, Clone)]
pub struct RsCode {
    field: GfField,
    n: usize,
    k: usize,
    /// Generator polynomial, ascending coefficients; gen[n-k] = 1.
    gen: Vec<u8>,
}

impl RsCode {
    /// Builds RS(2^q - 1, k) over the default field for the symbol width q
    /// (q = 8: polynomial 0x11D; q = 4: polynomial 0x13).
    pub fn new(q: u32, k: usize) -> Result<Self, Error> {
        let field = match q {
            8 => GfField::gf256(),
            4 => GfField::gf16(),
            _ => {
                return Err(Error::config(format!(
                    "no default field polynomial for symbol width q={q}; use with_field"
                )))
            }
        };
        Self::with_field(field, k)
    }

    /// Builds RS(2^m - 1, k) over an explicit field.
    pub fn with_field(field: GfField, k: usize) -> Result<Self, Error> {
        let n = field.order();
        if k == 0 || k >= n {
            return Err(Error::config(format!("message length k={k} outside (0, {n})")));
        }
        if (n - k) % 2 != 0 {
            return Err(Error::config(format!(
                "parity length n-k={} must be even so t=(n-k)/2 is integral",
                n - k
            )));
        }
        // g(x) = prod_{i=1..n-k} (x + alpha^i), built by convolution.
        let mut gen = vec![0u8; n - k + 1];
        gen[0] = 1;
        for i in 1..=(n - k) {
            let root = field.alpha_pow(i);
            let mut next = vec![0u8; n - k + 1];
            for j in 0..i {
                next[j + 1] ^= gen[j];
                next[j] ^= field.mul(gen[j], root);
            }
            gen = next;
        }
        Ok(RsCode { field, n, k, gen })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Correction radius t = (n - k) / 2 in symbols.
    pub fn t(&self) -> usize {
        (self.n - self.k) / 2
    }

    pub fn field(&self) -> &GfField {
        &self.field
    }

    /// Systematic encode: message followed by n - k parity symbols.
    pub fn encode(&self, message: &[u8]) -> Result<Vec<u8>, Error> {
        if message.len() != self.k {
            return Err(Error::config(format!(
                "message length {} != k = {}",
                message.len(),
                self.k
            )));
        }
        let p = self.n - self.k;
        let mut parity = vec![0u8; p];
        for &m in message {
            // parity holds the running remainder of message * x^(n-k) mod g,
            // descending coefficients (parity[0] = x^(n-k-1) term).
            let fb = m ^ parity[0];
            for j in 0..p - 1 {
                parity[j] = parity[j + 1] ^ self.field.mul(fb, self.gen[p - 1 - j]);
            }
            parity[p - 1] = self.field.mul(fb, self.gen[0]);
        }
        let mut cw = Vec::with_capacity(self.n);
        cw.extend_from_slice(message);
        cw.extend_from_slice(&parity);
        Ok(cw)
    }

    /// Syndromes S_1 .. S_{n-k}; all zero iff the word is a codeword.
    fn syndromes(&self, word: &[u8]) -> Vec<u8> {
        (1..=self.n - self.k)
            .map(|i| {
                let x = self.field.alpha_pow(i);
                word.iter().fold(0u8, |acc, &c| self.field.mul(acc, x) ^ c)
            })
            .collect()
    }

    /// Decodes a received word of n symbols.
    ///
    /// Returns the message estimate and status. On `Failure` the message
    /// estimate is the first k received symbols unmodified, a best-effort
    /// output for downstream bit-error accounting.
    pub fn decode(&self, received: &[u8]) -> Result<(Vec<u8>, RsStatus), Error> {
        if received.len() != self.n {
            return Err(Error::config(format!(
                "received length {} != n = {}",
                received.len(),
                self.n
            )));
        }
        let fallback = received[..self.k].to_vec();
        let synd = self.syndromes(received);
        if synd.iter().all(|&s| s == 0) {
            return Ok((fallback, RsStatus::Corrected { errors: 0 }));
        }
        match self.correct(received, &synd) {
            Some(corrected) => {
                let errors =
                    corrected.iter().zip(received).filter(|(a, b)| a != b).count();
                Ok((corrected[..self.k].to_vec(), RsStatus::Corrected { errors }))
            }
            None => Ok((fallback, RsStatus::Failure)),
        }
    }

    /// Berlekamp-Massey + Chien + Forney. Returns the corrected codeword,
    /// or None when the chain is inconsistent or the result fails the
    /// syndrome re-check.
    fn correct(&self, received: &[u8], synd: &[u8]) -> Option<Vec<u8>> {
        let f = &self.field;
        let p = self.n - self.k;
        let t = p / 2;

        // Berlekamp-Massey: minimal LFSR lambda generating the syndromes.
        let mut lambda = vec![0u8; p + 1];
        lambda[0] = 1;
        let mut prev = lambda.clone();
        let mut l = 0usize;
        let mut gap = 1usize;
        let mut prev_disc = 1u8;
        for i in 0..p {
            let mut d = synd[i];
            for j in 1..=l.min(i) {
                d ^= f.mul(lambda[j], synd[i - j]);
            }
            if d == 0 {
                gap += 1;
            } else {
                let coef = f.div(d, prev_disc);
                if 2 * l <= i {
                    let saved = lambda.clone();
                    for j in gap..=p {
                        lambda[j] ^= f.mul(coef, prev[j - gap]);
                    }
                    l = i + 1 - l;
                    prev = saved;
                    prev_disc = d;
                    gap = 1;
                } else {
                    for j in gap..=p {
                        lambda[j] ^= f.mul(coef, prev[j - gap]);
                    }
                    gap += 1;
                }
            }
        }
        let deg = lambda.iter().rposition(|&c| c != 0)?;
        if deg != l || l > t {
            return None;
        }

        // Chien search: position i is in error iff lambda(alpha^-(n-1-i)) = 0.
        let mut positions = Vec::with_capacity(l);
        for i in 0..self.n {
            let xinv = self.field.alpha_pow(self.field.order() - (self.n - 1 - i) % self.field.order());
            let mut v = 0u8;
            for &c in lambda.iter().rev() {
                v = f.mul(v, xinv) ^ c;
            }
            if v == 0 {
                positions.push(i);
            }
        }
        if positions.len() != l {
            return None;
        }

        // Forney with first consecutive root b=1: omega = S * lambda mod x^p,
        // error value = omega(Xinv) / lambda'(Xinv).
        let mut omega = vec![0u8; p];
        for (i, &s) in synd.iter().enumerate() {
            for (j, &c) in lambda.iter().enumerate() {
                if i + j < p {
                    omega[i + j] ^= f.mul(s, c);
                }
            }
        }
        let mut corrected = received.to_vec();
        for &i in &positions {
            let xinv = self.field.alpha_pow(self.field.order() - (self.n - 1 - i) % self.field.order());
            let num = omega.iter().rev().fold(0u8, |acc, &c| f.mul(acc, xinv) ^ c);
            // Formal derivative in characteristic 2: odd-degree terms only.
            let mut den = 0u8;
            for j in (1..=deg).step_by(2) {
                den ^= f.mul(lambda[j], self.field.pow(xinv, j - 1));
            }
            if den == 0 || num == 0 {
                return None;
            }
            corrected[i] ^= f.div(num, den);
        }
        if self.syndromes(&corrected).iter().any(|&s| s != 0) {
            return None;
        }
        Some(corrected)
    }
}
