//! Binary extension field GF(2^m) arithmetic over log/antilog tables.
//!
//! Elements are stored as `u8` (so 2 <= m <= 8). Addition is XOR;
//! multiplication goes through discrete-log tables built once per field
//! from the generator element 0x02, which the constructor verifies to be
//! primitive for the supplied field polynomial.

use crate::Error;

/// Field polynomial of GF(2^8): x^8 + x^4 + x^3 + x^2 + 1.
pub const GF256_POLY: u32 = 0x11D;
/// Field polynomial of GF(2^4): x^4 + x + 1. Used by desk-scale tests.
pub const GF16_POLY: u32 = 0x13;

/// A concrete GF(2^m) with precomputed exp/log tables.
#[derive(Debug, Clone)]
pub struct GfField {
    m: u32,
    poly: u32,
    order: usize,
    /// exp[i] = alpha^i for i in [0, 2*order); doubled to skip a modulo.
    exp: Vec<u8>,
    /// log[a] = discrete log of a, valid for a != 0.
    log: Vec<u8>,
}

impl GfField {
    /// Builds GF(2^m) under `poly` (must include the x^m term).
    ///
    /// Fails if m is outside [2, 8], the polynomial degree is not m, or
    /// 0x02 does not generate the full multiplicative group.
    pub fn new(m: u32, poly: u32) -> Result<Self, Error> {
        if !(2..=8).contains(&m) {
            return Err(Error::config(format!("field width m={m} outside [2, 8]")));
        }
        if poly >> m != 1 {
            return Err(Error::config(format!(
                "field polynomial {poly:#x} does not have degree {m}"
            )));
        }
        let order = (1usize << m) - 1;
        let mut exp = vec![0u8; 2 * order];
        let mut log = vec![0u8; 1 << m];
        let mut x = 1u32;
        for i in 0..order {
            if x == 1 && i > 0 {
                return Err(Error::config(format!(
                    "0x02 is not primitive under polynomial {poly:#x}"
                )));
            }
            exp[i] = x as u8;
            exp[order + i] = x as u8;
            log[x as usize] = i as u8;
            x <<= 1;
            if x >> m != 0 {
                x ^= poly;
            }
        }
        if x != 1 {
            return Err(Error::config(format!(
                "0x02 is not primitive under polynomial {poly:#x}"
            )));
        }
        Ok(GfField { m, poly, order, exp, log })
    }

    /// GF(2^8) under the 0x11D polynomial.
    pub fn gf256() -> Self {
        Self::new(8, GF256_POLY).expect("0x11D is a valid GF(2^8) polynomial")
    }

    /// GF(2^4) under the 0x13 polynomial.
    pub fn gf16() -> Self {
        Self::new(4, GF16_POLY).expect("0x13 is a valid GF(2^4) polynomial")
    }

    /// Symbol width m in bits.
    pub fn bits(&self) -> u32 {
        self.m
    }

    /// Multiplicative group order, 2^m - 1.
    pub fn order(&self) -> usize {
        self.order
    }

    /// The field polynomial.
    pub fn poly(&self) -> u32 {
        self.poly
    }

    /// Field addition (= subtraction): XOR.
    #[inline]
    pub fn add(a: u8, b: u8) -> u8 {
        a ^ b
    }

    /// Field multiplication.
    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        if a == 0 || b == 0 {
            0
        } else {
            self.exp[self.log[a as usize] as usize + self.log[b as usize] as usize]
        }
    }

    /// Multiplicative inverse. Panics on zero.
    #[inline]
    pub fn inv(&self, a: u8) -> u8 {
        assert!(a != 0, "zero has no multiplicative inverse");
        self.exp[self.order - self.log[a as usize] as usize]
    }

    /// Field division a / b. Panics when b is zero.
    #[inline]
    pub fn div(&self, a: u8, b: u8) -> u8 {
        assert!(b != 0, "division by zero");
        if a == 0 {
            0
        } else {
            // log a + (order - log b) < 2 * order, covered by the doubled table.
            let d = self.log[a as usize] as usize + self.order
                - self.log[b as usize] as usize;
            self.exp[d]
        }
    }

    /// alpha^i (exponent taken modulo the group order; i may exceed it).
    #[inline]
    pub fn alpha_pow(&self, i: usize) -> u8 {
        self.exp[i % self.order]
    }

    /// Discrete log of a nonzero element.
    #[inline]
    pub fn log(&self, a: u8) -> u8 {
        assert!(a != 0, "zero has no discrete log");
        self.log[a as usize]
    }

    /// a^e for arbitrary non-negative exponents.
    pub fn pow(&self, a: u8, e: usize) -> u8 {
        if a == 0 {
            return if e == 0 { 1 } else { 0 };
        }
        self.exp[(self.log[a as usize] as usize * e) % self.order]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Bitwise schoolbook multiply-and-reduce, independent of the tables.
    fn clmul_reduce(a: u8, b: u8, poly: u32, m: u32) -> u8 {
        let mut acc = 0u32;
        for i in 0..m {
            if (b >> i) & 1 == 1 {
                acc ^= (a as u32) << i;
            }
        }
        for i in (m..2 * m).rev() {
            if (acc >> i) & 1 == 1 {
                acc ^= poly << (i - m);
            }
        }
        acc as u8
    }

    #[test]
    fn table_mul_matches_schoolbook_oracle_exhaustively() {
        for (f, m, poly) in [(GfField::gf256(), 8u32, GF256_POLY), (GfField::gf16(), 4, GF16_POLY)]
        {
            let n = 1usize << m;
            for a in 0..n {
                for b in 0..n {
                    assert_eq!(
                        f.mul(a as u8, b as u8),
                        clmul_reduce(a as u8, b as u8, poly, m),
                        "mul mismatch at a={a:#x} b={b:#x} m={m}"
                    );
                }
            }
        }
    }

    #[test]
    fn zero_and_one_behave() {
        let f = GfField::gf256();
        for a in 0..=255u8 {
            assert_eq!(f.mul(0, a), 0);
            assert_eq!(f.mul(a, 0), 0);
            assert_eq!(f.mul(1, a), a);
            assert_eq!(f.mul(a, 1), a);
        }
    }

    #[test]
    fn spec_pair_matches_oracle() {
        let f = GfField::gf256();
        assert_eq!(f.mul(0x53, 0xCA), clmul_reduce(0x53, 0xCA, GF256_POLY, 8));
    }

    #[test]
    fn every_nonzero_element_has_inverse() {
        let f = GfField::gf256();
        for a in 1..=255u8 {
            let ai = f.inv(a);
            assert_eq!(f.mul(a, ai), 1, "a * a^-1 != 1 for a={a:#x}");
            assert_eq!(f.div(1, a), ai);
        }
    }

    #[test]
    fn generator_spans_group() {
        let f = GfField::gf256();
        let mut seen = [false; 256];
        for i in 0..255 {
            let v = f.alpha_pow(i);
            assert!(!seen[v as usize], "alpha^{i} repeats");
            seen[v as usize] = true;
        }
        assert!(!seen[0], "alpha power hit zero");
    }

    #[test]
    fn mul_commutes_exhaustively() {
        let f = GfField::gf256();
        for a in 0..=255u8 {
            for b in a..=255u8 {
                assert_eq!(f.mul(a, b), f.mul(b, a));
            }
        }
    }

    #[test]
    fn associativity_and_distributivity_sampled() {
        let f = GfField::gf256();
        // Small deterministic LCG; full triple product space is 2^24.
        let mut state = 0x2545F4914F6CDD1Du64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 33) as u8
        };
        for _ in 0..100_000 {
            let (a, b, c) = (next(), next(), next());
            assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
            assert_eq!(f.mul(a, b ^ c), f.mul(a, b) ^ f.mul(a, c));
        }
    }

    #[test]
    fn pow_and_div_are_consistent() {
        let f = GfField::gf16();
        for a in 1..16u8 {
            assert_eq!(f.pow(a, 15), 1, "a^order != 1 for a={a:#x}");
            for b in 1..16u8 {
                assert_eq!(f.mul(f.div(a, b), b), a);
            }
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(GfField::new(9, 0x211).is_err());
        assert!(GfField::new(8, 0x1D).is_err());
        // x^8 + x^4 + x^3 + x + 1 (0x11B) is irreducible but 0x02 has order 51.
        assert!(GfField::new(8, 0x11B).is_err());
    }
}
