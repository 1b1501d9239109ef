//! Systematic Reed-Solomon codes over GF(16) and GF(256).
//!
//! Codewords are symbol slices with the highest-degree coefficient first:
//! `k` data symbols followed by `n − k` parity symbols. The generator has
//! consecutive roots α¹ … α^(n−k). Codes with `n < 2^m − 1` are shortened.
//! Decoding is Berlekamp-Massey, Chien search and Forney.

use super::gf::GaloisField;
use super::PhyError;

#[derive(Debug, Clone)]
pub struct ReedSolomon {
    field: &'static GaloisField,
    n: usize,
    k: usize,
    /// Highest degree first, monic.
    generator: Vec<u16>,
}

/// Result of a successful decode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RsDecoded {
    pub data: Vec<u16>,
    /// Number of symbol errors corrected.
    pub corrected: usize,
}

impl ReedSolomon {
    pub fn new(field: &'static GaloisField, n: usize, k: usize) -> Result<Self, PhyError> {
        if k == 0 || k >= n || n > field.multiplicative_order() {
            return Err(PhyError::InvalidParameter(format!(
                "RS({n},{k}) needs 0 < k < n <= {}",
                field.multiplicative_order()
            )));
        }
        let mut generator = vec![1u16];
        for j in 1..=n - k {
            // multiply by (x + α^j)
            let root = field.alpha_pow(j);
            let mut next = vec![0u16; generator.len() + 1];
            for (i, &g) in generator.iter().enumerate() {
                next[i] ^= g;
                next[i + 1] ^= field.mul(g, root);
            }
            generator = next;
        }
        Ok(ReedSolomon {
            field,
            n,
            k,
            generator,
        })
    }

    /// RS(n, k) over GF(16).
    pub fn gf16(n: usize, k: usize) -> Result<Self, PhyError> {
        Self::new(GaloisField::gf16(), n, k)
    }

    /// RS(n, k) over GF(256).
    pub fn gf256(n: usize, k: usize) -> Result<Self, PhyError> {
        Self::new(GaloisField::gf256(), n, k)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn symbol_bits(&self) -> u32 {
        self.field.bits()
    }

    /// Correctable symbol errors per codeword, `⌊(n − k)/2⌋`.
    pub fn t(&self) -> usize {
        (self.n - self.k) / 2
    }

    fn check_symbols(&self, symbols: &[u16]) -> Result<(), PhyError> {
        let limit = 1u16 << self.field.bits();
        match symbols.iter().position(|&s| s >= limit) {
            Some(i) => Err(PhyError::InvalidParameter(format!(
                "symbol {} at {i} exceeds GF(2^{})",
                symbols[i],
                self.field.bits()
            ))),
            None => Ok(()),
        }
    }

    pub fn encode(&self, data: &[u16]) -> Result<Vec<u16>, PhyError> {
        if data.len() != self.k {
            return Err(PhyError::InvalidParameter(format!(
                "RS({},{}) encodes exactly {} symbols, got {}",
                self.n,
                self.k,
                self.k,
                data.len()
            )));
        }
        self.check_symbols(data)?;
        let nsym = self.n - self.k;
        let mut parity = vec![0u16; nsym];
        for &d in data {
            let feedback = d ^ parity[0];
            parity.rotate_left(1);
            parity[nsym - 1] = 0;
            if feedback != 0 {
                for (p, &g) in parity.iter_mut().zip(&self.generator[1..]) {
                    *p ^= self.field.mul(g, feedback);
                }
            }
        }
        let mut codeword = data.to_vec();
        codeword.extend_from_slice(&parity);
        Ok(codeword)
    }

    /// `S_j = c(α^j)` for `j = 1..=n−k`.
    pub fn syndromes(&self, codeword: &[u16]) -> Vec<u16> {
        (1..=self.n - self.k)
            .map(|j| self.field.eval(codeword, self.field.alpha_pow(j)))
            .collect()
    }

    pub fn decode(&self, codeword: &[u16]) -> Result<RsDecoded, PhyError> {
        if codeword.len() != self.n {
            return Err(PhyError::InvalidLength {
                multiple_of: self.n,
                got: codeword.len(),
            });
        }
        self.check_symbols(codeword)?;
        let synd = self.syndromes(codeword);
        if synd.iter().all(|&s| s == 0) {
            return Ok(RsDecoded {
                data: codeword[..self.k].to_vec(),
                corrected: 0,
            });
        }

        let f = self.field;
        let uncorrectable = PhyError::Uncorrectable { block: 0 };
        let locator = self.berlekamp_massey(&synd);
        let errors = locator.len() - 1;
        if errors == 0 || errors > self.t() {
            return Err(uncorrectable);
        }

        // Chien search over the (possibly shortened) codeword degrees.
        let positions: Vec<usize> = (0..self.n)
            .filter(|&degree| {
                let x_inv = f.inv(f.alpha_pow(degree));
                eval_low_first(f, &locator, x_inv) == 0
            })
            .collect();
        if positions.len() != errors {
            return Err(uncorrectable);
        }

        // Ω(x) = S(x) Λ(x) mod x^(n−k), lowest degree first.
        let nsym = synd.len();
        let mut omega = vec![0u16; nsym];
        for (i, &s) in synd.iter().enumerate() {
            for (j, &l) in locator.iter().enumerate() {
                if i + j < nsym {
                    omega[i + j] ^= f.mul(s, l);
                }
            }
        }
        let derivative: Vec<u16> = locator
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &l)| if i % 2 == 1 { l } else { 0 })
            .collect();

        let mut corrected = codeword.to_vec();
        for &degree in &positions {
            let x_inv = f.inv(f.alpha_pow(degree));
            let denom = eval_low_first(f, &derivative, x_inv);
            if denom == 0 {
                return Err(uncorrectable);
            }
            let magnitude = f.div(eval_low_first(f, &omega, x_inv), denom);
            corrected[self.n - 1 - degree] ^= magnitude;
        }
        if self.syndromes(&corrected).iter().any(|&s| s != 0) {
            return Err(uncorrectable);
        }
        corrected.truncate(self.k);
        Ok(RsDecoded {
            data: corrected,
            corrected: errors,
        })
    }

    /// Error-locator polynomial Λ(x), lowest degree first, trimmed.
    fn berlekamp_massey(&self, synd: &[u16]) -> Vec<u16> {
        let f = self.field;
        let mut lambda = vec![1u16];
        let mut prev = vec![1u16];
        let mut len = 0usize;
        let mut shift = 1usize;
        let mut prev_disc = 1u16;

        for r in 0..synd.len() {
            let mut d = synd[r];
            for i in 1..=len.min(lambda.len() - 1) {
                d ^= f.mul(lambda[i], synd[r - i]);
            }
            if d == 0 {
                shift += 1;
                continue;
            }
            let coef = f.div(d, prev_disc);
            let mut next = lambda.clone();
            if next.len() < prev.len() + shift {
                next.resize(prev.len() + shift, 0);
            }
            for (i, &p) in prev.iter().enumerate() {
                next[i + shift] ^= f.mul(coef, p);
            }
            if 2 * len <= r {
                prev = std::mem::replace(&mut lambda, next);
                len = r + 1 - len;
                prev_disc = d;
                shift = 1;
            } else {
                lambda = next;
                shift += 1;
            }
        }
        while lambda.len() > 1 && *lambda.last().unwrap_or(&1) == 0 {
            lambda.pop();
        }
        lambda
    }
}

fn eval_low_first(f: &GaloisField, poly: &[u16], x: u16) -> u16 {
    poly.iter().rev().fold(0, |acc, &c| f.mul(acc, x) ^ c)
}

/// Systematic RS(n, k) encode over GF(16).
pub fn rs_encode(data: &[u16], n: usize, k: usize) -> Result<Vec<u16>, PhyError> {
    ReedSolomon::gf16(n, k)?.encode(data)
}

/// RS(n, k) decode over GF(16), returning the data part.
pub fn rs_decode(codeword: &[u16], n: usize, k: usize) -> Result<Vec<u16>, PhyError> {
    ReedSolomon::gf16(n, k)?.decode(codeword).map(|d| d.data)
}
