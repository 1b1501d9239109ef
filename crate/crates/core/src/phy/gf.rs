//! Arithmetic in GF(2^m) for m = 4 and m = 8 via log/antilog tables.

use std::sync::OnceLock;

#[derive(Debug)]
pub struct GaloisField {
    bits: u32,
    order: usize,
    exp: Vec<u16>,
    log: Vec<u16>,
}

impl GaloisField {
    /// Builds the field from a primitive polynomial (including the `x^m`
    /// term), with generator α = 2.
    pub fn new(bits: u32, primitive_poly: u32) -> Self {
        let order = 1usize << bits;
        let mut exp = vec![0u16; 2 * order];
        let mut log = vec![0u16; order];
        let mut x: u32 = 1;
        for (i, e) in exp.iter_mut().enumerate().take(order - 1) {
            *e = x as u16;
            log[x as usize] = i as u16;
            x <<= 1;
            if x & order as u32 != 0 {
                x ^= primitive_poly;
            }
        }
        for i in order - 1..2 * order {
            exp[i] = exp[i - (order - 1)];
        }
        GaloisField {
            bits,
            order,
            exp,
            log,
        }
    }

    /// GF(16) with x^4 + x + 1.
    pub fn gf16() -> &'static GaloisField {
        static F: OnceLock<GaloisField> = OnceLock::new();
        F.get_or_init(|| GaloisField::new(4, 0b1_0011))
    }

    /// GF(256) with x^8 + x^4 + x^3 + x^2 + 1.
    pub fn gf256() -> &'static GaloisField {
        static F: OnceLock<GaloisField> = OnceLock::new();
        F.get_or_init(|| GaloisField::new(8, 0x11D))
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Number of nonzero elements, `2^m − 1`.
    pub fn multiplicative_order(&self) -> usize {
        self.order - 1
    }

    #[inline]
    pub fn mul(&self, a: u16, b: u16) -> u16 {
        if a == 0 || b == 0 {
            0
        } else {
            self.exp[self.log[a as usize] as usize + self.log[b as usize] as usize]
        }
    }

    #[inline]
    pub fn div(&self, a: u16, b: u16) -> u16 {
        assert!(b != 0, "division by zero in GF(2^{})", self.bits);
        if a == 0 {
            0
        } else {
            let n = self.order - 1;
            self.exp[(self.log[a as usize] as usize + n - self.log[b as usize] as usize) % n]
        }
    }

    #[inline]
    pub fn inv(&self, a: u16) -> u16 {
        self.div(1, a)
    }

    /// α^i for any non-negative exponent.
    #[inline]
    pub fn alpha_pow(&self, i: usize) -> u16 {
        self.exp[i % (self.order - 1)]
    }

    /// Evaluates a polynomial given highest-degree coefficient first.
    pub fn eval(&self, poly: &[u16], x: u16) -> u16 {
        poly.iter().fold(0, |acc, &c| self.mul(acc, x) ^ c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_axioms_gf16() {
        let f = GaloisField::gf16();
        for a in 1..16u16 {
            assert_eq!(f.mul(a, f.inv(a)), 1);
            for b in 1..16u16 {
                assert_eq!(f.div(f.mul(a, b), b), a);
                assert_eq!(f.mul(a, b), f.mul(b, a));
            }
        }
        // α generates all 15 nonzero elements
        let mut seen: Vec<u16> = (0..15).map(|i| f.alpha_pow(i)).collect();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), 15);
    }

    #[test]
    fn gf256_generator_is_primitive() {
        let f = GaloisField::gf256();
        let mut seen: Vec<u16> = (0..255).map(|i| f.alpha_pow(i)).collect();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), 255);
        assert_eq!(f.mul(0x53, f.inv(0x53)), 1);
    }
}
