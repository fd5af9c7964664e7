//! Residue arithmetic in Z/p^k with a 128-bit kernel.
//!
//! Every coefficient in the crate is a `u128` residue. Products are reduced
//! by masking for powers of two and by Barrett reduction of the full 256-bit
//! product otherwise. Moduli are limited to 120 bits.

use crate::error::{Error, Result};

/// Largest modulus bit length handled by the kernel.
pub const MAX_MODULUS_BITS: u32 = 120;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Reduction {
    Mask,
    /// Barrett constant `floor(4^k / m)` with `k` the bit length of `m`.
    Barrett { mu: u128, k: u32 },
}

/// The ring Z/p^k.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Modulus {
    p: u64,
    digits: u32,
    m: u128,
    reduction: Reduction,
}

/// Largest `k` with `p^k` inside the kernel's range.
pub fn max_digits(p: u64) -> u32 {
    let mut k = 0u32;
    let mut acc: u128 = 1;
    loop {
        match acc.checked_mul(p as u128) {
            Some(next) if 128 - next.leading_zeros() <= MAX_MODULUS_BITS => {
                acc = next;
                k += 1;
            }
            _ => return k,
        }
    }
}

/// `p^k` as a `u128`, if it fits.
pub fn checked_pow(p: u64, k: u32) -> Option<u128> {
    (p as u128).checked_pow(k)
}

impl Modulus {
    pub fn new(p: u64, digits: i64) -> Result<Self> {
        if digits < 0 || digits > max_digits(p) as i64 {
            return Err(Error::ModulusOverflow { digits });
        }
        let digits = digits as u32;
        let m = (p as u128).pow(digits);
        let reduction = if p == 2 {
            Reduction::Mask
        } else {
            let k = 128 - m.leading_zeros();
            Reduction::Barrett {
                mu: barrett_mu(m, k),
                k,
            }
        };
        Ok(Modulus {
            p,
            digits,
            m,
            reduction,
        })
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn digits(&self) -> u32 {
        self.digits
    }

    #[inline]
    pub fn value(&self) -> u128 {
        self.m
    }

    #[inline]
    pub fn reduce(&self, x: u128) -> u128 {
        match self.reduction {
            Reduction::Mask => x & self.m.wrapping_sub(1),
            _ => x % self.m,
        }
    }

    /// Reduces a signed integer into `[0, m)`.
    pub fn from_i128(&self, x: i128) -> u128 {
        if self.m == 1 {
            return 0;
        }
        let r = self.reduce(x.unsigned_abs());
        if x < 0 {
            self.neg(r)
        } else {
            r
        }
    }

    #[inline]
    pub fn add(&self, a: u128, b: u128) -> u128 {
        let s = a + b;
        if s >= self.m {
            s - self.m
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u128, b: u128) -> u128 {
        if a >= b {
            a - b
        } else {
            a + self.m - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u128) -> u128 {
        if a == 0 {
            0
        } else {
            self.m - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u128, b: u128) -> u128 {
        match self.reduction {
            Reduction::Mask => a.wrapping_mul(b) & self.m.wrapping_sub(1),
            Reduction::Barrett { mu, k } => self.barrett(a, b, mu, k),
        }
    }

    /// `a*b + c`, all reduced.
    #[inline]
    pub fn mul_add(&self, a: u128, b: u128, c: u128) -> u128 {
        self.add(self.mul(a, b), c)
    }

    #[inline]
    fn barrett(&self, a: u128, b: u128, mu: u128, k: u32) -> u128 {
        let (hi, lo) = widening_mul(a, b);
        // q = ((t >> (k-1)) * mu) >> (k+1) underestimates t / m by at most 2.
        let q1 = shr256(hi, lo, k - 1);
        let (qh, ql) = widening_mul(q1, mu);
        let q = shr256(qh, ql, k + 1);
        let mut r = lo.wrapping_sub(q.wrapping_mul(self.m));
        while r >= self.m {
            r -= self.m;
        }
        r
    }

    /// Reference reduction of the 256-bit product by chunked remainders.
    #[cfg(test)]
    fn mul_chunked(&self, a: u128, b: u128) -> u128 {
        let (hi, lo) = widening_mul(a, b);
        let bits = 128 - self.m.leading_zeros();
        // r < m < 2^bits, so r << chunk stays below 2^127.
        let chunk = 127 - bits;
        let mut r = hi % self.m;
        let mut remaining = 128u32;
        while remaining > 0 {
            let take = chunk.min(remaining);
            remaining -= take;
            let piece = (lo >> remaining) & ((1u128 << take) - 1);
            r = ((r << take) | piece) % self.m;
        }
        r
    }

    pub fn pow(&self, mut base: u128, mut exp: u64) -> u128 {
        let mut acc = self.reduce(1);
        base = self.reduce(base);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Inverse of a unit, by Newton lifting from the inverse mod p.
    pub fn inv(&self, a: u128) -> Option<u128> {
        let a = self.reduce(a);
        if self.digits == 0 {
            return Some(0);
        }
        let a0 = (a % self.p as u128) as u64;
        if a0 == 0 {
            return None;
        }
        // Fermat inverse mod p, then x <- x(2 - a x) doubles the digit count.
        let mut x = pow_mod_u64(a0, self.p - 2, self.p) as u128;
        let mut known = 1u32;
        while known < self.digits {
            let ax = self.mul(a, x);
            x = self.mul(x, self.sub(self.reduce(2), ax));
            known *= 2;
        }
        Some(x)
    }

    /// p-adic valuation of a residue, `None` for zero.
    pub fn valuation(&self, a: u128) -> Option<u32> {
        let mut a = self.reduce(a);
        if a == 0 {
            return None;
        }
        let p = self.p as u128;
        let mut v = 0;
        while a.is_multiple_of(p) {
            a /= p;
            v += 1;
        }
        Some(v)
    }

    /// Symmetric representative in `(-m/2, m/2]`.
    pub fn signed(&self, a: u128) -> i128 {
        let a = self.reduce(a);
        if a > self.m / 2 {
            -((self.m - a) as i128)
        } else {
            a as i128
        }
    }
}

/// `floor(2^(2k) / m)` for `m` of bit length `k <= 120`.
fn barrett_mu(m: u128, k: u32) -> u128 {
    // long division of 2^(2k) by m, one bit at a time
    let mut q = 0u128;
    let mut r = 0u128;
    for i in (0..=2 * k).rev() {
        r <<= 1;
        if i == 2 * k {
            r |= 1;
        }
        q <<= 1;
        if r >= m {
            r -= m;
            q |= 1;
        }
    }
    q
}

#[inline]
fn shr256(hi: u128, lo: u128, s: u32) -> u128 {
    if s == 0 {
        lo
    } else if s < 128 {
        (lo >> s) | (hi << (128 - s))
    } else {
        hi >> (s - 128)
    }
}

fn pow_mod_u64(b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u128 % m as u128;
    let mut base = (b % m) as u128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m as u128;
        }
        base = base * base % m as u128;
        e >>= 1;
    }
    acc as u64
}

/// Full 256-bit product as `(hi, lo)`.
#[inline]
pub fn widening_mul(a: u128, b: u128) -> (u128, u128) {
    const MASK: u128 = u64::MAX as u128;
    let (a1, a0) = (a >> 64, a & MASK);
    let (b1, b0) = (b >> 64, b & MASK);
    let p00 = a0 * b0;
    let p01 = a0 * b1;
    let p10 = a1 * b0;
    let p11 = a1 * b1;
    let mid = (p00 >> 64) + (p01 & MASK) + (p10 & MASK);
    let lo = (p00 & MASK) | (mid << 64);
    let hi = p11 + (p01 >> 64) + (p10 >> 64) + (mid >> 64);
    (hi, lo)
}

/// Trial-division primality test; primes here are small.
pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}
