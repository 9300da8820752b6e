//! Integer carriers for residues modulo `p^K`.
//!
//! Every p-adic computation in this crate is generic over a [`Residue`] type.
//! Two carriers are provided: `u64` (fast path, valid while the modulus stays
//! below [`FAST_MODULUS_LIMIT`]) and [`BigUint`] (arbitrary precision). Both
//! produce bit-identical results on every input where the fast path applies.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{FromPrimitive, Num, ToPrimitive};

/// Largest modulus the `u64` carrier accepts. Sums of two reduced residues
/// must not overflow, so the limit sits one bit below the word size.
pub const FAST_MODULUS_LIMIT: u64 = 1 << 62;

/// A nonnegative integer type able to hold residues modulo `p^K`.
pub trait Residue:
    Clone + Eq + Ord + Hash + Debug + Display + Send + Sync + Num + Integer + FromPrimitive + ToPrimitive + 'static
{
    /// `(self * rhs) mod m` for `self, rhs < m`.
    fn mul_mod(&self, rhs: &Self, m: &Self) -> Self;

    fn to_biguint(&self) -> BigUint;

    /// `None` when the value does not fit the carrier.
    fn from_biguint(v: &BigUint) -> Option<Self>;

    /// Whether the carrier can do modular arithmetic with this modulus.
    fn supports_modulus(m: &BigUint) -> bool;

    fn from_word(v: u64) -> Self {
        <Self as FromPrimitive>::from_u64(v).expect("u64 always fits a residue carrier")
    }

    /// `self mod p` for a machine-word `p`.
    fn rem_u64(&self, p: u64) -> u64;

    fn add_mod(&self, rhs: &Self, m: &Self) -> Self {
        let s = self.clone() + rhs.clone();
        if &s >= m {
            s - m.clone()
        } else {
            s
        }
    }

    fn sub_mod(&self, rhs: &Self, m: &Self) -> Self {
        if self >= rhs {
            self.clone() - rhs.clone()
        } else {
            m.clone() - (rhs.clone() - self.clone())
        }
    }

    fn neg_mod(&self, m: &Self) -> Self {
        if self.is_zero() {
            Self::zero()
        } else {
            m.clone() - self.clone()
        }
    }

    fn pow_mod(&self, mut exp: u64, m: &Self) -> Self {
        let mut base = self.clone() % m.clone();
        let mut acc = Self::one() % m.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul_mod(&base, m);
            }
            base = base.mul_mod(&base, m);
            exp >>= 1;
        }
        acc
    }
}

impl Residue for u64 {
    #[inline]
    fn mul_mod(&self, rhs: &Self, m: &Self) -> Self {
        ((*self as u128 * *rhs as u128) % *m as u128) as u64
    }

    fn to_biguint(&self) -> BigUint {
        BigUint::from(*self)
    }

    fn from_biguint(v: &BigUint) -> Option<Self> {
        v.to_u64()
    }

    fn supports_modulus(m: &BigUint) -> bool {
        m.to_u64().is_some_and(|m| m <= FAST_MODULUS_LIMIT)
    }

    #[inline]
    fn rem_u64(&self, p: u64) -> u64 {
        *self % p
    }

    #[inline]
    fn add_mod(&self, rhs: &Self, m: &Self) -> Self {
        let s = *self + *rhs;
        if s >= *m {
            s - *m
        } else {
            s
        }
    }
}

impl Residue for BigUint {
    fn mul_mod(&self, rhs: &Self, m: &Self) -> Self {
        (self * rhs) % m
    }

    fn to_biguint(&self) -> BigUint {
        self.clone()
    }

    fn from_biguint(v: &BigUint) -> Option<Self> {
        Some(v.clone())
    }

    fn supports_modulus(_m: &BigUint) -> bool {
        true
    }

    fn rem_u64(&self, p: u64) -> u64 {
        (self % p).to_u64().expect("remainder below a u64 modulus")
    }

    fn pow_mod(&self, exp: u64, m: &Self) -> Self {
        self.modpow(&BigUint::from(exp), m)
    }
}

/// Exact `p^k` as a [`BigUint`].
pub fn big_pow(p: u64, k: u32) -> BigUint {
    num_traits::pow(BigUint::from(p), k as usize)
}

/// Modular inverse of `a` modulo a machine-word `m` (`gcd(a, m) = 1`).
pub fn inv_mod_u64(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(m as i128) as u64)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut f = 3;
    while f * f <= n {
        if n % f == 0 {
            return false;
        }
        f += 2;
    }
    true
}

/// Odd primes `3 <= p <= max`, ascending.
pub fn odd_primes_up_to(max: u64) -> Vec<u64> {
    (3..=max).filter(|&q| is_prime(q)).collect()
}
