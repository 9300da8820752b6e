//! Exact rationals: floor, fractional part and p-adic integer lifts.

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::Signed;

use crate::padic::PadicContext;
use crate::residue::{inv_mod_u64, Residue};

pub type Frac = Ratio<i64>;

pub fn frac(num: i64, den: i64) -> Frac {
    Ratio::new(num, den)
}

/// `⌊x⌋`.
pub fn floor(x: &Frac) -> i64 {
    x.numer().div_floor(x.denom())
}

/// `⟨x⟩ = x - ⌊x⌋`, in `[0, 1)`.
pub fn fract(x: &Frac) -> Frac {
    x - Frac::from_integer(floor(x))
}

/// Whether `x` lies in `Z_p`, i.e. its reduced denominator is prime to `p`.
pub fn is_p_integral(x: &Frac, p: u64) -> bool {
    x.denom().unsigned_abs() % p != 0
}

/// The integer `m in [0, p^K)` with `m ≡ x (mod p^K)`; `None` if `p` divides the denominator.
pub fn lift<R: Residue>(ctx: &PadicContext<R>, x: &Frac) -> Option<R> {
    let p = ctx.p();
    let den = x.denom().unsigned_abs();
    if den % p == 0 {
        return None;
    }
    let m = ctx.modulus();
    let num = R::from_word(x.numer().unsigned_abs()) % m.clone();
    let num = if x.is_negative() { num.neg_mod(m) } else { num };
    // den^{-1} mod p^K: lift the inverse mod p with Newton steps.
    let d = R::from_word(den) % m.clone();
    let mut inv = R::from_word(inv_mod_u64(den % p, p)?) % m.clone();
    let two = R::from_word(2) % m.clone();
    let mut known = 1;
    while known < ctx.precision() {
        known *= 2;
        inv = inv.mul_mod(&two.sub_mod(&d.mul_mod(&inv, m), m), m);
    }
    Some(num.mul_mod(&inv, m))
}
