//! Fixed-precision p-adic arithmetic.
//!
//! A [`PadicContext`] fixes an odd prime `p` and a working precision `K`
//! (number of p-adic digits). Units are residues modulo `p^K` that are not
//! divisible by `p`; general numbers are [`ValuedPadic`] values
//! `p^v * u` carrying the number of digits of `u` that are still meaningful.

use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::residue::{big_pow, inv_mod_u64, is_prime, Residue};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PadicError {
    #[error("p = {0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("working precision must be at least one digit")]
    ZeroPrecision,
    #[error("modulus {p}^{precision} does not fit the residue carrier")]
    ModulusTooLarge { p: u64, precision: u32 },
    #[error("{0} is divisible by p and is not a p-adic unit")]
    NotAUnit(String),
    #[error("teichmuller lift of a residue divisible by p is undefined")]
    TeichmullerOfZero,
    #[error("division by exact zero")]
    DivisionByZero,
    #[error("precision exhausted: value is only known to be zero modulo p^{0}")]
    PrecisionExhausted(i64),
    #[error("value has negative valuation {0} and is not a p-adic integer")]
    NotAnInteger(i64),
    #[error("value known modulo p^{available} only, which does not exceed the bound {bound}")]
    InsufficientPrecision { available: i64, bound: BigUint },
    #[error("no integer in [0, {bound}] matches the residue {residue}")]
    OutOfRange { residue: BigUint, bound: BigUint },
}

/// A p-adic unit stored as its residue modulo `p^K` of its context.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PadicUnit<R>(R);

impl<R: Residue> PadicUnit<R> {
    pub fn residue(&self) -> &R {
        &self.0
    }

    pub fn into_residue(self) -> R {
        self.0
    }
}

/// A p-adic number `p^valuation * unit`.
///
/// `unit` is reduced modulo `p^relative_precision` and is never divisible by
/// `p`. Zero is a separate state: either exact, or known to vanish only
/// modulo `p^absolute_precision` after cancellation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ValuedPadic<R> {
    Zero { absolute_precision: Option<i64> },
    Nonzero { valuation: i64, unit: R, relative_precision: u32 },
}

impl<R: Residue> ValuedPadic<R> {
    pub fn exact_zero() -> Self {
        ValuedPadic::Zero { absolute_precision: None }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ValuedPadic::Zero { .. })
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self, ValuedPadic::Zero { absolute_precision: None })
    }

    pub fn valuation(&self) -> Option<i64> {
        match self {
            ValuedPadic::Nonzero { valuation, .. } => Some(*valuation),
            ValuedPadic::Zero { .. } => None,
        }
    }

    pub fn unit(&self) -> Option<&R> {
        match self {
            ValuedPadic::Nonzero { unit, .. } => Some(unit),
            ValuedPadic::Zero { .. } => None,
        }
    }

    /// Digits of the value that are known, `None` for exact zero.
    pub fn absolute_precision(&self) -> Option<i64> {
        match self {
            ValuedPadic::Zero { absolute_precision } => *absolute_precision,
            ValuedPadic::Nonzero { valuation, relative_precision, .. } => {
                Some(valuation + *relative_precision as i64)
            }
        }
    }

    /// Valuation is nonnegative, or the value is a zero.
    pub fn is_integral(&self) -> bool {
        self.valuation().is_none_or(|v| v >= 0)
    }
}

/// Teichmüller representatives of `1..p` modulo `p^K`.
#[derive(Debug, Clone)]
pub struct TeichmullerTable<R> {
    p: u64,
    precision: u32,
    lifts: Vec<PadicUnit<R>>,
}

impl<R: Residue> TeichmullerTable<R> {
    /// Lift of `x mod p`; `None` for `x ≡ 0`.
    pub fn get(&self, x: u64) -> Option<&PadicUnit<R>> {
        let x = x % self.p;
        (x != 0).then(|| &self.lifts[(x - 1) as usize])
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }
}

/// Arithmetic context for `Z_p` truncated to `K` digits.
#[derive(Debug)]
pub struct PadicContext<R> {
    p: u64,
    precision: u32,
    powers: Vec<R>,
    teichmuller: OnceLock<TeichmullerTable<R>>,
}

impl<R: Residue> PadicContext<R> {
    pub fn new(p: u64, precision: u32) -> Result<Self, PadicError> {
        if p == 2 || !is_prime(p) {
            return Err(PadicError::NotOddPrime(p));
        }
        if precision == 0 {
            return Err(PadicError::ZeroPrecision);
        }
        if !R::supports_modulus(&big_pow(p, precision)) {
            return Err(PadicError::ModulusTooLarge { p, precision });
        }
        let pr = R::from_word(p);
        let mut powers = Vec::with_capacity(precision as usize + 1);
        powers.push(R::one());
        for k in 0..precision as usize {
            powers.push(powers[k].clone() * pr.clone());
        }
        Ok(PadicContext { p, precision, powers, teichmuller: OnceLock::new() })
    }

    /// Whether this carrier can host `p^precision` without overflow.
    pub fn fits(p: u64, precision: u32) -> bool {
        R::supports_modulus(&big_pow(p, precision))
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// `p^K`.
    pub fn modulus(&self) -> &R {
        &self.powers[self.precision as usize]
    }

    /// `p^k` for `k <= K`.
    pub fn power(&self, k: u32) -> &R {
        &self.powers[k as usize]
    }

    // ---- units -------------------------------------------------------

    pub fn unit(&self, residue: R) -> Result<PadicUnit<R>, PadicError> {
        let r = residue % self.modulus().clone();
        if r.rem_u64(self.p) == 0 {
            return Err(PadicError::NotAUnit(r.to_string()));
        }
        Ok(PadicUnit(r))
    }

    pub fn unit_from_i64(&self, v: i64) -> Result<PadicUnit<R>, PadicError> {
        let r = self.reduce_i64(v);
        self.unit(r)
    }

    pub fn unit_one(&self) -> PadicUnit<R> {
        PadicUnit(R::one())
    }

    pub fn unit_minus_one(&self) -> PadicUnit<R> {
        PadicUnit(self.modulus().clone() - R::one())
    }

    pub fn unit_mul(&self, a: &PadicUnit<R>, b: &PadicUnit<R>) -> PadicUnit<R> {
        PadicUnit(a.0.mul_mod(&b.0, self.modulus()))
    }

    pub fn unit_neg(&self, a: &PadicUnit<R>) -> PadicUnit<R> {
        PadicUnit(a.0.neg_mod(self.modulus()))
    }

    pub fn unit_inv(&self, a: &PadicUnit<R>) -> PadicUnit<R> {
        PadicUnit(self.inverse_mod_power(&a.0, self.precision))
    }

    pub fn unit_pow(&self, a: &PadicUnit<R>, exp: i64) -> PadicUnit<R> {
        let base = if exp < 0 { self.unit_inv(a) } else { a.clone() };
        PadicUnit(base.0.pow_mod(exp.unsigned_abs(), self.modulus()))
    }

    /// `(-1)^e` as a unit.
    pub fn sign_unit(&self, e: i64) -> PadicUnit<R> {
        if e.rem_euclid(2) == 0 {
            self.unit_one()
        } else {
            self.unit_minus_one()
        }
    }

    /// Inverse of a unit residue modulo `p^k`, by Newton lifting from `mod p`.
    fn inverse_mod_power(&self, u: &R, k: u32) -> R {
        let m = self.power(k);
        let u = u.clone() % m.clone();
        let inv_p = inv_mod_u64(u.rem_u64(self.p), self.p).expect("unit residue is invertible mod p");
        let mut x = R::from_word(inv_p) % m.clone();
        let two = R::from_word(2) % m.clone();
        let mut known = 1u32;
        while known < k {
            known = (known * 2).min(k);
            let ux = u.mul_mod(&x, m);
            x = x.mul_mod(&two.sub_mod(&ux, m), m);
        }
        x
    }

    fn reduce_i64(&self, v: i64) -> R {
        let m = self.modulus();
        let r = R::from_word(v.unsigned_abs()) % m.clone();
        if v < 0 {
            r.neg_mod(m)
        } else {
            r
        }
    }

    // ---- Teichmüller -------------------------------------------------

    /// Teichmüller lift of `x mod p`, computed as `x^(p^(K-1)) mod p^K`.
    pub fn teichmuller(&self, x: u64) -> Result<PadicUnit<R>, PadicError> {
        let x = x % self.p;
        if x == 0 {
            return Err(PadicError::TeichmullerOfZero);
        }
        let m = self.modulus();
        let mut t = R::from_word(x) % m.clone();
        for _ in 1..self.precision {
            t = t.pow_mod(self.p, m);
        }
        Ok(PadicUnit(t))
    }

    /// Teichmüller lift by Newton iteration on `t^(p-1) - 1`.
    pub fn teichmuller_hensel(&self, x: u64) -> Result<PadicUnit<R>, PadicError> {
        let x = x % self.p;
        if x == 0 {
            return Err(PadicError::TeichmullerOfZero);
        }
        let m = self.modulus();
        let pm1 = R::from_word(self.p - 1);
        let mut t = R::from_word(x) % m.clone();
        let mut known = 1u32;
        while known < self.precision {
            known = (known * 2).min(self.precision);
            let t_pm2 = t.pow_mod(self.p - 2, m);
            let f = t_pm2.mul_mod(&t, m).sub_mod(&R::one(), m);
            let df = pm1.mul_mod(&t_pm2, m);
            let step = f.mul_mod(&self.inverse_mod_power(&df, self.precision), m);
            t = t.sub_mod(&step, m);
        }
        Ok(PadicUnit(t))
    }

    pub fn teichmuller_table(&self) -> &TeichmullerTable<R> {
        self.teichmuller.get_or_init(|| TeichmullerTable {
            p: self.p,
            precision: self.precision,
            lifts: (1..self.p)
                .map(|x| self.teichmuller(x).expect("nonzero residue"))
                .collect(),
        })
    }

    /// `ω̄^j(x)` as a unit, `None` when `x ≡ 0 (mod p)`.
    pub fn char_unit(&self, j: i64, x: u64) -> Option<PadicUnit<R>> {
        let t = self.teichmuller_table().get(x)?;
        let e = (-j).rem_euclid(self.p as i64 - 1) as u64;
        Some(PadicUnit(t.0.pow_mod(e, self.modulus())))
    }

    /// `ω̄^j(x)`, extended by `χ(0) = 0` for every character.
    pub fn char_value(&self, j: i64, x: u64) -> ValuedPadic<R> {
        match self.char_unit(j, x) {
            Some(u) => self.from_unit(&u),
            None => ValuedPadic::exact_zero(),
        }
    }

    // ---- valued numbers ----------------------------------------------

    pub fn one(&self) -> ValuedPadic<R> {
        self.from_unit(&self.unit_one())
    }

    pub fn from_unit(&self, u: &PadicUnit<R>) -> ValuedPadic<R> {
        ValuedPadic::Nonzero { valuation: 0, unit: u.0.clone(), relative_precision: self.precision }
    }

    pub fn from_i64(&self, v: i64) -> ValuedPadic<R> {
        if v == 0 {
            return ValuedPadic::exact_zero();
        }
        let (mut a, mut val) = (v.unsigned_abs(), 0i64);
        while a % self.p == 0 {
            a /= self.p;
            val += 1;
        }
        let mut unit = R::from_word(a) % self.modulus().clone();
        if v < 0 {
            unit = unit.neg_mod(self.modulus());
        }
        ValuedPadic::Nonzero { valuation: val, unit, relative_precision: self.precision }
    }

    pub fn from_biguint(&self, v: &BigUint) -> ValuedPadic<R> {
        if v.is_zero() {
            return ValuedPadic::exact_zero();
        }
        let mut a = v.clone();
        let mut val = 0i64;
        while (&a % self.p).is_zero() {
            a /= self.p;
            val += 1;
        }
        let a = a % big_pow(self.p, self.precision);
        let unit = R::from_biguint(&a).expect("reduced residue fits the carrier");
        ValuedPadic::Nonzero { valuation: val, unit, relative_precision: self.precision }
    }

    /// `num / den` for a nonzero denominator.
    pub fn from_rational(&self, num: i64, den: i64) -> Result<ValuedPadic<R>, PadicError> {
        if den == 0 {
            return Err(PadicError::DivisionByZero);
        }
        let n = self.from_i64(num);
        let d = self.from_i64(den);
        Ok(self.mul(&n, &self.inv(&d)?))
    }

    pub fn neg(&self, a: &ValuedPadic<R>) -> ValuedPadic<R> {
        match a {
            ValuedPadic::Zero { .. } => a.clone(),
            ValuedPadic::Nonzero { valuation, unit, relative_precision } => ValuedPadic::Nonzero {
                valuation: *valuation,
                unit: unit.neg_mod(self.power(*relative_precision)),
                relative_precision: *relative_precision,
            },
        }
    }

    pub fn add(&self, a: &ValuedPadic<R>, b: &ValuedPadic<R>) -> ValuedPadic<R> {
        use ValuedPadic::*;
        let (va, ua, ra, vb, ub, rb) = match (a, b) {
            (Zero { absolute_precision: None }, _) => return b.clone(),
            (_, Zero { absolute_precision: None }) => return a.clone(),
            (Zero { absolute_precision: Some(x) }, Zero { absolute_precision: Some(y) }) => {
                return Zero { absolute_precision: Some(*x.min(y)) }
            }
            (Zero { absolute_precision: Some(z) }, Nonzero { valuation, unit, relative_precision })
            | (Nonzero { valuation, unit, relative_precision }, Zero { absolute_precision: Some(z) }) => {
                return self.truncate(*valuation, unit, *relative_precision, *z)
            }
            (
                Nonzero { valuation: va, unit: ua, relative_precision: ra },
                Nonzero { valuation: vb, unit: ub, relative_precision: rb },
            ) => (*va, ua, *ra, *vb, ub, *rb),
        };
        let abs = (va + ra as i64).min(vb + rb as i64);
        let v = va.min(vb);
        // abs > v always: the operand with valuation v has abs >= v + 1.
        let rel0 = (abs - v) as u32;
        let m = self.power(rel0);
        let shift = |u: &R, dv: i64| -> R {
            if dv >= rel0 as i64 {
                R::zero()
            } else {
                (u.clone() % m.clone()).mul_mod(self.power(dv as u32), m)
            }
        };
        let s = shift(ua, va - v).add_mod(&shift(ub, vb - v), m);
        self.normalize(v, s, rel0)
    }

    pub fn sub(&self, a: &ValuedPadic<R>, b: &ValuedPadic<R>) -> ValuedPadic<R> {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &ValuedPadic<R>, b: &ValuedPadic<R>) -> ValuedPadic<R> {
        use ValuedPadic::*;
        match (a, b) {
            (Zero { absolute_precision: None }, _) | (_, Zero { absolute_precision: None }) => {
                ValuedPadic::exact_zero()
            }
            (Zero { absolute_precision: Some(x) }, Zero { absolute_precision: Some(y) }) => {
                Zero { absolute_precision: Some(x + y) }
            }
            (Zero { absolute_precision: Some(z) }, Nonzero { valuation, .. })
            | (Nonzero { valuation, .. }, Zero { absolute_precision: Some(z) }) => {
                Zero { absolute_precision: Some(z + valuation) }
            }
            (
                Nonzero { valuation: va, unit: ua, relative_precision: ra },
                Nonzero { valuation: vb, unit: ub, relative_precision: rb },
            ) => {
                let rel = (*ra).min(*rb);
                let m = self.power(rel);
                let ua = ua.clone() % m.clone();
                let ub = ub.clone() % m.clone();
                Nonzero { valuation: va + vb, unit: ua.mul_mod(&ub, m), relative_precision: rel }
            }
        }
    }

    pub fn mul_unit(&self, a: &ValuedPadic<R>, u: &PadicUnit<R>) -> ValuedPadic<R> {
        match a {
            ValuedPadic::Zero { .. } => a.clone(),
            ValuedPadic::Nonzero { valuation, unit, relative_precision } => {
                let m = self.power(*relative_precision);
                ValuedPadic::Nonzero {
                    valuation: *valuation,
                    unit: unit.mul_mod(&(u.0.clone() % m.clone()), m),
                    relative_precision: *relative_precision,
                }
            }
        }
    }

    /// Multiply by `p^e`.
    pub fn mul_p_power(&self, a: &ValuedPadic<R>, e: i64) -> ValuedPadic<R> {
        match a {
            ValuedPadic::Zero { absolute_precision } => {
                ValuedPadic::Zero { absolute_precision: absolute_precision.map(|z| z + e) }
            }
            ValuedPadic::Nonzero { valuation, unit, relative_precision } => ValuedPadic::Nonzero {
                valuation: valuation + e,
                unit: unit.clone(),
                relative_precision: *relative_precision,
            },
        }
    }

    /// Multiply by `(-p)^e`.
    pub fn mul_neg_p_power(&self, a: &ValuedPadic<R>, e: i64) -> ValuedPadic<R> {
        let shifted = self.mul_p_power(a, e);
        if e.rem_euclid(2) == 1 {
            self.neg(&shifted)
        } else {
            shifted
        }
    }

    pub fn inv(&self, a: &ValuedPadic<R>) -> Result<ValuedPadic<R>, PadicError> {
        match a {
            ValuedPadic::Zero { absolute_precision: None } => Err(PadicError::DivisionByZero),
            ValuedPadic::Zero { absolute_precision: Some(z) } => Err(PadicError::PrecisionExhausted(*z)),
            ValuedPadic::Nonzero { valuation, unit, relative_precision } => Ok(ValuedPadic::Nonzero {
                valuation: -valuation,
                unit: self.inverse_mod_power(unit, *relative_precision),
                relative_precision: *relative_precision,
            }),
        }
    }

    pub fn div(&self, a: &ValuedPadic<R>, b: &ValuedPadic<R>) -> Result<ValuedPadic<R>, PadicError> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    pub fn pow(&self, a: &ValuedPadic<R>, exp: i64) -> Result<ValuedPadic<R>, PadicError> {
        if exp == 0 {
            return Ok(self.one());
        }
        let base = if exp < 0 { self.inv(a)? } else { a.clone() };
        Ok(match &base {
            ValuedPadic::Zero { absolute_precision } => ValuedPadic::Zero {
                absolute_precision: absolute_precision.map(|z| z * exp.abs()),
            },
            ValuedPadic::Nonzero { valuation, unit, relative_precision } => ValuedPadic::Nonzero {
                valuation: valuation * exp.abs(),
                unit: unit.pow_mod(exp.unsigned_abs(), self.power(*relative_precision)),
                relative_precision: *relative_precision,
            },
        })
    }

    /// `a - b` vanishes to the precision both operands carry.
    pub fn congruent(&self, a: &ValuedPadic<R>, b: &ValuedPadic<R>) -> bool {
        self.sub(a, b).is_zero()
    }

    /// The unique integer in `[0, bound]` congruent to `x` modulo its absolute precision.
    pub fn reconstruct_integer(&self, x: &ValuedPadic<R>, bound: &BigUint) -> Result<BigUint, PadicError> {
        let (residue, available) = match x {
            ValuedPadic::Zero { absolute_precision: None } => return Ok(BigUint::zero()),
            ValuedPadic::Zero { absolute_precision: Some(z) } => (BigUint::zero(), *z),
            ValuedPadic::Nonzero { valuation, unit, relative_precision } => {
                if *valuation < 0 {
                    return Err(PadicError::NotAnInteger(*valuation));
                }
                let r = unit.to_biguint() * big_pow(self.p, *valuation as u32);
                (r, valuation + *relative_precision as i64)
            }
        };
        if available < 0 || big_pow(self.p, available as u32) <= *bound {
            return Err(PadicError::InsufficientPrecision { available, bound: bound.clone() });
        }
        if residue <= *bound {
            Ok(residue)
        } else {
            Err(PadicError::OutOfRange { residue, bound: bound.clone() })
        }
    }

    /// `x mod p^k` for an integral `x` known to at least `k` digits.
    pub fn residue_mod_power(&self, x: &ValuedPadic<R>, k: u32) -> Result<BigUint, PadicError> {
        let modulus = big_pow(self.p, k);
        let (residue, available) = match x {
            ValuedPadic::Zero { absolute_precision: None } => return Ok(BigUint::zero()),
            ValuedPadic::Zero { absolute_precision: Some(z) } => (BigUint::zero(), *z),
            ValuedPadic::Nonzero { valuation, unit, relative_precision } => {
                if *valuation < 0 {
                    return Err(PadicError::NotAnInteger(*valuation));
                }
                let shift = (*valuation).min(k as i64) as u32;
                (unit.to_biguint() * big_pow(self.p, shift), valuation + *relative_precision as i64)
            }
        };
        if available < k as i64 {
            return Err(PadicError::InsufficientPrecision { available, bound: modulus - BigUint::one() });
        }
        Ok(residue % modulus)
    }

    /// Base-`p` digits of a unit residue, least significant first.
    pub fn digits(&self, x: &R, count: u32) -> Vec<u64> {
        let mut rest = x.to_biguint();
        (0..count)
            .map(|_| {
                let d = (&rest % self.p).to_u64().expect("digit below p");
                rest /= self.p;
                d
            })
            .collect()
    }

    fn truncate(&self, v: i64, unit: &R, rel: u32, abs: i64) -> ValuedPadic<R> {
        if abs <= v {
            return ValuedPadic::Zero { absolute_precision: Some(abs) };
        }
        let rel = rel.min((abs - v) as u32);
        ValuedPadic::Nonzero {
            valuation: v,
            unit: unit.clone() % self.power(rel).clone(),
            relative_precision: rel,
        }
    }

    fn normalize(&self, v: i64, s: R, rel0: u32) -> ValuedPadic<R> {
        if s.is_zero() {
            return ValuedPadic::Zero { absolute_precision: Some(v + rel0 as i64) };
        }
        let pr = R::from_word(self.p);
        let (mut s, mut e) = (s, 0u32);
        while s.rem_u64(self.p) == 0 {
            s = s / pr.clone();
            e += 1;
        }
        ValuedPadic::Nonzero { valuation: v + e as i64, unit: s, relative_precision: rel0 - e }
    }
}
