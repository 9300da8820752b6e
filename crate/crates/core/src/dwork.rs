//! Point counts on the Dwork hypersurface
//! `x_1^n + ... + x_n^n - n λ x_1 ... x_n = 0` in `P^{n-1}(F_p)`.
//!
//! The residue vectors `W` (entries in `[0, d)` summing to `0 mod d`) are
//! grouped into classes under shifts by multiples of `(1, ..., 1)`. Each class
//! has `d` members, so there are `d^{n-2}` classes. A class is represented by
//! a member containing a zero; among those, the one whose sorted entries are
//! smallest is used (ties broken lexicographically), so representatives of
//! permuted classes are permutations of each other.
//!
//! Four p-adic formulas are provided:
//! - [`main_value`]: a sum over classes of gamma prefactors times `ₛGₛ[A_w; B_w | λ^n]`.
//! - [`relprime_value`]: the single-class case `gcd(p-1, n) = 1`.
//! - [`ff_value`]: Gauss-sum prefactors times `ₘFₘ(A'; B' | λ^{-n})`, for `p ≡ 1 (mod n)`.
//! - [`koblitz_value`]: the character-sum formula over all of `W`, also valid at `λ = 0`.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_integer::Integer;
use rayon::prelude::*;
use thiserror::Error;

use crate::gauss::{gauss_gk, gk_product, CharExp, GaussError};
use crate::hyperfun::{eval_f, eval_g, FParams, GParams, HyperError};
use crate::padic::{PadicError, ValuedPadic};
use crate::pgamma::{GammaError, PadicGamma};
use crate::rational::{frac, Frac};
use crate::residue::{big_pow, inv_mod_u64, is_prime, Residue};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DworkError {
    #[error("p = {0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("n = {0} must be at least 2")]
    DegreeTooSmall(u64),
    #[error("p divides n: problem reduces to lambda=0 case (p = {p}, n = {n})")]
    PDividesN { p: u64, n: u64 },
    #[error("lambda = 0 is outside this formula; use the koblitz method")]
    LambdaZero,
    #[error("gcd(p-1, n) = {d}, but this formula needs gcd(p-1, n) = 1")]
    NotRelativelyPrime { d: u64 },
    #[error("p = {p} is not 1 mod n = {n}")]
    NotOneModN { p: u64, n: u64 },
    #[error("generator exponent {alpha} is not prime to p - 1 = {order}")]
    NotAGenerator { alpha: u64, order: u64 },
    #[error("vector {0:?} has no zero entry")]
    NoZeroEntry(Vec<u64>),
    #[error("internal consistency check failed: {0}")]
    Internal(String),
    #[error(transparent)]
    Padic(#[from] PadicError),
    #[error(transparent)]
    Gamma(#[from] GammaError),
    #[error(transparent)]
    Gauss(#[from] GaussError),
    #[error(transparent)]
    Hyper(#[from] HyperError),
}

/// A member of the Dwork family: prime `p`, degree `n`, parameter `λ mod p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DworkInstance {
    p: u64,
    n: u64,
    lambda: u64,
    d: u64,
    t: u64,
}

impl DworkInstance {
    /// `lambda` is reduced modulo `p`.
    pub fn new(p: u64, n: u64, lambda: i64) -> Result<Self, DworkError> {
        if p == 2 || !is_prime(p) {
            return Err(DworkError::NotOddPrime(p));
        }
        if n < 2 {
            return Err(DworkError::DegreeTooSmall(n));
        }
        if n % p == 0 {
            return Err(DworkError::PDividesN { p, n });
        }
        let d = (p - 1).gcd(&n);
        let lambda = lambda.rem_euclid(p as i64) as u64;
        Ok(DworkInstance { p, n, lambda, d, t: (p - 1) / d })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn lambda(&self) -> u64 {
        self.lambda
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    /// `(p^{n-1} - 1) / (p - 1)`, the number of points of `P^{n-2}`.
    pub fn hyperplane_count(&self) -> BigUint {
        (big_pow(self.p, self.n as u32 - 1) - 1u32) / (self.p - 1)
    }

    /// `(p^n - 1) / (p - 1)`, the number of points of `P^{n-1}`.
    pub fn point_bound(&self) -> BigUint {
        (big_pow(self.p, self.n as u32) - 1u32) / (self.p - 1)
    }

    /// `λ^n mod p`.
    pub fn g_argument(&self) -> u64 {
        self.lambda.pow_mod(self.n, &self.p)
    }
}

/// A vector in `W`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WVector(Vec<u64>);

impl WVector {
    pub fn new(entries: Vec<u64>, d: u64) -> Option<Self> {
        let ok = d > 0 && entries.iter().all(|&w| w < d) && entries.iter().sum::<u64>() % d == 0;
        ok.then_some(WVector(entries))
    }

    pub fn entries(&self) -> &[u64] {
        &self.0
    }

    pub fn has_zero(&self) -> bool {
        self.0.contains(&0)
    }

    /// `self + c (1, ..., 1) mod d`.
    pub fn shift(&self, c: u64, d: u64) -> WVector {
        WVector(self.0.iter().map(|w| (w + c) % d).collect())
    }

    fn signature(&self) -> (Vec<u64>, Vec<u64>) {
        let mut sorted = self.0.clone();
        sorted.sort_unstable();
        (sorted, self.0.clone())
    }
}

/// A class of `W` under diagonal shifts, with its chosen representative.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClassRep {
    pub wstar: WVector,
    pub orbit_size: usize,
}

/// All of `W` in lexicographic order; `d^{n-1}` vectors.
pub fn enumerate_w(n: u64, d: u64) -> Vec<WVector> {
    let n = n as usize;
    let mut out = Vec::with_capacity((d as usize).pow(n as u32 - 1));
    let mut prefix = vec![0u64; n - 1];
    loop {
        let partial: u64 = prefix.iter().sum();
        let mut w = prefix.clone();
        w.push((d - partial % d) % d);
        out.push(WVector(w));
        let mut i = n - 1;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            prefix[i] += 1;
            if prefix[i] < d {
                break;
            }
            prefix[i] = 0;
        }
    }
}

/// The shift orbit of `w`, in shift order.
pub fn orbit(w: &WVector, d: u64) -> Vec<WVector> {
    (0..d).map(|c| w.shift(c, d)).collect()
}

/// The representative of the class of `w`.
pub fn canonical_rep(w: &WVector, d: u64) -> WVector {
    orbit(w, d)
        .into_iter()
        .filter(WVector::has_zero)
        .min_by_key(WVector::signature)
        .expect("every orbit contains a vector with a zero entry")
}

/// One representative per class, ordered by representative.
pub fn canonical_classes(n: u64, d: u64) -> Vec<ClassRep> {
    let reps: BTreeSet<WVector> = enumerate_w(n, d).iter().map(|w| canonical_rep(w, d)).collect();
    reps.into_iter()
        .map(|wstar| {
            let orbit_size = orbit(&wstar, d).into_iter().collect::<BTreeSet<_>>().len();
            ClassRep { wstar, orbit_size }
        })
        .collect()
}

/// The hypergeometric data attached to a zero-containing vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamData {
    /// `n_k`: how often `k` occurs in `w`, for `k in [0, d)`.
    pub counts: Vec<usize>,
    /// `S_w`: the `k` with `n_k = 0`.
    pub missing: Vec<u64>,
    /// The complement of `S_w`.
    pub present: Vec<u64>,
    pub a: Vec<Frac>,
    pub b: Vec<Frac>,
    pub s: usize,
    /// `(Σ w_i) / d`.
    pub prefactor_exponent: u64,
}

pub fn derive_params(w: &WVector, n: u64, d: u64) -> Result<ParamData, DworkError> {
    if !w.has_zero() {
        return Err(DworkError::NoZeroEntry(w.0.clone()));
    }
    let mut counts = vec![0usize; d as usize];
    for &x in &w.0 {
        counts[x as usize] += 1;
    }
    let missing: Vec<u64> = (0..d).filter(|&k| counts[k as usize] == 0).collect();
    let present: Vec<u64> = (0..d).filter(|&k| counts[k as usize] > 0).collect();
    let step = n / d;
    let mut a: Vec<Frac> = missing.iter().map(|&k| frac((d - k) as i64, d as i64)).collect();
    a.extend((0..n).filter(|h| h % step != 0).map(|h| frac(h as i64, n as i64)));
    let mut b: Vec<Frac> = Vec::new();
    for &k in &present {
        for _ in 1..counts[k as usize] {
            b.push(frac((d - k) as i64, d as i64));
        }
    }
    a.sort();
    b.sort();
    let s = n as usize - present.len();
    if a.len() != s || b.len() != s {
        return Err(DworkError::Internal(format!("parameter lists of {w:?} have lengths {}, {}", a.len(), b.len())));
    }
    let prefactor_exponent = w.0.iter().sum::<u64>() / d;
    Ok(ParamData { counts, missing, present, a, b, s, prefactor_exponent })
}

/// Largest `s` over the classes of `(n, d)`.
pub fn max_param_len(n: u64, d: u64) -> usize {
    canonical_classes(n, d)
        .iter()
        .map(|c| derive_params(&c.wstar, n, d).map(|pd| pd.s).unwrap_or(0))
        .max()
        .unwrap_or(0)
}

/// Working-precision rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PrecisionPolicy {
    /// Digits added to the reconstruction target.
    pub extra_digits: u32,
    /// Compute only modulo `p^K` for this `K`, instead of the exact count.
    pub override_target: Option<u32>,
}

/// Smallest `K` with `p^K > 2 (p^n - 1)/(p - 1)`.
pub fn target_precision(p: u64, n: u64) -> u32 {
    let bound = (big_pow(p, n as u32) - 1u32) / (p - 1) * 2u32;
    let mut k = 1;
    while big_pow(p, k) <= bound {
        k += 1;
    }
    k
}

fn check_generator(inst: &DworkInstance, alpha: u64) -> Result<(), DworkError> {
    let order = inst.p - 1;
    if alpha.gcd(&order) != 1 {
        return Err(DworkError::NotAGenerator { alpha, order });
    }
    Ok(())
}

/// `(-p)^{Σw/d} ∏ Γ_p(w_i/d) · ₛGₛ[A_w; B_w | λ^n]` for a zero-containing `w`.
pub fn class_summand<R: Residue>(
    gamma: &PadicGamma<R>,
    inst: &DworkInstance,
    w: &WVector,
) -> Result<ValuedPadic<R>, DworkError> {
    let ctx = gamma.ctx();
    let pd = derive_params(w, inst.n, inst.d)?;
    let params = GParams::new(pd.a, pd.b)?;
    let g = eval_g(gamma, &params, inst.g_argument())?;
    let mut unit = ctx.unit_one();
    for &wi in w.entries() {
        unit = ctx.unit_mul(&unit, &gamma.gamma_rational(&frac(wi as i64, inst.d as i64))?);
    }
    Ok(ctx.mul_neg_p_power(&ctx.mul_unit(&g, &unit), pd.prefactor_exponent as i64))
}

/// The class-sum formula; `λ ≠ 0`.
pub fn main_value<R: Residue>(gamma: &PadicGamma<R>, inst: &DworkInstance) -> Result<ValuedPadic<R>, DworkError> {
    if inst.lambda == 0 {
        return Err(DworkError::LambdaZero);
    }
    let ctx = gamma.ctx();
    let classes = canonical_classes(inst.n, inst.d);
    let summands = classes
        .par_iter()
        .map(|c| class_summand(gamma, inst, &c.wstar))
        .collect::<Result<Vec<_>, _>>()?;
    let mut sum = summands.iter().fold(ValuedPadic::exact_zero(), |acc, v| ctx.add(&acc, v));
    if inst.n % 2 == 1 {
        sum = ctx.neg(&sum);
    }
    Ok(ctx.add(&ctx.from_biguint(&inst.hyperplane_count()), &sum))
}

/// The single-class formula with parameters `1/n, ..., (n-1)/n; 1, ..., 1`; needs `gcd(p-1, n) = 1`.
pub fn relprime_value<R: Residue>(gamma: &PadicGamma<R>, inst: &DworkInstance) -> Result<ValuedPadic<R>, DworkError> {
    if inst.d != 1 {
        return Err(DworkError::NotRelativelyPrime { d: inst.d });
    }
    if inst.lambda == 0 {
        return Err(DworkError::LambdaZero);
    }
    let ctx = gamma.ctx();
    let n = inst.n as i64;
    let params = GParams::new((1..n).map(|h| frac(h, n)).collect(), vec![frac(1, 1); n as usize - 1])?;
    let mut g = eval_g(gamma, &params, inst.g_argument())?;
    if inst.n % 2 == 1 {
        g = ctx.neg(&g);
    }
    Ok(ctx.add(&ctx.from_biguint(&inst.hyperplane_count()), &g))
}

/// The finite-field formula with `T = ω̄^alpha`; needs `p ≡ 1 (mod n)`.
pub fn ff_value<R: Residue>(
    gamma: &PadicGamma<R>,
    inst: &DworkInstance,
    alpha: u64,
) -> Result<ValuedPadic<R>, DworkError> {
    let p = inst.p;
    if (p - 1) % inst.n != 0 {
        return Err(DworkError::NotOneModN { p, n: inst.n });
    }
    if inst.lambda == 0 {
        return Err(DworkError::LambdaZero);
    }
    check_generator(inst, alpha)?;
    let ctx = gamma.ctx();
    let (n, t) = (inst.n, inst.t);
    let tc = |e: u64| CharExp::new((alpha * e % (p - 1)) as i64, p);
    let x = inv_mod_u64(inst.g_argument(), p).expect("λ^n is nonzero");
    let classes = canonical_classes(n, inst.d);
    let summands = classes
        .par_iter()
        .map(|c| -> Result<ValuedPadic<R>, DworkError> {
            let pd = derive_params(&c.wstar, n, inst.d)?;
            let pre = c
                .wstar
                .entries()
                .iter()
                .map(|&wi| Ok((gauss_gk(gamma, tc(wi * t))?, 1)))
                .collect::<Result<Vec<_>, DworkError>>()?;
            let pre = gk_product(ctx, &pre)?;
            let a: Vec<CharExp> = pd.missing.iter().map(|&k| tc((n - k) * t)).collect();
            let mut b = Vec::new();
            for &k in &pd.present {
                for _ in 1..pd.counts[k as usize] {
                    b.push(tc((n - k) * t));
                }
            }
            let f = eval_f(gamma, &FParams::new(a, b)?, x)?;
            Ok(ctx.mul(&pre, &f))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let sum = summands.iter().fold(ValuedPadic::exact_zero(), |acc, v| ctx.add(&acc, v));
    Ok(ctx.add(&ctx.from_biguint(&inst.hyperplane_count()), &sum))
}

/// The Gauss-sum formula over all of `W` with `T = ω̄^alpha`; valid for every `λ`.
pub fn koblitz_value<R: Residue>(
    gamma: &PadicGamma<R>,
    inst: &DworkInstance,
    alpha: u64,
) -> Result<ValuedPadic<R>, DworkError> {
    check_generator(inst, alpha)?;
    let ctx = gamma.ctx();
    let (p, n, t) = (inst.p, inst.n, inst.t);
    let tc = |e: u64| CharExp::new((alpha * (e % (p - 1)) % (p - 1)) as i64, p);
    let arg = (n % p) * inst.lambda % p;
    let ws = enumerate_w(n, inst.d);
    let terms = ws
        .par_iter()
        .map(|w| -> Result<ValuedPadic<R>, DworkError> {
            let e = w.entries();
            let mut acc = if e.iter().all(|&x| x == 0) {
                ctx.from_biguint(&inst.hyperplane_count())
            } else if e.iter().all(|&x| x != 0) {
                let factors = e
                    .iter()
                    .map(|&wi| Ok((gauss_gk(gamma, tc(wi * t))?, 1)))
                    .collect::<Result<Vec<_>, DworkError>>()?;
                let prod = gk_product(ctx, &factors)?;
                if prod.valuation().is_some_and(|v| v < 1) {
                    return Err(DworkError::Internal(format!("Gauss-sum product for {e:?} is not divisible by p")));
                }
                ctx.mul_p_power(&prod, -1)
            } else {
                ValuedPadic::exact_zero()
            };
            if arg == 0 {
                return Ok(acc);
            }
            let mut chars = ValuedPadic::exact_zero();
            for j in 0..t {
                let mut factors = e
                    .iter()
                    .map(|&wi| Ok((gauss_gk(gamma, tc(wi * t + j))?, 1)))
                    .collect::<Result<Vec<_>, DworkError>>()?;
                let nj = tc(n * j % (p - 1));
                factors.push((gauss_gk(gamma, nj)?, -1));
                let ratio = gk_product(ctx, &factors)?;
                chars = ctx.add(&chars, &ctx.mul(&ratio, &nj.eval(ctx, arg)));
            }
            acc = ctx.add(&acc, &ctx.mul(&chars, &ctx.from_rational(1, p as i64 - 1)?));
            Ok(acc)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(terms.iter().fold(ValuedPadic::exact_zero(), |acc, v| ctx.add(&acc, v)))
}
