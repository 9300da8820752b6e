//! Morita's p-adic gamma function.
//!
//! `Γ_p(m) = (-1)^m ∏_{0<j<m, p∤j} j` on nonnegative integers, extended by
//! continuity to `Z_p`. Since `Γ_p(x + p^K) ≡ Γ_p(x) (mod p^K)` for odd `p`,
//! any argument in `Q ∩ Z_p` is evaluated at its integer lift in `[0, p^K)`.
//!
//! Two evaluation paths exist and agree bit for bit:
//!
//! * [`batch_pgamma`] runs the defining recurrence in one sweep. Its cost is
//!   linear in the largest lift, so it is limited to [`SWEEP_LIMIT`].
//! * [`PadicGamma`] splits `[0, m)` into base-`p` blocks. The product of the
//!   p-free integers in the block `[a p^L, (a+1) p^L)` is a polynomial in `a`
//!   whose `a^k` coefficient is divisible by `p^k`, so truncating it to degree
//!   `K` is exact modulo `p^K`. Partial products of these blocks are tabulated
//!   once per `(p, K)` in `O(p K^3)`; one evaluation then costs `O(K^2)`.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use thiserror::Error;

use crate::padic::{PadicContext, PadicError, PadicUnit};
use crate::rational::{frac, lift, Frac};
use crate::residue::Residue;

/// Largest lift the recurrence sweep will walk to.
pub const SWEEP_LIMIT: u64 = 1 << 26;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GammaError {
    #[error("lift {lift} is not below p^K = {modulus}")]
    OutOfRange { lift: String, modulus: String },
    #[error("argument {0} has a denominator divisible by p")]
    NotIntegral(String),
    #[error("fraction numerator {r} outside [0, {max}]")]
    BadFracArg { r: u64, max: u64 },
    #[error("lifts passed to a sweep must be sorted ascending")]
    UnsortedLifts,
    #[error("sweep up to {0} exceeds the sweep limit")]
    SweepTooLong(String),
    #[error(transparent)]
    Padic(#[from] PadicError),
}

/// The rational `r / (p - 1)` with `0 <= r <= p - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FracArg {
    r: u64,
    p: u64,
}

impl FracArg {
    pub fn new(r: u64, p: u64) -> Result<Self, GammaError> {
        if r > p - 1 {
            return Err(GammaError::BadFracArg { r, max: p - 1 });
        }
        Ok(FracArg { r, p })
    }

    pub fn numerator(&self) -> u64 {
        self.r
    }

    pub fn value(&self) -> Frac {
        frac(self.r as i64, self.p as i64 - 1)
    }
}

/// The `m in [0, p^K)` with `m (p - 1) ≡ r (mod p^K)`.
pub fn lift_frac<R: Residue>(ctx: &PadicContext<R>, r: FracArg) -> R {
    lift(ctx, &r.value()).expect("p - 1 is prime to p")
}

/// `Γ_p` at every lift of a sorted list, in one recurrence sweep.
pub fn batch_pgamma<R: Residue>(ctx: &PadicContext<R>, lifts: &[R]) -> Result<Vec<PadicUnit<R>>, GammaError> {
    if lifts.windows(2).any(|w| w[0] > w[1]) {
        return Err(GammaError::UnsortedLifts);
    }
    let modulus = ctx.modulus();
    let Some(last) = lifts.last() else {
        return Ok(Vec::new());
    };
    if last >= modulus {
        return Err(GammaError::OutOfRange { lift: last.to_string(), modulus: modulus.to_string() });
    }
    let end = match last.to_u64() {
        Some(e) if e <= SWEEP_LIMIT => e,
        _ => return Err(GammaError::SweepTooLong(last.to_string())),
    };
    let p = ctx.p();
    let mut out = Vec::with_capacity(lifts.len());
    let mut next = lifts.iter().peekable();
    let mut g = R::one();
    for m in 0..=end {
        let mr = R::from_word(m);
        while next.peek().is_some_and(|&l| *l == mr) {
            out.push(ctx.unit(g.clone())?);
            next.next();
        }
        if m % p != 0 {
            g = g.mul_mod(&mr, modulus);
        }
        g = g.neg_mod(modulus);
    }
    Ok(out)
}

/// Block-polynomial evaluator for `Γ_p` modulo `p^K`, with a memo of every
/// value it has produced.
#[derive(Debug)]
pub struct PadicGamma<R> {
    ctx: Arc<PadicContext<R>>,
    // partials[L][c]: coefficients, as a polynomial in a of degree < K, of the
    // product of the p-free integers in [p a p^L, (p a + c) p^L).
    partials: Vec<Vec<Vec<R>>>,
    memo: RwLock<HashMap<R, R>>,
}

impl<R: Residue> PadicGamma<R> {
    pub fn new(ctx: Arc<PadicContext<R>>) -> Self {
        let k = ctx.precision() as usize;
        let p = ctx.p();
        let m = ctx.modulus().clone();
        let pr = R::from_word(p) % m.clone();
        let mut one = vec![R::zero(); k];
        one[0] = R::one() % m.clone();
        let mut partials = Vec::with_capacity(k);
        let mut row = Vec::with_capacity(p as usize);
        let mut cur = one.clone();
        for c in 0..p {
            row.push(cur.clone());
            if c > 0 {
                cur = poly_mul_trunc(&cur, &[R::from_word(c) % m.clone(), pr.clone()], k, &m);
            }
        }
        partials.push(row);
        for _ in 1..k {
            // cur is the full block product of the previous level
            let block = std::mem::replace(&mut cur, one.clone());
            let mut row = Vec::with_capacity(p as usize);
            for c in 0..p {
                row.push(cur.clone());
                let shifted = taylor_shift(&block, &(R::from_word(c) % m.clone()), &m);
                let scaled: Vec<R> =
                    shifted.iter().enumerate().map(|(deg, x)| x.mul_mod(ctx.power(deg as u32), &m)).collect();
                cur = poly_mul_trunc(&cur, &scaled, k, &m);
            }
            partials.push(row);
        }
        PadicGamma { ctx, partials, memo: RwLock::new(HashMap::new()) }
    }

    pub fn ctx(&self) -> &Arc<PadicContext<R>> {
        &self.ctx
    }

    /// `Γ_p(m) mod p^K` for an integer `0 <= m < p^K`.
    pub fn gamma_int(&self, m: &R) -> Result<PadicUnit<R>, GammaError> {
        let modulus = self.ctx.modulus();
        if m >= modulus {
            return Err(GammaError::OutOfRange { lift: m.to_string(), modulus: modulus.to_string() });
        }
        if let Some(v) = self.memo.read().expect("gamma memo poisoned").get(m) {
            return Ok(self.ctx.unit(v.clone())?);
        }
        let v = self.eval_blocks(m);
        self.memo.write().expect("gamma memo poisoned").insert(m.clone(), v.clone());
        Ok(self.ctx.unit(v)?)
    }

    /// `Γ_p(x)` for a rational `x` with denominator prime to `p`.
    pub fn gamma_rational(&self, x: &Frac) -> Result<PadicUnit<R>, GammaError> {
        let m = lift(&self.ctx, x).ok_or_else(|| GammaError::NotIntegral(x.to_string()))?;
        self.gamma_int(&m)
    }

    /// `Γ_p(r / (p - 1))`.
    pub fn gamma_frac(&self, r: FracArg) -> Result<PadicUnit<R>, GammaError> {
        self.gamma_int(&lift_frac(&self.ctx, r))
    }

    /// Preload memo entries, e.g. from a persisted cache.
    pub fn seed<I: IntoIterator<Item = (R, R)>>(&self, entries: I) {
        let mut memo = self.memo.write().expect("gamma memo poisoned");
        memo.extend(entries);
    }

    /// Every memoized `(lift, Γ_p(lift))`, sorted by lift.
    pub fn snapshot(&self) -> Vec<(R, R)> {
        let memo = self.memo.read().expect("gamma memo poisoned");
        let mut out: Vec<_> = memo.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
        out.sort();
        out
    }

    /// Block evaluation without touching the memo.
    pub fn eval_uncached(&self, m: &R) -> Result<PadicUnit<R>, GammaError> {
        let modulus = self.ctx.modulus();
        if m >= modulus {
            return Err(GammaError::OutOfRange { lift: m.to_string(), modulus: modulus.to_string() });
        }
        Ok(self.ctx.unit(self.eval_blocks(m))?)
    }

    fn eval_blocks(&self, m: &R) -> R {
        let modulus = self.ctx.modulus();
        let pr = R::from_word(self.ctx.p());
        let mut acc = R::one() % modulus.clone();
        let mut rest = m.clone();
        for row in &self.partials {
            let (above, digit) = rest.div_rem(&pr);
            let digit = digit.to_usize().expect("digit below p");
            if digit > 0 {
                acc = acc.mul_mod(&horner(&row[digit], &above, modulus), modulus);
            }
            rest = above;
        }
        if m.is_odd() {
            acc.neg_mod(modulus)
        } else {
            acc
        }
    }
}

fn poly_mul_trunc<R: Residue>(a: &[R], b: &[R], len: usize, m: &R) -> Vec<R> {
    let mut out = vec![R::zero(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            out[i + j] = out[i + j].add_mod(&x.mul_mod(y, m), m);
        }
    }
    out
}

/// Coefficients of `f(z + shift)`.
fn taylor_shift<R: Residue>(f: &[R], shift: &R, m: &R) -> Vec<R> {
    let mut out = vec![R::zero(); f.len()];
    for c in f.iter().rev() {
        // out <- out * (z + shift) + c
        for i in (0..out.len()).rev() {
            let below = if i > 0 { out[i - 1].clone() } else { R::zero() };
            out[i] = out[i].mul_mod(shift, m).add_mod(&below, m);
        }
        out[0] = out[0].add_mod(c, m);
    }
    out
}

fn horner<R: Residue>(f: &[R], x: &R, m: &R) -> R {
    f.iter().rev().fold(R::zero(), |acc, c| acc.mul_mod(x, m).add_mod(c, m))
}
