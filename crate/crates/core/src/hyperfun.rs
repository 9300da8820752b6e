//! The p-adic hypergeometric function `ₘGₘ` and the finite-field function `ₘFₘ`.
//!
//! `ₘGₘ[a; b | x]` is a sum over `j = 0..p-2` of `(-1)^{jm} ω̄^j(x)` times
//! ratios of `Γ_p` at shifted parameters and a power of `-p` fixed by
//! floors, scaled by `-1/(p-1)`. `ₘFₘ(A; B | x)` is a sum over all characters
//! `χ` of Gauss-sum ratios `g(A_i χ)/g(A_i) · g(conj(B_i χ))/g(conj(B_i))`
//! times `χ(-1)^m χ(x)`, with the same scale. When every parameter has a
//! denominator dividing `p - 1`, `F(A; B | t) = G(a; b | 1/t)` for
//! `A_i = ω̄^{a_i (p-1)}`.
//!
//! Terms are accumulated in increasing `j` (or `k`), so results do not
//! depend on how the terms were produced.

use rayon::prelude::*;
use thiserror::Error;

use crate::gauss::{gauss_gk, gk_product, CharExp, GaussError, GaussSumGK};
use crate::padic::{PadicError, PadicUnit, ValuedPadic};
use crate::pgamma::{GammaError, PadicGamma};
use crate::rational::{floor, frac, fract, is_p_integral, Frac};
use crate::residue::Residue;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HyperError {
    #[error("parameter lists differ in length ({top} upper, {bottom} lower)")]
    LengthMismatch { top: usize, bottom: usize },
    #[error("parameter {0} has a denominator divisible by p")]
    NotPIntegral(String),
    #[error(transparent)]
    Gamma(#[from] GammaError),
    #[error(transparent)]
    Gauss(#[from] GaussError),
    #[error(transparent)]
    Padic(#[from] PadicError),
}

/// Parameters `a_1..a_m; b_1..b_m` of `ₘGₘ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GParams {
    a: Vec<Frac>,
    b: Vec<Frac>,
}

impl GParams {
    pub fn new(a: Vec<Frac>, b: Vec<Frac>) -> Result<Self, HyperError> {
        if a.len() != b.len() {
            return Err(HyperError::LengthMismatch { top: a.len(), bottom: b.len() });
        }
        Ok(GParams { a, b })
    }

    pub fn a(&self) -> &[Frac] {
        &self.a
    }

    pub fn b(&self) -> &[Frac] {
        &self.b
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    fn check(&self, p: u64) -> Result<(), HyperError> {
        match self.a.iter().chain(&self.b).find(|x| !is_p_integral(x, p)) {
            Some(bad) => Err(HyperError::NotPIntegral(bad.to_string())),
            None => Ok(()),
        }
    }
}

/// Characters `A_1..A_m; B_1..B_m` of `ₘFₘ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FParams {
    a: Vec<CharExp>,
    b: Vec<CharExp>,
}

impl FParams {
    pub fn new(a: Vec<CharExp>, b: Vec<CharExp>) -> Result<Self, HyperError> {
        if a.len() != b.len() {
            return Err(HyperError::LengthMismatch { top: a.len(), bottom: b.len() });
        }
        Ok(FParams { a, b })
    }

    /// `A_i = ω̄^{a_i (p-1)}`, when every `a_i (p-1)` and `b_i (p-1)` is an integer.
    pub fn from_gparams(params: &GParams, p: u64) -> Option<Self> {
        let to_char = |x: &Frac| {
            let scaled = x * Frac::from_integer(p as i64 - 1);
            scaled.is_integer().then(|| CharExp::new(scaled.to_integer(), p))
        };
        let a = params.a.iter().map(to_char).collect::<Option<Vec<_>>>()?;
        let b = params.b.iter().map(to_char).collect::<Option<Vec<_>>>()?;
        Some(FParams { a, b })
    }

    pub fn a(&self) -> &[CharExp] {
        &self.a
    }

    pub fn b(&self) -> &[CharExp] {
        &self.b
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }
}

/// One `j`-term of `ₘGₘ`: the power of `-p` and the unit it multiplies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GTerm<R> {
    pub neg_p_exponent: i64,
    pub unit: PadicUnit<R>,
}

struct GPrepared<R> {
    upper: Vec<Frac>,
    lower: Vec<Frac>,
    base_inv: PadicUnit<R>,
}

fn prepare_g<R: Residue>(gamma: &PadicGamma<R>, params: &GParams) -> Result<GPrepared<R>, HyperError> {
    let ctx = gamma.ctx();
    params.check(ctx.p())?;
    let upper: Vec<Frac> = params.a.iter().map(fract).collect();
    let lower: Vec<Frac> = params.b.iter().map(|b| fract(&-b)).collect();
    let mut base = ctx.unit_one();
    for x in upper.iter().chain(&lower) {
        base = ctx.unit_mul(&base, &gamma.gamma_rational(x)?);
    }
    Ok(GPrepared { upper, lower, base_inv: ctx.unit_inv(&base) })
}

fn g_term<R: Residue>(
    gamma: &PadicGamma<R>,
    prep: &GPrepared<R>,
    j: u64,
    x: u64,
) -> Result<GTerm<R>, HyperError> {
    let ctx = gamma.ctx();
    let p = ctx.p();
    let m = prep.upper.len() as i64;
    let shift = frac(j as i64, p as i64 - 1);
    let chi = ctx.char_unit(j as i64, x).expect("x is nonzero mod p");
    let mut unit = ctx.unit_mul(&ctx.sign_unit(j as i64 * m), &chi);
    unit = ctx.unit_mul(&unit, &prep.base_inv);
    let mut exponent = 0i64;
    for a in &prep.upper {
        let arg = a - shift;
        exponent -= floor(&arg);
        unit = ctx.unit_mul(&unit, &gamma.gamma_rational(&fract(&arg))?);
    }
    for b in &prep.lower {
        let arg = b + shift;
        exponent -= floor(&arg);
        unit = ctx.unit_mul(&unit, &gamma.gamma_rational(&fract(&arg))?);
    }
    Ok(GTerm { neg_p_exponent: exponent, unit })
}

/// The individual terms of `ₘGₘ[params | x]` for `j = 0..p-2`, before the
/// `-1/(p-1)` scale. Empty when `x ≡ 0 (mod p)`.
pub fn g_terms<R: Residue>(gamma: &PadicGamma<R>, params: &GParams, x: u64) -> Result<Vec<GTerm<R>>, HyperError> {
    let prep = prepare_g(gamma, params)?;
    let p = gamma.ctx().p();
    if x % p == 0 {
        return Ok(Vec::new());
    }
    (0..p - 1).map(|j| g_term(gamma, &prep, j, x)).collect()
}

fn sum_g_terms<R: Residue>(gamma: &PadicGamma<R>, terms: &[GTerm<R>]) -> Result<ValuedPadic<R>, HyperError> {
    let ctx = gamma.ctx();
    if terms.is_empty() {
        return Ok(ValuedPadic::exact_zero());
    }
    let sum = terms.iter().fold(ValuedPadic::exact_zero(), |acc, t| {
        ctx.add(&acc, &ctx.mul_neg_p_power(&ctx.from_unit(&t.unit), t.neg_p_exponent))
    });
    Ok(ctx.mul(&sum, &ctx.from_rational(-1, ctx.p() as i64 - 1)?))
}

/// `ₘGₘ[a; b | x]_p`.
pub fn eval_g<R: Residue>(gamma: &PadicGamma<R>, params: &GParams, x: u64) -> Result<ValuedPadic<R>, HyperError> {
    let terms = g_terms(gamma, params, x)?;
    sum_g_terms(gamma, &terms)
}

/// [`eval_g`] with the `j`-terms computed on the rayon pool.
pub fn eval_g_parallel<R: Residue>(
    gamma: &PadicGamma<R>,
    params: &GParams,
    x: u64,
) -> Result<ValuedPadic<R>, HyperError> {
    let prep = prepare_g(gamma, params)?;
    let p = gamma.ctx().p();
    if x % p == 0 {
        return Ok(ValuedPadic::exact_zero());
    }
    let terms = (0..p - 1)
        .into_par_iter()
        .map(|j| g_term(gamma, &prep, j, x))
        .collect::<Result<Vec<_>, _>>()?;
    sum_g_terms(gamma, &terms)
}

/// `ₘFₘ(A; B | x)_p`.
pub fn eval_f<R: Residue>(gamma: &PadicGamma<R>, params: &FParams, x: u64) -> Result<ValuedPadic<R>, HyperError> {
    let ctx = gamma.ctx();
    let p = ctx.p();
    if x % p == 0 {
        return Ok(ValuedPadic::exact_zero());
    }
    let m = params.len() as i64;
    let gs = |c: CharExp| -> Result<GaussSumGK<R>, HyperError> { Ok(gauss_gk(gamma, c)?) };
    let base: Vec<(GaussSumGK<R>, i64)> = params
        .a
        .iter()
        .map(|a| gs(*a).map(|g| (g, -1)))
        .chain(params.b.iter().map(|b| gs(b.conj()).map(|g| (g, -1))))
        .collect::<Result<_, _>>()?;
    let mut sum = ValuedPadic::exact_zero();
    for k in 0..p - 1 {
        let chi = CharExp::new(k as i64, p);
        let mut factors = base.clone();
        for a in &params.a {
            factors.push((gs(a.mul(&chi))?, 1));
        }
        for b in &params.b {
            factors.push((gs(b.mul(&chi).conj())?, 1));
        }
        let ratio = gk_product(ctx, &factors)?;
        let sign = ctx.sign_unit(k as i64 * m);
        let chi_x = ctx.char_unit(k as i64, x).expect("x is nonzero mod p");
        let term = ctx.mul_unit(&ratio, &ctx.unit_mul(&sign, &chi_x));
        sum = ctx.add(&sum, &term);
    }
    Ok(ctx.mul(&sum, &ctx.from_rational(-1, p as i64 - 1)?))
}
