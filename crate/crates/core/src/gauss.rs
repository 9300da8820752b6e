//! Multiplicative characters and Gauss sums in Gross–Koblitz form.
//!
//! Characters of `F_p^*` are powers of `ω̄`, the inverse of the Teichmüller
//! character. The Gauss sum `g(ω̄^j)` equals `-π^j Γ_p(j/(p-1))` for
//! `0 <= j < p-1`, where `π^(p-1) = -p`. `π` is never materialized: a
//! [`GaussSumGK`] keeps the exponent of `π` next to a p-adic unit, and
//! [`gk_product`] only accepts products whose `π`-exponent is a multiple of
//! `p - 1`, which collapse to an ordinary p-adic number.

use thiserror::Error;

use crate::padic::{PadicContext, PadicUnit, ValuedPadic};
use crate::pgamma::{FracArg, GammaError, PadicGamma};
use crate::residue::Residue;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GaussError {
    #[error("Gauss-sum product has pi-exponent {total}, not a multiple of p - 1 = {order}")]
    Unbalanced { total: i64, order: u64 },
    #[error(transparent)]
    Gamma(#[from] GammaError),
}

/// The character `ω̄^exp` of `F_p^*`, with `exp` reduced modulo `p - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CharExp {
    exp: u64,
    order: u64,
}

impl CharExp {
    pub fn new(j: i64, p: u64) -> Self {
        let order = p - 1;
        CharExp { exp: j.rem_euclid(order as i64) as u64, order }
    }

    pub fn trivial(p: u64) -> Self {
        CharExp::new(0, p)
    }

    pub fn exp(&self) -> u64 {
        self.exp
    }

    pub fn is_trivial(&self) -> bool {
        self.exp == 0
    }

    pub fn conj(&self) -> Self {
        CharExp { exp: (self.order - self.exp) % self.order, order: self.order }
    }

    pub fn mul(&self, other: &CharExp) -> Self {
        debug_assert_eq!(self.order, other.order);
        CharExp { exp: (self.exp + other.exp) % self.order, order: self.order }
    }

    pub fn pow(&self, e: i64) -> Self {
        let order = self.order as i128;
        CharExp { exp: (self.exp as i128 * e as i128).rem_euclid(order) as u64, order: self.order }
    }

    /// `χ(x)` with `χ(0) = 0`.
    pub fn eval<R: Residue>(&self, ctx: &PadicContext<R>, x: u64) -> ValuedPadic<R> {
        ctx.char_value(self.exp as i64, x)
    }

    /// `χ(-1) = (-1)^exp`.
    pub fn sign_at_minus_one(&self) -> i64 {
        if self.exp % 2 == 0 {
            1
        } else {
            -1
        }
    }
}

/// `g(ω̄^j) = π^pi_exp · unit`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GaussSumGK<R> {
    pub pi_exp: u64,
    pub unit: PadicUnit<R>,
}

/// Gross–Koblitz representation of `g(c)`.
pub fn gauss_gk<R: Residue>(gamma: &PadicGamma<R>, c: CharExp) -> Result<GaussSumGK<R>, GaussError> {
    let ctx = gamma.ctx();
    let g = gamma.gamma_frac(FracArg::new(c.exp, ctx.p())?)?;
    Ok(GaussSumGK { pi_exp: c.exp, unit: ctx.unit_neg(&g) })
}

/// `∏ g_i^{e_i}`, collapsing `π^(p-1) = -p`.
pub fn gk_product<R: Residue>(
    ctx: &PadicContext<R>,
    factors: &[(GaussSumGK<R>, i64)],
) -> Result<ValuedPadic<R>, GaussError> {
    let order = ctx.p() - 1;
    let total: i64 = factors.iter().map(|(g, e)| g.pi_exp as i64 * e).sum();
    if total.rem_euclid(order as i64) != 0 {
        return Err(GaussError::Unbalanced { total, order });
    }
    let unit = factors
        .iter()
        .fold(ctx.unit_one(), |acc, (g, e)| ctx.unit_mul(&acc, &ctx.unit_pow(&g.unit, *e)));
    Ok(ctx.mul_neg_p_power(&ctx.from_unit(&unit), total / order as i64))
}
