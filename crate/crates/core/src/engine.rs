//! Method dispatch, working precision and gamma-evaluator caching.
//!
//! An [`Engine`] keeps one [`PadicGamma`] per `(p, K)` and reuses it across
//! counts, so gamma values computed for one `λ` serve every other `λ`. The
//! `u64` carrier is used whenever `p^K` fits it; otherwise `BigUint`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use num_bigint::BigUint;

use crate::dwork::{
    ff_value, koblitz_value, main_value, max_param_len, relprime_value, target_precision, DworkError, DworkInstance,
    PrecisionPolicy,
};
use crate::padic::{PadicContext, PadicError, ValuedPadic};
use crate::pgamma::PadicGamma;
use crate::residue::Residue;

/// A p-adic counting formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Main,
    Koblitz,
    Relprime,
    Ff,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Main, Method::Koblitz, Method::Relprime, Method::Ff];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Main => "main",
            Method::Koblitz => "koblitz",
            Method::Relprime => "relprime",
            Method::Ff => "ff",
        }
    }

    /// Whether the formula's hypotheses hold for `inst`.
    pub fn applies(&self, inst: &DworkInstance) -> bool {
        match self {
            Method::Main => inst.lambda() != 0,
            Method::Koblitz => true,
            Method::Relprime => inst.lambda() != 0 && inst.d() == 1,
            Method::Ff => inst.lambda() != 0 && (inst.p() - 1) % inst.n() == 0,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown method {s:?}"))
    }
}

/// An exact count, or the count modulo `p^exponent` under a precision override.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CountValue {
    Exact(BigUint),
    Modular { residue: BigUint, exponent: u32 },
}

impl CountValue {
    pub fn exact(&self) -> Option<&BigUint> {
        match self {
            CountValue::Exact(v) => Some(v),
            CountValue::Modular { .. } => None,
        }
    }
}

impl fmt::Display for CountValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CountValue::Exact(v) => write!(f, "{v}"),
            CountValue::Modular { residue, exponent } => write!(f, "{residue} (mod p^{exponent})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Count {
    pub method: Method,
    pub value: CountValue,
    /// Digits carried through the computation.
    pub working_precision: u32,
    /// Valuation of the p-adic value before reconstruction; `None` for zero.
    pub valuation: Option<i64>,
}

/// Working precision `K_w` for `method` on `inst`.
pub fn working_precision(inst: &DworkInstance, method: Method, policy: PrecisionPolicy) -> u32 {
    let target = policy
        .override_target
        .unwrap_or_else(|| target_precision(inst.p(), inst.n()) + policy.extra_digits);
    let guard = match method {
        Method::Main | Method::Ff => max_param_len(inst.n(), inst.d()) as u32,
        Method::Relprime => inst.n() as u32 - 1,
        Method::Koblitz => 1,
    };
    target + guard + 2
}

type Store<R> = Mutex<HashMap<(u64, u32), Arc<PadicGamma<R>>>>;

/// Dispatches counts to the right carrier and caches gamma evaluators.
#[derive(Debug)]
pub struct Engine {
    fast_path: bool,
    fast: Store<u64>,
    big: Store<BigUint>,
}

impl Default for Engine {
    fn default() -> Self {
        Engine::new()
    }
}

fn gamma_from<R: Residue>(store: &Store<R>, p: u64, k: u32) -> Result<Arc<PadicGamma<R>>, PadicError> {
    let mut map = store.lock().expect("gamma store poisoned");
    if let Some(g) = map.get(&(p, k)) {
        return Ok(g.clone());
    }
    let g = Arc::new(PadicGamma::new(Arc::new(PadicContext::new(p, k)?)));
    map.insert((p, k), g.clone());
    Ok(g)
}

fn evaluate<R: Residue>(
    gamma: &PadicGamma<R>,
    inst: &DworkInstance,
    method: Method,
    alpha: u64,
) -> Result<ValuedPadic<R>, DworkError> {
    match method {
        Method::Main => main_value(gamma, inst),
        Method::Koblitz => koblitz_value(gamma, inst, alpha),
        Method::Relprime => relprime_value(gamma, inst),
        Method::Ff => ff_value(gamma, inst, alpha),
    }
}

fn finish<R: Residue>(
    ctx: &PadicContext<R>,
    value: &ValuedPadic<R>,
    inst: &DworkInstance,
    policy: PrecisionPolicy,
) -> Result<CountValue, DworkError> {
    match policy.override_target {
        Some(k) => Ok(CountValue::Modular { residue: ctx.residue_mod_power(value, k)?, exponent: k }),
        None => Ok(CountValue::Exact(ctx.reconstruct_integer(value, &inst.point_bound())?)),
    }
}

impl Engine {
    pub fn new() -> Self {
        Engine { fast_path: true, fast: Mutex::default(), big: Mutex::default() }
    }

    /// An engine that never uses the `u64` carrier.
    pub fn arbitrary_precision_only() -> Self {
        Engine { fast_path: false, ..Engine::new() }
    }

    pub fn uses_fast_path(&self, p: u64, k: u32) -> bool {
        self.fast_path && PadicContext::<u64>::fits(p, k)
    }

    pub fn count(&self, inst: &DworkInstance, method: Method, policy: PrecisionPolicy) -> Result<Count, DworkError> {
        self.count_with_generator(inst, method, 1, policy)
    }

    /// As [`Engine::count`], with the character generator `T = ω̄^alpha`
    /// (only the `ff` and `koblitz` formulas depend on it).
    pub fn count_with_generator(
        &self,
        inst: &DworkInstance,
        method: Method,
        alpha: u64,
        policy: PrecisionPolicy,
    ) -> Result<Count, DworkError> {
        let (p, k) = (inst.p(), working_precision(inst, method, policy));
        let (value, valuation) = if self.uses_fast_path(p, k) {
            let g = gamma_from(&self.fast, p, k)?;
            let v = evaluate(&g, inst, method, alpha)?;
            (finish(g.ctx(), &v, inst, policy)?, v.valuation())
        } else {
            let g = gamma_from(&self.big, p, k)?;
            let v = evaluate(&g, inst, method, alpha)?;
            (finish(g.ctx(), &v, inst, policy)?, v.valuation())
        };
        Ok(Count { method, value, working_precision: k, valuation })
    }

    /// `(p, K)` pairs with a live gamma evaluator, sorted.
    pub fn gamma_keys(&self) -> Vec<(u64, u32)> {
        let mut keys: Vec<_> = self.fast.lock().expect("gamma store poisoned").keys().copied().collect();
        keys.extend(self.big.lock().expect("gamma store poisoned").keys().copied());
        keys.sort_unstable();
        keys.dedup();
        keys
    }

    /// Every memoized `(lift, Γ_p(lift))` pair for `(p, K)`, sorted by lift.
    pub fn gamma_entries(&self, p: u64, k: u32) -> Vec<(BigUint, BigUint)> {
        if self.uses_fast_path(p, k) {
            let map = self.fast.lock().expect("gamma store poisoned");
            map.get(&(p, k))
                .map(|g| g.snapshot().into_iter().map(|(m, v)| (BigUint::from(m), BigUint::from(v))).collect())
                .unwrap_or_default()
        } else {
            let map = self.big.lock().expect("gamma store poisoned");
            map.get(&(p, k)).map(|g| g.snapshot()).unwrap_or_default()
        }
    }

    /// Preloads memoized gamma values for `(p, K)`. The caller vouches for them.
    pub fn seed_gamma(&self, p: u64, k: u32, entries: &[(BigUint, BigUint)]) -> Result<(), DworkError> {
        if self.uses_fast_path(p, k) {
            let g = gamma_from(&self.fast, p, k)?;
            g.seed(entries.iter().filter_map(|(m, v)| Some((u64::from_biguint(m)?, u64::from_biguint(v)?))));
        } else {
            let g = gamma_from(&self.big, p, k)?;
            g.seed(entries.iter().cloned());
        }
        Ok(())
    }

    /// `Γ_p(m)` recomputed from scratch, bypassing the memo.
    pub fn gamma_fresh(&self, p: u64, k: u32, m: &BigUint) -> Result<BigUint, DworkError> {
        if self.uses_fast_path(p, k) {
            let g = gamma_from(&self.fast, p, k)?;
            let m = u64::from_biguint(m).ok_or_else(|| DworkError::Internal(format!("lift {m} too large")))?;
            Ok(BigUint::from(*g.eval_uncached(&m)?.residue()))
        } else {
            let g = gamma_from(&self.big, p, k)?;
            Ok(g.eval_uncached(m)?.into_residue())
        }
    }
}
