//! Exhaustive point counting, and the sweep that compares it with every formula.
//!
//! [`brute_count`] touches nothing but machine-word modular arithmetic. Each
//! projective point is visited once through its representative whose first
//! nonzero coordinate is 1.

use std::time::Instant;

use num_bigint::BigUint;
use rayon::prelude::*;

use crate::dwork::{DworkError, DworkInstance, PrecisionPolicy};
use crate::engine::{CountValue, Engine, Method};
use crate::residue::odd_primes_up_to;

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

/// Number of points of `Σ x_i^n - n λ ∏ x_i = 0` in `P^{n-1}(F_p)`.
///
/// Works for every odd prime `p`, every `n >= 1` and every `λ`, including
/// `p | n` and `λ ≡ 0`.
pub fn brute_count(p: u64, n: u64, lambda: i64) -> u64 {
    assert!(p >= 3 && p < 1 << 31, "oracle needs a small odd modulus");
    let lambda = lambda.rem_euclid(p as i64) as u64;
    let coeff = (p - (n % p) * lambda % p) % p;
    let powers: Vec<u64> = (0..p).map(|x| pow_mod(x, n, p)).collect();
    let n = n as usize;
    // leading 1 at position `lead`; later coordinates free.
    (0..n)
        .map(|lead| {
            let free = n - lead - 1;
            if free == 0 {
                // the point e_lead: only x_lead = 1 is nonzero
                let product = if n == 1 { 1 } else { 0 };
                return u64::from((1 + coeff * product) % p == 0);
            }
            let with_zeros = lead > 0;
            (0..p)
                .into_par_iter()
                .map(|first| count_tail(&powers, p, coeff, free, first, with_zeros))
                .sum::<u64>()
        })
        .sum()
}

/// Solutions with the leading `1`, then `first`, then `free - 1` more coordinates.
fn count_tail(powers: &[u64], p: u64, coeff: u64, free: usize, first: u64, with_zeros: bool) -> u64 {
    let mut tail = vec![0u64; free - 1];
    let mut hits = 0;
    loop {
        let mut sum = 1 + powers[first as usize];
        let mut prod = if with_zeros { 0 } else { first };
        for &x in &tail {
            sum += powers[x as usize];
            prod = prod * x % p;
        }
        if (sum + coeff * prod) % p == 0 {
            hits += 1;
        }
        let mut i = 0;
        loop {
            if i == tail.len() {
                return hits;
            }
            tail[i] += 1;
            if tail[i] < p {
                break;
            }
            tail[i] = 0;
            i += 1;
        }
    }
}

/// Which `λ` a sweep visits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LambdaPolicy {
    /// Every `λ` in `F_p^*`.
    Nonzero,
    /// Every `λ` in `F_p`, including `0`.
    All,
    /// At most `k` values of `F_p^*`, evenly spaced and starting at 1.
    Sample(u64),
}

impl LambdaPolicy {
    pub fn lambdas(&self, p: u64) -> Vec<u64> {
        match *self {
            LambdaPolicy::Nonzero => (1..p).collect(),
            LambdaPolicy::All => (0..p).collect(),
            LambdaPolicy::Sample(k) => {
                let k = k.clamp(1, p - 1);
                let mut v: Vec<u64> = (0..k).map(|i| 1 + i * (p - 1) / k).collect();
                v.dedup();
                v
            }
        }
    }
}

/// Results of every applicable method on one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct CountReport {
    pub p: u64,
    pub n: u64,
    pub lambda: u64,
    pub d: u64,
    pub oracle: Option<u64>,
    /// `(method, count)` in [`Method::ALL`] order.
    pub methods: Vec<(Method, Result<BigUint, String>)>,
    pub agreement: bool,
    /// Milliseconds per method name.
    pub timings_ms: Vec<(String, f64)>,
}

/// Runs the oracle and every applicable formula on `inst`.
pub fn compare_methods(engine: &Engine, inst: &DworkInstance, with_oracle: bool) -> CountReport {
    let mut timings = Vec::new();
    let oracle = with_oracle.then(|| {
        let start = Instant::now();
        let v = brute_count(inst.p(), inst.n(), inst.lambda() as i64);
        timings.push(("oracle".to_string(), start.elapsed().as_secs_f64() * 1e3));
        v
    });
    let mut methods = Vec::new();
    for m in Method::ALL.into_iter().filter(|m| m.applies(inst)) {
        let start = Instant::now();
        let r = engine.count(inst, m, PrecisionPolicy::default()).map_err(|e| e.to_string()).and_then(|c| match c.value {
            CountValue::Exact(v) => Ok(v),
            CountValue::Modular { .. } => Err("modular result".to_string()),
        });
        timings.push((m.name().to_string(), start.elapsed().as_secs_f64() * 1e3));
        methods.push((m, r));
    }
    let mut values = methods.iter().map(|(_, r)| r.clone().ok());
    let reference = oracle.map(BigUint::from).or_else(|| values.next().flatten());
    let agreement = reference.is_some()
        && methods.iter().all(|(_, r)| r.as_ref().ok() == reference.as_ref());
    CountReport {
        p: inst.p(),
        n: inst.n(),
        lambda: inst.lambda(),
        d: inst.d(),
        oracle,
        methods,
        agreement,
        timings_ms: timings,
    }
}

/// The grid of instances for a sweep, in report order: `p`, then `n`, then `λ`.
pub fn sweep_instances(p_max: u64, n_set: &[u64], lambdas: LambdaPolicy) -> Result<Vec<DworkInstance>, DworkError> {
    let mut out = Vec::new();
    for p in odd_primes_up_to(p_max) {
        for &n in n_set {
            if n % p == 0 {
                continue;
            }
            for lambda in lambdas.lambdas(p) {
                out.push(DworkInstance::new(p, n, lambda as i64)?);
            }
        }
    }
    Ok(out)
}

/// Compares all methods against the oracle across a grid. `jobs` is the
/// number of worker threads; report order does not depend on it.
pub fn sweep_verify(
    engine: &Engine,
    p_max: u64,
    n_set: &[u64],
    lambdas: LambdaPolicy,
    jobs: usize,
) -> Result<Vec<CountReport>, DworkError> {
    let instances = sweep_instances(p_max, n_set, lambdas)?;
    let run = || instances.par_iter().map(|inst| compare_methods(engine, inst, true)).collect();
    if jobs <= 1 {
        return Ok(instances.iter().map(|inst| compare_methods(engine, inst, true)).collect());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| DworkError::Internal(e.to_string()))?;
    Ok(pool.install(run))
}
