//! Serializable reports and their plain-text rendering.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use serde_json::Value;

use dwork_core::oracle::CountReport;
use dwork_core::residue::big_pow;
use dwork_core::{PadicContext, Residue, ValuedPadic};

/// One instance, as printed by `count --json` and each line of `verify --json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceReport {
    pub p: u64,
    pub n: u64,
    pub lambda: u64,
    pub d: u64,
    /// Count per method; `null` when the method failed.
    pub methods: BTreeMap<String, Value>,
    pub agreement: bool,
    /// Filled only when timings were requested, so reports stay reproducible.
    pub timings_ms: BTreeMap<String, f64>,
    /// Present when counts are residues modulo `p^K`, e.g. `"31^3"`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modulus: Option<String>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub errors: BTreeMap<String, String>,
}

pub fn big_to_json(v: &BigUint) -> Value {
    match v.to_u64() {
        Some(x) => Value::from(x),
        None => Value::from(v.to_string()),
    }
}

impl InstanceReport {
    pub fn from_core(r: &CountReport, timings: bool) -> Self {
        let mut methods = BTreeMap::new();
        let mut errors = BTreeMap::new();
        if let Some(o) = r.oracle {
            methods.insert("oracle".to_string(), Value::from(o));
        }
        for (m, v) in &r.methods {
            match v {
                Ok(v) => {
                    methods.insert(m.name().to_string(), big_to_json(v));
                }
                Err(e) => {
                    methods.insert(m.name().to_string(), Value::Null);
                    errors.insert(m.name().to_string(), e.clone());
                }
            }
        }
        let timings_ms = if timings { r.timings_ms.iter().cloned().collect() } else { BTreeMap::new() };
        InstanceReport {
            p: r.p,
            n: r.n,
            lambda: r.lambda,
            d: r.d,
            methods,
            agreement: r.agreement,
            timings_ms,
            modulus: None,
            errors,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("reports serialize")
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("p={} n={} lambda={} d={}", self.p, self.n, self.lambda, self.d);
        for (name, v) in &self.methods {
            let shown = match v {
                Value::Null => "error".to_string(),
                Value::String(x) => x.clone(),
                other => other.to_string(),
            };
            s.push_str(&format!(" {name}={shown}"));
        }
        if let Some(m) = &self.modulus {
            s.push_str(&format!(" (mod {m})"));
        }
        s.push_str(if self.agreement { " agree" } else { " DISAGREE" });
        for (name, ms) in &self.timings_ms {
            s.push_str(&format!(" {name}:{ms:.2}ms"));
        }
        s
    }
}

/// A p-adic value as printed by `gfun` and `ffun`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PadicView {
    pub p: u64,
    pub precision: u32,
    /// `null` for zero.
    pub valuation: Option<i64>,
    /// Decimal residue of the unit part.
    pub unit: Option<String>,
    /// Base-p digits of the unit part, least significant first.
    pub digits: Vec<u64>,
    /// Digits known absolutely; `null` for an exact zero.
    pub absolute_precision: Option<i64>,
    /// The value as an integer, when it is integral and visibly small.
    pub integer: Option<Value>,
}

impl PadicView {
    pub fn new<R: Residue>(ctx: &PadicContext<R>, v: &ValuedPadic<R>) -> Self {
        let (p, precision) = (ctx.p(), ctx.precision());
        match v {
            ValuedPadic::Zero { absolute_precision } => PadicView {
                p,
                precision,
                valuation: None,
                unit: None,
                digits: Vec::new(),
                absolute_precision: *absolute_precision,
                integer: Some(Value::from(0)),
            },
            ValuedPadic::Nonzero { valuation, unit, relative_precision } => {
                let abs = valuation + *relative_precision as i64;
                let integer = (*valuation >= 0).then(|| small_integer(p, *valuation, &unit.to_biguint(), abs)).flatten();
                PadicView {
                    p,
                    precision,
                    valuation: Some(*valuation),
                    unit: Some(unit.to_string()),
                    digits: ctx.digits(unit, *relative_precision),
                    absolute_precision: Some(abs),
                    integer,
                }
            }
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = match (&self.valuation, &self.unit) {
            (Some(v), Some(u)) => format!(
                "valuation: {v}\nunit: {u}\ndigits: {}\n",
                self.digits.iter().map(u64::to_string).collect::<Vec<_>>().join(" ")
            ),
            _ => "valuation: none (zero)\n".to_string(),
        };
        match self.absolute_precision {
            Some(a) => s.push_str(&format!("known modulo: {}^{a}\n", self.p)),
            None => s.push_str("known modulo: exact\n"),
        }
        if let Some(i) = &self.integer {
            s.push_str(&format!("integer: {i}\n"));
        }
        s
    }
}

/// The signed integer `s` with `s ≡ unit p^val (mod p^abs)` and `s^2 < p^abs`, if any.
fn small_integer(p: u64, val: i64, unit: &BigUint, abs: i64) -> Option<Value> {
    let modulus = big_pow(p, abs as u32);
    let r = (unit * big_pow(p, val as u32)) % &modulus;
    let (mag, negative) = if &r * 2u32 <= modulus { (r, false) } else { (&modulus - r, true) };
    if &mag * &mag >= modulus {
        return None;
    }
    let mag = mag.to_i64()?;
    Some(Value::from(if negative && !mag.is_zero() { -mag } else { mag }))
}
