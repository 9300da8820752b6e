//! Point counting on Dwork hypersurfaces through p-adic hypergeometric functions.
//!
//! Every p-adic type is generic over a [`Residue`] carrier. The aliases below
//! fix the two carriers shipped with the crate: `u64` for moduli below
//! [`residue::FAST_MODULUS_LIMIT`], [`BigUint`] for anything larger.

pub mod dwork;
pub mod engine;
pub mod gauss;
pub mod hyperfun;
pub mod oracle;
pub mod padic;
pub mod pgamma;
pub mod rational;
pub mod residue;

use num_bigint::BigUint;

pub use dwork::{DworkError, DworkInstance, PrecisionPolicy};
pub use engine::{Count, CountValue, Engine, Method};
pub use oracle::{brute_count, sweep_verify, CountReport, LambdaPolicy};
pub use padic::{PadicContext, PadicError, PadicUnit, ValuedPadic};
pub use pgamma::PadicGamma;
pub use residue::Residue;

pub type Padic64 = ValuedPadic<u64>;
pub type PadicBig = ValuedPadic<BigUint>;
pub type Context64 = PadicContext<u64>;
pub type ContextBig = PadicContext<BigUint>;
pub type Gamma64 = PadicGamma<u64>;
pub type GammaBig = PadicGamma<BigUint>;
