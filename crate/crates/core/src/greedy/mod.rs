//! Finite, oracle-driven versions of the inductive FE constructions.
//!
//! Ultrafilter choices become least-element choices (`greedy_fe*`) or a
//! budgeted backtracking search over blocks of a given sequence
//! (`search_fegen*`). Every success carries the full list of elements that
//! were tested and can be re-checked with the matching `verify_*`.

mod fe;
mod fecor;
mod fegen;

pub use fe::{greedy_fe, greedy_fe1, greedy_fe2, verify_certificate, CheckedElement, FeCertificate, GreedyFe};
pub use fecor::{verify_fecor, Check, FecorReport};
pub use fegen::{
    search_fegen, search_fegen1, search_fegen2, verify_fegen, ConditionCheck, FSpec, FegenLimits, FegenOutcome,
    GreedyState,
};

use crate::error::Error;

/// Maps a membership error onto the "oracle range" failure: capacity
/// errors mean the value could not be tested, anything else is a real
/// error.
fn oracle_failure<T>(r: crate::Result<T>) -> crate::Result<std::result::Result<T, Error>> {
    match r {
        Ok(v) => Ok(Ok(v)),
        Err(e) if e.is_capacity() => Ok(Err(e)),
        Err(e) => Err(e),
    }
}
