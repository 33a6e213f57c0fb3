//! Similitude algebra, words and addresses, cost functions and IFS specs.

mod ifs;
mod index;
mod similitude;
mod word;

pub use ifs::{CostFunction, IfsSpec, INTEGER_EXPONENT_TOLERANCE};
pub use index::{dedup_similitudes, SimilitudeIndex};
pub use similitude::{Similitude, SIMILARITY_TOLERANCE};
pub use word::{is_disjunctive_witness, Address, Word};
