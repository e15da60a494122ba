mod base;
mod residue;
mod ring;
mod tower;
mod truncated;

pub use base::{is_prime, BaseField, Characteristic};
pub use residue::{ResidueElem, ResidueField, ResiduePoly};
pub use tower::{ExtensionStep, RingElem, StepKind, Tower, Valuation};
pub use truncated::{Digits, TruncatedTriple};

