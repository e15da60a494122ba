pub mod abelian;
pub mod arith;
pub mod error;
pub mod fixtures;
pub mod ramification;
pub mod scenario;
pub mod tori;
pub mod transfer;
pub mod units;

pub use error::{Error, Result};
