mod close;
mod galois;
mod herbrand;
mod pwl;

pub use close::{certify_close, match_galois, transfer_extension, transfer_tower, ClosePairCertificate, TransferredExtension};
pub use galois::{different_from_polynomial, ramification_breaks, relative_herbrand, step_herbrand, GaloisGroup, TowerMap};
pub use herbrand::HerbrandData;
pub use pwl::{q, qf, PiecewiseLinear, Q};
