mod action;
mod group;
mod matrix;
mod snf;

pub use action::{check_action, coinvariants, fixed_points, FiniteGroup};
pub use group::{subgroup, DirectSum, FgAbelianGroup, GroupElem, GroupHom};
pub use matrix::IntMatrix;
pub use snf::{left_kernel, smith_normal_form, solve_left, Snf};

pub fn big(v: i64) -> num_bigint::BigInt {
    num_bigint::BigInt::from(v)
}

pub fn big_vec(v: &[i64]) -> GroupElem {
    v.iter().map(|&x| big(x)).collect()
}
