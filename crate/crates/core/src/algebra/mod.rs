//! Exact arithmetic substrate: rationals, the quadratic field `Q(ε)` with
//! `ε² = -1/r`, sparse graded series and a small exact linear solver.

mod linalg;
mod rational;
mod scalar;
mod series;

pub use linalg::{solve_linear_system, LinearSolution};
pub use rational::{binomial, factorial, format_rational, int, parse_rational, rat, Rational};
pub use scalar::{Scalar, ScalarOp};
pub(crate) use series::write_sum;
pub use series::{monomial_weight, GradedSeries, Monomial, Var};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("mixed ring contexts: r = {0} and r = {1}")]
    MixedContext(u32, u32),
    #[error("unknown variable {0}")]
    UnknownVariable(Var),
    #[error("series has nonzero constant term {0}")]
    NonzeroConstant(String),
    #[error("series constant term must be 1, found {0}")]
    ConstantNotOne(String),
    #[error("cannot parse {what}: {input:?}")]
    Parse { what: &'static str, input: String },
}

/// Coefficient ring used by the sparse containers in this crate.
///
/// Implemented for plain rationals and for [`Scalar`]. No `zero()` is
/// required: sparse maps never store zeros, and `Scalar` needs its ring
/// context to build one.
pub trait Coefficient: Clone + PartialEq + std::fmt::Debug + std::fmt::Display + Send + Sync {
    fn is_zero_coeff(&self) -> bool;
    fn add_ref(&self, other: &Self) -> Self;
    fn mul_ref(&self, other: &Self) -> Self;
    fn neg_ref(&self) -> Self;
    fn scale(&self, q: &Rational) -> Self;
    /// True when the value is a plain rational equal to one.
    fn is_one_coeff(&self) -> bool;
    /// True when printing needs parentheses inside a product.
    fn is_compound(&self) -> bool {
        false
    }
    /// Sign used when rendering sums: returns `true` if the leading part is negative.
    fn is_negative_coeff(&self) -> bool;
}

impl Coefficient for Rational {
    fn is_zero_coeff(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn scale(&self, q: &Rational) -> Self {
        self * q
    }
    fn is_one_coeff(&self) -> bool {
        num_traits::One::is_one(self)
    }
    fn is_negative_coeff(&self) -> bool {
        num_traits::Signed::is_negative(self)
    }
}

/// Adds `c` into `map[key]`, removing the entry if the sum cancels.
pub(crate) fn accumulate<K: Ord, C: Coefficient>(map: &mut std::collections::BTreeMap<K, C>, key: K, c: C) {
    use std::collections::btree_map::Entry;
    if c.is_zero_coeff() {
        return;
    }
    match map.entry(key) {
        Entry::Vacant(v) => {
            v.insert(c);
        }
        Entry::Occupied(mut o) => {
            let sum = o.get().add_ref(&c);
            if sum.is_zero_coeff() {
                o.remove();
            } else {
                *o.get_mut() = sum;
            }
        }
    }
}
