//! Descendant correlators `⟨τ_{a1,m1} ⋯ τ_{an,mn}⟩_g` for g = 0, 1, the
//! potentials they assemble into, and the linear constraints they satisfy.
//!
//! Genus-zero values come from the primary correlators and the topological
//! recursion relation; genus-one values from the genus-one recursion.
//! Insertions with `m = r-1` decouple and evaluate to zero.

mod engine;
mod mu1;
mod potentials;
mod residuals;

use std::fmt;

use thiserror::Error;

use crate::algebra::{int, rat, AlgebraError, Rational};
use crate::cohft::CohftError;

pub use engine::{engine, DefaultChoice, Engine, TrrChoice};
pub use mu1::mu1_correlator_g0;
pub use potentials::{
    admissible_multisets, descendant_variables, genus1_potential, large_potential, large_potential_g0, potential_in,
};
pub use residuals::{apply_dilaton, apply_l0, apply_l_minus1, grading_residual, operator_residual, Constraint};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DescendantError {
    #[error("matter index m = {m} out of range for r = {r}")]
    InvalidMark { m: u32, r: u32 },
    #[error("insertion with m = r-1 = {0} decouples; its correlators are zero")]
    RamondInsertion(u32),
    #[error("only genus 0 and 1 are supported, got {0}")]
    UnsupportedGenus(u32),
    #[error("mu1 insertions are only supported in genus 0")]
    Mu1Genus,
    #[error("at most one mu1 insertion is supported, got {0}")]
    TooManyMu1(u32),
    #[error("r must be at least 2, got {0}")]
    InvalidRank(u32),
    #[error("Δ(0) is not the identity matrix")]
    DeltaNotIdentity,
    #[error(transparent)]
    Cohft(#[from] CohftError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// A canonical correlator: sorted insertions `(a, m)` with `m <= r-2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CorrelatorKey {
    r: u32,
    genus: u32,
    insertions: Vec<(u32, u32)>,
    mu1: bool,
}

impl CorrelatorKey {
    pub fn new(r: u32, genus: u32, mut insertions: Vec<(u32, u32)>, mu1: bool) -> Result<Self, DescendantError> {
        if r < 2 {
            return Err(DescendantError::InvalidRank(r));
        }
        if genus > 1 {
            return Err(DescendantError::UnsupportedGenus(genus));
        }
        if mu1 && genus != 0 {
            return Err(DescendantError::Mu1Genus);
        }
        for &(_, m) in &insertions {
            if m >= r {
                return Err(DescendantError::InvalidMark { m, r });
            }
            if m == r - 1 {
                return Err(DescendantError::RamondInsertion(m));
            }
        }
        insertions.sort_unstable();
        Ok(CorrelatorKey {
            r,
            genus,
            insertions,
            mu1,
        })
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn insertions(&self) -> &[(u32, u32)] {
        &self.insertions
    }

    pub fn has_mu1(&self) -> bool {
        self.mu1
    }

    pub fn n(&self) -> usize {
        self.insertions.len()
    }
}

impl fmt::Display for CorrelatorKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, (a, m)) in self.insertions.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "tau({a},{m})")?;
        }
        if self.mu1 {
            write!(f, " mu1")?;
        }
        write!(f, ">_{}", self.genus)
    }
}

/// Why a key does or does not meet the dimension constraint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Admissibility {
    Admissible {
        dimension: u32,
    },
    Unstable,
    /// `(r-2)(g-1) + Σm` is not divisible by `r`.
    NotDivisible,
    NegativeDimension,
    /// `Σa + D (+1 for μ₁) ≠ 3g - 3 + n`.
    DegreeMismatch {
        expected: i64,
        found: i64,
    },
}

impl Admissibility {
    pub fn is_admissible(&self) -> bool {
        matches!(self, Admissibility::Admissible { .. })
    }
}

/// `D = ((r-2)(g-1) + Σm)/r` for one connected component.
pub fn virtual_dimension(r: u32, genus: u32, marks: &[u32]) -> Rational {
    let sum: i64 = marks.iter().map(|&m| m as i64).sum();
    rat((r as i64 - 2) * (genus as i64 - 1) + sum, r as i64)
}

pub fn admissible(key: &CorrelatorKey) -> Admissibility {
    let r = key.r as i64;
    let g = key.genus as i64;
    let n = key.n() as i64;
    if 2 * g - 2 + n <= 0 {
        return Admissibility::Unstable;
    }
    let num = (r - 2) * (g - 1) + key.insertions.iter().map(|&(_, m)| m as i64).sum::<i64>();
    if num.rem_euclid(r) != 0 {
        return Admissibility::NotDivisible;
    }
    let d = num / r;
    if d < 0 {
        return Admissibility::NegativeDimension;
    }
    let found = key.insertions.iter().map(|&(a, _)| a as i64).sum::<i64>() + d + key.mu1 as i64;
    let expected = 3 * g - 3 + n;
    if found != expected {
        return Admissibility::DegreeMismatch { expected, found };
    }
    Admissibility::Admissible { dimension: d as u32 }
}

/// Evaluates a key with the shared engine for its `r`.
pub fn correlator(key: &CorrelatorKey) -> Result<Rational, DescendantError> {
    let e = engine(key.r)?;
    Ok(match (key.genus, key.mu1) {
        (0, false) => e.correlator_g0(&key.insertions),
        (0, true) => mu1_correlator_g0(&e, &key.insertions),
        _ => e.correlator_g1(&key.insertions),
    })
}

pub fn correlator_g0(key: &CorrelatorKey) -> Result<Rational, DescendantError> {
    engine(key.r)?.correlator_g0_checked(key)
}

pub fn correlator_g1(key: &CorrelatorKey) -> Result<Rational, DescendantError> {
    engine(key.r)?.correlator_g1_checked(key)
}

/// Convenience: evaluates raw insertions, giving zero for decoupled marks.
pub fn correlator_raw(r: u32, genus: u32, insertions: &[(u32, u32)], mu1: bool) -> Result<Rational, DescendantError> {
    match CorrelatorKey::new(r, genus, insertions.to_vec(), mu1) {
        Ok(key) => correlator(&key),
        Err(DescendantError::RamondInsertion(_)) => Ok(int(0)),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key(r: u32, g: u32, ins: &[(u32, u32)]) -> CorrelatorKey {
        CorrelatorKey::new(r, g, ins.to_vec(), false).unwrap()
    }

    #[test]
    fn admissibility_examples() {
        assert_eq!(
            admissible(&key(3, 0, &[(0, 1); 4])),
            Admissibility::Admissible { dimension: 1 }
        );
        assert_eq!(admissible(&key(3, 1, &[(1, 1)])), Admissibility::NotDivisible);
        assert_eq!(
            admissible(&key(2, 0, &[(0, 0); 3])),
            Admissibility::Admissible { dimension: 0 }
        );
        assert_eq!(admissible(&key(2, 0, &[(0, 0); 2])), Admissibility::Unstable);
        assert!(matches!(
            admissible(&key(2, 0, &[(1, 0); 3])),
            Admissibility::DegreeMismatch { .. }
        ));
        assert_eq!(
            admissible(&key(3, 1, &[(1, 0)])),
            Admissibility::Admissible { dimension: 0 }
        );
    }

    #[test]
    fn key_construction() {
        let k = key(4, 0, &[(1, 2), (0, 1), (0, 0)]);
        assert_eq!(k.insertions(), &[(0, 0), (0, 1), (1, 2)]);
        assert_eq!(
            CorrelatorKey::new(3, 0, vec![(0, 2)], false),
            Err(DescendantError::RamondInsertion(2))
        );
        assert!(CorrelatorKey::new(3, 0, vec![(0, 5)], false).is_err());
        assert!(CorrelatorKey::new(3, 1, vec![(1, 0)], true).is_err());
        assert_eq!(correlator_raw(3, 0, &[(0, 2), (0, 0), (0, 0)], false).unwrap(), int(0));
        assert_eq!(k.to_string(), "<tau(0,0) tau(0,1) tau(1,2)>_0");
    }

    #[test]
    fn dimension_formula() {
        assert_eq!(virtual_dimension(3, 0, &[1, 1, 1, 1]), int(1));
        assert_eq!(virtual_dimension(2, 3, &[0, 0]), int(0));
        assert_eq!(virtual_dimension(5, 1, &[0]), int(0));
    }
}
