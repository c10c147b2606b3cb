//! Pseudo-differential operators `Σ f_j D^j` with differential-polynomial
//! coefficients over `Q(ε)`, and the Gelfand–Dickey flows built from them.
//!
//! `D` acts as `ε ∂_x`, so `D ∘ f = f D + ε f'`. Operators with negative
//! exponents are infinite series; they carry a truncation floor below which
//! coefficients are unknown.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::algebra::{binomial, int, rat, Coefficient, Rational, Scalar};
use crate::diffpoly::{write_laurent, DMonomial, DiffPoly, USym};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PsdoError {
    #[error("mixed ring contexts: r = {0} and r = {1}")]
    MixedContext(u32, u32),
    #[error("operator must be monic of order {expected}: {found}")]
    NotCanonical { expected: u32, found: String },
    #[error("operator with negative exponents needs a truncation floor")]
    MissingFloor,
    #[error("coefficient of D^{needed} requested but only exponents >= {floor} are known")]
    BelowFloor { needed: i64, floor: i64 },
    #[error("flow (n={n}, m={m}) produced a nonzero coefficient of D^{exponent}")]
    NotLaxForm { n: u32, m: u32, exponent: i64 },
    #[error("invalid flow index: need 0 <= m <= r-1, got m = {m} for r = {r}")]
    InvalidIndex { r: u32, m: u32 },
}

/// Depth used by [`rth_root`] when callers do not choose one.
pub fn default_depth(r: u32) -> u32 {
    2 * r + 2
}

#[derive(Clone, Debug, PartialEq)]
pub struct PsdoOperator {
    r: u32,
    coeffs: BTreeMap<i64, DiffPoly<Scalar>>,
    /// Exponents below the floor are unknown; `None` means the operator is exact.
    floor: Option<i64>,
}

impl PsdoOperator {
    /// Builds an operator, dropping zero coefficients and anything below `floor`.
    pub fn new(
        r: u32,
        coeffs: impl IntoIterator<Item = (i64, DiffPoly<Scalar>)>,
        floor: Option<i64>,
    ) -> Result<Self, PsdoError> {
        let mut map: BTreeMap<i64, DiffPoly<Scalar>> = BTreeMap::new();
        for (j, c) in coeffs {
            if c.r() != r {
                return Err(PsdoError::MixedContext(r, c.r()));
            }
            if floor.is_some_and(|f| j < f) {
                continue;
            }
            let entry = map.entry(j).or_insert_with(|| DiffPoly::zero(r));
            entry.add_assign(&c);
        }
        map.retain(|_, c| !c.is_zero());
        if floor.is_none() && map.keys().next().is_some_and(|&j| j < 0) {
            return Err(PsdoError::MissingFloor);
        }
        Ok(PsdoOperator { r, coeffs: map, floor })
    }

    pub fn zero(r: u32) -> Self {
        PsdoOperator {
            r,
            coeffs: BTreeMap::new(),
            floor: None,
        }
    }

    /// `D^j`; negative powers need a floor.
    pub fn d_power(r: u32, j: i64, floor: Option<i64>) -> Result<Self, PsdoError> {
        Self::new(r, [(j, DiffPoly::constant(r, Scalar::one(r)))], floor)
    }

    /// Multiplication operator by a differential polynomial.
    pub fn multiplication(poly: DiffPoly<Scalar>) -> Self {
        let r = poly.r();
        Self::new(r, [(0, poly)], None).expect("order-zero operator")
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn floor(&self) -> Option<i64> {
        self.floor
    }

    pub fn coeffs(&self) -> &BTreeMap<i64, DiffPoly<Scalar>> {
        &self.coeffs
    }

    /// Coefficient of `D^j`; errors if `j` lies below the floor.
    pub fn coeff(&self, j: i64) -> Result<DiffPoly<Scalar>, PsdoError> {
        if let Some(f) = self.floor {
            if j < f {
                return Err(PsdoError::BelowFloor { needed: j, floor: f });
            }
        }
        Ok(self.coeffs.get(&j).cloned().unwrap_or_else(|| DiffPoly::zero(self.r)))
    }

    pub fn top_order(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    /// Largest exponent that could carry a nonzero coefficient, counting
    /// unknown terms just below the floor.
    fn top_bound(&self) -> Option<i64> {
        match (self.top_order(), self.floor) {
            (Some(t), Some(f)) => Some(t.max(f - 1)),
            (t, None) => t,
            (None, Some(f)) => Some(f - 1),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check(other);
        let floor = join_floors(self.floor, other.floor);
        let coeffs = self.coeffs.iter().chain(&other.coeffs).map(|(j, c)| (*j, c.clone()));
        Self::new(self.r, coeffs, floor).expect("sum keeps the floor invariant")
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map(|c| c.neg())
    }

    pub fn mul_scalar(&self, k: &Scalar) -> Self {
        self.map(|c| c.mul_coeff(k))
    }

    fn map(&self, f: impl Fn(&DiffPoly<Scalar>) -> DiffPoly<Scalar>) -> Self {
        let coeffs = self.coeffs.iter().map(|(j, c)| (*j, f(c)));
        Self::new(self.r, coeffs, self.floor).expect("map keeps the floor invariant")
    }

    fn check(&self, other: &Self) {
        assert_eq!(self.r, other.r, "mixed ring contexts in operator arithmetic");
    }

    /// Drops every exponent below `floor` and records it.
    pub fn truncated(&self, floor: i64) -> Self {
        let floor = self.floor.map_or(floor, |f| f.max(floor));
        Self::new(self.r, self.coeffs.clone(), Some(floor)).expect("finite floor")
    }

    /// Differential part: exponents `>= 0`.
    pub fn plus_part(&self) -> Result<Self, PsdoError> {
        if let Some(f) = self.floor {
            if f > 0 {
                return Err(PsdoError::BelowFloor { needed: 0, floor: f });
            }
        }
        let coeffs = self.coeffs.range(0..).map(|(j, c)| (*j, c.clone()));
        Self::new(self.r, coeffs, None)
    }

    /// Coefficient of `D^{-1}`.
    pub fn residue(&self) -> Result<DiffPoly<Scalar>, PsdoError> {
        self.coeff(-1)
    }

    /// Operator product, exact down to the floor implied by both inputs.
    pub fn compose(&self, other: &Self) -> Self {
        self.check(other);
        let floor = match (self.floor, other.floor) {
            (None, None) => None,
            _ => {
                let (Some(ta), Some(tb)) = (self.top_bound(), other.top_bound()) else {
                    // one side is exactly zero
                    return PsdoOperator::zero(self.r);
                };
                let a = self.floor.map(|f| f + tb);
                let b = other.floor.map(|f| ta + f);
                a.max(b)
            }
        };
        self.compose_to(other, floor, None)
    }

    /// Part of the product coming from the `k`-th Leibniz term only.
    ///
    /// Keeps `C(i,k) ε^k a b^{(k)} D^{i+j-k}` alone; summing all grades
    /// recovers [`compose`](Self::compose).
    pub fn compose_grade(&self, other: &Self, grade: u32) -> Self {
        let full = self.compose(other);
        self.compose_to(other, full.floor, Some(grade))
    }

    fn compose_to(&self, other: &Self, floor: Option<i64>, grade: Option<u32>) -> Self {
        let r = self.r;
        let mut out: BTreeMap<i64, DiffPoly<Scalar>> = BTreeMap::new();
        for (&i, a) in &self.coeffs {
            for (&j, b) in &other.coeffs {
                let mut deriv = b.clone();
                let mut k = 0u32;
                loop {
                    let exp = i + j - k as i64;
                    if floor.is_some_and(|f| exp < f) || deriv.is_zero() {
                        break;
                    }
                    if i >= 0 && k as i64 > i {
                        break;
                    }
                    if floor.is_none() && i < 0 {
                        unreachable!("negative exponents always carry a floor");
                    }
                    if grade.is_none_or(|g| g == k) {
                        let c = Scalar::epsilon_pow(r, k).scale(&binomial(&int(i), k));
                        let term = a.mul(&deriv).mul_coeff(&c);
                        out.entry(exp).or_insert_with(|| DiffPoly::zero(r)).add_assign(&term);
                    }
                    if grade.is_some_and(|g| k >= g) {
                        break;
                    }
                    deriv = deriv.d_dx();
                    k += 1;
                }
            }
        }
        Self::new(r, out, floor).expect("product keeps the floor invariant")
    }

    /// `self^k` by repeated composition; `k = 0` gives the identity.
    pub fn power(&self, k: u32) -> Self {
        let mut acc = Self::d_power(self.r, 0, None).expect("identity");
        for _ in 0..k {
            acc = acc.compose(self);
        }
        acc
    }

    /// Commutator `[self, other]`.
    pub fn commutator(&self, other: &Self) -> Self {
        self.compose(other).sub(&other.compose(self))
    }
}

fn join_floors(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

fn u_scalar(r: u32, m: u32) -> DiffPoly<Scalar> {
    DiffPoly::monomial(r, DMonomial::from_factors([(USym::new(m, 0), 1)]), Scalar::one(r))
}

/// `L = D^r - Σ_{m=0}^{r-2} u_m D^m`.
pub fn canonical_l(r: u32) -> PsdoOperator {
    assert!(r >= 2, "r must be at least 2");
    let mut coeffs = vec![(r as i64, DiffPoly::constant(r, Scalar::one(r)))];
    for m in 0..r.saturating_sub(1) {
        coeffs.push((m as i64, u_scalar(r, m).neg()));
    }
    PsdoOperator::new(r, coeffs, None).expect("differential operator")
}

fn check_monic(l: &PsdoOperator) -> Result<(), PsdoError> {
    let r = l.r;
    let monic = l.floor.is_none()
        && l.top_order() == Some(r as i64)
        && l.coeffs[&(r as i64)] == DiffPoly::constant(r, Scalar::one(r));
    if monic {
        Ok(())
    } else {
        Err(PsdoError::NotCanonical {
            expected: r,
            found: l.to_string(),
        })
    }
}

/// The unique `R = D + Σ_{k>=1} w_k D^{-k}` with `R^r = L`, computed down to
/// `D^{1-depth}`.
pub fn rth_root(l: &PsdoOperator, depth: u32) -> Result<PsdoOperator, PsdoError> {
    check_monic(l)?;
    let r = l.r;
    let mut root = PsdoOperator::d_power(r, 1, None)?;
    // determine the coefficient of D^e, e = 0, -1, ..., 1 - depth
    for step in 1..=depth as i64 {
        let e = 1 - step;
        let target = r as i64 - 1 + e;
        let approx = root.truncated(e + 1);
        // coefficient of D^{r-1+e} in approx^r, treating missing terms as zero
        // partial products lose one order of room per remaining factor
        let mut pow = PsdoOperator::d_power(r, 0, None)?;
        for k in 1..=r {
            pow = pow.compose_to(&approx, Some(target - (r - k) as i64), None);
        }
        let w = l.coeff(target)?.sub(&pow.coeff(target)?).scale(&rat(1, r as i64));
        let mut coeffs = root.coeffs.clone();
        coeffs.insert(e, w);
        root = PsdoOperator::new(r, coeffs, Some(e))?;
    }
    Ok(root)
}

/// `L^{n + (m+1)/r}`, i.e. `L^n ∘ R^{m+1}` for the root `R`.
pub fn frac_power(l: &PsdoOperator, n: u32, m: u32, depth: u32) -> Result<PsdoOperator, PsdoError> {
    let r = l.r;
    if m >= r {
        return Err(PsdoError::InvalidIndex { r, m });
    }
    if m == r - 1 {
        check_monic(l)?;
        return Ok(l.power(n + 1));
    }
    let root = rth_root(l, depth)?;
    Ok(l.power(n).compose(&root.power(m + 1)))
}

/// `k_{n,m} = (-1)^n r^{n+1} / ((m+1)(r+m+1)...(nr+m+1))`.
pub fn k_constant(r: u32, n: u32, m: u32) -> Rational {
    let mut denom = int(1);
    for j in 0..=n {
        denom *= int((j * r + m + 1) as i64);
    }
    let sign = if n.is_multiple_of(2) { 1 } else { -1 };
    int(sign) * num_traits::pow(int(r as i64), (n + 1) as usize) / denom
}

/// Smallest root depth for which the plus part of `L^{n+(m+1)/r}` is exact.
pub fn required_depth(r: u32, n: u32, m: u32) -> u32 {
    (r * n + m + 1).max(1)
}

/// `∂L/∂t_n^m = -k_{n,m} ε [(L^{n+(m+1)/r})_+, L]`.
pub fn kdv_flow_rhs(l: &PsdoOperator, n: u32, m: u32, depth: u32) -> Result<PsdoOperator, PsdoError> {
    let r = l.r;
    let power = frac_power(l, n, m, depth)?;
    let plus = power.plus_part()?;
    let k = Scalar::epsilon(r).scale(&-k_constant(r, n, m));
    let rhs = plus.commutator(l).mul_scalar(&k);
    if let Some((&j, _)) = rhs.coeffs.iter().find(|(&j, _)| j < 0 || j > r as i64 - 2) {
        return Err(PsdoError::NotLaxForm { n, m, exponent: j });
    }
    Ok(rhs)
}

/// The flow equations `∂u_j/∂t_n^m` for `L = canonical_l(r)`.
///
/// A term with `d` derivatives carries `ε^{d-1}`, so only the terms with a
/// single derivative survive the semiclassical limit.
pub fn flow_equations(r: u32, n: u32, m: u32) -> Result<BTreeMap<u32, DiffPoly<Scalar>>, PsdoError> {
    let depth = required_depth(r, n, m).max(default_depth(r));
    let rhs = kdv_flow_rhs(&canonical_l(r), n, m, depth)?;
    // L_t = -Σ (u_j)_t D^j
    (0..r - 1).map(|j| Ok((j, rhs.coeff(j as i64)?.neg()))).collect()
}

impl fmt::Display for PsdoOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_laurent(f, "D", &self.coeffs, self.floor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(r: u32, a: Rational, b: Rational) -> Scalar {
        Scalar::new(r, a, b)
    }

    fn u(r: u32, m: u32, k: u32) -> DiffPoly<Scalar> {
        DiffPoly::monomial(r, DMonomial::from_factors([(USym::new(m, k), 1)]), Scalar::one(r))
    }

    fn op(r: u32, terms: Vec<(i64, DiffPoly<Scalar>)>, floor: Option<i64>) -> PsdoOperator {
        PsdoOperator::new(r, terms, floor).unwrap()
    }

    #[test]
    fn d_after_function() {
        let r = 3;
        let d = PsdoOperator::d_power(r, 1, None).unwrap();
        let f = PsdoOperator::multiplication(u(r, 0, 0));
        let expect = op(
            r,
            vec![(1, u(r, 0, 0)), (0, u(r, 0, 1).mul_coeff(&Scalar::epsilon(r)))],
            None,
        );
        assert_eq!(d.compose(&f), expect);
    }

    #[test]
    fn d_times_inverse() {
        for floor in [-3, -6] {
            let d = PsdoOperator::d_power(2, 1, None).unwrap();
            let dinv = PsdoOperator::d_power(2, -1, Some(floor)).unwrap();
            let prod = d.compose(&dinv);
            assert_eq!(prod.coeffs().len(), 1);
            assert_eq!(prod.coeff(0).unwrap(), DiffPoly::constant(2, Scalar::one(2)));
            assert_eq!(prod.floor(), Some(floor + 1));
        }
    }

    #[test]
    fn inverse_after_function() {
        let r = 2;
        let floor = -5;
        let dinv = PsdoOperator::d_power(r, -1, Some(floor)).unwrap();
        let f = PsdoOperator::multiplication(u(r, 0, 0));
        let prod = dinv.compose(&f);
        // alternating series with ε^k u0^(k) D^{-1-k}
        for k in 0..4u32 {
            let sign = if k % 2 == 0 { 1 } else { -1 };
            let c = Scalar::epsilon_pow(r, k).scale(&int(sign));
            assert_eq!(prod.coeff(-1 - k as i64).unwrap(), u(r, 0, k).mul_coeff(&c));
        }
        // composing with D on the left gives back the multiplication operator
        let back = PsdoOperator::d_power(r, 1, None).unwrap().compose(&prod);
        assert_eq!(back.coeff(0).unwrap(), u(r, 0, 0));
        for j in back.floor().unwrap()..0 {
            assert!(back.coeff(j).unwrap().is_zero(), "D^{j}");
        }
    }

    #[test]
    fn canonical_forms() {
        assert_eq!(canonical_l(2).to_string(), "D^2 - u0");
        assert_eq!(canonical_l(3).to_string(), "D^3 - u1*D - u0");
        assert_eq!(canonical_l(4).to_string(), "D^4 - u2*D^2 - u1*D - u0");
    }

    #[test]
    fn square_root_r2() {
        let r = 2;
        let root = rth_root(&canonical_l(r), default_depth(r)).unwrap();
        assert_eq!(root.coeff(1).unwrap(), DiffPoly::constant(r, Scalar::one(r)));
        assert!(root.coeff(0).unwrap().is_zero());
        assert_eq!(root.coeff(-1).unwrap(), u(r, 0, 0).scale(&rat(-1, 2)));
        assert_eq!(root.coeff(-2).unwrap(), u(r, 0, 1).mul_coeff(&s(r, int(0), rat(1, 4))));
        assert_eq!(root.residue().unwrap(), u(r, 0, 0).scale(&rat(-1, 2)));
    }

    #[test]
    fn cube_root_r3() {
        let root = rth_root(&canonical_l(3), default_depth(3)).unwrap();
        assert_eq!(root.coeff(-1).unwrap(), u(3, 1, 0).scale(&rat(-1, 3)));
    }

    #[test]
    fn root_contract() {
        for r in 2..=4 {
            let l = canonical_l(r);
            let root = rth_root(&l, default_depth(r)).unwrap();
            let pow = root.power(r);
            let floor = pow.floor().unwrap();
            assert!(floor <= -(r as i64), "floor {floor}");
            assert_eq!(pow, l.truncated(floor), "r = {r}");
        }
    }

    #[test]
    fn root_rejects_non_monic() {
        let l = canonical_l(3).mul_scalar(&Scalar::from_int(3, 2));
        assert!(matches!(rth_root(&l, 4), Err(PsdoError::NotCanonical { .. })));
        let shifted = canonical_l(3).compose(&PsdoOperator::d_power(3, 1, None).unwrap());
        assert!(rth_root(&shifted, 4).is_err());
    }

    #[test]
    fn fractional_powers() {
        let l = canonical_l(2);
        assert_eq!(frac_power(&l, 0, 1, 6).unwrap(), l);
        let root = rth_root(&l, 6).unwrap();
        assert_eq!(frac_power(&l, 0, 0, 6).unwrap(), root);
        let p = frac_power(&l, 1, 0, 6).unwrap();
        assert_eq!(p.coeff(3).unwrap(), DiffPoly::constant(2, Scalar::one(2)));
        assert!(p.coeff(2).unwrap().is_zero());
        assert_eq!(p.coeff(1).unwrap(), u(2, 0, 0).scale(&rat(-3, 2)));
    }

    #[test]
    fn plus_part_and_residue() {
        let r = 2;
        let q = op(
            r,
            vec![(1, DiffPoly::constant(r, Scalar::one(r))), (-1, u(r, 0, 0))],
            Some(-4),
        );
        assert_eq!(q.plus_part().unwrap(), PsdoOperator::d_power(r, 1, None).unwrap());
        assert_eq!(q.residue().unwrap(), u(r, 0, 0));
        assert!(PsdoOperator::d_power(r, 2, None).unwrap().residue().unwrap().is_zero());
        let shallow = q.truncated(0);
        assert!(matches!(shallow.residue(), Err(PsdoError::BelowFloor { .. })));
    }

    #[test]
    fn k_values() {
        assert_eq!(k_constant(2, 0, 0), int(2));
        assert_eq!(k_constant(2, 1, 0), rat(-4, 3));
        assert_eq!(k_constant(3, 1, 1), rat(-9, 10));
        for r in 2..6 {
            for m in 0..r {
                assert_eq!(k_constant(r, 0, m), rat(r as i64, m as i64 + 1));
            }
        }
    }

    #[test]
    fn first_flow_is_x_translation() {
        for r in 2..=4 {
            let eqs = flow_equations(r, 0, 0).unwrap();
            for j in 0..r - 1 {
                let expect = u(r, j, 1);
                assert_eq!(eqs[&j], expect, "r = {r}, u{j}");
            }
        }
    }

    #[test]
    fn kdv_r2_flow() {
        let eqs = flow_equations(2, 1, 0).unwrap();
        let expect = u(2, 0, 0).mul(&u(2, 0, 1)).add(&u(2, 0, 3).scale(&rat(1, 12)));
        assert_eq!(eqs[&0], expect);
    }

    #[test]
    fn rendering_with_floor() {
        let root = rth_root(&canonical_l(2), 2).unwrap();
        assert_eq!(root.to_string(), "D - (1/2)*u0*D^-1 + O(D^-2)");
    }
}
