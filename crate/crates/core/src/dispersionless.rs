//! The semiclassical limit of the Gelfand–Dickey hierarchy: Laurent symbols
//! in a commuting variable `p`, Poisson brackets, the flat coordinates `v_n`
//! and a verifier for genus-zero potentials.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::algebra::{binomial, rat, AlgebraError, GradedSeries, Monomial, Rational, Var};
use crate::diffpoly::{write_laurent, DiffPoly, DiffPolyError};
use crate::psdo::{self, k_constant, PsdoError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DispersionlessError {
    #[error("symbol must be p^{expected} - Σ u_m p^m, got {found}")]
    NotCanonical { expected: u32, found: String },
    #[error("coefficient of p^{needed} requested but only exponents >= {floor} are known")]
    BelowFloor { needed: i64, floor: i64 },
    #[error("flow (n={n}, m={m}) produced a nonzero coefficient of p^{exponent}")]
    NotLaxForm { n: u32, m: u32, exponent: i64 },
    #[error("invalid index: {0}")]
    InvalidIndex(String),
    #[error("potential is only known through degree {have}; degree {need} is required")]
    InsufficientTruncation { have: i32, need: i32 },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    DiffPoly(#[from] DiffPolyError),
    #[error(transparent)]
    Psdo(#[from] PsdoError),
}

/// A Laurent series `Σ c_j p^j` with differential-polynomial coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct PSymbol {
    r: u32,
    coeffs: BTreeMap<i64, DiffPoly<Rational>>,
    /// Exponents below the floor are unknown; `None` means exact.
    floor: Option<i64>,
}

impl PSymbol {
    pub fn new(r: u32, coeffs: impl IntoIterator<Item = (i64, DiffPoly<Rational>)>, floor: Option<i64>) -> Self {
        let mut map: BTreeMap<i64, DiffPoly<Rational>> = BTreeMap::new();
        for (j, c) in coeffs {
            if floor.is_some_and(|f| j < f) {
                continue;
            }
            map.entry(j).or_insert_with(|| DiffPoly::zero(r)).add_assign(&c);
        }
        map.retain(|_, c| !c.is_zero());
        PSymbol { r, coeffs: map, floor }
    }

    pub fn zero(r: u32) -> Self {
        Self::new(r, [], None)
    }

    /// `c · p^j`.
    pub fn term(r: u32, j: i64, c: DiffPoly<Rational>) -> Self {
        Self::new(r, [(j, c)], None)
    }

    pub fn p_power(r: u32, j: i64) -> Self {
        Self::term(r, j, DiffPoly::constant(r, rat(1, 1)))
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn floor(&self) -> Option<i64> {
        self.floor
    }

    pub fn coeffs(&self) -> &BTreeMap<i64, DiffPoly<Rational>> {
        &self.coeffs
    }

    pub fn coeff(&self, j: i64) -> Result<DiffPoly<Rational>, DispersionlessError> {
        if let Some(f) = self.floor {
            if j < f {
                return Err(DispersionlessError::BelowFloor { needed: j, floor: f });
            }
        }
        Ok(self.coeffs.get(&j).cloned().unwrap_or_else(|| DiffPoly::zero(self.r)))
    }

    pub fn top_order(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    fn top_bound(&self) -> Option<i64> {
        match (self.top_order(), self.floor) {
            (Some(t), Some(f)) => Some(t.max(f - 1)),
            (t, None) => t,
            (None, Some(f)) => Some(f - 1),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let floor = match (self.floor, other.floor) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, None) => a,
            (None, b) => b,
        };
        Self::new(
            self.r,
            self.coeffs.iter().chain(&other.coeffs).map(|(j, c)| (*j, c.clone())),
            floor,
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&rat(-1, 1)))
    }

    pub fn scale(&self, q: &Rational) -> Self {
        Self::new(self.r, self.coeffs.iter().map(|(j, c)| (*j, c.scale(q))), self.floor)
    }

    pub fn truncated(&self, floor: i64) -> Self {
        let floor = self.floor.map_or(floor, |f| f.max(floor));
        Self::new(self.r, self.coeffs.clone(), Some(floor))
    }

    /// Commutative product; the floor follows the same rule as operator composition.
    pub fn mul(&self, other: &Self) -> Self {
        let floor = match (self.floor, other.floor) {
            (None, None) => None,
            _ => {
                let (Some(ta), Some(tb)) = (self.top_bound(), other.top_bound()) else {
                    return Self::zero(self.r);
                };
                self.floor.map(|f| f + tb).max(other.floor.map(|f| ta + f))
            }
        };
        let mut out: BTreeMap<i64, DiffPoly<Rational>> = BTreeMap::new();
        for (i, a) in &self.coeffs {
            for (j, b) in &other.coeffs {
                if floor.is_some_and(|f| i + j < f) {
                    continue;
                }
                out.entry(i + j)
                    .or_insert_with(|| DiffPoly::zero(self.r))
                    .add_assign(&a.mul(b));
            }
        }
        Self::new(self.r, out, floor)
    }

    pub fn d_dp(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|(j, c)| (j - 1, c.scale(&rat(*j, 1))));
        Self::new(self.r, coeffs, self.floor.map(|f| f - 1))
    }

    pub fn d_dx(&self) -> Self {
        Self::new(self.r, self.coeffs.iter().map(|(j, c)| (*j, c.d_dx())), self.floor)
    }

    /// Degrees `>= 0` (including `p^0`).
    pub fn plus_part(&self) -> Result<Self, DispersionlessError> {
        if let Some(f) = self.floor {
            if f > 0 {
                return Err(DispersionlessError::BelowFloor { needed: 0, floor: f });
            }
        }
        Ok(Self::new(
            self.r,
            self.coeffs.range(0..).map(|(j, c)| (*j, c.clone())),
            None,
        ))
    }

    /// Coefficient of `p^{-1}`.
    pub fn residue(&self) -> Result<DiffPoly<Rational>, DispersionlessError> {
        self.coeff(-1)
    }
}

impl fmt::Display for PSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_laurent(f, "p", &self.coeffs, self.floor)
    }
}

/// `{A, B} = ∂_p A ∂_x B - ∂_p B ∂_x A`.
pub fn poisson(a: &PSymbol, b: &PSymbol) -> PSymbol {
    a.d_dp().mul(&b.d_dx()).sub(&b.d_dp().mul(&a.d_dx()))
}

pub fn residue_p(q: &PSymbol) -> Result<DiffPoly<Rational>, DispersionlessError> {
    q.residue()
}

/// `L̃ = p^r - Σ_{m=0}^{r-2} u_m p^m`.
pub fn canonical_lt(r: u32) -> PSymbol {
    let mut coeffs = vec![(r as i64, DiffPoly::constant(r, rat(1, 1)))];
    for m in 0..r - 1 {
        coeffs.push((m as i64, DiffPoly::u(r, m).scale(&rat(-1, 1))));
    }
    PSymbol::new(r, coeffs, None)
}

fn check_canonical(lt: &PSymbol) -> Result<(), DispersionlessError> {
    let r = lt.r as i64;
    let ok = lt.floor.is_none()
        && lt.top_order() == Some(r)
        && lt.coeffs[&r] == DiffPoly::constant(lt.r, rat(1, 1))
        && !lt.coeffs.contains_key(&(r - 1))
        && lt.coeffs.keys().all(|&j| j >= 0);
    if ok {
        Ok(())
    } else {
        Err(DispersionlessError::NotCanonical {
            expected: lt.r,
            found: lt.to_string(),
        })
    }
}

/// `L̃^{n+(m+1)/r} = p^k (1 + X)^{k/r}` with `k = rn+m+1` and
/// `X = (L̃ - p^r)/p^r`, known for exponents `>= k - depth`.
pub fn sym_frac_power(lt: &PSymbol, n: u32, m: u32, depth: u32) -> Result<PSymbol, DispersionlessError> {
    check_canonical(lt)?;
    let r = lt.r;
    if m >= r {
        return Err(DispersionlessError::InvalidIndex(format!(
            "m = {m} must be below r = {r}"
        )));
    }
    let k = (r * n + m + 1) as i64;
    if m == r - 1 {
        let mut acc = PSymbol::p_power(r, 0);
        for _ in 0..=n {
            acc = acc.mul(lt);
        }
        return Ok(acc);
    }
    let depth = depth as i64;
    let x = PSymbol::new(
        r,
        lt.coeffs
            .iter()
            .filter(|(&j, _)| j != r as i64)
            .map(|(j, c)| (j - r as i64, c.clone())),
        None,
    );
    let exponent = rat(k, r as i64);
    let mut sum = PSymbol::p_power(r, 0);
    let mut x_pow = PSymbol::p_power(r, 0);
    // X has p-degree <= -2, so X^i only matters while -2i >= -depth
    for i in 1..=(depth / 2) as u32 {
        x_pow = x_pow.mul(&x).truncated(-depth);
        sum = sum.add(&x_pow.scale(&binomial(&exponent, i)));
    }
    let shifted = PSymbol::new(r, sum.coeffs.iter().map(|(j, c)| (j + k, c.clone())), None);
    Ok(shifted.truncated(k - depth))
}

/// `v_n = -(r/(n+1)) res_p L̃^{(n+1)/r}`, a polynomial in `u_0, …, u_{r-2}`.
pub fn v_of_u(r: u32, n: u32) -> Result<DiffPoly<Rational>, DispersionlessError> {
    if n + 2 > r {
        return Err(DispersionlessError::InvalidIndex(format!(
            "v{n} needs n <= r-2 = {}",
            r as i64 - 2
        )));
    }
    let power = sym_frac_power(&canonical_lt(r), 0, n, n + 2)?;
    Ok(power.residue()?.scale(&rat(-(r as i64), n as i64 + 1)))
}

/// The same coordinate computed from the full operator residue; its
/// derivative-free part agrees with [`v_of_u`].
pub fn v_of_u_full(r: u32, n: u32) -> Result<DiffPoly<crate::algebra::Scalar>, DispersionlessError> {
    let l = psdo::canonical_l(r);
    let power = psdo::frac_power(&l, 0, n, n + 2)?;
    Ok(power.residue()?.scale(&rat(-(r as i64), n as i64 + 1)))
}

/// Inverts the triangular change of coordinates. The polynomial for `u_m`
/// uses symbol index `n` for `v_n`.
pub fn u_of_v(r: u32) -> Result<BTreeMap<u32, DiffPoly<Rational>>, DispersionlessError> {
    let one = rat(1, 1);
    let mut solved: BTreeMap<u32, DiffPoly<Rational>> = BTreeMap::new();
    // v_n = u_{r-2-n} + (terms in u_j, j > r-2-n)
    for n in 0..r - 1 {
        let target = r - 2 - n;
        let v = v_of_u(r, n)?;
        let rest = v.sub(&DiffPoly::u(r, target));
        if rest
            .terms()
            .keys()
            .flat_map(|m| m.factors())
            .any(|(s, _)| s.m <= target)
        {
            return Err(DispersionlessError::InvalidIndex(format!("v{n} is not triangular")));
        }
        let rest_in_v = rest.compose(&solved, one.clone())?;
        solved.insert(target, DiffPoly::u(r, n).sub(&rest_in_v));
    }
    Ok(solved)
}

/// `∂L̃/∂t_n^m = (k_{n,m}/r) {(L̃^{n+(m+1)/r})_+, L̃}`.
pub fn kdv0_flow_rhs(lt: &PSymbol, n: u32, m: u32, depth: u32) -> Result<PSymbol, DispersionlessError> {
    let r = lt.r;
    let plus = sym_frac_power(lt, n, m, depth)?.plus_part()?;
    let rhs = poisson(&plus, lt).scale(&(k_constant(r, n, m) / rat(r as i64, 1)));
    if let Some(&j) = rhs.coeffs.keys().find(|&&j| j < 0 || j > r as i64 - 2) {
        return Err(DispersionlessError::NotLaxForm { n, m, exponent: j });
    }
    Ok(rhs)
}

/// `∂u_j/∂t_n^m` for the canonical symbol.
pub fn flow_equations(r: u32, n: u32, m: u32) -> Result<BTreeMap<u32, DiffPoly<Rational>>, DispersionlessError> {
    let depth = r * n + m + 1;
    let rhs = kdv0_flow_rhs(&canonical_lt(r), n, m, depth)?;
    (0..r - 1)
        .map(|j| Ok((j, rhs.coeff(j as i64)?.scale(&rat(-1, 1)))))
        .collect()
}

/// Residuals `∂u_j/∂t_n^m - (flow)_j` for `u_j` built from the genus-zero
/// potential through `v_m = ∂²Φ₀/∂t_0^0∂t_0^m`, truncated at degree `degree`.
pub fn verify_potential_flow(
    phi0: &GradedSeries,
    n: u32,
    m: u32,
    degree: u32,
) -> Result<BTreeMap<u32, GradedSeries>, DispersionlessError> {
    let r = phi0.r();
    if m + 1 >= r {
        return Err(DispersionlessError::InvalidIndex(format!(
            "flow m = {m} must be at most r-2"
        )));
    }
    let x = Var::t(0, 0);
    let phi = phi0
        .clone()
        .with_variables((0..r - 1).map(|b| Var::t(0, b)).chain([x, Var::t(n, m)]));
    let need = degree as i32 + 3;
    if let Some(have) = phi.truncation() {
        if have < need {
            return Err(DispersionlessError::InsufficientTruncation { have, need });
        }
    }
    let phi_x = phi.partial(x)?;
    let mut v: BTreeMap<u32, GradedSeries> = BTreeMap::new();
    for b in 0..r - 1 {
        v.insert(b, phi_x.partial(Var::t(0, b))?);
    }
    let mut u: BTreeMap<u32, GradedSeries> = BTreeMap::new();
    for (j, poly) in u_of_v(r)? {
        u.insert(j, poly.substitute(&v, x)?);
    }
    let flow = flow_equations(r, n, m)?;
    let mut out = BTreeMap::new();
    for (j, rhs) in flow {
        let lhs = u[&j].partial(Var::t(n, m))?;
        let rhs = rhs.substitute(&u, x)?;
        out.insert(j, lhs.sub(&rhs).truncated(degree));
    }
    Ok(out)
}

/// `∂Ψ/∂t_0^0 - ½ Σ η_{ab} t_0^a t_0^b - Σ t_{k+1}^b ∂Ψ/∂t_k^b`, truncated
/// at `degree`. Terms whose `t_{k+1}^b` is not a variable of `Ψ` are dropped.
pub fn string_residual(psi: &GradedSeries, r: u32, degree: u32) -> Result<GradedSeries, DispersionlessError> {
    let x = Var::t(0, 0);
    let psi = psi.clone().with_variables((0..r - 1).map(|b| Var::t(0, b)));
    let mut out = psi.partial(x)?;
    let mut quad = GradedSeries::zero(r).with_variables(psi.variables().iter().copied());
    for a in 0..r - 1 {
        let b = r - 2 - a;
        let mono = Monomial::from_exponents([(Var::t(0, a), 1), (Var::t(0, b), 1)]);
        quad = quad.add(&GradedSeries::from_terms(r, [], [(mono, rat(1, 2))], None));
    }
    out = out.sub(&quad);
    for var in psi.variables().clone() {
        let Var::T { a, m } = var else { continue };
        let next = Var::t(a + 1, m);
        if !psi.variables().contains(&next) {
            continue;
        }
        out = out.sub(&GradedSeries::var(r, next).mul(&psi.partial(var)?));
    }
    Ok(out.truncated(degree))
}
