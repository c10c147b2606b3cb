//! Differential polynomials in `u_0, …, u_{r-2}` and their `x`-derivatives.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{accumulate, int, Coefficient, GradedSeries, Rational, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiffPolyError {
    #[error("no series assigned to u{0}")]
    MissingAssignment(u32),
    #[error(transparent)]
    Algebra(#[from] crate::algebra::AlgebraError),
    #[error("symbol u{m}^({order}) is not allowed here: only order 0 can be substituted by polynomials")]
    DerivativeInPolynomialSubstitution { m: u32, order: u32 },
}

/// The symbol `u_m^{(k)}`, the `k`-th `x`-derivative of `u_m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct USym {
    #[serde(rename = "symbol", with = "usym_name")]
    pub m: u32,
    pub order: u32,
}

mod usym_name {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &u32, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format!("u{m}"))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u32, D::Error> {
        let s = String::deserialize(d)?;
        s.strip_prefix('u')
            .and_then(|rest| rest.parse().ok())
            .ok_or_else(|| serde::de::Error::custom(format!("bad symbol {s:?}")))
    }
}

impl USym {
    pub fn new(m: u32, order: u32) -> Self {
        USym { m, order }
    }
}

impl fmt::Display for USym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "u{}{}", self.m, "'".repeat(self.order as usize))
    }
}

/// Sorted list of `(symbol, power)` pairs.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct DMonomial(Vec<(USym, u32)>);

impl DMonomial {
    pub fn one() -> Self {
        DMonomial(Vec::new())
    }

    pub fn from_factors(factors: impl IntoIterator<Item = (USym, u32)>) -> Self {
        let mut map: BTreeMap<USym, u32> = BTreeMap::new();
        for (s, e) in factors {
            *map.entry(s).or_default() += e;
        }
        DMonomial(map.into_iter().filter(|&(_, e)| e > 0).collect())
    }

    pub fn factors(&self) -> &[(USym, u32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &DMonomial) -> DMonomial {
        DMonomial::from_factors(self.0.iter().chain(other.0.iter()).copied())
    }

    /// Total number of x-derivatives in the monomial.
    pub fn derivative_count(&self) -> u32 {
        self.0.iter().map(|&(s, e)| s.order * e).sum()
    }
}

impl fmt::Display for DMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (idx, (s, e)) in self.0.iter().enumerate() {
            if idx > 0 {
                write!(f, "*")?;
            }
            if *e == 1 {
                write!(f, "{s}")?;
            } else {
                write!(f, "{s}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Polynomial in the symbols `u_m^{(k)}` with coefficients in `C`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiffPoly<C> {
    r: u32,
    terms: BTreeMap<DMonomial, C>,
}

impl<C: Coefficient> DiffPoly<C> {
    pub fn zero(r: u32) -> Self {
        DiffPoly {
            r,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(r: u32, c: C) -> Self {
        let mut p = Self::zero(r);
        accumulate(&mut p.terms, DMonomial::one(), c);
        p
    }

    pub fn monomial(r: u32, m: DMonomial, c: C) -> Self {
        let mut p = Self::zero(r);
        accumulate(&mut p.terms, m, c);
        p
    }

    pub fn from_terms(r: u32, terms: impl IntoIterator<Item = (DMonomial, C)>) -> Self {
        let mut p = Self::zero(r);
        for (m, c) in terms {
            accumulate(&mut p.terms, m, c);
        }
        p
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn terms(&self) -> &BTreeMap<DMonomial, C> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &DMonomial) -> Option<&C> {
        self.terms.get(m)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (m, c) in &other.terms {
            accumulate(&mut self.terms, m.clone(), c.clone());
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| c.neg_ref())
    }

    pub fn scale(&self, q: &Rational) -> Self {
        self.map_coeffs(|c| c.scale(q))
    }

    pub fn mul_coeff(&self, k: &C) -> Self {
        self.map_coeffs(|c| c.mul_ref(k))
    }

    pub fn map_coeffs<D: Coefficient>(&self, f: impl Fn(&C) -> D) -> DiffPoly<D> {
        DiffPoly::from_terms(self.r, self.terms.iter().map(|(m, c)| (m.clone(), f(c))))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut terms = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                accumulate(&mut terms, ma.mul(mb), ca.mul_ref(cb));
            }
        }
        DiffPoly { r: self.r, terms }
    }

    pub fn pow(&self, k: u32, one: C) -> Self {
        let mut acc = Self::constant(self.r, one);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// The derivation `∂_x`, sending `u_m^{(k)}` to `u_m^{(k+1)}`.
    pub fn d_dx(&self) -> Self {
        let mut terms = BTreeMap::new();
        for (mono, c) in &self.terms {
            for (idx, &(sym, e)) in mono.0.iter().enumerate() {
                let mut factors = mono.0.clone();
                if e == 1 {
                    factors.remove(idx);
                } else {
                    factors[idx].1 -= 1;
                }
                factors.push((USym::new(sym.m, sym.order + 1), 1));
                accumulate(&mut terms, DMonomial::from_factors(factors), c.scale(&int(e as i64)));
            }
        }
        DiffPoly { r: self.r, terms }
    }

    /// `k`-fold `∂_x`.
    pub fn d_dx_n(&self, k: u32) -> Self {
        (0..k).fold(self.clone(), |p, _| p.d_dx())
    }

    /// Partial derivative with respect to the symbol `s` (treated as independent).
    pub fn partial(&self, s: USym) -> Self {
        let mut terms = BTreeMap::new();
        for (mono, c) in &self.terms {
            if let Some(idx) = mono.0.iter().position(|&(t, _)| t == s) {
                let e = mono.0[idx].1;
                let mut factors = mono.0.clone();
                if e == 1 {
                    factors.remove(idx);
                } else {
                    factors[idx].1 -= 1;
                }
                accumulate(&mut terms, DMonomial(factors), c.scale(&int(e as i64)));
            }
        }
        DiffPoly { r: self.r, terms }
    }

    /// Largest derivative order appearing.
    pub fn max_order(&self) -> u32 {
        self.terms
            .keys()
            .flat_map(|m| m.0.iter().map(|(s, _)| s.order))
            .max()
            .unwrap_or(0)
    }

    /// Derivative of `self` along the evolution `∂_t u_m = flow[m]`:
    /// `Σ ∂self/∂u_m^{(k)} · ∂_x^k flow[m]`.
    pub fn evolve(&self, flow: &BTreeMap<u32, DiffPoly<C>>) -> Self {
        let mut out = Self::zero(self.r);
        let symbols: std::collections::BTreeSet<USym> =
            self.terms.keys().flat_map(|m| m.0.iter().map(|(s, _)| *s)).collect();
        for s in symbols {
            if let Some(g) = flow.get(&s.m) {
                out.add_assign(&self.partial(s).mul(&g.d_dx_n(s.order)));
            }
        }
        out
    }

    /// Variational derivative `Σ_k (-∂_x)^k ∂self/∂u_m^{(k)}`; vanishes for
    /// every `m` exactly when `self` is a total `x`-derivative.
    pub fn variational_derivative(&self, m: u32) -> Self {
        let mut out = Self::zero(self.r);
        for k in 0..=self.max_order() {
            let mut term = self.partial(USym::new(m, k)).d_dx_n(k);
            if k % 2 == 1 {
                term = term.neg();
            }
            out.add_assign(&term);
        }
        out
    }

    /// Substitutes order-0 symbols by polynomials (`u_m ↦ images[m]`).
    pub fn compose(&self, images: &BTreeMap<u32, DiffPoly<C>>, one: C) -> Result<Self, DiffPolyError> {
        let mut out = Self::zero(self.r);
        for (mono, c) in &self.terms {
            let mut term = Self::constant(self.r, c.clone());
            for &(s, e) in &mono.0 {
                if s.order != 0 {
                    return Err(DiffPolyError::DerivativeInPolynomialSubstitution { m: s.m, order: s.order });
                }
                let image = images.get(&s.m).ok_or(DiffPolyError::MissingAssignment(s.m))?;
                term = term.mul(&image.pow(e, one.clone()));
            }
            out.add_assign(&term);
        }
        Ok(out)
    }
}

impl DiffPoly<Rational> {
    /// The symbol `u_m` itself.
    pub fn u(r: u32, m: u32) -> Self {
        Self::monomial(
            r,
            DMonomial::from_factors([(USym::new(m, 0), 1)]),
            Rational::from_integer(1.into()),
        )
    }

    /// Plugs series into the symbols: `u_m^{(k)}` becomes the `k`-fold
    /// derivative of `assignment[m]` with respect to `x`.
    pub fn substitute(&self, assignment: &BTreeMap<u32, GradedSeries>, x: Var) -> Result<GradedSeries, DiffPolyError> {
        let mut cache: HashMap<USym, GradedSeries> = HashMap::new();
        let r = assignment.values().next().map_or(self.r, GradedSeries::r);
        let mut variables: Vec<Var> = assignment
            .values()
            .flat_map(|s| s.variables().iter().copied())
            .collect();
        variables.push(x);
        let mut out = GradedSeries::zero(r).with_variables(variables.iter().copied());
        for (mono, c) in &self.terms {
            let mut term = GradedSeries::constant(r, c.clone()).with_variables(variables.iter().copied());
            for &(s, e) in &mono.0 {
                if let std::collections::hash_map::Entry::Vacant(e) = cache.entry(s) {
                    let base = assignment.get(&s.m).ok_or(DiffPolyError::MissingAssignment(s.m))?;
                    let mut d = base.clone().with_variables([x]);
                    for _ in 0..s.order {
                        d = d.partial(x)?;
                    }
                    e.insert(d);
                }
                let factor = &cache[&s];
                for _ in 0..e {
                    term = term.mul(factor);
                }
            }
            out = out.add(&term);
        }
        // the result is only as precise as every series that entered it
        let trunc = mono_trunc(self, assignment, &cache);
        Ok(out.truncate(trunc))
    }
}

fn mono_trunc(
    p: &DiffPoly<Rational>,
    assignment: &BTreeMap<u32, GradedSeries>,
    cache: &HashMap<USym, GradedSeries>,
) -> Option<i32> {
    p.terms
        .keys()
        .flat_map(|m| m.0.iter())
        .filter_map(|(s, _)| {
            cache
                .get(s)
                .or_else(|| assignment.get(&s.m))
                .and_then(|g| g.truncation())
        })
        .min()
}

impl<C: Coefficient> fmt::Display for DiffPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        crate::algebra::write_sum(f, self.terms.iter().map(|(m, c)| (m.to_string(), m.is_one(), c)))
    }
}

/// Writes `Σ c_j V^j` in descending exponent order, `V` being `D` or `p`.
pub(crate) fn write_laurent<C: Coefficient>(
    f: &mut fmt::Formatter<'_>,
    var: &str,
    coeffs: &BTreeMap<i64, DiffPoly<C>>,
    floor: Option<i64>,
) -> fmt::Result {
    let mut first = true;
    for (&j, poly) in coeffs.iter().rev() {
        let power = match j {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{j}"),
        };
        let (negative, body) = render_coefficient(poly);
        let sep = match (first, negative) {
            (true, true) => "-",
            (true, false) => "",
            (false, true) => " - ",
            (false, false) => " + ",
        };
        first = false;
        let text = match (body.as_str(), power.is_empty()) {
            ("1", true) => "1".to_string(),
            ("1", false) => power,
            (b, true) => b.to_string(),
            (b, false) => format!("{b}*{power}"),
        };
        write!(f, "{sep}{text}")?;
    }
    if first {
        write!(f, "0")?;
    }
    if let Some(fl) = floor {
        write!(f, " + O({var}^{})", fl - 1)?;
    }
    Ok(())
}

/// Renders one coefficient of a Laurent sum, pulling out the sign when the
/// coefficient is a single term.
fn render_coefficient<C: Coefficient>(poly: &DiffPoly<C>) -> (bool, String) {
    if poly.terms().len() != 1 {
        return (false, format!("({poly})"));
    }
    let (mono, c) = poly.terms().iter().next().expect("one term");
    let negative = c.is_negative_coeff();
    let abs = if negative { c.neg_ref() } else { c.clone() };
    let coeff = if abs.is_one_coeff() {
        None
    } else {
        let text = abs.to_string();
        Some(if abs.is_compound() || text.contains('/') {
            format!("({text})")
        } else {
            text
        })
    };
    let text = match (coeff, mono.is_one()) {
        (None, true) => "1".to_string(),
        (None, false) => mono.to_string(),
        (Some(c), true) => c,
        (Some(c), false) => format!("{c}*{mono}"),
    };
    (negative, text)
}
