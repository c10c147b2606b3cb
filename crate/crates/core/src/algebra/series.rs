//! Sparse multivariate polynomials with optional total-degree truncation.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};

use super::rational::{factorial, format_rational, int, rat, Rational};
use super::{accumulate, AlgebraError, Coefficient};

/// A series variable: a small-phase coordinate `x^m` or a descendant
/// coordinate `t_a^m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    X(u32),
    T { a: u32, m: u32 },
}

impl Var {
    pub fn t(a: u32, m: u32) -> Var {
        Var::T { a, m }
    }

    /// Euler weight: `a - 1 + m/r` for `t_a^m`, `-1 + m/r` for `x^m`.
    pub fn weight(&self, r: u32) -> Rational {
        let (a, m) = match *self {
            Var::X(m) => (0, m),
            Var::T { a, m } => (a, m),
        };
        int(a as i64 - 1) + rat(m as i64, r as i64)
    }

    /// Matter index `m`.
    pub fn matter(&self) -> u32 {
        match *self {
            Var::X(m) | Var::T { m, .. } => m,
        }
    }

    /// Descendant level (zero for `x^m`).
    pub fn level(&self) -> u32 {
        match *self {
            Var::X(_) => 0,
            Var::T { a, .. } => a,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::X(m) => write!(f, "x{m}"),
            Var::T { a, m } => write!(f, "t{a}^{m}"),
        }
    }
}

impl FromStr for Var {
    type Err = AlgebraError;
    fn from_str(s: &str) -> Result<Var, AlgebraError> {
        let err = || AlgebraError::Parse {
            what: "variable",
            input: s.to_string(),
        };
        if let Some(rest) = s.strip_prefix('x') {
            return rest.parse().map(Var::X).map_err(|_| err());
        }
        let rest = s.strip_prefix('t').ok_or_else(err)?;
        let (a, m) = rest.split_once('^').ok_or_else(err)?;
        Ok(Var::T {
            a: a.parse().map_err(|_| err())?,
            m: m.parse().map_err(|_| err())?,
        })
    }
}

/// Sparse exponent vector, sorted by variable, no zero exponents.
///
/// Ordered by total degree, then lexicographically with larger powers of
/// earlier variables first (so `x0^2*x1` precedes `x0*x1^2`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(Var, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: Var) -> Self {
        Monomial(vec![(v, 1)])
    }

    pub fn from_exponents(exps: impl IntoIterator<Item = (Var, u32)>) -> Self {
        let mut map: BTreeMap<Var, u32> = BTreeMap::new();
        for (v, e) in exps {
            *map.entry(v).or_default() += e;
        }
        Monomial(map.into_iter().filter(|&(_, e)| e > 0).collect())
    }

    pub fn exponents(&self) -> &[(Var, u32)] {
        &self.0
    }

    pub fn exponent(&self, v: Var) -> u32 {
        self.0.iter().find(|(w, _)| *w == v).map_or(0, |&(_, e)| e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn weight(&self, r: u32) -> Rational {
        monomial_weight(self, r)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            let (a, b) = (self.0[i], other.0[j]);
            match a.0.cmp(&b.0) {
                Ordering::Less => {
                    out.push(a);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a.0, a.1 + b.1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    /// `∂/∂v` of the monomial: the exponent factor and the lowered monomial.
    pub fn derivative(&self, v: Var) -> Option<(u32, Monomial)> {
        let idx = self.0.iter().position(|(w, _)| *w == v)?;
        let e = self.0[idx].1;
        let mut out = self.0.clone();
        if e == 1 {
            out.remove(idx);
        } else {
            out[idx].1 -= 1;
        }
        Some((e, Monomial(out)))
    }

    /// Product of `k!` over all exponents.
    pub fn multiplicity_factorial(&self) -> Rational {
        self.0.iter().map(|&(_, e)| factorial(e)).product()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            let (mut i, mut j) = (0, 0);
            while i < self.0.len() && j < other.0.len() {
                let (a, b) = (self.0[i], other.0[j]);
                match a.0.cmp(&b.0) {
                    // `self` has a positive power of a variable absent in `other`
                    Ordering::Less => return Ordering::Less,
                    Ordering::Greater => return Ordering::Greater,
                    Ordering::Equal => match b.1.cmp(&a.1) {
                        Ordering::Equal => {
                            i += 1;
                            j += 1;
                        }
                        ord => return ord,
                    },
                }
            }
            // equal degrees and a common prefix imply equality
            (other.0.len() - j).cmp(&(self.0.len() - i))
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (idx, (v, e)) in self.0.iter().enumerate() {
            if idx > 0 {
                write!(f, "*")?;
            }
            match (v, e) {
                (_, 1) => write!(f, "{v}")?,
                (Var::X(_), e) => write!(f, "{v}^{e}")?,
                (Var::T { .. }, e) => write!(f, "({v})^{e}")?,
            }
        }
        Ok(())
    }
}

/// Weighted degree `Σ e_i · w(v_i)` under the Euler weights for `r`.
pub fn monomial_weight(m: &Monomial, r: u32) -> Rational {
    m.0.iter()
        .fold(Rational::zero(), |acc, &(v, e)| acc + v.weight(r) * int(e as i64))
}

/// Sparse polynomial in `x^m` / `t_a^m` with exact rational coefficients.
///
/// `truncation = Some(n)` means every term of total degree `<= n` is exact and
/// nothing above `n` is stored. `Some(-1)` marks a series with no known terms
/// (e.g. the derivative of something known only to degree 0).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedSeries {
    r: u32,
    variables: BTreeSet<Var>,
    terms: BTreeMap<Monomial, Rational>,
    truncation: Option<i32>,
}

impl GradedSeries {
    pub fn zero(r: u32) -> Self {
        GradedSeries {
            r,
            variables: BTreeSet::new(),
            terms: BTreeMap::new(),
            truncation: None,
        }
    }

    pub fn constant(r: u32, c: Rational) -> Self {
        let mut s = Self::zero(r);
        accumulate(&mut s.terms, Monomial::one(), c);
        s
    }

    pub fn one(r: u32) -> Self {
        Self::constant(r, Rational::one())
    }

    pub fn var(r: u32, v: Var) -> Self {
        let mut s = Self::zero(r);
        s.variables.insert(v);
        s.terms.insert(Monomial::var(v), Rational::one());
        s
    }

    /// Builds a series from terms. Every variable appearing in a term is added
    /// to the declared variable set.
    pub fn from_terms(
        r: u32,
        variables: impl IntoIterator<Item = Var>,
        terms: impl IntoIterator<Item = (Monomial, Rational)>,
        truncation: Option<i32>,
    ) -> Self {
        let mut s = Self::zero(r).with_variables(variables);
        for (m, c) in terms {
            s.variables.extend(m.0.iter().map(|&(v, _)| v));
            accumulate(&mut s.terms, m, c);
        }
        s.truncate(truncation)
    }

    pub fn with_variables(mut self, vars: impl IntoIterator<Item = Var>) -> Self {
        self.variables.extend(vars);
        self
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn variables(&self) -> &BTreeSet<Var> {
        &self.variables
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Rational> {
        &self.terms
    }

    pub fn truncation(&self) -> Option<i32> {
        self.truncation
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&Monomial::one())
    }

    /// Lowers the truncation to `n` (never raises it), dropping terms above.
    pub fn truncate(mut self, n: Option<i32>) -> Self {
        let t = min_trunc(self.truncation, n);
        if let Some(t) = t {
            self.terms.retain(|m, _| (m.degree() as i32) <= t);
        }
        self.truncation = t;
        self
    }

    pub fn truncated(self, n: u32) -> Self {
        self.truncate(Some(n as i32))
    }

    fn check_r(&self, other: &GradedSeries) {
        assert_eq!(self.r, other.r, "series from different ring contexts");
    }

    pub fn add(&self, other: &GradedSeries) -> GradedSeries {
        self.check_r(other);
        let mut out = self.clone();
        out.variables.extend(other.variables.iter().copied());
        for (m, c) in &other.terms {
            accumulate(&mut out.terms, m.clone(), c.clone());
        }
        out.truncate(other.truncation)
    }

    pub fn sub(&self, other: &GradedSeries) -> GradedSeries {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> GradedSeries {
        self.scale(&-Rational::one())
    }

    pub fn scale(&self, q: &Rational) -> GradedSeries {
        let mut out = self.clone();
        if q.is_zero() {
            out.terms.clear();
        } else {
            for c in out.terms.values_mut() {
                *c = &*c * q;
            }
        }
        out
    }

    pub fn mul(&self, other: &GradedSeries) -> GradedSeries {
        self.check_r(other);
        let trunc = min_trunc(self.truncation, other.truncation);
        let mut terms = BTreeMap::new();
        // group the right factor by degree so the inner loop can stop early
        let mut by_degree: Vec<(u32, &Monomial, &Rational)> =
            other.terms.iter().map(|(m, c)| (m.degree(), m, c)).collect();
        by_degree.sort_by_key(|&(d, _, _)| d);
        for (ma, ca) in &self.terms {
            let da = ma.degree() as i32;
            for &(db, mb, cb) in &by_degree {
                if let Some(t) = trunc {
                    if da + db as i32 > t {
                        break;
                    }
                }
                accumulate(&mut terms, ma.mul(mb), ca * cb);
            }
        }
        let mut variables = self.variables.clone();
        variables.extend(other.variables.iter().copied());
        GradedSeries {
            r: self.r,
            variables,
            terms,
            truncation: trunc,
        }
    }

    pub fn pow(&self, k: u32) -> GradedSeries {
        let mut acc = GradedSeries::one(self.r)
            .with_variables(self.variables.iter().copied())
            .truncate(self.truncation);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Formal partial derivative. Truncation metadata drops by one.
    pub fn partial(&self, v: Var) -> Result<GradedSeries, AlgebraError> {
        if !self.variables.contains(&v) {
            return Err(AlgebraError::UnknownVariable(v));
        }
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            if let Some((e, lowered)) = m.derivative(v) {
                accumulate(&mut terms, lowered, c * int(e as i64));
            }
        }
        Ok(GradedSeries {
            r: self.r,
            variables: self.variables.clone(),
            terms,
            truncation: self.truncation.map(|t| t - 1),
        })
    }

    /// Sets every variable not accepted by `keep` to zero.
    pub fn restrict(&self, keep: impl Fn(Var) -> bool) -> GradedSeries {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.0.iter().all(|&(v, _)| keep(v)))
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        GradedSeries {
            r: self.r,
            variables: self.variables.iter().copied().filter(|&v| keep(v)).collect(),
            terms,
            truncation: self.truncation,
        }
    }

    /// Renames variables monomial by monomial (the map must be injective).
    pub fn rename(&self, f: impl Fn(Var) -> Var) -> GradedSeries {
        GradedSeries::from_terms(
            self.r,
            self.variables.iter().map(|&v| f(v)),
            self.terms
                .iter()
                .map(|(m, c)| (Monomial::from_exponents(m.0.iter().map(|&(v, e)| (f(v), e))), c.clone())),
            self.truncation,
        )
    }

    /// The common weight of all terms, if the series is quasi-homogeneous.
    pub fn homogeneous_weight(&self) -> Option<Rational> {
        let mut weights = self.terms.keys().map(|m| m.weight(self.r));
        let first = weights.next()?;
        weights.all(|w| w == first).then_some(first)
    }

    /// `Σ_{k ≤ n} f^k / k!` truncated at total degree `n`.
    pub fn exp_truncated(&self, n: u32) -> Result<GradedSeries, AlgebraError> {
        let c0 = self.constant_term();
        if !c0.is_zero() {
            return Err(AlgebraError::NonzeroConstant(format_rational(&c0)));
        }
        let f = self.clone().truncated(n);
        let mut result = GradedSeries::one(self.r).with_variables(f.variables.iter().copied());
        let mut power = result.clone();
        for k in 1..=n {
            power = power.mul(&f);
            if power.is_zero() {
                break;
            }
            result = result.add(&power.scale(&(Rational::one() / factorial(k))));
        }
        Ok(result.truncate(f.truncation.or(Some(n as i32))))
    }

    /// `log f = Σ_{k ≥ 1} (-1)^{k+1} (f-1)^k / k` truncated at total degree `n`.
    pub fn log_truncated(&self, n: u32) -> Result<GradedSeries, AlgebraError> {
        let c0 = self.constant_term();
        if !c0.is_one() {
            return Err(AlgebraError::ConstantNotOne(format_rational(&c0)));
        }
        let g = self.sub(&GradedSeries::one(self.r)).truncated(n);
        let mut result = GradedSeries::zero(self.r).with_variables(g.variables.iter().copied());
        let mut power = GradedSeries::one(self.r);
        for k in 1..=n {
            power = power.mul(&g);
            if power.is_zero() {
                break;
            }
            let sign = if k % 2 == 1 { 1 } else { -1 };
            result = result.add(&power.scale(&rat(sign, k as i64)));
        }
        Ok(result.truncate(g.truncation.or(Some(n as i32))))
    }
}

fn min_trunc(a: Option<i32>, b: Option<i32>) -> Option<i32> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl fmt::Display for GradedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_sum(f, self.terms.iter().map(|(m, c)| (m.to_string(), m.is_one(), c)))
    }
}

/// Writes `c1*m1 + c2*m2 - ...`; shared by the other sparse containers.
pub(crate) fn write_sum<'a, C: Coefficient + 'a>(
    f: &mut fmt::Formatter<'_>,
    terms: impl Iterator<Item = (String, bool, &'a C)>,
) -> fmt::Result {
    let mut first = true;
    for (mono, is_unit, c) in terms {
        let negative = c.is_negative_coeff();
        let abs = if negative { c.neg_ref() } else { c.clone() };
        if first {
            if negative {
                write!(f, "-")?;
            }
        } else {
            write!(f, " {} ", if negative { "-" } else { "+" })?;
        }
        first = false;
        let coeff = if abs.is_compound() {
            format!("({abs})")
        } else {
            abs.to_string()
        };
        match (is_unit, abs.is_one_coeff()) {
            (true, _) => write!(f, "{coeff}")?,
            (false, true) => write!(f, "{mono}")?,
            (false, false) => write!(f, "{coeff}*{mono}")?,
        }
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(m: u32) -> GradedSeries {
        GradedSeries::var(3, Var::X(m))
    }

    #[test]
    fn partial_examples() {
        let f = x(0).mul(&x(0)).mul(&x(1));
        assert_eq!(f.partial(Var::X(1)).unwrap().terms(), x(0).mul(&x(0)).terms());
        let g = x(1).pow(4).scale(&rat(1, 72)).with_variables([Var::X(0)]);
        assert!(g.partial(Var::X(0)).unwrap().is_zero());
        let t = GradedSeries::var(2, Var::t(0, 0)).mul(&GradedSeries::var(2, Var::t(1, 0)));
        assert_eq!(
            t.partial(Var::t(0, 0)).unwrap().terms(),
            GradedSeries::var(2, Var::t(1, 0)).terms()
        );
        assert_eq!(x(0).partial(Var::X(2)), Err(AlgebraError::UnknownVariable(Var::X(2))));
    }

    #[test]
    fn weights_r3() {
        let m = Monomial::from_exponents([(Var::X(1), 4)]);
        assert_eq!(monomial_weight(&m, 3), rat(-8, 3));
        let m = Monomial::from_exponents([(Var::X(0), 2), (Var::X(1), 1)]);
        assert_eq!(monomial_weight(&m, 3), rat(-8, 3));
        assert_eq!(Var::t(2, 1).weight(3), rat(4, 3));
    }

    #[test]
    fn display_order() {
        let f = x(1)
            .pow(4)
            .scale(&rat(1, 72))
            .add(&x(0).mul(&x(0)).mul(&x(1)).scale(&rat(1, 2)));
        assert_eq!(f.to_string(), "1/2*x0^2*x1 + 1/72*x1^4");
        let g = x(0).sub(&x(1).scale(&rat(3, 2)));
        assert_eq!(g.to_string(), "x0 - 3/2*x1");
        assert_eq!(GradedSeries::zero(3).to_string(), "0");
        let t = GradedSeries::var(2, Var::t(0, 1)).pow(2);
        assert_eq!(t.to_string(), "(t0^1)^2");
    }

    #[test]
    fn monomial_order_is_graded_lex() {
        let a = Monomial::from_exponents([(Var::X(0), 2), (Var::X(2), 1)]);
        let b = Monomial::from_exponents([(Var::X(0), 1), (Var::X(1), 2)]);
        let c = Monomial::from_exponents([(Var::X(1), 4)]);
        assert!(a < b && b < c);
        assert!(Monomial::one() < a);
    }

    #[test]
    fn exp_examples() {
        let t = GradedSeries::var(2, Var::t(0, 0));
        let e = t.exp_truncated(2).unwrap();
        let expect = GradedSeries::one(2).add(&t).add(&t.pow(2).scale(&rat(1, 2)));
        assert_eq!(e.terms(), expect.terms());
        assert_eq!(e.truncation(), Some(2));
        assert_eq!(
            GradedSeries::zero(2).exp_truncated(3).unwrap().terms(),
            GradedSeries::one(2).terms()
        );
        assert!(GradedSeries::one(2).exp_truncated(3).is_err());
    }

    #[test]
    fn log_examples() {
        assert!(GradedSeries::one(2).log_truncated(4).unwrap().is_zero());
        let t = GradedSeries::var(2, Var::t(0, 0));
        let l = GradedSeries::one(2).add(&t).log_truncated(2).unwrap();
        assert_eq!(l.terms(), t.sub(&t.pow(2).scale(&rat(1, 2))).terms());
        assert!(t.log_truncated(2).is_err());
    }

    #[test]
    fn exp_log_round_trip_cubic() {
        let t = GradedSeries::var(2, Var::t(0, 0));
        let f = t.pow(3).scale(&rat(1, 6));
        let back = f.exp_truncated(4).unwrap().log_truncated(4).unwrap();
        assert_eq!(back.terms(), f.terms());
    }

    #[test]
    fn truncation_propagates() {
        let a = x(0).add(&x(1).pow(3)).truncated(5);
        let b = x(1).truncated(2);
        let p = a.mul(&b);
        assert_eq!(p.truncation(), Some(2));
        assert!(p.terms().keys().all(|m| m.degree() <= 2));
        assert_eq!(a.partial(Var::X(0)).unwrap().truncation(), Some(4));
    }

    #[test]
    fn var_text_round_trip() {
        for v in [Var::X(3), Var::t(0, 1), Var::t(12, 0)] {
            assert_eq!(v.to_string().parse::<Var>().unwrap(), v);
        }
        assert!("y1".parse::<Var>().is_err());
    }
}
