//! Genus-zero small phase space: primary three- and four-point correlators,
//! the WDVV solver for `Φ₀(x)` and the Frobenius algebra it defines.
//!
//! The state space is `e_0, …, e_{r-2}` with `η(e_a, e_b) = δ_{a+b, r-2}`
//! (coupling `λ = 1/√r`). Insertions with `m = r-1` decouple and give zero.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::algebra::{int, rat, solve_linear_system, GradedSeries, LinearSolution, Monomial, Rational, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CohftError {
    #[error("r must be at least 2, got {0}")]
    InvalidRank(u32),
    #[error("WDVV equations at degree {degree} are inconsistent")]
    Inconsistent { degree: u32 },
    #[error("WDVV equations at degree {degree} leave {free} of {unknowns} coefficients undetermined")]
    Underdetermined { degree: u32, unknowns: usize, free: usize },
    #[error("solved potential fails WDVV at {0:?}")]
    ResidualNonzero((u32, u32, u32, u32)),
}

/// `λ² = 1/r`: the coupling is fixed to `λ = 1/√r`.
pub fn lambda_squared(r: u32) -> Rational {
    rat(1, r as i64)
}

/// The pairing `η_{ab} = δ_{a+b, r-2}`; it is its own inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MetricEta {
    pub r: u32,
}

impl MetricEta {
    pub fn new(r: u32) -> Self {
        MetricEta { r }
    }

    pub fn rank(&self) -> u32 {
        self.r - 1
    }

    pub fn entry(&self, a: u32, b: u32) -> Rational {
        int((a + b == self.r - 2) as i64)
    }

    pub fn inverse_entry(&self, a: u32, b: u32) -> Rational {
        self.entry(a, b)
    }

    /// The unique `b` with `η_{ab} ≠ 0`.
    pub fn dual(&self, a: u32) -> u32 {
        self.r - 2 - a
    }
}

/// Small phase space coordinate `x^m`.
pub fn x(m: u32) -> Var {
    Var::X(m)
}

/// `⟨τ_{0,m1} τ_{0,m2} τ_{0,m3}⟩_0 = δ_{m1+m2+m3, r-2}`.
pub fn three_point(r: u32, m1: u32, m2: u32, m3: u32) -> Rational {
    if [m1, m2, m3].iter().any(|&m| m >= r - 1) {
        return int(0);
    }
    int((m1 + m2 + m3 == r - 2) as i64)
}

/// `⟨τ_{0,m1} … τ_{0,m4}⟩_0 = (1/r) min_i min(m_i, r-1-m_i)` when
/// `Σ m_i = 2r-2`, and zero otherwise.
pub fn four_point(r: u32, m: [u32; 4]) -> Rational {
    if m.iter().any(|&mi| mi >= r - 1) || m.iter().sum::<u32>() != 2 * r - 2 {
        return int(0);
    }
    let min = m.iter().map(|&mi| mi.min(r - 1 - mi)).min().expect("four entries");
    rat(min as i64, r as i64)
}

/// Monomials in `x^0..x^{r-2}` of total degree `degree` with index sum `sum`.
pub fn monomials_with_sum(r: u32, degree: u32, sum: u32) -> Vec<Monomial> {
    fn go(r: u32, start: u32, left: u32, sum: u32, acc: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if left == 0 {
            if sum == 0 {
                let mut counts: BTreeMap<u32, u32> = BTreeMap::new();
                for &m in acc.iter() {
                    *counts.entry(m).or_default() += 1;
                }
                out.push(Monomial::from_exponents(counts.into_iter().map(|(m, e)| (x(m), e))));
            }
            return;
        }
        for m in start..r - 1 {
            if m * left > sum {
                break;
            }
            acc.push(m);
            go(r, m, left - 1, sum - m, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    go(r, 0, degree, sum, &mut Vec::new(), &mut out);
    out
}

/// Index sum of a degree-`n` monomial of weight `-2(r+1)/r`, if non-negative.
fn weight_sum(r: u32, n: u32) -> Option<u32> {
    (r as i64 * (n as i64 - 2) - 2).try_into().ok()
}

fn indices(mono: &Monomial) -> Vec<u32> {
    mono.exponents()
        .iter()
        .flat_map(|&(v, e)| std::iter::repeat_n(v.matter(), e as usize))
        .collect()
}

/// The potential `Φ₀(x)` together with its third derivatives.
#[derive(Clone, Debug, PartialEq)]
pub struct FrobeniusData {
    r: u32,
    potential: GradedSeries,
    /// `Φ_{abc}` for `a <= b <= c`.
    third: BTreeMap<(u32, u32, u32), GradedSeries>,
}

impl FrobeniusData {
    pub fn from_potential(r: u32, potential: GradedSeries) -> Self {
        let potential = potential.with_variables((0..r - 1).map(x));
        let mut third = BTreeMap::new();
        for a in 0..r - 1 {
            let pa = potential.partial(x(a)).expect("declared variable");
            for b in a..r - 1 {
                let pab = pa.partial(x(b)).expect("declared variable");
                for c in b..r - 1 {
                    third.insert((a, b, c), pab.partial(x(c)).expect("declared variable"));
                }
            }
        }
        FrobeniusData { r, potential, third }
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn potential(&self) -> &GradedSeries {
        &self.potential
    }

    pub fn eta(&self) -> MetricEta {
        MetricEta::new(self.r)
    }

    /// `∂_a ∂_b ∂_c Φ₀`.
    pub fn third_derivative(&self, a: u32, b: u32, c: u32) -> &GradedSeries {
        let mut k = [a, b, c];
        k.sort_unstable();
        &self.third[&(k[0], k[1], k[2])]
    }

    /// Coefficients of `e_a ∘ e_b = Φ_{abd} η^{dc} e_c`, indexed by `c`.
    pub fn product(&self, a: u32, b: u32) -> Vec<GradedSeries> {
        let eta = self.eta();
        (0..self.r - 1)
            .map(|c| self.third_derivative(a, b, eta.dual(c)).clone())
            .collect()
    }

    /// `Φ_{abe} η^{ef} Φ_{fcd} - Φ_{ace} η^{ef} Φ_{fbd}` for every `(a, b, c, d)`.
    pub fn wdvv_residual(&self) -> Vec<((u32, u32, u32, u32), GradedSeries)> {
        let n = self.r - 1;
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        out.push(((a, b, c, d), wdvv_entry(self, self, a, b, c, d)));
                    }
                }
            }
        }
        out
    }

    /// True when every WDVV residual vanishes.
    pub fn is_associative(&self) -> bool {
        self.wdvv_residual().iter().all(|(_, s)| s.is_zero())
    }
}

fn wdvv_entry(p: &FrobeniusData, q: &FrobeniusData, a: u32, b: u32, c: u32, d: u32) -> GradedSeries {
    let eta = p.eta();
    let mut out = GradedSeries::zero(p.r);
    for e in 0..p.r - 1 {
        let f = eta.dual(e);
        let lhs = p.third_derivative(a, b, e).mul(q.third_derivative(f, c, d));
        let rhs = p.third_derivative(a, c, e).mul(q.third_derivative(f, b, d));
        out = out.add(&lhs.sub(&rhs));
    }
    out
}

/// `e_a ∘ e_b` for a potential; see [`FrobeniusData::product`].
pub fn frobenius_product(f: &FrobeniusData, a: u32, b: u32) -> Vec<GradedSeries> {
    f.product(a, b)
}

pub fn wdvv_residual(f: &FrobeniusData) -> Vec<((u32, u32, u32, u32), GradedSeries)> {
    f.wdvv_residual()
}

/// Cubic and quartic parts of `Φ₀` from the primary correlators.
fn known_low_degree(r: u32) -> (GradedSeries, GradedSeries) {
    let vars = (0..r - 1).map(x);
    let cubic: Vec<(Monomial, Rational)> = monomials_with_sum(r, 3, r - 2)
        .into_iter()
        .map(|mono| {
            let m = indices(&mono);
            let c = three_point(r, m[0], m[1], m[2]) / mono.multiplicity_factorial();
            (mono, c)
        })
        .collect();
    let quartic: Vec<(Monomial, Rational)> = monomials_with_sum(r, 4, 2 * r - 2)
        .into_iter()
        .map(|mono| {
            let m = indices(&mono);
            let c = four_point(r, [m[0], m[1], m[2], m[3]]) / mono.multiplicity_factorial();
            (mono, c)
        })
        .collect();
    (
        GradedSeries::from_terms(r, vars.clone(), cubic, None),
        GradedSeries::from_terms(r, vars, quartic, None),
    )
}

/// Solves for the genus-zero small phase space potential.
///
/// Cubic and quartic terms come from [`three_point`] and [`four_point`]. Each
/// higher degree `d` has one unknown per monomial of the right weight without
/// `x^0` (the flat identity forces `Φ_{0ab} = η_{ab}`), fixed by the degree
/// `d-3` part of WDVV, which is linear in them once lower degrees are known.
pub fn solve_small_phase(r: u32) -> Result<FrobeniusData, CohftError> {
    if r < 2 {
        return Err(CohftError::InvalidRank(r));
    }
    let (cubic, quartic) = known_low_degree(r);
    let cubic_data = FrobeniusData::from_potential(r, cubic.clone());
    // quartic terms are given, so the degree-1 WDVV part is a consistency check
    let quartic_data = FrobeniusData::from_potential(r, quartic.clone());
    if wdvv_linear_part(&cubic_data, &quartic_data)
        .iter()
        .any(|s| !s.is_zero())
    {
        return Err(CohftError::Inconsistent { degree: 4 });
    }
    let mut pieces: BTreeMap<u32, FrobeniusData> = BTreeMap::new();
    pieces.insert(3, cubic_data.clone());
    pieces.insert(4, quartic_data);
    for degree in 5..=r + 1 {
        let Some(sum) = weight_sum(r, degree) else { continue };
        let unknowns: Vec<Monomial> = monomials_with_sum(r, degree, sum)
            .into_iter()
            .filter(|m| m.exponent(x(0)) == 0)
            .collect();
        // known contributions: pairs of lower pieces with p + q = degree + 3
        let mut known = vec![GradedSeries::zero(r); wdvv_len(r)];
        for p in 4..degree {
            let q = degree + 3 - p;
            if q < 4 || q >= degree {
                continue;
            }
            let cross = wdvv_all(&pieces[&p], &pieces[&q]);
            for (k, s) in cross.into_iter().enumerate() {
                known[k] = known[k].add(&s);
            }
        }
        let columns: Vec<Vec<GradedSeries>> = unknowns
            .iter()
            .map(|mono| {
                let piece =
                    FrobeniusData::from_potential(r, GradedSeries::from_terms(r, [], [(mono.clone(), int(1))], None));
                wdvv_linear_part(&cubic_data, &piece)
            })
            .collect();
        let mut rows_index: BTreeMap<(usize, Monomial), usize> = BTreeMap::new();
        for entries in &columns {
            for (k, s) in entries.iter().enumerate() {
                for mono in s.terms().keys() {
                    let len = rows_index.len();
                    rows_index.entry((k, mono.clone())).or_insert(len);
                }
            }
        }
        for (k, s) in known.iter().enumerate() {
            for mono in s.terms().keys() {
                let len = rows_index.len();
                rows_index.entry((k, mono.clone())).or_insert(len);
            }
        }
        let mut rows = vec![vec![int(0); unknowns.len()]; rows_index.len()];
        let mut rhs = vec![int(0); rows_index.len()];
        for ((k, mono), &row) in &rows_index {
            for (col, entries) in columns.iter().enumerate() {
                rows[row][col] = entries[*k].coeff(mono);
            }
            rhs[row] = -known[*k].coeff(mono);
        }
        let values = match solve_linear_system(&rows, &rhs) {
            LinearSolution::Unique(v) => v,
            LinearSolution::Inconsistent => return Err(CohftError::Inconsistent { degree }),
            LinearSolution::Underdetermined { rank, unknowns } => {
                return Err(CohftError::Underdetermined {
                    degree,
                    unknowns,
                    free: unknowns - rank,
                });
            }
        };
        let piece = GradedSeries::from_terms(r, (0..r - 1).map(x), unknowns.into_iter().zip(values), None);
        pieces.insert(degree, FrobeniusData::from_potential(r, piece));
    }
    let total = pieces
        .values()
        .fold(GradedSeries::zero(r), |acc, p| acc.add(p.potential()));
    let data = FrobeniusData::from_potential(r, total);
    if let Some((idx, _)) = data.wdvv_residual().into_iter().find(|(_, s)| !s.is_zero()) {
        return Err(CohftError::ResidualNonzero(idx));
    }
    Ok(data)
}

fn wdvv_len(r: u32) -> usize {
    ((r - 1) as usize).pow(4)
}

fn wdvv_all(p: &FrobeniusData, q: &FrobeniusData) -> Vec<GradedSeries> {
    let n = p.r - 1;
    let mut out = Vec::with_capacity(wdvv_len(p.r));
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    out.push(wdvv_entry(p, q, a, b, c, d));
                }
            }
        }
    }
    out
}

/// `W(K, Y) + W(Y, K)`: the part of WDVV for `K + Y` linear in `Y`.
fn wdvv_linear_part(k: &FrobeniusData, y: &FrobeniusData) -> Vec<GradedSeries> {
    wdvv_all(k, y)
        .into_iter()
        .zip(wdvv_all(y, k))
        .map(|(a, b)| a.add(&b))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn term(exps: &[(u32, u32)], c: Rational) -> (Monomial, Rational) {
        (Monomial::from_exponents(exps.iter().map(|&(m, e)| (x(m), e))), c)
    }

    fn series(r: u32, terms: Vec<(Monomial, Rational)>) -> GradedSeries {
        GradedSeries::from_terms(r, (0..r - 1).map(x), terms, None)
    }

    #[test]
    fn primary_correlators() {
        assert_eq!(three_point(3, 1, 0, 1), int(0));
        assert_eq!(three_point(3, 0, 0, 1), int(1));
        assert_eq!(three_point(2, 0, 0, 0), int(1));
        assert_eq!(three_point(3, 2, 0, 0), int(0));
        assert_eq!(four_point(3, [1, 1, 1, 1]), rat(1, 3));
        assert_eq!(four_point(4, [2, 2, 1, 1]), rat(1, 4));
        assert_eq!(four_point(4, [2, 2, 2, 0]), int(0));
        assert_eq!(four_point(4, [3, 3, 0, 0]), int(0));
    }

    #[test]
    fn metric_is_involutive() {
        for r in 2..7 {
            let eta = MetricEta::new(r);
            for a in 0..r - 1 {
                for b in 0..r - 1 {
                    assert_eq!(eta.entry(a, b), eta.entry(b, a));
                    let sq: Rational = (0..r - 1).map(|c| eta.entry(a, c) * eta.inverse_entry(c, b)).sum();
                    assert_eq!(sq, int((a == b) as i64));
                }
            }
        }
    }

    #[test]
    fn small_potentials() {
        assert_eq!(
            solve_small_phase(2).unwrap().potential().terms(),
            series(2, vec![term(&[(0, 3)], rat(1, 6))]).terms()
        );
        assert_eq!(
            solve_small_phase(3).unwrap().potential().terms(),
            series(3, vec![term(&[(0, 2), (1, 1)], rat(1, 2)), term(&[(1, 4)], rat(1, 72))]).terms()
        );
        let expect4 = series(
            4,
            vec![
                term(&[(0, 2), (2, 1)], rat(1, 2)),
                term(&[(0, 1), (1, 2)], rat(1, 2)),
                term(&[(1, 2), (2, 2)], rat(1, 16)),
                term(&[(2, 5)], rat(1, 960)),
            ],
        );
        assert_eq!(solve_small_phase(4).unwrap().potential().terms(), expect4.terms());
    }

    #[test]
    fn potentials_are_quasi_homogeneous() {
        for r in 2..=6 {
            let f = solve_small_phase(r).unwrap();
            assert_eq!(
                f.potential().homogeneous_weight(),
                Some(rat(-2 * (r as i64 + 1), r as i64)),
                "r = {r}"
            );
        }
    }

    #[test]
    fn perturbed_quintic_breaks_wdvv() {
        let good = solve_small_phase(4).unwrap();
        let bump = series(4, vec![term(&[(2, 5)], rat(1, 959) - rat(1, 960))]);
        let bad = FrobeniusData::from_potential(4, good.potential().add(&bump));
        let residual: BTreeMap<_, _> = bad.wdvv_residual().into_iter().collect();
        assert!(!residual[&(1, 1, 2, 2)].is_zero());
        assert!(!bad.is_associative());
        assert!(FrobeniusData::from_potential(2, series(2, vec![term(&[(0, 3)], rat(1, 6))])).is_associative());
    }

    #[test]
    fn products() {
        for r in 2..=5 {
            let f = solve_small_phase(r).unwrap();
            for a in 0..r - 1 {
                let prod = f.product(0, a);
                for (c, s) in prod.iter().enumerate() {
                    let expect = if c as u32 == a {
                        GradedSeries::one(r)
                    } else {
                        GradedSeries::zero(r)
                    };
                    assert_eq!(s.terms(), expect.terms());
                }
            }
        }
        let f3 = solve_small_phase(3).unwrap();
        let p = f3.product(1, 1);
        assert_eq!(p[0].terms(), series(3, vec![term(&[(1, 1)], rat(1, 3))]).terms());
        assert!(p[1].is_zero());
        let f4 = solve_small_phase(4).unwrap();
        let p = f4.product(1, 1);
        assert_eq!(p[2].constant_term(), int(1));
        assert_eq!(p[0].constant_term(), int(0));
    }

    proptest::proptest! {
        #[test]
        fn correlators_are_symmetric(r in 2u32..8, m in proptest::array::uniform4(0u32..8), perm in proptest::sample::select(vec![[1usize, 0, 2, 3], [3, 2, 1, 0], [2, 3, 0, 1], [0, 2, 3, 1]])) {
            let m = m.map(|v| v % r);
            let p = perm.map(|i| m[i]);
            proptest::prop_assert_eq!(four_point(r, m), four_point(r, p));
            let t = three_point(r, m[0], m[1], m[2]);
            proptest::prop_assert_eq!(&t, &three_point(r, m[2], m[0], m[1]));
            proptest::prop_assert_eq!(&t, &three_point(r, m[1], m[0], m[2]));
        }
    }

    #[test]
    fn selection_rule() {
        for r in 3..=5 {
            for m1 in 0..r {
                for m2 in 0..r {
                    for m3 in 0..r {
                        if (m1 + m2 + m3) % r != r - 2 {
                            assert_eq!(three_point(r, m1, m2, m3), int(0));
                        }
                    }
                }
            }
        }
    }
}
