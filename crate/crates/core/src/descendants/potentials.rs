use crate::algebra::{int, GradedSeries, Monomial, Rational, Var};

use super::{engine, DescendantError};

/// `t_a^m` for `a <= max_level`, `m <= r-2`, sorted.
pub fn descendant_variables(r: u32, max_level: u32) -> Vec<Var> {
    (0..=max_level)
        .flat_map(|a| (0..r - 1).map(move |m| Var::t(a, m)))
        .collect()
}

/// Sorted insertion lists of length `n` drawn from `vars` that satisfy the
/// degree constraint `r Σa + Σm = r(3g-3+n) - (r-2)(g-1)`.
pub fn admissible_multisets(r: u32, genus: u32, n: u32, vars: &[Var]) -> Vec<Vec<(u32, u32)>> {
    let target = r as i64 * (3 * genus as i64 - 3 + n as i64) - (r as i64 - 2) * (genus as i64 - 1);
    if target < 0 {
        return Vec::new();
    }
    let mut items: Vec<(u32, u32)> = vars
        .iter()
        .filter_map(|v| match *v {
            Var::T { a, m } if m + 1 < r => Some((a, m)),
            _ => None,
        })
        .collect();
    items.sort_unstable();
    items.dedup();
    let weight = |&(a, m): &(u32, u32)| r as i64 * a as i64 + m as i64;

    fn go(
        items: &[(u32, u32)],
        weight: &dyn Fn(&(u32, u32)) -> i64,
        start: usize,
        left: u32,
        budget: i64,
        acc: &mut Vec<(u32, u32)>,
        out: &mut Vec<Vec<(u32, u32)>>,
    ) {
        if left == 0 {
            if budget == 0 {
                out.push(acc.clone());
            }
            return;
        }
        for idx in start..items.len() {
            let w = weight(&items[idx]);
            // items are sorted by weight, so every later choice is at least as heavy
            if w * left as i64 > budget {
                break;
            }
            acc.push(items[idx]);
            go(items, weight, idx, left - 1, budget - w, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    go(&items, &weight, 0, n, target, &mut Vec::new(), &mut out);
    out
}

/// `Φ_g` truncated at total degree `max_degree`, in the variables `vars`
/// (all others set to zero).
pub fn potential_in(r: u32, genus: u32, max_degree: u32, vars: &[Var]) -> Result<GradedSeries, DescendantError> {
    if genus > 1 {
        return Err(DescendantError::UnsupportedGenus(genus));
    }
    let e = engine(r)?;
    let min_n = if genus == 0 { 3 } else { 1 };
    let mut terms = Vec::new();
    for n in min_n..=max_degree {
        for ins in admissible_multisets(r, genus, n, vars) {
            let value = if genus == 0 {
                e.correlator_g0(&ins)
            } else {
                e.correlator_g1(&ins)
            };
            if value == int(0) {
                continue;
            }
            let mono = Monomial::from_exponents(ins.iter().map(|&(a, m)| (Var::t(a, m), 1)));
            let coeff = value / mono.multiplicity_factorial();
            terms.push((mono, coeff));
        }
    }
    Ok(GradedSeries::from_terms(
        r,
        vars.iter().copied(),
        terms,
        Some(max_degree as i32),
    ))
}

/// `Φ₀` to degree `max_degree`; only `t_a` with `a <= max_degree - 3` can occur.
pub fn large_potential_g0(r: u32, max_degree: u32) -> Result<GradedSeries, DescendantError> {
    let vars = descendant_variables(r, max_degree.saturating_sub(3));
    potential_in(r, 0, max_degree, &vars)
}

/// `Φ_g` (g = 0, 1) to degree `max_degree` in every variable that can occur.
pub fn large_potential(r: u32, genus: u32, max_degree: u32) -> Result<GradedSeries, DescendantError> {
    match genus {
        0 => large_potential_g0(r, max_degree),
        1 => potential_in(r, 1, max_degree, &descendant_variables(r, max_degree)),
        g => Err(DescendantError::UnsupportedGenus(g)),
    }
}

/// `Φ₁ = (1/24) log det Δ` with `Δ_{ml} = ∂_{0,0} ∂_{0,r-2-m} ∂_{0,l} Φ₀`,
/// truncated at `max_degree`. Independent of the genus-one recursion.
pub fn genus1_potential(r: u32, max_degree: u32) -> Result<GradedSeries, DescendantError> {
    if r < 2 {
        return Err(DescendantError::InvalidRank(r));
    }
    let vars = descendant_variables(r, max_degree);
    let phi0 = potential_in(r, 0, max_degree + 3, &vars)?;
    let d0 = phi0.partial(Var::t(0, 0))?;
    let k = (r - 1) as usize;
    let mut delta = vec![vec![GradedSeries::zero(r); k]; k];
    for (m, row) in delta.iter_mut().enumerate() {
        let dm = d0.partial(Var::t(0, r - 2 - m as u32))?;
        for (l, entry) in row.iter_mut().enumerate() {
            *entry = dm.partial(Var::t(0, l as u32))?.truncated(max_degree);
        }
    }
    for (m, row) in delta.iter().enumerate() {
        for (l, entry) in row.iter().enumerate() {
            if entry.constant_term() != int((m == l) as i64) {
                return Err(DescendantError::DeltaNotIdentity);
            }
        }
    }
    let det = determinant(&delta, r, max_degree).with_variables(vars.iter().copied());
    let log = det.log_truncated(max_degree)?;
    Ok(log.scale(&Rational::new(1.into(), 24.into())))
}

/// Leibniz expansion; fine for the matrix sizes `r - 1 <= 11` used here.
fn determinant(m: &[Vec<GradedSeries>], r: u32, max_degree: u32) -> GradedSeries {
    let k = m.len();
    let mut perm: Vec<usize> = (0..k).collect();
    let mut total = GradedSeries::zero(r);
    let mut c = vec![0usize; k];
    let mut sign = 1i64;
    let visit = |perm: &[usize], sign: i64, total: &mut GradedSeries| {
        let mut prod = GradedSeries::one(r);
        for (row, &col) in perm.iter().enumerate() {
            prod = prod.mul(&m[row][col]).truncated(max_degree);
            if prod.is_zero() {
                return;
            }
        }
        *total = total.add(&prod.scale(&int(sign)));
    };
    // Heap's algorithm; each swap flips the sign
    visit(&perm, sign, &mut total);
    let mut i = 0;
    while i < k {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            sign = -sign;
            visit(&perm, sign, &mut total);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;
    use crate::cohft::solve_small_phase;

    #[test]
    fn r2_coefficient() {
        let phi = large_potential_g0(2, 4).unwrap();
        let mono = Monomial::from_exponents([(Var::t(0, 0), 3), (Var::t(1, 0), 1)]);
        assert_eq!(phi.coeff(&mono), rat(1, 6));
    }

    #[test]
    fn restriction_gives_small_potential() {
        for r in 2..=5 {
            let big = large_potential_g0(r, r + 1).unwrap();
            let small = big.restrict(|v| v.level() == 0).rename(|v| Var::X(v.matter()));
            let expected = solve_small_phase(r).unwrap().potential().clone();
            assert!(small.sub(&expected).truncated(r + 1).is_zero(), "r = {r}");
        }
    }

    #[test]
    fn genus_one_routes_agree() {
        for r in 2..=4 {
            let trr = large_potential(r, 1, 4).unwrap();
            let det = genus1_potential(r, 4).unwrap();
            assert!(trr.sub(&det).is_zero(), "r = {r}: {}", trr.sub(&det));
            assert_eq!(trr.coeff(&Monomial::var(Var::t(1, 0))), rat(r as i64 - 1, 24));
        }
    }

    #[test]
    fn multisets_respect_constraint() {
        let vars = descendant_variables(3, 2);
        for ins in admissible_multisets(3, 0, 5, &vars) {
            let w: u32 = ins.iter().map(|&(a, m)| 3 * a + m).sum();
            assert_eq!(w, 3 * 2 + 1);
        }
        assert!(admissible_multisets(3, 0, 4, &vars).contains(&vec![(0, 1); 4]));
    }
}
