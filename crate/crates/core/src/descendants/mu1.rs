use crate::algebra::{int, rat, Rational};

use super::{admissible, CorrelatorKey, Engine};

/// Genus-zero correlator with one `μ₁` insertion, by expressing `μ₁` as
/// `ψ`-classes and boundary divisors:
///
/// `⟨∏τ μ₁⟩ = Σ_i c(m_i) ⟨…τ_{a_i+1,m_i}…⟩ - Σ_{I|I^c} c(m_I) ⟨∏_I τ · τ_{0,m_I}⟩⟨τ_{0,r-2-m_I} ∏_{I^c} τ⟩`
///
/// with `c(m) = m(r-2-m)/(2r²)`, the second sum over unordered splittings
/// with at least two insertions on each side.
pub fn mu1_correlator_g0(e: &Engine, insertions: &[(u32, u32)]) -> Rational {
    let r = e.r();
    if insertions.iter().any(|&(_, m)| m + 1 >= r) {
        return int(0);
    }
    let Ok(key) = CorrelatorKey::new(r, 0, insertions.to_vec(), true) else {
        return int(0);
    };
    if !admissible(&key).is_admissible() {
        return int(0);
    }
    let ins = key.insertions();
    let n = ins.len();
    let c = |m: i64| rat(m * (r as i64 - 2 - m), 2 * (r as i64) * (r as i64));

    let mut total = int(0);
    for i in 0..n {
        let (a, m) = ins[i];
        if m == 0 {
            continue;
        }
        let mut raised = ins.to_vec();
        raised[i] = (a + 1, m);
        total += c(m as i64) * e.correlator_g0(&raised);
    }
    // masks containing insertion 0 enumerate each unordered splitting once
    for mask in 0u64..(1 << n) {
        let size = mask.count_ones() as usize;
        if mask & 1 == 0 || size < 2 || n - size < 2 {
            continue;
        }
        let (inside, outside): (Vec<_>, Vec<_>) = (0..n).partition(|&k| mask >> k & 1 == 1);
        let sum: i64 = inside.iter().map(|&k| ins[k].1 as i64).sum();
        let m_i = (-2 - sum).rem_euclid(r as i64);
        if m_i == r as i64 - 1 || m_i == 0 {
            continue;
        }
        let mut left: Vec<_> = inside.iter().map(|&k| ins[k]).collect();
        left.push((0, m_i as u32));
        let lv = e.correlator_g0(&left);
        if lv == int(0) {
            continue;
        }
        let mut right: Vec<_> = outside.iter().map(|&k| ins[k]).collect();
        right.push((0, r - 2 - m_i as u32));
        total -= c(m_i) * lv * e.correlator_g0(&right);
    }
    total
}
