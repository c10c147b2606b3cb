use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LinearSolution {
    Unique(Vec<Rational>),
    Inconsistent,
    Underdetermined { rank: usize, unknowns: usize },
}

/// Solves `A·y = b` exactly.
///
/// Rows are cleared of denominators and reduced with fraction-free (Bareiss)
/// elimination over the integers; rationals only appear in back substitution.
pub fn solve_linear_system(rows: &[Vec<Rational>], rhs: &[Rational]) -> LinearSolution {
    assert_eq!(rows.len(), rhs.len());
    let unknowns = rows.first().map_or(0, Vec::len);
    // augmented integer matrix
    let mut m: Vec<Vec<BigInt>> = rows
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            let lcm = row
                .iter()
                .chain(std::iter::once(b))
                .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
            row.iter()
                .chain(std::iter::once(b))
                .map(|q| q.numer() * (&lcm / q.denom()))
                .collect()
        })
        .filter(|row: &Vec<BigInt>| row.iter().any(|x| !x.is_zero()))
        .collect();

    let mut pivots = Vec::new();
    let mut prev = BigInt::one();
    let mut row = 0;
    for col in 0..unknowns {
        let Some(p) = (row..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        for i in row + 1..m.len() {
            for j in col + 1..=unknowns {
                let v = (&m[row][col] * &m[i][j] - &m[i][col] * &m[row][j]) / &prev;
                m[i][j] = v;
            }
            m[i][col] = BigInt::zero();
        }
        prev = m[row][col].clone();
        pivots.push(col);
        row += 1;
        if row == m.len() {
            break;
        }
    }
    let rank = pivots.len();
    if m[rank..].iter().any(|r| !r[unknowns].is_zero()) {
        return LinearSolution::Inconsistent;
    }
    if rank < unknowns {
        return LinearSolution::Underdetermined { rank, unknowns };
    }
    let mut y = vec![Rational::zero(); unknowns];
    for i in (0..rank).rev() {
        let col = pivots[i];
        let mut acc = Rational::from_integer(m[i][unknowns].clone());
        for j in col + 1..unknowns {
            acc -= Rational::from_integer(m[i][j].clone()) * &y[j];
        }
        y[col] = acc / Rational::from_integer(m[i][col].clone());
    }
    LinearSolution::Unique(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{int, rat};

    #[test]
    fn unique_overdetermined() {
        // 60c = 1/16 twice, plus a redundant combination
        let rows = vec![vec![int(60), int(0)], vec![int(0), int(3)], vec![int(60), int(3)]];
        let rhs = vec![rat(1, 16), int(1), rat(1, 16) + int(1)];
        assert_eq!(
            solve_linear_system(&rows, &rhs),
            LinearSolution::Unique(vec![rat(1, 960), rat(1, 3)])
        );
    }

    #[test]
    fn inconsistent_and_underdetermined() {
        let rows = vec![vec![int(1), int(1)], vec![int(2), int(2)]];
        assert_eq!(
            solve_linear_system(&rows, &[int(1), int(3)]),
            LinearSolution::Inconsistent
        );
        assert_eq!(
            solve_linear_system(&rows, &[int(1), int(2)]),
            LinearSolution::Underdetermined { rank: 1, unknowns: 2 }
        );
    }

    #[test]
    fn fractional_entries() {
        let rows = vec![vec![rat(1, 2), rat(1, 3)], vec![rat(1, 5), rat(-1, 7)]];
        let sol = [rat(3, 4), rat(-2, 9)];
        let rhs: Vec<Rational> = rows
            .iter()
            .map(|r| r.iter().zip(&sol).map(|(a, b)| a * b).sum())
            .collect();
        assert_eq!(solve_linear_system(&rows, &rhs), LinearSolution::Unique(sol.to_vec()));
    }
}
