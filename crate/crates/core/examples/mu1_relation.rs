//! The first Chern character μ₁ on M_{0,4}: its integral equals the
//! four-point function when Σm = 2r-2 and vanishes when Σm = r-2.

use spinh::cohft::four_point;
use spinh::descendants::{engine, mu1_correlator_g0};
use spinh::strata::m04_mu1_integral;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for r in 3..=6 {
        println!("r = {r}");
        for m in sorted_types(r, 2 * r - 2) {
            println!(
                "  {m:?}: r∫μ₁ = {}, <τ τ τ τ> = {}",
                m04_mu1_integral(r, m)?,
                four_point(r, m)
            );
        }
        let e = engine(r)?;
        for m in sorted_types(r, r - 2) {
            let ins: Vec<(u32, u32)> = m.iter().map(|&x| (0, x)).collect();
            println!("  {m:?}: <τ τ τ τ μ₁> = {}", mu1_correlator_g0(&e, &ins));
        }
    }
    let e4 = engine(4)?;
    println!(
        "<τ(0,2) τ(0,1)^4 μ₁> at r = 4: {}",
        mu1_correlator_g0(&e4, &[(0, 2), (0, 1), (0, 1), (0, 1), (0, 1)])
    );
    Ok(())
}

fn sorted_types(r: u32, sum: u32) -> Vec<[u32; 4]> {
    let mut out = Vec::new();
    for a in 0..r - 1 {
        for b in a..r - 1 {
            for c in b..r - 1 {
                if let Some(d) = sum.checked_sub(a + b + c) {
                    if d >= c && d + 2 <= r {
                        out.push([a, b, c, d]);
                    }
                }
            }
        }
    }
    out
}
