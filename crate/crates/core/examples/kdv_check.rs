//! Checks that the genus-zero potential solves the dispersionless KdV_r
//! hierarchy: with v_m = ∂²Φ₀/∂t_0^0∂t_0^m, each u_j obeys its flow.

use spinh::algebra::Var;
use spinh::descendants::potential_in;
use spinh::dispersionless::{flow_equations, verify_potential_flow};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let degree = 5;
    for r in 2..=4 {
        for n in 0..=1 {
            for m in 0..r - 1 {
                let mut vars: Vec<Var> = (0..r - 1).map(|b| Var::t(0, b)).collect();
                vars.push(Var::t(n, m));
                vars.sort_unstable();
                vars.dedup();
                let phi = potential_in(r, 0, degree + 3, &vars)?;
                let res = verify_potential_flow(&phi, n, m, degree)?;
                let ok = res.values().all(|s| s.is_zero());
                println!("r = {r}, flow t_{n}^{m}: residual {}", if ok { "0" } else { "NONZERO" });
            }
        }
    }
    println!("\nr = 3 flows for t_1^0:");
    for (j, rhs) in flow_equations(3, 1, 0)? {
        println!("  ∂u{j}/∂t = {rhs}");
    }
    Ok(())
}
