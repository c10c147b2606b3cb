//! The r-th root of the Lax operator and the Gelfand-Dickey flows it generates.

use spinh::psdo::{canonical_l, default_depth, flow_equations, rth_root};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for r in 2..=4 {
        let l = canonical_l(r);
        let root = rth_root(&l, default_depth(r))?;
        println!("r = {r}\n  L       = {l}\n  L^(1/r) = {root}");
        let floor = root.power(r).floor().unwrap_or(0);
        println!(
            "  (L^(1/r))^r == L through D^{floor}: {}",
            root.power(r) == l.truncated(floor)
        );
    }
    // ε² = -1/r; coefficients print as a + b·e with e = ε
    println!("\nr = 2, flow (1,0):");
    for (j, rhs) in flow_equations(2, 1, 0)? {
        println!("  ∂u{j}/∂t = {rhs}");
    }
    println!("r = 3, flow (0,1):");
    for (j, rhs) in flow_equations(3, 0, 1)? {
        println!("  ∂u{j}/∂t = {rhs}");
    }
    Ok(())
}
