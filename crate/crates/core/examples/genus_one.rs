//! Φ₁ two ways: the genus-one recursion and (1/24) log det of third derivatives of Φ₀.

use spinh::descendants::{genus1_potential, large_potential};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for r in 2..=4 {
        let by_trr = large_potential(r, 1, 4)?;
        let by_det = genus1_potential(r, 4)?;
        println!("r = {r}: routes agree: {}", by_trr.sub(&by_det).is_zero());
        println!("  Φ₁ = {by_trr}");
    }
    Ok(())
}
