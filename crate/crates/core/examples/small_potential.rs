//! Solves WDVV for the small-phase potential and checks associativity.

use spinh::cohft::solve_small_phase;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for r in 2..=6 {
        let f = solve_small_phase(r)?;
        println!("r = {r}: Φ₀ = {}", f.potential());
        println!("        associative: {}", f.is_associative());
    }
    Ok(())
}
