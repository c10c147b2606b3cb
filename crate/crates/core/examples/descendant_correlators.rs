//! Genus-zero and genus-one descendant correlators and the large-phase potential.

use spinh::descendants::{correlator_raw, large_potential};

/// `(r, genus, insertions)`.
type Case = (u32, u32, &'static [(u32, u32)]);

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cases: &[Case] = &[
        (2, 0, &[(0, 0), (0, 0), (0, 0), (1, 0)]),
        (2, 0, &[(0, 0), (0, 0), (0, 0), (1, 0), (1, 0)]),
        (3, 0, &[(0, 1), (0, 1), (0, 1), (0, 1)]),
        (3, 0, &[(1, 0), (0, 1), (0, 0), (0, 0)]),
        (4, 0, &[(1, 1), (0, 2), (0, 1), (0, 1), (0, 1)]),
        (3, 1, &[(1, 0)]),
        (5, 1, &[(1, 0)]),
    ];
    for &(r, g, ins) in cases {
        let v = correlator_raw(r, g, ins, false)?;
        let shown: Vec<String> = ins.iter().map(|(a, m)| format!("τ({a},{m})")).collect();
        println!("r = {r}: <{}>_{g} = {v}", shown.join(" "));
    }
    let phi = large_potential(3, 0, 5)?;
    println!("\nr = 3, Φ₀ through degree 5 ({} terms):\n{phi}", phi.len());
    Ok(())
}
