//! String, dilaton, L₀ and grading residuals of Z = exp(Φ₀ + Φ₁).

use spinh::descendants::{operator_residual, Constraint};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let degree = 5;
    for r in 2..=4 {
        for kind in [
            Constraint::String,
            Constraint::Dilaton,
            Constraint::L0,
            Constraint::Grading,
        ] {
            let res = operator_residual(kind, r, degree)?;
            println!(
                "r = {r}, {kind:?} through degree {degree}: {}",
                if res.is_zero() {
                    "0".to_string()
                } else {
                    res.to_string()
                }
            );
        }
    }
    Ok(())
}
