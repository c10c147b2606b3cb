use crate::algebra::{int, rat, GradedSeries, Rational, Var};

use super::{descendant_variables, potential_in, DescendantError};

/// Linear constraints checked degree by degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Constraint {
    String,
    Dilaton,
    L0,
    Grading,
}

fn t(a: u32, m: u32) -> Var {
    Var::t(a, m)
}

/// `Σ c(a,m) t_a^m ∂_a^m f` over the declared variables of `f`.
fn euler(f: &GradedSeries, c: impl Fn(u32, u32) -> Rational) -> Result<GradedSeries, DescendantError> {
    let mut out = GradedSeries::zero(f.r()).with_variables(f.variables().iter().copied());
    for &v in f.variables() {
        let Var::T { a, m } = v else { continue };
        let coeff = c(a, m);
        if coeff == int(0) {
            continue;
        }
        out = out.add(&f.partial(v)?.mul(&GradedSeries::var(f.r(), v)).scale(&coeff));
    }
    Ok(out.truncate(f.truncation()))
}

/// `L_{-1} = -∂_{0,0} + ½ Σ η_{ab} t_0^a t_0^b + Σ t_{a+1}^m ∂_a^m`.
///
/// Terms `t_{a+1}^m ∂_a^m` whose `t_{a+1}^m` is not declared are dropped.
pub fn apply_l_minus1(z: &GradedSeries) -> Result<GradedSeries, DescendantError> {
    let r = z.r();
    let mut out = z.partial(t(0, 0))?.neg();
    let mut quad = GradedSeries::zero(r);
    for a in 0..r - 1 {
        let b = r - 2 - a;
        quad = quad.add(&GradedSeries::var(r, t(0, a)).mul(&GradedSeries::var(r, t(0, b))));
    }
    out = out.add(&quad.scale(&rat(1, 2)).mul(z));
    for &v in z.variables() {
        let Var::T { a, m } = v else { continue };
        let up = t(a + 1, m);
        if z.variables().contains(&up) {
            out = out.add(&z.partial(v)?.mul(&GradedSeries::var(r, up)));
        }
    }
    Ok(out.with_variables(z.variables().iter().copied()))
}

/// `-∂_{1,0} + Σ t ∂ + λ∂_λ + (r-1)/24`, where `λ∂_λ Z = -2Φ₀ Z` at `λ = 1`.
pub fn apply_dilaton(z: &GradedSeries, phi0: &GradedSeries) -> Result<GradedSeries, DescendantError> {
    let r = z.r();
    let out = z
        .partial(t(1, 0))?
        .neg()
        .add(&euler(z, |_, _| int(1))?)
        .sub(&phi0.mul(z).scale(&int(2)))
        .add(&z.scale(&rat(r as i64 - 1, 24)));
    Ok(out)
}

/// `L_0 = -(1+1/r) ∂_{1,0} + Σ (a + (m+1)/r) t_a^m ∂_a^m + (r²-1)/(24r)`.
pub fn apply_l0(z: &GradedSeries) -> Result<GradedSeries, DescendantError> {
    let r = z.r() as i64;
    let out = z
        .partial(t(1, 0))?
        .scale(&-rat(r + 1, r))
        .add(&euler(z, |a, m| int(a as i64) + rat(m as i64 + 1, r))?)
        .add(&z.scale(&rat(r * r - 1, 24 * r)));
    Ok(out)
}

/// `E Φ + 2(1+1/r) Φ₀` with Euler weights `a - 1 + m/r`.
pub fn grading_residual(phi0: &GradedSeries, phi1: &GradedSeries) -> Result<GradedSeries, DescendantError> {
    let r = phi0.r() as i64;
    let phi = phi0.add(phi1);
    let e = euler(&phi, |a, m| int(a as i64 - 1) + rat(m as i64, r))?;
    Ok(e.add(&phi0.scale(&rat(2 * (r + 1), r))))
}

/// Residual of a constraint on `Z = exp(Φ₀ + Φ₁)` (or on `Φ` for
/// `Grading`), exact up to total degree `max_degree`.
pub fn operator_residual(kind: Constraint, r: u32, max_degree: u32) -> Result<GradedSeries, DescendantError> {
    let n = max_degree + 1;
    let vars = descendant_variables(r, n);
    let phi0 = potential_in(r, 0, n, &vars)?;
    let phi1 = potential_in(r, 1, n, &vars)?;
    let out = match kind {
        Constraint::Grading => grading_residual(&phi0, &phi1)?,
        _ => {
            let z = phi0.add(&phi1).exp_truncated(n)?;
            match kind {
                Constraint::String => apply_l_minus1(&z)?,
                Constraint::Dilaton => apply_dilaton(&z, &phi0)?,
                _ => apply_l0(&z)?,
            }
        }
    };
    Ok(out.truncated(max_degree))
}
