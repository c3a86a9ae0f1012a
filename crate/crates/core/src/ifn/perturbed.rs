//! Deliberately broken pairs used to exercise the axiom suite.

use super::{standard_pair, IFNormPair, NormChoice};

/// `mu = 1` everywhere; breaks (a) and the "only if" half of (b).
pub fn constant_membership(dim: usize) -> IFNormPair {
    IFNormPair::new(
        "constant-membership",
        dim,
        |_, _| 1.0,
        |x, t| {
            if t <= 0.0 {
                1.0
            } else {
                let r = NormChoice::Supremum.norm(x);
                r / (t + r)
            }
        },
    )
}

/// Standard pair with `nu` replaced by `min(1, factor * nu)`.
///
/// Each listed nu-condition survives the clamp, so this is only visible
/// through `mu + nu <= 1`.
pub fn scaled_nonmembership(norm: NormChoice, dim: usize, factor: f64) -> IFNormPair {
    let base = standard_pair(norm, dim).expect("valid norm/dimension");
    let (b1, b2) = (base.clone(), base);
    IFNormPair::new(
        format!("scaled-nonmembership/{factor}"),
        dim,
        move |x, t| b1.mu(x, t),
        move |x, t| (factor * b2.nu(x, t)).min(1.0),
    )
}

/// Standard pair with `nu` replaced by `factor * nu` (no clamp).
pub fn unclamped_nonmembership(norm: NormChoice, dim: usize, factor: f64) -> IFNormPair {
    let base = standard_pair(norm, dim).expect("valid norm/dimension");
    let (b1, b2) = (base.clone(), base);
    IFNormPair::new(
        format!("unclamped-nonmembership/{factor}"),
        dim,
        move |x, t| b1.mu(x, t),
        move |x, t| factor * b2.nu(x, t),
    )
}

/// `(sum_i sqrt|x_i|)^2`: absolutely homogeneous but not subadditive for
/// `dim >= 2`.
pub fn half_quasi_norm(x: &[f64]) -> f64 {
    let s: f64 = x.iter().map(|c| c.abs().sqrt()).sum();
    s * s
}

/// Standard-form pair built on [`half_quasi_norm`]; breaks the triangle
/// conditions (d) and (i) and nothing else.
pub fn quasi_norm_pair(dim: usize) -> IFNormPair {
    IFNormPair::new(
        "quasi-norm-triangle",
        dim,
        |x, t| if t <= 0.0 { 0.0 } else { t / (t + half_quasi_norm(x)) },
        |x, t| {
            if t <= 0.0 {
                1.0
            } else {
                let r = half_quasi_norm(x);
                r / (t + r)
            }
        },
    )
}
