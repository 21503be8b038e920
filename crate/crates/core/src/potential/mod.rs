//! Bounded densities 0 ≤ ρ ≤ 1 in R^n and their normalized integrals.
//!
//! All integrals carry the normalization J(h) = (n/ω_n) ∫ h, with ω_n the
//! area of the unit sphere. A density is a sum of weighted balls plus an
//! optional piecewise-constant grid; every integral is linear in the pieces.
//! Balls are integrated in closed form, grids by refined midpoint sums.

mod cubature;
mod density;
mod grid;
mod integrals;

pub use cubature::{ball_cubature, householder, CubatureOrder};
pub use density::{Ball, Density, Grid};
pub use integrals::{
    ball_integral, e_rho, gradient_integrals, j_functional, j_functional_anchored, point_integrals, u_rho, v_rho,
    GradientIntegrals, KernelKind, NormalizedIntegral, PointIntegrals,
};

/// ω_n, the (n−1)-dimensional area of the unit sphere in R^n.
pub fn unit_sphere_area(n: usize) -> f64 {
    use std::f64::consts::PI;
    assert!(n >= 1);
    // ω_1 = 2, ω_2 = 2π, ω_{n+2} = 2π ω_n / n
    let mut k = if n % 2 == 1 { 1 } else { 2 };
    let mut area = if k == 1 { 2.0 } else { 2.0 * PI };
    while k < n {
        area *= 2.0 * PI / k as f64;
        k += 2;
    }
    area
}

/// Euclidean norm.
pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub(crate) fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}
