//! Tensor Gauss cubature over a ball in hyperspherical coordinates.
//!
//! Independent of the closed forms: it samples the kernel at interior
//! points of the ball and is used to cross-check them.

use super::{norm, sub, unit_sphere_area};
use crate::quad::gauss_jacobi;

/// Orders of the radial, polar and azimuthal rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CubatureOrder {
    pub radial: usize,
    pub polar: usize,
    pub azimuthal: usize,
}

impl CubatureOrder {
    /// Default resolution; tensor size grows like order^{n−1}.
    pub fn default_for(n: usize) -> Self {
        let p = match n {
            0..=3 => 32,
            4 => 20,
            _ => 12,
        };
        CubatureOrder { radial: p, polar: p, azimuthal: 2 * p }
    }

    pub fn points(&self, n: usize) -> usize {
        self.radial * self.polar.pow(n.saturating_sub(2) as u32) * self.azimuthal
    }
}

/// The Householder reflection exchanging e₁ and the unit vector `u`.
pub fn householder(u: &[f64]) -> impl Fn(&[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = u.iter().map(|x| -x).collect();
    v[0] += 1.0;
    let vv: f64 = v.iter().map(|x| x * x).sum();
    move |x: &[f64]| {
        if vv < 1e-30 {
            return x.to_vec();
        }
        let s = 2.0 * x.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>() / vv;
        x.iter().zip(&v).map(|(a, b)| a - s * b).collect()
    }
}

/// Unit directions and weights of a product rule on S^{n−1}.
fn sphere_rule(n: usize, order: CubatureOrder) -> Vec<(Vec<f64>, f64)> {
    use std::f64::consts::PI;
    let m = order.azimuthal;
    // circle: equal weights, spectrally accurate for periodic integrands
    let mut rule: Vec<(Vec<f64>, f64)> = (0..m)
        .map(|j| {
            let t = 2.0 * PI * (j as f64 + 0.5) / m as f64;
            (vec![t.cos(), t.sin()], 2.0 * PI / m as f64)
        })
        .collect();
    // S^{d} from S^{d−1}: θ = (cos φ, sin φ · θ'), weight sin^{d−1} φ
    for d in 2..n {
        let e = (d as f64 - 2.0) / 2.0;
        let polar = gauss_jacobi(order.polar, e, e);
        let mut next = Vec::with_capacity(rule.len() * polar.len());
        for &(t, wt) in &polar {
            let s = (1.0 - t * t).sqrt();
            for (dir, w) in &rule {
                let mut v = Vec::with_capacity(d + 1);
                v.push(t);
                v.extend(dir.iter().map(|x| s * x));
                next.push((v, w * wt));
            }
        }
        rule = next;
    }
    rule
}

/// (n/ω_n) ∫_{B(center, radius)} k(ζ − base) dζ.
///
/// The rule is rotated so that its polar axis points from the centre
/// toward `base`, which keeps the near-singular part axisymmetric.
pub fn ball_cubature(
    center: &[f64],
    radius: f64,
    base: &[f64],
    kernel: impl Fn(&[f64]) -> f64,
    order: CubatureOrder,
) -> f64 {
    let n = center.len();
    let to_base = sub(base, center);
    let d = norm(&to_base);
    let axis: Vec<f64> = if d > 0.0 { to_base.iter().map(|x| x / d).collect() } else { unit(n) };
    let rotate = householder(&axis);
    let sphere: Vec<(Vec<f64>, f64)> = sphere_rule(n, order).into_iter().map(|(v, w)| (rotate(&v), w)).collect();
    // ∫₀^r s^{n−1} h(s) ds with s = r(1 + t)/2
    let radial = gauss_jacobi(order.radial, 0.0, n as f64 - 1.0);
    let scale = (0.5 * radius).powi(n as i32);
    let offset = sub(center, base);
    let mut total = 0.0;
    let mut y = vec![0.0; n];
    for &(t, wr) in &radial {
        let s = 0.5 * radius * (1.0 + t);
        let mut shell = 0.0;
        for (dir, ws) in &sphere {
            for k in 0..n {
                y[k] = offset[k] + s * dir[k];
            }
            shell += ws * kernel(&y);
        }
        total += wr * shell;
    }
    n as f64 / unit_sphere_area(n) * scale * total
}

fn unit(n: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[0] = 1.0;
    e
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn householder_swaps_axes() {
        let u = [0.6, 0.0, 0.8];
        let h = householder(&u);
        let img = h(&[1.0, 0.0, 0.0]);
        for (a, b) in img.iter().zip(&u) {
            assert!((a - b).abs() < 1e-15);
        }
        let back = h(&u);
        assert!((back[0] - 1.0).abs() < 1e-15 && back[1].abs() < 1e-15 && back[2].abs() < 1e-15);
        let id = householder(&[1.0, 0.0]);
        assert_eq!(id(&[0.3, 0.4]), vec![0.3, 0.4]);
    }

    #[test]
    fn sphere_rule_weights_sum_to_area() {
        for n in 2..=5 {
            let rule = sphere_rule(n, CubatureOrder::default_for(n));
            let total: f64 = rule.iter().map(|(_, w)| w).sum();
            assert!((total / unit_sphere_area(n) - 1.0).abs() < 1e-12, "n={n}: {total} vs {}", unit_sphere_area(n));
            assert!(rule.iter().all(|(v, _)| (norm(v) - 1.0).abs() < 1e-14));
        }
    }

    #[test]
    fn volume_of_ball() {
        // (n/ω_n) |B_r| = r^n
        for n in 2..=5 {
            let v = ball_cubature(&vec![1.0; n], 0.7, &vec![0.0; n], |_| 1.0, CubatureOrder::default_for(n));
            assert!((v - 0.7f64.powi(n as i32)).abs() < 1e-13, "n={n}: {v}");
        }
    }

    #[test]
    fn second_moment() {
        // (n/ω_n) ∫_{B_r} |y|² dy = n r^{n+2} / (n+2)
        for n in 2..=4 {
            let r: f64 = 1.3;
            let c = vec![0.0; n];
            let v = ball_cubature(&c, r, &c, |y| y.iter().map(|x| x * x).sum(), CubatureOrder::default_for(n));
            let exact = n as f64 * r.powi(n as i32 + 2) / (n as f64 + 2.0);
            assert!((v - exact).abs() < 1e-12 * exact, "n={n}");
        }
    }
}
