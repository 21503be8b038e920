//! Small special functions used by the profile module.

/// Euler–Mascheroni constant, 30 significant digits.
#[allow(clippy::excessive_precision)]
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_606_512_090_082;

/// Digamma Ψ(z) for z > 0.
///
/// Shifts the argument above 8 with Ψ(z+1) = Ψ(z) + 1/z, then sums the
/// asymptotic expansion in 1/z².
pub fn digamma(mut z: f64) -> f64 {
    debug_assert!(z > 0.0);
    let mut shift = 0.0;
    while z < 8.0 {
        shift -= 1.0 / z;
        z += 1.0;
    }
    let inv2 = 1.0 / (z * z);
    // B_{2k} / (2k) for k = 1..7
    let series = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2
                        * (1.0 / 252.0
                            - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0 - inv2 * (691.0 / 32760.0 - inv2 / 12.0))))));
    shift + z.ln() - 0.5 / z - series
}

/// ln cosh x without overflow.
pub fn ln_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// Generalized binomial coefficient C(a, k).
pub fn binomial(a: f64, k: usize) -> f64 {
    let mut c = 1.0;
    for j in 0..k {
        c *= (a - j as f64) / (j as f64 + 1.0);
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn digamma_reference_values() {
        assert_relative_eq!(digamma(1.0), -EULER_GAMMA, epsilon = 1e-14);
        assert_relative_eq!(digamma(0.5), -EULER_GAMMA - 2.0 * std::f64::consts::LN_2, epsilon = 1e-14);
        assert_relative_eq!(digamma(5.0), 1.506_117_668_431_800_5, epsilon = 1e-14);
        assert_relative_eq!(digamma(123.4), 4.811_373_775_116_277_5, epsilon = 1e-13);
        assert_relative_eq!(digamma(0.2), -5.289_039_896_592_188, epsilon = 1e-13);
    }

    #[test]
    fn digamma_recurrence() {
        for &z in &[0.3, 1.7, 4.2, 9.9, 31.0] {
            assert_relative_eq!(digamma(z + 1.0) - digamma(z), 1.0 / z, epsilon = 1e-13);
        }
    }

    #[test]
    fn ln_cosh_large_argument() {
        assert_relative_eq!(ln_cosh(800.0), 800.0 - std::f64::consts::LN_2, epsilon = 1e-12);
        assert_relative_eq!(ln_cosh(0.3), 0.3f64.cosh().ln(), epsilon = 1e-15);
    }
}
