//! Polynomials H_k with F_α^{(k+2)} = α t (1 − t) H_k(t) / F_α^{k+1}, t = F_α^α.

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HPolynomial {
    pub k: usize,
    /// coefficients in increasing powers of t
    pub coeffs: Vec<f64>,
}

impl HPolynomial {
    pub fn eval(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
    }

    pub fn derivative(&self) -> Vec<f64> {
        self.coeffs.iter().enumerate().skip(1).map(|(j, c)| j as f64 * c).collect()
    }

    /// Coefficients of P*(z) = (1 + z)^k P(1 / (1 + z)).
    ///
    /// P(t) = Σ b_j t^{k−j} (1 − t)^j, so uniform signs of b_j fix the sign
    /// of P on [0, 1).
    pub fn associated(&self) -> Vec<f64> {
        let k = self.k;
        let mut out = vec![0.0; k + 1];
        for (j, &a) in self.coeffs.iter().enumerate() {
            // a (1+z)^{k-j}
            let mut binom = 1.0;
            for i in 0..=(k - j) {
                out[i] += a * binom;
                binom = binom * ((k - j - i) as f64) / (i as f64 + 1.0);
            }
        }
        out
    }
}

/// H_0 = −1, H_{k+1} = [(k+1−2α)t − (k+1−α)] H_k + α t(1−t) H_k'.
pub fn h_polynomials(alpha: f64, k_max: usize) -> Vec<HPolynomial> {
    let mut out = vec![HPolynomial { k: 0, coeffs: vec![-1.0] }];
    for k in 0..k_max {
        let prev = &out[k].coeffs;
        let deriv = out[k].derivative();
        let kp = (k + 1) as f64;
        let lin_t = kp - 2.0 * alpha;
        let lin_c = -(kp - alpha);
        let mut next = vec![0.0; prev.len() + 1];
        for (j, &c) in prev.iter().enumerate() {
            next[j] += lin_c * c;
            next[j + 1] += lin_t * c;
        }
        // α (t − t²) H'
        for (j, &d) in deriv.iter().enumerate() {
            next[j + 1] += alpha * d;
            next[j + 2] -= alpha * d;
        }
        out.push(HPolynomial { k: k + 1, coeffs: next });
    }
    out
}
