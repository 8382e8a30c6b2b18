//! Fourier transform of the fundamental cardinal spline of degree `n`,
//!
//! ```text
//! η̂ₙ(ξ) = sinc(ξ)^{n+1} / Σ_l sinc(ξ − l)^{n+1}
//! ```
//!
//! with `ξ` in cycles per sample. Since `sin(π(ξ − l)) = (−1)^l sin(πξ)` the sines
//! cancel and the ratio becomes `ξ^{-(n+1)} / Σ_l (−1)^{l(n+1)} (ξ − l)^{-(n+1)}`;
//! all terms are rescaled by the distance `r` from `ξ` to its nearest integer so
//! the dominant term is exactly one and nothing overflows near the zeros.
//!
//! The series is truncated to the `2·l_max + 1` terms closest to `ξ`; the
//! truncation error is `O(l_max^{-n})`.

use crate::scalar::Real;

/// Default number of terms on each side of the dominant one.
pub const DEFAULT_L_MAX: usize = 4096;

/// `η̂ₙ(ξ)` truncated to `|l − round(ξ)| <= l_max`.
pub fn fundamental_spline_spectrum<T: Real>(n: usize, xi: T, l_max: usize) -> T {
    KernelSpectrum::new(n, l_max).eval(xi)
}

/// Evaluable kernel spectrum of a fixed order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KernelSpectrum {
    order: usize,
    l_max: usize,
}

impl KernelSpectrum {
    pub fn new(order: usize, l_max: usize) -> Self {
        assert!(order >= 1, "spline order must be at least 1");
        Self { order, l_max }
    }

    pub fn with_default_truncation(order: usize) -> Self {
        Self::new(order, DEFAULT_L_MAX)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    fn odd_power(&self) -> bool {
        (self.order + 1) % 2 == 1
    }

    /// `Σ_{|j| <= l_max} s^j (r / (r − j))^{n+1}` where `s = (−1)^{n+1}`.
    fn scaled_sum<T: Real>(&self, r: T) -> T {
        let p = (self.order + 1) as i32;
        let odd = self.odd_power();
        let mut acc = T::one();
        // pair ±j so the nearly cancelling tails are added smallest-first
        for j in (1..=self.l_max).rev() {
            let jf = T::from_usize_lossy(j);
            let plus = (r / (r - jf)).powi(p);
            let minus = (r / (r + jf)).powi(p);
            let sign = if odd && j % 2 == 1 { -T::one() } else { T::one() };
            acc += sign * (plus + minus);
        }
        acc
    }

    pub fn eval<T: Real>(&self, xi: T) -> T {
        let m = xi.round();
        let r = xi - m;
        if r == T::zero() {
            return if m == T::zero() { T::one() } else { T::zero() };
        }
        let p = (self.order + 1) as i32;
        let mi = m.to_i64().unwrap_or(0);
        let sign = if self.odd_power() && mi.rem_euclid(2) == 1 {
            -T::one()
        } else {
            T::one()
        };
        (r / xi).powi(p) / (sign * self.scaled_sum(r))
    }

    /// `η̂ₙ(k − β)` for several `k` at once, sharing the periodic denominator.
    pub fn shifted<T: Real>(&self, beta: T, ks: &[i64]) -> Vec<T> {
        let base = -beta;
        let m0 = base.round();
        let r = base - m0;
        if r == T::zero() {
            return ks
                .iter()
                .map(|&k| if T::from_i64(k).unwrap() == beta { T::one() } else { T::zero() })
                .collect();
        }
        let p = (self.order + 1) as i32;
        let odd = self.odd_power();
        let m0i = m0.to_i64().unwrap_or(0);
        let denom = self.scaled_sum(r);
        ks.iter()
            .map(|&k| {
                let xi = T::from_i64(k).unwrap() - beta;
                let sign = if odd && (k + m0i).rem_euclid(2) == 1 {
                    -T::one()
                } else {
                    T::one()
                };
                (r / xi).powi(p) / (sign * denom)
            })
            .collect()
    }
}
