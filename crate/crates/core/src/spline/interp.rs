use crate::error::{Error, Result};
use crate::sampling::SampleSet;
use crate::scalar::Real;

use super::banded::BandedMatrix;
use super::bspline::basis_funs;
use super::Interpolant;

/// Systems whose 1-norm condition estimate exceeds this are rejected.
pub const MAX_CONDITION: f64 = 1e12;

/// Degree-`n` spline interpolant `Σ_j c_j N_{n,j}(x)` over non-uniform knots.
///
/// Breakpoints sit at the sample times for odd `n` and at the midpoints
/// between consecutive samples for even `n`, so uniform samples give cardinal
/// spline interpolation away from the ends. At each end the breakpoints
/// nearest the boundary are dropped (`(n−1)/2` for odd `n`, `n/2` for even
/// `n`, the "not-a-knot" condition), leaving exactly one basis function per
/// sample; every polynomial of degree ≤ `n` is then reproduced exactly.
/// The end knots are clamped (repeated `n + 1` times): exterior knots do not
/// change the spline space on the domain, and clamping gives the best
/// conditioned basis for it.
#[derive(Debug, Clone, PartialEq)]
pub struct SplineInterpolant<T> {
    order: usize,
    knots: Vec<T>,
    coefficients: Vec<T>,
    domain: (T, T),
}

impl<T: Real> SplineInterpolant<T> {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn knots(&self) -> &[T] {
        &self.knots
    }

    pub fn coefficients(&self) -> &[T] {
        &self.coefficients
    }

    fn eval_unchecked(&self, x: T) -> T {
        let n = self.order;
        let span = super::bspline::find_span(&self.knots, n, x);
        let mut basis = vec![T::zero(); n + 1];
        basis_funs(&self.knots, n, span, x, &mut basis);
        basis
            .iter()
            .zip(&self.coefficients[span - n..=span])
            .map(|(b, c)| *b * *c)
            .sum()
    }
}

impl<T: Real> Interpolant<T> for SplineInterpolant<T> {
    fn domain(&self) -> (T, T) {
        self.domain
    }

    fn eval(&self, x: T) -> Result<T> {
        let (lo, hi) = self.domain;
        if !(x >= lo && x <= hi) {
            return Err(Error::OutOfDomain {
                x: x.to_f64_lossy(),
                lo: lo.to_f64_lossy(),
                hi: hi.to_f64_lossy(),
            });
        }
        Ok(self.eval_unchecked(x))
    }
}

/// Knot vector `[t_first ×(n+1), breakpoints, t_last ×(n+1)]`.
fn build_knots<T: Real>(times: &[T], n: usize) -> Vec<T> {
    let count = times.len();
    let (t0, tn) = (times[0], times[count - 1]);
    let two = T::lit(2.0);
    let mut knots = vec![t0; n + 1];
    if n % 2 == 1 {
        let drop = (n - 1) / 2;
        knots.extend_from_slice(&times[1 + drop..count - 1 - drop]);
    } else {
        let drop = n / 2;
        knots.extend(
            times
                .windows(2)
                .map(|w| (w[0] + w[1]) / two)
                .skip(drop)
                .take(count - 1 - 2 * drop),
        );
    }
    knots.extend(std::iter::repeat(tn).take(n + 1));
    knots
}

/// `interpolate_nonuniform`: degree-`n` spline through every sample.
///
/// The collocation system is banded and solved by banded LU with partial
/// pivoting. Systems with a 1-norm condition estimate above
/// [`MAX_CONDITION`] are rejected.
pub fn interpolate_nonuniform<T: Real>(samples: &SampleSet<T>, n: usize) -> Result<SplineInterpolant<T>> {
    if n == 0 {
        return Err(Error::InvalidArgument("spline order must be at least 1".into()));
    }
    let times = samples.times();
    let values = samples.values();
    if times.len() < n + 2 {
        return Err(Error::TooFewPoints {
            needed: n + 2,
            got: times.len(),
        });
    }
    let count = times.len();
    let knots = build_knots(times, n);
    for (i, w) in knots[n..knots.len() - n].windows(2).enumerate() {
        if !(w[1] > w[0]) {
            return Err(Error::RepeatedKnots { index: i + 1 });
        }
    }
    debug_assert_eq!(knots.len() - n - 1, count);

    // rows are assembled first so the band limits can be read off the pattern
    let mut rows: Vec<(usize, Vec<T>)> = Vec::with_capacity(count);
    let (mut kl, mut ku) = (0usize, 0usize);
    for (i, &t) in times.iter().enumerate() {
        let span = super::bspline::find_span(&knots, n, t);
        let mut basis = vec![T::zero(); n + 1];
        basis_funs(&knots, n, span, t, &mut basis);
        let first = span - n;
        for (r, &b) in basis.iter().enumerate() {
            if b != T::zero() {
                kl = kl.max(i.saturating_sub(first + r));
                ku = ku.max((first + r).saturating_sub(i));
            }
        }
        rows.push((first, basis));
    }
    let mut a = BandedMatrix::zeros(count, kl, ku);
    for (i, (first, basis)) in rows.iter().enumerate() {
        for (r, &b) in basis.iter().enumerate() {
            if b != T::zero() {
                a.set(i, first + r, b);
            }
        }
    }

    let norm = a.norm_one();
    let lu = a.factor();
    let span_of = |row: usize| {
        let lo = row.min(count - 2);
        (times[lo].to_f64_lossy(), times[lo + 1].to_f64_lossy())
    };
    if let Some(row) = lu.singular_at() {
        let (span_lo, span_hi) = span_of(row);
        return Err(Error::IllConditioned {
            condition: f64::INFINITY,
            span_lo,
            span_hi,
        });
    }
    let condition = (norm * lu.inverse_norm_one_estimate()).to_f64_lossy();
    if !(condition <= MAX_CONDITION) {
        let (span_lo, span_hi) = span_of(lu.weakest_pivot());
        return Err(Error::IllConditioned {
            condition,
            span_lo,
            span_hi,
        });
    }
    let coefficients = lu.solve(values);
    Ok(SplineInterpolant {
        order: n,
        knots,
        coefficients,
        domain: (times[0], times[count - 1]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::linspace;

    fn set(times: Vec<f64>, f: impl Fn(f64) -> f64) -> SampleSet<f64> {
        let values = times.iter().map(|&t| f(t)).collect();
        SampleSet::new(times, values).unwrap()
    }

    #[test]
    fn knot_exactness_all_orders() {
        let times: Vec<f64> = (0..40).map(|i| i as f64 + 0.3 * (i as f64 * 1.7).sin()).collect();
        let s = set(times, |t| (t * 0.9).cos() + 0.1 * t);
        for n in 1..=9 {
            let sp = interpolate_nonuniform(&s, n).unwrap();
            for (t, v) in s.times().iter().zip(s.values()) {
                assert!((sp.eval(*t).unwrap() - v).abs() < 1e-10, "n={n} t={t}");
            }
        }
    }

    #[test]
    fn too_few_samples() {
        let s = set(vec![0.0, 1.0, 2.0], |t| t);
        assert!(matches!(
            interpolate_nonuniform(&s, 3),
            Err(Error::TooFewPoints { needed: 5, got: 3 })
        ));
    }

    #[test]
    fn outside_domain_is_an_error() {
        let s = set(linspace(0.0, 5.0, 11), |t| t * t);
        let sp = interpolate_nonuniform(&s, 3).unwrap();
        assert!(matches!(sp.eval(-0.01), Err(Error::OutOfDomain { .. })));
        assert!(matches!(sp.eval(5.01), Err(Error::OutOfDomain { .. })));
        assert!(sp.eval(5.0).is_ok());
    }

    #[test]
    fn minimal_sample_counts() {
        for n in 1..=12 {
            let s = set(linspace(0.0, 1.0, n + 2), |t| (3.0 * t).sin());
            let sp = interpolate_nonuniform(&s, n).unwrap();
            for (t, v) in s.times().iter().zip(s.values()) {
                assert!((sp.eval(*t).unwrap() - v).abs() < 1e-9, "n={n}");
            }
        }
    }

    #[test]
    fn crowded_knots_are_flagged() {
        let mut times: Vec<f64> = (0..30).map(|i| i as f64).collect();
        times[15] = times[14] + 1e-14;
        let s = set(times, |t| t.sin());
        assert!(matches!(
            interpolate_nonuniform(&s, 3),
            Err(Error::IllConditioned { .. })
        ));
    }
}
