use crate::error::{Error, Result};
use crate::scalar::Real;

/// Cardinal B-spline `N_n` of degree `n` on the integer knots `0, 1, …, n+1`.
///
/// Evaluated with the uniform recursion
/// `N_n(x) = (x·N_{n-1}(x) + (n+1-x)·N_{n-1}(x-1)) / n`, which avoids the
/// cancellation of the truncated-power sum at high order.
pub fn cardinal_bspline<T: Real>(n: usize, x: T) -> T {
    let upper = T::from_usize_lossy(n + 1);
    if !(x > T::zero() && x < upper) {
        // N_0 is the indicator of [0, 1); higher orders vanish on the boundary.
        return if n == 0 && x == T::zero() { T::one() } else { T::zero() };
    }
    // values[k] = N_p(x - k)
    let mut values = vec![T::zero(); n + 2];
    let cell = x.floor().to_usize().unwrap_or(0).min(n);
    values[cell] = T::one();
    for p in 1..=n {
        let pf = T::from_usize_lossy(p);
        for k in 0..=n {
            let u = x - T::from_usize_lossy(k);
            values[k] = (u * values[k] + (pf + T::one() - u) * values[k + 1]) / pf;
        }
    }
    values[0]
}

/// Single non-uniform B-spline `N_{n,j}(x)` supported on `[knots[j], knots[j+n+1]]`,
/// evaluated by the Cox–de Boor recursion.
pub fn nonuniform_bspline<T: Real>(n: usize, j: usize, knots: &[T], x: T) -> Result<T> {
    if j + n + 1 >= knots.len() {
        return Err(Error::InvalidArgument(format!(
            "basis {j} of degree {n} needs {} knots, got {}",
            j + n + 2,
            knots.len()
        )));
    }
    let local = &knots[j..=j + n + 1];
    for (i, w) in local.windows(2).enumerate() {
        if !(w[1] > w[0]) {
            return Err(Error::RepeatedKnots { index: j + i + 1 });
        }
    }
    if x < local[0] || x >= local[n + 1] {
        return Ok(T::zero());
    }
    // degree-0 pieces on the n+1 local intervals
    let mut table: Vec<T> = local
        .windows(2)
        .map(|w| if x >= w[0] && x < w[1] { T::one() } else { T::zero() })
        .collect();
    for p in 1..=n {
        for k in 0..=n - p {
            let left = (x - local[k]) / (local[k + p] - local[k]) * table[k];
            let right = (local[k + p + 1] - x) / (local[k + p + 1] - local[k + 1]) * table[k + 1];
            table[k] = left + right;
        }
    }
    Ok(table[0])
}

/// Index `s` of the knot interval `[knots[s], knots[s+1])` holding `x`,
/// restricted to `degree <= s < knots.len() - degree - 1`.
pub(crate) fn find_span<T: Real>(knots: &[T], degree: usize, x: T) -> usize {
    let hi = knots.len() - degree - 2;
    let s = knots.partition_point(|&k| k <= x).saturating_sub(1);
    s.clamp(degree, hi)
}

/// The `degree + 1` basis values `N_{s-degree}(x) … N_s(x)` on span `s`.
pub(crate) fn basis_funs<T: Real>(knots: &[T], degree: usize, span: usize, x: T, out: &mut [T]) {
    debug_assert_eq!(out.len(), degree + 1);
    let mut left = vec![T::zero(); degree + 1];
    let mut right = vec![T::zero(); degree + 1];
    out[0] = T::one();
    for j in 1..=degree {
        left[j] = x - knots[span + 1 - j];
        right[j] = knots[span + j] - x;
        let mut saved = T::zero();
        for r in 0..j {
            let temp = out[r] / (right[r + 1] + left[j - r]);
            out[r] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        out[j] = saved;
    }
}
