use crate::error::{Error, Result};
use crate::scalar::Real;

use super::TfRepresentation;

/// Extracted ridge: one bin index and frequency per frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Ridge<T> {
    pub bins: Vec<usize>,
    pub freqs: Vec<T>,
}

/// `ridge_extract` over every bin in `[freq_min, freq_max]`.
pub fn ridge_extract<T: Real>(tfr: &TfRepresentation<T>, freq_min: T, freq_max: T, jump_penalty: T) -> Result<Ridge<T>> {
    ridge_extract_masked(tfr, freq_min, freq_max, jump_penalty, |_, _| true)
}

/// Ridge by dynamic programming on the band-normalized magnitude
/// `|R| / max_band |R|`, minus `jump_penalty·|Δbin|` per frame step.
/// Entries rejected by `allow(bin, frame)` score zero. Ties resolve toward
/// the lower frequency.
pub(crate) fn ridge_extract_masked<T: Real>(
    tfr: &TfRepresentation<T>,
    freq_min: T,
    freq_max: T,
    jump_penalty: T,
    allow: impl Fn(usize, usize) -> bool,
) -> Result<Ridge<T>> {
    let axis = tfr.freq_axis();
    let lo = axis.partition_point(|&f| f < freq_min);
    let hi = axis.partition_point(|&f| f <= freq_max);
    if !(freq_min <= freq_max) || lo >= hi {
        return Err(Error::EmptyBand {
            lo: freq_min.to_f64_lossy(),
            hi: freq_max.to_f64_lossy(),
        });
    }
    if !(jump_penalty >= T::zero()) {
        return Err(Error::InvalidArgument("jump penalty must be nonnegative".into()));
    }
    let width = hi - lo;
    let frames = tfr.frames();
    let score = |b: usize, j: usize| {
        if allow(lo + b, j) {
            tfr.magnitude(lo + b, j)
        } else {
            T::zero()
        }
    };
    let peak = (0..frames)
        .flat_map(|j| (0..width).map(move |b| (b, j)))
        .fold(T::zero(), |m, (b, j)| m.max(score(b, j)));
    let norm = if peak > T::zero() { T::one() / peak } else { T::zero() };

    // L1 distance transform per frame: best[b] = max_b' prev[b'] − λ|b − b'|
    let mut total: Vec<T> = (0..width).map(|b| score(b, 0) * norm).collect();
    let mut back: Vec<Vec<usize>> = Vec::with_capacity(frames);
    back.push((0..width).collect());
    let mut fwd = vec![(T::zero(), 0usize); width];
    let mut bwd = vec![(T::zero(), 0usize); width];
    for j in 1..frames {
        for b in 0..width {
            fwd[b] = if b > 0 && fwd[b - 1].0 - jump_penalty >= total[b] {
                (fwd[b - 1].0 - jump_penalty, fwd[b - 1].1)
            } else {
                (total[b], b)
            };
        }
        for b in (0..width).rev() {
            bwd[b] = if b + 1 < width && bwd[b + 1].0 - jump_penalty > total[b] {
                (bwd[b + 1].0 - jump_penalty, bwd[b + 1].1)
            } else {
                (total[b], b)
            };
        }
        let mut from = vec![0usize; width];
        for b in 0..width {
            let (value, origin) = if fwd[b].0 >= bwd[b].0 { fwd[b] } else { bwd[b] };
            total[b] = value + score(b, j) * norm;
            from[b] = origin;
        }
        back.push(from);
    }

    let mut best = 0;
    for b in 1..width {
        if total[b] > total[best] {
            best = b;
        }
    }
    let mut bins = vec![0usize; frames];
    for j in (0..frames).rev() {
        bins[j] = lo + best;
        best = back[j][best];
    }
    let freqs = bins.iter().map(|&b| axis[b]).collect();
    Ok(Ridge { bins, freqs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tf::{TfMatrix, TfMethod, WindowFamily, WindowMeta};

    fn rep(bins: usize, frames: usize, f: impl Fn(usize, usize) -> f64) -> TfRepresentation<f64> {
        let mut v = vec![0.0; bins * frames];
        for i in 0..bins {
            for j in 0..frames {
                v[i * frames + j] = f(i, j);
            }
        }
        TfRepresentation::new(
            TfMatrix::Real(v),
            (0..bins).map(|i| i as f64 * 0.5).collect(),
            (0..frames).map(|j| j as f64).collect(),
            TfMethod::Rm,
            WindowMeta {
                family: WindowFamily::Gaussian,
                duration_s: 1.0,
                hop: 1,
                nfft: 2 * bins - 2,
                tapers: 1,
                threshold: 0.0,
            },
        )
        .unwrap()
    }

    #[test]
    fn zero_matrix_picks_lowest_bin() {
        let r = rep(20, 9, |_, _| 0.0);
        let ridge = ridge_extract(&r, 2.0, 8.0, 0.1).unwrap();
        assert!(ridge.bins.iter().all(|&b| b == 4));
    }

    #[test]
    fn constant_line_is_followed() {
        let r = rep(20, 9, |i, _| if i == 11 { 3.0 } else { 0.1 });
        let ridge = ridge_extract(&r, 0.0, 9.5, 0.05).unwrap();
        assert!(ridge.bins.iter().all(|&b| b == 11));
        assert!(ridge.freqs.iter().all(|&f| f == 5.5));
    }

    #[test]
    fn penalty_suppresses_single_frame_outlier() {
        let r = rep(30, 11, |i, j| match (i, j) {
            (25, 5) => 1.2,
            (10, _) => 1.0,
            _ => 0.0,
        });
        let ridge = ridge_extract(&r, 0.0, 15.0, 0.1).unwrap();
        assert!(ridge.bins.iter().all(|&b| b == 10));
        let free = ridge_extract(&r, 0.0, 15.0, 0.0).unwrap();
        assert_eq!(free.bins[5], 25);
    }

    #[test]
    fn empty_band() {
        let r = rep(10, 3, |_, _| 1.0);
        assert!(matches!(ridge_extract(&r, 2.1, 2.2, 0.0), Err(Error::EmptyBand { .. })));
        assert!(ridge_extract(&r, 3.0, 1.0, 0.0).is_err());
    }
}
