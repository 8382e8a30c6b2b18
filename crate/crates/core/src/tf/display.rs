use crate::scalar::Real;

use super::TfRepresentation;

/// Lower clip of the display scale.
pub const DISPLAY_FLOOR: f64 = 1e-2;
/// Quantile at which large entries are clipped.
pub const DISPLAY_QUANTILE: f64 = 0.998;

/// Log-scale display matrix, row-major like its source.
#[derive(Debug, Clone, PartialEq)]
pub struct DisplayMatrix<T> {
    pub values: Vec<T>,
    pub freq_bins: usize,
    pub frames: usize,
    pub quantile_q: T,
}

impl<T: Real> DisplayMatrix<T> {
    pub fn get(&self, i: usize, j: usize) -> T {
        self.values[i * self.frames + j]
    }

    /// Largest attainable entry, `ln(1 + q)` floored.
    pub fn ceiling(&self) -> T {
        self.quantile_q.ln_1p().max(T::lit(DISPLAY_FLOOR))
    }
}

/// Empirical `p`-quantile with linear interpolation between order statistics
/// at position `p·(n − 1)`.
pub fn quantile<T: Real>(values: &[T], p: f64) -> T {
    assert!(!values.is_empty(), "quantile of an empty set");
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let pos = T::lit(p.clamp(0.0, 1.0)) * T::from_usize_lossy(sorted.len() - 1);
    let lo = pos.floor().to_usize().unwrap_or(0);
    let hi = (lo + 1).min(sorted.len() - 1);
    let frac = pos - T::from_usize_lossy(lo);
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

/// `log_display`: `max(10⁻², ln(1 + min(|R|, q)))` with `q` the 99.8% quantile
/// of all entries of `|R|`, zeros included.
pub fn log_display<T: Real>(tfr: &TfRepresentation<T>) -> DisplayMatrix<T> {
    let mags = tfr.magnitudes();
    let q = quantile(&mags, DISPLAY_QUANTILE);
    let floor = T::lit(DISPLAY_FLOOR);
    let values = mags.into_iter().map(|m| m.min(q).ln_1p().max(floor)).collect();
    DisplayMatrix {
        values,
        freq_bins: tfr.freq_bins(),
        frames: tfr.frames(),
        quantile_q: q,
    }
}
