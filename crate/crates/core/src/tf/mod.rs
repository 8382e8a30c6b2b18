//! Time-frequency analysis: STFT, synchrosqueezing, reassignment, their
//! multitaper averages, log-scale display and ridge extraction.

mod display;
mod ridge;
mod transform;
mod window;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

pub use display::{log_display, quantile, DisplayMatrix, DISPLAY_FLOOR, DISPLAY_QUANTILE};
pub use ridge::{ridge_extract, Ridge};
pub(crate) use ridge::ridge_extract_masked;
pub use transform::{default_nfft, multitaper, reassign, stft, synchrosqueeze, AnalysisParams};
pub use window::{make_windows, Window, WindowFamily, MAX_TAPERS, MIN_WINDOW_SAMPLES};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Uniformly sampled real signal.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformSignal<T> {
    values: Vec<T>,
    rate: T,
    t_start: T,
}

impl<T: Real> UniformSignal<T> {
    pub fn new(values: Vec<T>, rate: T, t_start: T) -> Result<Self> {
        if !(rate > T::zero()) || !rate.is_finite() {
            return Err(Error::InvalidArgument(format!("sampling rate must be positive, got {rate}")));
        }
        if values.len() < 2 {
            return Err(Error::TooFewPoints {
                needed: 2,
                got: values.len(),
            });
        }
        Ok(Self { values, rate, t_start })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn rate(&self) -> T {
        self.rate
    }

    pub fn t_start(&self) -> T {
        self.t_start
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn time(&self, k: usize) -> T {
        self.t_start + T::from_usize_lossy(k) / self.rate
    }

    pub fn times(&self) -> Vec<T> {
        (0..self.len()).map(|k| self.time(k)).collect()
    }

    pub fn t_end(&self) -> T {
        self.time(self.len() - 1)
    }

    /// Same grid, new values.
    pub fn with_values(&self, values: Vec<T>) -> Result<Self> {
        Self::new(values, self.rate, self.t_start)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TfMethod {
    Stft,
    Sst,
    Rm,
    MtSst,
    MtRm,
}

impl TfMethod {
    pub const ALL: [TfMethod; 5] = [Self::Stft, Self::Sst, Self::Rm, Self::MtSst, Self::MtRm];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Stft => "stft",
            Self::Sst => "sst",
            Self::Rm => "rm",
            Self::MtSst => "mt_sst",
            Self::MtRm => "mt_rm",
        }
    }

    pub fn is_multitaper(&self) -> bool {
        matches!(self, Self::MtSst | Self::MtRm)
    }
}

impl fmt::Display for TfMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TfMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown TF method `{s}`")))
    }
}

/// Analysis settings recorded alongside every representation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowMeta {
    pub family: WindowFamily,
    pub duration_s: f64,
    pub hop: usize,
    pub nfft: usize,
    pub tapers: usize,
    pub threshold: f64,
}

/// Matrix payload, row-major with one row per frequency bin.
#[derive(Debug, Clone, PartialEq)]
pub enum TfMatrix<T> {
    Complex(Vec<Complex<T>>),
    Real(Vec<T>),
}

/// A time-frequency representation `R` of shape `freq_bins × frames`.
#[derive(Debug, Clone, PartialEq)]
pub struct TfRepresentation<T> {
    matrix: TfMatrix<T>,
    freq_axis: Vec<T>,
    time_axis: Vec<T>,
    method: TfMethod,
    window: WindowMeta,
}

impl<T: Real> TfRepresentation<T> {
    pub fn new(
        matrix: TfMatrix<T>,
        freq_axis: Vec<T>,
        time_axis: Vec<T>,
        method: TfMethod,
        window: WindowMeta,
    ) -> Result<Self> {
        let cells = freq_axis.len() * time_axis.len();
        let len = match &matrix {
            TfMatrix::Complex(v) => v.len(),
            TfMatrix::Real(v) => v.len(),
        };
        if len != cells || cells == 0 {
            return Err(Error::InvalidArgument(format!(
                "matrix has {len} entries, axes imply {} x {}",
                freq_axis.len(),
                time_axis.len()
            )));
        }
        for axis in [&freq_axis, &time_axis] {
            if let Some(i) = axis.windows(2).position(|w| !(w[1] > w[0])) {
                return Err(Error::NotIncreasing { index: i + 1 });
            }
        }
        if let TfMatrix::Real(v) = &matrix {
            if v.iter().any(|x| !(*x >= T::zero())) {
                return Err(Error::InvalidArgument("real TF matrices must be nonnegative".into()));
            }
        }
        Ok(Self {
            matrix,
            freq_axis,
            time_axis,
            method,
            window,
        })
    }

    pub fn freq_bins(&self) -> usize {
        self.freq_axis.len()
    }

    pub fn frames(&self) -> usize {
        self.time_axis.len()
    }

    pub fn freq_axis(&self) -> &[T] {
        &self.freq_axis
    }

    pub fn time_axis(&self) -> &[T] {
        &self.time_axis
    }

    pub fn method(&self) -> TfMethod {
        self.method
    }

    pub fn window(&self) -> &WindowMeta {
        &self.window
    }

    pub fn matrix(&self) -> &TfMatrix<T> {
        &self.matrix
    }

    /// Frequency spacing of the grid.
    pub fn bin_width(&self) -> T {
        if self.freq_axis.len() > 1 {
            self.freq_axis[1] - self.freq_axis[0]
        } else {
            T::zero()
        }
    }

    /// `|R[i, j]|` for bin `i`, frame `j`.
    pub fn magnitude(&self, i: usize, j: usize) -> T {
        let idx = i * self.frames() + j;
        match &self.matrix {
            TfMatrix::Complex(v) => v[idx].norm(),
            TfMatrix::Real(v) => v[idx],
        }
    }

    /// All `|R|` entries, row-major.
    pub fn magnitudes(&self) -> Vec<T> {
        match &self.matrix {
            TfMatrix::Complex(v) => v.iter().map(|c| c.norm()).collect(),
            TfMatrix::Real(v) => v.clone(),
        }
    }

    /// Frames whose time lies in `[t_lo, t_hi]`.
    pub fn time_slice(&self, t_lo: T, t_hi: T) -> Result<Self> {
        let keep: Vec<usize> = (0..self.frames())
            .filter(|&j| self.time_axis[j] >= t_lo && self.time_axis[j] <= t_hi)
            .collect();
        let (Some(&first), Some(&last)) = (keep.first(), keep.last()) else {
            return Err(Error::InvalidArgument(format!("no frames in [{t_lo}, {t_hi}]")));
        };
        let frames = self.frames();
        let pick = |row: usize| (row * frames + first)..=(row * frames + last);
        let matrix = match &self.matrix {
            TfMatrix::Complex(v) => TfMatrix::Complex((0..self.freq_bins()).flat_map(|i| v[pick(i)].to_vec()).collect()),
            TfMatrix::Real(v) => TfMatrix::Real((0..self.freq_bins()).flat_map(|i| v[pick(i)].to_vec()).collect()),
        };
        Ok(Self {
            matrix,
            freq_axis: self.freq_axis.clone(),
            time_axis: self.time_axis[first..=last].to_vec(),
            method: self.method,
            window: self.window,
        })
    }

    /// Copy with entries replaced by `keep(i, j)`-selected values, the rest zero.
    pub(crate) fn masked(&self, keep: impl Fn(usize, usize) -> bool) -> Self {
        let frames = self.frames();
        let matrix = match &self.matrix {
            TfMatrix::Complex(v) => TfMatrix::Complex(
                v.iter()
                    .enumerate()
                    .map(|(idx, c)| if keep(idx / frames, idx % frames) { *c } else { Complex::new(T::zero(), T::zero()) })
                    .collect(),
            ),
            TfMatrix::Real(v) => TfMatrix::Real(
                v.iter()
                    .enumerate()
                    .map(|(idx, x)| if keep(idx / frames, idx % frames) { *x } else { T::zero() })
                    .collect(),
            ),
        };
        Self {
            matrix,
            freq_axis: self.freq_axis.clone(),
            time_axis: self.time_axis.clone(),
            method: self.method,
            window: self.window,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meta() -> WindowMeta {
        WindowMeta {
            family: WindowFamily::Gaussian,
            duration_s: 1.0,
            hop: 1,
            nfft: 4,
            tapers: 1,
            threshold: 0.0,
        }
    }

    #[test]
    fn uniform_signal_invariants() {
        assert!(UniformSignal::new(vec![1.0], 8.0, 0.0).is_err());
        assert!(UniformSignal::new(vec![1.0, 2.0], 0.0, 0.0).is_err());
        let s = UniformSignal::new(vec![0.0; 17], 8.0, 1.0).unwrap();
        assert_eq!(s.t_end(), 3.0);
    }

    #[test]
    fn representation_checks_shape_and_sign() {
        let f = vec![0.0, 1.0];
        let t = vec![0.0, 0.5, 1.0];
        assert!(TfRepresentation::new(TfMatrix::Real(vec![0.0; 6]), f.clone(), t.clone(), TfMethod::Rm, meta()).is_ok());
        assert!(TfRepresentation::new(TfMatrix::Real(vec![0.0; 5]), f.clone(), t.clone(), TfMethod::Rm, meta()).is_err());
        assert!(TfRepresentation::new(TfMatrix::Real(vec![-1.0; 6]), f.clone(), t, TfMethod::Rm, meta()).is_err());
        assert!(TfRepresentation::new(TfMatrix::Real(vec![0.0; 6]), f, vec![0.0, 0.0, 1.0], TfMethod::Rm, meta()).is_err());
    }

    #[test]
    fn time_slice_keeps_rows() {
        let tfr = TfRepresentation::new(
            TfMatrix::Real((0..8).map(f64::from).collect()),
            vec![0.0, 1.0],
            vec![0.0, 1.0, 2.0, 3.0],
            TfMethod::Rm,
            meta(),
        )
        .unwrap();
        let s = tfr.time_slice(0.5, 2.5).unwrap();
        assert_eq!(s.time_axis(), &[1.0, 2.0]);
        assert_eq!(s.magnitudes(), vec![1.0, 2.0, 5.0, 6.0]);
        assert!(tfr.time_slice(4.0, 5.0).is_err());
    }

    #[test]
    fn method_names_round_trip() {
        for m in TfMethod::ALL {
            assert_eq!(m.as_str().parse::<TfMethod>().unwrap(), m);
        }
    }
}
