//! R-peak records and the heart-rate (IHR) and ECG-derived respiration (EDR)
//! signals interpolated from them.
//!
//! The R-peak train is itself a non-uniform sampling scheme: the `i`-th peak
//! sits where the cumulative heart rate crosses the integer `i`, so both
//! derived signals inherit the reflection effect.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::sampling::{check_increasing, sampling_times, SampleSet, SamplingScheme};
use crate::scalar::Real;
use crate::signal_model::Curve;
use crate::spline::{resample_uniform, InterpolationScheme};
use crate::tf::UniformSignal;

/// Default resampling rate of the derived signals, Hz.
pub const DEFAULT_PHYSIO_RATE: f64 = 8.0;
/// Fewest peaks accepted by [`ihr_signal`].
pub const MIN_IHR_PEAKS: usize = 6;

/// R-peak instants and, optionally, R-peak amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct RPeakRecord<T> {
    times: Vec<T>,
    amplitudes: Option<Vec<T>>,
}

impl<T: Real> RPeakRecord<T> {
    pub fn new(times: Vec<T>, amplitudes: Option<Vec<T>>) -> Result<Self> {
        check_increasing(&times)?;
        if let Some(a) = &amplitudes {
            if a.len() != times.len() {
                return Err(Error::InvalidArgument(format!(
                    "{} amplitudes for {} peaks",
                    a.len(),
                    times.len()
                )));
            }
        }
        Ok(Self { times, amplitudes })
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn amplitudes(&self) -> Option<&[T]> {
        self.amplitudes.as_deref()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// `parse_rpeaks`: CSV with header `time_s` or `time_s,amplitude`.
///
/// Row numbers in errors are 1-based file lines (the header is line 1).
pub fn parse_rpeaks<T: Real>(bytes: &[u8]) -> Result<RPeakRecord<T>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(bytes);
    let header = reader
        .headers()
        .map_err(|e| Error::Parse {
            row: 1,
            message: e.to_string(),
        })?
        .clone();
    let columns: Vec<&str> = header.iter().collect();
    let with_amplitude = match columns.as_slice() {
        [] | [""] => {
            return Err(Error::Parse {
                row: 1,
                message: "empty file".into(),
            })
        }
        ["time_s"] => false,
        ["time_s", "amplitude"] => true,
        other => {
            return Err(Error::Parse {
                row: 1,
                message: format!("expected header `time_s[,amplitude]`, got `{}`", other.join(",")),
            })
        }
    };

    let parse = |text: &str, row: usize, what: &str| -> Result<T> {
        text.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .map(T::lit)
            .ok_or_else(|| Error::Parse {
                row,
                message: format!("invalid {what} `{text}`"),
            })
    };

    let mut times: Vec<T> = Vec::new();
    let mut amplitudes: Vec<T> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse {
            row: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let row = record.position().map_or(0, |p| p.line() as usize);
        let expected = if with_amplitude { 2 } else { 1 };
        if record.len() != expected {
            return Err(Error::Parse {
                row,
                message: format!("expected {expected} fields, got {}", record.len()),
            });
        }
        let t = parse(&record[0], row, "time")?;
        if let Some(&prev) = times.last() {
            if !(t > prev) {
                return Err(Error::Parse {
                    row,
                    message: format!("time {t} does not increase (previous {prev})"),
                });
            }
        }
        times.push(t);
        if with_amplitude {
            amplitudes.push(parse(&record[1], row, "amplitude")?);
        }
    }
    if times.is_empty() {
        return Err(Error::Parse {
            row: 1,
            message: "no R peaks".into(),
        });
    }
    RPeakRecord::new(times, with_amplitude.then_some(amplitudes))
}

/// `rri_series`: `{(t_i, t_{i+1} − t_i)}`, anchored at the earlier peak.
pub fn rri_series<T: Real>(rec: &RPeakRecord<T>) -> Result<SampleSet<T>> {
    if rec.len() < 3 {
        return Err(Error::TooFewPoints {
            needed: 3,
            got: rec.len(),
        });
    }
    let t = rec.times();
    let values = t.windows(2).map(|w| w[1] - w[0]).collect();
    SampleSet::new(t[..t.len() - 1].to_vec(), values)
}

/// `ihr_signal`: cubic interpolation of the RRI series resampled at `rate`
/// over `[t_1, t_{N−1}]`. Values are intervals in seconds, as the series is
/// interpolated directly rather than inverted.
pub fn ihr_signal<T: Real>(rec: &RPeakRecord<T>, rate: T) -> Result<UniformSignal<T>> {
    if rec.len() < MIN_IHR_PEAKS {
        return Err(Error::TooFewPoints {
            needed: MIN_IHR_PEAKS,
            got: rec.len(),
        });
    }
    let rri = rri_series(rec)?;
    let interp = InterpolationScheme::Cubic.build(&rri)?;
    let (lo, hi) = interp.domain();
    resample_uniform(interp.as_ref(), rate, lo, hi)
}

/// `edr_signal`: interpolation of `(t_i, E(t_i))` resampled at `rate`, mean removed.
pub fn edr_signal<T: Real>(rec: &RPeakRecord<T>, rate: T, scheme: InterpolationScheme) -> Result<UniformSignal<T>> {
    let amps = rec
        .amplitudes()
        .ok_or_else(|| Error::InvalidArgument("R-peak record has no amplitudes".into()))?;
    if rec.len() < scheme.min_samples() {
        return Err(Error::TooFewPoints {
            needed: scheme.min_samples(),
            got: rec.len(),
        });
    }
    let set = SampleSet::new(rec.times().to_vec(), amps.to_vec())?;
    let interp = scheme.build(&set)?;
    let (lo, hi) = interp.domain();
    let sig = resample_uniform(interp.as_ref(), rate, lo, hi)?;
    let mean = sig.values().iter().copied().sum::<T>() / T::from_usize_lossy(sig.len());
    let centred = sig.values().iter().map(|v| *v - mean).collect();
    sig.with_values(centred)
}

/// Integration cell used for the synthetic heart-rate antiderivative, s.
const SYNTH_CELL_S: f64 = 0.25;

/// `synth_rpeaks`: peaks where `∫₀ᵗ ihr` crosses an integer (the first at
/// `t = 0`), amplitudes `1 + depth·cos(2π ∫₀ᵗ resp_if)`.
pub fn synth_rpeaks<T: Real>(
    ihr_curve: Curve<T>,
    resp_if: Curve<T>,
    duration_s: T,
    modulation_depth: T,
) -> Result<RPeakRecord<T>> {
    if !(duration_s > T::zero()) {
        return Err(Error::InvalidArgument(format!("duration must be positive, got {duration_s}")));
    }
    let cell = T::lit(SYNTH_CELL_S);
    let heart = SamplingScheme::from_rate(ihr_curve, T::zero(), duration_s, cell);
    let times = sampling_times(&heart, T::zero(), duration_s)?;
    let resp = SamplingScheme::from_rate(resp_if, T::zero(), duration_s, cell);
    let amplitudes = times
        .iter()
        .map(|&t| T::one() + modulation_depth * (T::two_pi() * resp.psi(t)).cos())
        .collect();
    RPeakRecord::new(times, Some(amplitudes))
}

/// Constant-rate curve, convenient for synthetic trains.
pub fn constant_curve<T: Real>(value: T) -> Curve<T> {
    Arc::new(move |_| value)
}
