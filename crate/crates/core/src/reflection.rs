//! Reflected components of spline-interpolated, non-uniformly sampled
//! oscillations.
//!
//! Interpolating the samples `f(t_m)`, `ψ(t_m) = m`, with a degree-`n` spline
//! gives approximately
//!
//! ```text
//! f̃(t) ≈ a(t) Σ_k η̂ₙ(k − β(t)) cos(2π(kψ(t) − φ(t))),   β = φ′/ψ′,
//! ```
//!
//! so besides the `k = 0` term (the signal itself) there are components with
//! IF `|kψ′ − φ′|`; `k = 1` mirrors the true IF about the INF `ψ′/2`.

use std::ops::RangeInclusive;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampling::{check_inr, sample_signal, InrReport, SamplingScheme};
use crate::scalar::Real;
use crate::signal_model::{Curve, ImtSignal};
use crate::spline::{interpolate_nonuniform, resample_uniform, KernelSpectrum};
use crate::tf::{ridge_extract_masked, Ridge, TfRepresentation, UniformSignal};

/// One term of the reflection series.
#[derive(Clone)]
pub struct PredictedComponent<T> {
    pub k: i64,
    /// `|kψ′(t) − φ′(t)|`, Hz.
    pub if_curve: Curve<T>,
    /// `a(t)·η̂ₙ(k − φ′(t)/ψ′(t))`, signed.
    pub amp_curve: Curve<T>,
    /// `max |amp_curve|` on the prediction grid, used for ranking.
    pub peak_amplitude: T,
}

impl<T: Real> std::fmt::Debug for PredictedComponent<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PredictedComponent")
            .field("k", &self.k)
            .field("peak_amplitude", &self.peak_amplitude)
            .finish_non_exhaustive()
    }
}

impl<T: Real> PredictedComponent<T> {
    pub fn frequency(&self, t: T) -> T {
        (self.if_curve)(t)
    }

    pub fn amplitude(&self, t: T) -> T {
        (self.amp_curve)(t)
    }
}

/// Predicted components, strongest first, and the Nyquist-rate check.
#[derive(Debug, Clone)]
pub struct Prediction<T: Real> {
    pub components: Vec<PredictedComponent<T>>,
    pub inr: InrReport,
}

impl<T: Real> Prediction<T> {
    pub fn component(&self, k: i64) -> Option<&PredictedComponent<T>> {
        self.components.iter().find(|c| c.k == k)
    }
}

/// `predict_components` for every `k` in `k_range`.
///
/// A negative INR margin (`ψ′ < 2φ′` somewhere on `grid`) is reported in
/// [`Prediction::inr`], not treated as an error.
pub fn predict_components<T: Real>(
    signal: &ImtSignal<T>,
    scheme: &SamplingScheme<T>,
    n: usize,
    k_range: RangeInclusive<i64>,
    grid: &[T],
) -> Result<Prediction<T>> {
    if !k_range.contains(&0) {
        return Err(Error::InvalidArgument(format!(
            "k range {}..={} must contain 0",
            k_range.start(),
            k_range.end()
        )));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("spline order must be at least 1".into()));
    }
    let spectrum = KernelSpectrum::with_default_truncation(n);
    let mut components: Vec<PredictedComponent<T>> = k_range
        .map(|k| {
            let kf = T::from_i64(k).expect("k representable");
            let (sig_if, sch_if) = (signal.clone(), scheme.clone());
            let if_curve: Curve<T> = Arc::new(move |t| (kf * sch_if.psi_prime(t) - sig_if.iff(t)).abs());
            let (sig_amp, sch_amp) = (signal.clone(), scheme.clone());
            let amp_curve: Curve<T> = Arc::new(move |t| {
                let beta = sig_amp.iff(t) / sch_amp.psi_prime(t);
                sig_amp.am(t) * spectrum.eval(kf - beta)
            });
            let peak_amplitude = grid.iter().fold(T::zero(), |m, &t| m.max(amp_curve(t).abs()));
            PredictedComponent {
                k,
                if_curve,
                amp_curve,
                peak_amplitude,
            }
        })
        .collect();
    components.sort_by(|a, b| {
        b.peak_amplitude
            .partial_cmp(&a.peak_amplitude)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.k.abs().cmp(&b.k.abs()))
            .then(a.k.cmp(&b.k))
    });
    Ok(Prediction {
        components,
        inr: check_inr(signal, scheme, grid),
    })
}

/// Uniform grid `t_start + j/rate` covering `span`.
fn uniform_grid<T: Real>(rate: T, span: (T, T)) -> Result<Vec<T>> {
    if !(rate > T::zero()) || !(span.1 > span.0) {
        return Err(Error::InvalidArgument(format!(
            "need rate > 0 and a nonempty span, got rate {rate}, [{}, {}]",
            span.0, span.1
        )));
    }
    let steps = ((span.1 - span.0) * rate + T::lit(1e-9)).floor().to_usize().unwrap_or(0);
    Ok((0..=steps)
        .map(|j| (span.0 + T::from_usize_lossy(j) / rate).min(span.1))
        .collect())
}

/// `synthesize_prediction`: the series truncated to `|k| ≤ k_max`, on the
/// uniform grid `span.0 + j/rate`.
pub fn synthesize_prediction<T: Real>(
    signal: &ImtSignal<T>,
    scheme: &SamplingScheme<T>,
    n: usize,
    k_max: usize,
    rate: T,
    span: (T, T),
) -> Result<UniformSignal<T>> {
    if n == 0 {
        return Err(Error::InvalidArgument("spline order must be at least 1".into()));
    }
    let spectrum = KernelSpectrum::with_default_truncation(n);
    let k_max = k_max as i64;
    let ks: Vec<i64> = (-k_max..=k_max).collect();
    let values = uniform_grid(rate, span)?
        .into_iter()
        .map(|t| {
            let a = signal.am(t);
            if a == T::zero() {
                return T::zero();
            }
            let psi = frac_part(scheme.psi(t));
            let phi = frac_part(signal.phase(t));
            let beta = signal.iff(t) / scheme.psi_prime(t);
            let weights = spectrum.shifted(beta, &ks);
            let sum: T = ks
                .iter()
                .zip(weights)
                .map(|(&k, w)| {
                    let arg = T::from_i64(k).expect("k representable") * psi - phi;
                    w * (T::two_pi() * arg.fract()).cos()
                })
                .sum();
            a * sum
        })
        .collect();
    UniformSignal::new(values, rate, span.0)
}

/// Phases enter only modulo 1; dropping the integer part keeps `kψ − φ`
/// accurate for long spans.
fn frac_part<T: Real>(x: T) -> T {
    x - x.floor()
}

/// Outcome of comparing the interpolation pipeline with the series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    /// `‖pipeline − series‖₂ / ‖series‖₂` over the trimmed span.
    pub residual: f64,
    pub trim_s: f64,
    pub interior: (f64, f64),
    pub samples: usize,
}

/// `verify_reflection_theorem`: samples `signal` on `scheme` within `span`,
/// interpolates with degree `n`, resamples at `rate` and compares with
/// [`synthesize_prediction`] after trimming `(n + 1)/min ψ′` seconds per side.
pub fn verify_reflection_theorem<T: Real>(
    signal: &ImtSignal<T>,
    scheme: &SamplingScheme<T>,
    n: usize,
    k_max: usize,
    rate: T,
    span: (T, T),
) -> Result<TheoremReport> {
    let samples = sample_signal(signal, scheme, span.0, span.1)?;
    let times = samples.times();
    let (first, last) = (times[0], times[times.len() - 1]);
    let interp = interpolate_nonuniform(&samples, n)?;
    let pipeline = resample_uniform(&interp, rate, first, last)?;
    let series = synthesize_prediction(signal, scheme, n, k_max, rate, (first, last))?;

    let min_isr = pipeline
        .times()
        .into_iter()
        .map(|t| scheme.psi_prime(t))
        .fold(T::infinity(), T::min);
    let trim = T::from_usize_lossy(n + 1) / min_isr;
    let (lo, hi) = (first + trim, last - trim);
    if !(hi > lo) {
        return Err(Error::InvalidArgument(format!(
            "span [{first}, {last}] is too short to trim {trim} s per side"
        )));
    }
    let (mut diff, mut norm) = (T::zero(), T::zero());
    for (j, (a, b)) in pipeline.values().iter().zip(series.values()).enumerate() {
        let t = pipeline.time(j);
        if t >= lo && t <= hi {
            diff += (*a - *b) * (*a - *b);
            norm += *b * *b;
        }
    }
    let residual = if norm > T::zero() {
        (diff / norm).sqrt()
    } else if diff > T::zero() {
        T::infinity()
    } else {
        T::zero()
    };
    Ok(TheoremReport {
        residual: residual.to_f64_lossy(),
        trim_s: trim.to_f64_lossy(),
        interior: (lo.to_f64_lossy(), hi.to_f64_lossy()),
        samples: times.len(),
    })
}

/// Residuals for a family of scenarios with decreasing modulation, labelled by
/// their scale factor.
pub fn epsilon_scaling_table<T: Real>(
    family: &[(f64, ImtSignal<T>, SamplingScheme<T>)],
    n: usize,
    k_max: usize,
    rate: T,
    span: (T, T),
) -> Result<Vec<(f64, TheoremReport)>> {
    family
        .iter()
        .map(|(scale, signal, scheme)| Ok((*scale, verify_reflection_theorem(signal, scheme, n, k_max, rate, span)?)))
        .collect()
}

/// `above_inf_energy_ratio`: share of `|R|` lying strictly above the INF
/// curve, frame by frame; 0 for an all-zero matrix.
pub fn above_inf_energy_ratio<T: Real>(tfr: &TfRepresentation<T>, inf_curve: &dyn Fn(T) -> T) -> T {
    let freqs = tfr.freq_axis();
    let (mut above, mut total) = (T::zero(), T::zero());
    for (j, &t) in tfr.time_axis().iter().enumerate() {
        let inf = inf_curve(t);
        for (i, &f) in freqs.iter().enumerate() {
            let m = tfr.magnitude(i, j);
            total += m;
            if f > inf {
                above += m;
            }
        }
    }
    if total > T::zero() {
        above / total
    } else {
        T::zero()
    }
}

/// Ridge restricted to bins strictly above the INF curve and at most `freq_max`.
pub fn ridge_above_inf<T: Real>(
    tfr: &TfRepresentation<T>,
    inf_curve: &dyn Fn(T) -> T,
    freq_max: T,
    jump_penalty: T,
) -> Result<Ridge<T>> {
    let times = tfr.time_axis();
    let infs: Vec<T> = times.iter().map(|&t| inf_curve(t)).collect();
    let low = infs.iter().copied().fold(T::infinity(), T::min);
    let freqs = tfr.freq_axis().to_vec();
    ridge_extract_masked(tfr, low, freq_max, jump_penalty, |i, j| freqs[i] > infs[j])
}

/// Ridge restricted to bins at or below the INF curve and at least `freq_min`.
pub fn ridge_below_inf<T: Real>(
    tfr: &TfRepresentation<T>,
    inf_curve: &dyn Fn(T) -> T,
    freq_min: T,
    jump_penalty: T,
) -> Result<Ridge<T>> {
    let times = tfr.time_axis();
    let infs: Vec<T> = times.iter().map(|&t| inf_curve(t)).collect();
    let high = infs.iter().copied().fold(T::neg_infinity(), T::max);
    let freqs = tfr.freq_axis().to_vec();
    ridge_extract_masked(tfr, freq_min, high, jump_penalty, |i, j| freqs[i] <= infs[j])
}
