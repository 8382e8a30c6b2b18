//! Countermeasures against reflected components: masking above the INF and
//! low-pass prefiltering. (The third one, high-order interpolation, is just
//! [`interpolate_nonuniform`](crate::spline::interpolate_nonuniform) with
//! [`HIGH_ORDER`](crate::spline::HIGH_ORDER).)

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::tf::{TfRepresentation, UniformSignal};

/// A representation with everything strictly above the INF zeroed.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskedTfr<T> {
    pub tfr: TfRepresentation<T>,
    /// INF evaluated at each frame time.
    pub inf_values: Vec<T>,
}

/// `inf_hard_threshold`: keeps `R(t, ξ)` for `ξ ≤ INF(t)`, zeroes the rest.
pub fn inf_hard_threshold<T: Real>(tfr: &TfRepresentation<T>, inf_curve: &dyn Fn(T) -> T) -> MaskedTfr<T> {
    let inf_values: Vec<T> = tfr.time_axis().iter().map(|&t| inf_curve(t)).collect();
    let freqs = tfr.freq_axis();
    let masked = tfr.masked(|i, j| freqs[i] <= inf_values[j]);
    MaskedTfr {
        tfr: masked,
        inf_values,
    }
}

/// Stopband attenuation of one filter pass, dB. The forward-backward pass
/// doubles it and keeps the combined passband ripple below 0.01 dB.
const PASS_ATTENUATION_DB: f64 = 70.0;

/// Kaiser-windowed sinc, normalized to unit DC gain.
fn design_lowpass(cutoff_hz: f64, transition_hz: f64, rate: f64) -> Vec<f64> {
    let a = PASS_ATTENUATION_DB;
    let beta = 0.1102 * (a - 8.7);
    let width = 2.0 * PI * transition_hz / rate;
    let order = ((a - 7.95) / (2.285 * width)).ceil() as usize;
    let half = order.div_ceil(2);
    let fc = (cutoff_hz + transition_hz / 2.0) / rate;
    let i0_beta = bessel_i0(beta);
    let mut taps: Vec<f64> = (0..=2 * half)
        .map(|k| {
            let m = k as f64 - half as f64;
            let r = m / half as f64;
            let kaiser = bessel_i0(beta * (1.0 - r * r).max(0.0).sqrt()) / i0_beta;
            let ideal = if m == 0.0 {
                2.0 * fc
            } else {
                (2.0 * PI * fc * m).sin() / (PI * m)
            };
            ideal * kaiser
        })
        .collect();
    let sum: f64 = taps.iter().sum();
    taps.iter_mut().for_each(|t| *t /= sum);
    taps
}

/// Modified Bessel function of the first kind, order 0 (power series).
fn bessel_i0(x: f64) -> f64 {
    let q = x * x / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        term *= q / (k as f64 * k as f64);
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    sum
}

/// Centred ("same") convolution with symmetric taps.
fn convolve_centred(x: &[f64], taps: &[f64]) -> Vec<f64> {
    let half = taps.len() / 2;
    (0..x.len())
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half).min(x.len() - 1);
            (lo..=hi).map(|u| x[u] * taps[u + half - i]).sum()
        })
        .collect()
}

/// `lowpass_prefilter`: zero-phase (forward-backward) Kaiser windowed-sinc
/// low-pass with passband edge `cutoff_hz` and stopband edge
/// `cutoff_hz + transition_hz`. Ends are extended by odd reflection.
///
/// Non-band-limited IMT signals keep their reflected components under
/// prefiltering; they are perturbed, not removed.
pub fn lowpass_prefilter<T: Real>(sig: &UniformSignal<T>, cutoff_hz: T, transition_hz: T) -> Result<UniformSignal<T>> {
    let rate = sig.rate().to_f64_lossy();
    let (fc, tw) = (cutoff_hz.to_f64_lossy(), transition_hz.to_f64_lossy());
    if !(fc > 0.0 && tw > 0.0 && fc + tw < rate / 2.0) {
        return Err(Error::InvalidArgument(format!(
            "need 0 < cutoff, 0 < transition and cutoff + transition < {} Hz, got {fc} + {tw}",
            rate / 2.0
        )));
    }
    let taps = design_lowpass(fc, tw, rate);
    let x: Vec<f64> = sig.values().iter().map(|v| v.to_f64_lossy()).collect();
    let n = x.len();
    let pad = (3 * taps.len()).min(n - 1);

    let mut ext = Vec::with_capacity(n + 2 * pad);
    ext.extend((1..=pad).rev().map(|k| 2.0 * x[0] - x[k]));
    ext.extend_from_slice(&x);
    ext.extend((1..=pad).map(|k| 2.0 * x[n - 1] - x[n - 1 - k]));

    let once = convolve_centred(&ext, &taps);
    let twice = convolve_centred(&once, &taps);
    let values = twice[pad..pad + n].iter().map(|&v| T::lit(v)).collect();
    sig.with_values(values)
}
