//! Reference implementations used as test oracles. Each one is written from
//! the defining formula, independently of the library code paths.

#![allow(dead_code)]

use std::f64::consts::PI;

use nyqmirror::{sample_signal, InterpolationScheme, Scenario, UniformSignal};

/// `N_{n,j}(x)` from the truncated-power divided-difference formula
/// `(t_{j+n+1} − t_j) Σ_k (t_k − x)₊ⁿ / Π_{l≠k} (t_k − t_l)` (distinct knots).
pub fn truncated_power_bspline(n: usize, j: usize, knots: &[f64], x: f64) -> f64 {
    let t = &knots[j..=j + n + 1];
    let mut sum = 0.0;
    for (k, &tk) in t.iter().enumerate() {
        let plus = (tk - x).max(0.0).powi(n as i32);
        if plus == 0.0 {
            continue;
        }
        let denom: f64 = t
            .iter()
            .enumerate()
            .filter(|(l, _)| *l != k)
            .map(|(_, &tl)| tk - tl)
            .product();
        sum += plus / denom;
    }
    (t[n + 1] - t[0]) * sum
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

/// Direct truncated sum `sinc(ξ)^{n+1} / Σ_{|l|≤l_max} sinc(ξ − l)^{n+1}`.
pub fn naive_spectrum(n: usize, xi: f64, l_max: i64) -> f64 {
    let p = (n + 1) as i32;
    let den: f64 = (-l_max..=l_max).map(|l| sinc(xi - l as f64).powi(p)).sum();
    sinc(xi).powi(p) / den
}

/// `|Σ x_k e^{−2πi f k / rate}| · 2 / len`: amplitude of a real tone at `f`.
pub fn dft_amplitude(x: &[f64], rate: f64, f: f64) -> f64 {
    let (mut re, mut im) = (0.0, 0.0);
    for (k, v) in x.iter().enumerate() {
        let ph = -2.0 * PI * f * k as f64 / rate;
        re += v * ph.cos();
        im += v * ph.sin();
    }
    2.0 * (re * re + im * im).sqrt() / x.len() as f64
}

/// Windowed-frame DFT magnitude with the window centred on sample `centre`
/// (zero outside the signal), at frequency `f`.
pub fn frame_dft(x: &[f64], window: &[f64], centre: usize, rate: f64, f: f64) -> f64 {
    let half = window.len() as i64 / 2;
    let (mut re, mut im) = (0.0, 0.0);
    for (w_idx, w) in window.iter().enumerate() {
        let off = w_idx as i64 - half;
        let u = centre as i64 + off;
        if u < 0 || u >= x.len() as i64 {
            continue;
        }
        let ph = -2.0 * PI * f * off as f64 / rate;
        re += x[u as usize] * w * ph.cos();
        im += x[u as usize] * w * ph.sin();
    }
    (re * re + im * im).sqrt()
}

/// Linear-interpolated quantile at position `p·(n−1)` of the sorted values.
pub fn quantile_oracle(values: &[f64], p: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = p * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    v[lo] + (pos - lo as f64) * (v[hi] - v[lo])
}

/// Linear chirp `cos(2π(f0 t + k t²/2))` and its IF `f0 + k t`.
pub fn chirp(f0: f64, f1: f64, secs: f64, rate: f64) -> (UniformSignal<f64>, impl Fn(f64) -> f64) {
    let k = (f1 - f0) / secs;
    let n = (secs * rate) as usize + 1;
    let v = (0..n)
        .map(|i| {
            let t = i as f64 / rate;
            (2.0 * PI * (f0 * t + 0.5 * k * t * t)).cos()
        })
        .collect();
    (UniformSignal::new(v, rate, 0.0).unwrap(), move |t: f64| f0 + k * t)
}

pub fn tone(f: f64, rate: f64, secs: f64) -> UniformSignal<f64> {
    let n = (secs * rate) as usize + 1;
    let v = (0..n).map(|i| (2.0 * PI * f * i as f64 / rate).cos()).collect();
    UniformSignal::new(v, rate, 0.0).unwrap()
}

/// sample → interpolate → resample over the sample span.
pub fn pipeline(sc: &Scenario<f64>, scheme: InterpolationScheme) -> UniformSignal<f64> {
    let s = sample_signal(&sc.signal, &sc.scheme, 0.0, sc.duration_s).unwrap();
    let interp = scheme.build(&s).unwrap();
    let (lo, hi) = interp.domain();
    nyqmirror::resample_uniform(interp.as_ref(), sc.resample_hz, lo, hi).unwrap()
}

/// Mean of `|freq − truth(t)| / bin_width` over frames with `t ∈ [lo, hi]`.
pub fn mean_bin_deviation(
    freqs: &[f64],
    times: &[f64],
    bin_width: f64,
    truth: &dyn Fn(f64) -> f64,
    lo: f64,
    hi: f64,
) -> f64 {
    let devs: Vec<f64> = freqs
        .iter()
        .zip(times)
        .filter(|(_, t)| **t >= lo && **t <= hi)
        .map(|(f, t)| (f - truth(*t)).abs() / bin_width)
        .collect();
    devs.iter().sum::<f64>() / devs.len() as f64
}

/// Sorted random breakpoints with gaps in `[min_gap, min_gap + spread)`.
pub fn random_times(rng: &mut impl rand::Rng, count: usize, min_gap: f64, spread: f64) -> Vec<f64> {
    let mut t = rng.gen_range(-1.0..1.0);
    (0..count)
        .map(|_| {
            t += min_gap + rng.gen_range(0.0..spread);
            t
        })
        .collect()
}
