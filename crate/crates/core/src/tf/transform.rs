//! Sliding-window transforms.
//!
//! Column `j` is centred on sample `τ_j = j·hop` and holds
//! `V(τ, ξ_k) = Σ_u x(u) g(u − τ) e^{−2πi ξ_k (u − τ)/rate}` for the one-sided
//! bins `ξ_k = k·rate/nfft`. Placing the window centre at FFT index 0 (negative
//! offsets wrap around) yields exactly this phase reference, which is what the
//! reassignment operators below assume.
//!
//! Frames are computed independently (in parallel); every reduction runs in a
//! fixed serial order so results do not depend on the thread count.

use std::sync::Arc;

use num_complex::Complex;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::window::{make_windows, Window, WindowFamily};
use super::{TfMatrix, TfMethod, TfRepresentation, UniformSignal, WindowMeta};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Analysis settings with the defaults used for the figure scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisParams {
    pub window_s: f64,
    /// Hop in samples; `None` gives 8 frames per second.
    pub hop: Option<usize>,
    /// FFT length; `None` gives the next power of two ≥ 16 window lengths.
    pub nfft: Option<usize>,
    pub tapers: usize,
    pub threshold: f64,
}

impl Default for AnalysisParams {
    fn default() -> Self {
        Self {
            window_s: 10.0,
            hop: None,
            nfft: None,
            tapers: 3,
            threshold: 1e-8,
        }
    }
}

/// Next power of two at least 16 times the window length.
pub fn default_nfft(window_len: usize) -> usize {
    (16 * window_len).next_power_of_two()
}

impl AnalysisParams {
    pub fn hop_for(&self, rate: f64) -> usize {
        self.hop.unwrap_or_else(|| ((rate / 8.0).round() as usize).max(1))
    }

    /// Runs `method` on `sig` with these settings.
    pub fn run<T: Real>(&self, sig: &UniformSignal<T>, method: TfMethod) -> Result<TfRepresentation<T>> {
        let rate = sig.rate();
        let hop = self.hop_for(rate.to_f64_lossy());
        let (family, count) = if method.is_multitaper() {
            (WindowFamily::Hermite, self.tapers)
        } else {
            (WindowFamily::Gaussian, 1)
        };
        let windows = make_windows(family, T::lit(self.window_s), rate, count)?;
        let nfft = self.nfft.unwrap_or_else(|| default_nfft(windows[0].len()));
        let threshold = T::lit(self.threshold);
        match method {
            TfMethod::Stft => stft(sig, &windows[0], hop, nfft),
            TfMethod::Sst => synchrosqueeze(sig, &windows[0], hop, nfft, threshold),
            TfMethod::Rm => reassign(sig, &windows[0], hop, nfft, threshold),
            TfMethod::MtSst => multitaper(sig, &windows, hop, nfft, TfMethod::Sst, threshold),
            TfMethod::MtRm => multitaper(sig, &windows, hop, nfft, TfMethod::Rm, threshold),
        }
    }
}

struct Grid<T> {
    hop: usize,
    nfft: usize,
    bins: usize,
    frames: usize,
    freq_axis: Vec<T>,
    time_axis: Vec<T>,
}

fn grid<T: Real>(sig: &UniformSignal<T>, window: &Window<T>, hop: usize, nfft: usize) -> Result<Grid<T>> {
    if hop == 0 {
        return Err(Error::InvalidArgument("hop must be at least 1".into()));
    }
    if nfft < window.len() {
        return Err(Error::InvalidArgument(format!(
            "nfft {nfft} is shorter than the window ({})",
            window.len()
        )));
    }
    if sig.len() < window.len() {
        return Err(Error::SignalTooShort {
            len: sig.len(),
            window: window.len(),
        });
    }
    let rate = sig.rate();
    let bins = nfft / 2 + 1;
    let frames = (sig.len() - 1) / hop + 1;
    let df = rate / T::from_usize_lossy(nfft);
    let freq_axis = (0..bins).map(|k| T::from_usize_lossy(k) * df).collect();
    let time_axis = (0..frames).map(|j| sig.time(j * hop)).collect();
    Ok(Grid {
        hop,
        nfft,
        bins,
        frames,
        freq_axis,
        time_axis,
    })
}

fn meta<T: Real>(window: &Window<T>, hop: usize, nfft: usize, tapers: usize, threshold: T) -> WindowMeta {
    WindowMeta {
        family: window.family,
        duration_s: window.duration_s.to_f64_lossy(),
        hop,
        nfft,
        tapers,
        threshold: threshold.to_f64_lossy(),
    }
}

/// Which auxiliary transforms a frame needs.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Need {
    Plain,
    Frequency,
    TimeFrequency,
}

struct Frame<T> {
    v: Vec<Complex<T>>,
    dv: Vec<Complex<T>>,
    tv: Vec<Complex<T>>,
}

struct Engine<'a, T: Real> {
    sig: &'a [T],
    window: &'a Window<T>,
    fft: Arc<dyn Fft<T>>,
    nfft: usize,
    bins: usize,
}

impl<T: Real> Engine<'_, T> {
    fn transform(&self, centre: usize, taper: &[T], buf: &mut [Complex<T>], scratch: &mut [Complex<T>]) -> Vec<Complex<T>> {
        buf.iter_mut().for_each(|c| *c = Complex::new(T::zero(), T::zero()));
        let half = self.window.half() as isize;
        let n = self.sig.len() as isize;
        let nfft = self.nfft as isize;
        for (m, &w) in taper.iter().enumerate() {
            let offset = m as isize - half;
            let u = centre as isize + offset;
            if u >= 0 && u < n {
                buf[offset.rem_euclid(nfft) as usize] = Complex::new(self.sig[u as usize] * w, T::zero());
            }
        }
        self.fft.process_with_scratch(buf, scratch);
        buf[..self.bins].to_vec()
    }

    fn frame(&self, centre: usize, need: Need) -> Frame<T> {
        let zero = Complex::new(T::zero(), T::zero());
        let mut buf = vec![zero; self.nfft];
        let mut scratch = vec![zero; self.fft.get_inplace_scratch_len()];
        let v = self.transform(centre, &self.window.taper, &mut buf, &mut scratch);
        let dv = if need != Need::Plain {
            self.transform(centre, &self.window.derivative, &mut buf, &mut scratch)
        } else {
            Vec::new()
        };
        let tv = if need == Need::TimeFrequency {
            self.transform(centre, &self.window.ramp, &mut buf, &mut scratch)
        } else {
            Vec::new()
        };
        Frame { v, dv, tv }
    }
}

fn compute_frames<T: Real>(sig: &UniformSignal<T>, window: &Window<T>, g: &Grid<T>, need: Need) -> Vec<Frame<T>> {
    let fft = FftPlanner::new().plan_fft_forward(g.nfft);
    let engine = Engine {
        sig: sig.values(),
        window,
        fft,
        nfft: g.nfft,
        bins: g.bins,
    };
    (0..g.frames)
        .into_par_iter()
        .map(|j| engine.frame(j * g.hop, need))
        .collect()
}

/// Column-major frames to the row-major (bin, frame) layout.
fn to_row_major<C: Copy + Send + Sync>(columns: &[Vec<C>], bins: usize) -> Vec<C> {
    let frames = columns.len();
    let mut out = Vec::with_capacity(bins * frames);
    for k in 0..bins {
        for col in columns {
            out.push(col[k]);
        }
    }
    out
}

fn max_norm<T: Real>(frames: &[Frame<T>]) -> T {
    frames
        .iter()
        .flat_map(|f| f.v.iter())
        .fold(T::zero(), |m, c| m.max(c.norm()))
}

/// Nearest bin to the frequency estimate `ξ − Im[V_{g′}/V_g]/(2π)`, clipped.
fn frequency_bin<T: Real>(k: usize, v: Complex<T>, dv: Complex<T>, bin_scale: T, bins: usize) -> usize {
    let xi = T::from_usize_lossy(k) / bin_scale;
    let omega = xi - (dv / v).im / T::two_pi();
    clip_index(omega * bin_scale, bins, k)
}

fn clip_index<T: Real>(pos: T, len: usize, fallback: usize) -> usize {
    if pos.is_nan() {
        return fallback;
    }
    let r = pos.round();
    if r <= T::zero() {
        0
    } else if r >= T::from_usize_lossy(len - 1) {
        len - 1
    } else {
        r.to_usize().unwrap_or(fallback)
    }
}

/// `stft`: complex sliding-window transform.
pub fn stft<T: Real>(sig: &UniformSignal<T>, window: &Window<T>, hop: usize, nfft: usize) -> Result<TfRepresentation<T>> {
    let g = grid(sig, window, hop, nfft)?;
    let frames = compute_frames(sig, window, &g, Need::Plain);
    let columns: Vec<Vec<Complex<T>>> = frames.into_iter().map(|f| f.v).collect();
    TfRepresentation::new(
        TfMatrix::Complex(to_row_major(&columns, g.bins)),
        g.freq_axis,
        g.time_axis,
        TfMethod::Stft,
        meta(window, hop, nfft, 1, T::zero()),
    )
}

fn sst_columns<T: Real>(
    sig: &UniformSignal<T>,
    window: &Window<T>,
    g: &Grid<T>,
    threshold: T,
) -> Vec<Vec<Complex<T>>> {
    let frames = compute_frames(sig, window, g, Need::Frequency);
    let floor = threshold * max_norm(&frames);
    let bin_scale = T::from_usize_lossy(g.nfft) / sig.rate();
    let bins = g.bins;
    frames
        .par_iter()
        .map(|f| {
            let mut col = vec![Complex::new(T::zero(), T::zero()); bins];
            for k in 0..bins {
                let v = f.v[k];
                if v.norm() > floor {
                    col[frequency_bin(k, v, f.dv[k], bin_scale, bins)] += v;
                }
            }
            col
        })
        .collect()
}

/// `synchrosqueeze`: STFT coefficients moved along frequency to the bin
/// nearest their instantaneous-frequency estimate. Coefficients with
/// `|V| ≤ threshold·max|V|` are dropped.
pub fn synchrosqueeze<T: Real>(
    sig: &UniformSignal<T>,
    window: &Window<T>,
    hop: usize,
    nfft: usize,
    threshold: T,
) -> Result<TfRepresentation<T>> {
    check_threshold(threshold)?;
    let g = grid(sig, window, hop, nfft)?;
    let columns = sst_columns(sig, window, &g, threshold);
    TfRepresentation::new(
        TfMatrix::Complex(to_row_major(&columns, g.bins)),
        g.freq_axis,
        g.time_axis,
        TfMethod::Sst,
        meta(window, hop, nfft, 1, threshold),
    )
}

fn rm_matrix<T: Real>(sig: &UniformSignal<T>, window: &Window<T>, g: &Grid<T>, threshold: T) -> Vec<T> {
    let frames = compute_frames(sig, window, g, Need::TimeFrequency);
    let floor = threshold * max_norm(&frames);
    let rate = sig.rate();
    let bin_scale = T::from_usize_lossy(g.nfft) / rate;
    let frame_scale = rate / T::from_usize_lossy(g.hop);
    let bins = g.bins;
    let t0 = sig.t_start();

    // targets are computed in parallel, mass is accumulated serially
    let targets: Vec<Vec<(usize, usize, T)>> = frames
        .par_iter()
        .enumerate()
        .map(|(j, f)| {
            let tau = g.time_axis[j];
            (0..bins)
                .filter_map(|k| {
                    let v = f.v[k];
                    if !(v.norm() > floor) {
                        return None;
                    }
                    let kk = frequency_bin(k, v, f.dv[k], bin_scale, bins);
                    let t_hat = tau + (f.tv[k] / v).re;
                    let jj = clip_index((t_hat - t0) * frame_scale, g.frames, j);
                    Some((kk, jj, v.norm_sqr()))
                })
                .collect()
        })
        .collect();

    let mut out = vec![T::zero(); bins * g.frames];
    for column in targets {
        for (k, j, mass) in column {
            out[k * g.frames + j] += mass;
        }
    }
    out
}

/// `reassign`: squared magnitudes moved to the time and frequency estimates.
pub fn reassign<T: Real>(
    sig: &UniformSignal<T>,
    window: &Window<T>,
    hop: usize,
    nfft: usize,
    threshold: T,
) -> Result<TfRepresentation<T>> {
    check_threshold(threshold)?;
    let g = grid(sig, window, hop, nfft)?;
    let matrix = rm_matrix(sig, window, &g, threshold);
    TfRepresentation::new(
        TfMatrix::Real(matrix),
        g.freq_axis,
        g.time_axis,
        TfMethod::Rm,
        meta(window, hop, nfft, 1, threshold),
    )
}

/// `multitaper`: mean over tapers of `|SST|` or of the RM mass.
pub fn multitaper<T: Real>(
    sig: &UniformSignal<T>,
    windows: &[Window<T>],
    hop: usize,
    nfft: usize,
    method: TfMethod,
    threshold: T,
) -> Result<TfRepresentation<T>> {
    if windows.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "multitaper needs at least 2 tapers, got {}",
            windows.len()
        )));
    }
    check_threshold(threshold)?;
    let g = grid(sig, &windows[0], hop, nfft)?;
    let mut acc = vec![T::zero(); g.bins * g.frames];
    let out_method = match method {
        TfMethod::Sst | TfMethod::MtSst => {
            for w in windows {
                let columns = sst_columns(sig, w, &g, threshold);
                for (j, col) in columns.iter().enumerate() {
                    for (k, c) in col.iter().enumerate() {
                        acc[k * g.frames + j] += c.norm();
                    }
                }
            }
            TfMethod::MtSst
        }
        TfMethod::Rm | TfMethod::MtRm => {
            for w in windows {
                for (a, m) in acc.iter_mut().zip(rm_matrix(sig, w, &g, threshold)) {
                    *a += m;
                }
            }
            TfMethod::MtRm
        }
        TfMethod::Stft => {
            return Err(Error::InvalidArgument("multitaper supports sst and rm only".into()));
        }
    };
    let count = T::from_usize_lossy(windows.len());
    acc.iter_mut().for_each(|a| *a /= count);
    TfRepresentation::new(
        TfMatrix::Real(acc),
        g.freq_axis,
        g.time_axis,
        out_method,
        meta(&windows[0], hop, nfft, windows.len(), threshold),
    )
}

fn check_threshold<T: Real>(threshold: T) -> Result<()> {
    if threshold >= T::zero() && threshold.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("threshold must be finite and >= 0, got {threshold}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tone(freq: f64, rate: f64, secs: f64) -> UniformSignal<f64> {
        let n = (secs * rate) as usize + 1;
        let v = (0..n).map(|k| (std::f64::consts::TAU * freq * k as f64 / rate).cos()).collect();
        UniformSignal::new(v, rate, 0.0).unwrap()
    }

    fn gauss(secs: f64, rate: f64) -> Window<f64> {
        make_windows(WindowFamily::Gaussian, secs, rate, 1).unwrap().remove(0)
    }

    fn interior(r: &TfRepresentation<f64>, margin_s: f64) -> Vec<usize> {
        let t = r.time_axis();
        let (lo, hi) = (t[0] + margin_s, t[t.len() - 1] - margin_s);
        (0..r.frames()).filter(|&j| t[j] >= lo && t[j] <= hi).collect()
    }

    #[test]
    fn stft_localizes_a_tone() {
        let s = tone(2.5, 64.0, 20.0);
        let w = gauss(4.0, 64.0);
        let r = stft(&s, &w, 16, 1024).unwrap();
        let tone_bin = (2.5 / r.bin_width()).round() as usize;
        for j in interior(&r, 2.0) {
            let best = (0..r.freq_bins())
                .max_by(|&a, &b| r.magnitude(a, j).total_cmp(&r.magnitude(b, j)))
                .unwrap();
            assert!(best.abs_diff(tone_bin) <= 1);
        }
    }

    #[test]
    fn zero_in_zero_out() {
        let s = UniformSignal::new(vec![0.0; 400], 16.0, 0.0).unwrap();
        let w = gauss(4.0, 16.0);
        for r in [
            stft(&s, &w, 4, 128).unwrap(),
            synchrosqueeze(&s, &w, 4, 128, 0.0).unwrap(),
            reassign(&s, &w, 4, 128, 0.0).unwrap(),
        ] {
            assert!(r.magnitudes().iter().all(|m| *m == 0.0));
        }
    }

    #[test]
    fn sst_preserves_column_sums() {
        let s = tone(1.3, 16.0, 30.0);
        let w = gauss(4.0, 16.0);
        let v = stft(&s, &w, 4, 256).unwrap();
        let q = synchrosqueeze(&s, &w, 4, 256, 0.0).unwrap();
        let (TfMatrix::Complex(a), TfMatrix::Complex(b)) = (v.matrix(), q.matrix()) else {
            panic!("complex expected");
        };
        for j in 0..v.frames() {
            let sa: Complex<f64> = (0..v.freq_bins()).map(|k| a[k * v.frames() + j]).sum();
            let sb: Complex<f64> = (0..v.freq_bins()).map(|k| b[k * v.frames() + j]).sum();
            assert!((sa - sb).norm() <= 1e-6 * sa.norm().max(1e-300));
        }
    }

    #[test]
    fn rm_preserves_mass_and_localizes_impulse() {
        let rate = 16.0;
        let mut v = vec![0.0; 481];
        v[240] = 1.0;
        let s = UniformSignal::new(v, rate, 0.0).unwrap();
        let w = gauss(4.0, rate);
        let plain = stft(&s, &w, 4, 128).unwrap();
        let r = reassign(&s, &w, 4, 128, 0.0).unwrap();
        let total: f64 = plain.magnitudes().iter().map(|m| m * m).sum();
        let moved: f64 = r.magnitudes().iter().sum();
        assert!((total - moved).abs() <= 1e-6 * total);
        let target = 240 / 4;
        let near: f64 = (0..r.freq_bins())
            .flat_map(|k| (target - 2..=target + 2).map(move |j| (k, j)))
            .map(|(k, j)| r.magnitude(k, j))
            .sum();
        assert!(near >= 0.95 * moved, "{near} / {moved}");
    }

    #[test]
    fn multitaper_requires_two() {
        let s = tone(1.0, 16.0, 20.0);
        let ws = make_windows(WindowFamily::Hermite, 4.0, 16.0, 1).unwrap();
        assert!(multitaper(&s, &ws, 4, 128, TfMethod::Sst, 0.0).is_err());
    }

    #[test]
    fn rejects_bad_geometry() {
        let s = tone(1.0, 16.0, 2.0);
        let w = gauss(4.0, 16.0);
        assert!(matches!(stft(&s, &w, 4, 128), Err(Error::SignalTooShort { .. })));
        let s = tone(1.0, 16.0, 20.0);
        assert!(stft(&s, &w, 0, 128).is_err());
        assert!(stft(&s, &w, 4, 32).is_err());
    }

    #[test]
    fn default_geometry() {
        let p = AnalysisParams::default();
        assert_eq!(p.hop_for(64.0), 8);
        assert_eq!(default_nfft(641), 16384);
        assert_eq!(default_nfft(81), 2048);
    }
}
