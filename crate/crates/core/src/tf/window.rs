use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest accepted taper count; higher Hermite functions leak past the
/// truncated support.
pub const MAX_TAPERS: usize = 10;
/// Shortest accepted window, in samples.
pub const MIN_WINDOW_SAMPLES: usize = 16;
/// Gaussian width relative to the window duration: `σ = duration / 5`.
const SIGMA_FRACTION: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WindowFamily {
    Gaussian,
    Hermite,
}

impl fmt::Display for WindowFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Gaussian => "gaussian",
            Self::Hermite => "hermite",
        })
    }
}

impl FromStr for WindowFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(Self::Gaussian),
            "hermite" => Ok(Self::Hermite),
            other => Err(Error::InvalidArgument(format!("unknown window family `{other}`"))),
        }
    }
}

/// A sampled analysis window of odd length `2M + 1`, centred on sample `M`,
/// together with its time derivative (per second) and its time-weighted copy
/// `u·w(u)` (seconds) needed by the reassignment operators.
#[derive(Debug, Clone, PartialEq)]
pub struct Window<T> {
    pub family: WindowFamily,
    pub rate: T,
    pub duration_s: T,
    pub taper: Vec<T>,
    pub derivative: Vec<T>,
    pub ramp: Vec<T>,
}

impl<T: Real> Window<T> {
    pub fn len(&self) -> usize {
        self.taper.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taper.is_empty()
    }

    /// Half length `M`.
    pub fn half(&self) -> usize {
        self.taper.len() / 2
    }
}

fn offsets<T: Real>(half: usize, rate: T) -> Vec<T> {
    (0..=2 * half)
        .map(|k| (T::from_usize_lossy(k) - T::from_usize_lossy(half)) / rate)
        .collect()
}

fn norm<T: Real>(v: &[T]) -> T {
    v.iter().map(|x| *x * *x).sum::<T>().sqrt()
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(x, y)| *x * *y).sum()
}

/// `make_windows`: one Gaussian window, or the first `tapers` Hermite functions.
///
/// Every taper has unit discrete L² norm. The Gaussian is
/// `exp(−π u²/σ²)` with `σ = duration/5`; the Hermite family uses the matching
/// scale so that its first member is that Gaussian, and is re-orthonormalized
/// after sampling (derivatives follow the same linear combination).
pub fn make_windows<T: Real>(
    family: WindowFamily,
    duration_s: T,
    rate: T,
    tapers: usize,
) -> Result<Vec<Window<T>>> {
    if !(rate > T::zero()) || !(duration_s > T::zero()) {
        return Err(Error::InvalidArgument("window duration and rate must be positive".into()));
    }
    let samples = (duration_s * rate).round().to_usize().unwrap_or(0);
    if samples < MIN_WINDOW_SAMPLES {
        return Err(Error::InvalidArgument(format!(
            "window spans {samples} samples, need at least {MIN_WINDOW_SAMPLES}"
        )));
    }
    if tapers == 0 || tapers > MAX_TAPERS {
        return Err(Error::InvalidArgument(format!(
            "taper count must be in 1..={MAX_TAPERS}, got {tapers}"
        )));
    }
    let half = samples / 2;
    let u = offsets(half, rate);
    let sigma = duration_s * T::lit(SIGMA_FRACTION);
    let pi = T::PI();

    match family {
        WindowFamily::Gaussian => {
            let taper: Vec<T> = u.iter().map(|&x| (-pi * x * x / (sigma * sigma)).exp()).collect();
            let derivative: Vec<T> = u
                .iter()
                .zip(&taper)
                .map(|(&x, &g)| -T::lit(2.0) * pi * x / (sigma * sigma) * g)
                .collect();
            let scale = T::one() / norm(&taper);
            Ok(vec![finish(family, rate, duration_s, &u, taper, derivative, scale)])
        }
        WindowFamily::Hermite => {
            // h_k(x) with x = u/s and exp(−x²/2) = exp(−π u²/σ²)
            let s = sigma / (T::lit(2.0) * pi).sqrt();
            let raw = hermite_functions(&u, s, tapers + 1);
            let raw_deriv: Vec<Vec<T>> = (0..tapers)
                .map(|k| {
                    let kf = T::from_usize_lossy(k);
                    let half_t = T::lit(0.5);
                    (0..u.len())
                        .map(|i| {
                            let down = if k > 0 { (kf * half_t).sqrt() * raw[k - 1][i] } else { T::zero() };
                            let up = ((kf + T::one()) * half_t).sqrt() * raw[k + 1][i];
                            (down - up) / s
                        })
                        .collect()
                })
                .collect();

            // modified Gram–Schmidt, tracking the combination coefficients
            let mut basis: Vec<Vec<T>> = Vec::with_capacity(tapers);
            let mut coefs: Vec<Vec<T>> = Vec::with_capacity(tapers);
            for k in 0..tapers {
                let mut v = raw[k].clone();
                let mut c = vec![T::zero(); tapers];
                c[k] = T::one();
                for (q, qc) in basis.iter().zip(&coefs) {
                    let proj = dot(&v, q);
                    for (vi, qi) in v.iter_mut().zip(q) {
                        *vi -= proj * *qi;
                    }
                    for (ci, qci) in c.iter_mut().zip(qc) {
                        *ci -= proj * *qci;
                    }
                }
                let nv = norm(&v);
                v.iter_mut().for_each(|x| *x /= nv);
                c.iter_mut().for_each(|x| *x /= nv);
                basis.push(v);
                coefs.push(c);
            }
            Ok(basis
                .into_iter()
                .zip(coefs)
                .map(|(taper, c)| {
                    let derivative: Vec<T> = (0..u.len())
                        .map(|i| c.iter().zip(&raw_deriv).map(|(ci, d)| *ci * d[i]).sum())
                        .collect();
                    finish(family, rate, duration_s, &u, taper, derivative, T::one())
                })
                .collect())
        }
    }
}

fn finish<T: Real>(
    family: WindowFamily,
    rate: T,
    duration_s: T,
    u: &[T],
    taper: Vec<T>,
    derivative: Vec<T>,
    scale: T,
) -> Window<T> {
    let taper: Vec<T> = taper.into_iter().map(|x| x * scale).collect();
    let derivative = derivative.into_iter().map(|x| x * scale).collect();
    let ramp = u.iter().zip(&taper).map(|(&x, &w)| x * w).collect();
    Window {
        family,
        rate,
        duration_s,
        taper,
        derivative,
        ramp,
    }
}

/// Orthonormal Hermite functions `h_0 … h_{count-1}` at `u/s`.
fn hermite_functions<T: Real>(u: &[T], s: T, count: usize) -> Vec<Vec<T>> {
    let mut out = vec![vec![T::zero(); u.len()]; count];
    let c0 = T::PI().powf(T::lit(-0.25));
    let two = T::lit(2.0);
    for (i, &ui) in u.iter().enumerate() {
        let x = ui / s;
        let mut prev = T::zero();
        let mut cur = c0 * (-x * x / two).exp();
        out[0][i] = cur;
        for k in 1..count {
            let kf = T::from_usize_lossy(k);
            let next = (two / kf).sqrt() * x * cur - ((kf - T::one()) / kf).sqrt() * prev;
            prev = cur;
            cur = next;
            out[k][i] = cur;
        }
    }
    out
}
