//! Spline machinery: cardinal and non-uniform B-splines, the fundamental
//! cardinal spline spectrum, banded collocation solves and the interpolants
//! used to turn non-uniform samples into uniformly resampled signals.

mod banded;
mod bspline;
mod interp;
mod pchip;
mod spectrum;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use banded::{BandedLu, BandedMatrix};
pub use bspline::{cardinal_bspline, nonuniform_bspline};
pub use interp::{interpolate_nonuniform, SplineInterpolant, MAX_CONDITION};
pub use pchip::{interpolate_pchip, PchipInterpolant};
pub use spectrum::{fundamental_spline_spectrum, KernelSpectrum, DEFAULT_L_MAX};

use crate::error::{Error, Result};
use crate::sampling::SampleSet;
use crate::scalar::Real;
use crate::tf::UniformSignal;

/// Spline order used by the high-order mitigation.
pub const HIGH_ORDER: usize = 12;

/// Anything that can be evaluated on a closed domain without extrapolating.
pub trait Interpolant<T: Real>: Send + Sync {
    fn domain(&self) -> (T, T);
    fn eval(&self, x: T) -> Result<T>;
}

/// Interpolation family selectable from configs and pipelines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InterpolationScheme {
    Cubic,
    Pchip,
    OrderN(usize),
}

impl InterpolationScheme {
    /// Spline degree, `None` for PCHIP.
    pub fn order(&self) -> Option<usize> {
        match self {
            Self::Cubic => Some(3),
            Self::Pchip => None,
            Self::OrderN(n) => Some(*n),
        }
    }

    pub fn min_samples(&self) -> usize {
        match self.order() {
            Some(n) => n + 2,
            None => 3,
        }
    }

    pub fn build<T: Real>(&self, samples: &SampleSet<T>) -> Result<Box<dyn Interpolant<T>>> {
        Ok(match self.order() {
            Some(n) => Box::new(interpolate_nonuniform(samples, n)?),
            None => Box::new(interpolate_pchip(samples)?),
        })
    }
}

impl fmt::Display for InterpolationScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Cubic => f.write_str("cubic"),
            Self::Pchip => f.write_str("pchip"),
            Self::OrderN(n) => write!(f, "order_{n}"),
        }
    }
}

impl FromStr for InterpolationScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cubic" => Ok(Self::Cubic),
            "pchip" => Ok(Self::Pchip),
            other => other
                .strip_prefix("order_")
                .and_then(|n| n.parse::<usize>().ok())
                .filter(|&n| n >= 1)
                .map(Self::OrderN)
                .ok_or_else(|| Error::InvalidArgument(format!("unknown interpolation `{other}`"))),
        }
    }
}

/// `resample_uniform`: evaluates `interp` at `t_start + k/rate` for
/// `k = 0..=floor((t_end − t_start)·rate)`.
pub fn resample_uniform<T: Real>(
    interp: &dyn Interpolant<T>,
    rate: T,
    t_start: T,
    t_end: T,
) -> Result<UniformSignal<T>> {
    if !(rate > T::zero()) || !(t_end >= t_start) {
        return Err(Error::InvalidArgument(format!(
            "need rate > 0 and t_start <= t_end, got rate {rate}, [{t_start}, {t_end}]"
        )));
    }
    let (lo, hi) = interp.domain();
    if t_start < lo || t_end > hi {
        return Err(Error::OutOfDomain {
            x: if t_start < lo { t_start } else { t_end }.to_f64_lossy(),
            lo: lo.to_f64_lossy(),
            hi: hi.to_f64_lossy(),
        });
    }
    let steps = ((t_end - t_start) * rate + T::lit(1e-9))
        .floor()
        .to_usize()
        .unwrap_or(0);
    let values = (0..=steps)
        .map(|k| {
            let t = (t_start + T::from_usize_lossy(k) / rate).min(hi);
            interp.eval(t)
        })
        .collect::<Result<Vec<T>>>()?;
    UniformSignal::new(values, rate, t_start)
}
