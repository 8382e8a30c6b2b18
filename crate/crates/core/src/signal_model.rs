//! Adaptive harmonic model: single intrinsic-mode-type (IMT) components
//! `a(t) cos(2π φ(t))`, class-membership checks and the built-in scenarios.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampling::{SamplingScheme, SchemeModel, SchemeParams};
use crate::scalar::Real;

/// Shared, thread-safe evaluable curve `t -> value`.
pub type Curve<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// Constants of the functional class: `c1 <= a, φ' <= c2`, slopes bounded by `eps·φ'`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams<T> {
    pub c1: T,
    pub c2: T,
    pub eps: T,
}

impl<T: Real> ModelParams<T> {
    pub fn new(c1: T, c2: T, eps: T) -> Self {
        Self { c1, c2, eps }
    }

    pub fn cast<U: Real>(&self) -> ModelParams<U> {
        ModelParams {
            c1: U::lit(self.c1.to_f64_lossy()),
            c2: U::lit(self.c2.to_f64_lossy()),
            eps: U::lit(self.eps.to_f64_lossy()),
        }
    }
}

/// One IMT component with amplitude, phase (cycles) and instantaneous frequency (Hz).
///
/// The IF is stored next to the phase instead of being differentiated from it.
#[derive(Clone)]
pub struct ImtSignal<T> {
    am: Curve<T>,
    phase: Curve<T>,
    iff: Curve<T>,
    params: ModelParams<T>,
}

impl<T: Real> ImtSignal<T> {
    pub fn new(am: Curve<T>, phase: Curve<T>, iff: Curve<T>, params: ModelParams<T>) -> Self {
        Self {
            am,
            phase,
            iff,
            params,
        }
    }

    /// Constant-amplitude harmonic `amplitude·cos(2π freq t)`.
    pub fn harmonic(amplitude: T, freq_hz: T) -> Self {
        let eps = T::lit(0.01);
        let lo = amplitude.min(freq_hz);
        let hi = amplitude.max(freq_hz);
        Self::new(
            Arc::new(move |_| amplitude),
            Arc::new(move |t| freq_hz * t),
            Arc::new(move |_| freq_hz),
            ModelParams::new(lo, hi, eps),
        )
    }

    pub fn am(&self, t: T) -> T {
        (self.am)(t)
    }

    pub fn phase(&self, t: T) -> T {
        (self.phase)(t)
    }

    pub fn iff(&self, t: T) -> T {
        (self.iff)(t)
    }

    pub fn params(&self) -> ModelParams<T> {
        self.params
    }

    pub fn with_params(mut self, params: ModelParams<T>) -> Self {
        self.params = params;
        self
    }

    /// Same phase and IF with the amplitude multiplied by `gain`.
    pub fn scaled(&self, gain: T) -> Self {
        let am = Arc::clone(&self.am);
        Self {
            am: Arc::new(move |t| gain * am(t)),
            ..self.clone()
        }
    }

    pub fn evaluate(&self, t: T) -> T {
        self.am(t) * (T::two_pi() * self.phase(t)).cos()
    }
}

impl<T: Real> fmt::Debug for ImtSignal<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ImtSignal")
            .field("params", &self.params)
            .finish_non_exhaustive()
    }
}

/// `evaluate_imt`: `a(t)·cos(2π φ(t))`.
pub fn evaluate_imt<T: Real>(signal: &ImtSignal<T>, t: T) -> T {
    signal.evaluate(t)
}

/// Which class inequality a grid point violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    AmplitudeRange,
    FrequencyRange,
    AmplitudeSlope,
    FrequencySlope,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub index: usize,
    pub t: f64,
    pub kind: ViolationKind,
    pub value: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn count(&self, kind: ViolationKind) -> usize {
        self.violations.iter().filter(|v| v.kind == kind).count()
    }
}

/// Central difference of `f` at `t` with step `h`, plus a tolerance of ten times
/// the estimated truncation error (third derivative by a five-point stencil)
/// and the rounding floor.
pub(crate) fn central_derivative<T: Real>(f: &dyn Fn(T) -> T, t: T, h: T) -> (T, T) {
    let two = T::lit(2.0);
    let fp1 = f(t + h);
    let fm1 = f(t - h);
    let fp2 = f(t + two * h);
    let fm2 = f(t - two * h);
    let d = (fp1 - fm1) / (two * h);
    let third = (fp2 - two * fp1 + two * fm1 - fm2) / (two * h * h * h);
    let truncation = h * h / T::lit(6.0) * third.abs();
    let scale = fp1.abs().max(fm1.abs()).max(fp2.abs()).max(fm2.abs());
    let rounding = T::lit(8.0) * T::epsilon() * scale / h;
    (d, T::lit(10.0) * (truncation + rounding))
}

/// Checks the four class inequalities on `grid` and lists every violation.
pub fn validate_imt<T: Real>(signal: &ImtSignal<T>, grid: &[T]) -> Result<ValidationReport> {
    if grid.len() < 3 {
        return Err(Error::TooFewPoints {
            needed: 3,
            got: grid.len(),
        });
    }
    let mut h = T::infinity();
    for (i, w) in grid.windows(2).enumerate() {
        if w[1] <= w[0] {
            return Err(Error::NotIncreasing { index: i + 1 });
        }
        h = h.min(w[1] - w[0]);
    }

    let ModelParams { c1, c2, eps } = signal.params;
    let slack = T::lit(1e-12);
    let am = |t: T| signal.am(t);
    let iff = |t: T| signal.iff(t);
    let mut report = ValidationReport::default();
    let mut push = |index: usize, t: T, kind, value: T, bound: T| {
        report.violations.push(Violation {
            index,
            t: t.to_f64_lossy(),
            kind,
            value: value.to_f64_lossy(),
            bound: bound.to_f64_lossy(),
        })
    };

    for (i, &t) in grid.iter().enumerate() {
        let a = am(t);
        let w = iff(t);
        let range_tol = slack * c2.abs().max(T::one());
        if a < c1 - range_tol {
            push(i, t, ViolationKind::AmplitudeRange, a, c1);
        } else if a > c2 + range_tol {
            push(i, t, ViolationKind::AmplitudeRange, a, c2);
        }
        if w < c1 - range_tol {
            push(i, t, ViolationKind::FrequencyRange, w, c1);
        } else if w > c2 + range_tol {
            push(i, t, ViolationKind::FrequencyRange, w, c2);
        }

        let (da, tol_a) = central_derivative(&am, t, h);
        if da.abs() > eps * w + tol_a {
            push(i, t, ViolationKind::AmplitudeSlope, da.abs(), eps * w);
        }
        let (dw, tol_w) = central_derivative(&iff, t, h);
        if dw.abs() > eps * w + tol_w {
            push(i, t, ViolationKind::FrequencySlope, dw.abs(), eps * w);
        }
    }
    Ok(report)
}

/// Amplitude `a(t) = offset + coeff·t^exponent` (with `t` clamped at 0).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AmplitudeModel {
    pub offset: f64,
    pub coeff: f64,
    pub exponent: f64,
}

impl Default for AmplitudeModel {
    fn default() -> Self {
        Self {
            offset: 1.0,
            coeff: 0.0,
            exponent: 1.0,
        }
    }
}

/// Phase `φ(t) = base_hz·t + fm_depth·cos(fm_omega·t)` in cycles, so that
/// `φ'(t) = base_hz − fm_depth·fm_omega·sin(fm_omega·t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhaseModel {
    pub base_hz: f64,
    pub fm_depth: f64,
    pub fm_omega: f64,
}

impl Default for PhaseModel {
    fn default() -> Self {
        Self {
            base_hz: 2.5,
            fm_depth: 0.0,
            fm_omega: 1.0,
        }
    }
}

/// Serializable closed-form description of an IMT component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SignalModel {
    pub amplitude: AmplitudeModel,
    pub phase: PhaseModel,
    pub params: ModelParams<f64>,
}

impl Default for SignalModel {
    fn default() -> Self {
        Self {
            amplitude: AmplitudeModel::default(),
            phase: PhaseModel::default(),
            params: ModelParams::new(1.0, 2.5, 0.01),
        }
    }
}

impl SignalModel {
    pub fn build<T: Real>(&self) -> ImtSignal<T> {
        let (a0, a1, ap) = (
            T::lit(self.amplitude.offset),
            T::lit(self.amplitude.coeff),
            T::lit(self.amplitude.exponent),
        );
        let (f0, depth, omega) = (
            T::lit(self.phase.base_hz),
            T::lit(self.phase.fm_depth),
            T::lit(self.phase.fm_omega),
        );
        let am: Curve<T> = if self.amplitude.coeff == 0.0 {
            Arc::new(move |_| a0)
        } else {
            Arc::new(move |t: T| a0 + a1 * t.max(T::zero()).powf(ap))
        };
        ImtSignal::new(
            am,
            Arc::new(move |t: T| f0 * t + depth * (omega * t).cos()),
            Arc::new(move |t: T| f0 - depth * omega * (omega * t).sin()),
            self.params.cast(),
        )
    }
}

/// A complete simulation setup: signal, sampling scheme, span and resampling rate.
#[derive(Clone, Debug)]
pub struct Scenario<T: Real> {
    pub signal: ImtSignal<T>,
    pub scheme: SamplingScheme<T>,
    pub duration_s: T,
    pub resample_hz: T,
}

/// Serializable scenario, the form stored in run configurations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub signal: SignalModel,
    pub scheme: SchemeModel,
    pub duration_s: f64,
    pub resample_hz: f64,
}

impl ScenarioSpec {
    pub fn build<T: Real>(&self) -> Result<Scenario<T>> {
        if !(self.duration_s > 0.0) || !(self.resample_hz > 0.0) {
            return Err(Error::InvalidArgument(
                "duration_s and resample_hz must be positive".into(),
            ));
        }
        Ok(Scenario {
            signal: self.signal.build(),
            scheme: self.scheme.build(),
            duration_s: T::lit(self.duration_s),
            resample_hz: T::lit(self.resample_hz),
        })
    }
}

/// The two simulated setups: a pure 2.5 Hz tone under a parabolic ISR, and a
/// chirping, growing component under a cosine-modulated ISR.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BuiltinScenario {
    Fig1,
    Fig2,
}

impl FromStr for BuiltinScenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig1" => Ok(Self::Fig1),
            "fig2" => Ok(Self::Fig2),
            other => Err(Error::UnknownScenario(other.to_string())),
        }
    }
}

impl fmt::Display for BuiltinScenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Fig1 => "fig1",
            Self::Fig2 => "fig2",
        })
    }
}

impl BuiltinScenario {
    pub fn spec(self) -> ScenarioSpec {
        match self {
            // f(t) = cos(2π·2.5t), ψ'(t) = 6 + (t − 80/π)²/800
            Self::Fig1 => ScenarioSpec {
                signal: SignalModel {
                    amplitude: AmplitudeModel {
                        offset: 1.0,
                        coeff: 0.0,
                        exponent: 1.0,
                    },
                    phase: PhaseModel {
                        base_hz: 2.5,
                        fm_depth: 0.0,
                        fm_omega: 1.0,
                    },
                    params: ModelParams::new(1.0, 2.5, 0.01),
                },
                scheme: SchemeModel {
                    rate_hz: 6.0,
                    cos_amp: 0.0,
                    cos_omega: 1.0,
                    quad_coeff: 1.0 / 800.0,
                    quad_center: 80.0 / std::f64::consts::PI,
                    params: SchemeParams::new(6.0, 0.025),
                },
                duration_s: 80.0,
                resample_hz: 64.0,
            },
            // f(t) = (0.7 + t^1.1)·cos(2π(πt + 0.2 cos t)), ψ'(t) = 8 + 0.5 cos(πt/10)
            Self::Fig2 => ScenarioSpec {
                signal: SignalModel {
                    amplitude: AmplitudeModel {
                        offset: 0.7,
                        coeff: 1.0,
                        exponent: 1.1,
                    },
                    phase: PhaseModel {
                        base_hz: std::f64::consts::PI,
                        fm_depth: 0.2,
                        fm_omega: 1.0,
                    },
                    params: ModelParams::new(0.5, 130.0, 0.6),
                },
                scheme: SchemeModel {
                    rate_hz: 8.0,
                    cos_amp: 0.5,
                    cos_omega: std::f64::consts::PI / 10.0,
                    quad_coeff: 0.0,
                    quad_center: 0.0,
                    params: SchemeParams::new(7.5, 0.25),
                },
                duration_s: 80.0,
                resample_hz: 64.0,
            },
        }
    }
}

/// `builtin_scenario`: looks a scenario up by name (`fig1` or `fig2`).
pub fn builtin_scenario<T: Real>(name: &str) -> Result<Scenario<T>> {
    name.parse::<BuiltinScenario>()?.spec().build()
}
