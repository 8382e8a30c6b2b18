//! Simulation and analysis of the reflection effect: spline interpolation of
//! non-uniformly sampled oscillatory signals creates artificial components
//! that mirror the true instantaneous frequency about the instantaneous
//! Nyquist frequency.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the `*64`
//! aliases below fix the scalar to `f64`, which is what the pipelines and
//! the CLI use.

pub mod error;
pub mod mitigation;
pub mod physio;
pub mod reflection;
pub mod sampling;
pub mod scalar;
pub mod signal_model;
pub mod spline;
pub mod tf;

pub use error::{Error, Result};
pub use mitigation::{inf_hard_threshold, lowpass_prefilter, MaskedTfr};
pub use physio::{constant_curve, edr_signal, ihr_signal, parse_rpeaks, rri_series, synth_rpeaks, RPeakRecord};
pub use reflection::{
    above_inf_energy_ratio, epsilon_scaling_table, predict_components, ridge_above_inf, ridge_below_inf,
    synthesize_prediction, verify_reflection_theorem, PredictedComponent, Prediction, TheoremReport,
};
pub use sampling::{
    check_inr, check_isr_identifiability, estimate_isr, sample_signal, sampling_times, IsrEstimate, SampleSet,
    SamplingScheme, SchemeModel, SchemeParams,
};
pub use scalar::Real;
pub use signal_model::{
    builtin_scenario, evaluate_imt, validate_imt, AmplitudeModel, BuiltinScenario, ImtSignal, ModelParams, PhaseModel, Scenario,
    ScenarioSpec, SignalModel,
};
pub use spline::{
    cardinal_bspline, fundamental_spline_spectrum, interpolate_nonuniform, interpolate_pchip, nonuniform_bspline,
    resample_uniform, Interpolant, InterpolationScheme, KernelSpectrum, PchipInterpolant, SplineInterpolant,
};
pub use tf::{
    log_display, make_windows, multitaper, reassign, ridge_extract, stft, synchrosqueeze, AnalysisParams,
    DisplayMatrix, Ridge, TfMethod, TfRepresentation, UniformSignal, Window, WindowFamily,
};

pub type ImtSignal64 = ImtSignal<f64>;
pub type SamplingScheme64 = SamplingScheme<f64>;
pub type SampleSet64 = SampleSet<f64>;
pub type Scenario64 = Scenario<f64>;
pub type SplineInterpolant64 = SplineInterpolant<f64>;
pub type PchipInterpolant64 = PchipInterpolant<f64>;
pub type UniformSignal64 = UniformSignal<f64>;
pub type TfRepresentation64 = TfRepresentation<f64>;
pub type DisplayMatrix64 = DisplayMatrix<f64>;
pub type RPeakRecord64 = RPeakRecord<f64>;
pub type MaskedTfr64 = MaskedTfr<f64>;

pub type ImtSignal32 = ImtSignal<f32>;
pub type SamplingScheme32 = SamplingScheme<f32>;
pub type SampleSet32 = SampleSet<f32>;
pub type SplineInterpolant32 = SplineInterpolant<f32>;
pub type UniformSignal32 = UniformSignal<f32>;
pub type TfRepresentation32 = TfRepresentation<f32>;
