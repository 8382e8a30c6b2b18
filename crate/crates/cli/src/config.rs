//! Run configuration: a JSON document in which every field is optional.

use std::path::PathBuf;

use nyqmirror::tf::TfMethod;
use nyqmirror::{AnalysisParams, BuiltinScenario, InterpolationScheme, ScenarioSpec};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// `fig1`, `fig2` or `custom`.
    pub scenario: String,
    /// Scenario used when `scenario` is `custom`.
    pub custom: Option<ScenarioSpec>,
    pub interpolation: InterpolationConfig,
    pub analysis: AnalysisConfig,
    pub ridge: RidgeConfig,
    pub predict: PredictConfig,
    pub input: InputConfig,
    pub physio: PhysioConfig,
    pub mitigation: MitigationConfig,
    pub output: OutputConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            scenario: "fig1".into(),
            custom: None,
            interpolation: InterpolationConfig::default(),
            analysis: AnalysisConfig::default(),
            ridge: RidgeConfig::default(),
            predict: PredictConfig::default(),
            input: InputConfig::default(),
            physio: PhysioConfig::default(),
            mitigation: MitigationConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeName {
    Cubic,
    Pchip,
    OrderN,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InterpolationConfig {
    pub scheme: SchemeName,
    /// Spline degree for `order_n`.
    pub order: usize,
}

impl Default for InterpolationConfig {
    fn default() -> Self {
        Self {
            scheme: SchemeName::Cubic,
            order: nyqmirror::spline::HIGH_ORDER,
        }
    }
}

impl InterpolationConfig {
    pub fn scheme(&self) -> Result<InterpolationScheme, CliError> {
        match self.scheme {
            SchemeName::Cubic => Ok(InterpolationScheme::Cubic),
            SchemeName::Pchip => Ok(InterpolationScheme::Pchip),
            SchemeName::OrderN if self.order >= 1 => Ok(InterpolationScheme::OrderN(self.order)),
            SchemeName::OrderN => Err(CliError::Config("interpolation.order must be at least 1".into())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisConfig {
    pub method: TfMethod,
    pub window_s: f64,
    pub hop: Option<usize>,
    pub nfft: Option<usize>,
    pub tapers: usize,
    pub threshold: f64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        let p = AnalysisParams::default();
        Self {
            method: TfMethod::Sst,
            window_s: p.window_s,
            hop: p.hop,
            nfft: p.nfft,
            tapers: p.tapers,
            threshold: p.threshold,
        }
    }
}

impl AnalysisConfig {
    pub fn params(&self) -> AnalysisParams {
        AnalysisParams {
            window_s: self.window_s,
            hop: self.hop,
            nfft: self.nfft,
            tapers: self.tapers,
            threshold: self.threshold,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RidgeConfig {
    /// Search band; `freq_max` defaults to the Nyquist frequency of the signal.
    pub freq_min: f64,
    pub freq_max: Option<f64>,
    /// Penalty per bin of frame-to-frame jump, relative to the band maximum.
    pub penalty: f64,
}

impl Default for RidgeConfig {
    fn default() -> Self {
        Self {
            freq_min: 0.0,
            freq_max: None,
            penalty: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PredictConfig {
    /// Components `k = −k_max..=k_max`.
    pub k_max: usize,
    /// Sampling rate of the exported curves, Hz.
    pub grid_hz: f64,
    /// Terms kept when checking the series against the pipeline.
    pub verify_k_max: usize,
}

impl Default for PredictConfig {
    fn default() -> Self {
        Self {
            k_max: 3,
            grid_hz: 4.0,
            verify_k_max: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct InputConfig {
    /// Uniform signal CSV (`time_s,value`) analysed by `tfr` instead of a scenario.
    pub signal_csv: Option<PathBuf>,
    /// Sample-time CSV (first column `time_s`) used to estimate the INF of `signal_csv`.
    pub samples_csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhysioSignal {
    Ihr,
    Edr,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhysioConfig {
    /// R-peak CSV; the synthetic train is used when absent.
    pub rpeaks_csv: Option<PathBuf>,
    pub synth: SynthConfig,
    pub rate_hz: f64,
    /// Signal sent to time-frequency analysis; EDR needs amplitudes.
    pub analyze: PhysioSignal,
}

impl Default for PhysioConfig {
    fn default() -> Self {
        Self {
            rpeaks_csv: None,
            synth: SynthConfig::default(),
            rate_hz: nyqmirror::physio::DEFAULT_PHYSIO_RATE,
            analyze: PhysioSignal::Edr,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SynthConfig {
    pub ihr_hz: f64,
    pub resp_hz: f64,
    pub duration_s: f64,
    pub depth: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            ihr_hz: 1.4,
            resp_hz: 0.5,
            duration_s: 300.0,
            depth: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LowpassConfig {
    pub cutoff_hz: f64,
    pub transition_hz: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct MitigationConfig {
    /// Also write the representation with everything above the INF zeroed.
    pub hard_threshold: bool,
    /// Low-pass the uniform signal before analysis.
    pub lowpass: Option<LowpassConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Tfr1,
    Pgm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
    /// Formats of the time-frequency outputs; curves are always CSV.
    pub formats: Vec<Format>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            formats: vec![Format::Csv, Format::Tfr1, Format::Pgm],
        }
    }
}

impl OutputConfig {
    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }
}

impl RunConfig {
    /// Parses `text`, applies `key=value` overrides and validates the result.
    pub fn load(text: &str, overrides: &[String]) -> Result<Self, CliError> {
        let mut value: Value = if text.trim().is_empty() {
            Value::Object(Default::default())
        } else {
            serde_json::from_str(text)
                .map_err(|e| CliError::Config(format!("line {}, column {}: {e}", e.line(), e.column())))?
        };
        for item in overrides {
            apply_override(&mut value, item)?;
        }
        let cfg: RunConfig = serde_path_to_error::deserialize(value)
            .map_err(|e| CliError::Config(format!("key `{}`: {}", e.path(), e.inner())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        match self.scenario.as_str() {
            "custom" if self.custom.is_none() => {
                Err(CliError::Config("scenario `custom` needs a `custom` section".into()))
            }
            "custom" => Ok(()),
            name => name
                .parse::<BuiltinScenario>()
                .map(|_| ())
                .map_err(|_| CliError::Config(format!("unknown scenario `{name}` (expected fig1, fig2 or custom)"))),
        }?;
        self.interpolation.scheme()?;
        if !(self.analysis.window_s > 0.0) || !(self.analysis.threshold >= 0.0) {
            return Err(CliError::Config("analysis.window_s must be > 0 and analysis.threshold >= 0".into()));
        }
        if !(self.predict.grid_hz > 0.0) {
            return Err(CliError::Config("predict.grid_hz must be > 0".into()));
        }
        if !(self.physio.rate_hz > 0.0) {
            return Err(CliError::Config("physio.rate_hz must be > 0".into()));
        }
        Ok(())
    }

    pub fn scenario_spec(&self) -> ScenarioSpec {
        match &self.custom {
            Some(spec) if self.scenario == "custom" => *spec,
            _ => self
                .scenario
                .parse::<BuiltinScenario>()
                .expect("validated scenario name")
                .spec(),
        }
    }
}

/// `a.b.c=value`: the value is read as JSON when it parses, else as a string.
fn apply_override(root: &mut Value, item: &str) -> Result<(), CliError> {
    let (key, raw) = item
        .split_once('=')
        .ok_or_else(|| CliError::Usage(format!("--set expects key=value, got `{item}`")))?;
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(CliError::Usage(format!("malformed key `{key}`")));
    }
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut node = root;
    for (i, part) in parts.iter().enumerate() {
        let map = match node {
            Value::Object(map) => map,
            other if other.is_null() => {
                *other = Value::Object(Default::default());
                other.as_object_mut().expect("just created")
            }
            _ => {
                return Err(CliError::Config(format!(
                    "key `{}` is not an object",
                    parts[..i].join(".")
                )))
            }
        };
        if i + 1 == parts.len() {
            map.insert(part.to_string(), value);
            return Ok(());
        }
        node = map.entry(part.to_string()).or_insert(Value::Null);
    }
    unreachable!("loop returns on the last key")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_all_defaults() {
        assert_eq!(RunConfig::load("{}", &[]).unwrap(), RunConfig::default());
        assert_eq!(RunConfig::load("", &[]).unwrap(), RunConfig::default());
    }

    #[test]
    fn overrides_reach_nested_keys() {
        let cfg = RunConfig::load(
            r#"{"scenario": "fig1"}"#,
            &[
                "scenario=fig2".into(),
                "interpolation.scheme=order_n".into(),
                "analysis.window_s=4".into(),
                "mitigation.lowpass.cutoff_hz=3".into(),
                "mitigation.lowpass.transition_hz=0.5".into(),
            ],
        )
        .unwrap();
        assert_eq!(cfg.scenario, "fig2");
        assert_eq!(cfg.interpolation.scheme().unwrap(), InterpolationScheme::OrderN(12));
        assert_eq!(cfg.analysis.window_s, 4.0);
        assert_eq!(cfg.mitigation.lowpass.unwrap().cutoff_hz, 3.0);
    }

    #[test]
    fn unknown_keys_are_rejected_with_their_path() {
        let e = RunConfig::load(r#"{"analysis": {"windw_s": 3}}"#, &[]).unwrap_err();
        assert!(e.to_string().contains("analysis"), "{e}");
        let e = RunConfig::load("{}", &["output.colour=red".into()]).unwrap_err();
        assert!(e.to_string().contains("colour"), "{e}");
    }

    #[test]
    fn syntax_errors_report_the_line() {
        let e = RunConfig::load("{\n  \"scenario\": \"fig1\",\n  oops\n}", &[]).unwrap_err();
        assert!(e.to_string().contains("line 3"), "{e}");
    }

    #[test]
    fn bad_values() {
        assert!(RunConfig::load(r#"{"scenario": "fig9"}"#, &[]).is_err());
        assert!(RunConfig::load(r#"{"scenario": "custom"}"#, &[]).is_err());
        assert!(RunConfig::load("{}", &["analysis.method=wavelet".into()]).is_err());
        assert!(matches!(RunConfig::load("{}", &["novalue".into()]), Err(CliError::Usage(_))));
    }
}
