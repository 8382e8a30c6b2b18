//! The four subcommands. Each returns the files it wrote, in order.

use std::path::PathBuf;

use nyqmirror::scalar::linspace;
use nyqmirror::tf::{TfMethod, UniformSignal};
use nyqmirror::{
    above_inf_energy_ratio, edr_signal, estimate_isr, ihr_signal, inf_hard_threshold, log_display, lowpass_prefilter,
    parse_rpeaks, predict_components, resample_uniform, ridge_above_inf, ridge_below_inf, ridge_extract, sample_signal,
    synth_rpeaks, verify_reflection_theorem, InterpolationScheme, RPeakRecord, Ridge, SampleSet, Scenario,
    TfRepresentation,
};
use serde_json::{json, Value};

use crate::config::{Format, PhysioSignal, RunConfig};
use crate::error::CliError;
use crate::output::{fmt, read_two_column_csv, Metadata, OutputDir};

/// Resolved configuration recorded in metadata; the output directory is left
/// out so identical runs produce identical bytes wherever they are written.
fn recorded_config(cfg: &RunConfig) -> Value {
    let mut v = serde_json::to_value(cfg).expect("config serializes");
    if let Some(map) = v.as_object_mut() {
        if let Some(Value::Object(out)) = map.get_mut("output") {
            out.remove("dir");
        }
    }
    v
}

struct Pipeline {
    scenario: Scenario<f64>,
    samples: SampleSet<f64>,
    scheme: InterpolationScheme,
    uniform: UniformSignal<f64>,
}

fn run_pipeline(cfg: &RunConfig) -> Result<Pipeline, CliError> {
    let spec = cfg.scenario_spec();
    let scenario: Scenario<f64> = spec.build().map_err(|e| CliError::Config(e.to_string()))?;
    let scheme = cfg.interpolation.scheme()?;
    let samples = sample_signal(&scenario.signal, &scenario.scheme, 0.0, scenario.duration_s)?;
    let interp = scheme.build(&samples)?;
    let (lo, hi) = interp.domain();
    let uniform = resample_uniform(interp.as_ref(), scenario.resample_hz, lo, hi)?;
    Ok(Pipeline {
        scenario,
        samples,
        scheme,
        uniform,
    })
}

pub fn simulate(cfg: &RunConfig, out: &mut OutputDir) -> Result<(), CliError> {
    let p = run_pipeline(cfg)?;
    let meta = Metadata::new("simulate", p.scheme.to_string(), json!({ "config": recorded_config(cfg) }));
    let (sig, sch) = (&p.scenario.signal, &p.scenario.scheme);

    out.csv(
        "samples.csv",
        &meta,
        &["m", "time_s", "value"],
        p.samples.times().iter().zip(p.samples.values()).map(|(t, v)| {
            vec![fmt(sch.psi(*t).round()), fmt(*t), fmt(*v)]
        }),
    )?;
    out.csv(
        "interpolated.csv",
        &meta,
        &["time_s", "value"],
        p.uniform.times().into_iter().zip(p.uniform.values()).map(|(t, v)| vec![fmt(t), fmt(*v)]),
    )?;
    let grid = p.uniform.times();
    out.csv(
        "truth_if.csv",
        &meta.with_method("closed_form"),
        &["time_s", "if_hz", "am"],
        grid.iter().map(|&t| vec![fmt(t), fmt(sig.iff(t)), fmt(sig.am(t))]),
    )?;
    out.csv(
        "truth_isr.csv",
        &meta.with_method("closed_form"),
        &["time_s", "isr_hz", "inf_hz"],
        grid.iter().map(|&t| vec![fmt(t), fmt(sch.psi_prime(t)), fmt(sch.inf(t))]),
    )?;
    out.json(
        "run.json",
        &json!({
            "metadata": meta,
            "samples": p.samples.len(),
            "uniform_samples": p.uniform.len(),
            "span_s": [p.uniform.t_start(), p.uniform.t_end()],
        }),
    )
}

/// Uniform signal and optional INF curve analysed by `tfr`.
fn tfr_input(cfg: &RunConfig) -> Result<(UniformSignal<f64>, Option<Box<dyn Fn(f64) -> f64>>), CliError> {
    let Some(path) = &cfg.input.signal_csv else {
        let p = run_pipeline(cfg)?;
        let scheme = p.scenario.scheme.clone();
        return Ok((p.uniform, Some(Box::new(move |t| scheme.inf(t)))));
    };
    let (times, values) = read_two_column_csv(path)?;
    if times.len() < 2 || values.len() != times.len() {
        return Err(CliError::Data(format!("{}: need at least two `time_s,value` rows", path.display())));
    }
    let step = times[1] - times[0];
    if !(step > 0.0) || times.iter().enumerate().any(|(k, t)| (t - (times[0] + k as f64 * step)).abs() > 1e-6 * step.max(1.0)) {
        return Err(CliError::Data(format!("{}: times are not uniformly spaced", path.display())));
    }
    let sig = UniformSignal::new(values, 1.0 / step, times[0])?;
    let inf: Option<Box<dyn Fn(f64) -> f64>> = match &cfg.input.samples_csv {
        Some(sp) => {
            let (sample_times, _) = read_two_column_csv(sp)?;
            let est = estimate_isr(&sample_times)?;
            Some(Box::new(move |t| est.inf_clamped(t)))
        }
        None => None,
    };
    Ok((sig, inf))
}

fn prefilter(cfg: &RunConfig, sig: UniformSignal<f64>) -> Result<UniformSignal<f64>, CliError> {
    match cfg.mitigation.lowpass {
        Some(lp) => Ok(lowpass_prefilter(&sig, lp.cutoff_hz, lp.transition_hz)?),
        None => Ok(sig),
    }
}

fn ridge_rows<'a>(ridge: &'a Ridge<f64>, times: &'a [f64]) -> impl Iterator<Item = Vec<String>> + 'a {
    times
        .iter()
        .zip(ridge.freqs.iter().zip(&ridge.bins))
        .map(|(t, (f, b))| vec![fmt(*t), fmt(*f), b.to_string()])
}

fn write_representation(
    out: &mut OutputDir,
    cfg: &RunConfig,
    stem: &str,
    meta: &Metadata,
    tfr: &TfRepresentation<f64>,
) -> Result<(), CliError> {
    if cfg.output.wants(Format::Tfr1) {
        out.tfr1(&format!("{stem}.bin"), meta, tfr)?;
    }
    let display = log_display(tfr);
    if cfg.output.wants(Format::Csv) {
        out.matrix_csv(&format!("{stem}.csv"), meta, tfr.freq_axis(), tfr.time_axis(), |i, j| tfr.magnitude(i, j))?;
        out.matrix_csv(
            &format!("{stem}_display.csv"),
            &meta.with_method(format!("{}+log_display", tfr.method())),
            tfr.freq_axis(),
            tfr.time_axis(),
            |i, j| display.get(i, j),
        )?;
    }
    if cfg.output.wants(Format::Pgm) {
        out.pgm(&format!("{stem}.pgm"), meta, &display)?;
    }
    Ok(())
}

/// Representation, display, image, ridges and (when the INF is known) the INF
/// overlay, INF-split ridges and optional masked copy. Returns the report.
fn write_tf_set(
    out: &mut OutputDir,
    cfg: &RunConfig,
    prefix: &str,
    command: &str,
    sig: &UniformSignal<f64>,
    inf: Option<&dyn Fn(f64) -> f64>,
) -> Result<Value, CliError> {
    let method: TfMethod = cfg.analysis.method;
    let tfr = cfg.analysis.params().run(sig, method)?;
    let meta = Metadata::new(
        command,
        method.as_str(),
        json!({ "config": recorded_config(cfg), "window": tfr.window(), "rate_hz": sig.rate() }),
    );
    write_representation(out, cfg, &format!("{prefix}tfr"), &meta, &tfr)?;

    let fmax = cfg.ridge.freq_max.unwrap_or(sig.rate() / 2.0);
    let (fmin, penalty) = (cfg.ridge.freq_min, cfg.ridge.penalty);
    let times = tfr.time_axis();
    let header = ["time_s", "freq_hz", "bin"];
    let ridge = ridge_extract(&tfr, fmin, fmax, penalty)?;
    out.csv(&format!("{prefix}ridge.csv"), &meta, &header, ridge_rows(&ridge, times))?;

    let mut report = json!({
        "metadata": meta,
        "freq_bins": tfr.freq_bins(),
        "frames": tfr.frames(),
        "bin_width_hz": tfr.bin_width(),
    });
    let Some(inf) = inf else {
        return Ok(report);
    };
    out.csv(
        &format!("{prefix}inf_overlay.csv"),
        &meta.with_method("inf"),
        &["time_s", "isr_hz", "inf_hz"],
        times.iter().map(|&t| vec![fmt(t), fmt(2.0 * inf(t)), fmt(inf(t))]),
    )?;
    let above = ridge_above_inf(&tfr, &inf, fmax, penalty)?;
    out.csv(&format!("{prefix}ridge_above_inf.csv"), &meta, &header, ridge_rows(&above, times))?;
    let below = ridge_below_inf(&tfr, &inf, fmin, penalty)?;
    out.csv(&format!("{prefix}ridge_below_inf.csv"), &meta, &header, ridge_rows(&below, times))?;
    report["above_inf_energy_ratio"] = json!(above_inf_energy_ratio(&tfr, &inf));

    if cfg.mitigation.hard_threshold {
        let masked = inf_hard_threshold(&tfr, &inf);
        let mmeta = meta.with_method(format!("{method}+inf_hard_threshold"));
        write_representation(out, cfg, &format!("{prefix}masked"), &mmeta, &masked.tfr)?;
        report["masked_above_inf_energy_ratio"] = json!(above_inf_energy_ratio(&masked.tfr, &inf));
    }
    Ok(report)
}

pub fn tfr(cfg: &RunConfig, out: &mut OutputDir) -> Result<(), CliError> {
    let (sig, inf) = tfr_input(cfg)?;
    let sig = prefilter(cfg, sig)?;
    let report = write_tf_set(out, cfg, "", "tfr", &sig, inf.as_deref())?;
    out.json("tfr_report.json", &report)
}

pub fn predict(cfg: &RunConfig, out: &mut OutputDir) -> Result<(), CliError> {
    let scheme = cfg.interpolation.scheme()?;
    let Some(n) = scheme.order() else {
        return Err(CliError::Config("predict needs a spline scheme (cubic or order_n)".into()));
    };
    let spec = cfg.scenario_spec();
    let sc: Scenario<f64> = spec.build().map_err(|e| CliError::Config(e.to_string()))?;
    let count = (sc.duration_s * cfg.predict.grid_hz).round() as usize + 1;
    let grid = linspace(0.0, sc.duration_s, count.max(2));
    let k = cfg.predict.k_max as i64;
    let prediction = predict_components(&sc.signal, &sc.scheme, n, -k..=k, &grid)?;
    let meta = Metadata::new("predict", "reflection_series", json!({ "config": recorded_config(cfg), "order": n }));

    let rows = prediction.components.iter().flat_map(|c| {
        grid.iter()
            .map(move |&t| vec![c.k.to_string(), fmt(t), fmt(c.frequency(t)), fmt(c.amplitude(t))])
    });
    out.csv("components.csv", &meta, &["k", "time_s", "if_hz", "amp"], rows)?;

    let theorem = verify_reflection_theorem(
        &sc.signal,
        &sc.scheme,
        n,
        cfg.predict.verify_k_max,
        sc.resample_hz,
        (0.0, sc.duration_s),
    )?;
    let ranking: Vec<Value> = prediction
        .components
        .iter()
        .map(|c| json!({ "k": c.k, "peak_amplitude": c.peak_amplitude }))
        .collect();
    out.json(
        "prediction_report.json",
        &json!({
            "metadata": meta,
            "ranking": ranking,
            "inr": prediction.inr,
            "theorem": theorem,
            "verify_k_max": cfg.predict.verify_k_max,
        }),
    )
}

fn load_rpeaks(cfg: &RunConfig) -> Result<RPeakRecord<f64>, CliError> {
    match &cfg.physio.rpeaks_csv {
        Some(path) => {
            let bytes = std::fs::read(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
            // Our own rpeaks.csv starts with a `#` metadata line; skip any such prelude.
            let mut body = &bytes[..];
            while body.first() == Some(&b'#') {
                body = body.iter().position(|&b| b == b'\n').map_or(&[][..], |i| &body[i + 1..]);
            }
            parse_rpeaks(body).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
        }
        None => {
            let s = cfg.physio.synth;
            Ok(synth_rpeaks(
                nyqmirror::constant_curve(s.ihr_hz),
                nyqmirror::constant_curve(s.resp_hz),
                s.duration_s,
                s.depth,
            )
            .map_err(|e| CliError::Config(format!("physio.synth: {e}")))?)
        }
    }
}

pub fn physio(cfg: &RunConfig, out: &mut OutputDir) -> Result<(), CliError> {
    let rec = load_rpeaks(cfg)?;
    let rate = cfg.physio.rate_hz;
    let scheme = cfg.interpolation.scheme()?;
    let source = if cfg.physio.rpeaks_csv.is_some() { "file" } else { "synthetic" };
    let meta = Metadata::new("physio", scheme.to_string(), json!({ "config": recorded_config(cfg), "source": source }));

    let amps = rec.amplitudes();
    out.csv(
        "rpeaks.csv",
        &meta.with_method("input"),
        &["time_s", "amplitude"],
        rec.times()
            .iter()
            .enumerate()
            .map(|(i, t)| vec![fmt(*t), amps.map(|a| fmt(a[i])).unwrap_or_default()]),
    )?;

    let ihr = ihr_signal(&rec, rate)?;
    let signal_rows = |s: &UniformSignal<f64>| -> Vec<Vec<String>> {
        s.times().into_iter().zip(s.values()).map(|(t, v)| vec![fmt(t), fmt(*v)]).collect()
    };
    out.csv("ihr.csv", &meta.with_method("cubic"), &["time_s", "rri_s"], signal_rows(&ihr).into_iter())?;
    let edr = match amps {
        Some(_) => {
            let e = edr_signal(&rec, rate, scheme)?;
            out.csv("edr.csv", &meta, &["time_s", "edr"], signal_rows(&e).into_iter())?;
            Some(e)
        }
        None => None,
    };

    let isr = estimate_isr(rec.times())?;
    let (prefix, analysed) = match (cfg.physio.analyze, edr) {
        (PhysioSignal::Edr, Some(e)) => ("edr_", e),
        (PhysioSignal::Edr, None) => {
            return Err(CliError::Data("EDR analysis needs an `amplitude` column in the R-peak file".into()))
        }
        (PhysioSignal::Ihr, _) => {
            // the interval signal sits on a large offset; analyse its fluctuation
            let mean = ihr.values().iter().sum::<f64>() / ihr.len() as f64;
            ("ihr_", ihr.with_values(ihr.values().iter().map(|v| v - mean).collect())?)
        }
    };
    out.csv(
        "isr.csv",
        &meta.with_method("estimate_isr"),
        &["time_s", "isr_hz", "inf_hz"],
        analysed
            .times()
            .into_iter()
            .map(|t| vec![fmt(t), fmt(2.0 * isr.inf_clamped(t)), fmt(isr.inf_clamped(t))]),
    )?;
    let analysed = prefilter(cfg, analysed)?;
    let inf = |t: f64| isr.inf_clamped(t);
    let report = write_tf_set(out, cfg, prefix, "physio", &analysed, Some(&inf))?;
    out.json("physio_report.json", &json!({ "peaks": rec.len(), "analysis": report }))
}

pub fn output_root(cfg: &RunConfig, out: Option<PathBuf>) -> PathBuf {
    out.unwrap_or_else(|| cfg.output.dir.clone())
}
