mod common;

use std::f64::consts::PI;
use std::sync::Arc;

use nyqmirror::*;

/// IHR `1.2 + 0.2 sin(2π·0.05 t)` Hz and its closed-form antiderivative.
fn heart_rate(t: f64) -> f64 {
    1.2 + 0.2 * (2.0 * PI * 0.05 * t).sin()
}

fn heart_phase(t: f64) -> f64 {
    1.2 * t + 0.2 * (1.0 - (2.0 * PI * 0.05 * t).cos()) / (2.0 * PI * 0.05)
}

/// Interval to the next peak from `t`: the root of `ψ(t + r) = ψ(t) + 1`.
fn interval_oracle(t: f64) -> f64 {
    let target = heart_phase(t) + 1.0;
    let (mut lo, mut hi) = (0.0, 5.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if heart_phase(t + mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn ihr_tracks_the_generating_rate() {
    let rec = synth_rpeaks(Arc::new(heart_rate), constant_curve(0.3), 200.0, 0.0).unwrap();
    let sig = ihr_signal(&rec, 8.0).unwrap();
    let times = sig.times();
    let (mut err, mut norm) = (0.0, 0.0);
    for (t, v) in times.iter().zip(sig.values()) {
        if *t < 10.0 || *t > sig.t_end() - 10.0 {
            continue;
        }
        let want = interval_oracle(*t);
        err += (v - want).powi(2);
        norm += want * want;
    }
    let rel = (err / norm).sqrt();
    assert!(rel <= 0.02, "{rel}");
}

#[test]
fn peaks_land_on_integer_crossings() {
    let rec = synth_rpeaks(Arc::new(heart_rate), constant_curve(0.3), 100.0, 0.0).unwrap();
    for (m, t) in rec.times().iter().enumerate() {
        assert!((heart_phase(*t) - m as f64).abs() < 1e-8, "peak {m}");
    }
}

#[test]
fn edr_closed_loop_recovers_the_respiration() {
    let rec = synth_rpeaks(constant_curve(1.4f64), constant_curve(0.5), 300.0, 0.1).unwrap();
    let edr = edr_signal(&rec, 8.0, InterpolationScheme::Cubic).unwrap();
    let tfr = AnalysisParams {
        window_s: 15.0,
        ..AnalysisParams::default()
    }
    .run(&edr, TfMethod::Sst)
    .unwrap();
    let ridge = ridge_extract(&tfr, 0.1, 0.7, 0.0).unwrap();
    let mid = tfr.frames() / 2;
    assert!((ridge.freqs[mid] - 0.5).abs() <= tfr.bin_width());
    let reflected = ridge_extract(&tfr, 0.7, 1.2, 0.0).unwrap();
    assert!((reflected.freqs[mid] - 0.9).abs() <= 2.0 * tfr.bin_width());
}

#[test]
fn file_round_trip_and_errors() {
    let text = "time_s,amplitude\n0.0,1.0\n0.7,1.1\n1.4,0.9\n2.1,1.0\n2.8,1.05\n3.5,0.95\n";
    let rec: RPeakRecord<f64> = parse_rpeaks(text.as_bytes()).unwrap();
    assert_eq!(rec.len(), 6);
    let rri = rri_series(&rec).unwrap();
    assert!(rri.values().iter().all(|v| (v - 0.7).abs() < 1e-12));
    assert!(ihr_signal(&rec, 8.0).is_ok());

    let two: RPeakRecord<f64> = parse_rpeaks(b"time_s\n0.0\n0.8\n").unwrap();
    assert!(rri_series(&two).is_err());
    assert!(ihr_signal(&two, 8.0).is_err());
    assert!(matches!(
        parse_rpeaks::<f64>(b"time_s\n0.0\n0.8\n0.8\n"),
        Err(Error::Parse { row: 4, .. })
    ));
}

#[test]
fn uniform_one_hertz_peaks_give_unit_intervals() {
    let rec = RPeakRecord::new((0..20).map(f64::from).collect(), None).unwrap();
    assert!(rri_series(&rec).unwrap().values().iter().all(|v| *v == 1.0));
}
