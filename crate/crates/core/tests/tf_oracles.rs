mod common;

use common::{chirp, frame_dft, quantile_oracle, tone};
use nyqmirror::tf::{TfMatrix, DISPLAY_FLOOR, DISPLAY_QUANTILE};
use nyqmirror::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn gaussian(duration: f64, rate: f64) -> Window<f64> {
    make_windows(WindowFamily::Gaussian, duration, rate, 1).unwrap().remove(0)
}

fn interior_frames(r: &TfRepresentation<f64>, margin: f64) -> Vec<usize> {
    let (lo, hi) = (r.time_axis()[0] + margin, r.time_axis()[r.frames() - 1] - margin);
    (0..r.frames()).filter(|&j| r.time_axis()[j] >= lo && r.time_axis()[j] <= hi).collect()
}

#[test]
fn stft_matches_frame_dft_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let x: Vec<f64> = (0..400).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let sig = UniformSignal::new(x.clone(), 16.0, 0.0).unwrap();
    let w = gaussian(3.0, 16.0);
    let r = stft(&sig, &w, 7, 256).unwrap();
    for &j in &[0usize, 3, 20, r.frames() - 1] {
        for &i in &[0usize, 5, 64, 128] {
            let want = frame_dft(&x, &w.taper, j * 7, 16.0, r.freq_axis()[i]);
            assert!((r.magnitude(i, j) - want).abs() <= 1e-10 * want.max(1.0), "bin {i} frame {j}");
        }
    }
}

#[test]
fn two_tones_give_two_ridges() {
    let rate = 32.0;
    let v: Vec<f64> = (0..32 * 30)
        .map(|k| {
            let t = k as f64 / rate;
            (2.0 * std::f64::consts::PI * t).cos() + (2.0 * std::f64::consts::PI * 3.0 * t).cos()
        })
        .collect();
    let sig = UniformSignal::new(v, rate, 0.0).unwrap();
    let r = stft(&sig, &gaussian(4.0, rate), 8, 1024).unwrap();
    let low = ridge_extract(&r, 0.2, 2.0, 0.0).unwrap();
    let high = ridge_extract(&r, 2.0, 5.0, 0.0).unwrap();
    for j in interior_frames(&r, 3.0) {
        assert!((low.freqs[j] - 1.0).abs() <= r.bin_width());
        assert!((high.freqs[j] - 3.0).abs() <= r.bin_width());
    }
}

fn concentration(r: &TfRepresentation<f64>, f: f64, bins: f64, margin: f64) -> f64 {
    let (mut near, mut total) = (0.0, 0.0);
    for j in interior_frames(r, margin) {
        for i in 0..r.freq_bins() {
            let m = r.magnitude(i, j);
            let e = if r.method() == TfMethod::Rm { m } else { m * m };
            total += e;
            if (r.freq_axis()[i] - f).abs() <= bins * r.bin_width() {
                near += e;
            }
        }
    }
    near / total
}

#[test]
fn sst_and_rm_concentrate_a_tone() {
    let sig = tone(2.5, 64.0, 20.0);
    let w = gaussian(4.0, 64.0);
    let sst = synchrosqueeze(&sig, &w, 16, 1024, 1e-8).unwrap();
    let rm = reassign(&sig, &w, 16, 1024, 1e-8).unwrap();
    assert!(concentration(&sst, 2.5, 2.0, 2.0) >= 0.90);
    assert!(concentration(&rm, 2.5, 2.0, 2.0) >= 0.95);
}

#[test]
fn rm_relocates_an_impulse_in_time() {
    let mut v = vec![0.0; 64 * 20];
    v[64 * 10] = 1.0;
    let sig = UniformSignal::new(v, 64.0, 0.0).unwrap();
    let rm = reassign(&sig, &gaussian(2.0, 64.0), 16, 256, 0.0).unwrap();
    let frame_of = |t: f64| (t * 64.0 / 16.0).round() as i64;
    let (mut near, mut total) = (0.0, 0.0);
    for j in 0..rm.frames() {
        let col: f64 = (0..rm.freq_bins()).map(|i| rm.magnitude(i, j)).sum();
        total += col;
        if (j as i64 - frame_of(10.0)).abs() <= 2 {
            near += col;
        }
    }
    assert!(near / total >= 0.95, "{}", near / total);
}

#[test]
fn multitaper_ridge_matches_single_taper() {
    let sig = tone(2.5, 64.0, 30.0);
    let p = AnalysisParams {
        window_s: 4.0,
        ..AnalysisParams::default()
    };
    for (single, multi) in [(TfMethod::Sst, TfMethod::MtSst), (TfMethod::Rm, TfMethod::MtRm)] {
        let a = ridge_extract(&p.run(&sig, single).unwrap(), 1.0, 5.0, 0.0).unwrap();
        let r = p.run(&sig, multi).unwrap();
        let b = ridge_extract(&r, 1.0, 5.0, 0.0).unwrap();
        for j in interior_frames(&r, 3.0) {
            assert!((a.freqs[j] - b.freqs[j]).abs() <= r.bin_width());
        }
    }
}

#[test]
fn multitaper_reduces_noise_variance() {
    // per-pixel variance of the RM energy over 50 white-noise seeds
    let rate = 16.0;
    let windows = make_windows(WindowFamily::Hermite, 4.0, rate, 3).unwrap();
    let mut runs_1 = Vec::new();
    let mut runs_3 = Vec::new();
    for seed in 0..50 {
        let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
        let v: Vec<f64> = (0..320).map(|_| rng.gen_range(-1.0f64..1.0) * 3f64.sqrt()).collect();
        let sig = UniformSignal::new(v, rate, 0.0).unwrap();
        runs_1.push(reassign(&sig, &windows[0], 8, 256, 0.0).unwrap().magnitudes());
        runs_3.push(multitaper(&sig, &windows, 8, 256, TfMethod::Rm, 0.0).unwrap().magnitudes());
    }
    let mean_var = |runs: &[Vec<f64>]| {
        let cells = runs[0].len();
        (0..cells)
            .map(|c| {
                let mean = runs.iter().map(|r| r[c]).sum::<f64>() / runs.len() as f64;
                runs.iter().map(|r| (r[c] - mean).powi(2)).sum::<f64>() / (runs.len() - 1) as f64
            })
            .sum::<f64>()
            / cells as f64
    };
    let (v1, v3) = (mean_var(&runs_1), mean_var(&runs_3));
    assert!(v3 < v1, "J=3 {v3} vs J=1 {v1}");
}

#[test]
fn multitaper_rejects_a_single_taper() {
    let sig = tone(2.5, 64.0, 10.0);
    let w = make_windows(WindowFamily::Hermite, 2.0, 64.0, 1).unwrap();
    assert!(multitaper(&sig, &w, 16, 512, TfMethod::Sst, 1e-8).is_err());
}

#[test]
fn chirp_ridge_follows_the_instantaneous_frequency() {
    let (sig, truth) = chirp(1.0, 3.0, 60.0, 32.0);
    let r = AnalysisParams {
        window_s: 6.0,
        ..AnalysisParams::default()
    }
    .run(&sig, TfMethod::Sst)
    .unwrap();
    let ridge = ridge_extract(&r, 0.5, 4.0, 0.0).unwrap();
    for j in interior_frames(&r, 6.0) {
        let t = r.time_axis()[j];
        assert!((ridge.freqs[j] - truth(t)).abs() <= 2.0 * r.bin_width(), "t={t}");
    }
}

#[test]
fn display_follows_the_quantile_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let sig = UniformSignal::new((0..640).map(|_| rng.gen_range(-1.0..1.0)).collect(), 32.0, 0.0).unwrap();
    let mut r = AnalysisParams {
        window_s: 4.0,
        ..AnalysisParams::default()
    }
    .run(&sig, TfMethod::Rm)
    .unwrap();
    // plant an outlier
    let mut m = r.magnitudes();
    m[1234] = 1e6;
    r = TfRepresentation::new(TfMatrix::Real(m.clone()), r.freq_axis().to_vec(), r.time_axis().to_vec(), TfMethod::Rm, *r.window()).unwrap();
    let q = quantile_oracle(&m, DISPLAY_QUANTILE);
    let d = log_display(&r);
    assert!((d.quantile_q - q).abs() <= 1e-12 * q);
    assert!((d.values[1234] - q.ln_1p()).abs() < 1e-12);
    for (v, x) in d.values.iter().zip(&m) {
        assert_eq!(*v, x.min(q).ln_1p().max(DISPLAY_FLOOR));
    }
}

#[test]
fn display_of_zero_is_the_floor() {
    let sig = UniformSignal::new(vec![0.0; 640], 32.0, 0.0).unwrap();
    let r = AnalysisParams::default().run(&sig, TfMethod::Stft).unwrap();
    assert!(log_display(&r).values.iter().all(|v| *v == DISPLAY_FLOOR));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn stft_is_linear(seed in any::<u64>(), a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<f64> = (0..200).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let y: Vec<f64> = (0..200).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let z: Vec<f64> = x.iter().zip(&y).map(|(p, q)| a * p + b * q).collect();
        let w = gaussian(2.0, 16.0);
        let run = |v: Vec<f64>| {
            let r = stft(&UniformSignal::new(v, 16.0, 0.0).unwrap(), &w, 4, 128).unwrap();
            match r.matrix() {
                TfMatrix::Complex(c) => c.clone(),
                TfMatrix::Real(_) => unreachable!(),
            }
        };
        let (vx, vy, vz) = (run(x), run(y), run(z));
        for k in 0..vz.len() {
            let want = vx[k] * a + vy[k] * b;
            prop_assert!((vz[k] - want).norm() <= 1e-10 * (1.0 + want.norm()));
        }
    }

    #[test]
    fn rm_conserves_mass(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sig = UniformSignal::new((0..240).map(|_| rng.gen_range(-1.0..1.0)).collect(), 16.0, 0.0).unwrap();
        let w = gaussian(2.0, 16.0);
        let v = stft(&sig, &w, 4, 128).unwrap();
        let mass: f64 = v.magnitudes().iter().map(|m| m * m).sum();
        let rm: f64 = reassign(&sig, &w, 4, 128, 0.0).unwrap().magnitudes().iter().sum();
        prop_assert!((rm - mass).abs() <= 1e-9 * mass);
    }
}

#[test]
fn outputs_are_bit_identical_across_thread_counts() {
    let (sig, _) = chirp(0.5, 4.0, 30.0, 16.0);
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            TfMethod::ALL
                .iter()
                .map(|m| AnalysisParams { window_s: 4.0, ..AnalysisParams::default() }.run(&sig, *m).unwrap())
                .collect::<Vec<_>>()
        })
    };
    let one = run(1);
    assert_eq!(one, run(2));
    assert_eq!(one, run(8));
}

#[test]
fn single_precision_tone() {
    let v: Vec<f32> = (0..64 * 20).map(|k| (2.0 * std::f32::consts::PI * 2.5 * k as f32 / 64.0).cos()).collect();
    let sig = UniformSignal::new(v, 64.0f32, 0.0).unwrap();
    let r = AnalysisParams { window_s: 4.0, ..AnalysisParams::default() }.run(&sig, TfMethod::Sst).unwrap();
    let ridge = ridge_extract(&r, 1.0, 5.0, 0.0).unwrap();
    let mid = r.frames() / 2;
    assert!((ridge.freqs[mid] - 2.5).abs() <= r.bin_width());
}
