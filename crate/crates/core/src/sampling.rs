//! Non-uniform sampling schemes `t_m = ψ⁻¹(m)`, sample sets, ISR estimation
//! from observed sample times and the identifiability / Nyquist-rate checks.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::signal_model::{central_derivative, Curve, ImtSignal};
use crate::spline::{interpolate_nonuniform, Interpolant, SplineInterpolant};

/// `c <= ψ'` and `|ψ''| <= eps·ψ'`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeParams<T> {
    pub c: T,
    pub eps: T,
}

impl<T: Real> SchemeParams<T> {
    pub fn new(c: T, eps: T) -> Self {
        Self { c, eps }
    }

    pub fn cast<U: Real>(&self) -> SchemeParams<U> {
        SchemeParams {
            c: U::lit(self.c.to_f64_lossy()),
            eps: U::lit(self.eps.to_f64_lossy()),
        }
    }
}

/// Evaluable `ψ` and ISR `ψ'`.
#[derive(Clone)]
pub struct SamplingScheme<T> {
    psi: Curve<T>,
    psi_prime: Curve<T>,
    params: SchemeParams<T>,
}

impl<T: Real> fmt::Debug for SamplingScheme<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SamplingScheme")
            .field("params", &self.params)
            .finish_non_exhaustive()
    }
}

impl<T: Real> SamplingScheme<T> {
    pub fn new(psi: Curve<T>, psi_prime: Curve<T>, params: SchemeParams<T>) -> Self {
        Self {
            psi,
            psi_prime,
            params,
        }
    }

    /// Uniform scheme `ψ(t) = rate·t + offset`.
    pub fn linear(rate: T, offset: T) -> Self {
        Self::new(
            Arc::new(move |t| rate * t + offset),
            Arc::new(move |_| rate),
            SchemeParams::new(rate, T::zero()),
        )
    }

    /// Scheme whose ISR is the given rate curve; `ψ` is its antiderivative with
    /// `ψ(anchor) = 0`, integrated by 8-point Gauss–Legendre on cells of width `cell`.
    pub fn from_rate(rate: Curve<T>, anchor: T, end: T, cell: T) -> Self {
        let integral = Arc::new(CumulativeIntegral::new(Arc::clone(&rate), anchor, end, cell));
        let psi: Curve<T> = Arc::new(move |t| integral.eval(t));
        Self::new(psi, rate, SchemeParams::new(T::zero(), T::zero()))
    }

    pub fn with_params(mut self, params: SchemeParams<T>) -> Self {
        self.params = params;
        self
    }

    pub fn psi(&self, t: T) -> T {
        (self.psi)(t)
    }

    pub fn psi_prime(&self, t: T) -> T {
        (self.psi_prime)(t)
    }

    /// Instantaneous Nyquist frequency `ψ'(t)/2`.
    pub fn inf(&self, t: T) -> T {
        self.psi_prime(t) / T::lit(2.0)
    }

    pub fn params(&self) -> SchemeParams<T> {
        self.params
    }
}

/// ISR `ψ'(t) = rate_hz + cos_amp·cos(cos_omega·t) + quad_coeff·(t − quad_center)²`,
/// with `ψ(0) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SchemeModel {
    pub rate_hz: f64,
    pub cos_amp: f64,
    pub cos_omega: f64,
    pub quad_coeff: f64,
    pub quad_center: f64,
    pub params: SchemeParams<f64>,
}

impl Default for SchemeModel {
    fn default() -> Self {
        Self {
            rate_hz: 6.0,
            cos_amp: 0.0,
            cos_omega: 1.0,
            quad_coeff: 0.0,
            quad_center: 0.0,
            params: SchemeParams::new(6.0, 0.0),
        }
    }
}

impl SchemeModel {
    pub fn build<T: Real>(&self) -> SamplingScheme<T> {
        let r0 = T::lit(self.rate_hz);
        let ca = T::lit(self.cos_amp);
        let w = T::lit(self.cos_omega);
        let q = T::lit(self.quad_coeff);
        let tc = T::lit(self.quad_center);
        let three = T::lit(3.0);
        let psi = move |t: T| {
            let mut v = r0 * t + q / three * ((t - tc).powi(3) + tc.powi(3));
            if ca != T::zero() {
                v += ca / w * (w * t).sin();
            }
            v
        };
        let psi_prime = move |t: T| r0 + ca * (w * t).cos() + q * (t - tc) * (t - tc);
        SamplingScheme::new(Arc::new(psi), Arc::new(psi_prime), self.params.cast())
    }
}

/// Strictly increasing sample times with their observed values.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet<T> {
    times: Vec<T>,
    values: Vec<T>,
}

impl<T: Real> SampleSet<T> {
    pub fn new(times: Vec<T>, values: Vec<T>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::InvalidArgument(format!(
                "{} times but {} values",
                times.len(),
                values.len()
            )));
        }
        if times.len() < 2 {
            return Err(Error::TooFewPoints {
                needed: 2,
                got: times.len(),
            });
        }
        check_increasing(&times)?;
        Ok(Self { times, values })
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

pub(crate) fn check_increasing<T: Real>(times: &[T]) -> Result<()> {
    for (i, w) in times.windows(2).enumerate() {
        if !(w[1] > w[0]) {
            return Err(Error::NotIncreasing { index: i + 1 });
        }
    }
    Ok(())
}

const PROBES: usize = 4096;
const NEWTON_STEPS: usize = 3;

/// All `t_m` in `[t_start, t_end]` with `ψ(t_m) = m` for integer `m`.
///
/// Roots are bracketed by a scan with step `0.5 / max ψ'`, bisected to 1e-8 s
/// and polished with at most three Newton steps.
pub fn sampling_times<T: Real>(scheme: &SamplingScheme<T>, t_start: T, t_end: T) -> Result<Vec<T>> {
    if !(t_start < t_end) || !t_start.is_finite() || !t_end.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "need finite t_start < t_end, got [{t_start}, {t_end}]"
        )));
    }
    let span = t_end - t_start;
    let mut max_rate = T::zero();
    for i in 0..=PROBES {
        let t = t_start + span * T::from_usize_lossy(i) / T::from_usize_lossy(PROBES);
        let r = scheme.psi_prime(t);
        if !(r > T::zero()) {
            return Err(Error::NonMonotone {
                t: t.to_f64_lossy(),
                rate: r.to_f64_lossy(),
            });
        }
        max_rate = max_rate.max(r);
    }

    let step = T::lit(0.5) / max_rate;
    let steps = (span / step).ceil().to_usize().unwrap_or(0).max(1);
    let step = span / T::from_usize_lossy(steps);
    let tiny = T::lit(1e-12);

    let mut roots = Vec::new();
    let mut a = t_start;
    let mut psi_a = scheme.psi(a);
    // a root sitting exactly on t_start
    if (psi_a - psi_a.round()).abs() <= tiny * psi_a.abs().max(T::one()) {
        roots.push(t_start);
    }
    let mut next_m = (psi_a + tiny * psi_a.abs().max(T::one())).floor() + T::one();

    for k in 1..=steps {
        let b = if k == steps {
            t_end
        } else {
            t_start + step * T::from_usize_lossy(k)
        };
        let psi_b = scheme.psi(b);
        if psi_b < psi_a {
            return Err(Error::NonMonotone {
                t: b.to_f64_lossy(),
                rate: scheme.psi_prime(b).to_f64_lossy(),
            });
        }
        let slack = tiny * psi_b.abs().max(T::one());
        while next_m <= psi_b + slack {
            let root = if (psi_b - next_m).abs() <= slack {
                b
            } else {
                solve_level(scheme, next_m, a, b)
            };
            roots.push(root);
            next_m = next_m + T::one();
        }
        a = b;
        psi_a = psi_b;
    }
    Ok(roots)
}

fn solve_level<T: Real>(scheme: &SamplingScheme<T>, level: T, mut lo: T, mut hi: T) -> T {
    let tol = T::lit(1e-8);
    let two = T::lit(2.0);
    while hi - lo > tol {
        let mid = (lo + hi) / two;
        if mid <= lo || mid >= hi {
            break;
        }
        if scheme.psi(mid) < level {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (bracket_lo, bracket_hi) = (lo, hi);
    let mut t = (lo + hi) / two;
    for _ in 0..NEWTON_STEPS {
        let r = scheme.psi(t) - level;
        if r == T::zero() {
            break;
        }
        let next = t - r / scheme.psi_prime(t);
        // Newton may only polish inside the bisection bracket.
        if !(next >= bracket_lo && next <= bracket_hi) {
            break;
        }
        t = next;
    }
    t
}

/// `sample_signal`: sample values of `signal` at the scheme's times in `[t_start, t_end]`.
pub fn sample_signal<T: Real>(
    signal: &ImtSignal<T>,
    scheme: &SamplingScheme<T>,
    t_start: T,
    t_end: T,
) -> Result<SampleSet<T>> {
    let times = sampling_times(scheme, t_start, t_end)?;
    let values = times.iter().map(|&t| signal.evaluate(t)).collect();
    SampleSet::new(times, values)
}

/// ISR estimated from observed sample times: a cubic spline through the
/// points `(t_i, 1/(t_{i+1} − t_i))`.
#[derive(Debug, Clone)]
pub struct IsrEstimate<T> {
    spline: SplineInterpolant<T>,
}

impl<T: Real> IsrEstimate<T> {
    pub fn isr(&self, t: T) -> Result<T> {
        self.spline.eval(t)
    }

    pub fn inf(&self, t: T) -> Result<T> {
        Ok(self.isr(t)? / T::lit(2.0))
    }

    /// `[t_1, t_{N-1}]`; there is no extrapolation beyond it.
    pub fn domain(&self) -> (T, T) {
        self.spline.domain()
    }

    pub fn spline(&self) -> &SplineInterpolant<T> {
        &self.spline
    }

    /// INF clamped into the domain, for overlays on grids that overhang it.
    pub fn inf_clamped(&self, t: T) -> T {
        let (lo, hi) = self.domain();
        self.spline
            .eval(t.max(lo).min(hi))
            .expect("clamped point lies in the domain")
            / T::lit(2.0)
    }
}

/// Minimum number of sample times accepted by [`estimate_isr`].
pub const MIN_ISR_TIMES: usize = 6;

pub fn estimate_isr<T: Real>(times: &[T]) -> Result<IsrEstimate<T>> {
    check_increasing(times)?;
    if times.len() < MIN_ISR_TIMES {
        return Err(Error::TooFewPoints {
            needed: MIN_ISR_TIMES,
            got: times.len(),
        });
    }
    let knots: Vec<T> = times[..times.len() - 1].to_vec();
    let rates: Vec<T> = times.windows(2).map(|w| T::one() / (w[1] - w[0])).collect();
    let spline = interpolate_nonuniform(&SampleSet::new(knots, rates)?, 3)?;
    Ok(IsrEstimate { spline })
}

/// Deviations between two schemes that generate the same sample times.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentifiabilityReport {
    /// max |ψ'_a − ψ'_b| on the grid
    pub max_rate_deviation: f64,
    /// max |ψ_a − ψ_b| on the grid
    pub max_psi_deviation: f64,
    /// Smallest `eps` with `|ψ''| <= eps·ψ'` for both schemes on the grid.
    pub eps: f64,
    /// Smallest ISR of either scheme on the grid.
    pub c: f64,
    pub sample_count: usize,
}

impl IdentifiabilityReport {
    /// `max|Δψ'| <= 2 eps` and `max|Δψ| <= 2 eps / c`.
    pub fn within_bounds(&self) -> bool {
        self.max_rate_deviation <= 2.0 * self.eps && self.max_psi_deviation <= 2.0 * self.eps / self.c
    }
}

pub fn check_isr_identifiability<T: Real>(
    psi_a: &SamplingScheme<T>,
    psi_b: &SamplingScheme<T>,
    grid: &[T],
) -> Result<IdentifiabilityReport> {
    if grid.len() < 3 {
        return Err(Error::TooFewPoints {
            needed: 3,
            got: grid.len(),
        });
    }
    check_increasing(grid)?;
    let (lo, hi) = (grid[0], grid[grid.len() - 1]);
    let times_a = sampling_times(psi_a, lo, hi)?;
    let times_b = sampling_times(psi_b, lo, hi)?;
    if times_a.len() != times_b.len() {
        return Err(Error::SampleTimesDiffer(format!(
            "{} vs {} sample times",
            times_a.len(),
            times_b.len()
        )));
    }
    let tol = T::lit(1e-8);
    if let Some((i, (a, b))) = times_a
        .iter()
        .zip(&times_b)
        .enumerate()
        .find(|(_, (a, b))| (**a - **b).abs() > tol)
    {
        return Err(Error::SampleTimesDiffer(format!(
            "sample {i}: {a} vs {b}"
        )));
    }

    let h = grid
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(T::infinity(), T::min);
    let mut report = IdentifiabilityReport {
        max_rate_deviation: 0.0,
        max_psi_deviation: 0.0,
        eps: 0.0,
        c: f64::INFINITY,
        sample_count: times_a.len(),
    };
    let rate_a = |t: T| psi_a.psi_prime(t);
    let rate_b = |t: T| psi_b.psi_prime(t);
    for &t in grid {
        let (ra, rb) = (psi_a.psi_prime(t), psi_b.psi_prime(t));
        report.max_rate_deviation = report.max_rate_deviation.max((ra - rb).abs().to_f64_lossy());
        report.max_psi_deviation = report
            .max_psi_deviation
            .max((psi_a.psi(t) - psi_b.psi(t)).abs().to_f64_lossy());
        let (da, _) = central_derivative(&rate_a, t, h);
        let (db, _) = central_derivative(&rate_b, t, h);
        report.eps = report
            .eps
            .max((da.abs() / ra).to_f64_lossy())
            .max((db.abs() / rb).to_f64_lossy());
        report.c = report.c.min(ra.min(rb).to_f64_lossy());
    }
    Ok(report)
}

/// Smallest margin `ψ'(t) − 2φ'(t)` over a grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InrReport {
    pub min_margin: f64,
    pub at_time: f64,
    /// Set when the margin is negative (local undersampling).
    pub warning: bool,
}

pub fn check_inr<T: Real>(signal: &ImtSignal<T>, scheme: &SamplingScheme<T>, grid: &[T]) -> InrReport {
    let mut report = InrReport {
        min_margin: f64::INFINITY,
        at_time: f64::NAN,
        warning: false,
    };
    for &t in grid {
        let margin = (scheme.psi_prime(t) - T::lit(2.0) * signal.iff(t)).to_f64_lossy();
        if margin < report.min_margin {
            report.min_margin = margin;
            report.at_time = t.to_f64_lossy();
        }
    }
    report.warning = report.min_margin < 0.0;
    report
}

// 8-point Gauss–Legendre on [-1, 1].
const GL_NODES: [f64; 8] = [
    -0.960_289_856_497_536_3,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL_WEIGHTS: [f64; 8] = [
    0.101_228_536_290_376_26,
    0.222_381_034_453_374_47,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362,
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_47,
    0.101_228_536_290_376_26,
];

fn gauss_legendre<T: Real>(f: &dyn Fn(T) -> T, a: T, b: T) -> T {
    let half = (b - a) / T::lit(2.0);
    let mid = (a + b) / T::lit(2.0);
    GL_NODES
        .iter()
        .zip(GL_WEIGHTS.iter())
        .map(|(&x, &w)| T::lit(w) * f(mid + half * T::lit(x)))
        .sum::<T>()
        * half
}

/// Antiderivative of a rate curve anchored at zero, tabulated per cell.
pub(crate) struct CumulativeIntegral<T> {
    rate: Curve<T>,
    start: T,
    cell: T,
    prefix: Vec<T>,
}

impl<T: Real> CumulativeIntegral<T> {
    pub(crate) fn new(rate: Curve<T>, start: T, end: T, cell: T) -> Self {
        let cells = ((end - start) / cell).ceil().to_usize().unwrap_or(1).max(1);
        let mut prefix = Vec::with_capacity(cells + 1);
        let mut acc = T::zero();
        prefix.push(acc);
        for k in 0..cells {
            let a = start + cell * T::from_usize_lossy(k);
            acc += gauss_legendre(rate.as_ref(), a, a + cell);
            prefix.push(acc);
        }
        Self {
            rate,
            start,
            cell,
            prefix,
        }
    }

    pub(crate) fn eval(&self, t: T) -> T {
        let idx = ((t - self.start) / self.cell).floor();
        let last = self.prefix.len() - 1;
        let k = if idx < T::zero() {
            0
        } else {
            idx.to_usize().unwrap_or(last).min(last)
        };
        let a = self.start + self.cell * T::from_usize_lossy(k);
        self.prefix[k] + gauss_legendre(self.rate.as_ref(), a, t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::linspace;
    use crate::signal_model::{builtin_scenario, BuiltinScenario};

    #[test]
    fn uniform_scheme_times() {
        let times = sampling_times(&SamplingScheme::linear(4.0, 0.0), 0.0, 1.0).unwrap();
        let expected = [0.0f64, 0.25, 0.5, 0.75, 1.0];
        assert_eq!(times.len(), 5);
        for (t, e) in times.iter().zip(expected) {
            assert!((t - e).abs() < 1e-10);
        }
    }

    #[test]
    fn offset_shifts_labels_not_times() {
        let times = sampling_times(&SamplingScheme::linear(1.0, 10.0), 0.0, 2.0).unwrap();
        assert_eq!(times.len(), 3);
        for (t, e) in times.iter().zip([0.0f64, 1.0, 2.0]) {
            assert!((t - e).abs() < 1e-10);
        }
    }

    #[test]
    fn fig1_sample_count_matches_closed_form() {
        let s = builtin_scenario::<f64>("fig1").unwrap();
        let times = sampling_times(&s.scheme, 0.0, 80.0).unwrap();
        let expected = s.scheme.psi(80.0).floor() - s.scheme.psi(0.0).ceil() + 1.0;
        assert_eq!(times.len() as f64, expected);
        assert!(times.len() >= 480);
        for &t in &times {
            let p = s.scheme.psi(t);
            assert!((p - p.round()).abs() <= 1e-10, "psi({t}) = {p}");
        }
    }

    #[test]
    fn non_monotone_scheme_is_rejected() {
        let s = SamplingScheme::<f64>::new(
            Arc::new(|t| t.sin()),
            Arc::new(|t| t.cos()),
            SchemeParams::new(0.0, 0.0),
        );
        assert!(matches!(
            sampling_times(&s, 0.0, 4.0),
            Err(Error::NonMonotone { .. })
        ));
    }

    #[test]
    fn sample_signal_composes() {
        let sig = ImtSignal::harmonic(1.0, 2.5);
        let set = sample_signal(&sig, &SamplingScheme::linear(6.0, 0.0), 0.0, 1.0).unwrap();
        assert_eq!(set.len(), 7);
        for (m, v) in set.values().iter().enumerate() {
            let expected = (std::f64::consts::TAU * 2.5 * m as f64 / 6.0).cos();
            assert!((v - expected).abs() < 1e-9);
        }
        let constant = ImtSignal::harmonic(1.0, 0.0);
        let set = sample_signal(&constant, &SamplingScheme::linear(3.7, 0.2), 0.0, 5.0).unwrap();
        assert!(set.values().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn isr_of_uniform_times_is_constant() {
        let times: Vec<f64> = (0..40).map(|i| i as f64 * 0.125).collect();
        let est = estimate_isr(&times).unwrap();
        let (lo, hi) = est.domain();
        for t in linspace(lo, hi, 200) {
            assert!((est.isr(t).unwrap() - 8.0).abs() < 1e-9);
            assert!((est.inf(t).unwrap() - 4.0).abs() < 1e-9);
        }
    }

    #[test]
    fn isr_estimate_tracks_fig1_rate() {
        let s = builtin_scenario::<f64>("fig1").unwrap();
        let times = sampling_times(&s.scheme, 0.0, 80.0).unwrap();
        let est = estimate_isr(&times).unwrap();
        let (lo, hi) = est.domain();
        let mut worst: f64 = 0.0;
        for t in linspace(lo + 1.0, hi - 1.0, 2000) {
            worst = worst.max((est.isr(t).unwrap() - s.scheme.psi_prime(t)).abs());
        }
        assert!(worst <= 0.1, "max deviation {worst}");
    }

    #[test]
    fn isr_estimate_needs_enough_times() {
        assert!(matches!(
            estimate_isr(&[0.0, 1.0, 2.0]),
            Err(Error::TooFewPoints { .. })
        ));
        assert!(matches!(
            estimate_isr(&[0.0, 1.0, 1.0, 2.0, 3.0, 4.0]),
            Err(Error::NotIncreasing { .. })
        ));
    }

    #[test]
    fn identifiability_of_identical_schemes() {
        let s = SamplingScheme::linear(2.0, 0.0);
        let rep = check_isr_identifiability(&s, &s, &linspace(0.0, 10.0, 1001)).unwrap();
        assert_eq!(rep.max_rate_deviation, 0.0);
        assert_eq!(rep.max_psi_deviation, 0.0);
    }

    #[test]
    fn identifiability_detects_different_times() {
        let a = SamplingScheme::linear(2.0, 0.0);
        let b = SamplingScheme::linear(2.0, 0.3);
        assert!(matches!(
            check_isr_identifiability(&a, &b, &linspace(0.0, 10.0, 101)),
            Err(Error::SampleTimesDiffer(_))
        ));
    }

    #[test]
    fn inr_margins() {
        let fig1 = BuiltinScenario::Fig1.spec().build::<f64>().unwrap();
        let grid = linspace(0.0, 80.0, 80_001);
        let rep = check_inr(&fig1.signal, &fig1.scheme, &grid);
        assert!((rep.min_margin - 1.0).abs() < 1e-6);
        assert!(!rep.warning);

        let fig2 = BuiltinScenario::Fig2.spec().build::<f64>().unwrap();
        let rep = check_inr(&fig2.signal, &fig2.scheme, &grid);
        assert!(rep.min_margin > 0.0);
        assert!(rep.min_margin >= 7.5 - 2.0 * (std::f64::consts::PI + 0.2) - 1e-9);

        let under = check_inr(
            &ImtSignal::harmonic(1.0, 3.0),
            &SamplingScheme::linear(4.0, 0.0),
            &linspace(0.0, 1.0, 11),
        );
        assert!((under.min_margin + 2.0).abs() < 1e-12);
        assert!(under.warning);
    }

    #[test]
    fn cumulative_integral_matches_closed_form() {
        let fig1 = BuiltinScenario::Fig1.spec().build::<f64>().unwrap();
        let rate_scheme = fig1.scheme.clone();
        let rate: Curve<f64> = Arc::new(move |t| rate_scheme.psi_prime(t));
        let numeric = SamplingScheme::from_rate(rate, 0.0, 80.0, 0.5);
        for t in linspace(0.0, 80.0, 333) {
            assert!((numeric.psi(t) - fig1.scheme.psi(t)).abs() < 1e-10);
        }
    }
}
