use crate::error::{Error, Result};
use crate::sampling::SampleSet;
use crate::scalar::Real;

use super::Interpolant;

/// Monotone piecewise cubic Hermite interpolant (Fritsch–Carlson slopes).
#[derive(Debug, Clone, PartialEq)]
pub struct PchipInterpolant<T> {
    times: Vec<T>,
    values: Vec<T>,
    slopes: Vec<T>,
}

impl<T: Real> PchipInterpolant<T> {
    pub fn slopes(&self) -> &[T] {
        &self.slopes
    }
}

fn same_sign<T: Real>(a: T, b: T) -> bool {
    (a > T::zero() && b > T::zero()) || (a < T::zero() && b < T::zero())
}

/// One-sided three-point end slope, limited to preserve shape.
fn end_slope<T: Real>(h0: T, h1: T, d0: T, d1: T) -> T {
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    let s = ((two * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if !same_sign(s, d0) {
        T::zero()
    } else if !same_sign(d0, d1) && s.abs() > three * d0.abs() {
        three * d0
    } else {
        s
    }
}

/// `interpolate_pchip`.
pub fn interpolate_pchip<T: Real>(samples: &SampleSet<T>) -> Result<PchipInterpolant<T>> {
    let t = samples.times();
    let y = samples.values();
    let count = t.len();
    if count < 3 {
        return Err(Error::TooFewPoints {
            needed: 3,
            got: count,
        });
    }
    let h: Vec<T> = t.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<T> = y
        .windows(2)
        .zip(&h)
        .map(|(w, &hk)| (w[1] - w[0]) / hk)
        .collect();
    let two = T::lit(2.0);
    let mut slopes = vec![T::zero(); count];
    for k in 1..count - 1 {
        let (dl, dr) = (delta[k - 1], delta[k]);
        if same_sign(dl, dr) {
            let w1 = two * h[k] + h[k - 1];
            let w2 = h[k] + two * h[k - 1];
            slopes[k] = (w1 + w2) / (w1 / dl + w2 / dr);
        }
    }
    slopes[0] = end_slope(h[0], h[1], delta[0], delta[1]);
    let m = count - 1;
    slopes[m] = end_slope(h[m - 1], h[m - 2], delta[m - 1], delta[m - 2]);
    Ok(PchipInterpolant {
        times: t.to_vec(),
        values: y.to_vec(),
        slopes,
    })
}

impl<T: Real> Interpolant<T> for PchipInterpolant<T> {
    fn domain(&self) -> (T, T) {
        (self.times[0], self.times[self.times.len() - 1])
    }

    fn eval(&self, x: T) -> Result<T> {
        let (lo, hi) = self.domain();
        if !(x >= lo && x <= hi) {
            return Err(Error::OutOfDomain {
                x: x.to_f64_lossy(),
                lo: lo.to_f64_lossy(),
                hi: hi.to_f64_lossy(),
            });
        }
        let k = self
            .times
            .partition_point(|&tk| tk <= x)
            .saturating_sub(1)
            .min(self.times.len() - 2);
        let h = self.times[k + 1] - self.times[k];
        let s = (x - self.times[k]) / h;
        let (one, two, three) = (T::one(), T::lit(2.0), T::lit(3.0));
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = two * s3 - three * s2 + one;
        let h10 = s3 - two * s2 + s;
        let h01 = -two * s3 + three * s2;
        let h11 = s3 - s2;
        Ok(h00 * self.values[k]
            + h10 * h * self.slopes[k]
            + h01 * self.values[k + 1]
            + h11 * h * self.slopes[k + 1])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::linspace;

    #[test]
    fn no_overshoot_on_plateau() {
        let s = SampleSet::new(vec![0.0, 1.0, 2.0, 3.0], vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        let p = interpolate_pchip(&s).unwrap();
        for x in linspace(1.0, 2.0, 1001) {
            assert!(p.eval(x).unwrap() <= 1.0 + 1e-15);
        }
    }

    #[test]
    fn constant_stays_constant() {
        let s = SampleSet::new(vec![0.0f64, 0.4, 1.9, 2.0, 5.0], vec![2.5; 5]).unwrap();
        let p = interpolate_pchip(&s).unwrap();
        for x in linspace(0.0, 5.0, 333) {
            assert!((p.eval(x).unwrap() - 2.5).abs() < 1e-14);
        }
    }

    #[test]
    fn monotone_data_gives_monotone_curve() {
        let times = vec![0.0, 0.3, 0.35, 1.2, 2.0, 2.1, 4.0];
        let values = vec![-1.0, 0.0, 3.0, 3.1, 7.0, 7.0, 9.0];
        let p = interpolate_pchip(&SampleSet::new(times, values).unwrap()).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for x in linspace(0.0, 4.0, 5001) {
            let v = p.eval(x).unwrap();
            assert!(v >= prev - 1e-12);
            prev = v;
        }
    }

    #[test]
    fn needs_three_points() {
        let s = SampleSet::new(vec![0.0, 1.0], vec![0.0, 1.0]).unwrap();
        assert!(interpolate_pchip(&s).is_err());
    }
}
