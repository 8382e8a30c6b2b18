//! Banded LU factorization with partial pivoting (LAPACK `gbtrf`/`gbtrs` layout
//! semantics) and a Hager–Higham 1-norm condition estimate.

use crate::scalar::Real;

/// Square matrix with `kl` sub- and `ku` super-diagonals.
///
/// Row `i` stores columns `i - kl ..= i + ku + kl`; the extra `kl` slots hold the
/// fill-in created by row interchanges.
#[derive(Debug, Clone)]
pub struct BandedMatrix<T> {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<T>,
}

impl<T: Real> BandedMatrix<T> {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        Self {
            n,
            kl,
            ku,
            width,
            data: vec![T::zero(); n * width],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> usize {
        debug_assert!(j + self.kl >= i && j <= i + self.ku + self.kl);
        i * self.width + (j + self.kl - i)
    }

    #[inline]
    fn in_band(&self, i: usize, j: usize) -> bool {
        j + self.kl >= i && j <= i + self.ku
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        if i < self.n && j < self.n && self.in_band(i, j) {
            self.data[self.slot(i, j)]
        } else {
            T::zero()
        }
    }

    /// Sets an entry inside the declared band; panics outside it.
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        assert!(i < self.n && j < self.n && self.in_band(i, j), "({i}, {j}) outside band");
        let s = self.slot(i, j);
        self.data[s] = v;
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.kl);
                let hi = (i + self.ku).min(self.n - 1);
                (lo..=hi).map(|j| self.get(i, j) * x[j]).sum()
            })
            .collect()
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> T {
        let mut sums = vec![T::zero(); self.n];
        for i in 0..self.n {
            let lo = i.saturating_sub(self.kl);
            let hi = (i + self.ku).min(self.n - 1);
            for (j, s) in sums.iter_mut().enumerate().take(hi + 1).skip(lo) {
                *s += self.get(i, j).abs();
            }
        }
        sums.into_iter().fold(T::zero(), T::max)
    }

    /// Factorizes in place. Pivot ties go to the lowest row, so the result is
    /// bit-reproducible.
    pub fn factor(mut self) -> BandedLu<T> {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        let mut piv = vec![0usize; n];
        let mut singular_at = None;
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let last_col = (k + kl + ku).min(n - 1);
            let mut p = k;
            let mut best = self.data[self.slot(k, k)].abs();
            for r in k + 1..=last_row {
                let v = self.data[self.slot(r, k)].abs();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            piv[k] = p;
            if best == T::zero() {
                singular_at.get_or_insert(k);
                continue;
            }
            if p != k {
                for j in k..=last_col {
                    let (a, b) = (self.slot(k, j), self.slot(p, j));
                    self.data.swap(a, b);
                }
            }
            let pivot = self.data[self.slot(k, k)];
            for r in k + 1..=last_row {
                let s = self.slot(r, k);
                let l = self.data[s] / pivot;
                self.data[s] = l;
                if l == T::zero() {
                    continue;
                }
                for j in k + 1..=last_col {
                    let upper = self.data[self.slot(k, j)];
                    let t = self.slot(r, j);
                    self.data[t] -= l * upper;
                }
            }
        }
        BandedLu {
            lu: self,
            piv,
            singular_at,
        }
    }
}

/// Result of [`BandedMatrix::factor`].
#[derive(Debug, Clone)]
pub struct BandedLu<T> {
    lu: BandedMatrix<T>,
    piv: Vec<usize>,
    singular_at: Option<usize>,
}

impl<T: Real> BandedLu<T> {
    /// First elimination step that met an exactly zero pivot column.
    pub fn singular_at(&self) -> Option<usize> {
        self.singular_at
    }

    /// Row whose diagonal of `U` is smallest in magnitude.
    pub fn weakest_pivot(&self) -> usize {
        (0..self.lu.n)
            .min_by(|&a, &b| {
                self.pivot(a)
                    .abs()
                    .partial_cmp(&self.pivot(b).abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap_or(0)
    }

    fn pivot(&self, k: usize) -> T {
        self.lu.data[self.lu.slot(k, k)]
    }

    fn span(&self, k: usize) -> usize {
        (k + self.lu.kl + self.lu.ku).min(self.lu.n - 1)
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.lu.n;
        let kl = self.lu.kl;
        let mut x = b.to_vec();
        for k in 0..n {
            x.swap(k, self.piv[k]);
            let xk = x[k];
            for r in k + 1..=(k + kl).min(n - 1) {
                x[r] -= self.lu.data[self.lu.slot(r, k)] * xk;
            }
        }
        for k in (0..n).rev() {
            let mut acc = x[k];
            for j in k + 1..=self.span(k) {
                acc -= self.lu.data[self.lu.slot(k, j)] * x[j];
            }
            x[k] = acc / self.pivot(k);
        }
        x
    }

    /// Solves `Aᵀ x = b`.
    pub fn solve_transpose(&self, b: &[T]) -> Vec<T> {
        let n = self.lu.n;
        let (kl, ku) = (self.lu.kl, self.lu.ku);
        let mut x = b.to_vec();
        for k in 0..n {
            let mut acc = x[k];
            for j in k.saturating_sub(kl + ku)..k {
                acc -= self.lu.data[self.lu.slot(j, k)] * x[j];
            }
            x[k] = acc / self.pivot(k);
        }
        for k in (0..n).rev() {
            let mut acc = x[k];
            for r in k + 1..=(k + kl).min(n - 1) {
                acc -= self.lu.data[self.lu.slot(r, k)] * x[r];
            }
            x[k] = acc;
            x.swap(k, self.piv[k]);
        }
        x
    }

    /// Estimate of `‖A⁻¹‖₁` (Hager's method with Higham's alternating-sign
    /// safeguard).
    pub fn inverse_norm_one_estimate(&self) -> T {
        let n = self.lu.n;
        let nf = T::from_usize_lossy(n);
        let mut x = vec![T::one() / nf; n];
        let mut estimate = T::zero();
        let mut last_j = usize::MAX;
        for _ in 0..5 {
            let y = self.solve(&x);
            estimate = y.iter().map(|v| v.abs()).sum();
            let sign: Vec<T> = y
                .iter()
                .map(|&v| if v >= T::zero() { T::one() } else { -T::one() })
                .collect();
            let z = self.solve_transpose(&sign);
            let (j, zmax) = z
                .iter()
                .enumerate()
                .fold((0, T::neg_infinity()), |(bj, bv), (i, v)| {
                    if v.abs() > bv {
                        (i, v.abs())
                    } else {
                        (bj, bv)
                    }
                });
            let ztx: T = z.iter().zip(&x).map(|(a, b)| *a * *b).sum();
            if zmax <= ztx || j == last_j {
                break;
            }
            last_j = j;
            x = vec![T::zero(); n];
            x[j] = T::one();
        }
        let alt: Vec<T> = (0..n)
            .map(|i| {
                let mag = T::one() + T::from_usize_lossy(i) / T::from_usize_lossy(n.max(2) - 1);
                if i % 2 == 0 {
                    mag
                } else {
                    -mag
                }
            })
            .collect();
        let y = self.solve(&alt);
        let alt_est = T::lit(2.0) * y.iter().map(|v| v.abs()).sum::<T>() / (T::lit(3.0) * nf);
        estimate.max(alt_est)
    }
}
