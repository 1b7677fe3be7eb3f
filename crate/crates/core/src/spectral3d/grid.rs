use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use thiserror::Error;

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum GridError {
    #[error("modes per dimension must be even and at least 4, got {0}")]
    InvalidSize(usize),
}

/// Fourier grid on the unit periodic cube with `n` modes per dimension.
///
/// Mode index `i` carries wavenumber `i` for `i ≤ n/2` and `i − n` otherwise;
/// the physical wavevector is `2π k`. The Nyquist planes (`|k_d| = n/2`) are
/// kept at zero. Nonlinear products are formed on a `3n/2` padded grid.
#[derive(Clone)]
pub struct FourierGrid {
    n: usize,
    m: usize,
    fwd_n: Arc<dyn Fft<f64>>,
    inv_n: Arc<dyn Fft<f64>>,
    fwd_m: Arc<dyn Fft<f64>>,
    inv_m: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for FourierGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FourierGrid").field("n", &self.n).field("padded", &self.m).finish()
    }
}

impl FourierGrid {
    pub fn new(n: usize) -> Result<Self, GridError> {
        if n < 4 || n % 2 != 0 {
            return Err(GridError::InvalidSize(n));
        }
        let m = 3 * n / 2;
        let mut planner = FftPlanner::new();
        Ok(Self {
            n,
            m,
            fwd_n: planner.plan_fft_forward(n),
            inv_n: planner.plan_fft_inverse(n),
            fwd_m: planner.plan_fft_forward(m),
            inv_m: planner.plan_fft_inverse(m),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn padded(&self) -> usize {
        self.m
    }

    /// Complex coefficients per vector field (3 components).
    pub fn coeff_len(&self) -> usize {
        3 * self.n * self.n * self.n
    }

    #[inline]
    pub fn index(&self, c: usize, i: usize, j: usize, l: usize) -> usize {
        ((c * self.n + i) * self.n + j) * self.n + l
    }

    #[inline]
    pub fn wavenumber(&self, i: usize) -> i64 {
        if i <= self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    /// Index of wavenumber `k` (any integer) on the unpadded grid.
    #[inline]
    pub fn mode_index(&self, k: i64) -> usize {
        k.rem_euclid(self.n as i64) as usize
    }

    #[inline]
    pub fn is_nyquist(&self, i: usize, j: usize, l: usize) -> bool {
        let h = self.n / 2;
        i == h || j == h || l == h
    }

    /// Integer wavevector of a mode.
    #[inline]
    pub fn k(&self, i: usize, j: usize, l: usize) -> [i64; 3] {
        [self.wavenumber(i), self.wavenumber(j), self.wavenumber(l)]
    }

    /// Physical wavevector `2πk`.
    #[inline]
    pub fn kappa(&self, i: usize, j: usize, l: usize) -> [f64; 3] {
        let k = self.k(i, j, l);
        let tp = 2.0 * std::f64::consts::PI;
        [tp * k[0] as f64, tp * k[1] as f64, tp * k[2] as f64]
    }

    /// Iterates over `(i, j, l)` of all scalar modes.
    pub fn modes(&self) -> impl Iterator<Item = (usize, usize, usize)> {
        let n = self.n;
        (0..n).flat_map(move |i| (0..n).flat_map(move |j| (0..n).map(move |l| (i, j, l))))
    }

    /// In-place 3D transform of an `s³` scalar block, `s ∈ {n, 3n/2}`.
    /// Forward transforms are normalized by `1/s³`.
    pub(crate) fn fft3(&self, data: &mut [Complex64], padded: bool, inverse: bool) {
        let (s, plan) = match (padded, inverse) {
            (false, false) => (self.n, &self.fwd_n),
            (false, true) => (self.n, &self.inv_n),
            (true, false) => (self.m, &self.fwd_m),
            (true, true) => (self.m, &self.inv_m),
        };
        debug_assert_eq!(data.len(), s * s * s);
        // last axis is contiguous
        plan.process(data);
        let mut line = vec![Complex64::new(0.0, 0.0); s];
        for i in 0..s {
            for l in 0..s {
                for j in 0..s {
                    line[j] = data[(i * s + j) * s + l];
                }
                plan.process(&mut line);
                for j in 0..s {
                    data[(i * s + j) * s + l] = line[j];
                }
            }
        }
        for j in 0..s {
            for l in 0..s {
                for i in 0..s {
                    line[i] = data[(i * s + j) * s + l];
                }
                plan.process(&mut line);
                for i in 0..s {
                    data[(i * s + j) * s + l] = line[i];
                }
            }
        }
        if !inverse {
            let scale = 1.0 / (s * s * s) as f64;
            data.iter_mut().for_each(|z| *z *= scale);
        }
    }
}
