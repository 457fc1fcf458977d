use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Periodic computational grid on `[-L/2, L/2)^dim` with `n` modes per axis.
///
/// Wavenumbers follow FFT ordering: index `k` maps to `xi = 2*pi*k'/L` where
/// `k' = k` for `k < n/2` and `k' = k - n` otherwise. Cloning is cheap; the
/// transform plans are shared and thread-safe.
#[derive(Clone)]
pub struct Grid {
    inner: Arc<GridInner>,
}

struct GridInner {
    dim: usize,
    n: usize,
    len: f64,
    /// Signed wavenumber per FFT index.
    xi: Vec<f64>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Grid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Grid")
            .field("dim", &self.dim())
            .field("n", &self.modes_per_axis())
            .field("len", &self.length())
            .finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.dim() == other.dim()
            && self.modes_per_axis() == other.modes_per_axis()
            && self.length() == other.length()
    }
}

impl Grid {
    pub fn new_1d(n: usize, len: f64) -> Result<Self> {
        Self::new(1, n, len)
    }

    pub fn new_2d(n: usize, len: f64) -> Result<Self> {
        Self::new(2, n, len)
    }

    fn new(dim: usize, n: usize, len: f64) -> Result<Self> {
        if n < 8 || n % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "modes_per_axis must be even and >= 8, got {n}"
            )));
        }
        if !(len > 0.0) || !len.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "length_per_axis must be positive, got {len}"
            )));
        }
        let mut xi = Vec::with_capacity(n);
        let dxi = 2.0 * std::f64::consts::PI / len;
        for k in 0..n {
            let ks = if k < n / 2 { k as i64 } else { k as i64 - n as i64 };
            xi.push(ks as f64 * dxi);
        }
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        Ok(Grid {
            inner: Arc::new(GridInner { dim, n, len, xi, fwd, inv }),
        })
    }

    pub fn dim(&self) -> usize {
        self.inner.dim
    }

    pub fn modes_per_axis(&self) -> usize {
        self.inner.n
    }

    pub fn length(&self) -> f64 {
        self.inner.len
    }

    pub fn dx(&self) -> f64 {
        self.inner.len / self.inner.n as f64
    }

    /// Quadrature weight `dx^dim` of one grid cell.
    pub fn cell_volume(&self) -> f64 {
        self.dx().powi(self.inner.dim as i32)
    }

    /// Total number of grid points (`n` or `n^2`).
    pub fn point_count(&self) -> usize {
        match self.inner.dim {
            1 => self.inner.n,
            _ => self.inner.n * self.inner.n,
        }
    }

    /// Physical coordinate of sample `i` along one axis.
    pub fn coord(&self, i: usize) -> f64 {
        -0.5 * self.inner.len + i as f64 * self.dx()
    }

    /// Signed wavenumber of FFT index `k` along one axis.
    pub fn xi(&self, k: usize) -> f64 {
        self.inner.xi[k]
    }

    pub fn xi_axis(&self) -> &[f64] {
        &self.inner.xi
    }

    /// Signed integer frequency of FFT index `k`.
    pub fn freq(&self, k: usize) -> i64 {
        let n = self.inner.n as i64;
        let k = k as i64;
        if k < n / 2 {
            k
        } else {
            k - n
        }
    }

    /// Flat index of the 2D mode/sample `(iy, ix)`.
    pub fn idx2(&self, iy: usize, ix: usize) -> usize {
        iy * self.inner.n + ix
    }

    /// Wavenumber vector of a flat index: 1D gives `(xi, 0)`.
    pub fn xi_vec(&self, idx: usize) -> (f64, f64) {
        match self.inner.dim {
            1 => (self.inner.xi[idx], 0.0),
            _ => {
                let n = self.inner.n;
                (self.inner.xi[idx % n], self.inner.xi[idx / n])
            }
        }
    }

    pub fn xi_norm(&self, idx: usize) -> f64 {
        let (x, y) = self.xi_vec(idx);
        (x * x + y * y).sqrt()
    }

    /// Largest wavenumber magnitude representable along one axis.
    pub fn xi_max(&self) -> f64 {
        std::f64::consts::PI * self.inner.n as f64 / self.inner.len
    }

    /// Keep-mask for the dealias band: retains integer frequencies with
    /// `|k| <= floor(frac * n / 2)` per axis. `frac = 2/3` is the usual rule
    /// for quadratic products, `1/2` for triple products.
    pub fn band_keep(&self, frac: f64) -> Vec<bool> {
        let n = self.inner.n;
        let kmax = ((frac * n as f64) / 2.0).floor() as i64;
        let axis: Vec<bool> = (0..n).map(|k| self.freq(k).abs() <= kmax).collect();
        match self.inner.dim {
            1 => axis,
            _ => {
                let mut keep = vec![false; n * n];
                for iy in 0..n {
                    for ix in 0..n {
                        keep[iy * n + ix] = axis[iy] && axis[ix];
                    }
                }
                keep
            }
        }
    }

    pub(crate) fn fft_forward(&self, buf: &mut [Complex64]) {
        let mut scratch = vec![Complex64::default(); self.inner.fwd.get_inplace_scratch_len()];
        self.inner.fwd.process_with_scratch(buf, &mut scratch);
    }

    pub(crate) fn fft_inverse(&self, buf: &mut [Complex64]) {
        let mut scratch = vec![Complex64::default(); self.inner.inv.get_inplace_scratch_len()];
        self.inner.inv.process_with_scratch(buf, &mut scratch);
    }
}
