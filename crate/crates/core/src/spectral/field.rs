use num_complex::Complex64;

use super::grid::Grid;
use crate::error::{Error, Result};

/// Spectral representation of one real-valued field on a [`Grid`].
///
/// The transform pair is unitary (`1/sqrt(n)` per axis), so the discrete
/// Parseval identity holds without extra factors. Coefficients of a real
/// field are conjugate-symmetric; [`SpectralField::from_physical`] enforces
/// this explicitly so that the invariant survives round-offs in nonlinear
/// products.
#[derive(Clone, Debug)]
pub struct SpectralField {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: &Grid) -> Self {
        SpectralField {
            grid: grid.clone(),
            coeffs: vec![Complex64::default(); grid.point_count()],
        }
    }

    pub fn from_coeffs(grid: &Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.point_count() {
            return Err(Error::ShapeMismatch {
                got: coeffs.len(),
                expected: grid.point_count(),
            });
        }
        Ok(SpectralField { grid: grid.clone(), coeffs })
    }

    /// Forward transform of physical samples (row-major in 2D).
    pub fn from_physical(grid: &Grid, values: &[f64]) -> Result<Self> {
        if values.len() != grid.point_count() {
            return Err(Error::ShapeMismatch {
                got: values.len(),
                expected: grid.point_count(),
            });
        }
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        transform(grid, &mut buf, true);
        let mut field = SpectralField { grid: grid.clone(), coeffs: buf };
        field.symmetrize();
        Ok(field)
    }

    /// Backward transform; imaginary residue of the inverse FFT is dropped.
    pub fn to_physical(&self) -> Vec<f64> {
        let mut buf = self.coeffs.clone();
        transform(&self.grid, &mut buf, false);
        buf.iter().map(|c| c.re).collect()
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Zero-mode coefficient; equals `mean * sqrt(point_count)` under the
    /// unitary convention.
    pub fn zero_mode(&self) -> Complex64 {
        self.coeffs[0]
    }

    pub fn mean(&self) -> f64 {
        self.coeffs[0].re / (self.grid.point_count() as f64).sqrt()
    }

    /// Average conjugate-partner modes so the field represents a real
    /// function; the zero mode and Nyquist lines are forced real.
    pub fn symmetrize(&mut self) {
        let n = self.grid.modes_per_axis();
        match self.grid.dim() {
            1 => symmetrize_1d(&mut self.coeffs, n),
            _ => {
                // Pair (ky, kx) with (-ky, -kx), indices modulo n.
                for iy in 0..n {
                    let jy = (n - iy) % n;
                    for ix in 0..n {
                        let jx = (n - ix) % n;
                        let p = iy * n + ix;
                        let q = jy * n + jx;
                        if p > q {
                            continue;
                        }
                        if p == q {
                            self.coeffs[p] = Complex64::new(self.coeffs[p].re, 0.0);
                        } else {
                            let avg = 0.5 * (self.coeffs[p] + self.coeffs[q].conj());
                            self.coeffs[p] = avg;
                            self.coeffs[q] = avg.conj();
                        }
                    }
                }
            }
        }
    }

    /// Largest deviation from conjugate symmetry, for diagnostics.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.grid.modes_per_axis();
        let mut worst: f64 = 0.0;
        match self.grid.dim() {
            1 => {
                for k in 0..n {
                    let j = (n - k) % n;
                    let d = (self.coeffs[k] - self.coeffs[j].conj()).norm();
                    worst = worst.max(d);
                }
            }
            _ => {
                for iy in 0..n {
                    let jy = (n - iy) % n;
                    for ix in 0..n {
                        let jx = (n - ix) % n;
                        let d = (self.coeffs[iy * n + ix]
                            - self.coeffs[jy * n + jx].conj())
                        .norm();
                        worst = worst.max(d);
                    }
                }
            }
        }
        worst
    }

    /// Apply a per-mode complex factor given flat index.
    pub fn map_modes<F: FnMut(usize, Complex64) -> Complex64>(&self, mut f: F) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| f(i, c))
            .collect();
        SpectralField { grid: self.grid.clone(), coeffs }
    }

    /// Zero every mode outside the keep-mask.
    pub fn masked(&self, keep: &[bool]) -> Self {
        self.map_modes(|i, c| if keep[i] { c } else { Complex64::default() })
    }

    pub fn mask_in_place(&mut self, keep: &[bool]) {
        for (c, &k) in self.coeffs.iter_mut().zip(keep) {
            if !k {
                *c = Complex64::default();
            }
        }
    }

    /// Spectral derivative along `axis` (0 = x, 1 = y). The Nyquist line is
    /// zeroed: `i*xi` has no conjugate partner there.
    pub fn derivative(&self, axis: usize) -> Self {
        let n = self.grid.modes_per_axis() as i64;
        self.map_modes(|idx, c| {
            let (kx, ky) = match self.grid.dim() {
                1 => (self.grid.freq(idx), 0),
                _ => {
                    let nn = self.grid.modes_per_axis();
                    (self.grid.freq(idx % nn), self.grid.freq(idx / nn))
                }
            };
            let k = if axis == 0 { kx } else { ky };
            if k.abs() * 2 == n {
                return Complex64::default();
            }
            let xi = k as f64 * 2.0 * std::f64::consts::PI / self.grid.length();
            Complex64::new(0.0, xi) * c
        })
    }

    pub fn add(&self, other: &Self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        SpectralField { grid: self.grid.clone(), coeffs }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        SpectralField { grid: self.grid.clone(), coeffs }
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map_modes(|_, c| s * c)
    }

    /// `self += s * other`
    pub fn axpy(&mut self, s: f64, other: &Self) {
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += s * b;
        }
    }

    /// Discrete l2 norm of the coefficients (equals the l2 norm of samples).
    pub fn mode_l2(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }
}

fn symmetrize_1d(coeffs: &mut [Complex64], n: usize) {
    coeffs[0] = Complex64::new(coeffs[0].re, 0.0);
    coeffs[n / 2] = Complex64::new(coeffs[n / 2].re, 0.0);
    for k in 1..n / 2 {
        let j = n - k;
        let avg = 0.5 * (coeffs[k] + coeffs[j].conj());
        coeffs[k] = avg;
        coeffs[j] = avg.conj();
    }
}

/// In-place unitary FFT over every axis of the flat buffer.
fn transform(grid: &Grid, buf: &mut [Complex64], forward: bool) {
    let n = grid.modes_per_axis();
    let run = |g: &Grid, b: &mut [Complex64]| {
        if forward {
            g.fft_forward(b)
        } else {
            g.fft_inverse(b)
        }
    };
    match grid.dim() {
        1 => run(grid, buf),
        _ => {
            for row in buf.chunks_mut(n) {
                run(grid, row);
            }
            let mut col = vec![Complex64::default(); n];
            for ix in 0..n {
                for iy in 0..n {
                    col[iy] = buf[iy * n + ix];
                }
                run(grid, &mut col);
                for iy in 0..n {
                    buf[iy * n + ix] = col[iy];
                }
            }
        }
    }
    let scale = 1.0 / (n as f64).sqrt().powi(grid.dim() as i32);
    for c in buf.iter_mut() {
        *c *= scale;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid1(n: usize, l: f64) -> Grid {
        Grid::new_1d(n, l).unwrap()
    }

    #[test]
    fn constant_field_has_only_zero_mode() {
        let g = grid1(64, 10.0);
        let c = 2.5;
        let f = SpectralField::from_physical(&g, &vec![c; 64]).unwrap();
        assert!((f.coeffs()[0].re - c * 64f64.sqrt()).abs() < 1e-12);
        for k in 1..64 {
            assert!(f.coeffs()[k].norm() < 1e-12, "mode {k} leaked");
        }
    }

    #[test]
    fn single_cosine_round_trips() {
        let g = grid1(32, 2.0 * std::f64::consts::PI);
        let vals: Vec<f64> = (0..32).map(|i| (g.coord(i)).cos()).collect();
        let f = SpectralField::from_physical(&g, &vals).unwrap();
        let back = f.to_physical();
        for (a, b) in vals.iter().zip(&back) {
            assert!((a - b).abs() < 1e-13);
        }
        // Only |k| = 1 is populated.
        for k in 0..32 {
            let expect = g.freq(k).abs() == 1;
            assert_eq!(f.coeffs()[k].norm() > 1e-10, expect, "mode {k}");
        }
    }

    #[test]
    fn parseval_holds_on_random_field_1d_and_2d() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for dim in [1usize, 2] {
            let g = if dim == 1 {
                grid1(128, 17.0)
            } else {
                Grid::new_2d(32, 9.0).unwrap()
            };
            let vals: Vec<f64> = (0..g.point_count())
                .map(|_| rng.random_range(-1.0..1.0))
                .collect();
            let f = SpectralField::from_physical(&g, &vals).unwrap();
            let phys: f64 = vals.iter().map(|v| v * v).sum();
            let spec: f64 = f.coeffs().iter().map(|c| c.norm_sqr()).sum();
            assert!(
                (phys - spec).abs() <= 1e-12 * phys,
                "dim {dim}: {phys} vs {spec}"
            );
        }
    }

    #[test]
    fn round_trip_relative_error_small() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for n in [8usize, 64, 256, 1024] {
            let g = grid1(n, 3.0 + n as f64);
            let vals: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let f = SpectralField::from_physical(&g, &vals).unwrap();
            let back = f.to_physical();
            let num: f64 = vals
                .iter()
                .zip(&back)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            let den: f64 = vals.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!(num <= 1e-13 * den, "n = {n}: rel err {}", num / den);
        }
    }

    #[test]
    fn shape_mismatch_rejected() {
        let g = grid1(16, 1.0);
        assert!(matches!(
            SpectralField::from_physical(&g, &[0.0; 15]),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn derivative_of_sine_is_cosine() {
        let g = grid1(64, 2.0 * std::f64::consts::PI);
        let vals: Vec<f64> = (0..64).map(|i| g.coord(i).sin()).collect();
        let f = SpectralField::from_physical(&g, &vals).unwrap();
        let d = f.derivative(0).to_physical();
        for (i, v) in d.iter().enumerate() {
            assert!((v - g.coord(i).cos()).abs() < 1e-12);
        }
    }
}
