use std::sync::Arc;

use num_complex::Complex64;

use super::field::SpectralField;
use crate::error::{Error, Result};

/// Extra factor applied on top of a radial symbol.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ModeFactor {
    None,
    /// `i * xi_j / |xi|`, the j-th Riesz component; zero mode maps to 0.
    Riesz(usize),
    /// `i * sgn(xi)` in 1D (the Hilbert-transform factor); zero mode to 0.
    SignD,
}

/// A radial Fourier multiplier `m(|xi|)` with a declared zero-mode value and
/// an optional vector factor.
#[derive(Clone)]
pub struct MultiplierSpec {
    symbol: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    zero_mode: f64,
    factor: ModeFactor,
}

impl MultiplierSpec {
    pub fn radial<F: Fn(f64) -> f64 + Send + Sync + 'static>(symbol: F) -> Self {
        let zero = symbol(0.0);
        MultiplierSpec {
            symbol: Arc::new(symbol),
            zero_mode: zero,
            factor: ModeFactor::None,
        }
    }

    /// Override the value used at `xi = 0` (for symbols singular at the
    /// origin, e.g. negative powers of `|xi|`).
    pub fn with_zero_mode(mut self, value: f64) -> Self {
        self.zero_mode = value;
        self
    }

    pub fn with_factor(mut self, factor: ModeFactor) -> Self {
        self.factor = factor;
        self
    }

    pub fn identity() -> Self {
        Self::radial(|_| 1.0)
    }

    /// Bessel potential `(1 + a |xi|^2)^(s/2)`.
    pub fn bessel(a: f64, s: f64) -> Self {
        Self::radial(move |r| (1.0 + a * r * r).powf(0.5 * s))
    }

    /// `|xi|^s`, zero mode set to 0 for `s < 0` wouldn't be finite, so it is
    /// declared explicitly (0 unless `s == 0`).
    pub fn power(s: f64) -> Self {
        let zero = if s == 0.0 { 1.0 } else { 0.0 };
        Self::radial(move |r| r.powf(s)).with_zero_mode(zero)
    }

    pub fn eval(&self, radius: f64) -> f64 {
        if radius == 0.0 {
            self.zero_mode
        } else {
            (self.symbol)(radius)
        }
    }
}

impl std::fmt::Debug for MultiplierSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MultiplierSpec")
            .field("zero_mode", &self.zero_mode)
            .field("factor", &self.factor)
            .finish()
    }
}

/// Apply a radial multiplier to one field. Errors if the symbol is not
/// finite at some grid wavenumber.
pub fn apply_multiplier(sf: &SpectralField, m: &MultiplierSpec) -> Result<SpectralField> {
    let grid = sf.grid().clone();
    let mut bad: Option<f64> = None;
    let out = sf.map_modes(|idx, c| {
        let (kx, ky) = grid.xi_vec(idx);
        let r = (kx * kx + ky * ky).sqrt();
        let v = m.eval(r);
        if !v.is_finite() && bad.is_none() {
            bad = Some(r);
        }
        let base = v * c;
        match m.factor {
            ModeFactor::None => base,
            ModeFactor::Riesz(j) => {
                if r == 0.0 {
                    Complex64::default()
                } else {
                    let comp = if j == 0 { kx } else { ky };
                    Complex64::new(0.0, comp / r) * base
                }
            }
            ModeFactor::SignD => {
                if kx == 0.0 {
                    Complex64::default()
                } else {
                    Complex64::new(0.0, kx.signum()) * base
                }
            }
        }
    });
    match bad {
        Some(radius) => Err(Error::NonFiniteSymbol { radius }),
        None => Ok(out),
    }
}

/// Gradient part of the Hodge-Weyl splitting: `(grad grad / Delta) . V`.
/// The zero mode is sent to 0 (the mean of V is unassigned by grad/Delta).
pub fn riesz_gradient_projector(
    vx: &SpectralField,
    vy: &SpectralField,
) -> Result<(SpectralField, SpectralField)> {
    hodge_project(vx, vy, false)
}

/// Rotational part: `(grad^perp grad^perp / Delta) . V` with
/// `grad^perp = (-d2, d1)`. Zero mode to 0.
pub fn riesz_rotational_projector(
    vx: &SpectralField,
    vy: &SpectralField,
) -> Result<(SpectralField, SpectralField)> {
    hodge_project(vx, vy, true)
}

fn hodge_project(
    vx: &SpectralField,
    vy: &SpectralField,
    rotational: bool,
) -> Result<(SpectralField, SpectralField)> {
    let grid = vx.grid().clone();
    if grid.dim() != 2 {
        return Err(Error::WrongDimension { required: 2 });
    }
    let mut ox = SpectralField::zeros(&grid);
    let mut oy = SpectralField::zeros(&grid);
    for idx in 0..grid.point_count() {
        let (kx, ky) = grid.xi_vec(idx);
        let r2 = kx * kx + ky * ky;
        if r2 == 0.0 {
            continue;
        }
        let a = vx.coeffs()[idx];
        let b = vy.coeffs()[idx];
        if rotational {
            // xi_perp (xi_perp . V) / |xi|^2 with xi_perp = (-ky, kx)
            let dot = -ky * a + kx * b;
            ox.coeffs_mut()[idx] = -ky * dot / r2;
            oy.coeffs_mut()[idx] = kx * dot / r2;
        } else {
            let dot = kx * a + ky * b;
            ox.coeffs_mut()[idx] = kx * dot / r2;
            oy.coeffs_mut()[idx] = ky * dot / r2;
        }
    }
    Ok((ox, oy))
}

/// Divergence of a 2D vector field, spectrally.
pub fn divergence(vx: &SpectralField, vy: &SpectralField) -> SpectralField {
    vx.derivative(0).add(&vy.derivative(1))
}

/// Scalar curl `grad^perp . V = -d2 Vx + d1 Vy`.
pub fn curl(vx: &SpectralField, vy: &SpectralField) -> SpectralField {
    vy.derivative(0).sub(&vx.derivative(1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::grid::Grid;
    use rand::{Rng, SeedableRng};

    #[test]
    fn single_mode_symbol_value() {
        // exp(ix) under (1 + r^2/3)^(-1/2) with mu = 1 picks up sqrt(3/4).
        let g = Grid::new_1d(64, 2.0 * std::f64::consts::PI).unwrap();
        let vals: Vec<f64> = (0..64).map(|i| g.coord(i).cos()).collect();
        let f = SpectralField::from_physical(&g, &vals).unwrap();
        let m = MultiplierSpec::radial(|r| (1.0 + r * r / 3.0).powf(-0.5));
        let out = apply_multiplier(&f, &m).unwrap().to_physical();
        let expect = (3.0f64 / 4.0).sqrt();
        for (i, v) in out.iter().enumerate() {
            assert!((v - expect * g.coord(i).cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_multiplier_is_identity() {
        let g = Grid::new_1d(32, 5.0).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let vals: Vec<f64> = (0..32).map(|_| rng.random_range(-1.0..1.0)).collect();
        let f = SpectralField::from_physical(&g, &vals).unwrap();
        let out = apply_multiplier(&f, &MultiplierSpec::identity()).unwrap();
        for (a, b) in f.coeffs().iter().zip(out.coeffs()) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn bessel_chain_cancels() {
        let g = Grid::new_1d(128, 11.0).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let vals: Vec<f64> = (0..128).map(|_| rng.random_range(-1.0..1.0)).collect();
        let f = SpectralField::from_physical(&g, &vals).unwrap();
        let down = apply_multiplier(&f, &MultiplierSpec::bessel(1.0, -2.0)).unwrap();
        let up = apply_multiplier(&down, &MultiplierSpec::bessel(1.0, 2.0)).unwrap();
        let diff: f64 = f
            .coeffs()
            .iter()
            .zip(up.coeffs())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(diff <= 1e-12 * f.mode_l2());
    }

    #[test]
    fn non_finite_symbol_reported() {
        let g = Grid::new_1d(16, 1.0).unwrap();
        let f = SpectralField::from_physical(&g, &vec![1.0; 16]).unwrap();
        let m = MultiplierSpec::radial(|r| 1.0 / (r - r)); // NaN everywhere
        assert!(matches!(
            apply_multiplier(&f, &m),
            Err(Error::NonFiniteSymbol { .. })
        ));
    }

    fn random_mean_free_pair(
        g: &Grid,
        seed: u64,
    ) -> (SpectralField, SpectralField) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let n = g.point_count();
        let mk = |rng: &mut rand_chacha::ChaCha8Rng| {
            let vals: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let mean = vals.iter().sum::<f64>() / n as f64;
            let vals: Vec<f64> = vals.iter().map(|v| v - mean).collect();
            SpectralField::from_physical(g, &vals).unwrap()
        };
        (mk(&mut rng), mk(&mut rng))
    }

    #[test]
    fn projectors_split_the_identity() {
        let g = Grid::new_2d(32, 7.0).unwrap();
        let (vx, vy) = random_mean_free_pair(&g, 17);
        let (gx, gy) = riesz_gradient_projector(&vx, &vy).unwrap();
        let (rx, ry) = riesz_rotational_projector(&vx, &vy).unwrap();
        let defect = gx
            .add(&rx)
            .sub(&vx)
            .mode_l2()
            .max(gy.add(&ry).sub(&vy).mode_l2());
        assert!(defect <= 1e-12 * (vx.mode_l2() + vy.mode_l2()));
        // Idempotent and mutually annihilating.
        let (ggx, ggy) = riesz_gradient_projector(&gx, &gy).unwrap();
        assert!(ggx.sub(&gx).mode_l2().max(ggy.sub(&gy).mode_l2()) < 1e-12);
        let (cross_x, cross_y) = riesz_rotational_projector(&gx, &gy).unwrap();
        assert!(cross_x.mode_l2().max(cross_y.mode_l2()) < 1e-12);
        // Gradient part is curl-free spectrally.
        assert!(curl(&gx, &gy).mode_l2() < 1e-12);
    }

    #[test]
    fn pure_gradient_field_is_fixed() {
        let g = Grid::new_2d(48, 20.0).unwrap();
        // phi = mean-free Gaussian, V = grad phi.
        let n = g.modes_per_axis();
        let mut vals = vec![0.0; g.point_count()];
        for iy in 0..n {
            for ix in 0..n {
                let (x, y) = (g.coord(ix), g.coord(iy));
                vals[g.idx2(iy, ix)] = (-(x * x + y * y)).exp();
            }
        }
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        for v in vals.iter_mut() {
            *v -= mean;
        }
        let phi = SpectralField::from_physical(&g, &vals).unwrap();
        let (vx, vy) = (phi.derivative(0), phi.derivative(1));
        let (gx, gy) = riesz_gradient_projector(&vx, &vy).unwrap();
        let (rx, ry) = riesz_rotational_projector(&vx, &vy).unwrap();
        assert!(gx.sub(&vx).mode_l2().max(gy.sub(&vy).mode_l2()) < 1e-12);
        assert!(rx.mode_l2().max(ry.mode_l2()) < 1e-12);
    }

    #[test]
    fn pure_rotational_field_is_fixed() {
        let g = Grid::new_2d(48, 20.0).unwrap();
        let n = g.modes_per_axis();
        let mut vals = vec![0.0; g.point_count()];
        for iy in 0..n {
            for ix in 0..n {
                let (x, y) = (g.coord(ix), g.coord(iy));
                vals[g.idx2(iy, ix)] = (-(x * x + y * y) / 2.0).exp();
            }
        }
        let psi = SpectralField::from_physical(&g, &vals).unwrap();
        // V = grad^perp psi = (-d2 psi, d1 psi)
        let vx = psi.derivative(1).scale(-1.0);
        let vy = psi.derivative(0);
        let (rx, ry) = riesz_rotational_projector(&vx, &vy).unwrap();
        assert!(rx.sub(&vx).mode_l2().max(ry.sub(&vy).mode_l2()) < 1e-12);
    }

    #[test]
    fn projector_on_1d_grid_rejected() {
        let g = Grid::new_1d(16, 1.0).unwrap();
        let f = SpectralField::zeros(&g);
        assert!(riesz_gradient_projector(&f, &f).is_err());
    }
}
