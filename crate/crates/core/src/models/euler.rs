use super::ops::product;
use crate::error::{Error, Result};
use crate::spectral::{Grid, SpectralField};

/// Velocity from vorticity on the torus: `u = grad^perp (Delta^{-1} omega)`
/// with the zero mode of `u` set to 0.
pub fn biot_savart(omega: &SpectralField) -> Result<(SpectralField, SpectralField)> {
    let grid = omega.grid().clone();
    if grid.dim() != 2 {
        return Err(Error::WrongDimension { required: 2 });
    }
    let mut ux = SpectralField::zeros(&grid);
    let mut uy = SpectralField::zeros(&grid);
    for idx in 0..grid.point_count() {
        let (kx, ky) = grid.xi_vec(idx);
        let r2 = kx * kx + ky * ky;
        if r2 == 0.0 {
            continue;
        }
        let psi = -omega.coeffs()[idx] / r2;
        // u = (-dy psi, dx psi)
        ux.coeffs_mut()[idx] = -num_complex::Complex64::new(0.0, ky) * psi;
        uy.coeffs_mut()[idx] = num_complex::Complex64::new(0.0, kx) * psi;
    }
    Ok((ux, uy))
}

/// Right-hand side of the vorticity equation: `-(u . grad) omega` with
/// `u` recovered by Biot-Savart, dealiased with the 2/3 rule.
pub fn euler2d_rhs(omega: &SpectralField) -> Result<SpectralField> {
    let grid = omega.grid().clone();
    if grid.dim() != 2 {
        return Err(Error::WrongDimension { required: 2 });
    }
    let keep = grid.band_keep(2.0 / 3.0);
    let om = omega.masked(&keep);
    let (ux, uy) = biot_savart(&om)?;
    let ux_p = ux.to_physical();
    let uy_p = uy.to_physical();
    let dx = om.derivative(0).to_physical();
    let dy = om.derivative(1).to_physical();
    let adv = product(&grid, &ux_p, &dx, &keep).add(&product(&grid, &uy_p, &dy, &keep));
    Ok(adv.scale(-1.0))
}
