use crate::spectral::{Grid, SpectralField};

use super::state::Velocity;

/// Pseudospectral product: multiply sample values, transform back, restrict
/// to the dealias band. Inputs are expected to be band-limited already.
pub fn product(grid: &Grid, a: &[f64], b: &[f64], keep: &[bool]) -> SpectralField {
    let vals: Vec<f64> = a.iter().zip(b).map(|(x, y)| x * y).collect();
    let mut f = SpectralField::from_physical(grid, &vals).expect("matching shapes");
    f.mask_in_place(keep);
    f
}

/// Like [`product`] but also reports the relative spectral mass that the
/// product placed outside the kept band (the dealias spill diagnostic).
pub fn product_with_spill(
    grid: &Grid,
    a: &[f64],
    b: &[f64],
    keep: &[bool],
) -> (SpectralField, f64) {
    let vals: Vec<f64> = a.iter().zip(b).map(|(x, y)| x * y).collect();
    let full = SpectralField::from_physical(grid, &vals).expect("matching shapes");
    let mut outside = 0.0;
    let mut total = 0.0;
    for (i, c) in full.coeffs().iter().enumerate() {
        let e = c.norm_sqr();
        total += e;
        if !keep[i] {
            outside += e;
        }
    }
    let spill = if total > 0.0 { outside / total } else { 0.0 };
    (full.masked(keep), spill)
}

/// Gradient of a scalar: `d/dx` in 1D, `(d/dx, d/dy)` in 2D.
pub fn gradient(s: &SpectralField) -> Velocity {
    match s.grid().dim() {
        1 => Velocity::OneD(s.derivative(0)),
        _ => Velocity::TwoD(s.derivative(0), s.derivative(1)),
    }
}

/// Divergence of a velocity: `d/dx v` in 1D.
pub fn divergence_v(v: &Velocity) -> SpectralField {
    match v {
        Velocity::OneD(f) => f.derivative(0),
        Velocity::TwoD(vx, vy) => vx.derivative(0).add(&vy.derivative(1)),
    }
}

/// Apply `(1 + coef * |xi|^2)^{-1}` modewise to a scalar field.
pub fn invert_helmholtz(s: &SpectralField, coef: f64) -> SpectralField {
    let grid = s.grid().clone();
    s.map_modes(|idx, c| {
        let r = grid.xi_norm(idx);
        c / (1.0 + coef * r * r)
    })
}

/// Invert `(1 - coef * grad div)` on a velocity. On 1D fields `grad div`
/// is the full Laplacian; on 2D fields only the gradient (parallel) part is
/// damped, the rotational part passes through unchanged.
pub fn invert_one_minus_graddiv(v: &Velocity, coef: f64) -> Velocity {
    match v {
        Velocity::OneD(f) => Velocity::OneD(invert_helmholtz(f, coef)),
        Velocity::TwoD(vx, vy) => {
            let grid = vx.grid().clone();
            let mut xc = vx.coeffs().to_vec();
            let mut yc = vy.coeffs().to_vec();
            for idx in 0..xc.len() {
                let (kx, ky) = grid.xi_vec(idx);
                let r2 = kx * kx + ky * ky;
                if r2 == 0.0 {
                    continue;
                }
                let (ex, ey) = (kx / r2.sqrt(), ky / r2.sqrt());
                let vpar = ex * xc[idx] + ey * yc[idx];
                let damped = vpar / (1.0 + coef * r2);
                xc[idx] += (damped - vpar) * ex;
                yc[idx] += (damped - vpar) * ey;
            }
            Velocity::TwoD(
                SpectralField::from_coeffs(&grid, xc).expect("shape preserved"),
                SpectralField::from_coeffs(&grid, yc).expect("shape preserved"),
            )
        }
    }
}

/// Physical samples of every velocity component.
pub fn velocity_physical(v: &Velocity) -> Vec<Vec<f64>> {
    v.components().iter().map(|f| f.to_physical()).collect()
}

/// The advection term `(V . grad) V` as a band-limited velocity.
pub fn advection(grid: &Grid, v: &Velocity, v_phys: &[Vec<f64>], keep: &[bool]) -> Velocity {
    match v {
        Velocity::OneD(f) => {
            let dv = f.derivative(0).to_physical();
            Velocity::OneD(product(grid, &v_phys[0], &dv, keep))
        }
        Velocity::TwoD(vx, vy) => {
            let mut out = Vec::with_capacity(2);
            for comp in [vx, vy] {
                let dx = comp.derivative(0).to_physical();
                let dy = comp.derivative(1).to_physical();
                let mut acc = product(grid, &v_phys[0], &dx, keep);
                acc = acc.add(&product(grid, &v_phys[1], &dy, keep));
                out.push(acc);
            }
            let y = out.pop().unwrap();
            let x = out.pop().unwrap();
            Velocity::TwoD(x, y)
        }
    }
}
