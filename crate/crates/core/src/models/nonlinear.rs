use super::green_naghdi::{gn_rhs, GnOptions};
use super::ops::{advection, divergence_v, invert_helmholtz, invert_one_minus_graddiv, product_with_spill, velocity_physical};
use super::params::{ModelKind, ModelSpec};
use super::state::{State, Velocity};
use crate::error::Result;

/// The slow right-hand side `F(U)` of the compact form
/// `dU/dt = -(1/eps) A(D) U + F(U)`.
#[derive(Clone, Debug)]
pub struct Tendency {
    pub zeta: crate::spectral::SpectralField,
    pub v: Velocity,
    /// Relative spectral mass the quadratic products pushed outside the
    /// dealias band (diagnostic; large values mean the run is underresolved).
    pub band_spill: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct TendencyOpts {
    pub gn: GnOptions,
}

impl Default for TendencyOpts {
    fn default() -> Self {
        TendencyOpts { gn: GnOptions::default() }
    }
}

/// Evaluate `F(U)` for any model. For Green-Naghdi the time-derivative terms
/// inside `F` are closed by solving the momentum equation, so the result is
/// a pure function of the state.
pub fn nonlinearity(spec: &ModelSpec, state: &State, opts: &TendencyOpts) -> Result<Tendency> {
    match spec.kind {
        ModelKind::Classical | ModelKind::Abcd => classical_tendency(spec, state),
        ModelKind::GreenNaghdi => gn_rhs(spec, state, &opts.gn),
    }
}

/// Classical/abcd right-hand side:
/// `F = -((1 - mu b L)^{-1} div(zeta V), (1 - mu d grad div)^{-1} (V.grad)V)`
/// where `L` is the Laplacian acting on the surface equation.
fn classical_tendency(spec: &ModelSpec, state: &State) -> Result<Tendency> {
    let grid = state.grid().clone();
    let keep = grid.band_keep(spec.dealias_fraction());
    let mu = spec.mu;
    let zeta_p = state.zeta.to_physical();
    let v_p = velocity_physical(&state.v);

    // First component: -(1 - mu b Delta)^{-1} div(zeta V).
    let mut spill = 0f64;
    let flux = match &state.v {
        Velocity::OneD(_) => {
            let (f, s) = product_with_spill(&grid, &zeta_p, &v_p[0], &keep);
            spill = spill.max(s);
            Velocity::OneD(f)
        }
        Velocity::TwoD(_, _) => {
            let (fx, sx) = product_with_spill(&grid, &zeta_p, &v_p[0], &keep);
            let (fy, sy) = product_with_spill(&grid, &zeta_p, &v_p[1], &keep);
            spill = spill.max(sx).max(sy);
            Velocity::TwoD(fx, fy)
        }
    };
    let f_zeta = invert_helmholtz(&divergence_v(&flux), mu * spec.abcd.b).scale(-1.0);

    // Velocity component: -(1 - mu d grad div)^{-1} (V.grad)V.
    let adv = advection(&grid, &state.v, &v_p, &keep);
    let f_v = invert_one_minus_graddiv(&adv, mu * spec.abcd.d).scale(-1.0);

    Ok(Tendency { zeta: f_zeta, v: f_v, band_spill: spill })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::params::Dim;
    use crate::spectral::{Grid, SpectralField};

    fn field_from(grid: &Grid, f: impl Fn(f64) -> f64) -> SpectralField {
        let vals: Vec<f64> = (0..grid.point_count()).map(|i| f(grid.coord(i))).collect();
        SpectralField::from_physical(grid, &vals).unwrap()
    }

    #[test]
    fn zero_state_has_zero_tendency() {
        let grid = Grid::new_1d(64, 20.0).unwrap();
        let spec = ModelSpec::classical(Dim::One, 0.5, 1.0).unwrap();
        let out = nonlinearity(&spec, &State::zeros(&grid), &TendencyOpts::default()).unwrap();
        assert!(out.zeta.mode_l2() < 1e-15);
        for c in out.v.components() {
            assert!(c.mode_l2() < 1e-15);
        }
    }

    #[test]
    fn classical_two_mode_hand_computation() {
        // zeta = 0, V = cos x, mu = 1:
        // F2 = -1/2 (1 - dxx/3)^{-1} dx(cos^2 x) = (3/14) sin 2x.
        let grid = Grid::new_1d(128, 2.0 * std::f64::consts::PI).unwrap();
        let spec = ModelSpec::classical(Dim::One, 0.5, 1.0).unwrap();
        let v = field_from(&grid, f64::cos);
        let state = State::new(0.0, SpectralField::zeros(&grid), Velocity::OneD(v));
        let out = nonlinearity(&spec, &state, &TendencyOpts::default()).unwrap();
        assert!(out.zeta.mode_l2() < 1e-13, "first component vanishes");
        let got = match &out.v {
            Velocity::OneD(f) => f.to_physical(),
            _ => unreachable!(),
        };
        for (i, g) in got.iter().enumerate() {
            let expect = 3.0 / 14.0 * (2.0 * grid.coord(i)).sin();
            assert!((g - expect).abs() < 1e-12, "at {i}: {g} vs {expect}");
        }
    }

    #[test]
    fn first_component_is_mean_free() {
        let grid = Grid::new_1d(128, 30.0).unwrap();
        let spec = ModelSpec::classical(Dim::One, 0.25, 0.5).unwrap();
        let zeta = field_from(&grid, |x| 0.4 * (-x * x / 4.0).exp());
        let v = field_from(&grid, |x| 0.3 * (-(x - 1.0) * (x - 1.0) / 9.0).exp());
        let state = State::new(0.0, zeta, Velocity::OneD(v));
        let out = nonlinearity(&spec, &state, &TendencyOpts::default()).unwrap();
        assert!(out.zeta.zero_mode().norm() < 1e-14);
    }
}
