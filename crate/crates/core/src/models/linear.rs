use num_complex::Complex64;

use super::params::{Dim, ModelSpec};
use super::state::{State, Velocity};
use crate::error::Result;
use crate::phase::PhasePair;
use crate::spectral::SpectralField;

/// Symbol of the stiff operator `A` acting on `(zeta, V)` in 1D or on
/// `(zeta, div V)` in 2D, evaluated at one wavenumber.
///
/// 1D: `A = [[0, i sig1], [i sig2, 0]]` with
/// `sig1 = xi (1 - mu a xi^2)/(1 + mu b xi^2)` and
/// `sig2 = xi (1 - mu c xi^2)/(1 + mu d xi^2)`.
/// 2D: `A = [[0, abar], [-|xi|^2 cbar, 0]]` with the same rational factors.
/// The Green-Naghdi compact form shares the classical symbol.
pub fn linear_symbol(spec: &ModelSpec, xi: f64) -> Result<[[Complex64; 2]; 2]> {
    spec.validate()?;
    let zero = Complex64::default();
    Ok(match spec.dim {
        Dim::One => {
            let (s1, s2) = sigma_1d(spec, xi);
            [[zero, Complex64::new(0.0, s1)], [Complex64::new(0.0, s2), zero]]
        }
        Dim::Two => {
            let (abar, cbar) = rational_factors(spec, xi.abs());
            [
                [zero, Complex64::new(abar, 0.0)],
                [Complex64::new(-xi * xi * cbar, 0.0), zero],
            ]
        }
    })
}

fn rational_factors(spec: &ModelSpec, r: f64) -> (f64, f64) {
    let u = spec.mu * r * r;
    let p = &spec.abcd;
    (
        (1.0 - p.a * u) / (1.0 + p.b * u),
        (1.0 - p.c * u) / (1.0 + p.d * u),
    )
}

fn sigma_1d(spec: &ModelSpec, xi: f64) -> (f64, f64) {
    let (abar, cbar) = rational_factors(spec, xi.abs());
    (xi * abar, xi * cbar)
}

/// Entries of `exp(-tau A(xi))` for the 2x2 pair propagated by the linear
/// flow. Group property and the quadratic invariant
/// `|zeta|^2 + R^2(sqrt(mu)|xi|) |v|^2` (1D) follow from the cos/sin form.
pub fn semigroup_symbol(spec: &ModelSpec, xi: f64, tau: f64) -> Result<[[Complex64; 2]; 2]> {
    let a = linear_symbol(spec, xi)?;
    let pair = PhasePair::new(spec.abcd);
    let omega = pair.omega(spec.mu, xi.abs());
    let (co, sinc) = if omega == 0.0 {
        (1.0, tau)
    } else {
        ((omega * tau).cos(), (omega * tau).sin() / omega)
    };
    let one = Complex64::new(co, 0.0);
    Ok([
        [one, -sinc * a[0][1]],
        [-sinc * a[1][0], one],
    ])
}

/// Exact flow of the stiff part over time `dt`: each mode is rotated by
/// `exp(-(dt/eps) A(xi))`. In 2D the rotation acts on `(zeta, v_par)` where
/// `v_par` is the gradient (parallel) component of the velocity; the
/// rotational component is frozen by the linear flow.
pub struct LinearPropagator {
    /// Per-mode entries (e00, e01, e10, e11) of the 2x2 matrix.
    table: Vec<[Complex64; 4]>,
    dim: Dim,
}

impl LinearPropagator {
    pub fn new(spec: &ModelSpec, grid: &crate::spectral::Grid, dt: f64) -> Result<Self> {
        let tau = dt / spec.eps;
        let pair = PhasePair::new(spec.abcd);
        let mut table = Vec::with_capacity(grid.point_count());
        for idx in 0..grid.point_count() {
            let m = match spec.dim {
                Dim::One => {
                    let xi = grid.xi(idx);
                    semigroup_entries(spec, &pair, xi, tau)
                }
                Dim::Two => {
                    // Pair (zeta, v_par): A_pair = [[0, i |xi| abar], [i |xi| cbar, 0]].
                    let r = grid.xi_norm(idx);
                    pair_entries_2d(spec, &pair, r, tau)
                }
            };
            table.push(m);
        }
        Ok(LinearPropagator { table, dim: spec.dim })
    }

    pub fn apply(&self, state: &State) -> State {
        let grid = state.grid().clone();
        match (&state.v, self.dim) {
            (Velocity::OneD(v), Dim::One) => {
                let mut zc = state.zeta.coeffs().to_vec();
                let mut vc = v.coeffs().to_vec();
                for idx in 0..zc.len() {
                    let [e00, e01, e10, e11] = self.table[idx];
                    let (z, w) = (zc[idx], vc[idx]);
                    zc[idx] = e00 * z + e01 * w;
                    vc[idx] = e10 * z + e11 * w;
                }
                State::new(
                    state.t,
                    SpectralField::from_coeffs(&grid, zc).expect("shape preserved"),
                    Velocity::OneD(SpectralField::from_coeffs(&grid, vc).expect("shape preserved")),
                )
            }
            (Velocity::TwoD(vx, vy), Dim::Two) => {
                let mut zc = state.zeta.coeffs().to_vec();
                let mut xc = vx.coeffs().to_vec();
                let mut yc = vy.coeffs().to_vec();
                for idx in 0..zc.len() {
                    let (kx, ky) = grid.xi_vec(idx);
                    let r = (kx * kx + ky * ky).sqrt();
                    if r == 0.0 {
                        continue; // A vanishes on the mean mode
                    }
                    let (ex, ey) = (kx / r, ky / r);
                    let vpar = ex * xc[idx] + ey * yc[idx];
                    let vperp_x = xc[idx] - vpar * ex;
                    let vperp_y = yc[idx] - vpar * ey;
                    let [e00, e01, e10, e11] = self.table[idx];
                    let z = zc[idx];
                    zc[idx] = e00 * z + e01 * vpar;
                    let vpar_new = e10 * z + e11 * vpar;
                    xc[idx] = vperp_x + vpar_new * ex;
                    yc[idx] = vperp_y + vpar_new * ey;
                }
                State::new(
                    state.t,
                    SpectralField::from_coeffs(&grid, zc).expect("shape preserved"),
                    Velocity::TwoD(
                        SpectralField::from_coeffs(&grid, xc).expect("shape preserved"),
                        SpectralField::from_coeffs(&grid, yc).expect("shape preserved"),
                    ),
                )
            }
            _ => unreachable!("state dimension matches propagator"),
        }
    }
}

fn semigroup_entries(
    spec: &ModelSpec,
    pair: &PhasePair,
    xi: f64,
    tau: f64,
) -> [Complex64; 4] {
    let (s1, s2) = sigma_1d(spec, xi);
    let omega = pair.omega(spec.mu, xi.abs());
    let (co, sinc) = if omega == 0.0 {
        (1.0, tau)
    } else {
        ((omega * tau).cos(), (omega * tau).sin() / omega)
    };
    [
        Complex64::new(co, 0.0),
        Complex64::new(0.0, -sinc * s1),
        Complex64::new(0.0, -sinc * s2),
        Complex64::new(co, 0.0),
    ]
}

fn pair_entries_2d(spec: &ModelSpec, pair: &PhasePair, r: f64, tau: f64) -> [Complex64; 4] {
    let (abar, cbar) = rational_factors(spec, r);
    let omega = pair.omega(spec.mu, r);
    let (co, sinc) = if omega == 0.0 {
        (1.0, tau)
    } else {
        ((omega * tau).cos(), (omega * tau).sin() / omega)
    };
    [
        Complex64::new(co, 0.0),
        Complex64::new(0.0, -sinc * r * abar),
        Complex64::new(0.0, -sinc * r * cbar),
        Complex64::new(co, 0.0),
    ]
}

/// Quadratic invariant of the linear flow: `sum |zeta|^2 + W(xi) |v|^2` with
/// `W = R^2(sqrt(mu)|xi|)` on the propagated pair (and weight 1 on the
/// rotational component in 2D). Exactly conserved by [`LinearPropagator`].
pub fn linear_energy(spec: &ModelSpec, state: &State) -> f64 {
    let grid = state.grid().clone();
    let pair = PhasePair::new(spec.abcd);
    let mut total = 0.0;
    match &state.v {
        Velocity::OneD(v) => {
            for idx in 0..grid.point_count() {
                let w = pair.r_ratio(spec.mu.sqrt() * grid.xi(idx).abs()).powi(2);
                total += state.zeta.coeffs()[idx].norm_sqr() + w * v.coeffs()[idx].norm_sqr();
            }
        }
        Velocity::TwoD(vx, vy) => {
            for idx in 0..grid.point_count() {
                let (kx, ky) = grid.xi_vec(idx);
                let r = (kx * kx + ky * ky).sqrt();
                let z2 = state.zeta.coeffs()[idx].norm_sqr();
                if r == 0.0 {
                    total += z2 + vx.coeffs()[idx].norm_sqr() + vy.coeffs()[idx].norm_sqr();
                    continue;
                }
                let (ex, ey) = (kx / r, ky / r);
                let vpar = ex * vx.coeffs()[idx] + ey * vy.coeffs()[idx];
                let perp_x = vx.coeffs()[idx] - vpar * ex;
                let perp_y = vy.coeffs()[idx] - vpar * ey;
                let w = pair.r_ratio(spec.mu.sqrt() * r).powi(2);
                total += z2 + w * vpar.norm_sqr() + perp_x.norm_sqr() + perp_y.norm_sqr();
            }
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::params::{AbcdParams, ModelKind};
    use rand::{Rng, SeedableRng};

    fn classical_1d(mu: f64) -> ModelSpec {
        ModelSpec::classical(Dim::One, 0.5, mu).unwrap()
    }

    #[test]
    fn classical_symbol_values() {
        let spec = classical_1d(1.0);
        let a0 = linear_symbol(&spec, 0.0).unwrap();
        for row in a0 {
            for e in row {
                assert_eq!(e, Complex64::default());
            }
        }
        let a1 = linear_symbol(&spec, 1.0).unwrap();
        assert!((a1[0][1] - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        assert!((a1[1][0] - Complex64::new(0.0, 0.75)).norm() < 1e-15);
    }

    #[test]
    fn all_zero_abcd_gives_wave_symbol() {
        let spec = ModelSpec::new(
            ModelKind::Abcd,
            Dim::One,
            0.5,
            1.0,
            AbcdParams::shallow_water(),
            0.5,
        )
        .unwrap();
        let a = linear_symbol(&spec, 2.0).unwrap();
        assert!((a[0][1] - Complex64::new(0.0, 2.0)).norm() < 1e-15);
        assert!((a[1][0] - Complex64::new(0.0, 2.0)).norm() < 1e-15);
    }

    #[test]
    fn semigroup_identity_at_zero_time() {
        let spec = classical_1d(0.3);
        let m = semigroup_symbol(&spec, 1.7, 0.0).unwrap();
        assert!((m[0][0].re - 1.0).abs() < 1e-15);
        assert!(m[0][1].norm() < 1e-15);
    }

    fn mat_mul(a: &[[Complex64; 2]; 2], b: &[[Complex64; 2]; 2]) -> [[Complex64; 2]; 2] {
        let mut out = [[Complex64::default(); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        out
    }

    #[test]
    fn group_property_and_invariant() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        for spec in [
            classical_1d(1.0),
            classical_1d(0.04),
            ModelSpec::new(
                ModelKind::Abcd,
                Dim::One,
                0.3,
                0.7,
                AbcdParams::new(-0.4, 0.2, -0.1, 0.7).unwrap(),
                0.5,
            )
            .unwrap(),
        ] {
            for _ in 0..100 {
                let xi: f64 = rng.random_range(-20.0..20.0);
                let t1: f64 = rng.random_range(0.0..5.0);
                let t2: f64 = rng.random_range(0.0..5.0);
                let m1 = semigroup_symbol(&spec, xi, t1).unwrap();
                let m2 = semigroup_symbol(&spec, xi, t2).unwrap();
                let m12 = semigroup_symbol(&spec, xi, t1 + t2).unwrap();
                let prod = mat_mul(&m1, &m2);
                for i in 0..2 {
                    for j in 0..2 {
                        assert!(
                            (prod[i][j] - m12[i][j]).norm() < 1e-12,
                            "group property at xi={xi}"
                        );
                    }
                }
                // Quadratic invariant |z|^2 + R^2 |v|^2.
                let z0 = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                let v0 = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                let z1 = m1[0][0] * z0 + m1[0][1] * v0;
                let v1 = m1[1][0] * z0 + m1[1][1] * v0;
                let w = PhasePair::new(spec.abcd)
                    .r_ratio(spec.mu.sqrt() * xi.abs())
                    .powi(2);
                let e0 = z0.norm_sqr() + w * v0.norm_sqr();
                let e1 = z1.norm_sqr() + w * v1.norm_sqr();
                assert!((e0 - e1).abs() <= 1e-12 * e0.max(1.0), "invariant at xi={xi}");
            }
        }
    }

    #[test]
    fn classical_1d_semigroup_matches_paper_entries() {
        // Upper-right entry: i sqrt(1 + mu xi^2 / 3) sin(tau omega).
        let spec = classical_1d(1.0);
        let (xi, tau) = (1.3, 0.77);
        let omega = xi / (1.0 + xi * xi / 3.0).sqrt();
        let m = semigroup_symbol(&spec, xi, -tau).unwrap(); // exp(+tau A)
        let expect01 = Complex64::new(0.0, (1.0 + xi * xi / 3.0).sqrt() * (tau * omega).sin());
        let expect10 = Complex64::new(0.0, (tau * omega).sin() / (1.0 + xi * xi / 3.0).sqrt());
        assert!((m[0][1] - expect01).norm() < 1e-14);
        assert!((m[1][0] - expect10).norm() < 1e-14);
    }
}
