use super::nonlinear::Tendency;
use super::ops::{advection, divergence_v, gradient, invert_one_minus_graddiv, product, product_with_spill, velocity_physical};
use super::params::ModelSpec;
use super::state::{State, Velocity};
use crate::error::{Error, Result};
use crate::spectral::{Grid, SpectralField};

/// Closure options for the Green-Naghdi tendency. The defaults give the full
/// model; freezing the depth and dropping Q reduces it to the classical
/// system, which is what the reduction tests exercise.
#[derive(Clone, Copy, Debug)]
pub struct GnOptions {
    pub freeze_depth: bool,
    pub include_q: bool,
    /// Relative residual target of the momentum solve.
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for GnOptions {
    fn default() -> Self {
        GnOptions { freeze_depth: false, include_q: true, tol: 1e-10, max_iters: 400 }
    }
}

/// Physical-space depth data shared by the operators.
struct Depth {
    grid: Grid,
    /// h = 1 + eps*zeta
    h: Vec<f64>,
    h3: Vec<f64>,
    /// 1/(3h)
    inv3h: Vec<f64>,
    /// zeta * (3 + 3 eps zeta + eps^2 zeta^2) = (h^3 - 1)/eps
    zeta_poly: Vec<f64>,
    zeta_phys: Vec<f64>,
    hbar: f64,
}

impl Depth {
    fn new(zeta: &SpectralField, eps: f64, floor: f64) -> Result<Self> {
        let grid = zeta.grid().clone();
        let zeta_phys = zeta.to_physical();
        let mut min_depth = f64::INFINITY;
        let mut h = Vec::with_capacity(zeta_phys.len());
        for &z in &zeta_phys {
            let depth = 1.0 + eps * z;
            min_depth = min_depth.min(depth);
            h.push(depth);
        }
        if min_depth < floor {
            return Err(Error::DepthFloor { min_depth, floor });
        }
        let h3: Vec<f64> = h.iter().map(|&d| d * d * d).collect();
        let inv3h: Vec<f64> = h.iter().map(|&d| 1.0 / (3.0 * d)).collect();
        let zeta_poly: Vec<f64> = zeta_phys
            .iter()
            .map(|&z| z * (3.0 + 3.0 * eps * z + eps * eps * z * z))
            .collect();
        let hbar = h.iter().sum::<f64>() / h.len() as f64;
        Ok(Depth { grid, h, h3, inv3h, zeta_poly, zeta_phys, hbar })
    }

    fn flat(grid: &Grid) -> Self {
        let n = grid.point_count();
        Depth {
            grid: grid.clone(),
            h: vec![1.0; n],
            h3: vec![1.0; n],
            inv3h: vec![1.0 / 3.0; n],
            zeta_poly: vec![0.0; n],
            zeta_phys: vec![0.0; n],
            hbar: 1.0,
        }
    }
}

/// `T[eps zeta] W = -(1/(3h)) grad(h^3 div W)`.
fn t_apply(depth: &Depth, w: &Velocity, keep: &[bool]) -> Velocity {
    let div = divergence_v(w).to_physical();
    let h3div = product(&depth.grid, &depth.h3, &div, keep);
    let grad = gradient(&h3div);
    grad.map(|comp| product(&depth.grid, &depth.inv3h, &comp.to_physical(), keep).scale(-1.0))
}

/// `(T[eps zeta] - T[0]) W / eps`, with the eps factored out analytically so
/// the slow tendency can be assembled without a 1/eps cancellation:
/// `-(1/(3h)) [ grad(zeta_poly div W) - zeta grad(div W) ]`.
fn delta_t_scaled(depth: &Depth, w: &Velocity, keep: &[bool]) -> Velocity {
    let div = divergence_v(w);
    let div_phys = div.to_physical();
    let weighted = product(&depth.grid, &depth.zeta_poly, &div_phys, keep);
    let term1 = gradient(&weighted);
    let term2 = gradient(&div)
        .map(|comp| product(&depth.grid, &depth.zeta_phys, &comp.to_physical(), keep));
    term1
        .sub(&term2)
        .map(|comp| product(&depth.grid, &depth.inv3h, &comp.to_physical(), keep).scale(-1.0))
}

/// `Q[eps zeta](V) = -(1/(3h)) grad[h^3 ((V.grad)(div V) - (div V)^2)]`.
fn q_apply(depth: &Depth, v: &Velocity, v_phys: &[Vec<f64>], keep: &[bool]) -> Velocity {
    let div = divergence_v(v);
    let div_phys = div.to_physical();
    let grad_div = gradient(&div);
    // (V.grad)(div V)
    let mut inner = match &grad_div {
        Velocity::OneD(dx) => product(&depth.grid, &v_phys[0], &dx.to_physical(), keep),
        Velocity::TwoD(dx, dy) => {
            let a = product(&depth.grid, &v_phys[0], &dx.to_physical(), keep);
            let b = product(&depth.grid, &v_phys[1], &dy.to_physical(), keep);
            a.add(&b)
        }
    };
    // minus (div V)^2
    inner = inner.sub(&product(&depth.grid, &div_phys, &div_phys, keep));
    let weighted = product(&depth.grid, &depth.h3, &inner.to_physical(), keep);
    gradient(&weighted)
        .map(|comp| product(&depth.grid, &depth.inv3h, &comp.to_physical(), keep).scale(-1.0))
}

/// Solve `(1 + mu T[eps zeta]) X = rhs` by preconditioned CG on the
/// symmetrized form `h X - (mu/3) grad(h^3 div X) = h rhs`, preconditioned
/// with the flat-depth symbol. Exact (one iteration) when zeta = 0.
fn solve_momentum(
    depth: &Depth,
    rhs: &Velocity,
    mu: f64,
    keep: &[bool],
    tol: f64,
    max_iters: usize,
) -> Result<Velocity> {
    let grid = &depth.grid;
    let rhs_norm = vel_norm(rhs);
    if rhs_norm == 0.0 {
        return Ok(rhs.scale(0.0));
    }
    let apply = |x: &Velocity| -> Velocity {
        let hx = x.map(|comp| product(grid, &depth.h, &comp.to_physical(), keep));
        let div = divergence_v(x).to_physical();
        let h3div = product(grid, &depth.h3, &div, keep);
        hx.sub(&gradient(&h3div).scale(mu / 3.0))
    };
    let precond = |r: &Velocity| -> Velocity {
        let hbar = depth.hbar;
        let coef = mu * hbar * hbar / 3.0;
        match r {
            Velocity::OneD(f) => {
                let g = f.grid().clone();
                Velocity::OneD(f.map_modes(|idx, c| {
                    let xi = g.xi(idx);
                    c / (hbar + coef * hbar * xi * xi)
                }))
            }
            Velocity::TwoD(_, _) => {
                // Parallel part sees the Helmholtz symbol, the rotational
                // part only the depth average.
                invert_one_minus_graddiv(&r.scale(1.0 / hbar), coef)
            }
        }
    };

    let b = rhs.map(|comp| product(grid, &depth.h, &comp.to_physical(), keep));
    let mut x = precond(&b);
    let mut r = b.sub(&apply(&x));
    let mut z = precond(&r);
    let mut p = z.clone();
    let mut rz = vel_dot(&r, &z);
    let bound = tol * rhs_norm;
    for iter in 0..max_iters {
        // Convergence is judged on the original, unsymmetrized residual.
        if vel_norm(&r) <= 0.5 * bound {
            let true_res = rhs.sub(&x.add(&t_apply(depth, &x, keep).scale(mu)));
            if vel_norm(&true_res) <= bound {
                return Ok(x);
            }
            if iter == max_iters - 1 {
                break;
            }
        }
        let ap = apply(&p);
        let alpha = rz / vel_dot(&p, &ap);
        x = x.add(&p.scale(alpha));
        r = r.sub(&ap.scale(alpha));
        z = precond(&r);
        let rz_new = vel_dot(&r, &z);
        p = z.add(&p.scale(rz_new / rz));
        rz = rz_new;
    }
    let true_res = rhs.sub(&x.add(&t_apply(depth, &x, keep).scale(mu)));
    let residual = vel_norm(&true_res) / rhs_norm;
    if residual <= tol {
        Ok(x)
    } else {
        Err(Error::EllipticNonConvergence { residual, iters: max_iters })
    }
}

fn vel_dot(a: &Velocity, b: &Velocity) -> f64 {
    a.components()
        .iter()
        .zip(b.components())
        .map(|(x, y)| {
            x.coeffs()
                .iter()
                .zip(y.coeffs())
                .map(|(u, v)| (u.conj() * v).re)
                .sum::<f64>()
        })
        .sum()
}

fn vel_norm(a: &Velocity) -> f64 {
    vel_dot(a, a).sqrt()
}

/// Full Green-Naghdi slow tendency. The momentum equation is solved for the
/// velocity part so that the time-derivative terms of the compact form are
/// closed; the stiff `(1/eps) grad zeta / (1 - mu/3 grad div)` piece cancels
/// against the resolvent difference, leaving
/// `F_V = (1 + mu T)^{-1} [ mu dT (1 - mu/3 grad div)^{-1} grad zeta
///        - (V.grad)V - mu Q ]`
/// with `dT = (T[eps zeta] - T[0])/eps`.
pub fn gn_rhs(spec: &ModelSpec, state: &State, opts: &GnOptions) -> Result<Tendency> {
    let grid = state.grid().clone();
    let keep = grid.band_keep(spec.dealias_fraction());
    let mu = spec.mu;
    let depth = if opts.freeze_depth {
        Depth::flat(&grid)
    } else {
        Depth::new(&state.zeta, spec.eps, spec.h0)?
    };
    let v_phys = velocity_physical(&state.v);
    let zeta_phys = state.zeta.to_physical();

    // Surface equation: F1 = -div(zeta V).
    let mut spill = 0f64;
    let flux = match &state.v {
        Velocity::OneD(_) => {
            let (f, s) = product_with_spill(&grid, &zeta_phys, &v_phys[0], &keep);
            spill = spill.max(s);
            Velocity::OneD(f)
        }
        Velocity::TwoD(_, _) => {
            let (fx, sx) = product_with_spill(&grid, &zeta_phys, &v_phys[0], &keep);
            let (fy, sy) = product_with_spill(&grid, &zeta_phys, &v_phys[1], &keep);
            spill = spill.max(sx).max(sy);
            Velocity::TwoD(fx, fy)
        }
    };
    let f_zeta = divergence_v(&flux).scale(-1.0);

    // Velocity equation.
    let mut rhs = advection(&grid, &state.v, &v_phys, &keep).scale(-1.0);
    if opts.include_q {
        rhs = rhs.sub(&q_apply(&depth, &state.v, &v_phys, &keep).scale(mu));
    }
    if !opts.freeze_depth {
        let grad_zeta = gradient(&state.zeta);
        let w = invert_one_minus_graddiv(&grad_zeta, mu / 3.0);
        rhs = rhs.add(&delta_t_scaled(&depth, &w, &keep).scale(mu));
    }
    let f_v = solve_momentum(&depth, &rhs, mu, &keep, opts.tol, opts.max_iters)?;

    Ok(Tendency { zeta: f_zeta, v: f_v, band_spill: spill })
}

/// Public operator: `T[eps zeta] W`.
pub fn gn_t_apply(zeta: &SpectralField, w: &Velocity, eps: f64) -> Result<Velocity> {
    let depth = Depth::new(zeta, eps, 1e-8)?;
    let keep = zeta.grid().band_keep(0.5);
    Ok(t_apply(&depth, w, &keep))
}

/// Public operator: `Q[eps zeta](V)`.
pub fn gn_q_apply(zeta: &SpectralField, v: &Velocity, eps: f64) -> Result<Velocity> {
    let depth = Depth::new(zeta, eps, 1e-8)?;
    let keep = zeta.grid().band_keep(0.5);
    let v_phys = velocity_physical(v);
    Ok(q_apply(&depth, v, &v_phys, &keep))
}

/// Public solve: `(1 + mu T[eps zeta]) X = rhs` to relative residual `tol`.
pub fn gn_solve_momentum(
    zeta: &SpectralField,
    rhs: &Velocity,
    eps: f64,
    mu: f64,
    tol: f64,
) -> Result<Velocity> {
    let depth = Depth::new(zeta, eps, 1e-8)?;
    let keep = zeta.grid().band_keep(0.5);
    solve_momentum(&depth, rhs, mu, &keep, tol, 400)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::nonlinear::{nonlinearity, TendencyOpts};
    use crate::models::params::{Dim, ModelKind};

    fn field_from(grid: &Grid, f: impl Fn(f64) -> f64) -> SpectralField {
        let vals: Vec<f64> = (0..grid.point_count()).map(|i| f(grid.coord(i))).collect();
        SpectralField::from_physical(grid, &vals).unwrap()
    }

    #[test]
    fn flat_depth_t_is_minus_third_laplacian() {
        let grid = Grid::new_1d(128, 2.0 * std::f64::consts::PI).unwrap();
        let zeta = SpectralField::zeros(&grid);
        let w = Velocity::OneD(field_from(&grid, f64::sin));
        let out = gn_t_apply(&zeta, &w, 0.1).unwrap();
        // T[0] sin = -(1/3) d2 sin = (1/3) sin
        let phys = out.components()[0].to_physical();
        for (i, v) in phys.iter().enumerate() {
            assert!((v - grid.coord(i).sin() / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_velocity_in_kernel_of_t_and_q() {
        let grid = Grid::new_1d(64, 10.0).unwrap();
        let zeta = field_from(&grid, |x| 0.3 * (-x * x).exp());
        let w = Velocity::OneD(field_from(&grid, |_| 1.0));
        assert!(vel_norm(&gn_t_apply(&zeta, &w, 0.2).unwrap()) < 1e-13);
        assert!(vel_norm(&gn_q_apply(&zeta, &w, 0.2).unwrap()) < 1e-13);
    }

    #[test]
    fn q_vanishes_for_sine_on_flat_depth() {
        // V V'' - (V')^2 = -1 is constant, so Q[0](sin) = 0.
        let grid = Grid::new_1d(128, 2.0 * std::f64::consts::PI).unwrap();
        let zeta = SpectralField::zeros(&grid);
        let v = Velocity::OneD(field_from(&grid, f64::sin));
        assert!(vel_norm(&gn_q_apply(&zeta, &v, 0.1).unwrap()) < 1e-12);
    }

    fn fd4(vals: &[f64], dx: f64) -> Vec<f64> {
        let n = vals.len();
        (0..n)
            .map(|i| {
                let f = |o: i64| vals[((i as i64 + o).rem_euclid(n as i64)) as usize];
                (-f(2) + 8.0 * f(1) - 8.0 * f(-1) + f(-2)) / (12.0 * dx)
            })
            .collect()
    }

    #[test]
    fn t_matches_finite_difference_oracle() {
        let grid = Grid::new_1d(2048, 2.0 * std::f64::consts::PI).unwrap();
        let eps = 0.2;
        let zeta = field_from(&grid, |x| 0.5 * x.cos());
        let w_field = field_from(&grid, f64::sin);
        let out =
            gn_t_apply(&zeta, &Velocity::OneD(w_field.clone()), eps).unwrap().components()[0]
                .to_physical();
        // Direct evaluation of -(1/(3h)) d(h^3 dW) with 4th-order stencils.
        let h: Vec<f64> = zeta.to_physical().iter().map(|z| 1.0 + eps * z).collect();
        let wphys: Vec<f64> = w_field.to_physical();
        let dw = fd4(&wphys, grid.dx());
        let h3dw: Vec<f64> = h.iter().zip(&dw).map(|(h, d)| h * h * h * d).collect();
        let dh3dw = fd4(&h3dw, grid.dx());
        for i in 0..grid.point_count() {
            let expect = -dh3dw[i] / (3.0 * h[i]);
            assert!((out[i] - expect).abs() < 1e-6, "at {i}: {} vs {expect}", out[i]);
        }
    }

    #[test]
    fn q_matches_finite_difference_oracle() {
        let grid = Grid::new_1d(2048, 2.0 * std::f64::consts::PI).unwrap();
        let eps = 0.15;
        let zeta = field_from(&grid, |x| 0.4 * (x).sin());
        let v_field = field_from(&grid, |x| (2.0 * x).cos() * 0.5);
        let out = gn_q_apply(&zeta, &Velocity::OneD(v_field.clone()), eps)
            .unwrap()
            .components()[0]
            .to_physical();
        let h: Vec<f64> = zeta.to_physical().iter().map(|z| 1.0 + eps * z).collect();
        let v = v_field.to_physical();
        let dv = fd4(&v, grid.dx());
        let ddv = fd4(&dv, grid.dx());
        let inner: Vec<f64> = (0..v.len())
            .map(|i| h[i].powi(3) * (v[i] * ddv[i] - dv[i] * dv[i]))
            .collect();
        let dinner = fd4(&inner, grid.dx());
        for i in 0..grid.point_count() {
            let expect = -dinner[i] / (3.0 * h[i]);
            assert!((out[i] - expect).abs() < 1e-5, "at {i}: {} vs {expect}", out[i]);
        }
    }

    #[test]
    fn flat_solve_is_spectrally_exact() {
        let grid = Grid::new_1d(256, 30.0).unwrap();
        let zeta = SpectralField::zeros(&grid);
        let rhs = Velocity::OneD(field_from(&grid, |x| (-x * x / 3.0).exp()));
        let x = gn_solve_momentum(&zeta, &rhs, 0.1, 1.0, 1e-14).unwrap();
        let back = x.add(&gn_t_apply(&zeta, &x, 0.1).unwrap());
        let res = vel_norm(&back.sub(&rhs)) / vel_norm(&rhs);
        assert!(res <= 1e-14, "residual {res}");
    }

    #[test]
    fn zero_rhs_gives_zero_solution() {
        let grid = Grid::new_1d(64, 10.0).unwrap();
        let zeta = field_from(&grid, |x| 0.2 * (-x * x).exp());
        let x = gn_solve_momentum(&zeta, &Velocity::zeros(&grid), 0.3, 0.8, 1e-12).unwrap();
        assert!(vel_norm(&x) == 0.0);
    }

    #[test]
    fn apply_then_solve_round_trip() {
        let grid = Grid::new_1d(256, 40.0).unwrap();
        let eps = 0.2;
        let mu = 0.9;
        let zeta = field_from(&grid, |x| 0.35 * (-x * x / 8.0).exp());
        let y = Velocity::OneD(field_from(&grid, |x| (-(x - 2.0) * (x - 2.0) / 5.0).exp()));
        // Band-limit y the same way the operators do.
        let keep = grid.band_keep(0.5);
        let y = y.map(|f| f.masked(&keep));
        let rhs = y.add(&gn_t_apply(&zeta, &y, eps).unwrap().scale(mu));
        let x = gn_solve_momentum(&zeta, &rhs, eps, mu, 1e-10).unwrap();
        let err = vel_norm(&x.sub(&y)) / vel_norm(&y);
        assert!(err <= 1e-9, "round trip error {err}");
    }

    #[test]
    fn depth_floor_violation_detected() {
        let grid = Grid::new_1d(64, 10.0).unwrap();
        let zeta = field_from(&grid, |x| -((-x * x).exp())); // min 1 - eps
        let spec = ModelSpec::green_naghdi(Dim::One, 0.9, 1.0, 0.5).unwrap();
        let state = State::new(0.0, zeta, Velocity::zeros(&grid));
        let err = nonlinearity(&spec, &state, &TendencyOpts::default());
        assert!(matches!(err, Err(Error::DepthFloor { .. })));
    }

    #[test]
    fn frozen_depth_reduces_to_classical() {
        let grid = Grid::new_1d(128, 40.0).unwrap();
        let eps = 0.3;
        let mu = 0.7;
        let gn = ModelSpec::green_naghdi(Dim::One, eps, mu, 0.5).unwrap();
        let classical = ModelSpec::new(
            ModelKind::Classical,
            Dim::One,
            eps,
            mu,
            crate::models::params::AbcdParams::classical(),
            0.5,
        )
        .unwrap();
        // Band-limit the data to the GN (1/2-rule) band so both models see
        // identical states.
        let keep = grid.band_keep(0.5);
        let zeta = field_from(&grid, |x| 0.4 * (-x * x / 6.0).exp()).masked(&keep);
        let v = field_from(&grid, |x| 0.3 * (-(x + 1.0) * (x + 1.0) / 4.0).exp()).masked(&keep);
        let state = State::new(0.0, zeta, Velocity::OneD(v));
        let mut opts = TendencyOpts::default();
        opts.gn.freeze_depth = true;
        opts.gn.include_q = false;
        opts.gn.tol = 1e-13;
        let gn_out = nonlinearity(&gn, &state, &opts).unwrap();
        let cl_out = nonlinearity(&classical, &state, &TendencyOpts::default()).unwrap();
        // Classical uses the 2/3 band; compare on the GN band.
        let dz = gn_out.zeta.sub(&cl_out.zeta.masked(&keep)).mode_l2();
        let dv = vel_norm(&gn_out.v.sub(&cl_out.v.map(|f| f.masked(&keep))));
        let scale = cl_out.zeta.mode_l2() + vel_norm(&cl_out.v);
        assert!(dz + dv <= 1e-12 * scale, "dz {dz}, dv {dv}");
    }
}
