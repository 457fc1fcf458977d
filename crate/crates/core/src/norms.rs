//! Measurement functionals: spatial L^r norms by grid quadrature, mixed
//! L^q_t L^r_x norms over snapshot ladders, spectral Sobolev and mu-weighted
//! norms, and the Gaussian-windowed local-energy (Morawetz) functional.

use crate::error::{Error, Result};
use crate::models::{State, Velocity};
use crate::spectral::{Grid, SpectralField};

/// Lebesgue exponent; `Inf` uses a refined grid max.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Lp {
    P(f64),
    Inf,
}

impl Lp {
    pub fn from_f64(q: f64) -> Lp {
        if q.is_infinite() {
            Lp::Inf
        } else {
            Lp::P(q)
        }
    }
}

/// Spatial norm of a stack of component fields: finite exponents integrate
/// `sum_i |f_i|^r` with uniform quadrature weights, `r = Inf` takes the
/// largest refined component maximum.
pub fn spatial_norm(grid: &Grid, components: &[&[f64]], p: Lp) -> f64 {
    match p {
        Lp::P(r) => {
            let mut acc = 0.0;
            for comp in components {
                for &v in *comp {
                    acc += v.abs().powf(r);
                }
            }
            (acc * grid.cell_volume()).powf(1.0 / r)
        }
        Lp::Inf => components
            .iter()
            .map(|comp| refined_max(grid, comp))
            .fold(0.0, f64::max),
    }
}

/// Grid maximum of |f| improved by one quadratic interpolation around the
/// argmax (periodic neighbors).
fn refined_max(grid: &Grid, vals: &[f64]) -> f64 {
    let (mut best, mut arg) = (0.0f64, 0usize);
    for (i, v) in vals.iter().enumerate() {
        if v.abs() > best {
            best = v.abs();
            arg = i;
        }
    }
    let n = grid.modes_per_axis();
    let refine = |fm: f64, f0: f64, fp: f64| -> f64 {
        let denom = fm - 2.0 * f0 + fp;
        if denom >= 0.0 {
            return f0;
        }
        let delta = 0.5 * (fm - fp) / denom;
        if delta.abs() > 1.0 {
            f0
        } else {
            f0 - 0.25 * (fm - fp) * delta
        }
    };
    match grid.dim() {
        1 => refine(
            vals[(arg + n - 1) % n].abs(),
            best,
            vals[(arg + 1) % n].abs(),
        ),
        _ => {
            let (iy, ix) = (arg / n, arg % n);
            let fx = refine(
                vals[grid.idx2(iy, (ix + n - 1) % n)].abs(),
                best,
                vals[grid.idx2(iy, (ix + 1) % n)].abs(),
            );
            let fy = refine(
                vals[grid.idx2((iy + n - 1) % n, ix)].abs(),
                best,
                vals[grid.idx2((iy + 1) % n, ix)].abs(),
            );
            fx.max(fy)
        }
    }
}

/// Mixed norm in time of a ladder of spatial norms: composite trapezoid of
/// the q-th power for finite q, the maximum for q = Inf.
pub fn mixed_norm(times: &[f64], spatial: &[f64], q: Lp) -> Result<f64> {
    if times.len() != spatial.len() || times.is_empty() {
        return Err(Error::Config("mixed norm needs matching nonempty ladders".into()));
    }
    match q {
        Lp::Inf => Ok(spatial.iter().fold(0.0f64, |m, &v| m.max(v))),
        Lp::P(q) => {
            if times.len() == 1 {
                return Ok(0.0);
            }
            let mut acc = 0.0;
            for i in 1..times.len() {
                let dt = times[i] - times[i - 1];
                acc += 0.5 * dt * (spatial[i].powf(q) + spatial[i - 1].powf(q));
            }
            Ok(acc.powf(1.0 / q))
        }
    }
}

/// Spectral Sobolev norm `(sum (1+|xi|^2)^s |f^|^2 dx^n)^(1/2)`; at `s = 0`
/// this equals the spatial L2 norm by the discrete Parseval identity.
pub fn sobolev_norm(f: &SpectralField, s: f64) -> f64 {
    let grid = f.grid().clone();
    let mut acc = 0.0;
    for (idx, c) in f.coeffs().iter().enumerate() {
        let r = grid.xi_norm(idx);
        acc += (1.0 + r * r).powf(s) * c.norm_sqr();
    }
    (acc * grid.cell_volume()).sqrt()
}

/// The mu-weighted space of the uniform local-existence results:
/// `|zeta|_{H^k} + |V|_{H^k} + sqrt(mu) |div V|_{H^k}` (in 1D the divergence
/// is d/dx V).
pub fn x_k_mu_norm(state: &State, k: u32, mu: f64) -> f64 {
    let s = k as f64;
    let zeta = sobolev_norm(&state.zeta, s);
    let (v_norm, div_norm) = match &state.v {
        Velocity::OneD(v) => (sobolev_norm(v, s), sobolev_norm(&v.derivative(0), s)),
        Velocity::TwoD(vx, vy) => {
            let vn = (sobolev_norm(vx, s).powi(2) + sobolev_norm(vy, s).powi(2)).sqrt();
            let div = vx.derivative(0).add(&vy.derivative(1));
            (vn, sobolev_norm(&div, s))
        }
    };
    zeta + v_norm + mu.sqrt() * div_norm
}

/// Axis of Gaussian-window centres with the given spacing, symmetric about
/// the origin.
pub fn window_centres(span: f64, spacing: f64) -> Vec<f64> {
    let k = (span / spacing).ceil() as i64;
    (-k..=k).map(|i| i as f64 * spacing).collect()
}

/// Gaussian-windowed space-time L2 functional:
/// `max over x0 of || exp(-|x-x0|^2) f ||_{L2_t L2_x}` where `f` stacks the
/// given components. `centres` are per-axis window positions (a full product
/// grid in 2D). Errors if a window reaches the domain boundary with
/// non-negligible weight.
pub fn morawetz_norm(
    grid: &Grid,
    times: &[f64],
    components_per_snapshot: &[Vec<Vec<f64>>],
    centres: &[f64],
) -> Result<f64> {
    if times.len() != components_per_snapshot.len() || times.is_empty() {
        return Err(Error::Config("morawetz norm needs matching ladders".into()));
    }
    if centres.is_empty() {
        return Err(Error::Config("morawetz norm needs at least one centre".into()));
    }
    let half = 0.5 * grid.length();
    let worst_edge = centres
        .iter()
        .map(|&a| (-(half - a.abs()).powi(2)).exp())
        .fold(0.0f64, f64::max);
    if worst_edge > 1e-12 {
        return Err(Error::BoundaryContamination { fraction: worst_edge, limit: 1e-12 });
    }
    let n = grid.modes_per_axis();
    // Squared weights per centre along one axis.
    let wsq: Vec<Vec<f64>> = centres
        .iter()
        .map(|&a| {
            (0..n)
                .map(|i| (-2.0 * (grid.coord(i) - a).powi(2)).exp())
                .collect()
        })
        .collect();

    match grid.dim() {
        1 => {
            let mut best = 0.0f64;
            for w in &wsq {
                let mut ladder = Vec::with_capacity(times.len());
                for comps in components_per_snapshot {
                    let mut acc = 0.0;
                    for comp in comps {
                        for (v, ww) in comp.iter().zip(w) {
                            acc += v * v * ww;
                        }
                    }
                    ladder.push(acc * grid.cell_volume());
                }
                best = best.max(time_trapezoid(times, &ladder));
            }
            Ok(best.sqrt())
        }
        _ => {
            // Separable weights: accumulate the x-sums once per x-centre,
            // then scan the y-centres.
            let nc = centres.len();
            let mut sq_integral = vec![vec![0.0f64; nc * nc]; times.len()];
            for (si, comps) in components_per_snapshot.iter().enumerate() {
                for comp in comps {
                    // partial[a][iy] = sum_ix f^2 wx_a
                    let mut partial = vec![0.0f64; nc * n];
                    for iy in 0..n {
                        for ix in 0..n {
                            let f2 = comp[grid.idx2(iy, ix)].powi(2);
                            for (ai, w) in wsq.iter().enumerate() {
                                partial[ai * n + iy] += f2 * w[ix];
                            }
                        }
                    }
                    for ai in 0..nc {
                        for (bi, w) in wsq.iter().enumerate() {
                            let mut acc = 0.0;
                            for iy in 0..n {
                                acc += partial[ai * n + iy] * w[iy];
                            }
                            sq_integral[si][ai * nc + bi] += acc * grid.cell_volume();
                        }
                    }
                }
            }
            let mut best = 0.0f64;
            for centre in 0..nc * nc {
                let ladder: Vec<f64> = sq_integral.iter().map(|s| s[centre]).collect();
                best = best.max(time_trapezoid(times, &ladder));
            }
            Ok(best.sqrt())
        }
    }
}

fn time_trapezoid(times: &[f64], vals: &[f64]) -> f64 {
    if times.len() < 2 {
        return 0.0;
    }
    let mut acc = 0.0;
    for i in 1..times.len() {
        acc += 0.5 * (times[i] - times[i - 1]) * (vals[i] + vals[i - 1]);
    }
    acc
}
