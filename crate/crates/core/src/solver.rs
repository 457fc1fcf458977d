//! Time integration. The stiff `(1/eps) A(D)` part is advanced exactly by
//! the per-mode semigroup (integrating factor); the slow tendency is
//! advanced with 4th-order Lawson Runge-Kutta, so linear-only runs reproduce
//! the closed-form propagator to rounding.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{
    euler2d_rhs, linear_energy, nonlinearity, LinearPropagator, ModelKind, ModelSpec, State,
    Tendency, TendencyOpts, Velocity,
};
use crate::spectral::{riesz_gradient_projector, Grid, SpectralField};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DepthFloorAction {
    Abort,
    Warn,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// Time step rule: dt = min(c1, c2 * eps).
    pub c1: f64,
    pub c2: f64,
    /// Relative residual target for the Green-Naghdi momentum solve.
    pub gn_tol: f64,
    pub depth_floor_action: DepthFloorAction,
    /// Abort threshold for the relative field mass in the boundary strip.
    pub boundary_limit: f64,
    /// Relative width of the monitored strip at each domain edge.
    pub boundary_strip: f64,
    /// Evolve only the linear part (tendency forced to zero).
    pub linear_only: bool,
    /// Number of stored snapshots including both endpoints.
    pub snapshot_count: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            c1: 0.01,
            c2: 0.5,
            gn_tol: 1e-10,
            depth_floor_action: DepthFloorAction::Abort,
            boundary_limit: 1e-8,
            boundary_strip: 0.02,
            linear_only: false,
            snapshot_count: 33,
        }
    }
}

impl SolverConfig {
    pub fn dt(&self, eps: f64) -> f64 {
        self.c1.min(self.c2 * eps)
    }

    fn tendency_opts(&self) -> TendencyOpts {
        let mut opts = TendencyOpts::default();
        opts.gn.tol = self.gn_tol;
        opts
    }
}

/// Per-step scalar diagnostics.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct StepDiag {
    pub step: usize,
    pub time: f64,
    /// Zero mode of zeta (conserved by every model).
    pub mass: f64,
    /// Quadratic invariant of the linear flow (conserved on linear runs).
    pub energy: f64,
    pub min_depth: f64,
    pub boundary_mass: f64,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub model: ModelSpec,
    pub times: Vec<f64>,
    pub snapshots: Vec<State>,
    pub diagnostics: Vec<StepDiag>,
    /// Largest X^3_mu norm over the stored snapshots (the measured M).
    pub max_x3_norm: f64,
    /// Worst dealias-band spill seen in any tendency evaluation.
    pub max_band_spill: f64,
    /// Depth-floor warnings in Warn mode.
    pub depth_warnings: usize,
}

struct StagePropagators {
    half: LinearPropagator,
    full: LinearPropagator,
}

/// One Lawson-RK4 step of size dt. Exact on the linear subproblem.
pub fn step(spec: &ModelSpec, u: &State, dt: f64, config: &SolverConfig) -> Result<State> {
    let grid = u.grid().clone();
    let props = StagePropagators {
        half: LinearPropagator::new(spec, &grid, 0.5 * dt)?,
        full: LinearPropagator::new(spec, &grid, dt)?,
    };
    lawson_step(spec, u, dt, config, &props).map(|(state, _)| state)
}

fn add_scaled(u: &State, k: &Tendency, s: f64) -> State {
    State::new(u.t, u.zeta.add(&k.zeta.scale(s)), u.v.add(&k.v.scale(s)))
}

fn propagate_tendency(p: &LinearPropagator, k: &Tendency) -> Tendency {
    let carrier = State::new(0.0, k.zeta.clone(), k.v.clone());
    let moved = p.apply(&carrier);
    Tendency { zeta: moved.zeta, v: moved.v, band_spill: k.band_spill }
}

fn lawson_step(
    spec: &ModelSpec,
    u: &State,
    dt: f64,
    config: &SolverConfig,
    props: &StagePropagators,
) -> Result<(State, f64)> {
    if !(dt > 0.0) {
        return Err(Error::Config(format!("step size must be positive, got {dt}")));
    }
    let eu_full = props.full.apply(u);
    if config.linear_only {
        let mut out = eu_full;
        out.t = u.t + dt;
        return Ok((out, 0.0));
    }
    let opts = config.tendency_opts();
    let tend = |state: &State| -> Result<Tendency> { eval_tendency(spec, state, &opts, config) };

    let k1 = tend(u)?;
    let a2 = props.half.apply(&add_scaled(u, &k1, 0.5 * dt));
    let k2 = tend(&a2)?;
    let eu_half = props.half.apply(u);
    let a3 = add_scaled(&eu_half, &k2, 0.5 * dt);
    let k3 = tend(&a3)?;
    let ek3 = propagate_tendency(&props.half, &k3);
    let a4 = State::new(u.t, eu_full.zeta.add(&ek3.zeta.scale(dt)), eu_full.v.add(&ek3.v.scale(dt)));
    let k4 = tend(&a4)?;

    let ek1 = propagate_tendency(&props.full, &k1);
    let ek2 = propagate_tendency(&props.half, &k2);
    let sixth = dt / 6.0;
    let zeta = eu_full
        .zeta
        .add(&ek1.zeta.scale(sixth))
        .add(&ek2.zeta.scale(2.0 * sixth))
        .add(&ek3.zeta.scale(2.0 * sixth))
        .add(&k4.zeta.scale(sixth));
    let v = eu_full
        .v
        .add(&ek1.v.scale(sixth))
        .add(&ek2.v.scale(2.0 * sixth))
        .add(&ek3.v.scale(2.0 * sixth))
        .add(&k4.v.scale(sixth));
    let spill = k1
        .band_spill
        .max(k2.band_spill)
        .max(k3.band_spill)
        .max(k4.band_spill);
    Ok((State::new(u.t + dt, zeta, v), spill))
}

/// Tendency evaluation honoring the depth-floor action: in Warn mode a
/// Green-Naghdi floor violation is retried with a tiny positivity guard.
fn eval_tendency(
    spec: &ModelSpec,
    state: &State,
    opts: &TendencyOpts,
    config: &SolverConfig,
) -> Result<Tendency> {
    match nonlinearity(spec, state, opts) {
        Err(Error::DepthFloor { min_depth, floor })
            if config.depth_floor_action == DepthFloorAction::Warn && min_depth > 0.0 =>
        {
            let mut relaxed = *spec;
            relaxed.h0 = (0.5 * min_depth).max(1e-9);
            let _ = floor;
            nonlinearity(&relaxed, state, opts)
        }
        other => other,
    }
}

/// Integrate from `u0` to `t_end`, storing `config.snapshot_count` evenly
/// spaced snapshots (the final substep of each segment is shortened so
/// snapshot times are hit exactly, with no interpolation).
pub fn run(spec: &ModelSpec, u0: &State, t_end: f64, config: &SolverConfig) -> Result<Trajectory> {
    spec.validate()?;
    if t_end < 0.0 {
        return Err(Error::Config(format!("t_end must be nonnegative, got {t_end}")));
    }
    if spec.kind == ModelKind::GreenNaghdi || !config.linear_only {
        u0.check_depth_floor(spec.eps, spec.h0).or_else(|e| match config.depth_floor_action {
            DepthFloorAction::Abort => Err(e),
            DepthFloorAction::Warn => Ok(0.0),
        })?;
    }
    let mut snapshots = vec![clone_at(u0, 0.0)];
    let mut times = vec![0.0];
    let mut diagnostics = Vec::new();
    let mut max_spill = 0f64;
    let mut depth_warnings = 0usize;

    if t_end > 0.0 {
        let count = config.snapshot_count.max(2);
        let snap_times: Vec<f64> = (1..count)
            .map(|i| t_end * i as f64 / (count - 1) as f64)
            .collect();
        let dt_target = config.dt(spec.eps);
        let grid = u0.grid().clone();
        let mut prop_cache: HashMap<u64, StagePropagators> = HashMap::new();
        let mut u = clone_at(u0, 0.0);
        let mut t_prev = 0.0;
        let mut step_index = 0usize;
        record_diag(spec, &u, config, step_index, &mut diagnostics, &mut depth_warnings)?;
        for ts in snap_times {
            let seg = ts - t_prev;
            let nsub = (seg / dt_target).ceil().max(1.0) as usize;
            let h = seg / nsub as f64;
            let props = prop_cache.entry(h.to_bits()).or_insert(StagePropagators {
                half: LinearPropagator::new(spec, &grid, 0.5 * h)?,
                full: LinearPropagator::new(spec, &grid, h)?,
            });
            for _ in 0..nsub {
                let (next, spill) = lawson_step(spec, &u, h, config, props)?;
                max_spill = max_spill.max(spill);
                u = next;
                step_index += 1;
                record_diag(spec, &u, config, step_index, &mut diagnostics, &mut depth_warnings)?;
            }
            u.t = ts; // absorb accumulated rounding in the time stamp
            times.push(ts);
            snapshots.push(u.clone());
            t_prev = ts;
        }
    }

    let max_x3_norm = snapshots
        .iter()
        .map(|s| crate::norms::x_k_mu_norm(s, 3, spec.mu))
        .fold(0.0, f64::max);
    Ok(Trajectory {
        model: *spec,
        times,
        snapshots,
        diagnostics,
        max_x3_norm,
        max_band_spill: max_spill,
        depth_warnings,
    })
}

fn clone_at(u: &State, t: f64) -> State {
    let mut s = u.clone();
    s.t = t;
    s
}

fn record_diag(
    spec: &ModelSpec,
    u: &State,
    config: &SolverConfig,
    step: usize,
    diagnostics: &mut Vec<StepDiag>,
    depth_warnings: &mut usize,
) -> Result<()> {
    let boundary_mass = u.boundary_mass_fraction(config.boundary_strip);
    if boundary_mass > config.boundary_limit {
        return Err(Error::BoundaryContamination {
            fraction: boundary_mass,
            limit: config.boundary_limit,
        });
    }
    let min_depth = u.min_depth(spec.eps);
    if min_depth < spec.h0 {
        match config.depth_floor_action {
            DepthFloorAction::Abort => {
                return Err(Error::DepthFloor { min_depth, floor: spec.h0 })
            }
            DepthFloorAction::Warn => *depth_warnings += 1,
        }
    }
    diagnostics.push(StepDiag {
        step,
        time: u.t,
        mass: u.mass().re,
        energy: linear_energy(spec, u),
        min_depth,
        boundary_mass,
    });
    Ok(())
}

/// Free linear evolution of the initial datum: the comparison object of the
/// rigid-lid estimates. In 2D the velocity is first projected onto its
/// gradient part, which reproduces the `(1, d1/Delta, d2/Delta)`-projected
/// propagator applied to `(zeta0, div V0)`.
pub fn corrector_reference(spec: &ModelSpec, u0: &State, t: f64) -> Result<State> {
    let grid = u0.grid().clone();
    let base = match &u0.v {
        Velocity::OneD(_) => clone_at(u0, 0.0),
        Velocity::TwoD(vx, vy) => {
            let (gx, gy) = riesz_gradient_projector(vx, vy)?;
            State::new(0.0, u0.zeta.clone(), Velocity::TwoD(gx, gy))
        }
    };
    if t == 0.0 {
        return Ok(base);
    }
    let prop = LinearPropagator::new(spec, &grid, t)?;
    let mut out = prop.apply(&base);
    out.t = t;
    Ok(out)
}

/// Vorticity trajectory of the 2D incompressible Euler reference flow.
#[derive(Clone, Debug)]
pub struct VorticityTrajectory {
    pub times: Vec<f64>,
    pub omegas: Vec<SpectralField>,
    /// (total vorticity, enstrophy) per snapshot.
    pub invariants: Vec<(f64, f64)>,
    /// Largest advective CFL number seen.
    pub cfl_max: f64,
}

/// Classical RK4 on the dealiased vorticity equation (no stiff part).
pub fn run_euler2d(
    omega0: &SpectralField,
    t_end: f64,
    config: &SolverConfig,
) -> Result<VorticityTrajectory> {
    let grid = omega0.grid().clone();
    if grid.dim() != 2 {
        return Err(Error::WrongDimension { required: 2 });
    }
    if omega0.zero_mode().norm() > 1e-10 * (1.0 + omega0.mode_l2()) {
        return Err(Error::Config("euler vorticity must be mean-free".into()));
    }
    let mut omegas = vec![omega0.clone()];
    let mut times = vec![0.0];
    let mut invariants = vec![omega_invariants(&grid, omega0)];
    let mut cfl_max = 0.0f64;
    if t_end > 0.0 {
        let count = config.snapshot_count.max(2);
        let dt_target = config.c1;
        let mut om = omega0.clone();
        let mut t_prev = 0.0;
        for i in 1..count {
            let ts = t_end * i as f64 / (count - 1) as f64;
            let seg = ts - t_prev;
            let nsub = (seg / dt_target).ceil().max(1.0) as usize;
            let h = seg / nsub as f64;
            for _ in 0..nsub {
                cfl_max = cfl_max.max(euler_cfl(&om, h, grid.dx())?);
                om = rk4_omega(&om, h)?;
            }
            times.push(ts);
            omegas.push(om.clone());
            invariants.push(omega_invariants(&grid, &om));
            t_prev = ts;
        }
    }
    Ok(VorticityTrajectory { times, omegas, invariants, cfl_max })
}

fn rk4_omega(om: &SpectralField, h: f64) -> Result<SpectralField> {
    let k1 = euler2d_rhs(om)?;
    let k2 = euler2d_rhs(&om.add(&k1.scale(0.5 * h)))?;
    let k3 = euler2d_rhs(&om.add(&k2.scale(0.5 * h)))?;
    let k4 = euler2d_rhs(&om.add(&k3.scale(h)))?;
    Ok(om
        .add(&k1.scale(h / 6.0))
        .add(&k2.scale(h / 3.0))
        .add(&k3.scale(h / 3.0))
        .add(&k4.scale(h / 6.0)))
}

fn euler_cfl(om: &SpectralField, h: f64, dx: f64) -> Result<f64> {
    let (ux, uy) = crate::models::biot_savart(om)?;
    let umax = ux
        .to_physical()
        .iter()
        .chain(uy.to_physical().iter())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    Ok(umax * h / dx)
}

fn omega_invariants(grid: &Grid, om: &SpectralField) -> (f64, f64) {
    let total = om.zero_mode().re * (grid.point_count() as f64).sqrt() * grid.cell_volume();
    let enstrophy = om.coeffs().iter().map(|c| c.norm_sqr()).sum::<f64>() * grid.cell_volume();
    (total, enstrophy)
}

/// Parameters of the Gaussian initial-data family used across experiments:
/// `zeta0 = A_z exp(-|x|^2/w^2)` and a velocity built from Gaussian
/// potentials (plus an optional seeded band-limited perturbation).
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct DataParams {
    pub zeta_amp: f64,
    pub vel_amp: f64,
    /// Amplitude of the rotational potential (2D only).
    pub rot_amp: f64,
    pub width: f64,
    pub noise_amp: f64,
    pub seed: u64,
}

impl Default for DataParams {
    fn default() -> Self {
        DataParams {
            zeta_amp: 0.4,
            vel_amp: 0.3,
            rot_amp: 0.3,
            width: 2.0,
            noise_amp: 0.0,
            seed: 0,
        }
    }
}

/// Build the initial state, band-limited to the model's dealias band.
pub fn gaussian_state(grid: &Grid, spec: &ModelSpec, data: &DataParams) -> Result<State> {
    let keep = grid.band_keep(spec.dealias_fraction());
    let w2 = data.width * data.width;
    let state = match grid.dim() {
        1 => {
            let zeta: Vec<f64> = (0..grid.point_count())
                .map(|i| data.zeta_amp * (-grid.coord(i).powi(2) / w2).exp())
                .collect();
            let vel: Vec<f64> = (0..grid.point_count())
                .map(|i| data.vel_amp * (-grid.coord(i).powi(2) / w2).exp())
                .collect();
            State::new(
                0.0,
                noisy_field(grid, &zeta, data, 1)?.masked(&keep),
                Velocity::OneD(noisy_field(grid, &vel, data, 2)?.masked(&keep)),
            )
        }
        _ => {
            let n = grid.modes_per_axis();
            let mut zeta = vec![0.0; grid.point_count()];
            let mut phi = vec![0.0; grid.point_count()];
            let mut psi = vec![0.0; grid.point_count()];
            for iy in 0..n {
                for ix in 0..n {
                    let r2 = grid.coord(ix).powi(2) + grid.coord(iy).powi(2);
                    let idx = grid.idx2(iy, ix);
                    zeta[idx] = data.zeta_amp * (-r2 / w2).exp();
                    phi[idx] = (-r2 / w2).exp();
                    psi[idx] = (-r2 / (1.44 * w2)).exp();
                }
            }
            let phi = SpectralField::from_physical(grid, &phi)?;
            let psi = SpectralField::from_physical(grid, &psi)?;
            // V = vel_amp grad(phi) + rot_amp grad^perp(psi), scaled by w so
            // component amplitudes stay O(amp).
            let vx = phi
                .derivative(0)
                .scale(data.vel_amp * data.width)
                .add(&psi.derivative(1).scale(-data.rot_amp * data.width));
            let vy = phi
                .derivative(1)
                .scale(data.vel_amp * data.width)
                .add(&psi.derivative(0).scale(data.rot_amp * data.width));
            State::new(
                0.0,
                noisy_field(grid, &zeta, data, 1)?.masked(&keep),
                Velocity::TwoD(vx.masked(&keep), vy.masked(&keep)),
            )
        }
    };
    state.check_depth_floor(spec.eps, spec.h0)?;
    Ok(state)
}

fn noisy_field(grid: &Grid, base: &[f64], data: &DataParams, salt: u64) -> Result<SpectralField> {
    if data.noise_amp == 0.0 {
        return SpectralField::from_physical(grid, base);
    }
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(data.seed.wrapping_mul(0x9e37_79b9).wrapping_add(salt));
    // Smooth, localized perturbation: white noise shaped by the same
    // Gaussian envelope, then band-limited by the caller's mask.
    let vals: Vec<f64> = base
        .iter()
        .map(|&b| b + data.noise_amp * rng.random_range(-1.0..1.0) * b.abs())
        .collect();
    SpectralField::from_physical(grid, &vals)
}
