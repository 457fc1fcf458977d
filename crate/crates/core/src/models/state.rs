use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{Grid, SpectralField};

/// Horizontal velocity: one field in 1D, two components in 2D.
#[derive(Clone, Debug)]
pub enum Velocity {
    OneD(SpectralField),
    TwoD(SpectralField, SpectralField),
}

impl Velocity {
    pub fn zeros(grid: &Grid) -> Self {
        match grid.dim() {
            1 => Velocity::OneD(SpectralField::zeros(grid)),
            _ => Velocity::TwoD(SpectralField::zeros(grid), SpectralField::zeros(grid)),
        }
    }

    pub fn components(&self) -> Vec<&SpectralField> {
        match self {
            Velocity::OneD(v) => vec![v],
            Velocity::TwoD(vx, vy) => vec![vx, vy],
        }
    }

    pub fn map<F: Fn(&SpectralField) -> SpectralField>(&self, f: F) -> Self {
        match self {
            Velocity::OneD(v) => Velocity::OneD(f(v)),
            Velocity::TwoD(vx, vy) => Velocity::TwoD(f(vx), f(vy)),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        match (self, other) {
            (Velocity::OneD(a), Velocity::OneD(b)) => Velocity::OneD(a.add(b)),
            (Velocity::TwoD(ax, ay), Velocity::TwoD(bx, by)) => {
                Velocity::TwoD(ax.add(bx), ay.add(by))
            }
            _ => unreachable!("velocity dimensions cannot mix"),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        match (self, other) {
            (Velocity::OneD(a), Velocity::OneD(b)) => Velocity::OneD(a.sub(b)),
            (Velocity::TwoD(ax, ay), Velocity::TwoD(bx, by)) => {
                Velocity::TwoD(ax.sub(bx), ay.sub(by))
            }
            _ => unreachable!("velocity dimensions cannot mix"),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|f| f.scale(s))
    }
}

/// The unknowns of one model at one time, stored spectrally.
#[derive(Clone, Debug)]
pub struct State {
    pub t: f64,
    pub zeta: SpectralField,
    pub v: Velocity,
}

impl State {
    pub fn new(t: f64, zeta: SpectralField, v: Velocity) -> Self {
        State { t, zeta, v }
    }

    pub fn zeros(grid: &Grid) -> Self {
        State {
            t: 0.0,
            zeta: SpectralField::zeros(grid),
            v: Velocity::zeros(grid),
        }
    }

    pub fn grid(&self) -> &Grid {
        self.zeta.grid()
    }

    /// Smallest physical depth `1 + eps*zeta` on the grid.
    pub fn min_depth(&self, eps: f64) -> f64 {
        self.zeta
            .to_physical()
            .iter()
            .fold(f64::INFINITY, |m, &z| m.min(1.0 + eps * z))
    }

    pub fn check_depth_floor(&self, eps: f64, h0: f64) -> Result<f64> {
        let min_depth = self.min_depth(eps);
        if min_depth < h0 {
            Err(Error::DepthFloor { min_depth, floor: h0 })
        } else {
            Ok(min_depth)
        }
    }

    /// Conserved zero mode of the surface (total mass up to normalization).
    pub fn mass(&self) -> Complex64 {
        self.zeta.zero_mode()
    }

    pub fn fields(&self) -> Vec<&SpectralField> {
        let mut out = vec![&self.zeta];
        out.extend(self.v.components());
        out
    }

    /// Worst conjugate-symmetry defect across all fields.
    pub fn symmetry_defect(&self) -> f64 {
        self.fields()
            .iter()
            .map(|f| f.symmetry_defect())
            .fold(0.0, f64::max)
    }

    /// Relative share of squared field mass inside the boundary strip of
    /// relative width `strip` at each domain edge.
    pub fn boundary_mass_fraction(&self, strip: f64) -> f64 {
        let grid = self.grid().clone();
        let n = grid.modes_per_axis();
        let cells = ((strip * n as f64).ceil() as usize).max(1);
        let edge = |i: usize| i < cells || i >= n - cells;
        let mut boundary = 0.0;
        let mut total = 0.0;
        for f in self.fields() {
            let phys = f.to_physical();
            match grid.dim() {
                1 => {
                    for (i, v) in phys.iter().enumerate() {
                        let w = v * v;
                        total += w;
                        if edge(i) {
                            boundary += w;
                        }
                    }
                }
                _ => {
                    for iy in 0..n {
                        for ix in 0..n {
                            let w = phys[grid.idx2(iy, ix)].powi(2);
                            total += w;
                            if edge(ix) || edge(iy) {
                                boundary += w;
                            }
                        }
                    }
                }
            }
        }
        if total > 0.0 {
            boundary / total
        } else {
            0.0
        }
    }
}
