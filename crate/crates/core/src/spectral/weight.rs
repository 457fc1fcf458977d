use super::grid::Grid;
use crate::error::{Error, Result};

/// Outcome of weighting a physical field by a unit Gaussian centred at `x0`.
pub struct WeightedField {
    pub values: Vec<f64>,
    /// Largest weight value on the domain boundary; the weight is meant to be
    /// negligible there (periodic images are ignored).
    pub boundary_weight: f64,
}

/// Pointwise multiplication by `exp(-|x - x0|^2)` using the plain Euclidean
/// distance on `[-L/2, L/2)^dim`. Errors if `x0` lies outside the domain;
/// callers should treat a non-negligible `boundary_weight` as a warning that
/// the periodic truncation is contaminating the weighted norm.
pub fn gaussian_weight(grid: &Grid, field: &[f64], x0: &[f64]) -> Result<WeightedField> {
    if field.len() != grid.point_count() {
        return Err(Error::ShapeMismatch {
            got: field.len(),
            expected: grid.point_count(),
        });
    }
    if x0.len() != grid.dim() {
        return Err(Error::ShapeMismatch { got: x0.len(), expected: grid.dim() });
    }
    let half = 0.5 * grid.length();
    for &c in x0 {
        if !(-half..half).contains(&c) {
            return Err(Error::Config(format!("weight centre {c} outside [-{half}, {half})")));
        }
    }
    let n = grid.modes_per_axis();
    match grid.dim() {
        1 => {
            let w: Vec<f64> = (0..n)
                .map(|i| (-(grid.coord(i) - x0[0]).powi(2)).exp())
                .collect();
            let boundary_weight = w[0].max((-(half - x0[0]).powi(2)).exp());
            let values = field.iter().zip(&w).map(|(f, w)| f * w).collect();
            Ok(WeightedField { values, boundary_weight })
        }
        _ => {
            let wx: Vec<f64> = (0..n)
                .map(|i| (-(grid.coord(i) - x0[0]).powi(2)).exp())
                .collect();
            let wy: Vec<f64> = (0..n)
                .map(|i| (-(grid.coord(i) - x0[1]).powi(2)).exp())
                .collect();
            let bx = wx[0].max((-(half - x0[0]).powi(2)).exp());
            let by = wy[0].max((-(half - x0[1]).powi(2)).exp());
            let mut values = vec![0.0; field.len()];
            for iy in 0..n {
                for ix in 0..n {
                    let idx = grid.idx2(iy, ix);
                    values[idx] = field[idx] * wx[ix] * wy[iy];
                }
            }
            Ok(WeightedField { values, boundary_weight: bx.max(by) })
        }
    }
}
