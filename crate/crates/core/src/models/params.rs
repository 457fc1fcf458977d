use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coefficients of the four-parameter Boussinesq family.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AbcdParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl AbcdParams {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let p = AbcdParams { a, b, c, d };
        p.check_admissible()?;
        Ok(p)
    }

    /// The classical system: a = b = c = 0, d = 1/3.
    pub fn classical() -> Self {
        AbcdParams { a: 0.0, b: 0.0, c: 0.0, d: 1.0 / 3.0 }
    }

    /// The non-dispersive shallow-water reduction (all coefficients zero).
    pub fn shallow_water() -> Self {
        AbcdParams { a: 0.0, b: 0.0, c: 0.0, d: 0.0 }
    }

    /// Well-posedness constraint: b, d >= 0 and a, c <= 0.
    pub fn check_admissible(&self) -> Result<()> {
        let ok = self.b >= 0.0
            && self.d >= 0.0
            && self.a <= 0.0
            && self.c <= 0.0
            && [self.a, self.b, self.c, self.d].iter().all(|v| v.is_finite());
        if ok {
            Ok(())
        } else {
            Err(Error::InadmissibleAbcd { a: self.a, b: self.b, c: self.c, d: self.d })
        }
    }

    pub fn sum(&self) -> f64 {
        self.a + self.b + self.c + self.d
    }

    pub fn sum_is_zero(&self) -> bool {
        let scale = 1.0 + self.a.abs() + self.b.abs() + self.c.abs() + self.d.abs();
        self.sum().abs() <= 1e-12 * scale
    }

    /// The product `(a+b)(a+d)(c+b)(c+d)` whose vanishing, together with a
    /// zero sum, collapses the phase to `g(r) = r`.
    pub fn degeneracy_product(&self) -> f64 {
        (self.a + self.b) * (self.a + self.d) * (self.c + self.b) * (self.c + self.d)
    }

    /// Non-degeneracy: product^2 + sum^2 > 0 (up to rounding scale).
    pub fn is_non_degenerate(&self) -> bool {
        let scale = 1.0 + self.a.abs() + self.b.abs() + self.c.abs() + self.d.abs();
        !(self.sum_is_zero() && self.degeneracy_product().abs() <= 1e-12 * scale.powi(4))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Classical,
    Abcd,
    GreenNaghdi,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Dim {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2")]
    Two,
}

impl Dim {
    pub fn as_usize(self) -> usize {
        match self {
            Dim::One => 1,
            Dim::Two => 2,
        }
    }
}

/// Which system is being solved and at which point of parameter space.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub dim: Dim,
    pub eps: f64,
    pub mu: f64,
    pub abcd: AbcdParams,
    /// Depth floor: the solver treats `1 + eps*zeta < h0` as a fault.
    pub h0: f64,
}

impl ModelSpec {
    pub fn new(kind: ModelKind, dim: Dim, eps: f64, mu: f64, abcd: AbcdParams, h0: f64) -> Result<Self> {
        let spec = ModelSpec { kind, dim, eps, mu, abcd, h0 };
        spec.validate()?;
        Ok(spec)
    }

    pub fn classical(dim: Dim, eps: f64, mu: f64) -> Result<Self> {
        Self::new(ModelKind::Classical, dim, eps, mu, AbcdParams::classical(), 0.5)
    }

    pub fn green_naghdi(dim: Dim, eps: f64, mu: f64, h0: f64) -> Result<Self> {
        Self::new(ModelKind::GreenNaghdi, dim, eps, mu, AbcdParams::classical(), h0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps <= 1.0) {
            return Err(Error::InvalidModel(format!("eps must lie in (0, 1], got {}", self.eps)));
        }
        if !(self.mu > 0.0 && self.mu <= 1.0) {
            return Err(Error::InvalidModel(format!("mu must lie in (0, 1], got {}", self.mu)));
        }
        if !(self.h0 > 0.0) {
            return Err(Error::InvalidModel(format!("h0 must be positive, got {}", self.h0)));
        }
        match self.kind {
            ModelKind::Classical | ModelKind::GreenNaghdi => {
                let c = AbcdParams::classical();
                if self.abcd != c {
                    return Err(Error::InvalidModel(
                        "classical/Green-Naghdi kinds fix abcd = (0, 0, 0, 1/3)".into(),
                    ));
                }
            }
            ModelKind::Abcd => self.abcd.check_admissible()?,
        }
        Ok(())
    }

    /// Dealias band fraction: 2/3 rule for quadratic models, 1/2 for the
    /// Green-Naghdi products of three and more factors.
    pub fn dealias_fraction(&self) -> f64 {
        match self.kind {
            ModelKind::GreenNaghdi => 0.5,
            _ => 2.0 / 3.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn admissibility_enforced() {
        assert!(AbcdParams::new(0.1, 0.0, 0.0, 0.0).is_err()); // a > 0
        assert!(AbcdParams::new(0.0, -0.1, 0.0, 0.0).is_err()); // b < 0
        assert!(AbcdParams::new(-0.5, 0.25, -0.25, 0.5).is_ok());
    }

    #[test]
    fn degeneracy_product_example() {
        // (a, b, c, d) = (-1/6, 1/2, -1/3, 0): sum zero, product 1/324.
        let p = AbcdParams::new(-1.0 / 6.0, 0.5, -1.0 / 3.0, 0.0).unwrap();
        assert!(p.sum_is_zero());
        assert!((p.degeneracy_product() - 1.0 / 324.0).abs() < 1e-15);
        assert!(p.is_non_degenerate());
        // All-zero coefficients are degenerate.
        assert!(!AbcdParams::shallow_water().is_non_degenerate());
    }

    #[test]
    fn parameter_ranges_validated() {
        assert!(ModelSpec::classical(Dim::One, 0.0, 1.0).is_err());
        assert!(ModelSpec::classical(Dim::One, 1.5, 1.0).is_err());
        assert!(ModelSpec::classical(Dim::One, 0.5, 0.0).is_err());
        assert!(ModelSpec::classical(Dim::One, 0.5, 1.0).is_ok());
        assert!(ModelSpec::green_naghdi(Dim::One, 0.5, 1.0, 0.0).is_err());
    }
}
