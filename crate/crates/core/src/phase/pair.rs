use crate::models::params::AbcdParams;

/// The dispersion phase `g` and amplitude ratio `R` of one abcd system,
/// with closed-form derivatives of `g` up to third order.
///
/// With `u = y^2`, `P(u) = (1 - a u)(1 - c u)` and `Q(u) = (1 + b u)(1 + d u)`,
/// the phase is `g(y) = y sqrt(P/Q)` and `R(y) = sqrt((1 - a u)(1 + d u) /
/// ((1 + b u)(1 - c u)))`. Admissibility (`a, c <= 0 <= b, d`) keeps every
/// factor at least 1 on the numerator side and positive on the denominator
/// side, so nothing here has a pole.
#[derive(Clone, Copy, Debug)]
pub struct PhasePair {
    pub abcd: AbcdParams,
}

impl PhasePair {
    pub fn new(abcd: AbcdParams) -> Self {
        PhasePair { abcd }
    }

    pub fn classical() -> Self {
        PhasePair { abcd: AbcdParams::classical() }
    }

    /// `sqrt(P(u)/Q(u))`, i.e. `g(y)/y` continued through `y = 0`.
    pub fn slope(&self, y: f64) -> f64 {
        let u = y * y;
        (self.p_num(u) / self.q_den(u)).sqrt()
    }

    pub fn g(&self, y: f64) -> f64 {
        y * self.slope(y)
    }

    /// Amplitude ratio between the two components of the semigroup.
    pub fn r_ratio(&self, y: f64) -> f64 {
        let u = y * y;
        let AbcdParams { a, b, c, d } = self.abcd;
        ((1.0 - a * u) * (1.0 + d * u) / ((1.0 + b * u) * (1.0 - c * u))).sqrt()
    }

    /// Linear frequency `omega(xi) = g(sqrt(mu) |xi|) / sqrt(mu)`, evaluated
    /// without the 0/0 at the origin.
    pub fn omega(&self, mu: f64, xi_abs: f64) -> f64 {
        xi_abs * self.slope(mu.sqrt() * xi_abs)
    }

    pub fn g1(&self, y: f64) -> f64 {
        let u = y * y;
        let (w1, _, _) = self.log_derivatives(u);
        self.slope(y) * (1.0 + u * w1)
    }

    pub fn g2(&self, y: f64) -> f64 {
        let u = y * y;
        let (w1, w2, _) = self.log_derivatives(u);
        self.slope(y) * y * (3.0 * w1 + u * w1 * w1 + 2.0 * u * w2)
    }

    pub fn g3(&self, y: f64) -> f64 {
        let u = y * y;
        let (w1, w2, w3) = self.log_derivatives(u);
        let h = 3.0 * w1 + u * w1 * w1 + 2.0 * u * w2;
        self.slope(y)
            * (h * (1.0 + u * w1)
                + 2.0 * u * (5.0 * w2 + w1 * w1 + 2.0 * u * w1 * w2 + 2.0 * u * w3))
    }

    /// All four values at once.
    pub fn derivatives(&self, y: f64) -> (f64, f64, f64, f64) {
        (self.g(y), self.g1(y), self.g2(y), self.g3(y))
    }

    fn p_num(&self, u: f64) -> f64 {
        (1.0 - self.abcd.a * u) * (1.0 - self.abcd.c * u)
    }

    fn q_den(&self, u: f64) -> f64 {
        (1.0 + self.abcd.b * u) * (1.0 + self.abcd.d * u)
    }

    /// First three u-derivatives of `log(P/Q)`.
    fn log_derivatives(&self, u: f64) -> (f64, f64, f64) {
        let AbcdParams { a, b, c, d } = self.abcd;
        let fa = 1.0 - a * u;
        let fc = 1.0 - c * u;
        let fb = 1.0 + b * u;
        let fd = 1.0 + d * u;
        let w1 = -a / fa - c / fc - b / fb - d / fd;
        let w2 = -a * a / (fa * fa) - c * c / (fc * fc) + b * b / (fb * fb) + d * d / (fd * fd);
        let w3 = -2.0 * a * a * a / (fa * fa * fa) - 2.0 * c * c * c / (fc * fc * fc)
            - 2.0 * b * b * b / (fb * fb * fb)
            - 2.0 * d * d * d / (fd * fd * fd);
        (w1, w2, w3)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// 6th-order central difference of a scalar function.
    pub fn fd6<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
        (-f(x - 3.0 * h) + 9.0 * f(x - 2.0 * h) - 45.0 * f(x - h) + 45.0 * f(x + h)
            - 9.0 * f(x + 2.0 * h)
            + f(x + 3.0 * h))
            / (60.0 * h)
    }

    #[test]
    fn classical_values() {
        let p = PhasePair::classical();
        assert_eq!(p.g(0.0), 0.0);
        assert!((p.g1(0.0) - 1.0).abs() < 1e-15);
        // g(1) = 1/sqrt(4/3) = sqrt(3)/2
        assert!((p.g(1.0) - 3f64.sqrt() / 2.0).abs() < 1e-14);
        assert!((p.r_ratio(0.0) - 1.0).abs() < 1e-15);
        // R(y)^2 = 1 + y^2/3 for the classical coefficients
        assert!((p.r_ratio(2.0).powi(2) - (1.0 + 4.0 / 3.0)).abs() < 1e-13);
    }

    #[test]
    fn classical_monotone_and_concave() {
        let p = PhasePair::classical();
        for i in 1..200 {
            let y = i as f64 * 0.25;
            assert!(p.g1(y) > 0.0, "g' at {y}");
            assert!(p.g2(y) < 0.0, "g'' at {y}");
        }
    }

    #[test]
    fn classical_tail() {
        // g'(r) ~ 3^{3/2} r^{-3} at infinity.
        let p = PhasePair::classical();
        let r = 1.0e3;
        let expect = 3f64.powf(1.5) * r.powi(-3);
        assert!((p.g1(r) - expect).abs() < 1e-2 * expect);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        let cases = [
            AbcdParams::classical(),
            AbcdParams::new(-1.0 / 6.0, 0.5, -1.0 / 3.0, 0.0).unwrap(),
            AbcdParams::new(-0.4, 0.2, -0.1, 0.7).unwrap(),
            AbcdParams::new(0.0, 0.0, -1.0, 0.0).unwrap(),
        ];
        for abcd in cases {
            let p = PhasePair::new(abcd);
            for _ in 0..50 {
                let r: f64 = rng.random_range(0.05..10.0);
                let h = 1e-2 * r.max(0.2);
                let g1_fd = fd6(|y| p.g(y), r, h);
                assert!(
                    (p.g1(r) - g1_fd).abs() <= 1e-6 * (1.0 + p.g1(r).abs()),
                    "g1 at {r} for {abcd:?}"
                );
                let g2_fd = fd6(|y| p.g1(y), r, h);
                assert!(
                    (p.g2(r) - g2_fd).abs() <= 1e-6 * (1.0 + p.g2(r).abs()),
                    "g2 at {r} for {abcd:?}"
                );
                let g3_fd = fd6(|y| p.g2(y), r, h);
                assert!(
                    (p.g3(r) - g3_fd).abs() <= 1e-5 * (1.0 + p.g3(r).abs()),
                    "g3 at {r} for {abcd:?}"
                );
            }
        }
    }

    #[test]
    fn odd_symmetry() {
        let p = PhasePair::new(AbcdParams::new(-0.2, 0.1, -0.3, 0.4).unwrap());
        for &y in &[0.3, 1.7, 4.0] {
            assert!((p.g(-y) + p.g(y)).abs() < 1e-15);
        }
    }
}
