use super::field::SpectralField;
use super::multiplier::{apply_multiplier, MultiplierSpec};
use crate::error::Result;

/// The reference bump: smooth, even, equal to 1 on [-1/2, 1/2], supported in
/// [-1, 1] and nonincreasing on the positive axis. Built from the standard
/// `exp(-1/t)` smoothstep, so all derivatives vanish at both ends of the
/// transition.
pub fn phi0(y: f64) -> f64 {
    let a = y.abs();
    if a <= 0.5 {
        1.0
    } else if a >= 1.0 {
        0.0
    } else {
        1.0 - smoothstep(2.0 * a - 1.0)
    }
}

fn smoothstep(t: f64) -> f64 {
    let f = |s: f64| if s <= 0.0 { 0.0 } else { (-1.0 / s).exp() };
    let num = f(t);
    num / (num + f(1.0 - t))
}

/// Dyadic block `P_j(y) = phi0(2^{-j-1} y) - phi0(2^{-j} y)`, supported in
/// the annulus `[2^{j-1}, 2^{j+1}]`.
pub fn dyadic_block(j: i32, y: f64) -> f64 {
    phi0(2f64.powi(-j - 1) * y) - phi0(2f64.powi(-j) * y)
}

/// Apply the dyadic frequency block `P_j(|xi|)`.
pub fn dyadic_filter(sf: &SpectralField, j: i32) -> Result<SpectralField> {
    apply_multiplier(sf, &MultiplierSpec::radial(move |r| dyadic_block(j, r)))
}

/// Low block `phi0(|xi|)` of the inhomogeneous decomposition.
pub fn low_block(sf: &SpectralField) -> Result<SpectralField> {
    apply_multiplier(sf, &MultiplierSpec::radial(phi0))
}

/// Low-pass cutoff `chi(sqrt(mu) |xi|)` with `chi = phi0` scaled to the given
/// support radius (cutoff equals 1 for `sqrt(mu) |xi| <= radius/2`).
pub fn lowpass_cutoff(sf: &SpectralField, mu: f64, support_radius: f64) -> Result<SpectralField> {
    let m = MultiplierSpec::radial(move |r| phi0(mu.sqrt() * r / support_radius));
    apply_multiplier(sf, &m)
}

/// Indices `j` whose dyadic annulus intersects `[0, xi_max]`.
pub fn relevant_blocks(xi_max: f64) -> std::ops::RangeInclusive<i32> {
    let hi = if xi_max <= 0.0 {
        0
    } else {
        xi_max.log2().ceil() as i32 + 1
    };
    0..=hi
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::grid::Grid;
    use rand::{Rng, SeedableRng};

    #[test]
    fn profile_shape() {
        assert_eq!(phi0(0.0), 1.0);
        assert_eq!(phi0(0.5), 1.0);
        assert_eq!(phi0(1.0), 0.0);
        assert_eq!(phi0(-0.3), 1.0);
        let v = phi0(0.75);
        assert!(v > 0.0 && v < 1.0);
        // Nonincreasing on the positive axis.
        let mut prev = 1.0;
        for i in 0..=100 {
            let v = phi0(i as f64 / 50.0);
            assert!(v <= prev + 1e-15);
            prev = v;
        }
    }

    #[test]
    fn blocks_lie_in_unit_interval_and_partition() {
        for &y in &[0.01, 0.3, 1.0, 2.7, 31.0, 500.0] {
            let mut sum = phi0(y);
            for j in relevant_blocks(600.0) {
                let p = dyadic_block(j, y);
                assert!((-1e-15..=1.0 + 1e-15).contains(&p), "P_{j}({y}) = {p}");
                sum += p;
            }
            assert!((sum - 1.0).abs() < 1e-12, "partition at y = {y}: {sum}");
        }
    }

    #[test]
    fn partition_reconstructs_band_limited_field() {
        let g = Grid::new_1d(256, 40.0).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        let vals: Vec<f64> = (0..256).map(|_| rng.random_range(-1.0..1.0)).collect();
        let f = SpectralField::from_physical(&g, &vals).unwrap();
        let mut acc = low_block(&f).unwrap();
        for j in relevant_blocks(g.xi_max()) {
            acc = acc.add(&dyadic_filter(&f, j).unwrap());
        }
        assert!(acc.sub(&f).mode_l2() <= 1e-12 * f.mode_l2());
    }

    #[test]
    fn block_applied_twice_contracts() {
        let g = Grid::new_1d(128, 25.0).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(29);
        let vals: Vec<f64> = (0..128).map(|_| rng.random_range(-1.0..1.0)).collect();
        let f = SpectralField::from_physical(&g, &vals).unwrap();
        for j in [0, 1, 3] {
            let once = dyadic_filter(&f, j).unwrap();
            let twice = dyadic_filter(&once, j).unwrap();
            assert!(twice.mode_l2() <= once.mode_l2() + 1e-15);
        }
    }

    #[test]
    fn vanishing_mu_cutoff_is_identity_on_band_limited_fields() {
        let g = Grid::new_1d(64, 8.0).unwrap();
        let vals: Vec<f64> = (0..64).map(|i| (g.coord(i)).cos()).collect();
        let f = SpectralField::from_physical(&g, &vals).unwrap();
        let cut = lowpass_cutoff(&f, 1e-9, 1.0).unwrap();
        assert!(cut.sub(&f).mode_l2() <= 1e-13 * f.mode_l2());
    }
}
