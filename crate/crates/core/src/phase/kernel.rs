use num_complex::Complex64;
use serde::Serialize;

use super::classify::classify;
use super::pair::PhasePair;
use crate::error::{Error, Result};
use crate::models::params::AbcdParams;
use crate::spectral::filters::phi0;
use crate::spectral::grid::Grid;

/// Which dispersion relation drives the probe.
#[derive(Clone, Copy, Debug)]
pub enum ProbePhase {
    /// g from an admissible abcd family (classical = (0,0,0,1/3)).
    Abcd(AbcdParams),
    /// g(r) = r: pure transport, the kernel does not decay.
    Wave,
}

impl ProbePhase {
    fn omega(&self, mu: f64, xi_abs: f64) -> f64 {
        match self {
            ProbePhase::Abcd(p) => PhasePair::new(*p).omega(mu, xi_abs),
            ProbePhase::Wave => xi_abs,
        }
    }

    fn group_speed(&self, mu: f64, xi_abs: f64) -> f64 {
        match self {
            ProbePhase::Abcd(p) => PhasePair::new(*p).g1(mu.sqrt() * xi_abs).abs(),
            ProbePhase::Wave => 1.0,
        }
    }
}

/// Frequency band restricting the kernel symbol.
#[derive(Clone, Copy, Debug)]
pub enum ProbeBand {
    /// `chi(sqrt(mu)|xi|)`, equal to 1 below `1/(2 sqrt(mu))`, supported
    /// below `1/sqrt(mu)`.
    Low,
    /// `1 - chi(sqrt(mu)|xi|)`, tapered smoothly at the spectral window edge.
    High,
    /// Dyadic annulus `P_j(sqrt(mu)|xi|)`.
    Dyadic(i32),
    /// No band restriction beyond the smooth window taper.
    Full,
}

#[derive(Clone, Debug)]
pub struct KernelProbeSpec {
    pub phase: ProbePhase,
    pub mu: f64,
    pub band: ProbeBand,
    /// Power weight `|xi|^s`.
    pub weight_exponent: f64,
    /// Include the odd factor `sgn(xi)` (1D only).
    pub sign_factor: bool,
    /// Bessel factor `(1 + mu |xi|^2)^beta`; negative beta damps the tail.
    pub bessel_exponent: f64,
    /// Strictly increasing, strictly positive sample times.
    pub times: Vec<f64>,
    /// Exponent expected from the relevant decay estimate, if any.
    pub predicted_theta: Option<f64>,
    /// 1 or 2.
    pub dim: usize,
}

impl KernelProbeSpec {
    pub fn new_1d(phase: ProbePhase, mu: f64, band: ProbeBand, times: Vec<f64>) -> Self {
        KernelProbeSpec {
            phase,
            mu,
            band,
            weight_exponent: 0.0,
            sign_factor: false,
            bessel_exponent: 0.0,
            times,
            predicted_theta: None,
            dim: 1,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct KernelProbeResult {
    pub times: Vec<f64>,
    pub sup_values: Vec<f64>,
    /// Decay exponent theta of `sup_x |K(t)| ~ t^(-theta)`.
    pub fitted_theta: f64,
    /// Half-width of an approximate 95% confidence band on theta.
    pub theta_band: f64,
    pub predicted_theta: Option<f64>,
}

const MODE_CAP: usize = 1 << 22;

/// Evaluate `sup_x |F^{-1}(e^{i t omega(|xi|)} band(xi) weight(xi))|` over the
/// requested times and fit the decay exponent.
///
/// The grid is sized from the fastest group speed on the band so that the
/// kernel stays inside the box at the largest time; unbounded symbols get a
/// smooth roll-off at the spectral window edge, which changes the kernel by
/// a fixed fast-decaying remainder and leaves the fitted exponent intact.
pub fn kernel_decay_probe(spec: &KernelProbeSpec) -> Result<KernelProbeResult> {
    validate(spec)?;
    let mu = spec.mu;
    let (xi_band, needs_taper) = band_extent(spec);

    // Fastest group speed over the band (sampled; g' is smooth).
    let mut vmax = 0f64;
    for i in 0..=512 {
        let xi = xi_band * i as f64 / 512.0;
        vmax = vmax.max(spec.phase.group_speed(mu, xi));
    }
    let t_max = *spec.times.last().unwrap();
    let len = 2.0 * (1.15 * t_max * vmax + 30.0);
    let dx = std::f64::consts::PI / (2.5 * xi_band);
    let mut n = ((len / dx).ceil() as usize).next_power_of_two().max(64);
    if spec.dim == 2 {
        // 2D probes pay n^2; keep the sampling a little leaner.
        n = ((len / (dx * 1.6)).ceil() as usize).next_power_of_two().max(64);
    }
    let total = if spec.dim == 2 { n * n } else { n };
    if total > MODE_CAP {
        return Err(Error::ResolutionInsufficient { required: total, cap: MODE_CAP });
    }
    let grid = if spec.dim == 2 {
        Grid::new_2d(n, len)?
    } else {
        Grid::new_1d(n, len)?
    };

    // Static part of the symbol (everything except the time phase).
    let window = grid.xi_max();
    let base: Vec<Complex64> = (0..grid.point_count())
        .map(|idx| {
            let (kx, ky) = grid.xi_vec(idx);
            let r = (kx * kx + ky * ky).sqrt();
            let mut v = band_value(spec, r);
            if needs_taper {
                v *= edge_taper(r / window);
            }
            if spec.weight_exponent != 0.0 {
                v *= if r > 0.0 { r.powf(spec.weight_exponent) } else { 0.0 };
            }
            if spec.bessel_exponent != 0.0 {
                v *= (1.0 + mu * r * r).powf(spec.bessel_exponent);
            }
            let mut c = Complex64::new(v, 0.0);
            if spec.sign_factor {
                c *= Complex64::new(0.0, kx.signum());
                if kx == 0.0 {
                    c = Complex64::default();
                }
            }
            c
        })
        .collect();
    let omega: Vec<f64> = (0..grid.point_count())
        .map(|idx| spec.phase.omega(mu, grid.xi_norm(idx)))
        .collect();

    // Continuum normalization (1/2pi)^n * integral ~ sum / L^n.
    let norm = 1.0 / len.powi(spec.dim as i32);
    let mut sup_values = Vec::with_capacity(spec.times.len());
    let mut buf = vec![Complex64::default(); grid.point_count()];
    for &t in &spec.times {
        for (i, b) in base.iter().enumerate() {
            buf[i] = b * Complex64::from_polar(1.0, t * omega[i]);
        }
        inverse_fft(&grid, &mut buf);
        sup_values.push(norm * refined_sup(&grid, &buf));
    }

    let (theta, band) = fit_theta(&spec.times, &sup_values)?;
    Ok(KernelProbeResult {
        times: spec.times.clone(),
        sup_values,
        fitted_theta: theta,
        theta_band: band,
        predicted_theta: spec.predicted_theta,
    })
}

fn validate(spec: &KernelProbeSpec) -> Result<()> {
    if spec.times.len() < 3 {
        return Err(Error::TooFewPoints(spec.times.len()));
    }
    if spec.times[0] <= 0.0 || spec.times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config("probe times must be positive and increasing".into()));
    }
    if !(spec.mu > 0.0) {
        return Err(Error::Config("probe needs mu > 0".into()));
    }
    if spec.dim != 1 && spec.dim != 2 {
        return Err(Error::Config("probe dim must be 1 or 2".into()));
    }
    if spec.dim == 2 && spec.sign_factor {
        return Err(Error::Config("sgn(D) factor is one-dimensional".into()));
    }
    // High/full-band decay hypotheses exclude tail exponents -2 and -1.
    if let (ProbePhase::Abcd(p), ProbeBand::High | ProbeBand::Full) = (&spec.phase, &spec.band) {
        let class = classify(p)?;
        if class.alpha == -1 || class.alpha == -2 {
            return Err(Error::ProbeExcludedAlpha { alpha: class.alpha });
        }
    }
    Ok(())
}

/// Largest wavenumber the probe must resolve and whether the symbol needs a
/// window taper (i.e. it is not compactly supported on its own).
fn band_extent(spec: &KernelProbeSpec) -> (f64, bool) {
    let srm = spec.mu.sqrt();
    match spec.band {
        ProbeBand::Low => (1.0 / srm, false),
        ProbeBand::Dyadic(j) => (2f64.powi(j + 1) / srm, false),
        ProbeBand::High | ProbeBand::Full => {
            // Unbounded band: cut where the damping factors reach 1e-4 of
            // their scale, capped at a sane window.
            let decay = -2.0 * spec.bessel_exponent - spec.weight_exponent.min(0.0);
            let xi = if decay > 0.0 {
                (1e4f64.powf(1.0 / decay) / srm).max(4.0 / srm)
            } else {
                64.0 / srm
            };
            (xi.min(512.0), true)
        }
    }
}

fn band_value(spec: &KernelProbeSpec, r: f64) -> f64 {
    let y = spec.mu.sqrt() * r;
    match spec.band {
        ProbeBand::Low => phi0(y),
        ProbeBand::High => 1.0 - phi0(y),
        ProbeBand::Dyadic(j) => phi0(2f64.powi(-j - 1) * y) - phi0(2f64.powi(-j) * y),
        ProbeBand::Full => 1.0,
    }
}

/// Smooth roll-off from 1 to 0 over the last 30% of the spectral window.
fn edge_taper(frac: f64) -> f64 {
    phi0(0.5 * (1.0 + (frac - 0.7).max(0.0) / 0.3))
}

fn inverse_fft(grid: &Grid, buf: &mut [Complex64]) {
    let n = grid.modes_per_axis();
    match grid.dim() {
        1 => grid.fft_inverse(buf),
        _ => {
            for row in buf.chunks_mut(n) {
                grid.fft_inverse(row);
            }
            let mut col = vec![Complex64::default(); n];
            for ix in 0..n {
                for iy in 0..n {
                    col[iy] = buf[iy * n + ix];
                }
                grid.fft_inverse(&mut col);
                for iy in 0..n {
                    buf[iy * n + ix] = col[iy];
                }
            }
        }
    }
}

/// Grid max of |f| with one quadratic-interpolation refinement along each
/// axis around the argmax.
fn refined_sup(grid: &Grid, buf: &[Complex64]) -> f64 {
    let (mut best, mut arg) = (0f64, 0usize);
    for (i, c) in buf.iter().enumerate() {
        let v = c.norm();
        if v > best {
            best = v;
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
            return f0;
        }
        f0 - 0.25 * (fm - fp) * delta
    };
    match grid.dim() {
        1 => {
            let fm = buf[(arg + n - 1) % n].norm();
            let fp = buf[(arg + 1) % n].norm();
            refine(fm, best, fp)
        }
        _ => {
            let (iy, ix) = (arg / n, arg % n);
            let fx = refine(
                buf[grid.idx2(iy, (ix + n - 1) % n)].norm(),
                best,
                buf[grid.idx2(iy, (ix + 1) % n)].norm(),
            );
            let fy = refine(
                buf[grid.idx2((iy + n - 1) % n, ix)].norm(),
                best,
                buf[grid.idx2((iy + 1) % n, ix)].norm(),
            );
            fx.max(fy)
        }
    }
}

/// Least squares of `ln sup` against `ln t`; returns `(theta, 2*SE)` with
/// theta the negated slope.
fn fit_theta(times: &[f64], sups: &[f64]) -> Result<(f64, f64)> {
    if sups.iter().any(|&v| v <= 0.0) {
        return Err(Error::NonPositiveValues);
    }
    let n = times.len() as f64;
    let xs: Vec<f64> = times.iter().map(|t| t.ln()).collect();
    let ys: Vec<f64> = sups.iter().map(|v| v.ln()).collect();
    let xm = xs.iter().sum::<f64>() / n;
    let ym = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - xm).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(Error::DegenerateSpread);
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
    let slope = sxy / sxx;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - ym - slope * (x - xm)).powi(2))
        .sum();
    let se = if times.len() > 2 {
        (ss_res / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok((-slope, 2.0 * se))
}

/// Geometric time ladder for probes.
pub fn geometric_times(t0: f64, t1: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| t0 * (t1 / t0).powf(i as f64 / (count - 1) as f64))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wave_phase_does_not_decay() {
        let mut spec = KernelProbeSpec::new_1d(
            ProbePhase::Wave,
            1.0,
            ProbeBand::Low,
            geometric_times(6.0, 120.0, 7),
        );
        spec.weight_exponent = 0.5;
        spec.sign_factor = true;
        let out = kernel_decay_probe(&spec).unwrap();
        assert!(out.fitted_theta.abs() <= 0.05, "theta = {}", out.fitted_theta);
    }

    #[test]
    fn classical_low_band_half_power_weight() {
        let mut spec = KernelProbeSpec::new_1d(
            ProbePhase::Abcd(AbcdParams::classical()),
            1.0,
            ProbeBand::Low,
            geometric_times(6.0, 192.0, 9),
        );
        spec.weight_exponent = 0.5;
        spec.sign_factor = true;
        spec.predicted_theta = Some(0.5);
        let out = kernel_decay_probe(&spec).unwrap();
        assert!(
            (out.fitted_theta - 0.5).abs() <= 0.1,
            "theta = {} +- {}",
            out.fitted_theta,
            out.theta_band
        );
    }

    #[test]
    fn classical_full_line_bessel_third_power() {
        let mut spec = KernelProbeSpec::new_1d(
            ProbePhase::Abcd(AbcdParams::classical()),
            1.0,
            ProbeBand::Full,
            geometric_times(6.0, 192.0, 9),
        );
        spec.bessel_exponent = -5.0 / 6.0;
        spec.predicted_theta = Some(1.0 / 3.0);
        let out = kernel_decay_probe(&spec).unwrap();
        assert!(
            (out.fitted_theta - 1.0 / 3.0).abs() <= 0.1,
            "theta = {} +- {}",
            out.fitted_theta,
            out.theta_band
        );
    }

    #[test]
    fn times_validation() {
        let spec = KernelProbeSpec::new_1d(
            ProbePhase::Wave,
            1.0,
            ProbeBand::Low,
            vec![0.0, 1.0, 2.0],
        );
        assert!(kernel_decay_probe(&spec).is_err());
    }
}
