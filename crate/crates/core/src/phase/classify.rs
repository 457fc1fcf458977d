use serde::Serialize;

use super::pair::PhasePair;
use crate::error::{Error, Result};
use crate::models::params::AbcdParams;

/// Constants governing the decay exponents of one admissible abcd phase.
#[derive(Clone, Debug, Serialize)]
pub struct PhaseClassification {
    pub abcd: AbcdParams,
    pub sum_zero: bool,
    /// Limit of g' at infinity (infinite for super-linear phases; serialized
    /// as null in that case).
    pub ell: f64,
    /// Tail exponent: g''(r) ~ const * r^alpha, integer in [-6, 1].
    pub alpha: i32,
    /// Positive zeros of g'' with their multiplicities.
    pub gpp_zeros: Vec<(f64, usize)>,
    pub m_max: usize,
    /// Decay index of the L^q L^r families: max(m+2, 3), or max(m+2, 5) in
    /// the sum-zero case.
    pub p: u32,
    /// Local-energy index: 1 if g' > 0, 2 if |g'|+|g''| > 0, 3 otherwise.
    pub p0: u32,
    /// (m+4)/(2m+4); use [`Self::sigma_2d`] for the sum-zero 2D theorems.
    pub sigma: f64,
    pub gp_positive: bool,
}

impl PhaseClassification {
    /// The sigma entering the 2D statements: capped at 4/5 when the
    /// coefficient sum vanishes.
    pub fn sigma_2d(&self) -> f64 {
        if self.sum_zero {
            self.sigma.min(0.8)
        } else {
            self.sigma
        }
    }
}

/// Number of scan points used by default over the log-spaced range
/// `[1e-4, 1e3]`; the tail beyond is handled by the closed-form asymptotics.
pub const DEFAULT_SCAN_POINTS: usize = 100_000;

const SCAN_LO: f64 = 1e-4;
const SCAN_HI: f64 = 1e3;
/// Relative threshold for derivative-vanishing tests at a zero.
const ZERO_TOL: f64 = 1e-8;

pub fn classify(abcd: &AbcdParams) -> Result<PhaseClassification> {
    classify_with_scan(abcd, DEFAULT_SCAN_POINTS)
}

/// Classification with an explicit scan density (the result must not depend
/// on it; a coarse/fine pair is compared in tests).
pub fn classify_with_scan(abcd: &AbcdParams, scan_points: usize) -> Result<PhaseClassification> {
    abcd.check_admissible()?;
    let sum_zero = abcd.sum_is_zero();
    if sum_zero && !abcd.is_non_degenerate() {
        return Err(Error::DegeneratePhase);
    }
    let pair = PhasePair::new(*abcd);

    let (ell, alpha) = tail_constants(&pair, abcd)?;
    let gpp_zeros = find_gpp_zeros(&pair, scan_points);
    let m_max = gpp_zeros.iter().map(|&(_, m)| m).max().unwrap_or(0);
    let p = if sum_zero {
        (m_max as u32 + 2).max(5)
    } else {
        (m_max as u32 + 2).max(3)
    };
    let gp_zeros = find_sign_changes(|r| pair.g1(r), scan_points);
    let gp_positive = gp_zeros.is_empty() && tail_g1_positive(&pair, ell);
    let p0 = if gp_positive {
        1
    } else if gp_zeros.iter().all(|&r| pair.g2(r).abs() > ZERO_TOL * local_scale(&pair, r, 2)) {
        2
    } else {
        3
    };
    let sigma = (m_max as f64 + 4.0) / (2.0 * m_max as f64 + 4.0);

    Ok(PhaseClassification {
        abcd: *abcd,
        sum_zero,
        ell,
        alpha,
        gpp_zeros,
        m_max,
        p,
        p0,
        sigma,
        gp_positive,
    })
}

/// Exact limit of g' from the leading coefficients, and the integer tail
/// exponent alpha from the closed-form derivatives at a ladder of radii.
fn tail_constants(pair: &PhasePair, abcd: &AbcdParams) -> Result<(f64, i32)> {
    let num_deg = (abcd.a != 0.0) as i32 + (abcd.c != 0.0) as i32;
    let den_deg = (abcd.b != 0.0) as i32 + (abcd.d != 0.0) as i32;
    let lead_num = match num_deg {
        2 => abcd.a * abcd.c,
        1 => -abcd.a - abcd.c,
        _ => 1.0,
    };
    let lead_den = match den_deg {
        2 => abcd.b * abcd.d,
        1 => abcd.b + abcd.d,
        _ => 1.0,
    };
    let ell = match num_deg.cmp(&den_deg) {
        std::cmp::Ordering::Equal => (lead_num / lead_den).sqrt(),
        std::cmp::Ordering::Less => 0.0,
        std::cmp::Ordering::Greater => f64::INFINITY,
    };
    let ell_ref = if ell.is_finite() { ell } else { 0.0 };

    // Slope of log|g' - ell| vs log r, read where consecutive octaves agree.
    let noise_floor = 1e-12 * (1.0 + ell_ref.abs());
    let mut prev: Option<(f64, f64)> = None; // (log r, log f)
    let mut prev_slope: Option<f64> = None;
    for k in 4..=20 {
        let r = 2f64.powi(k);
        let f = (pair.g1(r) - ell_ref).abs();
        if f < noise_floor {
            break;
        }
        let (lr, lf) = (r.ln(), f.ln());
        if let Some((plr, plf)) = prev {
            let slope = (lf - plf) / (lr - plr);
            if let Some(ps) = prev_slope {
                if (slope - ps).abs() < 0.02 && slope.round() == ps.round() {
                    let alpha = (slope.round() as i32 - 1).clamp(-6, 1);
                    return Ok((ell, alpha));
                }
            }
            prev_slope = Some(slope);
        }
        prev = Some((lr, lf));
    }
    Err(Error::DegeneratePhase)
}

fn tail_g1_positive(pair: &PhasePair, ell: f64) -> bool {
    if ell.is_infinite() || ell > 0.0 {
        // g' tends to a positive limit or grows; check a few radii anyway.
        return [2e3, 1e4, 1e5].iter().all(|&r| pair.g1(r) > 0.0);
    }
    [2e3, 1e4, 1e5].iter().all(|&r| pair.g1(r) > 0.0)
}

/// Scale against which "a derivative vanishes" is judged near r: the largest
/// magnitude of the same derivative on [r/2, 2r].
fn local_scale(pair: &PhasePair, r: f64, order: usize) -> f64 {
    let f = |y: f64| match order {
        2 => pair.g2(y),
        3 => pair.g3(y),
        _ => pair.g1(y),
    };
    let mut s = 0f64;
    for i in 0..=32 {
        let y = r * 0.5 * 4f64.powf(i as f64 / 32.0);
        s = s.max(f(y).abs());
    }
    s.max(1e-300)
}

fn scan_radii(points: usize) -> impl Iterator<Item = f64> {
    let lo = SCAN_LO.ln();
    let hi = SCAN_HI.ln();
    (0..points).map(move |i| (lo + (hi - lo) * i as f64 / (points - 1) as f64).exp())
}

fn find_sign_changes<F: Fn(f64) -> f64>(f: F, points: usize) -> Vec<f64> {
    let mut zeros = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for r in scan_radii(points) {
        let v = f(r);
        if let Some((rp, vp)) = prev {
            if vp == 0.0 {
                zeros.push(rp);
            } else if vp * v < 0.0 {
                zeros.push(bisect(&f, rp, r));
            }
        }
        prev = Some((r, v));
    }
    zeros
}

fn bisect<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if flo * fm < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
        if (hi - lo) <= 1e-15 * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Locate positive zeros of g'' and estimate their multiplicities.
///
/// Candidates are sign changes of g'' (odd multiplicity) plus sign changes
/// of g''' at which g'' itself vanishes (even multiplicity, a tangency).
/// The multiplicity of a zero r* is the first k <= 3 with
/// `|g^(2+k)(r*)| >= tol` relative to the local derivative scale.
fn find_gpp_zeros(pair: &PhasePair, points: usize) -> Vec<(f64, usize)> {
    let mut candidates = find_sign_changes(|r| pair.g2(r), points);
    for r in find_sign_changes(|r| pair.g3(r), points) {
        if pair.g2(r).abs() < ZERO_TOL * local_scale(pair, r, 2)
            && candidates.iter().all(|&c| (c - r).abs() > 1e-9 * r.max(1.0))
        {
            candidates.push(r);
        }
    }
    candidates.sort_by(|x, y| x.partial_cmp(y).unwrap());
    candidates
        .into_iter()
        .map(|r| (r, multiplicity(pair, r)))
        .collect()
}

fn multiplicity(pair: &PhasePair, r: f64) -> usize {
    let scale3 = local_scale(pair, r, 3);
    if pair.g3(r).abs() >= ZERO_TOL * scale3 {
        return 1;
    }
    // Higher derivatives of g via central differences of the closed-form g'''.
    let h = 1e-3 * r.max(1.0);
    let g4 = (pair.g3(r + h) - pair.g3(r - h)) / (2.0 * h);
    if g4.abs() >= ZERO_TOL * scale3 / h {
        return 2;
    }
    3
}
