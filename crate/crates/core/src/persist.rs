//! Trajectory persistence: snapshots as flat little-endian f64 arrays behind
//! a short plain-text header, and per-step diagnostics as CSV.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::models::{Dim, ModelKind, State, Velocity};
use crate::solver::Trajectory;
use crate::spectral::{Grid, SpectralField};

/// Header + payload layout:
///
/// ```text
/// rigidlid trajectory v1
/// dim 1
/// modes 1024
/// length 600
/// model kind=classical dim=1 eps=0.1 mu=1 a=0 b=0 c=0 d=0.3333333333333333 h0=0.5
/// fields zeta,v
/// times 0 0.03125 ...
/// ---
/// <f64le values: per snapshot, fields concatenated, row-major>
/// ```
pub fn write_trajectory(path: &Path, traj: &Trajectory) -> Result<()> {
    let grid = traj.snapshots[0].grid().clone();
    let kind = match traj.model.kind {
        ModelKind::Classical => "classical",
        ModelKind::Abcd => "abcd",
        ModelKind::GreenNaghdi => "green_naghdi",
    };
    let fields = match grid.dim() {
        1 => "zeta,v",
        _ => "zeta,vx,vy",
    };
    let mut header = String::new();
    let _ = writeln!(header, "rigidlid trajectory v1");
    let _ = writeln!(header, "dim {}", grid.dim());
    let _ = writeln!(header, "modes {}", grid.modes_per_axis());
    let _ = writeln!(header, "length {}", grid.length());
    let m = traj.model;
    let _ = writeln!(
        header,
        "model kind={kind} dim={} eps={} mu={} a={} b={} c={} d={} h0={}",
        m.dim.as_usize(),
        m.eps,
        m.mu,
        m.abcd.a,
        m.abcd.b,
        m.abcd.c,
        m.abcd.d,
        m.h0
    );
    let _ = writeln!(header, "fields {fields}");
    let times: Vec<String> = traj.times.iter().map(|t| format!("{t}")).collect();
    let _ = writeln!(header, "times {}", times.join(" "));
    let _ = writeln!(header, "---");

    let mut bytes = header.into_bytes();
    for snap in &traj.snapshots {
        for field in snap.fields() {
            for v in field.to_physical() {
                bytes.extend_from_slice(&v.to_le_bytes());
            }
        }
    }
    std::fs::write(path, bytes)?;
    Ok(())
}

/// Minimal reader for the format above (times, grid, physical snapshots).
pub struct StoredTrajectory {
    pub grid: Grid,
    pub times: Vec<f64>,
    pub snapshots: Vec<State>,
}

pub fn read_trajectory(path: &Path) -> Result<StoredTrajectory> {
    let bytes = std::fs::read(path)?;
    let marker = b"---\n";
    let pos = bytes
        .windows(marker.len())
        .position(|w| w == marker)
        .ok_or_else(|| Error::Config(format!("{}: missing header terminator", path.display())))?;
    let header = std::str::from_utf8(&bytes[..pos])
        .map_err(|_| Error::Config("trajectory header is not UTF-8".into()))?;
    let mut dim = 0usize;
    let mut modes = 0usize;
    let mut length = 0f64;
    let mut times: Vec<f64> = Vec::new();
    for line in header.lines() {
        let mut it = line.splitn(2, ' ');
        let key = it.next().unwrap_or_default();
        let rest = it.next().unwrap_or_default();
        match key {
            "dim" => dim = rest.parse().map_err(|e| Error::Config(format!("dim: {e}")))?,
            "modes" => modes = rest.parse().map_err(|e| Error::Config(format!("modes: {e}")))?,
            "length" => length = rest.parse().map_err(|e| Error::Config(format!("length: {e}")))?,
            "times" => {
                times = rest
                    .split_whitespace()
                    .map(|t| t.parse::<f64>().map_err(|e| Error::Config(format!("times: {e}"))))
                    .collect::<Result<_>>()?
            }
            _ => {}
        }
    }
    let grid = match dim {
        1 => Grid::new_1d(modes, length)?,
        2 => Grid::new_2d(modes, length)?,
        _ => return Err(Error::Config(format!("bad dim {dim}"))),
    };
    let n = grid.point_count();
    let nfields = 1 + dim;
    let payload = &bytes[pos + marker.len()..];
    let expected = times.len() * nfields * n * 8;
    if payload.len() != expected {
        return Err(Error::Config(format!(
            "payload is {} bytes, header promises {expected}",
            payload.len()
        )));
    }
    let mut snapshots = Vec::with_capacity(times.len());
    let mut offset = 0usize;
    let mut read_field = |offset: &mut usize| -> Result<SpectralField> {
        let mut vals = Vec::with_capacity(n);
        for _ in 0..n {
            let mut b = [0u8; 8];
            b.copy_from_slice(&payload[*offset..*offset + 8]);
            vals.push(f64::from_le_bytes(b));
            *offset += 8;
        }
        SpectralField::from_physical(&grid, &vals)
    };
    for &t in &times {
        let zeta = read_field(&mut offset)?;
        let v = match dim {
            1 => Velocity::OneD(read_field(&mut offset)?),
            _ => Velocity::TwoD(read_field(&mut offset)?, read_field(&mut offset)?),
        };
        snapshots.push(State::new(t, zeta, v));
    }
    Ok(StoredTrajectory { grid, times, snapshots })
}

/// Per-step diagnostics as CSV: `step,time,mass,energy,min_depth,boundary_mass`.
pub fn write_diagnostics(path: &Path, traj: &Trajectory) -> Result<()> {
    let mut out = String::from("step,time,mass,energy,min_depth,boundary_mass\n");
    for d in &traj.diagnostics {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            d.step, d.time, d.mass, d.energy, d.min_depth, d.boundary_mass
        );
    }
    std::fs::write(path, out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{Dim, ModelSpec};
    use crate::solver::{gaussian_state, run, DataParams, SolverConfig};

    #[test]
    fn trajectory_round_trips_through_disk() {
        let spec = ModelSpec::classical(Dim::One, 0.25, 1.0).unwrap();
        let grid = Grid::new_1d(64, 60.0).unwrap();
        let u0 = gaussian_state(&grid, &spec, &DataParams::default()).unwrap();
        let mut cfg = SolverConfig::default();
        cfg.snapshot_count = 3;
        let traj = run(&spec, &u0, 0.1, &cfg).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("traj.bin");
        write_trajectory(&path, &traj).unwrap();
        let back = read_trajectory(&path).unwrap();
        assert_eq!(back.times, traj.times);
        for (a, b) in back.snapshots.iter().zip(&traj.snapshots) {
            let da = a.zeta.to_physical();
            let db = b.zeta.to_physical();
            for (x, y) in da.iter().zip(&db) {
                assert!((x - y).abs() < 1e-13);
            }
        }
        write_diagnostics(&dir.path().join("diag.csv"), &traj).unwrap();
        let text = std::fs::read_to_string(dir.path().join("diag.csv")).unwrap();
        assert!(text.starts_with("step,time,mass,energy,min_depth,boundary_mass"));
        assert_eq!(text.lines().count(), traj.diagnostics.len() + 1);
    }
}
