//! Output directories: CSV tables, snapshots, and their re-reading by `diag`.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};

use aurora_core::continuity::mass;
use aurora_core::fields::{sum_integral, Snapshot};
use aurora_core::nls::NlsSolver;
use aurora_core::ComplexField;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::HarnessError;
use crate::runner::{LedgerRow, RunOutput, RunSummary, SweepOutput};

pub const LEDGER: &str = "ledger.csv";
pub const SUMMARY: &str = "summary.json";
pub const CONFIG: &str = "config.toml";
pub const SNAPSHOT_DIR: &str = "snapshots";

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    for r in rows {
        w.serialize(r).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

fn csv_err(path: &Path, e: csv::Error) -> HarnessError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => HarnessError::io(path, io),
        other => HarnessError::Output { path: path.to_path_buf(), reason: format!("{other:?}") },
    }
}

fn create_dir(dir: &Path) -> Result<(), HarnessError> {
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))
}

/// Write every table and snapshot of one run below `dir`.
pub fn write_run(dir: &Path, run: &RunOutput) -> Result<(), HarnessError> {
    create_dir(dir)?;
    let cfg_path = dir.join(CONFIG);
    fs::write(&cfg_path, run.config.to_toml()).map_err(|e| HarnessError::io(&cfg_path, e))?;
    let sum_path = dir.join(SUMMARY);
    let json = serde_json::to_string_pretty(&run.summary).expect("summary serialises");
    fs::write(&sum_path, json).map_err(|e| HarnessError::io(&sum_path, e))?;
    write_csv(&dir.join(LEDGER), &run.ledger)?;
    write_csv(&dir.join("density.csv"), &run.density)?;
    write_csv(&dir.join("magnetic.csv"), &run.magnetic)?;
    write_csv(&dir.join("wave.csv"), &run.wave)?;
    write_csv(&dir.join("jacobian.csv"), &run.jacobian.iter().map(|b| (b.holds, b.margin, b.bound)).collect::<Vec<_>>())?;
    let snap_dir = dir.join(SNAPSHOT_DIR);
    create_dir(&snap_dir)?;
    for s in &run.snapshots {
        let path = snap_dir.join(format!("{}.snap", s.header.name));
        let f = File::create(&path).map_err(|e| HarnessError::io(&path, e))?;
        s.write_to(BufWriter::new(f)).map_err(|e| HarnessError::io(&path, e))?;
    }
    Ok(())
}

/// Write a sweep: one directory per member plus the plan and convergence tables.
pub fn write_sweep(dir: &Path, out: &SweepOutput) -> Result<(), HarnessError> {
    create_dir(dir)?;
    write_csv(&dir.join("plan.csv"), &out.plan.members)?;
    write_csv(&dir.join("probes.csv"), &out.probes)?;
    write_csv(&dir.join("convergence.csv"), &out.convergence)?;
    for (m, run) in out.plan.members.iter().zip(&out.runs) {
        write_run(&dir.join(format!("member-{}", m.id)), run)?;
    }
    if !out.delta_runs.is_empty() {
        write_csv(&dir.join("delta_probes.csv"), &out.delta_probes)?;
        write_csv(&dir.join("delta_convergence.csv"), &out.delta_convergence)?;
        for (i, run) in out.delta_runs.iter().enumerate() {
            write_run(&dir.join(format!("delta-{i}")), run)?;
        }
    }
    Ok(())
}

/// Outcome of re-checking a stored run.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagReport {
    pub snapshots: usize,
    pub mass_drift: f64,
    pub min_rho: f64,
    pub max_residual: f64,
    /// Largest relative mismatch between a snapshot's recomputed kinetic,
    /// pressure, magnetic and wave energies and the ledger row at that time.
    pub ledger_mismatch: f64,
    pub flags: Vec<String>,
}

fn read_snapshots(dir: &Path) -> Result<Vec<Snapshot>, HarnessError> {
    let snap_dir = dir.join(SNAPSHOT_DIR);
    let mut paths: Vec<PathBuf> = fs::read_dir(&snap_dir)
        .map_err(|e| HarnessError::io(&snap_dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "snap"))
        .collect();
    paths.sort();
    let mut snaps = paths
        .iter()
        .map(|p| {
            let f = File::open(p).map_err(|e| HarnessError::io(p, e))?;
            Snapshot::read_from(BufReader::new(f))
                .map_err(|e| HarnessError::Output { path: p.clone(), reason: e.to_string() })
        })
        .collect::<Result<Vec<_>, _>>()?;
    snaps.sort_by(|a, b| a.header.t.total_cmp(&b.header.t));
    Ok(snaps)
}

fn field<'a>(s: &'a Snapshot, name: &str, dir: &Path) -> Result<&'a aurora_core::ScalarField, HarnessError> {
    s.field(name).ok_or_else(|| HarnessError::Output {
        path: dir.join(SNAPSHOT_DIR).join(&s.header.name),
        reason: format!("missing component {name}"),
    })
}

/// Recompute mass, positivity, the energy residual and ledger consistency
/// from what is stored in `dir`.
pub fn diagnose(dir: &Path) -> Result<DiagReport, HarnessError> {
    let cfg = RunConfig::load(&dir.join(CONFIG))?;
    let sum_path = dir.join(SUMMARY);
    let text = fs::read_to_string(&sum_path).map_err(|e| HarnessError::io(&sum_path, e))?;
    let summary: RunSummary = serde_json::from_str(&text)
        .map_err(|e| HarnessError::Output { path: sum_path.clone(), reason: e.to_string() })?;
    let led_path = dir.join(LEDGER);
    let mut rd = csv::Reader::from_path(&led_path).map_err(|e| csv_err(&led_path, e))?;
    let ledger = rd.deserialize::<LedgerRow>().collect::<Result<Vec<_>, _>>().map_err(|e| csv_err(&led_path, e))?;
    let first = ledger
        .first()
        .ok_or_else(|| HarnessError::Output { path: led_path.clone(), reason: "empty ledger".into() })?;
    let snaps = read_snapshots(dir)?;
    if snaps.is_empty() {
        return Err(HarnessError::Output { path: dir.join(SNAPSHOT_DIR), reason: "no snapshots".into() });
    }

    let p = cfg.physics;
    let rhs = first.total + p.eps.sqrt() * summary.r_const;
    let max_residual = ledger.iter().map(|r| r.total + r.density_dissipation - rhs).fold(f64::NEG_INFINITY, f64::max);

    let masses = snaps.iter().map(|s| field(s, "rho", dir).map(mass)).collect::<Result<Vec<_>, _>>()?;
    let m0 = masses[0];
    let mass_drift = masses.iter().map(|m| (m - m0).abs()).fold(0.0, f64::max) / m0.abs().max(f64::MIN_POSITIVE);
    let mut min_rho = f64::INFINITY;
    let mut ledger_mismatch = 0.0f64;
    for s in &snaps {
        let rho = field(s, "rho", dir)?;
        min_rho = min_rho.min(rho.min());
        let Some(row) = ledger.iter().find(|r| (r.t - s.header.t).abs() <= 1e-12 * r.t.abs().max(1.0)) else {
            continue;
        };
        let d = *rho.domain();
        let r = rho.data();
        let mut speed_sq = vec![0.0; d.len()];
        for c in ["u1", "u2", "u3"] {
            for (v, u) in speed_sq.iter_mut().zip(field(s, c, dir)?.data()) {
                *v += u * u;
            }
        }
        let kin: Vec<f64> = r.iter().zip(&speed_sq).map(|(r, v)| 0.5 * r * v).collect();
        let pg: Vec<f64> = r.iter().map(|r| r.max(0.0).powf(p.gamma)).collect();
        let pb: Vec<f64> = r.iter().map(|r| r.max(0.0).powf(p.beta)).collect();
        let mut hsq = 0.0;
        for c in ["h1", "h2", "h3"] {
            let h = field(s, c, dir)?;
            hsq += sum_integral(&h.data().iter().map(|v| v * v).collect::<Vec<_>>(), &d);
        }
        let psi = ComplexField::new(field(s, "psi_re", dir)?.clone(), field(s, "psi_im", dir)?.clone())?;
        let (g, q) = NlsSolver::new(d).free_energy(&psi);
        let pairs = [
            (sum_integral(&kin, &d), row.kinetic),
            (p.a / (p.gamma - 1.0) * sum_integral(&pg, &d), row.pressure),
            (if p.delta == 0.0 { 0.0 } else { p.delta / (p.beta - 1.0) * sum_integral(&pb, &d) }, row.artificial),
            (0.5 * hsq, row.magnetic),
            (g + q, row.wave),
        ];
        let scale = row.total.abs().max(1e-300);
        for (a, b) in pairs {
            ledger_mismatch = ledger_mismatch.max((a - b).abs() / scale);
        }
    }

    let mut flags = Vec::new();
    if mass_drift > 1e-10 {
        flags.push(format!("relative mass drift {mass_drift:.3e} across snapshots"));
    }
    if min_rho < 0.0 {
        flags.push(format!("negative density {min_rho:.3e} in a snapshot"));
    }
    let tol = cfg.guard.residual_tol * first.total.abs();
    if max_residual > tol {
        flags.push(format!("energy residual {max_residual:.3e} exceeds {tol:.3e}"));
    }
    if ledger_mismatch > 1e-9 {
        flags.push(format!("snapshot energies disagree with the ledger by {ledger_mismatch:.3e} (relative)"));
    }
    Ok(DiagReport { snapshots: snaps.len(), mass_drift, min_rho, max_residual, ledger_mismatch, flags })
}
