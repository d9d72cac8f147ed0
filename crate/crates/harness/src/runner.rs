//! Single runs and sweeps.

use aurora_core::continuity::{mass, DensityRecord};
use aurora_core::diagnostics::{bound_r, energy, energy_residual, horizon_tn, viscous_flux_probe, EnergyRow, HorizonInputs, ProbeFrame};
use aurora_core::fields::{sum_integral, Snapshot};
use aurora_core::galerkin::{CoupledSolver, SystemState};
use aurora_core::geometry::grad_sup_constant;
use aurora_core::induction::{magnetic_record, MagneticRecord};
use aurora_core::lagrangian::{jacobian_bound_check, specific_volume, BoundCheck};
use aurora_core::nls::{wave_mass, WaveRecord};
use aurora_core::{ComplexField, ScalarField};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::HarnessError;
use crate::initial;
use crate::sweep::{delta_sweep, make_sweep, member_config, SweepMember, SweepPlan};

/// Flat ledger row for CSV output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct LedgerRow {
    pub step: usize,
    pub t: f64,
    pub kinetic: f64,
    pub pressure: f64,
    pub artificial: f64,
    pub magnetic: f64,
    pub wave: f64,
    pub coupling: f64,
    pub dissipation: f64,
    pub density_dissipation: f64,
    pub total: f64,
    pub residual: f64,
}

impl LedgerRow {
    fn new(step: usize, e: &EnergyRow, residual: f64) -> Self {
        Self {
            step,
            t: e.t,
            kinetic: e.kinetic,
            pressure: e.pressure,
            artificial: e.artificial,
            magnetic: e.magnetic,
            wave: e.wave,
            coupling: e.coupling,
            dissipation: e.dissipation,
            density_dissipation: e.density_dissipation,
            total: e.total(),
            residual,
        }
    }
}

/// Constants fixed at `t = 0` for one run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct RunSummary {
    pub e0: f64,
    pub r_const: f64,
    pub c_n: f64,
    /// `T^N`, when the interaction is on.
    pub horizon: Option<f64>,
    pub t_stop: f64,
    pub steps: usize,
    pub clips: usize,
    pub max_residual: f64,
    pub residual_tol: f64,
    /// Smallest Jacobian-bound margin; `None` before the first step.
    pub jacobian_margin: Option<f64>,
}

/// Fields recorded for sweep comparisons and probes.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub step: usize,
    pub probe: ProbeFrame,
    pub psi: ComplexField,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub config: RunConfig,
    pub summary: RunSummary,
    pub ledger: Vec<LedgerRow>,
    pub density: Vec<DensityRecord>,
    pub magnetic: Vec<MagneticRecord>,
    pub wave: Vec<WaveRecord>,
    pub snapshots: Vec<Snapshot>,
    pub frames: Vec<Frame>,
    pub jacobian: Vec<BoundCheck>,
    pub initial: SystemState,
    pub last: SystemState,
    /// Problems detected while running; empty for a clean run.
    pub flags: Vec<String>,
}

/// Binary snapshot of the Eulerian state.
pub fn state_snapshot(solver: &CoupledSolver, s: &SystemState, name: &str) -> aurora_core::Result<Snapshot> {
    let u = solver.velocity_field(s);
    let [u1, u2, u3] = u.comps;
    let [h1, h2, h3] = s.h.comps.clone();
    Snapshot::new(
        name,
        s.t,
        vec![
            ("rho".into(), s.rho.clone()),
            ("u1".into(), u1),
            ("u2".into(), u2),
            ("u3".into(), u3),
            ("h1".into(), h1),
            ("h2".into(), h2),
            ("h3".into(), h3),
            ("psi_re".into(), s.psi.re.clone()),
            ("psi_im".into(), s.psi.im.clone()),
            ("jacobian".into(), s.flow.jacobian_eulerian()),
        ],
    )
}

fn wave_record(solver: &CoupledSolver, s: &SystemState, coupling: f64) -> WaveRecord {
    let (gradient, quartic) = solver.nls().free_energy(&s.psi);
    WaveRecord { t: s.t, mass: wave_mass(&s.psi), gradient, quartic, interaction: coupling }
}

/// Run one configuration to `min(t_end, T^N)`. `frame_every` records
/// frames for sweep tables (step 0 included).
pub fn simulate(cfg: &RunConfig, frame_every: Option<usize>) -> Result<RunOutput, HarnessError> {
    cfg.validate()?;
    let d = cfg.domain()?;
    let params = cfg.run_params();
    let solver = CoupledSolver::new(d, params)?;
    let (rho0, m0, h0, psi0) = initial::build(d, &cfg.initial, params.phys.delta, params.phys.beta);
    let state0 = solver.initial_state(rho0, &m0, h0, psi0)?;

    let e_row0 = energy(&solver, &state0)?;
    let e0 = e_row0.total();
    let eps = params.phys.eps;
    let r_const = bound_r(&state0.rho, e0, eps, params.phys.r)?;
    let c_n = grad_sup_constant(solver.basis(), params.n_flow, cfg.galerkin.grad_sup_refine)?;
    let coupled = params.interaction.alpha > 0.0;
    let horizon = if coupled {
        Some(horizon_tn(&HorizonInputs { c_n, eps, alpha: params.interaction.alpha, mu: params.phys.mu, e0, r: r_const })?)
    } else {
        None
    };
    let mut flags = Vec::new();
    let t_stop = match horizon {
        Some(tn) if cfg.guard.horizon => {
            if tn <= 0.0 {
                flags.push(format!("horizon T^N = {tn:.6} is not positive; nothing integrated"));
            }
            cfg.time.t_end.min(tn.max(0.0))
        }
        _ => cfg.time.t_end,
    };

    let tol = cfg.guard.residual_tol * e0.abs();
    let mut rows = vec![e_row0];
    let mut ledger = Vec::new();
    let mass0 = mass(&state0.rho);
    let (lo0, hi0) = (state0.rho.min(), state0.rho.max());
    let mut density = vec![DensityRecord { t: 0.0, mass: mass0, min: lo0, max: hi0, envelope_lower: lo0, envelope_upper: hi0, clips: 0 }];
    let mut magnetic = vec![magnetic_record(&state0.h, params.phys.nu, 0.0, 0.0)];
    let mut wave = vec![wave_record(&solver, &state0, e_row0.coupling)];
    let mut snapshots = vec![state_snapshot(&solver, &state0, "step-0")?];
    let frame = |step: usize, s: &SystemState| Frame {
        step,
        probe: ProbeFrame { t: s.t, rho: s.rho.clone(), u: solver.velocity_field(s) },
        psi: s.psi.clone(),
    };
    let mut frames = Vec::new();
    if frame_every.is_some() {
        frames.push(frame(0, &state0));
    }
    let mut jacobian = Vec::new();

    let residual0 = energy_residual(&rows, eps, r_const)?[0];
    ledger.push(LedgerRow::new(0, &e_row0, residual0));

    let mut s = state0.clone();
    let mut step = 0usize;
    let mut div_integral = 0.0;
    while s.t < t_stop - 1e-12 * t_stop.max(1.0) {
        let dt = cfg.time.dt.min(t_stop - s.t);
        let (next, report) = solver.step(&s, dt)?;
        step += 1;
        div_integral += dt * report.div_sup;
        s = next;
        density.push(DensityRecord {
            t: s.t,
            mass: mass(&s.rho),
            min: s.rho.min(),
            max: s.rho.max(),
            envelope_lower: lo0 * (-div_integral).exp(),
            envelope_upper: hi0 * div_integral.exp(),
            clips: report.clips,
        });
        magnetic.push(magnetic_record(&s.h, params.phys.nu, s.t, dt));
        let last = s.t >= t_stop - 1e-12 * t_stop.max(1.0);
        if step % cfg.output.ledger_every == 0 || last {
            let e = energy(&solver, &s)?;
            rows.push(e);
            let r = *energy_residual(&rows, eps, r_const)?.last().expect("nonempty");
            ledger.push(LedgerRow::new(step, &e, r));
            wave.push(wave_record(&solver, &s, e.coupling));
            jacobian.push(jacobian_bound_check(&s.flow, c_n, s.dissipated.velocity_h1));
        }
        if let Some(every) = frame_every {
            if step % every.max(1) == 0 {
                frames.push(frame(step, &s));
            }
        }
        if (cfg.output.snapshot_every > 0 && step % cfg.output.snapshot_every == 0) || last {
            snapshots.push(state_snapshot(&solver, &s, &format!("step-{step}"))?);
        }
    }

    if coupled {
        // exercise the Lagrangian specific volume once so floor problems surface
        specific_volume(&s.rho, &s.flow, params.rho_floor)?;
    }
    let max_residual = ledger.iter().map(|r| r.residual).fold(f64::NEG_INFINITY, f64::max);
    if max_residual > tol {
        flags.push(format!("energy residual {max_residual:.3e} exceeds tolerance {tol:.3e}"));
    }
    let mdrift = density.iter().map(|r| (r.mass - mass0).abs()).fold(0.0, f64::max) / mass0.abs().max(f64::MIN_POSITIVE);
    if mdrift > 1e-10 {
        flags.push(format!("relative mass drift {mdrift:.3e}"));
    }
    let jacobian_margin = jacobian.iter().map(|b| b.margin).reduce(f64::min);
    if let Some(m) = jacobian_margin.filter(|m| *m < 0.0) {
        flags.push(format!("Jacobian bound violated, margin {m:.3e}"));
    }
    let summary = RunSummary {
        e0,
        r_const,
        c_n,
        horizon,
        t_stop,
        steps: step,
        clips: s.clips,
        max_residual,
        residual_tol: tol,
        jacobian_margin,
    };
    Ok(RunOutput {
        config: cfg.clone(),
        summary,
        ledger,
        density,
        magnetic,
        wave,
        snapshots,
        frames,
        jacobian,
        initial: state0,
        last: s,
        flags,
    })
}

/// Successive-difference row between members `k` and `k + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub k: usize,
    pub eps: f64,
    pub alpha: f64,
    pub n_flow: usize,
    pub delta: f64,
    /// `max_t ||rho_k - rho_{k+1}||_{L^1}` over common frames.
    pub rho_l1: f64,
    /// `max_t ||psi_k - psi_{k+1}||_{L^2}`.
    pub psi_l2: f64,
    /// `|probe_k - probe_{k+1}|`.
    pub probe_diff: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeRow {
    pub id: usize,
    pub eps: f64,
    pub alpha: f64,
    pub n_flow: usize,
    pub delta: f64,
    pub zeta_id: usize,
    pub eta_id: usize,
    pub value: f64,
}

#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub plan: SweepPlan,
    pub runs: Vec<RunOutput>,
    pub probes: Vec<ProbeRow>,
    pub convergence: Vec<ConvergenceRow>,
    pub delta_runs: Vec<RunOutput>,
    pub delta_probes: Vec<ProbeRow>,
    pub delta_convergence: Vec<ConvergenceRow>,
}

fn poly_bump(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - s * s).powi(4)
    }
}

/// Effective-viscous-flux probe with a time window over the recorded span
/// and a spatial bump of radius 0.35 at the centre of the box.
pub fn flux_probe(run: &RunOutput) -> Result<f64, HarnessError> {
    let frames: Vec<ProbeFrame> = run.frames.iter().map(|f| f.probe.clone()).collect();
    let t1 = frames.last().map_or(0.0, |f| f.t);
    let d = run.config.domain;
    let (cx, cy, rad) = (0.5 * d.lx, 0.5 * d.ly, 0.35 * d.lx.min(d.ly));
    let zeta = |t: f64| poly_bump((2.0 * t - t1) / t1.max(f64::MIN_POSITIVE));
    let eta = |x: f64, y: f64| poly_bump(((x - cx).powi(2) + (y - cy).powi(2)).sqrt() / rad);
    Ok(viscous_flux_probe(&frames, &run.config.physics, zeta, eta)?)
}

fn abs_diff_norm(a: &ScalarField, b: &ScalarField) -> f64 {
    let diff: Vec<f64> = a.data().iter().zip(b.data()).map(|(x, y)| (x - y).abs()).collect();
    sum_integral(&diff, a.domain())
}

fn psi_diff_norm(a: &ComplexField, b: &ComplexField) -> f64 {
    let diff: Vec<f64> = a
        .re
        .data()
        .iter()
        .zip(a.im.data())
        .zip(b.re.data().iter().zip(b.im.data()))
        .map(|((ar, ai), (br, bi))| (ar - br).powi(2) + (ai - bi).powi(2))
        .collect();
    sum_integral(&diff, a.domain()).sqrt()
}

fn convergence_table(members: &[SweepMember], runs: &[RunOutput], probes: &[f64]) -> Vec<ConvergenceRow> {
    members
        .windows(2)
        .enumerate()
        .map(|(k, _)| {
            let (a, b) = (&runs[k], &runs[k + 1]);
            let common = a.frames.len().min(b.frames.len());
            let mut rho_l1 = 0.0f64;
            let mut psi_l2 = 0.0f64;
            for (fa, fb) in a.frames.iter().zip(&b.frames).take(common) {
                rho_l1 = rho_l1.max(abs_diff_norm(&fa.probe.rho, &fb.probe.rho));
                psi_l2 = psi_l2.max(psi_diff_norm(&fa.psi, &fb.psi));
            }
            let m = &members[k];
            ConvergenceRow {
                k,
                eps: m.eps,
                alpha: m.alpha,
                n_flow: m.n_flow,
                delta: m.delta,
                rho_l1,
                psi_l2,
                probe_diff: (probes[k] - probes[k + 1]).abs(),
            }
        })
        .collect()
}

fn run_members(base: &RunConfig, members: &[SweepMember]) -> Result<(Vec<RunOutput>, Vec<ProbeRow>, Vec<f64>), HarnessError> {
    let every = base.sweep.frame_every.max(1);
    let runs = members
        .par_iter()
        .map(|m| simulate(&member_config(base, m), Some(every)))
        .collect::<Result<Vec<_>, _>>()?;
    let values = runs.iter().map(flux_probe).collect::<Result<Vec<_>, _>>()?;
    let rows = members
        .iter()
        .zip(&values)
        .map(|(m, &value)| ProbeRow {
            id: m.id,
            eps: m.eps,
            alpha: m.alpha,
            n_flow: m.n_flow,
            delta: m.delta,
            zeta_id: 0,
            eta_id: 0,
            value,
        })
        .collect();
    Ok((runs, rows, values))
}

/// Build the plan, run every member in parallel and tabulate successive differences.
pub fn run_sweep(base: &RunConfig, levels: usize) -> Result<SweepOutput, HarnessError> {
    let plan = make_sweep(base, levels)?;
    let (runs, probes, values) = run_members(base, &plan.members)?;
    let convergence = convergence_table(&plan.members, &runs, &values);
    let (delta_runs, delta_probes, delta_convergence) = if base.sweep.deltas.is_empty() {
        (Vec::new(), Vec::new(), Vec::new())
    } else {
        let anchor = plan.members.last().expect("plan has at least two members");
        let members = delta_sweep(anchor, &base.sweep.deltas)?;
        let (r, p, v) = run_members(base, &members)?;
        let c = convergence_table(&members, &r, &v);
        (r, p, c)
    };
    Ok(SweepOutput { plan, runs, probes, convergence, delta_runs, delta_probes, delta_convergence })
}

/// Built-in regression configurations, keyed by name.
pub fn regression_configs() -> Vec<(&'static str, RunConfig)> {
    [
        ("quiescent", include_str!("../configs/quiescent.toml")),
        ("heat", include_str!("../configs/heat.toml")),
        ("mhd", include_str!("../configs/mhd.toml")),
        ("coupled", include_str!("../configs/coupled.toml")),
    ]
    .into_iter()
    .map(|(name, text)| (name, RunConfig::from_toml(text).unwrap_or_else(|e| panic!("built-in config {name}: {e}"))))
    .collect()
}
