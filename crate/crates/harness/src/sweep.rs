//! Parameter sweeps `(eps_k, alpha_k, N_k)` along which `(eps^2 / alpha)^{1/C_N}`
//! must strictly increase, plus a separate `delta` axis.

use aurora_core::geometry::{build_basis, grad_sup_constant};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::HarnessError;

/// How `alpha_k` follows `eps_k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AlphaRule {
    /// `alpha_k = eps_k^3`.
    Cubic,
    Constant { alpha: f64 },
    /// Pick `alpha_k` so the sweep quantity grows by `factor` per level,
    /// starting from the cubic value at level 0.
    HorizonGrowth { factor: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NSchedule {
    /// `N_k = N_0 + k`.
    Increment,
    /// `N_k = N_0`.
    Fixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSettings {
    /// Level-0 viscosity; the physics value when absent.
    pub eps0: Option<f64>,
    pub alpha: AlphaRule,
    pub n_schedule: NSchedule,
    /// Values for the separate `delta` axis, run at the last plan member.
    pub deltas: Vec<f64>,
    /// Steps between recorded frames for the convergence tables.
    pub frame_every: usize,
}

impl Default for SweepSettings {
    fn default() -> Self {
        Self { eps0: None, alpha: AlphaRule::Cubic, n_schedule: NSchedule::Fixed, deltas: Vec::new(), frame_every: 10 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepMember {
    pub id: usize,
    pub eps: f64,
    pub alpha: f64,
    pub n_flow: usize,
    pub delta: f64,
    pub c_n: f64,
    /// `(eps^2 / alpha)^{1/C_N}`.
    pub q: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPlan {
    pub members: Vec<SweepMember>,
    pub rule: AlphaRule,
    pub n_schedule: NSchedule,
}

fn c_n(cfg: &RunConfig, n: usize) -> Result<f64, HarnessError> {
    let d = cfg.domain()?;
    let basis = build_basis(d, n)?;
    Ok(grad_sup_constant(&basis, n, cfg.galerkin.grad_sup_refine)?)
}

/// Build and check a `levels`-member plan from the base configuration.
pub fn make_sweep(cfg: &RunConfig, levels: usize) -> Result<SweepPlan, HarnessError> {
    if levels < 2 {
        return Err(HarnessError::Plan(format!("a sweep needs at least 2 levels, got {levels}")));
    }
    let s = &cfg.sweep;
    let eps0 = s.eps0.unwrap_or(cfg.physics.eps);
    if !(eps0 > 0.0 && eps0 < 1.0) {
        return Err(HarnessError::Plan(format!("eps0 must lie in (0, 1), got {eps0}")));
    }
    let n0 = cfg.galerkin.n_flow;
    let q0 = {
        let c0 = c_n(cfg, n0)?;
        (1.0 / eps0).powf(1.0 / c0)
    };
    let mut members = Vec::with_capacity(levels);
    for k in 0..levels {
        let eps = eps0 * 0.5f64.powi(k as i32);
        let n_flow = match s.n_schedule {
            NSchedule::Increment => n0 + k,
            NSchedule::Fixed => n0,
        };
        let c = c_n(cfg, n_flow)?;
        let alpha = match s.alpha {
            AlphaRule::Cubic => eps.powi(3),
            AlphaRule::Constant { alpha } => alpha,
            AlphaRule::HorizonGrowth { factor } => {
                if !(factor > 1.0) {
                    return Err(HarnessError::Plan(format!("growth factor must exceed 1, got {factor}")));
                }
                eps * eps / (q0 * factor.powi(k as i32)).powf(c)
            }
        };
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(HarnessError::Plan(format!("level {k}: alpha = {alpha} is not positive")));
        }
        let q = (eps * eps / alpha).powf(1.0 / c);
        members.push(SweepMember { id: k, eps, alpha, n_flow, delta: cfg.physics.delta, c_n: c, q });
    }
    for w in members.windows(2) {
        if !(w[1].q > w[0].q) {
            return Err(HarnessError::Plan(format!(
                "(eps^2/alpha)^(1/C_N) must increase strictly: level {} has {:.6} (C_N = {:.4}), level {} has {:.6} (C_N = {:.4})",
                w[0].id, w[0].q, w[0].c_n, w[1].id, w[1].q, w[1].c_n
            )));
        }
    }
    Ok(SweepPlan { members, rule: s.alpha, n_schedule: s.n_schedule })
}

/// Configuration of one member: viscosity, coupling, flow dimension, floor.
pub fn member_config(base: &RunConfig, m: &SweepMember) -> RunConfig {
    let mut c = base.clone();
    c.physics.eps = m.eps;
    c.interaction.alpha = m.alpha;
    c.galerkin.n_flow = m.n_flow;
    c.galerkin.n = c.galerkin.n.max(m.n_flow);
    c.physics.delta = m.delta;
    c.name = format!("{}-m{}", base.name, m.id);
    c
}

/// `delta` axis at fixed `(eps, alpha, N)` of `anchor`, decreasing `delta`.
pub fn delta_sweep(anchor: &SweepMember, deltas: &[f64]) -> Result<Vec<SweepMember>, HarnessError> {
    if deltas.windows(2).any(|w| !(w[1] < w[0])) || deltas.iter().any(|d| !(*d > 0.0)) {
        return Err(HarnessError::Plan("delta values must be positive and strictly decreasing".into()));
    }
    Ok(deltas.iter().enumerate().map(|(i, &delta)| SweepMember { id: i, delta, ..*anchor }).collect())
}
