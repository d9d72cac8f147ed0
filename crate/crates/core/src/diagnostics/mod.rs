//! Energy ledger, the constant `R`, the horizon `T^N`, and weak-convergence
//! probes.

mod mollify;
mod probes;
mod riesz;

pub use mollify::mollify;
pub use probes::{renorm_residual, viscous_flux_probe, BumpTest, ProbeFrame, TestFunction};
pub use riesz::{riesz_a, DEFAULT_PADDING};

use serde::Serialize;

use crate::coupling::interaction_energy;
use crate::error::{Error, Result};
use crate::fields::{inner, lp_norm, sum_integral, ScalarField};
use crate::galerkin::{CoupledSolver, SystemState};
use crate::lagrangian::specific_volume;

/// One ledger row. `dissipation` and `density_dissipation` are cumulative;
/// the latter already carries the factor `eps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyRow {
    pub t: f64,
    pub kinetic: f64,
    pub pressure: f64,
    pub artificial: f64,
    pub magnetic: f64,
    pub wave: f64,
    pub coupling: f64,
    pub dissipation: f64,
    pub density_dissipation: f64,
}

impl EnergyRow {
    /// `E(t)`, cumulative viscous and resistive dissipation included.
    pub fn total(&self) -> f64 {
        self.kinetic + self.pressure + self.artificial + self.magnetic + self.wave + self.coupling + self.dissipation
    }
}

/// Evaluate every ledger column on the current state.
pub fn energy(solver: &CoupledSolver, s: &SystemState) -> Result<EnergyRow> {
    let p = &solver.params().phys;
    let spec = &solver.params().interaction;
    let d = *solver.domain();
    let u = solver.velocity_field(s);
    let speed_sq = u.magnitude_sq();
    let r = s.rho.data();
    let kin: Vec<f64> = r.iter().zip(&speed_sq).map(|(r, v)| 0.5 * r * v).collect();
    let pg: Vec<f64> = r.iter().map(|r| r.max(0.0).powf(p.gamma)).collect();
    let pb: Vec<f64> = r.iter().map(|r| r.max(0.0).powf(p.beta)).collect();
    let (grad, quartic) = solver.nls().free_energy(&s.psi);
    let coupling = if spec.alpha == 0.0 {
        0.0
    } else {
        let v = specific_volume(&s.rho, &s.flow, solver.params().rho_floor)?;
        interaction_energy(spec, &v, &s.psi)
    };
    Ok(EnergyRow {
        t: s.t,
        kinetic: sum_integral(&kin, &d),
        pressure: p.a / (p.gamma - 1.0) * sum_integral(&pg, &d),
        artificial: if p.delta == 0.0 { 0.0 } else { p.delta / (p.beta - 1.0) * sum_integral(&pb, &d) },
        magnetic: 0.5 * s.h.l2_norm_sq(),
        wave: grad + quartic,
        coupling,
        dissipation: s.dissipated.viscous + s.dissipated.magnetic,
        density_dissipation: p.eps * s.dissipated.density,
    })
}

/// `r(t) = E(t) + density dissipation - E(0) - eps^{1/2} R` for every row.
pub fn energy_residual(rows: &[EnergyRow], eps: f64, r_const: f64) -> Result<Vec<f64>> {
    let first = rows.first().ok_or_else(|| Error::Precondition("empty energy ledger".into()))?;
    let rhs = first.total() + eps.sqrt() * r_const;
    Ok(rows.iter().map(|row| row.total() + row.density_dissipation - rhs).collect())
}

/// Discrete `||f||_{W^{2,r}}` from the function, its first and its second
/// differences (mixed derivative counted once).
pub fn w2r_norm(f: &ScalarField, r: f64) -> Result<f64> {
    let d = *f.domain();
    let parts = [f.data().to_vec(), f.dx(), f.dy(), f.dxx(), f.dxy(), f.dyy()];
    let mut s = 0.0;
    for part in parts {
        s += lp_norm(&ScalarField::new(d, f.bc(), part)?, r)?.powf(r);
    }
    Ok(s.powf(1.0 / r))
}

/// `||f||^2_{H^1}`.
pub fn h1_norm_sq(f: &ScalarField) -> f64 {
    let d = *f.domain();
    let (gx, gy) = (f.dx(), f.dy());
    inner(f.data(), f.data(), &d) + inner(&gx, &gx, &d) + inner(&gy, &gy, &d)
}

/// `R = eps ||rho0||_{W^{2,r}} + ||rho0||^2_{H^1} + E(0) + 1`.
pub fn bound_r(rho0: &ScalarField, e0: f64, eps: f64, r: f64) -> Result<f64> {
    if !(r > 1.0 && r < 2.0) {
        return Err(Error::Parameter(format!("r must lie in (1, 2), got {r}")));
    }
    let w = if eps == 0.0 { 0.0 } else { eps * w2r_norm(rho0, r)? };
    Ok(w + h1_norm_sq(rho0) + e0 + 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HorizonInputs {
    pub c_n: f64,
    pub eps: f64,
    pub alpha: f64,
    pub mu: f64,
    pub e0: f64,
    pub r: f64,
}

/// `T^N = log(eps^2 / alpha) / C_N - (E(0) + eps^{1/2} R) / mu`; may be negative.
pub fn horizon_tn(h: &HorizonInputs) -> Result<f64> {
    if !(h.alpha > 0.0) {
        return Err(Error::Parameter(format!("horizon needs alpha > 0, got {}", h.alpha)));
    }
    if !(h.eps > 0.0 && h.mu > 0.0 && h.c_n > 0.0) {
        return Err(Error::Parameter(format!(
            "horizon needs eps, mu, C_N > 0, got {}, {}, {}",
            h.eps, h.mu, h.c_n
        )));
    }
    Ok((h.eps * h.eps / h.alpha).ln() / h.c_n - (h.e0 + h.eps.sqrt() * h.r) / h.mu)
}
