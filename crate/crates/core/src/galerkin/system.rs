use serde::{Deserialize, Serialize};

use super::{initial_velocity, momentum_functional, momentum_step, PhysParams};
use crate::continuity::{cfl_limit, div_sup, ContinuityParams, ContinuitySolver};
use crate::coupling::{force_potential, potential_g, InteractionSpec};
use crate::error::{Error, Result};
use crate::fields::{helmholtz_clean, inner, Bc, ComplexField, ScalarField, VectorField3};
use crate::geometry::{build_basis, Domain, GalerkinState, SineBasis};
use crate::induction::{InductionParams, InductionSolver};
use crate::lagrangian::{pullback_wave_sq, specific_volume, step_flow, FlowState, SpectralVelocity};
use crate::nls::{NlsSolver, WaveParams};

/// Everything a coupled run needs besides the initial data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunParams {
    pub phys: PhysParams,
    pub interaction: InteractionSpec,
    /// Galerkin dimension.
    pub n: usize,
    /// Dimension of the smoothed velocity driving the flow map, `n_flow <= n`.
    pub n_flow: usize,
    pub wave_substeps: usize,
    pub rho_floor: f64,
    pub cfl: f64,
}

impl RunParams {
    pub fn new(phys: PhysParams, interaction: InteractionSpec, n: usize, n_flow: usize) -> Self {
        Self {
            phys,
            interaction,
            n,
            n_flow,
            wave_substeps: 1,
            rho_floor: crate::lagrangian::DEFAULT_RHO_FLOOR,
            cfl: crate::continuity::DEFAULT_CFL,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.phys.validate()?;
        self.interaction.validate()?;
        if self.n == 0 || self.n_flow == 0 || self.n_flow > self.n {
            return Err(Error::Parameter(format!("need 1 <= N <= n, got N = {}, n = {}", self.n_flow, self.n)));
        }
        if self.wave_substeps == 0 {
            return Err(Error::Parameter("wave substeps must be at least 1".into()));
        }
        Ok(())
    }
}

/// Instantaneous dissipation rates, or their time integrals.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct DissipationRates {
    /// `mu |grad u|^2 + (lambda + mu)(div u)^2`.
    pub viscous: f64,
    /// `nu |grad H|^2`.
    pub magnetic: f64,
    /// `(a gamma rho^{gamma-2} + delta beta rho^{beta-2}) |grad rho|^2`, without the `eps` factor.
    pub density: f64,
    /// `||u||^2_{H^1_0}`.
    pub velocity_h1: f64,
}

impl DissipationRates {
    fn trapezoid(&self, a: &Self, b: &Self, dt: f64) -> Self {
        let s = |acc: f64, x: f64, y: f64| acc + 0.5 * dt * (x + y);
        Self {
            viscous: s(self.viscous, a.viscous, b.viscous),
            magnetic: s(self.magnetic, a.magnetic, b.magnetic),
            density: s(self.density, a.density, b.density),
            velocity_h1: s(self.velocity_h1, a.velocity_h1, b.velocity_h1),
        }
    }
}

/// Full state of one coupled simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemState {
    pub rho: ScalarField,
    pub velocity: GalerkinState,
    /// Momentum functional `b(t)`, the primary momentum unknown.
    pub b: Vec<[f64; 3]>,
    pub h: VectorField3,
    pub psi: ComplexField,
    pub flow: FlowState,
    pub t: f64,
    pub rates: DissipationRates,
    pub dissipated: DissipationRates,
    pub clips: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepReport {
    pub t: f64,
    pub clips: usize,
    /// `||div u||_inf` of the velocity that advected the density.
    pub div_sup: f64,
    pub cfl_limit: f64,
}

/// Basis and sub-solvers for one grid and parameter set.
#[derive(Debug, Clone)]
pub struct CoupledSolver {
    basis: SineBasis,
    params: RunParams,
    continuity: ContinuitySolver,
    induction: InductionSolver,
    nls: NlsSolver,
}

impl CoupledSolver {
    pub fn new(domain: Domain, params: RunParams) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            basis: build_basis(domain, params.n)?,
            params,
            continuity: ContinuitySolver::new(domain),
            induction: InductionSolver::new(domain),
            nls: NlsSolver::new(domain),
        })
    }

    pub fn basis(&self) -> &SineBasis {
        &self.basis
    }
    pub fn params(&self) -> &RunParams {
        &self.params
    }
    pub fn domain(&self) -> &Domain {
        self.basis.domain()
    }
    pub fn continuity(&self) -> &ContinuitySolver {
        &self.continuity
    }
    pub fn induction(&self) -> &InductionSolver {
        &self.induction
    }
    pub fn nls(&self) -> &NlsSolver {
        &self.nls
    }

    /// Build the state at `t = 0` from density, momentum, magnetic field and wave.
    pub fn initial_state(
        &self,
        rho0: ScalarField,
        m0: &VectorField3,
        h0: VectorField3,
        psi0: ComplexField,
    ) -> Result<SystemState> {
        let d = *self.domain();
        if *rho0.domain() != d || *h0.domain() != d || *psi0.domain() != d || *m0.domain() != d {
            return Err(Error::Shape("initial data on a different grid".into()));
        }
        let velocity = initial_velocity(m0, &rho0, &self.basis, self.params.n)?;
        let b = momentum_functional(m0, &self.basis, self.params.n)?;
        let h = if h0.comps[0].max_abs() == 0.0 && h0.comps[1].max_abs() == 0.0 { h0 } else { helmholtz_clean(&h0)? };
        let mut s = SystemState {
            rho: rho0,
            velocity,
            b,
            h,
            psi: psi0,
            flow: FlowState::identity(d),
            t: 0.0,
            rates: DissipationRates::default(),
            dissipated: DissipationRates::default(),
            clips: 0,
        };
        s.rates = self.rates(&s);
        Ok(s)
    }

    /// Full synthesised grid velocity.
    pub fn velocity_field(&self, s: &SystemState) -> VectorField3 {
        self.basis.synthesize(&s.velocity)
    }

    pub fn rates(&self, s: &SystemState) -> DissipationRates {
        let p = &self.params.phys;
        let d = *self.domain();
        let np = d.len();
        let grad = self.basis.synthesize_gradient(&s.velocity);
        let mut grad_sq = 0.0;
        for g in &grad {
            grad_sq += inner(&g[0], &g[0], &d) + inner(&g[1], &g[1], &d);
        }
        let div: Vec<f64> = (0..np).map(|q| grad[0][0][q] + grad[1][1][q]).collect();
        let viscous = p.mu * grad_sq + (p.lambda + p.mu) * inner(&div, &div, &d);
        let magnetic = self.induction.dissipation_rate(&s.h, p.nu);
        DissipationRates { viscous, magnetic, density: density_dissipation_rate(&s.rho, p), velocity_h1: grad_sq }
    }

    /// One Lie-split step of the coupled system. Errors leave `s` untouched.
    pub fn step(&self, s: &SystemState, dt: f64) -> Result<(SystemState, StepReport)> {
        let p = &self.params;
        let u = self.velocity_field(s);
        let u_flow = s.velocity.truncated(p.n_flow);
        let limit = cfl_limit(&u, p.cfl);

        let flow = step_flow(&s.flow, &SpectralVelocity { basis: &self.basis, state: &u_flow }, dt)?;

        let cp = ContinuityParams { eps: p.phys.eps, dt, cfl: p.cfl };
        let (rho, clips) = self.continuity.step(&s.rho, &u, &cp)?;

        let ip = InductionParams { nu: p.phys.nu, dt, cfl: p.cfl };
        let h = self.induction.step(&s.h, &u, &ip)?;

        let coupled = p.interaction.alpha != 0.0;
        let (psi, force) = if coupled {
            let v = specific_volume(&rho, &flow, p.rho_floor)?;
            let wsq = pullback_wave_sq(&s.psi, &flow)?;
            let jy = flow.jacobian_eulerian();
            let g = potential_g(&p.interaction, &v, &s.psi)?;
            let psi = self.nls.step(&s.psi, &g, &WaveParams { dt, substeps: p.wave_substeps })?;
            (psi, Some(force_potential(&p.interaction, &rho, &jy, &wsq)?))
        } else {
            let g = ScalarField::zeros(*self.domain(), Bc::Neumann0);
            (self.nls.step(&s.psi, &g, &WaveParams { dt, substeps: p.wave_substeps })?, None)
        };

        let (b, mut velocity) = momentum_step(&self.basis, &rho, &s.b, &h, force.as_ref(), &p.phys, dt)?;
        let t = s.t + dt;
        velocity.t = t;
        let mut next = SystemState {
            rho,
            velocity,
            b,
            h,
            psi,
            flow,
            t,
            rates: DissipationRates::default(),
            dissipated: s.dissipated,
            clips: s.clips + clips,
        };
        next.rates = self.rates(&next);
        next.dissipated = s.dissipated.trapezoid(&s.rates, &next.rates, dt);
        Ok((next, StepReport { t, clips, div_sup: div_sup(&u), cfl_limit: limit }))
    }
}

/// `int (a gamma rho^{gamma-2} + delta beta rho^{beta-2}) |grad rho|^2`, evaluated
/// as `int 4a/gamma |grad rho^{gamma/2}|^2 + 4 delta/beta |grad rho^{beta/2}|^2`
/// so vacuum regions stay finite.
pub fn density_dissipation_rate(rho: &ScalarField, p: &PhysParams) -> f64 {
    let d = *rho.domain();
    let term = |power: f64, coef: f64| -> f64 {
        if coef == 0.0 {
            return 0.0;
        }
        let f = rho.map(|r| r.max(0.0).powf(0.5 * power));
        let (gx, gy) = (f.dx(), f.dy());
        coef * 4.0 / power * (inner(&gx, &gx, &d) + inner(&gy, &gy, &d))
    };
    term(p.gamma, p.a) + term(p.beta, p.delta)
}
