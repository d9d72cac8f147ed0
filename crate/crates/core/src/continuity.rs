//! Regularised continuity equation `rho_t + div(rho u) = eps lap rho` with
//! zero-flux walls.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::{sum_integral, Bc, ScalarField, VectorField3};
use crate::geometry::Domain;
use crate::spectral::{five_point_eigenvalues, tensor_sum, Parity, Transform2d};

pub const DEFAULT_CFL: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuityParams {
    pub eps: f64,
    pub dt: f64,
    /// Advective Courant number `c_adv`.
    pub cfl: f64,
}

impl ContinuityParams {
    pub fn new(eps: f64, dt: f64) -> Self {
        Self { eps, dt, cfl: DEFAULT_CFL }
    }

    fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Parameter(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.eps >= 0.0) {
            return Err(Error::Parameter(format!("eps must be nonnegative, got {}", self.eps)));
        }
        if !(self.cfl > 0.0) {
            return Err(Error::Parameter(format!("CFL number must be positive, got {}", self.cfl)));
        }
        Ok(())
    }
}

/// Per-step diagnostics row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityRecord {
    pub t: f64,
    pub mass: f64,
    pub min: f64,
    pub max: f64,
    pub envelope_lower: f64,
    pub envelope_upper: f64,
    pub clips: usize,
}

/// Largest stable step `c h / ||u||_inf`; infinite for a resting fluid.
pub fn cfl_limit(u: &VectorField3, cfl: f64) -> f64 {
    let d = u.domain();
    let umax = u.comps[0].max_abs().max(u.comps[1].max_abs());
    if umax == 0.0 {
        f64::INFINITY
    } else {
        cfl * d.h_min() / umax
    }
}

fn mc_limiter(a: f64, b: f64) -> f64 {
    if a * b <= 0.0 {
        0.0
    } else {
        a.signum() * (2.0 * a.abs()).min(2.0 * b.abs()).min(0.5 * (a + b).abs())
    }
}

/// `-div(rho u)` by MUSCL reconstruction (MC limiter) and upwind face fluxes.
///
/// Face velocities are neighbour averages; the wall faces carry no flux, so
/// the sum of the rate over all cells is zero to roundoff.
pub fn advection_rate(rho: &ScalarField, u: &VectorField3) -> Vec<f64> {
    let d = *rho.domain();
    let (nx, ny) = (d.nx, d.ny);
    let mut rate = vec![0.0; nx * ny];
    let r = |i: isize, j: isize| rho.ext(i, j);

    // x faces i+1/2, i = 0..nx-2
    let ux = u.comps[0].data();
    for j in 0..ny {
        let jj = j as isize;
        for i in 0..nx - 1 {
            let ii = i as isize;
            let vf = 0.5 * (ux[j * nx + i] + ux[j * nx + i + 1]);
            let state = if vf >= 0.0 {
                let s = mc_limiter(r(ii, jj) - r(ii - 1, jj), r(ii + 1, jj) - r(ii, jj));
                r(ii, jj) + 0.5 * s
            } else {
                let s = mc_limiter(r(ii + 1, jj) - r(ii, jj), r(ii + 2, jj) - r(ii + 1, jj));
                r(ii + 1, jj) - 0.5 * s
            };
            let flux = vf * state / d.hx();
            rate[j * nx + i] -= flux;
            rate[j * nx + i + 1] += flux;
        }
    }
    let uy = u.comps[1].data();
    for j in 0..ny - 1 {
        let jj = j as isize;
        for i in 0..nx {
            let ii = i as isize;
            let vf = 0.5 * (uy[j * nx + i] + uy[(j + 1) * nx + i]);
            let state = if vf >= 0.0 {
                let s = mc_limiter(r(ii, jj) - r(ii, jj - 1), r(ii, jj + 1) - r(ii, jj));
                r(ii, jj) + 0.5 * s
            } else {
                let s = mc_limiter(r(ii, jj + 1) - r(ii, jj), r(ii, jj + 2) - r(ii, jj + 1));
                r(ii, jj + 1) - 0.5 * s
            };
            let flux = vf * state / d.hy();
            rate[j * nx + i] -= flux;
            rate[(j + 1) * nx + i] += flux;
        }
    }
    rate
}

/// Set negative values to zero and rescale the positive part to keep the
/// total. Returns the number of clipped nodes.
pub fn clip_negative(data: &mut [f64]) -> usize {
    let total: f64 = data.iter().sum();
    let clips = data.iter().filter(|v| **v < 0.0).count();
    if clips == 0 {
        return 0;
    }
    let positive: f64 = data.iter().filter(|v| **v > 0.0).sum();
    let scale = if positive > 0.0 && total > 0.0 { total / positive } else { 0.0 };
    for v in data.iter_mut() {
        *v = if *v > 0.0 { *v * scale } else { 0.0 };
    }
    clips
}

/// Density stepper with its transform plan and diffusion symbols.
#[derive(Debug, Clone)]
pub struct ContinuitySolver {
    domain: Domain,
    transform: Transform2d,
    laplace: Vec<f64>,
}

impl ContinuitySolver {
    pub fn new(domain: Domain) -> Self {
        let ex = five_point_eigenvalues(domain.nx, domain.hx(), Parity::Even);
        let ey = five_point_eigenvalues(domain.ny, domain.hy(), Parity::Even);
        Self { domain, transform: Transform2d::new(domain.nx, domain.ny), laplace: tensor_sum(&ex, &ey) }
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    /// Apply `exp(eps dt lap_h)` exactly in cosine space.
    pub fn diffuse(&self, data: &mut [f64], eps: f64, dt: f64) {
        if eps == 0.0 {
            return;
        }
        let mult: Vec<f64> = self.laplace.iter().map(|l| (-eps * dt * l).exp()).collect();
        self.transform.filter(data, Parity::Even, &mult);
    }

    /// `eps lap_h rho`, the semi-discrete diffusion rate.
    pub fn diffusion_rate(&self, data: &[f64], eps: f64) -> Vec<f64> {
        let mult: Vec<f64> = self.laplace.iter().map(|l| -eps * l).collect();
        let mut buf = data.to_vec();
        self.transform.filter(&mut buf, Parity::Even, &mult);
        buf
    }

    /// One step: Heun advection, diffusion, then clipping. Returns the new
    /// density and the clip count.
    pub fn step(&self, rho: &ScalarField, u: &VectorField3, p: &ContinuityParams) -> Result<(ScalarField, usize)> {
        p.validate()?;
        if rho.bc() != Bc::Neumann0 {
            return Err(Error::BoundaryTag { expected: Bc::Neumann0.name(), found: rho.bc().name() });
        }
        if u.comps[0].bc() != Bc::Dirichlet0 || u.comps[1].bc() != Bc::Dirichlet0 {
            return Err(Error::BoundaryTag { expected: Bc::Dirichlet0.name(), found: u.comps[0].bc().name() });
        }
        if *rho.domain() != self.domain || *u.domain() != self.domain {
            return Err(Error::Shape("density, velocity and stepper grids differ".into()));
        }
        if rho.min() < 0.0 {
            return Err(Error::Precondition(format!("negative density {}", rho.min())));
        }
        let limit = cfl_limit(u, p.cfl);
        if p.dt > limit * (1.0 + 1e-12) {
            return Err(Error::Cfl { dt: p.dt, limit });
        }

        let moving = u.comps[0].max_abs() > 0.0 || u.comps[1].max_abs() > 0.0;
        let mut next = rho.clone();
        if moving {
            let k1 = advection_rate(rho, u);
            let mut stage = rho.clone();
            for (s, k) in stage.data_mut().iter_mut().zip(&k1) {
                *s += p.dt * k;
            }
            let k2 = advection_rate(&stage, u);
            for ((n, s), k) in next.data_mut().iter_mut().zip(stage.data()).zip(&k2) {
                *n = 0.5 * *n + 0.5 * (s + p.dt * k);
            }
        }
        self.diffuse(next.data_mut(), p.eps, p.dt);
        let clips = clip_negative(next.data_mut());
        Ok((next, clips))
    }
}

/// Convenience single step with a throwaway stepper.
pub fn step_density(rho: &ScalarField, u: &VectorField3, p: &ContinuityParams) -> Result<ScalarField> {
    Ok(ContinuitySolver::new(*rho.domain()).step(rho, u, p)?.0)
}

/// `||div u||_inf` with the same face averages the flux uses.
pub fn div_sup(u: &VectorField3) -> f64 {
    u.divergence().into_iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Lower and upper density bounds `inf rho0 exp(-S_k)`, `sup rho0 exp(S_k)`
/// with `S_k = sum_{i<k} dt ||div u||_inf,i`; `history.len() + 1` entries.
pub fn max_principle_envelope(rho0: &ScalarField, history: &[f64], dt: f64) -> (Vec<f64>, Vec<f64>) {
    let (lo, hi) = (rho0.min(), rho0.max());
    let mut s = 0.0;
    let mut lower = Vec::with_capacity(history.len() + 1);
    let mut upper = Vec::with_capacity(history.len() + 1);
    lower.push(lo);
    upper.push(hi);
    for d in history {
        s += dt * d;
        lower.push(lo * (-s).exp());
        upper.push(hi * s.exp());
    }
    (lower, upper)
}

pub fn mass(rho: &ScalarField) -> f64 {
    sum_integral(rho.data(), rho.domain())
}
