//! Resistive induction `H_t - curl(u x H) = -curl(nu curl H)` with `H = 0` on
//! the wall and `div H = 0`.

use serde::Serialize;

use crate::continuity::cfl_limit;
use crate::error::{Error, Result};
use crate::fields::{helmholtz_clean, inner, Bc, ScalarField, VectorField3};
use crate::geometry::Domain;
use crate::spectral::{five_point_eigenvalues, tensor_sum, Parity, Transform2d};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InductionParams {
    pub nu: f64,
    pub dt: f64,
    pub cfl: f64,
}

impl InductionParams {
    pub fn new(nu: f64, dt: f64) -> Self {
        Self { nu, dt, cfl: crate::continuity::DEFAULT_CFL }
    }

    fn validate(&self) -> Result<()> {
        if !(self.nu > 0.0 && self.nu.is_finite()) {
            return Err(Error::Parameter(format!("magnetic diffusivity must be positive, got {}", self.nu)));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Parameter(format!("dt must be positive, got {}", self.dt)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MagneticRecord {
    pub t: f64,
    pub h_sq: f64,
    pub div_residual: f64,
    pub dissipation_increment: f64,
}

/// `u x H` stored with even ghosts (product of two fields odd at the wall).
fn cross(u: &VectorField3, h: &VectorField3) -> VectorField3 {
    let d = *h.domain();
    let (u1, u2, u3) = (u.comps[0].data(), u.comps[1].data(), u.comps[2].data());
    let (h1, h2, h3) = (h.comps[0].data(), h.comps[1].data(), h.comps[2].data());
    let mut out = VectorField3::zeros(d, Bc::Neumann0);
    for p in 0..d.len() {
        out.comps[0].data_mut()[p] = u2[p] * h3[p] - u3[p] * h2[p];
        out.comps[1].data_mut()[p] = u3[p] * h1[p] - u1[p] * h3[p];
        out.comps[2].data_mut()[p] = u1[p] * h2[p] - u2[p] * h1[p];
    }
    out
}

/// `curl(u x H)` with the planar curl convention and centred differences.
pub fn transport_rate(h: &VectorField3, u: &VectorField3) -> [Vec<f64>; 3] {
    cross(u, h).curl()
}

/// `||curl H||^2` by centred differences.
pub fn curl_norm_sq(h: &VectorField3) -> f64 {
    let d = *h.domain();
    h.curl().iter().map(|c| inner(c, c, &d)).sum()
}

fn check_tags(h: &VectorField3) -> Result<()> {
    for c in &h.comps {
        if c.bc() != Bc::Dirichlet0 {
            return Err(Error::BoundaryTag { expected: Bc::Dirichlet0.name(), found: c.bc().name() });
        }
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct InductionSolver {
    domain: Domain,
    transform: Transform2d,
    laplace: Vec<f64>,
}

impl InductionSolver {
    pub fn new(domain: Domain) -> Self {
        let ex = five_point_eigenvalues(domain.nx, domain.hx(), Parity::Odd);
        let ey = five_point_eigenvalues(domain.ny, domain.hy(), Parity::Odd);
        Self { domain, transform: Transform2d::new(domain.nx, domain.ny), laplace: tensor_sum(&ex, &ey) }
    }

    /// Minus the five-point Laplacian symbol on sine modes.
    pub fn laplace_symbol(&self) -> &[f64] {
        &self.laplace
    }

    /// `exp(nu dt lap_h)` applied to every component.
    pub fn diffuse(&self, h: &mut VectorField3, nu: f64, dt: f64) {
        let mult: Vec<f64> = self.laplace.iter().map(|l| (-nu * dt * l).exp()).collect();
        for c in h.comps.iter_mut() {
            self.transform.filter(c.data_mut(), Parity::Odd, &mult);
        }
    }

    /// `nu lap_h H` per component, the semi-discrete diffusion rate.
    pub fn diffusion_rate(&self, h: &VectorField3, nu: f64) -> [Vec<f64>; 3] {
        let mult: Vec<f64> = self.laplace.iter().map(|l| -nu * l).collect();
        let mut out: [Vec<f64>; 3] = Default::default();
        for (o, c) in out.iter_mut().zip(&h.comps) {
            let mut buf = c.data().to_vec();
            self.transform.filter(&mut buf, Parity::Odd, &mult);
            *o = buf;
        }
        out
    }

    /// `nu sum_c <H_c, -lap_h H_c>`, the rate at which the diffusion removes `||H||^2 / 2`.
    pub fn dissipation_rate(&self, h: &VectorField3, nu: f64) -> f64 {
        let rate = self.diffusion_rate(h, nu);
        -h.comps.iter().zip(&rate).map(|(c, r)| inner(c.data(), r, &self.domain)).sum::<f64>()
    }

    /// SSP-RK3 transport, exact diffusion, then divergence cleaning.
    pub fn step(&self, h: &VectorField3, u: &VectorField3, p: &InductionParams) -> Result<VectorField3> {
        p.validate()?;
        check_tags(h)?;
        if *h.domain() != self.domain || *u.domain() != self.domain {
            return Err(Error::Shape("magnetic field, velocity and stepper grids differ".into()));
        }
        let limit = cfl_limit(u, p.cfl);
        if p.dt > limit * (1.0 + 1e-12) {
            return Err(Error::Cfl { dt: p.dt, limit });
        }
        let moving = u.comps.iter().any(|c| c.max_abs() > 0.0);
        let mut next = h.clone();
        if moving {
            let axpy = |base: &VectorField3, a: f64, b: &VectorField3, c: f64, rate: &[Vec<f64>; 3]| {
                let mut out = base.clone();
                for k in 0..3 {
                    let bd = b.comps[k].data();
                    for (q, o) in out.comps[k].data_mut().iter_mut().enumerate() {
                        *o = a * *o + c * (bd[q] + p.dt * rate[k][q]);
                    }
                }
                out
            };
            let s1 = axpy(h, 0.0, h, 1.0, &transport_rate(h, u));
            let s2 = axpy(h, 0.75, &s1, 0.25, &transport_rate(&s1, u));
            next = axpy(h, 1.0 / 3.0, &s2, 2.0 / 3.0, &transport_rate(&s2, u));
        }
        self.diffuse(&mut next, p.nu, p.dt);
        if moving {
            next = helmholtz_clean(&next)?;
        }
        Ok(next)
    }
}

pub fn step_magnetic(h: &VectorField3, u: &VectorField3, p: &InductionParams) -> Result<VectorField3> {
    InductionSolver::new(*h.domain()).step(h, u, p)
}

/// Diagnostics row for a state reached at time `t` after a step of `dt`.
pub fn magnetic_record(h: &VectorField3, nu: f64, t: f64, dt: f64) -> MagneticRecord {
    let d = *h.domain();
    let div = h.divergence();
    let div_residual = inner(&div, &div, &d).sqrt();
    MagneticRecord { t, h_sq: h.l2_norm_sq(), div_residual, dissipation_increment: nu * curl_norm_sq(h) * dt }
}

/// Axial field `(0, 0, f)`.
pub fn axial(f: ScalarField) -> Result<VectorField3> {
    let d = *f.domain();
    let z = ScalarField::zeros(d, f.bc());
    VectorField3::from_components([z.clone(), z, f])
}
