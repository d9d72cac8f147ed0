//! Faedo-Galerkin momentum system: mass operator, weak-form right-hand side
//! and the integral-form update of the momentum functional.

mod system;

pub use system::{CoupledSolver, DissipationRates, RunParams, StepReport, SystemState};

use nalgebra::{Cholesky, DMatrix, Dyn};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{Bc, ScalarField, VectorField3};
use crate::geometry::{GalerkinState, SineBasis};

/// Physical coefficients of the regularised system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhysParams {
    /// Pressure constant in `a rho^gamma`.
    pub a: f64,
    pub gamma: f64,
    /// Artificial pressure `delta rho^beta`.
    pub delta: f64,
    pub beta: f64,
    pub lambda: f64,
    pub mu: f64,
    pub nu: f64,
    pub eps: f64,
    /// Integrability exponent used for the `W^{2,r}` part of `R`.
    pub r: f64,
}

impl Default for PhysParams {
    fn default() -> Self {
        Self { a: 1.0, gamma: 1.4, delta: 1e-3, beta: 8.0, lambda: 0.0, mu: 1.0, nu: 1.0, eps: 1e-2, r: 1.5 }
    }
}

impl PhysParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Parameter(m));
        if !(self.a > 0.0) {
            return bad(format!("pressure constant a must be positive, got {}", self.a));
        }
        if !(self.gamma > 1.0) {
            return bad(format!("gamma must exceed 1, got {}", self.gamma));
        }
        if !(self.delta >= 0.0) {
            return bad(format!("delta must be nonnegative, got {}", self.delta));
        }
        if !(self.r > 1.0 && self.r < 2.0) {
            return bad(format!("r must lie in (1, 2), got {}", self.r));
        }
        let beta_min = (2.0 * self.r / (2.0 - self.r)).max(2.0 * self.r / (self.r - 1.0));
        if !(self.beta > beta_min) {
            return bad(format!("beta must exceed {beta_min} for r = {}, got {}", self.r, self.beta));
        }
        if !(self.mu > 0.0 && 2.0 * self.mu + self.lambda > 0.0) {
            return bad(format!("viscosities need mu > 0 and 2 mu + lambda > 0, got mu = {}, lambda = {}", self.mu, self.lambda));
        }
        if !(self.nu > 0.0) {
            return bad(format!("magnetic diffusivity must be positive, got {}", self.nu));
        }
        if !(self.eps >= 0.0) {
            return bad(format!("eps must be nonnegative, got {}", self.eps));
        }
        Ok(())
    }

    /// `a rho^gamma + delta rho^beta`.
    pub fn pressure(&self, rho: f64) -> f64 {
        let r = rho.max(0.0);
        self.a * r.powf(self.gamma) + self.delta * r.powf(self.beta)
    }
}

/// `M_ij = int rho eta_i eta_j`.
pub fn assemble_mass(rho: &ScalarField, basis: &SineBasis, n: usize) -> Result<DMatrix<f64>> {
    if rho.domain() != basis.domain() {
        return Err(Error::Shape("density and basis grids differ".into()));
    }
    if n == 0 || n > basis.len() {
        return Err(Error::Capacity { requested: n, available: basis.len() });
    }
    let inf = rho.min();
    if !(inf > 0.0) {
        return Err(Error::SingularMass { inf_rho: inf });
    }
    let da = basis.domain().cell_area();
    let weighted: Vec<Vec<f64>> =
        (0..n).map(|i| basis.values(i).iter().zip(rho.data()).map(|(e, r)| e * r).collect()).collect();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = weighted[i].iter().zip(basis.values(j)).map(|(a, b)| a * b).sum::<f64>() * da;
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    Ok(m)
}

/// Factorised mass operator.
#[derive(Debug, Clone)]
pub struct MassOperator {
    chol: Cholesky<f64, Dyn>,
}

impl MassOperator {
    pub fn new(rho: &ScalarField, basis: &SineBasis, n: usize) -> Result<Self> {
        let m = assemble_mass(rho, basis, n)?;
        let chol = Cholesky::new(m).ok_or(Error::SingularMass { inf_rho: rho.min() })?;
        Ok(Self { chol })
    }

    /// `M^{-1} b`, componentwise.
    pub fn solve(&self, b: &[[f64; 3]]) -> Vec<[f64; 3]> {
        let n = b.len();
        let mut out = vec![[0.0; 3]; n];
        for c in 0..3 {
            let col = nalgebra::DVector::from_iterator(n, b.iter().map(|v| v[c]));
            let x = self.chol.solve(&col);
            for (o, v) in out.iter_mut().zip(x.iter()) {
                o[c] = *v;
            }
        }
        out
    }
}

/// Functional `<m, eta_j>`, `j < n`.
pub fn momentum_functional(m: &VectorField3, basis: &SineBasis, n: usize) -> Result<Vec<[f64; 3]>> {
    if m.domain() != basis.domain() {
        return Err(Error::Shape("momentum and basis grids differ".into()));
    }
    if n > basis.len() {
        return Err(Error::Capacity { requested: n, available: basis.len() });
    }
    let da = basis.domain().cell_area();
    Ok((0..n)
        .map(|j| {
            let eta = basis.values(j);
            let mut v = [0.0; 3];
            for (c, f) in m.comps.iter().enumerate() {
                v[c] = f.data().iter().zip(eta).map(|(a, b)| a * b).sum::<f64>() * da;
            }
            v
        })
        .collect())
}

/// Coefficients of the unique `u` in the span with `int rho0 u . eta = int m0 . eta`.
pub fn initial_velocity(m0: &VectorField3, rho0: &ScalarField, basis: &SineBasis, n: usize) -> Result<GalerkinState> {
    let b = momentum_functional(m0, basis, n)?;
    let m = MassOperator::new(rho0, basis, n)?;
    Ok(GalerkinState { coeffs: m.solve(&b), t: 0.0 })
}

/// Lorentz force density `(curl H) x H` at the nodes.
pub fn lorentz_force(h: &VectorField3) -> [Vec<f64>; 3] {
    let j = h.curl();
    let (h1, h2, h3) = (h.comps[0].data(), h.comps[1].data(), h.comps[2].data());
    let np = h1.len();
    let mut out: [Vec<f64>; 3] = [vec![0.0; np], vec![0.0; np], vec![0.0; np]];
    for p in 0..np {
        out[0][p] = j[1][p] * h3[p] - j[2][p] * h2[p];
        out[1][p] = j[2][p] * h1[p] - j[0][p] * h3[p];
        out[2][p] = j[0][p] * h2[p] - j[1][p] * h1[p];
    }
    out
}

/// Right-hand side `<N[u], eta_j e_i>` for `j < n`.
///
/// `force` is the scalar potential `f`; pass `None` when there is no
/// interaction so the term is skipped entirely.
pub fn assemble_rhs(
    basis: &SineBasis,
    rho: &ScalarField,
    u: &GalerkinState,
    h: &VectorField3,
    force: Option<&ScalarField>,
    params: &PhysParams,
) -> Result<Vec<[f64; 3]>> {
    let d = *basis.domain();
    if *rho.domain() != d || *h.domain() != d {
        return Err(Error::Shape("state fields and basis grids differ".into()));
    }
    if rho.bc() != Bc::Neumann0 {
        return Err(Error::BoundaryTag { expected: Bc::Neumann0.name(), found: rho.bc().name() });
    }
    let n = u.n();
    if n > basis.len() {
        return Err(Error::Capacity { requested: n, available: basis.len() });
    }
    let np = d.len();
    let vel = basis.synthesize(u);
    let grad = basis.synthesize_gradient(u);
    let (rx, ry) = (rho.dx(), rho.dy());
    let r = rho.data();
    let uc: [&[f64]; 3] = [vel.comps[0].data(), vel.comps[1].data(), vel.comps[2].data()];
    let lorentz = lorentz_force(h);
    let pres: Vec<f64> = r.iter().map(|&v| params.pressure(v)).collect();
    let div: Vec<f64> = (0..np).map(|p| grad[0][0][p] + grad[1][1][p]).collect();

    // weights multiplying eta_j, d_x eta_j and d_y eta_j for each component
    let mut w0: [Vec<f64>; 3] = Default::default();
    let mut wx: [Vec<f64>; 3] = Default::default();
    let mut wy: [Vec<f64>; 3] = Default::default();
    let lm = params.lambda + params.mu;
    for i in 0..3 {
        w0[i] = (0..np)
            .map(|p| lorentz[i][p] - params.eps * (grad[i][0][p] * rx[p] + grad[i][1][p] * ry[p]))
            .collect();
        wx[i] = (0..np).map(|p| r[p] * uc[i][p] * uc[0][p] - params.mu * grad[i][0][p]).collect();
        wy[i] = (0..np).map(|p| r[p] * uc[i][p] * uc[1][p] - params.mu * grad[i][1][p]).collect();
    }
    for p in 0..np {
        let mut s = pres[p] - lm * div[p];
        if let Some(f) = force {
            s -= f.data()[p];
        }
        wx[0][p] += s;
        wy[1][p] += s;
    }

    let da = d.cell_area();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() * da;
    Ok((0..n)
        .map(|j| {
            let (e, ex, ey) = (basis.values(j), basis.grad_x(j), basis.grad_y(j));
            let mut out = [0.0; 3];
            for i in 0..3 {
                out[i] = dot(&w0[i], e) + dot(&wx[i], ex) + dot(&wy[i], ey);
            }
            out
        })
        .collect())
}

/// Midpoint RK2 on `b' = <N[M^{-1} b], eta>` with the mass operator frozen at
/// the end-of-step density. Returns the new functional and coefficients.
pub fn momentum_step(
    basis: &SineBasis,
    rho: &ScalarField,
    b: &[[f64; 3]],
    h: &VectorField3,
    force: Option<&ScalarField>,
    params: &PhysParams,
    dt: f64,
) -> Result<(Vec<[f64; 3]>, GalerkinState)> {
    let mass = MassOperator::new(rho, basis, b.len())?;
    let u0 = GalerkinState { coeffs: mass.solve(b), t: 0.0 };
    let k1 = assemble_rhs(basis, rho, &u0, h, force, params)?;
    let half: Vec<[f64; 3]> = b.iter().zip(&k1).map(|(v, k)| std::array::from_fn(|c| v[c] + 0.5 * dt * k[c])).collect();
    let uh = GalerkinState { coeffs: mass.solve(&half), t: 0.0 };
    let k2 = assemble_rhs(basis, rho, &uh, h, force, params)?;
    let next: Vec<[f64; 3]> = b.iter().zip(&k2).map(|(v, k)| std::array::from_fn(|c| v[c] + dt * k[c])).collect();
    let coeffs = mass.solve(&next);
    Ok((next, GalerkinState { coeffs, t: 0.0 }))
}
