//! Forward flow map, Eulerian labels, Jacobians and pullbacks for the
//! smoothed velocity.

use crate::error::{Error, Result};
use crate::fields::snapshot::Snapshot;
use crate::fields::{Bc, ComplexField, ScalarField};
use crate::geometry::{Domain, GalerkinState, SineBasis};

pub const DEFAULT_RHO_FLOOR: f64 = 1e-8;
const EXIT_TOL: f64 = 1e-8;

/// Planar velocity and its divergence at a point.
pub trait VelocitySource {
    fn velocity(&self, t: f64, x: f64, y: f64) -> [f64; 2];
    fn divergence(&self, t: f64, x: f64, y: f64) -> f64;
}

/// `u^N = sum_j u_j eta_j` evaluated analytically.
#[derive(Debug, Clone, Copy)]
pub struct SpectralVelocity<'a> {
    pub basis: &'a SineBasis,
    pub state: &'a GalerkinState,
}

impl VelocitySource for SpectralVelocity<'_> {
    fn velocity(&self, _t: f64, x: f64, y: f64) -> [f64; 2] {
        let mut v = [0.0; 2];
        for (j, c) in self.state.coeffs.iter().enumerate() {
            let e = self.basis.eval(j, x, y);
            v[0] += c[0] * e;
            v[1] += c[1] * e;
        }
        v
    }

    fn divergence(&self, _t: f64, x: f64, y: f64) -> f64 {
        self.state
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| {
                let g = self.basis.grad(j, x, y);
                c[0] * g[0] + c[1] * g[1]
            })
            .sum()
    }
}

/// Velocity given by a pair of closures, for prescribed flows.
pub struct FnVelocity<U, D> {
    pub u: U,
    pub div: D,
}

impl<U, D> VelocitySource for FnVelocity<U, D>
where
    U: Fn(f64, f64, f64) -> [f64; 2],
    D: Fn(f64, f64, f64) -> f64,
{
    fn velocity(&self, t: f64, x: f64, y: f64) -> [f64; 2] {
        (self.u)(t, x, y)
    }
    fn divergence(&self, t: f64, x: f64, y: f64) -> f64 {
        (self.div)(t, x, y)
    }
}

/// Lagrangian and Eulerian flow data at time `t`.
///
/// `phi_*` and `a` live on the Lagrangian nodes (the initial grid). The label
/// field is stored as the displacement `Y(t, x) - x`, which vanishes on the
/// wall; `acc` is the Eulerian accumulator `A` with `A_t + u . grad A = div u`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    pub phi_x: Vec<f64>,
    pub phi_y: Vec<f64>,
    pub a: Vec<f64>,
    pub disp_x: ScalarField,
    pub disp_y: ScalarField,
    pub acc: ScalarField,
    pub t: f64,
}

impl FlowState {
    pub fn identity(domain: Domain) -> Self {
        let (xs, ys): (Vec<f64>, Vec<f64>) = (0..domain.len()).map(|p| domain.node(p)).unzip();
        Self {
            phi_x: xs,
            phi_y: ys,
            a: vec![0.0; domain.len()],
            disp_x: ScalarField::zeros(domain, Bc::Dirichlet0),
            disp_y: ScalarField::zeros(domain, Bc::Dirichlet0),
            acc: ScalarField::zeros(domain, Bc::Free),
            t: 0.0,
        }
    }

    pub fn domain(&self) -> &Domain {
        self.acc.domain()
    }

    /// Label `Y(t, x)` at node `p`.
    pub fn label(&self, p: usize) -> (f64, f64) {
        let (x, y) = self.domain().node(p);
        (x + self.disp_x.data()[p], y + self.disp_y.data()[p])
    }

    /// `exp(-a)` on Lagrangian nodes.
    pub fn jacobian_lagrangian(&self) -> ScalarField {
        let data = self.a.iter().map(|a| (-a).exp()).collect();
        ScalarField::new(*self.domain(), Bc::Free, data).expect("flow arrays match the grid")
    }

    /// `exp(-A)` on Eulerian nodes; this is the `J_y` field entering the force.
    pub fn jacobian_eulerian(&self) -> ScalarField {
        self.acc.map(|a| (-a).exp())
    }

    /// `det dY/dx` from fourth-order differences of the label displacement.
    pub fn label_determinant(&self) -> ScalarField {
        let (xx, xy) = (self.disp_x.dx4(), self.disp_x.dy4());
        let (yx, yy) = (self.disp_y.dx4(), self.disp_y.dy4());
        let data = (0..xx.len()).map(|p| (1.0 + xx[p]) * (1.0 + yy[p]) - xy[p] * yx[p]).collect();
        ScalarField::new(*self.domain(), Bc::Free, data).expect("flow arrays match the grid")
    }

    pub fn snapshot(&self, name: &str) -> Result<Snapshot> {
        let d = *self.domain();
        let (lx, ly): (Vec<f64>, Vec<f64>) = (0..d.len()).map(|p| self.label(p)).unzip();
        Snapshot::new(
            name,
            self.t,
            vec![
                ("phi_x".into(), ScalarField::new(d, Bc::Free, self.phi_x.clone())?),
                ("phi_y".into(), ScalarField::new(d, Bc::Free, self.phi_y.clone())?),
                ("y_x".into(), ScalarField::new(d, Bc::Free, lx)?),
                ("y_y".into(), ScalarField::new(d, Bc::Free, ly)?),
                ("j_y".into(), self.jacobian_eulerian()),
            ],
        )
    }
}

fn check_inside(d: &Domain, x: f64, y: f64) -> Result<(f64, f64)> {
    if !(x.is_finite() && y.is_finite()) || !d.contains(x, y, EXIT_TOL) {
        return Err(Error::Geometry(format!("position ({x}, {y}) is outside the domain")));
    }
    Ok((x.clamp(0.0, d.lx), y.clamp(0.0, d.ly)))
}

/// Advance the flow by `dt` from `fs.t`.
///
/// Forward positions and `a` use classical RK4 on the augmented system
/// `(Phi, a)' = (u(Phi), div u(Phi))`. Labels and `A` are transported by one
/// backward midpoint trace per node plus bicubic interpolation.
pub fn step_flow(fs: &FlowState, u: &dyn VelocitySource, dt: f64) -> Result<FlowState> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Parameter(format!("dt must be positive, got {dt}")));
    }
    let d = *fs.domain();
    let t0 = fs.t;
    let th = t0 + 0.5 * dt;
    let t1 = t0 + dt;
    let mut next = fs.clone();
    next.t = t1;

    for p in 0..d.len() {
        let (x, y) = (fs.phi_x[p], fs.phi_y[p]);
        let k1 = u.velocity(t0, x, y);
        let q1 = u.divergence(t0, x, y);
        let (x2, y2) = (x + 0.5 * dt * k1[0], y + 0.5 * dt * k1[1]);
        let k2 = u.velocity(th, x2, y2);
        let q2 = u.divergence(th, x2, y2);
        let (x3, y3) = (x + 0.5 * dt * k2[0], y + 0.5 * dt * k2[1]);
        let k3 = u.velocity(th, x3, y3);
        let q3 = u.divergence(th, x3, y3);
        let (x4, y4) = (x + dt * k3[0], y + dt * k3[1]);
        let k4 = u.velocity(t1, x4, y4);
        let q4 = u.divergence(t1, x4, y4);
        let nx = x + dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
        let ny = y + dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
        let (nx, ny) = check_inside(&d, nx, ny)?;
        next.phi_x[p] = nx;
        next.phi_y[p] = ny;
        next.a[p] = fs.a[p] + dt / 6.0 * (q1 + 2.0 * q2 + 2.0 * q3 + q4);
    }

    for p in 0..d.len() {
        let (x, y) = d.node(p);
        let k1 = u.velocity(t1, x, y);
        let (xh, yh) = check_inside(&d, x - 0.5 * dt * k1[0], y - 0.5 * dt * k1[1])?;
        let k2 = u.velocity(th, xh, yh);
        let (xd, yd) = check_inside(&d, x - dt * k2[0], y - dt * k2[1])?;
        let (xm, ym) = (0.5 * (x + xd), 0.5 * (y + yd));
        let lx = xd + fs.disp_x.interpolate(xd, yd)?;
        let ly = yd + fs.disp_y.interpolate(xd, yd)?;
        next.disp_x.data_mut()[p] = lx - x;
        next.disp_y.data_mut()[p] = ly - y;
        next.acc.data_mut()[p] = fs.acc.interpolate(xd, yd)? + dt * u.divergence(th, xm, ym);
    }
    Ok(next)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCheck {
    pub holds: bool,
    /// `bound - max |log J|`; negative when violated.
    pub margin: f64,
    pub bound: f64,
}

/// Check `exp(-B) <= J_y <= exp(B)` with `B = C_N (t + int ||u||_{H^1}^2)` on
/// both the Lagrangian and Eulerian Jacobians.
pub fn jacobian_bound_check(fs: &FlowState, c_n: f64, h1_integral: f64) -> BoundCheck {
    let bound = c_n * (fs.t + h1_integral);
    let worst = fs.a.iter().chain(fs.acc.data()).fold(0.0f64, |m, v| m.max(v.abs()));
    let margin = bound - worst;
    BoundCheck { holds: margin >= 0.0, margin, bound }
}

/// `v(t, w) = 1 / rho(t, Phi(t; w))` on the Lagrangian grid, capped at `1/floor`.
pub fn specific_volume(rho: &ScalarField, fs: &FlowState, floor: f64) -> Result<ScalarField> {
    if rho.domain() != fs.domain() {
        return Err(Error::Shape("density and flow grids differ".into()));
    }
    let floor = floor.max(f64::MIN_POSITIVE);
    let data = fs
        .phi_x
        .iter()
        .zip(&fs.phi_y)
        .map(|(&x, &y)| {
            let r = rho.interpolate(x, y)?;
            Ok(if r <= floor { 1.0 / floor } else { 1.0 / r })
        })
        .collect::<Result<Vec<f64>>>()?;
    ScalarField::new(*rho.domain(), Bc::Neumann0, data)
}

/// `|psi(t, Y(t, x))|^2` on the Eulerian grid.
pub fn pullback_wave_sq(psi: &ComplexField, fs: &FlowState) -> Result<ScalarField> {
    if psi.domain() != fs.domain() {
        return Err(Error::Shape("wave and flow grids differ".into()));
    }
    let d = *fs.domain();
    let data = (0..d.len())
        .map(|p| {
            let (x, y) = fs.label(p);
            let (x, y) = check_inside(&d, x, y)?;
            let a = psi.re.interpolate(x, y)?;
            let b = psi.im.interpolate(x, y)?;
            Ok(a * a + b * b)
        })
        .collect::<Result<Vec<f64>>>()?;
    ScalarField::new(d, Bc::Neumann0, data)
}
