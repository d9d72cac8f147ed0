//! Rectangular domain, cell-centred grid, and the Dirichlet sine eigenbasis.

use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{Bc, VectorField3};

/// Rectangle `[0, lx] x [0, ly]` covered by `nx * ny` cells.
///
/// Unknowns sit at cell centres `((i + 1/2) hx, (j + 1/2) hy)`; flat storage
/// is row-major with `x` fastest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub lx: f64,
    pub ly: f64,
    pub nx: usize,
    pub ny: usize,
}

impl Domain {
    pub const MIN_CELLS: usize = 8;

    pub fn new(lx: f64, ly: f64, nx: usize, ny: usize) -> Result<Self> {
        let d = Self { lx, ly, nx, ny };
        d.validate()?;
        Ok(d)
    }

    pub fn unit_square(n: usize) -> Result<Self> {
        Self::new(1.0, 1.0, n, n)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lx > 0.0 && self.ly > 0.0 && self.lx.is_finite() && self.ly.is_finite()) {
            return Err(Error::Parameter(format!("side lengths must be positive, got {} x {}", self.lx, self.ly)));
        }
        if self.nx < Self::MIN_CELLS || self.ny < Self::MIN_CELLS {
            return Err(Error::Parameter(format!(
                "grid must have at least {} cells per axis, got {} x {}",
                Self::MIN_CELLS,
                self.nx,
                self.ny
            )));
        }
        Ok(())
    }

    /// Same rectangle, resolution multiplied by `factor`.
    pub fn refined(&self, factor: usize) -> Self {
        Self { nx: self.nx * factor, ny: self.ny * factor, ..*self }
    }

    #[inline]
    pub fn hx(&self) -> f64 {
        self.lx / self.nx as f64
    }
    #[inline]
    pub fn hy(&self) -> f64 {
        self.ly / self.ny as f64
    }
    #[inline]
    pub fn cell_area(&self) -> f64 {
        self.hx() * self.hy()
    }
    #[inline]
    pub fn area(&self) -> f64 {
        self.lx * self.ly
    }
    #[inline]
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }
    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.hx()
    }
    #[inline]
    pub fn y(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.hy()
    }
    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }
    /// Coordinates of flat node `p`.
    #[inline]
    pub fn node(&self, p: usize) -> (f64, f64) {
        (self.x(p % self.nx), self.y(p / self.nx))
    }

    /// Minimum grid spacing.
    pub fn h_min(&self) -> f64 {
        self.hx().min(self.hy())
    }

    pub fn contains(&self, x: f64, y: f64, tol: f64) -> bool {
        x >= -tol && x <= self.lx + tol && y >= -tol && y <= self.ly + tol
    }

    /// Largest number of sine modes that are exactly orthonormal on this grid.
    pub fn mode_capacity(&self) -> usize {
        (self.nx - 1) * (self.ny - 1)
    }
}

/// One Dirichlet eigenpair `sin(k pi x / lx) sin(l pi y / ly)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    pub k: usize,
    pub l: usize,
    pub eigenvalue: f64,
}

/// First `n` normalised Dirichlet eigenfunctions with their nodal values
/// and analytic gradients cached on the grid.
#[derive(Debug, Clone)]
pub struct SineBasis {
    domain: Domain,
    modes: Vec<Mode>,
    norm: f64,
    values: Vec<Vec<f64>>,
    grad_x: Vec<Vec<f64>>,
    grad_y: Vec<Vec<f64>>,
}

/// Momentum coefficients `u_j(t)`, one triple per basis function.
#[derive(Debug, Clone, PartialEq)]
pub struct GalerkinState {
    pub coeffs: Vec<[f64; 3]>,
    pub t: f64,
}

impl GalerkinState {
    pub fn zeros(n: usize) -> Self {
        Self { coeffs: vec![[0.0; 3]; n], t: 0.0 }
    }

    pub fn n(&self) -> usize {
        self.coeffs.len()
    }

    /// `(sum_j |u_j|^2)^{1/2}`, the L2 norm of the synthesised field.
    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().flat_map(|c| c.iter()).map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Leading `n` coefficients, i.e. the projection onto a smaller span.
    pub fn truncated(&self, n: usize) -> Self {
        Self { coeffs: self.coeffs[..n.min(self.n())].to_vec(), t: self.t }
    }
}

fn mode_order(a: &Mode, b: &Mode) -> std::cmp::Ordering {
    let scale = a.eigenvalue.abs().max(b.eigenvalue.abs());
    if (a.eigenvalue - b.eigenvalue).abs() <= 1e-12 * scale {
        (a.k, a.l).cmp(&(b.k, b.l))
    } else {
        a.eigenvalue.total_cmp(&b.eigenvalue)
    }
}

/// First `n` eigenpairs in ascending eigenvalue order, ties broken on `(k, l)`.
pub fn build_basis(domain: Domain, n: usize) -> Result<SineBasis> {
    domain.validate()?;
    if n == 0 {
        return Err(Error::Precondition("basis size must be at least 1".into()));
    }
    let cap = domain.mode_capacity();
    if n > cap {
        return Err(Error::Capacity { requested: n, available: cap });
    }
    let (lx, ly) = (domain.lx, domain.ly);
    let mut all: Vec<Mode> = Vec::with_capacity(cap);
    for l in 1..domain.ny {
        for k in 1..domain.nx {
            let eigenvalue = PI * PI * ((k * k) as f64 / (lx * lx) + (l * l) as f64 / (ly * ly));
            all.push(Mode { k, l, eigenvalue });
        }
    }
    all.sort_by(mode_order);
    all.truncate(n);

    let norm = 2.0 / (lx * ly).sqrt();
    let np = domain.len();
    let mut values = Vec::with_capacity(n);
    let mut grad_x = Vec::with_capacity(n);
    let mut grad_y = Vec::with_capacity(n);
    for m in &all {
        let (kx, ky) = (m.k as f64 * PI / lx, m.l as f64 * PI / ly);
        let sx: Vec<f64> = (0..domain.nx).map(|i| (kx * domain.x(i)).sin()).collect();
        let cx: Vec<f64> = (0..domain.nx).map(|i| (kx * domain.x(i)).cos()).collect();
        let sy: Vec<f64> = (0..domain.ny).map(|j| (ky * domain.y(j)).sin()).collect();
        let cy: Vec<f64> = (0..domain.ny).map(|j| (ky * domain.y(j)).cos()).collect();
        let mut v = Vec::with_capacity(np);
        let mut gx = Vec::with_capacity(np);
        let mut gy = Vec::with_capacity(np);
        for j in 0..domain.ny {
            for i in 0..domain.nx {
                v.push(norm * sx[i] * sy[j]);
                gx.push(norm * kx * cx[i] * sy[j]);
                gy.push(norm * ky * sx[i] * cy[j]);
            }
        }
        values.push(v);
        grad_x.push(gx);
        grad_y.push(gy);
    }
    Ok(SineBasis { domain, modes: all, norm, values, grad_x, grad_y })
}

impl SineBasis {
    pub fn domain(&self) -> &Domain {
        &self.domain
    }
    pub fn len(&self) -> usize {
        self.modes.len()
    }
    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }
    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }
    pub fn normalization(&self) -> f64 {
        self.norm
    }
    /// Nodal values of `eta_j`.
    pub fn values(&self, j: usize) -> &[f64] {
        &self.values[j]
    }
    pub fn grad_x(&self, j: usize) -> &[f64] {
        &self.grad_x[j]
    }
    pub fn grad_y(&self, j: usize) -> &[f64] {
        &self.grad_y[j]
    }

    fn wavenumbers(&self, j: usize) -> (f64, f64) {
        let m = self.modes[j];
        (m.k as f64 * PI / self.domain.lx, m.l as f64 * PI / self.domain.ly)
    }

    /// `eta_j(x, y)` at an arbitrary point.
    pub fn eval(&self, j: usize, x: f64, y: f64) -> f64 {
        let (kx, ky) = self.wavenumbers(j);
        self.norm * (kx * x).sin() * (ky * y).sin()
    }

    /// `grad eta_j(x, y)` at an arbitrary point.
    pub fn grad(&self, j: usize, x: f64, y: f64) -> [f64; 2] {
        let (kx, ky) = self.wavenumbers(j);
        let (sx, cx) = (kx * x).sin_cos();
        let (sy, cy) = (ky * y).sin_cos();
        [self.norm * kx * cx * sy, self.norm * ky * sx * cy]
    }

    /// Closed-form `||grad eta_j||_inf`: the bilinear form in `cos^2` peaks at
    /// a corner, giving `norm * max(kx, ky)`.
    pub fn grad_sup_analytic(&self, j: usize) -> f64 {
        let (kx, ky) = self.wavenumbers(j);
        self.norm * kx.max(ky)
    }

    /// `max |grad eta_j|` sampled on a vertex grid `refine` times finer than the
    /// cell grid, boundary lines included.
    pub fn grad_sup_sampled(&self, j: usize, refine: usize) -> f64 {
        let refine = refine.max(1);
        let (mx, my) = (self.domain.nx * refine, self.domain.ny * refine);
        let mut best = 0.0f64;
        for b in 0..=my {
            let y = self.domain.ly * b as f64 / my as f64;
            for a in 0..=mx {
                let x = self.domain.lx * a as f64 / mx as f64;
                let g = self.grad(j, x, y);
                best = best.max(g[0].hypot(g[1]));
            }
        }
        best
    }

    /// Grid field `sum_j c_j eta_j` (all three components).
    pub fn synthesize(&self, state: &GalerkinState) -> VectorField3 {
        let mut out = VectorField3::zeros(self.domain, Bc::Dirichlet0);
        for (j, c) in state.coeffs.iter().enumerate().take(self.len()) {
            let eta = &self.values[j];
            for (comp, field) in out.comps.iter_mut().enumerate() {
                if c[comp] == 0.0 {
                    continue;
                }
                for (v, e) in field.data_mut().iter_mut().zip(eta) {
                    *v += c[comp] * e;
                }
            }
        }
        out
    }

    /// Nodal gradient of the synthesised field: `out[comp] = (d_x u_comp, d_y u_comp)`.
    pub fn synthesize_gradient(&self, state: &GalerkinState) -> [[Vec<f64>; 2]; 3] {
        let np = self.domain.len();
        let mut out: [[Vec<f64>; 2]; 3] = Default::default();
        for comp in out.iter_mut() {
            comp[0] = vec![0.0; np];
            comp[1] = vec![0.0; np];
        }
        for (j, c) in state.coeffs.iter().enumerate().take(self.len()) {
            for (comp, g) in out.iter_mut().enumerate() {
                if c[comp] == 0.0 {
                    continue;
                }
                for (p, (gx, gy)) in self.grad_x[j].iter().zip(&self.grad_y[j]).enumerate() {
                    g[0][p] += c[comp] * gx;
                    g[1][p] += c[comp] * gy;
                }
            }
        }
        out
    }

    /// CSV table with columns `j,k,l,eigenvalue,grad_sup`.
    pub fn summary_csv(&self, refine: usize) -> String {
        let mut s = String::from("j,k,l,eigenvalue,grad_sup\n");
        for (j, m) in self.modes.iter().enumerate() {
            let g = self.grad_sup_sampled(j, refine).max(self.grad_sup_analytic(j));
            let _ = writeln!(s, "{},{},{},{:.17e},{:.17e}", j + 1, m.k, m.l, m.eigenvalue, g);
        }
        s
    }
}

/// Coefficients `<u_c, eta_j>`, `j < n`, by the grid inner product.
pub fn project_velocity(u: &VectorField3, basis: &SineBasis, n: usize) -> Result<GalerkinState> {
    if u.domain() != basis.domain() {
        return Err(Error::Shape("velocity and basis live on different grids".into()));
    }
    for c in &u.comps {
        if c.bc() != Bc::Dirichlet0 {
            return Err(Error::BoundaryTag { expected: Bc::Dirichlet0.name(), found: c.bc().name() });
        }
    }
    if n > basis.len() {
        return Err(Error::Capacity { requested: n, available: basis.len() });
    }
    let da = basis.domain().cell_area();
    let coeffs = (0..n)
        .map(|j| {
            let eta = basis.values(j);
            let mut c = [0.0; 3];
            for (comp, f) in u.comps.iter().enumerate() {
                c[comp] = f.data().iter().zip(eta).map(|(a, b)| a * b).sum::<f64>() * da;
            }
            c
        })
        .collect();
    Ok(GalerkinState { coeffs, t: 0.0 })
}

/// `C_N = N max_{j <= N} ||grad eta_j||_inf`.
pub fn grad_sup_constant(basis: &SineBasis, n: usize, refine: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Precondition("C_N needs N >= 1".into()));
    }
    if n > basis.len() {
        return Err(Error::Capacity { requested: n, available: basis.len() });
    }
    let sup = (0..n)
        .map(|j| basis.grad_sup_sampled(j, refine).max(basis.grad_sup_analytic(j)))
        .fold(0.0, f64::max);
    Ok(n as f64 * sup)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_mode_of_unit_square() {
        let b = build_basis(Domain::unit_square(16).unwrap(), 1).unwrap();
        let m = b.modes()[0];
        assert_eq!((m.k, m.l), (1, 1));
        assert!((m.eigenvalue - 2.0 * PI * PI).abs() < 1e-12);
        assert!((b.eval(0, 0.5, 0.5) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn ties_are_lexicographic() {
        let b = build_basis(Domain::unit_square(16).unwrap(), 3).unwrap();
        let kl: Vec<_> = b.modes().iter().map(|m| (m.k, m.l)).collect();
        assert_eq!(kl, vec![(1, 1), (1, 2), (2, 1)]);
        assert!((b.modes()[1].eigenvalue - 5.0 * PI * PI).abs() < 1e-11);
        assert!((b.modes()[2].eigenvalue - 5.0 * PI * PI).abs() < 1e-11);
    }

    #[test]
    fn elongated_rectangle_orders_by_eigenvalue() {
        let b = build_basis(Domain::new(2.0, 1.0, 16, 16).unwrap(), 2).unwrap();
        let kl: Vec<_> = b.modes().iter().map(|m| (m.k, m.l)).collect();
        assert_eq!(kl, vec![(1, 1), (2, 1)]);
    }

    #[test]
    fn capacity_is_enforced() {
        let d = Domain::unit_square(8).unwrap();
        assert!(matches!(build_basis(d, 50), Err(Error::Capacity { .. })));
        assert!(build_basis(d, 49).is_ok());
        assert!(matches!(build_basis(d, 0), Err(Error::Precondition(_))));
    }

    #[test]
    fn c1_on_unit_square_is_two_pi() {
        let b = build_basis(Domain::unit_square(16).unwrap(), 2).unwrap();
        let c1 = grad_sup_constant(&b, 1, 4).unwrap();
        assert!((c1 - 2.0 * PI).abs() < 1e-12);
        // eta_{1,2} has |grad| up to 2 * 2 pi, so C_2 = 2 * 4 pi
        let c2 = grad_sup_constant(&b, 2, 4).unwrap();
        assert!((c2 - 8.0 * PI).abs() < 1e-12);
        assert!(grad_sup_constant(&b, 0, 4).is_err());
    }

    #[test]
    fn sampled_sup_never_exceeds_closed_form() {
        let b = build_basis(Domain::new(1.3, 0.7, 12, 10).unwrap(), 10).unwrap();
        for j in 0..b.len() {
            let s = b.grad_sup_sampled(j, 4);
            let a = b.grad_sup_analytic(j);
            assert!(s <= a * (1.0 + 1e-12));
            assert!(s >= 0.98 * a);
        }
    }

    #[test]
    fn zero_velocity_projects_to_zero() {
        let d = Domain::unit_square(16).unwrap();
        let b = build_basis(d, 5).unwrap();
        let u = VectorField3::zeros(d, Bc::Dirichlet0);
        let g = project_velocity(&u, &b, 5).unwrap();
        assert!(g.coeffs.iter().all(|c| c == &[0.0; 3]));
    }

    #[test]
    fn projection_rejects_neumann_tags() {
        let d = Domain::unit_square(16).unwrap();
        let b = build_basis(d, 2).unwrap();
        let u = VectorField3::zeros(d, Bc::Neumann0);
        assert!(matches!(project_velocity(&u, &b, 1), Err(Error::BoundaryTag { .. })));
    }

    #[test]
    fn summary_has_header_and_rows() {
        let b = build_basis(Domain::unit_square(8).unwrap(), 3).unwrap();
        let csv = b.summary_csv(2);
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "j,k,l,eigenvalue,grad_sup");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("1,1,1,"));
    }
}
