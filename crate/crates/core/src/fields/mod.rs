//! Grid fields with boundary tags, quadrature, norms and finite differences.

mod clean;
mod interp;
pub mod snapshot;

pub use clean::helmholtz_clean;
pub use snapshot::Snapshot;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Domain;
use crate::spectral::Parity;

/// Boundary treatment attached to every field.
///
/// Ghost values are mirror images across the wall: odd for `Dirichlet0`,
/// even for `Neumann0`. `Free` fields carry no condition and are extended by
/// quadratic extrapolation, which turns centred differences into one-sided
/// second-order ones at the edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Bc {
    Dirichlet0,
    Neumann0,
    Free,
}

impl Bc {
    pub fn name(self) -> &'static str {
        match self {
            Bc::Dirichlet0 => "dirichlet0",
            Bc::Neumann0 => "neumann0",
            Bc::Free => "free",
        }
    }

    pub fn parity(self) -> Option<Parity> {
        match self {
            Bc::Dirichlet0 => Some(Parity::Odd),
            Bc::Neumann0 => Some(Parity::Even),
            Bc::Free => None,
        }
    }
}

/// Up to three `(index, weight)` pairs expressing an extended node through
/// interior ones along one axis.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Taps {
    idx: [usize; 3],
    w: [f64; 3],
    len: usize,
}

impl Taps {
    fn one(i: usize, w: f64) -> Self {
        Self { idx: [i, 0, 0], w: [w, 0.0, 0.0], len: 1 }
    }

    fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        (0..self.len).map(move |t| (self.idx[t], self.w[t]))
    }
}

/// Resolve index `i` (possibly outside `0..n`) along one axis.
pub(crate) fn axis_taps(i: isize, n: usize, bc: Bc) -> Taps {
    let ni = n as isize;
    if (0..ni).contains(&i) {
        return Taps::one(i as usize, 1.0);
    }
    match bc {
        Bc::Dirichlet0 | Bc::Neumann0 => {
            let sign = if bc == Bc::Dirichlet0 { -1.0 } else { 1.0 };
            let m = if i < 0 { -1 - i } else { 2 * ni - 1 - i };
            // deeper ghosts never occur with the four-point stencils used here
            Taps::one(m.clamp(0, ni - 1) as usize, sign)
        }
        Bc::Free => {
            // quadratic through the three nearest interior nodes
            let (base, s, d) = if i < 0 { (0usize, 1isize, -i) } else { (n - 1, -1isize, i - ni + 1) };
            let d = d as f64;
            let w = [(1.0 + d) * (2.0 + d) / 2.0, -d * (2.0 + d), d * (1.0 + d) / 2.0];
            let at = |o: isize| (base as isize + s * o) as usize;
            Taps { idx: [at(0), at(1), at(2)], w, len: 3 }
        }
    }
}

/// Scalar grid field on cell centres.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    domain: Domain,
    bc: Bc,
    data: Vec<f64>,
}

impl ScalarField {
    pub fn new(domain: Domain, bc: Bc, data: Vec<f64>) -> Result<Self> {
        if data.len() != domain.len() {
            return Err(Error::Shape(format!("expected {} values, got {}", domain.len(), data.len())));
        }
        Ok(Self { domain, bc, data })
    }

    pub fn zeros(domain: Domain, bc: Bc) -> Self {
        Self::constant(domain, bc, 0.0)
    }

    pub fn constant(domain: Domain, bc: Bc, v: f64) -> Self {
        Self { domain, bc, data: vec![v; domain.len()] }
    }

    pub fn from_fn(domain: Domain, bc: Bc, f: impl Fn(f64, f64) -> f64) -> Self {
        let data = (0..domain.len()).map(|p| {
            let (x, y) = domain.node(p);
            f(x, y)
        });
        Self { domain, bc, data: data.collect() }
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }
    pub fn bc(&self) -> Bc {
        self.bc
    }
    pub fn data(&self) -> &[f64] {
        &self.data
    }
    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }
    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn with_bc(mut self, bc: Bc) -> Self {
        self.bc = bc;
        self
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { domain: self.domain, bc: self.bc, data: self.data.iter().map(|&v| f(v)).collect() }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[self.domain.idx(i, j)]
    }

    /// Value at a possibly out-of-range index, built from the ghost rules.
    pub fn ext(&self, i: isize, j: isize) -> f64 {
        let (nx, ny) = (self.domain.nx, self.domain.ny);
        if i >= 0 && j >= 0 && (i as usize) < nx && (j as usize) < ny {
            return self.data[j as usize * nx + i as usize];
        }
        let tx = axis_taps(i, nx, self.bc);
        let ty = axis_taps(j, ny, self.bc);
        let mut s = 0.0;
        for (jj, wy) in ty.iter() {
            for (ii, wx) in tx.iter() {
                s += wx * wy * self.data[jj * nx + ii];
            }
        }
        s
    }

    pub fn min(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }
    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    fn stencil_map(&self, f: impl Fn(isize, isize) -> f64) -> Vec<f64> {
        let (nx, ny) = (self.domain.nx, self.domain.ny);
        let mut out = Vec::with_capacity(nx * ny);
        for j in 0..ny as isize {
            for i in 0..nx as isize {
                out.push(f(i, j));
            }
        }
        out
    }

    /// Centred `d/dx` with ghosts.
    pub fn dx(&self) -> Vec<f64> {
        let c = 0.5 / self.domain.hx();
        self.stencil_map(|i, j| c * (self.ext(i + 1, j) - self.ext(i - 1, j)))
    }

    /// Centred `d/dy` with ghosts.
    pub fn dy(&self) -> Vec<f64> {
        let c = 0.5 / self.domain.hy();
        self.stencil_map(|i, j| c * (self.ext(i, j + 1) - self.ext(i, j - 1)))
    }

    /// Fourth-order `d/dx` from interior values only; one-sided near the walls.
    pub fn dx4(&self) -> Vec<f64> {
        let (nx, h) = (self.domain.nx, self.domain.hx());
        self.stencil_map(|i, j| diff4(|k| self.at(k, j as usize), i as usize, nx, h))
    }

    /// Fourth-order `d/dy`, see [`ScalarField::dx4`].
    pub fn dy4(&self) -> Vec<f64> {
        let (ny, h) = (self.domain.ny, self.domain.hy());
        self.stencil_map(|i, j| diff4(|k| self.at(i as usize, k), j as usize, ny, h))
    }

    pub fn dxx(&self) -> Vec<f64> {
        let c = 1.0 / (self.domain.hx() * self.domain.hx());
        self.stencil_map(|i, j| c * (self.ext(i + 1, j) - 2.0 * self.ext(i, j) + self.ext(i - 1, j)))
    }

    pub fn dyy(&self) -> Vec<f64> {
        let c = 1.0 / (self.domain.hy() * self.domain.hy());
        self.stencil_map(|i, j| c * (self.ext(i, j + 1) - 2.0 * self.ext(i, j) + self.ext(i, j - 1)))
    }

    pub fn dxy(&self) -> Vec<f64> {
        let c = 0.25 / (self.domain.hx() * self.domain.hy());
        self.stencil_map(|i, j| {
            c * (self.ext(i + 1, j + 1) - self.ext(i + 1, j - 1) - self.ext(i - 1, j + 1)
                + self.ext(i - 1, j - 1))
        })
    }

    /// Five-point Laplacian with ghosts.
    pub fn laplacian(&self) -> Vec<f64> {
        self.dxx().iter().zip(self.dyy()).map(|(a, b)| a + b).collect()
    }

    /// `int_Omega f`; see [`integrate`].
    pub fn integrate(&self) -> f64 {
        integrate(self)
    }

    /// Bicubic value at an arbitrary point of the closed rectangle.
    pub fn interpolate(&self, x: f64, y: f64) -> Result<f64> {
        interp::bicubic(self, x, y)
    }
}

/// Midpoint-rule `int_Omega f g`.
pub fn inner(a: &[f64], b: &[f64], domain: &Domain) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() * domain.cell_area()
}

/// Midpoint-rule integral of raw nodal values.
pub fn sum_integral(a: &[f64], domain: &Domain) -> f64 {
    a.iter().sum::<f64>() * domain.cell_area()
}

/// 1D weights integrating every grid sine mode `sin(k pi x / L)`, `k <= n`, exactly.
pub fn dirichlet_weights(n: usize, len: f64) -> Vec<f64> {
    let nf = n as f64;
    // integral of sin(k pi x / L) over [0, L]
    let mass = |k: usize| -> f64 {
        if k % 2 == 1 {
            2.0 * len / (k as f64 * PI)
        } else {
            0.0
        }
    };
    (0..n)
        .map(|i| {
            let theta = PI * (i as f64 + 0.5) / nf;
            let body: f64 = (1..n).map(|k| (2.0 / nf) * (k as f64 * theta).sin() * mass(k)).sum();
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            body + sign * mass(n) / nf
        })
        .collect()
}

/// `int_Omega f`.
///
/// Fields vanishing on the wall are integrated through their sine series,
/// which is exact on every representable mode; other tags use the midpoint
/// rule, exact on cosine modes.
pub fn integrate(f: &ScalarField) -> f64 {
    let d = f.domain();
    match f.bc() {
        Bc::Dirichlet0 => {
            let wx = dirichlet_weights(d.nx, d.lx);
            let wy = dirichlet_weights(d.ny, d.ly);
            f.data()
                .chunks_exact(d.nx)
                .zip(&wy)
                .map(|(row, w)| w * row.iter().zip(&wx).map(|(v, u)| v * u).sum::<f64>())
                .sum()
        }
        Bc::Neumann0 | Bc::Free => sum_integral(f.data(), d),
    }
}

/// Discrete `L^p` norm; `p = f64::INFINITY` gives the max norm.
pub fn lp_norm(f: &ScalarField, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::Precondition(format!("L^p norm needs p >= 1, got {p}")));
    }
    if p.is_infinite() {
        return Ok(f.max_abs());
    }
    let s: f64 = f.data().iter().map(|v| v.abs().powf(p)).sum::<f64>() * f.domain().cell_area();
    Ok(s.powf(1.0 / p))
}

/// `||grad f||_{L^2}` with centred differences.
pub fn h1_seminorm(f: &ScalarField) -> f64 {
    let (gx, gy) = (f.dx(), f.dy());
    let s: f64 = gx.iter().zip(&gy).map(|(a, b)| a * a + b * b).sum();
    (s * f.domain().cell_area()).sqrt()
}

/// Three-component vector field such as velocity or magnetic field.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField3 {
    pub comps: [ScalarField; 3],
}

impl VectorField3 {
    pub fn zeros(domain: Domain, bc: Bc) -> Self {
        let z = ScalarField::zeros(domain, bc);
        Self { comps: [z.clone(), z.clone(), z] }
    }

    pub fn from_components(comps: [ScalarField; 3]) -> Result<Self> {
        let d = *comps[0].domain();
        if comps.iter().any(|c| *c.domain() != d) {
            return Err(Error::Shape("vector components on different grids".into()));
        }
        Ok(Self { comps })
    }

    pub fn from_fn(domain: Domain, bc: Bc, f: impl Fn(f64, f64) -> [f64; 3]) -> Self {
        let mut out = Self::zeros(domain, bc);
        for p in 0..domain.len() {
            let (x, y) = domain.node(p);
            let v = f(x, y);
            for c in 0..3 {
                out.comps[c].data_mut()[p] = v[c];
            }
        }
        out
    }

    pub fn domain(&self) -> &Domain {
        self.comps[0].domain()
    }

    /// Pointwise Euclidean length.
    pub fn magnitude(&self) -> Vec<f64> {
        let [a, b, c] = &self.comps;
        a.data()
            .iter()
            .zip(b.data())
            .zip(c.data())
            .map(|((x, y), z)| (x * x + y * y + z * z).sqrt())
            .collect()
    }

    pub fn max_norm(&self) -> f64 {
        self.magnitude().into_iter().fold(0.0, f64::max)
    }

    /// Pointwise `|v|^2`.
    pub fn magnitude_sq(&self) -> Vec<f64> {
        self.magnitude().into_iter().map(|m| m * m).collect()
    }

    /// `d_x v_1 + d_y v_2` by centred differences.
    pub fn divergence(&self) -> Vec<f64> {
        self.comps[0].dx().iter().zip(self.comps[1].dy()).map(|(a, b)| a + b).collect()
    }

    /// Curl of a field independent of `z`: `(d_y v3, -d_x v3, d_x v2 - d_y v1)`.
    pub fn curl(&self) -> [Vec<f64>; 3] {
        let [v1, v2, v3] = &self.comps;
        let c1 = v3.dy();
        let c2: Vec<f64> = v3.dx().into_iter().map(|v| -v).collect();
        let c3: Vec<f64> = v2.dx().iter().zip(v1.dy()).map(|(a, b)| a - b).collect();
        [c1, c2, c3]
    }

    /// `int |v|^2`.
    pub fn l2_norm_sq(&self) -> f64 {
        self.comps.iter().map(|c| inner(c.data(), c.data(), c.domain())).sum()
    }
}

/// Complex scalar field stored as two real parts sharing one tag.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    pub re: ScalarField,
    pub im: ScalarField,
}

impl ComplexField {
    pub fn zeros(domain: Domain, bc: Bc) -> Self {
        Self { re: ScalarField::zeros(domain, bc), im: ScalarField::zeros(domain, bc) }
    }

    pub fn new(re: ScalarField, im: ScalarField) -> Result<Self> {
        if re.domain() != im.domain() || re.bc() != im.bc() {
            return Err(Error::Shape("real and imaginary parts disagree".into()));
        }
        Ok(Self { re, im })
    }

    pub fn from_fn(domain: Domain, bc: Bc, f: impl Fn(f64, f64) -> (f64, f64)) -> Self {
        let mut out = Self::zeros(domain, bc);
        for p in 0..domain.len() {
            let (x, y) = domain.node(p);
            let (a, b) = f(x, y);
            out.re.data_mut()[p] = a;
            out.im.data_mut()[p] = b;
        }
        out
    }

    pub fn domain(&self) -> &Domain {
        self.re.domain()
    }

    pub fn bc(&self) -> Bc {
        self.re.bc()
    }

    /// `|psi|^2`, which is even across the wall whatever the tag of `psi`.
    pub fn modulus_sq(&self) -> ScalarField {
        let data = self.re.data().iter().zip(self.im.data()).map(|(a, b)| a * a + b * b).collect();
        ScalarField { domain: *self.domain(), bc: Bc::Neumann0, data }
    }

    /// `int |psi|^2`.
    pub fn norm_sq(&self) -> f64 {
        sum_integral(self.modulus_sq().data(), self.domain())
    }

    /// Multiply node `p` by `exp(i theta_p)`.
    pub fn rotate(&mut self, theta: &[f64]) {
        let (re, im) = (self.re.data_mut(), self.im.data_mut());
        for ((a, b), t) in re.iter_mut().zip(im.iter_mut()).zip(theta) {
            let (s, c) = t.sin_cos();
            let (x, y) = (*a, *b);
            *a = c * x - s * y;
            *b = s * x + c * y;
        }
    }
}

/// Fourth-order first difference of `f` at `i` on `n >= 5` samples.
fn diff4(f: impl Fn(usize) -> f64, i: usize, n: usize, h: f64) -> f64 {
    const EDGE: [f64; 5] = [-25.0, 48.0, -36.0, 16.0, -3.0];
    const NEAR: [f64; 5] = [-3.0, -10.0, 18.0, -6.0, 1.0];
    let c = 1.0 / (12.0 * h);
    let fwd = |w: &[f64; 5], s: usize| w.iter().enumerate().map(|(k, w)| w * f(s + k)).sum::<f64>();
    let bwd = |w: &[f64; 5], s: usize| -w.iter().enumerate().map(|(k, w)| w * f(s - k)).sum::<f64>();
    match i {
        0 => c * fwd(&EDGE, 0),
        1 => c * fwd(&NEAR, 0),
        _ if i == n - 1 => c * bwd(&EDGE, n - 1),
        _ if i == n - 2 => c * bwd(&NEAR, n - 1),
        _ => c * (f(i - 2) - 8.0 * f(i - 1) + 8.0 * f(i + 1) - f(i + 2)),
    }
}
