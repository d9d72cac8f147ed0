//! Fast cosine/sine transforms on the cell-centred grid.
//!
//! Cell centres sit at `x_i = (i + 1/2) h`. Neumann data expand in
//! `cos(k pi x / L)`, `k = 0..n-1` (DCT-II), Dirichlet data in
//! `sin(k pi x / L)`, `k = 1..n` (DST-II). Both families diagonalise the
//! five-point Laplacian with mirror ghosts, and `inverse(forward(f)) == f`.

use std::f64::consts::PI;
use std::sync::Arc;

use rustdct::{DctPlanner, TransformType2And3};

/// Which trigonometric family a field expands in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    /// Cosine modes, homogeneous Neumann data.
    Even,
    /// Sine modes, homogeneous Dirichlet data.
    Odd,
}

impl Parity {
    /// Wavenumber of storage index `m`.
    #[inline]
    pub fn wavenumber(self, m: usize) -> usize {
        match self {
            Parity::Even => m,
            Parity::Odd => m + 1,
        }
    }
}

/// Planned 2D transforms for one grid shape.
#[derive(Clone)]
pub struct Transform2d {
    nx: usize,
    ny: usize,
    plan_x: Arc<dyn TransformType2And3<f64>>,
    plan_y: Arc<dyn TransformType2And3<f64>>,
}

impl std::fmt::Debug for Transform2d {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Transform2d").field("nx", &self.nx).field("ny", &self.ny).finish()
    }
}

impl Transform2d {
    pub fn new(nx: usize, ny: usize) -> Self {
        let mut planner = DctPlanner::new();
        let plan_x = planner.plan_dct2(nx);
        let plan_y = planner.plan_dct2(ny);
        Self { nx, ny, plan_x, plan_y }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    /// Unnormalised type-II transform along both axes (row-major, x fastest).
    pub fn forward(&self, data: &mut [f64], parity: Parity) {
        self.apply(data, parity, true);
    }

    /// Inverse of [`Transform2d::forward`].
    pub fn inverse(&self, data: &mut [f64], parity: Parity) {
        self.apply(data, parity, false);
        let scale = 4.0 / (self.nx as f64 * self.ny as f64);
        for v in data.iter_mut() {
            *v *= scale;
        }
    }

    fn apply(&self, data: &mut [f64], parity: Parity, forward: bool) {
        let (nx, ny) = (self.nx, self.ny);
        assert_eq!(data.len(), nx * ny, "transform buffer has wrong length");
        for row in data.chunks_exact_mut(nx) {
            run(&*self.plan_x, row, parity, forward);
        }
        let mut col = vec![0.0; ny];
        for i in 0..nx {
            for j in 0..ny {
                col[j] = data[j * nx + i];
            }
            run(&*self.plan_y, &mut col, parity, forward);
            for j in 0..ny {
                data[j * nx + i] = col[j];
            }
        }
    }

    /// Forward transform, pointwise multiply by `mult[my * nx + mx]`, inverse.
    pub fn filter(&self, data: &mut [f64], parity: Parity, mult: &[f64]) {
        self.forward(data, parity);
        for (v, m) in data.iter_mut().zip(mult) {
            *v *= m;
        }
        self.inverse(data, parity);
    }
}

fn run(plan: &dyn TransformType2And3<f64>, buf: &mut [f64], parity: Parity, forward: bool) {
    match (parity, forward) {
        (Parity::Even, true) => plan.process_dct2(buf),
        (Parity::Even, false) => plan.process_dct3(buf),
        (Parity::Odd, true) => plan.process_dst2(buf),
        (Parity::Odd, false) => plan.process_dst3(buf),
    }
}

/// Eigenvalues of minus the five-point second difference along one axis.
pub fn five_point_eigenvalues(n: usize, h: f64, parity: Parity) -> Vec<f64> {
    (0..n)
        .map(|m| {
            let k = parity.wavenumber(m) as f64;
            let s = (2.0 / h) * (k * PI / (2.0 * n as f64)).sin();
            s * s
        })
        .collect()
}

/// Continuum eigenvalues `(k pi / L)^2` of the same modes.
pub fn exact_eigenvalues(n: usize, length: f64, parity: Parity) -> Vec<f64> {
    (0..n)
        .map(|m| {
            let k = parity.wavenumber(m) as f64 * PI / length;
            k * k
        })
        .collect()
}

/// Tensor-sum `ex[mx] + ey[my]` laid out like a field.
pub fn tensor_sum(ex: &[f64], ey: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(ex.len() * ey.len());
    for y in ey {
        for x in ex {
            out.push(x + y);
        }
    }
    out
}
