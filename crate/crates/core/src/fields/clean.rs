use std::f64::consts::PI;

use super::{Bc, ScalarField, VectorField3};
use crate::error::{Error, Result};
use crate::spectral::{Parity, Transform2d};

/// Remove the gradient part of the planar components of `h`.
///
/// Uses the centred divergence `D` (odd ghosts) and centred gradient `G`
/// (even ghosts). `D G` is diagonal on cosine modes with symbol
/// `-(sin(k pi / nx)^2 / hx^2 + sin(l pi / ny)^2 / hy^2)`, so the returned
/// field satisfies `D h = 0` to roundoff, and the map is an orthogonal,
/// idempotent projection for the grid inner product. The third component is
/// untouched.
pub fn helmholtz_clean(h: &VectorField3) -> Result<VectorField3> {
    for c in &h.comps[..2] {
        if c.bc() != Bc::Dirichlet0 {
            return Err(Error::BoundaryTag { expected: Bc::Dirichlet0.name(), found: c.bc().name() });
        }
    }
    let d = *h.domain();
    let (nx, ny) = (d.nx, d.ny);
    let sx: Vec<f64> = (0..nx).map(|k| (k as f64 * PI / nx as f64).sin() / d.hx()).collect();
    let sy: Vec<f64> = (0..ny).map(|l| (l as f64 * PI / ny as f64).sin() / d.hy()).collect();

    let mut rhs = h.divergence();
    let tr = Transform2d::new(nx, ny);
    tr.forward(&mut rhs, Parity::Even);
    for l in 0..ny {
        for k in 0..nx {
            let sym = sx[k] * sx[k] + sy[l] * sy[l];
            let p = l * nx + k;
            rhs[p] = if sym > 0.0 { -rhs[p] / sym } else { 0.0 };
        }
    }
    tr.inverse(&mut rhs, Parity::Even);
    let phi = ScalarField::new(d, Bc::Neumann0, rhs)?;

    let mut out = h.clone();
    for (v, g) in out.comps[0].data_mut().iter_mut().zip(phi.dx()) {
        *v -= g;
    }
    for (v, g) in out.comps[1].data_mut().iter_mut().zip(phi.dy()) {
        *v -= g;
    }
    Ok(out)
}
