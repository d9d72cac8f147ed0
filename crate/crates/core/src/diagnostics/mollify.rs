use crate::error::{Error, Result};
use crate::fields::{Bc, ScalarField};

/// Mirror index `i` into `0..n`, returning the sign picked up on the way.
fn reflect(i: isize, n: usize, odd: bool) -> (usize, f64) {
    let n2 = 2 * n as isize;
    let m = i.rem_euclid(n2) as usize;
    if m < n {
        (m, 1.0)
    } else {
        (2 * n - 1 - m, if odd { -1.0 } else { 1.0 })
    }
}

/// Convolution with the radial bump `exp(-1 / (1 - |z|^2 / omega^2))`,
/// normalised to unit discrete mass. Values outside the domain come from
/// the field's mirror extension (odd for `Dirichlet0`, even otherwise).
pub fn mollify(f: &ScalarField, omega: f64) -> Result<ScalarField> {
    let d = *f.domain();
    if !(omega > 2.0 * d.hx().max(d.hy())) {
        return Err(Error::Resolution(format!(
            "mollifier radius {omega} must exceed twice the grid spacing {}",
            d.hx().max(d.hy())
        )));
    }
    let (rx, ry) = ((omega / d.hx()).ceil() as isize, (omega / d.hy()).ceil() as isize);
    let mut kernel = Vec::new();
    let mut total = 0.0;
    for b in -ry..=ry {
        for a in -rx..=rx {
            let tau2 = ((a as f64 * d.hx()).powi(2) + (b as f64 * d.hy()).powi(2)) / (omega * omega);
            if tau2 < 1.0 {
                let w = (-1.0 / (1.0 - tau2)).exp();
                total += w;
                kernel.push((a, b, w));
            }
        }
    }
    let odd = f.bc() == Bc::Dirichlet0;
    let mut out = Vec::with_capacity(d.len());
    for j in 0..d.ny as isize {
        for i in 0..d.nx as isize {
            let mut s = 0.0;
            for &(a, b, w) in &kernel {
                let (ii, sx) = reflect(i + a, d.nx, odd);
                let (jj, sy) = reflect(j + b, d.ny, odd);
                s += w * sx * sy * f.at(ii, jj);
            }
            out.push(s / total);
        }
    }
    ScalarField::new(d, f.bc(), out)
}
