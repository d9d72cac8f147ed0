use super::ScalarField;
use crate::error::{Error, Result};

const SNAP: f64 = 1e-11;
const DOMAIN_TOL: f64 = 1e-8;

/// Cubic Lagrange weights for nodes at offsets -1, 0, 1, 2.
fn cubic_weights(s: f64) -> [f64; 4] {
    [
        -s * (s - 1.0) * (s - 2.0) / 6.0,
        (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0,
        -(s + 1.0) * s * (s - 2.0) / 2.0,
        (s + 1.0) * s * (s - 1.0) / 6.0,
    ]
}

/// Grid coordinate `t = x / h - 1/2` split into stencil base and weights.
fn axis(x: f64, h: f64) -> (isize, [f64; 4]) {
    let mut t = x / h - 0.5;
    let r = t.round();
    if (t - r).abs() < SNAP {
        t = r;
    }
    let f = t.floor();
    let s = t - f;
    let w = if s == 0.0 { [0.0, 1.0, 0.0, 0.0] } else { cubic_weights(s) };
    (f as isize - 1, w)
}

pub(super) fn bicubic(f: &ScalarField, x: f64, y: f64) -> Result<f64> {
    let d = f.domain();
    if !d.contains(x, y, DOMAIN_TOL) || !x.is_finite() || !y.is_finite() {
        return Err(Error::OutOfDomain { x, y });
    }
    let (x, y) = (x.clamp(0.0, d.lx), y.clamp(0.0, d.ly));
    let (bx, wx) = axis(x, d.hx());
    let (by, wy) = axis(y, d.hy());
    let mut acc = 0.0;
    for (b, wyb) in wy.iter().enumerate() {
        if *wyb == 0.0 {
            continue;
        }
        let mut row = 0.0;
        for (a, wxa) in wx.iter().enumerate() {
            if *wxa != 0.0 {
                row += wxa * f.ext(bx + a as isize, by + b as isize);
            }
        }
        acc += wyb * row;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use crate::fields::{Bc, ScalarField};
    use crate::geometry::Domain;
    use std::f64::consts::PI;

    #[test]
    fn nodes_are_reproduced_exactly() {
        let d = Domain::new(1.0, 0.5, 10, 8).unwrap();
        let f = ScalarField::from_fn(d, Bc::Free, |x, y| (3.0 * x).exp() * y.cos());
        for (i, j) in [(0, 0), (4, 3), (9, 7)] {
            assert_eq!(f.interpolate(d.x(i), d.y(j)).unwrap(), f.at(i, j));
        }
    }

    #[test]
    fn cubics_are_reproduced_in_the_interior() {
        let d = Domain::unit_square(12).unwrap();
        let p = |x: f64, y: f64| x * x * x - 2.0 * x * y * y + y - 0.3;
        let f = ScalarField::from_fn(d, Bc::Free, p);
        for (x, y) in [(0.31, 0.47), (0.5, 0.5), (0.77, 0.21)] {
            assert!((f.interpolate(x, y).unwrap() - p(x, y)).abs() < 1e-12);
        }
    }

    #[test]
    fn odd_extension_vanishes_on_the_wall() {
        let d = Domain::unit_square(16).unwrap();
        let f = ScalarField::from_fn(d, Bc::Dirichlet0, |x, y| (PI * x).sin() * (PI * y).sin());
        assert!(f.interpolate(0.0, 0.4).unwrap().abs() < 1e-14);
        assert!(f.interpolate(0.4, 1.0).unwrap().abs() < 1e-14);
        let mid = f.interpolate(0.53, 0.41).unwrap();
        assert!((mid - (PI * 0.53).sin() * (PI * 0.41).sin()).abs() < 1e-4);
    }

    #[test]
    fn outside_points_are_rejected() {
        let f = ScalarField::zeros(Domain::unit_square(8).unwrap(), Bc::Neumann0);
        assert!(f.interpolate(1.0 + 1e-9, 0.5).is_ok());
        assert!(f.interpolate(-1e-6, 0.5).is_err());
        assert!(f.interpolate(f64::NAN, 0.5).is_err());
    }
}
