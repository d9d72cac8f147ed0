use crate::error::{Error, Result};
use crate::fields::{ScalarField, VectorField3};
use crate::galerkin::PhysParams;

/// Density and velocity at one recorded time.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeFrame {
    pub t: f64,
    pub rho: ScalarField,
    pub u: VectorField3,
}

/// Space-time test function with its partial derivatives.
pub trait TestFunction {
    fn value(&self, t: f64, x: f64, y: f64) -> f64;
    fn dt(&self, t: f64, x: f64, y: f64) -> f64;
    fn grad(&self, t: f64, x: f64, y: f64) -> [f64; 2];
}

/// `b(t) * c(|x - x0| / radius)` with `b` a bump on `(t0, t1)` and `c` the
/// compactly supported polynomial `(1 - s^2)^4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpTest {
    pub t0: f64,
    pub t1: f64,
    pub cx: f64,
    pub cy: f64,
    pub radius: f64,
}

impl BumpTest {
    fn time(&self, t: f64) -> (f64, f64) {
        let (c, w) = (0.5 * (self.t0 + self.t1), 0.5 * (self.t1 - self.t0));
        let s = (t - c) / w;
        if s.abs() >= 1.0 {
            return (0.0, 0.0);
        }
        let q = 1.0 - s * s;
        (q.powi(4), 4.0 * q.powi(3) * (-2.0 * s) / w)
    }

    fn space(&self, x: f64, y: f64) -> (f64, [f64; 2]) {
        let (dx, dy) = ((x - self.cx) / self.radius, (y - self.cy) / self.radius);
        let s2 = dx * dx + dy * dy;
        if s2 >= 1.0 {
            return (0.0, [0.0, 0.0]);
        }
        let q = 1.0 - s2;
        let g = 4.0 * q.powi(3) * (-2.0) / self.radius;
        (q.powi(4), [g * dx, g * dy])
    }
}

impl TestFunction for BumpTest {
    fn value(&self, t: f64, x: f64, y: f64) -> f64 {
        self.time(t).0 * self.space(x, y).0
    }
    fn dt(&self, t: f64, x: f64, y: f64) -> f64 {
        self.time(t).1 * self.space(x, y).0
    }
    fn grad(&self, t: f64, x: f64, y: f64) -> [f64; 2] {
        let b = self.time(t).0;
        let g = self.space(x, y).1;
        [b * g[0], b * g[1]]
    }
}

/// Trapezoid rule in time over frame-wise spatial integrals.
fn time_integral(frames: &[ProbeFrame], mut f: impl FnMut(&ProbeFrame) -> Result<f64>) -> Result<f64> {
    if frames.len() < 2 {
        return Err(Error::Precondition("space-time integrals need at least two frames".into()));
    }
    let vals = frames.iter().map(&mut f).collect::<Result<Vec<f64>>>()?;
    Ok(frames.windows(2).zip(vals.windows(2)).map(|(w, v)| 0.5 * (w[1].t - w[0].t) * (v[0] + v[1])).sum())
}

/// `int int zeta(t) eta(x) (a rho^gamma + delta rho^beta - (lambda + 2 mu) div u) rho`.
pub fn viscous_flux_probe(
    frames: &[ProbeFrame],
    params: &PhysParams,
    zeta: impl Fn(f64) -> f64,
    eta: impl Fn(f64, f64) -> f64,
) -> Result<f64> {
    let visc = params.lambda + 2.0 * params.mu;
    time_integral(frames, |fr| {
        let d = *fr.rho.domain();
        let div = fr.u.divergence();
        let z = zeta(fr.t);
        let s: f64 = (0..d.len())
            .map(|p| {
                let (x, y) = d.node(p);
                let r = fr.rho.data()[p];
                eta(x, y) * (params.pressure(r) - visc * div[p]) * r
            })
            .sum();
        Ok(z * s * d.cell_area())
    })
}

/// `max_phi | int int B phi_t + B u . grad phi - b phi div u |` with
/// `B(z) = z log z` and `b(z) = z`.
pub fn renorm_residual(frames: &[ProbeFrame], tests: &[&dyn TestFunction]) -> Result<f64> {
    let mut worst = 0.0f64;
    for phi in tests {
        let r = time_integral(frames, |fr| {
            let d = *fr.rho.domain();
            let div = fr.u.divergence();
            let (u1, u2) = (fr.u.comps[0].data(), fr.u.comps[1].data());
            let mut s = 0.0;
            for p in 0..d.len() {
                let (x, y) = d.node(p);
                let v = phi.value(fr.t, x, y);
                let g = phi.grad(fr.t, x, y);
                if v == 0.0 && g == [0.0, 0.0] && phi.dt(fr.t, x, y) == 0.0 {
                    continue;
                }
                let z = fr.rho.data()[p];
                if z <= 0.0 {
                    return Err(Error::Precondition(format!("density {z} is not positive on the test support")));
                }
                let big_b = z * z.ln();
                s += big_b * phi.dt(fr.t, x, y) + big_b * (u1[p] * g[0] + u2[p] * g[1]) - z * v * div[p];
            }
            Ok(s * d.cell_area())
        })?;
        worst = worst.max(r.abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::Bc;
    use crate::geometry::Domain;

    fn frames(rho: f64) -> Vec<ProbeFrame> {
        let d = Domain::unit_square(16).unwrap();
        (0..5)
            .map(|k| ProbeFrame {
                t: 0.1 * k as f64,
                rho: ScalarField::constant(d, Bc::Neumann0, rho),
                u: VectorField3::zeros(d, Bc::Dirichlet0),
            })
            .collect()
    }

    #[test]
    fn probe_of_vacuum_is_zero() {
        let p = PhysParams::default();
        assert_eq!(viscous_flux_probe(&frames(0.0), &p, |_| 1.0, |_, _| 1.0).unwrap(), 0.0);
    }

    #[test]
    fn probe_of_constant_state_is_closed_form() {
        let p = PhysParams::default();
        let v = viscous_flux_probe(&frames(2.0), &p, |_| 1.0, |_, _| 1.0).unwrap();
        let expect = 0.4 * (p.a * 2f64.powf(p.gamma + 1.0) + p.delta * 2f64.powf(p.beta + 1.0));
        assert!((v - expect).abs() < 1e-12 * expect);
    }

    #[test]
    fn constant_density_at_rest_has_tiny_residual() {
        let phi = BumpTest { t0: 0.0, t1: 0.4, cx: 0.5, cy: 0.5, radius: 0.3 };
        let r = renorm_residual(&frames(1.7), &[&phi]).unwrap();
        // only the time quadrature of phi_t remains
        assert!(r < 1e-2, "{r}");
    }

    #[test]
    fn bump_derivatives_match_differences() {
        let phi = BumpTest { t0: 0.0, t1: 1.0, cx: 0.4, cy: 0.6, radius: 0.3 };
        let (t, x, y, e) = (0.3, 0.5, 0.55, 1e-6);
        let ft = (phi.value(t + e, x, y) - phi.value(t - e, x, y)) / (2.0 * e);
        let fx = (phi.value(t, x + e, y) - phi.value(t, x - e, y)) / (2.0 * e);
        assert!((ft - phi.dt(t, x, y)).abs() < 1e-7);
        assert!((fx - phi.grad(t, x, y)[0]).abs() < 1e-7);
    }
}
