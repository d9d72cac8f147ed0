//! Cubic Schroedinger equation `i psi_t + lap psi = |psi|^2 psi + G psi` with
//! `psi = 0` on the wall, by Strang splitting.

use serde::Serialize;

use crate::coupling::{interaction_energy, InteractionSpec};
use crate::error::{Error, Result};
use crate::fields::{inner, sum_integral, Bc, ComplexField, ScalarField};
use crate::geometry::Domain;
use crate::spectral::{exact_eigenvalues, tensor_sum, Parity, Transform2d};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveParams {
    pub dt: f64,
    pub substeps: usize,
}

impl WaveParams {
    pub fn new(dt: f64) -> Self {
        Self { dt, substeps: 1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WaveRecord {
    pub t: f64,
    pub mass: f64,
    pub gradient: f64,
    pub quartic: f64,
    pub interaction: f64,
}

/// Split-step propagator. The linear part is exact on every grid sine mode,
/// using the continuum eigenvalues.
#[derive(Debug, Clone)]
pub struct NlsSolver {
    domain: Domain,
    transform: Transform2d,
    laplace: Vec<f64>,
}

impl NlsSolver {
    pub fn new(domain: Domain) -> Self {
        let ex = exact_eigenvalues(domain.nx, domain.lx, Parity::Odd);
        let ey = exact_eigenvalues(domain.ny, domain.ly, Parity::Odd);
        Self { domain, transform: Transform2d::new(domain.nx, domain.ny), laplace: tensor_sum(&ex, &ey) }
    }

    /// `psi <- exp(i t lap) psi`.
    pub fn linear(&self, psi: &mut ComplexField, t: f64) {
        let (re, im) = (psi.re.data_mut(), psi.im.data_mut());
        self.transform.forward(re, Parity::Odd);
        self.transform.forward(im, Parity::Odd);
        for ((a, b), l) in re.iter_mut().zip(im.iter_mut()).zip(&self.laplace) {
            let (s, c) = (l * t).sin_cos();
            let (x, y) = (*a, *b);
            *a = c * x + s * y;
            *b = c * y - s * x;
        }
        self.transform.inverse(re, Parity::Odd);
        self.transform.inverse(im, Parity::Odd);
    }

    fn rotate_potential(psi: &mut ComplexField, g: &ScalarField, t: f64) {
        let theta: Vec<f64> = psi.modulus_sq().data().iter().zip(g.data()).map(|(m, g)| -t * (m + g)).collect();
        psi.rotate(&theta);
    }

    /// `p.substeps` Strang steps covering `p.dt`, with `g` frozen.
    pub fn step(&self, psi: &ComplexField, g: &ScalarField, p: &WaveParams) -> Result<ComplexField> {
        if !(p.dt > 0.0 && p.dt.is_finite()) || p.substeps == 0 {
            return Err(Error::Parameter(format!("wave step needs dt > 0 and substeps >= 1, got {} / {}", p.dt, p.substeps)));
        }
        if psi.bc() != Bc::Dirichlet0 {
            return Err(Error::BoundaryTag { expected: Bc::Dirichlet0.name(), found: psi.bc().name() });
        }
        if *psi.domain() != self.domain || *g.domain() != self.domain {
            return Err(Error::Shape("wave field, potential and stepper grids differ".into()));
        }
        let h = p.dt / p.substeps as f64;
        let mut out = psi.clone();
        for _ in 0..p.substeps {
            Self::rotate_potential(&mut out, g, 0.5 * h);
            self.linear(&mut out, h);
            Self::rotate_potential(&mut out, g, 0.5 * h);
        }
        Ok(out)
    }

    /// `||grad psi||^2`, computed on the sine coefficients.
    pub fn gradient_norm_sq(&self, psi: &ComplexField) -> f64 {
        let mult: Vec<f64> = self.laplace.clone();
        let d = *psi.domain();
        [&psi.re, &psi.im]
            .iter()
            .map(|c| {
                let mut buf = c.data().to_vec();
                self.transform.filter(&mut buf, Parity::Odd, &mult);
                inner(c.data(), &buf, &d)
            })
            .sum()
    }

    /// `(1/2 ||grad psi||^2, 1/4 ||psi||_4^4)`.
    pub fn free_energy(&self, psi: &ComplexField) -> (f64, f64) {
        let m = psi.modulus_sq();
        let quartic: Vec<f64> = m.data().iter().map(|s| s * s).collect();
        (0.5 * self.gradient_norm_sq(psi), 0.25 * sum_integral(&quartic, psi.domain()))
    }

    pub fn energy(&self, psi: &ComplexField, spec: &InteractionSpec, v: &ScalarField, t: f64) -> WaveRecord {
        let (gradient, quartic) = self.free_energy(psi);
        WaveRecord { t, mass: wave_mass(psi), gradient, quartic, interaction: interaction_energy(spec, v, psi) }
    }
}

pub fn step_wave(psi: &ComplexField, g: &ScalarField, p: &WaveParams) -> Result<ComplexField> {
    NlsSolver::new(*psi.domain()).step(psi, g, p)
}

/// `int |psi|^2`.
pub fn wave_mass(psi: &ComplexField) -> f64 {
    psi.norm_sq()
}

/// `1/2 ||grad psi||^2 + 1/4 ||psi||_4^4 + alpha int g(v) h(|psi|^2)`.
pub fn wave_energy(psi: &ComplexField, spec: &InteractionSpec, v: &ScalarField) -> f64 {
    let r = NlsSolver::new(*psi.domain()).energy(psi, spec, v, 0.0);
    r.gradient + r.quartic + r.interaction
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn mode(d: Domain, amp: f64) -> ComplexField {
        ComplexField::from_fn(d, Bc::Dirichlet0, |x, y| (amp * 2.0 * (PI * x).sin() * (PI * y).sin(), 0.0))
    }

    #[test]
    fn zero_wave_stays_zero() {
        let d = Domain::unit_square(16).unwrap();
        let s = NlsSolver::new(d);
        let g = ScalarField::constant(d, Bc::Neumann0, 3.0);
        let out = s.step(&ComplexField::zeros(d, Bc::Dirichlet0), &g, &WaveParams::new(0.01)).unwrap();
        assert_eq!(out.norm_sq(), 0.0);
    }

    #[test]
    fn eigenmode_rotates_at_its_eigenvalue() {
        let d = Domain::unit_square(32).unwrap();
        let s = NlsSolver::new(d);
        let g = ScalarField::zeros(d, Bc::Neumann0);
        let mut psi = mode(d, 1e-6);
        let p = WaveParams::new(1e-3);
        for _ in 0..100 {
            psi = s.step(&psi, &g, &p).unwrap();
        }
        let phase = -2.0 * PI * PI * 0.1;
        let reference = mode(d, 1e-6);
        for q in 0..d.len() {
            let (a, b) = (psi.re.data()[q], psi.im.data()[q]);
            let r = reference.re.data()[q];
            assert!((a - r * phase.cos()).abs() < 1e-6 * 1e-6 * 2.0);
            assert!((b - r * phase.sin()).abs() < 1e-6 * 1e-6 * 2.0);
        }
    }

    #[test]
    fn mass_and_energy_examples() {
        let d = Domain::unit_square(64).unwrap();
        let psi = mode(d, 1.0);
        assert!((wave_mass(&psi) - 1.0).abs() < 1e-12);
        let s = NlsSolver::new(d);
        assert!((0.5 * s.gradient_norm_sq(&psi) - PI * PI).abs() < 1e-9);
        let v = ScalarField::constant(d, Bc::Neumann0, 1.0);
        let spec = InteractionSpec::default();
        assert_eq!(wave_energy(&ComplexField::zeros(d, Bc::Dirichlet0), &spec, &v), 0.0);
    }

    #[test]
    fn global_phase_commutes_with_the_step() {
        let d = Domain::unit_square(16).unwrap();
        let s = NlsSolver::new(d);
        let g = ScalarField::from_fn(d, Bc::Neumann0, |x, y| x - y);
        let psi = ComplexField::from_fn(d, Bc::Dirichlet0, |x, y| {
            let b = (PI * x).sin() * (PI * y).sin();
            (b * (1.0 + x), b * y)
        });
        let theta = vec![0.8; d.len()];
        let mut rotated = psi.clone();
        rotated.rotate(&theta);
        let p = WaveParams { dt: 0.01, substeps: 3 };
        let mut a = s.step(&psi, &g, &p).unwrap();
        a.rotate(&theta);
        let b = s.step(&rotated, &g, &p).unwrap();
        for q in 0..d.len() {
            assert!((a.re.data()[q] - b.re.data()[q]).abs() < 1e-13);
            assert!((a.im.data()[q] - b.im.data()[q]).abs() < 1e-13);
        }
    }
}
