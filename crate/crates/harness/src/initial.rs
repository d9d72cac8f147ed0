//! Initial profiles and their regularisation by the artificial-pressure floor.

use std::f64::consts::PI;

use aurora_core::continuity::ContinuitySolver;
use aurora_core::{Bc, ComplexField, Domain, ScalarField, VectorField3};

use crate::config::{DensityProfile, InitialConfig, MagneticProfile, MomentumProfile, WaveProfile};

/// Normalised Dirichlet mode `eta_{k,l}`.
fn eta(d: &Domain, k: usize, l: usize, x: f64, y: f64) -> f64 {
    2.0 / (d.lx * d.ly).sqrt() * (k as f64 * PI * x / d.lx).sin() * (l as f64 * PI * y / d.ly).sin()
}

/// `s = sin^2(pi x / lx) sin^2(pi y / ly)` and its gradient.
fn stream(d: &Domain, x: f64, y: f64) -> (f64, f64, f64) {
    let (ax, ay) = (PI * x / d.lx, PI * y / d.ly);
    let (sx, cx) = ax.sin_cos();
    let (sy, cy) = ay.sin_cos();
    let s = sx * sx * sy * sy;
    (s, 2.0 * sx * cx * PI / d.lx * sy * sy, 2.0 * sy * cy * PI / d.ly * sx * sx)
}

pub fn density(d: Domain, p: &DensityProfile) -> ScalarField {
    ScalarField::from_fn(d, Bc::Neumann0, |x, y| match *p {
        DensityProfile::Constant { value } => value,
        DensityProfile::Cosine { mean, amplitude, k, l } => {
            mean + amplitude * (k as f64 * PI * x / d.lx).cos() * (l as f64 * PI * y / d.ly).cos()
        }
        DensityProfile::Bump { base, amplitude, x0, y0, width } => {
            base + amplitude * (-((x - x0).powi(2) + (y - y0).powi(2)) / (width * width)).exp()
        }
        DensityProfile::Vacuum { depth, x0, y0, width } => {
            (1.0 - depth * (-((x - x0).powi(2) + (y - y0).powi(2)) / (width * width)).exp()).max(0.0)
        }
    })
}

/// Momentum `m0 = rho0 u0` for the velocity profile.
pub fn momentum(d: Domain, rho: &ScalarField, p: &MomentumProfile) -> VectorField3 {
    let mut u = VectorField3::from_fn(d, Bc::Dirichlet0, |x, y| match *p {
        MomentumProfile::Zero => [0.0; 3],
        MomentumProfile::Mode { k, l, amplitude } => {
            let e = eta(&d, k, l, x, y);
            [amplitude[0] * e, amplitude[1] * e, amplitude[2] * e]
        }
        MomentumProfile::Swirl { amplitude, axial } => {
            let (_, sx, sy) = stream(&d, x, y);
            [amplitude * sy, -amplitude * sx, axial * eta(&d, 1, 1, x, y)]
        }
    });
    for c in u.comps.iter_mut() {
        for (v, r) in c.data_mut().iter_mut().zip(rho.data()) {
            *v *= r;
        }
    }
    u
}

pub fn magnetic(d: Domain, p: &MagneticProfile) -> VectorField3 {
    VectorField3::from_fn(d, Bc::Dirichlet0, |x, y| match *p {
        MagneticProfile::Zero => [0.0; 3],
        MagneticProfile::Axial { k, l, amplitude } => [0.0, 0.0, amplitude * eta(&d, k, l, x, y)],
        MagneticProfile::Loop { amplitude, axial } => {
            let (_, sx, sy) = stream(&d, x, y);
            [amplitude * sy, -amplitude * sx, axial * eta(&d, 1, 1, x, y)]
        }
    })
}

pub fn wave(d: Domain, p: &WaveProfile) -> ComplexField {
    ComplexField::from_fn(d, Bc::Dirichlet0, |x, y| match *p {
        WaveProfile::Zero => (0.0, 0.0),
        WaveProfile::Mode { k, l, amplitude } => (amplitude * eta(&d, k, l, x, y), 0.0),
        WaveProfile::Packet { amplitude, x0, y0, width, kx, ky } => {
            let env = amplitude
                * (-((x - x0).powi(2) + (y - y0).powi(2)) / (width * width)).exp()
                * eta(&d, 1, 1, x, y);
            let (s, c) = (kx * x + ky * y).sin_cos();
            (env * c, env * s)
        }
    })
}

/// Regularised data: `rho` is heat-smoothed for time `smoothing * delta`
/// (zero-flux walls), lifted by its largest deficit below `rho0` so that
/// `rho0d >= rho0` except where the upper cap bites, then clamped to
/// `[delta, delta^{-1/(2 beta)}]`. Momentum survives where `rho0d >= rho0`
/// and is zeroed elsewhere.
pub fn approx_initial_data(
    rho0: &ScalarField,
    m0: &VectorField3,
    delta: f64,
    beta: f64,
    smoothing: f64,
) -> (ScalarField, VectorField3) {
    if delta <= 0.0 {
        return (rho0.clone(), m0.clone());
    }
    let mut rho = rho0.clone();
    let tau = smoothing * delta;
    if tau > 0.0 {
        ContinuitySolver::new(*rho0.domain()).diffuse(rho.data_mut(), 1.0, tau);
        let lift = rho0.data().iter().zip(rho.data()).map(|(a, b)| a - b).fold(0.0, f64::max);
        for v in rho.data_mut() {
            *v += lift;
        }
    }
    let hi = delta.powf(-1.0 / (2.0 * beta));
    for v in rho.data_mut() {
        *v = v.clamp(delta, hi);
    }
    let mut m = m0.clone();
    for c in m.comps.iter_mut() {
        for ((v, new), old) in c.data_mut().iter_mut().zip(rho.data()).zip(rho0.data()) {
            if new < old {
                *v = 0.0;
            }
        }
    }
    (rho, m)
}

/// Initial `(rho, m, H, psi)` for a configuration, regularised when asked.
pub fn build(d: Domain, init: &InitialConfig, delta: f64, beta: f64) -> (ScalarField, VectorField3, VectorField3, ComplexField) {
    let rho_raw = density(d, &init.density);
    let m_raw = momentum(d, &rho_raw, &init.momentum);
    let (rho, m) = if init.approximate {
        approx_initial_data(&rho_raw, &m_raw, delta, beta, init.smoothing)
    } else {
        (rho_raw, m_raw)
    };
    (rho, m, magnetic(d, &init.magnetic), wave(d, &init.wave))
}
