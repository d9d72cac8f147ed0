//! Interaction profiles `g`, `h`, the wave potential `G` and the momentum
//! force potential.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{Bc, ComplexField, ScalarField};

/// `6t^5 - 15t^4 + 10t^3` on `[0, 1]`, constant outside.
pub fn smoothstep(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        t * t * t * (t * (6.0 * t - 15.0) + 10.0)
    }
}

pub fn smoothstep_prime(t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        0.0
    } else {
        30.0 * t * t * (1.0 - t) * (1.0 - t)
    }
}

pub fn smoothstep_second(t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        0.0
    } else {
        60.0 * t * (1.0 - t) * (1.0 - 2.0 * t)
    }
}

/// Coupling strength and plateau profile parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InteractionSpec {
    pub alpha: f64,
    pub v_lo: f64,
    pub v_hi: f64,
    pub g_max: f64,
    pub s_hi: f64,
    pub h_max: f64,
}

impl Default for InteractionSpec {
    fn default() -> Self {
        Self { alpha: 0.0, v_lo: 0.5, v_hi: 2.0, g_max: 1.0, s_hi: 4.0, h_max: 1.0 }
    }
}

pub fn default_interaction(alpha: f64) -> Result<InteractionSpec> {
    let s = InteractionSpec { alpha, ..Default::default() };
    s.validate()?;
    Ok(s)
}

impl InteractionSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::Parameter(format!("alpha must be nonnegative, got {}", self.alpha)));
        }
        if !(self.v_lo > 0.0 && self.v_hi > self.v_lo && self.v_hi.is_finite()) {
            return Err(Error::Parameter(format!(
                "g profile needs 0 < v_lo < v_hi, got [{}, {}]",
                self.v_lo, self.v_hi
            )));
        }
        if !(self.s_hi > 0.0 && self.g_max >= 0.0 && self.h_max >= 0.0) {
            return Err(Error::Parameter("h profile needs s_hi > 0 and nonnegative plateaus".into()));
        }
        Ok(())
    }

    fn gt(&self, v: f64) -> f64 {
        (v - self.v_lo) / (self.v_hi - self.v_lo)
    }

    pub fn g(&self, v: f64) -> f64 {
        self.g_max * smoothstep(self.gt(v))
    }
    pub fn g_prime(&self, v: f64) -> f64 {
        self.g_max * smoothstep_prime(self.gt(v)) / (self.v_hi - self.v_lo)
    }
    pub fn g_second(&self, v: f64) -> f64 {
        let w = self.v_hi - self.v_lo;
        self.g_max * smoothstep_second(self.gt(v)) / (w * w)
    }
    pub fn h(&self, s: f64) -> f64 {
        self.h_max * smoothstep(s / self.s_hi)
    }
    pub fn h_prime(&self, s: f64) -> f64 {
        self.h_max * smoothstep_prime(s / self.s_hi) / self.s_hi
    }

    /// `max g'`, attained at the middle of the ramp.
    pub fn g_prime_max(&self) -> f64 {
        self.g_max * 1.875 / (self.v_hi - self.v_lo)
    }
    pub fn h_prime_max(&self) -> f64 {
        self.h_max * 1.875 / self.s_hi
    }

    /// Pointwise force potential `alpha (J / rho) g'(1/rho) h(s)`, zero in
    /// vacuum and wherever `1/rho` is off the support of `g'`.
    pub fn force_density(&self, rho: f64, jy: f64, s: f64) -> f64 {
        if self.alpha == 0.0 || rho <= 0.0 {
            return 0.0;
        }
        let v = 1.0 / rho;
        if v <= self.v_lo || v >= self.v_hi {
            return 0.0;
        }
        self.alpha * jy * v * self.g_prime(v) * self.h(s)
    }
}

/// `G = alpha g(v) h'(|psi|^2)`.
pub fn potential_g(spec: &InteractionSpec, v: &ScalarField, psi: &ComplexField) -> Result<ScalarField> {
    if v.domain() != psi.domain() {
        return Err(Error::Shape("specific volume and wave field grids differ".into()));
    }
    if spec.alpha == 0.0 {
        return Ok(ScalarField::zeros(*v.domain(), Bc::Neumann0));
    }
    let s = psi.modulus_sq();
    let data = v.data().iter().zip(s.data()).map(|(&v, &s)| spec.alpha * spec.g(v) * spec.h_prime(s)).collect();
    ScalarField::new(*v.domain(), Bc::Neumann0, data)
}

/// `f = alpha (J_y / rho) g'(1/rho) h(|psi o Y|^2)`; the momentum force is `grad f`.
pub fn force_potential(
    spec: &InteractionSpec,
    rho: &ScalarField,
    jy: &ScalarField,
    wsq: &ScalarField,
) -> Result<ScalarField> {
    let d = *rho.domain();
    if *jy.domain() != d || *wsq.domain() != d {
        return Err(Error::Shape("force potential inputs on different grids".into()));
    }
    if rho.min() < 0.0 {
        return Err(Error::Precondition(format!("negative density {}", rho.min())));
    }
    let data = rho
        .data()
        .iter()
        .zip(jy.data())
        .zip(wsq.data())
        .map(|((&r, &j), &s)| spec.force_density(r, j, s))
        .collect();
    ScalarField::new(d, Bc::Free, data)
}

/// `alpha int g(v) h(|psi|^2)`.
pub fn interaction_energy(spec: &InteractionSpec, v: &ScalarField, psi: &ComplexField) -> f64 {
    if spec.alpha == 0.0 {
        return 0.0;
    }
    let s = psi.modulus_sq();
    let vals: Vec<f64> = v.data().iter().zip(s.data()).map(|(&v, &s)| spec.g(v) * spec.h(s)).collect();
    spec.alpha * crate::fields::sum_integral(&vals, v.domain())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Domain;

    #[test]
    fn profile_support_examples() {
        let s = default_interaction(1.0).unwrap();
        assert_eq!(s.g(0.0), 0.0);
        assert_eq!(s.g(2.0), 1.0);
        assert_eq!(s.g(7.0), 1.0);
        assert_eq!(s.g_prime(0.25), 0.0);
        assert_eq!(s.h(0.0), 0.0);
        assert_eq!(s.h_prime(8.0), 0.0);
        assert!(default_interaction(-1.0).is_err());
    }

    #[test]
    fn derivatives_match_differences() {
        let s = default_interaction(1.0).unwrap();
        let e = 1e-6;
        for v in [0.6, 1.0, 1.3, 1.9] {
            let fd = (s.g(v + e) - s.g(v - e)) / (2.0 * e);
            assert!((fd - s.g_prime(v)).abs() < 1e-8);
            let fd2 = (s.g_prime(v + e) - s.g_prime(v - e)) / (2.0 * e);
            assert!((fd2 - s.g_second(v)).abs() < 1e-6);
        }
        for x in [0.5, 2.0, 3.5] {
            let fd = (s.h(x + e) - s.h(x - e)) / (2.0 * e);
            assert!((fd - s.h_prime(x)).abs() < 1e-8);
        }
    }

    #[test]
    fn vacuum_and_dense_regions_have_no_force() {
        let s = default_interaction(2.0).unwrap();
        assert_eq!(s.force_density(0.0, 1.0, 4.0), 0.0);
        assert_eq!(s.force_density(3.0, 1.0, 4.0), 0.0);
        assert_eq!(s.force_density(0.4, 1.0, 4.0), 0.0);
        // v = 1 in the ramp, h(4) = h_max
        assert!((s.force_density(1.0, 1.0, 4.0) - 2.0 * s.g_prime(1.0)).abs() < 1e-15);
    }

    #[test]
    fn zero_alpha_gives_zero_fields() {
        let d = Domain::unit_square(8).unwrap();
        let s = default_interaction(0.0).unwrap();
        let v = ScalarField::constant(d, Bc::Neumann0, 1.0);
        let psi = ComplexField::from_fn(d, Bc::Dirichlet0, |x, y| (x, y));
        assert_eq!(potential_g(&s, &v, &psi).unwrap().max_abs(), 0.0);
        let f = force_potential(&s, &v, &v, &psi.modulus_sq()).unwrap();
        assert_eq!(f.max_abs(), 0.0);
    }

    #[test]
    fn constant_volume_and_zero_wave_gives_constant_potential() {
        let d = Domain::unit_square(8).unwrap();
        let s = default_interaction(0.7).unwrap();
        let v = ScalarField::constant(d, Bc::Neumann0, 1.0);
        let psi = ComplexField::zeros(d, Bc::Dirichlet0);
        let g = potential_g(&s, &v, &psi).unwrap();
        let expect = 0.7 * s.g(1.0) * s.h_prime(0.0);
        assert!(g.data().iter().all(|x| *x == expect));
    }
}
