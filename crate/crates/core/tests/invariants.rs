use std::f64::consts::PI;

use aurora_core::continuity::{mass, ContinuityParams, ContinuitySolver};
use aurora_core::diagnostics::{horizon_tn, HorizonInputs};
use aurora_core::fields::Snapshot;
use aurora_core::galerkin::{assemble_mass, MassOperator};
use aurora_core::nls::{NlsSolver, WaveParams};
use aurora_core::spectral::{Parity, Transform2d};
use aurora_core::{build_basis, Bc, ComplexField, Domain, ScalarField, VectorField3};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Positive density built from a few random cosine modes.
fn random_density(d: Domain, rng: &mut ChaCha8Rng) -> ScalarField {
    let base = rng.gen_range(0.5..2.0);
    let terms: Vec<(f64, f64, f64)> = (0..3).map(|_| (rng.gen_range(-0.2..0.2), rng.gen_range(0..4) as f64, rng.gen_range(0..4) as f64)).collect();
    ScalarField::from_fn(d, Bc::Neumann0, move |x, y| base + terms.iter().map(|(a, k, l)| a * (k * PI * x).cos() * (l * PI * y).cos()).sum::<f64>())
}

fn swirl(d: Domain, amp: f64) -> VectorField3 {
    VectorField3::from_fn(d, Bc::Dirichlet0, |x, y| {
        let (sx, sy) = ((PI * x).sin(), (PI * y).sin());
        [amp * sx * sx * (2.0 * PI * y).sin(), -amp * sy * sy * (2.0 * PI * x).sin(), 0.0]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn transforms_invert(seed in any::<u64>(), nx in 8usize..20, ny in 8usize..20) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data: Vec<f64> = (0..nx * ny).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let t = Transform2d::new(nx, ny);
        for parity in [Parity::Even, Parity::Odd] {
            let mut v = data.clone();
            t.forward(&mut v, parity);
            t.inverse(&mut v, parity);
            for (a, b) in v.iter().zip(&data) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn continuity_conserves_mass_and_sign(seed in any::<u64>(), amp in 0.0f64..2.0, eps in 0.0f64..0.1) {
        let d = Domain::unit_square(16).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho0 = random_density(d, &mut rng);
        let u = swirl(d, amp);
        let solver = ContinuitySolver::new(d);
        let mut rho = rho0.clone();
        for _ in 0..20 {
            rho = solver.step(&rho, &u, &ContinuityParams::new(eps, 2e-3)).unwrap().0;
        }
        prop_assert!((mass(&rho) - mass(&rho0)).abs() <= 1e-12 * mass(&rho0));
        prop_assert!(rho.min() > 0.0);
    }

    #[test]
    fn nls_step_is_unitary(seed in any::<u64>(), amp in 0.0f64..3.0, dt in 1e-4f64..1e-2) {
        let d = Domain::unit_square(16).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (k, l) = (rng.gen_range(1..5) as f64, rng.gen_range(1..5) as f64);
        let psi0 = ComplexField::from_fn(d, Bc::Dirichlet0, |x, y| {
            let s = amp * (k * PI * x).sin() * (l * PI * y).sin();
            (s * (3.0 * x).cos(), s * (2.0 * y).sin())
        });
        let g = random_density(d, &mut rng);
        let psi = NlsSolver::new(d).step(&psi0, &g, &WaveParams::new(dt)).unwrap();
        prop_assert!((psi.norm_sq() - psi0.norm_sq()).abs() <= 1e-12 * psi0.norm_sq().max(1.0));
    }

    #[test]
    fn mass_matrix_is_spd_and_bounded(seed in any::<u64>(), n in 1usize..10) {
        let d = Domain::unit_square(16).unwrap();
        let basis = build_basis(d, 10).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_density(d, &mut rng);
        let m = assemble_mass(&rho, &basis, n).unwrap();
        prop_assert!((&m - m.transpose()).abs().max() < 1e-12);
        let ev = m.clone().symmetric_eigen().eigenvalues;
        prop_assert!(ev.min() >= rho.min() * (1.0 - 1e-10));
        prop_assert!(ev.max() <= rho.max() * (1.0 + 1e-10));
        // solve inverts the matrix column-wise
        let b: Vec<[f64; 3]> = (0..n).map(|_| [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), 0.0]).collect();
        let c = MassOperator::new(&rho, &basis, n).unwrap().solve(&b);
        for i in 0..n {
            let back: f64 = (0..n).map(|j| m[(i, j)] * c[j][0]).sum();
            prop_assert!((back - b[i][0]).abs() < 1e-10);
        }
    }

    #[test]
    fn horizon_grows_as_eps_shrinks_relative_to_alpha(eps in 1e-3f64..0.5, ratio in 1.5f64..10.0, e0 in 0.0f64..2.0) {
        let base = HorizonInputs { c_n: 2.0 * PI, eps, alpha: eps.powi(3), mu: 1.0, e0, r: 1.0 };
        let smaller_alpha = HorizonInputs { alpha: base.alpha / ratio, ..base };
        prop_assert!(horizon_tn(&smaller_alpha).unwrap() > horizon_tn(&base).unwrap());
    }

    #[test]
    fn snapshot_round_trip_is_bitwise(seed in any::<u64>(), t in 0.0f64..10.0) {
        let d = Domain::new(1.0, 1.5, 10, 12).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_density(d, &mut rng);
        let h = ScalarField::new(d, Bc::Dirichlet0, (0..d.len()).map(|_| rng.gen::<f64>() * 1e-200).collect()).unwrap();
        let snap = Snapshot::new("p", t, vec![("rho".into(), rho), ("h1".into(), h)]).unwrap();
        let mut bytes = Vec::new();
        snap.write_to(&mut bytes).unwrap();
        prop_assert_eq!(Snapshot::read_from(bytes.as_slice()).unwrap(), snap);
    }
}

#[test]
fn constant_density_is_fixed_by_diffusion() {
    let d = Domain::unit_square(24).unwrap();
    let solver = ContinuitySolver::new(d);
    let mut data = vec![1.7; d.len()];
    solver.diffuse(&mut data, 0.3, 0.5);
    assert!(data.iter().all(|v| (v - 1.7).abs() < 1e-13));
}
