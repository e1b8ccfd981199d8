use nalgebra::DVector;
use num_complex::Complex64;
use proptest::prelude::*;
use sparse_source::forward::{Grid, VolumePotential};
use sparse_source::harness::{add_noise, n_error, restrict};
use sparse_source::objective::primal_objective;
use sparse_source::prox::RegParams;
use sparse_source::realfield::RealifiedVector;
use sparse_source::solver::alm::solve_alm_dense;
use sparse_source::solver::ssn::solve_ssn_dense;
use sparse_source::solver::{random_instance, AlmOptions, SsnOptions};

fn config() -> ProptestConfig {
    ProptestConfig { cases: 24, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config())]

    // Subgradient conditions of P at the ALM solution: with g = V_bᵀ(V_bμ - u_b) + α₀μ,
    // g_i = -α sign(μ_i) on the support and |g_i| ≤ α elsewhere.
    #[test]
    fn alm_solution_satisfies_kkt(m in 2usize..6, n in 6usize..20, seed in 0u64..1000,
                                  la in -3.0..-1.0f64, la0 in -4.0..-2.0f64) {
        let (vb, u) = random_instance(m, n, seed);
        let reg = RegParams::new(10f64.powf(la), 10f64.powf(la0)).unwrap();
        let sol = solve_alm_dense(&vb, &u, &reg, &AlmOptions::default()).unwrap();
        let mu = sol.mu.as_dvector();
        let g = vb.tr_mul(&(&vb * mu - &u)) + mu * reg.alpha0;
        let tol = 1e-6 * (1.0 + reg.alpha);
        for i in 0..mu.len() {
            if mu[i].abs() > 1e-9 {
                prop_assert!((g[i] + reg.alpha * mu[i].signum()).abs() <= tol, "i={i} g={} mu={}", g[i], mu[i]);
            } else {
                prop_assert!(g[i].abs() <= reg.alpha + tol, "i={i} g={}", g[i]);
            }
        }
    }

    #[test]
    fn alm_beats_perturbations(m in 2usize..5, n in 6usize..16, seed in 0u64..1000,
                               d in proptest::collection::vec(-1.0..1.0f64, 32), eps in 1e-4..1e-1f64) {
        let (vb, u) = random_instance(m, n, seed);
        let reg = RegParams::new(0.02, 1e-3).unwrap();
        let sol = solve_alm_dense(&vb, &u, &reg, &AlmOptions::default()).unwrap();
        let dir = DVector::from_iterator(2 * n, d.iter().copied().cycle().take(2 * n));
        let moved = sol.mu.as_dvector() + dir * eps;
        prop_assert!(primal_objective(&vb, &u, &moved, &reg) >= sol.primal_objective - 1e-12);
    }

    #[test]
    fn ssn_and_alm_objectives_agree(m in 3usize..6, n in 10usize..24, seed in 0u64..1000,
                                    la in -3.0..-1.0f64, la0 in -4.0..-2.0f64) {
        let (vb, u) = random_instance(m, n, seed);
        let reg = RegParams::new(10f64.powf(la), 10f64.powf(la0)).unwrap();
        let alm = solve_alm_dense(&vb, &u, &reg, &AlmOptions::default()).unwrap();
        let ssn = solve_ssn_dense(&vb, &u, &reg, &SsnOptions::default()).unwrap();
        prop_assert!(ssn.diagnostics.converged);
        let rel = (alm.primal_objective - ssn.primal_objective).abs() / alm.primal_objective;
        prop_assert!(rel <= 1e-8, "relative objective difference {rel:.2e}");
    }

    #[test]
    fn volume_potential_is_linear(re in proptest::collection::vec(-1.0..1.0f64, 64),
                                  im in proptest::collection::vec(-1.0..1.0f64, 64),
                                  a in -2.0..2.0f64, b in -2.0..2.0f64) {
        let g = Grid::new(2, 8, 1.0).unwrap();
        let vp = VolumePotential::new(&g, 4.0).unwrap();
        let x: Vec<Complex64> = re.iter().map(|v| Complex64::new(*v, 0.0)).collect();
        let y: Vec<Complex64> = im.iter().map(|v| Complex64::new(0.0, *v)).collect();
        let mix: Vec<Complex64> = x.iter().zip(&y).map(|(p, q)| p * a + q * b).collect();
        let (vx, vy, vm) = (vp.apply_fft(&x).unwrap(), vp.apply_fft(&y).unwrap(), vp.apply_fft(&mix).unwrap());
        let dense = vp.apply_dense(&mix).unwrap();
        for i in 0..g.len() {
            prop_assert!((vm[i] - (vx[i] * a + vy[i] * b)).norm() <= 1e-12 * (1.0 + vm[i].norm()));
            prop_assert!((vm[i] - dense[i]).norm() <= 1e-10 * (1.0 + dense[i].norm()));
        }
    }

    #[test]
    fn restriction_conserves_mass(vals in proptest::collection::vec(-5.0..5.0f64, 144)) {
        let fine = Grid::new(2, 12, 1.5).unwrap();
        let coarse = Grid::new(2, 8, 1.5).unwrap();
        let rc = restrict(&vals, &fine, &coarse).unwrap();
        let mf: f64 = vals.iter().sum::<f64>() * fine.cell_volume();
        let mc: f64 = rc.iter().sum::<f64>() * coarse.cell_volume();
        prop_assert!((mf - mc).abs() <= 1e-12 * (1.0 + mf.abs()));
    }

    #[test]
    fn n_error_is_scale_invariant(a in proptest::collection::vec(-1.0..1.0f64, 10),
                                  b in proptest::collection::vec(0.1..1.0f64, 10), c in 0.01..100.0f64) {
        let x = RealifiedVector::from_raw(DVector::from_vec(a)).unwrap();
        let y = RealifiedVector::from_raw(DVector::from_vec(b)).unwrap();
        let xs = RealifiedVector::from_raw(x.as_dvector() * c).unwrap();
        let ys = RealifiedVector::from_raw(y.as_dvector() * c).unwrap();
        let (e1, e2) = (n_error(&x, &y).unwrap(), n_error(&xs, &ys).unwrap());
        prop_assert!((e1 - e2).abs() <= 1e-12 * (1.0 + e1));
    }

    #[test]
    fn noise_is_seeded_and_scales_with_delta(vals in proptest::collection::vec(-1.0..1.0f64, 16),
                                             seed in any::<u64>(), delta in 0.0..0.1f64) {
        let u = RealifiedVector::from_raw(DVector::from_vec(vals)).unwrap();
        let a = add_noise(&u, delta, seed).unwrap();
        let again = add_noise(&u, delta, seed).unwrap();
        prop_assert_eq!(a.as_dvector(), again.as_dvector());
        let unit = add_noise(&u, 1.0, seed).unwrap();
        let expect = u.as_dvector() + (unit.as_dvector() - u.as_dvector()) * delta;
        prop_assert!((a.as_dvector() - expect).amax() <= 1e-12);
    }
}
