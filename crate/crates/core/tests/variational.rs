use dicke_core::coherent::{cs_critical_points, cs_minimum_energy_per_particle, cs_numeric_minimum};
use dicke_core::eigen::{converged_ground, dense_lowest};
use dicke_core::hilbert::{build_hamiltonian, HilbertSpec};
use dicke_core::sas::sas_minimize;
use dicke_core::{ModelParams, Parity};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn numeric_cs_minimum_matches_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..50 {
        let p = ModelParams::new(rng.gen_range(0.2..4.0), rng.gen_range(0.1..3.0), rng.gen_range(1..=40)).unwrap();
        let (pt, e) = cs_numeric_minimum(&p);
        let cp = cs_critical_points(&p).phi_zero;
        assert!(
            (e - cp.energy_per_particle).abs() <= 1e-9,
            "{p:?}: {e} vs {}",
            cp.energy_per_particle
        );
        // Either φ branch is acceptable: compare q cos φ.
        assert!((pt.q * pt.phi.cos() - cp.q_c).abs() <= 1e-5, "{p:?}: {pt:?} vs {cp:?}");
    }
}

#[test]
fn variational_energies_bound_exact_ones() {
    for n in [2u32, 10] {
        for g in [0.2, 0.45, 0.55, 0.7, 1.1] {
            let p = ModelParams::new(1.0, g, n).unwrap();
            let (ground, _) = converged_ground(&p, Parity::Even, 1e-11).unwrap();
            let (excited, _) = converged_ground(&p, Parity::Odd, 1e-11).unwrap();
            let even = sas_minimize(&p, Parity::Even).unwrap().energy_per_particle;
            let odd = sas_minimize(&p, Parity::Odd).unwrap().energy_per_particle;
            let cs = cs_minimum_energy_per_particle(&p);
            assert!(ground.energy <= even + 1e-8, "N={n} γ={g}");
            assert!(even <= cs + 1e-8, "N={n} γ={g}");
            assert!(excited.energy <= odd + 1e-8, "N={n} γ={g}");
        }
    }
}

#[test]
fn even_ground_is_global_ground() {
    let p = ModelParams::new(1.0, 0.8, 3).unwrap();
    let full = build_hamiltonian(&p, &HilbertSpec::for_params(&p, 40, None)).unwrap();
    let even = build_hamiltonian(&p, &HilbertSpec::for_params(&p, 40, Some(Parity::Even))).unwrap();
    let a = dense_lowest(&full, 1).unwrap()[0].energy;
    let b = dense_lowest(&even, 1).unwrap()[0].energy;
    assert!((a - b).abs() < 1e-12);
}

#[test]
fn odd_minimum_moves_continuously() {
    let mut prev: Option<f64> = None;
    for k in 0..=20 {
        let g = 0.45 + 0.01 * k as f64;
        let m = sas_minimize(&ModelParams::new(1.0, g, 20).unwrap(), Parity::Odd).unwrap();
        if let Some(t) = prev {
            assert!((m.point.theta - t).abs() < 0.1, "γ={g}: {} after {t}", m.point.theta);
        }
        prev = Some(m.point.theta);
    }
}
