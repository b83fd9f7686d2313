//! Closed-form surfaces against explicit state construction in a truncated basis.

use dicke_core::coherent::{
    cs_critical_points, cs_energy_surface, cs_expectation_oracle, cs_lambda_and_fluctuation,
    cs_minimum_energy_per_particle, oracle_spec, Observable, PhasePoint,
};
use dicke_core::sas::sas_energy_surface;
use dicke_core::{ModelParams, Parity};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn random_params(rng: &mut ChaCha8Rng) -> ModelParams {
    ModelParams::new(rng.gen_range(0.2..3.0), rng.gen_range(-1.5..1.5), rng.gen_range(1..=12)).unwrap()
}

#[test]
fn cs_oracle_reproduces_surface_on_real_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let p = random_params(&mut rng);
        let phi = if rng.gen_bool(0.5) { 0.0 } else { PI };
        let pt = PhasePoint::new(rng.gen_range(-3.0..3.0), 0.0, rng.gen_range(0.0..3.0), phi);
        let spec = oracle_spec(&p, &pt, None);
        let e = cs_expectation_oracle(&p, pt.alpha(), pt.zeta(), Observable::Hamiltonian, &spec).unwrap();
        let want = cs_energy_surface(&p, &pt);
        assert!((e - want).abs() < 1e-10, "{pt:?}: {e} vs {want}");
    }
}

#[test]
fn projected_oracle_reproduces_sas_surface() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for i in 0..40 {
        let p = random_params(&mut rng);
        let parity = if i % 2 == 0 { Parity::Even } else { Parity::Odd };
        let phi = if rng.gen_bool(0.5) { 0.0 } else { PI };
        let pt = PhasePoint::new(rng.gen_range(-3.0..3.0), 0.0, rng.gen_range(-1.4..1.4), phi);
        let spec = oracle_spec(&p, &pt, Some(parity));
        let e = cs_expectation_oracle(&p, pt.alpha(), pt.zeta(), Observable::Hamiltonian, &spec).unwrap();
        let want = sas_energy_surface(&p, &pt, parity).unwrap();
        assert!((e - want).abs() < 1e-8, "{parity:?} {pt:?}: {e} vs {want}");
    }
}

#[test]
fn projected_oracle_with_momentum_and_azimuth() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for i in 0..40 {
        let p = random_params(&mut rng);
        let parity = if i % 2 == 0 { Parity::Even } else { Parity::Odd };
        let pt = PhasePoint::new(
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-1.3..1.3),
            rng.gen_range(-PI..PI),
        );
        let spec = oracle_spec(&p, &pt, Some(parity));
        let e = cs_expectation_oracle(&p, pt.alpha(), pt.zeta(), Observable::Hamiltonian, &spec).unwrap();
        let want = sas_energy_surface(&p, &pt, parity).unwrap();
        assert!((e - want).abs() < 1e-8, "{parity:?} {pt:?}: {e} vs {want}");
    }
}

#[test]
fn cs_oracle_reproduces_closed_forms_at_critical_points() {
    for (w, g, n) in [(1.0, 1.0, 20), (0.5, 0.9, 7), (2.0, 1.1, 3), (1.0, 0.3, 6)] {
        let p = ModelParams::new(w, g, n).unwrap();
        for cp in [cs_critical_points(&p).phi_zero, cs_critical_points(&p).phi_pi] {
            let pt = cp.point();
            let spec = oracle_spec(&p, &pt, None);
            let at = |o| cs_expectation_oracle(&p, pt.alpha(), pt.zeta(), o, &spec).unwrap();
            let (l, d) = cs_lambda_and_fluctuation(&p);
            assert!((at(Observable::Hamiltonian) - cs_minimum_energy_per_particle(&p)).abs() < 1e-8);
            assert!((at(Observable::Hamiltonian) - cs_energy_surface(&p, &pt)).abs() < 1e-8);
            let mean = at(Observable::Excitation);
            assert!((mean - l).abs() < 1e-8);
            assert!(((at(Observable::ExcitationSquared) - mean * mean).max(0.0).sqrt() - d).abs() < 1e-8);
            let lam = at(Observable::PhotonNumber) + at(Observable::Jz) + p.j();
            assert!((lam - mean).abs() < 1e-10);
        }
    }
}
