//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use dicke_core::coherent::{
    cs_branch_values, cs_critical_points, cs_energy_surface, cs_expectation_oracle, cs_minimum_energy_per_particle,
    cs_numeric_minimum, oracle_spec, universal_curve, Branch, Observable, PhasePoint, PhiBranch,
};
use dicke_core::criticality::{correspondence_map, fit_power_law, gamma_c_for, linspace, Method, TableSettings};
use dicke_core::dynamics::{evolve, gamma_for_rabi_ratio, rwa_deviation, EvolutionSpec};
use dicke_core::eigen::{converged_ground, dense_lowest, iterative_lowest};
use dicke_core::hilbert::{build_hamiltonian, parity_commutator_check, Basis, HilbertSpec};
use dicke_core::model::gamma_critical;
use dicke_core::sas::{sas_energy_surface, sas_minimize, sas_transition};
use dicke_core::{ModelParams, Parity};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

type Outcome = anyhow::Result<(bool, String)>;
type Criterion = (&'static str, fn() -> Outcome);

const EXACT_LADDER: [f64; 6] = [5.0, 10.0, 20.0, 40.0, 80.0, 160.0];

/// Threshold on the ratio of full-versus-RWA gaps at ω̃_A = Ω and 19Ω.
const DEVIATION_RATIO: f64 = 5.0;

fn separatrix() -> Outcome {
    let exact = gamma_critical(1.0)? == 0.5;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let p = ModelParams::new(rng.gen_range(0.2..4.0), rng.gen_range(0.1..3.0), rng.gen_range(1..=40))?;
        let (_, e) = cs_numeric_minimum(&p);
        worst = worst.max((e - cs_critical_points(&p).phi_zero.energy_per_particle).abs());
    }
    Ok((
        exact && worst <= 1e-9,
        format!("gamma_c(1) exact: {exact}; max |dE| over 50 draws = {worst:.2e}"),
    ))
}

fn exact_ladder(method: Method) -> anyhow::Result<Vec<(f64, f64)>> {
    let s = TableSettings::default();
    EXACT_LADDER
        .par_iter()
        .map(|&j| Ok((j, gamma_c_for(j, method, &s)?)))
        .collect()
}

fn exact_exponent(method: Method, amplitude: f64) -> Outcome {
    let table = exact_ladder(method)?;
    let fit = fit_power_law(&table)?;
    let slope_ok = (fit.exponent + 2.0 / 3.0).abs() <= 0.05;
    let amp_ok = (fit.amplitude / amplitude - 1.0).abs() <= 0.2;
    let peaks: Vec<String> = table.iter().map(|(j, g)| format!("{j}:{g:.6}")).collect();
    Ok((
        slope_ok && amp_ok,
        format!(
            "slope {:.4} (want -0.6667 +/- 0.05), amplitude {:.4} (want {amplitude:.4} +/- 20%), peaks [{}]",
            fit.exponent,
            fit.amplitude,
            peaks.join(" ")
        ),
    ))
}

fn sas() -> Outcome {
    let s = TableSettings::default();
    let n20 = gamma_c_for(10.0, Method::Sas, &s)?;
    let direct = sas_transition(1.0, 20, (0.53, 0.58), s.sas_tol)?.gamma_c_sc;
    let in_bracket = (0.545..=0.560).contains(&n20) && (n20 - direct).abs() < 1e-6;
    let js: Vec<f64> = (10..=200).map(f64::from).collect();
    let table: Vec<(f64, f64)> = js
        .par_iter()
        .map(|&j| Ok((j, gamma_c_for(j, Method::Sas, &s)?)))
        .collect::<anyhow::Result<_>>()?;
    let fit = fit_power_law(&table)?;
    let slope_ok = (fit.exponent + 11.0 / 21.0).abs() <= 0.03;
    Ok((
        in_bracket && slope_ok,
        format!(
            "N=20 swap at {n20:.6} (want [0.545, 0.560]); slope over j=10..200 {:.4} (want -0.5238 +/- 0.03), ci95 [{:.4}, {:.4}]",
            fit.exponent, fit.ci95.0, fit.ci95.1
        ),
    ))
}

fn ordering() -> Outcome {
    let grid = linspace(0.1, 1.5, 30);
    let jobs: Vec<(u32, f64)> = [2u32, 10, 20, 60]
        .iter()
        .flat_map(|&n| grid.iter().map(move |&g| (n, g)))
        .collect();
    let worst = jobs
        .par_iter()
        .map(|&(n, g)| -> anyhow::Result<f64> {
            let p = ModelParams::new(1.0, g, n)?;
            let (exact, _) = converged_ground(&p, Parity::Even, 1e-11)?;
            let sas = sas_minimize(&p, Parity::Even)?.energy_per_particle;
            let cs = cs_minimum_energy_per_particle(&p);
            Ok((exact.energy - sas).max(sas - cs))
        })
        .collect::<anyhow::Result<Vec<f64>>>()?
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    Ok((
        worst <= 1e-8,
        format!("largest violation of E_exact <= E_sas <= E_cs over 120 points: {worst:.2e} (slack 1e-8)"),
    ))
}

fn continuity() -> Outcome {
    let mut worst: f64 = 0.0;
    for (w, n) in [(1.0, 1u32), (0.3, 7), (2.5, 40)] {
        let p = ModelParams::new(w, 0.5 * f64::sqrt(w), n)?;
        let normal = cs_branch_values(&p, Branch::Normal);
        let sr = cs_branch_values(&p, Branch::SuperRadiant);
        let expected = -2.0 * p.n() * p.gamma_c() * p.gamma_c();
        for d in [
            normal.lambda_mean - sr.lambda_mean,
            normal.lambda_fluct - sr.lambda_fluct,
            normal.energy_extensive - sr.energy_extensive,
            sr.lambda_mean,
            sr.lambda_fluct,
            sr.energy_extensive - expected,
        ] {
            worst = worst.max(d.abs());
        }
    }
    Ok((worst <= 1e-12, format!("max branch mismatch at x = 1: {worst:.2e}")))
}

fn oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let params = |rng: &mut ChaCha8Rng| {
        ModelParams::new(rng.gen_range(0.2..3.0), rng.gen_range(-1.5..1.5), rng.gen_range(1..=12))
    };
    let mut cs_worst: f64 = 0.0;
    for _ in 0..20 {
        let p = params(&mut rng)?;
        let phi = if rng.gen_bool(0.5) { 0.0 } else { PI };
        let pt = PhasePoint::new(rng.gen_range(-3.0..3.0), 0.0, rng.gen_range(0.0..3.0), phi);
        let spec = oracle_spec(&p, &pt, None);
        let e = cs_expectation_oracle(&p, pt.alpha(), pt.zeta(), Observable::Hamiltonian, &spec)?;
        cs_worst = cs_worst.max((e - cs_energy_surface(&p, &pt)).abs());
    }
    let mut sas_worst: f64 = 0.0;
    for i in 0..20 {
        let p = params(&mut rng)?;
        let parity = if i % 2 == 0 { Parity::Even } else { Parity::Odd };
        let phi = if rng.gen_bool(0.5) { 0.0 } else { PI };
        let pt = PhasePoint::new(rng.gen_range(-3.0..3.0), 0.0, rng.gen_range(-1.4..1.4), phi);
        let spec = oracle_spec(&p, &pt, Some(parity));
        let e = cs_expectation_oracle(&p, pt.alpha(), pt.zeta(), Observable::Hamiltonian, &spec)?;
        sas_worst = sas_worst.max((e - sas_energy_surface(&p, &pt, parity)?).abs());
    }
    let mut eig_worst: f64 = 0.0;
    let mut cases = 0;
    while cases < 30 {
        let n: u32 = rng.gen_range(1..=10);
        let nu_max: u32 = rng.gen_range(2..=(1000 / (n + 1)));
        let p = ModelParams::new(rng.gen_range(0.2..3.0), rng.gen_range(0.0..1.5), n)?;
        let sector = if rng.gen_bool(0.5) { Parity::Even } else { Parity::Odd };
        let h = build_hamiltonian(&p, &HilbertSpec::for_params(&p, nu_max, Some(sector)))?;
        if h.dim() > 500 || h.dim() < 3 {
            continue;
        }
        cases += 1;
        let dense = dense_lowest(&h, 2)?;
        let iter = iterative_lowest(&h, 2, 1e-11)?;
        for (d, i) in dense.iter().zip(&iter) {
            eig_worst = eig_worst.max((d.energy - i.energy).abs());
        }
    }
    Ok((
        cs_worst <= 1e-10 && sas_worst <= 1e-8 && eig_worst <= 1e-10,
        format!("cs oracle {cs_worst:.2e} (1e-10), projected oracle {sas_worst:.2e} (1e-8), lanczos vs dense {eig_worst:.2e} (1e-10)"),
    ))
}

fn universal() -> Outcome {
    let mut identity: f64 = 0.0;
    for n in [1u32, 20, 60, 500] {
        for g in linspace(0.5001, 3.0, 40) {
            let p = ModelParams::new(1.0, g, n)?;
            let c = cs_critical_points(&p).phi_zero;
            identity = identity.max((universal_curve(c.theta_c, 1.0, 0.0)? - c.q_c / p.n().sqrt()).abs());
        }
    }
    let gammas = linspace(0.6, 1.5, 10);
    let dist: Vec<f64> = gammas
        .par_iter()
        .map(|&g| -> anyhow::Result<f64> {
            let p = ModelParams::new(1.0, g, 60)?;
            let (pair, report) = converged_ground(&p, Parity::Even, 1e-10)?;
            let basis = Basis::new(HilbertSpec::for_params(&p, report.nu_max_used, Some(Parity::Even)));
            let pt = correspondence_map(
                basis.photon_mean(&pair.vector),
                basis.jz_mean(&pair.vector),
                p.j(),
                PhiBranch::Zero,
            )?;
            Ok((pt.q / p.n().sqrt() - universal_curve(pt.theta, 1.0, 0.0)?).abs())
        })
        .collect::<anyhow::Result<_>>()?;
    let monotone = dist.windows(2).all(|w| w[1] < w[0]);
    Ok((
        identity <= 1e-12 && monotone,
        format!(
            "identity {identity:.2e} (1e-12); N=60 distance {:.5} -> {:.5} over gamma 0.6..1.5, monotone: {monotone}",
            dist[0],
            dist[dist.len() - 1]
        ),
    ))
}

fn dynamics() -> Outcome {
    let p = ModelParams::new(1.0, gamma_for_rabi_ratio(1.0, 1, 1.0)?, 1)?;
    let spec = EvolutionSpec::excited_vacuum(1, 20.0 * PI, 4001, true);
    let run = evolve(&p, &spec)?;
    let rabi_err = run
        .times
        .iter()
        .zip(&run.p_excited)
        .map(|(t, pe)| (pe - t.cos().powi(2)).abs())
        .fold(0.0, f64::max);
    let strong = ModelParams::new(1.0, gamma_for_rabi_ratio(1.0, 1, 1.0)?, 1)?;
    let weak = ModelParams::new(1.0, gamma_for_rabi_ratio(1.0, 1, 19.0)?, 1)?;
    let (big, small) = rwa_deviation(&strong, &weak, &EvolutionSpec::excited_vacuum(1, 10.0, 1001, false))?;
    let ratio = big / small;
    Ok((
        rabi_err <= 1e-6 && ratio >= DEVIATION_RATIO,
        format!(
            "RWA vs cos^2 over 10 periods: {rabi_err:.2e} (1e-6); full-vs-RWA gap {big:.4} at ratio 1, {small:.2e} at ratio 19, factor {ratio:.1} (>= {DEVIATION_RATIO})"
        ),
    ))
}

fn spectrum(p: &ModelParams, nu_max: u32, sector: Option<Parity>) -> anyhow::Result<Vec<f64>> {
    let h = build_hamiltonian(p, &HilbertSpec::for_params(p, nu_max, sector))?;
    Ok(dense_lowest(&h, h.dim())?.into_iter().map(|e| e.energy).collect())
}

fn parity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut comm: f64 = 0.0;
    let mut union: f64 = 0.0;
    for _ in 0..20 {
        let n: u32 = rng.gen_range(1..=8);
        let nu_max: u32 = rng.gen_range(1..=(200 / (n + 1) - 1));
        let p = ModelParams::new(rng.gen_range(0.2..3.0), rng.gen_range(-1.5..1.5), n)?;
        let spec = HilbertSpec::for_params(&p, nu_max, None);
        let h = build_hamiltonian(&p, &spec)?;
        comm = comm.max(parity_commutator_check(&p, &spec)? / h.max_abs());
        let mut both = spectrum(&p, nu_max, Some(Parity::Even))?;
        both.extend(spectrum(&p, nu_max, Some(Parity::Odd))?);
        both.sort_by(f64::total_cmp);
        let full = spectrum(&p, nu_max, None)?;
        if both.len() != full.len() {
            return Ok((false, format!("sector dimensions do not add up for {p:?}")));
        }
        for (a, b) in both.iter().zip(&full) {
            union = union.max((a - b).abs());
        }
    }
    Ok((
        comm <= 1e-15 && union <= 1e-12,
        format!("commutator / max|H| {comm:.2e} (1e-15); sector union vs full spectrum {union:.2e} (1e-12)"),
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("separatrix", separatrix),
        ("exact ground-state exponent", || {
            exact_exponent(Method::ExactEven, 1.0 / 3.0)
        }),
        ("first-excited exponent", || exact_exponent(Method::ExactOdd, 2.0 / 5.0)),
        ("projected-state transition", sas),
        ("variational ordering", ordering),
        ("continuity at x = 1", continuity),
        ("oracle equivalences", oracles),
        ("universal curve", universal),
        ("dynamics", dynamics),
        ("parity", parity),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (ok, detail) = match check() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e:#}")),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "{} [{}] {name}: {detail} ({:.1}s)",
            if ok { "PASS" } else { "FAIL" },
            k + 1,
            start.elapsed().as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
