//! Figure-data computations behind each subcommand.

use std::fs;

use anyhow::{Context, Result};
use clap::Parser;
use dicke_core::coherent::{cs_critical_points, universal_curve, PhiBranch};
use dicke_core::criticality::{
    correspondence_map, fit_power_law, gamma_c_for, linspace, Method, ScanSettings, TableSettings,
};
use dicke_core::dynamics::{build_hamiltonian_rwa, evolve, gamma_for_rabi_ratio, EvolutionSpec};
use dicke_core::eigen::{converged_ground_with, GroundSettings};
use dicke_core::hilbert::{build_hamiltonian, Basis, HilbertSpec, SparseSymmetricMatrix};
use dicke_core::model::gamma_critical;
use dicke_core::sas::sas_minimize;
use dicke_core::{ModelParams, Parity};
use rayon::prelude::*;

use crate::cli::{
    describe, write_bytes, write_document, Cli, Command, DynamicsArgs, ExponentArgs, InvalidInput, MatrixArgs,
    MatrixFormat, MethodArg, OutputArgs, QuadratureArgs, ReproArgs, SectorArg, SeparatrixArgs, UniversalArgs,
};
use crate::document::{num, Cell, Document};

/// Default ladders for the exponent fits.
pub const EXACT_J_LIST: &str = "5,10,20,40,80,160";
pub const SAS_J_LIST: &str = "10:200:1";

/// Largest θ on the closed-form curve series.
const CURVE_THETA_MAX: f64 = 1.5;

fn invalid(msg: impl Into<String>) -> anyhow::Error {
    InvalidInput(msg.into()).into()
}

/// Runs any table-producing command.
pub fn compute(command: &Command) -> Result<(Document, OutputArgs)> {
    Ok(match command {
        Command::Separatrix(a) => (separatrix(a)?, a.output.clone()),
        Command::UniversalCurve(a) => (universal(a)?, a.scan.output.clone()),
        Command::QuadratureScan(a) => (quadrature(a)?, a.output.clone()),
        Command::Exponent(a) => (exponent(a)?, a.output.clone()),
        Command::Dynamics(a) => (dynamics(a)?, a.output.clone()),
        Command::Matrix(_) | Command::Repro(_) => return Err(invalid("command does not produce a table")),
    })
}

fn grid(lo: f64, hi: f64, steps: usize, what: &str) -> Result<Vec<f64>> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) || steps < 2 {
        return Err(invalid(format!("{what} range needs min < max and at least 2 steps")));
    }
    Ok(linspace(lo, hi, steps))
}

pub fn separatrix(a: &SeparatrixArgs) -> Result<Document> {
    let omegas = grid(a.omega_a_min, a.omega_a_max, a.omega_a_steps, "omega-a")?;
    let mut doc = Document::new("separatrix", &["omega_a", "gamma_c"]);
    describe(a, &mut doc);
    for w in omegas {
        doc.push(vec![w.into(), gamma_critical(w)?.into()]);
    }
    Ok(doc)
}

/// `(θ, q cos φ / √N)` for one method at one coupling. `q` follows the
/// `φ = 0` sign convention, so displaced states have `q < 0`.
fn phase_point(method: MethodArg, sector: Parity, p: &ModelParams, a: &QuadratureArgs) -> Result<(f64, f64)> {
    let root_n = p.n().sqrt();
    match method {
        MethodArg::Cs => {
            let c = cs_critical_points(p).phi_zero;
            Ok((c.theta_c, c.q_c / root_n))
        }
        MethodArg::Sas => {
            let m = sas_minimize(p, sector)?;
            Ok((m.point.theta, m.point.q * m.point.phi.cos() / root_n))
        }
        MethodArg::Exact => {
            let settings = GroundSettings {
                energy_tol: a.tol,
                nu_max_cap: a.nu_max_cap,
                ..GroundSettings::default()
            };
            let (pair, report) = converged_ground_with(p, sector, &settings)?;
            let basis = Basis::new(HilbertSpec::for_params(p, report.nu_max_used, Some(sector)));
            let pt = correspondence_map(
                basis.photon_mean(&pair.vector),
                basis.jz_mean(&pair.vector),
                p.j(),
                PhiBranch::Zero,
            )?;
            Ok((pt.theta, pt.q / root_n))
        }
    }
}

/// Method and sector rows in the order requested; CS has no sector.
fn series(a: &QuadratureArgs) -> Vec<(MethodArg, Option<SectorArg>)> {
    let mut out = Vec::new();
    for &m in &a.method {
        if m == MethodArg::Cs {
            out.push((m, None));
        } else {
            out.extend(a.sector.iter().map(|&s| (m, Some(s))));
        }
    }
    out
}

fn sector_cell(s: Option<SectorArg>) -> Cell {
    match s {
        Some(SectorArg::Even) => "even".into(),
        Some(SectorArg::Odd) => "odd".into(),
        None => "-".into(),
    }
}

fn method_cell(m: MethodArg) -> Cell {
    match m {
        MethodArg::Cs => "cs".into(),
        MethodArg::Sas => "sas".into(),
        MethodArg::Exact => "exact".into(),
    }
}

/// `(method, sector, γ, θ, q/√N)`.
type ScanPoint = (MethodArg, Option<SectorArg>, f64, f64, f64);

/// Evaluates every (series, γ) pair in parallel, in table order.
fn scan_points(a: &QuadratureArgs) -> Result<Vec<ScanPoint>> {
    let gammas = grid(a.gamma_min, a.gamma_max, a.gamma_steps, "gamma")?;
    if a.method.is_empty() || a.sector.is_empty() {
        return Err(invalid("at least one method and one sector are required"));
    }
    if !(a.tol > 0.0) {
        return Err(invalid("--tol must be positive"));
    }
    let base = ModelParams::new(a.omega_a, gammas[0], a.n_atoms)?;
    let jobs: Vec<_> = series(a)
        .into_iter()
        .flat_map(|(m, s)| gammas.iter().map(move |&g| (m, s, g)))
        .collect();
    jobs.par_iter()
        .map(|&(m, s, g)| {
            let p = base.with_gamma(g)?;
            let sector = s.map(Parity::from).unwrap_or(Parity::Even);
            let (theta, q) = phase_point(m, sector, &p, a).with_context(|| format!("method {:?} at gamma {g}", m))?;
            Ok((m, s, g, theta, q))
        })
        .collect()
}

pub fn quadrature(a: &QuadratureArgs) -> Result<Document> {
    let mut doc = Document::new("quadrature-scan", &["method", "sector", "gamma", "q_over_sqrt_n"]);
    describe(a, &mut doc);
    doc.meta("q-convention", "magnitude of q cos(phi) / sqrt(N)");
    for (m, s, g, _, q) in scan_points(a)? {
        doc.push(vec![method_cell(m), sector_cell(s), g.into(), q.abs().into()]);
    }
    Ok(doc)
}

pub fn universal(a: &UniversalArgs) -> Result<Document> {
    if a.theta_points < 2 {
        return Err(invalid("--theta-points must be at least 2"));
    }
    let mut doc = Document::new(
        "universal-curve",
        &["method", "sector", "gamma", "theta", "q_over_sqrt_n"],
    );
    describe(a, &mut doc);
    doc.meta("q-convention", "q cos(phi) / sqrt(N), displaced wells negative");
    for theta in linspace(0.0, CURVE_THETA_MAX, a.theta_points) {
        let q = universal_curve(theta, a.scan.omega_a, 0.0)?;
        doc.push(vec!["curve".into(), "-".into(), "-".into(), theta.into(), q.into()]);
    }
    for (m, s, g, theta, q) in scan_points(&a.scan)? {
        doc.push(vec![method_cell(m), sector_cell(s), g.into(), theta.into(), q.into()]);
    }
    Ok(doc)
}

/// Parses `5,10,20` and `start:stop:step` tokens into an ascending list.
pub fn parse_j_list(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for tok in text.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let parts: Vec<&str> = tok.split(':').collect();
        let parse = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| invalid(format!("bad number `{s}` in j list")))
        };
        match parts.as_slice() {
            [x] => out.push(parse(x)?),
            [a, b, c] => {
                let (start, stop, step) = (parse(a)?, parse(b)?, parse(c)?);
                if !(step > 0.0) || !(start <= stop) {
                    return Err(invalid(format!("bad range `{tok}`")));
                }
                let count = ((stop - start) / step + 1e-9).floor() as usize;
                out.extend((0..=count).map(|k| start + step * k as f64));
            }
            _ => return Err(invalid(format!("bad j list token `{tok}`"))),
        }
    }
    if out.len() < 3 {
        return Err(invalid("the j list needs at least 3 entries"));
    }
    if out.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(invalid("the j list must be strictly ascending"));
    }
    Ok(out)
}

pub fn exponent(a: &ExponentArgs) -> Result<Document> {
    let method = match (a.method, a.sector) {
        (MethodArg::Exact, SectorArg::Even) => Method::ExactEven,
        (MethodArg::Exact, SectorArg::Odd) => Method::ExactOdd,
        (MethodArg::Sas, SectorArg::Even) => Method::Sas,
        (MethodArg::Sas, SectorArg::Odd) => return Err(invalid("the sas swap is defined for the even sector")),
        (MethodArg::Cs, _) => return Err(invalid("coherent states have no finite-size shift; use exact or sas")),
    };
    let default_list = if method == Method::Sas {
        SAS_J_LIST
    } else {
        EXACT_J_LIST
    };
    let j_list = parse_j_list(a.j_list.as_deref().unwrap_or(default_list))?;
    let settings = TableSettings {
        omega_a: a.omega_a,
        scan: ScanSettings {
            delta_gamma: a.delta_gamma,
            peak_tol: a.tol.unwrap_or(ScanSettings::default().peak_tol),
            ground: GroundSettings {
                nu_max_cap: a.nu_max_cap,
                ..GroundSettings::default()
            },
            ..ScanSettings::default()
        },
        grid_points: a.grid_points,
        sas_tol: a.tol.unwrap_or(TableSettings::default().sas_tol),
        ..TableSettings::default()
    };
    let table: Vec<(f64, f64)> = j_list
        .par_iter()
        .map(|&j| {
            gamma_c_for(j, method, &settings)
                .map(|g| (j, g))
                .with_context(|| format!("j = {j}"))
        })
        .collect::<Result<_>>()?;
    let fit = fit_power_law(&table)?;

    let mut doc = Document::new("exponent", &["j", "gamma_c", "offset"]);
    describe(a, &mut doc);
    doc.meta("j-list", j_list.iter().map(|&j| num(j)).collect::<Vec<_>>().join(","))
        .meta("estimator", method.name())
        .meta_num("peak-tol", settings.scan.peak_tol)
        .meta_num("residual-tol", settings.scan.residual_tol)
        .meta_num("sas-tol", settings.sas_tol)
        .meta("max-widenings", settings.max_widenings);
    doc.summarize("exponent", num(fit.exponent))
        .summarize("intercept", num(fit.intercept))
        .summarize("amplitude", num(fit.amplitude))
        .summarize("sigma", num(fit.sigma))
        .summarize("ci95_low", num(fit.ci95.0))
        .summarize("ci95_high", num(fit.ci95.1))
        .summarize("points_used", fit.points_used)
        .summarize(
            "excluded",
            if fit.excluded.is_empty() {
                "-".to_string()
            } else {
                fit.excluded.iter().map(|&j| num(j)).collect::<Vec<_>>().join(";")
            },
        );
    for (j, g) in table {
        doc.push(vec![j.into(), g.into(), (g - 0.5).into()]);
    }
    Ok(doc)
}

pub fn dynamics(a: &DynamicsArgs) -> Result<Document> {
    let gamma = match a.gamma {
        Some(g) => g,
        None => gamma_for_rabi_ratio(a.omega_a, a.n_atoms, a.rabi_ratio)?,
    };
    let p = ModelParams::new(a.omega_a, gamma, a.n_atoms)?;
    let spec = EvolutionSpec {
        nu_max: a.nu_max,
        ..EvolutionSpec::excited_vacuum(a.n_atoms, a.duration, a.samples, false)
    };
    let rwa_spec = EvolutionSpec {
        rwa: true,
        ..spec.clone()
    };
    let (full, rwa) = rayon::join(|| evolve(&p, &spec), || evolve(&p, &rwa_spec));
    let (full, rwa) = (full?, rwa?);
    let gap = full
        .p_excited
        .iter()
        .zip(&rwa.p_excited)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);

    let mut doc = Document::new("dynamics", &["t", "p_full", "p_rwa"]);
    describe(a, &mut doc);
    doc.meta("initial-state", "all atoms excited, field vacuum")
        .meta("time-unit", "1/Omega, Omega = gamma / N^(3/2)");
    doc.summarize("gamma", num(gamma))
        .summarize("omega_rabi", num(full.omega_rabi))
        .summarize("max_gap", num(gap))
        .summarize("max_norm_error", num(full.max_norm_error.max(rwa.max_norm_error)))
        .summarize("max_energy_drift", num(full.max_energy_drift.max(rwa.max_energy_drift)))
        .summarize("max_leakage", num(full.max_leakage.max(rwa.max_leakage)));
    for ((t, pf), pr) in full.times.iter().zip(&full.p_excited).zip(&rwa.p_excited) {
        doc.push(vec![(*t).into(), (*pf).into(), (*pr).into()]);
    }
    Ok(doc)
}

pub fn build_matrix(a: &MatrixArgs) -> Result<SparseSymmetricMatrix> {
    let p = ModelParams::new(a.omega_a, a.gamma, a.n_atoms)?;
    let spec = HilbertSpec::for_params(&p, a.nu_max, a.sector.map(Parity::from));
    Ok(if a.rwa {
        build_hamiltonian_rwa(&p, &spec)?
    } else {
        build_hamiltonian(&p, &spec)?
    })
}

/// Matrix Market coordinate file with 1-based lower-triangle entries.
pub fn matrix_market(a: &MatrixArgs, h: &SparseSymmetricMatrix) -> String {
    let mut doc = Document::new("matrix", &[]);
    describe(a, &mut doc);
    let mut s = String::from("%%MatrixMarket matrix coordinate real symmetric\n% dicke-lab matrix\n");
    for (k, v) in &doc.metadata {
        s.push_str(&format!("% {k} = {v}\n"));
    }
    s.push_str(&format!("{} {} {}\n", h.dim(), h.dim(), h.entries().len()));
    for &(r, c, v) in h.entries() {
        s.push_str(&format!("{} {} {}\n", c + 1, r + 1, num(v)));
    }
    s
}

pub fn matrix(a: &MatrixArgs) -> Result<()> {
    let h = build_matrix(a)?;
    let bytes = match a.format {
        MatrixFormat::Mtx => matrix_market(a, &h).into_bytes(),
        MatrixFormat::Csv | MatrixFormat::Json => {
            let mut doc = Document::new("matrix", &["row", "col", "value"]);
            describe(a, &mut doc);
            doc.meta("dim", h.dim()).meta("storage", "upper triangle, 0-based");
            for &(r, c, v) in h.entries() {
                doc.push(vec![(r as f64).into(), (c as f64).into(), v.into()]);
            }
            let format = if a.format == MatrixFormat::Csv {
                crate::document::Format::Csv
            } else {
                crate::document::Format::Json
            };
            doc.to_bytes(format)?
        }
    };
    write_bytes(&bytes, a.out.as_deref())
}

/// File stem and arguments for each entry of the full suite.
pub fn repro_plan() -> Vec<(&'static str, Vec<&'static str>)> {
    vec![
        ("dynamics_ratio1", vec!["dynamics", "--rabi-ratio", "1"]),
        ("dynamics_ratio19", vec!["dynamics", "--rabi-ratio", "19"]),
        ("separatrix", vec!["separatrix"]),
        ("quadrature_n20", vec!["quadrature-scan", "--n-atoms", "20"]),
        (
            "universal_n20",
            vec![
                "universal-curve",
                "--n-atoms",
                "20",
                "--gamma-max",
                "1.5",
                "--gamma-steps",
                "61",
            ],
        ),
        ("quadrature_n60", vec!["quadrature-scan", "--n-atoms", "60"]),
        (
            "universal_n60",
            vec![
                "universal-curve",
                "--n-atoms",
                "60",
                "--gamma-max",
                "1.5",
                "--gamma-steps",
                "61",
            ],
        ),
        (
            "exponent_exact_even",
            vec!["exponent", "--method", "exact", "--sector", "even"],
        ),
        (
            "exponent_exact_odd",
            vec!["exponent", "--method", "exact", "--sector", "odd"],
        ),
        ("exponent_sas", vec!["exponent", "--method", "sas"]),
    ]
}

pub fn repro(a: &ReproArgs) -> Result<()> {
    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    for (stem, argv) in repro_plan() {
        let cli = Cli::try_parse_from(std::iter::once("dicke-lab").chain(argv.iter().copied()))?;
        let (doc, _) = compute(&cli.command).with_context(|| format!("producing {stem}"))?;
        let path = a.out.join(format!("{stem}.{}", a.format.extension()));
        write_document(&doc, a.format.into(), Some(&path))?;
        println!("{}", path.display());
    }
    Ok(())
}
