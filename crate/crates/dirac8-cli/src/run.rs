//! The four command runners: each resolves its inputs from the config,
//! executes the toolkit, writes artifacts in the requested formats beside
//! the resolved-config echo, and returns the process exit code.

use std::path::Path;

use serde::Serialize;

use dirac8::classify::{classify_modes, PlaneWaveMode};
use dirac8::clifford::build_gamma_set;
use dirac8::evolve::{evolve, gaussian_packet, LABEL_ORDER};
use dirac8::grid::Grid;
use dirac8::symmetry::check_coupling_scheme_with;
use dirac8::verify::{run_suite, VerifySettings};

use crate::config::{Command, RunConfig};
use crate::error::{CliError, Result, EXIT_CHECK_FAILURE, EXIT_OK};
use crate::report::{dump_complex, fmt_float, write_csv, write_json, write_text};

/// Execute the configured command, writing all artifacts into `out`.
pub fn execute(cfg: &RunConfig, out: &Path) -> Result<i32> {
    std::fs::create_dir_all(out).map_err(|e| CliError::io(out.display().to_string(), e))?;
    write_text(&out.join("config.resolved.toml"), &cfg.resolved_toml())?;
    match cfg.command {
        Command::Verify => run_verify(cfg, out),
        Command::Classify => run_classify(cfg, out),
        Command::Evolve => run_evolve(cfg, out),
        Command::Symmetries => run_symmetries(cfg, out),
    }
}

#[derive(Serialize)]
struct VerifyArtifact<'a> {
    command: &'static str,
    mass: f64,
    seed: u64,
    all_pass: bool,
    passed: usize,
    failed: usize,
    checks: &'a [dirac8::verify::CheckResult],
}

/// Run the full invariant suite; exit 0 iff every check passes.
pub fn run_verify(cfg: &RunConfig, out: &Path) -> Result<i32> {
    let settings = VerifySettings {
        mass: cfg.mass,
        seed: cfg.seed,
        overrides: cfg.tolerances.clone(),
    };
    let report = run_suite(&settings)?;
    if cfg.wants("json") {
        write_json(
            &out.join("verify.json"),
            &VerifyArtifact {
                command: "verify",
                mass: cfg.mass,
                seed: cfg.seed,
                all_pass: report.all_pass,
                passed: report.passed,
                failed: report.failed,
                checks: &report.checks,
            },
        )?;
    }
    if cfg.wants("csv") {
        let rows: Vec<Vec<String>> = report
            .checks
            .iter()
            .map(|c| {
                vec![
                    c.name.clone(),
                    fmt_float(c.residual),
                    fmt_float(c.tolerance),
                    c.pass.to_string(),
                ]
            })
            .collect();
        write_csv(
            &out.join("verify.csv"),
            &["name", "residual", "tolerance", "pass"],
            &rows,
        )?;
    }
    println!(
        "verify: {}/{} checks passed",
        report.passed,
        report.checks.len()
    );
    if let Some(first) = report.first_failure() {
        eprintln!(
            "verify FAILED: {} residual {:.3e} exceeds tolerance {:.3e} ({} failing check{})",
            first.name,
            first.residual,
            first.tolerance,
            report.failed,
            if report.failed == 1 { "" } else { "s" }
        );
        return Ok(EXIT_CHECK_FAILURE);
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct ModeArtifact {
    epsilon: i8,
    sigma: i8,
    label: &'static str,
    label_short: &'static str,
    energy: f64,
    /// Two orthonormal sector basis vectors, entries as [re, im] pairs.
    basis: [Vec<[f64; 2]>; 2],
}

#[derive(Serialize)]
struct MomentumArtifact {
    p: [f64; 3],
    modes: Vec<ModeArtifact>,
}

#[derive(Serialize)]
struct ClassifyArtifact {
    command: &'static str,
    mass: f64,
    momenta: Vec<MomentumArtifact>,
}

/// Classify every configured momentum into the four sectors.
pub fn run_classify(cfg: &RunConfig, out: &Path) -> Result<i32> {
    let momenta = cfg.resolve_momenta()?;
    let gs = build_gamma_set::<f64>();
    let mut artifact = ClassifyArtifact {
        command: "classify",
        mass: cfg.mass,
        momenta: Vec::with_capacity(momenta.len()),
    };
    let mut rows: Vec<Vec<String>> = Vec::with_capacity(momenta.len() * 4);
    for p in &momenta {
        let modes: Vec<PlaneWaveMode<f64>> = classify_modes(&gs, p, cfg.mass)?;
        let mut records = Vec::with_capacity(4);
        for mode in &modes {
            rows.push(vec![
                fmt_float(p[0]),
                fmt_float(p[1]),
                fmt_float(p[2]),
                mode.epsilon.to_string(),
                mode.sigma.to_string(),
                mode.rep_label.short().to_string(),
                fmt_float(mode.energy),
            ]);
            records.push(ModeArtifact {
                epsilon: mode.epsilon,
                sigma: mode.sigma,
                label: mode.rep_label.as_str(),
                label_short: mode.rep_label.short(),
                energy: mode.energy,
                basis: [
                    mode.basis[0].iter().map(|z| dump_complex(*z)).collect(),
                    mode.basis[1].iter().map(|z| dump_complex(*z)).collect(),
                ],
            });
        }
        artifact.momenta.push(MomentumArtifact { p: *p, modes: records });
    }
    if cfg.wants("json") {
        write_json(&out.join("classify.json"), &artifact)?;
    }
    if cfg.wants("csv") {
        write_csv(
            &out.join("classify.csv"),
            &["p1", "p2", "p3", "epsilon", "sigma", "label", "energy"],
            &rows,
        )?;
    }
    println!(
        "classify: {} momenta → {} sector rows",
        momenta.len(),
        rows.len()
    );
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct GridArtifact {
    dims: usize,
    n: usize,
    l: f64,
}

#[derive(Serialize)]
struct FinalObservables {
    time: f64,
    norm: f64,
    energy: f64,
    charge: f64,
    /// Occupations in label order Dp_s0, Dm_s0, Dp_0s, Dm_0s.
    occupations: [f64; 4],
}

#[derive(Serialize)]
struct SeriesArtifact {
    times: Vec<f64>,
    norm: Vec<f64>,
    energy: Vec<f64>,
    charge: Vec<f64>,
    occ_dp_s0: Vec<f64>,
    occ_dm_s0: Vec<f64>,
    occ_dp_0s: Vec<f64>,
    occ_dm_0s: Vec<f64>,
}

#[derive(Serialize)]
struct EvolveArtifact {
    command: &'static str,
    mass: f64,
    grid: GridArtifact,
    model: String,
    dt: f64,
    steps: usize,
    precondition: String,
    packet_sector: String,
    r#final: FinalObservables,
    series: SeriesArtifact,
}

#[derive(Serialize)]
struct SnapshotArtifact {
    grid: GridArtifact,
    mass: f64,
    time: f64,
    /// Point-major spinor components, entries as [re, im] pairs.
    values: Vec<[f64; 2]>,
}

/// Build the packet, apply the optional precondition, evolve, and write the
/// observable series (and the optional final snapshot).
pub fn run_evolve(cfg: &RunConfig, out: &Path) -> Result<i32> {
    let gs = build_gamma_set::<f64>();
    let grid = Grid::new(cfg.grid.dims, cfg.grid.n, cfg.grid.l)?;
    let packet = gaussian_packet(
        grid,
        &cfg.evolution.packet.center,
        cfg.evolution.packet.width,
        &cfg.evolution.packet.momentum,
        cfg.packet_sector()?,
        &gs,
        cfg.mass,
    )?;
    let (final_field, series) = evolve(
        &packet,
        &gs,
        cfg.model()?,
        cfg.evolution.dt,
        cfg.evolution.steps,
        cfg.precondition()?,
    )?;
    let last = series.len() - 1;
    if cfg.wants("csv") {
        let mut rows = Vec::with_capacity(series.len());
        for i in 0..series.len() {
            rows.push(vec![
                fmt_float(series.times[i]),
                fmt_float(series.norm[i]),
                fmt_float(series.energy[i]),
                fmt_float(series.charge[i]),
                fmt_float(series.sector_occupations[0][i]),
                fmt_float(series.sector_occupations[1][i]),
                fmt_float(series.sector_occupations[2][i]),
                fmt_float(series.sector_occupations[3][i]),
            ]);
        }
        let mut header: Vec<String> =
            ["t", "norm", "energy", "charge"].iter().map(|s| s.to_string()).collect();
        header.extend(LABEL_ORDER.iter().map(|l| format!("occ_{}", l.short())));
        let header: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
        write_csv(&out.join("evolve.csv"), &header, &rows)?;
    }
    if cfg.wants("json") {
        let artifact = EvolveArtifact {
            command: "evolve",
            mass: cfg.mass,
            grid: GridArtifact {
                dims: cfg.grid.dims,
                n: cfg.grid.n,
                l: cfg.grid.l,
            },
            model: cfg.evolution.model.clone(),
            dt: cfg.evolution.dt,
            steps: cfg.evolution.steps,
            precondition: cfg.evolution.precondition.clone(),
            packet_sector: cfg.evolution.packet.sector.clone(),
            r#final: FinalObservables {
                time: final_field.time,
                norm: series.norm[last],
                energy: series.energy[last],
                charge: series.charge[last],
                occupations: [
                    series.sector_occupations[0][last],
                    series.sector_occupations[1][last],
                    series.sector_occupations[2][last],
                    series.sector_occupations[3][last],
                ],
            },
            series: SeriesArtifact {
                times: series.times.clone(),
                norm: series.norm.clone(),
                energy: series.energy.clone(),
                charge: series.charge.clone(),
                occ_dp_s0: series.sector_occupations[0].clone(),
                occ_dm_s0: series.sector_occupations[1].clone(),
                occ_dp_0s: series.sector_occupations[2].clone(),
                occ_dm_0s: series.sector_occupations[3].clone(),
            },
        };
        write_json(&out.join("evolve.json"), &artifact)?;
    }
    if cfg.evolution.snapshot_final {
        let snapshot = SnapshotArtifact {
            grid: GridArtifact {
                dims: cfg.grid.dims,
                n: cfg.grid.n,
                l: cfg.grid.l,
            },
            mass: cfg.mass,
            time: final_field.time,
            values: final_field.values.iter().map(|z| dump_complex(*z)).collect(),
        };
        write_json(&out.join("snapshot.json"), &snapshot)?;
    }
    println!(
        "evolve: {} steps of {} (dt = {}) → {} recorded rows",
        cfg.evolution.steps,
        cfg.evolution.model,
        cfg.evolution.dt,
        series.len()
    );
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct HitArtifact {
    mask: u8,
    indices: Vec<usize>,
    monomial: String,
    residual: f64,
    holdout_residual: f64,
    unitarity: f64,
    /// Label action as [from, to] pairs, or null when not sector-covariant.
    label_map: Option<Vec<[&'static str; 2]>>,
    matches_expected: bool,
}

#[derive(Serialize)]
struct ContractArtifact {
    name: &'static str,
    antilinear: bool,
    momentum_signs: [i8; 3],
    target_sign: i8,
    realized: bool,
    ambiguous: bool,
    diagram_hit_masks: Vec<u8>,
    hits: Vec<HitArtifact>,
    near_misses: Vec<NearMissArtifact>,
}

#[derive(Serialize)]
struct NearMissArtifact {
    monomial: String,
    residual: f64,
}

#[derive(Serialize)]
struct SymmetriesArtifact {
    command: &'static str,
    mass: f64,
    momenta_count: usize,
    even_only: bool,
    allowed_mask: u8,
    all_realized: bool,
    missing: Vec<&'static str>,
    c_and_t_agree: bool,
    compositions_are_involutions: bool,
    contracts: Vec<ContractArtifact>,
}

/// Exhaustive monomial search for the P/C/Tᵖ intertwiners; exit 0 iff all
/// three diagram arrows are realized.
pub fn run_symmetries(cfg: &RunConfig, out: &Path) -> Result<i32> {
    let momenta = cfg.resolve_momenta()?;
    let gs = build_gamma_set::<f64>();
    let report = check_coupling_scheme_with(&gs, cfg.mass, &momenta, &cfg.search_options())?;
    let mut artifact = SymmetriesArtifact {
        command: "symmetries",
        mass: cfg.mass,
        momenta_count: momenta.len(),
        even_only: cfg.symmetries.even_only,
        allowed_mask: cfg.symmetries.allowed_mask,
        all_realized: report.all_realized,
        missing: report.missing.clone(),
        c_and_t_agree: report.c_and_t_agree,
        compositions_are_involutions: report.compositions_are_involutions,
        contracts: Vec::with_capacity(report.contracts.len()),
    };
    let mut rows: Vec<Vec<String>> = Vec::new();
    for contract in &report.contracts {
        let mut hits = Vec::with_capacity(contract.hits.len());
        for hit in &contract.hits {
            rows.push(vec![
                contract.contract.name.to_string(),
                hit.mask.to_string(),
                hit.indices
                    .iter()
                    .map(|i| i.to_string())
                    .collect::<Vec<_>>()
                    .join(" "),
                fmt_float(hit.residual),
                fmt_float(hit.holdout_residual),
                fmt_float(hit.unitarity),
                hit.matches_expected.to_string(),
            ]);
            hits.push(HitArtifact {
                mask: hit.mask,
                indices: hit.indices.clone(),
                monomial: hit.monomial.clone(),
                residual: hit.residual,
                holdout_residual: hit.holdout_residual,
                unitarity: hit.unitarity,
                label_map: hit.label_map.map(|map| {
                    dirac8::classify::RepLabel::ALL
                        .iter()
                        .zip(map.iter())
                        .map(|(from, to)| [from.as_str(), to.as_str()])
                        .collect()
                }),
                matches_expected: hit.matches_expected,
            });
        }
        artifact.contracts.push(ContractArtifact {
            name: contract.contract.name,
            antilinear: contract.contract.antilinear,
            momentum_signs: contract.contract.momentum_signs,
            target_sign: contract.contract.target_sign,
            realized: contract.realized,
            ambiguous: contract.ambiguous,
            diagram_hit_masks: contract.diagram_hit_masks.clone(),
            hits,
            near_misses: contract
                .near_misses
                .iter()
                .map(|(monomial, residual)| NearMissArtifact {
                    monomial: monomial.clone(),
                    residual: *residual,
                })
                .collect(),
        });
    }
    if cfg.wants("json") {
        write_json(&out.join("symmetries.json"), &artifact)?;
    }
    if cfg.wants("csv") {
        write_csv(
            &out.join("symmetries.csv"),
            &[
                "contract",
                "mask",
                "indices",
                "residual",
                "holdout_residual",
                "unitarity",
                "matches_expected",
            ],
            &rows,
        )?;
    }
    for contract in &report.contracts {
        println!(
            "symmetries: {} → {} hits, diagram arrow {}",
            contract.contract.name,
            contract.hits.len(),
            if contract.realized { "realized" } else { "MISSING" }
        );
    }
    if !report.all_realized {
        eprintln!(
            "symmetries FAILED: missing diagram arrows: {}",
            report.missing.join(", ")
        );
        return Ok(EXIT_CHECK_FAILURE);
    }
    Ok(EXIT_OK)
}
