//! Orchestration for the command-line runs: compute everything first, format to
//! deterministic CSV, then write files and a manifest in one pass at the end so
//! a failing run leaves no partial outputs.

use rayon::prelude::*;

use crate::circuit::derive;
use crate::config::LoadedConfig;
use crate::error::{Error, Result};
use crate::fock::compare_rwa;
use crate::kerr::{effective_mode_hamiltonian, kerr_parameters};
use crate::lattice::{
    coupling_strengths, diagonalize_chain, diagonalize_sector, Boundary, BoseHubbardModel,
};
use crate::modes::{build_modes, junction_current_variance, line_current_variance_profile};
use crate::spectrum::{assemble_sweep, log_grid, solve_spectrum, SweepPoint};

/// Relative deviation above which the oracle check counts as a mismatch.
pub const RWA_TOL: f64 = 0.05;

pub struct RunOutput {
    /// (basename, contents) pairs, written only after the whole run succeeds.
    pub files: Vec<(String, String)>,
    pub summary: String,
    /// A verification verdict to raise after the evidence files are written.
    pub failure: Option<Error>,
}

impl RunOutput {
    fn new(files: Vec<(String, String)>, summary: String) -> Self {
        RunOutput {
            files,
            summary,
            failure: None,
        }
    }
}

/// All numeric CSV fields use 12 significant digits.
fn num(x: f64) -> String {
    format!("{x:.11e}")
}

fn header(cfg: &LoadedConfig, what: &str, columns: &[&str]) -> String {
    format!(
        "# kerrline {} v{}\n# config sha256: {}\n{}\n",
        what,
        env!("CARGO_PKG_VERSION"),
        cfg.sha256,
        columns.join(",")
    )
}

pub fn run_spectrum(cfg: &LoadedConfig) -> Result<RunOutput> {
    let p = cfg.config.point_params()?;
    let d = derive(&p)?;
    let res = solve_spectrum(&p, cfg.config.n_modes)?;
    let mut csv = header(
        cfg,
        "spectrum",
        &["mode", "omega_rad_per_s", "freq_Hz", "u", "residual"],
    );
    let mut summary = format!("spectrum at I_c = {} A: {} modes\n", p.i_c, res.omegas.len());
    for (i, (&omega, &r)) in res.omegas.iter().zip(&res.residuals).enumerate() {
        let u = omega * p.length / (2.0 * d.v);
        let freq = omega / crate::constants::TWO_PI;
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            i + 1,
            num(omega),
            num(freq),
            num(u),
            num(r)
        ));
        summary.push_str(&format!("  mode {}: {:.6} GHz\n", i + 1, freq / 1e9));
    }
    summary.push_str(&format!(
        "  plasma frequency: {:.6} GHz (nearest: mode {})\n",
        d.omega_p / crate::constants::TWO_PI / 1e9,
        res.plasma_branch_index + 1
    ));
    Ok(RunOutput::new(
        vec![("spectrum.csv".into(), csv)],
        summary,
    ))
}

pub fn run_sweep(cfg: &LoadedConfig) -> Result<RunOutput> {
    let grid = cfg.config.sweep_grid()?;
    let n_modes = cfg.config.n_modes;
    let base = cfg.config.params_at(1.0);
    let points: Vec<SweepPoint> = grid
        .par_iter()
        .enumerate()
        .map(|(index, &i_c)| {
            solve_spectrum(&base.with_i_c(i_c), n_modes)
                .map(|spectrum| SweepPoint { i_c, spectrum })
                .map_err(|e| Error::SweepPoint {
                    index,
                    i_c,
                    source: Box::new(e),
                })
        })
        .collect::<Result<Vec<_>>>()?;
    let sweep = assemble_sweep(points, n_modes);
    let mut csv = header(
        cfg,
        "sweep",
        &["I_c_A", "mode", "omega_rad_per_s", "freq_Hz", "residual"],
    );
    for pt in &sweep.points {
        for (i, (&omega, &r)) in pt
            .spectrum
            .omegas
            .iter()
            .zip(&pt.spectrum.residuals)
            .enumerate()
        {
            csv.push_str(&format!(
                "{},{},{},{},{}\n",
                num(pt.i_c),
                i + 1,
                num(omega),
                num(omega / crate::constants::TWO_PI),
                num(r)
            ));
        }
    }
    let mut gaps = header(
        cfg,
        "branch gaps",
        &["lower_branch", "min_gap_rad_per_s", "at_I_c_A", "at_index"],
    );
    let mut summary = format!(
        "sweep: {} points, {} modes each\n",
        sweep.points.len(),
        n_modes
    );
    for g in &sweep.branch_gaps {
        gaps.push_str(&format!(
            "{},{},{},{}\n",
            g.lower_branch + 1,
            num(g.min_gap),
            num(g.at_i_c),
            g.at_index
        ));
    }
    if let Some(g) = sweep.branch_gaps.first() {
        summary.push_str(&format!(
            "  min gap between modes 1 and 2: {:.4} GHz at I_c = {:.4e} A\n",
            g.min_gap / crate::constants::TWO_PI / 1e9,
            g.at_i_c
        ));
    }
    Ok(RunOutput::new(
        vec![("sweep.csv".into(), csv), ("gaps.csv".into(), gaps)],
        summary,
    ))
}

pub fn run_modes(cfg: &LoadedConfig) -> Result<RunOutput> {
    let p = cfg.config.point_params()?;
    let ms = build_modes(&p, cfg.config.n_modes)?;
    let mut csv = header(
        cfg,
        "modes",
        &[
            "mode",
            "omega_rad_per_s",
            "freq_Hz",
            "k_per_m",
            "delta_f",
            "eta_F",
            "phi_zp_Wb",
            "lambda",
        ],
    );
    for m in &ms.modes {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            m.n,
            num(m.omega),
            num(m.omega / crate::constants::TWO_PI),
            num(m.k),
            num(m.delta_f),
            num(m.eta),
            num(m.phi_zp),
            num(m.lambda)
        ));
    }
    let summary = format!(
        "modes at I_c = {} A: {} modes, truncation bound {:.3e} ({})\n  lambda_1 = {:.6}, eta_1 = {:.4e} F\n",
        p.i_c,
        ms.modes.len(),
        ms.truncation_bound,
        if ms.converged { "converged" } else { "NOT converged" },
        ms.modes[0].lambda,
        ms.modes[0].eta
    );
    Ok(RunOutput::new(vec![("modes.csv".into(), csv)], summary))
}

pub fn run_current_profile(
    cfg: &LoadedConfig,
    n_photons: usize,
    n_cutoff: Option<usize>,
    points: usize,
) -> Result<RunOutput> {
    if points < 3 {
        return Err(Error::InvalidParameter {
            field: "points",
            message: "profile needs at least 3 positions".into(),
        });
    }
    let p = cfg.config.point_params()?;
    let ms = build_modes(&p, cfg.config.n_modes)?;
    let n_cut = n_cutoff.unwrap_or(ms.modes.len());
    let half = 0.5 * p.length;
    let xs = crate::spectrum::linear_grid(-half, half, points);
    let profile = line_current_variance_profile(&ms, &xs, n_photons, n_cut)?;
    let junction = junction_current_variance(&ms, n_photons)?;
    let mut csv = header(cfg, "current profile", &["x_m", "delta_I_A"]);
    for (x, di) in xs.iter().zip(&profile) {
        csv.push_str(&format!("{},{}\n", num(*x), num(*di)));
    }
    let peak = profile.iter().copied().fold(0.0, f64::max);
    let summary = format!(
        "current fluctuations with n = {n_photons} photons in mode 1, {n_cut} modes kept\n  junction: delta I = {junction:.6e} A\n  line peak: delta I = {peak:.6e} A\n",
    );
    Ok(RunOutput::new(
        vec![("current_profile.csv".into(), csv)],
        summary,
    ))
}

pub fn run_kerr(cfg: &LoadedConfig) -> Result<RunOutput> {
    let n_modes = cfg.config.n_modes;
    let base = cfg.config.params_at(1.0);
    let grid = match cfg.config.sweep_grid() {
        Ok(g) => g,
        Err(_) => vec![cfg.config.point_params()?.i_c],
    };
    let rows: Vec<(f64, crate::kerr::KerrResult)> = grid
        .par_iter()
        .enumerate()
        .map(|(index, &i_c)| {
            build_modes(&base.with_i_c(i_c), n_modes)
                .and_then(|ms| kerr_parameters(&ms))
                .map(|k| (i_c, k))
                .map_err(|e| Error::SweepPoint {
                    index,
                    i_c,
                    source: Box::new(e),
                })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut csv = header(
        cfg,
        "kerr",
        &[
            "I_c_A",
            "omega_1_rad_per_s",
            "delta_omega_rad_per_s",
            "U_rad_per_s",
            "product_factor",
            "truncation_bound",
        ],
    );
    for (i_c, k) in &rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            num(*i_c),
            num(k.omega_1),
            num(k.delta_omega),
            num(k.self_kerr),
            num(k.product_factor),
            num(k.truncation_bound)
        ));
    }
    let peak = rows
        .iter()
        .max_by(|a, b| a.1.self_kerr.total_cmp(&b.1.self_kerr))
        .expect("grid is never empty");
    let summary = format!(
        "kerr over {} point(s), {} modes\n  U/2pi peaks at {:.4} MHz for I_c = {:.4e} A (shift {:.4} MHz)\n",
        rows.len(),
        n_modes,
        peak.1.self_kerr / crate::constants::TWO_PI / 1e6,
        peak.0,
        peak.1.delta_omega / crate::constants::TWO_PI / 1e6
    );
    Ok(RunOutput::new(vec![("kerr.csv".into(), csv)], summary))
}

pub fn run_verify_kerr(cfg: &LoadedConfig, points: usize, tol: f64) -> Result<RunOutput> {
    if points == 0 {
        return Err(Error::InvalidParameter {
            field: "points",
            message: "need at least one verification point".into(),
        });
    }
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::InvalidParameter {
            field: "tol",
            message: "tolerance must lie in (0, 1)".into(),
        });
    }
    let n_modes = cfg.config.n_modes;
    let base = cfg.config.params_at(1.0);
    let grid = match cfg.config.sweep {
        Some(s) => log_grid(s.i_c_min, s.i_c_max, points),
        None => vec![cfg.config.point_params()?.i_c],
    };
    let oracle_modes = n_modes.min(3);
    let mut cutoffs = vec![cfg.config.fock_cutoff];
    cutoffs.resize(oracle_modes, 4);
    let rows: Vec<(f64, crate::fock::RwaComparison)> = grid
        .par_iter()
        .enumerate()
        .map(|(index, &i_c)| {
            build_modes(&base.with_i_c(i_c), n_modes)
                .and_then(|ms| compare_rwa(&ms, &cutoffs, 3))
                .map(|c| (i_c, c))
                .map_err(|e| Error::SweepPoint {
                    index,
                    i_c,
                    source: Box::new(e),
                })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut csv = header(
        cfg,
        "kerr verification",
        &[
            "I_c_A",
            "U_rwa_rad_per_s",
            "U_oracle_rad_per_s",
            "U_rel_dev",
            "shift_rwa_rad_per_s",
            "shift_oracle_rad_per_s",
            "shift_rel_dev",
            "min_overlap",
            "cutoff_convergence",
        ],
    );
    let mut summary = format!(
        "oracle check: {} point(s), cutoffs {:?}, tolerance {:.0}%\n",
        rows.len(),
        cutoffs,
        tol * 100.0
    );
    let mut worst: (f64, f64) = (0.0, 0.0);
    for (i_c, c) in &rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            num(*i_c),
            num(c.rwa_u),
            num(c.oracle_u),
            num(c.u_rel_dev),
            num(c.rwa_shift),
            num(c.oracle_shift),
            num(c.shift_rel_dev),
            num(c.min_overlap),
            num(c.convergence)
        ));
        summary.push_str(&format!(
            "  I_c = {:.4e} A: U dev {:.3}%, shift dev {:.3}%, overlap {:.4}\n",
            i_c,
            c.u_rel_dev * 100.0,
            c.shift_rel_dev * 100.0,
            c.min_overlap
        ));
        if c.u_rel_dev > worst.0 {
            worst.0 = c.u_rel_dev;
        }
        if c.shift_rel_dev > worst.1 {
            worst.1 = c.shift_rel_dev;
        }
    }
    let failure = if worst.0 > tol || worst.1 > tol {
        Some(Error::OracleMismatch(format!(
            "worst deviations: U {:.3}%, shift {:.3}% (tolerance {:.0}%)",
            worst.0 * 100.0,
            worst.1 * 100.0,
            tol * 100.0
        )))
    } else {
        summary.push_str("  all points within tolerance\n");
        None
    };
    Ok(RunOutput {
        files: vec![("verify_kerr.csv".into(), csv)],
        summary,
        failure,
    })
}

pub fn run_coupling(cfg: &LoadedConfig) -> Result<RunOutput> {
    let p = cfg.config.point_params()?;
    let ms = build_modes(&p, cfg.config.n_modes)?;
    let cpl = coupling_strengths(&ms);
    let mut csv = header(
        cfg,
        "coupling",
        &["mode", "omega_rad_per_s", "eta_F", "g_rad_per_s"],
    );
    for (i, m) in ms.modes.iter().enumerate() {
        csv.push_str(&format!(
            "{},{},{},{}\n",
            m.n,
            num(m.omega),
            num(cpl.eta[i]),
            num(cpl.g[i])
        ));
    }
    let mut summary = format!(
        "coupling for C_c = {:.4e} F: g_1/2pi = {:.4} MHz\n",
        p.c_c,
        cpl.g[0] / crate::constants::TWO_PI / 1e6
    );
    if cpl.zero_coupling {
        summary.push_str("  warning: C_c = 0, the chain is uncoupled\n");
    }
    if cpl.strong_coupling_warning {
        summary.push_str(&format!(
            "  warning: C_c/eta_1 = {:.3} exceeds {}, single-mode mapping unreliable\n",
            cpl.c_c_over_eta1,
            crate::lattice::STRONG_COUPLING_RATIO
        ));
    }
    Ok(RunOutput::new(vec![("coupling.csv".into(), csv)], summary))
}

#[allow(clippy::too_many_arguments)]
pub fn run_lattice(
    cfg: &LoadedConfig,
    sites: usize,
    cutoff: usize,
    sector: Option<usize>,
    periodic: bool,
) -> Result<RunOutput> {
    let p = cfg.config.point_params()?;
    let ms = build_modes(&p, cfg.config.n_modes)?;
    let eff = effective_mode_hamiltonian(&ms)?;
    let cpl = coupling_strengths(&ms);
    let boundary = if periodic {
        Boundary::Periodic
    } else {
        Boundary::Open
    };
    let model = BoseHubbardModel::from_parts(&eff, cpl.g[0], sites, boundary)?;
    let energies = match sector {
        Some(n_total) => diagonalize_sector(&model, n_total, cutoff.saturating_sub(1))?,
        None => diagonalize_chain(&model, cutoff)?,
    };
    let mut csv = header(cfg, "lattice", &["index", "energy_rad_per_s"]);
    for (i, e) in energies.iter().enumerate() {
        csv.push_str(&format!("{},{}\n", i, num(*e)));
    }
    let mut summary = format!(
        "Bose-Hubbard chain: {} sites ({}), omega_eff/2pi = {:.6} GHz, U/2pi = {:.4} MHz, g/2pi = {:.4} MHz\n",
        sites,
        if periodic { "periodic" } else { "open" },
        model.omega / crate::constants::TWO_PI / 1e9,
        model.u / crate::constants::TWO_PI / 1e6,
        model.g / crate::constants::TWO_PI / 1e6
    );
    match sector {
        Some(n) => summary.push_str(&format!(
            "  sector N = {}: {} states, lowest energy {:.6e} rad/s\n",
            n,
            energies.len(),
            energies[0]
        )),
        None => summary.push_str(&format!(
            "  full chain: {} states, ground energy {:.6e} rad/s\n",
            energies.len(),
            energies[0]
        )),
    }
    if cpl.zero_coupling {
        summary.push_str("  warning: C_c = 0, the chain is uncoupled\n");
    }
    if cpl.strong_coupling_warning {
        summary.push_str("  warning: C_c rivals eta_1, single-mode mapping unreliable\n");
    }
    Ok(RunOutput::new(vec![("lattice.csv".into(), csv)], summary))
}

fn manifest_timestamp() -> String {
    let from_env = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.parse::<i64>().ok())
        .and_then(|secs| chrono::DateTime::<chrono::Utc>::from_timestamp(secs, 0));
    from_env
        .unwrap_or_else(chrono::Utc::now)
        .to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

fn sha256_hex(bytes: &[u8]) -> String {
    use sha2::Digest;
    format!("{:x}", sha2::Sha256::digest(bytes))
}

/// Write the run's files plus `manifest.json` into `out_dir`.
pub fn write_outputs(out_dir: &str, run: &RunOutput, cfg: &LoadedConfig, command: &str) -> Result<()> {
    std::fs::create_dir_all(out_dir)?;
    let dir = std::path::Path::new(out_dir);
    for (name, contents) in &run.files {
        std::fs::write(dir.join(name), contents)?;
    }
    let outputs: std::collections::BTreeMap<&str, serde_json::Value> = run
        .files
        .iter()
        .map(|(n, contents)| {
            (
                n.as_str(),
                serde_json::json!({
                    "bytes": contents.len(),
                    "sha256": sha256_hex(contents.as_bytes()),
                }),
            )
        })
        .collect();
    let manifest = serde_json::json!({
        "command": command,
        "config": cfg.path,
        "config_sha256": cfg.sha256,
        "generated": manifest_timestamp(),
        "outputs": outputs,
        "tool": "kerrline",
        "version": env!("CARGO_PKG_VERSION"),
    });
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    std::fs::write(dir.join("manifest.json"), text)?;
    Ok(())
}
