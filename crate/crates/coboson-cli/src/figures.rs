//! Figure-reproduction presets: the exact parameter sets of the source
//! figures, one CSV per panel plus one manifest per preset.

use std::path::{Path, PathBuf};

use serde_json::json;

use coboson::observables::{
    counting, dos, fit_fd, populations, uniform_degeneracy, PAIR_MODE_MARGIN,
};
use coboson::spectrum::{purity, OccupationSpectrum};
use coboson::symfun::{chi_fermi_dp, ratio_at};

use crate::commands::{
    density_profile_table, density_run, density_summary_row, density_summary_table, parse_values,
    AppError,
};
use crate::output::{emit_set, fmt, fmt_usize, Manifest, Table};

type AppResult<T> = Result<T, AppError>;

const SWEEP: &str = "0.01:0.99:200";
const TAIL_TOL: f64 = 1e-12;

pub fn run_preset(preset: u8, outdir: &Path) -> AppResult<()> {
    match preset {
        1 => preset_1(outdir),
        2 => preset_2(outdir),
        3 => preset_3(outdir),
        4 => preset_4(outdir),
        5 => preset_5(outdir),
        other => Err(AppError::Usage(format!(
            "preset must lie in 1..=5, got {other}"
        ))),
    }
}

/// Normalization ratio vs z_x (and vs the linear entropy) for
/// N ∈ {1, 2, 5, 10, 15, 20, 150}.
fn preset_1(outdir: &Path) -> AppResult<()> {
    let pair_counts = [1usize, 2, 5, 10, 15, 20, 150];
    let zxs = parse_values(SWEEP)?;
    let max_pairs = 150;
    let mut table = Table::new(&["zx", "N", "ratio", "lower", "upper", "SL"]);
    for &zx in &zxs {
        let spectrum = OccupationSpectrum::build_with_min_modes(
            &[zx],
            TAIL_TOL,
            max_pairs + 1 + PAIR_MODE_MARGIN,
        )?;
        let chis = chi_fermi_dp(&spectrum, max_pairs + 1);
        let p = purity(&[zx])?;
        for &n in &pair_counts {
            table.push(vec![
                fmt(zx),
                fmt_usize(n),
                fmt(ratio_at(&chis, n + 1)?),
                fmt(1.0 - n as f64 * p),
                fmt(1.0 - p),
                fmt(1.0 - p),
            ]);
        }
    }
    let manifest = Manifest::new(
        "figure --preset 1",
        json!({"zx_sweep": SWEEP, "pairs": pair_counts}),
    )
    .with_tolerances(json!({"tail_tol": TAIL_TOL}));
    emit_set(
        &[(outdir.join("fig1_ratio.csv"), &table)],
        manifest,
        &outdir.join("fig1.meta.json"),
    )?;
    Ok(())
}

/// Populations of modes j ∈ {0..6, 10, 20} vs z_x for N = 5 and N = 10.
fn preset_2(outdir: &Path) -> AppResult<()> {
    let modes = [0usize, 1, 2, 3, 4, 5, 6, 10, 20];
    let zxs = parse_values(SWEEP)?;
    let mut files: Vec<(PathBuf, Table)> = Vec::new();
    for n_pairs in [5usize, 10] {
        let mut table = Table::new(&["zx", "mode", "population"]);
        for &zx in &zxs {
            let spectrum = OccupationSpectrum::build_with_min_modes(
                &[zx],
                TAIL_TOL,
                (n_pairs + PAIR_MODE_MARGIN).max(21),
            )?;
            let profile = populations(&spectrum, n_pairs)?;
            for &mode in &modes {
                table.push(vec![
                    fmt(zx),
                    fmt_usize(mode),
                    fmt(profile.populations()[mode]),
                ]);
            }
        }
        files.push((
            outdir.join(format!("fig2_populations_n{n_pairs}.csv")),
            table,
        ));
    }
    let manifest = Manifest::new(
        "figure --preset 2",
        json!({"zx_sweep": SWEEP, "pairs": [5, 10], "modes": modes}),
    )
    .with_tolerances(json!({"tail_tol": TAIL_TOL}));
    let refs: Vec<(PathBuf, &Table)> = files.iter().map(|(p, t)| (p.clone(), t)).collect();
    emit_set(&refs, manifest, &outdir.join("fig2.meta.json"))?;
    Ok(())
}

/// DOS at z_x ∈ {0.1, 0.6, 0.85, 0.95, 0.99} and the Fermi-Dirac fit
/// parameters across z_x, for N = 10 and N = 100.
fn preset_3(outdir: &Path) -> AppResult<()> {
    let dos_zx = [0.1f64, 0.6, 0.85, 0.95, 0.99];
    let fit_sweep = "0.05:0.99:48";
    let fit_zx = parse_values(fit_sweep)?;
    let mut files: Vec<(PathBuf, Table)> = Vec::new();
    for n_pairs in [10usize, 100] {
        let mut dos_table = Table::new(&["zx", "mode", "population", "dos"]);
        for &zx in &dos_zx {
            let spectrum = OccupationSpectrum::build_with_min_modes(
                &[zx],
                TAIL_TOL,
                n_pairs + PAIR_MODE_MARGIN,
            )?;
            let profile = populations(&spectrum, n_pairs)?;
            let g = uniform_degeneracy(profile.len());
            let dos_values = dos(&profile, &g)?;
            for (j, (n, d)) in profile.populations().iter().zip(&dos_values).enumerate() {
                dos_table.push(vec![fmt(zx), fmt_usize(j), fmt(*n), fmt(*d)]);
            }
        }
        files.push((outdir.join(format!("fig3_dos_n{n_pairs}.csv")), dos_table));

        let mut fit_table = Table::new(&["zx", "j_mu", "t_eff", "residual", "converged"]);
        for &zx in &fit_zx {
            let spectrum = OccupationSpectrum::build_with_min_modes(
                &[zx],
                TAIL_TOL,
                n_pairs + PAIR_MODE_MARGIN,
            )?;
            let profile = populations(&spectrum, n_pairs)?;
            let g = uniform_degeneracy(profile.len());
            let dos_values = dos(&profile, &g)?;
            let fit = fit_fd(&dos_values, &g)?;
            fit_table.push(vec![
                fmt(zx),
                fmt(fit.j_mu),
                fmt(fit.t_eff),
                fmt(fit.residual),
                fit.converged.to_string(),
            ]);
        }
        files.push((outdir.join(format!("fig3_fit_n{n_pairs}.csv")), fit_table));
    }
    let manifest = Manifest::new(
        "figure --preset 3",
        json!({
            "dos_zx": dos_zx,
            "fit_zx_sweep": fit_sweep,
            "pairs": [10, 100],
            "degeneracy": "Uniform",
            "fit_model": "Fd",
        }),
    )
    .with_tolerances(json!({"tail_tol": TAIL_TOL}));
    let refs: Vec<(PathBuf, &Table)> = files.iter().map(|(p, t)| (p.clone(), t)).collect();
    emit_set(&refs, manifest, &outdir.join("fig3.meta.json"))?;
    Ok(())
}

/// Counting statistics of N = 150 pairs in the t = N lowest modes:
/// distributions at four z_x, variance across z_x, and the ratio panel.
fn preset_4(outdir: &Path) -> AppResult<()> {
    let n_pairs = 150usize;
    let panel_zx = [0.2f64, 0.5, 0.8, 0.95];
    let variance_sweep = "0.05:0.95:37";
    let mut counting_table = Table::new(&["zx", "n", "prob"]);
    for &zx in &panel_zx {
        let spectrum = OccupationSpectrum::build_with_min_modes(
            &[zx],
            TAIL_TOL,
            n_pairs + PAIR_MODE_MARGIN,
        )?;
        let dist = counting(&spectrum, n_pairs, n_pairs)?;
        for (n, &p) in dist.probs().iter().enumerate() {
            counting_table.push(vec![fmt(zx), fmt_usize(n), fmt(p)]);
        }
    }

    let mut variance_table = Table::new(&["zx", "mean", "variance"]);
    for &zx in &parse_values(variance_sweep)? {
        let spectrum = OccupationSpectrum::build_with_min_modes(
            &[zx],
            TAIL_TOL,
            n_pairs + PAIR_MODE_MARGIN,
        )?;
        let dist = counting(&spectrum, n_pairs, n_pairs)?;
        variance_table.push(vec![fmt(zx), fmt(dist.mean()), fmt(dist.variance())]);
    }

    let mut ratio_table = Table::new(&["zx", "ratio"]);
    for &zx in &parse_values(SWEEP)? {
        let spectrum = OccupationSpectrum::build_with_min_modes(
            &[zx],
            TAIL_TOL,
            n_pairs + 1 + PAIR_MODE_MARGIN,
        )?;
        let chis = chi_fermi_dp(&spectrum, n_pairs + 1);
        ratio_table.push(vec![fmt(zx), fmt(ratio_at(&chis, n_pairs + 1)?)]);
    }

    let manifest = Manifest::new(
        "figure --preset 4",
        json!({
            "pairs": n_pairs,
            "window": n_pairs,
            "panel_zx": panel_zx,
            "variance_zx_sweep": variance_sweep,
            "ratio_zx_sweep": SWEEP,
        }),
    )
    .with_tolerances(json!({"tail_tol": TAIL_TOL}));
    emit_set(
        &[
            (outdir.join("fig4_counting.csv"), &counting_table),
            (outdir.join("fig4_variance.csv"), &variance_table),
            (outdir.join("fig4_ratio.csv"), &ratio_table),
        ],
        manifest,
        &outdir.join("fig4.meta.json"),
    )?;
    Ok(())
}

/// Friedel-Wigner crossover: Coulomb density profiles for N ∈ {1, 2, 3}
/// on the weak (x0/w = 0.4) and strong (x0/w = 5) coupling branches.
fn preset_5(outdir: &Path) -> AppResult<()> {
    // γ = 1: x0 = (4g)^{1/3} and w = 3^{-1/8}, so g = (r·w)³/4 targets
    // x0/w = r.
    let width = 3f64.powf(-0.125);
    let branches = [("weak", 0.4f64), ("strong", 5.0)];
    let mut files: Vec<(PathBuf, Table)> = Vec::new();
    let mut summary = density_summary_table();
    summary.header.insert(0, "branch".to_string());
    summary.header.insert(0, "n_pairs".to_string());
    for n_pairs in [1usize, 2, 3] {
        for (branch, ratio) in branches {
            let g = (ratio * width).powi(3) / 4.0;
            let run = density_run(1.0, g, n_pairs, 2048, None, 1e-3, TAIL_TOL, true)?;
            let mut row = density_summary_row(&run);
            row.insert(0, branch.to_string());
            row.insert(0, fmt_usize(n_pairs));
            summary.push(row);
            files.push((
                outdir.join(format!("fig5_density_n{n_pairs}_{branch}.csv")),
                density_profile_table(&run.grid),
            ));
        }
    }
    files.push((outdir.join("fig5_summary.csv"), summary));
    let manifest = Manifest::new(
        "figure --preset 5",
        json!({
            "gamma": 1.0,
            "pairs": [1, 2, 3],
            "branches": {"weak": {"x0_over_width": 0.4}, "strong": {"x0_over_width": 5.0}},
            "grid_points": 2048,
            "orbital_width": width,
        }),
    )
    .with_tolerances(json!({"tail_tol": TAIL_TOL, "prominence": 1e-3}));
    let refs: Vec<(PathBuf, &Table)> = files.iter().map(|(p, t)| (p.clone(), t)).collect();
    emit_set(&refs, manifest, &outdir.join("fig5.meta.json"))?;
    Ok(())
}
