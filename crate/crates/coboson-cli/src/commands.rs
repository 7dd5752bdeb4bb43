//! Subcommand implementations.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::json;

use coboson::density::{classify, peaks, profile, GridSpec, OrbitalBasis};
use coboson::observables::{
    counting, dos, fit_be, fit_fd, isotropic_2d_degeneracy, populations, uniform_degeneracy,
    FitResult, PAIR_MODE_MARGIN,
};
use coboson::oracle;
use coboson::spectrum::{
    entropies, purity, solve_equilibrium_with_threshold, z_from_anisotropy,
    z_from_curvature, z_implied_by_widths, HarmonicApprox, InteractionSpec, OccupationSpectrum,
};
use coboson::symfun::{
    chi_bose, chi_fermi_dp, chi_fermi_newton, chi_fermi_partition_table, ratio_at, ChiTable,
    PowerSums,
};

use crate::cli::{
    ChiKindArg, ChiMethodArg, Command, DegeneracyArg, FitModelArg, OracleOp, OutputArgs,
    Source,
};
use crate::output::{emit, emit_set, fmt, fmt_usize, Manifest, Table};

pub enum AppError {
    Usage(String),
    Core(coboson::Error),
    Io(std::io::Error),
    NonConverged(String),
}

impl From<coboson::Error> for AppError {
    fn from(e: coboson::Error) -> Self {
        AppError::Core(e)
    }
}

impl From<std::io::Error> for AppError {
    fn from(e: std::io::Error) -> Self {
        AppError::Io(e)
    }
}

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Usage(_) => 2,
            AppError::Core(e) => match e {
                coboson::Error::Domain(_) | coboson::Error::UnknownMode(_) => 2,
                coboson::Error::Capacity(_) => 4,
                _ => 3,
            },
            AppError::Io(_) => 1,
            AppError::NonConverged(_) => 3,
        }
    }

    pub fn message(&self) -> String {
        match self {
            AppError::Usage(m) => format!("usage error: {m}"),
            AppError::Core(e) => e.to_string(),
            AppError::Io(e) => format!("io error: {e}"),
            AppError::NonConverged(m) => format!("non-convergence: {m}"),
        }
    }
}

type AppResult<T> = Result<T, AppError>;

/// Comma list or inclusive linear sweep `start:stop:count`.
pub fn parse_values(text: &str) -> AppResult<Vec<f64>> {
    let parse_one = |s: &str| -> AppResult<f64> {
        s.trim()
            .parse::<f64>()
            .map_err(|_| AppError::Usage(format!("not a number: {s}")))
    };
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(AppError::Usage(format!(
                "sweep must be start:stop:count, got {text}"
            )));
        }
        let start = parse_one(parts[0])?;
        let stop = parse_one(parts[1])?;
        let count: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| AppError::Usage(format!("not a count: {}", parts[2])))?;
        if count < 2 {
            return Err(AppError::Usage("sweep needs at least 2 points".into()));
        }
        Ok((0..count)
            .map(|k| {
                (start * (count - 1 - k) as f64 + stop * k as f64) / (count - 1) as f64
            })
            .collect())
    } else {
        text.split(',').map(parse_one).collect()
    }
}

struct Resolved {
    zs: Vec<f64>,
    physical: Option<PhysicalInfo>,
    tail_tol: f64,
}

struct PhysicalInfo {
    gamma: f64,
    g: f64,
    x0: f64,
    mu: f64,
    valid: bool,
    z_curvature: f64,
    z_implied: f64,
}

fn resolve_source(source: &Source) -> AppResult<Resolved> {
    if let Some(zx) = source.zx {
        let mut zs = vec![zx];
        zs.extend(&source.zy);
        return Ok(Resolved {
            zs,
            physical: None,
            tail_tol: source.tail_tol,
        });
    }
    let (Some(gamma), Some(g)) = (source.gamma, source.g) else {
        return Err(AppError::Usage(
            "provide either --zx (with optional --zy) or --gamma with --g".into(),
        ));
    };
    let interaction = InteractionSpec::inverse_power(gamma, g)?;
    let approx = solve_equilibrium_with_threshold(&interaction, 2.0)?;
    let z_curvature = z_from_curvature(approx.mu)?;
    let z_implied = z_implied_by_widths(approx.mu)?;
    let mut zs = vec![z_curvature];
    for &eps in &source.epsilon {
        zs.push(z_from_anisotropy(eps)?);
    }
    Ok(Resolved {
        zs,
        physical: Some(PhysicalInfo {
            gamma,
            g,
            x0: approx.x0,
            mu: approx.mu,
            valid: approx.valid,
            z_curvature,
            z_implied,
        }),
        tail_tol: source.tail_tol,
    })
}

fn physical_json(info: &Option<PhysicalInfo>) -> serde_json::Value {
    match info {
        None => serde_json::Value::Null,
        Some(p) => json!({
            "gamma": p.gamma,
            "g": p.g,
            "x0": p.x0,
            "mu": p.mu,
            "strong_interaction_valid": p.valid,
            "z_curvature_form": p.z_curvature,
            "z_width_form": p.z_implied,
        }),
    }
}

fn label_string(label: &[u32]) -> String {
    label
        .iter()
        .map(|j| j.to_string())
        .collect::<Vec<_>>()
        .join(";")
}

pub fn run(command: Command) -> AppResult<()> {
    match command {
        Command::Approx {
            gamma,
            g,
            threshold,
            out,
        } => cmd_approx(gamma, g, threshold, &out),
        Command::Spectrum {
            source,
            min_modes,
            out,
        } => cmd_spectrum(&source, min_modes, &out),
        Command::Entropy {
            source,
            alphas,
            out,
        } => cmd_entropy(&source, &alphas, &out),
        Command::Chi {
            source,
            pairs,
            kind,
            method,
            out,
        } => cmd_chi(&source, pairs, kind, method, &out),
        Command::Ratio {
            zx_sweep,
            zy,
            pairs,
            tail_tol,
            out,
        } => cmd_ratio(&zx_sweep, &zy, &pairs, tail_tol, &out),
        Command::Populations {
            source,
            pairs,
            zx_sweep,
            modes,
            out,
        } => cmd_populations(&source, pairs, zx_sweep.as_deref(), &modes, &out),
        Command::Dos {
            zx,
            pairs,
            degeneracy,
            fit,
            tail_tol,
            out,
        } => cmd_dos(&zx, pairs, degeneracy, &fit, tail_tol, &out),
        Command::Fit {
            model,
            input,
            filter,
            planted,
            out,
        } => cmd_fit(model, input.as_deref(), filter.as_deref(), planted.as_deref(), &out),
        Command::Counting {
            source,
            pairs,
            t,
            zx_sweep,
            out,
        } => cmd_counting(&source, pairs, t, zx_sweep.as_deref(), &out),
        Command::Density {
            gamma,
            g,
            pairs,
            points,
            half_width,
            prominence,
            tail_tol,
            skip_validation,
            output,
        } => cmd_density(
            gamma,
            &g,
            pairs,
            points,
            half_width,
            prominence,
            tail_tol,
            skip_validation,
            &output,
        ),
        Command::Figure { preset, outdir } => crate::figures::run_preset(preset, &outdir),
        Command::Oracle { op } => cmd_oracle(op),
    }
}

fn cmd_approx(gamma: f64, g: f64, threshold: f64, out: &OutputArgs) -> AppResult<()> {
    let interaction = InteractionSpec::inverse_power(gamma, g)?;
    let approx = solve_equilibrium_with_threshold(&interaction, threshold)?;
    let z_curvature = z_from_curvature(approx.mu)?;
    let z_implied = z_implied_by_widths(approx.mu)?;
    let mut table = Table::new(&[
        "gamma",
        "g",
        "x0",
        "mu",
        "z_curvature_form",
        "z_width_form",
        "strong_interaction_valid",
    ]);
    table.push(vec![
        fmt(gamma),
        fmt(g),
        fmt(approx.x0),
        fmt(approx.mu),
        fmt(z_curvature),
        fmt(z_implied),
        approx.valid.to_string(),
    ]);
    let manifest = Manifest::new(
        "approx",
        json!({"gamma": gamma, "g": g, "threshold_x0": threshold}),
    );
    emit(&table, out.format, out.output.as_deref(), manifest)?;
    Ok(())
}

fn cmd_spectrum(source: &Source, min_modes: Option<usize>, out: &OutputArgs) -> AppResult<()> {
    let resolved = resolve_source(source)?;
    let spectrum = match min_modes {
        Some(m) => OccupationSpectrum::build_with_min_modes(&resolved.zs, resolved.tail_tol, m)?,
        None => OccupationSpectrum::build(&resolved.zs, resolved.tail_tol)?,
    };
    let mut table = Table::new(&["rank", "label", "lambda", "log_lambda"]);
    for (rank, ((l, ll), label)) in spectrum
        .lambdas()
        .iter()
        .zip(spectrum.log_lambdas())
        .zip(spectrum.labels())
        .enumerate()
    {
        table.push(vec![
            fmt_usize(rank),
            label_string(label),
            fmt(*l),
            fmt(*ll),
        ]);
    }
    let manifest = Manifest::new(
        "spectrum",
        json!({
            "zs": resolved.zs,
            "min_modes": min_modes,
            "physical": physical_json(&resolved.physical),
            "retained_modes": spectrum.len(),
        }),
    )
    .with_tolerances(json!({"tail_tol": resolved.tail_tol}))
    .with_tail_bounds(json!({"tail": spectrum.tail()}));
    emit(&table, out.format, out.output.as_deref(), manifest)?;
    Ok(())
}

fn cmd_entropy(source: &Source, alphas: &[f64], out: &OutputArgs) -> AppResult<()> {
    let resolved = resolve_source(source)?;
    let report = entropies(&resolved.zs, alphas)?;
    let mut header = vec![
        "axis".to_string(),
        "z".to_string(),
        "linear".to_string(),
        "von_neumann".to_string(),
        "min_entropy".to_string(),
        "max_entropy".to_string(),
    ];
    for &alpha in alphas {
        header.push(format!("renyi_{alpha}"));
    }
    let mut table = Table {
        header,
        rows: Vec::new(),
    };
    for (i, axis) in report.per_axis.iter().enumerate() {
        let name = if i == 0 {
            "x".to_string()
        } else {
            format!("y{i}")
        };
        let mut row = vec![
            name,
            fmt(axis.z),
            fmt(axis.linear),
            fmt(axis.von_neumann),
            fmt(axis.min_entropy),
            fmt(axis.max_entropy),
        ];
        for s in &axis.renyi {
            row.push(fmt(*s));
        }
        table.push(row);
    }
    let mut total = vec![
        "total".to_string(),
        String::new(),
        fmt(report.linear),
        fmt(report.von_neumann),
        fmt(report.min_entropy),
        fmt(report.max_entropy),
    ];
    for &(_, s) in &report.renyi {
        total.push(fmt(s));
    }
    table.push(total);
    let manifest = Manifest::new(
        "entropy",
        json!({
            "zs": resolved.zs,
            "alphas": alphas,
            "physical": physical_json(&resolved.physical),
        }),
    );
    emit(&table, out.format, out.output.as_deref(), manifest)?;
    Ok(())
}

fn cmd_chi(
    source: &Source,
    pairs: usize,
    kind: ChiKindArg,
    method: ChiMethodArg,
    out: &OutputArgs,
) -> AppResult<()> {
    let resolved = resolve_source(source)?;
    let table_data: ChiTable<f64> = match (kind, method) {
        (ChiKindArg::Fermi, ChiMethodArg::Dp) => {
            let spectrum = OccupationSpectrum::build_with_min_modes(
                &resolved.zs,
                resolved.tail_tol,
                pairs + PAIR_MODE_MARGIN,
            )?;
            chi_fermi_dp(&spectrum, pairs)
        }
        (ChiKindArg::Bose, ChiMethodArg::Dp) => {
            let spectrum = OccupationSpectrum::build_with_min_modes(
                &resolved.zs,
                resolved.tail_tol,
                pairs + PAIR_MODE_MARGIN,
            )?;
            chi_bose(&spectrum, pairs)
        }
        (ChiKindArg::Fermi, ChiMethodArg::Newton) => {
            let sums = PowerSums::geometric(&resolved.zs, pairs.max(1))?;
            chi_fermi_newton(&sums, pairs)?
        }
        (ChiKindArg::Fermi, ChiMethodArg::Partition) => {
            let sums = PowerSums::geometric(&resolved.zs, pairs.max(1))?;
            chi_fermi_partition_table(&sums, pairs)?
        }
        (ChiKindArg::Bose, _) => {
            return Err(AppError::Usage(
                "bosonic factors are computed with --method dp".into(),
            ));
        }
    };
    let mut table = Table::new(&["n", "chi", "log_chi"]);
    for n in 0..=pairs {
        table.push(vec![
            fmt_usize(n),
            fmt(table_data.chi(n)),
            fmt(table_data.log_chi(n)),
        ]);
    }
    let cancellation = table_data.cancellation().map(|c| {
        json!({"digits_lost": c.digits_lost, "flagged": c.flagged})
    });
    let manifest = Manifest::new(
        "chi",
        json!({
            "zs": resolved.zs,
            "pairs": pairs,
            "kind": format!("{kind:?}"),
            "method": format!("{method:?}"),
            "physical": physical_json(&resolved.physical),
            "cancellation": cancellation,
        }),
    )
    .with_tolerances(json!({"tail_tol": resolved.tail_tol}))
    .with_tail_bounds(json!({"chi_tail_error_bound": table_data.tail_error()}));
    emit(&table, out.format, out.output.as_deref(), manifest)?;
    Ok(())
}

fn cmd_ratio(
    zx_sweep: &str,
    zy: &[f64],
    pairs: &[usize],
    tail_tol: f64,
    out: &OutputArgs,
) -> AppResult<()> {
    if pairs.is_empty() {
        return Err(AppError::Usage("need at least one pair count".into()));
    }
    let zxs = parse_values(zx_sweep)?;
    let max_pairs = *pairs.iter().max().unwrap();
    let mut table = Table::new(&["zx", "N", "ratio", "lower", "upper", "SL"]);
    for &zx in &zxs {
        let mut zs = vec![zx];
        zs.extend(zy);
        let spectrum =
            OccupationSpectrum::build_with_min_modes(&zs, tail_tol, max_pairs + 1 + PAIR_MODE_MARGIN)?;
        let chis = chi_fermi_dp(&spectrum, max_pairs + 1);
        let p = purity(&zs)?;
        for &n in pairs {
            let r = ratio_at(&chis, n + 1)?;
            table.push(vec![
                fmt(zx),
                fmt_usize(n),
                fmt(r),
                fmt(1.0 - n as f64 * p),
                fmt(1.0 - p),
                fmt(1.0 - p),
            ]);
        }
    }
    let manifest = Manifest::new(
        "ratio",
        json!({
            "zx_sweep": zx_sweep,
            "zy": zy,
            "pairs": pairs,
        }),
    )
    .with_tolerances(json!({"tail_tol": tail_tol}));
    emit(&table, out.format, out.output.as_deref(), manifest)?;
    Ok(())
}

fn cmd_populations(
    source: &Source,
    pairs: usize,
    zx_sweep: Option<&str>,
    modes: &[usize],
    out: &OutputArgs,
) -> AppResult<()> {
    match zx_sweep {
        None => {
            let resolved = resolve_source(source)?;
            let spectrum = OccupationSpectrum::build_with_min_modes(
                &resolved.zs,
                resolved.tail_tol,
                pairs + PAIR_MODE_MARGIN,
            )?;
            let profile = populations(&spectrum, pairs)?;
            let mut table = Table::new(&["mode", "label", "lambda", "population"]);
            for (j, ((l, label), n)) in spectrum
                .lambdas()
                .iter()
                .zip(spectrum.labels())
                .zip(profile.populations())
                .enumerate()
            {
                table.push(vec![
                    fmt_usize(j),
                    label_string(label),
                    fmt(*l),
                    fmt(*n),
                ]);
            }
            let manifest = Manifest::new(
                "populations",
                json!({
                    "zs": resolved.zs,
                    "pairs": pairs,
                    "physical": physical_json(&resolved.physical),
                    "sum_residual": profile.sum_residual(),
                }),
            )
            .with_tolerances(json!({"tail_tol": resolved.tail_tol}))
            .with_tail_bounds(json!({"tail": spectrum.tail()}));
            emit(&table, out.format, out.output.as_deref(), manifest)?;
        }
        Some(sweep) => {
            let zxs = parse_values(sweep)?;
            let max_mode = modes.iter().copied().max().unwrap_or(0);
            let mut table = Table::new(&["zx", "mode", "population"]);
            for &zx in &zxs {
                let mut zs = vec![zx];
                zs.extend(&source.zy);
                let spectrum = OccupationSpectrum::build_with_min_modes(
                    &zs,
                    source.tail_tol,
                    (pairs + PAIR_MODE_MARGIN).max(max_mode + 1),
                )?;
                let profile = populations(&spectrum, pairs)?;
                for &mode in modes {
                    table.push(vec![
                        fmt(zx),
                        fmt_usize(mode),
                        fmt(profile.populations()[mode]),
                    ]);
                }
            }
            let manifest = Manifest::new(
                "populations",
                json!({
                    "zx_sweep": sweep,
                    "zy": source.zy,
                    "pairs": pairs,
                    "modes": modes,
                }),
            )
            .with_tolerances(json!({"tail_tol": source.tail_tol}));
            emit(&table, out.format, out.output.as_deref(), manifest)?;
        }
    }
    Ok(())
}

fn degeneracy_for(arg: DegeneracyArg, count: usize) -> Vec<u64> {
    match arg {
        DegeneracyArg::Uniform => uniform_degeneracy(count),
        DegeneracyArg::Linear => isotropic_2d_degeneracy(count),
    }
}

fn fit_row(zx: Option<f64>, result: &FitResult<f64>) -> Vec<String> {
    let model = match result.model {
        coboson::observables::FitModel::FermiDirac => "fd",
        coboson::observables::FitModel::BoseEinstein => "be",
    };
    let mut row = Vec::new();
    if let Some(z) = zx {
        row.push(fmt(z));
    }
    row.extend([
        model.to_string(),
        fmt(result.j_mu),
        fmt(result.t_eff),
        result.effectively_zero_temperature().to_string(),
        fmt(result.residual),
        result.converged.to_string(),
        fmt_usize(result.evaluations),
    ]);
    row
}

fn cmd_dos(
    zx_text: &str,
    pairs: usize,
    degeneracy: DegeneracyArg,
    fits: &[FitModelArg],
    tail_tol: f64,
    out: &OutputArgs,
) -> AppResult<()> {
    if !fits.is_empty() && out.output.is_none() {
        return Err(AppError::Usage(
            "--fit writes a `<output>_fit.csv` summary and needs --output".into(),
        ));
    }
    let zxs = parse_values(zx_text)?;
    let mut table = Table::new(&["zx", "mode", "population", "dos"]);
    let mut fit_table = Table::new(&[
        "zx",
        "model",
        "j_mu",
        "t_eff",
        "t_effectively_zero",
        "residual",
        "converged",
        "evaluations",
    ]);
    let mut all_converged = true;
    for &zx in &zxs {
        let spectrum =
            OccupationSpectrum::build_with_min_modes(&[zx], tail_tol, pairs + PAIR_MODE_MARGIN)?;
        let profile = populations(&spectrum, pairs)?;
        let g = degeneracy_for(degeneracy, profile.len());
        let dos_values = dos(&profile, &g)?;
        for (j, (n, d)) in profile.populations().iter().zip(&dos_values).enumerate() {
            table.push(vec![fmt(zx), fmt_usize(j), fmt(*n), fmt(*d)]);
        }
        for &model in fits {
            let result = match model {
                FitModelArg::Fd => fit_fd(&dos_values, &g)?,
                FitModelArg::Be => fit_be(&dos_values, &g)?,
            };
            all_converged &= result.converged;
            fit_table.push(fit_row(Some(zx), &result));
        }
    }
    let manifest = Manifest::new(
        "dos",
        json!({
            "zx": zxs,
            "pairs": pairs,
            "degeneracy": format!("{degeneracy:?}"),
            "fit_models": fits.iter().map(|m| format!("{m:?}")).collect::<Vec<_>>(),
        }),
    )
    .with_tolerances(json!({"tail_tol": tail_tol}));
    emit(&table, out.format, out.output.as_deref(), manifest)?;
    if !fits.is_empty() {
        let base = out.output.as_ref().unwrap();
        let fit_path = sibling(base, "_fit");
        let fit_manifest = Manifest::new(
            "dos --fit",
            json!({"zx": zxs, "pairs": pairs, "models": fits.iter().map(|m| format!("{m:?}")).collect::<Vec<_>>()}),
        );
        emit(&fit_table, out.format, Some(&fit_path), fit_manifest)?;
    }
    if !all_converged {
        return Err(AppError::NonConverged(
            "a requested fit did not converge; best-so-far written".into(),
        ));
    }
    Ok(())
}

/// `out/fig.csv` + `_fit` → `out/fig_fit.csv`
fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().unwrap_or_default().to_string_lossy();
    let ext = path
        .extension()
        .map(|e| format!(".{}", e.to_string_lossy()))
        .unwrap_or_default();
    path.with_file_name(format!("{stem}{suffix}{ext}"))
}

fn cmd_fit(
    model: FitModelArg,
    input: Option<&Path>,
    filter: Option<&str>,
    planted: Option<&str>,
    out: &OutputArgs,
) -> AppResult<()> {
    let (dos_values, origin) = match (input, planted) {
        (Some(path), None) => (read_dos_csv(path, filter)?, json!(path.display().to_string())),
        (None, Some(spec)) => {
            let parts: Vec<&str> = spec.split(',').collect();
            if parts.len() != 3 {
                return Err(AppError::Usage(
                    "--planted takes j_mu,t_eff,points".into(),
                ));
            }
            let j_mu: f64 = parts[0]
                .parse()
                .map_err(|_| AppError::Usage(format!("not a number: {}", parts[0])))?;
            let t_eff: f64 = parts[1]
                .parse()
                .map_err(|_| AppError::Usage(format!("not a number: {}", parts[1])))?;
            let points: usize = parts[2]
                .parse()
                .map_err(|_| AppError::Usage(format!("not a count: {}", parts[2])))?;
            let values: Vec<f64> = (0..points)
                .map(|j| {
                    let arg = (j as f64 - j_mu) / t_eff;
                    match model {
                        FitModelArg::Fd => 1.0 / (arg.exp() + 1.0),
                        FitModelArg::Be => 1.0 / (arg.exp() - 1.0),
                    }
                })
                .collect();
            if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(AppError::Usage(
                    "planted parameters make the model infeasible on j ≥ 0".into(),
                ));
            }
            (values, json!({"planted": {"j_mu": j_mu, "t_eff": t_eff, "points": points}}))
        }
        _ => {
            return Err(AppError::Usage(
                "provide exactly one of --input or --planted".into(),
            ));
        }
    };
    let g = uniform_degeneracy(dos_values.len());
    let result = match model {
        FitModelArg::Fd => fit_fd(&dos_values, &g)?,
        FitModelArg::Be => fit_be(&dos_values, &g)?,
    };
    let mut table = Table::new(&[
        "model",
        "j_mu",
        "t_eff",
        "t_effectively_zero",
        "residual",
        "converged",
        "evaluations",
    ]);
    table.push(fit_row(None, &result));
    let manifest = Manifest::new(
        "fit",
        json!({"model": format!("{model:?}"), "source": origin, "filter": filter}),
    );
    emit(&table, out.format, out.output.as_deref(), manifest)?;
    if !result.converged {
        return Err(AppError::NonConverged(
            "fit did not converge; best-so-far written".into(),
        ));
    }
    Ok(())
}

fn read_dos_csv(path: &Path, filter: Option<&str>) -> AppResult<Vec<f64>> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header: Vec<&str> = lines
        .next()
        .ok_or_else(|| AppError::Usage("empty input file".into()))?
        .split(',')
        .collect();
    let mode_col = header
        .iter()
        .position(|&h| h == "mode" || h == "j")
        .ok_or_else(|| AppError::Usage("input needs a `mode` (or `j`) column".into()))?;
    let dos_col = header
        .iter()
        .position(|&h| h == "dos")
        .ok_or_else(|| AppError::Usage("input needs a `dos` column".into()))?;
    let filter = match filter {
        None => None,
        Some(expr) => {
            let (col, value) = expr
                .split_once('=')
                .ok_or_else(|| AppError::Usage("--where takes column=value".into()))?;
            let idx = header
                .iter()
                .position(|&h| h == col)
                .ok_or_else(|| AppError::Usage(format!("no column named {col}")))?;
            let v: f64 = value
                .parse()
                .map_err(|_| AppError::Usage(format!("not a number: {value}")))?;
            Some((idx, v))
        }
    };
    let mut rows: Vec<(usize, f64)> = Vec::new();
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if let Some((idx, want)) = filter {
            let got: f64 = cells
                .get(idx)
                .and_then(|c| c.parse().ok())
                .unwrap_or(f64::NAN);
            if !((got - want).abs() <= 1e-12 * want.abs().max(1.0)) {
                continue;
            }
        }
        let mode: usize = cells
            .get(mode_col)
            .and_then(|c| c.parse::<f64>().ok())
            .map(|v| v as usize)
            .ok_or_else(|| AppError::Usage(format!("bad mode cell in line: {line}")))?;
        let value: f64 = cells
            .get(dos_col)
            .and_then(|c| c.parse().ok())
            .ok_or_else(|| AppError::Usage(format!("bad dos cell in line: {line}")))?;
        rows.push((mode, value));
    }
    rows.sort_by_key(|&(mode, _)| mode);
    Ok(rows.into_iter().map(|(_, v)| v).collect())
}

fn cmd_counting(
    source: &Source,
    pairs: usize,
    t: Option<usize>,
    zx_sweep: Option<&str>,
    out: &OutputArgs,
) -> AppResult<()> {
    let window = t.unwrap_or(pairs);
    match zx_sweep {
        None => {
            let resolved = resolve_source(source)?;
            let spectrum = OccupationSpectrum::build_with_min_modes(
                &resolved.zs,
                resolved.tail_tol,
                pairs.max(window) + PAIR_MODE_MARGIN,
            )?;
            let dist = counting(&spectrum, pairs, window)?;
            let mut table = Table::new(&["n", "prob"]);
            for (n, &p) in dist.probs().iter().enumerate() {
                table.push(vec![fmt_usize(n), fmt(p)]);
            }
            let manifest = Manifest::new(
                "counting",
                json!({
                    "zs": resolved.zs,
                    "pairs": pairs,
                    "window": window,
                    "mean": dist.mean(),
                    "variance": dist.variance(),
                    "physical": physical_json(&resolved.physical),
                }),
            )
            .with_tolerances(json!({"tail_tol": resolved.tail_tol}));
            emit(&table, out.format, out.output.as_deref(), manifest)?;
        }
        Some(sweep) => {
            let zxs = parse_values(sweep)?;
            let mut table = Table::new(&["zx", "mean", "variance"]);
            for &zx in &zxs {
                let mut zs = vec![zx];
                zs.extend(&source.zy);
                let spectrum = OccupationSpectrum::build_with_min_modes(
                    &zs,
                    source.tail_tol,
                    pairs.max(window) + PAIR_MODE_MARGIN,
                )?;
                let dist = counting(&spectrum, pairs, window)?;
                table.push(vec![fmt(zx), fmt(dist.mean()), fmt(dist.variance())]);
            }
            let manifest = Manifest::new(
                "counting",
                json!({
                    "zx_sweep": sweep,
                    "zy": source.zy,
                    "pairs": pairs,
                    "window": window,
                }),
            )
            .with_tolerances(json!({"tail_tol": source.tail_tol}));
            emit(&table, out.format, out.output.as_deref(), manifest)?;
        }
    }
    Ok(())
}

pub struct DensityRun {
    pub g: f64,
    pub approx: HarmonicApprox<f64>,
    pub width: f64,
    pub z_implied: f64,
    pub z_curvature: f64,
    pub peak_count: usize,
    pub regime: coboson::density::Regime,
    pub norm: f64,
    pub grid: coboson::Density,
}

pub fn density_run(
    gamma: f64,
    g: f64,
    pairs: usize,
    points: usize,
    half_width: Option<f64>,
    prominence: f64,
    tail_tol: f64,
    validate: bool,
) -> AppResult<DensityRun> {
    let interaction = InteractionSpec::inverse_power(gamma, g)?;
    let approx = solve_equilibrium_with_threshold(&interaction, 2.0)?;
    let z_implied = z_implied_by_widths(approx.mu)?;
    let z_curvature = z_from_curvature(approx.mu)?;
    let spectrum =
        OccupationSpectrum::build_with_min_modes(&[z_implied], tail_tol, pairs + PAIR_MODE_MARGIN)?;
    let pops = populations(&spectrum, pairs)?;
    let basis = if validate {
        OrbitalBasis::validated(&approx, spectrum.len())?
    } else {
        OrbitalBasis::unchecked(&approx, spectrum.len())?
    };
    let mut grid_spec = GridSpec::default_for(&basis);
    grid_spec.points = points;
    if let Some(h) = half_width {
        grid_spec.half_width = h;
    }
    let grid = profile(&pops, &basis, &grid_spec)?;
    let peak_count = peaks(&grid, prominence)?;
    let regime = classify(peak_count, pairs);
    Ok(DensityRun {
        g,
        approx,
        width: basis.width(),
        z_implied,
        z_curvature,
        peak_count,
        regime,
        norm: grid.norm,
        grid,
    })
}

pub fn density_summary_table() -> Table {
    Table::new(&[
        "g",
        "x0",
        "width",
        "x0_over_width",
        "z_width_form",
        "z_curvature_form",
        "strong_interaction_valid",
        "peaks",
        "regime",
        "norm",
    ])
}

pub fn density_summary_row(run: &DensityRun) -> Vec<String> {
    vec![
        fmt(run.g),
        fmt(run.approx.x0),
        fmt(run.width),
        fmt(run.approx.x0 / run.width),
        fmt(run.z_implied),
        fmt(run.z_curvature),
        run.approx.valid.to_string(),
        fmt_usize(run.peak_count),
        run.regime.to_string(),
        fmt(run.norm),
    ]
}

pub fn density_profile_table(grid: &coboson::Density) -> Table {
    let mut table = Table::new(&["x", "rho_a", "rho_b", "rho_total"]);
    for i in 0..grid.xs.len() {
        table.push(vec![
            fmt(grid.xs[i]),
            fmt(grid.rho_a[i]),
            fmt(grid.rho_b[i]),
            fmt(grid.rho_total[i]),
        ]);
    }
    table
}

#[allow(clippy::too_many_arguments)]
fn cmd_density(
    gamma: f64,
    gs: &[f64],
    pairs: usize,
    points: usize,
    half_width: Option<f64>,
    prominence: f64,
    tail_tol: f64,
    skip_validation: bool,
    output: &Path,
) -> AppResult<()> {
    if gs.is_empty() {
        return Err(AppError::Usage("need at least one interaction strength".into()));
    }
    let stem = output.with_extension("");
    let stem_str = stem.to_string_lossy().into_owned();
    let mut summary = density_summary_table();
    let mut files: Vec<(PathBuf, Table)> = Vec::new();
    for (i, &g) in gs.iter().enumerate() {
        let run = density_run(
            gamma,
            g,
            pairs,
            points,
            half_width,
            prominence,
            tail_tol,
            !skip_validation,
        )?;
        summary.push(density_summary_row(&run));
        files.push((
            PathBuf::from(format!("{stem_str}_g{i}.csv")),
            density_profile_table(&run.grid),
        ));
    }
    files.push((PathBuf::from(format!("{stem_str}_summary.csv")), summary));

    let manifest = Manifest::new(
        "density",
        json!({
            "gamma": gamma,
            "g": gs,
            "pairs": pairs,
            "points": points,
            "half_width": half_width,
            "prominence": prominence,
            "validated_against_grid_oracle": !skip_validation,
        }),
    )
    .with_tolerances(json!({"tail_tol": tail_tol, "prominence": prominence}));
    let refs: Vec<(PathBuf, &Table)> = files.iter().map(|(p, t)| (p.clone(), t)).collect();
    emit_set(
        &refs,
        manifest,
        &PathBuf::from(format!("{stem_str}.meta.json")),
    )?;
    Ok(())
}

fn cmd_oracle(op: OracleOp) -> AppResult<()> {
    match op {
        OracleOp::ZxArbitration { mu, out } => {
            let mut table = Table::new(&[
                "mu",
                "measured_ratio",
                "ratio_constancy",
                "candidate_curvature_form",
                "candidate_width_form",
                "deviation_curvature_form",
                "deviation_width_form",
                "selected",
            ]);
            for &m in &mu {
                let report = oracle::arbitrate_zx(m)?;
                table.push(vec![
                    fmt(m),
                    fmt(report.measured_ratio),
                    fmt(report.ratio_constancy),
                    fmt(report.candidate_curvature),
                    fmt(report.candidate_width),
                    fmt(report.deviation_curvature),
                    fmt(report.deviation_width),
                    report.selected.to_string(),
                ]);
            }
            let manifest = Manifest::new("oracle zx-arbitration", json!({"mu": mu}));
            emit(&table, out.format, out.output.as_deref(), manifest)?;
        }
        OracleOp::Convention {
            zx,
            zy,
            max_pairs,
            out,
        } => {
            let report = oracle::product_claim_report(zx, zy, max_pairs)?;
            let mut table = Table::new(&[
                "n_pairs",
                "chi_2d_multiset",
                "chi_1d_product",
                "factorization_gap",
                "chi_operator_norm",
                "operator_vs_multiset_gap",
            ]);
            for (row, check) in report.rows.iter().zip(&report.norm_checks) {
                table.push(vec![
                    fmt_usize(row.n_pairs),
                    fmt(row.chi_2d),
                    fmt(row.chi_product),
                    fmt(row.relative_gap),
                    fmt(check.chi_operator),
                    fmt(check.relative_gap),
                ]);
            }
            let manifest = Manifest::new(
                "oracle convention",
                json!({
                    "zx": zx,
                    "zy": zy,
                    "max_pairs": max_pairs,
                    "modes_per_axis": report.modes_per_axis,
                    "factorization_holds": report.factorization_holds,
                    "operator_matches_multiset": report.operator_matches_multiset,
                }),
            );
            emit(&table, out.format, out.output.as_deref(), manifest)?;
        }
        OracleOp::Chi {
            z,
            modes,
            pairs,
            kind,
            out,
        } => {
            let spectrum = OccupationSpectrum::geometric_truncated(&[z], &[modes])?;
            let chi_kind = match kind {
                ChiKindArg::Fermi => coboson::symfun::ChiKind::Fermionic,
                ChiKindArg::Bose => coboson::symfun::ChiKind::Bosonic,
            };
            let value = oracle::chi_bruteforce(spectrum.lambdas(), pairs, chi_kind)?;
            let mut table = Table::new(&["z", "modes", "n_pairs", "kind", "chi"]);
            table.push(vec![
                fmt(z),
                fmt_usize(modes),
                fmt_usize(pairs),
                format!("{kind:?}"),
                fmt(value),
            ]);
            let manifest = Manifest::new(
                "oracle chi",
                json!({"z": z, "modes": modes, "pairs": pairs, "kind": format!("{kind:?}")}),
            );
            emit(&table, out.format, out.output.as_deref(), manifest)?;
        }
        OracleOp::Counting {
            z,
            modes,
            pairs,
            t,
            out,
        } => {
            let spectrum = OccupationSpectrum::geometric_truncated(&[z], &[modes])?;
            let probs = oracle::counting_bruteforce(spectrum.lambdas(), pairs, t)?;
            let mut table = Table::new(&["n", "prob"]);
            for (n, &p) in probs.iter().enumerate() {
                table.push(vec![fmt_usize(n), fmt(p)]);
            }
            let manifest = Manifest::new(
                "oracle counting",
                json!({"z": z, "modes": modes, "pairs": pairs, "window": t}),
            );
            emit(&table, out.format, out.output.as_deref(), manifest)?;
        }
        OracleOp::Schmidt { mu, x0, out } => {
            let gaussian = oracle::TwoBodyGaussian::from_harmonic(mu, x0);
            let grid = oracle::OracleGrid::auto(&gaussian);
            let schmidt = oracle::grid_schmidt(&gaussian, &grid)?;
            let mut table = Table::new(&["rank", "occupation"]);
            for (rank, &l) in schmidt.occupations().iter().enumerate().take(32) {
                table.push(vec![fmt_usize(rank), fmt(l)]);
            }
            let manifest = Manifest::new(
                "oracle schmidt",
                json!({
                    "mu": mu,
                    "x0": x0,
                    "grid_points": grid.points,
                    "half_width": grid.half_width,
                    "convergence_estimate": schmidt.convergence(),
                    "mass": schmidt.mass(),
                }),
            );
            emit(&table, out.format, out.output.as_deref(), manifest)?;
        }
    }
    Ok(())
}
