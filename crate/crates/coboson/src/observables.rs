//! Populations, density of states, effective-temperature fits, and
//! pair-counting statistics of the `N`-pair state.

use crate::error::{Error, Result};
use crate::logspace::{compensated_sum, ln_binomial, ln_factorial};
use crate::scalar::Real;
use crate::spectrum::OccupationSpectrum;
use crate::symfun::{
    chi_excluding, chi_fermi_dp, chi_subset_table, log_elementary_excluding_each, SubsetRange,
};

/// Extra modes retained beyond the pair count when building spectra for
/// `N`-pair observables; past `j ≈ N` populations decay geometrically, so
/// a short margin is enough for 1e-8 sum rules.
pub const PAIR_MODE_MARGIN: usize = 16;

/// Spectrum sized for `N`-pair computations: the tail rule plus at least
/// `N + PAIR_MODE_MARGIN` modes so the filling is feasible.
pub fn spectrum_for_pairs<R: Real>(
    zs: &[R],
    tail_tol: R,
    n_pairs: usize,
) -> Result<OccupationSpectrum<R>> {
    OccupationSpectrum::build_with_min_modes(zs, tail_tol, n_pairs + PAIR_MODE_MARGIN)
}

/// Per-mode populations `n_j(N) = N λ_j χ_{N−1}^{λ_j}/χ_N`.
#[derive(Debug, Clone)]
pub struct PopulationProfile<R: Real> {
    populations: Vec<R>,
    n_pairs: usize,
    sum_residual: R,
}

impl<R: Real> PopulationProfile<R> {
    /// Populations aligned with the spectrum's mode order.
    pub fn populations(&self) -> &[R] {
        &self.populations
    }

    pub fn n_pairs(&self) -> usize {
        self.n_pairs
    }

    /// `|Σ n_j − N|` over the retained modes.
    pub fn sum_residual(&self) -> R {
        self.sum_residual
    }

    pub fn len(&self) -> usize {
        self.populations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.populations.is_empty()
    }
}

/// Tolerance for the fast-path self-check against recomputation.
const EXCLUSION_SELF_CHECK_TOL: f64 = 1e-8;

/// Populations of every retained mode, computed in log domain.
///
/// The per-mode excluded factors come from an all-positive prefix/suffix
/// convolution (`O(J·N)` total); three sampled modes are self-checked
/// against the `O(J·N)`-per-mode recomputation and the whole profile
/// falls back to recomputation if they disagree beyond 1e-8.
pub fn populations<R: Real>(
    spectrum: &OccupationSpectrum<R>,
    n_pairs: usize,
) -> Result<PopulationProfile<R>> {
    if n_pairs == 0 {
        return Err(Error::Domain("populations need at least one pair".into()));
    }
    let modes = spectrum.len();
    let lls = spectrum.log_lambdas();
    let full = chi_fermi_dp(spectrum, n_pairs);
    if full.is_zero(n_pairs) {
        return Err(Error::InfeasibleFilling(format!(
            "χ_{n_pairs} = 0: {modes} retained modes cannot host {n_pairs} pairs"
        )));
    }
    let ln_e_full = full.log_chi(n_pairs) - ln_factorial::<R>(n_pairs);

    let mut excluded = log_elementary_excluding_each(lls, n_pairs - 1);

    // Spot-check the fast path; on disagreement recompute everything.
    let check_tol = R::of(EXCLUSION_SELF_CHECK_TOL);
    let mut check_modes = vec![0, modes / 2, modes - 1];
    check_modes.dedup();
    let recompute = |j: usize| -> Result<R> {
        let table = chi_excluding(spectrum, j, n_pairs - 1)?;
        Ok(table.log_chi(n_pairs - 1) - ln_factorial::<R>(n_pairs - 1))
    };
    let mut fast_ok = true;
    for &j in &check_modes {
        let slow = recompute(j)?;
        let fast = excluded[j];
        let delta = if slow == R::neg_infinity() && fast == R::neg_infinity() {
            R::zero()
        } else {
            (slow - fast).abs()
        };
        if !(delta <= check_tol) {
            fast_ok = false;
            break;
        }
    }
    if !fast_ok {
        for (j, slot) in excluded.iter_mut().enumerate() {
            *slot = recompute(j)?;
        }
    }

    let populations: Vec<R> = lls
        .iter()
        .zip(&excluded)
        .map(|(&ll, &ex)| {
            if ex == R::neg_infinity() {
                R::zero()
            } else {
                (ll + ex - ln_e_full).exp()
            }
        })
        .collect();

    let total = compensated_sum(populations.iter().copied());
    let sum_residual = (total - R::of_usize(n_pairs)).abs();

    Ok(PopulationProfile {
        populations,
        n_pairs,
        sum_residual,
    })
}

/// Uniform degeneracy (1D trap).
pub fn uniform_degeneracy(count: usize) -> Vec<u64> {
    vec![1; count]
}

/// `g_j = j + 1` (isotropic 2D oscillator shells).
pub fn isotropic_2d_degeneracy(count: usize) -> Vec<u64> {
    (1..=count as u64).collect()
}

/// Density of states `DOS_j = g_j·n_j`.
pub fn dos<R: Real>(profile: &PopulationProfile<R>, degeneracy: &[u64]) -> Result<Vec<R>> {
    if degeneracy.len() != profile.len() {
        return Err(Error::Domain(format!(
            "degeneracy list has {} entries for {} modes",
            degeneracy.len(),
            profile.len()
        )));
    }
    if degeneracy.contains(&0) {
        return Err(Error::Domain("degeneracies must be >= 1".into()));
    }
    Ok(profile
        .populations()
        .iter()
        .zip(degeneracy)
        .map(|(&n, &g)| n * R::of(g as f64))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitModel {
    FermiDirac,
    BoseEinstein,
}

/// Least-squares fit of `(j_μ, T̃)`.
#[derive(Debug, Clone, Copy)]
pub struct FitResult<R: Real> {
    /// Fermi level in mode-index units.
    pub j_mu: R,
    /// Dimensionless effective temperature, bounded below by 1e-6.
    pub t_eff: R,
    /// Root-mean-square misfit over the fitted points (penalties
    /// included for infeasible Bose-Einstein points).
    pub residual: R,
    pub converged: bool,
    pub model: FitModel,
    pub evaluations: usize,
}

impl<R: Real> FitResult<R> {
    /// Whether the fit is in the `T̃ ≈ 0` regime (below 1e-3).
    pub fn effectively_zero_temperature(&self) -> bool {
        self.t_eff < R::of(1e-3)
    }
}

const FIT_EVAL_BUDGET: usize = 10_000;
const FIT_SPREAD_TOL: f64 = 1e-9;
const T_EFF_FLOOR: f64 = 1e-6;

/// Fermi-Dirac fit `g_j/(e^{(j−j_μ)/T̃} + 1)` to the DOS.
pub fn fit_fd<R: Real>(dos_values: &[R], degeneracy: &[u64]) -> Result<FitResult<R>> {
    fit(dos_values, degeneracy, FitModel::FermiDirac)
}

/// Bose-Einstein fit `g_j/(e^{(j−j_μ)/T̃} − 1)`, evaluated only where the
/// denominator is positive; infeasible points are penalized.
pub fn fit_be<R: Real>(dos_values: &[R], degeneracy: &[u64]) -> Result<FitResult<R>> {
    fit(dos_values, degeneracy, FitModel::BoseEinstein)
}

fn fit<R: Real>(dos_values: &[R], degeneracy: &[u64], model: FitModel) -> Result<FitResult<R>> {
    if dos_values.len() != degeneracy.len() {
        return Err(Error::Domain(format!(
            "degeneracy list has {} entries for {} DOS points",
            degeneracy.len(),
            dos_values.len()
        )));
    }
    let nonzero = dos_values.iter().filter(|&&d| d > R::zero()).count();
    if nonzero < 4 {
        return Err(Error::Domain(format!(
            "need at least 4 nonzero DOS points, got {nonzero}"
        )));
    }

    // Pair count from the sum rule Σ dos_j/g_j = N; sets the fit window
    // and the multistart list.
    let n_est: f64 = dos_values
        .iter()
        .zip(degeneracy)
        .map(|(&d, &g)| (d / R::of(g as f64)).to_f64().unwrap_or(0.0))
        .sum();
    let n_est = n_est.round().max(1.0);
    let j_fit = dos_values.len().min(4 * n_est as usize).max(4);

    let points: Vec<(f64, f64, f64)> = (0..j_fit)
        .map(|j| {
            (
                j as f64,
                dos_values[j].to_f64().unwrap_or(0.0),
                degeneracy[j] as f64,
            )
        })
        .collect();

    let objective = |p: &[f64; 2]| -> f64 {
        let j_mu = p[0];
        let t = p[1].max(T_EFF_FLOOR);
        let mut sse = 0.0;
        for &(j, d, g) in &points {
            let arg = (j - j_mu) / t;
            match model {
                FitModel::FermiDirac => {
                    let m = g / (arg.exp() + 1.0);
                    sse += (d - m) * (d - m);
                }
                FitModel::BoseEinstein => {
                    let denom = arg.exp() - 1.0;
                    if denom > 1e-12 {
                        let m = g / denom;
                        sse += (d - m) * (d - m);
                    } else {
                        // infeasible: occupied level at or below the
                        // would-be chemical potential
                        sse += (d + 1.0) * (d + 1.0) + (j_mu - j).max(0.0);
                    }
                }
            }
        }
        sse
    };

    let drop_start = points
        .windows(2)
        .enumerate()
        .map(|(j, w)| (j, w[0].1 - w[1].1))
        .max_by(|a, b| a.1.partial_cmp(&b.1).expect("finite DOS"))
        .map(|(j, _)| j as f64)
        .unwrap_or(n_est);
    let starts = [
        [n_est, 0.1],
        [n_est / 2.0, 1.0],
        [drop_start, 0.5],
    ];

    let mut budget = FIT_EVAL_BUDGET;
    let mut evaluations = 0usize;
    let mut best: Option<([f64; 2], f64, bool)> = None;
    for start in starts {
        if budget == 0 {
            break;
        }
        let (x, value, used, converged) = nelder_mead(&objective, start, budget);
        budget = budget.saturating_sub(used);
        evaluations += used;
        let better = match &best {
            Some((_, best_value, _)) => value < *best_value,
            None => true,
        };
        if better {
            best = Some((x, value, converged));
        }
    }
    let (x, value, converged) = best.expect("at least one start ran");

    let count = points.len() as f64;
    Ok(FitResult {
        j_mu: R::of(x[0]),
        t_eff: R::of(x[1].max(T_EFF_FLOOR)),
        residual: R::of((value / count).sqrt()),
        converged,
        model,
        evaluations,
    })
}

/// Two-parameter Nelder-Mead with fixed deterministic initialization.
/// Returns (best point, best value, evaluations used, converged).
fn nelder_mead(
    objective: &dyn Fn(&[f64; 2]) -> f64,
    start: [f64; 2],
    budget: usize,
) -> ([f64; 2], f64, usize, bool) {
    const ALPHA: f64 = 1.0; // reflection
    const GAMMA: f64 = 2.0; // expansion
    const RHO: f64 = 0.5; // contraction
    const SIGMA: f64 = 0.5; // shrink

    let mut used = 0usize;
    let eval = |p: &[f64; 2], used: &mut usize| -> f64 {
        *used += 1;
        objective(p)
    };

    let step0 = (0.1 * start[0].abs()).max(1.0);
    let step1 = (0.1 * start[1].abs()).max(0.1);
    let mut simplex: Vec<([f64; 2], f64)> = vec![
        (start, 0.0),
        ([start[0] + step0, start[1]], 0.0),
        ([start[0], start[1] + step1], 0.0),
    ];
    for vertex in simplex.iter_mut() {
        if used >= budget {
            return (vertex.0, f64::INFINITY, used, false);
        }
        vertex.1 = eval(&vertex.0, &mut used);
    }

    let mut converged = false;
    while used < budget {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("finite objective"));
        let spread = (0..2)
            .map(|k| {
                let best = simplex[0].0[k];
                simplex[1..]
                    .iter()
                    .map(|(v, _)| (v[k] - best).abs() / best.abs().max(1.0))
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if spread < FIT_SPREAD_TOL {
            converged = true;
            break;
        }

        let centroid = [
            (simplex[0].0[0] + simplex[1].0[0]) / 2.0,
            (simplex[0].0[1] + simplex[1].0[1]) / 2.0,
        ];
        let worst = simplex[2];
        let reflected = [
            centroid[0] + ALPHA * (centroid[0] - worst.0[0]),
            centroid[1] + ALPHA * (centroid[1] - worst.0[1]),
        ];
        let f_reflected = eval(&reflected, &mut used);

        if f_reflected < simplex[0].1 {
            let expanded = [
                centroid[0] + GAMMA * (reflected[0] - centroid[0]),
                centroid[1] + GAMMA * (reflected[1] - centroid[1]),
            ];
            let f_expanded = eval(&expanded, &mut used);
            simplex[2] = if f_expanded < f_reflected {
                (expanded, f_expanded)
            } else {
                (reflected, f_reflected)
            };
        } else if f_reflected < simplex[1].1 {
            simplex[2] = (reflected, f_reflected);
        } else {
            let contracted = [
                centroid[0] + RHO * (worst.0[0] - centroid[0]),
                centroid[1] + RHO * (worst.0[1] - centroid[1]),
            ];
            let f_contracted = eval(&contracted, &mut used);
            if f_contracted < worst.1 {
                simplex[2] = (contracted, f_contracted);
            } else {
                for i in 1..3 {
                    simplex[i].0 = [
                        simplex[0].0[0] + SIGMA * (simplex[i].0[0] - simplex[0].0[0]),
                        simplex[0].0[1] + SIGMA * (simplex[i].0[1] - simplex[0].0[1]),
                    ];
                    simplex[i].1 = eval(&simplex[i].0, &mut used);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("finite objective"));
    (simplex[0].0, simplex[0].1, used, converged)
}

/// Probability of finding `n` pairs in the `t` lowest modes.
#[derive(Debug, Clone)]
pub struct CountingDistribution<R: Real> {
    probs: Vec<R>,
    window: usize,
    mean: R,
    variance: R,
}

impl<R: Real> CountingDistribution<R> {
    /// `P(n)` for `n = 0..=min(t, N)`.
    pub fn probs(&self) -> &[R] {
        &self.probs
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn mean(&self) -> R {
        self.mean
    }

    pub fn variance(&self) -> R {
        self.variance
    }
}

/// `𝒫(n) = C(N,n)·χ_n^{Λ̃_t}·χ_{N−n}^{Λ̄}/χ_N` in log domain.
pub fn counting<R: Real>(
    spectrum: &OccupationSpectrum<R>,
    n_pairs: usize,
    window: usize,
) -> Result<CountingDistribution<R>> {
    if window == 0 || window > spectrum.len() {
        return Err(Error::Domain(format!(
            "window must lie in 1..={}, got {window}",
            spectrum.len()
        )));
    }
    let full = chi_fermi_dp(spectrum, n_pairs);
    if full.is_zero(n_pairs) {
        return Err(Error::InfeasibleFilling(format!(
            "χ_{n_pairs} = 0: {} retained modes cannot host {n_pairs} pairs",
            spectrum.len()
        )));
    }
    let n_top = window.min(n_pairs);
    let in_window = chi_subset_table(spectrum, SubsetRange::FirstModes(window), n_top)?;
    let outside = chi_subset_table(spectrum, SubsetRange::Complement(window), n_pairs)?;

    let probs: Vec<R> = (0..=n_top)
        .map(|n| {
            let ln_p = ln_binomial::<R>(n_pairs, n) + in_window.log_chi(n)
                + outside.log_chi(n_pairs - n)
                - full.log_chi(n_pairs);
            ln_p.exp()
        })
        .collect();

    let (mean, variance) = distribution_moments(&probs);
    Ok(CountingDistribution {
        probs,
        window,
        mean,
        variance,
    })
}

/// First moment and second central moment of a counting distribution.
pub fn moments<R: Real>(distribution: &CountingDistribution<R>) -> (R, R) {
    distribution_moments(&distribution.probs)
}

fn distribution_moments<R: Real>(probs: &[R]) -> (R, R) {
    let mean = compensated_sum(
        probs
            .iter()
            .enumerate()
            .map(|(n, &p)| R::of_usize(n) * p),
    );
    let variance = compensated_sum(probs.iter().enumerate().map(|(n, &p)| {
        let d = R::of_usize(n) - mean;
        d * d * p
    }));
    (mean, variance)
}
