//! Harmonic-approximation Schmidt spectra and their closed-form functionals.
//!
//! The two-body ground state of a strongly repulsive pair in a harmonic
//! trap is a product of Gaussians (center of mass × relative). Its Schmidt
//! occupations are geometric per axis, `λ_j = (1−z) z^j`, with one
//! generating parameter per axis: `z_x` set by the interaction through the
//! curvature ratio `μ`, and one `z_y` per transverse axis set by the trap
//! anisotropy `ε`. This module maps physical parameters to those `z`
//! values, materializes truncated product spectra, and evaluates the
//! closed-form power sums and entanglement entropies.

use crate::error::{Error, Result};
use crate::logspace::compensated_sum;
use crate::scalar::Real;

/// Reduced mass of the pair in oscillator units.
pub const REDUCED_MASS: f64 = 0.5;
/// Total mass of the pair in oscillator units.
pub const TOTAL_MASS: f64 = 2.0;
/// Default `x0` (oscillator lengths) above which the harmonic
/// approximation is treated as trustworthy.
pub const DEFAULT_STRONG_COUPLING_X0: f64 = 2.0;
/// Hard cap on retained product modes.
pub const MODE_CAP: usize = 1_000_000;

/// Repulsive pair potential described by its value and first two radial
/// derivatives at any `r > 0`.
pub trait PairPotential<R: Real>: Send + Sync {
    fn value(&self, r: R) -> R;
    fn d1(&self, r: R) -> R;
    fn d2(&self, r: R) -> R;
}

/// `𝒱(r) = r^{-γ}`.
#[derive(Debug, Clone, Copy)]
pub struct InversePower<R: Real> {
    pub exponent: R,
}

impl<R: Real> PairPotential<R> for InversePower<R> {
    fn value(&self, r: R) -> R {
        r.powf(-self.exponent)
    }

    fn d1(&self, r: R) -> R {
        -self.exponent * r.powf(-self.exponent - R::one())
    }

    fn d2(&self, r: R) -> R {
        self.exponent * (self.exponent + R::one()) * r.powf(-self.exponent - R::of(2.0))
    }
}

/// Interaction between the two constituents of one pair.
pub enum InteractionKind<R: Real> {
    /// `r^{-γ}`, with closed-form equilibrium and curvature.
    InversePower { gamma: R },
    /// Arbitrary repulsive, monotone-decreasing descriptor.
    Custom(Box<dyn PairPotential<R>>),
}

/// Interaction kind plus the dimensionless strength `g` (ratio of
/// interaction to confinement energy).
pub struct InteractionSpec<R: Real> {
    kind: InteractionKind<R>,
    strength: R,
}

impl<R: Real> InteractionSpec<R> {
    pub fn inverse_power(gamma: R, strength: R) -> Result<Self> {
        if !(gamma > R::zero()) {
            return Err(Error::Domain(format!(
                "inverse-power exponent must be positive, got {gamma}"
            )));
        }
        Self::with_kind(InteractionKind::InversePower { gamma }, strength)
    }

    /// Coulomb interaction, `γ = 1`.
    pub fn coulomb(strength: R) -> Result<Self> {
        Self::inverse_power(R::one(), strength)
    }

    pub fn custom(potential: Box<dyn PairPotential<R>>, strength: R) -> Result<Self> {
        Self::with_kind(InteractionKind::Custom(potential), strength)
    }

    fn with_kind(kind: InteractionKind<R>, strength: R) -> Result<Self> {
        if !(strength > R::zero()) {
            return Err(Error::Domain(format!(
                "interaction strength must be positive, got {strength}"
            )));
        }
        Ok(Self { kind, strength })
    }

    pub fn strength(&self) -> R {
        self.strength
    }

    pub fn kind(&self) -> &InteractionKind<R> {
        &self.kind
    }
}

/// Trap geometry: dimension `d ≥ 1` with one anisotropy `ε_i ≥ 1` per
/// transverse axis.
#[derive(Debug, Clone)]
pub struct TrapSpec<R: Real> {
    anisotropies: Vec<R>,
}

impl<R: Real> TrapSpec<R> {
    pub fn one_dimensional() -> Self {
        Self {
            anisotropies: Vec::new(),
        }
    }

    pub fn new(anisotropies: Vec<R>) -> Result<Self> {
        for &eps in &anisotropies {
            if !(eps >= R::one()) {
                return Err(Error::Domain(format!(
                    "anisotropy must be >= 1, got {eps}"
                )));
            }
        }
        Ok(Self { anisotropies })
    }

    pub fn dimension(&self) -> usize {
        self.anisotropies.len() + 1
    }

    pub fn anisotropies(&self) -> &[R] {
        &self.anisotropies
    }

    /// `z_y(ε_i)` for every transverse axis.
    pub fn transverse_zs(&self) -> Result<Vec<R>> {
        self.anisotropies
            .iter()
            .map(|&eps| z_from_anisotropy(eps))
            .collect()
    }
}

/// Outcome of the harmonic approximation around the classical equilibrium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicApprox<R: Real> {
    /// Equilibrium separation of the pair, oscillator lengths.
    pub x0: R,
    /// Curvature ratio `μ` of the relative motion along the molecular axis.
    pub mu: R,
    /// True when `x0` clears the strong-interaction threshold.
    pub valid: bool,
}

/// Solve the equilibrium condition with the default strong-coupling
/// threshold of [`DEFAULT_STRONG_COUPLING_X0`] oscillator lengths.
pub fn solve_equilibrium<R: Real>(interaction: &InteractionSpec<R>) -> Result<HarmonicApprox<R>> {
    solve_equilibrium_with_threshold(interaction, R::of(DEFAULT_STRONG_COUPLING_X0))
}

/// Solve `m_r ω²/(2g) = −𝒱'(r)/r` for the equilibrium separation `x0` and
/// evaluate the curvature ratio `μ² = 𝒱''/(−𝒱'/r)|_{x0} + 1`.
///
/// Inverse-power interactions use the closed forms
/// `x0 = (2γg/m_r)^{1/(γ+2)}` and `μ² = γ + 2`; custom descriptors go
/// through bracketed bisection (unique root for repulsive monotone
/// potentials). `valid` is set when `x0 ≥ x0_threshold`; below the
/// threshold the result is still returned so weak coupling stays
/// evaluable.
pub fn solve_equilibrium_with_threshold<R: Real>(
    interaction: &InteractionSpec<R>,
    x0_threshold: R,
) -> Result<HarmonicApprox<R>> {
    let g = interaction.strength;
    let m_r = R::of(REDUCED_MASS);
    let (x0, mu) = match &interaction.kind {
        InteractionKind::InversePower { gamma } => {
            let gamma = *gamma;
            let x0 = (R::of(2.0) * gamma * g / m_r).powf((gamma + R::of(2.0)).recip());
            let mu = (gamma + R::of(2.0)).sqrt();
            (x0, mu)
        }
        InteractionKind::Custom(potential) => {
            let x0 = bisect_equilibrium(potential.as_ref(), g)?;
            let restoring = -potential.d1(x0) / x0;
            let mu_sq = potential.d2(x0) / restoring + R::one();
            if !(mu_sq > R::zero()) {
                return Err(Error::Domain(format!(
                    "curvature ratio squared is non-positive ({mu_sq}) at x0 = {x0}"
                )));
            }
            (x0, mu_sq.sqrt())
        }
    };
    Ok(HarmonicApprox {
        x0,
        mu,
        valid: x0 >= x0_threshold,
    })
}

/// Bracketed bisection for the equilibrium of a generic descriptor.
/// `F(r) = −𝒱'(r)/r − m_r/(2g)` decreases from large positive values to
/// `−m_r/(2g)` for repulsive monotone potentials, so the root is unique.
fn bisect_equilibrium<R: Real>(potential: &dyn PairPotential<R>, strength: R) -> Result<R> {
    let m_r = R::of(REDUCED_MASS);
    let target = m_r / (R::of(2.0) * strength);
    let residual = |r: R| -> Result<R> {
        let d1 = potential.d1(r);
        if !(d1 < R::zero()) {
            return Err(Error::Domain(format!(
                "potential is not repulsive and monotone decreasing: 𝒱'({r}) = {d1}"
            )));
        }
        Ok(-d1 / r - target)
    };

    let mut lo = R::of(1e-6);
    let f_lo = residual(lo)?;
    if f_lo <= R::zero() {
        return Err(Error::Solver(format!(
            "no sign change: residual already non-positive at r = {lo}"
        )));
    }
    let mut hi = R::one();
    let mut f_hi = residual(hi)?;
    let mut doublings = 0usize;
    while f_hi > R::zero() {
        hi = hi * R::of(2.0);
        f_hi = residual(hi)?;
        doublings += 1;
        if doublings > 200 {
            return Err(Error::Solver(
                "root bracket not found after 200 doublings of r_max".into(),
            ));
        }
    }

    let tol = R::of(1e-12);
    while hi - lo > tol {
        let mid = (lo + hi) * R::of(0.5);
        if mid <= lo || mid >= hi {
            break; // interval at floating-point resolution
        }
        if residual(mid)? > R::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo + hi) * R::of(0.5))
}

/// `z_x = ((1−μ)/(1+μ))²` from the curvature ratio.
///
/// Requires `μ ≥ 1` (harmonic approximation of a repulsive, convex-at-
/// equilibrium potential). `μ = 1` gives the separable limit `z = 0`.
pub fn z_from_curvature<R: Real>(mu: R) -> Result<R> {
    if !(mu >= R::one()) {
        return Err(Error::Domain(format!(
            "curvature ratio must be >= 1 for the harmonic approximation, got {mu}"
        )));
    }
    let ratio = (R::one() - mu) / (R::one() + mu);
    Ok(ratio * ratio)
}

/// Schmidt parameter implied by the Gaussian widths of the same state,
/// `((1−√μ)/(1+√μ))²`. This is the value the grid Schmidt decomposition
/// reproduces (see `oracle::arbitrate_zx`); [`z_from_curvature`] is kept
/// as the published closed form and the two are reported side by side.
pub fn z_implied_by_widths<R: Real>(mu: R) -> Result<R> {
    if !(mu >= R::one()) {
        return Err(Error::Domain(format!(
            "curvature ratio must be >= 1 for the harmonic approximation, got {mu}"
        )));
    }
    let s = mu.sqrt();
    let ratio = (R::one() - s) / (R::one() + s);
    Ok(ratio * ratio)
}

/// `z_y = ((ε²−1)^{1/4} − √ε)² / ((ε²−1)^{1/4} + √ε)²` from the trap
/// anisotropy. `ε = 1` returns exactly 1 (isotropic limit); `ε → ∞`
/// tends to 0.
pub fn z_from_anisotropy<R: Real>(epsilon: R) -> Result<R> {
    if !(epsilon >= R::one()) {
        return Err(Error::Domain(format!(
            "anisotropy must be >= 1, got {epsilon}"
        )));
    }
    if epsilon == R::one() {
        return Ok(R::one());
    }
    let q = (epsilon * epsilon - R::one()).powf(R::of(0.25));
    let s = epsilon.sqrt();
    let ratio = (q - s) / (q + s);
    Ok(ratio * ratio)
}

/// Power sum `M(m) = Σ_j λ_j^m` of the full (untruncated) product
/// spectrum: `Π_i (1−z_i)^m / (1−z_i^m)`.
///
/// `M(1) = 1` exactly. `z = 1` is accepted as the symmetry limit, where
/// the axis factor is 1 for `m = 1` and 0 for `m > 1`.
pub fn power_sum<R: Real>(zs: &[R], m: usize) -> Result<R> {
    if m == 0 {
        return Err(Error::Domain("power-sum order must be >= 1".into()));
    }
    validate_zs(zs, true)?;
    if m == 1 {
        return Ok(R::one());
    }
    let mut product = R::one();
    for &z in zs {
        if z == R::one() {
            return Ok(R::zero());
        }
        let numer = (R::one() - z).powi(m as i32);
        // 1 - z^m via expm1 keeps precision for z near 1
        let denom = -(R::of_usize(m) * z.ln()).exp_m1();
        product = product * numer / denom;
    }
    Ok(product)
}

/// Purity `P = M(2) = Π_i (1−z_i)/(1+z_i)`. Shares the [`power_sum`]
/// code path so that `S_L = 1 − M(2)` holds bit-exactly.
pub fn purity<R: Real>(zs: &[R]) -> Result<R> {
    power_sum(zs, 2)
}

fn validate_zs<R: Real>(zs: &[R], allow_one: bool) -> Result<()> {
    if zs.is_empty() {
        return Err(Error::Domain("at least one generating parameter".into()));
    }
    for &z in zs {
        let ok = if allow_one {
            z >= R::zero() && z <= R::one()
        } else {
            z >= R::zero() && z < R::one()
        };
        if !ok {
            return Err(Error::Domain(format!(
                "generating parameter out of range: z = {z}"
            )));
        }
    }
    Ok(())
}

/// Truncated, descending-sorted product Schmidt spectrum.
#[derive(Debug, Clone)]
pub struct OccupationSpectrum<R: Real> {
    lambdas: Vec<R>,
    log_lambdas: Vec<R>,
    labels: Vec<Vec<u32>>,
    zs: Vec<R>,
    tail: R,
}

impl<R: Real> OccupationSpectrum<R> {
    /// Build from generating parameters with the per-axis geometric tail
    /// rule: axis `i` keeps `J_i = ⌈ln(tail_tol/d)/ln(z_i)⌉` modes
    /// (`J_i = 1` for `z_i = 0`), then all product occupations are sorted
    /// descending. `tail` is the exact discarded mass
    /// `1 − Π_i (1 − z_i^{J_i})`.
    pub fn build(zs: &[R], tail_tol: R) -> Result<Self> {
        Self::build_with_min_modes(zs, tail_tol, 1)
    }

    /// As [`build`](Self::build), but grows the per-axis truncations
    /// (largest next occupation first) until at least `min_modes` product
    /// modes are retained. Pair computations need `J ≥ N` even when the
    /// extra modes carry negligible mass.
    pub fn build_with_min_modes(zs: &[R], tail_tol: R, min_modes: usize) -> Result<Self> {
        validate_zs(zs, false)?;
        for &z in zs {
            if z == R::one() {
                return Err(Error::Domain(
                    "z = 1 has no normalizable spectrum; use the symmetry-limit analytics".into(),
                ));
            }
        }
        if !(tail_tol > R::zero()) || tail_tol > R::of(1e-3) {
            return Err(Error::Domain(format!(
                "tail tolerance must lie in (0, 1e-3], got {tail_tol}"
            )));
        }

        let axes = zs.len();
        let per_axis_budget = tail_tol / R::of_usize(axes);
        let mut counts: Vec<usize> = zs
            .iter()
            .map(|&z| {
                if z == R::zero() {
                    1
                } else {
                    let j = (per_axis_budget.ln() / z.ln()).ceil();
                    j.to_usize().unwrap_or(usize::MAX).max(1)
                }
            })
            .collect();

        let total = |counts: &[usize]| -> usize {
            counts
                .iter()
                .try_fold(1usize, |acc, &c| acc.checked_mul(c))
                .unwrap_or(usize::MAX)
        };

        // Grow the axis whose next geometric term is largest until the
        // product grid is big enough.
        while total(&counts) < min_modes {
            let next = counts
                .iter()
                .zip(zs)
                .enumerate()
                .filter(|(_, (_, &z))| z > R::zero())
                .max_by(|(_, (ca, &za)), (_, (cb, &zb))| {
                    let ta = R::of_usize(**ca) * za.ln();
                    let tb = R::of_usize(**cb) * zb.ln();
                    ta.partial_cmp(&tb).expect("finite tail terms")
                })
                .map(|(i, _)| i);
            match next {
                Some(i) => counts[i] += 1,
                None => {
                    return Err(Error::InfeasibleFilling(format!(
                        "spectrum has {} mode(s) but {} were requested and every z is 0",
                        total(&counts),
                        min_modes
                    )))
                }
            }
        }

        Self::from_axis_counts(zs, &counts)
    }

    /// Product spectrum with explicitly pinned per-axis mode counts;
    /// `tail` is still the exact discarded geometric mass.
    pub fn geometric_truncated(zs: &[R], counts: &[usize]) -> Result<Self> {
        validate_zs(zs, false)?;
        if counts.len() != zs.len() {
            return Err(Error::Domain(format!(
                "{} axis counts for {} generating parameters",
                counts.len(),
                zs.len()
            )));
        }
        if counts.contains(&0) {
            return Err(Error::Domain("every axis needs at least one mode".into()));
        }
        Self::from_axis_counts(zs, counts)
    }

    fn from_axis_counts(zs: &[R], counts: &[usize]) -> Result<Self> {
        let axes = zs.len();
        let retained = counts
            .iter()
            .try_fold(1usize, |acc, &c| acc.checked_mul(c))
            .unwrap_or(usize::MAX);
        if retained > MODE_CAP {
            return Err(Error::Capacity(format!(
                "z values {:?} need {retained} modes (cap {MODE_CAP})",
                zs.iter().map(|z| z.to_f64().unwrap_or(f64::NAN)).collect::<Vec<_>>()
            )));
        }

        // Enumerate the product grid.
        let log_one_minus: Vec<R> = zs.iter().map(|&z| (R::one() - z).ln()).collect();
        let log_z: Vec<R> = zs.iter().map(|&z| z.ln()).collect();
        let mut entries: Vec<(R, Vec<u32>)> = Vec::with_capacity(retained);
        let counts = counts.to_vec();
        let mut index = vec![0u32; axes];
        loop {
            let mut ll = R::zero();
            for (axis, &j) in index.iter().enumerate() {
                ll = ll + log_one_minus[axis];
                if j > 0 {
                    ll = ll + R::of_usize(j as usize) * log_z[axis];
                }
            }
            entries.push((ll, index.clone()));
            // odometer increment
            let mut axis = axes;
            loop {
                if axis == 0 {
                    break;
                }
                axis -= 1;
                index[axis] += 1;
                if (index[axis] as usize) < counts[axis] {
                    break;
                }
                index[axis] = 0;
                if axis == 0 {
                    break;
                }
            }
            if index.iter().all(|&j| j == 0) {
                break;
            }
        }
        debug_assert_eq!(entries.len(), retained);

        entries.sort_by(|a, b| {
            b.0.partial_cmp(&a.0)
                .expect("occupations are finite")
                .then_with(|| a.1.cmp(&b.1))
        });

        // Exact discarded mass of the truncation box.
        let mut kept_mass = R::one();
        for (&z, &count) in zs.iter().zip(&counts) {
            let log_zj = R::of_usize(count) * z.ln();
            kept_mass = kept_mass * (-log_zj.exp_m1());
        }
        let tail = (R::one() - kept_mass).max(R::zero());

        let log_lambdas: Vec<R> = entries.iter().map(|(ll, _)| *ll).collect();
        let lambdas: Vec<R> = log_lambdas.iter().map(|ll| ll.exp()).collect();
        let labels: Vec<Vec<u32>> = entries.into_iter().map(|(_, label)| label).collect();

        Ok(Self {
            lambdas,
            log_lambdas,
            labels,
            zs: zs.to_vec(),
            tail,
        })
    }

    /// Number of retained modes.
    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    /// Occupations, sorted descending. Entries may underflow to 0 for
    /// very deep truncations; [`log_lambdas`](Self::log_lambdas) carries
    /// the full range and is what the normalization-factor machinery
    /// consumes.
    pub fn lambdas(&self) -> &[R] {
        &self.lambdas
    }

    /// `ln λ`, same order as [`lambdas`](Self::lambdas).
    pub fn log_lambdas(&self) -> &[R] {
        &self.log_lambdas
    }

    /// Per-mode multi-indices `(j_x, j_{y,1}, …)`.
    pub fn labels(&self) -> &[Vec<u32>] {
        &self.labels
    }

    pub fn zs(&self) -> &[R] {
        &self.zs
    }

    /// Exact bound on the discarded probability mass.
    pub fn tail(&self) -> R {
        self.tail
    }

    /// Retained mass plus tail; equals 1 up to rounding.
    pub fn mass_check(&self) -> R {
        compensated_sum(self.lambdas.iter().copied()) + self.tail
    }

    /// Direct truncated power sum `Σ λ^m` over the retained modes.
    pub fn direct_power_sum(&self, m: u32) -> R {
        compensated_sum(self.lambdas.iter().map(|&l| l.powi(m as i32)))
    }
}

/// Per-axis entropy terms (bits).
#[derive(Debug, Clone)]
pub struct AxisEntropies<R: Real> {
    pub z: R,
    pub von_neumann: R,
    pub renyi: Vec<R>,
    pub min_entropy: R,
    pub max_entropy: R,
    pub linear: R,
}

/// Entanglement entropies of the product spectrum (bits).
#[derive(Debug, Clone)]
pub struct EntropyReport<R: Real> {
    pub linear: R,
    pub von_neumann: R,
    /// `(α, S^α)` pairs in request order.
    pub renyi: Vec<(R, R)>,
    pub min_entropy: R,
    pub max_entropy: R,
    pub per_axis: Vec<AxisEntropies<R>>,
}

fn axis_von_neumann<R: Real>(z: R) -> R {
    if z == R::zero() {
        return R::zero();
    }
    if z == R::one() {
        return R::infinity();
    }
    let one_minus = R::one() - z;
    -(one_minus * one_minus.ln() + z * z.ln()) / (one_minus * R::LN_2())
}

fn axis_renyi<R: Real>(z: R, alpha: R) -> R {
    if alpha == R::one() {
        return axis_von_neumann(z);
    }
    if z == R::zero() {
        return R::zero();
    }
    if z == R::one() {
        return R::infinity();
    }
    // (1/(1−α)) log2((1−z)^α / (1−z^α))
    let log_num = alpha * (R::one() - z).ln();
    let log_den = (-(alpha * z.ln()).exp_m1()).ln();
    (log_num - log_den) / ((R::one() - alpha) * R::LN_2())
}

fn axis_min_entropy<R: Real>(z: R) -> R {
    if z == R::one() {
        return R::infinity();
    }
    -(R::one() - z).log2()
}

fn axis_max_entropy<R: Real>(z: R) -> R {
    if z == R::zero() {
        R::zero()
    } else {
        R::infinity()
    }
}

/// All closed-form entropies of the product spectrum with parameters `zs`,
/// for the requested Rényi orders. Additive quantities (`S^α`, `S_vN`,
/// `S^∞`, `S⁰`) are sums of per-axis terms; the linear entropy is
/// `1 − Π (1−z)/(1+z)`. A `z = 1` axis produces the divergence sentinel
/// `+∞` on the additive entropies and `S_L = 1`.
pub fn entropies<R: Real>(zs: &[R], alphas: &[R]) -> Result<EntropyReport<R>> {
    validate_zs(zs, true)?;
    for &alpha in alphas {
        if !(alpha > R::zero()) {
            return Err(Error::Domain(format!(
                "Rényi order must be positive, got {alpha}"
            )));
        }
    }

    let per_axis: Vec<AxisEntropies<R>> = zs
        .iter()
        .map(|&z| AxisEntropies {
            z,
            von_neumann: axis_von_neumann(z),
            renyi: alphas.iter().map(|&a| axis_renyi(z, a)).collect(),
            min_entropy: axis_min_entropy(z),
            max_entropy: axis_max_entropy(z),
            linear: R::one() - (R::one() - z) / (R::one() + z),
        })
        .collect();

    let sum_over_axes = |pick: &dyn Fn(&AxisEntropies<R>) -> R| -> R {
        per_axis.iter().map(pick).fold(R::zero(), |a, b| a + b)
    };

    // power_sum returns 0 for m = 2 on a z = 1 axis, so this is also the
    // divergence sentinel S_L = 1
    let linear = R::one() - power_sum(zs, 2)?;

    Ok(EntropyReport {
        linear,
        von_neumann: sum_over_axes(&|ax| ax.von_neumann),
        renyi: alphas
            .iter()
            .enumerate()
            .map(|(k, &a)| (a, sum_over_axes(&|ax| ax.renyi[k])))
            .collect(),
        min_entropy: sum_over_axes(&|ax| ax.min_entropy),
        max_entropy: sum_over_axes(&|ax| ax.max_entropy),
        per_axis,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coulomb_with_scaled_strength() -> InteractionSpec<f64> {
        // 2γg/m_r = 8  ⇒  g = 2 for γ = 1.
        InteractionSpec::coulomb(2.0).unwrap()
    }

    #[test]
    fn equilibrium_closed_form_cube() {
        let approx = solve_equilibrium(&coulomb_with_scaled_strength()).unwrap();
        assert!((approx.x0 - 2.0).abs() < 1e-14);
        assert!(approx.valid);
    }

    #[test]
    fn coulomb_curvature_ratio_squared_is_three() {
        let approx = solve_equilibrium(&coulomb_with_scaled_strength()).unwrap();
        assert!((approx.mu * approx.mu - 3.0).abs() < 1e-14);
    }

    #[test]
    fn generic_descriptor_matches_closed_form() {
        let custom = InteractionSpec::custom(Box::new(InversePower { exponent: 1.0 }), 2.0).unwrap();
        let reference = solve_equilibrium(&coulomb_with_scaled_strength()).unwrap();
        let got = solve_equilibrium(&custom).unwrap();
        assert!(
            ((got.x0 - reference.x0) / reference.x0).abs() < 1e-10,
            "bisection x0 = {}, closed form = {}",
            got.x0,
            reference.x0
        );
        assert!((got.mu - reference.mu).abs() < 1e-6);
    }

    #[test]
    fn weak_coupling_flagged_not_failed() {
        let weak = InteractionSpec::coulomb(0.01).unwrap();
        let approx = solve_equilibrium(&weak).unwrap();
        assert!(approx.x0 < 2.0);
        assert!(!approx.valid);
    }

    #[test]
    fn bounded_force_without_root_is_a_solver_failure() {
        // 𝒱 = 1/(1+r²) has −𝒱'/r ≤ 2 everywhere, so a weak enough
        // coupling admits no equilibrium bracket
        struct Soft;
        impl PairPotential<f64> for Soft {
            fn value(&self, r: f64) -> f64 {
                1.0 / (1.0 + r * r)
            }
            fn d1(&self, r: f64) -> f64 {
                -2.0 * r / (1.0 + r * r).powi(2)
            }
            fn d2(&self, r: f64) -> f64 {
                (6.0 * r * r - 2.0) / (1.0 + r * r).powi(3)
            }
        }
        let weak = InteractionSpec::custom(Box::new(Soft), 0.05).unwrap();
        assert!(matches!(solve_equilibrium(&weak), Err(Error::Solver(_))));
        // strong coupling does have one
        let strong = InteractionSpec::custom(Box::new(Soft), 10.0).unwrap();
        let approx = solve_equilibrium(&strong).unwrap();
        assert!(approx.x0 > 0.0);
    }

    #[test]
    fn attractive_descriptor_rejected() {
        struct Attractive;
        impl PairPotential<f64> for Attractive {
            fn value(&self, r: f64) -> f64 {
                r
            }
            fn d1(&self, _r: f64) -> f64 {
                1.0
            }
            fn d2(&self, _r: f64) -> f64 {
                0.0
            }
        }
        let spec = InteractionSpec::custom(Box::new(Attractive), 1.0).unwrap();
        assert!(matches!(solve_equilibrium(&spec), Err(Error::Domain(_))));
    }

    #[test]
    fn z_from_curvature_limits() {
        assert_eq!(z_from_curvature(1.0f64).unwrap(), 0.0);
        // μ = √3 (Coulomb): z = 7 − 4√3
        let z = z_from_curvature(3f64.sqrt()).unwrap();
        assert!((z - 0.07179676972449083).abs() < 1e-15);
        // μ → ∞ tends to 1
        assert!(z_from_curvature(1e9f64).unwrap() > 1.0 - 1e-8);
        assert!(matches!(z_from_curvature(0.5f64), Err(Error::Domain(_))));
    }

    #[test]
    fn z_implied_by_widths_coulomb() {
        let z = z_implied_by_widths(3f64.sqrt()).unwrap();
        assert!((z - 0.018623989297427888).abs() < 1e-15);
    }

    #[test]
    fn z_from_anisotropy_values() {
        assert_eq!(z_from_anisotropy(1.0f64).unwrap(), 1.0);
        let z = z_from_anisotropy(2f64.sqrt()).unwrap();
        assert!((z - 7.469666729509582e-3).abs() < 1e-15);
        assert!(z_from_anisotropy(1e3f64).unwrap() < 1e-6);
        assert!(matches!(z_from_anisotropy(0.99f64), Err(Error::Domain(_))));
    }

    #[test]
    fn spectrum_single_mode_for_zero_z() {
        let spec = OccupationSpectrum::build(&[0.0f64], 1e-6).unwrap();
        assert_eq!(spec.len(), 1);
        assert_eq!(spec.lambdas()[0], 1.0);
        assert_eq!(spec.tail(), 0.0);
    }

    #[test]
    fn spectrum_geometric_closed_form() {
        let spec = OccupationSpectrum::build(&[0.5f64], 1e-12).unwrap();
        assert_eq!(spec.len(), 40);
        for (j, &l) in spec.lambdas().iter().enumerate() {
            let expect = 0.5f64.powi(j as i32 + 1);
            assert!(((l - expect) / expect).abs() < 1e-14, "mode {j}");
        }
        assert!((spec.mass_check() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn spectrum_product_degenerate_pair() {
        let spec = OccupationSpectrum::build(&[0.5f64, 0.5], 1e-12).unwrap();
        assert!((spec.lambdas()[0] - 0.25).abs() < 1e-15);
        assert!((spec.lambdas()[1] - 0.125).abs() < 1e-15);
        assert!((spec.lambdas()[2] - 0.125).abs() < 1e-15);
        // degenerate modes stay distinct and labeled
        assert_ne!(spec.labels()[1], spec.labels()[2]);
        assert!((spec.mass_check() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn spectrum_sorted_descending_with_deterministic_ties() {
        let spec = OccupationSpectrum::build(&[0.3f64, 0.7], 1e-10).unwrap();
        for w in spec.lambdas().windows(2) {
            assert!(w[0] >= w[1]);
        }
        let rebuilt = OccupationSpectrum::build(&[0.3f64, 0.7], 1e-10).unwrap();
        assert_eq!(spec.labels(), rebuilt.labels());
    }

    #[test]
    fn spectrum_min_modes_growth() {
        let spec = OccupationSpectrum::build_with_min_modes(&[0.05f64], 1e-6, 160).unwrap();
        assert!(spec.len() >= 160);
        assert!((spec.mass_check() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn spectrum_rejects_z_one_and_bad_tolerance() {
        assert!(matches!(
            OccupationSpectrum::build(&[1.0f64], 1e-6),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            OccupationSpectrum::build(&[0.5f64], 1e-2),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn spectrum_capacity_error_names_offenders() {
        let err = OccupationSpectrum::build(&[0.9999f64, 0.9999], 1e-12).unwrap_err();
        match err {
            Error::Capacity(msg) => assert!(msg.contains("0.9999")),
            other => panic!("expected capacity error, got {other:?}"),
        }
    }

    #[test]
    fn power_sum_unit_and_geometric() {
        assert_eq!(power_sum(&[0.37f64, 0.9], 1).unwrap(), 1.0);
        let m2 = power_sum(&[0.5f64], 2).unwrap();
        assert!((m2 - 1.0 / 3.0).abs() < 1e-15);
        // near-isotropic 2D second power sum is tiny
        let m = power_sum(&[0.9f64, 0.9999], 2).unwrap();
        assert!(m < 3e-6);
    }

    #[test]
    fn power_sum_matches_direct_sum() {
        for &z in &[0.2f64, 0.5, 0.9] {
            let spec = OccupationSpectrum::build(&[z], 1e-14).unwrap();
            for m in 2..=5u32 {
                let closed = power_sum(&[z], m as usize).unwrap();
                let direct = spec.direct_power_sum(m);
                assert!(
                    ((closed - direct) / closed).abs() < 1e-12,
                    "z = {z}, m = {m}: closed {closed} vs direct {direct}"
                );
            }
        }
    }

    #[test]
    fn entropies_pure_state() {
        let report = entropies(&[0.0f64], &[2.0, 3.0]).unwrap();
        assert_eq!(report.linear, 0.0);
        assert_eq!(report.von_neumann, 0.0);
        assert_eq!(report.min_entropy, 0.0);
        assert_eq!(report.max_entropy, 0.0);
        assert!(report.renyi.iter().all(|&(_, s)| s == 0.0));
    }

    #[test]
    fn von_neumann_two_bits_at_half() {
        let report = entropies(&[0.5f64], &[]).unwrap();
        assert!((report.von_neumann - 2.0).abs() < 1e-12);
    }

    #[test]
    fn renyi_two_is_log2_of_three_at_half() {
        let report = entropies(&[0.5f64], &[2.0]).unwrap();
        let s2 = report.renyi[0].1;
        assert!((s2 - 3f64.log2()).abs() < 1e-12);
        // S² = −log₂ M(2)
        let m2 = power_sum(&[0.5f64], 2).unwrap();
        assert!((s2 + m2.log2()).abs() < 1e-12);
    }

    #[test]
    fn von_neumann_matches_direct_sum() {
        let spec = OccupationSpectrum::build(&[0.5f64], 1e-14).unwrap();
        let direct: f64 = -spec.lambdas().iter().map(|&l| l * l.log2()).sum::<f64>();
        let closed = entropies(&[0.5f64], &[]).unwrap().von_neumann;
        assert!((closed - direct).abs() < 1e-10);
    }

    #[test]
    fn entropy_divergence_sentinel_at_isotropy() {
        let report = entropies(&[0.3f64, 1.0], &[2.0]).unwrap();
        assert_eq!(report.linear, 1.0);
        assert!(report.von_neumann.is_infinite());
        assert!(report.renyi[0].1.is_infinite());
        assert!(report.min_entropy.is_infinite());
        assert!(report.max_entropy.is_infinite());
    }

    #[test]
    fn linear_entropy_is_one_minus_purity() {
        let zs = [0.4f64, 0.8];
        let report = entropies(&zs, &[]).unwrap();
        let m2 = power_sum(&zs, 2).unwrap();
        assert_eq!(report.linear, 1.0 - m2);
    }

    #[test]
    fn works_in_f32_too() {
        let spec = OccupationSpectrum::build(&[0.5f32], 1e-3f32).unwrap();
        assert!((spec.mass_check() - 1.0).abs() < 1e-5);
        let m2 = power_sum(&[0.5f32], 2).unwrap();
        assert!((m2 - 1.0 / 3.0).abs() < 1e-6);
    }
}
