//! Real-space density profiles of the `N`-pair state and Friedel/Wigner
//! regime classification.
//!
//! The one-body reduced state of the pair-correlated fermionic state is
//! diagonal in the Schmidt basis, so the total density is
//! `ϱ(x) = Σ_j n_j (|φ_j^{(a)}(x)|² + |φ_j^{(b)}(x)|²)` with the natural
//! orbitals being shifted harmonic-oscillator eigenfunctions of a common
//! width. That decomposition is derived, not quoted, and is therefore
//! validated against the Fock-space oracle (`oracle::fock_density`).

use crate::error::{Error, Result};
use crate::observables::PopulationProfile;
use crate::oracle::{self, OracleGrid, TwoBodyGaussian};
use crate::scalar::Real;
use crate::spectrum::HarmonicApprox;

/// Orbital-index capacity for the eigenfunction recurrence.
pub const HERMITE_INDEX_CAP: usize = 10_000;
/// Default number of density samples.
pub const DEFAULT_GRID_POINTS: usize = 2048;
/// Default peak prominence, as a fraction of the density maximum.
pub const DEFAULT_PROMINENCE: f64 = 1e-3;

/// Orthonormal harmonic-oscillator eigenfunction `ψ_j(ξ)` via the stable
/// three-term recurrence on the normalized functions themselves.
pub fn hermite_fn<R: Real>(j: usize, xi: R) -> Result<R> {
    if j > HERMITE_INDEX_CAP {
        return Err(Error::Capacity(format!(
            "oscillator index {j} exceeds the cap {HERMITE_INDEX_CAP}"
        )));
    }
    let mut prev = R::zero();
    let mut current = R::PI().powf(R::of(-0.25)) * (-xi * xi / R::of(2.0)).exp();
    for k in 0..j {
        let kp1 = R::of_usize(k + 1);
        let next = (R::of(2.0) / kp1).sqrt() * xi * current - (R::of_usize(k) / kp1).sqrt() * prev;
        prev = current;
        current = next;
    }
    Ok(current)
}

/// `ψ_0(ξ)..ψ_{count−1}(ξ)` in one recurrence pass.
fn hermite_all<R: Real>(count: usize, xi: R) -> Vec<R> {
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return out;
    }
    let mut prev = R::zero();
    let mut current = R::PI().powf(R::of(-0.25)) * (-xi * xi / R::of(2.0)).exp();
    out.push(current);
    for k in 0..count - 1 {
        let kp1 = R::of_usize(k + 1);
        let next = (R::of(2.0) / kp1).sqrt() * xi * current - (R::of_usize(k) / kp1).sqrt() * prev;
        prev = current;
        current = next;
        out.push(current);
    }
    out
}

/// Natural orbitals of the shifted two-body Gaussian: oscillator
/// eigenfunctions of common width `w`, species `a` centered at `−x0/2`
/// and species `b` at `+x0/2`.
#[derive(Debug, Clone, Copy)]
pub struct OrbitalBasis<R: Real> {
    width: R,
    center_a: R,
    center_b: R,
    count: usize,
    z_implied: R,
    mu: R,
    x0: R,
}

impl<R: Real> OrbitalBasis<R> {
    /// Construct and validate against the grid Schmidt decomposition:
    /// each analytic mode with `j < 8` must overlap its grid counterpart
    /// to at least `1 − 10⁻⁶`.
    pub fn validated(approx: &HarmonicApprox<R>, count: usize) -> Result<Self> {
        let basis = Self::unchecked(approx, count)?;
        let overlaps = basis.oracle_overlaps()?;
        if overlaps.iter().any(|&o| o < 1.0 - 1e-6) {
            return Err(Error::BasisValidation { overlaps });
        }
        Ok(basis)
    }

    /// Construct from the harmonic approximation without the oracle
    /// cross-check (parameter sweeps that already validated one point).
    pub fn unchecked(approx: &HarmonicApprox<R>, count: usize) -> Result<Self> {
        if !(approx.mu >= R::one()) {
            return Err(Error::Domain(format!(
                "curvature ratio must be >= 1, got {}",
                approx.mu
            )));
        }
        if count == 0 || count > HERMITE_INDEX_CAP {
            return Err(Error::Domain(format!(
                "orbital count must lie in 1..={HERMITE_INDEX_CAP}, got {count}"
            )));
        }
        let mu = approx.mu;
        // kernel exponent parameters of the shifted Gaussian
        let a = (R::one() + mu) / R::of(4.0);
        let b = (R::one() - mu) / R::of(4.0);
        let width = (a * a - b * b).powf(R::of(-0.25)) / R::of(2.0).sqrt();
        let half = approx.x0 / R::of(2.0);
        let sqrt_mu = mu.sqrt();
        let rho = (sqrt_mu - R::one()) / (sqrt_mu + R::one());
        Ok(Self {
            width,
            center_a: -half,
            center_b: half,
            count,
            z_implied: rho * rho,
            mu,
            x0: approx.x0,
        })
    }

    pub fn width(&self) -> R {
        self.width
    }

    pub fn center_a(&self) -> R {
        self.center_a
    }

    pub fn center_b(&self) -> R {
        self.center_b
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// Schmidt parameter implied by the Gaussian widths,
    /// `((1−√μ)/(1+√μ))²`; the value the grid decomposition reproduces.
    pub fn z_implied(&self) -> R {
        self.z_implied
    }

    pub fn x0(&self) -> R {
        self.x0
    }

    pub fn mu(&self) -> R {
        self.mu
    }

    /// `φ_j^{(a)}(x)`.
    pub fn eval_a(&self, j: usize, x: R) -> Result<R> {
        self.eval(j, x, self.center_a)
    }

    /// `φ_j^{(b)}(x)`.
    pub fn eval_b(&self, j: usize, x: R) -> Result<R> {
        self.eval(j, x, self.center_b)
    }

    fn eval(&self, j: usize, x: R, center: R) -> Result<R> {
        if j >= self.count {
            return Err(Error::UnknownMode(j));
        }
        let xi = (x - center) / self.width;
        Ok(hermite_fn(j, xi)? / self.width.sqrt())
    }

    fn eval_all(&self, x: R, center: R) -> Vec<R> {
        let xi = (x - center) / self.width;
        let scale = self.width.sqrt().recip();
        hermite_all(self.count, xi)
            .into_iter()
            .map(|v| v * scale)
            .collect()
    }

    pub(crate) fn eval_all_a(&self, x: R) -> Vec<R> {
        self.eval_all(x, self.center_a)
    }

    pub(crate) fn eval_all_b(&self, x: R) -> Vec<R> {
        self.eval_all(x, self.center_b)
    }

    /// Overlap of each analytic mode (`j < 8`) with the grid Schmidt mode
    /// of the two-body Gaussian; modes whose occupation is below 1e-14
    /// carry no testable weight and report 1.
    fn oracle_overlaps(&self) -> Result<Vec<f64>> {
        let mu = self.mu.to_f64().expect("finite curvature ratio");
        let x0 = self.x0.to_f64().expect("finite separation");
        let gaussian = TwoBodyGaussian::from_harmonic(mu, x0);
        let grid = OracleGrid::auto(&gaussian);
        let schmidt = oracle::grid_schmidt(&gaussian, &grid)?;

        let width = self.width.to_f64().expect("finite width");
        let center_a = self.center_a.to_f64().expect("finite center");
        let dx = schmidt.dx();
        let checked = 8.min(self.count).min(schmidt.occupations().len());
        let mut overlaps = Vec::with_capacity(checked);
        for j in 0..checked {
            if schmidt.occupations()[j] < 1e-14 {
                overlaps.push(1.0);
                continue;
            }
            let mode = schmidt.mode_a(j);
            let mut dot = 0.0;
            for (p, &x) in schmidt.xs().iter().enumerate() {
                let xi = (x - center_a) / width;
                let analytic = hermite_fn(j, xi)? / width.sqrt();
                dot += mode[p] * analytic;
            }
            overlaps.push((dot * dx.sqrt()).abs());
        }
        Ok(overlaps)
    }
}

/// Uniform sampling window for density profiles.
#[derive(Debug, Clone, Copy)]
pub struct GridSpec<R: Real> {
    pub points: usize,
    pub half_width: R,
}

impl<R: Real> GridSpec<R> {
    /// Default window: `x0/2 + w·(√(2J) + 4)` covers the classical
    /// turning point of the highest retained orbital plus four widths.
    pub fn default_for(basis: &OrbitalBasis<R>) -> Self {
        let span = basis.x0() / R::of(2.0)
            + basis.width() * ((R::of(2.0) * R::of_usize(basis.count())).sqrt() + R::of(4.0));
        Self {
            points: DEFAULT_GRID_POINTS,
            half_width: span,
        }
    }

    pub fn xs(&self) -> Vec<R> {
        let n = self.points;
        let step = R::of(2.0) * self.half_width / R::of_usize(n - 1);
        (0..n)
            .map(|i| -self.half_width + step * R::of_usize(i))
            .collect()
    }
}

/// Sampled densities per species and total.
#[derive(Debug, Clone)]
pub struct DensityGrid<R: Real> {
    pub xs: Vec<R>,
    pub rho_a: Vec<R>,
    pub rho_b: Vec<R>,
    pub rho_total: Vec<R>,
    /// Trapezoid quadrature of `rho_total`; 2N when grid-converged.
    pub norm: R,
}

pub(crate) fn trapezoid<R: Real>(xs: &[R], ys: &[R]) -> R {
    let mut acc = R::zero();
    for i in 1..xs.len() {
        acc = acc + (ys[i] + ys[i - 1]) * (xs[i] - xs[i - 1]) / R::of(2.0);
    }
    acc
}

/// Density profile from mode populations and the orbital basis.
///
/// The grid must cover `±(x0/2 + w√(2J))` (classical turning point of the
/// highest retained orbital).
pub fn profile<R: Real>(
    populations: &PopulationProfile<R>,
    basis: &OrbitalBasis<R>,
    grid: &GridSpec<R>,
) -> Result<DensityGrid<R>> {
    if basis.count() < populations.len() {
        return Err(Error::Domain(format!(
            "basis holds {} orbitals for {} populated modes",
            basis.count(),
            populations.len()
        )));
    }
    if grid.points < 2 {
        return Err(Error::Domain("grid needs at least 2 points".into()));
    }
    let required = basis.x0() / R::of(2.0)
        + basis.width() * (R::of(2.0) * R::of_usize(populations.len())).sqrt();
    if grid.half_width < required {
        return Err(Error::GridCoverage(format!(
            "half-width {} is below the orbital support {}",
            grid.half_width, required
        )));
    }

    let xs = grid.xs();
    let n = populations.populations();
    let mut rho_a = Vec::with_capacity(xs.len());
    let mut rho_b = Vec::with_capacity(xs.len());
    let mut rho_total = Vec::with_capacity(xs.len());
    for &x in &xs {
        let phis_a = basis.eval_all_a(x);
        let phis_b = basis.eval_all_b(x);
        let mut da = R::zero();
        let mut db = R::zero();
        for (j, &pop) in n.iter().enumerate() {
            da = da + pop * phis_a[j] * phis_a[j];
            db = db + pop * phis_b[j] * phis_b[j];
        }
        rho_a.push(da);
        rho_b.push(db);
        rho_total.push(da + db);
    }
    let norm = trapezoid(&xs, &rho_total);
    Ok(DensityGrid {
        xs,
        rho_a,
        rho_b,
        rho_total,
        norm,
    })
}

/// Count the local maxima of `rho_total` whose prominence (height above
/// the higher of the two flanking minima) exceeds `prominence × max(ϱ)`.
/// Plateaus count once.
pub fn peaks<R: Real>(grid: &DensityGrid<R>, prominence: R) -> Result<usize> {
    if !(prominence > R::zero() && prominence < R::of(0.5)) {
        return Err(Error::Domain(format!(
            "prominence fraction must lie in (0, 0.5), got {prominence}"
        )));
    }
    let rho = &grid.rho_total;
    let n = rho.len();
    if n < 3 {
        return Ok(0);
    }
    let max_rho = rho.iter().fold(R::zero(), |a, &b| a.max(b));
    if max_rho <= R::zero() {
        return Ok(0);
    }
    let threshold = prominence * max_rho;

    // plateau-safe local maxima: strict rise into the plateau, strict
    // fall out of it
    let mut candidates: Vec<usize> = Vec::new();
    let mut i = 1;
    while i < n - 1 {
        if rho[i] > rho[i - 1] {
            let mut j = i;
            while j + 1 < n && rho[j + 1] == rho[i] {
                j += 1;
            }
            if j + 1 < n && rho[j + 1] < rho[i] {
                candidates.push(i);
                i = j + 1;
                continue;
            }
            i = j + 1;
            continue;
        }
        i += 1;
    }

    let mut count = 0;
    for &peak in &candidates {
        // nearest flanking minima
        let mut left = rho[peak];
        let mut k = peak;
        while k > 0 && rho[k - 1] <= rho[k] {
            k -= 1;
            left = left.min(rho[k]);
        }
        let mut right = rho[peak];
        let mut k = peak;
        while k + 1 < n && rho[k + 1] <= rho[k] {
            k += 1;
            right = right.min(rho[k]);
        }
        let baseline = left.max(right);
        if rho[peak] - baseline > threshold {
            count += 1;
        }
    }
    Ok(count)
}

/// Oscillation regime by peak count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `N` peaks for `2N` particles.
    Friedel,
    /// `2N` peaks: one per particle.
    Wigner,
    Intermediate,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Regime::Friedel => write!(f, "friedel"),
            Regime::Wigner => write!(f, "wigner"),
            Regime::Intermediate => write!(f, "intermediate"),
        }
    }
}

pub fn classify(peak_count: usize, n_pairs: usize) -> Regime {
    if peak_count == n_pairs {
        Regime::Friedel
    } else if peak_count == 2 * n_pairs {
        Regime::Wigner
    } else {
        Regime::Intermediate
    }
}
