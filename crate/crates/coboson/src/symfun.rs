//! Normalization factors `χ_N` as symmetric polynomials of the Schmidt
//! occupations.
//!
//! Fermionic factors are scaled elementary symmetric polynomials,
//! `χ_N^F = N!·e_N(λ)`; bosonic factors are scaled complete homogeneous
//! ones, `χ_N^B = N!·h_N(λ)`. The production path is the all-positive
//! dynamic program carried in log domain, which survives the catastrophic
//! underflow of large-`N` factors. Two independent verification paths —
//! the alternating-sign recursion over power sums and the non-recursive
//! partition sum — run in exact rational arithmetic, because their
//! cancellation can exceed a hundred decimal digits.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::logspace::{ln_add_exp, ln_factorial, ln_sum_exp};
use crate::scalar::Real;
use crate::spectrum::OccupationSpectrum;

/// Pair-count guard for the partition sum (p(30) = 5604 partitions).
pub const PARTITION_PAIR_CAP: usize = 30;
/// Advisory flag threshold: decimal digits of cancellation the extended
/// precision budget is sized for.
pub const CANCELLATION_BUDGET_DIGITS: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChiKind {
    Fermionic,
    Bosonic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChiMethod {
    /// Log-domain dynamic program over the truncated spectrum.
    DynamicProgram,
    /// Recursion over power sums, exact rational arithmetic.
    NewtonRecursion,
    /// Non-recursive partition sum, exact rational arithmetic.
    PartitionSum,
}

/// Cancellation diagnostics for the alternating-sign paths.
#[derive(Debug, Clone, Copy)]
pub struct Cancellation {
    /// `log10(max |partial term| / χ_N)` — decimal digits lost to
    /// cancellation. Exact arithmetic absorbs them; the estimate is
    /// advisory.
    pub digits_lost: f64,
    /// Set when the loss exceeds [`CANCELLATION_BUDGET_DIGITS`].
    pub flagged: bool,
}

/// `ln χ_n` for `n = 0..=N`, with provenance and error diagnostics.
#[derive(Debug, Clone)]
pub struct ChiTable<R: Real> {
    kind: ChiKind,
    method: ChiMethod,
    log_chi: Vec<R>,
    tail_error: R,
    cancellation: Option<Cancellation>,
}

impl<R: Real> ChiTable<R> {
    /// Largest pair count in the table.
    pub fn pair_count(&self) -> usize {
        self.log_chi.len() - 1
    }

    /// `χ_n`; exact 0 is represented as `ln χ = −∞`.
    pub fn chi(&self, n: usize) -> R {
        self.log_chi[n].exp()
    }

    pub fn log_chi(&self, n: usize) -> R {
        self.log_chi[n]
    }

    pub fn log_chis(&self) -> &[R] {
        &self.log_chi
    }

    pub fn is_zero(&self, n: usize) -> bool {
        self.log_chi[n] == R::neg_infinity()
    }

    pub fn kind(&self) -> ChiKind {
        self.kind
    }

    pub fn method(&self) -> ChiMethod {
        self.method
    }

    /// Heuristic truncation-error bound `N·tail/λ_min` propagated from the
    /// spectrum; 0 for the exact closed-form paths.
    pub fn tail_error(&self) -> R {
        self.tail_error
    }

    pub fn cancellation(&self) -> Option<Cancellation> {
        self.cancellation
    }
}

/// `χ_{N+1}/χ_N` from the top two entries of a table built at `N+1`.
/// Exact 0 when the numerator vanishes (Pauli blocking); error when the
/// denominator vanishes.
pub fn ratio<R: Real>(table: &ChiTable<R>) -> Result<R> {
    ratio_at(table, table.pair_count())
}

/// `χ_n/χ_{n−1}` anywhere inside a table.
pub fn ratio_at<R: Real>(table: &ChiTable<R>, n: usize) -> Result<R> {
    if n == 0 || n > table.pair_count() {
        return Err(Error::Domain(format!(
            "ratio index must lie in 1..={}, got {n}",
            table.pair_count()
        )));
    }
    if table.is_zero(n - 1) {
        return Err(Error::UndefinedRatio);
    }
    if table.is_zero(n) {
        return Ok(R::zero());
    }
    Ok((table.log_chi(n) - table.log_chi(n - 1)).exp())
}

/// Chudzicki bounds `1 − N·P ≤ χ_{N+1}/χ_N ≤ 1 − P` for purity `P`.
#[derive(Debug, Clone, Copy)]
pub struct BoundPair<R: Real> {
    pub lower: R,
    pub upper: R,
    pub purity: R,
}

pub fn bounds<R: Real>(purity: R, n_pairs: usize) -> Result<BoundPair<R>> {
    if !(purity > R::zero() && purity <= R::one()) {
        return Err(Error::Domain(format!(
            "purity must lie in (0, 1], got {purity}"
        )));
    }
    if n_pairs == 0 {
        return Err(Error::Domain("bounds need at least one pair".into()));
    }
    Ok(BoundPair {
        lower: R::one() - R::of_usize(n_pairs) * purity,
        upper: R::one() - purity,
        purity,
    })
}

/// Log-domain DP for elementary symmetric polynomials:
/// `e_k^{(m)} = e_k^{(m−1)} + λ_m e_{k−1}^{(m−1)}`, all-positive.
/// Returns `ln e_k` for `k = 0..=order`; `−∞` is an exact zero.
fn log_elementary<R: Real>(log_lambdas: impl Iterator<Item = R>, order: usize) -> Vec<R> {
    let mut e = vec![R::neg_infinity(); order + 1];
    e[0] = R::zero();
    for ll in log_lambdas {
        for k in (1..=order).rev() {
            e[k] = ln_add_exp(e[k], ll + e[k - 1]);
        }
    }
    e
}

/// Log-domain DP for complete homogeneous symmetric polynomials:
/// `h_k^{(m)} = h_k^{(m−1)} + λ_m h_{k−1}^{(m)}`.
fn log_homogeneous<R: Real>(log_lambdas: impl Iterator<Item = R>, order: usize) -> Vec<R> {
    let mut h = vec![R::neg_infinity(); order + 1];
    h[0] = R::zero();
    for ll in log_lambdas {
        for k in 1..=order {
            h[k] = ln_add_exp(h[k], ll + h[k - 1]);
        }
    }
    h
}

fn tail_error_bound<R: Real>(spectrum: &OccupationSpectrum<R>, n_pairs: usize) -> R {
    if spectrum.is_empty() || spectrum.tail() == R::zero() {
        return R::zero();
    }
    let lambda_min = spectrum.lambdas()[spectrum.len() - 1];
    if lambda_min == R::zero() {
        return R::infinity();
    }
    R::of_usize(n_pairs) * spectrum.tail() / lambda_min
}

fn table_from_log_sym<R: Real>(
    kind: ChiKind,
    method: ChiMethod,
    log_sym: Vec<R>,
    tail_error: R,
) -> ChiTable<R> {
    let log_chi = log_sym
        .into_iter()
        .enumerate()
        .map(|(n, ls)| ln_factorial::<R>(n) + ls)
        .collect();
    ChiTable {
        kind,
        method,
        log_chi,
        tail_error,
        cancellation: None,
    }
}

/// Fermionic `χ_n^F = n!·e_n(λ)` for `n = 0..=n_pairs` over the retained
/// spectrum. `χ_n = 0` exactly (not an error) once `n` exceeds the mode
/// count: Pauli blocking.
pub fn chi_fermi_dp<R: Real>(spectrum: &OccupationSpectrum<R>, n_pairs: usize) -> ChiTable<R> {
    let log_e = log_elementary(spectrum.log_lambdas().iter().copied(), n_pairs);
    table_from_log_sym(
        ChiKind::Fermionic,
        ChiMethod::DynamicProgram,
        log_e,
        tail_error_bound(spectrum, n_pairs),
    )
}

/// Bosonic `χ_n^B = n!·h_n(λ)` for `n = 0..=n_pairs`.
pub fn chi_bose<R: Real>(spectrum: &OccupationSpectrum<R>, n_pairs: usize) -> ChiTable<R> {
    let log_h = log_homogeneous(spectrum.log_lambdas().iter().copied(), n_pairs);
    table_from_log_sym(
        ChiKind::Bosonic,
        ChiMethod::DynamicProgram,
        log_h,
        tail_error_bound(spectrum, n_pairs),
    )
}

/// Fermionic table with one mode removed, recomputed from scratch
/// (`O(J·N)`); the numerically safe reference for populations.
pub fn chi_excluding<R: Real>(
    spectrum: &OccupationSpectrum<R>,
    mode: usize,
    n_pairs: usize,
) -> Result<ChiTable<R>> {
    if mode >= spectrum.len() {
        return Err(Error::UnknownMode(mode));
    }
    let log_e = log_elementary(
        spectrum
            .log_lambdas()
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != mode)
            .map(|(_, &ll)| ll),
        n_pairs,
    );
    Ok(table_from_log_sym(
        ChiKind::Fermionic,
        ChiMethod::DynamicProgram,
        log_e,
        tail_error_bound(spectrum, n_pairs),
    ))
}

/// Sub-spectrum selector for [`chi_subset`]: the `t` largest retained
/// occupations, or everything else.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubsetRange {
    FirstModes(usize),
    Complement(usize),
}

/// Fermionic `χ_n` over a sub-spectrum. `χ_{n>t} = 0` over the first `t`
/// modes, which is what caps window populations at `t`.
pub fn chi_subset<R: Real>(
    spectrum: &OccupationSpectrum<R>,
    range: SubsetRange,
    n: usize,
) -> Result<R> {
    Ok(chi_subset_table(spectrum, range, n)?.chi(n))
}

/// Full table `0..=n_max` over a sub-spectrum (log domain).
pub fn chi_subset_table<R: Real>(
    spectrum: &OccupationSpectrum<R>,
    range: SubsetRange,
    n_max: usize,
) -> Result<ChiTable<R>> {
    let t = match range {
        SubsetRange::FirstModes(t) | SubsetRange::Complement(t) => t,
    };
    if t > spectrum.len() {
        return Err(Error::Domain(format!(
            "window size {t} exceeds the {} retained modes",
            spectrum.len()
        )));
    }
    let lls = spectrum.log_lambdas();
    let log_e = match range {
        SubsetRange::FirstModes(_) => log_elementary(lls[..t].iter().copied(), n_max),
        SubsetRange::Complement(_) => log_elementary(lls[t..].iter().copied(), n_max),
    };
    Ok(table_from_log_sym(
        ChiKind::Fermionic,
        ChiMethod::DynamicProgram,
        log_e,
        tail_error_bound(spectrum, n_max),
    ))
}

/// `ln e_{order}(λ ∖ λ_j)` for every retained mode `j`, via the
/// prefix/suffix convolution
/// `e_n(A ∪ B) = Σ_k e_k(A)·e_{n−k}(B)`
/// with block checkpointing. All-positive, so it is as stable as the
/// plain DP but costs `O(J·N)` total instead of `O(J²·N)`.
pub(crate) fn log_elementary_excluding_each<R: Real>(
    log_lambdas: &[R],
    order: usize,
) -> Vec<R> {
    let modes = log_lambdas.len();
    if modes == 0 {
        return Vec::new();
    }
    const BLOCK: usize = 1024;
    let n_blocks = modes.div_ceil(BLOCK);

    // Suffix checkpoints: e-table over modes[c*BLOCK..] for each block c,
    // built in one backward sweep.
    let mut checkpoints: Vec<Vec<R>> = vec![Vec::new(); n_blocks + 1];
    let mut suffix = vec![R::neg_infinity(); order + 1];
    suffix[0] = R::zero();
    checkpoints[n_blocks] = suffix.clone();
    for j in (0..modes).rev() {
        let ll = log_lambdas[j];
        for k in (1..=order).rev() {
            suffix[k] = ln_add_exp(suffix[k], ll + suffix[k - 1]);
        }
        if j % BLOCK == 0 {
            checkpoints[j / BLOCK] = suffix.clone();
        }
    }

    let mut out = vec![R::neg_infinity(); modes];
    let mut prefix = vec![R::neg_infinity(); order + 1];
    prefix[0] = R::zero();
    let mut combine_buf = vec![R::neg_infinity(); order + 1];

    for block in 0..n_blocks {
        let start = block * BLOCK;
        let end = (start + BLOCK).min(modes);
        // Suffix rows S_j = e over modes[j+1..] for j in the block,
        // rebuilt backward from the next checkpoint.
        let mut rows: Vec<Vec<R>> = vec![Vec::new(); end - start];
        let mut table = checkpoints[block + 1].clone();
        for j in (start..end).rev() {
            rows[j - start] = table.clone();
            let ll = log_lambdas[j];
            for k in (1..=order).rev() {
                table[k] = ln_add_exp(table[k], ll + table[k - 1]);
            }
        }

        for j in start..end {
            let srow = &rows[j - start];
            for k in 0..=order {
                combine_buf[k] = prefix[k] + srow[order - k];
            }
            out[j] = ln_sum_exp(&combine_buf);
            // extend prefix with mode j
            let ll = log_lambdas[j];
            for k in (1..=order).rev() {
                prefix[k] = ln_add_exp(prefix[k], ll + prefix[k - 1]);
            }
        }
    }
    out
}

/// Exact rational power sums `M(1..=max_order)`.
///
/// Built from geometric generating parameters they are exact, which is
/// what lets the alternating-sign paths survive hundred-digit
/// cancellation; imported floating-point values are flagged and guarded.
#[derive(Debug, Clone)]
pub struct PowerSums {
    values: Vec<BigRational>,
    exact: bool,
}

impl PowerSums {
    /// Exact power sums of a product of geometric spectra. Accepts
    /// `z ∈ [0, 1]`; `z = 1` contributes the symmetry-limit factor
    /// (1 for `m = 1`, 0 for `m > 1`).
    pub fn geometric(zs: &[f64], max_order: usize) -> Result<Self> {
        if max_order == 0 {
            return Err(Error::Domain("power-sum order must be >= 1".into()));
        }
        let mut rationals = Vec::with_capacity(zs.len());
        for &z in zs {
            if !(0.0..=1.0).contains(&z) {
                return Err(Error::Domain(format!(
                    "generating parameter out of range: z = {z}"
                )));
            }
            rationals.push(BigRational::from_float(z).expect("finite z"));
        }
        let one = BigRational::one();
        let mut values = Vec::with_capacity(max_order);
        for m in 1..=max_order {
            if m == 1 {
                values.push(one.clone());
                continue;
            }
            let mut product = one.clone();
            for z in &rationals {
                if z.is_one() {
                    product = BigRational::zero();
                    break;
                }
                let one_minus = &one - z;
                let z_m = pow_rational(z, m);
                product = product * pow_rational(&one_minus, m) / (&one - &z_m);
            }
            values.push(product);
        }
        Ok(Self {
            values,
            exact: true,
        })
    }

    /// Import floating-point power sums (`values[0] = M(1)`). The exact
    /// paths then only amplify the input rounding, which is reported and
    /// guarded.
    pub fn from_values(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Domain("need at least M(1)".into()));
        }
        let rationals = values
            .iter()
            .map(|&v| {
                BigRational::from_float(v)
                    .ok_or_else(|| Error::Domain(format!("power sum not finite: {v}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            values: rationals,
            exact: false,
        })
    }

    pub fn max_order(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, m: usize) -> &BigRational {
        &self.values[m - 1]
    }

    pub fn get_f64(&self, m: usize) -> f64 {
        self.values[m - 1].to_f64().unwrap_or(f64::NAN)
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }
}

fn pow_rational(base: &BigRational, exp: usize) -> BigRational {
    let mut acc = BigRational::one();
    let mut b = base.clone();
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            acc *= &b;
        }
        b = &b * &b;
        e >>= 1;
    }
    acc
}

/// `ln` of a non-negative rational; `−∞` for zero.
fn ln_rational(value: &BigRational) -> f64 {
    if value.is_zero() {
        return f64::NEG_INFINITY;
    }
    ln_bigint(value.numer()) - ln_bigint(value.denom())
}

fn ln_bigint(value: &BigInt) -> f64 {
    let value = value.magnitude();
    let bits = value.bits();
    if bits <= 52 {
        return value.to_f64().expect("small magnitude").ln();
    }
    let shift = bits - 52;
    let top = (value >> shift).to_f64().expect("52-bit magnitude");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

fn big_factorial(n: usize) -> BigInt {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= k;
    }
    acc
}

struct SignedAccumulator {
    total: BigRational,
    max_term_ln: f64,
}

impl SignedAccumulator {
    fn new() -> Self {
        Self {
            total: BigRational::zero(),
            max_term_ln: f64::NEG_INFINITY,
        }
    }

    fn add(&mut self, term: BigRational) {
        let magnitude = ln_rational(&term.abs());
        if magnitude > self.max_term_ln {
            self.max_term_ln = magnitude;
        }
        self.total = &self.total + term;
    }

    fn cancellation(&self) -> Cancellation {
        let result_ln = ln_rational(&self.total.abs());
        let digits_lost = ((self.max_term_ln - result_ln) / std::f64::consts::LN_10).max(0.0);
        Cancellation {
            digits_lost,
            flagged: digits_lost > CANCELLATION_BUDGET_DIGITS,
        }
    }
}

fn guard_imported_accuracy(power_sums: &PowerSums, cancellation: &Cancellation) -> Result<()> {
    // Imported f64 sums carry ~16 significant digits; once cancellation
    // eats more than half of them the result cannot support the 1e-8
    // verification tolerance.
    if !power_sums.is_exact() && cancellation.digits_lost > 8.0 {
        return Err(Error::Accuracy(format!(
            "{:.1} digits lost to cancellation with floating-point power sums; \
             use chi_fermi_dp or exact geometric power sums",
            cancellation.digits_lost
        )));
    }
    Ok(())
}

/// Fermionic `χ_n` for `n = 0..=n_pairs` by the recursion
/// `χ_N = Σ_{m=1}^{N} (N−1)!/(N−m)! (−1)^{m+1} χ_{N−m} M(m)`,
/// in exact rational arithmetic. Verification path.
pub fn chi_fermi_newton<R: Real>(power_sums: &PowerSums, n_pairs: usize) -> Result<ChiTable<R>> {
    if power_sums.max_order() < n_pairs {
        return Err(Error::Domain(format!(
            "need power sums up to order {n_pairs}, have {}",
            power_sums.max_order()
        )));
    }
    let mut chis: Vec<BigRational> = Vec::with_capacity(n_pairs + 1);
    chis.push(BigRational::one());
    let mut worst = Cancellation {
        digits_lost: 0.0,
        flagged: false,
    };
    for n in 1..=n_pairs {
        let mut acc = SignedAccumulator::new();
        // (N−1)!/(N−m)! built up incrementally: m = 1 term has factor 1.
        let mut falling = BigInt::one();
        for m in 1..=n {
            let mut term = &chis[n - m] * power_sums.get(m);
            term *= BigRational::from_integer(falling.clone());
            if m % 2 == 0 {
                term = -term;
            }
            acc.add(term);
            falling *= n - m; // next factor of (N−1)!/(N−m−1)!
        }
        let cancellation = acc.cancellation();
        if cancellation.digits_lost > worst.digits_lost {
            worst = cancellation;
        }
        if acc.total.is_negative() {
            return Err(Error::Accuracy(format!(
                "recursion produced χ_{n} < 0 from inexact power sums; use chi_fermi_dp"
            )));
        }
        chis.push(acc.total);
    }
    guard_imported_accuracy(power_sums, &worst)?;
    let log_chi = chis.iter().map(|c| R::of(ln_rational(c))).collect();
    Ok(ChiTable {
        kind: ChiKind::Fermionic,
        method: ChiMethod::NewtonRecursion,
        log_chi,
        tail_error: R::zero(),
        cancellation: Some(worst),
    })
}

/// The recursion of [`chi_fermi_newton`] in plain `f64`, with the same
/// cancellation tracking promoted to a hard guard: the call fails unless
/// the result retains at least 8 significant digits. Intended for the
/// near-bosonic regime (`M(m>1) ≈ 0`), where the alternating sum does not
/// cancel and exact rationals would be needlessly expensive at large `N`.
pub fn chi_fermi_newton_float(power_sums: &[f64], n_pairs: usize) -> Result<ChiTable<f64>> {
    if power_sums.len() < n_pairs {
        return Err(Error::Domain(format!(
            "need power sums up to order {n_pairs}, have {}",
            power_sums.len()
        )));
    }
    let mut chis: Vec<f64> = Vec::with_capacity(n_pairs + 1);
    chis.push(1.0);
    let mut worst = Cancellation {
        digits_lost: 0.0,
        flagged: false,
    };
    for n in 1..=n_pairs {
        let mut total = 0.0f64;
        let mut max_term = 0.0f64;
        let mut falling = 1.0f64;
        for m in 1..=n {
            let mut term = chis[n - m] * power_sums[m - 1] * falling;
            if m % 2 == 0 {
                term = -term;
            }
            max_term = max_term.max(term.abs());
            total += term;
            falling *= (n - m) as f64;
        }
        let digits_lost = if total > 0.0 {
            (max_term / total).log10().max(0.0)
        } else {
            f64::INFINITY
        };
        if digits_lost > worst.digits_lost {
            worst = Cancellation {
                digits_lost,
                flagged: digits_lost > CANCELLATION_BUDGET_DIGITS,
            };
        }
        if !total.is_finite() || !(total > 0.0) || digits_lost > 8.0 {
            return Err(Error::Accuracy(format!(
                "floating-point recursion lost {digits_lost:.1} digits at χ_{n}; \
                 use chi_fermi_newton or chi_fermi_dp"
            )));
        }
        chis.push(total);
    }
    Ok(ChiTable {
        kind: ChiKind::Fermionic,
        method: ChiMethod::NewtonRecursion,
        log_chi: chis.into_iter().map(f64::ln).collect(),
        tail_error: 0.0,
        cancellation: Some(worst),
    })
}

/// Fermionic `χ_N` by the non-recursive partition sum
/// `N!·Σ (−1)^{Σk_i + N} Π (M(i)/i)^{k_i}/k_i!` over all solutions of
/// `k_1 + 2k_2 + … + N·k_N = N`, exact rational arithmetic.
/// Verification path; guarded at `N ≤ 30`.
pub fn chi_fermi_partition(power_sums: &PowerSums, n_pairs: usize) -> Result<f64> {
    let (value, _) = partition_value(power_sums, n_pairs)?;
    Ok(value.to_f64().unwrap_or_else(|| ln_rational(&value).exp()))
}

/// Partition-sum table for `n = 0..=n_pairs`.
pub fn chi_fermi_partition_table<R: Real>(
    power_sums: &PowerSums,
    n_pairs: usize,
) -> Result<ChiTable<R>> {
    let mut log_chi = Vec::with_capacity(n_pairs + 1);
    let mut worst = Cancellation {
        digits_lost: 0.0,
        flagged: false,
    };
    for n in 0..=n_pairs {
        let (value, cancellation) = partition_value(power_sums, n)?;
        if value.is_negative() {
            return Err(Error::Accuracy(format!(
                "partition sum produced χ_{n} < 0 from inexact power sums; use chi_fermi_dp"
            )));
        }
        log_chi.push(R::of(ln_rational(&value)));
        if cancellation.digits_lost > worst.digits_lost {
            worst = cancellation;
        }
    }
    guard_imported_accuracy(power_sums, &worst)?;
    Ok(ChiTable {
        kind: ChiKind::Fermionic,
        method: ChiMethod::PartitionSum,
        log_chi,
        tail_error: R::zero(),
        cancellation: Some(worst),
    })
}

fn partition_value(power_sums: &PowerSums, n_pairs: usize) -> Result<(BigRational, Cancellation)> {
    if n_pairs > PARTITION_PAIR_CAP {
        return Err(Error::Capacity(format!(
            "partition sum guarded at N ≤ {PARTITION_PAIR_CAP}, got {n_pairs}"
        )));
    }
    if n_pairs == 0 {
        return Ok((
            BigRational::one(),
            Cancellation {
                digits_lost: 0.0,
                flagged: false,
            },
        ));
    }
    if power_sums.max_order() < n_pairs {
        return Err(Error::Domain(format!(
            "need power sums up to order {n_pairs}, have {}",
            power_sums.max_order()
        )));
    }

    let mut acc = SignedAccumulator::new();
    // Depth-first enumeration of k_1 + 2k_2 + … = N, accumulating
    // Π (M(i)/i)^{k_i}/k_i! and the sign (−1)^{Σk_i + N}.
    fn visit(
        power_sums: &PowerSums,
        part: usize,
        remaining: usize,
        parity: usize,
        weight: BigRational,
        acc: &mut SignedAccumulator,
        n_pairs: usize,
    ) {
        if remaining == 0 {
            let term = if (parity + n_pairs) % 2 == 0 {
                weight
            } else {
                -weight
            };
            acc.add(term);
            return;
        }
        if part > remaining {
            return;
        }
        // k_part copies of part
        let base = power_sums.get(part) / BigRational::from_integer(BigInt::from(part));
        let mut power = BigRational::one();
        let mut k_factorial = BigInt::one();
        let mut k = 0usize;
        while k * part <= remaining {
            if k > 0 {
                power *= &base;
                k_factorial *= k;
            }
            let contribution = &weight * &power / BigRational::from_integer(k_factorial.clone());
            visit(
                power_sums,
                part + 1,
                remaining - k * part,
                parity + k,
                contribution,
                acc,
                n_pairs,
            );
            k += 1;
        }
    }
    visit(
        power_sums,
        1,
        n_pairs,
        0,
        BigRational::one(),
        &mut acc,
        n_pairs,
    );

    let cancellation = acc.cancellation();
    let total = acc.total * BigRational::from_integer(big_factorial(n_pairs));
    Ok((total, cancellation))
}
