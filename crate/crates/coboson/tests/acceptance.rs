//! Acceptance suite: one test per criterion, one printed pass/fail line
//! each (run with `cargo test --test acceptance -- --nocapture` to see the
//! lines for passing criteria).
//!
//! Three sub-clauses pin idealized thresholds that the exact
//! mathematics of the implemented formulas does not meet (verified
//! against independent exact-arithmetic references); they are asserted
//! as pinned and fail with the measured values in the message rather
//! than being loosened. See the failure text of criteria 3, 4 and 6 and
//! the README section on the acceptance suite.

use std::fs;
use std::path::PathBuf;

use coboson::density::{peaks, profile, GridSpec, OrbitalBasis};
use coboson::logspace::compensated_sum;
use coboson::observables::{
    counting, dos, fit_be, fit_fd, populations, spectrum_for_pairs, uniform_degeneracy,
};
use coboson::oracle::{
    arbitrate_zx, chi_bruteforce, counting_bruteforce, fock_density, geometric_log_chi,
    product_claim_report, ZxFormula,
};
use coboson::spectrum::{
    entropies, power_sum, purity, solve_equilibrium, z_implied_by_widths, InteractionSpec,
    OccupationSpectrum,
};
use coboson::symfun::{
    chi_bose, chi_fermi_dp, chi_fermi_newton, chi_fermi_newton_float, chi_fermi_partition_table,
    ratio_at, ChiKind, PowerSums,
};

/// Sub-clause collector: evaluates everything, then reports one line.
struct Criterion {
    name: &'static str,
    failures: Vec<String>,
}

impl Criterion {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(detail());
        }
    }

    fn finish(self, pass_detail: &str) {
        if self.failures.is_empty() {
            println!("[{}] PASS — {pass_detail}", self.name);
        } else {
            println!("[{}] FAIL — {} clause(s):", self.name, self.failures.len());
            for f in &self.failures {
                println!("    {f}");
            }
            panic!("[{}] FAIL — {:?}", self.name, self.failures);
        }
    }
}

fn fig1_z_grid() -> Vec<f64> {
    (0..200)
        .map(|k| (0.01 * (199 - k) as f64 + 0.99 * k as f64) / 199.0)
        .collect()
}

#[test]
fn criterion_01_oracle_chi_equivalence() {
    let mut c = Criterion::new("criterion 1");
    for &z in &[0.3f64, 0.6, 0.9] {
        // exhaustive enumeration over the identical 12-mode truncation
        let spec = OccupationSpectrum::geometric_truncated(&[z], &[12]).unwrap();
        let fermi = chi_fermi_dp(&spec, 6);
        let bose = chi_bose(&spec, 6);
        for n in 1..=6usize {
            let brute_f = chi_bruteforce(spec.lambdas(), n, ChiKind::Fermionic).unwrap();
            let rel = ((fermi.chi(n) - brute_f) / brute_f).abs();
            c.check(rel < 1e-10, || {
                format!("dp vs brute fermionic z={z} N={n}: rel {rel:.3e}")
            });
            let brute_b = chi_bruteforce(spec.lambdas(), n, ChiKind::Bosonic).unwrap();
            let rel = ((bose.chi(n) - brute_b) / brute_b).abs();
            c.check(rel < 1e-10, || {
                format!("dp vs brute bosonic z={z} N={n}: rel {rel:.3e}")
            });
        }

        // recursion and partition sum against the dp on a deep truncation
        let deep = OccupationSpectrum::build_with_min_modes(&[z], 1e-14, 40).unwrap();
        let dp = chi_fermi_dp(&deep, 20);
        let sums = PowerSums::geometric(&[z], 20).unwrap();
        let newton: coboson::Chi = chi_fermi_newton(&sums, 20).unwrap();
        let partition: coboson::Chi = chi_fermi_partition_table(&sums, 20).unwrap();
        for n in 1..=20usize {
            let d_newton = (newton.log_chi(n) - dp.log_chi(n)).abs();
            c.check(d_newton < 1e-8, || {
                format!("newton vs dp z={z} N={n}: Δln χ {d_newton:.3e}")
            });
            let d_part = (partition.log_chi(n) - dp.log_chi(n)).abs();
            c.check(d_part < 1e-8, || {
                format!("partition vs dp z={z} N={n}: Δln χ {d_part:.3e}")
            });
        }
    }
    c.finish("dp/bose match brute force to 1e-10; newton/partition match dp to 1e-8 at N ≤ 20");
}

#[test]
fn criterion_02_bound_containment() {
    let mut c = Criterion::new("criterion 2");
    let pair_counts = [1usize, 2, 5, 10, 15, 20, 150];
    for &z in &fig1_z_grid() {
        // at N = 1 the bounds collapse to the equality ratio = 1 − P, so
        // the spectrum tail must sit well below the 1e-12 slop
        let spec = spectrum_for_pairs(&[z], 1e-14, 151).unwrap();
        let table = chi_fermi_dp(&spec, 151);
        let p = purity(&[z]).unwrap();
        for &n in &pair_counts {
            let r = ratio_at(&table, n + 1).unwrap();
            let lower = (1.0 - n as f64 * p).max(0.0);
            let upper = 1.0 - p;
            c.check(r >= lower - 1e-12 && r <= upper + 1e-12, || {
                format!("z={z:.4} N={n}: ratio {r:.12} outside [{lower:.12}, {upper:.12}]")
            });
        }
    }

    // z = 0.9999, N = 150: the f64 recursion is valid here (no
    // cancellation) and is cross-checked against the exact geometric
    // closed form before asserting the bound.
    let z = 0.9999f64;
    let ms: Vec<f64> = (1..=151).map(|m| power_sum(&[z], m).unwrap()).collect();
    let table = chi_fermi_newton_float(&ms, 151).unwrap();
    let r = ratio_at(&table, 151).unwrap();
    let exact = (geometric_log_chi(z, 151, ChiKind::Fermionic).unwrap()
        - geometric_log_chi(z, 150, ChiKind::Fermionic).unwrap())
    .exp();
    c.check((r - exact).abs() < 1e-10, || {
        format!("newton ratio {r:.15} vs exact geometric {exact:.15}")
    });
    let p = purity(&[z]).unwrap();
    let bound = 1.0 - 150.0 * p;
    c.check(r >= bound, || {
        format!("z=0.9999 N=150: ratio {r:.10} < 1 − 150·P = {bound:.10}")
    });
    c.finish(&format!(
        "ratio within Chudzicki bounds on the full 7×200 sweep; ratio(0.9999, 150) = {r:.6} ≥ {bound:.6}"
    ));
}

#[test]
fn criterion_03_population_sum_rule_and_step() {
    let mut c = Criterion::new("criterion 3");
    for &n_pairs in &[5usize, 10] {
        for &z in &fig1_z_grid() {
            let spec = spectrum_for_pairs(&[z], 1e-12, n_pairs).unwrap();
            let profile = populations(&spec, n_pairs).unwrap();
            c.check(profile.sum_residual() < 1e-8, || {
                format!(
                    "sum rule z={z:.4} N={n_pairs}: residual {:.3e}",
                    profile.sum_residual()
                )
            });
            if let Some(&worst) = profile
                .populations()
                .iter()
                .max_by(|a, b| a.partial_cmp(b).unwrap())
            {
                c.check(worst <= 1.0 + 1e-10, || {
                    format!("Pauli bound z={z:.4} N={n_pairs}: max n_j = {worst}")
                });
            }
        }
    }

    // Step property exactly as stated. The exact values at the Fermi
    // edge are n_9 = 0.900999 and n_10 = 0.099001 (verified by
    // independent exact-fraction enumeration), so the 0.99/0.01
    // thresholds cannot hold at j = 9, 10.
    let spec = spectrum_for_pairs(&[0.1f64], 1e-12, 10).unwrap();
    let profile = populations(&spec, 10).unwrap();
    for (j, &n) in profile.populations().iter().enumerate() {
        if j < 10 {
            c.check(n > 0.99, || {
                format!("step property: n_{j} = {n:.6} ≤ 0.99 (exact Fermi-edge value; the threshold is an idealization — see README)")
            });
        } else {
            c.check(n < 0.01, || {
                format!("step property: n_{j} = {n:.6} ≥ 0.01 (exact Fermi-edge value; the threshold is an idealization — see README)")
            });
        }
    }
    c.finish("sum rule ≤ 1e-8 and Pauli bound hold on the full sweep; step property as stated");
}

#[test]
fn criterion_04_effective_temperature_fits() {
    let mut c = Criterion::new("criterion 4");

    // planted-parameter round trip on noiseless synthetic data
    let (j_mu, t_eff) = (7.0f64, 0.8);
    let synthetic: Vec<f64> = (0..40)
        .map(|j| 1.0 / (((j as f64 - j_mu) / t_eff).exp() + 1.0))
        .collect();
    let fit = fit_fd(&synthetic, &uniform_degeneracy(40)).unwrap();
    c.check((fit.j_mu - j_mu).abs() < 1e-6, || {
        format!("round trip j_mu: {} vs planted {j_mu}", fit.j_mu)
    });
    c.check((fit.t_eff - t_eff).abs() < 1e-6, || {
        format!("round trip t_eff: {} vs planted {t_eff}", fit.t_eff)
    });

    // FD must not fit worse than BE away from the bosonic limit
    for &z in &[0.1f64, 0.6, 0.85] {
        let spec = spectrum_for_pairs(&[z], 1e-12, 10).unwrap();
        let profile = populations(&spec, 10).unwrap();
        let g = uniform_degeneracy(profile.len());
        let dos_values = dos(&profile, &g).unwrap();
        let fd = fit_fd(&dos_values, &g).unwrap();
        let be = fit_be(&dos_values, &g).unwrap();
        c.check(fd.residual <= be.residual, || {
            format!("z={z}: FD residual {} > BE residual {}", fd.residual, be.residual)
        });
    }

    // (N, z) = (10, 0.1) as stated. The exact profile is symmetric about
    // j = 9.5 with edge width 1/ln(1/z), so the true optimum is
    // (j_μ, T̃) = (9.5, 0.2269): T̃ ≤ 0.1 cannot hold.
    let spec = spectrum_for_pairs(&[0.1f64], 1e-12, 10).unwrap();
    let profile = populations(&spec, 10).unwrap();
    let g = uniform_degeneracy(profile.len());
    let dos_values = dos(&profile, &g).unwrap();
    let fd = fit_fd(&dos_values, &g).unwrap();
    c.check(fd.j_mu >= 9.5 && fd.j_mu <= 10.5, || {
        format!(
            "fitted j_mu = {:.9} outside [9.5, 10.5] (the exact-profile optimum sits exactly at 9.5)",
            fd.j_mu
        )
    });
    c.check(fd.t_eff <= 0.1, || {
        format!(
            "fitted T̃ = {:.6} > 0.1 (the exact-profile optimum is 0.2269 — see README)",
            fd.t_eff
        )
    });
    c.finish("round trip to 1e-6; FD ≤ BE at z ∈ {0.1, 0.6, 0.85}; (10, 0.1) clauses as stated");
}

#[test]
fn criterion_05_counting_statistics() {
    let mut c = Criterion::new("criterion 5");

    // normalization and mean consistency across the battery
    let battery: Vec<(f64, usize, usize)> = vec![
        (0.2, 150, 150),
        (0.5, 150, 150),
        (0.8, 150, 150),
        (0.95, 150, 150),
        (0.3, 5, 3),
        (0.7, 12, 8),
        (0.5, 1, 1),
    ];
    let mut variances = Vec::new();
    for &(z, n_pairs, t) in &battery {
        let spec = spectrum_for_pairs(&[z], 1e-12, n_pairs).unwrap();
        let dist = counting(&spec, n_pairs, t).unwrap();
        let total = compensated_sum(dist.probs().iter().copied());
        c.check((total - 1.0).abs() < 1e-10, || {
            format!("ΣP(n) = {total:.15} at (z, N, t) = ({z}, {n_pairs}, {t})")
        });
        let profile = populations(&spec, n_pairs).unwrap();
        let window: f64 = compensated_sum(profile.populations()[..t].iter().copied());
        c.check((dist.mean() - window).abs() < 1e-8, || {
            format!(
                "mean {} vs Σ_{{j<t}} n_j {} at (z, N, t) = ({z}, {n_pairs}, {t})",
                dist.mean(),
                window
            )
        });
        if n_pairs == 150 {
            variances.push((z, dist.variance()));
        }
    }
    for w in variances.windows(2) {
        c.check(w[1].1 > w[0].1, || {
            format!(
                "variance not strictly increasing: ΔN²({}) = {:.6e} vs ΔN²({}) = {:.6e}",
                w[0].0, w[0].1, w[1].0, w[1].1
            )
        });
    }

    // exhaustive enumeration cross-checks
    let spec = OccupationSpectrum::geometric_truncated(&[0.5f64], &[14]).unwrap();
    let dist = counting(&spec, 5, 5).unwrap();
    let brute = counting_bruteforce(spec.lambdas(), 5, 5).unwrap();
    for (n, (&got, &expect)) in dist.probs().iter().zip(&brute).enumerate() {
        let rel = ((got - expect) / expect).abs();
        c.check(rel < 1e-10, || {
            format!("P({n}) = {got:.15} vs brute {expect:.15}: rel {rel:.3e}")
        });
    }
    let small = counting(&spec, 2, 1).unwrap();
    let small_brute = counting_bruteforce(spec.lambdas(), 2, 1).unwrap();
    for (n, (&got, &expect)) in small.probs().iter().zip(&small_brute).enumerate() {
        c.check(((got - expect) / expect).abs() < 1e-10, || {
            format!("N=2 t=1: P({n}) = {got:.15} vs brute {expect:.15}")
        });
    }
    c.finish("ΣP = 1 to 1e-10, mean consistency to 1e-8, Pauli-suppressed variance ordering, brute-force match at N = 5");
}

#[test]
fn criterion_06_friedel_wigner_crossover() {
    let mut c = Criterion::new("criterion 6");
    let probe = OrbitalBasis::unchecked(
        &coboson::spectrum::HarmonicApprox {
            x0: 1.0,
            mu: 3f64.sqrt(),
            valid: true,
        },
        4,
    )
    .unwrap();
    let w = probe.width();

    for n_pairs in [1usize, 2, 3] {
        for (ratio, expected) in [(0.5f64, n_pairs), (4.0, 2 * n_pairs)] {
            let x0 = ratio * w;
            let g = x0.powi(3) / 4.0; // γ = 1: x0³ = 2γg/m_r = 4g
            let interaction = InteractionSpec::coulomb(g).unwrap();
            let approx = solve_equilibrium(&interaction).unwrap();
            c.check((approx.x0 - x0).abs() < 1e-12, || {
                format!("equilibrium inversion: x0 {} vs requested {x0}", approx.x0)
            });
            let z = z_implied_by_widths(approx.mu).unwrap();
            let spec = spectrum_for_pairs(&[z], 1e-12, n_pairs).unwrap();
            let pops = populations(&spec, n_pairs).unwrap();
            let basis = OrbitalBasis::validated(&approx, spec.len()).unwrap();
            let grid = GridSpec::default_for(&basis);
            let density = profile(&pops, &basis, &grid).unwrap();
            c.check(
                (density.norm - 2.0 * n_pairs as f64).abs() < 1e-6,
                || format!("∫ϱ = {} vs 2N = {}", density.norm, 2 * n_pairs),
            );
            c.check(density.rho_total.iter().all(|&v| v >= 0.0), || {
                "negative density sample".to_string()
            });
            let count = peaks(&density, 1e-3).unwrap();
            c.check(count == expected, || {
                format!(
                    "N={n_pairs} x0/w={ratio}: peaks {count} ≠ {expected}{}",
                    if n_pairs == 3 && ratio == 0.5 {
                        " (the N=3 Friedel ripples at x0/w = 0.5 have prominence ~1e-4, below the pinned 1e-3 — see README)"
                    } else {
                        ""
                    }
                )
            });
        }
    }

    // pointwise agreement with the Fock-space construction at N = 2
    let interaction = InteractionSpec::coulomb(20.0).unwrap();
    let approx = solve_equilibrium(&interaction).unwrap();
    let z = z_implied_by_widths(approx.mu).unwrap();
    let spec = OccupationSpectrum::build(&[z], 1e-12).unwrap();
    let pops = populations(&spec, 2).unwrap();
    let basis = OrbitalBasis::validated(&approx, spec.len()).unwrap();
    let grid = GridSpec::default_for(&basis);
    let production = profile(&pops, &basis, &grid).unwrap();
    let oracle_density = fock_density(spec.lambdas(), 2, &basis, &production.xs).unwrap();
    let worst = production
        .rho_total
        .iter()
        .zip(&oracle_density.rho_total)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    c.check(worst < 1e-8, || {
        format!("profile vs Fock density: max pointwise gap {worst:.3e}")
    });
    c.finish("norms 2N to 1e-6, Fock-density agreement to 1e-8 pointwise, peak counts as stated");
}

#[test]
fn criterion_07_symmetry_induced_bosonic_limit() {
    let mut c = Criterion::new("criterion 7");
    let zs = [0.0718f64, 0.9999];
    let p = purity(&zs).unwrap();
    let ms: Vec<f64> = (1..=101).map(|m| power_sum(&zs, m).unwrap()).collect();
    let table = chi_fermi_newton_float(&ms, 101).unwrap();
    let mut ratio_100 = f64::NAN;
    for n in 1..=100usize {
        let r = ratio_at(&table, n + 1).unwrap();
        let bound = 1.0 - n as f64 * p;
        c.check(r >= bound, || {
            format!("N={n}: ratio {r:.10} < 1 − N·P = {bound:.10}")
        });
        if n == 100 {
            ratio_100 = r;
        }
    }
    // headline value at its stated 4-decimal precision (1 − 100·P ≈ 0.9957)
    c.check(ratio_100 >= 0.99565, || {
        format!("ratio at N = 100 is {ratio_100:.6}, below 0.9957 − 5e-5")
    });

    // χ_N ∈ [0.99, 1] for N ≤ 10 at z_y = 1 − 1e-6 via the partition sum
    let sums = PowerSums::geometric(&[0.0718, 1.0 - 1e-6], 10).unwrap();
    let partition: coboson::Chi = chi_fermi_partition_table(&sums, 10).unwrap();
    for n in 1..=10usize {
        let chi = partition.chi(n);
        c.check((0.99..=1.0).contains(&chi), || {
            format!("partition χ_{n} = {chi:.10} outside [0.99, 1]")
        });
    }
    c.finish(&format!(
        "ratio ≥ 1 − N·P up to N = 100 (ratio_100 = {ratio_100:.6}); partition-path χ_N ∈ [0.99, 1] for N ≤ 10"
    ));
}

#[test]
fn criterion_08_entropies() {
    let mut c = Criterion::new("criterion 8");
    let alphas = [0.5f64, 2.0, 3.0];
    for &z in &[0.05f64, 0.3, 0.7, 0.95, 0.999] {
        // deep enough that Σ λ^{1/2} reaches 1e-8 relative convergence
        let depth = ((37.0 / -z.ln()).ceil() as usize).clamp(40, 60_000);
        let spec = OccupationSpectrum::build_with_min_modes(&[z], 1e-14, depth).unwrap();
        let report = entropies(&[z], &alphas).unwrap();
        let direct_vn: f64 = -compensated_sum(
            spec.lambdas()
                .iter()
                .map(|&l| if l > 0.0 { l * l.log2() } else { 0.0 }),
        );
        let rel = ((report.von_neumann - direct_vn) / direct_vn.max(1e-300)).abs();
        c.check(rel < 1e-8 || report.von_neumann == direct_vn, || {
            format!("S_vN closed {} vs direct {} at z={z}", report.von_neumann, direct_vn)
        });
        for (k, &alpha) in alphas.iter().enumerate() {
            let direct_sum: f64 =
                compensated_sum(spec.lambdas().iter().map(|&l| l.powf(alpha)));
            let direct = direct_sum.log2() / (1.0 - alpha);
            let closed = report.renyi[k].1;
            let rel = ((closed - direct) / direct).abs();
            c.check(rel < 1e-8, || {
                format!("S^{alpha} closed {closed} vs direct {direct} at z={z}: rel {rel:.3e}")
            });
        }
    }

    let half = entropies(&[0.5f64], &[]).unwrap();
    c.check((half.von_neumann - 2.0).abs() < 1e-10, || {
        format!("S_vN(0.5) = {} bits", half.von_neumann)
    });

    for &(zx, zy) in &[(0.3f64, 0.8f64), (0.1, 0.5), (0.72, 0.9999)] {
        let both = entropies(&[zx, zy], &alphas).unwrap();
        let x = entropies(&[zx], &alphas).unwrap();
        let y = entropies(&[zy], &alphas).unwrap();
        c.check(
            (both.von_neumann - (x.von_neumann + y.von_neumann)).abs() < 1e-12,
            || format!("S_vN additivity at ({zx}, {zy})"),
        );
        for k in 0..alphas.len() {
            c.check(
                (both.renyi[k].1 - (x.renyi[k].1 + y.renyi[k].1)).abs() < 1e-12,
                || format!("S^{} additivity at ({zx}, {zy})", alphas[k]),
            );
        }
        let m2 = power_sum(&[zx, zy], 2).unwrap();
        c.check(both.linear == 1.0 - m2, || {
            format!("S_L ≠ 1 − M(2) bit-exactly at ({zx}, {zy})")
        });
    }
    c.finish("closed forms match direct sums to 1e-8; S_vN(0.5) = 2 bits; additivity to 1e-12; S_L = 1 − M(2) exactly");
}

#[test]
fn criterion_09_arbitration_artifacts() {
    let mut c = Criterion::new("criterion 9");
    let out_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../target/arbitration");
    fs::create_dir_all(&out_dir).unwrap();

    let mut zx_json = String::from("[\n");
    for (i, mu) in [3f64.sqrt(), 3.0].into_iter().enumerate() {
        let report = arbitrate_zx(mu).unwrap();
        c.check(report.selected == ZxFormula::WidthRatio, || {
            format!("μ = {mu}: selected {:?}", report.selected)
        });
        c.check(report.deviation_width < 1e-6, || {
            format!(
                "μ = {mu}: selected formula deviates from the SVD ratio by {:.3e}",
                report.deviation_width
            )
        });
        c.check(report.ratio_constancy < 1e-6, || {
            format!("μ = {mu}: geometric ratios vary by {:.3e}", report.ratio_constancy)
        });
        if i > 0 {
            zx_json.push_str(",\n");
        }
        zx_json.push_str(&format!(
            "  {{\"mu\": {mu:.17e}, \"measured_ratio\": {:.17e}, \"ratio_constancy\": {:.3e}, \
             \"candidate_curvature_ratio\": {:.17e}, \"candidate_width_ratio\": {:.17e}, \
             \"deviation_curvature_ratio\": {:.3e}, \"deviation_width_ratio\": {:.3e}, \
             \"selected\": \"{}\"}}",
            report.measured_ratio,
            report.ratio_constancy,
            report.candidate_curvature,
            report.candidate_width,
            report.deviation_curvature,
            report.deviation_width,
            report.selected
        ));
    }
    zx_json.push_str("\n]\n");
    fs::write(out_dir.join("zx_formula.json"), &zx_json).unwrap();

    let claim = product_claim_report(0.5, 0.6, 4).unwrap();
    c.check(claim.operator_matches_multiset, || {
        "operator norm does not reproduce the multiset definition".to_string()
    });
    c.check(!claim.factorization_holds, || {
        "2D product claim unexpectedly holds for the multiset definition".to_string()
    });
    let mut convention_json = format!(
        "{{\n  \"zx\": {}, \"zy\": {}, \"modes_per_axis\": {},\n  \
         \"operator_norm_matches_multiset_definition\": {},\n  \
         \"factorization_into_1d_product_holds\": {},\n  \"rows\": [\n",
        claim.zx, claim.zy, claim.modes_per_axis, claim.operator_matches_multiset,
        claim.factorization_holds
    );
    for (i, row) in claim.rows.iter().enumerate() {
        if i > 0 {
            convention_json.push_str(",\n");
        }
        convention_json.push_str(&format!(
            "    {{\"n_pairs\": {}, \"chi_2d_multiset\": {:.17e}, \"chi_1d_product\": {:.17e}, \"relative_gap\": {:.6e}}}",
            row.n_pairs, row.chi_2d, row.chi_product, row.relative_gap
        ));
    }
    convention_json.push_str("\n  ],\n  \"operator_norm_checks\": [\n");
    for (i, row) in claim.norm_checks.iter().enumerate() {
        if i > 0 {
            convention_json.push_str(",\n");
        }
        convention_json.push_str(&format!(
            "    {{\"n_pairs\": {}, \"chi_multiset\": {:.17e}, \"chi_operator\": {:.17e}, \"relative_gap\": {:.6e}}}",
            row.n_pairs, row.chi_multiset, row.chi_operator, row.relative_gap
        ));
    }
    convention_json.push_str("\n  ]\n}\n");
    fs::write(out_dir.join("bosonic_convention.json"), &convention_json).unwrap();

    c.check(out_dir.join("zx_formula.json").exists(), || {
        "zx_formula.json not written".to_string()
    });
    c.check(out_dir.join("bosonic_convention.json").exists(), || {
        "bosonic_convention.json not written".to_string()
    });
    c.finish("grid SVD selects the width formula (matches to 1e-6); convention report archived under target/arbitration/");
}
