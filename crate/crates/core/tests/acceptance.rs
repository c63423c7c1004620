//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Run with `cargo test --test acceptance`.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use dp_profile::circulant::{norm_bounds, CirculantOperator};
use dp_profile::eval::{fit_scaling, sweep, Distribution, ErrorReport, SynthSpec};
use dp_profile::mechanism::{privatize, unfold, Histogram, ReconstructionConfig};
use dp_profile::oracle::{
    bisection_tau, dense_left_solve, dense_operator_for, dense_solve, equality_constrained_ls, iterated_adjustment,
    matrix_norm_1, matrix_norm_2, matrix_norm_inf, monte_carlo_generator,
};
use dp_profile::reconstruct::{
    fast_inversion_values, reconstruct_profile_with, rounding, threshold_adjust, threshold_tau, OperatorCache,
    Profile, RelaxedSolution,
};
use dp_profile::twoparty::{
    alice_message, bob_profile, profile_identity, protocol_config, run_protocol, sensitivity_bound, PartyVector,
};
use dp_profile::{seeded_rng, Norm, SeededRng};

type Outcome = Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Option<Duration>,
    run: fn() -> Outcome,
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_vec(rng: &mut SeededRng, m: usize) -> Vec<f64> {
    (0..m).map(|_| rng.random_range(-1.0..1.0)).collect()
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Random profile over `0..=n` whose entries are multiples of `1/d`.
fn random_profile(rng: &mut SeededRng, n: u64, d: usize) -> Profile {
    let mut bins = vec![0u64; n as usize + 1];
    // skewed item placement so profiles are not all near-uniform
    let weights: Vec<f64> = (0..=n).map(|_| rng.random::<f64>().powi(3)).collect();
    let total: f64 = weights.iter().sum();
    for _ in 0..d {
        let mut u = rng.random::<f64>() * total;
        let mut t = 0;
        while t < n as usize && u >= weights[t] {
            u -= weights[t];
            t += 1;
        }
        bins[t] += 1;
    }
    Profile::new(bins.into_iter().map(|k| k as f64 / d as f64).collect()).unwrap()
}

const SMALL_CONFIGS: [(u64, u64, f64); 3] = [(32, 4, 1.0), (64, 6, 0.5), (128, 8, 2.0)];

fn c1_oracle_equivalence() -> Outcome {
    let mut rng = seeded_rng(1);
    let mut worst = 0.0f64;
    for (n, b, eps) in SMALL_CONFIGS {
        let op = CirculantOperator::new(n, b, eps).map_err(|e| e.to_string())?;
        let dense = dense_operator_for(n, b, eps).map_err(|e| e.to_string())?;
        for _ in 0..50 {
            let x = random_vec(&mut rng, op.m());
            let pairs = [
                (op.apply(&x).unwrap(), dense.apply(&x)),
                (op.apply_inverse(&x).unwrap(), dense_solve(&dense, &x).unwrap()),
                (op.left_apply_inverse(&x).unwrap(), dense_left_solve(&dense, &x).unwrap()),
            ];
            for (fast, slow) in &pairs {
                worst = worst.max(max_abs_diff(fast, slow));
            }
        }
    }
    check(worst <= 1e-8, || format!("max abs difference {worst:e} > 1e-8"))?;
    Ok(format!("max abs difference {worst:.2e} over 450 products"))
}

fn c2_eigenvalues() -> Outcome {
    let mut worst = 0.0f64;
    for (n, b, eps) in SMALL_CONFIGS {
        let op = CirculantOperator::new(n, b, eps).map_err(|e| e.to_string())?;
        let direct = dense_operator_for(n, b, eps).unwrap().direct_eigenvalues();
        for (closed, exact) in op.eigenvalues().iter().zip(&direct) {
            worst = worst.max((closed - exact).norm() / exact.norm());
        }
    }
    check(worst <= 1e-10, || format!("max relative error {worst:e} > 1e-10"))?;
    Ok(format!("max relative error {worst:.2e}"))
}

fn c3_generator_expectation() -> Outcome {
    let (n, d, trials) = (16u64, 1000usize, 10_000usize);
    let cfg = ReconstructionConfig::new(1.0, 0.05, n, d, Norm::L2).map_err(|e| e.to_string())?;
    let op = CirculantOperator::new(n, cfg.b(), cfg.epsilon).unwrap();
    let m = cfg.m();
    // each averaged bin is a mean of trials·d independent indicators, so Hoeffding
    // plus a union bound over m bins gives this scale
    let tol = 5.0 * ((2.0 * m as f64).ln() / (2.0 * (trials * d) as f64)).sqrt();
    let mut rng = seeded_rng(3);
    let mut gaps = Vec::new();
    for _ in 0..3 {
        let r = random_profile(&mut rng, n, d);
        let mean = monte_carlo_generator(&r, &cfg, d, trials, &mut rng).map_err(|e| e.to_string())?;
        let expected = op.apply(&r.padded(cfg.b())).unwrap();
        gaps.push(max_abs_diff(&mean, &expected));
    }
    let worst = gaps.iter().copied().fold(0.0, f64::max);
    check(worst <= tol, || format!("gaps {gaps:?} exceed tolerance {tol:.2e}"))?;
    Ok(format!("max gap {worst:.2e} <= {tol:.2e} (B = {}, m = {m})", cfg.b()))
}

/// Two-sample chi-square on equal-size samples; sparse bins are pooled.
fn chi_square_p_value(a: &[i64], b: &[i64]) -> f64 {
    let lo = *a.iter().chain(b).min().unwrap();
    let hi = *a.iter().chain(b).max().unwrap();
    let width = (hi - lo + 1) as usize;
    let mut ca = vec![0u64; width];
    let mut cb = vec![0u64; width];
    for &v in a {
        ca[(v - lo) as usize] += 1;
    }
    for &v in b {
        cb[(v - lo) as usize] += 1;
    }
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let (mut pa, mut pb) = (0.0, 0.0);
    for (x, y) in ca.into_iter().zip(cb) {
        pa += x as f64;
        pb += y as f64;
        if pa + pb >= 20.0 {
            bins.push((pa, pb));
            pa = 0.0;
            pb = 0.0;
        }
    }
    if pa + pb > 0.0 {
        match bins.last_mut() {
            Some(last) => {
                last.0 += pa;
                last.1 += pb;
            }
            None => bins.push((pa, pb)),
        }
    }
    if bins.len() < 2 {
        return 1.0;
    }
    let stat: f64 = bins.iter().map(|(x, y)| (x - y).powi(2) / (x + y)).sum();
    let dist = ChiSquared::new((bins.len() - 1) as f64).unwrap();
    1.0 - dist.cdf(stat)
}

fn c4_unfolding() -> Outcome {
    let samples = 100_000;
    let n = 5u64;
    let counts = vec![0u64, 2, 5];
    let h = Histogram::new(counts.clone(), n).unwrap();
    let mut rng = seeded_rng(4);
    let mut min_p = 1.0f64;
    for eps in [0.5, 1.0, 2.0] {
        let mut direct = vec![Vec::with_capacity(samples); counts.len()];
        let mut unfolded = vec![Vec::with_capacity(samples); counts.len()];
        for _ in 0..samples {
            let s = privatize(&h, eps, false, &mut rng).unwrap();
            let c = privatize(&h, eps, true, &mut rng).unwrap();
            let u = unfold(&c, &mut rng).unwrap();
            for i in 0..counts.len() {
                direct[i].push(s.counts[i]);
                unfolded[i].push(u.counts[i]);
            }
        }
        for i in 0..counts.len() {
            let p = chi_square_p_value(&direct[i], &unfolded[i]);
            check(p >= 0.01, || format!("ε = {eps}, count {}: p = {p:.4} < 0.01", counts[i]))?;
            min_p = min_p.min(p);
        }
    }
    Ok(format!("9 per-item tests, smallest p-value {min_p:.3}"))
}

/// Configs with `m <= 256` drawn from the standard radius formula.
fn random_small_config(rng: &mut SeededRng) -> ReconstructionConfig {
    loop {
        let eps = rng.random_range(0.5..2.0);
        let d = rng.random_range(10..10_000);
        let n = rng.random_range(4..120);
        if let Ok(cfg) = ReconstructionConfig::new(eps, 0.05, n, d, Norm::L2) {
            if cfg.m() <= 256 {
                return cfg;
            }
        }
    }
}

fn objective(op: &CirculantOperator, r: &[f64], f_tilde: &[f64], p: Norm) -> f64 {
    p.distance(&op.apply(r).unwrap(), f_tilde)
}

/// Random `z` with `Σ_{t=0}^{n} z[t] = 0`.
fn mass_free_direction(rng: &mut SeededRng, m: usize, b: usize, n: usize) -> Vec<f64> {
    let mut z = random_vec(rng, m);
    let mean = z[b..=b + n].iter().sum::<f64>() / (n + 1) as f64;
    z[b..=b + n].iter_mut().for_each(|v| *v -= mean);
    z
}

fn c5_optimality() -> Outcome {
    let mut rng = seeded_rng(5);
    let mut worst_l2 = 0.0f64;
    let mut worst_gap = f64::NEG_INFINITY;
    for _ in 0..50 {
        let cfg = random_small_config(&mut rng);
        let (m, b, n) = (cfg.m(), cfg.b() as usize, cfg.n as usize);
        let op = CirculantOperator::new(cfg.n, cfg.b(), cfg.epsilon).unwrap();
        let dense = dense_operator_for(cfg.n, cfg.b(), cfg.epsilon).unwrap();
        let f_tilde: Vec<f64> = (0..m).map(|_| rng.random::<f64>() * 2.0 / m as f64).collect();

        let fast = fast_inversion_values(&op, &f_tilde, Norm::L2).unwrap();
        let exact = equality_constrained_ls(&dense, &f_tilde).unwrap();
        worst_l2 = worst_l2.max(max_abs_diff(&fast.values, &exact));

        for p in [Norm::L1, Norm::Linf] {
            let r = fast_inversion_values(&op, &f_tilde, p).unwrap();
            let best = objective(&op, &r.values, &f_tilde, p);
            for k in 0..100 {
                let z = mass_free_direction(&mut rng, m, b, n);
                let scale = 10f64.powi(-(k % 5));
                let competitor: Vec<f64> = r.values.iter().zip(&z).map(|(a, dz)| a + scale * dz).collect();
                let gap = best - objective(&op, &competitor, &f_tilde, p);
                worst_gap = worst_gap.max(gap);
            }
        }
    }
    check(worst_l2 <= 1e-7, || format!("ℓ2 mismatch against KKT oracle {worst_l2:e} > 1e-7"))?;
    check(worst_gap <= 1e-9, || format!("a feasible competitor beat the solution by {worst_gap:e}"))?;
    Ok(format!(
        "ℓ2 vs KKT max diff {worst_l2:.2e}; best competitor margin {:.2e}",
        -worst_gap
    ))
}

fn c6_rounding() -> Outcome {
    let mut rng = seeded_rng(6);
    let mut worst_excess = [f64::NEG_INFINITY; 3];
    let mut worst_phase3 = 0.0f64;
    for _ in 0..1000 {
        let n = rng.random_range(1..40u64);
        let b = rng.random_range(0..10u64);
        let (m, bu, nu) = ((n + 2 * b + 1) as usize, b as usize, n as usize);
        let d = rng.random_range(1..500);
        let f = random_profile(&mut rng, n, d);
        let scale = 10f64.powf(rng.random_range(-3.0..0.0));
        let z = mass_free_direction(&mut rng, m, bu, nu);
        let values: Vec<f64> = f.padded(b).iter().zip(&z).map(|(a, dz)| a + scale * dz).collect();
        let relaxed = RelaxedSolution {
            values: values.clone(),
            b,
            n,
            norm: Norm::L2,
        };
        let rounded = rounding(&relaxed).map_err(|e| e.to_string())?;
        let rounded_padded = rounded.padded(b);
        let padded_f = f.padded(b);
        for (i, p) in Norm::ALL.into_iter().enumerate() {
            let before = p.distance(&values, &padded_f);
            let after = p.distance(&rounded_padded, &padded_f);
            let factor = if p == Norm::Linf { 2.0 } else { 1.0 };
            worst_excess[i] = worst_excess[i].max(after - factor * before);
        }

        let clipped: Vec<f64> = values[bu..=bu + nu].iter().map(|v| v.clamp(0.0, 1.0)).collect();
        let surplus = clipped.iter().sum::<f64>() - 1.0;
        if surplus > 0.0 {
            let tau = threshold_tau(&clipped, surplus).unwrap();
            let tau_ref = bisection_tau(&clipped, surplus).unwrap();
            let fast = threshold_adjust(&clipped, surplus).unwrap();
            let iterated = iterated_adjustment(&clipped, surplus).unwrap();
            worst_phase3 = worst_phase3.max((tau - tau_ref).abs()).max(max_abs_diff(&fast, &iterated));
        }
    }
    for (i, p) in Norm::ALL.into_iter().enumerate() {
        check(worst_excess[i] <= 1e-9, || format!("rounding increased {p} error by {:e}", worst_excess[i]))?;
    }
    check(worst_phase3 <= 1e-9, || format!("phase 3 mismatch {worst_phase3:e}"))?;
    Ok(format!("all 1000 feasible; phase 3 vs references max diff {worst_phase3:.2e}"))
}

fn c7_norm_bounds() -> Outcome {
    let mut lines = Vec::new();
    for (n, b, eps) in SMALL_CONFIGS {
        let dense = dense_operator_for(n, b, eps).unwrap();
        let inv = dense.inverse().map_err(|e| e.to_string())?;
        let bounds = norm_bounds(eps, b).map_err(|e| e.to_string())?;
        let (n1, ninf, n2) = (matrix_norm_1(&inv), matrix_norm_inf(&inv), matrix_norm_2(&inv));
        check(ninf <= bounds.bound_1_inf, || format!("‖A⁻¹‖∞ = {ninf} > {}", bounds.bound_1_inf))?;
        check(n1 <= bounds.bound_1_inf, || format!("‖A⁻¹‖₁ = {n1} > {}", bounds.bound_1_inf))?;
        check(n2 <= bounds.bound_2, || format!("‖A⁻¹‖₂ = {n2} > {}", bounds.bound_2))?;
        check((n1 - ninf).abs() <= 1e-9 * ninf, || format!("‖A⁻¹‖₁ = {n1} != ‖A⁻¹‖∞ = {ninf}"))?;
        lines.push(format!("{ninf:.3}<={:.3}, {n2:.3}<={:.3}", bounds.bound_1_inf, bounds.bound_2));
    }
    Ok(lines.join("; "))
}

fn coverage(rows: &[ErrorReport], p: Norm) -> f64 {
    let sel: Vec<_> = rows.iter().filter(|r| r.p == p).collect();
    sel.iter().filter(|r| r.err <= r.bound).count() as f64 / sel.len() as f64
}

fn c8_coverage() -> Outcome {
    let (d, n) = (100_000usize, 32u64);
    let cfg = ReconstructionConfig::new(1.0, 0.05, n, d, Norm::L2).map_err(|e| e.to_string())?;
    let spec = SynthSpec {
        distribution: Distribution::Zipf(1.1),
        d,
        n,
        seed: 8,
    };
    let rows = sweep(&[(spec, cfg)], 200, 8).map_err(|e| e.to_string())?;
    let (c2, cinf) = (coverage(&rows, Norm::L2), coverage(&rows, Norm::Linf));
    check(c2 >= 0.90 && cinf >= 0.90, || format!("coverage l2 = {c2}, linf = {cinf} (need >= 0.90)"))?;
    Ok(format!("coverage l2 = {c2:.3}, linf = {cinf:.3}, l1 = {:.3}", coverage(&rows, Norm::L1)))
}

fn c9_scaling() -> Outcome {
    let n = 32u64;
    let grid: Vec<_> = [1_000usize, 10_000, 100_000]
        .into_iter()
        .map(|d| {
            let cfg = ReconstructionConfig::new(1.0, 0.05, n, d, Norm::L2).unwrap();
            let spec = SynthSpec {
                distribution: Distribution::PointMass(1),
                d,
                n,
                seed: 9,
            };
            (spec, cfg)
        })
        .collect();
    let rows = sweep(&grid, 50, 9).map_err(|e| e.to_string())?;
    let slope = fit_scaling(&rows, Norm::L2).map_err(|e| e.to_string())?;
    check((-0.65..=-0.35).contains(&slope), || format!("ℓ2 slope {slope} outside [-0.65, -0.35]"))?;
    Ok(format!(
        "slopes l2 = {slope:.3}, l1 = {:.3}, linf = {:.3}",
        fit_scaling(&rows, Norm::L1).unwrap(),
        fit_scaling(&rows, Norm::Linf).unwrap()
    ))
}

/// Seconds to reconstruct a uniform-count histogram with `n = d`, operator construction included.
fn reconstruction_seconds(n: u64, seed: u64) -> Result<f64, String> {
    let d = n as usize;
    let mut rng = seeded_rng(seed);
    let counts = (0..d).map(|_| rng.random_range(0..=n)).collect();
    let h = Histogram::new(counts, n).unwrap();
    let cfg = ReconstructionConfig::new(1.0, 0.05, n, d, Norm::L2).map_err(|e| e.to_string())?;
    let sketch = privatize(&h, 1.0, false, &mut rng).unwrap();
    let cache = OperatorCache::new();
    let start = Instant::now();
    reconstruct_profile_with(&cache, &sketch, &cfg, &mut rng).map_err(|e| e.to_string())?;
    Ok(start.elapsed().as_secs_f64())
}

fn c10_near_linear_time() -> Outcome {
    let big = reconstruction_seconds(1_000_000, 10)?;
    check(big < 10.0, || format!("n = d = 10^6 took {big:.2} s"))?;
    let sizes = [1u64 << 18, 1 << 19, 1 << 20];
    let mut means = Vec::new();
    for &n in &sizes {
        // untimed warm-up so allocator and page-cache state match across sizes
        reconstruction_seconds(n, 99)?;
        let runs: Vec<f64> = (0..3).map(|k| reconstruction_seconds(n, 100 + k)).collect::<Result<_, _>>()?;
        means.push(runs.iter().sum::<f64>() / 3.0);
    }
    let ratios = [means[1] / means[0], means[2] / means[1]];
    check(ratios.iter().all(|&r| r <= 2.5), || format!("time ratios {ratios:.2?} exceed 2.5"))?;
    Ok(format!("10^6 in {big:.2} s; doubling ratios {:.2}, {:.2}", ratios[0], ratios[1]))
}

fn c11_two_party() -> Outcome {
    let mut rng = seeded_rng(11);
    for _ in 0..1000 {
        let d = rng.random_range(16..2000);
        let x = PartyVector::random(d, &mut rng);
        let y = PartyVector::random(d, &mut rng);
        check(profile_identity(&x, &y) == x.dot(&y), || format!("identity fails at d = {d}"))?;
    }

    let mut normalized = Vec::new();
    for d in [10_000usize, 100_000, 1_000_000] {
        let rows = run_protocol(d, 1.0, 100, 11).map_err(|e| e.to_string())?;
        let mean = rows.iter().map(|r| r.abs_error).sum::<f64>() / rows.len() as f64;
        normalized.push(mean / (d as f64).sqrt());
    }
    let hi = normalized.iter().copied().fold(f64::MIN, f64::max);
    let lo = normalized.iter().copied().fold(f64::MAX, f64::min);
    check(hi / lo <= 3.0, || format!("mean |error|/√d = {normalized:.3?}, ratio {:.2} > 3", hi / lo))?;

    let d = 10_000;
    let cfg = protocol_config(d, 1.0).unwrap();
    let delta = sensitivity_bound(&CirculantOperator::new(cfg.n, cfg.b(), 1.0).unwrap(), d).unwrap();
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let x = PartyVector::random(d, &mut rng);
        let y = PartyVector::random(d, &mut rng);
        let y2 = y.flipped(rng.random_range(0..d));
        let m_a = alice_message(&x, 1.0, &mut rng).unwrap();
        let r = bob_profile(&m_a, &y).unwrap();
        let r2 = bob_profile(&m_a, &y2).unwrap();
        worst = worst.max(Norm::Linf.distance(r.values(), r2.values()));
    }
    check(worst <= delta, || format!("neighbor sensitivity {worst:e} > Δ = {delta:e}"))?;
    Ok(format!(
        "identity exact; |err|/√d = {normalized:.3?} (ratio {:.2}); sensitivity {worst:.2e} <= Δ = {delta:.2e}",
        hi / lo
    ))
}

fn run_cli(dir: &Path, args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_dp-profile"))
        .current_dir(dir)
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    check(out.status.success(), || {
        format!("`{}` failed: {}", args.join(" "), String::from_utf8_lossy(&out.stderr))
    })
}

fn c12_cli_determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let dir = tmp.path();
    let hist: String = (0..500).map(|i| format!("{}\n", (i * 7) % 33)).collect();
    std::fs::write(dir.join("hist.txt"), hist).unwrap();
    let delta: String = (0..500).map(|i| format!("{}\n", i % 3)).collect();
    std::fs::write(dir.join("delta.txt"), delta).unwrap();

    let commands: [(&str, &str, Vec<&str>); 6] = [
        ("sketch", "s.json", vec!["--seed", "7", "sketch", "--input", "hist.txt", "--epsilon", "1", "--n", "32"]),
        ("sketch --clip", "c.json", vec!["--seed", "7", "sketch", "--input", "hist.txt", "--epsilon", "1", "--n", "32", "--clip"]),
        ("update", "u.json", vec!["update", "--sketch", "a_s.json", "--delta", "delta.txt"]),
        ("reconstruct", "r.csv", vec!["--seed", "3", "reconstruct", "--input", "a_c.json", "--eta", "0.05", "--norm", "l2"]),
        (
            "eval",
            "e.csv",
            vec!["--seed", "5", "eval", "--dist", "zipf:1.1", "--d-list", "500,1000", "--n", "16", "--epsilon", "1", "--eta", "0.05", "--trials", "3"],
        ),
        ("innerprod", "i.csv", vec!["--seed", "2", "innerprod", "--d", "2000", "--epsilon", "1", "--trials", "3"]),
    ];
    for (name, file, args) in &commands {
        let mut outputs = Vec::new();
        for run in ["a", "b"] {
            let out = format!("{run}_{file}");
            let mut full = args.clone();
            full.extend(["--output", out.as_str()]);
            run_cli(dir, &full)?;
            outputs.push(std::fs::read(dir.join(&out)).unwrap());
        }
        check(outputs[0] == outputs[1], || format!("`{name}` output differs between reruns"))?;
    }
    Ok("sketch, sketch --clip, update, reconstruct, eval, innerprod byte-identical".into())
}

fn main() {
    let criteria = [
        Criterion { id: 1, name: "oracle equivalence (circulant)", limit: Some(Duration::from_secs(10)), run: c1_oracle_equivalence },
        Criterion { id: 2, name: "eigenvalue closed form", limit: Some(Duration::from_secs(1)), run: c2_eigenvalues },
        Criterion { id: 3, name: "generator expectation", limit: Some(Duration::from_secs(60)), run: c3_generator_expectation },
        Criterion { id: 4, name: "unfolding distribution", limit: Some(Duration::from_secs(30)), run: c4_unfolding },
        Criterion { id: 5, name: "inversion optimality", limit: Some(Duration::from_secs(30)), run: c5_optimality },
        Criterion { id: 6, name: "rounding", limit: Some(Duration::from_secs(20)), run: c6_rounding },
        Criterion { id: 7, name: "matrix-norm bounds", limit: Some(Duration::from_secs(20)), run: c7_norm_bounds },
        Criterion { id: 8, name: "error-bound coverage", limit: Some(Duration::from_secs(300)), run: c8_coverage },
        Criterion { id: 9, name: "1/sqrt(d) scaling", limit: Some(Duration::from_secs(600)), run: c9_scaling },
        Criterion { id: 10, name: "near-linear time", limit: None, run: c10_near_linear_time },
        Criterion { id: 11, name: "two-party reduction", limit: Some(Duration::from_secs(300)), run: c11_two_party },
        Criterion { id: 12, name: "CLI determinism", limit: None, run: c12_cli_determinism },
    ];
    let filter: Vec<u32> = std::env::args()
        .skip(1)
        .filter_map(|a| a.strip_prefix("C").or(Some(a.as_str())).and_then(|s| s.parse().ok()))
        .collect();

    let mut failures = 0;
    for c in &criteria {
        if !filter.is_empty() && !filter.contains(&c.id) {
            continue;
        }
        let start = Instant::now();
        let mut outcome = (c.run)();
        let elapsed = start.elapsed();
        if let (Ok(detail), Some(limit)) = (&outcome, c.limit) {
            if elapsed > limit {
                outcome = Err(format!("{detail}; took {:.1} s, limit {} s", elapsed.as_secs_f64(), limit.as_secs()));
            }
        }
        match outcome {
            Ok(detail) => println!("[PASS] C{:<2} {}: {detail} ({:.2} s)", c.id, c.name, elapsed.as_secs_f64()),
            Err(why) => {
                failures += 1;
                println!("[FAIL] C{:<2} {}: {why} ({:.2} s)", c.id, c.name, elapsed.as_secs_f64());
            }
        }
    }
    if failures > 0 {
        println!("{failures} criterion(s) failed");
        std::process::exit(1);
    }
}
