//! Acceptance criteria 1 to 13. Every criterion prints one `PASS` or `FAIL` line;
//! the test fails if any criterion fails.
//!
//! Run with `cargo test -p ramkit --test acceptance -- --nocapture` to see the
//! lines when everything passes.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ramkit::bounds::{self, LogBase};
use ramkit::census::CycleCensus;
use ramkit::families;
use ramkit::fungroup::{geodesic, kappa_estimate, kappa_estimate_via, STATE_BUDGET};
use ramkit::graph::{SerreGraph, Walk};
use ramkit::groups::{self, PermGroup};
use ramkit::limits;
use ramkit::nullcycle::{self, enumerate_nullcycles, expected_visits, expected_visits_reports, NullcycleSampler};
use ramkit::percolation::{growth_run, HalfLoopRule};
use ramkit::report::{BoundReport, Verdict};
use ramkit::spectral::{self, markov_spectrum};
use ramkit::treewalk::{self, rational_to_f64, tree_rho, TreeWalkTables};

// Pinned tolerances and budgets.
const C1_NMAX: usize = 200;
const C1_RUNTIME: Duration = Duration::from_secs(10);
const C1_ORACLE_REL: f64 = 1e-9;
const C2_TOL: f64 = 1e-8;
const C2_NMAX: usize = 100;
const C3_NMAX: usize = 400;
const C3_KMAX: usize = 10;
const C3_BRIDGE_K: f64 = 2e4;
const C3_BRIDGE_ZERO: u32 = 301;
const C3_ORACLE_REL: f64 = 1e-9;
const C4_TOL: f64 = 1e-6;
const C4_LENGTH: usize = 10_000;
const C4_ORACLE_REL: f64 = 1e-9;
const C6_ORACLE_NMAX: usize = 8;
const C7_NMAX: usize = 12;
const C7_KMAX: usize = 6;
const C7_SAMPLES: usize = 20_000;
const C7_SIGMAS: f64 = 3.0;
const C7_ORACLE_SIGMAS: f64 = 4.0;
const C8_SIZES: [usize; 3] = [256, 1024, 4096];
const C8_SEEDS: u64 = 10;
const C8_RETURNS_N: usize = 4;
const C8_RUNTIME: Duration = Duration::from_secs(300);
const C8_ORACLE_TOL: f64 = 1e-8;
const C9_ALPHA_TOL: f64 = 1e-8;
const C9_RHO_TOL: f64 = 0.02;
const C9_STEPS: usize = 40;
const C10_TOL: f64 = 1e-8;
const C11_M: usize = 200;
const C11_TOL: f64 = 1e-2;
const C12_SIZE: usize = 400;
const C12_SEEDS: u64 = 20;
const C12_NMAX: usize = 40;
const C12_TAIL: f64 = 0.5;
const C12_THRESHOLD: f64 = 2.6;
const C12_SHARE: f64 = 0.9;
const C12_RUNTIME: Duration = Duration::from_secs(120);
const C13_EPS: f64 = 0.1;
const C13_SIZES: [usize; 3] = [256, 512, 1024];
const C13_SEEDS: u64 = 10;
const C13_SIGMAS: f64 = 3.0;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn q(a: i64, b: i64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// The standing fleet: small named graphs, Schreier quotients and random regular graphs.
fn fleet_graphs() -> Vec<(String, SerreGraph)> {
    let mut out: Vec<(String, SerreGraph)> = vec![
        ("K4".into(), families::complete(4)),
        ("Petersen".into(), families::petersen()),
        ("C6".into(), families::cycle(6)),
        ("rose(2)".into(), families::rose(2)),
        ("rose(3)".into(), families::rose(3)),
        ("half-loop bouquet(3)".into(), families::half_loop_bouquet(3)),
    ];
    for (name, g, s) in schreier_fixtures() {
        out.push((format!("{name} quotient"), groups::schreier_quotient(&g, s).unwrap().graph));
    }
    for n in [64, 256, 1024, 4096] {
        out.push((format!("random 3-regular n={n}"), limits::configuration_model(3, n, 0).unwrap()));
    }
    out
}

fn schreier_fixtures() -> Vec<(&'static str, PermGroup, usize)> {
    vec![
        ("S3", groups::symmetric_transpositions(3), 0),
        ("Klein", groups::klein_four(), 0),
        ("D5", groups::dihedral(5), 2),
        ("S4", groups::symmetric_transpositions(4), 0),
        ("D6", groups::dihedral(6), 2),
    ]
}

/// Closed walks of length `n` at `root`, by depth-first search.
fn closed_walks(g: &SerreGraph, root: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut path = Vec::with_capacity(n);
    fn go(g: &SerreGraph, v: usize, root: usize, left: usize, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            if v == root {
                out.push(path.clone());
            }
            return;
        }
        for &e in g.out_edges(v) {
            path.push(e);
            go(g, g.dst(e), root, left - 1, path, out);
            path.pop();
        }
    }
    go(g, root, root, n, &mut path, &mut out);
    out
}

/// Backtrack erasure with a stack; a half-loop cancels against itself.
fn reduces_to_empty(g: &SerreGraph, edges: &[usize]) -> bool {
    let mut stack: Vec<usize> = Vec::new();
    for &e in edges {
        if stack.last() == Some(&g.inv(e)) {
            stack.pop();
        } else {
            stack.push(e);
        }
    }
    stack.is_empty()
}

/// Distance-chain probabilities on `T_d`: `forward[m][h] = P_0(|X_m| = h)` and
/// `hit[m][h] = P(a walk from distance h is at the root at time m)`.
fn distance_chain(d: usize, nmax: usize) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let df = d as f64;
    let up = (df - 1.0) / df;
    let down = 1.0 / df;
    let mut forward = vec![vec![0.0; nmax + 2]; nmax + 1];
    forward[0][0] = 1.0;
    for m in 1..=nmax {
        for h in 0..=m {
            let from_below = if h == 1 { forward[m - 1][0] } else if h >= 2 { forward[m - 1][h - 1] * up } else { 0.0 };
            let from_above = forward[m - 1][h + 1] * down;
            forward[m][h] = from_below + from_above;
        }
    }
    let mut hit = vec![vec![0.0; nmax + 2]; nmax + 1];
    hit[0][0] = 1.0;
    for m in 1..=nmax {
        for h in 0..=nmax {
            hit[m][h] = if h == 0 { hit[m - 1][1] } else { down * hit[m - 1][h - 1] + up * hit[m - 1].get(h + 1).copied().unwrap_or(0.0) };
        }
    }
    (forward, hit)
}

fn c1_return_bounds() -> Outcome {
    let start = Instant::now();
    let mut rows = 0;
    let mut failures = Vec::new();
    let mut worst_margin = f64::INFINITY;
    for d in 3..=6 {
        for r in treewalk::check_return_bounds(d, C1_NMAX).unwrap() {
            rows += 1;
            worst_margin = worst_margin.min(r.margin);
            if !r.pass {
                failures.push(format!("d={d} n={}", r.n));
            }
        }
    }
    let elapsed = start.elapsed();
    // independent floating-point route
    let mut oracle_gap = 0.0f64;
    let mut oracle_disagree = 0;
    for d in 3..=6 {
        let t = TreeWalkTables::new(d, C1_NMAX).unwrap();
        let (forward, _) = distance_chain(d, C1_NMAX);
        let rho = tree_rho(d);
        for n in (2..=C1_NMAX).step_by(2) {
            let exact = rational_to_f64(&t.return_probability(n).unwrap());
            oracle_gap = oracle_gap.max(rel(forward[n][0], exact));
            let scale = rho.powi(n as i32) * (n as f64).powf(-1.5);
            let inside = 2.0 / 3.0 * scale < forward[n][0] && forward[n][0] < 10.0 * scale;
            if !inside {
                oracle_disagree += 1;
            }
        }
    }
    let pass = failures.is_empty() && elapsed < C1_RUNTIME && oracle_gap < C1_ORACLE_REL && oracle_disagree == 0;
    outcome(
        pass,
        format!(
            "{rows} exact rows, failures {:?}, tightest relative margin {worst_margin:.3}, {:.2?} (< {:?}), float oracle gap {oracle_gap:.1e}, oracle disagreements {oracle_disagree}",
            failures, elapsed, C1_RUNTIME
        ),
    )
}

fn c2_moments() -> Outcome {
    let mut worst = (0.0f64, 0, 0);
    for d in 2..=10 {
        let t = TreeWalkTables::new(d, C2_NMAX).unwrap();
        for n in (0..=C2_NMAX).step_by(2) {
            let quad = treewalk::kesten_mckay_moment(d, n).unwrap();
            let exact = rational_to_f64(&t.return_probability(n).unwrap());
            let gap = (quad - exact).abs();
            if gap > worst.0 {
                worst = (gap, d, n);
            }
        }
    }
    outcome(worst.0 <= C2_TOL, format!("max |moment - r_n| = {:.2e} at d={} n={} (tol {C2_TOL:e})", worst.0, worst.1, worst.2))
}

fn c3_visit_bounds() -> Outcome {
    // integer excursions
    let mut z_fail = Vec::new();
    let mut z_worst = 0.0f64;
    let mut z_oracle = 0.0f64;
    // f64 oracle: forward[m][h] counts positive paths ending at h, scaled by 2^-m
    let mut fwd = vec![vec![0.0f64; C3_NMAX + 2]; C3_NMAX + 1];
    fwd[1][1] = 0.5;
    for m in 2..=C3_NMAX {
        for h in 1..=m {
            fwd[m][h] = 0.5 * (fwd[m - 1][h - 1] + fwd[m - 1][h + 1]);
        }
    }
    for n in (2..=C3_NMAX).step_by(2) {
        let total = fwd[n - 1][1] * 0.5;
        for k in 1..=C3_KMAX {
            let v = treewalk::excursion_visits_z(k, n).unwrap();
            let vf = rational_to_f64(&v);
            z_worst = z_worst.max(vf / k as f64);
            if v > BigRational::from_integer((64 * k).into()) {
                z_fail.push((k, n));
            }
            let oracle: f64 = (1..n).map(|m| fwd[m][k] * fwd[n - m][k]).sum::<f64>() / total;
            if vf > 0.0 || oracle > 0.0 {
                z_oracle = z_oracle.max(rel(oracle, vf));
            }
        }
    }
    // tree bridges
    let mut b_fail = Vec::new();
    let mut b_zero_worst = 0.0f64;
    let mut b_k_worst = 0.0f64;
    let mut b_oracle = 0.0f64;
    for d in [3, 4] {
        let t = TreeWalkTables::new(d, C3_NMAX).unwrap();
        let (forward, hit) = distance_chain(d, C3_NMAX);
        for n in (2..=C3_NMAX).step_by(2) {
            for k in 0..=C3_KMAX.min(n / 2) {
                let v = t.bridge_visit_expectation(k, n).unwrap();
                let vf = rational_to_f64(&v);
                let ok = if k == 0 {
                    b_zero_worst = b_zero_worst.max(vf);
                    v <= BigRational::from_integer(C3_BRIDGE_ZERO.into())
                } else {
                    b_k_worst = b_k_worst.max(vf / k as f64);
                    vf <= C3_BRIDGE_K * k as f64 && v <= BigRational::from_integer(BigUint::from(20_000u32 * k as u32).into())
                };
                if !ok {
                    b_fail.push((d, k, n));
                }
                let oracle: f64 = (0..=n).map(|j| forward[j][k] * hit[n - j][k]).sum::<f64>() / forward[n][0];
                b_oracle = b_oracle.max(rel(oracle, vf));
            }
        }
    }
    let pass = z_fail.is_empty() && b_fail.is_empty() && z_oracle < C3_ORACLE_REL && b_oracle < C3_ORACLE_REL;
    outcome(
        pass,
        format!(
            "excursions: max v/k = {z_worst:.3} (<= 64), violations {z_fail:?}; bridges d in {{3,4}}: max E/k = {b_k_worst:.3} (<= {C3_BRIDGE_K:e}), max k=0 value {b_zero_worst:.3} (<= {C3_BRIDGE_ZERO}), violations {b_fail:?}; float oracle gaps {z_oracle:.1e} / {b_oracle:.1e}"
        ),
    )
}

fn c4_bridge_ratios() -> Outcome {
    let mut worst = (0.0f64, 0, 0);
    let mut lines = Vec::new();
    for d in [2, 3, 4] {
        for dist in 1..=5 {
            let remaining = if (C4_LENGTH + dist) % 2 == 1 { C4_LENGTH } else { C4_LENGTH + 1 };
            let r = treewalk::bridge_ratio_report(d, dist, remaining).unwrap();
            let gap = (r.transition_ratio - r.printed_limit).abs();
            if gap > worst.0 {
                worst = (gap, d, dist);
            }
            if dist == 1 || dist == 5 {
                lines.push(format!("d={d} |x|={dist}: finite {:.6} vs limit {:.6}", r.transition_ratio, r.printed_limit));
            }
        }
    }
    // the scaled float column against exact tables at a moderate length
    let mut oracle = 0.0f64;
    for d in [2, 3, 4] {
        let t = TreeWalkTables::new(d, 202).unwrap();
        for dist in 1..=5usize {
            let remaining = if (201 + dist) % 2 == 1 { 201 } else { 202 };
            let r = treewalk::bridge_ratio_report(d, dist, remaining).unwrap();
            let exact = BigRational::new(t.to_vertex(remaining, dist + 1).into(), t.to_vertex(remaining, dist - 1).into());
            oracle = oracle.max(rel(r.per_vertex_ratio, rational_to_f64(&exact)));
        }
    }
    let pass = worst.0 <= C4_TOL && oracle < C4_ORACLE_REL;
    outcome(
        pass,
        format!(
            "max |finite - limit| = {:.3e} at d={} |x|={} after ~{C4_LENGTH} steps (tol {C4_TOL:e}); {}; exact-table oracle gap {oracle:.1e}",
            worst.0,
            worst.1,
            worst.2,
            lines.join("; ")
        ),
    )
}

fn c5_sampler_exactness() -> Outcome {
    let mut checked = 0usize;
    let mut bad = Vec::new();
    for (name, g) in fleet_graphs() {
        let d = g.require_regular().unwrap();
        let t = TreeWalkTables::new(d, 8).unwrap();
        for n in [2, 4, 6, 8] {
            let oracle: Vec<Vec<usize>> = closed_walks(&g, 0, n).into_iter().filter(|w| reduces_to_empty(&g, w)).collect();
            let library = enumerate_nullcycles(&g, 0, n);
            if library.len() != oracle.len() || BigUint::from(oracle.len()) != t.returns(n) {
                bad.push(format!("{name} n={n}: enumeration sizes {} / {} / {}", oracle.len(), library.len(), t.returns(n)));
                continue;
            }
            let sampler = NullcycleSampler::new(&g, 0, n, &t).unwrap();
            let uniform = q(1, oracle.len() as i64);
            let mut total = BigRational::zero();
            for w in &oracle {
                let p = sampler.walk_probability(&Walk::new(&g, 0, w.clone()).unwrap());
                if p != uniform {
                    bad.push(format!("{name} n={n}: walk {w:?} has probability {p}"));
                    break;
                }
                total += p;
            }
            if !total.is_one() {
                bad.push(format!("{name} n={n}: mass on nullcycles {total}"));
            }
            checked += oracle.len();
        }
    }
    outcome(bad.is_empty(), format!("{checked} nullcycles over the fleet, even n <= 8, exact step-weight products; mismatches {bad:?}"))
}

fn c6_expected_visits() -> Outcome {
    let mut counts = [0usize; 3];
    let mut failures = Vec::new();
    let mut oracle_bad = Vec::new();
    for (name, g) in fleet_graphs() {
        let d = g.require_regular().unwrap();
        let size = g.vertex_count();
        let rho = spectral::spectral_radius(&g, 1).unwrap();
        let set: Vec<usize> = (0..size.min(3)).collect();
        let nmax = ((size as f64).sqrt() as usize).min(24);
        let t = TreeWalkTables::new(d, nmax.max(2) + 2).unwrap();
        let mut lengths: Vec<usize> = (2..=nmax).step_by(2).collect();
        // one length past the hypothesis, to see the gate
        lengths.push(nmax - nmax % 2 + 2);
        for n in lengths {
            let value = expected_visits(&g, 0, &set, n, &t).unwrap();
            for r in expected_visits_reports(&value, set.len(), n, size, rho.rho + rho.radius) {
                match r.verdict {
                    Verdict::Pass => counts[0] += 1,
                    Verdict::NotApplicable => counts[1] += 1,
                    _ => {
                        counts[2] += 1;
                        failures.push(format!("{name} n={n} {}", r.name));
                    }
                }
            }
            if n <= C6_ORACLE_NMAX && size <= 1024 {
                let walks: Vec<Vec<usize>> = closed_walks(&g, 0, n).into_iter().filter(|w| reduces_to_empty(&g, w)).collect();
                let hits: usize = walks
                    .iter()
                    .map(|w| Walk::new(&g, 0, w.clone()).unwrap().vertices(&g).iter().filter(|v| set.contains(v)).count())
                    .sum();
                if value != q(hits as i64, walks.len() as i64) {
                    oracle_bad.push(format!("{name} n={n}"));
                }
            }
        }
    }
    let pass = failures.is_empty() && oracle_bad.is_empty() && counts[0] > 0;
    outcome(
        pass,
        format!("reports: {} pass, {} not applicable, {} fail {failures:?}; enumeration oracle mismatches {oracle_bad:?}", counts[0], counts[1], counts[2]),
    )
}

/// All compositions of `n` into `k` nonnegative parts, as parity patterns.
fn parity_counts(n: usize, k: usize) -> (Vec<u64>, u64) {
    let mut counts = vec![0u64; 1 << k];
    let mut total = 0u64;
    fn go(left: usize, slots: usize, pattern: usize, depth: usize, counts: &mut Vec<u64>, total: &mut u64) {
        if slots == 1 {
            counts[pattern | ((left % 2) << depth)] += 1;
            *total += 1;
            return;
        }
        for x in 0..=left {
            go(left - x, slots - 1, pattern | ((x % 2) << depth), depth + 1, counts, total);
        }
    }
    go(n, k, 0, 0, &mut counts, &mut total);
    (counts, total)
}

fn c7_parity() -> Outcome {
    let mut exact_bad = Vec::new();
    let mut exp_bad = Vec::new();
    let mut half_bad = Vec::new();
    let mut cases = 0;
    let half = q(1, 2);
    for n in (2..=C7_NMAX).step_by(2) {
        for k in 2..=C7_KMAX {
            let (counts, total) = parity_counts(n, k);
            let exp_bound = (-1.0 / (4.0 / k as f64 + 2.0 / n as f64)).exp();
            for (pattern, &c) in counts.iter().enumerate() {
                cases += 1;
                let x: Vec<u8> = (0..k).map(|i| ((pattern >> i) & 1) as u8).collect();
                let p = nullcycle::parity_probability(n, &x).unwrap();
                let oracle = q(c as i64, total as i64);
                if p.value != oracle {
                    exact_bad.push(format!("n={n} x={x:?}"));
                }
                if oracle.to_f64().unwrap() > exp_bound || !p.exp_bound_holds {
                    exp_bad.push(format!("n={n} k={k}"));
                }
                if oracle > half || !p.half_bound_holds {
                    half_bad.push(format!("n={n} k={k} x={x:?} P={oracle}"));
                }
            }
        }
    }
    // partition parity: Monte Carlo against the exponential bound, exact convolution as oracle
    let mut rng = ChaCha8Rng::seed_from_u64(0x7a11);
    let mut mc_bad = Vec::new();
    let mut mc_oracle_bad = Vec::new();
    let mut grid = 0;
    for n in [12, 40, 100, 400, 1000] {
        for (m, ell) in [(2, 2), (3, 4), (5, 3), (8, 2)] {
            grid += 1;
            let parts = vec![ell; m];
            let (est, se) = nullcycle::parity_partition_monte_carlo(n, &parts, C7_SAMPLES, &mut rng);
            let bound = nullcycle::parity_partition_bound(n, m, ell);
            if est - C7_SIGMAS * se > bound {
                mc_bad.push(format!("n={n} m={m} l={ell}: {est:.4} vs {bound:.4}"));
            }
            let exact = rational_to_f64(&nullcycle::parity_partition_exact(n, &parts));
            if (est - exact).abs() > C7_ORACLE_SIGMAS * se.max(1.0 / C7_SAMPLES as f64) {
                mc_oracle_bad.push(format!("n={n} m={m} l={ell}: {est:.4} vs exact {exact:.4}"));
            }
        }
    }
    let half_summary = if half_bad.is_empty() {
        "none".to_string()
    } else {
        format!("{} cases, e.g. {}", half_bad.len(), half_bad.iter().take(3).cloned().collect::<Vec<_>>().join(", "))
    };
    let pass = exact_bad.is_empty() && exp_bad.is_empty() && half_bad.is_empty() && mc_bad.is_empty() && mc_oracle_bad.is_empty() && grid == 20;
    outcome(
        pass,
        format!(
            "(a) {cases} patterns: closed form vs enumeration mismatches {exact_bad:?}, exp bound violations {exp_bad:?}, '<= 1/2' violations {half_summary}; (b) {grid} grid cases: bound violations beyond {C7_SIGMAS} sigma {mc_bad:?}, Monte Carlo vs exact outliers {mc_oracle_bad:?}"
        ),
    )
}

fn c8_main_bounds() -> Outcome {
    let start = Instant::now();
    let mut pass_n = 0;
    let mut na = 0;
    let mut failures = Vec::new();
    let mut oracle_notes = Vec::new();
    let mut oracle_ok = true;
    for d in [3, 4] {
        for &size in &C8_SIZES {
            for seed in 0..C8_SEEDS {
                let g = limits::configuration_model(d, size, seed).unwrap();
                let rho = spectral::spectral_radius(&g, seed).unwrap();
                let mut reports: Vec<BoundReport> = Vec::new();
                for k in 1..=3 {
                    let census = CycleCensus::compute(&g, k).unwrap();
                    let f = bounds::thm_main_finite_with(&g, d, k, &rho, &census, LogBase::D).unwrap();
                    reports.push(f.main);
                    reports.push(f.ramanujan);
                    reports.push(bounds::thm_main_returns_with(&g, d, C8_RETURNS_N, k, &census).unwrap());
                }
                for r in &reports {
                    match r.verdict {
                        Verdict::Pass => pass_n += 1,
                        Verdict::NotApplicable => na += 1,
                        _ => failures.push(format!("d={d} n={size} seed={seed} {}", r.name)),
                    }
                }
                if seed == 0 && size == C8_SIZES[0] {
                    // dense eigensolve from a separate library, and the trace identity for closed walks
                    let m = nalgebra::DMatrix::from_fn(size, size, |i, j| g.multiplicity(i, j) as f64 / d as f64);
                    let mut eig: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
                    eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
                    let rho_oracle = spectral::rho_from_eigenvalues(&eig);
                    let len = 12;
                    let walks: u128 = spectral::closed_walk_counts(&g, len).iter().sum();
                    let trace: f64 = eig.iter().map(|x| x.powi(len as i32)).sum::<f64>() * (d as f64).powi(len as i32);
                    let ok = (rho_oracle - rho.rho).abs() <= C8_ORACLE_TOL && rel(walks as f64, trace) < 1e-9;
                    oracle_ok &= ok;
                    oracle_notes.push(format!("d={d}: rho {:.10} vs oracle {:.10}", rho.rho, rho_oracle));
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = failures.is_empty() && pass_n > 0 && elapsed < C8_RUNTIME && oracle_ok;
    outcome(
        pass,
        format!(
            "60 graphs x k in 1..=3: {pass_n} pass, {na} not applicable, {} fail {failures:?}; {:.1?} (< {:?}); oracle {}",
            failures.len(),
            elapsed,
            C8_RUNTIME,
            oracle_notes.join(", ")
        ),
    )
}

fn c9_cogrowth() -> Outcome {
    let mut alpha_gap = 0.0f64;
    let mut rose_rho_gap = 0.0f64;
    for r in 1..=5 {
        let c = spectral::nonbacktracking_cogrowth(&families::rose(r), Some(2 * r)).unwrap();
        alpha_gap = alpha_gap.max((c.alpha - (2 * r - 1) as f64).abs());
        rose_rho_gap = rose_rho_gap.max((spectral::grigorchuk_rho(2 * r, c.alpha).unwrap() - 1.0).abs());
    }
    let k4 = spectral::tree_m_ramanujan(&families::complete(4), 5).unwrap();
    let boundary = k4.exact && k4.margin == 0.0 && k4.ramanujan;
    let mut worst_literal = 0.0f64;
    let mut worst_ratio = 0.0f64;
    let mut cases = Vec::new();
    for i in 0..10u64 {
        let n = 8 + 2 * i as usize;
        let m = 4 + (i % 3) as usize;
        let g = limits::configuration_model(3, n, 100 + i).unwrap();
        let c = spectral::nonbacktracking_cogrowth(&g, Some(m)).unwrap();
        let formula = c.rho_cover.unwrap();
        let p = spectral::tree_m_returns(&g, 0, m, C9_STEPS).unwrap();
        let literal = p[C9_STEPS - 1].powf(1.0 / (2 * C9_STEPS) as f64);
        let ratio = (p[C9_STEPS - 1] / p[C9_STEPS - 2]).sqrt();
        worst_literal = worst_literal.max((literal - formula).abs());
        worst_ratio = worst_ratio.max((ratio - formula).abs());
        if i < 3 {
            cases.push(format!("n={n} m={m}: formula {formula:.4}, p^(1/2n) {literal:.4}"));
        }
    }
    let pass = alpha_gap <= C9_ALPHA_TOL && rose_rho_gap <= 1e-12 && boundary && worst_literal <= C9_RHO_TOL;
    outcome(
        pass,
        format!(
            "rose alpha gap {alpha_gap:.1e}, rose cover rho gap {rose_rho_gap:.1e}, K4 m=5 boundary exact {boundary}; random bases: max |formula - p_2n^(1/2n)| = {worst_literal:.4} at n={C9_STEPS} (tol {C9_RHO_TOL}), ratio estimator (p_2n/p_2n-2)^(1/2) within {worst_ratio:.4}; {}",
            cases.join("; ")
        ),
    )
}

fn c10_schreier() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    for (name, g, s) in schreier_fixtures() {
        let quotient = match groups::schreier_quotient(&g, s) {
            Ok(q) => q,
            Err(e) => {
                ok = false;
                notes.push(format!("{name}: covering failed: {e}"));
                continue;
            }
        };
        let h = &quotient.graph;
        let trivial = quotient.coset_of[0];
        let has_loop = h.out_edges(trivial).iter().any(|&e| h.dst(e) == trivial);
        let cayley = groups::cayley_graph(&g);
        let sg = markov_spectrum(&cayley).unwrap();
        let sh = markov_spectrum(h).unwrap();
        let contained = sh.eigenvalues.iter().all(|x| sg.eigenvalues.iter().any(|y| (x - y).abs() <= C10_TOL));
        // dense oracle for the Cayley spectrum
        let d = cayley.require_regular().unwrap();
        let m = nalgebra::DMatrix::from_fn(cayley.vertex_count(), cayley.vertex_count(), |i, j| cayley.multiplicity(i, j) as f64 / d as f64);
        let mut eig: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let oracle_gap = eig.iter().zip(&sg.eigenvalues).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let this = has_loop && contained && sh.rho <= sg.rho + C10_TOL && oracle_gap <= C10_TOL;
        ok &= this;
        notes.push(format!("{name}/<s>: {} cosets, loop {has_loop}, rho(H) {:.6} <= rho(G) {:.6}", h.vertex_count(), sh.rho, sg.rho));
    }
    outcome(ok, notes.join("; "))
}

fn c11_kappa() -> Outcome {
    let instances: Vec<(&str, SerreGraph, usize, usize, usize, usize)> = vec![
        ("rose(2) k=1", families::rose(2), 0, 0, 1, C11_M),
        ("rose(3) k=1", families::rose(3), 0, 0, 1, 60),
        ("K4 k=3", families::complete(4), 0, 0, 3, 4),
        ("K4 x=0 y=1 k=2", families::complete(4), 0, 1, 2, 4),
        ("Petersen k=5", families::petersen(), 0, 0, 5, 2),
        ("bouquet(3) k=2", families::half_loop_bouquet(3), 0, 0, 2, 40),
        ("S3 quotient k=2", groups::schreier_quotient(&groups::symmetric_transpositions(3), 0).unwrap().graph, 0, 0, 2, 20),
    ];
    let mut non_monotone = Vec::new();
    let mut rose_value = f64::NAN;
    let mut rose_m = 0;
    for (name, g, x, y, k, m) in &instances {
        let e = kappa_estimate(g, *x, *y, *k, *m).unwrap();
        if !e.monotone {
            non_monotone.push(name.to_string());
        }
        if *name == "rose(2) k=1" {
            rose_value = e.last();
            rose_m = e.achieved_m();
            // tree-walk route: the W W^-1 walk is two steps on T_4
            let t = TreeWalkTables::new(4, 200).unwrap();
            for (i, n) in e.returns.iter().take(50).enumerate() {
                if *n != t.returns(4 * (i + 1)) {
                    non_monotone.push(format!("rose returns disagree with T_4 at m={}", i + 1));
                }
            }
        }
    }
    let target = 3f64.sqrt() / 2.0;
    // conjugation by two different paths from another base point
    let mut conj = Vec::new();
    for (name, g, k, m) in [("K4", families::complete(4), 3, 3), ("Petersen", families::petersen(), 5, 2)] {
        let direct = kappa_estimate_via(&g, 0, &[], 0, 0, k, m, STATE_BUDGET).unwrap();
        let u1 = geodesic(&g, 1, 0, false).unwrap();
        let other = *g.out_edges(1).iter().find(|&&e| g.dst(e) != 0).unwrap();
        let mut u2 = vec![other];
        u2.extend(geodesic(&g, g.dst(other), 0, false).unwrap());
        let via1 = kappa_estimate_via(&g, 1, &u1, 0, 0, k, m, STATE_BUDGET).unwrap();
        let via2 = kappa_estimate_via(&g, 1, &u2, 0, 0, k, m, STATE_BUDGET).unwrap();
        conj.push((name, direct.returns == via1.returns && direct.returns == via2.returns));
    }
    let conj_ok = conj.iter().all(|c| c.1);
    let pass = non_monotone.is_empty() && rose_m == C11_M && (rose_value - target).abs() <= C11_TOL && conj_ok;
    outcome(
        pass,
        format!(
            "{} instances, non-monotone {non_monotone:?}; rose(2) kappa_{rose_m} = {rose_value:.5} vs sqrt(3)/2 = {target:.5} (tol {C11_TOL}); conjugation invariance {conj:?}",
            instances.len()
        ),
    )
}

fn c12_percolation() -> Outcome {
    let start = Instant::now();
    let ps = [0.85, 0.9, 0.95];
    let runs: Vec<Vec<Option<f64>>> = ps
        .iter()
        .map(|&p| {
            (0..C12_SEEDS)
                .map(|seed| {
                    let r = growth_run(C12_SIZE, p, seed, C12_NMAX, C12_TAIL, HalfLoopRule::Stay);
                    r.estimate.filter(|_| r.reaches_boundary).map(|e| e.value)
                })
                .collect()
        })
        .collect();
    let elapsed = start.elapsed();
    let at9 = &runs[1];
    let good = at9.iter().filter(|e| e.is_some_and(|v| v >= C12_THRESHOLD)).count();
    let min9 = at9.iter().flatten().cloned().fold(f64::INFINITY, f64::min);
    let mut shared = 0;
    let mut monotone = 0;
    for s in 0..C12_SEEDS as usize {
        if let (Some(a), Some(b), Some(c)) = (runs[0][s], runs[1][s], runs[2][s]) {
            shared += 1;
            if a <= b && b <= c {
                monotone += 1;
            }
        }
    }
    let need = (C12_SHARE * C12_SEEDS as f64).ceil() as usize;
    let pass = good >= need && shared > 0 && monotone as f64 >= C12_SHARE * shared as f64 && elapsed < C12_RUNTIME;
    outcome(
        pass,
        format!(
            "p=0.9: {good}/{C12_SEEDS} seeds with tail estimate >= {C12_THRESHOLD} (need {need}), smallest valid {min9:.3}; non-decreasing over p in {{0.85,0.9,0.95}} on {monotone}/{shared} shared seeds; {:.1?} (< {:?})",
            elapsed, C12_RUNTIME
        ),
    )
}

fn c13_weakly_ramanujan() -> Outcome {
    let seeds: Vec<u64> = (0..C13_SEEDS).collect();
    let plain = limits::fleet(3, &C13_SIZES, &seeds, 0.0).unwrap();
    let planted = limits::fleet(3, &C13_SIZES, &seeds, C13_EPS).unwrap();
    let max_planted = planted.iter().map(|r| r.weakly_ramanujan_mass).fold(0.0, f64::max);
    let delta = 1.0 - max_planted;
    let mut ok = delta > 0.0;
    let mut rows = Vec::new();
    for &n in &C13_SIZES {
        let a: Vec<f64> = plain.iter().filter(|r| r.size == n).map(|r| r.weakly_ramanujan_mass).collect();
        let b: Vec<f64> = planted.iter().filter(|r| r.size == n).map(|r| r.weakly_ramanujan_mass).collect();
        let (ma, sa) = limits::mean_and_se(&a);
        let (mb, sb) = limits::mean_and_se(&b);
        let z = (ma - mb) / (sa * sa + sb * sb).sqrt();
        ok &= z > C13_SIGMAS;
        rows.push(format!("n={n}: {ma:.4} vs {mb:.4} ({z:.1} sigma)"));
    }
    outcome(ok, format!("planted mass <= 1 - delta with observed delta = {delta:.4}; unplanted vs planted {}", rows.join(", ")))
}

#[test]
fn acceptance_criteria() {
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("tree return probability two-sided bound", c1_return_bounds),
        ("Kesten-McKay moments equal exact returns", c2_moments),
        ("excursion and bridge visit bounds", c3_visit_bounds),
        ("bridge transition ratio limit", c4_bridge_ratios),
        ("nullcycle sampler is exactly uniform", c5_sampler_exactness),
        ("expected nullcycle visits bounds", c6_expected_visits),
        ("parity probabilities and bounds", c7_parity),
        ("finite rho bound and returns bound on random graphs", c8_main_bounds),
        ("cogrowth and the cover formula", c9_cogrowth),
        ("Schreier quotients cover and do not raise rho", c10_schreier),
        ("fundamental group operator norm estimates", c11_kappa),
        ("percolation cover growth", c12_percolation),
        ("weakly Ramanujan mass with planted triangles", c13_weakly_ramanujan),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        let tag = if result.pass { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {tag} {name} [{:.1?}]: {}", i + 1, start.elapsed(), result.detail);
        if !result.pass {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
