//! Local statistics of finite graphs compared with the regular tree: rooted-ball
//! histograms, random regular fleets, spectral-measure distances.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::census::CycleCensus;
use crate::error::{GraphError, SpectralError};
use crate::families;
use crate::graph::{GraphBuilder, SerreGraph};
use crate::pattern::{ball, ball_subgraph, pattern_of, Pattern};
use crate::spectral::{closed_walk_counts, markov_spectrum, SpectralSummary, CLUSTER_TOL};
use crate::treewalk::{kesten_mckay_density, tree_rho};

/// Empirical law of the `r`-ball around a uniform vertex.
#[derive(Clone, Debug, Serialize)]
pub struct PatternHistogram {
    pub radius: usize,
    /// Number of vertices whose ball has each pattern, ordered by canonical code.
    pub counts: Vec<(Pattern, usize)>,
    pub total: usize,
}

impl PatternHistogram {
    pub fn frequency(&self, p: &Pattern) -> f64 {
        self.counts.iter().find(|(q, _)| q == p).map_or(0.0, |(_, c)| *c as f64 / self.total as f64)
    }

    pub fn frequencies(&self) -> Vec<f64> {
        self.counts.iter().map(|(_, c)| *c as f64 / self.total as f64).collect()
    }
}

pub fn bs_histogram(g: &SerreGraph, r: usize) -> PatternHistogram {
    let mut counts: BTreeMap<Pattern, usize> = BTreeMap::new();
    for v in 0..g.vertex_count() {
        let (sub, root) = ball_subgraph(g, v, r);
        *counts.entry(pattern_of(&sub, root, r)).or_default() += 1;
    }
    PatternHistogram { radius: r, counts: counts.into_iter().collect(), total: g.vertex_count() }
}

/// Uniform perfect matching of the `d n` half-edges; a matched pair at one vertex
/// becomes a loop pair.
pub fn configuration_model(d: usize, n: usize, seed: u64) -> Result<SerreGraph, GraphError> {
    if (d * n) % 2 == 1 {
        return Err(GraphError::OddStubCount(d * n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat(v).take(d)).collect();
    let mut b = GraphBuilder::new(n);
    match_stubs(&mut b, stubs, &mut rng);
    Ok(b.build().with_name(format!("config(d={d},n={n},seed={seed})")))
}

fn match_stubs(b: &mut GraphBuilder, mut stubs: Vec<usize>, rng: &mut ChaCha8Rng) {
    stubs.shuffle(rng);
    for p in stubs.chunks(2) {
        if p[0] == p[1] {
            b.loop_pair(p[0]);
        } else {
            b.edge(p[0], p[1]);
        }
    }
}

/// A `d`-regular multigraph with `floor(eps n)` disjoint triangles on random vertices
/// (triangle density `eps` per vertex, at most 1/3); the remaining half-edges are
/// matched uniformly.
pub fn planted_triangles(d: usize, n: usize, eps: f64, seed: u64) -> Result<SerreGraph, GraphError> {
    if (d * n) % 2 == 1 {
        return Err(GraphError::OddStubCount(d * n));
    }
    if d < 2 {
        return Err(GraphError::NotRegular { vertex: 0, degree: d, expected: 2 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let triangles = (eps * n as f64).floor() as usize;
    if 3 * triangles > n {
        return Err(GraphError::Group(format!("{triangles} disjoint triangles do not fit in {n} vertices")));
    }
    let mut b = GraphBuilder::new(n);
    let mut free = vec![d; n];
    for t in order.chunks(3).take(triangles) {
        b.edge(t[0], t[1]);
        b.edge(t[1], t[2]);
        b.edge(t[2], t[0]);
        t.iter().for_each(|&v| free[v] -= 2);
    }
    let stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat(v).take(free[v])).collect();
    match_stubs(&mut b, stubs, &mut rng);
    Ok(b.build().with_name(format!("planted(d={d},n={n},eps={eps},seed={seed})")))
}

/// Share of eigenvalues of `M`, with multiplicity, in `[-rho(T_d), rho(T_d)]`; the
/// window is widened by the eigensolve residual. The trivial eigenvalues `+-1` always
/// count as outside, which only matters for `d = 2`.
pub fn weakly_ramanujan_mass(g: &SerreGraph) -> Result<f64, SpectralError> {
    Ok(mass_from_summary(&markov_spectrum(g)?))
}

pub fn mass_from_summary(s: &SpectralSummary) -> f64 {
    let w = tree_rho(s.d) + s.residual.unwrap_or(1e-10).max(1e-12);
    s.eigenvalues.iter().filter(|x| x.abs() <= w && x.abs() < 1.0 - CLUSTER_TOL).count() as f64 / s.eigenvalues.len().max(1) as f64
}

/// `W_1` distance between the eigenvalue distribution and the Kesten–McKay law,
/// `int |F_G - F_KM|` on `[-1, 1]`.
pub fn wasserstein_to_kesten_mckay(d: usize, eigenvalues: &[f64]) -> f64 {
    const N: usize = 40_000;
    let h = 2.0 / N as f64;
    let mut sorted = eigenvalues.to_vec();
    sorted.sort_by(f64::total_cmp);
    let total_km: f64 = (0..N).map(|i| kesten_mckay_density(d, -1.0 + (i as f64 + 0.5) * h)).sum::<f64>() * h;
    let (mut f_km, mut below, mut w) = (0.0, 0usize, 0.0);
    for i in 0..N {
        let mid = -1.0 + (i as f64 + 0.5) * h;
        let half = 0.5 * kesten_mckay_density(d, mid) * h / total_km;
        f_km += half;
        while below < sorted.len() && sorted[below] <= mid {
            below += 1;
        }
        let f_g = below as f64 / sorted.len().max(1) as f64;
        w += (f_g - f_km).abs() * h;
        f_km += half;
    }
    w
}

/// `max_k |int x^k d mu_G - mean_v p_k(v,v)|` for `k <= kmax`, the first from the
/// eigenvalues, the second from exact closed-walk counts.
pub fn moment_identity_gap(g: &SerreGraph, kmax: usize) -> Result<f64, SpectralError> {
    let s = markov_spectrum(g)?;
    let n = g.vertex_count() as f64;
    let mut worst: f64 = 0.0;
    for k in 0..=kmax {
        let spectral = s.eigenvalues.iter().map(|x| x.powi(k as i32)).sum::<f64>() / n;
        let walks: u128 = closed_walk_counts(g, k).iter().sum();
        let exact = walks as f64 / (s.d as f64).powi(k as i32) / n;
        worst = worst.max((spectral - exact).abs());
    }
    Ok(worst)
}

/// One graph's three local-convergence measurements side by side.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquivalenceRow {
    pub name: String,
    pub size: usize,
    /// `cycle_densities[L - 1]` is the number of rooted nontrivial `L`-cycles over `|G|`.
    pub cycle_densities: Vec<f64>,
    /// Total variation distance of the `r`-ball law from the point mass at the tree ball.
    pub tree_distance: f64,
    pub wasserstein: f64,
}

pub fn ekvivalens_diagnostic(graphs: &[SerreGraph], r: usize, kmax: usize) -> Result<Vec<EquivalenceRow>, SpectralError> {
    graphs
        .iter()
        .map(|g| {
            let s = markov_spectrum(g)?;
            let tree = ball(&families::tree_ball(s.d, r), r);
            let tree_share = bs_histogram(g, r).frequency(&tree);
            let cycle_densities = (1..=kmax)
                .map(|k| CycleCensus::compute(g, k).map(|c| c.density).map_err(|e| SpectralError::Domain(e.to_string())))
                .collect::<Result<_, _>>()?;
            Ok(EquivalenceRow {
                name: g.name().unwrap_or("").to_string(),
                size: g.vertex_count(),
                cycle_densities,
                tree_distance: 1.0 - tree_share,
                wasserstein: wasserstein_to_kesten_mckay(s.d, &s.eigenvalues),
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FleetRow {
    pub size: usize,
    pub seed: u64,
    pub planted: f64,
    pub rho: f64,
    pub weakly_ramanujan_mass: f64,
}

/// Random `d`-regular graphs for every size and seed (`planted > 0` plants triangles
/// at that vertex density), analysed in parallel; rows come back in input order.
pub fn fleet(d: usize, sizes: &[usize], seeds: &[u64], planted: f64) -> Result<Vec<FleetRow>, SpectralError> {
    let jobs: Vec<(usize, u64)> = sizes.iter().flat_map(|&n| seeds.iter().map(move |&s| (n, s))).collect();
    let run = |&(n, seed): &(usize, u64)| -> Result<FleetRow, SpectralError> {
        let g = if planted > 0.0 { planted_triangles(d, n, planted, seed)? } else { configuration_model(d, n, seed)? };
        let s = markov_spectrum(&g)?;
        Ok(FleetRow { size: n, seed, planted, rho: s.rho, weakly_ramanujan_mass: mass_from_summary(&s) })
    };
    let workers = crate::parallel::workers().min(jobs.len().max(1));
    let chunk = jobs.len().div_ceil(workers).max(1);
    std::thread::scope(|s| {
        let handles: Vec<_> = jobs.chunks(chunk).map(|c| s.spawn(move || c.iter().map(run).collect::<Vec<_>>())).collect();
        handles.into_iter().flat_map(|h| h.join().expect("fleet worker panicked")).collect()
    })
}

/// Mean and standard error of the mean.
pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = if xs.len() > 1 { xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    (mean, (var / n).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn k33() -> SerreGraph {
        let mut b = GraphBuilder::new(6);
        for i in 0..3 {
            for j in 3..6 {
                b.edge(i, j);
            }
        }
        b.build()
    }

    #[test]
    fn transitive_graphs_have_point_mass() {
        for g in [families::complete(4), families::petersen(), k33()] {
            let h = bs_histogram(&g, 1);
            assert_eq!(h.counts.len(), 1);
            assert_eq!(h.frequencies(), vec![1.0]);
        }
        let h = bs_histogram(&families::petersen(), 1);
        assert!(h.counts[0].0.is_tree);
    }

    #[test]
    fn disjoint_union_splits_histogram() {
        let g = families::complete(4).disjoint_union(&k33());
        let mut f = bs_histogram(&g, 1).frequencies();
        f.sort_by(f64::total_cmp);
        assert_eq!(f, vec![0.4, 0.6]);
    }

    #[test]
    fn configuration_model_is_reproducible() {
        let a = configuration_model(3, 1024, 7).unwrap();
        let b = configuration_model(3, 1024, 7).unwrap();
        assert_eq!(a.edges(), b.edges());
        assert_eq!(a.regular_degree(), Some(3));
        assert!(matches!(configuration_model(3, 5, 0), Err(GraphError::OddStubCount(15))));
    }

    #[test]
    fn configuration_model_matches_matching_count() {
        // of the 15 matchings of 6 half-edges on two vertices, 6 give three parallel edges
        let draws = 10_000;
        let theta = (0..draws).filter(|&s| configuration_model(3, 2, s).unwrap().multiplicity(0, 1) == 3).count();
        let p = 6.0 / 15.0;
        let se = (p * (1.0 - p) / draws as f64).sqrt();
        assert!((theta as f64 / draws as f64 - p).abs() < 4.0 * se);
    }

    #[test]
    fn planted_triangles_are_regular_with_triangles() {
        let g = planted_triangles(3, 300, 0.1, 1).unwrap();
        assert_eq!(g.regular_degree(), Some(3));
        let c = CycleCensus::compute(&g, 3).unwrap();
        // each planted triangle gives 6 rooted directed 3-cycles
        assert!(c.total >= 6 * 30);
        assert!(planted_triangles(3, 300, 0.34, 1).is_err());
    }

    #[test]
    fn mass_examples() {
        assert!((weakly_ramanujan_mass(&families::petersen()).unwrap() - 0.9).abs() < 1e-12);
        assert!((weakly_ramanujan_mass(&families::complete(4)).unwrap() - 0.75).abs() < 1e-12);
        assert!((weakly_ramanujan_mass(&families::cycle(6)).unwrap() - 4.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn moment_identity() {
        for g in [families::petersen(), families::complete(4), configuration_model(3, 60, 3).unwrap(), configuration_model(4, 40, 1).unwrap()] {
            assert!(moment_identity_gap(&g, 20).unwrap() < 1e-8);
        }
    }

    #[test]
    fn wasserstein_of_point_masses() {
        // all mass at 1: W1 is the mean distance of Kesten-McKay from 1, which is 1
        // by symmetry
        assert!((wasserstein_to_kesten_mckay(3, &[1.0]) - 1.0).abs() < 1e-4);
        // all mass at 0: W1 is E|X|, by quadrature in t = rho cos(theta)
        let rho = tree_rho(3);
        let m = 200_000;
        let h = std::f64::consts::PI / m as f64;
        let e_abs: f64 = (0..m)
            .map(|i| {
                let th = (i as f64 + 0.5) * h;
                let t = rho * th.cos();
                t.abs() * kesten_mckay_density(3, t) * rho * th.sin() * h
            })
            .sum();
        assert!((wasserstein_to_kesten_mckay(3, &[0.0]) - e_abs).abs() < 1e-4);
    }

    #[test]
    fn equivalence_columns_shrink_with_size() {
        let graphs: Vec<SerreGraph> = [64, 256, 1024].iter().map(|&n| configuration_model(3, n, 5).unwrap()).collect();
        let rows = ekvivalens_diagnostic(&graphs, 2, 4).unwrap();
        for w in rows.windows(2) {
            assert!(w[1].tree_distance < w[0].tree_distance);
            assert!(w[1].wasserstein < w[0].wasserstein);
            assert!(w[1].cycle_densities.iter().sum::<f64>() < w[0].cycle_densities.iter().sum::<f64>());
        }
        let k4 = ekvivalens_diagnostic(&[families::complete(4)], 1, 3).unwrap();
        assert_eq!(k4[0].tree_distance, 1.0);
        assert!(k4[0].wasserstein > 0.1);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn histogram_sums_to_one(seed in 0u64..500, r in 1usize..3) {
            let g = configuration_model(3, 40, seed).unwrap();
            let s: f64 = bs_histogram(&g, r).frequencies().iter().sum();
            prop_assert!((s - 1.0).abs() < 1e-12);
        }

        #[test]
        fn planted_graphs_stay_regular(seed in 0u64..500, d in 3usize..6, eps in 0.0f64..0.33) {
            let n = 60;
            let g = planted_triangles(d, n, eps, seed).unwrap();
            prop_assert_eq!(g.regular_degree(), Some(d));
        }
    }
}
