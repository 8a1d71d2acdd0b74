//! Counts of nontrivial closed walks and tree-neighbourhood profiles.
//!
//! Counting convention: a nontrivial `k`-cycle is a rooted, directed closed walk,
//! so the density of nontrivial `k`-cycles equals the mean over roots of `gamma_k`.

use rand::Rng;
use serde::Serialize;

use crate::error::CensusError;
use crate::graph::{EdgeId, SerreGraph, VertexId};
use crate::nullcycle::pair_key;

/// Default cap on `d^k` walks enumerated per root.
pub const ENUMERATION_BUDGET: u128 = 100_000_000;

/// Length of the shortest nontrivial cycle, `None` for a loop-free forest.
pub fn girth(g: &SerreGraph) -> Option<usize> {
    if (0..g.edge_count()).any(|e| g.is_loop(e)) {
        return Some(1);
    }
    for e in 0..g.edge_count() {
        let (u, v) = (g.src(e), g.dst(e));
        if u < v && g.multiplicity(u, v) > 1 {
            return Some(2);
        }
    }
    let n = g.vertex_count();
    let mut best = usize::MAX;
    let mut dist = vec![usize::MAX; n];
    let mut via = vec![usize::MAX; n];
    let mut queue = std::collections::VecDeque::new();
    for s in 0..n {
        dist.iter_mut().for_each(|x| *x = usize::MAX);
        dist[s] = 0;
        queue.clear();
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            if 2 * dist[u] + 1 >= best {
                break;
            }
            for &e in g.out_edges(u) {
                if via[u] == g.inv(e) && u != s {
                    continue;
                }
                let w = g.dst(e);
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    via[w] = e;
                    queue.push_back(w);
                } else {
                    best = best.min(dist[u] + dist[w] + 1);
                }
            }
        }
    }
    (best != usize::MAX).then_some(best)
}

/// Number of nontrivial closed walks of length `k` from `v`, by exhaustive search.
pub fn gamma_k(g: &SerreGraph, v: VertexId, k: usize) -> Result<u64, CensusError> {
    gamma_k_with_budget(g, v, k, ENUMERATION_BUDGET)
}

pub fn gamma_k_with_budget(g: &SerreGraph, v: VertexId, k: usize, budget: u128) -> Result<u64, CensusError> {
    if v >= g.vertex_count() {
        return Err(crate::error::GraphError::BadVertex { vertex: v, vertex_count: g.vertex_count() }.into());
    }
    let walks = (g.max_degree() as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
    if walks > budget {
        return Err(CensusError::Budget { walks, budget });
    }
    if k == 0 {
        return Ok(0);
    }
    if k == 1 {
        return Ok(g.out_edges(v).iter().filter(|&&e| g.is_loop(e)).count() as u64);
    }
    let mut net: Vec<(EdgeId, i64)> = Vec::with_capacity(k);
    Ok(search(g, v, v, k, &mut net))
}

fn search(g: &SerreGraph, at: VertexId, root: VertexId, left: usize, net: &mut Vec<(EdgeId, i64)>) -> u64 {
    if left == 0 {
        return u64::from(at == root && net.iter().any(|&(_, c)| c != 0));
    }
    let mut total = 0;
    for &e in g.out_edges(at) {
        if g.is_loop(e) {
            total += search(g, at, root, left - 1, net);
            continue;
        }
        let (key, s) = pair_key(g, e);
        match net.iter().position(|&(x, _)| x == key) {
            Some(i) => {
                net[i].1 += s;
                total += search(g, g.dst(e), root, left - 1, net);
                net[i].1 -= s;
            }
            None => {
                net.push((key, s));
                total += search(g, g.dst(e), root, left - 1, net);
                net.pop();
            }
        }
    }
    total
}

/// Monte Carlo estimate of `gamma_k(v)` from uniform `k`-step walks: `(estimate, std error)`.
pub fn gamma_k_sampled<R: Rng + ?Sized>(g: &SerreGraph, v: VertexId, k: usize, samples: usize, rng: &mut R) -> Result<(f64, f64), CensusError> {
    let d = g.require_regular()?;
    let mut hits = 0usize;
    for _ in 0..samples {
        let mut at = v;
        let mut edges = Vec::with_capacity(k);
        for _ in 0..k {
            let out = g.out_edges(at);
            let e = out[rng.gen_range(0..out.len())];
            edges.push(e);
            at = g.dst(e);
        }
        if at != v {
            continue;
        }
        let w = crate::graph::Walk { start: v, edges };
        if crate::nullcycle::classify_cycle(g, &w)?.nontrivial {
            hits += 1;
        }
    }
    let p = hits as f64 / samples as f64;
    let scale = (d as f64).powi(k as i32);
    Ok((p * scale, scale * (p * (1.0 - p) / samples as f64).sqrt()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CycleCensus {
    pub k: usize,
    pub per_vertex: Vec<u64>,
    pub total: u128,
    /// `total / |G|`, which is also the mean of `per_vertex`.
    pub density: f64,
}

impl CycleCensus {
    pub fn compute(g: &SerreGraph, k: usize) -> Result<Self, CensusError> {
        Self::compute_with_budget(g, k, ENUMERATION_BUDGET)
    }

    pub fn compute_with_budget(g: &SerreGraph, k: usize, budget: u128) -> Result<Self, CensusError> {
        let n = g.vertex_count();
        let workers = crate::parallel::workers().min(n.max(1));
        let chunk = n.div_ceil(workers.max(1)).max(1);
        let parts: Vec<Result<Vec<u64>, CensusError>> = std::thread::scope(|s| {
            let handles: Vec<_> = (0..n)
                .step_by(chunk)
                .map(|lo| {
                    s.spawn(move || (lo..(lo + chunk).min(n)).map(|v| gamma_k_with_budget(g, v, k, budget)).collect())
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("census worker panicked")).collect()
        });
        let mut per_vertex = Vec::with_capacity(n);
        for p in parts {
            per_vertex.extend(p?);
        }
        let total: u128 = per_vertex.iter().map(|&x| x as u128).sum();
        let density = if n == 0 { 0.0 } else { total as f64 / n as f64 };
        Ok(CycleCensus { k, per_vertex, total, density })
    }

    /// Exact mean as a reduced fraction `(total, |G|)`.
    pub fn mean_fraction(&self) -> (u128, usize) {
        (self.total, self.per_vertex.len())
    }
}

/// Largest `r` such that the induced `r`-ball around `v` is a loop-free tree, capped
/// at `rmax`. Returns `None` when even the 0-ball has a loop.
pub fn tree_radius(g: &SerreGraph, v: VertexId, rmax: usize) -> Option<usize> {
    let dist = bounded_distances(g, v, rmax);
    let mut vertices = vec![0usize; rmax + 1];
    let mut edges = vec![0usize; rmax + 1];
    for &(u, du) in &dist.order {
        vertices[du] += 1;
        for &e in g.out_edges(u) {
            let w = g.dst(e);
            let dw = dist.get(w);
            if dw > rmax {
                continue;
            }
            let counts_once = e < g.inv(e) || e == g.inv(e);
            if counts_once {
                edges[du.max(dw)] += 1;
            }
        }
    }
    let (mut nv, mut ne) = (0, 0);
    let mut radius = None;
    for r in 0..=rmax {
        nv += vertices[r];
        ne += edges[r];
        if ne + 1 != nv {
            break;
        }
        radius = Some(r);
    }
    radius
}

struct Bounded {
    order: Vec<(VertexId, usize)>,
    seen: std::collections::HashMap<VertexId, usize>,
}

impl Bounded {
    fn get(&self, v: VertexId) -> usize {
        self.seen.get(&v).copied().unwrap_or(usize::MAX)
    }
}

fn bounded_distances(g: &SerreGraph, v: VertexId, rmax: usize) -> Bounded {
    let mut seen = std::collections::HashMap::new();
    seen.insert(v, 0);
    let mut order = vec![(v, 0)];
    let mut i = 0;
    while i < order.len() {
        let (u, du) = order[i];
        i += 1;
        if du == rmax {
            continue;
        }
        for &e in g.out_edges(u) {
            let w = g.dst(e);
            if let std::collections::hash_map::Entry::Vacant(slot) = seen.entry(w) {
                slot.insert(du + 1);
                order.push((w, du + 1));
            }
        }
    }
    Bounded { order, seen }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GirthProfile {
    /// `fractions[r - 1]` is the share of vertices whose `r`-ball is a loop-free tree.
    pub fractions: Vec<f64>,
    /// `beta log log |G|` with `beta = 1/(30 log(d-1))`; `None` when undefined.
    pub threshold: Option<f64>,
    pub beta: Option<f64>,
}

pub fn essential_girth_profile(g: &SerreGraph, rmax: usize) -> GirthProfile {
    let n = g.vertex_count();
    let mut counts = vec![0usize; rmax + 1];
    for v in 0..n {
        if let Some(r) = tree_radius(g, v, rmax) {
            for c in counts.iter_mut().take(r + 1) {
                *c += 1;
            }
        }
    }
    let fractions = (1..=rmax).map(|r| counts[r] as f64 / n.max(1) as f64).collect();
    let d = g.regular_degree().unwrap_or_else(|| g.max_degree());
    let beta = (d >= 3).then(|| 1.0 / (30.0 * ((d - 1) as f64).ln()));
    let loglog = (n as f64).ln().ln();
    let threshold = beta.filter(|_| loglog.is_finite() && loglog > 0.0).map(|b| b * loglog);
    GirthProfile { fractions, threshold, beta }
}
