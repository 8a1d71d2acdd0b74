//! Spectra of the Markov operator, spectral measures, and walk-growth invariants.
//!
//! `rho(G)` of a finite graph is the second largest element of the *set* of
//! absolute values of eigenvalues of `M`. For a connected bipartite graph this
//! discards `-1` together with `1`; for a disconnected graph the repeated `1` is
//! discarded as well.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::error::{GraphError, SpectralError};
use crate::graph::{SerreGraph, VertexId};
use crate::linalg::{lanczos, symmetric_eigen, SymMatrix};
use crate::report::{hyp, BoundReport};
use crate::treewalk::{ratio, rational_to_f64, tree_rho};

/// Eigenvalues closer than this are treated as one element of the spectrum set.
pub const CLUSTER_TOL: f64 = 1e-8;
/// Above this size `rho` comes from Lanczos rather than a dense eigensolve.
pub const DENSE_LIMIT: usize = 2048;

pub fn markov_matrix(g: &SerreGraph) -> Result<SymMatrix, SpectralError> {
    let d = g.require_regular()?;
    let n = g.vertex_count();
    let mut m = SymMatrix::zeros(n);
    for e in g.edges() {
        m.add(e.src, e.dst, 1.0 / d as f64);
    }
    Ok(m)
}

/// `M x` without forming the matrix.
pub fn apply_markov(g: &SerreGraph, d: usize, x: &[f64]) -> Vec<f64> {
    (0..g.vertex_count()).map(|v| g.out_edges(v).iter().map(|&e| x[g.dst(e)]).sum::<f64>() / d as f64).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralSummary {
    pub d: usize,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Distinct eigenvalues (within `CLUSTER_TOL`) with multiplicities, ascending.
    pub distinct: Vec<(f64, usize)>,
    pub rho: f64,
    pub is_bipartite: bool,
    pub ramanujan: bool,
    pub weakly_ramanujan_mass: f64,
    /// Largest `|M v - lambda v|` over the computed pairs, when eigenvectors exist.
    pub residual: Option<f64>,
}

/// `rho` under the distinct-absolute-value rule from a list of eigenvalues.
pub fn rho_from_eigenvalues(values: &[f64]) -> f64 {
    let mut abs: Vec<f64> = values.iter().map(|x| x.abs()).collect();
    abs.sort_by(|a, b| b.total_cmp(a));
    let mut distinct: Vec<f64> = Vec::new();
    for a in abs {
        if distinct.last().map_or(true, |&l| l - a > CLUSTER_TOL) {
            distinct.push(a);
        }
    }
    distinct.get(1).copied().unwrap_or(0.0)
}

fn cluster(values: &[f64]) -> Vec<(f64, usize)> {
    let mut out: Vec<(f64, usize)> = Vec::new();
    for &v in values {
        match out.last_mut() {
            Some((x, c)) if v - *x <= CLUSTER_TOL => {
                *c += 1;
            }
            _ => out.push((v, 1)),
        }
    }
    out
}

pub fn markov_spectrum(g: &SerreGraph) -> Result<SpectralSummary, SpectralError> {
    let d = g.require_regular()?;
    let m = markov_matrix(g)?;
    let eig = symmetric_eigen(&m, g.vertex_count() <= 400);
    let n = g.vertex_count();
    let residual = eig.vectors.as_ref().map(|_| {
        (0..n)
            .map(|j| {
                let v: Vec<f64> = (0..n).map(|i| eig.vector_entry(i, j)).collect();
                let mv = m.mul_vec(&v);
                mv.iter().zip(&v).map(|(a, b)| (a - eig.values[j] * b).powi(2)).sum::<f64>().sqrt()
            })
            .fold(0.0, f64::max)
    });
    let rho = rho_from_eigenvalues(&eig.values);
    let tr = tree_rho(d);
    let inside = eig.values.iter().filter(|x| x.abs() <= tr + 1e-10 && x.abs() < 1.0 - CLUSTER_TOL).count();
    Ok(SpectralSummary {
        d,
        distinct: cluster(&eig.values),
        rho,
        is_bipartite: g.is_bipartite(),
        ramanujan: rho <= tr + 1e-12,
        weakly_ramanujan_mass: inside as f64 / n.max(1) as f64,
        residual,
        eigenvalues: eig.values,
    })
}

/// `rho` with an error radius: dense for small graphs, Lanczos on the complement of
/// the `+-1` eigenspaces otherwise.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RhoEstimate {
    pub rho: f64,
    /// `rho` is within `radius` of an eigenvalue; for Lanczos, `rho` is also a lower
    /// bound on the true value up to rounding.
    pub radius: f64,
    pub method: &'static str,
}

pub fn spectral_radius(g: &SerreGraph, seed: u64) -> Result<RhoEstimate, SpectralError> {
    if g.vertex_count() <= DENSE_LIMIT {
        let s = markov_spectrum(g)?;
        return Ok(RhoEstimate { rho: s.rho, radius: s.residual.unwrap_or(1e-10).max(1e-12), method: "dense" });
    }
    spectral_radius_lanczos(g, seed, 300)
}

pub fn spectral_radius_lanczos(g: &SerreGraph, seed: u64, steps: usize) -> Result<RhoEstimate, SpectralError> {
    let d = g.require_regular()?;
    let n = g.vertex_count();
    // the +-1 eigenspaces: component indicators and bipartite sign vectors
    let comp = g.components();
    let ncomp = comp.iter().copied().max().map_or(0, |c| c + 1);
    let mut deflate = Vec::new();
    let mut sides = vec![0i8; n];
    for c in 0..ncomp {
        let members: Vec<usize> = (0..n).filter(|&v| comp[v] == c).collect();
        let s = (members.len() as f64).sqrt();
        let mut ind = vec![0.0; n];
        members.iter().for_each(|&v| ind[v] = 1.0 / s);
        deflate.push(ind);
        // two-colour the component
        let mut ok = true;
        let mut stack = vec![members[0]];
        sides[members[0]] = 1;
        while let Some(u) = stack.pop() {
            for &e in g.out_edges(u) {
                let w = g.dst(e);
                if sides[w] == 0 {
                    sides[w] = -sides[u];
                    stack.push(w);
                } else if sides[w] == sides[u] {
                    ok = false;
                }
            }
        }
        if ok {
            let mut sign = vec![0.0; n];
            members.iter().for_each(|&v| sign[v] = sides[v] as f64 / s);
            deflate.push(sign);
        }
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let start: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let l = lanczos(|x| apply_markov(g, d, x), start, &deflate, steps);
    if l.ritz.is_empty() {
        return Ok(RhoEstimate { rho: 0.0, radius: 0.0, method: "lanczos" });
    }
    let (lo, hi) = (0, l.ritz.len() - 1);
    let (rho, radius) = if l.ritz[hi].abs() >= l.ritz[lo].abs() { (l.ritz[hi].abs(), l.residuals[hi]) } else { (l.ritz[lo].abs(), l.residuals[lo]) };
    Ok(RhoEstimate { rho, radius: radius.max(1e-12), method: "lanczos" })
}

/// Exact walk counts `(A^t)_{o, .}` for `t = 0..=n`.
pub fn walk_counts_from(g: &SerreGraph, o: VertexId, n: usize) -> Vec<Vec<BigUint>> {
    let mut out = Vec::with_capacity(n + 1);
    let mut cur = vec![BigUint::zero(); g.vertex_count()];
    cur[o] = 1u32.into();
    out.push(cur.clone());
    for _ in 0..n {
        let mut next = vec![BigUint::zero(); g.vertex_count()];
        for (v, c) in cur.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for &e in g.out_edges(v) {
                next[g.dst(e)] += c;
            }
        }
        out.push(next.clone());
        cur = next;
    }
    out
}

/// Exact `p_t(o, o)` for `t = 0..=n`.
pub fn return_probabilities(g: &SerreGraph, o: VertexId, n: usize) -> Result<Vec<BigRational>, SpectralError> {
    let d = g.require_regular()?;
    Ok(walk_counts_from(g, o, n).iter().enumerate().map(|(t, c)| ratio(&c[o], &BigUint::from(d).pow(t as u32))).collect())
}

/// Number of closed walks of length `len` at `o`, using only the ball that such a
/// walk can reach.
pub fn closed_walk_count(g: &SerreGraph, o: VertexId, len: usize) -> u128 {
    let radius = len / 2;
    let mut dist = std::collections::HashMap::from([(o, 0usize)]);
    let mut order = vec![o];
    let mut i = 0;
    while i < order.len() {
        let u = order[i];
        i += 1;
        let du = dist[&u];
        if du == radius {
            continue;
        }
        for &e in g.out_edges(u) {
            let w = g.dst(e);
            if let std::collections::hash_map::Entry::Vacant(s) = dist.entry(w) {
                s.insert(du + 1);
                order.push(w);
            }
        }
    }
    let index: std::collections::HashMap<VertexId, usize> = order.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let dl: Vec<usize> = order.iter().map(|v| dist[v]).collect();
    let mut cur = vec![0u128; order.len()];
    cur[0] = 1;
    for t in 0..len {
        let left = len - t - 1;
        let mut next = vec![0u128; order.len()];
        for (i, &c) in cur.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for &e in g.out_edges(order[i]) {
                if let Some(&j) = index.get(&g.dst(e)) {
                    if dl[j] <= left {
                        next[j] = next[j].checked_add(c).expect("closed walk count overflow");
                    }
                }
            }
        }
        cur = next;
    }
    cur[0]
}

/// `closed_walk_count(g, o, len)` for every root, in parallel.
pub fn closed_walk_counts(g: &SerreGraph, len: usize) -> Vec<u128> {
    let n = g.vertex_count();
    let workers = crate::parallel::workers().min(n.max(1));
    let chunk = n.div_ceil(workers.max(1)).max(1);
    std::thread::scope(|s| {
        let handles: Vec<_> = (0..n)
            .step_by(chunk)
            .map(|lo| {
                s.spawn(move || {
                    let mut slot = vec![usize::MAX; n];
                    (lo..(lo + chunk).min(n)).map(|o| closed_walk_count_local(g, o, len, &mut slot)).collect::<Vec<_>>()
                })
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("walk worker panicked")).collect()
    })
}

/// Same as `closed_walk_count`, with a caller-owned index array (all `usize::MAX`
/// on entry and on exit).
fn closed_walk_count_local(g: &SerreGraph, o: VertexId, len: usize, slot: &mut [usize]) -> u128 {
    let radius = len / 2;
    let mut order = vec![o];
    let mut dl = vec![0usize];
    slot[o] = 0;
    let mut i = 0;
    while i < order.len() {
        let (u, du) = (order[i], dl[i]);
        i += 1;
        if du == radius {
            continue;
        }
        for &e in g.out_edges(u) {
            let w = g.dst(e);
            if slot[w] == usize::MAX {
                slot[w] = order.len();
                order.push(w);
                dl.push(du + 1);
            }
        }
    }
    let mut cur = vec![0u128; order.len()];
    let mut next = vec![0u128; order.len()];
    cur[0] = 1;
    for t in 0..len {
        let left = len - t - 1;
        next.iter_mut().for_each(|x| *x = 0);
        for (i, &c) in cur.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for &e in g.out_edges(order[i]) {
                let j = slot[g.dst(e)];
                if j != usize::MAX && dl[j] <= left {
                    next[j] = next[j].checked_add(c).expect("closed walk count overflow");
                }
            }
        }
        std::mem::swap(&mut cur, &mut next);
    }
    for &v in &order {
        slot[v] = usize::MAX;
    }
    cur[0]
}

/// Spectral measure: unrooted (eigenvalue distribution) or rooted at `v`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralMeasure {
    pub atoms: Vec<(f64, f64)>,
}

impl SpectralMeasure {
    pub fn moment(&self, k: usize) -> f64 {
        self.atoms.iter().map(|(x, w)| w * x.powi(k as i32)).sum()
    }

    pub fn mass_in(&self, lo: f64, hi: f64) -> f64 {
        self.atoms.iter().filter(|(x, _)| *x >= lo && *x <= hi).map(|(_, w)| w).sum()
    }
}

pub fn spectral_measure(g: &SerreGraph, root: Option<VertexId>) -> Result<SpectralMeasure, SpectralError> {
    let m = markov_matrix(g)?;
    let n = g.vertex_count();
    let eig = symmetric_eigen(&m, root.is_some());
    let raw: Vec<(f64, f64)> = match root {
        None => eig.values.iter().map(|&x| (x, 1.0 / n as f64)).collect(),
        Some(v) => {
            if v >= n {
                return Err(GraphError::BadVertex { vertex: v, vertex_count: n }.into());
            }
            (0..n).map(|j| (eig.values[j], eig.vector_entry(v, j).powi(2))).collect()
        }
    };
    let mut atoms: Vec<(f64, f64)> = Vec::new();
    for (x, w) in raw {
        match atoms.last_mut() {
            Some((y, acc)) if x - *y <= CLUSTER_TOL => *acc += w,
            _ => atoms.push((x, w)),
        }
    }
    Ok(SpectralMeasure { atoms })
}

/// Checks `p_n(o, A) <= sqrt|A| rho^n + 2|A|/|G|` for `n = 0..=nmax`, with exact
/// `p_n(o, A)`.
pub fn hitting_bound_check(g: &SerreGraph, o: VertexId, set: &[VertexId], nmax: usize) -> Result<Vec<BoundReport>, SpectralError> {
    let d = g.require_regular()?;
    let connected = g.is_connected();
    let s = markov_spectrum(g)?;
    let rho = s.rho + s.residual.unwrap_or(1e-10);
    let counts = walk_counts_from(g, o, nmax);
    let mut in_set = vec![false; g.vertex_count()];
    set.iter().for_each(|&v| in_set[v] = true);
    let a = set.len() as f64;
    let size = g.vertex_count() as f64;
    Ok(counts
        .iter()
        .enumerate()
        .map(|(n, c)| {
            let hits: BigUint = c.iter().enumerate().filter(|(v, _)| in_set[*v]).map(|(_, x)| x).sum();
            let p = rational_to_f64(&ratio(&hits, &BigUint::from(d).pow(n as u32)));
            let rhs = a.sqrt() * rho.powi(n as i32) + 2.0 * a / size;
            BoundReport::new(format!("hitting probability at n = {n}"), vec![hyp("connected", connected)], rhs, p, 1e-12)
                .constant("rho", s.rho)
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CogrowthSummary {
    pub alpha: f64,
    /// `alpha` is an exact integer (constant non-backtracking row sums).
    pub exact: bool,
    pub degenerate: bool,
    /// Set when the plain power iteration oscillated and the squared operator was used.
    pub squared_fallback: bool,
    pub m: Option<usize>,
    pub rho_cover: Option<f64>,
}

/// Perron value of the non-backtracking operator on directed edges.
pub fn nonbacktracking_cogrowth(g: &SerreGraph, m: Option<usize>) -> Result<CogrowthSummary, SpectralError> {
    let ne = g.edge_count();
    let cont = |e: usize| g.out_edges(g.dst(e)).iter().copied().filter(move |&f| f != g.inv(e));
    if crate::census::girth(g).is_none() || ne == 0 {
        return Ok(CogrowthSummary { alpha: 0.0, exact: true, degenerate: true, squared_fallback: false, m, rho_cover: None });
    }
    // edges that lie on some cycle carry the Perron value; the rest are transient
    let rows: Vec<usize> = (0..ne).map(|e| cont(e).count()).collect();
    let (alpha, exact, squared) = if g.regular_degree().is_some() && rows.iter().all(|&r| r == rows[0]) {
        (rows[0] as f64, true, false)
    } else {
        let step = |x: &[f64]| -> Vec<f64> {
            let mut y = vec![0.0; ne];
            for e in 0..ne {
                y[e] = cont(e).map(|f| x[f]).sum();
            }
            y
        };
        let mut x = vec![1.0; ne];
        let mut prev = f64::NAN;
        let mut value = f64::NAN;
        let mut converged = false;
        for _ in 0..20_000 {
            let y = step(&x);
            let norm = y.iter().cloned().fold(0.0, f64::max);
            if norm == 0.0 {
                break;
            }
            x = y.into_iter().map(|v| v / norm).collect();
            value = norm;
            if (value - prev).abs() <= 1e-12 * value {
                converged = true;
                break;
            }
            prev = value;
        }
        if converged {
            (value, false, false)
        } else {
            let mut x = vec![1.0; ne];
            let mut value = 0.0;
            for _ in 0..20_000 {
                let y = step(&step(&x));
                let norm = y.iter().cloned().fold(0.0, f64::max);
                if norm == 0.0 {
                    break;
                }
                x = y.into_iter().map(|v| v / norm).collect();
                let old = value;
                value = norm;
                if (value - old).abs() <= 1e-12 * value {
                    break;
                }
            }
            (value.sqrt(), false, true)
        }
    };
    let rho_cover = match m {
        Some(m) => Some(grigorchuk_rho(m, alpha)?),
        None => None,
    };
    Ok(CogrowthSummary { alpha, exact, degenerate: false, squared_fallback: squared, m, rho_cover })
}

/// Non-backtracking closed walks of length `n` at `o` (no backtrack between the
/// last and first step is imposed).
pub fn nonbacktracking_returns(g: &SerreGraph, o: VertexId, n: usize) -> BigUint {
    crate::nullcycle::nonbacktracking_endpoint_counts(g, o, n)[n][o].clone()
}

/// The cogrowth formula for the cover: `(sqrt(m-1)/m)(alpha/sqrt(m-1) + sqrt(m-1)/alpha)`
/// when `alpha > sqrt(m-1)`, else `2 sqrt(m-1)/m`.
pub fn grigorchuk_rho(m: usize, alpha: f64) -> Result<f64, SpectralError> {
    if m < 2 || !(alpha > 0.0 && alpha <= (m - 1) as f64 + 1e-12) {
        return Err(SpectralError::AlphaRange { alpha, max: m.saturating_sub(1) as f64 });
    }
    let s = ((m - 1) as f64).sqrt();
    if alpha > s {
        Ok(s / m as f64 * (alpha / s + s / alpha))
    } else {
        Ok(2.0 * s / m as f64)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TreeRamanujan {
    pub m: usize,
    pub alpha: f64,
    /// `m - (alpha^2 + 1)`; Ramanujan iff nonnegative.
    pub margin: f64,
    pub ramanujan: bool,
    /// Exact integer comparison was possible.
    pub exact: bool,
    /// `m >= d^2 - 2d + 2`, sufficient for a `d`-regular base.
    pub sufficient_bound: Option<bool>,
}

pub fn tree_m_ramanujan(g: &SerreGraph, m: usize) -> Result<TreeRamanujan, SpectralError> {
    if let Some((v, deg)) = (0..g.vertex_count()).map(|v| (v, g.degree(v))).find(|&(_, deg)| deg > m) {
        return Err(GraphError::DegreeTooLarge { vertex: v, degree: deg, bound: m }.into());
    }
    let c = nonbacktracking_cogrowth(g, Some(m))?;
    let (margin, ramanujan) = if c.exact {
        let a = c.alpha as i64;
        let margin = m as i64 - (a * a + 1);
        (margin as f64, margin >= 0)
    } else {
        let margin = m as f64 - (c.alpha * c.alpha + 1.0);
        (margin, margin >= -1e-9)
    };
    let sufficient_bound = g.regular_degree().map(|d| m + 2 * d >= d * d + 2);
    Ok(TreeRamanujan { m, alpha: c.alpha, margin, ramanujan, exact: c.exact, sufficient_bound })
}

/// `p_{2t}(o, o)` for `t = 1..=n` in `Tree_m(G)`: `G` with `m - deg(v)` copies of the
/// `m`-regular tree hung at each vertex, so the graph is `m`-regular. Branches are
/// lumped by depth.
pub fn tree_m_returns(g: &SerreGraph, o: VertexId, m: usize, n: usize) -> Result<Vec<f64>, SpectralError> {
    if let Some(v) = (0..g.vertex_count()).find(|&v| g.degree(v) > m) {
        return Err(GraphError::DegreeTooLarge { vertex: v, degree: g.degree(v), bound: m }.into());
    }
    let nv = g.vertex_count();
    let depth = n + 1;
    let mf = m as f64;
    // state (v, t): t = 0 on G, t >= 1 inside a branch hanging at v
    let mut cur = vec![0.0f64; nv * (depth + 1)];
    cur[o * (depth + 1)] = 1.0;
    let mut out = Vec::with_capacity(n);
    for step in 1..=2 * n {
        let mut next = vec![0.0f64; nv * (depth + 1)];
        for v in 0..nv {
            let base = v * (depth + 1);
            let p0 = cur[base];
            if p0 != 0.0 {
                for &e in g.out_edges(v) {
                    next[g.dst(e) * (depth + 1)] += p0 / mf;
                }
                next[base + 1] += p0 * (m - g.degree(v)) as f64 / mf;
            }
            for t in 1..=depth {
                let p = cur[base + t];
                if p == 0.0 {
                    continue;
                }
                next[base + t - 1] += p / mf;
                if t < depth {
                    next[base + t + 1] += p * (mf - 1.0) / mf;
                }
            }
        }
        cur = next;
        if step % 2 == 0 {
            out.push(cur[o * (depth + 1)]);
        }
    }
    Ok(out)
}

/// The ball of radius `r` around `o` in `Tree_m(G)` as an explicit graph, root 0.
pub fn tree_m_ball(g: &SerreGraph, o: VertexId, m: usize, r: usize) -> Result<crate::graph::RootedGraph, SpectralError> {
    use crate::graph::GraphBuilder;
    if let Some(v) = (0..g.vertex_count()).find(|&v| g.degree(v) > m) {
        return Err(GraphError::DegreeTooLarge { vertex: v, degree: g.degree(v), bound: m }.into());
    }
    let dist = g.distances(o);
    let keep: Vec<VertexId> = {
        let mut k: Vec<VertexId> = (0..g.vertex_count()).filter(|&v| dist[v] <= r).collect();
        k.sort_by_key(|&v| (dist[v], v));
        k
    };
    let (ball, map) = g.induced(&keep);
    let mut b = GraphBuilder::from_graph(&ball);
    // tree branches: hang m - deg(v) subtrees at each kept vertex, truncated at radius r
    for (old, new) in map.iter().enumerate() {
        let Some(new) = *new else { continue };
        let budget = r - dist[old];
        if budget == 0 {
            continue;
        }
        for _ in 0..m - g.degree(old) {
            let mut frontier = vec![(new, b.add_vertex())];
            b.edge(frontier[0].0, frontier[0].1);
            for level in 1..budget {
                let _ = level;
                let mut next = Vec::new();
                for &(_, x) in &frontier {
                    for _ in 0..m - 1 {
                        let y = b.add_vertex();
                        b.edge(x, y);
                        next.push((x, y));
                    }
                }
                frontier = next;
            }
        }
    }
    Ok(crate::graph::RootedGraph::new(b.build(), 0)?)
}

/// `g(n) = (d + (d-2) n) / (d sqrt(d-1)^n)`.
pub fn spherical_profile(d: usize, n: usize) -> f64 {
    let df = d as f64;
    (df + (df - 2.0) * n as f64) / (df * (df - 1.0).sqrt().powi(n as i32))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RayleighBound {
    pub d: usize,
    pub radius: usize,
    pub value: f64,
    /// Largest violation of `(g(n-1) + (d-1) g(n+1))/d = (2 sqrt(d-1)/d) g(n)` for `n <= R`.
    pub identity_error: f64,
}

/// `<M f, f> / <f, f>` for `f = g(dist) 1(dist <= R)` on a ball of radius at least
/// `R + 1`; a lower bound on `rho` of the ambient infinite graph.
pub fn rayleigh_lower_bound(ball: &crate::graph::RootedGraph, d: usize, r: usize) -> Result<RayleighBound, SpectralError> {
    let g = &ball.graph;
    let dist = g.distances(ball.root);
    let have = dist.iter().filter(|&&x| x != usize::MAX).copied().max().unwrap_or(0);
    if have < r + 1 {
        return Err(SpectralError::BallTooSmall { have, need: r + 1 });
    }
    if let Some(v) = (0..g.vertex_count()).find(|&v| dist[v] <= r && g.degree(v) != d) {
        return Err(GraphError::NotRegular { vertex: v, degree: g.degree(v), expected: d }.into());
    }
    let f: Vec<f64> = dist.iter().map(|&x| if x <= r { spherical_profile(d, x) } else { 0.0 }).collect();
    let mut num = 0.0;
    let mut den = 0.0;
    for v in 0..g.vertex_count() {
        if f[v] == 0.0 {
            continue;
        }
        let mf: f64 = g.out_edges(v).iter().map(|&e| f[g.dst(e)]).sum::<f64>() / d as f64;
        num += f[v] * mf;
        den += f[v] * f[v];
    }
    let tr = tree_rho(d);
    let identity_error = (1..=r.max(1))
        .map(|n| ((spherical_profile(d, n - 1) + (d - 1) as f64 * spherical_profile(d, n + 1)) / d as f64 - tr * spherical_profile(d, n)).abs())
        .fold(0.0, f64::max);
    Ok(RayleighBound { d, radius: r, value: num / den, identity_error })
}

/// Average over vertices of `p_k(v, v)`, exact.
pub fn mean_return_probability(g: &SerreGraph, k: usize) -> Result<f64, SpectralError> {
    let n = g.vertex_count();
    let mut total = BigRational::zero();
    for v in 0..n {
        total += return_probabilities(g, v, k)?[k].clone();
    }
    Ok((total / BigRational::from_integer(n.into())).to_f64().unwrap_or(f64::NAN))
}
