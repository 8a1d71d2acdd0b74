//! Uniform nullcycles, cycle triviality, and the statistics built on them.
//!
//! A nullcycle of length `n` at `o` is a closed walk that reduces to the empty word
//! when backtracks are erased. Lifting to the universal cover turns it into a
//! bridge of the tree `T_d`, so the sampler only tracks the lifted distance and
//! the edge that would undo the last unmatched step.

use std::collections::HashMap;

use num_bigint::{BigUint, RandBigInt};
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use serde::Serialize;

use crate::error::{GraphError, WalkError};
use crate::fungroup::reduce_edges;
use crate::graph::{EdgeId, SerreGraph, VertexId, Walk};
use crate::report::{hyp, BoundReport};
use crate::treewalk::{ratio, rational_to_f64, TreeWalkTables};

/// Verdict of [`classify_cycle`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CycleClassification {
    pub nontrivial: bool,
    /// A non-loop directed edge traversed more often than its reverse, or the loop
    /// itself for a cycle of length one.
    pub witness: Option<EdgeId>,
}

/// Classifies a closed walk.
///
/// Length one: the single step is a loop and the cycle is nontrivial. Length at
/// least two: trivial iff every non-loop directed edge is traversed as often as its
/// reverse; loops of either kind are ignored.
pub fn classify_cycle(g: &SerreGraph, walk: &Walk) -> Result<CycleClassification, GraphError> {
    if !walk.is_closed(g) {
        return Err(GraphError::OpenWalk);
    }
    if walk.len() == 1 {
        return Ok(CycleClassification { nontrivial: true, witness: Some(walk.edges[0]) });
    }
    let mut net: HashMap<EdgeId, i64> = HashMap::new();
    for &e in &walk.edges {
        if g.is_loop(e) {
            continue;
        }
        let (key, s) = pair_key(g, e);
        *net.entry(key).or_insert(0) += s;
    }
    let mut unbalanced: Vec<(EdgeId, i64)> = net.into_iter().filter(|&(_, v)| v != 0).collect();
    unbalanced.sort();
    let witness = unbalanced.first().map(|&(key, v)| if v > 0 { key } else { g.inv(key) });
    Ok(CycleClassification { nontrivial: witness.is_some(), witness })
}

/// Canonical member of `{e, inv(e)}` and the sign of `e` relative to it.
pub(crate) fn pair_key(g: &SerreGraph, e: EdgeId) -> (EdgeId, i64) {
    let r = g.inv(e);
    if e <= r {
        (e, 1)
    } else {
        (r, -1)
    }
}

/// Exact uniform sampler of nullcycles of a fixed even length at a fixed root.
pub struct NullcycleSampler<'a> {
    graph: &'a SerreGraph,
    root: VertexId,
    n: usize,
    tables: &'a TreeWalkTables,
}

/// Sampler state: current vertex and the unreduced part of the walk so far.
#[derive(Clone, Debug, Default)]
pub struct LiftState {
    pub vertex: VertexId,
    pub stack: Vec<EdgeId>,
    pub steps: usize,
}

impl<'a> NullcycleSampler<'a> {
    pub fn new(graph: &'a SerreGraph, root: VertexId, n: usize, tables: &'a TreeWalkTables) -> Result<Self, WalkError> {
        if n % 2 == 1 {
            return Err(WalkError::OddLength(n));
        }
        let d = graph.require_regular()?;
        if d != tables.d() {
            return Err(WalkError::Domain(format!("tables are for degree {}, graph has degree {d}", tables.d())));
        }
        if n > tables.nmax() {
            return Err(WalkError::TableTooShort { n, nmax: tables.nmax() });
        }
        if root >= graph.vertex_count() {
            return Err(GraphError::BadVertex { vertex: root, vertex_count: graph.vertex_count() }.into());
        }
        Ok(NullcycleSampler { graph, root, n, tables })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn start(&self) -> LiftState {
        LiftState { vertex: self.root, stack: Vec::new(), steps: 0 }
    }

    /// Integer weights of each outgoing edge from `state`; they sum to the number of
    /// ways to finish the nullcycle from here.
    pub fn step_weights(&self, state: &LiftState) -> Vec<(EdgeId, BigUint)> {
        let rem = self.n - state.steps;
        let k = state.stack.len();
        let back = state.stack.last().map(|&e| self.graph.inv(e));
        self.graph
            .out_edges(state.vertex)
            .iter()
            .map(|&e| {
                let w = if Some(e) == back {
                    self.tables.to_vertex(rem - 1, k - 1)
                } else {
                    self.tables.to_vertex(rem - 1, k + 1)
                };
                (e, w)
            })
            .collect()
    }

    pub fn advance(&self, state: &mut LiftState, e: EdgeId) {
        if state.stack.last().map(|&t| self.graph.inv(t)) == Some(e) {
            state.stack.pop();
        } else {
            state.stack.push(e);
        }
        state.vertex = self.graph.dst(e);
        state.steps += 1;
    }

    /// Exact probability that the sampler produces `walk`.
    pub fn walk_probability(&self, walk: &Walk) -> BigRational {
        if walk.start != self.root || walk.len() != self.n {
            return BigRational::zero();
        }
        let mut state = self.start();
        let mut p = BigRational::one();
        for &e in &walk.edges {
            let weights = self.step_weights(&state);
            let total: BigUint = weights.iter().map(|(_, w)| w).sum();
            if total.is_zero() {
                return BigRational::zero();
            }
            let w: BigUint = weights.iter().filter(|(x, _)| *x == e).map(|(_, w)| w).sum();
            p *= ratio(&w, &total);
            if p.is_zero() {
                return p;
            }
            self.advance(&mut state, e);
        }
        p
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Walk {
        let mut state = self.start();
        let mut edges = Vec::with_capacity(self.n);
        for _ in 0..self.n {
            let weights = self.step_weights(&state);
            let total: BigUint = weights.iter().map(|(_, w)| w).sum();
            let mut x = rng.gen_biguint_below(&total);
            let mut chosen = weights[0].0;
            for (e, w) in &weights {
                if x < *w {
                    chosen = *e;
                    break;
                }
                x -= w;
            }
            self.advance(&mut state, chosen);
            edges.push(chosen);
        }
        debug_assert!(state.stack.is_empty());
        Walk { start: self.root, edges }
    }
}

/// All nullcycles of length `n` at `root`, by exhaustive search over walks.
pub fn enumerate_nullcycles(g: &SerreGraph, root: VertexId, n: usize) -> Vec<Walk> {
    let mut out = Vec::new();
    let mut path = Vec::with_capacity(n);
    fn go(g: &SerreGraph, v: VertexId, root: VertexId, n: usize, path: &mut Vec<EdgeId>, out: &mut Vec<Walk>) {
        if path.len() == n {
            if v == root && reduce_edges(g, path).is_empty() {
                out.push(Walk { start: root, edges: path.clone() });
            }
            return;
        }
        for &e in g.out_edges(v) {
            path.push(e);
            go(g, g.dst(e), root, n, path, out);
            path.pop();
        }
    }
    go(g, root, root, n, &mut path, &mut out);
    out
}

/// Number of times each time index `0..=n` of the walk sits at `v`.
pub fn visit_count(g: &SerreGraph, walk: &Walk, v: VertexId) -> usize {
    walk.vertices(g).into_iter().filter(|&u| u == v).count()
}

/// `chi_w`: segments `[jk, jk + k]` that are nontrivial closed `k`-walks starting at a
/// vertex the whole walk visits at most `ell` times (all time indices `0..=|w|`,
/// including `jk` itself).
pub fn chi_statistic(g: &SerreGraph, walk: &Walk, k: usize, ell: usize) -> Result<usize, WalkError> {
    if k == 0 || walk.len() % k != 0 {
        return Err(WalkError::Domain(format!("walk length {} is not a multiple of {k}", walk.len())));
    }
    let verts = walk.vertices(g);
    let mut visits: HashMap<VertexId, usize> = HashMap::new();
    for &v in &verts {
        *visits.entry(v).or_insert(0) += 1;
    }
    let mut chi = 0;
    for j in 0..walk.len() / k {
        let a = j * k;
        if verts[a] != verts[a + k] || visits[&verts[a]] > ell {
            continue;
        }
        let seg = Walk { start: verts[a], edges: walk.edges[a..a + k].to_vec() };
        if classify_cycle(g, &seg)?.nontrivial {
            chi += 1;
        }
    }
    Ok(chi)
}

/// Counts of non-backtracking walks of length `k` from `root` ending at each vertex,
/// for `k = 0..=kmax`. A half-loop cannot be repeated immediately.
pub fn nonbacktracking_endpoint_counts(g: &SerreGraph, root: VertexId, kmax: usize) -> Vec<Vec<BigUint>> {
    let nv = g.vertex_count();
    let mut out = Vec::with_capacity(kmax + 1);
    let mut at0 = vec![BigUint::zero(); nv];
    at0[root] = BigUint::one();
    out.push(at0);
    if kmax == 0 {
        return out;
    }
    let mut edge_counts: Vec<BigUint> = vec![BigUint::zero(); g.edge_count()];
    for &e in g.out_edges(root) {
        edge_counts[e] += 1u32;
    }
    for k in 1..=kmax {
        if k > 1 {
            let mut next = vec![BigUint::zero(); g.edge_count()];
            for (e, c) in edge_counts.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let back = g.inv(e);
                for &f in g.out_edges(g.dst(e)) {
                    if f != back {
                        next[f] += c;
                    }
                }
            }
            edge_counts = next;
        }
        let mut at = vec![BigUint::zero(); nv];
        for (e, c) in edge_counts.iter().enumerate() {
            if !c.is_zero() {
                at[g.dst(e)] += c;
            }
        }
        out.push(at);
    }
    out
}

/// Exact expected number of time indices `0..=n` at which a uniform nullcycle of
/// length `n` from `root` is in `set`.
pub fn expected_visits(g: &SerreGraph, root: VertexId, set: &[VertexId], n: usize, tables: &TreeWalkTables) -> Result<BigRational, WalkError> {
    if n % 2 == 1 {
        return Err(WalkError::OddLength(n));
    }
    let d = g.require_regular()?;
    if d != tables.d() || n > tables.nmax() {
        return Err(WalkError::Domain("tables do not match the graph degree or length".into()));
    }
    let mut in_set = vec![false; g.vertex_count()];
    for &v in set {
        in_set[v] = true;
    }
    let kmax = n / 2;
    let nb = nonbacktracking_endpoint_counts(g, root, kmax);
    let mut total = BigRational::zero();
    for (k, at) in nb.iter().enumerate() {
        let hits: BigUint = at.iter().enumerate().filter(|(v, _)| in_set[*v]).map(|(_, c)| c).sum();
        if hits.is_zero() {
            continue;
        }
        let time_at_k: BigUint = (0..=n).map(|j| tables.count(j, k) * tables.to_vertex(n - j, k)).sum();
        let sphere = crate::treewalk::sphere_size(d, k);
        total += ratio(&(time_at_k * hits), &(tables.returns(n) * sphere));
    }
    Ok(total)
}

/// Checks the expected-visits bounds given the graph's spectral radius `rho`.
///
/// Finite bound: `E V_A <= 4e4 |A| (1/(1-rho)^2 + 72 n^2/|G|)` under `n^2 <= |G|`.
/// Strong bound: `E V_A <= 2e7 |A|` when moreover `rho <= 19/20`.
pub fn expected_visits_reports(value: &BigRational, set_size: usize, n: usize, graph_size: usize, rho: f64) -> Vec<BoundReport> {
    let v = rational_to_f64(value);
    let a = set_size as f64;
    let small_n = (n as u128) * (n as u128) <= graph_size as u128;
    let finite_rhs = 4e4 * a * (1.0 / ((1.0 - rho) * (1.0 - rho)) + 72.0 * (n * n) as f64 / graph_size as f64);
    let finite = BoundReport::new(
        "nullcycle visits, finite graph",
        vec![hyp("n^2 <= |G|", small_n), hyp("rho < 1", rho < 1.0)],
        finite_rhs,
        v,
        0.0,
    )
    .constant("4e4", "40000")
    .constant("72", "72");
    let strong = BoundReport::new(
        "nullcycle visits, spectral gap",
        vec![hyp("n^2 <= |G|", small_n), hyp("rho <= 19/20", rho <= 0.95)],
        2e7 * a,
        v,
        0.0,
    )
    .constant("2e7", "20000000");
    vec![finite, strong]
}

/// Result of [`parity_probability`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParityProbability {
    #[serde(serialize_with = "ser_rational")]
    pub value: BigRational,
    pub odd_entries: usize,
    /// `value <= C(n/2+k-1,k-1)/C(n+k-1,k-1)`, exact.
    pub below_even_pattern: bool,
    /// `C(n/2+k-1,k-1)/C(n+k-1,k-1) <= exp(-1/(4/k+2/n))`.
    pub exp_bound_holds: bool,
    pub exp_bound: f64,
    /// `value <= 1/2`, exact.
    pub half_bound_holds: bool,
    pub note: Option<String>,
}

fn ser_rational<S: serde::Serializer>(q: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

/// `P(X = x mod 2)` for `X` uniform on `k`-tuples of nonnegative integers with sum `n`.
pub fn parity_probability(n: usize, x: &[u8]) -> Result<ParityProbability, WalkError> {
    let k = x.len();
    if n % 2 == 1 || n < 2 {
        return Err(WalkError::OddLength(n));
    }
    if k < 2 {
        return Err(WalkError::Domain("need at least two coordinates".into()));
    }
    let j = x.iter().filter(|&&b| b % 2 == 1).count();
    let all = binomial(BigUint::from(n + k - 1), BigUint::from(k - 1));
    let even = binomial(BigUint::from(n / 2 + k - 1), BigUint::from(k - 1));
    let even_ratio = ratio(&even, &all);
    let (value, note) = if j % 2 != n % 2 || j > n {
        (BigRational::zero(), Some("parity pattern cannot sum to n".to_string()))
    } else {
        let c = binomial(BigUint::from((n - j) / 2 + k - 1), BigUint::from(k - 1));
        (ratio(&c, &all), None)
    };
    let exp_bound = (-1.0 / (4.0 / k as f64 + 2.0 / n as f64)).exp();
    let er = rational_to_f64(&even_ratio);
    Ok(ParityProbability {
        below_even_pattern: value <= even_ratio,
        exp_bound_holds: er <= exp_bound * (1.0 + 1e-12),
        exp_bound,
        half_bound_holds: value <= BigRational::new(1.into(), 2.into()),
        value,
        odd_entries: j,
        note,
    })
}

/// Exact `P(each part has even sum)` by a convolution over parts.
pub fn parity_partition_exact(n: usize, parts: &[usize]) -> BigRational {
    let k: usize = parts.iter().sum();
    // ways[s] = tuples of the parts so far with total s and every part sum even
    let mut ways = vec![BigUint::zero(); n + 1];
    ways[0] = BigUint::one();
    for &size in parts {
        let mut next = vec![BigUint::zero(); n + 1];
        for (s, w) in ways.iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            for t in (0..=n - s).step_by(2) {
                next[s + t] += w * binomial(BigUint::from(t + size - 1), BigUint::from(size - 1));
            }
        }
        ways = next;
    }
    ratio(&ways[n], &binomial(BigUint::from(n + k - 1), BigUint::from(k - 1)))
}

/// Uniform `k`-tuple of nonnegative integers with sum `n` (stars and bars).
pub fn sample_composition<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Vec<usize> {
    let slots = n + k - 1;
    let bars = rand::seq::index::sample(rng, slots, k - 1).into_vec();
    let mut bars = bars;
    bars.sort_unstable();
    let mut out = Vec::with_capacity(k);
    let mut prev: isize = -1;
    for &b in &bars {
        out.push((b as isize - prev - 1) as usize);
        prev = b as isize;
    }
    out.push((slots as isize - prev - 1) as usize);
    out
}

/// Monte Carlo estimate of `P(each part has even sum)`: `(estimate, standard error)`.
pub fn parity_partition_monte_carlo<R: Rng + ?Sized>(n: usize, parts: &[usize], samples: usize, rng: &mut R) -> (f64, f64) {
    let k: usize = parts.iter().sum();
    let mut hits = 0usize;
    for _ in 0..samples {
        let x = sample_composition(n, k, rng);
        let mut i = 0;
        let mut ok = true;
        for &size in parts {
            let s: usize = x[i..i + size].iter().sum();
            i += size;
            if s % 2 == 1 {
                ok = false;
                break;
            }
        }
        hits += usize::from(ok);
    }
    let p = hits as f64 / samples as f64;
    (p, (p * (1.0 - p) / samples as f64).sqrt())
}

/// `14 exp(-(m ^ n/ell)/14)`.
pub fn parity_partition_bound(n: usize, m: usize, ell: usize) -> f64 {
    let x = (m as f64).min(n as f64 / ell as f64);
    14.0 * (-x / 14.0).exp()
}

/// Probability, or estimate with standard error, of even part sums.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PartitionParity {
    pub estimate: f64,
    pub std_error: f64,
    pub exact: Option<String>,
    pub bound: f64,
    /// `estimate - 3 std_error <= bound`.
    pub within_bound: bool,
}

/// Exact when the tuple space has at most `1e7` elements, sampled otherwise.
pub fn parity_partition_probability<R: Rng + ?Sized>(n: usize, parts: &[usize], ell: usize, samples: usize, rng: &mut R) -> Result<PartitionParity, WalkError> {
    if parts.iter().any(|&p| p == 0) {
        return Err(WalkError::Domain("parts must be nonempty".into()));
    }
    let k: usize = parts.iter().sum();
    let m = parts.len();
    if k > m * ell {
        return Err(WalkError::Domain(format!("k = {k} exceeds m*ell = {}", m * ell)));
    }
    let bound = parity_partition_bound(n, m, ell);
    let space = binomial(BigUint::from(n + k - 1), BigUint::from(k - 1));
    if space <= BigUint::from(10_000_000u32) {
        let q = parity_partition_exact(n, parts);
        let p = rational_to_f64(&q);
        return Ok(PartitionParity { estimate: p, std_error: 0.0, exact: Some(q.to_string()), bound, within_bound: p <= bound });
    }
    let (p, se) = parity_partition_monte_carlo(n, parts, samples, rng);
    Ok(PartitionParity { estimate: p, std_error: se, exact: None, bound, within_bound: p - 3.0 * se <= bound })
}

/// Number of walks for `n` steps in a `d`-regular graph; used for budget checks.
pub fn walk_space(d: usize, n: usize) -> f64 {
    (d as f64).powi(n as i32)
}

pub fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or_else(|| rational_to_f64(q))
}
