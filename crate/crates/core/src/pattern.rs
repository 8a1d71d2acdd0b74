//! Rooted balls and their canonical forms.
//!
//! Two rooted patterns are isomorphic exactly when their [`Pattern::code`]s are
//! equal. The code is the lexicographically smallest edge listing over all
//! root-preserving relabelings, found by individualization and refinement with
//! automorphism pruning.

use std::collections::{BTreeMap, VecDeque};

use serde::Serialize;

use crate::graph::{Edge, RootedGraph, SerreGraph, VertexId};

/// A rooted ball together with its canonical encoding.
#[derive(Clone, Debug, Serialize)]
pub struct Pattern {
    /// The ball relabeled canonically; the root is vertex 0.
    #[serde(skip)]
    pub graph: SerreGraph,
    pub radius: usize,
    pub is_tree: bool,
    pub code: Vec<u32>,
}

impl PartialEq for Pattern {
    fn eq(&self, other: &Self) -> bool {
        self.code == other.code
    }
}
impl Eq for Pattern {}

impl std::hash::Hash for Pattern {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.code.hash(state)
    }
}

impl PartialOrd for Pattern {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Pattern {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.code.cmp(&other.code)
    }
}

/// Induced subgraph on the vertices within distance `r` of the root, canonicalized.
pub fn ball(rooted: &RootedGraph, r: usize) -> Pattern {
    let (g, root) = ball_subgraph(&rooted.graph, rooted.root, r);
    pattern_of(&g, root, r)
}

/// Induced ball without canonicalization; the root keeps its position as vertex 0.
pub fn ball_subgraph(g: &SerreGraph, root: VertexId, r: usize) -> (SerreGraph, VertexId) {
    let dist = g.distances(root);
    let mut keep: Vec<VertexId> = (0..g.vertex_count()).filter(|&v| dist[v] <= r).collect();
    keep.sort_by_key(|&v| (dist[v], v));
    let (sub, _) = g.induced(&keep);
    (sub, 0)
}

/// Canonicalizes an already-built rooted graph.
pub fn pattern_of(g: &SerreGraph, root: VertexId, radius: usize) -> Pattern {
    let labels = canonical_labeling(g, root);
    let code = encode(g, &labels);
    let mut edges: Vec<Edge> = Vec::with_capacity(g.edge_count());
    let mut order: Vec<usize> = (0..g.edge_count()).collect();
    order.sort_by_key(|&e| {
        let ed = g.edge(e);
        (labels[ed.src], labels[ed.dst], ed.inv == e, e)
    });
    let mut new_id = vec![0; g.edge_count()];
    for (i, &e) in order.iter().enumerate() {
        new_id[e] = i;
    }
    for &e in &order {
        let ed = g.edge(e);
        edges.push(Edge { src: labels[ed.src], dst: labels[ed.dst], inv: new_id[ed.inv] });
    }
    let relabeled = SerreGraph::from_edges(g.vertex_count(), edges).unwrap();
    Pattern { is_tree: relabeled.is_tree(), graph: relabeled, radius, code }
}

fn edge_kind(g: &SerreGraph, e: usize) -> u32 {
    if g.is_half_loop(e) {
        2
    } else if g.is_loop(e) {
        1
    } else {
        0
    }
}

fn encode(g: &SerreGraph, labels: &[usize]) -> Vec<u32> {
    let mut triples: Vec<(u32, u32, u32)> = (0..g.edge_count())
        .map(|e| {
            let ed = g.edge(e);
            (labels[ed.src] as u32, labels[ed.dst] as u32, edge_kind(g, e))
        })
        .collect();
    triples.sort_unstable();
    let mut code = Vec::with_capacity(2 + 3 * triples.len());
    code.push(g.vertex_count() as u32);
    code.push(triples.len() as u32);
    for (a, b, c) in triples {
        code.extend([a, b, c]);
    }
    code
}

/// Root-preserving canonical labeling: `labels[v]` is the new index of `v`.
pub fn canonical_labeling(g: &SerreGraph, root: VertexId) -> Vec<usize> {
    let n = g.vertex_count();
    if n == 0 {
        return Vec::new();
    }
    let dist = g.distances(root);
    let init: Vec<(usize, usize, usize)> = (0..n)
        .map(|v| {
            let half = g.out_edges(v).iter().filter(|&&e| g.is_half_loop(e)).count();
            let full = g.out_edges(v).iter().filter(|&&e| g.is_loop(e) && !g.is_half_loop(e)).count();
            (dist[v], half, full)
        })
        .collect();
    let colors = ranks(&init);
    let neighbors: Vec<Vec<VertexId>> = (0..n)
        .map(|v| g.out_edges(v).iter().filter(|&&e| !g.is_loop(e)).map(|&e| g.dst(e)).collect())
        .collect();
    let mut search = Search { g, neighbors, best: None, firsts: Vec::new(), path: Vec::new(), automorphisms: Vec::new() };
    search.run(colors);
    search.best.unwrap().labels
}

fn ranks<T: Ord + Clone>(keys: &[T]) -> Vec<usize> {
    let mut sorted: Vec<T> = keys.to_vec();
    sorted.sort();
    sorted.dedup();
    keys.iter().map(|k| sorted.binary_search(k).unwrap()).collect()
}

#[derive(Clone)]
struct Leaf {
    code: Vec<u32>,
    labels: Vec<usize>,
    path: Vec<VertexId>,
}

struct Search<'a> {
    g: &'a SerreGraph,
    neighbors: Vec<Vec<VertexId>>,
    best: Option<Leaf>,
    /// first leaf reached below the current node at each level
    firsts: Vec<Option<Leaf>>,
    path: Vec<VertexId>,
    automorphisms: Vec<Vec<usize>>,
}

impl Search<'_> {
    fn refine(&self, mut colors: Vec<usize>) -> Vec<usize> {
        let mut count = colors.iter().max().map_or(0, |m| m + 1);
        loop {
            let keys: Vec<(usize, Vec<usize>)> = (0..colors.len())
                .map(|v| {
                    let mut nb: Vec<usize> = self.neighbors[v].iter().map(|&u| colors[u]).collect();
                    nb.sort_unstable();
                    (colors[v], nb)
                })
                .collect();
            let next = ranks(&keys);
            let next_count = next.iter().max().map_or(0, |m| m + 1);
            colors = next;
            if next_count == count {
                return colors;
            }
            count = next_count;
        }
    }

    /// Returns the level to resume at when the rest of this subtree is known to be
    /// an automorphic image of something already explored.
    fn run(&mut self, colors: Vec<usize>) -> Option<usize> {
        let level = self.path.len();
        if self.firsts.len() <= level {
            self.firsts.resize(level + 1, None);
        }
        self.firsts[level] = None;
        let colors = self.refine(colors);
        let n = colors.len();
        let mut cells: BTreeMap<usize, Vec<VertexId>> = BTreeMap::new();
        for v in 0..n {
            cells.entry(colors[v]).or_default().push(v);
        }
        let Some((&target, members)) = cells.iter().find(|(_, m)| m.len() > 1) else {
            return self.leaf(colors);
        };
        let members = members.clone();
        let mut explored: Vec<VertexId> = Vec::new();
        for &v in &members {
            if !explored.is_empty() {
                let orbit = self.orbits_fixing(&self.path);
                if explored.iter().any(|&u| find(&orbit, u) == find(&orbit, v)) {
                    continue;
                }
            }
            // individualize v: it keeps the cell's color, the rest of the cell moves up
            let split: Vec<(usize, usize)> =
                (0..n).map(|u| (colors[u], usize::from(colors[u] == target && u != v))).collect();
            self.path.push(v);
            let jump = self.run(ranks(&split));
            self.path.pop();
            explored.push(v);
            if let Some(j) = jump {
                if j < level {
                    return Some(j);
                }
            }
        }
        None
    }

    fn leaf(&mut self, labels: Vec<usize>) -> Option<usize> {
        let code = encode(self.g, &labels);
        let level = self.path.len();
        let mut jump: Option<usize> = None;
        let candidates: Vec<Leaf> =
            self.firsts[..=level].iter().flatten().chain(self.best.iter()).cloned().collect();
        for other in candidates {
            if other.code != code {
                continue;
            }
            let common = other.path.iter().zip(&self.path).take_while(|(a, b)| a == b).count();
            if common >= level {
                continue;
            }
            let mut by_label = vec![0; labels.len()];
            for (u, &lu) in other.labels.iter().enumerate() {
                by_label[lu] = u;
            }
            let gamma: Vec<usize> = labels.iter().map(|&lv| by_label[lv]).collect();
            self.automorphisms.push(gamma);
            jump = Some(jump.map_or(common, |j: usize| j.min(common)));
        }
        let leaf = Leaf { code, labels, path: self.path.clone() };
        for slot in self.firsts[..=level].iter_mut() {
            if slot.is_none() {
                *slot = Some(leaf.clone());
            }
        }
        match &self.best {
            Some(b) if b.code <= leaf.code => {}
            _ => self.best = Some(leaf),
        }
        jump
    }

    fn orbits_fixing(&self, prefix: &[VertexId]) -> Vec<usize> {
        let n = self.g.vertex_count();
        let mut parent: Vec<usize> = (0..n).collect();
        for gamma in &self.automorphisms {
            if prefix.iter().all(|&p| gamma[p] == p) {
                for (v, &w) in gamma.iter().enumerate() {
                    let (a, b) = (find(&parent, v), find(&parent, w));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
        parent
    }
}

fn find(parent: &[usize], mut v: usize) -> usize {
    while parent[v] != v {
        v = parent[v];
    }
    v
}

/// Distances from `root` truncated at `r`, as a breadth-first layer list.
pub fn layers(g: &SerreGraph, root: VertexId, r: usize) -> Vec<Vec<VertexId>> {
    let mut dist = vec![usize::MAX; g.vertex_count()];
    let mut out = vec![vec![root]];
    dist[root] = 0;
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        if dist[v] == r {
            continue;
        }
        for &e in g.out_edges(v) {
            let u = g.dst(e);
            if dist[u] == usize::MAX {
                dist[u] = dist[v] + 1;
                if out.len() <= dist[u] {
                    out.push(Vec::new());
                }
                out[dist[u]].push(u);
                queue.push_back(u);
            }
        }
    }
    out
}
