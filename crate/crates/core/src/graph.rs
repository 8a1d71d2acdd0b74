//! Finite multigraphs with an explicit edge involution.
//!
//! Every undirected edge is stored as two directed edges that are each other's
//! inverse. A loop at `v` is either a *loop pair* (two directed edges `v -> v`
//! inverse to each other, contributing 2 to the degree) or a *half-loop* (one
//! directed edge that is its own inverse, contributing 1).

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::GraphError;

pub type VertexId = usize;
pub type EdgeId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub src: VertexId,
    pub dst: VertexId,
    pub inv: EdgeId,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SerreGraph {
    vertex_count: usize,
    edges: Vec<Edge>,
    #[serde(skip)]
    out: Vec<Vec<EdgeId>>,
    name: Option<String>,
}

/// Outcome of [`SerreGraph::validate`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub vertex_count: usize,
    pub directed_edges: usize,
    pub degrees: Vec<usize>,
    /// `Some(d)` when every vertex has degree `d`.
    pub regular: Option<usize>,
    pub half_loops: usize,
    pub loop_pairs: usize,
}

impl SerreGraph {
    /// Builds a graph from raw directed edges, checking the involution.
    pub fn from_edges(vertex_count: usize, edges: Vec<Edge>) -> Result<Self, GraphError> {
        check_involution(vertex_count, &edges)?;
        let mut out = vec![Vec::new(); vertex_count];
        for (id, e) in edges.iter().enumerate() {
            out[e.src].push(id);
        }
        Ok(SerreGraph { vertex_count, edges, out, name: None })
    }

    pub fn empty(vertex_count: usize) -> Self {
        SerreGraph { vertex_count, edges: Vec::new(), out: vec![Vec::new(); vertex_count], name: None }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// Number of directed edge ids (a half-loop is one id, a loop pair two).
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> Edge {
        self.edges[e]
    }

    pub fn src(&self, e: EdgeId) -> VertexId {
        self.edges[e].src
    }

    pub fn dst(&self, e: EdgeId) -> VertexId {
        self.edges[e].dst
    }

    pub fn inv(&self, e: EdgeId) -> EdgeId {
        self.edges[e].inv
    }

    pub fn is_half_loop(&self, e: EdgeId) -> bool {
        self.edges[e].inv == e
    }

    /// True for half-loops and for both members of a loop pair.
    pub fn is_loop(&self, e: EdgeId) -> bool {
        self.edges[e].src == self.edges[e].dst
    }

    /// Outgoing edge ids of `v`, in increasing id order.
    pub fn out_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.out[v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.out[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.out.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn regular_degree(&self) -> Option<usize> {
        let d = self.out.first()?.len();
        self.out.iter().all(|o| o.len() == d).then_some(d)
    }

    /// Degree if the graph is regular, otherwise [`GraphError::NotRegular`].
    pub fn require_regular(&self) -> Result<usize, GraphError> {
        self.regular_degree().ok_or_else(|| {
            let d0 = self.out.first().map_or(0, Vec::len);
            let v = self.out.iter().position(|o| o.len() != d0).unwrap_or(0);
            GraphError::NotRegular { vertex: v, degree: self.degree(v), expected: d0 }
        })
    }

    pub fn validate(&self) -> Result<ValidationReport, GraphError> {
        check_involution(self.vertex_count, &self.edges)?;
        let degrees: Vec<usize> = self.out.iter().map(Vec::len).collect();
        let half_loops = (0..self.edges.len()).filter(|&e| self.is_half_loop(e)).count();
        let loop_edges = (0..self.edges.len()).filter(|&e| self.is_loop(e) && !self.is_half_loop(e)).count();
        Ok(ValidationReport {
            vertex_count: self.vertex_count,
            directed_edges: self.edges.len(),
            regular: self.regular_degree(),
            degrees,
            half_loops,
            loop_pairs: loop_edges / 2,
        })
    }

    /// Number of directed edges from `x` to `y`.
    pub fn multiplicity(&self, x: VertexId, y: VertexId) -> usize {
        self.out[x].iter().filter(|&&e| self.edges[e].dst == y).count()
    }

    /// Breadth-first distances from `root`; `usize::MAX` marks unreachable vertices.
    pub fn distances(&self, root: VertexId) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.vertex_count];
        let mut queue = VecDeque::new();
        dist[root] = 0;
        queue.push_back(root);
        while let Some(v) = queue.pop_front() {
            for &e in &self.out[v] {
                let u = self.edges[e].dst;
                if dist[u] == usize::MAX {
                    dist[u] = dist[v] + 1;
                    queue.push_back(u);
                }
            }
        }
        dist
    }

    /// Component label for every vertex, labels numbered in order of first appearance.
    pub fn components(&self) -> Vec<usize> {
        let mut comp = vec![usize::MAX; self.vertex_count];
        let mut next = 0;
        for s in 0..self.vertex_count {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = next;
            let mut stack = vec![s];
            while let Some(v) = stack.pop() {
                for &e in &self.out[v] {
                    let u = self.edges[e].dst;
                    if comp[u] == usize::MAX {
                        comp[u] = next;
                        stack.push(u);
                    }
                }
            }
            next += 1;
        }
        comp
    }

    pub fn component_count(&self) -> usize {
        self.components().into_iter().max().map_or(0, |m| m + 1)
    }

    pub fn is_connected(&self) -> bool {
        self.component_count() <= 1
    }

    /// Two-coloring with every edge between colors, if one exists.
    pub fn bipartition(&self) -> Option<Vec<bool>> {
        let mut side: Vec<Option<bool>> = vec![None; self.vertex_count];
        for s in 0..self.vertex_count {
            if side[s].is_some() {
                continue;
            }
            side[s] = Some(false);
            let mut stack = vec![s];
            while let Some(v) = stack.pop() {
                let sv = side[v].unwrap();
                for &e in &self.out[v] {
                    let u = self.edges[e].dst;
                    match side[u] {
                        None => {
                            side[u] = Some(!sv);
                            stack.push(u);
                        }
                        Some(su) if su == sv => return None,
                        _ => {}
                    }
                }
            }
        }
        Some(side.into_iter().map(Option::unwrap).collect())
    }

    pub fn is_bipartite(&self) -> bool {
        self.bipartition().is_some()
    }

    /// Connected, loop-free, and with exactly `V - 1` undirected edges.
    pub fn is_tree(&self) -> bool {
        if self.vertex_count == 0 {
            return false;
        }
        if (0..self.edges.len()).any(|e| self.is_loop(e)) {
            return false;
        }
        self.edges.len() == 2 * (self.vertex_count - 1) && self.is_connected()
    }

    /// Subgraph induced on `keep` (in the given order), plus the old-to-new vertex map.
    pub fn induced(&self, keep: &[VertexId]) -> (SerreGraph, Vec<Option<VertexId>>) {
        let mut map = vec![None; self.vertex_count];
        for (i, &v) in keep.iter().enumerate() {
            map[v] = Some(i);
        }
        let mut new_id = vec![usize::MAX; self.edges.len()];
        let mut kept = Vec::new();
        for v in keep {
            for &e in &self.out[*v] {
                if map[self.edges[e].dst].is_some() {
                    new_id[e] = kept.len();
                    kept.push(e);
                }
            }
        }
        let edges = kept
            .iter()
            .map(|&e| {
                let ed = self.edges[e];
                Edge { src: map[ed.src].unwrap(), dst: map[ed.dst].unwrap(), inv: new_id[ed.inv] }
            })
            .collect();
        let g = SerreGraph::from_edges(keep.len(), edges).expect("induced subgraph keeps the involution");
        (g, map)
    }

    /// Disjoint union; vertices of `other` are shifted by `self.vertex_count()`.
    pub fn disjoint_union(&self, other: &SerreGraph) -> SerreGraph {
        let (nv, ne) = (self.vertex_count, self.edges.len());
        let mut edges = self.edges.clone();
        edges.extend(other.edges.iter().map(|e| Edge { src: e.src + nv, dst: e.dst + nv, inv: e.inv + ne }));
        SerreGraph::from_edges(nv + other.vertex_count, edges).unwrap()
    }

    /// Replaces every loop pair by two half-loops. The random walk is unchanged.
    pub fn split_loop_pairs(&self) -> SerreGraph {
        let edges = self
            .edges
            .iter()
            .enumerate()
            .map(|(id, e)| if e.src == e.dst { Edge { inv: id, ..*e } } else { *e })
            .collect();
        let mut g = SerreGraph::from_edges(self.vertex_count, edges).unwrap();
        g.name = self.name.clone();
        g
    }

    /// Adds `d - deg(v)` half-loops at every vertex.
    pub fn add_half_loops_to_regularize(&self, d: usize) -> Result<SerreGraph, GraphError> {
        if let Some(v) = (0..self.vertex_count).find(|&v| self.degree(v) > d) {
            return Err(GraphError::DegreeTooLarge { vertex: v, degree: self.degree(v), bound: d });
        }
        let mut b = GraphBuilder::from_graph(self);
        for v in 0..self.vertex_count {
            for _ in self.degree(v)..d {
                b.half_loop(v);
            }
        }
        let mut g = b.build();
        g.name = self.name.clone();
        Ok(g)
    }

    /// Rebuilds adjacency lists after deserialization.
    pub fn reindex(mut self) -> Result<Self, GraphError> {
        check_involution(self.vertex_count, &self.edges)?;
        let mut out = vec![Vec::new(); self.vertex_count];
        for (id, e) in self.edges.iter().enumerate() {
            out[e.src].push(id);
        }
        self.out = out;
        Ok(self)
    }
}

fn check_involution(vertex_count: usize, edges: &[Edge]) -> Result<(), GraphError> {
    for (id, e) in edges.iter().enumerate() {
        if e.src >= vertex_count || e.dst >= vertex_count {
            return Err(GraphError::VertexOutOfRange { edge: id, vertex_count });
        }
        let Some(r) = edges.get(e.inv) else {
            return Err(GraphError::Involution { edge: id, reason: "inverse id out of range" });
        };
        if r.inv != id {
            return Err(GraphError::Involution { edge: id, reason: "inverse of inverse is a different edge" });
        }
        if r.src != e.dst || r.dst != e.src {
            return Err(GraphError::Involution { edge: id, reason: "inverse does not reverse the endpoints" });
        }
    }
    Ok(())
}

/// Incremental construction of a [`SerreGraph`].
#[derive(Clone, Debug, Default)]
pub struct GraphBuilder {
    vertex_count: usize,
    edges: Vec<Edge>,
}

impl GraphBuilder {
    pub fn new(vertex_count: usize) -> Self {
        GraphBuilder { vertex_count, edges: Vec::new() }
    }

    pub fn from_graph(g: &SerreGraph) -> Self {
        GraphBuilder { vertex_count: g.vertex_count, edges: g.edges.clone() }
    }

    pub fn add_vertex(&mut self) -> VertexId {
        self.vertex_count += 1;
        self.vertex_count - 1
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// Adds an undirected edge; `u == v` gives a loop pair. Returns the id of `u -> v`.
    pub fn edge(&mut self, u: VertexId, v: VertexId) -> EdgeId {
        let a = self.edges.len();
        self.edges.push(Edge { src: u, dst: v, inv: a + 1 });
        self.edges.push(Edge { src: v, dst: u, inv: a });
        a
    }

    pub fn loop_pair(&mut self, v: VertexId) -> EdgeId {
        self.edge(v, v)
    }

    pub fn half_loop(&mut self, v: VertexId) -> EdgeId {
        let a = self.edges.len();
        self.edges.push(Edge { src: v, dst: v, inv: a });
        a
    }

    pub fn build(self) -> SerreGraph {
        SerreGraph::from_edges(self.vertex_count, self.edges).expect("builder maintains the involution")
    }
}

/// A graph with a distinguished vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootedGraph {
    pub graph: SerreGraph,
    pub root: VertexId,
}

impl RootedGraph {
    pub fn new(graph: SerreGraph, root: VertexId) -> Result<Self, GraphError> {
        if root >= graph.vertex_count() {
            return Err(GraphError::BadVertex { vertex: root, vertex_count: graph.vertex_count() });
        }
        Ok(RootedGraph { graph, root })
    }
}

/// A walk as a sequence of directed edges starting at `start`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Walk {
    pub start: VertexId,
    pub edges: Vec<EdgeId>,
}

impl Walk {
    pub fn new(g: &SerreGraph, start: VertexId, edges: Vec<EdgeId>) -> Result<Self, GraphError> {
        let mut at = start;
        for (i, &e) in edges.iter().enumerate() {
            if e >= g.edge_count() || g.src(e) != at {
                return Err(GraphError::NotAWalk { position: i });
            }
            at = g.dst(e);
        }
        Ok(Walk { start, edges })
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Vertex sequence `w(0), ..., w(n)`.
    pub fn vertices(&self, g: &SerreGraph) -> Vec<VertexId> {
        let mut v = Vec::with_capacity(self.edges.len() + 1);
        v.push(self.start);
        v.extend(self.edges.iter().map(|&e| g.dst(e)));
        v
    }

    pub fn end(&self, g: &SerreGraph) -> VertexId {
        self.edges.last().map_or(self.start, |&e| g.dst(e))
    }

    pub fn is_closed(&self, g: &SerreGraph) -> bool {
        self.end(g) == self.start
    }
}

impl fmt::Display for SerreGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::sgf::write_sgf(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families;

    #[test]
    fn k4_is_three_regular() {
        let r = families::complete(4).validate().unwrap();
        assert_eq!(r.directed_edges, 12);
        assert_eq!(r.regular, Some(3));
    }

    #[test]
    fn half_loop_and_loop_pair_give_degree_three() {
        let mut b = GraphBuilder::new(1);
        b.half_loop(0);
        b.loop_pair(0);
        let r = b.build().validate().unwrap();
        assert_eq!(r.regular, Some(3));
        assert_eq!((r.half_loops, r.loop_pairs), (1, 1));
    }

    #[test]
    fn wrong_inverse_source_is_reported_at_its_id() {
        let edges = vec![
            Edge { src: 0, dst: 1, inv: 1 },
            Edge { src: 1, dst: 0, inv: 0 },
            Edge { src: 1, dst: 2, inv: 3 },
            Edge { src: 0, dst: 1, inv: 2 },
        ];
        match SerreGraph::from_edges(3, edges) {
            Err(GraphError::Involution { edge, .. }) => assert_eq!(edge, 2),
            other => panic!("expected involution error, got {other:?}"),
        }
    }

    #[test]
    fn regularizing_a_path_adds_two_half_loops_each() {
        let g = families::path(2).add_half_loops_to_regularize(3).unwrap();
        assert_eq!(g.regular_degree(), Some(3));
        assert_eq!(g.validate().unwrap().half_loops, 4);
        assert_eq!(families::complete(4).add_half_loops_to_regularize(3).unwrap(), families::complete(4));
        let iso = SerreGraph::empty(1).add_half_loops_to_regularize(4).unwrap();
        assert_eq!(iso.validate().unwrap().half_loops, 4);
        assert!(families::complete(4).add_half_loops_to_regularize(2).is_err());
    }

    #[test]
    fn bipartite_detection() {
        assert!(families::cycle(6).is_bipartite());
        assert!(!families::cycle(5).is_bipartite());
        assert!(!families::petersen().is_bipartite());
    }

    #[test]
    fn tree_detection() {
        assert!(families::tree_ball(3, 3).graph.is_tree());
        assert!(!families::complete(4).is_tree());
        assert!(!families::rose(1).is_tree());
    }

    #[test]
    fn walk_rejects_non_incident_steps() {
        let g = families::cycle(4);
        let e0 = g.out_edges(0)[0];
        let far = g.out_edges(2)[0];
        assert!(Walk::new(&g, 0, vec![e0, far]).is_err());
    }

    #[test]
    fn split_loop_pairs_preserves_degrees() {
        let g = families::rose(2).split_loop_pairs();
        assert_eq!(g.regular_degree(), Some(4));
        assert_eq!(g.validate().unwrap().half_loops, 4);
    }
}
