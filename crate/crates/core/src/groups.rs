//! Finite groups as right-multiplication tables, their Cayley graphs, and Schreier
//! graphs on the right cosets of a cyclic subgroup.

use std::collections::{HashMap, VecDeque};
use std::hash::Hash;

use crate::error::GraphError;
use crate::graph::{Edge, SerreGraph};

/// Elements are `0..order` with `0` the identity; `right[i][x]` is `x * s_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermGroup {
    pub name: String,
    pub right: Vec<Vec<usize>>,
    /// `inverse[i]` is the generator index of `s_i^{-1}`.
    pub inverse: Vec<usize>,
}

impl PermGroup {
    /// Validates generator tables: each is a permutation, the set is closed under
    /// inversion, and the generators reach every element from the identity.
    pub fn new(name: impl Into<String>, right: Vec<Vec<usize>>) -> Result<Self, GraphError> {
        let order = right.first().map_or(1, |r| r.len());
        for (i, r) in right.iter().enumerate() {
            let mut seen = vec![false; order];
            if r.len() != order || r.iter().any(|&x| x >= order || std::mem::replace(&mut seen[x], true)) {
                return Err(GraphError::Group(format!("generator {i} is not a permutation of 0..{order}")));
            }
        }
        let mut inverse = Vec::with_capacity(right.len());
        for (i, r) in right.iter().enumerate() {
            let j = (0..right.len()).find(|&j| (0..order).all(|x| right[j][r[x]] == x));
            match j {
                Some(j) => inverse.push(j),
                None => return Err(GraphError::Group(format!("inverse of generator {i} is not a generator"))),
            }
        }
        let g = PermGroup { name: name.into(), right, inverse };
        if g.words().iter().any(|w| w.is_none()) {
            return Err(GraphError::Group("generators do not generate the group".into()));
        }
        Ok(g)
    }

    /// Builds the tables from any concrete representation by closing under right
    /// multiplication by the generators.
    pub fn generate<T: Eq + Hash + Clone>(name: impl Into<String>, identity: T, gens: &[T], mul: impl Fn(&T, &T) -> T) -> Result<Self, GraphError> {
        let mut index: HashMap<T, usize> = HashMap::from([(identity.clone(), 0)]);
        let mut elems = vec![identity];
        let mut i = 0;
        while i < elems.len() {
            for s in gens {
                let y = mul(&elems[i], s);
                if !index.contains_key(&y) {
                    index.insert(y.clone(), elems.len());
                    elems.push(y);
                }
            }
            i += 1;
        }
        let right = gens.iter().map(|s| elems.iter().map(|x| index[&mul(x, s)]).collect()).collect();
        Self::new(name, right)
    }

    pub fn order(&self) -> usize {
        self.right.first().map_or(1, |r| r.len())
    }

    pub fn generator_count(&self) -> usize {
        self.right.len()
    }

    /// A generator word for each element (BFS order), `None` if unreachable.
    pub fn words(&self) -> Vec<Option<Vec<usize>>> {
        let mut words: Vec<Option<Vec<usize>>> = vec![None; self.order()];
        words[0] = Some(Vec::new());
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for (i, r) in self.right.iter().enumerate() {
                let y = r[x];
                if words[y].is_none() {
                    let mut w = words[x].clone().unwrap();
                    w.push(i);
                    words[y] = Some(w);
                    queue.push_back(y);
                }
            }
        }
        words
    }

    /// `a * b`, by applying a word for `b` to `a`.
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.words()[b].as_ref().unwrap().iter().fold(a, |x, &i| self.right[i][x])
    }

    /// The cyclic subgroup generated by generator `i`.
    pub fn cyclic_subgroup(&self, i: usize) -> Vec<usize> {
        let mut out = vec![0];
        let mut x = self.right[i][0];
        while x != 0 {
            out.push(x);
            x = self.right[i][x];
        }
        out
    }
}

/// Cayley graph: vertex `x`, edge `(x, i)` to `x s_i` with inverse `(x s_i, inv(i))`.
pub fn cayley_graph(g: &PermGroup) -> SerreGraph {
    let k = g.generator_count();
    let n = g.order();
    let id = |x: usize, i: usize| x * k + i;
    let edges = (0..n)
        .flat_map(|x| (0..k).map(move |i| (x, i)))
        .map(|(x, i)| {
            let y = g.right[i][x];
            Edge { src: x, dst: y, inv: id(y, g.inverse[i]) }
        })
        .collect();
    SerreGraph::from_edges(n, edges).expect("Cayley graph is a valid Serre graph").with_name(format!("Cay({})", g.name))
}

/// The Schreier graph on the right cosets `<s> x` together with the coset of each
/// element, which is the covering map from the Cayley graph.
#[derive(Clone, Debug)]
pub struct SchreierQuotient {
    pub graph: SerreGraph,
    pub coset_of: Vec<usize>,
    pub subgroup: Vec<usize>,
}

pub fn schreier_quotient(g: &PermGroup, s: usize) -> Result<SchreierQuotient, GraphError> {
    if s >= g.generator_count() {
        return Err(GraphError::Group(format!("no generator {s}")));
    }
    let n = g.order();
    let k = g.generator_count();
    let subgroup = g.cyclic_subgroup(s);
    let words = g.words();
    let mut coset_of = vec![usize::MAX; n];
    let mut cosets = 0;
    for x in 0..n {
        if coset_of[x] != usize::MAX {
            continue;
        }
        // left multiplication h * x via a word for x
        for &h in &subgroup {
            let y = words[x].as_ref().unwrap().iter().fold(h, |acc, &i| g.right[i][acc]);
            coset_of[y] = cosets;
        }
        cosets += 1;
    }
    let rep: Vec<usize> = (0..cosets).map(|c| coset_of.iter().position(|&x| x == c).unwrap()).collect();
    let id = |c: usize, i: usize| c * k + i;
    let mut edges = Vec::with_capacity(cosets * k);
    for (c, &x) in rep.iter().enumerate() {
        for i in 0..k {
            let d = coset_of[g.right[i][x]];
            edges.push(Edge { src: c, dst: d, inv: id(d, g.inverse[i]) });
        }
    }
    let graph = SerreGraph::from_edges(cosets, edges)?.with_name(format!("Sch({}, <s{s}>)", g.name));
    let q = SchreierQuotient { graph, coset_of, subgroup };
    verify_covering(g, &q)?;
    Ok(q)
}

/// Checks that `x -> <s> x`, `(x, i) -> (<s> x, i)` is a graph covering: it commutes
/// with endpoints and inverses and is bijective on the edges at every vertex.
pub fn verify_covering(g: &PermGroup, q: &SchreierQuotient) -> Result<(), GraphError> {
    let cay = cayley_graph(g);
    let k = g.generator_count();
    for x in 0..g.order() {
        let c = q.coset_of[x];
        let mut hit = vec![false; q.graph.degree(c)];
        for &e in cay.out_edges(x) {
            let i = e % k;
            let image = c * k + i;
            let ok = q.graph.src(image) == c
                && q.graph.dst(image) == q.coset_of[cay.dst(e)]
                && q.graph.inv(image) == q.coset_of[cay.dst(e)] * k + cay.inv(e) % k;
            let local = q.graph.out_edges(c).iter().position(|&f| f == image);
            match local {
                Some(p) if ok && !hit[p] => hit[p] = true,
                _ => return Err(GraphError::Covering { vertex: x }),
            }
        }
        if hit.iter().any(|h| !h) {
            return Err(GraphError::Covering { vertex: x });
        }
    }
    Ok(())
}

pub fn cyclic(n: usize) -> PermGroup {
    let gens = if n == 2 { vec![1] } else { vec![1, n - 1] };
    PermGroup::generate(format!("Z{n}"), 0usize, &gens, |a, b| (a + b) % n).expect("cyclic group")
}

/// `Z2 x Z2` with its three involutions.
pub fn klein_four() -> PermGroup {
    PermGroup::generate("Z2xZ2", (0u8, 0u8), &[(1, 0), (0, 1), (1, 1)], |a, b| (a.0 ^ b.0, a.1 ^ b.1)).expect("Klein group")
}

/// Composition `(a * b)(x) = b(a(x))`, so right multiplication acts on the right.
fn compose(a: &Vec<u8>, b: &Vec<u8>) -> Vec<u8> {
    a.iter().map(|&x| b[x as usize]).collect()
}

/// `S_n` generated by all transpositions.
pub fn symmetric_transpositions(n: usize) -> PermGroup {
    let id: Vec<u8> = (0..n as u8).collect();
    let mut gens = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let mut t = id.clone();
            t.swap(i, j);
            gens.push(t);
        }
    }
    PermGroup::generate(format!("S{n}"), id, &gens, compose).expect("symmetric group")
}

/// Dihedral group of order `2n`: rotation, its inverse, and one reflection.
pub fn dihedral(n: usize) -> PermGroup {
    let id: Vec<u8> = (0..n as u8).collect();
    let rot: Vec<u8> = (0..n).map(|i| ((i + 1) % n) as u8).collect();
    let unrot: Vec<u8> = (0..n).map(|i| ((i + n - 1) % n) as u8).collect();
    let refl: Vec<u8> = (0..n).map(|i| ((n - i) % n) as u8).collect();
    PermGroup::generate(format!("D{n}"), id, &[rot, unrot, refl], compose).expect("dihedral group")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn s3_quotient() {
        let g = symmetric_transpositions(3);
        assert_eq!(g.order(), 6);
        let q = schreier_quotient(&g, 0).unwrap();
        assert_eq!(q.graph.vertex_count(), 3);
        assert_eq!(q.graph.regular_degree(), Some(3));
        let c0 = q.coset_of[0];
        assert!(q.graph.out_edges(c0).iter().any(|&e| q.graph.is_loop(e)));
    }

    #[test]
    fn z4_collapses_to_one_vertex() {
        let q = schreier_quotient(&cyclic(4), 0).unwrap();
        assert_eq!(q.graph.vertex_count(), 1);
        assert_eq!(q.graph.degree(0), 2);
        assert!(q.graph.out_edges(0).iter().all(|&e| q.graph.is_loop(e) && !q.graph.is_half_loop(e)));
    }

    #[test]
    fn klein_quotient() {
        let q = schreier_quotient(&klein_four(), 0).unwrap();
        assert_eq!(q.graph.vertex_count(), 2);
        let c0 = q.coset_of[0];
        let halves = q.graph.out_edges(c0).iter().filter(|&&e| q.graph.is_half_loop(e)).count();
        assert_eq!(halves, 1);
        assert_eq!(q.graph.multiplicity(0, 1), 2);
    }

    #[test]
    fn larger_fixtures_cover() {
        for (g, s) in [(dihedral(5), 2), (cyclic(6), 0), (symmetric_transpositions(4), 0), (dihedral(6), 0)] {
            let q = schreier_quotient(&g, s).unwrap();
            assert_eq!(q.graph.vertex_count() * q.subgroup.len(), g.order());
            assert!(q.graph.validate().is_ok());
        }
    }

    #[test]
    fn multiplication_is_associative() {
        let g = symmetric_transpositions(4);
        for a in 0..24 {
            for b in (0..24).step_by(5) {
                for c in (0..24).step_by(7) {
                    assert_eq!(g.mul(g.mul(a, b), c), g.mul(a, g.mul(b, c)));
                }
            }
        }
    }

    #[test]
    fn non_generating_set_is_rejected() {
        // +2 in Z4 reaches only the even residues
        let r = PermGroup::new("Z4", vec![vec![2, 3, 0, 1]]);
        assert!(matches!(r, Err(GraphError::Group(_))));
        let r = PermGroup::new("Z3", vec![vec![1, 2, 0]]);
        assert!(matches!(r, Err(GraphError::Group(_))));
    }

    #[test]
    fn broken_quotient_is_caught() {
        let g = symmetric_transpositions(3);
        let mut q = schreier_quotient(&g, 0).unwrap();
        let other = (0..6).find(|&x| q.coset_of[x] != q.coset_of[0]).unwrap();
        q.coset_of.swap(0, other);
        assert!(verify_covering(&g, &q).is_err());
    }
}
