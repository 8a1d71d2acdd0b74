//! Standard graphs used throughout the tests, examples and CLI fixtures.

use std::collections::HashMap;

use crate::graph::{GraphBuilder, RootedGraph, SerreGraph};

pub fn complete(n: usize) -> SerreGraph {
    let mut b = GraphBuilder::new(n);
    for u in 0..n {
        for v in u + 1..n {
            b.edge(u, v);
        }
    }
    b.build().with_name(format!("K{n}"))
}

pub fn cycle(n: usize) -> SerreGraph {
    let mut b = GraphBuilder::new(n);
    for u in 0..n {
        b.edge(u, (u + 1) % n);
    }
    b.build().with_name(format!("C{n}"))
}

pub fn path(n: usize) -> SerreGraph {
    let mut b = GraphBuilder::new(n);
    for u in 1..n {
        b.edge(u - 1, u);
    }
    b.build().with_name(format!("P{n}"))
}

pub fn petersen() -> SerreGraph {
    let mut b = GraphBuilder::new(10);
    for i in 0..5 {
        b.edge(i, (i + 1) % 5);
        b.edge(i, i + 5);
        b.edge(5 + i, 5 + (i + 2) % 5);
    }
    b.build().with_name("Petersen")
}

/// One vertex with `r` loop pairs (degree `2r`).
pub fn rose(r: usize) -> SerreGraph {
    let mut b = GraphBuilder::new(1);
    for _ in 0..r {
        b.loop_pair(0);
    }
    b.build().with_name(format!("rose{r}"))
}

/// One vertex with `d` half-loops.
pub fn half_loop_bouquet(d: usize) -> SerreGraph {
    let mut b = GraphBuilder::new(1);
    for _ in 0..d {
        b.half_loop(0);
    }
    b.build().with_name(format!("bouquet{d}"))
}

/// Ball of radius `r` in the `d`-regular tree, rooted at vertex 0.
pub fn tree_ball(d: usize, r: usize) -> RootedGraph {
    let mut b = GraphBuilder::new(1);
    let mut frontier = vec![0];
    for depth in 0..r {
        let mut next = Vec::new();
        for &v in &frontier {
            let children = if depth == 0 { d } else { d - 1 };
            for _ in 0..children {
                let c = b.add_vertex();
                b.edge(v, c);
                next.push(c);
            }
        }
        frontier = next;
    }
    RootedGraph { graph: b.build().with_name(format!("T{d}-ball{r}")), root: 0 }
}

/// Ball of radius `r` around the identity in the Cayley graph of a free product of cyclic groups.
///
/// Each entry of `orders` is a factor: `0` for an infinite cyclic group, `2` for a
/// group of order two (one involutive generator), `q >= 3` for a cyclic group of order
/// `q` (generator and its inverse). `[0, 0]` gives the 4-regular tree, `[3, 2]` a
/// 3-regular graph with a triangle through every vertex.
pub fn free_product_ball(orders: &[usize], r: usize) -> RootedGraph {
    // generator list: (factor, exponent step)
    let mut gens: Vec<(usize, i64)> = Vec::new();
    for (f, &q) in orders.iter().enumerate() {
        assert!(q == 0 || q >= 2, "factor order must be 0 or at least 2");
        gens.push((f, 1));
        if q != 2 {
            gens.push((f, -1));
        }
    }
    let reduce = |q: usize, x: i64| if q == 0 { x } else { x.rem_euclid(q as i64) };
    let step = |w: &Vec<(usize, i64)>, (f, s): (usize, i64)| -> Vec<(usize, i64)> {
        let mut w = w.clone();
        let q = orders[f];
        match w.last_mut() {
            Some(last) if last.0 == f => {
                let e = reduce(q, last.1 + s);
                if e == 0 {
                    w.pop();
                } else {
                    last.1 = e;
                }
            }
            _ => w.push((f, reduce(q, s))),
        }
        w
    };
    let mut index: HashMap<Vec<(usize, i64)>, usize> = HashMap::new();
    let mut words = vec![Vec::new()];
    index.insert(Vec::new(), 0);
    let mut dist = vec![0usize];
    let mut b = GraphBuilder::new(1);
    let mut i = 0;
    while i < words.len() {
        let w = words[i].clone();
        if dist[i] < r {
            for &g in &gens {
                let u = step(&w, g);
                if !index.contains_key(&u) {
                    let id = b.add_vertex();
                    index.insert(u.clone(), id);
                    words.push(u);
                    dist.push(dist[i] + 1);
                }
            }
        }
        i += 1;
    }
    // edges: one undirected edge per (w, generator) with the inverse generator paired
    for (i, w) in words.iter().enumerate() {
        for &g in &gens {
            let u = step(w, g);
            let Some(&j) = index.get(&u) else { continue };
            let (f, s) = g;
            let q = orders[f];
            let is_involution = q == 2;
            // add each undirected edge once: for involutions from the smaller endpoint,
            // otherwise only along the +1 direction
            if (is_involution && i < j) || (!is_involution && s == 1) {
                b.edge(i, j);
            }
        }
    }
    RootedGraph { graph: b.build(), root: 0 }
}
