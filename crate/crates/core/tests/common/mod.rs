//! Brute-force oracles that share no code with the library.
#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::VecDeque;

use cmjtree::GrowingTree;
use rand::Rng;

pub fn adjacency(parents: &[Option<usize>]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); parents.len()];
    for (v, p) in parents.iter().enumerate() {
        if let Some(p) = *p {
            adj[v].push(p);
            adj[p].push(v);
        }
    }
    adj
}

/// Largest component left after deleting `u`, found by BFS.
pub fn psi_bfs(parents: &[Option<usize>], u: usize) -> usize {
    let adj = adjacency(parents);
    let mut seen = vec![false; parents.len()];
    seen[u] = true;
    let mut best = 0;
    for &start in &adj[u] {
        let mut count = 0;
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(x) = queue.pop_front() {
            count += 1;
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        best = best.max(count);
    }
    best
}

/// `|(T, u)_{v↓}|`: vertices whose path to `u` passes through `v`.
pub fn directed_bfs(parents: &[Option<usize>], u: usize, v: usize) -> usize {
    let adj = adjacency(parents);
    // Reroot at u, then count v's descendants.
    let mut up = vec![usize::MAX; parents.len()];
    let mut order = vec![u];
    up[u] = u;
    let mut i = 0;
    while i < order.len() {
        let x = order[i];
        for &y in &adj[x] {
            if up[y] == usize::MAX {
                up[y] = x;
                order.push(y);
            }
        }
        i += 1;
    }
    (0..parents.len())
        .filter(|&w| {
            let mut x = w;
            loop {
                if x == v {
                    return true;
                }
                if x == u {
                    return false;
                }
                x = up[x];
            }
        })
        .count()
}

/// A uniform random recursive tree shape.
pub fn random_parents<R: Rng>(n: usize, rng: &mut R) -> Vec<Option<usize>> {
    (0..n).map(|v| (v > 0).then(|| rng.random_range(0..v))).collect()
}

pub fn tree_from_unit(us: &[f64]) -> GrowingTree {
    let mut parents = vec![None];
    for (i, u) in us.iter().enumerate() {
        let v = i + 1;
        parents.push(Some(((u * v as f64) as usize).min(v - 1)));
    }
    GrowingTree::from_parents(&parents).unwrap()
}

/// Every parent sequence with `parent(v) < v` on `n` vertices.
pub fn all_recursive_trees(n: usize) -> Vec<Vec<Option<usize>>> {
    let mut out = vec![vec![None]];
    for v in 1..n {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..v).map(move |q| {
                    let mut p = p.clone();
                    p.push(Some(q));
                    p
                })
            })
            .collect();
    }
    out
}

/// Probability of a labelled parent sequence under discrete growth with
/// weights `f(out-degree)`.
pub fn sequence_probability(parents: &[Option<usize>], f: impl Fn(usize) -> f64) -> f64 {
    let mut out = vec![0usize; parents.len()];
    let mut prob = 1.0;
    for v in 1..parents.len() {
        let p = parents[v].unwrap();
        let total: f64 = (0..v).map(|u| f(out[u])).sum();
        prob *= f(out[p]) / total;
        out[p] += 1;
    }
    prob
}
