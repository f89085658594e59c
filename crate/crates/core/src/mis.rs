//! Exact maximum independent sets of odd pair graphs.
//!
//! An independent set of H(A) is a clique of the "compatibility" graph
//! (edges at even intersections), so the solver is a bitset max-clique
//! branch and bound with greedy colouring bounds (MCQ style).

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use rayon::prelude::*;

use crate::family::SetFamily;
use crate::gf2::dot_bits;

#[derive(Clone, Debug)]
pub(crate) struct BitGraph {
    n: usize,
    words: usize,
    adj: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn empty(words: usize) -> Self {
        Bits(vec![0; words])
    }

    fn full(n: usize, words: usize) -> Self {
        let mut b = Self::empty(words);
        for i in 0..n {
            b.set(i);
        }
        b
    }

    #[inline]
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    fn clear(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }

    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn first(&self) -> Option<usize> {
        self.0
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, &w)| i * 64 + w.trailing_zeros() as usize)
    }

    fn and(&self, other: &[u64]) -> Bits {
        Bits(self.0.iter().zip(other).map(|(a, b)| a & b).collect())
    }

    fn and_not_assign(&mut self, other: &[u64]) {
        for (a, b) in self.0.iter_mut().zip(other) {
            *a &= !b;
        }
    }

    /// Keeps only bits strictly above `v`.
    fn above(&self, v: usize) -> Bits {
        let mut out = self.clone();
        for w in 0..out.0.len() {
            let lo = w * 64;
            if lo + 64 <= v + 1 {
                out.0[w] = 0;
            } else if lo <= v {
                let keep = v + 1 - lo;
                out.0[w] &= !((1u64 << keep) - 1);
            }
        }
        out
    }
}

impl BitGraph {
    fn with_vertices(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        BitGraph {
            n,
            words,
            adj: vec![0; n * words],
        }
    }

    fn row(&self, v: usize) -> &[u64] {
        &self.adj[v * self.words..(v + 1) * self.words]
    }

    fn add_edge(&mut self, u: usize, v: usize) {
        self.adj[u * self.words + v / 64] |= 1 << (v % 64);
        self.adj[v * self.words + u / 64] |= 1 << (u % 64);
    }

    /// Compatibility graph: `i ~ j` iff `|A_i ∩ A_j|` is even.
    pub(crate) fn compatibility_of_bits(bits: &[u64]) -> Self {
        let mut g = Self::with_vertices(bits.len());
        for i in 0..bits.len() {
            for j in i + 1..bits.len() {
                if dot_bits(bits[i], bits[j]) == 0 {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    fn degree(&self, v: usize) -> usize {
        self.row(v).iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Same graph with vertices relabelled so that `order[k]` becomes `k`.
    fn relabel(&self, order: &[usize]) -> BitGraph {
        let mut g = BitGraph::with_vertices(self.n);
        for (a, &u) in order.iter().enumerate() {
            for (b, &v) in order.iter().enumerate().skip(a + 1) {
                if self.row(u)[v / 64] >> (v % 64) & 1 == 1 {
                    g.add_edge(a, b);
                }
            }
        }
        g
    }

    /// Greedy sequential colouring of `p`; returns vertices with their colour,
    /// colours non-decreasing.
    fn colour_sort(&self, p: &Bits) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(p.count());
        let mut uncoloured = p.clone();
        let mut colour = 0;
        while !uncoloured.is_empty() {
            colour += 1;
            let mut q = uncoloured.clone();
            while let Some(v) = q.first() {
                q.clear(v);
                uncoloured.clear(v);
                q.and_not_assign(self.row(v));
                out.push((v, colour));
            }
        }
        out
    }

    fn colour_bound(&self, p: &Bits) -> usize {
        self.colour_sort(p).last().map_or(0, |&(_, c)| c)
    }
}

struct Shared {
    best_size: AtomicUsize,
    best: Mutex<Vec<usize>>,
}

fn expand(g: &BitGraph, clique: &mut Vec<usize>, mut p: Bits, shared: &Shared) {
    let coloured = g.colour_sort(&p);
    for &(v, colour) in coloured.iter().rev() {
        if clique.len() + colour <= shared.best_size.load(Ordering::Relaxed) {
            return;
        }
        clique.push(v);
        let np = p.and(g.row(v));
        if np.is_empty() {
            record(clique, shared);
        } else {
            expand(g, clique, np, shared);
        }
        clique.pop();
        p.clear(v);
    }
}

fn record(clique: &[usize], shared: &Shared) {
    let mut best = shared.best.lock().unwrap();
    if clique.len() > best.len() {
        *best = clique.to_vec();
        shared.best_size.store(clique.len(), Ordering::Relaxed);
    }
}

/// Maximum clique size with one witness (not canonical). Top-level branches
/// run in parallel; the size is exact regardless of scheduling.
pub(crate) fn max_clique(g: &BitGraph) -> Vec<usize> {
    if g.n == 0 {
        return Vec::new();
    }
    // Degree-descending initial order.
    let mut order: Vec<usize> = (0..g.n).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    let h = g.relabel(&order);

    let shared = Shared {
        best_size: AtomicUsize::new(0),
        best: Mutex::new(Vec::new()),
    };
    // Seed with a greedy clique so the first bounds bite.
    let mut greedy = Vec::new();
    let mut cand = Bits::full(h.n, h.words);
    while let Some(v) = cand.first() {
        greedy.push(v);
        cand = cand.and(h.row(v));
    }
    record(&greedy, &shared);

    // Top level: branch on vertex v with candidates restricted to later
    // vertices, so branches are disjoint.
    let all = Bits::full(h.n, h.words);
    (0..h.n).into_par_iter().for_each(|v| {
        let p = all.above(v).and(h.row(v));
        if 1 + p.count() <= shared.best_size.load(Ordering::Relaxed) {
            return;
        }
        let mut clique = vec![v];
        if p.is_empty() {
            record(&clique, &shared);
        } else {
            expand(&h, &mut clique, p, &shared);
        }
    });
    let mut vertices: Vec<usize> = shared.best.into_inner().unwrap().into_iter().map(|v| order[v]).collect();
    vertices.sort_unstable();
    vertices
}

/// Lexicographically smallest clique of exactly `k` vertices (as a sorted
/// index list), if one exists.
pub(crate) fn lex_first_clique(g: &BitGraph, k: usize) -> Option<Vec<usize>> {
    fn go(g: &BitGraph, clique: &mut Vec<usize>, p: &Bits, k: usize) -> bool {
        if clique.len() == k {
            return true;
        }
        if clique.len() + p.count() < k || clique.len() + g.colour_bound(p) < k {
            return false;
        }
        let mut rest = p.clone();
        while let Some(v) = rest.first() {
            if clique.len() + rest.count() < k {
                return false;
            }
            rest.clear(v);
            clique.push(v);
            if go(g, clique, &rest.and(g.row(v)), k) {
                return true;
            }
            clique.pop();
        }
        false
    }
    let mut clique = Vec::with_capacity(k);
    go(g, &mut clique, &Bits::full(g.n, g.words), k).then_some(clique)
}

/// Maximum independent set of H(A) restricted to `indices` (family indices),
/// lexicographically smallest among the optimal ones. Returned sorted.
pub(crate) fn max_independent_lex(family: &SetFamily, indices: &[usize]) -> Vec<usize> {
    let mut sorted = indices.to_vec();
    sorted.sort_unstable();
    let bits: Vec<u64> = sorted.iter().map(|&i| family.bits()[i]).collect();
    let g = BitGraph::compatibility_of_bits(&bits);
    let k = max_clique(&g).len();
    let local = lex_first_clique(&g, k).expect("a clique of the optimal size exists");
    local.into_iter().map(|v| sorted[v]).collect()
}

/// Size of a maximum independent set of H(A) on the given raw vectors.
pub(crate) fn independence_number(bits: &[u64]) -> Vec<usize> {
    max_clique(&BitGraph::compatibility_of_bits(bits))
}
