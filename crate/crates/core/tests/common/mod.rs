//! Instance enumerators, random builders and independent oracles shared by
//! the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::ops::RangeInclusive;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use temporal_branchings::static_branchings::StaticDigraph;
use temporal_branchings::{RootSet, TemporalDigraph, TemporalVertex, Time};

/// Shape of [`random_instance`] draws.
#[derive(Clone, Debug)]
pub struct Spec {
    pub vertices: RangeInclusive<usize>,
    pub lifetime: RangeInclusive<Time>,
    pub max_temporal_edges: usize,
    pub interval: bool,
    pub k: usize,
    pub roots: RootMode,
}

#[derive(Clone, Copy, Debug)]
pub enum RootMode {
    /// Nonempty subsets of run starts.
    RunStarts,
    /// At most one temporal vertex, usually exactly one.
    Singletons,
    /// Arbitrary subsets of temporal vertices, possibly empty.
    Any,
}

/// Random instance with up to two parallel base edges per ordered pair and
/// occasional loops.
pub fn random_instance(rng: &mut ChaCha8Rng, spec: &Spec) -> (TemporalDigraph, Vec<RootSet>) {
    let n = rng.gen_range(spec.vertices.clone());
    let life = rng.gen_range(spec.lifetime.clone());
    let mut g = TemporalDigraph::new();
    for v in 0..n {
        g.add_vertex(format!("v{v}")).unwrap();
        if spec.interval {
            let a = rng.gen_range(1..=life);
            let b = rng.gen_range(a..=life);
            g.activate_range(v, a..=b);
        } else {
            for t in 1..=life {
                if rng.gen_bool(0.6) {
                    g.activate(v, t);
                }
            }
        }
    }
    if n > 0 && g.num_temporal_vertices() == 0 {
        let v = rng.gen_range(0..n);
        g.activate(v, rng.gen_range(1..=life));
    }
    let mut candidates = Vec::new();
    for u in 0..n {
        for v in 0..n {
            for &t in g.gamma(u) {
                for &t2 in g.gamma(v).range(t..) {
                    let weight = if u == v { 1 } else { 8 };
                    for slot in 0..2 {
                        for _ in 0..weight {
                            candidates.push((u, v, t, t2, slot));
                        }
                    }
                }
            }
        }
    }
    let m = rng.gen_range(0..=spec.max_temporal_edges);
    let mut chosen = BTreeSet::new();
    for _ in 0..4 * m {
        if chosen.len() == m || candidates.is_empty() {
            break;
        }
        chosen.insert(candidates[rng.gen_range(0..candidates.len())]);
    }
    for (u, v, t, t2, slot) in chosen {
        let name = format!("v{u}>v{v}{}", if slot == 1 { "'" } else { "" });
        let e = match g.edge_id(&name) {
            Some(e) => e,
            None => g.add_edge(name, u, v).unwrap(),
        };
        g.add_temporal_edge(e, t, t2);
    }
    let roots = random_roots(rng, &g, spec.k, spec.roots);
    (g, roots)
}

pub fn run_starts(g: &TemporalDigraph) -> Vec<TemporalVertex> {
    g.temporal_vertices()
        .filter(|&x| g.is_run_start(x))
        .collect()
}

pub fn random_roots(
    rng: &mut ChaCha8Rng,
    g: &TemporalDigraph,
    k: usize,
    mode: RootMode,
) -> Vec<RootSet> {
    let all: Vec<TemporalVertex> = g.temporal_vertices().collect();
    let starts = run_starts(g);
    (0..k)
        .map(|_| match mode {
            RootMode::RunStarts => {
                let mut s: RootSet = starts
                    .iter()
                    .copied()
                    .filter(|_| rng.gen_bool(0.35))
                    .collect();
                if s.is_empty() && !starts.is_empty() {
                    s.insert(starts[rng.gen_range(0..starts.len())]);
                }
                s
            }
            RootMode::Singletons => {
                if all.is_empty() || rng.gen_bool(0.1) {
                    RootSet::new()
                } else {
                    RootSet::from([all[rng.gen_range(0..all.len())]])
                }
            }
            RootMode::Any => all.iter().copied().filter(|_| rng.gen_bool(0.3)).collect(),
        })
        .collect()
}

/// Temporal edge `(tail, head, departure, arrival, slot)` of an
/// enumerated instance. `slot` picks one of the parallel base edges.
pub type Arc = (usize, usize, Time, Time, usize);

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, n: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for v in 0..n {
            if !prefix.contains(&v) {
                prefix.push(v);
                go(prefix, n, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), n, &mut out);
    out
}

/// Calls `f` on every `k`-subset (as sorted indices) of `0..n` for
/// `k <= max`.
fn subsets(n: usize, max: usize, f: &mut dyn FnMut(&[usize])) {
    fn go(start: usize, n: usize, max: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        f(cur);
        if cur.len() == max {
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, max, cur, f);
            cur.pop();
        }
    }
    go(0, n, max, &mut Vec::new(), f);
}

/// Temporal digraphs on `n` vertices with activity sets drawn from
/// `activities` (bitmasks over timestamps `1..=lifetime`, bit `t - 1`),
/// `slots` parallel base edges per ordered pair of distinct vertices, and
/// at most `max_arcs` temporal edges. One representative per vertex
/// relabeling class is produced.
pub fn for_each_temporal(
    n: usize,
    lifetime: Time,
    activities: &[u32],
    slots: usize,
    max_arcs: usize,
    f: &mut dyn FnMut(&TemporalDigraph),
) {
    let perms = permutations(n);
    let mut acts = vec![0u32; n];
    let mut idx = vec![0usize; n];
    loop {
        for (v, &i) in idx.iter().enumerate() {
            acts[v] = activities[i];
        }
        let canon_acts = perms.iter().all(|p| permuted_acts(&acts, p) >= acts);
        if canon_acts {
            let mut cand: Vec<Arc> = Vec::new();
            for u in 0..n {
                for v in (0..n).filter(|&v| v != u) {
                    for t in 1..=lifetime {
                        for t2 in t..=lifetime {
                            if acts[u] >> (t - 1) & 1 == 1 && acts[v] >> (t2 - 1) & 1 == 1 {
                                cand.extend((0..slots).map(|s| (u, v, t, t2, s)));
                            }
                        }
                    }
                }
            }
            let stabilizer: Vec<&Vec<usize>> = perms
                .iter()
                .filter(|p| permuted_acts(&acts, p) == acts)
                .collect();
            subsets(cand.len(), max_arcs, &mut |sel| {
                let arcs: Vec<Arc> = sel.iter().map(|&i| cand[i]).collect();
                let canon = stabilizer.iter().all(|p| {
                    let mut q: Vec<Arc> = arcs
                        .iter()
                        .map(|&(u, v, t, t2, s)| (p[u], p[v], t, t2, s))
                        .collect();
                    q.sort_unstable();
                    q >= arcs
                });
                if canon {
                    let g = build_temporal(n, &acts, &arcs);
                    // vertices without any activity make no valid instance
                    if g.validate().is_empty() {
                        f(&g);
                    }
                }
            });
        }
        // next activity tuple
        let mut i = 0;
        while i < n {
            idx[i] += 1;
            if idx[i] < activities.len() {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
        if i == n {
            return;
        }
    }
}

fn permuted_acts(acts: &[u32], p: &[usize]) -> Vec<u32> {
    let mut out = vec![0; acts.len()];
    for (v, &a) in acts.iter().enumerate() {
        out[p[v]] = a;
    }
    out
}

pub fn build_temporal(n: usize, acts: &[u32], arcs: &[Arc]) -> TemporalDigraph {
    let mut g = TemporalDigraph::new();
    for v in 0..n {
        g.add_vertex(format!("v{v}")).unwrap();
        g.activate_range(v, (1..=32).filter(|t| acts[v] >> (t - 1) & 1 == 1));
    }
    for &(u, v, t, t2, slot) in arcs {
        let name = format!("v{u}>v{v}{}", "'".repeat(slot));
        let e = match g.edge_id(&name) {
            Some(e) => e,
            None => g.add_edge(name, u, v).unwrap(),
        };
        g.add_temporal_edge(e, t, t2);
    }
    g
}

/// Loopless multidigraphs on `n` vertices with at most `max_edges` edges,
/// one per vertex relabeling class.
pub fn for_each_multidigraph(n: usize, max_edges: usize, f: &mut dyn FnMut(&StaticDigraph)) {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v)))
        .collect();
    let perms = permutations(n);
    // multisets as nondecreasing index sequences
    fn go(
        start: usize,
        cur: &mut Vec<usize>,
        max: usize,
        pairs: &[(usize, usize)],
        perms: &[Vec<usize>],
        n: usize,
        f: &mut dyn FnMut(&StaticDigraph),
    ) {
        let edges: Vec<(usize, usize)> = cur.iter().map(|&i| pairs[i]).collect();
        let canon = perms.iter().all(|p| {
            let mut q: Vec<(usize, usize)> = edges.iter().map(|&(u, v)| (p[u], p[v])).collect();
            q.sort_unstable();
            q >= edges
        });
        if canon {
            let mut d = StaticDigraph::new();
            for v in 0..n {
                d.add_vertex(format!("v{v}")).unwrap();
            }
            for (i, &(u, v)) in edges.iter().enumerate() {
                d.add_edge(format!("e{i}"), u, v).unwrap();
            }
            f(&d);
        }
        if cur.len() == max {
            return;
        }
        for i in start..pairs.len() {
            cur.push(i);
            go(i, cur, max, pairs, perms, n, f);
            cur.pop();
        }
    }
    go(0, &mut Vec::new(), max_edges, &pairs, &perms, n, f);
}

/// `min over nonempty S of in-degree(S) - |{i : S and R_i disjoint}| >= 0`,
/// by enumerating every vertex subset.
pub fn cut_oracle(d: &StaticDigraph, roots: &[BTreeSet<usize>]) -> bool {
    let n = d.num_vertices();
    (1u32..1 << n).all(|s| {
        let inside = |v: usize| s >> v & 1 == 1;
        let indeg = d
            .edges()
            .iter()
            .filter(|e| inside(e.head) && !inside(e.tail))
            .count();
        let missed = roots
            .iter()
            .filter(|r| r.iter().all(|&v| !inside(v)))
            .count();
        indeg >= missed
    })
}

/// Nonempty subsets of `0..n` as bitmasks.
pub fn nonempty_subsets(n: usize) -> impl Iterator<Item = BTreeSet<usize>> {
    (1u32..1 << n).map(move |s| (0..n).filter(|&v| s >> v & 1 == 1).collect())
}
