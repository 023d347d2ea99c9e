//! Exact search for all four variants, and a brute-force enumeration oracle
//! used as ground truth in tests.
//!
//! The search works on the structure every solution must have. In
//! temporal mode each branching gives every non-root first appearance of a
//! run exactly one entering temporal edge and nothing else, and the parent
//! relation must be acyclic. In vertex mode each non-root base vertex gets
//! exactly one entering temporal edge, departures from a vertex must happen
//! while it is still reachable by waiting, and the parent relation on base
//! vertices must be acyclic.

use std::collections::BTreeSet;

use crate::model::{
    Disjointness, ProblemVariant, RootSet, Spanning, TemporalDigraph, TemporalVertex, Time,
};
use crate::poly::{Outcome, SolveError};
use crate::reach::{TemporalBranching, Verifier};

/// Largest number of temporal edges [`oracle_enumerate`] accepts.
pub const ORACLE_LIMIT: usize = 14;

/// Brute-force decision by enumerating every choice of temporal edges for
/// every branching. Refuses instances above [`ORACLE_LIMIT`].
///
/// In vertex mode the activity set of a candidate is the smallest one
/// supporting its roots and temporal edges inside the host's runs. A valid
/// branching always stays valid after dropping edges its roots cannot
/// reach, and the dropped form has exactly that activity set, so this loses
/// no solution.
pub fn oracle_enumerate(
    g: &TemporalDigraph,
    roots: &[RootSet],
    variant: ProblemVariant,
) -> Result<Outcome, SolveError> {
    g.ensure_valid()?;
    g.ensure_roots(roots)?;
    let m = g.num_temporal_edges();
    if m > ORACLE_LIMIT {
        return Err(SolveError::ScaleGuard {
            found: m,
            limit: ORACLE_LIMIT,
        });
    }
    let k = roots.len();
    if k == 0 {
        return Ok(Outcome::Feasible(Vec::new()));
    }
    let ver = Verifier::new(g);
    let h = ver.expanded();
    let arcs = h.temporal_arcs();
    let nodes = h.nodes();
    // base edges with a copy, densely numbered
    let mut dense = vec![usize::MAX; g.num_edges()];
    let mut next = 0;
    for a in arcs {
        if dense[a.edge.edge] == usize::MAX {
            dense[a.edge.edge] = next;
            next += 1;
        }
    }
    let base_mask = |s: u32| -> u32 {
        (0..m)
            .filter(|&j| s & (1 << j) != 0)
            .fold(0, |acc, j| acc | 1 << dense[arcs[j].edge.edge])
    };

    let mut valid: Vec<Vec<(u32, Vec<bool>)>> = Vec::with_capacity(k);
    for r in roots {
        let root_mask: Vec<bool> = nodes.iter().map(|n| r.contains(n)).collect();
        let mut list = Vec::new();
        let mut arc_mask = vec![false; m];
        for s in 0u32..(1u32 << m) {
            for (j, flag) in arc_mask.iter_mut().enumerate() {
                *flag = s & (1 << j) != 0;
            }
            let present = match variant.spanning {
                Spanning::Temporal => vec![true; nodes.len()],
                Spanning::Vertex => hull_activity(g, &ver, r, &arc_mask),
            };
            if ver
                .check(variant.spanning, &present, &arc_mask, &root_mask)
                .is_ok()
            {
                list.push((s, present));
            }
        }
        valid.push(list);
    }

    let key = |s: u32| match variant.disjointness {
        Disjointness::TEdge => s,
        Disjointness::Edge => base_mask(s),
    };
    let mut chosen = Vec::with_capacity(k);
    if !pick(&valid, &key, 0, 0, &mut chosen) {
        return Ok(Outcome::Infeasible(
            "no choice of temporal edges yields disjoint spanning branchings".into(),
        ));
    }
    let out = chosen
        .iter()
        .zip(roots)
        .map(|(&(s, present), r)| {
            let mut b = TemporalBranching::empty(g, r.clone());
            for (x, n) in nodes.iter().enumerate() {
                if present[x] {
                    b.gamma[n.vertex].insert(n.time);
                }
            }
            for (j, a) in arcs.iter().enumerate() {
                if s & (1 << j) != 0 {
                    b.insert(a.edge);
                }
            }
            b
        })
        .collect();
    Ok(Outcome::Feasible(out))
}

/// Depth-first choice of one valid candidate per branching with pairwise
/// disjoint keys.
fn pick<'v>(
    valid: &'v [Vec<(u32, Vec<bool>)>],
    key: &dyn Fn(u32) -> u32,
    i: usize,
    used: u32,
    chosen: &mut Vec<(u32, &'v Vec<bool>)>,
) -> bool {
    if i == valid.len() {
        return true;
    }
    for (s, present) in &valid[i] {
        let ks = key(*s);
        if ks & used == 0 {
            chosen.push((*s, present));
            if pick(valid, key, i + 1, used | ks, chosen) {
                return true;
            }
            chosen.pop();
        }
    }
    false
}

/// Per vertex and per run of its host activity, every time between the
/// earliest and latest root or arc endpoint in that run.
fn hull_activity(g: &TemporalDigraph, ver: &Verifier, roots: &RootSet, arcs: &[bool]) -> Vec<bool> {
    let h = ver.expanded();
    let mut touched: Vec<BTreeSet<Time>> = vec![BTreeSet::new(); g.num_vertices()];
    for r in roots {
        touched[r.vertex].insert(r.time);
    }
    for (j, a) in h.temporal_arcs().iter().enumerate() {
        if arcs[j] {
            let e = g.edge(a.edge.edge);
            touched[e.tail].insert(a.edge.departure);
            touched[e.head].insert(a.edge.arrival);
        }
    }
    h.nodes()
        .iter()
        .map(|n| {
            let t = &touched[n.vertex];
            t.range(run_start(g, *n)..=n.time).next().is_some()
                && t.range(n.time..=run_end(g, *n)).next().is_some()
        })
        .collect()
}

/// First time of the run of consecutive activity containing `n`.
fn run_start(g: &TemporalDigraph, n: TemporalVertex) -> Time {
    let mut t = n.time;
    while t > 0 && g.is_active(n.vertex, t - 1) {
        t -= 1;
    }
    t
}

/// Last time of the run of consecutive activity containing `n`.
fn run_end(g: &TemporalDigraph, n: TemporalVertex) -> Time {
    let mut t = n.time;
    while g.is_active(n.vertex, t + 1) {
        t += 1;
    }
    t
}

/// Exact decision with a witness, by constraint search over the entering
/// temporal edge of every target in every branching.
pub fn solve_exact(
    g: &TemporalDigraph,
    roots: &[RootSet],
    variant: ProblemVariant,
) -> Result<Outcome, SolveError> {
    g.ensure_valid()?;
    g.ensure_roots(roots)?;
    if roots.is_empty() {
        return Ok(Outcome::Feasible(Vec::new()));
    }
    let search = match Search::new(g, roots, variant) {
        Ok(s) => s,
        Err(reason) => return Ok(Outcome::Infeasible(reason)),
    };
    Ok(search.run())
}

/// Constraint search state.
///
/// A variable is a pair (branching, target). Targets are node indices of
/// the expanded digraph in temporal mode and base vertices in vertex mode.
/// Values are indices of temporal arcs entering the target.
struct Search<'a> {
    g: &'a TemporalDigraph,
    roots: &'a [RootSet],
    variant: ProblemVariant,
    ver: Verifier<'a>,
    vars: Vec<(usize, usize)>,
    domains: Vec<Vec<usize>>,
    choice: Vec<Option<usize>>,
    /// variable of (branching, target)
    var_of: Vec<Vec<Option<usize>>>,
    /// branching owning each arc (t-edge) or base edge with use count (edge)
    arc_owner: Vec<Option<usize>>,
    edge_owner: Vec<(Option<usize>, usize)>,
    /// vertex mode: entry time and parent vertex of every base vertex
    entry: Vec<Vec<Option<Time>>>,
    parent_vertex: Vec<Vec<Option<usize>>>,
    /// vertex mode: departure times of chosen arcs leaving each vertex
    departures: Vec<Vec<Vec<Time>>>,
    /// first target of branching 0, when all root sets coincide
    pivot: Option<usize>,
    run_starts: Vec<Time>,
}

impl<'a> Search<'a> {
    fn new(
        g: &'a TemporalDigraph,
        roots: &'a [RootSet],
        variant: ProblemVariant,
    ) -> Result<Self, String> {
        let ver = Verifier::new(g);
        let k = roots.len();
        let h = ver.expanded();
        let nodes = h.nodes().to_vec();
        let arcs = h.temporal_arcs().to_vec();
        let run_starts: Vec<Time> = nodes.iter().map(|&n| run_start(g, n)).collect();
        let n_targets = match variant.spanning {
            Spanning::Temporal => nodes.len(),
            Spanning::Vertex => g.num_vertices(),
        };
        let mut vars = Vec::new();
        let mut domains = Vec::new();
        let mut var_of = vec![vec![None; n_targets]; k];
        let mut entry = vec![vec![None; g.num_vertices()]; k];
        for (i, r) in roots.iter().enumerate() {
            match variant.spanning {
                Spanning::Temporal => {
                    if let Some(x) = r.iter().find(|&&x| !g.is_run_start(x)) {
                        return Err(format!("root {} is also reached by waiting", g.show(*x)));
                    }
                    for (x, &n) in nodes.iter().enumerate() {
                        if g.is_run_start(n) && !r.contains(&n) {
                            let dom: Vec<usize> = h
                                .arcs_into(x)
                                .iter()
                                .copied()
                                .filter(|&a| arcs[a].tail != x)
                                .collect();
                            var_of[i][x] = Some(vars.len());
                            vars.push((i, x));
                            domains.push(dom);
                        }
                    }
                }
                Spanning::Vertex => {
                    for x in r {
                        if entry[i][x.vertex].replace(x.time).is_some() {
                            return Err(format!(
                                "root set {} has two roots at `{}`",
                                i + 1,
                                g.vertex_name(x.vertex)
                            ));
                        }
                    }
                    for u in 0..g.num_vertices() {
                        if entry[i][u].is_none() {
                            let dom: Vec<usize> = (0..arcs.len())
                                .filter(|&a| {
                                    nodes[arcs[a].head].vertex == u
                                        && nodes[arcs[a].tail].vertex != u
                                })
                                .collect();
                            var_of[i][u] = Some(vars.len());
                            vars.push((i, u));
                            domains.push(dom);
                        }
                    }
                }
            }
        }
        let pivot = if roots.iter().all(|r| r == &roots[0]) && k > 1 {
            vars.first().map(|&(_, x)| x)
        } else {
            None
        };
        Ok(Search {
            g,
            roots,
            variant,
            choice: vec![None; vars.len()],
            vars,
            domains,
            var_of,
            arc_owner: vec![None; arcs.len()],
            edge_owner: vec![(None, 0); g.num_edges()],
            entry,
            parent_vertex: vec![vec![None; g.num_vertices()]; k],
            departures: vec![vec![Vec::new(); g.num_vertices()]; k],
            pivot,
            run_starts,
            ver,
        })
    }

    fn run(mut self) -> Outcome {
        if !self.search() {
            return Outcome::Infeasible(
                "exhaustive search found no disjoint spanning branchings".into(),
            );
        }
        let h = self.ver.expanded();
        let arcs = h.temporal_arcs();
        let mut out: Vec<TemporalBranching> = self
            .roots
            .iter()
            .map(|r| match self.variant.spanning {
                Spanning::Temporal => TemporalBranching::with_host_activity(self.g, r.clone()),
                Spanning::Vertex => TemporalBranching::empty(self.g, r.clone()),
            })
            .collect();
        for (v, &(i, _)) in self.vars.iter().enumerate() {
            let a = self.choice[v].expect("complete assignment");
            out[i].insert(arcs[a].edge);
        }
        if self.variant.spanning == Spanning::Vertex {
            for (i, b) in out.iter_mut().enumerate() {
                for u in 0..self.g.num_vertices() {
                    let t = self.entry[i][u].expect("every vertex is entered");
                    let last = self.departures[i][u]
                        .iter()
                        .copied()
                        .max()
                        .unwrap_or(t)
                        .max(t);
                    b.gamma[u].extend(t..=last);
                }
            }
        }
        Outcome::Feasible(out)
    }

    fn key(&self, a: usize) -> usize {
        match self.variant.disjointness {
            Disjointness::TEdge => a,
            Disjointness::Edge => self.ver.expanded().temporal_arcs()[a].edge.edge,
        }
    }

    fn consistent(&self, var: usize, a: usize) -> bool {
        let (i, x) = self.vars[var];
        let h = self.ver.expanded();
        let arc = h.temporal_arcs()[a];
        match self.variant.disjointness {
            Disjointness::TEdge => {
                if self.arc_owner[a].is_some() {
                    return false;
                }
            }
            Disjointness::Edge => {
                if matches!(self.edge_owner[arc.edge.edge].0, Some(j) if j != i) {
                    return false;
                }
            }
        }
        if self.pivot == Some(x) {
            let key = self.key(a);
            if i > 0 {
                if let Some(prev) = self.var_of[i - 1][x].and_then(|v| self.choice[v]) {
                    if self.key(prev) >= key {
                        return false;
                    }
                }
            }
            if let Some(next) = self
                .var_of
                .get(i + 1)
                .and_then(|row| row[x])
                .and_then(|v| self.choice[v])
            {
                if key >= self.key(next) {
                    return false;
                }
            }
        }
        match self.variant.spanning {
            Spanning::Temporal => {
                // follow parents from the tail; reaching x closes a cycle
                let mut p = Some(arc.tail);
                while let Some(y) = p {
                    if y == x {
                        return false;
                    }
                    p = self.node_parent(i, y);
                }
                true
            }
            Spanning::Vertex => {
                let nodes = h.nodes();
                let tail = nodes[arc.tail];
                let head = nodes[arc.head];
                if let Some(tv) = self.entry[i][tail.vertex] {
                    if !(self.run_starts[arc.tail] <= tv && tv <= tail.time) {
                        return false;
                    }
                }
                for &d in &self.departures[i][x] {
                    let node = h
                        .node_index(TemporalVertex::new(x, d))
                        .expect("departures are temporal vertices");
                    if !(self.run_starts[node] <= head.time && head.time <= d) {
                        return false;
                    }
                }
                let mut p = Some(tail.vertex);
                while let Some(y) = p {
                    if y == x {
                        return false;
                    }
                    p = self.parent_vertex[i][y];
                }
                true
            }
        }
    }

    /// Parent of node `y` in branching `i` under the current assignment.
    fn node_parent(&self, i: usize, y: usize) -> Option<usize> {
        let h = self.ver.expanded();
        match self.var_of[i][y] {
            Some(v) => self.choice[v].map(|a| h.temporal_arcs()[a].tail),
            // roots have no parent, other nodes are reached by waiting
            None => h.wait_pred(y),
        }
    }

    fn assign(&mut self, var: usize, a: usize) {
        let (i, x) = self.vars[var];
        self.choice[var] = Some(a);
        let h = self.ver.expanded();
        let arc = h.temporal_arcs()[a];
        self.arc_owner[a] = Some(i);
        let slot = &mut self.edge_owner[arc.edge.edge];
        slot.0 = Some(i);
        slot.1 += 1;
        if self.variant.spanning == Spanning::Vertex {
            let tail = h.nodes()[arc.tail];
            self.entry[i][x] = Some(arc.edge.arrival);
            self.parent_vertex[i][x] = Some(tail.vertex);
            self.departures[i][tail.vertex].push(tail.time);
        }
    }

    fn unassign(&mut self, var: usize) {
        let (i, x) = self.vars[var];
        let a = self.choice[var].take().expect("assigned");
        let h = self.ver.expanded();
        let arc = h.temporal_arcs()[a];
        self.arc_owner[a] = None;
        let slot = &mut self.edge_owner[arc.edge.edge];
        slot.1 -= 1;
        if slot.1 == 0 {
            slot.0 = None;
        }
        if self.variant.spanning == Spanning::Vertex {
            let tail = h.nodes()[arc.tail];
            self.entry[i][x] = None;
            self.parent_vertex[i][x] = None;
            self.departures[i][tail.vertex].pop();
        }
    }

    /// Forward checking with the smallest remaining domain first.
    fn search(&mut self) -> bool {
        let mut best: Option<(usize, usize)> = None;
        for v in 0..self.vars.len() {
            if self.choice[v].is_some() {
                continue;
            }
            let count = self.domains[v]
                .iter()
                .filter(|&&a| self.consistent(v, a))
                .count();
            if count == 0 {
                return false;
            }
            if best.is_none_or(|(_, c)| count < c) {
                best = Some((v, count));
            }
        }
        let Some((v, _)) = best else {
            return true;
        };
        for idx in 0..self.domains[v].len() {
            let a = self.domains[v][idx];
            if self.consistent(v, a) {
                self.assign(v, a);
                if self.search() {
                    return true;
                }
                self.unassign(v);
            }
        }
        false
    }
}
