//! Static multi-digraphs, unit-capacity max-flow, and packing of
//! edge-disjoint spanning branchings with prescribed root sets.

use std::collections::{BTreeSet, HashMap, VecDeque};

use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StaticEdge {
    pub id: String,
    pub tail: usize,
    pub head: usize,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StaticError {
    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),
    #[error("duplicate edge `{0}`")]
    DuplicateEdge(String),
    #[error("vertex index {0} out of range")]
    UnknownVertex(usize),
    #[error("sink `{0}` is one of the sources")]
    SinkIsSource(String),
    #[error("root set {0} is empty")]
    EmptyRootSet(usize),
    #[error("no root sets given")]
    NoRootSets,
}

/// Directed multigraph with named vertices and edges. Loops and parallel
/// edges are allowed.
#[derive(Clone, Debug, Default)]
pub struct StaticDigraph {
    names: Vec<String>,
    lookup: HashMap<String, usize>,
    edges: Vec<StaticEdge>,
    edge_lookup: HashMap<String, usize>,
}

impl StaticDigraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, name: impl Into<String>) -> Result<usize, StaticError> {
        let name = name.into();
        if self.lookup.contains_key(&name) {
            return Err(StaticError::DuplicateVertex(name));
        }
        self.lookup.insert(name.clone(), self.names.len());
        self.names.push(name);
        Ok(self.names.len() - 1)
    }

    pub fn add_edge(
        &mut self,
        id: impl Into<String>,
        tail: usize,
        head: usize,
    ) -> Result<usize, StaticError> {
        let id = id.into();
        if self.edge_lookup.contains_key(&id) {
            return Err(StaticError::DuplicateEdge(id));
        }
        for v in [tail, head] {
            if v >= self.names.len() {
                return Err(StaticError::UnknownVertex(v));
            }
        }
        self.edge_lookup.insert(id.clone(), self.edges.len());
        self.edges.push(StaticEdge { id, tail, head });
        Ok(self.edges.len() - 1)
    }

    pub fn num_vertices(&self) -> usize {
        self.names.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn vertex_id(&self, name: &str) -> Option<usize> {
        self.lookup.get(name).copied()
    }

    pub fn edge(&self, e: usize) -> &StaticEdge {
        &self.edges[e]
    }

    pub fn edges(&self) -> &[StaticEdge] {
        &self.edges
    }

    pub fn edge_id(&self, id: &str) -> Option<usize> {
        self.edge_lookup.get(id).copied()
    }

    /// Same vertices, only the edges satisfying `keep`.
    pub fn filtered(&self, keep: impl Fn(&StaticEdge) -> bool) -> StaticDigraph {
        let mut d = StaticDigraph {
            names: self.names.clone(),
            lookup: self.lookup.clone(),
            ..Default::default()
        };
        for e in self.edges.iter().filter(|e| keep(e)) {
            d.edge_lookup.insert(e.id.clone(), d.edges.len());
            d.edges.push(e.clone());
        }
        d
    }

    /// Number of edges entering `set` from outside.
    pub fn in_degree_of_set(&self, set: &[bool]) -> usize {
        self.edges
            .iter()
            .filter(|e| set[e.head] && !set[e.tail])
            .count()
    }
}

/// Edge set of one branching together with its roots.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct StaticBranching {
    pub edges: BTreeSet<usize>,
    pub roots: BTreeSet<usize>,
}

/// Maximum number of pairwise edge-disjoint paths from `sources` to `sink`.
pub fn max_flow(
    d: &StaticDigraph,
    sources: &BTreeSet<usize>,
    sink: usize,
) -> Result<usize, StaticError> {
    if sink >= d.num_vertices() {
        return Err(StaticError::UnknownVertex(sink));
    }
    if let Some(&s) = sources.iter().find(|&&s| s >= d.num_vertices()) {
        return Err(StaticError::UnknownVertex(s));
    }
    if sources.contains(&sink) {
        return Err(StaticError::SinkIsSource(d.vertex_name(sink).to_string()));
    }
    let mut mask = vec![false; d.num_vertices()];
    for &s in sources {
        mask[s] = true;
    }
    let removed = vec![false; d.num_edges()];
    Ok(Flow::new(d).run(&mask, sink, usize::MAX, &removed))
}

/// Reusable augmenting-path state. Edges flagged in `removed` do not
/// exist for the purpose of the computation.
struct Flow<'a> {
    d: &'a StaticDigraph,
    out: Vec<Vec<usize>>,
    inc: Vec<Vec<usize>>,
}

impl<'a> Flow<'a> {
    fn new(d: &'a StaticDigraph) -> Self {
        let mut out = vec![Vec::new(); d.num_vertices()];
        let mut inc = vec![Vec::new(); d.num_vertices()];
        for (i, e) in d.edges.iter().enumerate() {
            if e.tail != e.head {
                out[e.tail].push(i);
                inc[e.head].push(i);
            }
        }
        Flow { d, out, inc }
    }

    fn run(&self, sources: &[bool], sink: usize, limit: usize, removed: &[bool]) -> usize {
        let n = self.d.num_vertices();
        let mut used = vec![false; self.d.num_edges()];
        let mut value = 0;
        // parent edge and whether it was traversed backwards
        let mut parent: Vec<Option<(usize, bool)>> = vec![None; n];
        let mut seen = vec![false; n];
        let mut queue = VecDeque::new();
        while value < limit {
            seen.iter_mut().for_each(|s| *s = false);
            parent.iter_mut().for_each(|p| *p = None);
            queue.clear();
            for v in 0..n {
                if sources[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
            'bfs: while let Some(u) = queue.pop_front() {
                for &e in &self.out[u] {
                    let h = self.d.edges[e].head;
                    if !removed[e] && !used[e] && !seen[h] {
                        seen[h] = true;
                        parent[h] = Some((e, false));
                        if h == sink {
                            break 'bfs;
                        }
                        queue.push_back(h);
                    }
                }
                for &e in &self.inc[u] {
                    let t = self.d.edges[e].tail;
                    if used[e] && !seen[t] {
                        seen[t] = true;
                        parent[t] = Some((e, true));
                        queue.push_back(t);
                    }
                }
            }
            if !seen[sink] {
                break;
            }
            let mut v = sink;
            while let Some((e, backwards)) = parent[v] {
                let edge = &self.d.edges[e];
                if backwards {
                    used[e] = false;
                    v = edge.head;
                } else {
                    used[e] = true;
                    v = edge.tail;
                }
            }
            value += 1;
        }
        value
    }

    /// Edmonds' condition for the given root masks on the digraph without
    /// the removed edges.
    fn feasible(&self, roots: &[Vec<bool>], removed: &[bool]) -> bool {
        let n = self.d.num_vertices();
        let k = roots.len();
        let mut union = vec![false; n];
        for subset in 1u32..(1u32 << k) {
            union.iter_mut().for_each(|x| *x = false);
            let need = subset.count_ones() as usize;
            for (i, r) in roots.iter().enumerate() {
                if subset & (1 << i) != 0 {
                    for v in 0..n {
                        union[v] |= r[v];
                    }
                }
            }
            for v in 0..n {
                if !union[v] && self.run(&union, v, need, removed) < need {
                    return false;
                }
            }
        }
        true
    }
}

fn root_masks(d: &StaticDigraph, roots: &[BTreeSet<usize>]) -> Result<Vec<Vec<bool>>, StaticError> {
    if roots.is_empty() {
        return Err(StaticError::NoRootSets);
    }
    roots
        .iter()
        .enumerate()
        .map(|(i, r)| {
            if r.is_empty() {
                return Err(StaticError::EmptyRootSet(i));
            }
            let mut mask = vec![false; d.num_vertices()];
            for &v in r {
                if v >= d.num_vertices() {
                    return Err(StaticError::UnknownVertex(v));
                }
                mask[v] = true;
            }
            Ok(mask)
        })
        .collect()
}

/// Whether `d` has `k = roots.len()` edge-disjoint spanning branchings,
/// branching `i` rooted at `roots[i]`.
///
/// Checks `max_flow(R_I, v) >= |I|` for every nonempty `I` and every
/// `v` outside `R_I`, which is equivalent to the cut condition.
pub fn edmonds_feasible(d: &StaticDigraph, roots: &[BTreeSet<usize>]) -> Result<bool, StaticError> {
    let masks = root_masks(d, roots)?;
    Ok(Flow::new(d).feasible(&masks, &vec![false; d.num_edges()]))
}

/// Builds the branchings whose existence [`edmonds_feasible`] decides, or
/// `None` if they do not exist.
///
/// Branchings are grown one at a time. The next edge is the first, in
/// (tail name, head name, edge id) order, that leaves the covered set and
/// whose removal keeps the remaining instance feasible.
pub fn edmonds_construct(
    d: &StaticDigraph,
    roots: &[BTreeSet<usize>],
) -> Result<Option<Vec<StaticBranching>>, StaticError> {
    let masks = root_masks(d, roots)?;
    let flow = Flow::new(d);
    let mut removed = vec![false; d.num_edges()];
    if !flow.feasible(&masks, &removed) {
        return Ok(None);
    }
    let n = d.num_vertices();
    let mut order: Vec<usize> = (0..d.num_edges())
        .filter(|&e| d.edges[e].tail != d.edges[e].head)
        .collect();
    order.sort_by(|&a, &b| {
        let (ea, eb) = (&d.edges[a], &d.edges[b]);
        (&d.names[ea.tail], &d.names[ea.head], &ea.id).cmp(&(
            &d.names[eb.tail],
            &d.names[eb.head],
            &eb.id,
        ))
    });
    let mut out = Vec::with_capacity(masks.len());
    for i in 0..masks.len() {
        let mut covered = masks[i].clone();
        let mut count = covered.iter().filter(|&&c| c).count();
        let mut branching = StaticBranching {
            edges: BTreeSet::new(),
            roots: roots[i].clone(),
        };
        while count < n {
            let mut state: Vec<Vec<bool>> = Vec::with_capacity(masks.len() - i);
            state.push(Vec::new());
            state.extend(masks[i + 1..].iter().cloned());
            let picked = order.iter().copied().find(|&e| {
                let edge = &d.edges[e];
                if removed[e] || !covered[edge.tail] || covered[edge.head] {
                    return false;
                }
                let mut grown = covered.clone();
                grown[edge.head] = true;
                state[0] = grown;
                removed[e] = true;
                let ok = flow.feasible(&state, &removed);
                removed[e] = false;
                ok
            });
            let e = picked.expect("a feasible state always admits a growing edge");
            removed[e] = true;
            covered[d.edges[e].head] = true;
            count += 1;
            branching.edges.insert(e);
        }
        out.push(branching);
    }
    Ok(Some(out))
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StaticDefect {
    #[error("{branchings} branchings for {root_sets} root sets")]
    CountMismatch { branchings: usize, root_sets: usize },
    #[error("branching {0}: root set differs from the requested one")]
    RootMismatch(usize),
    #[error("branching {0}: edge index {1} out of range")]
    UnknownEdge(usize, usize),
    #[error("branching {branching}: root `{vertex}` has an incoming edge")]
    RootEntered { branching: usize, vertex: String },
    #[error("branching {branching}: vertex `{vertex}` has in-degree {in_degree}")]
    InDegree {
        branching: usize,
        vertex: String,
        in_degree: usize,
    },
    #[error("branching {branching}: vertex `{vertex}` lies on a cycle")]
    Cycle { branching: usize, vertex: String },
    #[error("edge `{edge}` used by branchings {first} and {second}")]
    Shared {
        edge: String,
        first: usize,
        second: usize,
    },
}

/// Checks that `branchings` are pairwise edge-disjoint spanning branchings
/// of `d` rooted at `roots`.
pub fn verify_static(
    d: &StaticDigraph,
    branchings: &[StaticBranching],
    roots: &[BTreeSet<usize>],
) -> Result<(), StaticDefect> {
    if branchings.len() != roots.len() {
        return Err(StaticDefect::CountMismatch {
            branchings: branchings.len(),
            root_sets: roots.len(),
        });
    }
    let n = d.num_vertices();
    let mut owner: Vec<Option<usize>> = vec![None; d.num_edges()];
    for (i, b) in branchings.iter().enumerate() {
        if b.roots != roots[i] {
            return Err(StaticDefect::RootMismatch(i));
        }
        let mut parent: Vec<Option<usize>> = vec![None; n];
        let mut in_degree = vec![0usize; n];
        for &e in &b.edges {
            if e >= d.num_edges() {
                return Err(StaticDefect::UnknownEdge(i, e));
            }
            if let Some(j) = owner[e] {
                return Err(StaticDefect::Shared {
                    edge: d.edges[e].id.clone(),
                    first: j,
                    second: i,
                });
            }
            owner[e] = Some(i);
            let h = d.edges[e].head;
            in_degree[h] += 1;
            parent[h] = Some(d.edges[e].tail);
        }
        for v in 0..n {
            let is_root = b.roots.contains(&v);
            if is_root && in_degree[v] > 0 {
                return Err(StaticDefect::RootEntered {
                    branching: i,
                    vertex: d.names[v].clone(),
                });
            }
            if !is_root && in_degree[v] != 1 {
                return Err(StaticDefect::InDegree {
                    branching: i,
                    vertex: d.names[v].clone(),
                    in_degree: in_degree[v],
                });
            }
        }
        // Every vertex has one parent, so reaching a root within n steps
        // is the same as being reachable from the roots.
        for v in 0..n {
            let mut x = v;
            let mut steps = 0;
            while let Some(p) = parent[x] {
                x = p;
                steps += 1;
                if steps > n {
                    return Err(StaticDefect::Cycle {
                        branching: i,
                        vertex: d.names[v].clone(),
                    });
                }
            }
        }
    }
    Ok(())
}
