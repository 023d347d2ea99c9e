//! Temporal walks inside a branching, walk-multiplicity classification and
//! the verifier for both spanning notions and both disjointness notions.
//!
//! A walk may traverse a temporal edge of the branching or wait at a vertex
//! between two consecutive timestamps that are both active in the
//! branching. Roots are reached by the zero-length walk.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::model::{
    Disjointness, ExpandedDigraph, ProblemVariant, RootSet, Spanning, TemporalDigraph,
    TemporalEdge, TemporalVertex, Time,
};

/// Temporal subdigraph `(G', gamma', lambda')` of a host digraph plus its
/// root set. The host is not stored; operations take it explicitly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TemporalBranching {
    pub gamma: Vec<BTreeSet<Time>>,
    pub lambda: Vec<BTreeSet<(Time, Time)>>,
    pub roots: RootSet,
}

impl TemporalBranching {
    /// No activity and no temporal edges.
    pub fn empty(host: &TemporalDigraph, roots: RootSet) -> Self {
        TemporalBranching {
            gamma: vec![BTreeSet::new(); host.num_vertices()],
            lambda: vec![BTreeSet::new(); host.num_edges()],
            roots,
        }
    }

    /// Full host activity and no temporal edges.
    pub fn with_host_activity(host: &TemporalDigraph, roots: RootSet) -> Self {
        let mut b = Self::empty(host, roots);
        for v in 0..host.num_vertices() {
            b.gamma[v] = host.gamma(v).clone();
        }
        b
    }

    pub fn insert(&mut self, te: TemporalEdge) {
        self.lambda[te.edge].insert((te.departure, te.arrival));
    }

    pub fn temporal_edges(&self) -> impl Iterator<Item = TemporalEdge> + '_ {
        self.lambda.iter().enumerate().flat_map(|(e, pairs)| {
            pairs.iter().map(move |&(d, a)| TemporalEdge {
                edge: e,
                departure: d,
                arrival: a,
            })
        })
    }

    /// Base edges with at least one temporal copy in the branching.
    pub fn base_edges(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.lambda.len()).filter(|&e| !self.lambda[e].is_empty())
    }

    pub fn num_temporal_edges(&self) -> usize {
        self.lambda.iter().map(BTreeSet::len).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum WalkCount {
    Zero,
    One,
    /// At least two walks, possibly infinitely many through a cycle.
    Many,
}

impl WalkCount {
    fn add(self, other: WalkCount) -> WalkCount {
        match (self, other) {
            (WalkCount::Zero, x) | (x, WalkCount::Zero) => x,
            _ => WalkCount::Many,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReachError {
    #[error("branching has {found} activity sets and {found_edges} edge sets, host has {vertices} vertices and {edges} edges")]
    Shape {
        found: usize,
        found_edges: usize,
        vertices: usize,
        edges: usize,
    },
    #[error("({vertex}, {time}) is active in the branching but not in the host")]
    GammaNotSubset { vertex: String, time: Time },
    #[error("temporal edge {edge}@({departure}, {arrival}) is not in the host")]
    LambdaNotSubset {
        edge: String,
        departure: Time,
        arrival: Time,
    },
    #[error(
        "temporal edge {edge}@({departure}, {arrival}) has an endpoint inactive in the branching"
    )]
    EndpointInactive {
        edge: String,
        departure: Time,
        arrival: Time,
    },
    #[error("root ({vertex}, {time}) is not a temporal vertex of the branching")]
    RootOutside { vertex: String, time: Time },
    #[error("({vertex}, {time}) is not a temporal vertex of the branching")]
    TargetOutside { vertex: String, time: Time },
}

/// Why a branching fails to be spanning.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Defect {
    /// No walk from the roots reaches this temporal vertex.
    NoWalk { vertex: String, time: Time },
    /// Two or more walks reach this temporal vertex.
    ManyWalks { vertex: String, time: Time },
    /// A base vertex whose reachable appearances carry a number of root
    /// designations and arc arrivals other than one.
    ArrivalCount { vertex: String, count: usize },
}

impl fmt::Display for Defect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Defect::NoWalk { vertex, time } => {
                write!(f, "no temporal walk reaches ({vertex}, {time})")
            }
            Defect::ManyWalks { vertex, time } => {
                write!(f, "more than one temporal walk reaches ({vertex}, {time})")
            }
            Defect::ArrivalCount { vertex, count } => {
                write!(
                    f,
                    "vertex `{vertex}` is entered {count} times instead of once"
                )
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    Invalid(Defect),
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid)
    }
}

/// First pair of branchings sharing a temporal edge (t-edge) or a base
/// edge (edge).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Conflict {
    pub first: usize,
    pub second: usize,
    pub edge: String,
    /// The shared copy for t-edge conflicts.
    pub copy: Option<(Time, Time)>,
}

impl fmt::Display for Conflict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.copy {
            Some((d, a)) => write!(
                f,
                "branchings {} and {} share temporal edge {}@({d}, {a})",
                self.first, self.second, self.edge
            ),
            None => write!(
                f,
                "branchings {} and {} share edge {}",
                self.first, self.second, self.edge
            ),
        }
    }
}

/// Checks that `b` is a temporal subdigraph of `host` whose roots are
/// temporal vertices of `b`.
pub fn check_subdigraph(host: &TemporalDigraph, b: &TemporalBranching) -> Result<(), ReachError> {
    if b.gamma.len() != host.num_vertices() || b.lambda.len() != host.num_edges() {
        return Err(ReachError::Shape {
            found: b.gamma.len(),
            found_edges: b.lambda.len(),
            vertices: host.num_vertices(),
            edges: host.num_edges(),
        });
    }
    for (v, ts) in b.gamma.iter().enumerate() {
        if let Some(&t) = ts.difference(host.gamma(v)).next() {
            return Err(ReachError::GammaNotSubset {
                vertex: host.vertex_name(v).to_string(),
                time: t,
            });
        }
    }
    for te in b.temporal_edges() {
        let edge = host.edge(te.edge);
        let err = |inactive: bool| {
            let (edge, departure, arrival) = (edge.name.clone(), te.departure, te.arrival);
            if inactive {
                ReachError::EndpointInactive {
                    edge,
                    departure,
                    arrival,
                }
            } else {
                ReachError::LambdaNotSubset {
                    edge,
                    departure,
                    arrival,
                }
            }
        };
        if !host.lambda(te.edge).contains(&(te.departure, te.arrival)) {
            return Err(err(false));
        }
        if !b.gamma[edge.tail].contains(&te.departure) || !b.gamma[edge.head].contains(&te.arrival)
        {
            return Err(err(true));
        }
    }
    for r in &b.roots {
        if r.vertex >= host.num_vertices() || !b.gamma[r.vertex].contains(&r.time) {
            return Err(ReachError::RootOutside {
                vertex: host
                    .vertex_name(r.vertex.min(host.num_vertices().saturating_sub(1)))
                    .to_string(),
                time: r.time,
            });
        }
    }
    Ok(())
}

/// Index-based view of the host's expanded digraph used to evaluate many
/// candidate branchings quickly. Branchings are given as masks over the
/// nodes and temporal arcs of [`Verifier::expanded`].
#[derive(Clone, Debug)]
pub struct Verifier<'a> {
    host: &'a TemporalDigraph,
    h: ExpandedDigraph,
    arc_lookup: HashMap<TemporalEdge, usize>,
}

/// Per-node classification produced by [`Verifier::walk_counts`].
pub type Counts = Vec<WalkCount>;

impl<'a> Verifier<'a> {
    /// `host` must be valid.
    pub fn new(host: &'a TemporalDigraph) -> Self {
        let h = ExpandedDigraph::build(host, 1);
        let arc_lookup = h
            .temporal_arcs()
            .iter()
            .enumerate()
            .map(|(i, a)| (a.edge, i))
            .collect();
        Verifier {
            host,
            h,
            arc_lookup,
        }
    }

    pub fn host(&self) -> &TemporalDigraph {
        self.host
    }

    pub fn expanded(&self) -> &ExpandedDigraph {
        &self.h
    }

    pub fn arc_index(&self, te: TemporalEdge) -> Option<usize> {
        self.arc_lookup.get(&te).copied()
    }

    /// Walk classification of every node. Nodes absent from `present` are
    /// `Zero`. Arcs whose endpoints are not both present are ignored.
    pub fn walk_counts(&self, present: &[bool], arcs: &[bool], roots: &[bool]) -> Counts {
        let n = self.h.nodes().len();
        let ta = self.h.temporal_arcs();
        // successor lists restricted to the branching
        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, a) in ta.iter().enumerate() {
            if arcs[i] && present[a.tail] && present[a.head] {
                succ[a.tail].push(a.head);
            }
        }
        for w in self.h.waiting_arcs() {
            if present[w.tail] && present[w.head] {
                succ[w.tail].push(w.head);
            }
        }
        let mut reached = vec![false; n];
        let mut queue: VecDeque<usize> = (0..n).filter(|&v| roots[v] && present[v]).collect();
        for &r in &queue {
            reached[r] = true;
        }
        while let Some(u) = queue.pop_front() {
            for &v in &succ[u] {
                if !reached[v] {
                    reached[v] = true;
                    queue.push_back(v);
                }
            }
        }
        let mut indeg = vec![0usize; n];
        for u in (0..n).filter(|&u| reached[u]) {
            for &v in &succ[u] {
                indeg[v] += 1;
            }
        }
        let mut counts = vec![WalkCount::Zero; n];
        for v in 0..n {
            if reached[v] && roots[v] {
                counts[v] = WalkCount::One;
            }
        }
        let mut queue: VecDeque<usize> = (0..n).filter(|&v| reached[v] && indeg[v] == 0).collect();
        let mut done = vec![false; n];
        while let Some(u) = queue.pop_front() {
            done[u] = true;
            for &v in &succ[u] {
                counts[v] = counts[v].add(counts[u]);
                indeg[v] -= 1;
                if indeg[v] == 0 {
                    queue.push_back(v);
                }
            }
        }
        // What remains lies on a cycle or below one.
        for v in 0..n {
            if reached[v] && !done[v] {
                counts[v] = WalkCount::Many;
            }
        }
        counts
    }

    /// Spanning check on masks; the defect names a node index.
    pub fn check(
        &self,
        spanning: Spanning,
        present: &[bool],
        arcs: &[bool],
        roots: &[bool],
    ) -> Result<(), MaskDefect> {
        let counts = self.walk_counts(present, arcs, roots);
        match spanning {
            Spanning::Temporal => {
                for (i, &c) in counts.iter().enumerate() {
                    match c {
                        WalkCount::One => {}
                        WalkCount::Zero => return Err(MaskDefect::NoWalk(i)),
                        WalkCount::Many => return Err(MaskDefect::ManyWalks(i)),
                    }
                }
                Ok(())
            }
            Spanning::Vertex => {
                if let Some(i) = counts.iter().position(|&c| c == WalkCount::Many) {
                    return Err(MaskDefect::ManyWalks(i));
                }
                let nodes = self.h.nodes();
                let mut events = vec![0usize; self.host.num_vertices()];
                for i in 0..nodes.len() {
                    if roots[i] && present[i] {
                        events[nodes[i].vertex] += 1;
                    }
                }
                for (i, a) in self.h.temporal_arcs().iter().enumerate() {
                    if arcs[i] && present[a.head] && counts[a.tail] != WalkCount::Zero {
                        events[nodes[a.head].vertex] += 1;
                    }
                }
                match events.iter().position(|&c| c != 1) {
                    Some(v) => Err(MaskDefect::ArrivalCount(v, events[v])),
                    None => Ok(()),
                }
            }
        }
    }

    /// Masks of a branching that already passed [`check_subdigraph`].
    pub fn masks(&self, b: &TemporalBranching) -> (Vec<bool>, Vec<bool>, Vec<bool>) {
        let nodes = self.h.nodes();
        let present = nodes
            .iter()
            .map(|n| b.gamma[n.vertex].contains(&n.time))
            .collect();
        let roots = nodes.iter().map(|n| b.roots.contains(n)).collect();
        let mut arcs = vec![false; self.h.temporal_arcs().len()];
        for te in b.temporal_edges() {
            arcs[self.arc_lookup[&te]] = true;
        }
        (present, arcs, roots)
    }

    pub fn describe(&self, d: MaskDefect) -> Defect {
        let name = |i: usize| {
            let n = self.h.nodes()[i];
            (self.host.vertex_name(n.vertex).to_string(), n.time)
        };
        match d {
            MaskDefect::NoWalk(i) => {
                let (vertex, time) = name(i);
                Defect::NoWalk { vertex, time }
            }
            MaskDefect::ManyWalks(i) => {
                let (vertex, time) = name(i);
                Defect::ManyWalks { vertex, time }
            }
            MaskDefect::ArrivalCount(v, count) => Defect::ArrivalCount {
                vertex: self.host.vertex_name(v).to_string(),
                count,
            },
        }
    }
}

/// [`Defect`] in terms of node indices (or a base vertex for arrival
/// counts).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MaskDefect {
    NoWalk(usize),
    ManyWalks(usize),
    ArrivalCount(usize, usize),
}

/// Temporal vertices of `b` reachable from its roots.
pub fn reachable(
    host: &TemporalDigraph,
    b: &TemporalBranching,
) -> Result<BTreeSet<TemporalVertex>, ReachError> {
    check_subdigraph(host, b)?;
    let ver = Verifier::new(host);
    let (present, arcs, roots) = ver.masks(b);
    let counts = ver.walk_counts(&present, &arcs, &roots);
    Ok(ver
        .expanded()
        .nodes()
        .iter()
        .zip(counts)
        .filter(|(_, c)| *c != WalkCount::Zero)
        .map(|(&n, _)| n)
        .collect())
}

/// Number of walks from the roots of `b` to `target`, capped at `Many`.
pub fn walk_count(
    host: &TemporalDigraph,
    b: &TemporalBranching,
    target: TemporalVertex,
) -> Result<WalkCount, ReachError> {
    check_subdigraph(host, b)?;
    if target.vertex >= host.num_vertices() || !b.gamma[target.vertex].contains(&target.time) {
        return Err(ReachError::TargetOutside {
            vertex: if target.vertex < host.num_vertices() {
                host.vertex_name(target.vertex).to_string()
            } else {
                format!("#{}", target.vertex)
            },
            time: target.time,
        });
    }
    let ver = Verifier::new(host);
    let (present, arcs, roots) = ver.masks(b);
    let i = ver
        .expanded()
        .node_index(target)
        .expect("target is a host temporal vertex");
    Ok(ver.walk_counts(&present, &arcs, &roots)[i])
}

/// Whether `b` is a temporal- or vertex-spanning branching of `host`.
///
/// Temporal mode asks for exactly one walk to every temporal vertex of the
/// host. Vertex mode asks that the reachable part of `b` has unique walks
/// and that every base vertex is entered exactly once, counting root
/// designations and temporal-edge arrivals but not waiting.
pub fn verify_branching(
    host: &TemporalDigraph,
    b: &TemporalBranching,
    spanning: Spanning,
) -> Result<Verdict, ReachError> {
    check_subdigraph(host, b)?;
    let ver = Verifier::new(host);
    let (present, arcs, roots) = ver.masks(b);
    Ok(match ver.check(spanning, &present, &arcs, &roots) {
        Ok(()) => Verdict::Valid,
        Err(d) => Verdict::Invalid(ver.describe(d)),
    })
}

/// First conflict between two branchings, or `None` if they are pairwise
/// disjoint.
pub fn check_disjoint(
    host: &TemporalDigraph,
    bs: &[TemporalBranching],
    disjointness: Disjointness,
) -> Result<Option<Conflict>, ReachError> {
    for b in bs {
        if b.lambda.len() != host.num_edges() || b.gamma.len() != host.num_vertices() {
            return Err(ReachError::Shape {
                found: b.gamma.len(),
                found_edges: b.lambda.len(),
                vertices: host.num_vertices(),
                edges: host.num_edges(),
            });
        }
    }
    for i in 0..bs.len() {
        for j in i + 1..bs.len() {
            for e in 0..host.num_edges() {
                let (a, b) = (&bs[i].lambda[e], &bs[j].lambda[e]);
                let copy = match disjointness {
                    Disjointness::TEdge => a.intersection(b).next().map(|&c| Some(c)),
                    Disjointness::Edge => (!a.is_empty() && !b.is_empty()).then_some(None),
                };
                if let Some(copy) = copy {
                    return Ok(Some(Conflict {
                        first: i,
                        second: j,
                        edge: host.edge(e).name.clone(),
                        copy,
                    }));
                }
            }
        }
    }
    Ok(None)
}

/// Checks a complete solution: one branching per root set, branching `i`
/// rooted at `R_i`, each spanning, pairwise disjoint. The error describes
/// the first problem found.
pub fn verify_solution(
    host: &TemporalDigraph,
    roots: &[RootSet],
    bs: &[TemporalBranching],
    variant: ProblemVariant,
) -> Result<(), String> {
    if bs.len() != roots.len() {
        return Err(format!(
            "{} branchings for {} root sets",
            bs.len(),
            roots.len()
        ));
    }
    for (i, b) in bs.iter().enumerate() {
        if b.roots != roots[i] {
            return Err(format!(
                "branching {} is not rooted at root set {}",
                i + 1,
                i + 1
            ));
        }
        match verify_branching(host, b, variant.spanning) {
            Ok(Verdict::Valid) => {}
            Ok(Verdict::Invalid(d)) => return Err(format!("branching {}: {d}", i + 1)),
            Err(e) => return Err(format!("branching {}: {e}", i + 1)),
        }
    }
    match check_disjoint(host, bs, variant.disjointness) {
        Ok(None) => Ok(()),
        Ok(Some(c)) => Err(c.to_string()),
        Err(e) => Err(e.to_string()),
    }
}
