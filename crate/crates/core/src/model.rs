//! Temporal digraphs, their temporal vertices and edges, snapshots and the
//! time-expanded digraph.
//!
//! A [`TemporalDigraph`] is a base multi-digraph together with an activity
//! set per vertex (`gamma`) and a set of `(departure, arrival)` pairs per edge
//! (`lambda`). Vertices and edges are addressed by dense indices; the string
//! identifiers are kept for diagnostics and serialization.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::static_branchings::StaticDigraph;

/// Discrete timestamp.
pub type Time = u32;

/// Appearance `(v, t)` of a vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TemporalVertex {
    pub vertex: usize,
    pub time: Time,
}

impl TemporalVertex {
    pub fn new(vertex: usize, time: Time) -> Self {
        TemporalVertex { vertex, time }
    }
}

/// Appearance `(u, departure)(v, arrival)` of an edge `uv`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TemporalEdge {
    pub edge: usize,
    pub departure: Time,
    pub arrival: Time,
}

/// Set of root temporal vertices of one branching.
pub type RootSet = BTreeSet<TemporalVertex>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub name: String,
    pub tail: usize,
    pub head: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Spanning {
    Temporal,
    Vertex,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Disjointness {
    Edge,
    TEdge,
}

/// One cell of the variant matrix: which spanning notion and which
/// disjointness notion the branchings must satisfy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ProblemVariant {
    pub spanning: Spanning,
    pub disjointness: Disjointness,
}

impl ProblemVariant {
    pub const ALL: [ProblemVariant; 4] = [
        ProblemVariant::new(Spanning::Temporal, Disjointness::TEdge),
        ProblemVariant::new(Spanning::Temporal, Disjointness::Edge),
        ProblemVariant::new(Spanning::Vertex, Disjointness::TEdge),
        ProblemVariant::new(Spanning::Vertex, Disjointness::Edge),
    ];

    pub const fn new(spanning: Spanning, disjointness: Disjointness) -> Self {
        ProblemVariant {
            spanning,
            disjointness,
        }
    }
}

impl fmt::Display for Spanning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Spanning::Temporal => "temporal",
            Spanning::Vertex => "vertex",
        })
    }
}

impl fmt::Display for Disjointness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Disjointness::Edge => "edge",
            Disjointness::TEdge => "t-edge",
        })
    }
}

impl fmt::Display for ProblemVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}-disjoint {}-spanning",
            self.disjointness, self.spanning
        )
    }
}

impl std::str::FromStr for Spanning {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "temporal" => Ok(Spanning::Temporal),
            "vertex" => Ok(Spanning::Vertex),
            other => Err(format!("unknown spanning mode `{other}`")),
        }
    }
}

impl std::str::FromStr for Disjointness {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "edge" => Ok(Disjointness::Edge),
            "t-edge" => Ok(Disjointness::TEdge),
            other => Err(format!("unknown disjointness mode `{other}`")),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),
    #[error("duplicate edge `{0}`")]
    DuplicateEdge(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("invalid temporal digraph: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("root ({vertex}, {time}) is not a temporal vertex")]
    RootNotTemporalVertex { vertex: String, time: Time },
}

fn join_violations(v: &[Violation]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

/// A broken invariant of a [`TemporalDigraph`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// `(t, t')` with `t > t'`.
    PairOrder {
        edge: String,
        departure: Time,
        arrival: Time,
    },
    TailInactive {
        edge: String,
        vertex: String,
        time: Time,
    },
    HeadInactive {
        edge: String,
        vertex: String,
        time: Time,
    },
    /// Vertices exist but none is ever active, so the lifetime is undefined.
    NoLifetime,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::PairOrder {
                edge,
                departure,
                arrival,
            } => write!(
                f,
                "edge `{edge}`: departure {departure} after arrival {arrival}"
            ),
            Violation::TailInactive { edge, vertex, time } => write!(
                f,
                "edge `{edge}`: tail `{vertex}` not active at departure {time}"
            ),
            Violation::HeadInactive { edge, vertex, time } => write!(
                f,
                "edge `{edge}`: head `{vertex}` not active at arrival {time}"
            ),
            Violation::NoLifetime => f.write_str("no vertex is ever active"),
        }
    }
}

/// The triple `(G, gamma, lambda)`.
#[derive(Clone, Debug, Default)]
pub struct TemporalDigraph {
    vertex_names: Vec<String>,
    vertex_lookup: HashMap<String, usize>,
    edges: Vec<Edge>,
    edge_lookup: HashMap<String, usize>,
    gamma: Vec<BTreeSet<Time>>,
    lambda: Vec<BTreeSet<(Time, Time)>>,
}

impl PartialEq for TemporalDigraph {
    fn eq(&self, other: &Self) -> bool {
        self.vertex_names == other.vertex_names
            && self.edges == other.edges
            && self.gamma == other.gamma
            && self.lambda == other.lambda
    }
}

impl Eq for TemporalDigraph {}

impl TemporalDigraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, name: impl Into<String>) -> Result<usize, ModelError> {
        let name = name.into();
        if self.vertex_lookup.contains_key(&name) {
            return Err(ModelError::DuplicateVertex(name));
        }
        let id = self.vertex_names.len();
        self.vertex_lookup.insert(name.clone(), id);
        self.vertex_names.push(name);
        self.gamma.push(BTreeSet::new());
        Ok(id)
    }

    pub fn add_edge(
        &mut self,
        name: impl Into<String>,
        tail: usize,
        head: usize,
    ) -> Result<usize, ModelError> {
        let name = name.into();
        if self.edge_lookup.contains_key(&name) {
            return Err(ModelError::DuplicateEdge(name));
        }
        for v in [tail, head] {
            if v >= self.vertex_names.len() {
                return Err(ModelError::UnknownVertex(format!("#{v}")));
            }
        }
        let id = self.edges.len();
        self.edge_lookup.insert(name.clone(), id);
        self.edges.push(Edge { name, tail, head });
        self.lambda.push(BTreeSet::new());
        Ok(id)
    }

    /// Adds `t` to `gamma(vertex)`.
    pub fn activate(&mut self, vertex: usize, time: Time) {
        self.gamma[vertex].insert(time);
    }

    pub fn activate_range(&mut self, vertex: usize, times: impl IntoIterator<Item = Time>) {
        self.gamma[vertex].extend(times);
    }

    /// Adds `(departure, arrival)` to `lambda(edge)`. Consistency with gamma
    /// is checked by [`TemporalDigraph::validate`], not here.
    pub fn add_temporal_edge(&mut self, edge: usize, departure: Time, arrival: Time) {
        self.lambda[edge].insert((departure, arrival));
    }

    pub fn num_vertices(&self) -> usize {
        self.vertex_names.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_name(&self, v: usize) -> &str {
        &self.vertex_names[v]
    }

    pub fn vertex_id(&self, name: &str) -> Option<usize> {
        self.vertex_lookup.get(name).copied()
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_id(&self, name: &str) -> Option<usize> {
        self.edge_lookup.get(name).copied()
    }

    pub fn gamma(&self, v: usize) -> &BTreeSet<Time> {
        &self.gamma[v]
    }

    pub fn lambda(&self, e: usize) -> &BTreeSet<(Time, Time)> {
        &self.lambda[e]
    }

    pub fn is_active(&self, v: usize, t: Time) -> bool {
        self.gamma[v].contains(&t)
    }

    /// Maximum timestamp at which any vertex is active.
    pub fn lifetime(&self) -> Option<Time> {
        self.gamma.iter().filter_map(|g| g.last().copied()).max()
    }

    /// `V_T`, ordered by (vertex, time).
    pub fn temporal_vertices(&self) -> impl Iterator<Item = TemporalVertex> + '_ {
        self.gamma
            .iter()
            .enumerate()
            .flat_map(|(v, ts)| ts.iter().map(move |&t| TemporalVertex::new(v, t)))
    }

    /// `E_T`, ordered by (edge, departure, arrival).
    pub fn temporal_edges(&self) -> impl Iterator<Item = TemporalEdge> + '_ {
        self.lambda.iter().enumerate().flat_map(|(e, pairs)| {
            pairs.iter().map(move |&(d, a)| TemporalEdge {
                edge: e,
                departure: d,
                arrival: a,
            })
        })
    }

    pub fn num_temporal_vertices(&self) -> usize {
        self.gamma.iter().map(BTreeSet::len).sum()
    }

    pub fn num_temporal_edges(&self) -> usize {
        self.lambda.iter().map(BTreeSet::len).sum()
    }

    /// Every invariant violation; empty iff the digraph is valid.
    ///
    /// A digraph without vertices is accepted as the (vacuous) empty
    /// instance.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (e, edge) in self.edges.iter().enumerate() {
            for &(d, a) in &self.lambda[e] {
                if d > a {
                    out.push(Violation::PairOrder {
                        edge: edge.name.clone(),
                        departure: d,
                        arrival: a,
                    });
                }
                if !self.is_active(edge.tail, d) {
                    out.push(Violation::TailInactive {
                        edge: edge.name.clone(),
                        vertex: self.vertex_names[edge.tail].clone(),
                        time: d,
                    });
                }
                if !self.is_active(edge.head, a) {
                    out.push(Violation::HeadInactive {
                        edge: edge.name.clone(),
                        vertex: self.vertex_names[edge.head].clone(),
                        time: a,
                    });
                }
            }
        }
        if !self.vertex_names.is_empty() && self.lifetime().is_none() {
            out.push(Violation::NoLifetime);
        }
        out
    }

    pub fn ensure_valid(&self) -> Result<(), ModelError> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(ModelError::Invalid(v))
        }
    }

    /// Checks that every root is a temporal vertex of this digraph.
    pub fn ensure_roots(&self, roots: &[RootSet]) -> Result<(), ModelError> {
        for r in roots.iter().flatten() {
            if r.vertex >= self.num_vertices() || !self.is_active(r.vertex, r.time) {
                return Err(ModelError::RootNotTemporalVertex {
                    vertex: self
                        .vertex_names
                        .get(r.vertex)
                        .cloned()
                        .unwrap_or_else(|| format!("#{}", r.vertex)),
                    time: r.time,
                });
            }
        }
        Ok(())
    }

    /// First vertex whose activity set is not a single interval of
    /// consecutive integers (the empty set counts as an interval).
    pub fn first_non_interval_vertex(&self) -> Option<usize> {
        self.gamma.iter().position(|g| match (g.first(), g.last()) {
            (Some(&lo), Some(&hi)) => (hi - lo) as usize + 1 != g.len(),
            _ => false,
        })
    }

    /// `(v, t)` is the first time of a maximal run of consecutive activity.
    pub fn is_run_start(&self, v: TemporalVertex) -> bool {
        v.time == 0 || !self.is_active(v.vertex, v.time - 1)
    }

    /// Static digraph of vertices active at `t` and edges with `(t, t)` in
    /// lambda.
    pub fn snapshot(&self, t: Time) -> StaticDigraph {
        let mut d = StaticDigraph::new();
        let mut map = HashMap::new();
        for v in 0..self.num_vertices() {
            if self.is_active(v, t) {
                let id = d
                    .add_vertex(self.vertex_names[v].clone())
                    .expect("vertex names are unique");
                map.insert(v, id);
            }
        }
        for (e, edge) in self.edges.iter().enumerate() {
            if self.lambda[e].contains(&(t, t)) {
                d.add_edge(edge.name.clone(), map[&edge.tail], map[&edge.head])
                    .expect("edge names are unique");
            }
        }
        d
    }

    /// `G_j = (V_j, E_j)`: edges with some copy arriving at `j`, on the
    /// vertices active at `j` together with the endpoints of those edges.
    ///
    /// Returns the digraph and, for each of its vertices, the index of the
    /// corresponding vertex of `self`.
    pub fn arrival_graph(&self, j: Time) -> (StaticDigraph, Vec<usize>) {
        let arriving: Vec<usize> = (0..self.num_edges())
            .filter(|&e| self.lambda[e].iter().any(|&(_, a)| a == j))
            .collect();
        let mut in_vj = vec![false; self.num_vertices()];
        for (v, flag) in in_vj.iter_mut().enumerate() {
            *flag = self.is_active(v, j);
        }
        for &e in &arriving {
            in_vj[self.edges[e].tail] = true;
            in_vj[self.edges[e].head] = true;
        }
        let mut d = StaticDigraph::new();
        let mut local = vec![usize::MAX; self.num_vertices()];
        let mut back = Vec::new();
        for v in (0..self.num_vertices()).filter(|&v| in_vj[v]) {
            local[v] = d
                .add_vertex(self.vertex_names[v].clone())
                .expect("vertex names are unique");
            back.push(v);
        }
        for e in arriving {
            let edge = &self.edges[e];
            d.add_edge(edge.name.clone(), local[edge.tail], local[edge.head])
                .expect("edge names are unique");
        }
        (d, back)
    }

    /// Display helper for a temporal vertex.
    pub fn show(&self, v: TemporalVertex) -> String {
        format!("({}, {})", self.vertex_names[v.vertex], v.time)
    }
}

/// Arc of the expanded digraph that stems from a temporal edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TemporalArc {
    pub edge: TemporalEdge,
    pub tail: usize,
    pub head: usize,
}

/// Waiting arc `(v, t) -> (v, t + 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WaitingArc {
    pub tail: usize,
    pub head: usize,
}

/// The `(gamma, lambda)`-digraph `G_T = (V_T, E_T)`, optionally with a
/// number of parallel waiting arcs between consecutive appearances of the
/// same vertex.
#[derive(Clone, Debug)]
pub struct ExpandedDigraph {
    nodes: Vec<TemporalVertex>,
    node_lookup: HashMap<TemporalVertex, usize>,
    temporal_arcs: Vec<TemporalArc>,
    waiting_arcs: Vec<WaitingArc>,
    waiting_multiplicity: usize,
    wait_pred: Vec<Option<usize>>,
    arcs_into: Vec<Vec<usize>>,
}

/// Static arc of [`ExpandedDigraph::to_static`], mapped back.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArcRef {
    Temporal(usize),
    Waiting { arc: usize, copy: usize },
}

/// Builds the expanded digraph of `g` with `waiting_multiplicity` copies of
/// every waiting arc (0 yields `G_T` itself).
pub fn expand(
    g: &TemporalDigraph,
    waiting_multiplicity: usize,
) -> Result<ExpandedDigraph, ModelError> {
    g.ensure_valid()?;
    Ok(ExpandedDigraph::build(g, waiting_multiplicity))
}

impl ExpandedDigraph {
    /// Same as [`expand`] without validation; callers guarantee validity.
    pub(crate) fn build(g: &TemporalDigraph, waiting_multiplicity: usize) -> Self {
        let nodes: Vec<TemporalVertex> = g.temporal_vertices().collect();
        let node_lookup: HashMap<TemporalVertex, usize> =
            nodes.iter().enumerate().map(|(i, &n)| (n, i)).collect();
        let mut temporal: Vec<TemporalArc> = g
            .temporal_edges()
            .map(|te| {
                let edge = g.edge(te.edge);
                TemporalArc {
                    edge: te,
                    tail: node_lookup[&TemporalVertex::new(edge.tail, te.departure)],
                    head: node_lookup[&TemporalVertex::new(edge.head, te.arrival)],
                }
            })
            .collect();
        // Arrival-time order; ties by edge name, then departure.
        temporal.sort_by(|a, b| {
            (
                a.edge.arrival,
                g.edge(a.edge.edge).name.as_str(),
                a.edge.departure,
            )
                .cmp(&(
                    b.edge.arrival,
                    g.edge(b.edge.edge).name.as_str(),
                    b.edge.departure,
                ))
        });
        let mut wait_pred = vec![None; nodes.len()];
        let mut waiting = Vec::new();
        for (i, n) in nodes.iter().enumerate() {
            if n.time > 0 {
                if let Some(&p) = node_lookup.get(&TemporalVertex::new(n.vertex, n.time - 1)) {
                    wait_pred[i] = Some(p);
                    waiting.push(WaitingArc { tail: p, head: i });
                }
            }
        }
        let mut arcs_into = vec![Vec::new(); nodes.len()];
        for (i, a) in temporal.iter().enumerate() {
            arcs_into[a.head].push(i);
        }
        ExpandedDigraph {
            nodes,
            node_lookup,
            temporal_arcs: temporal,
            waiting_arcs: waiting,
            waiting_multiplicity,
            wait_pred,
            arcs_into,
        }
    }

    pub fn nodes(&self) -> &[TemporalVertex] {
        &self.nodes
    }

    pub fn node_index(&self, v: TemporalVertex) -> Option<usize> {
        self.node_lookup.get(&v).copied()
    }

    /// Temporal arcs, sorted by (arrival, edge name, departure).
    pub fn temporal_arcs(&self) -> &[TemporalArc] {
        &self.temporal_arcs
    }

    /// Distinct waiting arcs; each stands for `waiting_multiplicity` copies.
    pub fn waiting_arcs(&self) -> &[WaitingArc] {
        &self.waiting_arcs
    }

    pub fn waiting_multiplicity(&self) -> usize {
        self.waiting_multiplicity
    }

    pub fn num_arcs(&self) -> usize {
        self.temporal_arcs.len() + self.waiting_arcs.len() * self.waiting_multiplicity
    }

    /// Node `(v, t - 1)` when both it and node `i = (v, t)` exist.
    pub fn wait_pred(&self, i: usize) -> Option<usize> {
        self.wait_pred[i]
    }

    /// Indices of temporal arcs entering node `i`.
    pub fn arcs_into(&self, i: usize) -> &[usize] {
        &self.arcs_into[i]
    }

    pub fn temporal_arc_index(&self, te: TemporalEdge) -> Option<usize> {
        self.temporal_arcs.iter().position(|a| a.edge == te)
    }

    /// Static multi-digraph view. Vertex `i` is node `i`; vertex names are
    /// `v@t`. Returns the arc mapping for every static edge.
    pub fn to_static(&self, g: &TemporalDigraph) -> (StaticDigraph, Vec<ArcRef>) {
        let mut d = StaticDigraph::new();
        for n in &self.nodes {
            d.add_vertex(format!("{}@{}", g.vertex_name(n.vertex), n.time))
                .expect("temporal vertices are unique");
        }
        let mut refs = Vec::with_capacity(self.num_arcs());
        for (i, a) in self.temporal_arcs.iter().enumerate() {
            let name = format!(
                "{}@{}>{}",
                g.edge(a.edge.edge).name,
                a.edge.departure,
                a.edge.arrival
            );
            d.add_edge(name, a.tail, a.head)
                .expect("temporal edges are unique");
            refs.push(ArcRef::Temporal(i));
        }
        for (i, w) in self.waiting_arcs.iter().enumerate() {
            for copy in 0..self.waiting_multiplicity {
                let n = self.nodes[w.tail];
                let name = format!("~wait:{}@{}#{}", g.vertex_name(n.vertex), n.time, copy);
                d.add_edge(name, w.tail, w.head)
                    .expect("waiting arc names are unique");
                refs.push(ArcRef::Waiting { arc: i, copy });
            }
        }
        (d, refs)
    }
}
