//! Root normalizations and NP-hardness gadget constructions, with decoders
//! mapping solutions back to the source problem and brute-force solvers for
//! the source problems.
//!
//! * [`to_single_source`] replaces root sets by one common root.
//! * [`lift_roots`] adds a branching that needs no temporal edges.
//! * [`reduce_wdp`] encodes 2 weak disjoint paths into edge-disjoint
//!   temporal-spanning branchings with lifetime 3.
//! * [`reduce_nae3sat_star`] encodes positive NAE 3-SAT into edge-disjoint
//!   temporal-spanning branchings on a star.
//! * [`reduce_nae3sat_vertex`] encodes positive NAE 3-SAT into
//!   vertex-spanning branchings on a lifetime-2 DAG.

use std::collections::{BTreeSet, HashSet};

use thiserror::Error;

use crate::model::{
    Disjointness, ModelError, ProblemVariant, RootSet, Spanning, TemporalDigraph, TemporalEdge,
    TemporalVertex, Time,
};
use crate::reach::{verify_solution, TemporalBranching};
use crate::static_branchings::StaticDigraph;

/// Largest formula [`solve_nae3sat_bruteforce`] accepts.
pub const NAE_LIMIT: usize = 20;
/// Largest digraph [`solve_wdp_bruteforce`] accepts.
pub const WDP_LIMIT: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReductionError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("invalid formula: {0}")]
    Formula(String),
    #[error("invalid WDP instance: {0}")]
    Wdp(String),
    #[error("WDP instance is not normalized: {0}")]
    NotNormalized(String),
    #[error("identifier `{0}` clashes with a gadget identifier")]
    NameClash(String),
    #[error("{what} has size {found}, the enumeration limit is {limit}")]
    ScaleGuard {
        what: &'static str,
        found: usize,
        limit: usize,
    },
    #[error("output was not produced by the {0} reduction")]
    WrongDecoder(&'static str),
    #[error("branchings rejected: {0}")]
    Rejected(String),
}

/// Positive 3-CNF formula. Variables are numbered from 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnfFormula {
    num_vars: usize,
    clauses: Vec<[usize; 3]>,
}

impl CnfFormula {
    pub fn new(num_vars: usize, clauses: Vec<[usize; 3]>) -> Result<Self, ReductionError> {
        for (j, c) in clauses.iter().enumerate() {
            if let Some(&x) = c.iter().find(|&&x| x == 0 || x > num_vars) {
                return Err(ReductionError::Formula(format!(
                    "clause {} uses variable {x} outside 1..={num_vars}",
                    j + 1
                )));
            }
        }
        Ok(CnfFormula { num_vars, clauses })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[[usize; 3]] {
        &self.clauses
    }

    /// Every clause has a true and a false literal. `assignment[i]` is the
    /// value of variable `i + 1`.
    pub fn nae_satisfied(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| {
            let vals = c.map(|x| assignment[x - 1]);
            vals.contains(&true) && vals.contains(&false)
        })
    }
}

/// Digraph with two requests `(s_1, t_1)`, `(s_2, t_2)`.
#[derive(Clone, Debug)]
pub struct WdpInstance {
    pub digraph: StaticDigraph,
    pub requests: Vec<(usize, usize)>,
}

impl WdpInstance {
    pub fn new(
        digraph: StaticDigraph,
        requests: Vec<(usize, usize)>,
    ) -> Result<Self, ReductionError> {
        if requests.len() != 2 {
            return Err(ReductionError::Wdp(format!(
                "expected 2 requests, found {}",
                requests.len()
            )));
        }
        if let Some(&(s, t)) = requests
            .iter()
            .find(|&&(s, t)| s >= digraph.num_vertices() || t >= digraph.num_vertices())
        {
            return Err(ReductionError::Wdp(format!(
                "request ({s}, {t}) out of range"
            )));
        }
        Ok(WdpInstance { digraph, requests })
    }

    /// Sources without in-edges, sinks without out-edges, four distinct
    /// endpoints.
    pub fn normalization_issue(&self) -> Option<String> {
        let d = &self.digraph;
        let w: Vec<usize> = self.requests.iter().flat_map(|&(s, t)| [s, t]).collect();
        if w.iter().collect::<HashSet<_>>().len() != 4 {
            return Some("request endpoints are not pairwise distinct".into());
        }
        for &(s, t) in &self.requests {
            if d.edges().iter().any(|e| e.head == s) {
                return Some(format!(
                    "source `{}` has an incoming edge",
                    d.vertex_name(s)
                ));
            }
            if d.edges().iter().any(|e| e.tail == t) {
                return Some(format!("sink `{}` has an outgoing edge", d.vertex_name(t)));
            }
        }
        None
    }
}

/// Which construction produced a [`ReductionOutput`], with what its
/// decoder needs.
#[derive(Clone, Debug)]
pub enum Decoder {
    SingleSource {
        original: TemporalDigraph,
        roots: Vec<RootSet>,
        shift: Time,
    },
    LiftRoots {
        k: usize,
    },
    Wdp {
        /// Request endpoints, as instance vertices.
        endpoints: [usize; 4],
        /// Instance edge of every edge of the WDP digraph, in order.
        edges: Vec<usize>,
        edge_names: Vec<String>,
    },
    NaeStar {
        num_vars: usize,
    },
    NaeVertex {
        num_vars: usize,
    },
}

#[derive(Clone, Debug)]
pub struct ReductionOutput {
    pub instance: TemporalDigraph,
    pub roots: Vec<RootSet>,
    pub decoder: Decoder,
}

fn fresh(taken: &HashSet<String>, base: &str) -> String {
    let mut name = base.to_string();
    while taken.contains(&name) {
        name.push('\'');
    }
    name
}

/// Replaces the root sets by a single root `(r, 0)` shared by all `k`
/// branchings.
///
/// Every root set gets a vertex `r_i` active at 0 with an edge to each
/// rooted vertex, and `r` has `k` parallel edges to every `r_i`, so that
/// all branchings can span every `(r_i, 0)`. If some vertex is active at 0
/// all times are shifted up by one first.
///
/// The verdict is preserved when every root set has at most one element.
/// With larger root sets a branching may borrow the edges of another
/// root set's `r_i`, so the new instance can be feasible when the original
/// is not.
pub fn to_single_source(
    g: &TemporalDigraph,
    roots: &[RootSet],
) -> Result<ReductionOutput, ReductionError> {
    g.ensure_valid()?;
    g.ensure_roots(roots)?;
    let k = roots.len();
    let shift: Time = Time::from((0..g.num_vertices()).any(|v| g.is_active(v, 0)));
    let mut h = TemporalDigraph::new();
    for v in 0..g.num_vertices() {
        let id = h.add_vertex(g.vertex_name(v))?;
        h.activate_range(id, g.gamma(v).iter().map(|t| t + shift));
    }
    for e in 0..g.num_edges() {
        let edge = g.edge(e);
        let id = h.add_edge(edge.name.clone(), edge.tail, edge.head)?;
        for &(d, a) in g.lambda(e) {
            h.add_temporal_edge(id, d + shift, a + shift);
        }
    }
    let mut vnames: HashSet<String> = (0..g.num_vertices())
        .map(|v| g.vertex_name(v).to_string())
        .collect();
    let mut enames: HashSet<String> = g.edges().iter().map(|e| e.name.clone()).collect();
    let mut add_vertex = |h: &mut TemporalDigraph, base: &str| -> Result<usize, ReductionError> {
        let name = fresh(&vnames, base);
        vnames.insert(name.clone());
        let id = h.add_vertex(name)?;
        h.activate(id, 0);
        Ok(id)
    };
    let r = add_vertex(&mut h, "r")?;
    let mut add_edge = |h: &mut TemporalDigraph, base: String, tail, head| {
        let name = fresh(&enames, &base);
        enames.insert(name.clone());
        h.add_edge(name, tail, head)
    };
    for (i, set) in roots.iter().enumerate() {
        let ri = add_vertex(&mut h, &format!("r_{}", i + 1))?;
        for c in 0..k {
            let e = add_edge(&mut h, format!("r>r_{}:{}", i + 1, c + 1), r, ri)?;
            h.add_temporal_edge(e, 0, 0);
        }
        let vertices: BTreeSet<usize> = set.iter().map(|x| x.vertex).collect();
        for u in vertices {
            let e = add_edge(&mut h, format!("r_{}>{}", i + 1, g.vertex_name(u)), ri, u)?;
            for x in set.iter().filter(|x| x.vertex == u) {
                h.add_temporal_edge(e, 0, x.time + shift);
            }
        }
    }
    Ok(ReductionOutput {
        instance: h,
        roots: vec![RootSet::from([TemporalVertex::new(r, 0)]); k],
        decoder: Decoder::SingleSource {
            original: g.clone(),
            roots: roots.to_vec(),
            shift,
        },
    })
}

/// Maps branchings of a [`to_single_source`] output back to the original
/// instance, reordered so that branching `i` is rooted at `R_i`.
pub fn decode_single_source(
    out: &ReductionOutput,
    branchings: &[TemporalBranching],
) -> Result<Vec<TemporalBranching>, ReductionError> {
    let Decoder::SingleSource {
        original,
        roots,
        shift,
    } = &out.decoder
    else {
        return Err(ReductionError::WrongDecoder("single-source"));
    };
    let n = original.num_vertices();
    let m = original.num_edges();
    let mut slots: Vec<Option<TemporalBranching>> = vec![None; roots.len()];
    for b in branchings {
        // the root set is identified by the r_i whose out-edge is used
        let mut used = BTreeSet::new();
        for e in m..out.instance.num_edges() {
            let edge = out.instance.edge(e);
            if edge.head < n && !b.lambda[e].is_empty() {
                used.insert(edge.tail - n - 1);
            }
        }
        let Some(&i) = used.iter().next().filter(|_| used.len() == 1) else {
            return Err(ReductionError::Rejected(
                "a branching does not leave the root gadget through exactly one root set".into(),
            ));
        };
        if slots[i].is_some() {
            return Err(ReductionError::Rejected(format!(
                "root set {} is used twice",
                i + 1
            )));
        }
        let mut ob = TemporalBranching::empty(original, roots[i].clone());
        for v in 0..n {
            ob.gamma[v] = b.gamma[v].iter().map(|t| t - shift).collect();
        }
        for e in 0..m {
            ob.lambda[e] = b.lambda[e]
                .iter()
                .map(|&(d, a)| (d - shift, a - shift))
                .collect();
        }
        // vertex mode may leave the new vertices' appearances unused
        for x in &roots[i] {
            ob.gamma[x.vertex].insert(x.time);
        }
        slots[i] = Some(ob);
    }
    slots
        .into_iter()
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| ReductionError::Rejected("wrong number of branchings".into()))
}

/// Appends a root set that a branching without temporal edges spans: the
/// first appearance of every run (temporal mode) or of every vertex
/// (vertex mode). For `k >= 1` the verdict is unchanged.
pub fn lift_roots(g: &TemporalDigraph, roots: &[RootSet], spanning: Spanning) -> Vec<RootSet> {
    let extra: RootSet = match spanning {
        Spanning::Temporal => g
            .temporal_vertices()
            .filter(|&x| g.is_run_start(x))
            .collect(),
        Spanning::Vertex => (0..g.num_vertices())
            .filter_map(|v| g.gamma(v).first().map(|&t| TemporalVertex::new(v, t)))
            .collect(),
    };
    let mut out = roots.to_vec();
    out.push(extra);
    out
}

/// [`lift_roots`] packaged as a reduction output.
pub fn lift_roots_output(
    g: &TemporalDigraph,
    roots: &[RootSet],
    spanning: Spanning,
) -> Result<ReductionOutput, ReductionError> {
    g.ensure_valid()?;
    g.ensure_roots(roots)?;
    Ok(ReductionOutput {
        instance: g.clone(),
        roots: lift_roots(g, roots, spanning),
        decoder: Decoder::LiftRoots { k: roots.len() },
    })
}

/// Splices fresh endpoint vertices so that sources have no in-edges, sinks
/// have no out-edges, and the four endpoints are distinct.
pub fn normalize_wdp(w: &WdpInstance) -> Result<WdpInstance, ReductionError> {
    if w.normalization_issue().is_none() {
        return Ok(w.clone());
    }
    let d = &w.digraph;
    let mut out = d.clone();
    let mut vnames: HashSet<String> = (0..d.num_vertices())
        .map(|v| d.vertex_name(v).to_string())
        .collect();
    let mut enames: HashSet<String> = d.edges().iter().map(|e| e.id.clone()).collect();
    let endpoints: Vec<usize> = w.requests.iter().flat_map(|&(s, t)| [s, t]).collect();
    let shared = |x: usize, pos: usize| {
        endpoints
            .iter()
            .enumerate()
            .any(|(p, &y)| p != pos && y == x)
    };
    let mut requests = w.requests.clone();
    for (i, req) in requests.iter_mut().enumerate() {
        let (s, t) = *req;
        if shared(s, 2 * i) || d.edges().iter().any(|e| e.head == s) {
            let name = fresh(&vnames, &format!("{}'", d.vertex_name(s)));
            vnames.insert(name.clone());
            let s2 = out.add_vertex(name.clone()).expect("fresh name");
            let ename = fresh(&enames, &format!("{name}>{}", d.vertex_name(s)));
            enames.insert(ename.clone());
            out.add_edge(ename, s2, s).expect("fresh name");
            req.0 = s2;
        }
        if shared(t, 2 * i + 1) || d.edges().iter().any(|e| e.tail == t) {
            let name = fresh(&vnames, &format!("{}'", d.vertex_name(t)));
            vnames.insert(name.clone());
            let t2 = out.add_vertex(name.clone()).expect("fresh name");
            let ename = fresh(&enames, &format!("{}>{name}", d.vertex_name(t)));
            enames.insert(ename.clone());
            out.add_edge(ename, t, t2).expect("fresh name");
            req.1 = t2;
        }
    }
    WdpInstance::new(out, requests)
}

/// Lifetime-3 instance whose 2 edge-disjoint temporal-spanning branchings
/// correspond to edge-disjoint `s_1`-`t_1` and `s_2`-`t_2` paths.
///
/// Snapshot 1 holds `G - {s_2, t_2}`, a vertex `X` with edges to all of it
/// and edges from `t_1` to everything except `s_1`. Snapshot 3 mirrors it
/// with `Y` and `t_2`. Snapshot 2 is empty.
pub fn reduce_wdp(w: &WdpInstance) -> Result<ReductionOutput, ReductionError> {
    if let Some(issue) = w.normalization_issue() {
        return Err(ReductionError::NotNormalized(issue));
    }
    let d = &w.digraph;
    let [(s1, t1), (s2, t2)] = [w.requests[0], w.requests[1]];
    for name in ["X", "Y"] {
        if d.vertex_id(name).is_some() {
            return Err(ReductionError::NameClash(name.into()));
        }
    }
    let mut g = TemporalDigraph::new();
    for v in 0..d.num_vertices() {
        g.add_vertex(d.vertex_name(v))?;
        if v != s2 && v != t2 {
            g.activate(v, 1);
        }
        if v != s1 && v != t1 {
            g.activate(v, 3);
        }
    }
    let x = g.add_vertex("X")?;
    let y = g.add_vertex("Y")?;
    g.activate(x, 1);
    g.activate(y, 3);
    let mut edges = Vec::with_capacity(d.num_edges());
    for e in d.edges() {
        let id = g.add_edge(e.id.clone(), e.tail, e.head)?;
        for (t, gone) in [(1, [s2, t2]), (3, [s1, t1])] {
            if !gone.contains(&e.tail) && !gone.contains(&e.head) {
                g.add_temporal_edge(id, t, t);
            }
        }
        edges.push(id);
    }
    let clash = |e: ModelError| match e {
        ModelError::DuplicateEdge(n) => ReductionError::NameClash(n),
        other => other.into(),
    };
    for (hub, t, gone) in [(x, 1, [s2, t2]), (y, 3, [s1, t1])] {
        for v in (0..d.num_vertices()).filter(|v| !gone.contains(v)) {
            let e = g
                .add_edge(
                    format!("{}>{}", g.vertex_name(hub), d.vertex_name(v)),
                    hub,
                    v,
                )
                .map_err(clash)?;
            g.add_temporal_edge(e, t, t);
        }
    }
    for (sink, t, hub, gone) in [(t1, 1, x, [s1, s2, t2]), (t2, 3, y, [s2, s1, t1])] {
        for v in (0..d.num_vertices()).chain([hub]) {
            if gone.contains(&v) || v == sink {
                continue;
            }
            let e = g
                .add_edge(
                    format!("{}>{}", g.vertex_name(sink), g.vertex_name(v)),
                    sink,
                    v,
                )
                .map_err(clash)?;
            g.add_temporal_edge(e, t, t);
        }
    }
    let roots = vec![
        RootSet::from([TemporalVertex::new(s1, 1), TemporalVertex::new(y, 3)]),
        RootSet::from([TemporalVertex::new(s2, 3), TemporalVertex::new(x, 1)]),
    ];
    Ok(ReductionOutput {
        instance: g,
        roots,
        decoder: Decoder::Wdp {
            endpoints: [s1, t1, s2, t2],
            edges,
            edge_names: d.edges().iter().map(|e| e.id.clone()).collect(),
        },
    })
}

/// Two edge-disjoint paths, as edge indices of the WDP digraph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WdpPaths {
    pub first: Vec<usize>,
    pub second: Vec<usize>,
}

/// Builds the branchings of a [`reduce_wdp`] output from two edge-disjoint
/// simple paths.
pub fn wdp_witness(
    out: &ReductionOutput,
    paths: &WdpPaths,
) -> Result<Vec<TemporalBranching>, ReductionError> {
    let Decoder::Wdp {
        endpoints: [s1, t1, s2, t2],
        edges,
        ..
    } = &out.decoder
    else {
        return Err(ReductionError::WrongDecoder("wdp"));
    };
    let g = &out.instance;
    let (x, y) = (
        g.vertex_id("X").expect("gadget"),
        g.vertex_id("Y").expect("gadget"),
    );
    let original = g.num_vertices() - 2;
    let mut bs = Vec::new();
    for (i, (path, t, sink, far_hub, far_time, gone)) in [
        (&paths.first, 1, *t1, y, 3, [*s2, *t2]),
        (&paths.second, 3, *t2, x, 1, [*s1, *t1]),
    ]
    .into_iter()
    .enumerate()
    {
        let mut b = TemporalBranching::with_host_activity(g, out.roots[i].clone());
        let mut on_path = BTreeSet::new();
        for &e in path {
            let id = edges[e];
            on_path.insert(g.edge(id).head);
            b.insert(TemporalEdge {
                edge: id,
                departure: t,
                arrival: t,
            });
        }
        let hub_edge = |h: usize, v: usize| {
            g.edge_id(&format!("{}>{}", g.vertex_name(h), g.vertex_name(v)))
                .expect("gadget edge")
        };
        // the other snapshot hangs off the other hub
        for v in (0..original).filter(|v| g.is_active(*v, far_time)) {
            b.insert(TemporalEdge {
                edge: hub_edge(far_hub, v),
                departure: far_time,
                arrival: far_time,
            });
        }
        let near_hub = if i == 0 { x } else { y };
        for v in (0..original).chain([near_hub]) {
            let start = out.roots[i].iter().any(|r| r.vertex == v && r.time == t);
            if g.is_active(v, t)
                && !on_path.contains(&v)
                && !start
                && !gone.contains(&v)
                && v != sink
            {
                b.insert(TemporalEdge {
                    edge: hub_edge(sink, v),
                    departure: t,
                    arrival: t,
                });
            }
        }
        bs.push(b);
    }
    Ok(bs)
}

/// Extracts the `s_1`-`t_1` path from snapshot 1 of branching 1 and the
/// `s_2`-`t_2` path from snapshot 3 of branching 2.
pub fn decode_paths(
    out: &ReductionOutput,
    branchings: &[TemporalBranching],
) -> Result<WdpPaths, ReductionError> {
    let Decoder::Wdp {
        endpoints: [s1, t1, s2, t2],
        edges,
        ..
    } = &out.decoder
    else {
        return Err(ReductionError::WrongDecoder("wdp"));
    };
    let variant = ProblemVariant::new(Spanning::Temporal, Disjointness::Edge);
    check_solution(&out.instance, &out.roots, branchings, variant)?;
    let g = &out.instance;
    let back = |b: &TemporalBranching,
                s: usize,
                t: usize,
                time: Time|
     -> Result<Vec<usize>, ReductionError> {
        let mut path = Vec::new();
        let mut at = t;
        while at != s {
            let (pos, _) = edges
                .iter()
                .enumerate()
                .find(|&(_, &e)| g.edge(e).head == at && b.lambda[e].contains(&(time, time)))
                .ok_or_else(|| {
                    ReductionError::Rejected(format!(
                        "no path edge enters `{}` at {time}",
                        g.vertex_name(at)
                    ))
                })?;
            path.push(pos);
            at = g.edge(edges[pos]).tail;
            if path.len() > edges.len() {
                return Err(ReductionError::Rejected("path does not end".into()));
            }
        }
        path.reverse();
        Ok(path)
    };
    Ok(WdpPaths {
        first: back(&branchings[0], *s1, *t1, 1)?,
        second: back(&branchings[1], *s2, *t2, 3)?,
    })
}

fn check_solution(
    g: &TemporalDigraph,
    roots: &[RootSet],
    bs: &[TemporalBranching],
    variant: ProblemVariant,
) -> Result<(), ReductionError> {
    verify_solution(g, roots, bs, variant).map_err(ReductionError::Rejected)
}

fn var_name(i: usize) -> String {
    format!("x_{i}")
}

/// Star into `T`. Variable `x_i` owns snapshot `2i - 1` with edges from
/// `x_i` and `xbar_i`; clause `c_j` owns snapshot `2(n + j) - 1` with edges
/// from its literals. Both root sets are all non-`T` appearances.
pub fn reduce_nae3sat_star(phi: &CnfFormula) -> ReductionOutput {
    let n = phi.num_vars();
    let mut g = TemporalDigraph::new();
    let center = g.add_vertex("T").expect("fresh");
    let mut pos = Vec::with_capacity(n);
    let mut neg = Vec::with_capacity(n);
    for i in 1..=n {
        pos.push(g.add_vertex(var_name(i)).expect("fresh"));
        neg.push(g.add_vertex(format!("xbar_{i}")).expect("fresh"));
    }
    let pos_edges: Vec<usize> = (1..=n)
        .map(|i| {
            g.add_edge(format!("x_{i}>T"), pos[i - 1], center)
                .expect("fresh")
        })
        .collect();
    let neg_edges: Vec<usize> = (1..=n)
        .map(|i| {
            g.add_edge(format!("xbar_{i}>T"), neg[i - 1], center)
                .expect("fresh")
        })
        .collect();
    let mut roots = RootSet::new();
    for i in 1..=n {
        let t = (2 * i - 1) as Time;
        for (v, e) in [
            (pos[i - 1], pos_edges[i - 1]),
            (neg[i - 1], neg_edges[i - 1]),
        ] {
            g.activate(v, t);
            g.add_temporal_edge(e, t, t);
            roots.insert(TemporalVertex::new(v, t));
        }
        g.activate(center, t);
    }
    for (j, c) in phi.clauses().iter().enumerate() {
        let t = (2 * (n + j + 1) - 1) as Time;
        g.activate(center, t);
        for &x in c {
            g.activate(pos[x - 1], t);
            g.add_temporal_edge(pos_edges[x - 1], t, t);
            roots.insert(TemporalVertex::new(pos[x - 1], t));
        }
    }
    ReductionOutput {
        instance: g,
        roots: vec![roots.clone(), roots],
        decoder: Decoder::NaeStar { num_vars: n },
    }
}

/// Branchings of a [`reduce_nae3sat_star`] output for a NAE assignment.
pub fn nae_star_witness(
    phi: &CnfFormula,
    out: &ReductionOutput,
    assignment: &[bool],
) -> Vec<TemporalBranching> {
    let g = &out.instance;
    let n = phi.num_vars();
    let mut bs: Vec<TemporalBranching> = out
        .roots
        .iter()
        .map(|r| TemporalBranching::with_host_activity(g, r.clone()))
        .collect();
    let edge = |name: String| g.edge_id(&name).expect("gadget edge");
    for i in 1..=n {
        let t = (2 * i - 1) as Time;
        let (a, b) = if assignment[i - 1] { (0, 1) } else { (1, 0) };
        bs[a].insert(TemporalEdge {
            edge: edge(format!("x_{i}>T")),
            departure: t,
            arrival: t,
        });
        bs[b].insert(TemporalEdge {
            edge: edge(format!("xbar_{i}>T")),
            departure: t,
            arrival: t,
        });
    }
    for (j, c) in phi.clauses().iter().enumerate() {
        let t = (2 * (n + j + 1) - 1) as Time;
        for (branch, value) in [(0, true), (1, false)] {
            if let Some(&x) = c.iter().find(|&&x| assignment[x - 1] == value) {
                bs[branch].insert(TemporalEdge {
                    edge: edge(format!("x_{x}>T")),
                    departure: t,
                    arrival: t,
                });
            }
        }
    }
    bs
}

/// Lifetime-2 DAG. Snapshot 1 has the variable gadgets
/// `x_i -> T_i, x_i -> F_i, T_i -> a_i, F_i -> a_i`, clause edges
/// `T_x -> c_j` for every variable `x` of clause `c_j`, and edges from `g`
/// and `r` to every `x_i`. Snapshot 2 has `g`, `r`, all `T_i`, `F_i` and
/// every edge from `{g, r}` to them. Both root sets are `{(g,1), (r,1)}`.
pub fn reduce_nae3sat_vertex(phi: &CnfFormula) -> ReductionOutput {
    let n = phi.num_vars();
    let mut g = TemporalDigraph::new();
    let vertex = |g: &mut TemporalDigraph, name: String, times: &[Time]| {
        let id = g.add_vertex(name).expect("fresh");
        g.activate_range(id, times.iter().copied());
        id
    };
    let gv = vertex(&mut g, "g".into(), &[1, 2]);
    let rv = vertex(&mut g, "r".into(), &[1, 2]);
    let mut tv = Vec::with_capacity(n);
    let mut fv = Vec::with_capacity(n);
    let mut xv = Vec::with_capacity(n);
    let mut av = Vec::with_capacity(n);
    for i in 1..=n {
        xv.push(vertex(&mut g, var_name(i), &[1]));
        tv.push(vertex(&mut g, format!("T_{i}"), &[1, 2]));
        fv.push(vertex(&mut g, format!("F_{i}"), &[1, 2]));
        av.push(vertex(&mut g, format!("a_{i}"), &[1]));
    }
    let cv: Vec<usize> = (1..=phi.clauses().len())
        .map(|j| vertex(&mut g, format!("c_{j}"), &[1]))
        .collect();
    let edge = |g: &mut TemporalDigraph, u: usize, v: usize, t: Time| {
        let name = format!("{}>{}", g.vertex_name(u), g.vertex_name(v));
        let e = match g.edge_id(&name) {
            Some(e) => e,
            None => g.add_edge(name, u, v).expect("fresh"),
        };
        g.add_temporal_edge(e, t, t);
    };
    for i in 0..n {
        edge(&mut g, xv[i], tv[i], 1);
        edge(&mut g, xv[i], fv[i], 1);
        edge(&mut g, tv[i], av[i], 1);
        edge(&mut g, fv[i], av[i], 1);
    }
    for (j, c) in phi.clauses().iter().enumerate() {
        for &x in c {
            edge(&mut g, tv[x - 1], cv[j], 1);
        }
    }
    for i in 0..n {
        edge(&mut g, gv, xv[i], 1);
        edge(&mut g, rv, xv[i], 1);
    }
    for hub in [gv, rv] {
        for i in 0..n {
            edge(&mut g, hub, tv[i], 2);
            edge(&mut g, hub, fv[i], 2);
        }
    }
    let roots = RootSet::from([TemporalVertex::new(gv, 1), TemporalVertex::new(rv, 1)]);
    ReductionOutput {
        instance: g,
        roots: vec![roots.clone(), roots],
        decoder: Decoder::NaeVertex { num_vars: n },
    }
}

/// Branchings of a [`reduce_nae3sat_vertex`] output for a NAE assignment.
///
/// Branching 1 enters `x_i` from `g` and takes the side matching the value
/// of `x_i` at time 1; branching 2 enters from `r` and takes the other
/// side. The side not taken at time 1 is entered at time 2 from the same
/// hub.
pub fn nae_vertex_witness(
    phi: &CnfFormula,
    out: &ReductionOutput,
    assignment: &[bool],
) -> Vec<TemporalBranching> {
    let g = &out.instance;
    let id = |name: &str| g.vertex_id(name).expect("gadget vertex");
    let edge = |u: &str, v: &str| g.edge_id(&format!("{u}>{v}")).expect("gadget edge");
    let mut bs = Vec::new();
    for (branch, hub) in [(0usize, "g"), (1, "r")] {
        let mut b = TemporalBranching::empty(g, out.roots[branch].clone());
        let add = |b: &mut TemporalBranching, u: &str, v: &str, t: Time| {
            b.gamma[id(u)].insert(t);
            b.gamma[id(v)].insert(t);
            b.insert(TemporalEdge {
                edge: edge(u, v),
                departure: t,
                arrival: t,
            });
        };
        b.gamma[id("g")].insert(1);
        b.gamma[id("r")].insert(1);
        for i in 1..=phi.num_vars() {
            let (x, a) = (var_name(i), format!("a_{i}"));
            let (tname, fname) = (format!("T_{i}"), format!("F_{i}"));
            // branching 1 follows T_i exactly for true variables
            let early = if assignment[i - 1] == (branch == 0) {
                (&tname, &fname)
            } else {
                (&fname, &tname)
            };
            add(&mut b, hub, &x, 1);
            add(&mut b, &x, early.0, 1);
            add(&mut b, early.0, &a, 1);
            add(&mut b, hub, early.1, 2);
            b.gamma[id(hub)].insert(2);
        }
        for (j, c) in phi.clauses().iter().enumerate() {
            let value = branch == 0;
            if let Some(&x) = c.iter().find(|&&x| assignment[x - 1] == value) {
                add(&mut b, &format!("T_{x}"), &format!("c_{}", j + 1), 1);
            }
        }
        bs.push(b);
    }
    bs
}

/// Truth assignment read from branching 1: `x_i` is true iff branching 1
/// uses `x_i -> T_i` (vertex gadget) or `x_i -> T` at `2i - 1` (star).
pub fn decode_assignment(
    out: &ReductionOutput,
    branchings: &[TemporalBranching],
) -> Result<Vec<bool>, ReductionError> {
    let g = &out.instance;
    match out.decoder {
        Decoder::NaeStar { num_vars } => {
            let variant = ProblemVariant::new(Spanning::Temporal, Disjointness::Edge);
            check_solution(g, &out.roots, branchings, variant)?;
            Ok((1..=num_vars)
                .map(|i| {
                    let e = g.edge_id(&format!("x_{i}>T")).expect("gadget edge");
                    let t = (2 * i - 1) as Time;
                    branchings[0].lambda[e].contains(&(t, t))
                })
                .collect())
        }
        Decoder::NaeVertex { num_vars } => {
            // every edge has a single copy, so both disjointness notions agree
            let variant = ProblemVariant::new(Spanning::Vertex, Disjointness::TEdge);
            check_solution(g, &out.roots, branchings, variant)?;
            Ok((1..=num_vars)
                .map(|i| {
                    let e = g.edge_id(&format!("x_{i}>T_{i}")).expect("gadget edge");
                    !branchings[0].lambda[e].is_empty()
                })
                .collect())
        }
        _ => Err(ReductionError::WrongDecoder("NAE 3-SAT")),
    }
}

/// First NAE-satisfying assignment in binary counting order.
pub fn solve_nae3sat_bruteforce(phi: &CnfFormula) -> Result<Option<Vec<bool>>, ReductionError> {
    let n = phi.num_vars();
    if n > NAE_LIMIT {
        return Err(ReductionError::ScaleGuard {
            what: "formula",
            found: n,
            limit: NAE_LIMIT,
        });
    }
    Ok((0u32..1 << n)
        .map(|bits| (0..n).map(|i| bits >> i & 1 == 1).collect::<Vec<_>>())
        .find(|a| phi.nae_satisfied(a)))
}

/// Simple paths from `s` to `t`, as edge index lists.
fn simple_paths(d: &StaticDigraph, s: usize, t: usize) -> Vec<Vec<usize>> {
    fn go(
        d: &StaticDigraph,
        at: usize,
        t: usize,
        seen: &mut Vec<bool>,
        path: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if at == t {
            out.push(path.clone());
            return;
        }
        for (e, edge) in d.edges().iter().enumerate() {
            if edge.tail == at && !seen[edge.head] {
                seen[edge.head] = true;
                path.push(e);
                go(d, edge.head, t, seen, path, out);
                path.pop();
                seen[edge.head] = false;
            }
        }
    }
    let mut seen = vec![false; d.num_vertices()];
    seen[s] = true;
    let mut out = Vec::new();
    go(d, s, t, &mut seen, &mut Vec::new(), &mut out);
    out
}

/// First pair of edge-disjoint simple paths realizing both requests.
pub fn solve_wdp_bruteforce(w: &WdpInstance) -> Result<Option<WdpPaths>, ReductionError> {
    let m = w.digraph.num_edges();
    if m > WDP_LIMIT {
        return Err(ReductionError::ScaleGuard {
            what: "WDP digraph",
            found: m,
            limit: WDP_LIMIT,
        });
    }
    let [(s1, t1), (s2, t2)] = [w.requests[0], w.requests[1]];
    let firsts = simple_paths(&w.digraph, s1, t1);
    let seconds = simple_paths(&w.digraph, s2, t2);
    for p in &firsts {
        let used: HashSet<usize> = p.iter().copied().collect();
        if let Some(q) = seconds.iter().find(|q| q.iter().all(|e| !used.contains(e))) {
            return Ok(Some(WdpPaths {
                first: p.clone(),
                second: q.clone(),
            }));
        }
    }
    Ok(None)
}

/// Whether `paths` are edge-disjoint walks along edges of `w` realizing
/// the requests.
pub fn check_paths(w: &WdpInstance, paths: &WdpPaths) -> bool {
    let d = &w.digraph;
    let walk = |p: &[usize], s: usize, t: usize| {
        let mut at = s;
        for &e in p {
            if e >= d.num_edges() || d.edge(e).tail != at {
                return false;
            }
            at = d.edge(e).head;
        }
        at == t
    };
    let first: HashSet<usize> = paths.first.iter().copied().collect();
    walk(&paths.first, w.requests[0].0, w.requests[0].1)
        && walk(&paths.second, w.requests[1].0, w.requests[1].1)
        && paths.second.iter().all(|e| !first.contains(e))
}
