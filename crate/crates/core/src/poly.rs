//! Polynomial solvers for the temporal-spanning variants and the dispatcher
//! over all four variants.
//!
//! t-edge-disjoint temporal-spanning branchings are found by packing static
//! branchings in the time-expanded digraph with `k` copies of every waiting
//! arc. Edge-disjoint temporal-spanning branchings are found snapshot by
//! snapshot when every activity set is an interval.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::exact;
use crate::model::{
    Disjointness, ModelError, ProblemVariant, RootSet, Spanning, TemporalDigraph, TemporalEdge,
    TemporalVertex, Time,
};
use crate::reach::TemporalBranching;
use crate::static_branchings::{edmonds_construct, StaticDigraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Method {
    #[default]
    Auto,
    Poly,
    Exact,
}

impl std::str::FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "auto" => Ok(Method::Auto),
            "poly" => Ok(Method::Poly),
            "exact" => Ok(Method::Exact),
            other => Err(format!("unknown method `{other}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Feasible(Vec<TemporalBranching>),
    /// Carries a human-readable reason; not a certificate.
    Infeasible(String),
}

impl Outcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Outcome::Feasible(_))
    }

    pub fn branchings(&self) -> Option<&[TemporalBranching]> {
        match self {
            Outcome::Feasible(b) => Some(b),
            Outcome::Infeasible(_) => None,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("activity of vertex `{vertex}` is not an interval of consecutive integers")]
    NotInterval { vertex: String },
    #[error("no polynomial algorithm for {variant}{detail}: the problem is NP-complete")]
    Unsupported {
        variant: ProblemVariant,
        detail: &'static str,
    },
    #[error("instance has {found} temporal edges, the enumeration limit is {limit}")]
    ScaleGuard { found: usize, limit: usize },
}

/// Solves the instance for `variant` with the requested method.
///
/// `Auto` picks the time-expanded packing for (temporal, t-edge), the
/// snapshot solver for (temporal, edge) under interval activity, and the
/// exact search otherwise.
pub fn solve(
    g: &TemporalDigraph,
    roots: &[RootSet],
    variant: ProblemVariant,
    method: Method,
) -> Result<Outcome, SolveError> {
    g.ensure_valid()?;
    let interval = g.first_non_interval_vertex().is_none();
    match (method, variant.spanning, variant.disjointness) {
        (Method::Exact, _, _) => exact::solve_exact(g, roots, variant),
        (_, Spanning::Temporal, Disjointness::TEdge) => solve_tedge_temporal(g, roots),
        (_, Spanning::Temporal, Disjointness::Edge) if interval => {
            solve_edge_temporal_interval(g, roots)
        }
        (Method::Auto, _, _) => exact::solve_exact(g, roots, variant),
        (Method::Poly, Spanning::Temporal, Disjointness::Edge) => Err(SolveError::Unsupported {
            variant,
            detail: " with non-interval activity",
        }),
        (Method::Poly, Spanning::Vertex, _) => Err(SolveError::Unsupported {
            variant,
            detail: "",
        }),
    }
}

/// Common prechecks of both temporal-spanning solvers. Returns an outcome
/// when the instance is settled without search.
fn temporal_prechecks(
    g: &TemporalDigraph,
    roots: &[RootSet],
) -> Result<Option<Outcome>, SolveError> {
    g.ensure_valid()?;
    g.ensure_roots(roots)?;
    if g.num_temporal_vertices() == 0 || roots.is_empty() {
        return Ok(Some(Outcome::Feasible(
            roots
                .iter()
                .map(|r| TemporalBranching::with_host_activity(g, r.clone()))
                .collect(),
        )));
    }
    if let Some(i) = roots.iter().position(BTreeSet::is_empty) {
        return Ok(Some(Outcome::Infeasible(format!(
            "root set {} is empty",
            i + 1
        ))));
    }
    // Waiting always reaches (u, t) from (u, t - 1), so a root there would
    // have a second walk.
    if let Some(r) = roots.iter().flatten().find(|&&r| !g.is_run_start(r)) {
        return Ok(Some(Outcome::Infeasible(format!(
            "root {} is also reached by waiting",
            g.show(*r)
        ))));
    }
    Ok(None)
}

/// t-edge-disjoint temporal-spanning branchings via static packing in the
/// time-expanded digraph.
pub fn solve_tedge_temporal(g: &TemporalDigraph, roots: &[RootSet]) -> Result<Outcome, SolveError> {
    if let Some(done) = temporal_prechecks(g, roots)? {
        return Ok(done);
    }
    let k = roots.len();
    let h = crate::model::expand(g, k)?;
    let (d, _refs) = h.to_static(g);
    let static_roots: Vec<BTreeSet<usize>> = roots
        .iter()
        .map(|r| {
            r.iter()
                .map(|&v| h.node_index(v).expect("roots are temporal vertices"))
                .collect()
        })
        .collect();
    let packed = edmonds_construct(&d, &static_roots).expect("root sets are nonempty and in range");
    let Some(packed) = packed else {
        return Ok(Outcome::Infeasible(
            "the time-expanded digraph violates the cut condition".into(),
        ));
    };
    let arcs = h.temporal_arcs();
    let nodes = h.nodes();
    let out = packed
        .into_iter()
        .zip(roots)
        .map(|(sb, r)| {
            let mut b = TemporalBranching::with_host_activity(g, r.clone());
            // Static edges are numbered temporal arcs first, then waiting
            // copies. An arc into a node that waiting already reaches is
            // replaced by the waiting arc, which the branching always has.
            for e in sb.edges.into_iter().filter(|&e| e < arcs.len()) {
                if g.is_run_start(nodes[arcs[e].head]) {
                    b.insert(arcs[e].edge);
                }
            }
            b
        })
        .collect();
    Ok(Outcome::Feasible(out))
}

/// One timestamp `j` of a [`SnapshotDecomposition`].
#[derive(Clone, Debug)]
pub struct Snapshot {
    pub time: Time,
    /// `G_j`, before pruning.
    pub graph: StaticDigraph,
    /// Host vertex of every vertex of `graph`.
    pub vertices: Vec<usize>,
    /// Host vertices active at both `j - 1` and `j`.
    pub common_wait_roots: BTreeSet<usize>,
    /// Host vertices of `graph` first active before `j`: the common wait
    /// roots and the tails of edges arriving at `j` that are no longer
    /// active.
    pub settled: BTreeSet<usize>,
    /// `R^j_i` per branching, as vertices of `graph`.
    pub root_sets: Vec<BTreeSet<usize>>,
}

impl Snapshot {
    /// `G_j` without edges entering a settled vertex.
    pub fn pruned_graph(&self) -> StaticDigraph {
        self.graph
            .filtered(|e| !self.settled.contains(&self.vertices[e.head]))
    }
}

/// Per-arrival-time decomposition of an interval-activity instance.
#[derive(Clone, Debug)]
pub struct SnapshotDecomposition {
    /// Nonempty `G_j` in increasing `j`.
    pub snapshots: Vec<Snapshot>,
}

impl SnapshotDecomposition {
    /// `g` must be valid with interval activity.
    pub fn new(g: &TemporalDigraph, roots: &[RootSet]) -> Self {
        let first: Vec<Option<Time>> = (0..g.num_vertices())
            .map(|v| g.gamma(v).first().copied())
            .collect();
        let lo = first.iter().flatten().min().copied().unwrap_or(0);
        let hi = g.lifetime().unwrap_or(0);
        let mut snapshots = Vec::new();
        for j in lo..=hi {
            let (graph, vertices) = g.arrival_graph(j);
            if vertices.is_empty() {
                continue;
            }
            let common_wait_roots: BTreeSet<usize> = (0..g.num_vertices())
                .filter(|&u| j > 0 && g.is_active(u, j) && g.is_active(u, j - 1))
                .collect();
            let settled: BTreeSet<usize> = vertices
                .iter()
                .copied()
                .filter(|&u| first[u].is_some_and(|s| s < j))
                .collect();
            let root_sets = roots
                .iter()
                .map(|r| {
                    (0..vertices.len())
                        .filter(|&x| {
                            let u = vertices[x];
                            settled.contains(&u) || r.contains(&TemporalVertex::new(u, j))
                        })
                        .collect()
                })
                .collect();
            snapshots.push(Snapshot {
                time: j,
                graph,
                vertices,
                common_wait_roots,
                settled,
                root_sets,
            });
        }
        SnapshotDecomposition { snapshots }
    }
}

/// Edge-disjoint temporal-spanning branchings for interval activity.
///
/// Each base edge is only ever used to reach its head at the first time
/// the head is active, so the per-snapshot packings share no base edge.
pub fn solve_edge_temporal_interval(
    g: &TemporalDigraph,
    roots: &[RootSet],
) -> Result<Outcome, SolveError> {
    g.ensure_valid()?;
    if let Some(v) = g.first_non_interval_vertex() {
        return Err(SolveError::NotInterval {
            vertex: g.vertex_name(v).to_string(),
        });
    }
    if let Some(done) = temporal_prechecks(g, roots)? {
        return Ok(done);
    }
    let dec = SnapshotDecomposition::new(g, roots);
    let mut out: Vec<TemporalBranching> = roots
        .iter()
        .map(|r| TemporalBranching::with_host_activity(g, r.clone()))
        .collect();
    for snap in &dec.snapshots {
        let j = snap.time;
        if snap.root_sets.iter().any(BTreeSet::is_empty) {
            return Ok(Outcome::Infeasible(format!(
                "no root can reach the vertices first active at {j}"
            )));
        }
        let pruned = snap.pruned_graph();
        let packed = edmonds_construct(&pruned, &snap.root_sets)
            .expect("root sets are nonempty and in range");
        let Some(packed) = packed else {
            return Ok(Outcome::Infeasible(format!(
                "edges arriving at {j} violate the cut condition"
            )));
        };
        for (i, sb) in packed.into_iter().enumerate() {
            for e in sb.edges {
                let host_edge = g
                    .edge_id(&pruned.edge(e).id)
                    .expect("snapshot edges keep their host names");
                let departure = g
                    .lambda(host_edge)
                    .iter()
                    .filter(|&&(_, a)| a == j)
                    .map(|&(d, _)| d)
                    .min()
                    .expect("the edge has a copy arriving at j");
                out[i].insert(TemporalEdge {
                    edge: host_edge,
                    departure,
                    arrival: j,
                });
            }
        }
    }
    Ok(Outcome::Feasible(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reach::{check_disjoint, verify_branching};
    use crate::static_branchings::edmonds_feasible;
    use proptest::prelude::*;

    fn tv(v: usize, t: Time) -> TemporalVertex {
        TemporalVertex::new(v, t)
    }

    fn rs(v: &[(usize, Time)]) -> RootSet {
        v.iter().map(|&(a, t)| tv(a, t)).collect()
    }

    fn check_output(g: &TemporalDigraph, roots: &[RootSet], out: &Outcome, dis: Disjointness) {
        if let Outcome::Feasible(bs) = out {
            assert_eq!(bs.len(), roots.len());
            for b in bs {
                assert!(verify_branching(g, b, Spanning::Temporal)
                    .unwrap()
                    .is_valid());
            }
            assert_eq!(check_disjoint(g, bs, dis).unwrap(), None);
        }
    }

    /// a at {1}, b at {1, 2}, and parallel a->b edges at (1, 1).
    fn parallel(copies: usize) -> TemporalDigraph {
        let mut g = TemporalDigraph::new();
        let a = g.add_vertex("a").unwrap();
        let b = g.add_vertex("b").unwrap();
        g.activate(a, 1);
        g.activate_range(b, [1, 2]);
        for i in 0..copies {
            let e = g.add_edge(format!("e{i}"), a, b).unwrap();
            g.add_temporal_edge(e, 1, 1);
        }
        g
    }

    #[test]
    fn path_spans_everything_for_one_branching() {
        let mut g = TemporalDigraph::new();
        let a = g.add_vertex("a").unwrap();
        let b = g.add_vertex("b").unwrap();
        let c = g.add_vertex("c").unwrap();
        g.activate(a, 1);
        g.activate(b, 2);
        g.activate(c, 3);
        let ab = g.add_edge("ab", a, b).unwrap();
        let bc = g.add_edge("bc", b, c).unwrap();
        g.add_temporal_edge(ab, 1, 2);
        g.add_temporal_edge(bc, 2, 3);
        let roots = [rs(&[(a, 1)])];
        let out = solve_tedge_temporal(&g, &roots).unwrap();
        check_output(&g, &roots, &out, Disjointness::TEdge);
        assert_eq!(out.branchings().unwrap()[0].num_temporal_edges(), 2);
    }

    #[test]
    fn parallel_arcs_split_between_two_branchings() {
        let g = parallel(2);
        let roots = [rs(&[(0, 1)]), rs(&[(0, 1)])];
        let out = solve_tedge_temporal(&g, &roots).unwrap();
        check_output(&g, &roots, &out, Disjointness::TEdge);
        let bs = out.branchings().unwrap();
        assert_eq!(bs[0].num_temporal_edges(), 1);
        assert_eq!(bs[1].num_temporal_edges(), 1);
    }

    #[test]
    fn one_arrival_cannot_serve_two() {
        let mut g = parallel(0);
        let e = g.add_edge("ab", 0, 1).unwrap();
        g.add_temporal_edge(e, 1, 1);
        g.add_temporal_edge(e, 1, 2);
        let roots = [rs(&[(0, 1)]), rs(&[(0, 1)])];
        assert!(!solve_tedge_temporal(&g, &roots).unwrap().is_feasible());
    }

    #[test]
    fn arc_into_waiting_node_is_replaced() {
        // H may pick (a,1)->(b,2) for (b,2); the branching waits instead.
        let mut g = TemporalDigraph::new();
        let a = g.add_vertex("a").unwrap();
        let b = g.add_vertex("b").unwrap();
        g.activate(a, 1);
        g.activate_range(b, [1, 2]);
        let e = g.add_edge("ab", a, b).unwrap();
        let f = g.add_edge("ab2", a, b).unwrap();
        g.add_temporal_edge(e, 1, 1);
        g.add_temporal_edge(f, 1, 2);
        let roots = [rs(&[(a, 1)])];
        let out = solve_tedge_temporal(&g, &roots).unwrap();
        check_output(&g, &roots, &out, Disjointness::TEdge);
    }

    #[test]
    fn root_reached_by_waiting_is_infeasible() {
        let g = parallel(2);
        let roots = [rs(&[(0, 1), (1, 2)])];
        assert!(!solve_tedge_temporal(&g, &roots).unwrap().is_feasible());
    }

    #[test]
    fn eternal_static_like_digraph() {
        let mut g = TemporalDigraph::new();
        for v in ["r", "a", "b"] {
            let id = g.add_vertex(v).unwrap();
            g.activate_range(id, 0..=2);
        }
        for (n, u, v) in [("ra", 0, 1), ("ab", 1, 2), ("br", 2, 0)] {
            let e = g.add_edge(n, u, v).unwrap();
            for t in 0..=2 {
                g.add_temporal_edge(e, t, t);
            }
        }
        let roots = [rs(&[(0, 0)])];
        let out = solve_edge_temporal_interval(&g, &roots).unwrap();
        check_output(&g, &roots, &out, Disjointness::Edge);
        assert!(out.is_feasible());
    }

    #[test]
    fn failing_snapshot_makes_instance_infeasible() {
        // Two branchings from a need two edges into b at time 1.
        let g = parallel(1);
        let roots = [rs(&[(0, 1)]), rs(&[(0, 1)])];
        let out = solve_edge_temporal_interval(&g, &roots).unwrap();
        assert!(!out.is_feasible());
    }

    #[test]
    fn non_interval_is_rejected_by_name() {
        let mut g = TemporalDigraph::new();
        let a = g.add_vertex("a").unwrap();
        g.activate_range(a, [1, 3]);
        assert_eq!(
            solve_edge_temporal_interval(&g, &[rs(&[(a, 1)])]),
            Err(SolveError::NotInterval { vertex: "a".into() })
        );
    }

    #[test]
    fn departed_tail_is_settled() {
        // a only at 1, edge a->b departs 1 and arrives 2.
        let mut g = TemporalDigraph::new();
        let a = g.add_vertex("a").unwrap();
        let b = g.add_vertex("b").unwrap();
        g.activate(a, 1);
        g.activate(b, 2);
        let e = g.add_edge("ab", a, b).unwrap();
        g.add_temporal_edge(e, 1, 2);
        let roots = [rs(&[(a, 1)])];
        let dec = SnapshotDecomposition::new(&g, &roots);
        let s2 = dec.snapshots.iter().find(|s| s.time == 2).unwrap();
        assert!(s2.common_wait_roots.is_empty());
        assert_eq!(s2.settled, BTreeSet::from([a]));
        let out = solve_edge_temporal_interval(&g, &roots).unwrap();
        assert!(out.is_feasible());
        check_output(&g, &roots, &out, Disjointness::Edge);
    }

    #[test]
    fn dispatcher_routes_and_refuses() {
        let g = parallel(2);
        let roots = [rs(&[(0, 1)])];
        let v = ProblemVariant::new(Spanning::Vertex, Disjointness::TEdge);
        assert!(matches!(
            solve(&g, &roots, v, Method::Poly),
            Err(SolveError::Unsupported { .. })
        ));
        for variant in ProblemVariant::ALL {
            let out = solve(&g, &roots, variant, Method::Auto).unwrap();
            assert!(out.is_feasible(), "{variant}");
        }
    }

    /// Random interval instance: up to 4 vertices, lifetime up to 4.
    fn interval_instance() -> impl Strategy<Value = (TemporalDigraph, Vec<RootSet>)> {
        (
            2usize..=4,
            proptest::collection::vec((1u32..=4, 0u32..=3), 4),
            proptest::collection::vec((0usize..4, 0usize..4, 1u32..=4, 0u32..=2), 0..=8),
            proptest::collection::vec(0usize..4, 2),
        )
            .prop_map(|(n, acts, edges, rv)| {
                let mut g = TemporalDigraph::new();
                for v in 0..n {
                    g.add_vertex(format!("v{v}")).unwrap();
                    let (s, len) = acts[v];
                    g.activate_range(v, s..=(s + len).min(4));
                }
                for (i, (u, v, d, len)) in edges.into_iter().enumerate() {
                    let (u, v) = (u % n, v % n);
                    if g.is_active(u, d) && g.is_active(v, d + len) {
                        let e = g.add_edge(format!("e{i}"), u, v).unwrap();
                        g.add_temporal_edge(e, d, d + len);
                    }
                }
                let roots = rv
                    .into_iter()
                    .map(|v| {
                        let v = v % n;
                        rs(&[(v, *g.gamma(v).first().unwrap())])
                    })
                    .collect();
                (g, roots)
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]

        #[test]
        fn outputs_always_verify((g, roots) in interval_instance()) {
            let out = solve_tedge_temporal(&g, &roots).unwrap();
            check_output(&g, &roots, &out, Disjointness::TEdge);
            let out = solve_edge_temporal_interval(&g, &roots).unwrap();
            check_output(&g, &roots, &out, Disjointness::Edge);
        }

        #[test]
        fn tedge_verdict_is_expanded_feasibility((g, roots) in interval_instance()) {
            let h = crate::model::expand(&g, roots.len()).unwrap();
            let (d, _) = h.to_static(&g);
            let sr: Vec<BTreeSet<usize>> = roots
                .iter()
                .map(|r| r.iter().map(|&v| h.node_index(v).unwrap()).collect())
                .collect();
            prop_assert_eq!(
                solve_tedge_temporal(&g, &roots).unwrap().is_feasible(),
                edmonds_feasible(&d, &sr).unwrap()
            );
        }

        #[test]
        fn pruning_keeps_snapshot_feasibility((g, roots) in interval_instance()) {
            for s in SnapshotDecomposition::new(&g, &roots).snapshots {
                if s.root_sets.iter().all(|r| !r.is_empty()) {
                    prop_assert_eq!(
                        edmonds_feasible(&s.pruned_graph(), &s.root_sets).unwrap(),
                        edmonds_feasible(&s.graph, &s.root_sets).unwrap()
                    );
                }
            }
        }

        #[test]
        fn parallel_copies_keep_feasibility((g, roots) in interval_instance(), pick in any::<usize>()) {
            if solve_edge_temporal_interval(&g, &roots).unwrap().is_feasible() && g.num_edges() > 0 {
                let e = pick % g.num_edges();
                let mut more = g.clone();
                let (t, h) = (g.edge(e).tail, g.edge(e).head);
                let copy = more.add_edge("extra", t, h).unwrap();
                for &(d, a) in g.lambda(e) {
                    more.add_temporal_edge(copy, d, a);
                }
                prop_assert!(solve_edge_temporal_interval(&more, &roots).unwrap().is_feasible());
            }
        }
    }
}
