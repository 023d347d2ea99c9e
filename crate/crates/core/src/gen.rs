//! Seeded random instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{RootSet, TemporalDigraph, TemporalVertex, Time};

#[derive(Clone, Debug)]
pub struct GenConfig {
    pub vertices: usize,
    pub lifetime: Time,
    /// Probability of each temporal edge `(u,t)(v,t')` with `u != v`,
    /// `t <= t'` and both ends active.
    pub edge_prob: f64,
    pub seed: u64,
    /// One random interval per vertex instead of a random subset.
    pub interval_activity: bool,
    /// Probability of each timestamp in a random activity subset.
    pub activity_prob: f64,
    pub k: usize,
    /// Probability of each run start in a root set. Empty draws fall back
    /// to one random run start.
    pub root_prob: f64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            vertices: 3,
            lifetime: 3,
            edge_prob: 0.3,
            seed: 0,
            interval_activity: false,
            activity_prob: 0.6,
            k: 2,
            root_prob: 0.3,
        }
    }
}

/// Timestamps run from 1 to `lifetime`. Vertices are `v0, v1, ...` and the
/// edge from `vi` to `vj` is `vi>vj`. At least one vertex is active when
/// `vertices > 0` and `lifetime > 0`.
pub fn generate(cfg: &GenConfig) -> (TemporalDigraph, Vec<RootSet>) {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut g = TemporalDigraph::new();
    let n = cfg.vertices;
    let life = cfg.lifetime;
    for v in 0..n {
        g.add_vertex(format!("v{v}")).expect("fresh name");
        if life == 0 {
            continue;
        }
        if cfg.interval_activity {
            let a = rng.gen_range(1..=life);
            let b = rng.gen_range(a..=life);
            g.activate_range(v, a..=b);
        } else {
            for t in 1..=life {
                if rng.gen_bool(cfg.activity_prob) {
                    g.activate(v, t);
                }
            }
        }
    }
    if n > 0 && life > 0 && g.num_temporal_vertices() == 0 {
        let v = rng.gen_range(0..n);
        let t = rng.gen_range(1..=life);
        g.activate(v, t);
    }
    for u in 0..n {
        for v in (0..n).filter(|&v| v != u) {
            let mut id = None;
            for t in g.gamma(u).clone() {
                for t2 in g.gamma(v).range(t..).copied().collect::<Vec<_>>() {
                    if rng.gen_bool(cfg.edge_prob) {
                        let e = *id.get_or_insert_with(|| {
                            g.add_edge(format!("v{u}>v{v}"), u, v).expect("fresh name")
                        });
                        g.add_temporal_edge(e, t, t2);
                    }
                }
            }
        }
    }
    let starts: Vec<TemporalVertex> = g
        .temporal_vertices()
        .filter(|&x| g.is_run_start(x))
        .collect();
    let roots = (0..cfg.k)
        .map(|_| {
            let mut set: RootSet = starts
                .iter()
                .copied()
                .filter(|_| rng.gen_bool(cfg.root_prob))
                .collect();
            if set.is_empty() && !starts.is_empty() {
                set.insert(starts[rng.gen_range(0..starts.len())]);
            }
            set
        })
        .collect();
    (g, roots)
}
