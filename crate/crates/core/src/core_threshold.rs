//! The deletion (peeling) algorithm extracting the (k1,k2)-core of a
//! multi-digraph, and the numerical emergence threshold `c*(k1,k2)` for the
//! random digraph D(n, m = [cn]).

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::experiments::ExperimentRecord;
use crate::graph::LabeledMultiDigraph;
use crate::graph_analysis::{is_k_strongly_connected, strongly_connected_components};
use crate::sampler::replica_rng;
use crate::truncated_poisson::tail_prob;

/// Why a vertex was deleted during peeling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LightReason {
    /// In-degree below k1 at deletion time.
    InLight,
    /// Out-degree below k2 at deletion time.
    OutLight,
}

/// Terminal state of the peeling process. The core is the unique maximal
/// subgraph with all in-degrees >= k1 and out-degrees >= k2 (possibly
/// empty), independent of deletion order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeelResult {
    /// Sorted vertex ids surviving in the core.
    pub core_vertices: Vec<usize>,
    /// Edges with both endpoints in the core (multiplicities counted).
    pub core_edges: usize,
    /// Number of deletion steps performed.
    pub rounds: usize,
    /// Per-step (deleted vertex, reason), present for the traced variant.
    pub trace: Option<Vec<(usize, LightReason)>>,
}

struct PeelState {
    indeg: Vec<usize>,
    outdeg: Vec<usize>,
    alive: Vec<bool>,
    out_adj: Vec<Vec<usize>>,
    in_adj: Vec<Vec<usize>>,
    k1: usize,
    k2: usize,
}

impl PeelState {
    fn new(g: &LabeledMultiDigraph, k1: usize, k2: usize) -> Self {
        Self {
            indeg: g.in_degrees(),
            outdeg: g.out_degrees(),
            alive: vec![true; g.vertex_count()],
            out_adj: g.out_adjacency(),
            in_adj: g.in_adjacency(),
            k1,
            k2,
        }
    }

    fn is_light(&self, v: usize) -> bool {
        self.indeg[v] < self.k1 || self.outdeg[v] < self.k2
    }

    /// Deletes v and reports the neighbors that just became light.
    fn delete(&mut self, v: usize, newly_light: &mut Vec<usize>) {
        self.alive[v] = false;
        for i in 0..self.out_adj[v].len() {
            let w = self.out_adj[v][i];
            if self.alive[w] {
                let was_light = self.is_light(w);
                self.indeg[w] -= 1;
                if !was_light && self.is_light(w) {
                    newly_light.push(w);
                }
            }
        }
        for i in 0..self.in_adj[v].len() {
            let w = self.in_adj[v][i];
            if self.alive[w] {
                let was_light = self.is_light(w);
                self.outdeg[w] -= 1;
                if !was_light && self.is_light(w) {
                    newly_light.push(w);
                }
            }
        }
    }

    fn finish(
        self,
        g: &LabeledMultiDigraph,
        rounds: usize,
        trace: Option<Vec<(usize, LightReason)>>,
    ) -> PeelResult {
        let core_vertices: Vec<usize> = (0..g.vertex_count()).filter(|&v| self.alive[v]).collect();
        let core_edges = g
            .edges()
            .iter()
            .filter(|&&(t, h)| self.alive[t] && self.alive[h])
            .count();
        PeelResult {
            core_vertices,
            core_edges,
            rounds,
            trace,
        }
    }
}

/// Queue-driven peeling with lazy degree updates: repeatedly deletes a
/// vertex with in-degree < k1 or out-degree < k2 until none remains.
pub fn peel_core(g: &LabeledMultiDigraph, k1: usize, k2: usize) -> PeelResult {
    let n = g.vertex_count();
    let mut state = PeelState::new(g, k1, k2);
    let mut stack: Vec<usize> = (0..n).filter(|&v| state.is_light(v)).collect();
    let mut queued = vec![false; n];
    for &v in &stack {
        queued[v] = true;
    }
    let mut rounds = 0usize;
    let mut newly = Vec::new();
    while let Some(v) = stack.pop() {
        if !state.alive[v] {
            continue;
        }
        rounds += 1;
        newly.clear();
        state.delete(v, &mut newly);
        for &w in &newly {
            if !queued[w] {
                queued[w] = true;
                stack.push(w);
            }
        }
    }
    state.finish(g, rounds, None)
}

/// Peeling in the paper's order: at each step a uniformly random light
/// vertex is deleted. Records a per-step trace. The terminal core is the
/// same as [`peel_core`]'s.
pub fn peel_core_traced(
    g: &LabeledMultiDigraph,
    k1: usize,
    k2: usize,
    rng: &mut impl Rng,
) -> PeelResult {
    let n = g.vertex_count();
    let mut state = PeelState::new(g, k1, k2);
    let mut light: Vec<usize> = (0..n).filter(|&v| state.is_light(v)).collect();
    let mut position = vec![usize::MAX; n];
    for (i, &v) in light.iter().enumerate() {
        position[v] = i;
    }
    let mut trace = Vec::new();
    let mut newly = Vec::new();
    while !light.is_empty() {
        let idx = rng.random_range(0..light.len());
        let v = light.swap_remove(idx);
        if let Some(&moved) = light.get(idx) {
            position[moved] = idx;
        }
        position[v] = usize::MAX;
        let reason = if state.indeg[v] < k1 {
            LightReason::InLight
        } else {
            LightReason::OutLight
        };
        trace.push((v, reason));
        newly.clear();
        state.delete(v, &mut newly);
        for &w in &newly {
            if position[w] == usize::MAX {
                position[w] = light.len();
                light.push(w);
            }
        }
    }
    let rounds = trace.len();
    state.finish(g, rounds, Some(trace))
}

/// Uniform multi-digraph D(n, m): all 2m slots drawn independently and
/// uniformly from [n].
pub fn sample_uniform_multidigraph(n: usize, m: usize, rng: &mut impl Rng) -> LabeledMultiDigraph {
    assert!(n >= 1, "need at least one vertex");
    let edges = (0..m)
        .map(|_| (rng.random_range(0..n), rng.random_range(0..n)))
        .collect();
    LabeledMultiDigraph::new(n, edges).expect("ids in range by construction")
}

/// The core-emergence threshold and the minimizer that attains it.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ThresholdResult {
    pub c_star: f64,
    /// Minimizing rates (z1, z2).
    pub argmin: (f64, f64),
    /// |term1 - term2| at the minimizer.
    pub gap: f64,
    /// True when the reported minimizer sits on the search boundary even
    /// after expansion.
    pub boundary_hit: bool,
}

/// `c*(k1,k2) = min_{z1,z2>0} max{ z1/(p_{k1}(z1) p_{k2-1}(z2)),
/// z2/(p_{k1-1}(z1) p_{k2}(z2)) }`: coarse grid at step 0.01 on an adaptive
/// box, then coordinate descent down to 1e-8 steps.
pub fn c_star(k1: usize, k2: usize) -> Result<ThresholdResult> {
    if k1.max(k2) < 2 {
        return Err(Error::Precondition(format!(
            "need max(k1,k2) >= 2, got ({k1},{k2})"
        )));
    }
    let p = |k: i64, z: f64| tail_prob(z, k).expect("positive rate");
    let objective = |z1: f64, z2: f64| -> f64 {
        let t1 = z1 / (p(k1 as i64, z1) * p(k2 as i64 - 1, z2));
        let t2 = z2 / (p(k1 as i64 - 1, z1) * p(k2 as i64, z2));
        t1.max(t2)
    };

    const STEP: f64 = 0.01;
    let mut z_max = 2.0 * k1.max(k2) as f64 + 6.0;
    let mut boundary_hit = false;
    let (mut best_z1, mut best_z2);
    loop {
        let count = (z_max / STEP) as usize;
        let grid: Vec<f64> = (1..=count).map(|i| i as f64 * STEP).collect();
        // precompute the four tail-probability axes
        let a_num: Vec<f64> = grid.iter().map(|&z| p(k1 as i64, z)).collect();
        let a_den: Vec<f64> = grid.iter().map(|&z| p(k1 as i64 - 1, z)).collect();
        let b_num: Vec<f64> = grid.iter().map(|&z| p(k2 as i64, z)).collect();
        let b_den: Vec<f64> = grid.iter().map(|&z| p(k2 as i64 - 1, z)).collect();
        let mut best = f64::INFINITY;
        let mut arg = (grid[0], grid[0]);
        for (i, &z1) in grid.iter().enumerate() {
            for (j, &z2) in grid.iter().enumerate() {
                let t1 = z1 / (a_num[i] * b_den[j]);
                let t2 = z2 / (a_den[i] * b_num[j]);
                let v = t1.max(t2);
                if v < best {
                    best = v;
                    arg = (z1, z2);
                }
            }
        }
        if arg.0 < z_max - 2.0 * STEP && arg.1 < z_max - 2.0 * STEP {
            best_z1 = arg.0;
            best_z2 = arg.1;
            break;
        }
        // minimizer on the box edge: enlarge and rescan
        z_max *= 2.0;
        if z_max > 400.0 {
            best_z1 = arg.0;
            best_z2 = arg.1;
            boundary_hit = true;
            break;
        }
    }

    // Nested derivative-free refinement. Plain coordinate descent stalls on
    // the ridge where the two max-terms cross, so the outer search over z1
    // re-minimizes over z2 at every probe.
    let mut inner_center = best_z2;
    let inner = |z1: f64, center: f64| -> (f64, f64) {
        let z2 = refine_coordinate(|z| objective(z1, z), center, 2.0 * STEP);
        (objective(z1, z2), z2)
    };
    let mut value = objective(best_z1, best_z2);
    let mut converged = false;
    for _ in 0..60 {
        let before = value;
        let mut radius = 2.0 * STEP;
        while radius > 1e-9 {
            let lo = (best_z1 - radius).max(1e-9);
            let hi = best_z1 + radius;
            for i in 0..=20 {
                let z1 = lo + (hi - lo) * i as f64 / 20.0;
                let (v, z2) = inner(z1, inner_center);
                if v < value {
                    value = v;
                    best_z1 = z1;
                    best_z2 = z2;
                    inner_center = z2;
                }
            }
            radius /= 4.0;
        }
        if (before - value).abs() <= 1e-13 * value.abs() {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence {
            best_value: value,
            z1: best_z1,
            z2: best_z2,
        });
    }
    let t1 = best_z1 / (p(k1 as i64, best_z1) * p(k2 as i64 - 1, best_z2));
    let t2 = best_z2 / (p(k1 as i64 - 1, best_z1) * p(k2 as i64, best_z2));
    Ok(ThresholdResult {
        c_star: value,
        argmin: (best_z1, best_z2),
        gap: (t1 - t2).abs(),
        boundary_hit,
    })
}

/// 1-D minimization by repeated sample-and-shrink around the incumbent;
/// robust to the kink where the two max-terms cross.
fn refine_coordinate(f: impl Fn(f64) -> f64, center: f64, initial_radius: f64) -> f64 {
    let mut best_x = center;
    let mut best = f(center);
    let mut radius = initial_radius;
    while radius > 1e-9 {
        let lo = (best_x - radius).max(1e-9);
        let hi = best_x + radius;
        for i in 0..=40 {
            let x = lo + (hi - lo) * i as f64 / 40.0;
            let v = f(x);
            if v < best {
                best = v;
                best_x = x;
            }
        }
        radius /= 4.0;
    }
    best_x
}

/// For each density c and replica: sample D(n, m = floor(c n)), peel, and
/// record core sizes; optionally run strong / min(k1,k2)-strong
/// connectivity checks on nonempty cores. Replica `rep` always draws from
/// the stream derived from `(master_seed, rep)`, so results do not depend
/// on parallelism.
pub fn threshold_experiment(
    k1: usize,
    k2: usize,
    c_values: &[f64],
    n: usize,
    reps: usize,
    master_seed: u64,
    check_connectivity: bool,
) -> Result<Vec<ExperimentRecord>> {
    use rayon::prelude::*;

    if n == 0 {
        return Err(Error::Precondition("need at least one vertex".into()));
    }
    let k_conn = k1.min(k2);
    let records = crate::experiments::run_with_configured_threads(|| {
        let mut all = Vec::with_capacity(c_values.len() * reps);
        for &c in c_values {
            let m = (c * n as f64).floor() as usize;
            let mut block: Vec<ExperimentRecord> = (0..reps)
                .into_par_iter()
                .map(|rep| {
                    let start = std::time::Instant::now();
                    let mut rng = replica_rng(master_seed, rep as u64);
                    let g = sample_uniform_multidigraph(n, m, &mut rng);
                    let peel = peel_core(&g, k1, k2);
                    let (mut sc, mut kstrong) = (None, None);
                    if check_connectivity && !peel.core_vertices.is_empty() {
                        let (core, _) = g.induced_subgraph(&peel.core_vertices);
                        let connected = strongly_connected_components(&core).len() == 1;
                        sc = Some(connected);
                        if k_conn >= 1 && core.vertex_count() > k_conn {
                            kstrong = is_k_strongly_connected(&core, k_conn)
                                .ok()
                                .map(|v| v.k_strong);
                        }
                    }
                    ExperimentRecord {
                        k1,
                        k2,
                        c,
                        n,
                        rep,
                        seed: master_seed,
                        core_vertices: peel.core_vertices.len(),
                        core_edges: peel.core_edges,
                        strongly_connected: sc,
                        k_strong: kstrong,
                        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
                    }
                })
                .collect();
            all.append(&mut block);
        }
        all
    });
    Ok(records)
}
