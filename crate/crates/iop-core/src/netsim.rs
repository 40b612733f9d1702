//! Monte Carlo connectivity of a dense in-paint network.
//!
//! Each trial scatters a Poisson number of nodes uniformly over a
//! rectangular wall patch, with uniform depths inside the paint layer and
//! isotropically random antenna orientations. Every node pair within a
//! cutoff range is evaluated with the full channel model; pairs satisfying
//! the link rule (an SNR threshold or a capacity floor) become edges.
//! Per-trial connectivity metrics are aggregated into means and sample
//! standard deviations across trials.
//!
//! Trials draw from independent, seeded counter-mode RNG streams, so a
//! report is a pure function of `(config, seed)` - identical under serial
//! and parallel execution, which the tests assert bit-for-bit.
//!
//! This module works in `f64` only: the channel math is generic, but
//! reproducible Monte Carlo accounting has no use for other scalar types.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;

use crate::capacity::{link_capacity, Band, CapacityReport, LinkBudget};
use crate::error::{Error, Result};
use crate::geometry::{LayerStack, Placement};
use crate::propagation::{Combining, ModelParams};

/// Edge criterion for a node pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LinkRule {
    /// Mean link SNR (dB over the band) must reach this threshold.
    SnrThresholdDb(f64),
    /// Integrated link capacity must reach this floor, bit/s.
    MinCapacityBps(f64),
}

/// Node antenna pattern.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Antenna {
    Isotropic,
    /// Boresight gain with a quadratic dB roll-off: 20 dB down at the edge
    /// of the (full) beamwidth.
    Cone { gain_dbi: f64, beamwidth_rad: f64 },
}

/// Trial execution strategy. Results are identical either way.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parallelism {
    Serial,
    Rayon,
}

/// Scenario description for one Monte Carlo run.
#[derive(Debug, Clone)]
pub struct NetSimConfig {
    /// Expected node density over the wall, nodes/m^2.
    pub density_per_m2: f64,
    /// Wall patch width, m.
    pub wall_width_m: f64,
    /// Wall patch height, m.
    pub wall_height_m: f64,
    /// Capacity/SNR evaluation band.
    pub band: Band<f64>,
    /// Transmit PSD and sub-band resolution per link.
    pub budget: LinkBudget<f64>,
    pub link_rule: LinkRule,
    pub antenna: Antenna,
    /// Pairs farther apart than this are not evaluated.
    pub max_range_m: f64,
    pub trials: u64,
    pub combining: Combining,
}

/// Connectivity metrics of a single trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialResult {
    pub n_nodes: usize,
    pub n_links: usize,
    /// `2 * links / nodes` (0 for an empty trial).
    pub mean_degree: f64,
    /// Largest connected component size over the node count.
    pub largest_component_fraction: f64,
    /// Degree-zero nodes over the node count.
    pub isolated_fraction: f64,
}

/// Mean and sample standard deviation over trials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aggregate {
    pub mean: f64,
    pub stddev: f64,
}

/// Full Monte Carlo output.
#[derive(Debug, Clone)]
pub struct NetSimReport {
    pub trials: Vec<TrialResult>,
    pub nodes: Aggregate,
    pub links: Aggregate,
    pub mean_degree: Aggregate,
    pub largest_component_fraction: Aggregate,
    pub isolated_fraction: Aggregate,
}

// ---------------------------------------------------------------------------
// Union-find
// ---------------------------------------------------------------------------

struct Dsu {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
    }

    fn largest(&mut self) -> usize {
        let n = self.parent.len();
        let mut best = 0;
        for i in 0..n {
            let r = self.find(i);
            if r == i {
                best = best.max(self.size[i]);
            }
        }
        best
    }
}

// ---------------------------------------------------------------------------
// Simulation
// ---------------------------------------------------------------------------

/// One sampled node: wall-plane position, burial depth, antenna orientation
/// (unit vector; x/y span the wall, z points into the layer stack).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeSample {
    pub x: f64,
    pub y: f64,
    pub depth: f64,
    pub orientation: [f64; 3],
}

/// Sampled nodes and accepted edges of one trial, exposed so the graph
/// construction can be cross-checked against external recomputation.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialGraph {
    pub nodes: Vec<NodeSample>,
    /// Edges `(i, j)` with `i < j`, in pair-scan order.
    pub edges: Vec<(usize, usize)>,
}

fn antenna_gain_db(antenna: &Antenna, cos_theta: f64) -> f64 {
    match antenna {
        Antenna::Isotropic => 0.0,
        Antenna::Cone {
            gain_dbi,
            beamwidth_rad,
        } => {
            let theta = cos_theta.clamp(-1.0, 1.0).acos();
            let edge = 2.0 * theta / beamwidth_rad;
            gain_dbi - 20.0 * edge * edge
        }
    }
}

fn validate(stack: &LayerStack<f64>, config: &NetSimConfig) -> Result<()> {
    let bad = |msg: String| Err(Error::InvalidConfig(msg));
    if !(config.density_per_m2 >= 0.0) || !config.density_per_m2.is_finite() {
        return bad(format!(
            "node density must be finite and >= 0, got {}",
            config.density_per_m2
        ));
    }
    for (label, v) in [
        ("wall width", config.wall_width_m),
        ("wall height", config.wall_height_m),
        ("max range", config.max_range_m),
    ] {
        if !(v > 0.0) || !v.is_finite() {
            return bad(format!("{label} must be positive and finite, got {v}"));
        }
    }
    if config.trials == 0 {
        return bad("need at least one trial".into());
    }
    let expected = config.density_per_m2 * config.wall_width_m * config.wall_height_m;
    if expected > 1.0e5 {
        return bad(format!(
            "expected node count {expected:.0} is unreasonably large; shrink the wall or density"
        ));
    }
    if let Antenna::Cone {
        gain_dbi,
        beamwidth_rad,
    } = config.antenna
    {
        if !gain_dbi.is_finite() {
            return bad(format!("antenna gain must be finite, got {gain_dbi}"));
        }
        if !(beamwidth_rad > 0.0 && beamwidth_rad <= std::f64::consts::PI) {
            return bad(format!(
                "beamwidth must lie in (0, pi], got {beamwidth_rad}"
            ));
        }
    }
    check_cutoff(stack, config)
}

/// Refuse configurations whose range cutoff could drop passing links.
///
/// When the cutoff is shorter than the wall diagonal, the strongest
/// plausible link at exactly the cutoff distance (boresight antennas, best
/// of several depth pairings) must miss the link rule by a wide margin -
/// 10 dB of SNR or 10x in capacity. Otherwise the O(N^2) pruning would bias
/// the connectivity statistics and the configuration is rejected.
fn check_cutoff(stack: &LayerStack<f64>, config: &NetSimConfig) -> Result<()> {
    let diag = (config.wall_width_m * config.wall_width_m
        + config.wall_height_m * config.wall_height_m)
        .sqrt();
    if config.max_range_m >= diag {
        return Ok(());
    }
    let boresight = match config.antenna {
        Antenna::Isotropic => 0.0,
        Antenna::Cone { gain_dbi, .. } => 2.0 * gain_dbi,
    };
    let t = stack.thickness();
    let depths = [t * 0.025, t * 0.5, t * 0.975];
    let params = ModelParams::default();
    for &d_tx in &depths {
        for &d_rx in &depths {
            let placement = Placement::new(d_tx, d_rx, config.max_range_m)?;
            let report = evaluate_link(stack, &placement, boresight, config, &params)?;
            let near_miss = match config.link_rule {
                LinkRule::SnrThresholdDb(th) => report.snr_db() >= th - 10.0,
                LinkRule::MinCapacityBps(c) => report.capacity_bps >= 0.1 * c,
            };
            if near_miss {
                return Err(Error::InvalidConfig(format!(
                    "max_range_m = {} truncates links that could still satisfy the link rule; \
                     increase it beyond the wall diagonal or tighten the rule",
                    config.max_range_m
                )));
            }
        }
    }
    Ok(())
}

/// Evaluate the channel between two sampled nodes: placement from their
/// depths and wall-plane distance, antenna gains from their orientations.
///
/// Symmetric in its arguments. Coincident or vertically stacked nodes (no
/// horizontal separation) are a [`Error::DegeneratePair`].
pub fn pair_link(
    stack: &LayerStack<f64>,
    config: &NetSimConfig,
    params: &ModelParams<f64>,
    a: &NodeSample,
    b: &NodeSample,
) -> Result<CapacityReport<f64>> {
    let (dx, dy, dz) = (b.x - a.x, b.y - a.y, b.depth - a.depth);
    let dist = (dx * dx + dy * dy + dz * dz).sqrt();
    let rho = (dx * dx + dy * dy).sqrt();
    if !(dist > 0.0) || !(rho > 0.0) {
        return Err(Error::DegeneratePair);
    }
    let u = [dx / dist, dy / dist, dz / dist];
    let dot = |o: &[f64; 3], v: &[f64; 3]| o[0] * v[0] + o[1] * v[1] + o[2] * v[2];
    let gain_db = antenna_gain_db(&config.antenna, dot(&a.orientation, &u))
        + antenna_gain_db(&config.antenna, -dot(&b.orientation, &u));
    let placement = Placement::new(a.depth, b.depth, rho)?;
    evaluate_link(stack, &placement, gain_db, config, params)
}

fn evaluate_link(
    stack: &LayerStack<f64>,
    placement: &Placement<f64>,
    antenna_gain_total_db: f64,
    config: &NetSimConfig,
    params: &ModelParams<f64>,
) -> Result<CapacityReport<f64>> {
    // A flat antenna gain scales received PSD exactly like transmit PSD.
    let budget = LinkBudget {
        tx_psd_w_per_hz: config.budget.tx_psd_w_per_hz
            * crate::num::db_to_power(antenna_gain_total_db),
        n_subbands: config.budget.n_subbands,
    };
    link_capacity(
        stack,
        placement,
        &config.band,
        &budget,
        params,
        config.combining,
    )
}

fn sample_nodes(rng: &mut ChaCha8Rng, stack: &LayerStack<f64>, config: &NetSimConfig) -> usize {
    let lambda =
        config.density_per_m2 * config.wall_width_m * config.wall_height_m;
    if lambda <= 0.0 {
        return 0;
    }
    let poisson = Poisson::new(lambda).expect("lambda validated positive");
    let _ = stack;
    poisson.sample(rng).round() as usize
}

fn sample_node(
    rng: &mut ChaCha8Rng,
    stack: &LayerStack<f64>,
    config: &NetSimConfig,
) -> NodeSample {
    let x = rng.gen_range(0.0..config.wall_width_m);
    let y = rng.gen_range(0.0..config.wall_height_m);
    let t = stack.thickness();
    let depth = loop {
        let d = rng.gen_range(0.0..t);
        if d > 0.0 {
            break d;
        }
    };
    let z = 2.0 * rng.gen::<f64>() - 1.0;
    let phi = 2.0 * std::f64::consts::PI * rng.gen::<f64>();
    let r = (1.0 - z * z).max(0.0).sqrt();
    NodeSample {
        x,
        y,
        depth,
        orientation: [r * phi.cos(), r * phi.sin(), z],
    }
}

/// Sample one trial's nodes and build its edge set.
///
/// Sampling is a pure function of `(config, seed, trial)`. The caller gets
/// the raw graph; [`run_netsim`] reduces it to metrics. The config is *not*
/// re-validated here.
pub fn trial_graph(
    stack: &LayerStack<f64>,
    config: &NetSimConfig,
    params: &ModelParams<f64>,
    seed: u64,
    trial: u64,
) -> Result<TrialGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);

    let n = sample_nodes(&mut rng, stack, config);
    let nodes: Vec<NodeSample> =
        (0..n).map(|_| sample_node(&mut rng, stack, config)).collect();

    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let (a, b) = (&nodes[i], &nodes[j]);
            let (dx, dy, dz) = (b.x - a.x, b.y - a.y, b.depth - a.depth);
            let dist = (dx * dx + dy * dy + dz * dz).sqrt();
            if dist > config.max_range_m {
                continue;
            }
            let report = match pair_link(stack, config, params, a, b) {
                Ok(report) => report,
                // Coincident or vertically stacked pairs (measure zero under
                // continuous sampling) cannot form an in-layer link.
                Err(Error::DegeneratePair) => continue,
                Err(e) => return Err(e),
            };
            let connected = match config.link_rule {
                LinkRule::SnrThresholdDb(th) => report.snr_db() >= th,
                LinkRule::MinCapacityBps(c) => report.capacity_bps >= c,
            };
            if connected {
                edges.push((i, j));
            }
        }
    }
    Ok(TrialGraph { nodes, edges })
}

fn metrics(graph: &TrialGraph) -> TrialResult {
    let n = graph.nodes.len();
    let n_links = graph.edges.len();
    let mut dsu = Dsu::new(n);
    let mut degree = vec![0usize; n];
    for &(i, j) in &graph.edges {
        dsu.union(i, j);
        degree[i] += 1;
        degree[j] += 1;
    }
    let (mean_degree, largest, isolated) = if n == 0 {
        (0.0, 0.0, 0.0)
    } else {
        let isolated = degree.iter().filter(|&&d| d == 0).count() as f64 / n as f64;
        (
            2.0 * n_links as f64 / n as f64,
            dsu.largest() as f64 / n as f64,
            isolated,
        )
    };
    TrialResult {
        n_nodes: n,
        n_links,
        mean_degree,
        largest_component_fraction: largest,
        isolated_fraction: isolated,
    }
}

fn run_trial(
    stack: &LayerStack<f64>,
    config: &NetSimConfig,
    params: &ModelParams<f64>,
    seed: u64,
    trial: u64,
) -> Result<TrialResult> {
    Ok(metrics(&trial_graph(stack, config, params, seed, trial)?))
}

fn aggregate(values: impl Iterator<Item = f64>) -> Aggregate {
    let xs: Vec<f64> = values.collect();
    let n = xs.len();
    if n == 0 {
        return Aggregate {
            mean: 0.0,
            stddev: 0.0,
        };
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    let stddev = if n < 2 {
        0.0
    } else {
        (xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64).sqrt()
    };
    Aggregate { mean, stddev }
}

/// Run the full Monte Carlo scenario.
///
/// The report depends only on `(config, seed)`; `parallelism` trades wall
/// time without touching the numbers.
pub fn run_netsim(
    stack: &LayerStack<f64>,
    config: &NetSimConfig,
    params: &ModelParams<f64>,
    seed: u64,
    parallelism: Parallelism,
) -> Result<NetSimReport> {
    validate(stack, config)?;
    let trials: Vec<TrialResult> = match parallelism {
        Parallelism::Serial => (0..config.trials)
            .map(|t| run_trial(stack, config, params, seed, t))
            .collect::<Result<_>>()?,
        Parallelism::Rayon => (0..config.trials)
            .into_par_iter()
            .map(|t| run_trial(stack, config, params, seed, t))
            .collect::<Result<_>>()?,
    };

    Ok(NetSimReport {
        nodes: aggregate(trials.iter().map(|t| t.n_nodes as f64)),
        links: aggregate(trials.iter().map(|t| t.n_links as f64)),
        mean_degree: aggregate(trials.iter().map(|t| t.mean_degree)),
        largest_component_fraction: aggregate(
            trials.iter().map(|t| t.largest_component_fraction),
        ),
        isolated_fraction: aggregate(trials.iter().map(|t| t.isolated_fraction)),
        trials,
    })
}

// ---------------------------------------------------------------------------
