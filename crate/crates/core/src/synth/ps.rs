use std::f64::consts::{PI, TAU};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::LabeledDataset;
use crate::error::{Error, Result};
use crate::geometry::BallPoint;
use crate::rng::child_rng;

/// Distance used to pick the nearest existing nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PsDistance {
    /// `r_s + r_t + 2 ln(theta_st / 2)`.
    #[default]
    Approximate,
    /// Hyperbolic law of cosines.
    Exact,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PsSpec {
    pub nodes: usize,
    pub avg_degree: f64,
    pub gamma: f64,
    pub temperature: f64,
    pub distance: PsDistance,
}

impl Default for PsSpec {
    fn default() -> Self {
        Self {
            nodes: 500,
            avg_degree: 4.0,
            gamma: 2.25,
            temperature: 0.0,
            distance: PsDistance::Approximate,
        }
    }
}

impl PsSpec {
    pub fn validate(&self) -> Result<()> {
        if self.nodes < 2 {
            return Err(Error::Invalid(format!(
                "need at least 2 nodes, got {}",
                self.nodes
            )));
        }
        if !(self.avg_degree >= 2.0 && self.avg_degree.is_finite()) {
            return Err(Error::Invalid(format!(
                "average degree must be >= 2, got {}",
                self.avg_degree
            )));
        }
        if !(self.gamma > 2.0 && self.gamma.is_finite()) {
            return Err(Error::Invalid(format!(
                "gamma must exceed 2, got {}",
                self.gamma
            )));
        }
        if self.temperature != 0.0 {
            return Err(Error::Unsupported(format!(
                "only temperature 0 is supported, got {}",
                self.temperature
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsParams {
    pub nodes: usize,
    pub m: usize,
    pub beta: f64,
    pub temperature: f64,
}

/// A node in polar coordinates of the curvature -1 plane. `r` is the radius
/// after the last arrival; `birth_r = 2 ln(creation_index)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsNode {
    pub creation_index: usize,
    pub birth_r: f64,
    pub r: f64,
    pub theta: f64,
}

/// Edge from a newly created node to an existing one, as 0-based node indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PsEdge {
    pub new_node: usize,
    pub existing_node: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsNetwork {
    pub nodes: Vec<PsNode>,
    pub edges: Vec<PsEdge>,
    pub params: PsParams,
}

impl PsNetwork {
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.nodes.len()];
        for e in &self.edges {
            deg[e.new_node] += 1;
            deg[e.existing_node] += 1;
        }
        deg
    }
}

fn angular_gap(a: f64, b: f64) -> f64 {
    PI - (PI - (a - b).abs()).abs()
}

/// Grows a popularity-similarity network at zero temperature.
///
/// Node `t` (1-based) is born at radius `R_t = 2 ln t` with a uniform angle;
/// existing nodes drift outward to `beta R_s + (1 - beta) R_t`, and the
/// newcomer links to its `min(m, t - 1)` nearest predecessors. With these
/// radii the approximate distance `R_s + R_t + 2 ln(theta / 2)` ranks
/// candidates by `beta ln s + ln theta`, which yields degree exponent
/// `1 + 1 / beta = gamma`.
pub fn ps_generate<R: Rng>(spec: &PsSpec, rng: &mut R) -> Result<PsNetwork> {
    spec.validate()?;
    let m = ((spec.avg_degree / 2.0).round() as usize).max(1);
    let beta = 1.0 / (spec.gamma - 1.0);
    let n = spec.nodes;
    let mut nodes: Vec<PsNode> = Vec::with_capacity(n);
    let mut edges = Vec::with_capacity(n * m);
    let mut order: Vec<(f64, usize)> = Vec::with_capacity(n);
    for t in 1..=n {
        let r_t = 2.0 * (t as f64).ln();
        let theta = rng.gen::<f64>() * TAU;
        order.clear();
        for (s, node) in nodes.iter().enumerate() {
            let r_s = beta * node.birth_r + (1.0 - beta) * r_t;
            let gap = angular_gap(node.theta, theta);
            let d = match spec.distance {
                PsDistance::Approximate => r_s + r_t + 2.0 * (gap / 2.0).ln(),
                PsDistance::Exact => {
                    let c = r_s.cosh() * r_t.cosh() - r_s.sinh() * r_t.sinh() * gap.cos();
                    c.max(1.0).acosh()
                }
            };
            order.push((d, s));
        }
        order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        edges.extend(order.iter().take(m.min(t - 1)).map(|&(_, s)| PsEdge {
            new_node: t - 1,
            existing_node: s,
        }));
        nodes.push(PsNode {
            creation_index: t,
            birth_r: r_t,
            r: r_t,
            theta,
        });
    }
    let r_n = 2.0 * (n as f64).ln();
    for node in &mut nodes {
        node.r = beta * node.birth_r + (1.0 - beta) * r_n;
    }
    Ok(PsNetwork {
        nodes,
        edges,
        params: PsParams {
            nodes: n,
            m,
            beta,
            temperature: spec.temperature,
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LabelSpec {
    pub num_labels: usize,
    pub size_min: usize,
    pub size_max: usize,
    pub propagate_prob: f64,
    pub max_attempts: usize,
}

impl Default for LabelSpec {
    fn default() -> Self {
        Self {
            num_labels: 10,
            size_min: 20,
            size_max: 50,
            propagate_prob: 0.8,
            max_attempts: 1000,
        }
    }
}

impl LabelSpec {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.propagate_prob) {
            return Err(Error::Invalid(format!(
                "propagation probability must lie in [0, 1], got {}",
                self.propagate_prob
            )));
        }
        if self.size_min > self.size_max || self.size_max == 0 {
            return Err(Error::Invalid(format!(
                "bad size range {}..={}",
                self.size_min, self.size_max
            )));
        }
        if self.max_attempts == 0 {
            return Err(Error::Invalid("max_attempts must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelAssignment {
    /// Sorted node indices per label.
    pub sets: Vec<Vec<usize>>,
    pub pioneers: Vec<usize>,
    pub size_range: (usize, usize),
    pub propagate_prob: f64,
}

/// Seeds each label at a uniform pioneer and replays the network growth:
/// a node created after the pioneer whose creation edges reach a labeled
/// node gets one chance, with probability `propagate_prob`, to join.
/// Labels whose final size falls outside the range are redrawn.
pub fn propagate_labels<R: Rng>(
    net: &PsNetwork,
    spec: &LabelSpec,
    rng: &mut R,
) -> Result<LabelAssignment> {
    spec.validate()?;
    let n = net.nodes.len();
    if n == 0 {
        return Err(Error::Empty("network"));
    }
    let mut out_edges: Vec<Vec<usize>> = vec![Vec::new(); n];
    for e in &net.edges {
        out_edges[e.new_node].push(e.existing_node);
    }
    let mut sets = Vec::with_capacity(spec.num_labels);
    let mut pioneers = Vec::with_capacity(spec.num_labels);
    let mut labeled = vec![false; n];
    for _ in 0..spec.num_labels {
        let mut accepted = None;
        for _ in 0..spec.max_attempts {
            labeled.iter_mut().for_each(|l| *l = false);
            let pioneer = rng.gen_range(0..n);
            labeled[pioneer] = true;
            let mut size = 1;
            for t in pioneer + 1..n {
                if out_edges[t].iter().any(|&s| labeled[s])
                    && rng.gen::<f64>() < spec.propagate_prob
                {
                    labeled[t] = true;
                    size += 1;
                }
            }
            if (spec.size_min..=spec.size_max).contains(&size) {
                accepted = Some(pioneer);
                break;
            }
        }
        let pioneer = accepted.ok_or(Error::LabelGeneration {
            attempts: spec.max_attempts,
            min: spec.size_min,
            max: spec.size_max,
        })?;
        pioneers.push(pioneer);
        sets.push((0..n).filter(|&i| labeled[i]).collect());
    }
    Ok(LabelAssignment {
        sets,
        pioneers,
        size_range: (spec.size_min, spec.size_max),
        propagate_prob: spec.propagate_prob,
    })
}

/// Final node coordinates in the Poincaré disk: radius `tanh(r / 2)`, angle kept.
pub fn hyperbolic_embedding_of(net: &PsNetwork) -> Result<Vec<BallPoint>> {
    net.nodes
        .iter()
        .map(|node| {
            let rho = (node.r / 2.0).tanh();
            BallPoint::new(vec![rho * node.theta.cos(), rho * node.theta.sin()])
        })
        .collect()
}

/// Ball-model dataset of the embedded nodes with label `k` named `"k"`.
pub fn ps_dataset(net: &PsNetwork, labels: &LabelAssignment) -> Result<LabeledDataset> {
    let points = hyperbolic_embedding_of(net)?;
    let mut per_node = vec![Vec::new(); points.len()];
    for (k, set) in labels.sets.iter().enumerate() {
        for &i in set {
            per_node[i].push(k);
        }
    }
    let classes = (0..labels.sets.len()).map(|k| k.to_string()).collect();
    LabeledDataset::from_ball(points, classes, per_node)
}

/// Seeded network, label sets and dataset in one call.
pub fn gen_ps_labeled(
    spec: &PsSpec,
    labels: &LabelSpec,
    seed: u64,
) -> Result<(PsNetwork, LabelAssignment, LabeledDataset)> {
    let net = ps_generate(spec, &mut child_rng(seed, &[0]))?;
    let assignment = propagate_labels(&net, labels, &mut child_rng(seed, &[1]))?;
    let data = ps_dataset(&net, &assignment)?;
    Ok((net, assignment, data))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn net(n: usize, seed: u64) -> PsNetwork {
        let spec = PsSpec {
            nodes: n,
            ..Default::default()
        };
        ps_generate(&spec, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
    }

    #[test]
    fn seeded_pipeline_is_reproducible() {
        let spec = PsSpec {
            nodes: 200,
            ..Default::default()
        };
        let labels = LabelSpec {
            num_labels: 3,
            size_min: 5,
            size_max: 30,
            ..Default::default()
        };
        let (net, a, d) = gen_ps_labeled(&spec, &labels, 9).unwrap();
        assert_eq!(d.len(), 200);
        assert_eq!(a.sets.len(), 3);
        assert_eq!(net.edges.len(), 1 + 2 * 198);
        assert_eq!(gen_ps_labeled(&spec, &labels, 9).unwrap().2, d);
        assert_ne!(gen_ps_labeled(&spec, &labels, 10).unwrap().2, d);
    }

    #[test]
    fn three_nodes_forced_structure() {
        let g = net(3, 1);
        assert_eq!(g.params.m, 2);
        let mut e: Vec<(usize, usize)> = g
            .edges
            .iter()
            .map(|e| (e.new_node, e.existing_node))
            .collect();
        e.sort_unstable();
        assert_eq!(e, vec![(1, 0), (2, 0), (2, 1)]);
    }

    #[test]
    fn edge_count_and_order() {
        let g = net(500, 2);
        assert_eq!(g.edges.len(), 997);
        assert!(g.edges.windows(2).all(|w| w[0].new_node <= w[1].new_node));
        assert!(g.edges.iter().all(|e| e.existing_node < e.new_node));
        let avg = 2.0 * g.edges.len() as f64 / 500.0;
        assert!((avg - 3.988).abs() < 1e-12);
    }

    #[test]
    fn degree_distribution_is_heavy_tailed() {
        for seed in 0..5 {
            let mut deg = net(500, seed).degrees();
            deg.sort_unstable();
            let median = deg[deg.len() / 2];
            assert!(*deg.last().unwrap() >= 10 * median, "seed {seed}: {deg:?}");
        }
    }

    #[test]
    fn radii_follow_drift() {
        let g = net(50, 3);
        let beta = 1.0 / 1.25;
        for node in &g.nodes {
            assert_eq!(node.birth_r, 2.0 * (node.creation_index as f64).ln());
            let want = beta * node.birth_r + (1.0 - beta) * 2.0 * 50f64.ln();
            assert!((node.r - want).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_distance_variant_runs() {
        let spec = PsSpec {
            nodes: 200,
            distance: PsDistance::Exact,
            ..Default::default()
        };
        let g = ps_generate(&spec, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        assert_eq!(g.edges.len(), 397);
    }

    #[test]
    fn rejects_bad_specs() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let bad = [
            PsSpec {
                temperature: 0.5,
                ..Default::default()
            },
            PsSpec {
                nodes: 1,
                ..Default::default()
            },
            PsSpec {
                gamma: 2.0,
                ..Default::default()
            },
            PsSpec {
                avg_degree: 1.0,
                ..Default::default()
            },
        ];
        for spec in bad {
            assert!(ps_generate(&spec, &mut rng).is_err());
        }
    }

    fn labels(g: &PsNetwork, spec: LabelSpec, seed: u64) -> LabelAssignment {
        propagate_labels(g, &spec, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
    }

    #[test]
    fn zero_probability_keeps_pioneer_only() {
        let g = net(40, 5);
        let a = labels(
            &g,
            LabelSpec {
                num_labels: 4,
                size_min: 1,
                size_max: 1,
                propagate_prob: 0.0,
                ..Default::default()
            },
            1,
        );
        for (set, p) in a.sets.iter().zip(&a.pioneers) {
            assert_eq!(set, &vec![*p]);
        }
    }

    #[test]
    fn certain_propagation_matches_replay() {
        let g = net(10, 6);
        let a = labels(
            &g,
            LabelSpec {
                num_labels: 5,
                size_min: 1,
                size_max: 10,
                propagate_prob: 1.0,
                ..Default::default()
            },
            2,
        );
        for (set, &p) in a.sets.iter().zip(&a.pioneers) {
            // Independent replay: iterate edges in recorded order.
            let mut on = [false; 10];
            on[p] = true;
            for e in &g.edges {
                if e.new_node > p && on[e.existing_node] {
                    on[e.new_node] = true;
                }
            }
            let want: Vec<usize> = (0..10).filter(|&i| on[i]).collect();
            assert_eq!(set, &want);
        }
    }

    #[test]
    fn labels_are_connected_and_sized() {
        let g = net(500, 7);
        let spec = LabelSpec::default();
        let a = labels(&g, spec.clone(), 3);
        assert_eq!(a.sets.len(), 10);
        for (set, &p) in a.sets.iter().zip(&a.pioneers) {
            assert!(set.contains(&p));
            assert!((spec.size_min..=spec.size_max).contains(&set.len()));
            for &i in set.iter().filter(|&&i| i != p) {
                assert!(i > p);
                assert!(g
                    .edges
                    .iter()
                    .any(|e| e.new_node == i && set.binary_search(&e.existing_node).is_ok()));
            }
        }
    }

    #[test]
    fn impossible_range_fails() {
        let g = net(30, 8);
        let spec = LabelSpec {
            size_min: 100,
            size_max: 200,
            max_attempts: 20,
            ..Default::default()
        };
        let err = propagate_labels(&g, &spec, &mut ChaCha8Rng::seed_from_u64(0)).unwrap_err();
        assert!(matches!(
            err,
            Error::LabelGeneration {
                min: 100,
                max: 200,
                ..
            }
        ));
    }

    #[test]
    fn embedding_preserves_radial_order() {
        let g = net(100, 9);
        let pts = hyperbolic_embedding_of(&g).unwrap();
        for w in g.nodes.windows(2).zip(pts.windows(2)) {
            let (nodes, b) = w;
            assert!(nodes[0].r < nodes[1].r);
            assert!(b[0].norm_sq() < b[1].norm_sq());
        }
        let origin = PsNetwork {
            nodes: vec![PsNode {
                creation_index: 1,
                birth_r: 0.0,
                r: 0.0,
                theta: 1.0,
            }],
            edges: vec![],
            params: g.params,
        };
        assert_eq!(hyperbolic_embedding_of(&origin).unwrap()[0].norm_sq(), 0.0);
        let a = labels(
            &g,
            LabelSpec {
                size_min: 1,
                size_max: 100,
                ..Default::default()
            },
            4,
        );
        let d = ps_dataset(&g, &a).unwrap();
        assert_eq!(d.len(), 100);
        assert_eq!(d.num_classes(), 10);
    }
}
