// Copyright 2026 DACQO Contributors
// SPDX-License-Identifier: Apache-2.0

//! Ising instances, MIS encodings and brute-force ground truth.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::{self, Execution};

/// Largest instance the exhaustive solver accepts.
pub const BRUTE_FORCE_CAP: usize = 24;

/// `H_f = Σ_{i<j} J_ij Z_i Z_j + Σ_i h_i Z_i`, plus a constant offset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProblemDoc", into = "ProblemDoc")]
pub struct IsingProblem {
    n_qubits: usize,
    couplings: BTreeMap<(usize, usize), f64>,
    fields: Vec<f64>,
    offset: f64,
}

#[derive(Serialize, Deserialize)]
struct ProblemDoc {
    n: usize,
    #[serde(rename = "J", default)]
    j: Vec<(usize, usize, f64)>,
    #[serde(default)]
    h: Vec<f64>,
    #[serde(default)]
    offset: f64,
}

impl TryFrom<ProblemDoc> for IsingProblem {
    type Error = Error;

    fn try_from(doc: ProblemDoc) -> Result<Self> {
        let h = if doc.h.is_empty() { vec![0.0; doc.n] } else { doc.h };
        Ok(IsingProblem::new(doc.n, doc.j.into_iter().map(|(i, j, v)| ((i, j), v)), h)?.with_offset(doc.offset))
    }
}

impl From<IsingProblem> for ProblemDoc {
    fn from(p: IsingProblem) -> Self {
        ProblemDoc {
            n: p.n_qubits,
            j: p.couplings.iter().map(|(&(i, j), &v)| (i, j, v)).collect(),
            h: p.fields,
            offset: p.offset,
        }
    }
}

impl IsingProblem {
    /// Builds an instance; pairs may be given in either order but only once.
    pub fn new<I>(n_qubits: usize, couplings: I, fields: Vec<f64>) -> Result<Self>
    where
        I: IntoIterator<Item = ((usize, usize), f64)>,
    {
        if n_qubits == 0 {
            return Err(Error::arg("an Ising problem needs at least one qubit"));
        }
        if fields.len() != n_qubits {
            return Err(Error::arg(format!("expected {n_qubits} fields, got {}", fields.len())));
        }
        if fields.iter().any(|h| !h.is_finite()) {
            return Err(Error::arg("fields must be finite"));
        }
        let mut map = BTreeMap::new();
        for ((a, b), v) in couplings {
            if a == b {
                return Err(Error::arg(format!("self coupling ({a},{a})")));
            }
            if a >= n_qubits || b >= n_qubits {
                return Err(Error::arg(format!("coupling ({a},{b}) outside [0, {n_qubits})")));
            }
            if !v.is_finite() {
                return Err(Error::arg(format!("coupling ({a},{b}) is not finite")));
            }
            if map.insert((a.min(b), a.max(b)), v).is_some() {
                return Err(Error::arg(format!("duplicate coupling ({a},{b})")));
            }
        }
        Ok(IsingProblem { n_qubits, couplings: map, fields, offset: 0.0 })
    }

    /// All-to-all instance with equal couplings and fields.
    pub fn homogeneous(n: usize, j: f64, h: f64) -> Result<Self> {
        let pairs = (0..n).flat_map(|a| (a + 1..n).map(move |b| ((a, b), j)));
        Self::new(n, pairs.collect::<Vec<_>>(), vec![h; n])
    }

    pub fn with_offset(mut self, offset: f64) -> Self {
        self.offset = offset;
        self
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Stored couplings keyed by `(i, j)` with `i < j`.
    pub fn couplings(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.couplings
    }

    /// `J_ij`, zero when the pair is absent.
    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        self.couplings.get(&(i.min(j), i.max(j))).copied().unwrap_or(0.0)
    }

    pub fn fields(&self) -> &[f64] {
        &self.fields
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn is_homogeneous(&self) -> bool {
        let first_j = self.couplings.values().next();
        self.couplings.values().all(|v| Some(v) == first_j) && self.fields.iter().all(|h| *h == self.fields[0])
    }

    /// Every unordered pair carries a stored coupling.
    pub fn is_complete(&self) -> bool {
        self.couplings.len() == self.n_qubits * (self.n_qubits - 1) / 2
    }

    /// Pairs with a nonzero coupling.
    pub fn interacting_pairs(&self) -> Vec<(usize, usize)> {
        self.couplings.iter().filter(|(_, &v)| v != 0.0).map(|(&p, _)| p).collect()
    }

    /// `Σ_{i<j} J_ij s_i s_j + Σ_i h_i s_i` (offset excluded).
    pub fn classical_energy(&self, spins: &[i8]) -> Result<f64> {
        if spins.len() != self.n_qubits {
            return Err(Error::arg(format!("expected {} spins, got {}", self.n_qubits, spins.len())));
        }
        if spins.iter().any(|s| s.abs() != 1) {
            return Err(Error::arg("spins must be ±1"));
        }
        let pair: f64 = self.couplings.iter().map(|(&(i, j), v)| v * f64::from(spins[i] * spins[j])).sum();
        let field: f64 = self.fields.iter().zip(spins).map(|(h, &s)| h * f64::from(s)).sum();
        Ok(pair + field)
    }

    /// Energy of computational basis state `index` (bit 0 ↔ spin +1).
    pub fn energy_of_index(&self, index: usize) -> f64 {
        let n = self.n_qubits;
        let s = |q: usize| if index >> (n - 1 - q) & 1 == 0 { 1.0 } else { -1.0 };
        let pair: f64 = self.couplings.iter().map(|(&(i, j), v)| v * s(i) * s(j)).sum();
        let field: f64 = self.fields.iter().enumerate().map(|(q, h)| h * s(q)).sum();
        pair + field
    }

    /// Energy plus the stored constant offset.
    pub fn objective(&self, spins: &[i8]) -> Result<f64> {
        Ok(self.classical_energy(spins)? + self.offset)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

pub fn spins_of_index(index: usize, n: usize) -> Vec<i8> {
    (0..n).map(|q| if index >> (n - 1 - q) & 1 == 0 { 1 } else { -1 }).collect()
}

pub fn index_of_spins(spins: &[i8]) -> usize {
    spins.iter().fold(0, |acc, &s| acc << 1 | usize::from(s < 0))
}

/// `"+-+"`-style rendering of a spin configuration.
pub fn spin_label(spins: &[i8]) -> String {
    spins.iter().map(|&s| if s > 0 { '+' } else { '-' }).collect()
}

/// Minimum energy and every assignment attaining it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub energy: f64,
    /// Optimal spin configurations, ascending by basis index.
    pub bitstrings: Vec<Vec<i8>>,
}

impl GroundTruth {
    /// Basis indices of the optima (bit 0 ↔ +1).
    pub fn indices(&self) -> Vec<usize> {
        self.bitstrings.iter().map(|s| index_of_spins(s)).collect()
    }

    pub fn degeneracy(&self) -> usize {
        self.bitstrings.len()
    }
}

fn tie_tolerance(e: f64) -> f64 {
    1e-9 * e.abs().max(1.0)
}

pub fn brute_force_ground_state(problem: &IsingProblem) -> Result<GroundTruth> {
    brute_force_ground_state_with(problem, Execution::default())
}

/// Exhaustive search, optionally parallel over contiguous index chunks.
pub fn brute_force_ground_state_with(problem: &IsingProblem, exec: Execution) -> Result<GroundTruth> {
    let n = problem.n_qubits();
    if n > BRUTE_FORCE_CAP {
        return Err(Error::cap(format!("brute force limited to {BRUTE_FORCE_CAP} qubits, got {n}")));
    }
    let dim = 1usize << n;
    let chunk = 1usize << n.min(12);
    let chunks = dim / chunk;
    let partial = par::map_range(exec, chunks, |c| {
        let mut best = f64::INFINITY;
        let mut idx = Vec::new();
        for x in c * chunk..(c + 1) * chunk {
            let e = problem.energy_of_index(x);
            if best.is_infinite() || e < best - tie_tolerance(best) {
                best = e;
                idx.clear();
                idx.push(x);
            } else if (e - best).abs() <= tie_tolerance(best) {
                idx.push(x);
            }
        }
        (best, idx)
    });
    let best = partial.iter().map(|(e, _)| *e).fold(f64::INFINITY, f64::min);
    let indices: Vec<usize> = partial
        .into_iter()
        .flat_map(|(_, idx)| idx)
        .filter(|&x| (problem.energy_of_index(x) - best).abs() <= tie_tolerance(best))
        .collect();
    Ok(GroundTruth { energy: best, bitstrings: indices.into_iter().map(|x| spins_of_index(x, n)).collect() })
}

/// Node-weighted undirected graph.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GraphDoc", into = "GraphDoc")]
pub struct Graph {
    n_nodes: usize,
    edges: BTreeSet<(usize, usize)>,
    weights: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct GraphDoc {
    #[serde(alias = "n")]
    n_nodes: usize,
    #[serde(default)]
    edges: Vec<(usize, usize)>,
    #[serde(default)]
    weights: Vec<f64>,
}

impl TryFrom<GraphDoc> for Graph {
    type Error = Error;

    fn try_from(doc: GraphDoc) -> Result<Self> {
        let w = if doc.weights.is_empty() { vec![1.0; doc.n_nodes] } else { doc.weights };
        Graph::new(doc.n_nodes, doc.edges, w)
    }
}

impl From<Graph> for GraphDoc {
    fn from(g: Graph) -> Self {
        GraphDoc { n_nodes: g.n_nodes, edges: g.edges.into_iter().collect(), weights: g.weights }
    }
}

impl Graph {
    pub fn new(n_nodes: usize, edges: impl IntoIterator<Item = (usize, usize)>, weights: Vec<f64>) -> Result<Self> {
        if n_nodes == 0 {
            return Err(Error::arg("a graph needs at least one node"));
        }
        if weights.len() != n_nodes {
            return Err(Error::arg(format!("expected {n_nodes} weights, got {}", weights.len())));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::arg("weights must be finite and nonnegative"));
        }
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::arg(format!("self-loop at node {a}")));
            }
            if a >= n_nodes || b >= n_nodes {
                return Err(Error::arg(format!("edge ({a},{b}) outside [0, {n_nodes})")));
            }
            set.insert((a.min(b), a.max(b)));
        }
        Ok(Graph { n_nodes, edges: set, weights })
    }

    /// Erdős–Rényi graph `G(n, p)` with weights of the given class.
    pub fn random(n: usize, edge_probability: f64, seed: u64, class: InstanceClass) -> Result<Self> {
        if !(0.0..=1.0).contains(&edge_probability) {
            return Err(Error::arg("edge probability must lie in [0, 1]"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut edges = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if rng.random::<f64>() < edge_probability {
                    edges.push((a, b));
                }
            }
        }
        let weights = (0..n).map(|_| class.draw_magnitude(&mut rng, 1.0)).collect();
        Graph::new(n, edges, weights)
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `2 · max weight`, or 1 for an all-zero weighting.
    pub fn default_penalty(&self) -> f64 {
        let m = self.weights.iter().copied().fold(0.0, f64::max);
        if m > 0.0 {
            2.0 * m
        } else {
            1.0
        }
    }

    pub fn is_independent(&self, set: &[bool]) -> bool {
        self.edges.iter().all(|&(a, b)| !(set[a] && set[b]))
    }

    pub fn set_weight(&self, set: &[bool]) -> f64 {
        set.iter().zip(&self.weights).filter(|(&s, _)| s).map(|(_, w)| w).sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("graph serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Spin configuration to node selection, `x_i = (1 − s_i)/2`.
pub fn selection_of_spins(spins: &[i8]) -> Vec<bool> {
    spins.iter().map(|&s| s < 0).collect()
}

/// Encodes `−Σ w_i x_i + P Σ_E x_i x_j` with `x_i = (1 − s_i)/2`.
pub fn mis_to_ising(graph: &Graph, penalty: f64) -> Result<IsingProblem> {
    let wmax = graph.weights.iter().copied().fold(0.0, f64::max);
    if !(penalty.is_finite() && penalty > wmax && penalty > 0.0) {
        return Err(Error::arg(format!("penalty {penalty} must exceed the largest weight {wmax}")));
    }
    let n = graph.n_nodes;
    let mut h: Vec<f64> = graph.weights.iter().map(|w| w / 2.0).collect();
    let mut offset = -graph.weights.iter().sum::<f64>() / 2.0;
    let quarter = penalty / 4.0;
    for &(a, b) in &graph.edges {
        h[a] -= quarter;
        h[b] -= quarter;
        offset += quarter;
    }
    let couplings = graph.edges.iter().map(|&e| (e, quarter));
    Ok(IsingProblem::new(n, couplings.collect::<Vec<_>>(), h)?.with_offset(offset))
}

/// Coefficient distribution of random instances.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceClass {
    /// One shared value (unit weights for graphs).
    Homogeneous,
    /// Values from `{0.5, 1.0}`.
    Mixed,
    /// Values from `uniform(0.1, 1.0)`.
    FullyNonuniform,
}

impl InstanceClass {
    pub const ALL: [InstanceClass; 3] = [InstanceClass::Homogeneous, InstanceClass::Mixed, InstanceClass::FullyNonuniform];

    pub fn name(self) -> &'static str {
        match self {
            InstanceClass::Homogeneous => "homogeneous",
            InstanceClass::Mixed => "mixed",
            InstanceClass::FullyNonuniform => "fully_nonuniform",
        }
    }

    fn draw_magnitude<R: Rng>(self, rng: &mut R, shared: f64) -> f64 {
        match self {
            InstanceClass::Homogeneous => shared,
            InstanceClass::Mixed => {
                if rng.random::<bool>() {
                    0.5
                } else {
                    1.0
                }
            }
            InstanceClass::FullyNonuniform => rng.random_range(0.1..1.0),
        }
    }
}

/// Seeded all-to-all spin glass with random signs.
pub fn random_spin_glass(n: usize, seed: u64, mode: InstanceClass) -> Result<IsingProblem> {
    if n == 0 {
        return Err(Error::arg("n must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let signed = |rng: &mut ChaCha8Rng, shared: f64| {
        let m = mode.draw_magnitude(rng, shared);
        if rng.random::<bool>() {
            m
        } else {
            -m
        }
    };
    if mode == InstanceClass::Homogeneous {
        let (mj, mh) = (rng.random_range(0.1..1.0), rng.random_range(0.1..1.0));
        let j = signed(&mut rng, mj);
        let h = signed(&mut rng, mh);
        return IsingProblem::homogeneous(n, j, h);
    }
    let mut couplings = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            couplings.push(((a, b), signed(&mut rng, 1.0)));
        }
    }
    let h = (0..n).map(|_| signed(&mut rng, 1.0)).collect();
    IsingProblem::new(n, couplings, h)
}
