// Copyright 2026 DACQO Contributors
// SPDX-License-Identifier: Apache-2.0

//! Layered circuit construction.
//!
//! Every synthesis path emits, step by step, an ordered gate list together
//! with the Trotter factors those gates are meant to implement (a
//! [`TrotterPlan`]). Gates are then packed into layers as soon as their
//! qubits are free, which never reorders gates sharing a qubit and so
//! leaves the circuit unitary unchanged.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::counterdiabatic::{self, Driving, InstantCoefficients, Schedule};
use crate::error::{Error, Result};
use crate::gates::{self, add_pair_terms, solve_gms_angles, Axis, Gate, GmsOp, StepAngles, ANGLE_EPSILON};
use crate::linalg::{self, check_dense_cap, DenseOperator};
use crate::pauli::{Pauli, PauliString, PauliSum};
use crate::problem::IsingProblem;

/// Largest analog block supported by the synthesis paths.
pub const MAX_BLOCK: usize = 6;
/// Qubit cap for dense circuit unitaries.
pub const CIRCUIT_UNITARY_CAP: usize = 10;
/// Search budget (visited nodes) of the exact edge-colouring search.
const COLOURING_BUDGET: usize = 2_000_000;

/// Ordered pair list of a qubit block.
fn block_pairs(block: &[usize]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (i, &a) in block.iter().enumerate() {
        for &b in &block[i + 1..] {
            out.push((a.min(b), a.max(b)));
        }
    }
    out
}

/// How the supplementary (Layer 3) blocks are placed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LayoutKind {
    /// Shifted blocks wrap around the end of the chain when `k | N`.
    #[default]
    Ring,
    /// Shifted blocks stop at the end of the chain.
    Linear,
}

/// Nearest-neighbour blocks of Layers 1 and 3.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockLayout {
    pub n: usize,
    pub k: usize,
    /// Layer 1: `[0..k)`, `[k..2k)`, … plus a shorter trailing block of at least two qubits.
    pub first: Vec<Vec<usize>>,
    /// Layer 3: blocks shifted by `⌊k/2⌋`.
    pub shifted: Vec<Vec<usize>>,
}

impl BlockLayout {
    pub fn new(n: usize, k: usize, kind: LayoutKind) -> Result<Self> {
        if k < 2 || k > n {
            return Err(Error::arg(format!("block size {k} must satisfy 2 ≤ k ≤ N = {n}")));
        }
        let mut first: Vec<Vec<usize>> = (0..n).step_by(k).map(|s| (s..(s + k).min(n)).collect()).collect();
        if first.last().is_some_and(|b| b.len() < 2) {
            first.pop();
        }
        let s = k / 2;
        let mut shifted = Vec::new();
        if n > k {
            let mut start = s;
            while start + k <= n {
                shifted.push((start..start + k).collect());
                start += k;
            }
            if kind == LayoutKind::Ring && n % k == 0 {
                shifted.push((n - k + s..n).chain(0..s).collect());
            }
        }
        Ok(BlockLayout { n, k, first, shifted })
    }

    /// Pairs covered by both a Layer-1 and a Layer-3 block.
    pub fn overlap_pairs(&self) -> Vec<(usize, usize)> {
        let a: BTreeSet<_> = self.first.iter().flat_map(|b| block_pairs(b)).collect();
        let b: BTreeSet<_> = self.shifted.iter().flat_map(|b| block_pairs(b)).collect();
        a.intersection(&b).copied().collect()
    }

    pub fn covered_pairs(&self) -> BTreeSet<(usize, usize)> {
        self.first.iter().chain(&self.shifted).flat_map(|b| block_pairs(b)).collect()
    }

    /// Pairs of the complete graph that no block touches.
    pub fn leftover_pairs(&self) -> Vec<(usize, usize)> {
        let covered = self.covered_pairs();
        (0..self.n)
            .flat_map(|a| (a + 1..self.n).map(move |b| (a, b)))
            .filter(|p| !covered.contains(p))
            .collect()
    }

    /// Block-pair instances of Layers 1 and 3, counted with multiplicity.
    pub fn block_pair_instances(&self) -> usize {
        self.first.iter().chain(&self.shifted).map(|b| b.len() * (b.len() - 1) / 2).sum()
    }
}

/// `(N − k)(N − k + 1)/2`.
pub fn leftover_pair_count(n: usize, k: usize) -> usize {
    (n - k) * (n - k + 1) / 2
}

/// Partitions `edges` into matchings, using `Δ` colours whenever the search finds them.
///
/// Edges are first ordered by the circle method (round-robin rounds of the
/// complete graph); an exact search then colours the most constrained edge
/// first, backtracking within a node budget. If no `Δ`- or `(Δ+1)`-colouring
/// is found in budget, a greedy colouring in round-robin order is returned.
pub fn edge_coloring(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<(usize, usize)>> {
    let mut edges: Vec<(usize, usize)> = edges.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
    edges.sort_unstable();
    edges.dedup();
    if edges.is_empty() {
        return Vec::new();
    }
    let round = |(a, b): (usize, usize)| round_robin_round(n, a, b);
    edges.sort_by_key(|&e| (round(e), e));
    let mut degree = vec![0usize; n];
    for &(a, b) in &edges {
        degree[a] += 1;
        degree[b] += 1;
    }
    let delta = degree.iter().copied().max().unwrap_or(0);
    let colours = [delta, delta + 1]
        .into_iter()
        .filter(|&c| c <= 64)
        .find_map(|c| exact_colouring(n, &edges, c))
        .unwrap_or_else(|| greedy_colouring(n, &edges));
    let count = colours.iter().copied().max().map_or(0, |c| c + 1);
    let mut classes = vec![Vec::new(); count];
    for (e, c) in edges.iter().zip(colours) {
        classes[c].push(*e);
    }
    classes.retain(|c| !c.is_empty());
    for c in &mut classes {
        c.sort_unstable();
    }
    classes
}

/// Round of pair `(a, b)` in the circle-method schedule of `K_n`.
fn round_robin_round(n: usize, a: usize, b: usize) -> usize {
    let m = if n % 2 == 0 { n } else { n + 1 };
    // vertex m−1 is fixed; the others sit on a circle of m−1 positions
    if b == m - 1 {
        return (2 * a) % (m - 1);
    }
    ((a + b) * (m / 2)) % (m - 1)
}

fn greedy_colouring(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let mut used = vec![0u128; n];
    edges
        .iter()
        .map(|&(a, b)| {
            let c = (!(used[a] | used[b])).trailing_zeros() as usize;
            used[a] |= 1 << c;
            used[b] |= 1 << c;
            c
        })
        .collect()
}

fn exact_colouring(n: usize, edges: &[(usize, usize)], colours: usize) -> Option<Vec<usize>> {
    struct Search<'a> {
        edges: &'a [(usize, usize)],
        used: Vec<u64>,
        colour: Vec<Option<usize>>,
        full: u64,
        budget: usize,
    }
    impl Search<'_> {
        fn run(&mut self, remaining: usize) -> Option<bool> {
            if remaining == 0 {
                return Some(true);
            }
            if self.budget == 0 {
                return None;
            }
            self.budget -= 1;
            let mut pick = None;
            let mut fewest = u32::MAX;
            for (i, &(a, b)) in self.edges.iter().enumerate() {
                if self.colour[i].is_some() {
                    continue;
                }
                let free = (self.full & !(self.used[a] | self.used[b])).count_ones();
                if free < fewest {
                    fewest = free;
                    pick = Some(i);
                    if free == 0 {
                        return Some(false);
                    }
                }
            }
            let i = pick?;
            let (a, b) = self.edges[i];
            let mut free = self.full & !(self.used[a] | self.used[b]);
            while free != 0 {
                let c = free.trailing_zeros() as usize;
                free &= free - 1;
                self.colour[i] = Some(c);
                self.used[a] |= 1 << c;
                self.used[b] |= 1 << c;
                match self.run(remaining - 1) {
                    Some(true) => return Some(true),
                    None => return None,
                    Some(false) => {}
                }
                self.used[a] &= !(1 << c);
                self.used[b] &= !(1 << c);
                self.colour[i] = None;
            }
            Some(false)
        }
    }
    let full = if colours >= 64 { u64::MAX } else { (1u64 << colours) - 1 };
    let mut s = Search { edges, used: vec![0; n], colour: vec![None; edges.len()], full, budget: COLOURING_BUDGET };
    match s.run(edges.len()) {
        Some(true) => Some(s.colour.into_iter().map(|c| c.expect("every edge coloured")).collect()),
        _ => None,
    }
}

/// One homogeneous sub-block of an inhomogeneous block.
#[derive(Clone, Debug, PartialEq)]
pub struct SubBlock {
    /// Local qubits conjugated by `R_z(π)` (bit `j` ↔ local qubit `j`).
    pub mask: u32,
    /// Homogeneous per-pair XX strength `θ cos²φ / 2`.
    pub xx: f64,
    /// Homogeneous per-pair XY strength `θ cosφ sinφ / 2`.
    pub xy: f64,
    /// GMS calls, including the sub-block's own YY canceller.
    pub ops: Vec<GmsOp>,
}

impl SubBlock {
    pub fn is_active(&self) -> bool {
        !self.ops.is_empty()
    }
}

/// Solution of one inhomogeneous block.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockSolution {
    pub k: usize,
    /// Local pairs `(a, b)`, `a < b`, in the order of the sign matrix columns.
    pub pairs: Vec<(usize, usize)>,
    pub sub_blocks: Vec<SubBlock>,
}

impl BlockSolution {
    pub fn active(&self) -> impl Iterator<Item = &SubBlock> {
        self.sub_blocks.iter().filter(|s| s.is_active())
    }
}

/// Sign `σ_a σ_b` that a pair picks up under a Z-flip mask.
pub fn mask_sign(mask: u32, a: usize, b: usize) -> f64 {
    if ((mask >> a) ^ (mask >> b)) & 1 == 1 {
        -1.0
    } else {
        1.0
    }
}

fn rank(rows: &[Vec<f64>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let m = DMatrix::from_fn(rows.len(), rows[0].len(), |i, j| rows[i][j]);
    m.rank(1e-9)
}

/// Flip masks for a `k`-block: identity first, then by popcount, keeping
/// each mask that raises the rank of the pair-sign matrix.
pub fn flip_masks(k: usize) -> Vec<u32> {
    let pairs = block_pairs(&(0..k).collect::<Vec<_>>());
    let mut candidates: Vec<u32> = (0..1u32 << (k - 1)).collect();
    candidates.sort_by_key(|m| (m.count_ones(), *m));
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut masks = Vec::new();
    for m in candidates {
        let row: Vec<f64> = pairs.iter().map(|&(a, b)| mask_sign(m, a, b)).collect();
        rows.push(row);
        if rank(&rows) == rows.len() {
            masks.push(m);
            if masks.len() == pairs.len() {
                break;
            }
        } else {
            rows.pop();
        }
    }
    masks
}

/// Solves the per-pair targets of a `k`-block as signed homogeneous sub-blocks.
///
/// Sub-block `i` contributes `σ_p(m_i)·(x_i XX + y_i (XY+YX) + z_i YY)` to pair
/// `p`; `Sᵀx = target_xx` and `Sᵀy = target_xy` fix the strengths, and each
/// sub-block cancels its own `z_i YY` inside its mask frame.
pub fn solve_block_inhomogeneity(
    k: usize,
    target_xx: &BTreeMap<(usize, usize), f64>,
    target_xy: &BTreeMap<(usize, usize), f64>,
) -> Result<BlockSolution> {
    if !(2..=MAX_BLOCK).contains(&k) {
        return Err(Error::arg(format!("block size {k} outside [2, {MAX_BLOCK}]")));
    }
    let pairs = block_pairs(&(0..k).collect::<Vec<_>>());
    for key in target_xx.keys().chain(target_xy.keys()) {
        if !pairs.contains(key) {
            return Err(Error::arg(format!("pair {key:?} is not an ordered pair of a {k}-block")));
        }
    }
    let masks = flip_masks(k);
    let m = pairs.len();
    if masks.len() != m {
        return Err(Error::Synthesis(format!("no invertible sign matrix for k = {k}")));
    }
    let s = DMatrix::from_fn(m, m, |i, p| mask_sign(masks[i], pairs[p].0, pairs[p].1));
    let lu = s.transpose().lu();
    let rhs = |t: &BTreeMap<(usize, usize), f64>| DVector::from_iterator(m, pairs.iter().map(|p| t.get(p).copied().unwrap_or(0.0)));
    let (a, b) = (rhs(target_xx), rhs(target_xy));
    let solve = |v: &DVector<f64>| {
        lu.solve(v).ok_or_else(|| Error::Synthesis(format!("singular sign matrix for k = {k}")))
    };
    let (mut x, mut y) = (solve(&a)?, solve(&b)?);
    let scale = a.amax().max(b.amax());
    for v in x.iter_mut().chain(y.iter_mut()) {
        if v.abs() <= 1e-12 * scale {
            *v = 0.0;
        }
    }
    let residual = (s.transpose() * &x - &a).amax().max((s.transpose() * &y - &b).amax());
    if residual > 1e-9 * scale.max(1.0) {
        return Err(Error::Synthesis(format!("block solve residual {residual:e}")));
    }
    let sub_blocks = masks
        .iter()
        .enumerate()
        .map(|(i, &mask)| SubBlock { mask, xx: x[i], xy: y[i], ops: solve_gms_angles(x[i], y[i]) })
        .collect();
    Ok(BlockSolution { k, pairs, sub_blocks })
}

/// Per-pair `(xx, xy, yy)` generator of each call of [`solve_gms_angles`],
/// derived from the targets alone.
fn target_factors(x: f64, y: f64) -> Vec<(f64, f64, f64)> {
    if x.abs() < ANGLE_EPSILON && y.abs() < ANGLE_EPSILON {
        Vec::new()
    } else if y.abs() < ANGLE_EPSILON {
        vec![(x, 0.0, 0.0)]
    } else if x.abs() < ANGLE_EPSILON {
        vec![(y, y, y), (0.0, 0.0, -y), (-y, 0.0, 0.0)]
    } else {
        let z = y * y / x;
        vec![(x, y, z), (0.0, 0.0, -z)]
    }
}

/// Synthesis strategy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Uniform couplings, one GMS per block.
    Homogeneous,
    /// Per-pair couplings via signed sub-blocks.
    Inhomogeneous,
    /// Two-qubit XX gates and single-qubit rotations only.
    Digital,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthesisOptions {
    pub method: Method,
    pub block_size: usize,
    #[serde(default)]
    pub driving: Driving,
    #[serde(default)]
    pub layout: LayoutKind,
}

impl SynthesisOptions {
    pub fn new(method: Method, block_size: usize) -> Self {
        SynthesisOptions { method, block_size, driving: Driving::Counterdiabatic, layout: LayoutKind::Ring }
    }

    pub fn driving(mut self, driving: Driving) -> Self {
        self.driving = driving;
        self
    }

    pub fn layout(mut self, layout: LayoutKind) -> Self {
        self.layout = layout;
        self
    }

    /// Homogeneous path for complete homogeneous instances, inhomogeneous otherwise.
    pub fn auto(problem: &IsingProblem, block_size: usize) -> Self {
        let homog = problem.is_homogeneous() && (problem.is_complete() || problem.couplings().is_empty());
        Self::new(if homog { Method::Homogeneous } else { Method::Inhomogeneous }, block_size)
    }
}

/// Gates of one layer act on pairwise-disjoint qubits.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Layer {
    pub gates: Vec<Gate>,
}

impl Layer {
    pub fn is_multiqubit(&self) -> bool {
        self.gates.iter().any(Gate::is_multiqubit)
    }
}

/// Layer counts of a circuit or one of its steps.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DepthReport {
    pub multiqubit_layers: usize,
    pub single_qubit_layers: usize,
    pub total: usize,
    /// Closed-form model value for the same span.
    pub analytic_total: f64,
}

impl DepthReport {
    pub fn new(multiqubit_layers: usize, single_qubit_layers: usize, analytic_total: f64) -> Self {
        DepthReport { multiqubit_layers, single_qubit_layers, total: multiqubit_layers + single_qubit_layers, analytic_total }
    }
}

/// Layered program over `width` qubits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub width: usize,
    pub method: Method,
    pub block_size: usize,
    /// Index of the first layer of each trotter step.
    pub step_offsets: Vec<usize>,
    pub layers: Vec<Layer>,
}

impl Circuit {
    pub fn trotter_steps(&self) -> usize {
        self.step_offsets.len()
    }

    pub fn gates(&self) -> impl Iterator<Item = &Gate> {
        self.layers.iter().flat_map(|l| &l.gates)
    }

    /// Layers `[start, end)` of step `s` (0-based).
    pub fn step_range(&self, s: usize) -> std::ops::Range<usize> {
        let start = self.step_offsets[s];
        let end = self.step_offsets.get(s + 1).copied().unwrap_or(self.layers.len());
        start..end
    }

    fn counts(&self, range: std::ops::Range<usize>) -> (usize, usize) {
        let multi = self.layers[range.clone()].iter().filter(|l| l.is_multiqubit()).count();
        (multi, range.len() - multi)
    }

    fn analytic_per_step(&self) -> f64 {
        let model = match self.method {
            Method::Homogeneous => LayerModel::homogeneous(self.width, self.block_size),
            Method::Inhomogeneous => LayerModel::inhomogeneous(self.width, self.block_size),
            Method::Digital => LayerModel::digital(self.width),
        };
        model.total()
    }

    pub fn depth_report(&self) -> DepthReport {
        let (m, s) = self.counts(0..self.layers.len());
        DepthReport::new(m, s, self.analytic_per_step() * self.trotter_steps() as f64)
    }

    /// Layer counts of step `s` (0-based).
    pub fn step_depth(&self, s: usize) -> DepthReport {
        let (m, sq) = self.counts(self.step_range(s));
        DepthReport::new(m, sq, self.analytic_per_step())
    }

    /// Structural checks: gate invariants and disjoint supports per layer.
    pub fn validate(&self) -> Result<()> {
        for (i, layer) in self.layers.iter().enumerate() {
            let mut seen = vec![false; self.width];
            for g in &layer.gates {
                g.validate(self.width)?;
                for &q in &g.qubits {
                    if std::mem::replace(&mut seen[q], true) {
                        return Err(Error::Synthesis(format!("layer {i} uses qubit {q} twice")));
                    }
                }
            }
        }
        Ok(())
    }

    /// Dense circuit unitary by explicit composition.
    pub fn unitary(&self) -> Result<DenseOperator> {
        check_dense_cap(self.width, CIRCUIT_UNITARY_CAP, "circuit unitary")?;
        let mut u = linalg::identity(1 << self.width);
        for g in self.gates() {
            u = linalg::embed(&g.unitary()?, &g.qubits, self.width) * u;
        }
        Ok(u)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("circuit serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let c: Circuit = serde_json::from_str(text)?;
        c.validate()?;
        Ok(c)
    }
}

/// Ordered Trotter factors `exp(−i G)` a circuit implements, per step.
///
/// Frame changes (`R_z(π)` sign flips, basis changes) are folded into the
/// factors they conjugate.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrotterPlan {
    pub width: usize,
    pub steps: Vec<Vec<PauliSum>>,
}

impl TrotterPlan {
    /// Sum of the generators of step `s`.
    pub fn step_generator(&self, s: usize) -> PauliSum {
        let mut out = PauliSum::new();
        for f in &self.steps[s] {
            out.add_sum(f, 1.0);
        }
        out.pruned(1e-15)
    }

    /// Ordered product of dense exponentials of the factors.
    pub fn unitary(&self) -> Result<DenseOperator> {
        check_dense_cap(self.width, CIRCUIT_UNITARY_CAP, "trotter reference")?;
        let mut u = linalg::identity(1 << self.width);
        for f in self.steps.iter().flatten() {
            u = linalg::evolve(&f.dense(self.width), 1.0) * u;
        }
        Ok(u)
    }
}

/// `H′(t_s)·Δ`: the first-order generator one step should implement.
pub fn expected_step_generator(problem: &IsingProblem, schedule: &Schedule, step: usize, driving: Driving) -> Result<PauliSum> {
    let t = schedule.midpoint(step)?;
    let c = InstantCoefficients::at(problem, schedule, t)?;
    let mut out = PauliSum::new();
    out.add_sum(&counterdiabatic::rotated_pauli_sum(problem, &c, driving), schedule.step_duration());
    Ok(out.pruned(1e-15))
}

/// Product of whole-term exponentials in the order XX → X → Z → YX → XY → Y.
pub fn ordered_term_product(problem: &IsingProblem, schedule: &Schedule, driving: Driving) -> Result<DenseOperator> {
    let n = problem.n_qubits();
    check_dense_cap(n, CIRCUIT_UNITARY_CAP, "ordered term product")?;
    let mut u = linalg::identity(1 << n);
    for step in 1..=schedule.trotter_steps() {
        let a = StepAngles::at(problem, schedule, step, driving)?;
        let mut groups = vec![PauliSum::new(); 6];
        for (&(p, q), &j) in problem.couplings() {
            let (xx, xy) = a.pair(j);
            groups[0].add(PauliString::pair(n, p, Pauli::X, q, Pauli::X), xx);
            groups[3].add(PauliString::pair(n, p, Pauli::Y, q, Pauli::X), xy);
            groups[4].add(PauliString::pair(n, p, Pauli::X, q, Pauli::Y), xy);
        }
        for (q, &h) in problem.fields().iter().enumerate() {
            let (x, y) = a.field(h);
            groups[1].add(PauliString::single(n, q, Pauli::X), x);
            groups[2].add(PauliString::single(n, q, Pauli::Z), a.theta_z());
            groups[5].add(PauliString::single(n, q, Pauli::Y), y);
        }
        for g in &groups {
            u = linalg::evolve(&g.dense(n), 1.0) * u;
        }
    }
    Ok(u)
}

/// Circuit with the plan it implements.
#[derive(Clone, Debug)]
pub struct Synthesized {
    pub circuit: Circuit,
    pub plan: TrotterPlan,
}

/// Sequential gate list of one step with its factors.
struct StepBuilder {
    n: usize,
    gates: Vec<Gate>,
    factors: Vec<PauliSum>,
}

impl StepBuilder {
    fn new(n: usize) -> Self {
        StepBuilder { n, gates: Vec::new(), factors: Vec::new() }
    }

    fn pair_factor(&self, pairs: &[(usize, usize)], signs: &dyn Fn(usize, usize) -> f64, t: (f64, f64, f64)) -> PauliSum {
        let mut f = PauliSum::new();
        for &(a, b) in pairs {
            let s = signs(a, b);
            add_pair_terms(&mut f, self.n, a, b, s * t.0, s * t.1, s * t.2);
        }
        f
    }

    /// Homogeneous `(x, y)` target on every pair of `block`.
    fn homogeneous_block(&mut self, block: &[usize], x: f64, y: f64) {
        let pairs = block_pairs(block);
        for (op, t) in solve_gms_angles(x, y).into_iter().zip(target_factors(x, y)) {
            self.gates.push(op.gate(block.to_vec()));
            let f = self.pair_factor(&pairs, &|_, _| 1.0, t);
            self.factors.push(f);
        }
    }

    fn flip(&mut self, block: &[usize], mask: u32) {
        for (j, &q) in block.iter().enumerate() {
            if mask >> j & 1 == 1 {
                self.gates.push(Gate::rotation(q, Axis::Z, std::f64::consts::PI));
            }
        }
    }

    /// Per-pair targets on `block` through signed sub-blocks.
    fn inhomogeneous_block(&mut self, block: &[usize], targets: &BTreeMap<(usize, usize), (f64, f64)>) -> Result<()> {
        let k = block.len();
        let local = |q: usize| block.iter().position(|&b| b == q).expect("pair inside block");
        let mut xx = BTreeMap::new();
        let mut xy = BTreeMap::new();
        for (&(a, b), &(x, y)) in targets {
            let (la, lb) = (local(a), local(b));
            let key = (la.min(lb), la.max(lb));
            xx.insert(key, x);
            xy.insert(key, y);
        }
        let sol = solve_block_inhomogeneity(k, &xx, &xy)?;
        let pairs = block_pairs(block);
        let mut frame = 0u32;
        for sub in sol.active() {
            self.flip(block, frame ^ sub.mask);
            frame = sub.mask;
            let signs = |a: usize, b: usize| mask_sign(sub.mask, local(a), local(b));
            for (op, t) in sub.ops.iter().zip(target_factors(sub.xx, sub.xy)) {
                self.gates.push(op.gate(block.to_vec()));
                let f = self.pair_factor(&pairs, &signs, t);
                self.factors.push(f);
            }
        }
        self.flip(block, frame);
        Ok(())
    }

    /// `exp(−iθ σ_q)` as `R_σ(2θ)`.
    fn single(&mut self, q: usize, axis: Axis, angle: f64) {
        if angle.abs() < ANGLE_EPSILON {
            return;
        }
        self.gates.push(Gate::rotation(q, axis, 2.0 * angle));
        let mut f = PauliSum::new();
        f.add(PauliString::single(self.n, q, axis.pauli()), angle);
        self.factors.push(f);
    }

    /// `exp(−iθ P_a X_b)` with `P_a ∈ {X, Y}` from a native XX gate.
    fn digital_pair(&mut self, a: usize, b: usize, pa: Pauli, pb: Pauli, angle: f64) {
        if angle.abs() < ANGLE_EPSILON {
            return;
        }
        let rotate = match (pa, pb) {
            (Pauli::Y, _) => Some(a),
            (_, Pauli::Y) => Some(b),
            _ => None,
        };
        if let Some(q) = rotate {
            self.gates.push(Gate::rotation(q, Axis::Z, -std::f64::consts::FRAC_PI_2));
        }
        self.gates.push(Gate::gms(vec![a, b], 2.0 * angle, 0.0));
        if let Some(q) = rotate {
            self.gates.push(Gate::rotation(q, Axis::Z, std::f64::consts::FRAC_PI_2));
        }
        let mut f = PauliSum::new();
        f.add(PauliString::pair(self.n, a, pa, b, pb), angle);
        self.factors.push(f);
    }
}

/// Fuses adjacent same-axis rotations on a qubit and drops identities.
fn fuse_rotations(gates: Vec<Gate>, width: usize) -> Vec<Gate> {
    let mut out: Vec<Option<Gate>> = Vec::with_capacity(gates.len());
    let mut history: Vec<Vec<usize>> = vec![Vec::new(); width];
    for g in gates {
        if g.kind == gates::GateKind::SingleQubit {
            let q = g.qubits[0];
            if let Some(&last) = history[q].last() {
                let prev = out[last].as_mut().expect("history points at live gates");
                if prev.kind == gates::GateKind::SingleQubit && prev.axis == g.axis {
                    prev.theta += g.theta;
                    if prev.theta.abs() < ANGLE_EPSILON {
                        out[last] = None;
                        history[q].pop();
                    }
                    continue;
                }
            }
        }
        for &q in &g.qubits {
            history[q].push(out.len());
        }
        out.push(Some(g));
    }
    out.into_iter().flatten().collect()
}

/// As-soon-as-possible packing that keeps multi- and single-qubit layers apart.
fn pack_layers(gates: Vec<Gate>, width: usize) -> Vec<Layer> {
    let mut layers: Vec<Layer> = Vec::new();
    let mut busy: Vec<Vec<bool>> = Vec::new();
    let mut frontier = vec![0usize; width];
    for g in gates {
        let start = g.qubits.iter().map(|&q| frontier[q]).max().unwrap_or(0);
        let slot = (start..layers.len()).find(|&i| {
            layers[i].is_multiqubit() == g.is_multiqubit() && g.qubits.iter().all(|&q| !busy[i][q])
        });
        let i = slot.unwrap_or_else(|| {
            layers.push(Layer::default());
            busy.push(vec![false; width]);
            layers.len() - 1
        });
        for &q in &g.qubits {
            busy[i][q] = true;
            frontier[q] = i + 1;
        }
        layers[i].gates.push(g);
    }
    layers
}

fn check_block_size(problem: &IsingProblem, k: usize) -> Result<()> {
    if !(2..=MAX_BLOCK).contains(&k) {
        return Err(Error::arg(format!("block size {k} outside [2, {MAX_BLOCK}]")));
    }
    if problem.n_qubits() < k {
        return Err(Error::arg(format!("block size {k} exceeds N = {}", problem.n_qubits())));
    }
    Ok(())
}

/// Shared layout of the digital-analog paths.
struct AnalogPlan {
    layout: Option<BlockLayout>,
    overlap: Vec<(usize, usize)>,
    /// Colour classes of the pairs realised as 2-qubit GMS.
    pair_classes: Vec<Vec<(usize, usize)>>,
}

impl AnalogPlan {
    fn new(problem: &IsingProblem, k: usize, layout: LayoutKind) -> Result<Self> {
        let n = problem.n_qubits();
        let interacting: BTreeSet<(usize, usize)> = problem.interacting_pairs().into_iter().collect();
        if k == 2 {
            // each pair is its own block; one colouring covers them all
            let pairs: Vec<_> = interacting.into_iter().collect();
            return Ok(AnalogPlan { layout: None, overlap: Vec::new(), pair_classes: edge_coloring(n, &pairs) });
        }
        let layout = BlockLayout::new(n, k, layout)?;
        let overlap: Vec<_> = layout.overlap_pairs().into_iter().filter(|p| interacting.contains(p)).collect();
        let covered = layout.covered_pairs();
        let leftover: Vec<_> = interacting.iter().filter(|p| !covered.contains(p)).copied().collect();
        let pair_classes = edge_coloring(n, &leftover);
        Ok(AnalogPlan { layout: Some(layout), overlap, pair_classes })
    }
}

fn single_qubit_layers(b: &mut StepBuilder, problem: &IsingProblem, a: &StepAngles) {
    let n = problem.n_qubits();
    let h = problem.fields();
    for q in 0..n {
        b.single(q, Axis::X, a.field(h[q]).0);
    }
    for q in 0..n {
        b.single(q, Axis::Z, a.theta_z());
    }
    for q in 0..n {
        b.single(q, Axis::Y, a.field(h[q]).1);
    }
}

fn analog_step(b: &mut StepBuilder, problem: &IsingProblem, plan: &AnalogPlan, a: &StepAngles, homogeneous: bool) -> Result<()> {
    let target = |p: (usize, usize)| a.pair(problem.coupling(p.0, p.1));
    if let Some(layout) = &plan.layout {
        for block in layout.first.iter().chain(&layout.shifted) {
            let pairs = block_pairs(block);
            if homogeneous {
                let (x, y) = target(pairs[0]);
                b.homogeneous_block(block, x, y);
            } else {
                let t: BTreeMap<_, _> = pairs.iter().map(|&p| (p, target(p))).collect();
                if t.values().any(|&(x, y)| x != 0.0 || y != 0.0) {
                    b.inhomogeneous_block(block, &t)?;
                }
            }
        }
        for &(p, q) in &plan.overlap {
            let (x, y) = target((p, q));
            b.homogeneous_block(&[p, q], -x, -y);
        }
    }
    for class in &plan.pair_classes {
        for &(p, q) in class {
            let (x, y) = target((p, q));
            b.homogeneous_block(&[p, q], x, y);
        }
    }
    single_qubit_layers(b, problem, a);
    Ok(())
}

fn digital_step(b: &mut StepBuilder, problem: &IsingProblem, classes: &[Vec<(usize, usize)>], a: &StepAngles) {
    let j = |p: usize, q: usize| problem.coupling(p, q);
    for class in classes {
        for &(p, q) in class {
            b.digital_pair(p, q, Pauli::X, Pauli::X, a.pair(j(p, q)).0);
        }
    }
    let h = problem.fields();
    for (q, &hq) in h.iter().enumerate() {
        b.single(q, Axis::X, a.field(hq).0);
    }
    for q in 0..problem.n_qubits() {
        b.single(q, Axis::Z, a.theta_z());
    }
    for (pa, pb) in [(Pauli::Y, Pauli::X), (Pauli::X, Pauli::Y)] {
        for class in classes {
            for &(p, q) in class {
                b.digital_pair(p, q, pa, pb, a.pair(j(p, q)).1);
            }
        }
    }
    for (q, &hq) in h.iter().enumerate() {
        b.single(q, Axis::Y, a.field(hq).1);
    }
}

/// Synthesizes a circuit and its Trotter plan.
pub fn synthesize(problem: &IsingProblem, schedule: &Schedule, options: &SynthesisOptions) -> Result<Synthesized> {
    let n = problem.n_qubits();
    let k = options.block_size;
    enum Path {
        Analog(AnalogPlan, bool),
        Digital(Vec<Vec<(usize, usize)>>),
    }
    let path = match options.method {
        Method::Homogeneous => {
            check_block_size(problem, k)?;
            if !problem.is_homogeneous() || !(problem.is_complete() || problem.couplings().is_empty()) {
                return Err(Error::arg(
                    "homogeneous synthesis needs equal all-to-all couplings and equal fields; use the inhomogeneous path",
                ));
            }
            Path::Analog(AnalogPlan::new(problem, k, options.layout)?, true)
        }
        Method::Inhomogeneous => {
            check_block_size(problem, k)?;
            Path::Analog(AnalogPlan::new(problem, k, options.layout)?, false)
        }
        Method::Digital => Path::Digital(edge_coloring(n, &problem.interacting_pairs())),
    };
    let mut layers = Vec::new();
    let mut step_offsets = Vec::new();
    let mut plan = TrotterPlan { width: n, steps: Vec::new() };
    for step in 1..=schedule.trotter_steps() {
        let a = StepAngles::at(problem, schedule, step, options.driving)?;
        let mut b = StepBuilder::new(n);
        match &path {
            Path::Analog(p, homog) => analog_step(&mut b, problem, p, &a, *homog)?,
            Path::Digital(classes) => digital_step(&mut b, problem, classes, &a),
        }
        step_offsets.push(layers.len());
        layers.extend(pack_layers(fuse_rotations(b.gates, n), n));
        plan.steps.push(b.factors);
    }
    let block_size = if options.method == Method::Digital { 2 } else { k };
    let circuit = Circuit { width: n, method: options.method, block_size, step_offsets, layers };
    circuit.validate()?;
    Ok(Synthesized { circuit, plan })
}

pub fn synthesize_homogeneous(problem: &IsingProblem, schedule: &Schedule, block_size: usize) -> Result<Circuit> {
    Ok(synthesize(problem, schedule, &SynthesisOptions::new(Method::Homogeneous, block_size))?.circuit)
}

pub fn synthesize_inhomogeneous(problem: &IsingProblem, schedule: &Schedule, block_size: usize) -> Result<Circuit> {
    Ok(synthesize(problem, schedule, &SynthesisOptions::new(Method::Inhomogeneous, block_size))?.circuit)
}

pub fn synthesize_digital_baseline(problem: &IsingProblem, schedule: &Schedule) -> Result<Circuit> {
    Ok(synthesize(problem, schedule, &SynthesisOptions::new(Method::Digital, 2))?.circuit)
}

/// Closed-form depth models.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DepthVariant {
    /// `9 + 2(N−k)(N−k+1)/N`.
    Homogeneous,
    /// `6 + 2(N−k)(N−k+1)/N`.
    ProgrammableXx,
    /// `6 + 2[(N−k)(N−k+1) − C(k,2)·M]/N` with `M` non-local blocks.
    ProgrammableXxNonlocal(usize),
}

pub fn analytic_depth(n: usize, k: usize, variant: DepthVariant) -> Result<f64> {
    if k < 2 || n < k {
        return Err(Error::arg(format!("need N ≥ k ≥ 2, got N = {n}, k = {k}")));
    }
    let np = ((n - k) * (n - k + 1)) as f64;
    let nf = n as f64;
    match variant {
        DepthVariant::Homogeneous => Ok(9.0 + 2.0 * np / nf),
        DepthVariant::ProgrammableXx => Ok(6.0 + 2.0 * np / nf),
        DepthVariant::ProgrammableXxNonlocal(m) => {
            let bracket = np - (k * (k - 1) / 2 * m) as f64;
            if bracket < 0.0 {
                return Err(Error::arg(format!("M = {m} removes more pairs than remain")));
            }
            Ok(6.0 + 2.0 * bracket / nf)
        }
    }
}

/// Per-step multi- and single-qubit layer counts of a closed-form model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayerModel {
    pub multiqubit: f64,
    pub single_qubit: f64,
}

impl LayerModel {
    pub fn total(&self) -> f64 {
        self.multiqubit + self.single_qubit
    }

    /// Digital baseline on `K_N`: `3χ′` XX layers and `2χ′ + 3` rotation layers,
    /// `χ′ = N − 1` (N even) or `N` (N odd).
    pub fn digital(n: usize) -> Self {
        let chi = if n < 2 {
            0.0
        } else if n % 2 == 0 {
            (n - 1) as f64
        } else {
            n as f64
        };
        LayerModel { multiqubit: 3.0 * chi, single_qubit: if chi > 0.0 { 2.0 * chi + 3.0 } else { 3.0 } }
    }

    /// Analytic homogeneous depth split into three rotation layers and the rest.
    pub fn homogeneous(n: usize, k: usize) -> Self {
        let total = analytic_depth(n, k.min(n).max(2), DepthVariant::Homogeneous).unwrap_or(f64::NAN);
        LayerModel { multiqubit: total - 3.0, single_qubit: 3.0 }
    }

    /// Inhomogeneous synthesis: each of layers 1 and 3 becomes `M = C(k,2)` signed
    /// sub-blocks (GMS + canceller each) framed by `M` flip layers.
    pub fn inhomogeneous(n: usize, k: usize) -> Self {
        let k = k.min(n).max(2);
        let m = (k * (k - 1) / 2) as f64;
        let np = ((n - k) * (n - k + 1)) as f64;
        LayerModel { multiqubit: 4.0 * m + 2.0 + 2.0 * np / n as f64, single_qubit: 2.0 * m + 3.0 }
    }

    /// Analytic programmable-XX depth split into three rotation layers and the rest.
    pub fn programmable_xx(n: usize, k: usize) -> Self {
        let total = analytic_depth(n, k.min(n).max(2), DepthVariant::ProgrammableXx).unwrap_or(f64::NAN);
        LayerModel { multiqubit: total - 3.0, single_qubit: 3.0 }
    }
}

/// Unitary of the ordered factor list of step `s` alone (for diagnostics).
pub fn factor_unitary(factors: &[PauliSum], n: usize) -> DenseOperator {
    factors.iter().fold(linalg::identity(1 << n), |u, f| linalg::evolve(&f.dense(n), 1.0) * u)
}
