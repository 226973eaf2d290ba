// Copyright 2026 DACQO Contributors
// SPDX-License-Identifier: Apache-2.0

//! Pauli strings, their products and dense matrices.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg::{DenseOperator, I, ONE, ZERO};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    /// Product `self · other = phase · result`.
    pub fn mul(self, other: Pauli) -> (Complex64, Pauli) {
        use Pauli::*;
        match (self, other) {
            (I, p) | (p, I) => (ONE, p),
            (X, X) | (Y, Y) | (Z, Z) => (ONE, I),
            (X, Y) => (crate::linalg::I, Z),
            (Y, X) => (-crate::linalg::I, Z),
            (Y, Z) => (crate::linalg::I, X),
            (Z, Y) => (-crate::linalg::I, X),
            (Z, X) => (crate::linalg::I, Y),
            (X, Z) => (-crate::linalg::I, Y),
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    fn flips(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    /// Phase picked up acting on basis bit `b`.
    fn phase(self, b: bool) -> Complex64 {
        match (self, b) {
            (Pauli::I, _) | (Pauli::X, _) => ONE,
            (Pauli::Y, false) => I,
            (Pauli::Y, true) => -I,
            (Pauli::Z, false) => ONE,
            (Pauli::Z, true) => -ONE,
        }
    }
}

/// A tensor product of single-qubit Paulis over `n` qubits.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliString {
    ops: Vec<Pauli>,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        PauliString { ops: vec![Pauli::I; n] }
    }

    /// String with the listed single-qubit factors and identity elsewhere.
    pub fn from_sparse(n: usize, factors: &[(usize, Pauli)]) -> Self {
        let mut s = Self::identity(n);
        for &(q, p) in factors {
            s.ops[q] = p;
        }
        s
    }

    pub fn single(n: usize, q: usize, p: Pauli) -> Self {
        Self::from_sparse(n, &[(q, p)])
    }

    pub fn pair(n: usize, a: usize, pa: Pauli, b: usize, pb: Pauli) -> Self {
        Self::from_sparse(n, &[(a, pa), (b, pb)])
    }

    /// Parses labels such as `"XIZY"` (qubit 0 first).
    pub fn parse(label: &str) -> Option<Self> {
        let ops = label
            .chars()
            .map(|c| match c {
                'I' => Some(Pauli::I),
                'X' => Some(Pauli::X),
                'Y' => Some(Pauli::Y),
                'Z' => Some(Pauli::Z),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()?;
        Some(PauliString { ops })
    }

    pub fn n_qubits(&self) -> usize {
        self.ops.len()
    }

    pub fn get(&self, q: usize) -> Pauli {
        self.ops[q]
    }

    pub fn set(&mut self, q: usize, p: Pauli) {
        self.ops[q] = p;
    }

    pub fn weight(&self) -> usize {
        self.ops.iter().filter(|&&p| p != Pauli::I).count()
    }

    /// Product `self · other = phase · result`.
    pub fn mul(&self, other: &PauliString) -> (Complex64, PauliString) {
        let mut phase = ONE;
        let ops = self
            .ops
            .iter()
            .zip(&other.ops)
            .map(|(&a, &b)| {
                let (ph, p) = a.mul(b);
                phase *= ph;
                p
            })
            .collect();
        (phase, PauliString { ops })
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let anti = self
            .ops
            .iter()
            .zip(&other.ops)
            .filter(|(&a, &b)| a != Pauli::I && b != Pauli::I && a != b)
            .count();
        anti % 2 == 0
    }

    fn flip_mask(&self) -> usize {
        let n = self.ops.len();
        self.ops
            .iter()
            .enumerate()
            .filter(|(_, p)| p.flips())
            .fold(0, |m, (q, _)| m | 1 << (n - 1 - q))
    }

    /// `P|x⟩ = phase · |y⟩`.
    pub fn apply_basis(&self, x: usize) -> (Complex64, usize) {
        let n = self.ops.len();
        let phase = self
            .ops
            .iter()
            .enumerate()
            .fold(ONE, |acc, (q, p)| acc * p.phase(x >> (n - 1 - q) & 1 == 1));
        (phase, x ^ self.flip_mask())
    }

    pub fn dense(&self) -> DenseOperator {
        let dim = 1usize << self.ops.len();
        let mut m = DenseOperator::zeros(dim, dim);
        for x in 0..dim {
            let (ph, y) = self.apply_basis(x);
            m[(y, x)] = ph;
        }
        m
    }

    /// `Tr(P A)/2^n`, the coefficient of this string in the Pauli expansion of `A`.
    pub fn coefficient_in(&self, a: &DenseOperator) -> Complex64 {
        let dim = a.nrows();
        let mut acc = ZERO;
        for y in 0..dim {
            let (ph, x) = self.apply_basis(y);
            acc += ph * a[(y, x)];
        }
        acc / dim as f64
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.ops {
            write!(f, "{}", p.symbol())?;
        }
        Ok(())
    }
}

/// Real linear combination of Pauli strings.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PauliSum {
    terms: BTreeMap<PauliString, f64>,
}

impl PauliSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, s: PauliString, c: f64) {
        *self.terms.entry(s).or_insert(0.0) += c;
    }

    pub fn add_sum(&mut self, other: &PauliSum, scale: f64) {
        for (s, &c) in &other.terms {
            self.add(s.clone(), c * scale);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PauliString, f64)> {
        self.terms.iter().map(|(s, &c)| (s, c))
    }

    pub fn coefficient(&self, s: &PauliString) -> f64 {
        self.terms.get(s).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Drops terms with `|c| ≤ tol`.
    pub fn pruned(&self, tol: f64) -> PauliSum {
        PauliSum {
            terms: self.terms.iter().filter(|(_, &c)| c.abs() > tol).map(|(s, &c)| (s.clone(), c)).collect(),
        }
    }

    /// Largest coefficient difference against `other` over the union of terms.
    pub fn max_deviation(&self, other: &PauliSum) -> f64 {
        let mut keys: Vec<&PauliString> = self.terms.keys().chain(other.terms.keys()).collect();
        keys.sort();
        keys.dedup();
        keys.into_iter()
            .map(|k| (self.coefficient(k) - other.coefficient(k)).abs())
            .fold(0.0, f64::max)
    }

    pub fn dense(&self, n: usize) -> DenseOperator {
        let dim = 1usize << n;
        let mut m = DenseOperator::zeros(dim, dim);
        for (s, &c) in &self.terms {
            debug_assert_eq!(s.n_qubits(), n);
            for x in 0..dim {
                let (ph, y) = s.apply_basis(x);
                m[(y, x)] += ph * c;
            }
        }
        m
    }

    /// Labels and coefficients, for reporting.
    pub fn labelled(&self) -> BTreeMap<String, f64> {
        self.terms.iter().map(|(s, &c)| (s.to_string(), c)).collect()
    }
}

/// Full Pauli decomposition of a Hermitian operator on `n` qubits (real parts).
pub fn decompose(a: &DenseOperator, n: usize) -> PauliSum {
    let mut out = PauliSum::new();
    let all = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    for code in 0..1usize << (2 * n) {
        let ops = (0..n).map(|q| all[code >> (2 * (n - 1 - q)) & 3]).collect();
        let s = PauliString { ops };
        let c = s.coefficient_in(a).re;
        if c != 0.0 {
            out.add(s, c);
        }
    }
    out
}
