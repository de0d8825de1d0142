//! Weighted k-local Hamiltonians on `n` qubits.
//!
//! A term is either a Pauli word over `{X, Y, Z}` or a dense Hermitian block,
//! scaled by a real weight. Norms are cached at construction so that the
//! total strength `M`, the per-site contributions `e(s)` and their sum `L` are
//! available without touching the `2^n` space.

use std::collections::BTreeSet;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::depthd::BrickworkCircuit;
use crate::kernel::{self, gather, mask_of, scatter};
use crate::{Error, OracleCap, Result, C64};

const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    fn from_char(c: char) -> Option<Self> {
        match c {
            'X' | 'x' => Some(Pauli::X),
            'Y' | 'y' => Some(Pauli::Y),
            'Z' | 'z' => Some(Pauli::Z),
            _ => None,
        }
    }

    fn as_char(self) -> char {
        match self {
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Operator content of a term, before weighting.
#[derive(Debug, Clone, PartialEq)]
pub enum TermBody {
    Pauli(Vec<Pauli>),
    Dense(DMatrix<C64>),
}

/// `P|j> = phase(j) |j ^ flip>` for a Pauli word, with local bit `i` on letter `i`.
fn pauli_action(word: &[Pauli], local: usize) -> (usize, C64) {
    let mut flip = 0usize;
    let mut phase = C64::new(1.0, 0.0);
    for (i, p) in word.iter().enumerate() {
        let bit = (local >> i) & 1;
        match p {
            Pauli::X => flip |= 1 << i,
            Pauli::Y => {
                flip |= 1 << i;
                // Y|0> = i|1>, Y|1> = -i|0>
                phase *= if bit == 0 { C64::new(0.0, 1.0) } else { C64::new(0.0, -1.0) };
            }
            Pauli::Z => {
                if bit == 1 {
                    phase = -phase;
                }
            }
        }
    }
    (local ^ flip, phase)
}

fn pauli_matrix(word: &[Pauli]) -> DMatrix<C64> {
    let dim = 1usize << word.len();
    let mut m = DMatrix::zeros(dim, dim);
    for c in 0..dim {
        let (r, ph) = pauli_action(word, c);
        m[(r, c)] = ph;
    }
    m
}

/// Spectral norm of a Hermitian matrix.
pub(crate) fn hermitian_norm(m: &DMatrix<C64>) -> f64 {
    m.clone()
        .symmetric_eigenvalues()
        .iter()
        .fold(0.0f64, |acc, v| acc.max(v.abs()))
}

/// One weighted local interaction `weight * body` on an ordered qubit set.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalTerm {
    qubits: Vec<usize>,
    body: TermBody,
    weight: f64,
    norm: f64,
}

fn validate_qubits(qubits: &[usize]) -> Result<()> {
    if qubits.is_empty() {
        return Err(Error::Malformed("term has no qubits".into()));
    }
    let mut seen = BTreeSet::new();
    for &q in qubits {
        if !seen.insert(q) {
            return Err(Error::DuplicateQubit(q));
        }
    }
    Ok(())
}

impl LocalTerm {
    /// Pauli-word term, e.g. `LocalTerm::pauli(vec![0, 2], "XZ", 0.5)`.
    ///
    /// Qubits are reordered ascending together with their letters.
    pub fn pauli(qubits: Vec<usize>, word: &str, weight: f64) -> Result<Self> {
        validate_qubits(&qubits)?;
        let letters: Vec<Pauli> = word
            .chars()
            .map(|c| Pauli::from_char(c).ok_or_else(|| Error::Malformed(format!("invalid Pauli letter {c:?}"))))
            .collect::<Result<_>>()?;
        if letters.len() != qubits.len() {
            return Err(Error::Malformed(format!(
                "Pauli word {word:?} has {} letters for {} qubits",
                letters.len(),
                qubits.len()
            )));
        }
        if !weight.is_finite() {
            return Err(Error::Malformed("non-finite weight".into()));
        }
        let mut pairs: Vec<(usize, Pauli)> = qubits.into_iter().zip(letters).collect();
        pairs.sort_by_key(|p| p.0);
        let (qubits, letters) = pairs.into_iter().unzip();
        Ok(Self {
            qubits,
            body: TermBody::Pauli(letters),
            weight,
            norm: weight.abs(),
        })
    }

    /// Dense Hermitian term. `matrix` is indexed with local bit `i` on `qubits[i]`;
    /// qubits must already be strictly increasing.
    pub fn dense(qubits: Vec<usize>, matrix: DMatrix<C64>, weight: f64) -> Result<Self> {
        validate_qubits(&qubits)?;
        if qubits.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Malformed("dense term qubits must be strictly increasing".into()));
        }
        let dim = 1usize << qubits.len();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: matrix.nrows() });
        }
        if !weight.is_finite() {
            return Err(Error::Malformed("non-finite weight".into()));
        }
        let dev = kernel::max_hermitian_deviation(&matrix);
        if dev > HERMITIAN_TOL {
            return Err(Error::NonHermitian(dev));
        }
        let norm = weight.abs() * hermitian_norm(&matrix);
        Ok(Self { qubits, body: TermBody::Dense(matrix), weight, norm })
    }

    /// Dense term whose norm is already known exactly (unitary conjugates).
    fn dense_with_norm(qubits: Vec<usize>, matrix: DMatrix<C64>, weight: f64, norm: f64) -> Self {
        Self { qubits, body: TermBody::Dense(matrix), weight, norm }
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    pub fn body(&self) -> &TermBody {
        &self.body
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn support(&self) -> usize {
        self.qubits.len()
    }

    /// Cached spectral norm of `weight * body`.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    /// `weight * body` as a dense local matrix.
    pub fn local_matrix(&self) -> DMatrix<C64> {
        let body = match &self.body {
            TermBody::Pauli(word) => pauli_matrix(word),
            TermBody::Dense(m) => m.clone(),
        };
        body * C64::new(self.weight, 0.0)
    }

    /// Diagonal element `<b| weight*body |b>` for a global basis index `b`.
    pub fn diagonal_at(&self, basis: usize) -> f64 {
        let local = gather(basis, &self.qubits);
        match &self.body {
            TermBody::Pauli(word) => {
                if word.iter().any(|p| *p != Pauli::Z) {
                    0.0
                } else {
                    self.weight * pauli_action(word, local).1.re
                }
            }
            TermBody::Dense(m) => self.weight * m[(local, local)].re,
        }
    }

    /// `out += (weight*body) input` on a `2^n` statevector.
    pub fn accumulate(&self, input: &[C64], out: &mut [C64]) {
        match &self.body {
            TermBody::Pauli(word) => {
                let mask = mask_of(&self.qubits);
                let w = C64::new(self.weight, 0.0);
                for (c, amp) in input.iter().enumerate() {
                    let (lr, ph) = pauli_action(word, gather(c, &self.qubits));
                    let r = scatter(c & !mask, &self.qubits, lr);
                    out[r] += w * ph * amp;
                }
            }
            TermBody::Dense(m) => {
                let op = m * C64::new(self.weight, 0.0);
                kernel::accumulate_local(&op, &self.qubits, input, out);
            }
        }
    }

    /// Norm recomputed from the body by an eigensolve, ignoring the cache.
    pub fn computed_norm(&self) -> f64 {
        match &self.body {
            TermBody::Pauli(_) => self.weight.abs(),
            TermBody::Dense(m) => self.weight.abs() * hermitian_norm(m),
        }
    }
}

/// Spectral norm of a single term.
pub fn term_norm(term: &LocalTerm) -> f64 {
    term.norm()
}

/// Per-site interaction statistics: `e(s)`, `L = sum e(s)` and `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct SiteStatistics {
    pub site_energy: Vec<f64>,
    pub local_sum: f64,
    pub total_strength: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalHamiltonian {
    n: usize,
    terms: Vec<LocalTerm>,
    locality: usize,
    total_strength: f64,
    site_energy: Vec<f64>,
    local_sum: f64,
}

impl LocalHamiltonian {
    pub fn new(n: usize, terms: Vec<LocalTerm>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidQubitCount(0));
        }
        if terms.is_empty() {
            return Err(Error::EmptyTerms);
        }
        for t in &terms {
            if let Some(&q) = t.qubits.iter().find(|&&q| q >= n) {
                return Err(Error::QubitOutOfRange { index: q, n });
            }
        }
        let locality = terms.iter().map(LocalTerm::support).max().unwrap_or(0);
        let total_strength = terms.iter().map(LocalTerm::norm).sum();
        let mut site_energy = vec![0.0; n];
        for t in &terms {
            for &q in &t.qubits {
                site_energy[q] += t.norm;
            }
        }
        let local_sum = site_energy.iter().sum();
        Ok(Self { n, terms, locality, total_strength, site_energy, local_sum })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[LocalTerm] {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Maximum term support `k`.
    pub fn locality(&self) -> usize {
        self.locality
    }

    /// `M = sum_alpha ||h_alpha||`.
    pub fn total_strength(&self) -> f64 {
        self.total_strength
    }

    pub fn site_energy(&self) -> &[f64] {
        &self.site_energy
    }

    /// `L = sum_s e(s)`.
    pub fn local_sum(&self) -> f64 {
        self.local_sum
    }

    pub fn site_statistics(&self) -> SiteStatistics {
        SiteStatistics {
            site_energy: self.site_energy.clone(),
            local_sum: self.local_sum,
            total_strength: self.total_strength,
        }
    }

    /// Same terms on a register of `total` qubits (the extra qubits idle).
    pub fn on_register(&self, total: usize) -> Result<Self> {
        if total < self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: total });
        }
        Self::new(total, self.terms.clone())
    }

    /// Union of two term lists on the same register.
    pub fn union(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: other.n });
        }
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Self::new(self.n, terms)
    }

    /// Dense `2^n x 2^n` matrix, default oracle cap.
    pub fn assemble_matrix(&self) -> Result<DMatrix<C64>> {
        self.assemble_matrix_with_cap(OracleCap::default())
    }

    pub fn assemble_matrix_with_cap(&self, cap: OracleCap) -> Result<DMatrix<C64>> {
        cap.check(self.n)?;
        let dim = 1usize << self.n;
        let mut out = DMatrix::zeros(dim, dim);
        for t in &self.terms {
            let rest_mask = !mask_of(&t.qubits);
            match &t.body {
                TermBody::Pauli(word) => {
                    let w = C64::new(t.weight, 0.0);
                    for c in 0..dim {
                        let (lr, ph) = pauli_action(word, gather(c, &t.qubits));
                        out[(scatter(c & rest_mask, &t.qubits, lr), c)] += w * ph;
                    }
                }
                TermBody::Dense(m) => {
                    let w = C64::new(t.weight, 0.0);
                    let local_dim = m.nrows();
                    for c in 0..dim {
                        let lc = gather(c, &t.qubits);
                        let rest = c & rest_mask;
                        for lr in 0..local_dim {
                            out[(scatter(rest, &t.qubits, lr), c)] += w * m[(lr, lc)];
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// `H psi` term by term, without assembling the matrix.
    pub fn apply(&self, psi: &[C64]) -> Result<Vec<C64>> {
        let dim = 1usize << self.n;
        if psi.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: psi.len() });
        }
        let mut out = vec![C64::new(0.0, 0.0); dim];
        for t in &self.terms {
            t.accumulate(psi, &mut out);
        }
        Ok(out)
    }

    /// `<psi|H|psi>` term by term.
    pub fn expectation(&self, psi: &[C64]) -> Result<f64> {
        let h_psi = self.apply(psi)?;
        Ok(psi.iter().zip(&h_psi).map(|(a, b)| (a.conj() * b).re).sum())
    }

    /// `<b|H|b>` for a computational basis state, summed over terms.
    pub fn basis_energy(&self, basis: usize) -> f64 {
        self.terms.iter().map(|t| t.diagonal_at(basis)).sum()
    }

    /// Conjugates every term by the circuit: `h -> U^dagger h U`.
    ///
    /// Output supports come from the backward light cone, so each has at most
    /// `2^d` times the input support. Norms carry over unchanged.
    pub fn conjugate_by_circuit(&self, circuit: &BrickworkCircuit) -> Result<Self> {
        if circuit.n() != self.n {
            return Err(Error::CircuitMismatch { circuit: circuit.n(), hamiltonian: self.n });
        }
        let terms = self
            .terms
            .iter()
            .map(|t| conjugate_term(t, circuit))
            .collect();
        Self::new(self.n, terms)
    }

    /// Serializes to the Hamiltonian JSON schema.
    pub fn to_document(&self) -> HamiltonianDocument {
        HamiltonianDocument {
            n: self.n as i64,
            terms: self
                .terms
                .iter()
                .map(|t| match &t.body {
                    TermBody::Pauli(word) => TermDocument {
                        qubits: t.qubits.iter().map(|&q| q as i64).collect(),
                        pauli: Some(word.iter().map(|p| p.as_char()).collect()),
                        matrix: None,
                        weight: t.weight,
                    },
                    TermBody::Dense(m) => {
                        let dim = m.nrows();
                        let mut flat = Vec::with_capacity(dim * dim);
                        for r in 0..dim {
                            for c in 0..dim {
                                flat.push([m[(r, c)].re, m[(r, c)].im]);
                            }
                        }
                        TermDocument {
                            qubits: t.qubits.iter().map(|&q| q as i64).collect(),
                            pauli: None,
                            matrix: Some(flat),
                            weight: t.weight,
                        }
                    }
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("document serializes")
    }
}

impl fmt::Display for LocalHamiltonian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "LocalHamiltonian(n={}, m={}, k={}, M={:.6}, L={:.6})",
            self.n,
            self.terms.len(),
            self.locality,
            self.total_strength,
            self.local_sum
        )
    }
}

fn conjugate_term(term: &LocalTerm, circuit: &BrickworkCircuit) -> LocalTerm {
    // Walk layers from the last applied back to the first, collecting only the
    // gates that touch the current support.
    let mut current: BTreeSet<usize> = term.qubits.iter().copied().collect();
    let mut touched: Vec<Vec<usize>> = Vec::with_capacity(circuit.depth());
    for layer in circuit.layers().iter().rev() {
        let mut hits = Vec::new();
        for (gi, gate) in layer.iter().enumerate() {
            let (a, b) = gate.pair();
            if current.contains(&a) || current.contains(&b) {
                hits.push(gi);
            }
        }
        for &gi in &hits {
            let (a, b) = layer[gi].pair();
            current.insert(a);
            current.insert(b);
        }
        touched.push(hits);
    }
    let support: Vec<usize> = current.into_iter().collect();
    let position = |q: usize| support.binary_search(&q).expect("qubit in light cone");
    let term_pos: Vec<usize> = term.qubits.iter().map(|&q| position(q)).collect();

    let body = match &term.body {
        TermBody::Pauli(word) => pauli_matrix(word),
        TermBody::Dense(m) => m.clone(),
    };
    let mut op = kernel::embed(&body, &term_pos, support.len());
    for (layer, hits) in circuit.layers().iter().rev().zip(&touched) {
        for &gi in hits {
            let gate = &layer[gi];
            let (a, b) = gate.pair();
            let pos = [position(a), position(b)];
            let g_dag = gate.unitary().adjoint();
            // G^dagger O G = G^dagger (G^dagger O)^dagger for Hermitian O
            kernel::left_apply(&g_dag, &pos, &mut op);
            op = op.adjoint();
            kernel::left_apply(&g_dag, &pos, &mut op);
        }
    }
    // Restore exact Hermiticity lost to rounding.
    let op = (&op + op.adjoint()) * C64::new(0.5, 0.0);
    LocalTerm::dense_with_norm(support, op, term.weight, term.norm)
}

/// One term of the JSON schema; exactly one of `pauli` / `matrix` is present.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermDocument {
    pub qubits: Vec<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pauli: Option<String>,
    /// Row-major `[re, im]` entries of the `2^q x 2^q` body.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<[f64; 2]>>,
    pub weight: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HamiltonianDocument {
    pub n: i64,
    pub terms: Vec<TermDocument>,
}

impl HamiltonianDocument {
    pub fn into_hamiltonian(self) -> Result<LocalHamiltonian> {
        if self.n <= 0 {
            return Err(Error::InvalidQubitCount(self.n));
        }
        let n = self.n as usize;
        if self.terms.is_empty() {
            return Err(Error::EmptyTerms);
        }
        let terms = self
            .terms
            .into_iter()
            .map(|t| {
                let qubits: Vec<usize> = t
                    .qubits
                    .iter()
                    .map(|&q| {
                        if q < 0 || q as usize >= n {
                            Err(Error::QubitOutOfRange { index: q.max(0) as usize, n })
                        } else {
                            Ok(q as usize)
                        }
                    })
                    .collect::<Result<_>>()?;
                match (t.pauli, t.matrix) {
                    (Some(word), None) => LocalTerm::pauli(qubits, &word, t.weight),
                    (None, Some(flat)) => {
                        validate_qubits(&qubits)?;
                        let dim = 1usize << qubits.len();
                        if flat.len() != dim * dim {
                            return Err(Error::Malformed(format!(
                                "matrix has {} entries, expected {}",
                                flat.len(),
                                dim * dim
                            )));
                        }
                        let m = DMatrix::from_fn(dim, dim, |r, c| {
                            let [re, im] = flat[r * dim + c];
                            C64::new(re, im)
                        });
                        // Accept any qubit order by permuting the body to ascending order.
                        let mut order: Vec<usize> = (0..qubits.len()).collect();
                        order.sort_by_key(|&i| qubits[i]);
                        let sorted: Vec<usize> = order.iter().map(|&i| qubits[i]).collect();
                        let m = permute_local(&m, &order);
                        LocalTerm::dense(sorted, m, t.weight)
                    }
                    _ => Err(Error::Malformed("each term needs exactly one of \"pauli\" or \"matrix\"".into())),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        LocalHamiltonian::new(n, terms)
    }
}

/// Reindexes a local matrix so that new bit `j` is old bit `order[j]`.
fn permute_local(m: &DMatrix<C64>, order: &[usize]) -> DMatrix<C64> {
    let dim = m.nrows();
    let map = |new: usize| -> usize {
        order
            .iter()
            .enumerate()
            .fold(0, |acc, (j, &old)| acc | (((new >> j) & 1) << old))
    };
    DMatrix::from_fn(dim, dim, |r, c| m[(map(r), map(c))])
}

/// Parses and validates a Hamiltonian JSON document.
pub fn parse_hamiltonian(document: &str) -> Result<LocalHamiltonian> {
    let doc: HamiltonianDocument = serde_json::from_str(document)?;
    doc.into_hamiltonian()
}

/// Weight distributions for generated instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightDist {
    /// Uniform over `{-1, +1}`.
    Pm1,
    /// Uniform on `[-1, 1]`.
    Uniform,
}

impl std::str::FromStr for WeightDist {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pm1" | "±1" => Ok(WeightDist::Pm1),
            "uniform" => Ok(WeightDist::Uniform),
            other => Err(Error::InvalidParameter(format!("unknown weight distribution {other:?}"))),
        }
    }
}

/// Random instance: `m` terms, each on a uniform random `k`-subset with a
/// uniform random word over `{X, Y, Z}`.
pub fn random_pauli_hamiltonian(n: usize, k: usize, m: usize, dist: WeightDist, seed: u64) -> Result<LocalHamiltonian> {
    if k == 0 || n < k {
        return Err(Error::InvalidParameter(format!("need n >= k >= 1, got n={n}, k={k}")));
    }
    if m == 0 {
        return Err(Error::InvalidParameter("need m >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let letters = ['X', 'Y', 'Z'];
    let terms = (0..m)
        .map(|_| {
            let mut qubits = sample(&mut rng, n, k).into_vec();
            qubits.sort_unstable();
            let word: String = (0..k).map(|_| letters[rng.random_range(0..3)]).collect();
            let weight = match dist {
                WeightDist::Pm1 => {
                    if rng.random_bool(0.5) {
                        1.0
                    } else {
                        -1.0
                    }
                }
                WeightDist::Uniform => rng.random_range(-1.0..=1.0),
            };
            LocalTerm::pauli(qubits, &word, weight)
        })
        .collect::<Result<Vec<_>>>()?;
    LocalHamiltonian::new(n, terms)
}

/// `<psi| A |psi>` for a dense matrix.
pub fn dense_expectation(a: &DMatrix<C64>, psi: &DVector<C64>) -> f64 {
    (psi.adjoint() * a * psi)[(0, 0)].re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::depthd::{BrickworkCircuit, Gate};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn parse_single_zz() {
        let h = parse_hamiltonian(r#"{"n":2,"terms":[{"qubits":[0,1],"pauli":"ZZ","weight":-1}]}"#).unwrap();
        assert_eq!(h.locality(), 2);
        assert_eq!(h.num_terms(), 1);
        assert_eq!(h.total_strength(), 1.0);
        assert_eq!(h.site_energy(), &[1.0, 1.0]);
        assert_eq!(h.local_sum(), 2.0);
    }

    #[test]
    fn parse_rejects_empty_terms() {
        let err = parse_hamiltonian(r#"{"n":1,"terms":[]}"#).unwrap_err();
        assert_eq!(err.to_string(), "empty term list");
    }

    #[test]
    fn parse_mixed_supports() {
        let h = parse_hamiltonian(
            r#"{"n":3,"terms":[{"qubits":[0,2],"pauli":"XZ","weight":0.5},{"qubits":[1],"pauli":"Z","weight":2}]}"#,
        )
        .unwrap();
        assert_eq!(h.locality(), 2);
        assert_eq!(h.total_strength(), 2.5);
        assert_eq!(h.site_energy(), &[0.5, 2.0, 0.5]);
        assert_eq!(h.local_sum(), 3.0);
    }

    #[test]
    fn parse_errors() {
        let dup = parse_hamiltonian(r#"{"n":2,"terms":[{"qubits":[1,1],"pauli":"ZZ","weight":1}]}"#);
        assert!(matches!(dup, Err(Error::DuplicateQubit(1))));
        let nonherm = parse_hamiltonian(
            r#"{"n":1,"terms":[{"qubits":[0],"matrix":[[0,0],[1,0],[0,0],[0,0]],"weight":1}]}"#,
        );
        assert!(matches!(nonherm, Err(Error::NonHermitian(_))));
        assert!(matches!(
            parse_hamiltonian(r#"{"n":0,"terms":[{"qubits":[0],"pauli":"Z","weight":1}]}"#),
            Err(Error::InvalidQubitCount(0))
        ));
        assert!(matches!(
            parse_hamiltonian(r#"{"n":-2,"terms":[{"qubits":[0],"pauli":"Z","weight":1}]}"#),
            Err(Error::InvalidQubitCount(-2))
        ));
        assert!(parse_hamiltonian(r#"{"n":2,"terms":[{"qubits":[0],"weight":1}]}"#).is_err());
        assert!(parse_hamiltonian(r#"{"n":2,"terms":[{"qubits":[3],"pauli":"Z","weight":1}]}"#).is_err());
        assert!(parse_hamiltonian(r#"{"n":2,"terms":[{"qubits":[0],"pauli":"ZZ","weight":1}]}"#).is_err());
        assert!(parse_hamiltonian("not json").is_err());
    }

    #[test]
    fn json_roundtrip_with_dense_term() {
        let body = DMatrix::from_diagonal(&DVector::from_vec(vec![c(2.0), c(-5.0)]));
        let h = LocalHamiltonian::new(
            2,
            vec![LocalTerm::dense(vec![1], body, 1.0).unwrap(), LocalTerm::pauli(vec![0, 1], "XY", -0.25).unwrap()],
        )
        .unwrap();
        let back = parse_hamiltonian(&h.to_json()).unwrap();
        assert_eq!(back, h);
    }

    #[test]
    fn unordered_dense_qubits_are_permuted() {
        // Z on local bit 0 listed as qubits [1, 0]: the body acts on qubit 1.
        let z_on_first = {
            let mut flat = Vec::new();
            let m = kernel::embed(&pauli_matrix(&[Pauli::Z]), &[0], 2);
            for r in 0..4 {
                for cc in 0..4 {
                    flat.push(format!("[{},{}]", m[(r, cc)].re, m[(r, cc)].im));
                }
            }
            flat.join(",")
        };
        let doc = format!(r#"{{"n":2,"terms":[{{"qubits":[1,0],"matrix":[{z_on_first}],"weight":1}}]}}"#);
        let h = parse_hamiltonian(&doc).unwrap();
        let reference = LocalHamiltonian::new(2, vec![LocalTerm::pauli(vec![1], "Z", 1.0).unwrap()]).unwrap();
        let diff = h.assemble_matrix().unwrap() - reference.assemble_matrix().unwrap();
        assert!(diff.norm() < 1e-15);
    }

    #[test]
    fn term_norms() {
        assert_eq!(term_norm(&LocalTerm::pauli(vec![0, 1], "XX", -3.0).unwrap()), 3.0);
        let diag = DMatrix::from_diagonal(&DVector::from_vec(vec![c(2.0), c(-5.0)]));
        assert!((term_norm(&LocalTerm::dense(vec![0], diag, 1.0).unwrap()) - 5.0).abs() < 1e-14);
        let mut proj = DMatrix::zeros(4, 4);
        proj[(0, 0)] = c(1.0);
        assert!((term_norm(&LocalTerm::dense(vec![0, 1], proj, 1.0).unwrap()) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn site_statistics_examples() {
        let h = LocalHamiltonian::new(
            2,
            vec![LocalTerm::pauli(vec![0], "Z", 1.0).unwrap(), LocalTerm::pauli(vec![1], "Z", 1.0).unwrap()],
        )
        .unwrap();
        let s = h.site_statistics();
        assert_eq!(s.site_energy, vec![1.0, 1.0]);
        assert_eq!((s.local_sum, s.total_strength), (2.0, 2.0));

        let zz = LocalHamiltonian::new(2, vec![LocalTerm::pauli(vec![0, 1], "ZZ", 1.0).unwrap()]).unwrap();
        assert_eq!(zz.local_sum(), zz.locality() as f64 * zz.total_strength());

        let r = random_pauli_hamiltonian(10, 3, 20, WeightDist::Pm1, 11).unwrap();
        let direct: f64 = r.terms().iter().map(|t| t.support() as f64 * t.norm()).sum();
        assert!((r.local_sum() - direct).abs() < 1e-12);
        assert!(r.local_sum() <= 3.0 * 20.0 + 1e-12);
    }

    #[test]
    fn assemble_examples() {
        let z0 = LocalHamiltonian::new(1, vec![LocalTerm::pauli(vec![0], "Z", 1.0).unwrap()]).unwrap();
        let m = z0.assemble_matrix().unwrap();
        assert_eq!(m, DMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)]));

        let zz = LocalHamiltonian::new(
            2,
            vec![LocalTerm::pauli(vec![0], "Z", 1.0).unwrap(), LocalTerm::pauli(vec![1], "Z", 1.0).unwrap()],
        )
        .unwrap();
        let m = zz.assemble_matrix().unwrap();
        let d: Vec<f64> = (0..4).map(|i| m[(i, i)].re).collect();
        assert_eq!(d, vec![2.0, 0.0, 0.0, -2.0]);
        assert_eq!(m.iter().filter(|v| v.norm() > 0.0).count(), 2);

        let xx = LocalHamiltonian::new(2, vec![LocalTerm::pauli(vec![0, 1], "XX", 1.0).unwrap()]).unwrap();
        let m = xx.assemble_matrix().unwrap();
        for r in 0..4 {
            for col in 0..4 {
                let expect = if r + col == 3 { 1.0 } else { 0.0 };
                assert_eq!(m[(r, col)], c(expect));
            }
        }
    }

    #[test]
    fn y_matrix_convention() {
        let y = pauli_matrix(&[Pauli::Y]);
        assert_eq!(y[(1, 0)], C64::new(0.0, 1.0));
        assert_eq!(y[(0, 1)], C64::new(0.0, -1.0));
    }

    #[test]
    fn oracle_cap_enforced() {
        let h = LocalHamiltonian::new(15, vec![LocalTerm::pauli(vec![0], "Z", 1.0).unwrap()]).unwrap();
        assert!(matches!(h.assemble_matrix(), Err(Error::ScaleExceeded { n: 15, cap: 14 })));
        let small = LocalHamiltonian::new(3, vec![LocalTerm::pauli(vec![0], "Z", 1.0).unwrap()]).unwrap();
        assert!(matches!(small.assemble_matrix_with_cap(OracleCap(2)), Err(Error::ScaleExceeded { .. })));
    }

    #[test]
    fn apply_matches_dense() {
        let h = random_pauli_hamiltonian(5, 3, 9, WeightDist::Uniform, 3).unwrap();
        let dense = h.assemble_matrix().unwrap();
        let psi: Vec<C64> = (0..32).map(|i| C64::new((i as f64).sin(), (i as f64 * 0.3).cos())).collect();
        let via_terms = h.apply(&psi).unwrap();
        let via_dense = &dense * DVector::from_vec(psi.clone());
        for (a, b) in via_terms.iter().zip(via_dense.iter()) {
            assert!((a - b).norm() < 1e-12);
        }
        for b in 0..32 {
            assert!((h.basis_energy(b) - dense[(b, b)].re).abs() < 1e-12);
        }
    }

    #[test]
    fn conjugation_identity_circuit() {
        let h = random_pauli_hamiltonian(4, 2, 6, WeightDist::Pm1, 5).unwrap();
        let id = BrickworkCircuit::identity(4);
        let hd = h.conjugate_by_circuit(&id).unwrap();
        for (a, b) in h.terms().iter().zip(hd.terms()) {
            assert_eq!(a.qubits(), b.qubits());
        }
        assert_eq!(hd.total_strength(), h.total_strength());
        let diff = hd.assemble_matrix().unwrap() - h.assemble_matrix().unwrap();
        assert!(diff.norm() < 1e-12);
    }

    #[test]
    fn conjugation_cnot_on_z0() {
        // CNOT with control on qubit 0 (local bit 0) and target qubit 1.
        let mut cnot = DMatrix::zeros(4, 4);
        cnot[(0, 0)] = c(1.0);
        cnot[(3, 1)] = c(1.0);
        cnot[(2, 2)] = c(1.0);
        cnot[(1, 3)] = c(1.0);
        let circuit = BrickworkCircuit::new(2, vec![vec![Gate::from_unitary((0, 1), cnot.clone()).unwrap()]]).unwrap();
        let h = LocalHamiltonian::new(2, vec![LocalTerm::pauli(vec![0], "Z", 1.0).unwrap()]).unwrap();
        let hd = h.conjugate_by_circuit(&circuit).unwrap();
        assert_eq!(hd.terms()[0].qubits(), &[0, 1]);
        assert_eq!(hd.total_strength(), 1.0);
        // Explicit 4x4 conjugation as the independent route.
        let z0 = h.assemble_matrix().unwrap();
        let expect = cnot.adjoint() * z0 * &cnot;
        assert!((hd.assemble_matrix().unwrap() - expect).norm() < 1e-14);
    }

    #[test]
    fn union_is_linear() {
        let a = random_pauli_hamiltonian(4, 2, 3, WeightDist::Uniform, 1).unwrap();
        let b = random_pauli_hamiltonian(4, 3, 4, WeightDist::Uniform, 2).unwrap();
        let u = a.union(&b).unwrap();
        let diff = u.assemble_matrix().unwrap() - (a.assemble_matrix().unwrap() + b.assemble_matrix().unwrap());
        assert!(diff.camax() < 1e-12);
    }

    #[test]
    fn generator_contract() {
        let h = random_pauli_hamiltonian(8, 3, 16, WeightDist::Pm1, 7).unwrap();
        assert_eq!(h.num_terms(), 16);
        assert!(h.terms().iter().all(|t| t.support() == 3 && t.weight().abs() == 1.0));
        assert_eq!(h, random_pauli_hamiltonian(8, 3, 16, WeightDist::Pm1, 7).unwrap());
        assert!(random_pauli_hamiltonian(2, 3, 1, WeightDist::Pm1, 0).is_err());
    }
}
