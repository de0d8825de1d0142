//! Low-energy filtering on the doubled register.
//!
//! A `2n`-qubit state is handled as a `2^n x 2^n` matrix `Psi[sys, anc]`
//! whose column-major flattening `sys + 2^n anc` is the statevector index, so
//! the system occupies qubits `0..n` and the ancilla qubits `n..2n`. Any
//! operator of the form `A (x) I` acts as the left product `A Psi`, and
//! tracing out the ancilla gives `rho = Psi Psi^dagger`.

use nalgebra::DMatrix;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{binary_entropy, entropy_argument};
use crate::hamiltonian::{LocalHamiltonian, LocalTerm, TermBody};
use crate::kernel::{gather, scatter};
use crate::spectrum::SpectralSummary;
use crate::{Error, OracleCap, Result, C64};

/// Largest total register (system plus ancilla) held as a statevector.
pub const VECTOR_CAP: usize = 24;

/// Samples drawn per independently seeded batch in [`estimate_energy`].
pub const SAMPLE_BATCH: usize = 1024;

const ZERO: C64 = C64::new(0.0, 0.0);

/// `H (x) I_anc` with the base spectrum and eigenvectors.
#[derive(Debug, Clone)]
pub struct ExtendedSystem {
    base: LocalHamiltonian,
    matrix: DMatrix<C64>,
    spectral: SpectralSummary,
}

impl ExtendedSystem {
    pub fn new(base: &LocalHamiltonian) -> Result<Self> {
        Self::with_cap(base, OracleCap::default())
    }

    pub fn with_cap(base: &LocalHamiltonian, cap: OracleCap) -> Result<Self> {
        check_vector_cap(base.n())?;
        let matrix = base.assemble_matrix_with_cap(cap)?;
        let spectral = SpectralSummary::from_matrix(matrix.clone(), base.n(), true);
        Ok(Self { base: base.clone(), matrix, spectral })
    }

    pub fn base(&self) -> &LocalHamiltonian {
        &self.base
    }

    pub fn n(&self) -> usize {
        self.base.n()
    }

    pub fn total_qubits(&self) -> usize {
        2 * self.base.n()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn spectral(&self) -> &SpectralSummary {
        &self.spectral
    }

    /// Eigenvalues of `H (x) I` with multiplicity, ascending. Only for small `n`.
    pub fn extended_eigenvalues(&self) -> Vec<f64> {
        let rep = 1usize << self.n();
        self.spectral.eigenvalues().iter().flat_map(|&l| std::iter::repeat_n(l, rep)).collect()
    }

    fn view(&self, state: &[C64]) -> Result<DMatrix<C64>> {
        as_bipartite(state, self.n())
    }
}

fn check_vector_cap(n: usize) -> Result<()> {
    if 2 * n > VECTOR_CAP {
        return Err(Error::ScaleExceeded { n: 2 * n, cap: VECTOR_CAP });
    }
    Ok(())
}

/// Reshapes a flat `2n`-qubit statevector into `Psi[sys, anc]`.
pub fn as_bipartite(state: &[C64], n: usize) -> Result<DMatrix<C64>> {
    let dim = 1usize << n;
    if state.len() != dim * dim {
        return Err(Error::DimensionMismatch { expected: dim * dim, got: state.len() });
    }
    Ok(DMatrix::from_column_slice(dim, dim, state))
}

/// `(1 / sqrt(2^n)) sum_k |k>|k>`.
pub fn maximally_entangled(n: usize) -> Result<Vec<C64>> {
    check_vector_cap(n)?;
    let dim = 1usize << n;
    let amp = C64::new(1.0 / (dim as f64).sqrt(), 0.0);
    let mut v = vec![ZERO; dim * dim];
    for k in 0..dim {
        v[k + dim * k] = amp;
    }
    Ok(v)
}

/// `Tr_anc |state><state|`.
pub fn reduced_density(state: &[C64], n: usize) -> Result<DMatrix<C64>> {
    let psi = as_bipartite(state, n)?;
    Ok(&psi * psi.adjoint())
}

/// `Tr[A rho]` for Hermitian `A`.
pub fn trace_product(a: &DMatrix<C64>, rho: &DMatrix<C64>) -> f64 {
    a.iter().zip(rho.transpose().iter()).map(|(x, y)| (x * y).re).sum()
}

/// `|<a|b>|^2`.
pub fn state_fidelity(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<C64>().norm_sqr()
}

/// `gamma = N(E) / 2^n` from the base count.
pub fn overlap_gamma(sys: &ExtendedSystem, energy: f64) -> f64 {
    sys.spectral.spectral_count(energy) as f64 / (1usize << sys.n()) as f64
}

/// `|| (P_{<=E} (x) I) state ||^2` evaluated on an explicit doubled-register state.
pub fn explicit_overlap(sys: &ExtendedSystem, state: &[C64], energy: f64) -> Result<f64> {
    let psi = sys.view(state)?;
    let low = sys.spectral.low_energy_vectors(energy)?;
    Ok((low.adjoint() * psi).norm_squared())
}

/// Filtered, normalized state on the doubled register.
#[derive(Debug, Clone)]
pub struct FilterOutcome {
    pub post_state: Vec<C64>,
    pub success_probability: f64,
    pub reduced_density: DMatrix<C64>,
    /// `Tr[H rho]`.
    pub energy: f64,
}

impl FilterOutcome {
    fn from_filtered(sys: &ExtendedSystem, filtered: DMatrix<C64>) -> Result<Self> {
        let p = filtered.norm_squared();
        if !(p > 1e-300) {
            return Err(Error::EmptyOverlap);
        }
        let psi = filtered / C64::new(p.sqrt(), 0.0);
        let rho = &psi * psi.adjoint();
        let energy = trace_product(&sys.matrix, &rho);
        Ok(Self { post_state: psi.as_slice().to_vec(), success_probability: p, reduced_density: rho, energy })
    }
}

/// Projects onto `P_{<=E} (x) I` and post-selects.
pub fn exact_filter(sys: &ExtendedSystem, state: &[C64], energy: f64) -> Result<FilterOutcome> {
    let psi = sys.view(state)?;
    let low = sys.spectral.low_energy_vectors(energy)?;
    if low.ncols() == 0 {
        return Err(Error::EmptyOverlap);
    }
    let filtered = &low * (low.adjoint() * psi);
    FilterOutcome::from_filtered(sys, filtered)
}

/// Smoothed step `1/2 erfc((E - (x - y/2)) / (sqrt(2) sigma))` with `sigma = y / 8`,
/// so eigenvalues below `x - y` or above `x` sit at least four widths from the edge.
pub fn smoothed_step(energy: f64, x: f64, y: f64) -> f64 {
    let sigma = y / 8.0;
    0.5 * libm::erfc((energy - (x - 0.5 * y)) / (std::f64::consts::SQRT_2 * sigma))
}

/// Chebyshev coefficients of `f` on `[-1, 1]` from Gauss nodes; `c_0` is already halved.
pub fn chebyshev_coefficients<F: Fn(f64) -> f64>(f: F, degree: usize) -> Vec<f64> {
    let nodes = 4 * (degree + 1);
    let samples: Vec<(f64, f64)> = (0..nodes)
        .map(|k| {
            let theta = std::f64::consts::PI * (k as f64 + 0.5) / nodes as f64;
            (theta, f(theta.cos()))
        })
        .collect();
    (0..=degree)
        .map(|j| {
            let s: f64 = samples.iter().map(|(t, v)| v * (j as f64 * t).cos()).sum();
            let c = 2.0 * s / nodes as f64;
            if j == 0 {
                0.5 * c
            } else {
                c
            }
        })
        .collect()
}

/// Evaluates `sum_j c_j T_j(t)` by Clenshaw.
pub fn chebyshev_eval(coeffs: &[f64], t: f64) -> f64 {
    let (mut b1, mut b2) = (0.0, 0.0);
    for &c in coeffs.iter().skip(1).rev() {
        let b0 = 2.0 * t * b1 - b2 + c;
        b2 = b1;
        b1 = b0;
    }
    t * b1 - b2 + coeffs[0]
}

/// Applies a degree-`degree` Chebyshev approximation of the step that is 1
/// below `x - y` and 0 above `x`. `H` is rescaled to `[-1, 1]` by its exact
/// extreme eigenvalues and applied on the system index only.
pub fn chebyshev_filter(sys: &ExtendedSystem, state: &[C64], x: f64, y: f64, degree: usize) -> Result<FilterOutcome> {
    if degree < 1 {
        return Err(Error::InvalidParameter("polynomial degree must be >= 1".into()));
    }
    if !(y > 0.0) {
        return Err(Error::InvalidParameter(format!("filter width y must be positive, got {y}")));
    }
    let psi = sys.view(state)?;
    let lo = sys.spectral.ground_energy();
    let hi = sys.spectral.max_energy();
    let center = 0.5 * (hi + lo);
    let half = if hi - lo > 1e-12 { 0.5 * (hi - lo) } else { 1.0 };
    let coeffs = chebyshev_coefficients(|t| smoothed_step(center + half * t, x, y), degree);

    let scaled = |v: &DMatrix<C64>| -> DMatrix<C64> { (&sys.matrix * v - v * C64::new(center, 0.0)) / C64::new(half, 0.0) };
    let dim = psi.nrows();
    let mut b1 = DMatrix::<C64>::zeros(dim, dim);
    let mut b2 = DMatrix::<C64>::zeros(dim, dim);
    for &c in coeffs.iter().skip(1).rev() {
        let b0 = scaled(&b1) * C64::new(2.0, 0.0) - &b2 + &psi * C64::new(c, 0.0);
        b2 = std::mem::replace(&mut b1, b0);
    }
    let filtered = scaled(&b1) - b2 + &psi * C64::new(coeffs[0], 0.0);
    FilterOutcome::from_filtered(sys, filtered)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "mode")]
pub enum FilterMode {
    Exact,
    Poly { degree: usize },
}

impl FilterMode {
    pub fn name(&self) -> &'static str {
        match self {
            FilterMode::Exact => "exact",
            FilterMode::Poly { .. } => "poly",
        }
    }

    pub fn degree(&self) -> Option<usize> {
        match self {
            FilterMode::Exact => None,
            FilterMode::Poly { degree } => Some(*degree),
        }
    }
}

/// Filter parameters and the outcome of one preparation run.
#[derive(Debug, Clone)]
pub struct Preparation {
    /// `E_ref + eps M`.
    pub x: f64,
    /// `eps M / n`.
    pub y: f64,
    /// `(1 - 1/n) eps`.
    pub mu: f64,
    /// Overlap of the initial state with the subspace below `x - y`.
    pub gamma: f64,
    pub mode: FilterMode,
    pub outcome: FilterOutcome,
}

impl Preparation {
    pub fn density(&self) -> &DMatrix<C64> {
        &self.outcome.reduced_density
    }
}

pub fn prepare_low_energy(h: &LocalHamiltonian, epsilon: f64, e_ref: f64, mode: FilterMode) -> Result<Preparation> {
    let sys = ExtendedSystem::new(h)?;
    prepare_low_energy_on(&sys, epsilon, e_ref, mode)
}

/// Filters the maximally entangled state with `x = E_ref + eps M`, `y = eps M / n`.
/// Exact mode projects below `x - y`; polynomial mode approximates the step between the two.
pub fn prepare_low_energy_on(sys: &ExtendedSystem, epsilon: f64, e_ref: f64, mode: FilterMode) -> Result<Preparation> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!("epsilon must be positive, got {epsilon}")));
    }
    let n = sys.n() as f64;
    let m = sys.base.total_strength();
    let x = e_ref + epsilon * m;
    let y = epsilon * m / n;
    let mu = (1.0 - 1.0 / n) * epsilon;
    let start = maximally_entangled(sys.n())?;
    let outcome = match mode {
        FilterMode::Exact => exact_filter(sys, &start, x - y)?,
        FilterMode::Poly { degree } => chebyshev_filter(sys, &start, x, y, degree)?,
    };
    Ok(Preparation { x, y, mu, gamma: overlap_gamma(sys, x - y), mode, outcome })
}

/// A source of independent copies of one `n`-qubit state.
pub trait StateSource: Sync {
    fn n(&self) -> usize;
    fn density(&self) -> &DMatrix<C64>;
}

impl StateSource for Preparation {
    fn n(&self) -> usize {
        (self.outcome.reduced_density.nrows() as f64).log2().round() as usize
    }

    fn density(&self) -> &DMatrix<C64> {
        &self.outcome.reduced_density
    }
}

/// A fixed density matrix.
#[derive(Debug, Clone)]
pub struct FixedState {
    n: usize,
    rho: DMatrix<C64>,
}

impl FixedState {
    pub fn new(n: usize, rho: DMatrix<C64>) -> Result<Self> {
        let dim = 1usize << n;
        if rho.nrows() != dim || rho.ncols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: rho.nrows() });
        }
        Ok(Self { n, rho })
    }

    pub fn basis(n: usize, index: usize) -> Self {
        let dim = 1usize << n;
        let mut rho = DMatrix::zeros(dim, dim);
        rho[(index, index)] = C64::new(1.0, 0.0);
        Self { n, rho }
    }

    pub fn maximally_mixed(n: usize) -> Self {
        let dim = 1usize << n;
        Self { n, rho: DMatrix::identity(dim, dim) / C64::new(dim as f64, 0.0) }
    }
}

impl StateSource for FixedState {
    fn n(&self) -> usize {
        self.n
    }

    fn density(&self) -> &DMatrix<C64> {
        &self.rho
    }
}

/// Reduced density on `qubits` (local bit `i` is `qubits[i]`).
pub fn partial_density(rho: &DMatrix<C64>, qubits: &[usize]) -> DMatrix<C64> {
    let local = 1usize << qubits.len();
    let mask: usize = qubits.iter().map(|q| 1usize << q).sum();
    let mut out = DMatrix::<C64>::zeros(local, local);
    for base in (0..rho.nrows()).filter(|b| b & mask == 0) {
        for a in 0..local {
            let ra = scatter(base, qubits, a);
            for b in 0..local {
                out[(a, b)] += rho[(ra, scatter(base, qubits, b))];
            }
        }
    }
    debug_assert!((0..rho.nrows()).all(|i| gather(i, qubits) < local));
    out
}

/// Sampled energy from per-term projective measurements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyEstimate {
    /// Sum of the per-term sample means.
    pub estimate: f64,
    pub stderr: f64,
    pub per_term: Vec<f64>,
    /// `Tr[H rho]`.
    pub exact: f64,
    /// `|estimate - exact| <= 3 stderr`.
    pub within_three_sigma: bool,
    pub samples_per_term: usize,
}

/// Measurement outcomes and their probabilities for one term.
fn outcome_distribution(term: &LocalTerm, rho: &DMatrix<C64>) -> (Vec<f64>, Vec<f64>) {
    let local_rho = partial_density(rho, term.qubits());
    match term.body() {
        TermBody::Pauli(_) => {
            let p = term.local_matrix() / C64::new(term.weight(), 0.0);
            let expval = if term.weight() == 0.0 { 0.0 } else { trace_product(&p, &local_rho) };
            let plus = (0.5 * (1.0 + expval)).clamp(0.0, 1.0);
            (vec![term.weight(), -term.weight()], vec![plus, 1.0 - plus])
        }
        TermBody::Dense(_) => {
            let eig = term.local_matrix().symmetric_eigen();
            let probs = (0..eig.eigenvalues.len())
                .map(|j| {
                    let v = eig.eigenvectors.column(j);
                    (v.adjoint() * &local_rho * v)[(0, 0)].re.max(0.0)
                })
                .collect();
            (eig.eigenvalues.iter().copied().collect(), probs)
        }
    }
}

fn sample_term<R: Rng>(values: &[f64], probs: &[f64], count: usize, rng: &mut R) -> (f64, f64) {
    let mut sum = 0.0;
    let mut sq = 0.0;
    let support: Vec<usize> = (0..probs.len()).filter(|&i| probs[i] > 0.0).collect();
    if support.len() <= 1 {
        let v = support.first().map_or(0.0, |&i| values[i]);
        return (v * count as f64, v * v * count as f64);
    }
    let dist = WeightedIndex::new(support.iter().map(|&i| probs[i])).expect("positive weights");
    for _ in 0..count {
        let v = values[support[dist.sample(rng)]];
        sum += v;
        sq += v * v;
    }
    (sum, sq)
}

/// Estimates `Tr[H rho]` term by term from `samples_per_term` simulated
/// measurements of each term in its eigenbasis. Batches of [`SAMPLE_BATCH`]
/// draw from ChaCha8 seeded with `seed` on stream `(term << 32) | batch`.
pub fn estimate_energy<S: StateSource>(
    source: &S,
    h: &LocalHamiltonian,
    samples_per_term: usize,
    seed: u64,
) -> Result<EnergyEstimate> {
    if samples_per_term < 1 {
        return Err(Error::InvalidParameter("samples_per_term must be >= 1".into()));
    }
    if source.n() != h.n() {
        return Err(Error::DimensionMismatch { expected: h.n(), got: source.n() });
    }
    let rho = source.density();
    let batches = samples_per_term.div_ceil(SAMPLE_BATCH);
    let stats: Vec<(f64, f64)> = h
        .terms()
        .par_iter()
        .enumerate()
        .map(|(t, term)| {
            let (values, probs) = outcome_distribution(term, rho);
            let (sum, sq) = (0..batches)
                .into_par_iter()
                .map(|b| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(((t as u64) << 32) | b as u64);
                    let count = SAMPLE_BATCH.min(samples_per_term - b * SAMPLE_BATCH);
                    sample_term(&values, &probs, count, &mut rng)
                })
                .collect::<Vec<_>>()
                .into_iter()
                .fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
            let s = samples_per_term as f64;
            let mean = sum / s;
            let var = if samples_per_term > 1 { ((sq - s * mean * mean) / (s - 1.0)).max(0.0) } else { 0.0 };
            (mean, var / s)
        })
        .collect();
    let per_term: Vec<f64> = stats.iter().map(|s| s.0).collect();
    let estimate: f64 = per_term.iter().sum();
    let stderr = stats.iter().map(|s| s.1).sum::<f64>().sqrt();
    let exact = h.terms().iter().map(|t| trace_product(&t.local_matrix(), &partial_density(rho, t.qubits()))).sum::<f64>();
    let within_three_sigma = (estimate - exact).abs() <= 3.0 * stderr + 1e-9;
    Ok(EnergyEstimate { estimate, stderr, per_term, exact, within_three_sigma, samples_per_term })
}

/// Amplified query counts, polylog factors dropped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QueryCost {
    /// `1 / (y sqrt(gamma))`.
    pub calls_uh: f64,
    /// `1 / sqrt(gamma)`.
    pub calls_ui: f64,
}

pub fn query_cost_model(gamma: f64, y: f64) -> Result<QueryCost> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::InvalidParameter(format!("overlap gamma must lie in (0, 1], got {gamma}")));
    }
    if !(y > 0.0) {
        return Err(Error::InvalidParameter(format!("filter width y must be positive, got {y}")));
    }
    let root = gamma.sqrt();
    Ok(QueryCost { calls_uh: 1.0 / (y * root), calls_ui: 1.0 / root })
}

/// `log2 gamma >= (n/2) H(mu / 2^{d+2} k) - n`, the overlap guaranteed by the
/// certified count of a depth-`d` effective Hamiltonian.
pub fn overlap_log2_lower_bound(k: u32, mu: f64, d: u32, n: usize) -> Result<f64> {
    let h = binary_entropy(entropy_argument(k, mu, d))?;
    Ok(0.5 * n as f64 * h - n as f64)
}

/// `log2` of `calls_UI = 1 / sqrt(gamma)` at the guaranteed overlap.
pub fn predicted_log2_calls_ui(k: u32, mu: f64, d: u32, n: usize) -> Result<f64> {
    Ok(-0.5 * overlap_log2_lower_bound(k, mu, d, n)?)
}

/// Outcome JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeDocument {
    pub x: f64,
    pub y: f64,
    pub mu: f64,
    pub gamma: f64,
    pub success_probability: f64,
    pub energy: f64,
    pub estimate: f64,
    pub stderr: f64,
    #[serde(rename = "calls_UH")]
    pub calls_uh: f64,
    #[serde(rename = "calls_UI")]
    pub calls_ui: f64,
    pub mode: String,
    pub degree: Option<usize>,
}

impl OutcomeDocument {
    pub fn new(prep: &Preparation, estimate: &EnergyEstimate) -> Result<Self> {
        let cost = query_cost_model(prep.gamma, prep.y)?;
        Ok(Self {
            x: prep.x,
            y: prep.y,
            mu: prep.mu,
            gamma: prep.gamma,
            success_probability: prep.outcome.success_probability,
            energy: prep.outcome.energy,
            estimate: estimate.estimate,
            stderr: estimate.stderr,
            calls_uh: cost.calls_uh,
            calls_ui: cost.calls_ui,
            mode: prep.mode.name().to_string(),
            degree: prep.mode.degree(),
        })
    }
}
