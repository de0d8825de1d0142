//! Lower bounds on the cumulative spectral count `N(E_ref + mu M)`.
//!
//! The construction picks the quiet sites (those with `e(s) <= delta L / n`),
//! flips every subset `R` of at most `r` of them in `|0..0>`, and feeds the
//! resulting orthonormal family into Cauchy interlacing:
//!
//! ```text
//! N(E_ref + mu M) >= ((1 - eta) mu / (mu + 2)) * sum_{i <= r} C(|Q|, i),
//! r = floor(mu eta M n / (2 delta L)),   delta >= 1 + mu M / L.
//! ```
//!
//! `E_ref` may be any upper bound on `<0|H_d|0>`; a larger reference only
//! raises the threshold, so the statement stays true.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::binary_entropy;
use crate::hamiltonian::LocalHamiltonian;
use crate::spectrum::SpectralSummary;
use crate::{Error, Result};

/// Slack allowed on the energy-window comparison.
pub const WINDOW_TOL: f64 = 1e-9;

/// Sites whose local contribution is at most `delta L / n`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuietSet {
    pub delta: f64,
    pub threshold: f64,
    pub sites: Vec<usize>,
    pub n: usize,
}

impl QuietSet {
    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    /// Guaranteed minimum size `(delta - 1) n / delta`.
    pub fn size_lower_bound(&self) -> f64 {
        (self.delta - 1.0) * self.n as f64 / self.delta
    }
}

/// `1 + mu M / L`, the smallest admissible `delta`.
pub fn delta_floor(h: &LocalHamiltonian, mu: f64) -> Result<f64> {
    if !(mu > 0.0) {
        return Err(Error::InvalidParameter(format!("mu must be positive, got {mu}")));
    }
    if !(h.local_sum() > 0.0) {
        return Err(Error::DegenerateInstance);
    }
    Ok(1.0 + mu * h.total_strength() / h.local_sum())
}

pub fn build_quiet_set(h: &LocalHamiltonian, delta: f64, mu: f64) -> Result<QuietSet> {
    let floor = delta_floor(h, mu)?;
    // Grid points are generated from the floor itself; allow for that rounding only.
    if delta < floor * (1.0 - 1e-14) {
        return Err(Error::DeltaBelowFloor { delta, floor });
    }
    let n = h.n();
    let threshold = delta * h.local_sum() / n as f64;
    let sites = h
        .site_energy()
        .iter()
        .enumerate()
        .filter(|(_, &e)| e <= threshold)
        .map(|(s, _)| s)
        .collect();
    Ok(QuietSet { delta, threshold, sites, n })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PerturbationSize {
    pub r: usize,
    /// `floor(mu eta M n / (2 delta L))` before clamping.
    pub unclamped: usize,
    pub clamped: bool,
}

/// `r = floor(mu eta M n / (2 delta L))`, clamped to `floor(|Q| / 2)`.
pub fn max_perturbation_size(
    mu: f64,
    eta: f64,
    total_strength: f64,
    n: usize,
    delta: f64,
    local_sum: f64,
    quiet_size: usize,
) -> PerturbationSize {
    let raw = (mu * eta * total_strength * n as f64 / (2.0 * delta * local_sum)).floor();
    let unclamped = if raw.is_finite() && raw > 0.0 { raw as usize } else { 0 };
    let cap = quiet_size / 2;
    PerturbationSize { r: unclamped.min(cap), unclamped, clamped: unclamped > cap }
}

/// Basis index of `X_R |0..0>`: the bitmask with ones exactly on `R`.
pub fn perturbed_state(sites: &[usize], n: usize) -> Result<usize> {
    let mut idx = 0usize;
    for &s in sites {
        if s >= n {
            return Err(Error::QubitOutOfRange { index: s, n });
        }
        idx |= 1 << s;
    }
    Ok(idx)
}

/// All subsets of `sites` with at most `r` elements, smallest first.
pub fn enumerate_subsets(sites: &[usize], r: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut frontier: Vec<(Vec<usize>, usize)> = vec![(Vec::new(), 0)];
    for _ in 0..r.min(sites.len()) {
        let mut next = Vec::new();
        for (set, start) in &frontier {
            for (i, &site) in sites.iter().enumerate().skip(*start) {
                let mut s = set.clone();
                s.push(site);
                out.push(s.clone());
                next.push((s, i + 1));
            }
        }
        frontier = next;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowCheck {
    /// `|<Phi_R|H_d|Phi_R> - E_ref|`.
    pub delta_exact: f64,
    /// `2 * sum_{alpha touching R} ||h_alpha||`.
    pub touched_bound: f64,
    pub pass: bool,
}

/// Energy shift of one flipped state, evaluated only on terms that touch `R`.
pub fn verify_energy_window(h_d: &LocalHamiltonian, sites: &[usize], e_ref: f64, window: f64) -> Result<WindowCheck> {
    let flipped = perturbed_state(sites, h_d.n())?;
    let members: BTreeSet<usize> = sites.iter().copied().collect();
    let mut shift = 0.0;
    let mut touched = 0.0;
    for t in h_d.terms() {
        if t.qubits().iter().any(|q| members.contains(q)) {
            shift += t.diagonal_at(flipped) - t.diagonal_at(0);
            touched += t.norm();
        }
    }
    let energy = crate::depthd::energy_zero_state(h_d) + shift;
    let delta_exact = (energy - e_ref).abs();
    Ok(WindowCheck { delta_exact, touched_bound: 2.0 * touched, pass: delta_exact <= window + WINDOW_TOL })
}

/// Exact `sum_{i=0..r} C(q, i)`.
pub fn family_size(q: usize, r: usize) -> Result<BigUint> {
    if r > q {
        return Err(Error::InvalidParameter(format!("subset size r={r} exceeds quiet set size {q}")));
    }
    let mut term = BigUint::one();
    let mut sum = BigUint::one();
    for i in 0..r {
        term = term * BigUint::from(q - i) / BigUint::from(i + 1);
        sum += &term;
    }
    Ok(sum)
}

/// `log2` of a big integer (`-inf` for zero).
pub fn log2_big(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().expect("fits in f64").log2();
    }
    let shift = bits - 64;
    (x >> shift).to_f64().expect("64-bit mantissa").log2() + shift as f64
}

/// `log2` of the entropy lower bound `2^{q H(r/q)} / (q + 1)`.
pub fn entropy_family_log2_bound(q: usize, r: usize) -> f64 {
    if q == 0 {
        return 0.0;
    }
    let h = binary_entropy(r as f64 / q as f64).unwrap_or(0.0);
    q as f64 * h - ((q + 1) as f64).log2()
}

/// `((1 - eta) mu / (mu + 2))`, the interlacing prefactor.
pub fn interlacing_prefactor(mu: f64, eta: f64) -> f64 {
    (1.0 - eta) * mu / (mu + 2.0)
}

/// `D = ((1 - eta) mu / (mu + 2)) * |S_r|`.
pub fn interlacing_bound(family_size: &BigUint, mu: f64, eta: f64) -> f64 {
    interlacing_prefactor(mu, eta) * family_size.to_f64().unwrap_or(f64::INFINITY)
}

/// `log2 D`, `None` when `D = 0`.
pub fn interlacing_log2_bound(family_size: &BigUint, mu: f64, eta: f64) -> Option<f64> {
    let pre = interlacing_prefactor(mu, eta);
    (pre > 0.0).then(|| pre.log2() + log2_big(family_size))
}

/// Exponent `H(mu / (4K)) n / 2` obtained with `eta = 1/2, delta = 2` and `L <= K M`.
pub fn corollary_exponent(mu: f64, locality: usize, n: usize) -> Option<f64> {
    let x = mu / (4.0 * locality as f64);
    (x <= 0.5).then(|| binary_entropy(x).expect("argument in range") * n as f64 / 2.0)
}

/// Flip family at one `(mu, eta, delta)` point.
#[derive(Debug, Clone)]
pub struct PerturbationFamily {
    pub quiet: QuietSet,
    pub size: PerturbationSize,
    pub family_size: BigUint,
    /// `mu eta M`.
    pub window: f64,
}

impl PerturbationFamily {
    pub fn build(h_d: &LocalHamiltonian, mu: f64, eta: f64, delta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::InvalidParameter(format!("eta must lie in [0, 1], got {eta}")));
        }
        let quiet = build_quiet_set(h_d, delta, mu)?;
        Ok(Self::from_quiet(h_d, quiet, mu, eta))
    }

    fn from_quiet(h_d: &LocalHamiltonian, quiet: QuietSet, mu: f64, eta: f64) -> Self {
        let size = max_perturbation_size(
            mu,
            eta,
            h_d.total_strength(),
            h_d.n(),
            quiet.delta,
            h_d.local_sum(),
            quiet.len(),
        );
        let family_size = family_size(quiet.len(), size.r).expect("r <= |Q| / 2");
        Self { quiet, size, family_size, window: mu * eta * h_d.total_strength() }
    }

    pub fn subsets(&self) -> Vec<Vec<usize>> {
        enumerate_subsets(&self.quiet.sites, self.size.r)
    }
}

/// Optimizer grid over `(delta, eta)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridConfig {
    /// Log-spaced delta values from the floor upward.
    pub delta_points: usize,
    /// Upper end as a multiple of the floor, used when `delta_max` is unset.
    pub delta_span: f64,
    pub delta_max: Option<f64>,
    /// Uniform eta values on `[0, 1]`.
    pub eta_points: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { delta_points: 64, delta_span: 16.0, delta_max: None, eta_points: 65 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Validation {
    pub exact_count: usize,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityCertificate {
    pub mu: f64,
    pub eta: f64,
    pub delta: f64,
    pub r: usize,
    pub quiet_set_size: usize,
    pub family_size: BigUint,
    pub lower_bound_d: f64,
    pub log2_d: Option<f64>,
    /// `E_ref + mu M`.
    pub threshold_energy: f64,
    pub reference_energy: f64,
    /// True when the reported point is the `eta = 1/2, delta = 2` point.
    pub corollary_point: bool,
    /// `H(mu / 4K) n / 2` for the certified Hamiltonian's locality `K`.
    pub corollary_exponent: Option<f64>,
    pub validated: Option<Validation>,
}

impl DensityCertificate {
    pub fn log2_family_size(&self) -> f64 {
        log2_big(&self.family_size)
    }

    /// Compares against the exact count `N(threshold)` of an isospectral oracle.
    pub fn validate(&mut self, oracle: &SpectralSummary) -> &Validation {
        let exact_count = oracle.spectral_count(self.threshold_energy);
        let pass = exact_count as f64 >= self.lower_bound_d;
        self.validated.insert(Validation { exact_count, pass })
    }

    pub fn to_document(&self) -> CertificateDocument {
        CertificateDocument {
            mu: self.mu,
            eta: self.eta,
            delta: self.delta,
            r: self.r,
            quiet_set_size: self.quiet_set_size,
            family_size: self.family_size.to_string(),
            log2_family_size: self.log2_family_size(),
            lower_bound_d: self.lower_bound_d,
            log2_d: self.log2_d,
            threshold_energy: self.threshold_energy,
            validated: self.validated.clone(),
        }
    }
}

/// Certificate JSON; `family_size` is a decimal string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateDocument {
    pub mu: f64,
    pub eta: f64,
    pub delta: f64,
    pub r: usize,
    pub quiet_set_size: usize,
    pub family_size: String,
    pub log2_family_size: f64,
    pub lower_bound_d: f64,
    #[serde(rename = "log2_D")]
    pub log2_d: Option<f64>,
    pub threshold_energy: f64,
    pub validated: Option<Validation>,
}

struct Candidate {
    delta: f64,
    eta: f64,
    family: PerturbationFamily,
    bound: f64,
}

fn better(a: &Candidate, b: &Candidate) -> bool {
    // Larger bound wins; near-equal bounds fall back to smaller delta, then smaller eta.
    let scale = a.bound.abs().max(b.bound.abs());
    if (a.bound - b.bound).abs() > 1e-12 * scale {
        return a.bound > b.bound;
    }
    (a.delta, a.eta) < (b.delta, b.eta)
}

/// Maximizes the interlacing bound over the `(delta, eta)` grid, and always
/// tries `eta = 1/2, delta = 2` when admissible.
pub fn certify_density(h_d: &LocalHamiltonian, e_ref: f64, mu: f64, grid: &GridConfig) -> Result<DensityCertificate> {
    let floor = delta_floor(h_d, mu)?;
    let delta_max = grid.delta_max.unwrap_or(floor * grid.delta_span.max(1.0));
    if floor > delta_max {
        return Err(Error::NoAdmissiblePoint { floor, max: delta_max });
    }
    let points = grid.delta_points.max(1);
    let deltas: Vec<f64> = (0..points)
        .map(|i| {
            if points == 1 || i == 0 {
                floor
            } else {
                floor * (delta_max / floor).powf(i as f64 / (points - 1) as f64)
            }
        })
        .collect();
    let eta_points = grid.eta_points.max(2);
    let etas: Vec<f64> = (0..eta_points).map(|j| j as f64 / (eta_points - 1) as f64).collect();

    let per_delta: Vec<Candidate> = deltas
        .par_iter()
        .map(|&delta| -> Result<Option<Candidate>> {
            let quiet = build_quiet_set(h_d, delta, mu)?;
            let mut best: Option<Candidate> = None;
            for &eta in &etas {
                let family = PerturbationFamily::from_quiet(h_d, quiet.clone(), mu, eta);
                let bound = interlacing_bound(&family.family_size, mu, eta);
                let cand = Candidate { delta, eta, family, bound };
                if best.as_ref().is_none_or(|b| better(&cand, b)) {
                    best = Some(cand);
                }
            }
            Ok(best)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();

    let mut best: Option<Candidate> = None;
    for cand in per_delta {
        if best.as_ref().is_none_or(|b| better(&cand, b)) {
            best = Some(cand);
        }
    }
    let mut corollary_point = false;
    if 2.0 >= floor {
        let family = PerturbationFamily::build(h_d, mu, 0.5, 2.0)?;
        let bound = interlacing_bound(&family.family_size, mu, 0.5);
        let cand = Candidate { delta: 2.0, eta: 0.5, family, bound };
        if best.as_ref().is_none_or(|b| better(&cand, b)) {
            best = Some(cand);
            corollary_point = true;
        }
    }
    let best = best.expect("grid is non-empty");

    Ok(DensityCertificate {
        mu,
        eta: best.eta,
        delta: best.delta,
        r: best.family.size.r,
        quiet_set_size: best.family.quiet.len(),
        log2_d: interlacing_log2_bound(&best.family.family_size, mu, best.eta),
        family_size: best.family.family_size,
        lower_bound_d: best.bound,
        threshold_energy: e_ref + mu * h_d.total_strength(),
        reference_energy: e_ref,
        corollary_point,
        corollary_exponent: corollary_exponent(mu, h_d.locality(), h_d.n()),
        validated: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{random_pauli_hamiltonian, LocalTerm, WeightDist};

    fn z_terms(n: usize, weights: &[f64]) -> LocalHamiltonian {
        LocalHamiltonian::new(
            n,
            weights.iter().enumerate().map(|(q, &w)| LocalTerm::pauli(vec![q], "Z", w).unwrap()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn quiet_set_uniform_sites() {
        let h = z_terms(5, &[1.0; 5]);
        let q = build_quiet_set(&h, 2.0, 0.5).unwrap();
        assert_eq!(q.sites, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn quiet_set_one_loud_site() {
        // e = (1, 1, 1, 5), L = 8, threshold 4 at delta = 2
        let h = z_terms(4, &[1.0, 1.0, 1.0, 5.0]);
        let q = build_quiet_set(&h, 2.0, 0.1).unwrap();
        assert_eq!(q.threshold, 4.0);
        assert_eq!(q.sites, vec![0, 1, 2]);
        assert!(q.len() as f64 >= q.size_lower_bound());
        assert_eq!(q.size_lower_bound(), 2.0);
    }

    #[test]
    fn quiet_set_errors() {
        let h = z_terms(4, &[1.0; 4]);
        // floor = 1 + mu M / L = 1.5
        assert!(matches!(build_quiet_set(&h, 1.2, 0.5), Err(Error::DeltaBelowFloor { .. })));
        let zero = z_terms(2, &[0.0, 0.0]);
        assert!(matches!(build_quiet_set(&zero, 2.0, 0.5), Err(Error::DegenerateInstance)));
    }

    #[test]
    fn quiet_set_size_lower_bound_holds() {
        let h = random_pauli_hamiltonian(10, 3, 14, WeightDist::Uniform, 17).unwrap();
        let floor = delta_floor(&h, 0.3).unwrap();
        let delta = 1.5f64.max(floor);
        let q = build_quiet_set(&h, delta, 0.3).unwrap();
        let direct: Vec<usize> =
            (0..10).filter(|&s| h.site_energy()[s] <= delta * h.local_sum() / 10.0).collect();
        assert_eq!(q.sites, direct);
        assert!(q.len() as f64 >= (delta - 1.0) * 10.0 / delta);
        assert!(q.len() >= 4); // ceil(10/3)
    }

    #[test]
    fn perturbation_size_examples() {
        let p = max_perturbation_size(0.5, 0.5, 10.0, 100, 2.0, 30.0, 100);
        assert_eq!(p.r, 2);
        assert!(!p.clamped);
        let small = max_perturbation_size(0.1, 0.5, 1.0, 4, 2.0, 3.0, 4);
        assert_eq!(small.r, 0);
        let clamp = max_perturbation_size(1.0, 1.0, 100.0, 10, 1.0, 1.0, 3);
        assert_eq!((clamp.r, clamp.clamped), (1, true));
    }

    #[test]
    fn admissible_delta_never_clamps() {
        // mu eta M <= (delta - 1) L at the floor, so r <= (delta-1) n / (2 delta) <= |Q| / 2.
        for seed in 0..20 {
            let h = random_pauli_hamiltonian(10, 1 + (seed as usize % 3), 12, WeightDist::Uniform, seed).unwrap();
            for mu in [0.05, 0.3, 1.0, 3.0, 10.0] {
                let floor = delta_floor(&h, mu).unwrap();
                for mult in [1.0, 1.3, 2.0, 5.0] {
                    let q = build_quiet_set(&h, floor * mult, mu).unwrap();
                    let p = max_perturbation_size(mu, 1.0, h.total_strength(), 10, floor * mult, h.local_sum(), q.len());
                    assert!(!p.clamped, "seed {seed} mu {mu} mult {mult}");
                }
            }
        }
    }

    #[test]
    fn perturbed_state_bitmasks() {
        assert_eq!(perturbed_state(&[], 4).unwrap(), 0);
        assert_eq!(perturbed_state(&[0, 2], 4).unwrap(), 0b0101);
        assert!(perturbed_state(&[4], 4).is_err());
        let sites: Vec<usize> = (0..12).collect();
        let subsets = enumerate_subsets(&sites, 12);
        assert_eq!(subsets.len(), 1 << 12);
        let idx: BTreeSet<usize> = subsets.iter().map(|s| perturbed_state(s, 12).unwrap()).collect();
        assert_eq!(idx.len(), subsets.len());
    }

    #[test]
    fn window_examples() {
        let h = z_terms(2, &[1.0, 0.0]);
        let c = verify_energy_window(&h, &[], 1.0, 0.0).unwrap();
        assert_eq!(c.delta_exact, 0.0);
        let c = verify_energy_window(&h, &[0], 1.0, 0.0).unwrap();
        assert_eq!(c.delta_exact, 2.0);
        assert!(!c.pass);
    }

    #[test]
    fn window_matches_dense_expectation() {
        let h = random_pauli_hamiltonian(6, 2, 10, WeightDist::Uniform, 4).unwrap();
        let m = h.assemble_matrix().unwrap();
        let e0 = m[(0, 0)].re;
        for r in enumerate_subsets(&[0, 1, 2, 3, 4, 5], 3) {
            let b = perturbed_state(&r, 6).unwrap();
            let c = verify_energy_window(&h, &r, e0, 1e9).unwrap();
            assert!((c.delta_exact - (m[(b, b)].re - e0).abs()).abs() < 1e-12);
            assert!(c.delta_exact <= c.touched_bound + 1e-12);
        }
    }

    #[test]
    fn family_sizes() {
        assert_eq!(family_size(4, 0).unwrap(), BigUint::from(1u32));
        assert_eq!(family_size(4, 2).unwrap(), BigUint::from(11u32));
        assert!(family_size(3, 4).is_err());
        let s = family_size(20, 10).unwrap();
        assert!(log2_big(&s) >= entropy_family_log2_bound(20, 10));
        assert!(s.to_f64().unwrap() >= (1u64 << 20) as f64 / 21.0);
        // Beyond f64 range the log still works.
        let huge = family_size(3000, 1500).unwrap();
        assert!(log2_big(&huge) >= entropy_family_log2_bound(3000, 1500));
        assert!(log2_big(&huge) <= 3000.0);
    }

    #[test]
    fn interlacing_examples() {
        let hundred = BigUint::from(100u32);
        assert!((interlacing_bound(&hundred, 0.5, 0.5) - 10.0).abs() < 1e-12);
        assert_eq!(interlacing_bound(&hundred, 0.5, 1.0), 0.0);
        assert_eq!(interlacing_bound(&hundred, 2.0, 0.0), 50.0);
        assert!(interlacing_bound(&hundred, 1e6, 0.0) > 99.9);
        assert_eq!(interlacing_log2_bound(&hundred, 0.5, 1.0), None);
    }

    #[test]
    fn tight_window_falls_back_to_single_state() {
        // k = 3, n = 6: r = floor(mu eta n / (2 delta k)) is 0 on the whole grid for small mu.
        let h = random_pauli_hamiltonian(6, 3, 6, WeightDist::Pm1, 1).unwrap();
        let cert = certify_density(&h, h.basis_energy(0), 0.1, &GridConfig::default()).unwrap();
        assert_eq!(cert.r, 0);
        assert_eq!(cert.family_size, BigUint::from(1u32));
        assert_eq!(cert.eta, 0.0);
        assert!((cert.lower_bound_d - 0.1 / 2.1).abs() < 1e-15);
    }

    #[test]
    fn no_admissible_point() {
        let h = z_terms(3, &[1.0; 3]);
        let grid = GridConfig { delta_max: Some(1.1), ..Default::default() };
        assert!(matches!(certify_density(&h, 3.0, 0.5, &grid), Err(Error::NoAdmissiblePoint { .. })));
        assert!(certify_density(&h, 3.0, 0.0, &GridConfig::default()).is_err());
    }

    #[test]
    fn fixed_point_exponent_uses_locality() {
        // With L <= K M the (delta = 2, eta = 1/2) entropy argument mu M / (4L) dominates mu / (4K).
        for seed in 0..10 {
            let h = random_pauli_hamiltonian(10, 3, 15, WeightDist::Uniform, seed).unwrap();
            let mu = 0.3;
            let with_l = binary_entropy(mu * h.total_strength() / (4.0 * h.local_sum())).unwrap();
            let with_k = binary_entropy(mu / (4.0 * h.locality() as f64)).unwrap();
            assert!(with_l + 1e-15 >= with_k);
            let e = corollary_exponent(mu, h.locality(), 10).unwrap();
            assert!((e - with_k * 5.0).abs() < 1e-15);
        }
    }

    #[test]
    fn certificate_document_shape() {
        let h = z_terms(8, &[1.0; 8]);
        let cert = certify_density(&h, 8.0, 3.0, &GridConfig::default()).unwrap();
        let json = serde_json::to_value(cert.to_document()).unwrap();
        for key in ["mu", "eta", "delta", "r", "quiet_set_size", "family_size", "log2_family_size", "lower_bound_d", "log2_D", "threshold_energy", "validated"] {
            assert!(json.get(key).is_some(), "missing {key}");
        }
        assert!(json["family_size"].is_string());
    }
}
