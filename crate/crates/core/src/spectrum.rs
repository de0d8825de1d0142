//! Exact-diagonalization oracle.
//!
//! Full dense Hermitian eigensolves of the assembled matrix. Threshold
//! queries count `lambda_i <= E + tolerance` with an absolute tolerance.

use std::io::Write;

use nalgebra::{DMatrix, DVector};

use crate::hamiltonian::LocalHamiltonian;
use crate::{Error, OracleCap, Result, C64};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct SpectralSummary {
    eigenvalues: Vec<f64>,
    eigenvectors: Option<DMatrix<C64>>,
    source_n: usize,
    tolerance: f64,
}

pub fn diagonalize(h: &LocalHamiltonian, keep_vectors: bool) -> Result<SpectralSummary> {
    diagonalize_with_cap(h, keep_vectors, OracleCap::default())
}

pub fn diagonalize_with_cap(h: &LocalHamiltonian, keep_vectors: bool, cap: OracleCap) -> Result<SpectralSummary> {
    let matrix = h.assemble_matrix_with_cap(cap)?;
    Ok(SpectralSummary::from_matrix(matrix, h.n(), keep_vectors))
}

impl SpectralSummary {
    /// Diagonalizes an explicit Hermitian matrix on `n` qubits.
    pub fn from_matrix(matrix: DMatrix<C64>, n: usize, keep_vectors: bool) -> Self {
        assert_eq!(matrix.nrows(), 1usize << n, "matrix dimension must be 2^n");
        if keep_vectors {
            let eig = matrix.symmetric_eigen();
            let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
            order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
            let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
            let vectors = DMatrix::from_fn(eig.eigenvectors.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
            Self { eigenvalues, eigenvectors: Some(vectors), source_n: n, tolerance: DEFAULT_TOLERANCE }
        } else {
            let mut eigenvalues: Vec<f64> = matrix.symmetric_eigenvalues().iter().copied().collect();
            eigenvalues.sort_by(f64::total_cmp);
            Self { eigenvalues, eigenvectors: None, source_n: n, tolerance: DEFAULT_TOLERANCE }
        }
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> Option<&DMatrix<C64>> {
        self.eigenvectors.as_ref()
    }

    pub fn source_n(&self) -> usize {
        self.source_n
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn ground_energy(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max_energy(&self) -> f64 {
        *self.eigenvalues.last().expect("non-empty spectrum")
    }

    /// `N(E) = |{i : lambda_i <= E + tolerance}|`.
    pub fn spectral_count(&self, energy: f64) -> usize {
        let limit = energy + self.tolerance;
        self.eigenvalues.partition_point(|&l| l <= limit)
    }

    /// Eigenvector columns with `lambda_i <= E + tolerance`.
    pub fn low_energy_vectors(&self, energy: f64) -> Result<DMatrix<C64>> {
        let vectors = self.eigenvectors.as_ref().ok_or(Error::MissingEigenvectors)?;
        let count = self.spectral_count(energy);
        Ok(vectors.columns(0, count).into_owned())
    }

    /// `gamma = sum_{lambda_i <= E} |<state|phi_i>|^2`.
    pub fn projector_overlap(&self, state: &[C64], energy: f64) -> Result<f64> {
        let vectors = self.eigenvectors.as_ref().ok_or(Error::MissingEigenvectors)?;
        if state.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: state.len() });
        }
        let psi = DVector::from_column_slice(state);
        let count = self.spectral_count(energy);
        let gamma = (0..count)
            .map(|i| vectors.column(i).dotc(&psi).norm_sqr())
            .sum::<f64>();
        Ok(gamma)
    }

    /// CSV with header `index,eigenvalue`.
    pub fn write_spectrum_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "index,eigenvalue")?;
        for (i, l) in self.eigenvalues.iter().enumerate() {
            writeln!(w, "{i},{l:.15e}")?;
        }
        Ok(())
    }

    /// CSV with header `E,count`.
    pub fn write_count_sweep_csv<W: Write>(&self, mut w: W, energies: &[f64]) -> std::io::Result<()> {
        writeln!(w, "E,count")?;
        for &e in energies {
            writeln!(w, "{e:.15e},{}", self.spectral_count(e))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{random_pauli_hamiltonian, LocalTerm, WeightDist};

    fn z_sum(n: usize, w: f64) -> LocalHamiltonian {
        LocalHamiltonian::new(n, (0..n).map(|q| LocalTerm::pauli(vec![q], "Z", w).unwrap()).collect()).unwrap()
    }

    #[test]
    fn single_z() {
        let s = diagonalize(&z_sum(1, 1.0), false).unwrap();
        assert_eq!(s.eigenvalues(), &[-1.0, 1.0]);
        assert_eq!(s.ground_energy(), -1.0);
        assert_eq!(s.spectral_count(0.0), 1);
    }

    #[test]
    fn negative_z_chain() {
        let s = diagonalize(&z_sum(3, -1.0), false).unwrap();
        let expect = [-3.0, -1.0, -1.0, -1.0, 1.0, 1.0, 1.0, 3.0];
        for (a, b) in s.eigenvalues().iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn count_against_hamming_weights() {
        // Z_0 + Z_1 + Z_2 has eigenvalue n - 2 * popcount(b) on basis state b.
        let s = diagonalize(&z_sum(3, 1.0), false).unwrap();
        let brute = (0..8u32).filter(|b| 3.0 - 2.0 * b.count_ones() as f64 <= 0.0).count();
        assert_eq!(brute, 4);
        assert_eq!(s.spectral_count(0.0), brute);
        assert_eq!(s.spectral_count(s.max_energy()), 8);
    }

    #[test]
    fn trace_identity_random_instance() {
        let h = random_pauli_hamiltonian(8, 3, 16, WeightDist::Uniform, 21).unwrap();
        let m = h.assemble_matrix().unwrap();
        let trace: f64 = (0..256).map(|i| m[(i, i)].re).sum();
        let s = SpectralSummary::from_matrix(m, 8, false);
        let sum: f64 = s.eigenvalues().iter().sum();
        assert!((sum - trace).abs() < 1e-8);
        assert!(s.eigenvalues().iter().all(|l| l.abs() <= h.total_strength() + 1e-9));
    }

    #[test]
    fn overlap_examples() {
        let h = random_pauli_hamiltonian(4, 2, 6, WeightDist::Uniform, 8).unwrap();
        let s = diagonalize(&h, true).unwrap();
        let v = s.eigenvectors().unwrap();
        let ground: Vec<C64> = v.column(0).iter().copied().collect();
        assert!((s.projector_overlap(&ground, s.ground_energy()).unwrap() - 1.0).abs() < 1e-12);
        let top: Vec<C64> = v.column(15).iter().copied().collect();
        let mid = s.eigenvalues()[14];
        if s.eigenvalues()[15] - mid > 1e-6 {
            assert!(s.projector_overlap(&top, mid).unwrap().abs() < 1e-12);
        }
        let mut uniform = vec![C64::new(0.25, 0.0); 16];
        uniform[3] = C64::new(0.0, 0.25);
        assert!((s.projector_overlap(&uniform, s.max_energy()).unwrap() - 1.0).abs() < 1e-12);
        assert!(matches!(s.projector_overlap(&uniform[..8], 0.0), Err(Error::DimensionMismatch { .. })));
        let no_vecs = diagonalize(&h, false).unwrap();
        assert!(matches!(no_vecs.projector_overlap(&uniform, 0.0), Err(Error::MissingEigenvectors)));
    }

    #[test]
    fn eigenvectors_are_unitary() {
        let h = random_pauli_hamiltonian(5, 3, 8, WeightDist::Uniform, 2).unwrap();
        let s = diagonalize(&h, true).unwrap();
        let v = s.eigenvectors().unwrap();
        assert!((v.adjoint() * v - DMatrix::<C64>::identity(32, 32)).camax() < 1e-9);
    }

    #[test]
    fn degenerate_threshold_stability() {
        let h = random_pauli_hamiltonian(6, 2, 8, WeightDist::Uniform, 13).unwrap();
        let s = diagonalize(&h, false).unwrap();
        let ev = s.eigenvalues();
        for w in ev.windows(2) {
            let e = 0.5 * (w[0] + w[1]);
            if w[1] - w[0] > 4.0 * s.tolerance() {
                assert_eq!(s.spectral_count(e), s.spectral_count(e + s.tolerance() / 2.0));
            }
        }
    }

    #[test]
    fn csv_exports() {
        let s = diagonalize(&z_sum(1, 1.0), false).unwrap();
        let mut buf = Vec::new();
        s.write_spectrum_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("index,eigenvalue\n0,"));
        let mut buf = Vec::new();
        s.write_count_sweep_csv(&mut buf, &[-2.0, 0.0, 2.0]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let counts: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
        assert_eq!(counts, vec!["0", "1", "2"]);
    }
}
