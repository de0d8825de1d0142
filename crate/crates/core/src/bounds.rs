//! Binary entropy and runtime exponent calculators.
//!
//! Every exponent `c` describes a runtime `O*(2^{c n})`. The entropy-governed
//! exponent is `(1/2)(1 - H(eps / (2^{d+2} k)) / 2)`; the rational baselines are
//! `(1/2)(1 - eps / (2k + eps))` and, for estimation only, `(1/2)(1 - eps / (k + eps))`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// `H(x) = -x log2 x - (1 - x) log2 (1 - x)`, with `H(0) = H(1) = 0`.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidParameter(format!("binary entropy argument {x} outside [0, 1]")));
    }
    if x == 0.0 || x == 1.0 {
        return Ok(0.0);
    }
    Ok(-x * x.log2() - (1.0 - x) * (1.0 - x).log2())
}

fn check_k_eps(k: u32, epsilon: f64) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidParameter("locality k must be >= 1".into()));
    }
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::InvalidParameter(format!("epsilon must be positive, got {epsilon}")));
    }
    Ok(())
}

/// Entropy argument `eps / (2^{d+2} k)`.
pub fn entropy_argument(k: u32, epsilon: f64, d: u32) -> f64 {
    epsilon / (2f64.powi(d as i32 + 2) * k as f64)
}

/// `(1/2)(1 - H(eps / (2^{d+2} k)) / 2)`.
pub fn exponent_ours(k: u32, epsilon: f64, d: u32) -> Result<f64> {
    check_k_eps(k, epsilon)?;
    let x = entropy_argument(k, epsilon, d);
    if x > 0.5 {
        return Err(Error::EntropyArgument(x));
    }
    Ok(0.5 * (1.0 - 0.5 * binary_entropy(x)?))
}

/// `(1/2)(1 - eps / (2k + eps))`.
pub fn exponent_buhrman(k: u32, epsilon: f64) -> Result<f64> {
    check_k_eps(k, epsilon)?;
    Ok(0.5 * (1.0 - epsilon / (2.0 * k as f64 + epsilon)))
}

/// Estimation-only variant `(1/2)(1 - eps / (k + eps))`.
pub fn exponent_buhrman_estimation(k: u32, epsilon: f64) -> Result<f64> {
    check_k_eps(k, epsilon)?;
    Ok(0.5 * (1.0 - epsilon / (k as f64 + epsilon)))
}

/// Whether `(1/2) H(eps / 2^{d+2} k) >= eps / (2k + eps)` holds at depth `d`.
pub fn beats_rational(k: u32, epsilon: f64, d: u32) -> Result<bool> {
    check_k_eps(k, epsilon)?;
    let x = entropy_argument(k, epsilon, d);
    if x > 0.5 {
        return Err(Error::EntropyArgument(x));
    }
    Ok(0.5 * binary_entropy(x)? >= epsilon / (2.0 * k as f64 + epsilon))
}

/// Scan ceiling for [`crossover_depth`]; the entropy side vanishes long before.
pub const MAX_SCAN_DEPTH: u32 = 256;

/// Largest `d >= 0` for which [`beats_rational`] holds, scanning upward until
/// it first fails. `None` when `d = 0` already fails.
pub fn crossover_depth(k: u32, epsilon: f64) -> Result<Option<u32>> {
    check_k_eps(k, epsilon)?;
    if epsilon > k as f64 {
        return Err(Error::InvalidParameter(format!("need epsilon <= k, got epsilon={epsilon}, k={k}")));
    }
    let mut last = None;
    for d in 0..=MAX_SCAN_DEPTH {
        if beats_rational(k, epsilon, d)? {
            last = Some(d);
        } else {
            break;
        }
    }
    Ok(last)
}

/// `log2 log2 (k / eps)`, reported next to the crossover depth as a diagnostic.
pub fn loglog_scale(k: u32, epsilon: f64) -> f64 {
    (k as f64 / epsilon).log2().log2()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentRow {
    pub k: u32,
    pub epsilon: f64,
    pub d: u32,
    pub c_buhrman: f64,
    pub c_buhrman_est: f64,
    pub c_ours: f64,
}

impl ExponentRow {
    pub fn compute(k: u32, epsilon: f64, d: u32) -> Result<Self> {
        Ok(Self {
            k,
            epsilon,
            d,
            c_buhrman: exponent_buhrman(k, epsilon)?,
            c_buhrman_est: exponent_buhrman_estimation(k, epsilon)?,
            c_ours: exponent_ours(k, epsilon, d)?,
        })
    }
}

pub const DEFAULT_KS: [u32; 3] = [3, 4, 10];
pub const DEFAULT_EPSILONS: [f64; 4] = [0.125, 0.05, 0.01, 0.001];
pub const DEFAULT_DEPTHS: [u32; 2] = [0, 1];

/// Cross product `ks x epsilons x ds`, in that nesting order.
pub fn emit_comparison_table(ks: &[u32], epsilons: &[f64], ds: &[u32]) -> Result<Vec<ExponentRow>> {
    let mut rows = Vec::with_capacity(ks.len() * epsilons.len() * ds.len());
    for &k in ks {
        for &eps in epsilons {
            for &d in ds {
                rows.push(ExponentRow::compute(k, eps, d)?);
            }
        }
    }
    Ok(rows)
}

pub fn default_table() -> Vec<ExponentRow> {
    emit_comparison_table(&DEFAULT_KS, &DEFAULT_EPSILONS, &DEFAULT_DEPTHS).expect("default grid is valid")
}

/// One `(k, eps)` line with the entropy exponent per depth, the printed layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PivotRow {
    pub k: u32,
    pub epsilon: f64,
    pub c_buhrman: f64,
    pub c_ours_by_depth: Vec<(u32, f64)>,
}

/// Groups rows sharing `(k, eps)`, preserving first-seen order.
pub fn pivot_by_depth(rows: &[ExponentRow]) -> Vec<PivotRow> {
    let mut out: Vec<PivotRow> = Vec::new();
    for r in rows {
        match out.iter_mut().find(|p| p.k == r.k && p.epsilon == r.epsilon) {
            Some(p) => p.c_ours_by_depth.push((r.d, r.c_ours)),
            None => out.push(PivotRow {
                k: r.k,
                epsilon: r.epsilon,
                c_buhrman: r.c_buhrman,
                c_ours_by_depth: vec![(r.d, r.c_ours)],
            }),
        }
    }
    out
}

pub const CSV_HEADER: &str = "k,epsilon,d,c_buhrman,c_buhrman_est,c_ours";

pub fn write_table_csv<W: Write>(rows: &[ExponentRow], mut w: W) -> std::io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(w, "{},{},{},{:.10},{:.10},{:.10}", r.k, r.epsilon, r.d, r.c_buhrman, r.c_buhrman_est, r.c_ours)?;
    }
    Ok(())
}

/// Exponent-versus-epsilon series per depth: `d,epsilon,c_ours,c_buhrman`.
pub fn write_plot_csv<W: Write>(k: u32, epsilons: &[f64], ds: &[u32], mut w: W) -> Result<()> {
    let io = |e: std::io::Error| Error::InvalidParameter(format!("write failed: {e}"));
    writeln!(w, "k,d,epsilon,c_ours,c_buhrman").map_err(io)?;
    for &d in ds {
        for &eps in epsilons {
            writeln!(w, "{k},{d},{eps},{:.10},{:.10}", exponent_ours(k, eps, d)?, exponent_buhrman(k, eps)?).map_err(io)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_values() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        // Reference value from an independent Python evaluation.
        assert!((binary_entropy(0.125 / 12.0).unwrap() - 0.083_542_888_310_322_33).abs() < 1e-12);
        assert!(binary_entropy(1.5).is_err());
        assert!(binary_entropy(-0.1).is_err());
        for i in 1..50 {
            let x = i as f64 / 100.0;
            assert!((binary_entropy(x).unwrap() - binary_entropy(1.0 - x).unwrap()).abs() < 1e-15);
        }
    }

    #[test]
    fn printed_exponents() {
        assert!((exponent_ours(3, 0.125, 0).unwrap() - 0.4791143).abs() < 1e-7);
        assert!((exponent_ours(3, 0.125, 1).unwrap() - 0.4882501).abs() < 1e-7);
        assert!((exponent_ours(10, 0.001, 0).unwrap() - 0.4998954).abs() < 1e-7);
        assert!((exponent_ours(4, 0.01, 1).unwrap() - 0.4989776).abs() < 1e-7);
        assert!((exponent_buhrman(3, 0.125).unwrap() - 0.4897959).abs() < 1e-7);
        assert!((exponent_buhrman(4, 0.05).unwrap() - 0.4968944).abs() < 1e-7);
        assert!((exponent_buhrman(10, 0.001).unwrap() - 0.4999750).abs() < 1e-7);
    }

    #[test]
    fn estimation_variant() {
        assert_eq!(exponent_buhrman_estimation(3, 3.0).unwrap(), 0.25);
        assert!((exponent_buhrman_estimation(3, 0.125).unwrap() - 0.48).abs() < 1e-15);
        assert!((exponent_buhrman_estimation(3, 1e-12).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn entropy_regime_enforced() {
        // eps / (4k) > 1/2
        assert!(matches!(exponent_ours(1, 3.0, 0), Err(Error::EntropyArgument(_))));
        assert!(exponent_ours(0, 0.1, 0).is_err());
        assert!(exponent_buhrman(3, 0.0).is_err());
    }

    #[test]
    fn crossover_scan() {
        let d = crossover_depth(3, 0.125).unwrap().unwrap();
        assert!(d >= 1);
        assert!(beats_rational(3, 0.125, d).unwrap());
        assert!(!beats_rational(3, 0.125, d + 1).unwrap());
        assert!(crossover_depth(10, 0.001).unwrap().unwrap() >= 1);
        assert!(crossover_depth(3, 4.0).is_err());
    }

    #[test]
    fn empty_table() {
        assert!(emit_comparison_table(&[], &[0.1], &[0]).unwrap().is_empty());
        assert!(emit_comparison_table(&[3], &[], &[0]).unwrap().is_empty());
    }

    #[test]
    fn pivot_layout() {
        let rows = default_table();
        assert_eq!(rows.len(), 24);
        let piv = pivot_by_depth(&rows);
        assert_eq!(piv.len(), 12);
        assert!(piv.iter().all(|p| p.c_ours_by_depth.len() == 2));
    }
}
