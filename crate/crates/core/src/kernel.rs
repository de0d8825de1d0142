//! Bit-level statevector kernels shared by term assembly, gate application
//! and light-cone conjugation.
//!
//! Qubit `q` of an `n`-qubit register is bit `q` of the basis index. A local
//! operator on `qubits = [q0, q1, ..]` uses local index bit `i` for `qubits[i]`.

use nalgebra::DMatrix;

use crate::C64;

#[inline]
pub(crate) fn gather(index: usize, qubits: &[usize]) -> usize {
    qubits
        .iter()
        .enumerate()
        .fold(0, |acc, (i, &q)| acc | (((index >> q) & 1) << i))
}

#[inline]
pub(crate) fn scatter(base: usize, qubits: &[usize], local: usize) -> usize {
    qubits.iter().enumerate().fold(base, |acc, (i, &q)| {
        (acc & !(1 << q)) | (((local >> i) & 1) << q)
    })
}

#[inline]
pub(crate) fn mask_of(qubits: &[usize]) -> usize {
    qubits.iter().fold(0, |acc, &q| acc | (1 << q))
}

/// `state <- (op on qubits) state`, in place.
pub(crate) fn apply_local_inplace(op: &DMatrix<C64>, qubits: &[usize], state: &mut [C64]) {
    let local_dim = 1usize << qubits.len();
    debug_assert_eq!(op.nrows(), local_dim);
    let mask = mask_of(qubits);
    let offsets: Vec<usize> = (0..local_dim).map(|l| scatter(0, qubits, l)).collect();
    let mut buf = vec![C64::new(0.0, 0.0); local_dim];
    for base in 0..state.len() {
        if base & mask != 0 {
            continue;
        }
        for (l, off) in offsets.iter().enumerate() {
            buf[l] = state[base | off];
        }
        for (r, off) in offsets.iter().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for (c, b) in buf.iter().enumerate() {
                acc += op[(r, c)] * b;
            }
            state[base | off] = acc;
        }
    }
}

/// `out += (op on qubits) input`.
pub(crate) fn accumulate_local(op: &DMatrix<C64>, qubits: &[usize], input: &[C64], out: &mut [C64]) {
    let local_dim = 1usize << qubits.len();
    let mask = mask_of(qubits);
    let offsets: Vec<usize> = (0..local_dim).map(|l| scatter(0, qubits, l)).collect();
    for base in 0..input.len() {
        if base & mask != 0 {
            continue;
        }
        for (r, roff) in offsets.iter().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for (c, coff) in offsets.iter().enumerate() {
                acc += op[(r, c)] * input[base | coff];
            }
            out[base | roff] += acc;
        }
    }
}

/// Applies `op` (acting on row-index bits `qubits`) from the left to every
/// column of `m`.
pub(crate) fn left_apply(op: &DMatrix<C64>, qubits: &[usize], m: &mut DMatrix<C64>) {
    let rows = m.nrows();
    for col in m.as_mut_slice().chunks_mut(rows) {
        apply_local_inplace(op, qubits, col);
    }
}

/// Embeds `op` on the listed positions into the full `2^width` space.
pub(crate) fn embed(op: &DMatrix<C64>, positions: &[usize], width: usize) -> DMatrix<C64> {
    let dim = 1usize << width;
    let mask = mask_of(positions);
    let mut out = DMatrix::zeros(dim, dim);
    for c in 0..dim {
        let lc = gather(c, positions);
        let rest = c & !mask;
        for lr in 0..op.nrows() {
            let v = op[(lr, lc)];
            if v != C64::new(0.0, 0.0) {
                out[(scatter(rest, positions, lr), c)] += v;
            }
        }
    }
    out
}

pub(crate) fn max_hermitian_deviation(m: &DMatrix<C64>) -> f64 {
    let mut dev = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gather_scatter_roundtrip() {
        let qubits = [3, 0, 5];
        for local in 0..8 {
            let idx = scatter(0b010110, &qubits, local);
            assert_eq!(gather(idx, &qubits), local);
            // untouched bits survive
            assert_eq!(idx & 0b010110 & !mask_of(&qubits), 0b010110 & !mask_of(&qubits));
        }
    }

    #[test]
    fn embed_matches_kron_order() {
        // Z on position 1 of a 2-bit register: diag(1, 1, -1, -1)
        let z = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            C64::new(1.0, 0.0),
            C64::new(-1.0, 0.0),
        ]));
        let e = embed(&z, &[1], 2);
        let d: Vec<f64> = (0..4).map(|i| e[(i, i)].re).collect();
        assert_eq!(d, vec![1.0, 1.0, -1.0, -1.0]);
    }
}
