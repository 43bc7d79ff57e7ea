//! Pauli matrices and Pauli strings on qubit registers.

use crate::linalg::{kron_all, ComplexMatrix, I, ONE, ZERO};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn matrix(self) -> ComplexMatrix {
        match self {
            Axis::X => sigma_x(),
            Axis::Y => sigma_y(),
            Axis::Z => sigma_z(),
        }
    }
}

pub fn sigma_x() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
}

/// `σ_y = i|1⟩⟨0| − i|0⟩⟨1|`.
pub fn sigma_y() -> ComplexMatrix {
    ComplexMatrix::from_fn(2, 2, |i, j| match (i, j) {
        (0, 1) => -I,
        (1, 0) => I,
        _ => ZERO,
    })
}

pub fn sigma_z() -> ComplexMatrix {
    ComplexMatrix::diag(&[ONE, -ONE])
}

/// Tensor product over `n_qubits` with `ops[k] = (qubit, axis)`; other slots get the identity.
/// Qubits are numbered from 0 at the leftmost tensor factor.
pub fn pauli_string(n_qubits: usize, ops: &[(usize, Axis)]) -> ComplexMatrix {
    let id = ComplexMatrix::identity(2);
    let factors: Vec<ComplexMatrix> = (0..n_qubits)
        .map(|q| {
            let mut hits = ops.iter().filter(|(slot, _)| *slot == q);
            let first = hits.next();
            assert!(hits.next().is_none(), "qubit {q} appears twice in Pauli string");
            first.map_or_else(|| id.clone(), |(_, a)| a.matrix())
        })
        .collect();
    let refs: Vec<&ComplexMatrix> = factors.iter().collect();
    kron_all(&refs)
}
