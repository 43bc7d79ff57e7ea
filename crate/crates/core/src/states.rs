//! Pure and mixed states, and the state-level observables used throughout:
//! target fidelity, Bloch coordinates and two-qubit concurrence.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::linalg::{basis_vector, eigh, inner, kron, psd_sqrt, vec_norm, ComplexMatrix, C64};
use crate::pauli::{sigma_x, sigma_y, sigma_z};

/// Tolerance on the state invariants (norm, Hermiticity, trace, positivity).
pub const STATE_TOL: f64 = 1e-10;
/// Fidelities within this distance outside `[0, 1]` are clamped.
pub const FIDELITY_CLAMP_TOL: f64 = 1e-12;

/// Normalised state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: Vec<C64>,
}

impl PureState {
    /// Wraps amplitudes that are already normalised to within [`STATE_TOL`].
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::Structure("state has no amplitudes".into()));
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let norm = vec_norm(&amplitudes);
        if (norm - 1.0).abs() > STATE_TOL {
            return Err(Error::NotNormalised { norm });
        }
        Ok(Self { amplitudes })
    }

    /// Normalises arbitrary nonzero amplitudes.
    pub fn normalised(amplitudes: Vec<C64>) -> Result<Self> {
        let norm = vec_norm(&amplitudes);
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalised { norm });
        }
        Self::new(amplitudes.into_iter().map(|z| z / norm).collect())
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::normalised(amplitudes.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index {index} out of range for dimension {dim}");
        Self {
            amplitudes: basis_vector(dim, index),
        }
    }

    /// `(|0⟩ + |1⟩)/√2`, the +1 eigenstate of σ_x.
    pub fn plus() -> Self {
        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        Self {
            amplitudes: vec![h, h],
        }
    }

    /// `(|00⟩ + |11⟩)/√2`.
    pub fn phi_plus() -> Self {
        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        let z = C64::new(0.0, 0.0);
        Self {
            amplitudes: vec![h, z, z, h],
        }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    /// `⟨self|other⟩`.
    pub fn overlap(&self, other: &PureState) -> C64 {
        inner(&self.amplitudes, &other.amplitudes)
    }

    pub fn tensor(&self, other: &PureState) -> PureState {
        Self {
            amplitudes: crate::linalg::kron_vec(&self.amplitudes, &other.amplitudes),
        }
    }

    /// Image under a unitary; the caller is responsible for `u` being unitary.
    pub fn transformed(&self, u: &ComplexMatrix) -> Result<PureState> {
        Self::new(u.mul_vec(&self.amplitudes))
    }

    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::projector(&self.amplitudes)
    }

    /// Explicit promotion to `|ψ⟩⟨ψ|`.
    pub fn to_density(&self) -> DensityOperator {
        DensityOperator {
            matrix: self.projector(),
        }
    }
}

/// Hermitian, unit-trace, positive semi-definite operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
}

impl DensityOperator {
    /// Validates Hermiticity, unit trace and positivity to [`STATE_TOL`].
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotSquare {
                rows: matrix.rows(),
                cols: matrix.cols(),
            });
        }
        if !matrix.is_finite() {
            return Err(Error::NonFinite);
        }
        let defect = matrix.hermitian_defect();
        if defect > STATE_TOL {
            return Err(Error::NotHermitian { defect });
        }
        let trace = matrix.trace().re;
        if (trace - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidTrace { trace });
        }
        let matrix = matrix.hermitian_part();
        let min = eigh(&matrix)?.values[0];
        if min < -STATE_TOL {
            return Err(Error::NotPsd { min_eigenvalue: min });
        }
        Ok(Self { matrix })
    }

    /// Skips validation; for outputs of maps already known to preserve the invariants.
    pub(crate) fn from_trusted(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    /// `U ρ U†`.
    pub fn conjugated(&self, u: &ComplexMatrix) -> DensityOperator {
        Self {
            matrix: (&(u * &self.matrix) * &u.adjoint()).hermitian_part(),
        }
    }

    pub fn tensor(&self, other: &DensityOperator) -> DensityOperator {
        Self {
            matrix: kron(&self.matrix, &other.matrix),
        }
    }

    /// Eigenvalues ascending.
    pub fn spectrum(&self) -> Vec<f64> {
        eigh(&self.matrix).map(|e| e.values).unwrap_or_default()
    }
}

fn clamp_fidelity(f: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&f) {
        Ok(f)
    } else if (-FIDELITY_CLAMP_TOL..0.0).contains(&f) {
        Ok(0.0)
    } else if f > 1.0 && f <= 1.0 + FIDELITY_CLAMP_TOL {
        Ok(1.0)
    } else {
        Err(Error::FidelityOutOfRange(f))
    }
}

/// Target fidelity `⟨T|ρ|T⟩`, clamped against round-off.
pub fn target_fidelity(rho: &DensityOperator, target: &PureState) -> Result<f64> {
    if rho.dim() != target.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: target.dim(),
        });
    }
    clamp_fidelity(rho.matrix.expectation(target.amplitudes()).re)
}

/// Bloch vector `(tr ρσ_x, tr ρσ_y, tr ρσ_z)` of a qubit state.
pub fn bloch_vector(rho: &DensityOperator) -> Result<[f64; 3]> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: rho.dim(),
        });
    }
    let m = rho.matrix();
    let component = |s: ComplexMatrix| (m * &s).trace().re;
    Ok([component(sigma_x()), component(sigma_y()), component(sigma_z())])
}

/// Wootters concurrence of a two-qubit state.
///
/// The values `μ_k` are the square roots of the eigenvalues of `ρ ρ̃` with
/// `ρ̃ = (σ_y⊗σ_y) ρ* (σ_y⊗σ_y)`. They are obtained here from the Hermitian
/// matrix `√ρ ρ̃ √ρ`, which has the same spectrum.
pub fn concurrence(rho: &DensityOperator) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: rho.dim(),
        });
    }
    let yy = kron(&sigma_y(), &sigma_y());
    let flipped = &(&yy * &rho.matrix.conj()) * &yy;
    let root = psd_sqrt(&rho.matrix)?;
    let h = (&(&root * &flipped) * &root).hermitian_part();
    let mut mu: Vec<f64> = eigh(&h)?.values.iter().map(|&x| x.max(0.0).sqrt()).collect();
    mu.sort_by(|a, b| b.total_cmp(a));
    Ok((mu[0] - mu[1] - mu[2] - mu[3]).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ZERO;

    #[test]
    fn pure_state_validation() {
        assert!(PureState::new(vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)]).is_err());
        assert!(PureState::normalised(vec![ZERO, ZERO]).is_err());
        let s = PureState::from_real(&[3.0, 4.0]).unwrap();
        assert!((s.amplitudes()[0].re - 0.6).abs() < 1e-15);
    }

    #[test]
    fn density_validation() {
        let not_unit = ComplexMatrix::identity(2);
        assert!(matches!(DensityOperator::new(not_unit), Err(Error::InvalidTrace { .. })));
        let negative = ComplexMatrix::diag_real(&[1.5, -0.5]);
        assert!(matches!(DensityOperator::new(negative), Err(Error::NotPsd { .. })));
        let skew = ComplexMatrix::from_real_rows(&[&[0.5, 0.1], &[-0.1, 0.5]]);
        assert!(matches!(DensityOperator::new(skew), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn fidelity_examples() {
        let t = PureState::plus();
        assert!((target_fidelity(&t.to_density(), &t).unwrap() - 1.0).abs() < 1e-15);
        for d in 2..6 {
            let t = PureState::basis(d, d - 1);
            let f = target_fidelity(&DensityOperator::maximally_mixed(d), &t).unwrap();
            assert!((f - 1.0 / d as f64).abs() < 1e-15);
        }
        let minus = PureState::from_real(&[1.0, -1.0]).unwrap();
        assert_eq!(target_fidelity(&minus.to_density(), &t).unwrap(), 0.0);
        assert!(matches!(
            target_fidelity(&DensityOperator::maximally_mixed(3), &t),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn fidelity_clamping() {
        assert_eq!(clamp_fidelity(-5e-13).unwrap(), 0.0);
        assert_eq!(clamp_fidelity(1.0 + 5e-13).unwrap(), 1.0);
        assert!(clamp_fidelity(-1e-9).is_err());
        assert!(clamp_fidelity(1.0 + 1e-9).is_err());
    }

    #[test]
    fn bloch_examples() {
        let b = bloch_vector(&DensityOperator::maximally_mixed(2)).unwrap();
        assert!(b.iter().all(|x| x.abs() < 1e-15));
        let b = bloch_vector(&PureState::basis(2, 0).to_density()).unwrap();
        assert_eq!(b, [0.0, 0.0, 1.0]);
        let b = bloch_vector(&PureState::plus().to_density()).unwrap();
        assert!((b[0] - 1.0).abs() < 1e-15 && b[1].abs() < 1e-15 && b[2].abs() < 1e-15);
        assert!(bloch_vector(&DensityOperator::maximally_mixed(3)).is_err());
    }

    #[test]
    fn concurrence_examples() {
        let up_up = PureState::basis(4, 0).to_density();
        assert!(concurrence(&up_up).unwrap().abs() < 1e-7);
        let bell = PureState::phi_plus().to_density();
        assert!((concurrence(&bell).unwrap() - 1.0).abs() < 1e-7);
        assert_eq!(concurrence(&DensityOperator::maximally_mixed(4)).unwrap(), 0.0);
        assert!(concurrence(&DensityOperator::maximally_mixed(2)).is_err());
    }
}
