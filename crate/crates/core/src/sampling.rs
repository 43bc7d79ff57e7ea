//! Random states, unitaries and POVMs for property checks and sweeps.
//!
//! Pure states are normalised complex-Gaussian vectors; mixed states are
//! `AA†/tr(AA†)` with a complex-Gaussian square `A`. Both distributions are
//! unitarily invariant.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::constructors::Povm;
use crate::error::Result;
use crate::linalg::{inv_sqrt, unitary_from_generator, ComplexMatrix, C64};
use crate::states::{DensityOperator, PureState};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

pub fn random_pure_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> PureState {
    loop {
        let v: Vec<C64> = (0..dim).map(|_| gaussian(rng)).collect();
        if let Ok(s) = PureState::normalised(v) {
            return s;
        }
    }
}

pub fn random_density<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DensityOperator {
    let a = gaussian_matrix(dim, dim, rng);
    let m = &a * &a.adjoint();
    let tr = m.trace().re;
    DensityOperator::from_trusted(m.scale_real(1.0 / tr).hermitian_part())
}

/// Random Hermitian matrix with Gaussian entries.
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    gaussian_matrix(dim, dim, rng).hermitian_part()
}

/// `exp(-iH)` for a random Hermitian `H`.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    unitary_from_generator(&random_hermitian(dim, rng), 1.0).expect("Hermitian by construction")
}

/// POVM with `count` effects `S^{-1/2} A_k†A_k S^{-1/2}` where `S = Σ A_k†A_k`.
pub fn random_povm<R: Rng + ?Sized>(dim: usize, count: usize, rng: &mut R) -> Result<Povm> {
    let raw: Vec<ComplexMatrix> = (0..count)
        .map(|_| {
            let a = gaussian_matrix(dim, dim, rng);
            &a.adjoint() * &a
        })
        .collect();
    let total = raw
        .iter()
        .fold(ComplexMatrix::zeros(dim, dim), |acc, e| &acc + e);
    let w = inv_sqrt(&total)?;
    Povm::new(raw.iter().map(|e| (&(&w * e) * &w).hermitian_part()).collect())
}
