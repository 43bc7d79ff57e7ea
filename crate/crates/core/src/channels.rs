//! Kraus channels: application, reduction from a system–controller unitary,
//! convergence verification, iteration and comparison.
//!
//! A channel `ρ ↦ Σ M_i ρ M_i†` drives every state towards a pure target `|T⟩`
//! when two conditions hold:
//!
//! * fixed point: `M_i|T⟩ = z_i|T⟩` for every Kraus operator,
//! * span: the vectors `M_i†|T⟩` span the whole system space.
//!
//! [`KrausChannel::verify`] measures both, together with completeness, and
//! returns a [`ChannelReport`].

use crate::analysis::{control_strength, ControlStrength};
use crate::error::{Error, Result};
use crate::linalg::{
    inner, numerical_rank, orthogonal_complement, partial_trace, psd_sqrt, vec_norm,
    ComplexMatrix, TensorStructure, C64, RANK_TOL, ZERO,
};
use crate::states::{bloch_vector, concurrence, target_fidelity, DensityOperator, PureState};

/// Default tolerance of every verification predicate.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Tolerance for the unitary and basis checks in [`kraus_from_unitary`].
pub const UNITARY_TOL: f64 = 1e-10;

/// Trace-preserving channel given by `n ≥ 1` square Kraus operators of equal size.
#[derive(Clone, Debug)]
pub struct KrausChannel {
    dim: usize,
    operators: Vec<ComplexMatrix>,
    tol: f64,
}

impl KrausChannel {
    /// Validates shapes and completeness `Σ M_i†M_i = I` to within `tol`.
    pub fn new(operators: Vec<ComplexMatrix>, tol: f64) -> Result<Self> {
        let first = operators
            .first()
            .ok_or_else(|| Error::Structure("a channel needs at least one Kraus operator".into()))?;
        if !first.is_square() {
            return Err(Error::NotSquare {
                rows: first.rows(),
                cols: first.cols(),
            });
        }
        let dim = first.rows();
        for m in &operators {
            if m.rows() != dim || m.cols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: m.rows().max(m.cols()),
                });
            }
            if !m.is_finite() {
                return Err(Error::NonFinite);
            }
        }
        if !(tol.is_finite() && tol > 0.0) {
            return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
        }
        let channel = Self { dim, operators, tol };
        let defect = channel.completeness_defect();
        if defect > tol {
            return Err(Error::Precondition(format!(
                "Kraus operators are not complete: ‖Σ M†M − I‖ = {defect:e} > {tol:e}"
            )));
        }
        Ok(channel)
    }

    pub fn with_default_tol(operators: Vec<ComplexMatrix>) -> Result<Self> {
        Self::new(operators, DEFAULT_TOL)
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            operators: vec![ComplexMatrix::identity(dim)],
            tol: DEFAULT_TOL,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    /// `‖Σ M_i†M_i − I‖` in operator norm.
    pub fn completeness_defect(&self) -> f64 {
        let sum = self
            .operators
            .iter()
            .fold(ComplexMatrix::zeros(self.dim, self.dim), |acc, m| {
                &acc + &(&m.adjoint() * m)
            });
        (&sum - &ComplexMatrix::identity(self.dim)).op_norm()
    }

    /// Channel with every Kraus operator conjugated, `M_i ↦ U M_i U†`.
    pub fn conjugated(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.rows() != self.dim || !u.is_square() {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: u.rows(),
            });
        }
        let ud = u.adjoint();
        Ok(Self {
            dim: self.dim,
            operators: self.operators.iter().map(|m| &(u * m) * &ud).collect(),
            tol: self.tol,
        })
    }

    fn check_dim(&self, found: usize) -> Result<()> {
        if found == self.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim,
                found,
            })
        }
    }

    /// `Σ M_i ρ M_i†`, re-Hermitised and rescaled to unit trace.
    ///
    /// Completeness holds only to rounding, so without the rescaling the trace
    /// would drift over long iterations.
    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        self.check_dim(rho.dim())?;
        let out = self.apply_matrix(rho.matrix());
        let trace = out.trace().re;
        Ok(DensityOperator::from_trusted(out.scale_real(1.0 / trace)))
    }

    fn apply_matrix(&self, m: &ComplexMatrix) -> ComplexMatrix {
        self.operators
            .iter()
            .fold(ComplexMatrix::zeros(self.dim, self.dim), |acc, k| {
                &acc + &(&(k * m) * &k.adjoint())
            })
            .hermitian_part()
    }

    /// Measures completeness, the fixed-point condition and the span condition for `target`.
    pub fn verify(&self, target: &PureState) -> Result<ChannelReport> {
        self.check_dim(target.dim())?;
        let t = target.amplitudes();
        let mut fixed_point_defect: f64 = 0.0;
        let mut z = Vec::with_capacity(self.operators.len());
        for m in &self.operators {
            let image = m.mul_vec(t);
            let zi = inner(t, &image);
            let residual: Vec<C64> = image.iter().zip(t).map(|(a, b)| a - zi * b).collect();
            fixed_point_defect = fixed_point_defect.max(vec_norm(&residual));
            z.push(zi);
        }
        let z_norm_defect = (z.iter().map(|zi| zi.norm_sqr()).sum::<f64>() - 1.0).abs();
        let span_rank = numerical_rank(&self.adjoint_images(target), RANK_TOL);
        let completeness_defect = self.completeness_defect();
        let converging = completeness_defect <= self.tol
            && fixed_point_defect <= self.tol
            && span_rank == self.dim;
        Ok(ChannelReport {
            dim: self.dim,
            tol: self.tol,
            completeness_defect,
            fixed_point_defect,
            eigenvalues_z: z,
            z_norm_defect,
            span_rank,
            gamma: control_strength(self, target)?,
            converging,
        })
    }

    /// The vectors `M_i†|T⟩`.
    pub fn adjoint_images(&self, target: &PureState) -> Vec<Vec<C64>> {
        self.operators
            .iter()
            .map(|m| m.adjoint().mul_vec(target.amplitudes()))
            .collect()
    }

    /// Change of target fidelity after one application, computed two ways:
    /// directly, and as `Σ_i ‖√ρ (I − |T⟩⟨T|) M_i†|T⟩‖²`.
    ///
    /// The second form only equals the first when the fixed-point condition
    /// holds, so a violation is reported as an error.
    pub fn delta_fidelity(&self, rho: &DensityOperator, target: &PureState) -> Result<FidelityIncrement> {
        let report = self.verify(target)?;
        self.check_dim(rho.dim())?;
        if report.fixed_point_defect > self.tol {
            return Err(Error::FixedPointViolated {
                defect: report.fixed_point_defect,
                tol: self.tol,
            });
        }
        let direct = raw_fidelity(&self.apply_matrix(rho.matrix()), target)
            - raw_fidelity(rho.matrix(), target);
        let root = psd_sqrt(rho.matrix())?;
        let t = target.amplitudes();
        let sum_of_norms = self
            .adjoint_images(target)
            .iter()
            .map(|v| {
                let overlap = inner(t, v);
                let off_target: Vec<C64> = v.iter().zip(t).map(|(a, b)| a - overlap * b).collect();
                root.mul_vec(&off_target).iter().map(|z| z.norm_sqr()).sum::<f64>()
            })
            .sum();
        Ok(FidelityIncrement { direct, sum_of_norms })
    }

    /// Applies the channel `steps` times, recording `ρ_0 … ρ_steps`.
    pub fn iterate(
        &self,
        rho0: &DensityOperator,
        target: &PureState,
        steps: usize,
        observables: Observables,
    ) -> Result<Trajectory> {
        self.check_dim(rho0.dim())?;
        self.check_dim(target.dim())?;
        let mut traj = Trajectory::default();
        let mut rho = rho0.clone();
        traj.record(0, &rho, target, observables)?;
        for step in 1..=steps {
            rho = self.apply(&rho)?;
            traj.record(step, &rho, target, observables)?;
        }
        Ok(traj)
    }

    /// Choi matrix `Σ_{jk} |j⟩⟨k| ⊗ $(|j⟩⟨k|)`, input factor first.
    pub fn choi(&self) -> ComplexMatrix {
        let d = self.dim;
        let mut c = ComplexMatrix::zeros(d * d, d * d);
        for m in &self.operators {
            for j in 0..d {
                for a in 0..d {
                    let maj = m.get(a, j);
                    if maj == ZERO {
                        continue;
                    }
                    for k in 0..d {
                        for b in 0..d {
                            let row = j * d + a;
                            let col = k * d + b;
                            c.set(row, col, c.get(row, col) + maj * m.get(b, k).conj());
                        }
                    }
                }
            }
        }
        c
    }

    /// A state orthogonal to every `M_i†|T⟩`, if the span condition fails.
    ///
    /// Such a state is orthogonal to the target and the channel cannot raise
    /// its target fidelity.
    pub fn stalled_state(&self, target: &PureState) -> Option<PureState> {
        orthogonal_complement(&self.adjoint_images(target), RANK_TOL)
            .into_iter()
            .next()
            .and_then(|v| PureState::normalised(v).ok())
    }
}

fn raw_fidelity(m: &ComplexMatrix, target: &PureState) -> f64 {
    m.expectation(target.amplitudes()).re
}

/// Whether two channels have Choi matrices within `tol` in operator norm.
pub fn channels_equal(a: &KrausChannel, b: &KrausChannel, tol: f64) -> bool {
    choi_distance(a, b).is_some_and(|d| d <= tol)
}

/// Operator-norm distance between Choi matrices; `None` for different dimensions.
pub fn choi_distance(a: &KrausChannel, b: &KrausChannel) -> Option<f64> {
    (a.dim == b.dim).then(|| (&a.choi() - &b.choi()).op_norm())
}

/// Kraus operators `M_i = (I ⊗ ⟨i|) U (I ⊗ |ψ₀⟩)` of the reduced dynamics.
///
/// `u` acts on `system ⊗ controller`; the controller dimension is taken from
/// `controller_state` and the system dimension follows.
pub fn kraus_from_unitary(
    u: &ComplexMatrix,
    controller_state: &PureState,
    controller_basis: &[PureState],
) -> Result<KrausChannel> {
    if !u.is_square() {
        return Err(Error::NotSquare {
            rows: u.rows(),
            cols: u.cols(),
        });
    }
    let n = controller_state.dim();
    if u.rows() % n != 0 {
        return Err(Error::Structure(format!(
            "unitary dimension {} is not a multiple of the controller dimension {n}",
            u.rows()
        )));
    }
    let d = u.rows() / n;
    let defect = u.unitarity_defect();
    if defect > UNITARY_TOL {
        return Err(Error::NotUnitary { defect });
    }
    check_orthonormal_basis(controller_basis, n)?;
    let psi0 = controller_state.amplitudes();
    let operators = controller_basis
        .iter()
        .map(|b| {
            let bra = b.amplitudes();
            ComplexMatrix::from_fn(d, d, |s_out, s_in| {
                let mut acc = ZERO;
                for (c_out, bc) in bra.iter().enumerate() {
                    for (c_in, pc) in psi0.iter().enumerate() {
                        acc += bc.conj() * u.get(s_out * n + c_out, s_in * n + c_in) * pc;
                    }
                }
                acc
            })
        })
        .collect();
    KrausChannel::with_default_tol(operators)
}

pub(crate) fn check_orthonormal_basis(basis: &[PureState], dim: usize) -> Result<()> {
    if basis.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: basis.len(),
        });
    }
    let mut defect: f64 = 0.0;
    for (i, a) in basis.iter().enumerate() {
        if a.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: a.dim(),
            });
        }
        for (j, b) in basis.iter().enumerate() {
            let expected = if i == j { 1.0 } else { 0.0 };
            defect = defect.max((a.overlap(b) - expected).norm());
        }
    }
    if defect > UNITARY_TOL {
        return Err(Error::NotOrthonormal { defect });
    }
    Ok(())
}

/// Computational basis as a list of states.
pub fn computational_basis(dim: usize) -> Vec<PureState> {
    (0..dim).map(|k| PureState::basis(dim, k)).collect()
}

/// One interaction step computed on the dilated space: `tr_c[U (ρ ⊗ |ψ₀⟩⟨ψ₀|) U†]`.
pub fn dilated_step(
    u: &ComplexMatrix,
    rho: &DensityOperator,
    controller_state: &PureState,
) -> Result<DensityOperator> {
    let joint = rho.tensor(&controller_state.to_density());
    if joint.dim() != u.rows() {
        return Err(Error::DimensionMismatch {
            expected: u.rows(),
            found: joint.dim(),
        });
    }
    let evolved = &(u * joint.matrix()) * &u.adjoint();
    let structure = TensorStructure::bipartite(rho.dim(), controller_state.dim());
    let reduced = partial_trace(&evolved, &structure, 0)?;
    DensityOperator::new(reduced.hermitian_part())
}

/// Output of [`KrausChannel::verify`].
#[derive(Clone, Debug)]
pub struct ChannelReport {
    pub dim: usize,
    pub tol: f64,
    /// `‖Σ M_i†M_i − I‖`.
    pub completeness_defect: f64,
    /// `max_i ‖M_i|T⟩ − z_i|T⟩‖`.
    pub fixed_point_defect: f64,
    /// `z_i = ⟨T|M_i|T⟩`.
    pub eigenvalues_z: Vec<C64>,
    /// `|Σ|z_i|² − 1|`.
    pub z_norm_defect: f64,
    /// Numerical rank of `{M_i†|T⟩}`.
    pub span_rank: usize,
    /// Bounds on the per-step gain `ΔF / (1 − F)`.
    pub gamma: ControlStrength,
    pub converging: bool,
}

/// Two evaluations of the one-step fidelity gain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FidelityIncrement {
    pub direct: f64,
    pub sum_of_norms: f64,
}

/// Which observables to record along a trajectory.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Observables {
    pub bloch: bool,
    pub concurrence: bool,
    pub states: bool,
}

impl Observables {
    /// Bloch vectors for qubits, concurrence for two-qubit systems, no stored states.
    pub fn for_dim(dim: usize) -> Self {
        Self {
            bloch: dim == 2,
            concurrence: dim == 4,
            states: false,
        }
    }

    pub fn with_states(mut self) -> Self {
        self.states = true;
        self
    }
}

#[derive(Clone, Debug)]
pub struct TrajectoryRecord {
    pub step: usize,
    pub fidelity: f64,
    pub bloch: Option<[f64; 3]>,
    pub concurrence: Option<f64>,
    pub state: Option<DensityOperator>,
}

/// Per-step snapshots with steps strictly increasing from 0.
#[derive(Clone, Debug, Default)]
pub struct Trajectory {
    records: Vec<TrajectoryRecord>,
}

impl Trajectory {
    pub(crate) fn record(
        &mut self,
        step: usize,
        rho: &DensityOperator,
        target: &PureState,
        observables: Observables,
    ) -> Result<()> {
        let expected = self.records.last().map_or(0, |r| r.step + 1);
        assert_eq!(step, expected, "trajectory steps must increase by one from 0");
        self.records.push(TrajectoryRecord {
            step,
            fidelity: target_fidelity(rho, target)?,
            bloch: if observables.bloch && rho.dim() == 2 {
                Some(bloch_vector(rho)?)
            } else {
                None
            },
            concurrence: if observables.concurrence && rho.dim() == 4 {
                Some(concurrence(rho)?)
            } else {
                None
            },
            state: observables.states.then(|| rho.clone()),
        });
        Ok(())
    }

    pub fn records(&self) -> &[TrajectoryRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn fidelities(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.fidelity).collect()
    }

    pub fn last(&self) -> Option<&TrajectoryRecord> {
        self.records.last()
    }
}
