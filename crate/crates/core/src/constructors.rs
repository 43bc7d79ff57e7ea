//! Constructions of converging control channels.
//!
//! Two general recipes start from a POVM `{E_i}` and set `M_i = W_i √E_i`,
//! where the unitary `W_i` rotates `√E_i|T⟩` onto the target:
//!
//! * [`build_method1`] needs `span{E_i|T⟩}` to be the full space.
//! * [`build_method2`] handles commuting POVMs whose effects miss part of the
//!   space on the target. Effects with `E_i|T⟩ = 0` are rotated using an
//!   extended reference state instead.
//!
//! The module also holds the worked examples: the one-parameter qubit family
//! and its two-qubit unitary realisation, the weak swap in any dimension, the
//! Bell-target channel with its Pauli-string Hamiltonian, and the pairwise
//! swap approximation on two qubit pairs.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

use crate::channels::{check_orthonormal_basis, computational_basis, kraus_from_unitary, KrausChannel, UNITARY_TOL};
use crate::error::{Error, Result};
use crate::linalg::{
    eigh, inner, kron, numerical_rank, psd_sqrt, unitary_from_generator, vec_norm, ComplexMatrix, C64, I,
    ONE, RANK_TOL,
};
use crate::pauli::{pauli_string, sigma_x, sigma_y, sigma_z, Axis};
use crate::states::PureState;

/// Tolerance on POVM positivity and completeness.
pub const POVM_TOL: f64 = 1e-10;
/// `‖E_i|T⟩‖` at or below this counts as `E_i|T⟩ = 0`.
pub const ZERO_EFFECT_TOL: f64 = 1e-10;

/// Positive effects summing to the identity.
#[derive(Clone, Debug)]
pub struct Povm {
    effects: Vec<ComplexMatrix>,
}

impl Povm {
    pub fn new(effects: Vec<ComplexMatrix>) -> Result<Self> {
        let first = effects
            .first()
            .ok_or_else(|| Error::Structure("a POVM needs at least one effect".into()))?;
        let dim = first.rows();
        let mut sum = ComplexMatrix::zeros(dim, dim);
        for e in &effects {
            if !e.is_square() || e.rows() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: e.rows().max(e.cols()),
                });
            }
            let defect = e.hermitian_defect();
            if defect > POVM_TOL {
                return Err(Error::NotHermitian { defect });
            }
            let min = eigh(e)?.values[0];
            if min < -POVM_TOL {
                return Err(Error::NotPsd { min_eigenvalue: min });
            }
            sum = &sum + e;
        }
        let defect = sum.max_abs_diff(&ComplexMatrix::identity(dim));
        if defect > POVM_TOL {
            return Err(Error::Precondition(format!("effects sum to the identity only within {defect:e}")));
        }
        Ok(Self { effects })
    }

    /// Commuting POVM `E_i = Σ_k λ_ik |k⟩⟨k|` in the computational basis; `rows[i]` holds `λ_i·`.
    pub fn diagonal(rows: &[&[f64]]) -> Result<Self> {
        Self::new(rows.iter().map(|r| ComplexMatrix::diag_real(r)).collect())
    }

    /// Unsharp σ_z measurement `E_± = (I ± η σ_z)/2`.
    pub fn unsharp_z(eta: f64) -> Result<Self> {
        let id = ComplexMatrix::identity(2);
        let z = sigma_z().scale_real(eta);
        Self::new(vec![(&id + &z).scale_real(0.5), (&id - &z).scale_real(0.5)])
    }

    /// Informationally complete qubit POVM `(I + n_k·σ)/4` with tetrahedral `n_k`.
    pub fn tetrahedral() -> Result<Self> {
        let s = 1.0 / 3f64.sqrt();
        let dirs = [[s, s, s], [s, -s, -s], [-s, s, -s], [-s, -s, s]];
        let id = ComplexMatrix::identity(2);
        Self::new(
            dirs.iter()
                .map(|n| {
                    let bloch = &(&sigma_x().scale_real(n[0]) + &sigma_y().scale_real(n[1])) + &sigma_z().scale_real(n[2]);
                    (&id + &bloch).scale_real(0.25)
                })
                .collect(),
        )
    }

    pub fn effects(&self) -> &[ComplexMatrix] {
        &self.effects
    }

    pub fn dim(&self) -> usize {
        self.effects[0].rows()
    }
}

/// System–controller unitary with controller preparation, Kraus basis and target.
#[derive(Clone, Debug)]
pub struct ControlSetup {
    pub unitary: ComplexMatrix,
    pub controller_state: PureState,
    pub controller_basis: Vec<PureState>,
    pub target: PureState,
}

impl ControlSetup {
    pub fn new(
        unitary: ComplexMatrix,
        controller_state: PureState,
        controller_basis: Vec<PureState>,
        target: PureState,
    ) -> Result<Self> {
        let defect = unitary.unitarity_defect();
        if defect > UNITARY_TOL {
            return Err(Error::NotUnitary { defect });
        }
        check_orthonormal_basis(&controller_basis, controller_state.dim())?;
        if unitary.rows() != target.dim() * controller_state.dim() {
            return Err(Error::DimensionMismatch {
                expected: target.dim() * controller_state.dim(),
                found: unitary.rows(),
            });
        }
        Ok(Self {
            unitary,
            controller_state,
            controller_basis,
            target,
        })
    }

    /// Reduced channel on the system.
    pub fn channel(&self) -> Result<KrausChannel> {
        kraus_from_unitary(&self.unitary, &self.controller_state, &self.controller_basis)
    }
}

/// Unitary `W` with `W|u⟩ = |v⟩`, acting as the identity outside `span{u, v}`.
///
/// On the plane spanned by `u` and `e = (v − ⟨u|v⟩u)/‖·‖` it is the reflection
/// `[[a, b], [b, −a*]]` with `a = ⟨u|v⟩`, `b = ‖v − a u‖`.
pub fn rotation_onto(u: &PureState, v: &PureState) -> ComplexMatrix {
    assert_eq!(u.dim(), v.dim(), "rotation between spaces of different dimension");
    let (uu, vv) = (u.amplitudes(), v.amplitudes());
    let d = u.dim();
    let a = inner(uu, vv);
    let rest: Vec<C64> = vv.iter().zip(uu).map(|(x, y)| x - a * y).collect();
    let b = vec_norm(&rest);
    let id = ComplexMatrix::identity(d);
    if b < 1e-14 {
        // v = a u with |a| = 1.
        return &id + &ComplexMatrix::projector(uu).scale(a - ONE);
    }
    let e: Vec<C64> = rest.iter().map(|z| z / b).collect();
    let bc = C64::new(b, 0.0);
    let plane = &ComplexMatrix::projector(uu) + &ComplexMatrix::projector(&e);
    let reflection = &(&(&ComplexMatrix::outer(uu, uu).scale(a) + &ComplexMatrix::outer(&e, uu).scale(bc))
        + &ComplexMatrix::outer(uu, &e).scale(bc))
        - &ComplexMatrix::outer(&e, &e).scale(a.conj());
    &(&id - &plane) + &reflection
}

/// `M_i = W_i √E_i` with `W_i √E_i|r_i⟩ ∝ |T⟩`, where `r_i` is the target when
/// `E_i|T⟩ ≠ 0` and `reference` otherwise. Without a reference, such effects
/// keep `M_i = √E_i`.
fn rotate_effects(povm: &Povm, target: &PureState, reference: Option<&PureState>) -> Result<KrausChannel> {
    let t = target.amplitudes();
    let mut operators = Vec::with_capacity(povm.effects.len());
    for e in &povm.effects {
        let root = psd_sqrt(e)?;
        let reaches_target = vec_norm(&e.mul_vec(t)) > ZERO_EFFECT_TOL;
        let source = match (reaches_target, reference) {
            (true, _) => Some(target),
            (false, Some(r)) => Some(r),
            (false, None) => None,
        };
        let op = match source {
            Some(s) => {
                let image = root.mul_vec(s.amplitudes());
                let u = PureState::normalised(image).map_err(|_| {
                    Error::Precondition("an effect annihilates the extended reference state".into())
                })?;
                &rotation_onto(&u, target) * &root
            }
            None => root,
        };
        operators.push(op);
    }
    KrausChannel::with_default_tol(operators)
}

fn check_povm_dim(povm: &Povm, target: &PureState) -> Result<()> {
    if povm.dim() != target.dim() {
        return Err(Error::DimensionMismatch {
            expected: povm.dim(),
            found: target.dim(),
        });
    }
    Ok(())
}

/// Converging channel from a POVM with `span{E_i|T⟩}` equal to the full space.
pub fn build_method1(povm: &Povm, target: &PureState) -> Result<KrausChannel> {
    check_povm_dim(povm, target)?;
    let images: Vec<Vec<C64>> = povm.effects.iter().map(|e| e.mul_vec(target.amplitudes())).collect();
    let rank = numerical_rank(&images, RANK_TOL);
    if rank < povm.dim() {
        return Err(Error::SpanCondition { rank, dim: povm.dim() });
    }
    rotate_effects(povm, target, None)
}

/// The method-1 recipe applied without checking the span condition.
///
/// For a POVM that fails the condition the result keeps the target fixed but
/// leaves some orthogonal state untouched; see [`KrausChannel::stalled_state`].
pub fn build_unextended(povm: &Povm, target: &PureState) -> Result<KrausChannel> {
    check_povm_dim(povm, target)?;
    rotate_effects(povm, target, None)
}

/// Joint eigenbasis of a commuting POVM.
///
/// Eigenvectors are ordered by the index of their largest component and
/// phased so that component is real and positive; for diagonal POVMs this
/// returns the computational basis.
pub fn simultaneous_eigenbasis(povm: &Povm) -> Result<Vec<PureState>> {
    let effects = &povm.effects;
    for (i, a) in effects.iter().enumerate() {
        for b in &effects[i + 1..] {
            let comm = (&(a * b) - &(b * a)).max_abs();
            if comm > POVM_TOL {
                return Err(Error::Precondition(format!("effects do not commute (‖[E_i, E_j]‖ = {comm:e})")));
            }
        }
    }
    // Irrational weights separate the joint eigenspaces of a generic commuting family.
    const PRIMES: [f64; 16] = [2., 3., 5., 7., 11., 13., 17., 19., 23., 29., 31., 37., 41., 43., 47., 53.];
    let d = povm.dim();
    let combo = effects.iter().enumerate().fold(ComplexMatrix::zeros(d, d), |acc, (i, e)| {
        let w = PRIMES[i % PRIMES.len()].sqrt() * (1.0 + (i / PRIMES.len()) as f64);
        &acc + &e.scale_real(w)
    });
    let eig = eigh(&combo)?;
    let gap = eig.values.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    if gap < 1e-8 {
        return Err(Error::Precondition("effects do not resolve a nondegenerate joint eigenbasis".into()));
    }
    let mut vectors: Vec<(usize, Vec<C64>)> = (0..d)
        .map(|k| {
            let v = eig.eigenvector(k);
            let (peak, _) = v
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
                .expect("nonempty eigenvector");
            let phase = v[peak].conj() / v[peak].norm();
            (peak, v.iter().map(|z| z * phase).collect())
        })
        .collect();
    vectors.sort_by_key(|(peak, _)| *peak);
    vectors.into_iter().map(|(_, v)| PureState::normalised(v)).collect()
}

/// Converging channel for a target supported on `m < d` joint eigenvectors of a
/// commuting POVM, using the extension coefficients on the remaining `d − m`
/// eigenvectors (in eigenbasis order).
///
/// With `m = d` and no coefficients this coincides with [`build_method1`].
pub fn build_method2(povm: &Povm, target: &PureState, extension_coeffs: &[C64]) -> Result<KrausChannel> {
    check_povm_dim(povm, target)?;
    let d = povm.dim();
    let basis = simultaneous_eigenbasis(povm)?;
    let lambda: Vec<Vec<C64>> = povm
        .effects
        .iter()
        .map(|e| basis.iter().map(|k| e.expectation(k.amplitudes())).collect())
        .collect();
    let rank = numerical_rank(&lambda, RANK_TOL);
    if rank < d {
        return Err(Error::Precondition(format!(
            "eigenvalue matrix λ_ik is singular (rank {rank} < {d}); the POVM is not an unsharp nondegenerate measurement"
        )));
    }
    let coeffs: Vec<C64> = basis.iter().map(|k| k.overlap(target)).collect();
    let missing: Vec<usize> = (0..d).filter(|&k| coeffs[k].norm() <= ZERO_EFFECT_TOL).collect();
    let m = d - missing.len();
    let t = target.amplitudes();
    let reaching = povm
        .effects
        .iter()
        .filter(|e| vec_norm(&e.mul_vec(t)) > ZERO_EFFECT_TOL)
        .count();
    if reaching != m {
        return Err(Error::Precondition(format!(
            "{reaching} effects act nontrivially on the target, expected exactly {m}"
        )));
    }
    if extension_coeffs.len() != missing.len() {
        return Err(Error::InvalidParameter(format!(
            "expected {} extension coefficients, got {}",
            missing.len(),
            extension_coeffs.len()
        )));
    }
    if let Some(pos) = extension_coeffs.iter().position(|c| c.norm() <= ZERO_EFFECT_TOL) {
        return Err(Error::InvalidParameter(format!("extension coefficient {pos} is zero")));
    }
    let mut extended = t.to_vec();
    for (&k, &c) in missing.iter().zip(extension_coeffs) {
        for (slot, b) in extended.iter_mut().zip(basis[k].amplitudes()) {
            *slot += c * b;
        }
    }
    let reference = PureState::normalised(extended)?;
    rotate_effects(povm, target, Some(&reference))
}

/// `exp(−iθσ_y)`.
fn y_rotation(theta: f64) -> ComplexMatrix {
    unitary_from_generator(&sigma_y(), theta).expect("σ_y is Hermitian")
}

/// One-parameter qubit family steering towards `(|0⟩ + |1⟩)/√2`:
/// `M_0 = e^{−iσ_y(β−π/4)} diag(sin β, cos β)`, `M_1 = e^{+iσ_y(β−π/4)} diag(cos β, sin β)`.
pub fn example1_kraus(beta: f64) -> KrausChannel {
    let (s, c) = beta.sin_cos();
    let m0 = &y_rotation(beta - FRAC_PI_4) * &ComplexMatrix::diag_real(&[s, c]);
    let m1 = &y_rotation(FRAC_PI_4 - beta) * &ComplexMatrix::diag_real(&[c, s]);
    KrausChannel::with_default_tol(vec![m0, m1]).expect("complete for every β")
}

/// Eigenbasis of σ_y, `(|0⟩ ± i|1⟩)/√2`.
pub fn sigma_y_eigenbasis() -> Vec<PureState> {
    let h = FRAC_1_SQRT_2;
    vec![
        PureState::new(vec![C64::new(h, 0.0), C64::new(0.0, h)]).expect("normalised"),
        PureState::new(vec![C64::new(h, 0.0), C64::new(0.0, -h)]).expect("normalised"),
    ]
}

/// `exp(−i(λ/2)(σ_y⊗σ_y + σ_z⊗σ_z))` with the controller in `(|0⟩ + |1⟩)/√2`,
/// Kraus operators taken in the σ_y eigenbasis, target `(|0⟩ + |1⟩)/√2`.
///
/// Written in the σ_y eigenbasis `{|0⟩_c, |1⟩_c}` the controller state reads
/// `(|0⟩_c + i|1⟩_c)/√2` up to a global phase.
pub fn example1_setup(lambda: f64) -> ControlSetup {
    let generator = &kron(&sigma_y(), &sigma_y()) + &kron(&sigma_z(), &sigma_z());
    let unitary = unitary_from_generator(&generator, lambda / 2.0).expect("Hermitian generator");
    ControlSetup::new(unitary, PureState::plus(), sigma_y_eigenbasis(), PureState::plus())
        .expect("valid by construction")
}

/// Conditional rotations `(U_1, U_2) = (exp(−iπ/4 σ_z⊗σ_z), exp(−iπ/4 σ_y⊗σ_y))` whose product `U_2 U_1`
/// is the λ = π/2 interaction of [`example1_setup`].
pub fn example1_decomposition() -> (ComplexMatrix, ComplexMatrix) {
    let zz = kron(&sigma_z(), &sigma_z());
    let yy = kron(&sigma_y(), &sigma_y());
    (
        unitary_from_generator(&zz, FRAC_PI_4).expect("Hermitian"),
        unitary_from_generator(&yy, FRAC_PI_4).expect("Hermitian"),
    )
}

/// Swap `S = Σ_{k,l} |k⟩⟨l| ⊗ |l⟩⟨k|` on `ℂ^d ⊗ ℂ^d`.
pub fn swap_operator(d: usize) -> ComplexMatrix {
    assert!(d >= 2, "swap needs d ≥ 2");
    let mut s = ComplexMatrix::zeros(d * d, d * d);
    for k in 0..d {
        for l in 0..d {
            s.set(k * d + l, l * d + k, ONE);
        }
    }
    s
}

/// `exp(−iλS) = cos λ I − i sin λ S`.
pub fn weak_swap_unitary(lambda: f64, d: usize) -> ComplexMatrix {
    let (s, c) = lambda.sin_cos();
    &ComplexMatrix::identity(d * d).scale_real(c) + &swap_operator(d).scale(C64::new(0.0, -s))
}

/// Weak-swap Kraus operators for the target `|t⟩` of the computational basis:
///
/// ```text
/// M_0 = e^{−iλ|T⟩⟨T|} [cos λ I + (1 − cos λ)|T⟩⟨T|]
/// M_i = e^{−iπ(|T⟩⟨i| + |i⟩⟨T|)/2} sin λ |i⟩⟨i|,   i ≠ t
/// ```
///
/// At `λ ≡ 0 (mod π)` this is the identity channel, which verifies as non-converging.
pub fn weak_swap_channel(lambda: f64, d: usize, target_index: usize) -> Result<KrausChannel> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("weak swap needs d ≥ 2, got {d}")));
    }
    if target_index >= d {
        return Err(Error::InvalidParameter(format!("target index {target_index} out of range for d = {d}")));
    }
    let target = PureState::basis(d, target_index);
    let p = target.projector();
    let id = ComplexMatrix::identity(d);
    let phase = unitary_from_generator(&p, lambda)?;
    let m0 = &phase * &(&id.scale_real(lambda.cos()) + &p.scale_real(1.0 - lambda.cos()));
    let mut ops = vec![m0];
    for i in (0..d).filter(|&i| i != target_index) {
        let ket_i = PureState::basis(d, i);
        let flip = &ComplexMatrix::outer(target.amplitudes(), ket_i.amplitudes())
            + &ComplexMatrix::outer(ket_i.amplitudes(), target.amplitudes());
        let rotation = unitary_from_generator(&flip, FRAC_PI_2)?;
        ops.push(&rotation * &ket_i.projector().scale_real(lambda.sin()));
    }
    KrausChannel::with_default_tol(ops)
}

/// Weak swap with the controller prepared in an arbitrary target state.
pub fn weak_swap_setup(target: &PureState, lambda: f64) -> ControlSetup {
    let d = target.dim();
    ControlSetup::new(weak_swap_unitary(lambda, d), target.clone(), computational_basis(d), target.clone())
        .expect("valid by construction")
}

/// Weak-swap channel towards an arbitrary pure target.
pub fn weak_swap_toward(target: &PureState, lambda: f64) -> Result<KrausChannel> {
    weak_swap_setup(target, lambda).channel()
}

/// Heisenberg coupling `exp(−i(λ/2) Σ_a σ_a⊗σ_a)` of one system and one controller qubit.
///
/// Since `Σ_a σ_a⊗σ_a = 2S − I`, this is `e^{iλ/2}` times the weak swap.
pub fn heisenberg_unitary(lambda: f64) -> ComplexMatrix {
    let generator = Axis::ALL
        .iter()
        .fold(ComplexMatrix::zeros(4, 4), |acc, a| &acc + &kron(&a.matrix(), &a.matrix()));
    unitary_from_generator(&generator, lambda / 2.0).expect("Hermitian generator")
}

/// Qubit-pair swaps `(S_1, S_2)` on two system and two controller qubits.
///
/// Tensor slots are `(s_1, s_2, c_1, c_2)`; `S_1` exchanges `s_1 ↔ c_1` and `S_2` exchanges `s_2 ↔ c_2`.
pub fn qubit_pair_swaps() -> (ComplexMatrix, ComplexMatrix) {
    let permute = |f: fn([usize; 4]) -> [usize; 4]| {
        let mut m = ComplexMatrix::zeros(16, 16);
        for idx in 0..16 {
            let bits = [(idx >> 3) & 1, (idx >> 2) & 1, (idx >> 1) & 1, idx & 1];
            let b = f(bits);
            m.set((b[0] << 3) | (b[1] << 2) | (b[2] << 1) | b[3], idx, ONE);
        }
        m
    };
    (
        permute(|[s1, s2, c1, c2]| [c1, s2, s1, c2]),
        permute(|[s1, s2, c1, c2]| [s1, c2, c1, s2]),
    )
}

/// Permutation taking qubit order `(s_1, c_1, s_2, c_2)` to `(s_1, s_2, c_1, c_2)`.
pub fn interleave_permutation() -> ComplexMatrix {
    let mut p = ComplexMatrix::zeros(16, 16);
    for idx in 0..16 {
        let (s1, c1, s2, c2) = ((idx >> 3) & 1, (idx >> 2) & 1, (idx >> 1) & 1, idx & 1);
        p.set((s1 << 3) | (s2 << 2) | (c1 << 1) | c2, idx, ONE);
    }
    p
}

/// `exp(−iλ(S_1 + S_2)) = cos²λ I − sin²λ S_1S_2 − (i/2) sin 2λ (S_1 + S_2)`.
pub fn pairwise_swap_unitary(lambda: f64) -> ComplexMatrix {
    let (s1, s2) = qubit_pair_swaps();
    let (s, c) = lambda.sin_cos();
    let id = ComplexMatrix::identity(16);
    &(&id.scale_real(c * c) - &(&s1 * &s2).scale_real(s * s)) + &(&s1 + &s2).scale(C64::new(0.0, -0.5 * (2.0 * lambda).sin()))
}

/// Pairwise swaps with controllers in `(|00⟩ + |11⟩)/√2` and the same Bell target.
pub fn pairwise_setup(lambda: f64) -> ControlSetup {
    ControlSetup::new(
        pairwise_swap_unitary(lambda),
        PureState::phi_plus(),
        computational_basis(4),
        PureState::phi_plus(),
    )
    .expect("valid by construction")
}

/// Bell states `[Φ⁺, Φ⁻, Ψ⁺, Ψ⁻]` with `|↑⟩ = |0⟩`.
pub fn bell_basis() -> Vec<PureState> {
    let h = FRAC_1_SQRT_2;
    [[h, 0., 0., h], [h, 0., 0., -h], [0., h, h, 0.], [0., h, -h, 0.]]
        .iter()
        .map(|a| PureState::from_real(a).expect("normalised"))
        .collect()
}

/// Unitary whose columns are the Bell states, mapping `|k⟩` to the `k`-th Bell state.
pub fn bell_transform() -> ComplexMatrix {
    let basis = bell_basis();
    ComplexMatrix::from_fn(4, 4, |i, k| basis[k].amplitudes()[i])
}

/// Weak-swap channel for target index 0 conjugated into the Bell basis.
pub fn bell_conjugated_weak_swap(lambda: f64) -> Result<KrausChannel> {
    weak_swap_channel(lambda, 4, 0)?.conjugated(&bell_transform())
}

/// Explicit Pauli form of the four Bell-target Kraus operators.
pub fn bell_kraus(lambda: f64) -> KrausChannel {
    let p = |ops: &[(usize, Axis)]| pauli_string(2, ops);
    let (x1, y1, z1) = (p(&[(0, Axis::X)]), p(&[(0, Axis::Y)]), p(&[(0, Axis::Z)]));
    let (x2, y2, z2) = (p(&[(1, Axis::X)]), p(&[(1, Axis::Y)]), p(&[(1, Axis::Z)]));
    let id = ComplexMatrix::identity(4);
    let (s, c) = lambda.sin_cos();
    let m1 = &id.scale_real(c) + &(&(&(&(&x1 * &x2) - &(&y1 * &y2)) + &(&z1 * &z2)) + &id).scale(C64::new(0.0, -s / 4.0));
    let m2 = (&(&(&x1 * &y2) + &(&y1 * &x2)) + &(&z1 + &z2).scale(I)).scale_real(-s / 4.0);
    let m3 = (&(&(&y1 * &z2) + &(&z1 * &y2)) - &(&x1 + &x2).scale(I)).scale_real(s / 4.0);
    let m4 = (&(&(&z1 * &x2) - &(&x1 * &z2)) + &(&y2 - &y1).scale(I)).scale(C64::new(0.0, s / 4.0));
    KrausChannel::with_default_tol(vec![m1, m2, m3, m4]).expect("complete for every λ")
}

/// Pauli-string Hamiltonian on `(s_1, s_2, c_1, c_2)` equal to the swap written
/// in the Bell system basis and the product controller basis `|↑↑⟩, |↑↓⟩, |↓↑⟩, |↓↓⟩`.
pub fn bell_hamiltonian() -> ComplexMatrix {
    use Axis::{X, Y, Z};
    let terms: [(f64, &[(usize, Axis)]); 15] = [
        (1.0, &[(1, X), (2, X)]),
        (1.0, &[(1, Y), (2, Y), (3, X)]),
        (1.0, &[(1, Z), (2, Z), (3, X)]),
        (1.0, &[(0, X), (2, X), (3, Z)]),
        (1.0, &[(0, X), (1, X), (3, Z)]),
        (-1.0, &[(0, X), (1, Y), (2, Z), (3, Y)]),
        (1.0, &[(0, X), (1, Z), (2, Y), (3, Y)]),
        (-1.0, &[(0, Y), (2, X), (3, Y)]),
        (-1.0, &[(0, Y), (1, X), (3, Y)]),
        (-1.0, &[(0, Y), (1, Y), (2, Z), (3, Z)]),
        (1.0, &[(0, Y), (1, Z), (2, Y), (3, Z)]),
        (1.0, &[(0, Z), (3, X)]),
        (1.0, &[(0, Z), (1, X), (2, X), (3, X)]),
        (1.0, &[(0, Z), (1, Y), (2, Y)]),
        (1.0, &[(0, Z), (1, Z), (2, Z)]),
    ];
    let sum = terms.iter().fold(ComplexMatrix::identity(16), |acc, (sign, ops)| {
        &acc + &pauli_string(4, ops).scale_real(*sign)
    });
    sum.scale_real(0.25)
}

/// The swap `Σ_{k,l} |B_k⟩⟨B_l| ⊗ |c_l⟩⟨c_k|` with Bell states `B_k` and product states `c_k`.
pub fn bell_product_swap() -> ComplexMatrix {
    let bell = bell_basis();
    let ctrl = computational_basis(4);
    let mut s = ComplexMatrix::zeros(16, 16);
    for k in 0..4 {
        for l in 0..4 {
            let sys = ComplexMatrix::outer(bell[k].amplitudes(), bell[l].amplitudes());
            let c = ComplexMatrix::outer(ctrl[l].amplitudes(), ctrl[k].amplitudes());
            s = &s + &kron(&sys, &c);
        }
    }
    s
}

/// Kraus set and realising Hamiltonian for the Bell target `(|↑↑⟩ + |↓↓⟩)/√2`.
pub fn bell_channel(lambda: f64) -> (KrausChannel, ComplexMatrix) {
    (bell_kraus(lambda), bell_hamiltonian())
}

/// `exp(−iλH)` with the Bell-target Hamiltonian and controllers in `|↑↑⟩`.
pub fn bell_setup(lambda: f64) -> ControlSetup {
    let unitary = unitary_from_generator(&bell_hamiltonian(), lambda).expect("Hermitian");
    ControlSetup::new(unitary, PureState::basis(4, 0), computational_basis(4), PureState::phi_plus())
        .expect("valid by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::channels_equal;
    use crate::linalg::ZERO;
    use crate::linalg::{kron_vec, partial_trace, TensorStructure};
    use crate::sampling::random_pure_state;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn method2_povm() -> Povm {
        Povm::diagonal(&[&[0.5, 0.25, 0.0], &[0.5, 0.75, 0.0], &[0.0, 0.0, 1.0]]).unwrap()
    }

    fn cat01() -> PureState {
        PureState::from_real(&[1.0, 1.0, 0.0]).unwrap()
    }

    #[test]
    fn povm_validation() {
        assert!(Povm::diagonal(&[&[0.5, 0.5], &[0.4, 0.5]]).is_err());
        assert!(Povm::diagonal(&[&[1.2, 0.5], &[-0.2, 0.5]]).is_err());
        assert!(Povm::tetrahedral().is_ok());
    }

    #[test]
    fn rotation_examples() {
        let zero = PureState::basis(2, 0);
        let one = PureState::basis(2, 1);
        assert!(rotation_onto(&zero, &zero).max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
        let w = rotation_onto(&zero, &one);
        assert!(w.max_abs_diff(&crate::pauli::sigma_x()) < 1e-15);
        // Embedded in a larger space the complement is untouched.
        let w = rotation_onto(&PureState::basis(3, 0), &PureState::basis(3, 1));
        assert_eq!(w.get(2, 2), ONE);
    }

    #[test]
    fn rotation_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for d in [2, 3, 6] {
            for _ in 0..20 {
                let u = random_pure_state(d, &mut rng);
                let v = random_pure_state(d, &mut rng);
                let w = rotation_onto(&u, &v);
                let image = w.mul_vec(u.amplitudes());
                let err: f64 = image.iter().zip(v.amplitudes()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
                assert!(err <= 1e-12);
                assert!(w.unitarity_defect() <= 1e-12);
            }
        }
    }

    #[test]
    fn method1_qubit_unsharp() {
        let povm = Povm::unsharp_z(0.5).unwrap();
        let ch = build_method1(&povm, &PureState::plus()).unwrap();
        let r = ch.verify(&PureState::plus()).unwrap();
        assert!(r.converging);
        for (m, e) in ch.operators().iter().zip(povm.effects()) {
            assert!((&m.adjoint() * m).max_abs_diff(e) < 1e-10);
        }
        // Proportionality constants are real and positive.
        assert!(r.eigenvalues_z.iter().all(|z| z.re > 0.0 && z.im.abs() < 1e-14));
    }

    #[test]
    fn method1_rejects_commuting_povm_with_missing_component() {
        let povm = Povm::unsharp_z(0.5).unwrap();
        let err = build_method1(&povm, &PureState::basis(2, 0)).unwrap_err();
        assert_eq!(err, Error::SpanCondition { rank: 1, dim: 2 });
        assert!(err.to_string().contains("method 2"));
    }

    #[test]
    fn method1_tetrahedral_any_target() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let povm = Povm::tetrahedral().unwrap();
        for _ in 0..10 {
            let t = random_pure_state(2, &mut rng);
            assert!(build_method1(&povm, &t).unwrap().verify(&t).unwrap().converging);
        }
    }

    #[test]
    fn method2_three_level_example() {
        let povm = method2_povm();
        let t = cat01();
        let ch = build_method2(&povm, &t, &[C64::new(0.3, 0.0)]).unwrap();
        assert!(ch.verify(&t).unwrap().converging);
        for (m, e) in ch.operators().iter().zip(povm.effects()) {
            assert!((&m.adjoint() * m).max_abs_diff(e) < 1e-10);
        }
        assert!(matches!(build_method1(&povm, &t), Err(Error::SpanCondition { rank: 2, dim: 3 })));
    }

    #[test]
    fn method2_argument_errors() {
        let povm = method2_povm();
        let t = cat01();
        assert!(matches!(build_method2(&povm, &t, &[ZERO]), Err(Error::InvalidParameter(_))));
        assert!(matches!(build_method2(&povm, &t, &[]), Err(Error::InvalidParameter(_))));
        let singular = Povm::diagonal(&[&[0.5, 0.5, 0.0], &[0.5, 0.5, 0.0], &[0.0, 0.0, 1.0]]).unwrap();
        assert!(matches!(build_method2(&singular, &t, &[ONE]), Err(Error::Precondition(_))));
        let noncommuting = Povm::tetrahedral().unwrap();
        assert!(matches!(
            build_method2(&noncommuting, &PureState::plus(), &[]),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn method2_without_missing_components_matches_method1() {
        let povm = method2_povm();
        let t = PureState::from_real(&[1.0, 2.0, -0.5]).unwrap();
        let a = build_method2(&povm, &t, &[]).unwrap();
        let b = build_method1(&povm, &t).unwrap();
        assert!(channels_equal(&a, &b, 1e-12));
    }

    #[test]
    fn example1_completeness_and_projector_case() {
        for beta in [-1.0, 0.0, 0.4, 2.9] {
            assert!(example1_kraus(beta).completeness_defect() <= 1e-12);
        }
        // β = π/4 makes both operators I/√2, so nothing steers.
        let idle = example1_kraus(FRAC_PI_4);
        assert!(channels_equal(&idle, &KrausChannel::identity(2), 1e-14));
        assert_eq!(idle.verify(&PureState::plus()).unwrap().span_rank, 1);
        // β = 0 gives rank-one operators and a one-step reset.
        let reset = example1_kraus(0.0);
        let r = reset.verify(&PureState::plus()).unwrap();
        assert_eq!(r.span_rank, 2);
        assert!((r.gamma.min - 1.0).abs() < 1e-14);
    }

    #[test]
    fn example1_full_strength_is_two_conditional_rotations() {
        let (u1, u2) = example1_decomposition();
        let setup = example1_setup(FRAC_PI_2);
        assert!((&u2 * &u1).max_abs_diff(&setup.unitary) < 1e-14);
        // After U1 the controller holds the σ_y eigenstate matching the system's basis state.
        let yb = sigma_y_eigenbasis();
        for (k, y) in yb.iter().enumerate() {
            let after = u1.mul_vec(&kron_vec(PureState::basis(2, k).amplitudes(), PureState::plus().amplitudes()));
            let expected = kron_vec(PureState::basis(2, k).amplitudes(), y.amplitudes());
            assert!((inner(&expected, &after).norm() - 1.0).abs() < 1e-14);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let ch = setup.channel().unwrap();
        for _ in 0..5 {
            let psi = random_pure_state(2, &mut rng).to_density();
            let out = ch.apply(&psi).unwrap();
            assert!(out.matrix().max_abs_diff(&PureState::plus().projector()) < 1e-14);
        }
    }

    #[test]
    fn example1_at_zero_is_identity() {
        let ch = example1_setup(0.0).channel().unwrap();
        assert!(channels_equal(&ch, &KrausChannel::identity(2), 1e-14));
        assert!(!ch.verify(&PureState::plus()).unwrap().converging);
    }

    #[test]
    fn swap_exchanges_factors() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for d in [2, 3, 4] {
            let s = swap_operator(d);
            let psi = random_pure_state(d, &mut rng);
            let phi = random_pure_state(d, &mut rng);
            let out = s.mul_vec(&kron_vec(psi.amplitudes(), phi.amplitudes()));
            let expected = kron_vec(phi.amplitudes(), psi.amplitudes());
            let err: f64 = out.iter().zip(&expected).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            assert!(err < 1e-15);
            assert!((&s * &s).max_abs_diff(&ComplexMatrix::identity(d * d)) < 1e-14);
            assert_eq!(s.hermitian_defect(), 0.0);
        }
    }

    #[test]
    fn weak_swap_matches_unitary_reduction() {
        for d in [2, 3, 4] {
            for lambda in [0.2, 1.0, 2.5] {
                let explicit = weak_swap_channel(lambda, d, 0).unwrap();
                let reduced = weak_swap_toward(&PureState::basis(d, 0), lambda).unwrap();
                for (a, b) in explicit.operators().iter().zip(reduced.operators()) {
                    assert!(a.max_abs_diff(b) < 1e-10);
                }
                let exp = unitary_from_generator(&swap_operator(d), lambda).unwrap();
                assert!(exp.max_abs_diff(&weak_swap_unitary(lambda, d)) < 1e-12);
            }
        }
    }

    #[test]
    fn weak_swap_at_multiples_of_pi_does_nothing() {
        for lambda in [0.0, PI] {
            let ch = weak_swap_channel(lambda, 3, 1).unwrap();
            assert!(channels_equal(&ch, &KrausChannel::identity(3), 1e-12));
            assert!(!ch.verify(&PureState::basis(3, 1)).unwrap().converging);
        }
    }

    #[test]
    fn weak_swap_kraus_act_on_target() {
        let lambda = 0.9;
        let d = 4;
        let t = PureState::basis(d, 2);
        let ch = weak_swap_channel(lambda, d, 2).unwrap();
        let images: Vec<Vec<C64>> = ch.operators().iter().map(|m| m.mul_vec(t.amplitudes())).collect();
        let phase = C64::from_polar(1.0, -lambda);
        assert!(images[0].iter().zip(t.amplitudes()).all(|(a, b)| (a - phase * b).norm() < 1e-14));
        assert!(images[1..].iter().all(|v| vec_norm(v) < 1e-15));
    }

    #[test]
    fn dilation_matches_kraus_form() {
        let lambda = 0.77;
        let t = PureState::from_real(&[1.0, -2.0, 0.5]).unwrap();
        let setup = weak_swap_setup(&t, lambda);
        let ch = setup.channel().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let rho = crate::sampling::random_density(3, &mut rng);
        let via_kraus = ch.apply(&rho).unwrap();
        let joint = rho.tensor(&t.to_density());
        let evolved = &(&setup.unitary * joint.matrix()) * &setup.unitary.adjoint();
        let reduced = partial_trace(&evolved, &TensorStructure::bipartite(3, 3), 0).unwrap();
        assert!(via_kraus.matrix().max_abs_diff(&reduced) < 1e-14);
    }

    #[test]
    fn pairwise_closed_form_limits() {
        assert!(pairwise_swap_unitary(0.0).max_abs_diff(&ComplexMatrix::identity(16)) < 1e-15);
        let (s1, s2) = qubit_pair_swaps();
        assert!(pairwise_swap_unitary(FRAC_PI_2).max_abs_diff(&(-(&s1 * &s2))) < 1e-15);
    }

    #[test]
    fn full_swap_factorises_into_qubit_swaps() {
        let (s1, s2) = qubit_pair_swaps();
        assert!((&s1 * &s2).max_abs_diff(&swap_operator(4)) < 1e-15);
        let p = interleave_permutation();
        let pair = swap_operator(2);
        let interleaved = &(&p * &kron(&pair, &pair)) * &p.adjoint();
        assert!(interleaved.max_abs_diff(&swap_operator(4)) < 1e-15);
    }

    #[test]
    fn heisenberg_is_weak_swap_up_to_phase() {
        let lambda = 0.63;
        let phase = C64::from_polar(1.0, lambda / 2.0);
        assert!(heisenberg_unitary(lambda).max_abs_diff(&weak_swap_unitary(lambda, 2).scale(phase)) < 1e-13);
    }

    #[test]
    fn bell_transform_maps_target() {
        let u = bell_transform();
        assert!(u.unitarity_defect() < 1e-15);
        assert_eq!(u.mul_vec(PureState::basis(4, 0).amplitudes()), PureState::phi_plus().amplitudes());
    }

    #[test]
    fn bell_first_operator_is_projector_form() {
        let lambda: f64 = 0.4;
        let p = PureState::phi_plus().projector();
        let id = ComplexMatrix::identity(4);
        let expected = &(&id - &p).scale_real(lambda.cos()) + &p.scale(C64::from_polar(1.0, -lambda));
        assert!(bell_kraus(lambda).operators()[0].max_abs_diff(&expected) < 1e-14);
    }

    #[test]
    fn bell_setup_reproduces_kraus_set() {
        let lambda = 0.55;
        let from_h = bell_setup(lambda).channel().unwrap();
        assert!(channels_equal(&from_h, &bell_kraus(lambda), 1e-10));
    }
}
