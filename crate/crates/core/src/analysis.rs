//! Closed-form laws for the fidelity under repeated control, and numerical
//! probes that go with them.
//!
//! When the fixed-point condition holds, the one-step gain is
//! `ΔF = tr(ρ G)` with `G = Σ_i v_i v_i†` and `v_i = (I − |T⟩⟨T|) M_i†|T⟩`.
//! `G` is supported on the complement of the target, so
//! `γ_min (1 − F) ≤ ΔF ≤ γ_max (1 − F)` where `γ_min`, `γ_max` are the extreme
//! eigenvalues of `G` there. For qubits, and for the weak swap in any
//! dimension, the two coincide and `F_n = 1 − (1 − F_0)(1 − γ)^n` exactly.

use crate::channels::{choi_distance, KrausChannel};
use crate::constructors::example1_kraus;
use crate::error::{Error, Result};
use crate::linalg::{eigh, inner, orthogonal_complement, ComplexMatrix, C64, RANK_TOL};
use crate::states::{target_fidelity, DensityOperator, PureState};

/// Default stopping threshold on `|F_{n+1} − F_n|` for [`asymptotic_fidelity`].
pub const ASYMPTOTIC_TOL: f64 = 1e-10;
/// Default step cap for [`asymptotic_fidelity`].
pub const ASYMPTOTIC_STEP_CAP: usize = 100_000;

/// Bounds on the per-step fractional gain `ΔF / (1 − F)` over all states.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ControlStrength {
    pub min: f64,
    pub max: f64,
}

impl ControlStrength {
    /// True when every state gains the same fraction, so the fidelity law is a single exponential.
    pub fn is_uniform(&self, tol: f64) -> bool {
        (self.max - self.min).abs() <= tol
    }

    /// Continuum rate of the guaranteed strength `γ_min`.
    pub fn rate(&self) -> f64 {
        continuum_rate(self.min)
    }
}

/// Spectrum of `G` restricted to the complement of `|T⟩`.
pub fn control_strength(channel: &KrausChannel, target: &PureState) -> Result<ControlStrength> {
    if channel.dim() != target.dim() {
        return Err(Error::DimensionMismatch {
            expected: channel.dim(),
            found: target.dim(),
        });
    }
    let t = target.amplitudes();
    let complement = orthogonal_complement(&[t.to_vec()], RANK_TOL);
    if complement.is_empty() {
        return Ok(ControlStrength { min: 0.0, max: 0.0 });
    }
    let off_target: Vec<Vec<C64>> = channel
        .adjoint_images(target)
        .into_iter()
        .map(|v| {
            let overlap = inner(t, &v);
            v.iter().zip(t).map(|(a, b)| a - overlap * b).collect()
        })
        .collect();
    let k = complement.len();
    let g = ComplexMatrix::from_fn(k, k, |a, b| {
        off_target
            .iter()
            .map(|v| inner(&complement[a], v) * inner(v, &complement[b]))
            .sum()
    });
    let values = eigh(&g.hermitian_part())?.values;
    Ok(ControlStrength {
        min: values[0].max(0.0),
        max: values[k - 1].max(0.0),
    })
}

/// `Σ_i ⟨T|M_i M_i†|T⟩ − 1`; equals the control strength for qubit channels obeying the fixed-point condition.
pub fn qubit_gamma(channel: &KrausChannel, target: &PureState) -> f64 {
    channel
        .adjoint_images(target)
        .iter()
        .map(|v| v.iter().map(|z| z.norm_sqr()).sum::<f64>())
        .sum::<f64>()
        - 1.0
}

/// `Γ = −ln(1 − γ)`; infinite for `γ ≥ 1`.
pub fn continuum_rate(gamma: f64) -> f64 {
    if gamma >= 1.0 {
        f64::INFINITY
    } else {
        -(1.0 - gamma).ln()
    }
}

/// `γ = 1 − e^{−Γ}`.
pub fn gamma_from_rate(rate: f64) -> f64 {
    -(-rate).exp_m1()
}

/// `F_n = 1 − (1 − F_0)(1 − γ)^n`.
pub fn fidelity_law(f0: f64, gamma: f64, n: usize) -> f64 {
    1.0 - (1.0 - f0) * (1.0 - gamma).powi(n as i32)
}

/// Smallest `n` with `(1 − F_0)(1 − γ)^n ≤ eps`. `None` when `γ ≤ 0` and the deficit exceeds `eps`.
pub fn predicted_steps(f0: f64, gamma: f64, eps: f64) -> Option<usize> {
    let deficit = 1.0 - f0;
    if deficit <= eps {
        return Some(0);
    }
    if gamma >= 1.0 {
        return Some(1);
    }
    if gamma <= 0.0 {
        return None;
    }
    Some(((eps / deficit).ln() / (1.0 - gamma).ln()).ceil() as usize)
}

/// Fractional gain `(F_1 − F_0) / (1 − F_0)` of the first application.
pub fn first_step_gamma(channel: &KrausChannel, rho0: &DensityOperator, target: &PureState) -> Result<f64> {
    let f0 = target_fidelity(rho0, target)?;
    let f1 = target_fidelity(&channel.apply(rho0)?, target)?;
    Ok((f1 - f0) / (1.0 - f0))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AsymptoticFidelity {
    pub value: f64,
    /// Applications performed before stopping.
    pub steps: usize,
    /// False when the step cap was hit before the change dropped below tolerance.
    pub converged: bool,
}

/// Iterates until `|F_{n+1} − F_n| < tol` or `cap` applications.
pub fn asymptotic_fidelity(
    channel: &KrausChannel,
    rho0: &DensityOperator,
    target: &PureState,
    tol: f64,
    cap: usize,
) -> Result<AsymptoticFidelity> {
    let mut rho = rho0.clone();
    let mut f = target_fidelity(&rho, target)?;
    for step in 1..=cap {
        rho = channel.apply(&rho)?;
        let next = target_fidelity(&rho, target)?;
        let change = (next - f).abs();
        f = next;
        if change < tol {
            return Ok(AsymptoticFidelity {
                value: f,
                steps: step,
                converged: true,
            });
        }
    }
    Ok(AsymptoticFidelity {
        value: f,
        steps: cap,
        converged: false,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BetaMatch {
    pub beta: f64,
    pub distance: f64,
}

/// Finds the parameter of the one-parameter qubit family that best reproduces `channel`.
///
/// The family is π-periodic in β. A coarse grid over one period brackets the
/// minimum of the Choi distance, and golden-section search refines it.
pub fn match_example1_beta(channel: &KrausChannel) -> Result<BetaMatch> {
    if channel.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: channel.dim(),
        });
    }
    let distance = |beta: f64| choi_distance(&example1_kraus(beta), channel).unwrap_or(f64::INFINITY);
    const GRID: usize = 720;
    let step = std::f64::consts::PI / GRID as f64;
    let best = (0..GRID)
        .map(|k| k as f64 * step)
        .map(|b| (b, distance(b)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("nonempty grid");
    let beta = golden_section(&distance, best.0 - step, best.0 + step, 1e-15);
    let refined = distance(beta);
    Ok(if refined <= best.1 {
        BetaMatch { beta, distance: refined }
    } else {
        BetaMatch { beta: best.0, distance: best.1 }
    })
}

fn golden_section(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
        if (b - a) <= f64::EPSILON * a.abs().max(1.0) {
            break;
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructors::{example1_setup, weak_swap_channel};
    use std::f64::consts::PI;

    #[test]
    fn rate_and_gamma_are_inverse() {
        for g in [0.0, 0.1, 0.345, 0.9] {
            assert!((gamma_from_rate(continuum_rate(g)) - g).abs() < 1e-15);
        }
        assert_eq!(continuum_rate(1.0), f64::INFINITY);
    }

    #[test]
    fn predicted_steps_edge_cases() {
        assert_eq!(predicted_steps(1.0, 0.3, 1e-8), Some(0));
        assert_eq!(predicted_steps(0.5, 1.0, 1e-8), Some(1));
        assert_eq!(predicted_steps(0.5, 0.0, 1e-8), None);
        // 0.5 · 0.5^n ≤ 1e-3 first at n = 9.
        assert_eq!(predicted_steps(0.5, 0.5, 1e-3), Some(9));
    }

    #[test]
    fn weak_swap_strength_is_uniform_sin_squared() {
        for d in [2, 3, 5] {
            let lambda = 0.6;
            let s = control_strength(&weak_swap_channel(lambda, d, 0).unwrap(), &PureState::basis(d, 0)).unwrap();
            assert!(s.is_uniform(1e-12));
            assert!((s.min - lambda.sin().powi(2)).abs() < 1e-14);
        }
    }

    #[test]
    fn qubit_formula_matches_spectrum() {
        let lambda = PI / 5.0;
        let ch = example1_setup(lambda).channel().unwrap();
        let t = PureState::plus();
        let s = control_strength(&ch, &t).unwrap();
        assert!((qubit_gamma(&ch, &t) - s.min).abs() < 1e-14);
        assert!((s.min - lambda.sin().powi(2)).abs() < 1e-14);
    }

    #[test]
    fn asymptotic_fidelity_of_identity_is_initial() {
        let t = PureState::basis(2, 0);
        let r = asymptotic_fidelity(
            &KrausChannel::identity(2),
            &DensityOperator::maximally_mixed(2),
            &t,
            ASYMPTOTIC_TOL,
            10,
        )
        .unwrap();
        assert_eq!(r.steps, 1);
        assert!(r.converged);
        assert_eq!(r.value, 0.5);
    }

    #[test]
    fn step_cap_is_reported() {
        let t = PureState::basis(2, 0);
        let ch = weak_swap_channel(0.01, 2, 0).unwrap();
        let r = asymptotic_fidelity(&ch, &PureState::basis(2, 1).to_density(), &t, 1e-14, 5).unwrap();
        assert!(!r.converged);
        assert_eq!(r.steps, 5);
    }

    #[test]
    fn golden_section_finds_kink() {
        let x = golden_section(&|x: f64| (x - 0.3).abs(), 0.0, 1.0, 1e-15);
        assert!((x - 0.3).abs() < 1e-14);
    }
}
