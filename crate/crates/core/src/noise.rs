//! Random single-qubit rotations interleaved with control steps.
//!
//! Each step applies the control channel and then conjugates by
//! `R = exp(−iθσ_a)`, with `θ ~ Normal(0, σ²)`. Dephasing fixes `a = z`;
//! depolarising draws `a` uniformly from `{x, y, z}`.
//!
//! Every trajectory owns a [`SeededStream`]: a ChaCha8 generator seeded from a
//! master seed and positioned on its own stream, so trajectories can run in any
//! order or in parallel and still reproduce the same samples.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::channels::{KrausChannel, Observables, Trajectory};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};
use crate::pauli::Axis;
use crate::states::{DensityOperator, PureState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NoiseKind {
    Dephasing,
    Depolarising,
}

impl NoiseKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NoiseKind::Dephasing => "dephasing",
            NoiseKind::Depolarising => "depolarising",
        }
    }
}

impl fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NoiseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dephasing" => Ok(NoiseKind::Dephasing),
            "depolarising" | "depolarizing" => Ok(NoiseKind::Depolarising),
            other => Err(Error::InvalidParameter(format!(
                "unknown noise kind '{other}' (expected dephasing or depolarising)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseModel {
    kind: NoiseKind,
    sigma: f64,
}

impl NoiseModel {
    pub fn new(kind: NoiseKind, sigma: f64) -> Result<Self> {
        if !sigma.is_finite() || sigma < 0.0 {
            return Err(Error::InvalidParameter(format!("noise sigma must be finite and ≥ 0, got {sigma}")));
        }
        Ok(Self { kind, sigma })
    }

    pub fn kind(&self) -> NoiseKind {
        self.kind
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Draws the axis (depolarising only) and then the angle.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> NoiseSample {
        let axis = match self.kind {
            NoiseKind::Dephasing => Axis::Z,
            NoiseKind::Depolarising => Axis::ALL[rng.random_range(0..3)],
        };
        let angle = if self.sigma == 0.0 {
            0.0
        } else {
            Normal::new(0.0, self.sigma).expect("validated sigma").sample(rng)
        };
        NoiseSample { axis, angle }
    }
}

/// One rotation `exp(−i·angle·σ_axis)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseSample {
    pub axis: Axis,
    pub angle: f64,
}

impl NoiseSample {
    /// `cos θ I − i sin θ σ_a`.
    pub fn unitary(&self) -> ComplexMatrix {
        let (s, c) = self.angle.sin_cos();
        &ComplexMatrix::identity(2).scale_real(c) + &self.axis.matrix().scale(C64::new(0.0, -s))
    }
}

/// Identifies one reproducible random sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SeededStream {
    pub master_seed: u64,
    pub stream_index: u64,
}

impl SeededStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        Self {
            master_seed,
            stream_index,
        }
    }

    /// Fresh generator positioned at the start of this stream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_index);
        rng
    }
}

/// First noise unitary of the stream.
pub fn sample_noise_unitary(model: &NoiseModel, stream: SeededStream) -> ComplexMatrix {
    model.sample(&mut stream.rng()).unitary()
}

/// Alternates control and noise for `steps` rounds, recording the state after each noise kick.
pub fn noisy_trajectory(
    channel: &KrausChannel,
    model: &NoiseModel,
    rho0: &DensityOperator,
    target: &PureState,
    steps: usize,
    stream: SeededStream,
    observables: Observables,
) -> Result<Trajectory> {
    for found in [channel.dim(), rho0.dim(), target.dim()] {
        if found != 2 {
            return Err(Error::DimensionMismatch { expected: 2, found });
        }
    }
    let mut rng = stream.rng();
    let mut traj = Trajectory::default();
    let mut rho = rho0.clone();
    traj.record(0, &rho, target, observables)?;
    for step in 1..=steps {
        let kick = model.sample(&mut rng).unitary();
        rho = channel.apply(&rho)?.conjugated(&kick);
        traj.record(step, &rho, target, observables)?;
    }
    Ok(traj)
}

/// Mean fidelity over steps `1..=N`, leaving out the initial state.
pub fn mean_fidelity(traj: &Trajectory) -> Result<f64> {
    let records = traj.records();
    if records.len() < 2 {
        return Err(Error::EmptyTrajectory);
    }
    let tail = &records[1..];
    Ok(tail.iter().map(|r| r.fidelity).sum::<f64>() / tail.len() as f64)
}

/// `E[cos²θ] = (1 + e^{−2σ²})/2` for `θ ~ Normal(0, σ²)`.
pub fn dephasing_reset_anchor(sigma: f64) -> f64 {
    0.5 * (1.0 + (-2.0 * sigma * sigma).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructors::weak_swap_toward;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3};

    fn obs() -> Observables {
        Observables::default()
    }

    #[test]
    fn sigma_validation() {
        assert!(NoiseModel::new(NoiseKind::Dephasing, -0.1).is_err());
        assert!(NoiseModel::new(NoiseKind::Dephasing, f64::NAN).is_err());
        assert!("depolarizing".parse::<NoiseKind>().is_ok());
        assert!("amplitude".parse::<NoiseKind>().is_err());
    }

    #[test]
    fn zero_sigma_is_identity() {
        for kind in [NoiseKind::Dephasing, NoiseKind::Depolarising] {
            let m = NoiseModel::new(kind, 0.0).unwrap();
            let u = sample_noise_unitary(&m, SeededStream::new(1, 0));
            assert_eq!(u.max_abs_diff(&ComplexMatrix::identity(2)), 0.0);
        }
    }

    #[test]
    fn dephasing_is_diagonal_and_unitary() {
        let m = NoiseModel::new(NoiseKind::Dephasing, 0.7).unwrap();
        for idx in 0..50 {
            let u = sample_noise_unitary(&m, SeededStream::new(9, idx));
            assert!(u.unitarity_defect() <= 1e-12);
            assert_eq!(u.get(0, 1), C64::new(0.0, 0.0));
            assert_eq!(u.get(1, 0), C64::new(0.0, 0.0));
        }
    }

    #[test]
    fn angle_statistics() {
        let m = NoiseModel::new(NoiseKind::Dephasing, 0.2).unwrap();
        let mut rng = SeededStream::new(2024, 0).rng();
        let n = 100_000;
        let angles: Vec<f64> = (0..n).map(|_| m.sample(&mut rng).angle).collect();
        let mean = angles.iter().sum::<f64>() / n as f64;
        let var = angles.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!(mean.abs() < 0.01);
        assert!((var / 0.04 - 1.0).abs() < 0.05);
    }

    #[test]
    fn depolarising_uses_all_axes() {
        let m = NoiseModel::new(NoiseKind::Depolarising, 0.3).unwrap();
        let mut rng = SeededStream::new(3, 7).rng();
        let mut counts = [0usize; 3];
        for _ in 0..3000 {
            let axis = m.sample(&mut rng).axis;
            counts[Axis::ALL.iter().position(|a| *a == axis).unwrap()] += 1;
        }
        assert!(counts.iter().all(|&c| (900..1100).contains(&c)));
    }

    #[test]
    fn noiseless_run_matches_iterate() {
        let t = PureState::plus();
        let ch = weak_swap_toward(&t, 0.4).unwrap();
        let rho0 = PureState::basis(2, 0).to_density();
        let model = NoiseModel::new(NoiseKind::Depolarising, 0.0).unwrap();
        let noisy = noisy_trajectory(&ch, &model, &rho0, &t, 30, SeededStream::new(0, 0), obs()).unwrap();
        let clean = ch.iterate(&rho0, &t, 30, obs()).unwrap();
        for (a, b) in noisy.fidelities().iter().zip(clean.fidelities()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn same_stream_same_fidelities() {
        let t = PureState::plus();
        let ch = weak_swap_toward(&t, FRAC_PI_3).unwrap();
        let model = NoiseModel::new(NoiseKind::Depolarising, 0.3).unwrap();
        let rho0 = PureState::basis(2, 1).to_density();
        let run = |idx| noisy_trajectory(&ch, &model, &rho0, &t, 100, SeededStream::new(42, idx), obs()).unwrap();
        let (a, b, c) = (run(5), run(5), run(6));
        assert_eq!(a.fidelities(), b.fidelities());
        assert_ne!(a.fidelities(), c.fidelities());
    }

    #[test]
    fn full_swap_resets_then_kick_sets_fidelity() {
        let t = PureState::plus();
        let ch = weak_swap_toward(&t, FRAC_PI_2).unwrap();
        let model = NoiseModel::new(NoiseKind::Dephasing, 0.25).unwrap();
        let stream = SeededStream::new(77, 3);
        let traj = noisy_trajectory(&ch, &model, &PureState::basis(2, 0).to_density(), &t, 40, stream, obs()).unwrap();
        let mut rng = stream.rng();
        for rec in &traj.records()[1..] {
            let theta = model.sample(&mut rng).angle;
            assert!((rec.fidelity - theta.cos().powi(2)).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_non_qubit() {
        let t = PureState::basis(3, 0);
        let ch = weak_swap_toward(&t, 0.3).unwrap();
        let model = NoiseModel::new(NoiseKind::Dephasing, 0.1).unwrap();
        let err = noisy_trajectory(&ch, &model, &t.to_density(), &t, 3, SeededStream::new(0, 0), obs()).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { expected: 2, found: 3 });
    }

    #[test]
    fn mean_excludes_initial_state() {
        let t = PureState::plus();
        let ch = KrausChannel::identity(2);
        let model = NoiseModel::new(NoiseKind::Dephasing, 0.0).unwrap();
        let traj = noisy_trajectory(&ch, &model, &t.to_density(), &t, 5, SeededStream::new(0, 0), obs()).unwrap();
        assert!((mean_fidelity(&traj).unwrap() - 1.0).abs() < 1e-15);
        let empty = noisy_trajectory(&ch, &model, &t.to_density(), &t, 0, SeededStream::new(0, 0), obs()).unwrap();
        assert_eq!(mean_fidelity(&empty), Err(Error::EmptyTrajectory));
    }
}
