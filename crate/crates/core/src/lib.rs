//! Coherent feedback control of quantum systems through repeated interaction
//! with fresh controller systems.
//!
//! A control step is a Kraus channel `ρ ↦ Σ_i M_i ρ M_i†`. When every `M_i`
//! keeps the target `|T⟩` as an eigenvector and the vectors `M_i†|T⟩` span the
//! space, iterating the channel drives any initial state to `|T⟩`, and the
//! target fidelity never decreases along the way.
//!
//! ```
//! use cohfeed::{constructors::weak_swap_channel, PureState, Observables};
//!
//! let channel = weak_swap_channel(std::f64::consts::FRAC_PI_4, 3, 0).unwrap();
//! let target = PureState::basis(3, 0);
//! assert!(channel.verify(&target).unwrap().converging);
//!
//! let start = PureState::basis(3, 2).to_density();
//! let traj = channel.iterate(&start, &target, 30, Observables::default()).unwrap();
//! assert!(traj.last().unwrap().fidelity > 1.0 - 1e-8);
//! ```
//!
//! Mixed target states are not supported.

pub mod analysis;
pub mod channels;
pub mod constructors;
pub mod error;
pub mod io;
pub mod linalg;
pub mod noise;
pub mod pauli;
pub mod registry;
pub mod sampling;
pub mod states;

pub use channels::{ChannelReport, KrausChannel, Observables, Trajectory, TrajectoryRecord};
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, C64};
pub use states::{concurrence, target_fidelity, DensityOperator, PureState};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/states.md")]
    mod states {}
    #[doc = include_str!("../../../book/src/channels.md")]
    mod channels {}
    #[doc = include_str!("../../../book/src/control-strength.md")]
    mod control_strength {}
    #[doc = include_str!("../../../book/src/constructing.md")]
    mod constructing {}
    #[doc = include_str!("../../../book/src/examples.md")]
    mod examples {}
    #[doc = include_str!("../../../book/src/noise.md")]
    mod noise {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../README.md")]
    mod readme {}
}
