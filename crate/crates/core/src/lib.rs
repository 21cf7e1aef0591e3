//! Resource planning and verification for fault-tolerant overall computations.
//!
//! An *overall computation* is a classical function evaluated by preparing a
//! quantum state, running a circuit and measuring. This crate
//!
//! * simulates such computations on small registers with dense density
//!   matrices ([`densmat`], [`channels`], [`kitaev`]),
//! * measures how far a noisy implementation is from the ideal map and checks
//!   that the end-to-end failure stays below `p + α` ([`qcc`]),
//! * turns a required overall failure bound into a concatenation level or a
//!   gate-error requirement ([`ftcalc`]),
//! * sizes majority-vote repetition on top of a per-run failure bound
//!   ([`vote`]).
//!
//! Distances are un-halved trace norms: orthogonal pure states are at
//! distance 2.

pub mod channels;
pub mod densmat;
pub mod ftcalc;
pub mod io;
pub mod kitaev;
pub mod qcc;
pub mod sample;
pub mod vote;

pub use channels::{Circuit, Gate, KrausChannel, NamedGate, NoiseKind, NoiseModel};
pub use densmat::{DensityMatrix, HermitianOperator};
pub use ftcalc::{FtParams, PlanResult};
pub use kitaev::OverallComputation;
pub use qcc::{LinkingMaps, QccReport};
pub use vote::VotePlan;
