//! Standard subspaces of finite-dimensional complex Hilbert spaces, their
//! modular theory, extension towers, symplectic skeletons, sequence models of
//! infinite tensor products and a truncated Fock-space simulator.

pub mod error;
pub mod fock;
pub mod hilbert;
pub mod linalg;
pub mod modular;
pub mod scalar;
pub mod seqmodel;
pub mod skeleton;
pub mod tower;

pub use error::{Error, Result};
pub use scalar::{ExactField, Real};

/// Double-precision subspace.
pub type Subspace = hilbert::RealSubspace<f64>;
/// Double-precision modular data.
pub type Modular = modular::ModularData<f64>;
/// Double-precision extension tower.
pub type Tower = tower::TowerState<f64>;
/// Skeleton over exact rationals.
pub use skeleton::ExactSkeleton;
/// Skeleton over floats with a negligibility cutoff.
pub type FloatSkeleton = skeleton::SymplecticSkeleton<f64>;
/// Single-precision subspace, for quick exploratory runs.
pub type SubspaceF32 = hilbert::RealSubspace<f32>;
