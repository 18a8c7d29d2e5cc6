//! Kinematics of a hybrid five-axis machine: a planar-translating parallel
//! module with one coupled roll, carrying a spindle, over a two-axis tilting
//! table.
//!
//! Everything is generic over the scalar through [`scalar::Real`]; the
//! aliases below fix it to `f64` (production) or `f32` (constrained targets).
//!
//! * [`params`]: machine description, validation and loading.
//! * [`transforms`]: frames, the serial table chain and rod endpoints.
//! * [`coupling`]: the position/roll coupling of leg I and its ellipses.
//! * [`ik`], [`fk`]: analytic inverse and forward kinematics.
//! * [`polyroots`]: real root isolation for the low-degree polynomials involved.
//! * [`oracle`]: dense-scan reference solvers for testing.
//! * [`workspace`]: constraint checks and voxel workspace sweeps.

pub mod constraints;
pub mod coupling;
pub mod fk;
pub mod ik;
pub mod oracle;
pub mod params;
pub mod polyroots;
pub mod report;
pub mod scalar;
pub mod transforms;
pub mod workspace;

pub use scalar::Real;

pub type MachineParams64 = params::MachineParams<f64>;
pub type JointCoords64 = params::JointCoords<f64>;
pub type PlatformPose64 = transforms::PlatformPose<f64>;
pub type ToolPose64 = transforms::ToolPose<f64>;
pub type IkCandidate64 = ik::IkCandidate<f64>;
pub type FkSolution64 = fk::FkSolution<f64>;
pub type WorkspaceGrid64 = workspace::WorkspaceGrid<f64>;

pub type MachineParams32 = params::MachineParams<f32>;
pub type JointCoords32 = params::JointCoords<f32>;
pub type PlatformPose32 = transforms::PlatformPose<f32>;
pub type ToolPose32 = transforms::ToolPose<f32>;
pub type IkCandidate32 = ik::IkCandidate<f32>;
pub type FkSolution32 = fk::FkSolution<f32>;
