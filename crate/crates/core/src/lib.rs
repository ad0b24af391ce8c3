//! Boundary-element solver for time-harmonic scattering from perfect
//! electric conductors with cavities.
//!
//! The exterior problem is split across a fictitious interface Σ into an
//! unbounded outer subdomain and a bounded cavity subdomain. Each subdomain
//! is handled by an electric-field integral equation on its closed boundary
//! shell, and the two are coupled through their admittance
//! (Dirichlet-to-Neumann) maps on Σ:
//!
//! ```text
//!     (A⁺_Σ + A⁻_Σ) E_tan = -u_rhs
//! ```
//!
//! The condensed interface system is solved with GMRES, optionally
//! preconditioned by the Galerkin matrix of the single-layer operator
//! restricted to Σ (with or without a mass-matrix inversion, on the left or
//! on the right — the four variants Y0..Y3 in [`ddm::DdmVariant`]).
//!
//! Crate layout:
//! - [`mesh`]: tagged triangulations, shell extraction, RWG spaces and the
//!   extension/restriction maps between interface and shell spaces.
//! - [`quadrature`]: triangle Gauss rules and regularizing coordinate
//!   transforms for singular Galerkin integrals.
//! - [`bem`]: Green kernel and dense Galerkin assembly of the single-layer,
//!   rotated double-layer and mass operators.
//! - [`linalg`]: dense complex LU, GMRES with left/right preconditioning,
//!   CG, Arnoldi.
//! - [`excitation`]: plane waves and their Galerkin load vectors.
//! - [`admittance`]: subdomain admittance operators realized by inner EFIE
//!   solves.
//! - [`ddm`]: the interface system, its right-hand side and the Y0..Y3
//!   solver variants.
//! - [`post`]: radiation integrals, bistatic RCS, monolithic EFIE reference
//!   solves.
//! - [`mie`]: series solution for the conducting sphere, used as an
//!   independent physics oracle.

pub mod admittance;
pub mod bem;
pub mod ddm;
pub mod excitation;
pub mod geom;
pub mod linalg;
pub mod mesh;
pub mod mie;
pub mod post;
pub mod quadrature;

pub use bem::{BoundaryOperatorMatrix, OperatorKind, WaveContext, SPEED_OF_LIGHT};
pub use ddm::{DdmSystem, DdmVariant};
pub use geom::Vec3;
pub use linalg::{GmresConfig, LinearOperator, SolveReport};
pub use mesh::{InterfaceMaps, Region, RwgSpace, ShellMesh, Side, SurfaceMesh};

/// Complex scalar used throughout the crate.
pub type C64 = num_complex::Complex64;
