//! Numerical differential geometry for hypersurface charts.
//!
//! Given a parametrized hypersurface `φ: U ⊂ ℝᵐ → (N^{m+1}, h)` in a space
//! form or Einstein ambient, this crate computes the fundamental forms, shape
//! operator, mean curvature and intrinsic curvature through exact jet
//! (truncated Taylor) arithmetic, then checks — pointwise, to tight
//! tolerance — the Gauss/Ricci/scalar curvature identities, the Bochner
//! identity, and the biharmonicity system
//!
//! ```text
//! ΔH − H|A|² + H·Ric^N(ξ,ξ) = 0
//! 2A(grad H) + (m/2)·grad H² − 2H·(Ric^N ξ)^⊤ = 0
//! ```
//!
//! A catalog of closed-form example families (small hyperspheres, generalized
//! Clifford tori, Euclidean spheres and cylinders, horospheres, random graph
//! hypersurfaces) provides oracles, and the `biharm` binary drives
//! verification runs, identity sweeps, parameter sweeps with root refinement,
//! and theorem audits.

pub mod ambient;
pub mod biharmonic;
pub mod catalog;
pub mod cli;
pub mod hypersurface;
pub mod jets;
pub mod linalg;
pub mod sampling;
pub mod tensors;

pub use jets::{Jet, JetError};
