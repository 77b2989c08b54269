//! Persistence spheres for persistence diagrams.
//!
//! A persistence sphere is the support function of the lift zonoid of a
//! weighted persistence diagram, restricted to the unit sphere in ℝ³:
//!
//! ```text
//! φ(v) = Σ_p ω(p) c_p max(0, ⟨v, (1, birth_p, death_p)⟩)
//! ```
//!
//! The crate provides the representation itself ([`sphere`]), the lift
//! zonoids and their Hausdorff distance ([`zonoid`]), the exact
//! 1-Wasserstein distance between diagrams ([`diagram`]), stable weightings
//! ([`weighting`]), baseline vectorizations ([`baselines`]), diagram I/O and
//! synthetic data ([`data`]) and a small penalized-regression layer
//! ([`learn`]).

pub mod baselines;
pub mod bench;
pub mod cli;
pub mod data;
pub mod diagram;
pub mod learn;
pub mod parallel;
pub mod sphere;
pub mod weighting;
pub mod zonoid;

pub use diagram::{DiagramPoint, PersistenceDiagram};
pub use sphere::{SphereField, SphereGrid};
pub use weighting::{LiftWeight, Weighting};
pub use zonoid::LiftZonoid;
