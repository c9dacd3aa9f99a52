//! Escape-speed comparison functions for transcendental entire functions:
//! iterated maximum modulus and the maps `mu_{m,eps}`, `phi_m`, `psi_m` in
//! exp-tower arithmetic, numerical checkers for the regularity conditions
//! that make `Q_m(f) = A(f)`, and finite-horizon classification of orbits
//! into `A(f) ⊂ Q(f) ⊂ Q_m(f) ⊂ I(f)`.

pub mod config;
pub mod error;
pub mod exec;
pub mod grid;
pub mod growthfn;
pub mod kv;
pub mod orbit;
pub mod regularity;
pub mod render;
pub mod suite;
pub mod tower;

pub use error::{Error, Result};
pub use growthfn::{Catalog, GrowthKind, GrowthModel};
pub use tower::TowerReal;
