//! Discrete-time ε-Szegedy quantum walks on finite symmetric digraphs, the
//! continuous-time walk they induce, and numerical checks of how the two are
//! related.
//!
//! The arc space `ℓ²(A)` is represented by [`ArcState`] and the vertex-block
//! space `ℓ²(Ṽ)` by [`VertexState`]. All operators act on these in the
//! canonical arc order fixed by [`Graph`].
//!
//! ```
//! use szegedy_core::{Graph, CoinFamily, WalkOperators};
//!
//! let g = Graph::cycle(4).unwrap();
//! let coin = CoinFamily::grover(&g);
//! let ops = WalkOperators::with_dense(g, coin).unwrap();
//! assert!(ops.hamiltonian().unwrap().norm() > 0.0);
//! ```

pub mod coin;
pub mod error;
pub mod evolution;
pub mod graph;
pub mod linalg;
pub mod operators;
pub mod spectral;

pub use coin::{CoinFamily, CoinKind};
pub use error::{Result, WalkError};
pub use evolution::{ConvergenceRecord, ErrorMetric};
pub use graph::{Arc, Graph};
pub use operators::{LiftedPair, WalkOperators, DENSE_ARC_BUDGET};
pub use spectral::{SpectralReport, SubspaceBasis};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

/// Amplitude vector indexed by canonical arc index.
pub type ArcState = nalgebra::DVector<C64>;

/// Vector on `Ṽ = {(u; j)}`, stored as consecutive blocks `f[u]` of length `p_u`.
pub type VertexState = nalgebra::DVector<C64>;

/// Dense complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;
