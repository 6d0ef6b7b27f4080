//! Nambu and Hamiltonian mechanics on extended phase space, verified by
//! direct computation.
//!
//! The crate is `no_std` (with `alloc`). It provides
//!
//! * an expression language for scalar fields with exact forward-mode
//!   derivatives ([`expr`]),
//! * pointwise exterior calculus on extended phase space ([`forms`]),
//! * Nambu systems of any dimension 3..=6 and their distinguished form
//!   ([`nambu`]) alongside a Hamiltonian reference ([`hamilton`]),
//! * trajectory integration and transport of cycles and chains ([`flow`],
//!   [`transport`]),
//! * spectrally accurate quadrature over discretized cycles and chains
//!   ([`chain`]),
//! * symmetry checks, relative/absolute integral invariants and momentum
//!   one-forms ([`symmetry`]),
//! * the surface action and its first-variation checks ([`action`]).
//!
//! Enable the `parallel` feature to fan out per-sample work over rayon.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod action;
pub mod chain;
pub mod error;
pub mod expr;
pub mod field;
pub mod fit;
pub mod flow;
pub mod forms;
pub mod grid;
pub mod hamilton;
pub mod math;
pub mod mechanics;
pub mod nambu;
mod par;
pub mod point;
pub mod symmetry;
pub mod transport;

pub use chain::{Chain, Cycle, Quadrature};
pub use error::{Error, Result};
pub use expr::{Dual, Expr};
pub use field::Field;
pub use flow::{IntegratorParams, Method, Trajectory};
pub use forms::{DifferentialForm, FormValue, VectorField};
pub use hamilton::HamiltonianSystem;
pub use mechanics::{Dynamics, Mechanics, Region};
pub use nambu::NambuSystem;
pub use point::{ExtendedPoint, TangentVector, MAX_DIM};
pub use symmetry::{InvariantReport, MomentumSystem, SymmetryCandidate};
pub use transport::SolutionSurface;
