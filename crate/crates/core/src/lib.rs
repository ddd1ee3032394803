//! Exact tools for piecewise-linear maps on simplicial complexes: fibers,
//! Jacobian signs, branch sets, Brouwer degree and openness checks.

pub mod degree;
pub mod error;
pub mod generators;
pub mod linalg;
pub mod openness;
pub mod plmap;
pub mod polyhedra;
pub mod whyburn;

pub use error::{Error, Result};
pub use linalg::{Matrix, Rational, Sign, Vector};
pub use plmap::{Fiber, FiberPoint, PLMap, Piece, SignClass, SignProfile};
pub use polyhedra::SimplicialComplex;
