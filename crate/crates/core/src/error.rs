use thiserror::Error;

use crate::linalg::{LinalgError, Rational, Vector};
use crate::polyhedra::Simplex;

fn show(v: &[Rational]) -> String {
    let parts: Vec<String> = v.iter().map(crate::linalg::format_rational).collect();
    format!("({})", parts.join(", "))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("expected {expected} vertex images, found {found}")]
    ImageCount { expected: usize, found: usize },
    #[error("image of vertex {vertex} has {found} coordinates, expected {expected}")]
    ImageDimension {
        vertex: usize,
        expected: usize,
        found: usize,
    },
    #[error("point has {found} coordinates, expected {expected}")]
    PointDimension { expected: usize, found: usize },
    #[error("degree undefined: {} lies on the image of boundary face {face}", show(.point))]
    OnBoundaryImage { point: Vector, face: Simplex },
    #[error("{} is not a regular value: {reason}", show(.point))]
    NotRegular { point: Vector, reason: String },
    #[error("no regular value found near {} after {} attempts", show(.point), .attempts.len())]
    NoRegularValue { point: Vector, attempts: Vec<Vector> },
    #[error("fiber through {} is infinite (collapsed cell {cell})", show(.point))]
    InfiniteFiber { point: Vector, cell: usize },
    #[error("{} is not in the open support", show(.point))]
    NotInterior { point: Vector },
    #[error("homotopy hypothesis violated at t = {t}: path point lies on the image of boundary face {face}")]
    HomotopyHypothesis { t: Rational, face: Simplex },
    #[error("maps are defined on different complexes")]
    DomainMismatch,
    #[error("domain is not a PL ball: {0}")]
    NotABall(String),
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
    #[error("generator {kind} exhausted {attempts} resampling attempts")]
    GenerationExhausted { kind: String, attempts: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
