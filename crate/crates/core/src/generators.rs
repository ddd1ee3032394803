//! Seeded instance generators and a brute-force fiber counter.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{rat, ratio, Matrix, Rational, Sign, Vector};
use crate::plmap::{PLMap, SignClass};
use crate::polyhedra::polytope::combine;
use crate::polyhedra::SimplicialComplex;
use crate::whyburn::BallMapInstance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GenKind {
    Identity,
    Fold1d,
    InteriorFold1d,
    Doubling2d,
    Shear,
    SingularCell,
    RandomOrientationPreserving,
    RandomMixedSigns,
}

impl GenKind {
    pub const ALL: [GenKind; 8] = [
        GenKind::Identity,
        GenKind::Fold1d,
        GenKind::InteriorFold1d,
        GenKind::Doubling2d,
        GenKind::Shear,
        GenKind::SingularCell,
        GenKind::RandomOrientationPreserving,
        GenKind::RandomMixedSigns,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GenKind::Identity => "identity",
            GenKind::Fold1d => "fold1d",
            GenKind::InteriorFold1d => "interior_fold1d",
            GenKind::Doubling2d => "doubling2d",
            GenKind::Shear => "shear",
            GenKind::SingularCell => "singular_cell",
            GenKind::RandomOrientationPreserving => "random_orientation_preserving",
            GenKind::RandomMixedSigns => "random_mixed_signs",
        }
    }

    /// The only dimension a fixed-shape kind supports.
    pub fn fixed_dim(self) -> Option<usize> {
        match self {
            GenKind::Fold1d | GenKind::InteriorFold1d => Some(1),
            GenKind::Doubling2d | GenKind::Shear => Some(2),
            _ => None,
        }
    }
}

impl fmt::Display for GenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GenKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GenKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidSpec(format!("unknown kind {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GenSpec {
    pub kind: GenKind,
    pub dim: usize,
    /// Cubes per side of the box triangulation; `None` picks a default.
    pub resolution: Option<usize>,
    pub seed: u64,
    /// Denominator of the random perturbations.
    pub denominator: u64,
}

impl GenSpec {
    pub fn new(kind: GenKind, dim: usize, seed: u64) -> Self {
        GenSpec {
            kind,
            dim,
            resolution: None,
            seed,
            denominator: 64,
        }
    }

    pub fn with_resolution(mut self, k: usize) -> Self {
        self.resolution = Some(k);
        self
    }

    pub fn effective_resolution(&self) -> usize {
        self.resolution.unwrap_or(match self.dim {
            1 => 4,
            2 => 3,
            _ => 2,
        })
    }
}

pub const MAX_RESAMPLES: usize = 1000;

/// Builds the instance described by `spec`; identical specs give identical
/// instances.
pub fn generate(spec: &GenSpec) -> Result<PLMap> {
    if let Some(d) = spec.kind.fixed_dim() {
        if spec.dim != d {
            return Err(Error::InvalidSpec(format!("{} requires dim {d}", spec.kind)));
        }
    }
    if !(1..=4).contains(&spec.dim) {
        return Err(Error::InvalidSpec(format!("dim {} outside 1..=4", spec.dim)));
    }
    if spec.resolution == Some(0) || spec.denominator == 0 {
        return Err(Error::InvalidSpec("resolution and denominator must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    match spec.kind {
        GenKind::Identity => {
            let k = box_complex(spec.dim, spec.effective_resolution());
            let images = k.vertices().to_vec();
            PLMap::build(k, images)
        }
        GenKind::Fold1d => line_map(&[rat(-1), rat(0), rat(1)], &[rat(1), rat(0), rat(1)]),
        GenKind::InteriorFold1d => line_map(
            &[rat(-1), rat(0), ratio(1, 2), rat(1)],
            &[rat(-1), ratio(1, 2), rat(0), rat(1)],
        ),
        GenKind::Doubling2d => doubling2d(),
        GenKind::Shear => {
            let v = vec![vec![rat(0), rat(0)], vec![rat(4), rat(0)], vec![rat(0), rat(4)]];
            let k = SimplicialComplex::validate(2, v, vec![vec![0, 1, 2]]).expect("triangle");
            let images = vec![vec![rat(0), rat(0)], vec![rat(4), rat(0)], vec![rat(4), rat(4)]];
            PLMap::build(k, images)
        }
        GenKind::SingularCell => singular_cell(spec, &mut rng),
        GenKind::RandomOrientationPreserving => perturbed(spec, &mut rng, 1, |f| {
            f.sign_profile().classification == SignClass::AllPositive
        }),
        GenKind::RandomMixedSigns => perturbed(spec, &mut rng, 3, |f| {
            let p = f.sign_profile();
            p.changes_sign() && p.num_zero == 0
        }),
    }
}

/// Generates and wraps as a ball instance.
pub fn generate_ball(spec: &GenSpec) -> Result<BallMapInstance> {
    BallMapInstance::new(generate(spec)?)
}

fn line_map(xs: &[Rational], ys: &[Rational]) -> Result<PLMap> {
    let v = xs.iter().map(|x| vec![x.clone()]).collect();
    let cells = (0..xs.len() - 1).map(|i| vec![i, i + 1]).collect();
    let k = SimplicialComplex::validate(1, v, cells).expect("subdivided interval");
    PLMap::build(k, ys.iter().map(|y| vec![y.clone()]).collect())
}

/// The eight boundary points of the square `[-1, 1]²`, counterclockwise
/// from `(1, 0)`.
fn square_directions() -> Vec<Vector> {
    [(1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1)]
        .iter()
        .map(|&(x, y)| vec![rat(x), rat(y)])
        .collect()
}

fn doubling2d() -> Result<PLMap> {
    let dirs = square_directions();
    let mut vertices = vec![vec![rat(0), rat(0)]];
    vertices.extend(dirs.iter().cloned());
    let cells = (0..8).map(|k| vec![0, k + 1, (k + 1) % 8 + 1]).collect();
    let k = SimplicialComplex::validate(2, vertices, cells).expect("square fan");
    let mut images = vec![vec![rat(0), rat(0)]];
    images.extend((0..8).map(|k| dirs[(2 * k) % 8].clone()));
    PLMap::build(k, images)
}

/// Freudenthal triangulation of `[-1, 1]ⁿ` with `k` cubes per side: every
/// cube with corner `c` splits into the simplices
/// `c, c + e_π(1), c + e_π(1) + e_π(2), ...` over permutations `π`.
pub fn box_complex(n: usize, k: usize) -> SimplicialComplex {
    let side = k + 1;
    let index = |m: &[usize]| m.iter().rev().fold(0, |acc, &i| acc * side + i);
    let total = side.pow(n as u32);
    let vertices: Vec<Vector> = (0..total)
        .map(|mut id| {
            (0..n)
                .map(|_| {
                    let i = id % side;
                    id /= side;
                    Rational::new((2 * i as i64 - k as i64).into(), (k as i64).into())
                })
                .collect()
        })
        .collect();
    let mut perms: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..n {
        perms = perms
            .into_iter()
            .flat_map(|p| {
                let free: Vec<usize> = (0..n).filter(|j| !p.contains(j)).collect();
                free.into_iter().map(move |j| {
                    let mut q = p.clone();
                    q.push(j);
                    q
                })
            })
            .collect();
    }
    let mut cells = Vec::new();
    for corner_id in 0..k.pow(n as u32) {
        let mut rest = corner_id;
        let corner: Vec<usize> = (0..n)
            .map(|_| {
                let i = rest % k;
                rest /= k;
                i
            })
            .collect();
        for perm in &perms {
            let mut m = corner.clone();
            let mut cell = vec![index(&m)];
            for &axis in perm {
                m[axis] += 1;
                cell.push(index(&m));
            }
            cells.push(cell);
        }
    }
    SimplicialComplex::validate(n, vertices, cells).expect("Freudenthal triangulation is valid")
}

fn interior_vertices(k: &SimplicialComplex) -> Vec<usize> {
    let mut on_boundary = vec![false; k.vertices().len()];
    for &b in k.boundary_faces() {
        for &v in k.face(b).simplex.vertices() {
            on_boundary[v] = true;
        }
    }
    (0..on_boundary.len()).filter(|&v| !on_boundary[v]).collect()
}

/// Identity on the box, then one interior vertex is sent into the affine
/// span of the images of the opposite face of one of its cells, so that
/// cell collapses to rank n-1.
fn singular_cell(spec: &GenSpec, rng: &mut ChaCha8Rng) -> Result<PLMap> {
    let k = box_complex(spec.dim, spec.effective_resolution());
    let inner = interior_vertices(&k);
    let v = *inner
        .choose(rng)
        .ok_or_else(|| Error::InvalidSpec("box has no interior vertex".into()))?;
    let star: Vec<usize> = (0..k.num_cells()).filter(|&c| k.cell(c).vertices().contains(&v)).collect();
    let cell = *star.choose(rng).expect("interior vertex lies in a cell");
    let opposite: Vec<Vector> = k
        .cell(cell)
        .vertices()
        .iter()
        .filter(|&&w| w != v)
        .map(|&w| k.vertex(w).clone())
        .collect();
    let den = spec.denominator as i64;
    let weights: Vec<i64> = (0..opposite.len()).map(|_| rng.gen_range(1..=den)).collect();
    let total: i64 = weights.iter().sum();
    let weights: Vec<Rational> = weights.iter().map(|&w| ratio(w, total)).collect();
    let mut images = k.vertices().to_vec();
    images[v] = combine(&opposite, &weights);
    PLMap::build(k, images)
}

/// Identity on the box with interior vertex images moved by up to
/// `scale / 4` of the mesh size per coordinate, resampled until `accept`.
fn perturbed(
    spec: &GenSpec,
    rng: &mut ChaCha8Rng,
    scale: i64,
    accept: impl Fn(&PLMap) -> bool,
) -> Result<PLMap> {
    let res = spec.effective_resolution();
    let k = box_complex(spec.dim, res);
    let inner = interior_vertices(&k);
    if inner.is_empty() {
        return Err(Error::InvalidSpec("box has no interior vertex".into()));
    }
    let den = spec.denominator as i64;
    // mesh size is 2/res, so a quarter of it is den / (2 res) steps of 1/den
    let reach = (scale * den / (2 * res as i64)).max(1);
    for _ in 0..MAX_RESAMPLES {
        let mut images = k.vertices().to_vec();
        for &v in &inner {
            for x in images[v].iter_mut() {
                *x += ratio(rng.gen_range(-reach..=reach), den);
            }
        }
        let f = PLMap::build(k.clone(), images)?;
        if accept(&f) {
            return Ok(f);
        }
    }
    Err(Error::GenerationExhausted {
        kind: spec.kind.to_string(),
        attempts: MAX_RESAMPLES,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FiberCount {
    Finite(usize),
    Infinite,
}

/// Counts `f⁻¹(y)` without the fiber routine: every cell is searched for
/// basic solutions `Σ λ_i w_i = y, Σ λ_i = 1, λ > 0` over vertex subsets
/// with affinely independent images. A cell meeting the fiber in two
/// distinct points meets it in a segment.
pub fn oracle_fiber_count(f: &PLMap, y: &[Rational]) -> FiberCount {
    let k = f.domain();
    let mut points: BTreeSet<Vector> = BTreeSet::new();
    for cell in k.cells() {
        let verts = cell.vertices();
        let mut in_cell: BTreeSet<Vector> = BTreeSet::new();
        for mask in 1u32..(1 << verts.len()) {
            let subset: Vec<usize> = (0..verts.len()).filter(|i| mask >> i & 1 == 1).collect();
            if let Some(lambda) = basic_solution(f, verts, &subset, y) {
                let domain: Vec<Vector> = subset.iter().map(|&i| k.vertex(verts[i]).clone()).collect();
                in_cell.insert(combine(&domain, &lambda));
            }
        }
        if in_cell.len() > 1 {
            return FiberCount::Infinite;
        }
        points.extend(in_cell);
    }
    FiberCount::Finite(points.len())
}

/// Unique strictly positive solution over the chosen vertices, if any.
fn basic_solution(f: &PLMap, verts: &[usize], subset: &[usize], y: &[Rational]) -> Option<Vector> {
    let n = y.len();
    let m = subset.len();
    let rows: Vec<Vector> = (0..=n)
        .map(|r| {
            let mut row: Vector = subset
                .iter()
                .map(|&i| if r < n { f.image(verts[i])[r].clone() } else { rat(1) })
                .collect();
            row.push(if r < n { y[r].clone() } else { rat(1) });
            row
        })
        .collect();
    let (reduced, pivots) = Matrix::from_rows(rows).rref();
    if pivots != (0..m).collect::<Vec<_>>() {
        return None;
    }
    let lambda: Vector = (0..m).map(|j| reduced[(j, m)].clone()).collect();
    lambda.iter().all(Signed::is_positive).then_some(lambda)
}

/// Signed count over the oracle's points: `Σ sign det A_σ` for cells whose
/// interior contains a fiber point. Used to cross-check degrees at regular
/// values.
pub fn oracle_signed_count(f: &PLMap, y: &[Rational]) -> Option<i64> {
    let k = f.domain();
    let mut total = 0i64;
    for (c, cell) in k.cells().iter().enumerate() {
        let all: Vec<usize> = (0..cell.len()).collect();
        if let Some(lambda) = basic_solution(f, cell.vertices(), &all, y) {
            if f.piece(c).det_sign == Sign::Zero || lambda.iter().any(Zero::is_zero) {
                return None;
            }
            total += f.piece(c).det_sign.as_i32() as i64;
        }
    }
    Some(total)
}
