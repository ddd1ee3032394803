//! Exact openness conditions for PL maps, the branch set, and an
//! independent sampling oracle that looks for uncovered directions.

use std::fmt;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{lerp, rat, Rational, Sign, Vector};
use crate::plmap::{Fiber, PLMap, SignProfile};
use crate::polyhedra::{interiors_overlap, CellId, FaceId, Simplex};

/// Every piece has the same nonzero determinant sign.
pub fn coherently_oriented(f: &PLMap) -> bool {
    let first = f.piece(0).det_sign;
    !first.is_zero() && f.pieces().iter().all(|p| p.det_sign == first)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BranchReason {
    SignMismatchAcrossFace {
        cells: (CellId, CellId),
        signs: (Sign, Sign),
    },
    SingularIncidentCell { cell: CellId },
    /// Images of the two star cells overlap in an open set.
    LocalInjectivityFailure { cells: (CellId, CellId) },
}

impl fmt::Display for BranchReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BranchReason::SignMismatchAcrossFace { .. } => f.write_str("SignMismatchAcrossFace"),
            BranchReason::SingularIncidentCell { .. } => f.write_str("SingularIncidentCell"),
            BranchReason::LocalInjectivityFailure { .. } => f.write_str("LocalInjectivityFailure"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchFace {
    pub face: FaceId,
    pub simplex: Simplex,
    pub dim: usize,
    pub reason: BranchReason,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchReport {
    pub branch_faces: Vec<BranchFace>,
    /// `None` when the branch set is empty.
    pub dim: Option<usize>,
}

impl BranchReport {
    pub fn is_empty(&self) -> bool {
        self.branch_faces.is_empty()
    }
}

/// Classifies the relative interior of every face meeting the open support.
///
/// A PL map is affine on each open cell, so whether `f` is a local
/// homeomorphism at `x` depends only on the carrier face of `x`; the branch
/// set is therefore a union of open faces and this enumeration is complete.
pub fn branch_set(f: &PLMap) -> BranchReport {
    let k = f.domain();
    let n = k.dim();
    let mut branch_faces = Vec::new();
    for face in k.interior_faces() {
        let star = &k.face(face).cells;
        let dim = k.face(face).simplex.len() - 1;
        let singular = star.iter().copied().find(|&c| f.piece(c).is_singular());
        let reason = if let Some(cell) = singular {
            Some(BranchReason::SingularIncidentCell { cell })
        } else if dim + 1 == n {
            let (a, b) = (star[0], star[1]);
            let signs = (f.piece(a).det_sign, f.piece(b).det_sign);
            (signs.0 != signs.1).then_some(BranchReason::SignMismatchAcrossFace {
                cells: (a, b),
                signs,
            })
        } else {
            star_overlap(f, face).map(|cells| BranchReason::LocalInjectivityFailure { cells })
        };
        if let Some(reason) = reason {
            branch_faces.push(BranchFace {
                face,
                simplex: k.face(face).simplex.clone(),
                dim,
                reason,
            });
        }
    }
    for c in 0..k.num_cells() {
        if f.piece(c).is_singular() {
            let face = k.cell_face(c);
            branch_faces.push(BranchFace {
                face,
                simplex: k.cell(c).clone(),
                dim: n,
                reason: BranchReason::SingularIncidentCell { cell: c },
            });
        }
    }
    branch_faces.sort_by_key(|b| b.face);
    let dim = branch_faces.iter().map(|b| b.dim).max();
    BranchReport { branch_faces, dim }
}

/// First pair of star cells of `face` whose images, shrunk by 1/2 toward the
/// image of the face barycenter, overlap in an open set. Both images are
/// cones with a common apex near that point, so the shrink factor does not
/// change the answer.
fn star_overlap(f: &PLMap, face: FaceId) -> Option<(CellId, CellId)> {
    let k = f.domain();
    let x = k.barycenter_of(&k.face(face).simplex);
    let fx = f.eval(&x).expect("face lies in the support");
    let half = Rational::new(1.into(), 2.into());
    let star = &k.face(face).cells;
    let shrunk: Vec<Vec<Vector>> = star
        .iter()
        .map(|&c| {
            f.image_points(k.cell(c))
                .iter()
                .map(|w| lerp(&fx, w, &half))
                .collect()
        })
        .collect();
    for i in 0..star.len() {
        for j in i + 1..star.len() {
            if interiors_overlap(&shrunk[i], &shrunk[j]) {
                return Some((star[i], star[j]));
            }
        }
    }
    None
}

/// A sign condition over the cells (all cells, or only nonsingular ones),
/// evaluated on each connected piece of the open support.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignCondition {
    pub finite_fibers: bool,
    pub sign_not_mixed: bool,
}

impl SignCondition {
    pub fn holds(&self) -> bool {
        self.finite_fibers && self.sign_not_mixed
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BranchCondition {
    pub finite_fibers: bool,
    pub dim_bf_le_n_minus_2: bool,
}

impl BranchCondition {
    pub fn holds(&self) -> bool {
        self.finite_fibers && self.dim_bf_le_n_minus_2
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleSummary {
    pub checked: bool,
    pub open_at_all_samples: bool,
    pub samples: usize,
    pub failures: Vec<OracleFailure>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpennessVerdict {
    pub cond_ii: SignCondition,
    pub cond_iii: SignCondition,
    pub cond_iv: BranchCondition,
    pub coherent: bool,
    pub oracle_i: OracleSummary,
    pub all_agree: bool,
    pub sign_profile: SignProfile,
    pub branch: BranchReport,
    pub connected_support: bool,
}

impl OpennessVerdict {
    /// The exact conditions hold (they agree, and they say "open").
    pub fn is_open(&self) -> bool {
        self.all_agree && self.cond_iv.holds()
    }
}

/// Evaluates the exact conditions and optionally the oracle.
///
/// The sign conditions are read per connected component of the open
/// support: a map can be open with opposite orientations on two disjoint
/// pieces. Coherent orientation is a global notion, so it is only compared
/// with the other conditions when the support is connected.
pub fn check_conditions(f: &PLMap, oracle: Option<&OracleConfig>) -> OpennessVerdict {
    let k = f.domain();
    let n = k.dim();
    let finite = f.finite_fibers();
    let labels = k.cell_components();
    let num_components = labels.iter().max().map_or(0, |m| m + 1);
    let mixed_in_some_component = |include_zero: bool| {
        (0..num_components).any(|comp| {
            let signs = (0..k.num_cells())
                .filter(|&c| labels[c] == comp)
                .map(|c| f.piece(c).det_sign)
                .filter(|s| include_zero || !s.is_zero());
            SignProfile::from_signs(signs).changes_sign()
        })
    };
    let cond_ii = SignCondition {
        finite_fibers: finite,
        sign_not_mixed: !mixed_in_some_component(true),
    };
    let cond_iii = SignCondition {
        finite_fibers: finite,
        sign_not_mixed: !mixed_in_some_component(false),
    };
    let branch = branch_set(f);
    let cond_iv = BranchCondition {
        finite_fibers: finite,
        dim_bf_le_n_minus_2: branch.dim.is_none_or(|d| d + 2 <= n),
    };
    let coherent = coherently_oriented(f);
    let connected_support = num_components <= 1;
    let exact_agree = cond_ii.holds() == cond_iii.holds() && cond_iii.holds() == cond_iv.holds();
    let all_agree = exact_agree && (!connected_support || coherent == cond_ii.holds());
    let oracle_i = match oracle {
        Some(cfg) => {
            let report = openness_oracle(f, cfg);
            OracleSummary {
                checked: true,
                open_at_all_samples: report.open_at_all_samples(),
                samples: report.samples,
                failures: report.failures,
            }
        }
        None => OracleSummary {
            checked: false,
            open_at_all_samples: false,
            samples: 0,
            failures: Vec::new(),
        },
    };
    OpennessVerdict {
        cond_ii,
        cond_iii,
        cond_iv,
        coherent,
        oracle_i,
        all_agree,
        sign_profile: f.sign_profile(),
        branch,
        connected_support,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleConfig {
    /// Random interior points, on top of every interior face barycenter.
    pub num_points: usize,
    pub num_directions: usize,
    pub seed: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            num_points: 20,
            num_directions: 64,
            seed: 0,
        }
    }
}

/// Denominator for random weights and direction coordinates.
const GRID: i64 = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FailureKind {
    /// `target` has no preimage in the star of `point` shrunk by 1/2.
    Uncovered,
    SingularPiece { cell: CellId },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleFailure {
    pub point: Vector,
    pub direction: Vector,
    pub epsilon: Rational,
    /// `f(point) + epsilon * direction`.
    pub target: Vector,
    pub kind: FailureKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleReport {
    pub samples: usize,
    pub directions: usize,
    pub failures: Vec<OracleFailure>,
}

impl OracleReport {
    pub fn open_at_all_samples(&self) -> bool {
        self.failures.is_empty()
    }
}

fn random_direction(rng: &mut ChaCha8Rng, n: usize) -> Vector {
    loop {
        let d: Vec<i64> = (0..n).map(|_| rng.gen_range(-GRID..=GRID)).collect();
        if d.iter().any(|&v| v != 0) {
            return d.into_iter().map(|v| Rational::new(v.into(), GRID.into())).collect();
        }
    }
}

/// Sample points: barycenters of all faces not on the boundary, then
/// `num_points` seeded points in open cells. Each comes with the cells
/// containing it.
pub fn oracle_samples(f: &PLMap, cfg: &OracleConfig) -> Vec<(Vector, Vec<CellId>)> {
    let k = f.domain();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut points: Vec<(Vector, Vec<CellId>)> = k
        .faces()
        .iter()
        .filter(|face| !face.on_boundary)
        .map(|face| (k.barycenter_of(&face.simplex), face.cells.clone()))
        .collect();
    for _ in 0..cfg.num_points {
        let c = rng.gen_range(0..k.num_cells());
        let weights: Vec<Rational> = (0..=k.dim()).map(|_| rat(rng.gen_range(1..=GRID))).collect();
        let total: Rational = weights.iter().sum();
        let normalized: Vec<Rational> = weights.iter().map(|w| w / &total).collect();
        let x = crate::polyhedra::polytope::combine(&k.points_of(k.cell(c)), &normalized);
        points.push((x, vec![c]));
    }
    points
}

/// Probes openness at sampled points without using any determinant-sign
/// criterion: `f` is open at `x` iff the cones `A_σ (σ - x)` over the star
/// of `x` cover a neighbourhood of `f(x)`. A direction `d` is covered by `σ`
/// iff moving from `x` along `A_σ⁻¹ d` stays in `σ` for a short time.
pub fn openness_oracle(f: &PLMap, cfg: &OracleConfig) -> OracleReport {
    let k = f.domain();
    let samples = oracle_samples(f, cfg);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x9e37_79b9_7f4a_7c15);
    let directions: Vec<Vector> = (0..cfg.num_directions)
        .map(|_| random_direction(&mut rng, k.dim()))
        .collect();
    // barycentric velocity of A_σ⁻¹ d in σ, per cell and direction
    let mut velocity: Vec<Option<Vec<Vector>>> = vec![None; k.num_cells()];
    let mut failures = Vec::new();
    for (x, cells) in &samples {
        let fx = f.eval(x).expect("samples lie in the support");
        if let Some(&cell) = cells.iter().find(|&&c| f.piece(c).is_singular()) {
            failures.push(OracleFailure {
                point: x.clone(),
                direction: vec![Rational::zero(); k.dim()],
                epsilon: Rational::zero(),
                target: fx,
                kind: FailureKind::SingularPiece { cell },
            });
            continue;
        }
        let star: Vec<(CellId, Vector)> = cells.iter().map(|&c| (c, k.barycentric(c, x))).collect();
        for &c in cells {
            velocity[c].get_or_insert_with(|| {
                let inv = f.piece(c).inverse().expect("nonsingular");
                directions
                    .iter()
                    .map(|d| k.barycentric_direction(c, &inv.mul_vec(d).expect("dim")))
                    .collect()
            });
        }
        for (j, d) in directions.iter().enumerate() {
            let mut covered = false;
            let mut exit: Option<Rational> = None;
            for (c, beta) in &star {
                let delta = &velocity[*c].as_ref().expect("filled above")[j];
                let enters = beta
                    .iter()
                    .zip(delta)
                    .all(|(b, dl)| !b.is_zero() || !dl.is_negative());
                if enters {
                    covered = true;
                    break;
                }
                // parameter at which the ray leaves σ through a face away from x
                let leave = beta
                    .iter()
                    .zip(delta)
                    .filter(|(b, dl)| b.is_positive() && dl.is_negative())
                    .map(|(b, dl)| b / -dl)
                    .min();
                if let Some(t) = leave {
                    exit = Some(exit.map_or(t.clone(), |e| e.min(t)));
                }
            }
            if covered {
                continue;
            }
            let epsilon = exit.map_or_else(Rational::one, |e| e / rat(2));
            let target = fx.iter().zip(d).map(|(a, b)| a + &epsilon * b).collect();
            failures.push(OracleFailure {
                point: x.clone(),
                direction: d.clone(),
                epsilon,
                target,
                kind: FailureKind::Uncovered,
            });
        }
    }
    OracleReport {
        samples: samples.len(),
        directions: directions.len(),
        failures,
    }
}

/// Re-checks a failure witness from scratch with `fiber()`: no preimage of
/// the target lies in `x + (σ - x)/2` for any cell `σ ∋ x`.
pub fn revalidate_failure(f: &PLMap, failure: &OracleFailure) -> bool {
    let k = f.domain();
    let x = &failure.point;
    let star: Vec<CellId> = (0..k.num_cells()).filter(|&c| k.cell_contains(c, x)).collect();
    match failure.kind {
        FailureKind::SingularPiece { cell } => star.contains(&cell) && f.piece(cell).is_singular(),
        FailureKind::Uncovered => {
            let expected: Vector = match f.eval(x) {
                Some(fx) => fx.iter().zip(&failure.direction).map(|(a, b)| a + &failure.epsilon * b).collect(),
                None => return false,
            };
            if expected != failure.target || !failure.epsilon.is_positive() {
                return false;
            }
            let Ok(Fiber::Finite(points)) = f.fiber(&failure.target) else {
                return false;
            };
            points.iter().all(|p| {
                // p ∈ x + (σ - x)/2 iff 2p - x ∈ σ
                let stretched = lerp(x, &p.point, &rat(2));
                star.iter().all(|&c| !k.cell_contains(c, &stretched))
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ratio;
    use crate::polyhedra::SimplicialComplex;

    fn pts(raw: &[&[i64]]) -> Vec<Vector> {
        raw.iter().map(|p| p.iter().map(|&v| rat(v)).collect()).collect()
    }

    fn fold() -> PLMap {
        let k = SimplicialComplex::validate(1, pts(&[&[-1], &[0], &[1]]), vec![vec![0, 1], vec![1, 2]])
            .unwrap();
        PLMap::build(k, pts(&[&[1], &[0], &[1]])).unwrap()
    }

    fn square_identity() -> PLMap {
        let v = pts(&[&[0, 0], &[1, 0], &[1, 1], &[0, 1]]);
        let k = SimplicialComplex::validate(2, v.clone(), vec![vec![0, 1, 2], vec![0, 2, 3]]).unwrap();
        PLMap::build(k, v).unwrap()
    }

    #[test]
    fn identity_is_open() {
        let f = square_identity();
        assert!(coherently_oriented(&f));
        let b = branch_set(&f);
        assert!(b.is_empty());
        assert_eq!(b.dim, None);
        let v = check_conditions(&f, Some(&OracleConfig::default()));
        assert!(v.all_agree && v.is_open());
        assert!(v.oracle_i.open_at_all_samples);
    }

    #[test]
    fn fold_is_not_open() {
        let f = fold();
        assert!(!coherently_oriented(&f));
        let b = branch_set(&f);
        assert_eq!(b.branch_faces.len(), 1);
        assert_eq!(b.branch_faces[0].simplex, Simplex::new(vec![1]));
        assert_eq!(b.dim, Some(0));
        let v = check_conditions(&f, None);
        assert!(v.all_agree);
        assert!(!v.cond_ii.holds() && !v.cond_iii.holds() && !v.cond_iv.holds() && !v.coherent);
    }

    #[test]
    fn fold_oracle_witness_at_breakpoint() {
        let f = fold();
        let report = openness_oracle(&f, &OracleConfig::default());
        let at_zero: Vec<_> = report.failures.iter().filter(|w| w.point == vec![rat(0)]).collect();
        assert!(!at_zero.is_empty());
        assert!(at_zero.iter().all(|w| w.direction[0].is_negative()));
        assert!(report.failures.iter().all(|w| revalidate_failure(&f, w)));
        // a tampered witness does not survive
        let mut bad = at_zero[0].clone();
        bad.direction = vec![rat(1)];
        bad.epsilon = ratio(1, 4);
        bad.target = vec![ratio(1, 4)];
        assert!(!revalidate_failure(&f, &bad));
    }

    #[test]
    fn singular_piece_conditions() {
        let v = pts(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]);
        let k = SimplicialComplex::validate(2, v.clone(), vec![vec![0, 1, 2], vec![1, 2, 3]]).unwrap();
        // vertex 3 onto the line through the images of 1 and 2
        let mut images = v;
        images[3] = vec![ratio(1, 2), ratio(1, 2)];
        let f = PLMap::build(k, images).unwrap();
        let verdict = check_conditions(&f, None);
        assert!(!verdict.cond_ii.finite_fibers);
        assert!(verdict.all_agree);
        assert_eq!(verdict.branch.dim, Some(2));
    }

    #[test]
    fn disconnected_support_opposite_orientations() {
        let v = pts(&[&[0], &[1], &[2], &[3]]);
        let k = SimplicialComplex::validate(1, v, vec![vec![0, 1], vec![2, 3]]).unwrap();
        let f = PLMap::build(k, pts(&[&[0], &[1], &[3], &[2]])).unwrap();
        let verdict = check_conditions(&f, None);
        assert!(!verdict.coherent);
        assert!(verdict.cond_ii.holds() && verdict.cond_iv.holds());
        assert!(verdict.all_agree);
    }
}
