//! Exact predicates on convex hulls of finitely many points: membership,
//! intersection dimension, segment avoidance and the "meets only in the
//! shared face" probe.

use num_traits::{One, Zero};

use super::lp::{Feasibility, LinearSystem, Relation};
use crate::linalg::{rat, Matrix, Rational, Vector};

/// Affine-hull data of a feasible polyhedron `{z : rows}`.
#[derive(Debug, Clone)]
pub struct HullInfo {
    /// A point at which every non-implicit inequality is strict.
    pub relative_interior: Vector,
    /// Basis of the direction space of the affine hull.
    pub directions: Vec<Vector>,
    /// Indices of inequality rows that hold with equality on the whole set.
    pub implicit_equalities: Vec<usize>,
}

/// Finds the implicit equalities, a relative-interior point and the affine
/// hull of a polyhedron. Returns `None` when it is empty.
pub fn analyze(sys: &LinearSystem) -> Option<HullInfo> {
    let first = sys.solve().witness()?;
    let rows = sys.constraints();
    let slack_at = |w: &[Rational], i: usize| {
        let c = &rows[i];
        crate::linalg::dot(&c.coeffs, w) < c.rhs
    };
    // Le rows that have been strict at some witness are not implicit.
    let mut decided = vec![false; rows.len()];
    for (i, c) in rows.iter().enumerate() {
        decided[i] = c.relation != Relation::Le || slack_at(&first, i);
    }
    let mut implicit = Vec::new();
    for i in 0..rows.len() {
        if decided[i] {
            continue;
        }
        let mut probe = sys.clone();
        probe.set_relation(i, Relation::Lt);
        match probe.solve() {
            Feasibility::Feasible(w) => {
                for (k, d) in decided.iter_mut().enumerate() {
                    if !*d && slack_at(&w, k) {
                        *d = true;
                    }
                }
            }
            Feasibility::Infeasible => {
                decided[i] = true;
                implicit.push(i);
            }
        }
    }

    let mut interior = sys.clone();
    let mut equalities: Vec<Vector> = Vec::new();
    for (i, c) in rows.iter().enumerate() {
        match c.relation {
            Relation::Eq => equalities.push(c.coeffs.clone()),
            Relation::Le if implicit.contains(&i) => {
                interior.set_relation(i, Relation::Eq);
                equalities.push(c.coeffs.clone());
            }
            Relation::Le => interior.set_relation(i, Relation::Lt),
            Relation::Lt => {}
        }
    }
    let relative_interior = interior
        .solve()
        .witness()
        .expect("relative interior of a nonempty polyhedron is nonempty");
    let directions = if equalities.is_empty() {
        (0..sys.num_vars())
            .map(|k| {
                let mut e = vec![Rational::zero(); sys.num_vars()];
                e[k] = Rational::one();
                e
            })
            .collect()
    } else {
        Matrix::from_rows(equalities).null_space()
    };
    Some(HullInfo {
        relative_interior,
        directions,
        implicit_equalities: implicit,
    })
}

/// Dimension of the image of `{z : rows}` under the linear map `projection`
/// (`None` when the polyhedron is empty).
pub fn projected_dimension(sys: &LinearSystem, projection: &Matrix) -> Option<usize> {
    let info = analyze(sys)?;
    if info.directions.is_empty() {
        return Some(0);
    }
    let basis = Matrix::from_columns(&info.directions);
    Some(
        projection
            .mul_mat(&basis)
            .expect("projection arity matches the system")
            .rank(),
    )
}

/// Rows for `λ ≥ 0, Σλ = 1` on variables `offset .. offset + count`.
fn simplex_weights(sys: &mut LinearSystem, offset: usize, count: usize) {
    let m = sys.num_vars();
    let mut sum = vec![Rational::zero(); m];
    for (k, s) in sum.iter_mut().enumerate().skip(offset).take(count) {
        sys.nonneg(k);
        *s = Rational::one();
    }
    sys.add_eq(sum, Rational::one());
}

/// System over `(λ, μ)` describing pairs of convex combinations of `p` and
/// `q` that land on the same point.
fn joint_system(p: &[Vector], q: &[Vector]) -> LinearSystem {
    let n = p[0].len();
    let (a, b) = (p.len(), q.len());
    let mut sys = LinearSystem::new(a + b);
    simplex_weights(&mut sys, 0, a);
    simplex_weights(&mut sys, a, b);
    for axis in 0..n {
        let mut row = vec![Rational::zero(); a + b];
        for (k, pt) in p.iter().enumerate() {
            row[k] = pt[axis].clone();
        }
        for (k, pt) in q.iter().enumerate() {
            row[a + k] = -pt[axis].clone();
        }
        sys.add_eq(row, Rational::zero());
    }
    sys
}

/// Exact dimension of `conv(p) ∩ conv(q)`; `None` means empty.
pub fn intersect_dim(p: &[Vector], q: &[Vector]) -> Option<usize> {
    let sys = joint_system(p, q);
    let n = p[0].len();
    let mut proj = Matrix::zeros(n, p.len() + q.len());
    for (k, pt) in p.iter().enumerate() {
        for axis in 0..n {
            proj[(axis, k)] = pt[axis].clone();
        }
    }
    projected_dimension(&sys, &proj)
}

/// Affine dimension of `conv(points)`.
pub fn hull_dim(points: &[Vector]) -> usize {
    if points.len() <= 1 {
        return 0;
    }
    let diffs: Vec<Vector> = points[1..]
        .iter()
        .map(|p| crate::linalg::sub(p, &points[0]))
        .collect();
    Matrix::from_rows(diffs).rank()
}

/// Barycentric weights expressing `y` as a convex combination of `points`,
/// if `y ∈ conv(points)`.
pub fn hull_membership(y: &[Rational], points: &[Vector]) -> Option<Vector> {
    let k = points.len();
    let mut sys = LinearSystem::new(k);
    simplex_weights(&mut sys, 0, k);
    for axis in 0..y.len() {
        sys.add_eq(points.iter().map(|p| p[axis].clone()).collect(), y[axis].clone());
    }
    sys.solve().witness()
}

pub fn point_in_hull(y: &[Rational], points: &[Vector]) -> bool {
    BoundingBox::of(points).contains(y) && hull_membership(y, points).is_some()
}

/// True iff the closed segment `[y0, y1]` misses every obstacle hull.
pub fn segment_avoids_sets(y0: &[Rational], y1: &[Rational], obstacles: &[Vec<Vector>]) -> bool {
    segment_hits(y0, y1, obstacles).is_none()
}

/// Index of the first obstacle met by the closed segment `[y0, y1]`.
pub fn segment_hits(y0: &[Rational], y1: &[Rational], obstacles: &[Vec<Vector>]) -> Option<usize> {
    let seg_box = BoundingBox::of(&[y0.to_vec(), y1.to_vec()]);
    obstacles.iter().position(|obs| {
        if !seg_box.intersects(&BoundingBox::of(obs)) {
            return false;
        }
        // variables: t, λ_1..λ_k ; y0 + t (y1 - y0) = Σ λ w
        let k = obs.len();
        let mut sys = LinearSystem::new(k + 1);
        sys.nonneg(0);
        let mut t_row = vec![Rational::zero(); k + 1];
        t_row[0] = Rational::one();
        sys.add_le(t_row, Rational::one());
        simplex_weights(&mut sys, 1, k);
        for axis in 0..y0.len() {
            let mut row = vec![Rational::zero(); k + 1];
            row[0] = &y0[axis] - &y1[axis];
            for (j, w) in obs.iter().enumerate() {
                row[j + 1] = w[axis].clone();
            }
            sys.add_eq(row, y0[axis].clone());
        }
        sys.solve().is_feasible()
    })
}

/// A point of `conv(p) ∩ conv(q)` outside `conv(p[shared])`, with its weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OverlapWitness {
    pub point: Vector,
    pub weights_p: Vector,
    pub weights_q: Vector,
}

/// Looks for a common point of `conv(p)` and `conv(q)` whose weights on `p`
/// put positive mass outside the indices `shared_in_p`. When `p` is affinely
/// independent such a point exists iff the two hulls meet outside the face
/// spanned by `shared_in_p`.
pub fn overlap_outside_shared(
    p: &[Vector],
    q: &[Vector],
    shared_in_p: &[usize],
) -> Option<OverlapWitness> {
    if !BoundingBox::of(p).intersects(&BoundingBox::of(q)) {
        return None;
    }
    let mut sys = joint_system(p, q);
    let mut mass = vec![Rational::zero(); p.len() + q.len()];
    for (k, m) in mass.iter_mut().enumerate().take(p.len()) {
        if !shared_in_p.contains(&k) {
            *m = Rational::one();
        }
    }
    sys.add_gt(mass, Rational::zero());
    let w = sys.solve().witness()?;
    let weights_p = w[..p.len()].to_vec();
    let weights_q = w[p.len()..].to_vec();
    Some(OverlapWitness {
        point: combine(p, &weights_p),
        weights_p,
        weights_q,
    })
}

/// A point of `relint conv(p)` (all weights on `p` strictly positive) that
/// lies in `conv(q)`.
pub fn relint_meets_hull(p: &[Vector], q: &[Vector]) -> Option<OverlapWitness> {
    if !BoundingBox::of(p).intersects(&BoundingBox::of(q)) {
        return None;
    }
    let mut sys = joint_system(p, q);
    for k in 0..p.len() {
        let mut row = vec![Rational::zero(); p.len() + q.len()];
        row[k] = rat(1);
        sys.add_gt(row, Rational::zero());
    }
    let w = sys.solve().witness()?;
    let weights_p = w[..p.len()].to_vec();
    let weights_q = w[p.len()..].to_vec();
    Some(OverlapWitness {
        point: combine(p, &weights_p),
        weights_p,
        weights_q,
    })
}

/// True iff the interiors of two full-dimensional simplices in ℝⁿ meet,
/// i.e. their intersection has dimension n.
pub fn interiors_overlap(p: &[Vector], q: &[Vector]) -> bool {
    if !BoundingBox::of(p).overlaps_open(&BoundingBox::of(q)) {
        return false;
    }
    let mut sys = joint_system(p, q);
    let m = p.len() + q.len();
    for k in 0..m {
        let mut row = vec![Rational::zero(); m];
        row[k] = rat(1);
        sys.add_gt(row, Rational::zero());
    }
    sys.solve().is_feasible()
}

/// `Σ weights_k points_k`.
pub fn combine(points: &[Vector], weights: &[Rational]) -> Vector {
    let n = points[0].len();
    (0..n)
        .map(|axis| {
            points
                .iter()
                .zip(weights)
                .fold(Rational::zero(), |acc, (p, w)| acc + &p[axis] * w)
        })
        .collect()
}

/// Axis-aligned bounding box used to skip exact probes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundingBox {
    pub lo: Vector,
    pub hi: Vector,
}

impl BoundingBox {
    pub fn of(points: &[Vector]) -> Self {
        let mut lo = points[0].clone();
        let mut hi = points[0].clone();
        for p in &points[1..] {
            for axis in 0..p.len() {
                if p[axis] < lo[axis] {
                    lo[axis] = p[axis].clone();
                }
                if p[axis] > hi[axis] {
                    hi[axis] = p[axis].clone();
                }
            }
        }
        BoundingBox { lo, hi }
    }

    pub fn contains(&self, y: &[Rational]) -> bool {
        (0..y.len()).all(|a| self.lo[a] <= y[a] && y[a] <= self.hi[a])
    }

    /// Closed boxes meet.
    pub fn intersects(&self, other: &BoundingBox) -> bool {
        (0..self.lo.len()).all(|a| self.lo[a] <= other.hi[a] && other.lo[a] <= self.hi[a])
    }

    /// Open boxes meet.
    pub fn overlaps_open(&self, other: &BoundingBox) -> bool {
        (0..self.lo.len()).all(|a| self.lo[a] < other.hi[a] && other.lo[a] < self.hi[a])
    }
}
