//! Brouwer degree of a PL map via signed fiber counts at regular values.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{lerp, rat, Rational, Sign, Vector};
use crate::plmap::{Fiber, PLMap};
use crate::polyhedra::polytope::segment_hits;
use crate::polyhedra::{point_in_hull, BoundingBox, CellId, FaceId, Simplex, SimplicialComplex};

/// Why a point fails to be a regular value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Irregularity {
    /// The point lies in the image of this face of dimension ≤ n-1
    /// (the smallest such face of the first facet hit).
    SkeletonImage { face: Simplex },
    SingularCell { cell: CellId },
}

impl fmt::Display for Irregularity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Irregularity::SkeletonImage { face } => write!(f, "lies in the image of face {face}"),
            Irregularity::SingularCell { cell } => {
                write!(f, "lies in the image of singular cell {cell}")
            }
        }
    }
}

/// Outcome of one obstacle test for the segment `[y, y′]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObstacleOutcome {
    pub face: Simplex,
    pub hit: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathEvidence {
    /// `[y, y′]` misses the image of every boundary face.
    pub avoids_boundary_image: bool,
    pub obstacles: Vec<ObstacleOutcome>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeCertificate {
    pub degree: i64,
    pub query_point: Vector,
    pub regular_point: Vector,
    pub fiber: Vec<(Vector, Sign)>,
    pub path_evidence: PathEvidence,
}

impl DegreeCertificate {
    pub fn perturbed(&self) -> bool {
        self.query_point != self.regular_point
    }
}

/// `None` when `y` is a regular value, otherwise the obstruction.
pub fn regularity(f: &PLMap, y: &[Rational]) -> Option<Irregularity> {
    let k = f.domain();
    let n = k.dim();
    for facet in k.faces_of_dim(n - 1) {
        let simplex = &k.face(facet).simplex;
        let pts = f.image_points(simplex);
        if !point_in_hull(y, &pts) {
            continue;
        }
        let minimal = simplex
            .faces()
            .filter(|s| point_in_hull(y, &f.image_points(s)))
            .min_by_key(|s| s.len())
            .expect("the facet itself contains y");
        return Some(Irregularity::SkeletonImage { face: minimal });
    }
    (0..k.num_cells())
        .find(|&c| f.piece(c).is_singular() && point_in_hull(y, &f.image_points(k.cell(c))))
        .map(|cell| Irregularity::SingularCell { cell })
}

pub fn is_regular_value(f: &PLMap, y: &[Rational]) -> bool {
    regularity(f, y).is_none()
}

/// First boundary face whose image contains `y`.
pub fn boundary_image_hit(f: &PLMap, y: &[Rational]) -> Option<FaceId> {
    f.domain()
        .boundary_faces()
        .iter()
        .copied()
        .find(|&b| point_in_hull(y, &f.image_points(&f.domain().face(b).simplex)))
}

fn ensure_off_boundary(f: &PLMap, y: &[Rational]) -> Result<()> {
    f.check_point(y)?;
    match boundary_image_hit(f, y) {
        Some(b) => Err(Error::OnBoundaryImage {
            point: y.to_vec(),
            face: f.domain().face(b).simplex.clone(),
        }),
        None => Ok(()),
    }
}

fn path_evidence(f: &PLMap, y0: &[Rational], y1: &[Rational]) -> PathEvidence {
    let obstacles: Vec<ObstacleOutcome> = f
        .boundary_images()
        .into_iter()
        .map(|(face, pts)| ObstacleOutcome {
            face: f.domain().face(face).simplex.clone(),
            hit: segment_hits(y0, y1, &[pts]).is_some(),
        })
        .collect();
    PathEvidence {
        avoids_boundary_image: obstacles.iter().all(|o| !o.hit),
        obstacles,
    }
}

fn signed_count(f: &PLMap, y: &[Rational]) -> Result<(i64, Vec<(Vector, Sign)>)> {
    let points = match f.fiber(y)? {
        Fiber::Finite(points) => points,
        Fiber::Infinite { cell, .. } => {
            return Err(Error::InfiniteFiber {
                point: y.to_vec(),
                cell,
            })
        }
    };
    let fiber: Vec<(Vector, Sign)> = points
        .into_iter()
        .map(|p| {
            let sign = p.sign().expect("regular fiber points lie in open cells");
            (p.point, sign)
        })
        .collect();
    let degree = fiber.iter().map(|(_, s)| s.as_i32() as i64).sum();
    Ok((degree, fiber))
}

/// Sum of Jacobian signs over `f⁻¹(y)` at a regular value off `f(∂Ω)`.
pub fn degree_at_regular(f: &PLMap, y: &[Rational]) -> Result<DegreeCertificate> {
    ensure_off_boundary(f, y)?;
    if let Some(why) = regularity(f, y) {
        return Err(Error::NotRegular {
            point: y.to_vec(),
            reason: format!("{why}; use degree() to perturb"),
        });
    }
    let (degree, fiber) = signed_count(f, y)?;
    Ok(DegreeCertificate {
        degree,
        query_point: y.to_vec(),
        regular_point: y.to_vec(),
        fiber,
        path_evidence: path_evidence(f, y, y),
    })
}

const MAX_ATTEMPTS: usize = 64;

/// Axis directions, then sign patterns over `(1, m, m², ...)` scaled to
/// unit max-norm, for `m = 2, 3, 4`. The skewed entries keep the list off
/// the 45° lines, along which symmetric instances tend to place their edge
/// images.
pub fn perturbation_directions(n: usize) -> Vec<Vector> {
    let mut dirs: Vec<Vector> = Vec::new();
    for i in 0..n {
        for s in [1, -1] {
            let mut d = vec![Rational::zero(); n];
            d[i] = rat(s);
            dirs.push(d);
        }
    }
    for m in 2..=4i64 {
        for mask in 0..(1u32 << n) {
            let d: Vector = (0..n)
                .map(|j| {
                    let s = if mask >> j & 1 == 1 { -1 } else { 1 };
                    Rational::new((s * m.pow(j as u32)).into(), m.pow(n as u32 - 1).into())
                })
                .collect();
            if !dirs.contains(&d) {
                dirs.push(d);
            }
        }
    }
    dirs
}

fn initial_step(f: &PLMap) -> Rational {
    let bbox = BoundingBox::of(f.images());
    let extent = bbox
        .lo
        .iter()
        .zip(&bbox.hi)
        .map(|(l, h)| h - l)
        .max()
        .unwrap_or_else(Rational::zero);
    if extent.is_positive() {
        extent / rat(4)
    } else {
        Rational::one()
    }
}

/// Degree at any `y ∉ f(∂Ω)`. Irregular `y` is moved to a nearby regular
/// `y′` such that `[y, y′]` misses `f(∂Ω)`; the straight-line homotopy then
/// keeps the degree unchanged.
pub fn degree(f: &PLMap, y: &[Rational]) -> Result<DegreeCertificate> {
    ensure_off_boundary(f, y)?;
    if is_regular_value(f, y) {
        return degree_at_regular(f, y);
    }
    let dirs = perturbation_directions(f.dim());
    let obstacles: Vec<Vec<Vector>> = f.boundary_images().into_iter().map(|(_, p)| p).collect();
    let mut eps = initial_step(f);
    let mut attempts = Vec::new();
    while attempts.len() < MAX_ATTEMPTS {
        for d in &dirs {
            if attempts.len() >= MAX_ATTEMPTS {
                break;
            }
            let candidate: Vector = y.iter().zip(d).map(|(yi, di)| yi + &eps * di).collect();
            attempts.push(candidate.clone());
            if !is_regular_value(f, &candidate) || segment_hits(y, &candidate, &obstacles).is_some() {
                continue;
            }
            let (degree, fiber) = signed_count(f, &candidate)?;
            return Ok(DegreeCertificate {
                degree,
                query_point: y.to_vec(),
                path_evidence: path_evidence(f, y, &candidate),
                regular_point: candidate,
                fiber,
            });
        }
        eps /= rat(2);
    }
    Err(Error::NoRegularValue {
        point: y.to_vec(),
        attempts,
    })
}

/// The star of the carrier face of `x`, scaled by `s` toward `x`, with the
/// restricted map.
fn scaled_star(f: &PLMap, x: &[Rational], cells: &[CellId], s: &Rational) -> Result<PLMap> {
    let k = f.domain();
    let fx = f.eval(x).expect("x lies in the support");
    let mut ids: Vec<usize> = cells.iter().flat_map(|&c| k.cell(c).vertices().to_vec()).collect();
    ids.sort_unstable();
    ids.dedup();
    let shrink = |p: &[Rational], q: &[Rational]| -> Vector { lerp(q, p, s) };
    let vertices: Vec<Vector> = ids.iter().map(|&v| shrink(k.vertex(v), x)).collect();
    let images: Vec<Vector> = ids.iter().map(|&v| shrink(f.image(v), &fx)).collect();
    let local_cells: Vec<Vec<usize>> = cells
        .iter()
        .map(|&c| {
            k.cell(c)
                .vertices()
                .iter()
                .map(|v| ids.binary_search(v).expect("star vertex"))
                .collect()
        })
        .collect();
    let sub = SimplicialComplex::validate(f.dim(), vertices, local_cells)
        .expect("a homothetic copy of a star is a valid complex");
    PLMap::build(sub, images)
}

/// Degree of `f` on a small neighbourhood of `x` whose closure meets
/// `f⁻¹(f(x))` only at `x`.
pub fn local_degree(f: &PLMap, x: &[Rational]) -> Result<i64> {
    f.check_point(x)?;
    let k = f.domain();
    let carrier = match k.carrier(x) {
        Some(face) if !k.face(face).on_boundary => face,
        _ => return Err(Error::NotInterior { point: x.to_vec() }),
    };
    let fx = f.eval(x).expect("x lies in the support");
    let others: Vec<Vector> = match f.fiber(&fx)? {
        Fiber::Finite(points) => points
            .into_iter()
            .map(|p| p.point)
            .filter(|p| p.as_slice() != x)
            .collect(),
        Fiber::Infinite { cell, .. } => return Err(Error::InfiniteFiber { point: fx, cell }),
    };
    let star = k.face(carrier).cells.clone();
    let mut s = Rational::new(1.into(), 2.into());
    // p lies in x + s(σ - x) iff x + (p - x)/s lies in σ
    let isolated = |s: &Rational| {
        others.iter().all(|p| {
            let q = lerp(x, p, &(Rational::one() / s));
            star.iter().all(|&c| !k.cell_contains(c, &q))
        })
    };
    while !isolated(&s) {
        s /= rat(2);
    }
    let local = scaled_star(f, x, &star, &s)?;
    Ok(degree(&local, &fx)?.degree)
}

/// Degrees of `H(·, t) = (1-t) f + t g` at `γ(t)` for sampled `t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomotopyVerdict {
    pub constant: bool,
    pub degrees: Vec<(Rational, i64)>,
}

impl HomotopyVerdict {
    pub const NOTE: &'static str =
        "sampled certificate: degrees agree at the listed t values only, not proven for all t";
}

/// `n` evenly spaced samples `0, 1/(n-1), ..., 1`.
pub fn uniform_samples(n: usize) -> Vec<Rational> {
    match n {
        0 => Vec::new(),
        1 => vec![Rational::zero()],
        _ => (0..n).map(|i| Rational::new(i.into(), (n - 1).into())).collect(),
    }
}

pub fn homotopy_degree_constant(
    f: &PLMap,
    g: &PLMap,
    gamma: (&[Rational], &[Rational]),
    t_samples: &[Rational],
) -> Result<HomotopyVerdict> {
    if f.domain().vertices() != g.domain().vertices() || f.domain().cells() != g.domain().cells() {
        return Err(Error::DomainMismatch);
    }
    f.check_point(gamma.0)?;
    f.check_point(gamma.1)?;
    let mut degrees = Vec::with_capacity(t_samples.len());
    for t in t_samples {
        let images: Vec<Vector> = f
            .images()
            .iter()
            .zip(g.images())
            .map(|(a, b)| lerp(a, b, t))
            .collect();
        let h = f.with_images(images)?;
        let y = lerp(gamma.0, gamma.1, t);
        if let Some(face) = boundary_image_hit(&h, &y) {
            return Err(Error::HomotopyHypothesis {
                t: t.clone(),
                face: h.domain().face(face).simplex.clone(),
            });
        }
        degrees.push((t.clone(), degree(&h, &y)?.degree));
    }
    let constant = degrees.windows(2).all(|w| w[0].1 == w[1].1);
    Ok(HomotopyVerdict { constant, degrees })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ratio;

    fn pts(raw: &[&[i64]]) -> Vec<Vector> {
        raw.iter().map(|p| p.iter().map(|&v| rat(v)).collect()).collect()
    }

    fn fold() -> PLMap {
        let k = SimplicialComplex::validate(1, pts(&[&[-1], &[0], &[1]]), vec![vec![0, 1], vec![1, 2]])
            .unwrap();
        PLMap::build(k, pts(&[&[1], &[0], &[1]])).unwrap()
    }

    fn square_identity() -> PLMap {
        let v = pts(&[&[0, 0], &[2, 0], &[2, 2], &[0, 2]]);
        let k = SimplicialComplex::validate(2, v.clone(), vec![vec![0, 1, 2], vec![0, 2, 3]]).unwrap();
        PLMap::build(k, v).unwrap()
    }

    #[test]
    fn regularity_examples() {
        let id = square_identity();
        let bary = id.domain().barycenter_of(id.domain().cell(0));
        assert!(is_regular_value(&id, &bary));
        // on the diagonal image
        assert_eq!(
            regularity(&id, &[rat(1), rat(1)]),
            Some(Irregularity::SkeletonImage {
                face: Simplex::new(vec![0, 2])
            })
        );
        assert!(!is_regular_value(&fold(), &[rat(0)]));
    }

    #[test]
    fn degree_examples() {
        let id = square_identity();
        let c = degree_at_regular(&id, &[ratio(3, 2), ratio(1, 2)]).unwrap();
        assert_eq!(c.degree, 1);
        assert_eq!(c.fiber, vec![(vec![ratio(3, 2), ratio(1, 2)], Sign::Positive)]);
        assert!(c.path_evidence.avoids_boundary_image);

        let c = degree_at_regular(&fold(), &[ratio(1, 2)]).unwrap();
        assert_eq!(c.degree, 0);
        assert_eq!(
            c.fiber,
            vec![(vec![ratio(-1, 2)], Sign::Negative), (vec![ratio(1, 2)], Sign::Positive)]
        );

        let c = degree(&id, &[rat(1), rat(1)]).unwrap();
        assert_eq!(c.degree, 1);
        assert!(c.perturbed());

        let c = degree(&fold(), &[rat(0)]).unwrap();
        assert_eq!(c.degree, 0);
        assert!(c.perturbed());
    }

    #[test]
    fn degree_errors() {
        let id = square_identity();
        assert!(matches!(degree(&id, &[rat(0), rat(1)]), Err(Error::OnBoundaryImage { .. })));
        assert!(matches!(
            degree_at_regular(&id, &[rat(1), rat(1)]),
            Err(Error::NotRegular { .. })
        ));
        assert!(matches!(degree(&fold(), &[rat(1)]), Err(Error::OnBoundaryImage { .. })));
    }

    #[test]
    fn local_degrees() {
        let id = square_identity();
        assert_eq!(local_degree(&id, &[rat(1), rat(1)]).unwrap(), 1);
        assert_eq!(local_degree(&id, &[ratio(1, 3), ratio(1, 7)]).unwrap(), 1);
        assert_eq!(local_degree(&fold(), &[rat(0)]).unwrap(), 0);
        assert_eq!(local_degree(&fold(), &[ratio(1, 2)]).unwrap(), 1);
        assert_eq!(local_degree(&fold(), &[ratio(-1, 2)]).unwrap(), -1);
        assert!(matches!(local_degree(&id, &[rat(0), rat(1)]), Err(Error::NotInterior { .. })));
    }

    #[test]
    fn homotopy_identity_to_identity() {
        let id = square_identity();
        let y = vec![ratio(3, 2), ratio(1, 2)];
        let v = homotopy_degree_constant(&id, &id, (&y, &y), &uniform_samples(5)).unwrap();
        assert!(v.constant);
        assert!(v.degrees.iter().all(|(_, d)| *d == 1));
    }

    #[test]
    fn direction_list_is_duplicate_free() {
        let d = perturbation_directions(2);
        assert_eq!(d.len(), 4 + 3 * 4);
        assert_eq!(perturbation_directions(1).len(), 2);
    }
}
