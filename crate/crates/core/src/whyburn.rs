//! Certifier for PL maps of balls: an open map that is injective on the
//! boundary sphere and pulls the boundary image back to the boundary is a
//! homeomorphism. Every stage is an exact check, including the conclusion.

use std::collections::BTreeMap;
use std::fmt;

use crate::degree::{degree, DegreeCertificate};
use crate::error::{Error, Result};
use crate::linalg::{Sign, Vector};
use crate::plmap::PLMap;
use crate::polyhedra::polytope::hull_dim;
use crate::polyhedra::{
    overlap_outside_shared, relint_meets_hull, BoundingBox, CellId, FaceId, Simplex, UnionFind,
};

/// A PL map whose domain passes the combinatorial ball checks.
#[derive(Debug, Clone)]
pub struct BallMapInstance {
    map: PLMap,
}

impl BallMapInstance {
    /// Checks that the support looks like a closed ball: connected through
    /// (n-1)-faces, Euler characteristic 1, and a boundary that is a single
    /// closed pseudomanifold (two boundary vertices when n = 1).
    pub fn new(map: PLMap) -> Result<Self> {
        let k = map.domain();
        let n = k.dim();
        if !k.is_strongly_connected() {
            return Err(Error::NotABall("support is not connected".into()));
        }
        let euler: i64 = k
            .faces()
            .iter()
            .map(|f| if f.simplex.len() % 2 == 1 { 1 } else { -1 })
            .sum();
        if euler != 1 {
            return Err(Error::NotABall(format!("Euler characteristic {euler}, expected 1")));
        }
        let boundary = k.boundary_faces();
        if n == 1 {
            if boundary.len() != 2 {
                return Err(Error::NotABall(format!(
                    "{} boundary vertices, expected 2",
                    boundary.len()
                )));
            }
            return Ok(BallMapInstance { map });
        }
        let mut ridges: BTreeMap<Simplex, Vec<usize>> = BTreeMap::new();
        for (i, &b) in boundary.iter().enumerate() {
            for ridge in k.face(b).simplex.facets() {
                ridges.entry(ridge).or_default().push(i);
            }
        }
        let mut uf = UnionFind::new(boundary.len());
        for (ridge, incident) in &ridges {
            if incident.len() != 2 {
                return Err(Error::NotABall(format!(
                    "boundary ridge {ridge} bounds {} boundary faces",
                    incident.len()
                )));
            }
            uf.union(incident[0], incident[1]);
        }
        if uf.labels().iter().any(|&l| l != 0) {
            return Err(Error::NotABall("boundary is disconnected".into()));
        }
        Ok(BallMapInstance { map })
    }

    pub fn map(&self) -> &PLMap {
        &self.map
    }

    pub fn into_map(self) -> PLMap {
        self.map
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// A point of the open face `face` (not on the boundary) mapping into
    /// the image of `boundary_face`.
    InteriorOnBoundary {
        face: Simplex,
        boundary_face: Simplex,
        point: Vector,
        image: Vector,
    },
    /// The images of two boundary faces meet outside the image of their
    /// common face. `first == second` flags a boundary face collapsed by `f`.
    BoundaryCollision {
        first: Simplex,
        second: Simplex,
        image: Vector,
    },
    SignMismatch { first: CellId, second: CellId },
    SingularCell { cell: CellId },
    CellCollision {
        first: CellId,
        second: CellId,
        image: Vector,
    },
    Degree { degree: i64, query: Vector },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rejection {
    pub stage: u8,
    pub reason: String,
    pub witness: Witness,
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rejected at stage {}: {}", self.stage, self.reason)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certification {
    Certified {
        degree: i64,
        certificate: DegreeCertificate,
    },
    Rejected(Rejection),
}

impl Certification {
    pub fn is_certified(&self) -> bool {
        matches!(self, Certification::Certified { .. })
    }

    pub fn rejected_stage(&self) -> Option<u8> {
        match self {
            Certification::Rejected(r) => Some(r.stage),
            Certification::Certified { .. } => None,
        }
    }
}

/// No point of the open support maps into the image of the boundary.
/// Probes every face not contained in the boundary against every boundary
/// face: the face's relative interior lies in the open support.
pub fn boundary_preimage_ok(inst: &BallMapInstance) -> std::result::Result<(), Witness> {
    let f = &inst.map;
    let k = f.domain();
    let boundary: Vec<(FaceId, Vec<Vector>, BoundingBox)> = f
        .boundary_images()
        .into_iter()
        .map(|(b, pts)| {
            let bbox = BoundingBox::of(&pts);
            (b, pts, bbox)
        })
        .collect();
    for face in k.faces() {
        if face.on_boundary {
            continue;
        }
        let image = f.image_points(&face.simplex);
        let bbox = BoundingBox::of(&image);
        for (b, pts, bb) in &boundary {
            if !bbox.intersects(bb) {
                continue;
            }
            if let Some(w) = relint_meets_hull(&image, pts) {
                return Err(Witness::InteriorOnBoundary {
                    face: face.simplex.clone(),
                    boundary_face: k.face(*b).simplex.clone(),
                    point: crate::polyhedra::polytope::combine(&k.points_of(&face.simplex), &w.weights_p),
                    image: w.point,
                });
            }
        }
    }
    Ok(())
}

fn shared_positions(p: &Simplex, q: &Simplex) -> Vec<usize> {
    p.vertices()
        .iter()
        .enumerate()
        .filter(|(_, v)| q.vertices().contains(v))
        .map(|(i, _)| i)
        .collect()
}

/// `f` restricted to the boundary is injective: each boundary face keeps
/// full dimension and two boundary faces only meet in the image of their
/// common face.
pub fn boundary_restriction_injective(inst: &BallMapInstance) -> std::result::Result<(), Witness> {
    let f = &inst.map;
    let k = f.domain();
    let n = k.dim();
    let faces: Vec<(Simplex, Vec<Vector>)> = k
        .boundary_faces()
        .iter()
        .map(|&b| {
            let s = k.face(b).simplex.clone();
            let img = f.image_points(&s);
            (s, img)
        })
        .collect();
    for (s, img) in &faces {
        if hull_dim(img) + 1 < n {
            return Err(Witness::BoundaryCollision {
                first: s.clone(),
                second: s.clone(),
                image: img[0].clone(),
            });
        }
    }
    for i in 0..faces.len() {
        for j in i + 1..faces.len() {
            let (si, pi) = &faces[i];
            let (sj, pj) = &faces[j];
            if let Some(w) = overlap_outside_shared(pi, pj, &shared_positions(si, sj)) {
                return Err(Witness::BoundaryCollision {
                    first: si.clone(),
                    second: sj.clone(),
                    image: w.point,
                });
            }
        }
    }
    Ok(())
}

fn orientation_witness(f: &PLMap) -> Option<Witness> {
    if let Some(cell) = (0..f.domain().num_cells()).find(|&c| f.piece(c).is_singular()) {
        return Some(Witness::SingularCell { cell });
    }
    let pos = (0..f.domain().num_cells()).find(|&c| f.piece(c).det_sign == Sign::Positive)?;
    let neg = (0..f.domain().num_cells()).find(|&c| f.piece(c).det_sign == Sign::Negative)?;
    Some(Witness::SignMismatch {
        first: pos.min(neg),
        second: pos.max(neg),
    })
}

/// First pair of cells (in lexicographic order) whose images meet outside
/// the image of their common face. With nonsingular pieces, no such pair
/// means `f(σ) ∩ f(τ) = f(σ ∩ τ)` for all cells, which is global injectivity.
pub fn cell_collision(f: &PLMap) -> Option<Witness> {
    let k = f.domain();
    let images: Vec<Vec<Vector>> = k.cells().iter().map(|c| f.image_points(c)).collect();
    for i in 0..k.num_cells() {
        for j in i + 1..k.num_cells() {
            let shared = shared_positions(k.cell(i), k.cell(j));
            if let Some(w) = overlap_outside_shared(&images[i], &images[j], &shared) {
                return Some(Witness::CellCollision {
                    first: i,
                    second: j,
                    image: w.point,
                });
            }
        }
    }
    None
}

/// Runs the five stages in order and stops at the first failure.
pub fn certify_ball_map(inst: &BallMapInstance) -> Result<Certification> {
    let f = &inst.map;
    let reject = |stage: u8, reason: &str, witness: Witness| {
        Ok(Certification::Rejected(Rejection {
            stage,
            reason: reason.to_string(),
            witness,
        }))
    };
    if let Err(w) = boundary_preimage_ok(inst) {
        return reject(1, "an interior point maps onto the boundary image", w);
    }
    if let Err(w) = boundary_restriction_injective(inst) {
        return reject(2, "the boundary restriction is not injective", w);
    }
    if let Some(w) = orientation_witness(f) {
        return reject(3, "the map is not open (pieces are not coherently oriented)", w);
    }
    if let Some(w) = cell_collision(f) {
        return reject(4, "two cells have overlapping images", w);
    }
    let k = f.domain();
    let y = f.eval(&k.barycenter_of(k.cell(0))).expect("in support");
    let certificate = degree(f, &y)?;
    if certificate.degree.abs() != 1 {
        return reject(
            5,
            "degree at an interior value is not ±1",
            Witness::Degree {
                degree: certificate.degree,
                query: y,
            },
        );
    }
    Ok(Certification::Certified {
        degree: certificate.degree,
        certificate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{rat, ratio};
    use crate::polyhedra::SimplicialComplex;

    fn interval(images: &[Vector]) -> BallMapInstance {
        let v: Vec<Vector> = [-1, 0, 1].iter().map(|&x| vec![rat(x)]).collect();
        let k = SimplicialComplex::validate(1, v, vec![vec![0, 1], vec![1, 2]]).unwrap();
        BallMapInstance::new(PLMap::build(k, images.to_vec()).unwrap()).unwrap()
    }

    #[test]
    fn identity_interval_certified() {
        let id: Vec<Vector> = [-1, 0, 1].iter().map(|&x| vec![rat(x)]).collect();
        let c = certify_ball_map(&interval(&id)).unwrap();
        assert!(matches!(c, Certification::Certified { degree: 1, .. }));
    }

    #[test]
    fn interval_with_interior_values_passes_stage_one() {
        let inst = interval(&[vec![rat(-1)], vec![ratio(1, 3)], vec![rat(1)]]);
        assert!(boundary_preimage_ok(&inst).is_ok());
        assert!(certify_ball_map(&inst).unwrap().is_certified());
    }

    #[test]
    fn interior_vertex_on_boundary_image() {
        let inst = interval(&[vec![rat(-1)], vec![rat(1)], vec![rat(1)]]);
        let Err(Witness::InteriorOnBoundary { face, point, .. }) = boundary_preimage_ok(&inst) else {
            panic!("expected a stage-1 witness")
        };
        assert_eq!(face, Simplex::new(vec![1]));
        assert_eq!(point, vec![rat(0)]);
    }

    #[test]
    fn fold_boundary_collision() {
        let inst = interval(&[vec![rat(1)], vec![rat(0)], vec![rat(1)]]);
        let Err(Witness::BoundaryCollision { first, second, .. }) = boundary_restriction_injective(&inst)
        else {
            panic!("expected a collision")
        };
        assert_eq!((first, second), (Simplex::new(vec![0]), Simplex::new(vec![2])));
    }

    #[test]
    fn rejects_non_balls() {
        let v: Vec<Vector> = [0, 1, 2, 3].iter().map(|&x| vec![rat(x)]).collect();
        let k = SimplicialComplex::validate(1, v.clone(), vec![vec![0, 1], vec![2, 3]]).unwrap();
        assert!(matches!(
            BallMapInstance::new(PLMap::build(k, v).unwrap()),
            Err(Error::NotABall(_))
        ));
    }
}
