//! Piecewise-affine maps on simplicial complexes.
//!
//! A [`PLMap`] is stored in vertex-image form: one image point per domain
//! vertex. The affine piece `x ↦ A x + b` of every cell is derived from the
//! images of its vertices, so continuity across shared faces holds by
//! construction.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{sub, Matrix, Rational, Sign, Solution, Vector};
use crate::polyhedra::polytope::{analyze, combine};
use crate::polyhedra::{
    CellId, FaceId, LinearSystem, Location, Simplex, SimplicialComplex, UnionFind, VertexId,
    Violation,
};

/// The affine data `(A, b)` of one cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Piece {
    pub matrix: Matrix,
    pub offset: Vector,
    pub det_sign: Sign,
    inverse: Option<Matrix>,
}

impl Piece {
    pub fn apply(&self, x: &[Rational]) -> Vector {
        let ax = self.matrix.mul_vec(x).expect("ambient dimension");
        crate::linalg::add(&ax, &self.offset)
    }

    pub fn is_singular(&self) -> bool {
        self.det_sign.is_zero()
    }

    /// `A⁻¹`, when the piece is nonsingular.
    pub fn inverse(&self) -> Option<&Matrix> {
        self.inverse.as_ref()
    }

    fn same_affine_map(&self, other: &Piece) -> bool {
        self.matrix == other.matrix && self.offset == other.offset
    }
}

/// Problems found when ingesting piece triples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MapViolation {
    Complex(Violation),
    PieceShape { cell: CellId, reason: String },
    Discontinuous {
        face: Simplex,
        first: CellId,
        second: CellId,
    },
}

impl fmt::Display for MapViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MapViolation::Complex(v) => v.fmt(f),
            MapViolation::PieceShape { cell, reason } => write!(f, "piece of cell {cell}: {reason}"),
            MapViolation::Discontinuous { face, first, second } => write!(
                f,
                "discontinuous across face {face} between cells {first} and {second}"
            ),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SignClass {
    AllPositive,
    AllNegative,
    Mixed,
    NonNegativeWithZeros,
    NonPositiveWithZeros,
    AllZero,
}

impl fmt::Display for SignClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SignClass::AllPositive => "AllPositive",
            SignClass::AllNegative => "AllNegative",
            SignClass::Mixed => "Mixed",
            SignClass::NonNegativeWithZeros => "NonNegativeWithZeros",
            SignClass::NonPositiveWithZeros => "NonPositiveWithZeros",
            SignClass::AllZero => "AllZero",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignProfile {
    pub num_pos: usize,
    pub num_neg: usize,
    pub num_zero: usize,
    pub classification: SignClass,
}

impl SignProfile {
    pub fn from_signs(signs: impl IntoIterator<Item = Sign>) -> Self {
        let (mut p, mut n, mut z) = (0, 0, 0);
        for s in signs {
            match s {
                Sign::Positive => p += 1,
                Sign::Negative => n += 1,
                Sign::Zero => z += 1,
            }
        }
        let classification = match (p > 0, n > 0, z > 0) {
            (true, true, _) => SignClass::Mixed,
            (true, false, false) => SignClass::AllPositive,
            (false, true, false) => SignClass::AllNegative,
            (true, false, true) => SignClass::NonNegativeWithZeros,
            (false, true, true) => SignClass::NonPositiveWithZeros,
            (false, false, _) => SignClass::AllZero,
        };
        SignProfile {
            num_pos: p,
            num_neg: n,
            num_zero: z,
            classification,
        }
    }

    /// Some two points carry strictly opposite signs.
    pub fn changes_sign(&self) -> bool {
        self.classification == SignClass::Mixed
    }
}

/// A preimage point together with every cell containing it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberPoint {
    pub point: Vector,
    pub cells: Vec<(CellId, Sign)>,
}

impl FiberPoint {
    /// The local Jacobian sign, when all incident cells agree on it.
    pub fn sign(&self) -> Option<Sign> {
        let first = self.cells[0].1;
        self.cells.iter().all(|(_, s)| *s == first).then_some(first)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Fiber {
    Finite(Vec<FiberPoint>),
    /// Two distinct preimages inside one collapsed cell; the segment between
    /// them maps to the query point.
    Infinite { cell: CellId, segment: [Vector; 2] },
}

impl Fiber {
    pub fn points(&self) -> Option<&[FiberPoint]> {
        match self {
            Fiber::Finite(p) => Some(p),
            Fiber::Infinite { .. } => None,
        }
    }
}

/// Graph whose nodes are the connected components of the set where the map
/// is locally affine with nonzero Jacobian.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentGraph {
    /// Component per cell; `None` for singular cells.
    pub component_of: Vec<Option<usize>>,
    pub components: Vec<Vec<CellId>>,
    /// Sorted pairs `(i, j)` with `i < j`.
    pub edges: Vec<(usize, usize)>,
}

impl ComponentGraph {
    pub fn num_nodes(&self) -> usize {
        self.components.len()
    }

    pub fn is_connected(&self) -> bool {
        if self.components.len() <= 1 {
            return true;
        }
        let mut uf = UnionFind::new(self.components.len());
        for &(a, b) in &self.edges {
            uf.union(a, b);
        }
        uf.labels().iter().all(|&l| l == 0)
    }
}

#[derive(Debug, Clone)]
pub struct PLMap {
    domain: SimplicialComplex,
    images: Vec<Vector>,
    pieces: Vec<Piece>,
}

impl PLMap {
    /// Derives the affine piece of every cell from the vertex images.
    pub fn build(domain: SimplicialComplex, images: Vec<Vector>) -> Result<Self> {
        let n = domain.dim();
        if images.len() != domain.vertices().len() {
            return Err(Error::ImageCount {
                expected: domain.vertices().len(),
                found: images.len(),
            });
        }
        if let Some((v, img)) = images.iter().enumerate().find(|(_, p)| p.len() != n) {
            return Err(Error::ImageDimension {
                vertex: v,
                expected: n,
                found: img.len(),
            });
        }
        let pieces = domain
            .cells()
            .iter()
            .map(|cell| derive_piece(&domain, &images, cell))
            .collect::<Result<Vec<_>>>()?;
        Ok(PLMap {
            domain,
            images,
            pieces,
        })
    }

    /// Accepts one `(A_i, b_i)` per cell, checks that neighbouring pieces
    /// agree on shared vertices and converts to vertex-image form.
    pub fn from_pieces(
        ambient_dim: usize,
        vertices: Vec<Vector>,
        cells: Vec<Vec<VertexId>>,
        pieces: Vec<(Matrix, Vector)>,
    ) -> std::result::Result<Self, Vec<MapViolation>> {
        let n = ambient_dim;
        let mut violations = Vec::new();
        if pieces.len() != cells.len() {
            violations.push(MapViolation::PieceShape {
                cell: pieces.len().min(cells.len()),
                reason: format!("{} pieces for {} cells", pieces.len(), cells.len()),
            });
        }
        for (c, (a, b)) in pieces.iter().enumerate() {
            if a.rows() != n || a.cols() != n || b.len() != n {
                violations.push(MapViolation::PieceShape {
                    cell: c,
                    reason: format!("expected {n}x{n} matrix and length-{n} offset"),
                });
            }
        }
        let domain = match SimplicialComplex::validate(n, vertices, cells) {
            Ok(d) => d,
            Err(vs) => {
                violations.extend(vs.into_iter().map(MapViolation::Complex));
                return Err(violations);
            }
        };
        if !violations.is_empty() {
            return Err(violations);
        }
        // image of each vertex as seen from each incident cell
        let mut seen: Vec<Vec<(CellId, Vector)>> = vec![Vec::new(); domain.vertices().len()];
        for (c, cell) in domain.cells().iter().enumerate() {
            let (a, b) = &pieces[c];
            for &v in cell.vertices() {
                let img = crate::linalg::add(&a.mul_vec(domain.vertex(v)).expect("checked"), b);
                seen[v].push((c, img));
            }
        }
        let mut conflicts: BTreeMap<(CellId, CellId), ()> = BTreeMap::new();
        for per_vertex in &seen {
            for (i, (ci, yi)) in per_vertex.iter().enumerate() {
                for (cj, yj) in &per_vertex[i + 1..] {
                    if yi != yj {
                        conflicts.insert(((*ci).min(*cj), (*ci).max(*cj)), ());
                    }
                }
            }
        }
        for (first, second) in conflicts.into_keys() {
            violations.push(MapViolation::Discontinuous {
                face: domain.cell(first).intersection(domain.cell(second)),
                first,
                second,
            });
        }
        if !violations.is_empty() {
            return Err(violations);
        }
        let images = seen
            .into_iter()
            .map(|per_vertex| per_vertex.into_iter().next().map(|(_, y)| y).expect("vertex in a cell"))
            .collect();
        PLMap::build(domain, images).map_err(|e| {
            vec![MapViolation::PieceShape {
                cell: 0,
                reason: e.to_string(),
            }]
        })
    }

    /// The `(cell, A_i, b_i)` triples of this map.
    pub fn export_pieces(&self) -> Vec<(Simplex, Matrix, Vector)> {
        self.domain
            .cells()
            .iter()
            .zip(&self.pieces)
            .map(|(c, p)| (c.clone(), p.matrix.clone(), p.offset.clone()))
            .collect()
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn domain(&self) -> &SimplicialComplex {
        &self.domain
    }

    pub fn images(&self) -> &[Vector] {
        &self.images
    }

    pub fn image(&self, v: VertexId) -> &Vector {
        &self.images[v]
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn piece(&self, c: CellId) -> &Piece {
        &self.pieces[c]
    }

    /// Images of the vertices of `s`, in sorted vertex order.
    pub fn image_points(&self, s: &Simplex) -> Vec<Vector> {
        s.vertices().iter().map(|&v| self.images[v].clone()).collect()
    }

    /// Images of every boundary (n-1)-face, paired with the face.
    pub fn boundary_images(&self) -> Vec<(FaceId, Vec<Vector>)> {
        self.domain
            .boundary_faces()
            .iter()
            .map(|&f| (f, self.image_points(&self.domain.face(f).simplex)))
            .collect()
    }

    pub(crate) fn check_point(&self, p: &[Rational]) -> Result<()> {
        if p.len() != self.dim() {
            return Err(Error::PointDimension {
                expected: self.dim(),
                found: p.len(),
            });
        }
        Ok(())
    }

    /// `f(x)`, or `None` outside the support.
    pub fn eval(&self, x: &[Rational]) -> Option<Vector> {
        let cell = match self.domain.locate(x) {
            Location::Interior(c) => c,
            Location::OnFace(f) => self.domain.face(f).cells[0],
            Location::Outside => return None,
        };
        Some(self.pieces[cell].apply(x))
    }

    /// Same complex, new vertex images.
    pub fn with_images(&self, images: Vec<Vector>) -> Result<PLMap> {
        PLMap::build(self.domain.clone(), images)
    }

    /// Jacobian sign counts over the cells.
    pub fn sign_profile(&self) -> SignProfile {
        SignProfile::from_signs(self.pieces.iter().map(|p| p.det_sign))
    }

    /// Interior (n-1)-faces across which the two incident pieces coincide;
    /// the map is differentiable on their relative interiors.
    pub fn smooth_facets(&self) -> impl Iterator<Item = (FaceId, CellId, CellId)> + '_ {
        self.domain
            .interior_facets()
            .filter(|&(_, a, b)| self.pieces[a].same_affine_map(&self.pieces[b]))
    }

    /// Every fiber is finite iff every piece is nonsingular: a singular piece
    /// squeezes its n-cell onto a lower-dimensional set, so some fiber meets
    /// that cell in a segment, while a nonsingular piece contributes at most
    /// one preimage per cell.
    pub fn finite_fibers(&self) -> bool {
        self.pieces.iter().all(|p| !p.is_singular())
    }

    /// `f⁻¹(y)`.
    pub fn fiber(&self, y: &[Rational]) -> Result<Fiber> {
        self.check_point(y)?;
        let mut found: BTreeMap<Vector, Vec<(CellId, Sign)>> = BTreeMap::new();
        for (c, piece) in self.pieces.iter().enumerate() {
            match &piece.inverse {
                Some(inv) => {
                    let x = inv
                        .mul_vec(&sub(y, &piece.offset))
                        .expect("ambient dimension");
                    if self.domain.cell_contains(c, &x) {
                        found.entry(x).or_default().push((c, piece.det_sign));
                    }
                }
                None => match self.singular_cell_preimage(c, y) {
                    SingularPreimage::Empty => {}
                    SingularPreimage::Point(x) => {
                        found.entry(x).or_default().push((c, Sign::Zero));
                    }
                    SingularPreimage::Segment(a, b) => {
                        return Ok(Fiber::Infinite {
                            cell: c,
                            segment: [a, b],
                        })
                    }
                },
            }
        }
        Ok(Fiber::Finite(
            found
                .into_iter()
                .map(|(point, cells)| FiberPoint { point, cells })
                .collect(),
        ))
    }

    /// `{x ∈ cell : f(x) = y}` for a collapsed cell, summarised.
    fn singular_cell_preimage(&self, c: CellId, y: &[Rational]) -> SingularPreimage {
        let cell = self.domain.cell(c);
        let k = cell.len();
        let domain_pts = self.domain.points_of(cell);
        let image_pts = self.image_points(cell);
        let mut sys = LinearSystem::new(k);
        let mut sum = vec![Rational::zero(); k];
        for (j, s) in sum.iter_mut().enumerate() {
            sys.nonneg(j);
            *s = Rational::from_integer(1.into());
        }
        sys.add_eq(sum, Rational::from_integer(1.into()));
        for (axis, target) in y.iter().enumerate() {
            sys.add_eq(image_pts.iter().map(|p| p[axis].clone()).collect(), target.clone());
        }
        let Some(info) = analyze(&sys) else {
            return SingularPreimage::Empty;
        };
        let lambda = info.relative_interior;
        let x0 = combine(&domain_pts, &lambda);
        // a direction of the preimage polytope that moves the domain point
        let moving = info.directions.iter().find(|d| {
            combine(&domain_pts, d).iter().any(|v| !v.is_zero())
        });
        let Some(d) = moving else {
            return SingularPreimage::Point(x0);
        };
        // step to the boundary of the weight simplex along d
        let step = lambda
            .iter()
            .zip(d)
            .filter(|(_, di)| di.is_negative())
            .map(|(li, di)| li / -di)
            .min()
            .expect("directions sum to zero, so some entry is negative");
        let lambda1: Vector = lambda.iter().zip(d).map(|(l, di)| l + di * &step).collect();
        SingularPreimage::Segment(x0, combine(&domain_pts, &lambda1))
    }

    /// Components of the nonsingular open cells glued across interior
    /// (n-1)-faces where the incident pieces coincide (the map is affine
    /// across such faces). Two components are adjacent when their closures
    /// share an interior (n-1)-face.
    pub fn component_graph(&self) -> ComponentGraph {
        let nc = self.domain.num_cells();
        let mut uf = UnionFind::new(nc);
        for (_, a, b) in self.smooth_facets() {
            if !self.pieces[a].is_singular() {
                uf.union(a, b);
            }
        }
        let roots: Vec<usize> = (0..nc).map(|c| uf.find(c)).collect();
        let mut label_of_root: BTreeMap<usize, usize> = BTreeMap::new();
        let mut component_of = vec![None; nc];
        let mut components: Vec<Vec<CellId>> = Vec::new();
        for c in 0..nc {
            if self.pieces[c].is_singular() {
                continue;
            }
            let next = components.len();
            let label = *label_of_root.entry(roots[c]).or_insert(next);
            if label == components.len() {
                components.push(Vec::new());
            }
            components[label].push(c);
            component_of[c] = Some(label);
        }
        let mut edges: Vec<(usize, usize)> = self
            .domain
            .interior_facets()
            .filter_map(|(_, a, b)| match (component_of[a], component_of[b]) {
                (Some(i), Some(j)) if i != j => Some((i.min(j), i.max(j))),
                _ => None,
            })
            .collect();
        edges.sort_unstable();
        edges.dedup();
        ComponentGraph {
            component_of,
            components,
            edges,
        }
    }

    /// `dim f(X)` for a union of faces `X`; `None` when `X` is empty.
    pub fn image_dimension(&self, faces: &[FaceId]) -> Option<usize> {
        faces
            .iter()
            .map(|&f| {
                let face = self.domain.face(f);
                let cell = face.cells[0];
                let verts = face.simplex.vertices();
                if verts.len() == 1 {
                    return 0;
                }
                let origin = self.domain.vertex(verts[0]);
                let dirs: Vec<Vector> = verts[1..]
                    .iter()
                    .map(|&v| sub(self.domain.vertex(v), origin))
                    .collect();
                self.pieces[cell]
                    .matrix
                    .mul_mat(&Matrix::from_columns(&dirs))
                    .expect("ambient dimension")
                    .rank()
            })
            .max()
    }
}

enum SingularPreimage {
    Empty,
    Point(Vector),
    Segment(Vector, Vector),
}

/// Solves `A (v_k - v_0) = w_k - w_0` for the linear part and sets
/// `b = w_0 - A v_0`.
fn derive_piece(domain: &SimplicialComplex, images: &[Vector], cell: &Simplex) -> Result<Piece> {
    let verts = cell.vertices();
    let v0 = domain.vertex(verts[0]);
    let w0 = &images[verts[0]];
    let edges: Vec<Vector> = verts[1..].iter().map(|&v| sub(domain.vertex(v), v0)).collect();
    let image_edges: Vec<Vector> = verts[1..].iter().map(|&v| sub(&images[v], w0)).collect();
    let edge_inv = Matrix::from_columns(&edges)
        .inverse()?
        .expect("validated cells are nondegenerate");
    let matrix = Matrix::from_columns(&image_edges).mul_mat(&edge_inv)?;
    let offset = sub(w0, &matrix.mul_vec(v0)?);
    let det_sign = matrix.det_sign()?;
    let inverse = if det_sign.is_zero() {
        None
    } else {
        matrix.inverse()?
    };
    Ok(Piece {
        matrix,
        offset,
        det_sign,
        inverse,
    })
}

impl Piece {
    /// Solves `A x = y - b`.
    pub fn preimage(&self, y: &[Rational]) -> Solution {
        self.matrix
            .solve_square(&sub(y, &self.offset))
            .expect("ambient dimension")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{rat, ratio};

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
    fn identity_pieces() {
        let f = square_identity();
        for p in f.pieces() {
            assert_eq!(p.matrix, Matrix::identity(2));
            assert!(p.offset.iter().all(Zero::is_zero));
            assert_eq!(p.det_sign, Sign::Positive);
        }
        assert_eq!(f.sign_profile().classification, SignClass::AllPositive);
        assert!(f.finite_fibers());
    }

    #[test]
    fn fold_pieces_and_profile() {
        let f = fold();
        assert_eq!(f.piece(0).matrix, Matrix::from_i64(&[&[-1]]));
        assert_eq!(f.piece(1).matrix, Matrix::from_i64(&[&[1]]));
        let p = f.sign_profile();
        assert_eq!((p.num_pos, p.num_neg, p.num_zero), (1, 1, 0));
        assert!(p.changes_sign());
        assert!(f.finite_fibers());
    }

    #[test]
    fn doubling_one_image_scales_one_det() {
        // triangle (0,0),(1,0),(0,1) next to (1,0),(1,1),(0,1); move the image
        // of vertex 0 (only in the first cell) to twice its distance from the
        // opposite edge.
        let v = pts(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]);
        let k = SimplicialComplex::validate(2, v.clone(), vec![vec![0, 1, 2], vec![1, 2, 3]]).unwrap();
        let f = PLMap::build(k.clone(), v.clone()).unwrap();
        let mut moved = v.clone();
        // opposite edge is x + y = 1; (0,0) is at signed distance -1, so go to x + y = -1
        moved[0] = vec![ratio(-1, 2), ratio(-1, 2)];
        let g = PLMap::build(k, moved).unwrap();
        assert_eq!(g.piece(0).matrix.det().unwrap(), rat(2) * f.piece(0).matrix.det().unwrap());
        assert_eq!(g.piece(1).matrix.det().unwrap(), f.piece(1).matrix.det().unwrap());
    }

    #[test]
    fn ingest_pieces_round_trip_and_conflict() {
        let v = pts(&[&[0, 0], &[1, 0], &[1, 1], &[0, 1]]);
        let cells = vec![vec![0, 1, 2], vec![0, 2, 3]];
        let id = (Matrix::identity(2), vec![rat(0), rat(0)]);
        let f = PLMap::from_pieces(2, v.clone(), cells.clone(), vec![id.clone(), id.clone()]).unwrap();
        assert_eq!(f.images(), v.as_slice());
        let shifted = (Matrix::identity(2), vec![rat(1), rat(0)]);
        let err = PLMap::from_pieces(2, v, cells, vec![id, shifted]).unwrap_err();
        assert_eq!(err.len(), 1);
        assert!(err[0].to_string().contains("discontinuous across face [0,2]"));
    }

    #[test]
    fn ingest_fold_pieces() {
        let f = PLMap::from_pieces(
            1,
            pts(&[&[-1], &[0], &[1]]),
            vec![vec![0, 1], vec![1, 2]],
            vec![
                (Matrix::from_i64(&[&[-1]]), vec![rat(0)]),
                (Matrix::from_i64(&[&[1]]), vec![rat(0)]),
            ],
        )
        .unwrap();
        assert_eq!(f.images(), pts(&[&[1], &[0], &[1]]).as_slice());
    }

    #[test]
    fn fold_fiber() {
        let f = fold();
        let Fiber::Finite(pts) = f.fiber(&[ratio(1, 2)]).unwrap() else {
            panic!("finite")
        };
        assert_eq!(pts.len(), 2);
        assert_eq!(pts[0].point, vec![ratio(-1, 2)]);
        assert_eq!(pts[0].sign(), Some(Sign::Negative));
        assert_eq!(pts[1].point, vec![ratio(1, 2)]);
        assert_eq!(pts[1].sign(), Some(Sign::Positive));
        // the breakpoint is shared by both cells and reported once
        let Fiber::Finite(zero) = f.fiber(&[rat(0)]).unwrap() else {
            panic!("finite")
        };
        assert_eq!(zero.len(), 1);
        assert_eq!(zero[0].cells.len(), 2);
        assert_eq!(zero[0].sign(), None);
    }

    #[test]
    fn identity_fiber_is_the_point() {
        let f = square_identity();
        let y = vec![ratio(1, 3), ratio(1, 5)];
        let fib = f.fiber(&y).unwrap();
        assert_eq!(fib.points().unwrap().len(), 1);
        assert_eq!(fib.points().unwrap()[0].point, y);
        assert!(f.fiber(&[rat(1)]).is_err());
    }

    #[test]
    fn collapsed_cell_fiber_is_infinite() {
        let v = pts(&[&[0, 0], &[1, 0], &[0, 1]]);
        let k = SimplicialComplex::validate(2, v, vec![vec![0, 1, 2]]).unwrap();
        // everything onto the x-axis
        let f = PLMap::build(k, pts(&[&[0, 0], &[1, 0], &[0, 0]])).unwrap();
        assert!(!f.finite_fibers());
        let y = vec![ratio(1, 4), rat(0)];
        match f.fiber(&y).unwrap() {
            Fiber::Infinite { cell, segment } => {
                assert_eq!(cell, 0);
                assert_ne!(segment[0], segment[1]);
                for p in &segment {
                    assert_eq!(f.eval(p).unwrap(), y);
                }
            }
            other => panic!("{other:?}"),
        }
        // the far end of the collapsed image has a single preimage
        let Fiber::Finite(end) = f.fiber(&[rat(1), rat(0)]).unwrap() else {
            panic!("finite")
        };
        assert_eq!(end.len(), 1);
        assert_eq!(end[0].point, vec![rat(1), rat(0)]);
    }

    #[test]
    fn component_graphs() {
        let g = square_identity().component_graph();
        assert_eq!(g.num_nodes(), 1);
        assert!(g.is_connected());
        let g = fold().component_graph();
        assert_eq!(g.num_nodes(), 2);
        assert_eq!(g.edges, vec![(0, 1)]);
        assert!(g.is_connected());
    }

    #[test]
    fn image_dimensions() {
        let f = square_identity();
        let edge = f.domain().face_id(&Simplex::new(vec![0, 1])).unwrap();
        assert_eq!(f.image_dimension(&[edge]), Some(1));
        assert_eq!(f.image_dimension(&[]), None);
        let v = pts(&[&[0, 0], &[1, 0], &[0, 1]]);
        let k = SimplicialComplex::validate(2, v, vec![vec![0, 1, 2]]).unwrap();
        let rank1 = PLMap::build(k, pts(&[&[0, 0], &[1, 1], &[2, 2]])).unwrap();
        let cell = rank1.domain().cell_face(0);
        assert_eq!(rank1.image_dimension(&[cell]), Some(1));
    }

    #[test]
    fn build_rejects_bad_images() {
        let v = pts(&[&[0], &[1]]);
        let k = SimplicialComplex::validate(1, v, vec![vec![0, 1]]).unwrap();
        assert!(matches!(
            PLMap::build(k.clone(), pts(&[&[0]])),
            Err(Error::ImageCount { expected: 2, found: 1 })
        ));
        assert!(matches!(
            PLMap::build(k, pts(&[&[0], &[1, 2]])),
            Err(Error::ImageDimension { vertex: 1, .. })
        ));
    }
}
