use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{One, Signed, Zero};

use super::polytope::{overlap_outside_shared, BoundingBox};
use crate::linalg::{sub, Matrix, Rational, Sign, Vector};

pub type VertexId = usize;
pub type CellId = usize;
pub type FaceId = usize;

/// A simplex given by sorted, distinct vertex ids.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Simplex(Vec<VertexId>);

impl Simplex {
    /// Sorts and deduplicates the ids.
    pub fn new(mut ids: Vec<VertexId>) -> Self {
        ids.sort_unstable();
        ids.dedup();
        Simplex(ids)
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.0
    }

    /// Number of vertices minus one; the empty simplex has dimension -1.
    pub fn dim(&self) -> isize {
        self.0.len() as isize - 1
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, other: &Simplex) -> bool {
        other.0.iter().all(|v| self.0.binary_search(v).is_ok())
    }

    pub fn intersection(&self, other: &Simplex) -> Simplex {
        Simplex(
            self.0
                .iter()
                .copied()
                .filter(|v| other.0.binary_search(v).is_ok())
                .collect(),
        )
    }

    /// All nonempty faces, including the simplex itself.
    pub fn faces(&self) -> impl Iterator<Item = Simplex> + '_ {
        let k = self.0.len();
        (1u32..(1 << k)).map(move |mask| {
            Simplex(
                (0..k)
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| self.0[i])
                    .collect(),
            )
        })
    }

    /// Faces obtained by dropping exactly one vertex.
    pub fn facets(&self) -> impl Iterator<Item = Simplex> + '_ {
        (0..self.0.len()).map(move |skip| {
            Simplex(
                self.0
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != skip)
                    .map(|(_, &v)| v)
                    .collect(),
            )
        })
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}

/// An entry of the face lattice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Face {
    pub simplex: Simplex,
    /// Maximal cells containing this face, sorted.
    pub cells: Vec<CellId>,
    /// Whether the face lies in the boundary of the support.
    pub on_boundary: bool,
}

impl Face {
    pub fn dim(&self) -> isize {
        self.simplex.dim()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct CellGeometry {
    /// Edge vectors `v_k - v_0` as columns, inverted.
    inverse_edges: Matrix,
    orientation: Sign,
}

/// Why a vertex/cell list is not a valid complex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    EmptyComplex,
    WrongCoordinateCount { vertex: VertexId, expected: usize, found: usize },
    WrongCellSize { cell: CellId, expected: usize, found: usize },
    VertexOutOfRange { cell: CellId, vertex: VertexId },
    RepeatedVertexInCell { cell: CellId, vertex: VertexId },
    DuplicateVertex { first: VertexId, second: VertexId },
    DuplicateCell { first: CellId, second: CellId },
    DegenerateCell { cell: CellId },
    ImproperIntersection { first: CellId, second: CellId, witness: Vector },
    NonManifoldFace { face: Simplex, cells: Vec<CellId> },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use crate::linalg::format_rational as fr;
        match self {
            Violation::EmptyComplex => write!(f, "empty complex: no cells"),
            Violation::WrongCoordinateCount { vertex, expected, found } => write!(
                f,
                "vertex {vertex} has {found} coordinates, expected {expected}"
            ),
            Violation::WrongCellSize { cell, expected, found } => {
                write!(f, "cell {cell} has {found} vertices, expected {expected}")
            }
            Violation::VertexOutOfRange { cell, vertex } => {
                write!(f, "cell {cell} references missing vertex {vertex}")
            }
            Violation::RepeatedVertexInCell { cell, vertex } => {
                write!(f, "cell {cell} repeats vertex {vertex}")
            }
            Violation::DuplicateVertex { first, second } => write!(
                f,
                "duplicate vertex coordinates: vertices {first} and {second}"
            ),
            Violation::DuplicateCell { first, second } => {
                write!(f, "duplicate cell: cells {first} and {second}")
            }
            Violation::DegenerateCell { cell } => {
                write!(f, "degenerate cell {cell}: vertices are affinely dependent")
            }
            Violation::ImproperIntersection { first, second, witness } => {
                let w: Vec<String> = witness.iter().map(fr).collect();
                write!(
                    f,
                    "improper intersection of cells {first} and {second} at ({})",
                    w.join(", ")
                )
            }
            Violation::NonManifoldFace { face, cells } => write!(
                f,
                "non-manifold face {face} is incident to {} cells {cells:?}",
                cells.len()
            ),
        }
    }
}

/// Result of [`SimplicialComplex::locate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    Interior(CellId),
    /// The smallest face whose relative interior contains the point.
    OnFace(FaceId),
    Outside,
}

/// A validated pure n-dimensional simplicial complex in ℝⁿ with its face
/// lattice. Immutable after construction.
#[derive(Debug, Clone)]
pub struct SimplicialComplex {
    dim: usize,
    vertices: Vec<Vector>,
    cells: Vec<Simplex>,
    geometry: Vec<CellGeometry>,
    faces: Vec<Face>,
    face_index: HashMap<Simplex, FaceId>,
    boundary: Vec<FaceId>,
}

impl SimplicialComplex {
    /// Checks every complex invariant and builds the face lattice. All
    /// violations found are returned together.
    pub fn validate(
        ambient_dim: usize,
        vertices: Vec<Vector>,
        cells: Vec<Vec<VertexId>>,
    ) -> Result<Self, Vec<Violation>> {
        let n = ambient_dim;
        let mut violations = Vec::new();
        if cells.is_empty() {
            violations.push(Violation::EmptyComplex);
        }
        for (v, p) in vertices.iter().enumerate() {
            if p.len() != n {
                violations.push(Violation::WrongCoordinateCount {
                    vertex: v,
                    expected: n,
                    found: p.len(),
                });
            }
        }
        for (c, ids) in cells.iter().enumerate() {
            if ids.len() != n + 1 {
                violations.push(Violation::WrongCellSize {
                    cell: c,
                    expected: n + 1,
                    found: ids.len(),
                });
            }
            let mut seen = Vec::new();
            for &v in ids {
                if v >= vertices.len() {
                    violations.push(Violation::VertexOutOfRange { cell: c, vertex: v });
                } else if seen.contains(&v) {
                    violations.push(Violation::RepeatedVertexInCell { cell: c, vertex: v });
                }
                seen.push(v);
            }
        }
        if !violations.is_empty() {
            return Err(violations);
        }

        let mut by_coords: BTreeMap<&Vector, VertexId> = BTreeMap::new();
        for (v, p) in vertices.iter().enumerate() {
            if let Some(&first) = by_coords.get(p) {
                violations.push(Violation::DuplicateVertex { first, second: v });
            } else {
                by_coords.insert(p, v);
            }
        }

        let simplices: Vec<Simplex> = cells.into_iter().map(Simplex::new).collect();
        let mut by_simplex: HashMap<&Simplex, CellId> = HashMap::new();
        for (c, s) in simplices.iter().enumerate() {
            if let Some(&first) = by_simplex.get(s) {
                violations.push(Violation::DuplicateCell { first, second: c });
            } else {
                by_simplex.insert(s, c);
            }
        }

        let mut geometry = Vec::with_capacity(simplices.len());
        for (c, s) in simplices.iter().enumerate() {
            let origin = &vertices[s.vertices()[0]];
            let edges: Vec<Vector> = s.vertices()[1..]
                .iter()
                .map(|&v| sub(&vertices[v], origin))
                .collect();
            let m = Matrix::from_columns(&edges);
            let orientation = m.det_sign().expect("square edge matrix");
            match m.inverse().expect("square edge matrix") {
                Some(inverse_edges) => geometry.push(Some(CellGeometry {
                    inverse_edges,
                    orientation,
                })),
                None => {
                    violations.push(Violation::DegenerateCell { cell: c });
                    geometry.push(None);
                }
            }
        }

        let points = |s: &Simplex| -> Vec<Vector> {
            s.vertices().iter().map(|&v| vertices[v].clone()).collect()
        };
        let boxes: Vec<BoundingBox> = simplices.iter().map(|s| BoundingBox::of(&points(s))).collect();
        for i in 0..simplices.len() {
            if geometry[i].is_none() {
                continue;
            }
            for j in i + 1..simplices.len() {
                if geometry[j].is_none() || !boxes[i].intersects(&boxes[j]) {
                    continue;
                }
                let (a, b) = (&simplices[i], &simplices[j]);
                if a == b {
                    continue;
                }
                let shared = a.intersection(b);
                let shared_idx: Vec<usize> = a
                    .vertices()
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| shared.vertices().contains(v))
                    .map(|(k, _)| k)
                    .collect();
                // σ ∩ τ = conv(shared) iff no common point puts weight on
                // a vertex of σ outside the shared face.
                let hit = overlap_outside_shared(&points(a), &points(b), &shared_idx);
                if let Some(w) = hit {
                    violations.push(Violation::ImproperIntersection {
                        first: i,
                        second: j,
                        witness: w.point,
                    });
                }
            }
        }

        // Face lattice.
        let mut incidence: BTreeMap<Simplex, Vec<CellId>> = BTreeMap::new();
        for (c, s) in simplices.iter().enumerate() {
            for f in s.faces() {
                incidence.entry(f).or_default().push(c);
            }
        }
        for (f, cs) in &incidence {
            if f.len() == n && cs.len() > 2 {
                violations.push(Violation::NonManifoldFace {
                    face: f.clone(),
                    cells: cs.clone(),
                });
            }
        }
        if !violations.is_empty() {
            return Err(violations);
        }

        let mut ordered: Vec<(Simplex, Vec<CellId>)> = incidence.into_iter().collect();
        ordered.sort_by(|a, b| (a.0.len(), &a.0).cmp(&(b.0.len(), &b.0)));
        let mut faces: Vec<Face> = ordered
            .into_iter()
            .map(|(simplex, cells)| Face {
                simplex,
                cells,
                on_boundary: false,
            })
            .collect();
        let face_index: HashMap<Simplex, FaceId> = faces
            .iter()
            .enumerate()
            .map(|(i, f)| (f.simplex.clone(), i))
            .collect();
        let boundary: Vec<FaceId> = faces
            .iter()
            .enumerate()
            .filter(|(_, f)| f.simplex.len() == n && f.cells.len() == 1)
            .map(|(i, _)| i)
            .collect();
        for &b in &boundary {
            let sub_faces: Vec<Simplex> = faces[b].simplex.faces().collect();
            for sf in sub_faces {
                faces[face_index[&sf]].on_boundary = true;
            }
        }

        Ok(SimplicialComplex {
            dim: n,
            vertices,
            cells: simplices,
            geometry: geometry.into_iter().map(|g| g.expect("checked")).collect(),
            faces,
            face_index,
            boundary,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vector] {
        &self.vertices
    }

    pub fn vertex(&self, v: VertexId) -> &Vector {
        &self.vertices[v]
    }

    pub fn cells(&self) -> &[Simplex] {
        &self.cells
    }

    pub fn cell(&self, c: CellId) -> &Simplex {
        &self.cells[c]
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    /// Sign of `det[v_1 - v_0, ..., v_n - v_0]` for the sorted vertex order.
    pub fn cell_orientation(&self, c: CellId) -> Sign {
        self.geometry[c].orientation
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn face(&self, f: FaceId) -> &Face {
        &self.faces[f]
    }

    pub fn face_id(&self, s: &Simplex) -> Option<FaceId> {
        self.face_index.get(s).copied()
    }

    pub fn cell_face(&self, c: CellId) -> FaceId {
        self.face_index[&self.cells[c]]
    }

    /// Faces of a given dimension, in lattice order.
    pub fn faces_of_dim(&self, d: usize) -> impl Iterator<Item = FaceId> + '_ {
        self.faces
            .iter()
            .enumerate()
            .filter(move |(_, f)| f.simplex.len() == d + 1)
            .map(|(i, _)| i)
    }

    /// Faces not contained in the boundary of the support, excluding cells.
    pub fn interior_faces(&self) -> impl Iterator<Item = FaceId> + '_ {
        self.faces
            .iter()
            .enumerate()
            .filter(move |(_, f)| !f.on_boundary && f.simplex.len() <= self.dim)
            .map(|(i, _)| i)
    }

    /// The (n-1)-faces incident to exactly one cell.
    pub fn boundary_faces(&self) -> &[FaceId] {
        &self.boundary
    }

    /// Interior (n-1)-faces, each with its two incident cells.
    pub fn interior_facets(&self) -> impl Iterator<Item = (FaceId, CellId, CellId)> + '_ {
        self.faces_of_dim(self.dim.saturating_sub(1)).filter_map(move |f| {
            let cs = &self.faces[f].cells;
            (self.dim >= 1 && cs.len() == 2).then(|| (f, cs[0], cs[1]))
        })
    }

    pub fn points_of(&self, s: &Simplex) -> Vec<Vector> {
        s.vertices().iter().map(|&v| self.vertices[v].clone()).collect()
    }

    pub fn barycenter_of(&self, s: &Simplex) -> Vector {
        let pts: Vec<&[Rational]> = s.vertices().iter().map(|&v| self.vertices[v].as_slice()).collect();
        crate::linalg::barycenter(&pts)
    }

    /// Barycentric coordinates of `p` with respect to cell `c`, in the order
    /// of the cell's sorted vertex ids.
    pub fn barycentric(&self, c: CellId, p: &[Rational]) -> Vector {
        let origin = &self.vertices[self.cells[c].vertices()[0]];
        let alpha = self.geometry[c]
            .inverse_edges
            .mul_vec(&sub(p, origin))
            .expect("ambient dimension");
        let first = alpha.iter().fold(Rational::one(), |acc, a| acc - a);
        std::iter::once(first).chain(alpha).collect()
    }

    /// Barycentric coordinates of a direction (they sum to zero).
    pub fn barycentric_direction(&self, c: CellId, d: &[Rational]) -> Vector {
        let alpha = self.geometry[c]
            .inverse_edges
            .mul_vec(d)
            .expect("ambient dimension");
        let first = alpha.iter().fold(Rational::zero(), |acc, a| acc - a);
        std::iter::once(first).chain(alpha).collect()
    }

    pub fn cell_contains(&self, c: CellId, p: &[Rational]) -> bool {
        self.barycentric(c, p).iter().all(|b| !b.is_negative())
    }

    /// Exact classification of `p` against the complex.
    pub fn locate(&self, p: &[Rational]) -> Location {
        for c in 0..self.cells.len() {
            let bary = self.barycentric(c, p);
            if bary.iter().any(Signed::is_negative) {
                continue;
            }
            let carrier: Vec<VertexId> = self.cells[c]
                .vertices()
                .iter()
                .zip(&bary)
                .filter(|(_, b)| b.is_positive())
                .map(|(&v, _)| v)
                .collect();
            if carrier.len() == self.dim + 1 {
                return Location::Interior(c);
            }
            return Location::OnFace(self.face_index[&Simplex(carrier)]);
        }
        Location::Outside
    }

    /// Face whose relative interior contains `p`, cells included.
    pub fn carrier(&self, p: &[Rational]) -> Option<FaceId> {
        match self.locate(p) {
            Location::Interior(c) => Some(self.cell_face(c)),
            Location::OnFace(f) => Some(f),
            Location::Outside => None,
        }
    }

    /// Connected-component label per cell, where cells are adjacent when
    /// they share an (n-1)-face. Labels are assigned in cell order.
    pub fn cell_components(&self) -> Vec<usize> {
        let mut uf = UnionFind::new(self.cells.len());
        for (_, a, b) in self.interior_facets() {
            uf.union(a, b);
        }
        uf.labels()
    }

    /// Whether the interior of the support is connected.
    pub fn is_strongly_connected(&self) -> bool {
        self.cell_components().iter().all(|&l| l == 0)
    }
}

/// Minimal union-find with deterministic labelling.
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }

    /// Labels `0..k` in order of first appearance.
    pub(crate) fn labels(&mut self) -> Vec<usize> {
        let mut map: HashMap<usize, usize> = HashMap::new();
        (0..self.parent.len())
            .map(|x| {
                let r = self.find(x);
                let next = map.len();
                *map.entry(r).or_insert(next)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{rat, ratio};

    fn pts(raw: &[&[i64]]) -> Vec<Vector> {
        raw.iter().map(|p| p.iter().map(|&v| rat(v)).collect()).collect()
    }

    fn square() -> SimplicialComplex {
        SimplicialComplex::validate(
            2,
            pts(&[&[0, 0], &[1, 0], &[1, 1], &[0, 1]]),
            vec![vec![0, 1, 2], vec![0, 2, 3]],
        )
        .unwrap()
    }

    #[test]
    fn two_triangles_sharing_an_edge() {
        let k = square();
        assert_eq!(k.num_cells(), 2);
        // 4 vertices + 5 edges + 2 triangles
        assert_eq!(k.faces().len(), 11);
        assert_eq!(k.boundary_faces().len(), 4);
        let diag = k.face_id(&Simplex::new(vec![0, 2])).unwrap();
        assert!(!k.boundary_faces().contains(&diag));
        assert!(!k.face(diag).on_boundary);
        assert_eq!(k.interior_faces().collect::<Vec<_>>(), vec![diag]);
    }

    #[test]
    fn single_triangle_boundary() {
        let k = SimplicialComplex::validate(2, pts(&[&[0, 0], &[1, 0], &[0, 1]]), vec![vec![0, 1, 2]])
            .unwrap();
        assert_eq!(k.boundary_faces().len(), 3);
        assert_eq!(k.interior_faces().count(), 0);
    }

    #[test]
    fn overlapping_triangles_rejected() {
        let err = SimplicialComplex::validate(
            2,
            pts(&[&[0, 0], &[2, 0], &[0, 2], &[1, 1], &[3, 1], &[1, 3]]),
            vec![vec![0, 1, 2], vec![3, 4, 5]],
        )
        .unwrap_err();
        assert!(matches!(err[0], Violation::ImproperIntersection { first: 0, second: 1, .. }));
        assert!(err[0].to_string().contains("improper intersection"));
    }

    #[test]
    fn t_junction_rejected() {
        // vertex 4 lies in the middle of edge (0,1) of the first triangle
        let err = SimplicialComplex::validate(
            2,
            pts(&[&[0, 0], &[2, 0], &[0, 2], &[0, -2], &[1, 0]]),
            vec![vec![0, 1, 2], vec![0, 4, 3], vec![4, 1, 3]],
        )
        .unwrap_err();
        assert!(err.iter().all(|v| matches!(v, Violation::ImproperIntersection { .. })));
        assert!(!err.is_empty());
    }

    #[test]
    fn collinear_triangle_rejected() {
        let err = SimplicialComplex::validate(2, pts(&[&[0, 0], &[1, 1], &[2, 2]]), vec![vec![0, 1, 2]])
            .unwrap_err();
        assert_eq!(err, vec![Violation::DegenerateCell { cell: 0 }]);
        assert!(err[0].to_string().contains("degenerate cell"));
    }

    #[test]
    fn structural_violations_listed() {
        let err = SimplicialComplex::validate(
            2,
            vec![vec![rat(0), rat(0)], vec![rat(1)], vec![rat(0), rat(0)]],
            vec![vec![0, 1], vec![0, 0, 7]],
        )
        .unwrap_err();
        assert!(err.contains(&Violation::WrongCoordinateCount { vertex: 1, expected: 2, found: 1 }));
        assert!(err.contains(&Violation::WrongCellSize { cell: 0, expected: 3, found: 2 }));
        assert!(err.contains(&Violation::RepeatedVertexInCell { cell: 1, vertex: 0 }));
        assert!(err.contains(&Violation::VertexOutOfRange { cell: 1, vertex: 7 }));
        let dup = SimplicialComplex::validate(
            1,
            pts(&[&[0], &[1], &[1]]),
            vec![vec![0, 1], vec![0, 2]],
        )
        .unwrap_err();
        assert!(dup.contains(&Violation::DuplicateVertex { first: 1, second: 2 }));
        assert_eq!(
            SimplicialComplex::validate(1, pts(&[&[0]]), vec![]).unwrap_err(),
            vec![Violation::EmptyComplex]
        );
    }

    #[test]
    fn three_triangles_on_one_edge_rejected() {
        // a "book" with three pages on edge (0,1) lifted into distinct
        // positions cannot be embedded in the plane, so use 1-D: three
        // segments sharing vertex 0 in ℝ¹ overlap, which we report too.
        let err = SimplicialComplex::validate(
            1,
            pts(&[&[0], &[1], &[2], &[-1]]),
            vec![vec![0, 1], vec![0, 2], vec![0, 3]],
        )
        .unwrap_err();
        assert!(err.iter().any(|v| matches!(v, Violation::NonManifoldFace { .. })));
    }

    #[test]
    fn locate_partitions_points() {
        let k = square();
        let bc = k.barycenter_of(k.cell(0));
        assert_eq!(k.locate(&bc), Location::Interior(0));
        let mid = vec![ratio(1, 2), ratio(1, 2)];
        let diag = k.face_id(&Simplex::new(vec![0, 2])).unwrap();
        assert_eq!(k.locate(&mid), Location::OnFace(diag));
        let corner = vec![rat(1), rat(1)];
        assert_eq!(k.locate(&corner), Location::OnFace(k.face_id(&Simplex::new(vec![2])).unwrap()));
        assert_eq!(k.locate(&[rat(2), rat(0)]), Location::Outside);
    }

    #[test]
    fn components_follow_facets() {
        let bowtie = SimplicialComplex::validate(
            2,
            pts(&[&[0, 0], &[1, 0], &[0, 1], &[-1, 0], &[0, -1]]),
            vec![vec![0, 1, 2], vec![0, 3, 4]],
        )
        .unwrap();
        assert_eq!(bowtie.cell_components(), vec![0, 1]);
        assert!(!bowtie.is_strongly_connected());
        assert!(square().is_strongly_connected());
    }
}
