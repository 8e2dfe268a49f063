use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use spade::{AngleLimit, ConstrainedDelaunayTriangulation, Point2, RefinementParameters, Triangulation};

use crate::error::{invalid, Result, SpectraError};
use crate::geometry::{
    all_pairs_diameter, cross, dist, point_segment_distance, shoelace, ConvexPolygon, Point, ProfileDomain,
    RectilinearPolygon,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeTag {
    DirichletPart,
    NeumannPart,
}

/// Simple polygon (counterclockwise) with one boundary tag per edge; edge i
/// joins vertex i to vertex i+1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTagged")]
pub struct TaggedPolygon {
    pub vertices: Vec<Point>,
    pub tags: Vec<EdgeTag>,
}

#[derive(Deserialize)]
struct RawTagged {
    vertices: Vec<Point>,
    tags: Vec<EdgeTag>,
}

impl TryFrom<RawTagged> for TaggedPolygon {
    type Error = SpectraError;
    fn try_from(r: RawTagged) -> Result<Self> {
        TaggedPolygon::new(r.vertices, r.tags)
    }
}

impl TaggedPolygon {
    pub fn new(mut vertices: Vec<Point>, mut tags: Vec<EdgeTag>) -> Result<Self> {
        if vertices.len() < 3 || tags.len() != vertices.len() {
            return invalid("need at least three vertices and one tag per edge");
        }
        if vertices.iter().flatten().any(|c| !c.is_finite()) {
            return invalid("vertex coordinates must be finite");
        }
        let area = shoelace(&vertices);
        if area == 0.0 {
            return invalid("polygon has zero area");
        }
        if area < 0.0 {
            // Reverse orientation; edge i of the reversed loop is old edge n-2-i.
            vertices.reverse();
            let n = tags.len();
            let old = tags.clone();
            for (i, t) in tags.iter_mut().enumerate() {
                *t = old[(2 * n - 2 - i) % n];
            }
        }
        Ok(TaggedPolygon { vertices, tags })
    }

    pub fn uniform(vertices: Vec<Point>, tag: EdgeTag) -> Result<Self> {
        let n = vertices.len();
        Self::new(vertices, vec![tag; n])
    }

    pub fn from_convex(p: &ConvexPolygon, tag: EdgeTag) -> Self {
        TaggedPolygon { vertices: p.vertices().to_vec(), tags: vec![tag; p.len()] }
    }

    pub fn from_rectilinear(p: &RectilinearPolygon, tag: EdgeTag) -> Self {
        TaggedPolygon { vertices: p.vertices().to_vec(), tags: vec![tag; p.vertices().len()] }
    }

    /// Γ⁻ (lower profile) Dirichlet, Γ⁺ (upper profile) Neumann.
    pub fn from_profile_zaremba(p: &ProfileDomain) -> Self {
        let vertices = p.boundary_loop();
        let m = p.xs().len() - 1;
        let tags = (0..vertices.len()).map(|i| if i < m { EdgeTag::DirichletPart } else { EdgeTag::NeumannPart }).collect();
        TaggedPolygon { vertices, tags }
    }

    pub fn from_profile(p: &ProfileDomain, tag: EdgeTag) -> Self {
        let vertices = p.boundary_loop();
        let n = vertices.len();
        TaggedPolygon { vertices, tags: vec![tag; n] }
    }

    /// Axis-aligned rectangle [0,w]×[0,h]; tags in the order bottom, right, top, left.
    pub fn rectangle(w: f64, h: f64, tags: [EdgeTag; 4]) -> Result<Self> {
        if !(w > 0.0 && h > 0.0) {
            return invalid("rectangle sides must be positive");
        }
        Self::new(vec![[0.0, 0.0], [w, 0.0], [w, h], [0.0, h]], tags.to_vec())
    }

    pub fn area(&self) -> f64 {
        shoelace(&self.vertices)
    }

    pub fn diameter(&self) -> f64 {
        all_pairs_diameter(&self.vertices)
    }

    fn edge(&self, i: usize) -> (Point, Point) {
        (self.vertices[i], self.vertices[(i + 1) % self.vertices.len()])
    }

    /// Interior angle at each vertex, in degrees.
    pub fn corner_angles(&self) -> Vec<f64> {
        let n = self.vertices.len();
        (0..n)
            .map(|i| {
                let prev = self.vertices[(i + n - 1) % n];
                let cur = self.vertices[i];
                let next = self.vertices[(i + 1) % n];
                let a = [prev[0] - cur[0], prev[1] - cur[1]];
                let b = [next[0] - cur[0], next[1] - cur[1]];
                let ang = (a[0] * b[1] - a[1] * b[0]).atan2(a[0] * b[0] + a[1] * b[1]);
                // Turning from b to a counterclockwise measures the interior on a CCW loop.
                let interior = if ang < 0.0 { -ang } else { 2.0 * std::f64::consts::PI - ang };
                interior.to_degrees()
            })
            .collect()
    }

    fn contains(&self, p: Point) -> bool {
        let n = self.vertices.len();
        let mut inside = false;
        for i in 0..n {
            let (a, b) = self.edge(i);
            if (a[1] > p[1]) != (b[1] > p[1]) {
                let x = a[0] + (p[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
                if p[0] < x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    fn tag_of_segment(&self, a: Point, b: Point) -> EdgeTag {
        let mid = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
        let (best, _) = (0..self.vertices.len())
            .map(|i| {
                let (p, q) = self.edge(i);
                (i, point_segment_distance(mid, p, q))
            })
            .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
        self.tags[best]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryEdge {
    pub nodes: [usize; 2],
    pub tag: EdgeTag,
}

/// Conforming triangle mesh. Triangles are counterclockwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mesh {
    pub nodes: Vec<Point>,
    pub triangles: Vec<[usize; 3]>,
    pub boundary_edges: Vec<BoundaryEdge>,
    /// Longest edge length.
    pub h: f64,
}

pub const MIN_ANGLE_DEG: f64 = 20.0;
const REFINE_ANGLE_DEG: f64 = 25.0;

fn triangle_angles(p: [Point; 3]) -> [f64; 3] {
    let l = [dist(p[1], p[2]), dist(p[2], p[0]), dist(p[0], p[1])];
    let ang = |a: f64, b: f64, c: f64| ((b * b + c * c - a * a) / (2.0 * b * c)).clamp(-1.0, 1.0).acos().to_degrees();
    [ang(l[0], l[1], l[2]), ang(l[1], l[2], l[0]), ang(l[2], l[0], l[1])]
}

impl Mesh {
    pub fn tri_points(&self, t: usize) -> [Point; 3] {
        let [a, b, c] = self.triangles[t];
        [self.nodes[a], self.nodes[b], self.nodes[c]]
    }

    pub fn min_angle_deg(&self) -> f64 {
        (0..self.triangles.len()).flat_map(|t| triangle_angles(self.tri_points(t))).fold(180.0, f64::min)
    }

    pub fn total_area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| 0.5 * { let [a, b, c] = self.tri_points(t); cross(a, b, c) }).sum()
    }

    pub fn boundary_length(&self, tag: Option<EdgeTag>) -> f64 {
        self.boundary_edges
            .iter()
            .filter(|e| tag.is_none_or(|t| t == e.tag))
            .map(|e| dist(self.nodes[e.nodes[0]], self.nodes[e.nodes[1]]))
            .sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("mesh serializes")
    }

    pub fn from_json(s: &str) -> Result<Mesh> {
        let m: Mesh = serde_json::from_str(s).map_err(|e| SpectraError::InvalidInput(format!("mesh json: {e}")))?;
        m.validate()?;
        Ok(m)
    }

    /// Checks positivity, conformity (each interior edge shared by exactly two
    /// triangles) and that every single-triangle edge is tagged exactly once.
    pub fn validate(&self) -> Result<()> {
        let n = self.nodes.len();
        let mut edges: HashMap<(usize, usize), u32> = HashMap::new();
        for (t, tri) in self.triangles.iter().enumerate() {
            if tri.iter().any(|&v| v >= n) {
                return Err(SpectraError::MeshFailure(format!("triangle {t} references a missing node")));
            }
            let [a, b, c] = self.tri_points(t);
            if !(cross(a, b, c) > 0.0) {
                return Err(SpectraError::MeshFailure(format!("triangle {t} is degenerate or clockwise")));
            }
            for i in 0..3 {
                let (u, v) = (tri[i], tri[(i + 1) % 3]);
                *edges.entry((u.min(v), u.max(v))).or_default() += 1;
            }
        }
        if edges.values().any(|&c| c > 2) {
            return Err(SpectraError::MeshFailure("edge shared by more than two triangles".into()));
        }
        let mut tagged: HashMap<(usize, usize), u32> = HashMap::new();
        for e in &self.boundary_edges {
            let [u, v] = e.nodes;
            *tagged.entry((u.min(v), u.max(v))).or_default() += 1;
        }
        let boundary: Vec<_> = edges.iter().filter(|(_, &c)| c == 1).map(|(k, _)| *k).collect();
        if boundary.len() != tagged.len() || boundary.iter().any(|k| tagged.get(k) != Some(&1)) {
            return Err(SpectraError::MeshFailure("boundary edges are not tagged exactly once".into()));
        }
        Ok(())
    }

    /// Uniform red refinement: each triangle splits into four similar ones.
    pub fn red_refine(&self) -> Mesh {
        let mut nodes = self.nodes.clone();
        let mut mids: HashMap<(usize, usize), usize> = HashMap::new();
        let mut mid = |u: usize, v: usize, nodes: &mut Vec<Point>| -> usize {
            *mids.entry((u.min(v), u.max(v))).or_insert_with(|| {
                let (a, b) = (nodes[u], nodes[v]);
                nodes.push([0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]);
                nodes.len() - 1
            })
        };
        let mut triangles = Vec::with_capacity(4 * self.triangles.len());
        for &[a, b, c] in &self.triangles {
            let ab = mid(a, b, &mut nodes);
            let bc = mid(b, c, &mut nodes);
            let ca = mid(c, a, &mut nodes);
            triangles.extend_from_slice(&[[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]]);
        }
        let mut boundary_edges = Vec::with_capacity(2 * self.boundary_edges.len());
        for e in &self.boundary_edges {
            let [u, v] = e.nodes;
            let m = mid(u, v, &mut nodes);
            boundary_edges.push(BoundaryEdge { nodes: [u, m], tag: e.tag });
            boundary_edges.push(BoundaryEdge { nodes: [m, v], tag: e.tag });
        }
        Mesh { nodes, triangles, boundary_edges, h: 0.5 * self.h }
    }
}

fn longest_edge(nodes: &[Point], triangles: &[[usize; 3]]) -> f64 {
    triangles
        .iter()
        .flat_map(|t| (0..3).map(move |i| (t[i], t[(i + 1) % 3])))
        .map(|(u, v)| dist(nodes[u], nodes[v]))
        .fold(0.0, f64::max)
}

/// Constrained Delaunay mesh with boundary edges subdivided to length ≤ h and
/// interior refinement to triangles of area about that of an equilateral
/// triangle with side h. The minimum-angle gate is 20°, relaxed to the
/// smallest corner angle of the domain where that is smaller.
pub fn triangulate(domain: &TaggedPolygon, h: f64) -> Result<Mesh> {
    let diam = domain.diameter();
    if !(h > 0.0 && h.is_finite()) || h > diam / 4.0 * (1.0 + 1e-12) {
        return invalid(format!("mesh size must lie in (0, diameter/4 = {}]", diam / 4.0));
    }
    let nv = domain.vertices.len();
    let mut cdt = ConstrainedDelaunayTriangulation::<Point2<f64>>::new();
    let mut boundary_pts: Vec<Point> = Vec::new();
    for i in 0..nv {
        let (a, b) = domain.edge(i);
        let segs = (dist(a, b) / h).ceil().max(1.0) as usize;
        for s in 0..segs {
            let t = s as f64 / segs as f64;
            boundary_pts.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
        }
    }
    let mut handles = Vec::with_capacity(boundary_pts.len());
    for p in &boundary_pts {
        handles.push(
            cdt.insert(Point2::new(p[0], p[1]))
                .map_err(|e| SpectraError::MeshFailure(format!("vertex insertion failed: {e:?}")))?,
        );
    }
    for i in 0..handles.len() {
        let (u, v) = (handles[i], handles[(i + 1) % handles.len()]);
        if !cdt.can_add_constraint(u, v) {
            return Err(SpectraError::MeshFailure("boundary constraint intersects another".into()));
        }
        cdt.add_constraint(u, v);
    }
    let area = domain.area();
    let expected = (area / (0.433 * h * h)).ceil() as usize;
    let params = RefinementParameters::<f64>::new()
        .exclude_outer_faces(true)
        .keep_constraint_edges()
        .with_angle_limit(AngleLimit::from_deg(REFINE_ANGLE_DEG))
        .with_max_allowed_area(3f64.sqrt() / 4.0 * h * h)
        .with_max_additional_vertices(20 * expected + 1000);
    let result = cdt.refine(params);
    let excluded: std::collections::HashSet<_> = result.excluded_faces.iter().copied().collect();

    let mut index: HashMap<usize, usize> = HashMap::new();
    let mut nodes = Vec::new();
    let mut triangles = Vec::new();
    for face in cdt.inner_faces() {
        if excluded.contains(&face.fix()) {
            continue;
        }
        let vs = face.vertices();
        let pts: Vec<Point> = vs.iter().map(|v| [v.position().x, v.position().y]).collect();
        let c = [(pts[0][0] + pts[1][0] + pts[2][0]) / 3.0, (pts[0][1] + pts[1][1] + pts[2][1]) / 3.0];
        if !domain.contains(c) {
            continue;
        }
        let mut tri = [0usize; 3];
        for (k, v) in vs.iter().enumerate() {
            let key = v.fix().index();
            tri[k] = *index.entry(key).or_insert_with(|| {
                nodes.push(pts[k]);
                nodes.len() - 1
            });
        }
        if cross(nodes[tri[0]], nodes[tri[1]], nodes[tri[2]]) < 0.0 {
            tri.swap(1, 2);
        }
        triangles.push(tri);
    }
    if triangles.is_empty() {
        return Err(SpectraError::MeshFailure("triangulation produced no interior faces".into()));
    }
    let mut edge_count: HashMap<(usize, usize), (u32, [usize; 2])> = HashMap::new();
    for t in &triangles {
        for i in 0..3 {
            let (u, v) = (t[i], t[(i + 1) % 3]);
            let e = edge_count.entry((u.min(v), u.max(v))).or_insert((0, [u, v]));
            e.0 += 1;
        }
    }
    let mut boundary_edges: Vec<BoundaryEdge> = edge_count
        .values()
        .filter(|(c, _)| *c == 1)
        .map(|&(_, [u, v])| BoundaryEdge { nodes: [u, v], tag: domain.tag_of_segment(nodes[u], nodes[v]) })
        .collect();
    boundary_edges.sort_by_key(|e| e.nodes);
    let mesh = Mesh { h: longest_edge(&nodes, &triangles), nodes, triangles, boundary_edges };
    mesh.validate()?;
    let corner_min = domain.corner_angles().into_iter().fold(180.0, f64::min);
    let gate = MIN_ANGLE_DEG.min(corner_min) - 1e-9;
    let got = mesh.min_angle_deg();
    if got < gate {
        return Err(SpectraError::MeshFailure(format!(
            "minimum angle {got:.2}° below the quality gate {:.2}°",
            gate + 1e-9
        )));
    }
    if !result.refinement_complete && got < gate {
        return Err(SpectraError::MeshFailure("refinement budget exhausted".into()));
    }
    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square(tag: EdgeTag) -> TaggedPolygon {
        TaggedPolygon::rectangle(1.0, 1.0, [tag; 4]).unwrap()
    }

    #[test]
    fn square_mesh_quality_and_boundary() {
        let m = triangulate(&unit_square(EdgeTag::DirichletPart), 0.1).unwrap();
        assert!(m.min_angle_deg() >= 20.0);
        assert!((m.boundary_length(None) - 4.0).abs() < 1e-12);
        assert!((m.total_area() - 1.0).abs() < 1e-12);
        assert!(m.h < 0.2);
    }

    #[test]
    fn tags_follow_edges() {
        let p = TaggedPolygon::rectangle(
            1.0,
            1.0,
            [EdgeTag::DirichletPart, EdgeTag::NeumannPart, EdgeTag::NeumannPart, EdgeTag::NeumannPart],
        )
        .unwrap();
        let m = triangulate(&p, 0.05).unwrap();
        assert!((m.boundary_length(Some(EdgeTag::DirichletPart)) - 1.0).abs() < 1e-12);
        assert!((m.boundary_length(Some(EdgeTag::NeumannPart)) - 3.0).abs() < 1e-12);
        for e in m.boundary_edges.iter().filter(|e| e.tag == EdgeTag::DirichletPart) {
            assert!(m.nodes[e.nodes[0]][1].abs() < 1e-14 && m.nodes[e.nodes[1]][1].abs() < 1e-14);
        }
    }

    #[test]
    fn clockwise_input_keeps_edge_tags() {
        use EdgeTag::*;
        let p = TaggedPolygon::new(
            vec![[0.0, 0.0], [0.0, 1.0], [2.0, 1.0], [2.0, 0.0]],
            vec![DirichletPart, NeumannPart, NeumannPart, NeumannPart],
        )
        .unwrap();
        assert!(p.area() > 0.0);
        let m = triangulate(&p, 0.1).unwrap();
        // The left side x = 0 carried the Dirichlet tag.
        assert!((m.boundary_length(Some(DirichletPart)) - 1.0).abs() < 1e-12);
        for e in m.boundary_edges.iter().filter(|e| e.tag == DirichletPart) {
            assert!(m.nodes[e.nodes[0]][0].abs() < 1e-14);
        }
    }

    #[test]
    fn symmetric_lens_has_balanced_tags() {
        let xs = vec![0.0, 0.25, 0.5, 0.75, 1.0];
        let hp = vec![0.0, 0.15, 0.2, 0.15, 0.0];
        let hm: Vec<f64> = hp.iter().map(|v| -v).collect();
        let pd = ProfileDomain::new(xs, hp, hm, 1.0).unwrap();
        let m = triangulate(&TaggedPolygon::from_profile_zaremba(&pd), 0.03).unwrap();
        let nd = m.boundary_edges.iter().filter(|e| e.tag == EdgeTag::DirichletPart).count() as i64;
        let nn = m.boundary_edges.len() as i64 - nd;
        assert!((nd - nn).abs() <= 1, "{nd} vs {nn}");
    }

    #[test]
    fn hexagon_node_growth() {
        let hex = TaggedPolygon::from_convex(&ConvexPolygon::regular(6, 1.0).unwrap(), EdgeTag::NeumannPart);
        let a = triangulate(&hex, 0.1).unwrap().nodes.len() as f64;
        let b = triangulate(&hex, 0.05).unwrap().nodes.len() as f64;
        let r = b / a;
        assert!(r > 4.0 / 1.5 && r < 4.0 * 1.5, "{r}");
    }

    #[test]
    fn red_refinement_is_conforming() {
        let m = triangulate(&unit_square(EdgeTag::NeumannPart), 0.2).unwrap();
        let r = m.red_refine();
        r.validate().unwrap();
        assert_eq!(r.triangles.len(), 4 * m.triangles.len());
        assert!((r.min_angle_deg() - m.min_angle_deg()).abs() < 1e-9);
        assert!((r.total_area() - 1.0).abs() < 1e-12);
        assert!((longest_edge(&r.nodes, &r.triangles) - 0.5 * m.h).abs() < 1e-12);
    }

    #[test]
    fn rectilinear_l_shape() {
        let l = RectilinearPolygon::new(vec![[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [1.0, 1.0], [1.0, 2.0], [0.0, 2.0]])
            .unwrap();
        let m = triangulate(&TaggedPolygon::from_rectilinear(&l, EdgeTag::DirichletPart), 0.1).unwrap();
        assert!((m.total_area() - 3.0).abs() < 1e-12);
        assert!((m.boundary_length(None) - 8.0).abs() < 1e-12);
    }

    #[test]
    fn json_round_trip() {
        let m = triangulate(&unit_square(EdgeTag::DirichletPart), 0.25).unwrap();
        assert_eq!(Mesh::from_json(&m.to_json()).unwrap(), m);
    }

    #[test]
    fn rejects_coarse_h() {
        assert!(triangulate(&unit_square(EdgeTag::DirichletPart), 0.5).is_err());
    }
}
