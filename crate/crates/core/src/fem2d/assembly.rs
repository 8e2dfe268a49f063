use super::linalg::CsrMatrix;
use super::mesh::{EdgeTag, Mesh};
use crate::geometry::cross;

/// Stiffness and mass matrices restricted to the free (non-Dirichlet) nodes.
#[derive(Debug, Clone)]
pub struct AssembledSystem {
    pub stiffness: CsrMatrix,
    pub mass: CsrMatrix,
    /// Mesh node index of each free dof.
    pub free_dofs: Vec<usize>,
}

/// Exact P1 element matrices of one triangle.
pub fn element_matrices(p: [[f64; 2]; 3]) -> ([[f64; 3]; 3], [[f64; 3]; 3]) {
    let area = 0.5 * cross(p[0], p[1], p[2]);
    let mut b = [0.0; 3];
    let mut c = [0.0; 3];
    for i in 0..3 {
        let j = (i + 1) % 3;
        let k = (i + 2) % 3;
        b[i] = p[j][1] - p[k][1];
        c[i] = p[k][0] - p[j][0];
    }
    let mut ke = [[0.0; 3]; 3];
    let mut me = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            ke[i][j] = (b[i] * b[j] + c[i] * c[j]) / (4.0 * area);
            me[i][j] = area / 12.0 * if i == j { 2.0 } else { 1.0 };
        }
    }
    (ke, me)
}

/// Nodes on a DirichletPart edge are removed, including junctions with the
/// Neumann part.
pub fn assemble(mesh: &Mesh) -> AssembledSystem {
    let n = mesh.nodes.len();
    let mut fixed = vec![false; n];
    for e in &mesh.boundary_edges {
        if e.tag == EdgeTag::DirichletPart {
            fixed[e.nodes[0]] = true;
            fixed[e.nodes[1]] = true;
        }
    }
    let mut index = vec![usize::MAX; n];
    let mut free_dofs = Vec::new();
    for v in 0..n {
        if !fixed[v] {
            index[v] = free_dofs.len();
            free_dofs.push(v);
        }
    }
    let mut tk = Vec::with_capacity(9 * mesh.triangles.len());
    let mut tm = Vec::with_capacity(9 * mesh.triangles.len());
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let (ke, me) = element_matrices(mesh.tri_points(t));
        for a in 0..3 {
            let i = index[tri[a]];
            if i == usize::MAX {
                continue;
            }
            for b in 0..3 {
                let j = index[tri[b]];
                if j == usize::MAX {
                    continue;
                }
                tk.push((i, j, ke[a][b]));
                tm.push((i, j, me[a][b]));
            }
        }
    }
    let nf = free_dofs.len();
    AssembledSystem {
        stiffness: CsrMatrix::from_triplets(nf, tk),
        mass: CsrMatrix::from_triplets(nf, tm),
        free_dofs,
    }
}
