use super::affine::affine_dimension;
use super::hull::{incident_facets, LocalHull};
use crate::tolerance::RANK_TOL;

/// A face of a hull, identified by its vertex set.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FaceDescriptor {
    pub vertex_ids: Vec<usize>,
    /// Facets intersected to reach this face. Empty for the whole polytope
    /// when the hull is not full-dimensional.
    pub defining_facets: Vec<usize>,
    pub dim: usize,
}

fn face_dim(hull: &LocalHull, ids: &[usize]) -> usize {
    let pts: Vec<&[f64]> = ids.iter().map(|&i| hull.points[i].as_slice()).collect();
    affine_dimension(&pts, RANK_TOL)
}

/// Starting faces for the descent at `apex`: the facets through it for a
/// full-dimensional hull, otherwise the hull itself.
pub fn top_faces(hull: &LocalHull, apex: usize) -> Vec<FaceDescriptor> {
    if hull.affine_dim < hull.ambient_dim {
        if !hull.is_vertex(apex) {
            return Vec::new();
        }
        return vec![FaceDescriptor {
            vertex_ids: hull.vertices.clone(),
            defining_facets: Vec::new(),
            dim: hull.affine_dim,
        }];
    }
    incident_facets(hull, apex)
        .unwrap_or_default()
        .into_iter()
        .map(|f| FaceDescriptor {
            vertex_ids: hull.facets[f].vertex_ids.clone(),
            defining_facets: vec![f],
            dim: hull.affine_dim - 1,
        })
        .collect()
}

/// Faces one dimension lower than `face` that still contain `apex`, each
/// obtained by intersecting with one more facet through the apex.
pub fn subfaces_at(face: &FaceDescriptor, hull: &LocalHull, apex: usize) -> Vec<FaceDescriptor> {
    if face.dim <= 1 {
        return Vec::new();
    }
    let mut out: Vec<FaceDescriptor> = Vec::new();
    for f in incident_facets(hull, apex).unwrap_or_default() {
        if face.defining_facets.contains(&f) {
            continue;
        }
        let facet = &hull.facets[f];
        let ids: Vec<usize> = face
            .vertex_ids
            .iter()
            .copied()
            .filter(|v| facet.vertex_ids.binary_search(v).is_ok())
            .collect();
        if ids.binary_search(&apex).is_err() || ids.len() < face.dim {
            continue;
        }
        if out.iter().any(|o| o.vertex_ids == ids) || face_dim(hull, &ids) != face.dim - 1 {
            continue;
        }
        let mut defining = face.defining_facets.clone();
        defining.push(f);
        defining.sort_unstable();
        out.push(FaceDescriptor {
            vertex_ids: ids,
            defining_facets: defining,
            dim: face.dim - 1,
        });
    }
    out
}

/// Generators of the normal cone of the face with vertex set `vertex_ids`:
/// the normals of every facet containing it, plus both signs of each
/// direction normal to the hull's affine span.
pub fn face_normal_cone(hull: &LocalHull, vertex_ids: &[usize]) -> Vec<Vec<f64>> {
    let mut normals: Vec<Vec<f64>> = hull
        .facets
        .iter()
        .filter(|f| f.contains_all(vertex_ids))
        .map(|f| f.normal.clone())
        .collect();
    for c in &hull.complement {
        normals.push(c.clone());
        normals.push(c.iter().map(|x| -x).collect());
    }
    normals
}
