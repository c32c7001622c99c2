//! Quickhull in arbitrary dimension.
//!
//! Input points are first reduced to their affine hull, so a point set of
//! affine dimension `k < D` yields the `k`-dimensional polytope with facets
//! of dimension `k - 1`; the directions normal to the affine hull are kept in
//! [`LocalHull::complement`]. The simplicial facets produced by the sweep are
//! merged when they lie on a common hyperplane, and points that end up inside
//! a merged facet are dropped from the vertex set.

use std::collections::{BTreeMap, HashMap, VecDeque};

use nalgebra::DMatrix;

use super::affine::AffineFrame;
use crate::error::{Error, Result};
use crate::tolerance::{EPS_GEOM, RANK_TOL};

/// A facet `{x : normal . x = offset}` with outward unit normal.
#[derive(Debug, Clone, PartialEq)]
pub struct Facet {
    pub normal: Vec<f64>,
    pub offset: f64,
    /// Sorted hull vertices on the facet.
    pub vertex_ids: Vec<usize>,
}

impl Facet {
    pub fn signed_distance(&self, x: &[f64]) -> f64 {
        dot(&self.normal, x) - self.offset
    }

    pub fn contains_all(&self, ids: &[usize]) -> bool {
        ids.iter().all(|i| self.vertex_ids.binary_search(i).is_ok())
    }
}

#[derive(Debug, Clone)]
pub struct LocalHull {
    pub points: Vec<Vec<f64>>,
    pub facets: Vec<Facet>,
    /// Distinguished input point; the search uses index 0.
    pub apex_id: usize,
    pub ambient_dim: usize,
    pub affine_dim: usize,
    /// Orthonormal directions normal to the affine hull of the input.
    pub complement: Vec<Vec<f64>>,
    /// Sorted extreme points.
    pub vertices: Vec<usize>,
    /// Number of simplicial facets that were merged into larger ones.
    pub merged_simplices: usize,
}

impl LocalHull {
    pub fn is_vertex(&self, id: usize) -> bool {
        self.vertices.binary_search(&id).is_ok()
    }

    pub fn centroid(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.ambient_dim];
        for &v in &self.vertices {
            for (acc, x) in c.iter_mut().zip(&self.points[v]) {
                *acc += x;
            }
        }
        c.iter_mut().for_each(|x| *x /= self.vertices.len() as f64);
        c
    }

    /// Vertices joined to `id` by an edge of the hull.
    pub fn adjacent_vertices(&self, id: usize) -> Vec<usize> {
        if !self.is_vertex(id) {
            return Vec::new();
        }
        if self.affine_dim == 1 {
            return self.vertices.iter().copied().filter(|&v| v != id).collect();
        }
        let mut out = Vec::new();
        for &other in &self.vertices {
            if other == id {
                continue;
            }
            let pair = [id.min(other), id.max(other)];
            let common: Vec<&Facet> = self.facets.iter().filter(|f| f.contains_all(&pair)).collect();
            if common.is_empty() {
                continue;
            }
            // smallest face holding both; an edge has exactly two vertices
            let smallest = common.iter().skip(1).fold(common[0].vertex_ids.clone(), |acc, f| {
                acc.into_iter().filter(|v| f.vertex_ids.binary_search(v).is_ok()).collect()
            });
            if smallest.len() == 2 {
                out.push(other);
            }
        }
        out
    }
}

/// Facets whose vertex set contains `point_id`.
pub fn incident_facets(hull: &LocalHull, point_id: usize) -> Result<Vec<usize>> {
    if !hull.is_vertex(point_id) {
        return Err(Error::NotAVertex(point_id));
    }
    Ok(hull
        .facets
        .iter()
        .enumerate()
        .filter(|(_, f)| f.vertex_ids.binary_search(&point_id).is_ok())
        .map(|(i, _)| i)
        .collect())
}

/// Convex hull with the default tolerances.
pub fn convex_hull(points: &[Vec<f64>]) -> Result<LocalHull> {
    convex_hull_with(points, EPS_GEOM, RANK_TOL)
}

pub fn convex_hull_with(points: &[Vec<f64>], eps: f64, rank_tol: f64) -> Result<LocalHull> {
    let first = points
        .first()
        .ok_or_else(|| Error::Degenerate("convex hull of an empty set".into()))?;
    let ambient_dim = first.len();
    if ambient_dim == 0 || points.iter().any(|p| p.len() != ambient_dim) {
        return Err(Error::Dimension("hull points must share a positive dimension".into()));
    }
    let refs: Vec<&[f64]> = points.iter().map(Vec::as_slice).collect();
    let frame = AffineFrame::new(&refs, rank_tol);
    let k = frame.dim();
    if k == 0 {
        return Err(Error::Degenerate("all points coincide".into()));
    }
    let local: Vec<Vec<f64>> = points.iter().map(|p| frame.project(p)).collect();

    let (local_facets, merged_simplices) = if k == 1 {
        (segment_facets(&local), 0)
    } else {
        let simplices = quickhull(&local, k, eps)?;
        merge_coplanar(&local, simplices, eps)
    };

    let facets: Vec<Facet> = local_facets
        .into_iter()
        .map(|f| {
            let normal = frame.lift_direction(&f.normal);
            let offset = f.offset + dot(&normal, &frame.origin);
            Facet {
                normal,
                offset,
                vertex_ids: f.vertex_ids,
            }
        })
        .collect();
    let mut vertices: Vec<usize> = facets.iter().flat_map(|f| f.vertex_ids.iter().copied()).collect();
    vertices.sort_unstable();
    vertices.dedup();

    Ok(LocalHull {
        points: points.to_vec(),
        facets,
        apex_id: 0,
        ambient_dim,
        affine_dim: k,
        complement: frame.complement,
        vertices,
        merged_simplices,
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn segment_facets(local: &[Vec<f64>]) -> Vec<Facet> {
    let mut lo = 0;
    let mut hi = 0;
    for (i, p) in local.iter().enumerate() {
        if p[0] < local[lo][0] {
            lo = i;
        }
        if p[0] > local[hi][0] {
            hi = i;
        }
    }
    vec![
        Facet {
            normal: vec![-1.0],
            offset: -local[lo][0],
            vertex_ids: vec![lo],
        },
        Facet {
            normal: vec![1.0],
            offset: local[hi][0],
            vertex_ids: vec![hi],
        },
    ]
}

struct Simplex {
    verts: Vec<usize>,
    /// `neighbors[i]` shares the ridge opposite `verts[i]`.
    neighbors: Vec<usize>,
    normal: Vec<f64>,
    offset: f64,
    outside: Vec<usize>,
    alive: bool,
}

impl Simplex {
    fn distance(&self, x: &[f64]) -> f64 {
        dot(&self.normal, x) - self.offset
    }
}

/// Unit normal and offset of the hyperplane through `d` points in `R^d`,
/// oriented away from `interior`.
fn oriented_plane(pts: &[&[f64]], interior: &[f64]) -> (Vec<f64>, f64) {
    let d = interior.len();
    let mut m = DMatrix::zeros(d, d);
    for (i, p) in pts.iter().skip(1).enumerate() {
        for j in 0..d {
            m[(i, j)] = p[j] - pts[0][j];
        }
    }
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let smallest = (0..svd.singular_values.len())
        .min_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]))
        .expect("nonempty spectrum");
    let mut normal: Vec<f64> = v_t.row(smallest).iter().copied().collect();
    let norm = normal.iter().map(|x| x * x).sum::<f64>().sqrt();
    normal.iter_mut().for_each(|x| *x /= norm);
    let mut offset = dot(&normal, pts[0]);
    if dot(&normal, interior) > offset {
        normal.iter_mut().for_each(|x| *x = -*x);
        offset = -offset;
    }
    (normal, offset)
}

/// Greedy maximal-volume simplex: each new point maximizes its distance to
/// the span of the points chosen so far.
fn initial_simplex(pts: &[Vec<f64>], d: usize, eps: f64) -> Result<Vec<usize>> {
    let mut first = 0;
    for (i, p) in pts.iter().enumerate() {
        if p[0] < pts[first][0] {
            first = i;
        }
    }
    let mut chosen = vec![first];
    let mut basis: Vec<Vec<f64>> = Vec::new();
    while chosen.len() < d + 1 {
        let mut best = None;
        let mut best_dist = eps;
        for (i, p) in pts.iter().enumerate() {
            let mut r: Vec<f64> = p.iter().zip(&pts[first]).map(|(a, b)| a - b).collect();
            for b in &basis {
                let t = dot(&r, b);
                r.iter_mut().zip(b).for_each(|(x, y)| *x -= t * y);
            }
            let dist = dot(&r, &r).sqrt();
            if dist > best_dist {
                best_dist = dist;
                best = Some((i, r));
            }
        }
        let (i, mut r) = best.ok_or_else(|| {
            Error::Degenerate(format!("could not find {} affinely independent points", d + 1))
        })?;
        let norm = dot(&r, &r).sqrt();
        r.iter_mut().for_each(|x| *x /= norm);
        basis.push(r);
        chosen.push(i);
    }
    Ok(chosen)
}

fn quickhull(pts: &[Vec<f64>], d: usize, eps: f64) -> Result<Vec<Simplex>> {
    let simplex = initial_simplex(pts, d, eps)?;
    let mut interior = vec![0.0; d];
    for &i in &simplex {
        interior.iter_mut().zip(&pts[i]).for_each(|(c, x)| *c += x / (d + 1) as f64);
    }

    let mut facets: Vec<Simplex> = Vec::with_capacity(2 * (d + 1));
    for omit in 0..=d {
        let verts: Vec<usize> = simplex.iter().enumerate().filter(|&(j, _)| j != omit).map(|(_, &v)| v).collect();
        // the facet across the ridge opposite vertex simplex[j] is facet j
        let neighbors: Vec<usize> = (0..=d).filter(|&j| j != omit).collect();
        let vp: Vec<&[f64]> = verts.iter().map(|&v| pts[v].as_slice()).collect();
        let (normal, offset) = oriented_plane(&vp, &interior);
        facets.push(Simplex {
            verts,
            neighbors,
            normal,
            offset,
            outside: Vec::new(),
            alive: true,
        });
    }

    let mut in_simplex = vec![false; pts.len()];
    simplex.iter().for_each(|&i| in_simplex[i] = true);
    let candidates: Vec<usize> = (0..pts.len()).filter(|&i| !in_simplex[i]).collect();
    let all_ids: Vec<usize> = (0..facets.len()).collect();
    assign_outside(&mut facets, &all_ids, &candidates, pts, eps);

    let mut work: VecDeque<usize> = (0..facets.len()).collect();
    while let Some(fid) = work.pop_front() {
        if !facets[fid].alive || facets[fid].outside.is_empty() {
            continue;
        }
        let apex = *facets[fid]
            .outside
            .iter()
            .max_by(|&&a, &&b| {
                facets[fid]
                    .distance(&pts[a])
                    .total_cmp(&facets[fid].distance(&pts[b]))
                    .then(b.cmp(&a))
            })
            .expect("nonempty outside set");

        // visible region by flood fill over facet adjacency
        let mut visible = vec![fid];
        let mut is_visible: HashMap<usize, bool> = HashMap::from([(fid, true)]);
        let mut horizon: Vec<(usize, usize)> = Vec::new();
        let mut cursor = 0;
        while cursor < visible.len() {
            let f = visible[cursor];
            cursor += 1;
            for slot in 0..d {
                let nb = facets[f].neighbors[slot];
                let seen = match is_visible.get(&nb) {
                    Some(&v) => v,
                    None => {
                        let v = facets[nb].distance(&pts[apex]) > eps;
                        is_visible.insert(nb, v);
                        if v {
                            visible.push(nb);
                        }
                        v
                    }
                };
                if !seen {
                    horizon.push((f, slot));
                }
            }
        }

        let mut orphans: Vec<usize> = Vec::new();
        for &f in &visible {
            facets[f].alive = false;
            orphans.extend(facets[f].outside.drain(..).filter(|&p| p != apex));
        }

        let mut new_ids = Vec::with_capacity(horizon.len());
        let mut pending: HashMap<Vec<usize>, (usize, usize)> = HashMap::new();
        for &(f, slot) in &horizon {
            let nb = facets[f].neighbors[slot];
            let mut verts = Vec::with_capacity(d);
            verts.push(apex);
            verts.extend(facets[f].verts.iter().enumerate().filter(|&(j, _)| j != slot).map(|(_, &v)| v));
            let vp: Vec<&[f64]> = verts.iter().map(|&v| pts[v].as_slice()).collect();
            let (normal, offset) = oriented_plane(&vp, &interior);
            let id = facets.len();
            let mut neighbors = vec![usize::MAX; d];
            neighbors[0] = nb;
            let back = facets[nb]
                .neighbors
                .iter()
                .position(|&x| x == f)
                .expect("adjacency is symmetric");
            facets[nb].neighbors[back] = id;
            for t in 1..d {
                let mut key: Vec<usize> = verts.iter().enumerate().filter(|&(j, _)| j != t).map(|(_, &v)| v).collect();
                key.sort_unstable();
                match pending.remove(&key) {
                    Some((other, other_slot)) => {
                        neighbors[t] = other;
                        facets[other].neighbors[other_slot] = id;
                    }
                    None => {
                        pending.insert(key, (id, t));
                    }
                }
            }
            facets.push(Simplex {
                verts,
                neighbors,
                normal,
                offset,
                outside: Vec::new(),
                alive: true,
            });
            new_ids.push(id);
        }
        if !pending.is_empty() {
            return Err(Error::Degenerate("horizon is not a closed ridge cycle".into()));
        }
        assign_outside(&mut facets, &new_ids, &orphans, pts, eps);
        work.extend(new_ids);
    }

    Ok(facets.into_iter().filter(|f| f.alive).collect())
}

fn assign_outside(facets: &mut [Simplex], targets: &[usize], points: &[usize], pts: &[Vec<f64>], eps: f64) {
    for &p in points {
        let mut best: Option<(usize, f64)> = None;
        for &f in targets {
            let dist = facets[f].distance(&pts[p]);
            if dist > eps && best.is_none_or(|(_, b)| dist > b) {
                best = Some((f, dist));
            }
        }
        if let Some((f, _)) = best {
            facets[f].outside.push(p);
        }
    }
}

/// Groups simplices by the set of hull vertices lying on their hyperplane
/// and drops vertices that are not extreme.
fn merge_coplanar(pts: &[Vec<f64>], simplices: Vec<Simplex>, eps: f64) -> (Vec<Facet>, usize) {
    let mut hull_vertices: Vec<usize> = simplices.iter().flat_map(|s| s.verts.iter().copied()).collect();
    hull_vertices.sort_unstable();
    hull_vertices.dedup();

    let mut groups: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for (i, s) in simplices.iter().enumerate() {
        let on_plane: Vec<usize> = hull_vertices
            .iter()
            .copied()
            .filter(|&v| s.distance(&pts[v]).abs() <= eps)
            .collect();
        groups.entry(on_plane).or_default().push(i);
    }
    let merged = simplices.len() - groups.len();

    let mut facets: Vec<(Vec<usize>, Vec<f64>)> = groups
        .into_iter()
        .map(|(ids, members)| {
            let d = pts[0].len();
            let mut normal = vec![0.0; d];
            for &m in &members {
                normal.iter_mut().zip(&simplices[m].normal).for_each(|(a, b)| *a += b);
            }
            let norm = dot(&normal, &normal).sqrt();
            normal.iter_mut().for_each(|x| *x /= norm);
            (ids, normal)
        })
        .collect();

    // a vertex is extreme iff the facets through it meet only in it
    let mut interior_points = Vec::new();
    for &v in &hull_vertices {
        let mut meet: Option<Vec<usize>> = None;
        for (ids, _) in &facets {
            if ids.binary_search(&v).is_ok() {
                meet = Some(match meet {
                    None => ids.clone(),
                    Some(acc) => acc.into_iter().filter(|x| ids.binary_search(x).is_ok()).collect(),
                });
            }
        }
        if meet.is_some_and(|m| m.len() > 1) {
            interior_points.push(v);
        }
    }
    if !interior_points.is_empty() {
        for (ids, _) in facets.iter_mut() {
            ids.retain(|v| interior_points.binary_search(v).is_err());
        }
    }

    let out = facets
        .into_iter()
        .map(|(vertex_ids, normal)| {
            let offset = vertex_ids.iter().map(|&v| dot(&normal, &pts[v])).sum::<f64>() / vertex_ids.len() as f64;
            Facet {
                normal,
                offset,
                vertex_ids,
            }
        })
        .collect();
    (out, merged)
}
