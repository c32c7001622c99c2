use mopf::geometry::{convex_hull, strictly_dominates};
use mopf::search::select_pareto_faces;
use mopf::Tolerances;

fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Ray from the apex along the intersection of planes `i` and `j`, pointing
/// into the half-space of plane `k`.
fn edge_ray(n: &[[f64; 3]; 3], i: usize, j: usize, k: usize) -> [f64; 3] {
    let d = cross(&n[i], &n[j]);
    if dot(&d, &n[k]) < 0.0 {
        d
    } else {
        [-d[0], -d[1], -d[2]]
    }
}

/// Apex A with three facets, none facing the positive orthant, while the
/// edge AB between the first two does.
fn fixture() -> Vec<Vec<f64>> {
    let a = [0.5, 0.5, 0.5];
    let n = [[1.0, 1.0, -0.2], [1.0, -0.2, 1.0], [-1.0, 0.1, 0.1]];
    let at = |d: [f64; 3]| -> Vec<f64> { (0..3).map(|i| a[i] + 0.3 * d[i]).collect() };
    vec![
        a.to_vec(),
        at(edge_ray(&n, 0, 1, 2)),
        at(edge_ray(&n, 0, 2, 1)),
        at(edge_ray(&n, 1, 2, 0)),
    ]
}

fn lattice(points: &[Vec<f64>], steps: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for i in 0..=steps {
        for j in 0..=steps - i {
            for k in 0..=steps - i - j {
                let l = steps - i - j - k;
                let w = [i, j, k, l].map(|x| x as f64 / steps as f64);
                out.push((0..3).map(|d| (0..4).map(|p| w[p] * points[p][d]).sum()).collect());
            }
        }
    }
    out
}

#[test]
fn only_the_edge_is_selected() {
    let pts = fixture();
    let hull = convex_hull(&pts).unwrap();
    assert_eq!(hull.facets.len(), 4);
    let (faces, vertices) = select_pareto_faces(0, &hull, &Tolerances::default());
    assert_eq!(faces.len(), 1);
    assert_eq!(faces[0].face.dim, 1);
    assert_eq!(faces[0].face.vertex_ids, vec![0, 1]);
    assert_eq!(vertices, vec![0, 1]);
}

#[test]
fn brute_force_agrees_with_selection() {
    let pts = fixture();
    let cloud = lattice(&pts, 24);
    // points along AB are not dominated by anything in the polytope
    for step in 0..=10 {
        let t = step as f64 / 10.0;
        let x: Vec<f64> = (0..3).map(|d| (1.0 - t) * pts[0][d] + t * pts[1][d]).collect();
        assert!(!cloud.iter().any(|c| strictly_dominates(c, &x)), "t = {t}");
    }
    // each facet through A has a dominated interior point
    for (p, q) in [(1, 2), (1, 3), (2, 3)] {
        let centre: Vec<f64> = (0..3).map(|d| (pts[0][d] + pts[p][d] + pts[q][d]) / 3.0).collect();
        assert!(cloud.iter().any(|c| strictly_dominates(c, &centre)), "facet A{p}{q}");
    }
}
