//! Ground truth by exhaustive enumeration, plus front comparison and
//! sampled verification.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{convex_hull_with, dominance, pprune, AffineFrame, Dominance};
use crate::mdp::{long_term_return, policy_count, DeterministicPolicy, Mdp, PolicyEnumerator, ReturnPoint};
use crate::search::{
    canonical_faces, policies_on_face, select_pareto_faces, vertex_is_pareto, FaceRecord, ParetoFront, PhaseTimings,
    SearchStats, Stopwatch, VertexRecord,
};
use crate::tolerance::{Tolerances, COMPARE_TOL};

pub const DEFAULT_CAP: u128 = 1_000_000;

const CHUNK: u128 = 8192;

/// Enumerates and evaluates every deterministic policy and extracts the
/// Pareto front from the hull of the non-dominated returns.
pub fn brute_force_front(mdp: &Mdp, cap: u128) -> Result<ParetoFront> {
    brute_force_front_with(mdp, cap, &Tolerances::default(), true)
}

pub fn brute_force_front_with(mdp: &Mdp, cap: u128, tol: &Tolerances, parallel: bool) -> Result<ParetoFront> {
    mdp.validate().into_result()?;
    let total_watch = Stopwatch::start();
    let (states, actions) = (mdp.num_states(), mdp.num_actions());
    let count = policy_count(states, actions).ok_or(Error::CountOverflow { states, actions })?;
    if count > cap {
        return Err(Error::CapExceeded { count, cap });
    }
    let scale = mdp.return_scale();
    let mut timings = PhaseTimings::default();

    // streaming non-dominated filter; ranks stay ascending
    let watch = Stopwatch::start();
    let mut kept: Vec<(u128, ReturnPoint, Vec<f64>)> = Vec::new();
    let mut start = 0u128;
    while start < count {
        let end = (start + CHUNK).min(count);
        let fresh = evaluate_range(mdp, start, end, parallel)?;
        let mut pool = std::mem::take(&mut kept);
        pool.extend((start..end).zip(fresh).map(|(rank, r)| {
            let s = r.scaled(scale);
            (rank, r, s)
        }));
        let coords: Vec<Vec<f64>> = pool.iter().map(|p| p.2.clone()).collect();
        let nd = pprune(&coords)?;
        let mut nd_iter = nd.into_iter().peekable();
        kept = pool
            .into_iter()
            .enumerate()
            .filter_map(|(i, p)| {
                if nd_iter.peek() == Some(&i) {
                    nd_iter.next();
                    Some(p)
                } else {
                    None
                }
            })
            .collect();
        start = end;
    }
    timings.evaluation = watch.secs();

    // collapse coincident returns onto the lowest-ranked policy
    let mut points: Vec<(DeterministicPolicy, Vec<DeterministicPolicy>, ReturnPoint, Vec<f64>)> = Vec::new();
    for (rank, ret, s) in kept {
        let policy = PolicyEnumerator::unrank(rank, states, actions);
        match points
            .iter_mut()
            .find(|p| dominance(&p.3, &s, tol.equal).ok() == Some(Dominance::Equal))
        {
            Some(p) => p.1.push(policy),
            None => points.push((policy, Vec::new(), ret, s)),
        }
    }

    let mut warnings = Vec::new();
    if points.iter().any(|p| !p.1.is_empty()) {
        warnings.push("deterministic policies with coincident returns were merged".to_string());
    }

    let mut iterations = 0;
    let (chosen, faces): (Vec<usize>, Vec<FaceRecord>) = if points.len() == 1 {
        (vec![0], Vec::new())
    } else {
        let watch = Stopwatch::start();
        let coords: Vec<Vec<f64>> = points.iter().map(|p| p.3.clone()).collect();
        let hull = convex_hull_with(&coords, tol.geom, tol.rank)?;
        timings.hull = watch.secs();
        if hull.affine_dim < mdp.num_objectives() {
            warnings.push(format!(
                "non-dominated returns span only {} of {} dimensions",
                hull.affine_dim,
                mdp.num_objectives()
            ));
        }
        let watch = Stopwatch::start();
        let mut raw: Vec<FaceRecord> = Vec::new();
        for &apex in &hull.vertices {
            iterations += 1;
            let (selected, _) = select_pareto_faces(apex, &hull, tol);
            for s in selected {
                if !raw.iter().any(|f| f.vertex_ids == s.face.vertex_ids) {
                    raw.push(FaceRecord {
                        vertex_ids: s.face.vertex_ids,
                        dim: s.face.dim,
                        normals: s.normals,
                        certificate: s.certificate,
                    });
                }
            }
        }
        let mut chosen: Vec<usize> = raw.iter().flat_map(|f| f.vertex_ids.iter().copied()).collect();
        chosen.sort_unstable();
        chosen.dedup();
        if chosen.is_empty() {
            chosen = hull.vertices.iter().copied().filter(|&v| vertex_is_pareto(&hull, v, tol)).collect();
        }
        timings.selection = watch.secs();
        (chosen, raw)
    };

    let mut remap = vec![usize::MAX; points.len()];
    for (new, &old) in chosen.iter().enumerate() {
        remap[old] = new;
    }
    let faces: Vec<FaceRecord> = faces
        .into_iter()
        .map(|mut f| {
            f.vertex_ids = f.vertex_ids.iter().map(|&v| remap[v]).collect();
            f.vertex_ids.sort_unstable();
            f
        })
        .collect();
    let vertices: Vec<VertexRecord> = chosen
        .iter()
        .enumerate()
        .map(|(id, &i)| VertexRecord {
            id,
            policy: points[i].0.clone(),
            co_policies: points[i].1.clone(),
            ret: points[i].2.clone(),
        })
        .collect();
    let scaled: Vec<Vec<f64>> = chosen.iter().map(|&i| points[i].3.clone()).collect();
    let faces = canonical_faces(faces, &scaled, tol);
    timings.total = total_watch.secs();

    Ok(ParetoFront {
        objectives: mdp.num_objectives(),
        scale,
        vertices,
        faces,
        stats: SearchStats {
            iterations,
            policies_evaluated: count as usize,
            planner_calls: 0,
            degeneracy_warnings: warnings,
            timings,
        },
    })
}

fn evaluate_one(mdp: &Mdp, rank: u128) -> Result<ReturnPoint> {
    long_term_return(mdp, &PolicyEnumerator::unrank(rank, mdp.num_states(), mdp.num_actions()))
}

#[cfg(feature = "parallel")]
fn evaluate_range(mdp: &Mdp, start: u128, end: u128, parallel: bool) -> Result<Vec<ReturnPoint>> {
    use rayon::prelude::*;
    if parallel {
        let ranks: Vec<u128> = (start..end).collect();
        ranks.par_iter().map(|&r| evaluate_one(mdp, r)).collect()
    } else {
        (start..end).map(|r| evaluate_one(mdp, r)).collect()
    }
}

#[cfg(not(feature = "parallel"))]
fn evaluate_range(mdp: &Mdp, start: u128, end: u128, _parallel: bool) -> Result<Vec<ReturnPoint>> {
    (start..end).map(|r| evaluate_one(mdp, r)).collect()
}

/// Returns of every deterministic policy, in lexicographic policy order.
pub fn all_returns(mdp: &Mdp, cap: u128) -> Result<Vec<ReturnPoint>> {
    let (states, actions) = (mdp.num_states(), mdp.num_actions());
    let count = policy_count(states, actions).ok_or(Error::CountOverflow { states, actions })?;
    if count > cap {
        return Err(Error::CapExceeded { count, cap });
    }
    evaluate_range(mdp, 0, count, true)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub vertex_match: bool,
    /// Scaled returns of the vertices of `a` left without a partner.
    pub unmatched_a: Vec<Vec<f64>>,
    pub unmatched_b: Vec<Vec<f64>>,
    pub face_match: bool,
    /// Faces of `a` (in `a`'s ids) with no counterpart in `b`.
    pub faces_only_a: Vec<Vec<usize>>,
    pub faces_only_b: Vec<Vec<usize>>,
    pub max_vertex_distance: f64,
    /// Pairs `(id in a, id in b)`.
    pub matching: Vec<(usize, usize)>,
}

impl ComparisonReport {
    pub fn matches(&self) -> bool {
        self.vertex_match && self.face_match
    }
}

fn linf(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Matches vertices greedily by scaled L-infinity distance, closest pairs
/// first, then compares faces through the induced id map.
pub fn compare_fronts(a: &ParetoFront, b: &ParetoFront, tol: f64) -> Result<ComparisonReport> {
    if a.objectives != b.objectives {
        return Err(Error::Dimension(format!(
            "fronts have {} and {} objectives",
            a.objectives, b.objectives
        )));
    }
    let sa: Vec<Vec<f64>> = (0..a.vertices.len()).map(|i| a.scaled_return(i)).collect();
    let sb: Vec<Vec<f64>> = (0..b.vertices.len()).map(|i| b.scaled_return(i)).collect();

    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for (i, x) in sa.iter().enumerate() {
        for (j, y) in sb.iter().enumerate() {
            let d = linf(x, y);
            if d <= tol {
                pairs.push((d, i, j));
            }
        }
    }
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.cmp(&q.1)).then(p.2.cmp(&q.2)));
    let mut to_b = vec![None; sa.len()];
    let mut to_a = vec![None; sb.len()];
    let mut max_d: f64 = 0.0;
    for (d, i, j) in pairs {
        if to_b[i].is_none() && to_a[j].is_none() {
            to_b[i] = Some(j);
            to_a[j] = Some(i);
            max_d = max_d.max(d);
        }
    }
    let unmatched_a: Vec<Vec<f64>> = (0..sa.len()).filter(|&i| to_b[i].is_none()).map(|i| sa[i].clone()).collect();
    let unmatched_b: Vec<Vec<f64>> = (0..sb.len()).filter(|&j| to_a[j].is_none()).map(|j| sb[j].clone()).collect();

    let translate = |ids: &[usize], map: &[Option<usize>]| -> Option<Vec<usize>> {
        let mut out: Vec<usize> = ids.iter().map(|&v| map[v]).collect::<Option<_>>()?;
        out.sort_unstable();
        Some(out)
    };
    let b_faces: Vec<&Vec<usize>> = b.faces.iter().map(|f| &f.vertex_ids).collect();
    let a_faces: Vec<&Vec<usize>> = a.faces.iter().map(|f| &f.vertex_ids).collect();
    let faces_only_a: Vec<Vec<usize>> = a
        .faces
        .iter()
        .filter(|f| match translate(&f.vertex_ids, &to_b) {
            Some(t) => !b_faces.contains(&&t),
            None => true,
        })
        .map(|f| f.vertex_ids.clone())
        .collect();
    let faces_only_b: Vec<Vec<usize>> = b
        .faces
        .iter()
        .filter(|f| match translate(&f.vertex_ids, &to_a) {
            Some(t) => !a_faces.contains(&&t),
            None => true,
        })
        .map(|f| f.vertex_ids.clone())
        .collect();

    let mut matching: Vec<(usize, usize)> = to_b.iter().enumerate().filter_map(|(i, j)| j.map(|j| (i, j))).collect();
    matching.sort_unstable();
    Ok(ComparisonReport {
        vertex_match: unmatched_a.is_empty() && unmatched_b.is_empty(),
        unmatched_a,
        unmatched_b,
        face_match: faces_only_a.is_empty() && faces_only_b.is_empty(),
        faces_only_a,
        faces_only_b,
        max_vertex_distance: max_d,
        matching,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleFailure {
    pub face: usize,
    pub weights: Vec<f64>,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub faces_checked: usize,
    pub samples: usize,
    pub max_affine_residual: f64,
    pub failures: Vec<SampleFailure>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Barycentric weights: an even grid along edges; vertices, centroid and
/// flat Dirichlet draws on larger faces.
pub fn face_samples(k: usize, n: usize, seed: u64) -> Vec<Vec<f64>> {
    if k == 0 || n == 0 {
        return Vec::new();
    }
    if k == 1 {
        return vec![vec![1.0]];
    }
    if k == 2 {
        if n == 1 {
            return vec![vec![0.5, 0.5]];
        }
        return (0..n)
            .map(|i| {
                let b = i as f64 / (n - 1) as f64;
                vec![1.0 - b, b]
            })
            .collect();
    }
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(n);
    out.push(vec![1.0 / k as f64; k]);
    for v in 0..k {
        if out.len() >= n {
            break;
        }
        let mut w = vec![0.0; k];
        w[v] = 1.0;
        out.push(w);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while out.len() < n {
        let draws: Vec<f64> = (0..k).map(|_| Exp1.sample(&mut rng)).collect();
        let total: f64 = draws.iter().sum();
        let mut w: Vec<f64> = draws.iter().map(|d| d / total).collect();
        let drift = 1.0 - w.iter().sum::<f64>();
        w[0] += drift;
        out.push(w);
    }
    out
}

/// Mixes vertex policies on every face and checks the true returns.
pub fn verify_front(mdp: &Mdp, front: &ParetoFront, samples_per_face: usize, cap: u128) -> Result<VerificationReport> {
    verify_front_with(mdp, front, samples_per_face, cap, COMPARE_TOL)
}

pub fn verify_front_with(
    mdp: &Mdp,
    front: &ParetoFront,
    samples_per_face: usize,
    cap: u128,
    tol: f64,
) -> Result<VerificationReport> {
    let scale = front.scale;
    let det: Vec<Vec<f64>> = all_returns(mdp, cap)?.iter().map(|r| r.scaled(scale)).collect();
    let mut report = VerificationReport::default();
    for (fid, face) in front.faces.iter().enumerate() {
        report.faces_checked += 1;
        let corners: Vec<Vec<f64>> = face.vertex_ids.iter().map(|&v| front.scaled_return(v)).collect();
        let refs: Vec<&[f64]> = corners.iter().map(|c| c.as_slice()).collect();
        let frame = AffineFrame::new(&refs, crate::tolerance::RANK_TOL);
        for weights in face_samples(face.vertex_ids.len(), samples_per_face, fid as u64) {
            report.samples += 1;
            let (_, ret) = policies_on_face(mdp, front, fid, &weights)?;
            let s = ret.scaled(scale);
            let residual = frame.residual(&s);
            report.max_affine_residual = report.max_affine_residual.max(residual);
            if residual > tol {
                report.failures.push(SampleFailure {
                    face: fid,
                    weights: weights.clone(),
                    reason: format!("return is {residual:e} off the face's affine hull"),
                });
            }
            let beaten = det.iter().position(|d| {
                d.iter().zip(&s).all(|(a, b)| *a >= b - tol) && d.iter().zip(&s).any(|(a, b)| *a > b + tol)
            });
            if let Some(p) = beaten {
                report.failures.push(SampleFailure {
                    face: fid,
                    weights,
                    reason: format!(
                        "dominated by deterministic policy {:?}",
                        PolicyEnumerator::unrank(p as u128, mdp.num_states(), mdp.num_actions()).actions()
                    ),
                });
            }
        }
    }
    Ok(report)
}
