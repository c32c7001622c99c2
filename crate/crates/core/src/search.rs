//! Pareto front search over deterministic-policy vertices.
//!
//! Starting from one scalarized optimum, every discovered Pareto vertex is
//! expanded once: its single-state deviations are evaluated (each policy at
//! most once per run), pruned to the non-dominated ones, and hulled together
//! with the vertex. The hull faces through the vertex whose normal cone holds
//! a strictly positive direction are Pareto faces of the whole return
//! polytope, and their vertices join the queue.

use std::collections::{BTreeMap, HashMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    convex_hull_with, dominance, face_normal_cone, pareto_lp, pprune, subfaces_at, top_faces,
    AffineFrame, Dominance, FaceDescriptor, LocalHull, LpCertificate,
};
use crate::mdp::{
    long_term_return, mix_policies, neighbors_one, solve_scalarized, DeterministicPolicy, Mdp,
    ReturnPoint, StochasticPolicy,
};
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    /// Seeds the initial scalarization direction.
    pub seed: u64,
    pub tolerances: Tolerances,
    /// Evaluate neighbor policies on the rayon pool when available.
    pub parallel: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            tolerances: Tolerances::default(),
            parallel: true,
        }
    }
}

/// A deterministic Pareto-optimal policy and its return.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexRecord {
    pub id: usize,
    #[serde(rename = "actions")]
    pub policy: DeterministicPolicy,
    /// Other deterministic policies with the same return.
    pub co_policies: Vec<DeterministicPolicy>,
    #[serde(rename = "return")]
    pub ret: ReturnPoint,
}

/// A Pareto face, keyed by its sorted vertex ids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaceRecord {
    pub vertex_ids: Vec<usize>,
    pub dim: usize,
    /// Normal cone generators the certificate was computed against.
    pub normals: Vec<Vec<f64>>,
    #[serde(flatten)]
    pub certificate: LpCertificate,
}

/// Wall time per phase, in seconds. Not serialized.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PhaseTimings {
    pub planning: f64,
    pub evaluation: f64,
    pub hull: f64,
    pub selection: f64,
    pub total: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SearchStats {
    pub iterations: usize,
    pub policies_evaluated: usize,
    pub planner_calls: usize,
    #[serde(skip)]
    pub degeneracy_warnings: Vec<String>,
    #[serde(skip)]
    pub timings: PhaseTimings,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParetoFront {
    pub objectives: usize,
    /// Factor applied to returns before any tolerance comparison.
    pub scale: f64,
    pub vertices: Vec<VertexRecord>,
    pub faces: Vec<FaceRecord>,
    pub stats: SearchStats,
}

impl ParetoFront {
    pub fn scaled_return(&self, vertex: usize) -> Vec<f64> {
        self.vertices[vertex].ret.scaled(self.scale)
    }

    /// Vertex ids sharing at least one face with `vertex`.
    pub fn face_neighbors(&self, vertex: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .faces
            .iter()
            .filter(|f| f.vertex_ids.contains(&vertex))
            .flat_map(|f| f.vertex_ids.iter().copied())
            .filter(|&v| v != vertex)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Ids of the 1-faces (edges) as vertex pairs.
    pub fn edges(&self) -> Vec<[usize; 2]> {
        self.faces
            .iter()
            .filter(|f| f.dim == 1)
            .map(|f| [f.vertex_ids[0], f.vertex_ids[1]])
            .collect()
    }
}

mod clock {
    #[cfg(not(target_arch = "wasm32"))]
    pub struct Stopwatch(std::time::Instant);
    #[cfg(target_arch = "wasm32")]
    pub struct Stopwatch;

    impl Stopwatch {
        #[cfg(not(target_arch = "wasm32"))]
        pub fn start() -> Self {
            Self(std::time::Instant::now())
        }
        #[cfg(target_arch = "wasm32")]
        pub fn start() -> Self {
            Self
        }
        #[cfg(not(target_arch = "wasm32"))]
        pub fn secs(&self) -> f64 {
            self.0.elapsed().as_secs_f64()
        }
        #[cfg(target_arch = "wasm32")]
        pub fn secs(&self) -> f64 {
            0.0
        }
    }
}
pub(crate) use clock::Stopwatch;

/// Positive weights `1 + eta_d` with `eta_d` drawn from `(0, 0.01)`.
pub fn initial_weights(seed: u64, objectives: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..objectives)
        .map(|_| 1.0 + 0.01 * rng.random_range(f64::MIN_POSITIVE..1.0))
        .collect()
}

/// A face picked by [`select_pareto_faces`], in hull point indices.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectedFace {
    pub face: FaceDescriptor,
    pub normals: Vec<Vec<f64>>,
    pub certificate: LpCertificate,
}

fn is_subset(small: &[usize], big: &[usize]) -> bool {
    small.iter().all(|v| big.binary_search(v).is_ok())
}

/// Breadth-first descent from the top faces through `apex` down to edges.
/// A face whose normal cone admits a strictly positive combination is kept
/// and not descended; otherwise its subfaces through the apex are queued.
/// Faces inside an already kept face are skipped.
pub fn select_pareto_faces(apex: usize, hull: &LocalHull, tol: &Tolerances) -> (Vec<SelectedFace>, Vec<usize>) {
    let mut queue: VecDeque<FaceDescriptor> = top_faces(hull, apex).into_iter().filter(|f| f.dim >= 1).collect();
    let mut kept: Vec<SelectedFace> = Vec::new();
    let mut tested: Vec<Vec<usize>> = Vec::new();
    while let Some(face) = queue.pop_front() {
        if kept.iter().any(|k| is_subset(&face.vertex_ids, &k.face.vertex_ids)) {
            continue;
        }
        if tested.contains(&face.vertex_ids) {
            continue;
        }
        tested.push(face.vertex_ids.clone());
        let normals = face_normal_cone(hull, &face.vertex_ids);
        let certificate = pareto_lp(&normals);
        if certificate.t_star > tol.pos {
            kept.push(SelectedFace {
                face,
                normals,
                certificate,
            });
        } else if face.dim > 1 {
            queue.extend(subfaces_at(&face, hull, apex));
        }
    }
    let mut vertices: Vec<usize> = kept.iter().flat_map(|k| k.face.vertex_ids.iter().copied()).collect();
    vertices.sort_unstable();
    vertices.dedup();
    (kept, vertices)
}

/// Whether hull vertex `v` alone passes the positive-normal test.
pub fn vertex_is_pareto(hull: &LocalHull, v: usize, tol: &Tolerances) -> bool {
    hull.is_vertex(v) && pareto_lp(&face_normal_cone(hull, &[v])).t_star > tol.pos
}

/// A point of a local neighborhood: one return, possibly several policies.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalPoint {
    pub policy: DeterministicPolicy,
    pub co_policies: Vec<DeterministicPolicy>,
    pub ret: ReturnPoint,
    pub scaled: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExploredFace {
    /// Indices into [`Exploration::points`]; index 0 is the explored vertex.
    pub members: Vec<usize>,
    pub dim: usize,
    pub normals: Vec<Vec<f64>>,
    pub certificate: LpCertificate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Exploration {
    pub points: Vec<LocalPoint>,
    pub faces: Vec<ExploredFace>,
    pub newly_evaluated: usize,
    pub warnings: Vec<String>,
}

impl Exploration {
    /// Point indices appearing on at least one face, apex excluded.
    pub fn face_vertices(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self.faces.iter().flat_map(|f| f.members.iter().copied()).filter(|&i| i != 0).collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Evaluation cache and configuration shared across one search run.
pub struct SearchContext<'a> {
    mdp: &'a Mdp,
    config: SearchConfig,
    scale: f64,
    visited: HashMap<DeterministicPolicy, ReturnPoint>,
    policies_evaluated: usize,
    timings: PhaseTimings,
}

impl<'a> SearchContext<'a> {
    pub fn new(mdp: &'a Mdp, config: SearchConfig) -> Self {
        Self {
            mdp,
            config,
            scale: mdp.return_scale(),
            visited: HashMap::new(),
            policies_evaluated: 0,
            timings: PhaseTimings::default(),
        }
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn policies_evaluated(&self) -> usize {
        self.policies_evaluated
    }

    /// Returns of `policies`, evaluating only those not seen before.
    pub fn evaluate_all(&mut self, policies: &[DeterministicPolicy]) -> Result<Vec<ReturnPoint>> {
        let watch = Stopwatch::start();
        let missing: Vec<&DeterministicPolicy> = {
            let mut seen = std::collections::HashSet::new();
            policies
                .iter()
                .filter(|p| !self.visited.contains_key(*p) && seen.insert(*p))
                .collect()
        };
        let fresh = evaluate_batch(self.mdp, &missing, self.config.parallel)?;
        self.policies_evaluated += fresh.len();
        for (p, r) in missing.into_iter().zip(fresh) {
            self.visited.insert(p.clone(), r);
        }
        self.timings.evaluation += watch.secs();
        Ok(policies.iter().map(|p| self.visited[p].clone()).collect())
    }

    /// Finds the Pareto faces through `vertex` from its one-state deviations.
    pub fn explore_vertex(&mut self, vertex: &VertexRecord) -> Result<Exploration> {
        let tol = self.config.tolerances;
        let before = self.policies_evaluated;
        let neighbors = neighbors_one(&vertex.policy, self.mdp.num_actions());
        let returns = self.evaluate_all(&neighbors)?;
        let apex_scaled = vertex.ret.scaled(self.scale);

        let mut points = vec![LocalPoint {
            policy: vertex.policy.clone(),
            co_policies: Vec::new(),
            ret: vertex.ret.clone(),
            scaled: apex_scaled.clone(),
        }];
        let mut warnings = Vec::new();
        if !neighbors.is_empty() {
            let scaled: Vec<Vec<f64>> = returns.iter().map(|r| r.scaled(self.scale)).collect();
            let nd = pprune(&scaled)?;
            for i in nd {
                let existing = points
                    .iter()
                    .position(|p| dominance(&p.scaled, &scaled[i], tol.equal).ok() == Some(Dominance::Equal));
                match existing {
                    Some(j) => points[j].co_policies.push(neighbors[i].clone()),
                    None => points.push(LocalPoint {
                        policy: neighbors[i].clone(),
                        co_policies: Vec::new(),
                        ret: returns[i].clone(),
                        scaled: scaled[i].clone(),
                    }),
                }
            }
            if points.iter().any(|p| !p.co_policies.is_empty()) {
                warnings.push(format!(
                    "policy {:?}: neighbors with coincident returns were merged",
                    vertex.policy.actions()
                ));
            }
        }

        let mut faces = Vec::new();
        if points.len() > 1 {
            let watch = Stopwatch::start();
            let coords: Vec<Vec<f64>> = points.iter().map(|p| p.scaled.clone()).collect();
            let hull = convex_hull_with(&coords, tol.geom, tol.rank)?;
            self.timings.hull += watch.secs();
            if !hull.is_vertex(0) {
                let blocker = (1..points.len())
                    .find(|&i| dominance(&points[i].scaled, &apex_scaled, 0.0).ok() == Some(Dominance::Dominates));
                let detail = match blocker {
                    Some(i) => format!("dominated by neighbor {:?}", points[i].policy.actions()),
                    None => "inside the hull of its neighbors".to_string(),
                };
                return Err(Error::SearchAborted(format!(
                    "return of policy {:?} is not a vertex of its local hull ({detail})",
                    vertex.policy.actions()
                )));
            }
            if hull.affine_dim < self.mdp.num_objectives() && self.mdp.num_objectives() > 1 {
                warnings.push(format!(
                    "policy {:?}: local hull spans only {} of {} dimensions",
                    vertex.policy.actions(),
                    hull.affine_dim,
                    self.mdp.num_objectives()
                ));
            }
            let watch = Stopwatch::start();
            let (selected, _) = select_pareto_faces(0, &hull, &tol);
            self.timings.selection += watch.secs();
            faces = selected
                .into_iter()
                .map(|s| ExploredFace {
                    members: s.face.vertex_ids,
                    dim: s.face.dim,
                    normals: s.normals,
                    certificate: s.certificate,
                })
                .collect();
        }

        Ok(Exploration {
            points,
            faces,
            newly_evaluated: self.policies_evaluated - before,
            warnings,
        })
    }
}

#[cfg(feature = "parallel")]
fn evaluate_batch(mdp: &Mdp, policies: &[&DeterministicPolicy], parallel: bool) -> Result<Vec<ReturnPoint>> {
    use rayon::prelude::*;
    if parallel && policies.len() > 1 {
        policies.par_iter().map(|p| long_term_return(mdp, *p)).collect()
    } else {
        policies.iter().map(|p| long_term_return(mdp, *p)).collect()
    }
}

#[cfg(not(feature = "parallel"))]
fn evaluate_batch(mdp: &Mdp, policies: &[&DeterministicPolicy], _parallel: bool) -> Result<Vec<ReturnPoint>> {
    policies.iter().map(|p| long_term_return(mdp, *p)).collect()
}

/// Vertex table keyed by return, merging coincident returns.
struct VertexTable {
    vertices: Vec<VertexRecord>,
    scaled: Vec<Vec<f64>>,
    scale: f64,
    eps: f64,
}

impl VertexTable {
    fn find(&self, scaled: &[f64]) -> Option<usize> {
        self.scaled
            .iter()
            .position(|s| s.iter().zip(scaled).all(|(a, b)| (a - b).abs() <= self.eps))
    }

    /// Returns the id and whether it is new.
    fn insert(&mut self, point: &LocalPoint) -> (usize, bool) {
        if let Some(id) = self.find(&point.scaled) {
            let rec = &mut self.vertices[id];
            for p in std::iter::once(&point.policy).chain(&point.co_policies) {
                if *p != rec.policy && !rec.co_policies.contains(p) {
                    rec.co_policies.push(p.clone());
                }
            }
            return (id, false);
        }
        let id = self.vertices.len();
        self.vertices.push(VertexRecord {
            id,
            policy: point.policy.clone(),
            co_policies: point.co_policies.clone(),
            ret: point.ret.clone(),
        });
        self.scaled.push(point.ret.scaled(self.scale));
        (id, true)
    }
}

/// Computes the exact Pareto front of `mdp`.
pub fn search(mdp: &Mdp, config: &SearchConfig) -> Result<ParetoFront> {
    mdp.validate().into_result()?;
    let total = Stopwatch::start();
    let mut ctx = SearchContext::new(mdp, config.clone());

    let watch = Stopwatch::start();
    let weights = initial_weights(config.seed, mdp.num_objectives());
    let start = solve_scalarized(mdp, &weights)?;
    ctx.timings.planning = watch.secs();

    let start_ret = ctx.evaluate_all(std::slice::from_ref(&start))?.remove(0);
    let mut table = VertexTable {
        vertices: Vec::new(),
        scaled: Vec::new(),
        scale: ctx.scale,
        eps: config.tolerances.equal,
    };
    table.insert(&LocalPoint {
        scaled: start_ret.scaled(ctx.scale),
        policy: start,
        co_policies: Vec::new(),
        ret: start_ret,
    });

    let mut queue = VecDeque::from([0usize]);
    let mut faces: BTreeMap<Vec<usize>, FaceRecord> = BTreeMap::new();
    let mut warnings = Vec::new();
    let mut iterations = 0;
    while let Some(vid) = queue.pop_front() {
        iterations += 1;
        let vertex = table.vertices[vid].clone();
        let exploration = ctx.explore_vertex(&vertex)?;
        warnings.extend(exploration.warnings.iter().cloned());

        let mut ids: HashMap<usize, usize> = HashMap::from([(0, vid)]);
        for &m in exploration.faces.iter().flat_map(|f| &f.members) {
            if ids.contains_key(&m) {
                continue;
            }
            let (id, fresh) = table.insert(&exploration.points[m]);
            if fresh {
                queue.push_back(id);
            }
            ids.insert(m, id);
        }
        if !exploration.points[0].co_policies.is_empty() {
            table.insert(&exploration.points[0]);
        }
        for face in exploration.faces {
            let mut key: Vec<usize> = face.members.iter().map(|m| ids[m]).collect();
            key.sort_unstable();
            key.dedup();
            faces.entry(key.clone()).or_insert(FaceRecord {
                vertex_ids: key,
                dim: face.dim,
                normals: face.normals,
                certificate: face.certificate,
            });
        }
    }

    let scaled = table.scaled;
    let faces = canonical_faces(faces.into_values().collect(), &scaled, &config.tolerances);
    ctx.timings.total = total.secs();
    Ok(ParetoFront {
        objectives: mdp.num_objectives(),
        scale: ctx.scale,
        vertices: table.vertices,
        faces,
        stats: SearchStats {
            iterations,
            policies_evaluated: ctx.policies_evaluated,
            planner_calls: 1,
            degeneracy_warnings: warnings,
            timings: ctx.timings,
        },
    })
}

/// Merges face pieces spanning the same affine hull, drops faces contained
/// in others and sorts by vertex set.
///
/// A Pareto face of the return polytope can have vertices that are not
/// single-state deviations of each other (e.g. a quadrilateral whose
/// diagonal differs in two states). Each local hull then only sees the part
/// of the face next to its apex; pieces sharing a vertex and an affine hull
/// belong to the same face.
pub fn canonical_faces(faces: Vec<FaceRecord>, scaled: &[Vec<f64>], tol: &Tolerances) -> Vec<FaceRecord> {
    let n = faces.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    let frames: Vec<AffineFrame> = faces
        .iter()
        .map(|f| {
            let pts: Vec<&[f64]> = f.vertex_ids.iter().map(|&v| scaled[v].as_slice()).collect();
            AffineFrame::new(&pts, tol.rank)
        })
        .collect();
    let coplanar_tol = 10.0 * tol.geom;
    for i in 0..n {
        for j in i + 1..n {
            if faces[i].dim != faces[j].dim || !faces[i].vertex_ids.iter().any(|v| faces[j].vertex_ids.contains(v)) {
                continue;
            }
            let same = faces[j].vertex_ids.iter().all(|&v| frames[i].residual(&scaled[v]) <= coplanar_tol)
                && faces[i].vertex_ids.iter().all(|&v| frames[j].residual(&scaled[v]) <= coplanar_tol);
            if same {
                let (a, b) = (root(&mut parent, i), root(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }

    let mut groups: BTreeMap<usize, FaceRecord> = BTreeMap::new();
    for (i, face) in faces.into_iter().enumerate() {
        let r = root(&mut parent, i);
        match groups.get_mut(&r) {
            Some(g) => {
                g.vertex_ids.extend(face.vertex_ids);
                g.vertex_ids.sort_unstable();
                g.vertex_ids.dedup();
            }
            None => {
                groups.insert(r, face);
            }
        }
    }
    let merged: Vec<FaceRecord> = groups.into_values().collect();
    let mut out: Vec<FaceRecord> = merged
        .iter()
        .filter(|f| {
            !merged
                .iter()
                .any(|g| g.vertex_ids.len() > f.vertex_ids.len() && is_subset(&f.vertex_ids, &g.vertex_ids))
        })
        .cloned()
        .collect();
    out.sort_by(|a, b| a.vertex_ids.cmp(&b.vertex_ids));
    out.dedup_by(|a, b| a.vertex_ids == b.vertex_ids);
    out
}

/// Mixes the vertex policies of a face and evaluates the mixture exactly.
pub fn policies_on_face(
    mdp: &Mdp,
    front: &ParetoFront,
    face_id: usize,
    weights: &[f64],
) -> Result<(StochasticPolicy, ReturnPoint)> {
    let face = front.faces.get(face_id).ok_or(Error::UnknownFace(face_id))?;
    if weights.len() != face.vertex_ids.len() {
        return Err(Error::Dimension(format!(
            "{} weights for a face with {} vertices",
            weights.len(),
            face.vertex_ids.len()
        )));
    }
    let policies: Vec<DeterministicPolicy> = face.vertex_ids.iter().map(|&v| front.vertices[v].policy.clone()).collect();
    let mixed = mix_policies(&policies, weights, mdp.num_actions())?;
    let ret = long_term_return(mdp, &mixed)?;
    Ok((mixed, ret))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{convex_hull, strictly_dominates};
    use crate::mdp::{enumerate_deterministic, gen_random_mdp, hamming_distance};

    #[test]
    fn weights_are_generic_and_positive() {
        let w = initial_weights(3, 4);
        assert!(w.iter().all(|&x| x > 1.0 && x < 1.01));
        assert_eq!(w, initial_weights(3, 4));
        assert_ne!(w, initial_weights(4, 4));
    }

    #[test]
    fn single_objective_front_is_one_vertex() {
        let mdp = gen_random_mdp(1, 4, 3, 1, 0.9).unwrap();
        let front = search(&mdp, &SearchConfig::default()).unwrap();
        assert_eq!(front.vertices.len(), 1);
        assert!(front.faces.is_empty());
        assert_eq!(front.vertices[0].policy, solve_scalarized(&mdp, &initial_weights(0, 1)).unwrap());
    }

    #[test]
    fn identical_objectives_collapse() {
        let base = gen_random_mdp(2, 4, 3, 1, 0.9).unwrap();
        let reward: Vec<f64> = base.reward_flat().iter().flat_map(|&r| [r, r, r]).collect();
        let mdp = Mdp::new(4, 3, 3, base.transition_flat().to_vec(), reward, 0.9, base.mu().to_vec()).unwrap();
        let front = search(&mdp, &SearchConfig::default()).unwrap();
        assert_eq!(front.vertices.len(), 1);
        assert!(front.faces.is_empty());
        assert_eq!(front.stats.iterations, 1);
    }

    fn three_action_bandit() -> Mdp {
        Mdp::from_nested(
            &[vec![vec![1.0], vec![1.0], vec![1.0]]],
            &[vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![0.4, 0.4]]],
            0.0,
            vec![1.0],
        )
        .unwrap()
    }

    #[test]
    fn bandit_edge_from_either_end() {
        let mdp = three_action_bandit();
        let mut ctx = SearchContext::new(&mdp, SearchConfig::default());
        for action in [0, 1] {
            let policy = DeterministicPolicy::new(vec![action], 3).unwrap();
            let ret = long_term_return(&mdp, &policy).unwrap();
            let v = VertexRecord {
                id: 0,
                policy,
                co_policies: vec![],
                ret,
            };
            let e = ctx.explore_vertex(&v).unwrap();
            assert_eq!(e.faces.len(), 1);
            assert_eq!(e.faces[0].dim, 1);
            let members: Vec<usize> = e.faces[0].members.iter().map(|&m| e.points[m].policy.action(0)).collect();
            let mut members = members;
            members.sort_unstable();
            assert_eq!(members, vec![0, 1]);
        }
        // every policy is now cached
        let policy = DeterministicPolicy::new(vec![0], 3).unwrap();
        let ret = long_term_return(&mdp, &policy).unwrap();
        let again = ctx
            .explore_vertex(&VertexRecord {
                id: 0,
                policy,
                co_policies: vec![],
                ret,
            })
            .unwrap();
        assert_eq!(again.newly_evaluated, 0);

        let front = search(&mdp, &SearchConfig::default()).unwrap();
        assert_eq!(front.vertices.len(), 2);
        assert_eq!(front.faces.len(), 1);
        assert_eq!(front.stats.iterations, 2);
    }

    #[test]
    fn interior_start_aborts() {
        let mdp = Mdp::from_nested(
            &[vec![vec![1.0]; 4]],
            &[vec![vec![2.0, -1.0], vec![-1.0, 2.0], vec![1.0, 1.0], vec![0.6, 0.6]]],
            0.0,
            vec![1.0],
        )
        .unwrap();
        let policy = DeterministicPolicy::new(vec![3], 4).unwrap();
        let ret = long_term_return(&mdp, &policy).unwrap();
        let mut ctx = SearchContext::new(&mdp, SearchConfig::default());
        let out = ctx.explore_vertex(&VertexRecord {
            id: 0,
            policy,
            co_policies: vec![],
            ret,
        });
        assert!(matches!(out, Err(Error::SearchAborted(_))));
    }

    #[test]
    fn isolated_optimum_has_no_faces() {
        // the second action is worse in both objectives
        let mdp = Mdp::from_nested(
            &[vec![vec![1.0], vec![1.0]]],
            &[vec![vec![1.0, 1.0], vec![0.5, 0.2]]],
            0.5,
            vec![1.0],
        )
        .unwrap();
        let front = search(&mdp, &SearchConfig::default()).unwrap();
        assert_eq!(front.vertices.len(), 1);
        assert!(front.faces.is_empty());
    }

    #[test]
    fn all_facets_pass_without_descent() {
        // a simplex whose three apex facets all face the positive orthant
        let pts = vec![
            vec![1.0, 1.0, 1.0],
            vec![1.2, 0.9, 0.8],
            vec![0.8, 1.2, 0.9],
            vec![0.9, 0.8, 1.2],
            vec![0.0, 0.0, 0.0],
        ];
        let hull = convex_hull(&pts).unwrap();
        let (faces, vertices) = select_pareto_faces(0, &hull, &Tolerances::default());
        assert!(faces.iter().all(|f| f.face.dim == 2));
        assert_eq!(vertices, vec![0, 1, 2, 3]);
    }

    #[test]
    fn dominated_corner_yields_nothing() {
        let pts = vec![
            vec![0.0, 0.0, 0.0],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ];
        let hull = convex_hull(&pts).unwrap();
        let (faces, vertices) = select_pareto_faces(0, &hull, &Tolerances::default());
        assert!(faces.is_empty());
        assert!(vertices.is_empty());
    }

    #[test]
    fn edges_join_distance_one_policies() {
        for seed in 0..5 {
            let mdp = gen_random_mdp(seed, 4, 3, 3, 0.9).unwrap();
            let front = search(&mdp, &SearchConfig::default()).unwrap();
            assert_eq!(front.stats.iterations, front.vertices.len());
            for [a, b] in front.edges() {
                let d = hamming_distance(&front.vertices[a].policy, &front.vertices[b].policy).unwrap();
                assert_eq!(d, 1, "seed {seed}");
            }
        }
    }

    #[test]
    fn uniform_mixture_on_two_face_is_not_dominated() {
        let mdp = gen_random_mdp(3, 4, 3, 3, 0.9).unwrap();
        let front = search(&mdp, &SearchConfig::default()).unwrap();
        let face_id = front.faces.iter().position(|f| f.dim == 2).expect("a 2-face");
        let k = front.faces[face_id].vertex_ids.len();
        let (_, ret) = policies_on_face(&mdp, &front, face_id, &vec![1.0 / k as f64; k]).unwrap();
        let scale = front.scale;
        let target = ret.scaled(scale);
        for p in enumerate_deterministic(4, 3).unwrap() {
            let other = long_term_return(&mdp, &p).unwrap().scaled(scale);
            let lifted: Vec<f64> = target.iter().map(|x| x + 1e-9).collect();
            assert!(!strictly_dominates(&other, &lifted) || other.iter().zip(&target).all(|(a, b)| a <= &(b + 1e-9)));
        }
        let (mix, single) = policies_on_face(&mdp, &front, face_id, &{
            let mut w = vec![0.0; k];
            w[0] = 1.0;
            w
        })
        .unwrap();
        let v0 = front.faces[face_id].vertex_ids[0];
        assert_eq!(mix, front.vertices[v0].policy.to_stochastic(3));
        assert!(single.0.iter().zip(&front.vertices[v0].ret.0).all(|(a, b)| (a - b).abs() < 1e-12));
        assert!(matches!(policies_on_face(&mdp, &front, 999, &[1.0]), Err(Error::UnknownFace(999))));
    }
}
