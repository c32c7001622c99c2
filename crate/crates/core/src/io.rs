//! File formats: MDP and front JSON documents, run metadata, and exports
//! for plotting (OFF, CSV, JSON).

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::geometry::AffineFrame;
use crate::mdp::Mdp;
use crate::search::{FaceRecord, ParetoFront, SearchStats, VertexRecord};
use crate::tolerance::{Tolerances, RANK_TOL};

pub const TOOL_VERSION: &str = concat!("mopf ", env!("CARGO_PKG_VERSION"));

/// Optional replacements for the default tolerances.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ToleranceOverrides {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub geom: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub pos: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub equal: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub rank: Option<f64>,
}

impl ToleranceOverrides {
    pub fn resolve(&self) -> Tolerances {
        let d = Tolerances::default();
        Tolerances {
            geom: self.geom.unwrap_or(d.geom),
            pos: self.pos.unwrap_or(d.pos),
            equal: self.equal.unwrap_or(d.equal),
            rank: self.rank.unwrap_or(d.rank),
        }
    }
}

/// Settings of one CLI run. Thread count and paths do not affect results
/// and are left out of serialized output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub seed: u64,
    pub tolerances: ToleranceOverrides,
    #[serde(skip)]
    pub thread_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cap: Option<u64>,
    #[serde(skip)]
    pub input: Option<std::path::PathBuf>,
    #[serde(skip)]
    pub output: Option<std::path::PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            tolerances: ToleranceOverrides::default(),
            thread_count: None,
            cap: None,
            input: None,
            output: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub tool: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub config: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub input_sha256: Option<String>,
}

impl Meta {
    pub fn new(config: Option<serde_json::Value>, input: Option<&[u8]>) -> Self {
        Self {
            tool: TOOL_VERSION.to_string(),
            config,
            input_sha256: input.map(content_hash),
        }
    }
}

/// Lowercase hex SHA-256 of `bytes`.
pub fn content_hash(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct MdpDocument {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    meta: Option<Meta>,
    states: usize,
    actions: usize,
    objectives: usize,
    gamma: f64,
    mu: Vec<f64>,
    #[serde(rename = "P")]
    p: Vec<Vec<Vec<f64>>>,
    r: Vec<Vec<Vec<f64>>>,
}

pub fn mdp_to_json(mdp: &Mdp, meta: Option<Meta>) -> Result<String> {
    let (s, a) = (mdp.num_states(), mdp.num_actions());
    let nest = |f: &dyn Fn(usize, usize) -> Vec<f64>| -> Vec<Vec<Vec<f64>>> {
        (0..s).map(|i| (0..a).map(|j| f(i, j)).collect()).collect()
    };
    let doc = MdpDocument {
        meta,
        states: s,
        actions: a,
        objectives: mdp.num_objectives(),
        gamma: mdp.gamma(),
        mu: mdp.mu().to_vec(),
        p: nest(&|i, j| mdp.transition_row(i, j).to_vec()),
        r: nest(&|i, j| mdp.reward_vec(i, j).to_vec()),
    };
    let mut out = serde_json::to_string_pretty(&doc)?;
    out.push('\n');
    Ok(out)
}

/// Parses an MDP document. Shapes are checked; probabilities are not.
pub fn mdp_from_json(text: &str) -> Result<Mdp> {
    let doc: MdpDocument = serde_json::from_str(text)?;
    if doc.p.len() != doc.states || doc.r.len() != doc.states {
        return Err(Error::Format(format!(
            "P and r must have {} state rows (got {} and {})",
            doc.states,
            doc.p.len(),
            doc.r.len()
        )));
    }
    let mdp = Mdp::from_nested(&doc.p, &doc.r, doc.gamma, doc.mu)?;
    if mdp.num_actions() != doc.actions || mdp.num_objectives() != doc.objectives {
        return Err(Error::Format(format!(
            "declared A={} D={} but arrays have A={} D={}",
            doc.actions,
            doc.objectives,
            mdp.num_actions(),
            mdp.num_objectives()
        )));
    }
    Ok(mdp)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontDocument {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub meta: Option<Meta>,
    pub solver: String,
    pub objectives: usize,
    pub scale: f64,
    pub vertices: Vec<VertexRecord>,
    pub faces: Vec<FaceRecord>,
    pub stats: SearchStats,
    pub warnings: Vec<String>,
}

impl FrontDocument {
    pub fn new(front: &ParetoFront, solver: &str, meta: Option<Meta>) -> Self {
        Self {
            meta,
            solver: solver.to_string(),
            objectives: front.objectives,
            scale: front.scale,
            vertices: front.vertices.clone(),
            faces: front.faces.clone(),
            stats: front.stats.clone(),
            warnings: front.stats.degeneracy_warnings.clone(),
        }
    }

    pub fn into_front(self) -> Result<ParetoFront> {
        let n = self.vertices.len();
        if let Some(v) = self.vertices.iter().enumerate().find(|(i, v)| v.id != *i || v.ret.dim() != self.objectives) {
            return Err(Error::Format(format!("vertex {} is out of order or has the wrong dimension", v.0)));
        }
        if let Some(f) = self.faces.iter().find(|f| f.vertex_ids.iter().any(|&v| v >= n)) {
            return Err(Error::Format(format!("face {:?} references a missing vertex", f.vertex_ids)));
        }
        let mut stats = self.stats;
        stats.degeneracy_warnings = self.warnings;
        Ok(ParetoFront {
            objectives: self.objectives,
            scale: self.scale,
            vertices: self.vertices,
            faces: self.faces,
            stats,
        })
    }
}

pub fn front_to_json(front: &ParetoFront, solver: &str, meta: Option<Meta>) -> Result<String> {
    let mut out = serde_json::to_string_pretty(&FrontDocument::new(front, solver, meta))?;
    out.push('\n');
    Ok(out)
}

pub fn front_document_from_json(text: &str) -> Result<FrontDocument> {
    Ok(serde_json::from_str(text)?)
}

pub fn front_from_json(text: &str) -> Result<ParetoFront> {
    front_document_from_json(text)?.into_front()
}

pub fn read_mdp(path: &Path) -> Result<(Mdp, Vec<u8>)> {
    let bytes = std::fs::read(path)?;
    let text = std::str::from_utf8(&bytes).map_err(|e| Error::Format(e.to_string()))?;
    Ok((mdp_from_json(text)?, bytes))
}

pub fn read_front(path: &Path) -> Result<ParetoFront> {
    front_from_json(&std::fs::read_to_string(path)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Json,
    Csv,
    Off,
}

impl std::str::FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            "off" => Ok(Self::Off),
            other => Err(Error::InvalidArgument(format!("unknown export format {other:?}"))),
        }
    }
}

pub fn export(front: &ParetoFront, format: ExportFormat) -> Result<String> {
    match format {
        ExportFormat::Json => export_json(front),
        ExportFormat::Csv => export_csv(front),
        ExportFormat::Off => export_off(front),
    }
}

/// Vertex coordinates and face index lists only.
pub fn export_json(front: &ParetoFront) -> Result<String> {
    #[derive(Serialize)]
    struct Face<'a> {
        dim: usize,
        vertex_ids: &'a [usize],
    }
    #[derive(Serialize)]
    struct Plot<'a> {
        objectives: usize,
        points: Vec<&'a [f64]>,
        faces: Vec<Face<'a>>,
    }
    let plot = Plot {
        objectives: front.objectives,
        points: front.vertices.iter().map(|v| v.ret.as_slice()).collect(),
        faces: front
            .faces
            .iter()
            .map(|f| Face {
                dim: f.dim,
                vertex_ids: &f.vertex_ids,
            })
            .collect(),
    };
    let mut out = serde_json::to_string_pretty(&plot)?;
    out.push('\n');
    Ok(out)
}

/// One row per vertex: id, returns, action vector, co-policy count.
pub fn export_csv(front: &ParetoFront) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["id".to_string()];
    header.extend((0..front.objectives).map(|d| format!("return_{d}")));
    header.extend(["actions".to_string(), "co_policies".to_string()]);
    w.write_record(&header).map_err(csv_err)?;
    for v in &front.vertices {
        let mut row = vec![v.id.to_string()];
        row.extend(v.ret.as_slice().iter().map(|x| x.to_string()));
        row.push(v.policy.actions().iter().map(|a| a.to_string()).collect::<Vec<_>>().join(" "));
        row.push(v.co_policies.len().to_string());
        w.write_record(&row).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Format(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Format(e.to_string()))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Format(e.to_string())
}

/// Geomview OFF. Polygonal faces are fan-triangulated after ordering their
/// vertices by angle in the face plane; edges become two-vertex polygons.
pub fn export_off(front: &ParetoFront) -> Result<String> {
    if front.objectives != 3 {
        return Err(Error::Format("OFF requires D=3".into()));
    }
    let mut polys: Vec<Vec<usize>> = Vec::new();
    for face in &front.faces {
        if face.dim < 2 {
            polys.push(face.vertex_ids.clone());
            continue;
        }
        let ring = face_ring(front, &face.vertex_ids);
        for i in 1..ring.len() - 1 {
            polys.push(vec![ring[0], ring[i], ring[i + 1]]);
        }
    }
    let mut out = format!("OFF\n{} {} 0\n", front.vertices.len(), polys.len());
    for v in &front.vertices {
        let c = v.ret.as_slice();
        out.push_str(&format!("{} {} {}\n", c[0], c[1], c[2]));
    }
    for p in polys {
        out.push_str(&p.len().to_string());
        for v in p {
            out.push_str(&format!(" {v}"));
        }
        out.push('\n');
    }
    Ok(out)
}

/// Vertices of a 2-face in boundary order, starting at the smallest id.
pub fn face_ring(front: &ParetoFront, ids: &[usize]) -> Vec<usize> {
    let pts: Vec<Vec<f64>> = ids.iter().map(|&v| front.scaled_return(v)).collect();
    let refs: Vec<&[f64]> = pts.iter().map(|p| p.as_slice()).collect();
    let frame = AffineFrame::new(&refs, RANK_TOL);
    let local: Vec<Vec<f64>> = pts.iter().map(|p| frame.project(p)).collect();
    let k = local[0].len();
    let centre: Vec<f64> = (0..k).map(|j| local.iter().map(|p| p[j]).sum::<f64>() / local.len() as f64).collect();
    let mut order: Vec<(f64, usize)> = local
        .iter()
        .zip(ids)
        .map(|(p, &id)| {
            let angle = if k >= 2 { (p[1] - centre[1]).atan2(p[0] - centre[0]) } else { p[0] };
            (angle, id)
        })
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut ring: Vec<usize> = order.into_iter().map(|(_, id)| id).collect();
    let first = ring.iter().enumerate().min_by_key(|(_, &id)| id).map_or(0, |(i, _)| i);
    ring.rotate_left(first);
    ring
}
