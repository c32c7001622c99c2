//! Browser bindings: generate and solve a random instance, mix policies on
//! a face, and cross-check the front against the enumeration oracle.
//!
//! Every method returns a JSON string; the `*_json` functions hold the logic
//! so it can be exercised natively.

use mopf::geometry::AffineFrame;
use mopf::io::face_ring;
use mopf::mdp::gen_random_mdp;
use mopf::oracle::{brute_force_front_with, compare_fronts};
use mopf::search::{policies_on_face, search, ParetoFront, SearchConfig};
use mopf::tolerance::{COMPARE_TOL, RANK_TOL};
use mopf::{Mdp, Tolerances};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Largest policy count the page will enumerate.
pub const DEMO_CAP: u128 = 200_000;

#[derive(Default)]
pub struct Session {
    mdp: Option<Mdp>,
    front: Option<ParetoFront>,
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

impl Session {
    pub fn solve_json(&mut self, seed: u64, states: usize, actions: usize, objectives: usize, gamma: f64) -> Result<String, String> {
        if !(1..=12).contains(&states) || !(1..=8).contains(&actions) || !(1..=4).contains(&objectives) {
            return Err("use 1-12 states, 1-8 actions and 1-4 objectives".into());
        }
        let mdp = gen_random_mdp(seed, states, actions, objectives, gamma).map_err(err)?;
        let front = search(&mdp, &SearchConfig { seed, parallel: false, ..Default::default() }).map_err(err)?;
        let out = front_view(&front);
        self.mdp = Some(mdp);
        self.front = Some(front);
        Ok(out.to_string())
    }

    pub fn mix_json(&self, face_id: usize, weights: &[f64]) -> Result<String, String> {
        let (mdp, front) = self.loaded()?;
        let (policy, ret) = policies_on_face(mdp, front, face_id, weights).map_err(err)?;
        let face = &front.faces[face_id];
        let corners: Vec<Vec<f64>> = face.vertex_ids.iter().map(|&v| front.scaled_return(v)).collect();
        let refs: Vec<&[f64]> = corners.iter().map(|c| c.as_slice()).collect();
        let scaled = ret.scaled(front.scale);
        let residual = AffineFrame::new(&refs, RANK_TOL).residual(&scaled);
        let rows: Vec<&[f64]> = (0..policy.num_states()).map(|s| policy.row(s)).collect();
        Ok(json!({
            "face": face_id,
            "return": ret.as_slice(),
            "scaled": scaled,
            "off_face": residual,
            "policy": rows,
        })
        .to_string())
    }

    pub fn oracle_json(&self) -> Result<String, String> {
        let (mdp, front) = self.loaded()?;
        let oracle = brute_force_front_with(mdp, DEMO_CAP, &Tolerances::default(), false).map_err(err)?;
        let report = compare_fronts(front, &oracle, COMPARE_TOL).map_err(err)?;
        Ok(json!({
            "match": report.matches(),
            "oracle_vertices": oracle.vertices.len(),
            "oracle_faces": oracle.faces.len(),
            "oracle_policies": oracle.stats.policies_evaluated,
            "search_policies": front.stats.policies_evaluated,
            "max_vertex_distance": report.max_vertex_distance,
        })
        .to_string())
    }

    fn loaded(&self) -> Result<(&Mdp, &ParetoFront), String> {
        match (&self.mdp, &self.front) {
            (Some(m), Some(f)) => Ok((m, f)),
            _ => Err("solve an instance first".into()),
        }
    }
}

fn front_view(front: &ParetoFront) -> Value {
    let vertices: Vec<Value> = front
        .vertices
        .iter()
        .map(|v| {
            json!({
                "id": v.id,
                "actions": v.policy.actions(),
                "scaled": v.ret.scaled(front.scale),
            })
        })
        .collect();
    let faces: Vec<Value> = front
        .faces
        .iter()
        .map(|f| {
            let ring = if f.dim == 2 && front.objectives == 3 { face_ring(front, &f.vertex_ids) } else { f.vertex_ids.clone() };
            json!({ "dim": f.dim, "vertex_ids": f.vertex_ids, "ring": ring })
        })
        .collect();
    json!({
        "objectives": front.objectives,
        "vertices": vertices,
        "faces": faces,
        "policies_evaluated": front.stats.policies_evaluated,
        "iterations": front.stats.iterations,
    })
}

#[wasm_bindgen]
pub struct Demo {
    inner: Session,
}

#[wasm_bindgen]
impl Demo {
    #[wasm_bindgen(constructor)]
    pub fn new() -> Demo {
        Demo { inner: Session::default() }
    }

    pub fn solve(&mut self, seed: u32, states: usize, actions: usize, objectives: usize, gamma: f64) -> Result<String, JsValue> {
        self.inner
            .solve_json(seed as u64, states, actions, objectives, gamma)
            .map_err(|e| JsValue::from_str(&e))
    }

    /// `weights` holds one barycentric weight per face vertex.
    pub fn mix(&self, face_id: usize, weights: Vec<f64>) -> Result<String, JsValue> {
        self.inner.mix_json(face_id, &weights).map_err(|e| JsValue::from_str(&e))
    }

    pub fn check_oracle(&self) -> Result<String, JsValue> {
        self.inner.oracle_json().map_err(|e| JsValue::from_str(&e))
    }
}

impl Default for Demo {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_mix_and_check() {
        let mut s = Session::default();
        assert!(s.mix_json(0, &[1.0]).is_err());
        let view: Value = serde_json::from_str(&s.solve_json(0, 4, 3, 3, 0.9).unwrap()).unwrap();
        let faces = view["faces"].as_array().unwrap();
        assert!(!faces.is_empty());
        let k = faces[0]["vertex_ids"].as_array().unwrap().len();
        assert_eq!(faces[0]["ring"].as_array().unwrap().len(), k);
        let mixed: Value = serde_json::from_str(&s.mix_json(0, &vec![1.0 / k as f64; k]).unwrap()).unwrap();
        assert!(mixed["off_face"].as_f64().unwrap() < 1e-8);
        let check: Value = serde_json::from_str(&s.oracle_json().unwrap()).unwrap();
        assert_eq!(check["match"], true);
    }

    #[test]
    fn rejects_oversized_requests() {
        let mut s = Session::default();
        assert!(s.solve_json(0, 40, 3, 3, 0.9).is_err());
        s.solve_json(0, 3, 3, 2, 0.9).unwrap();
        assert!(s.mix_json(99, &[1.0]).is_err());
    }
}
