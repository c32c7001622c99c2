//! Objective-space geometry: dominance, Pareto pruning, affine rank, convex
//! hulls in any dimension, face descent and the positive-normal LP test.

mod affine;
mod dominance;
mod faces;
mod hull;
mod lp;

pub use affine::{affine_dimension, AffineFrame};
pub use dominance::{dominance, pprune, strictly_dominates, Dominance};
pub use faces::{face_normal_cone, subfaces_at, top_faces, FaceDescriptor};
pub use hull::{convex_hull, convex_hull_with, incident_facets, Facet, LocalHull};
pub use lp::{is_pareto_face, pareto_lp, LpCertificate};
