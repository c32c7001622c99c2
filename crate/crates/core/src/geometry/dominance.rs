use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dominance {
    Dominates,
    DominatedBy,
    Incomparable,
    Equal,
}

/// Compares `u` against `v` with an `eps` slack per component.
pub fn dominance(u: &[f64], v: &[f64], eps: f64) -> Result<Dominance> {
    if u.len() != v.len() {
        return Err(Error::Dimension(format!(
            "comparing {}-vector with {}-vector",
            u.len(),
            v.len()
        )));
    }
    let max_gap = u
        .iter()
        .zip(v)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if max_gap <= eps {
        return Ok(Dominance::Equal);
    }
    let u_ge = u.iter().zip(v).all(|(a, b)| *a >= b - eps);
    let v_ge = u.iter().zip(v).all(|(a, b)| *b >= a - eps);
    // not Equal, so some component differs by more than eps
    Ok(match (u_ge, v_ge) {
        (true, false) => Dominance::Dominates,
        (false, true) => Dominance::DominatedBy,
        _ => Dominance::Incomparable,
    })
}

/// `u` is componentwise at least `v` and strictly larger somewhere.
pub fn strictly_dominates(u: &[f64], v: &[f64]) -> bool {
    let mut strict = false;
    for (a, b) in u.iter().zip(v) {
        if a < b {
            return false;
        }
        if a > b {
            strict = true;
        }
    }
    strict
}

/// Indices (ascending) of the points not strictly dominated by any other.
///
/// Linear sweep: take the first remaining point, replace it by any later
/// point that dominates it, then drop it together with everything it
/// dominates.
pub fn pprune(points: &[Vec<f64>]) -> Result<Vec<usize>> {
    if points.is_empty() {
        return Err(Error::InvalidArgument("pprune of an empty set".into()));
    }
    let dim = points[0].len();
    if points.iter().any(|p| p.len() != dim) {
        return Err(Error::Dimension("pprune over mixed dimensions".into()));
    }
    let mut remaining: Vec<usize> = (0..points.len()).collect();
    let mut kept = Vec::new();
    while let Some(&first) = remaining.first() {
        let mut best = first;
        for &candidate in &remaining {
            if strictly_dominates(&points[candidate], &points[best]) {
                best = candidate;
            }
        }
        remaining.retain(|&i| i != best && !strictly_dominates(&points[best], &points[i]));
        kept.push(best);
    }
    kept.sort_unstable();
    Ok(kept)
}
