use nalgebra::DMatrix;

/// Orthonormal frame of the affine hull of a point set.
#[derive(Debug, Clone)]
pub struct AffineFrame {
    pub origin: Vec<f64>,
    /// `dim` orthonormal directions spanning the hull.
    pub basis: Vec<Vec<f64>>,
    /// `D - dim` orthonormal directions normal to the hull.
    pub complement: Vec<Vec<f64>>,
}

impl AffineFrame {
    /// Builds the frame from the SVD of the differences to the first point;
    /// singular values below `rel_tol * sigma_max` count as zero.
    pub fn new(points: &[&[f64]], rel_tol: f64) -> Self {
        let d = points[0].len();
        let origin = points[0].to_vec();
        let rows = (points.len() - 1).max(d);
        let mut m = DMatrix::zeros(rows, d);
        for (i, p) in points.iter().skip(1).enumerate() {
            for j in 0..d {
                m[(i, j)] = p[j] - origin[j];
            }
        }
        let svd = m.svd(false, true);
        let v_t = svd.v_t.expect("requested V^T");
        let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
        order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
        let sigma_max = svd.singular_values[order[0]];
        let cutoff = rel_tol * sigma_max;
        let mut basis = Vec::new();
        let mut complement = Vec::new();
        for &i in &order {
            let row: Vec<f64> = v_t.row(i).iter().copied().collect();
            if sigma_max > 0.0 && svd.singular_values[i] > cutoff {
                basis.push(row);
            } else {
                complement.push(row);
            }
        }
        Self {
            origin,
            basis,
            complement,
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Coordinates of `x` in the frame.
    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        self.basis
            .iter()
            .map(|b| b.iter().zip(x).zip(&self.origin).map(|((b, x), o)| b * (x - o)).sum())
            .collect()
    }

    /// Maps a direction in frame coordinates back to the ambient space.
    pub fn lift_direction(&self, y: &[f64]) -> Vec<f64> {
        let d = self.origin.len();
        let mut out = vec![0.0; d];
        for (coef, b) in y.iter().zip(&self.basis) {
            for j in 0..d {
                out[j] += coef * b[j];
            }
        }
        out
    }

    /// Distance from `x` to the affine hull.
    pub fn residual(&self, x: &[f64]) -> f64 {
        self.complement
            .iter()
            .map(|c| {
                let t: f64 = c.iter().zip(x).zip(&self.origin).map(|((c, x), o)| c * (x - o)).sum();
                t * t
            })
            .sum::<f64>()
            .sqrt()
    }
}

/// Affine dimension of a nonempty point set.
pub fn affine_dimension(points: &[&[f64]], rel_tol: f64) -> usize {
    if points.len() <= 1 {
        return 0;
    }
    AffineFrame::new(points, rel_tol).dim()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dim_of(pts: &[Vec<f64>]) -> usize {
        let refs: Vec<&[f64]> = pts.iter().map(Vec::as_slice).collect();
        affine_dimension(&refs, 1e-9)
    }

    #[test]
    fn dimensions() {
        assert_eq!(dim_of(&[vec![1.0, 2.0, 3.0]]), 0);
        assert_eq!(dim_of(&[vec![0.0, 0.0], vec![1.0, 1.0], vec![3.0, 3.0]]), 1);
        assert_eq!(
            dim_of(&[
                vec![0.0, 0.0, 0.0],
                vec![1.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0],
                vec![0.0, 0.0, 1.0]
            ]),
            3
        );
        assert_eq!(dim_of(&[vec![1.0, 1.0, 1.0], vec![1.0, 1.0, 1.0]]), 0);
    }

    #[test]
    fn frame_is_orthonormal_and_complete() {
        let pts = [vec![1.0, 0.0, 0.0, 2.0], vec![0.0, 1.0, 0.0, 2.0], vec![0.0, 0.0, 1.0, 2.0]];
        let refs: Vec<&[f64]> = pts.iter().map(Vec::as_slice).collect();
        let f = AffineFrame::new(&refs, 1e-9);
        assert_eq!(f.dim(), 2);
        assert_eq!(f.complement.len(), 2);
        let all: Vec<&Vec<f64>> = f.basis.iter().chain(&f.complement).collect();
        for (i, a) in all.iter().enumerate() {
            for (j, b) in all.iter().enumerate() {
                let dot: f64 = a.iter().zip(b.iter()).map(|(x, y)| x * y).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((dot - want).abs() < 1e-12);
            }
        }
        assert!(f.residual(&[0.5, 0.5, 0.0, 2.0]) < 1e-12);
        assert!((f.residual(&[0.0, 0.0, 0.0, 2.0]) - 1.0 / 3f64.sqrt()).abs() < 1e-12);
    }
}
