use nalgebra::DMatrix;

/// Relative singular-value cutoff for the rank of a point set.
pub const RANK_TOL: f64 = 1e-9;

/// Base point plus an orthonormal basis of direction vectors.
#[derive(Debug, Clone)]
pub struct AffineBasis {
    pub base: Vec<f64>,
    pub directions: Vec<Vec<f64>>,
}

impl AffineBasis {
    pub fn dim(&self) -> usize {
        self.directions.len()
    }

    fn residual(&self, x: &[f64]) -> Vec<f64> {
        let mut r: Vec<f64> = x.iter().zip(&self.base).map(|(a, b)| a - b).collect();
        for d in &self.directions {
            let c: f64 = r.iter().zip(d).map(|(a, b)| a * b).sum();
            for (ri, di) in r.iter_mut().zip(d) {
                *ri -= c * di;
            }
        }
        r
    }

    /// Euclidean distance from `x` to the affine hull.
    pub fn distance(&self, x: &[f64]) -> f64 {
        self.residual(x).iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Orthonormal basis of the zero-sum directions orthogonal to the hull.
    /// A point `y` of the simplex lies in the hull iff `⟨c, y − base⟩ = 0`
    /// for every returned `c`.
    pub fn normal_directions(&self) -> Vec<Vec<f64>> {
        let n = self.base.len();
        let mut basis = self.directions.clone();
        let mut normals = Vec::new();
        for i in 0..n.saturating_sub(1) {
            let mut v = vec![0.0; n];
            v[i] = 1.0;
            v[n - 1] = -1.0;
            for _ in 0..2 {
                for b in &basis {
                    let c: f64 = v.iter().zip(b).map(|(a, bb)| a * bb).sum();
                    for (vi, bi) in v.iter_mut().zip(b) {
                        *vi -= c * bi;
                    }
                }
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-9 {
                let unit: Vec<f64> = v.iter().map(|x| x / norm).collect();
                basis.push(unit.clone());
                normals.push(unit);
            }
        }
        normals
    }
}

/// Affine hull of a nonempty point set.
pub fn affine_hull<P: AsRef<[f64]>>(points: &[P]) -> AffineBasis {
    let base = points[0].as_ref().to_vec();
    let n = base.len();
    let cols = points.len() - 1;
    if cols == 0 {
        return AffineBasis { base, directions: Vec::new() };
    }
    let m = DMatrix::from_fn(n, cols, |i, j| points[j + 1].as_ref()[i] - base[i]);
    let svd = m.svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let smax = svd.singular_values.iter().cloned().fold(0.0_f64, f64::max);
    let cutoff = (RANK_TOL * smax).max(1e-12);
    let directions = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| **s > cutoff)
        .map(|(j, _)| u.column(j).iter().copied().collect())
        .collect();
    AffineBasis { base, directions }
}
