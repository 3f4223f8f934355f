//! Simplex grids and convex-geometry predicates.

mod affine;
mod grid;
mod hull;

pub use affine::{affine_hull, AffineBasis};
pub use grid::BeliefGrid;
pub use hull::{in_convex_hull, is_interior, segment_hull_intersect, HullMembership, DEFAULT_LAMBDA_GRID};

use nalgebra::{DMatrix, DVector};
use std::collections::BTreeMap;

use crate::model::Belief;

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Points of the simplex where `n − 1` of the given hyperplanes
/// `⟨h, μ⟩ = 0` meet, deduplicated.
pub fn arrangement_vertices(planes: &[Vec<f64>], n: usize) -> Vec<Belief> {
    let choose = n - 1;
    let mut found: BTreeMap<Vec<i64>, Belief> = BTreeMap::new();
    if choose == 0 || planes.len() < choose {
        return Vec::new();
    }
    let mut idx: Vec<usize> = (0..choose).collect();
    loop {
        let mut m = DMatrix::<f64>::zeros(n, n);
        for (r, &p) in idx.iter().enumerate() {
            for c in 0..n {
                m[(r, c)] = planes[p][c];
            }
        }
        for c in 0..n {
            m[(n - 1, c)] = 1.0;
        }
        let mut rhs = DVector::<f64>::zeros(n);
        rhs[n - 1] = 1.0;
        if let Some(x) = m.clone().full_piv_lu().solve(&rhs) {
            let residual = (&m * &x - &rhs).amax();
            let inside = x.iter().all(|v| v.is_finite() && *v >= -1e-9 && *v <= 1.0 + 1e-9);
            if inside && residual <= 1e-9 {
                let point = Belief::normalized(x.iter().copied().collect());
                let key: Vec<i64> = point.coords().iter().map(|v| (v * 1e10).round() as i64).collect();
                found.entry(key).or_insert(point);
            }
        }
        // next combination
        let mut i = choose;
        loop {
            if i == 0 {
                return found.into_values().collect();
            }
            i -= 1;
            if idx[i] < planes.len() - choose + i {
                idx[i] += 1;
                for j in i + 1..choose {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}
