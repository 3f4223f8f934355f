use crate::error::{Error, Result};
use crate::model::Belief;

/// All beliefs whose coordinates are multiples of `1/k`, in lexicographic
/// order of their integer counts.
#[derive(Debug, Clone)]
pub struct BeliefGrid {
    resolution: usize,
    counts: Vec<Vec<u32>>,
    points: Vec<Belief>,
}

impl BeliefGrid {
    pub fn new(states: usize, resolution: usize) -> Result<Self> {
        if states < 1 || resolution < 1 {
            return Err(Error::DimensionMismatch(format!(
                "grid needs positive dimensions, got n={states}, k={resolution}"
            )));
        }
        let mut counts = Vec::new();
        let mut current = vec![0u32; states];
        fill(&mut counts, &mut current, 0, resolution as u32);
        let points = counts
            .iter()
            .map(|c| Belief::normalized(c.iter().map(|&v| v as f64 / resolution as f64).collect()))
            .collect();
        Ok(Self { resolution, counts, points })
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn points(&self) -> &[Belief] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Index of the grid point with the given integer counts.
    pub fn index_of(&self, counts: &[u32]) -> Option<usize> {
        self.counts.binary_search_by(|c| c.as_slice().cmp(counts)).ok()
    }

    /// Index of the grid point equal to `mu`, if `mu` lies on the grid.
    pub fn locate(&self, mu: &Belief) -> Option<usize> {
        let k = self.resolution as f64;
        let counts: Vec<u32> = mu.coords().iter().map(|c| (c * k).round() as u32).collect();
        let idx = self.index_of(&counts)?;
        (self.points[idx].distance(mu) < 1e-12).then_some(idx)
    }
}

fn fill(out: &mut Vec<Vec<u32>>, current: &mut Vec<u32>, pos: usize, remaining: u32) {
    if pos + 1 == current.len() {
        current[pos] = remaining;
        out.push(current.clone());
        return;
    }
    for c in 0..=remaining {
        current[pos] = c;
        fill(out, current, pos + 1, remaining - c);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::binomial;

    #[test]
    fn size_matches_stars_and_bars() {
        for (n, k) in [(2, 10), (3, 7), (4, 5)] {
            let g = BeliefGrid::new(n, k).unwrap();
            assert_eq!(g.len() as u128, binomial(k + n - 1, n - 1));
        }
    }

    #[test]
    fn contains_vertices() {
        let g = BeliefGrid::new(3, 4).unwrap();
        for s in 0..3 {
            assert!(g.locate(&Belief::vertex(3, s)).is_some());
        }
    }

    #[test]
    fn refinement_nests() {
        let coarse = BeliefGrid::new(3, 6).unwrap();
        let fine = BeliefGrid::new(3, 12).unwrap();
        for p in coarse.points() {
            assert!(fine.locate(p).is_some());
        }
    }
}
