use serde::{Deserialize, Serialize};

use super::belief::Belief;

/// Posteriors closer than this in max-norm are treated as one.
pub const MERGE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub belief: Belief,
    pub weight: f64,
    /// Sender's expected payoff at this posterior.
    pub selection: f64,
}

/// Finitely supported distribution of posteriors with a payoff selection at
/// each support point.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BeliefPlan {
    pub atoms: Vec<Atom>,
}

impl BeliefPlan {
    pub fn new(atoms: Vec<Atom>) -> Self {
        Self { atoms }
    }

    pub fn no_disclosure(prior: &Belief, selection: f64) -> Self {
        Self::new(vec![Atom { belief: prior.clone(), weight: 1.0, selection }])
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum()
    }

    /// Expected selection.
    pub fn value(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight * a.selection).sum()
    }

    pub fn barycenter(&self) -> Vec<f64> {
        let n = self.atoms.first().map_or(0, |a| a.belief.dim());
        let mut out = vec![0.0; n];
        for atom in &self.atoms {
            for (o, c) in out.iter_mut().zip(atom.belief.coords()) {
                *o += atom.weight * c;
            }
        }
        out
    }

    /// Variance of the selection under the plan.
    pub fn selection_variance(&self) -> f64 {
        let total = self.total_weight();
        if total <= 0.0 {
            return 0.0;
        }
        let mean = self.value() / total;
        self.atoms
            .iter()
            .map(|a| a.weight * (a.selection - mean).powi(2))
            .sum::<f64>()
            / total
    }

    /// Pools atoms whose beliefs agree within `tol`; pooled selection is the
    /// weighted mean. Order of first appearance is kept.
    pub fn merged(&self, tol: f64) -> Self {
        let mut out: Vec<Atom> = Vec::new();
        for atom in &self.atoms {
            if atom.weight <= 0.0 {
                continue;
            }
            match out.iter_mut().find(|o| o.belief.distance(&atom.belief) <= tol) {
                Some(o) => {
                    let w = o.weight + atom.weight;
                    o.selection = (o.weight * o.selection + atom.weight * atom.selection) / w;
                    o.weight = w;
                }
                None => out.push(atom.clone()),
            }
        }
        Self::new(out)
    }

    /// Convex combination of plans with the given mixing weights.
    pub fn mixture(parts: &[(f64, &BeliefPlan)]) -> Self {
        let mut atoms = Vec::new();
        for (w, plan) in parts {
            if *w <= 0.0 {
                continue;
            }
            for atom in &plan.atoms {
                atoms.push(Atom { belief: atom.belief.clone(), weight: w * atom.weight, selection: atom.selection });
            }
        }
        Self::new(atoms)
    }

    /// `E[f(μ) μ(ω)] / p(ω)`, the mean of `f` under the posterior distribution
    /// conditional on state `state`.
    pub fn conditional_mean(&self, prior: &Belief, state: usize, f: impl Fn(&Belief) -> f64) -> f64 {
        self.atoms
            .iter()
            .map(|a| a.weight * f(&a.belief) * a.belief[state])
            .sum::<f64>()
            / prior[state]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atom(x: f64, w: f64, s: f64) -> Atom {
        Atom { belief: Belief::binary(x).unwrap(), weight: w, selection: s }
    }

    #[test]
    fn merging_pools_equal_beliefs() {
        let plan = BeliefPlan::new(vec![atom(0.5, 0.25, 1.0), atom(0.2, 0.5, 0.0), atom(0.5, 0.25, 3.0)]);
        let merged = plan.merged(MERGE_TOL);
        assert_eq!(merged.len(), 2);
        assert_eq!(merged.atoms[0].weight, 0.5);
        assert_eq!(merged.atoms[0].selection, 2.0);
        assert!((merged.value() - plan.value()).abs() < 1e-15);
    }

    #[test]
    fn conditional_means_of_two_point_plan() {
        let plan = BeliefPlan::new(vec![atom(0.25, 0.5, 0.0), atom(0.75, 0.5, 0.0)]);
        let prior = Belief::binary(0.5).unwrap();
        let inv = |b: &Belief| 1.0 / b[1];
        assert!((plan.conditional_mean(&prior, 0, inv) - 10.0 / 3.0).abs() < 1e-12);
        assert!((plan.conditional_mean(&prior, 1, inv) - 2.0).abs() < 1e-12);
    }
}
