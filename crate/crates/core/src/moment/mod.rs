//! Games whose sender value depends on the posterior only through a moment
//! `x = T(μ)`: edge shapes of `v`, the full-dimension simplex they generate,
//! and the one-dimensional mean tests.

mod mean;

pub use mean::{
    dilation_feasible, one_dim_mean_classifier, relaxed_md_mean, DilationReport, MeanAtom, MeanClass, MeanPlan,
    MeanPlanReport, OneDimReport,
};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::BeliefGrid;
use crate::model::{Belief, MomentGame, ValueModel};
use crate::solve::grid::md_over;
use crate::solve::{solve_bp, solve_ct_max, Candidates};

pub const DEFAULT_EDGE_SAMPLES: usize = 1024;

/// A sampled step must move by more than this to count as a rise or fall.
const SHAPE_TOL: f64 = 1e-9;

/// Chain margins below this do not count as strict.
const CHAIN_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Serialize)]
pub struct Edge {
    pub state: usize,
    pub rises: bool,
    pub falls: bool,
    /// Where `v` first climbs back to its value at the base vertex.
    pub crossing: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EdgeProfile {
    pub base_state: usize,
    pub edges: Vec<Edge>,
}

/// Lowest-index state whose vertex moment minimises `v`.
fn base_state(game: &MomentGame) -> usize {
    let values: Vec<f64> = game.embedding().iter().map(|x| game.value_at_moment(x)).collect();
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v < values[best] {
            best = i;
        }
    }
    best
}

/// `λ ↦ v(λ T(δ_ω) + (1−λ) T(δ_base))`.
fn edge_fn(game: &MomentGame, base: usize, state: usize) -> impl Fn(f64) -> f64 + '_ {
    let from = game.embedding()[base].clone();
    let to = game.embedding()[state].clone();
    move |l: f64| {
        let x: Vec<f64> = from.iter().zip(&to).map(|(a, b)| l * b + (1.0 - l) * a).collect();
        game.value_at_moment(&x)
    }
}

fn samples_of(f: &impl Fn(f64) -> f64, samples: usize) -> Vec<f64> {
    (0..=samples).map(|i| f(i as f64 / samples as f64)).collect()
}

/// First return of `f` to `f(0)` after its sampled minimum, refined by
/// bisection to machine precision.
fn crossing(f: &impl Fn(f64) -> f64, values: &[f64]) -> Option<f64> {
    let samples = values.len() - 1;
    let target = values[0];
    let (argmin, _) = values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |(bi, bv), (i, &v)| if v < bv { (i, v) } else { (bi, bv) });
    if values[argmin] >= target {
        return None;
    }
    let j = (argmin + 1..=samples).find(|&j| values[j] >= target)?;
    let (mut a, mut b) = ((j - 1) as f64 / samples as f64, j as f64 / samples as f64);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if f(m) >= target {
            b = m;
        } else {
            a = m;
        }
    }
    let (fa, fb) = (f(a) - target, f(b) - target);
    Some(if fa.abs() < fb.abs() { a } else { b })
}

/// `v` is non-monotone along every edge leaving the worst vertex.
pub fn is_minimally_edge_non_monotone(game: &MomentGame, samples: usize) -> (bool, EdgeProfile) {
    let samples = samples.max(2);
    let base = base_state(game);
    let mut edges = Vec::new();
    for state in (0..game.num_states()).filter(|&w| w != base) {
        let f = edge_fn(game, base, state);
        let values = samples_of(&f, samples);
        let rises = values.windows(2).any(|w| w[1] - w[0] > SHAPE_TOL);
        let falls = values.windows(2).any(|w| w[0] - w[1] > SHAPE_TOL);
        edges.push(Edge { state, rises, falls, crossing: crossing(&f, &values) });
    }
    let all = edges.iter().all(|e| e.rises && e.falls);
    (all, EdgeProfile { base_state: base, edges })
}

#[derive(Debug, Clone, Serialize)]
pub struct TildeSimplex {
    pub base_state: usize,
    /// Crossing weight per state; zero at the base state.
    pub lambdas: Vec<f64>,
    /// The base vertex followed by the crossing beliefs, in state order.
    pub vertices: Vec<Belief>,
}

impl TildeSimplex {
    /// Barycentric weights of `p` in the simplex, if it lies inside.
    pub fn coordinates(&self, p: &Belief) -> Option<Vec<f64>> {
        // μ_ω = λ_ω δ_ω + (1−λ_ω) δ_base, so p = Σ c_ω μ_ω + c_base δ_base
        // has c_ω = p(ω)/λ_ω off the base state.
        let mut c = vec![0.0; self.lambdas.len()];
        let mut rest = 1.0;
        for (w, &l) in self.lambdas.iter().enumerate() {
            if w == self.base_state {
                continue;
            }
            c[w] = p[w] / l;
            rest -= c[w];
        }
        c[self.base_state] = rest;
        c.iter().all(|x| *x >= -1e-12).then_some(c)
    }

    pub fn contains_interior(&self, p: &Belief) -> bool {
        self.coordinates(p).is_some_and(|c| c.iter().all(|x| *x > 1e-9))
    }
}

pub fn build_tilde_simplex(game: &MomentGame) -> Result<TildeSimplex> {
    let n = game.num_states();
    let base = base_state(game);
    let mut lambdas = vec![0.0; n];
    let mut vertices = vec![Belief::vertex(n, base)];
    for state in (0..n).filter(|&w| w != base) {
        let f = edge_fn(game, base, state);
        let values = samples_of(&f, DEFAULT_EDGE_SAMPLES);
        let l = crossing(&f, &values).ok_or(Error::CrossingNotFound { state })?;
        lambdas[state] = l;
        vertices.push(Belief::vertex(n, state).mix(&Belief::vertex(n, base), l));
    }
    Ok(TildeSimplex { base_state: base, lambdas, vertices })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DichotomyCase {
    /// The best cheap-talk value already reaches the global maximum of `v`.
    Case1,
    /// `max v > BP > MD > CT > V(p)`.
    Case2,
}

#[derive(Debug, Clone, Serialize)]
pub struct DichotomyReport {
    pub case: DichotomyCase,
    pub max_value: f64,
    pub bp: f64,
    pub md: f64,
    pub ct: f64,
    pub no_disclosure: f64,
    /// `[max − BP, BP − MD, MD − CT, CT − V(p)]`.
    pub margins: [f64; 4],
    pub strict_chain: bool,
}

/// Outward offsets used when fanning the facet opposite the base vertex.
const FAN_STRETCH: [f64; 9] = [0.0, 0.001, 0.002, 0.005, 0.01, 0.02, 0.05, 0.1, 0.2];

/// Points on the facet of the simplex spanned by the crossing beliefs, and
/// their pushes away from `p`. The sign change of `V` that mediation exploits
/// sits in a thin band just beyond this facet.
fn facet_fan(tilde: &TildeSimplex, p: &Belief, resolution: usize) -> Result<Vec<Belief>> {
    let facet = &tilde.vertices[1..];
    let n = p.dim();
    let mut out = Vec::new();
    if facet.is_empty() {
        return Ok(out);
    }
    for w in BeliefGrid::new(facet.len(), resolution)?.points() {
        let mut f = vec![0.0; n];
        for (c, v) in w.coords().iter().zip(facet) {
            for (fi, vi) in f.iter_mut().zip(v.coords()) {
                *fi += c * vi;
            }
        }
        for t in FAN_STRETCH {
            let x: Vec<f64> = f.iter().zip(p.coords()).map(|(a, b)| a + t * (a - b)).collect();
            if x.iter().all(|v| *v >= 0.0) {
                out.push(Belief::normalized(x));
            }
        }
    }
    Ok(out)
}

pub fn quasiconvex_dichotomy(game: &MomentGame, p: &Belief, grid: &BeliefGrid) -> Result<DichotomyReport> {
    let bp = solve_bp(game, p, grid)?.value;
    let ct_plan = solve_ct_max(game, p, grid)?;
    let ct = ct_plan.value;
    // Cheap-talk atoms can sit off the grid; offering them to the mediation
    // program keeps its value at least the cheap-talk value.
    let mut points = grid.points().to_vec();
    points.push(p.clone());
    points.extend(ct_plan.plan.atoms.iter().map(|a| a.belief.clone()));
    if let Ok(tilde) = build_tilde_simplex(game) {
        points.extend(facet_fan(&tilde, p, grid.resolution())?);
    }
    let md = md_over(p, &Candidates::from_points(game, points), Some(grid.resolution()))?.value;
    let no_disclosure = game.interval(p.coords()).1;
    let max_value = grid
        .points()
        .iter()
        .map(|mu| game.interval(mu.coords()).1)
        .fold(f64::NEG_INFINITY, f64::max);
    let margins = [max_value - bp, bp - md, md - ct, ct - no_disclosure];
    let case = if max_value <= ct + CHAIN_TOL { DichotomyCase::Case1 } else { DichotomyCase::Case2 };
    Ok(DichotomyReport {
        case,
        max_value,
        bp,
        md,
        ct,
        no_disclosure,
        margins,
        strict_chain: margins.iter().all(|m| *m > CHAIN_TOL),
    })
}
