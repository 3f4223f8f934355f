use serde::Serialize;

use crate::diagnose::MonoCrossing;
use crate::error::{Error, Result};
use crate::geom::is_interior;
use crate::linprog::{vertex_solution, LinearProgram, Relation, Sense, Status};
use crate::model::{Belief, MomentGame};
use crate::solve::WEIGHT_TOL;

const CROSS_TOL: f64 = 1e-9;

/// Probe radius for the interior test on the level-set fibers.
const INTERIOR_RADIUS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanAtom {
    pub x: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct MeanPlan {
    pub atoms: Vec<MeanAtom>,
}

impl MeanPlan {
    pub fn mean(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight * a.x).sum()
    }

    pub fn value(&self, v: impl Fn(f64) -> f64) -> f64 {
        self.atoms.iter().map(|a| a.weight * v(a.x)).sum()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MeanPlanReport {
    pub value: f64,
    pub plan: MeanPlan,
}

fn require_scalar(game: &MomentGame) -> Result<()> {
    if game.moment_dim() != 1 {
        return Err(Error::DimensionMismatch(format!(
            "expected a scalar moment, got dimension {}",
            game.moment_dim()
        )));
    }
    Ok(())
}

fn value(game: &MomentGame, x: f64) -> f64 {
    game.value_at_moment(&[x])
}

/// Best distribution of the mean subject to the mean-only obedience
/// condition `Σ w v(x)(x − T(p)) = 0`.
pub fn relaxed_md_mean(game: &MomentGame, p: &Belief, x_grid: &[f64]) -> Result<MeanPlanReport> {
    require_scalar(game)?;
    let x0 = game.moment(p.coords())[0];
    let mut xs: Vec<f64> = x_grid.to_vec();
    xs.push(x0);
    let vs: Vec<f64> = xs.iter().map(|&x| value(game, x)).collect();
    let mut lp = LinearProgram::new(Sense::Maximize, vs.clone());
    lp.add_row(vec![1.0; xs.len()], Relation::Eq, 1.0);
    lp.add_row(xs.clone(), Relation::Eq, x0);
    lp.add_row(xs.iter().zip(&vs).map(|(x, v)| v * (x - x0)).collect(), Relation::Eq, 0.0);
    let sol = vertex_solution(&lp)?;
    if sol.status != Status::Optimal {
        return Err(Error::PriorOffGridHull);
    }
    let atoms = xs
        .iter()
        .zip(&sol.primal)
        .filter(|(_, w)| **w > WEIGHT_TOL)
        .map(|(&x, &weight)| MeanAtom { x, weight })
        .collect();
    Ok(MeanPlanReport { value: sol.value, plan: MeanPlan { atoms } })
}

#[derive(Debug, Clone, Serialize)]
pub struct DilationReport {
    pub feasible: bool,
    /// `transport[ω][j]`: mass of state `ω` sent to atom `j`.
    pub transport: Option<Vec<Vec<f64>>>,
}

/// Whether the mean distribution `q` lifts to a consistent, honest plan at
/// prior `p`.
pub fn dilation_feasible(game: &MomentGame, p: &Belief, q: &MeanPlan) -> Result<DilationReport> {
    require_scalar(game)?;
    let n = game.num_states();
    let m = q.atoms.len();
    let t: Vec<f64> = game.embedding().iter().map(|e| e[0]).collect();
    let vs: Vec<f64> = q.atoms.iter().map(|a| value(game, a.x)).collect();
    let average = q.value(|x| value(game, x));
    let var = |w: usize, j: usize| w * m + j;
    let mut lp = LinearProgram::new(Sense::Minimize, vec![0.0; n * m]);
    for (j, atom) in q.atoms.iter().enumerate() {
        let mut mass = vec![0.0; n * m];
        let mut first = vec![0.0; n * m];
        for w in 0..n {
            mass[var(w, j)] = 1.0;
            first[var(w, j)] = t[w];
        }
        lp.add_row(mass, Relation::Eq, atom.weight);
        lp.add_row(first, Relation::Eq, atom.weight * atom.x);
    }
    for w in 0..n {
        let mut mass = vec![0.0; n * m];
        let mut honest = vec![0.0; n * m];
        for j in 0..m {
            mass[var(w, j)] = 1.0;
            honest[var(w, j)] = vs[j];
        }
        lp.add_row(mass, Relation::Eq, p[w]);
        lp.add_row(honest, Relation::Eq, p[w] * average);
    }
    let sol = vertex_solution(&lp)?;
    if sol.status != Status::Optimal {
        return Ok(DilationReport { feasible: false, transport: None });
    }
    let transport = (0..n).map(|w| (0..m).map(|j| sol.primal[var(w, j)]).collect()).collect();
    Ok(DilationReport { feasible: true, transport: Some(transport) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MeanClass {
    /// No disclosure already attains the cheap-talk optimum.
    NdOptimalCt,
    /// Mediation and cheap talk coincide.
    MonoCrossingEq,
    /// Mediation strictly beats cheap talk.
    Improvable,
    Indeterminate,
}

#[derive(Debug, Clone, Serialize)]
pub struct OneDimReport {
    pub class: MeanClass,
    pub mean: f64,
    pub value_at_prior: f64,
    /// `min(max_{x ≤ x0} v, max_{x ≥ x0} v)`.
    pub upper_envelope: f64,
    pub single_crossing: bool,
    pub crossing: Option<MonoCrossing>,
    pub interior: Option<bool>,
    /// Means at which `v` meets the envelope level.
    pub level_points: Vec<f64>,
}

fn scan_crossing(pairs: &[(f64, f64)], s: f64, tol: f64) -> MonoCrossing {
    let (mut below, mut above) = (true, true);
    let (mut seen_high, mut seen_low) = (false, false);
    for &(_, v) in pairs {
        if seen_high && v < s - tol {
            below = false;
        }
        if seen_low && v > s + tol {
            above = false;
        }
        seen_high |= v > s + tol;
        seen_low |= v < s - tol;
    }
    match (below, above) {
        (true, true) => MonoCrossing::Both,
        (true, false) => MonoCrossing::FromBelow,
        (false, true) => MonoCrossing::FromAbove,
        (false, false) => MonoCrossing::No,
    }
}

/// Vertices of `{μ ∈ Δ : T(μ) = x}`.
fn fiber_vertices(t: &[f64], x: f64, tol: f64) -> Vec<Belief> {
    let n = t.len();
    let mut out = Vec::new();
    for a in 0..n {
        if (t[a] - x).abs() <= tol {
            out.push(Belief::vertex(n, a));
            continue;
        }
        for b in 0..n {
            if t[a] < x - tol && t[b] > x + tol {
                let l = (x - t[a]) / (t[b] - t[a]);
                out.push(Belief::vertex(n, b).mix(&Belief::vertex(n, a), l));
            }
        }
    }
    out
}

/// Where `v − s` meets zero: sampled points on the level plus bisected
/// sign changes.
fn level_points(game: &MomentGame, pairs: &[(f64, f64)], s: f64, tol: f64) -> Vec<f64> {
    let mut out: Vec<f64> = pairs.iter().filter(|(_, v)| (v - s).abs() <= tol).map(|(x, _)| *x).collect();
    for w in pairs.windows(2) {
        let ((xa, va), (xb, vb)) = (w[0], w[1]);
        if (va - s).abs() <= tol || (vb - s).abs() <= tol || (va - s).signum() == (vb - s).signum() {
            continue;
        }
        let (mut a, mut b) = (xa, xb);
        let up = vb > va;
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            if (value(game, m) > s) == up {
                b = m;
            } else {
                a = m;
            }
        }
        out.push(0.5 * (a + b));
    }
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    out
}

/// Compares mediation with cheap talk for a scalar-moment game from the
/// shape of `v` around the prior mean.
pub fn one_dim_mean_classifier(game: &MomentGame, p: &Belief, samples: usize) -> Result<OneDimReport> {
    require_scalar(game)?;
    let samples = samples.max(2);
    let t: Vec<f64> = game.embedding().iter().map(|e| e[0]).collect();
    let (lo, hi) = game.moment_range();
    let x0 = game.moment(p.coords())[0];
    let mut xs: Vec<f64> = (0..=samples).map(|i| lo + (hi - lo) * i as f64 / samples as f64).collect();
    xs.push(x0);
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let pairs: Vec<(f64, f64)> = xs.iter().map(|&x| (x, value(game, x))).collect();
    if let Some((x, v)) = pairs.iter().find(|(_, v)| !v.is_finite()) {
        return Err(Error::Domain(format!("sender value is {v} at mean {x}")));
    }
    let v0 = value(game, x0);
    let left = pairs.iter().filter(|(x, _)| *x <= x0).map(|(_, v)| *v).fold(f64::NEG_INFINITY, f64::max);
    let right = pairs.iter().filter(|(x, _)| *x >= x0).map(|(_, v)| *v).fold(f64::NEG_INFINITY, f64::max);
    let envelope = left.min(right);
    let tol = CROSS_TOL * 1f64.max(envelope.abs());
    let single_crossing = pairs.iter().all(|&(x, v)| {
        let side = (x - x0).signum();
        let gap = v - v0;
        side * gap >= -tol || gap.abs() <= tol
    }) || pairs.iter().all(|&(x, v)| {
        let side = (x - x0).signum();
        let gap = v - v0;
        side * gap <= tol || gap.abs() <= tol
    });
    let mut report = OneDimReport {
        class: MeanClass::Indeterminate,
        mean: x0,
        value_at_prior: v0,
        upper_envelope: envelope,
        single_crossing,
        crossing: None,
        interior: None,
        level_points: Vec::new(),
    };
    if single_crossing {
        report.class = MeanClass::MonoCrossingEq;
        return Ok(report);
    }
    if v0 >= envelope - tol {
        report.class = MeanClass::NdOptimalCt;
        return Ok(report);
    }
    let zeros = level_points(game, &pairs, envelope, tol);
    let gens: Vec<Belief> = zeros.iter().flat_map(|&z| fiber_vertices(&t, z, 1e-12)).collect();
    let interior = !gens.is_empty() && is_interior(&gens, p, INTERIOR_RADIUS)?;
    report.level_points = zeros;
    report.interior = Some(interior);
    if !interior {
        return Ok(report);
    }
    let crossing = scan_crossing(&pairs, envelope, tol);
    report.crossing = Some(crossing);
    report.class = if crossing.holds() { MeanClass::MonoCrossingEq } else { MeanClass::Improvable };
    Ok(report)
}
