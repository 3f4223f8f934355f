use serde::Serialize;

use super::hull::hull_over;
use super::improve::{improvable_over, Improvability};
use crate::error::{Error, Result};
use crate::geom::BeliefGrid;
use crate::linprog::Mode;
use crate::model::{Belief, FiniteGame, ValueModel};
use crate::solve::{solve_bp, solve_ct_max, solve_md_outcome_with, Candidates, GridOptions};

/// Two protocol values closer than this count as equal.
pub const VALUE_TOL: f64 = 1e-6;

/// Sign slack for the crossing scans.
const CROSS_TOL: f64 = 1e-9;

/// Interior levels tried between the endpoints of the full-disclosure range.
const DISCLOSURE_LEVELS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Trichotomy {
    AllEqual,
    BpGtMdEqCt,
    BpGtMdGtCt,
    /// Never produced by a correct solver; kept so a violation is reported
    /// rather than hidden.
    BpEqMdGtCt,
}

impl Trichotomy {
    pub fn label(&self) -> &'static str {
        match self {
            Trichotomy::AllEqual => "ALL_EQUAL",
            Trichotomy::BpGtMdEqCt => "BP_GT_MD_EQ_CT",
            Trichotomy::BpGtMdGtCt => "BP_GT_MD_GT_CT",
            Trichotomy::BpEqMdGtCt => "BP_EQ_MD_GT_CT",
        }
    }

    pub fn from_values(bp: f64, md: f64, ct: f64) -> Self {
        match (bp - md > VALUE_TOL, md - ct > VALUE_TOL) {
            (false, false) => Trichotomy::AllEqual,
            (true, false) => Trichotomy::BpGtMdEqCt,
            (true, true) => Trichotomy::BpGtMdGtCt,
            (false, true) => Trichotomy::BpEqMdGtCt,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TrichotomyReport {
    pub bp: f64,
    pub md: f64,
    pub ct: f64,
    pub label: Trichotomy,
}

/// Exact values of the three protocols of a finite game at `p`.
pub fn classify_trichotomy(game: &FiniteGame, p: &Belief, grid: &BeliefGrid) -> Result<TrichotomyReport> {
    let bp = solve_bp(game, p, grid)?.value;
    let (md, _) = solve_md_outcome_with(game, p, Mode::Float)?;
    let ct = solve_ct_max(game, p, grid)?.value;
    Ok(TrichotomyReport { bp, md: md.value, ct, label: Trichotomy::from_values(bp, md.value, ct) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MonoCrossing {
    FromBelow,
    FromAbove,
    Both,
    No,
}

impl MonoCrossing {
    pub fn holds(&self) -> bool {
        !matches!(self, MonoCrossing::No)
    }
}

/// `(x, V_lo(x), V_hi(x))` on the grid and the critical beliefs, sorted by
/// the probability of the second state.
fn binary_profile<M: ValueModel + ?Sized>(model: &M, grid: &BeliefGrid, extra: &[f64]) -> Result<Vec<(f64, f64, f64)>> {
    if model.num_states() != 2 {
        return Err(Error::NotBinary);
    }
    let mut xs: Vec<f64> = grid.points().iter().map(|b| b[1]).collect();
    xs.extend(model.critical_beliefs().iter().map(|b| b[1]));
    xs.extend_from_slice(extra);
    xs.sort_by(f64::total_cmp);
    xs.dedup_by(|a, b| (*a - *b).abs() <= 1e-13);
    Ok(xs
        .into_iter()
        .map(|x| {
            let (lo, hi) = model.interval(&[1.0 - x, x]);
            (x, lo, hi)
        })
        .collect())
}

/// Scans `V − s` on a binary profile. From below: once `V_hi` is above zero,
/// `V_lo` never drops below it again. From above: once `V_lo` is below zero,
/// `V_hi` never rises above it again.
pub fn mono_crossing<M: ValueModel + ?Sized>(model: &M, s: f64, grid: &BeliefGrid) -> Result<MonoCrossing> {
    let profile = binary_profile(model, grid, &[])?;
    let tol = CROSS_TOL * 1f64.max(s.abs());
    let mut from_below = true;
    let mut from_above = true;
    let mut seen_high = false;
    let mut seen_low = false;
    for &(_, lo, hi) in &profile {
        if seen_high && lo < s - tol {
            from_below = false;
        }
        if seen_low && hi > s + tol {
            from_above = false;
        }
        seen_high |= hi > s + tol;
        seen_low |= lo < s - tol;
    }
    Ok(match (from_below, from_above) {
        (true, true) => MonoCrossing::Both,
        (true, false) => MonoCrossing::FromBelow,
        (false, true) => MonoCrossing::FromAbove,
        (false, false) => MonoCrossing::No,
    })
}

/// `V(x̂) = s` and `(V(x) − s)(x − x̂)` keeps one sign.
pub fn single_crossing_at<M: ValueModel + ?Sized>(model: &M, s: f64, p_hat: f64, grid: &BeliefGrid) -> Result<bool> {
    if model.num_states() != 2 {
        return Err(Error::NotBinary);
    }
    if !model.singleton_valued() {
        return Err(Error::NotSingletonValued);
    }
    let tol = CROSS_TOL * 1f64.max(s.abs());
    let (v_hat, _) = model.interval(&[1.0 - p_hat, p_hat]);
    if (v_hat - s).abs() > tol {
        return Ok(false);
    }
    let profile = binary_profile(model, grid, &[p_hat])?;
    let product = |&(x, v, _): &(f64, f64, f64)| {
        let d = v - s;
        if d.abs() <= tol {
            0.0
        } else {
            d * (x - p_hat)
        }
    };
    Ok(profile.iter().all(|pt| product(pt) >= 0.0) || profile.iter().all(|pt| product(pt) <= 0.0))
}

#[derive(Debug, Clone, Serialize)]
pub struct FullDisclosureReport {
    /// Payoffs available at every degenerate belief and not below `V_hi(p)`.
    pub feasible_range: Option<(f64, f64)>,
    pub optimal: bool,
    /// A full-disclosure payoff that is not improvable, if one was found.
    pub level: Option<f64>,
}

/// Full disclosure is optimal under mediation iff it is a cheap-talk
/// equilibrium at some level `s ≥ V_hi(p)` that is not improvable.
pub fn full_disclosure_optimal<M: ValueModel + ?Sized>(model: &M, p: &Belief, grid: &BeliefGrid) -> Result<FullDisclosureReport> {
    let n = p.dim();
    let mut lo = model.interval(p.coords()).1;
    let mut hi = f64::INFINITY;
    for w in 0..n {
        let (a, b) = model.interval(Belief::vertex(n, w).coords());
        lo = lo.max(a);
        hi = hi.min(b);
    }
    let tol = CROSS_TOL * 1f64.max(lo.abs());
    if lo > hi + tol {
        return Ok(FullDisclosureReport { feasible_range: None, optimal: false, level: None });
    }
    let hi = hi.max(lo);
    let mut levels = vec![lo, hi];
    if hi > lo {
        levels.extend((1..=DISCLOSURE_LEVELS).map(|i| lo + (hi - lo) * i as f64 / (DISCLOSURE_LEVELS + 1) as f64));
    }
    for s in levels {
        let cand = Candidates::at_level(model, grid, p, GridOptions::default(), s);
        if !improvable_over(model, p, s, &cand, false)?.improvable {
            return Ok(FullDisclosureReport { feasible_range: Some((lo, hi)), optimal: true, level: Some(s) });
        }
    }
    Ok(FullDisclosureReport { feasible_range: Some((lo, hi)), optimal: false, level: None })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MediationVerdict {
    /// Cheap talk is locally improvable: mediation is strictly better.
    MdGtCt,
    /// Cheap talk is not improvable: mediation adds nothing.
    MdEqCt,
    /// Improvable, but only off the cheap-talk hull, which is not full.
    Indeterminate,
}

#[derive(Debug, Clone, Serialize)]
pub struct MediationReport {
    pub ct_value: f64,
    pub full_dimensional: bool,
    pub local: Improvability,
    pub global: Improvability,
    pub verdict: MediationVerdict,
}

/// Compares mediation with cheap talk through improvability of the best
/// cheap-talk value.
pub fn mediation_vs_cheap_talk<M: ValueModel + ?Sized>(model: &M, p: &Belief, grid: &BeliefGrid) -> Result<MediationReport> {
    let ct_value = solve_ct_max(model, p, grid)?.value;
    let cand = Candidates::at_level(model, grid, p, GridOptions::default(), ct_value);
    let (hull, _) = hull_over(model, p, ct_value, &cand)?;
    let local = improvable_over(model, p, ct_value, &cand, true)?;
    let global = improvable_over(model, p, ct_value, &cand, false)?;
    let verdict = if local.improvable {
        MediationVerdict::MdGtCt
    } else if !global.improvable {
        MediationVerdict::MdEqCt
    } else {
        MediationVerdict::Indeterminate
    };
    Ok(MediationReport { ct_value, full_dimensional: hull.full_dimensional, local, global, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::families::{quadratic, rotated_s, sine, think_tank, ROTATED_S_DELTA};

    fn grid2(k: usize) -> BeliefGrid {
        BeliefGrid::new(2, k).unwrap()
    }

    #[test]
    fn crossing_examples() {
        let g = grid2(400);
        assert_eq!(mono_crossing(&sine(0.2).unwrap(), 0.0, &g).unwrap(), MonoCrossing::No);
        assert_eq!(mono_crossing(&rotated_s(ROTATED_S_DELTA, 0.3).unwrap(), 0.0, &g).unwrap(), MonoCrossing::No);
        let q = quadratic(0.5).unwrap();
        assert!(mono_crossing(&q, 0.25, &g).unwrap().holds());
        // V − 1/4 = 4μ(μ − 1/2) changes sign once, at 1/2.
        assert!(single_crossing_at(&q, 0.25, 0.5, &g).unwrap());
        assert!(!single_crossing_at(&rotated_s(ROTATED_S_DELTA, 0.3).unwrap(), 0.0, 0.3, &g).unwrap());
    }

    #[test]
    fn sine_full_disclosure_is_not_optimal() {
        let game = sine(0.2).unwrap();
        let r = full_disclosure_optimal(&game, game.prior(), &grid2(200)).unwrap();
        let (lo, hi) = r.feasible_range.unwrap();
        assert!(lo.abs() < 1e-12 && hi.abs() < 1e-12);
        assert!(!r.optimal);
    }

    #[test]
    fn constant_sender_full_disclosure_is_optimal() {
        let game = FiniteGame::from_tables(vec![0.5, 0.5], vec![1.0, 1.0], vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!(full_disclosure_optimal(&game, game.prior(), &grid2(8)).unwrap().optimal);
    }

    #[test]
    fn think_tank_regions() {
        let grid = BeliefGrid::new(3, 4).unwrap();
        let cases = [
            ([0.1, 0.1, 0.8], Trichotomy::AllEqual),
            ([0.2, 0.4, 0.4], Trichotomy::BpGtMdEqCt),
            ([0.5, 0.25, 0.25], Trichotomy::BpGtMdGtCt),
        ];
        for (p, want) in cases {
            let p = Belief::new(p.to_vec()).unwrap();
            let game = think_tank(2.0, &[0.0, 1.0, 2.0, 3.0], Some(p.clone())).unwrap();
            assert_eq!(classify_trichotomy(&game, &p, &grid).unwrap().label, want);
            let fd = full_disclosure_optimal(&game, &p, &grid).unwrap();
            assert!(!fd.optimal && fd.feasible_range.is_none());
        }
    }

    #[test]
    fn mediation_verdicts() {
        let grid = BeliefGrid::new(3, 4).unwrap();
        let right = Belief::new(vec![0.5, 0.25, 0.25]).unwrap();
        let game = think_tank(2.0, &[0.0, 1.0, 2.0, 3.0], Some(right.clone())).unwrap();
        assert_eq!(mediation_vs_cheap_talk(&game, &right, &grid).unwrap().verdict, MediationVerdict::MdGtCt);
        let left = Belief::new(vec![0.2, 0.4, 0.4]).unwrap();
        assert_eq!(mediation_vs_cheap_talk(&game, &left, &grid).unwrap().verdict, MediationVerdict::MdEqCt);
    }
}
