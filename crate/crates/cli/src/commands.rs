use std::path::Path;

use serde::Serialize;

use medsolve::diagnose::{
    check_implementable, construct_improving_plan, full_disclosure_optimal, is_improvable, mediation_vs_cheap_talk,
    mono_crossing, single_crossing_at, FullDisclosureReport, Improvability, MediationVerdict, MonoCrossing,
    Trichotomy,
};
use medsolve::geom::BeliefGrid;
use medsolve::linprog::Mode;
use medsolve::model::{Belief, Game, ValueModel};
use medsolve::moment::{one_dim_mean_classifier, OneDimReport};
use medsolve::papercases::{fixture_names, run_fixture};
use medsolve::solve::{
    solve_bp, solve_ct_max, solve_ct_min, solve_md_belief_grid, solve_md_outcome_with, solve_nd, SolveReport,
};

use crate::failure::Failure;
use crate::input::{game_at, grid_for, load_game, load_plan, parse_prior};
use crate::output::print_json;
use crate::{MethodArg, ProtocolArg};

/// Samples of the mean range used by the one-dimensional classifier.
const MEAN_SAMPLES: usize = 2000;

/// Exit code of `improve` when cheap talk cannot be beaten.
pub const NOT_IMPROVABLE: i32 = 4;

pub fn protocol_report(
    game: &Game,
    protocol: ProtocolArg,
    grid: &BeliefGrid,
    method: Option<MethodArg>,
    mode: Mode,
) -> Result<SolveReport, Failure> {
    let p = game.prior();
    Ok(match protocol {
        ProtocolArg::Bp => solve_bp(game, p, grid)?,
        ProtocolArg::CtMax => solve_ct_max(game, p, grid)?,
        ProtocolArg::CtMin => solve_ct_min(game, p, grid)?,
        ProtocolArg::Nd => solve_nd(game, p),
        ProtocolArg::Md => match (method, game.as_finite()) {
            (Some(MethodArg::Outcome) | None, Some(finite)) => solve_md_outcome_with(finite, p, mode)?.0,
            (Some(MethodArg::Outcome), None) => {
                return Err(Failure::Input("the outcome method needs a finite game".into()))
            }
            (Some(MethodArg::Grid), _) | (None, None) => solve_md_belief_grid(game, p, grid)?,
        },
    })
}

pub fn solve(
    path: &Path,
    protocol: ProtocolArg,
    prior: Option<&str>,
    grid: Option<usize>,
    method: Option<MethodArg>,
    exact: bool,
) -> Result<i32, Failure> {
    let game = game_at(load_game(path)?, prior)?;
    let outcome_lp = protocol == ProtocolArg::Md && method != Some(MethodArg::Grid) && game.as_finite().is_some();
    if exact && !outcome_lp {
        return Err(Failure::Input("--exact-lp applies only to the mediation outcome program".into()));
    }
    if method.is_some() && protocol != ProtocolArg::Md {
        return Err(Failure::Input("--method applies only to --protocol md".into()));
    }
    let grid = grid_for(&game, grid)?;
    let mode = if exact { Mode::Rational } else { Mode::Float };
    print_json(&protocol_report(&game, protocol, &grid, method, mode)?)?;
    Ok(0)
}

/// The three values and their ordering label at the game's prior.
pub fn trichotomy(game: &Game, grid: &BeliefGrid) -> Result<(f64, f64, f64, Trichotomy), Failure> {
    let bp = protocol_report(game, ProtocolArg::Bp, grid, None, Mode::Float)?.value;
    let md = protocol_report(game, ProtocolArg::Md, grid, None, Mode::Float)?.value;
    let ct = protocol_report(game, ProtocolArg::CtMax, grid, None, Mode::Float)?.value;
    Ok((bp, md, ct, Trichotomy::from_values(bp, md, ct)))
}

#[derive(Serialize)]
struct Values {
    bp: f64,
    md: f64,
    ct_max: f64,
    nd: f64,
}

#[derive(Serialize)]
struct Crossing {
    level: f64,
    mono_crossing: MonoCrossing,
    single_crossing: bool,
    /// Only for singleton-valued games.
    single_crossing_at_prior: Option<bool>,
}

#[derive(Serialize)]
struct Diagnosis {
    prior: Belief,
    grid_resolution: usize,
    values: Values,
    trichotomy: Trichotomy,
    full_dimensional: bool,
    improvable: bool,
    local: Improvability,
    global: Improvability,
    mediation_verdict: MediationVerdict,
    binary_crossing: Option<Crossing>,
    mean_class: Option<OneDimReport>,
    full_disclosure: FullDisclosureReport,
}

pub fn diagnose(path: &Path, prior: &str, grid: Option<usize>) -> Result<i32, Failure> {
    let game = game_at(load_game(path)?, Some(prior))?;
    let grid = grid_for(&game, grid)?;
    let p = game.prior().clone();
    let (bp, md, ct, label) = trichotomy(&game, &grid)?;
    let nd = solve_nd(&game, &p).value;
    let mediation = mediation_vs_cheap_talk(&game, &p, &grid)?;
    let binary_crossing = if game.num_states() == 2 {
        let shape = mono_crossing(&game, ct, &grid)?;
        let at_prior = if game.singleton_valued() { Some(single_crossing_at(&game, ct, p[1], &grid)?) } else { None };
        Some(Crossing { level: ct, mono_crossing: shape, single_crossing: shape.holds(), single_crossing_at_prior: at_prior })
    } else {
        None
    };
    let mean_class = match game.as_moment() {
        Some(m) if m.moment_dim() == 1 => Some(one_dim_mean_classifier(m, &p, MEAN_SAMPLES)?),
        _ => None,
    };
    let report = Diagnosis {
        prior: p.clone(),
        grid_resolution: grid.resolution(),
        values: Values { bp, md, ct_max: ct, nd },
        trichotomy: label,
        full_dimensional: mediation.full_dimensional,
        improvable: mediation.local.improvable,
        local: mediation.local,
        global: mediation.global,
        mediation_verdict: mediation.verdict,
        binary_crossing,
        mean_class,
        full_disclosure: full_disclosure_optimal(&game, &p, &grid)?,
    };
    print_json(&report)?;
    Ok(0)
}

pub fn check(game_path: &Path, plan_path: &Path, prior: Option<&str>) -> Result<i32, Failure> {
    let game = load_game(game_path)?;
    let plan = load_plan(plan_path)?;
    let p = match prior {
        Some(text) => parse_prior(text, game.num_states())?,
        None => Belief::new(plan.barycenter())?,
    };
    game.check_belief(&p)?;
    for atom in &plan.atoms {
        game.check_belief(&atom.belief)?;
    }
    print_json(&check_implementable(&game, &p, &plan))?;
    Ok(0)
}

#[derive(Serialize)]
struct NotImprovable {
    improvable: bool,
    ct_value: f64,
    local: Improvability,
    global: Improvability,
}

pub fn improve(path: &Path, prior: &str, grid: Option<usize>) -> Result<i32, Failure> {
    let game = game_at(load_game(path)?, Some(prior))?;
    let grid = grid_for(&game, grid)?;
    let p = game.prior().clone();
    let s = solve_ct_max(&game, &p, &grid)?.value;
    let local = is_improvable(&game, &p, s, &grid, true)?;
    match &local.witness {
        Some(witness) => {
            print_json(&construct_improving_plan(&game, &p, s, witness, &grid)?)?;
            Ok(0)
        }
        None => {
            let global = is_improvable(&game, &p, s, &grid, false)?;
            print_json(&NotImprovable { improvable: false, ct_value: s, local, global })?;
            Ok(NOT_IMPROVABLE)
        }
    }
}

pub fn fixtures(name: Option<&str>) -> Result<i32, Failure> {
    let names: Vec<&str> = match name {
        Some(n) => vec![n],
        None => fixture_names(),
    };
    let reports = names.into_iter().map(run_fixture).collect::<Result<Vec<_>, _>>()?;
    let all_passed = reports.iter().all(|r| r.passed);
    print_json(&reports)?;
    Ok(if all_passed { 0 } else { 3 })
}
