//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use medsolve::battery::{finite_battery, random_md_outcome, rng, seed_from_env};
use medsolve::diagnose::{
    check_honesty_state_dependent, check_implementable, construct_improving_plan, is_improvable, receiver_value,
    Trichotomy,
};
use medsolve::geom::BeliefGrid;
use medsolve::linprog::Mode;
use medsolve::model::families::{mean_variance, quadratic, rotated_s, salesman, sine, think_tank};
use medsolve::model::{
    outcome_to_plan, plan_to_outcome, Atom, Belief, BeliefPlan, Family, FiniteGame, MomentFn, MomentGame, ValueModel,
};
use medsolve::moment::{build_tilde_simplex, quasiconvex_dichotomy, DichotomyCase};
use medsolve::papercases::{load_fixture, trilemma_payoff};
use medsolve::solve::{
    default_resolution, dual_probe, solve_bp, solve_ct_max, solve_md_belief_grid, solve_md_outcome, solve_nd,
};
use medsolve::Result;

const BATTERY_SIZE: usize = 50;
const OUTCOME_SAMPLES: usize = 100;

const GRID_K: usize = 64;
const GRID_GAP: f64 = 1e-3;
const ORDER_TOL: f64 = 1e-7;
const GRID_BUDGET: Duration = Duration::from_secs(60);

const RESIDUAL_TOL: f64 = 1e-8;
const PAYOFF_TOL: f64 = 1e-9;

const THINK_TANK_SAMPLES: usize = 20;
const BOUNDARY_MARGIN: f64 = 0.02;
const THINK_TANK_TOL: f64 = 1e-6;
const THINK_TANK_BUDGET: Duration = Duration::from_secs(30);

const ROTATED_DELTA: f64 = 209.0 / 409.0;
const FINE_K: usize = 800;
const CT_ZERO_TOL: f64 = 1e-6;
const BP_TOL: f64 = 1e-4;
const GAIN_TOL: f64 = 1e-8;

const QUAD_TOL: f64 = 1e-6;
const PROBE_TOL: f64 = 2e-3;

const STRICT_GAIN: f64 = 1e-9;
const VALUE_TOL: f64 = 1e-6;

const BINARY_K: usize = 400;
const BINARY_TOL: f64 = 1e-4;
const SINE_MD_FLOOR: f64 = 1e-3;

const LAMBDA_TOL: f64 = 1e-12;
const MARGIN_FLOOR: f64 = 1e-4;
const DICHOTOMY_K: usize = 80;

const TRILEMMA_TOL: f64 = 1e-9;

struct Outcome {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome { passed, detail: detail.into() })
}

fn grid(n: usize, k: usize) -> Result<BeliefGrid> {
    BeliefGrid::new(n, k)
}

fn default_grid(game: &FiniteGame) -> Result<BeliefGrid> {
    let n = game.num_states();
    grid(n, default_resolution(n, true))
}

fn v_hi<M: ValueModel + ?Sized>(model: &M, p: &Belief) -> f64 {
    model.interval(p.coords()).1
}

fn grid_matches_outcome_program(battery: &[FiniteGame]) -> Result<Outcome> {
    let start = Instant::now();
    let mut worst_gap = 0.0_f64;
    let mut worst_excess = f64::NEG_INFINITY;
    for game in battery {
        let exact = solve_md_outcome(game, Mode::Float)?.value;
        let approx = solve_md_belief_grid(game, game.prior(), &grid(game.num_states(), GRID_K)?)?.value;
        worst_gap = worst_gap.max((exact - approx).abs());
        worst_excess = worst_excess.max(approx - exact);
    }
    let elapsed = start.elapsed();
    verdict(
        worst_gap <= GRID_GAP && worst_excess <= ORDER_TOL && elapsed <= GRID_BUDGET,
        format!("max |grid - outcome| = {worst_gap:.2e}, max excess = {worst_excess:.2e}, {elapsed:.1?}"),
    )
}

fn outcomes_round_trip(battery: &[FiniteGame], seed: u64) -> Result<Outcome> {
    let mut r = rng(seed ^ 0x5eed);
    let (mut consistency, mut covariance, mut payoff) = (0.0_f64, 0.0_f64, 0.0_f64);
    let mut rejected = 0;
    for i in 0..OUTCOME_SAMPLES {
        let game = &battery[i % battery.len()];
        let pi = random_md_outcome(&mut r, game)?;
        let plan = outcome_to_plan(game, &pi)?;
        let report = check_implementable(game, game.prior(), &plan);
        if !report.verdict.md {
            rejected += 1;
        }
        consistency = consistency.max(report.max_consistency());
        covariance = covariance.max(report.max_covariance());
        let back = plan_to_outcome(game, &plan)?;
        payoff = payoff.max((back.sender_payoff(game) - pi.sender_payoff(game)).abs());
    }
    verdict(
        rejected == 0 && consistency <= RESIDUAL_TOL && covariance <= RESIDUAL_TOL && payoff <= PAYOFF_TOL,
        format!("rejected {rejected}, consistency {consistency:.1e}, covariance {covariance:.1e}, payoff drift {payoff:.1e}"),
    )
}

fn protocols_are_ordered(battery: &[FiniteGame]) -> Result<Outcome> {
    let mut violations = 0;
    let mut inverted = 0;
    for game in battery {
        let p = game.prior();
        let g = default_grid(game)?;
        let bp = solve_bp(game, p, &g)?.value;
        let md = solve_md_outcome(game, Mode::Float)?.value;
        let ct = solve_ct_max(game, p, &g)?.value;
        let nd = v_hi(game, p);
        if bp < md - ORDER_TOL || md < ct - ORDER_TOL || ct < nd - ORDER_TOL {
            violations += 1;
        }
        if Trichotomy::from_values(bp, md, ct) == Trichotomy::BpEqMdGtCt {
            inverted += 1;
        }
    }
    verdict(violations == 0 && inverted == 0, format!("{violations} order violations, {inverted} BP = MD > CT labels"))
}

fn plans_are_sparse(battery: &[FiniteGame]) -> Result<Outcome> {
    let (mut md_excess, mut ct_excess) = (0, 0);
    let (mut md_max, mut ct_max) = (0, 0);
    for game in battery {
        let n = game.num_states();
        let g = default_grid(game)?;
        let md = solve_md_belief_grid(game, game.prior(), &g)?.plan.len();
        let ct = solve_ct_max(game, game.prior(), &g)?.plan.len();
        md_max = md_max.max(md);
        ct_max = ct_max.max(ct);
        md_excess += usize::from(md > 2 * n - 1);
        ct_excess += usize::from(ct > n);
    }
    verdict(
        md_excess == 0 && ct_excess == 0,
        format!("largest mediation plan {md_max} atoms, largest cheap-talk plan {ct_max} atoms"),
    )
}

/// Cheap-talk value of the three-state think tank from its threshold rule.
fn think_tank_ct(p: &[f64]) -> f64 {
    if p[2] >= 2.0 / 3.0 {
        3.0
    } else if p[0] >= 1.0 / 3.0 {
        1.0
    } else {
        2.0
    }
}

fn think_tank_label(p: &[f64]) -> Trichotomy {
    if p[2] >= 2.0 / 3.0 {
        Trichotomy::AllEqual
    } else if p[0] > 1.0 / 3.0 {
        Trichotomy::BpGtMdGtCt
    } else {
        Trichotomy::BpGtMdEqCt
    }
}

fn think_tank_priors(seed: u64) -> Vec<Belief> {
    use rand::Rng;
    let mut r = rng(seed ^ 0x7a4c);
    let mut out = Vec::new();
    while out.len() < THINK_TANK_SAMPLES {
        let a: f64 = r.gen_range(0.02..0.96);
        let b: f64 = r.gen_range(0.02..0.96);
        let c = 1.0 - a - b;
        if c < 0.02 || (a - 1.0 / 3.0).abs() < BOUNDARY_MARGIN || (c - 2.0 / 3.0).abs() < BOUNDARY_MARGIN {
            continue;
        }
        out.push(Belief::normalized(vec![a, b, c]));
    }
    out
}

fn think_tank_regions(seed: u64) -> Result<Outcome> {
    let start = Instant::now();
    let base = think_tank(2.0, &[0.0, 1.0, 2.0, 3.0], None)?;
    let mut ct_misses = 0;
    let mut label_misses = 0;
    let mut seen = [false; 3];
    for p in think_tank_priors(seed) {
        let game = base.with_prior(&p)?;
        let g = default_grid(&game)?;
        let bp = solve_bp(&game, &p, &g)?.value;
        let md = solve_md_outcome(&game, Mode::Float)?.value;
        let ct = solve_ct_max(&game, &p, &g)?.value;
        if (ct - think_tank_ct(p.coords())).abs() > THINK_TANK_TOL {
            ct_misses += 1;
        }
        let expected = think_tank_label(p.coords());
        if Trichotomy::from_values(bp, md, ct) != expected {
            label_misses += 1;
        }
        let slot = match expected {
            Trichotomy::AllEqual => 0,
            Trichotomy::BpGtMdGtCt => 1,
            _ => 2,
        };
        seen[slot] = true;
    }
    let elapsed = start.elapsed();
    verdict(
        ct_misses == 0 && label_misses == 0 && seen.iter().all(|s| *s) && elapsed <= THINK_TANK_BUDGET,
        format!("{ct_misses} value misses, {label_misses} label misses, regions hit {seen:?}, {elapsed:.1?}"),
    )
}

fn binary_plan(points: &[(f64, f64, f64)]) -> Result<BeliefPlan> {
    points
        .iter()
        .map(|&(x, w, s)| Ok(Atom { belief: Belief::binary(x)?, weight: w, selection: s }))
        .collect::<Result<Vec<_>>>()
        .map(BeliefPlan::new)
}

fn rotated_s_case() -> Result<Outcome> {
    let g = grid(2, FINE_K)?;
    let (mut ct_err, mut bp_err) = (0.0_f64, 0.0_f64);
    for i in 1..=10 {
        let p = 0.05 * i as f64;
        let game = rotated_s(ROTATED_DELTA, p)?;
        let prior = game.prior().clone();
        ct_err = ct_err.max(solve_ct_max(&game, &prior, &g)?.value.abs());
        let closed = 4.0 * p / 3.0 * 12.0 / 409.0;
        bp_err = bp_err.max((solve_bp(&game, &prior, &g)?.value - closed).abs());
    }

    let game = rotated_s(ROTATED_DELTA, 0.3)?;
    let p = game.prior().clone();
    let ct = solve_ct_max(&game, &p, &g)?;
    let witness = is_improvable(&game, &p, ct.value, &g, true)?.witness;
    let gain_err = match &witness {
        Some(w) => {
            let cert = construct_improving_plan(&game, &p, ct.value, w, &g)?;
            (cert.value_gain - cert.closed_form_gain).abs()
        }
        None => f64::INFINITY,
    };
    let v = |x: f64| game.value_at_moment(&[x]);
    let mediated =
        binary_plan(&[(0.0, 49.0 / 75.0, v(0.0)), (0.75, 14.0 / 75.0, v(0.75)), (1.0, 12.0 / 75.0, v(1.0))])?;
    let r_md = receiver_value(&game, &mediated)?;
    let r_ct = receiver_value(&game, &ct.plan)?;
    verdict(
        ct_err <= CT_ZERO_TOL && bp_err <= BP_TOL && gain_err <= GAIN_TOL && r_md > r_ct,
        format!(
            "max |CT| = {ct_err:.1e}, max BP error = {bp_err:.1e}, gain error = {gain_err:.1e}, receiver {r_md:.4} vs {r_ct:.4}"
        ),
    )
}

fn quadratic_dual() -> Result<Outcome> {
    let game = quadratic(0.5)?;
    let p = game.prior().clone();
    let g = grid(2, FINE_K)?;
    let md = solve_md_belief_grid(&game, &p, &g)?.value;
    let mut probes = Vec::new();
    let mut probe_err = 0.0_f64;
    for mult in [-10.0, -100.0, -1000.0] {
        let value = dual_probe(&game, &p, &[0.0, mult], &g)?.value;
        probe_err = probe_err.max((value - (0.25 - 1.0 / (2.0 * mult))).abs());
        probes.push(value);
    }
    let decreasing = probes.windows(2).all(|w| w[1] < w[0]);
    verdict(
        (md - 0.25).abs() <= QUAD_TOL && probe_err <= PROBE_TOL && decreasing,
        format!("MD = {md:.8}, probes {probes:.5?}, max probe error {probe_err:.1e}"),
    )
}

fn constructions_improve(battery: &[FiniteGame]) -> Result<Outcome> {
    let (mut attempted, mut failed) = (0, 0);
    let mut min_gain = f64::INFINITY;
    for game in battery {
        let p = game.prior();
        let g = default_grid(game)?;
        let s = solve_ct_max(game, p, &g)?.value;
        let Some(witness) = is_improvable(game, p, s, &g, true)?.witness else { continue };
        attempted += 1;
        let oracle = solve_md_outcome(game, Mode::Float)?.value;
        match construct_improving_plan(game, p, s, &witness, &g) {
            Ok(cert) => {
                min_gain = min_gain.min(cert.value_gain);
                let ok = cert.implementability.verdict.md
                    && cert.value_gain > STRICT_GAIN
                    && cert.value <= oracle + ORDER_TOL;
                failed += usize::from(!ok);
            }
            Err(_) => failed += 1,
        }
    }
    verdict(
        attempted > 0 && failed == 0,
        format!("{attempted} improvable games, {failed} failed constructions, smallest gain {min_gain:.2e}"),
    )
}

fn unimprovable_means_equal(battery: &[FiniteGame]) -> Result<Outcome> {
    let (mut checked, mut failed) = (0, 0);
    let mut worst = 0.0_f64;
    for game in battery {
        let p = game.prior();
        let g = default_grid(game)?;
        let s = solve_ct_max(game, p, &g)?.value;
        if is_improvable(game, p, s, &g, false)?.improvable {
            continue;
        }
        checked += 1;
        let gap = (solve_md_outcome(game, Mode::Float)?.value - s).abs();
        worst = worst.max(gap);
        failed += usize::from(gap > VALUE_TOL);
    }
    verdict(failed == 0, format!("{checked} games not improvable, {failed} with MD != CT, max gap {worst:.1e}"))
}

fn binary_game(label: &str, p: f64, v: fn(f64) -> f64) -> Result<MomentGame> {
    let sender: MomentFn = Arc::new(move |x: &[f64]| v(x[0]));
    MomentGame::new(
        vec![vec![0.0], vec![1.0]],
        Belief::binary(p)?,
        sender,
        None,
        Family::Custom { label: label.into() },
    )
}

fn binary_classifiers() -> Result<Outcome> {
    let g = grid(2, BINARY_K)?;
    let shapes: [(&str, fn(f64) -> f64); 3] = [
        ("monotone", |x| x.powi(3) + x),
        ("concave", |x| -(x - 0.4) * (x - 0.4)),
        ("quasiconvex", |x| (x - 0.5) * (x - 0.5)),
    ];
    let mut worst = 0.0_f64;
    let mut nd_worst = 0.0_f64;
    for (label, v) in shapes {
        for i in 1..=10 {
            let p = (i as f64 - 0.5) / 10.0;
            let game = binary_game(label, p, v)?;
            let prior = game.prior().clone();
            let md = solve_md_belief_grid(&game, &prior, &g)?.value;
            let ct = solve_ct_max(&game, &prior, &g)?.value;
            worst = worst.max((md - ct).abs());
            if label == "monotone" {
                nd_worst = nd_worst.max((ct - solve_nd(&game, &prior).value).abs());
            }
        }
    }
    let wave = sine(0.2)?;
    let p = wave.prior().clone();
    let sine_ct = solve_ct_max(&wave, &p, &g)?.value;
    let sine_md = solve_md_belief_grid(&wave, &p, &g)?.value;
    let disclosure = wave.value_at_moment(&[0.0]).max(wave.value_at_moment(&[1.0]));
    verdict(
        worst <= BINARY_TOL && nd_worst <= BINARY_TOL && sine_ct.abs() <= CT_ZERO_TOL && disclosure.abs() <= 1e-12
            && sine_md > SINE_MD_FLOOR,
        format!("max |MD - CT| = {worst:.1e}, monotone |CT - ND| = {nd_worst:.1e}, sine CT = {sine_ct:.1e}, MD = {sine_md:.4}"),
    )
}

fn moment_games() -> Result<Outcome> {
    let mv = mean_variance(4.0, &[0.0, 0.5, 1.0], None)?;
    let tilde = build_tilde_simplex(&mv)?;
    let lambda_err = (tilde.lambdas[1] - 0.5).abs().max((tilde.lambdas[2] - 0.75).abs());
    let priors = [
        [7.0 / 12.0, 1.0 / 6.0, 0.25],
        [0.5, 0.2, 0.3],
        [0.6875, 0.125, 0.1875],
        [0.55, 0.3, 0.15],
        [0.45, 0.1, 0.45],
    ];
    let g = grid(3, DICHOTOMY_K)?;
    let mut weakest = f64::INFINITY;
    let mut off_case = 0;
    for prior in priors {
        let p = Belief::new(prior.to_vec())?;
        if !tilde.contains_interior(&p) {
            off_case += 1;
            continue;
        }
        let r = quasiconvex_dichotomy(&mv.with_prior(&p)?, &p, &g)?;
        if r.case != DichotomyCase::Case2 || !r.strict_chain {
            off_case += 1;
        }
        weakest = r.margins.iter().fold(weakest, |m, x| m.min(*x));
    }
    let lambdas = [[0.3, 0.12], [0.31, 0.13], [0.32, 0.14]]
        .iter()
        .map(|rho| Ok(build_tilde_simplex(&salesman(&[0.6, 0.4], rho, 2, None)?)?.lambdas))
        .collect::<Result<Vec<_>>>()?;
    let monotone = lambdas.windows(2).all(|w| w[0].iter().zip(&w[1]).skip(1).all(|(a, b)| b > a));
    verdict(
        lambda_err <= LAMBDA_TOL && off_case == 0 && weakest > MARGIN_FLOOR && monotone,
        format!("lambda error {lambda_err:.1e}, {off_case} priors off CASE2, weakest margin {weakest:.2e}, salesman monotone {monotone}"),
    )
}

fn trilemma() -> Result<Outcome> {
    let fixture = load_fixture("trilemma-state-dependent")?;
    let plan = fixture.plan.ok_or_else(|| medsolve::Error::InvalidGame("fixture has no plan".into()))?;
    let p = Belief::new(plan.barycenter())?;
    let report = check_honesty_state_dependent(trilemma_payoff, &p, &plan);
    let low = plan.conditional_mean(&p, 0, |b| 1.0 / b[1]);
    let high = plan.conditional_mean(&p, 1, |b| 1.0 / b[1]);
    verdict(
        report.honest
            && !report.cheap_talk_feasible
            && (low - 10.0 / 3.0).abs() <= TRILEMMA_TOL
            && (high - 2.0).abs() <= TRILEMMA_TOL,
        format!(
            "honest {}, cheap-talk feasible {}, E[1/mu | low] = {low:.10}, E[1/mu | high] = {high:.10}",
            report.honest, report.cheap_talk_feasible
        ),
    )
}

fn main() -> ExitCode {
    let seed = seed_from_env();
    let battery = match finite_battery(seed, BATTERY_SIZE) {
        Ok(b) => b,
        Err(e) => {
            println!("FAIL battery: {e}");
            return ExitCode::FAILURE;
        }
    };
    println!("acceptance: seed {seed}, {} battery games", battery.len());
    let criteria: Vec<(&str, Box<dyn Fn() -> Result<Outcome> + '_>)> = vec![
        ("grid mediation matches the outcome program", Box::new(|| grid_matches_outcome_program(&battery))),
        ("mediation outcomes round-trip through plans", Box::new(|| outcomes_round_trip(&battery, seed))),
        ("BP >= MD >= CT >= V(p)", Box::new(|| protocols_are_ordered(&battery))),
        ("optimal plans are sparse", Box::new(|| plans_are_sparse(&battery))),
        ("think-tank regions", Box::new(|| think_tank_regions(seed))),
        ("rotated-S values, construction and receiver welfare", Box::new(rotated_s_case)),
        ("quadratic mediation value and dual probes", Box::new(quadratic_dual)),
        ("improvable games get an improving plan", Box::new(|| constructions_improve(&battery))),
        ("unimprovable games have MD = CT", Box::new(|| unimprovable_means_equal(&battery))),
        ("binary-state classifiers", Box::new(binary_classifiers)),
        ("moment games: crossing simplex and dichotomy", Box::new(moment_games)),
        ("state-dependent honesty example", Box::new(trilemma)),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (passed, detail) = match run() {
            Ok(o) => (o.passed, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        failures += usize::from(!passed);
        let tag = if passed { "PASS" } else { "FAIL" };
        println!("{tag} [{:>2}] {name}: {detail} ({:.1?})", i + 1, start.elapsed());
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
