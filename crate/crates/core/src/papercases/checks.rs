use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{CheckOutcome, Expectation, Fixture};
use crate::diagnose::{
    check_honesty_state_dependent, classify_trichotomy, construct_improving_plan, full_disclosure_optimal,
    is_improvable, receiver_value, Trichotomy,
};
use crate::error::{Error, Result};
use crate::geom::BeliefGrid;
use crate::linprog::Mode;
use crate::model::{Belief, Family, Game, GameFile, MomentGame, ValueModel};
use crate::moment::{build_tilde_simplex, one_dim_mean_classifier, quasiconvex_dichotomy};
use crate::solve::grid::md_over;
use crate::solve::{
    default_resolution, dual_probe, solve_bp, Candidates, solve_ct_max, solve_ct_min, solve_md_belief_grid, solve_md_outcome_with,
    solve_nd,
};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    #[default]
    Eq,
    Gt,
    Lt,
}

impl Relation {
    fn holds(&self, observed: f64, expect: f64, tol: f64) -> bool {
        match self {
            Relation::Eq => (observed - expect).abs() <= tol,
            Relation::Gt => observed > expect + tol,
            Relation::Lt => observed < expect - tol,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ValueProtocol {
    Bp,
    Md,
    MdOutcome,
    CtMax,
    CtMin,
    Nd,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "kebab-case")]
pub enum Check {
    /// A protocol value compared with a number.
    Value {
        protocol: ValueProtocol,
        prior: Vec<f64>,
        #[serde(default)]
        grid: Option<usize>,
        #[serde(default)]
        relation: Relation,
        expect: f64,
        tol: f64,
    },
    Trichotomy {
        prior: Vec<f64>,
        #[serde(default)]
        grid: Option<usize>,
        expect: String,
    },
    /// The constructed mediation plan gains over cheap talk exactly by the
    /// closed-form amount.
    ImprovementGain {
        prior: Vec<f64>,
        #[serde(default)]
        grid: Option<usize>,
        tol: f64,
    },
    /// The receiver is strictly better off under the constructed mediation
    /// plan than under the best cheap-talk plan.
    /// Whether the receiver gains from mediation over sender-preferred cheap
    /// talk. With a `support`, the mediation plan is the best honest plan on
    /// those beliefs; otherwise it is the constructed improving plan. With a
    /// `cheap_talk_support`, the cheap-talk plan is the one on those beliefs,
    /// which must reach the cheap-talk value; otherwise it is the solver's.
    ReceiverWelfare {
        prior: Vec<f64>,
        #[serde(default)]
        grid: Option<usize>,
        #[serde(default)]
        support: Option<Vec<Vec<f64>>>,
        #[serde(default)]
        cheap_talk_support: Option<Vec<Vec<f64>>>,
        #[serde(default = "yes")]
        expect: bool,
    },
    DualProbe {
        g: Vec<f64>,
        #[serde(default)]
        grid: Option<usize>,
        expect: f64,
        tol: f64,
    },
    /// Dual values at the given multipliers decrease strictly, in order.
    DualDecreasing {
        gs: Vec<Vec<f64>>,
        #[serde(default)]
        grid: Option<usize>,
    },
    FullDisclosure {
        prior: Vec<f64>,
        #[serde(default)]
        grid: Option<usize>,
        expect: bool,
    },
    MeanClass {
        prior: Vec<f64>,
        #[serde(default = "default_samples")]
        samples: usize,
        expect: String,
    },
    TildeLambda {
        state: usize,
        expect: f64,
        tol: f64,
    },
    Dichotomy {
        prior: Vec<f64>,
        #[serde(default)]
        grid: Option<usize>,
        expect: String,
        /// Every margin of the strict chain must exceed this.
        min_margin: f64,
    },
    /// Crossing weights of the salesman family grow with the reputation
    /// weights, listed in increasing order.
    TildeMonotone {
        rhos: Vec<Vec<f64>>,
    },
    Honesty {
        from: usize,
        to: usize,
        expect: f64,
        tol: f64,
    },
    Honest {
        expect: bool,
    },
    CheapTalkFeasible {
        expect: bool,
    },
    /// `E[1/μ | ω]` under the fixture plan.
    ConditionalMean {
        state: usize,
        expect: f64,
        tol: f64,
    },
}

fn yes() -> bool {
    true
}

fn default_samples() -> usize {
    2000
}

impl Check {
    pub fn id(&self) -> &'static str {
        match self {
            Check::Value { .. } => "value",
            Check::Trichotomy { .. } => "trichotomy",
            Check::ImprovementGain { .. } => "improvement-gain",
            Check::ReceiverWelfare { .. } => "receiver-welfare",
            Check::DualProbe { .. } => "dual-probe",
            Check::DualDecreasing { .. } => "dual-decreasing",
            Check::FullDisclosure { .. } => "full-disclosure",
            Check::MeanClass { .. } => "mean-class",
            Check::TildeLambda { .. } => "tilde-lambda",
            Check::Dichotomy { .. } => "dichotomy",
            Check::TildeMonotone { .. } => "tilde-monotone",
            Check::Honesty { .. } => "honesty",
            Check::Honest { .. } => "honest",
            Check::CheapTalkFeasible { .. } => "cheap-talk-feasible",
            Check::ConditionalMean { .. } => "conditional-mean",
        }
    }
}

/// Piecewise-linear part of the three-action example with a state-dependent
/// payoff.
fn trilemma_base(mu: f64) -> f64 {
    if mu <= 0.25 {
        4.0 * mu
    } else if mu <= 0.5 {
        -2.0 * mu + 1.5
    } else if mu <= 0.75 {
        2.0 * mu - 0.5
    } else {
        -4.0 * mu + 4.0
    }
}

/// `V(μ, ω) = G(μ) − ω/μ`, with `μ` the probability of state 1.
pub fn trilemma_payoff(belief: &Belief, state: usize) -> f64 {
    let mu = belief[1];
    trilemma_base(mu) - state as f64 / mu
}

struct Observed {
    passed: bool,
    value: Value,
    detail: Option<String>,
}

fn ok(passed: bool, value: Value) -> Observed {
    Observed { passed, value, detail: None }
}

fn grid_for(game: &Game, grid: Option<usize>) -> Result<BeliefGrid> {
    let n = game.num_states();
    BeliefGrid::new(n, grid.unwrap_or_else(|| default_resolution(n, game.as_finite().is_some())))
}

fn at_prior(game: &Game, prior: &[f64]) -> Result<(Game, Belief)> {
    let p = Belief::new(prior.to_vec())?;
    Ok((game.with_prior(&p)?, p))
}

fn moment_game(game: &Game) -> Result<&MomentGame> {
    game.as_moment().ok_or_else(|| Error::InvalidGame("check needs a moment game".into()))
}

pub(super) fn run(fixture: &Fixture, e: &Expectation) -> CheckOutcome {
    let result = evaluate(fixture, &e.check);
    let (passed, observed, detail) = match result {
        Ok(o) => (o.passed, o.value, o.detail),
        Err(err) => (false, Value::Null, Some(err.to_string())),
    };
    CheckOutcome { check: e.check.id().to_string(), claim: e.claim.clone(), source: e.source, passed, observed, detail }
}

fn evaluate(fixture: &Fixture, check: &Check) -> Result<Observed> {
    match check {
        Check::Honesty { .. } | Check::Honest { .. } | Check::CheapTalkFeasible { .. } | Check::ConditionalMean { .. } => {
            return state_dependent(fixture, check)
        }
        _ => {}
    }
    let game = fixture.game()?;
    match check {
        Check::Value { protocol, prior, grid, relation, expect, tol } => {
            let (g, p) = at_prior(&game, prior)?;
            let grid = grid_for(&g, *grid)?;
            let v = protocol_value(&g, &p, *protocol, &grid)?;
            Ok(ok(relation.holds(v, *expect, *tol), json!(v)))
        }
        Check::Trichotomy { prior, grid, expect } => {
            let (g, p) = at_prior(&game, prior)?;
            let grid = grid_for(&g, *grid)?;
            let label = match &g {
                Game::Finite(f) => classify_trichotomy(f, &p, &grid)?.label,
                Game::Moment(m) => Trichotomy::from_values(
                    solve_bp(m, &p, &grid)?.value,
                    solve_md_belief_grid(m, &p, &grid)?.value,
                    solve_ct_max(m, &p, &grid)?.value,
                ),
            };
            Ok(ok(label.label() == expect, json!(label.label())))
        }
        Check::ImprovementGain { prior, grid, tol } => {
            let (g, p) = at_prior(&game, prior)?;
            let grid = grid_for(&g, *grid)?;
            let cert = certificate(&g, &p, &grid)?;
            let gap = (cert.value_gain - cert.closed_form_gain).abs();
            Ok(ok(
                cert.value_gain > 0.0 && gap <= *tol,
                json!({ "gain": cert.value_gain, "closed_form": cert.closed_form_gain }),
            ))
        }
        Check::ReceiverWelfare { prior, grid, support, cheap_talk_support, expect } => {
            let (g, p) = at_prior(&game, prior)?;
            let grid = grid_for(&g, *grid)?;
            let ct = solve_ct_max(&g, &p, &grid)?;
            let cheap_plan = match cheap_talk_support {
                Some(points) => {
                    let report = md_over(&p, &Candidates::from_points(&g, beliefs(points)?), None)?;
                    let flat = report.plan.atoms.iter().all(|a| (g.interval(a.belief.coords()).1 - ct.value).abs() <= 1e-9);
                    if !flat {
                        return Ok(Observed {
                            passed: false,
                            value: json!(report.value),
                            detail: Some("cheap-talk support does not reach the cheap-talk value".into()),
                        });
                    }
                    report.plan
                }
                None => ct.plan.clone(),
            };
            let plan = match support {
                Some(points) => {
                    let report = md_over(&p, &Candidates::from_points(&g, beliefs(points)?), None)?;
                    if report.value <= ct.value {
                        return Ok(Observed {
                            passed: false,
                            value: json!({ "sender_mediation": report.value, "sender_cheap_talk": ct.value }),
                            detail: Some("support does not improve on cheap talk for the sender".into()),
                        });
                    }
                    report.plan
                }
                None => certificate(&g, &p, &grid)?.mixed_plan,
            };
            let md = receiver_value(&g, &plan)?;
            let cheap = receiver_value(&g, &cheap_plan)?;
            Ok(ok((md > cheap) == *expect, json!({ "mediation": md, "cheap_talk": cheap })))
        }
        Check::DualProbe { g, grid, expect, tol } => {
            let grid = grid_for(&game, *grid)?;
            let v = dual_probe(&game, game.prior(), g, &grid)?.value;
            Ok(ok((v - expect).abs() <= *tol, json!(v)))
        }
        Check::DualDecreasing { gs, grid } => {
            let grid = grid_for(&game, *grid)?;
            let values = gs
                .iter()
                .map(|g| dual_probe(&game, game.prior(), g, &grid).map(|d| d.value))
                .collect::<Result<Vec<f64>>>()?;
            Ok(ok(values.windows(2).all(|w| w[1] < w[0]), json!(values)))
        }
        Check::FullDisclosure { prior, grid, expect } => {
            let (g, p) = at_prior(&game, prior)?;
            let grid = grid_for(&g, *grid)?;
            let r = full_disclosure_optimal(&g, &p, &grid)?;
            Ok(ok(r.optimal == *expect, json!(r.optimal)))
        }
        Check::MeanClass { prior, samples, expect } => {
            let (g, p) = at_prior(&game, prior)?;
            let r = one_dim_mean_classifier(moment_game(&g)?, &p, *samples)?;
            let label = serde_json::to_value(r.class).unwrap_or(Value::Null);
            Ok(ok(label.as_str() == Some(expect.as_str()), label))
        }
        Check::TildeLambda { state, expect, tol } => {
            let t = build_tilde_simplex(moment_game(&game)?)?;
            let l = t.lambdas.get(*state).copied().ok_or_else(|| Error::DimensionMismatch("state index".into()))?;
            Ok(ok((l - expect).abs() <= *tol, json!(l)))
        }
        Check::Dichotomy { prior, grid, expect, min_margin } => {
            let (g, p) = at_prior(&game, prior)?;
            let grid = grid_for(&g, *grid)?;
            let r = quasiconvex_dichotomy(moment_game(&g)?, &p, &grid)?;
            let label = serde_json::to_value(r.case).unwrap_or(Value::Null);
            let strict = r.margins.iter().all(|m| *m > *min_margin);
            Ok(ok(label.as_str() == Some(expect.as_str()) && strict, json!({ "case": label, "margins": r.margins })))
        }
        Check::TildeMonotone { rhos } => {
            let value = fixture.game.clone().ok_or_else(|| Error::InvalidGame("missing game".into()))?;
            let (y, power) = match GameFile::from_value(&value)? {
                GameFile::Family { family: Family::Salesman { y, power, .. }, .. } => (y, power),
                _ => return Err(Error::InvalidGame("check needs a salesman game".into())),
            };
            let mut rows = Vec::new();
            for rho in rhos {
                let family = Family::Salesman { y: y.clone(), rho: rho.clone(), power };
                let file = GameFile::Family { family, prior: None };
                let built = file.build()?;
                rows.push(build_tilde_simplex(moment_game(&built)?)?.lambdas);
            }
            let increasing = rows.windows(2).all(|w| {
                w[0].iter().zip(&w[1]).enumerate().all(|(s, (a, b))| s == 0 || b > a)
            });
            Ok(ok(increasing, json!(rows)))
        }
        _ => unreachable!("state-dependent checks handled above"),
    }
}

fn protocol_value(g: &Game, p: &Belief, protocol: ValueProtocol, grid: &BeliefGrid) -> Result<f64> {
    Ok(match protocol {
        ValueProtocol::Bp => solve_bp(g, p, grid)?.value,
        ValueProtocol::Md => solve_md_belief_grid(g, p, grid)?.value,
        ValueProtocol::MdOutcome => {
            let f = g.as_finite().ok_or_else(|| Error::InvalidGame("outcome program needs a finite game".into()))?;
            solve_md_outcome_with(f, p, Mode::Float)?.0.value
        }
        ValueProtocol::CtMax => solve_ct_max(g, p, grid)?.value,
        ValueProtocol::CtMin => solve_ct_min(g, p, grid)?.value,
        ValueProtocol::Nd => solve_nd(g, p).value,
    })
}

fn beliefs(points: &[Vec<f64>]) -> Result<Vec<Belief>> {
    points.iter().map(|b| Belief::new(b.clone())).collect()
}

fn certificate(
    g: &Game,
    p: &Belief,
    grid: &BeliefGrid,
) -> Result<crate::diagnose::ImprovementCertificate> {
    let s = solve_ct_max(g, p, grid)?.value;
    let imp = is_improvable(g, p, s, grid, true)?;
    let witness = imp
        .witness
        .ok_or_else(|| Error::ConstructionFailed(format!("cheap talk is not improvable at level {s}")))?;
    construct_improving_plan(g, p, s, &witness, grid)
}

fn state_dependent(fixture: &Fixture, check: &Check) -> Result<Observed> {
    let plan = fixture.plan.as_ref().ok_or_else(|| Error::InvalidGame("fixture has no plan".into()))?;
    let p = Belief::new(plan.barycenter())?;
    let report = check_honesty_state_dependent(trilemma_payoff, &p, plan);
    Ok(match check {
        Check::Honesty { from, to, expect, tol } => {
            let r = report.residuals[*from][*to];
            ok((r - expect).abs() <= *tol, json!(r))
        }
        Check::Honest { expect } => ok(report.honest == *expect, json!(report.honest)),
        Check::CheapTalkFeasible { expect } => {
            ok(report.cheap_talk_feasible == *expect, json!(report.cheap_talk_feasible))
        }
        Check::ConditionalMean { state, expect, tol } => {
            let m = plan.conditional_mean(&p, *state, |b| 1.0 / b[1]);
            ok((m - expect).abs() <= *tol, json!(m))
        }
        _ => unreachable!("only state-dependent checks reach here"),
    })
}
