//! Frozen worked examples with their expected outcomes. Each fixture is a
//! JSON file holding a game description and a list of checks; every check
//! names the claim it guards and where its expected value comes from.

mod checks;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::model::{BeliefPlan, Game, GameFile};

pub use checks::{trilemma_payoff, Check, Relation};

const SOURCES: &[(&str, &str)] = &[
    ("rotated-s", include_str!("../../data/fixtures/rotated-s.json")),
    ("think-tank-c2", include_str!("../../data/fixtures/think-tank-c2.json")),
    ("quadratic-dual", include_str!("../../data/fixtures/quadratic-dual.json")),
    ("sine-informativeness", include_str!("../../data/fixtures/sine-informativeness.json")),
    ("mean-variance-g4", include_str!("../../data/fixtures/mean-variance-g4.json")),
    ("salesman-2x2", include_str!("../../data/fixtures/salesman-2x2.json")),
    ("trilemma-state-dependent", include_str!("../../data/fixtures/trilemma-state-dependent.json")),
];

/// Where an expected value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    /// Stated in the published analysis.
    Published,
    /// Follows directly from the definitions.
    Trivial,
    /// Computed once by an independent oracle and frozen.
    Derived,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Expectation {
    #[serde(flatten)]
    pub check: Check,
    pub source: Source,
    pub claim: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Fixture {
    pub name: String,
    /// Game description in the game-file format; absent for fixtures with a
    /// built-in state-dependent payoff.
    #[serde(default)]
    pub game: Option<Value>,
    #[serde(default)]
    pub plan: Option<BeliefPlan>,
    pub expected: Vec<Expectation>,
}

impl Fixture {
    pub fn game(&self) -> Result<Game> {
        let value = self
            .game
            .as_ref()
            .ok_or_else(|| Error::InvalidGame(format!("fixture `{}` has no game", self.name)))?;
        GameFile::from_value(value)?.build()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub check: String,
    pub claim: String,
    pub source: Source,
    pub passed: bool,
    pub observed: Value,
    pub detail: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FixtureReport {
    pub name: String,
    pub passed: bool,
    pub checks: Vec<CheckOutcome>,
}

impl FixtureReport {
    pub fn failures(&self) -> impl Iterator<Item = &CheckOutcome> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

pub fn fixture_names() -> Vec<&'static str> {
    SOURCES.iter().map(|(n, _)| *n).collect()
}

pub fn load_fixture(name: &str) -> Result<Fixture> {
    let (_, text) = SOURCES
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| Error::UnknownFixture(name.to_string()))?;
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("fixture {name}: {e}")))
}

pub fn run_fixture(name: &str) -> Result<FixtureReport> {
    let fixture = load_fixture(name)?;
    let checks: Vec<CheckOutcome> = fixture.expected.iter().map(|e| checks::run(&fixture, e)).collect();
    Ok(FixtureReport { name: fixture.name.clone(), passed: checks.iter().all(|c| c.passed), checks })
}

pub fn run_all() -> Vec<FixtureReport> {
    fixture_names().into_iter().filter_map(|n| run_fixture(n).ok()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_fixtures_parse() {
        for name in fixture_names() {
            let f = load_fixture(name).unwrap();
            assert_eq!(f.name, name);
            assert!(!f.expected.is_empty());
        }
    }

    #[test]
    fn unknown_fixture() {
        assert!(matches!(run_fixture("nope"), Err(Error::UnknownFixture(_))));
    }

    #[test]
    fn every_fixture_passes() {
        for name in fixture_names() {
            let r = run_fixture(name).unwrap();
            let bad: Vec<_> = r.failures().collect();
            assert!(bad.is_empty(), "{name}: {bad:#?}");
        }
    }
}
