use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::belief::Belief;
use super::families::{self, Built, Family};
use super::finite::FiniteGame;
use super::plan::BeliefPlan;
use super::Game;
use crate::error::{Error, Result};

/// On-disk game description: either explicit utility tables or a built-in
/// family with parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GameFile {
    Finite {
        states: Vec<String>,
        actions: Vec<String>,
        prior: Vec<f64>,
        sender_utility: Vec<f64>,
        receiver_utility: Vec<Vec<f64>>,
    },
    Family {
        #[serde(flatten)]
        family: Family,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        prior: Option<Vec<f64>>,
    },
}

impl GameFile {
    pub fn from_value(value: &Value) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::Parse("game description must be a JSON object".into()))?;
        if let Some(tag) = obj.get("family") {
            let params = obj.get("params").cloned().unwrap_or_else(|| Value::Object(Default::default()));
            let family: Family = serde_json::from_value(serde_json::json!({ "family": tag, "params": params }))
                .map_err(|e| Error::Parse(format!("family: {e}")))?;
            let prior = match obj.get("prior") {
                None | Some(Value::Null) => None,
                Some(v) => Some(
                    serde_json::from_value::<Vec<f64>>(v.clone()).map_err(|e| Error::Parse(format!("prior: {e}")))?,
                ),
            };
            return Ok(GameFile::Family { family, prior });
        }
        #[derive(Deserialize)]
        struct Tables {
            states: Vec<String>,
            actions: Vec<String>,
            prior: Vec<f64>,
            sender_utility: Vec<f64>,
            receiver_utility: Vec<Vec<f64>>,
        }
        let t: Tables = serde_json::from_value(value.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        Ok(GameFile::Finite {
            states: t.states,
            actions: t.actions,
            prior: t.prior,
            sender_utility: t.sender_utility,
            receiver_utility: t.receiver_utility,
        })
    }

    pub fn build(&self) -> Result<Game> {
        match self {
            GameFile::Finite { states, actions, prior, sender_utility, receiver_utility } => Ok(Game::Finite(
                FiniteGame::new(
                    states.clone(),
                    actions.clone(),
                    prior.clone(),
                    sender_utility.clone(),
                    receiver_utility.clone(),
                )?,
            )),
            GameFile::Family { family, prior } => {
                let prior = match prior {
                    Some(p) => Some(Belief::new(p.clone()).map_err(|e| Error::InvalidGame(e.to_string()))?),
                    None => None,
                };
                Ok(match families::build(family, prior)? {
                    Built::Finite(g) => Game::Finite(g),
                    Built::Moment(g) => Game::Moment(g),
                })
            }
        }
    }
}

pub fn parse_game(json: &str) -> Result<Game> {
    let value: Value = serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))?;
    GameFile::from_value(&value)?.build()
}

pub fn parse_plan(json: &str) -> Result<BeliefPlan> {
    serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))
}
