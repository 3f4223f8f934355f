use std::fs;
use std::path::Path;

use medsolve::geom::BeliefGrid;
use medsolve::model::{parse_game, parse_plan, Belief, BeliefPlan, Game};
use medsolve::solve::default_resolution;

use crate::failure::Failure;

pub fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

pub fn load_game(path: &Path) -> Result<Game, Failure> {
    Ok(parse_game(&read(path)?)?)
}

pub fn load_plan(path: &Path) -> Result<BeliefPlan, Failure> {
    Ok(parse_plan(&read(path)?)?)
}

/// Comma-separated probabilities. A binary game also accepts a single number,
/// read as the probability of the second state.
pub fn parse_prior(text: &str, states: usize) -> Result<Belief, Failure> {
    let values = text
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|e| Failure::Input(format!("prior entry `{s}`: {e}"))))
        .collect::<Result<Vec<f64>, Failure>>()?;
    let coords = match values.as_slice() {
        [q] if states == 2 => vec![1.0 - q, *q],
        _ => values,
    };
    if coords.len() != states {
        return Err(Failure::Input(format!("prior has {} entries for {states} states", coords.len())));
    }
    Ok(Belief::new(coords)?)
}

/// The game re-priored at `--prior` when given.
pub fn game_at(game: Game, prior: Option<&str>) -> Result<Game, Failure> {
    match prior {
        Some(text) => {
            let p = parse_prior(text, game.num_states())?;
            Ok(game.with_prior(&p)?)
        }
        None => Ok(game),
    }
}

pub fn grid_for(game: &Game, resolution: Option<usize>) -> Result<BeliefGrid, Failure> {
    let n = game.num_states();
    let k = resolution.unwrap_or_else(|| default_resolution(n, game.as_finite().is_some()));
    Ok(BeliefGrid::new(n, k)?)
}
