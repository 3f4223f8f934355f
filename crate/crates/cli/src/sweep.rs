use std::path::Path;

use rayon::prelude::*;

use medsolve::geom::BeliefGrid;
use medsolve::linprog::Mode;
use medsolve::model::{Belief, Game};

use crate::commands::{protocol_report, trichotomy};
use crate::failure::Failure;
use crate::input::{grid_for, load_game};
use crate::output::number;
use crate::ProtocolArg;

struct Row {
    prior: Belief,
    values: Vec<f64>,
    label: &'static str,
}

/// Interior points of the prior grid in lexicographic order.
fn priors(states: usize, resolution: usize) -> Result<Vec<Belief>, Failure> {
    if resolution < 2 {
        return Err(Failure::Input("--prior-grid must be at least 2".into()));
    }
    let mut points: Vec<Belief> = BeliefGrid::new(states, resolution)?
        .points()
        .iter()
        .filter(|b| b.coords().iter().all(|x| *x > 0.0))
        .cloned()
        .collect();
    points.sort_by(|a, b| {
        a.coords().iter().zip(b.coords()).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(points)
}

fn row(game: &Game, p: &Belief, protocols: &[ProtocolArg], grid: &BeliefGrid) -> Result<Row, Failure> {
    let game = game.with_prior(p)?;
    let (bp, md, ct, label) = trichotomy(&game, grid)?;
    let values = protocols
        .iter()
        .map(|&proto| match proto {
            ProtocolArg::Bp => Ok(bp),
            ProtocolArg::Md => Ok(md),
            ProtocolArg::CtMax => Ok(ct),
            other => protocol_report(&game, other, grid, None, Mode::Float).map(|r| r.value),
        })
        .collect::<Result<Vec<f64>, Failure>>()?;
    Ok(Row { prior: p.clone(), values, label: label.label() })
}

pub fn run(
    path: &Path,
    protocols: &[ProtocolArg],
    prior_grid: usize,
    grid: Option<usize>,
    out: &Path,
    jobs: Option<usize>,
) -> Result<i32, Failure> {
    let game = load_game(path)?;
    let n = game.num_states();
    let points = priors(n, prior_grid)?;
    let grid = grid_for(&game, grid)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| Failure::Input(format!("--jobs: {e}")))?;
    let rows: Vec<Row> =
        pool.install(|| points.par_iter().map(|p| row(&game, p, protocols, &grid)).collect::<Result<_, _>>())?;

    let mut writer = csv::Writer::from_path(out).map_err(|e| Failure::Input(format!("{}: {e}", out.display())))?;
    let header: Vec<String> = (0..n)
        .map(|i| format!("p{i}"))
        .chain(protocols.iter().map(|p| p.name().to_string()))
        .chain(std::iter::once("trichotomy".to_string()))
        .collect();
    let write_err = |e: csv::Error| Failure::Input(format!("{}: {e}", out.display()));
    writer.write_record(&header).map_err(write_err)?;
    for r in &rows {
        let record: Vec<String> = r
            .prior
            .coords()
            .iter()
            .chain(&r.values)
            .map(|x| number(*x))
            .chain(std::iter::once(r.label.to_string()))
            .collect();
        writer.write_record(&record).map_err(write_err)?;
    }
    writer.flush()?;
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn priors_are_interior_and_sorted() {
        let pts = priors(3, 4).unwrap();
        assert_eq!(pts.len(), 3);
        assert!(pts.windows(2).all(|w| w[0].coords() <= w[1].coords()));
        assert!(priors(2, 1).is_err());
    }
}
