//! Built-in games.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::belief::Belief;
use super::finite::FiniteGame;
use super::moment::{MomentFn, MomentGame};
use crate::error::{Error, Result};

pub const ROTATED_S_DELTA: f64 = 209.0 / 409.0;

fn default_delta() -> f64 {
    ROTATED_S_DELTA
}

fn default_power() -> u32 {
    2
}

/// Family tag plus parameters, in the shape used by game files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "kebab-case")]
pub enum Family {
    /// Reputation-concerned seller: `(1 − δ)G(μ) − δμ` with `G` the Beta(2,2) CDF.
    RotatedS {
        #[serde(default = "default_delta")]
        delta: f64,
    },
    ThinkTank { c: f64, values: Vec<f64> },
    /// `sin(3πμ − π)`
    Sine {},
    /// `4μ(μ − 1/2) + 1/4`
    Quadratic {},
    /// `⟨y, x⟩^power − ⟨ρ, x⟩` on the cube `{0,1}^k`.
    Salesman {
        y: Vec<f64>,
        rho: Vec<f64>,
        #[serde(default = "default_power")]
        power: u32,
    },
    /// `γ x₁² + x₁ − γ x₂` with moments `(E ω, E ω²)`.
    MeanVariance { gamma: f64, states: Vec<f64> },
    Custom { label: String },
}

pub fn beta22_cdf(x: f64) -> f64 {
    3.0 * x * x - 2.0 * x * x * x
}

fn binary_prior(p: f64) -> Result<Belief> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidGame(format!("binary prior {p} must lie in (0, 1)")));
    }
    Belief::binary(p)
}

fn binary_embedding() -> Vec<Vec<f64>> {
    vec![vec![0.0], vec![1.0]]
}

pub fn rotated_s(delta: f64, p: f64) -> Result<MomentGame> {
    rotated_s_with_prior(delta, binary_prior(p)?)
}

fn rotated_s_with_prior(delta: f64, prior: Belief) -> Result<MomentGame> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::InvalidGame(format!("delta {delta} outside [0, 1]")));
    }
    let sender: MomentFn = Arc::new(move |x: &[f64]| (1.0 - delta) * beta22_cdf(x[0]) - delta * x[0]);
    // Buyer's value μG(μ) + ∫_μ^1 ε dG(ε) in closed form.
    let receiver: MomentFn = Arc::new(|x: &[f64]| {
        let m = x[0];
        m.powi(3) - 0.5 * m.powi(4) + 0.5
    });
    MomentGame::new(binary_embedding(), prior, sender, Some(receiver), Family::RotatedS { delta })
}

pub fn sine(p: f64) -> Result<MomentGame> {
    sine_with_prior(binary_prior(p)?)
}

fn sine_with_prior(prior: Belief) -> Result<MomentGame> {
    let sender: MomentFn = Arc::new(|x: &[f64]| (3.0 * PI * x[0] - PI).sin());
    MomentGame::new(binary_embedding(), prior, sender, None, Family::Sine {})
}

pub fn quadratic(p: f64) -> Result<MomentGame> {
    quadratic_with_prior(binary_prior(p)?)
}

fn quadratic_with_prior(prior: Belief) -> Result<MomentGame> {
    let sender: MomentFn = Arc::new(|x: &[f64]| 4.0 * x[0] * (x[0] - 0.5) + 0.25);
    MomentGame::new(binary_embedding(), prior, sender, None, Family::Quadratic {})
}

/// States are the points of `{0,1}^k` in lexicographic order.
pub fn salesman(y: &[f64], rho: &[f64], power: u32, prior: Option<Belief>) -> Result<MomentGame> {
    let k = y.len();
    if k == 0 || rho.len() != k {
        return Err(Error::InvalidGame("salesman needs y and rho of equal positive length".into()));
    }
    if power < 1 {
        return Err(Error::InvalidGame("salesman power must be at least 1".into()));
    }
    let n = 1usize << k;
    let embedding: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..k).map(|j| ((i >> (k - 1 - j)) & 1) as f64).collect())
        .collect();
    let prior = prior.unwrap_or_else(|| Belief::uniform(n));
    let (yc, rc) = (y.to_vec(), rho.to_vec());
    let sender: MomentFn = Arc::new(move |x: &[f64]| {
        let quality: f64 = yc.iter().zip(x).map(|(a, b)| a * b).sum();
        let reputation: f64 = rc.iter().zip(x).map(|(a, b)| a * b).sum();
        quality.powi(power as i32) - reputation
    });
    MomentGame::new(
        embedding,
        prior,
        sender,
        None,
        Family::Salesman { y: y.to_vec(), rho: rho.to_vec(), power },
    )
}

pub fn mean_variance(gamma: f64, states: &[f64], prior: Option<Belief>) -> Result<MomentGame> {
    let embedding: Vec<Vec<f64>> = states.iter().map(|&w| vec![w, w * w]).collect();
    let prior = prior.unwrap_or_else(|| Belief::uniform(states.len()));
    let sender: MomentFn = Arc::new(move |x: &[f64]| gamma * x[0] * x[0] + x[0] - gamma * x[1]);
    MomentGame::new(
        embedding,
        prior,
        sender,
        None,
        Family::MeanVariance { gamma, states: states.to_vec() },
    )
}

/// Lawmaker and think tank: state `ω_i` favours action `a_i`, `a_0` is the
/// status quo, and acting on the wrong state costs `c`.
pub fn think_tank(c: f64, values: &[f64], prior: Option<Belief>) -> Result<FiniteGame> {
    if values.len() < 3 {
        return Err(Error::InvalidGame("think tank needs a status-quo value and at least two policies".into()));
    }
    if !(c > 0.0) {
        return Err(Error::InvalidGame(format!("cost {c} must be positive")));
    }
    let n = values.len() - 1;
    let m = values.len();
    let receiver: Vec<Vec<f64>> = (1..=n)
        .map(|i| {
            (0..m)
                .map(|j| if j == 0 { 0.0 } else if j == i { 1.0 } else { -c })
                .collect()
        })
        .collect();
    let prior = prior.unwrap_or_else(|| Belief::uniform(n));
    FiniteGame::new(
        (1..=n).map(|i| format!("w{i}")).collect(),
        (0..m).map(|j| format!("a{j}")).collect(),
        prior.into_inner(),
        values.to_vec(),
        receiver,
    )
}

/// Either kind of game produced from a family tag.
pub enum Built {
    Finite(FiniteGame),
    Moment(MomentGame),
}

pub fn build(family: &Family, prior: Option<Belief>) -> Result<Built> {
    let binary = |prior: Option<Belief>| -> Result<Belief> {
        let prior = prior.unwrap_or_else(|| Belief::uniform(2));
        if prior.dim() != 2 {
            return Err(Error::InvalidGame("binary family needs a two-entry prior".into()));
        }
        Ok(prior)
    };
    Ok(match family {
        Family::RotatedS { delta } => Built::Moment(rotated_s_with_prior(*delta, binary(prior)?)?),
        Family::Sine {} => Built::Moment(sine_with_prior(binary(prior)?)?),
        Family::Quadratic {} => Built::Moment(quadratic_with_prior(binary(prior)?)?),
        Family::Salesman { y, rho, power } => Built::Moment(salesman(y, rho, *power, prior)?),
        Family::MeanVariance { gamma, states } => Built::Moment(mean_variance(*gamma, states, prior)?),
        Family::ThinkTank { c, values } => Built::Finite(think_tank(*c, values, prior)?),
        Family::Custom { label } => {
            return Err(Error::InvalidGame(format!("custom family `{label}` cannot be built from a file")))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotated_s_buyer_value_matches_quadrature() {
        let game = rotated_s(ROTATED_S_DELTA, 0.3).unwrap();
        for &m in &[0.0, 0.2, 0.55, 0.75, 1.0] {
            let steps = 20_000;
            let h = (1.0 - m) / steps as f64;
            let mut integral = 0.0;
            for i in 0..steps {
                let e = m + (i as f64 + 0.5) * h;
                integral += e * 6.0 * e * (1.0 - e) * h;
            }
            let direct = m * beta22_cdf(m) + integral;
            let closed = game.receiver_value_at_moment(&[m]).unwrap();
            assert!((direct - closed).abs() < 1e-8, "m={m}: {direct} vs {closed}");
        }
    }

    #[test]
    fn salesman_states_enumerate_cube() {
        let game = salesman(&[0.5, 0.5], &[0.1, 0.1], 2, None).unwrap();
        assert_eq!(
            game.embedding(),
            &[vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0], vec![1.0, 1.0]]
        );
    }

    #[test]
    fn family_round_trips_through_json() {
        let f = Family::MeanVariance { gamma: 4.0, states: vec![0.0, 0.5, 1.0] };
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(serde_json::from_str::<Family>(&s).unwrap(), f);
        let parsed: Family = serde_json::from_str(r#"{"family":"rotated-s","params":{}}"#).unwrap();
        assert_eq!(parsed, Family::RotatedS { delta: ROTATED_S_DELTA });
    }
}
