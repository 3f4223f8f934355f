use nalgebra::DMatrix;

use super::scalar::Scalar;
use crate::error::{Error, Result};

pub(crate) struct Tolerances {
    pub reduced_cost: f64,
    pub pivot: f64,
    pub feasibility: f64,
    pub ratio_tie: f64,
}

pub(crate) const FLOAT_TOLERANCES: Tolerances = Tolerances {
    reduced_cost: 1e-9,
    pivot: 1e-11,
    feasibility: 1e-9,
    ratio_tie: 1e-12,
};

const BREAKDOWN_PIVOT: f64 = 1e-13;

/// Float tableaus are rebuilt from the original rows after this many pivots.
const REINVERT_EVERY: usize = 32;

/// Consecutive degenerate pivots before switching to Bland's rule.
const DEGENERATE_RUN: usize = 20;

pub(crate) enum RawOutcome {
    /// Standard-form primal values and row multipliers of the minimisation.
    Optimal { x: Vec<f64>, y: Vec<f64> },
    /// Phase-one multipliers: `yᵀA ≤ 0` on every column and `yᵀb > 0`.
    Infeasible { farkas: Vec<f64> },
    Unbounded,
}

struct Tableau<S> {
    rows: usize,
    structural: usize,
    width: usize,
    cells: Vec<S>,
    /// The starting tableau, kept for refactorization.
    original: Vec<f64>,
    reduced: Vec<S>,
    basis: Vec<usize>,
    dead: Vec<bool>,
}

impl<S: Scalar> Tableau<S> {
    fn at(&self, r: usize, c: usize) -> &S {
        &self.cells[r * self.width + c]
    }

    fn rhs_col(&self) -> usize {
        self.width - 1
    }

    fn pivot(&mut self, r: usize, c: usize) -> Result<()> {
        let w = self.width;
        let p = self.at(r, c).clone();
        if !S::EXACT && p.to_f64().abs() < BREAKDOWN_PIVOT {
            return Err(Error::NumericalBreakdown(format!(
                "pivot magnitude {:e} in row {r}",
                p.to_f64()
            )));
        }
        let inv = S::one().div(&p);
        for j in 0..w {
            let v = self.cells[r * w + j].mul(&inv);
            self.cells[r * w + j] = v;
        }
        self.cells[r * w + c] = S::one();
        let pivot_row: Vec<S> = self.cells[r * w..(r + 1) * w].to_vec();
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let f = self.cells[i * w + c].clone();
            if f.is_zero() {
                continue;
            }
            let row = &mut self.cells[i * w..(i + 1) * w];
            for (cell, pv) in row.iter_mut().zip(&pivot_row) {
                cell.sub_mul(&f, pv);
            }
            row[c] = S::zero();
        }
        let f = self.reduced[c].clone();
        if !f.is_zero() {
            for (cell, pv) in self.reduced.iter_mut().zip(&pivot_row) {
                cell.sub_mul(&f, pv);
            }
            self.reduced[c] = S::zero();
        }
        self.basis[r] = c;
        Ok(())
    }

    fn set_costs(&mut self, cost: &[S]) {
        let w = self.width;
        let mut reduced: Vec<S> = (0..w)
            .map(|j| if j < cost.len() { cost[j].clone() } else { S::zero() })
            .collect();
        for r in 0..self.rows {
            let cb = cost_of(cost, self.basis[r]);
            if cb.is_zero() {
                continue;
            }
            for (j, cell) in reduced.iter_mut().enumerate() {
                cell.sub_mul(&cb, &self.cells[r * w + j]);
            }
        }
        self.reduced = reduced;
    }

    fn multipliers(&self, cost: &[S]) -> Vec<f64> {
        (0..self.rows)
            .map(|i| {
                let mut acc = S::zero();
                for r in 0..self.rows {
                    let cb = cost_of(cost, self.basis[r]);
                    if !cb.is_zero() {
                        acc = acc.add(&cb.mul(self.at(r, self.structural + i)));
                    }
                }
                acc.to_f64()
            })
            .collect()
    }

    /// Recomputes every row as `B⁻¹` times the original row, discarding the
    /// round-off accumulated by elimination.
    fn reinvert(&mut self, cost: &[S]) -> Result<()> {
        let (m, w) = (self.rows, self.width);
        let basis = DMatrix::from_fn(m, m, |i, k| self.original[i * w + self.basis[k]]);
        let inv = basis
            .lu()
            .try_inverse()
            .ok_or_else(|| Error::NumericalBreakdown("singular basis on refactorization".into()))?;
        let original = DMatrix::from_row_slice(m, w, &self.original);
        let rows = inv * original;
        for i in 0..m {
            for j in 0..w {
                self.cells[i * w + j] = S::from_f64(rows[(i, j)]);
            }
            self.cells[i * w + self.basis[i]] = S::one();
        }
        self.set_costs(cost);
        Ok(())
    }

    /// Most negative reduced cost enters; after a run of degenerate pivots
    /// the rule falls back to Bland (lowest-index improving column) until an
    /// improving pivot. Ties in the ratio test go to the lowest basic index.
    fn iterate(&mut self, cost: &[S], column_limit: usize, tol: &Tolerances, max_iter: usize) -> Result<bool> {
        let rhs = self.rhs_col();
        let mut since_reinvert = 0;
        let mut degenerate_run = 0;
        for _ in 0..max_iter {
            if !S::EXACT && since_reinvert >= REINVERT_EVERY {
                self.reinvert(cost)?;
                since_reinvert = 0;
            }
            let improving = |j: &usize| self.reduced[*j].lt_neg_tol(tol.reduced_cost);
            let entering = if degenerate_run >= DEGENERATE_RUN {
                (0..column_limit).find(improving)
            } else {
                (0..column_limit)
                    .filter(improving)
                    .min_by(|&a, &b| self.reduced[a].partial_cmp(&self.reduced[b]).unwrap_or(std::cmp::Ordering::Equal))
            };
            let Some(c) = entering else {
                if !S::EXACT && since_reinvert > 0 {
                    self.reinvert(cost)?;
                    since_reinvert = 0;
                    continue;
                }
                return Ok(true);
            };
            let mut best: Option<(usize, S)> = None;
            for i in 0..self.rows {
                if self.dead[i] || !self.at(i, c).gt_tol(tol.pivot) {
                    continue;
                }
                let mut b = self.at(i, rhs).clone();
                if b < S::zero() {
                    b = S::zero();
                }
                let ratio = b.div(self.at(i, c));
                best = match best {
                    None => Some((i, ratio)),
                    Some((bi, br)) => {
                        let diff = ratio.sub(&br);
                        let tie_tol = tol.ratio_tie * (1.0 + br.to_f64().abs());
                        if diff.lt_neg_tol(tie_tol) {
                            Some((i, ratio))
                        } else if !diff.gt_tol(tie_tol) && self.basis[i] < self.basis[bi] {
                            Some((i, ratio))
                        } else {
                            Some((bi, br))
                        }
                    }
                };
            }
            match best {
                None if !S::EXACT && since_reinvert > 0 => {
                    self.reinvert(cost)?;
                    since_reinvert = 0;
                }
                None => return Ok(false),
                Some((r, ratio)) => {
                    if ratio.gt_tol(tol.pivot) {
                        degenerate_run = 0;
                    } else {
                        degenerate_run += 1;
                    }
                    self.pivot(r, c)?;
                    since_reinvert += 1;
                }
            }
        }
        Err(Error::NumericalBreakdown("iteration limit reached".into()))
    }
}

fn cost_of<S: Scalar>(cost: &[S], j: usize) -> S {
    if j < cost.len() {
        cost[j].clone()
    } else {
        S::zero()
    }
}

/// Two-phase primal simplex on `min cᵀx, Ax = b, x ≥ 0` with `b ≥ 0`.
pub(crate) fn two_phase<S: Scalar>(
    a: &[Vec<f64>],
    b: &[f64],
    cost: &[f64],
    tol: &Tolerances,
) -> Result<RawOutcome> {
    let m = a.len();
    let n = cost.len();
    let width = n + m + 1;
    let mut cells = vec![S::zero(); m * width];
    for i in 0..m {
        for (j, &v) in a[i].iter().enumerate() {
            if v != 0.0 {
                cells[i * width + j] = S::from_f64(v);
            }
        }
        cells[i * width + n + i] = S::one();
        cells[i * width + width - 1] = S::from_f64(b[i]);
    }
    let mut tab = Tableau {
        rows: m,
        structural: n,
        width,
        original: Vec::new(),
        cells,
        reduced: Vec::new(),
        basis: (n..n + m).collect(),
        dead: vec![false; m],
    };
    if !S::EXACT {
        tab.original = tab.cells.iter().map(Scalar::to_f64).collect();
    }
    let max_iter = 50 * (n + m) + 10_000;

    let phase_one: Vec<S> = (0..n + m)
        .map(|j| if j < n { S::zero() } else { S::one() })
        .collect();
    tab.set_costs(&phase_one);
    tab.iterate(&phase_one, n + m, tol, max_iter)?;
    let infeasibility = tab.reduced[width - 1].neg().to_f64();
    let scale = 1.0 + b.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    if infeasibility > tol.feasibility * scale {
        return Ok(RawOutcome::Infeasible { farkas: tab.multipliers(&phase_one) });
    }

    for r in 0..m {
        if tab.basis[r] < n {
            continue;
        }
        let mut choice: Option<(usize, f64)> = None;
        for j in 0..n {
            let mag = tab.at(r, j).abs();
            if mag.gt_tol(tol.pivot) {
                let magf = mag.to_f64();
                if choice.map_or(true, |(_, best)| magf > best) {
                    choice = Some((j, magf));
                }
            }
        }
        match choice {
            Some((j, _)) => tab.pivot(r, j)?,
            None => tab.dead[r] = true,
        }
    }

    let phase_two: Vec<S> = cost.iter().map(|&c| S::from_f64(c)).collect();
    tab.set_costs(&phase_two);
    if !tab.iterate(&phase_two, n, tol, max_iter)? {
        return Ok(RawOutcome::Unbounded);
    }
    let mut x = vec![0.0; n];
    for r in 0..m {
        let j = tab.basis[r];
        if j < n {
            x[j] = tab.at(r, width - 1).to_f64().max(0.0);
        }
    }
    let y = tab.multipliers(&phase_two);
    Ok(RawOutcome::Optimal { x, y })
}
