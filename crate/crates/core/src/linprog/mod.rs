//! Dense two-phase primal simplex.
//!
//! Problems are stated with arbitrary row relations and variable bounds, then
//! rewritten into equality standard form with non-negative variables. Rows are
//! equilibrated before pivoting. The same tableau code runs over `f64` or over
//! exact big rationals.

mod scalar;
mod simplex;

use num::BigRational;
use serde::Serialize;

use crate::error::{Error, Result};
use simplex::{two_phase, RawOutcome, Tolerances, FLOAT_TOLERANCES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    Eq,
    Le,
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Float,
    Rational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Tolerance on the primal residual of the equilibrated rows.
pub const PRIMAL_RESIDUAL_TOL: f64 = 1e-8;

/// Entries at or below this are not counted in `basis_size`.
pub const SUPPORT_TOL: f64 = 1e-12;

/// Rows whose coefficients and right-hand side are all this small are
/// treated as empty when equilibrating.
const ROW_NOISE: f64 = 1e-14;

#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub sense: Sense,
    pub objective: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
    pub relations: Vec<Relation>,
    pub rhs: Vec<f64>,
    pub bounds: Vec<(f64, f64)>,
}

impl LinearProgram {
    /// Every variable starts with bounds `[0, ∞)`.
    pub fn new(sense: Sense, objective: Vec<f64>) -> Self {
        let n = objective.len();
        Self {
            sense,
            objective,
            rows: Vec::new(),
            relations: Vec::new(),
            rhs: Vec::new(),
            bounds: vec![(0.0, f64::INFINITY); n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn add_row(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) {
        self.rows.push(coeffs);
        self.relations.push(relation);
        self.rhs.push(rhs);
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) {
        self.bounds[var] = (lower, upper);
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if self.bounds.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "{} bounds for {n} variables",
                self.bounds.len()
            )));
        }
        if self.relations.len() != self.rows.len() || self.rhs.len() != self.rows.len() {
            return Err(Error::DimensionMismatch("row metadata length".into()));
        }
        for (i, row) in self.rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} coefficients, expected {n}",
                    row.len()
                )));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::DimensionMismatch(format!("row {i} has a non-finite entry")));
            }
        }
        if self.rhs.iter().any(|v| !v.is_finite()) || self.objective.iter().any(|v| !v.is_finite()) {
            return Err(Error::DimensionMismatch("non-finite rhs or objective".into()));
        }
        for (j, &(lo, hi)) in self.bounds.iter().enumerate() {
            if lo.is_nan() || hi.is_nan() || lo > hi || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
                return Err(Error::DimensionMismatch(format!("bad bounds on variable {j}")));
            }
        }
        Ok(())
    }

    /// Objective value at `x`.
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Largest violation of any row or bound, each row divided by its largest
    /// coefficient magnitude. Rows of pure rounding noise are not rescaled.
    pub fn scaled_residual(&self, x: &[f64]) -> f64 {
        let mut worst = 0.0_f64;
        for (i, row) in self.rows.iter().enumerate() {
            let scale = row.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
            let scale = if scale <= ROW_NOISE && self.rhs[i].abs() <= ROW_NOISE { 1.0 } else { scale.max(1e-300) };
            let lhs: f64 = row.iter().zip(x).map(|(a, v)| a * v).sum();
            let gap = (lhs - self.rhs[i]) / scale;
            let violation = match self.relations[i] {
                Relation::Eq => gap.abs(),
                Relation::Le => gap.max(0.0),
                Relation::Ge => (-gap).max(0.0),
            };
            worst = worst.max(violation);
        }
        for (j, &(lo, hi)) in self.bounds.iter().enumerate() {
            worst = worst.max(lo - x[j]).max(x[j] - hi);
        }
        worst
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LpSolution {
    pub status: Status,
    pub primal: Vec<f64>,
    /// One multiplier per constraint row, sign convention of the stated sense:
    /// at an optimum the objective equals [`LpSolution::dual_objective`].
    pub dual: Vec<f64>,
    pub value: f64,
    pub basis_size: usize,
    /// For infeasible programs, row weights `y` with `yᵀA` non-positive on
    /// every non-negative column direction and `yᵀb > 0`.
    pub farkas: Option<Vec<f64>>,
}

impl LpSolution {
    /// Reduced costs `c − Aᵀy`.
    pub fn reduced_costs(&self, lp: &LinearProgram) -> Vec<f64> {
        (0..lp.num_vars())
            .map(|j| {
                lp.objective[j]
                    - lp.rows.iter().zip(&self.dual).map(|(row, y)| row[j] * y).sum::<f64>()
            })
            .collect()
    }

    /// Lagrangian dual value `bᵀy + Σ_j max/min over the bound box of d_j x_j`.
    pub fn dual_objective(&self, lp: &LinearProgram) -> f64 {
        let d = self.reduced_costs(lp);
        let mut total: f64 = lp.rhs.iter().zip(&self.dual).map(|(b, y)| b * y).sum();
        for (j, &dj) in d.iter().enumerate() {
            let (lo, hi) = lp.bounds[j];
            let toward_upper = match lp.sense {
                Sense::Maximize => dj > 0.0,
                Sense::Minimize => dj < 0.0,
            };
            let bound = if toward_upper { hi } else { lo };
            if dj.abs() <= 1e-12 {
                continue;
            }
            total += dj * bound;
        }
        total
    }

    /// Sum of |multiplier × row slack| plus |reduced cost × distance to the
    /// nearest finite bound|.
    pub fn complementarity_residual(&self, lp: &LinearProgram) -> f64 {
        let mut total = 0.0;
        for (i, row) in lp.rows.iter().enumerate() {
            let lhs: f64 = row.iter().zip(&self.primal).map(|(a, v)| a * v).sum();
            total += (self.dual[i] * (lhs - lp.rhs[i])).abs();
        }
        for (j, dj) in self.reduced_costs(lp).into_iter().enumerate() {
            let (lo, hi) = lp.bounds[j];
            let x = self.primal[j];
            let gap = (x - lo).abs().min((hi - x).abs());
            if gap.is_finite() {
                total += (dj * gap).abs();
            }
        }
        total
    }
}

enum Column {
    Shift { col: usize, lower: f64 },
    Mirror { col: usize, upper: f64 },
    Split { pos: usize, neg: usize },
}

struct StandardForm {
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    cost: Vec<f64>,
    columns: Vec<Column>,
    /// `(sign × scale)` applied to each original row.
    row_factor: Vec<f64>,
    original_rows: usize,
}

fn standard_form(lp: &LinearProgram, equilibrate: bool) -> StandardForm {
    let mut columns = Vec::with_capacity(lp.num_vars());
    let mut next = 0;
    let mut upper_rows: Vec<(usize, f64)> = Vec::new();
    for &(lo, hi) in &lp.bounds {
        if lo.is_finite() {
            columns.push(Column::Shift { col: next, lower: lo });
            if hi.is_finite() {
                upper_rows.push((next, hi - lo));
            }
            next += 1;
        } else if hi.is_finite() {
            columns.push(Column::Mirror { col: next, upper: hi });
            next += 1;
        } else {
            columns.push(Column::Split { pos: next, neg: next + 1 });
            next += 2;
        }
    }
    let structural = next;
    let slack_rows: Vec<usize> = (0..lp.num_rows())
        .filter(|&i| lp.relations[i] != Relation::Eq)
        .collect();
    let total_rows = lp.num_rows() + upper_rows.len();
    let width = structural + slack_rows.len() + upper_rows.len();

    let mut a = vec![vec![0.0; width]; total_rows];
    let mut b = vec![0.0; total_rows];
    let mut slack_col = structural;
    for i in 0..lp.num_rows() {
        let mut rhs = lp.rhs[i];
        for (j, col) in columns.iter().enumerate() {
            let coeff = lp.rows[i][j];
            if coeff == 0.0 {
                continue;
            }
            match *col {
                Column::Shift { col, lower } => {
                    a[i][col] = coeff;
                    rhs -= coeff * lower;
                }
                Column::Mirror { col, upper } => {
                    a[i][col] = -coeff;
                    rhs -= coeff * upper;
                }
                Column::Split { pos, neg } => {
                    a[i][pos] = coeff;
                    a[i][neg] = -coeff;
                }
            }
        }
        match lp.relations[i] {
            Relation::Eq => {}
            Relation::Le => {
                a[i][slack_col] = 1.0;
                slack_col += 1;
            }
            Relation::Ge => {
                a[i][slack_col] = -1.0;
                slack_col += 1;
            }
        }
        b[i] = rhs;
    }
    for (k, &(col, width_ub)) in upper_rows.iter().enumerate() {
        let i = lp.num_rows() + k;
        a[i][col] = 1.0;
        a[i][slack_col] = 1.0;
        slack_col += 1;
        b[i] = width_ub;
    }

    let mut row_factor = vec![1.0; total_rows];
    for i in 0..total_rows {
        let mut factor = 1.0;
        if equilibrate {
            let scale = a[i][..structural].iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            if scale <= ROW_NOISE && b[i].abs() <= ROW_NOISE {
                // Rescaling would blow rounding noise up into a real constraint.
                a[i][..structural].iter_mut().for_each(|v| *v = 0.0);
                b[i] = 0.0;
            } else if scale > 0.0 {
                factor = 1.0 / scale;
            }
        }
        if b[i] * factor < 0.0 {
            factor = -factor;
        }
        if factor != 1.0 {
            for v in a[i].iter_mut() {
                *v *= factor;
            }
            b[i] *= factor;
        }
        row_factor[i] = factor;
    }

    let mut cost = vec![0.0; width];
    let flip = if lp.sense == Sense::Maximize { -1.0 } else { 1.0 };
    for (j, col) in columns.iter().enumerate() {
        let c = flip * lp.objective[j];
        match *col {
            Column::Shift { col, .. } => cost[col] = c,
            Column::Mirror { col, .. } => cost[col] = -c,
            Column::Split { pos, neg } => {
                cost[pos] = c;
                cost[neg] = -c;
            }
        }
    }
    StandardForm { a, b, cost, columns, row_factor, original_rows: lp.num_rows() }
}

fn recover_primal(sf: &StandardForm, x: &[f64]) -> Vec<f64> {
    sf.columns
        .iter()
        .map(|col| match *col {
            Column::Shift { col, lower } => lower + x[col],
            Column::Mirror { col, upper } => upper - x[col],
            Column::Split { pos, neg } => x[pos] - x[neg],
        })
        .collect()
}

/// Solves `lp`; the returned optimum is always a basic (vertex) solution.
pub fn solve(lp: &LinearProgram, mode: Mode) -> Result<LpSolution> {
    lp.validate()?;
    let sf = standard_form(lp, mode == Mode::Float);
    let raw = match mode {
        Mode::Float => two_phase::<f64>(&sf.a, &sf.b, &sf.cost, &FLOAT_TOLERANCES)?,
        Mode::Rational => two_phase::<BigRational>(
            &sf.a,
            &sf.b,
            &sf.cost,
            &Tolerances { reduced_cost: 0.0, pivot: 0.0, feasibility: 0.0, ratio_tie: 0.0 },
        )?,
    };
    let sign = if lp.sense == Sense::Maximize { -1.0 } else { 1.0 };
    match raw {
        RawOutcome::Optimal { x, y } => {
            let primal = recover_primal(&sf, &x);
            let residual = lp.scaled_residual(&primal);
            if residual > PRIMAL_RESIDUAL_TOL {
                return Err(Error::NumericalBreakdown(format!(
                    "primal residual {residual:e} after pivoting"
                )));
            }
            let dual = (0..sf.original_rows).map(|i| sign * y[i] * sf.row_factor[i]).collect();
            let basis_size = primal.iter().filter(|v| v.abs() > SUPPORT_TOL).count();
            Ok(LpSolution {
                status: Status::Optimal,
                value: lp.evaluate(&primal),
                primal,
                dual,
                basis_size,
                farkas: None,
            })
        }
        RawOutcome::Infeasible { farkas } => {
            let farkas = (0..sf.original_rows).map(|i| farkas[i] * sf.row_factor[i]).collect();
            Ok(LpSolution {
                status: Status::Infeasible,
                primal: vec![0.0; lp.num_vars()],
                dual: vec![0.0; lp.num_rows()],
                value: f64::NAN,
                basis_size: 0,
                farkas: Some(farkas),
            })
        }
        RawOutcome::Unbounded => Ok(LpSolution {
            status: Status::Unbounded,
            primal: vec![0.0; lp.num_vars()],
            dual: vec![0.0; lp.num_rows()],
            value: if lp.sense == Sense::Maximize { f64::INFINITY } else { f64::NEG_INFINITY },
            basis_size: 0,
            farkas: None,
        }),
    }
}

/// Basic optimal solution in float mode; support size is at most the rank of
/// the constraint matrix.
pub fn vertex_solution(lp: &LinearProgram) -> Result<LpSolution> {
    solve(lp, Mode::Float)
}
