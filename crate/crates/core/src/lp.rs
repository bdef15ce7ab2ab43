//! Small dense LP solver: bounded-variable primal simplex, two phases,
//! Bland's rule throughout so degenerate problems terminate.
//!
//! Problems are `min c·x` subject to rows `A_i·x {<=, =, >=} b_i` and
//! `l <= x <= u` with finite `l`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

const OPT_TOL: f64 = 1e-9;
const PIVOT_ZERO: f64 = 1e-11;
const SMALL_PIVOT: f64 = 1e-9;
const MAX_ITERATIONS: usize = 50_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("variable {0} has a non-finite lower bound")]
    FreeVariable(String),
    #[error("variable {name} has lower bound {lower} above upper bound {upper}")]
    EmptyBounds { name: String, lower: f64, upper: f64 },
    #[error("constraint {row} references undeclared variable {index}")]
    UnknownVariable { row: usize, index: usize },
    #[error("non-finite coefficient in {0}")]
    NonFinite(String),
    #[error("simplex exceeded {0} iterations")]
    IterationLimit(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = ">=")]
    Ge,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub coeffs: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct LinearProgram {
    pub variables: Vec<Variable>,
    /// Sparse minimization objective.
    pub objective: Vec<(usize, f64)>,
    pub constraints: Vec<Constraint>,
}

impl LinearProgram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_variable(&mut self, name: impl Into<String>, lower: f64, upper: f64) -> usize {
        self.variables.push(Variable {
            name: name.into(),
            lower,
            upper,
        });
        self.variables.len() - 1
    }

    pub fn set_cost(&mut self, var: usize, cost: f64) {
        self.objective.retain(|(j, _)| *j != var);
        self.objective.push((var, cost));
    }

    pub fn add_constraint(&mut self, coeffs: Vec<(usize, f64)>, relation: Relation, rhs: f64) -> usize {
        self.constraints.push(Constraint { coeffs, relation, rhs });
        self.constraints.len() - 1
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    pub fn validate(&self) -> Result<(), LpError> {
        for v in &self.variables {
            if !v.lower.is_finite() {
                return Err(LpError::FreeVariable(v.name.clone()));
            }
            if v.upper.is_nan() || v.lower > v.upper {
                return Err(LpError::EmptyBounds {
                    name: v.name.clone(),
                    lower: v.lower,
                    upper: v.upper,
                });
            }
        }
        let n = self.variables.len();
        for &(j, c) in &self.objective {
            if j >= n {
                return Err(LpError::UnknownVariable {
                    row: usize::MAX,
                    index: j,
                });
            }
            if !c.is_finite() {
                return Err(LpError::NonFinite("objective".into()));
            }
        }
        for (row, con) in self.constraints.iter().enumerate() {
            if !con.rhs.is_finite() {
                return Err(LpError::NonFinite(format!("rhs of row {row}")));
            }
            for &(j, a) in &con.coeffs {
                if j >= n {
                    return Err(LpError::UnknownVariable { row, index: j });
                }
                if !a.is_finite() {
                    return Err(LpError::NonFinite(format!("row {row}")));
                }
            }
        }
        Ok(())
    }

    /// `c·x` for a point.
    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().map(|(j, c)| c * x[*j]).sum()
    }

    /// Left-hand side of every row at `x`.
    pub fn activities(&self, x: &[f64]) -> Vec<f64> {
        self.constraints
            .iter()
            .map(|con| con.coeffs.iter().map(|(j, a)| a * x[*j]).sum())
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub objective: f64,
    /// One multiplier per constraint row (empty unless optimal).
    pub duals: Vec<f64>,
    /// `|primal - dual|` objective at the final basis (NaN unless optimal).
    pub duality_gap: f64,
    pub iterations: usize,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum At {
    Basic(usize),
    Lower,
    Upper,
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    /// Values of basic variables (shifted so every lower bound is 0).
    beta: Vec<f64>,
    basis: Vec<usize>,
    state: Vec<At>,
    upper: Vec<f64>,
    iterations: usize,
    warnings: Vec<String>,
}

enum Outcome {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn value(&self, j: usize) -> f64 {
        match self.state[j] {
            At::Basic(r) => self.beta[r],
            At::Lower => 0.0,
            At::Upper => self.upper[j],
        }
    }

    fn reduced_cost(&self, cost: &[f64], j: usize) -> f64 {
        cost[j]
            - self
                .basis
                .iter()
                .zip(&self.rows)
                .map(|(b, row)| cost[*b] * row[j])
                .sum::<f64>()
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let p = self.rows[r][j];
        if p.abs() < SMALL_PIVOT {
            let msg = format!("small pivot {p:.3e} at row {r}, column {j}");
            log::warn!("{msg}");
            self.warnings.push(msg);
        }
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[j];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
            }
        }
    }

    fn run(&mut self, cost: &[f64]) -> Result<Outcome, LpError> {
        let n = cost.len();
        loop {
            if self.iterations >= MAX_ITERATIONS {
                return Err(LpError::IterationLimit(MAX_ITERATIONS));
            }
            // Bland: lowest-index improving column
            let mut entering = None;
            for j in 0..n {
                if self.upper[j] == 0.0 {
                    continue;
                }
                let d = match self.state[j] {
                    At::Basic(_) => continue,
                    At::Lower => -self.reduced_cost(cost, j),
                    At::Upper => self.reduced_cost(cost, j),
                };
                if d > OPT_TOL {
                    entering = Some(j);
                    break;
                }
            }
            let Some(j) = entering else {
                return Ok(Outcome::Optimal);
            };
            self.iterations += 1;
            let dir = if self.state[j] == At::Lower { 1.0 } else { -1.0 };

            // ratio test; ties go to the lowest basic variable index
            let mut step = self.upper[j];
            let mut leave: Option<(usize, bool)> = None;
            for (r, row) in self.rows.iter().enumerate() {
                let rate = -dir * row[j];
                if rate.abs() <= PIVOT_ZERO {
                    continue;
                }
                let b = self.basis[r];
                let (limit, to_upper) = if rate < 0.0 {
                    (self.beta[r].max(0.0) / -rate, false)
                } else if self.upper[b].is_finite() {
                    ((self.upper[b] - self.beta[r]).max(0.0) / rate, true)
                } else {
                    continue;
                };
                let better = limit < step
                    || (limit == step && leave.is_some_and(|(lr, _)| b < self.basis[lr]))
                    || (limit == step && leave.is_none() && step.is_finite() && b < j);
                if better {
                    step = limit;
                    leave = Some((r, to_upper));
                }
            }
            if step.is_infinite() {
                return Ok(Outcome::Unbounded);
            }
            for (r, row) in self.rows.iter().enumerate() {
                self.beta[r] -= dir * row[j] * step;
            }
            match leave {
                None => {
                    self.state[j] = if self.state[j] == At::Lower {
                        At::Upper
                    } else {
                        At::Lower
                    };
                }
                Some((r, to_upper)) => {
                    let entering_value = if dir > 0.0 { step } else { self.upper[j] - step };
                    let out = self.basis[r];
                    self.state[out] = if to_upper { At::Upper } else { At::Lower };
                    self.pivot(r, j);
                    self.basis[r] = j;
                    self.state[j] = At::Basic(r);
                    self.beta[r] = entering_value;
                }
            }
        }
    }
}

/// Solves `lp`. Infeasible and unbounded problems are statuses, not errors.
pub fn solve(lp: &LinearProgram) -> Result<LpSolution, LpError> {
    lp.validate()?;
    let n = lp.variables.len();
    let m = lp.constraints.len();

    // columns: structural | slacks | artificials
    let slack_rows: Vec<usize> = (0..m).filter(|&i| lp.constraints[i].relation != Relation::Eq).collect();
    let n_slack = slack_rows.len();
    let art0 = n + n_slack;
    let total = art0 + m;

    let lower: Vec<f64> = lp.variables.iter().map(|v| v.lower).collect();
    let mut upper = vec![f64::INFINITY; total];
    for (j, v) in lp.variables.iter().enumerate() {
        upper[j] = v.upper - v.lower;
    }

    let mut a = vec![vec![0.0; total]; m];
    let mut rhs = vec![0.0; m];
    for (i, con) in lp.constraints.iter().enumerate() {
        for &(j, c) in &con.coeffs {
            a[i][j] += c;
        }
        rhs[i] = con.rhs - con.coeffs.iter().map(|(j, c)| c * lower[*j]).sum::<f64>();
    }
    for (k, &i) in slack_rows.iter().enumerate() {
        a[i][n + k] = if lp.constraints[i].relation == Relation::Le {
            1.0
        } else {
            -1.0
        };
    }
    let signs: Vec<f64> = rhs.iter().map(|r| if *r < 0.0 { -1.0 } else { 1.0 }).collect();
    for i in 0..m {
        a[i][art0 + i] = signs[i];
    }

    // B = diag(signs), so B^-1 A scales each row by its sign
    let rows: Vec<Vec<f64>> = a
        .iter()
        .zip(&signs)
        .map(|(row, s)| row.iter().map(|v| v * s).collect())
        .collect();
    let mut state = vec![At::Lower; total];
    for i in 0..m {
        state[art0 + i] = At::Basic(i);
    }
    let mut t = Tableau {
        rows,
        beta: rhs.iter().map(|r| r.abs()).collect(),
        basis: (art0..total).collect(),
        state,
        upper,
        iterations: 0,
        warnings: Vec::new(),
    };

    let mut phase1 = vec![0.0; total];
    for c in phase1.iter_mut().skip(art0) {
        *c = 1.0;
    }
    t.run(&phase1)?;
    let infeasibility: f64 = (art0..total).map(|j| t.value(j)).sum();
    let scale = 1.0 + rhs.iter().fold(0.0f64, |acc, r| acc.max(r.abs()));
    if infeasibility > 1e-9 * scale {
        return Ok(LpSolution {
            status: LpStatus::Infeasible,
            x: Vec::new(),
            objective: f64::NAN,
            duals: Vec::new(),
            duality_gap: f64::NAN,
            iterations: t.iterations,
            warnings: t.warnings,
        });
    }
    // artificials are pinned at zero from here on
    for j in art0..total {
        t.upper[j] = 0.0;
        if t.state[j] == At::Upper {
            t.state[j] = At::Lower;
        }
    }

    let mut cost = vec![0.0; total];
    for &(j, c) in &lp.objective {
        cost[j] += c;
    }
    if let Outcome::Unbounded = t.run(&cost)? {
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            x: Vec::new(),
            objective: f64::NEG_INFINITY,
            duals: Vec::new(),
            duality_gap: f64::NAN,
            iterations: t.iterations,
            warnings: t.warnings,
        });
    }

    let x: Vec<f64> = (0..n).map(|j| lower[j] + t.value(j)).collect();
    let objective = lp.objective_value(&x);

    // y_k = sum_i c_B[i] * (B^-1)[i][k], with (B^-1)[:, k] = sign_k * column of artificial k
    let duals: Vec<f64> = (0..m)
        .map(|k| {
            t.basis
                .iter()
                .zip(&t.rows)
                .map(|(b, row)| cost[*b] * row[art0 + k] * signs[k])
                .sum()
        })
        .collect();
    let duality_gap = duality_gap(lp, &duals, objective);
    Ok(LpSolution {
        status: LpStatus::Optimal,
        x,
        objective,
        duals,
        duality_gap,
        iterations: t.iterations,
        warnings: t.warnings,
    })
}

/// Dual objective from the row multipliers and the bound multipliers implied
/// by the reduced costs, compared against the primal objective. Computed from
/// the original data, not the tableau.
fn duality_gap(lp: &LinearProgram, y: &[f64], primal: f64) -> f64 {
    let n = lp.variables.len();
    let mut reduced = vec![0.0; n];
    for &(j, c) in &lp.objective {
        reduced[j] += c;
    }
    for (con, yi) in lp.constraints.iter().zip(y) {
        for &(j, a) in &con.coeffs {
            reduced[j] -= a * yi;
        }
    }
    let mut dual: f64 = lp.constraints.iter().zip(y).map(|(con, yi)| con.rhs * yi).sum();
    for (v, d) in lp.variables.iter().zip(&reduced) {
        if *d > 0.0 {
            dual += d * v.lower;
        } else if *d < 0.0 {
            if v.upper.is_finite() {
                dual += d * v.upper;
            } else if *d < -1e-7 {
                return f64::INFINITY;
            }
        }
    }
    // slack columns: +s for <=, -s for >=, s >= 0 unbounded above
    for (con, yi) in lp.constraints.iter().zip(y) {
        let d = match con.relation {
            Relation::Le => -yi,
            Relation::Ge => *yi,
            Relation::Eq => 0.0,
        };
        if d < -1e-7 {
            return f64::INFINITY;
        }
    }
    (primal - dual).abs()
}
