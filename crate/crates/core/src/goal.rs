//! Multi-choice goal program for splitting an order across suppliers.
//!
//! Goals, each with a positive and a negative deviation:
//!
//! ```text
//! (1) sum C_n x_n - d1+ + d1- >= T
//! (2) sum U_n x_n - d2+ + d2- = y1          I_min <= y1 <= I_max
//! (3) y1 - e1+ + e1- = budget anchor
//! (5) avg lead(x) - d3+ + d3- = y2          R_min <= y2 <= R_max
//! (6) y2 - e2+ + e2- = lead anchor
//! (8) sum x_n - d4+ + d4- <= Q
//! ```
//!
//! The lead-time average is a ratio; it is linearized by fixing its
//! denominator (see [`LeadMode`]).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lp::{self, LinearProgram, LpError, LpStatus, Relation};

const ITERATIVE_MAX: usize = 25;
const ITERATIVE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GoalError {
    #[error("invalid model: {0}")]
    Invalid(String),
    #[error("supplier {0} has no closeness coefficient")]
    MissingCoefficient(String),
    #[error("reference plan has {got} quantities for {expected} suppliers")]
    PlanLength { expected: usize, got: usize },
    #[error("no TVP values to sweep")]
    EmptySweep,
    #[error("bad sweep range `{0}` (expected start:end:step)")]
    SweepRange(String),
    #[error(transparent)]
    Lp(#[from] LpError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct McgpSupplier {
    pub id: String,
    /// Closeness coefficient; filled from the ranking when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coeff: Option<f64>,
    pub unit_cost: f64,
    pub lead_time: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aspiration {
    pub anchor: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Goals {
    pub tvp_floor: f64,
    pub budget: Aspiration,
    pub lead: Aspiration,
    pub quantity: f64,
}

/// Penalty per unit of deviation, shared by both signs of a goal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct GoalWeights {
    pub tvp: f64,
    pub budget: f64,
    pub lead: f64,
    pub quantity: f64,
    pub budget_aspiration: f64,
    pub lead_aspiration: f64,
}

impl Default for GoalWeights {
    fn default() -> Self {
        GoalWeights {
            tvp: 1.0,
            budget: 1.0,
            lead: 1.0,
            quantity: 1.0,
            budget_aspiration: 1.0,
            lead_aspiration: 1.0,
        }
    }
}

impl GoalWeights {
    fn as_array(&self) -> [f64; 6] {
        [
            self.tvp,
            self.budget,
            self.lead,
            self.quantity,
            self.budget_aspiration,
            self.lead_aspiration,
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct McgpModel {
    pub suppliers: Vec<McgpSupplier>,
    pub goals: Goals,
    #[serde(default)]
    pub weights: GoalWeights,
    /// A published or hand-made plan to evaluate alongside the solver's.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_plan: Option<Vec<f64>>,
}

impl McgpModel {
    pub fn validate(&self) -> Result<(), GoalError> {
        let bad = |m: String| Err(GoalError::Invalid(m));
        if self.suppliers.is_empty() {
            return bad("at least one supplier".into());
        }
        for s in &self.suppliers {
            let coeff = s.coeff.unwrap_or(0.0);
            if ![coeff, s.unit_cost, s.lead_time]
                .iter()
                .all(|v| v.is_finite() && *v >= 0.0)
            {
                return bad(format!("supplier {} data must be finite and nonnegative", s.id));
            }
        }
        let g = &self.goals;
        for (name, asp) in [("budget", g.budget), ("lead", g.lead)] {
            if ![asp.anchor, asp.min, asp.max]
                .iter()
                .all(|v| v.is_finite() && *v >= 0.0)
            {
                return bad(format!("{name} aspiration must be finite and nonnegative"));
            }
            if asp.min > asp.max {
                return bad(format!("{name} min {} exceeds max {}", asp.min, asp.max));
            }
        }
        if !(g.tvp_floor.is_finite() && g.tvp_floor >= 0.0) {
            return bad("TVP floor must be finite and nonnegative".into());
        }
        if !(g.quantity.is_finite() && g.quantity >= 0.0) {
            return bad("procurement level must be finite and nonnegative".into());
        }
        if self.weights.as_array().iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return bad("goal weights must be finite and nonnegative".into());
        }
        if let Some(plan) = &self.reference_plan {
            if plan.len() != self.suppliers.len() {
                return Err(GoalError::PlanLength {
                    expected: self.suppliers.len(),
                    got: plan.len(),
                });
            }
        }
        Ok(())
    }

    pub fn coefficients(&self) -> Result<Vec<f64>, GoalError> {
        self.suppliers
            .iter()
            .map(|s| s.coeff.ok_or_else(|| GoalError::MissingCoefficient(s.id.clone())))
            .collect()
    }

    /// Copy with missing coefficients taken from `closeness` (by supplier id).
    pub fn with_closeness(&self, closeness: &[(String, f64)]) -> McgpModel {
        let mut out = self.clone();
        for s in &mut out.suppliers {
            if s.coeff.is_none() {
                s.coeff = closeness.iter().find(|(id, _)| *id == s.id).map(|(_, c)| *c);
            }
        }
        out
    }

    pub fn with_tvp(&self, tvp: f64) -> McgpModel {
        let mut out = self.clone();
        out.goals.tvp_floor = tvp;
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LeadMode {
    /// Denominator fixed at the procurement level `Q`.
    #[default]
    FixedTotal,
    /// Denominator fixed at the previous solve's total, repeated to a fixpoint.
    Iterative,
}

impl FromStr for LeadMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fixed_total" | "fixed-total" => Ok(LeadMode::FixedTotal),
            "iterative" => Ok(LeadMode::Iterative),
            other => Err(format!("unknown mode `{other}` (fixed_total | iterative)")),
        }
    }
}

impl fmt::Display for LeadMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LeadMode::FixedTotal => "fixed_total",
            LeadMode::Iterative => "iterative",
        })
    }
}

/// Denominator of the average lead time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LeadDenominator {
    /// `sum x_n` of the plan itself.
    Actual,
    Fixed(f64),
}

/// Variable layout of a built goal program.
#[derive(Debug, Clone, PartialEq)]
pub struct McgpLayout {
    pub x: Vec<usize>,
    pub y1: usize,
    pub y2: usize,
    /// `(plus, minus)` for d1..d4.
    pub d: [(usize, usize); 4],
    /// `(plus, minus)` for e1, e2.
    pub e: [(usize, usize); 2],
}

/// Goal program with the lead-time ratio divided by `denominator`. A zero
/// denominator drops the supplier terms from the lead row.
pub fn build_lp(model: &McgpModel, denominator: f64) -> Result<(LinearProgram, McgpLayout), GoalError> {
    model.validate()?;
    let coeffs = model.coefficients()?;
    let g = &model.goals;
    let w = &model.weights;
    let mut lp = LinearProgram::new();
    let x: Vec<usize> = model
        .suppliers
        .iter()
        .map(|s| lp.add_variable(format!("x_{}", s.id), 0.0, f64::INFINITY))
        .collect();
    let y1 = lp.add_variable("y1", g.budget.min, g.budget.max);
    let y2 = lp.add_variable("y2", g.lead.min, g.lead.max);
    let pair = |lp: &mut LinearProgram, name: &str, weight: f64| {
        let p = lp.add_variable(format!("{name}+"), 0.0, f64::INFINITY);
        let m = lp.add_variable(format!("{name}-"), 0.0, f64::INFINITY);
        lp.set_cost(p, weight);
        lp.set_cost(m, weight);
        (p, m)
    };
    let d = [
        pair(&mut lp, "d1", w.tvp),
        pair(&mut lp, "d2", w.budget),
        pair(&mut lp, "d3", w.lead),
        pair(&mut lp, "d4", w.quantity),
    ];
    let e = [
        pair(&mut lp, "e1", w.budget_aspiration),
        pair(&mut lp, "e2", w.lead_aspiration),
    ];
    let with_dev = |mut row: Vec<(usize, f64)>, (p, m): (usize, usize)| {
        row.push((p, -1.0));
        row.push((m, 1.0));
        row
    };

    let tvp_row = x.iter().zip(&coeffs).map(|(&j, c)| (j, *c)).collect();
    lp.add_constraint(with_dev(tvp_row, d[0]), Relation::Ge, g.tvp_floor);

    let mut spend: Vec<(usize, f64)> = x.iter().zip(&model.suppliers).map(|(&j, s)| (j, s.unit_cost)).collect();
    spend.push((y1, -1.0));
    lp.add_constraint(with_dev(spend, d[1]), Relation::Eq, 0.0);
    lp.add_constraint(with_dev(vec![(y1, 1.0)], e[0]), Relation::Eq, g.budget.anchor);

    let mut lead: Vec<(usize, f64)> = if denominator > 0.0 {
        x.iter()
            .zip(&model.suppliers)
            .map(|(&j, s)| (j, s.lead_time / denominator))
            .collect()
    } else {
        Vec::new()
    };
    lead.push((y2, -1.0));
    lp.add_constraint(with_dev(lead, d[2]), Relation::Eq, 0.0);
    lp.add_constraint(with_dev(vec![(y2, 1.0)], e[1]), Relation::Eq, g.lead.anchor);

    let qty = x.iter().map(|&j| (j, 1.0)).collect();
    lp.add_constraint(with_dev(qty, d[3]), Relation::Le, g.quantity);

    Ok((lp, McgpLayout { x, y1, y2, d, e }))
}

/// Goal program for the first solve of `mode`. Both modes start from the
/// denominator `Q`; [`solve_allocation`] re-solves in iterative mode.
pub fn build_mcgp(model: &McgpModel, mode: LeadMode) -> Result<LinearProgram, GoalError> {
    let denominator = match mode {
        LeadMode::FixedTotal | LeadMode::Iterative => model.goals.quantity,
    };
    Ok(build_lp(model, denominator)?.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Deviations {
    pub d_plus: [f64; 4],
    pub d_minus: [f64; 4],
    pub e_plus: [f64; 2],
    pub e_minus: [f64; 2],
}

impl Deviations {
    /// Weighted sum, the goal program's objective.
    pub fn penalty(&self, w: &GoalWeights) -> f64 {
        let dw = [w.tvp, w.budget, w.lead, w.quantity];
        let ew = [w.budget_aspiration, w.lead_aspiration];
        (0..4).map(|i| dw[i] * (self.d_plus[i] + self.d_minus[i])).sum::<f64>()
            + (0..2).map(|j| ew[j] * (self.e_plus[j] + self.e_minus[j])).sum::<f64>()
    }

    pub fn max_complementarity(&self) -> f64 {
        let d = (0..4).map(|i| self.d_plus[i] * self.d_minus[i]);
        let e = (0..2).map(|j| self.e_plus[j] * self.e_minus[j]);
        d.chain(e).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Achieved {
    pub tvp: f64,
    pub spend: f64,
    pub avg_lead_time: f64,
    pub total_qty: f64,
}

/// Penalty of a fixed plan with `y1`, `y2` and the deviations chosen optimally.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PlanEvaluation {
    pub quantities: Vec<f64>,
    pub achieved: Achieved,
    pub y1: f64,
    pub y2: f64,
    pub deviations: Deviations,
    pub objective: f64,
}

pub fn achieved(model: &McgpModel, x: &[f64]) -> Result<Achieved, GoalError> {
    let coeffs = model.coefficients()?;
    let total: f64 = x.iter().sum();
    let lead_sum: f64 = x.iter().zip(&model.suppliers).map(|(q, s)| q * s.lead_time).sum();
    Ok(Achieved {
        tvp: x.iter().zip(&coeffs).map(|(q, c)| q * c).sum(),
        spend: x.iter().zip(&model.suppliers).map(|(q, s)| q * s.unit_cost).sum(),
        avg_lead_time: if total > 0.0 { lead_sum / total } else { 0.0 },
        total_qty: total,
    })
}

/// Best `y` in `[asp.min, asp.max]` for `w_val |value - y| + w_asp |y - anchor|`.
/// The cost is convex piecewise linear, so a breakpoint is optimal.
fn best_level(value: f64, asp: &Aspiration, w_val: f64, w_asp: f64) -> f64 {
    let clamp = |v: f64| v.clamp(asp.min, asp.max);
    let cost = |y: f64| w_val * (value - y).abs() + w_asp * (y - asp.anchor).abs();
    let mut best = clamp(value);
    for cand in [clamp(asp.anchor), asp.min, asp.max] {
        if cost(cand) < cost(best) {
            best = cand;
        }
    }
    best
}

fn split(v: f64) -> (f64, f64) {
    if v >= 0.0 {
        (v, 0.0)
    } else {
        (0.0, -v)
    }
}

/// Standalone penalty oracle: evaluates a plan against the goals without
/// going through the LP.
pub fn evaluate_plan(model: &McgpModel, x: &[f64], denominator: LeadDenominator) -> Result<PlanEvaluation, GoalError> {
    model.validate()?;
    if x.len() != model.suppliers.len() {
        return Err(GoalError::PlanLength {
            expected: model.suppliers.len(),
            got: x.len(),
        });
    }
    let g = &model.goals;
    let w = &model.weights;
    let ach = achieved(model, x)?;
    let mut dev = Deviations::default();

    dev.d_minus[0] = (g.tvp_floor - ach.tvp).max(0.0);

    let y1 = best_level(ach.spend, &g.budget, w.budget, w.budget_aspiration);
    (dev.d_plus[1], dev.d_minus[1]) = split(ach.spend - y1);
    (dev.e_plus[0], dev.e_minus[0]) = split(y1 - g.budget.anchor);

    let den = match denominator {
        LeadDenominator::Actual => ach.total_qty,
        LeadDenominator::Fixed(q) => q,
    };
    let lead_sum: f64 = x.iter().zip(&model.suppliers).map(|(q, s)| q * s.lead_time).sum();
    let lead_value = if den > 0.0 { Some(lead_sum / den) } else { None };
    let y2 = match lead_value {
        Some(v) => best_level(v, &g.lead, w.lead, w.lead_aspiration),
        None => g.lead.anchor.clamp(g.lead.min, g.lead.max),
    };
    (dev.d_plus[2], dev.d_minus[2]) = split(lead_value.unwrap_or(y2) - y2);
    (dev.e_plus[1], dev.e_minus[1]) = split(y2 - g.lead.anchor);

    dev.d_plus[3] = (ach.total_qty - g.quantity).max(0.0);

    Ok(PlanEvaluation {
        quantities: x.to_vec(),
        achieved: ach,
        y1,
        y2,
        objective: dev.penalty(w),
        deviations: dev,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverStatus {
    Optimal,
    Infeasible,
    Unbounded,
    /// Iterative mode hit its iteration cap; the last plan is reported.
    NotConverged,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct AllocationOptions {
    pub mode: LeadMode,
    pub integerize: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AllocationPlan {
    pub suppliers: Vec<String>,
    pub quantities: Vec<f64>,
    pub objective: f64,
    pub achieved: Achieved,
    pub y1: f64,
    pub y2: f64,
    pub deviations: Deviations,
    pub solver_status: SolverStatus,
    pub mode: LeadMode,
    pub iterations: usize,
    pub duality_gap: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    /// Rounded plan, re-evaluated by the penalty oracle.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub integer: Option<PlanEvaluation>,
    /// Reference plan from the model, evaluated by the penalty oracle.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<PlanEvaluation>,
}

fn solve_once(model: &McgpModel, denominator: f64) -> Result<(lp::LpSolution, McgpLayout), GoalError> {
    let (lp, layout) = build_lp(model, denominator)?;
    Ok((lp::solve(&lp)?, layout))
}

pub fn solve_allocation(model: &McgpModel, options: &AllocationOptions) -> Result<AllocationPlan, GoalError> {
    model.validate()?;
    let mut denominator = model.goals.quantity;
    let mut iterations = 0;
    let (solution, layout, status) = loop {
        iterations += 1;
        let (sol, layout) = solve_once(model, denominator)?;
        let status = match sol.status {
            LpStatus::Optimal => SolverStatus::Optimal,
            LpStatus::Infeasible => SolverStatus::Infeasible,
            LpStatus::Unbounded => SolverStatus::Unbounded,
        };
        if options.mode == LeadMode::FixedTotal || status != SolverStatus::Optimal {
            break (sol, layout, status);
        }
        let total: f64 = layout.x.iter().map(|&j| sol.x[j]).sum();
        if (total - denominator).abs() <= ITERATIVE_TOL || total <= 0.0 {
            break (sol, layout, status);
        }
        if iterations >= ITERATIVE_MAX {
            break (sol, layout, SolverStatus::NotConverged);
        }
        denominator = total;
    };

    let suppliers: Vec<String> = model.suppliers.iter().map(|s| s.id.clone()).collect();
    let mut warnings = solution.warnings.clone();
    if status == SolverStatus::NotConverged {
        warnings.push(format!(
            "lead-time denominator did not settle within {ITERATIVE_MAX} solves"
        ));
    }
    let reference = match &model.reference_plan {
        Some(plan) => Some(evaluate_plan(model, plan, LeadDenominator::Actual)?),
        None => None,
    };
    // No plan: zeros keep the record serializable, the status says why.
    if !matches!(status, SolverStatus::Optimal | SolverStatus::NotConverged) {
        let n = suppliers.len();
        return Ok(AllocationPlan {
            suppliers,
            quantities: vec![0.0; n],
            objective: 0.0,
            achieved: Achieved {
                tvp: 0.0,
                spend: 0.0,
                avg_lead_time: 0.0,
                total_qty: 0.0,
            },
            y1: 0.0,
            y2: 0.0,
            deviations: Deviations::default(),
            solver_status: status,
            mode: options.mode,
            iterations,
            duality_gap: 0.0,
            warnings,
            integer: None,
            reference,
        });
    }

    let v = &solution.x;
    // Round away simplex noise (249.99999999999983 and the like).
    let quantities: Vec<f64> = layout.x.iter().map(|&j| (v[j].max(0.0) * 1e9).round() / 1e9).collect();
    let mut dev = Deviations::default();
    for i in 0..4 {
        dev.d_plus[i] = v[layout.d[i].0];
        dev.d_minus[i] = v[layout.d[i].1];
    }
    for j in 0..2 {
        dev.e_plus[j] = v[layout.e[j].0];
        dev.e_minus[j] = v[layout.e[j].1];
    }
    let integer = if options.integerize {
        let rounded = largest_remainder(&quantities);
        Some(evaluate_plan(model, &rounded, LeadDenominator::Fixed(denominator))?)
    } else {
        None
    };
    Ok(AllocationPlan {
        suppliers,
        achieved: achieved(model, &quantities)?,
        quantities,
        objective: solution.objective,
        y1: v[layout.y1],
        y2: v[layout.y2],
        deviations: dev,
        solver_status: status,
        mode: options.mode,
        iterations,
        duality_gap: solution.duality_gap,
        warnings,
        integer,
        reference,
    })
}

/// Integers summing to `round(sum x)`: floors first, then the leftover units
/// to the largest fractional parts (lower index wins ties).
pub fn largest_remainder(x: &[f64]) -> Vec<f64> {
    let target = x.iter().sum::<f64>().round();
    let mut out: Vec<f64> = x.iter().map(|v| v.floor()).collect();
    let mut left = (target - out.iter().sum::<f64>()).max(0.0) as usize;
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| (x[b] - x[b].floor()).total_cmp(&(x[a] - x[a].floor())));
    for &i in order.iter().cycle().take(x.len() * 2) {
        if left == 0 {
            break;
        }
        out[i] += 1.0;
        left -= 1;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SweepPoint {
    pub tvp: f64,
    pub plan: AllocationPlan,
}

/// One solve per TVP value, run on scoped threads; output order follows input.
pub fn tvp_sweep(model: &McgpModel, tvps: &[f64], options: &AllocationOptions) -> Result<Vec<SweepPoint>, GoalError> {
    if tvps.is_empty() {
        return Err(GoalError::EmptySweep);
    }
    let results: Vec<Result<AllocationPlan, GoalError>> = std::thread::scope(|s| {
        let handles: Vec<_> = tvps
            .iter()
            .map(|&t| {
                let m = model.with_tvp(t);
                s.spawn(move || solve_allocation(&m, options))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sweep worker panicked"))
            .collect()
    });
    tvps.iter()
        .zip(results)
        .map(|(&tvp, plan)| Ok(SweepPoint { tvp, plan: plan? }))
        .collect()
}

/// `tvp,supplier,qty,objective`.
pub fn sweep_csv(points: &[SweepPoint]) -> String {
    let mut out = String::from("tvp,supplier,qty,objective\n");
    for p in points {
        for (id, q) in p.plan.suppliers.iter().zip(&p.plan.quantities) {
            out.push_str(&format!("{},{id},{q:.6},{:.6}\n", p.tvp, p.plan.objective));
        }
    }
    out
}

/// Parses `start:end:step` (inclusive end).
pub fn parse_sweep(spec: &str) -> Result<Vec<f64>, GoalError> {
    let err = || GoalError::SweepRange(spec.to_string());
    let parts: Vec<f64> = spec
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|_| err()))
        .collect::<Result<_, _>>()?;
    let [start, end, step] = parts[..] else {
        return Err(err());
    };
    if !(step > 0.0) || end < start || !start.is_finite() || !end.is_finite() {
        return Err(err());
    }
    let count = ((end - start) / step + 1e-9).floor() as usize;
    Ok((0..=count).map(|k| start + k as f64 * step).collect())
}
