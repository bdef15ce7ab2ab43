//! Fuzzy TOPSIS over a TFN decision matrix, group-restricted rankings and the
//! cost versus resilience index.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fuzzy::{FuzzyError, Tfn};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TopsisError {
    #[error("matrix shape: {0}")]
    Shape(String),
    #[error("cost attribute {attribute} has a zero lower bound for {supplier}")]
    ZeroCostCell { supplier: String, attribute: String },
    #[error("benefit attribute {0} is zero for every supplier")]
    ZeroBenefitColumn(String),
    #[error("weight of {0} must lie in [0, 1]")]
    WeightRange(String),
    #[error("alpha must be in [0, 1], got {0}")]
    Alpha(f64),
    #[error("alpha step must be in (0, 0.5], got {0}")]
    Step(f64),
    #[error("group `{0}` selects no attributes")]
    EmptyGroup(String),
    #[error("supplier lists of the two group rankings differ")]
    SupplierMismatch,
    #[error(transparent)]
    Fuzzy(#[from] FuzzyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EvidenceKind {
    Temporal,
    Granular,
    Linguistic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    Max,
    Min,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Group {
    Resilience,
    Cost,
}

macro_rules! lowercase_str {
    ($t:ty { $($v:ident => $s:literal),+ }) => {
        impl FromStr for $t {
            type Err = String;
            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s.trim().to_ascii_lowercase().as_str() {
                    $($s => Ok(<$t>::$v),)+
                    other => Err(format!("unknown {}: `{other}`", stringify!($t))),
                }
            }
        }
        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(match self { $(<$t>::$v => $s,)+ })
            }
        }
    };
}

lowercase_str!(EvidenceKind { Temporal => "temporal", Granular => "granular", Linguistic => "linguistic" });
lowercase_str!(Objective { Max => "max", Min => "min" });
lowercase_str!(Group { Resilience => "resilience", Cost => "cost" });

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Attribute {
    pub id: String,
    pub name: String,
    pub evidence_kind: EvidenceKind,
    pub objective: Objective,
    pub group: Group,
}

/// Attribute subset used for a ranking run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupFilter {
    #[default]
    All,
    Resilience,
    Cost,
}

lowercase_str!(GroupFilter { All => "all", Resilience => "resilience", Cost => "cost" });

impl GroupFilter {
    pub fn admits(self, group: Group) -> bool {
        match self {
            GroupFilter::All => true,
            GroupFilter::Resilience => group == Group::Resilience,
            GroupFilter::Cost => group == Group::Cost,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceVariant {
    /// One square root over the squared differences of all attributes.
    #[default]
    Paper,
    /// Sum over attributes of the per-attribute vertex distance.
    PerAttribute,
}

impl FromStr for DistanceVariant {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "paper" => Ok(DistanceVariant::Paper),
            "per_attribute" | "per-attribute" => Ok(DistanceVariant::PerAttribute),
            other => Err(format!("unknown distance variant `{other}` (paper | per_attribute)")),
        }
    }
}

impl fmt::Display for DistanceVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DistanceVariant::Paper => "paper",
            DistanceVariant::PerAttribute => "per_attribute",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DecisionMatrix {
    suppliers: Vec<String>,
    attributes: Vec<Attribute>,
    /// Supplier-major: `cells[i][j]`.
    cells: Vec<Vec<Tfn>>,
    weights: Vec<Tfn>,
}

impl DecisionMatrix {
    pub fn new(
        suppliers: Vec<String>,
        attributes: Vec<Attribute>,
        cells: Vec<Vec<Tfn>>,
        weights: Vec<Tfn>,
    ) -> Result<Self, TopsisError> {
        if suppliers.is_empty() || attributes.is_empty() {
            return Err(TopsisError::Shape(
                "need at least one supplier and one attribute".into(),
            ));
        }
        if cells.len() != suppliers.len() {
            return Err(TopsisError::Shape(format!(
                "{} rows for {} suppliers",
                cells.len(),
                suppliers.len()
            )));
        }
        if let Some((i, row)) = cells.iter().enumerate().find(|(_, r)| r.len() != attributes.len()) {
            return Err(TopsisError::Shape(format!(
                "row {} has {} cells for {} attributes",
                suppliers[i],
                row.len(),
                attributes.len()
            )));
        }
        if weights.len() != attributes.len() {
            return Err(TopsisError::Shape(format!(
                "{} weights for {} attributes",
                weights.len(),
                attributes.len()
            )));
        }
        for (w, attr) in weights.iter().zip(&attributes) {
            if w.a() < 0.0 || w.c() > 1.0 {
                return Err(TopsisError::WeightRange(attr.id.clone()));
            }
        }
        Ok(DecisionMatrix {
            suppliers,
            attributes,
            cells,
            weights,
        })
    }

    pub fn suppliers(&self) -> &[String] {
        &self.suppliers
    }

    pub fn attributes(&self) -> &[Attribute] {
        &self.attributes
    }

    pub fn weights(&self) -> &[Tfn] {
        &self.weights
    }

    pub fn cell(&self, supplier: usize, attribute: usize) -> Tfn {
        self.cells[supplier][attribute]
    }

    pub fn rows(&self) -> &[Vec<Tfn>] {
        &self.cells
    }

    pub fn set_cell(&mut self, supplier: usize, attribute: usize, value: Tfn) {
        self.cells[supplier][attribute] = value;
    }

    /// Column subset admitted by `filter`, order preserved.
    pub fn restrict(&self, filter: GroupFilter) -> Result<DecisionMatrix, TopsisError> {
        let keep: Vec<usize> = (0..self.attributes.len())
            .filter(|&j| filter.admits(self.attributes[j].group))
            .collect();
        if keep.is_empty() {
            return Err(TopsisError::EmptyGroup(filter.to_string()));
        }
        Ok(DecisionMatrix {
            suppliers: self.suppliers.clone(),
            attributes: keep.iter().map(|&j| self.attributes[j].clone()).collect(),
            cells: self
                .cells
                .iter()
                .map(|r| keep.iter().map(|&j| r[j]).collect())
                .collect(),
            weights: keep.iter().map(|&j| self.weights[j]).collect(),
        })
    }

    fn column(&self, j: usize) -> impl Iterator<Item = Tfn> + '_ {
        self.cells.iter().map(move |r| r[j])
    }
}

/// Benefit columns are divided by their largest `c`; cost columns become
/// `(min a / c, min a / b, min a / a)`.
pub fn normalize(matrix: &DecisionMatrix) -> Result<DecisionMatrix, TopsisError> {
    let mut out = matrix.clone();
    for (j, attr) in matrix.attributes.iter().enumerate() {
        match attr.objective {
            Objective::Max => {
                let max_c = matrix.column(j).map(|t| t.c()).fold(f64::NEG_INFINITY, f64::max);
                if max_c <= 0.0 {
                    return Err(TopsisError::ZeroBenefitColumn(attr.id.clone()));
                }
                for i in 0..matrix.suppliers.len() {
                    out.cells[i][j] = matrix.cells[i][j].scale(1.0 / max_c)?;
                }
            }
            Objective::Min => {
                if let Some(i) = (0..matrix.suppliers.len()).find(|&i| matrix.cells[i][j].a() <= 0.0) {
                    return Err(TopsisError::ZeroCostCell {
                        supplier: matrix.suppliers[i].clone(),
                        attribute: attr.id.clone(),
                    });
                }
                let min_a = matrix.column(j).map(|t| t.a()).fold(f64::INFINITY, f64::min);
                for i in 0..matrix.suppliers.len() {
                    let t = matrix.cells[i][j];
                    out.cells[i][j] = Tfn::new(min_a / t.c(), min_a / t.b(), min_a / t.a())?;
                }
            }
        }
    }
    Ok(out)
}

pub fn apply_weights(matrix: &DecisionMatrix) -> Result<DecisionMatrix, TopsisError> {
    let mut out = matrix.clone();
    for row in &mut out.cells {
        for (cell, w) in row.iter_mut().zip(&matrix.weights) {
            *cell = cell.try_mul(w)?;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct IdealSolutions {
    pub pis: Vec<Tfn>,
    pub nis: Vec<Tfn>,
}

/// Crisp anchors per column: largest `c` and smallest `a`.
pub fn ideal_solutions(weighted: &DecisionMatrix) -> IdealSolutions {
    let n = weighted.attributes.len();
    let pis = (0..n)
        .map(|j| Tfn::crisp(weighted.column(j).map(|t| t.c()).fold(f64::NEG_INFINITY, f64::max)))
        .collect();
    let nis = (0..n)
        .map(|j| Tfn::crisp(weighted.column(j).map(|t| t.a()).fold(f64::INFINITY, f64::min)))
        .collect();
    IdealSolutions { pis, nis }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SupplierScore {
    pub supplier: String,
    pub d_plus: f64,
    pub d_minus: f64,
    pub closeness: f64,
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RankingResult {
    pub group: GroupFilter,
    pub variant: DistanceVariant,
    pub attributes: Vec<String>,
    pub scores: Vec<SupplierScore>,
    pub pis: Vec<Tfn>,
    pub nis: Vec<Tfn>,
    pub warnings: Vec<String>,
}

impl RankingResult {
    pub fn closeness(&self) -> Vec<f64> {
        self.scores.iter().map(|s| s.closeness).collect()
    }

    /// Closeness divided by its sum.
    pub fn normalized(&self) -> Vec<f64> {
        let total: f64 = self.scores.iter().map(|s| s.closeness).sum();
        self.scores
            .iter()
            .map(|s| {
                if total > 0.0 {
                    s.closeness / total
                } else {
                    1.0 / self.scores.len() as f64
                }
            })
            .collect()
    }

    /// Supplier ids from rank 1 downward.
    pub fn order(&self) -> Vec<&str> {
        let mut idx: Vec<&SupplierScore> = self.scores.iter().collect();
        idx.sort_by_key(|s| s.rank);
        idx.into_iter().map(|s| s.supplier.as_str()).collect()
    }

    /// `supplier,d_plus,d_minus,closeness,normalized,rank` in input order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("supplier,d_plus,d_minus,closeness,normalized,rank\n");
        for (s, n) in self.scores.iter().zip(self.normalized()) {
            out.push_str(&format!(
                "{},{:.6},{:.6},{:.6},{:.6},{}\n",
                s.supplier, s.d_plus, s.d_minus, s.closeness, n, s.rank
            ));
        }
        out
    }
}

fn distance(row: &[Tfn], anchor: &[Tfn], variant: DistanceVariant) -> f64 {
    let sq = |x: &Tfn, y: &Tfn| (x.a() - y.a()).powi(2) + (x.b() - y.b()).powi(2) + (x.c() - y.c()).powi(2);
    match variant {
        DistanceVariant::Paper => (row.iter().zip(anchor).map(|(x, y)| sq(x, y)).sum::<f64>() / 3.0).sqrt(),
        DistanceVariant::PerAttribute => row.iter().zip(anchor).map(|(x, y)| (sq(x, y) / 3.0).sqrt()).sum(),
    }
}

/// Ranks 1..n by descending value; equal values keep input order.
pub fn ranks_descending(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&x, &y| values[y].total_cmp(&values[x]));
    let mut ranks = vec![0; values.len()];
    for (r, i) in idx.into_iter().enumerate() {
        ranks[i] = r + 1;
    }
    ranks
}

pub fn closeness(weighted: &DecisionMatrix, ideal: &IdealSolutions, variant: DistanceVariant) -> RankingResult {
    let mut warnings = Vec::new();
    let single = weighted.suppliers.len() < 2;
    if single {
        warnings.push("fewer than two suppliers; closeness fixed at 0.5".to_string());
    }
    let mut scores: Vec<SupplierScore> = weighted
        .suppliers
        .iter()
        .zip(&weighted.cells)
        .map(|(id, row)| {
            let d_plus = distance(row, &ideal.pis, variant);
            let d_minus = distance(row, &ideal.nis, variant);
            let total = d_plus + d_minus;
            let closeness = if single || total == 0.0 { 0.5 } else { d_minus / total };
            SupplierScore {
                supplier: id.clone(),
                d_plus,
                d_minus,
                closeness,
                rank: 0,
            }
        })
        .collect();
    if !single && scores.iter().any(|s| s.d_plus + s.d_minus == 0.0) {
        warnings.push("supplier at both ideal anchors; closeness fixed at 0.5".to_string());
    }
    let ranks = ranks_descending(&scores.iter().map(|s| s.closeness).collect::<Vec<_>>());
    for (s, r) in scores.iter_mut().zip(ranks) {
        s.rank = r;
    }
    for w in &warnings {
        log::warn!("{w}");
    }
    RankingResult {
        group: GroupFilter::All,
        variant,
        attributes: weighted.attributes.iter().map(|a| a.id.clone()).collect(),
        scores,
        pis: ideal.pis.clone(),
        nis: ideal.nis.clone(),
        warnings,
    }
}

/// Normalize, weight, anchor and score the columns admitted by `group`.
pub fn rank(
    matrix: &DecisionMatrix,
    group: GroupFilter,
    variant: DistanceVariant,
) -> Result<RankingResult, TopsisError> {
    let sub = matrix.restrict(group)?;
    let weighted = apply_weights(&normalize(&sub)?)?;
    let ideal = ideal_solutions(&weighted);
    let mut result = closeness(&weighted, &ideal, variant);
    result.group = group;
    Ok(result)
}

/// Sum-normalized closeness of the resilience-only and cost-only rankings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ScriInputs {
    pub suppliers: Vec<String>,
    pub resilience: Vec<f64>,
    pub cost: Vec<f64>,
}

impl ScriInputs {
    pub fn from_rankings(resilience: &RankingResult, cost: &RankingResult) -> Result<Self, TopsisError> {
        let ids = |r: &RankingResult| r.scores.iter().map(|s| s.supplier.clone()).collect::<Vec<_>>();
        if ids(resilience) != ids(cost) {
            return Err(TopsisError::SupplierMismatch);
        }
        Ok(ScriInputs {
            suppliers: ids(resilience),
            resilience: resilience.normalized(),
            cost: cost.normalized(),
        })
    }

    pub fn from_matrix(matrix: &DecisionMatrix, variant: DistanceVariant) -> Result<Self, TopsisError> {
        let r = rank(matrix, GroupFilter::Resilience, variant)?;
        let c = rank(matrix, GroupFilter::Cost, variant)?;
        ScriInputs::from_rankings(&r, &c)
    }

    /// `alpha * resilience + (1 - alpha) * cost` per supplier.
    pub fn scri(&self, alpha: f64) -> Result<Vec<f64>, TopsisError> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(TopsisError::Alpha(alpha));
        }
        Ok(self
            .resilience
            .iter()
            .zip(&self.cost)
            .map(|(r, c)| alpha * r + (1.0 - alpha) * c)
            .collect())
    }

    /// Values at `alpha = k * step` strictly inside (0, 1).
    pub fn sweep(&self, step: f64) -> Result<ScriSweep, TopsisError> {
        if !(step > 0.0 && step <= 0.5) {
            return Err(TopsisError::Step(step));
        }
        let mut alphas = Vec::new();
        let mut k = 1u32;
        loop {
            let alpha = (f64::from(k) * step * 1e9).round() / 1e9;
            if alpha >= 1.0 - 1e-9 {
                break;
            }
            alphas.push(alpha);
            k += 1;
        }
        let values = alphas.iter().map(|&a| self.scri(a)).collect::<Result<Vec<_>, _>>()?;
        let argmax = values.iter().map(|v| argmax(v)).collect();
        Ok(ScriSweep {
            suppliers: self.suppliers.clone(),
            alphas,
            values,
            argmax,
        })
    }
}

/// First index of the largest value.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ScriSweep {
    pub suppliers: Vec<String>,
    pub alphas: Vec<f64>,
    /// `values[k][i]`: supplier `i` at `alphas[k]`.
    pub values: Vec<Vec<f64>>,
    pub argmax: Vec<usize>,
}

impl ScriSweep {
    /// `alpha,supplier,scri,is_argmax`, one line per (alpha, supplier).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("alpha,supplier,scri,is_argmax\n");
        for ((alpha, row), best) in self.alphas.iter().zip(&self.values).zip(&self.argmax) {
            for (i, (id, v)) in self.suppliers.iter().zip(row).enumerate() {
                out.push_str(&format!("{alpha},{id},{v:.6},{}\n", i == *best));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn attr(id: &str, objective: Objective, group: Group) -> Attribute {
        Attribute {
            id: id.into(),
            name: id.into(),
            evidence_kind: EvidenceKind::Linguistic,
            objective,
            group,
        }
    }

    fn t(a: f64, b: f64, c: f64) -> Tfn {
        Tfn::new(a, b, c).unwrap()
    }

    fn one_cell(objective: Objective, cell: Tfn) -> DecisionMatrix {
        DecisionMatrix::new(
            vec!["S1".into()],
            vec![attr("C1", objective, Group::Resilience)],
            vec![vec![cell]],
            vec![Tfn::ONE],
        )
        .unwrap()
    }

    #[test]
    fn normalization_examples() {
        let n = normalize(&one_cell(Objective::Max, t(2.0, 3.0, 4.0))).unwrap();
        assert_eq!(n.cell(0, 0), t(0.5, 0.75, 1.0));
        let n = normalize(&one_cell(Objective::Min, t(2.0, 4.0, 8.0))).unwrap();
        assert_eq!(n.cell(0, 0), t(0.25, 0.5, 1.0));
        assert!(matches!(
            normalize(&one_cell(Objective::Min, t(0.0, 4.0, 8.0))),
            Err(TopsisError::ZeroCostCell { .. })
        ));
    }

    #[test]
    fn weighting_examples() {
        let mut m = one_cell(Objective::Max, t(0.5, 0.75, 1.0));
        assert_eq!(apply_weights(&m).unwrap().cell(0, 0), t(0.5, 0.75, 1.0));
        m.weights[0] = t(0.5, 0.7, 1.0);
        let w = apply_weights(&m).unwrap().cell(0, 0);
        assert!(w.max_abs_diff(&t(0.25, 0.525, 1.0)) < 1e-12);
        m.weights[0] = Tfn::ZERO;
        assert_eq!(apply_weights(&m).unwrap().cell(0, 0), Tfn::ZERO);
    }

    #[test]
    fn weights_outside_unit_cube_rejected() {
        let r = DecisionMatrix::new(
            vec!["S1".into()],
            vec![attr("C1", Objective::Max, Group::Resilience)],
            vec![vec![Tfn::ONE]],
            vec![t(0.5, 1.0, 1.5)],
        );
        assert_eq!(r, Err(TopsisError::WeightRange("C1".into())));
    }

    #[test]
    fn single_supplier_is_flagged() {
        let r = rank(
            &one_cell(Objective::Max, t(2.0, 3.0, 4.0)),
            GroupFilter::All,
            DistanceVariant::Paper,
        )
        .unwrap();
        assert_eq!(r.scores[0].closeness, 0.5);
        assert!(!r.warnings.is_empty());
    }

    fn two_by_two() -> DecisionMatrix {
        DecisionMatrix::new(
            vec!["S1".into(), "S2".into(), "S3".into()],
            vec![
                attr("C1", Objective::Max, Group::Resilience),
                attr("C2", Objective::Min, Group::Cost),
            ],
            vec![
                vec![t(1.0, 2.0, 3.0), t(2.0, 3.0, 4.0)],
                vec![t(1.0, 2.0, 3.0), t(2.0, 3.0, 4.0)],
                vec![t(3.0, 4.0, 5.0), t(5.0, 6.0, 7.0)],
            ],
            vec![t(0.5, 0.7, 1.0), t(0.1, 0.2, 0.3)],
        )
        .unwrap()
    }

    #[test]
    fn identical_suppliers_tie_by_input_order() {
        let r = rank(&two_by_two(), GroupFilter::All, DistanceVariant::Paper).unwrap();
        assert_eq!(r.scores[0].closeness, r.scores[1].closeness);
        assert_eq!(r.scores[0].rank + 1, r.scores[1].rank);
    }

    #[test]
    fn pis_equals_weight_upper_bound() {
        let m = two_by_two();
        let r = rank(&m, GroupFilter::All, DistanceVariant::Paper).unwrap();
        for (p, w) in r.pis.iter().zip(m.weights()) {
            assert!((p.b() - w.c()).abs() < 1e-12);
        }
    }

    #[test]
    fn row_at_an_anchor() {
        let m = apply_weights(&normalize(&two_by_two()).unwrap()).unwrap();
        let ideal = ideal_solutions(&m);
        let mut best = m.clone();
        let mut worst = m.clone();
        for j in 0..2 {
            best.set_cell(0, j, ideal.pis[j]);
            worst.set_cell(0, j, ideal.nis[j]);
        }
        assert_eq!(
            closeness(&best, &ideal, DistanceVariant::Paper).scores[0].closeness,
            1.0
        );
        assert_eq!(
            closeness(&worst, &ideal, DistanceVariant::PerAttribute).scores[0].closeness,
            0.0
        );
    }

    #[test]
    fn group_restriction() {
        let m = two_by_two();
        assert_eq!(m.restrict(GroupFilter::Cost).unwrap().attributes().len(), 1);
        let r = rank(&m, GroupFilter::Resilience, DistanceVariant::Paper).unwrap();
        assert_eq!(r.attributes, vec!["C1"]);
        let only_res = DecisionMatrix::new(
            vec!["S1".into()],
            vec![attr("C1", Objective::Max, Group::Resilience)],
            vec![vec![Tfn::ONE]],
            vec![Tfn::ONE],
        )
        .unwrap();
        assert!(matches!(
            only_res.restrict(GroupFilter::Cost),
            Err(TopsisError::EmptyGroup(_))
        ));
    }

    fn inputs() -> ScriInputs {
        ScriInputs {
            suppliers: vec!["S1".into(), "S2".into(), "S3".into()],
            resilience: vec![0.5, 0.3, 0.2],
            cost: vec![0.2, 0.3, 0.5],
        }
    }

    #[test]
    fn scri_endpoints_and_errors() {
        let s = inputs();
        assert_eq!(s.scri(0.0).unwrap(), s.cost);
        assert_eq!(s.scri(1.0).unwrap(), s.resilience);
        assert_eq!(s.scri(1.5), Err(TopsisError::Alpha(1.5)));
        assert!(s.sweep(0.0).is_err());
        assert!(s.sweep(0.6).is_err());
    }

    #[test]
    fn sweep_grid_and_csv() {
        let sw = inputs().sweep(0.1).unwrap();
        assert_eq!(sw.alphas.len(), 9);
        assert_eq!(sw.alphas[2], 0.3);
        assert_eq!(sw.argmax[0], 2);
        assert_eq!(sw.argmax[8], 0);
        let csv = sw.to_csv();
        assert!(csv.starts_with("alpha,supplier,scri,is_argmax\n0.1,S1,"));
        assert_eq!(csv.lines().count(), 1 + 27);
        assert_eq!(inputs().sweep(0.5).unwrap().alphas, vec![0.5]);
    }

    #[test]
    fn variant_parsing() {
        assert_eq!(
            "per-attribute".parse::<DistanceVariant>().unwrap(),
            DistanceVariant::PerAttribute
        );
        assert_eq!(
            "per_attribute".parse::<DistanceVariant>().unwrap(),
            DistanceVariant::PerAttribute
        );
        assert!("euclid".parse::<DistanceVariant>().is_err());
        assert_eq!("Cost".parse::<GroupFilter>().unwrap(), GroupFilter::Cost);
    }

    fn tfn_strategy() -> impl Strategy<Value = Tfn> {
        (0.1f64..5.0, 0.0f64..3.0, 0.0f64..3.0).prop_map(|(a, d1, d2)| Tfn::new(a, a + d1, a + d1 + d2).unwrap())
    }

    fn matrix_strategy() -> impl Strategy<Value = DecisionMatrix> {
        (2usize..6, 1usize..5).prop_flat_map(|(n, k)| {
            (
                prop::collection::vec(prop::collection::vec(tfn_strategy(), k), n),
                prop::collection::vec(any::<bool>(), k),
                prop::collection::vec((0.0f64..0.5, 0.0f64..0.25, 0.0f64..0.25), k),
            )
                .prop_map(move |(cells, mins, w)| {
                    let attrs = mins
                        .iter()
                        .enumerate()
                        .map(|(j, m)| {
                            let obj = if *m { Objective::Min } else { Objective::Max };
                            attr(&format!("C{j}"), obj, Group::Resilience)
                        })
                        .collect();
                    let weights = w
                        .iter()
                        .map(|(a, d1, d2)| Tfn::new(*a, a + d1, a + d1 + d2).unwrap())
                        .collect();
                    DecisionMatrix::new((0..n).map(|i| format!("S{i}")).collect(), attrs, cells, weights).unwrap()
                })
        })
    }

    proptest! {
        #[test]
        fn pis_identity_and_unit_closeness(m in matrix_strategy(), paper in any::<bool>()) {
            let variant = if paper { DistanceVariant::Paper } else { DistanceVariant::PerAttribute };
            let r = rank(&m, GroupFilter::All, variant).unwrap();
            for (p, w) in r.pis.iter().zip(m.weights()) {
                prop_assert!((p.b() - w.c()).abs() < 1e-12);
            }
            for s in &r.scores {
                prop_assert!((0.0..=1.0).contains(&s.closeness));
            }
            let mut ranks: Vec<usize> = r.scores.iter().map(|s| s.rank).collect();
            ranks.sort();
            prop_assert_eq!(ranks, (1..=m.suppliers().len()).collect::<Vec<_>>());
        }

        #[test]
        fn improving_a_cell_helps_only_its_supplier(
            m in matrix_strategy(),
            who in any::<prop::sample::Index>(),
            col in any::<prop::sample::Index>(),
            frac in 0.0f64..1.0,
        ) {
            let weighted = apply_weights(&normalize(&m).unwrap()).unwrap();
            let ideal = ideal_solutions(&weighted);
            let i = who.index(m.suppliers().len());
            let j = col.index(m.attributes().len());
            let before = closeness(&weighted, &ideal, DistanceVariant::Paper);
            // move the cell toward the positive anchor, staying inside the anchors
            let x = weighted.cell(i, j);
            let top = ideal.pis[j].b();
            let lift = |v: f64| v + frac * (top - v);
            let mut better = weighted.clone();
            better.set_cell(i, j, Tfn::new(lift(x.a()), lift(x.b()), lift(x.c())).unwrap());
            let after = closeness(&better, &ideal, DistanceVariant::Paper);
            prop_assert!(after.scores[i].closeness >= before.scores[i].closeness - 1e-12);
            for k in (0..m.suppliers().len()).filter(|k| *k != i) {
                prop_assert_eq!(after.scores[k].closeness, before.scores[k].closeness);
            }
        }

        #[test]
        fn scri_sums_to_one_and_is_affine(m in matrix_strategy(), alpha in 0.0f64..=1.0) {
            let mut m = m;
            // put the first column in the cost group so both groups are populated
            m.attributes[0].group = Group::Cost;
            prop_assume!(m.attributes().len() > 1);
            let s = ScriInputs::from_matrix(&m, DistanceVariant::Paper).unwrap();
            let v = s.scri(alpha).unwrap();
            prop_assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            let (v0, v1) = (s.scri(0.0).unwrap(), s.scri(1.0).unwrap());
            for i in 0..v.len() {
                prop_assert!((v[i] - (v0[i] + alpha * (v1[i] - v0[i]))).abs() < 1e-12);
            }
            let res = rank(&m, GroupFilter::Resilience, DistanceVariant::Paper).unwrap();
            prop_assert_eq!(ranks_descending(&v1), res.scores.iter().map(|x| x.rank).collect::<Vec<_>>());
        }
    }
}
