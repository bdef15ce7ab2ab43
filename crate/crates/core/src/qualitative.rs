//! Linguistic appraisals from several decision makers to one TFN per cell.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fuzzy::{LinguisticScale, Tfn};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QualitativeError {
    #[error("unknown term `{term}` in scale {scale} at {at}")]
    UnknownTerm { term: String, scale: String, at: String },
    #[error("nothing to aggregate")]
    Empty,
    #[error("missing appraisal at {0}")]
    Missing(String),
    #[error("duplicate appraisal at {0}")]
    Duplicate(String),
    #[error("decision-maker weights must be nonnegative with a positive sum")]
    BadDmWeights,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Appraisal {
    pub supplier: String,
    pub attribute: String,
    pub dm: String,
    pub term: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightJudgment {
    pub attribute: String,
    pub dm: String,
    pub term: String,
}

pub fn term_to_tfn(term: &str, scale: &LinguisticScale, at: &str) -> Result<Tfn, QualitativeError> {
    scale.get(term).ok_or_else(|| QualitativeError::UnknownTerm {
        term: term.to_string(),
        scale: scale.name().to_string(),
        at: at.to_string(),
    })
}

/// `(min a, mean b, max c)`.
pub fn aggregate_dms(tfns: &[Tfn]) -> Result<Tfn, QualitativeError> {
    let equal: Vec<(Tfn, f64)> = tfns.iter().map(|t| (*t, 1.0)).collect();
    aggregate_weighted(&equal)
}

/// As [`aggregate_dms`] but with a weighted mean of the peaks. The bounds stay
/// min/max over every DM with a positive weight.
pub fn aggregate_weighted(tfns: &[(Tfn, f64)]) -> Result<Tfn, QualitativeError> {
    if tfns.is_empty() {
        return Err(QualitativeError::Empty);
    }
    if tfns.iter().any(|(_, w)| !(*w >= 0.0 && w.is_finite())) {
        return Err(QualitativeError::BadDmWeights);
    }
    let total: f64 = tfns.iter().map(|(_, w)| w).sum();
    if total <= 0.0 {
        return Err(QualitativeError::BadDmWeights);
    }
    let live = tfns.iter().filter(|(_, w)| *w > 0.0);
    let a = live.clone().map(|(t, _)| t.a()).fold(f64::INFINITY, f64::min);
    let c = live.clone().map(|(t, _)| t.c()).fold(f64::NEG_INFINITY, f64::max);
    let b = live.map(|(t, w)| t.b() * w).sum::<f64>() / total;
    Ok(Tfn::new(a, b.clamp(a, c), c).expect("min <= mean <= max"))
}

/// One TFN for `(supplier, attribute)` from exactly one appraisal per DM.
pub fn build_qualitative_tfn(
    supplier: &str,
    attribute: &str,
    appraisals: &[Appraisal],
    dms: &[String],
    scale: &LinguisticScale,
) -> Result<Tfn, QualitativeError> {
    let mut tfns = Vec::with_capacity(dms.len());
    for dm in dms {
        let at = format!("({supplier}, {attribute}, {dm})");
        let mut hits = appraisals
            .iter()
            .filter(|x| x.supplier == supplier && x.attribute == attribute && &x.dm == dm);
        let first = hits.next().ok_or_else(|| QualitativeError::Missing(at.clone()))?;
        if hits.next().is_some() {
            return Err(QualitativeError::Duplicate(at));
        }
        tfns.push(term_to_tfn(&first.term, scale, &at)?);
    }
    aggregate_dms(&tfns)
}

/// Aggregated importance of `attribute` over all DMs.
pub fn build_weight_tfn(
    attribute: &str,
    judgments: &[WeightJudgment],
    dms: &[String],
    scale: &LinguisticScale,
) -> Result<Tfn, QualitativeError> {
    let mut tfns = Vec::with_capacity(dms.len());
    for dm in dms {
        let at = format!("(weight, {attribute}, {dm})");
        let mut hits = judgments.iter().filter(|x| x.attribute == attribute && &x.dm == dm);
        let first = hits.next().ok_or_else(|| QualitativeError::Missing(at.clone()))?;
        if hits.next().is_some() {
            return Err(QualitativeError::Duplicate(at));
        }
        tfns.push(term_to_tfn(&first.term, scale, &at)?);
    }
    aggregate_dms(&tfns)
}
