//! Evidence to ranking to allocation, keeping every intermediate for audit.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::Dataset;
use crate::fuzzy::{Frame, Tfn};
use crate::goal::{solve_allocation, AllocationPlan, McgpModel};
use crate::granular::{self, Extraction, RangeSet, ReliabilityReport};
use crate::qualitative;
use crate::temporal::{induce_tfn, Induction, TimeSeries};
use crate::topsis::{self, DecisionMatrix, EvidenceKind, GroupFilter, RankingResult, ScriInputs, ScriSweep};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Evidence,
    Qualitative,
    Ranking,
    Allocation,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Evidence => "evidence",
            Stage::Qualitative => "qualitative",
            Stage::Ranking => "ranking",
            Stage::Allocation => "allocation",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{stage} stage failed at {at}: {message}")]
pub struct PipelineError {
    pub stage: Stage,
    pub at: String,
    pub message: String,
}

fn fail(stage: Stage, at: impl Into<String>, e: impl fmt::Display) -> PipelineError {
    PipelineError {
        stage,
        at: at.into(),
        message: e.to_string(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CellSource {
    Override,
    Temporal,
    Granular,
    Linguistic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub supplier: String,
    pub attribute: String,
    pub tfn: Tfn,
    pub source: CellSource,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemporalAudit {
    pub supplier: String,
    pub attribute: String,
    pub induction: Induction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GranularCell {
    pub supplier: String,
    pub extraction: Extraction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GranularAudit {
    pub attribute: String,
    pub frame: Frame,
    pub reliability: Option<ReliabilityReport>,
    pub cells: Vec<GranularCell>,
}

/// Step 1: numeric evidence (series and ranges, or overrides).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvidenceArtifacts {
    pub cells: Vec<Cell>,
    pub temporal: Vec<TemporalAudit>,
    pub granular: Vec<GranularAudit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeWeight {
    pub attribute: String,
    pub tfn: Tfn,
}

/// Step 2: appraisal cells and attribute weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualitativeArtifacts {
    pub cells: Vec<Cell>,
    pub weights: Vec<AttributeWeight>,
}

/// Step 3.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RankingArtifacts {
    pub matrix: DecisionMatrix,
    pub all: RankingResult,
    pub resilience: Option<RankingResult>,
    pub cost: Option<RankingResult>,
    pub scri: Option<ScriSweep>,
}

impl RankingArtifacts {
    pub fn group(&self, filter: GroupFilter) -> Option<&RankingResult> {
        match filter {
            GroupFilter::All => Some(&self.all),
            GroupFilter::Resilience => self.resilience.as_ref(),
            GroupFilter::Cost => self.cost.as_ref(),
        }
    }

    pub fn scri_inputs(&self) -> Option<ScriInputs> {
        match (&self.resilience, &self.cost) {
            (Some(r), Some(c)) => ScriInputs::from_rankings(r, c).ok(),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Artifacts {
    pub evidence: EvidenceArtifacts,
    pub qualitative: QualitativeArtifacts,
    pub ranking: RankingArtifacts,
    /// Step 4; absent when the dataset has no goal-program parameters.
    pub allocation: Option<AllocationPlan>,
    pub warnings: Vec<String>,
}

fn use_raw(ds: &Dataset, supplier: &str, attribute: &str, has_raw: bool) -> bool {
    let has_override = ds.override_for(supplier, attribute).is_some();
    has_raw && (ds.config().from_raw || !has_override)
}

fn override_cell(ds: &Dataset, supplier: &str, attribute: &str) -> Result<Cell, PipelineError> {
    let at = format!("({supplier}, {attribute})");
    let o = ds
        .override_for(supplier, attribute)
        .ok_or_else(|| fail(Stage::Evidence, &at, "no evidence and no override"))?;
    let tfn = o
        .tfn()
        .ok_or_else(|| fail(Stage::Evidence, &at, "override is not an ordered TFN"))?;
    Ok(Cell {
        supplier: supplier.into(),
        attribute: attribute.into(),
        tfn,
        source: CellSource::Override,
    })
}

pub fn run_evidence(ds: &Dataset) -> Result<EvidenceArtifacts, PipelineError> {
    let cfg = ds.config();
    let mut cells = Vec::new();
    let mut temporal = Vec::new();
    let mut granular_audits = Vec::new();

    for attr in ds
        .attributes
        .iter()
        .filter(|a| a.evidence_kind == EvidenceKind::Temporal)
    {
        for s in &ds.suppliers {
            let values = ds.series_for(&s.id, &attr.id);
            if !use_raw(ds, &s.id, &attr.id, !values.is_empty()) {
                cells.push(override_cell(ds, &s.id, &attr.id)?);
                continue;
            }
            let at = format!("({}, {})", s.id, attr.id);
            let series = TimeSeries::new(values).map_err(|e| fail(Stage::Evidence, &at, e))?;
            let induction = induce_tfn(&series, &cfg.induction).map_err(|e| fail(Stage::Evidence, &at, e))?;
            cells.push(Cell {
                supplier: s.id.clone(),
                attribute: attr.id.clone(),
                tfn: induction.tfn,
                source: CellSource::Temporal,
            });
            temporal.push(TemporalAudit {
                supplier: s.id.clone(),
                attribute: attr.id.clone(),
                induction,
            });
        }
    }

    // One frame per granular attribute over all of its ranges; reliability is
    // normalized across the attributes that go through extraction.
    let mut pending = Vec::new();
    for attr in ds
        .attributes
        .iter()
        .filter(|a| a.evidence_kind == EvidenceKind::Granular)
    {
        let mut sets = Vec::new();
        for s in &ds.suppliers {
            let ranges = ds.ranges_for(&s.id, &attr.id);
            if use_raw(ds, &s.id, &attr.id, !ranges.is_empty()) {
                let at = format!("({}, {})", s.id, attr.id);
                sets.push((
                    s.id.clone(),
                    RangeSet::new(ranges).map_err(|e| fail(Stage::Evidence, &at, e))?,
                ));
            } else {
                cells.push(override_cell(ds, &s.id, &attr.id)?);
            }
        }
        if sets.is_empty() {
            continue;
        }
        let all: Vec<(f64, f64)> = ds
            .ranges
            .iter()
            .filter(|r| r.attribute == attr.id)
            .map(|r| (r.p, r.q))
            .collect();
        let lo = all.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
        let hi = all.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);
        let frame = Frame::fuzzify(lo, hi, cfg.frame_classes).map_err(|e| fail(Stage::Evidence, &attr.id, e))?;
        pending.push((attr.id.clone(), frame, sets));
    }
    let reports = if cfg.reliability.enabled && !pending.is_empty() {
        let inputs: Vec<(&Frame, Vec<f64>)> = pending
            .iter()
            .enumerate()
            .map(|(k, (_, frame, sets))| {
                let refs: Vec<&RangeSet> = sets.iter().map(|(_, r)| r).collect();
                (frame, granular::test_samples(frame, &refs, &cfg.reliability, k as u64))
            })
            .collect();
        let reports = granular::reliability_reports(&inputs).map_err(|e| fail(Stage::Evidence, "reliability", e))?;
        reports.into_iter().map(Some).collect()
    } else {
        vec![None; pending.len()]
    };
    for ((attribute, frame, sets), reliability) in pending.into_iter().zip(reports) {
        let r_star = reliability.as_ref().map(|r| r.normalized);
        let mut audit_cells = Vec::new();
        for (supplier, set) in sets {
            let at = format!("({supplier}, {attribute})");
            let extraction = granular::extract(&frame, &set, r_star).map_err(|e| fail(Stage::Evidence, &at, e))?;
            cells.push(Cell {
                supplier: supplier.clone(),
                attribute: attribute.clone(),
                tfn: extraction.tfn,
                source: CellSource::Granular,
            });
            audit_cells.push(GranularCell { supplier, extraction });
        }
        granular_audits.push(GranularAudit {
            attribute,
            frame,
            reliability,
            cells: audit_cells,
        });
    }
    Ok(EvidenceArtifacts {
        cells,
        temporal,
        granular: granular_audits,
    })
}

pub fn run_qualitative(ds: &Dataset) -> Result<QualitativeArtifacts, PipelineError> {
    let cfg = ds.config();
    let perf = cfg.performance();
    let weight_scale = cfg.weight();
    let mut cells = Vec::new();
    for attr in ds
        .attributes
        .iter()
        .filter(|a| a.evidence_kind == EvidenceKind::Linguistic)
    {
        for s in &ds.suppliers {
            let tfn = qualitative::build_qualitative_tfn(&s.id, &attr.id, &ds.appraisals, ds.dms(), &perf)
                .map_err(|e| fail(Stage::Qualitative, format!("({}, {})", s.id, attr.id), e))?;
            cells.push(Cell {
                supplier: s.id.clone(),
                attribute: attr.id.clone(),
                tfn,
                source: CellSource::Linguistic,
            });
        }
    }
    let weights = ds
        .attributes
        .iter()
        .map(|attr| {
            qualitative::build_weight_tfn(&attr.id, &ds.weights, ds.dms(), &weight_scale)
                .map(|tfn| AttributeWeight {
                    attribute: attr.id.clone(),
                    tfn,
                })
                .map_err(|e| fail(Stage::Qualitative, format!("(weight, {})", attr.id), e))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(QualitativeArtifacts { cells, weights })
}

pub fn decision_matrix(
    ds: &Dataset,
    evidence: &EvidenceArtifacts,
    qualitative: &QualitativeArtifacts,
) -> Result<DecisionMatrix, PipelineError> {
    let all_cells: Vec<&Cell> = evidence.cells.iter().chain(&qualitative.cells).collect();
    let mut rows = Vec::with_capacity(ds.suppliers.len());
    for s in &ds.suppliers {
        let mut row = Vec::with_capacity(ds.attributes.len());
        for attr in &ds.attributes {
            let cell = all_cells
                .iter()
                .find(|c| c.supplier == s.id && c.attribute == attr.id)
                .ok_or_else(|| fail(Stage::Ranking, format!("({}, {})", s.id, attr.id), "no TFN for cell"))?;
            row.push(cell.tfn);
        }
        rows.push(row);
    }
    let weights = ds
        .attributes
        .iter()
        .map(|attr| {
            qualitative
                .weights
                .iter()
                .find(|w| w.attribute == attr.id)
                .map(|w| w.tfn)
                .ok_or_else(|| fail(Stage::Ranking, format!("(weight, {})", attr.id), "no weight"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    DecisionMatrix::new(ds.supplier_ids(), ds.attributes.clone(), rows, weights)
        .map_err(|e| fail(Stage::Ranking, "decision matrix", e))
}

pub fn run_ranking(
    ds: &Dataset,
    evidence: &EvidenceArtifacts,
    qualitative: &QualitativeArtifacts,
) -> Result<RankingArtifacts, PipelineError> {
    let matrix = decision_matrix(ds, evidence, qualitative)?;
    let variant = ds.config().distance_variant;
    let all = topsis::rank(&matrix, GroupFilter::All, variant).map_err(|e| fail(Stage::Ranking, "all", e))?;
    let group = |filter: GroupFilter| match matrix.restrict(filter) {
        Ok(_) => topsis::rank(&matrix, filter, variant)
            .map(Some)
            .map_err(|e| fail(Stage::Ranking, filter.to_string(), e)),
        Err(_) => Ok(None),
    };
    let resilience = group(GroupFilter::Resilience)?;
    let cost = group(GroupFilter::Cost)?;
    let scri = match (&resilience, &cost) {
        (Some(r), Some(c)) => {
            let inputs = ScriInputs::from_rankings(r, c).map_err(|e| fail(Stage::Ranking, "scri", e))?;
            Some(
                inputs
                    .sweep(ds.config().scri_step)
                    .map_err(|e| fail(Stage::Ranking, "scri", e))?,
            )
        }
        _ => None,
    };
    Ok(RankingArtifacts {
        matrix,
        all,
        resilience,
        cost,
        scri,
    })
}

/// The dataset's goal program with missing coefficients filled from the
/// full ranking.
pub fn allocation_model(ds: &Dataset, ranking: &RankingArtifacts) -> Option<McgpModel> {
    let closeness: Vec<(String, f64)> = ranking
        .all
        .scores
        .iter()
        .map(|s| (s.supplier.clone(), s.closeness))
        .collect();
    ds.mcgp.as_ref().map(|m| m.with_closeness(&closeness))
}

pub fn run_allocation(ds: &Dataset, ranking: &RankingArtifacts) -> Result<Option<AllocationPlan>, PipelineError> {
    match allocation_model(ds, ranking) {
        None => Ok(None),
        Some(model) => solve_allocation(&model, &ds.config().allocation)
            .map(Some)
            .map_err(|e| fail(Stage::Allocation, "goal program", e)),
    }
}

fn collect_warnings(a: &Artifacts) -> Vec<String> {
    let mut out = Vec::new();
    for t in &a.evidence.temporal {
        if let Some(w) = &t.induction.warning {
            out.push(format!("({}, {}): {w}", t.supplier, t.attribute));
        }
    }
    for r in [
        Some(&a.ranking.all),
        a.ranking.resilience.as_ref(),
        a.ranking.cost.as_ref(),
    ]
    .into_iter()
    .flatten()
    {
        out.extend(r.warnings.iter().map(|w| format!("{} ranking: {w}", r.group)));
    }
    if let Some(p) = &a.allocation {
        out.extend(p.warnings.iter().map(|w| format!("allocation: {w}")));
    }
    out
}

impl Artifacts {
    pub fn compute(ds: &Dataset) -> Result<Artifacts, PipelineError> {
        let evidence = run_evidence(ds)?;
        let qualitative = run_qualitative(ds)?;
        Artifacts::downstream(ds, evidence, qualitative)
    }

    fn downstream(
        ds: &Dataset,
        evidence: EvidenceArtifacts,
        qualitative: QualitativeArtifacts,
    ) -> Result<Artifacts, PipelineError> {
        let ranking = run_ranking(ds, &evidence, &qualitative)?;
        let allocation = run_allocation(ds, &ranking)?;
        let mut out = Artifacts {
            evidence,
            qualitative,
            ranking,
            allocation,
            warnings: Vec::new(),
        };
        out.warnings = collect_warnings(&out);
        Ok(out)
    }

    /// Reruns `from` and every later stage, reusing earlier ones from `self`.
    pub fn recompute(&self, ds: &Dataset, from: Stage) -> Result<Artifacts, PipelineError> {
        match from {
            Stage::Evidence => Artifacts::compute(ds),
            Stage::Qualitative => Artifacts::downstream(ds, self.evidence.clone(), run_qualitative(ds)?),
            Stage::Ranking => Artifacts::downstream(ds, self.evidence.clone(), self.qualitative.clone()),
            Stage::Allocation => {
                let mut out = self.clone();
                out.allocation = run_allocation(ds, &out.ranking)?;
                out.warnings = collect_warnings(&out);
                Ok(out)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{Manifest, Supplier, TfnOverride};
    use crate::fixtures;
    use crate::qualitative::{Appraisal, WeightJudgment};
    use crate::topsis::{Attribute, Group, Objective};

    #[test]
    fn paper_case_order() {
        let a = Artifacts::compute(&fixtures::paper_case()).unwrap();
        assert_eq!(a.ranking.all.order(), ["S3", "S2", "S1", "S4", "S5"]);
        assert!(a.evidence.cells.iter().all(|c| c.source == CellSource::Override));
        assert_eq!(a.qualitative.cells.len(), 5 * 15);
        assert!(a.ranking.scri.is_some());
        assert!(a.allocation.is_some());
    }

    #[test]
    fn raw_evidence_path() {
        let mut ds = fixtures::paper_case();
        ds.manifest.config.from_raw = true;
        let a = Artifacts::compute(&ds).unwrap();
        assert_eq!(a.evidence.temporal.len(), 10);
        assert_eq!(a.evidence.granular.len(), 2);
        let c3 = &a.evidence.granular[0];
        assert_eq!((c3.frame.lo(), c3.frame.hi()), (58.0, 158.0));
        assert!(c3.reliability.is_some());
        assert_eq!(a.ranking.all.order()[0], "S3");
    }

    #[test]
    fn injected_stage_matches_computed() {
        let mut ds = fixtures::paper_case();
        ds.manifest.config.from_raw = true;
        let computed = Artifacts::compute(&ds).unwrap();
        let mut injected = ds.clone();
        injected.series.clear();
        injected.ranges.clear();
        injected.overrides = computed
            .evidence
            .cells
            .iter()
            .map(|c| TfnOverride {
                supplier: c.supplier.clone(),
                attribute: c.attribute.clone(),
                a: c.tfn.a(),
                b: c.tfn.b(),
                c: c.tfn.c(),
            })
            .collect();
        let bypassed = Artifacts::compute(&injected).unwrap();
        assert_eq!(bypassed.qualitative, computed.qualitative);
        assert_eq!(bypassed.ranking, computed.ranking);
        assert_eq!(bypassed.allocation, computed.allocation);
    }

    #[test]
    fn staged_recompute_equals_full_run() {
        let ds = fixtures::paper_case();
        let before = Artifacts::compute(&ds).unwrap();
        let mut edited = ds.clone();
        let cell = edited
            .appraisals
            .iter_mut()
            .find(|x| x.supplier == "S5" && x.attribute == "C5" && x.dm == "DM5")
            .unwrap();
        assert_eq!(cell.term, "MB");
        cell.term = "M".into();
        let staged = before.recompute(&edited, Stage::Qualitative).unwrap();
        assert_eq!(staged, Artifacts::compute(&edited).unwrap());
        let s5c5 = staged
            .qualitative
            .cells
            .iter()
            .find(|c| c.supplier == "S5" && c.attribute == "C5")
            .unwrap();
        assert_eq!(s5c5.tfn.a(), 3.0);
    }

    #[test]
    fn single_cell_is_flagged() {
        let one = |s: &str| s.to_string();
        let ds = Dataset {
            manifest: Manifest {
                schema_version: 1,
                name: one("tiny"),
                decision_makers: vec![one("DM1")],
                config: Default::default(),
            },
            suppliers: vec![Supplier {
                id: one("S1"),
                name: one("only"),
            }],
            attributes: vec![Attribute {
                id: one("C1"),
                name: one("quality"),
                evidence_kind: EvidenceKind::Linguistic,
                objective: Objective::Max,
                group: Group::Resilience,
            }],
            appraisals: vec![Appraisal {
                supplier: one("S1"),
                attribute: one("C1"),
                dm: one("DM1"),
                term: one("G"),
            }],
            weights: vec![WeightJudgment {
                attribute: one("C1"),
                dm: one("DM1"),
                term: one("I"),
            }],
            ranges: vec![],
            series: vec![],
            overrides: vec![],
            mcgp: None,
        };
        assert_eq!(ds.validate(), vec![]);
        let a = Artifacts::compute(&ds).unwrap();
        assert_eq!(a.ranking.all.scores[0].closeness, 0.5);
        assert!(!a.warnings.is_empty());
        assert!(a.ranking.cost.is_none() && a.ranking.scri.is_none() && a.allocation.is_none());
    }

    #[test]
    fn stage_errors_carry_coordinates() {
        let mut ds = fixtures::paper_case();
        ds.appraisals
            .retain(|x| !(x.supplier == "S3" && x.attribute == "C12" && x.dm == "DM4"));
        let e = Artifacts::compute(&ds).unwrap_err();
        assert_eq!(e.stage, Stage::Qualitative);
        assert_eq!(e.at, "(S3, C12)");
        assert!(e.message.contains("(S3, C12, DM4)"));
    }
}
