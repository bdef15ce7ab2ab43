//! Seeded synthetic datasets for tests, demos and load checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Triangular};

use crate::dataset::{Dataset, Manifest, PipelineConfig, RangeRow, SeriesRow, Supplier, SCHEMA_VERSION};
use crate::fixtures;
use crate::fuzzy::{LinguisticScale, Tfn};
use crate::goal::{Aspiration, GoalWeights, Goals, McgpModel, McgpSupplier};
use crate::qualitative::{Appraisal, WeightJudgment};
use crate::topsis::EvidenceKind;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` draws from the triangular distribution with support `[a, c]` and mode `b`.
pub fn triangular_series<R: Rng>(params: Tfn, n: usize, rng: &mut R) -> Vec<f64> {
    if params.is_crisp() {
        return vec![params.b(); n];
    }
    let dist = Triangular::new(params.a(), params.c(), params.b()).expect("ordered TFN");
    dist.sample_iter(rng).take(n).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthConfig {
    pub suppliers: usize,
    pub decision_makers: usize,
    pub series_len: usize,
    pub ranges: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            suppliers: 5,
            decision_makers: 5,
            series_len: 365,
            ranges: 10,
            seed: 42,
        }
    }
}

fn tri(lo: f64, peak: f64, hi: f64) -> Tfn {
    let round = |v: f64| (v * 100.0).round() / 100.0;
    Tfn::new(round(lo), round(peak), round(hi)).expect("ordered draw")
}

/// Ranges scattered around a centre: every bound moves by up to `jitter`.
fn ranges_around<R: Rng>(rng: &mut R, lo: f64, hi: f64, jitter: f64, count: usize) -> Vec<(f64, f64)> {
    (0..count)
        .map(|_| {
            let p = (lo + rng.random_range(-jitter..=jitter)).round();
            let q = (hi + rng.random_range(-jitter..=jitter)).round();
            (p.min(q), p.max(q))
        })
        .collect()
}

/// A complete raw-evidence bundle on the 19-attribute schema of the bundled
/// case. Suppliers get a latent quality that drives every attribute.
pub fn synth_dataset(cfg: &SynthConfig) -> Dataset {
    let mut rng = rng(cfg.seed);
    let attributes = fixtures::paper_case().attributes;
    let dms: Vec<String> = (1..=cfg.decision_makers).map(|i| format!("DM{i}")).collect();
    let perf = LinguisticScale::performance();
    let weight = LinguisticScale::weight();
    let perf_terms: Vec<String> = perf.terms().map(str::to_string).collect();
    let weight_terms: Vec<String> = weight.terms().map(str::to_string).collect();

    let mut suppliers = Vec::new();
    let mut series = Vec::new();
    let mut ranges = Vec::new();
    let mut appraisals = Vec::new();
    let mut mcgp = Vec::new();
    for k in 1..=cfg.suppliers {
        let id = format!("S{k}");
        let quality: f64 = rng.random();
        suppliers.push(Supplier {
            id: id.clone(),
            name: format!("Supplier {k}"),
        });
        let mut lead_peak = 0.0;
        for attr in &attributes {
            let good = if attr.objective == crate::topsis::Objective::Max {
                quality
            } else {
                1.0 - quality
            };
            match attr.evidence_kind {
                EvidenceKind::Temporal => {
                    // inventory around 400..480 units, lead time around 6..18 days
                    let (base, spread, width) = if attr.id == "C1" {
                        (400.0, 60.0, 40.0)
                    } else {
                        (6.0, 8.0, 7.0)
                    };
                    let peak = base + spread * good + rng.random_range(0.0..width / 4.0);
                    let left = width * rng.random_range(0.3..0.6);
                    let params = tri(peak - left, peak, peak - left + width);
                    if attr.id == "C2" {
                        lead_peak = params.b();
                    }
                    for (t, value) in triangular_series(params, cfg.series_len, &mut rng)
                        .into_iter()
                        .enumerate()
                    {
                        series.push(SeriesRow {
                            supplier: id.clone(),
                            attribute: attr.id.clone(),
                            t: t + 1,
                            value: (value * 100.0).round() / 100.0,
                        });
                    }
                }
                EvidenceKind::Granular => {
                    let (lo, hi) = if attr.id == "C3" {
                        let c = 60.0 + 80.0 * good;
                        (c, c + rng.random_range(15.0..35.0))
                    } else {
                        let c = 270.0 + 130.0 * good;
                        (c, c + rng.random_range(80.0..160.0))
                    };
                    for (i, (p, q)) in ranges_around(&mut rng, lo, hi, 6.0, cfg.ranges).into_iter().enumerate() {
                        ranges.push(RangeRow {
                            supplier: id.clone(),
                            attribute: attr.id.clone(),
                            range_index: i + 1,
                            p,
                            q,
                        });
                    }
                }
                EvidenceKind::Linguistic => {
                    let centre = 2.0 + 6.0 * good;
                    for dm in &dms {
                        let idx = (centre + rng.random_range(-1.5..1.5)).round().clamp(0.0, 8.0) as usize;
                        appraisals.push(Appraisal {
                            supplier: id.clone(),
                            attribute: attr.id.clone(),
                            dm: dm.clone(),
                            term: perf_terms[idx].clone(),
                        });
                    }
                }
            }
        }
        mcgp.push(McgpSupplier {
            id,
            coeff: None,
            unit_cost: (500.0 + 500.0 * rng.random::<f64>()).round(),
            lead_time: lead_peak,
        });
    }

    let weights = attributes
        .iter()
        .flat_map(|a| {
            dms.iter()
                .map(|dm| WeightJudgment {
                    attribute: a.id.clone(),
                    dm: dm.clone(),
                    term: weight_terms[rng.random_range(2..weight_terms.len())].clone(),
                })
                .collect::<Vec<_>>()
        })
        .collect();

    let quantity = 500.0;
    let mean_cost = mcgp.iter().map(|s| s.unit_cost).sum::<f64>() / mcgp.len().max(1) as f64;
    let min_lead = mcgp.iter().map(|s| s.lead_time).fold(f64::INFINITY, f64::min);
    let budget = (mean_cost * quantity / 1000.0).round() * 1000.0;
    let lead = min_lead.ceil();
    let model = McgpModel {
        suppliers: mcgp,
        goals: Goals {
            tvp_floor: 0.45 * quantity,
            budget: Aspiration {
                anchor: budget,
                min: (0.8 * budget).round(),
                max: (1.2 * budget).round(),
            },
            lead: Aspiration {
                anchor: lead,
                min: lead,
                max: lead + 2.0,
            },
            quantity,
        },
        weights: GoalWeights::default(),
        reference_plan: None,
    };

    Dataset {
        manifest: Manifest {
            schema_version: SCHEMA_VERSION,
            name: format!("synth-{}", cfg.seed),
            decision_makers: dms,
            config: PipelineConfig {
                from_raw: true,
                ..PipelineConfig::default()
            },
        },
        suppliers,
        attributes,
        appraisals,
        weights,
        ranges,
        series,
        overrides: Vec::new(),
        mcgp: Some(model),
    }
}

/// Series drawn from the published C1/C2 TFNs of the bundled case.
pub fn case_series(n: usize, seed: u64) -> Vec<SeriesRow> {
    let mut rng = rng(seed);
    let mut out = Vec::new();
    for o in fixtures::paper_case()
        .overrides
        .iter()
        .filter(|o| o.attribute == "C1" || o.attribute == "C2")
    {
        let params = o.tfn().expect("fixture TFN");
        for (t, value) in triangular_series(params, n, &mut rng).into_iter().enumerate() {
            out.push(SeriesRow {
                supplier: o.supplier.clone(),
                attribute: o.attribute.clone(),
                t: t + 1,
                value: (value * 100.0).round() / 100.0,
            });
        }
    }
    out
}
