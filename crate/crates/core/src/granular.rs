//! Crisp granular ranges to an integrated TFN.
//!
//! Each range `[p, q]` gets a membership degree per frame class (mean class
//! membership over the part of the range inside the class support). Degrees
//! are optionally scaled by a per-attribute reliability factor, summed over
//! the ranges, normalized to unit mass and used as convex weights on the
//! classes' representative TFNs.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Uniform};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fuzzy::{edge_crossing, Frame, FuzzyError, Tfn};

/// Minimum trapezoid panels per overlap region.
const SIMILARITY_PANELS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GranularError {
    #[error("range [{p}, {q}] is reversed")]
    ReversedRange { p: f64, q: f64 },
    #[error("range bound is not finite")]
    NonFinite,
    #[error("no ranges given")]
    NoRanges,
    #[error("membership rows disagree on class count ({0} vs {1})")]
    ClassCountMismatch(usize, usize),
    #[error("ranges carry no membership mass")]
    NoMass,
    #[error("reliability factor must be in (0, 1], got {0}")]
    Reliability(f64),
    #[error("expected a {expected:?} row, got {got:?}")]
    Stage {
        expected: MembershipStage,
        got: MembershipStage,
    },
    #[error("no test samples")]
    NoTestSamples,
    #[error(transparent)]
    Fuzzy(#[from] FuzzyError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RangeSet(Vec<(f64, f64)>);

impl RangeSet {
    pub fn new(ranges: Vec<(f64, f64)>) -> Result<Self, GranularError> {
        if ranges.is_empty() {
            return Err(GranularError::NoRanges);
        }
        for &(p, q) in &ranges {
            if !(p.is_finite() && q.is_finite()) {
                return Err(GranularError::NonFinite);
            }
            if p > q {
                return Err(GranularError::ReversedRange { p, q });
            }
        }
        Ok(RangeSet(ranges))
    }

    pub fn ranges(&self) -> &[(f64, f64)] {
        &self.0
    }

    pub fn min(&self) -> f64 {
        self.0.iter().map(|r| r.0).fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.0.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn midpoints(&self) -> impl Iterator<Item = f64> + '_ {
        self.0.iter().map(|(p, q)| 0.5 * (p + q))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum MembershipStage {
    Raw,
    ReliabilityModified,
    Aggregated,
    Normalized,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MembershipRow {
    pub per_class: Vec<f64>,
    pub stage: MembershipStage,
}

impl MembershipRow {
    pub fn raw(per_class: Vec<f64>) -> Self {
        MembershipRow {
            per_class,
            stage: MembershipStage::Raw,
        }
    }

    pub fn total(&self) -> f64 {
        self.per_class.iter().sum()
    }
}

/// Mean membership of class `class` over `range ∩ support(class)`.
///
/// Empty intersections give 0; a point range gives the point membership.
pub fn range_membership(frame: &Frame, class: usize, range: (f64, f64)) -> Result<f64, GranularError> {
    let (p, q) = range;
    if p > q {
        return Err(GranularError::ReversedRange { p, q });
    }
    let shape = frame.class(class)?.shape;
    if p == q {
        return Ok(shape.membership(p));
    }
    let lo = p.max(shape.a());
    let hi = q.min(shape.c());
    if hi <= lo {
        return Ok(0.0);
    }
    Ok(shape.membership_integral(lo, hi) / (hi - lo))
}

pub fn raw_memberships(frame: &Frame, range: (f64, f64)) -> Result<MembershipRow, GranularError> {
    let per_class = (0..frame.class_count())
        .map(|k| range_membership(frame, k, range))
        .collect::<Result<_, _>>()?;
    Ok(MembershipRow::raw(per_class))
}

/// Overlap similarity of two triangular membership functions: the area of
/// their pointwise minimum over the area of their union.
pub fn class_similarity(x: &Tfn, y: &Tfn) -> f64 {
    let lo = x.a().max(y.a());
    let hi = x.c().min(y.c());
    let overlap = if hi > lo { integrate_min(x, y, lo, hi) } else { 0.0 };
    let union = x.area() + y.area() - overlap;
    if union <= 0.0 {
        return if x == y { 1.0 } else { 0.0 };
    }
    overlap / union
}

fn edges(t: &Tfn) -> Vec<(f64, f64)> {
    // lines as (slope, intercept)
    let mut out = Vec::new();
    if t.b() > t.a() {
        let s = 1.0 / (t.b() - t.a());
        out.push((s, -s * t.a()));
    }
    if t.c() > t.b() {
        let s = -1.0 / (t.c() - t.b());
        out.push((s, -s * t.c()));
    }
    out
}

fn integrate_min(x: &Tfn, y: &Tfn, lo: f64, hi: f64) -> f64 {
    let mut knots = vec![lo, hi];
    for v in [x.b(), y.b()] {
        if v > lo && v < hi {
            knots.push(v);
        }
    }
    for (s1, i1) in edges(x) {
        for (s2, i2) in edges(y) {
            if s1 != s2 {
                let v = (i2 - i1) / (s1 - s2);
                if v > lo && v < hi {
                    knots.push(v);
                }
            }
        }
    }
    knots.sort_by(f64::total_cmp);
    knots.dedup();
    let f = |t: f64| x.membership(t).min(y.membership(t));
    let total = hi - lo;
    knots
        .windows(2)
        .map(|w| {
            let len = w[1] - w[0];
            let panels = ((SIMILARITY_PANELS as f64 * len / total).ceil() as usize).max(1);
            let h = len / panels as f64;
            (0..panels)
                .map(|i| {
                    let t0 = w[0] + i as f64 * h;
                    0.5 * h * (f(t0) + f(t0 + h))
                })
                .sum::<f64>()
        })
        .sum()
}

/// Sum over adjacent class pairs of `1 - similarity`.
pub fn static_reliability(frame: &Frame) -> f64 {
    frame
        .classes()
        .windows(2)
        .map(|w| 1.0 - class_similarity(&w[0].shape, &w[1].shape))
        .sum()
}

/// `exp` of the summed risk distances `|T - P| / D` over adjacent-pair
/// crossings `P`. With several samples the distance per pair is their mean.
pub fn dynamic_reliability(frame: &Frame, samples: &[f64]) -> Result<f64, GranularError> {
    if samples.is_empty() {
        return Err(GranularError::NoTestSamples);
    }
    let span = frame.span();
    let total: f64 = frame
        .classes()
        .windows(2)
        .map(|w| {
            let p = edge_crossing(&w[0].shape, &w[1].shape);
            samples.iter().map(|t| (t - p).abs() / span).sum::<f64>() / samples.len() as f64
        })
        .sum();
    Ok(total.exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ReliabilityMode {
    /// One sample at the mean of all range midpoints.
    #[default]
    MidpointMean,
    /// Uniform samples over the frame span.
    SeededUniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct ReliabilityConfig {
    pub enabled: bool,
    pub mode: ReliabilityMode,
    pub samples: usize,
    pub seed: u64,
}

impl Default for ReliabilityConfig {
    fn default() -> Self {
        ReliabilityConfig {
            enabled: true,
            mode: ReliabilityMode::MidpointMean,
            samples: 1,
            seed: 0,
        }
    }
}

/// Test samples for one attribute. `salt` separates attributes sharing a seed.
pub fn test_samples(frame: &Frame, ranges: &[&RangeSet], config: &ReliabilityConfig, salt: u64) -> Vec<f64> {
    match config.mode {
        ReliabilityMode::MidpointMean => {
            let mids: Vec<f64> = ranges.iter().flat_map(|r| r.midpoints()).collect();
            if mids.is_empty() {
                vec![0.5 * (frame.lo() + frame.hi())]
            } else {
                vec![mids.iter().sum::<f64>() / mids.len() as f64]
            }
        }
        ReliabilityMode::SeededUniform => {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let u = Uniform::new_inclusive(frame.lo(), frame.hi()).expect("frame span is nonempty");
            (0..config.samples.max(1)).map(|_| u.sample(&mut rng)).collect()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ReliabilityReport {
    pub static_index: f64,
    pub dynamic_index: f64,
    pub comprehensive: f64,
    /// Comprehensive index divided by the maximum over the attributes.
    pub normalized: f64,
    pub test_samples: Vec<f64>,
}

/// Reports for several attributes, normalized against each other.
pub fn reliability_reports(inputs: &[(&Frame, Vec<f64>)]) -> Result<Vec<ReliabilityReport>, GranularError> {
    let mut reports = inputs
        .iter()
        .map(|(frame, samples)| {
            let s = static_reliability(frame);
            let d = dynamic_reliability(frame, samples)?;
            Ok(ReliabilityReport {
                static_index: s,
                dynamic_index: d,
                comprehensive: s * d,
                normalized: f64::NAN,
                test_samples: samples.clone(),
            })
        })
        .collect::<Result<Vec<_>, GranularError>>()?;
    let max = reports.iter().map(|r| r.comprehensive).fold(0.0, f64::max);
    for r in &mut reports {
        r.normalized = if max > 0.0 { r.comprehensive / max } else { 1.0 };
    }
    Ok(reports)
}

pub fn reliability_modify(raw: &MembershipRow, r_star: f64) -> Result<MembershipRow, GranularError> {
    if !(r_star > 0.0 && r_star <= 1.0) {
        return Err(GranularError::Reliability(r_star));
    }
    if raw.stage != MembershipStage::Raw {
        return Err(GranularError::Stage {
            expected: MembershipStage::Raw,
            got: raw.stage,
        });
    }
    Ok(MembershipRow {
        per_class: raw.per_class.iter().map(|m| m * r_star).collect(),
        stage: MembershipStage::ReliabilityModified,
    })
}

/// Per-class sums across rows, scaled to unit total.
pub fn aggregate_and_normalize(rows: &[MembershipRow]) -> Result<MembershipRow, GranularError> {
    let first = rows.first().ok_or(GranularError::NoRanges)?;
    let n = first.per_class.len();
    let mut sums = vec![0.0; n];
    for row in rows {
        if row.per_class.len() != n {
            return Err(GranularError::ClassCountMismatch(n, row.per_class.len()));
        }
        for (s, m) in sums.iter_mut().zip(&row.per_class) {
            *s += m;
        }
    }
    let total: f64 = sums.iter().sum();
    if !(total > 0.0) {
        return Err(GranularError::NoMass);
    }
    Ok(MembershipRow {
        per_class: sums.iter().map(|s| s / total).collect(),
        stage: MembershipStage::Normalized,
    })
}

/// Convex combination of the class TFNs weighted by a normalized row.
pub fn integrate_tfn(frame: &Frame, normalized: &MembershipRow) -> Result<Tfn, GranularError> {
    if normalized.stage != MembershipStage::Normalized {
        return Err(GranularError::Stage {
            expected: MembershipStage::Normalized,
            got: normalized.stage,
        });
    }
    if normalized.per_class.len() != frame.class_count() {
        return Err(GranularError::ClassCountMismatch(
            frame.class_count(),
            normalized.per_class.len(),
        ));
    }
    let mut acc = [0.0; 3];
    for (class, w) in frame.classes().iter().zip(&normalized.per_class) {
        for (a, v) in acc.iter_mut().zip(class.shape.components()) {
            *a += v * w;
        }
    }
    Ok(Tfn::new(acc[0], acc[1].clamp(acc[0], acc[2]), acc[2])?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Extraction {
    pub tfn: Tfn,
    pub raw: Vec<MembershipRow>,
    pub normalized: MembershipRow,
    pub reliability_factor: Option<f64>,
}

/// End-to-end extraction for one (supplier, attribute) cell. `r_star = None`
/// skips the reliability modification.
pub fn extract(frame: &Frame, ranges: &RangeSet, r_star: Option<f64>) -> Result<Extraction, GranularError> {
    let raw = ranges
        .ranges()
        .iter()
        .map(|r| raw_memberships(frame, *r))
        .collect::<Result<Vec<_>, _>>()?;
    let modified = match r_star {
        Some(r) => raw
            .iter()
            .map(|row| reliability_modify(row, r))
            .collect::<Result<Vec<_>, _>>()?,
        None => raw.clone(),
    };
    let normalized = aggregate_and_normalize(&modified)?;
    let tfn = integrate_tfn(frame, &normalized)?;
    Ok(Extraction {
        tfn,
        raw,
        normalized,
        reliability_factor: r_star,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fuzzy::FrameClass;

    fn frame7() -> Frame {
        Frame::fuzzify(58.0, 158.0, 7).unwrap()
    }

    #[test]
    fn range_membership_cases() {
        let f = frame7();
        let mb = f.classes()[1].shape;
        let full = range_membership(&f, 1, (mb.a(), mb.c())).unwrap();
        assert!((full - 0.5).abs() < 1e-12);
        assert!((range_membership(&f, 1, (mb.b(), mb.b())).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(range_membership(&f, 1, (150.0, 158.0)).unwrap(), 0.0);
        assert!(matches!(
            range_membership(&f, 1, (3.0, 2.0)),
            Err(GranularError::ReversedRange { .. })
        ));
    }

    #[test]
    fn wide_range_divides_by_intersection() {
        let f = frame7();
        // range covers the whole frame: every interior class averages 1/2
        let row = raw_memberships(&f, (58.0, 158.0)).unwrap();
        for m in &row.per_class[1..6] {
            assert!((m - 0.5).abs() < 1e-12);
        }
        assert!((row.per_class[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn similarity_limits() {
        let x = Tfn::new(0.0, 1.0, 2.0).unwrap();
        assert!((class_similarity(&x, &x) - 1.0).abs() < 1e-12);
        let y = Tfn::new(3.0, 4.0, 5.0).unwrap();
        assert_eq!(class_similarity(&x, &y), 0.0);
    }

    #[test]
    fn gap_partition_static_index_counts_pairs() {
        let classes = (0..4)
            .map(|k| FrameClass {
                label: format!("G{k}"),
                shape: Tfn::new(3.0 * k as f64, 3.0 * k as f64 + 1.0, 3.0 * k as f64 + 2.0).unwrap(),
            })
            .collect();
        let f = Frame::from_classes(0.0, 11.0, classes).unwrap();
        assert!((static_reliability(&f) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn identical_neighbours_contribute_nothing() {
        let shape = Tfn::new(0.0, 1.0, 2.0).unwrap();
        let classes = vec![
            FrameClass {
                label: "A".into(),
                shape,
            },
            FrameClass {
                label: "B".into(),
                shape,
            },
        ];
        let f = Frame::from_classes(0.0, 2.0, classes).unwrap();
        assert!(static_reliability(&f).abs() < 1e-12);
    }

    // Independent geometry for frame(0, 14, 7): interior neighbours overlap in
    // a triangle of height 1/2 on a base of 2, each class having area 2; the
    // shoulder pairs overlap on [1, 3] with apex 0.4 at x = 1.8 against a
    // shoulder of area 1.5.
    #[test]
    fn static_index_unit_frame() {
        let f = Frame::fuzzify(0.0, 14.0, 7).unwrap();
        let interior = 0.5 / (2.0 + 2.0 - 0.5);
        let shoulder = 0.4 / (1.5 + 2.0 - 0.4);
        let expected = 4.0 * (1.0 - interior) + 2.0 * (1.0 - shoulder);
        assert!((static_reliability(&f) - expected).abs() < 1e-12);
        let sims: Vec<f64> = f
            .classes()
            .windows(2)
            .map(|w| class_similarity(&w[0].shape, &w[1].shape))
            .collect();
        for s in &sims[1..5] {
            assert!((s - sims[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn dynamic_index_cases() {
        let f2 = Frame::fuzzify(0.0, 1.0, 2).unwrap();
        assert!((dynamic_reliability(&f2, &[0.5]).unwrap() - 1.0).abs() < 1e-12);
        let f = Frame::fuzzify(0.0, 14.0, 7).unwrap();
        let crossings = [1.8, 4.0, 6.0, 8.0, 10.0, 12.2];
        let expected = (crossings.iter().map(|p| (7.0f64 - p).abs() / 14.0).sum::<f64>()).exp();
        assert!((dynamic_reliability(&f, &[7.0]).unwrap() - expected).abs() < 1e-12);
        assert_eq!(dynamic_reliability(&f, &[]), Err(GranularError::NoTestSamples));
    }

    #[test]
    fn reliability_modify_cases() {
        let row = MembershipRow::raw(vec![0.2, 0.8, 0.0]);
        assert_eq!(reliability_modify(&row, 1.0).unwrap().per_class, row.per_class);
        let half = reliability_modify(&row, 0.5).unwrap();
        assert_eq!(half.per_class, vec![0.1, 0.4, 0.0]);
        assert_eq!(half.stage, MembershipStage::ReliabilityModified);
        assert!(reliability_modify(&row, 0.0).is_err());
        assert!(reliability_modify(&row, 1.5).is_err());
    }

    #[test]
    fn aggregation_cases() {
        let single = aggregate_and_normalize(&[MembershipRow::raw(vec![0.5, 0.5, 0.0])]).unwrap();
        assert_eq!(single.per_class, vec![0.5, 0.5, 0.0]);
        let two = aggregate_and_normalize(&[
            MembershipRow::raw(vec![1.0, 0.0, 0.0]),
            MembershipRow::raw(vec![0.0, 1.0, 0.0]),
        ])
        .unwrap();
        assert_eq!(two.per_class, vec![0.5, 0.5, 0.0]);
        assert_eq!(
            aggregate_and_normalize(&[MembershipRow::raw(vec![0.0; 3])]),
            Err(GranularError::NoMass)
        );
        assert!(aggregate_and_normalize(&[MembershipRow::raw(vec![1.0]), MembershipRow::raw(vec![1.0, 2.0])]).is_err());
    }

    #[test]
    fn integration_cases() {
        let f = frame7();
        let mut w = vec![0.0; 7];
        w[3] = 1.0;
        let row = MembershipRow {
            per_class: w,
            stage: MembershipStage::Normalized,
        };
        assert!(integrate_tfn(&f, &row).unwrap().max_abs_diff(&f.classes()[3].shape) < 1e-12);
        let mut w = vec![0.0; 7];
        w[2] = 0.5;
        w[3] = 0.5;
        let mid = integrate_tfn(
            &f,
            &MembershipRow {
                per_class: w,
                stage: MembershipStage::Normalized,
            },
        )
        .unwrap();
        let (x, y) = (f.classes()[2].shape, f.classes()[3].shape);
        for i in 0..3 {
            assert!((mid.components()[i] - 0.5 * (x.components()[i] + y.components()[i])).abs() < 1e-12);
        }
        assert!(matches!(
            integrate_tfn(&f, &MembershipRow::raw(vec![0.0; 7])),
            Err(GranularError::Stage { .. })
        ));
    }

    #[test]
    fn extract_of_identical_class_supports() {
        let f = frame7();
        let shape = f.classes()[4].shape;
        let ranges = RangeSet::new(vec![(shape.a(), shape.c()); 5]).unwrap();
        let out = extract(&f, &ranges, Some(0.7)).unwrap();
        // neighbours pick up partial mass, so only the peak is pinned exactly
        assert!((out.tfn.b() - shape.b()).abs() < 1e-9);
        assert!(out.tfn.a() >= f.lo() && out.tfn.c() <= f.hi());
    }
}
