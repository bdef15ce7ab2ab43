//! Dataset bundles: a directory of CSV tables plus `manifest.json` and an
//! optional `mcgp.json`, or the same content as one JSON document.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fuzzy::{LinguisticScale, Tfn};
use crate::goal::{AllocationOptions, McgpModel};
use crate::granular::ReliabilityConfig;
use crate::qualitative::{Appraisal, WeightJudgment};
use crate::temporal::InductionConfig;
use crate::topsis::{Attribute, DistanceVariant, EvidenceKind, Group, Objective};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{file}: {message}")]
    Parse { file: String, message: String },
    #[error("unsupported schema version {found} (this build reads {SCHEMA_VERSION})")]
    UnsupportedVersion { found: u32 },
    #[error("{} violation(s):\n{}", .0.len(), render_violations(.0))]
    Invalid(Vec<Violation>),
}

fn render_violations(v: &[Violation]) -> String {
    v.iter().map(|x| format!("  {x}")).collect::<Vec<_>>().join("\n")
}

/// One validation failure with its table/row coordinates. Rows count data
/// records from 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub table: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub row: Option<usize>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.row {
            Some(r) => write!(f, "{}:{}: {}", self.table, r, self.message),
            None => write!(f, "{}: {}", self.table, self.message),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct PipelineConfig {
    pub frame_classes: usize,
    pub distance_variant: DistanceVariant,
    pub reliability: ReliabilityConfig,
    pub induction: InductionConfig,
    /// Prefer raw series and ranges over TFN overrides when both exist.
    pub from_raw: bool,
    pub allocation: AllocationOptions,
    pub scri_step: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub performance_scale: Option<LinguisticScale>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight_scale: Option<LinguisticScale>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            frame_classes: 7,
            distance_variant: DistanceVariant::Paper,
            reliability: ReliabilityConfig::default(),
            induction: InductionConfig::default(),
            from_raw: false,
            allocation: AllocationOptions::default(),
            scri_step: 0.1,
            performance_scale: None,
            weight_scale: None,
        }
    }
}

impl PipelineConfig {
    pub fn performance(&self) -> LinguisticScale {
        self.performance_scale
            .clone()
            .unwrap_or_else(LinguisticScale::performance)
    }

    pub fn weight(&self) -> LinguisticScale {
        self.weight_scale.clone().unwrap_or_else(LinguisticScale::weight)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Manifest {
    pub schema_version: u32,
    pub name: String,
    pub decision_makers: Vec<String>,
    #[serde(default)]
    pub config: PipelineConfig,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Supplier {
    pub id: String,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RangeRow {
    pub supplier: String,
    pub attribute: String,
    #[serde(alias = "rangeIndex")]
    pub range_index: usize,
    pub p: f64,
    pub q: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesRow {
    pub supplier: String,
    pub attribute: String,
    pub t: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TfnOverride {
    pub supplier: String,
    pub attribute: String,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl TfnOverride {
    pub fn tfn(&self) -> Option<Tfn> {
        Tfn::new(self.a, self.b, self.c).ok()
    }
}

/// Row shape of `attributes.csv`.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct AttributeRecord {
    id: String,
    name: String,
    evidence: EvidenceKind,
    objective: Objective,
    group: Group,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Dataset {
    pub manifest: Manifest,
    pub suppliers: Vec<Supplier>,
    pub attributes: Vec<Attribute>,
    #[serde(default)]
    pub appraisals: Vec<Appraisal>,
    #[serde(default)]
    pub weights: Vec<WeightJudgment>,
    #[serde(default)]
    pub ranges: Vec<RangeRow>,
    #[serde(default)]
    pub series: Vec<SeriesRow>,
    #[serde(default)]
    pub overrides: Vec<TfnOverride>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mcgp: Option<McgpModel>,
}

const REQUIRED: [&str; 5] = [
    "manifest.json",
    "suppliers.csv",
    "attributes.csv",
    "appraisals.csv",
    "weights.csv",
];

fn parse_csv<T: DeserializeOwned>(file: &str, text: &str) -> Result<Vec<T>, LoadError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    reader
        .deserialize()
        .enumerate()
        .map(|(i, r)| {
            r.map_err(|e| LoadError::Parse {
                file: file.to_string(),
                message: format!("record {}: {e}", i + 1),
            })
        })
        .collect()
}

fn write_csv<T: Serialize>(rows: &[T], header: &[&str]) -> String {
    let mut w = csv::WriterBuilder::new()
        .has_headers(!rows.is_empty())
        .from_writer(Vec::new());
    if rows.is_empty() {
        w.write_record(header).expect("in-memory write");
    }
    for r in rows {
        w.serialize(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
}

fn parse_json<T: DeserializeOwned>(file: &str, text: &str) -> Result<T, LoadError> {
    serde_json::from_str(text).map_err(|e| LoadError::Parse {
        file: file.to_string(),
        message: e.to_string(),
    })
}

fn check_version(v: u32) -> Result<(), LoadError> {
    if v == SCHEMA_VERSION {
        Ok(())
    } else {
        Err(LoadError::UnsupportedVersion { found: v })
    }
}

impl Dataset {
    /// Parses bundle files given as `(file name, contents)`; nothing is
    /// validated beyond the schema version.
    pub fn from_files(files: &HashMap<String, String>) -> Result<Dataset, LoadError> {
        for name in REQUIRED {
            if !files.contains_key(name) {
                return Err(LoadError::Parse {
                    file: name.to_string(),
                    message: "missing from bundle".into(),
                });
            }
        }
        let get = |name: &str| files.get(name).map(String::as_str);
        let manifest: Manifest = parse_json("manifest.json", get("manifest.json").unwrap_or_default())?;
        check_version(manifest.schema_version)?;
        let attributes: Vec<AttributeRecord> = parse_csv("attributes.csv", get("attributes.csv").unwrap_or_default())?;
        let optional = |name: &str| get(name).unwrap_or_default();
        Ok(Dataset {
            manifest,
            suppliers: parse_csv("suppliers.csv", optional("suppliers.csv"))?,
            attributes: attributes
                .into_iter()
                .map(|r| Attribute {
                    id: r.id,
                    name: r.name,
                    evidence_kind: r.evidence,
                    objective: r.objective,
                    group: r.group,
                })
                .collect(),
            appraisals: parse_csv("appraisals.csv", optional("appraisals.csv"))?,
            weights: parse_csv("weights.csv", optional("weights.csv"))?,
            ranges: parse_csv("ranges.csv", optional("ranges.csv"))?,
            series: parse_csv("series.csv", optional("series.csv"))?,
            overrides: parse_csv("tfn_overrides.csv", optional("tfn_overrides.csv"))?,
            mcgp: match get("mcgp.json") {
                Some(text) => Some(parse_json("mcgp.json", text)?),
                None => None,
            },
        })
    }

    /// Reads a bundle directory without validating it.
    pub fn read_dir(dir: &Path) -> Result<Dataset, LoadError> {
        let meta = fs::metadata(dir).map_err(|source| LoadError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        if !meta.is_dir() {
            return Err(LoadError::Io {
                path: dir.to_path_buf(),
                source: std::io::Error::new(std::io::ErrorKind::InvalidInput, "not a bundle directory"),
            });
        }
        let mut files = HashMap::new();
        for name in REQUIRED
            .iter()
            .chain(&["ranges.csv", "series.csv", "tfn_overrides.csv", "mcgp.json"])
        {
            let path = dir.join(name);
            match fs::read_to_string(&path) {
                Ok(text) => {
                    files.insert(name.to_string(), text);
                }
                Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
                Err(source) => return Err(LoadError::Io { path, source }),
            }
        }
        Dataset::from_files(&files)
    }

    pub fn from_json(text: &str) -> Result<Dataset, LoadError> {
        let value: serde_json::Value = parse_json("document", text)?;
        let version = value
            .pointer("/manifest/schemaVersion")
            .and_then(serde_json::Value::as_u64)
            .unwrap_or(0) as u32;
        check_version(version)?;
        serde_json::from_value(value).map_err(|e| LoadError::Parse {
            file: "document".into(),
            message: e.to_string(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("dataset serializes")
    }

    /// Bundle files keyed by name.
    pub fn to_files(&self) -> Vec<(String, String)> {
        let attrs: Vec<AttributeRecord> = self
            .attributes
            .iter()
            .map(|a| AttributeRecord {
                id: a.id.clone(),
                name: a.name.clone(),
                evidence: a.evidence_kind,
                objective: a.objective,
                group: a.group,
            })
            .collect();
        let mut out = vec![
            (
                "manifest.json".to_string(),
                serde_json::to_string_pretty(&self.manifest).expect("manifest serializes") + "\n",
            ),
            ("suppliers.csv".into(), write_csv(&self.suppliers, &["id", "name"])),
            (
                "attributes.csv".into(),
                write_csv(&attrs, &["id", "name", "evidence", "objective", "group"]),
            ),
            (
                "appraisals.csv".into(),
                write_csv(&self.appraisals, &["supplier", "attribute", "dm", "term"]),
            ),
            (
                "weights.csv".into(),
                write_csv(&self.weights, &["attribute", "dm", "term"]),
            ),
            (
                "ranges.csv".into(),
                write_csv(&self.ranges, &["supplier", "attribute", "range_index", "p", "q"]),
            ),
            (
                "series.csv".into(),
                write_csv(&self.series, &["supplier", "attribute", "t", "value"]),
            ),
            (
                "tfn_overrides.csv".into(),
                write_csv(&self.overrides, &["supplier", "attribute", "a", "b", "c"]),
            ),
        ];
        if let Some(m) = &self.mcgp {
            out.push((
                "mcgp.json".into(),
                serde_json::to_string_pretty(m).expect("model serializes") + "\n",
            ));
        }
        out
    }

    pub fn write_dir(&self, dir: &Path) -> std::io::Result<()> {
        fs::create_dir_all(dir)?;
        for (name, text) in self.to_files() {
            fs::write(dir.join(name), text)?;
        }
        Ok(())
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.manifest.config
    }

    pub fn dms(&self) -> &[String] {
        &self.manifest.decision_makers
    }

    pub fn supplier_ids(&self) -> Vec<String> {
        self.suppliers.iter().map(|s| s.id.clone()).collect()
    }

    pub fn attribute(&self, id: &str) -> Option<&Attribute> {
        self.attributes.iter().find(|a| a.id == id)
    }

    pub fn override_for(&self, supplier: &str, attribute: &str) -> Option<&TfnOverride> {
        self.overrides
            .iter()
            .find(|o| o.supplier == supplier && o.attribute == attribute)
    }

    /// Values of one series in `t` order.
    pub fn series_for(&self, supplier: &str, attribute: &str) -> Vec<f64> {
        let mut rows: Vec<&SeriesRow> = self
            .series
            .iter()
            .filter(|r| r.supplier == supplier && r.attribute == attribute)
            .collect();
        rows.sort_by_key(|r| r.t);
        rows.into_iter().map(|r| r.value).collect()
    }

    /// Ranges of one cell in `range_index` order.
    pub fn ranges_for(&self, supplier: &str, attribute: &str) -> Vec<(f64, f64)> {
        let mut rows: Vec<&RangeRow> = self
            .ranges
            .iter()
            .filter(|r| r.supplier == supplier && r.attribute == attribute)
            .collect();
        rows.sort_by_key(|r| r.range_index);
        rows.into_iter().map(|r| (r.p, r.q)).collect()
    }

    /// Every violation found; empty means valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut push = |table: &str, row: Option<usize>, message: String| {
            out.push(Violation {
                table: table.to_string(),
                row,
                message,
            })
        };

        if self.suppliers.is_empty() {
            push("suppliers.csv", None, "at least one supplier".into());
        }
        if self.attributes.is_empty() {
            push("attributes.csv", None, "at least one attribute".into());
        }
        if self.dms().is_empty() {
            push("manifest.json", None, "at least one decision maker".into());
        }
        let cfg = self.config();
        if cfg.frame_classes < 2 {
            push(
                "manifest.json",
                None,
                format!("frameClasses must be >= 2, got {}", cfg.frame_classes),
            );
        }
        if !(cfg.scri_step > 0.0 && cfg.scri_step <= 0.5) {
            push(
                "manifest.json",
                None,
                format!("scriStep must be in (0, 0.5], got {}", cfg.scri_step),
            );
        }

        let mut seen = HashSet::new();
        for (i, s) in self.suppliers.iter().enumerate() {
            if !seen.insert(s.id.as_str()) {
                push("suppliers.csv", Some(i + 1), format!("duplicate supplier {}", s.id));
            }
        }
        let mut seen = HashSet::new();
        for (i, a) in self.attributes.iter().enumerate() {
            if !seen.insert(a.id.as_str()) {
                push("attributes.csv", Some(i + 1), format!("duplicate attribute {}", a.id));
            }
        }
        let mut seen = HashSet::new();
        for dm in self.dms() {
            if !seen.insert(dm.as_str()) {
                push("manifest.json", None, format!("duplicate decision maker {dm}"));
            }
        }

        let suppliers: HashSet<&str> = self.suppliers.iter().map(|s| s.id.as_str()).collect();
        let dms: HashSet<&str> = self.dms().iter().map(String::as_str).collect();
        let kind: HashMap<&str, EvidenceKind> = self
            .attributes
            .iter()
            .map(|a| (a.id.as_str(), a.evidence_kind))
            .collect();
        let perf = cfg.performance();
        let weight = cfg.weight();

        // appraisals
        let mut cells = HashSet::new();
        for (i, a) in self.appraisals.iter().enumerate() {
            let row = Some(i + 1);
            let mut ok = true;
            if !suppliers.contains(a.supplier.as_str()) {
                push("appraisals.csv", row, format!("unknown supplier {}", a.supplier));
                ok = false;
            }
            if !dms.contains(a.dm.as_str()) {
                push("appraisals.csv", row, format!("unknown decision maker {}", a.dm));
                ok = false;
            }
            match kind.get(a.attribute.as_str()) {
                None => {
                    push("appraisals.csv", row, format!("unknown attribute {}", a.attribute));
                    ok = false;
                }
                Some(EvidenceKind::Linguistic) => {}
                Some(k) => {
                    push(
                        "appraisals.csv",
                        row,
                        format!("attribute {} carries {k} evidence, not appraisals", a.attribute),
                    );
                    ok = false;
                }
            }
            if perf.get(&a.term).is_none() {
                push(
                    "appraisals.csv",
                    row,
                    format!(
                        "unknown term `{}` at ({}, {}, {})",
                        a.term, a.supplier, a.attribute, a.dm
                    ),
                );
            }
            if ok && !cells.insert((a.supplier.as_str(), a.attribute.as_str(), a.dm.as_str())) {
                push(
                    "appraisals.csv",
                    row,
                    format!("duplicate appraisal at ({}, {}, {})", a.supplier, a.attribute, a.dm),
                );
            }
        }
        for attr in self
            .attributes
            .iter()
            .filter(|a| a.evidence_kind == EvidenceKind::Linguistic)
        {
            for s in &self.suppliers {
                for dm in self.dms() {
                    if !cells.contains(&(s.id.as_str(), attr.id.as_str(), dm.as_str())) {
                        push(
                            "appraisals.csv",
                            None,
                            format!("missing appraisal at ({}, {}, {dm})", s.id, attr.id),
                        );
                    }
                }
            }
        }

        // weight judgments
        let mut judged = HashSet::new();
        for (i, w) in self.weights.iter().enumerate() {
            let row = Some(i + 1);
            let mut ok = true;
            if !kind.contains_key(w.attribute.as_str()) {
                push("weights.csv", row, format!("unknown attribute {}", w.attribute));
                ok = false;
            }
            if !dms.contains(w.dm.as_str()) {
                push("weights.csv", row, format!("unknown decision maker {}", w.dm));
                ok = false;
            }
            if weight.get(&w.term).is_none() {
                push(
                    "weights.csv",
                    row,
                    format!("unknown term `{}` at ({}, {})", w.term, w.attribute, w.dm),
                );
            }
            if ok && !judged.insert((w.attribute.as_str(), w.dm.as_str())) {
                push(
                    "weights.csv",
                    row,
                    format!("duplicate weight at ({}, {})", w.attribute, w.dm),
                );
            }
        }
        for attr in &self.attributes {
            for dm in self.dms() {
                if !judged.contains(&(attr.id.as_str(), dm.as_str())) {
                    push("weights.csv", None, format!("missing weight at ({}, {dm})", attr.id));
                }
            }
        }

        // numeric evidence
        let mut with_ranges = HashSet::new();
        for (i, r) in self.ranges.iter().enumerate() {
            let row = Some(i + 1);
            if !suppliers.contains(r.supplier.as_str()) {
                push("ranges.csv", row, format!("unknown supplier {}", r.supplier));
            }
            match kind.get(r.attribute.as_str()) {
                None => push("ranges.csv", row, format!("unknown attribute {}", r.attribute)),
                Some(EvidenceKind::Granular) => {}
                Some(k) => push(
                    "ranges.csv",
                    row,
                    format!("attribute {} carries {k} evidence, not ranges", r.attribute),
                ),
            }
            if !(r.p.is_finite() && r.q.is_finite()) || r.p > r.q {
                push("ranges.csv", row, format!("invalid range [{}, {}]", r.p, r.q));
            }
            with_ranges.insert((r.supplier.as_str(), r.attribute.as_str()));
        }
        let mut series_len: HashMap<(&str, &str), usize> = HashMap::new();
        let mut stamps = HashSet::new();
        for (i, r) in self.series.iter().enumerate() {
            let row = Some(i + 1);
            if !suppliers.contains(r.supplier.as_str()) {
                push("series.csv", row, format!("unknown supplier {}", r.supplier));
            }
            match kind.get(r.attribute.as_str()) {
                None => push("series.csv", row, format!("unknown attribute {}", r.attribute)),
                Some(EvidenceKind::Temporal) => {}
                Some(k) => push(
                    "series.csv",
                    row,
                    format!("attribute {} carries {k} evidence, not a series", r.attribute),
                ),
            }
            if !r.value.is_finite() {
                push("series.csv", row, "value is not finite".into());
            }
            if !stamps.insert((r.supplier.as_str(), r.attribute.as_str(), r.t)) {
                push(
                    "series.csv",
                    row,
                    format!("duplicate t={} for ({}, {})", r.t, r.supplier, r.attribute),
                );
            }
            *series_len
                .entry((r.supplier.as_str(), r.attribute.as_str()))
                .or_default() += 1;
        }
        let mut overridden = HashSet::new();
        for (i, o) in self.overrides.iter().enumerate() {
            let row = Some(i + 1);
            if !suppliers.contains(o.supplier.as_str()) {
                push("tfn_overrides.csv", row, format!("unknown supplier {}", o.supplier));
            }
            if !kind.contains_key(o.attribute.as_str()) {
                push("tfn_overrides.csv", row, format!("unknown attribute {}", o.attribute));
            }
            if o.tfn().is_none() {
                push(
                    "tfn_overrides.csv",
                    row,
                    format!("({}, {}, {}) is not an ordered TFN", o.a, o.b, o.c),
                );
            }
            if !overridden.insert((o.supplier.as_str(), o.attribute.as_str())) {
                push(
                    "tfn_overrides.csv",
                    row,
                    format!("duplicate override for ({}, {})", o.supplier, o.attribute),
                );
            }
        }
        for attr in &self.attributes {
            for s in &self.suppliers {
                let key = (s.id.as_str(), attr.id.as_str());
                let has_override = overridden.contains(&key);
                match attr.evidence_kind {
                    EvidenceKind::Temporal => {
                        let n = series_len.get(&key).copied().unwrap_or(0);
                        if !has_override && n < 3 {
                            push(
                                "series.csv",
                                None,
                                format!(
                                    "({}, {}) needs a series of at least 3 values or a TFN override",
                                    s.id, attr.id
                                ),
                            );
                        }
                    }
                    EvidenceKind::Granular => {
                        if !has_override && !with_ranges.contains(&key) {
                            push(
                                "ranges.csv",
                                None,
                                format!("({}, {}) needs ranges or a TFN override", s.id, attr.id),
                            );
                        }
                    }
                    EvidenceKind::Linguistic => {}
                }
            }
        }

        if let Some(m) = &self.mcgp {
            if let Err(e) = m.validate() {
                push("mcgp.json", None, e.to_string());
            }
            let ids: BTreeSet<&str> = m.suppliers.iter().map(|s| s.id.as_str()).collect();
            for id in &ids {
                if !suppliers.contains(id) {
                    push("mcgp.json", None, format!("unknown supplier {id}"));
                }
            }
            for s in &self.suppliers {
                if !ids.contains(s.id.as_str()) {
                    push("mcgp.json", None, format!("supplier {} has no goal-program data", s.id));
                }
            }
        }
        out
    }

    pub fn validated(self) -> Result<Dataset, LoadError> {
        let v = self.validate();
        if v.is_empty() {
            Ok(self)
        } else {
            Err(LoadError::Invalid(v))
        }
    }
}

/// Reads and validates a bundle directory or a `.json` dataset document.
pub fn load_dataset(path: &Path) -> Result<Dataset, LoadError> {
    let ds = if path.is_file() {
        let text = fs::read_to_string(path).map_err(|source| LoadError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Dataset::from_json(&text)?
    } else {
        Dataset::read_dir(path)?
    };
    ds.validated()
}
