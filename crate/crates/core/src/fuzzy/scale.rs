use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::{FuzzyError, Tfn};

/// Named set of linguistic terms, each bound to a TFN. Entries are kept in
/// strictly increasing order of their peaks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ScaleDocument", into = "ScaleDocument")]
pub struct LinguisticScale {
    name: String,
    entries: Vec<(String, Tfn)>,
}

impl LinguisticScale {
    pub fn new(name: impl Into<String>, entries: Vec<(String, Tfn)>) -> Result<Self, FuzzyError> {
        let name = name.into();
        if entries.is_empty() {
            return Err(FuzzyError::InvalidScale(format!("scale `{name}` has no terms")));
        }
        for (i, (term, _)) in entries.iter().enumerate() {
            if entries[..i].iter().any(|(t, _)| t == term) {
                return Err(FuzzyError::InvalidScale(format!(
                    "duplicate term `{term}` in scale `{name}`"
                )));
            }
        }
        for w in entries.windows(2) {
            if w[1].1.b() <= w[0].1.b() {
                return Err(FuzzyError::InvalidScale(format!(
                    "terms `{}` and `{}` of scale `{name}` are not in increasing peak order",
                    w[0].0, w[1].0
                )));
            }
        }
        Ok(LinguisticScale { name, entries })
    }

    /// Nine-term appraisal scale on `[0, 10]`, unit step.
    pub fn performance() -> Self {
        let terms = ["VB", "B", "MB", "M", "MG", "G", "VG", "VVG", "EG"];
        let entries = terms
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let i = i as f64;
                (t.to_string(), Tfn::new(i, i + 1.0, i + 2.0).unwrap())
            })
            .collect();
        LinguisticScale::new("PERFORMANCE", entries).unwrap()
    }

    /// Attribute-importance scale on `[0, 1]`.
    pub fn weight() -> Self {
        let raw = [
            ("VUI", 0.0, 0.1, 0.2),
            ("UI", 0.1, 0.2, 0.3),
            ("M", 0.3, 0.4, 0.5),
            ("MI", 0.4, 0.5, 0.6),
            ("I", 0.5, 0.6, 0.7),
            ("VI", 0.6, 0.7, 0.8),
            ("EI", 0.8, 0.9, 1.0),
        ];
        let entries = raw
            .iter()
            .map(|&(t, a, b, c)| (t.to_string(), Tfn::new(a, b, c).unwrap()))
            .collect();
        LinguisticScale::new("WEIGHT", entries).unwrap()
    }

    /// Parses `{"name": "...", "terms": {"VB": [0,1,2], ...}}`. Term order is
    /// taken from the document; it must match increasing peaks.
    pub fn from_json(text: &str) -> Result<Self, FuzzyError> {
        let doc: ScaleDocument = serde_json::from_str(text).map_err(|e| FuzzyError::InvalidScale(e.to_string()))?;
        LinguisticScale::try_from(doc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ScaleDocument::from(self.clone())).expect("scale serializes")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn entries(&self) -> &[(String, Tfn)] {
        &self.entries
    }

    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(t, _)| t.as_str())
    }

    pub fn get(&self, term: &str) -> Option<Tfn> {
        self.entries.iter().find(|(t, _)| t == term).map(|(_, v)| *v)
    }

    /// Position of the term in increasing order, used for monotonicity checks.
    pub fn rank_of(&self, term: &str) -> Option<usize> {
        self.entries.iter().position(|(t, _)| t == term)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ScaleDocument {
    name: String,
    // either {"TERM": [a, b, c], ...} or [{"term": "TERM", "tfn": [a, b, c]}, ...]
    terms: Value,
}

impl TryFrom<ScaleDocument> for LinguisticScale {
    type Error = FuzzyError;

    fn try_from(doc: ScaleDocument) -> Result<Self, Self::Error> {
        let mut entries = Vec::new();
        match doc.terms {
            Value::Object(map) => {
                for (term, v) in map {
                    entries.push((term.clone(), parse_triple(&term, &v)?));
                }
                // object key order is not guaranteed; order by peak instead
                entries.sort_by(|x: &(String, Tfn), y| x.1.b().total_cmp(&y.1.b()));
            }
            Value::Array(items) => {
                for item in items {
                    let term = item
                        .get("term")
                        .and_then(Value::as_str)
                        .ok_or_else(|| FuzzyError::InvalidScale("array entries need a `term`".into()))?
                        .to_string();
                    let tfn = item
                        .get("tfn")
                        .ok_or_else(|| FuzzyError::InvalidScale(format!("term `{term}` has no `tfn`")))?;
                    entries.push((term.clone(), parse_triple(&term, tfn)?));
                }
            }
            _ => return Err(FuzzyError::InvalidScale("`terms` must be an object or array".into())),
        }
        LinguisticScale::new(doc.name, entries)
    }
}

impl From<LinguisticScale> for ScaleDocument {
    fn from(s: LinguisticScale) -> Self {
        let items = s
            .entries
            .iter()
            .map(|(t, v)| {
                let mut m = Map::new();
                m.insert("term".into(), Value::String(t.clone()));
                m.insert("tfn".into(), serde_json::to_value(v).unwrap());
                Value::Object(m)
            })
            .collect();
        ScaleDocument {
            name: s.name,
            terms: Value::Array(items),
        }
    }
}

fn parse_triple(term: &str, v: &Value) -> Result<Tfn, FuzzyError> {
    let arr: [f64; 3] = serde_json::from_value(v.clone())
        .map_err(|_| FuzzyError::InvalidScale(format!("term `{term}` must map to [a, b, c]")))?;
    Tfn::try_from(arr)
}
