//! The bundled five-supplier case and its published reference numbers.

use std::collections::HashMap;

use crate::dataset::Dataset;

macro_rules! bundle {
    ($dir:literal: $($file:literal),+) => {{
        let mut files = HashMap::new();
        $(files.insert($file.to_string(), include_str!(concat!("../fixtures/", $dir, "/", $file)).to_string());)+
        Dataset::from_files(&files).expect("bundled fixture parses")
    }};
}

/// Five suppliers, 19 attributes, five decision makers, with published TFNs
/// for C1..C4 as overrides and the raw series and ranges behind them.
pub fn paper_case() -> Dataset {
    bundle!("paper-case": "manifest.json", "suppliers.csv", "attributes.csv", "appraisals.csv",
        "weights.csv", "ranges.csv", "series.csv", "tfn_overrides.csv", "mcgp.json")
}

/// The case with the (S3, C12, DM4) appraisal removed.
pub fn defect_case() -> Dataset {
    bundle!("defect-case": "manifest.json", "suppliers.csv", "attributes.csv", "appraisals.csv",
        "weights.csv", "tfn_overrides.csv", "mcgp.json")
}

/// Resolves the names `paper-case` and `defect-case` to the bundled data.
pub fn by_name(name: &str) -> Option<Dataset> {
    match name.trim_end_matches('/') {
        "paper-case" => Some(paper_case()),
        "defect-case" => Some(defect_case()),
        _ => None,
    }
}

pub const SUPPLIERS: [&str; 5] = ["S1", "S2", "S3", "S4", "S5"];

/// Published `(d+, d-, closeness)` of the full ranking.
pub const RANKING: [[f64; 3]; 5] = [
    [1.80, 1.39, 0.436],
    [1.82, 1.44, 0.441],
    [1.76, 1.48, 0.456],
    [1.88, 1.33, 0.414],
    [1.95, 1.23, 0.388],
];

/// Closeness coefficients fed to the goal program.
pub const MCGP_COEFFS: [f64; 5] = [0.467, 0.45, 0.448, 0.451, 0.388];

pub const RESILIENCE_CLOSENESS: [f64; 5] = [0.436, 0.442, 0.457, 0.413, 0.387];
pub const RESILIENCE_NORMALIZED: [f64; 5] = [0.2043, 0.2064, 0.2137, 0.1939, 0.1817];
pub const COST_CLOSENESS: [f64; 5] = [0.49, 0.42, 0.45, 0.51, 0.50];
pub const COST_NORMALIZED: [f64; 5] = [0.2073, 0.1762, 0.1913, 0.2143, 0.2110];

/// Risk index per supplier at alpha = 0.1, 0.2, ..., 0.9.
pub const SCRI: [[f64; 9]; 5] = [
    [0.207, 0.207, 0.206, 0.206, 0.206, 0.205, 0.205, 0.205, 0.204],
    [0.179, 0.182, 0.185, 0.189, 0.192, 0.195, 0.198, 0.201, 0.204],
    [0.194, 0.196, 0.198, 0.200, 0.203, 0.205, 0.207, 0.209, 0.212],
    [0.212, 0.210, 0.208, 0.206, 0.204, 0.202, 0.200, 0.198, 0.195],
    [0.208, 0.205, 0.202, 0.199, 0.196, 0.193, 0.190, 0.187, 0.184],
];

/// Expected leader at each alpha of [`SCRI`]; `None` where the published
/// grid is too close to call.
pub const SCRI_ARGMAX: [Option<&str>; 9] = [
    Some("S4"),
    Some("S4"),
    Some("S4"),
    Some("S4"),
    None,
    None,
    Some("S3"),
    Some("S3"),
    Some("S3"),
];

/// Published C1 and C2 TFNs per supplier.
pub const TEMPORAL_TFNS: [[[f64; 3]; 2]; 5] = [
    [[423.98, 441.04, 454.0], [7.98, 11.01, 15.0]],
    [[459.98, 469.54, 480.0], [5.98, 9.0, 12.0]],
    [[441.98, 455.01, 470.0], [10.98, 14.03, 17.0]],
    [[404.98, 425.51, 445.0], [11.98, 14.01, 16.0]],
    [[424.98, 446.05, 459.0], [9.98, 14.0, 18.0]],
];

/// Published C3 and C4 TFNs per supplier.
pub const GRANULAR_TFNS: [[[f64; 3]; 2]; 5] = [
    [[102.98, 117.23, 131.49], [320.06, 394.96, 488.16]],
    [[66.14, 75.55, 92.23], [358.10, 470.87, 526.03]],
    [[81.25, 95.04, 109.53], [338.87, 432.49, 506.88]],
    [[124.33, 141.10, 150.33], [311.70, 379.58, 481.14]],
    [[113.44, 128.67, 140.98], [316.41, 385.76, 482.62]],
];

/// Aggregated attribute weights C1..C19.
pub const WEIGHTS: [[f64; 3]; 19] = [
    [0.5, 0.7, 1.0],
    [0.3, 0.54, 0.8],
    [0.3, 0.48, 0.7],
    [0.5, 0.62, 0.8],
    [0.5, 0.64, 0.8],
    [0.5, 0.78, 1.0],
    [0.3, 0.48, 0.7],
    [0.5, 0.64, 0.8],
    [0.1, 0.32, 0.5],
    [0.5, 0.66, 0.8],
    [0.5, 0.64, 0.8],
    [0.4, 0.54, 0.7],
    [0.3, 0.52, 0.7],
    [0.5, 0.66, 0.8],
    [0.3, 0.48, 0.7],
    [0.4, 0.62, 0.8],
    [0.3, 0.54, 0.8],
    [0.3, 0.52, 0.7],
    [0.3, 0.5, 0.7],
];

/// Published negative ideal per attribute, two decimals.
pub const NIS: [f64; 19] = [
    0.42, 0.10, 0.06, 0.15, 0.22, 0.30, 0.09, 0.17, 0.01, 0.15, 0.05, 0.13, 0.10, 0.15, 0.07, 0.16, 0.09, 0.09, 0.11,
];

/// Published allocation.
pub const PLAN: [f64; 5] = [29.0, 0.0, 442.0, 29.0, 0.0];
