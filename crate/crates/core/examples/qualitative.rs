//! Five decision makers, one cell, one importance weight.

use supplier_dss::fuzzy::LinguisticScale;
use supplier_dss::qualitative::{aggregate_dms, term_to_tfn};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let perf = LinguisticScale::performance();
    let weight = LinguisticScale::weight();

    let terms = ["M", "MG", "MG", "MG", "MB"];
    let tfns = terms
        .iter()
        .map(|t| term_to_tfn(t, &perf, "S5/C5"))
        .collect::<Result<Vec<_>, _>>()?;
    println!("{terms:?} -> {}", aggregate_dms(&tfns)?);

    let importance = ["I", "VI", "EI", "I", "VI"];
    let tfns = importance
        .iter()
        .map(|t| term_to_tfn(t, &weight, "C1"))
        .collect::<Result<Vec<_>, _>>()?;
    println!("{importance:?} -> {}", aggregate_dms(&tfns)?);
    Ok(())
}
