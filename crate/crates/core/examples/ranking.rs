//! Rank the bundled five-supplier case under both distance variants.

use supplier_dss::fixtures;
use supplier_dss::pipeline::Artifacts;
use supplier_dss::topsis::DistanceVariant;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for variant in [DistanceVariant::Paper, DistanceVariant::PerAttribute] {
        let mut ds = fixtures::paper_case();
        ds.manifest.config.distance_variant = variant;
        let a = Artifacts::compute(&ds)?;
        println!("{variant}");
        print!("{}", a.ranking.all.to_csv());
    }
    Ok(())
}
