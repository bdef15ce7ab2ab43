//! Load a bundle from disk, save a session, edit one appraisal and recompute
//! only the stages downstream of it.

use std::path::Path;

use supplier_dss::dataset::load_dataset;
use supplier_dss::pipeline::Stage;
use supplier_dss::session::{load_session, run_pipeline};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let bundle = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/paper-case");
    let ds = load_dataset(&bundle)?;
    let session = run_pipeline(&ds)?;

    let dir = tempfile::tempdir()?;
    let file = dir.path().join("case.json");
    session.save(&file)?;
    let (restored, warnings) = load_session(&file)?;
    println!(
        "restored {} with {} warnings",
        restored.provenance.artifact_hash,
        warnings.len()
    );

    let mut edited = ds.clone();
    for a in edited.appraisals.iter_mut() {
        if (a.supplier.as_str(), a.attribute.as_str(), a.dm.as_str()) == ("S5", "C5", "DM5") {
            a.term = "M".into();
        }
    }
    let revised = session.revise(edited, Stage::Qualitative)?;
    for stage in [Stage::Evidence, Stage::Qualitative, Stage::Ranking, Stage::Allocation] {
        let same = session.provenance.stages.get(stage) == revised.provenance.stages.get(stage);
        println!("{stage:<12} {}", if same { "unchanged" } else { "recomputed" });
    }
    println!("order {:?}", revised.artifacts.ranking.all.order());
    Ok(())
}
