//! A random 50-supplier bundle run end to end from raw evidence.

use std::time::Instant;

use supplier_dss::pipeline::Artifacts;
use supplier_dss::synth::{synth_dataset, SynthConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ds = synth_dataset(&SynthConfig {
        suppliers: 50,
        ..SynthConfig::default()
    });
    let started = Instant::now();
    let a = Artifacts::compute(&ds)?;
    println!("{} suppliers in {:.0?}", ds.suppliers.len(), started.elapsed());
    println!("top five {:?}", &a.ranking.all.order()[..5]);
    if let Some(plan) = &a.allocation {
        let buying = plan.quantities.iter().filter(|q| **q > 0.0).count();
        println!("allocation buys from {buying} suppliers, penalty {:.3}", plan.objective);
    }
    Ok(())
}
