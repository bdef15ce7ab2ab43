//! Induce a TFN from a noisy daily series and compare it with the generator.

use supplier_dss::fuzzy::Tfn;
use supplier_dss::synth;
use supplier_dss::temporal::{induce_tfn, InductionConfig, TimeSeries, TriangleFit};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let truth = Tfn::new(6.0, 11.0, 19.0)?;
    let xs = synth::triangular_series(truth, 365, &mut synth::rng(7));
    let series = TimeSeries::new(xs)?;

    for fit in [TriangleFit::Lsq, TriangleFit::Mode] {
        let cfg = InductionConfig {
            fit,
            ..InductionConfig::default()
        };
        let got = induce_tfn(&series, &cfg)?;
        println!("{fit:?}: {} from {} bins", got.tfn, got.estimate.bin_count);
    }
    println!("generator: {truth}");
    Ok(())
}
