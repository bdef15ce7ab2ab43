//! Risk index over alpha: resilience-heavy at alpha = 1, cost-heavy at 0.

use supplier_dss::fixtures;
use supplier_dss::pipeline::Artifacts;
use supplier_dss::topsis::argmax;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let a = Artifacts::compute(&fixtures::paper_case())?;
    let inputs = a.ranking.scri_inputs().ok_or("no resilience/cost split")?;
    println!("alpha  {}", inputs.suppliers.join("      "));
    for k in 0..=10 {
        let alpha = k as f64 / 10.0;
        let v = inputs.scri(alpha)?;
        let row: Vec<String> = v.iter().map(|x| format!("{x:.4}")).collect();
        println!("{alpha:.1}    {}  -> {}", row.join("  "), inputs.suppliers[argmax(&v)]);
    }
    Ok(())
}
