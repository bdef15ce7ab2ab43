//! Range data for one supplier pushed through a frame into a single TFN.

use supplier_dss::fuzzy::Frame;
use supplier_dss::granular::{extract, RangeSet};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let frame = Frame::fuzzify(58.0, 158.0, 7)?;
    let ranges = RangeSet::new(vec![(80.0, 95.0), (90.0, 110.0), (100.0, 120.0), (85.0, 100.0)])?;

    let plain = extract(&frame, &ranges, None)?;
    let weighted = extract(&frame, &ranges, Some(0.8))?;
    let classes: Vec<String> = plain.normalized.per_class.iter().map(|m| format!("{m:.3}")).collect();
    println!("class weights [{}]", classes.join(" "));
    println!("tfn {}", plain.tfn);
    // a reliability factor scales every class by the same amount, so the
    // normalized weights and the TFN do not move
    println!("with reliability 0.8: {}", weighted.tfn);
    Ok(())
}
