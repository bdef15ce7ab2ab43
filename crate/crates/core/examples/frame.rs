//! A seven-class frame over [58, 158] and the memberships of a few points.

use supplier_dss::fuzzy::Frame;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let frame = Frame::fuzzify(58.0, 158.0, 7)?;
    for class in frame.classes() {
        println!("{:>4}  {}", class.label, class.shape);
    }
    println!("crossings {:?}", frame.crossings());
    for t in [58.0, 75.0, 108.0, 150.0] {
        let mu: Vec<String> = frame.memberships(t).iter().map(|m| format!("{m:.2}")).collect();
        println!("mu({t}) = [{}]", mu.join(" "));
    }
    Ok(())
}
