//! Order allocation for the bundled case, the published plan's penalty, and a
//! sweep over the value-of-purchase floor.

use supplier_dss::fixtures;
use supplier_dss::goal::{evaluate_plan, solve_allocation, tvp_sweep, AllocationOptions, LeadDenominator};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = fixtures::paper_case().mcgp.ok_or("case has no goal program")?;
    let options = AllocationOptions::default();

    let plan = solve_allocation(&model, &options)?;
    println!("solver   {:?} penalty {:.4}", plan.quantities, plan.objective);
    let reference = evaluate_plan(&model, &fixtures::PLAN, LeadDenominator::Actual)?;
    println!("reference {:?} penalty {:.4}", fixtures::PLAN, reference.objective);

    for point in tvp_sweep(&model, &[180.0, 220.0, 260.0], &options)? {
        println!(
            "tvp {:>5}: {:?} penalty {:.4}",
            point.tvp, point.plan.quantities, point.plan.objective
        );
    }
    Ok(())
}
