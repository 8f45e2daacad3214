//! Define mappings from expression strings: scalar piecewise formulas,
//! schedules that vary with the step index, and a planar map with one
//! expression per coordinate.
//!
//! Run with `cargo run --example expression_mapping`.

use iterfix::schemes::ScheduleRule;
use iterfix::{run_scheme, Domain, MappingSpec, NormKind, ParamSchedule, Point, SchemeId, StopCriteria};

fn main() -> iterfix::Result<()> {
    // A piecewise contraction with a jump: ternary, comparison, and the
    // usual arithmetic on the coordinate variable x.
    let jump = MappingSpec::from_expr(
        "halving_jump",
        Domain::parse("0,1")?,
        "x == 1 ? 5/8 : x / 2",
    )?
    .with_fixed_points(vec![Point::scalar(0.0)?])
    .with_special_points(vec![Point::scalar(1.0)?]);
    jump.validate()?;
    println!("T(1) = {}", jump.evaluate(&Point::scalar(1.0)?)?);
    println!("T(0.8) = {}", jump.evaluate(&Point::scalar(0.8)?)?);

    // Planar mappings list one expression per coordinate, separated by
    // ';', and index the input point as x[0], x[1].
    let shrink_swap = MappingSpec::from_expr(
        "shrink_swap",
        Domain::parse("-1,1 ; -1,1")?,
        "x[1] / 2 ; x[0] / 2",
    )?
    .with_fixed_points(vec![Point::new(vec![0.0, 0.0])?]);
    shrink_swap.validate()?;
    println!(
        "shrink_swap(1, -1) = {}",
        shrink_swap.evaluate(&Point::new(vec![1.0, -1.0])?)?
    );

    // Schedules parse from the same grammar with n as the variable.
    let schedule = ParamSchedule {
        a: ScheduleRule::parse("n / (n + 1)")?,
        b: ScheduleRule::parse("0.65")?,
        c: ScheduleRule::parse("1 / (n + 2)")?,
    };
    let trace = run_scheme(
        SchemeId::Noor,
        &jump,
        &Point::scalar(0.9)?,
        &schedule,
        &StopCriteria::max_iterations(10),
        None,
        NormKind::Euclidean,
    )?;
    println!("schedule {} gives x_10 = {}", schedule.describe(), trace.final_point());
    Ok(())
}
