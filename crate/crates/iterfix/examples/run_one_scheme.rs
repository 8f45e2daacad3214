//! Run a single scheme and walk the recorded trace: iterates, auxiliary
//! stage points, residuals, and errors against a reference fixed point.
//!
//! Run with `cargo run --example run_one_scheme`.

use iterfix::{run_scheme, Catalog, NormKind, ParamSchedule, Point, SchemeId, StopCriteria};

fn main() -> iterfix::Result<()> {
    let catalog = Catalog::with_builtins();
    let t = catalog.lookup("paper_example")?;

    let x1 = Point::scalar(0.9)?;
    let reference = Point::scalar(0.0)?;
    let schedule = ParamSchedule::constant(0.85, 0.65, 0.45);

    // Stop as soon as the residual drops to 1e-8, or after 100 points.
    let stop = StopCriteria {
        max_iterations: 100,
        residual_tol: Some(1e-8),
        error_tol: None,
    };

    let trace = run_scheme(
        SchemeId::Thakur,
        &t,
        &x1,
        &schedule,
        &stop,
        Some(&reference),
        NormKind::Euclidean,
    )?;

    println!("stopped after {} points: {}", trace.len(), trace.stop_reason);
    for (i, x) in trace.x.iter().enumerate() {
        println!(
            "n = {:>2}  x = {:<22}  y = {:<22}  residual = {:e}",
            i + 1,
            x.to_string(),
            trace.aux_y[i].to_string(),
            trace.residuals[i],
        );
    }
    println!("final error: {:e}", trace.final_error().expect("reference given"));

    // The whole trace serializes to CSV with 17-significant-digit values,
    // enough to reconstruct every f64 exactly.
    print!("{}", trace.csv_string());
    Ok(())
}
