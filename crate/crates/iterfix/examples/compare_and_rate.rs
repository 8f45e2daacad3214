//! Compare all four schemes on one mapping, then summarize convergence:
//! fitted geometric rates, first iterate under a target error, and the
//! monotone-distance check against the fixed point.
//!
//! Run with `cargo run --example compare_and_rate`.

use iterfix::diagnostics::{compare_schemes, summarize};
use iterfix::{Catalog, NormKind, ParamSchedule, Point, SchemeId};

fn main() -> iterfix::Result<()> {
    let catalog = Catalog::with_builtins();
    let t = catalog.lookup("paper_example")?;
    let schemes = [
        SchemeId::Picard,
        SchemeId::Mann,
        SchemeId::Noor,
        SchemeId::Thakur,
    ];
    let p = Point::scalar(0.0)?;

    let table = compare_schemes(
        &t,
        &schemes,
        &Point::scalar(0.9)?,
        &ParamSchedule::constant(0.85, 0.65, 0.45),
        20,
        &p,
        NormKind::Euclidean,
    )?;
    print!("{}", table.render_text());

    let summary = summarize(&table, &p, NormKind::Euclidean, 1e-6, 1e-12)?;
    for s in &summary.per_scheme {
        println!(
            "{:<7} rate ~ {:.4}  first n with error <= 1e-6: {:?}  distance ever increased: {}",
            s.scheme.name(),
            s.empirical_rate.unwrap_or(f64::NAN),
            s.iterations_to,
            s.fejer_violations > 0,
        );
    }
    Ok(())
}
