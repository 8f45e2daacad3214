//! Parse a config file, register its mappings, and run the experiment it
//! describes. The same format is what the command line emits next to its
//! outputs, so a run can always be replayed from its artifacts.
//!
//! Run with `cargo run --example config_files`.

use iterfix::{config, run_scheme, Catalog, NormKind, Point, SchemeId, StopCriteria};
use iterfix::schemes::{ParamSchedule, ScheduleRule};

const EXPERIMENT: &str = "\
# a contraction toward 1/2 with a displaced endpoint
[mapping]
id = pinch
domain = 0,1
expr = x == 0 ? 0.1 : (x + 1) / 3
fixed_points = 0.5
special_points = 0

[run]
command = run
map = pinch
scheme = mann
x1 = 1
a = 0.85
n = 25
";

fn main() -> iterfix::Result<()> {
    let file = config::parse(EXPERIMENT)?;

    let catalog = Catalog::with_builtins();
    for stanza in &file.mappings {
        let spec = stanza.to_spec()?;
        spec.validate()?;
        catalog.register(spec)?;
    }

    let run = file.run.expect("the experiment has a [run] stanza");
    let t = catalog.lookup(run.get("map").expect("map key"))?;
    let scheme: SchemeId = run.get("scheme").expect("scheme key").parse()?;
    let x1: Point = run.get("x1").expect("x1 key").parse()?;
    let n: usize = run.get("n").expect("n key").parse().expect("n is a count");
    let schedule = ParamSchedule {
        a: ScheduleRule::parse(run.get("a").expect("a key"))?,
        b: ScheduleRule::constant(0.65),
        c: ScheduleRule::constant(0.45),
    };

    let trace = run_scheme(
        scheme,
        &t,
        &x1,
        &schedule,
        &StopCriteria::max_iterations(n),
        None,
        NormKind::Euclidean,
    )?;
    println!(
        "{} on {} from x1 = {}: x_{} = {}, residual {:e}",
        scheme.name(),
        t.id(),
        x1,
        trace.len(),
        trace.final_point(),
        trace.final_residual(),
    );
    Ok(())
}
