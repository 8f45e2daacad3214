//! Hunt for counterexamples to the five checkable conditions on two
//! mappings: one that satisfies them and one built to fail, showing how
//! a witness is reported and independently recomputed.
//!
//! Run with `cargo run --example check_conditions`.

use iterfix::conditions::{
    check_condition_c, check_condition_da, check_condition_i, check_lemma1,
    check_quasi_nonexpansive, recheck, RateFn, DEFAULT_TOL,
};
use iterfix::{Catalog, Domain, MappingSpec, NormKind, Point};

const E: NormKind = NormKind::Euclidean;

fn main() -> iterfix::Result<()> {
    let catalog = Catalog::with_builtins();
    let good = catalog.lookup("paper_example")?;

    // x^2 on [0, 1] keeps its endpoints fixed but stretches distances
    // near 1, so several conditions fail on it.
    let bad = MappingSpec::from_expr("square", Domain::parse("0,1")?, "x ^ 2")?
        .with_fixed_points(vec![Point::scalar(0.0)?, Point::scalar(1.0)?]);
    bad.validate()?;

    let h = RateFn::parse("3 * r / 8")?;
    for t in [&*good, &bad] {
        println!("== {} ==", t.id());
        let reports = [
            check_quasi_nonexpansive(t, E, 10_000, 0, DEFAULT_TOL)?,
            check_condition_c(t, E, 100_000, 0, DEFAULT_TOL)?,
            check_condition_da(t, 0.75, 16, E, 10_000, 100, 0, DEFAULT_TOL)?,
            check_lemma1(t, E, 100_000, 0, DEFAULT_TOL)?,
            check_condition_i(t, &h, E, 10_000, 0, DEFAULT_TOL)?,
        ];
        for r in &reports {
            match &r.witness {
                None => println!("{:<7} holds on every sample tried", r.condition.name()),
                Some(w) => {
                    // recheck recomputes the violation from the witness
                    // alone; a witness that does not survive it is a bug.
                    let again = recheck(t, E, w, DEFAULT_TOL)?;
                    println!(
                        "{:<7} fails, violation {:.6} (recheck {:.6})",
                        r.condition.name(),
                        w.violation(),
                        again,
                    );
                }
            }
        }
    }
    Ok(())
}
