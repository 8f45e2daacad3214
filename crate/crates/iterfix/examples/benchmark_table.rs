//! Reproduce the built-in benchmark table and verify it cell by cell
//! against the embedded golden strings.
//!
//! Run with `cargo run --example benchmark_table`.

use iterfix::diagnostics::{compare_schemes, golden_column, table1_setup};
use iterfix::{NormKind, SchemeId};

fn main() -> iterfix::Result<()> {
    let setup = table1_setup();
    let schemes = [SchemeId::Noor, SchemeId::Thakur];
    let table = compare_schemes(
        &setup.mapping,
        &schemes,
        &setup.x1,
        &setup.schedule,
        setup.iterations,
        &setup.reference,
        NormKind::Euclidean,
    )?;

    print!("{}", table.render_text());

    let mut mismatches = 0;
    for (j, scheme) in schemes.iter().enumerate() {
        let golden = golden_column(*scheme).expect("both columns have goldens");
        for (i, want) in golden.iter().enumerate() {
            if table.cell(i, j) != *want {
                mismatches += 1;
                println!("cell ({}, {}) drifted: {} != {want}", i + 1, scheme.name(), table.cell(i, j));
            }
        }
    }
    println!("{} of 40 cells match the golden table", 40 - mismatches);
    Ok(())
}
