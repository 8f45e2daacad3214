//! Trace analysis and cross-scheme comparison: distance monotonicity,
//! residual decay, fitted geometric rates, and the pinned reference table
//! for the default comparison setup.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::mapping::{Catalog, MappingSpec};
use crate::numfmt::{g17, sig6};
use crate::schemes::{run_scheme, IterationTrace, ParamSchedule, SchemeId, StopCriteria};
use crate::space::{distance, NormKind, Point};

/// Reference column values for the default comparison setup (see
/// [`table1_setup`]), rendered at 6 significant figures. The `table1`
/// command and the golden tests compare against these strings verbatim.
pub const GOLDEN_NOOR: [&str; 20] = [
    "0.9",
    "0.365217",
    "0.148204",
    "0.0601407",
    "0.0244049",
    "0.00990344",
    "0.00401878",
    "0.00163081",
    "0.000661778",
    "0.000268547",
    "0.000108976",
    "0.000044222",
    "0.0000179451",
    "7.28208e-6",
    "2.95505e-6",
    "1.19915e-6",
    "4.86611e-7",
    "1.97465e-7",
    "8.01307e-8",
    "3.25168e-8",
];

/// Companion column to [`GOLDEN_NOOR`] for the two-step scheme.
pub const GOLDEN_THAKUR: [&str; 20] = [
    "0.9",
    "0.252408",
    "0.0707886",
    "0.0198529",
    "0.0055678",
    "0.00156151",
    "0.00043793",
    "0.000122819",
    "0.0000344449",
    "9.66018e-6",
    "2.70923e-6",
    "7.59811e-7",
    "2.13091e-7",
    "5.97621e-8",
    "1.67605e-8",
    "4.70053e-9",
    "1.31828e-9",
    "3.69715e-10",
    "1.03688e-10",
    "2.90796e-11",
];

/// The pinned reference column for a scheme, when one exists.
pub fn golden_column(scheme: SchemeId) -> Option<&'static [&'static str; 20]> {
    match scheme {
        SchemeId::Noor => Some(&GOLDEN_NOOR),
        SchemeId::Thakur => Some(&GOLDEN_THAKUR),
        _ => None,
    }
}

/// The default comparison setup: the piecewise halving example with
/// schedule a = 0.85, b = 0.65, c = 0.45, start 0.9, twenty recorded
/// iterates, reference fixed point 0.
pub struct Table1Setup {
    pub mapping: Arc<MappingSpec>,
    pub schedule: ParamSchedule,
    pub x1: Point,
    pub iterations: usize,
    pub reference: Point,
}

pub fn table1_setup() -> Table1Setup {
    Table1Setup {
        mapping: Catalog::with_builtins()
            .lookup("paper_example")
            .expect("catalog entry"),
        schedule: ParamSchedule::constant(0.85, 0.65, 0.45),
        x1: Point::scalar(0.9).expect("static"),
        iterations: 20,
        reference: Point::scalar(0.0).expect("static"),
    }
}

/// One column per scheme, one row per recorded iterate. For a
/// one-dimensional domain the tabulated value is the signed coordinate
/// x_n; otherwise it is the distance to the reference point.
pub struct ComparisonTable {
    schemes: Vec<SchemeId>,
    rows: Vec<Vec<f64>>,
    traces: Vec<IterationTrace>,
}

/// Runs every scheme for exactly `n` recorded iterates from `x1` and
/// tabulates the results side by side. `reference_p` must be a declared
/// fixed point of the mapping; it becomes the error reference of every
/// trace.
pub fn compare_schemes(
    t: &MappingSpec,
    schemes: &[SchemeId],
    x1: &Point,
    schedule: &ParamSchedule,
    n: usize,
    reference_p: &Point,
    k: NormKind,
) -> Result<ComparisonTable> {
    let declared = t
        .known_fixed_points()
        .map(|set| set.declares(reference_p, t.domain()))
        .unwrap_or(false);
    if !declared {
        return Err(Error::BadParameter {
            name: "reference_p",
            detail: format!(
                "{reference_p} is not a declared fixed point of {:?}",
                t.id()
            ),
        });
    }
    if schemes.is_empty() {
        return Err(Error::BadParameter {
            name: "schemes",
            detail: "need at least one scheme to compare".to_string(),
        });
    }
    let stop = StopCriteria::max_iterations(n);
    let mut traces = Vec::with_capacity(schemes.len());
    for &scheme in schemes {
        traces.push(run_scheme(
            scheme,
            t,
            x1,
            schedule,
            &stop,
            Some(reference_p),
            k,
        )?);
    }
    let dim = t.dim();
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let row = traces
            .iter()
            .map(|tr| {
                if dim == 1 {
                    tr.x[i][0]
                } else {
                    tr.errors.as_ref().expect("reference was supplied")[i]
                }
            })
            .collect();
        rows.push(row);
    }
    Ok(ComparisonTable {
        schemes: schemes.to_vec(),
        rows,
        traces,
    })
}

impl ComparisonTable {
    pub fn schemes(&self) -> &[SchemeId] {
        &self.schemes
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn traces(&self) -> &[IterationTrace] {
        &self.traces
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// The 6-significant-figure rendering of one cell, as printed in the
    /// text table and compared against the golden columns.
    pub fn cell(&self, row: usize, col: usize) -> String {
        sig6(self.rows[row][col])
    }

    /// Column-aligned text table at 6 significant figures.
    pub fn render_text(&self) -> String {
        let header: Vec<String> = std::iter::once("n".to_string())
            .chain(self.schemes.iter().map(|s| s.name().to_string()))
            .collect();
        let mut grid = vec![header];
        for (i, _) in self.rows.iter().enumerate() {
            let mut line = vec![(i + 1).to_string()];
            for c in 0..self.schemes.len() {
                line.push(self.cell(i, c));
            }
            grid.push(line);
        }
        let cols = grid[0].len();
        let widths: Vec<usize> = (0..cols)
            .map(|c| grid.iter().map(|line| line[c].len()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for line in &grid {
            for (c, cell) in line.iter().enumerate() {
                if c > 0 {
                    out.push_str("  ");
                }
                out.push_str(cell);
                // Pad all but the last column to its width.
                if c + 1 < cols {
                    for _ in cell.len()..widths[c] {
                        out.push(' ');
                    }
                }
            }
            out.push('\n');
        }
        out
    }

    /// CSV with header `n,<scheme>,...` and 17-significant-digit values.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n");
        for s in &self.schemes {
            out.push(',');
            out.push_str(s.name());
        }
        out.push('\n');
        for (i, row) in self.rows.iter().enumerate() {
            out.push_str(&(i + 1).to_string());
            for v in row {
                out.push(',');
                out.push_str(&g17(*v));
            }
            out.push('\n');
        }
        out
    }

    /// Plot-ready two-column data (`n value` per line) for one scheme.
    pub fn gnuplot_data(&self, col: usize) -> String {
        let mut out = String::new();
        for (i, row) in self.rows.iter().enumerate() {
            out.push_str(&(i + 1).to_string());
            out.push(' ');
            out.push_str(&g17(row[col]));
            out.push('\n');
        }
        out
    }
}

/// Result of the monotone-distance check against a fixed point.
#[derive(Clone, Debug)]
pub struct FejerReport {
    pub pass: bool,
    /// 1-based iterate index at which the distance first increased by
    /// more than the tolerance over its predecessor.
    pub first_violation: Option<usize>,
    pub violations: u64,
    pub distances: Vec<f64>,
}

/// Checks `‖x_{n+1} - p‖ <= ‖x_n - p‖ + tol` along the whole trace.
pub fn fejer_check(
    trace: &IterationTrace,
    p: &Point,
    k: NormKind,
    tol: f64,
) -> Result<FejerReport> {
    let mut distances = Vec::with_capacity(trace.len());
    for x in &trace.x {
        distances.push(distance(x, p, k)?);
    }
    let mut violations = 0u64;
    let mut first_violation = None;
    for i in 1..distances.len() {
        if distances[i] > distances[i - 1] + tol {
            violations += 1;
            if first_violation.is_none() {
                first_violation = Some(i + 1);
            }
        }
    }
    Ok(FejerReport {
        pass: violations == 0,
        first_violation,
        violations,
        distances,
    })
}

/// Result of the residual decay check.
#[derive(Clone, Debug)]
pub struct ResidualDecayReport {
    pub pass: bool,
    pub residual_at_horizon: f64,
    pub max_first_quarter: f64,
    pub max_last_quarter: f64,
}

/// Passes iff the residual at the horizon (1-based) is at most `tol` and
/// the largest residual over the last quarter of the trace does not
/// exceed the largest over the first quarter.
pub fn residual_decay_check(
    trace: &IterationTrace,
    horizon: usize,
    tol: f64,
) -> Result<ResidualDecayReport> {
    if horizon == 0 || trace.len() < horizon {
        return Err(Error::TraceTooShort {
            needed: horizon.max(1),
            found: trace.len(),
        });
    }
    let r = &trace.residuals;
    let quarter = (r.len() / 4).max(1);
    let max_of = |s: &[f64]| s.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let max_first_quarter = max_of(&r[..quarter]);
    let max_last_quarter = max_of(&r[r.len() - quarter..]);
    let residual_at_horizon = r[horizon - 1];
    Ok(ResidualDecayReport {
        pass: residual_at_horizon <= tol && max_last_quarter <= max_first_quarter,
        residual_at_horizon,
        max_first_quarter,
        max_last_quarter,
    })
}

/// Fitted geometric ratio: the least-squares slope of `ln(error)` against
/// the iterate index, exponentiated. Entries at or below 1e-300 are
/// dropped before taking logs (they sit at the floating-point floor and
/// would poison the fit); at least four positive entries must remain.
pub fn estimate_rate(errors: &[f64]) -> Result<f64> {
    let pts: Vec<(f64, f64)> = errors
        .iter()
        .enumerate()
        .filter(|&(_, &e)| e > 1e-300)
        .map(|(i, &e)| (i as f64, e.ln()))
        .collect();
    if pts.len() < 4 {
        return Err(Error::NotEnoughData {
            needed: 4,
            found: pts.len(),
        });
    }
    let n = pts.len() as f64;
    let mean_x = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in &pts {
        num += (x - mean_x) * (y - mean_y);
        den += (x - mean_x) * (x - mean_x);
    }
    Ok((num / den).exp())
}

/// Per-scheme convergence measurements extracted from a comparison run.
#[derive(Clone, Debug)]
pub struct SchemeSummary {
    pub scheme: SchemeId,
    pub final_error: f64,
    pub final_residual: f64,
    /// First 1-based iterate whose error is at most the summary's
    /// error tolerance, if any.
    pub iterations_to: Option<usize>,
    /// Fitted geometric ratio; absent when fewer than 4 positive error
    /// entries exist.
    pub empirical_rate: Option<f64>,
    pub fejer_violations: u64,
}

#[derive(Clone, Debug)]
pub struct ConvergenceSummary {
    pub error_tol: f64,
    pub per_scheme: Vec<SchemeSummary>,
}

/// Summarizes a comparison table against its reference point. The
/// monotone-distance check runs at `fejer_tol`.
pub fn summarize(
    table: &ComparisonTable,
    p: &Point,
    k: NormKind,
    error_tol: f64,
    fejer_tol: f64,
) -> Result<ConvergenceSummary> {
    let mut per_scheme = Vec::with_capacity(table.schemes().len());
    for (j, trace) in table.traces().iter().enumerate() {
        let errors = trace.errors.as_ref().expect("comparison traces carry errors");
        let iterations_to = errors
            .iter()
            .position(|&e| e <= error_tol)
            .map(|i| i + 1);
        let fejer = fejer_check(trace, p, k, fejer_tol)?;
        per_scheme.push(SchemeSummary {
            scheme: table.schemes()[j],
            final_error: *errors.last().expect("non-empty trace"),
            final_residual: trace.final_residual(),
            iterations_to,
            empirical_rate: estimate_rate(errors).ok(),
            fejer_violations: fejer.violations,
        });
    }
    Ok(ConvergenceSummary {
        error_tol,
        per_scheme,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mapping::Catalog;

    const E: NormKind = NormKind::Euclidean;

    fn p1(v: f64) -> Point {
        Point::scalar(v).unwrap()
    }

    fn default_table() -> ComparisonTable {
        let s = table1_setup();
        compare_schemes(
            &s.mapping,
            &[SchemeId::Noor, SchemeId::Thakur],
            &s.x1,
            &s.schedule,
            s.iterations,
            &s.reference,
            E,
        )
        .unwrap()
    }

    #[test]
    fn all_forty_cells_match_the_golden_columns() {
        let table = default_table();
        assert_eq!(table.len(), 20);
        for i in 0..20 {
            assert_eq!(table.cell(i, 0), GOLDEN_NOOR[i], "noor row {}", i + 1);
            assert_eq!(table.cell(i, 1), GOLDEN_THAKUR[i], "thakur row {}", i + 1);
        }
    }

    #[test]
    fn first_row_is_the_start_point() {
        let table = default_table();
        assert_eq!(table.rows()[0], vec![0.9, 0.9]);
    }

    #[test]
    fn starting_at_the_fixed_point_tabulates_zeros() {
        let s = table1_setup();
        let table = compare_schemes(
            &s.mapping,
            &[SchemeId::Noor, SchemeId::Thakur],
            &s.reference,
            &s.schedule,
            s.iterations,
            &s.reference,
            E,
        )
        .unwrap();
        for row in table.rows() {
            for &v in row {
                assert!(v.abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn undeclared_reference_points_are_rejected() {
        let s = table1_setup();
        let err = compare_schemes(
            &s.mapping,
            &[SchemeId::Noor],
            &s.x1,
            &s.schedule,
            5,
            &p1(0.3),
            E,
        );
        assert!(matches!(
            err,
            Err(Error::BadParameter {
                name: "reference_p",
                ..
            })
        ));
    }

    #[test]
    fn fejer_passes_for_both_schemes_on_the_default_setup() {
        let table = default_table();
        for trace in table.traces() {
            let r = fejer_check(trace, &p1(0.0), E, 1e-12).unwrap();
            assert!(r.pass, "{:?}", trace.scheme);
            assert_eq!(r.violations, 0);
            assert_eq!(r.distances.len(), 20);
        }
    }

    #[test]
    fn fejer_flags_a_trace_that_walks_away_from_the_reference() {
        // Picard on the squaring map runs 0.5 -> 0.25 -> ... toward 0,
        // monotonically AWAY from the other fixed point 1.
        let t = Catalog::with_builtins().lookup("quadratic").unwrap();
        let trace = run_scheme(
            SchemeId::Picard,
            &t,
            &p1(0.5),
            &ParamSchedule::constant(0.5, 0.5, 0.5),
            &StopCriteria::max_iterations(10),
            Some(&p1(1.0)),
            E,
        )
        .unwrap();
        let r = fejer_check(&trace, &p1(1.0), E, 1e-12).unwrap();
        assert!(!r.pass);
        assert_eq!(r.first_violation, Some(2));
        // Distances grow strictly until the iterate underflows the gap
        // below 1 (around n = 7), after which they sit at exactly 1.0.
        assert_eq!(r.violations, 6);
        // Against its own limit the same trace is monotone.
        assert!(fejer_check(&trace, &p1(0.0), E, 1e-12).unwrap().pass);
    }

    #[test]
    fn residual_decay_holds_at_fifty_iterates_for_both_schemes() {
        let s = table1_setup();
        for scheme in [SchemeId::Noor, SchemeId::Thakur] {
            let trace = run_scheme(
                scheme,
                &s.mapping,
                &s.x1,
                &s.schedule,
                &StopCriteria::max_iterations(50),
                None,
                E,
            )
            .unwrap();
            let r = residual_decay_check(&trace, 50, 1e-10).unwrap();
            assert!(r.pass, "{scheme:?}: {r:?}");
            assert!(r.residual_at_horizon <= 1e-10);
            assert!(r.max_last_quarter < r.max_first_quarter);
        }
    }

    #[test]
    fn residual_decay_fails_on_a_period_two_orbit() {
        // 1 - x from 0.2 oscillates between 0.2 and 0.8 with residual 0.6
        // forever.
        let t = Catalog::with_builtins().lookup("reflection").unwrap();
        let trace = run_scheme(
            SchemeId::Picard,
            &t,
            &p1(0.2),
            &ParamSchedule::constant(0.5, 0.5, 0.5),
            &StopCriteria::max_iterations(40),
            None,
            E,
        )
        .unwrap();
        let r = residual_decay_check(&trace, 40, 1e-10).unwrap();
        assert!(!r.pass);
        // The residual is 0.6 up to one rounding ulp, forever.
        assert!((r.residual_at_horizon - 0.6).abs() <= 1e-15);
        assert_eq!(r.max_first_quarter, r.max_last_quarter);
    }

    #[test]
    fn residual_decay_needs_a_long_enough_trace() {
        let s = table1_setup();
        let trace = run_scheme(
            SchemeId::Noor,
            &s.mapping,
            &s.x1,
            &s.schedule,
            &StopCriteria::max_iterations(10),
            None,
            E,
        )
        .unwrap();
        assert!(matches!(
            residual_decay_check(&trace, 50, 1e-10),
            Err(Error::TraceTooShort {
                needed: 50,
                found: 10
            })
        ));
    }

    #[test]
    fn rate_of_an_exact_geometric_sequence() {
        let errors = [1.0, 0.5, 0.25, 0.125, 0.0625];
        let r = estimate_rate(&errors).unwrap();
        assert!((r - 0.5).abs() <= 1e-12, "{r}");
    }

    #[test]
    fn rate_is_scale_invariant_and_skips_floored_entries() {
        let errors = [1.0, 0.5, 0.25, 0.125, 0.0625];
        let scaled: Vec<f64> = errors.iter().map(|e| e * 3.7e8).collect();
        let a = estimate_rate(&errors).unwrap();
        let b = estimate_rate(&scaled).unwrap();
        assert!((a - b).abs() <= 1e-12);

        // A zero in the middle is dropped; the remaining points still sit
        // exactly on the geometric line.
        let gappy = [1.0, 0.5, 0.25, 0.0, 0.0625];
        let c = estimate_rate(&gappy).unwrap();
        assert!((c - 0.5).abs() <= 1e-12, "{c}");

        assert!(matches!(
            estimate_rate(&[1.0, 0.5, 0.0, 0.0, 0.25]),
            Err(Error::NotEnoughData {
                needed: 4,
                found: 3
            })
        ));
    }

    #[test]
    fn fitted_rates_match_the_observed_ratios_and_order() {
        let table = default_table();
        let noor: Vec<f64> = table.rows().iter().map(|r| r[0].abs()).collect();
        let thakur: Vec<f64> = table.rows().iter().map(|r| r[1].abs()).collect();
        let rn = estimate_rate(&noor).unwrap();
        let rt = estimate_rate(&thakur).unwrap();
        assert!((rn - 0.406).abs() <= 0.02, "noor rate {rn}");
        assert!((rt - 0.28).abs() <= 0.02, "thakur rate {rt}");
        assert!(rt < rn);
    }

    #[test]
    fn per_iterate_dominance_from_the_second_row_on() {
        let table = default_table();
        for (i, row) in table.rows().iter().enumerate().skip(1) {
            assert!(
                row[1].abs() < row[0].abs(),
                "row {}: {} vs {}",
                i + 1,
                row[1],
                row[0]
            );
        }
    }

    #[test]
    fn renderings_are_consistent() {
        let table = default_table();
        let text = table.render_text();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap().split_whitespace().collect::<Vec<_>>(), ["n", "noor", "thakur"]);
        assert_eq!(text.lines().count(), 21);
        let row2: Vec<&str> = text.lines().nth(2).unwrap().split_whitespace().collect();
        assert_eq!(row2, ["2", "0.365217", "0.252408"]);

        let csv = table.to_csv();
        assert!(csv.starts_with("n,noor,thakur\n"));
        assert_eq!(csv.lines().count(), 21);
        let cell = csv.lines().nth(1).unwrap().split(',').nth(1).unwrap();
        assert_eq!(cell.parse::<f64>().unwrap(), 0.9);

        let plot = table.gnuplot_data(1);
        assert_eq!(plot.lines().count(), 20);
        assert!(plot.lines().next().unwrap().starts_with("1 "));
    }

    #[test]
    fn summaries_report_thresholds_rates_and_monotonicity() {
        let table = default_table();
        let s = summarize(&table, &p1(0.0), E, 1e-6, 1e-12).unwrap();
        assert_eq!(s.per_scheme.len(), 2);
        let noor = &s.per_scheme[0];
        let thakur = &s.per_scheme[1];
        // First rows at or below 1e-6: noor 4.86611e-7 at n = 17, thakur
        // 7.59811e-7 at n = 12.
        assert_eq!(noor.iterations_to, Some(17));
        assert_eq!(thakur.iterations_to, Some(12));
        assert_eq!(noor.fejer_violations, 0);
        assert_eq!(thakur.fejer_violations, 0);
        assert!(thakur.final_error < noor.final_error);
        assert!(thakur.empirical_rate.unwrap() < noor.empirical_rate.unwrap());

        // Tightening the tolerance can only push the threshold later.
        let tighter = summarize(&table, &p1(0.0), E, 1e-8, 1e-12).unwrap();
        for (loose, tight) in s.per_scheme.iter().zip(&tighter.per_scheme) {
            match (loose.iterations_to, tight.iterations_to) {
                (Some(a), Some(b)) => assert!(b >= a),
                (None, Some(_)) => panic!("tightening produced an earlier hit"),
                _ => {}
            }
        }
    }
}
